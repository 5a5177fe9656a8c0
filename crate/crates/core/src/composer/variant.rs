//! Grayscale, masked and flipped variants of a base dataset.

use std::collections::HashSet;

use crate::composer::config::VariantKind;
use crate::composer::dataset::{Dataset, ObjectSet};
use crate::datamodel::records::{Label, StimulusRecord, Variant};
use crate::error::{Error, Result};
use crate::objectgen::{is_mirror_symmetric, mirror, to_grayscale, to_masked};

/// Suffix marking the mirrored copy of an object.
pub const MIRROR_SUFFIX: &str = "@mirror";

/// The id of the object a (possibly mirrored) object id derives from.
pub fn base_object_id(id: &str) -> &str {
    id.strip_suffix(MIRROR_SUFFIX).unwrap_or(id)
}

pub fn build_variant(base: &Dataset, kind: VariantKind) -> Result<Dataset> {
    let (objects, records, variant) = match kind {
        VariantKind::Grayscale => (base.objects.map(to_grayscale)?, base.manifest.records.clone(), Variant::Grayscale),
        VariantKind::Masked => (base.objects.map(to_masked)?, base.manifest.records.clone(), Variant::Masked),
        VariantKind::Flipped => {
            let (objects, records) = flip_different_pairs(base)?;
            (objects, records, Variant::Flipped)
        }
        other => {
            return Err(Error::InvalidConfig(format!(
                "`{other:?}` is not a derived variant (expected grayscale, masked or flipped)"
            )))
        }
    };
    let records = records.into_iter().map(|r| StimulusRecord { variant, ..r }).collect();
    let mut config = base.manifest.config.clone();
    config.variant = kind;
    Dataset::new(
        base.manifest.dataset_id.clone(),
        base.manifest.root_seed,
        config,
        base.manifest.object_splits.clone(),
        records,
        objects,
    )
}

/// Keeps "same" records and turns each "different" record into `(o, mirror(o))`
/// at the original positions. `o` is whichever of the pair's objects is
/// asymmetric (preferring one not yet shown), or else the next asymmetric
/// object of the split.
fn flip_different_pairs(base: &Dataset) -> Result<(ObjectSet, Vec<StimulusRecord>)> {
    let symmetric: HashSet<String> = base
        .objects
        .iter()
        .filter(|o| is_mirror_symmetric(o))
        .map(|o| o.object_id().to_string())
        .collect();
    if 2 * symmetric.len() > base.objects.len() {
        return Err(Error::Generation(format!(
            "{} of {} objects are mirror-symmetric; flipped labels would be degenerate",
            symmetric.len(),
            base.objects.len()
        )));
    }
    let splits = &base.manifest.object_splits;
    let mut shown: HashSet<&str> = base
        .manifest
        .records
        .iter()
        .filter(|r| r.label == Some(Label::Same))
        .map(|r| r.object_a.as_str())
        .collect();
    let mut objects = base.objects.clone();
    let mut records = Vec::with_capacity(base.manifest.records.len());
    for r in &base.manifest.records {
        if r.label != Some(Label::Different) {
            records.push(r.clone());
            continue;
        }
        let b = r.object_b.as_deref().unwrap_or(&r.object_a);
        let asym: Vec<&str> = [r.object_a.as_str(), b].into_iter().filter(|id| !symmetric.contains(*id)).collect();
        let source = match asym.iter().find(|id| !shown.contains(**id)).or(asym.first()) {
            Some(id) => *id,
            None => next_asymmetric(splits.get(r.split), &r.object_a, &symmetric).ok_or_else(|| {
                Error::Generation(format!("{} split has no asymmetric object to mirror", r.split.as_str()))
            })?,
        };
        shown.insert(source);
        let mirror_id = format!("{source}{MIRROR_SUFFIX}");
        if !objects.contains(&mirror_id) {
            objects.insert(mirror(base.objects.get(source)?).with_id(&mirror_id))?;
        }
        records.push(StimulusRecord {
            object_a: source.to_string(),
            object_b: Some(mirror_id),
            ..r.clone()
        });
    }
    Ok((objects, records))
}

fn next_asymmetric<'a>(split_objects: &'a [String], start: &str, symmetric: &HashSet<String>) -> Option<&'a str> {
    let pos = split_objects.iter().position(|o| o == start).unwrap_or(0);
    (0..split_objects.len())
        .map(|k| split_objects[(pos + k) % split_objects.len()].as_str())
        .find(|id| !symmetric.contains(*id))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::composer::config::{GenerationConfig, ObjectSourceConfig};
    use crate::composer::dataset::build_dataset;
    use crate::composer::dataset::tests::mini_config;
    use crate::objectgen::{CatalogSpec, NoiseSpec, MASK_GRAY};
    use crate::raster::{crop, OBJECT_SIZE, WHITE};

    fn region(d: &Dataset, r: &StimulusRecord, second: bool) -> image::RgbImage {
        let img = d.render(r).unwrap();
        let p = if second { r.pos_b.unwrap() } else { r.pos_a };
        crop(&img, p.x, p.y, OBJECT_SIZE, OBJECT_SIZE)
    }

    #[test]
    fn flipped_different_records_hold_mirrors() {
        let base = build_dataset(&mini_config(), 3).unwrap();
        let flipped = build_variant(&base, VariantKind::Flipped).unwrap();
        assert_eq!(flipped.manifest.records.len(), base.manifest.records.len());
        for (r, orig) in flipped.manifest.records.iter().zip(&base.manifest.records) {
            assert_eq!(r.variant, Variant::Flipped);
            assert_eq!((r.pos_a, r.pos_b, r.label), (orig.pos_a, orig.pos_b, orig.label));
            let (a, b) = (region(&flipped, r, false), region(&flipped, r, true));
            if r.label == Some(Label::Same) {
                assert_eq!(a, b);
            } else {
                assert_eq!(b, image::imageops::flip_horizontal(&a));
                assert_ne!(a, b);
            }
        }
    }

    #[test]
    fn masked_factorized_objects_are_uniform_gray() {
        let config = GenerationConfig {
            source: ObjectSourceConfig::Factorized {
                catalog: CatalogSpec::default(),
            },
            variant: VariantKind::Masked,
            ..mini_config()
        };
        let d = build_dataset(&config, 4).unwrap();
        for o in d.objects.iter() {
            assert!(o.pixels().pixels().all(|p| *p == WHITE || *p == MASK_GRAY));
            assert!(o.pixels().pixels().any(|p| *p == MASK_GRAY));
        }
        assert!(d.manifest.records.iter().all(|r| r.variant == Variant::Masked));
    }

    #[test]
    fn grayscale_of_gray_objects_is_identity() {
        let config = GenerationConfig {
            source: ObjectSourceConfig::Noise { spec: NoiseSpec::default() },
            ..mini_config()
        };
        let base = build_dataset(&config, 9).unwrap();
        let gray = build_variant(&base, VariantKind::Grayscale).unwrap();
        for r in &base.manifest.records {
            assert_eq!(base.render(r).unwrap(), gray.render(r).unwrap());
        }
        assert_eq!(base.manifest.image_checksums, gray.manifest.image_checksums);
    }

    #[test]
    fn mostly_symmetric_sets_are_rejected() {
        let config = GenerationConfig {
            source: ObjectSourceConfig::Factorized {
                catalog: CatalogSpec::default(),
            },
            ..mini_config()
        };
        let mut base = build_dataset(&config, 4).unwrap();
        let objects = base
            .objects
            .iter()
            .map(|o| {
                let mut px = o.pixels().clone();
                for y in 0..OBJECT_SIZE {
                    for x in OBJECT_SIZE / 2..OBJECT_SIZE {
                        let p = *px.get_pixel(OBJECT_SIZE - 1 - x, y);
                        px.put_pixel(x, y, p);
                    }
                }
                o.with_pixels(px).unwrap()
            })
            .collect();
        base.objects = ObjectSet::new(objects).unwrap();
        assert!(build_variant(&base, VariantKind::Flipped).is_err());
    }

    #[test]
    fn only_derived_kinds() {
        let base = build_dataset(&mini_config(), 3).unwrap();
        assert!(build_variant(&base, VariantKind::Aligned).is_err());
    }

    #[test]
    fn mirror_suffix() {
        assert_eq!(base_object_id("squ-00001@mirror"), "squ-00001");
        assert_eq!(base_object_id("squ-00001"), "squ-00001");
    }
}
