//! The eight color/texture/shape dissociation test sets.

use std::collections::HashSet;

use crate::composer::config::{GenerationConfig, VariantKind};
use crate::composer::dataset::{image_path, Dataset, ObjectSet};
use crate::composer::placement::place_pair;
use crate::datamodel::records::{DissociationCondition, Label, ObjectSplits, Split, StimulusRecord, Variant};
use crate::error::{Error, Result};
use crate::objectgen::{factorized_object_id, gen_factorized, FactorCatalog};
use crate::raster::ObjectImage;
use crate::rng::SeedStream;

const MAX_DRAWS: usize = 100_000;

type Triple = (usize, usize, usize);

/// One dataset per condition, in [`DissociationCondition::all`] order.
///
/// Each set uses `dissociation.unique_objects` distinct objects. CTS pairs
/// every object with itself; the other conditions use disjoint pairs whose
/// factor equality pattern matches the condition exactly. Stimuli cycle
/// through the pairs with fresh placements.
pub fn build_dissociation_sets(
    config: &GenerationConfig,
    catalog: &FactorCatalog,
    stream: &SeedStream,
) -> Result<Vec<(DissociationCondition, Dataset)>> {
    let spec = config.dissociation;
    let sizes = [catalog.shapes().len(), catalog.textures().len(), catalog.colors().len()];
    if sizes.iter().any(|&n| n < 2) {
        return Err(Error::InvalidConfig(format!(
            "dissociation needs at least 2 shapes, textures and colors, got {sizes:?}"
        )));
    }
    if spec.unique_objects < 2 || spec.unique_objects % 2 != 0 {
        return Err(Error::InvalidConfig(format!(
            "dissociation unique_objects must be even and at least 2, got {}",
            spec.unique_objects
        )));
    }
    if spec.unique_objects > catalog.combinations() {
        return Err(Error::InsufficientObjects {
            needed: spec.unique_objects,
            available: catalog.combinations(),
        });
    }
    if spec.stimuli == 0 {
        return Err(Error::InvalidConfig("dissociation stimuli must be positive".into()));
    }

    DissociationCondition::all()
        .into_iter()
        .enumerate()
        .map(|(ci, cond)| {
            let mut rng = stream.fork(ci as u64);
            let pairs = condition_pairs(cond, catalog, spec.unique_objects, &mut rng)?;
            let dataset = compose_condition(config, cond, catalog, &pairs, spec.stimuli, &mut rng)?;
            Ok((cond, dataset))
        })
        .collect()
}

fn condition_pairs(
    cond: DissociationCondition,
    catalog: &FactorCatalog,
    unique: usize,
    rng: &mut SeedStream,
) -> Result<Vec<(Triple, Triple)>> {
    let sizes = [catalog.shapes().len(), catalog.textures().len(), catalog.colors().len()];
    let random = |rng: &mut SeedStream| (rng.below_usize(sizes[0]), rng.below_usize(sizes[1]), rng.below_usize(sizes[2]));
    let other = |rng: &mut SeedStream, v: usize, n: usize| (v + 1 + rng.below_usize(n - 1)) % n;
    let mut used: HashSet<Triple> = HashSet::new();
    let mut pairs = Vec::new();
    let target = if cond.is_identical() { unique } else { unique / 2 };
    for _ in 0..MAX_DRAWS {
        if pairs.len() == target {
            break;
        }
        let a = random(rng);
        if used.contains(&a) {
            continue;
        }
        if cond.is_identical() {
            used.insert(a);
            pairs.push((a, a));
            continue;
        }
        let b = (
            if cond.shape_same { a.0 } else { other(rng, a.0, sizes[0]) },
            if cond.texture_same { a.1 } else { other(rng, a.1, sizes[1]) },
            if cond.color_same { a.2 } else { other(rng, a.2, sizes[2]) },
        );
        if used.contains(&b) {
            continue;
        }
        used.insert(a);
        used.insert(b);
        pairs.push((a, b));
    }
    if pairs.len() < target {
        return Err(Error::Generation(format!(
            "catalog too small for {unique} distinct objects in condition {cond}"
        )));
    }
    Ok(pairs)
}

fn compose_condition(
    config: &GenerationConfig,
    cond: DissociationCondition,
    catalog: &FactorCatalog,
    pairs: &[(Triple, Triple)],
    stimuli: usize,
    rng: &mut SeedStream,
) -> Result<Dataset> {
    let object = |t: Triple| -> Result<ObjectImage> {
        let f = catalog.ids(t.0, t.1, t.2);
        gen_factorized(&f.shape_id, &f.texture_id, &f.color_id, catalog)
    };
    let id = |t: Triple| factorized_object_id(&catalog.ids(t.0, t.1, t.2));

    let mut objects = ObjectSet::default();
    for &(a, b) in pairs {
        for t in [a, b] {
            if !objects.contains(&id(t)) {
                objects.insert(object(t)?)?;
            }
        }
    }
    let label = if cond.is_identical() { Label::Same } else { Label::Different };
    let mut order: Vec<usize> = (0..stimuli).map(|k| k % pairs.len()).collect();
    rng.shuffle(&mut order);
    let records = order
        .into_iter()
        .enumerate()
        .map(|(k, p)| {
            let (mut a, mut b) = pairs[p];
            if rng.below(2) == 1 {
                std::mem::swap(&mut a, &mut b);
            }
            let (pos_a, pos_b) = place_pair(config.placement_mode, rng)?;
            let stimulus_id = format!("{cond}-{k:05}");
            Ok(StimulusRecord {
                image_path: image_path(Split::Test, &stimulus_id),
                stimulus_id,
                label: Some(label),
                object_a: id(a),
                object_b: Some(id(b)),
                pos_a,
                pos_b: Some(pos_b),
                split: Split::Test,
                variant: Variant::Dissociation(cond),
            })
        })
        .collect::<Result<Vec<_>>>()?;

    let mut test = objects.ids();
    test.sort();
    let mut config = config.clone();
    config.variant = VariantKind::Dissociation;
    Dataset::new(
        format!("{}-{cond}", config.dataset_id),
        config.root_seed,
        config,
        ObjectSplits {
            train: Vec::new(),
            val: Vec::new(),
            test,
        },
        records,
        objects,
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::composer::config::DissociationSpec;
    use crate::objectgen::CatalogSpec;
    use crate::rng::derive_stream;

    fn small() -> GenerationConfig {
        GenerationConfig {
            dataset_id: "sha".into(),
            dissociation: DissociationSpec {
                unique_objects: 40,
                stimuli: 100,
            },
            ..GenerationConfig::default()
        }
    }

    #[test]
    fn factor_patterns_match_conditions() {
        let catalog = FactorCatalog::procedural(&CatalogSpec::default()).unwrap();
        let sets = build_dissociation_sets(&small(), &catalog, &derive_stream(1, 2)).unwrap();
        assert_eq!(sets.len(), 8);
        for (cond, d) in &sets {
            assert_eq!(d.manifest.records.len(), 100);
            assert_eq!(d.objects.len(), 40, "{cond}");
            for r in &d.manifest.records {
                let a = d.objects.get(&r.object_a).unwrap().factors().unwrap();
                let b = d.objects.get(r.object_b.as_ref().unwrap()).unwrap().factors().unwrap();
                assert_eq!(a.color_id == b.color_id, cond.color_same);
                assert_eq!(a.texture_id == b.texture_id, cond.texture_same);
                assert_eq!(a.shape_id == b.shape_id, cond.shape_same);
                assert_eq!(r.label == Some(Label::Same), cond.is_identical());
            }
        }
    }

    #[test]
    fn reference_sizes() {
        let catalog = FactorCatalog::procedural(&CatalogSpec::default()).unwrap();
        let config = GenerationConfig::default();
        let sets = build_dissociation_sets(&config, &catalog, &derive_stream(0, 7)).unwrap();
        for (_, d) in &sets {
            assert_eq!(d.manifest.records.len(), 6400);
            assert_eq!(d.objects.len(), 300);
        }
    }

    #[test]
    fn catalog_too_small() {
        let catalog = FactorCatalog::procedural(&CatalogSpec { shapes: 1, textures: 4, colors: 4 }).unwrap();
        assert!(build_dissociation_sets(&small(), &catalog, &derive_stream(0, 0)).is_err());
        let catalog = FactorCatalog::procedural(&CatalogSpec { shapes: 2, textures: 2, colors: 2 }).unwrap();
        assert!(build_dissociation_sets(&small(), &catalog, &derive_stream(0, 0)).is_err());
    }
}
