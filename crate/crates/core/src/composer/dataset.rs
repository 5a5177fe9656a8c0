//! Dataset assembly, rendering and on-disk layout.
//!
//! A dataset directory holds `manifest.jsonl`, `images/<split>/<id>.png`,
//! `objects/<object_id>.png` with `objects/index.json`, and one
//! `splits/<split>.jsonl` manifest per populated split.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::path::Path;

use image::RgbImage;
use rayon::prelude::*;

use crate::composer::config::{GenerationConfig, ObjectSourceConfig, VariantKind};
use crate::composer::domain;
use crate::composer::pairs::select_pairs;
use crate::composer::placement::place_pair;
use crate::composer::splits::build_splits;
use crate::composer::variant::build_variant;
use crate::datamodel::manifest::DatasetManifest;
use crate::datamodel::objects::{object_file_name, write_object_index, ObjectIndexEntry, OBJECT_INDEX_FILE};
use crate::datamodel::records::{ObjectSplits, Position, Split, StimulusRecord, Variant};
use crate::error::{Error, Result};
use crate::objectgen::{gen_factorized, gen_noise, gen_squiggle, import_objects, FactorCatalog};
use crate::raster::{blit, fnv1a64, white_image, write_png, ObjectImage, CANVAS_SIZE};
use crate::rng::{derive_stream, stream_index, SeedStream};

const MAX_DUPLICATE_RETRIES: u64 = 1000;

/// Objects addressable by id, in insertion order.
#[derive(Clone, Debug, Default)]
pub struct ObjectSet {
    objects: Vec<ObjectImage>,
    by_id: HashMap<String, usize>,
}

impl ObjectSet {
    pub fn new(objects: Vec<ObjectImage>) -> Result<Self> {
        let mut set = ObjectSet::default();
        for o in objects {
            set.insert(o)?;
        }
        Ok(set)
    }

    pub fn insert(&mut self, object: ObjectImage) -> Result<()> {
        if self.by_id.contains_key(object.object_id()) {
            return Err(Error::Generation(format!("duplicate object id `{}`", object.object_id())));
        }
        self.by_id.insert(object.object_id().to_string(), self.objects.len());
        self.objects.push(object);
        Ok(())
    }

    pub fn get(&self, id: &str) -> Result<&ObjectImage> {
        self.by_id
            .get(id)
            .map(|&i| &self.objects[i])
            .ok_or_else(|| Error::UnknownId {
                kind: "object",
                id: id.to_string(),
            })
    }

    pub fn contains(&self, id: &str) -> bool {
        self.by_id.contains_key(id)
    }

    pub fn iter(&self) -> impl Iterator<Item = &ObjectImage> {
        self.objects.iter()
    }

    pub fn ids(&self) -> Vec<String> {
        self.objects.iter().map(|o| o.object_id().to_string()).collect()
    }

    pub fn len(&self) -> usize {
        self.objects.len()
    }

    pub fn is_empty(&self) -> bool {
        self.objects.is_empty()
    }

    /// Applies `f` to every object, keeping ids.
    pub fn map(&self, f: impl Fn(&ObjectImage) -> ObjectImage + Sync + Send) -> Result<ObjectSet> {
        ObjectSet::new(self.objects.par_iter().map(f).collect())
    }
}

/// A manifest together with the objects its records reference.
#[derive(Clone, Debug)]
pub struct Dataset {
    pub manifest: DatasetManifest,
    pub objects: ObjectSet,
}

impl Dataset {
    /// Assembles a dataset and fills in image checksums.
    pub fn new(
        dataset_id: String,
        root_seed: u64,
        config: GenerationConfig,
        object_splits: ObjectSplits,
        records: Vec<StimulusRecord>,
        objects: ObjectSet,
    ) -> Result<Self> {
        let mut dataset = Dataset {
            manifest: DatasetManifest {
                dataset_id,
                root_seed,
                config,
                object_splits,
                records,
                image_checksums: BTreeMap::new(),
            },
            objects,
        };
        dataset.refresh_checksums()?;
        Ok(dataset)
    }

    pub fn render(&self, record: &StimulusRecord) -> Result<RgbImage> {
        let a = self.objects.get(&record.object_a)?;
        let b = match (&record.object_b, record.pos_b) {
            (Some(id), Some(pos)) => Some((self.objects.get(id)?, pos)),
            (None, None) => None,
            _ => {
                return Err(Error::Generation(format!(
                    "record `{}` has only one of object_b/pos_b",
                    record.stimulus_id
                )))
            }
        };
        Ok(compose_stimulus(a, record.pos_a, b))
    }

    pub fn refresh_checksums(&mut self) -> Result<()> {
        let sums: Vec<(String, u64)> = self
            .manifest
            .records
            .par_iter()
            .map(|r| Ok((r.image_path.clone(), fnv1a64(self.render(r)?.as_raw()))))
            .collect::<Result<_>>()?;
        self.manifest.image_checksums = sums.into_iter().collect();
        Ok(())
    }

    /// Writes images, objects and manifests under `dir`.
    pub fn write(&self, dir: &Path) -> Result<()> {
        std::fs::create_dir_all(dir).map_err(Error::io(dir))?;
        self.manifest
            .records
            .par_iter()
            .try_for_each(|r| write_png(&dir.join(&r.image_path), &self.render(r)?))?;

        let objects_dir = dir.join("objects");
        let entries: Vec<ObjectIndexEntry> = self
            .objects
            .objects
            .par_iter()
            .map(|o| {
                let file = object_file_name(o.object_id());
                write_png(&objects_dir.join(&file), o.pixels())?;
                Ok(ObjectIndexEntry {
                    object_id: o.object_id().to_string(),
                    source: o.source(),
                    factors: o.factors().cloned(),
                    file,
                })
            })
            .collect::<Result<_>>()?;
        write_object_index(&objects_dir.join(OBJECT_INDEX_FILE), &entries)?;

        self.manifest.write(&dir.join("manifest.jsonl"))?;
        for split in Split::ALL {
            if self.manifest.records_in(split).next().is_some() {
                let path = dir.join("splits").join(format!("{}.jsonl", split.as_str()));
                self.manifest.restricted_to(split).write(&path)?;
            }
        }
        Ok(())
    }
}

/// White canvas with the objects blitted at their positions; no blending.
pub fn compose_stimulus(a: &ObjectImage, pos_a: Position, b: Option<(&ObjectImage, Position)>) -> RgbImage {
    let mut canvas = white_image(CANVAS_SIZE, CANVAS_SIZE);
    blit(&mut canvas, a.pixels(), pos_a.x, pos_a.y);
    if let Some((b, pos_b)) = b {
        blit(&mut canvas, b.pixels(), pos_b.x, pos_b.y);
    }
    canvas
}

/// Generates `count` pixel-distinct objects from the configured source.
pub fn generate_objects(source: &ObjectSourceConfig, count: usize, root_seed: u64) -> Result<Vec<ObjectImage>> {
    let stream = |d: u16, i: u64| derive_stream(root_seed, stream_index(d, i));
    match source {
        ObjectSourceConfig::Squiggle { spec } => {
            spec.validate()?;
            unique_generated(count, "squ", |i, retry| {
                let s = match retry {
                    0 => stream(domain::OBJECT, i as u64),
                    r => stream(domain::OBJECT_RETRY, (i as u64) << 16 | r),
                };
                gen_squiggle(spec, &s, &format!("squ-{i:05}"))
            })
        }
        ObjectSourceConfig::Noise { spec } => {
            spec.validate()?;
            unique_generated(count, "noise", |i, retry| {
                let s = match retry {
                    0 => stream(domain::OBJECT, i as u64),
                    r => stream(domain::OBJECT_RETRY, (i as u64) << 16 | r),
                };
                gen_noise(spec, &s, &format!("noise-{i:05}"))
            })
        }
        ObjectSourceConfig::Factorized { catalog } => {
            let catalog = FactorCatalog::procedural(catalog)?;
            if count > catalog.combinations() {
                return Err(Error::InsufficientObjects {
                    needed: count,
                    available: catalog.combinations(),
                });
            }
            let mut order: Vec<usize> = (0..catalog.combinations()).collect();
            stream(domain::OBJECT_PICK, 0).shuffle(&mut order);
            order[..count]
                .par_iter()
                .map(|&k| {
                    let (s, t, c) = catalog.triple(k);
                    let f = catalog.ids(s, t, c);
                    gen_factorized(&f.shape_id, &f.texture_id, &f.color_id, &catalog)
                })
                .collect()
        }
        ObjectSourceConfig::Imported { directory } => {
            let mut objects = import_objects(directory)?;
            if objects.len() < count {
                return Err(Error::InsufficientObjects {
                    needed: count,
                    available: objects.len(),
                });
            }
            stream(domain::OBJECT_PICK, 0).shuffle(&mut objects);
            objects.truncate(count);
            Ok(objects)
        }
    }
}

/// Generates objects in parallel, then regenerates (sequentially, in index
/// order) any object whose pixels duplicate an earlier one.
fn unique_generated(
    count: usize,
    kind: &str,
    generate: impl Fn(usize, u64) -> Result<ObjectImage> + Sync,
) -> Result<Vec<ObjectImage>> {
    let mut objects: Vec<ObjectImage> = (0..count).into_par_iter().map(|i| generate(i, 0)).collect::<Result<_>>()?;
    let mut seen: HashMap<u64, usize> = HashMap::with_capacity(count);
    for i in 0..count {
        let mut retry = 0;
        loop {
            let sum = objects[i].checksum();
            match seen.get(&sum) {
                Some(&j) if objects[j].pixel_eq(&objects[i]) => {
                    retry += 1;
                    if retry > MAX_DUPLICATE_RETRIES {
                        return Err(Error::Generation(format!("cannot generate a distinct {kind} object #{i}")));
                    }
                    objects[i] = generate(i, retry)?;
                }
                _ => {
                    seen.insert(sum, i);
                    break;
                }
            }
        }
    }
    Ok(objects)
}

/// Builds the dataset described by `config`. Grayscale, masked and flipped
/// variants are derived from the base dataset of the same config and seed.
pub fn build_dataset(config: &GenerationConfig, root_seed: u64) -> Result<Dataset> {
    config.validate()?;
    let mut config = config.clone();
    config.root_seed = root_seed;
    match config.variant {
        VariantKind::Base | VariantKind::Aligned => {}
        kind @ (VariantKind::Grayscale | VariantKind::Masked | VariantKind::Flipped) => {
            let base = build_dataset(
                &GenerationConfig {
                    variant: VariantKind::Base,
                    ..config.clone()
                },
                root_seed,
            )?;
            return build_variant(&base, kind);
        }
        VariantKind::Dissociation | VariantKind::SingleObject => {
            return Err(Error::InvalidConfig(format!(
                "variant `{:?}` is built by its dedicated builder",
                config.variant
            )))
        }
    }
    let objects = generate_objects(&config.source, config.object_count, root_seed)?;
    let ids: Vec<String> = objects.iter().map(|o| o.object_id().to_string()).collect();
    let splits = build_splits(&ids, &derive_stream(root_seed, stream_index(domain::SPLIT, 0)), config.split_sizes)?;
    let variant = if config.variant == VariantKind::Aligned {
        Variant::Aligned
    } else {
        Variant::Base
    };

    let mut records = Vec::new();
    for split in Split::ALL {
        records.extend(compose_split(&config, root_seed, split, splits.get(split), variant)?);
    }
    let used: HashSet<&str> = splits.train.iter().chain(&splits.val).chain(&splits.test).map(String::as_str).collect();
    let objects = ObjectSet::new(objects.into_iter().filter(|o| used.contains(o.object_id())).collect())?;
    Dataset::new(config.dataset_id.clone(), root_seed, config, splits, records, objects)
}

fn compose_split(
    config: &GenerationConfig,
    root_seed: u64,
    split: Split,
    split_objects: &[String],
    variant: Variant,
) -> Result<Vec<StimulusRecord>> {
    let total = config.stimuli_for(split);
    if total == 0 {
        return Ok(Vec::new());
    }
    let per_label = total / 2;
    let per_pair = config.placements_per_pair.unwrap_or(1);
    let pairs_per_label = per_label.div_ceil(per_pair);
    let selected = select_pairs(
        split_objects,
        pairs_per_label,
        pairs_per_label,
        &derive_stream(root_seed, stream_index(domain::PAIRS, split.index())),
    )
    .map_err(|e| Error::Generation(format!("{} split: {e}", split.as_str())))?;

    let (same, diff) = selected.split_at(pairs_per_label);
    let mut stimuli: Vec<_> = [same, diff]
        .into_iter()
        .flat_map(|group| group.iter().flat_map(|p| std::iter::repeat_n(p, per_pair)).take(per_label))
        .collect();
    derive_stream(root_seed, stream_index(domain::ORDER, split.index())).shuffle(&mut stimuli);

    let mode = config.effective_placement();
    stimuli
        .into_iter()
        .enumerate()
        .map(|(k, pair)| {
            let mut s = placement_stream(root_seed, split, k);
            let (pos_a, pos_b) = place_pair(mode, &mut s)?;
            let stimulus_id = format!("{}-{k:05}", split.as_str());
            Ok(StimulusRecord {
                image_path: image_path(split, &stimulus_id),
                stimulus_id,
                label: Some(pair.label),
                object_a: pair.object_a.clone(),
                object_b: Some(pair.object_b.clone()),
                pos_a,
                pos_b: Some(pos_b),
                split,
                variant,
            })
        })
        .collect()
}

pub(crate) fn placement_stream(root_seed: u64, split: Split, k: usize) -> SeedStream {
    derive_stream(root_seed, stream_index(domain::PLACEMENT, split.index() << 40 | k as u64))
}

pub(crate) fn image_path(split: Split, stimulus_id: &str) -> String {
    format!("images/{}/{stimulus_id}.png", split.as_str())
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;
    use crate::composer::config::SplitSizes;
    use crate::datamodel::records::Label;
    use crate::raster::crop;
    use crate::raster::OBJECT_SIZE;

    pub(crate) fn mini_config() -> GenerationConfig {
        GenerationConfig {
            dataset_id: "mini".into(),
            object_count: 16,
            split_sizes: SplitSizes { train: 10, val: 3, test: 3 },
            stimuli_per_split: 64,
            ..GenerationConfig::default()
        }
    }

    #[test]
    fn miniature_dataset_shape() {
        let d = build_dataset(&mini_config(), 5).unwrap();
        for split in Split::ALL {
            assert_eq!(d.manifest.label_counts(split), (32, 32));
        }
        assert_eq!(d.objects.len(), 16);
        assert_eq!(d.manifest.image_checksums.len(), 192);
    }

    #[test]
    fn same_pairs_render_identical_regions() {
        let d = build_dataset(&mini_config(), 6).unwrap();
        for r in &d.manifest.records {
            let img = d.render(r).unwrap();
            let pb = r.pos_b.unwrap();
            let a = crop(&img, r.pos_a.x, r.pos_a.y, OBJECT_SIZE, OBJECT_SIZE);
            let b = crop(&img, pb.x, pb.y, OBJECT_SIZE, OBJECT_SIZE);
            assert_eq!(a == b, r.label == Some(Label::Same), "{}", r.stimulus_id);
        }
    }

    #[test]
    fn deterministic() {
        let a = build_dataset(&mini_config(), 11).unwrap();
        let b = build_dataset(&mini_config(), 11).unwrap();
        assert_eq!(a.manifest, b.manifest);
        let c = build_dataset(&mini_config(), 12).unwrap();
        assert_ne!(a.manifest.image_checksums, c.manifest.image_checksums);
    }

    #[test]
    fn placements_per_pair_repeats_pairs() {
        let config = GenerationConfig {
            placements_per_pair: Some(4),
            ..mini_config()
        };
        let d = build_dataset(&config, 1).unwrap();
        let mut counts: HashMap<(String, String), usize> = HashMap::new();
        for r in d.manifest.records_in(Split::Train) {
            *counts.entry((r.object_a.clone(), r.object_b.clone().unwrap())).or_default() += 1;
        }
        assert!(counts.values().any(|&c| c >= 2));
    }

    #[test]
    fn swapping_a_same_pair_keeps_pixels() {
        let d = build_dataset(&mini_config(), 2).unwrap();
        let r = d.manifest.records.iter().find(|r| r.label == Some(Label::Same)).unwrap();
        let mut swapped = r.clone();
        swapped.stimulus_id.push_str("-swapped");
        std::mem::swap(&mut swapped.pos_a, swapped.pos_b.as_mut().unwrap());
        assert_ne!(swapped.stimulus_id, r.stimulus_id);
        assert_eq!(d.render(r).unwrap(), d.render(&swapped).unwrap());
    }

    #[test]
    fn factorized_source_needs_enough_combinations() {
        let config = GenerationConfig {
            source: ObjectSourceConfig::Factorized {
                catalog: crate::objectgen::CatalogSpec { shapes: 2, textures: 2, colors: 2 },
            },
            object_count: 16,
            ..mini_config()
        };
        assert!(matches!(build_dataset(&config, 0), Err(Error::InsufficientObjects { .. })));
    }

    #[test]
    fn dedicated_variants_are_rejected() {
        let config = GenerationConfig {
            variant: VariantKind::SingleObject,
            ..mini_config()
        };
        assert!(build_dataset(&config, 0).is_err());
    }
}
