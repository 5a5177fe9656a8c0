//! Single-object images for embedding extraction.

use crate::composer::config::{GenerationConfig, VariantKind};
use crate::composer::dataset::{image_path, Dataset, ObjectSet};
use crate::composer::placement::place_single;
use crate::datamodel::records::{ObjectSplits, Split, StimulusRecord, Variant};
use crate::error::{Error, Result};
use crate::raster::ObjectImage;
use crate::rng::SeedStream;

/// `n` images, each showing one distinct, randomly chosen object at a random position.
pub fn build_single_object_set(
    config: &GenerationConfig,
    objects: &[ObjectImage],
    n: usize,
    stream: &SeedStream,
) -> Result<Dataset> {
    if objects.len() < n {
        return Err(Error::InsufficientObjects {
            needed: n,
            available: objects.len(),
        });
    }
    let mut rng = stream.clone();
    let mut order: Vec<usize> = (0..objects.len()).collect();
    rng.shuffle(&mut order);
    order.truncate(n);

    let chosen = ObjectSet::new(order.iter().map(|&i| objects[i].clone()).collect())?;
    let records = order
        .iter()
        .enumerate()
        .map(|(k, &i)| {
            let stimulus_id = format!("single-{k:05}");
            StimulusRecord {
                image_path: image_path(Split::Test, &stimulus_id),
                stimulus_id,
                label: None,
                object_a: objects[i].object_id().to_string(),
                object_b: None,
                pos_a: place_single(&mut rng),
                pos_b: None,
                split: Split::Test,
                variant: Variant::SingleObject,
            }
        })
        .collect();

    let mut config = config.clone();
    config.variant = VariantKind::SingleObject;
    config.single_object_count = n;
    Dataset::new(
        config.dataset_id.clone(),
        config.root_seed,
        config,
        ObjectSplits {
            train: Vec::new(),
            val: Vec::new(),
            test: chosen.ids(),
        },
        records,
        chosen,
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::composer::dataset::generate_objects;
    use crate::raster::{OBJECT_SIZE, WHITE};
    use crate::rng::derive_stream;

    fn objects(n: usize) -> Vec<ObjectImage> {
        generate_objects(&Default::default(), n, 3).unwrap()
    }

    #[test]
    fn one_object_outside_of_which_all_is_white() {
        let objs = objects(30);
        let d = build_single_object_set(&GenerationConfig::default(), &objs, 25, &derive_stream(3, 3)).unwrap();
        assert_eq!(d.manifest.records.len(), 25);
        for r in &d.manifest.records {
            let img = d.render(r).unwrap();
            for (x, y, p) in img.enumerate_pixels() {
                let inside = (r.pos_a.x..r.pos_a.x + OBJECT_SIZE).contains(&x) && (r.pos_a.y..r.pos_a.y + OBJECT_SIZE).contains(&y);
                assert!(inside || *p == WHITE);
            }
        }
    }

    #[test]
    fn n_one_and_insufficient() {
        let objs = objects(3);
        let d = build_single_object_set(&GenerationConfig::default(), &objs, 1, &derive_stream(0, 0)).unwrap();
        assert_eq!(d.manifest.records.len(), 1);
        assert!(build_single_object_set(&GenerationConfig::default(), &objs, 4, &derive_stream(0, 0)).is_err());
    }
}
