use crate::composer::config::SplitSizes;
use crate::datamodel::records::ObjectSplits;
use crate::error::{Error, Result};
use crate::rng::SeedStream;

/// Uniformly random disjoint assignment of objects to train/val/test.
pub fn build_splits(objects: &[String], stream: &SeedStream, sizes: SplitSizes) -> Result<ObjectSplits> {
    if objects.len() < sizes.total() {
        return Err(Error::InsufficientObjects {
            needed: sizes.total(),
            available: objects.len(),
        });
    }
    let mut shuffled = objects.to_vec();
    stream.clone().shuffle(&mut shuffled);
    let mut rest = shuffled.into_iter();
    let mut take = |n: usize| rest.by_ref().take(n).collect::<Vec<_>>();
    Ok(ObjectSplits {
        train: take(sizes.train),
        val: take(sizes.val),
        test: take(sizes.test),
    })
}
