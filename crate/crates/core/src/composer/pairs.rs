//! Pair selection under coverage and balance constraints.

use std::collections::HashMap;

use crate::datamodel::records::Label;
use crate::error::{Error, Result};
use crate::rng::SeedStream;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SelectedPair {
    pub object_a: String,
    pub object_b: String,
    pub label: Label,
}

/// Selects `quota_same` pairs `(o, o)` and `quota_diff` pairs of distinct objects.
///
/// Within each label every object's appearance count differs from every other
/// object's by at most one. "Different" pairs prefer objects not yet covered by
/// a "same" pair, then pairs not used before, so distinct unordered pairs are
/// exhausted before any repeats. Every object appears in at least one pair.
pub fn select_pairs(
    split_objects: &[String],
    quota_same: usize,
    quota_diff: usize,
    stream: &SeedStream,
) -> Result<Vec<SelectedPair>> {
    let n = split_objects.len();
    if n == 0 {
        if quota_same + quota_diff == 0 {
            return Ok(Vec::new());
        }
        return Err(Error::InsufficientObjects { needed: 1, available: 0 });
    }
    if quota_diff > 0 && n < 2 {
        return Err(Error::Generation(format!(
            "cannot form {quota_diff} different pairs from a single object"
        )));
    }
    let uncovered_by_same = n.saturating_sub(quota_same);
    if 2 * quota_diff < uncovered_by_same {
        return Err(Error::Generation(format!(
            "{quota_same} same and {quota_diff} different pairs cannot cover {n} objects"
        )));
    }

    let mut rng = stream.clone();
    let mut pairs = Vec::with_capacity(quota_same + quota_diff);

    // Same pairs: whole shuffled rounds over the objects, so counts differ by at most one.
    let mut covered = vec![false; n];
    let mut order: Vec<usize> = (0..n).collect();
    while pairs.len() < quota_same {
        rng.shuffle(&mut order);
        for &i in order.iter().take(quota_same - pairs.len()) {
            covered[i] = true;
            pairs.push(SelectedPair {
                object_a: split_objects[i].clone(),
                object_b: split_objects[i].clone(),
                label: Label::Same,
            });
        }
    }

    // Different pairs: always extend the least-used objects.
    let mut counts = vec![0usize; n];
    let mut used: HashMap<(usize, usize), usize> = HashMap::new();
    let mut candidates = Vec::with_capacity(n);
    for _ in 0..quota_diff {
        let min = *counts.iter().min().expect("n >= 2");
        candidates.clear();
        candidates.extend((0..n).filter(|&i| counts[i] == min));
        prefer(&mut candidates, |i| !covered[i]);
        let a = *rng.choose(&candidates).expect("non-empty");

        let min_b = (0..n).filter(|&i| i != a).map(|i| counts[i]).min().expect("n >= 2");
        candidates.clear();
        candidates.extend((0..n).filter(|&i| i != a && counts[i] == min_b));
        let usage = |i: usize| *used.get(&(a.min(i), a.max(i))).unwrap_or(&0);
        let least = candidates.iter().map(|&i| usage(i)).min().expect("non-empty");
        candidates.retain(|&i| usage(i) == least);
        prefer(&mut candidates, |i| !covered[i]);
        let b = *rng.choose(&candidates).expect("non-empty");

        counts[a] += 1;
        counts[b] += 1;
        covered[a] = true;
        covered[b] = true;
        *used.entry((a.min(b), a.max(b))).or_default() += 1;
        let (first, second) = if rng.below(2) == 0 { (a, b) } else { (b, a) };
        pairs.push(SelectedPair {
            object_a: split_objects[first].clone(),
            object_b: split_objects[second].clone(),
            label: Label::Different,
        });
    }
    Ok(pairs)
}

/// Keeps only the preferred candidates when any exist.
fn prefer(candidates: &mut Vec<usize>, wanted: impl Fn(usize) -> bool) {
    if candidates.iter().any(|&i| wanted(i)) {
        candidates.retain(|&i| wanted(i));
    }
}
