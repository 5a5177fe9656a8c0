//! Dataset validation: every structural and pixel-level invariant a generated
//! dataset must satisfy.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::fmt;
use std::path::Path;

use image::RgbImage;
use rayon::prelude::*;

use crate::composer::config::VariantKind;
use crate::composer::placement::is_aligned;
use crate::composer::variant::{base_object_id, MIRROR_SUFFIX};
use crate::datamodel::manifest::DatasetManifest;
use crate::datamodel::objects::{read_object_index, OBJECT_INDEX_FILE};
use crate::datamodel::records::{boxes_overlap, DissociationCondition, Label, Position, Split, StimulusRecord, Variant};
use crate::raster::{crop, fnv1a64, read_png_rgb, Factors, CANVAS_SIZE, OBJECT_SIZE, WHITE};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Violation {
    EmptyManifest,
    DuplicateStimulus { stimulus: String },
    DuplicateImagePath { path: String },
    SplitSize { split: Split, expected: usize, found: usize },
    SplitOverlap { object: String, first: Split, second: Split },
    ForeignObject { stimulus: String, object: String, split: Split },
    Imbalance { split: Split, same: usize, different: usize, expected_each: usize },
    Uncovered { split: Split, object: String },
    MalformedRecord { stimulus: String, reason: String },
    OutOfCanvas { stimulus: String },
    BoxOverlap { stimulus: String },
    OffGrid { stimulus: String },
    MissingImage { path: String, reason: String },
    BadImageSize { path: String, width: u32, height: u32 },
    MissingChecksum { path: String },
    ChecksumMismatch { path: String, expected: u64, actual: u64 },
    StrayPixels { stimulus: String },
    SameNotIdentical { stimulus: String },
    DifferentIdentical { stimulus: String },
    NotMirrored { stimulus: String },
    MissingObjectIndex { reason: String },
    FactorPattern { stimulus: String, expected: String, found: String },
}

impl Violation {
    /// Short category name, used for summaries.
    pub fn kind(&self) -> &'static str {
        match self {
            Violation::EmptyManifest => "empty_manifest",
            Violation::DuplicateStimulus { .. } => "duplicate_stimulus",
            Violation::DuplicateImagePath { .. } => "duplicate_image_path",
            Violation::SplitSize { .. } => "split_size",
            Violation::SplitOverlap { .. } => "disjointness",
            Violation::ForeignObject { .. } => "foreign_object",
            Violation::Imbalance { .. } => "balance",
            Violation::Uncovered { .. } => "coverage",
            Violation::MalformedRecord { .. } => "malformed_record",
            Violation::OutOfCanvas { .. } => "out_of_canvas",
            Violation::BoxOverlap { .. } => "overlap",
            Violation::OffGrid { .. } => "off_grid",
            Violation::MissingImage { .. } => "missing_image",
            Violation::BadImageSize { .. } => "image_size",
            Violation::MissingChecksum { .. } => "missing_checksum",
            Violation::ChecksumMismatch { .. } => "checksum",
            Violation::StrayPixels { .. } => "stray_pixels",
            Violation::SameNotIdentical { .. } => "same_pixel_equality",
            Violation::DifferentIdentical { .. } => "different_pixel_equality",
            Violation::NotMirrored { .. } => "mirror",
            Violation::MissingObjectIndex { .. } => "object_index",
            Violation::FactorPattern { .. } => "factor_pattern",
        }
    }
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::EmptyManifest => write!(f, "manifest has no records"),
            Violation::DuplicateStimulus { stimulus } => write!(f, "stimulus id `{stimulus}` appears more than once"),
            Violation::DuplicateImagePath { path } => write!(f, "image path `{path}` is used by more than one record"),
            Violation::SplitSize { split, expected, found } => {
                write!(f, "{} split has {found} objects, expected {expected}", split.as_str())
            }
            Violation::SplitOverlap { object, first, second } => {
                write!(f, "object `{object}` is in both {} and {}", first.as_str(), second.as_str())
            }
            Violation::ForeignObject { stimulus, object, split } => {
                write!(f, "{stimulus}: object `{object}` is not in the {} split", split.as_str())
            }
            Violation::Imbalance { split, same, different, expected_each } => write!(
                f,
                "{} split has {same} same / {different} different, expected {expected_each} each",
                split.as_str()
            ),
            Violation::Uncovered { split, object } => {
                write!(f, "object `{object}` of the {} split appears in no stimulus", split.as_str())
            }
            Violation::MalformedRecord { stimulus, reason } => write!(f, "{stimulus}: {reason}"),
            Violation::OutOfCanvas { stimulus } => write!(f, "{stimulus}: object box leaves the canvas"),
            Violation::BoxOverlap { stimulus } => write!(f, "{stimulus}: object boxes overlap"),
            Violation::OffGrid { stimulus } => write!(f, "{stimulus}: aligned object off the slot grid"),
            Violation::MissingImage { path, reason } => write!(f, "{path}: unreadable ({reason})"),
            Violation::BadImageSize { path, width, height } => write!(f, "{path}: image is {width}x{height}"),
            Violation::MissingChecksum { path } => write!(f, "{path}: no checksum in manifest"),
            Violation::ChecksumMismatch { path, expected, actual } => {
                write!(f, "{path}: checksum {actual:016x}, manifest says {expected:016x}")
            }
            Violation::StrayPixels { stimulus } => write!(f, "{stimulus}: non-white pixels outside the object boxes"),
            Violation::SameNotIdentical { stimulus } => write!(f, "{stimulus}: \"same\" objects differ in pixels"),
            Violation::DifferentIdentical { stimulus } => {
                write!(f, "{stimulus}: \"different\" objects are pixel-identical")
            }
            Violation::NotMirrored { stimulus } => write!(f, "{stimulus}: second object is not the mirror of the first"),
            Violation::MissingObjectIndex { reason } => write!(f, "object index unavailable: {reason}"),
            Violation::FactorPattern { stimulus, expected, found } => {
                write!(f, "{stimulus}: factor pattern {found}, expected {expected}")
            }
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct ValidationReport {
    pub records_checked: usize,
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_empty(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn counts_by_kind(&self) -> BTreeMap<&'static str, usize> {
        let mut counts = BTreeMap::new();
        for v in &self.violations {
            *counts.entry(v.kind()).or_default() += 1;
        }
        counts
    }

    pub fn has(&self, kind: &str) -> bool {
        self.violations.iter().any(|v| v.kind() == kind)
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_empty() {
            return writeln!(f, "ok: {} records, no violations", self.records_checked);
        }
        writeln!(f, "{} violations in {} records", self.violations.len(), self.records_checked)?;
        for (kind, n) in self.counts_by_kind() {
            writeln!(f, "  {kind}: {n}")?;
        }
        for v in &self.violations {
            writeln!(f, "{v}")?;
        }
        Ok(())
    }
}

/// Checks `manifest` against the images under `image_root`. Unreadable
/// images are reported as violations.
pub fn validate_dataset(manifest: &DatasetManifest, image_root: &Path) -> ValidationReport {
    let mut v = Vec::new();
    let family = manifest.config.variant;
    let paired = !matches!(family, VariantKind::Dissociation | VariantKind::SingleObject);

    if manifest.records.is_empty() {
        v.push(Violation::EmptyManifest);
    }
    check_duplicates(manifest, &mut v);
    check_splits(manifest, paired, &mut v);
    if paired {
        check_balance(manifest, &mut v);
    }
    check_coverage(manifest, &mut v);
    for r in &manifest.records {
        check_record(r, &mut v);
    }

    let per_record: Vec<Vec<Violation>> = manifest
        .records
        .par_iter()
        .map(|r| check_pixels(r, manifest, image_root))
        .collect();
    v.extend(per_record.into_iter().flatten());

    if manifest.records.iter().any(|r| matches!(r.variant, Variant::Dissociation(_))) {
        check_factors(manifest, image_root, &mut v);
    }
    ValidationReport {
        records_checked: manifest.records.len(),
        violations: v,
    }
}

fn check_duplicates(manifest: &DatasetManifest, v: &mut Vec<Violation>) {
    let mut ids = HashSet::new();
    let mut paths = HashSet::new();
    for r in &manifest.records {
        if !ids.insert(r.stimulus_id.as_str()) {
            v.push(Violation::DuplicateStimulus {
                stimulus: r.stimulus_id.clone(),
            });
        }
        if !paths.insert(r.image_path.as_str()) {
            v.push(Violation::DuplicateImagePath {
                path: r.image_path.clone(),
            });
        }
    }
}

fn check_splits(manifest: &DatasetManifest, paired: bool, v: &mut Vec<Violation>) {
    let splits = &manifest.object_splits;
    if paired {
        for split in Split::ALL {
            let expected = manifest.config.split_sizes.get(split);
            let found = splits.get(split).len();
            if found != expected {
                v.push(Violation::SplitSize { split, expected, found });
            }
        }
    }
    let mut home: HashMap<&str, Split> = HashMap::new();
    for split in Split::ALL {
        for o in splits.get(split) {
            match home.get(o.as_str()) {
                Some(&first) => v.push(Violation::SplitOverlap {
                    object: o.clone(),
                    first,
                    second: split,
                }),
                None => {
                    home.insert(o, split);
                }
            }
        }
    }
    for r in &manifest.records {
        for o in record_objects(r) {
            let base = base_object_id(o);
            if !splits.get(r.split).iter().any(|s| s == base) {
                v.push(Violation::ForeignObject {
                    stimulus: r.stimulus_id.clone(),
                    object: o.to_string(),
                    split: r.split,
                });
            }
        }
    }
}

fn check_balance(manifest: &DatasetManifest, v: &mut Vec<Violation>) {
    for split in Split::ALL {
        if manifest.records_in(split).next().is_none() {
            continue;
        }
        let (same, different) = manifest.label_counts(split);
        let expected_each = manifest.config.stimuli_for(split) / 2;
        if same != expected_each || different != expected_each {
            v.push(Violation::Imbalance {
                split,
                same,
                different,
                expected_each,
            });
        }
    }
}

fn check_coverage(manifest: &DatasetManifest, v: &mut Vec<Violation>) {
    for split in Split::ALL {
        if manifest.records_in(split).next().is_none() {
            continue;
        }
        let seen: HashSet<&str> = manifest
            .records_in(split)
            .flat_map(record_objects)
            .map(base_object_id)
            .collect();
        for o in manifest.object_splits.get(split) {
            if !seen.contains(o.as_str()) {
                v.push(Violation::Uncovered {
                    split,
                    object: o.clone(),
                });
            }
        }
    }
}

fn record_objects(r: &StimulusRecord) -> impl Iterator<Item = &str> {
    std::iter::once(r.object_a.as_str()).chain(r.object_b.as_deref())
}

fn check_record(r: &StimulusRecord, v: &mut Vec<Violation>) {
    let malformed = |reason: &str| Violation::MalformedRecord {
        stimulus: r.stimulus_id.clone(),
        reason: reason.to_string(),
    };
    let single = r.variant == Variant::SingleObject;
    if single {
        if r.object_b.is_some() || r.pos_b.is_some() || r.label.is_some() {
            v.push(malformed("single-object record carries a second object or a label"));
        }
    } else {
        match (&r.object_b, r.pos_b, r.label) {
            (Some(b), Some(_), Some(label)) => {
                let ok = match (label, r.variant) {
                    (Label::Same, _) => *b == r.object_a,
                    (Label::Different, Variant::Flipped) => *b == format!("{}{MIRROR_SUFFIX}", r.object_a),
                    (Label::Different, _) => base_object_id(b) != base_object_id(&r.object_a),
                };
                if !ok {
                    v.push(malformed("object ids disagree with the label"));
                }
            }
            _ => v.push(malformed("paired record needs object_b, pos_b and a label")),
        }
    }

    let positions: Vec<Position> = std::iter::once(r.pos_a).chain(r.pos_b).collect();
    if positions.iter().any(|p| p.x + OBJECT_SIZE > CANVAS_SIZE || p.y + OBJECT_SIZE > CANVAS_SIZE) {
        v.push(Violation::OutOfCanvas {
            stimulus: r.stimulus_id.clone(),
        });
    }
    if let [a, b] = positions[..] {
        if boxes_overlap(a, b, OBJECT_SIZE) {
            v.push(Violation::BoxOverlap {
                stimulus: r.stimulus_id.clone(),
            });
        }
    }
    if r.variant == Variant::Aligned && !positions.iter().all(|&p| is_aligned(p)) {
        v.push(Violation::OffGrid {
            stimulus: r.stimulus_id.clone(),
        });
    }
}

fn inside(p: Position, x: u32, y: u32) -> bool {
    (p.x..p.x + OBJECT_SIZE).contains(&x) && (p.y..p.y + OBJECT_SIZE).contains(&y)
}

fn check_pixels(r: &StimulusRecord, manifest: &DatasetManifest, root: &Path) -> Vec<Violation> {
    let mut v = Vec::new();
    let path = r.image_path.clone();
    let img: RgbImage = match read_png_rgb(&root.join(&r.image_path)) {
        Ok(img) => img,
        Err(e) => {
            v.push(Violation::MissingImage {
                path,
                reason: e.to_string(),
            });
            return v;
        }
    };
    if img.dimensions() != (CANVAS_SIZE, CANVAS_SIZE) {
        v.push(Violation::BadImageSize {
            path,
            width: img.width(),
            height: img.height(),
        });
        return v;
    }
    let actual = fnv1a64(img.as_raw());
    match manifest.image_checksums.get(&r.image_path) {
        None => v.push(Violation::MissingChecksum { path: path.clone() }),
        Some(&expected) if expected != actual => v.push(Violation::ChecksumMismatch {
            path: path.clone(),
            expected,
            actual,
        }),
        Some(_) => {}
    }

    let fits = |p: Position| p.x + OBJECT_SIZE <= CANVAS_SIZE && p.y + OBJECT_SIZE <= CANVAS_SIZE;
    if !fits(r.pos_a) || !r.pos_b.is_none_or(fits) {
        return v;
    }
    let stray = img
        .enumerate_pixels()
        .any(|(x, y, p)| *p != WHITE && !inside(r.pos_a, x, y) && !r.pos_b.is_some_and(|b| inside(b, x, y)));
    if stray {
        v.push(Violation::StrayPixels {
            stimulus: r.stimulus_id.clone(),
        });
    }

    let (Some(pos_b), Some(label)) = (r.pos_b, r.label) else {
        return v;
    };
    if boxes_overlap(r.pos_a, pos_b, OBJECT_SIZE) {
        return v;
    }
    let a = crop(&img, r.pos_a.x, r.pos_a.y, OBJECT_SIZE, OBJECT_SIZE);
    let b = crop(&img, pos_b.x, pos_b.y, OBJECT_SIZE, OBJECT_SIZE);
    let stimulus = r.stimulus_id.clone();
    match label {
        Label::Same if a != b => v.push(Violation::SameNotIdentical { stimulus }),
        Label::Same => {}
        Label::Different => {
            // Grayscale and masking may legitimately merge distinct objects.
            let distinct_required = !matches!(r.variant, Variant::Grayscale | Variant::Masked);
            if distinct_required && a == b {
                v.push(Violation::DifferentIdentical {
                    stimulus: stimulus.clone(),
                });
            }
            if r.variant == Variant::Flipped && b != image::imageops::flip_horizontal(&a) {
                v.push(Violation::NotMirrored { stimulus });
            }
        }
    }
    v
}

fn check_factors(manifest: &DatasetManifest, root: &Path, v: &mut Vec<Violation>) {
    let index = match read_object_index(&root.join("objects").join(OBJECT_INDEX_FILE)) {
        Ok(index) => index,
        Err(e) => {
            v.push(Violation::MissingObjectIndex { reason: e.to_string() });
            return;
        }
    };
    let factors: HashMap<&str, &Factors> = index
        .iter()
        .filter_map(|e| e.factors.as_ref().map(|f| (e.object_id.as_str(), f)))
        .collect();
    for r in &manifest.records {
        let Variant::Dissociation(expected) = r.variant else {
            continue;
        };
        let stimulus = r.stimulus_id.clone();
        let lookup = |id: &str| factors.get(id).copied();
        let (Some(a), Some(b)) = (lookup(&r.object_a), r.object_b.as_deref().and_then(lookup)) else {
            v.push(Violation::MalformedRecord {
                stimulus,
                reason: "dissociation objects have no factors in the object index".into(),
            });
            continue;
        };
        let found = DissociationCondition {
            color_same: a.color_id == b.color_id,
            texture_same: a.texture_id == b.texture_id,
            shape_same: a.shape_id == b.shape_id,
        };
        if found != expected {
            v.push(Violation::FactorPattern {
                stimulus: stimulus.clone(),
                expected: expected.name(),
                found: found.name(),
            });
        }
        let label_ok = (r.label == Some(Label::Same)) == expected.is_identical();
        if !label_ok {
            v.push(Violation::MalformedRecord {
                stimulus,
                reason: format!("label does not match condition {expected}"),
            });
        }
    }
}
