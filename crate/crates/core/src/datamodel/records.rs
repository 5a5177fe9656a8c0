use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::Error;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Label {
    Same,
    Different,
}

impl Label {
    pub fn as_str(self) -> &'static str {
        match self {
            Label::Same => "same",
            Label::Different => "different",
        }
    }

    pub fn flip(self) -> Label {
        match self {
            Label::Same => Label::Different,
            Label::Different => Label::Same,
        }
    }
}

impl FromStr for Label {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        match s {
            "same" => Ok(Label::Same),
            "different" => Ok(Label::Different),
            other => Err(Error::Parse(format!("unknown label `{other}`"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Split {
    Train,
    Val,
    Test,
}

impl Split {
    pub const ALL: [Split; 3] = [Split::Train, Split::Val, Split::Test];

    pub fn as_str(self) -> &'static str {
        match self {
            Split::Train => "train",
            Split::Val => "val",
            Split::Test => "test",
        }
    }

    pub fn index(self) -> u64 {
        match self {
            Split::Train => 0,
            Split::Val => 1,
            Split::Test => 2,
        }
    }
}

/// Which of color, texture and shape are shared by the two objects.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct DissociationCondition {
    pub color_same: bool,
    pub texture_same: bool,
    pub shape_same: bool,
}

impl DissociationCondition {
    /// The eight conditions in report order: none, S, T, TS, C, CS, CT, CTS.
    pub fn all() -> [DissociationCondition; 8] {
        std::array::from_fn(|i| DissociationCondition {
            color_same: i & 4 != 0,
            texture_same: i & 2 != 0,
            shape_same: i & 1 != 0,
        })
    }

    pub fn name(self) -> String {
        let mut s = String::new();
        if self.color_same {
            s.push('C');
        }
        if self.texture_same {
            s.push('T');
        }
        if self.shape_same {
            s.push('S');
        }
        if s.is_empty() {
            s.push_str("none");
        }
        s
    }

    pub fn is_identical(self) -> bool {
        self.color_same && self.texture_same && self.shape_same
    }
}

impl fmt::Display for DissociationCondition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name())
    }
}

impl FromStr for DissociationCondition {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        DissociationCondition::all()
            .into_iter()
            .find(|c| c.name() == s)
            .ok_or_else(|| Error::Parse(format!("unknown dissociation condition `{s}`")))
    }
}

/// Dataset variant of a stimulus. Serialized as `base`, `masked`,
/// `dissociation:CS`, ...
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Variant {
    Base,
    Grayscale,
    Masked,
    Flipped,
    Aligned,
    Dissociation(DissociationCondition),
    SingleObject,
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Variant::Base => f.write_str("base"),
            Variant::Grayscale => f.write_str("grayscale"),
            Variant::Masked => f.write_str("masked"),
            Variant::Flipped => f.write_str("flipped"),
            Variant::Aligned => f.write_str("aligned"),
            Variant::Dissociation(c) => write!(f, "dissociation:{c}"),
            Variant::SingleObject => f.write_str("single_object"),
        }
    }
}

impl FromStr for Variant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        Ok(match s {
            "base" => Variant::Base,
            "grayscale" => Variant::Grayscale,
            "masked" => Variant::Masked,
            "flipped" => Variant::Flipped,
            "aligned" => Variant::Aligned,
            "single_object" => Variant::SingleObject,
            other => match other.strip_prefix("dissociation:") {
                Some(c) => Variant::Dissociation(c.parse()?),
                None => return Err(Error::Parse(format!("unknown variant `{other}`"))),
            },
        })
    }
}

impl Serialize for Variant {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Variant {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Top-left corner of a 64×64 object box on the canvas.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Position {
    pub x: u32,
    pub y: u32,
}

impl Position {
    pub fn new(x: u32, y: u32) -> Self {
        Self { x, y }
    }
}

/// Axis-aligned square boxes of side `size` overlap.
pub fn boxes_overlap(a: Position, b: Position, size: u32) -> bool {
    a.x.abs_diff(b.x) < size && a.y.abs_diff(b.y) < size
}

/// Metadata for one composed 224×224 image.
///
/// Single-object stimuli carry no label and no second object.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StimulusRecord {
    pub stimulus_id: String,
    pub label: Option<Label>,
    pub object_a: String,
    pub object_b: Option<String>,
    pub pos_a: Position,
    pub pos_b: Option<Position>,
    pub split: Split,
    pub variant: Variant,
    pub image_path: String,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ObjectSplits {
    pub train: Vec<String>,
    pub val: Vec<String>,
    pub test: Vec<String>,
}

impl ObjectSplits {
    pub fn get(&self, split: Split) -> &[String] {
        match split {
            Split::Train => &self.train,
            Split::Val => &self.val,
            Split::Test => &self.test,
        }
    }

    pub fn get_mut(&mut self, split: Split) -> &mut Vec<String> {
        match split {
            Split::Train => &mut self.train,
            Split::Val => &mut self.val,
            Split::Test => &mut self.test,
        }
    }
}
