//! Factorized objects: a shape mask filled with a texture tinted by a color.

use std::collections::HashSet;
use std::f64::consts::{PI, TAU};

use image::{Rgb, RgbImage};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::raster::{Factors, ObjectImage, ObjectSource, OBJECT_SIZE, WHITE};
use crate::rng::splitmix64;

const N: usize = OBJECT_SIZE as usize;

/// Texture intensity maps to a brightness factor in `[DARK, DARK + SPAN]`.
/// The ceiling stays below 1 so object pixels are never pure white.
const DARK: f64 = 0.5;
const SPAN: f64 = 0.45;

#[derive(Clone, Debug, PartialEq)]
pub struct ShapeEntry {
    pub shape_id: String,
    /// Row-major 64×64 inside/outside mask.
    pub mask: Vec<bool>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct TextureEntry {
    pub texture_id: String,
    /// Row-major 64×64 intensities in `[0, 1]`, tileable.
    pub intensity: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ColorEntry {
    pub color_id: String,
    pub rgb: [u8; 3],
}

/// How many entries of each built-in factor family to use.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct CatalogSpec {
    pub shapes: usize,
    pub textures: usize,
    pub colors: usize,
}

impl Default for CatalogSpec {
    fn default() -> Self {
        Self {
            shapes: 16,
            textures: 16,
            colors: 16,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct FactorCatalog {
    shapes: Vec<ShapeEntry>,
    textures: Vec<TextureEntry>,
    colors: Vec<ColorEntry>,
}

impl FactorCatalog {
    pub fn new(shapes: Vec<ShapeEntry>, textures: Vec<TextureEntry>, colors: Vec<ColorEntry>) -> Result<Self> {
        fn unique<'a>(kind: &str, ids: impl Iterator<Item = &'a String>) -> Result<()> {
            let mut seen = HashSet::new();
            for id in ids {
                if !seen.insert(id) {
                    return Err(Error::InvalidConfig(format!("duplicate {kind} id `{id}`")));
                }
            }
            Ok(())
        }
        unique("shape", shapes.iter().map(|s| &s.shape_id))?;
        unique("texture", textures.iter().map(|t| &t.texture_id))?;
        unique("color", colors.iter().map(|c| &c.color_id))?;
        if shapes.iter().any(|s| s.mask.len() != N * N) || textures.iter().any(|t| t.intensity.len() != N * N) {
            return Err(Error::InvalidConfig("factor rasters must be 64x64".into()));
        }
        Ok(Self {
            shapes,
            textures,
            colors,
        })
    }

    /// The built-in procedural catalog, truncated to the requested sizes.
    pub fn procedural(spec: &CatalogSpec) -> Result<Self> {
        let shapes = builtin_shapes();
        let textures = builtin_textures();
        let colors = builtin_colors();
        if spec.shapes > shapes.len() || spec.textures > textures.len() || spec.colors > colors.len() {
            return Err(Error::InvalidConfig(format!(
                "catalog sizes {}/{}/{} exceed the built-in {}/{}/{}",
                spec.shapes,
                spec.textures,
                spec.colors,
                shapes.len(),
                textures.len(),
                colors.len()
            )));
        }
        Self::new(
            shapes.into_iter().take(spec.shapes).collect(),
            textures.into_iter().take(spec.textures).collect(),
            colors.into_iter().take(spec.colors).collect(),
        )
    }

    pub fn shapes(&self) -> &[ShapeEntry] {
        &self.shapes
    }

    pub fn textures(&self) -> &[TextureEntry] {
        &self.textures
    }

    pub fn colors(&self) -> &[ColorEntry] {
        &self.colors
    }

    /// Number of distinct (shape, texture, color) triples.
    pub fn combinations(&self) -> usize {
        self.shapes.len() * self.textures.len() * self.colors.len()
    }

    /// Triple for a flat index in `0..combinations()`, shape-major.
    pub fn triple(&self, index: usize) -> (usize, usize, usize) {
        let (nt, nc) = (self.textures.len(), self.colors.len());
        (index / (nt * nc), (index / nc) % nt, index % nc)
    }

    pub fn ids(&self, shape: usize, texture: usize, color: usize) -> Factors {
        Factors {
            shape_id: self.shapes[shape].shape_id.clone(),
            texture_id: self.textures[texture].texture_id.clone(),
            color_id: self.colors[color].color_id.clone(),
        }
    }

    fn lookup<'a, T>(items: &'a [T], id: &str, key: impl Fn(&T) -> &str, kind: &'static str) -> Result<&'a T> {
        items.iter().find(|e| key(e) == id).ok_or_else(|| Error::UnknownId {
            kind,
            id: id.to_string(),
        })
    }
}

/// Object id for a factor triple.
pub fn factorized_object_id(factors: &Factors) -> String {
    format!("{}+{}+{}", factors.shape_id, factors.texture_id, factors.color_id)
}

pub fn gen_factorized(shape_id: &str, texture_id: &str, color_id: &str, catalog: &FactorCatalog) -> Result<ObjectImage> {
    let shape = FactorCatalog::lookup(&catalog.shapes, shape_id, |s| &s.shape_id, "shape")?;
    let texture = FactorCatalog::lookup(&catalog.textures, texture_id, |t| &t.texture_id, "texture")?;
    let color = FactorCatalog::lookup(&catalog.colors, color_id, |c| &c.color_id, "color")?;
    let img = RgbImage::from_fn(OBJECT_SIZE, OBJECT_SIZE, |x, y| {
        let i = y as usize * N + x as usize;
        if !shape.mask[i] {
            return WHITE;
        }
        let f = DARK + SPAN * texture.intensity[i].clamp(0.0, 1.0);
        Rgb(color.rgb.map(|c| (c as f64 * f).round() as u8))
    });
    let factors = Factors {
        shape_id: shape_id.to_string(),
        texture_id: texture_id.to_string(),
        color_id: color_id.to_string(),
    };
    ObjectImage::new(factorized_object_id(&factors), img, ObjectSource::Factorized, Some(factors))
}

fn mask_from_polygon(vertices: &[(f64, f64)]) -> Vec<bool> {
    let mut mask = vec![false; N * N];
    for y in 0..N {
        for x in 0..N {
            let (px, py) = (x as f64 + 0.5, y as f64 + 0.5);
            let mut inside = false;
            let mut j = vertices.len() - 1;
            for i in 0..vertices.len() {
                let (xi, yi) = vertices[i];
                let (xj, yj) = vertices[j];
                if (yi > py) != (yj > py) && px < (xj - xi) * (py - yi) / (yj - yi) + xi {
                    inside = !inside;
                }
                j = i;
            }
            mask[y * N + x] = inside;
        }
    }
    mask
}

fn polar_polygon(radii: impl Fn(usize) -> f64, count: usize, rotation: f64) -> Vec<(f64, f64)> {
    let c = N as f64 / 2.0;
    (0..count)
        .map(|i| {
            let a = rotation + TAU * i as f64 / count as f64;
            let r = radii(i);
            (c + r * a.cos(), c + r * a.sin())
        })
        .collect()
}

fn regular(sides: usize) -> Vec<(f64, f64)> {
    polar_polygon(|_| 27.0, sides, -PI / 2.0)
}

fn star(points: usize, inner: f64) -> Vec<(f64, f64)> {
    polar_polygon(|i| if i % 2 == 0 { 28.0 } else { inner }, points * 2, -PI / 2.0)
}

fn scaled(points: &[(f64, f64)]) -> Vec<(f64, f64)> {
    // Unit-square outlines mapped into the 64-pixel frame with a 6-pixel margin.
    points.iter().map(|&(x, y)| (6.0 + 52.0 * x, 6.0 + 52.0 * y)).collect()
}

fn builtin_shapes() -> Vec<ShapeEntry> {
    let c = N as f64 / 2.0;
    let ellipse: Vec<_> = (0..96)
        .map(|i| {
            let a = TAU * i as f64 / 96.0;
            (c + 27.0 * a.cos(), c + 16.0 * a.sin())
        })
        .collect();
    let shapes: Vec<(&str, Vec<(f64, f64)>)> = vec![
        ("circle", polar_polygon(|_| 27.0, 96, 0.0)),
        ("triangle", regular(3)),
        ("square", polar_polygon(|_| 30.0, 4, PI / 4.0)),
        ("pentagon", regular(5)),
        ("hexagon", regular(6)),
        ("heptagon", regular(7)),
        ("octagon", regular(8)),
        ("diamond", polar_polygon(|i| if i % 2 == 0 { 28.0 } else { 17.0 }, 4, -PI / 2.0)),
        ("star4", star(4, 10.0)),
        ("star5", star(5, 12.0)),
        ("star6", star(6, 15.0)),
        ("star8", star(8, 19.0)),
        ("ellipse", ellipse),
        (
            "cross",
            scaled(&[
                (0.33, 0.0),
                (0.67, 0.0),
                (0.67, 0.33),
                (1.0, 0.33),
                (1.0, 0.67),
                (0.67, 0.67),
                (0.67, 1.0),
                (0.33, 1.0),
                (0.33, 0.67),
                (0.0, 0.67),
                (0.0, 0.33),
                (0.33, 0.33),
            ]),
        ),
        (
            "arrow",
            scaled(&[(0.0, 0.3), (0.55, 0.3), (0.55, 0.0), (1.0, 0.5), (0.55, 1.0), (0.55, 0.7), (0.0, 0.7)]),
        ),
        (
            "ell",
            scaled(&[(0.1, 0.0), (0.45, 0.0), (0.45, 0.65), (0.9, 0.65), (0.9, 1.0), (0.1, 1.0)]),
        ),
    ];
    shapes
        .into_iter()
        .map(|(id, poly)| ShapeEntry {
            shape_id: id.to_string(),
            mask: mask_from_polygon(&poly),
        })
        .collect()
}

fn texture_from(f: impl Fn(usize, usize) -> f64) -> Vec<f64> {
    (0..N * N).map(|i| f(i % N, i / N)).collect()
}

fn bit(b: bool) -> f64 {
    if b {
        1.0
    } else {
        0.0
    }
}

fn builtin_textures() -> Vec<TextureEntry> {
    let textures: Vec<(&str, Vec<f64>)> = vec![
        ("hstripes", texture_from(|_, y| bit((y / 4) % 2 == 0))),
        ("vstripes", texture_from(|x, _| bit((x / 4) % 2 == 0))),
        ("dstripes", texture_from(|x, y| bit(((x + y) / 4) % 2 == 0))),
        ("astripes", texture_from(|x, y| bit(((x + N - y) / 4) % 2 == 0))),
        ("checks", texture_from(|x, y| bit((x / 8 + y / 8) % 2 == 0))),
        ("fine_checks", texture_from(|x, y| bit((x / 4 + y / 4) % 2 == 0))),
        (
            "dots",
            texture_from(|x, y| {
                let (dx, dy) = ((x % 8) as f64 - 3.5, (y % 8) as f64 - 3.5);
                bit(dx * dx + dy * dy > 5.0)
            }),
        ),
        ("grid", texture_from(|x, y| bit(x % 8 != 0 && y % 8 != 0))),
        (
            "hwaves",
            texture_from(|x, y| 0.5 + 0.5 * (TAU * y as f64 / 16.0 + 1.5 * (TAU * x as f64 / 32.0).sin()).sin()),
        ),
        (
            "vwaves",
            texture_from(|x, y| 0.5 + 0.5 * (TAU * x as f64 / 16.0 + 1.5 * (TAU * y as f64 / 32.0).sin()).sin()),
        ),
        (
            "rings",
            texture_from(|x, y| {
                let r = ((x as f64 - 31.5).powi(2) + (y as f64 - 31.5).powi(2)).sqrt();
                bit((r / 4.0) as usize % 2 == 0)
            }),
        ),
        ("solid", texture_from(|_, _| 1.0)),
        ("fine_hstripes", texture_from(|_, y| bit((y / 2) % 2 == 0))),
        (
            "zigzag",
            texture_from(|x, y| {
                let tri = (x % 16) as i64 - 8;
                bit(((y as i64 + tri.abs()) / 4) % 2 == 0)
            }),
        ),
        (
            "bricks",
            texture_from(|x, y| {
                let row = y / 8;
                let shift = if row % 2 == 0 { 0 } else { 8 };
                bit(y % 8 != 0 && (x + shift) % 16 != 0)
            }),
        ),
        (
            "speckle",
            texture_from(|x, y| bit(splitmix64(((y / 4) * 16 + x / 4) as u64) & 1 == 1)),
        ),
    ];
    textures
        .into_iter()
        .map(|(id, intensity)| TextureEntry {
            texture_id: id.to_string(),
            intensity,
        })
        .collect()
}

fn builtin_colors() -> Vec<ColorEntry> {
    [
        ("red", [220, 40, 40]),
        ("green", [40, 170, 60]),
        ("blue", [40, 80, 220]),
        ("yellow", [235, 210, 40]),
        ("orange", [240, 140, 30]),
        ("purple", [140, 60, 200]),
        ("cyan", [40, 200, 210]),
        ("magenta", [220, 50, 180]),
        ("brown", [150, 90, 40]),
        ("pink", [245, 150, 170]),
        ("lime", [150, 230, 60]),
        ("teal", [30, 130, 130]),
        ("navy", [40, 40, 140]),
        ("olive", [140, 140, 30]),
        ("gray", [150, 150, 150]),
        ("maroon", [130, 30, 60]),
    ]
    .into_iter()
    .map(|(id, rgb)| ColorEntry {
        color_id: id.to_string(),
        rgb,
    })
    .collect()
}
