//! Object rasters, PNG I/O and pixel checksums.

use std::path::Path;

use image::{ImageEncoder, Rgb, RgbImage};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const OBJECT_SIZE: u32 = 64;
pub const CANVAS_SIZE: u32 = 224;
pub const WHITE: Rgb<u8> = Rgb([255, 255, 255]);
pub const BLACK: Rgb<u8> = Rgb([0, 0, 0]);

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ObjectSource {
    Squiggle,
    Factorized,
    Noise,
    Imported,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Factors {
    pub shape_id: String,
    pub texture_id: String,
    pub color_id: String,
}

/// A 64×64 RGB object with its identity.
#[derive(Clone, Debug, PartialEq)]
pub struct ObjectImage {
    object_id: String,
    pixels: RgbImage,
    source: ObjectSource,
    factors: Option<Factors>,
}

impl ObjectImage {
    pub fn new(
        object_id: impl Into<String>,
        pixels: RgbImage,
        source: ObjectSource,
        factors: Option<Factors>,
    ) -> Result<Self> {
        let object_id = object_id.into();
        if pixels.dimensions() != (OBJECT_SIZE, OBJECT_SIZE) {
            return Err(Error::InvalidImage(format!(
                "object `{object_id}` is {}x{}, expected {OBJECT_SIZE}x{OBJECT_SIZE}",
                pixels.width(),
                pixels.height()
            )));
        }
        if factors.is_some() != (source == ObjectSource::Factorized) {
            return Err(Error::InvalidImage(format!(
                "object `{object_id}`: factors must be present exactly for factorized objects"
            )));
        }
        Ok(Self {
            object_id,
            pixels,
            source,
            factors,
        })
    }

    pub fn object_id(&self) -> &str {
        &self.object_id
    }

    pub fn pixels(&self) -> &RgbImage {
        &self.pixels
    }

    pub fn source(&self) -> ObjectSource {
        self.source
    }

    pub fn factors(&self) -> Option<&Factors> {
        self.factors.as_ref()
    }

    /// Same identity and labels, new pixels. The raster must stay 64×64.
    pub fn with_pixels(&self, pixels: RgbImage) -> Result<Self> {
        Self::new(self.object_id.clone(), pixels, self.source, self.factors.clone())
    }

    pub fn with_id(&self, object_id: impl Into<String>) -> Self {
        Self {
            object_id: object_id.into(),
            ..self.clone()
        }
    }

    pub fn pixel_eq(&self, other: &ObjectImage) -> bool {
        self.pixels.as_raw() == other.pixels.as_raw()
    }

    pub fn checksum(&self) -> u64 {
        fnv1a64(self.pixels.as_raw())
    }
}

/// 64-bit FNV-1a.
pub fn fnv1a64(bytes: &[u8]) -> u64 {
    const OFFSET: u64 = 0xcbf2_9ce4_8422_2325;
    const PRIME: u64 = 0x0000_0100_0000_01b3;
    bytes
        .iter()
        .fold(OFFSET, |h, &b| (h ^ b as u64).wrapping_mul(PRIME))
}

pub fn white_image(width: u32, height: u32) -> RgbImage {
    RgbImage::from_pixel(width, height, WHITE)
}

/// Copies `src` into `dst` with its top-left corner at `(x, y)`. No blending.
pub fn blit(dst: &mut RgbImage, src: &RgbImage, x: u32, y: u32) {
    let w = src.width() as usize * 3;
    let dst_w = dst.width() as usize * 3;
    let dst_raw: &mut [u8] = dst;
    for row in 0..src.height() as usize {
        let s = row * w;
        let d = (y as usize + row) * dst_w + x as usize * 3;
        dst_raw[d..d + w].copy_from_slice(&src.as_raw()[s..s + w]);
    }
}

/// Copies the `width`×`height` region at `(x, y)` out of `src`.
pub fn crop(src: &RgbImage, x: u32, y: u32, width: u32, height: u32) -> RgbImage {
    image::imageops::crop_imm(src, x, y, width, height).to_image()
}

pub fn encode_png(img: &RgbImage) -> Result<Vec<u8>> {
    let mut out = Vec::new();
    let encoder = image::codecs::png::PngEncoder::new_with_quality(
        &mut out,
        image::codecs::png::CompressionType::Fast,
        image::codecs::png::FilterType::Sub,
    );
    encoder
        .write_image(img.as_raw(), img.width(), img.height(), image::ExtendedColorType::Rgb8)
        .map_err(Error::image("<memory>"))?;
    Ok(out)
}

pub fn write_png(path: &Path, img: &RgbImage) -> Result<()> {
    let bytes = encode_png(img)?;
    if let Some(parent) = path.parent() {
        std::fs::create_dir_all(parent).map_err(Error::io(parent))?;
    }
    std::fs::write(path, bytes).map_err(Error::io(path))
}

/// Reads any supported image and flattens it onto white as 8-bit RGB.
pub fn read_rgb(path: &Path) -> Result<RgbImage> {
    let img = image::open(path).map_err(Error::image(path))?;
    Ok(flatten_on_white(&img.to_rgba8()))
}

/// Reads a PNG that must already be 8-bit RGB.
pub fn read_png_rgb(path: &Path) -> Result<RgbImage> {
    let img = image::open(path).map_err(Error::image(path))?;
    match img {
        image::DynamicImage::ImageRgb8(rgb) => Ok(rgb),
        other => Err(Error::InvalidImage(format!(
            "{}: expected 8-bit RGB, found {:?}",
            path.display(),
            other.color()
        ))),
    }
}

pub(crate) fn flatten_on_white(rgba: &image::RgbaImage) -> RgbImage {
    let mut out = white_image(rgba.width(), rgba.height());
    for (x, y, p) in rgba.enumerate_pixels() {
        let a = p[3] as u32;
        let blend = |c: u8| ((c as u32 * a + 255 * (255 - a) + 127) / 255) as u8;
        out.put_pixel(x, y, Rgb([blend(p[0]), blend(p[1]), blend(p[2])]));
    }
    out
}
