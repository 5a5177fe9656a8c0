//! External object sets (handwritten characters, photographs, ...).

use std::path::Path;

use image::imageops::FilterType;
use image::RgbImage;

use crate::error::{Error, Result};
use crate::raster::{blit, read_rgb, white_image, ObjectImage, ObjectSource, OBJECT_SIZE};

/// Pads to a centered white square, then resamples to 64×64 (bilinear).
/// 64×64 inputs pass through untouched.
pub fn normalize_object(img: &RgbImage) -> RgbImage {
    if img.dimensions() == (OBJECT_SIZE, OBJECT_SIZE) {
        return img.clone();
    }
    let side = img.width().max(img.height());
    let mut square = white_image(side, side);
    blit(&mut square, img, (side - img.width()) / 2, (side - img.height()) / 2);
    image::imageops::resize(&square, OBJECT_SIZE, OBJECT_SIZE, FilterType::Triangle)
}

/// Loads every decodable image in `directory` (sorted by file name).
/// The object id is the file stem. Undecodable files are skipped with a warning.
pub fn import_objects(directory: &Path) -> Result<Vec<ObjectImage>> {
    let mut paths: Vec<_> = std::fs::read_dir(directory)
        .map_err(Error::io(directory))?
        .map(|e| e.map(|e| e.path()).map_err(Error::io(directory)))
        .collect::<Result<_>>()?;
    paths.retain(|p| p.is_file());
    paths.sort();

    let mut objects = Vec::with_capacity(paths.len());
    for path in paths {
        let img = match read_rgb(&path) {
            Ok(img) => img,
            Err(e) => {
                log::warn!("skipping {}: {e}", path.display());
                continue;
            }
        };
        let id = path
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_default();
        objects.push(ObjectImage::new(id, normalize_object(&img), ObjectSource::Imported, None)?);
    }
    if objects.is_empty() {
        return Err(Error::InsufficientObjects {
            needed: 1,
            available: 0,
        });
    }
    Ok(objects)
}
