//! Object generators and raster transforms.

pub mod factor;
pub mod import;
pub mod noise;
pub mod squiggle;
pub mod transform;

pub use factor::{factorized_object_id, gen_factorized, CatalogSpec, ColorEntry, FactorCatalog, ShapeEntry, TextureEntry};
pub use import::{import_objects, normalize_object};
pub use noise::{gen_noise, noise_draws, NoiseSpec};
pub use squiggle::{gen_squiggle, squiggle_outline, SquiggleSpec};
pub use transform::{dilate, is_mirror_symmetric, mirror, to_grayscale, to_masked, MASK_GRAY};
