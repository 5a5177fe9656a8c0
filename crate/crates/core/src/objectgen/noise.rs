//! Gaussian-noise patches.

use image::{Rgb, RgbImage};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::raster::{ObjectImage, ObjectSource, OBJECT_SIZE};
use crate::rng::SeedStream;

/// Draws `mu + sigma * z` per pixel, mapped to gray as `offset + scale * draw`
/// and clipped to `[0, 255]`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct NoiseSpec {
    pub mu: f64,
    pub sigma: f64,
    pub offset: f64,
    pub scale: f64,
}

impl Default for NoiseSpec {
    fn default() -> Self {
        Self {
            mu: 0.0,
            sigma: 1.0,
            offset: 127.5,
            scale: 42.5,
        }
    }
}

impl NoiseSpec {
    pub fn validate(&self) -> Result<()> {
        if !(self.sigma > 0.0) || !self.mu.is_finite() || !self.offset.is_finite() || !self.scale.is_finite() {
            return Err(Error::InvalidConfig(format!("invalid noise spec {self:?}")));
        }
        Ok(())
    }
}

/// The pre-clip draws behind [`gen_noise`], row-major.
pub fn noise_draws(spec: &NoiseSpec, stream: &SeedStream) -> Vec<f64> {
    let mut rng = stream.clone();
    (0..OBJECT_SIZE * OBJECT_SIZE)
        .map(|_| spec.mu + spec.sigma * rng.standard_normal())
        .collect()
}

pub fn gen_noise(spec: &NoiseSpec, stream: &SeedStream, object_id: &str) -> Result<ObjectImage> {
    spec.validate()?;
    let draws = noise_draws(spec, stream);
    let img = RgbImage::from_fn(OBJECT_SIZE, OBJECT_SIZE, |x, y| {
        let v = draws[(y * OBJECT_SIZE + x) as usize];
        let g = (spec.offset + spec.scale * v).round().clamp(0.0, 255.0) as u8;
        Rgb([g, g, g])
    });
    ObjectImage::new(object_id, img, ObjectSource::Noise, None)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::derive_stream;

    #[test]
    fn reproducible() {
        let s = derive_stream(5, 5);
        let spec = NoiseSpec::default();
        assert_eq!(gen_noise(&spec, &s, "n").unwrap(), gen_noise(&spec, &s, "n").unwrap());
    }

    #[test]
    fn distinct_streams_differ() {
        let spec = NoiseSpec::default();
        let a = gen_noise(&spec, &derive_stream(5, 1), "a").unwrap();
        let b = gen_noise(&spec, &derive_stream(5, 2), "b").unwrap();
        assert!(!a.pixel_eq(&b));
    }

    #[test]
    fn moments_within_three_standard_errors() {
        let spec = NoiseSpec::default();
        for idx in 0..20 {
            let d = noise_draws(&spec, &derive_stream(77, idx));
            let n = d.len() as f64;
            let mean = d.iter().sum::<f64>() / n;
            let var = d.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
            assert!(mean.abs() <= 3.0 / n.sqrt(), "mean {mean}");
            // Standard error of the sample std for a normal is sigma / sqrt(2(n-1)).
            assert!((var.sqrt() - 1.0).abs() <= 3.0 / (2.0 * (n - 1.0)).sqrt(), "std {}", var.sqrt());
        }
    }

    #[test]
    fn shifted_moments() {
        let spec = NoiseSpec {
            mu: 2.0,
            sigma: 0.5,
            ..Default::default()
        };
        let d = noise_draws(&spec, &derive_stream(1, 0));
        let mean = d.iter().sum::<f64>() / d.len() as f64;
        assert!((mean - 2.0).abs() <= 3.0 * 0.5 / 64.0);
    }

    #[test]
    fn rejects_nonpositive_sigma() {
        let spec = NoiseSpec {
            sigma: 0.0,
            ..Default::default()
        };
        assert!(gen_noise(&spec, &derive_stream(0, 0), "x").is_err());
    }
}
