//! Raster transforms applied to single objects.

use image::{Rgb, RgbImage};

use crate::error::{Error, Result};
use crate::raster::{ObjectImage, BLACK, WHITE};

/// Gray level used by the masked variant.
pub const MASK_GRAY: Rgb<u8> = Rgb([100, 100, 100]);

/// Binary dilation of a boolean grid with a `(2r+1)`-square structuring element.
///
/// Pixels outside the grid are treated as background.
pub(crate) fn dilate_mask(mask: &[bool], width: usize, height: usize, radius: usize) -> Vec<bool> {
    if radius == 0 {
        return mask.to_vec();
    }
    // Separable: horizontal pass then vertical pass.
    let mut horiz = vec![false; mask.len()];
    for y in 0..height {
        for x in 0..width {
            let lo = x.saturating_sub(radius);
            let hi = (x + radius).min(width - 1);
            horiz[y * width + x] = (lo..=hi).any(|xx| mask[y * width + xx]);
        }
    }
    let mut out = vec![false; mask.len()];
    for y in 0..height {
        let lo = y.saturating_sub(radius);
        let hi = (y + radius).min(height - 1);
        for x in 0..width {
            out[y * width + x] = (lo..=hi).any(|yy| horiz[yy * width + x]);
        }
    }
    out
}

/// Foreground (black) mask of a strictly black-on-white raster.
pub(crate) fn binary_foreground(img: &RgbImage) -> Result<Vec<bool>> {
    img.pixels()
        .map(|p| match *p {
            p if p == BLACK => Ok(true),
            p if p == WHITE => Ok(false),
            p => Err(Error::InvalidImage(format!(
                "dilation needs a black/white image, found pixel {:?}",
                p.0
            ))),
        })
        .collect()
}

pub(crate) fn mask_to_image(mask: &[bool], width: u32, height: u32) -> RgbImage {
    RgbImage::from_fn(width, height, |x, y| {
        if mask[(y * width + x) as usize] {
            BLACK
        } else {
            WHITE
        }
    })
}

/// Thickens black strokes by dilating ⌊(width−1)/2⌋ times with a 3×3 square.
///
/// Repeated 3×3 dilation equals a single dilation by the `(2k+1)`-square, which
/// is what is computed. Width 1 is the identity.
pub fn dilate(image: &ObjectImage, width: u32) -> Result<ObjectImage> {
    if width == 0 {
        return Err(Error::InvalidConfig("dilation width must be >= 1".into()));
    }
    let px = image.pixels();
    let mask = binary_foreground(px)?;
    let radius = ((width - 1) / 2) as usize;
    let out = dilate_mask(&mask, px.width() as usize, px.height() as usize, radius);
    image.with_pixels(mask_to_image(&out, px.width(), px.height()))
}

/// ITU-R 601 luma, `round(0.299 R + 0.587 G + 0.114 B)`, in exact integer arithmetic.
pub fn luma(p: Rgb<u8>) -> u8 {
    let [r, g, b] = p.0;
    ((299 * r as u32 + 587 * g as u32 + 114 * b as u32 + 500) / 1000) as u8
}

pub fn grayscale_pixels(img: &RgbImage) -> RgbImage {
    let mut out = img.clone();
    for p in out.pixels_mut() {
        let l = luma(*p);
        *p = Rgb([l, l, l]);
    }
    out
}

pub fn to_grayscale(image: &ObjectImage) -> ObjectImage {
    image
        .with_pixels(grayscale_pixels(image.pixels()))
        .expect("grayscale keeps dimensions")
}

/// Masking rule for one pixel: exact white stays, everything else turns gray.
///
/// Pixels with every channel ≤ 250 are object pixels, and so are near-white
/// pixels with some channel above 250 that are not exactly white. Together
/// that is every pixel other than pure white.
pub fn mask_pixel(p: Rgb<u8>) -> Rgb<u8> {
    if p == WHITE {
        WHITE
    } else {
        MASK_GRAY
    }
}

pub fn masked_pixels(img: &RgbImage) -> RgbImage {
    let mut out = img.clone();
    for p in out.pixels_mut() {
        *p = mask_pixel(*p);
    }
    out
}

pub fn to_masked(image: &ObjectImage) -> ObjectImage {
    image
        .with_pixels(masked_pixels(image.pixels()))
        .expect("masking keeps dimensions")
}

/// Reflection about the vertical axis.
pub fn mirror(image: &ObjectImage) -> ObjectImage {
    image
        .with_pixels(image::imageops::flip_horizontal(image.pixels()))
        .expect("mirroring keeps dimensions")
}

pub fn is_mirror_symmetric(image: &ObjectImage) -> bool {
    image.pixel_eq(&mirror(image))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::raster::{white_image, ObjectSource};
    use proptest::prelude::*;

    fn obj(img: RgbImage) -> ObjectImage {
        ObjectImage::new("t", img, ObjectSource::Imported, None).unwrap()
    }

    fn foreground(img: &ObjectImage) -> Vec<(i64, i64)> {
        img.pixels()
            .enumerate_pixels()
            .filter(|(_, _, p)| **p == BLACK)
            .map(|(x, y, _)| (x as i64, y as i64))
            .collect()
    }

    #[test]
    fn dilate_center_pixel_to_block() {
        let mut img = white_image(64, 64);
        img.put_pixel(32, 32, BLACK);
        let out = dilate(&obj(img), 3).unwrap();
        let fg = foreground(&out);
        assert_eq!(fg.len(), 9);
        assert!(fg.iter().all(|&(x, y)| (31..=33).contains(&x) && (31..=33).contains(&y)));
    }

    #[test]
    fn dilate_width_one_is_identity() {
        let mut img = white_image(64, 64);
        for i in 0..20 {
            img.put_pixel(i * 3, i * 2, BLACK);
        }
        let o = obj(img);
        assert_eq!(dilate(&o, 1).unwrap(), o);
    }

    #[test]
    fn dilate_line_to_3x12() {
        let mut img = white_image(64, 64);
        for x in 20..30 {
            img.put_pixel(x, 40, BLACK);
        }
        let fg = foreground(&dilate(&obj(img), 3).unwrap());
        assert_eq!(fg.len(), 36);
        let (xs, ys): (Vec<_>, Vec<_>) = fg.iter().cloned().unzip();
        assert_eq!((xs.iter().min(), xs.iter().max()), (Some(&19), Some(&30)));
        assert_eq!((ys.iter().min(), ys.iter().max()), (Some(&39), Some(&41)));
    }

    #[test]
    fn dilate_rejects_gray() {
        let mut img = white_image(64, 64);
        img.put_pixel(1, 1, Rgb([10, 10, 10]));
        assert!(dilate(&obj(img), 3).is_err());
    }

    #[test]
    fn grayscale_values() {
        assert_eq!(luma(WHITE), 255);
        assert_eq!(luma(Rgb([255, 0, 0])), 76);
        assert_eq!(luma(Rgb([0, 255, 0])), 150);
        assert_eq!(luma(Rgb([0, 0, 255])), 29);
    }

    #[test]
    fn mask_rule_cases() {
        assert_eq!(mask_pixel(Rgb([200, 10, 10])), MASK_GRAY);
        assert_eq!(mask_pixel(WHITE), WHITE);
        assert_eq!(mask_pixel(Rgb([252, 255, 255])), MASK_GRAY);
        assert_eq!(mask_pixel(Rgb([250, 250, 250])), MASK_GRAY);
        assert_eq!(mask_pixel(Rgb([251, 0, 0])), MASK_GRAY);
    }

    #[test]
    fn mirror_half_black() {
        let img = RgbImage::from_fn(64, 64, |x, _| if x < 32 { BLACK } else { WHITE });
        let m = mirror(&obj(img));
        for (x, _, p) in m.pixels().enumerate_pixels() {
            assert_eq!(*p, if x < 32 { WHITE } else { BLACK });
        }
    }

    #[test]
    fn symmetric_image_is_mirror_fixed_point() {
        let img = RgbImage::from_fn(64, 64, |x, y| {
            let d = (x as i32 - 31).abs().min((x as i32 - 32).abs());
            if d + (y as i32 % 7) < 9 {
                BLACK
            } else {
                WHITE
            }
        });
        let o = obj(img);
        assert!(is_mirror_symmetric(&o));
        assert_eq!(mirror(&o), o);
    }

    fn random_image() -> impl Strategy<Value = RgbImage> {
        proptest::collection::vec(any::<u8>(), 64 * 64 * 3)
            .prop_map(|v| RgbImage::from_raw(64, 64, v).unwrap())
    }

    fn random_binary(n: usize) -> impl Strategy<Value = Vec<bool>> {
        proptest::collection::vec(proptest::bool::weighted(0.1), n * n)
    }

    proptest! {
        #[test]
        fn grayscale_idempotent(img in random_image()) {
            let g = grayscale_pixels(&img);
            prop_assert_eq!(grayscale_pixels(&g), g);
        }

        #[test]
        fn masked_output_two_valued(img in random_image()) {
            let m = masked_pixels(&img);
            prop_assert!(m.pixels().all(|p| *p == MASK_GRAY || *p == WHITE));
        }

        #[test]
        fn dilation_matches_minkowski_sum(mask in random_binary(16), width in prop::sample::select(vec![1u32, 3, 5, 7])) {
            let n = 16usize;
            let r = ((width - 1) / 2) as i64;
            let fast = dilate_mask(&mask, n, n, r as usize);
            // Brute-force set dilation: union of translates of the foreground.
            let mut oracle = vec![false; n * n];
            for y in 0..n as i64 {
                for x in 0..n as i64 {
                    if !mask[(y as usize) * n + x as usize] { continue; }
                    for dy in -r..=r {
                        for dx in -r..=r {
                            let (xx, yy) = (x + dx, y + dy);
                            if (0..n as i64).contains(&xx) && (0..n as i64).contains(&yy) {
                                oracle[yy as usize * n + xx as usize] = true;
                            }
                        }
                    }
                }
            }
            prop_assert_eq!(&fast, &oracle);
            prop_assert!(mask.iter().zip(&fast).all(|(a, b)| !a || *b));
        }
    }
}
