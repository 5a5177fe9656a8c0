//! Closed-contour "squiggle" objects.
//!
//! Control points sit at jittered, sorted angles around the frame center with
//! random radii. A closed cardinal spline through them is sampled into a
//! polyline, rejected if it crosses itself or folds back too tightly, drawn as
//! a 1-px 8-connected stroke and finally dilated to the requested width.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::objectgen::transform::{dilate_mask, mask_to_image};
use crate::raster::{ObjectImage, ObjectSource, OBJECT_SIZE};
use crate::rng::SeedStream;

const SAMPLES_PER_SEGMENT: usize = 24;
const MAX_ATTEMPTS: usize = 100;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SquiggleSpec {
    pub control_point_count: usize,
    /// Control-point distance from the frame center, in pixels.
    pub radius_range: (f64, f64),
    /// Cardinal-spline tension in `[0, 1)`; 0 is Catmull-Rom.
    pub smoothing: f64,
    /// Final stroke width in pixels. Must be odd.
    pub stroke_width: u32,
}

impl Default for SquiggleSpec {
    fn default() -> Self {
        Self {
            control_point_count: 10,
            radius_range: (10.0, 24.0),
            smoothing: 0.0,
            stroke_width: 3,
        }
    }
}

impl SquiggleSpec {
    pub fn validate(&self) -> Result<()> {
        let (lo, hi) = self.radius_range;
        if self.control_point_count < 4 {
            return Err(Error::InvalidConfig("squiggle needs at least 4 control points".into()));
        }
        if !(lo > 0.0 && lo <= hi && hi <= 30.0) {
            return Err(Error::InvalidConfig(format!(
                "squiggle radius range ({lo}, {hi}) must satisfy 0 < min <= max <= 30"
            )));
        }
        if !(0.0..1.0).contains(&self.smoothing) {
            return Err(Error::InvalidConfig("squiggle smoothing must be in [0, 1)".into()));
        }
        if self.stroke_width == 0 || self.stroke_width % 2 == 0 {
            return Err(Error::InvalidConfig(format!(
                "squiggle stroke width {} must be a positive odd number",
                self.stroke_width
            )));
        }
        Ok(())
    }

    fn clearance(&self) -> f64 {
        self.stroke_width as f64 + 2.0
    }
}

type Point = (f64, f64);

/// Generates one squiggle; a pure function of `(spec, stream)`.
pub fn gen_squiggle(spec: &SquiggleSpec, stream: &SeedStream, object_id: &str) -> Result<ObjectImage> {
    let outline = squiggle_outline(spec, stream)?;
    let n = OBJECT_SIZE as usize;
    let mut mask = vec![false; n * n];
    for i in 0..outline.len() {
        let a = pixel_of(outline[i]);
        let b = pixel_of(outline[(i + 1) % outline.len()]);
        draw_line(&mut mask, n, a, b);
    }
    let radius = ((spec.stroke_width - 1) / 2) as usize;
    let thick = dilate_mask(&mask, n, n, radius);
    ObjectImage::new(
        object_id,
        mask_to_image(&thick, OBJECT_SIZE, OBJECT_SIZE),
        ObjectSource::Squiggle,
        None,
    )
}

/// The accepted closed polyline behind [`gen_squiggle`], in pixel coordinates.
pub fn squiggle_outline(spec: &SquiggleSpec, stream: &SeedStream) -> Result<Vec<Point>> {
    spec.validate()?;
    let mut rng = stream.clone();
    for _ in 0..MAX_ATTEMPTS {
        let controls = control_points(spec, &mut rng);
        let outline = sample_closed_spline(&controls, spec.smoothing);
        if in_frame(&outline, spec.stroke_width) && is_simple(&outline) && has_clearance(&outline, spec.clearance()) {
            return Ok(outline);
        }
    }
    Err(Error::Generation(format!(
        "{MAX_ATTEMPTS} consecutive squiggle candidates were rejected"
    )))
}

fn control_points(spec: &SquiggleSpec, rng: &mut SeedStream) -> Vec<Point> {
    let k = spec.control_point_count;
    let center = OBJECT_SIZE as f64 / 2.0;
    let rotation = rng.uniform(0.0, std::f64::consts::TAU);
    (0..k)
        .map(|i| {
            // One angle per sector keeps the angles sorted and avoids clumping.
            let theta = rotation + std::f64::consts::TAU * (i as f64 + rng.uniform(0.1, 0.9)) / k as f64;
            let r = rng.uniform(spec.radius_range.0, spec.radius_range.1);
            (center + r * theta.cos(), center + r * theta.sin())
        })
        .collect()
}

fn sample_closed_spline(controls: &[Point], tension: f64) -> Vec<Point> {
    let k = controls.len();
    let scale = (1.0 - tension) / 2.0;
    let tangent = |i: usize| {
        let next = controls[(i + 1) % k];
        let prev = controls[(i + k - 1) % k];
        (scale * (next.0 - prev.0), scale * (next.1 - prev.1))
    };
    let mut out = Vec::with_capacity(k * SAMPLES_PER_SEGMENT);
    for i in 0..k {
        let (p0, p1) = (controls[i], controls[(i + 1) % k]);
        let (m0, m1) = (tangent(i), tangent((i + 1) % k));
        for j in 0..SAMPLES_PER_SEGMENT {
            let t = j as f64 / SAMPLES_PER_SEGMENT as f64;
            let (t2, t3) = (t * t, t * t * t);
            let h00 = 2.0 * t3 - 3.0 * t2 + 1.0;
            let h10 = t3 - 2.0 * t2 + t;
            let h01 = -2.0 * t3 + 3.0 * t2;
            let h11 = t3 - t2;
            out.push((
                h00 * p0.0 + h10 * m0.0 + h01 * p1.0 + h11 * m1.0,
                h00 * p0.1 + h10 * m0.1 + h01 * p1.1 + h11 * m1.1,
            ));
        }
    }
    out
}

fn pixel_of(p: Point) -> (i64, i64) {
    (p.0.floor() as i64, p.1.floor() as i64)
}

fn in_frame(outline: &[Point], stroke_width: u32) -> bool {
    let margin = ((stroke_width - 1) / 2) as i64;
    let max = OBJECT_SIZE as i64 - 1 - margin;
    outline.iter().all(|&p| {
        let (x, y) = pixel_of(p);
        x >= margin && y >= margin && x <= max && y <= max
    })
}

fn orient(a: Point, b: Point, c: Point) -> f64 {
    (b.0 - a.0) * (c.1 - a.1) - (b.1 - a.1) * (c.0 - a.0)
}

fn on_segment(a: Point, b: Point, p: Point) -> bool {
    p.0 >= a.0.min(b.0) && p.0 <= a.0.max(b.0) && p.1 >= a.1.min(b.1) && p.1 <= a.1.max(b.1)
}

fn segments_touch(a: Point, b: Point, c: Point, d: Point) -> bool {
    let (o1, o2, o3, o4) = (orient(a, b, c), orient(a, b, d), orient(c, d, a), orient(c, d, b));
    if ((o1 > 0.0 && o2 < 0.0) || (o1 < 0.0 && o2 > 0.0)) && ((o3 > 0.0 && o4 < 0.0) || (o3 < 0.0 && o4 > 0.0)) {
        return true;
    }
    (o1 == 0.0 && on_segment(a, b, c))
        || (o2 == 0.0 && on_segment(a, b, d))
        || (o3 == 0.0 && on_segment(c, d, a))
        || (o4 == 0.0 && on_segment(c, d, b))
}

/// True when no two non-adjacent edges of the closed polyline touch.
fn is_simple(outline: &[Point]) -> bool {
    let n = outline.len();
    for i in 0..n {
        let (a, b) = (outline[i], outline[(i + 1) % n]);
        for j in i + 2..n {
            if i == 0 && j == n - 1 {
                continue;
            }
            let (c, d) = (outline[j], outline[(j + 1) % n]);
            if a.0.max(b.0) < c.0.min(d.0)
                || c.0.max(d.0) < a.0.min(b.0)
                || a.1.max(b.1) < c.1.min(d.1)
                || c.1.max(d.1) < a.1.min(b.1)
            {
                continue;
            }
            if segments_touch(a, b, c, d) {
                return false;
            }
        }
    }
    true
}

/// Parts of the curve that are far apart along the curve must also be at
/// least `clearance` apart in the plane, so thick strokes never merge.
fn has_clearance(outline: &[Point], clearance: f64) -> bool {
    let n = outline.len();
    let mut arc = Vec::with_capacity(n);
    let mut total = 0.0;
    for i in 0..n {
        arc.push(total);
        let (a, b) = (outline[i], outline[(i + 1) % n]);
        total += (b.0 - a.0).hypot(b.1 - a.1);
    }
    let min_arc = 3.0 * clearance;
    for i in 0..n {
        for j in i + 1..n {
            let along = (arc[j] - arc[i]).min(total - (arc[j] - arc[i]));
            if along <= min_arc {
                continue;
            }
            let (p, q) = (outline[i], outline[j]);
            if (p.0 - q.0).hypot(p.1 - q.1) < clearance {
                return false;
            }
        }
    }
    true
}

/// 8-connected Bresenham line between two pixels.
fn draw_line(mask: &mut [bool], n: usize, a: (i64, i64), b: (i64, i64)) {
    let (mut x, mut y) = a;
    let dx = (b.0 - a.0).abs();
    let dy = -(b.1 - a.1).abs();
    let sx = if a.0 < b.0 { 1 } else { -1 };
    let sy = if a.1 < b.1 { 1 } else { -1 };
    let mut err = dx + dy;
    loop {
        if (0..n as i64).contains(&x) && (0..n as i64).contains(&y) {
            mask[y as usize * n + x as usize] = true;
        }
        if (x, y) == b {
            break;
        }
        let e2 = 2 * err;
        if e2 >= dy {
            err += dy;
            x += sx;
        }
        if e2 <= dx {
            err += dx;
            y += sy;
        }
    }
}
