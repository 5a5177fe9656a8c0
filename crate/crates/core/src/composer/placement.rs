//! Object placement on the canvas.

use crate::composer::config::PlacementMode;
use crate::datamodel::records::{boxes_overlap, Position};
use crate::error::{Error, Result};
use crate::raster::{CANVAS_SIZE, OBJECT_SIZE};
use crate::rng::SeedStream;

/// Side of a transformer token in pixels.
pub const TOKEN_SIZE: u32 = 16;
/// Token offsets of the aligned slot origins along each axis.
pub const SLOT_TOKEN_OFFSETS: [u32; 3] = [1, 5, 9];

const MAX_ATTEMPTS: usize = 1000;

/// The nine aligned slot origins, row-major.
pub fn aligned_slots() -> [Position; 9] {
    std::array::from_fn(|i| {
        Position::new(
            SLOT_TOKEN_OFFSETS[i % 3] * TOKEN_SIZE,
            SLOT_TOKEN_OFFSETS[i / 3] * TOKEN_SIZE,
        )
    })
}

pub fn is_aligned(pos: Position) -> bool {
    aligned_slots().contains(&pos)
}

/// Random top-left corner for a single object anywhere on the canvas.
pub fn place_single(stream: &mut SeedStream) -> Position {
    let span = (CANVAS_SIZE - OBJECT_SIZE + 1) as u64;
    Position::new(stream.below(span) as u32, stream.below(span) as u32)
}

/// Two non-overlapping object positions.
///
/// Free mode rejection-samples uniform corners; aligned mode picks an ordered
/// pair of distinct slots.
pub fn place_pair(mode: PlacementMode, stream: &mut SeedStream) -> Result<(Position, Position)> {
    match mode {
        PlacementMode::Free => {
            for _ in 0..MAX_ATTEMPTS {
                let a = place_single(stream);
                let b = place_single(stream);
                if !boxes_overlap(a, b, OBJECT_SIZE) {
                    return Ok((a, b));
                }
            }
            Err(Error::Generation(format!(
                "no non-overlapping placement after {MAX_ATTEMPTS} attempts"
            )))
        }
        PlacementMode::Aligned => {
            let slots = aligned_slots();
            let first = stream.below_usize(9);
            let mut second = stream.below_usize(8);
            if second >= first {
                second += 1;
            }
            Ok((slots[first], slots[second]))
        }
    }
}
