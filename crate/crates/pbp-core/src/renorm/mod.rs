//! Brick renormalization: the succession relation between overlapping
//! bricks, the seven-brick translation gadget, activation transfer
//! experiments, and the renormalized field of excellent sites on Z^2 with
//! its oriented-path and nucleation machinery.

mod activation;
mod excellent;
mod gadget;
pub mod planted;

pub use activation::{
    activation_experiment, activation_run, cut_comparison_test, stretching_check, ActivationReport,
};
pub use excellent::{
    excellent_field, excellent_field_from, nucleation_experiment, nucleation_window,
    oriented_path_search, ExcellentField, NucleationReport, PathReport,
};
pub use gadget::{build_gadget, Gadget, GADGET_SHIFT, GADGET_SHIFT_ALT};

use crate::error::{Error, Result};
use crate::sail::{Brick, Isometry, Site3};

/// One edge of the succession relation: the successor's tail is centered on
/// the predecessor's tip, so the tip cuts the tail in two. Every brick has
/// exactly eight successors: two boxes sharing the bisected tail, each
/// carrying four head-axis orientations.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BrickRelation {
    pub predecessor: Brick,
    pub successor: Brick,
    /// Position of the successor in the `brick_successors` enumeration.
    pub choice: usize,
}

/// The eight successor placements of the canonical brick at a given scale.
///
/// In the predecessor's frame a successor spans 32L along axis 0, 4L along
/// axis 1, and 16L along axis 2, so its long axis takes the canonical third
/// coordinate, giving the cyclic axis map y = (x3, x1, x2). Its tail is the
/// 16L-long half at the distinguished-corner end, and centering that tail on
/// the tip [0,4L) x [0,4L) x [16L,32L) forces the tail box
/// [-6L,10L) x [0,4L) x [16L,32L) exactly (doubled-coordinate centroids
/// 4L-1, 4L-1, 48L-1). The body then extends to either side of the tail:
/// x1 in [-22L,10L) with the corner at the high end, or [-6L,26L) with the
/// corner at the low end. The remaining freedom is the sign on each of the
/// two short axes.
fn local_successor_places(scale: u64) -> [Isometry; 8] {
    let l = scale as i64;
    let mut out = Vec::with_capacity(8);
    for (sign0, shift0) in [(-1, 10 * l - 1), (1, -6 * l)] {
        for bits in 0..4u32 {
            let sign1 = if bits & 1 == 0 { 1 } else { -1 };
            let sign2 = if bits & 2 == 0 { 1 } else { -1 };
            out.push(Isometry {
                perm: [2, 0, 1],
                sign: [sign0, sign1, sign2],
                shift: [
                    shift0,
                    if sign1 == 1 { 0 } else { 4 * l - 1 },
                    if sign2 == 1 { 16 * l } else { 32 * l - 1 },
                ],
            });
        }
    }
    out.try_into().expect("eight placements")
}

/// The eight successors of a brick, in a fixed order: first by window corner
/// (lexicographic), then by the signed-permutation code of the placement's
/// linear part.
pub fn brick_successors(brick: &Brick) -> [Brick; 8] {
    let mut out: Vec<Brick> = local_successor_places(brick.scale)
        .iter()
        .map(|local| Brick {
            scale: brick.scale,
            place: brick.place.compose(local),
        })
        .collect();
    out.sort_by_key(|b| {
        (
            b.window().origin().to_vec(),
            b.place.linear_code(),
        )
    });
    debug_assert!(out
        .iter()
        .all(|b| tip_tail_centroids_match(brick, b)));
    out.try_into().expect("eight successors")
}

/// Exact centroid test behind the succession relation: the successor's tail
/// and the predecessor's tip have the same center, in doubled coordinates.
pub fn tip_tail_centroids_match(predecessor: &Brick, successor: &Brick) -> bool {
    predecessor.tip().doubled_centroid() == successor.tail().doubled_centroid()
}

/// Look up the relation edge between two bricks, if there is one.
pub fn relate(predecessor: &Brick, successor: &Brick) -> Option<BrickRelation> {
    brick_successors(predecessor)
        .iter()
        .position(|b| b == successor)
        .map(|choice| BrickRelation {
            predecessor: predecessor.clone(),
            successor: successor.clone(),
            choice,
        })
}

/// Translate a brick by a whole vector (in sites, not scale units).
pub fn translate_brick(brick: &Brick, shift: &Site3) -> Brick {
    Brick {
        scale: brick.scale,
        place: Isometry::translation(*shift).compose(&brick.place),
    }
}

fn scaled_shift(scale: u64, units: &Site3) -> Site3 {
    let l = scale as i64;
    [units[0] * l, units[1] * l, units[2] * l]
}

/// Bounding box of two windows.
fn hull(a: &crate::window::BoxWindow, b: &crate::window::BoxWindow) -> Result<crate::window::BoxWindow> {
    if a.dim() != b.dim() {
        return Err(Error::Geometry("hull of windows of different dimension".into()));
    }
    let mut origin = Vec::with_capacity(a.dim());
    let mut extents = Vec::with_capacity(a.dim());
    for i in 0..a.dim() {
        let lo = a.origin()[i].min(b.origin()[i]);
        let hi = a.upper()[i].max(b.upper()[i]);
        origin.push(lo);
        extents.push((hi - lo) as u64);
    }
    crate::window::BoxWindow::new(origin, extents)
}
