//! Sails: curtain fragments renormalized into bricks.
//!
//! A brick at scale L is an axis-aligned box with side lengths
//! (4L, 16L, 32L), up to a signed coordinate permutation; the canonical
//! brick has its low corner at the origin. Cells of shape 1 x 4 x 16 tile
//! the canonical brick and collapse it onto the proto-brick
//! [0,4L) x [0,4L) x [0,2L). A sail is a subset of the proto-brick whose
//! layers are oriented staircase paths pinned to the diagonal band
//! {3L < x1+x2+x3 < 4L}, supported from below, with open surroundings and
//! an occupied seed over every layer but the top one.

use std::collections::HashSet;

use crate::config::Configuration;
use crate::error::{Error, Result};
use crate::state::SiteState;
use crate::window::BoxWindow;

pub use crate::curtain::Site3;

mod find;
mod isometry;

pub use find::{
    find_sail_constructive, find_sail_exhaustive, good_brick, separation_check, SailOutcome,
    EXHAUSTIVE_MAX_SCALE,
};
pub use isometry::{all_rotations, Isometry};

/// Canonical brick box [0,4L) x [0,16L) x [0,32L).
pub fn brick_window(scale: u64) -> BoxWindow {
    assert!(scale >= 1, "brick scale must be positive");
    BoxWindow::cube3([0, 0, 0], [4 * scale, 16 * scale, 32 * scale]).expect("valid box")
}

/// Proto-brick box [0,4L) x [0,4L) x [0,2L).
pub fn proto_window(scale: u64) -> BoxWindow {
    assert!(scale >= 1, "brick scale must be positive");
    BoxWindow::cube3([0, 0, 0], [4 * scale, 4 * scale, 2 * scale]).expect("valid box")
}

/// Low corner of the cell of a proto-site: cells stretch 1 x 4 x 16.
pub fn cell_origin(x: &Site3) -> Site3 {
    [x[0], 4 * x[1], 16 * x[2]]
}

/// The 64 brick sites making up the cell of a proto-site.
pub fn cell_sites(x: &Site3) -> Vec<Site3> {
    let o = cell_origin(x);
    let mut out = Vec::with_capacity(64);
    for dy in 0..4 {
        for dz in 0..16 {
            out.push([o[0], o[1] + dy, o[2] + dz]);
        }
    }
    out
}

/// The three sites whose openness a sail member demands: itself, the site
/// directly above, and the diagonal upward neighbour.
pub fn member_triple(x: &Site3) -> [Site3; 3] {
    [
        *x,
        [x[0], x[1], x[2] + 1],
        [x[0] - 1, x[1] - 1, x[2] + 1],
    ]
}

/// Collapse a configuration on the canonical brick to the proto-brick: a
/// cell that is fully occupied collapses to occupied, a fully open cell to
/// open vacant, and anything containing a closed site to closed. The
/// metadata moves to the induced product parameters p^64 and 1-(1-q)^64.
pub fn aux_config(cfg: &Configuration) -> Result<Configuration> {
    let scale = infer_scale(cfg.window())?;
    let proto = proto_window(scale);
    let mut out = Configuration::filled(proto.clone(), SiteState::OpenVacant);
    for x in proto.iter_sites() {
        let x3: Site3 = [x[0], x[1], x[2]];
        let mut all_occupied = true;
        let mut any_closed = false;
        for s in cell_sites(&x3) {
            match cfg.get(&s).expect("cell sites lie in the brick") {
                SiteState::Closed => {
                    any_closed = true;
                    break;
                }
                SiteState::OpenVacant => all_occupied = false,
                SiteState::Occupied => {}
            }
        }
        let state = if any_closed {
            SiteState::Closed
        } else if all_occupied {
            SiteState::Occupied
        } else {
            SiteState::OpenVacant
        };
        out.set(&x3, state);
    }
    let meta = cfg.meta();
    out.set_meta(crate::config::Meta {
        p: meta.p.powi(64),
        q: 1.0 - (1.0 - meta.q).powi(64),
        seed: meta.seed,
        generation: meta.generation,
    });
    Ok(out)
}

fn infer_scale(w: &BoxWindow) -> Result<u64> {
    if w.dim() != 3 || w.origin() != [0, 0, 0] {
        return Err(Error::Geometry(
            "expected the canonical brick box at the origin".into(),
        ));
    }
    let e = w.extents();
    let scale = e[0] / 4;
    if scale == 0 || e[0] != 4 * scale || e[1] != 16 * scale || e[2] != 32 * scale {
        return Err(Error::Geometry(format!(
            "extents {e:?} are not (4L, 16L, 32L) for any L >= 1"
        )));
    }
    Ok(scale)
}

fn infer_proto_scale(w: &BoxWindow) -> Result<u64> {
    if w.dim() != 3 || w.origin() != [0, 0, 0] {
        return Err(Error::Geometry(
            "expected the canonical proto-brick box at the origin".into(),
        ));
    }
    let e = w.extents();
    let scale = e[2] / 2;
    if scale == 0 || e[0] != 4 * scale || e[1] != 4 * scale || e[2] != 2 * scale {
        return Err(Error::Geometry(format!(
            "extents {e:?} are not (4L, 4L, 2L) for any L >= 1"
        )));
    }
    Ok(scale)
}

/// A collapsed brick: the auxiliary three-state configuration on the
/// proto-brick box, tagged with its scale.
#[derive(Debug, Clone, PartialEq)]
pub struct ProtoBrick {
    scale: u64,
    aux: Configuration,
}

impl ProtoBrick {
    /// Collapse a configuration sampled on the canonical brick.
    pub fn from_brick(cfg: &Configuration) -> Result<ProtoBrick> {
        let scale = infer_scale(cfg.window())?;
        Ok(ProtoBrick {
            scale,
            aux: aux_config(cfg)?,
        })
    }

    /// Wrap a configuration already living on a proto-brick box.
    pub fn from_aux(aux: Configuration) -> Result<ProtoBrick> {
        let scale = infer_proto_scale(aux.window())?;
        Ok(ProtoBrick { scale, aux })
    }

    /// Sample the auxiliary measure directly at the collapsed parameters.
    pub fn sample_direct(
        scale: u64,
        p_hat: f64,
        q_hat: f64,
        src: crate::coupling::CouplingSource,
    ) -> Result<ProtoBrick> {
        if scale == 0 {
            return Err(Error::Parameter("brick scale must be positive".into()));
        }
        let aux = Configuration::sample(proto_window(scale), p_hat, q_hat, src)?;
        Ok(ProtoBrick { scale, aux })
    }

    pub fn scale(&self) -> u64 {
        self.scale
    }

    pub fn aux(&self) -> &Configuration {
        &self.aux
    }

    pub fn window(&self) -> &BoxWindow {
        self.aux.window()
    }
}

/// Sites of the proto-brick whose member triple stays inside the box and is
/// entirely open.
pub fn swell_sites(proto: &ProtoBrick) -> HashSet<Site3> {
    let w = proto.window();
    let mut out = HashSet::new();
    for x in w.iter_sites() {
        let x3: Site3 = [x[0], x[1], x[2]];
        let triple = member_triple(&x3);
        if triple.iter().all(|t| w.contains(t))
            && triple
                .iter()
                .all(|t| proto.aux.get(t).is_some_and(|s| s.is_open()))
        {
            out.insert(x3);
        }
    }
    out
}

/// The union of member triples over a candidate set, unclipped.
pub fn shadow(candidate: &HashSet<Site3>) -> HashSet<Site3> {
    let mut out = HashSet::new();
    for x in candidate {
        out.extend(member_triple(x));
    }
    out
}

/// The five defining sail conditions, evaluated independently.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Goodness {
    /// Every member triple is open where it meets the proto-brick.
    pub open_shadow: bool,
    /// Every member off the bottom layer rests on a member directly or
    /// diagonally below.
    pub supported: bool,
    /// All members sit strictly inside the diagonal band (3L, 4L).
    pub banded: bool,
    /// Every layer is a single oriented path from the x1 = 0 face to the
    /// x2 = 0 face with steps +e1 / -e2 and no run of three equal steps.
    pub layered_paths: bool,
    /// Every layer but the top has an occupied site directly above it.
    pub seeded: bool,
}

impl Goodness {
    pub fn all(&self) -> bool {
        self.open_shadow && self.supported && self.banded && self.layered_paths && self.seeded
    }

    pub fn failed_conditions(&self) -> Vec<&'static str> {
        let mut out = Vec::new();
        if !self.open_shadow {
            out.push("open shadow");
        }
        if !self.supported {
            out.push("downward support");
        }
        if !self.banded {
            out.push("diagonal band");
        }
        if !self.layered_paths {
            out.push("oriented layer paths");
        }
        if !self.seeded {
            out.push("occupied seeds above layers");
        }
        out
    }
}

/// Rebuild the walk order of a layer. The set must be a single path whose
/// steps are +e1 or -e2, starting on x1 = 0, ending on x2 = 0, with no run
/// of three equal steps; anything else returns None.
fn ordered_layer_path(pts: &HashSet<(i64, i64)>) -> Option<Vec<(i64, i64)>> {
    let mut starts = pts
        .iter()
        .filter(|&&(x, y)| !pts.contains(&(x - 1, y)) && !pts.contains(&(x, y + 1)));
    let start = *starts.next()?;
    if starts.next().is_some() {
        return None;
    }
    let mut path = vec![start];
    let mut last_step = 2u8;
    let mut run = 0u32;
    loop {
        let (x, y) = *path.last().unwrap();
        let step = match (pts.contains(&(x + 1, y)), pts.contains(&(x, y - 1))) {
            (true, true) => return None, // branch
            (true, false) => 0u8,
            (false, true) => 1u8,
            (false, false) => break,
        };
        run = if step == last_step { run + 1 } else { 1 };
        if run >= 3 {
            return None;
        }
        last_step = step;
        path.push(if step == 0 { (x + 1, y) } else { (x, y - 1) });
        if path.len() > pts.len() {
            return None;
        }
    }
    if path.len() != pts.len() || path[0].0 != 0 || path.last().unwrap().1 != 0 {
        return None;
    }
    Some(path)
}

/// Walk orders for every proto layer, bottom first; None as soon as one
/// layer is empty or fails the path shape.
pub fn layer_paths(scale: u64, candidate: &HashSet<Site3>) -> Option<Vec<Vec<Site3>>> {
    let mut layers = Vec::with_capacity(2 * scale as usize);
    for k in 0..2 * scale as i64 {
        let pts: HashSet<(i64, i64)> = candidate
            .iter()
            .filter(|s| s[2] == k)
            .map(|s| (s[0], s[1]))
            .collect();
        let path = ordered_layer_path(&pts)?;
        layers.push(path.into_iter().map(|(x, y)| [x, y, k]).collect());
    }
    Some(layers)
}

/// Evaluate the five sail conditions for a candidate subset of the
/// proto-brick. Sites outside the box are a caller error, not a judgement.
pub fn check_sail(proto: &ProtoBrick, candidate: &HashSet<Site3>) -> Result<Goodness> {
    let w = proto.window();
    if let Some(bad) = candidate.iter().find(|x| !w.contains(*x)) {
        return Err(Error::Parameter(format!(
            "candidate site {bad:?} lies outside the proto-brick"
        )));
    }
    let scale = proto.scale as i64;

    let open_shadow = candidate.iter().all(|x| {
        member_triple(x)
            .iter()
            .all(|t| !w.contains(t) || proto.aux.get(t).is_some_and(|s| s.is_open()))
    });

    let supported = candidate.iter().all(|x| {
        x[2] == 0
            || candidate.contains(&[x[0], x[1], x[2] - 1])
            || candidate.contains(&[x[0] + 1, x[1] + 1, x[2] - 1])
    });

    let banded = candidate.iter().all(|x| {
        let s = x[0] + x[1] + x[2];
        3 * scale < s && s < 4 * scale
    });

    let paths = layer_paths(proto.scale, candidate);
    let layered_paths = paths.is_some();

    let seeded = match &paths {
        Some(layers) => layers[..layers.len() - 1].iter().all(|layer| {
            layer.iter().any(|x| {
                proto
                    .aux
                    .get(&[x[0], x[1], x[2] + 1])
                    .is_some_and(|s| s.is_occupied())
            })
        }),
        // Without the path structure, fall back to the raw per-layer test.
        None => (0..2 * scale - 1).all(|k| {
            candidate
                .iter()
                .filter(|x| x[2] == k)
                .any(|x| {
                    proto
                        .aux
                        .get(&[x[0], x[1], x[2] + 1])
                        .is_some_and(|s| s.is_occupied())
                })
        }),
    };

    Ok(Goodness {
        open_shadow,
        supported,
        banded,
        layered_paths,
        seeded,
    })
}

/// A verified sail: ordered layer paths plus the condition flags that were
/// measured for it.
#[derive(Debug, Clone, PartialEq)]
pub struct SailSet {
    pub scale: u64,
    /// One walk per proto layer, bottom first.
    pub layers: Vec<Vec<Site3>>,
    pub goodness: Goodness,
}

impl SailSet {
    pub fn site_count(&self) -> usize {
        self.layers.iter().map(|l| l.len()).sum()
    }

    pub fn site_set(&self) -> HashSet<Site3> {
        self.layers.iter().flatten().copied().collect()
    }

    /// All member sites, sorted.
    pub fn sites(&self) -> Vec<Site3> {
        let mut v: Vec<Site3> = self.layers.iter().flatten().copied().collect();
        v.sort_unstable();
        v
    }

    /// Union of member triples, unclipped.
    pub fn shadow(&self) -> HashSet<Site3> {
        shadow(&self.site_set())
    }

    /// Expansion back to brick coordinates: the union of the cells of all
    /// members, sorted.
    pub fn scaled_sites(&self) -> Vec<Site3> {
        let mut v: Vec<Site3> = self
            .layers
            .iter()
            .flatten()
            .flat_map(cell_sites)
            .collect();
        v.sort_unstable();
        v
    }

    /// The expansion pushed through a brick placement into world
    /// coordinates, sorted.
    pub fn world_cells(&self, brick: &Brick) -> Vec<Site3> {
        assert_eq!(self.scale, brick.scale, "sail and brick scales must agree");
        let mut v: Vec<Site3> = self
            .layers
            .iter()
            .flatten()
            .flat_map(cell_sites)
            .map(|s| brick.to_world(&s))
            .collect();
        v.sort_unstable();
        v
    }
}

/// The proto-site (L+1, L+1, L): the corner witness the sail construction
/// pins down when it succeeds near the band floor.
pub fn distinguished_proto_site(scale: u64) -> Site3 {
    let l = scale as i64;
    [l + 1, l + 1, l]
}

/// The brick site (L+1, 4L+4, 16L): the low corner of the cell of the
/// distinguished proto-site.
pub fn distinguished_brick_site(scale: u64) -> Site3 {
    let l = scale as i64;
    [l + 1, 4 * l + 4, 16 * l]
}

/// A placed brick: the canonical box carried by a signed-permutation
/// isometry into world coordinates.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Brick {
    pub scale: u64,
    pub place: Isometry,
}

impl Brick {
    pub fn canonical(scale: u64) -> Result<Brick> {
        Brick::new(scale, Isometry::identity())
    }

    pub fn new(scale: u64, place: Isometry) -> Result<Brick> {
        if scale == 0 {
            return Err(Error::Parameter("brick scale must be positive".into()));
        }
        Ok(Brick { scale, place })
    }

    /// The world box covered by the brick.
    pub fn window(&self) -> BoxWindow {
        self.place.apply_window(&brick_window(self.scale))
    }

    /// Upper half in the long direction, world coordinates.
    pub fn head(&self) -> BoxWindow {
        self.region([0, 0, 16], [4, 16, 16])
    }

    /// Lower half in the long direction, world coordinates.
    pub fn tail(&self) -> BoxWindow {
        self.region([0, 0, 0], [4, 16, 16])
    }

    /// The distinguished quarter column of the head, world coordinates.
    pub fn tip(&self) -> BoxWindow {
        self.region([0, 0, 16], [4, 4, 16])
    }

    /// The bottom cell layer (one cell tall, so 16 sites), world
    /// coordinates.
    pub fn base(&self) -> BoxWindow {
        let w = BoxWindow::cube3([0, 0, 0], [4 * self.scale, 16 * self.scale, 16])
            .expect("valid region box");
        self.place.apply_window(&w)
    }

    fn region(&self, origin_units: [i64; 3], extent_units: [u64; 3]) -> BoxWindow {
        let l = self.scale;
        let w = BoxWindow::cube3(
            [
                origin_units[0] * l as i64,
                origin_units[1] * l as i64,
                origin_units[2] * l as i64,
            ],
            [extent_units[0] * l, extent_units[1] * l, extent_units[2] * l],
        )
        .expect("valid region box");
        self.place.apply_window(&w)
    }

    pub fn to_world(&self, canonical: &Site3) -> Site3 {
        self.place.apply(canonical)
    }

    pub fn to_canonical(&self, world: &Site3) -> Site3 {
        self.place.inverse().apply(world)
    }

    /// World image of the distinguished brick site.
    pub fn distinguished_site(&self) -> Site3 {
        self.to_world(&distinguished_brick_site(self.scale))
    }
}

#[cfg(test)]
pub(crate) mod testutil {
    use std::collections::HashSet;

    use crate::config::Configuration;
    use crate::state::SiteState;

    use super::{proto_window, Site3};

    /// Layer k of the widest staircase at a given scale: both admissible
    /// antidiagonals x1 + x2 = 4L - 1 - k and 4L - 2 - k interleaved, which
    /// is the walk (0, 4L-1-k), (0, 4L-2-k), (1, 4L-2-k), ... alternating
    /// -e2 and e1 down to (4L-1-k, 0).
    pub fn staircase(scale: u64) -> HashSet<Site3> {
        let l = scale as i64;
        let mut cand = HashSet::new();
        for k in 0..2 * l {
            let hi = 4 * l - 1 - k;
            for j in 0..=hi {
                cand.insert([j, hi - j, k]);
                if hi - 1 - j >= 0 {
                    cand.insert([j, hi - 1 - j, k]);
                }
            }
        }
        cand
    }

    /// All-open proto configuration with one occupied seed directly above
    /// each staircase layer but the top.
    pub fn seeded_aux(scale: u64) -> Configuration {
        let l = scale as i64;
        let mut aux = Configuration::filled(proto_window(scale), SiteState::OpenVacant);
        for k in 0..2 * l - 1 {
            aux.set(&[1, 4 * l - 2 - k, k + 1], SiteState::Occupied);
        }
        aux
    }
}

#[cfg(test)]
mod tests {
    use super::testutil::{seeded_aux, staircase};
    use super::*;
    use crate::coupling::CouplingSource;

    #[test]
    fn cells_partition_the_brick() {
        let scale = 2;
        let brick = brick_window(scale);
        let mut hit = vec![0u32; brick.volume()];
        for x in proto_window(scale).iter_sites() {
            for s in cell_sites(&[x[0], x[1], x[2]]) {
                hit[brick.index_of(&s).expect("cell stays inside")] += 1;
            }
        }
        assert!(hit.iter().all(|&c| c == 1));
    }

    #[test]
    fn distinguished_sites_are_linked() {
        for scale in [1u64, 3, 7] {
            let xp = distinguished_proto_site(scale);
            let xb = distinguished_brick_site(scale);
            assert_eq!(cell_origin(&xp), xb);
            assert!(cell_sites(&xp).contains(&xb));
            let l = scale as i64;
            assert_eq!(xp[0] + xp[1] + xp[2], 3 * l + 2);
        }
    }

    #[test]
    fn aux_states_follow_the_cells() {
        let scale = 1;
        let mut cfg = Configuration::filled(brick_window(scale), SiteState::OpenVacant);
        // Occupy one full cell, close one site of another, leave a third
        // untouched.
        for s in cell_sites(&[0, 0, 0]) {
            cfg.set(&s, SiteState::Occupied);
        }
        cfg.set(&cell_sites(&[1, 1, 0])[5], SiteState::Closed);
        let aux = aux_config(&cfg).unwrap();
        assert_eq!(aux.get(&[0, 0, 0]), Some(SiteState::Occupied));
        assert_eq!(aux.get(&[1, 1, 0]), Some(SiteState::Closed));
        assert_eq!(aux.get(&[2, 2, 0]), Some(SiteState::OpenVacant));
        // A cell that is occupied except for one open site is merely open.
        let mut cfg2 = cfg.clone();
        cfg2.set(&cell_sites(&[0, 0, 0])[9], SiteState::OpenVacant);
        let aux2 = aux_config(&cfg2).unwrap();
        assert_eq!(aux2.get(&[0, 0, 0]), Some(SiteState::OpenVacant));
    }

    #[test]
    fn aux_marginals_match_the_collapsed_parameters() {
        let scale = 7; // 10976 cells
        let p = 0.97;
        let q = 0.0005;
        let cfg = Configuration::sample(brick_window(scale), p, q, CouplingSource::new(404)).unwrap();
        let aux = aux_config(&cfg).unwrap();
        let meta = aux.meta();
        let p_hat = p.powi(64);
        let q_hat = 1.0 - (1.0 - q).powi(64);
        assert!((meta.p - p_hat).abs() < 1e-12);
        assert!((meta.q - q_hat).abs() < 1e-12);
        let (open, occupied, closed) = aux.counts();
        let cells = (open + occupied + closed) as f64;
        let occ_rate = occupied as f64 / cells;
        let closed_rate = closed as f64 / cells;
        // Four-sigma binomial brackets at ~11k cells.
        let sd_occ = (p_hat * (1.0 - p_hat) / cells).sqrt();
        let sd_closed = (q_hat * (1.0 - q_hat) / cells).sqrt();
        assert!(
            (occ_rate - p_hat).abs() < 4.0 * sd_occ,
            "occupied rate {occ_rate} vs {p_hat}"
        );
        assert!(
            (closed_rate - q_hat).abs() < 4.0 * sd_closed,
            "closed rate {closed_rate} vs {q_hat}"
        );
    }

    #[test]
    fn swell_needs_the_whole_triple_inside() {
        let scale = 2;
        let proto = ProtoBrick::from_aux(Configuration::filled(
            proto_window(scale),
            SiteState::OpenVacant,
        ))
        .unwrap();
        let swell = swell_sites(&proto);
        // Interior sites qualify; the top layer and the low x1/x2 edges
        // push part of the triple out of the box.
        assert!(swell.contains(&[1, 1, 0]));
        assert!(!swell.contains(&[0, 1, 0]));
        assert!(!swell.contains(&[1, 0, 0]));
        assert!(!swell.contains(&[1, 1, 2 * scale as i64 - 1]));
        for x in &swell {
            for t in member_triple(x) {
                assert!(proto.window().contains(&t));
            }
        }
    }

    #[test]
    fn layer_path_shape_is_enforced() {
        let good: HashSet<(i64, i64)> =
            [(0, 3), (1, 3), (1, 2), (2, 2), (2, 1), (2, 0), (3, 0)]
                .into_iter()
                .collect();
        // (2,1)-(2,0) after (1,2)->(2,2)->(2,1): runs are fine but the walk
        // above has a run of two -e2 steps followed by... recompute: steps
        // are e1, -e2, e1, -e2, -e2, e1. Longest run is two.
        assert!(ordered_layer_path(&good).is_some());

        // Three consecutive equal steps.
        let triple_run: HashSet<(i64, i64)> = [(0, 3), (1, 3), (2, 3), (3, 3), (3, 0), (3, 2), (3, 1)]
            .into_iter()
            .collect();
        assert!(ordered_layer_path(&triple_run).is_none());

        // Branch.
        let branch: HashSet<(i64, i64)> = [(0, 1), (1, 1), (1, 0), (2, 1)].into_iter().collect();
        assert!(ordered_layer_path(&branch).is_none());

        // Wrong faces.
        let late_start: HashSet<(i64, i64)> = [(1, 1), (1, 0), (2, 0)].into_iter().collect();
        assert!(ordered_layer_path(&late_start).is_none());
        let early_end: HashSet<(i64, i64)> = [(0, 2), (0, 1), (1, 1)].into_iter().collect();
        assert!(ordered_layer_path(&early_end).is_none());

        assert!(ordered_layer_path(&HashSet::new()).is_none());
    }

    #[test]
    fn check_sail_accepts_a_planted_staircase() {
        // The band 3L < s < 4L leaves L - 1 admissible diagonal sums per
        // layer and a path needs two adjacent ones, so 3 is the smallest
        // workable scale.
        let scale = 3u64;
        let cand = staircase(scale);
        let proto = ProtoBrick::from_aux(seeded_aux(scale)).unwrap();
        let flags = check_sail(&proto, &cand).unwrap();
        assert!(flags.all(), "failed: {:?}", flags.failed_conditions());

        let paths = layer_paths(scale, &cand).unwrap();
        assert_eq!(paths.len(), 6);
        assert_eq!(paths[0][0], [0, 11, 0]);
        assert_eq!(*paths[0].last().unwrap(), [11, 0, 0]);
        assert_eq!(paths[0].len(), 23);
    }

    #[test]
    fn check_sail_flags_each_broken_condition() {
        let scale = 3u64;
        let cand = staircase(scale);
        let proto = ProtoBrick::from_aux(seeded_aux(scale)).unwrap();
        assert!(check_sail(&proto, &cand).unwrap().all());

        // Close a member: only open_shadow breaks.
        let mut aux_closed = seeded_aux(scale);
        aux_closed.set(&[2, 9, 0], SiteState::Closed);
        let proto_closed = ProtoBrick::from_aux(aux_closed).unwrap();
        let flags = check_sail(&proto_closed, &cand).unwrap();
        assert!(!flags.open_shadow);
        assert!(flags.supported && flags.banded && flags.layered_paths && flags.seeded);

        // Drop the seeds: only seeded breaks.
        let proto_bare = ProtoBrick::from_aux(Configuration::filled(
            proto_window(scale),
            SiteState::OpenVacant,
        ))
        .unwrap();
        let flags = check_sail(&proto_bare, &cand).unwrap();
        assert!(!flags.seeded);
        assert!(flags.open_shadow && flags.supported && flags.banded && flags.layered_paths);

        // Shift the top layer along +e1: it leaves the band and misses the
        // start face, but the wide layer below still happens to support it.
        let mut shifted = cand.clone();
        let top = 2 * scale as i64 - 1;
        for s in cand.iter().filter(|s| s[2] == top) {
            shifted.remove(s);
        }
        for s in cand.iter().filter(|s| s[2] == top) {
            shifted.insert([s[0] + 1, s[1], s[2]]);
        }
        let flags = check_sail(&proto, &shifted).unwrap();
        assert!(!flags.banded);
        assert!(!flags.layered_paths);
        assert!(flags.supported && flags.open_shadow && flags.seeded);

        // Remove the two face sites of layer 0: the layer-1 site above them
        // loses both supports and the layer-0 walk no longer starts on the
        // face.
        let mut undercut = cand.clone();
        undercut.remove(&[0, 11, 0]);
        undercut.remove(&[0, 10, 0]);
        let flags = check_sail(&proto, &undercut).unwrap();
        assert!(!flags.supported);
        assert!(!flags.layered_paths);
        assert!(flags.banded && flags.open_shadow);

        // Remove a mid-path site: the walk breaks.
        let mut gappy = cand.clone();
        gappy.remove(&[5, 6, 0]);
        let flags = check_sail(&proto, &gappy).unwrap();
        assert!(!flags.layered_paths);

        // A candidate outside the box is a caller error.
        let mut stray = cand.clone();
        stray.insert([-1, 0, 0]);
        assert!(check_sail(&proto, &stray).is_err());
    }

    #[test]
    fn brick_regions_tile_and_map() {
        let scale = 2u64;
        let brick = Brick::canonical(scale).unwrap();
        let w = brick.window();
        assert_eq!(w.extents(), [8, 32, 64]);
        assert_eq!(
            brick.head().volume() + brick.tail().volume(),
            w.volume()
        );
        assert_eq!(brick.tip().volume(), (4 * scale * 4 * scale * 16 * scale) as usize);
        assert_eq!(brick.base().volume(), (4 * scale * 16 * scale * 16) as usize);
        assert!(w.contains(&brick.distinguished_site()));
        assert!(brick.head().contains(&brick.distinguished_site()));

        // A rotated, shifted brick keeps volumes and maps sites coherently.
        let mut place = all_rotations()[13];
        place.shift = [100, -50, 7];
        let moved = Brick::new(scale, place).unwrap();
        assert_eq!(moved.window().volume(), w.volume());
        for s in [[0i64, 0, 0], [3, 17, 40]] {
            let world = moved.to_world(&s);
            assert!(moved.window().contains(&world));
            assert_eq!(moved.to_canonical(&world), s);
        }
        assert!(moved.head().contains(&moved.distinguished_site()));
    }
}
