//! Sail finders: the constructive boundary pull-back and the exhaustive
//! small-scale search, plus the tip separation check and the whole-brick
//! wrapper.

use std::collections::{HashMap, HashSet, VecDeque};

use crate::config::Configuration;
use crate::curtain::{stabilized_sites_from, ClosedField, Source};
use crate::error::{Error, Result};
use crate::state::SiteState;
use crate::window::BoxWindow;

use super::{
    brick_window, check_sail, layer_paths, member_triple, Brick, ProtoBrick, SailSet, Site3,
};

/// Largest scale the exhaustive finder accepts; the layer-path population
/// explodes combinatorially past this.
pub const EXHAUSTIVE_MAX_SCALE: u64 = 6;

/// Total enumerated layer paths the exhaustive finder tolerates before
/// giving up with a size-guard error.
const PATH_BUDGET: usize = 2_000_000;

/// Result of a sail search on one proto-brick.
#[derive(Debug, Clone, PartialEq)]
pub enum SailOutcome {
    Found(SailSet),
    /// The constructive candidate exists but fails the named conditions.
    Failed { conditions: Vec<&'static str> },
    /// The exhaustive search ruled every candidate out.
    NotFound,
}

impl SailOutcome {
    pub fn is_found(&self) -> bool {
        matches!(self, SailOutcome::Found(_))
    }

    pub fn sail(&self) -> Option<&SailSet> {
        match self {
            SailOutcome::Found(s) => Some(s),
            _ => None,
        }
    }
}

/// A proto-site reads as closed for the reach construction when it fails
/// the (lenient) swell test: some member of its triple lies in the box and
/// is not open. Sites outside the box never read closed, so the search
/// cannot tunnel around the brick.
struct NotSwell<'a> {
    proto: &'a ProtoBrick,
}

impl NotSwell<'_> {
    fn swell(&self, site: &Site3) -> bool {
        let w = self.proto.window();
        member_triple(site)
            .iter()
            .all(|t| !w.contains(t) || self.proto.aux().get(t).is_some_and(|s| s.is_open()))
    }
}

impl ClosedField for NotSwell<'_> {
    fn is_closed(&self, site: &Site3) -> bool {
        self.proto.window().contains(site) && !self.swell(site)
    }
}

/// Pull the reach-set boundary back into the proto-brick: treat non-swell
/// sites as closed, anchor the source half-space at diagonal sum 3L, take
/// the stabilized boundary clipped to the box, and measure the five sail
/// conditions on it.
pub fn find_sail_constructive(proto: &ProtoBrick) -> Result<SailOutcome> {
    let l = proto.scale() as i64;
    let field = NotSwell { proto };
    let source = Source { level: 3 * l };
    let (sites, _margin) = stabilized_sites_from(&field, proto.window(), 8, source)?;
    let flags = check_sail(proto, &sites)?;
    if flags.all() {
        let layers = layer_paths(proto.scale(), &sites).expect("flags verified the path shape");
        Ok(SailOutcome::Found(SailSet {
            scale: proto.scale(),
            layers,
            goodness: flags,
        }))
    } else {
        Ok(SailOutcome::Failed {
            conditions: flags.failed_conditions(),
        })
    }
}

/// One proto layer of the exhaustive search: the admissible (x1, x2)
/// positions (inside the band, lenient-swell) with their bit indices.
struct LayerGrid {
    sites: Vec<(i64, i64)>,
    idx: HashMap<(i64, i64), u32>,
    /// Positions with an occupied auxiliary site directly above.
    seed: Vec<bool>,
}

fn build_grid(proto: &ProtoBrick, field: &NotSwell<'_>, k: i64) -> Result<LayerGrid> {
    let l = proto.scale() as i64;
    let mut sites = Vec::new();
    for x1 in 0..4 * l {
        for x2 in 0..4 * l {
            let s = x1 + x2 + k;
            if 3 * l < s && s < 4 * l && field.swell(&[x1, x2, k]) {
                sites.push((x1, x2));
            }
        }
    }
    if sites.len() > 128 {
        return Err(Error::SizeGuard {
            what: "admissible sites in one proto layer",
            actual: sites.len() as u64,
            limit: 128,
        });
    }
    sites.sort_unstable();
    let idx = sites
        .iter()
        .enumerate()
        .map(|(i, &p)| (p, i as u32))
        .collect();
    let seed = sites
        .iter()
        .map(|&(x1, x2)| {
            proto
                .aux()
                .get(&[x1, x2, k + 1])
                .is_some_and(|s| s.is_occupied())
        })
        .collect();
    Ok(LayerGrid { sites, idx, seed })
}

struct PathRec {
    mask: u128,
    seeded: bool,
}

/// Depth-first enumeration of every oriented path in one layer grid, in
/// lexicographic order of their site sequences: starts sorted by x2, the
/// -e2 child explored before the e1 child, each face-to-face prefix
/// recorded on arrival.
fn enumerate_layer_paths(grid: &LayerGrid, budget: &mut usize) -> Result<Vec<PathRec>> {
    let mut out = Vec::new();
    // Every admissible face site can start a path, whether or not the site
    // above it is admissible: the walk is pred-less within its own set.
    let mut starts: Vec<(i64, i64)> = grid
        .sites
        .iter()
        .copied()
        .filter(|&(x1, _)| x1 == 0)
        .collect();
    starts.sort_unstable_by_key(|&(_, x2)| x2);
    for start in starts {
        let bit = grid.idx[&start];
        dfs(
            grid,
            start,
            1u128 << bit,
            grid.seed[bit as usize],
            2,
            0,
            budget,
            &mut out,
        )?;
    }
    Ok(out)
}

#[allow(clippy::too_many_arguments)]
fn dfs(
    grid: &LayerGrid,
    at: (i64, i64),
    mask: u128,
    seeded: bool,
    last_step: u8,
    run: u32,
    budget: &mut usize,
    out: &mut Vec<PathRec>,
) -> Result<()> {
    if at.1 == 0 {
        if *budget == 0 {
            return Err(Error::SizeGuard {
                what: "enumerated sail layer paths",
                actual: PATH_BUDGET as u64 + 1,
                limit: PATH_BUDGET as u64,
            });
        }
        *budget -= 1;
        out.push(PathRec { mask, seeded });
    }
    // -e2 first, then e1: keeps the emission order lexicographic.
    for (step, next) in [(1u8, (at.0, at.1 - 1)), (0u8, (at.0 + 1, at.1))] {
        let next_run = if step == last_step { run + 1 } else { 1 };
        if next_run >= 3 {
            continue;
        }
        if let Some(&bit) = grid.idx.get(&next) {
            dfs(
                grid,
                next,
                mask | (1u128 << bit),
                seeded || grid.seed[bit as usize],
                step,
                next_run,
                budget,
                out,
            )?;
        }
    }
    Ok(())
}

/// Positions a layer-(k+1) member may take given the layer-k path `mask`:
/// directly above a member or diagonally above at (-1, -1). The maps carry
/// layer-k bits into layer-(k+1) bit space.
fn cover_mask(mask: u128, same: &[Option<u32>], diag: &[Option<u32>]) -> u128 {
    let mut cover = 0u128;
    let mut m = mask;
    while m != 0 {
        let b = m.trailing_zeros() as usize;
        m &= m - 1;
        if let Some(t) = same[b] {
            cover |= 1u128 << t;
        }
        if let Some(t) = diag[b] {
            cover |= 1u128 << t;
        }
    }
    cover
}

/// Exhaustive sail search at small scale: enumerate every admissible
/// oriented path per layer, keep the paths extensible to the top through
/// the support relation, and read out the lexicographically least stack.
/// The scale guard and the path budget are hard errors, not misses.
pub fn find_sail_exhaustive(proto: &ProtoBrick) -> Result<SailOutcome> {
    let scale = proto.scale();
    if scale > EXHAUSTIVE_MAX_SCALE {
        return Err(Error::SizeGuard {
            what: "exhaustive sail search scale",
            actual: scale,
            limit: EXHAUSTIVE_MAX_SCALE,
        });
    }
    let layers = 2 * scale as i64;
    let field = NotSwell { proto };
    let mut grids = Vec::with_capacity(layers as usize);
    for k in 0..layers {
        grids.push(build_grid(proto, &field, k)?);
    }
    let mut budget = PATH_BUDGET;
    let mut paths: Vec<Vec<PathRec>> = Vec::with_capacity(layers as usize);
    for grid in &grids {
        let recs = enumerate_layer_paths(grid, &mut budget)?;
        if recs.is_empty() {
            return Ok(SailOutcome::NotFound);
        }
        paths.push(recs);
    }

    // Bit maps from each layer into the next for the support relation.
    let mut same_maps = Vec::new();
    let mut diag_maps = Vec::new();
    for k in 0..layers as usize - 1 {
        let (lo, hi) = (&grids[k], &grids[k + 1]);
        let same: Vec<Option<u32>> = lo.sites.iter().map(|p| hi.idx.get(p).copied()).collect();
        let diag: Vec<Option<u32>> = lo
            .sites
            .iter()
            .map(|&(x1, x2)| hi.idx.get(&(x1 - 1, x2 - 1)).copied())
            .collect();
        same_maps.push(same);
        diag_maps.push(diag);
    }

    // feasible[k]: indices of layer-k paths extensible to the top layer,
    // in the enumeration (lexicographic) order.
    let top = layers as usize - 1;
    let mut feasible: Vec<Vec<usize>> = vec![Vec::new(); layers as usize];
    feasible[top] = (0..paths[top].len()).collect();
    for k in (0..top).rev() {
        let mut keep = Vec::new();
        for (i, rec) in paths[k].iter().enumerate() {
            if !rec.seeded {
                continue;
            }
            let cover = cover_mask(rec.mask, &same_maps[k], &diag_maps[k]);
            if feasible[k + 1]
                .iter()
                .any(|&j| paths[k + 1][j].mask & !cover == 0)
            {
                keep.push(i);
            }
        }
        if keep.is_empty() {
            return Ok(SailOutcome::NotFound);
        }
        feasible[k] = keep;
    }

    // Lexicographically least stack: least feasible bottom path, then at
    // each layer the least feasible continuation supported by the choice
    // below.
    let mut chosen = vec![feasible[0][0]];
    for k in 0..top {
        let cover = cover_mask(paths[k][chosen[k]].mask, &same_maps[k], &diag_maps[k]);
        let next = feasible[k + 1]
            .iter()
            .copied()
            .find(|&j| paths[k + 1][j].mask & !cover == 0)
            .expect("feasibility of the layer below guarantees a continuation");
        chosen.push(next);
    }

    let mut sites: HashSet<Site3> = HashSet::new();
    for (k, &i) in chosen.iter().enumerate() {
        let mut m = paths[k][i].mask;
        while m != 0 {
            let b = m.trailing_zeros() as usize;
            m &= m - 1;
            let (x1, x2) = grids[k].sites[b];
            sites.insert([x1, x2, k as i64]);
        }
    }
    let flags = check_sail(proto, &sites)?;
    debug_assert!(flags.all(), "exhaustive stack violates {:?}", flags.failed_conditions());
    let layer_walks = layer_paths(scale, &sites).expect("stack layers are oriented paths");
    Ok(SailOutcome::Found(SailSet {
        scale,
        layers: layer_walks,
        goodness: flags,
    }))
}

/// Does the expanded sail cut the brick tip? Flood-fills the tip minus the
/// scaled sail sites from the x1 = 0 face and reports whether the opposite
/// face stays unreachable. Separation is placement-invariant, so the check
/// runs in canonical coordinates whatever the brick's isometry.
pub fn separation_check(sail: &SailSet, brick: &Brick) -> bool {
    assert_eq!(sail.scale, brick.scale, "sail and brick scales must agree");
    let l = sail.scale;
    let tip = BoxWindow::cube3([0, 0, 16 * l as i64], [4 * l, 4 * l, 16 * l])
        .expect("valid tip box");
    let mut blocked = vec![false; tip.volume()];
    for s in sail.scaled_sites() {
        if let Some(i) = tip.index_of(&s) {
            blocked[i] = true;
        }
    }
    let mut seen = vec![false; tip.volume()];
    let mut queue = VecDeque::new();
    let o = tip.origin().to_vec();
    let e = tip.extents().to_vec();
    for y in o[1]..o[1] + e[1] as i64 {
        for z in o[2]..o[2] + e[2] as i64 {
            let site = [o[0], y, z];
            let i = tip.index_of(&site).unwrap();
            if !blocked[i] && !seen[i] {
                seen[i] = true;
                queue.push_back(site);
            }
        }
    }
    let far = o[0] + e[0] as i64 - 1;
    while let Some(site) = queue.pop_front() {
        if site[0] == far {
            return false;
        }
        for axis in 0..3 {
            for dir in [-1i64, 1] {
                let mut n = site;
                n[axis] += dir;
                if let Some(i) = tip.index_of(&n) {
                    if !blocked[i] && !seen[i] {
                        seen[i] = true;
                        queue.push_back(n);
                    }
                }
            }
        }
    }
    true
}

/// Whole-brick judgement: pull the configuration back to the canonical
/// box through the brick placement, collapse to the proto-brick, and run
/// the constructive finder, falling back to the exhaustive one at small
/// scale. The returned sail lives in canonical proto coordinates.
pub fn good_brick(cfg: &Configuration, brick: &Brick) -> Result<SailOutcome> {
    if *cfg.window() != brick.window() {
        return Err(Error::Parameter(
            "configuration window does not match the brick box".into(),
        ));
    }
    let bw = brick_window(brick.scale);
    let mut canonical = Configuration::filled(bw.clone(), SiteState::OpenVacant);
    for s in bw.iter_sites() {
        let world = brick.to_world(&[s[0], s[1], s[2]]);
        let state = cfg.get(&world).expect("brick window images stay inside");
        canonical.set(&s, state);
    }
    canonical.set_meta(cfg.meta());
    let proto = ProtoBrick::from_brick(&canonical)?;
    let outcome = find_sail_constructive(&proto)?;
    if outcome.is_found() || brick.scale > EXHAUSTIVE_MAX_SCALE {
        return Ok(outcome);
    }
    find_sail_exhaustive(&proto)
}
