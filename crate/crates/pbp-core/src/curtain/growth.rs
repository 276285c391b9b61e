//! Growth on a curtain under the modified rule at threshold two.
//!
//! The spread argument: once a layer's guaranteed zone is occupied, the row
//! directly above it is an open path whose every site has an occupied site
//! below, so one occupied seed in it ignites the whole row; the sites one
//! (1,1,0) step behind that row are then reached by short axis chains. A
//! finite window truncates the chains near the path ends, so the guaranteed
//! zone shrinks slightly with each layer; the experiment tracks the zones
//! explicitly and the guarantee is exact on them.

use std::collections::HashSet;

use crate::config::Configuration;
use crate::dynamics::{run_fixpoint, BoundaryPolicy, Rule, NEVER};
use crate::error::{Error, Result};
use crate::state::SiteState;

use super::{Curtain, Site3};

#[derive(Debug, Clone)]
pub struct PreconditionFailure {
    pub hypothesis: String,
    pub site: Option<Site3>,
}

#[derive(Debug, Clone)]
pub struct LayerGrowth {
    pub k: i64,
    /// Sites of the layer's guaranteed zone, in path order.
    pub zone: Vec<Site3>,
    pub path_len: usize,
    /// Every zone site occupied at the fixpoint.
    pub fully_occupied: bool,
}

#[derive(Debug, Clone)]
pub struct GrowthReport {
    pub failure: Option<PreconditionFailure>,
    pub layers: Vec<LayerGrowth>,
    pub all_zones_occupied: bool,
    pub rounds_elapsed: u32,
}

fn fail(hypothesis: &str, site: Option<Site3>) -> GrowthReport {
    GrowthReport {
        failure: Some(PreconditionFailure {
            hypothesis: hypothesis.to_string(),
            site,
        }),
        layers: Vec::new(),
        all_zones_occupied: false,
        rounds_elapsed: 0,
    }
}

fn open_at(cfg: &Configuration, site: &Site3) -> bool {
    matches!(
        cfg.get(site),
        Some(SiteState::OpenVacant) | Some(SiteState::Occupied)
    )
}

pub fn curtain_growth_experiment(
    curtain: &Curtain,
    cfg: &Configuration,
    k_max: i64,
) -> Result<GrowthReport> {
    if cfg.window() != &curtain.window {
        return Err(Error::Parameter(
            "growth experiment needs the configuration on the curtain's window".into(),
        ));
    }
    if k_max < 0 {
        return Err(Error::Parameter("k_max must be nonnegative".into()));
    }

    // structural layers 0..=k_max
    let mut paths: Vec<&[Site3]> = Vec::new();
    for k in 0..=k_max {
        match curtain.layer(k) {
            Some(l) if !l.broken && !l.path.is_empty() => paths.push(&l.path),
            _ => {
                return Ok(fail(
                    &format!("curtain layer {k} assembled inside the window"),
                    None,
                ))
            }
        }
    }

    // bottom layer fully occupied
    for x in paths[0] {
        if cfg.get(x) != Some(SiteState::Occupied) {
            return Ok(fail("bottom layer initially occupied", Some(*x)));
        }
    }

    // zone recursion; openness hypotheses are checked exactly where the
    // spread argument uses them, so lateral window truncation of the paths
    // does not produce spurious failures
    let mut zones: Vec<Vec<Site3>> = vec![paths[0].to_vec()];
    for k in 0..k_max {
        let zone = &zones[k as usize];
        for x in zone {
            if !open_at(cfg, x) {
                return Ok(fail("curtain site open", Some(*x)));
            }
            let up = [x[0], x[1], x[2] + 1];
            if !curtain.window.contains(&up) {
                return Ok(fail("site above the curtain inside the window", Some(up)));
            }
            if !open_at(cfg, &up) {
                return Ok(fail("site above the curtain open", Some(up)));
            }
            let diag = [x[0] - 1, x[1] - 1, x[2] + 1];
            if curtain.window.contains(&diag) && !open_at(cfg, &diag) {
                return Ok(fail("site above the curtain open", Some(diag)));
            }
        }
        let row: Vec<Site3> = zone.iter().map(|x| [x[0], x[1], x[2] + 1]).collect();
        let row_set: HashSet<Site3> = row.iter().copied().collect();
        // the row above the zone needs an initially occupied seed
        if !row.iter().any(|s| cfg.get(s) == Some(SiteState::Occupied)) {
            return Ok(fail(
                &format!("occupied seed above layer {k} within the guaranteed zone"),
                None,
            ));
        }
        // sites one (1,1,0) behind the row, reached via e1/e2 chains
        let mut behind: HashSet<Site3> = HashSet::new();
        for y in &row {
            let z = [y[0] - 1, y[1] - 1, y[2]];
            if row_set.contains(&z) || behind.contains(&z) {
                continue;
            }
            if qualifies(&z, &row_set, cfg, curtain) {
                behind.insert(z);
            }
        }
        let next_path = paths[(k + 1) as usize];
        let covered: Vec<bool> = next_path
            .iter()
            .map(|s| row_set.contains(s) || behind.contains(s))
            .collect();
        zones.push(longest_run(next_path, &covered));
    }

    let result = run_fixpoint(cfg, Rule::modified(2), &BoundaryPolicy::ClosedOutside)?;
    let mut layers = Vec::new();
    let mut all = true;
    for (k, zone) in zones.iter().enumerate() {
        let fully = zone
            .iter()
            .all(|s| result.round_of(s).map(|r| r != NEVER).unwrap_or(false));
        all &= fully;
        layers.push(LayerGrowth {
            k: k as i64,
            zone: zone.clone(),
            path_len: paths[k].len(),
            fully_occupied: fully,
        });
    }
    Ok(GrowthReport {
        failure: None,
        layers,
        all_zones_occupied: all,
        rounds_elapsed: result.rounds_elapsed,
    })
}

/// Can z (one (1,1,0) step behind the occupied row) be reached? It needs a
/// row site within three steps along +e1 and along +e2; the sites in
/// between must be open in-window and flanked by the row on the other axis,
/// so each chain link fires with two distinct occupied directions.
fn qualifies(
    z: &Site3,
    row: &HashSet<Site3>,
    cfg: &Configuration,
    curtain: &Curtain,
) -> bool {
    if !curtain.window.contains(z) || !open_at(cfg, z) {
        return false;
    }
    for (axis, flank) in [(0usize, 1usize), (1, 0)] {
        let mut reach = None;
        for a in 1..=3i64 {
            let mut s = *z;
            s[axis] += a;
            if row.contains(&s) {
                reach = Some(a);
                break;
            }
        }
        let Some(a) = reach else { return false };
        for i in 1..a {
            let mut w = *z;
            w[axis] += i;
            if !curtain.window.contains(&w) || !open_at(cfg, &w) {
                return false;
            }
            let mut up = w;
            up[flank] += 1;
            let mut down = w;
            down[flank] -= 1;
            if !row.contains(&up) && !row.contains(&down) {
                return false;
            }
        }
    }
    true
}

/// Longest contiguous covered stretch of the path, in path order.
fn longest_run(path: &[Site3], covered: &[bool]) -> Vec<Site3> {
    let mut best = (0usize, 0usize);
    let mut start = None;
    for (i, &c) in covered.iter().enumerate() {
        match (c, start) {
            (true, None) => start = Some(i),
            (false, Some(s)) => {
                if i - s > best.1 - best.0 {
                    best = (s, i);
                }
                start = None;
            }
            _ => {}
        }
    }
    if let Some(s) = start {
        if covered.len() - s > best.1 - best.0 {
            best = (s, covered.len());
        }
    }
    path[best.0..best.1].to_vec()
}
