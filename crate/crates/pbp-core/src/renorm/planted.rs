//! Hand-planted demo fixtures: deterministic configurations on which bricks
//! are good by construction, used by the activation demos and tests.

use std::collections::HashSet;

use crate::config::Configuration;
use crate::error::Result;
use crate::sail::{cell_sites, proto_window, Brick, Site3};
use crate::state::SiteState;
use crate::window::BoxWindow;

use super::{brick_successors, hull};

/// The widest staircase per layer (both admissible antidiagonals), the set
/// the constructive finder recovers on a clean background.
pub fn staircase_sites(scale: u64) -> Vec<Site3> {
    let l = scale as i64;
    let mut out = Vec::new();
    for k in 0..2 * l {
        let hi = 4 * l - 1 - k;
        for j in 0..=hi {
            out.push([j, hi - j, k]);
            if hi - 1 - j >= 0 {
                out.push([j, hi - 1 - j, k]);
            }
        }
    }
    out
}

/// Proto seed sites: one occupied cell directly above every staircase layer
/// but the top.
pub fn seed_sites(scale: u64) -> Vec<Site3> {
    let l = scale as i64;
    (0..2 * l - 1).map(|k| [1, 4 * l - 2 - k, k + 1]).collect()
}

/// World sites whose occupation makes a placed brick good on an otherwise
/// open background: the full cells of the proto seeds.
pub fn planted_seed_cells(brick: &Brick) -> Vec<Site3> {
    let w = proto_window(brick.scale);
    seed_sites(brick.scale)
        .into_iter()
        .inspect(|x| debug_assert!(w.contains(x)))
        .flat_map(|x| cell_sites(&x))
        .map(|s| brick.to_world(&s))
        .collect()
}

/// All-open configuration on `window` with every listed brick planted good.
pub fn planted_config(window: &BoxWindow, bricks: &[&Brick]) -> Configuration {
    let mut cfg = Configuration::filled(window.clone(), SiteState::OpenVacant);
    let mut seeds: HashSet<Site3> = HashSet::new();
    for b in bricks {
        seeds.extend(planted_seed_cells(b));
    }
    for s in seeds {
        cfg.set(&s, SiteState::Occupied);
    }
    cfg
}

/// Canonical brick, its `choice`-th successor, and a planted configuration
/// on their joint hull where both bricks are good.
pub fn planted_pair(scale: u64, choice: usize) -> Result<(Configuration, Brick, Brick)> {
    let pred = Brick::canonical(scale)?;
    let succ = brick_successors(&pred)
        .into_iter()
        .nth(choice)
        .ok_or_else(|| {
            crate::error::Error::Parameter(format!(
                "successor choice {choice} out of range, a brick has 8 successors"
            ))
        })?;
    let window = hull(&pred.window(), &succ.window())?;
    let cfg = planted_config(&window, &[&pred, &succ]);
    Ok((cfg, pred, succ))
}
