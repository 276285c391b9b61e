//! Bootstrap dynamics: standard and modified rules, boundary policies, and
//! two fixpoint engines (frontier queue and brute-force sweeps).
//!
//! Closed sites never change state; occupied sites stay occupied. A vacant
//! open site becomes occupied in the next synchronous round when the rule
//! fires on its current neighborhood.

mod blocking;
mod phi;

pub use blocking::{blocked_certificate, BlockedOutcome, Certificate};
pub use phi::{origin_occupied_estimate, EstimateResult, PhiParams};

use crate::config::Configuration;
use crate::error::{Error, Result};
use crate::state::SiteState;
use crate::window::BoxWindow;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
pub enum RuleKind {
    /// Fire when at least r of the 2d lattice neighbors are occupied.
    Standard,
    /// Fire when at least r coordinate directions i have x - e_i or x + e_i
    /// occupied.
    Modified,
}

impl RuleKind {
    pub fn name(self) -> &'static str {
        match self {
            RuleKind::Standard => "standard",
            RuleKind::Modified => "modified",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Rule {
    pub kind: RuleKind,
    /// Threshold r. Zero and oversized values are accepted: r = 0 occupies
    /// every open site in round one, r beyond the neighbor budget never fires.
    pub threshold: u32,
}

impl Rule {
    pub fn standard(r: u32) -> Rule {
        Rule {
            kind: RuleKind::Standard,
            threshold: r,
        }
    }

    pub fn modified(r: u32) -> Rule {
        Rule {
            kind: RuleKind::Modified,
            threshold: r,
        }
    }
}

/// What the dynamics sees just outside the window.
#[derive(Debug, Clone)]
pub enum BoundaryPolicy {
    /// Everything outside is closed; growth is window-internal. The
    /// conservative default: any occupation it produces is a lower bound for
    /// the infinite-lattice dynamics.
    ClosedOutside,
    /// Outside sites with coordinate `axis` at most `level` count as
    /// occupied; all other outside sites are closed. Realizes a fully
    /// occupied half-space feeding the window.
    OccupiedLowerHalfSpace { axis: usize, level: i64 },
    /// Explicit states on the one-site frame around the window. The carried
    /// configuration must live on the window grown by one; its interior is
    /// ignored.
    CustomFrame(Configuration),
}

impl BoundaryPolicy {
    fn validate(&self, window: &BoxWindow) -> Result<()> {
        match self {
            BoundaryPolicy::ClosedOutside => Ok(()),
            BoundaryPolicy::OccupiedLowerHalfSpace { axis, .. } => {
                if *axis >= window.dim() {
                    return Err(Error::Parameter(format!(
                        "half-space axis {axis} out of range for d = {}",
                        window.dim()
                    )));
                }
                Ok(())
            }
            BoundaryPolicy::CustomFrame(frame) => {
                let want = window.grown(1)?;
                if frame.window() != &want {
                    return Err(Error::Parameter(
                        "custom frame must live on the window grown by one".into(),
                    ));
                }
                Ok(())
            }
        }
    }

    /// Is an out-of-window site occupied under this policy?
    fn outside_occupied(&self, site: &[i64]) -> bool {
        match self {
            BoundaryPolicy::ClosedOutside => false,
            BoundaryPolicy::OccupiedLowerHalfSpace { axis, level } => site[*axis] <= *level,
            BoundaryPolicy::CustomFrame(frame) => frame
                .get(site)
                .map(|s| s.is_occupied())
                .unwrap_or(false),
        }
    }
}

/// Round index for sites that never become occupied.
pub const NEVER: u32 = u32::MAX;

#[derive(Debug, Clone)]
pub struct EvolutionResult {
    pub final_config: Configuration,
    /// Per site (window index order): the synchronous round at which the site
    /// became occupied; 0 for initially occupied, `NEVER` otherwise.
    pub rounds: Vec<u32>,
    /// Last round that occupied a new site.
    pub rounds_elapsed: u32,
}

impl EvolutionResult {
    pub fn round_of(&self, site: &[i64]) -> Option<u32> {
        self.final_config
            .window()
            .index_of(site)
            .map(|i| self.rounds[i])
    }

    pub fn occupied_count(&self) -> usize {
        self.rounds.iter().filter(|&&r| r != NEVER).count()
    }
}

struct Geometry {
    ext: Vec<usize>,
    stride: Vec<usize>,
}

impl Geometry {
    fn new(window: &BoxWindow) -> Geometry {
        let ext: Vec<usize> = window.extents().iter().map(|&e| e as usize).collect();
        let mut stride = Vec::with_capacity(ext.len());
        let mut s = 1usize;
        for &e in &ext {
            stride.push(s);
            s *= e;
        }
        Geometry { ext, stride }
    }

    #[inline]
    fn coord(&self, idx: usize, axis: usize) -> usize {
        (idx / self.stride[axis]) % self.ext[axis]
    }

    fn is_frame(&self, idx: usize) -> bool {
        (0..self.ext.len()).any(|a| {
            let c = self.coord(idx, a);
            c == 0 || c == self.ext[a] - 1
        })
    }
}

fn check_rule_window(window: &BoxWindow) -> Result<()> {
    if window.dim() > 32 {
        return Err(Error::Unsupported(
            "dynamics supports dimension at most 32".into(),
        ));
    }
    Ok(())
}

/// Frontier-queue engine. Maintains per-site occupied-neighbor counters
/// (standard rule) or per-direction flags (modified rule) and processes
/// synchronous rounds until no site fires.
pub fn run_fixpoint(
    cfg: &Configuration,
    rule: Rule,
    boundary: &BoundaryPolicy,
) -> Result<EvolutionResult> {
    let window = cfg.window();
    check_rule_window(window)?;
    boundary.validate(window)?;
    let d = window.dim();
    let volume = window.volume();
    let geo = Geometry::new(window);
    let r = rule.threshold;

    let mut out = cfg.clone();
    let mut rounds = vec![NEVER; volume];

    // support[i]: occupied-neighbor count (standard) or direction bitmask
    // (modified) accumulated so far for vacant site i
    let mut support = vec![0u32; volume];

    let mut frontier: Vec<usize> = Vec::new();
    for idx in 0..volume {
        if cfg.get_idx(idx).is_occupied() {
            rounds[idx] = 0;
            frontier.push(idx);
        }
    }

    // r = 0 fires unconditionally on open vacant sites
    if r == 0 {
        let mut last_round = 0;
        for idx in 0..volume {
            if cfg.get_idx(idx) == SiteState::OpenVacant {
                rounds[idx] = 1;
                out.set_idx(idx, SiteState::Occupied);
                last_round = 1;
            }
        }
        return Ok(EvolutionResult {
            final_config: out,
            rounds,
            rounds_elapsed: last_round,
        });
    }

    // Static boundary support for frame sites. Sites fired by boundary
    // support alone become occupied at round one; they are queued separately
    // so they join the frontier of round one, not round zero.
    let mut boundary_fired: Vec<usize> = Vec::new();
    if !matches!(boundary, BoundaryPolicy::ClosedOutside) {
        let mut site = Vec::with_capacity(d);
        for idx in 0..volume {
            if !geo.is_frame(idx) || cfg.get_idx(idx) != SiteState::OpenVacant {
                continue;
            }
            site.clear();
            site.extend(window.site_of(idx));
            for axis in 0..d {
                let c = geo.coord(idx, axis);
                let mut hit = |delta: i64| {
                    site[axis] += delta;
                    let occ = boundary.outside_occupied(&site);
                    site[axis] -= delta;
                    occ
                };
                let mut dir_occupied = false;
                if c == 0 && hit(-1) {
                    dir_occupied = true;
                    if rule.kind == RuleKind::Standard {
                        support[idx] += 1;
                    }
                }
                if c == geo.ext[axis] - 1 && hit(1) {
                    dir_occupied = true;
                    if rule.kind == RuleKind::Standard {
                        support[idx] += 1;
                    }
                }
                if rule.kind == RuleKind::Modified && dir_occupied {
                    support[idx] |= 1 << axis;
                }
            }
            let level = match rule.kind {
                RuleKind::Standard => support[idx],
                RuleKind::Modified => support[idx].count_ones(),
            };
            if level >= r {
                rounds[idx] = 1;
                out.set_idx(idx, SiteState::Occupied);
                boundary_fired.push(idx);
            }
        }
    }

    let mut rounds_elapsed = 0u32;
    let mut current = frontier;
    let mut t = 0u32;
    loop {
        let mut next: Vec<usize> = Vec::new();
        for &idx in &current {
            for axis in 0..d {
                let c = geo.coord(idx, axis);
                for (step, ok) in [
                    (-(geo.stride[axis] as isize), c > 0),
                    (geo.stride[axis] as isize, c + 1 < geo.ext[axis]),
                ] {
                    if !ok {
                        continue;
                    }
                    let n = (idx as isize + step) as usize;
                    if cfg.get_idx(n) != SiteState::OpenVacant || rounds[n] != NEVER {
                        continue;
                    }
                    let fired = match rule.kind {
                        RuleKind::Standard => {
                            support[n] += 1;
                            support[n] >= r
                        }
                        RuleKind::Modified => {
                            support[n] |= 1 << axis;
                            support[n].count_ones() >= r
                        }
                    };
                    if fired {
                        rounds[n] = t + 1;
                        next.push(n);
                    }
                }
            }
        }
        for &idx in &next {
            out.set_idx(idx, SiteState::Occupied);
        }
        if t == 0 {
            next.append(&mut boundary_fired);
        }
        if next.is_empty() {
            break;
        }
        rounds_elapsed = t + 1;
        current = next;
        t += 1;
    }

    Ok(EvolutionResult {
        final_config: out,
        rounds,
        rounds_elapsed,
    })
}

const BRUTE_FORCE_MAX_VOLUME: u64 = 1_000_000;

/// Reference engine: full synchronous sweeps with per-site recounts.
/// Deliberately simple; guards its volume.
pub fn brute_force_fixpoint(
    cfg: &Configuration,
    rule: Rule,
    boundary: &BoundaryPolicy,
) -> Result<EvolutionResult> {
    let window = cfg.window();
    check_rule_window(window)?;
    boundary.validate(window)?;
    let volume = window.volume();
    if volume as u64 > BRUTE_FORCE_MAX_VOLUME {
        return Err(Error::SizeGuard {
            what: "brute force volume",
            actual: volume as u64,
            limit: BRUTE_FORCE_MAX_VOLUME,
        });
    }
    let d = window.dim();
    let r = rule.threshold;

    let mut occupied: Vec<bool> = (0..volume).map(|i| cfg.get_idx(i).is_occupied()).collect();
    let mut rounds = vec![NEVER; volume];
    for idx in 0..volume {
        if occupied[idx] {
            rounds[idx] = 0;
        }
    }

    let mut t = 0u32;
    loop {
        let mut fired: Vec<usize> = Vec::new();
        let mut site = Vec::with_capacity(d);
        for idx in 0..volume {
            if occupied[idx] || cfg.get_idx(idx) != SiteState::OpenVacant {
                continue;
            }
            site.clear();
            site.extend(window.site_of(idx));
            let mut count = 0u32;
            let mut dirs = 0u32;
            for axis in 0..d {
                for delta in [-1i64, 1] {
                    site[axis] += delta;
                    let neighbor_occupied = match window.index_of(&site) {
                        Some(n) => occupied[n],
                        None => boundary.outside_occupied(&site),
                    };
                    site[axis] -= delta;
                    if neighbor_occupied {
                        count += 1;
                        dirs |= 1 << axis;
                    }
                }
            }
            let fires = match rule.kind {
                RuleKind::Standard => count >= r,
                RuleKind::Modified => dirs.count_ones() >= r,
            };
            if fires {
                fired.push(idx);
            }
        }
        if fired.is_empty() {
            break;
        }
        t += 1;
        for &idx in &fired {
            occupied[idx] = true;
            rounds[idx] = t;
        }
    }

    let mut out = cfg.clone();
    for idx in 0..volume {
        if occupied[idx] {
            out.set_idx(idx, SiteState::Occupied);
        }
    }
    Ok(EvolutionResult {
        final_config: out,
        rounds,
        rounds_elapsed: t,
    })
}
