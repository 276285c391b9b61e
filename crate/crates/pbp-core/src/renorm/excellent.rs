//! The renormalized site field on Z^2: a site is excellent when all seven
//! bricks of its translated gadget are good, so occupation can be steered
//! from the site to either oriented neighbor. Oriented paths of excellent
//! sites are the percolation backbone, and the nucleation experiment walks
//! one such path from a fully occupied brick back to the origin.

use rayon::prelude::*;

use crate::config::{Configuration, FieldSource};
use crate::coupling::{CouplingSource, STREAM_V};
use crate::error::{Error, Result};
use crate::sail::{good_brick, Brick, Site3};
use crate::state::SiteState;
use crate::window::BoxWindow;

use super::gadget::{build_gadget, Gadget, GADGET_SHIFT, GADGET_SHIFT_ALT};
use super::{activation_experiment, scaled_shift, ActivationReport};

/// World translation attached to a renormalized site: `a1` steps of the
/// primary gadget shift plus `a2` steps of the alternate one.
fn site_shift(scale: u64, site: &[i64; 2]) -> Site3 {
    let [a1, a2] = *site;
    let mut units = [0i64; 3];
    for i in 0..3 {
        units[i] = a1 * GADGET_SHIFT[i] + a2 * GADGET_SHIFT_ALT[i];
    }
    scaled_shift(scale, &units)
}

fn gadget_at(gadget: &Gadget, site: &[i64; 2]) -> Gadget {
    gadget.translated(&site_shift(gadget.scale, site))
}

/// Boolean field over a two-dimensional window.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExcellentField {
    window: BoxWindow,
    flags: Vec<bool>,
    scale: u64,
}

impl ExcellentField {
    pub fn from_flags(window: BoxWindow, flags: Vec<bool>, scale: u64) -> Result<ExcellentField> {
        if window.dim() != 2 {
            return Err(Error::Geometry(format!(
                "excellent fields live on two-dimensional windows, got dimension {}",
                window.dim()
            )));
        }
        if flags.len() != window.volume() {
            return Err(Error::Parameter(format!(
                "{} flags for a window of volume {}",
                flags.len(),
                window.volume()
            )));
        }
        Ok(ExcellentField {
            window,
            flags,
            scale,
        })
    }

    /// Independent Bernoulli flags. Useful as a stand-in for the real field
    /// when only the percolation layer is under test.
    pub fn bernoulli(window: BoxWindow, density: f64, src: CouplingSource) -> Result<ExcellentField> {
        if !(0.0..=1.0).contains(&density) {
            return Err(Error::Parameter(format!("density {density} outside [0, 1]")));
        }
        let flags = window
            .iter_sites()
            .map(|s| src.uniform(&s, STREAM_V) < density)
            .collect();
        // Scale zero marks a synthetic field with no bricks behind it.
        ExcellentField::from_flags(window, flags, 0)
    }

    pub fn window(&self) -> &BoxWindow {
        &self.window
    }

    pub fn scale(&self) -> u64 {
        self.scale
    }

    /// False outside the window.
    pub fn is_excellent(&self, site: &[i64; 2]) -> bool {
        self.window
            .index_of(&site[..])
            .is_some_and(|i| self.flags[i])
    }

    pub fn count(&self) -> usize {
        self.flags.iter().filter(|f| **f).count()
    }

    /// Flags in window iteration order.
    pub fn flags(&self) -> &[bool] {
        &self.flags
    }
}

fn contains_window(outer: &BoxWindow, inner: &BoxWindow) -> bool {
    let hi: Vec<i64> = inner.upper().iter().map(|u| u - 1).collect();
    outer.contains(inner.origin()) && outer.contains(&hi)
}

/// Evaluate excellence over `window` against a samplable environment. Each
/// site is independent work, so the sweep runs in parallel.
pub fn excellent_field_from<F>(field: &F, scale: u64, window: &BoxWindow) -> Result<ExcellentField>
where
    F: FieldSource + Sync,
{
    if window.dim() != 2 {
        return Err(Error::Geometry(format!(
            "excellent fields live on two-dimensional windows, got dimension {}",
            window.dim()
        )));
    }
    let gadget = build_gadget(scale)?;
    let sites: Vec<Vec<i64>> = window.iter_sites().collect();
    let flags = sites
        .par_iter()
        .map(|a| {
            let g = gadget_at(&gadget, &[a[0], a[1]]);
            for brick in g.bricks() {
                let local = Configuration::from_field(brick.window(), field);
                if !good_brick(&local, brick)?.is_found() {
                    return Ok(false);
                }
            }
            Ok(true)
        })
        .collect::<Result<Vec<bool>>>()?;
    ExcellentField::from_flags(window.clone(), flags, scale)
}

struct ConfigSource<'a> {
    cfg: &'a Configuration,
}

impl FieldSource for ConfigSource<'_> {
    fn state(&self, site: &[i64]) -> SiteState {
        self.cfg.get(site).unwrap_or(SiteState::Closed)
    }
}

/// Smallest three-dimensional box containing every gadget brick of every
/// site in a two-dimensional window, which is the configuration a caller
/// must supply to evaluate excellence there.
pub fn nucleation_window(scale: u64, window: &BoxWindow) -> Result<BoxWindow> {
    if window.dim() != 2 {
        return Err(Error::Geometry(format!(
            "excellent fields live on two-dimensional windows, got dimension {}",
            window.dim()
        )));
    }
    let gadget = build_gadget(scale)?;
    let mut lo = [i64::MAX; 3];
    let mut hi = [i64::MIN; 3];
    for a in window.iter_sites() {
        let g = gadget_at(&gadget, &[a[0], a[1]]);
        for brick in g.bricks() {
            let bw = brick.window();
            let up = bw.upper();
            for axis in 0..3 {
                lo[axis] = lo[axis].min(bw.origin()[axis]);
                hi[axis] = hi[axis].max(up[axis]);
            }
        }
    }
    if lo[0] > hi[0] {
        return Err(Error::Parameter("window holds no sites".into()));
    }
    let extents: Vec<u64> = (0..3).map(|a| (hi[a] - lo[a]) as u64).collect();
    BoxWindow::new(lo.to_vec(), extents)
}

/// As `excellent_field_from`, reading states out of a concrete
/// configuration. Every gadget window of every site must fit inside the
/// configuration's window; partial information is not guessed around.
pub fn excellent_field(
    cfg: &Configuration,
    scale: u64,
    window: &BoxWindow,
) -> Result<ExcellentField> {
    let gadget = build_gadget(scale)?;
    for a in window.iter_sites() {
        let g = gadget_at(&gadget, &[a[0], a[1]]);
        for brick in g.bricks() {
            let bw = brick.window();
            if !contains_window(cfg.window(), &bw) {
                return Err(Error::Parameter(format!(
                    "gadget brick window {:?}+{:?} for site {a:?} leaves the configuration window",
                    bw.origin(),
                    bw.extents()
                )));
            }
        }
    }
    excellent_field_from(&ConfigSource { cfg }, scale, window)
}

/// Oriented connectivity of one site inside an excellent field.
#[derive(Debug, Clone)]
pub struct PathReport {
    pub from: [i64; 2],
    /// Sites on the longest oriented path starting at `from` (0 when the
    /// site itself is not excellent).
    pub forward_length: usize,
    /// Number of sites that reach `from` along oriented steps.
    pub backward_sites: usize,
    /// Does an oriented excellent path through `from` cross the window,
    /// entering at a low edge and leaving at a high one?
    pub spans: bool,
    /// A longest oriented path starting at `from`.
    pub forward_path: Vec<[i64; 2]>,
    /// A longest oriented path ending at `from`, listed far end first.
    pub backward_path: Vec<[i64; 2]>,
}

const STEPS: [[i64; 2]; 2] = [[0, 1], [1, 0]];

fn reachable(
    field: &ExcellentField,
    from: [i64; 2],
    forward: bool,
) -> std::collections::HashSet<[i64; 2]> {
    let mut seen = std::collections::HashSet::new();
    if !field.is_excellent(&from) {
        return seen;
    }
    let mut stack = vec![from];
    seen.insert(from);
    while let Some(site) = stack.pop() {
        for step in STEPS {
            let sign = if forward { 1 } else { -1 };
            let next = [site[0] + sign * step[0], site[1] + sign * step[1]];
            if field.is_excellent(&next) && seen.insert(next) {
                stack.push(next);
            }
        }
    }
    seen
}

/// Longest-path and reachability report for oriented percolation with unit
/// steps along the two axes. Path ties break toward the lexicographically
/// least next site, so reports are deterministic.
pub fn oriented_path_search(field: &ExcellentField, from: &[i64; 2]) -> Result<PathReport> {
    let w = field.window();
    if w.index_of(&from[..]).is_none() {
        return Err(Error::Parameter(format!(
            "site {from:?} outside the field window"
        )));
    }

    let volume = w.volume() as usize;
    // Longest oriented path leaving (flen) and entering (blen) each site.
    // Window iteration is lexicographic, so both step targets of a site sit
    // at strictly larger indices and one reverse sweep fills flen.
    let mut flen = vec![0usize; volume];
    let mut blen = vec![0usize; volume];
    let sites: Vec<Vec<i64>> = w.iter_sites().collect();
    for idx in (0..volume).rev() {
        let s = &sites[idx];
        if !field.is_excellent(&[s[0], s[1]]) {
            continue;
        }
        let best = STEPS
            .iter()
            .filter_map(|d| w.index_of(&[s[0] + d[0], s[1] + d[1]]))
            .map(|j| flen[j])
            .max()
            .unwrap_or(0);
        flen[idx] = best + 1;
    }
    for idx in 0..volume {
        let s = &sites[idx];
        if !field.is_excellent(&[s[0], s[1]]) {
            continue;
        }
        let best = STEPS
            .iter()
            .filter_map(|d| w.index_of(&[s[0] - d[0], s[1] - d[1]]))
            .map(|j| blen[j])
            .max()
            .unwrap_or(0);
        blen[idx] = best + 1;
    }

    let walk = |table: &[usize], sign: i64| -> Vec<[i64; 2]> {
        let mut path = Vec::new();
        let Some(mut idx) = w.index_of(&from[..]) else {
            return path;
        };
        if table[idx] == 0 {
            return path;
        }
        path.push(*from);
        while table[idx] > 1 {
            let cur = &sites[idx];
            // STEPS is ordered so the first match is the lex-least choice
            // when stepping forward and the lex-greatest predecessor when
            // stepping backward; either way the walk is deterministic.
            let next = STEPS
                .iter()
                .filter_map(|d| {
                    w.index_of(&[cur[0] + sign * d[0], cur[1] + sign * d[1]])
                })
                .filter(|&j| table[j] == table[idx] - 1)
                .min_by_key(|&j| sites[j].clone());
            match next {
                Some(j) => {
                    path.push([sites[j][0], sites[j][1]]);
                    idx = j;
                }
                None => break,
            }
        }
        path
    };

    let forward_path = walk(&flen, 1);
    let mut backward_path = walk(&blen, -1);
    backward_path.reverse();

    let fwd = reachable(field, *from, true);
    let bwd = reachable(field, *from, false);
    let low = w.origin();
    let upper = w.upper();
    let touches_low = bwd.iter().any(|s| s[0] == low[0] || s[1] == low[1]);
    let touches_high = fwd
        .iter()
        .any(|s| s[0] == upper[0] - 1 || s[1] == upper[1] - 1);

    Ok(PathReport {
        from: *from,
        forward_length: forward_path.len(),
        backward_sites: bwd.len(),
        spans: field.is_excellent(from) && touches_low && touches_high,
        forward_path,
        backward_path,
    })
}

/// Outcome of walking occupation from a spontaneously filled brick to the
/// origin's brick along an oriented excellent path.
#[derive(Debug)]
pub struct NucleationReport {
    /// Renormalized site whose brick had no vacant site at sprinkle level.
    pub nucleus: [i64; 2],
    /// Path walked, nucleus first, origin last.
    pub path: Vec<[i64; 2]>,
    /// Three transfer reports per oriented step.
    pub hops: Vec<ActivationReport>,
    /// Bricks whose sail heads are known occupied, in discovery order,
    /// starting with the nucleus brick.
    pub activated: Vec<Brick>,
}

impl NucleationReport {
    pub fn all_activated(&self) -> bool {
        self.hops.iter().all(|h| h.activated)
    }
}

fn brick_fully_decided(cfg: &Configuration, brick: &Brick) -> bool {
    brick
        .window()
        .iter_sites()
        .all(|s| cfg.get(&s).is_some_and(|st| st != SiteState::OpenVacant))
}

/// Nucleation experiment for the origin site. The configuration is raised
/// to its sprinkle level (each open vacant site turns occupied independently
/// with probability `sprinkle_p`), the backward oriented path from the
/// origin is scanned far end first for a brick with every open site
/// occupied, and occupation is then chained forward through the gadgets,
/// three transfers per oriented step. Fails `Inconclusive` when no brick on
/// the path is fully decided; a larger window or denser sprinkle helps.
pub fn nucleation_experiment(
    cfg: &Configuration,
    scale: u64,
    window: &BoxWindow,
    sprinkle_p: f64,
) -> Result<NucleationReport> {
    if !(0.0..=1.0).contains(&sprinkle_p) {
        return Err(Error::Parameter(format!(
            "sprinkle probability {sprinkle_p} outside [0, 1]"
        )));
    }
    if window.index_of(&[0, 0]).is_none() {
        return Err(Error::Parameter(
            "the renormalized window must contain the origin".into(),
        ));
    }

    let field = excellent_field(cfg, scale, window)?;
    if !field.is_excellent(&[0, 0]) {
        return Err(Error::Precondition("the origin site is not excellent".into()));
    }

    let level2 = if sprinkle_p > 0.0 {
        let meta = cfg.meta();
        let extra = sprinkle_p * (1.0 - meta.p - meta.q);
        cfg.sprinkle(extra, CouplingSource::new(meta.seed))?
    } else {
        cfg.clone()
    };

    let gadget = build_gadget(scale)?;
    let report = oriented_path_search(&field, &[0, 0])?;
    let start = report
        .backward_path
        .iter()
        .position(|a| brick_fully_decided(&level2, &gadget_at(&gadget, a).base))
        .ok_or_else(|| {
            Error::Inconclusive(format!(
                "no fully occupied brick among the {} backward path sites",
                report.backward_path.len()
            ))
        })?;

    let path: Vec<[i64; 2]> = report.backward_path[start..].to_vec();
    let nucleus = path[0];
    let mut hops = Vec::new();
    let mut activated = vec![gadget_at(&gadget, &nucleus).base.clone()];
    for pair in path.windows(2) {
        let (a, b) = (pair[0], pair[1]);
        let g = gadget_at(&gadget, &a);
        let chain = if b == [a[0] + 1, a[1]] {
            &g.chain
        } else {
            debug_assert_eq!(b, [a[0], a[1] + 1]);
            &g.chain_alt
        };
        let mut pred = &g.base;
        for succ in chain {
            let rep = activation_experiment(&level2, pred, succ)?;
            if rep.activated {
                activated.push(succ.clone());
            }
            hops.push(rep);
            pred = succ;
        }
        debug_assert_eq!(*pred, gadget_at(&gadget, &b).base);
    }

    Ok(NucleationReport {
        nucleus,
        path,
        hops,
        activated,
    })
}
