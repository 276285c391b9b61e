//! Outer-boundary extraction: D = {x not in A : x - (1,1,0) in A}, layer
//! path assembly, and the margin stabilization protocol.

use std::collections::HashSet;

use crate::error::{Error, Result};
use crate::window::BoxWindow;

use super::{ClosedField, ReachSet, Site3, Source};

#[derive(Debug, Clone)]
pub struct CurtainLayer {
    pub k: i64,
    /// Ordered along the path direction (steps e1 and -e2).
    pub path: Vec<Site3>,
    /// The diagonal site (t,t,k) the assembly started from.
    pub diagonal: Site3,
    /// Backward extension stopped at the window face.
    pub truncated_low: bool,
    /// Forward extension stopped at the window face.
    pub truncated_high: bool,
    /// Extension stopped in the window interior: the local structure of a
    /// curtain failed there, so no validity claim is made for this layer.
    pub broken: bool,
}

#[derive(Debug, Clone)]
pub struct Curtain {
    pub window: BoxWindow,
    /// Layers in ascending k, one per layer with a diagonal intersection.
    pub layers: Vec<CurtainLayer>,
    /// All boundary sites inside the window.
    pub sites: HashSet<Site3>,
    /// In-window layer indices whose diagonal carries no boundary site.
    pub missing_diagonal: Vec<i64>,
}

impl Curtain {
    pub fn contains(&self, site: &Site3) -> bool {
        self.sites.contains(site)
    }

    pub fn layer(&self, k: i64) -> Option<&CurtainLayer> {
        self.layers.iter().find(|l| l.k == k)
    }
}

/// D restricted to the window. Every boundary site sits at diagonal sum
/// level+1 or level+2, or one taxed step above a materialized member of A.
pub fn boundary_sites(a: &ReachSet) -> HashSet<Site3> {
    let w = a.window();
    let o = w.origin();
    let e = w.extents();
    let level = a.source().level;
    let mut d: HashSet<Site3> = HashSet::new();
    for x in o[0]..o[0] + e[0] as i64 {
        for y in o[1]..o[1] + e[1] as i64 {
            for s in [level + 1, level + 2] {
                let z = s - x - y;
                let site = [x, y, z];
                if w.contains(&site) && !a.member(&site) {
                    d.insert(site);
                }
            }
        }
    }
    for m in a.above_source() {
        let site = [m[0] + 1, m[1] + 1, m[2]];
        if w.contains(&site) && !a.member(&site) {
            d.insert(site);
        }
    }
    d
}

/// Assembles per-layer oriented paths of D within the window. Returns None
/// when no boundary site lies in the window at all.
pub fn curtain_boundary(a: &ReachSet) -> Option<Curtain> {
    assemble_curtain(a.window(), boundary_sites(a))
}

fn assemble_curtain(window: &BoxWindow, sites: HashSet<Site3>) -> Option<Curtain> {
    if sites.is_empty() {
        return None;
    }
    let w = window.clone();
    let o = w.origin();
    let e = w.extents();
    let (x_lo, x_hi) = (o[0], o[0] + e[0] as i64);
    let (y_lo, y_hi) = (o[1], o[1] + e[1] as i64);
    let mut layers = Vec::new();
    let mut missing = Vec::new();
    for k in o[2]..o[2] + e[2] as i64 {
        let t_lo = x_lo.max(y_lo);
        let t_hi = x_hi.min(y_hi);
        let diagonal = (t_lo..t_hi).map(|t| [t, t, k]).find(|s| sites.contains(s));
        let Some(diagonal) = diagonal else {
            missing.push(k);
            continue;
        };
        // forward: e1 if present, else -e2 (the proof of the curtain lemma
        // gives exactly one inside a true boundary)
        let mut fwd = Vec::new();
        let mut cur = diagonal;
        let mut truncated_high = false;
        let mut broken = false;
        loop {
            let c1 = [cur[0] + 1, cur[1], cur[2]];
            let c2 = [cur[0], cur[1] - 1, cur[2]];
            cur = if sites.contains(&c1) {
                c1
            } else if sites.contains(&c2) {
                c2
            } else {
                if cur[0] == x_hi - 1 || cur[1] == y_lo {
                    truncated_high = true;
                } else {
                    broken = true;
                }
                break;
            };
            fwd.push(cur);
        }
        let mut bwd = Vec::new();
        let mut cur = diagonal;
        let mut truncated_low = false;
        loop {
            let c1 = [cur[0] - 1, cur[1], cur[2]];
            let c2 = [cur[0], cur[1] + 1, cur[2]];
            cur = if sites.contains(&c1) {
                c1
            } else if sites.contains(&c2) {
                c2
            } else {
                if cur[0] == x_lo || cur[1] == y_hi - 1 {
                    truncated_low = true;
                } else {
                    broken = true;
                }
                break;
            };
            bwd.push(cur);
        }
        bwd.reverse();
        let mut path = bwd;
        path.push(diagonal);
        path.extend(fwd);
        layers.push(CurtainLayer {
            k,
            path,
            diagonal,
            truncated_low,
            truncated_high,
            broken,
        });
    }
    Some(Curtain {
        window: w,
        layers,
        sites,
        missing_diagonal: missing,
    })
}

/// Margin stabilization: the finite-volume reach set under-approximates the
/// infinite-lattice one, so boundary membership is trusted only once it is
/// identical at margins m and 2m. Doubles until agreement; margins past
/// eight window diameters flag the sample as unstable. Returns the accepted
/// boundary sites and the margin that produced them.
pub fn stabilized_sites<F: ClosedField>(
    field: &F,
    window: &BoxWindow,
    margin: u64,
) -> Result<(HashSet<Site3>, u64)> {
    stabilized_sites_from(field, window, margin, Source::default())
}

/// Same stabilization loop with the source half-space level chosen by the
/// caller instead of pinned at zero.
pub fn stabilized_sites_from<F: ClosedField>(
    field: &F,
    window: &BoxWindow,
    margin: u64,
    source: Source,
) -> Result<(HashSet<Site3>, u64)> {
    let cap = 8 * window.diameter().max(1);
    let mut m = margin.max(1);
    let mut d_m = boundary_sites(&super::reachable_set_from(field, window, m, source));
    loop {
        let d_2m = boundary_sites(&super::reachable_set_from(field, window, 2 * m, source));
        if d_m == d_2m {
            return Ok((d_2m, m));
        }
        m *= 2;
        if m > cap {
            return Err(Error::Unstable(format!(
                "boundary did not stabilize by margin {m} (cap {cap})"
            )));
        }
        d_m = d_2m;
    }
}

/// Stabilized boundary assembled into a curtain (None when D misses the
/// window entirely), plus the accepted margin.
pub fn stabilized_curtain<F: ClosedField>(
    field: &F,
    window: &BoxWindow,
    margin: u64,
) -> Result<(Option<Curtain>, u64)> {
    let (sites, m) = stabilized_sites(field, window, margin)?;
    Ok((assemble_curtain(window, sites), m))
}
