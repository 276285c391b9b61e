//! Structural checks for curtains: per-layer path shape, diagonal
//! uniqueness, the downward support property, and openness.

use crate::config::Configuration;
use crate::state::SiteState;

use super::{Curtain, Site3};

#[derive(Debug, Clone)]
pub struct LayerReport {
    pub k: i64,
    /// Assembly did not break and the layer's boundary sites are exactly
    /// the assembled path.
    pub single_path: bool,
    /// Every step is e1 or -e2.
    pub steps_ok: bool,
    /// No three consecutive steps in the same direction.
    pub no_triple: bool,
    /// Exactly one site on {(t,t,k)} within the window.
    pub diagonal_unique: bool,
    pub truncated: bool,
}

impl LayerReport {
    pub fn pass(&self) -> bool {
        self.single_path && self.steps_ok && self.no_triple && self.diagonal_unique
    }
}

#[derive(Debug, Clone)]
pub struct ValidationReport {
    pub layers: Vec<LayerReport>,
    /// Downward support: x + (0,0,-1) or x + (1,1,-1) is again a boundary
    /// site, for every site where both candidates are decidable in-window.
    pub c2_ok: bool,
    pub c2_checked: usize,
    pub c2_skipped: usize,
    pub c2_first_failure: Option<Site3>,
    /// Every boundary site is open in the supplied configuration.
    pub open_ok: bool,
    pub open_first_failure: Option<Site3>,
}

impl ValidationReport {
    pub fn all_pass(&self) -> bool {
        self.layers.iter().all(LayerReport::pass) && self.c2_ok && self.open_ok
    }
}

pub fn validate_curtain(curtain: &Curtain, cfg: &Configuration) -> ValidationReport {
    let w = &curtain.window;
    let o = w.origin();
    let e = w.extents();
    let mut layers = Vec::new();
    for layer in &curtain.layers {
        let k = layer.k;
        let layer_sites = curtain.sites.iter().filter(|s| s[2] == k).count();
        let on_path = layer.path.iter().all(|s| curtain.sites.contains(s));
        let single_path = !layer.broken && on_path && layer.path.len() == layer_sites;
        let mut steps_ok = true;
        let mut no_triple = true;
        let mut run = 0usize;
        let mut prev_step: Option<[i64; 2]> = None;
        for win in layer.path.windows(2) {
            let d = [win[1][0] - win[0][0], win[1][1] - win[0][1]];
            let dz = win[1][2] - win[0][2];
            if dz != 0 || !(d == [1, 0] || d == [0, -1]) {
                steps_ok = false;
            }
            run = if prev_step == Some(d) { run + 1 } else { 1 };
            if run >= 3 {
                no_triple = false;
            }
            prev_step = Some(d);
        }
        let t_lo = o[0].max(o[1]);
        let t_hi = (o[0] + e[0] as i64).min(o[1] + e[1] as i64);
        let diag_hits = (t_lo..t_hi)
            .filter(|&t| curtain.sites.contains(&[t, t, k]))
            .count();
        layers.push(LayerReport {
            k,
            single_path,
            steps_ok,
            no_triple,
            diagonal_unique: diag_hits == 1,
            truncated: layer.truncated_low || layer.truncated_high,
        });
    }

    let mut c2_ok = true;
    let mut c2_checked = 0;
    let mut c2_skipped = 0;
    let mut c2_first_failure = None;
    for site in &curtain.sites {
        let below = [site[0], site[1], site[2] - 1];
        let diag = [site[0] + 1, site[1] + 1, site[2] - 1];
        let below_in = w.contains(&below);
        let diag_in = w.contains(&diag);
        let hit = (below_in && curtain.sites.contains(&below))
            || (diag_in && curtain.sites.contains(&diag));
        if hit {
            c2_checked += 1;
        } else if below_in && diag_in {
            c2_checked += 1;
            c2_ok = false;
            if c2_first_failure.is_none() {
                c2_first_failure = Some(*site);
            }
        } else {
            c2_skipped += 1;
        }
    }

    let mut open_ok = true;
    let mut open_first_failure = None;
    for site in &curtain.sites {
        if cfg.get(site) == Some(SiteState::Closed) {
            open_ok = false;
            if open_first_failure.is_none() {
                open_first_failure = Some(*site);
            }
        }
    }

    ValidationReport {
        layers,
        c2_ok,
        c2_checked,
        c2_skipped,
        c2_first_failure,
        open_ok,
        open_first_failure,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coupling::CouplingSource;
    use crate::curtain::{curtain_boundary, reachable_set, stabilized_curtain, MaskField};
    use crate::window::BoxWindow;

    fn staircase() -> (Curtain, Configuration) {
        let w = BoxWindow::centered(vec![16, 16, 16]).unwrap();
        let a = reachable_set(&MaskField::default(), &w, 4);
        let c = curtain_boundary(&a).unwrap();
        let cfg = Configuration::filled(w, SiteState::OpenVacant);
        (c, cfg)
    }

    #[test]
    fn staircase_is_fully_valid() {
        let (c, cfg) = staircase();
        let report = validate_curtain(&c, &cfg);
        assert!(report.all_pass(), "{report:?}");
        assert!(report.c2_checked > 0);
        assert_eq!(report.c2_first_failure, None);
    }

    #[test]
    fn deleting_a_site_breaks_single_path() {
        let (mut c, cfg) = staircase();
        // remove a mid-path site of layer 0 that is not the diagonal site
        let victim = {
            let layer = c.layer(0).unwrap();
            let mid = layer.path.len() / 2;
            let s = layer.path[mid];
            if s == layer.diagonal {
                layer.path[mid + 1]
            } else {
                s
            }
        };
        c.sites.remove(&victim);
        let report = validate_curtain(&c, &cfg);
        let layer0 = report.layers.iter().find(|l| l.k == 0).unwrap();
        assert!(!layer0.single_path);
        assert!(!report.all_pass());
    }

    #[test]
    fn shifting_one_layer_up_breaks_support() {
        let (mut c, cfg) = staircase();
        let moved: Vec<Site3> = c.sites.iter().copied().filter(|s| s[2] == 0).collect();
        for s in &moved {
            c.sites.remove(s);
            c.sites.insert([s[0], s[1], s[2] + 1]);
        }
        let report = validate_curtain(&c, &cfg);
        assert!(!report.c2_ok);
        assert!(report.c2_first_failure.is_some());
    }

    #[test]
    fn closed_curtain_site_is_reported() {
        let (c, mut cfg) = staircase();
        let site = *c.sites.iter().next().unwrap();
        cfg.set(&site, SiteState::Closed);
        let report = validate_curtain(&c, &cfg);
        assert!(!report.open_ok);
        assert_eq!(report.open_first_failure, Some(site));
    }

    #[test]
    fn random_small_q_samples_validate() {
        // co-execution of the extractor and the validator on random fields
        use crate::curtain::SampledPollution;
        let w = BoxWindow::centered(vec![32, 32, 32]).unwrap();
        for seed in 0..25u64 {
            let field = SampledPollution {
                src: CouplingSource::new(1000 + seed),
                q: 0.01,
            };
            let (c, _) = stabilized_curtain(&field, &w, 4).unwrap();
            let c = c.expect("boundary should cross a centered window at small q");
            let cfg = Configuration::sample(w.clone(), 0.0, 0.01, CouplingSource::new(1000 + seed))
                .unwrap();
            let report = validate_curtain(&c, &cfg);
            assert!(report.all_pass(), "seed {seed}: {report:?}");
        }
    }
}
