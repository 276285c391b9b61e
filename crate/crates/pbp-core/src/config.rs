//! Three-state configurations on a window, packed two bits per site.

use crate::coupling::{CouplingSource, STREAM_U, STREAM_W};
use crate::error::{Error, Result};
use crate::state::SiteState;
use crate::window::BoxWindow;

/// Sampling metadata carried by a configuration. `generation` counts sprinkle
/// passes; snapshots do not store it and read back as generation 0.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Meta {
    pub p: f64,
    pub q: f64,
    pub seed: u64,
    pub generation: u32,
}

/// A configuration of site states on a box window. Treated as immutable once
/// built; the mutating helpers exist for constructing planted instances.
#[derive(Debug, Clone, PartialEq)]
pub struct Configuration {
    window: BoxWindow,
    bits: Vec<u8>,
    meta: Meta,
}

fn check_params(p: f64, q: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&p) || !(0.0..=1.0).contains(&q) || p + q > 1.0 {
        return Err(Error::Parameter(format!(
            "need p, q >= 0 and p + q <= 1, got p = {p}, q = {q}"
        )));
    }
    Ok(())
}

/// Anything that can report a site state; used to build configurations from
/// synthetic or overridden fields.
pub trait FieldSource {
    fn state(&self, site: &[i64]) -> SiteState;
}

/// The product three-state measure, sampled through the window-independent
/// per-site hash.
#[derive(Debug, Clone, Copy)]
pub struct ProductField {
    pub src: CouplingSource,
    pub p: f64,
    pub q: f64,
}

impl FieldSource for ProductField {
    #[inline]
    fn state(&self, site: &[i64]) -> SiteState {
        // One uniform decides the three-way split: u < q is closed and
        // u >= 1 - p is occupied. The occupied-given-open probability is
        // exactly p / (1 - q), and because the occupied region is the upper
        // tail of the same uniform, raising p only converts vacant sites to
        // occupied and raising q only converts vacant sites to closed. Both
        // parameter couplings are monotone per site, which the independent
        // two-stream factorization cannot achieve.
        let u = self.src.uniform(site, STREAM_U);
        if u < self.q {
            SiteState::Closed
        } else if u >= 1.0 - self.p {
            SiteState::Occupied
        } else {
            SiteState::OpenVacant
        }
    }
}

impl Configuration {
    /// Sample the product measure: closed with probability q, occupied p,
    /// open vacant 1 - p - q, independently per site.
    pub fn sample(window: BoxWindow, p: f64, q: f64, src: CouplingSource) -> Result<Configuration> {
        check_params(p, q)?;
        let field = ProductField { src, p, q };
        let meta = Meta {
            p,
            q,
            seed: src.seed(),
            generation: 0,
        };
        Ok(Self::from_field_with_meta(window, &field, meta))
    }

    /// Build from an arbitrary field source.
    pub fn from_field<F: FieldSource>(window: BoxWindow, field: &F) -> Configuration {
        let meta = Meta {
            p: f64::NAN,
            q: f64::NAN,
            seed: 0,
            generation: 0,
        };
        Self::from_field_with_meta(window, field, meta)
    }

    fn from_field_with_meta<F: FieldSource>(
        window: BoxWindow,
        field: &F,
        meta: Meta,
    ) -> Configuration {
        let volume = window.volume();
        let mut bits = vec![0u8; volume.div_ceil(4)];
        for (idx, site) in window.iter_sites().enumerate() {
            let s = field.state(&site);
            bits[idx >> 2] |= s.to_bits() << ((idx & 3) * 2);
        }
        Configuration { window, bits, meta }
    }

    /// Uniform-state configuration, mainly for planted instances.
    pub fn filled(window: BoxWindow, state: SiteState) -> Configuration {
        let volume = window.volume();
        let byte = {
            let b = state.to_bits();
            b | (b << 2) | (b << 4) | (b << 6)
        };
        Configuration {
            bits: vec![byte; volume.div_ceil(4)],
            window,
            meta: Meta {
                p: f64::NAN,
                q: f64::NAN,
                seed: 0,
                generation: 0,
            },
        }
    }

    pub(crate) fn from_raw(window: BoxWindow, bits: Vec<u8>, meta: Meta) -> Configuration {
        debug_assert_eq!(bits.len(), window.volume().div_ceil(4));
        Configuration { window, bits, meta }
    }

    pub fn window(&self) -> &BoxWindow {
        &self.window
    }

    pub fn meta(&self) -> Meta {
        self.meta
    }

    pub fn set_meta(&mut self, meta: Meta) {
        self.meta = meta;
    }

    pub(crate) fn raw_bits(&self) -> &[u8] {
        &self.bits
    }

    #[inline]
    pub fn get_idx(&self, idx: usize) -> SiteState {
        let b = (self.bits[idx >> 2] >> ((idx & 3) * 2)) & 3;
        SiteState::from_bits(b).expect("reserved state bits in configuration")
    }

    #[inline]
    pub fn get(&self, site: &[i64]) -> Option<SiteState> {
        self.window.index_of(site).map(|i| self.get_idx(i))
    }

    #[inline]
    pub fn set_idx(&mut self, idx: usize, state: SiteState) {
        let shift = (idx & 3) * 2;
        let byte = &mut self.bits[idx >> 2];
        *byte = (*byte & !(3 << shift)) | (state.to_bits() << shift);
    }

    /// Set a site's state. Panics outside the window; construction helper.
    pub fn set(&mut self, site: &[i64], state: SiteState) {
        let idx = self
            .window
            .index_of(site)
            .expect("set() outside configuration window");
        self.set_idx(idx, state);
    }

    /// (open vacant, occupied, closed) counts.
    pub fn counts(&self) -> (usize, usize, usize) {
        let mut c = [0usize; 3];
        for idx in 0..self.window.volume() {
            c[self.get_idx(idx) as usize] += 1;
        }
        (c[0], c[1], c[2])
    }

    pub fn occupied_sites(&self) -> Vec<Vec<i64>> {
        (0..self.window.volume())
            .filter(|&i| self.get_idx(i).is_occupied())
            .map(|i| self.window.site_of(i))
            .collect()
    }

    /// Copy out the restriction to a sub-window, keeping the metadata.
    pub fn restrict(&self, window: &BoxWindow) -> Result<Configuration> {
        let mut out = Configuration::filled(window.clone(), SiteState::OpenVacant);
        for (idx, site) in window.iter_sites().enumerate() {
            match self.get(&site) {
                Some(s) => out.set_idx(idx, s),
                None => {
                    return Err(Error::Parameter(format!(
                        "restriction window reaches {site:?}, outside the configuration"
                    )))
                }
            }
        }
        out.meta = self.meta;
        Ok(out)
    }

    /// Sprinkle: each currently vacant open site becomes occupied with
    /// probability `extra / (1 - p - q)`, so the result is distributed as a
    /// fresh sample at (p + extra, q). Occupied and closed sites are never
    /// touched. Each sprinkle generation consumes its own stream, so repeated
    /// sprinkles compose into exact product laws.
    pub fn sprinkle(&self, extra: f64, src: CouplingSource) -> Result<Configuration> {
        let Meta {
            p, q, generation, ..
        } = self.meta;
        if !p.is_finite() || !q.is_finite() {
            return Err(Error::Parameter(
                "sprinkle needs a configuration with sampling metadata (p, q)".into(),
            ));
        }
        if extra < 0.0 || p + q + extra > 1.0 + 1e-12 {
            return Err(Error::Parameter(format!(
                "sprinkle extra = {extra} must satisfy 0 <= extra <= 1 - p - q = {}",
                1.0 - p - q
            )));
        }
        let mut out = self.clone();
        out.meta.p = p + extra;
        out.meta.generation = generation + 1;
        if extra == 0.0 {
            return Ok(out);
        }
        let threshold = extra / (1.0 - p - q);
        let stream = STREAM_W + generation;
        for (idx, site) in self.window.iter_sites().enumerate() {
            if self.get_idx(idx) == SiteState::OpenVacant
                && src.uniform(&site, stream) < threshold
            {
                out.set_idx(idx, SiteState::Occupied);
            }
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample(p: f64, q: f64, seed: u64, ext: u64) -> Configuration {
        let w = BoxWindow::centered(vec![ext, ext, ext]).unwrap();
        Configuration::sample(w, p, q, CouplingSource::new(seed)).unwrap()
    }

    #[test]
    fn degenerate_parameters() {
        let c = sample(0.0, 0.0, 1, 8);
        assert_eq!(c.counts(), (512, 0, 0));
        let c = sample(1.0, 0.0, 1, 8);
        assert_eq!(c.counts(), (0, 512, 0));
        let c = sample(0.0, 1.0, 1, 8);
        assert_eq!(c.counts(), (0, 0, 512));
    }

    #[test]
    fn rejects_bad_parameters() {
        let w = BoxWindow::centered(vec![4]).unwrap();
        assert!(Configuration::sample(w.clone(), 0.7, 0.6, CouplingSource::new(0)).is_err());
        assert!(Configuration::sample(w, -0.1, 0.0, CouplingSource::new(0)).is_err());
    }

    #[test]
    fn marginals_within_four_sigma() {
        // 64^3 window at p = 0.3, q = 0.2; binomial concentration puts the
        // occupied fraction within 4 sd of p and closed within 4 sd of q.
        let c = sample(0.3, 0.2, 7, 64);
        let n = 64f64.powi(3);
        let (_, occ, clo) = c.counts();
        let occ_frac = occ as f64 / n;
        let clo_frac = clo as f64 / n;
        let band = |p: f64| 4.0 * (p * (1.0 - p) / n).sqrt();
        assert!(
            (occ_frac - 0.3).abs() < band(0.3),
            "occupied fraction {occ_frac}"
        );
        assert!(
            (clo_frac - 0.2).abs() < band(0.2),
            "closed fraction {clo_frac}"
        );
    }

    #[test]
    fn deterministic_and_window_independent() {
        let a = sample(0.25, 0.1, 99, 16);
        let b = sample(0.25, 0.1, 99, 16);
        assert_eq!(a, b);
        // A shifted, smaller window sees identical states on shared sites.
        let small = BoxWindow::new(vec![-3, 0, 2], vec![5, 4, 3]).unwrap();
        let c = Configuration::sample(small, 0.25, 0.1, CouplingSource::new(99)).unwrap();
        for site in c.window().iter_sites() {
            assert_eq!(c.get(&site), a.get(&site));
        }
    }

    #[test]
    fn monotone_couplings_per_site() {
        let w = BoxWindow::centered(vec![12, 12, 12]).unwrap();
        let src = CouplingSource::new(5);
        // occupied set nondecreasing in p at fixed q
        let lo = Configuration::sample(w.clone(), 0.05, 0.1, src).unwrap();
        let hi = Configuration::sample(w.clone(), 0.2, 0.1, src).unwrap();
        for idx in 0..w.volume() {
            if lo.get_idx(idx).is_occupied() {
                assert!(hi.get_idx(idx).is_occupied());
            }
            assert_eq!(lo.get_idx(idx).is_closed(), hi.get_idx(idx).is_closed());
        }
        // raising q only converts vacant sites to closed
        let lo = Configuration::sample(w.clone(), 0.1, 0.02, src).unwrap();
        let hi = Configuration::sample(w.clone(), 0.1, 0.3, src).unwrap();
        for idx in 0..w.volume() {
            let (a, b) = (lo.get_idx(idx), hi.get_idx(idx));
            if a != b {
                assert_eq!(a, SiteState::OpenVacant);
                assert_eq!(b, SiteState::Closed);
            }
        }
    }

    #[test]
    fn restriction_preserves_states_and_meta() {
        let c = sample(0.2, 0.1, 21, 12);
        let sub = BoxWindow::new(vec![-2, 0, 1], vec![3, 4, 2]).unwrap();
        let r = c.restrict(&sub).unwrap();
        assert_eq!(r.meta(), c.meta());
        for site in sub.iter_sites() {
            assert_eq!(r.get(&site), c.get(&site));
        }
        let outside = BoxWindow::new(vec![0, 0, 0], vec![20, 4, 2]).unwrap();
        assert!(c.restrict(&outside).is_err());
    }

    #[test]
    fn sprinkle_laws() {
        let c = sample(0.1, 0.1, 11, 32);
        let src = CouplingSource::new(11);
        // extra = 0 changes nothing but the generation counter
        let same = c.sprinkle(0.0, src).unwrap();
        assert_eq!(same.raw_bits(), c.raw_bits());
        assert_eq!(same.meta().generation, 1);
        // never removes occupied, never touches closed
        let s = c.sprinkle(0.1, src).unwrap();
        let mut converted = 0usize;
        for idx in 0..c.window().volume() {
            let (before, after) = (c.get_idx(idx), s.get_idx(idx));
            match before {
                SiteState::Occupied => assert_eq!(after, SiteState::Occupied),
                SiteState::Closed => assert_eq!(after, SiteState::Closed),
                SiteState::OpenVacant => {
                    if after != before {
                        assert_eq!(after, SiteState::Occupied);
                        converted += 1;
                    }
                }
            }
        }
        assert!(converted > 0);
        assert_eq!(s.meta().p, 0.2);
        // occupied fraction matches the level-2 law p + extra within 4 sd
        let n = c.window().volume() as f64;
        let occ = s.counts().1 as f64 / n;
        let band = 4.0 * (0.2f64 * 0.8 / n).sqrt();
        assert!((occ - 0.2).abs() < band, "level-2 occupied fraction {occ}");
        // max sprinkle occupies every open vacant site
        let full = c.sprinkle(0.8, src).unwrap();
        assert_eq!(full.counts().0, 0);
    }

    #[test]
    fn sprinkle_monotone_in_extra() {
        let c = sample(0.1, 0.2, 3, 16);
        let src = CouplingSource::new(3);
        let a = c.sprinkle(0.05, src).unwrap();
        let b = c.sprinkle(0.15, src).unwrap();
        for idx in 0..c.window().volume() {
            if a.get_idx(idx).is_occupied() {
                assert!(b.get_idx(idx).is_occupied());
            }
        }
    }
}
