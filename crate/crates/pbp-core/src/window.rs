//! Axis-aligned boxes on Z^d with row-major indexing, first coordinate fastest.

use crate::error::{Error, Result};

/// A finite box `prod_i [origin_i, origin_i + extent_i)` in Z^d.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct BoxWindow {
    origin: Vec<i64>,
    extents: Vec<u64>,
}

impl BoxWindow {
    pub fn new(origin: Vec<i64>, extents: Vec<u64>) -> Result<Self> {
        if origin.len() != extents.len() {
            return Err(Error::Geometry(format!(
                "origin has {} coordinates but extents has {}",
                origin.len(),
                extents.len()
            )));
        }
        if origin.is_empty() {
            return Err(Error::Geometry("dimension must be at least 1".into()));
        }
        if extents.iter().any(|&e| e == 0) {
            return Err(Error::Geometry("extents must be positive".into()));
        }
        let mut vol: u128 = 1;
        for (&o, &e) in origin.iter().zip(&extents) {
            o.checked_add_unsigned(e - 1).ok_or_else(|| {
                Error::Geometry("window upper corner overflows i64".into())
            })?;
            vol = vol.saturating_mul(e as u128);
        }
        if vol > usize::MAX as u128 {
            return Err(Error::Geometry("window volume overflows usize".into()));
        }
        Ok(BoxWindow { origin, extents })
    }

    /// Box of the given extents centered on the origin of Z^d
    /// (off-by-one goes to the positive side).
    pub fn centered(extents: Vec<u64>) -> Result<Self> {
        let origin = extents.iter().map(|&e| -((e / 2) as i64)).collect();
        BoxWindow::new(origin, extents)
    }

    /// Convenience constructor for d = 3.
    pub fn cube3(origin: [i64; 3], extents: [u64; 3]) -> Result<Self> {
        BoxWindow::new(origin.to_vec(), extents.to_vec())
    }

    pub fn dim(&self) -> usize {
        self.origin.len()
    }

    pub fn origin(&self) -> &[i64] {
        &self.origin
    }

    pub fn extents(&self) -> &[u64] {
        &self.extents
    }

    pub fn volume(&self) -> usize {
        self.extents.iter().map(|&e| e as usize).product()
    }

    pub fn contains(&self, site: &[i64]) -> bool {
        site.len() == self.dim()
            && site.iter().zip(&self.origin).zip(&self.extents).all(
                |((&x, &o), &e)| x >= o && ((x - o) as u64) < e,
            )
    }

    /// Flat index of a site, first coordinate fastest.
    pub fn index_of(&self, site: &[i64]) -> Option<usize> {
        if !self.contains(site) {
            return None;
        }
        let mut idx = 0usize;
        let mut stride = 1usize;
        for ((&x, &o), &e) in site.iter().zip(&self.origin).zip(&self.extents) {
            idx += (x - o) as usize * stride;
            stride *= e as usize;
        }
        Some(idx)
    }

    /// Coordinates of a flat index.
    pub fn site_of(&self, mut idx: usize) -> Vec<i64> {
        debug_assert!(idx < self.volume());
        let mut site = Vec::with_capacity(self.dim());
        for (&o, &e) in self.origin.iter().zip(&self.extents) {
            site.push(o + (idx % e as usize) as i64);
            idx /= e as usize;
        }
        site
    }

    /// Window grown by `margin` in every direction along every axis.
    pub fn grown(&self, margin: u64) -> Result<BoxWindow> {
        let origin = self
            .origin
            .iter()
            .map(|&o| {
                o.checked_sub_unsigned(margin)
                    .ok_or_else(|| Error::Geometry("grown window underflows i64".into()))
            })
            .collect::<Result<Vec<_>>>()?;
        let extents = self.extents.iter().map(|&e| e + 2 * margin).collect();
        BoxWindow::new(origin, extents)
    }

    /// Largest extent, used by stabilization caps.
    pub fn diameter(&self) -> u64 {
        self.extents.iter().copied().max().unwrap_or(0)
    }

    /// Centroid of the site set in doubled coordinates (2c_i = 2o_i + e_i - 1),
    /// which keeps half-integer centers exact.
    pub fn doubled_centroid(&self) -> Vec<i64> {
        self.origin
            .iter()
            .zip(&self.extents)
            .map(|(&o, &e)| 2 * o + e as i64 - 1)
            .collect()
    }

    /// Iterate all sites in index order. The buffer walk avoids one
    /// allocation per site.
    pub fn iter_sites(&self) -> SiteIter<'_> {
        SiteIter {
            window: self,
            site: self.origin.clone(),
            remaining: self.volume(),
        }
    }

    /// Exclusive upper corner.
    pub fn upper(&self) -> Vec<i64> {
        self.origin
            .iter()
            .zip(&self.extents)
            .map(|(&o, &e)| o + e as i64)
            .collect()
    }
}

pub struct SiteIter<'a> {
    window: &'a BoxWindow,
    site: Vec<i64>,
    remaining: usize,
}

impl<'a> Iterator for SiteIter<'a> {
    type Item = Vec<i64>;

    fn next(&mut self) -> Option<Vec<i64>> {
        if self.remaining == 0 {
            return None;
        }
        let out = self.site.clone();
        self.remaining -= 1;
        // odometer increment, axis 0 fastest
        for i in 0..self.site.len() {
            self.site[i] += 1;
            if ((self.site[i] - self.window.origin[i]) as u64) < self.window.extents[i] {
                break;
            }
            self.site[i] = self.window.origin[i];
        }
        Some(out)
    }

    fn size_hint(&self) -> (usize, Option<usize>) {
        (self.remaining, Some(self.remaining))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn index_roundtrip() {
        let w = BoxWindow::new(vec![-2, 3, 0], vec![4, 2, 5]).unwrap();
        assert_eq!(w.volume(), 40);
        for idx in 0..w.volume() {
            let site = w.site_of(idx);
            assert_eq!(w.index_of(&site), Some(idx));
        }
        assert_eq!(w.index_of(&[-3, 3, 0]), None);
        assert_eq!(w.index_of(&[2, 3, 0]), None);
    }

    #[test]
    fn first_coordinate_fastest() {
        let w = BoxWindow::new(vec![0, 0], vec![3, 2]).unwrap();
        assert_eq!(w.site_of(0), vec![0, 0]);
        assert_eq!(w.site_of(1), vec![1, 0]);
        assert_eq!(w.site_of(3), vec![0, 1]);
    }

    #[test]
    fn iter_matches_site_of() {
        let w = BoxWindow::new(vec![-1, -1, -1], vec![3, 3, 3]).unwrap();
        for (idx, site) in w.iter_sites().enumerate() {
            assert_eq!(site, w.site_of(idx));
        }
        assert_eq!(w.iter_sites().count(), 27);
    }

    #[test]
    fn centered_contains_origin() {
        let w = BoxWindow::centered(vec![5, 4, 7]).unwrap();
        assert!(w.contains(&[0, 0, 0]));
        assert_eq!(w.origin(), &[-2, -2, -3]);
    }

    #[test]
    fn grown_margin() {
        let w = BoxWindow::new(vec![0, 0], vec![4, 4]).unwrap();
        let g = w.grown(2).unwrap();
        assert_eq!(g.origin(), &[-2, -2]);
        assert_eq!(g.extents(), &[8, 8]);
    }

    #[test]
    fn rejects_bad_shapes() {
        assert!(BoxWindow::new(vec![0], vec![0]).is_err());
        assert!(BoxWindow::new(vec![0, 0], vec![1]).is_err());
        assert!(BoxWindow::new(vec![], vec![]).is_err());
    }
}
