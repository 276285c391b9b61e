//! Signed coordinate permutations of Z^3 with translation: the isometries
//! that carry axis-aligned boxes to axis-aligned boxes.

use crate::window::BoxWindow;

use super::Site3;

/// y[i] = sign[i] * x[perm[i]] + shift[i].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Isometry {
    pub perm: [usize; 3],
    pub sign: [i64; 3],
    pub shift: [i64; 3],
}

impl Isometry {
    pub fn identity() -> Self {
        Isometry {
            perm: [0, 1, 2],
            sign: [1, 1, 1],
            shift: [0, 0, 0],
        }
    }

    pub fn translation(shift: Site3) -> Self {
        Isometry {
            shift,
            ..Isometry::identity()
        }
    }

    pub fn apply(&self, x: &Site3) -> Site3 {
        [
            self.sign[0] * x[self.perm[0]] + self.shift[0],
            self.sign[1] * x[self.perm[1]] + self.shift[1],
            self.sign[2] * x[self.perm[2]] + self.shift[2],
        ]
    }

    pub fn inverse(&self) -> Isometry {
        // x[perm[i]] = sign[i] * (y[i] - shift[i])
        let mut perm = [0usize; 3];
        let mut sign = [0i64; 3];
        let mut shift = [0i64; 3];
        for i in 0..3 {
            let j = self.perm[i];
            perm[j] = i;
            sign[j] = self.sign[i];
            shift[j] = -self.sign[i] * self.shift[i];
        }
        Isometry { perm, sign, shift }
    }

    /// The map x -> self(other(x)).
    pub fn compose(&self, other: &Isometry) -> Isometry {
        let mut perm = [0usize; 3];
        let mut sign = [0i64; 3];
        let mut shift = [0i64; 3];
        for i in 0..3 {
            perm[i] = other.perm[self.perm[i]];
            sign[i] = self.sign[i] * other.sign[self.perm[i]];
            shift[i] = self.sign[i] * other.shift[self.perm[i]] + self.shift[i];
        }
        Isometry { perm, sign, shift }
    }

    /// Index of the linear part (perm, sign) in the `all_rotations` order:
    /// permutations sorted lexicographically, signs as a bit pattern with
    /// bit i set when sign[i] is negative.
    pub fn linear_code(&self) -> u8 {
        const PERMS: [[usize; 3]; 6] = [
            [0, 1, 2],
            [0, 2, 1],
            [1, 0, 2],
            [1, 2, 0],
            [2, 0, 1],
            [2, 1, 0],
        ];
        let p = PERMS
            .iter()
            .position(|p| *p == self.perm)
            .expect("perm is one of the six permutations") as u8;
        let bits = (0..3).fold(0u8, |acc, i| acc | (((self.sign[i] < 0) as u8) << i));
        p * 8 + bits
    }

    /// Image of an axis-aligned box, again axis-aligned.
    pub fn apply_window(&self, w: &BoxWindow) -> BoxWindow {
        assert_eq!(w.dim(), 3);
        let o = w.origin();
        let e = w.extents();
        let lo = [o[0], o[1], o[2]];
        let hi = [
            o[0] + e[0] as i64 - 1,
            o[1] + e[1] as i64 - 1,
            o[2] + e[2] as i64 - 1,
        ];
        let a = self.apply(&lo);
        let b = self.apply(&hi);
        let mut origin = Vec::with_capacity(3);
        let mut extents = Vec::with_capacity(3);
        for i in 0..3 {
            origin.push(a[i].min(b[i]));
            extents.push((a[i] - b[i]).unsigned_abs() + 1);
        }
        BoxWindow::new(origin, extents).expect("image of a valid box is valid")
    }
}

/// The 48 linear parts (perm, sign), shifts zero, in a fixed order.
pub fn all_rotations() -> Vec<Isometry> {
    let perms = [
        [0, 1, 2],
        [0, 2, 1],
        [1, 0, 2],
        [1, 2, 0],
        [2, 0, 1],
        [2, 1, 0],
    ];
    let mut out = Vec::with_capacity(48);
    for perm in perms {
        for bits in 0..8u32 {
            let sign = [
                if bits & 1 == 0 { 1 } else { -1 },
                if bits & 2 == 0 { 1 } else { -1 },
                if bits & 4 == 0 { 1 } else { -1 },
            ];
            out.push(Isometry {
                perm,
                sign,
                shift: [0, 0, 0],
            });
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn inverse_and_compose_round_trip() {
        for iso in all_rotations() {
            let mut iso = iso;
            iso.shift = [5, -3, 11];
            let inv = iso.inverse();
            for x in [[0i64, 0, 0], [1, 2, 3], [-7, 4, 9]] {
                assert_eq!(inv.apply(&iso.apply(&x)), x);
                assert_eq!(iso.apply(&inv.apply(&x)), x);
            }
            let id = iso.compose(&inv);
            for x in [[0i64, 0, 0], [2, -5, 8]] {
                assert_eq!(id.apply(&x), x);
            }
        }
    }

    #[test]
    fn compose_matches_pointwise() {
        let rots = all_rotations();
        let mut a = rots[7];
        a.shift = [1, 2, 3];
        let mut b = rots[22];
        b.shift = [-4, 0, 6];
        let c = a.compose(&b);
        for x in [[0i64, 0, 0], [1, 0, 0], [0, 1, 0], [0, 0, 1], [3, -2, 5]] {
            assert_eq!(c.apply(&x), a.apply(&b.apply(&x)));
        }
    }

    #[test]
    fn linear_code_indexes_all_rotations() {
        for (i, rot) in all_rotations().iter().enumerate() {
            assert_eq!(rot.linear_code() as usize, i);
            let mut shifted = *rot;
            shifted.shift = [9, -4, 2];
            assert_eq!(shifted.linear_code() as usize, i);
        }
    }

    #[test]
    fn forty_eight_distinct_rotations() {
        let rots = all_rotations();
        assert_eq!(rots.len(), 48);
        let mut images: Vec<[Site3; 3]> = rots
            .iter()
            .map(|r| {
                [
                    r.apply(&[1, 0, 0]),
                    r.apply(&[0, 1, 0]),
                    r.apply(&[0, 0, 1]),
                ]
            })
            .collect();
        images.sort();
        images.dedup();
        assert_eq!(images.len(), 48);
    }

    #[test]
    fn window_image_contains_site_images() {
        let w = BoxWindow::cube3([0, 0, 0], [2, 3, 4]).unwrap();
        for iso in all_rotations() {
            let mut iso = iso;
            iso.shift = [10, -20, 30];
            let img = iso.apply_window(&w);
            assert_eq!(img.volume(), w.volume());
            for s in w.iter_sites() {
                let y = iso.apply(&[s[0], s[1], s[2]]);
                assert!(img.contains(&y));
            }
        }
    }
}
