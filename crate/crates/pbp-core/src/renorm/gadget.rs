//! The seven-brick gadget: two succession chains of length three that leave
//! a brick and return to two distinct translates of it, sharing their first
//! hop. Renormalized growth steps on Z^2 are built from these two chains.

use crate::error::{Error, Result};
use crate::sail::{Brick, Site3};

use super::{brick_successors, scaled_shift, tip_tail_centroids_match, translate_brick, BrickRelation};

/// Translation reached by the primary chain, in scale units.
///
/// The second component is negative and cannot be otherwise: a three-hop
/// chain that restores the original orientation can only move the second
/// coordinate by +10 or -22 scale units (the tip sits on the low side of
/// that axis, which skews every hop), and the paired chains below need the
/// -22 branch to share their first hop and middle box.
pub const GADGET_SHIFT: Site3 = [10, -22, 22];
/// Translation reached by the alternate chain, in scale units.
pub const GADGET_SHIFT_ALT: Site3 = [22, -22, 22];

/// Two three-hop succession chains from a common base brick to the two
/// translates of it by `scale * GADGET_SHIFT` and `scale * GADGET_SHIFT_ALT`.
/// The chains share their first brick, and their middle bricks occupy the
/// same box with different orientations.
#[derive(Debug, Clone, PartialEq)]
pub struct Gadget {
    pub scale: u64,
    pub base: Brick,
    /// Primary chain (B_1, B_2, B_3); base |> B_1 |> B_2 |> B_3.
    pub chain: [Brick; 3],
    /// Alternate chain (B_1', B_2', B_3').
    pub chain_alt: [Brick; 3],
    /// Successor choice indices realizing the primary chain.
    pub choices: [usize; 3],
    pub choices_alt: [usize; 3],
    /// Chebyshev radius of the seven bricks around the origin, in scale
    /// units; exact because every box bound is a multiple of the scale.
    pub reach: u64,
}

impl Gadget {
    /// Base plus the six chain bricks, base first.
    pub fn bricks(&self) -> [&Brick; 7] {
        [
            &self.base,
            &self.chain[0],
            &self.chain[1],
            &self.chain[2],
            &self.chain_alt[0],
            &self.chain_alt[1],
            &self.chain_alt[2],
        ]
    }

    /// The relation edges of one chain, base first.
    pub fn relations(&self, alt: bool) -> [BrickRelation; 3] {
        let (chain, choices) = if alt {
            (&self.chain_alt, &self.choices_alt)
        } else {
            (&self.chain, &self.choices)
        };
        let mut prev = &self.base;
        let mut out = Vec::with_capacity(3);
        for i in 0..3 {
            out.push(BrickRelation {
                predecessor: prev.clone(),
                successor: chain[i].clone(),
                choice: choices[i],
            });
            prev = &chain[i];
        }
        out.try_into().expect("three relation edges")
    }

    /// The gadget translated by a whole vector of sites.
    pub fn translated(&self, shift: &Site3) -> Gadget {
        let t = |b: &Brick| translate_brick(b, shift);
        Gadget {
            scale: self.scale,
            base: t(&self.base),
            chain: [t(&self.chain[0]), t(&self.chain[1]), t(&self.chain[2])],
            chain_alt: [
                t(&self.chain_alt[0]),
                t(&self.chain_alt[1]),
                t(&self.chain_alt[2]),
            ],
            choices: self.choices,
            choices_alt: self.choices_alt,
            reach: self.reach,
        }
    }
}

/// All three-hop chains from `base` that end exactly on `target`, as choice
/// index triples in lexicographic order.
fn chains_to(base: &Brick, target: &Brick) -> Vec<([usize; 3], [Brick; 3])> {
    let mut out = Vec::new();
    for (c1, b1) in brick_successors(base).into_iter().enumerate() {
        for (c2, b2) in brick_successors(&b1).into_iter().enumerate() {
            for (c3, b3) in brick_successors(&b2).into_iter().enumerate() {
                if &b3 == target {
                    out.push(([c1, c2, c3], [b1.clone(), b2.clone(), b3]));
                }
            }
        }
    }
    out
}

fn chebyshev_reach(bricks: &[&Brick], scale: u64) -> Result<u64> {
    let mut max_abs: i64 = 0;
    for b in bricks {
        let w = b.window();
        for i in 0..3 {
            max_abs = max_abs.max(w.origin()[i].abs()).max(w.upper()[i].abs());
        }
    }
    let l = scale as i64;
    if max_abs % l != 0 {
        return Err(Error::Geometry(format!(
            "gadget bound {max_abs} is not a multiple of the scale {scale}"
        )));
    }
    Ok((max_abs / l) as u64)
}

/// Search the succession graph for the gadget at a given scale. The two
/// target translates are fixed; the search verifies they are reachable in
/// three hops, picks chains sharing the first hop with the middle bricks on
/// a common box, and records the exact Chebyshev radius. Failure here means
/// the succession geometry itself is broken, not bad input.
pub fn build_gadget(scale: u64) -> Result<Gadget> {
    let base = Brick::canonical(scale)?;
    let target = translate_brick(&base, &scaled_shift(scale, &GADGET_SHIFT));
    let target_alt = translate_brick(&base, &scaled_shift(scale, &GADGET_SHIFT_ALT));

    let primary = chains_to(&base, &target);
    let alternate = chains_to(&base, &target_alt);
    for (found, what) in [(&primary, "primary"), (&alternate, "alternate")] {
        if found.is_empty() {
            return Err(Error::Geometry(format!(
                "no three-hop succession chain reaches the {what} gadget translate at scale {scale}"
            )));
        }
    }

    // Prefer chain pairs sharing the first brick whose middle bricks share a
    // box; take the lexicographically least choice indices.
    let mut best: Option<([usize; 3], [Brick; 3], [usize; 3], [Brick; 3])> = None;
    for (c, bricks) in &primary {
        for (c_alt, bricks_alt) in &alternate {
            if bricks[0] != bricks_alt[0] || bricks[1].window() != bricks_alt[1].window() {
                continue;
            }
            let better = best
                .as_ref()
                .map_or(true, |(bc, _, ba, _)| (*c, *c_alt) < (*bc, *ba));
            if better {
                best = Some((*c, bricks.clone(), *c_alt, bricks_alt.clone()));
            }
        }
    }
    let (choices, chain, choices_alt, chain_alt) = best.ok_or_else(|| {
        Error::Geometry(format!(
            "gadget chains never share a first hop and a middle box at scale {scale}"
        ))
    })?;

    // The two returned translates must be distinct copies of the base with
    // the same orientation, and the middle bricks must differ.
    let same_linear = |a: &Brick, b: &Brick| {
        a.place.perm == b.place.perm && a.place.sign == b.place.sign
    };
    if chain[2] == chain_alt[2]
        || !same_linear(&base, &chain[2])
        || !same_linear(&base, &chain_alt[2])
        || chain[1] == chain_alt[1]
    {
        return Err(Error::Geometry(
            "gadget chain endpoints violate the translate structure".into(),
        ));
    }
    for (pred, succ) in [
        (&base, &chain[0]),
        (&chain[0], &chain[1]),
        (&chain[1], &chain[2]),
        (&base, &chain_alt[0]),
        (&chain_alt[0], &chain_alt[1]),
        (&chain_alt[1], &chain_alt[2]),
    ] {
        if !tip_tail_centroids_match(pred, succ) {
            return Err(Error::Geometry("gadget chain breaks the centroid relation".into()));
        }
    }

    let reach = chebyshev_reach(
        &[
            &base, &chain[0], &chain[1], &chain[2], &chain_alt[0], &chain_alt[1], &chain_alt[2],
        ],
        scale,
    )?;
    Ok(Gadget {
        scale,
        base,
        chain,
        chain_alt,
        choices,
        choices_alt,
        reach,
    })
}
