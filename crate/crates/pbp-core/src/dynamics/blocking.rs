//! Local blocking certificates for the standard rule at threshold two.
//!
//! A site is 3-open when it is open and at least three of its 2d neighbors
//! are open. Work in the adjusted configuration where the origin and its
//! neighbors are forced open (closed ones become vacant): the maximal
//! connected 3-open cluster containing the origin, together with an
//! unoccupied boundary that is nowhere 3-open, certifies that the origin is
//! never occupied, because opening those sites only helps the dynamics and
//! the cluster's boundary can never assemble the support it would need to
//! push occupation inside.

use std::collections::HashMap;

use crate::config::Configuration;
use crate::error::{Error, Result};
use crate::state::SiteState;
use crate::dynamics::{Rule, RuleKind};

#[derive(Debug, Clone)]
pub struct Certificate {
    /// The maximal connected 3-open cluster containing the origin, sorted.
    pub cluster: Vec<Vec<i64>>,
    /// Its external lattice boundary, sorted.
    pub boundary: Vec<Vec<i64>>,
}

#[derive(Debug, Clone)]
pub enum BlockedOutcome {
    /// Blocking certificate found: the origin can never become occupied.
    Certified(Certificate),
    /// Certificate conditions fail (an occupied site intrudes on the cluster
    /// or its boundary). Says nothing either way about the origin's fate.
    NotBlocked,
    /// The cluster or a site whose 3-open status matters reaches the window
    /// frame, so the certificate cannot be decided inside this window.
    Indeterminate,
}

/// Certificate search. Only the standard rule at r = 2 is supported; the
/// argument exists to make that contract explicit.
pub fn blocked_certificate(cfg: &Configuration, rule: Rule) -> Result<BlockedOutcome> {
    if rule.kind != RuleKind::Standard || rule.threshold != 2 {
        return Err(Error::Unsupported(
            "blocking certificates are defined for the standard rule at r = 2".into(),
        ));
    }
    let window = cfg.window();
    let d = window.dim();
    if d < 2 {
        return Err(Error::Parameter(
            "blocking certificates need dimension at least 2".into(),
        ));
    }
    let origin = vec![0i64; d];
    if !window.contains(&origin) {
        return Err(Error::Parameter(
            "window must contain the origin for a blocking certificate".into(),
        ));
    }

    // adjusted state: origin and its neighbors are open regardless of closure
    let adjusted = |site: &[i64]| -> Option<SiteState> {
        let s = cfg.get(site)?;
        let near = site.iter().map(|&x| x.abs()).sum::<i64>() <= 1;
        if near && s == SiteState::Closed {
            return Some(SiteState::OpenVacant);
        }
        Some(s)
    };

    // 3-open status in the adjusted configuration; None when a needed state
    // falls outside the window
    let three_open = |site: &[i64], buf: &mut Vec<i64>| -> Option<bool> {
        let s = adjusted(site)?;
        if !s.is_open() {
            return Some(false);
        }
        let mut open_neighbors = 0;
        for axis in 0..d {
            for delta in [-1i64, 1] {
                buf.clear();
                buf.extend_from_slice(site);
                buf[axis] += delta;
                match adjusted(buf) {
                    Some(ns) => {
                        if ns.is_open() {
                            open_neighbors += 1;
                        }
                    }
                    None => return None,
                }
            }
        }
        Some(open_neighbors >= 3)
    };

    let mut status: HashMap<Vec<i64>, bool> = HashMap::new();
    let mut buf = Vec::with_capacity(d);
    let mut cluster: Vec<Vec<i64>> = Vec::new();
    let mut boundary: Vec<Vec<i64>> = Vec::new();
    let mut queue: Vec<Vec<i64>> = vec![origin.clone()];
    match three_open(&origin, &mut buf) {
        Some(true) => {}
        Some(false) => unreachable!("adjusted origin is always 3-open for d >= 2"),
        None => return Ok(BlockedOutcome::Indeterminate),
    }
    status.insert(origin.clone(), true);
    while let Some(site) = queue.pop() {
        cluster.push(site.clone());
        for axis in 0..d {
            for delta in [-1i64, 1] {
                let mut n = site.clone();
                n[axis] += delta;
                if status.contains_key(&n) {
                    continue;
                }
                match three_open(&n, &mut buf) {
                    Some(true) => {
                        status.insert(n.clone(), true);
                        queue.push(n);
                    }
                    Some(false) => {
                        status.insert(n.clone(), false);
                        boundary.push(n);
                    }
                    None => return Ok(BlockedOutcome::Indeterminate),
                }
            }
        }
    }

    // boundary sites are not 3-open by construction; the certificate also
    // needs the cluster and boundary free of initially occupied sites
    let occupied_intrusion = cluster
        .iter()
        .chain(boundary.iter())
        .any(|s| cfg.get(s).map(|st| st.is_occupied()).unwrap_or(false));
    if occupied_intrusion {
        return Ok(BlockedOutcome::NotBlocked);
    }
    cluster.sort();
    boundary.sort();
    boundary.dedup();
    Ok(BlockedOutcome::Certified(Certificate { cluster, boundary }))
}
