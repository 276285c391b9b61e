//! Plain-text artifact writers: CSV tables, PBM bitmaps, gadget JSON.
//!
//! Everything here is deterministic formatting of already-computed results,
//! so the writers take `io::Write` sinks and leave file handling to callers.

use std::io::Write;

use crate::curtain::Curtain;
use crate::dynamics::{EvolutionResult, NEVER};
use crate::error::Result;
use crate::renorm::{Gadget, ExcellentField};
use crate::sail::{Brick, Isometry, SailSet};
use crate::window::BoxWindow;

/// Header of the shared experiment CSV. Every run row carries the full
/// parameter tuple; `note` holds per-row annotations such as bound flags.
pub const ESTIMATE_HEADER: &str =
    "kind,d,r,rule,p,q,L,window,trials,seed,estimate,ci_lo,ci_hi,mean_T,runtime_s,note";

/// One row of the experiment CSV.
#[derive(Debug, Clone, PartialEq)]
pub struct EstimateRow {
    pub kind: String,
    pub d: usize,
    pub r: u32,
    pub rule: String,
    pub p: f64,
    pub q: f64,
    /// Brick scale; `None` for experiments without one.
    pub scale: Option<u64>,
    pub window: String,
    pub trials: u64,
    pub seed: u64,
    pub estimate: f64,
    pub ci_lo: f64,
    pub ci_hi: f64,
    /// Mean round at which the origin became occupied, over occupied trials.
    pub mean_t: Option<f64>,
    pub runtime_s: f64,
    pub note: String,
}

impl EstimateRow {
    pub fn to_line(&self) -> String {
        let scale = self.scale.map(|l| l.to_string()).unwrap_or_default();
        let mean_t = self.mean_t.map(|t| format!("{t:.4}")).unwrap_or_default();
        format!(
            "{},{},{},{},{},{},{},{},{},{},{},{},{},{},{:.3},{}",
            self.kind,
            self.d,
            self.r,
            self.rule,
            self.p,
            self.q,
            scale,
            self.window,
            self.trials,
            self.seed,
            self.estimate,
            self.ci_lo,
            self.ci_hi,
            mean_t,
            self.runtime_s,
            self.note,
        )
    }
}

/// Header plus one line per row.
pub fn write_estimate_csv<W: Write>(mut w: W, rows: &[EstimateRow]) -> Result<()> {
    writeln!(w, "{ESTIMATE_HEADER}")?;
    for row in rows {
        writeln!(w, "{}", row.to_line())?;
    }
    Ok(())
}

/// Compact window label safe inside one CSV cell: extents joined by `x`,
/// then `@` and the origin joined by `_`.
pub fn window_label(window: &BoxWindow) -> String {
    let ext: Vec<String> = window.extents().iter().map(|e| e.to_string()).collect();
    let org: Vec<String> = window.origin().iter().map(|o| o.to_string()).collect();
    format!("{}@{}", ext.join("x"), org.join("_"))
}

/// Occupation rounds as CSV: one row per site that ever becomes occupied.
pub fn write_rounds_csv<W: Write>(mut w: W, result: &EvolutionResult) -> Result<()> {
    let window = result.final_config.window();
    let d = window.dim();
    let header: Vec<String> = (1..=d).map(|a| format!("x{a}")).collect();
    writeln!(w, "{},round", header.join(","))?;
    for (idx, &round) in result.rounds.iter().enumerate() {
        if round == NEVER {
            continue;
        }
        let site = window.site_of(idx);
        let coords: Vec<String> = site.iter().map(|c| c.to_string()).collect();
        writeln!(w, "{},{}", coords.join(","), round)?;
    }
    Ok(())
}

/// Curtain layers as CSV rows `k,i,x1,x2,x3` with `i` the position along the
/// layer's staircase path.
pub fn write_curtain_csv<W: Write>(mut w: W, curtain: &Curtain) -> Result<()> {
    writeln!(w, "k,i,x1,x2,x3")?;
    for layer in &curtain.layers {
        for (i, site) in layer.path.iter().enumerate() {
            writeln!(w, "{},{},{},{},{}", layer.k, i, site[0], site[1], site[2])?;
        }
    }
    Ok(())
}

/// Sail proto-sites as CSV rows `layer,i,x1,x2,x3,...` with the five goodness
/// flags repeated on each row so any slice of the file is self-describing.
pub fn write_sail_csv<W: Write>(mut w: W, sail: &SailSet) -> Result<()> {
    writeln!(
        w,
        "layer,i,x1,x2,x3,open_shadow,supported,banded,layered_paths,seeded"
    )?;
    let g = &sail.goodness;
    let flags = format!(
        "{},{},{},{},{}",
        g.open_shadow, g.supported, g.banded, g.layered_paths, g.seeded
    );
    for (layer, path) in sail.layers.iter().enumerate() {
        for (i, site) in path.iter().enumerate() {
            writeln!(
                w,
                "{},{},{},{},{},{}",
                layer, i, site[0], site[1], site[2], flags
            )?;
        }
    }
    Ok(())
}

/// Excellent field as a plain PBM bitmap (P1). Excellent sites are black.
/// The first raster row is the top of the picture, so rows run from the
/// highest second coordinate down and columns left to right along the first.
pub fn write_excellent_pbm<W: Write>(mut w: W, field: &ExcellentField) -> Result<()> {
    let window = field.window();
    let o = window.origin();
    let e = window.extents();
    writeln!(w, "P1")?;
    writeln!(
        w,
        "# excellent field, scale {}, window {}",
        field.scale(),
        window_label(window)
    )?;
    writeln!(w, "{} {}", e[0], e[1])?;
    for row in (0..e[1] as i64).rev() {
        let mut line = String::with_capacity(2 * e[0] as usize);
        for col in 0..e[0] as i64 {
            if col > 0 {
                line.push(' ');
            }
            let site = [o[0] + col, o[1] + row];
            line.push(if field.is_excellent(&site) { '1' } else { '0' });
        }
        writeln!(w, "{line}")?;
    }
    Ok(())
}

/// Excellent field as CSV rows `a1,a2,excellent`.
pub fn write_excellent_csv<W: Write>(mut w: W, field: &ExcellentField) -> Result<()> {
    writeln!(w, "a1,a2,excellent")?;
    for site in field.window().iter_sites() {
        let a = [site[0], site[1]];
        let bit = u8::from(field.is_excellent(&a));
        writeln!(w, "{},{},{}", a[0], a[1], bit)?;
    }
    Ok(())
}

fn isometry_json(place: &Isometry) -> serde_json::Value {
    serde_json::json!({
        "perm": place.perm,
        "sign": place.sign,
        "shift": place.shift,
        "linear_code": place.linear_code(),
    })
}

fn brick_json(role: &str, brick: &Brick) -> serde_json::Value {
    let window = brick.window();
    serde_json::json!({
        "role": role,
        "corner": window.origin(),
        "dims": window.extents(),
        "eta": isometry_json(&brick.place),
    })
}

/// Gadget geometry as JSON: scale, reach, chain choices, and per brick the
/// box corner, box dims, and the placement isometry.
pub fn gadget_json(gadget: &Gadget) -> serde_json::Value {
    let roles = [
        "base", "chain1", "chain2", "chain3", "alt1", "alt2", "alt3",
    ];
    let bricks: Vec<serde_json::Value> = roles
        .iter()
        .zip(gadget.bricks())
        .map(|(role, brick)| brick_json(role, brick))
        .collect();
    serde_json::json!({
        "scale": gadget.scale,
        "reach": gadget.reach,
        "choices": gadget.choices,
        "choices_alt": gadget.choices_alt,
        "bricks": bricks,
    })
}

pub fn write_gadget_json<W: Write>(mut w: W, gadget: &Gadget) -> Result<()> {
    let value = gadget_json(gadget);
    serde_json::to_writer_pretty(&mut w, &value).map_err(std::io::Error::other)?;
    writeln!(w)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::Configuration;
    use crate::coupling::CouplingSource;
    use crate::curtain::{curtain_boundary, reachable_set, SampledPollution};
    use crate::dynamics::{run_fixpoint, BoundaryPolicy, Rule};
    use crate::renorm::build_gadget;
    use crate::sail::testutil::seeded_aux;
    use crate::sail::{find_sail_constructive, ProtoBrick};
    use crate::state::SiteState;

    fn demo_row() -> EstimateRow {
        EstimateRow {
            kind: "phi-sweep".into(),
            d: 3,
            r: 2,
            rule: "modified".into(),
            p: 0.05,
            q: 0.01,
            scale: None,
            window: "8x8x8@-4_-4_-4".into(),
            trials: 10,
            seed: 7,
            estimate: 0.9,
            ci_lo: 0.5961,
            ci_hi: 0.9821,
            mean_t: Some(3.5),
            runtime_s: 0.25,
            note: String::new(),
        }
    }

    #[test]
    fn estimate_rows_round_trip_through_the_header_shape() {
        let mut buf = Vec::new();
        write_estimate_csv(&mut buf, &[demo_row()]).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next(), Some(ESTIMATE_HEADER));
        let row = lines.next().unwrap();
        assert_eq!(row.split(',').count(), ESTIMATE_HEADER.split(',').count());
        assert_eq!(
            row,
            "phi-sweep,3,2,modified,0.05,0.01,,8x8x8@-4_-4_-4,10,7,0.9,0.5961,0.9821,3.5000,0.250,"
        );
        assert!(lines.next().is_none());
    }

    #[test]
    fn window_labels_stay_free_of_commas() {
        let w = BoxWindow::new(vec![-48, -48, -48], vec![96, 96, 96]).unwrap();
        let label = window_label(&w);
        assert_eq!(label, "96x96x96@-48_-48_-48");
        assert!(!label.contains(','));
    }

    #[test]
    fn rounds_csv_lists_exactly_the_occupied_sites() {
        let window = BoxWindow::new(vec![0, 0], vec![4, 4]).unwrap();
        let mut cfg = Configuration::filled(window, SiteState::OpenVacant);
        cfg.set(&[1, 1], SiteState::Occupied);
        cfg.set(&[2, 2], SiteState::Occupied);
        let result =
            run_fixpoint(&cfg, Rule::standard(2), &BoundaryPolicy::ClosedOutside).unwrap();
        let mut buf = Vec::new();
        write_rounds_csv(&mut buf, &result).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next(), Some("x1,x2,round"));
        let body: Vec<&str> = lines.collect();
        assert_eq!(body.len(), result.occupied_count());
        assert!(body.contains(&"1,1,0"));
        assert!(body.contains(&"1,2,1"));
    }

    #[test]
    fn curtain_csv_orders_sites_along_each_layer() {
        let window = BoxWindow::cube3([-8, -8, -8], [17, 17, 17]).unwrap();
        let pollution = SampledPollution {
            src: CouplingSource::new(3),
            q: 0.0,
        };
        let reach = reachable_set(&pollution, &window, 4);
        let curtain = curtain_boundary(&reach).expect("clean environment has a curtain");
        let mut buf = Vec::new();
        write_curtain_csv(&mut buf, &curtain).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next(), Some("k,i,x1,x2,x3"));
        let mut per_layer: std::collections::HashMap<i64, Vec<(usize, i64)>> =
            std::collections::HashMap::new();
        for line in lines {
            let cells: Vec<i64> = line.split(',').map(|c| c.parse().unwrap()).collect();
            per_layer
                .entry(cells[0])
                .or_default()
                .push((cells[1] as usize, cells[2]));
        }
        assert_eq!(per_layer.len(), curtain.layers.len());
        for entries in per_layer.values() {
            // positions consecutive from zero, first coordinate nondecreasing
            for (i, (pos, _)) in entries.iter().enumerate() {
                assert_eq!(*pos, i);
            }
            for pair in entries.windows(2) {
                assert!(pair[0].1 <= pair[1].1);
            }
        }
    }

    #[test]
    fn sail_csv_carries_every_site_and_the_flags() {
        let proto = ProtoBrick::from_aux(seeded_aux(3)).unwrap();
        let sail = match find_sail_constructive(&proto).unwrap() {
            crate::sail::SailOutcome::Found(s) => s,
            other => panic!("seeded aux brick must be good, got {other:?}"),
        };
        let mut buf = Vec::new();
        write_sail_csv(&mut buf, &sail).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let body: Vec<&str> = text.lines().skip(1).collect();
        assert_eq!(body.len(), sail.site_count());
        for line in &body {
            assert!(line.ends_with("true,true,true,true,true"));
        }
    }

    #[test]
    fn excellent_pbm_is_a_well_formed_p1_raster() {
        let window = BoxWindow::new(vec![-1, 0], vec![3, 2]).unwrap();
        let flags = vec![true, false, false, false, true, true];
        let field = ExcellentField::from_flags(window, flags, 0).unwrap();
        let mut buf = Vec::new();
        write_excellent_pbm(&mut buf, &field).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "P1");
        assert!(lines[1].starts_with('#'));
        assert_eq!(lines[2], "3 2");
        // top raster row is the higher second coordinate
        let top: Vec<&str> = lines[3].split(' ').collect();
        let bottom: Vec<&str> = lines[4].split(' ').collect();
        for (col, cell) in top.iter().enumerate() {
            let site = [-1 + col as i64, 1];
            assert_eq!(*cell == "1", field.is_excellent(&site));
        }
        for (col, cell) in bottom.iter().enumerate() {
            let site = [-1 + col as i64, 0];
            assert_eq!(*cell == "1", field.is_excellent(&site));
        }
    }

    #[test]
    fn excellent_csv_covers_the_whole_window() {
        let window = BoxWindow::new(vec![0, 0], vec![2, 2]).unwrap();
        let field =
            ExcellentField::from_flags(window, vec![true, false, true, false], 0).unwrap();
        let mut buf = Vec::new();
        write_excellent_csv(&mut buf, &field).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let body: Vec<&str> = text.lines().skip(1).collect();
        assert_eq!(body.len(), 4);
        assert!(body.contains(&"0,0,1"));
        assert!(body.contains(&"1,1,0"));
    }

    #[test]
    fn gadget_json_describes_all_seven_bricks() {
        let gadget = build_gadget(1).unwrap();
        let value = gadget_json(&gadget);
        let bricks = value["bricks"].as_array().unwrap();
        assert_eq!(bricks.len(), 7);
        assert_eq!(bricks[0]["role"], "base");
        assert_eq!(bricks[0]["dims"].as_array().unwrap().len(), 3);
        // base brick is canonical: corner at the origin, identity placement
        assert_eq!(bricks[0]["corner"], serde_json::json!([0, 0, 0]));
        assert_eq!(bricks[0]["eta"]["linear_code"], 0);
        let mut buf = Vec::new();
        write_gadget_json(&mut buf, &gadget).unwrap();
        let parsed: serde_json::Value =
            serde_json::from_slice(&buf).expect("emitted json parses back");
        assert_eq!(parsed, value);
    }
}
