//! Self-contained SVG emission: parameter-sweep heatmaps, layered curtain
//! polylines, and isometric sail renderings. No plotting dependency; the
//! emitters build the document text directly.

use std::fmt::Write as _;

use crate::curtain::Curtain;
use crate::error::{Error, Result};
use crate::sail::SailSet;

/// Three-stop color ramp (dark violet, teal, yellow) for values in [0, 1].
fn ramp(t: f64) -> (u8, u8, u8) {
    let t = t.clamp(0.0, 1.0);
    let stops = [(68.0, 1.0, 84.0), (33.0, 145.0, 140.0), (253.0, 231.0, 37.0)];
    let (lo, hi, s) = if t < 0.5 {
        (stops[0], stops[1], t * 2.0)
    } else {
        (stops[1], stops[2], (t - 0.5) * 2.0)
    };
    let mix = |a: f64, b: f64| (a + (b - a) * s).round() as u8;
    (mix(lo.0, hi.0), mix(lo.1, hi.1), mix(lo.2, hi.2))
}

fn hex(rgb: (u8, u8, u8)) -> String {
    format!("#{:02x}{:02x}{:02x}", rgb.0, rgb.1, rgb.2)
}

fn scaled(rgb: (u8, u8, u8), f: f64) -> (u8, u8, u8) {
    let s = |c: u8| ((c as f64) * f).clamp(0.0, 255.0).round() as u8;
    (s(rgb.0), s(rgb.1), s(rgb.2))
}

fn document(width: f64, height: f64, body: String) -> String {
    format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{w:.0}\" height=\"{h:.0}\" \
         viewBox=\"0 0 {w:.0} {h:.0}\">\n<rect width=\"{w:.0}\" height=\"{h:.0}\" \
         fill=\"white\"/>\n{body}</svg>\n",
        w = width,
        h = height,
        body = body
    )
}

fn text(x: f64, y: f64, size: f64, anchor: &str, content: &str) -> String {
    format!(
        "<text x=\"{x:.1}\" y=\"{y:.1}\" font-family=\"monospace\" font-size=\"{size:.0}\" \
         text-anchor=\"{anchor}\">{content}</text>\n"
    )
}

/// Heatmap over a (p, q) parameter grid. `values[qi * p_grid.len() + pi]`
/// holds the estimate for `(p_grid[pi], q_grid[qi])`; values are clamped to
/// [0, 1] for coloring and printed in each cell.
pub fn heatmap_svg(p_grid: &[f64], q_grid: &[f64], values: &[f64], title: &str) -> Result<String> {
    if p_grid.is_empty() || q_grid.is_empty() {
        return Err(Error::Parameter("heatmap grids must be nonempty".into()));
    }
    if values.len() != p_grid.len() * q_grid.len() {
        return Err(Error::Parameter(format!(
            "heatmap needs {} values, got {}",
            p_grid.len() * q_grid.len(),
            values.len()
        )));
    }
    let cell = 72.0;
    let left = 86.0;
    let top = 40.0;
    let width = left + cell * p_grid.len() as f64 + 20.0;
    let height = top + cell * q_grid.len() as f64 + 46.0;
    let mut body = String::new();
    body.push_str(&text(width / 2.0, 24.0, 14.0, "middle", title));
    for (qi, q) in q_grid.iter().enumerate() {
        let y = top + cell * qi as f64;
        body.push_str(&text(
            left - 8.0,
            y + cell / 2.0 + 4.0,
            12.0,
            "end",
            &format!("q={q}"),
        ));
        for (pi, _) in p_grid.iter().enumerate() {
            let v = values[qi * p_grid.len() + pi];
            let x = left + cell * pi as f64;
            let fill = hex(ramp(v));
            let _ = writeln!(
                body,
                "<rect x=\"{x:.1}\" y=\"{y:.1}\" width=\"{cell:.1}\" height=\"{cell:.1}\" \
                 fill=\"{fill}\" stroke=\"white\"/>"
            );
            let label_color = if v < 0.55 { "white" } else { "black" };
            let _ = writeln!(
                body,
                "<text x=\"{:.1}\" y=\"{:.1}\" font-family=\"monospace\" font-size=\"12\" \
                 text-anchor=\"middle\" fill=\"{label_color}\">{v:.3}</text>",
                x + cell / 2.0,
                y + cell / 2.0 + 4.0,
            );
        }
    }
    for (pi, p) in p_grid.iter().enumerate() {
        body.push_str(&text(
            left + cell * pi as f64 + cell / 2.0,
            top + cell * q_grid.len() as f64 + 18.0,
            12.0,
            "middle",
            &format!("p={p}"),
        ));
    }
    Ok(document(width, height, body))
}

/// Layered curtain rendering: each layer's staircase path becomes one
/// polyline in the first two coordinates, colored by layer, with the layer
/// index listed in a legend column.
pub fn curtain_svg(curtain: &Curtain) -> Result<String> {
    let sites = curtain.layers.iter().flat_map(|l| l.path.iter());
    let (mut lo1, mut hi1, mut lo2, mut hi2) = (i64::MAX, i64::MIN, i64::MAX, i64::MIN);
    for s in sites {
        lo1 = lo1.min(s[0]);
        hi1 = hi1.max(s[0]);
        lo2 = lo2.min(s[1]);
        hi2 = hi2.max(s[1]);
    }
    if lo1 > hi1 {
        return Err(Error::Parameter("curtain has no layer sites to draw".into()));
    }
    let step = 14.0;
    let pad = 30.0;
    let legend = 70.0;
    // Screen y grows downward; flip the second coordinate so +x2 points up.
    let sx = |x1: i64| pad + (x1 - lo1) as f64 * step;
    let sy = |x2: i64| pad + (hi2 - x2) as f64 * step;
    let width = pad * 2.0 + (hi1 - lo1) as f64 * step + legend;
    let height = pad * 2.0 + (hi2 - lo2) as f64 * step;
    let n = curtain.layers.len().max(2) as f64;
    let mut body = String::new();
    for (i, layer) in curtain.layers.iter().enumerate() {
        let color = hex(ramp(i as f64 / (n - 1.0)));
        let points: Vec<String> = layer
            .path
            .iter()
            .map(|s| format!("{:.1},{:.1}", sx(s[0]), sy(s[1])))
            .collect();
        let _ = writeln!(
            body,
            "<polyline points=\"{}\" fill=\"none\" stroke=\"{color}\" stroke-width=\"2\" \
             stroke-linejoin=\"round\"/>",
            points.join(" ")
        );
        for s in &layer.path {
            let _ = writeln!(
                body,
                "<circle cx=\"{:.1}\" cy=\"{:.1}\" r=\"2.2\" fill=\"{color}\"/>",
                sx(s[0]),
                sy(s[1])
            );
        }
        body.push_str(&text(
            width - legend + 8.0,
            pad + 14.0 * i as f64,
            12.0,
            "start",
            &format!("k={}", layer.k),
        ));
    }
    Ok(document(width, height, body))
}

const ISO_U: f64 = 13.0;
const ISO_V: f64 = 6.5;
const ISO_H: f64 = 11.0;

fn iso_point(x: f64, y: f64, z: f64) -> (f64, f64) {
    ((x - y) * ISO_U, (x + y) * ISO_V - z * ISO_H)
}

fn polygon(points: &[(f64, f64)], fill: &str, ox: f64, oy: f64) -> String {
    let pts: Vec<String> = points
        .iter()
        .map(|(u, v)| format!("{:.1},{:.1}", u + ox, v + oy))
        .collect();
    format!(
        "<polygon points=\"{}\" fill=\"{fill}\" stroke=\"#333333\" stroke-width=\"0.5\"/>\n",
        pts.join(" ")
    )
}

/// Isometric sail rendering: every proto-site is drawn as a unit cube with
/// the camera on the (1,1,1) diagonal, colored by layer.
pub fn sail_svg(sail: &SailSet) -> Result<String> {
    let mut sites: Vec<(usize, [i64; 3])> = Vec::new();
    for (li, layer) in sail.layers.iter().enumerate() {
        for s in layer {
            sites.push((li, *s));
        }
    }
    if sites.is_empty() {
        return Err(Error::Parameter("sail has no sites to draw".into()));
    }
    // Painter's order: the camera sits on +(1,1,1), so larger coordinate sum
    // means nearer; draw far cubes first.
    sites.sort_by_key(|(_, s)| (s[0] + s[1] + s[2], s[2], s[0]));

    let (mut lo_u, mut hi_u, mut lo_v, mut hi_v) = (f64::MAX, f64::MIN, f64::MAX, f64::MIN);
    let mut corners = Vec::new();
    for (_, s) in &sites {
        for dz in [0.0, 1.0] {
            for dy in [0.0, 1.0] {
                for dx in [0.0, 1.0] {
                    let (u, v) =
                        iso_point(s[0] as f64 + dx, s[1] as f64 + dy, s[2] as f64 + dz);
                    lo_u = lo_u.min(u);
                    hi_u = hi_u.max(u);
                    lo_v = lo_v.min(v);
                    hi_v = hi_v.max(v);
                    corners.push((u, v));
                }
            }
        }
    }
    let pad = 16.0;
    let ox = pad - lo_u;
    let oy = pad - lo_v;
    let width = hi_u - lo_u + 2.0 * pad;
    let height = hi_v - lo_v + 2.0 * pad;

    let layers = sail.layers.len().max(2) as f64;
    let mut body = String::new();
    for (li, s) in &sites {
        let base = ramp(*li as f64 / (layers - 1.0));
        let (x, y, z) = (s[0] as f64, s[1] as f64, s[2] as f64);
        let c = |dx: f64, dy: f64, dz: f64| iso_point(x + dx, y + dy, z + dz);
        // Faces visible from the camera: top, +e1, +e2.
        let top = [c(0.0, 0.0, 1.0), c(1.0, 0.0, 1.0), c(1.0, 1.0, 1.0), c(0.0, 1.0, 1.0)];
        let right = [c(1.0, 0.0, 0.0), c(1.0, 1.0, 0.0), c(1.0, 1.0, 1.0), c(1.0, 0.0, 1.0)];
        let left = [c(0.0, 1.0, 0.0), c(1.0, 1.0, 0.0), c(1.0, 1.0, 1.0), c(0.0, 1.0, 1.0)];
        body.push_str(&polygon(&top, &hex(scaled(base, 1.0)), ox, oy));
        body.push_str(&polygon(&right, &hex(scaled(base, 0.78)), ox, oy));
        body.push_str(&polygon(&left, &hex(scaled(base, 0.55)), ox, oy));
    }
    Ok(document(width, height, body))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coupling::CouplingSource;
    use crate::curtain::{curtain_boundary, reachable_set, SampledPollution};
    use crate::sail::testutil::seeded_aux;
    use crate::sail::{find_sail_constructive, ProtoBrick, SailOutcome};

    #[test]
    fn heatmap_has_one_cell_per_grid_point() {
        let svg = heatmap_svg(
            &[0.05],
            &[0.2, 0.05, 0.01],
            &[0.1, 0.55, 0.97],
            "phi sweep",
        )
        .unwrap();
        assert!(svg.starts_with("<svg "));
        assert!(svg.trim_end().ends_with("</svg>"));
        // background rect plus three cells
        assert_eq!(svg.matches("<rect").count(), 4);
        assert!(svg.contains("q=0.05"));
        assert!(svg.contains("p=0.05"));
        assert!(svg.contains("0.970"));
    }

    #[test]
    fn heatmap_rejects_mismatched_values() {
        assert!(heatmap_svg(&[0.1], &[0.1], &[], "x").is_err());
        assert!(heatmap_svg(&[], &[0.1], &[0.5], "x").is_err());
    }

    #[test]
    fn curtain_rendering_emits_one_polyline_per_layer() {
        let window = crate::BoxWindow::cube3([-8, -8, -8], [17, 17, 17]).unwrap();
        let pollution = SampledPollution {
            src: CouplingSource::new(5),
            q: 0.0,
        };
        let reach = reachable_set(&pollution, &window, 4);
        let curtain = curtain_boundary(&reach).unwrap();
        let svg = curtain_svg(&curtain).unwrap();
        assert_eq!(svg.matches("<polyline").count(), curtain.layers.len());
        for layer in &curtain.layers {
            assert!(svg.contains(&format!("k={}", layer.k)));
        }
    }

    #[test]
    fn sail_rendering_draws_three_faces_per_site() {
        let proto = ProtoBrick::from_aux(seeded_aux(3)).unwrap();
        let sail = match find_sail_constructive(&proto).unwrap() {
            SailOutcome::Found(s) => s,
            other => panic!("seeded brick should be good, got {other:?}"),
        };
        let svg = sail_svg(&sail).unwrap();
        assert_eq!(svg.matches("<polygon").count(), 3 * sail.site_count());
        assert!(!svg.contains("NaN"));
    }
}
