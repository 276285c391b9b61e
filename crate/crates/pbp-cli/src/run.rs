//! Verb implementations: resolve the merged spec, check the resource guard,
//! run the experiment, and emit artifacts under the output directory.

use std::fs::File;
use std::io::BufWriter;
use std::path::{Path, PathBuf};
use std::time::Instant;

use rayon::prelude::*;

use pbp_core::config::ProductField;
use pbp_core::coupling::CouplingSource;
use pbp_core::curtain::{curtain_statistics, stabilized_curtain, SampledPollution, StatParams};
use pbp_core::dynamics::{
    origin_occupied_estimate, run_fixpoint, BoundaryPolicy, EvolutionResult, PhiParams, Rule,
};
use pbp_core::export::{
    window_label, write_curtain_csv, write_estimate_csv, write_excellent_csv,
    write_excellent_pbm, write_rounds_csv, write_sail_csv, EstimateRow,
};
use pbp_core::renorm::{
    activation_experiment, build_gadget, excellent_field_from, nucleation_experiment,
    nucleation_window, oriented_path_search, planted::planted_pair, ExcellentField,
};
use pbp_core::sail::{find_sail_constructive, ProtoBrick, SailSet};
use pbp_core::snapshot::{read_snapshot_file, write_snapshot_file};
use pbp_core::svg::{curtain_svg, heatmap_svg, sail_svg};
use pbp_core::{BoxWindow, Configuration, Error, Result};

use crate::spec::{require, scalar, ExperimentSpec};

/// Resolved common flags.
pub struct Ctx {
    pub out_dir: PathBuf,
    pub svg: bool,
    pub max_bytes: u64,
}

impl Ctx {
    fn path(&self, name: &str) -> PathBuf {
        self.out_dir.join(name)
    }

    fn create(&self, name: &str) -> Result<BufWriter<File>> {
        std::fs::create_dir_all(&self.out_dir)?;
        Ok(BufWriter::new(File::create(self.path(name))?))
    }

    fn guard(&self, what: &'static str, bytes: u64) -> Result<()> {
        if bytes > self.max_bytes {
            return Err(Error::SizeGuard {
                what,
                actual: bytes,
                limit: self.max_bytes,
            });
        }
        Ok(())
    }
}

fn resolve_window(spec: &ExperimentSpec) -> Result<BoxWindow> {
    let extents = require(&spec.window, "window")?;
    if let Some(d) = spec.d {
        if d != extents.len() {
            return Err(Error::Parameter(format!(
                "d = {d} but window has {} extents",
                extents.len()
            )));
        }
    }
    match &spec.origin {
        Some(origin) => BoxWindow::new(origin.clone(), extents),
        None => BoxWindow::centered(extents),
    }
}

fn resolve_rule(spec: &ExperimentSpec) -> Result<(Rule, String, u32)> {
    let r = spec.r.unwrap_or(2);
    let name = spec.rule.clone().unwrap_or_else(|| "modified".into());
    let rule = match name.as_str() {
        "standard" => Rule::standard(r),
        "modified" => Rule::modified(r),
        other => {
            return Err(Error::Parameter(format!(
                "rule must be \"standard\" or \"modified\", got \"{other}\""
            )))
        }
    };
    Ok((rule, name, r))
}

fn resolve_boundary(spec: &ExperimentSpec) -> Result<BoundaryPolicy> {
    let text = spec.boundary.clone().unwrap_or_else(|| "closed".into());
    if text == "closed" {
        return Ok(BoundaryPolicy::ClosedOutside);
    }
    if let Some(rest) = text.strip_prefix("occupied-below:") {
        let parts: Vec<&str> = rest.split(':').collect();
        if let [axis, level] = parts.as_slice() {
            let axis: usize = axis
                .parse()
                .map_err(|_| Error::Parameter(format!("boundary axis \"{axis}\"")))?;
            let level: i64 = level
                .parse()
                .map_err(|_| Error::Parameter(format!("boundary level \"{level}\"")))?;
            return Ok(BoundaryPolicy::OccupiedLowerHalfSpace { axis, level });
        }
    }
    Err(Error::Parameter(format!(
        "boundary must be \"closed\" or \"occupied-below:<axis>:<level>\", got \"{text}\""
    )))
}

fn workers() -> u64 {
    rayon::current_num_threads() as u64
}

fn write_rows(ctx: &Ctx, name: &str, rows: &[EstimateRow]) -> Result<PathBuf> {
    let mut w = ctx.create(name)?;
    write_estimate_csv(&mut w, rows)?;
    Ok(ctx.path(name))
}

pub fn sample(spec: &ExperimentSpec, ctx: &Ctx) -> Result<()> {
    let window = resolve_window(spec)?;
    let p = scalar(&spec.p_grid, "p")?;
    let q = scalar(&spec.q_grid, "q")?;
    let seed = require(&spec.seed, "seed")?;
    ctx.guard("configuration bytes", 2 * window.volume() as u64)?;
    let cfg = Configuration::sample(window, p, q, CouplingSource::new(seed))?;
    std::fs::create_dir_all(&ctx.out_dir)?;
    let path = ctx.path("sample.pbp");
    write_snapshot_file(&cfg, &path)?;
    let (open, occupied, closed) = cfg.counts();
    println!(
        "sampled {} at p={p} q={q} seed={seed}: {occupied} occupied, {closed} closed, {open} open -> {}",
        window_label(cfg.window()),
        path.display()
    );
    Ok(())
}

pub fn evolve(spec: &ExperimentSpec, snapshot: Option<&Path>, ctx: &Ctx) -> Result<()> {
    let (rule, rule_name, _) = resolve_rule(spec)?;
    let boundary = resolve_boundary(spec)?;
    let cfg = match snapshot {
        Some(path) => read_snapshot_file(path)?,
        None => {
            let window = resolve_window(spec)?;
            let p = scalar(&spec.p_grid, "p")?;
            let q = scalar(&spec.q_grid, "q")?;
            let seed = require(&spec.seed, "seed")?;
            ctx.guard("configuration bytes", 2 * window.volume() as u64)?;
            Configuration::sample(window, p, q, CouplingSource::new(seed))?
        }
    };
    ctx.guard("evolution bytes", 16 * cfg.window().volume() as u64)?;
    let result = run_fixpoint(&cfg, rule, &boundary)?;
    let final_path = ctx.path("evolve.pbp");
    std::fs::create_dir_all(&ctx.out_dir)?;
    write_snapshot_file(&result.final_config, &final_path)?;
    let mut w = ctx.create("evolve_rounds.csv")?;
    write_rounds_csv(&mut w, &result)?;
    report_evolution(&result, &rule_name);
    println!(
        "wrote {} and {}",
        final_path.display(),
        ctx.path("evolve_rounds.csv").display()
    );
    Ok(())
}

fn report_evolution(result: &EvolutionResult, rule_name: &str) {
    let volume = result.final_config.window().volume();
    println!(
        "{rule_name} rule stabilized after {} rounds: {} of {volume} sites occupied",
        result.rounds_elapsed,
        result.occupied_count()
    );
}

pub fn phi(spec: &ExperimentSpec, ctx: &Ctx) -> Result<()> {
    spec.check_kind("phi-sweep")?;
    let window = resolve_window(spec)?;
    let (rule, rule_name, r) = resolve_rule(spec)?;
    let boundary = resolve_boundary(spec)?;
    let p_grid = require(&spec.p_grid, "p_grid")?;
    let q_grid = require(&spec.q_grid, "q_grid")?;
    let trials = require(&spec.trials, "trials")?;
    let seed = require(&spec.seed, "seed")?;
    if p_grid.is_empty() || q_grid.is_empty() {
        return Err(Error::Parameter("p_grid and q_grid must be nonempty".into()));
    }
    ctx.guard(
        "sweep bytes",
        16 * window.volume() as u64 * workers().min(trials.max(1)),
    )?;

    let d = window.dim();
    let mut rows = Vec::new();
    let mut values = Vec::new();
    for q in &q_grid {
        for p in &p_grid {
            let start = Instant::now();
            let est = origin_occupied_estimate(&PhiParams {
                window: window.clone(),
                rule,
                boundary: boundary.clone(),
                p: *p,
                q: *q,
                trials,
                seed,
            })?;
            values.push(est.estimate);
            println!(
                "phi(p={p}, q={q}) = {:.4} [{:.4}, {:.4}] from {trials} trials",
                est.estimate, est.ci_lo, est.ci_hi
            );
            rows.push(EstimateRow {
                kind: "phi-sweep".into(),
                d,
                r,
                rule: rule_name.clone(),
                p: *p,
                q: *q,
                scale: None,
                window: window_label(&window),
                trials,
                seed,
                estimate: est.estimate,
                ci_lo: est.ci_lo,
                ci_hi: est.ci_hi,
                mean_t: est.mean_rounds,
                runtime_s: start.elapsed().as_secs_f64(),
                note: String::new(),
            });
        }
    }
    let csv = write_rows(ctx, "phi.csv", &rows)?;
    println!("wrote {}", csv.display());
    if ctx.svg {
        let title = format!("phi estimate, {rule_name} r={r}, {}", window_label(&window));
        let svg = heatmap_svg(&p_grid, &q_grid, &values, &title)?;
        std::fs::write(ctx.path("phi.svg"), svg)?;
        println!("wrote {}", ctx.path("phi.svg").display());
    }
    Ok(())
}

pub fn curtain(spec: &ExperimentSpec, ctx: &Ctx) -> Result<()> {
    spec.check_kind("curtain-stats")?;
    let window = resolve_window(spec)?;
    let q = scalar(&spec.q_grid, "q")?;
    let margin = spec.margin.unwrap_or(8);
    let k_max = spec.k_max.unwrap_or(8);
    let trials = require(&spec.trials, "trials")?;
    let seed = require(&spec.seed, "seed")?;
    let padded = window.grown(margin)?.volume() as u64;
    ctx.guard("reach set bytes", 48 * padded * workers().min(trials.max(1)))?;

    let start = Instant::now();
    let stats = curtain_statistics(&StatParams {
        q,
        window: window.clone(),
        margin,
        trials,
        seed,
        k_max,
    })?;
    let runtime = start.elapsed().as_secs_f64();
    let bound_flag = if stats.within_bound { "pass" } else { "fail" };
    println!(
        "P((1,1,0) not in D) ~ {:.5} [{:.5}, {:.5}] vs 56q = {:.5}: {bound_flag} \
         ({} indeterminate of {trials})",
        stats.miss_estimate, stats.miss_ci.0, stats.miss_ci.1, stats.bound_56q, stats.indeterminate
    );
    if let Some(rate) = stats.decay_rate {
        println!("ray tail log-slope {rate:.3} per step");
    }
    let row = EstimateRow {
        kind: "curtain-stats".into(),
        d: 3,
        r: 2,
        rule: "-".into(),
        p: 0.0,
        q,
        scale: None,
        window: window_label(&window),
        trials,
        seed,
        estimate: stats.miss_estimate,
        ci_lo: stats.miss_ci.0,
        ci_hi: stats.miss_ci.1,
        mean_t: None,
        runtime_s: runtime,
        note: format!("bound56q={bound_flag};indeterminate={}", stats.indeterminate),
    };
    let csv = write_rows(ctx, "curtain_stats.csv", &[row])?;
    println!("wrote {}", csv.display());

    let mut w = ctx.create("curtain_tails.csv")?;
    {
        use std::io::Write;
        writeln!(w, "k,hits,trials,estimate,ci_lo,ci_hi")?;
        for t in &stats.tails {
            writeln!(
                w,
                "{},{},{},{},{},{}",
                t.k, t.hits, trials, t.estimate, t.ci_lo, t.ci_hi
            )?;
        }
    }
    println!("wrote {}", ctx.path("curtain_tails.csv").display());

    // one witness boundary, drawn from the first trial's pollution
    let pollution = SampledPollution {
        src: CouplingSource::new(seed).derive(0),
        q,
    };
    let (witness, accepted) = stabilized_curtain(&pollution, &window, margin)?;
    match witness {
        Some(curtain) => {
            let mut w = ctx.create("curtain_layers.csv")?;
            write_curtain_csv(&mut w, &curtain)?;
            println!(
                "witness curtain stabilized at margin {accepted}: {} layers -> {}",
                curtain.layers.len(),
                ctx.path("curtain_layers.csv").display()
            );
            if ctx.svg {
                std::fs::write(ctx.path("curtain.svg"), curtain_svg(&curtain)?)?;
                println!("wrote {}", ctx.path("curtain.svg").display());
            }
        }
        None => println!("witness boundary misses the window; no layer artifacts"),
    }
    Ok(())
}

pub fn sail(spec: &ExperimentSpec, ctx: &Ctx) -> Result<()> {
    spec.check_kind("sail-demo")?;
    let scales = match (&spec.scale_grid, spec.scale) {
        (Some(grid), _) => grid.clone(),
        (None, Some(l)) => vec![l],
        (None, None) => vec![4],
    };
    let p_grid = require(&spec.p_grid, "p_grid")?;
    let q_grid = require(&spec.q_grid, "q_grid")?;
    let trials = require(&spec.trials, "trials")?;
    let seed = require(&spec.seed, "seed")?;
    let aux_direct = spec.aux_direct.unwrap_or(true);
    let mode = if aux_direct { "aux-direct" } else { "fine" };
    let max_scale = *scales.iter().max().unwrap_or(&4);
    let site_bytes = if aux_direct { 128 } else { 2048 * 4 };
    ctx.guard(
        "brick bytes",
        site_bytes * max_scale.pow(3) * workers().min(trials.max(1)),
    )?;

    let root = CouplingSource::new(seed);
    let mut rows = Vec::new();
    let mut first_sail: Option<(u64, SailSet)> = None;
    for (si, &scale) in scales.iter().enumerate() {
        for (qi, &q) in q_grid.iter().enumerate() {
            for (pi, &p) in p_grid.iter().enumerate() {
                let start = Instant::now();
                let point = root.derive(((si * q_grid.len() + qi) * p_grid.len() + pi) as u64);
                let outcomes: Result<Vec<Option<SailSet>>> = (0..trials)
                    .into_par_iter()
                    .map(|trial| {
                        let src = point.derive(trial);
                        let proto = if aux_direct {
                            ProtoBrick::sample_direct(scale, p, q, src)?
                        } else {
                            let cfg = Configuration::sample(
                                pbp_core::sail::brick_window(scale),
                                p,
                                q,
                                src,
                            )?;
                            ProtoBrick::from_brick(&cfg)?
                        };
                        Ok(find_sail_constructive(&proto)?.sail().cloned())
                    })
                    .collect();
                let outcomes = outcomes?;
                let good = outcomes.iter().flatten().count() as u64;
                if first_sail.is_none() {
                    if let Some(s) = outcomes.into_iter().flatten().next() {
                        first_sail = Some((scale, s));
                    }
                }
                let (ci_lo, ci_hi) = pbp_core::stats::wilson_interval(good, trials);
                let estimate = good as f64 / trials as f64;
                println!(
                    "L={scale} p={p} q={q} [{mode}]: {good}/{trials} bricks good ({estimate:.3})"
                );
                rows.push(EstimateRow {
                    kind: "sail-demo".into(),
                    d: 3,
                    r: 2,
                    rule: "modified".into(),
                    p,
                    q,
                    scale: Some(scale),
                    window: window_label(&pbp_core::sail::proto_window(scale)),
                    trials,
                    seed,
                    estimate,
                    ci_lo,
                    ci_hi,
                    mean_t: None,
                    runtime_s: start.elapsed().as_secs_f64(),
                    note: mode.into(),
                });
            }
        }
    }
    let csv = write_rows(ctx, "sail_rates.csv", &rows)?;
    println!("wrote {}", csv.display());
    match first_sail {
        Some((scale, sail_set)) => {
            let mut w = ctx.create("sail_sites.csv")?;
            write_sail_csv(&mut w, &sail_set)?;
            println!(
                "first good sail (L={scale}, {} sites) -> {}",
                sail_set.site_count(),
                ctx.path("sail_sites.csv").display()
            );
            if ctx.svg {
                std::fs::write(ctx.path("sail.svg"), sail_svg(&sail_set)?)?;
                println!("wrote {}", ctx.path("sail.svg").display());
            }
        }
        None => println!("no good brick found; no sail artifacts"),
    }
    Ok(())
}

fn parse_choices(spec: &ExperimentSpec) -> Result<Vec<usize>> {
    match spec.choice.as_deref() {
        None | Some("all") => Ok((0..8).collect()),
        Some(text) => {
            let c: usize = text.parse().map_err(|_| {
                Error::Parameter(format!("choice must be 0..=7 or \"all\", got \"{text}\""))
            })?;
            if c > 7 {
                return Err(Error::Parameter(format!("choice must be 0..=7, got {c}")));
            }
            Ok(vec![c])
        }
    }
}

pub fn activate(spec: &ExperimentSpec, ctx: &Ctx) -> Result<()> {
    spec.check_kind("activation-demo")?;
    let scale = spec.scale.unwrap_or(3);
    let choices = parse_choices(spec)?;
    let planted = spec.planted.unwrap_or(true);
    let mut rows = Vec::new();
    if planted {
        let volume = planted_pair(scale, 0)?.0.window().volume() as u64;
        ctx.guard("activation bytes", 8 * volume)?;
        for &choice in &choices {
            let start = Instant::now();
            let (cfg, pred, succ) = planted_pair(scale, choice)?;
            let report = activation_experiment(&cfg, &pred, &succ)?;
            println!(
                "choice {choice}: planted pair at L={scale} {} in {} rounds",
                if report.activated { "activated" } else { "did not activate" },
                report.rounds
            );
            rows.push(EstimateRow {
                kind: "activation-demo".into(),
                d: 3,
                r: 2,
                rule: "modified".into(),
                p: 0.0,
                q: 0.0,
                scale: Some(scale),
                window: window_label(&report.region),
                trials: 1,
                seed: 0,
                estimate: report.activated.into(),
                ci_lo: 0.0,
                ci_hi: 1.0,
                mean_t: Some(report.rounds as f64),
                runtime_s: start.elapsed().as_secs_f64(),
                note: format!("planted;choice={choice}"),
            });
        }
    } else {
        let p = scalar(&spec.p_grid, "p")?;
        let q = scalar(&spec.q_grid, "q")?;
        let trials = require(&spec.trials, "trials")?;
        let seed = require(&spec.seed, "seed")?;
        let root = CouplingSource::new(seed);
        for &choice in &choices {
            let start = Instant::now();
            let (geometry, pred, succ) = planted_pair(scale, choice)?;
            let window = geometry.window().clone();
            ctx.guard(
                "activation bytes",
                8 * window.volume() as u64 * workers().min(trials.max(1)),
            )?;
            let outcomes: Result<Vec<(bool, bool, u32)>> = (0..trials)
                .into_par_iter()
                .map(|trial| {
                    let src = root.derive((choice as u64) << 32 | trial);
                    let cfg = Configuration::sample(window.clone(), p, q, src)?;
                    match activation_experiment(&cfg, &pred, &succ) {
                        Ok(rep) => Ok((true, rep.activated, rep.rounds)),
                        Err(Error::Precondition(_)) => Ok((false, false, 0)),
                        Err(e) => Err(e),
                    }
                })
                .collect();
            let outcomes = outcomes?;
            let good = outcomes.iter().filter(|(g, _, _)| *g).count() as u64;
            let activated = outcomes.iter().filter(|(_, a, _)| *a).count() as u64;
            let round_sum: u64 = outcomes
                .iter()
                .filter(|(_, a, _)| *a)
                .map(|&(_, _, r)| r as u64)
                .sum();
            let (ci_lo, ci_hi) = pbp_core::stats::wilson_interval(activated, trials);
            println!(
                "choice {choice}: {good}/{trials} sampled pairs good, {activated} activated"
            );
            rows.push(EstimateRow {
                kind: "activation-demo".into(),
                d: 3,
                r: 2,
                rule: "modified".into(),
                p,
                q,
                scale: Some(scale),
                window: window_label(&window),
                trials,
                seed,
                estimate: activated as f64 / trials as f64,
                ci_lo,
                ci_hi,
                mean_t: (activated > 0).then(|| round_sum as f64 / activated as f64),
                runtime_s: start.elapsed().as_secs_f64(),
                note: format!("sampled;choice={choice};good={good}"),
            });
        }
    }
    let csv = write_rows(ctx, "activation.csv", &rows)?;
    println!("wrote {}", csv.display());
    Ok(())
}

pub fn excellent(spec: &ExperimentSpec, ctx: &Ctx) -> Result<()> {
    spec.check_kind("excellent-field")?;
    let extents = require(&spec.window, "window")?;
    if extents.len() != 2 {
        return Err(Error::Parameter(
            "excellent fields live on two-dimensional windows".into(),
        ));
    }
    let window = match &spec.origin {
        Some(origin) => BoxWindow::new(origin.clone(), extents)?,
        None => BoxWindow::centered(extents)?,
    };
    let seed = require(&spec.seed, "seed")?;

    let start = Instant::now();
    let (field, p_col, q_col, note_mode) = match spec.density {
        Some(density) => {
            ctx.guard("field bytes", window.volume() as u64)?;
            let field = ExcellentField::bernoulli(window.clone(), density, CouplingSource::new(seed))?;
            (field, density, 0.0, "bernoulli".to_string())
        }
        None => {
            let scale = require(&spec.scale, "scale")?;
            let p = scalar(&spec.p_grid, "p")?;
            let q = scalar(&spec.q_grid, "q")?;
            let brick_volume = 2048 * scale.pow(3);
            ctx.guard(
                "gadget evaluation bytes",
                4 * brick_volume * workers() + window.volume() as u64,
            )?;
            let env = ProductField {
                src: CouplingSource::new(seed),
                p,
                q,
            };
            let field = excellent_field_from(&env, scale, &window)?;
            (field, p, q, "gadget".to_string())
        }
    };
    let runtime = start.elapsed().as_secs_f64();
    let density = field.count() as f64 / window.volume() as f64;
    println!(
        "{} of {} renormalized sites excellent ({density:.3})",
        field.count(),
        window.volume()
    );

    let mut w = ctx.create("excellent.pbm")?;
    write_excellent_pbm(&mut w, &field)?;
    let mut w = ctx.create("excellent_sites.csv")?;
    write_excellent_csv(&mut w, &field)?;
    println!(
        "wrote {} and {}",
        ctx.path("excellent.pbm").display(),
        ctx.path("excellent_sites.csv").display()
    );

    let origin = [0i64, 0];
    let probe = if window.contains(&origin) {
        origin
    } else {
        [window.origin()[0], window.origin()[1]]
    };
    let path = oriented_path_search(&field, &probe)?;
    println!(
        "oriented path through ({},{}): {} forward, {} backward, spans={}",
        probe[0], probe[1], path.forward_length, path.backward_sites, path.spans
    );

    let row = EstimateRow {
        kind: "excellent-field".into(),
        d: 3,
        r: 2,
        rule: "modified".into(),
        p: p_col,
        q: q_col,
        scale: (field.scale() > 0).then(|| field.scale()),
        window: window_label(&window),
        trials: window.volume() as u64,
        seed,
        estimate: density,
        ci_lo: 0.0,
        ci_hi: 1.0,
        mean_t: None,
        runtime_s: runtime,
        note: format!("{note_mode};spans={}", path.spans),
    };
    let csv = write_rows(ctx, "excellent.csv", &[row])?;
    println!("wrote {}", csv.display());
    Ok(())
}

pub fn nucleate(spec: &ExperimentSpec, ctx: &Ctx) -> Result<()> {
    spec.check_kind("nucleation")?;
    let scale = require(&spec.scale, "scale")?;
    let extents = require(&spec.window, "window")?;
    if extents.len() != 2 {
        return Err(Error::Parameter(
            "the nucleation window is two-dimensional".into(),
        ));
    }
    let window = match &spec.origin {
        Some(origin) => BoxWindow::new(origin.clone(), extents)?,
        None => BoxWindow::centered(extents)?,
    };
    let p = scalar(&spec.p_grid, "p")?;
    let q = scalar(&spec.q_grid, "q")?;
    let sprinkle = spec.sprinkle.unwrap_or(0.0);
    let seed = require(&spec.seed, "seed")?;

    let union = nucleation_window(scale, &window)?;
    ctx.guard("environment bytes", 3 * union.volume() as u64)?;
    println!(
        "environment {} ({} sites) for renormalized window {}",
        window_label(&union),
        union.volume(),
        window_label(&window)
    );

    let gadget = build_gadget(scale)?;
    std::fs::create_dir_all(&ctx.out_dir)?;
    let mut w = ctx.create("gadget.json")?;
    pbp_core::export::write_gadget_json(&mut w, &gadget)?;
    println!("wrote {}", ctx.path("gadget.json").display());

    let start = Instant::now();
    let cfg = Configuration::sample(union, p, q, CouplingSource::new(seed))?;
    let (estimate, mean_t, note) =
        match nucleation_experiment(&cfg, scale, &window, sprinkle) {
            Ok(report) => {
                let activated = report.all_activated();
                println!(
                    "nucleus at ({}, {}), {} hops, {} bricks activated, complete={activated}",
                    report.nucleus[0],
                    report.nucleus[1],
                    report.hops.len(),
                    report.activated.len()
                );
                let rounds: u64 = report.hops.iter().map(|h| h.rounds as u64).sum();
                let mean = (!report.hops.is_empty())
                    .then(|| rounds as f64 / report.hops.len() as f64);
                (
                    f64::from(u8::from(activated)),
                    mean,
                    format!(
                        "nucleus={}_{};hops={}",
                        report.nucleus[0],
                        report.nucleus[1],
                        report.hops.len()
                    ),
                )
            }
            Err(Error::Precondition(msg)) => {
                println!("no nucleation: {msg}");
                (0.0, None, "origin-not-excellent".into())
            }
            Err(Error::Inconclusive(msg)) => {
                println!("inconclusive: {msg}");
                (0.0, None, "inconclusive".into())
            }
            Err(e) => return Err(e),
        };
    let row = EstimateRow {
        kind: "nucleation".into(),
        d: 3,
        r: 2,
        rule: "modified".into(),
        p,
        q,
        scale: Some(scale),
        window: window_label(&window),
        trials: 1,
        seed,
        estimate,
        ci_lo: 0.0,
        ci_hi: 1.0,
        mean_t,
        runtime_s: start.elapsed().as_secs_f64(),
        note: format!("sprinkle={sprinkle};{note}"),
    };
    let csv = write_rows(ctx, "nucleation.csv", &[row])?;
    println!("wrote {}", csv.display());
    Ok(())
}
