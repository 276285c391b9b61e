//! `pbp`: experiment runner for the polluted bootstrap percolation lab.
//!
//! Exit codes: 0 success, 2 usage or invalid spec, 3 resource guard,
//! 4 I/O or snapshot format failure.

mod run;
mod spec;

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use pbp_core::{Error, Result};

use spec::ExperimentSpec;

#[derive(Parser)]
#[command(name = "pbp", version, about = "Polluted bootstrap percolation laboratory")]
struct Cli {
    #[command(subcommand)]
    verb: Verb,
}

#[derive(Args, Clone, Debug)]
struct Common {
    /// TOML experiment spec; explicit flags override file values
    #[arg(long, value_name = "FILE")]
    config: Option<PathBuf>,
    /// Root RNG seed, required for anything random
    #[arg(long)]
    seed: Option<u64>,
    /// Worker threads (default: all cores); results never depend on this
    #[arg(long, value_name = "N")]
    workers: Option<usize>,
    /// Directory for artifacts
    #[arg(long, value_name = "DIR", default_value = ".")]
    out_dir: PathBuf,
    /// Also emit SVG renderings
    #[arg(long)]
    svg: bool,
    /// Refuse runs whose estimated allocation exceeds this many bytes
    #[arg(long, value_name = "BYTES", default_value_t = 1 << 30)]
    max_bytes: u64,
}

#[derive(Args, Clone, Debug, Default)]
struct SpecFlags {
    /// Lattice dimension
    #[arg(long)]
    d: Option<usize>,
    /// Rule threshold
    #[arg(long)]
    r: Option<u32>,
    /// Neighborhood rule: "standard" or "modified"
    #[arg(long)]
    rule: Option<String>,
    /// Window extents, comma separated
    #[arg(long, value_delimiter = ',', value_name = "E1,E2,..")]
    window: Option<Vec<u64>>,
    /// Window origin; defaults to the centered box
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true, value_name = "O1,O2,..")]
    origin: Option<Vec<i64>>,
    /// Boundary: "closed" or "occupied-below:<axis>:<level>"
    #[arg(long)]
    boundary: Option<String>,
    /// Occupation density, or a comma-separated grid
    #[arg(long = "p", value_delimiter = ',', value_name = "P,..")]
    p_grid: Option<Vec<f64>>,
    /// Closure density, or a comma-separated grid
    #[arg(long = "q", value_delimiter = ',', value_name = "Q,..")]
    q_grid: Option<Vec<f64>>,
    /// Brick scale L
    #[arg(long)]
    scale: Option<u64>,
    /// Brick scales to sweep (sail demo)
    #[arg(long, value_delimiter = ',', value_name = "L1,L2,..")]
    scale_grid: Option<Vec<u64>>,
    /// Monte Carlo trials per grid point
    #[arg(long)]
    trials: Option<u64>,
    /// Curtain stabilization margin
    #[arg(long)]
    margin: Option<u64>,
    /// Largest diagonal ray offset in curtain statistics
    #[arg(long)]
    k_max: Option<i64>,
    /// Second-level occupation probability (nucleation)
    #[arg(long)]
    sprinkle: Option<f64>,
    /// Successor choice 0..=7, or "all"
    #[arg(long)]
    choice: Option<String>,
    /// Density of the synthetic excellent field
    #[arg(long)]
    density: Option<f64>,
    /// Activation demo on planted (true) or sampled (false) configurations
    #[arg(long, value_name = "BOOL")]
    planted: Option<bool>,
    /// Sail demo sampling: draw the coarse field directly at (p, q)
    #[arg(long, value_name = "BOOL")]
    aux_direct: Option<bool>,
}

impl SpecFlags {
    fn into_spec(self, seed: Option<u64>) -> ExperimentSpec {
        ExperimentSpec {
            kind: None,
            d: self.d,
            r: self.r,
            rule: self.rule,
            window: self.window,
            origin: self.origin,
            boundary: self.boundary,
            p_grid: self.p_grid,
            q_grid: self.q_grid,
            scale: self.scale,
            scale_grid: self.scale_grid,
            trials: self.trials,
            seed,
            margin: self.margin,
            k_max: self.k_max,
            sprinkle: self.sprinkle,
            choice: self.choice,
            density: self.density,
            planted: self.planted,
            aux_direct: self.aux_direct,
        }
    }
}

#[derive(Subcommand)]
enum Verb {
    /// Draw one product configuration and write it as a snapshot
    Sample {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        flags: SpecFlags,
    },
    /// Run the dynamics to its fixpoint from a snapshot or a fresh sample
    Evolve {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        flags: SpecFlags,
        /// Input snapshot; omit to sample from the parameters
        #[arg(long, value_name = "FILE")]
        snapshot: Option<PathBuf>,
    },
    /// Estimate the origin-occupation probability over a (p, q) grid
    Phi {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        flags: SpecFlags,
    },
    /// Boundary-curtain statistics plus a witness curtain rendering
    Curtain {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        flags: SpecFlags,
    },
    /// Sample proto-bricks and measure how often they are good
    Sail {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        flags: SpecFlags,
    },
    /// Transfer activation across a brick succession pair
    Activate {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        flags: SpecFlags,
    },
    /// Evaluate the renormalized field of excellent sites
    Excellent {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        flags: SpecFlags,
    },
    /// Sampled-environment nucleation: find a nucleus and walk it home
    Nucleate {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        flags: SpecFlags,
    },
    /// Print a named experiment spec as an editable TOML document
    Preset {
        /// One of: thm-main-trend, gm-d2-contrast, prop-32-scaling
        name: String,
    },
}

fn exit_code(e: &Error) -> i32 {
    match e {
        Error::SizeGuard { .. } => 3,
        Error::Io(_)
        | Error::BadMagic { .. }
        | Error::VersionMismatch { .. }
        | Error::Truncated { .. }
        | Error::HeaderCorrupt(_) => 4,
        _ => 2,
    }
}

fn resolve(common: &Common, flags: SpecFlags) -> Result<(ExperimentSpec, run::Ctx)> {
    if let Some(n) = common.workers {
        if n == 0 {
            return Err(Error::Parameter("workers must be positive".into()));
        }
        // Ignore the error when a pool already exists (tests call in-process).
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
    let file = match &common.config {
        Some(path) => ExperimentSpec::load(path)?,
        None => ExperimentSpec::default(),
    };
    let merged = file.merged_under(flags.into_spec(common.seed));
    let ctx = run::Ctx {
        out_dir: common.out_dir.clone(),
        svg: common.svg,
        max_bytes: common.max_bytes,
    };
    Ok((merged, ctx))
}

fn dispatch(verb: Verb) -> Result<()> {
    match verb {
        Verb::Sample { common, flags } => {
            let (spec, ctx) = resolve(&common, flags)?;
            run::sample(&spec, &ctx)
        }
        Verb::Evolve {
            common,
            flags,
            snapshot,
        } => {
            let (spec, ctx) = resolve(&common, flags)?;
            run::evolve(&spec, snapshot.as_deref(), &ctx)
        }
        Verb::Phi { common, flags } => {
            let (spec, ctx) = resolve(&common, flags)?;
            run::phi(&spec, &ctx)
        }
        Verb::Curtain { common, flags } => {
            let (spec, ctx) = resolve(&common, flags)?;
            run::curtain(&spec, &ctx)
        }
        Verb::Sail { common, flags } => {
            let (spec, ctx) = resolve(&common, flags)?;
            run::sail(&spec, &ctx)
        }
        Verb::Activate { common, flags } => {
            let (spec, ctx) = resolve(&common, flags)?;
            run::activate(&spec, &ctx)
        }
        Verb::Excellent { common, flags } => {
            let (spec, ctx) = resolve(&common, flags)?;
            run::excellent(&spec, &ctx)
        }
        Verb::Nucleate { common, flags } => {
            let (spec, ctx) = resolve(&common, flags)?;
            run::nucleate(&spec, &ctx)
        }
        Verb::Preset { name } => {
            let (preset, warning) = spec::preset(&name)?;
            if let Some(text) = warning {
                eprintln!("warning: {text}");
            }
            print!("{}", preset.to_toml());
            Ok(())
        }
    }
}

fn main() {
    let cli = Cli::parse();
    match dispatch(cli.verb) {
        Ok(()) => {}
        Err(e) => {
            eprintln!("error: {e}");
            std::process::exit(exit_code(&e));
        }
    }
}
