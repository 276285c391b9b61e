//! Experiment specs: the TOML document format, flag merging over file
//! values, kind-specific validation, and the named presets.

use std::path::Path;

use pbp_core::{Error, Result};
use serde::{Deserialize, Serialize};

pub const KINDS: [&str; 6] = [
    "phi-sweep",
    "curtain-stats",
    "sail-demo",
    "activation-demo",
    "excellent-field",
    "nucleation",
];

/// One experiment, fully described. Every field is optional here; verbs
/// resolve the fields they need and reject incomplete specs by field name.
#[derive(Debug, Clone, Default, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct ExperimentSpec {
    pub kind: Option<String>,
    pub d: Option<usize>,
    pub r: Option<u32>,
    /// "standard" or "modified".
    pub rule: Option<String>,
    /// Window extents per axis; the origin defaults to the centered box.
    pub window: Option<Vec<u64>>,
    pub origin: Option<Vec<i64>>,
    /// "closed" or "occupied-below:<axis>:<level>" (axis 0-based).
    pub boundary: Option<String>,
    pub p_grid: Option<Vec<f64>>,
    pub q_grid: Option<Vec<f64>>,
    /// Brick scale L.
    pub scale: Option<u64>,
    /// Brick scales to sweep; defaults to [scale].
    pub scale_grid: Option<Vec<u64>>,
    pub trials: Option<u64>,
    pub seed: Option<u64>,
    /// Curtain stabilization margin.
    pub margin: Option<u64>,
    /// Largest ray offset k in curtain tail statistics.
    pub k_max: Option<i64>,
    /// Second-level occupation probability for nucleation.
    pub sprinkle: Option<f64>,
    /// Successor choice for activation demos: "0".."7" or "all".
    pub choice: Option<String>,
    /// Density of the synthetic excellent field.
    pub density: Option<f64>,
    /// Activation demo on planted (true) or sampled (false) configurations.
    pub planted: Option<bool>,
    /// Sail demo sampling: true draws the coarse field directly at
    /// (p, q) = (p_hat, q_hat); false samples bricks at fine (p, q).
    pub aux_direct: Option<bool>,
}

impl ExperimentSpec {
    pub fn load(path: &Path) -> Result<ExperimentSpec> {
        let text = std::fs::read_to_string(path)?;
        toml::from_str(&text)
            .map_err(|e| Error::Parameter(format!("config {}: {e}", path.display())))
    }

    /// Flag values override file values field by field.
    pub fn merged_under(self, overrides: ExperimentSpec) -> ExperimentSpec {
        macro_rules! pick {
            ($field:ident) => {
                overrides.$field.or(self.$field)
            };
        }
        ExperimentSpec {
            kind: pick!(kind),
            d: pick!(d),
            r: pick!(r),
            rule: pick!(rule),
            window: pick!(window),
            origin: pick!(origin),
            boundary: pick!(boundary),
            p_grid: pick!(p_grid),
            q_grid: pick!(q_grid),
            scale: pick!(scale),
            scale_grid: pick!(scale_grid),
            trials: pick!(trials),
            seed: pick!(seed),
            margin: pick!(margin),
            k_max: pick!(k_max),
            sprinkle: pick!(sprinkle),
            choice: pick!(choice),
            density: pick!(density),
            planted: pick!(planted),
            aux_direct: pick!(aux_direct),
        }
    }

    /// The config file may carry a kind; if it does, it must agree with the
    /// verb being run.
    pub fn check_kind(&self, expected: &str) -> Result<()> {
        debug_assert!(KINDS.contains(&expected));
        match self.kind.as_deref() {
            None => Ok(()),
            Some(k) if k == expected => Ok(()),
            Some(other) => Err(Error::Parameter(format!(
                "config kind \"{other}\" does not match the {expected} verb"
            ))),
        }
    }

    pub fn to_toml(&self) -> String {
        toml::to_string_pretty(self).expect("spec serializes")
    }
}

pub fn require<T: Clone>(field: &Option<T>, name: &str) -> Result<T> {
    field
        .clone()
        .ok_or_else(|| Error::Parameter(format!("missing required field: {name}")))
}

/// Single-value accessor for verbs that take one p or one q.
pub fn scalar(grid: &Option<Vec<f64>>, name: &str) -> Result<f64> {
    let g = require(grid, name)?;
    match g.as_slice() {
        [v] => Ok(*v),
        _ => Err(Error::Parameter(format!(
            "{name} must hold exactly one value for this verb, got {}",
            g.len()
        ))),
    }
}

pub const PRESETS: [&str; 3] = ["thm-main-trend", "gm-d2-contrast", "prop-32-scaling"];

/// A fully-populated spec for a named scenario, plus an optional warning the
/// caller must surface.
pub fn preset(name: &str) -> Result<(ExperimentSpec, Option<String>)> {
    let base = ExperimentSpec {
        d: Some(3),
        r: Some(2),
        rule: Some("modified".into()),
        boundary: Some("closed".into()),
        seed: Some(1),
        ..ExperimentSpec::default()
    };
    match name {
        "thm-main-trend" => Ok((
            ExperimentSpec {
                kind: Some("phi-sweep".into()),
                window: Some(vec![96, 96, 96]),
                p_grid: Some(vec![0.05]),
                q_grid: Some(vec![0.2, 0.05, 0.01]),
                trials: Some(100),
                ..base
            },
            None,
        )),
        "gm-d2-contrast" => Ok((
            ExperimentSpec {
                kind: Some("phi-sweep".into()),
                d: Some(2),
                rule: Some("standard".into()),
                window: Some(vec![256, 256]),
                p_grid: Some(vec![0.1]),
                q_grid: Some(vec![0.0005, 0.05]),
                trials: Some(200),
                ..base
            },
            None,
        )),
        "prop-32-scaling" => Ok((
            ExperimentSpec {
                kind: Some("sail-demo".into()),
                scale_grid: Some(vec![2, 3, 4, 5]),
                aux_direct: Some(true),
                p_grid: Some(vec![0.85]),
                q_grid: Some(vec![0.002]),
                trials: Some(200),
                ..base
            },
            Some(
                "the analysed regime ties the brick scale to p as L = ceil(p^-128), \
                 which no machine can hold; this preset sweeps small L at fixed coarse \
                 densities instead"
                    .into(),
            ),
        )),
        other => Err(Error::Parameter(format!(
            "unknown preset \"{other}\"; available: {}",
            PRESETS.join(", ")
        ))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flags_override_file_values_field_by_field() {
        let file = ExperimentSpec {
            kind: Some("phi-sweep".into()),
            trials: Some(100),
            seed: Some(1),
            ..ExperimentSpec::default()
        };
        let flags = ExperimentSpec {
            trials: Some(7),
            ..ExperimentSpec::default()
        };
        let merged = file.merged_under(flags);
        assert_eq!(merged.trials, Some(7));
        assert_eq!(merged.seed, Some(1));
        assert_eq!(merged.kind.as_deref(), Some("phi-sweep"));
    }

    #[test]
    fn presets_round_trip_through_toml() {
        for name in PRESETS {
            let (spec, _) = preset(name).unwrap();
            let parsed: ExperimentSpec = toml::from_str(&spec.to_toml()).unwrap();
            assert_eq!(parsed, spec);
            assert!(KINDS.contains(&parsed.kind.as_deref().unwrap()));
        }
    }

    #[test]
    fn unknown_preset_lists_the_known_names() {
        let err = preset("bogus").unwrap_err();
        let msg = err.to_string();
        for name in PRESETS {
            assert!(msg.contains(name), "{msg}");
        }
    }

    #[test]
    fn unknown_config_keys_are_rejected() {
        let err = toml::from_str::<ExperimentSpec>("trails = 5").unwrap_err();
        assert!(err.to_string().contains("trails"));
    }
}
