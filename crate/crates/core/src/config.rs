//! TOML experiment files.
//!
//! ```toml
//! [generator]
//! preset = "rw_bounded_alt_harmonic"   # or an explicit spec, see below
//! horizon = 100000
//!
//! [experiment]
//! trials = 10000
//! seed = 42
//! analyzers = ["flags", "compensated:SQ_CAP_ABS"]
//!
//! [proxy]
//! window = 0.1
//! tol = 5e-3
//!
//! [report]
//! integrands = ["SQ_CAP_ABS", "POS_TAIL[1.0]"]
//! ```
//!
//! An explicit generator replaces `preset` with the serialized spec, e.g.
//! `family = "random_walk"`, `events = 1000`,
//! `x = { rule = "alt_harmonic", scale = 1.0 }`,
//! `p = { rule = "constant", value = 0.5 }`.

use std::path::{Path, PathBuf};

use serde::Deserialize;

use crate::characteristics::IntegrandId;
use crate::convergence::ProxyParams;
use crate::error::{Error, Result};
use crate::generators::{catalog, GeneratorSpec};
use crate::montecarlo::{Analyzer, ExperimentSpec};

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawFile {
    generator: toml::Table,
    #[serde(default)]
    experiment: RawExperiment,
    #[serde(default)]
    proxy: ProxyParams,
    #[serde(default)]
    report: RawReport,
    #[serde(default)]
    output: RawOutput,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawExperiment {
    trials: Option<usize>,
    seed: Option<u64>,
    #[serde(default)]
    analyzers: Vec<Analyzer>,
    threads: Option<usize>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawReport {
    #[serde(default)]
    integrands: Vec<String>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawOutput {
    dir: Option<PathBuf>,
}

/// A parsed configuration file.
#[derive(Debug, Clone, PartialEq)]
pub struct Config {
    pub generator: GeneratorSpec,
    pub trials: usize,
    pub seed: u64,
    pub analyzers: Vec<Analyzer>,
    pub threads: Option<usize>,
    pub params: ProxyParams,
    /// Integrands reported by `gen` and `analyze`.
    pub integrands: Vec<IntegrandId>,
    pub output_dir: Option<PathBuf>,
}

impl Config {
    pub fn parse(text: &str) -> Result<Self> {
        let raw: RawFile = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        let generator = generator_from_table(raw.generator)?;
        let integrands = if raw.report.integrands.is_empty() {
            default_integrands()
        } else {
            raw.report.integrands.iter().map(|s| s.parse()).collect::<Result<_>>()?
        };
        raw.proxy.validate().map_err(|e| Error::Config(e.to_string()))?;
        Ok(Config {
            generator,
            trials: raw.experiment.trials.unwrap_or(1000),
            seed: raw.experiment.seed.unwrap_or(0),
            analyzers: if raw.experiment.analyzers.is_empty() {
                vec![Analyzer::Flags]
            } else {
                raw.experiment.analyzers
            },
            threads: raw.experiment.threads,
            params: raw.proxy,
            integrands,
            output_dir: raw.output.dir,
        })
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse(&text)
    }

    /// Config for a bare preset with default settings.
    pub fn from_preset(name: &str) -> Result<Self> {
        Ok(Config {
            generator: catalog::preset(name)?,
            trials: 1000,
            seed: 0,
            analyzers: vec![Analyzer::Flags],
            threads: None,
            params: ProxyParams::default(),
            integrands: default_integrands(),
            output_dir: None,
        })
    }

    pub fn experiment(&self) -> ExperimentSpec {
        ExperimentSpec {
            generator: self.generator.clone(),
            trials: self.trials,
            base_seed: self.seed,
            analyzers: self.analyzers.clone(),
            params: self.params,
        }
    }
}

fn default_integrands() -> Vec<IntegrandId> {
    vec![IntegrandId::SqCapAbs, IntegrandId::SqCapOne, IntegrandId::PosTail(1.0)]
}

fn generator_from_table(mut table: toml::Table) -> Result<GeneratorSpec> {
    let Some(preset) = table.remove("preset") else {
        return table
            .try_into::<GeneratorSpec>()
            .map_err(|e| Error::Config(format!("generator: {e}")));
    };
    let name = preset
        .as_str()
        .ok_or_else(|| Error::Config("generator.preset must be a string".into()))?;
    let mut spec = catalog::preset(name)?;
    let number = |key: &str, v: &toml::Value| {
        v.as_float()
            .or_else(|| v.as_integer().map(|i| i as f64))
            .ok_or_else(|| Error::Config(format!("generator.{key} must be a number")))
    };
    for (key, value) in table {
        match (key.as_str(), &mut spec) {
            ("horizon", _) => {
                spec = catalog::with_horizon(spec, number(&key, &value)?).map_err(|e| Error::Config(e.to_string()))?
            }
            ("step", GeneratorSpec::Cox(c)) => c.step = number(&key, &value)?,
            ("with_bm", GeneratorSpec::Cox(c)) => {
                c.with_bm = value
                    .as_bool()
                    .ok_or_else(|| Error::Config("generator.with_bm must be a boolean".into()))?
            }
            _ => {
                return Err(Error::Config(format!(
                    "generator.{key} cannot override preset {name:?}; allowed: horizon, and step/with_bm for intensity presets"
                )))
            }
        }
    }
    Ok(spec)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators::{CoxSpec, PRule, XRule};

    #[test]
    fn preset_with_overrides() {
        let c = Config::parse(
            r#"
[generator]
preset = "cox_linear"
horizon = 100
step = 0.5

[experiment]
trials = 20
seed = 9
analyzers = ["flags", "survival"]

[proxy]
big = 4.0
"#,
        )
        .unwrap();
        match &c.generator {
            GeneratorSpec::Cox(CoxSpec { step, horizon, .. }) => assert_eq!((*step, *horizon), (0.5, 100.0)),
            other => panic!("{other:?}"),
        }
        assert_eq!(c.trials, 20);
        assert_eq!(c.params.big, 4.0);
        assert_eq!(c.params.tol, 5e-3);
        assert_eq!(c.analyzers, vec![Analyzer::Flags, Analyzer::Survival]);
    }

    #[test]
    fn explicit_generator() {
        let c = Config::parse(
            r#"
[generator]
family = "random_walk"
events = 50
x = { rule = "alt_harmonic", scale = 0.5 }
p = { rule = "constant", value = 0.5 }
"#,
        )
        .unwrap();
        match c.generator {
            GeneratorSpec::RandomWalk(w) => {
                assert_eq!(w.x, XRule::AltHarmonic { scale: 0.5 });
                assert_eq!(w.p, PRule::Constant { value: 0.5 });
                assert_eq!(w.events, 50);
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn errors_are_config_errors() {
        for text in [
            "[generator]\npreset = \"nope\"",
            "[generator]\npreset = \"zero\"\nstep = 0.1",
            "[generator]\npreset = \"zero\"\n[experiment]\nanalyzers = [\"bogus\"]",
            "[generator]\npreset = \"zero\"\n[proxy]\nwindow = 2.0",
            "[generator]\npreset = \"zero\"\n[extra]\nx = 1",
            "[generator]\nfamily = \"random_walk\"",
        ] {
            let e = Config::parse(text).unwrap_err();
            assert_eq!(e.exit_code(), 1, "{text}: {e}");
        }
    }
}
