//! Seeded constructions of the example process families.
//!
//! Every generator is a pure function of `(spec, seed)`: the same pair always
//! yields a bitwise-identical path.

pub mod catalog;
pub mod cox;
pub mod oneshot;
pub mod random_walk;

use std::sync::Arc;

use serde::{Deserialize, Serialize};

pub use cox::{CoxSpec, CoxVariant, Intensity, JumpSize, PreparedCox};
pub use oneshot::{OneShotSpec, ThetaLaw};
pub use random_walk::{det_alternating, DyadicSchedule, PRule, RandomWalkSpec, WalkTables, XRule};

use crate::error::Result;
use crate::path::{SamplePath, TimeGrid};

/// Time of the single jump of an intensity construction.
///
/// `Never` is the horizon-free sentinel for `ρ = ∞`; a finite `ρ` past the
/// simulated horizon stays `At`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum JumpTime {
    At(f64),
    Never,
}

impl JumpTime {
    pub fn is_never(&self) -> bool {
        matches!(self, JumpTime::Never)
    }

    /// `ρ ∧ t`.
    pub fn min(&self, t: f64) -> f64 {
        match *self {
            JumpTime::At(r) => r.min(t),
            JumpTime::Never => t,
        }
    }

    /// `ρ` if it is finite and at most `t`.
    pub fn by(&self, t: f64) -> Option<f64> {
        match *self {
            JumpTime::At(r) if r <= t => Some(r),
            _ => None,
        }
    }
}

/// Any of the supported process families.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum GeneratorSpec {
    RandomWalk(RandomWalkSpec),
    Cox(CoxSpec),
    OneShot(OneShotSpec),
    /// Deterministic alternating harmonic partial sums.
    Alternating { events: usize },
}

impl GeneratorSpec {
    /// Short family label used in reports.
    pub fn family(&self) -> &'static str {
        match self {
            GeneratorSpec::RandomWalk(_) => "random_walk",
            GeneratorSpec::Cox(_) => "cox",
            GeneratorSpec::OneShot(_) => "one_shot",
            GeneratorSpec::Alternating { .. } => "alternating",
        }
    }

    /// Whether the process is a local martingale (so `Y` and `V` exist).
    pub fn is_local_martingale(&self) -> bool {
        match self {
            GeneratorSpec::RandomWalk(_) | GeneratorSpec::OneShot(_) => true,
            GeneratorSpec::Cox(c) => c.variant == CoxVariant::Martingale,
            GeneratorSpec::Alternating { .. } => false,
        }
    }

    /// Whether `(ΔX)⁻ ∧ X⁻` is stationarily locally integrable.
    ///
    /// This is a property of the law and is decided per family from the
    /// structure of the jumps: it holds when the negative jumps are bounded
    /// (or the process is a uniformly integrable martingale) and fails for
    /// walks whose large moves are unboundedly negative and for the negated
    /// intensity construction.
    pub fn neg_jump_integrable(&self) -> bool {
        match self {
            GeneratorSpec::RandomWalk(w) => {
                let x = w.x.profile();
                x.is_zero() || !x.positive || w.p.profile().constant
            }
            GeneratorSpec::Cox(c) => c.variant == CoxVariant::Martingale,
            GeneratorSpec::OneShot(_) | GeneratorSpec::Alternating { .. } => true,
        }
    }

    /// Whether the process has an independent Brownian component.
    pub fn has_diffusion(&self) -> bool {
        matches!(self, GeneratorSpec::Cox(c) if c.with_bm)
    }

    pub fn horizon(&self) -> f64 {
        match self {
            GeneratorSpec::RandomWalk(w) => w.events as f64,
            GeneratorSpec::Cox(c) => c.horizon,
            GeneratorSpec::OneShot(o) => o.events as f64,
            GeneratorSpec::Alternating { events } => *events as f64,
        }
    }
}

/// Hidden randomness behind a sample, kept for path-coupled reports.
#[derive(Debug, Clone, PartialEq)]
pub enum Latent {
    /// Times at which the large move fired.
    RandomWalk { fired: Vec<usize> },
    Cox { rho: JumpTime },
    OneShot { theta: f64 },
    None,
}

impl Latent {
    pub fn rho(&self) -> Option<JumpTime> {
        match self {
            Latent::Cox { rho } => Some(*rho),
            _ => None,
        }
    }
}

/// A sampled path with its latent draws.
#[derive(Debug, Clone, PartialEq)]
pub struct Sample {
    pub path: SamplePath,
    pub latent: Latent,
}

#[derive(Debug, Clone)]
enum Prepared {
    Walk(random_walk::PreparedWalk),
    Cox(cox::PreparedCox),
    OneShot(oneshot::PreparedOneShot),
    Alternating(SamplePath),
}

/// A validated spec with its per-step tables computed once.
#[derive(Debug, Clone)]
pub struct Generator {
    spec: GeneratorSpec,
    prepared: Prepared,
}

impl Generator {
    pub fn new(spec: GeneratorSpec) -> Result<Self> {
        let prepared = match &spec {
            GeneratorSpec::RandomWalk(w) => Prepared::Walk(random_walk::PreparedWalk::new(w)?),
            GeneratorSpec::Cox(c) => Prepared::Cox(cox::PreparedCox::new(c)?),
            GeneratorSpec::OneShot(o) => Prepared::OneShot(oneshot::PreparedOneShot::new(o)?),
            GeneratorSpec::Alternating { events } => {
                if *events == 0 {
                    return Err(crate::Error::InvalidSpec("alternating path needs at least one event".into()));
                }
                Prepared::Alternating(det_alternating(*events)?)
            }
        };
        Ok(Generator { spec, prepared })
    }

    pub fn spec(&self) -> &GeneratorSpec {
        &self.spec
    }

    pub fn grid(&self) -> &Arc<TimeGrid> {
        match &self.prepared {
            Prepared::Walk(w) => &w.grid,
            Prepared::Cox(c) => &c.grid,
            Prepared::OneShot(o) => &o.grid,
            Prepared::Alternating(p) => p.grid(),
        }
    }

    /// Per-step tables of a random walk.
    pub fn walk_tables(&self) -> Option<&WalkTables> {
        match &self.prepared {
            Prepared::Walk(w) => Some(&w.tables),
            _ => None,
        }
    }

    pub fn cox(&self) -> Option<&PreparedCox> {
        match &self.prepared {
            Prepared::Cox(c) => Some(c),
            _ => None,
        }
    }

    pub fn sample(&self, seed: u64) -> Result<Sample> {
        Ok(match &self.prepared {
            Prepared::Walk(w) => {
                let (path, fired) = w.sample(seed)?;
                Sample {
                    path,
                    latent: Latent::RandomWalk { fired },
                }
            }
            Prepared::Cox(c) => {
                let (path, rho) = c.sample(seed)?;
                Sample {
                    path,
                    latent: Latent::Cox { rho },
                }
            }
            Prepared::OneShot(o) => {
                let (path, theta) = o.sample(seed)?;
                Sample {
                    path,
                    latent: Latent::OneShot { theta },
                }
            }
            Prepared::Alternating(p) => Sample {
                path: p.clone(),
                latent: Latent::None,
            },
        })
    }
}
