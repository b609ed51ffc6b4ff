//! Single-jump martingales from a random intensity clock.
//!
//! An independent standard exponential `Θ` is compared against the cumulative
//! hazard `Λ(t) = ∫₀ᵗ λ`; the jump happens at `ρ = inf{t : Λ(t) >= Θ}` and has
//! size `γ(ρ)`. Before `ρ` the path drifts down at rate `γλ`, which makes
//! `X_t = γ(ρ) 1{ρ <= t} - ∫₀ᵗ γ(s) λ(s) 1{s < ρ} ds` a martingale.

use std::sync::Arc;

use rand::Rng;
use rand_distr::{Exp1, StandardNormal};
use serde::{Deserialize, Serialize};

use super::JumpTime;
use crate::error::{Error, Result};
use crate::path::{ContinuousPart, SamplePath, TimeGrid};
use crate::rng::{self, TrialRng};

/// Jump intensity `λ(s)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "rule", rename_all = "snake_case")]
pub enum Intensity {
    /// `λ = 0`: the jump never happens.
    Zero,
    /// `λ(s) = 1/(1+s)²`, total mass one.
    InverseSquare,
    /// `λ(s) = rate`.
    Constant { rate: f64 },
}

impl Intensity {
    pub fn eval(&self, s: f64) -> f64 {
        match self {
            Intensity::Zero => 0.0,
            Intensity::InverseSquare => 1.0 / ((1.0 + s) * (1.0 + s)),
            Intensity::Constant { rate } => *rate,
        }
    }

    /// `Λ(t) = ∫₀ᵗ λ(s) ds`.
    pub fn cumulative(&self, t: f64) -> f64 {
        match self {
            Intensity::Zero => 0.0,
            Intensity::InverseSquare => t / (1.0 + t),
            Intensity::Constant { rate } => rate * t,
        }
    }

    /// `Λ(∞)`.
    pub fn total(&self) -> f64 {
        match self {
            Intensity::Zero => 0.0,
            Intensity::InverseSquare => 1.0,
            Intensity::Constant { rate } if *rate == 0.0 => 0.0,
            Intensity::Constant { .. } => f64::INFINITY,
        }
    }

    /// First time the cumulative hazard reaches `theta`.
    pub fn first_passage(&self, theta: f64) -> JumpTime {
        match self {
            Intensity::InverseSquare if theta < 1.0 => JumpTime::At(theta / (1.0 - theta)),
            Intensity::Constant { rate } if *rate > 0.0 => JumpTime::At(theta / rate),
            _ => JumpTime::Never,
        }
    }

    /// Exponent `a` with `λ(s) ≍ s^a` at infinity; `None` for `λ = 0`.
    pub fn tail_exponent(&self) -> Option<f64> {
        match self {
            Intensity::Zero => None,
            Intensity::Constant { rate } if *rate == 0.0 => None,
            Intensity::InverseSquare => Some(-2.0),
            Intensity::Constant { .. } => Some(0.0),
        }
    }
}

/// Jump size `γ(s)` as a function of the jump time.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "rule", rename_all = "snake_case")]
pub enum JumpSize {
    /// `γ(s) = s`.
    Identity,
    /// `γ(s) = (1+s)²`.
    OnePlusSquared,
    /// `γ(s) = 1/(1+s)`.
    Reciprocal,
    /// `γ(s) = value`.
    Constant { value: f64 },
}

impl JumpSize {
    pub fn eval(&self, s: f64) -> f64 {
        match self {
            JumpSize::Identity => s,
            JumpSize::OnePlusSquared => (1.0 + s) * (1.0 + s),
            JumpSize::Reciprocal => 1.0 / (1.0 + s),
            JumpSize::Constant { value } => *value,
        }
    }

    /// Exponent `g` with `γ(s) ≍ s^g` at infinity (0 for a constant).
    pub fn tail_exponent(&self) -> f64 {
        match self {
            JumpSize::Identity => 1.0,
            JumpSize::OnePlusSquared => 2.0,
            JumpSize::Reciprocal => -1.0,
            JumpSize::Constant { .. } => 0.0,
        }
    }

    /// Largest value of `γ` on `[0, horizon]`.
    pub fn max_on(&self, horizon: f64) -> f64 {
        match self {
            JumpSize::Reciprocal => 1.0,
            other => other.eval(horizon).max(other.eval(0.0)),
        }
    }
}

/// Which process is built from `(ρ, γ)`.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CoxVariant {
    /// `X = γ(ρ) 1{ρ <= t} - ∫ γλ 1{s < ρ} ds`, a martingale.
    #[default]
    Martingale,
    /// `X̂ = -γ(ρ) 1{ρ <= t}`: the negated martingale plus its drift, a
    /// semimartingale with predictable part `∫ γλ 1{s < ρ} ds`.
    NegatedJump,
}

/// Parameters of the intensity construction.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoxSpec {
    pub lambda: Intensity,
    pub gamma: JumpSize,
    /// Grid step `h`; must divide the horizon.
    pub step: f64,
    pub horizon: f64,
    /// Add an independent Brownian motion.
    #[serde(default)]
    pub with_bm: bool,
    #[serde(default)]
    pub variant: CoxVariant,
}

impl CoxSpec {
    pub fn validate(&self) -> Result<()> {
        if let Intensity::Constant { rate } = self.lambda {
            if !(rate >= 0.0 && rate.is_finite()) {
                return Err(Error::InvalidSpec(format!("intensity must be nonnegative, got {rate}")));
            }
        }
        if let JumpSize::Constant { value } = self.gamma {
            if !(value >= 0.0 && value.is_finite()) {
                return Err(Error::InvalidSpec(format!("jump size must be nonnegative, got {value}")));
            }
        }
        TimeGrid::uniform(self.step, self.horizon).map_err(|e| Error::InvalidSpec(e.to_string()))?;
        Ok(())
    }

    /// `γ(s) λ(s)`, the drift rate before the jump.
    pub fn drift_rate(&self, s: f64) -> f64 {
        let l = self.lambda.eval(s);
        if l == 0.0 {
            0.0
        } else {
            self.gamma.eval(s) * l
        }
    }
}

/// A prepared intensity construction: grid plus tabulated drift.
#[derive(Debug, Clone)]
pub struct PreparedCox {
    pub(crate) spec: CoxSpec,
    pub(crate) grid: Arc<TimeGrid>,
    /// `-h γλ(midpoint)` per full step, index 0 zero.
    drift: Arc<Vec<f64>>,
}

impl PreparedCox {
    pub fn new(spec: &CoxSpec) -> Result<Self> {
        spec.validate()?;
        let grid = Arc::new(TimeGrid::uniform(spec.step, spec.horizon)?);
        let t = grid.times();
        let mut drift = vec![0.0; t.len()];
        for k in 1..t.len() {
            let h = t[k] - t[k - 1];
            drift[k] = -h * spec.drift_rate(0.5 * (t[k - 1] + t[k]));
        }
        Ok(PreparedCox {
            spec: spec.clone(),
            grid,
            drift: Arc::new(drift),
        })
    }

    pub fn spec(&self) -> &CoxSpec {
        &self.spec
    }

    pub fn grid(&self) -> &Arc<TimeGrid> {
        &self.grid
    }

    /// Draws `ρ` and, when requested, the Brownian increments, from one stream.
    pub fn sample(&self, seed: u64) -> Result<(SamplePath, JumpTime)> {
        let mut rng = rng::stream(seed);
        let theta: f64 = rng.sample(Exp1);
        let rho = self.spec.lambda.first_passage(theta);
        let path = self.build_with(rho, &mut rng)?;
        Ok((path, rho))
    }

    /// Builds the path for a given jump time; Brownian increments, if any,
    /// come from `bm_seed`.
    pub fn build(&self, rho: JumpTime, bm_seed: u64) -> Result<SamplePath> {
        self.build_with(rho, &mut rng::stream(bm_seed))
    }

    /// Grid index `k` with `t_{k-1} < ρ <= t_k`, if `ρ` is inside the horizon.
    pub fn jump_index(&self, rho: JumpTime) -> Option<usize> {
        match rho {
            JumpTime::At(r) if r <= self.grid.horizon() => {
                Some(self.grid.times().partition_point(|&t| t < r).max(1))
            }
            _ => None,
        }
    }

    fn build_with(&self, rho: JumpTime, rng: &mut TrialRng) -> Result<SamplePath> {
        let t = self.grid.times();
        let n = t.len();
        let mut jumps = vec![0.0; n];
        let mut increments = vec![0.0; n];
        let hit = self.jump_index(rho);
        let stop = hit.unwrap_or(n);
        let martingale = self.spec.variant == CoxVariant::Martingale;
        if martingale {
            increments[1..stop].copy_from_slice(&self.drift[1..stop]);
        }
        if let (Some(k), JumpTime::At(r)) = (hit, rho) {
            let size = self.spec.gamma.eval(r);
            if martingale {
                let dt = r - t[k - 1];
                increments[k] = -dt * self.spec.drift_rate(t[k - 1] + 0.5 * dt);
                jumps[k] = size;
            } else {
                jumps[k] = -size;
            }
        }
        let diffusive = if self.spec.with_bm {
            let mut d = vec![0.0; n];
            for k in 1..n {
                let z: f64 = rng.sample(StandardNormal);
                d[k] = z * (t[k] - t[k - 1]).sqrt();
                increments[k] += d[k];
            }
            Some(d)
        } else {
            None
        };
        let cont = (martingale || diffusive.is_some()).then_some(ContinuousPart {
            increments,
            diffusive,
        });
        SamplePath::from_increments(self.grid.clone(), 0.0, jumps, cont)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn linear(step: f64, horizon: f64) -> PreparedCox {
        PreparedCox::new(&CoxSpec {
            lambda: Intensity::InverseSquare,
            gamma: JumpSize::Identity,
            step,
            horizon,
            with_bm: false,
            variant: CoxVariant::Martingale,
        })
        .unwrap()
    }

    #[test]
    fn drift_only_path_matches_antiderivative() {
        let cox = linear(0.01, 1e4);
        let path = cox.build(JumpTime::Never, 0).unwrap();
        let t = 1e4f64;
        let exact = -((1.0 + t).ln() - t / (1.0 + t));
        assert!((path.final_value() - exact).abs() < 1e-4, "{} vs {exact}", path.final_value());
        assert!((exact + 8.210_540).abs() < 1e-6);
        // Drift is nonpositive, so the running maximum stays at zero.
        assert!(path.values().iter().all(|&v| v <= 0.0));
    }

    #[test]
    fn zero_intensity_never_jumps() {
        let cox = PreparedCox::new(&CoxSpec {
            lambda: Intensity::Zero,
            gamma: JumpSize::Identity,
            step: 0.5,
            horizon: 10.0,
            with_bm: false,
            variant: CoxVariant::Martingale,
        })
        .unwrap();
        for seed in 0..10 {
            let (path, rho) = cox.sample(seed).unwrap();
            assert_eq!(rho, JumpTime::Never);
            assert!(path.values().iter().all(|&v| v == 0.0));
        }
    }

    #[test]
    fn jump_lands_on_the_covering_step() {
        let cox = linear(0.5, 10.0);
        let path = cox.build(JumpTime::At(1.2), 0).unwrap();
        assert_eq!(path.jumps()[3], 1.2);
        assert_eq!(path.jump_indices().collect::<Vec<_>>(), vec![3]);
        assert!(path.values()[4..].iter().all(|&v| v == path.values()[3]));
        // Midpoint nodes 0.25, 0.75 and the partial cell [1, 1.2] at 1.1.
        let rate = |s: f64| s / ((1.0 + s) * (1.0 + s));
        let drift = -(0.5 * rate(0.25) + 0.5 * rate(0.75) + 0.2 * rate(1.1));
        assert!((path.final_value() - (1.2 + drift)).abs() < 1e-12);
    }

    #[test]
    fn survival_frequency() {
        let cox = linear(1.0, 10.0);
        let trials = 100_000u64;
        let never = (0..trials)
            .filter(|&i| cox.sample(rng::trial_seed(5, i)).unwrap().1 == JumpTime::Never)
            .count();
        let p = (-1.0f64).exp();
        let p_hat = never as f64 / trials as f64;
        assert!((p_hat - p).abs() < 3.0 * (p * (1.0 - p) / trials as f64).sqrt(), "p_hat={p_hat}");
    }

    #[test]
    fn negated_variant_has_no_drift() {
        let mut spec = linear(0.5, 5.0).spec.clone();
        spec.variant = CoxVariant::NegatedJump;
        let cox = PreparedCox::new(&spec).unwrap();
        let path = cox.build(JumpTime::At(2.0), 0).unwrap();
        assert!(path.continuous().is_none());
        assert_eq!(path.final_value(), -2.0);
    }

    #[test]
    fn step_must_divide_horizon() {
        let mut spec = linear(0.5, 5.0).spec.clone();
        spec.step = 0.3;
        assert!(PreparedCox::new(&spec).is_err());
    }
}
