//! A martingale with one mean-zero jump at time 1.

use std::sync::Arc;

use rand::Rng;
use rand_distr::Exp1;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::path::{SamplePath, TimeGrid};
use crate::quad;
use crate::rng;

/// Law of the jump `Θ`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "law", rename_all = "snake_case")]
pub enum ThetaLaw {
    /// `Θ = a` with probability `q`, else `-b` with `b = a q / (1-q)`.
    Discrete { a: f64, q: f64 },
    /// `Θ = E - 1/α` with `E` exponential of rate `α`. `E[e^Θ]` is infinite
    /// for `α <= 1`.
    ParetoExp { alpha: f64 },
}

impl ThetaLaw {
    pub fn validate(&self) -> Result<()> {
        match *self {
            ThetaLaw::Discrete { a, q } => {
                if !(a > 0.0 && a.is_finite() && q > 0.0 && q < 1.0) {
                    return Err(Error::InvalidSpec(format!("discrete law needs a > 0 and q in (0,1), got a={a}, q={q}")));
                }
            }
            ThetaLaw::ParetoExp { alpha } => {
                if !(alpha > 0.0 && alpha.is_finite()) {
                    return Err(Error::InvalidSpec(format!("tail parameter must be positive, got {alpha}")));
                }
            }
        }
        Ok(())
    }

    pub fn sample(&self, rng: &mut rng::TrialRng) -> f64 {
        match *self {
            ThetaLaw::Discrete { a, q } => {
                let u: f64 = rng.random();
                if u < q {
                    a
                } else {
                    -self.lower_atom()
                }
            }
            ThetaLaw::ParetoExp { alpha } => {
                let e: f64 = rng.sample(Exp1);
                (e - 1.0) / alpha
            }
        }
    }

    /// `b` of the discrete law, or `1/α` (the lower end of the support).
    pub fn lower_atom(&self) -> f64 {
        match *self {
            ThetaLaw::Discrete { a, q } => a * q / (1.0 - q),
            ThetaLaw::ParetoExp { alpha } => 1.0 / alpha,
        }
    }

    /// Whether `P(Θ <= -1) > 0`.
    pub fn charges_minus_one(&self) -> bool {
        match *self {
            ThetaLaw::Discrete { .. } => self.lower_atom() >= 1.0,
            ThetaLaw::ParetoExp { alpha } => alpha < 1.0,
        }
    }

    /// `E[f(Θ)]`; `breaks` are points where `f` may jump.
    pub fn expectation<F: Fn(f64) -> f64>(&self, f: F, breaks: &[f64]) -> Result<f64> {
        match *self {
            ThetaLaw::Discrete { a, q } => Ok(q * f(a) + (1.0 - q) * f(-self.lower_atom())),
            ThetaLaw::ParetoExp { alpha } => {
                let lo = -1.0 / alpha;
                quad::integrate_to_infinity(|x| f(x) * alpha * (-alpha * (x - lo)).exp(), lo, breaks, 1e-11)
            }
        }
    }

    /// `E[e^Θ]`, infinite when it diverges.
    pub fn exp_moment(&self) -> f64 {
        match *self {
            ThetaLaw::Discrete { a, q } => q * a.exp() + (1.0 - q) * (-self.lower_atom()).exp(),
            ThetaLaw::ParetoExp { alpha } if alpha > 1.0 => alpha / (alpha - 1.0) * (-1.0 / alpha).exp(),
            ThetaLaw::ParetoExp { .. } => f64::INFINITY,
        }
    }
}

/// One jump `Θ` at `t = 1`, observed on `events` integer steps.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OneShotSpec {
    pub law: ThetaLaw,
    #[serde(default = "one")]
    pub events: usize,
}

fn one() -> usize {
    1
}

#[derive(Debug, Clone)]
pub struct PreparedOneShot {
    pub(crate) law: ThetaLaw,
    pub(crate) grid: Arc<TimeGrid>,
}

impl PreparedOneShot {
    pub fn new(spec: &OneShotSpec) -> Result<Self> {
        spec.law.validate()?;
        if spec.events == 0 {
            return Err(Error::InvalidSpec("one-shot horizon must be at least 1".into()));
        }
        Ok(PreparedOneShot {
            law: spec.law,
            grid: Arc::new(TimeGrid::integer(spec.events)),
        })
    }

    pub fn sample(&self, seed: u64) -> Result<(SamplePath, f64)> {
        let theta = self.law.sample(&mut rng::stream(seed));
        let mut jumps = vec![0.0; self.grid.len()];
        jumps[1] = theta;
        Ok((SamplePath::from_jumps(self.grid.clone(), 0.0, jumps)?, theta))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn discrete_preset_is_symmetric() {
        let law = ThetaLaw::Discrete { a: 1.0, q: 0.5 };
        assert_eq!(law.lower_atom(), 1.0);
        let shot = PreparedOneShot::new(&OneShotSpec { law, events: 3 }).unwrap();
        for seed in 0..50 {
            let (path, theta) = shot.sample(seed).unwrap();
            assert!(theta == 1.0 || theta == -1.0);
            assert_eq!(path.jumps()[1], theta);
            assert_eq!(path.final_value(), theta);
        }
    }

    #[test]
    fn laws_have_mean_zero() {
        for law in [
            ThetaLaw::Discrete { a: 2.0, q: 0.2 },
            ThetaLaw::ParetoExp { alpha: 1.0 },
            ThetaLaw::ParetoExp { alpha: 3.0 },
        ] {
            assert!(law.expectation(|x| x, &[]).unwrap().abs() < 1e-9, "{law:?}");
        }
    }

    #[test]
    fn exponential_moment_grows_towards_the_critical_tail() {
        let m: Vec<f64> = [3.0, 2.0, 1.5, 1.2, 1.05]
            .iter()
            .map(|&alpha| ThetaLaw::ParetoExp { alpha }.exp_moment())
            .collect();
        assert!(m.windows(2).all(|w| w[1] > w[0]));
        assert!(ThetaLaw::ParetoExp { alpha: 1.0 }.exp_moment().is_infinite());
        let quad = ThetaLaw::ParetoExp { alpha: 2.0 }.expectation(f64::exp, &[]).unwrap();
        assert!((quad - m[1]).abs() < 1e-8);
    }
}
