//! Stochastic exponential `ℰ(X)`, logarithmic transform `Y` and the
//! identity `ℰ(X) = e^{Y-V}`.
//!
//! `ℰ(X)` is kept as a sign and a log-magnitude so that long products neither
//! underflow nor overflow. `Y` and `V` are defined on the prefix of the grid
//! where every possible jump stays above `-1`.

use std::io::Write;

use crate::characteristics::{self, cox_log_increments};
use crate::error::{Error, Result};
use crate::generators::{CoxVariant, Generator, GeneratorSpec, JumpTime, Latent};
use crate::path::SamplePath;

/// `ℰ(X)` per grid time as `sign · exp(log_abs)`.
#[derive(Debug, Clone, PartialEq)]
pub struct StochasticExponential {
    /// `-1`, `0` or `1`.
    pub sign: Vec<i8>,
    /// `log|ℰ(X)|`; `-∞` once the process hit zero.
    pub log_abs: Vec<f64>,
}

impl StochasticExponential {
    pub fn value(&self, k: usize) -> f64 {
        f64::from(self.sign[k]) * self.log_abs[k].exp()
    }

    /// Number of sign flips along the path.
    pub fn sign_changes(&self) -> usize {
        self.sign.windows(2).filter(|w| w[0] * w[1] < 0).count()
    }
}

/// `ℰ(X)_t = exp(X^cont_t - ½[X^c,X^c]_t) Π_{s≤t} (1 + ΔX_s)`.
pub fn stochastic_exponential(path: &SamplePath) -> StochasticExponential {
    let n = path.len();
    let mut sign = vec![1i8; n];
    let mut log_abs = vec![0.0; n];
    let (mut s, mut l) = (1i8, 0.0f64);
    for k in 1..n {
        if s != 0 {
            let d = path.diffusive_increment(k);
            l += path.cont_increment(k) - 0.5 * d * d;
            let j = path.jumps()[k];
            if j != 0.0 {
                if j > -1.0 {
                    l += j.ln_1p();
                } else if j == -1.0 {
                    s = 0;
                    l = f64::NEG_INFINITY;
                } else {
                    s = -s;
                    l += (-1.0 - j).ln();
                }
            }
        }
        sign[k] = s;
        log_abs[k] = l;
    }
    StochasticExponential { sign, log_abs }
}

/// First time with `ΔX = -1` exactly.
pub fn tau_j(path: &SamplePath) -> Option<f64> {
    path.jumps().iter().position(|&j| j == -1.0).map(|k| path.times()[k])
}

/// Number of grid indices (from 0) on which `Y` and `V` are defined.
pub fn valid_len(gen: &Generator) -> Result<usize> {
    let n = gen.grid().len();
    match gen.spec() {
        GeneratorSpec::RandomWalk(_) => {
            Ok(gen.walk_tables().expect("walk tables").first_minus_one_reach().unwrap_or(n))
        }
        GeneratorSpec::Cox(c) if c.variant == CoxVariant::Martingale => Ok(n),
        GeneratorSpec::OneShot(o) => Ok(if o.law.charges_minus_one() { 1 } else { n }),
        _ => Err(Error::Unsupported(format!(
            "the logarithmic transform of a {} process that is not a local martingale",
            gen.spec().family()
        ))),
    }
}

/// `Y = X^c + log(1+x)*(μ-ν)` on the valid prefix.
pub fn logarithmic_transform(gen: &Generator, path: &SamplePath, latent: &Latent) -> Result<Vec<f64>> {
    let len = valid_len(gen)?;
    let mut y = vec![0.0; len];
    match gen.spec() {
        GeneratorSpec::Cox(spec) => {
            let rho = latent.rho().unwrap_or(JumpTime::Never);
            let logs = cox_log_increments(spec, path, rho);
            for k in 1..len {
                let j = path.jumps()[k];
                let jump = if j != 0.0 { j.ln_1p() } else { 0.0 };
                y[k] = y[k - 1] + path.diffusive_increment(k) + jump - logs[k].0;
            }
        }
        _ => {
            // Integer-time families: ΔY_n = log(1 + ΔX_n) + γ_n.
            for k in 1..len {
                let gamma = characteristics::gamma_at(gen, k)?;
                let j = path.jumps()[k];
                if j <= -1.0 {
                    return Err(Error::SupportReachesMinusOne { time: path.times()[k] });
                }
                y[k] = y[k - 1] + j.ln_1p() + gamma;
            }
        }
    }
    Ok(y)
}

/// `ℰ(X)`, `Y`, `V` and `τ_J` of one sample.
#[derive(Debug, Clone)]
pub struct TransformBundle {
    pub times: Vec<f64>,
    pub exponential: StochasticExponential,
    /// `Y` on the valid prefix; `None` when the process is not a local martingale.
    pub y: Option<Vec<f64>>,
    /// `V` on the same prefix as `y`.
    pub v: Option<Vec<f64>>,
    pub tau_j: Option<f64>,
}

impl TransformBundle {
    pub fn build(gen: &Generator, path: &SamplePath, latent: &Latent) -> Result<Self> {
        let exponential = stochastic_exponential(path);
        let (y, v) = if gen.spec().is_local_martingale() {
            let y = logarithmic_transform(gen, path, latent)?;
            let v = characteristics::exponential_compensator(gen, path, latent)?;
            if v.len() != y.len() {
                return Err(Error::Numeric("transform and compensator prefixes differ".into()));
            }
            (Some(y), Some(v))
        } else {
            (None, None)
        };
        Ok(TransformBundle {
            times: path.times().to_vec(),
            exponential,
            y,
            v,
            tau_j: tau_j(path),
        })
    }

    /// Number of grid indices with `Y` and `V`.
    pub fn valid_len(&self) -> usize {
        self.y.as_ref().map_or(0, Vec::len)
    }

    /// `|ℰ(X)_t - e^{Y_t-V_t}| / (1 + |ℰ(X)_t|)` per index of the valid prefix.
    pub fn identity_errors(&self) -> Vec<f64> {
        let (Some(y), Some(v)) = (&self.y, &self.v) else {
            return Vec::new();
        };
        (0..y.len())
            .map(|k| relative_gap(self.exponential.sign[k], self.exponential.log_abs[k], y[k] - v[k]))
            .collect()
    }

    /// Tidy CSV: `t,E,Y,V,identity_err`; transform columns are empty past the
    /// valid prefix.
    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        w.write_record(["t", "E", "Y", "V", "identity_err"])?;
        let errs = self.identity_errors();
        for (k, t) in self.times.iter().enumerate() {
            let cell = |s: Option<&Vec<f64>>| s.and_then(|s| s.get(k)).map_or(String::new(), |v| v.to_string());
            w.write_record([
                t.to_string(),
                self.exponential.value(k).to_string(),
                cell(self.y.as_ref()),
                cell(self.v.as_ref()),
                errs.get(k).map_or(String::new(), |e| e.to_string()),
            ])?;
        }
        w.flush().map_err(|e| Error::io("<csv>", e))?;
        Ok(())
    }
}

/// `|s e^l - e^m| / (1 + e^l)` without overflow.
fn relative_gap(sign: i8, l: f64, m: f64) -> f64 {
    if sign <= 0 {
        // ℰ(X) is not positive here, while e^{Y-V} is.
        let e = if sign == 0 { 0.0 } else { -l.exp() };
        return (e - m.exp()).abs() / (1.0 + e.abs());
    }
    let d = (m - l).exp_m1().abs();
    if l > 0.0 {
        d / (1.0 + (-l).exp())
    } else {
        l.exp() * d / (1.0 + l.exp())
    }
}

/// Maximum identity error over the valid prefix (0 when it is empty).
pub fn check_exp_identity(bundle: &TransformBundle) -> f64 {
    bundle.identity_errors().into_iter().fold(0.0, f64::max)
}

/// Largest deviation of `ΔY` from `log(1 + ΔX) + γ` over jump times.
///
/// For the intensity construction `γ ≡ 0` and the continuous parts of the
/// step are removed before comparing.
pub fn delta_y_error(gen: &Generator, path: &SamplePath, latent: &Latent, bundle: &TransformBundle) -> Result<f64> {
    let Some(y) = &bundle.y else {
        return Ok(0.0);
    };
    let mut worst = 0.0f64;
    match gen.spec() {
        GeneratorSpec::Cox(spec) => {
            let rho = latent.rho().unwrap_or(JumpTime::Never);
            let logs = cox_log_increments(spec, path, rho);
            for k in 1..y.len() {
                let j = path.jumps()[k];
                if j != 0.0 {
                    let dy = y[k] - y[k - 1] - path.diffusive_increment(k) + logs[k].0;
                    worst = worst.max((dy - j.ln_1p()).abs());
                }
            }
        }
        _ => {
            for k in 1..y.len() {
                let expected = path.jumps()[k].ln_1p() + characteristics::gamma_at(gen, k)?;
                worst = worst.max((y[k] - y[k - 1] - expected).abs());
            }
        }
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators::catalog;
    use crate::path::TimeGrid;
    use std::sync::Arc;

    fn preset(name: &str, horizon: f64) -> Generator {
        Generator::new(catalog::with_horizon(catalog::preset(name).unwrap(), horizon).unwrap()).unwrap()
    }

    #[test]
    fn single_unit_jump_doubles() {
        let path = SamplePath::from_jumps(Arc::new(TimeGrid::integer(3)), 0.0, vec![0.0, 1.0, 0.0, 0.0]).unwrap();
        let e = stochastic_exponential(&path);
        assert_eq!(e.value(0), 1.0);
        assert_eq!((1..4).map(|k| e.value(k)).collect::<Vec<_>>(), vec![2.0, 2.0, 2.0]);
    }

    #[test]
    fn drift_gives_exponential_decay() {
        let grid = Arc::new(TimeGrid::uniform(0.5, 2.0).unwrap());
        let a = 0.3;
        let inc = vec![0.0, -0.5 * a, -0.5 * a, -0.5 * a, -0.5 * a];
        let path = SamplePath::from_increments(
            grid,
            0.0,
            vec![0.0; 5],
            Some(crate::path::ContinuousPart {
                increments: inc,
                diffusive: None,
            }),
        )
        .unwrap();
        let e = stochastic_exponential(&path);
        assert!((e.value(4) - (-a * 2.0f64).exp()).abs() < 1e-15);
    }

    #[test]
    fn minus_one_jump_freezes_at_zero() {
        let path =
            SamplePath::from_jumps(Arc::new(TimeGrid::integer(5)), 0.0, vec![0.0, 0.5, -2.0, -1.0, 3.0, 0.0]).unwrap();
        assert_eq!(tau_j(&path), Some(3.0));
        let e = stochastic_exponential(&path);
        assert_eq!(e.sign, vec![1, 1, -1, 0, 0, 0]);
        assert_eq!(e.value(2), -1.5);
        assert!((3..6).all(|k| e.value(k) == 0.0));
        assert_eq!(e.sign_changes(), 1);
        let none = SamplePath::constant(Arc::new(TimeGrid::integer(2)), 0.0).unwrap();
        assert_eq!(tau_j(&none), None);
    }

    #[test]
    fn zero_path_has_trivial_transforms() {
        let g = preset("zero", 50.0);
        let s = g.sample(0).unwrap();
        let b = TransformBundle::build(&g, &s.path, &s.latent).unwrap();
        assert!(b.y.as_ref().unwrap().iter().all(|&v| v == 0.0));
        assert_eq!(check_exp_identity(&b), 0.0);
    }

    #[test]
    fn identity_holds_and_detects_corruption() {
        let g = preset("rw_bounded_half_alt_harmonic", 2000.0);
        let s = g.sample(5).unwrap();
        let mut b = TransformBundle::build(&g, &s.path, &s.latent).unwrap();
        assert!(check_exp_identity(&b) <= 1e-9);
        assert!(delta_y_error(&g, &s.path, &s.latent, &b).unwrap() <= 1e-12);
        for v in b.v.as_mut().unwrap().iter_mut().skip(1) {
            *v += 1e-3;
        }
        assert!(check_exp_identity(&b) >= 5e-4);
    }

    #[test]
    fn cox_y_on_survival_tends_to_minus_one() {
        let mut spec = catalog::preset("cox_linear").unwrap();
        if let GeneratorSpec::Cox(c) = &mut spec {
            c.step = 0.01;
            c.horizon = 1e4;
        }
        let g = Generator::new(spec).unwrap();
        let never = Latent::Cox { rho: JumpTime::Never };
        let path = g.cox().unwrap().build(JumpTime::Never, 0).unwrap();
        let y = logarithmic_transform(&g, &path, &never).unwrap();
        let t = 1e4f64;
        let closed = -(1.0 - (1.0 + (1.0 + t).ln()) / (1.0 + t));
        let y_t = *y.last().unwrap();
        // Midpoint error at h = 0.01 is about 4e-6.
        assert!((y_t - closed).abs() < 1e-5, "{y_t} vs {closed}");
        let b = TransformBundle::build(&g, &path, &never).unwrap();
        assert!(check_exp_identity(&b) <= 1e-9);
    }

    #[test]
    fn cox_identity_with_jump_and_diffusion() {
        let g = preset("cox_lil", 50.0);
        for seed in 0..20 {
            let s = g.sample(seed).unwrap();
            let b = TransformBundle::build(&g, &s.path, &s.latent).unwrap();
            assert!(check_exp_identity(&b) <= 1e-9, "seed {seed}");
            assert!(delta_y_error(&g, &s.path, &s.latent, &b).unwrap() <= 1e-12);
        }
    }

    #[test]
    fn transform_stops_where_the_law_reaches_minus_one() {
        let g = preset("rw_exp_inv_sqrt", 100.0);
        assert_eq!(valid_len(&g).unwrap(), 2);
        let s = g.sample(0).unwrap();
        let b = TransformBundle::build(&g, &s.path, &s.latent).unwrap();
        assert_eq!(b.valid_len(), 2);
        assert!(check_exp_identity(&b) <= 1e-9);
    }

    #[test]
    fn non_martingales_have_no_transform() {
        let g = preset("det_alternating", 10.0);
        let s = g.sample(0).unwrap();
        let b = TransformBundle::build(&g, &s.path, &s.latent).unwrap();
        assert!(b.y.is_none());
        assert!(check_exp_identity(&b) == 0.0);
    }
}
