//! Predictable characteristics of the generator families.
//!
//! Compensators `F*ν` are computed from the known laws rather than estimated:
//! exact two-point sums for the random walk, quadrature of `F(γ(s))λ(s)` for
//! the intensity construction, and expectations of `Θ` for the one-shot jump.
//! Empirical integrals `F*μ` over observed jumps exist as cross-checks.

use std::fmt;
use std::io::Write;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::generators::{
    CoxSpec, CoxVariant, DyadicSchedule, Generator, GeneratorSpec, JumpSize, JumpTime, Latent, ThetaLaw,
    WalkTables,
};
use crate::path::SamplePath;
use crate::quad::{self, NeumaierSum};

const QUAD_TOL: f64 = 1e-11;

/// The fixed catalog of integrands `F(x)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum IntegrandId {
    /// `x² ∧ |x|`
    SqCapAbs,
    /// `x² ∧ 1`
    SqCapOne,
    /// `x 1{x > κ}`
    PosTail(f64),
    /// `|x| 1{|x| > 1}`
    AbsTail,
    /// `-log(1+x) 1{x < -η}`
    NegLogTail(f64),
    /// `x - log(1+x)`
    XMinusLog,
    /// `e^x - 1 - x`
    ExpRemainder,
    /// `(log(1+x) + γ_t)² 1{|x| <= ε}`
    Log1pSqCap(f64),
    /// `x²`
    Square,
    /// `(1+x)^c`
    PowC(f64),
}

/// Behaviour of an integrand near zero or at an infinite end.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Growth {
    /// Identically zero in that region.
    Vanishes,
    /// `≍ |x|^g`.
    Power(f64),
    Exponential,
    /// Not defined there (log of a nonpositive number).
    Undefined,
}

impl IntegrandId {
    pub fn validate(&self) -> Result<()> {
        let bad = |what: &str, v: f64| Err(Error::InvalidParameter(format!("{what} out of range: {v}")));
        match *self {
            IntegrandId::PosTail(k) if !(k > 0.0 && k.is_finite()) => bad("POS_TAIL threshold", k),
            IntegrandId::NegLogTail(e) if !(e > 0.0 && e < 1.0) => bad("NEG_LOG_TAIL threshold", e),
            IntegrandId::Log1pSqCap(e) if !(e > 0.0 && e < 1.0) => bad("LOG1P_SQ_CAP radius", e),
            IntegrandId::PowC(c) if !(c < 1.0 && c.is_finite()) => bad("POW_C exponent", c),
            _ => Ok(()),
        }
    }

    /// `F(x)` with `γ_t = gamma` where the integrand needs it.
    pub fn eval(&self, x: f64, gamma: f64) -> Result<f64> {
        let domain = || Error::Domain {
            integrand: self.to_string(),
            x,
        };
        Ok(match *self {
            IntegrandId::SqCapAbs => (x * x).min(x.abs()),
            IntegrandId::SqCapOne => (x * x).min(1.0),
            IntegrandId::PosTail(k) => {
                if x > k {
                    x
                } else {
                    0.0
                }
            }
            IntegrandId::AbsTail => {
                if x.abs() > 1.0 {
                    x.abs()
                } else {
                    0.0
                }
            }
            IntegrandId::NegLogTail(eta) => {
                if x < -eta {
                    if x <= -1.0 {
                        return Err(domain());
                    }
                    -x.ln_1p()
                } else {
                    0.0
                }
            }
            IntegrandId::XMinusLog => {
                if x <= -1.0 {
                    return Err(domain());
                }
                x_minus_log(x)
            }
            IntegrandId::ExpRemainder => x.exp_m1() - x,
            IntegrandId::Log1pSqCap(eps) => {
                if x.abs() <= eps {
                    let v = x.ln_1p() + gamma;
                    v * v
                } else {
                    0.0
                }
            }
            IntegrandId::Square => x * x,
            IntegrandId::PowC(c) => {
                if x < -1.0 || (x == -1.0 && c <= 0.0) {
                    return Err(domain());
                }
                (c * x.ln_1p()).exp()
            }
        })
    }

    /// Interior points where `F` is not smooth.
    pub fn breakpoints(&self) -> Vec<f64> {
        match *self {
            IntegrandId::SqCapAbs | IntegrandId::SqCapOne | IntegrandId::AbsTail => vec![-1.0, 1.0],
            IntegrandId::PosTail(k) => vec![k],
            IntegrandId::NegLogTail(e) => vec![-e],
            IntegrandId::Log1pSqCap(e) => vec![-e, e],
            _ => vec![],
        }
    }

    pub fn near_zero(&self) -> Growth {
        match self {
            IntegrandId::PosTail(_) | IntegrandId::AbsTail | IntegrandId::NegLogTail(_) => Growth::Vanishes,
            IntegrandId::PowC(_) => Growth::Power(0.0),
            _ => Growth::Power(2.0),
        }
    }

    pub fn at_pos_infinity(&self) -> Growth {
        match *self {
            IntegrandId::SqCapAbs | IntegrandId::PosTail(_) | IntegrandId::AbsTail | IntegrandId::XMinusLog => {
                Growth::Power(1.0)
            }
            IntegrandId::SqCapOne => Growth::Power(0.0),
            IntegrandId::NegLogTail(_) | IntegrandId::Log1pSqCap(_) => Growth::Vanishes,
            IntegrandId::ExpRemainder => Growth::Exponential,
            IntegrandId::Square => Growth::Power(2.0),
            IntegrandId::PowC(c) => Growth::Power(c),
        }
    }

    pub fn at_neg_infinity(&self) -> Growth {
        match self {
            IntegrandId::SqCapAbs | IntegrandId::AbsTail | IntegrandId::ExpRemainder => Growth::Power(1.0),
            IntegrandId::SqCapOne => Growth::Power(0.0),
            IntegrandId::PosTail(_) | IntegrandId::Log1pSqCap(_) => Growth::Vanishes,
            IntegrandId::NegLogTail(_) | IntegrandId::XMinusLog | IntegrandId::PowC(_) => Growth::Undefined,
            IntegrandId::Square => Growth::Power(2.0),
        }
    }

    /// `p F(x (1 - 1/p))`, stable when `p` is tiny or has underflowed.
    ///
    /// `y` is the precomputed large move; `ln_p` must be exact.
    pub fn weighted_far(&self, x: f64, y: f64, ln_p: f64, gamma: f64) -> Result<f64> {
        let p = ln_p.exp();
        if x == 0.0 {
            return Ok(0.0);
        }
        if let IntegrandId::Square = self {
            // p y² = x² (1-p)² / p
            return Ok((2.0 * x.abs().ln() + 2.0 * (-p).ln_1p() - ln_p).exp());
        }
        if y.is_finite() && p > f64::MIN_POSITIVE {
            return Ok(p * self.eval(y, gamma)?);
        }
        // The large move is astronomically big; use its asymptotic form.
        let up = y > 0.0;
        let growth = if up { self.at_pos_infinity() } else { self.at_neg_infinity() };
        let ln_abs_y = x.abs().ln() + (-p).ln_1p() - ln_p;
        match growth {
            Growth::Vanishes => Ok(0.0),
            Growth::Undefined => Err(Error::Domain {
                integrand: self.to_string(),
                x: y,
            }),
            Growth::Exponential => Ok(f64::INFINITY),
            Growth::Power(1.0) => Ok(x.abs() * (1.0 - p)),
            Growth::Power(g) => Ok((ln_p + g * ln_abs_y).exp()),
        }
    }
}

/// `x - log(1+x)`, accurate near zero.
pub fn x_minus_log(x: f64) -> f64 {
    if x.abs() < 1e-3 {
        let x2 = x * x;
        x2 * (0.5 - x / 3.0 + x2 / 4.0 - x2 * x / 5.0 + x2 * x2 / 6.0)
    } else {
        x - x.ln_1p()
    }
}

fn fmt_param(v: f64) -> String {
    format!("{v:?}")
}

impl fmt::Display for IntegrandId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            IntegrandId::SqCapAbs => write!(f, "SQ_CAP_ABS"),
            IntegrandId::SqCapOne => write!(f, "SQ_CAP_ONE"),
            IntegrandId::PosTail(k) => write!(f, "POS_TAIL[{}]", fmt_param(k)),
            IntegrandId::AbsTail => write!(f, "ABS_TAIL"),
            IntegrandId::NegLogTail(e) => write!(f, "NEG_LOG_TAIL[{}]", fmt_param(e)),
            IntegrandId::XMinusLog => write!(f, "X_MINUS_LOG"),
            IntegrandId::ExpRemainder => write!(f, "EXP_REMAINDER"),
            IntegrandId::Log1pSqCap(e) => write!(f, "LOG1P_SQ_CAP[{}]", fmt_param(e)),
            IntegrandId::Square => write!(f, "SQUARE"),
            IntegrandId::PowC(c) => write!(f, "POW_C[{}]", fmt_param(c)),
        }
    }
}

impl FromStr for IntegrandId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let (name, param) = match s.find('[') {
            Some(i) if s.ends_with(']') => {
                let raw = &s[i + 1..s.len() - 1];
                let v: f64 = raw
                    .trim()
                    .parse()
                    .map_err(|_| Error::Config(format!("bad integrand parameter in {s:?}")))?;
                (&s[..i], Some(v))
            }
            _ => (s, None),
        };
        let need = |p: Option<f64>| p.ok_or_else(|| Error::Config(format!("integrand {name} needs a parameter, e.g. {name}[1.0]")));
        let id = match name.to_ascii_uppercase().as_str() {
            "SQ_CAP_ABS" => IntegrandId::SqCapAbs,
            "SQ_CAP_ONE" => IntegrandId::SqCapOne,
            "POS_TAIL" => IntegrandId::PosTail(need(param)?),
            "ABS_TAIL" => IntegrandId::AbsTail,
            "NEG_LOG_TAIL" => IntegrandId::NegLogTail(need(param)?),
            "X_MINUS_LOG" => IntegrandId::XMinusLog,
            "EXP_REMAINDER" => IntegrandId::ExpRemainder,
            "LOG1P_SQ_CAP" => IntegrandId::Log1pSqCap(need(param)?),
            "SQUARE" => IntegrandId::Square,
            "POW_C" => IntegrandId::PowC(need(param)?),
            _ => return Err(Error::Config(format!("unknown integrand {s:?}"))),
        };
        id.validate().map_err(|e| Error::Config(e.to_string()))?;
        Ok(id)
    }
}

/// Expected `F(ΔX_n)` under the two-point law, over nonzero outcomes.
fn walk_term(t: &WalkTables, n: usize, f: IntegrandId, gamma: f64) -> Result<f64> {
    let x = t.x[n];
    if x == 0.0 {
        return Ok(0.0);
    }
    let near = -t.p[n];
    Ok(near.ln_1p().exp() * f.eval(x, gamma)? + f.weighted_far(x, t.y[n], t.ln_p[n], gamma)?)
}

/// `γ_n = -E[log(1 + ΔX_n)]` for one walk step.
fn walk_gamma(t: &WalkTables, n: usize) -> Result<f64> {
    let (x, y, p) = (t.x[n], t.y[n], t.p[n]);
    if x == 0.0 {
        return Ok(0.0);
    }
    if x <= -1.0 || y <= -1.0 {
        return Err(Error::SupportReachesMinusOne { time: n as f64 });
    }
    let far = if y.is_finite() {
        p * y.ln_1p()
    } else {
        // p log|y| with log|y| = log|x| - ln p + log(1-p); vanishes with p.
        p * (x.abs().ln() - t.ln_p[n])
    };
    Ok(-((1.0 - p) * x.ln_1p() + far))
}

/// Values of `γ(s)` where `F(γ(s))` may jump.
fn cox_breaks(gamma: JumpSize, f: IntegrandId) -> Vec<f64> {
    f.breakpoints()
        .into_iter()
        .filter_map(|b| match gamma {
            JumpSize::Identity if b > 0.0 => Some(b),
            JumpSize::OnePlusSquared if b > 1.0 => Some(b.sqrt() - 1.0),
            JumpSize::Reciprocal if b > 0.0 && b < 1.0 => Some(1.0 / b - 1.0),
            _ => None,
        })
        .collect()
}

/// `∫_a^b F(γ(s)) λ(s) ds`, with `b = ∞` allowed.
fn cox_integral(spec: &CoxSpec, f: IntegrandId, a: f64, b: f64) -> Result<f64> {
    if b <= a || spec.lambda.total() == 0.0 {
        return Ok(0.0);
    }
    let breaks = cox_breaks(spec.gamma, f);
    let integrand = |s: f64| {
        let l = spec.lambda.eval(s);
        if l == 0.0 {
            return 0.0;
        }
        f.eval(spec.gamma.eval(s), 0.0).map_or(f64::NAN, |v| v * l)
    };
    // Surface domain errors directly rather than as a NaN integral.
    f.eval(spec.gamma.eval(a), 0.0)?;
    let v = if b.is_infinite() {
        quad::integrate_to_infinity(integrand, a, &breaks, QUAD_TOL)?
    } else {
        quad::integrate(integrand, a, b, &breaks, QUAD_TOL)?
    };
    Ok(v)
}

fn theta_expectation(law: &ThetaLaw, f: IntegrandId) -> Result<f64> {
    if law.charges_minus_one() {
        // Check the domain at the lower end of the support explicitly.
        f.eval(-law.lower_atom(), 0.0)?;
    }
    law.expectation(|x| f.eval(x, 0.0).unwrap_or(f64::NAN), &f.breakpoints())
}

/// Deterministic `F*ν_t` (on `{ρ > t}` for the intensity construction).
///
/// `t` may be infinite for the intensity construction; integer-time families
/// are summed up to `min(t, horizon)`.
pub fn compensator_integral(gen: &Generator, f: IntegrandId, t: f64) -> Result<f64> {
    f.validate()?;
    match gen.spec() {
        GeneratorSpec::RandomWalk(_) => {
            let tables = gen.walk_tables().expect("walk tables");
            let upto = (t.max(0.0).floor() as usize).min(tables.events());
            let needs_gamma = matches!(f, IntegrandId::Log1pSqCap(_));
            let mut acc = NeumaierSum::default();
            for n in 1..=upto {
                let g = if needs_gamma { walk_gamma(tables, n)? } else { 0.0 };
                acc.add(walk_term(tables, n, f, g)?);
            }
            Ok(acc.value())
        }
        GeneratorSpec::Cox(spec) => cox_integral(spec, f, 0.0, t),
        GeneratorSpec::OneShot(o) => {
            if t < 1.0 {
                Ok(0.0)
            } else {
                theta_expectation(&o.law, f)
            }
        }
        GeneratorSpec::Alternating { events } => {
            let upto = (t.max(0.0).floor() as usize).min(*events);
            let mut acc = NeumaierSum::default();
            for n in 1..=upto {
                let x = if n % 2 == 0 { 1.0 } else { -1.0 } / n as f64;
                acc.add(f.eval(x, 0.0)?);
            }
            Ok(acc.value())
        }
    }
}

/// `F*ν_t` along a sampled path (integrates only up to `t ∧ ρ`).
pub fn compensator_coupled(gen: &Generator, f: IntegrandId, latent: &Latent, t: f64) -> Result<f64> {
    match (gen.spec(), latent) {
        (GeneratorSpec::Cox(spec), Latent::Cox { rho }) => {
            f.validate()?;
            cox_integral(spec, f, 0.0, rho.min(t))
        }
        _ => compensator_integral(gen, f, t),
    }
}

/// Cumulative `F*ν` at every grid time, path-coupled through `latent`.
pub fn compensator_series(gen: &Generator, f: IntegrandId, latent: &Latent) -> Result<Vec<f64>> {
    f.validate()?;
    let times = gen.grid().times().to_vec();
    let mut out = vec![0.0; times.len()];
    match gen.spec() {
        GeneratorSpec::Cox(spec) => {
            let stop = latent.rho().unwrap_or(JumpTime::Never);
            let mut acc = NeumaierSum::default();
            for k in 1..times.len() {
                let b = stop.min(times[k]);
                acc.add(cox_integral(spec, f, times[k - 1], b)?);
                out[k] = acc.value();
            }
        }
        GeneratorSpec::RandomWalk(_) => {
            let tables = gen.walk_tables().expect("walk tables");
            let needs_gamma = matches!(f, IntegrandId::Log1pSqCap(_));
            let mut acc = NeumaierSum::default();
            for n in 1..times.len() {
                let g = if needs_gamma { walk_gamma(tables, n)? } else { 0.0 };
                acc.add(walk_term(tables, n, f, g)?);
                out[n] = acc.value();
            }
        }
        GeneratorSpec::OneShot(_) | GeneratorSpec::Alternating { .. } => {
            for (k, t) in times.iter().enumerate() {
                out[k] = compensator_integral(gen, f, *t)?;
            }
        }
    }
    Ok(out)
}

/// Cumulative `F*μ`: the sum of `F(ΔX_s)` over observed nonzero jumps.
///
/// `gamma` supplies `γ_t` per grid index for `LOG1P_SQ_CAP`; zero otherwise.
pub fn empirical_jump_integral(path: &SamplePath, f: IntegrandId, gamma: Option<&[f64]>) -> Result<Vec<f64>> {
    f.validate()?;
    let mut out = Vec::with_capacity(path.len());
    let mut acc = NeumaierSum::default();
    for (k, &j) in path.jumps().iter().enumerate() {
        if j != 0.0 {
            let g = gamma.map_or(0.0, |g| g[k]);
            acc.add(f.eval(j, g)?);
        }
        out.push(acc.value());
    }
    Ok(out)
}

/// `γ_t` at every grid time.
///
/// Two-point formula for the walk, `-E[log(1+Θ)]` at `t = 1` for the one-shot
/// jump, and identically zero for the quasi-left-continuous intensity
/// construction.
pub fn gamma_series(gen: &Generator) -> Result<Vec<f64>> {
    let n = gen.grid().len();
    match gen.spec() {
        GeneratorSpec::RandomWalk(_) => {
            let tables = gen.walk_tables().expect("walk tables");
            let mut out = vec![0.0; n];
            for (k, slot) in out.iter_mut().enumerate().skip(1) {
                *slot = walk_gamma(tables, k)?;
            }
            Ok(out)
        }
        GeneratorSpec::Cox(spec) if spec.variant == CoxVariant::Martingale => Ok(vec![0.0; n]),
        GeneratorSpec::OneShot(o) => {
            if o.law.charges_minus_one() {
                return Err(Error::SupportReachesMinusOne { time: 1.0 });
            }
            let mut out = vec![0.0; n];
            out[1] = -o.law.expectation(|x| x.ln_1p(), &[])?;
            Ok(out)
        }
        _ => Err(Error::Unsupported("the log-jump correction".into())),
    }
}

/// `γ_n` for a single random-walk step.
pub fn gamma_at(gen: &Generator, n: usize) -> Result<f64> {
    match gen.walk_tables() {
        Some(t) if n >= 1 && n <= t.events() => walk_gamma(t, n),
        Some(_) => Ok(0.0),
        None => gamma_series(gen).map(|g| g.get(n).copied().unwrap_or(0.0)),
    }
}

/// Exponential compensator `V = ½[X^c,X^c] + (x - log(1+x))*ν` along a path.
///
/// Only the prefix of the grid on which every possible jump stays above `-1`
/// is returned.
///
/// For the intensity construction the `ν` part uses the same midpoint nodes as
/// the simulated drift, so `ℰ(X) = e^{Y-V}` holds to rounding error.
pub fn exponential_compensator(gen: &Generator, path: &SamplePath, latent: &Latent) -> Result<Vec<f64>> {
    let n = path.len();
    let mut out = vec![0.0; n];
    match gen.spec() {
        GeneratorSpec::RandomWalk(_) => {
            let tables = gen.walk_tables().expect("walk tables");
            out.truncate(tables.first_minus_one_reach().unwrap_or(n));
            let mut acc = NeumaierSum::default();
            for k in 1..out.len() {
                acc.add(walk_term(tables, k, IntegrandId::XMinusLog, 0.0)?);
                out[k] = acc.value();
            }
        }
        GeneratorSpec::Cox(spec) if spec.variant == CoxVariant::Martingale => {
            let rho = latent.rho().unwrap_or(JumpTime::Never);
            let increments = cox_log_increments(spec, path, rho);
            let mut acc = NeumaierSum::default();
            for k in 1..n {
                let d = path.diffusive_increment(k);
                acc.add(increments[k].1 + 0.5 * d * d);
                out[k] = acc.value();
            }
        }
        GeneratorSpec::OneShot(o) if o.law.charges_minus_one() => out.truncate(1),
        GeneratorSpec::OneShot(o) => {
            let v = theta_expectation(&o.law, IntegrandId::XMinusLog)?;
            out[1..].fill(v);
        }
        _ => return Err(Error::Unsupported("the exponential compensator".into())),
    }
    Ok(out)
}

/// Per-step `(∫ log(1+γ)λ, ∫ (γ - log(1+γ))λ)` over `[t_{k-1}, t_k ∧ ρ]`,
/// midpoint rule on the path grid with a partial cell at `ρ`.
pub(crate) fn cox_log_increments(spec: &CoxSpec, path: &SamplePath, rho: JumpTime) -> Vec<(f64, f64)> {
    let t = path.times();
    let mut out = vec![(0.0, 0.0); t.len()];
    for k in 1..t.len() {
        let a = t[k - 1];
        let b = rho.min(t[k]);
        if b <= a {
            break;
        }
        let h = b - a;
        let s = a + 0.5 * h;
        let l = spec.lambda.eval(s);
        if l == 0.0 {
            continue;
        }
        let g = spec.gamma.eval(s);
        let log_part = g.ln_1p();
        out[k] = (h * log_part * l, h * x_minus_log(g) * l);
    }
    out
}

/// Predictable nondecreasing part `A` with `X = M - A`, per grid time.
///
/// Zero for the martingale families; `∫₀^{t∧ρ} γλ ds` for the negated
/// intensity construction. The deterministic alternating path has no
/// nondecreasing decomposition, and its total variation is reported instead.
pub fn predictable_part(gen: &Generator, path: &SamplePath, latent: &Latent) -> Result<Vec<f64>> {
    let n = path.len();
    match gen.spec() {
        GeneratorSpec::Cox(spec) if spec.variant == CoxVariant::NegatedJump => {
            let rho = latent.rho().unwrap_or(JumpTime::Never);
            let t = path.times();
            let mut out = vec![0.0; n];
            let mut acc = NeumaierSum::default();
            for k in 1..n {
                let a = t[k - 1];
                let b = rho.min(t[k]);
                if b > a {
                    acc.add((b - a) * spec.drift_rate(a + 0.5 * (b - a)));
                }
                out[k] = acc.value();
            }
            Ok(out)
        }
        GeneratorSpec::Alternating { .. } => {
            let mut acc = NeumaierSum::default();
            Ok(path
                .jumps()
                .iter()
                .map(|j| {
                    acc.add(j.abs());
                    acc.value()
                })
                .collect())
        }
        _ => Ok(vec![0.0; n]),
    }
}

/// `log E[(1+ΔX_n)^c] - c E[log(1+ΔX_n)]` for `x_n = -1/2` and the scheduled
/// `p_n`, together with the upper bound `log(2 p^(1-c) + 1) - c p log(1 + 1/p)`.
pub fn kappa_n(schedule: &DyadicSchedule, n: usize) -> (f64, f64) {
    let c = schedule.c();
    let ln_p = schedule.ln_p(n);
    let p = ln_p.exp();
    let p_log_inv = p * p.ln_1p() - p * ln_p; // p log(1 + 1/p)
    let pow = ((1.0 - c) * ln_p + c * p.ln_1p()).exp(); // p^(1-c) (1+p)^c
    let exact = (pow - p).ln_1p() - c * p_log_inv;
    let bound = (2.0 * ((1.0 - c) * ln_p).exp()).ln_1p() - c * p_log_inv;
    (exact, bound)
}

/// `log(1+x)` growth summary of a sum `Σ a_n` with `a_n ≍ exp(rate·n) n^(-power)`.
#[derive(Debug, Clone, Copy)]
struct Decay {
    rate: f64,
    power: f64,
}

impl Decay {
    fn summable(&self) -> bool {
        let rate = if self.rate.is_nan() { 0.0 } else { self.rate };
        rate < 0.0 || (rate == 0.0 && self.power > 1.0)
    }
}

fn scaled(factor: f64, rate: f64) -> f64 {
    if factor == 0.0 {
        0.0
    } else {
        factor * rate
    }
}

/// Whether `F*ν` stays finite as `t → ∞`, given the latent draws.
///
/// Decided from the asymptotic profiles of the family, not from numbers at
/// the horizon. Domain errors at any finite time are reported as errors.
pub fn limit_finite(gen: &Generator, f: IntegrandId, latent: &Latent) -> Result<bool> {
    f.validate()?;
    match gen.spec() {
        GeneratorSpec::RandomWalk(w) => {
            compensator_integral(gen, f, gen.spec().horizon())?;
            let x = w.x.profile();
            if x.is_zero() {
                return Ok(true);
            }
            let p = w.p.profile();
            let mut parts = Vec::new();
            let a = x.decay;
            let small = |value: Option<f64>| -> Result<Option<Decay>> {
                match value {
                    Some(c) => Ok((f.eval(c, 0.0)? != 0.0).then_some(Decay { rate: 0.0, power: 0.0 })),
                    None => Ok(match f.near_zero() {
                        Growth::Power(b) => Some(Decay { rate: 0.0, power: a * b }),
                        _ => None,
                    }),
                }
            };
            parts.extend(small(x.constant)?);
            if p.constant {
                let q = match &w.p {
                    crate::generators::PRule::Constant { value } => *value,
                    _ => unreachable!(),
                };
                parts.extend(small(x.constant.map(|c| c * (1.0 - 1.0 / q)))?);
            } else {
                let mut signs = Vec::new();
                if x.positive {
                    signs.push(false);
                }
                if x.negative {
                    signs.push(true);
                }
                for y_up in signs {
                    let (rate, e) = (p.rate, p.power);
                    let to_infinity = rate < 0.0 || e > a;
                    let to_zero = rate == 0.0 && e < a;
                    let growth = if to_infinity {
                        if y_up {
                            f.at_pos_infinity()
                        } else {
                            f.at_neg_infinity()
                        }
                    } else if to_zero {
                        f.near_zero()
                    } else {
                        parts.push(Decay { rate: 0.0, power: e });
                        continue;
                    };
                    match growth {
                        Growth::Vanishes => {}
                        Growth::Undefined => {
                            return Err(Error::Domain {
                                integrand: f.to_string(),
                                x: if y_up { f64::INFINITY } else { f64::NEG_INFINITY },
                            })
                        }
                        Growth::Exponential => return Ok(false),
                        Growth::Power(g) => parts.push(Decay {
                            rate: scaled(1.0 - g, rate),
                            power: (1.0 - g) * e + a * g,
                        }),
                    }
                }
            }
            Ok(parts.iter().all(Decay::summable))
        }
        GeneratorSpec::Cox(spec) => {
            if let Some(JumpTime::At(_)) = latent.rho() {
                return Ok(true);
            }
            let Some(lam) = spec.lambda.tail_exponent() else {
                return Ok(true);
            };
            let g = spec.gamma.tail_exponent();
            let growth = if g > 0.0 {
                f.at_pos_infinity()
            } else if g < 0.0 {
                f.near_zero()
            } else {
                let v = f.eval(spec.gamma.eval(0.0), 0.0)?;
                if v == 0.0 {
                    Growth::Vanishes
                } else {
                    Growth::Power(0.0)
                }
            };
            Ok(match growth {
                Growth::Vanishes => true,
                Growth::Power(b) => lam + g * b < -1.0,
                Growth::Exponential => false,
                Growth::Undefined => {
                    return Err(Error::Domain {
                        integrand: f.to_string(),
                        x: f64::INFINITY,
                    })
                }
            })
        }
        GeneratorSpec::OneShot(o) => {
            theta_expectation(&o.law, f)?;
            Ok(match (o.law, f.at_pos_infinity()) {
                (ThetaLaw::ParetoExp { alpha }, Growth::Exponential) => alpha > 1.0,
                _ => true,
            })
        }
        GeneratorSpec::Alternating { events } => {
            compensator_integral(gen, f, *events as f64)?;
            Ok(match f.near_zero() {
                Growth::Power(b) => b > 1.0,
                _ => true,
            })
        }
    }
}

/// Whether `[X^c, X^c]_∞` is finite.
pub fn continuous_qv_finite(spec: &GeneratorSpec) -> bool {
    !spec.has_diffusion()
}

/// Whether `A_∞` is finite on the sample.
pub fn predictable_part_finite(gen: &Generator, latent: &Latent) -> bool {
    match gen.spec() {
        GeneratorSpec::Cox(spec) if spec.variant == CoxVariant::NegatedJump => {
            if let Some(JumpTime::At(_)) = latent.rho() {
                return true;
            }
            match spec.lambda.tail_exponent() {
                None => true,
                Some(lam) => lam + spec.gamma.tail_exponent() < -1.0,
            }
        }
        GeneratorSpec::Alternating { .. } => false,
        _ => true,
    }
}

/// Characteristics of one sample, ready for serialization.
#[derive(Debug, Clone)]
pub struct CharacteristicsReport {
    pub times: Vec<f64>,
    /// Cumulative `F*ν` per requested integrand.
    pub integrals: Vec<(IntegrandId, Vec<f64>)>,
    /// Predictable part `A`.
    pub predictable: Vec<f64>,
    /// `γ_t`, when defined.
    pub gamma: Option<Vec<f64>>,
    /// Exponential compensator `V`, when defined.
    pub v: Option<Vec<f64>>,
}

impl CharacteristicsReport {
    pub fn build(gen: &Generator, path: &SamplePath, latent: &Latent, integrands: &[IntegrandId]) -> Result<Self> {
        let mut integrals = Vec::with_capacity(integrands.len());
        for &f in integrands {
            integrals.push((f, compensator_series(gen, f, latent)?));
        }
        let gamma = gamma_series(gen).ok();
        let v = if gamma.is_some() {
            exponential_compensator(gen, path, latent).ok()
        } else {
            None
        };
        Ok(CharacteristicsReport {
            times: path.times().to_vec(),
            integrals,
            predictable: predictable_part(gen, path, latent)?,
            gamma,
            v,
        })
    }

    /// Long-format CSV: `t,integrand,value`.
    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        w.write_record(["t", "integrand", "value"])?;
        let mut series: Vec<(String, &Vec<f64>)> =
            self.integrals.iter().map(|(f, s)| (f.to_string(), s)).collect();
        series.push(("A".into(), &self.predictable));
        if let Some(g) = &self.gamma {
            series.push(("GAMMA".into(), g));
        }
        if let Some(v) = &self.v {
            series.push(("V".into(), v));
        }
        for (name, values) in &series {
            for (t, v) in self.times.iter().zip(values.iter()) {
                w.write_record([t.to_string(), name.clone(), v.to_string()])?;
            }
        }
        w.flush().map_err(|e| Error::io("<csv>", e))?;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators::{catalog, Intensity, PRule, RandomWalkSpec, XRule};

    fn walk(x: XRule, p: PRule, events: usize) -> Generator {
        Generator::new(GeneratorSpec::RandomWalk(RandomWalkSpec { x, p, events })).unwrap()
    }

    fn cox(gamma: JumpSize) -> Generator {
        Generator::new(GeneratorSpec::Cox(CoxSpec {
            lambda: Intensity::InverseSquare,
            gamma,
            step: 0.5,
            horizon: 100.0,
            with_bm: false,
            variant: CoxVariant::Martingale,
        }))
        .unwrap()
    }

    #[test]
    fn names_round_trip() {
        for f in [
            IntegrandId::SqCapAbs,
            IntegrandId::PosTail(1.0),
            IntegrandId::NegLogTail(0.5),
            IntegrandId::Log1pSqCap(0.25),
            IntegrandId::PowC(-2.0),
            IntegrandId::ExpRemainder,
        ] {
            assert_eq!(f.to_string().parse::<IntegrandId>().unwrap(), f);
        }
        assert_eq!(IntegrandId::PosTail(1.0).to_string(), "POS_TAIL[1.0]");
        assert!("POS_TAIL".parse::<IntegrandId>().is_err());
        assert!("POW_C[1.5]".parse::<IntegrandId>().is_err());
    }

    #[test]
    fn square_compensator_matches_enumeration() {
        let g = walk(XRule::InvSqrtAlternating { zero_first: false }, PRule::Geometric { scale: 1.0, ratio: 0.5 }, 3);
        // Enumerate both outcomes of each step directly.
        let mut oracle = 0.0;
        for n in 1..=3u32 {
            let x = (-1f64).powi(n as i32) / (n as f64).sqrt();
            let p = 0.5f64.powi(n as i32);
            let y = x * (1.0 - 1.0 / p);
            oracle += (1.0 - p) * x * x + p * y * y;
        }
        let v = compensator_integral(&g, IntegrandId::Square, 3.0).unwrap();
        assert!((v - oracle).abs() < 1e-12, "{v} vs {oracle}");
        // Same value through the closed form x²(1 - p + p(1 - 1/p)²).
        let closed: f64 = (1..=3)
            .map(|n| {
                let p = 0.5f64.powi(n);
                (1.0 / n as f64) * (1.0 - p + p * (1.0 - 1.0 / p).powi(2))
            })
            .sum();
        assert!((v - closed).abs() < 1e-12);
    }

    #[test]
    fn pos_tail_closed_form_and_quadrature_agree() {
        let g = cox(JumpSize::Identity);
        let (k, t) = (1.0f64, 50.0f64);
        let anti = |s: f64| (1.0 + s).ln() + 1.0 / (1.0 + s);
        let closed = anti(t) - anti(k);
        let v = compensator_integral(&g, IntegrandId::PosTail(k), t).unwrap();
        assert!((v - closed).abs() < 1e-8, "{v} vs {closed}");
        let mid = quad::midpoint(|s| s / ((1.0 + s) * (1.0 + s)), k, t, 200_000);
        assert!((v - mid).abs() < 1e-8);
    }

    #[test]
    fn pow_c_total_mass() {
        let g = cox(JumpSize::Identity);
        let v = compensator_integral(&g, IntegrandId::PowC(0.5), f64::INFINITY).unwrap();
        assert!((v - 2.0).abs() < 1e-6, "{v}");
    }

    #[test]
    fn jump_integral_examples() {
        let grid = std::sync::Arc::new(crate::path::TimeGrid::integer(2));
        let none = SamplePath::constant(grid.clone(), 0.0).unwrap();
        assert!(empirical_jump_integral(&none, IntegrandId::SqCapOne, None).unwrap().iter().all(|&v| v == 0.0));
        let one = SamplePath::from_jumps(grid, 0.0, vec![0.0, 2.0, 0.0]).unwrap();
        assert_eq!(empirical_jump_integral(&one, IntegrandId::SqCapOne, None).unwrap(), vec![0.0, 1.0, 1.0]);
        assert!(matches!(
            empirical_jump_integral(&SamplePath::from_jumps(one.grid().clone(), 0.0, vec![0.0, -1.5, 0.0]).unwrap(), IntegrandId::XMinusLog, None),
            Err(Error::Domain { .. })
        ));
    }

    #[test]
    fn two_point_gamma_and_v() {
        let g = walk(XRule::Constant { value: -0.5 }, PRule::Constant { value: 0.25 }, 1);
        let gamma = gamma_at(&g, 1).unwrap();
        let oracle = -(0.75 * 0.5f64.ln() + 0.25 * 2.5f64.ln());
        assert!((gamma - oracle).abs() < 1e-15);
        assert!((gamma - 0.290_787_7).abs() < 1e-7);
        let sample = g.sample(0).unwrap();
        let v = exponential_compensator(&g, &sample.path, &sample.latent).unwrap();
        let v_oracle = 0.75 * (-0.5 - 0.5f64.ln()) + 0.25 * (1.5 - 2.5f64.ln());
        assert!((v[1] - v_oracle).abs() < 1e-15);
        // With mean-zero increments, V_n is the running sum of γ_n.
        assert!((v[1] - gamma).abs() < 1e-15);
    }

    #[test]
    fn zero_walk_has_zero_characteristics() {
        let g = walk(XRule::Zero, PRule::Geometric { scale: 0.5, ratio: 0.5 }, 10);
        assert_eq!(gamma_series(&g).unwrap(), vec![0.0; 11]);
        let s = g.sample(3).unwrap();
        assert!(exponential_compensator(&g, &s.path, &s.latent).unwrap().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn cox_gamma_vanishes() {
        assert!(gamma_series(&cox(JumpSize::Identity)).unwrap().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn cox_v_on_survival_matches_refined_grid() {
        let make = |step: f64| {
            Generator::new(GeneratorSpec::Cox(CoxSpec {
                lambda: Intensity::InverseSquare,
                gamma: JumpSize::Identity,
                step,
                horizon: 20.0,
                with_bm: false,
                variant: CoxVariant::Martingale,
            }))
            .unwrap()
        };
        let v_at = |step: f64| {
            let g = make(step);
            let path = g.cox().unwrap().build(JumpTime::Never, 0).unwrap();
            *exponential_compensator(&g, &path, &Latent::Cox { rho: JumpTime::Never }).unwrap().last().unwrap()
        };
        let coarse = v_at(0.01);
        let fine = v_at(0.001);
        assert!((coarse - fine).abs() < 1e-6, "{coarse} vs {fine}");
        let exact = compensator_integral(&make(0.01), IntegrandId::XMinusLog, 20.0).unwrap();
        assert!((fine - exact).abs() < 1e-7);
    }

    #[test]
    fn compensators_are_nondecreasing() {
        let g = catalog::preset("rw_compensator").map(|s| Generator::new(s).unwrap()).unwrap();
        let s = g.sample(1).unwrap();
        for f in [IntegrandId::SqCapAbs, IntegrandId::PosTail(1.0), IntegrandId::Square, IntegrandId::AbsTail] {
            let series = compensator_series(&g, f, &s.latent).unwrap();
            assert!(series.windows(2).all(|w| w[1] >= w[0]), "{f}");
        }
        let c = cox(JumpSize::Identity);
        let s = c.sample(4).unwrap();
        let series = compensator_series(&c, IntegrandId::SqCapAbs, &s.latent).unwrap();
        assert!(series.windows(2).all(|w| w[1] >= w[0]));
    }

    #[test]
    fn compensated_jump_mean_is_zero_per_step() {
        // E[ΔX_n] = 0, so the two-point expectation of x vanishes.
        let g = catalog::preset("rw_compensator").map(|s| Generator::new(s).unwrap()).unwrap();
        let t = g.walk_tables().unwrap();
        for n in 1..=t.events() {
            let m = (1.0 - t.p[n]) * t.x[n] + t.p[n] * t.y[n];
            assert!(m.abs() < 1e-15, "n={n}");
        }
    }

    #[test]
    fn kappa_is_nonnegative_and_bounded() {
        let s = DyadicSchedule::new(0.5, 100).unwrap();
        for n in 1..=100 {
            let (k, b) = kappa_n(&s, n);
            assert!(k >= 0.0 && k <= b + 1e-15, "n={n} k={k} b={b}");
            if n >= s.threshold_index() {
                assert!(b <= 2.0 / (n * n) as f64, "n={n}");
            }
        }
        // Brute-force check at n = 2 from the two-point law.
        let p = s.p(2);
        let (x, y) = (-0.5f64, -0.5 * (1.0 - 1.0 / p));
        let direct = ((1.0 - p) * (1.0 + x).powf(0.5) + p * (1.0 + y).powf(0.5)).ln()
            - 0.5 * ((1.0 - p) * x.ln_1p() + p * y.ln_1p());
        assert!((kappa_n(&s, 2).0 - direct).abs() < 1e-14);
    }

    #[test]
    fn limit_classification_follows_series_behaviour() {
        let sq = IntegrandId::SqCapAbs;
        let rare = PRule::Geometric { scale: 1e-3, ratio: 0.5 };
        let lat = Latent::None;
        let alt = walk(XRule::AltHarmonic { scale: 1.0 }, rare.clone(), 100);
        assert!(!limit_finite(&alt, sq, &lat).unwrap());
        assert!(limit_finite(&alt, IntegrandId::SqCapOne, &lat).unwrap());
        let inv = walk(XRule::InvSqrtAlternating { zero_first: true }, rare.clone(), 100);
        assert!(!limit_finite(&inv, sq, &lat).unwrap());
        let bounded = walk(XRule::AltHarmonic { scale: 0.5 }, PRule::Constant { value: 0.5 }, 100);
        assert!(limit_finite(&bounded, sq, &lat).unwrap());
        assert!(limit_finite(&bounded, IntegrandId::XMinusLog, &lat).unwrap());
        assert!(limit_finite(&bounded, IntegrandId::PosTail(1.0), &lat).unwrap());
        let never = Latent::Cox { rho: JumpTime::Never };
        assert!(!limit_finite(&cox(JumpSize::Identity), sq, &never).unwrap());
        assert!(limit_finite(&cox(JumpSize::Identity), IntegrandId::SqCapOne, &never).unwrap());
        assert!(limit_finite(&cox(JumpSize::Identity), sq, &Latent::Cox { rho: JumpTime::At(3.0) }).unwrap());
        assert!(limit_finite(&cox(JumpSize::Reciprocal), IntegrandId::XMinusLog, &never).unwrap());
        let pareto = Generator::new(catalog::preset("oneshot_pareto").unwrap()).unwrap();
        assert!(!limit_finite(&pareto, IntegrandId::ExpRemainder, &lat).unwrap());
    }

    #[test]
    fn continuous_law_touching_minus_one_keeps_its_transform() {
        // E[E - 1 - ln E] for E ~ Exp(1) is the Euler-Mascheroni constant.
        let g = Generator::new(catalog::preset("oneshot_pareto").unwrap()).unwrap();
        let s = g.sample(4).unwrap();
        let v = exponential_compensator(&g, &s.path, &s.latent).unwrap();
        assert_eq!(v.len(), 2);
        assert!((v[1] - 0.577_215_664_901_532_9).abs() < 1e-9, "{}", v[1]);
    }
}
