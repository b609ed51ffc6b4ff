//! Random walk with rare large jumps.
//!
//! At each integer time `n` the walk moves by `x_n` with probability `1 - p_n`
//! and by `x_n (1 - 1/p_n)` with probability `p_n`, so every increment has mean
//! zero. With `Σ p_n < ∞` only finitely many large moves happen, and the tail
//! of the path follows the deterministic sequence `x_n`.

use std::sync::Arc;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::path::{SamplePath, TimeGrid};
use crate::rng;

/// Closeness to `x/(1+x)` below which a firing probability is rejected,
/// since the large move would land on (or next to) `-1`.
pub const MINUS_ONE_GUARD: f64 = 1e-6;

/// Rule producing the small moves `x_n`, `n >= 1`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "rule", rename_all = "snake_case")]
pub enum XRule {
    /// `x_n = 0`.
    Zero,
    /// `x_n = (-1)^n / sqrt(n)`, optionally with `x_1 = 0`.
    InvSqrtAlternating {
        #[serde(default)]
        zero_first: bool,
    },
    /// `x_n = c`.
    Constant { value: f64 },
    /// `|x_n| = 1/n` with signs chosen so the partial sums swing to
    /// `+1, -2, +3, -4, ...` in turn.
    OscillatingHarmonic,
    /// `x_n = exp((-1)^n / sqrt(n)) - 1`.
    ExpInvSqrt,
    /// `x_n = -1/n`.
    NegHarmonic,
    /// `x_n = scale * (-1)^n / n`.
    AltHarmonic { scale: f64 },
    /// `x_n` read from a list; zero past its end.
    Explicit { values: Vec<f64> },
}

impl XRule {
    /// `x_n` for `n = 1..=events`, index 0 unused and set to zero.
    pub fn table(&self, events: usize) -> Vec<f64> {
        let mut out = vec![0.0; events + 1];
        if let XRule::OscillatingHarmonic = self {
            let (mut sum, mut sign, mut target) = (0.0_f64, 1.0_f64, 1.0_f64);
            for (n, slot) in out.iter_mut().enumerate().skip(1) {
                let x = sign / n as f64;
                *slot = x;
                sum += x;
                if sign * (sum - target) >= 0.0 {
                    sign = -sign;
                    target = sign * (target.abs() + 1.0);
                }
            }
            return out;
        }
        for (n, slot) in out.iter_mut().enumerate().skip(1) {
            *slot = self.closed_form(n);
        }
        out
    }

    fn closed_form(&self, n: usize) -> f64 {
        let nf = n as f64;
        let alt = if n.is_multiple_of(2) { 1.0 } else { -1.0 };
        match self {
            XRule::Zero => 0.0,
            XRule::InvSqrtAlternating { zero_first } => {
                if *zero_first && n == 1 {
                    0.0
                } else {
                    alt / nf.sqrt()
                }
            }
            XRule::Constant { value } => *value,
            XRule::ExpInvSqrt => (alt / nf.sqrt()).exp_m1(),
            XRule::NegHarmonic => -1.0 / nf,
            XRule::AltHarmonic { scale } => scale * alt / nf,
            XRule::Explicit { values } => values.get(n - 1).copied().unwrap_or(0.0),
            XRule::OscillatingHarmonic => unreachable!("tabulated by partial sums"),
        }
    }

    /// Whether `Σ x_n` converges, `Σ x_n²` is finite and `Σ |x_n|` is finite,
    /// for the infinite sequence.
    pub fn series_behaviour(&self) -> (bool, bool, bool) {
        match self {
            XRule::Zero | XRule::Explicit { .. } => (true, true, true),
            XRule::Constant { value } if *value == 0.0 => (true, true, true),
            XRule::AltHarmonic { scale } if *scale == 0.0 => (true, true, true),
            XRule::Constant { .. } => (false, false, false),
            XRule::InvSqrtAlternating { .. } => (true, false, false),
            XRule::OscillatingHarmonic | XRule::NegHarmonic => (false, true, false),
            XRule::ExpInvSqrt => (false, false, false),
            XRule::AltHarmonic { .. } => (true, true, false),
        }
    }

    /// Asymptotic profile of the sequence.
    pub fn profile(&self) -> XProfile {
        let both = |decay| XProfile {
            decay,
            positive: true,
            negative: true,
            constant: None,
        };
        match self {
            XRule::Zero | XRule::Explicit { .. } => XProfile::zero(),
            XRule::Constant { value } | XRule::AltHarmonic { scale: value } if *value == 0.0 => XProfile::zero(),
            XRule::Constant { value } => XProfile {
                decay: 0.0,
                positive: *value > 0.0,
                negative: *value < 0.0,
                constant: Some(*value),
            },
            XRule::InvSqrtAlternating { .. } | XRule::ExpInvSqrt => both(0.5),
            XRule::OscillatingHarmonic | XRule::AltHarmonic { .. } => both(1.0),
            XRule::NegHarmonic => XProfile {
                decay: 1.0,
                positive: false,
                negative: true,
                constant: None,
            },
        }
    }
}

/// `|x_n| ≍ n^(-decay)` with the signs that occur infinitely often.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct XProfile {
    /// Power-law decay; infinite for sequences that are eventually zero.
    pub decay: f64,
    pub positive: bool,
    pub negative: bool,
    /// Set when the sequence is a nonzero constant.
    pub constant: Option<f64>,
}

impl XProfile {
    fn zero() -> Self {
        XProfile {
            decay: f64::INFINITY,
            positive: false,
            negative: false,
            constant: None,
        }
    }

    pub fn is_zero(&self) -> bool {
        self.decay.is_infinite()
    }
}

/// Rule producing the firing probabilities `p_n`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "rule", rename_all = "snake_case")]
pub enum PRule {
    /// `p_n = scale * ratio^n`.
    Geometric { scale: f64, ratio: f64 },
    /// `p_n = scale * (n+1)^(-exponent)`.
    Power { scale: f64, exponent: f64 },
    /// `p_n = p`; not summable, so large moves recur forever.
    Constant { value: f64 },
    /// Largest dyadic `p_n` meeting both inequalities of [`DyadicSchedule`].
    Schedule { c: f64 },
    /// `p_n` read from a list; the list must cover the horizon.
    Explicit { values: Vec<f64> },
}

impl PRule {
    /// `ln p_n` for `n = 1..=events`, index 0 unused.
    pub fn ln_table(&self, events: usize) -> Result<Vec<f64>> {
        let mut out = vec![0.0; events + 1];
        match self {
            PRule::Geometric { scale, ratio } => {
                check_scale(*scale)?;
                check_unit(*ratio, "geometric ratio")?;
                for (n, slot) in out.iter_mut().enumerate().skip(1) {
                    *slot = scale.ln() + n as f64 * ratio.ln();
                }
            }
            PRule::Power { scale, exponent } => {
                check_scale(*scale)?;
                if !(*exponent > 0.0) {
                    return Err(Error::InvalidSpec(format!("power exponent must be positive, got {exponent}")));
                }
                for (n, slot) in out.iter_mut().enumerate().skip(1) {
                    *slot = scale.ln() - exponent * ((n + 1) as f64).ln();
                }
            }
            PRule::Constant { value } => {
                check_unit(*value, "constant probability")?;
                out[1..].fill(value.ln());
            }
            PRule::Schedule { c } => {
                let schedule = DyadicSchedule::new(*c, events)?;
                for (n, slot) in out.iter_mut().enumerate().skip(1) {
                    *slot = schedule.ln_p(n);
                }
            }
            PRule::Explicit { values } => {
                if values.len() < events {
                    return Err(Error::InvalidSpec(format!(
                        "explicit p list has {} entries, horizon needs {events}",
                        values.len()
                    )));
                }
                for (n, slot) in out.iter_mut().enumerate().skip(1) {
                    let p = values[n - 1];
                    check_unit(p, "explicit probability")?;
                    *slot = p.ln();
                }
            }
        }
        Ok(out)
    }

    /// Whether `Σ p_n < ∞` for the infinite sequence.
    pub fn summable(&self) -> bool {
        match self {
            PRule::Geometric { .. } | PRule::Schedule { .. } | PRule::Explicit { .. } => true,
            PRule::Power { exponent, .. } => *exponent > 1.0,
            PRule::Constant { .. } => false,
        }
    }

    /// `p_n ≍ exp(rate·n) n^(-power)`; `rate` is `-∞` for super-geometric decay.
    pub fn profile(&self) -> PProfile {
        match self {
            PRule::Geometric { ratio, .. } => PProfile {
                rate: ratio.ln(),
                power: 0.0,
                constant: false,
            },
            PRule::Power { exponent, .. } => PProfile {
                rate: 0.0,
                power: *exponent,
                constant: false,
            },
            PRule::Constant { .. } => PProfile {
                rate: 0.0,
                power: 0.0,
                constant: true,
            },
            PRule::Schedule { .. } | PRule::Explicit { .. } => PProfile {
                rate: f64::NEG_INFINITY,
                power: 0.0,
                constant: false,
            },
        }
    }
}

/// Asymptotic profile of a probability sequence.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PProfile {
    pub rate: f64,
    pub power: f64,
    pub constant: bool,
}

fn check_scale(v: f64) -> Result<()> {
    if v > 0.0 && v <= 1.0 {
        Ok(())
    } else {
        Err(Error::InvalidSpec(format!("probability scale must lie in (0, 1], got {v}")))
    }
}

fn check_unit(v: f64, what: &str) -> Result<()> {
    if v > 0.0 && v < 1.0 {
        Ok(())
    } else {
        Err(Error::InvalidSpec(format!("{what} must lie in (0, 1), got {v}")))
    }
}

/// Dyadic firing probabilities small enough that the exponential moments
/// `E[exp(c·Y_σ)]` stay bounded for `x_n = -1/2`.
///
/// `p_n = 2^(-k_n)` with `k_n` the smallest integer such that
/// `p_n log(1 + 1/p_n) <= n^-3` and `p_n <= 2^-n (e^(1/n²) - 1)^n`.
#[derive(Debug, Clone, PartialEq)]
pub struct DyadicSchedule {
    c: f64,
    /// `k_n` for `n = 1..`, index 0 unused.
    exponents: Vec<u32>,
}

impl DyadicSchedule {
    pub fn new(c: f64, len: usize) -> Result<Self> {
        if !(c < 1.0) || !c.is_finite() {
            return Err(Error::InvalidSpec(format!("schedule parameter c must be finite and < 1, got {c}")));
        }
        let mut exponents = vec![0];
        for n in 1..=len {
            exponents.push(Self::exponent_for(n));
        }
        Ok(DyadicSchedule { c, exponents })
    }

    fn exponent_for(n: usize) -> u32 {
        let nf = n as f64;
        // Second inequality in log form: -k ln 2 <= -n ln 2 + n ln(e^(1/n²) - 1).
        let rhs2 = -nf * std::f64::consts::LN_2 + nf * (1.0 / (nf * nf)).exp_m1().ln();
        let mut k = ((-rhs2 / std::f64::consts::LN_2).floor() as i64).max(1) as u32;
        while !(Self::second_holds(n, k) && Self::first_holds(n, k)) {
            k += 1;
        }
        // Step back while the smaller exponent still satisfies both.
        while k > 1 && Self::second_holds(n, k - 1) && Self::first_holds(n, k - 1) {
            k -= 1;
        }
        k
    }

    fn ln_p_of(k: u32) -> f64 {
        -(k as f64) * std::f64::consts::LN_2
    }

    fn first_holds(n: usize, k: u32) -> bool {
        let ln_p = Self::ln_p_of(k);
        // ln(p log(1 + 1/p)) with log(1 + 1/p) = -ln p + ln(1 + p).
        let lhs = ln_p + (-ln_p + ln_p.exp().ln_1p()).ln();
        lhs <= -3.0 * (n as f64).ln()
    }

    fn second_holds(n: usize, k: u32) -> bool {
        let nf = n as f64;
        Self::ln_p_of(k) <= -nf * std::f64::consts::LN_2 + nf * (1.0 / (nf * nf)).exp_m1().ln()
    }

    pub fn c(&self) -> f64 {
        self.c
    }

    pub fn len(&self) -> usize {
        self.exponents.len() - 1
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Dyadic exponent `k_n`.
    pub fn exponent(&self, n: usize) -> u32 {
        self.exponents[n]
    }

    pub fn ln_p(&self, n: usize) -> f64 {
        Self::ln_p_of(self.exponents[n])
    }

    /// `p_n`; underflows to zero for large `n`, use [`Self::ln_p`] there.
    pub fn p(&self, n: usize) -> f64 {
        self.ln_p(n).exp()
    }

    /// Truth of the two defining inequalities at `n`.
    pub fn inequalities_hold(&self, n: usize) -> (bool, bool) {
        let k = self.exponents[n];
        (Self::first_holds(n, k), Self::second_holds(n, k))
    }

    /// First index from which `κ_n <= 2/n²` is guaranteed: `⌈max(-c, 1/(1-c))⌉`.
    pub fn threshold_index(&self) -> usize {
        (-self.c).max(1.0 / (1.0 - self.c)).ceil().max(1.0) as usize
    }
}

/// Parameters of a random walk with large jumps.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RandomWalkSpec {
    pub x: XRule,
    pub p: PRule,
    /// Number of jump times `N`.
    pub events: usize,
}

/// Precomputed per-step tables of a walk.
#[derive(Debug, Clone)]
pub struct WalkTables {
    /// Small move `x_n`.
    pub x: Vec<f64>,
    /// `ln p_n`.
    pub ln_p: Vec<f64>,
    /// `p_n` (may underflow to zero).
    pub p: Vec<f64>,
    /// Large move `x_n (1 - 1/p_n)`; non-finite only where `p_n` underflows.
    pub y: Vec<f64>,
}

impl WalkTables {
    pub fn events(&self) -> usize {
        self.x.len() - 1
    }

    /// First index whose two-point law reaches `(-∞, -1]`.
    pub fn first_minus_one_reach(&self) -> Option<usize> {
        (1..self.x.len()).find(|&n| self.x[n] <= -1.0 || self.y[n] <= -1.0)
    }
}

impl RandomWalkSpec {
    pub fn validate(&self) -> Result<()> {
        if self.events == 0 {
            return Err(Error::InvalidSpec("random walk needs at least one event".into()));
        }
        Ok(())
    }

    pub fn tables(&self) -> Result<WalkTables> {
        self.validate()?;
        let x = self.x.table(self.events);
        let ln_p = self.p.ln_table(self.events)?;
        let p: Vec<f64> = ln_p.iter().map(|l| l.exp()).collect();
        let mut y = vec![0.0; x.len()];
        for n in 1..x.len() {
            if x[n] > 0.0 && p[n] > 0.0 {
                let danger = x[n] / (1.0 + x[n]);
                if (p[n] - danger).abs() < MINUS_ONE_GUARD {
                    return Err(Error::InvalidSpec(format!(
                        "p_{n} = {} is within {MINUS_ONE_GUARD:e} of x_n/(1+x_n); the large move would hit -1",
                        p[n]
                    )));
                }
            }
            // x (1 - 1/p) = -x (1-p)/p, evaluated via logs to keep tiny p accurate.
            y[n] = if x[n] == 0.0 {
                0.0
            } else {
                -x[n] * ((-p[n]).ln_1p() - ln_p[n]).exp()
            };
        }
        Ok(WalkTables { x, ln_p, p, y })
    }
}

/// A walk ready to be sampled.
#[derive(Debug, Clone)]
pub struct PreparedWalk {
    pub(crate) grid: Arc<TimeGrid>,
    pub(crate) tables: Arc<WalkTables>,
}

impl PreparedWalk {
    pub fn new(spec: &RandomWalkSpec) -> Result<Self> {
        Ok(PreparedWalk {
            grid: Arc::new(TimeGrid::integer(spec.events)),
            tables: Arc::new(spec.tables()?),
        })
    }

    /// Samples a path and the list of times where the large move fired.
    pub fn sample(&self, seed: u64) -> Result<(SamplePath, Vec<usize>)> {
        let mut rng = rng::stream(seed);
        let t = &self.tables;
        let mut jumps = Vec::with_capacity(t.x.len());
        jumps.push(0.0);
        let mut fired = Vec::new();
        for n in 1..t.x.len() {
            let u: f64 = rng.random();
            if u < t.p[n] {
                fired.push(n);
                jumps.push(t.y[n]);
            } else {
                jumps.push(t.x[n]);
            }
        }
        let path = SamplePath::from_jumps(self.grid.clone(), 0.0, jumps)?;
        Ok((path, fired))
    }
}

/// Deterministic path `A_t = Σ_{n <= t} (-1)^n / n`.
pub fn det_alternating(events: usize) -> Result<SamplePath> {
    let x = XRule::AltHarmonic { scale: 1.0 }.table(events);
    SamplePath::from_jumps(Arc::new(TimeGrid::integer(events)), 0.0, x)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn walk(x: XRule, p: PRule, events: usize) -> PreparedWalk {
        PreparedWalk::new(&RandomWalkSpec { x, p, events }).unwrap()
    }

    #[test]
    fn zero_moves_give_zero_path() {
        let w = walk(XRule::Zero, PRule::Geometric { scale: 0.5, ratio: 0.5 }, 50);
        for seed in 0..20 {
            let (path, _) = w.sample(seed).unwrap();
            assert!(path.values().iter().all(|&v| v == 0.0));
        }
    }

    #[test]
    fn increments_have_mean_zero() {
        let w = walk(XRule::InvSqrtAlternating { zero_first: false }, PRule::Power { scale: 0.9, exponent: 1.5 }, 200);
        let t = &w.tables;
        for n in 1..=200 {
            let mean = t.x[n] * (1.0 - t.p[n]) + t.y[n] * t.p[n];
            assert!(mean.abs() <= 1e-15 * t.y[n].abs().max(1.0), "n={n} mean={mean}");
        }
    }

    #[test]
    fn first_step_law_frequency() {
        // p_1 = 0.25; the large move is x_1(1 - 4) = 3 for x_1 = -1.
        let w = walk(XRule::NegHarmonic, PRule::Geometric { scale: 0.5, ratio: 0.5 }, 1);
        let trials = 100_000;
        let mut hits = 0usize;
        for i in 0..trials {
            let (path, _) = w.sample(rng::trial_seed(11, i)).unwrap();
            let j = path.jumps()[1];
            if (j - 3.0).abs() < 1e-12 {
                hits += 1;
            } else {
                assert_eq!(j, -1.0);
            }
        }
        let p_hat = hits as f64 / trials as f64;
        let se = (0.25f64 * 0.75 / trials as f64).sqrt();
        assert!((p_hat - 0.25).abs() < 3.0 * se, "p_hat={p_hat}");
    }

    #[test]
    fn same_seed_same_path() {
        let w = walk(XRule::AltHarmonic { scale: 1.0 }, PRule::Geometric { scale: 1.0, ratio: 0.5 }, 1000);
        assert_eq!(w.sample(99).unwrap(), w.sample(99).unwrap());
    }

    #[test]
    fn alternating_partial_sums() {
        let a = det_alternating(10_000).unwrap();
        assert_eq!(a.values()[2], -0.5);
        assert!((a.final_value() + std::f64::consts::LN_2).abs() < 1e-4);
        let tv: f64 = a.jumps().iter().map(|j| j.abs()).sum();
        assert!((tv - 9.787_606).abs() < 1e-6);
    }

    #[test]
    fn oscillating_harmonic_swings() {
        let x = XRule::OscillatingHarmonic.table(5000);
        let mut sum = 0.0;
        let (mut hi, mut lo) = (0.0f64, 0.0f64);
        for (n, v) in x.iter().enumerate().skip(1) {
            assert!((v.abs() - 1.0 / n as f64).abs() < 1e-15);
            sum += v;
            hi = hi.max(sum);
            lo = lo.min(sum);
        }
        assert!(hi >= 3.0 && lo <= -2.0, "hi={hi} lo={lo}");
    }

    #[test]
    fn schedule_exponents_and_inequalities() {
        let s = DyadicSchedule::new(0.5, 100).unwrap();
        let first: Vec<u32> = (1..=10).map(|n| s.exponent(n)).collect();
        assert_eq!(first, vec![1, 6, 13, 20, 29, 37, 47, 56, 66, 77]);
        for n in 1..=100 {
            assert_eq!(s.inequalities_hold(n), (true, true), "n={n}");
            // Maximality: the next larger dyadic value breaks an inequality.
            if s.exponent(n) > 1 {
                let k = s.exponent(n) - 1;
                assert!(!(DyadicSchedule::first_holds(n, k) && DyadicSchedule::second_holds(n, k)));
            }
        }
        assert_eq!(s.threshold_index(), 2);
        assert_eq!(DyadicSchedule::new(-3.0, 1).unwrap().threshold_index(), 3);
        assert!(DyadicSchedule::new(1.0, 1).is_err());
    }

    #[test]
    fn rejects_probability_next_to_minus_one_move() {
        let spec = RandomWalkSpec {
            x: XRule::Constant { value: 1.0 },
            p: PRule::Constant { value: 0.5 },
            events: 3,
        };
        assert!(matches!(spec.tables(), Err(Error::InvalidSpec(_))));
    }

    #[test]
    fn series_behaviour_of_catalog_rules() {
        assert_eq!(XRule::AltHarmonic { scale: 1.0 }.series_behaviour(), (true, true, false));
        assert_eq!(XRule::InvSqrtAlternating { zero_first: false }.series_behaviour(), (true, false, false));
        assert_eq!(XRule::Zero.series_behaviour(), (true, true, true));
    }
}
