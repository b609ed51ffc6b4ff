//! Finite-horizon convergence verdicts and event flags.
//!
//! Limits as `t → ∞` cannot be observed on a finite grid. Every flag here is a
//! proxy built from the final window of the path, or an analytic truth value
//! derived from the law of the family (stationary local integrability and the
//! finiteness of `F*ν_∞` are properties of the law, not of one path).

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::characteristics::{self, IntegrandId};
use crate::error::{Error, Result};
use crate::generators::{CoxVariant, Generator, GeneratorSpec, JumpTime, Latent, Sample, XRule};
use crate::path::SamplePath;
use crate::transforms;

/// Thresholds of the finite-horizon proxies.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ProxyParams {
    /// Final window as a fraction of the horizon.
    pub window: f64,
    /// Oscillation below which a path counts as converged.
    pub tol: f64,
    /// Level beyond which a path counts as diverged.
    pub big: f64,
    /// Tail growth of `[X,X]` below which it counts as finite.
    pub qv_tol: f64,
    /// Cap on horizon values of brackets and compensators.
    pub cap: f64,
    /// `η` of the negative log-tail integrand.
    pub eta: f64,
    /// `κ` of the positive tail integrand.
    pub kappa: f64,
}

impl Default for ProxyParams {
    fn default() -> Self {
        ProxyParams {
            window: 0.1,
            tol: 5e-3,
            big: 5.0,
            qv_tol: 5e-3,
            cap: 1e3,
            eta: 0.5,
            kappa: 1.0,
        }
    }
}

impl ProxyParams {
    pub fn validate(&self) -> Result<()> {
        let ok = self.window > 0.0
            && self.window < 1.0
            && self.tol > 0.0
            && self.big > self.tol
            && self.qv_tol > 0.0
            && self.cap > 0.0
            && self.eta > 0.0
            && self.eta < 1.0
            && self.kappa > 0.0;
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidParameter(format!(
                "proxy parameters need 0<window<1, 0<tol<big, qv_tol>0, cap>0, 0<eta<1, kappa>0; got {self:?}"
            )))
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Label {
    Converged,
    DivergedMinus,
    DivergedPlus,
    Oscillating,
    Undecided,
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Label::Converged => "CONVERGED",
            Label::DivergedMinus => "DIVERGED_MINUS",
            Label::DivergedPlus => "DIVERGED_PLUS",
            Label::Oscillating => "OSCILLATING",
            Label::Undecided => "UNDECIDED",
        })
    }
}

/// Label of a path plus the diagnostics it was decided from.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Verdict {
    pub label: Label,
    /// Final value, reported as the limit estimate when converged.
    pub final_value: f64,
    pub window_sup: f64,
    pub window_inf: f64,
}

impl Verdict {
    pub fn oscillation(&self) -> f64 {
        self.window_sup - self.window_inf
    }

    pub fn limit(&self) -> Option<f64> {
        (self.label == Label::Converged).then_some(self.final_value)
    }
}

/// Classifies a series observed at `times` over its final `window` fraction.
///
/// Divergence is checked first: a path sitting below `-big` for the whole
/// window is `DIVERGED_MINUS` even if it has flattened out.
pub fn classify_series(times: &[f64], values: &[f64], window: f64, tol: f64, big: f64) -> Result<Verdict> {
    if !(window > 0.0 && window < 1.0 && tol > 0.0 && big > tol) {
        return Err(Error::InvalidParameter(format!(
            "classify needs 0 < window < 1 and 0 < tol < big, got window={window}, tol={tol}, big={big}"
        )));
    }
    if values.is_empty() || values.len() > times.len() {
        return Err(Error::InvalidParameter("series must be non-empty and fit the grid".into()));
    }
    let horizon = times[times.len() - 1];
    let cut = horizon * (1.0 - window) - 1e-12 * horizon.max(1.0);
    let start = times.partition_point(|&t| t < cut);
    if values.len() < times.len() {
        // The series stops before the horizon; nothing can be said.
        let last = values[values.len() - 1];
        return Ok(Verdict {
            label: Label::Undecided,
            final_value: last,
            window_sup: last,
            window_inf: last,
        });
    }
    let tail = &values[start..];
    let hi = tail.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let lo = tail.iter().copied().fold(f64::INFINITY, f64::min);
    let label = if hi < -big {
        Label::DivergedMinus
    } else if lo > big {
        Label::DivergedPlus
    } else if hi - lo < tol {
        Label::Converged
    } else if hi - lo > big {
        Label::Oscillating
    } else {
        Label::Undecided
    };
    Ok(Verdict {
        label,
        final_value: values[values.len() - 1],
        window_sup: hi,
        window_inf: lo,
    })
}

pub fn classify(path: &SamplePath, window: f64, tol: f64, big: f64) -> Result<Verdict> {
    classify_series(path.times(), path.values(), window, tol, big)
}

/// Tail growth of `[X,X]` over the final window, less its largest jump.
///
/// A convergent sum has small tails apart from finitely many terms, so one
/// isolated jump in the window does not count as growth.
pub fn qv_tail_growth(path: &SamplePath, window: f64) -> Result<f64> {
    let start = path.grid().window_start(window * path.horizon())?;
    let mut total = 0.0;
    let mut largest = 0.0f64;
    for k in start.max(1)..path.len() {
        let j = path.jumps()[k];
        let d = path.diffusive_increment(k);
        total += j * j + d * d;
        largest = largest.max(j * j);
    }
    Ok(total - largest)
}

/// Boolean proxies for one path.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize)]
pub struct EventFlags {
    /// (a) the path converges.
    pub a: bool,
    /// (b) final-window infimum above `-big`.
    pub b: bool,
    /// (c) `X⁻` stationarily locally integrable (analytic).
    pub c: bool,
    /// (d) `X⁺` stationarily locally integrable and `A_∞ < ∞` (analytic).
    pub d: bool,
    /// (e) `X` stationarily locally integrable (analytic).
    pub e: bool,
    /// (f) `[X^c,X^c] + (x²∧|x|)*ν + A` finite in the limit and below the cap.
    pub f: bool,
    /// (g) `[X,X]` finite, limsup above `-big`, negative jumps integrable.
    pub g: bool,
    /// (h) `ℰ(X)` converges to a nonzero limit, or hit zero.
    pub h: bool,
    /// `(ΔX)⁻ ∧ X⁻` stationarily locally integrable (analytic, per law).
    pub neg_jump_sli: bool,
    /// The limit exists.
    pub e1: bool,
    /// The liminf is finite.
    pub e2: bool,
    /// The characteristic triple is finite.
    pub e3: bool,
    /// `[X,X]` is finite and the limsup is finite.
    pub e4: bool,
    /// `X` and `Y` both converge; `None` when `Y` is undefined.
    pub f1: Option<bool>,
    /// `½[X^c,X^c] + (x - log(1+x))*ν` finite.
    pub f2: Option<bool>,
    /// `X` converges and `-log(1+x)1{x<-η}*ν` is finite.
    pub f3: Option<bool>,
    /// `Y` converges and `x1{x>κ}*ν` is finite.
    pub f4: Option<bool>,
}

/// Flags plus the statistics they were computed from.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EventReport {
    pub verdict: Verdict,
    pub flags: EventFlags,
    /// `[X,X]` at the horizon.
    pub qv: f64,
    pub qv_tail: f64,
    /// `log|ℰ(X)|` at the horizon.
    pub log_e: f64,
    /// `Y` at the horizon, when defined on the whole grid.
    pub y: Option<f64>,
    pub tau_j: Option<f64>,
}

/// Law-level truth values shared by every sample.
#[derive(Debug, Clone, Copy, PartialEq)]
struct AnalyticFlags {
    /// `[X^c]_∞ + (x²∧|x|)*ν_∞ + A_∞ < ∞`.
    triple: bool,
    /// `½[X^c]_∞ + (x - log(1+x))*ν_∞ < ∞`.
    exp_comp: Option<bool>,
    neg_log: Option<bool>,
    pos_tail: bool,
}

/// Per-generator context: analytic flags and deterministic series computed
/// once and reused for every sample.
#[derive(Debug, Clone)]
pub struct EventContext {
    gen: Generator,
    params: ProxyParams,
    sli: bool,
    /// For families whose characteristics do not depend on the sample.
    fixed: Option<AnalyticFlags>,
    /// Intensity construction: flags given a jump, and given none.
    jumped: Option<AnalyticFlags>,
    never: Option<AnalyticFlags>,
    /// `(x²∧|x|)*ν + A` at the horizon for sample-independent families.
    triple_value: Option<f64>,
    /// `γ_n` on the valid prefix of a walk.
    gamma: Option<Vec<f64>>,
}

impl EventContext {
    pub fn new(gen: Generator, params: ProxyParams) -> Result<Self> {
        params.validate()?;
        let sli = gen.spec().neg_jump_integrable();
        let mut ctx = EventContext {
            sli,
            fixed: None,
            jumped: None,
            never: None,
            triple_value: None,
            gamma: None,
            params,
            gen,
        };
        match ctx.gen.spec() {
            GeneratorSpec::Cox(_) => {
                ctx.jumped = Some(ctx.analytic(&Latent::Cox { rho: JumpTime::At(1.0) })?);
                ctx.never = Some(ctx.analytic(&Latent::Cox { rho: JumpTime::Never })?);
            }
            _ => {
                ctx.fixed = Some(ctx.analytic(&Latent::None)?);
                let t = ctx.gen.spec().horizon();
                ctx.triple_value = Some(characteristics::compensator_integral(&ctx.gen, IntegrandId::SqCapAbs, t)?);
            }
        }
        if let GeneratorSpec::RandomWalk(_) = ctx.gen.spec() {
            let len = transforms::valid_len(&ctx.gen)?;
            let mut g = vec![0.0; len];
            for (k, slot) in g.iter_mut().enumerate().skip(1) {
                *slot = characteristics::gamma_at(&ctx.gen, k)?;
            }
            ctx.gamma = Some(g);
        }
        Ok(ctx)
    }

    pub fn generator(&self) -> &Generator {
        &self.gen
    }

    pub fn params(&self) -> &ProxyParams {
        &self.params
    }

    fn analytic(&self, latent: &Latent) -> Result<AnalyticFlags> {
        let g = &self.gen;
        let qc = characteristics::continuous_qv_finite(g.spec());
        let maybe = |f: IntegrandId| match characteristics::limit_finite(g, f, latent) {
            Ok(v) => Ok(Some(v)),
            Err(Error::Domain { .. }) | Err(Error::SupportReachesMinusOne { .. }) => Ok(None),
            Err(e) => Err(e),
        };
        let triple = qc
            && characteristics::limit_finite(g, IntegrandId::SqCapAbs, latent)?
            && characteristics::predictable_part_finite(g, latent);
        let martingale = g.spec().is_local_martingale();
        Ok(AnalyticFlags {
            triple,
            exp_comp: if martingale { maybe(IntegrandId::XMinusLog)?.map(|v| v && qc) } else { None },
            neg_log: maybe(IntegrandId::NegLogTail(self.params.eta))?,
            pos_tail: characteristics::limit_finite(g, IntegrandId::PosTail(self.params.kappa), latent)?,
        })
    }

    fn flags_for(&self, latent: &Latent) -> AnalyticFlags {
        match (self.fixed, latent.rho()) {
            (Some(f), _) => f,
            (None, Some(JumpTime::At(_))) => self.jumped.expect("cox flags"),
            _ => self.never.expect("cox flags"),
        }
    }

    /// `(x²∧|x|)*ν_T + A_T + [X^c,X^c]_T` along the sample.
    fn triple_value(&self, sample: &Sample, qv_cont: f64) -> Result<f64> {
        let comp = match self.triple_value {
            Some(v) => v,
            None => characteristics::compensator_coupled(
                &self.gen,
                IntegrandId::SqCapAbs,
                &sample.latent,
                self.gen.spec().horizon(),
            )?,
        };
        let a = match self.gen.spec() {
            GeneratorSpec::Cox(c) if c.variant == CoxVariant::NegatedJump => {
                *characteristics::predictable_part(&self.gen, &sample.path, &sample.latent)?
                    .last()
                    .unwrap_or(&0.0)
            }
            GeneratorSpec::Alternating { .. } => sample.path.jumps().iter().map(|j| j.abs()).sum(),
            _ => 0.0,
        };
        Ok(comp + a + qv_cont)
    }

    /// `Y` along the sample, or `None` if it is not defined on the whole grid.
    pub fn y_series(&self, sample: &Sample) -> Result<Option<Vec<f64>>> {
        if !self.gen.spec().is_local_martingale() {
            return Ok(None);
        }
        let n = sample.path.len();
        if let Some(gamma) = &self.gamma {
            if gamma.len() < n {
                return Ok(None);
            }
            let mut y = vec![0.0; n];
            for k in 1..n {
                y[k] = y[k - 1] + sample.path.jumps()[k].ln_1p() + gamma[k];
            }
            return Ok(Some(y));
        }
        let y = transforms::logarithmic_transform(&self.gen, &sample.path, &sample.latent)?;
        Ok((y.len() == n).then_some(y))
    }

    pub fn evaluate(&self, sample: &Sample) -> Result<EventReport> {
        let p = &self.params;
        let path = &sample.path;
        let verdict = classify(path, p.window, p.tol, p.big)?;
        let qv = crate::path::quadratic_variation(path);
        let qv_tail = qv_tail_growth(path, p.window)?;
        let qv_finite = qv_tail < p.qv_tol && qv.final_total() < p.cap;
        let analytic = self.flags_for(&sample.latent);
        let triple_ok = analytic.triple && self.triple_value(sample, *qv.continuous.last().unwrap_or(&0.0))? < p.cap;

        let exp = transforms::stochastic_exponential(path);
        let tau_j = transforms::tau_j(path);
        let log_e = *exp.log_abs.last().expect("non-empty path");
        let start = path.grid().window_start(p.window * path.horizon())?;
        let sign_settled = exp.sign[start..].iter().all(|&s| s == exp.sign[start] && s != 0);
        let e_converges = sign_settled
            && classify_series(path.times(), &exp.log_abs, p.window, p.tol, p.big)?.label == Label::Converged;

        let converged = verdict.label == Label::Converged;
        let liminf = verdict.window_inf > -p.big;
        let limsup = verdict.window_sup > -p.big;
        let derived = analytic.triple && self.sli;

        let y = self.y_series(sample)?;
        let y_conv = match &y {
            Some(y) => Some(classify_series(path.times(), y, p.window, p.tol, p.big)?.label == Label::Converged),
            None => None,
        };
        let flags = EventFlags {
            a: converged,
            b: liminf,
            c: derived,
            d: derived,
            e: derived,
            f: triple_ok,
            g: qv_finite && limsup && self.sli,
            h: e_converges || tau_j.is_some(),
            neg_jump_sli: self.sli,
            e1: converged,
            e2: liminf,
            e3: triple_ok,
            e4: qv_finite && limsup,
            f1: y_conv.map(|yc| converged && yc),
            f2: y_conv.and(analytic.exp_comp),
            f3: y_conv.and(analytic.neg_log.map(|v| converged && v)),
            f4: y_conv.map(|yc| yc && analytic.pos_tail),
        };
        Ok(EventReport {
            verdict,
            flags,
            qv: qv.final_total(),
            qv_tail,
            log_e,
            y: y.as_ref().and_then(|y| y.last().copied()),
            tau_j,
        })
    }
}

/// Crossing times `ρ_n = inf{t : |X_t| >= n}` of one path.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LocalizerReport {
    pub levels: Vec<f64>,
    /// `None` is the horizon sentinel: level never reached.
    pub crossings: Vec<Option<f64>>,
    /// `n + |ΔX_{ρ_n}|` where the level was crossed.
    pub bounds: Vec<Option<f64>>,
    /// The top level was never reached.
    pub coverage: bool,
    /// `|X^{ρ_n}_t| <= n + |ΔX_{ρ_n}|` held everywhere.
    pub dominated: bool,
}

/// Crossing-time localization on the grid.
///
/// The path is read as piecewise constant between grid times, so `ΔX_{ρ_n}`
/// is the increment of the step on which the level is first reached.
pub fn crossing_localizer(path: &SamplePath, levels: &[f64]) -> Result<LocalizerReport> {
    if levels.is_empty() || levels[0] <= 0.0 || levels.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidParameter("levels must be positive and increasing".into()));
    }
    let v = path.values();
    let mut crossings = Vec::with_capacity(levels.len());
    let mut bounds = Vec::with_capacity(levels.len());
    let mut dominated = true;
    let mut k = 0usize;
    // max |X| over v[..k]
    let mut run_max = 0.0f64;
    for &level in levels {
        while k < v.len() && v[k].abs() < level {
            run_max = run_max.max(v[k].abs());
            k += 1;
        }
        if k == v.len() {
            crossings.push(None);
            bounds.push(None);
            continue;
        }
        let dx = if k == 0 { v[0] } else { v[k] - v[k - 1] }.abs();
        let bound = level + dx;
        let slack = 4.0 * f64::EPSILON * bound;
        dominated &= run_max.max(v[k].abs()) <= bound + slack;
        crossings.push(Some(path.times()[k]));
        bounds.push(Some(bound));
    }
    let top = levels[levels.len() - 1];
    Ok(LocalizerReport {
        coverage: v.iter().all(|x| x.abs() < top),
        levels: levels.to_vec(),
        crossings,
        bounds,
        dominated,
    })
}

/// Truth values of `Σ x_n` converging, `Σ x_n²` finite and `Σ |x_n|` finite,
/// with the partial sums at `n` as diagnostics.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeriesPredicates {
    pub sum_converges: bool,
    pub sum_sq_finite: bool,
    pub sum_abs_finite: bool,
    pub partial_sum: f64,
    pub partial_sum_sq: f64,
    pub partial_sum_abs: f64,
}

pub fn series_predicates(rule: &XRule, n: usize) -> SeriesPredicates {
    let (sum_converges, sum_sq_finite, sum_abs_finite) = rule.series_behaviour();
    let x = rule.table(n);
    SeriesPredicates {
        sum_converges,
        sum_sq_finite,
        sum_abs_finite,
        partial_sum: x.iter().sum(),
        partial_sum_sq: x.iter().map(|v| v * v).sum(),
        partial_sum_abs: x.iter().map(|v| v.abs()).sum(),
    }
}

/// Series predicates of a named random-walk preset.
pub fn series_predicates_for_preset(name: &str, n: usize) -> Result<SeriesPredicates> {
    match crate::generators::catalog::preset(name)? {
        GeneratorSpec::RandomWalk(w) => Ok(series_predicates(&w.x, n)),
        _ => Err(Error::Config(format!("preset {name:?} is not a random walk"))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators::catalog;
    use crate::path::TimeGrid;
    use std::sync::Arc;

    fn ctx(name: &str, horizon: f64) -> EventContext {
        let spec = catalog::with_horizon(catalog::preset(name).unwrap(), horizon).unwrap();
        EventContext::new(Generator::new(spec).unwrap(), ProxyParams::default()).unwrap()
    }

    #[test]
    fn constant_path_converges_to_itself() {
        let path = SamplePath::constant(Arc::new(TimeGrid::integer(100)), 2.5).unwrap();
        let v = classify(&path, 0.1, 1e-3, 5.0).unwrap();
        assert_eq!(v.label, Label::Converged);
        assert_eq!(v.limit(), Some(2.5));
    }

    #[test]
    fn alternating_sums_converge_to_minus_log_two() {
        let path = crate::generators::det_alternating(10_000).unwrap();
        let v = classify(&path, 0.1, 1e-2, 5.0).unwrap();
        assert_eq!(v.label, Label::Converged);
        assert!((v.limit().unwrap() + 2f64.ln()).abs() < 1e-3);
    }

    #[test]
    fn surviving_cox_path_diverges_down() {
        let mut spec = catalog::preset("cox_linear").unwrap();
        if let GeneratorSpec::Cox(c) = &mut spec {
            c.horizon = 1e4;
        }
        let g = Generator::new(spec).unwrap();
        let path = g.cox().unwrap().build(JumpTime::Never, 0).unwrap();
        assert_eq!(classify(&path, 0.1, 5e-3, 5.0).unwrap().label, Label::DivergedMinus);
    }

    #[test]
    fn parameters_are_checked() {
        let path = SamplePath::constant(Arc::new(TimeGrid::integer(10)), 0.0).unwrap();
        assert!(classify(&path, 0.0, 1e-3, 5.0).is_err());
        assert!(classify(&path, 0.1, 0.0, 5.0).is_err());
        assert!(classify(&path, 0.1, 1.0, 0.5).is_err());
    }

    #[test]
    fn shrinking_tol_never_creates_divergence() {
        let path = crate::generators::det_alternating(1000).unwrap();
        for tol in [1e-1, 1e-2, 1e-3, 1e-4, 1e-5] {
            let l = classify(&path, 0.1, tol, 5.0).unwrap().label;
            assert!(matches!(l, Label::Converged | Label::Undecided), "{tol}: {l}");
        }
    }

    #[test]
    fn zero_path_flags() {
        let c = ctx("zero", 1000.0);
        let r = c.evaluate(&c.generator().sample(0).unwrap()).unwrap();
        let f = r.flags;
        assert!(f.a && f.b && f.c && f.d && f.e && f.f && f.g && f.h);
        assert!(f.e1 && f.e2 && f.e3 && f.e4);
        assert_eq!((f.f1, f.f2, f.f3, f.f4), (Some(true), Some(true), Some(true), Some(true)));
        assert_eq!(r.verdict.label, Label::Converged);
    }

    #[test]
    fn inv_sqrt_converges_without_finite_triple() {
        let c = ctx("rw_inv_sqrt", 100_000.0);
        let r = c.evaluate(&c.generator().sample(3).unwrap()).unwrap();
        assert!(r.flags.a);
        assert!(!r.flags.f);
        assert!(r.log_e < -4.0);
    }

    #[test]
    fn bounded_alternating_walk_satisfies_a_f_g() {
        let c = ctx("rw_bounded_alt_harmonic", 100_000.0);
        for seed in 0..5 {
            let f = c.evaluate(&c.generator().sample(seed).unwrap()).unwrap().flags;
            assert!(f.a && f.f && f.g, "seed {seed}: {f:?}");
        }
    }

    #[test]
    fn neg_harmonic_has_small_bracket_but_diverges() {
        let c = ctx("rw_neg_harmonic", 100_000.0);
        let r = c.evaluate(&c.generator().sample(1).unwrap()).unwrap();
        assert_eq!(r.verdict.label, Label::DivergedMinus);
        assert!(r.qv <= std::f64::consts::PI.powi(2) / 6.0);
        assert!(r.flags.neg_jump_sli);
        assert!(!r.flags.g);
    }

    #[test]
    fn localizer_examples() {
        let grid = Arc::new(TimeGrid::integer(4));
        let small = SamplePath::from_jumps(grid.clone(), 0.0, vec![0.0, 0.5, -0.9, 0.4, 0.0]).unwrap();
        let r = crossing_localizer(&small, &[1.0, 2.0, 3.0]).unwrap();
        assert_eq!(r.crossings, vec![None, None, None]);
        assert!(r.coverage && r.dominated);
        let deep = SamplePath::from_jumps(grid, 0.0, vec![0.0, -1.5, 0.2, -1.9, 0.0]).unwrap();
        let r = crossing_localizer(&deep, &[1.0, 2.0, 3.0, 4.0]).unwrap();
        assert_eq!(r.crossings, vec![Some(1.0), Some(3.0), Some(3.0), None]);
        assert!(r.dominated);
        assert!(r.coverage);
        assert!(crossing_localizer(&deep, &[2.0, 1.0]).is_err());
    }

    #[test]
    fn series_predicates_match_partial_sums() {
        let alt = series_predicates(&XRule::AltHarmonic { scale: 1.0 }, 100);
        assert_eq!((alt.sum_converges, alt.sum_sq_finite, alt.sum_abs_finite), (true, true, false));
        let inv = series_predicates(&XRule::InvSqrtAlternating { zero_first: true }, 100);
        assert_eq!((inv.sum_converges, inv.sum_sq_finite, inv.sum_abs_finite), (true, false, false));
        let zero = series_predicates_for_preset("zero", 10).unwrap();
        assert_eq!((zero.sum_converges, zero.sum_sq_finite, zero.sum_abs_finite), (true, true, true));
        assert!(series_predicates_for_preset("cox_linear", 10).is_err());
        assert!(series_predicates_for_preset("missing", 10).is_err());
    }
}
