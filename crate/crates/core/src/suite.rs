//! The acceptance battery.
//!
//! Each criterion runs its experiments, compares against a pinned tolerance
//! and yields one [`Outcome`]. Experiments are recorded so that the
//! determinism criterion can replay them with a different worker count.

use std::fmt;
use std::path::PathBuf;
use std::time::Instant;

use crate::characteristics::{self, IntegrandId};
use crate::convergence::{Label, ProxyParams};
use crate::error::{Error, Result};
use crate::generators::{catalog, CoxSpec, DyadicSchedule, Generator, GeneratorSpec, Latent, PRule};
use crate::montecarlo::{self, Analyzer, ExperimentSpec, McEstimate, RunResults};
use crate::quad;
use crate::rng::trial_seed;
use crate::transforms::{self, TransformBundle};

/// Level used for localizer coverage.
pub const LOCALIZER_TOP: u32 = 50;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scale {
    /// Trial counts as pinned by the criteria.
    Full,
    /// At most 10³ trials per experiment and 20 identity seeds.
    Quick,
}

impl Scale {
    fn trials(self, full: usize) -> usize {
        match self {
            Scale::Full => full,
            Scale::Quick => full.min(1000),
        }
    }
}

#[derive(Debug, Clone)]
pub struct SuiteConfig {
    pub scale: Scale,
    pub seed: u64,
    pub threads: Option<usize>,
    /// Per-experiment outputs and `suite.csv` go here when set.
    pub out: Option<PathBuf>,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        SuiteConfig {
            scale: Scale::Full,
            seed: 20_240_601,
            threads: None,
            out: None,
        }
    }
}

/// Result of one criterion.
#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub id: &'static str,
    pub title: &'static str,
    pub passed: bool,
    pub detail: String,
    pub seconds: f64,
}

impl fmt::Display for Outcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "[{}] {:<4} {:<34} {} ({:.1} s)",
            if self.passed { "PASS" } else { "FAIL" },
            self.id,
            self.title,
            self.detail,
            self.seconds
        )
    }
}

struct Recorded {
    name: String,
    spec: ExperimentSpec,
    results: RunResults,
    csv: Vec<u8>,
}

/// Runner holding the experiments seen so far.
pub struct Suite {
    cfg: SuiteConfig,
    recorded: Vec<Recorded>,
}

type Check = fn(&mut Suite) -> Result<(bool, String)>;

const CRITERIA: &[(&str, &str, Option<f64>, Check)] = &[
    ("1", "exact identities", Some(60.0), Suite::identities),
    ("2", "compensator mean zero", Some(300.0), Suite::compensator),
    ("3", "intensity survival", Some(60.0), Suite::survival),
    ("4", "bounded-jump event agreement", Some(600.0), Suite::bounded_agreement),
    ("5", "jumps above -1 event agreement", None, Suite::above_minus_one_agreement),
    ("6i", "converges with infinite QV", None, Suite::inv_sqrt_pattern),
    ("6ii", "finite QV diverging walk", None, Suite::neg_harmonic_pattern),
    ("6iii", "finite QV diverging intensity", None, Suite::cox_pattern),
    ("7a", "schedule inequalities", None, Suite::schedule_inequalities),
    ("7b", "kappa bounds", None, Suite::kappa_bounds),
    ("7c", "bounded exponential moments", None, Suite::exp_moments),
    ("7d", "divergence below -25", None, Suite::below_minus_25),
    ("8a", "power integral closed form", None, Suite::power_integral),
    ("8b", "logarithmic transform limit", None, Suite::y_limit),
    ("9", "localizer", None, Suite::localizer),
    ("10", "determinism", None, Suite::determinism),
    ("11", "iterated-log directional check", None, Suite::lil_directional),
];

impl Suite {
    pub fn new(cfg: SuiteConfig) -> Self {
        Suite {
            cfg,
            recorded: Vec::new(),
        }
    }

    /// Ids and titles of all criteria, in run order.
    pub fn criteria() -> impl Iterator<Item = (&'static str, &'static str)> {
        CRITERIA.iter().map(|c| (c.0, c.1))
    }

    /// Runs every criterion, reporting each outcome as it completes.
    ///
    /// A criterion whose computation errors counts as failed; the error text
    /// goes into its detail.
    pub fn run(&mut self, mut report: impl FnMut(&Outcome)) -> Result<Vec<Outcome>> {
        let mut out = Vec::new();
        for &(id, title, budget, check) in CRITERIA {
            let started = Instant::now();
            let (mut passed, mut detail) = match check(self) {
                Ok(r) => r,
                Err(e) => (false, format!("error: {e}")),
            };
            let seconds = started.elapsed().as_secs_f64();
            if let (Some(limit), Scale::Full) = (budget, self.cfg.scale) {
                if seconds > limit {
                    passed = false;
                    detail.push_str(&format!("; over the {limit:.0} s budget"));
                }
            }
            let o = Outcome {
                id,
                title,
                passed,
                detail,
                seconds,
            };
            report(&o);
            out.push(o);
        }
        if let Some(dir) = &self.cfg.out {
            let mut bytes = Vec::new();
            {
                let mut w = csv::Writer::from_writer(&mut bytes);
                w.write_record(["criterion", "title", "passed", "detail"])?;
                for o in &out {
                    w.write_record([o.id, o.title, if o.passed { "true" } else { "false" }, &o.detail])?;
                }
                w.flush().map_err(|e| Error::io("<csv>", e))?;
            }
            montecarlo::write_atomic(&dir.join("suite.csv"), &bytes)?;
        }
        Ok(out)
    }

    fn spec(&self, preset: &str, horizon: Option<f64>, trials: usize, analyzers: Vec<Analyzer>) -> Result<ExperimentSpec> {
        let mut generator = catalog::preset(preset)?;
        if let Some(h) = horizon {
            generator = catalog::with_horizon(generator, h)?;
        }
        Ok(ExperimentSpec {
            generator,
            trials: self.cfg.scale.trials(trials),
            base_seed: self.cfg.seed,
            analyzers,
            params: ProxyParams::default(),
        })
    }

    /// Runs and records an experiment; writes its outputs when configured.
    fn experiment(&mut self, name: &str, spec: ExperimentSpec) -> Result<RunResults> {
        let results = match &self.cfg.out {
            Some(dir) => montecarlo::run_to_dir(&spec, self.cfg.threads, &dir.join(name))?.0,
            None => montecarlo::run_trials(&spec, self.cfg.threads)?,
        };
        let mut csv = Vec::new();
        results.write_csv(&mut csv)?;
        self.recorded.push(Recorded {
            name: name.to_string(),
            spec,
            results: results.clone(),
            csv,
        });
        Ok(results)
    }

    fn identities(&mut self) -> Result<(bool, String)> {
        let seeds = match self.cfg.scale {
            Scale::Full => 100,
            Scale::Quick => 20,
        };
        let (mut worst_id, mut worst_dy, mut checked, mut skipped) = (0.0f64, 0.0f64, 0usize, Vec::new());
        for (name, _) in catalog::PRESETS {
            let spec = catalog::preset(name)?;
            if !spec.is_local_martingale() {
                skipped.push(*name);
                continue;
            }
            let gen = Generator::new(spec)?;
            let base = self.cfg.seed;
            let errs = montecarlo::par_map(seeds, self.cfg.threads, |i| {
                let s = gen.sample(trial_seed(base, i as u64))?;
                let b = TransformBundle::build(&gen, &s.path, &s.latent)?;
                Ok((
                    transforms::check_exp_identity(&b),
                    transforms::delta_y_error(&gen, &s.path, &s.latent, &b)?,
                ))
            })?;
            for (e, d) in errs {
                worst_id = worst_id.max(e);
                worst_dy = worst_dy.max(d);
            }
            checked += 1;
        }
        let passed = worst_id <= 1e-9 && worst_dy <= 1e-12;
        Ok((
            passed,
            format!(
                "{checked} presets x {seeds} seeds: max identity err {worst_id:.2e} (<= 1e-9), max dY err {worst_dy:.2e} (<= 1e-12); no transform for {}",
                skipped.join(", ")
            ),
        ))
    }

    fn compensator(&mut self) -> Result<(bool, String)> {
        let fs = [IntegrandId::SqCapAbs, IntegrandId::PosTail(1.0)];
        let analyzers: Vec<Analyzer> = fs.iter().map(|f| Analyzer::Compensated(*f)).collect();
        let walk = self.spec("rw_compensator", Some(1000.0), 100_000, analyzers.clone())?;
        let mut cox = self.spec("cox_linear", Some(1000.0), 100_000, analyzers)?;
        if let GeneratorSpec::Cox(c) = &mut cox.generator {
            c.step = 1.0;
        }
        let mut parts = Vec::new();
        let mut passed = true;
        for (name, spec) in [("02_walk", walk), ("02_cox", cox)] {
            let r = self.experiment(name, spec)?;
            for f in &fs {
                let z = montecarlo::mean_test(&r.nums(&format!("compensated:{f}"))?)?;
                passed &= z.abs() <= 3.0;
                parts.push(format!("{name} {f} z={z:+.2}"));
            }
        }
        Ok((passed, format!("{} (|z| <= 3)", parts.join(", "))))
    }

    fn survival(&mut self) -> Result<(bool, String)> {
        let mut spec = self.spec("cox_linear", None, 100_000, vec![Analyzer::Survival])?;
        if let GeneratorSpec::Cox(c) = &mut spec.generator {
            c.step = 1.0;
        }
        let r = self.experiment("03_survival", spec)?;
        let m = r.marginal("survival")?;
        let mass = quad::integrate_to_infinity(|s| 1.0 / ((1.0 + s) * (1.0 + s)), 0.0, &[], 1e-12)?;
        let target = (-mass).exp();
        let quad_err = (target - (-1.0f64).exp()).abs();
        let passed = quad_err < 1e-4 && m.lo - quad_err <= target && target <= m.hi + quad_err;
        Ok((
            passed,
            format!(
                "P(no jump) = {:.4} [{:.4}, {:.4}] vs exp(-{mass:.6}) = {target:.6}, quadrature err {quad_err:.1e}",
                m.p_hat, m.lo, m.hi
            ),
        ))
    }

    fn agreement(r: &RunResults, names: [&str; 4]) -> Result<(f64, String)> {
        let m = r.agreement(&names)?;
        let mut rate = m.min_rate();
        if rate.is_nan() {
            rate = 0.0;
        }
        let marg: Vec<String> = names
            .iter()
            .zip(&m.marginals)
            .map(|(n, e)| format!("{n}={:.3}", e.p_hat))
            .collect();
        Ok((rate, marg.join(" ")))
    }

    fn bounded_agreement(&mut self) -> Result<(bool, String)> {
        let spec = self.spec(
            "rw_bounded_alt_harmonic",
            None,
            10_000,
            vec![Analyzer::Flags, Analyzer::Localizer(LOCALIZER_TOP)],
        )?;
        let r = self.experiment("04_bounded", spec)?;
        let (rate, marg) = Self::agreement(&r, ["e1", "e2", "e3", "e4"])?;
        Ok((rate >= 0.99, format!("min pairwise agreement {rate:.4} (>= 0.99); {marg}")))
    }

    fn above_minus_one_agreement(&mut self) -> Result<(bool, String)> {
        let an = vec![Analyzer::Flags, Analyzer::Localizer(LOCALIZER_TOP)];
        let cox = self.spec("cox_convergent", None, 10_000, an.clone())?;
        let walk = self.spec("rw_bounded_half_alt_harmonic", None, 10_000, an)?;
        let mut passed = true;
        let mut parts = Vec::new();
        for (name, spec) in [("05_cox", cox), ("05_walk", walk)] {
            let r = self.experiment(name, spec)?;
            let (rate, marg) = Self::agreement(&r, ["f1", "f2", "f3", "f4"])?;
            passed &= rate >= 0.99;
            parts.push(format!("{name} min {rate:.4} ({marg})"));
        }
        Ok((passed, format!("{} (>= 0.99)", parts.join("; "))))
    }

    fn labels(r: &RunResults) -> Result<Vec<String>> {
        let i = r
            .columns
            .iter()
            .position(|c| c == "verdict")
            .ok_or_else(|| Error::InvalidParameter("no verdict column".into()))?;
        Ok(r.rows.iter().map(|row| row[i].render()).collect())
    }

    fn inv_sqrt_pattern(&mut self) -> Result<(bool, String)> {
        let spec = self.spec("rw_inv_sqrt", None, 10_000, vec![Analyzer::Flags])?;
        let gen = Generator::new(spec.generator.clone())?;
        let analytic_divergent = !characteristics::limit_finite(&gen, IntegrandId::SqCapAbs, &Latent::None)?;
        let r = self.experiment("06i_inv_sqrt", spec)?;
        let labels = Self::labels(&r)?;
        let n = labels.len() as f64;
        let conv = labels.iter().filter(|l| *l == &Label::Converged.to_string()).count() as f64 / n;
        let log_e = r.nums("log_e")?;
        let small = log_e.iter().filter(|v| **v < -4.0).count() as f64 / log_e.len() as f64;
        let matched = if analytic_divergent { conv } else { 0.0 };
        Ok((
            matched >= 0.99 && small >= 0.95,
            format!(
                "CONVERGED {conv:.4} with analytic (x^2 ^ |x|)*nu divergent = {analytic_divergent} (>= 0.99); log E < -4 in {small:.4} (>= 0.95)"
            ),
        ))
    }

    fn neg_harmonic_pattern(&mut self) -> Result<(bool, String)> {
        let spec = self.spec("rw_neg_harmonic", None, 10_000, vec![Analyzer::Flags])?;
        let r = self.experiment("06ii_neg_harmonic", spec)?;
        let labels = Self::labels(&r)?;
        let qv = r.nums("qv")?;
        let bound = std::f64::consts::PI.powi(2) / 6.0 + 1e-9;
        let hit = labels
            .iter()
            .zip(&qv)
            .filter(|(l, q)| *l == &Label::DivergedMinus.to_string() && **q <= bound)
            .count() as f64
            / labels.len() as f64;
        Ok((hit >= 0.99, format!("DIVERGED_MINUS with [X,X] <= pi^2/6 in {hit:.4} (>= 0.99)")))
    }

    fn cox_pattern(&mut self) -> Result<(bool, String)> {
        let spec = self.spec("cox_linear", None, 10_000, vec![Analyzer::Flags, Analyzer::Survival])?;
        let params = spec.params;
        let r = self.experiment("06iii_cox", spec)?;
        let qv = r.nums("qv")?;
        let tail = r.nums("qv_tail")?;
        let finite = qv
            .iter()
            .zip(&tail)
            // A single jump of any finite size is finite QV, so no cap here.
            .filter(|(q, t)| q.is_finite() && **t < params.qv_tol)
            .count();
        let labels = Self::labels(&r)?;
        let surv = r.bools("survival")?;
        let (mut k, mut n) = (0usize, 0usize);
        for (l, s) in labels.iter().zip(&surv) {
            if *s == Some(true) {
                n += 1;
                k += usize::from(l == &Label::DivergedMinus.to_string());
            }
        }
        let rate = if n == 0 { 0.0 } else { k as f64 / n as f64 };
        Ok((
            finite == qv.len() && rate >= 0.99,
            format!(
                "QV growth over the final window < {} on {finite}/{} paths (all); DIVERGED_MINUS on {rate:.4} of {n} no-jump paths (>= 0.99)",
                params.qv_tol,
                qv.len()
            ),
        ))
    }

    fn schedule() -> Result<DyadicSchedule> {
        match catalog::preset("rw_half")? {
            GeneratorSpec::RandomWalk(w) => match w.p {
                PRule::Schedule { c } => DyadicSchedule::new(c, w.events),
                other => Err(Error::InvalidSpec(format!("rw_half has p rule {other:?}"))),
            },
            other => Err(Error::InvalidSpec(format!("rw_half is {}", other.family()))),
        }
    }

    fn schedule_inequalities(&mut self) -> Result<(bool, String)> {
        let s = Self::schedule()?;
        let bad: Vec<usize> = (1..=s.len())
            .filter(|&n| s.inequalities_hold(n) != (true, true))
            .collect();
        Ok((
            bad.is_empty() && s.len() >= 100,
            format!("both inequalities hold for n = 1..{}; failures at {bad:?}", s.len()),
        ))
    }

    fn kappa_bounds(&mut self) -> Result<(bool, String)> {
        let s = Self::schedule()?;
        let th = s.threshold_index();
        let (mut ok, mut worst) = (true, f64::NEG_INFINITY);
        for n in 1..=s.len() {
            let (k, b) = characteristics::kappa_n(&s, n);
            ok &= k >= 0.0 && k <= b;
            if n >= th {
                let r = b * (n * n) as f64 / 2.0;
                worst = worst.max(r);
                ok &= r <= 1.0;
            }
        }
        Ok((
            ok,
            format!("0 <= kappa_n <= bound for n <= {}; max bound / (2/n^2) = {worst:.4} from n = {th}", s.len()),
        ))
    }

    fn exp_moments(&mut self) -> Result<(bool, String)> {
        let s = Self::schedule()?;
        let spec = catalog::preset("rw_half")?;
        let at: Vec<usize> = (0..=s.len()).collect();
        let trials = self.cfg.scale.trials(10_000);
        let curve = montecarlo::sup_exp_moment(&spec, s.c(), &at, trials, self.cfg.seed, self.cfg.threads)?;
        let kappa_sum: f64 = (1..=s.len()).map(|n| characteristics::kappa_n(&s, n).0).sum();
        let bound = kappa_sum.exp() + 3.0 * curve.max_se();
        let est = curve.max_estimate();
        Ok((
            est <= bound,
            format!(
                "max_t E[exp(Y_t/2)] = {est:.4} at t = {} vs exp(sum kappa) + 3 SE = {bound:.4}",
                curve.times[curve.argmax()]
            ),
        ))
    }

    fn below_minus_25(&mut self) -> Result<(bool, String)> {
        let spec = self.spec("rw_half", None, 10_000, vec![Analyzer::Below(-25.0)])?;
        let r = self.experiment("07d_rw_half", spec)?;
        let m: McEstimate = r.marginal("below:-25.0")?;
        Ok((
            m.p_hat >= 0.99,
            format!("P(X_100 < -25) = {:.4} [{:.4}, {:.4}] (>= 0.99)", m.p_hat, m.lo, m.hi),
        ))
    }

    fn power_integral(&mut self) -> Result<(bool, String)> {
        let gen = Generator::new(catalog::preset("cox_linear")?)?;
        let v = characteristics::compensator_integral(&gen, IntegrandId::PowC(0.5), f64::INFINITY)?;
        let err = (v - 2.0).abs();
        Ok((err < 1e-6, format!("int (1+s)^(-3/2) ds = {v:.9}, err {err:.1e} (< 1e-6)")))
    }

    fn y_limit(&mut self) -> Result<(bool, String)> {
        let spec = match catalog::with_horizon(catalog::preset("cox_linear")?, 1e4)? {
            GeneratorSpec::Cox(c) => GeneratorSpec::Cox(CoxSpec { step: 0.01, ..c }),
            other => other,
        };
        let gen = Generator::new(spec)?;
        let mut i = 0u64;
        let sample = loop {
            let s = gen.sample(trial_seed(self.cfg.seed, i))?;
            if matches!(s.latent, Latent::Cox { rho } if rho.is_never()) {
                break s;
            }
            i += 1;
            if i > 1000 {
                return Err(Error::Numeric("no path without a jump in 1000 seeds".into()));
            }
        };
        let y = transforms::logarithmic_transform(&gen, &sample.path, &sample.latent)?;
        let yt = *y.last().expect("non-empty");
        let err = (yt + 1.0).abs();
        Ok((err < 1e-3, format!("Y_T = {yt:.6} at T = 1e4 on a no-jump path, |Y_T + 1| = {err:.2e} (< 1e-3)")))
    }

    fn localizer(&mut self) -> Result<(bool, String)> {
        let col_c = format!("covered[{LOCALIZER_TOP}]");
        let col_d = format!("dominated[{LOCALIZER_TOP}]");
        let mut passed = true;
        let mut parts = Vec::new();
        for rec in &self.recorded {
            if !rec.spec.analyzers.contains(&Analyzer::Localizer(LOCALIZER_TOP)) {
                continue;
            }
            let (name, r) = (&rec.name, &rec.results);
            let dom = r.bools(&col_d)?;
            let all_dom = dom.iter().all(|d| *d == Some(true));
            let cov = r.marginal(&col_c)?;
            passed &= all_dom && cov.p_hat >= 0.99;
            parts.push(format!("{name}: dominated {all_dom}, coverage {:.4}", cov.p_hat));
        }
        if parts.is_empty() {
            return Ok((false, "no experiment carried the localizer".into()));
        }
        Ok((passed, format!("{} (coverage >= 0.99)", parts.join("; "))))
    }

    fn determinism(&mut self) -> Result<(bool, String)> {
        let other = match self.cfg.threads {
            Some(1) => Some(3),
            _ => Some(1),
        };
        let mut parts = Vec::new();
        let mut passed = true;
        for rec in &self.recorded {
            // Replay the leading trials: rows depend only on their index.
            let mut spec = rec.spec.clone();
            spec.trials = spec.trials.min(500);
            let mut csv = Vec::new();
            montecarlo::run_trials(&spec, other)?.write_csv(&mut csv)?;
            let prefix = rec
                .csv
                .split_inclusive(|b| *b == b'\n')
                .take(spec.trials + 1)
                .flatten()
                .copied()
                .collect::<Vec<u8>>();
            let same = prefix == csv;
            passed &= same;
            if !same {
                parts.push(rec.name.clone());
            }
        }
        Ok((
            passed,
            format!(
                "{} experiments replayed (first <= 500 trials) with threads {:?} vs {:?}; mismatches: {parts:?}",
                self.recorded.len(),
                other,
                self.cfg.threads
            ),
        ))
    }

    fn lil_directional(&mut self) -> Result<(bool, String)> {
        let mut maxima = Vec::new();
        for t in [1e2, 1e3, 1e4] {
            let spec = self.spec("cox_lil", Some(t), 1000, vec![Analyzer::Survival])?;
            let name = format!("11_lil_T{t:.0}");
            let r = self.experiment(&name, spec)?;
            let fin = r.nums("final_value")?;
            let surv = r.bools("survival")?;
            let m = fin
                .iter()
                .zip(&surv)
                .filter(|(_, s)| **s == Some(true))
                .map(|(v, _)| *v)
                .fold(f64::NEG_INFINITY, f64::max);
            maxima.push(m);
        }
        let decreasing = maxima.windows(2).all(|w| w[1] < w[0]);
        Ok((
            decreasing,
            format!(
                "max X'_T on no-jump paths at T = 1e2, 1e3, 1e4: {:.2}, {:.2}, {:.2} (strictly decreasing)",
                maxima[0], maxima[1], maxima[2]
            ),
        ))
    }
}
