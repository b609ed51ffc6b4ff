//! Seeded, order-independent Monte Carlo over generator samples.
//!
//! Trial `i` always uses seed `trial_seed(base_seed, i)`, and results are
//! collected by index, so the output does not depend on the thread count.

use std::fmt;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::characteristics::{self, IntegrandId};
use crate::convergence::{crossing_localizer, EventContext, EventFlags, ProxyParams};
use crate::error::{Error, Result};
use crate::generators::{Generator, GeneratorSpec, Latent};
use crate::rng::trial_seed;

/// Two-sided 95% normal quantile.
pub const Z95: f64 = 1.959_963_984_540_054;

/// A proportion with its Wilson 95% interval.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct McEstimate {
    pub p_hat: f64,
    pub successes: usize,
    pub n: usize,
    pub lo: f64,
    pub hi: f64,
}

impl McEstimate {
    pub fn wilson(successes: usize, n: usize) -> Result<Self> {
        if n == 0 || successes > n {
            return Err(Error::InvalidParameter(format!("bad proportion {successes}/{n}")));
        }
        let nf = n as f64;
        let p = successes as f64 / nf;
        let z2 = Z95 * Z95;
        let denom = 1.0 + z2 / nf;
        let centre = (p + z2 / (2.0 * nf)) / denom;
        let half = Z95 * (p * (1.0 - p) / nf + z2 / (4.0 * nf * nf)).sqrt() / denom;
        Ok(McEstimate {
            p_hat: p,
            successes,
            n,
            lo: (centre - half).clamp(0.0, p),
            hi: (centre + half).clamp(p, 1.0),
        })
    }

    pub fn contains(&self, value: f64) -> bool {
        self.lo <= value && value <= self.hi
    }
}

/// `mean / (sd / sqrt(n))` of a per-trial statistic.
pub fn mean_test(xs: &[f64]) -> Result<f64> {
    let (mean, sd) = mean_sd(xs)?;
    if sd == 0.0 {
        if mean == 0.0 {
            return Ok(0.0);
        }
        return Err(Error::Numeric(format!("zero variance with nonzero mean {mean}")));
    }
    Ok(mean / (sd / (xs.len() as f64).sqrt()))
}

/// Sample mean and standard deviation; needs at least two values.
pub fn mean_sd(xs: &[f64]) -> Result<(f64, f64)> {
    if xs.len() < 2 {
        return Err(Error::InvalidParameter("mean test needs at least two trials".into()));
    }
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    let var = xs.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (n - 1.0);
    Ok((mean, var.sqrt()))
}

/// Pairwise agreement rates between boolean events.
#[derive(Debug, Clone, PartialEq)]
pub struct AgreementMatrix {
    pub names: Vec<String>,
    /// `rates[i][j]`: fraction of trials (where both are defined) on which
    /// events `i` and `j` agree.
    pub rates: Vec<Vec<f64>>,
    pub marginals: Vec<McEstimate>,
}

impl AgreementMatrix {
    /// Builds the matrix from per-event columns; `None` entries are skipped.
    pub fn from_columns(names: Vec<String>, columns: &[Vec<Option<bool>>]) -> Result<Self> {
        let k = columns.len();
        if k != names.len() || k == 0 {
            return Err(Error::InvalidParameter("agreement matrix needs one name per event column".into()));
        }
        let mut rates = vec![vec![1.0; k]; k];
        for i in 0..k {
            for j in i + 1..k {
                let (mut agree, mut n) = (0usize, 0usize);
                for (a, b) in columns[i].iter().zip(&columns[j]) {
                    if let (Some(a), Some(b)) = (a, b) {
                        n += 1;
                        agree += usize::from(a == b);
                    }
                }
                let r = if n == 0 { f64::NAN } else { agree as f64 / n as f64 };
                rates[i][j] = r;
                rates[j][i] = r;
            }
        }
        let marginals = columns
            .iter()
            .map(|c| {
                let defined: Vec<bool> = c.iter().flatten().copied().collect();
                McEstimate::wilson(defined.iter().filter(|&&b| b).count(), defined.len().max(1))
            })
            .collect::<Result<_>>()?;
        Ok(AgreementMatrix { names, rates, marginals })
    }

    /// Smallest off-diagonal agreement rate.
    pub fn min_rate(&self) -> f64 {
        let mut m = 1.0f64;
        for i in 0..self.rates.len() {
            for j in i + 1..self.rates.len() {
                m = m.min(self.rates[i][j]);
            }
        }
        m
    }
}

/// Per-trial statistic requested from a run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Analyzer {
    /// Verdict, event flags and bracket statistics.
    Flags,
    /// `F*μ_T - F*ν_T`, the compensated jump integral at the horizon.
    Compensated(IntegrandId),
    /// Whether the single jump of an intensity construction never happens.
    Survival,
    /// Whether `X_T < level`.
    Below(f64),
    /// Crossing-time localization at integer levels `1..=top`: coverage and
    /// the domination inequality.
    Localizer(u32),
}

impl fmt::Display for Analyzer {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Analyzer::Flags => write!(f, "flags"),
            Analyzer::Compensated(id) => write!(f, "compensated:{id}"),
            Analyzer::Survival => write!(f, "survival"),
            Analyzer::Below(l) => write!(f, "below:{l:?}"),
            Analyzer::Localizer(top) => write!(f, "localizer:{top}"),
        }
    }
}

impl FromStr for Analyzer {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (head, arg) = match s.split_once(':') {
            Some((h, a)) => (h.trim(), Some(a.trim())),
            None => (s.trim(), None),
        };
        match (head, arg) {
            ("flags", None) => Ok(Analyzer::Flags),
            ("survival", None) => Ok(Analyzer::Survival),
            ("compensated", Some(f)) => Ok(Analyzer::Compensated(f.parse()?)),
            ("below", Some(l)) => l
                .parse()
                .map(Analyzer::Below)
                .map_err(|_| Error::Config(format!("bad level in analyzer {s:?}"))),
            ("localizer", Some(top)) => match top.parse::<u32>() {
                Ok(t) if t >= 1 => Ok(Analyzer::Localizer(t)),
                _ => Err(Error::Config(format!("localizer needs a positive integer level, got {s:?}"))),
            },
            _ => Err(Error::Config(format!(
                "unknown analyzer {s:?}; expected flags, survival, compensated:<INTEGRAND>, below:<level> or localizer:<top>"
            ))),
        }
    }
}

impl Serialize for Analyzer {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Analyzer {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Everything that determines a run's data outputs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentSpec {
    pub generator: GeneratorSpec,
    pub trials: usize,
    pub base_seed: u64,
    pub analyzers: Vec<Analyzer>,
    #[serde(default)]
    pub params: ProxyParams,
}

impl ExperimentSpec {
    pub fn validate(&self) -> Result<()> {
        if self.trials == 0 {
            return Err(Error::Config("trials must be at least 1".into()));
        }
        if self.analyzers.is_empty() {
            return Err(Error::Config("at least one analyzer is required".into()));
        }
        if self.analyzers.contains(&Analyzer::Survival) && !matches!(self.generator, GeneratorSpec::Cox(_)) {
            return Err(Error::Config("the survival analyzer needs an intensity construction".into()));
        }
        self.params.validate()
    }

    /// Hex SHA-256 of the canonical JSON echo of the spec.
    pub fn hash(&self) -> String {
        let json = serde_json::to_string(self).expect("spec serializes");
        hex::encode(Sha256::digest(json.as_bytes()))
    }
}

/// One CSV cell.
#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Bool(bool),
    Num(f64),
    Text(String),
    Empty,
}

impl Cell {
    pub fn render(&self) -> String {
        match self {
            Cell::Bool(b) => b.to_string(),
            Cell::Num(v) => v.to_string(),
            Cell::Text(t) => t.clone(),
            Cell::Empty => String::new(),
        }
    }

    pub fn as_bool(&self) -> Option<bool> {
        match self {
            Cell::Bool(b) => Some(*b),
            _ => None,
        }
    }

    pub fn as_num(&self) -> Option<f64> {
        match self {
            Cell::Num(v) => Some(*v),
            _ => None,
        }
    }
}

const FLAG_NAMES: [&str; 17] = [
    "a", "b", "c", "d", "e", "f", "g", "h", "neg_jump_sli", "e1", "e2", "e3", "e4", "f1", "f2", "f3", "f4",
];

fn flag_cells(f: &EventFlags) -> Vec<Cell> {
    let opt = |v: Option<bool>| v.map_or(Cell::Empty, Cell::Bool);
    let mut out: Vec<Cell> = [f.a, f.b, f.c, f.d, f.e, f.f, f.g, f.h, f.neg_jump_sli, f.e1, f.e2, f.e3, f.e4]
        .into_iter()
        .map(Cell::Bool)
        .collect();
    out.extend([opt(f.f1), opt(f.f2), opt(f.f3), opt(f.f4)]);
    out
}

/// Per-trial results, in trial order.
#[derive(Debug, Clone, PartialEq)]
pub struct RunResults {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl RunResults {
    fn index_of(&self, name: &str) -> Result<usize> {
        self.columns
            .iter()
            .position(|c| c == name)
            .ok_or_else(|| Error::InvalidParameter(format!("no column {name:?} in results")))
    }

    /// A boolean column (`None` where empty).
    pub fn bools(&self, name: &str) -> Result<Vec<Option<bool>>> {
        let i = self.index_of(name)?;
        Ok(self.rows.iter().map(|r| r[i].as_bool()).collect())
    }

    /// A numeric column, skipping empty cells.
    pub fn nums(&self, name: &str) -> Result<Vec<f64>> {
        let i = self.index_of(name)?;
        Ok(self.rows.iter().filter_map(|r| r[i].as_num()).collect())
    }

    /// Proportion of trials where the column is true.
    pub fn marginal(&self, name: &str) -> Result<McEstimate> {
        let col: Vec<bool> = self.bools(name)?.into_iter().flatten().collect();
        McEstimate::wilson(col.iter().filter(|&&b| b).count(), col.len())
    }

    pub fn agreement(&self, names: &[&str]) -> Result<AgreementMatrix> {
        let columns = names.iter().map(|n| self.bools(n)).collect::<Result<Vec<_>>>()?;
        AgreementMatrix::from_columns(names.iter().map(|s| s.to_string()).collect(), &columns)
    }

    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        w.write_record(&self.columns)?;
        for row in &self.rows {
            w.write_record(row.iter().map(Cell::render))?;
        }
        w.flush().map_err(|e| Error::io("<csv>", e))?;
        Ok(())
    }

    /// Tidy summary: marginals of boolean columns, agreement pairs of the
    /// event groups, and mean tests of numeric columns.
    pub fn summary(&self) -> Result<Vec<SummaryRow>> {
        let mut out = Vec::new();
        for (i, name) in self.columns.iter().enumerate() {
            let bools: Vec<bool> = self.rows.iter().filter_map(|r| r[i].as_bool()).collect();
            if !bools.is_empty() {
                let m = McEstimate::wilson(bools.iter().filter(|&&b| b).count(), bools.len())?;
                out.push(SummaryRow {
                    kind: "marginal",
                    name: name.clone(),
                    n: m.n,
                    estimate: m.p_hat,
                    lo: Some(m.lo),
                    hi: Some(m.hi),
                    z: None,
                });
                continue;
            }
            let nums: Vec<f64> = self.rows.iter().filter_map(|r| r[i].as_num()).collect();
            if name != "seed" && nums.len() >= 2 && nums.iter().all(|v| v.is_finite()) {
                let (mean, sd) = mean_sd(&nums)?;
                out.push(SummaryRow {
                    kind: "mean",
                    name: name.clone(),
                    n: nums.len(),
                    estimate: mean,
                    lo: Some(mean - Z95 * sd / (nums.len() as f64).sqrt()),
                    hi: Some(mean + Z95 * sd / (nums.len() as f64).sqrt()),
                    z: mean_test(&nums).ok(),
                });
            }
        }
        for group in [["e1", "e2", "e3", "e4"], ["f1", "f2", "f3", "f4"]] {
            if self.index_of(group[0]).is_err() {
                continue;
            }
            let m = self.agreement(&group)?;
            for i in 0..group.len() {
                for j in i + 1..group.len() {
                    if m.rates[i][j].is_nan() {
                        continue;
                    }
                    out.push(SummaryRow {
                        kind: "agreement",
                        name: format!("{}~{}", group[i], group[j]),
                        n: self.rows.len(),
                        estimate: m.rates[i][j],
                        lo: None,
                        hi: None,
                        z: None,
                    });
                }
            }
        }
        Ok(out)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SummaryRow {
    pub kind: &'static str,
    pub name: String,
    pub n: usize,
    pub estimate: f64,
    pub lo: Option<f64>,
    pub hi: Option<f64>,
    pub z: Option<f64>,
}

pub fn write_summary_csv<W: Write>(rows: &[SummaryRow], writer: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(["kind", "name", "n", "estimate", "lo", "hi", "z"])?;
    let opt = |v: Option<f64>| v.map_or(String::new(), |v| v.to_string());
    for r in rows {
        w.write_record([
            r.kind.to_string(),
            r.name.clone(),
            r.n.to_string(),
            r.estimate.to_string(),
            opt(r.lo),
            opt(r.hi),
            opt(r.z),
        ])?;
    }
    w.flush().map_err(|e| Error::io("<csv>", e))?;
    Ok(())
}

/// Runs `f(i)` for `i in 0..n` on at most `threads` workers, in index order.
pub fn par_map<T, F>(n: usize, threads: Option<usize>, f: F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(usize) -> Result<T> + Sync + Send,
{
    let run = || (0..n).into_par_iter().map(&f).collect::<Result<Vec<T>>>();
    match threads {
        Some(t) => rayon::ThreadPoolBuilder::new()
            .num_threads(t.max(1))
            .build()
            .map_err(|e| Error::Numeric(format!("thread pool: {e}")))?
            .install(run),
        None => run(),
    }
}

fn columns_for(analyzers: &[Analyzer]) -> Vec<String> {
    let mut cols = vec!["trial".to_string(), "seed".to_string(), "final_value".to_string()];
    for a in analyzers {
        match a {
            Analyzer::Flags => {
                cols.extend(["verdict", "qv", "qv_tail", "log_e", "Y", "tau_j"].map(String::from));
                cols.extend(FLAG_NAMES.iter().map(|s| s.to_string()));
            }
            Analyzer::Localizer(top) => {
                cols.push(format!("covered[{top}]"));
                cols.push(format!("dominated[{top}]"));
            }
            other => cols.push(other.to_string()),
        }
    }
    cols
}

/// Runs every trial of `spec` and returns the per-trial table.
pub fn run_trials(spec: &ExperimentSpec, threads: Option<usize>) -> Result<RunResults> {
    spec.validate()?;
    let gen = Generator::new(spec.generator.clone())?;
    let needs_ctx = spec.analyzers.contains(&Analyzer::Flags);
    let ctx = if needs_ctx {
        Some(EventContext::new(gen.clone(), spec.params)?)
    } else {
        None
    };
    let horizon = gen.spec().horizon();
    // F*ν_T is deterministic unless it depends on the jump time.
    let fixed_comp: Vec<Option<f64>> = spec
        .analyzers
        .iter()
        .map(|a| match (a, gen.spec()) {
            (Analyzer::Compensated(_), GeneratorSpec::Cox(_)) => Ok(None),
            (Analyzer::Compensated(f), _) => characteristics::compensator_integral(&gen, *f, horizon).map(Some),
            _ => Ok(None),
        })
        .collect::<Result<_>>()?;
    let rows = par_map(spec.trials, threads, |i| {
        let seed = trial_seed(spec.base_seed, i as u64);
        let sample = gen.sample(seed)?;
        let mut row = vec![
            Cell::Num(i as f64),
            Cell::Text(seed.to_string()),
            Cell::Num(sample.path.final_value()),
        ];
        for (a, fixed) in spec.analyzers.iter().zip(&fixed_comp) {
            match a {
                Analyzer::Flags => {
                    let r = ctx.as_ref().expect("context").evaluate(&sample)?;
                    row.push(Cell::Text(r.verdict.label.to_string()));
                    row.push(Cell::Num(r.qv));
                    row.push(Cell::Num(r.qv_tail));
                    row.push(Cell::Num(r.log_e));
                    row.push(r.y.map_or(Cell::Empty, Cell::Num));
                    row.push(r.tau_j.map_or(Cell::Empty, Cell::Num));
                    row.extend(flag_cells(&r.flags));
                }
                Analyzer::Compensated(f) => {
                    let mu = *characteristics::empirical_jump_integral(&sample.path, *f, None)?
                        .last()
                        .expect("non-empty");
                    let nu = match fixed {
                        Some(v) => *v,
                        None => characteristics::compensator_coupled(&gen, *f, &sample.latent, horizon)?,
                    };
                    row.push(Cell::Num(mu - nu));
                }
                Analyzer::Survival => {
                    let never = matches!(sample.latent, Latent::Cox { rho } if rho.is_never());
                    row.push(Cell::Bool(never));
                }
                Analyzer::Below(level) => row.push(Cell::Bool(sample.path.final_value() < *level)),
                Analyzer::Localizer(top) => {
                    let levels: Vec<f64> = (1..=*top).map(f64::from).collect();
                    let r = crossing_localizer(&sample.path, &levels)?;
                    row.push(Cell::Bool(r.coverage));
                    row.push(Cell::Bool(r.dominated));
                }
            }
        }
        Ok(row)
    })?;
    Ok(RunResults {
        columns: columns_for(&spec.analyzers),
        rows,
    })
}

/// `Ê[e^{cY_t}]` at selected grid indices, kept in log space.
#[derive(Debug, Clone, PartialEq)]
pub struct ExpMomentCurve {
    pub times: Vec<f64>,
    /// `log Ê[e^{cY_t}]` per time.
    pub log_mean: Vec<f64>,
    /// Standard error of `Ê[e^{cY_t}]` divided by the estimate.
    pub rel_se: Vec<f64>,
}

impl ExpMomentCurve {
    /// Index of the largest estimate.
    pub fn argmax(&self) -> usize {
        let mut best = 0;
        for (i, v) in self.log_mean.iter().enumerate() {
            if *v > self.log_mean[best] {
                best = i;
            }
        }
        best
    }

    pub fn max_estimate(&self) -> f64 {
        self.log_mean[self.argmax()].exp()
    }

    /// Standard error at the maximizing time.
    pub fn max_se(&self) -> f64 {
        let i = self.argmax();
        self.log_mean[i].exp() * self.rel_se[i]
    }
}

/// `max_t Ê[e^{cY_t}]` over the grid indices `at`, with log-sum-exp
/// accumulation across trials.
///
/// For processes with independent increments `E[e^{cY_σ}]` is nondecreasing
/// in `σ`, so the maximum over deterministic times matches the supremum over
/// bounded stopping times; in general it is a lower bound.
pub fn sup_exp_moment(
    spec: &GeneratorSpec,
    c: f64,
    at: &[usize],
    trials: usize,
    base_seed: u64,
    threads: Option<usize>,
) -> Result<ExpMomentCurve> {
    if c == 0.0 || !c.is_finite() {
        return Err(Error::InvalidParameter(format!("exponent must be nonzero, got {c}")));
    }
    if trials < 2 || at.is_empty() {
        return Err(Error::InvalidParameter("need at least two trials and one time".into()));
    }
    let gen = Generator::new(spec.clone())?;
    if at.iter().any(|&k| k >= gen.grid().len()) {
        return Err(Error::InvalidParameter("time index beyond the grid".into()));
    }
    let ctx = EventContext::new(gen.clone(), ProxyParams::default())?;
    let per_trial = par_map(trials, threads, |i| {
        let sample = gen.sample(trial_seed(base_seed, i as u64))?;
        let y = ctx
            .y_series(&sample)?
            .ok_or_else(|| Error::Unsupported("exponential moments of an undefined transform".into()))?;
        Ok(at.iter().map(|&k| c * y[k]).collect::<Vec<f64>>())
    })?;
    let n = trials as f64;
    let mut log_mean = Vec::with_capacity(at.len());
    let mut rel_se = Vec::with_capacity(at.len());
    for j in 0..at.len() {
        let m = per_trial.iter().map(|r| r[j]).fold(f64::NEG_INFINITY, f64::max);
        let scaled: Vec<f64> = per_trial.iter().map(|r| (r[j] - m).exp()).collect();
        let (mean, sd) = mean_sd(&scaled)?;
        log_mean.push(m + mean.ln());
        rel_se.push(sd / n.sqrt() / mean);
    }
    Ok(ExpMomentCurve {
        times: at.iter().map(|&k| gen.grid().times()[k]).collect(),
        log_mean,
        rel_se,
    })
}

/// Writes `bytes` to `path` through a temporary file in the same directory.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = path.parent().filter(|p| !p.as_os_str().is_empty()).unwrap_or(Path::new("."));
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(|e| Error::io(dir, e))?;
    tmp.write_all(bytes).map_err(|e| Error::io(path, e))?;
    tmp.persist(path).map_err(|e| Error::io(path, e.error))?;
    Ok(())
}

/// Paths of the three files written by [`write_outputs`].
#[derive(Debug, Clone, PartialEq)]
pub struct OutputFiles {
    pub results: PathBuf,
    pub summary: PathBuf,
    pub manifest: PathBuf,
}

/// Runs the experiment and writes `results.csv`, `summary.csv` and
/// `manifest.json` into `dir`. Nothing is written if the run fails.
pub fn run_to_dir(spec: &ExperimentSpec, threads: Option<usize>, dir: &Path) -> Result<(RunResults, OutputFiles)> {
    let started = Instant::now();
    let results = run_trials(spec, threads)?;
    let summary = results.summary()?;
    let mut res_bytes = Vec::new();
    results.write_csv(&mut res_bytes)?;
    let mut sum_bytes = Vec::new();
    write_summary_csv(&summary, &mut sum_bytes)?;
    let manifest = serde_json::json!({
        "tool": env!("CARGO_PKG_NAME"),
        "version": env!("CARGO_PKG_VERSION"),
        "spec_sha256": spec.hash(),
        "spec": spec,
        "base_seed": spec.base_seed,
        "trials": spec.trials,
        "seed_rule": "splitmix64 mix of (base_seed, trial index)",
        "threads": threads,
        "wall_seconds": started.elapsed().as_secs_f64(),
    });
    let files = OutputFiles {
        results: dir.join("results.csv"),
        summary: dir.join("summary.csv"),
        manifest: dir.join("manifest.json"),
    };
    write_atomic(&files.results, &res_bytes)?;
    write_atomic(&files.summary, &sum_bytes)?;
    let man = serde_json::to_vec_pretty(&manifest).map_err(|e| Error::Numeric(e.to_string()))?;
    write_atomic(&files.manifest, &man)?;
    Ok((results, files))
}
