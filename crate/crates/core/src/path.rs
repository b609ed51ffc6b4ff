//! Càdlàg sample paths on finite grids.
//!
//! A path is stored as its value at every grid time together with the jump and
//! continuous increment that produced each value. Values are accumulated once,
//! at construction, as `value[k] = value[k-1] + cont[k] + jump[k]`; nothing
//! downstream recomputes them.

use std::io::Write;
use std::sync::Arc;

use crate::error::{Error, Result};

/// Layout of the time index.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum GridKind {
    /// Times `0, 1, ..., N`; events happen at the integers `1..=N`.
    Integer,
    /// Times `0, h, 2h, ..., T`.
    Uniform { step: f64 },
}

/// Strictly increasing grid of times starting at the origin.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeGrid {
    kind: GridKind,
    times: Vec<f64>,
}

impl TimeGrid {
    /// Integer event grid with `events` jump times `1..=events`.
    pub fn integer(events: usize) -> Self {
        TimeGrid {
            kind: GridKind::Integer,
            times: (0..=events).map(|n| n as f64).collect(),
        }
    }

    /// Uniform grid on `[0, horizon]`; `step` must divide `horizon`.
    pub fn uniform(step: f64, horizon: f64) -> Result<Self> {
        if !(step > 0.0 && step.is_finite()) {
            return Err(Error::InvalidParameter(format!("grid step must be positive, got {step}")));
        }
        if !(horizon > 0.0 && horizon.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "grid horizon must be positive, got {horizon}"
            )));
        }
        let ratio = horizon / step;
        let steps = ratio.round();
        if (ratio - steps).abs() > 1e-9 * ratio.max(1.0) || steps < 1.0 {
            return Err(Error::InvalidParameter(format!(
                "step {step} does not divide horizon {horizon}"
            )));
        }
        let steps = steps as usize;
        let mut times: Vec<f64> = (0..=steps).map(|k| k as f64 * step).collect();
        times[steps] = horizon;
        Ok(TimeGrid {
            kind: GridKind::Uniform { step },
            times,
        })
    }

    pub fn kind(&self) -> GridKind {
        self.kind
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    /// Number of grid points, origin included.
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn horizon(&self) -> f64 {
        *self.times.last().expect("grid has an origin")
    }

    /// Last index whose time is `<= t` (0 for `t` before the first step).
    pub fn index_at_or_before(&self, t: f64) -> usize {
        match self.kind {
            GridKind::Integer => {
                if t < 0.0 {
                    0
                } else {
                    (t.floor() as usize).min(self.len() - 1)
                }
            }
            GridKind::Uniform { .. } => self.times.partition_point(|&s| s <= t).saturating_sub(1),
        }
    }

    /// First index inside the final window `[T - window, T]`.
    pub fn window_start(&self, window: f64) -> Result<usize> {
        let horizon = self.horizon();
        if !(window > 0.0) || window > horizon * (1.0 + 1e-12) {
            return Err(Error::InvalidParameter(format!(
                "window {window} must lie in (0, {horizon}]"
            )));
        }
        let cut = horizon - window - 1e-12 * horizon.max(1.0);
        Ok(self.times.partition_point(|&s| s < cut))
    }
}

/// Continuous component of a path, as per-step increments.
///
/// `increments` is the full continuous increment (drift plus diffusion).
/// `diffusive` holds the diffusive share only; drift contributes nothing to
/// `[X^c, X^c]`.
#[derive(Debug, Clone, PartialEq)]
pub struct ContinuousPart {
    pub increments: Vec<f64>,
    pub diffusive: Option<Vec<f64>>,
}

/// An immutable càdlàg path observed on a [`TimeGrid`].
#[derive(Debug, Clone, PartialEq)]
pub struct SamplePath {
    grid: Arc<TimeGrid>,
    values: Vec<f64>,
    jumps: Vec<f64>,
    cont: Option<ContinuousPart>,
}

impl SamplePath {
    /// Accumulates a path from its starting value and per-step increments.
    ///
    /// `jumps[0]` and the continuous increments at index 0 must be zero.
    pub fn from_increments(
        grid: Arc<TimeGrid>,
        start: f64,
        jumps: Vec<f64>,
        cont: Option<ContinuousPart>,
    ) -> Result<Self> {
        let n = grid.len();
        if jumps.len() != n {
            return Err(Error::InvalidParameter(format!(
                "expected {n} jump entries, got {}",
                jumps.len()
            )));
        }
        if jumps[0] != 0.0 {
            return Err(Error::InvalidParameter("a path cannot jump at the origin".into()));
        }
        if let Some(c) = &cont {
            if c.increments.len() != n || c.diffusive.as_ref().is_some_and(|d| d.len() != n) {
                return Err(Error::InvalidParameter("continuous increments have the wrong length".into()));
            }
            if c.increments[0] != 0.0 || c.diffusive.as_ref().is_some_and(|d| d[0] != 0.0) {
                return Err(Error::InvalidParameter("continuous increments must vanish at the origin".into()));
            }
        }
        if !start.is_finite() {
            return Err(Error::Numeric("non-finite starting value".into()));
        }
        let mut values = Vec::with_capacity(n);
        values.push(start);
        let mut last = start;
        match &cont {
            Some(c) => {
                for k in 1..n {
                    last = last + c.increments[k] + jumps[k];
                    values.push(last);
                }
            }
            None => {
                for &j in &jumps[1..] {
                    last = last + 0.0 + j;
                    values.push(last);
                }
            }
        }
        if !last.is_finite() || values.iter().any(|v| !v.is_finite()) {
            return Err(Error::Numeric("path contains non-finite values".into()));
        }
        Ok(SamplePath {
            grid,
            values,
            jumps,
            cont,
        })
    }

    /// Pure-jump path.
    pub fn from_jumps(grid: Arc<TimeGrid>, start: f64, jumps: Vec<f64>) -> Result<Self> {
        Self::from_increments(grid, start, jumps, None)
    }

    /// Path frozen at `value`.
    pub fn constant(grid: Arc<TimeGrid>, value: f64) -> Result<Self> {
        let n = grid.len();
        Self::from_increments(grid, value, vec![0.0; n], None)
    }

    pub fn grid(&self) -> &Arc<TimeGrid> {
        &self.grid
    }

    pub fn times(&self) -> &[f64] {
        self.grid.times()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn jumps(&self) -> &[f64] {
        &self.jumps
    }

    pub fn continuous(&self) -> Option<&ContinuousPart> {
        self.cont.as_ref()
    }

    /// Continuous increment at index `k` (zero when the path has none).
    pub fn cont_increment(&self, k: usize) -> f64 {
        self.cont.as_ref().map_or(0.0, |c| c.increments[k])
    }

    /// Diffusive increment at index `k`.
    pub fn diffusive_increment(&self, k: usize) -> f64 {
        self.cont
            .as_ref()
            .and_then(|c| c.diffusive.as_ref())
            .map_or(0.0, |d| d[k])
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn horizon(&self) -> f64 {
        self.grid.horizon()
    }

    pub fn final_value(&self) -> f64 {
        *self.values.last().expect("non-empty path")
    }

    /// Indices carrying a nonzero jump.
    pub fn jump_indices(&self) -> impl Iterator<Item = usize> + '_ {
        self.jumps
            .iter()
            .enumerate()
            .filter(|(_, j)| **j != 0.0)
            .map(|(k, _)| k)
    }

    /// Writes the path as CSV with header `t,X,dX,dXc`.
    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        w.write_record(["t", "X", "dX", "dXc"])?;
        for k in 0..self.len() {
            w.write_record([
                self.times()[k].to_string(),
                self.values[k].to_string(),
                self.jumps[k].to_string(),
                self.cont_increment(k).to_string(),
            ])?;
        }
        w.flush().map_err(|e| Error::io("<csv>", e))?;
        Ok(())
    }
}

/// Cumulative quadratic variation of a path.
#[derive(Debug, Clone, PartialEq)]
pub struct QVSeries {
    /// `[X, X]_t` at each grid time.
    pub total: Vec<f64>,
    /// `[X^c, X^c]_t` at each grid time.
    pub continuous: Vec<f64>,
}

impl QVSeries {
    pub fn final_total(&self) -> f64 {
        *self.total.last().expect("non-empty series")
    }

    /// Growth of `[X, X]` over the grid indices `from..`.
    pub fn growth_since(&self, from: usize) -> f64 {
        let last = self.final_total();
        let base = if from == 0 { 0.0 } else { self.total[from - 1] };
        last - base
    }
}

/// `[X, X]` and `[X^c, X^c]` along the path.
///
/// The jump part is exact. The continuous part is the realized sum of squared
/// diffusive increments, a grid approximation of the true bracket; drift
/// increments contribute nothing.
pub fn quadratic_variation(path: &SamplePath) -> QVSeries {
    let n = path.len();
    let mut total = Vec::with_capacity(n);
    let mut continuous = Vec::with_capacity(n);
    let (mut jump_part, mut cont_part) = (0.0_f64, 0.0_f64);
    for k in 0..n {
        let j = path.jumps[k];
        jump_part += j * j;
        let d = path.diffusive_increment(k);
        cont_part += d * d;
        continuous.push(cont_part);
        total.push(cont_part + jump_part);
    }
    QVSeries { total, continuous }
}

/// Running supremum and infimum series.
#[derive(Debug, Clone, PartialEq)]
pub struct Extrema {
    pub sup: Vec<f64>,
    pub inf: Vec<f64>,
}

pub fn running_extrema(path: &SamplePath) -> Extrema {
    let mut sup = Vec::with_capacity(path.len());
    let mut inf = Vec::with_capacity(path.len());
    let (mut hi, mut lo) = (f64::NEG_INFINITY, f64::INFINITY);
    for &v in &path.values {
        hi = hi.max(v);
        lo = lo.min(v);
        sup.push(hi);
        inf.push(lo);
    }
    Extrema { sup, inf }
}

/// `max - min` of the path over the final `window` time units.
pub fn oscillation(path: &SamplePath, window: f64) -> Result<f64> {
    let start = path.grid.window_start(window)?;
    let tail = &path.values[start..];
    let hi = tail.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let lo = tail.iter().copied().fold(f64::INFINITY, f64::min);
    Ok(hi - lo)
}

/// Pointwise sum of two paths on the same grid.
pub fn add_paths(a: &SamplePath, b: &SamplePath) -> Result<SamplePath> {
    if !Arc::ptr_eq(&a.grid, &b.grid) && a.grid != b.grid {
        return Err(Error::GridMismatch);
    }
    let n = a.len();
    let jumps: Vec<f64> = a.jumps.iter().zip(&b.jumps).map(|(x, y)| x + y).collect();
    let cont = match (&a.cont, &b.cont) {
        (None, None) => None,
        _ => {
            let increments = (0..n).map(|k| a.cont_increment(k) + b.cont_increment(k)).collect();
            let has_diffusion = [&a.cont, &b.cont]
                .iter()
                .any(|c| c.as_ref().is_some_and(|c| c.diffusive.is_some()));
            let diffusive = has_diffusion.then(|| {
                (0..n)
                    .map(|k| a.diffusive_increment(k) + b.diffusive_increment(k))
                    .collect()
            });
            Some(ContinuousPart {
                increments,
                diffusive,
            })
        }
    };
    SamplePath::from_increments(a.grid.clone(), a.values[0] + b.values[0], jumps, cont)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn int_path(jumps: &[f64]) -> SamplePath {
        let grid = Arc::new(TimeGrid::integer(jumps.len()));
        let mut j = vec![0.0];
        j.extend_from_slice(jumps);
        SamplePath::from_jumps(grid, 0.0, j).unwrap()
    }

    #[test]
    fn single_jump_quadratic_variation() {
        let p = int_path(&[2.0]);
        assert_eq!(quadratic_variation(&p).final_total(), 4.0);
    }

    #[test]
    fn alternating_inverse_sqrt_quadratic_variation() {
        let jumps: Vec<f64> = (1..=4).map(|n| (-1f64).powi(n) / (n as f64).sqrt()).collect();
        let qv = quadratic_variation(&int_path(&jumps));
        assert!((qv.final_total() - 25.0 / 12.0).abs() < 1e-14);
        assert!(qv.continuous.iter().all(|&c| c == 0.0));
    }

    #[test]
    fn extrema_of_short_path() {
        let p = int_path(&[1.0, -3.0]);
        assert_eq!(p.values(), &[0.0, 1.0, -2.0]);
        let e = running_extrema(&p);
        assert_eq!(e.sup, vec![0.0, 1.0, 1.0]);
        assert_eq!(e.inf, vec![0.0, 0.0, -2.0]);

        let flat = SamplePath::constant(Arc::new(TimeGrid::integer(5)), 0.0).unwrap();
        let e = running_extrema(&flat);
        assert!(e.sup.iter().chain(&e.inf).all(|&v| v == 0.0));
    }

    #[test]
    fn oscillation_over_final_window() {
        let p = int_path(&[0.5, 0.5, 2.0, -1.0]);
        assert_eq!(&p.values()[2..], &[1.0, 3.0, 2.0]);
        assert_eq!(oscillation(&p, 2.0).unwrap(), 2.0);
        let flat = SamplePath::constant(Arc::new(TimeGrid::integer(10)), 3.0).unwrap();
        assert_eq!(oscillation(&flat, 4.0).unwrap(), 0.0);
        assert!(oscillation(&flat, 0.0).is_err());
        assert!(oscillation(&flat, 11.0).is_err());
    }

    #[test]
    fn adding_zero_is_identity() {
        let p = int_path(&[0.3, -1.2, 4.0]);
        let zero = SamplePath::constant(p.grid().clone(), 0.0).unwrap();
        assert_eq!(add_paths(&p, &zero).unwrap(), p);
    }

    #[test]
    fn grid_mismatch_is_rejected() {
        let a = int_path(&[1.0]);
        let b = int_path(&[1.0, 2.0]);
        assert!(matches!(add_paths(&a, &b), Err(Error::GridMismatch)));
    }

    #[test]
    fn jump_plus_drift_keeps_jumps() {
        let grid = Arc::new(TimeGrid::uniform(0.5, 2.0).unwrap());
        let jumps = SamplePath::from_jumps(grid.clone(), 0.0, vec![0.0, 0.0, 1.5, 0.0, 0.0]).unwrap();
        let drift = SamplePath::from_increments(
            grid,
            0.0,
            vec![0.0; 5],
            Some(ContinuousPart {
                increments: vec![0.0, -0.1, -0.1, -0.1, -0.1],
                diffusive: None,
            }),
        )
        .unwrap();
        let sum = add_paths(&jumps, &drift).unwrap();
        assert_eq!(sum.jumps(), jumps.jumps());
        assert!((sum.final_value() - 1.1).abs() < 1e-15);
        assert_eq!(quadratic_variation(&sum).final_total(), 2.25);
    }

    #[test]
    fn uniform_grid_requires_divisible_horizon() {
        assert!(TimeGrid::uniform(0.3, 1.0).is_err());
        let g = TimeGrid::uniform(0.25, 1.0).unwrap();
        assert_eq!(g.len(), 5);
        assert_eq!(g.index_at_or_before(0.6), 2);
        assert_eq!(g.window_start(0.5).unwrap(), 2);
    }

    #[test]
    fn csv_has_mandatory_header() {
        let mut out = Vec::new();
        int_path(&[2.0]).write_csv(&mut out).unwrap();
        let text = String::from_utf8(out).unwrap();
        assert_eq!(text, "t,X,dX,dXc\n0,0,0,0\n1,2,2,0\n");
    }

    fn jumps_strategy() -> impl Strategy<Value = Vec<f64>> {
        prop::collection::vec(prop_oneof![Just(0.0), -5.0..5.0f64], 1..60)
    }

    proptest! {
        #[test]
        fn values_reconstruct_exactly(jumps in jumps_strategy(), drift in prop::collection::vec(-1.0..1.0f64, 60)) {
            let n = jumps.len();
            let grid = Arc::new(TimeGrid::integer(n));
            let mut j = vec![0.0];
            j.extend_from_slice(&jumps);
            let mut c = vec![0.0];
            c.extend_from_slice(&drift[..n]);
            let p = SamplePath::from_increments(grid, 0.0, j, Some(ContinuousPart { increments: c, diffusive: None })).unwrap();
            for k in 1..p.len() {
                prop_assert_eq!(p.values()[k], p.values()[k - 1] + p.cont_increment(k) + p.jumps()[k]);
            }
        }

        #[test]
        fn extrema_bracket_path(jumps in jumps_strategy()) {
            let p = int_path(&jumps);
            let e = running_extrema(&p);
            for k in 0..p.len() {
                prop_assert!(e.inf[k] <= p.values()[k] && p.values()[k] <= e.sup[k]);
                if k > 0 {
                    prop_assert!(e.sup[k] >= e.sup[k - 1] && e.inf[k] <= e.inf[k - 1]);
                }
            }
        }

        #[test]
        fn qv_additive_for_disjoint_jumps(jumps in jumps_strategy(), mask in prop::collection::vec(any::<bool>(), 60)) {
            let n = jumps.len();
            let a: Vec<f64> = (0..n).map(|k| if mask[k] { jumps[k] } else { 0.0 }).collect();
            let b: Vec<f64> = (0..n).map(|k| if mask[k] { 0.0 } else { jumps[k] }).collect();
            let (pa, pb) = (int_path(&a), int_path(&b));
            let sum = add_paths(&pa, &pb).unwrap();
            let lhs = quadratic_variation(&sum).final_total();
            let rhs = quadratic_variation(&pa).final_total() + quadratic_variation(&pb).final_total();
            prop_assert!((lhs - rhs).abs() <= 1e-12 * rhs.max(1.0));
        }
    }
}
