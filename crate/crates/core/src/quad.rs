//! Numerical integration on the real line.
//!
//! Composite midpoint sums are used where results have to line up with a
//! simulation grid; adaptive Gauss–Kronrod (7/15 points) is used for the
//! deterministic compensator integrals.

use crate::error::{Error, Result};

/// Composite midpoint rule with `steps` equal cells.
pub fn midpoint<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, steps: usize) -> f64 {
    if steps == 0 || b <= a {
        return 0.0;
    }
    let h = (b - a) / steps as f64;
    let mut acc = NeumaierSum::default();
    for k in 0..steps {
        acc.add(f(a + (k as f64 + 0.5) * h));
    }
    acc.value() * h
}

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

fn kronrod<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut k = WGK[7] * fc;
    let mut g = WG[3] * fc;
    for i in 0..7 {
        let dx = h * XGK[i];
        let s = f(c - dx) + f(c + dx);
        k += WGK[i] * s;
        if i % 2 == 1 {
            g += WG[i / 2] * s;
        }
    }
    (k * h, ((k - g) * h).abs())
}

/// Adaptive Gauss–Kronrod integral of `f` over `[a, b]`.
///
/// `breaks` are interior points where `f` may be discontinuous; the interval is
/// split there before adaptation starts.
pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, breaks: &[f64], tol: f64) -> Result<f64> {
    if b <= a {
        return Ok(0.0);
    }
    let mut cuts = vec![a];
    cuts.extend(breaks.iter().copied().filter(|&x| x > a && x < b));
    cuts.push(b);
    cuts.sort_by(f64::total_cmp);
    let mut total = NeumaierSum::default();
    for w in cuts.windows(2) {
        total.add(adapt(&f, w[0], w[1], tol / (cuts.len() - 1) as f64)?);
    }
    Ok(total.value())
}

fn adapt<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, tol: f64) -> Result<f64> {
    const MAX_CELLS: usize = 4000;
    let (v, e) = kronrod(f, a, b);
    let mut cells = vec![(a, b, v, e)];
    loop {
        let (sum, err) = cells
            .iter()
            .fold((0.0, 0.0), |(s, r), c| (s + c.2, r + c.3));
        if !sum.is_finite() {
            return Err(Error::Numeric(format!("integrand not finite on [{a}, {b}]")));
        }
        if err <= tol.max(1e-15 * sum.abs()) {
            let mut acc = NeumaierSum::default();
            for c in &cells {
                acc.add(c.2);
            }
            return Ok(acc.value());
        }
        if cells.len() >= MAX_CELLS {
            return Err(Error::Numeric(format!(
                "quadrature on [{a}, {b}] did not reach tolerance {tol:e} (estimate {err:e})"
            )));
        }
        let worst = cells
            .iter()
            .enumerate()
            .max_by(|x, y| x.1 .3.total_cmp(&y.1 .3))
            .map(|(i, _)| i)
            .expect("at least one cell");
        let (lo, hi, _, _) = cells.swap_remove(worst);
        let mid = 0.5 * (lo + hi);
        let (v1, e1) = kronrod(f, lo, mid);
        let (v2, e2) = kronrod(f, mid, hi);
        cells.push((lo, mid, v1, e1));
        cells.push((mid, hi, v2, e2));
    }
}

/// Integral of `f` over `[a, ∞)` via the substitution `s = a + u/(1-u)`.
pub fn integrate_to_infinity<F: Fn(f64) -> f64>(f: F, a: f64, breaks: &[f64], tol: f64) -> Result<f64> {
    let g = |u: f64| {
        if u >= 1.0 {
            return 0.0;
        }
        let one_minus = 1.0 - u;
        let s = a + u / one_minus;
        let v = f(s) / (one_minus * one_minus);
        if v.is_finite() {
            v
        } else {
            0.0
        }
    };
    let ubreaks: Vec<f64> = breaks
        .iter()
        .filter(|&&x| x > a)
        .map(|&x| (x - a) / (1.0 + x - a))
        .collect();
    integrate(g, 0.0, 1.0, &ubreaks, tol)
}

/// Compensated (Neumaier) summation.
#[derive(Debug, Default, Clone, Copy)]
pub struct NeumaierSum {
    sum: f64,
    comp: f64,
}

impl NeumaierSum {
    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polynomial_is_exact() {
        let v = integrate(|x| x * x * x - 2.0 * x, 0.0, 3.0, &[], 1e-13).unwrap();
        assert!((v - (81.0 / 4.0 - 9.0)).abs() < 1e-12);
    }

    #[test]
    fn breakpoints_handle_indicators() {
        let v = integrate(|x| if x > 1.0 { x } else { 0.0 }, 0.0, 2.0, &[1.0], 1e-12).unwrap();
        assert!((v - 1.5).abs() < 1e-12);
    }

    #[test]
    fn inverse_square_tail() {
        let v = integrate_to_infinity(|s| 1.0 / ((1.0 + s) * (1.0 + s)), 0.0, &[], 1e-12).unwrap();
        assert!((v - 1.0).abs() < 1e-10);
    }

    #[test]
    fn midpoint_converges_quadratically() {
        let exact = 1.0 - (-1.0f64).exp();
        let coarse = (midpoint(|x| (-x).exp(), 0.0, 1.0, 10) - exact).abs();
        let fine = (midpoint(|x| (-x).exp(), 0.0, 1.0, 100) - exact).abs();
        assert!(fine < coarse / 90.0);
    }

    #[test]
    fn compensated_sum_recovers_small_terms() {
        let mut s = NeumaierSum::default();
        s.add(1e16);
        s.add(1.0);
        s.add(-1e16);
        assert_eq!(s.value(), 1.0);
    }
}
