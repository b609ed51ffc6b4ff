//! Named presets, one per example behaviour.
//!
//! Counterexample walks use `p_n = 10⁻³·2⁻ⁿ` so that large moves are rare
//! enough for finite-horizon proxies to reflect the limiting behaviour in
//! nearly every trial.

use super::{
    CoxSpec, CoxVariant, GeneratorSpec, Intensity, JumpSize, OneShotSpec, PRule, RandomWalkSpec, ThetaLaw, XRule,
};
use crate::error::{Error, Result};

/// Preset names with a one-line description.
pub const PRESETS: &[(&str, &str)] = &[
    ("zero", "walk with x_n = 0: the zero path"),
    ("rw_inv_sqrt", "x_n = (-1)^n/sqrt(n), x_1 = 0: converges with infinite quadratic variation"),
    ("rw_one", "x_n = 1: drifts to +infinity"),
    ("rw_osc_harmonic", "|x_n| = 1/n with oscillating partial sums"),
    ("rw_exp_inv_sqrt", "x_n = exp((-1)^n/sqrt(n)) - 1: stochastic exponential converges, X diverges"),
    ("rw_neg_harmonic", "x_n = -1/n: finite quadratic variation yet diverges to -infinity"),
    ("rw_alt_harmonic", "x_n = (-1)^n/n, p_n = 2^-n: converges, not a semimartingale at infinity"),
    ("rw_half", "x_n = -1/2 with the dyadic exponential-moment schedule"),
    ("rw_bounded_alt_harmonic", "x_n = (-1)^n/n, p_n = 1/2: bounded jumps +-1/n"),
    ("rw_bounded_half_alt_harmonic", "x_n = (-1)^n/(2n), p_n = 1/2: bounded jumps above -1"),
    ("rw_compensator", "x_n = (-1)^n/n, p_n = (n+1)^-1.5: compensator checks"),
    ("cox_linear", "lambda = 1/(1+s)^2, gamma = s"),
    ("cox_lil", "lambda = 1/(1+s)^2, gamma = (1+s)^2, plus Brownian motion"),
    ("cox_convergent", "lambda = 1/(1+s)^2, gamma = 1/(1+s)"),
    ("cox_semimartingale", "negated jump -gamma(rho) with gamma = s: a semimartingale"),
    ("brownian", "standard Brownian motion"),
    ("oneshot_discrete", "single jump +-1 with equal probability"),
    ("oneshot_pareto", "single jump E - 1 with E standard exponential: E[e^Theta] = infinity"),
    ("det_alternating", "deterministic alternating harmonic partial sums"),
];

const RARE: PRule = PRule::Geometric { scale: 1e-3, ratio: 0.5 };

fn walk(x: XRule, p: PRule, events: usize) -> GeneratorSpec {
    GeneratorSpec::RandomWalk(RandomWalkSpec { x, p, events })
}

fn cox(gamma: JumpSize, with_bm: bool, variant: CoxVariant) -> GeneratorSpec {
    GeneratorSpec::Cox(CoxSpec {
        lambda: Intensity::InverseSquare,
        gamma,
        step: 0.1,
        horizon: 1000.0,
        with_bm,
        variant,
    })
}

/// Spec of a named preset at its default horizon.
pub fn preset(name: &str) -> Result<GeneratorSpec> {
    const N: usize = 100_000;
    let spec = match name {
        "zero" => walk(XRule::Zero, PRule::Geometric { scale: 1.0, ratio: 0.5 }, 1000),
        "rw_inv_sqrt" => walk(XRule::InvSqrtAlternating { zero_first: true }, RARE, N),
        "rw_one" => walk(XRule::Constant { value: 1.0 }, RARE, N),
        "rw_osc_harmonic" => walk(XRule::OscillatingHarmonic, RARE, N),
        "rw_exp_inv_sqrt" => walk(XRule::ExpInvSqrt, RARE, N),
        "rw_neg_harmonic" => walk(XRule::NegHarmonic, RARE, N),
        "rw_alt_harmonic" => walk(XRule::AltHarmonic { scale: 1.0 }, PRule::Geometric { scale: 1.0, ratio: 0.5 }, N),
        "rw_half" => walk(XRule::Constant { value: -0.5 }, PRule::Schedule { c: 0.5 }, 100),
        "rw_bounded_alt_harmonic" => walk(XRule::AltHarmonic { scale: 1.0 }, PRule::Constant { value: 0.5 }, N),
        "rw_bounded_half_alt_harmonic" => {
            walk(XRule::AltHarmonic { scale: 0.5 }, PRule::Constant { value: 0.5 }, N)
        }
        "rw_compensator" => walk(
            XRule::AltHarmonic { scale: 1.0 },
            PRule::Power {
                scale: 1.0,
                exponent: 1.5,
            },
            1000,
        ),
        "cox_linear" => cox(JumpSize::Identity, false, CoxVariant::Martingale),
        "cox_lil" => cox(JumpSize::OnePlusSquared, true, CoxVariant::Martingale),
        "cox_convergent" => cox(JumpSize::Reciprocal, false, CoxVariant::Martingale),
        "cox_semimartingale" => cox(JumpSize::Identity, false, CoxVariant::NegatedJump),
        "brownian" => GeneratorSpec::Cox(CoxSpec {
            lambda: Intensity::Zero,
            gamma: JumpSize::Identity,
            step: 0.1,
            horizon: 1000.0,
            with_bm: true,
            variant: CoxVariant::Martingale,
        }),
        "oneshot_discrete" => GeneratorSpec::OneShot(OneShotSpec {
            law: ThetaLaw::Discrete { a: 1.0, q: 0.5 },
            events: 1,
        }),
        "oneshot_pareto" => GeneratorSpec::OneShot(OneShotSpec {
            law: ThetaLaw::ParetoExp { alpha: 1.0 },
            events: 1,
        }),
        "det_alternating" => GeneratorSpec::Alternating { events: 10_000 },
        other => {
            let names: Vec<&str> = PRESETS.iter().map(|p| p.0).collect();
            return Err(Error::Config(format!("unknown preset {other:?}; known presets: {}", names.join(", "))));
        }
    };
    Ok(spec)
}

/// Replaces the horizon of a spec (events for integer-time families).
pub fn with_horizon(spec: GeneratorSpec, horizon: f64) -> Result<GeneratorSpec> {
    if !(horizon > 0.0 && horizon.is_finite()) {
        return Err(Error::InvalidSpec(format!("horizon must be positive, got {horizon}")));
    }
    let events = || -> Result<usize> {
        if horizon.fract() != 0.0 {
            return Err(Error::InvalidSpec(format!("integer-time horizon must be whole, got {horizon}")));
        }
        Ok(horizon as usize)
    };
    Ok(match spec {
        GeneratorSpec::RandomWalk(mut w) => {
            w.events = events()?;
            GeneratorSpec::RandomWalk(w)
        }
        GeneratorSpec::Cox(mut c) => {
            c.horizon = horizon;
            GeneratorSpec::Cox(c)
        }
        GeneratorSpec::OneShot(mut o) => {
            o.events = events()?;
            GeneratorSpec::OneShot(o)
        }
        GeneratorSpec::Alternating { .. } => GeneratorSpec::Alternating { events: events()? },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators::Generator;

    #[test]
    fn every_preset_builds() {
        for (name, _) in PRESETS {
            let spec = with_horizon(preset(name).unwrap(), 100.0).unwrap();
            let g = Generator::new(spec).unwrap_or_else(|e| panic!("{name}: {e}"));
            g.sample(1).unwrap();
        }
    }

    #[test]
    fn unknown_preset_is_a_config_error() {
        assert!(matches!(preset("nope"), Err(Error::Config(_))));
    }
}
