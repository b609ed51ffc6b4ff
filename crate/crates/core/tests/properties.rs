//! Invariants over randomly drawn walks, seeds and counts.

use jumpmart::characteristics::{compensator_series, IntegrandId};
use jumpmart::convergence::{classify_series, crossing_localizer, Label};
use jumpmart::generators::{Generator, GeneratorSpec, Latent, PRule, RandomWalkSpec, XRule};
use jumpmart::montecarlo::McEstimate;
use jumpmart::path::quadratic_variation;
use jumpmart::transforms::{check_exp_identity, delta_y_error, stochastic_exponential, TransformBundle};
use proptest::prelude::*;

fn walk(xs: Vec<f64>, ps: Vec<f64>) -> Generator {
    let events = xs.len();
    Generator::new(GeneratorSpec::RandomWalk(RandomWalkSpec {
        x: XRule::Explicit { values: xs },
        p: PRule::Explicit { values: ps },
        events,
    }))
    .expect("valid walk")
}

fn steps() -> impl Strategy<Value = (Vec<f64>, Vec<f64>)> {
    (1usize..60).prop_flat_map(|n| {
        (
            prop::collection::vec(-0.9f64..0.9, n),
            prop::collection::vec(0.01f64..0.99, n),
        )
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn exponential_identity_on_random_walks((xs, ps) in steps(), seed in any::<u64>()) {
        let g = walk(xs, ps);
        let s = g.sample(seed).unwrap();
        let b = TransformBundle::build(&g, &s.path, &s.latent).unwrap();
        prop_assert!(check_exp_identity(&b) <= 1e-9);
        prop_assert!(delta_y_error(&g, &s.path, &s.latent, &b).unwrap() <= 1e-12);
    }

    #[test]
    fn sign_flips_once_per_jump_below_minus_one((xs, ps) in steps(), seed in any::<u64>()) {
        let g = walk(xs, ps);
        let s = g.sample(seed).unwrap();
        let jumps = s.path.jumps();
        prop_assume!(jumps.iter().all(|j| *j != -1.0));
        let e = stochastic_exponential(&s.path);
        prop_assert_eq!(e.sign_changes(), jumps.iter().filter(|j| **j < -1.0).count());
    }

    #[test]
    fn walk_steps_have_mean_zero((xs, ps) in steps()) {
        let events = xs.len();
        for n in 1..=events {
            let (x, p) = (xs[n - 1], ps[n - 1]);
            let y = x * (1.0 - 1.0 / p);
            prop_assert!(((1.0 - p) * x + p * y).abs() <= 1e-12 * (1.0 + x.abs() / p));
        }
    }

    #[test]
    fn quadratic_variation_is_the_running_sum_of_squares((xs, ps) in steps(), seed in any::<u64>()) {
        let g = walk(xs, ps);
        let s = g.sample(seed).unwrap();
        let qv = quadratic_variation(&s.path);
        let mut acc = 0.0;
        for (k, j) in s.path.jumps().iter().enumerate() {
            acc += j * j;
            prop_assert!((qv.total[k] - acc).abs() <= 1e-12 * acc.max(1.0));
        }
        prop_assert!(qv.total.windows(2).all(|w| w[1] >= w[0]));
    }

    #[test]
    fn nonnegative_compensators_never_decrease((xs, ps) in steps()) {
        let g = walk(xs, ps);
        for f in [IntegrandId::SqCapAbs, IntegrandId::SqCapOne, IntegrandId::Square, IntegrandId::AbsTail] {
            let c = compensator_series(&g, f, &Latent::None).unwrap();
            prop_assert!(c.windows(2).all(|w| w[1] >= w[0]), "{f}");
        }
    }

    #[test]
    fn samples_replay_from_their_seed((xs, ps) in steps(), seed in any::<u64>()) {
        let g = walk(xs, ps);
        prop_assert_eq!(g.sample(seed).unwrap(), g.sample(seed).unwrap());
    }

    #[test]
    fn localizer_dominates_on_every_walk((xs, ps) in steps(), seed in any::<u64>()) {
        let g = walk(xs, ps);
        let s = g.sample(seed).unwrap();
        let levels: Vec<f64> = (1..=5).map(f64::from).collect();
        prop_assert!(crossing_localizer(&s.path, &levels).unwrap().dominated);
    }

    #[test]
    fn wilson_interval_is_ordered(n in 1usize..5000, frac in 0.0f64..=1.0) {
        let k = ((n as f64) * frac).round() as usize;
        let m = McEstimate::wilson(k, n).unwrap();
        prop_assert!(0.0 <= m.lo && m.lo <= m.p_hat && m.p_hat <= m.hi && m.hi <= 1.0);
    }

    #[test]
    fn constant_series_converge_to_their_value(v in -1e3f64..1e3, len in 10usize..200) {
        let times: Vec<f64> = (0..len).map(|i| i as f64).collect();
        let values = vec![v; len];
        let verdict = classify_series(&times, &values, 0.1, 5e-3, 5e3).unwrap();
        prop_assert_eq!(verdict.label, Label::Converged);
        prop_assert_eq!(verdict.limit(), Some(v));
    }
}
