//! A small seeded experiment: agreement of the bounded-jump events.

use jumpmart::convergence::ProxyParams;
use jumpmart::generators::catalog;
use jumpmart::montecarlo::{run_trials, Analyzer, ExperimentSpec};

fn main() -> jumpmart::Result<()> {
    let spec = ExperimentSpec {
        generator: catalog::preset("rw_bounded_alt_harmonic")?,
        trials: 200,
        base_seed: 1,
        analyzers: vec![Analyzer::Flags, Analyzer::Compensated("SQ_CAP_ABS".parse()?)],
        params: ProxyParams::default(),
    };
    let r = run_trials(&spec, None)?;
    let m = r.agreement(&["e1", "e2", "e3", "e4"])?;
    for (name, est) in m.names.iter().zip(&m.marginals) {
        println!("{name}: {:.3} [{:.3}, {:.3}]", est.p_hat, est.lo, est.hi);
    }
    println!("min pairwise agreement {:.4}", m.min_rate());
    for row in r.summary()? {
        if row.kind == "mean" && row.name.starts_with("compensated") {
            println!("{}: mean {:.4e}, z = {:.2}", row.name, row.estimate, row.z.unwrap_or(f64::NAN));
        }
    }
    println!("spec sha256 {}", spec.hash());
    Ok(())
}
