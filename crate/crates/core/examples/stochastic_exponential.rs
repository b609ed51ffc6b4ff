//! E(X) = exp(Y - V) along one path, and where the identity is checked.

use jumpmart::generators::{catalog, Generator};
use jumpmart::transforms::{check_exp_identity, TransformBundle};

fn main() -> jumpmart::Result<()> {
    for name in ["rw_bounded_half_alt_harmonic", "cox_convergent", "oneshot_pareto", "rw_exp_inv_sqrt"] {
        let gen = Generator::new(catalog::preset(name)?)?;
        let s = gen.sample(11)?;
        let b = TransformBundle::build(&gen, &s.path, &s.latent)?;
        let n = b.valid_len();
        let y = b.y.as_ref().map(|y| y[n - 1]);
        let v = b.v.as_ref().map(|v| v[n - 1]);
        println!(
            "{name:<30} valid to t = {:<8} E = {:<12.6e} Y = {:<12.6} V = {:<12.6} max rel err {:.1e}",
            b.times[n - 1],
            b.exponential.value(n - 1),
            y.unwrap_or(f64::NAN),
            v.unwrap_or(f64::NAN),
            check_exp_identity(&b)
        );
    }
    Ok(())
}
