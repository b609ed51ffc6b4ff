//! Samples a few walks with large jumps and prints where they end up.
//!
//! `cargo run --example random_walk_paths -- rw_bounded_alt_harmonic 5`

use jumpmart::generators::{catalog, Generator, Latent};
use jumpmart::path::{quadratic_variation, running_extrema};

fn main() -> jumpmart::Result<()> {
    let mut args = std::env::args().skip(1);
    let name = args.next().unwrap_or_else(|| "rw_bounded_alt_harmonic".into());
    let count: u64 = args.next().and_then(|s| s.parse().ok()).unwrap_or(5);
    let gen = Generator::new(catalog::preset(&name)?)?;
    println!("{name}: {} grid points", gen.grid().len());
    println!("{:>6} {:>14} {:>12} {:>12} {:>12} {:>6}", "seed", "X_N", "inf", "sup", "[X,X]_N", "fired");
    for seed in 0..count {
        let s = gen.sample(seed)?;
        let ext = running_extrema(&s.path);
        let fired = match &s.latent {
            Latent::RandomWalk { fired } => fired.len(),
            _ => 0,
        };
        println!(
            "{seed:>6} {:>14.6} {:>12.4} {:>12.4} {:>12.4} {fired:>6}",
            s.path.final_value(),
            ext.inf.last().unwrap(),
            ext.sup.last().unwrap(),
            quadratic_variation(&s.path).final_total()
        );
    }
    Ok(())
}
