//! The single-jump intensity construction: jump time from the cumulative
//! hazard, compensating drift before it.

use jumpmart::generators::{catalog, Generator, Latent};

fn main() -> jumpmart::Result<()> {
    let gen = Generator::new(catalog::preset("cox_linear")?)?;
    let mut never = 0usize;
    let trials = 2000u64;
    for seed in 0..trials {
        let s = gen.sample(seed)?;
        let Latent::Cox { rho } = s.latent else { unreachable!() };
        match rho.by(gen.spec().horizon()) {
            Some(t) if seed < 5 => println!("seed {seed}: jump at {t:.3}, X_T = {:.4}", s.path.final_value()),
            None => {
                never += 1;
                if seed < 5 {
                    println!("seed {seed}: no jump, X_T = {:.4}", s.path.final_value());
                }
            }
            _ => {}
        }
    }
    println!(
        "no jump by T in {:.4} of {trials} paths; P(no jump ever) = exp(-1) = {:.4}",
        never as f64 / trials as f64,
        (-1.0f64).exp()
    );
    Ok(())
}
