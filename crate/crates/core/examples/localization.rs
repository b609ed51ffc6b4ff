//! Crossing-time localization of an oscillating walk.

use jumpmart::convergence::crossing_localizer;
use jumpmart::generators::{catalog, Generator};

fn main() -> jumpmart::Result<()> {
    let gen = Generator::new(catalog::preset("rw_osc_harmonic")?)?;
    let s = gen.sample(2)?;
    let levels: Vec<f64> = (1..=8).map(f64::from).collect();
    let r = crossing_localizer(&s.path, &levels)?;
    for ((level, t), b) in r.levels.iter().zip(&r.crossings).zip(&r.bounds) {
        match (t, b) {
            (Some(t), Some(b)) => println!("level {level}: crossed at {t}, |X| <= {b:.6} up to then"),
            _ => println!("level {level}: not reached"),
        }
    }
    println!("dominated: {}, covered: {}", r.dominated, r.coverage);
    Ok(())
}
