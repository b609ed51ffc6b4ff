//! The dyadic firing schedule that keeps exponential moments of Y bounded
//! while X still runs off to minus infinity.

use jumpmart::characteristics::kappa_n;
use jumpmart::generators::DyadicSchedule;

fn main() -> jumpmart::Result<()> {
    let s = DyadicSchedule::new(0.5, 100)?;
    let mut sum = 0.0;
    println!("{:>4} {:>5} {:>12} {:>12} {:>12}", "n", "k_n", "kappa_n", "bound", "2/n^2");
    for n in 1..=s.len() {
        let (k, b) = kappa_n(&s, n);
        sum += k;
        if n <= 10 || n % 10 == 0 {
            println!("{n:>4} {:>5} {k:>12.4e} {b:>12.4e} {:>12.4e}", s.exponent(n), 2.0 / (n * n) as f64);
        }
    }
    println!("sum kappa = {sum:.6}, exp(sum) = {:.6}", sum.exp());
    Ok(())
}
