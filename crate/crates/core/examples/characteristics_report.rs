//! Compensators of the jump measure as tidy CSV on stdout.

use jumpmart::characteristics::{CharacteristicsReport, IntegrandId};
use jumpmart::generators::{catalog, Generator};

fn main() -> jumpmart::Result<()> {
    let gen = Generator::new(catalog::with_horizon(catalog::preset("cox_convergent")?, 20.0)?)?;
    let s = gen.sample(5)?;
    let fs = [IntegrandId::SqCapAbs, IntegrandId::PosTail(1.0), IntegrandId::XMinusLog];
    let report = CharacteristicsReport::build(&gen, &s.path, &s.latent, &fs)?;
    report.write_csv(std::io::stdout().lock())
}
