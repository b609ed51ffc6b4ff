//! Verdicts and event flags for one path of each counterexample preset.

use jumpmart::convergence::{EventContext, ProxyParams};
use jumpmart::generators::{catalog, Generator};

fn main() -> jumpmart::Result<()> {
    let names = [
        "rw_inv_sqrt",
        "rw_one",
        "rw_osc_harmonic",
        "rw_exp_inv_sqrt",
        "rw_neg_harmonic",
        "rw_alt_harmonic",
        "rw_bounded_alt_harmonic",
        "cox_linear",
    ];
    println!("{:<26} {:<16} a b c d e f g h", "preset", "verdict");
    for name in names {
        let ctx = EventContext::new(Generator::new(catalog::preset(name)?)?, ProxyParams::default())?;
        let r = ctx.evaluate(&ctx.generator().sample(3)?)?;
        let f = r.flags;
        let bit = |b: bool| if b { '1' } else { '.' };
        println!(
            "{name:<26} {:<16} {} {} {} {} {} {} {} {}",
            r.verdict.label.to_string(),
            bit(f.a),
            bit(f.b),
            bit(f.c),
            bit(f.d),
            bit(f.e),
            bit(f.f),
            bit(f.g),
            bit(f.h)
        );
    }
    Ok(())
}
