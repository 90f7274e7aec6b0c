//! Bochner subordination of the circle heat semigroup by the ½-stable
//! subordinator gives the Cauchy semigroup, with symbol −|n|.

use feller_symbol::generators::{subordinated_symbol, BernsteinFunction, HuntCharacteristics};
use feller_symbol::group::GroupKind;
use feller_symbol::repr::IrrepId;
use feller_symbol::simulate::{empirical_symbol, simulate, ProcessSpec};

fn main() -> feller_symbol::Result<()> {
    let kind = GroupKind::Torus(1);
    let heat = HuntCharacteristics::heat(kind, 1.0)?;
    let h = BernsteinFunction::stable(0.5)?;
    let sym = subordinated_symbol(&heat.generator()?.symbol(5)?, &h)?;

    let t = 0.4;
    let spec = ProcessSpec::LevyConvolution(heat).subordinate(h);
    let ens = simulate(&spec, &kind.identity(), t, 20_000, 3, None)?;
    println!("{:>3} {:>10} {:>12} {:>12} {:>8}", "n", "j^h(n)", "e^(-t|n|)", "simulated", "SE");
    for n in 0..=5 {
        let p = IrrepId::TorusChar(vec![n]);
        let j = sym.eval(&kind.identity(), &p)?[(0, 0)].re;
        let mc = empirical_symbol(&ens, &p)?;
        println!(
            "{n:>3} {j:>10.6} {:>12.6} {:>12.6} {:>8.4}",
            (-t * f64::from(n)).exp(),
            mc.estimate[(0, 0)].re,
            mc.std_error[(0, 0)].re
        );
    }
    Ok(())
}
