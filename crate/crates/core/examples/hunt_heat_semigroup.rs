//! The heat semigroup on SU(2) from its Hunt generator: semigroup law,
//! generator recovery by Richardson extrapolation, and the resolvent.

use feller_symbol::generators::HuntCharacteristics;
use feller_symbol::group::GroupKind;
use feller_symbol::repr::IrrepId;
use feller_symbol::semigroup::{
    generator_from_semigroup, resolvent_symbol, semigroup_defect, ResolventQuadrature, Stencil, SymbolFamily,
};

fn main() -> feller_symbol::Result<()> {
    let kind = GroupKind::SU2;
    let gen = HuntCharacteristics::heat(kind, 1.0)?.generator()?;
    let fam = SymbolFamily::matrix_exp(gen.symbol(4)?)?;
    let e = kind.identity();
    let resolvent = resolvent_symbol(&fam, 1.0, ResolventQuadrature::default())?;

    println!("{:>6} {:>12} {:>12} {:>10} {:>12}", "2j", "σ_0.5", "j recovered", "defect", "resolvent");
    for two_j in 0..=4 {
        let p = IrrepId::SU2Spin(two_j);
        let sigma = fam.eval(0.5, &e, &p)?[(0, 0)].re;
        let est = generator_from_semigroup(&fam, &e, &p, 1e-3, Stencil::default())?;
        let defect = semigroup_defect(&fam, 0.2, 0.3, &p)?;
        let r = resolvent.eval(&e, &p)?[(0, 0)].re;
        println!("{two_j:>6} {sigma:>12.8} {:>12.8} {defect:>10.1e} {r:>12.8}", est.j[(0, 0)].re);
    }
    Ok(())
}
