//! A Lévy-type operator on the circle with variable coefficients and a
//! state-dependent jump intensity: its adjoint, the duality check and the
//! Sobolev bound.

use feller_symbol::dirichlet::{
    boundedness_ratio, operator_pairing, pairing_rule, sobolev_bound, sobolev_norm, AdjointGenerator,
};
use feller_symbol::fourier::BandLimitedFunction;
use feller_symbol::generators::{CourregeHuntCharacteristics, JumpIntensity, LevyMeasure};
use feller_symbol::group::{GroupElement, GroupKind};
use feller_symbol::repr::IrrepId;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn angle(g: &GroupElement) -> f64 {
    match g {
        GroupElement::Torus(v) => v[0],
        GroupElement::SU2(_) => 0.0,
    }
}

fn main() -> feller_symbol::Result<()> {
    let kind = GroupKind::Torus(1);
    let th = |x: f64| GroupElement::torus(&[x]);
    let ch = CourregeHuntCharacteristics::new(
        kind,
        vec![BandLimitedFunction::torus_trig(0.2, &[0.3], &[])],
        vec![vec![BandLimitedFunction::torus_trig(1.0, &[0.4], &[])]],
        LevyMeasure::atomic(vec![(th(0.6), 0.5), (th(-1.5), 0.3)])?,
        JumpIntensity::general(|g, tau| 1.0 + 0.4 * (angle(g) - angle(tau)).cos()),
    )?;
    let gen = ch.generator()?;
    let adj = AdjointGenerator::new(&ch)?;

    let p = IrrepId::TorusChar(vec![2]);
    println!("symbol at θ = 0, n = 2: {}", gen.symbol_matrix(&th(0.0), &p)?[(0, 0)]);
    println!("adjoint symbol:         {}", adj.symbol_matrix(&th(0.0), &p)?[(0, 0)]);

    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let f = BandLimitedFunction::random(kind, 4, 0.7, true, &mut rng);
    let h = BandLimitedFunction::random(kind, 4, 0.7, true, &mut rng);
    let q = pairing_rule(&ch, 4, 4)?;
    let lhs = operator_pairing(&gen, &f, &h, &q)?;
    let rhs = operator_pairing(&adj, &h, &f, &q)?;
    let scale = sobolev_norm(&f).total * sobolev_norm(&h).total;
    println!("⟨𝓛f,h⟩ = {lhs:.12}, ⟨f,𝓛*h⟩ = {rhs:.12}, scaled gap {:.1e}", (lhs - rhs).abs() / scale);

    let bound = sobolev_bound(&gen)?;
    let family: Vec<_> = (0..20).map(|_| BandLimitedFunction::random(kind, 6, 0.8, true, &mut rng)).collect();
    let report = boundedness_ratio(&ch, &family)?;
    println!("bound terms {:?}", bound.terms);
    println!("sup ‖𝓛f‖₂/|||f|||₂ = {:.4} ≤ C = {:.4}", report.ratio, bound.constant);
    Ok(())
}
