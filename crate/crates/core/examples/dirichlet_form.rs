//! A symmetric Lévy-type operator in divergence form on SU(2) and its
//! Dirichlet form.

use feller_symbol::dirichlet::{operator_pairing, pairing_rule, SymmetricGenerator};
use feller_symbol::fourier::BandLimitedFunction;
use feller_symbol::generators::{CourregeHuntCharacteristics, JumpIntensity, LevyMeasure};
use feller_symbol::group::{exp_map, GroupKind, LieAlgebraVector};
use feller_symbol::repr::IrrepId;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> feller_symbol::Result<()> {
    let kind = GroupKind::SU2;
    let p = IrrepId::SU2Spin(1);
    // quaternion scalar part, a real band-1 function
    let w = BandLimitedFunction::matrix_coefficient(&p, 0, 0)
        .add(&BandLimitedFunction::matrix_coefficient(&p, 1, 1))
        .scale(0.5);
    let a_ii = BandLimitedFunction::constant(kind, 1.0).add(&w.scale(0.5));
    let zero = BandLimitedFunction::zero(kind);
    let a = (0..3)
        .map(|i| (0..3).map(|j| if i == j { a_ii.clone() } else { zero.clone() }).collect())
        .collect();
    let b = (0..3).map(|i| a_ii.derivative(i).real_part()).collect();
    let tau = exp_map(kind, &LieAlgebraVector(vec![0.0, 0.8, 0.0]))?;
    let rho = LevyMeasure::symmetric_atoms(&[(tau, 0.5)])?;
    let ch = CourregeHuntCharacteristics::new(kind, b, a, rho, JumpIntensity::constant(kind, 1.0))?;

    let sym = SymmetricGenerator::new(&ch)?;
    println!("symmetry residuals {:?}", sym.report.residuals);

    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let q = pairing_rule(&ch, 3, 3)?;
    for _ in 0..4 {
        let f = BandLimitedFunction::random(kind, 3, 0.7, true, &mut rng);
        let energy = sym.dirichlet_form_with(&f, &f, &q)?;
        let pairing = operator_pairing(&sym, &f, &f, &q)?;
        println!("ℰ(f,f) = {energy:.10}   −⟨𝓛f,f⟩ = {:.10}", -pairing);
    }
    Ok(())
}
