//! A Marcus jump diffusion on SU(2) driven along the left-invariant frame.
//! The Monte Carlo symbol at a short time is compared with e^{t j}.

use feller_symbol::generators::SDESpec;
use feller_symbol::group::GroupKind;
use feller_symbol::linalg::mat_exp;
use feller_symbol::repr::IrrepId;
use feller_symbol::simulate::{empirical_symbol, simulate, ProcessSpec};

fn main() -> feller_symbol::Result<()> {
    let kind = GroupKind::SU2;
    let a = vec![vec![0.4, 0.0, 0.0], vec![0.0, 0.4, 0.0], vec![0.0, 0.0, 0.1]];
    let spec = SDESpec::left_invariant(kind, vec![0.5, 0.0, 0.2], a, vec![(vec![0.0, 1.2, 0.0], 0.7)])?;
    let t = 0.2;
    let p = IrrepId::SU2Spin(1);
    let j = spec.symbol_matrix(&kind.identity(), &p)?;
    let exact = mat_exp(&j.scale_real(t))?;

    let ens = simulate(&ProcessSpec::MarcusSDE(spec), &kind.identity(), t, 40_000, 11, Some(0.002))?;
    let est = empirical_symbol(&ens, &p)?;
    println!("generator symbol on spin 1/2:\n{j:?}");
    println!("e^(tj):\n{exact:?}");
    println!("Monte Carlo:\n{:?}", est.estimate);
    println!(
        "distance {:.2e}, standard-error size {:.2e}",
        est.estimate.frobenius_distance(&exact),
        est.error_norm()
    );
    Ok(())
}
