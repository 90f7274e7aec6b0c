//! Monte Carlo estimates of the symbol of Brownian motion on the circle and
//! of the generator of a state-dependent jump process.

use std::sync::Arc;

use feller_symbol::generators::{HuntCharacteristics, PseudoPoissonSpec, StateDependentShift};
use feller_symbol::group::{GroupElement, GroupKind};
use feller_symbol::repr::IrrepId;
use feller_symbol::simulate::{empirical_generator, empirical_symbol, simulate, ProcessSpec};
use num_complex::Complex64;

fn main() -> feller_symbol::Result<()> {
    let kind = GroupKind::Torus(1);
    let t = 0.5;
    let bm = ProcessSpec::LevyConvolution(HuntCharacteristics::heat(kind, 0.5)?);
    let ens = simulate(&bm, &kind.identity(), t, 50_000, 1, None)?;
    for n in 1..=4 {
        let s = empirical_symbol(&ens, &IrrepId::TorusChar(vec![n]))?;
        let exact = (-t * f64::from(n * n) / 2.0).exp();
        let z = (s.estimate[(0, 0)].re - exact) / s.std_error[(0, 0)].re;
        println!("n = {n}: {:.5} vs {exact:.5} ({z:+.2} SE)", s.estimate[(0, 0)].re);
    }

    let rate = 2.0;
    let spec = ProcessSpec::PseudoPoisson(PseudoPoissonSpec::new(rate, Arc::new(StateDependentShift::sine(1.0, 1.0)))?);
    let x0 = 0.4;
    let est = empirical_generator(&spec, &GroupElement::torus(&[x0]), &IrrepId::TorusChar(vec![1]), 0.01, 50_000, 2, None, None)?;
    let exact = (Complex64::from_polar(1.0, 1.0 + x0.sin()) - 1.0) * rate;
    println!(
        "generator at θ = {x0}: {:.4} vs {exact:.4}, error bar {:.4} (bias {:.4})",
        est.j[(0, 0)],
        est.error,
        est.bias
    );
    Ok(())
}
