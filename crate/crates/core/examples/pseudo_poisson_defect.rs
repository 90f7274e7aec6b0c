//! Only convolution semigroups have symbols obeying σ_{s+t} = σ_s σ_t. A
//! Haar-jump process does; a state-dependent shift does not.

use std::sync::Arc;

use feller_symbol::generators::{HaarJump, PseudoPoissonSpec, StateDependentShift};
use feller_symbol::group::GroupKind;
use feller_symbol::quadrature::haar_quadrature;
use feller_symbol::semigroup::{semigroup_defect, SymbolFamily};

fn main() -> feller_symbol::Result<()> {
    let haar = PseudoPoissonSpec::new(1.5, Arc::new(HaarJump::new(haar_quadrature(GroupKind::SU2, 6)?)))?;
    let shift = PseudoPoissonSpec::new(2.0, Arc::new(StateDependentShift::sine(1.0, 1.0)))?;
    for (name, spec) in [("haar jump on SU(2)", haar), ("sine shift on T^1", shift)] {
        let fam = SymbolFamily::pseudo_poisson(&spec, 2);
        let mut defect = 0.0f64;
        let mut noise = 0.0f64;
        for p in fam.irreps() {
            defect = defect.max(semigroup_defect(&fam, 0.3, 0.3, &p)?);
            noise = noise.max(fam.noise_floor(0.6, &p)?);
        }
        println!("{name:<20} defect {defect:.3e}  noise floor {noise:.1e}");
    }
    Ok(())
}
