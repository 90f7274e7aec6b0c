//! Symbols of basic operators, read off from their action on matrix
//! coefficients and compared with the closed forms.

use feller_symbol::group::{GroupKind, LieAlgebraVector};
use feller_symbol::quadrature::haar_quadrature;
use feller_symbol::repr::{irreps_up_to, rep_derivative, IrrepId};
use feller_symbol::symbol::{symbol_from_operator, Laplacian, LeftInvariantField, Symbol};

fn main() -> feller_symbol::Result<()> {
    let kind = GroupKind::SU2;
    let irreps = irreps_up_to(kind, 3);
    let grid = haar_quadrature(kind, 2)?.nodes;

    let x = LieAlgebraVector(vec![0.0, 0.0, 1.0]);
    let field = LeftInvariantField { kind, x: x.clone() };
    let extracted = symbol_from_operator(&field, &irreps, &grid)?;
    let closed = Symbol::left_invariant_field(kind, &x, 3)?;
    println!("X_3: extracted vs closed form {:.2e}", extracted.max_distance(&closed, &grid)?);
    let p = IrrepId::SU2Spin(1);
    println!("dπ(X_3) on spin 1/2:\n{:?}", rep_derivative(&p, &x)?);

    // the Laplacian acts by the Casimir: −j(j+1) on spin j
    let lap = symbol_from_operator(&Laplacian(kind), &irreps, &grid)?;
    for p in &irreps {
        let m = lap.eval(&grid[0], p)?;
        println!("{p}: Laplacian symbol {:+.6} · I", m[(0, 0)].re);
    }
    Ok(())
}
