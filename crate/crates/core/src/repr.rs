//! Irreducible unitary representations of `T^d` and `SU(2)`.
//!
//! Spin-`j` representations act on the basis `|j, m⟩`, `m = j, j-1, …, -j`
//! (row/column index `a` ↔ `m = j - a`). The derived representation is
//! `dπ(X_1) = iJ_x`, `dπ(X_2) = -iJ_y`, `dπ(X_3) = iJ_z` with the usual
//! angular-momentum matrices, so `dπ(X_3) = i·diag(j, …, -j)` and the
//! brackets match `[X_1, X_2] = X_3`. For `2j = 1` this is the defining
//! representation `i ↦ iσ_1`, `j ↦ -iσ_2`, `k ↦ iσ_3`.

use std::fmt;
use std::sync::OnceLock;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::group::{GroupElement, GroupKind, LieAlgebraVector};
use crate::linalg::ComplexMatrix;

/// Largest spin label supported by the Wigner sum formula.
pub const MAX_TWO_J: u32 = 60;

/// Label of an irreducible representation.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum IrrepId {
    TorusChar(Vec<i32>),
    SU2Spin(u32),
}

impl IrrepId {
    pub fn trivial(kind: GroupKind) -> Self {
        match kind {
            GroupKind::Torus(d) => IrrepId::TorusChar(vec![0; d]),
            GroupKind::SU2 => IrrepId::SU2Spin(0),
        }
    }

    pub fn kind(&self) -> GroupKind {
        match self {
            IrrepId::TorusChar(n) => GroupKind::Torus(n.len()),
            IrrepId::SU2Spin(_) => GroupKind::SU2,
        }
    }

    pub fn dim(&self) -> usize {
        match self {
            IrrepId::TorusChar(_) => 1,
            IrrepId::SU2Spin(two_j) => *two_j as usize + 1,
        }
    }

    pub fn is_trivial(&self) -> bool {
        match self {
            IrrepId::TorusChar(n) => n.iter().all(|&k| k == 0),
            IrrepId::SU2Spin(two_j) => *two_j == 0,
        }
    }

    /// Band label: `max |n_i|` or `2j`.
    pub fn band(&self) -> u32 {
        match self {
            IrrepId::TorusChar(n) => n.iter().map(|k| k.unsigned_abs()).max().unwrap_or(0),
            IrrepId::SU2Spin(two_j) => *two_j,
        }
    }

    /// Eigenvalue of `-Σ_k dπ(X_k)²`.
    pub fn casimir(&self) -> f64 {
        match self {
            IrrepId::TorusChar(n) => n.iter().map(|&k| (k as f64).powi(2)).sum(),
            IrrepId::SU2Spin(two_j) => {
                let j = *two_j as f64 / 2.0;
                j * (j + 1.0)
            }
        }
    }

    /// Complex-conjugate representation (torus only has a distinct one).
    pub fn conjugate(&self) -> Self {
        match self {
            IrrepId::TorusChar(n) => IrrepId::TorusChar(n.iter().map(|k| -k).collect()),
            IrrepId::SU2Spin(_) => self.clone(),
        }
    }

    /// Stable text key, e.g. `torus:n=-2` or `su2:twoJ=3`.
    pub fn key(&self) -> String {
        match self {
            IrrepId::TorusChar(n) => {
                let parts: Vec<String> = n.iter().map(|k| k.to_string()).collect();
                format!("torus:n={}", parts.join(","))
            }
            IrrepId::SU2Spin(two_j) => format!("su2:twoJ={two_j}"),
        }
    }

    fn check_kind(&self, kind: GroupKind) -> Result<()> {
        if self.kind() != kind {
            return Err(Error::KindMismatch {
                left: self.kind(),
                right: kind,
            });
        }
        Ok(())
    }
}

impl fmt::Display for IrrepId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.key())
    }
}

/// All irreps with band label `≤ cutoff`, in a fixed order.
pub fn irreps_up_to(kind: GroupKind, cutoff: u32) -> Vec<IrrepId> {
    match kind {
        GroupKind::SU2 => (0..=cutoff).map(IrrepId::SU2Spin).collect(),
        GroupKind::Torus(d) => {
            let c = cutoff as i32;
            let width = (2 * c + 1) as usize;
            let total = width.pow(d as u32);
            (0..total)
                .map(|flat| {
                    let mut idx = flat;
                    let mut n = vec![0i32; d];
                    for slot in n.iter_mut() {
                        *slot = (idx % width) as i32 - c;
                        idx /= width;
                    }
                    n.reverse();
                    IrrepId::TorusChar(n)
                })
                .collect()
        }
    }
}

fn factorials() -> &'static [f64] {
    static TABLE: OnceLock<Vec<f64>> = OnceLock::new();
    TABLE.get_or_init(|| {
        let mut t = vec![1.0f64; 171];
        for k in 1..171 {
            t[k] = t[k - 1] * k as f64;
        }
        t
    })
}

/// Wigner small-d matrix `⟨j m'| exp(-iβ J_y) |j m⟩`, indices `a, b` with
/// `m' = j - a`, `m = j - b`.
pub fn wigner_small_d(two_j: u32, beta: f64) -> ComplexMatrix {
    let f = factorials();
    let tj = two_j as i64;
    let d = two_j as usize + 1;
    let (c, s) = ((beta / 2.0).cos(), (beta / 2.0).sin());
    ComplexMatrix::from_fn(d, d, |a, b| {
        let (a, b) = (a as i64, b as i64);
        let pre = (f[(tj - a) as usize] * f[a as usize] * f[(tj - b) as usize] * f[b as usize]).sqrt();
        let kmin = 0.max(a - b);
        let kmax = (tj - b).min(a);
        let mut sum = 0.0;
        for k in kmin..=kmax {
            let sign = if (k - (a - b)).rem_euclid(2) == 0 { 1.0 } else { -1.0 };
            let den = f[(tj - b - k) as usize] * f[k as usize] * f[(a - k) as usize] * f[(k - a + b) as usize];
            let pc = (tj - 2 * k + a - b) as i32;
            let ps = (2 * k - a + b) as i32;
            sum += sign * c.powi(pc) * s.powi(ps) / den;
        }
        Complex64::new(pre * sum, 0.0)
    })
}

/// `π(g)` for the given irrep.
pub fn rep_matrix(pi: &IrrepId, g: &GroupElement) -> Result<ComplexMatrix> {
    pi.check_kind(g.kind())?;
    match (pi, g) {
        (IrrepId::TorusChar(n), GroupElement::Torus(theta)) => {
            let phase: f64 = n.iter().zip(theta).map(|(&k, t)| k as f64 * t).sum();
            Ok(ComplexMatrix::scalar(Complex64::from_polar(1.0, phase)))
        }
        (IrrepId::SU2Spin(two_j), GroupElement::SU2(_)) => {
            if *two_j > MAX_TWO_J {
                return Err(Error::InvalidArgument(format!(
                    "spin label 2j = {two_j} exceeds {MAX_TWO_J}"
                )));
            }
            let (alpha, beta, gamma) = g.euler_zyz().expect("su2 element");
            let mut m = wigner_small_d(*two_j, beta);
            let j = *two_j as f64 / 2.0;
            let d = m.rows();
            let left: Vec<Complex64> = (0..d).map(|a| Complex64::from_polar(1.0, (j - a as f64) * alpha)).collect();
            let right: Vec<Complex64> = (0..d).map(|b| Complex64::from_polar(1.0, (j - b as f64) * gamma)).collect();
            for a in 0..d {
                for b in 0..d {
                    m[(a, b)] = left[a] * m[(a, b)] * right[b];
                }
            }
            Ok(m)
        }
        _ => unreachable!("kinds checked above"),
    }
}

/// `dπ(X_k)` for the `k`-th basis vector.
pub fn basis_derivative(pi: &IrrepId, k: usize) -> ComplexMatrix {
    match pi {
        IrrepId::TorusChar(n) => ComplexMatrix::scalar(Complex64::new(0.0, n[k] as f64)),
        IrrepId::SU2Spin(two_j) => spin_generators(*two_j)[k].clone(),
    }
}

/// `[dπ(X_1), dπ(X_2), dπ(X_3)]` for spin `2j`.
pub fn spin_generators(two_j: u32) -> [ComplexMatrix; 3] {
    let d = two_j as usize + 1;
    let j = two_j as f64 / 2.0;
    let m = |a: usize| j - a as f64;
    // J_+ maps |m⟩ (column a) to |m+1⟩ (row a-1)
    let jp = ComplexMatrix::from_fn(d, d, |r, c| {
        if c >= 1 && r == c - 1 {
            let mm = m(c);
            Complex64::new((j * (j + 1.0) - mm * (mm + 1.0)).sqrt(), 0.0)
        } else {
            Complex64::new(0.0, 0.0)
        }
    });
    let jm = jp.adjoint();
    let i = Complex64::new(0.0, 1.0);
    let jx = (&jp + &jm).scale_real(0.5);
    let x1 = jx.scale(i);
    let x2 = (&jm - &jp).scale_real(0.5);
    let x3 = ComplexMatrix::from_diag(&(0..d).map(|a| Complex64::new(0.0, m(a))).collect::<Vec<_>>());
    [x1, x2, x3]
}

/// `dπ(X) = Σ_k X^k dπ(X_k)`.
pub fn rep_derivative(pi: &IrrepId, x: &LieAlgebraVector) -> Result<ComplexMatrix> {
    let kind = pi.kind();
    if x.dim() != kind.dim() {
        return Err(Error::InvalidArgument(format!(
            "Lie algebra vector of length {} for {kind}",
            x.dim()
        )));
    }
    let d = pi.dim();
    let mut out = ComplexMatrix::zeros(d, d);
    for (k, &c) in x.0.iter().enumerate() {
        if c != 0.0 {
            out.axpy(Complex64::new(c, 0.0), &basis_derivative(pi, k));
        }
    }
    Ok(out)
}

/// An irrep with its derived-representation matrices cached.
#[derive(Clone, Debug)]
pub struct Irrep {
    pub id: IrrepId,
    generators: Vec<ComplexMatrix>,
}

impl Irrep {
    pub fn new(id: IrrepId) -> Self {
        let n = id.kind().dim();
        let generators = (0..n).map(|k| basis_derivative(&id, k)).collect();
        Self { id, generators }
    }

    pub fn dim(&self) -> usize {
        self.id.dim()
    }

    pub fn matrix(&self, g: &GroupElement) -> Result<ComplexMatrix> {
        rep_matrix(&self.id, g)
    }

    /// `dπ(X_k)`.
    pub fn generator(&self, k: usize) -> &ComplexMatrix {
        &self.generators[k]
    }

    pub fn generators(&self) -> &[ComplexMatrix] {
        &self.generators
    }

    pub fn derivative(&self, x: &LieAlgebraVector) -> Result<ComplexMatrix> {
        rep_derivative(&self.id, x)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::exp_map;
    use crate::linalg::mat_exp;
    use crate::quadrature::haar_quadrature;
    use proptest::prelude::*;
    use std::f64::consts::PI;

    fn arb_su2() -> impl Strategy<Value = GroupElement> {
        (-1.0..1.0f64, -1.0..1.0f64, -1.0..1.0f64, -1.0..1.0f64)
            .prop_filter("nonzero", |(a, b, c, d)| a * a + b * b + c * c + d * d > 1e-3)
            .prop_map(|(a, b, c, d)| GroupElement::su2(a, b, c, d))
    }

    /// Central difference of `u ↦ π(exp(uX))` at 0.
    fn fd_derivative(pi: &IrrepId, x: &LieAlgebraVector) -> ComplexMatrix {
        let h = 1e-5;
        let kind = pi.kind();
        let p = rep_matrix(pi, &exp_map(kind, &x.scale(h)).unwrap()).unwrap();
        let m = rep_matrix(pi, &exp_map(kind, &x.scale(-h)).unwrap()).unwrap();
        (&p - &m).scale_real(1.0 / (2.0 * h))
    }

    #[test]
    fn enumeration() {
        let t = irreps_up_to(GroupKind::Torus(1), 2);
        let labels: Vec<i32> = t
            .iter()
            .map(|p| match p {
                IrrepId::TorusChar(n) => n[0],
                _ => unreachable!(),
            })
            .collect();
        assert_eq!(labels, vec![-2, -1, 0, 1, 2]);
        assert_eq!(
            irreps_up_to(GroupKind::SU2, 2),
            vec![IrrepId::SU2Spin(0), IrrepId::SU2Spin(1), IrrepId::SU2Spin(2)]
        );
        assert_eq!(irreps_up_to(GroupKind::SU2, 0), vec![IrrepId::SU2Spin(0)]);
        assert_eq!(irreps_up_to(GroupKind::Torus(2), 1).len(), 9);
    }

    #[test]
    fn torus_character() {
        let m = rep_matrix(&IrrepId::TorusChar(vec![2]), &GroupElement::torus(&[PI])).unwrap();
        assert!((m[(0, 0)] - Complex64::new(1.0, 0.0)).norm() < 1e-14);
        assert_eq!(
            basis_derivative(&IrrepId::TorusChar(vec![3]), 0)[(0, 0)],
            Complex64::new(0.0, 3.0)
        );
    }

    #[test]
    fn spin_half_is_defining_rep() {
        let g = GroupElement::su2(0.3, -0.5, 0.7, 0.2);
        let GroupElement::SU2([w, x, y, z]) = g else { unreachable!() };
        let expect = ComplexMatrix::from_rows(&[
            vec![Complex64::new(w, z), Complex64::new(-y, x)],
            vec![Complex64::new(y, x), Complex64::new(w, -z)],
        ]);
        let m = rep_matrix(&IrrepId::SU2Spin(1), &g).unwrap();
        assert!(m.max_abs_diff(&expect) < 1e-14);
    }

    #[test]
    fn spin_one_small_d_matches_exponential() {
        let beta = 1.1;
        let pi = IrrepId::SU2Spin(2);
        let g = exp_map(GroupKind::SU2, &LieAlgebraVector(vec![0.0, beta, 0.0])).unwrap();
        let oracle = mat_exp(&fd_derivative(&pi, &LieAlgebraVector::basis(3, 1)).scale_real(beta)).unwrap();
        let m = rep_matrix(&pi, &g).unwrap();
        assert!(m.max_abs_diff(&oracle) < 1e-9);
        assert!(m.as_slice().iter().all(|z| z.im.abs() < 1e-14));
    }

    #[test]
    fn derivatives_match_finite_differences() {
        for two_j in 0..6 {
            let pi = IrrepId::SU2Spin(two_j);
            for k in 0..3 {
                let fd = fd_derivative(&pi, &LieAlgebraVector::basis(3, k));
                assert!(fd.max_abs_diff(&basis_derivative(&pi, k)) < 1e-8);
            }
        }
        let half = spin_generators(1);
        let i = Complex64::new(0.0, 0.5);
        assert!(half[0].max_abs_diff(&ComplexMatrix::from_rows(&[vec![0.0.into(), i], vec![i, 0.0.into()]])) < 1e-15);
        assert!(half[2].max_abs_diff(&ComplexMatrix::from_diag(&[i, -i])) < 1e-15);
    }

    #[test]
    fn casimir_from_finite_differences() {
        for two_j in 0..7 {
            let pi = IrrepId::SU2Spin(two_j);
            let d = pi.dim();
            let mut cas = ComplexMatrix::zeros(d, d);
            for k in 0..3 {
                let x = fd_derivative(&pi, &LieAlgebraVector::basis(3, k));
                cas += &x.matmul(&x);
            }
            let expect = ComplexMatrix::identity(d).scale_real(-pi.casimir());
            assert!(cas.max_abs_diff(&expect) < 1e-7);
        }
        let pi = IrrepId::TorusChar(vec![2, -3]);
        let cas: Complex64 = (0..2).map(|k| basis_derivative(&pi, k)[(0, 0)].powi(2)).sum();
        assert!((cas.re + 13.0).abs() < 1e-14);
    }

    #[test]
    fn generators_are_skew_and_bracket_correctly() {
        for two_j in 0..9 {
            let [x1, x2, x3] = spin_generators(two_j);
            for x in [&x1, &x2, &x3] {
                assert!(x.is_skew_hermitian(1e-11));
            }
            assert!(x1.commutator(&x2).max_abs_diff(&x3) < 1e-9);
            assert!(x2.commutator(&x3).max_abs_diff(&x1) < 1e-9);
            assert!(x3.commutator(&x1).max_abs_diff(&x2) < 1e-9);
        }
    }

    #[test]
    fn schur_orthogonality() {
        let cutoff = 4;
        let q = haar_quadrature(GroupKind::SU2, QuadRes::for_pairs(cutoff)).unwrap();
        let ids = irreps_up_to(GroupKind::SU2, cutoff);
        let mats: Vec<Vec<ComplexMatrix>> = q
            .nodes
            .iter()
            .map(|g| ids.iter().map(|p| rep_matrix(p, g).unwrap()).collect())
            .collect();
        let mut worst = 0.0f64;
        for (p1, id1) in ids.iter().enumerate() {
            for (p2, id2) in ids.iter().enumerate() {
                let (d1, d2) = (id1.dim(), id2.dim());
                for i in 0..d1 {
                    for j in 0..d1 {
                        for k in 0..d2 {
                            for l in 0..d2 {
                                let s: Complex64 = q
                                    .weights
                                    .iter()
                                    .zip(&mats)
                                    .map(|(w, m)| m[p1][(i, j)] * m[p2][(k, l)].conj() * *w)
                                    .sum();
                                let expect = if p1 == p2 && i == k && j == l { 1.0 } else { 0.0 };
                                worst = worst.max((s * d1 as f64 - expect).norm());
                            }
                        }
                    }
                }
            }
        }
        assert!(worst < 1e-9, "Schur residual {worst}");
    }

    struct QuadRes;
    impl QuadRes {
        fn for_pairs(cutoff: u32) -> u32 {
            crate::quadrature::QuadratureRule::resolution_for_band(GroupKind::SU2, 2 * cutoff)
        }
    }

    proptest! {
        #[test]
        fn homomorphism_and_unitarity(g in arb_su2(), h in arb_su2(), two_j in 0u32..9) {
            let pi = IrrepId::SU2Spin(two_j);
            let pg = rep_matrix(&pi, &g).unwrap();
            let ph = rep_matrix(&pi, &h).unwrap();
            let pgh = rep_matrix(&pi, &g.compose(&h).unwrap()).unwrap();
            prop_assert!(pg.is_unitary(1e-11));
            prop_assert!(pgh.max_abs_diff(&pg.matmul(&ph)) < 1e-10);
            let pinv = rep_matrix(&pi, &g.inverse()).unwrap();
            prop_assert!(pinv.max_abs_diff(&pg.adjoint()) < 1e-11);
        }
    }
}
