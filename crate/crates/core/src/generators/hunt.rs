//! Generators of convolution semigroups (Hunt's formula).

use num_complex::Complex64;

use super::levy::{DiscreteLevy, LevyMeasure, LevyQuadrature};
use crate::error::{Error, Result};
use crate::fourier::BandLimitedFunction;
use crate::group::{CoordinateSystem, GroupElement, GroupKind};
use crate::linalg::{check_psd, ComplexMatrix};
use crate::repr::{basis_derivative, irreps_up_to, rep_matrix, IrrepId};
use crate::symbol::{Operator, Symbol};

/// Drift `b`, diffusion `a` and Lévy measure `ν` of a left-invariant
/// generator
/// `b^i X_i f + a^{ij} X_i X_j f + ∫[f(gτ) − f(g) − x^i(τ) X_i f(g)] ν(dτ)`.
#[derive(Clone, Debug)]
pub struct HuntCharacteristics {
    pub kind: GroupKind,
    pub b: Vec<f64>,
    pub a: Vec<Vec<f64>>,
    pub nu: LevyMeasure,
    pub cs: CoordinateSystem,
}

impl HuntCharacteristics {
    pub fn new(kind: GroupKind, b: Vec<f64>, a: Vec<Vec<f64>>, nu: LevyMeasure) -> Result<Self> {
        let n = kind.dim();
        if b.len() != n || a.len() != n {
            return Err(Error::InvalidArgument(format!(
                "drift/diffusion sized for dimension {} on {kind}",
                b.len()
            )));
        }
        check_psd(&a, 1e-12)?;
        Ok(Self {
            kind,
            b,
            a,
            nu,
            cs: CoordinateSystem::standard(kind),
        })
    }

    pub fn with_coords(mut self, cs: CoordinateSystem) -> Result<Self> {
        if cs.kind != self.kind {
            return Err(Error::KindMismatch {
                left: cs.kind,
                right: self.kind,
            });
        }
        self.cs = cs;
        Ok(self)
    }

    /// `c Δ`.
    pub fn heat(kind: GroupKind, c: f64) -> Result<Self> {
        let n = kind.dim();
        let a = (0..n).map(|i| (0..n).map(|j| if i == j { c } else { 0.0 }).collect()).collect();
        Self::new(kind, vec![0.0; n], a, LevyMeasure::zero())
    }

    pub fn drift(kind: GroupKind, b: Vec<f64>) -> Result<Self> {
        let n = kind.dim();
        Self::new(kind, b, vec![vec![0.0; n]; n], LevyMeasure::zero())
    }

    pub fn pure_jump(kind: GroupKind, nu: LevyMeasure) -> Result<Self> {
        let n = kind.dim();
        Self::new(kind, vec![0.0; n], vec![vec![0.0; n]; n], nu)
    }

    pub fn generator(&self) -> Result<HuntGenerator> {
        self.generator_with(&LevyQuadrature::default())
    }

    pub fn generator_with(&self, q: &LevyQuadrature) -> Result<HuntGenerator> {
        Ok(HuntGenerator {
            ch: self.clone(),
            levy: self.nu.discretize(&self.cs, q)?,
        })
    }

    /// `(c₁ ch₁ + c₂ ch₂)`; Lévy measures must both be atomic.
    pub fn combine(&self, c1: f64, other: &Self, c2: f64) -> Result<Self> {
        let (LevyMeasure::Atomic(x), LevyMeasure::Atomic(y)) = (&self.nu, &other.nu) else {
            return Err(Error::InvalidArgument("only atomic Lévy measures combine".into()));
        };
        let n = self.kind.dim();
        let atoms = x
            .iter()
            .map(|(t, m)| (t.clone(), c1 * m))
            .chain(y.iter().map(|(t, m)| (t.clone(), c2 * m)))
            .collect();
        Self::new(
            self.kind,
            (0..n).map(|i| c1 * self.b[i] + c2 * other.b[i]).collect(),
            (0..n)
                .map(|i| (0..n).map(|j| c1 * self.a[i][j] + c2 * other.a[i][j]).collect())
                .collect(),
            LevyMeasure::atomic(atoms)?,
        )
    }
}

/// The Hunt generator with its Lévy measure discretized.
#[derive(Clone, Debug)]
pub struct HuntGenerator {
    pub ch: HuntCharacteristics,
    pub levy: DiscreteLevy,
}

pub(crate) fn second_order_sum(a: &[Vec<f64>], hess: &[Vec<Complex64>]) -> Complex64 {
    let mut s = Complex64::new(0.0, 0.0);
    for (ai, hi) in a.iter().zip(hess) {
        for (aij, hij) in ai.iter().zip(hi) {
            if *aij != 0.0 {
                s += hij * aij;
            }
        }
    }
    s
}

pub(crate) fn outer_product(x: &[f64]) -> Vec<Vec<f64>> {
    x.iter().map(|a| x.iter().map(|b| a * b).collect()).collect()
}

impl HuntGenerator {
    /// `j(π)`.
    pub fn symbol_matrix(&self, pi: &IrrepId) -> Result<ComplexMatrix> {
        let n = self.ch.kind.dim();
        let d = pi.dim();
        let dp: Vec<ComplexMatrix> = (0..n).map(|k| basis_derivative(pi, k)).collect();
        let mut j = ComplexMatrix::zeros(d, d);
        for i in 0..n {
            j.axpy(Complex64::new(self.ch.b[i], 0.0), &dp[i]);
            for k in 0..n {
                if self.ch.a[i][k] != 0.0 {
                    j.axpy(Complex64::new(self.ch.a[i][k], 0.0), &dp[i].matmul(&dp[k]));
                }
            }
        }
        let id = ComplexMatrix::identity(d);
        for node in &self.levy.nodes {
            if node.inner {
                for i in 0..n {
                    for k in 0..n {
                        let c = 0.5 * node.weight * node.x[i] * node.x[k];
                        if c != 0.0 {
                            j.axpy(Complex64::new(c, 0.0), &dp[i].matmul(&dp[k]));
                        }
                    }
                }
            } else {
                let mut m = &rep_matrix(pi, &node.tau)? - &id;
                for i in 0..n {
                    m.axpy(Complex64::new(-node.x[i], 0.0), &dp[i]);
                }
                j.axpy(Complex64::new(node.weight, 0.0), &m);
            }
        }
        Ok(j)
    }

    pub fn symbol(&self, cutoff: u32) -> Result<Symbol> {
        Symbol::constant_from(self.ch.kind, &irreps_up_to(self.ch.kind, cutoff), |p| self.symbol_matrix(p))
    }
}

impl Operator for HuntGenerator {
    fn kind(&self) -> GroupKind {
        self.ch.kind
    }

    fn apply(&self, f: &BandLimitedFunction, g: &GroupElement) -> Result<Complex64> {
        let grad = f.gradient_at(g)?;
        let hess = f.hessian_at(g)?;
        let fg = f.eval(g)?;
        let mut s = second_order_sum(&self.ch.a, &hess);
        for (bi, gi) in self.ch.b.iter().zip(&grad) {
            s += gi * bi;
        }
        for node in &self.levy.nodes {
            if node.inner {
                s += second_order_sum(&outer_product(&node.x), &hess) * (0.5 * node.weight);
            } else {
                let lin: Complex64 = node.x.iter().zip(&grad).map(|(x, gr)| gr * x).sum();
                s += (f.eval(&g.compose(&node.tau)?)? - fg - lin) * node.weight;
            }
        }
        Ok(s)
    }
}

/// `𝒜f(g)` for real-valued `f`.
pub fn hunt_apply(ch: &HuntCharacteristics, f: &BandLimitedFunction, g: &GroupElement) -> Result<f64> {
    Ok(ch.generator()?.apply(f, g)?.re)
}

/// `j(π) = b^i dπ(X_i) + a^{ij} dπ(X_i)dπ(X_j) + ∫[π(τ) − I − x^i(τ)dπ(X_i)] ν(dτ)`.
pub fn hunt_symbol(ch: &HuntCharacteristics, cutoff: u32) -> Result<Symbol> {
    ch.generator()?.symbol(cutoff)
}
