//! Peter–Weyl Fourier analysis.
//!
//! Functions use `f̂(π) = ∫ π(g⁻¹) f(g) dg` with inversion
//! `f(g) = Σ_π d_π tr(f̂(π) π(g))`. Measures use the opposite convention,
//! `μ̂(π) = ∫ π(g) μ(dg)`, so that `(μ * ν)^ = μ̂ ν̂`.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use num_complex::Complex64;
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::group::{GroupElement, GroupKind};
use crate::linalg::ComplexMatrix;
use crate::quadrature::QuadratureRule;
use crate::repr::{basis_derivative, irreps_up_to, rep_matrix, wigner_small_d, IrrepId};

pub const DEFAULT_TORUS_CUTOFF: u32 = 16;
pub const DEFAULT_SU2_CUTOFF: u32 = 8;

pub fn default_cutoff(kind: GroupKind) -> u32 {
    match kind {
        GroupKind::Torus(_) => DEFAULT_TORUS_CUTOFF,
        GroupKind::SU2 => DEFAULT_SU2_CUTOFF,
    }
}

/// `tr(A B)` without forming the product.
#[inline]
pub(crate) fn trace_of_product(a: &ComplexMatrix, b: &ComplexMatrix) -> Complex64 {
    let n = a.rows();
    let mut s = Complex64::new(0.0, 0.0);
    for i in 0..n {
        for j in 0..a.cols() {
            s += a[(i, j)] * b[(j, i)];
        }
    }
    s
}

/// Coefficient matrices `f̂(π)` for every irrep up to a cutoff.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct FourierCoeffs {
    pub kind: GroupKind,
    pub cutoff: u32,
    pub coeffs: BTreeMap<IrrepId, ComplexMatrix>,
    /// False when the quadrature band could not guarantee alias-free
    /// coefficients; values are then only approximate.
    pub exact: bool,
}

impl FourierCoeffs {
    pub fn zeros(kind: GroupKind, cutoff: u32) -> Self {
        let coeffs = irreps_up_to(kind, cutoff)
            .into_iter()
            .map(|p| {
                let d = p.dim();
                (p, ComplexMatrix::zeros(d, d))
            })
            .collect();
        Self {
            kind,
            cutoff,
            coeffs,
            exact: true,
        }
    }

    pub fn get(&self, pi: &IrrepId) -> Option<&ComplexMatrix> {
        self.coeffs.get(pi)
    }

    pub fn get_mut(&mut self, pi: &IrrepId) -> Option<&mut ComplexMatrix> {
        self.coeffs.get_mut(pi)
    }

    pub fn irreps(&self) -> impl Iterator<Item = &IrrepId> {
        self.coeffs.keys()
    }

    /// Largest band label carrying a nonzero coefficient.
    pub fn effective_band(&self) -> u32 {
        self.coeffs
            .iter()
            .filter(|(_, m)| m.max_abs() > 0.0)
            .map(|(p, _)| p.band())
            .max()
            .unwrap_or(0)
    }

    pub fn map<F: FnMut(&IrrepId, &ComplexMatrix) -> ComplexMatrix>(&self, mut f: F) -> Self {
        Self {
            kind: self.kind,
            cutoff: self.cutoff,
            coeffs: self.coeffs.iter().map(|(p, m)| (p.clone(), f(p, m))).collect(),
            exact: self.exact,
        }
    }
}

/// `f̂(π) = Σ_k w_k π(g_k⁻¹) f(g_k)` for all `π` up to `cutoff`.
///
/// `f_band` is the band of `f` when known; the coefficients are flagged
/// inexact when the rule cannot integrate `π ⊗ f` exactly.
pub fn fourier_transform<F>(
    f: F,
    quad: &QuadratureRule,
    cutoff: u32,
    f_band: Option<u32>,
) -> Result<FourierCoeffs>
where
    F: Fn(&GroupElement) -> Complex64,
{
    let mut out = FourierCoeffs::zeros(quad.kind, cutoff);
    out.exact = match f_band {
        Some(b) => quad.band >= cutoff + b,
        None => false,
    };
    let ids: Vec<IrrepId> = out.coeffs.keys().cloned().collect();
    for (g, w) in quad.iter() {
        let fg = f(g) * w;
        if fg == Complex64::new(0.0, 0.0) {
            continue;
        }
        for p in &ids {
            let m = rep_matrix(p, g)?.adjoint();
            out.coeffs.get_mut(p).expect("irrep present").axpy(fg, &m);
        }
    }
    Ok(out)
}

/// `Σ_{π ≤ cutoff} d_π tr(f̂(π) π(g))`.
pub fn fourier_inverse(c: &FourierCoeffs, g: &GroupElement) -> Result<Complex64> {
    let mut s = Complex64::new(0.0, 0.0);
    for (p, m) in &c.coeffs {
        if m.max_abs() == 0.0 {
            continue;
        }
        s += trace_of_product(m, &rep_matrix(p, g)?) * p.dim() as f64;
    }
    Ok(s)
}

/// `(Σ_π d_π ‖f̂(π)‖²_HS)^{1/2}`, the `L²` norm of a band-limited function.
pub fn plancherel_norm(c: &FourierCoeffs) -> f64 {
    c.coeffs
        .iter()
        .map(|(p, m)| p.dim() as f64 * m.frobenius_norm().powi(2))
        .sum::<f64>()
        .sqrt()
}

/// A function given by finitely many Fourier coefficients.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct BandLimitedFunction {
    coeffs: FourierCoeffs,
}

impl BandLimitedFunction {
    pub fn new(coeffs: FourierCoeffs) -> Self {
        Self { coeffs }
    }

    pub fn zero(kind: GroupKind) -> Self {
        Self::new(FourierCoeffs::zeros(kind, 0))
    }

    pub fn constant(kind: GroupKind, c: f64) -> Self {
        let mut coeffs = FourierCoeffs::zeros(kind, 0);
        *coeffs.get_mut(&IrrepId::trivial(kind)).unwrap() = ComplexMatrix::scalar(Complex64::new(c, 0.0));
        Self::new(coeffs)
    }

    /// Matrix coefficient `g ↦ π(g)_{kj}`.
    pub fn matrix_coefficient(pi: &IrrepId, k: usize, j: usize) -> Self {
        let kind = pi.kind();
        let mut coeffs = FourierCoeffs::zeros(kind, pi.band());
        let d = pi.dim();
        // tr(E_{jk} π(g)) = π(g)_{kj}
        *coeffs.get_mut(pi).unwrap() = ComplexMatrix::unit(d, d, j, k, Complex64::new(1.0 / d as f64, 0.0));
        Self::new(coeffs)
    }

    /// Trigonometric polynomial on `T^d` from `(n, c)` pairs: `Σ c e^{i n·θ}`.
    pub fn torus_series(d: usize, terms: &[(Vec<i32>, Complex64)]) -> Result<Self> {
        let cutoff = terms
            .iter()
            .flat_map(|(n, _)| n.iter().map(|k| k.unsigned_abs()))
            .max()
            .unwrap_or(0);
        let mut coeffs = FourierCoeffs::zeros(GroupKind::Torus(d), cutoff);
        for (n, c) in terms {
            if n.len() != d {
                return Err(Error::InvalidArgument(format!("character label {n:?} on T^{d}")));
            }
            let slot = coeffs.get_mut(&IrrepId::TorusChar(n.clone())).unwrap();
            *slot = &*slot + &ComplexMatrix::scalar(*c);
        }
        Ok(Self::new(coeffs))
    }

    /// `a_0 + Σ_k (a_k cos kθ + b_k sin kθ)` on `T^1`.
    pub fn torus_trig(a0: f64, cos: &[f64], sin: &[f64]) -> Self {
        let mut terms = vec![(vec![0], Complex64::new(a0, 0.0))];
        for (k, &a) in cos.iter().enumerate() {
            let n = k as i32 + 1;
            terms.push((vec![n], Complex64::new(a / 2.0, 0.0)));
            terms.push((vec![-n], Complex64::new(a / 2.0, 0.0)));
        }
        for (k, &b) in sin.iter().enumerate() {
            let n = k as i32 + 1;
            terms.push((vec![n], Complex64::new(0.0, -b / 2.0)));
            terms.push((vec![-n], Complex64::new(0.0, b / 2.0)));
        }
        Self::torus_series(1, &terms).expect("one-dimensional labels")
    }

    pub fn from_fn<F: Fn(&GroupElement) -> Complex64>(
        f: F,
        quad: &QuadratureRule,
        cutoff: u32,
        f_band: Option<u32>,
    ) -> Result<Self> {
        Ok(Self::new(fourier_transform(f, quad, cutoff, f_band)?))
    }

    /// Random coefficients with i.i.d. Gaussian entries scaled by `decay^band`;
    /// `real` projects onto real-valued functions.
    pub fn random<R: Rng + ?Sized>(kind: GroupKind, cutoff: u32, decay: f64, real: bool, rng: &mut R) -> Self {
        let mut coeffs = FourierCoeffs::zeros(kind, cutoff);
        for (p, m) in coeffs.coeffs.iter_mut() {
            let s = decay.powi(p.band() as i32);
            *m = ComplexMatrix::from_fn(m.rows(), m.cols(), |_, _| {
                let re: f64 = StandardNormal.sample(rng);
                let im: f64 = StandardNormal.sample(rng);
                Complex64::new(re * s, im * s)
            });
        }
        let f = Self::new(coeffs);
        if real {
            f.real_part()
        } else {
            f
        }
    }

    pub fn kind(&self) -> GroupKind {
        self.coeffs.kind
    }

    pub fn coeffs(&self) -> &FourierCoeffs {
        &self.coeffs
    }

    pub fn cutoff(&self) -> u32 {
        self.coeffs.cutoff
    }

    pub fn band(&self) -> u32 {
        self.coeffs.effective_band()
    }

    pub fn eval(&self, g: &GroupElement) -> Result<Complex64> {
        fourier_inverse(&self.coeffs, g)
    }

    /// Real part of the value.
    pub fn eval_re(&self, g: &GroupElement) -> Result<f64> {
        Ok(self.eval(g)?.re)
    }

    /// Coefficients of the pointwise complex conjugate.
    pub fn conjugate(&self) -> Self {
        let kind = self.kind();
        let mut out = FourierCoeffs::zeros(kind, self.cutoff());
        out.exact = self.coeffs.exact;
        for (p, m) in &self.coeffs.coeffs {
            match p {
                IrrepId::TorusChar(_) => {
                    *out.get_mut(&p.conjugate()).unwrap() = m.conj();
                }
                IrrepId::SU2Spin(two_j) => {
                    // conj π(g) = W π(g) Wᵀ with W = d^j(π) real orthogonal
                    let w = wigner_small_d(*two_j, PI);
                    *out.get_mut(p).unwrap() = w.transpose().matmul(&m.conj()).matmul(&w);
                }
            }
        }
        Self::new(out)
    }

    pub fn real_part(&self) -> Self {
        self.add(&self.conjugate()).scale(0.5)
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(self.kind(), other.kind(), "band-limited functions on different groups");
        let (big, small) = if self.cutoff() >= other.cutoff() { (self, other) } else { (other, self) };
        let mut out = big.coeffs.clone();
        for (p, m) in &small.coeffs.coeffs {
            let slot = out.get_mut(p).unwrap();
            *slot = &*slot + m;
        }
        out.exact = self.coeffs.exact && other.coeffs.exact;
        Self::new(out)
    }

    pub fn scale(&self, s: f64) -> Self {
        Self::new(self.coeffs.map(|_, m| m.scale_real(s)))
    }

    /// `X_k f`, exactly: `(X f)^ = dπ(X) f̂`.
    pub fn derivative(&self, k: usize) -> Self {
        Self::new(self.coeffs.map(|p, m| basis_derivative(p, k).matmul(m)))
    }

    /// `X_i X_j f`.
    pub fn second_derivative(&self, i: usize, j: usize) -> Self {
        Self::new(
            self.coeffs
                .map(|p, m| basis_derivative(p, i).matmul(&basis_derivative(p, j)).matmul(m)),
        )
    }

    /// `(X_1 f(g), …, X_n f(g))`.
    pub fn gradient_at(&self, g: &GroupElement) -> Result<Vec<Complex64>> {
        (0..self.kind().dim()).map(|k| self.derivative(k).eval(g)).collect()
    }

    /// `[X_i X_j f(g)]_{ij}`.
    pub fn hessian_at(&self, g: &GroupElement) -> Result<Vec<Vec<Complex64>>> {
        let n = self.kind().dim();
        (0..n)
            .map(|i| (0..n).map(|j| self.second_derivative(i, j).eval(g)).collect())
            .collect()
    }

    /// Upper bound on `sup_g |f(g)|` from `|tr(A π(g))| ≤ √d ‖A‖_F`.
    pub fn sup_bound(&self) -> f64 {
        self.coeffs
            .coeffs
            .iter()
            .map(|(p, m)| (p.dim() as f64).powf(1.5) * m.frobenius_norm())
            .sum()
    }

    pub fn l2_norm(&self) -> f64 {
        plancherel_norm(&self.coeffs)
    }

    /// `⟨f, h⟩ = ∫ f h̄ dg = Σ_π d_π tr(ĥ(π)* f̂(π))`.
    pub fn inner(&self, other: &Self) -> Complex64 {
        let mut s = Complex64::new(0.0, 0.0);
        for (p, m) in &self.coeffs.coeffs {
            if let Some(o) = other.coeffs.get(p) {
                let hs: Complex64 = o.as_slice().iter().zip(m.as_slice()).map(|(a, b)| a.conj() * b).sum();
                s += hs * p.dim() as f64;
            }
        }
        s
    }
}

/// Finitely supported Borel measure `Σ m_k δ_{τ_k}`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct AtomicMeasure {
    pub atoms: Vec<(GroupElement, f64)>,
}

impl AtomicMeasure {
    pub fn new(atoms: Vec<(GroupElement, f64)>) -> Self {
        Self { atoms }
    }

    pub fn total_mass(&self) -> f64 {
        self.atoms.iter().map(|(_, m)| m).sum()
    }

    /// `μ̂(π) = Σ_k m_k π(τ_k)`.
    pub fn transform(&self, pi: &IrrepId) -> Result<ComplexMatrix> {
        let d = pi.dim();
        let mut out = ComplexMatrix::zeros(d, d);
        for (tau, m) in &self.atoms {
            out.axpy(Complex64::new(*m, 0.0), &rep_matrix(pi, tau)?);
        }
        Ok(out)
    }

    /// `μ * ν`, the law of `ρτ` with `ρ ~ μ`, `τ ~ ν` independent.
    pub fn convolve(&self, other: &Self) -> Result<Self> {
        let mut atoms = Vec::with_capacity(self.atoms.len() * other.atoms.len());
        for (a, ma) in &self.atoms {
            for (b, mb) in &other.atoms {
                atoms.push((a.compose(b)?, ma * mb));
            }
        }
        Ok(Self { atoms })
    }
}
