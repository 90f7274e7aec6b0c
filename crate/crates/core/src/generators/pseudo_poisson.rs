//! Pseudo-Poisson processes: a Markov chain with kernel `q` run at the
//! jump times of a Poisson process of rate `λ`.

use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use rand::RngCore;

use crate::error::{Error, Result};
use crate::fourier::BandLimitedFunction;
use crate::group::{exp_map, GroupElement, GroupKind, LieAlgebraVector};
use crate::linalg::{mat_exp, ComplexMatrix};
use crate::quadrature::QuadratureRule;
use crate::repr::{irreps_up_to, rep_matrix, IrrepId};
use crate::symbol::{Operator, Symbol};

/// A Markov kernel `q(g, dτ)`, usable both for sampling and for
/// integration.
pub trait TransitionKernel: Send + Sync + fmt::Debug {
    fn kind(&self) -> GroupKind;

    fn sample(&self, g: &GroupElement, rng: &mut dyn RngCore) -> Result<GroupElement>;

    /// `∫ f(τ) q(g, dτ)`.
    fn integrate(
        &self,
        g: &GroupElement,
        f: &dyn Fn(&GroupElement) -> Result<Complex64>,
    ) -> Result<Complex64>;

    /// `q̂(g, π) = ∫ π(τ) q(g, dτ)`.
    fn transform(&self, g: &GroupElement, pi: &IrrepId) -> Result<ComplexMatrix> {
        let d = pi.dim();
        let mut out = ComplexMatrix::zeros(d, d);
        for r in 0..d {
            for c in 0..d {
                out[(r, c)] = self.integrate(g, &|tau| Ok(rep_matrix(pi, tau)?[(r, c)]))?;
            }
        }
        Ok(out)
    }

    /// `μ̂(π)` when `q(g, ·)` is the law of `gτ` with `τ ~ μ` for a fixed `μ`.
    fn convolution_transform(&self, _pi: &IrrepId) -> Option<Result<ComplexMatrix>> {
        None
    }

    /// `q(g, ·)` as finitely many weighted atoms, when it is one.
    fn atoms(&self, _g: &GroupElement) -> Option<Result<Vec<(GroupElement, f64)>>> {
        None
    }
}

/// `q(g, ·) = δ_g`.
#[derive(Clone, Debug)]
pub struct Stay(pub GroupKind);

impl TransitionKernel for Stay {
    fn kind(&self) -> GroupKind {
        self.0
    }
    fn sample(&self, g: &GroupElement, _rng: &mut dyn RngCore) -> Result<GroupElement> {
        Ok(g.clone())
    }
    fn integrate(&self, g: &GroupElement, f: &dyn Fn(&GroupElement) -> Result<Complex64>) -> Result<Complex64> {
        f(g)
    }
    fn transform(&self, g: &GroupElement, pi: &IrrepId) -> Result<ComplexMatrix> {
        rep_matrix(pi, g)
    }
    fn convolution_transform(&self, pi: &IrrepId) -> Option<Result<ComplexMatrix>> {
        Some(Ok(ComplexMatrix::identity(pi.dim())))
    }
    fn atoms(&self, g: &GroupElement) -> Option<Result<Vec<(GroupElement, f64)>>> {
        Some(Ok(vec![(g.clone(), 1.0)]))
    }
}

/// `q(g, ·) = ` Haar measure, integrated with a fixed quadrature rule.
#[derive(Clone, Debug)]
pub struct HaarJump {
    pub quad: QuadratureRule,
}

impl HaarJump {
    pub fn new(quad: QuadratureRule) -> Self {
        Self { quad }
    }
}

impl TransitionKernel for HaarJump {
    fn kind(&self) -> GroupKind {
        self.quad.kind
    }
    fn sample(&self, _g: &GroupElement, rng: &mut dyn RngCore) -> Result<GroupElement> {
        Ok(self.quad.kind.random_haar(rng))
    }
    fn integrate(&self, _g: &GroupElement, f: &dyn Fn(&GroupElement) -> Result<Complex64>) -> Result<Complex64> {
        let mut s = Complex64::new(0.0, 0.0);
        for (tau, w) in self.quad.iter() {
            s += f(tau)? * w;
        }
        Ok(s)
    }
    fn transform(&self, _g: &GroupElement, pi: &IrrepId) -> Result<ComplexMatrix> {
        Ok(haar_transform(pi))
    }
    fn convolution_transform(&self, pi: &IrrepId) -> Option<Result<ComplexMatrix>> {
        Some(Ok(haar_transform(pi)))
    }
}

fn haar_transform(pi: &IrrepId) -> ComplexMatrix {
    let d = pi.dim();
    if pi.is_trivial() {
        ComplexMatrix::identity(d)
    } else {
        ComplexMatrix::zeros(d, d)
    }
}

/// `q(g, ·) = δ_{gτ₀}`.
#[derive(Clone, Debug)]
pub struct RightTranslate {
    pub tau: GroupElement,
}

impl TransitionKernel for RightTranslate {
    fn kind(&self) -> GroupKind {
        self.tau.kind()
    }
    fn sample(&self, g: &GroupElement, _rng: &mut dyn RngCore) -> Result<GroupElement> {
        g.compose(&self.tau)
    }
    fn integrate(&self, g: &GroupElement, f: &dyn Fn(&GroupElement) -> Result<Complex64>) -> Result<Complex64> {
        f(&g.compose(&self.tau)?)
    }
    fn transform(&self, g: &GroupElement, pi: &IrrepId) -> Result<ComplexMatrix> {
        rep_matrix(pi, &g.compose(&self.tau)?)
    }
    fn convolution_transform(&self, pi: &IrrepId) -> Option<Result<ComplexMatrix>> {
        Some(rep_matrix(pi, &self.tau))
    }
    fn atoms(&self, g: &GroupElement) -> Option<Result<Vec<(GroupElement, f64)>>> {
        Some(g.compose(&self.tau).map(|t| vec![(t, 1.0)]))
    }
}

/// `q(g, ·) = δ_{g exp(s(g) X)}`: a deterministic jump whose length depends
/// on the current state.
#[derive(Clone, Debug)]
pub struct StateDependentShift {
    pub shift: BandLimitedFunction,
    pub direction: LieAlgebraVector,
}

impl StateDependentShift {
    /// On `T^1`: `s(θ) = offset + amp·sin θ` along `X_1`.
    pub fn sine(offset: f64, amp: f64) -> Self {
        Self {
            shift: BandLimitedFunction::torus_trig(offset, &[], &[amp]),
            direction: LieAlgebraVector(vec![1.0]),
        }
    }

    fn target(&self, g: &GroupElement) -> Result<GroupElement> {
        let s = self.shift.eval_re(g)?;
        g.compose(&exp_map(g.kind(), &self.direction.scale(s))?)
    }
}

impl TransitionKernel for StateDependentShift {
    fn kind(&self) -> GroupKind {
        self.shift.kind()
    }
    fn sample(&self, g: &GroupElement, _rng: &mut dyn RngCore) -> Result<GroupElement> {
        self.target(g)
    }
    fn integrate(&self, g: &GroupElement, f: &dyn Fn(&GroupElement) -> Result<Complex64>) -> Result<Complex64> {
        f(&self.target(g)?)
    }
    fn transform(&self, g: &GroupElement, pi: &IrrepId) -> Result<ComplexMatrix> {
        rep_matrix(pi, &self.target(g)?)
    }
    fn atoms(&self, g: &GroupElement) -> Option<Result<Vec<(GroupElement, f64)>>> {
        Some(self.target(g).map(|t| vec![(t, 1.0)]))
    }
}

/// Rate `λ` and jump kernel `q`.
#[derive(Clone, Debug)]
pub struct PseudoPoissonSpec {
    pub lambda: f64,
    pub kernel: Arc<dyn TransitionKernel>,
}

/// Largest number of chain states tracked by the Poisson series.
const MAX_SERIES_ATOMS: usize = 1 << 20;

impl PseudoPoissonSpec {
    pub fn new(lambda: f64, kernel: Arc<dyn TransitionKernel>) -> Result<Self> {
        if !(lambda.is_finite() && lambda >= 0.0) {
            return Err(Error::InvalidArgument(format!("jump rate {lambda} must be nonnegative")));
        }
        let kind = kernel.kind();
        for g in [kind.identity(), exp_map(kind, &LieAlgebraVector(vec![0.9; kind.dim()]))?] {
            let mass = kernel.integrate(&g, &|_| Ok(Complex64::new(1.0, 0.0)))?;
            if (mass - Complex64::new(1.0, 0.0)).norm() > 1e-12 {
                return Err(Error::InvalidArgument(format!(
                    "jump kernel has total mass {mass} at {g:?}"
                )));
            }
        }
        Ok(Self { lambda, kernel })
    }

    pub fn kind(&self) -> GroupKind {
        self.kernel.kind()
    }

    /// `j(g, π) = λ (π(g)* q̂(g, π) − I)`.
    pub fn symbol_matrix(&self, g: &GroupElement, pi: &IrrepId) -> Result<ComplexMatrix> {
        let q = self.kernel.transform(g, pi)?;
        let m = &rep_matrix(pi, g)?.adjoint().matmul(&q) - &ComplexMatrix::identity(pi.dim());
        Ok(m.scale_real(self.lambda))
    }

    pub fn symbol(&self, cutoff: u32) -> Symbol {
        let me = self.clone();
        let conv = irreps_up_to(self.kind(), cutoff)
            .iter()
            .all(|p| self.kernel.convolution_transform(p).is_some());
        Symbol::analytic(self.kind(), irreps_up_to(self.kind(), cutoff), conv, move |g, p| {
            me.symbol_matrix(g, p)
        })
    }

    /// Poisson weights `P(N_t = k)` up to a tail below `1e-17`.
    fn poisson_weights(&self, t: f64) -> Vec<f64> {
        let m = self.lambda * t;
        let mut w = vec![(-m).exp()];
        let mut acc = w[0];
        let mut k = 0usize;
        while 1.0 - acc > 1e-17 && k < 10_000 {
            k += 1;
            let next = w[k - 1] * m / k as f64;
            w.push(next);
            acc += next;
            if next == 0.0 && k as f64 > m {
                break;
            }
        }
        w
    }

    /// `p̂_t(g, π) = ∫ π(τ) p_t(g, dτ) = Σ_k P(N_t = k) E_g[π(S_k)]`.
    pub fn transition_transform(&self, t: f64, g: &GroupElement, pi: &IrrepId) -> Result<ComplexMatrix> {
        if let Some(mu) = self.kernel.convolution_transform(pi) {
            let mu = mu?;
            let gen = (&mu - &ComplexMatrix::identity(pi.dim())).scale_real(self.lambda * t);
            return Ok(rep_matrix(pi, g)?.matmul(&mat_exp(&gen)?));
        }
        let law = self.transition_atoms(t, g)?;
        let d = pi.dim();
        let mut out = ComplexMatrix::zeros(d, d);
        for (tau, w) in &law {
            out.axpy(Complex64::new(*w, 0.0), &rep_matrix(pi, tau)?);
        }
        Ok(out)
    }

    /// `p_t(g, ·)` as weighted atoms, for kernels with atomic `q(g, ·)`.
    pub fn transition_atoms(&self, t: f64, g: &GroupElement) -> Result<Vec<(GroupElement, f64)>> {
        let weights = self.poisson_weights(t);
        let mut layer = vec![(g.clone(), 1.0)];
        let mut out = Vec::new();
        for (k, pk) in weights.iter().enumerate() {
            out.extend(layer.iter().map(|(s, w)| (s.clone(), w * pk)));
            if k + 1 == weights.len() {
                break;
            }
            let mut next = Vec::new();
            for (s, w) in &layer {
                let atoms = self.kernel.atoms(s).ok_or_else(|| {
                    Error::InvalidArgument("transition law needs an atomic or convolution kernel".into())
                })??;
                next.extend(atoms.into_iter().map(|(tau, m)| (tau, w * m)));
            }
            if next.len() > MAX_SERIES_ATOMS {
                return Err(Error::InvalidArgument("Poisson series needs too many chain states".into()));
            }
            layer = next;
        }
        Ok(out)
    }
}

impl Operator for PseudoPoissonSpec {
    fn kind(&self) -> GroupKind {
        self.kernel.kind()
    }

    /// `λ ∫ (f(τ) − f(g)) q(g, dτ)`.
    fn apply(&self, f: &BandLimitedFunction, g: &GroupElement) -> Result<Complex64> {
        let int = self.kernel.integrate(g, &|tau| f.eval(tau))?;
        Ok((int - f.eval(g)?) * self.lambda)
    }
}

pub fn pseudo_poisson_apply(spec: &PseudoPoissonSpec, f: &BandLimitedFunction, g: &GroupElement) -> Result<f64> {
    Ok(spec.apply(f, g)?.re)
}

pub fn pseudo_poisson_symbol(spec: &PseudoPoissonSpec, cutoff: u32) -> Symbol {
    spec.symbol(cutoff)
}
