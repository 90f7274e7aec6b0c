//! Courrège–Hunt operators: Hunt's formula with state-dependent
//! characteristics.

use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;

use super::hunt::{outer_product, second_order_sum, HuntCharacteristics};
use super::levy::{DiscreteLevy, LevyMeasure, LevyQuadrature};
use crate::error::{Error, Result};
use crate::fourier::BandLimitedFunction;
use crate::group::{CoordinateSystem, GroupElement, GroupKind, LieAlgebraVector};
use crate::linalg::{check_psd, ComplexMatrix};
use crate::quadrature::haar_quadrature;
use crate::repr::{basis_derivative, irreps_up_to, rep_matrix, IrrepId};
use crate::symbol::{Operator, Symbol};

pub type IntensityFn = dyn Fn(&GroupElement, &GroupElement) -> f64 + Send + Sync;
pub type JumpProfile = dyn Fn(&GroupElement) -> f64 + Send + Sync;

/// Step of the central differences used for `X_i λ(·, τ)` when `λ` is a
/// general closure.
pub const INTENSITY_FD_STEP: f64 = 1e-4;

/// Density `λ(g, τ)` of `ν(g, g·)` with respect to the base measure `ρ`.
#[derive(Clone)]
pub enum JumpIntensity {
    /// `λ(g, τ) = p(g) q(τ)` with `p` band-limited.
    Separable {
        g_part: BandLimitedFunction,
        tau_part: Arc<JumpProfile>,
    },
    General(Arc<IntensityFn>),
}

impl fmt::Debug for JumpIntensity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Separable { g_part, .. } => f.debug_struct("Separable").field("g_part", g_part).finish_non_exhaustive(),
            Self::General(_) => write!(f, "General(..)"),
        }
    }
}

impl JumpIntensity {
    pub fn constant(kind: GroupKind, c: f64) -> Self {
        Self::Separable {
            g_part: BandLimitedFunction::constant(kind, c),
            tau_part: Arc::new(|_| 1.0),
        }
    }

    pub fn general<F>(f: F) -> Self
    where
        F: Fn(&GroupElement, &GroupElement) -> f64 + Send + Sync + 'static,
    {
        Self::General(Arc::new(f))
    }

    pub fn eval(&self, g: &GroupElement, tau: &GroupElement) -> Result<f64> {
        match self {
            Self::Separable { g_part, tau_part } => Ok(g_part.eval_re(g)? * tau_part(tau)),
            Self::General(f) => Ok(f(g, tau)),
        }
    }

    /// `X_i λ(·, τ)` at `g`.
    pub fn gradient_g(&self, g: &GroupElement, tau: &GroupElement) -> Result<Vec<f64>> {
        match self {
            Self::Separable { g_part, tau_part } => {
                let q = tau_part(tau);
                Ok(g_part.gradient_at(g)?.into_iter().map(|d| d.re * q).collect())
            }
            Self::General(f) => {
                let n = g.kind().dim();
                let h = INTENSITY_FD_STEP;
                (0..n)
                    .map(|i| {
                        let e = LieAlgebraVector::basis(n, i);
                        let up = g.right_exp(&e.scale(h))?;
                        let down = g.right_exp(&e.scale(-h))?;
                        Ok((f(&up, tau) - f(&down, tau)) / (2.0 * h))
                    })
                    .collect()
            }
        }
    }

    /// `[X_i X_j λ(·, τ)]_{ij}` at `g`.
    pub fn hessian_g(&self, g: &GroupElement, tau: &GroupElement) -> Result<Vec<Vec<f64>>> {
        match self {
            Self::Separable { g_part, tau_part } => {
                let q = tau_part(tau);
                Ok(g_part
                    .hessian_at(g)?
                    .into_iter()
                    .map(|r| r.into_iter().map(|d| d.re * q).collect())
                    .collect())
            }
            Self::General(f) => {
                let n = g.kind().dim();
                let h = INTENSITY_FD_STEP;
                let at = |i: usize, si: f64, j: usize, sj: f64| -> Result<f64> {
                    let gi = g.right_exp(&LieAlgebraVector::basis(n, i).scale(si * h))?;
                    Ok(f(&gi.right_exp(&LieAlgebraVector::basis(n, j).scale(sj * h))?, tau))
                };
                (0..n)
                    .map(|i| {
                        (0..n)
                            .map(|j| {
                                Ok((at(i, 1.0, j, 1.0)? - at(i, 1.0, j, -1.0)? - at(i, -1.0, j, 1.0)?
                                    + at(i, -1.0, j, -1.0)?)
                                    / (4.0 * h * h))
                            })
                            .collect()
                    })
                    .collect()
            }
        }
    }

    /// True when `λ` does not depend on `g`.
    pub fn is_g_independent(&self) -> bool {
        matches!(self, Self::Separable { g_part, .. } if g_part.band() == 0)
    }
}

/// Coefficient fields `b^i(g)`, `a^{ij}(g)` and the Lévy kernel
/// `ν(g, g dτ) = λ(g, τ) ρ(dτ)`.
#[derive(Clone, Debug)]
pub struct CourregeHuntCharacteristics {
    pub kind: GroupKind,
    pub b: Vec<BandLimitedFunction>,
    pub a: Vec<Vec<BandLimitedFunction>>,
    pub rho: LevyMeasure,
    pub lambda: JumpIntensity,
    pub cs: CoordinateSystem,
    /// `g'` with `λ(g', τ) = sup_g λ(g, τ)` on the coordinate ball.
    pub witness: Option<GroupElement>,
}

/// Resolution of the state grid used to validate the characteristics.
const CHECK_RESOLUTION: u32 = 6;

impl CourregeHuntCharacteristics {
    pub fn new(
        kind: GroupKind,
        b: Vec<BandLimitedFunction>,
        a: Vec<Vec<BandLimitedFunction>>,
        rho: LevyMeasure,
        lambda: JumpIntensity,
    ) -> Result<Self> {
        let n = kind.dim();
        if b.len() != n || a.len() != n || a.iter().any(|r| r.len() != n) {
            return Err(Error::InvalidArgument(format!("coefficient fields must have dimension {n}")));
        }
        if b.iter().chain(a.iter().flatten()).any(|c| c.kind() != kind) {
            return Err(Error::InvalidArgument("coefficient field on the wrong group".into()));
        }
        let ch = Self {
            kind,
            b,
            a,
            rho,
            lambda,
            cs: CoordinateSystem::standard(kind),
            witness: None,
        };
        ch.validate()?;
        Ok(ch)
    }

    /// Constant characteristics with `λ ≡ 1` and `ρ = ν`.
    pub fn from_hunt(ch: &HuntCharacteristics) -> Result<Self> {
        let k = ch.kind;
        let c = |x: f64| BandLimitedFunction::constant(k, x);
        let mut out = Self::new(
            k,
            ch.b.iter().map(|x| c(*x)).collect(),
            ch.a.iter().map(|r| r.iter().map(|x| c(*x)).collect()).collect(),
            ch.nu.clone(),
            JumpIntensity::constant(k, 1.0),
        )?;
        out.cs = ch.cs.clone();
        Ok(out)
    }

    pub fn with_coords(mut self, cs: CoordinateSystem) -> Result<Self> {
        if cs.kind != self.kind {
            return Err(Error::KindMismatch {
                left: cs.kind,
                right: self.kind,
            });
        }
        self.cs = cs;
        self.validate()?;
        Ok(self)
    }

    /// Records `g'` after checking `λ(g', τ) ≥ λ(g, τ)` on the coordinate
    /// ball over the validation grid.
    pub fn with_witness(mut self, witness: GroupElement) -> Result<Self> {
        let levy = self.rho.discretize(&self.cs, &LevyQuadrature::default())?;
        let grid = haar_quadrature(self.kind, CHECK_RESOLUTION)?;
        let half = self.cs.exact_radius();
        for node in levy.nodes.iter().filter(|n| n.tau.distance_from_identity() < half) {
            let top = self.lambda.eval(&witness, &node.tau)?;
            for (g, _) in grid.iter() {
                if self.lambda.eval(g, &node.tau)? > top * (1.0 + 1e-12) + 1e-14 {
                    return Err(Error::Assumption(format!("{witness:?} does not maximise the jump intensity")));
                }
            }
        }
        self.witness = Some(witness);
        Ok(self)
    }

    fn validate(&self) -> Result<()> {
        let grid = haar_quadrature(self.kind, CHECK_RESOLUTION)?;
        let levy = self.rho.discretize(&self.cs, &LevyQuadrature::default())?;
        let half = self.cs.exact_radius();
        let check = |l: f64, tau: &GroupElement| -> Result<()> {
            if !l.is_finite() {
                let place = if tau.distance_from_identity() >= half { "outside" } else { "inside" };
                return Err(Error::Assumption(format!(
                    "jump intensity is unbounded {place} the coordinate ball at τ = {tau:?}"
                )));
            }
            if l < 0.0 {
                return Err(Error::Assumption(format!("negative jump intensity {l}")));
            }
            Ok(())
        };
        for (g, _) in grid.iter() {
            check_psd(&self.a_at(g)?, 1e-12)
                .map_err(|e| Error::Assumption(format!("diffusion matrix at {g:?}: {e}")))?;
        }
        match &self.lambda {
            // the two factors are checked separately
            JumpIntensity::Separable { g_part, tau_part } => {
                let id = self.kind.identity();
                for (g, _) in grid.iter() {
                    check(g_part.eval_re(g)?, &id)?;
                }
                for node in &levy.nodes {
                    check(tau_part(&node.tau), &node.tau)?;
                }
            }
            JumpIntensity::General(f) => {
                for (g, _) in grid.iter() {
                    for node in &levy.nodes {
                        check(f(g, &node.tau), &node.tau)?;
                    }
                }
            }
        }
        Ok(())
    }

    pub fn b_at(&self, g: &GroupElement) -> Result<Vec<f64>> {
        self.b.iter().map(|c| c.eval_re(g)).collect()
    }

    pub fn a_at(&self, g: &GroupElement) -> Result<Vec<Vec<f64>>> {
        self.a.iter().map(|r| r.iter().map(|c| c.eval_re(g)).collect()).collect()
    }

    pub fn is_constant(&self) -> bool {
        self.b.iter().chain(self.a.iter().flatten()).all(|c| c.band() == 0) && self.lambda.is_g_independent()
    }

    pub fn generator(&self) -> Result<CourregeHuntGenerator> {
        self.generator_with(&LevyQuadrature::default())
    }

    pub fn generator_with(&self, q: &LevyQuadrature) -> Result<CourregeHuntGenerator> {
        Ok(CourregeHuntGenerator {
            ch: self.clone(),
            rho: self.rho.discretize(&self.cs, q)?,
        })
    }
}

/// A Courrège–Hunt operator with its base measure discretized.
#[derive(Clone, Debug)]
pub struct CourregeHuntGenerator {
    pub ch: CourregeHuntCharacteristics,
    pub rho: DiscreteLevy,
}

impl CourregeHuntGenerator {
    /// `j(g, π)` with the jump integral written over `ν(g, g dτ)`.
    pub fn symbol_matrix(&self, g: &GroupElement, pi: &IrrepId) -> Result<ComplexMatrix> {
        let n = self.ch.kind.dim();
        let d = pi.dim();
        let dp: Vec<ComplexMatrix> = (0..n).map(|k| basis_derivative(pi, k)).collect();
        let b = self.ch.b_at(g)?;
        let a = self.ch.a_at(g)?;
        let mut j = ComplexMatrix::zeros(d, d);
        let re = |x: f64| Complex64::new(x, 0.0);
        for i in 0..n {
            j.axpy(re(b[i]), &dp[i]);
            for k in 0..n {
                if a[i][k] != 0.0 {
                    j.axpy(re(a[i][k]), &dp[i].matmul(&dp[k]));
                }
            }
        }
        let id = ComplexMatrix::identity(d);
        for node in &self.rho.nodes {
            let w = node.weight * self.ch.lambda.eval(g, &node.tau)?;
            if w == 0.0 {
                continue;
            }
            if node.inner {
                for i in 0..n {
                    for k in 0..n {
                        let c = 0.5 * w * node.x[i] * node.x[k];
                        if c != 0.0 {
                            j.axpy(re(c), &dp[i].matmul(&dp[k]));
                        }
                    }
                }
            } else {
                let mut m = &rep_matrix(pi, &node.tau)? - &id;
                for i in 0..n {
                    m.axpy(re(-node.x[i]), &dp[i]);
                }
                j.axpy(re(w), &m);
            }
        }
        Ok(j)
    }

    pub fn symbol(&self, cutoff: u32) -> Symbol {
        let me = self.clone();
        Symbol::analytic(
            self.ch.kind,
            irreps_up_to(self.ch.kind, cutoff),
            self.ch.is_constant(),
            move |g, p| me.symbol_matrix(g, p),
        )
    }
}

impl Operator for CourregeHuntGenerator {
    fn kind(&self) -> GroupKind {
        self.ch.kind
    }

    /// `b^i X_i f + a^{ij} X_i X_j f + ∫[f(gτ) − f(g) − x^i(τ) X_i f(g)] λ(g, τ) ρ(dτ)`.
    fn apply(&self, f: &BandLimitedFunction, g: &GroupElement) -> Result<Complex64> {
        let grad = f.gradient_at(g)?;
        let hess = f.hessian_at(g)?;
        let fg = f.eval(g)?;
        let mut s = second_order_sum(&self.ch.a_at(g)?, &hess);
        for (bi, gi) in self.ch.b_at(g)?.iter().zip(&grad) {
            s += gi * bi;
        }
        for node in &self.rho.nodes {
            let w = node.weight * self.ch.lambda.eval(g, &node.tau)?;
            if w == 0.0 {
                continue;
            }
            if node.inner {
                s += second_order_sum(&outer_product(&node.x), &hess) * (0.5 * w);
            } else {
                let lin: Complex64 = node.x.iter().zip(&grad).map(|(x, gr)| gr * x).sum();
                s += (f.eval(&g.compose(&node.tau)?)? - fg - lin) * w;
            }
        }
        Ok(s)
    }
}

pub fn courrege_hunt_apply(ch: &CourregeHuntCharacteristics, f: &BandLimitedFunction, g: &GroupElement) -> Result<f64> {
    Ok(ch.generator()?.apply(f, g)?.re)
}

pub fn courrege_hunt_symbol(ch: &CourregeHuntCharacteristics, cutoff: u32) -> Result<Symbol> {
    Ok(ch.generator()?.symbol(cutoff))
}
