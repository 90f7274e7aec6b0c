//! Time evolution of symbols: `σ_t(g, π) = π(g)* p̂_t(g, π)`.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::generators::PseudoPoissonSpec;
use crate::group::{GroupElement, GroupKind};
use crate::linalg::{mat_exp, ComplexMatrix};
use crate::quadrature::{composite_gauss_legendre, QuadratureRule};
use crate::repr::{irreps_up_to, rep_matrix, IrrepId};
use crate::symbol::Symbol;

pub type TransitionTransform = dyn Fn(f64, &GroupElement, &IrrepId) -> Result<ComplexMatrix> + Send + Sync;

/// Tolerance on `‖σ_t‖ ≤ 1`.
const CONTRACTION_TOL: f64 = 1e-12;

/// Estimated symbols at a fixed start point, with entrywise standard errors.
#[derive(Clone, Debug)]
pub struct EmpiricalTable {
    pub t: f64,
    pub estimate: BTreeMap<IrrepId, ComplexMatrix>,
    /// Real part of each entry holds the standard error of the real part,
    /// likewise for the imaginary part.
    pub std_error: BTreeMap<IrrepId, ComplexMatrix>,
}

/// `t ↦ σ_t`.
#[derive(Clone)]
pub enum SymbolFamily {
    /// `σ_t = e^{t j}` for a `g`-independent `j`.
    MatrixExp { j: Symbol },
    /// Monte Carlo estimates at a fixed start point and a few times.
    Empirical {
        kind: GroupKind,
        g0: GroupElement,
        tables: Vec<EmpiricalTable>,
    },
    /// `σ_t(g, π) = π(g)* p̂_t(g, π)` from an explicit evaluator of `p̂_t`.
    KernelBased {
        kind: GroupKind,
        irreps: Vec<IrrepId>,
        transform: Arc<TransitionTransform>,
        /// Absolute error of the evaluator.
        noise: f64,
    },
}

impl fmt::Debug for SymbolFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::MatrixExp { j } => f.debug_struct("MatrixExp").field("j", j).finish(),
            Self::Empirical { g0, tables, .. } => f
                .debug_struct("Empirical")
                .field("g0", g0)
                .field("times", &tables.iter().map(|t| t.t).collect::<Vec<_>>())
                .finish(),
            Self::KernelBased { kind, noise, .. } => {
                f.debug_struct("KernelBased").field("kind", kind).field("noise", noise).finish()
            }
        }
    }
}

impl SymbolFamily {
    pub fn matrix_exp(j: Symbol) -> Result<Self> {
        if !j.is_g_independent() {
            return Err(Error::Assumption("matrix exponential family needs a g-independent generator".into()));
        }
        Ok(Self::MatrixExp { j })
    }

    /// The family of a pseudo-Poisson process, through its Poisson series.
    pub fn pseudo_poisson(spec: &PseudoPoissonSpec, cutoff: u32) -> Self {
        let s = spec.clone();
        Self::KernelBased {
            kind: spec.kind(),
            irreps: irreps_up_to(spec.kind(), cutoff),
            transform: Arc::new(move |t, g, p| s.transition_transform(t, g, p)),
            noise: 1e-14,
        }
    }

    pub fn kernel_based<F>(kind: GroupKind, cutoff: u32, noise: f64, f: F) -> Self
    where
        F: Fn(f64, &GroupElement, &IrrepId) -> Result<ComplexMatrix> + Send + Sync + 'static,
    {
        Self::KernelBased {
            kind,
            irreps: irreps_up_to(kind, cutoff),
            transform: Arc::new(f),
            noise,
        }
    }

    pub fn kind(&self) -> GroupKind {
        match self {
            Self::MatrixExp { j } => j.kind(),
            Self::Empirical { kind, .. } | Self::KernelBased { kind, .. } => *kind,
        }
    }

    pub fn irreps(&self) -> Vec<IrrepId> {
        match self {
            Self::MatrixExp { j } => j.irreps().to_vec(),
            Self::Empirical { tables, .. } => tables
                .first()
                .map(|t| t.estimate.keys().cloned().collect())
                .unwrap_or_default(),
            Self::KernelBased { irreps, .. } => irreps.clone(),
        }
    }

    fn table(&self, t: f64) -> Result<&EmpiricalTable> {
        let Self::Empirical { tables, .. } = self else {
            unreachable!()
        };
        tables
            .iter()
            .find(|tb| (tb.t - t).abs() <= 1e-12 * t.max(1.0))
            .ok_or(Error::NotOnGrid)
    }

    /// `σ_t(g, π)`.
    pub fn eval(&self, t: f64, g: &GroupElement, pi: &IrrepId) -> Result<ComplexMatrix> {
        if !(t >= 0.0 && t.is_finite()) {
            return Err(Error::InvalidArgument(format!("time {t} must be nonnegative")));
        }
        if t == 0.0 {
            return Ok(ComplexMatrix::identity(pi.dim()));
        }
        match self {
            Self::MatrixExp { j } => mat_exp(&j.at_identity(pi)?.scale_real(t)),
            Self::KernelBased { transform, .. } => kernel_symbol(&|g, p| transform(t, g, p), g, pi),
            Self::Empirical { g0, .. } => {
                if !g.approx_eq(g0, 1e-12) {
                    return Err(Error::NotOnGrid);
                }
                self.table(t)?
                    .estimate
                    .get(pi)
                    .cloned()
                    .ok_or_else(|| Error::IrrepNotInSet(pi.key()))
            }
        }
    }

    /// Frobenius size of the evaluation error of `σ_t(·, π)`.
    pub fn noise_floor(&self, t: f64, pi: &IrrepId) -> Result<f64> {
        if t == 0.0 {
            return Ok(0.0);
        }
        match self {
            Self::MatrixExp { .. } => Ok(1e-15 * pi.dim() as f64),
            Self::KernelBased { noise, .. } => Ok(*noise),
            Self::Empirical { .. } => {
                let se = self.table(t)?.std_error.get(pi).ok_or_else(|| Error::IrrepNotInSet(pi.key()))?;
                Ok(se.as_slice().iter().map(|z| z.re * z.re + z.im * z.im).sum::<f64>().sqrt())
            }
        }
    }

    /// `σ_t` as a symbol.
    pub fn at(&self, t: f64) -> Result<Symbol> {
        match self {
            Self::MatrixExp { j } => evolve_symbol(j, t),
            _ => {
                let me = self.clone();
                Ok(Symbol::analytic(self.kind(), self.irreps(), false, move |g, p| me.eval(t, g, p)))
            }
        }
    }
}

/// `σ_t(π) = e^{t j(π)}`.
pub fn evolve_symbol(j: &Symbol, t: f64) -> Result<Symbol> {
    if !j.is_g_independent() {
        return Err(Error::Assumption("evolution by matrix exponential needs a g-independent symbol".into()));
    }
    if !(t >= 0.0) {
        return Err(Error::InvalidArgument(format!("time {t} must be nonnegative")));
    }
    Symbol::constant_from(j.kind(), j.irreps(), |p| mat_exp(&j.at_identity(p)?.scale_real(t)))
}

/// `σ_t(g, π) = π(g)* p̂_t(g, π)`, rejecting a non-contractive result.
pub fn kernel_symbol(
    p_hat: &dyn Fn(&GroupElement, &IrrepId) -> Result<ComplexMatrix>,
    g: &GroupElement,
    pi: &IrrepId,
) -> Result<ComplexMatrix> {
    let s = rep_matrix(pi, g)?.adjoint().matmul(&p_hat(g, pi)?);
    let norm = s.operator_norm();
    if norm > 1.0 + CONTRACTION_TOL {
        return Err(Error::NotContraction { norm });
    }
    Ok(s)
}

/// Difference quotients at `t₀, t₀/2, …` combined by Richardson
/// extrapolation.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Stencil {
    pub levels: usize,
}

impl Default for Stencil {
    fn default() -> Self {
        Self { levels: 3 }
    }
}

#[derive(Clone, Debug)]
pub struct GeneratorEstimate {
    pub j: ComplexMatrix,
    /// Frobenius distance to the extrapolation started at `t₀/2`.
    pub error: f64,
    /// Propagated evaluation noise, Frobenius.
    pub noise: f64,
}

fn richardson(quotients: &[ComplexMatrix]) -> ComplexMatrix {
    let mut row = quotients.to_vec();
    let mut pow = 1.0;
    while row.len() > 1 {
        pow *= 2.0;
        row = row
            .windows(2)
            .map(|w| (&w[1].scale_real(pow) - &w[0]).scale_real(1.0 / (pow - 1.0)))
            .collect();
    }
    row.pop().expect("nonempty")
}

/// `j(g, π) = d/dt σ_t(g, π) at t = 0`.
pub fn generator_from_semigroup(
    fam: &SymbolFamily,
    g: &GroupElement,
    pi: &IrrepId,
    t0: f64,
    stencil: Stencil,
) -> Result<GeneratorEstimate> {
    if !(t0 > 0.0) || stencil.levels == 0 {
        return Err(Error::InvalidArgument("need t₀ > 0 and at least one level".into()));
    }
    let id = ComplexMatrix::identity(pi.dim());
    let n = stencil.levels + 1;
    let mut quot = Vec::with_capacity(n);
    let mut noise_terms = Vec::with_capacity(n);
    for k in 0..n {
        let t = t0 / f64::powi(2.0, k as i32);
        match fam.eval(t, g, pi) {
            Ok(s) => {
                quot.push((&s - &id).scale_real(1.0 / t));
                noise_terms.push(fam.noise_floor(t, pi)? / t);
            }
            // an empirical family may carry only the levels it needs
            Err(Error::NotOnGrid) if k == n - 1 && matches!(fam, SymbolFamily::Empirical { .. }) => break,
            Err(e) => return Err(e),
        }
    }
    let lead = &quot[..stencil.levels];
    let j = richardson(lead);
    // |Richardson weights| sum to at most 3^levels for halving steps
    let amp = 3f64.powi(stencil.levels as i32 - 1);
    let noise = amp * noise_terms[..stencil.levels].iter().fold(0.0f64, |m, x| m.max(*x));
    let error = if quot.len() == n {
        richardson(&quot[1..]).frobenius_distance(&j)
    } else {
        lead[lead.len() - 1].frobenius_distance(&j)
    };
    if matches!(fam, SymbolFamily::Empirical { .. }) && noise > j.frobenius_norm().max(error) {
        return Err(Error::ErrorBarTooLarge {
            error_bar: noise,
            tol: j.frobenius_norm().max(error),
        });
    }
    Ok(GeneratorEstimate { j, error, noise })
}

/// Composite Gauss–Legendre rule for the Laplace transform in time.
#[derive(Clone, Copy, Debug)]
pub struct ResolventQuadrature {
    pub panels: usize,
    pub order: usize,
    /// `e^{−λT}` at the truncation time `T`.
    pub truncation: f64,
}

impl Default for ResolventQuadrature {
    fn default() -> Self {
        Self {
            panels: 200,
            order: 8,
            truncation: 1e-10,
        }
    }
}

/// `∫₀^∞ e^{−λt} σ_t(g, π) dt`.
pub fn resolvent_symbol(fam: &SymbolFamily, lambda: f64, q: ResolventQuadrature) -> Result<Symbol> {
    if !(lambda > 0.0 && lambda.is_finite()) {
        return Err(Error::InvalidArgument(format!("resolvent parameter {lambda} must be positive")));
    }
    let horizon = -q.truncation.ln() / lambda;
    let nodes = composite_gauss_legendre(0.0, horizon, q.panels, q.order);
    let integrate = move |fam: &SymbolFamily, g: &GroupElement, p: &IrrepId| -> Result<ComplexMatrix> {
        let mut acc = ComplexMatrix::zeros(p.dim(), p.dim());
        for (t, w) in &nodes {
            acc.axpy(Complex64::new(w * (-lambda * t).exp(), 0.0), &fam.eval(*t, g, p)?);
        }
        Ok(acc)
    };
    match fam {
        SymbolFamily::MatrixExp { j } => {
            let e = j.kind().identity();
            Symbol::constant_from(j.kind(), j.irreps(), |p| integrate(fam, &e, p))
        }
        _ => {
            let me = fam.clone();
            Ok(Symbol::analytic(fam.kind(), fam.irreps(), false, move |g, p| integrate(&me, g, p)))
        }
    }
}

/// `σ_{s+t}(g, π) = π(g)* ∫ π(τ) σ_t(τ, π) p_s(g, dτ)` with `p_s(g, ·)`
/// given as weighted points.
pub fn chapman_compose(
    fam: &SymbolFamily,
    law_s: &[(GroupElement, f64)],
    t: f64,
    g: &GroupElement,
    pi: &IrrepId,
) -> Result<ComplexMatrix> {
    let d = pi.dim();
    let mut acc = ComplexMatrix::zeros(d, d);
    for (tau, w) in law_s {
        let inner = rep_matrix(pi, tau)?.matmul(&fam.eval(t, tau, pi)?);
        acc.axpy(Complex64::new(*w, 0.0), &inner);
    }
    Ok(rep_matrix(pi, g)?.adjoint().matmul(&acc))
}

/// Law of `g τ` with `τ` distributed by the measure whose transform is
/// `μ̂`, as quadrature-weighted points. Exact for integrands of band at
/// most `quad.band − cutoff`.
pub fn convolution_law(
    mu_hat: &dyn Fn(&IrrepId) -> Result<ComplexMatrix>,
    cutoff: u32,
    quad: &QuadratureRule,
    g: &GroupElement,
) -> Result<Vec<(GroupElement, f64)>> {
    let irreps = irreps_up_to(quad.kind, cutoff);
    let hats: Vec<(IrrepId, ComplexMatrix)> =
        irreps.into_iter().map(|p| mu_hat(&p).map(|m| (p, m))).collect::<Result<_>>()?;
    quad.iter()
        .map(|(tau, w)| {
            // density Σ d tr(μ̂(π) π(τ)*)
            let mut rho = 0.0;
            for (p, m) in &hats {
                let r = rep_matrix(p, tau)?;
                rho += p.dim() as f64 * crate::fourier::trace_of_product(m, &r.adjoint()).re;
            }
            Ok((g.compose(tau)?, w * rho))
        })
        .collect()
}

/// `‖σ_{s+t}(e, π) − σ_s(e, π) σ_t(e, π)‖_F`.
pub fn semigroup_defect(fam: &SymbolFamily, s: f64, t: f64, pi: &IrrepId) -> Result<f64> {
    let e = fam.kind().identity();
    let e = match fam {
        SymbolFamily::Empirical { g0, .. } => g0.clone(),
        _ => e,
    };
    let lhs = fam.eval(s + t, &e, pi)?;
    let rhs = fam.eval(s, &e, pi)?.matmul(&fam.eval(t, &e, pi)?);
    Ok(lhs.frobenius_distance(&rhs))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators::{
        HaarJump, HuntCharacteristics, LevyMeasure, PseudoPoissonSpec, RightTranslate, StateDependentShift, Stay,
    };
    use crate::linalg::mat_solve;
    use crate::quadrature::haar_quadrature;

    fn t1(th: f64) -> GroupElement {
        GroupElement::torus(&[th])
    }

    fn circle_heat(cutoff: u32) -> Symbol {
        HuntCharacteristics::heat(GroupKind::Torus(1), 1.0)
            .unwrap()
            .generator()
            .unwrap()
            .symbol(cutoff)
            .unwrap()
    }

    fn sphere_heat(cutoff: u32) -> Symbol {
        HuntCharacteristics::heat(GroupKind::SU2, 1.0)
            .unwrap()
            .generator()
            .unwrap()
            .symbol(cutoff)
            .unwrap()
    }

    #[test]
    fn evolution_basics() {
        let s0 = evolve_symbol(&circle_heat(4), 0.0).unwrap();
        for p in s0.irreps() {
            assert!(s0.at_identity(p).unwrap().max_abs_diff(&ComplexMatrix::identity(1)) == 0.0);
        }
        let s = evolve_symbol(&circle_heat(4), 0.5).unwrap();
        let v = s.at_identity(&IrrepId::TorusChar(vec![2])).unwrap()[(0, 0)];
        assert!((v.re - (-2.0f64).exp()).abs() < 1e-15 && v.im.abs() < 1e-15);
        let t = 0.37;
        let sph = evolve_symbol(&sphere_heat(4), t).unwrap();
        for p in sph.irreps() {
            let c = p.casimir();
            let expect = ComplexMatrix::identity(p.dim()).scale_real((-t * c).exp());
            assert!(sph.at_identity(p).unwrap().max_abs_diff(&expect) < 1e-14);
        }
    }

    #[test]
    fn kernel_symbol_cases() {
        let g = GroupElement::su2(0.4, 0.3, -0.2, 0.8);
        let p = IrrepId::SU2Spin(3);
        let stay = kernel_symbol(&|g, p| rep_matrix(p, g), &g, &p).unwrap();
        assert!(stay.max_abs_diff(&ComplexMatrix::identity(4)) < 1e-14);
        let tau = GroupElement::su2(0.9, 0.1, 0.3, -0.2);
        let conv = kernel_symbol(&|g, p| rep_matrix(p, &g.compose(&tau)?), &g, &p).unwrap();
        assert!(conv.max_abs_diff(&rep_matrix(&p, &tau).unwrap()) < 1e-14);
        let haar = kernel_symbol(&|_, p| Ok(ComplexMatrix::zeros(p.dim(), p.dim())), &g, &p).unwrap();
        assert!(haar.max_abs() == 0.0);
        let bad = kernel_symbol(&|_, p| Ok(ComplexMatrix::identity(p.dim()).scale_real(1.5)), &g, &p);
        assert!(matches!(bad, Err(Error::NotContraction { .. })));
    }

    #[test]
    fn generator_recovery() {
        let fam = SymbolFamily::matrix_exp(circle_heat(3)).unwrap();
        let e = t1(0.0);
        for n in -3..=3i32 {
            let est = generator_from_semigroup(&fam, &e, &IrrepId::TorusChar(vec![n]), 1e-3, Stencil::default()).unwrap();
            let exact = -(n * n) as f64;
            assert!((est.j[(0, 0)].re - exact).abs() <= 1e-5 * exact.abs().max(1e-300) + 1e-14);
            assert!(est.error < 1e-5 * exact.abs().max(1.0));
        }
        let ident = SymbolFamily::matrix_exp(Symbol::constant_from(GroupKind::SU2, &irreps_up_to(GroupKind::SU2, 2), |p| {
            Ok(ComplexMatrix::zeros(p.dim(), p.dim()))
        })
        .unwrap())
        .unwrap();
        let est = generator_from_semigroup(&ident, &GroupElement::su2(1.0, 0.0, 0.0, 0.0), &IrrepId::SU2Spin(2), 1e-3, Stencil::default()).unwrap();
        assert!(est.j.max_abs() == 0.0);
    }

    #[test]
    fn pseudo_poisson_generator_recovery() {
        let spec = PseudoPoissonSpec::new(1.3, Arc::new(StateDependentShift::sine(1.0, 0.5))).unwrap();
        let fam = SymbolFamily::pseudo_poisson(&spec, 4);
        for th in [0.0, 1.1] {
            for n in -4..=4i32 {
                let p = IrrepId::TorusChar(vec![n]);
                let est = generator_from_semigroup(&fam, &t1(th), &p, 1e-3, Stencil { levels: 3 }).unwrap();
                let exact = spec.symbol_matrix(&t1(th), &p).unwrap();
                assert!(est.j.frobenius_distance(&exact) < 1e-5 * exact.frobenius_norm().max(1.0));
            }
        }
    }

    #[test]
    fn richardson_order() {
        // error at t₀ and t₀/2 shrinks by ~4 with two levels
        let fam = SymbolFamily::matrix_exp(sphere_heat(3)).unwrap();
        let e = GroupElement::su2(1.0, 0.0, 0.0, 0.0);
        let p = IrrepId::SU2Spin(3);
        let exact = sphere_heat(3).at_identity(&p).unwrap();
        let e1 = generator_from_semigroup(&fam, &e, &p, 1e-2, Stencil { levels: 2 }).unwrap().j.frobenius_distance(&exact);
        let e2 = generator_from_semigroup(&fam, &e, &p, 5e-3, Stencil { levels: 2 }).unwrap().j.frobenius_distance(&exact);
        assert!((e1 / e2 - 4.0).abs() < 0.1, "{}", e1 / e2);
    }

    #[test]
    fn resolvents() {
        let fam = SymbolFamily::matrix_exp(circle_heat(5)).unwrap();
        let r = resolvent_symbol(&fam, 1.0, ResolventQuadrature::default()).unwrap();
        for n in -5..=5i32 {
            let v = r.at_identity(&IrrepId::TorusChar(vec![n])).unwrap()[(0, 0)];
            assert!((v.re - 1.0 / (1.0 + (n * n) as f64)).abs() < 1e-9);
        }
        let zero = SymbolFamily::matrix_exp(Symbol::constant_from(GroupKind::Torus(1), &irreps_up_to(GroupKind::Torus(1), 1), |p| {
            Ok(ComplexMatrix::zeros(p.dim(), p.dim()))
        })
        .unwrap())
        .unwrap();
        let r = resolvent_symbol(&zero, 2.0, ResolventQuadrature::default()).unwrap();
        assert!((r.at_identity(&IrrepId::TorusChar(vec![1])).unwrap()[(0, 0)].re - 0.5).abs() < 1e-9);
        let j = sphere_heat(4);
        let fam = SymbolFamily::matrix_exp(j.clone()).unwrap();
        let r = resolvent_symbol(&fam, 2.0, ResolventQuadrature::default()).unwrap();
        for p in j.irreps() {
            let a = &ComplexMatrix::identity(p.dim()).scale_real(2.0) - &j.at_identity(p).unwrap();
            let inv = mat_solve(&a, &ComplexMatrix::identity(p.dim())).unwrap().x;
            assert!(r.at_identity(p).unwrap().frobenius_distance(&inv) < 1e-6);
        }
    }

    #[test]
    fn chapman_kolmogorov_for_heat() {
        let fam = SymbolFamily::matrix_exp(circle_heat(6)).unwrap();
        let quad = haar_quadrature(GroupKind::Torus(1), 64).unwrap();
        let g = t1(0.8);
        let wide = SymbolFamily::matrix_exp(circle_heat(24)).unwrap();
        let law = convolution_law(&|p| wide.eval(0.2, &t1(0.0), p), 24, &quad, &g).unwrap();
        for n in -6..=6i32 {
            let p = IrrepId::TorusChar(vec![n]);
            let got = chapman_compose(&fam, &law, 0.2, &g, &p).unwrap()[(0, 0)];
            // direct evaluation
            let expect = (-0.4 * (n * n) as f64).exp();
            assert!((got - Complex64::new(expect, 0.0)).norm() < 1e-9);
        }
        let p = IrrepId::TorusChar(vec![2]);
        let at_g = [(g.clone(), 1.0)];
        assert!(chapman_compose(&fam, &at_g, 0.3, &g, &p).unwrap().max_abs_diff(&fam.eval(0.3, &g, &p).unwrap()) < 1e-15);
        let zero_t = chapman_compose(&fam, &law, 0.0, &g, &p).unwrap();
        assert!(zero_t.max_abs_diff(&fam.eval(0.2, &g, &p).unwrap()) < 1e-9);
    }

    #[test]
    fn defects() {
        let hunt = HuntCharacteristics::new(
            GroupKind::SU2,
            vec![0.3, 0.0, -0.1],
            vec![vec![0.5, 0.0, 0.0], vec![0.0, 0.2, 0.0], vec![0.0, 0.0, 0.1]],
            LevyMeasure::atomic(vec![(GroupElement::su2(0.8, 0.6, 0.0, 0.0), 1.0)]).unwrap(),
        )
        .unwrap();
        let fam = SymbolFamily::matrix_exp(hunt.generator().unwrap().symbol(4).unwrap()).unwrap();
        for p in fam.irreps() {
            assert!(semigroup_defect(&fam, 0.1, 0.3, &p).unwrap() < 1e-11);
        }

        let quad = haar_quadrature(GroupKind::Torus(1), 16).unwrap();
        let haar = SymbolFamily::pseudo_poisson(&PseudoPoissonSpec::new(2.0, Arc::new(HaarJump::new(quad))).unwrap(), 4);
        let shift = PseudoPoissonSpec::new(2.0, Arc::new(StateDependentShift::sine(1.0, 1.0))).unwrap();
        let moving = SymbolFamily::pseudo_poisson(&shift, 4);
        let e = t1(0.0);
        let p = IrrepId::TorusChar(vec![1]);
        assert!(semigroup_defect(&haar, 0.1, 0.1, &p).unwrap() < 1e-9);
        let defect = semigroup_defect(&moving, 0.1, 0.1, &p).unwrap();
        // brute-force composition: σ_{0.2}(e) from the law at 0.1 and σ_{0.1}
        let law = shift.transition_atoms(0.1, &e).unwrap();
        let composed = chapman_compose(&moving, &law, 0.1, &e, &p).unwrap();
        let floor = composed.frobenius_distance(&moving.eval(0.2, &e, &p).unwrap()).max(moving.noise_floor(0.2, &p).unwrap());
        assert!(defect > 10.0 * floor, "{defect} vs {floor}");

        let idle = SymbolFamily::pseudo_poisson(&PseudoPoissonSpec::new(1.0, Arc::new(Stay(GroupKind::Torus(1)))).unwrap(), 2);
        assert!(idle.eval(0.7, &t1(0.3), &p).unwrap().max_abs_diff(&ComplexMatrix::identity(1)) < 1e-15);
        let tr = SymbolFamily::pseudo_poisson(&PseudoPoissonSpec::new(1.0, Arc::new(RightTranslate { tau: t1(0.5) })).unwrap(), 2);
        assert!(semigroup_defect(&tr, 0.3, 0.1, &p).unwrap() < 1e-13);
    }

    #[test]
    fn empirical_family_lookup() {
        let p = IrrepId::TorusChar(vec![1]);
        let table = |t: f64| EmpiricalTable {
            t,
            estimate: [(p.clone(), ComplexMatrix::scalar(Complex64::new((-t).exp(), 0.0)))].into(),
            std_error: [(p.clone(), ComplexMatrix::scalar(Complex64::new(1e-3, 1e-3)))].into(),
        };
        let fam = SymbolFamily::Empirical {
            kind: GroupKind::Torus(1),
            g0: t1(0.0),
            tables: vec![table(0.1), table(0.05)],
        };
        assert!(fam.eval(0.0, &t1(0.0), &p).unwrap().max_abs_diff(&ComplexMatrix::identity(1)) == 0.0);
        assert!(matches!(fam.eval(0.3, &t1(0.0), &p), Err(Error::NotOnGrid)));
        let est = generator_from_semigroup(&fam, &t1(0.0), &p, 0.1, Stencil { levels: 2 }).unwrap();
        assert!((est.j[(0, 0)].re + 1.0).abs() < 5e-3);
        let noisy = SymbolFamily::Empirical {
            kind: GroupKind::Torus(1),
            g0: t1(0.0),
            tables: vec![
                EmpiricalTable { std_error: [(p.clone(), ComplexMatrix::scalar(Complex64::new(0.5, 0.5)))].into(), ..table(1e-3) },
                EmpiricalTable { std_error: [(p.clone(), ComplexMatrix::scalar(Complex64::new(0.5, 0.5)))].into(), ..table(5e-4) },
            ],
        };
        assert!(matches!(
            generator_from_semigroup(&noisy, &t1(0.0), &p, 1e-3, Stencil { levels: 2 }),
            Err(Error::ErrorBarTooLarge { .. })
        ));
    }
}
