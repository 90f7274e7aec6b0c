//! Adjoints of Courrège–Hunt operators, the symmetric case and its
//! Dirichlet form, and the Sobolev bound `‖𝓛f‖₂ ≤ C |||f|||₂`.
//!
//! All jump integrals run over the discretized base measure of a
//! [`CourregeHuntGenerator`]: exact on outer nodes, second-order Taylor
//! forms on the small ball.

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::fourier::BandLimitedFunction;
use crate::generators::{CourregeHuntCharacteristics, CourregeHuntGenerator, JumpIntensity, JumpNode, LevyMeasure};
use crate::group::{GroupElement, GroupKind};
use crate::linalg::ComplexMatrix;
use crate::quadrature::{haar_quadrature, QuadratureRule};
use crate::repr::{basis_derivative, irreps_up_to, rep_matrix, IrrepId};
use crate::symbol::{Operator, Symbol};

/// State grid used for the symmetry and positivity checks.
const CHECK_RESOLUTION: u32 = 6;
/// Band margin added to pairing rules when `λ` is not band-limited in `g`.
const GENERAL_INTENSITY_MARGIN: u32 = 8;

/// `L²` norms of `f` and its first two derivatives, computed on Fourier
/// coefficients.
#[derive(Clone, Debug)]
pub struct SobolevProfile {
    pub f: BandLimitedFunction,
    pub l2: f64,
    /// `‖X_i f‖₂`.
    pub first: Vec<f64>,
    /// `‖X_j X_k f‖₂`.
    pub second: Vec<Vec<f64>>,
    /// `|||f|||₂ = (‖f‖₂² + Σ‖X_i f‖₂² + Σ‖X_j X_k f‖₂²)^{1/2}`.
    pub total: f64,
}

pub fn sobolev_norm(f: &BandLimitedFunction) -> SobolevProfile {
    let n = f.kind().dim();
    let l2 = f.l2_norm();
    let first: Vec<f64> = (0..n).map(|i| f.derivative(i).l2_norm()).collect();
    let second: Vec<Vec<f64>> = (0..n)
        .map(|j| (0..n).map(|k| f.second_derivative(j, k).l2_norm()).collect())
        .collect();
    let sq = |v: f64| v * v;
    let total = (sq(l2) + first.iter().copied().map(sq).sum::<f64>() + second.iter().flatten().copied().map(sq).sum::<f64>())
        .sqrt();
    SobolevProfile {
        f: f.clone(),
        l2,
        first,
        second,
        total,
    }
}

/// Largest band among the coefficient fields and the `g`-part of `λ`.
fn coefficient_band(ch: &CourregeHuntCharacteristics) -> u32 {
    let fields = ch.b.iter().chain(ch.a.iter().flatten()).map(|c| c.band()).max().unwrap_or(0);
    match &ch.lambda {
        JumpIntensity::Separable { g_part, .. } => fields.max(g_part.band()),
        JumpIntensity::General(_) => fields + GENERAL_INTENSITY_MARGIN,
    }
}

/// A Haar rule exact for `⟨𝓛f, h⟩` when `f`, `h` have the given bands and
/// the characteristics are band-limited.
pub fn pairing_rule(ch: &CourregeHuntCharacteristics, f_band: u32, h_band: u32) -> Result<QuadratureRule> {
    let band = f_band + h_band + 2 * coefficient_band(ch);
    haar_quadrature(ch.kind, QuadratureRule::resolution_for_band(ch.kind, band))
}

/// `Σ_k w_k u(g_k)` evaluated in parallel, summed in node order.
pub fn integrate_par<F>(q: &QuadratureRule, u: F) -> Result<f64>
where
    F: Fn(&GroupElement) -> Result<f64> + Sync,
{
    let vals = q
        .nodes
        .par_iter()
        .zip(q.weights.par_iter())
        .map(|(g, w)| Ok(u(g)? * w))
        .collect::<Result<Vec<f64>>>()?;
    Ok(vals.iter().sum())
}

/// `⟨A f, h⟩` for real `f`, `h`.
pub fn operator_pairing<A: Operator + ?Sized>(
    op: &A,
    f: &BandLimitedFunction,
    h: &BandLimitedFunction,
    q: &QuadratureRule,
) -> Result<f64> {
    integrate_par(q, |g| Ok(op.apply(f, g)?.re * h.eval_re(g)?))
}

/// `λ(·, τ)` with its first two derivatives at a fixed `g`.
struct IntensityJet {
    value: f64,
    grad: Vec<f64>,
    hess: Vec<Vec<f64>>,
}

/// Per-`g` cache for the `g`-factor of a separable intensity.
enum IntensityAt<'a> {
    Separable {
        p: f64,
        dp: Vec<f64>,
        hp: Vec<Vec<f64>>,
        q: &'a crate::generators::courrege::JumpProfile,
    },
    General {
        lambda: &'a JumpIntensity,
        g: GroupElement,
    },
}

impl<'a> IntensityAt<'a> {
    fn new(lambda: &'a JumpIntensity, g: &GroupElement, need_hess: bool) -> Result<Self> {
        Ok(match lambda {
            JumpIntensity::Separable { g_part, tau_part } => {
                let n = g.kind().dim();
                let independent = g_part.band() == 0;
                let dp = if independent {
                    vec![0.0; n]
                } else {
                    g_part.gradient_at(g)?.iter().map(|c| c.re).collect()
                };
                let hp = if independent || !need_hess {
                    vec![vec![0.0; n]; n]
                } else {
                    g_part
                        .hessian_at(g)?
                        .into_iter()
                        .map(|r| r.into_iter().map(|c| c.re).collect())
                        .collect()
                };
                IntensityAt::Separable {
                    p: g_part.eval_re(g)?,
                    dp,
                    hp,
                    q: tau_part.as_ref(),
                }
            }
            JumpIntensity::General(_) => IntensityAt::General { lambda, g: g.clone() },
        })
    }

    fn jet(&self, tau: &GroupElement, need_hess: bool) -> Result<IntensityJet> {
        match self {
            IntensityAt::Separable { p, dp, hp, q } => {
                let s = q(tau);
                Ok(IntensityJet {
                    value: p * s,
                    grad: dp.iter().map(|d| d * s).collect(),
                    hess: hp.iter().map(|r| r.iter().map(|d| d * s).collect()).collect(),
                })
            }
            IntensityAt::General { lambda, g } => {
                let n = g.kind().dim();
                Ok(IntensityJet {
                    value: lambda.eval(g, tau)?,
                    grad: lambda.gradient_g(g, tau)?,
                    hess: if need_hess {
                        lambda.hessian_g(g, tau)?
                    } else {
                        vec![vec![0.0; n]; n]
                    },
                })
            }
        }
    }
}

fn dot(x: &[f64], y: &[f64]) -> f64 {
    x.iter().zip(y).map(|(a, b)| a * b).sum()
}

fn quad_form(x: &[f64], m: &[Vec<f64>]) -> f64 {
    x.iter().zip(m).map(|(xi, row)| xi * dot(x, row)).sum()
}

fn cdot(x: &[f64], y: &[Complex64]) -> Complex64 {
    x.iter().zip(y).map(|(a, b)| b * a).sum()
}

fn cquad(x: &[f64], m: &[Vec<Complex64>]) -> Complex64 {
    x.iter().zip(m).map(|(xi, row)| cdot(x, row) * xi).sum()
}

fn re_vec(v: Vec<Complex64>) -> Vec<f64> {
    v.into_iter().map(|c| c.re).collect()
}

/// `Σ_ij a_ij dπ_i dπ_j` for a real matrix `a`.
fn second_order_matrix(a: &[Vec<f64>], dp: &[ComplexMatrix]) -> ComplexMatrix {
    let d = dp[0].rows();
    let mut m = ComplexMatrix::zeros(d, d);
    for (i, row) in a.iter().enumerate() {
        for (k, v) in row.iter().enumerate() {
            if *v != 0.0 {
                m.axpy(Complex64::new(*v, 0.0), &dp[i].matmul(&dp[k]));
            }
        }
    }
    m
}

/// `c(g) = ∫ x^i(τ) X_i λ(g, τ) ρ(dτ)`.
pub fn compensator_density(gen: &CourregeHuntGenerator, g: &GroupElement) -> Result<f64> {
    let at = IntensityAt::new(&gen.ch.lambda, g, false)?;
    let mut c = 0.0;
    for node in &gen.rho.nodes {
        c += node.weight * dot(&node.x, &at.jet(&node.tau, false)?.grad);
    }
    Ok(c)
}

/// `R_ρ f(g) = ∫ f(gτ⁻¹)(λ(gτ⁻¹, τ) − λ(g, τ)) ρ(dτ)`.
pub fn r_rho_apply(ch: &CourregeHuntCharacteristics, f: &BandLimitedFunction, g: &GroupElement) -> Result<f64> {
    r_rho_with(&ch.generator()?, f, g)
}

fn r_rho_with(gen: &CourregeHuntGenerator, f: &BandLimitedFunction, g: &GroupElement) -> Result<f64> {
    let mut s = 0.0;
    for node in &gen.rho.nodes {
        let back = g.compose(&node.tau_inv)?;
        let dl = gen.ch.lambda.eval(&back, &node.tau)? - gen.ch.lambda.eval(g, &node.tau)?;
        if dl != 0.0 {
            s += node.weight * f.eval_re(&back)? * dl;
        }
    }
    Ok(s)
}

/// The formal adjoint `𝓛*` in `L²(G, dg)`.
///
/// `𝓛*f = c f + R_ρ f − X_i(b_i f) + X_i X_j(a_ij f)
///        + ∫[f(gτ⁻¹) − f(g) + x^i(τ) X_i f(g)] λ(g, τ) ρ(dτ)`.
///
/// On small-ball nodes the combination of the jump term, `c` and `R_ρ` is
/// replaced by its second-order Taylor form
/// `½λ x x X X f + ½f x x X X λ + (x·∇f)(x·∇λ)`.
#[derive(Clone, Debug)]
pub struct AdjointGenerator {
    pub gen: CourregeHuntGenerator,
    /// `Σ_ij X_i X_j a_ij − Σ_i X_i b_i`.
    zeroth: BandLimitedFunction,
    /// Coefficient of `X_k f`: `−b_k + Σ_j X_j a_kj + Σ_i X_i a_ik`.
    first: Vec<BandLimitedFunction>,
}

impl AdjointGenerator {
    pub fn new(ch: &CourregeHuntCharacteristics) -> Result<Self> {
        Self::from_generator(ch.generator()?)
    }

    pub fn from_generator(gen: CourregeHuntGenerator) -> Result<Self> {
        let ch = &gen.ch;
        let n = ch.kind.dim();
        check_positive_intensity(&gen)?;
        let mut zeroth = BandLimitedFunction::zero(ch.kind);
        for i in 0..n {
            zeroth = zeroth.add(&ch.b[i].derivative(i).scale(-1.0));
            for j in 0..n {
                zeroth = zeroth.add(&ch.a[i][j].second_derivative(i, j));
            }
        }
        let first = (0..n)
            .map(|k| {
                let mut c = ch.b[k].scale(-1.0);
                for j in 0..n {
                    c = c.add(&ch.a[k][j].derivative(j)).add(&ch.a[j][k].derivative(j));
                }
                c
            })
            .collect();
        Ok(Self { gen, zeroth, first })
    }

    fn first_at(&self, g: &GroupElement) -> Result<Vec<f64>> {
        self.first.iter().map(|c| c.eval_re(g)).collect()
    }

    /// `c(g)`.
    pub fn compensator_density(&self, g: &GroupElement) -> Result<f64> {
        compensator_density(&self.gen, g)
    }

    pub fn r_rho_apply(&self, f: &BandLimitedFunction, g: &GroupElement) -> Result<f64> {
        r_rho_with(&self.gen, f, g)
    }

    /// The adjoint symbol `π(g)* (𝓛* π)(g)` assembled in closed form.
    pub fn symbol_matrix(&self, g: &GroupElement, pi: &IrrepId) -> Result<ComplexMatrix> {
        let n = self.gen.ch.kind.dim();
        let d = pi.dim();
        let dp: Vec<ComplexMatrix> = (0..n).map(|k| basis_derivative(pi, k)).collect();
        let re = |x: f64| Complex64::new(x, 0.0);
        let id = ComplexMatrix::identity(d);
        let mut j = second_order_matrix(&self.gen.ch.a_at(g)?, &dp);
        j.axpy(re(self.zeroth.eval_re(g)?), &id);
        for (k, c) in self.first_at(g)?.iter().enumerate() {
            j.axpy(re(*c), &dp[k]);
        }
        let at = IntensityAt::new(&self.gen.ch.lambda, g, true)?;
        for node in &self.gen.rho.nodes {
            let w = node.weight;
            let jet = at.jet(&node.tau, node.inner)?;
            let mut xdp = ComplexMatrix::zeros(d, d);
            for k in 0..n {
                xdp.axpy(re(node.x[k]), &dp[k]);
            }
            if node.inner {
                let xx: Vec<Vec<f64>> = node.x.iter().map(|a| node.x.iter().map(|b| a * b).collect()).collect();
                j.axpy(re(0.5 * w * jet.value), &second_order_matrix(&xx, &dp));
                j.axpy(re(0.5 * w * quad_form(&node.x, &jet.hess)), &id);
                j.axpy(re(w * dot(&node.x, &jet.grad)), &xdp);
            } else {
                let back = g.compose(&node.tau_inv)?;
                let l_back = self.gen.ch.lambda.eval(&back, &node.tau)?;
                j.axpy(re(w * l_back), &rep_matrix(pi, &node.tau_inv)?);
                j.axpy(re(w * (dot(&node.x, &jet.grad) - jet.value)), &id);
                j.axpy(re(w * jet.value), &xdp);
            }
        }
        Ok(j)
    }

    pub fn symbol(&self, cutoff: u32) -> Symbol {
        let me = self.clone();
        Symbol::analytic(
            self.gen.ch.kind,
            irreps_up_to(self.gen.ch.kind, cutoff),
            self.gen.ch.is_constant(),
            move |g, p| me.symbol_matrix(g, p),
        )
    }
}

impl Operator for AdjointGenerator {
    fn kind(&self) -> GroupKind {
        self.gen.ch.kind
    }

    fn apply(&self, f: &BandLimitedFunction, g: &GroupElement) -> Result<Complex64> {
        let ch = &self.gen.ch;
        let fg = f.eval(g)?;
        let grad = f.gradient_at(g)?;
        let hess = f.hessian_at(g)?;
        let mut s = fg * self.zeroth.eval_re(g)? + cdot(&self.first_at(g)?, &grad);
        for (ai, hi) in ch.a_at(g)?.iter().zip(&hess) {
            s += cdot(ai, hi);
        }
        let at = IntensityAt::new(&ch.lambda, g, true)?;
        for node in &self.gen.rho.nodes {
            let jet = at.jet(&node.tau, node.inner)?;
            let xg = cdot(&node.x, &grad);
            let xl = dot(&node.x, &jet.grad);
            let v = if node.inner {
                cquad(&node.x, &hess) * (0.5 * jet.value) + fg * (0.5 * quad_form(&node.x, &jet.hess)) + xg * xl
            } else {
                let back = g.compose(&node.tau_inv)?;
                f.eval(&back)? * ch.lambda.eval(&back, &node.tau)? - fg * jet.value + xg * jet.value + fg * xl
            };
            s += v * node.weight;
        }
        Ok(s)
    }
}

/// Rejects intensities that vanish at a charged node somewhere on the
/// state grid.
fn check_positive_intensity(gen: &CourregeHuntGenerator) -> Result<()> {
    let grid = haar_quadrature(gen.ch.kind, CHECK_RESOLUTION)?;
    for node in gen.rho.nodes.iter().filter(|n| n.weight > 0.0) {
        for (g, _) in grid.iter() {
            if gen.ch.lambda.eval(g, &node.tau)? <= 0.0 {
                return Err(Error::Assumption(format!(
                    "jump intensity vanishes at g = {g:?}, τ = {:?}",
                    node.tau
                )));
            }
        }
    }
    Ok(())
}

pub fn adjoint_apply(ch: &CourregeHuntCharacteristics, f: &BandLimitedFunction, g: &GroupElement) -> Result<f64> {
    Ok(AdjointGenerator::new(ch)?.apply(f, g)?.re)
}

/// Outcome of testing the three symmetry conditions on a state grid.
#[derive(Clone, Debug)]
pub struct SymmetryReport {
    /// `b^i = Σ_j X_j a^{ij}`.
    pub condition1: bool,
    /// `R_ρ f = −c f`.
    pub condition2: bool,
    /// `ν(g, gA) = ν(g, gA⁻¹)`.
    pub condition3: bool,
    pub symmetric: bool,
    pub residuals: [f64; 3],
}

const SYMMETRY_TOL: f64 = 1e-8;

pub fn symmetry_check(ch: &CourregeHuntCharacteristics) -> Result<SymmetryReport> {
    symmetry_check_with(&ch.generator()?)
}

pub fn symmetry_check_with(gen: &CourregeHuntGenerator) -> Result<SymmetryReport> {
    let ch = &gen.ch;
    let n = ch.kind.dim();
    let grid = haar_quadrature(ch.kind, CHECK_RESOLUTION)?;

    let mut r1 = 0.0f64;
    for i in 0..n {
        let mut diff = ch.b[i].clone();
        for j in 0..n {
            diff = diff.add(&ch.a[i][j].derivative(j).scale(-1.0));
        }
        r1 = r1.max(diff.sup_bound());
    }

    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let probes: Vec<BandLimitedFunction> = (0..3)
        .map(|_| BandLimitedFunction::random(ch.kind, 2, 0.7, true, &mut rng))
        .collect();
    let mut r2 = 0.0f64;
    for (g, _) in grid.iter() {
        let c = compensator_density(gen, g)?;
        for f in &probes {
            let v = r_rho_with(gen, f, g)? + c * f.eval_re(g)?;
            r2 = r2.max(v.abs() / f.sup_bound().max(1e-300));
        }
    }

    let r3 = jump_asymmetry(gen, &grid)?;
    let (c1, c2, c3) = (r1 <= SYMMETRY_TOL, r2 <= SYMMETRY_TOL, r3 <= SYMMETRY_TOL);
    Ok(SymmetryReport {
        condition1: c1,
        condition2: c2,
        condition3: c3,
        symmetric: c1 && c2 && c3,
        residuals: [r1, r2, r3],
    })
}

/// Largest relative mismatch between `ν(g, g{τ})` and `ν(g, g{τ⁻¹})`.
fn jump_asymmetry(gen: &CourregeHuntGenerator, grid: &QuadratureRule) -> Result<f64> {
    let ch = &gen.ch;
    let rel = |a: f64, b: f64| (a - b).abs() / a.abs().max(b.abs()).max(1.0);
    let mut worst = 0.0f64;
    match &ch.rho {
        LevyMeasure::Atomic(_) => {
            let nodes = &gen.rho.nodes;
            let mass_at = |g: &GroupElement, p: &GroupElement| -> Result<f64> {
                let mut m = 0.0;
                for node in nodes.iter().filter(|n: &&JumpNode| n.tau.approx_eq(p, 1e-10)) {
                    m += node.weight * ch.lambda.eval(g, &node.tau)?;
                }
                Ok(m)
            };
            for (g, _) in grid.iter() {
                for node in nodes {
                    worst = worst.max(rel(mass_at(g, &node.tau)?, mass_at(g, &node.tau_inv)?));
                }
            }
        }
        LevyMeasure::HaarDensity { .. } => {
            if !ch.rho.is_symmetric(SYMMETRY_TOL) {
                return Ok(f64::INFINITY);
            }
            match &ch.lambda {
                JumpIntensity::Separable { tau_part, .. } => {
                    for node in &gen.rho.nodes {
                        worst = worst.max(rel(tau_part(&node.tau), tau_part(&node.tau_inv)));
                    }
                }
                JumpIntensity::General(l) => {
                    for (g, _) in grid.iter() {
                        for node in &gen.rho.nodes {
                            worst = worst.max(rel(l(g, &node.tau), l(g, &node.tau_inv)));
                        }
                    }
                }
            }
        }
    }
    Ok(worst)
}

/// A Courrège–Hunt operator that passed [`symmetry_check`], in divergence
/// form:
/// `𝓛f = X_i(a_ij X_j f) + ½∫(f(gτ) − 2f(g) + f(gτ⁻¹)) ν(g, g dτ)`.
#[derive(Clone, Debug)]
pub struct SymmetricGenerator {
    pub gen: CourregeHuntGenerator,
    pub report: SymmetryReport,
    /// `Σ_i X_i a_ij`.
    div_a: Vec<BandLimitedFunction>,
}

impl SymmetricGenerator {
    pub fn new(ch: &CourregeHuntCharacteristics) -> Result<Self> {
        Self::from_generator(ch.generator()?)
    }

    pub fn from_generator(gen: CourregeHuntGenerator) -> Result<Self> {
        let report = symmetry_check_with(&gen)?;
        if !report.symmetric {
            return Err(Error::Assumption(format!(
                "operator is not symmetric (conditions {}/{}/{}, residuals {:?})",
                report.condition1, report.condition2, report.condition3, report.residuals
            )));
        }
        let n = gen.ch.kind.dim();
        let div_a = (0..n)
            .map(|j| {
                (0..n).fold(BandLimitedFunction::zero(gen.ch.kind), |acc, i| {
                    acc.add(&gen.ch.a[i][j].derivative(i))
                })
            })
            .collect();
        Ok(Self { gen, report, div_a })
    }

    pub fn kind(&self) -> GroupKind {
        self.gen.ch.kind
    }

    pub fn symbol_matrix(&self, g: &GroupElement, pi: &IrrepId) -> Result<ComplexMatrix> {
        let n = self.kind().dim();
        let d = pi.dim();
        let dp: Vec<ComplexMatrix> = (0..n).map(|k| basis_derivative(pi, k)).collect();
        let re = |x: f64| Complex64::new(x, 0.0);
        let mut j = second_order_matrix(&self.gen.ch.a_at(g)?, &dp);
        for (k, c) in self.div_a.iter().enumerate() {
            j.axpy(re(c.eval_re(g)?), &dp[k]);
        }
        let id = ComplexMatrix::identity(d);
        for node in &self.gen.rho.nodes {
            let w = 0.5 * node.weight * self.gen.ch.lambda.eval(g, &node.tau)?;
            if w == 0.0 {
                continue;
            }
            if node.inner {
                let xx: Vec<Vec<f64>> = node.x.iter().map(|a| node.x.iter().map(|b| a * b).collect()).collect();
                j.axpy(re(w), &second_order_matrix(&xx, &dp));
            } else {
                let mut m = &rep_matrix(pi, &node.tau)? + &rep_matrix(pi, &node.tau_inv)?;
                m.axpy(re(-2.0), &id);
                j.axpy(re(w), &m);
            }
        }
        Ok(j)
    }

    pub fn symbol(&self, cutoff: u32) -> Symbol {
        let me = self.clone();
        Symbol::analytic(
            self.kind(),
            irreps_up_to(self.kind(), cutoff),
            self.gen.ch.is_constant(),
            move |g, p| me.symbol_matrix(g, p),
        )
    }

    /// `ℰ(f₁, f₂) = ∫ a_ij X_i f₁ X_j f₂ dg
    ///            + ½∬ (f₁(gτ) − f₁(g))(f₂(gτ) − f₂(g)) λ(g, τ) ρ(dτ) dg`.
    pub fn dirichlet_form(&self, f1: &BandLimitedFunction, f2: &BandLimitedFunction) -> Result<f64> {
        let q = pairing_rule(&self.gen.ch, f1.band(), f2.band())?;
        self.dirichlet_form_with(f1, f2, &q)
    }

    pub fn dirichlet_form_with(
        &self,
        f1: &BandLimitedFunction,
        f2: &BandLimitedFunction,
        q: &QuadratureRule,
    ) -> Result<f64> {
        let ch = &self.gen.ch;
        integrate_par(q, |g| {
            let d1 = re_vec(f1.gradient_at(g)?);
            let d2 = re_vec(f2.gradient_at(g)?);
            let mut s: f64 = ch.a_at(g)?.iter().zip(&d1).map(|(row, x)| x * dot(row, &d2)).sum();
            let (v1, v2) = (f1.eval_re(g)?, f2.eval_re(g)?);
            for node in &self.gen.rho.nodes {
                let w = 0.5 * node.weight * ch.lambda.eval(g, &node.tau)?;
                if w == 0.0 {
                    continue;
                }
                s += w * if node.inner {
                    dot(&node.x, &d1) * dot(&node.x, &d2)
                } else {
                    let gt = g.compose(&node.tau)?;
                    (f1.eval_re(&gt)? - v1) * (f2.eval_re(&gt)? - v2)
                };
            }
            Ok(s)
        })
    }
}

impl Operator for SymmetricGenerator {
    fn kind(&self) -> GroupKind {
        self.gen.ch.kind
    }

    fn apply(&self, f: &BandLimitedFunction, g: &GroupElement) -> Result<Complex64> {
        let ch = &self.gen.ch;
        let fg = f.eval(g)?;
        let grad = f.gradient_at(g)?;
        let hess = f.hessian_at(g)?;
        let mut s = Complex64::new(0.0, 0.0);
        for (ai, hi) in ch.a_at(g)?.iter().zip(&hess) {
            s += cdot(ai, hi);
        }
        for (c, d) in self.div_a.iter().zip(&grad) {
            s += d * c.eval_re(g)?;
        }
        for node in &self.gen.rho.nodes {
            let w = 0.5 * node.weight * ch.lambda.eval(g, &node.tau)?;
            if w == 0.0 {
                continue;
            }
            s += w * if node.inner {
                cquad(&node.x, &hess)
            } else {
                f.eval(&g.compose(&node.tau)?)? - 2.0 * fg + f.eval(&g.compose(&node.tau_inv)?)?
            };
        }
        Ok(s)
    }
}

pub fn symmetric_apply(ch: &CourregeHuntCharacteristics, f: &BandLimitedFunction, g: &GroupElement) -> Result<f64> {
    Ok(SymmetricGenerator::new(ch)?.apply(f, g)?.re)
}

pub fn symmetric_symbol(ch: &CourregeHuntCharacteristics, cutoff: u32) -> Result<Symbol> {
    Ok(SymmetricGenerator::new(ch)?.symbol(cutoff))
}

pub fn dirichlet_form(ch: &CourregeHuntCharacteristics, f1: &BandLimitedFunction, f2: &BandLimitedFunction) -> Result<f64> {
    SymmetricGenerator::new(ch)?.dirichlet_form(f1, f2)
}

/// The constant `C` of `‖𝓛f‖₂ ≤ C |||f|||₂` assembled term by term, with
/// `U` the ball on which the coordinates are exact.
#[derive(Clone, Debug)]
pub struct SobolevBound {
    /// Squared bounds for the drift, diffusion, small-jump and large-jump
    /// parts.
    pub terms: [f64; 4],
    pub constant: f64,
}

/// `C² = 4(n max‖b_i‖∞² + n² max‖a_ij‖∞² + ¼M_U² + K²)` with
/// `M_U = ∫_U |x|² λ̄ dρ`, `S = ∫_{U^c} λ̄ dρ`, `Λ = sup_{U^c} λ̄` and
/// `K² = 3(S Λ ρ(U^c) + S² + n‖x‖∞² S²)`, where `λ̄(τ) = sup_g λ(g, τ)`.
pub fn sobolev_bound(gen: &CourregeHuntGenerator) -> Result<SobolevBound> {
    let ch = &gen.ch;
    let n = ch.kind.dim() as f64;
    let b2 = ch.b.iter().map(|c| c.sup_bound().powi(2)).fold(0.0, f64::max);
    let a2 = ch.a.iter().flatten().map(|c| c.sup_bound().powi(2)).fold(0.0, f64::max);
    let grid = match &ch.lambda {
        JumpIntensity::General(_) => Some(haar_quadrature(ch.kind, 2 * CHECK_RESOLUTION)?),
        JumpIntensity::Separable { .. } => None,
    };
    let sup_lambda = |tau: &GroupElement| -> Result<f64> {
        match (&ch.lambda, &grid) {
            (JumpIntensity::Separable { g_part, tau_part }, _) => Ok(g_part.sup_bound() * tau_part(tau).abs()),
            (JumpIntensity::General(f), Some(q)) => Ok(q.iter().map(|(g, _)| f(g, tau)).fold(0.0, f64::max)),
            _ => unreachable!("grid exists for general intensities"),
        }
    };
    let half = ch.cs.exact_radius();
    let (mut m_u, mut s, mut big_lambda, mut mass_out) = (0.0, 0.0, 0.0f64, 0.0);
    for node in &gen.rho.nodes {
        let l = sup_lambda(&node.tau)?;
        if node.inner || node.tau.distance_from_identity() < half {
            m_u += node.weight * node.x_norm_sqr() * l;
        } else {
            s += node.weight * l;
            big_lambda = big_lambda.max(l);
            mass_out += node.weight;
        }
    }
    let xs = ch.cs.sup_norm();
    let terms = [
        n * b2,
        n * n * a2,
        0.25 * m_u * m_u,
        3.0 * (s * big_lambda * mass_out + s * s + n * xs * xs * s * s),
    ];
    Ok(SobolevBound {
        terms,
        constant: (4.0 * terms.iter().sum::<f64>()).sqrt(),
    })
}

#[derive(Clone, Debug)]
pub struct BoundednessReport {
    /// `sup ‖𝓛f‖₂ / |||f|||₂` over the family.
    pub ratio: f64,
    pub per_function: Vec<f64>,
    pub bound: SobolevBound,
}

impl BoundednessReport {
    pub fn within_bound(&self) -> bool {
        self.ratio <= self.bound.constant
    }
}

pub fn boundedness_ratio(ch: &CourregeHuntCharacteristics, family: &[BandLimitedFunction]) -> Result<BoundednessReport> {
    let gen = ch.generator()?;
    let mut per_function = Vec::with_capacity(family.len());
    for f in family {
        let q = pairing_rule(ch, f.band(), f.band())?;
        let norm = integrate_par(&q, |g| Ok(gen.apply(f, g)?.norm_sqr()))?.sqrt();
        let r = norm / sobolev_norm(f).total;
        if !r.is_finite() {
            return Err(Error::Assumption(format!("non-finite norm ratio {r}")));
        }
        per_function.push(r);
    }
    Ok(BoundednessReport {
        ratio: per_function.iter().copied().fold(0.0, f64::max),
        per_function,
        bound: sobolev_bound(&gen)?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators::{courrege_hunt_apply, HuntCharacteristics, LevyMeasure};
    use crate::linalg::hermitian_eigenvalues;
    use crate::symbol::symbol_from_operator;
    use std::f64::consts::TAU;

    fn t1(theta: f64) -> GroupElement {
        GroupElement::torus(&[theta])
    }

    fn cst(kind: GroupKind, c: f64) -> BandLimitedFunction {
        BandLimitedFunction::constant(kind, c)
    }

    fn rng(seed: u64) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(seed)
    }

    /// Symmetric atoms at `±0.7` on `T^1` with Laplacian and constant λ.
    fn torus_symmetric() -> CourregeHuntCharacteristics {
        let k = GroupKind::Torus(1);
        let rho = LevyMeasure::Atomic(vec![(t1(0.7), 0.4), (t1(-0.7), 0.4), (t1(2.0), 0.3), (t1(-2.0), 0.3)]);
        CourregeHuntCharacteristics::new(k, vec![cst(k, 0.0)], vec![vec![cst(k, 1.0)]], rho, JumpIntensity::constant(k, 1.0))
            .unwrap()
    }

    /// State-dependent everything on `T^1`, asymmetric atoms.
    fn torus_general() -> CourregeHuntCharacteristics {
        let k = GroupKind::Torus(1);
        let b = BandLimitedFunction::torus_trig(0.3, &[0.2], &[-0.4]);
        let a = BandLimitedFunction::torus_trig(1.0, &[0.3, 0.1], &[0.2]);
        let rho = LevyMeasure::Atomic(vec![(t1(0.5), 0.7), (t1(-1.1), 0.2), (t1(2.6), 0.5)]);
        let lambda = JumpIntensity::general(|g, tau| {
            let (x, y) = (g.log().0[0], tau.log().0[0]);
            1.2 + 0.5 * (x + y).sin() + 0.2 * (2.0 * x).cos()
        });
        CourregeHuntCharacteristics::new(k, vec![b], vec![vec![a]], rho, lambda).unwrap()
    }

    fn su2_general() -> CourregeHuntCharacteristics {
        let k = GroupKind::SU2;
        let mut r = rng(3);
        let u = BandLimitedFunction::random(k, 1, 0.5, true, &mut r).scale(0.2);
        let b: Vec<_> = (0..3).map(|_| BandLimitedFunction::random(k, 2, 0.5, true, &mut r).scale(0.3)).collect();
        let a = vec![
            vec![cst(k, 1.0).add(&u), cst(k, 0.1), cst(k, 0.0)],
            vec![cst(k, 0.1), cst(k, 0.8), cst(k, 0.0)],
            vec![cst(k, 0.0), cst(k, 0.0), cst(k, 0.6)],
        ];
        let atoms = vec![
            (GroupElement::su2(0.8, 0.6, 0.0, 0.0), 0.5),
            (GroupElement::su2(0.6, 0.0, 0.0, 0.8), 0.3),
            (GroupElement::su2(0.0, 0.6, 0.8, 0.0), 0.2),
        ];
        let lambda = JumpIntensity::Separable {
            g_part: cst(k, 1.5).add(&BandLimitedFunction::random(k, 2, 0.5, true, &mut r).scale(0.1)),
            tau_part: std::sync::Arc::new(|t: &GroupElement| 1.0 + 0.5 * t.log().0[2]),
        };
        CourregeHuntCharacteristics::new(k, b, a, LevyMeasure::Atomic(atoms), lambda).unwrap()
    }

    #[test]
    fn sobolev_norm_of_cosine_and_constant() {
        let c = BandLimitedFunction::torus_trig(0.0, &[1.0], &[]);
        let p = sobolev_norm(&c);
        assert!((p.l2 * p.l2 - 0.5).abs() < 1e-14);
        assert!((p.first[0].powi(2) - 0.5).abs() < 1e-14);
        assert!((p.second[0][0].powi(2) - 0.5).abs() < 1e-14);
        assert!((p.total - 1.5f64.sqrt()).abs() < 1e-14);
        assert!((sobolev_norm(&cst(GroupKind::SU2, 1.0)).total - 1.0).abs() < 1e-14);
    }

    #[test]
    fn sobolev_norm_matches_quadrature_on_su2() {
        let k = GroupKind::SU2;
        let f = BandLimitedFunction::random(k, 4, 0.8, true, &mut rng(1));
        let p = sobolev_norm(&f);
        let q = haar_quadrature(k, 6).unwrap();
        let l2 = |h: &BandLimitedFunction| q.integrate(|g| h.eval(g).unwrap().norm_sqr()).sqrt();
        assert!((p.l2 - l2(&f)).abs() < 1e-9);
        for i in 0..3 {
            assert!((p.first[i] - l2(&f.derivative(i))).abs() < 1e-9);
            for j in 0..3 {
                assert!((p.second[i][j] - l2(&f.second_derivative(i, j))).abs() < 1e-9);
            }
        }
        assert!(p.total >= p.l2);
    }

    #[test]
    fn r_rho_vanishes_for_g_independent_intensity() {
        let ch = torus_symmetric();
        let f = BandLimitedFunction::torus_trig(0.3, &[1.0, 0.5], &[0.2]);
        assert_eq!(r_rho_apply(&ch, &f, &t1(1.0)).unwrap(), 0.0);
    }

    #[test]
    fn r_rho_one_atom_by_hand() {
        let k = GroupKind::Torus(1);
        let (t0, eps) = (0.9, 0.3);
        let ch = CourregeHuntCharacteristics::new(
            k,
            vec![cst(k, 0.0)],
            vec![vec![cst(k, 0.0)]],
            LevyMeasure::Atomic(vec![(t1(t0), 1.0)]),
            JumpIntensity::Separable {
                g_part: BandLimitedFunction::torus_trig(1.0, &[], &[eps]),
                tau_part: std::sync::Arc::new(|_| 1.0),
            },
        )
        .unwrap();
        let f = BandLimitedFunction::torus_trig(0.5, &[1.0], &[0.3]);
        let fr = |x: f64| 0.5 + x.cos() + 0.3 * x.sin();
        for th in [0.0, 1.3, 4.0] {
            let want = fr(th - t0) * eps * ((th - t0).sin() - th.sin());
            assert!((r_rho_apply(&ch, &f, &t1(th)).unwrap() - want).abs() < 1e-13);
        }
        assert_eq!(r_rho_apply(&ch, &BandLimitedFunction::zero(k), &t1(0.4)).unwrap(), 0.0);
    }

    #[test]
    fn drift_flips_sign_under_adjoint() {
        let k = GroupKind::Torus(2);
        let h = HuntCharacteristics::drift(k, vec![0.7, -1.3]).unwrap();
        let ch = CourregeHuntCharacteristics::from_hunt(&h).unwrap();
        let adj = AdjointGenerator::new(&ch).unwrap();
        let f = BandLimitedFunction::random(k, 3, 0.7, true, &mut rng(5));
        for g in [GroupElement::torus(&[0.3, 1.0]), GroupElement::torus(&[4.0, 2.0])] {
            let l = courrege_hunt_apply(&ch, &f, &g).unwrap();
            assert!((adj.apply(&f, &g).unwrap().re + l).abs() < 1e-12);
        }
    }

    #[test]
    fn divergence_form_diffusion_is_self_adjoint() {
        let k = GroupKind::Torus(1);
        let a = BandLimitedFunction::torus_trig(1.0, &[0.4], &[0.2]);
        let b = a.derivative(0);
        let ch = CourregeHuntCharacteristics::new(
            k,
            vec![b],
            vec![vec![a]],
            LevyMeasure::Atomic(vec![]),
            JumpIntensity::constant(k, 1.0),
        )
        .unwrap();
        let adj = AdjointGenerator::new(&ch).unwrap();
        let f = BandLimitedFunction::random(k, 4, 0.7, true, &mut rng(8));
        for th in [0.1, 2.2, 5.0] {
            let l = courrege_hunt_apply(&ch, &f, &t1(th)).unwrap();
            assert!((adj.apply(&f, &t1(th)).unwrap().re - l).abs() < 1e-12);
        }
    }

    fn duality_gap(ch: &CourregeHuntCharacteristics, cutoff: u32, seed: u64, pairs: usize) -> f64 {
        let gen = ch.generator().unwrap();
        let adj = AdjointGenerator::new(ch).unwrap();
        let mut r = rng(seed);
        let mut worst = 0.0f64;
        for _ in 0..pairs {
            let f = BandLimitedFunction::random(ch.kind, cutoff, 0.7, true, &mut r);
            let h = BandLimitedFunction::random(ch.kind, cutoff, 0.7, true, &mut r);
            let q = pairing_rule(ch, cutoff, cutoff).unwrap();
            let lhs = operator_pairing(&gen, &f, &h, &q).unwrap();
            let rhs = operator_pairing(&adj, &h, &f, &q).unwrap();
            worst = worst.max((lhs - rhs).abs() / (sobolev_norm(&f).total * sobolev_norm(&h).total));
        }
        worst
    }

    #[test]
    fn duality_with_symmetric_atoms_and_constant_intensity() {
        assert!(duality_gap(&torus_symmetric(), 4, 11, 20) < 1e-8);
    }

    #[test]
    fn duality_with_state_dependent_characteristics() {
        // the general intensity is not band-limited, so the pairing rule is
        // only approximately exact
        assert!(duality_gap(&torus_general(), 3, 12, 5) < 1e-7);
        assert!(duality_gap(&su2_general(), 2, 13, 3) < 1e-8);
    }

    #[test]
    fn adjoint_symbol_formula_matches_extraction() {
        for ch in [torus_general(), su2_general()] {
            let adj = AdjointGenerator::new(&ch).unwrap();
            let irreps = irreps_up_to(ch.kind, 3);
            let q = haar_quadrature(ch.kind, 6).unwrap();
            let extracted = symbol_from_operator(&adj, &irreps, &q.nodes[..4]).unwrap();
            let formula = adj.symbol(3);
            assert!(formula.max_distance(&extracted, &q.nodes[..4]).unwrap() < 1e-9);
        }
    }

    #[test]
    fn vanishing_intensity_is_rejected() {
        let k = GroupKind::Torus(1);
        let ch = CourregeHuntCharacteristics::new(
            k,
            vec![cst(k, 0.0)],
            vec![vec![cst(k, 0.0)]],
            LevyMeasure::Atomic(vec![(t1(1.0), 1.0)]),
            JumpIntensity::Separable {
                g_part: BandLimitedFunction::torus_trig(1.0, &[1.0], &[]),
                tau_part: std::sync::Arc::new(|_| 1.0),
            },
        )
        .unwrap();
        assert!(matches!(AdjointGenerator::new(&ch), Err(Error::Assumption(_))));
    }

    #[test]
    fn symmetry_conditions_pass_and_fail_as_expected() {
        let rep = symmetry_check(&torus_symmetric()).unwrap();
        assert!(rep.condition1 && rep.condition2 && rep.condition3 && rep.symmetric);

        let k = GroupKind::Torus(1);
        let drifted = CourregeHuntCharacteristics::new(
            k,
            vec![cst(k, 0.5)],
            vec![vec![cst(k, 1.0)]],
            LevyMeasure::Atomic(vec![]),
            JumpIntensity::constant(k, 1.0),
        )
        .unwrap();
        let rep = symmetry_check(&drifted).unwrap();
        assert!(!rep.condition1 && rep.condition2 && rep.condition3);

        let lopsided = CourregeHuntCharacteristics::new(
            k,
            vec![cst(k, 0.0)],
            vec![vec![cst(k, 1.0)]],
            LevyMeasure::Atomic(vec![(t1(0.8), 1.0)]),
            JumpIntensity::constant(k, 1.0),
        )
        .unwrap();
        let rep = symmetry_check(&lopsided).unwrap();
        assert!(rep.condition1 && !rep.condition3 && !rep.symmetric);
        assert!(matches!(SymmetricGenerator::new(&lopsided), Err(Error::Assumption(_))));

        let rep = symmetry_check(&torus_general()).unwrap();
        assert!(!rep.condition2 && !rep.symmetric);
    }

    #[test]
    fn symmetric_density_passes_condition_three() {
        let k = GroupKind::SU2;
        let rho = LevyMeasure::haar_density(k, |t: &GroupElement| t.log().norm().powf(-3.5), 0.5).unwrap();
        let ch = CourregeHuntCharacteristics::new(
            k,
            vec![cst(k, 0.0); 3],
            (0..3).map(|i| (0..3).map(|j| cst(k, if i == j { 1.0 } else { 0.0 })).collect()).collect(),
            rho,
            JumpIntensity::constant(k, 1.0),
        )
        .unwrap();
        assert!(symmetry_check(&ch).unwrap().symmetric);
    }

    #[test]
    fn symmetric_form_agrees_with_courrege_hunt() {
        let ch = torus_symmetric();
        let sym = SymmetricGenerator::new(&ch).unwrap();
        let f = BandLimitedFunction::random(ch.kind, 5, 0.8, true, &mut rng(21));
        for th in [0.0, 1.0, 3.3, 5.9] {
            let a = sym.apply(&f, &t1(th)).unwrap().re;
            assert!((a - courrege_hunt_apply(&ch, &f, &t1(th)).unwrap()).abs() < 1e-8);
        }

        let k = GroupKind::Torus(1);
        let lap = CourregeHuntCharacteristics::new(
            k,
            vec![cst(k, 0.0)],
            vec![vec![cst(k, 1.0)]],
            LevyMeasure::Atomic(vec![]),
            JumpIntensity::constant(k, 1.0),
        )
        .unwrap();
        let cos = BandLimitedFunction::torus_trig(0.0, &[1.0], &[]);
        for th in [0.2, 2.0] {
            assert!((symmetric_apply(&lap, &cos, &t1(th)).unwrap() + th.cos()).abs() < 1e-13);
        }

        let t0 = 0.9;
        let jump = CourregeHuntCharacteristics::new(
            k,
            vec![cst(k, 0.0)],
            vec![vec![cst(k, 0.0)]],
            LevyMeasure::Atomic(vec![(t1(t0), 0.6), (t1(-t0), 0.6)]),
            JumpIntensity::constant(k, 1.0),
        )
        .unwrap();
        let fr = |x: f64| 0.5 + x.cos() + 0.3 * x.sin();
        let f = BandLimitedFunction::torus_trig(0.5, &[1.0], &[0.3]);
        let th = 1.7;
        // each atom contributes ½(f(g+τ₀) − 2f(g) + f(g−τ₀))·mass
        let want = 2.0 * 0.5 * 0.6 * (fr(th + t0) - 2.0 * fr(th) + fr(th - t0));
        assert!((symmetric_apply(&jump, &f, &t1(th)).unwrap() - want).abs() < 1e-13);
    }

    #[test]
    fn symmetric_symbol_is_hermitian_nonpositive() {
        let k = GroupKind::SU2;
        let atoms = vec![
            (GroupElement::su2(0.8, 0.6, 0.0, 0.0), 0.5),
            (GroupElement::su2(0.8, -0.6, 0.0, 0.0), 0.5),
        ];
        let a = vec![
            vec![cst(k, 1.0), cst(k, 0.2), cst(k, 0.0)],
            vec![cst(k, 0.2), cst(k, 0.7), cst(k, 0.0)],
            vec![cst(k, 0.0), cst(k, 0.0), cst(k, 0.4)],
        ];
        let ch = CourregeHuntCharacteristics::new(
            k,
            vec![cst(k, 0.0); 3],
            a,
            LevyMeasure::Atomic(atoms),
            JumpIntensity::constant(k, 1.0),
        )
        .unwrap();
        let sym = SymmetricGenerator::new(&ch).unwrap();
        let g = GroupElement::su2(1.0, 0.0, 0.0, 0.0);
        for p in irreps_up_to(k, 4) {
            let j = sym.symbol_matrix(&g, &p).unwrap();
            assert!(j.is_hermitian(1e-12));
            let ev = hermitian_eigenvalues(&j.hermitian_part()).unwrap();
            assert!(ev.iter().all(|e| *e <= 1e-12), "{p:?}: {ev:?}");
        }
        let f = BandLimitedFunction::random(k, 3, 0.7, true, &mut rng(4));
        let q = haar_quadrature(k, 4).unwrap();
        let extracted = symbol_from_operator(&sym, &irreps_up_to(k, 3), &q.nodes[..3]).unwrap();
        assert!(sym.symbol(3).max_distance(&extracted, &q.nodes[..3]).unwrap() < 1e-10);
        assert!((sym.apply(&f, &g).unwrap().re - courrege_hunt_apply(&ch, &f, &g).unwrap()).abs() < 1e-10);
    }

    #[test]
    fn dirichlet_form_examples() {
        let k = GroupKind::Torus(1);
        let lap = CourregeHuntCharacteristics::new(
            k,
            vec![cst(k, 0.0)],
            vec![vec![cst(k, 1.0)]],
            LevyMeasure::Atomic(vec![]),
            JumpIntensity::constant(k, 1.0),
        )
        .unwrap();
        let cos = BandLimitedFunction::torus_trig(0.0, &[1.0], &[]);
        assert!((dirichlet_form(&lap, &cos, &cos).unwrap() - 0.5).abs() < 1e-14);
        assert!(dirichlet_form(&lap, &cst(k, 3.0), &cst(k, 3.0)).unwrap().abs() < 1e-14);

        let t0 = 1.1;
        let jump = CourregeHuntCharacteristics::new(
            k,
            vec![cst(k, 0.0)],
            vec![vec![cst(k, 0.0)]],
            LevyMeasure::Atomic(vec![(t1(t0), 0.8), (t1(-t0), 0.8)]),
            JumpIntensity::constant(k, 1.0),
        )
        .unwrap();
        let f = BandLimitedFunction::torus_trig(0.2, &[1.0, -0.4], &[0.5]);
        // plain Riemann sum over a fine uniform grid
        let m = 4000;
        let mut direct = 0.0;
        for i in 0..m {
            let th = TAU * i as f64 / m as f64;
            let fv = |x: f64| f.eval_re(&t1(x)).unwrap();
            direct += (fv(th + t0) - fv(th)).powi(2) + (fv(th - t0) - fv(th)).powi(2);
        }
        direct *= 0.5 * 0.8 / m as f64;
        let e = dirichlet_form(&jump, &f, &f).unwrap();
        assert!(e >= 0.0 && (e - direct).abs() < 1e-12);
    }

    #[test]
    fn dirichlet_form_is_minus_pairing_and_symmetric() {
        let ch = torus_symmetric();
        let sym = SymmetricGenerator::new(&ch).unwrap();
        let mut r = rng(31);
        for _ in 0..5 {
            let f1 = BandLimitedFunction::random(ch.kind, 4, 0.7, true, &mut r);
            let f2 = BandLimitedFunction::random(ch.kind, 4, 0.7, true, &mut r);
            let q = pairing_rule(&ch, 4, 4).unwrap();
            let e12 = sym.dirichlet_form(&f1, &f2).unwrap();
            let e21 = sym.dirichlet_form(&f2, &f1).unwrap();
            assert!((e12 - e21).abs() < 1e-10);
            assert!((e12 + operator_pairing(&sym, &f1, &f2, &q).unwrap()).abs() < 1e-7);
            assert!(sym.dirichlet_form(&f1, &f1).unwrap() >= -1e-10);
        }
    }

    #[test]
    fn boundedness_ratio_examples() {
        let k = GroupKind::Torus(1);
        let lap = CourregeHuntCharacteristics::from_hunt(&HuntCharacteristics::heat(k, 1.0).unwrap()).unwrap();
        let mut r = rng(41);
        let fam: Vec<_> = (0..10).map(|_| BandLimitedFunction::random(k, 6, 0.9, true, &mut r)).collect();
        let rep = boundedness_ratio(&lap, &fam).unwrap();
        assert!(rep.ratio <= 1.0 + 1e-12 && rep.within_bound());

        let zero = CourregeHuntCharacteristics::from_hunt(&HuntCharacteristics::heat(k, 0.0).unwrap()).unwrap();
        assert_eq!(boundedness_ratio(&zero, &fam).unwrap().ratio, 0.0);

        for ch in [torus_general(), su2_general()] {
            let fam: Vec<_> = (0..4).map(|_| BandLimitedFunction::random(ch.kind, 3, 0.8, true, &mut r)).collect();
            let rep = boundedness_ratio(&ch, &fam).unwrap();
            assert!(rep.within_bound(), "{} > {}", rep.ratio, rep.bound.constant);
        }
    }

    #[test]
    fn compensator_density_matches_finite_differences() {
        let ch = torus_general();
        let gen = ch.generator().unwrap();
        let th = 0.8;
        let c = compensator_density(&gen, &t1(th)).unwrap();
        let h = 1e-5;
        let lam = |x: f64, t: &GroupElement| ch.lambda.eval(&t1(x), t).unwrap();
        let want: f64 = gen
            .rho
            .nodes
            .iter()
            .map(|n| n.weight * n.x[0] * (lam(th + h, &n.tau) - lam(th - h, &n.tau)) / (2.0 * h))
            .sum();
        assert!((c - want).abs() < 1e-7);
    }
}
