//! Lévy flows: solutions of Marcus-canonical SDEs `dφ = Y_i(φ) ⋄ dL^i`
//! driven by a Lévy process on `ℝ^p`, and jump diffusions built from them.

use num_complex::Complex64;

use super::pseudo_poisson::PseudoPoissonSpec;
use crate::error::{Error, Result};
use crate::fourier::BandLimitedFunction;
use crate::group::{exp_map, GroupElement, GroupKind, LieAlgebraVector};
use crate::linalg::{check_psd, ComplexMatrix};
use crate::repr::{basis_derivative, irreps_up_to, rep_matrix, IrrepId};
use crate::symbol::{Operator, Symbol};

/// Vector fields `Y_i = γ_i^j X_j` (`i < p`) and the characteristics
/// `(b, a, ν)` of the driving Lévy process. `ν` is a finite atomic measure
/// on `ℝ^p ∖ {0}`.
#[derive(Clone, Debug)]
pub struct SDESpec {
    pub kind: GroupKind,
    pub gamma: Vec<Vec<BandLimitedFunction>>,
    pub b: Vec<f64>,
    pub a: Vec<Vec<f64>>,
    pub nu: Vec<(Vec<f64>, f64)>,
    /// `dgamma[i][j][k] = X_k γ_i^j`.
    dgamma: Vec<Vec<Vec<BandLimitedFunction>>>,
}

impl SDESpec {
    pub fn new(
        kind: GroupKind,
        gamma: Vec<Vec<BandLimitedFunction>>,
        b: Vec<f64>,
        a: Vec<Vec<f64>>,
        nu: Vec<(Vec<f64>, f64)>,
    ) -> Result<Self> {
        let n = kind.dim();
        let p = gamma.len();
        if p == 0 || gamma.iter().any(|row| row.len() != n) {
            return Err(Error::InvalidArgument(format!("field coefficients must be p×{n} with p ≥ 1")));
        }
        if gamma.iter().flatten().any(|c| c.kind() != kind) {
            return Err(Error::InvalidArgument("field coefficient on the wrong group".into()));
        }
        if b.len() != p || a.len() != p {
            return Err(Error::DimensionMismatch {
                left: (p, p),
                right: (b.len(), a.len()),
            });
        }
        check_psd(&a, 1e-12)?;
        for (y, m) in &nu {
            if y.len() != p {
                return Err(Error::DimensionMismatch { left: (p, 1), right: (y.len(), 1) });
            }
            if !(m.is_finite() && *m > 0.0) {
                return Err(Error::InvalidArgument(format!("driving jump mass {m} must be positive")));
            }
            if y.iter().all(|v| *v == 0.0) {
                return Err(Error::InvalidArgument("driving Lévy measure charges the origin".into()));
            }
        }
        let dgamma = gamma
            .iter()
            .map(|row| row.iter().map(|c| (0..n).map(|k| c.derivative(k)).collect()).collect())
            .collect();
        let spec = Self { kind, gamma, b, a, nu, dgamma };
        spec.check_smoothness()?;
        Ok(spec)
    }

    /// `Y_i = X_i`, `p = n`.
    pub fn left_invariant(kind: GroupKind, b: Vec<f64>, a: Vec<Vec<f64>>, nu: Vec<(Vec<f64>, f64)>) -> Result<Self> {
        let n = kind.dim();
        let gamma = (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| BandLimitedFunction::constant(kind, if i == j { 1.0 } else { 0.0 }))
                    .collect()
            })
            .collect();
        Self::new(kind, gamma, b, a, nu)
    }

    pub fn p(&self) -> usize {
        self.gamma.len()
    }

    /// True when every `γ_i^j` is constant, so the flow is left-invariant.
    pub fn has_constant_fields(&self) -> bool {
        self.gamma.iter().flatten().all(|c| c.band() == 0)
    }

    /// Spectral derivatives of `γ` agree with central differences.
    fn check_smoothness(&self) -> Result<()> {
        let n = self.kind.dim();
        let h = 1e-5;
        let g = exp_map(self.kind, &LieAlgebraVector(vec![0.37; n]))?;
        for (i, row) in self.gamma.iter().enumerate() {
            for (j, c) in row.iter().enumerate() {
                for k in 0..n {
                    let e = LieAlgebraVector::basis(n, k);
                    let fd = (c.eval_re(&g.right_exp(&e.scale(h))?)? - c.eval_re(&g.right_exp(&e.scale(-h))?)?)
                        / (2.0 * h);
                    let exact = self.dgamma[i][j][k].eval_re(&g)?;
                    if (fd - exact).abs() > 1e-5 * (1.0 + exact.abs()) {
                        return Err(Error::InvalidArgument(format!(
                            "field coefficient γ[{i}][{j}] fails the derivative check"
                        )));
                    }
                }
            }
        }
        Ok(())
    }

    /// `γ(g)` as a `p × n` table.
    pub fn gamma_at(&self, g: &GroupElement) -> Result<Vec<Vec<f64>>> {
        self.gamma
            .iter()
            .map(|row| row.iter().map(|c| c.eval_re(g)).collect())
            .collect()
    }

    fn dgamma_at(&self, g: &GroupElement) -> Result<Vec<Vec<Vec<f64>>>> {
        self.dgamma
            .iter()
            .map(|row| {
                row.iter()
                    .map(|ds| ds.iter().map(|d| d.eval_re(g)).collect())
                    .collect()
            })
            .collect()
    }

    /// Coefficients of `y^i Y_i(g)` in the basis `X_j`.
    pub fn field_at(&self, y: &[f64], g: &GroupElement) -> Result<LieAlgebraVector> {
        let gam = self.gamma_at(g)?;
        Ok(LieAlgebraVector(combine(y, &gam, self.kind.dim())))
    }

    /// `ξ(y)(g)`: time-one flow of `y^i Y_i` started at `g`.
    pub fn jump_flow(&self, y: &[f64], g: &GroupElement) -> Result<GroupElement> {
        marcus_jump_flow(self, y, g)
    }

    /// Symbol of the generator at `(g, π)`.
    pub fn symbol_matrix(&self, g: &GroupElement, pi: &IrrepId) -> Result<ComplexMatrix> {
        let n = self.kind.dim();
        let p = self.p();
        let d = pi.dim();
        let gam = self.gamma_at(g)?;
        let dgam = self.dgamma_at(g)?;
        let dpi: Vec<ComplexMatrix> = (0..n).map(|k| basis_derivative(pi, k)).collect();
        let mut out = ComplexMatrix::zeros(d, d);
        let one = |x: f64| Complex64::new(x, 0.0);

        let drift = combine(&self.b, &gam, n);
        for (r, c) in drift.iter().enumerate() {
            out.axpy(one(*c), &dpi[r]);
        }
        for i in 0..p {
            for j in 0..p {
                let aij = 0.5 * self.a[i][j];
                if aij == 0.0 {
                    continue;
                }
                for k in 0..n {
                    for r in 0..n {
                        let second = aij * gam[i][k] * gam[j][r];
                        if second != 0.0 {
                            out.axpy(one(second), &dpi[k].matmul(&dpi[r]));
                        }
                        let first = aij * gam[i][k] * dgam[j][r][k];
                        if first != 0.0 {
                            out.axpy(one(first), &dpi[r]);
                        }
                    }
                }
            }
        }
        if !self.nu.is_empty() {
            let pig_inv = rep_matrix(pi, g)?.adjoint();
            for (y, m) in &self.nu {
                let target = self.jump_flow(y, g)?;
                let mut term = &pig_inv.matmul(&rep_matrix(pi, &target)?) - &ComplexMatrix::identity(d);
                if euclid(y) < 1.0 {
                    for (r, c) in combine(y, &gam, n).iter().enumerate() {
                        term.axpy(one(-c), &dpi[r]);
                    }
                }
                out.axpy(one(*m), &term);
            }
        }
        Ok(out)
    }

    pub fn symbol(&self, cutoff: u32) -> Symbol {
        let me = self.clone();
        Symbol::analytic(
            self.kind,
            irreps_up_to(self.kind, cutoff),
            self.has_constant_fields(),
            move |g, p| me.symbol_matrix(g, p),
        )
    }

    /// `(Y_i f)(g)` for every `i`, from the gradient `X f(g)`.
    fn y_derivs(gam: &[Vec<f64>], grad: &[Complex64]) -> Vec<Complex64> {
        gam.iter()
            .map(|row| row.iter().zip(grad).map(|(c, d)| d * c).sum())
            .collect()
    }
}

fn euclid(y: &[f64]) -> f64 {
    y.iter().map(|v| v * v).sum::<f64>().sqrt()
}

/// `Σ_i y^i γ_i^j` for each `j`.
fn combine(y: &[f64], gam: &[Vec<f64>], n: usize) -> Vec<f64> {
    (0..n).map(|j| y.iter().zip(gam).map(|(yi, row)| yi * row[j]).sum()).collect()
}

impl Operator for SDESpec {
    fn kind(&self) -> GroupKind {
        self.kind
    }

    /// `b^i Y_i f + ½ a^{ij} Y_i Y_j f + ∫(f(ξ(y)g) − f(g) − y^i Y_i f(g) 1_{|y|<1}) ν(dy)`.
    fn apply(&self, f: &BandLimitedFunction, g: &GroupElement) -> Result<Complex64> {
        let n = self.kind.dim();
        let p = self.p();
        let gam = self.gamma_at(g)?;
        let dgam = self.dgamma_at(g)?;
        let grad = f.gradient_at(g)?;
        let hess = f.hessian_at(g)?;
        let yf = Self::y_derivs(&gam, &grad);
        let mut out: Complex64 = self.b.iter().zip(&yf).map(|(b, v)| v * b).sum();
        for i in 0..p {
            for j in 0..p {
                let aij = 0.5 * self.a[i][j];
                if aij == 0.0 {
                    continue;
                }
                let mut yy = Complex64::new(0.0, 0.0);
                for k in 0..n {
                    for r in 0..n {
                        yy += (grad[r] * dgam[j][r][k] + hess[k][r] * gam[j][r]) * gam[i][k];
                    }
                }
                out += yy * aij;
            }
        }
        if !self.nu.is_empty() {
            let f0 = f.eval(g)?;
            for (y, m) in &self.nu {
                let mut term = f.eval(&self.jump_flow(y, g)?)? - f0;
                if euclid(y) < 1.0 {
                    term -= y.iter().zip(&yf).map(|(yi, v)| v * yi).sum::<Complex64>();
                }
                out += term * m;
            }
        }
        Ok(out)
    }
}

pub fn sde_generator_apply(spec: &SDESpec, f: &BandLimitedFunction, g: &GroupElement) -> Result<f64> {
    Ok(spec.apply(f, g)?.re)
}

pub fn sde_symbol(spec: &SDESpec, cutoff: u32) -> Symbol {
    spec.symbol(cutoff)
}

const FLOW_TOL: f64 = 1e-13;
const FLOW_MIN_STEP: f64 = 1e-10;

/// `Ω' = dexp⁻¹_{−Ω}(v)` to the order needed by a fourth-order scheme.
fn dexpinv(kind: GroupKind, omega: &LieAlgebraVector, v: &LieAlgebraVector) -> LieAlgebraVector {
    let c1 = kind.bracket(omega, v);
    let c2 = kind.bracket(omega, &c1);
    v.add(&c1.scale(0.5)).add(&c2.scale(1.0 / 12.0))
}

/// One Munthe-Kaas step of the classical fourth-order Runge–Kutta method
/// for `g' = g · F(g)`.
fn rkmk4_step(spec: &SDESpec, y: &[f64], g: &GroupElement, h: f64) -> Result<GroupElement> {
    let kind = spec.kind;
    let field = |x: &GroupElement| spec.field_at(y, x);
    let k1 = field(g)?;
    let o2 = k1.scale(0.5 * h);
    let k2 = dexpinv(kind, &o2, &field(&g.right_exp(&o2)?)?);
    let o3 = k2.scale(0.5 * h);
    let k3 = dexpinv(kind, &o3, &field(&g.right_exp(&o3)?)?);
    let o4 = k3.scale(h);
    let k4 = dexpinv(kind, &o4, &field(&g.right_exp(&o4)?)?);
    let omega = k1.add(&k2.scale(2.0)).add(&k3.scale(2.0)).add(&k4).scale(h / 6.0);
    g.right_exp(&omega)
}

/// `ξ(y)(g)`: solves `dξ/dv = y^i Y_i(ξ)` on `v ∈ [0, 1]` from `ξ(0) = g`
/// by a fourth-order Lie-group Runge–Kutta scheme, accepting a step when
/// one full step and two half steps agree to `1e-13`.
pub fn marcus_jump_flow(spec: &SDESpec, y: &[f64], g: &GroupElement) -> Result<GroupElement> {
    if y.len() != spec.p() {
        return Err(Error::DimensionMismatch { left: (spec.p(), 1), right: (y.len(), 1) });
    }
    if y.iter().all(|v| *v == 0.0) {
        return Ok(g.clone());
    }
    if spec.has_constant_fields() {
        let c = spec.field_at(y, g)?;
        return g.right_exp(&c);
    }
    let mut v = 0.0;
    let mut h = 0.25f64;
    let mut cur = g.clone();
    while v < 1.0 {
        h = h.min(1.0 - v);
        let full = rkmk4_step(spec, y, &cur, h)?;
        let half = rkmk4_step(spec, y, &cur, 0.5 * h)?;
        let two = rkmk4_step(spec, y, &half, 0.5 * h)?;
        let err = full.distance(&two);
        if err <= FLOW_TOL {
            v += h;
            cur = two;
            if err < FLOW_TOL / 64.0 {
                h *= 2.0;
            }
        } else {
            h *= 0.5;
            if h < FLOW_MIN_STEP {
                return Err(Error::StepUnderflow { at: v });
            }
        }
    }
    Ok(cur)
}

/// Marcus diffusion (no driving jumps) plus a pseudo-Poisson jump part.
#[derive(Clone, Debug)]
pub struct JumpDiffusion {
    pub diffusion: SDESpec,
    pub jumps: PseudoPoissonSpec,
}

impl JumpDiffusion {
    pub fn new(diffusion: SDESpec, jumps: PseudoPoissonSpec) -> Result<Self> {
        if !diffusion.nu.is_empty() {
            return Err(Error::InvalidArgument("jump diffusion takes its jumps from the kernel only".into()));
        }
        if diffusion.kind != jumps.kind() {
            return Err(Error::KindMismatch {
                left: diffusion.kind,
                right: jumps.kind(),
            });
        }
        Ok(Self { diffusion, jumps })
    }

    pub fn symbol_matrix(&self, g: &GroupElement, pi: &IrrepId) -> Result<ComplexMatrix> {
        Ok(&self.diffusion.symbol_matrix(g, pi)? + &self.jumps.symbol_matrix(g, pi)?)
    }

    pub fn symbol(&self, cutoff: u32) -> Symbol {
        let me = self.clone();
        Symbol::analytic(self.diffusion.kind, irreps_up_to(self.diffusion.kind, cutoff), false, move |g, p| {
            me.symbol_matrix(g, p)
        })
    }
}

impl Operator for JumpDiffusion {
    fn kind(&self) -> GroupKind {
        self.diffusion.kind
    }
    fn apply(&self, f: &BandLimitedFunction, g: &GroupElement) -> Result<Complex64> {
        Ok(self.diffusion.apply(f, g)? + self.jumps.apply(f, g)?)
    }
}

pub fn jump_diffusion_symbol(diffusion: &SDESpec, jumps: &PseudoPoissonSpec, cutoff: u32) -> Result<Symbol> {
    Ok(JumpDiffusion::new(diffusion.clone(), jumps.clone())?.symbol(cutoff))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators::pseudo_poisson::{RightTranslate, StateDependentShift, Stay};
    use crate::symbol::symbol_from_operator;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use std::sync::Arc;

    fn t1(theta: f64) -> GroupElement {
        GroupElement::torus(&[theta])
    }

    /// `γ(θ) = 1 + ½ sin θ` on the circle.
    fn wobbly(b: f64, a: f64, nu: Vec<(Vec<f64>, f64)>) -> SDESpec {
        let gamma = vec![vec![BandLimitedFunction::torus_trig(1.0, &[], &[0.5])]];
        SDESpec::new(GroupKind::Torus(1), gamma, vec![b], vec![vec![a]], nu).unwrap()
    }

    fn su2_fields() -> SDESpec {
        let c = |pi: IrrepId, k, j, s: f64| BandLimitedFunction::matrix_coefficient(&pi, k, j).real_part().scale(s);
        let k = GroupKind::SU2;
        let gamma = vec![
            vec![
                c(IrrepId::SU2Spin(1), 0, 0, 0.5).add(&BandLimitedFunction::constant(k, 1.0)),
                BandLimitedFunction::constant(k, 0.3),
                c(IrrepId::SU2Spin(2), 1, 0, 0.4),
            ],
            vec![
                BandLimitedFunction::constant(k, 0.0),
                c(IrrepId::SU2Spin(1), 1, 0, 0.7).add(&BandLimitedFunction::constant(k, 0.8)),
                BandLimitedFunction::constant(k, -0.2),
            ],
        ];
        let a = vec![vec![0.6, 0.1], vec![0.1, 0.3]];
        let nu = vec![(vec![0.4, -0.3], 0.7), (vec![1.2, 0.5], 0.2)];
        SDESpec::new(k, gamma, vec![0.2, -0.4], a, nu).unwrap()
    }

    #[test]
    fn constant_fields_give_half_casimir() {
        let id = vec![vec![1.0, 0.0, 0.0], vec![0.0, 1.0, 0.0], vec![0.0, 0.0, 1.0]];
        let spec = SDESpec::left_invariant(GroupKind::SU2, vec![0.0; 3], id, vec![]).unwrap();
        let s = spec.symbol(4);
        assert!(s.is_g_independent());
        for p in s.irreps() {
            let m = s.eval(&GroupElement::su2(0.2, 0.4, 0.1, 0.9), p).unwrap();
            let expect = ComplexMatrix::identity(p.dim()).scale_real(-0.5 * p.casimir());
            assert!(m.max_abs_diff(&expect) < 1e-12, "{p:?}");
        }
    }

    #[test]
    fn constant_field_single_jump() {
        let n3 = vec![vec![0.0; 1]; 1];
        let gamma = vec![vec![
            BandLimitedFunction::constant(GroupKind::SU2, 1.0),
            BandLimitedFunction::constant(GroupKind::SU2, 0.0),
            BandLimitedFunction::constant(GroupKind::SU2, 0.0),
        ]];
        let spec = SDESpec::new(GroupKind::SU2, gamma, vec![0.0], n3, vec![(vec![1.0], 1.0)]).unwrap();
        let jump = exp_map(GroupKind::SU2, &LieAlgebraVector(vec![1.0, 0.0, 0.0])).unwrap();
        let g = GroupElement::su2(0.3, -0.5, 0.2, 0.7);
        for p in irreps_up_to(GroupKind::SU2, 3) {
            let expect = &rep_matrix(&p, &jump).unwrap() - &ComplexMatrix::identity(p.dim());
            assert!(spec.symbol_matrix(&g, &p).unwrap().max_abs_diff(&expect) < 1e-12);
        }
    }

    /// Classical RK4 on the scalar angle with a fixed fine step.
    fn circle_flow_reference(y: f64, theta0: f64) -> f64 {
        let rhs = |t: f64| y * (1.0 + 0.5 * t.sin());
        let steps = 4000;
        let h = 1.0 / steps as f64;
        let mut t = theta0;
        for _ in 0..steps {
            let k1 = rhs(t);
            let k2 = rhs(t + 0.5 * h * k1);
            let k3 = rhs(t + 0.5 * h * k2);
            let k4 = rhs(t + h * k3);
            t += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        }
        t
    }

    #[test]
    fn circle_flow_matches_reference() {
        let spec = wobbly(0.0, 0.0, vec![]);
        for (y, th) in [(0.7, 0.1), (-2.3, 1.9), (4.0, -2.5)] {
            let got = marcus_jump_flow(&spec, &[y], &t1(th)).unwrap();
            let expect = t1(circle_flow_reference(y, th));
            assert!(got.distance(&expect) < 1e-8, "{y} {th}");
        }
        assert!(marcus_jump_flow(&spec, &[0.0], &t1(0.3)).unwrap().approx_eq(&t1(0.3), 0.0));
    }

    #[test]
    fn sphere_flow_matches_quaternion_rk4() {
        let spec = su2_fields();
        let y = [0.9, -1.4];
        let g = GroupElement::su2(0.4, 0.1, -0.7, 0.3);
        let got = marcus_jump_flow(&spec, &y, &g).unwrap();
        // q' = q · (c(q)·(i, j, k)/2), integrated as an ODE in ℝ⁴
        let rhs = |q: [f64; 4]| -> [f64; 4] {
            let qe = GroupElement::su2(q[0], q[1], q[2], q[3]);
            let c = spec.field_at(&y, &qe).unwrap().0;
            let (w, x, yy, z) = (q[0], q[1], q[2], q[3]);
            let (u1, u2, u3) = (c[0] / 2.0, c[1] / 2.0, c[2] / 2.0);
            [
                -x * u1 - yy * u2 - z * u3,
                w * u1 + yy * u3 - z * u2,
                w * u2 + z * u1 - x * u3,
                w * u3 + x * u2 - yy * u1,
            ]
        };
        let GroupElement::SU2(q0) = &g else { unreachable!() };
        let mut q = *q0;
        let steps = 4000;
        let h = 1.0 / steps as f64;
        let lin = |a: [f64; 4], b: [f64; 4], s: f64| [a[0] + s * b[0], a[1] + s * b[1], a[2] + s * b[2], a[3] + s * b[3]];
        for _ in 0..steps {
            let k1 = rhs(q);
            let k2 = rhs(lin(q, k1, 0.5 * h));
            let k3 = rhs(lin(q, k2, 0.5 * h));
            let k4 = rhs(lin(q, k3, h));
            for i in 0..4 {
                q[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
            }
        }
        let expect = GroupElement::su2(q[0], q[1], q[2], q[3]);
        assert!(got.distance(&expect) < 1e-9);
    }

    #[test]
    fn constant_field_flow_is_exponential() {
        let id = vec![vec![0.0; 3]; 3];
        let spec = SDESpec::left_invariant(GroupKind::SU2, vec![0.0; 3], id, vec![]).unwrap();
        let g = GroupElement::su2(0.5, 0.5, 0.5, 0.5);
        let y = [0.3, -1.0, 2.0];
        let got = marcus_jump_flow(&spec, &y, &g).unwrap();
        let expect = g.compose(&exp_map(GroupKind::SU2, &LieAlgebraVector(y.to_vec())).unwrap()).unwrap();
        assert!(got.distance(&expect) < 1e-14);
    }

    #[test]
    fn circle_symbol_matches_extraction() {
        let spec = wobbly(0.3, 0.8, vec![(vec![0.5], 1.1), (vec![-1.7], 0.4)]);
        let grid: Vec<_> = (0..5).map(|k| t1(-2.0 + k as f64)).collect();
        let irreps = irreps_up_to(GroupKind::Torus(1), 6);
        let ex = symbol_from_operator(&spec, &irreps, &grid).unwrap();
        assert!(ex.max_distance(&spec.symbol(6), &grid).unwrap() < 1e-8);
    }

    #[test]
    fn sphere_symbol_matches_extraction() {
        let spec = su2_fields();
        let grid = vec![GroupElement::su2(0.3, 0.2, 0.8, -0.1), GroupElement::su2(-0.6, 0.1, 0.2, 0.5)];
        let irreps = irreps_up_to(GroupKind::SU2, 3);
        let ex = symbol_from_operator(&spec, &irreps, &grid).unwrap();
        assert!(ex.max_distance(&spec.symbol(3), &grid).unwrap() < 1e-8);
    }

    #[test]
    fn conservative_and_maximum_principle() {
        let spec = su2_fields();
        let one = BandLimitedFunction::constant(GroupKind::SU2, 1.0);
        let g = GroupElement::su2(0.1, 0.9, -0.2, 0.3);
        assert!(spec.apply(&one, &g).unwrap().norm() < 1e-10);

        let circ = wobbly(0.5, 1.0, vec![(vec![0.6], 2.0)]);
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let f = BandLimitedFunction::random(GroupKind::Torus(1), 5, 0.8, true, &mut rng);
        let (gmax, _) = (0..4000)
            .map(|k| t1(k as f64 * std::f64::consts::TAU / 4000.0))
            .map(|g| {
                let v = f.eval_re(&g).unwrap();
                (g, v)
            })
            .fold((t1(0.0), f64::MIN), |acc, x| if x.1 > acc.1 { x } else { acc });
        // refine the maximiser with Newton steps
        let mut th = gmax.log().0[0];
        for _ in 0..20 {
            let gg = t1(th);
            th -= f.derivative(0).eval_re(&gg).unwrap() / f.second_derivative(0, 0).eval_re(&gg).unwrap();
        }
        let shifted = f.add(&BandLimitedFunction::constant(GroupKind::Torus(1), 10.0));
        assert!(circ.apply(&shifted, &t1(th)).unwrap().re <= 1e-8);
    }

    #[test]
    fn jump_diffusion_is_a_sum() {
        let diff = wobbly(0.4, 0.9, vec![]);
        let pp = PseudoPoissonSpec::new(1.5, Arc::new(StateDependentShift::sine(1.0, 0.5))).unwrap();
        let jd = jump_diffusion_symbol(&diff, &pp, 5).unwrap();
        let grid: Vec<_> = (0..4).map(|k| t1(0.7 * k as f64)).collect();
        let sum = diff.symbol(5).add(&pp.symbol(5)).unwrap();
        assert!(jd.max_distance(&sum, &grid).unwrap() == 0.0);

        let idle = PseudoPoissonSpec::new(0.0, Arc::new(RightTranslate { tau: t1(1.0) })).unwrap();
        let only_diff = jump_diffusion_symbol(&diff, &idle, 5).unwrap();
        assert!(only_diff.max_distance(&diff.symbol(5), &grid).unwrap() < 1e-15);

        let still = wobbly(0.0, 0.0, vec![]);
        let only_jump = jump_diffusion_symbol(&still, &pp, 5).unwrap();
        assert!(only_jump.max_distance(&pp.symbol(5), &grid).unwrap() < 1e-15);

        let stay = PseudoPoissonSpec::new(2.0, Arc::new(Stay(GroupKind::Torus(1)))).unwrap();
        let ex = symbol_from_operator(
            &JumpDiffusion::new(diff.clone(), stay).unwrap(),
            &irreps_up_to(GroupKind::Torus(1), 5),
            &grid,
        )
        .unwrap();
        assert!(ex.max_distance(&diff.symbol(5), &grid).unwrap() < 1e-9);
    }

    #[test]
    fn rejects_bad_specs() {
        let g = vec![vec![BandLimitedFunction::constant(GroupKind::Torus(1), 1.0)]];
        assert!(SDESpec::new(GroupKind::Torus(1), g.clone(), vec![0.0], vec![vec![-1.0]], vec![]).is_err());
        assert!(SDESpec::new(GroupKind::Torus(1), g, vec![0.0], vec![vec![0.0]], vec![(vec![0.0], 1.0)]).is_err());
    }
}
