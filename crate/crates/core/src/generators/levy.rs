//! Lévy measures on `G − {e}` and their quadrature.

use std::f64::consts::{PI, TAU};
use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::group::{exp_map, CoordinateSystem, GroupElement, GroupKind, LieAlgebraVector};
use crate::quadrature::gauss_legendre;

pub type DensityFn = dyn Fn(&GroupElement) -> f64 + Send + Sync;

/// A Lévy measure: finitely many atoms, or a density with respect to Haar
/// measure that may blow up like `|log τ|^{-n-α}` at the identity.
#[derive(Clone)]
pub enum LevyMeasure {
    Atomic(Vec<(GroupElement, f64)>),
    HaarDensity {
        kind: GroupKind,
        density: Arc<DensityFn>,
        /// Small-ball exponent `α < 2`; `-n` or below for bounded densities.
        exponent: f64,
    },
}

impl fmt::Debug for LevyMeasure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LevyMeasure::Atomic(a) => f.debug_tuple("Atomic").field(a).finish(),
            LevyMeasure::HaarDensity { kind, exponent, .. } => f
                .debug_struct("HaarDensity")
                .field("kind", kind)
                .field("exponent", exponent)
                .finish_non_exhaustive(),
        }
    }
}

const IDENTITY_TOL: f64 = 1e-12;

impl LevyMeasure {
    pub fn zero() -> Self {
        LevyMeasure::Atomic(Vec::new())
    }

    pub fn atomic(atoms: Vec<(GroupElement, f64)>) -> Result<Self> {
        for (tau, m) in &atoms {
            if !(m.is_finite() && *m > 0.0) {
                return Err(Error::InvalidArgument(format!("atom mass {m} must be positive")));
            }
            if tau.distance_from_identity() <= IDENTITY_TOL {
                return Err(Error::InvalidArgument("Lévy measure has an atom at e".into()));
            }
        }
        Ok(LevyMeasure::Atomic(atoms))
    }

    /// Atoms at each `τ` and `τ⁻¹`, each carrying the given mass.
    pub fn symmetric_atoms(atoms: &[(GroupElement, f64)]) -> Result<Self> {
        let mut all = Vec::with_capacity(2 * atoms.len());
        for (tau, m) in atoms {
            all.push((tau.clone(), *m));
            all.push((tau.inverse(), *m));
        }
        Self::atomic(all)
    }

    pub fn haar_density<F>(kind: GroupKind, density: F, exponent: f64) -> Result<Self>
    where
        F: Fn(&GroupElement) -> f64 + Send + Sync + 'static,
    {
        if !(exponent < 2.0) {
            return Err(Error::InvalidArgument(format!(
                "small-ball exponent {exponent} must be below 2"
            )));
        }
        match kind {
            GroupKind::Torus(d) if (1..=2).contains(&d) => {}
            GroupKind::SU2 => {}
            _ => {
                return Err(Error::InvalidArgument(format!(
                    "Haar-density Lévy measures are supported on T^1, T^2 and SU(2), not {kind}"
                )))
            }
        }
        Ok(LevyMeasure::HaarDensity {
            kind,
            density: Arc::new(density),
            exponent,
        })
    }

    pub fn is_zero(&self) -> bool {
        matches!(self, LevyMeasure::Atomic(a) if a.is_empty())
    }

    pub fn is_atomic(&self) -> bool {
        matches!(self, LevyMeasure::Atomic(_))
    }

    pub fn total_mass(&self) -> Option<f64> {
        match self {
            LevyMeasure::Atomic(a) => Some(a.iter().map(|(_, m)| m).sum()),
            LevyMeasure::HaarDensity { .. } => None,
        }
    }

    /// Quadrature nodes realizing the measure.
    pub fn discretize(&self, cs: &CoordinateSystem, q: &LevyQuadrature) -> Result<DiscreteLevy> {
        match self {
            LevyMeasure::Atomic(atoms) => {
                let nodes = atoms
                    .iter()
                    .map(|(tau, m)| {
                        if tau.kind() != cs.kind {
                            return Err(Error::KindMismatch {
                                left: tau.kind(),
                                right: cs.kind,
                            });
                        }
                        Ok(JumpNode::new(tau.clone(), cs.coords(tau), *m, false))
                    })
                    .collect::<Result<Vec<_>>>()?;
                Ok(DiscreteLevy { nodes })
            }
            LevyMeasure::HaarDensity {
                kind,
                density,
                exponent,
            } => {
                if *kind != cs.kind {
                    return Err(Error::KindMismatch {
                        left: *kind,
                        right: cs.kind,
                    });
                }
                discretize_density(cs, density.as_ref(), *exponent, q)
            }
        }
    }

    /// `∫ (Σ x_i² ∧ 1) dν`.
    pub fn levy_integral(&self, cs: &CoordinateSystem) -> Result<f64> {
        let d = self.discretize(cs, &LevyQuadrature::default())?;
        let v: f64 = d.nodes.iter().map(|n| n.weight * n.x_norm_sqr().min(1.0)).sum();
        if !v.is_finite() {
            return Err(Error::Assumption("Lévy integrability integral diverges".into()));
        }
        Ok(v)
    }

    /// Spot check of `ν(A) = ν(A⁻¹)`.
    pub fn is_symmetric(&self, tol: f64) -> bool {
        match self {
            LevyMeasure::Atomic(atoms) => atoms.iter().all(|(tau, _)| {
                let mass_at = |p: &GroupElement| -> f64 {
                    atoms
                        .iter()
                        .filter(|(s, _)| s.approx_eq(p, 1e-10))
                        .map(|(_, m)| m)
                        .sum()
                };
                (mass_at(tau) - mass_at(&tau.inverse())).abs() <= tol
            }),
            LevyMeasure::HaarDensity { kind, density, .. } => {
                sample_points(*kind).iter().all(|tau| {
                    let (a, b) = (density(tau), density(&tau.inverse()));
                    (a - b).abs() <= tol * a.abs().max(b.abs()).max(1.0)
                })
            }
        }
    }
}

/// Deterministic probe points away from the identity.
pub(crate) fn sample_points(kind: GroupKind) -> Vec<GroupElement> {
    let n = kind.dim();
    (1..=24)
        .map(|k| {
            let v: Vec<f64> = (0..n)
                .map(|i| ((k * (i + 3)) as f64 * 0.731).sin() * 1.3 + 0.05 * k as f64 / 24.0)
                .collect();
            exp_map(kind, &LieAlgebraVector(v)).expect("matching dimension")
        })
        .collect()
}

/// A weighted jump target `τ` with its coordinates `x(τ)`.
#[derive(Clone, Debug)]
pub struct JumpNode {
    pub tau: GroupElement,
    pub tau_inv: GroupElement,
    pub x: Vec<f64>,
    pub weight: f64,
    /// Inside the small ball: integrands are replaced by their
    /// second-order Taylor form in `x`.
    pub inner: bool,
}

impl JumpNode {
    fn new(tau: GroupElement, x: Vec<f64>, weight: f64, inner: bool) -> Self {
        Self {
            tau_inv: tau.inverse(),
            tau,
            x,
            weight,
            inner,
        }
    }

    pub fn x_norm_sqr(&self) -> f64 {
        self.x.iter().map(|v| v * v).sum()
    }
}

#[derive(Clone, Debug, Default)]
pub struct DiscreteLevy {
    pub nodes: Vec<JumpNode>,
}

impl DiscreteLevy {
    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn outer(&self) -> impl Iterator<Item = &JumpNode> {
        self.nodes.iter().filter(|n| !n.inner)
    }

    pub fn inner(&self) -> impl Iterator<Item = &JumpNode> {
        self.nodes.iter().filter(|n| n.inner)
    }
}

/// Node counts for discretizing a Haar-density Lévy measure in polar normal
/// coordinates `τ = exp(r u)`.
#[derive(Clone, Debug)]
pub struct LevyQuadrature {
    /// Radius of the Taylor ball; must sit inside the exact-coordinate ball.
    pub small_radius: f64,
    pub inner_order: usize,
    pub outer_panels: usize,
    pub outer_order: usize,
    /// Gauss–Legendre nodes in `cos θ` on the 2-sphere.
    pub polar_order: usize,
    /// Azimuths on the 2-sphere; Gauss–Legendre nodes per sector on `T^2`.
    pub azimuths: usize,
}

impl Default for LevyQuadrature {
    fn default() -> Self {
        Self {
            small_radius: 1e-3,
            inner_order: 12,
            outer_panels: 6,
            outer_order: 8,
            polar_order: 6,
            azimuths: 12,
        }
    }
}

/// Directions on `S^{n-1}` with weights summing to its area. On `T^2` the
/// circle is split into the eight sectors on which the distance to the
/// boundary of `[-π, π]²` is smooth.
fn sphere_rule(kind: GroupKind, q: &LevyQuadrature) -> Vec<(Vec<f64>, f64)> {
    match kind {
        GroupKind::Torus(1) => vec![(vec![1.0], 1.0), (vec![-1.0], 1.0)],
        GroupKind::Torus(_) => {
            let (c, w) = gauss_legendre(q.azimuths);
            let h = PI / 4.0;
            let mut out = Vec::new();
            for sector in 0..8 {
                for (ci, wi) in c.iter().zip(&w) {
                    let t = h * (sector as f64 + 0.5 * (ci + 1.0));
                    out.push((vec![t.cos(), t.sin()], 0.5 * h * wi));
                }
            }
            out
        }
        GroupKind::SU2 => {
            let (c, w) = gauss_legendre(q.polar_order);
            let mut out = Vec::new();
            for (ct, wt) in c.iter().zip(&w) {
                let st = (1.0 - ct * ct).sqrt();
                for k in 0..q.azimuths {
                    let p = TAU * (k as f64 + 0.5) / q.azimuths as f64;
                    out.push((vec![st * p.cos(), st * p.sin(), *ct], wt * TAU / q.azimuths as f64));
                }
            }
            out
        }
    }
}

/// Density of normalized Haar measure in exponential coordinates.
fn haar_jacobian(kind: GroupKind, r: f64) -> f64 {
    match kind {
        GroupKind::Torus(d) => TAU.powi(-(d as i32)),
        GroupKind::SU2 => {
            if r < 1e-8 {
                1.0 / (16.0 * PI * PI)
            } else {
                (r / 2.0).sin().powi(2) / (4.0 * PI * PI * r * r)
            }
        }
    }
}

fn discretize_density(
    cs: &CoordinateSystem,
    density: &DensityFn,
    alpha: f64,
    q: &LevyQuadrature,
) -> Result<DiscreteLevy> {
    let kind = cs.kind;
    let n = kind.dim();
    let rs = q.small_radius;
    if !(rs > 0.0 && rs < cs.exact_radius()) {
        return Err(Error::InvalidArgument(format!(
            "small-ball radius {rs} must lie inside the exact-coordinate ball {}",
            cs.exact_radius()
        )));
    }
    let (gx, gw) = gauss_legendre(q.inner_order);
    let (ox, ow) = gauss_legendre(q.outer_order);
    let mut nodes = Vec::new();
    let mut push = |u: &[f64], wu: f64, r: f64, wr: f64, inner: bool| -> Result<()> {
        let v = LieAlgebraVector(u.iter().map(|c| c * r).collect());
        let tau = exp_map(kind, &v)?;
        let dens = density(&tau);
        if !dens.is_finite() || dens < 0.0 {
            return Err(Error::Assumption(format!("Lévy density is {dens} at radius {r}")));
        }
        let w = wu * wr * r.powi(n as i32 - 1) * haar_jacobian(kind, r) * dens;
        if w > 0.0 {
            let x = cs.coords(&tau);
            nodes.push(JumpNode::new(tau, x, w, inner));
        }
        Ok(())
    };
    for (u, wu) in sphere_rule(kind, q) {
        let r_max = match kind {
            GroupKind::Torus(_) => PI / u.iter().fold(0.0f64, |m, c| m.max(c.abs())),
            GroupKind::SU2 => TAU,
        };
        if alpha <= -(n as f64) {
            // bounded density: plain panels in r from the origin
            let mut breaks = vec![0.0];
            for b in [cs.exact_radius(), cs.radius] {
                if b < r_max {
                    breaks.push(b);
                }
            }
            breaks.push(r_max);
            for seg in breaks.windows(2) {
                let h = (seg[1] - seg[0]) / q.outer_panels as f64;
                for k in 0..q.outer_panels {
                    let lo = seg[0] + k as f64 * h;
                    for (xi, wi) in ox.iter().zip(&ow) {
                        push(&u, wu, lo + 0.5 * h * (xi + 1.0), 0.5 * h * wi, false)?;
                    }
                }
            }
            continue;
        }
        // small ball: r = rs s^{1/(2-α)} flattens the r^{1-α} weight
        let p = 1.0 / (2.0 - alpha);
        for (s, ws) in gx.iter().zip(&gw) {
            let s = 0.5 * (s + 1.0);
            let r = rs * s.powf(p);
            let dr = rs * p * s.powf(p - 1.0) * 0.5 * ws;
            push(&u, wu, r, dr, true)?;
        }
        // outer shells, split where the cutoff profile changes regime
        let mut breaks = vec![rs];
        for b in [cs.exact_radius(), cs.radius] {
            if b > rs && b < r_max {
                breaks.push(b);
            }
        }
        breaks.push(r_max);
        for seg in breaks.windows(2) {
            let (la, lb) = (seg[0].ln(), seg[1].ln());
            let h = (lb - la) / q.outer_panels as f64;
            for k in 0..q.outer_panels {
                let lo = la + k as f64 * h;
                for (xi, wi) in ox.iter().zip(&ow) {
                    let r = (lo + 0.5 * h * (xi + 1.0)).exp();
                    push(&u, wu, r, r * 0.5 * h * wi, false)?;
                }
            }
        }
    }
    Ok(DiscreteLevy { nodes })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn atom_at_identity_rejected() {
        let e = GroupKind::Torus(1).identity();
        assert!(LevyMeasure::atomic(vec![(e, 1.0)]).is_err());
        assert!(LevyMeasure::atomic(vec![(GroupElement::torus(&[1.0]), -1.0)]).is_err());
    }

    #[test]
    fn bounded_density_total_mass() {
        // ρ ≡ 1 is Haar measure itself
        for kind in [GroupKind::Torus(1), GroupKind::Torus(2), GroupKind::SU2] {
            let nu = LevyMeasure::haar_density(kind, |_| 1.0, -(kind.dim() as f64)).unwrap();
            let d = nu.discretize(&CoordinateSystem::standard(kind), &LevyQuadrature::default()).unwrap();
            let total: f64 = d.nodes.iter().map(|n| n.weight).sum();
            assert!((total - 1.0).abs() < 1e-9, "{kind}: {total}");
        }
    }

    #[test]
    fn stable_like_second_moment_on_circle() {
        // ρ(θ) = |θ|^{-1-α} on (-π, π]; ∫_{|θ|<r} θ² ρ dθ/2π = 2 r^{2-α}/((2-α)2π)
        let alpha = 1.5;
        let nu = LevyMeasure::haar_density(
            GroupKind::Torus(1),
            move |t| t.log().norm().powf(-1.0 - alpha),
            alpha,
        )
        .unwrap();
        let cs = CoordinateSystem::standard(GroupKind::Torus(1));
        let d = nu.discretize(&cs, &LevyQuadrature::default()).unwrap();
        let r = 0.5;
        let m: f64 = d
            .nodes
            .iter()
            .filter(|n| n.tau.distance_from_identity() < r)
            .map(|n| n.weight * n.x_norm_sqr())
            .sum();
        let expect = 2.0 * r.powf(2.0 - alpha) / ((2.0 - alpha) * TAU);
        assert!((m - expect).abs() < 1e-10 * expect.max(1.0), "{m} vs {expect}");
        assert!(nu.levy_integral(&cs).unwrap().is_finite());
    }

    #[test]
    fn symmetry_detection() {
        let tau = GroupElement::su2(0.8, 0.1, 0.5, -0.2);
        let sym = LevyMeasure::symmetric_atoms(&[(tau.clone(), 0.7)]).unwrap();
        assert!(sym.is_symmetric(1e-12));
        let asym = LevyMeasure::atomic(vec![(tau, 0.7)]).unwrap();
        assert!(!asym.is_symmetric(1e-12));
        let dens = LevyMeasure::haar_density(GroupKind::SU2, |t| 1.0 + t.log().0[0], -3.0).unwrap();
        assert!(!dens.is_symmetric(1e-9));
    }
}
