//! Normalized Haar quadrature and one-dimensional Gauss–Legendre rules.

use std::f64::consts::{PI, TAU};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::group::{GroupElement, GroupKind};

/// Gauss–Legendre nodes and weights on `[-1, 1]`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1);
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        // Tricomi initial guess, then Newton on P_n
        let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre_with_derivative(n, x);
        dp = if d != 0.0 { d } else { dp };
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    (nodes, weights)
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, x);
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Composite Gauss–Legendre rule on `[a, b]` with `panels` equal panels of
/// `order` points each.
pub fn composite_gauss_legendre(a: f64, b: f64, panels: usize, order: usize) -> Vec<(f64, f64)> {
    let (x, w) = gauss_legendre(order);
    let h = (b - a) / panels as f64;
    let mut out = Vec::with_capacity(panels * order);
    for p in 0..panels {
        let lo = a + p as f64 * h;
        for (xi, wi) in x.iter().zip(&w) {
            out.push((lo + 0.5 * h * (xi + 1.0), 0.5 * h * wi));
        }
    }
    out
}

/// Weighted node set realizing normalized Haar measure.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct QuadratureRule {
    pub kind: GroupKind,
    pub nodes: Vec<GroupElement>,
    pub weights: Vec<f64>,
    /// Largest irrep label integrated exactly: `max |n_i|` on the torus,
    /// `2j` on `SU(2)`.
    pub band: u32,
}

impl QuadratureRule {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&GroupElement, f64)> {
        self.nodes.iter().zip(self.weights.iter().copied())
    }

    pub fn integrate<F: FnMut(&GroupElement) -> f64>(&self, mut f: F) -> f64 {
        self.iter().map(|(g, w)| w * f(g)).sum()
    }

    pub fn integrate_complex<F: FnMut(&GroupElement) -> num_complex::Complex64>(
        &self,
        mut f: F,
    ) -> num_complex::Complex64 {
        self.iter().map(|(g, w)| f(g) * w).sum()
    }

    pub fn require_band(&self, required: u32) -> Result<()> {
        if self.band < required {
            Err(Error::InsufficientBand {
                required,
                available: self.band,
            })
        } else {
            Ok(())
        }
    }

    /// Smallest resolution whose band covers `band`.
    pub fn resolution_for_band(kind: GroupKind, band: u32) -> u32 {
        match kind {
            GroupKind::Torus(_) => band + 1,
            GroupKind::SU2 => band / 2 + 1,
        }
    }
}

/// Product rule for normalized Haar measure.
///
/// Torus: `resolution` equispaced nodes per angle, exact for characters with
/// `max|n_i| ≤ resolution - 1`. `SU(2)`: ZYZ Euler angles with `resolution`
/// equispaced `α ∈ [0, 2π)`, `2·resolution` equispaced `γ ∈ [0, 4π)` and
/// `resolution` Gauss–Legendre nodes in `cos β`; exact for every matrix
/// coefficient with `2j ≤ 2·resolution - 1`.
pub fn haar_quadrature(kind: GroupKind, resolution: u32) -> Result<QuadratureRule> {
    if resolution == 0 {
        return Err(Error::InvalidArgument("quadrature resolution must be ≥ 1".into()));
    }
    let r = resolution as usize;
    match kind {
        GroupKind::Torus(d) => {
            if d == 0 {
                return Err(Error::InvalidArgument("torus dimension must be ≥ 1".into()));
            }
            let total = r.checked_pow(d as u32).filter(|&t| t <= 50_000_000).ok_or_else(|| {
                Error::InvalidArgument(format!("{r}^{d} quadrature nodes is too many"))
            })?;
            let w = 1.0 / total as f64;
            let mut nodes = Vec::with_capacity(total);
            for flat in 0..total {
                let mut idx = flat;
                let mut angles = Vec::with_capacity(d);
                for _ in 0..d {
                    angles.push(TAU * (idx % r) as f64 / r as f64);
                    idx /= r;
                }
                nodes.push(GroupElement::Torus(angles));
            }
            Ok(QuadratureRule {
                kind,
                weights: vec![w; total],
                nodes,
                band: resolution - 1,
            })
        }
        GroupKind::SU2 => {
            let (x, wx) = gauss_legendre(r);
            let na = r;
            let ng = 2 * r;
            let mut nodes = Vec::with_capacity(na * ng * r);
            let mut weights = Vec::with_capacity(na * ng * r);
            for ia in 0..na {
                let alpha = TAU * ia as f64 / na as f64;
                for (cb, wb) in x.iter().zip(&wx) {
                    let beta = cb.clamp(-1.0, 1.0).acos();
                    for ig in 0..ng {
                        let gamma = 2.0 * TAU * ig as f64 / ng as f64;
                        nodes.push(GroupElement::from_euler_zyz(alpha, beta, gamma));
                        weights.push(0.5 * wb / (na * ng) as f64);
                    }
                }
            }
            Ok(QuadratureRule {
                kind,
                nodes,
                weights,
                band: 2 * resolution - 1,
            })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;

    #[test]
    fn gauss_legendre_integrates_polynomials() {
        let (x, w) = gauss_legendre(6);
        for deg in 0..12 {
            let q: f64 = x.iter().zip(&w).map(|(xi, wi)| wi * xi.powi(deg)).sum();
            let exact = if deg % 2 == 1 { 0.0 } else { 2.0 / (deg as f64 + 1.0) };
            assert!((q - exact).abs() < 1e-14, "degree {deg}");
        }
    }

    #[test]
    fn torus_rule_discrete_orthogonality() {
        let q = haar_quadrature(GroupKind::Torus(1), 8).unwrap();
        assert_eq!(q.len(), 8);
        assert!(q.weights.iter().all(|&w| (w - 0.125).abs() < 1e-16));
        assert_eq!(q.band, 7);
        for n in 1..=7i32 {
            for s in [-1, 1] {
                let z = q.integrate_complex(|g| {
                    let GroupElement::Torus(a) = g else { unreachable!() };
                    Complex64::new(0.0, (s * n) as f64 * a[0]).exp()
                });
                assert!(z.norm() < 1e-14);
            }
        }
        assert!((q.integrate(|_| 1.0) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn su2_rule_weights_and_constant() {
        let q = haar_quadrature(GroupKind::SU2, 5).unwrap();
        let total: f64 = q.weights.iter().sum();
        assert!((total - 1.0).abs() < 1e-13);
        assert!(q.weights.iter().all(|&w| w > 0.0));
        assert!(q.nodes.iter().all(|g| g.norm_defect() < 1e-14));
    }

    #[test]
    fn su2_rule_kills_defining_character() {
        // χ_{1/2}(g) = 2w for the unit quaternion
        for r in 1..5 {
            let q = haar_quadrature(GroupKind::SU2, r).unwrap();
            let chi = q.integrate(|g| {
                let GroupElement::SU2(qq) = g else { unreachable!() };
                2.0 * qq[0]
            });
            assert!(chi.abs() < 1e-12, "resolution {r}");
        }
    }

    #[test]
    fn composite_rule_integrates_exponential() {
        let rule = composite_gauss_legendre(0.0, 3.0, 20, 8);
        let s: f64 = rule.iter().map(|(t, w)| w * (-t).exp()).sum();
        assert!((s - (1.0 - (-3.0f64).exp())).abs() < 1e-14);
    }

    #[test]
    fn zero_resolution_rejected() {
        assert!(haar_quadrature(GroupKind::SU2, 0).is_err());
    }
}
