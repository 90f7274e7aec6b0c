//! Group arithmetic on the torus `T^d` and on `SU(2)`.
//!
//! `SU(2)` elements are unit quaternions `(w, x, y, z)`. The Lie algebra
//! basis `X_1, X_2, X_3` corresponds to the quaternion units `i/2, j/2,
//! k/2`, so `exp(t X_k)` is the one-parameter subgroup
//! `cos(t/2) + sin(t/2) e_k` and `[X_1, X_2] = X_3` cyclically. On the torus
//! the basis is `∂/∂θ_i` and every bracket vanishes.

use std::f64::consts::{PI, TAU};
use std::fmt;

use rand::Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Which compact group an element belongs to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum GroupKind {
    Torus(usize),
    SU2,
}

impl GroupKind {
    /// Dimension `n` of the Lie algebra.
    pub fn dim(self) -> usize {
        match self {
            GroupKind::Torus(d) => d,
            GroupKind::SU2 => 3,
        }
    }

    pub fn identity(self) -> GroupElement {
        match self {
            GroupKind::Torus(d) => GroupElement::Torus(vec![0.0; d]),
            GroupKind::SU2 => GroupElement::SU2([1.0, 0.0, 0.0, 0.0]),
        }
    }

    /// Structure constants: the coefficients of `[X_a, X_b]`.
    pub fn bracket(self, a: &LieAlgebraVector, b: &LieAlgebraVector) -> LieAlgebraVector {
        match self {
            GroupKind::Torus(d) => LieAlgebraVector::zero(d),
            GroupKind::SU2 => {
                let (u, v) = (&a.0, &b.0);
                LieAlgebraVector(vec![
                    u[1] * v[2] - u[2] * v[1],
                    u[2] * v[0] - u[0] * v[2],
                    u[0] * v[1] - u[1] * v[0],
                ])
            }
        }
    }

    /// Haar-distributed random element.
    pub fn random_haar<R: Rng + ?Sized>(self, rng: &mut R) -> GroupElement {
        match self {
            GroupKind::Torus(d) => {
                GroupElement::Torus((0..d).map(|_| rng.random::<f64>() * TAU).collect())
            }
            GroupKind::SU2 => {
                let mut q = [0.0; 4];
                for c in q.iter_mut() {
                    *c = StandardNormal.sample(rng);
                }
                GroupElement::SU2(normalize_quat(q))
            }
        }
    }
}

impl fmt::Display for GroupKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GroupKind::Torus(d) => write!(f, "torus(d={d})"),
            GroupKind::SU2 => write!(f, "su2"),
        }
    }
}

/// Coefficients with respect to the fixed ordered basis `X_1..X_n`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LieAlgebraVector(pub Vec<f64>);

impl LieAlgebraVector {
    pub fn zero(n: usize) -> Self {
        Self(vec![0.0; n])
    }

    pub fn basis(n: usize, k: usize) -> Self {
        let mut v = vec![0.0; n];
        v[k] = 1.0;
        Self(v)
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn scale(&self, s: f64) -> Self {
        Self(self.0.iter().map(|x| x * s).collect())
    }

    pub fn add(&self, other: &Self) -> Self {
        Self(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    pub fn norm(&self) -> f64 {
        self.0.iter().map(|x| x * x).sum::<f64>().sqrt()
    }
}

/// A point of `T^d` (angles in `[0, 2π)`) or of `SU(2)` (unit quaternion).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum GroupElement {
    Torus(Vec<f64>),
    SU2([f64; 4]),
}

pub(crate) fn wrap_angle(theta: f64) -> f64 {
    let w = theta.rem_euclid(TAU);
    if w >= TAU {
        0.0
    } else {
        w
    }
}

/// Representative of an angle in `(-π, π]`.
pub(crate) fn centered_angle(theta: f64) -> f64 {
    let w = wrap_angle(theta);
    if w > PI {
        w - TAU
    } else {
        w
    }
}

fn normalize_quat(q: [f64; 4]) -> [f64; 4] {
    let n = q.iter().map(|x| x * x).sum::<f64>().sqrt();
    [q[0] / n, q[1] / n, q[2] / n, q[3] / n]
}

fn hamilton(a: &[f64; 4], b: &[f64; 4]) -> [f64; 4] {
    let [w1, x1, y1, z1] = *a;
    let [w2, x2, y2, z2] = *b;
    [
        w1 * w2 - x1 * x2 - y1 * y2 - z1 * z2,
        w1 * x2 + x1 * w2 + y1 * z2 - z1 * y2,
        w1 * y2 - x1 * z2 + y1 * w2 + z1 * x2,
        w1 * z2 + x1 * y2 - y1 * x2 + z1 * w2,
    ]
}

impl GroupElement {
    pub fn torus(angles: &[f64]) -> Self {
        GroupElement::Torus(angles.iter().map(|&t| wrap_angle(t)).collect())
    }

    /// Unit quaternion, normalized on construction.
    pub fn su2(w: f64, x: f64, y: f64, z: f64) -> Self {
        GroupElement::SU2(normalize_quat([w, x, y, z]))
    }

    pub fn kind(&self) -> GroupKind {
        match self {
            GroupElement::Torus(a) => GroupKind::Torus(a.len()),
            GroupElement::SU2(_) => GroupKind::SU2,
        }
    }

    pub fn compose(&self, other: &Self) -> Result<Self> {
        match (self, other) {
            (GroupElement::Torus(a), GroupElement::Torus(b)) if a.len() == b.len() => Ok(
                GroupElement::Torus(a.iter().zip(b).map(|(x, y)| wrap_angle(x + y)).collect()),
            ),
            (GroupElement::SU2(a), GroupElement::SU2(b)) => {
                Ok(GroupElement::SU2(normalize_quat(hamilton(a, b))))
            }
            _ => Err(Error::KindMismatch {
                left: self.kind(),
                right: other.kind(),
            }),
        }
    }

    pub fn inverse(&self) -> Self {
        match self {
            GroupElement::Torus(a) => GroupElement::Torus(a.iter().map(|&t| wrap_angle(-t)).collect()),
            GroupElement::SU2([w, x, y, z]) => GroupElement::SU2([*w, -x, -y, -z]),
        }
    }

    /// `g ∘ exp(v)`, the right translate by a one-parameter step.
    pub fn right_exp(&self, v: &LieAlgebraVector) -> Result<Self> {
        self.compose(&exp_map(self.kind(), v)?)
    }

    /// Normal coordinates `v` with `exp(v) = g`: wrapped angles in `(-π, π]`
    /// on the torus, the rotation vector with `|v| ≤ 2π` on `SU(2)`.
    pub fn log(&self) -> LieAlgebraVector {
        match self {
            GroupElement::Torus(a) => LieAlgebraVector(a.iter().map(|&t| centered_angle(t)).collect()),
            GroupElement::SU2([w, x, y, z]) => {
                let s = (x * x + y * y + z * z).sqrt();
                if s < 1e-300 {
                    return LieAlgebraVector::zero(3);
                }
                let angle = 2.0 * s.atan2(*w);
                LieAlgebraVector(vec![angle * x / s, angle * y / s, angle * z / s])
            }
        }
    }

    /// Bi-invariant distance to the identity, `|log g|`.
    pub fn distance_from_identity(&self) -> f64 {
        self.log().norm()
    }

    /// Distance that is insensitive to representation (angle wrap, but not
    /// the quaternion sign, which distinguishes elements of `SU(2)`).
    pub fn distance(&self, other: &Self) -> f64 {
        match (self, other) {
            (GroupElement::Torus(a), GroupElement::Torus(b)) if a.len() == b.len() => a
                .iter()
                .zip(b)
                .map(|(x, y)| centered_angle(x - y).powi(2))
                .sum::<f64>()
                .sqrt(),
            (GroupElement::SU2(a), GroupElement::SU2(b)) => {
                a.iter().zip(b).map(|(x, y)| (x - y).powi(2)).sum::<f64>().sqrt()
            }
            _ => f64::INFINITY,
        }
    }

    pub fn approx_eq(&self, other: &Self, tol: f64) -> bool {
        self.distance(other) <= tol
    }

    /// ZYZ Euler angles with `g = exp(αX_3) exp(βX_2) exp(γX_3)`,
    /// `β ∈ [0, π]`. Only defined on `SU(2)`.
    pub fn euler_zyz(&self) -> Option<(f64, f64, f64)> {
        let GroupElement::SU2([w, x, y, z]) = *self else {
            return None;
        };
        let cb = (w * w + z * z).sqrt();
        let sb = (x * x + y * y).sqrt();
        let beta = 2.0 * sb.atan2(cb);
        let sum = if cb > 1e-300 { z.atan2(w) } else { 0.0 };
        let diff = if sb > 1e-300 { (-x).atan2(y) } else { 0.0 };
        Some((sum + diff, beta, sum - diff))
    }

    pub fn from_euler_zyz(alpha: f64, beta: f64, gamma: f64) -> Self {
        let (cb, sb) = ((beta / 2.0).cos(), (beta / 2.0).sin());
        let sum = (alpha + gamma) / 2.0;
        let diff = (alpha - gamma) / 2.0;
        GroupElement::su2(cb * sum.cos(), -sb * diff.sin(), sb * diff.cos(), cb * sum.sin())
    }

    pub fn norm_defect(&self) -> f64 {
        match self {
            GroupElement::Torus(_) => 0.0,
            GroupElement::SU2(q) => (q.iter().map(|x| x * x).sum::<f64>().sqrt() - 1.0).abs(),
        }
    }
}

/// Exponential map `𝔤 → G`.
pub fn exp_map(kind: GroupKind, v: &LieAlgebraVector) -> Result<GroupElement> {
    if v.dim() != kind.dim() {
        return Err(Error::InvalidArgument(format!(
            "Lie algebra vector of length {} for {kind}",
            v.dim()
        )));
    }
    Ok(match kind {
        GroupKind::Torus(_) => GroupElement::torus(&v.0),
        GroupKind::SU2 => {
            let angle = v.norm();
            if angle < 1e-300 {
                return Ok(kind.identity());
            }
            let (c, s) = ((angle / 2.0).cos(), (angle / 2.0).sin() / angle);
            GroupElement::su2(c, s * v.0[0], s * v.0[1], s * v.0[2])
        }
    })
}

/// Smooth cutoff profile `χ`: equal to 1 on `[0, R/2]`, 0 on `[R, ∞)`.
pub fn cutoff_profile(r: f64, radius: f64) -> f64 {
    let half = radius / 2.0;
    if r <= half {
        return 1.0;
    }
    if r >= radius {
        return 0.0;
    }
    let t = (r - half) / half;
    let psi = |s: f64| if s <= 0.0 { 0.0 } else { (-1.0 / s).exp() };
    let a = psi(1.0 - t);
    a / (a + psi(t))
}

/// Odd, compactly supported canonical coordinates `x_i(τ) = χ(|v|) v_i`
/// with `v = log τ`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CoordinateSystem {
    pub kind: GroupKind,
    /// Radius of the support ball `U` in the bi-invariant metric.
    pub radius: f64,
}

impl CoordinateSystem {
    pub const DEFAULT_RADIUS: f64 = 1.0;

    pub fn new(kind: GroupKind, radius: f64) -> Result<Self> {
        if !(radius > 0.0 && radius <= PI) {
            return Err(Error::InvalidArgument(format!(
                "cutoff radius {radius} must lie in (0, π]"
            )));
        }
        Ok(Self { kind, radius })
    }

    pub fn standard(kind: GroupKind) -> Self {
        Self {
            kind,
            radius: Self::DEFAULT_RADIUS,
        }
    }

    pub fn dim(&self) -> usize {
        self.kind.dim()
    }

    /// Radius of the inner ball on which `x = log` exactly.
    pub fn exact_radius(&self) -> f64 {
        self.radius / 2.0
    }

    pub fn coords(&self, tau: &GroupElement) -> Vec<f64> {
        let v = tau.log();
        let chi = cutoff_profile(v.norm(), self.radius);
        v.0.into_iter().map(|x| chi * x).collect()
    }

    /// Upper bound on `max_i sup |x_i|`.
    pub fn sup_norm(&self) -> f64 {
        // χ(r)·r is maximised somewhere in [R/2, R]
        (0..=400)
            .map(|k| {
                let r = self.radius * (0.5 + 0.5 * k as f64 / 400.0);
                cutoff_profile(r, self.radius) * r
            })
            .fold(self.radius / 2.0, f64::max)
    }
}

/// Canonical coordinates of `τ` in `cs`.
pub fn canonical_coords(cs: &CoordinateSystem, tau: &GroupElement) -> Vec<f64> {
    cs.coords(tau)
}
