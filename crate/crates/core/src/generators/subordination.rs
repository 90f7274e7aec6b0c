//! Bochner subordination of convolution semigroups.

use std::fmt;
use std::sync::Arc;

use rand::Rng;
use rand_distr::{Distribution, Exp1, Poisson};
use statrs::function::gamma::gamma;

use crate::error::{Error, Result};
use crate::linalg::{mat_exp, ComplexMatrix};
use crate::quadrature::gauss_legendre;
use crate::repr::IrrepId;
use crate::symbol::Symbol;

pub type SubordinatorDensity = dyn Fn(f64) -> f64 + Send + Sync;

/// Lévy measure `λ` of a subordinator.
#[derive(Clone)]
pub enum SubordinatorLevy {
    Zero,
    /// `Σ m_k δ_{s_k}`.
    Atomic(Vec<(f64, f64)>),
    /// `α / Γ(1 − α) · s^{−1−α} ds`, so that `∫(1 − e^{−us}) λ(ds) = u^α`.
    Stable { alpha: f64 },
    /// `ρ(s) ds` supported in `[lo, hi] ⊂ (0, ∞)`.
    Density {
        density: Arc<SubordinatorDensity>,
        lo: f64,
        hi: f64,
    },
}

impl fmt::Debug for SubordinatorLevy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Zero => write!(f, "Zero"),
            Self::Atomic(a) => f.debug_tuple("Atomic").field(a).finish(),
            Self::Stable { alpha } => f.debug_struct("Stable").field("alpha", alpha).finish(),
            Self::Density { lo, hi, .. } => f.debug_struct("Density").field("lo", lo).field("hi", hi).finish(),
        }
    }
}

/// `h(u) = b u + ∫(1 − e^{−us}) λ(ds)`.
#[derive(Clone, Debug)]
pub struct BernsteinFunction {
    pub drift: f64,
    pub levy: SubordinatorLevy,
}

/// Allowed mass of `λ` beyond the last quadrature node.
pub const TAIL_BOUND: f64 = 1e-8;

const GL_ORDER: usize = 16;
const MAX_PANELS: usize = 200_000;

impl BernsteinFunction {
    pub fn new(drift: f64, levy: SubordinatorLevy) -> Result<Self> {
        if !(drift.is_finite() && drift >= 0.0) {
            return Err(Error::InvalidArgument(format!("subordinator drift {drift} must be nonnegative")));
        }
        match &levy {
            SubordinatorLevy::Zero => {}
            SubordinatorLevy::Atomic(atoms) => {
                if atoms.iter().any(|(s, m)| !(*s > 0.0 && s.is_finite() && *m > 0.0 && m.is_finite())) {
                    return Err(Error::InvalidArgument("subordinator atoms need positive size and mass".into()));
                }
            }
            SubordinatorLevy::Stable { alpha } => {
                if !(*alpha > 0.0 && *alpha < 1.0) {
                    return Err(Error::InvalidArgument(format!("stable index {alpha} outside (0, 1)")));
                }
            }
            SubordinatorLevy::Density { density, lo, hi } => {
                if !(*lo > 0.0 && hi > lo && hi.is_finite()) {
                    return Err(Error::InvalidArgument(format!("density support [{lo}, {hi}] must lie in (0, ∞)")));
                }
                let (x, _) = gauss_legendre(GL_ORDER);
                for t in x {
                    let s = lo + (hi - lo) * 0.5 * (t + 1.0);
                    let v = density(s);
                    if !(v.is_finite() && v >= 0.0) {
                        return Err(Error::InvalidArgument(format!("subordinator density is {v} at {s}")));
                    }
                }
            }
        }
        let h = Self { drift, levy };
        h.check_shape()?;
        Ok(h)
    }

    /// `h(u) = u^α`.
    pub fn stable(alpha: f64) -> Result<Self> {
        Self::new(0.0, SubordinatorLevy::Stable { alpha })
    }

    /// `h(u) = b u`.
    pub fn pure_drift(b: f64) -> Result<Self> {
        Self::new(b, SubordinatorLevy::Zero)
    }

    /// `h(u) = m (1 − e^{−us})`.
    pub fn poisson(size: f64, mass: f64) -> Result<Self> {
        Self::new(0.0, SubordinatorLevy::Atomic(vec![(size, mass)]))
    }

    pub fn eval(&self, u: f64) -> f64 {
        let levy = match &self.levy {
            SubordinatorLevy::Zero => 0.0,
            SubordinatorLevy::Atomic(atoms) => atoms.iter().map(|(s, m)| m * -(-u * s).exp_m1()).sum(),
            SubordinatorLevy::Stable { alpha } => u.powf(*alpha),
            SubordinatorLevy::Density { density, lo, hi } => log_panels(*lo, *hi, f64::INFINITY)
                .into_iter()
                .map(|(s, w)| w * density(s) * -(-u * s).exp_m1())
                .sum(),
        };
        self.drift * u + levy
    }

    /// `h ≥ 0`, increasing and concave on a geometric grid.
    fn check_shape(&self) -> Result<()> {
        let us: Vec<f64> = (0..=60).map(|k| 10f64.powf(-3.0 + 0.1 * k as f64)).collect();
        let hs: Vec<f64> = us.iter().map(|u| self.eval(*u)).collect();
        if hs.iter().any(|h| !(h.is_finite() && *h >= -1e-14)) {
            return Err(Error::Assumption("Bernstein function negative or non-finite".into()));
        }
        let slopes: Vec<f64> = hs.windows(2).zip(us.windows(2)).map(|(h, u)| (h[1] - h[0]) / (u[1] - u[0])).collect();
        let scale = slopes.iter().fold(0.0f64, |m, s| m.max(s.abs()));
        if slopes.iter().any(|s| *s < -1e-10 * scale) {
            return Err(Error::Assumption("Bernstein function not increasing".into()));
        }
        if slopes.windows(2).any(|s| s[1] > s[0] + 1e-9 * scale) {
            return Err(Error::Assumption("Bernstein function not concave".into()));
        }
        Ok(())
    }

    /// `λ((s, ∞))` for `s` beyond the small-jump region.
    fn tail_mass(&self, s: f64) -> f64 {
        match &self.levy {
            SubordinatorLevy::Zero => 0.0,
            SubordinatorLevy::Atomic(atoms) => atoms.iter().filter(|(x, _)| *x > s).map(|(_, m)| m).sum(),
            SubordinatorLevy::Stable { alpha } => s.powf(-alpha) / gamma(1.0 - alpha),
            SubordinatorLevy::Density { hi, .. } => {
                if s >= *hi {
                    0.0
                } else {
                    f64::INFINITY
                }
            }
        }
    }

    /// `b j + ∫(e^{sj} − I) λ(ds)` for a single matrix `j`.
    pub fn subordinate_matrix(&self, j: &ComplexMatrix) -> Result<ComplexMatrix> {
        let d = j.rows();
        let id = ComplexMatrix::identity(d);
        let mut out = j.scale_real(self.drift);
        let norm = j.operator_norm();
        if norm == 0.0 {
            return Ok(out);
        }
        let add_panel = |out: &mut ComplexMatrix, nodes: Vec<(f64, f64)>, weight: &dyn Fn(f64) -> f64| -> Result<()> {
            for (s, w) in nodes {
                let e = &mat_exp(&j.scale_real(s))? - &id;
                out.axpy((w * weight(s)).into(), &e);
            }
            Ok(())
        };
        match &self.levy {
            SubordinatorLevy::Zero => {}
            SubordinatorLevy::Atomic(atoms) => {
                for (s, m) in atoms {
                    out.axpy((*m).into(), &(&mat_exp(&j.scale_real(*s))? - &id));
                }
            }
            SubordinatorLevy::Density { density, lo, hi } => {
                let nodes = log_panels(*lo, *hi, norm);
                if nodes.len() > MAX_PANELS * GL_ORDER {
                    return Err(Error::DivergentQuadrature(format!("{} nodes needed", nodes.len())));
                }
                add_panel(&mut out, nodes, &|s| density(s))?;
            }
            SubordinatorLevy::Stable { alpha } => {
                let alpha = *alpha;
                let c = alpha / gamma(1.0 - alpha);
                // ∫_0^{s0} (e^{sj} − I) c s^{−1−α} ds term by term
                let s0 = (0.5 / norm).min(1.0);
                let mut power = id.clone();
                let mut fact = 1.0;
                for k in 1..40i32 {
                    power = power.matmul(j);
                    fact *= f64::from(k);
                    let coef = c * s0.powf(f64::from(k) - alpha) / (fact * (f64::from(k) - alpha));
                    out.axpy(coef.into(), &power);
                    if coef * norm.powi(k) < 1e-18 {
                        break;
                    }
                }
                let s_max = (TAIL_BOUND * gamma(1.0 - alpha)).powf(-1.0 / alpha);
                // beyond s_dec the integrand is −I to machine precision
                let mut s_end = s0;
                while s_end < s_max {
                    s_end = (s_end * 2.0).min(s_max);
                    if mat_exp(&j.scale_real(s_end))?.operator_norm() < 1e-17 {
                        break;
                    }
                }
                let nodes = log_panels(s0, s_end, norm);
                if nodes.len() > MAX_PANELS * GL_ORDER {
                    return Err(Error::DivergentQuadrature(format!(
                        "the subordinated integrand does not decay before the tail bound ({} nodes)",
                        nodes.len()
                    )));
                }
                add_panel(&mut out, nodes, &|s| c * s.powf(-1.0 - alpha))?;
                out.axpy((-self.tail_mass(s_end)).into(), &id);
            }
        }
        Ok(out)
    }

    /// Sample `T_t` of the subordinator.
    pub fn sample<R: Rng + ?Sized>(&self, t: f64, rng: &mut R) -> Result<f64> {
        let mut s = self.drift * t;
        match &self.levy {
            SubordinatorLevy::Zero => {}
            SubordinatorLevy::Atomic(atoms) => {
                let total: f64 = atoms.iter().map(|(_, m)| m).sum();
                let n = poisson(total * t, rng)?;
                for _ in 0..n {
                    let mut u = rng.random::<f64>() * total;
                    let mut size = atoms[atoms.len() - 1].0;
                    for (x, m) in atoms {
                        if u < *m {
                            size = *x;
                            break;
                        }
                        u -= m;
                    }
                    s += size;
                }
            }
            SubordinatorLevy::Stable { alpha } => {
                // Kanter's representation of the positive stable law with
                // Laplace transform e^{−t u^α}
                let a = *alpha;
                let u: f64 = rng.random::<f64>() * std::f64::consts::PI;
                let e: f64 = Exp1.sample(rng);
                let z = (a * u).sin() / u.sin().powf(1.0 / a) * (((1.0 - a) * u).sin() / e).powf((1.0 - a) / a);
                s += t.powf(1.0 / a) * z;
            }
            SubordinatorLevy::Density { density, lo, hi } => {
                let nodes = log_panels(*lo, *hi, f64::INFINITY);
                let total: f64 = nodes.iter().map(|(x, w)| w * density(*x)).sum();
                let peak = nodes.iter().map(|(x, _)| density(*x)).fold(0.0, f64::max) * 1.25;
                let n = poisson(total * t, rng)?;
                for _ in 0..n {
                    let mut tries = 0;
                    loop {
                        let x = lo + (hi - lo) * rng.random::<f64>();
                        if rng.random::<f64>() * peak <= density(x) {
                            s += x;
                            break;
                        }
                        tries += 1;
                        if tries > 100_000 {
                            return Err(Error::Sampler("rejection sampler for the jump density stalled".into()));
                        }
                    }
                }
            }
        }
        Ok(s)
    }
}

fn poisson<R: Rng + ?Sized>(mean: f64, rng: &mut R) -> Result<u64> {
    if mean == 0.0 {
        return Ok(0);
    }
    let p = Poisson::new(mean).map_err(|e| Error::Sampler(e.to_string()))?;
    Ok(p.sample(rng) as u64)
}

/// Gauss–Legendre nodes on `[lo, hi]`, panels at most doubling in length
/// and spanning at most `2 / freq`.
fn log_panels(lo: f64, hi: f64, freq: f64) -> Vec<(f64, f64)> {
    let (x, w) = gauss_legendre(GL_ORDER);
    let mut out = Vec::new();
    let mut a = lo;
    let width = if freq.is_finite() { 2.0 / freq } else { f64::INFINITY };
    while a < hi {
        let b = (2.0 * a).min(a + width).min(hi);
        let half = 0.5 * (b - a);
        for (t, wt) in x.iter().zip(&w) {
            out.push((a + half * (t + 1.0), half * wt));
        }
        a = b;
        if out.len() > MAX_PANELS * GL_ORDER {
            break;
        }
    }
    out
}

/// `j^h = b j + ∫(σ_s − I) λ(ds)` for a `g`-independent symbol with
/// `σ_s = e^{s j}`.
pub fn subordinated_symbol(inner: &Symbol, h: &BernsteinFunction) -> Result<Symbol> {
    if !inner.is_g_independent() {
        return Err(Error::Assumption("subordination needs a g-independent symbol".into()));
    }
    Symbol::constant_from(inner.kind(), inner.irreps(), |p: &IrrepId| {
        h.subordinate_matrix(&inner.at_identity(p)?)
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators::HuntCharacteristics;
    use crate::group::GroupKind;
    use crate::linalg::hermitian_eigenvalues;
    use num_complex::Complex64;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn circle_heat() -> Symbol {
        HuntCharacteristics::heat(GroupKind::Torus(1), 1.0)
            .unwrap()
            .generator()
            .unwrap()
            .symbol(8)
            .unwrap()
    }

    #[test]
    fn identity_subordinator() {
        let j = circle_heat();
        let jh = subordinated_symbol(&j, &BernsteinFunction::pure_drift(1.0).unwrap()).unwrap();
        for p in j.irreps() {
            assert!(jh.at_identity(p).unwrap().max_abs_diff(&j.at_identity(p).unwrap()) == 0.0);
        }
    }

    #[test]
    fn square_root_of_circle_heat() {
        let jh = subordinated_symbol(&circle_heat(), &BernsteinFunction::stable(0.5).unwrap()).unwrap();
        for n in -8..=8i32 {
            let v = jh.at_identity(&IrrepId::TorusChar(vec![n])).unwrap()[(0, 0)];
            // direct Bernstein evaluation −h(n²)
            let expect = -((n * n) as f64).sqrt();
            assert!((v - Complex64::new(expect, 0.0)).norm() < 1e-9, "{n}: {v}");
        }
    }

    #[test]
    fn spectral_calculus_on_sphere() {
        let heat = HuntCharacteristics::heat(GroupKind::SU2, 0.7).unwrap();
        let j = heat.generator().unwrap().symbol(4).unwrap();
        for alpha in [0.3, 0.75] {
            let jh = subordinated_symbol(&j, &BernsteinFunction::stable(alpha).unwrap()).unwrap();
            for p in j.irreps() {
                let ev = hermitian_eigenvalues(&j.at_identity(p).unwrap()).unwrap();
                let evh = hermitian_eigenvalues(&jh.at_identity(p).unwrap()).unwrap();
                for (a, b) in ev.iter().zip(&evh) {
                    assert!((b + (-a).powf(alpha)).abs() < 1e-9);
                }
            }
        }
    }

    #[test]
    fn single_atom_is_exponential() {
        let j = circle_heat();
        let jh = subordinated_symbol(&j, &BernsteinFunction::poisson(1.0, 1.0).unwrap()).unwrap();
        for p in j.irreps() {
            let e = &mat_exp(&j.at_identity(p).unwrap()).unwrap() - &ComplexMatrix::identity(1);
            assert!(jh.at_identity(p).unwrap().max_abs_diff(&e) < 1e-15);
        }
    }

    #[test]
    fn density_matches_bernstein_value() {
        let h = BernsteinFunction::new(
            0.2,
            SubordinatorLevy::Density {
                density: Arc::new(|s: f64| s.sqrt()),
                lo: 0.5,
                hi: 3.0,
            },
        )
        .unwrap();
        let jh = subordinated_symbol(&circle_heat(), &h).unwrap();
        for n in [1, 3] {
            let v = jh.at_identity(&IrrepId::TorusChar(vec![n])).unwrap()[(0, 0)].re;
            // Simpson's rule on a fine grid
            let u = (n * n) as f64;
            let m = 20000;
            let hstep = 2.5 / m as f64;
            let f = |s: f64| s.sqrt() * -(-u * s).exp_m1();
            let mut simpson = f(0.5) + f(3.0);
            for k in 1..m {
                simpson += f(0.5 + k as f64 * hstep) * if k % 2 == 1 { 4.0 } else { 2.0 };
            }
            let expect = -(0.2 * u + simpson * hstep / 3.0);
            assert!((v - expect).abs() < 1e-10);
            assert!((h.eval(u) + expect).abs() < 1e-10);
        }
    }

    #[test]
    fn undamped_symbol_is_refused() {
        let drift = HuntCharacteristics::drift(GroupKind::Torus(1), vec![1.0]).unwrap();
        let j = drift.generator().unwrap().symbol(2).unwrap();
        let err = subordinated_symbol(&j, &BernsteinFunction::stable(0.5).unwrap());
        assert!(matches!(err, Err(Error::DivergentQuadrature(_))));
    }

    #[test]
    fn rejects_invalid() {
        assert!(BernsteinFunction::stable(1.2).is_err());
        assert!(BernsteinFunction::pure_drift(-1.0).is_err());
        assert!(BernsteinFunction::new(0.0, SubordinatorLevy::Atomic(vec![(0.0, 1.0)])).is_err());
    }

    #[test]
    fn samplers_match_laplace_transform() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let cases = [
            BernsteinFunction::stable(0.6).unwrap(),
            BernsteinFunction::new(0.3, SubordinatorLevy::Atomic(vec![(0.5, 1.0), (2.0, 0.4)])).unwrap(),
            BernsteinFunction::new(
                0.0,
                SubordinatorLevy::Density {
                    density: Arc::new(|s: f64| 1.0 / s),
                    lo: 0.2,
                    hi: 2.0,
                },
            )
            .unwrap(),
        ];
        let (t, u, n) = (0.8, 1.3, 40_000);
        for h in &cases {
            let xs: Vec<f64> = (0..n).map(|_| (-u * h.sample(t, &mut rng).unwrap()).exp()).collect();
            let mean = xs.iter().sum::<f64>() / n as f64;
            let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
            let se = (var / n as f64).sqrt();
            let expect = (-t * h.eval(u)).exp();
            assert!((mean - expect).abs() < 4.0 * se, "{h:?}: {mean} vs {expect} ± {se}");
        }
    }
}
