//! Monte Carlo simulation of group-valued Feller processes and symbol
//! estimates from their endpoint laws.
//!
//! Every path draws from its own ChaCha stream keyed by `(seed, index)`,
//! so ensembles are identical however the work is scheduled.

use std::collections::BTreeMap;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp1, Poisson, StandardNormal};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::generators::{BernsteinFunction, HuntCharacteristics, LevyMeasure, PseudoPoissonSpec, SDESpec};
use crate::group::{GroupElement, GroupKind, LieAlgebraVector};
use crate::linalg::{psd_cholesky, ComplexMatrix};
use crate::repr::{irreps_up_to, rep_matrix, IrrepId};
use crate::semigroup::{EmpiricalTable, SymbolFamily};

/// Steps per unit horizon when no step size is given.
pub const DEFAULT_STEPS: usize = 1000;
/// Cap on the number of time steps of a single path.
pub const MAX_STEPS: usize = 100_000;

/// A process that can be sampled.
#[derive(Clone, Debug)]
pub enum ProcessSpec {
    /// Chain `S(N(t))` driven by a Poisson clock.
    PseudoPoisson(PseudoPoissonSpec),
    /// Lévy process with Hunt characteristics and a finite Lévy measure.
    LevyConvolution(HuntCharacteristics),
    /// Marcus canonical SDE driven by a Lévy process on `ℝ^p`.
    MarcusSDE(SDESpec),
    /// The inner process run to an independent subordinator time.
    Subordinated(Box<ProcessSpec>, BernsteinFunction),
}

impl ProcessSpec {
    pub fn kind(&self) -> GroupKind {
        match self {
            Self::PseudoPoisson(s) => s.kind(),
            Self::LevyConvolution(h) => h.kind,
            Self::MarcusSDE(s) => s.kind,
            Self::Subordinated(inner, _) => inner.kind(),
        }
    }

    pub fn subordinate(self, h: BernsteinFunction) -> Self {
        Self::Subordinated(Box::new(self), h)
    }

    /// Everything a path needs that does not depend on the path.
    fn prepare(&self) -> Result<Prepared<'_>> {
        Ok(match self {
            Self::PseudoPoisson(s) => Prepared::PseudoPoisson(s),
            Self::LevyConvolution(h) => {
                let LevyMeasure::Atomic(atoms) = &h.nu else {
                    return Err(Error::InvalidArgument(
                        "simulation needs a finite, atomic Lévy measure".into(),
                    ));
                };
                let mut drift = h.b.clone();
                let mut jumps = Vec::with_capacity(atoms.len());
                for (tau, m) in atoms {
                    for (d, x) in drift.iter_mut().zip(h.cs.coords(tau)) {
                        *d -= m * x;
                    }
                    jumps.push((tau.clone(), *m));
                }
                // a^{ij} X_i X_j is the generator of a Brownian motion with
                // covariance 2a
                let two_a: Vec<Vec<f64>> = h.a.iter().map(|r| r.iter().map(|v| 2.0 * v).collect()).collect();
                Prepared::Levy {
                    drift,
                    chol: psd_cholesky(&two_a),
                    jumps: JumpTable::new(jumps),
                }
            }
            Self::MarcusSDE(s) => {
                let mut drift = s.b.clone();
                for (y, m) in &s.nu {
                    if y.iter().map(|v| v * v).sum::<f64>() < 1.0 {
                        for (d, yi) in drift.iter_mut().zip(y) {
                            *d -= m * yi;
                        }
                    }
                }
                Prepared::Marcus {
                    spec: s,
                    drift,
                    chol: psd_cholesky(&s.a),
                    jumps: JumpTable::new(s.nu.clone()),
                }
            }
            Self::Subordinated(inner, h) => Prepared::Subordinated(Box::new(inner.prepare()?), h),
        })
    }
}

/// Finite jump law, sampled by inversion of the cumulative masses.
#[derive(Clone, Debug)]
struct JumpTable<T> {
    items: Vec<(T, f64)>,
    rate: f64,
}

impl<T> JumpTable<T> {
    fn new(items: Vec<(T, f64)>) -> Self {
        let rate = items.iter().map(|(_, m)| m).sum();
        Self { items, rate }
    }

    fn pick<R: Rng + ?Sized>(&self, rng: &mut R) -> &T {
        let mut u = rng.random::<f64>() * self.rate;
        for (x, m) in &self.items {
            if u < *m {
                return x;
            }
            u -= m;
        }
        &self.items[self.items.len() - 1].0
    }
}

enum Prepared<'a> {
    PseudoPoisson(&'a PseudoPoissonSpec),
    Levy {
        drift: Vec<f64>,
        chol: Vec<Vec<f64>>,
        jumps: JumpTable<GroupElement>,
    },
    Marcus {
        spec: &'a SDESpec,
        drift: Vec<f64>,
        chol: Vec<Vec<f64>>,
        jumps: JumpTable<Vec<f64>>,
    },
    Subordinated(Box<Prepared<'a>>, &'a BernsteinFunction),
}

fn gaussian_increment<R: Rng + ?Sized>(drift: &[f64], chol: &[Vec<f64>], dt: f64, rng: &mut R) -> Vec<f64> {
    let xi: Vec<f64> = (0..drift.len()).map(|_| StandardNormal.sample(rng)).collect();
    let s = dt.sqrt();
    drift
        .iter()
        .zip(chol)
        .map(|(b, row)| b * dt + s * row.iter().zip(&xi).map(|(l, x)| l * x).sum::<f64>())
        .collect()
}

/// Interjump diffusion on `[0, span]` in steps of at most `dt`.
fn diffuse<F>(g: GroupElement, span: f64, dt: f64, mut step: F) -> Result<GroupElement>
where
    F: FnMut(&GroupElement, f64) -> Result<GroupElement>,
{
    if span <= 0.0 {
        return Ok(g);
    }
    let steps = ((span / dt).ceil() as usize).clamp(1, MAX_STEPS);
    let h = span / steps as f64;
    let mut cur = g;
    for _ in 0..steps {
        cur = step(&cur, h)?;
    }
    Ok(cur)
}

/// Runs diffusion steps between the exponential jump times of a clock of
/// the given rate, applying `jump` at each of them.
fn jump_diffusion<R, S, J>(g0: &GroupElement, t: f64, dt: f64, rate: f64, rng: &mut R, mut step: S, mut jump: J) -> Result<GroupElement>
where
    R: Rng + ?Sized,
    S: FnMut(&GroupElement, f64, &mut R) -> Result<GroupElement>,
    J: FnMut(&GroupElement, &mut R) -> Result<GroupElement>,
{
    let mut now = 0.0;
    let mut g = g0.clone();
    loop {
        let wait = if rate > 0.0 {
            let e: f64 = Exp1.sample(rng);
            e / rate
        } else {
            f64::INFINITY
        };
        let span = wait.min(t - now);
        g = diffuse(g, span, dt, |x, h| step(x, h, rng))?;
        now += span;
        if now >= t {
            return Ok(g);
        }
        g = jump(&g, rng)?;
    }
}

fn sample_path(p: &Prepared<'_>, g0: &GroupElement, t: f64, dt: f64, rng: &mut ChaCha8Rng) -> Result<GroupElement> {
    match p {
        Prepared::PseudoPoisson(spec) => {
            let mean = spec.lambda * t;
            let jumps = if mean > 0.0 {
                Poisson::new(mean).map_err(|e| Error::Sampler(e.to_string()))?.sample(rng) as u64
            } else {
                0
            };
            let mut g = g0.clone();
            for _ in 0..jumps {
                g = spec.kernel.sample(&g, rng)?;
            }
            Ok(g)
        }
        Prepared::Levy { drift, chol, jumps } => {
            let diffusive = chol.iter().flatten().any(|v| *v != 0.0) || drift.iter().any(|v| *v != 0.0);
            jump_diffusion(
                g0,
                t,
                if diffusive { dt } else { f64::INFINITY },
                jumps.rate,
                rng,
                |g, h, r| {
                    if diffusive {
                        g.right_exp(&LieAlgebraVector(gaussian_increment(drift, chol, h, r)))
                    } else {
                        Ok(g.clone())
                    }
                },
                |g, r| g.compose(jumps.pick(r)),
            )
        }
        Prepared::Marcus {
            spec,
            drift,
            chol,
            jumps,
        } => jump_diffusion(
            g0,
            t,
            dt,
            jumps.rate,
            rng,
            |g, h, r| {
                // stochastic Heun on the group: converges to the
                // Stratonovich solution
                let dl = gaussian_increment(drift, chol, h, r);
                let f0 = spec.field_at(&dl, g)?;
                let predictor = g.right_exp(&f0)?;
                let f1 = spec.field_at(&dl, &predictor)?;
                g.right_exp(&f0.add(&f1).scale(0.5))
            },
            |g, r| spec.jump_flow(jumps.pick(r), g),
        ),
        Prepared::Subordinated(inner, h) => {
            let time = h.sample(t, rng)?;
            if !(time.is_finite() && time >= 0.0) {
                return Err(Error::Sampler(format!("subordinator returned {time}")));
            }
            let dt = dt.max(time / MAX_STEPS as f64);
            sample_path(inner, g0, time, dt, rng)
        }
    }
}

/// `N` endpoint samples of the process started at `g₀` and run to time `t`.
#[derive(Clone, Debug)]
pub struct PathEnsemble {
    pub start: GroupElement,
    pub t: f64,
    pub endpoints: Vec<GroupElement>,
    pub seed: u64,
    /// Largest interjump step.
    pub dt: f64,
}

impl PathEnsemble {
    pub fn len(&self) -> usize {
        self.endpoints.len()
    }

    pub fn is_empty(&self) -> bool {
        self.endpoints.is_empty()
    }
}

/// Stream `index` of the generator seeded with `seed`.
pub fn path_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// Samples `n` independent endpoints. `dt` defaults to `t / 1000`.
pub fn simulate(
    spec: &ProcessSpec,
    g0: &GroupElement,
    t: f64,
    n: usize,
    seed: u64,
    dt: Option<f64>,
) -> Result<PathEnsemble> {
    if g0.kind() != spec.kind() {
        return Err(Error::KindMismatch {
            left: g0.kind(),
            right: spec.kind(),
        });
    }
    if !(t >= 0.0 && t.is_finite()) {
        return Err(Error::InvalidArgument(format!("horizon {t} must be finite and nonnegative")));
    }
    if n == 0 {
        return Err(Error::InvalidArgument("ensemble size must be at least 1".into()));
    }
    let dt = dt.unwrap_or(t / DEFAULT_STEPS as f64);
    if t > 0.0 && !(dt > 0.0 && dt <= t) {
        return Err(Error::InvalidArgument(format!("step {dt} must lie in (0, t = {t}]")));
    }
    let prepared = spec.prepare()?;
    let endpoints = (0..n as u64)
        .into_par_iter()
        .map(|k| {
            if t == 0.0 {
                return Ok(g0.clone());
            }
            sample_path(&prepared, g0, t, dt, &mut path_rng(seed, k))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(PathEnsemble {
        start: g0.clone(),
        t,
        endpoints,
        seed,
        dt,
    })
}

/// Pairwise (cascade) summation; the association order depends only on
/// the length.
pub fn pairwise_sum(xs: &[f64]) -> f64 {
    if xs.len() <= 16 {
        return xs.iter().sum();
    }
    let (l, r) = xs.split_at(xs.len() / 2);
    pairwise_sum(l) + pairwise_sum(r)
}

/// Mean and standard error of the mean.
fn mean_and_error(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = pairwise_sum(xs) / n;
    if xs.len() < 2 {
        return (mean, f64::INFINITY);
    }
    let dev: Vec<f64> = xs.iter().map(|x| (x - mean) * (x - mean)).collect();
    (mean, (pairwise_sum(&dev) / (n - 1.0) / n).sqrt())
}

/// `σ̂_t(g₀, π) = π(g₀)* (1/N) Σ_k π(Z_k)` with entrywise standard errors.
#[derive(Clone, Debug)]
pub struct EmpiricalSymbol {
    pub estimate: ComplexMatrix,
    /// Real and imaginary parts hold the standard errors of the real and
    /// imaginary parts of each entry.
    pub std_error: ComplexMatrix,
}

impl EmpiricalSymbol {
    /// Frobenius size of the standard-error matrix.
    pub fn error_norm(&self) -> f64 {
        self.std_error.frobenius_norm()
    }

    /// True when every entry of `m` lies within `k` standard errors, with
    /// `floor` guarding entries whose error is exactly zero.
    pub fn contains(&self, m: &ComplexMatrix, k: f64, floor: f64) -> bool {
        self.estimate
            .as_slice()
            .iter()
            .zip(self.std_error.as_slice())
            .zip(m.as_slice())
            .all(|((e, s), v)| (e.re - v.re).abs() <= k * s.re + floor && (e.im - v.im).abs() <= k * s.im + floor)
    }
}

pub fn empirical_symbol(ens: &PathEnsemble, pi: &IrrepId) -> Result<EmpiricalSymbol> {
    let d = pi.dim();
    let left = rep_matrix(pi, &ens.start)?.adjoint();
    let samples = ens
        .endpoints
        .par_iter()
        .map(|z| Ok(left.matmul(&rep_matrix(pi, z)?)))
        .collect::<Result<Vec<ComplexMatrix>>>()?;
    let mut estimate = ComplexMatrix::zeros(d, d);
    let mut std_error = ComplexMatrix::zeros(d, d);
    let mut re = vec![0.0; samples.len()];
    let mut im = vec![0.0; samples.len()];
    for r in 0..d {
        for c in 0..d {
            for (k, m) in samples.iter().enumerate() {
                re[k] = m[(r, c)].re;
                im[k] = m[(r, c)].im;
            }
            let (mr, sr) = mean_and_error(&re);
            let (mi, si) = mean_and_error(&im);
            estimate[(r, c)] = Complex64::new(mr, mi);
            std_error[(r, c)] = Complex64::new(sr, si);
        }
    }
    Ok(EmpiricalSymbol { estimate, std_error })
}

/// Empirical symbols of one ensemble for every irrep up to `cutoff`.
pub fn empirical_table(ens: &PathEnsemble, cutoff: u32) -> Result<EmpiricalTable> {
    let mut estimate = BTreeMap::new();
    let mut std_error = BTreeMap::new();
    for p in irreps_up_to(ens.start.kind(), cutoff) {
        let e = empirical_symbol(ens, &p)?;
        estimate.insert(p.clone(), e.estimate);
        std_error.insert(p, e.std_error);
    }
    Ok(EmpiricalTable {
        t: ens.t,
        estimate,
        std_error,
    })
}

/// A Monte Carlo symbol family at `g₀` on the given times, one ensemble per
/// time, all drawn with the same seed.
pub fn empirical_family(
    spec: &ProcessSpec,
    g0: &GroupElement,
    times: &[f64],
    n: usize,
    seed: u64,
    cutoff: u32,
) -> Result<SymbolFamily> {
    let tables = times
        .iter()
        .map(|&t| empirical_table(&simulate(spec, g0, t, n, seed, None)?, cutoff))
        .collect::<Result<Vec<_>>>()?;
    Ok(SymbolFamily::Empirical {
        kind: spec.kind(),
        g0: g0.clone(),
        tables,
    })
}

/// `(σ̂_{t₀} − I)/t₀` with its error budget.
#[derive(Clone, Debug)]
pub struct EmpiricalGenerator {
    pub j: ComplexMatrix,
    /// Frobenius size of the standard-error matrix of `j`.
    pub std_error: f64,
    /// `‖D(2t₀) − D(t₀)‖_F`, the first-order bias of the difference quotient.
    pub bias: f64,
    /// `√(std_error² + bias²)`.
    pub error: f64,
    /// The bias estimate exceeds the statistical error.
    pub bias_dominated: bool,
}

/// Difference-quotient estimate of the generator symbol at `g₀`.
///
/// Runs ensembles at `t₀` and `2t₀` on the same streams so the bias
/// estimate is largely free of sampling noise.
#[allow(clippy::too_many_arguments)]
pub fn empirical_generator(
    spec: &ProcessSpec,
    g0: &GroupElement,
    pi: &IrrepId,
    t0: f64,
    n: usize,
    seed: u64,
    dt: Option<f64>,
    tol: Option<f64>,
) -> Result<EmpiricalGenerator> {
    if !(t0 > 0.0) {
        return Err(Error::InvalidArgument(format!("t₀ = {t0} must be positive")));
    }
    let quotient = |t: f64| -> Result<(ComplexMatrix, f64)> {
        let e = empirical_symbol(&simulate(spec, g0, t, n, seed, dt.map(|h| h.min(t)))?, pi)?;
        let d = &e.estimate - &ComplexMatrix::identity(pi.dim());
        Ok((d.scale_real(1.0 / t), e.error_norm() / t))
    };
    let (j, std_error) = quotient(t0)?;
    let (j2, _) = quotient(2.0 * t0)?;
    let bias = j2.frobenius_distance(&j);
    let error = std_error.hypot(bias);
    if let Some(tol) = tol {
        if error > tol {
            return Err(Error::ErrorBarTooLarge { error_bar: error, tol });
        }
    }
    Ok(EmpiricalGenerator {
        j,
        std_error,
        bias,
        error,
        bias_dominated: bias > std_error,
    })
}
