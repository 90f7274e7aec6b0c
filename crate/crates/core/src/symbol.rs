//! Global symbols `σ_A(g, π) = π(g)* (Aπ)(g)` and pseudo differential
//! operators reconstructed from them.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::fourier::{trace_of_product, BandLimitedFunction, FourierCoeffs};
use crate::group::{GroupElement, GroupKind, LieAlgebraVector};
use crate::linalg::ComplexMatrix;
use crate::repr::{irreps_up_to, rep_derivative, rep_matrix, IrrepId};

/// A linear operator defined at least on band-limited functions.
pub trait Operator: Send + Sync {
    fn kind(&self) -> GroupKind;

    /// `(Af)(g)`.
    fn apply(&self, f: &BandLimitedFunction, g: &GroupElement) -> Result<Complex64>;
}

impl<T: Operator + ?Sized> Operator for &T {
    fn kind(&self) -> GroupKind {
        (**self).kind()
    }
    fn apply(&self, f: &BandLimitedFunction, g: &GroupElement) -> Result<Complex64> {
        (**self).apply(f, g)
    }
}

/// Operator given by a closure.
pub struct FnOperator<F> {
    kind: GroupKind,
    f: F,
}

impl<F> FnOperator<F>
where
    F: Fn(&BandLimitedFunction, &GroupElement) -> Result<Complex64> + Send + Sync,
{
    pub fn new(kind: GroupKind, f: F) -> Self {
        Self { kind, f }
    }
}

impl<F> Operator for FnOperator<F>
where
    F: Fn(&BandLimitedFunction, &GroupElement) -> Result<Complex64> + Send + Sync,
{
    fn kind(&self) -> GroupKind {
        self.kind
    }
    fn apply(&self, f: &BandLimitedFunction, g: &GroupElement) -> Result<Complex64> {
        (self.f)(f, g)
    }
}

pub struct Identity(pub GroupKind);

impl Operator for Identity {
    fn kind(&self) -> GroupKind {
        self.0
    }
    fn apply(&self, f: &BandLimitedFunction, g: &GroupElement) -> Result<Complex64> {
        f.eval(g)
    }
}

/// Left-invariant vector field `Xf(g) = d/du f(g exp(uX))`.
pub struct LeftInvariantField {
    pub kind: GroupKind,
    pub x: LieAlgebraVector,
}

impl Operator for LeftInvariantField {
    fn kind(&self) -> GroupKind {
        self.kind
    }
    fn apply(&self, f: &BandLimitedFunction, g: &GroupElement) -> Result<Complex64> {
        let mut s = Complex64::new(0.0, 0.0);
        for (k, &c) in self.x.0.iter().enumerate() {
            if c != 0.0 {
                s += f.derivative(k).eval(g)? * c;
            }
        }
        Ok(s)
    }
}

/// Right-invariant vector field `X'f(g) = d/du f(exp(uX) g)`.
pub struct RightInvariantField {
    pub kind: GroupKind,
    pub x: LieAlgebraVector,
}

impl Operator for RightInvariantField {
    fn kind(&self) -> GroupKind {
        self.kind
    }
    fn apply(&self, f: &BandLimitedFunction, g: &GroupElement) -> Result<Complex64> {
        // f(exp(uX) g) = Σ d tr(f̂ π(exp uX) π(g))
        let mut coeffs = f.coeffs().clone();
        for (p, m) in coeffs.coeffs.iter_mut() {
            *m = m.matmul(&rep_derivative(p, &self.x)?);
        }
        BandLimitedFunction::new(coeffs).eval(g)
    }
}

/// `Δ = Σ_k X_k²`.
pub struct Laplacian(pub GroupKind);

impl Operator for Laplacian {
    fn kind(&self) -> GroupKind {
        self.0
    }
    fn apply(&self, f: &BandLimitedFunction, g: &GroupElement) -> Result<Complex64> {
        let c = f.coeffs().map(|p, m| m.scale_real(-p.casimir()));
        BandLimitedFunction::new(c).eval(g)
    }
}

pub type SymbolFn = dyn Fn(&GroupElement, &IrrepId) -> Result<ComplexMatrix> + Send + Sync;

#[derive(Clone)]
pub enum SymbolRepr {
    /// `σ(g, π) = j(π)`, independent of `g`.
    Constant(BTreeMap<IrrepId, ComplexMatrix>),
    Analytic(Arc<SymbolFn>),
    /// Per-irrep matrices at each node of a grid.
    Sampled {
        nodes: Vec<GroupElement>,
        tables: BTreeMap<IrrepId, Vec<ComplexMatrix>>,
    },
}

/// `σ(g, π)` for `π` in a finite irrep set.
#[derive(Clone)]
pub struct Symbol {
    kind: GroupKind,
    irreps: Vec<IrrepId>,
    repr: SymbolRepr,
    g_independent: bool,
}

impl fmt::Debug for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let repr = match &self.repr {
            SymbolRepr::Constant(_) => "Constant".to_string(),
            SymbolRepr::Analytic(_) => "Analytic".to_string(),
            SymbolRepr::Sampled { nodes, .. } => format!("Sampled({} nodes)", nodes.len()),
        };
        f.debug_struct("Symbol")
            .field("kind", &self.kind)
            .field("irreps", &self.irreps.len())
            .field("repr", &repr)
            .field("g_independent", &self.g_independent)
            .finish()
    }
}

const NODE_MATCH_TOL: f64 = 1e-12;

impl Symbol {
    pub fn constant(kind: GroupKind, table: BTreeMap<IrrepId, ComplexMatrix>) -> Self {
        Self {
            kind,
            irreps: table.keys().cloned().collect(),
            repr: SymbolRepr::Constant(table),
            g_independent: true,
        }
    }

    /// Build a `g`-independent symbol by evaluating `j` on every irrep.
    pub fn constant_from<F>(kind: GroupKind, irreps: &[IrrepId], j: F) -> Result<Self>
    where
        F: Fn(&IrrepId) -> Result<ComplexMatrix> + Sync,
    {
        let table = irreps
            .par_iter()
            .map(|p| Ok((p.clone(), j(p)?)))
            .collect::<Result<BTreeMap<_, _>>>()?;
        Ok(Self::constant(kind, table))
    }

    pub fn analytic<F>(kind: GroupKind, irreps: Vec<IrrepId>, g_independent: bool, f: F) -> Self
    where
        F: Fn(&GroupElement, &IrrepId) -> Result<ComplexMatrix> + Send + Sync + 'static,
    {
        Self {
            kind,
            irreps,
            repr: SymbolRepr::Analytic(Arc::new(f)),
            g_independent,
        }
    }

    pub fn sampled(
        kind: GroupKind,
        nodes: Vec<GroupElement>,
        tables: BTreeMap<IrrepId, Vec<ComplexMatrix>>,
        g_independent: bool,
    ) -> Self {
        Self {
            kind,
            irreps: tables.keys().cloned().collect(),
            repr: SymbolRepr::Sampled { nodes, tables },
            g_independent,
        }
    }

    /// `σ ≡ I_π`.
    pub fn identity(kind: GroupKind, cutoff: u32) -> Self {
        let table = irreps_up_to(kind, cutoff)
            .into_iter()
            .map(|p| {
                let d = p.dim();
                (p, ComplexMatrix::identity(d))
            })
            .collect();
        Self::constant(kind, table)
    }

    /// Symbol `dπ(X)` of the left-invariant field `X`.
    pub fn left_invariant_field(kind: GroupKind, x: &LieAlgebraVector, cutoff: u32) -> Result<Self> {
        Self::constant_from(kind, &irreps_up_to(kind, cutoff), |p| rep_derivative(p, x))
    }

    pub fn kind(&self) -> GroupKind {
        self.kind
    }

    pub fn irreps(&self) -> &[IrrepId] {
        &self.irreps
    }

    pub fn repr(&self) -> &SymbolRepr {
        &self.repr
    }

    pub fn is_g_independent(&self) -> bool {
        self.g_independent
    }

    pub fn contains(&self, pi: &IrrepId) -> bool {
        match &self.repr {
            SymbolRepr::Constant(t) => t.contains_key(pi),
            SymbolRepr::Sampled { tables, .. } => tables.contains_key(pi),
            SymbolRepr::Analytic(_) => self.irreps.contains(pi),
        }
    }

    /// `σ(g, π)`. Sampled symbols are only defined at their grid nodes.
    pub fn eval(&self, g: &GroupElement, pi: &IrrepId) -> Result<ComplexMatrix> {
        if !self.contains(pi) {
            return Err(Error::IrrepNotInSet(pi.key()));
        }
        match &self.repr {
            SymbolRepr::Constant(t) => Ok(t[pi].clone()),
            SymbolRepr::Analytic(f) => f(g, pi),
            SymbolRepr::Sampled { nodes, tables } => {
                let idx = nodes
                    .iter()
                    .position(|n| n.approx_eq(g, NODE_MATCH_TOL))
                    .ok_or(Error::NotOnGrid)?;
                Ok(tables[pi][idx].clone())
            }
        }
    }

    /// `j(π)` of a `g`-independent symbol.
    pub fn at_identity(&self, pi: &IrrepId) -> Result<ComplexMatrix> {
        match &self.repr {
            SymbolRepr::Sampled { nodes, tables } if self.g_independent => tables
                .get(pi)
                .and_then(|t| t.first())
                .cloned()
                .ok_or_else(|| Error::IrrepNotInSet(pi.key()))
                .and_then(|m| if nodes.is_empty() { Err(Error::NotOnGrid) } else { Ok(m) }),
            _ => self.eval(&self.kind.identity(), pi),
        }
    }

    /// Tabulate on `nodes`.
    pub fn sample(&self, nodes: &[GroupElement]) -> Result<Self> {
        let tables = self
            .irreps
            .par_iter()
            .map(|p| {
                let col = nodes.iter().map(|g| self.eval(g, p)).collect::<Result<Vec<_>>>()?;
                Ok((p.clone(), col))
            })
            .collect::<Result<BTreeMap<_, _>>>()?;
        Ok(Self::sampled(self.kind, nodes.to_vec(), tables, self.g_independent))
    }

    /// Pointwise `σ + τ` on the common irreps.
    pub fn add(&self, other: &Self) -> Result<Self> {
        if self.kind != other.kind {
            return Err(Error::KindMismatch {
                left: self.kind,
                right: other.kind,
            });
        }
        let irreps: Vec<IrrepId> = self.irreps.iter().filter(|p| other.contains(p)).cloned().collect();
        if let (SymbolRepr::Constant(a), SymbolRepr::Constant(b)) = (&self.repr, &other.repr) {
            let table = irreps.iter().map(|p| (p.clone(), &a[p] + &b[p])).collect();
            return Ok(Self::constant(self.kind, table));
        }
        let (a, b) = (self.clone(), other.clone());
        Ok(Self::analytic(
            self.kind,
            irreps,
            self.g_independent && other.g_independent,
            move |g, p| Ok(&a.eval(g, p)? + &b.eval(g, p)?),
        ))
    }

    pub fn scale(&self, s: f64) -> Self {
        match &self.repr {
            SymbolRepr::Constant(t) => {
                Self::constant(self.kind, t.iter().map(|(p, m)| (p.clone(), m.scale_real(s))).collect())
            }
            SymbolRepr::Sampled { nodes, tables } => Self::sampled(
                self.kind,
                nodes.clone(),
                tables
                    .iter()
                    .map(|(p, v)| (p.clone(), v.iter().map(|m| m.scale_real(s)).collect()))
                    .collect(),
                self.g_independent,
            ),
            SymbolRepr::Analytic(f) => {
                let f = f.clone();
                Self::analytic(self.kind, self.irreps.clone(), self.g_independent, move |g, p| {
                    Ok(f(g, p)?.scale_real(s))
                })
            }
        }
    }

    /// `max_{g, π} ‖σ(g,π) − τ(g,π)‖_F` over `nodes`.
    pub fn max_distance(&self, other: &Self, nodes: &[GroupElement]) -> Result<f64> {
        let mut worst = 0.0f64;
        for p in &self.irreps {
            for g in nodes {
                worst = worst.max(self.eval(g, p)?.frobenius_distance(&other.eval(g, p)?));
            }
        }
        Ok(worst)
    }
}

/// `(Aπ)(g)`, the matrix of `A` applied to each coefficient `π_kj`.
pub fn operator_on_irrep<A: Operator + ?Sized>(
    op: &A,
    pi: &IrrepId,
    g: &GroupElement,
) -> Result<ComplexMatrix> {
    let d = pi.dim();
    let mut out = ComplexMatrix::zeros(d, d);
    for k in 0..d {
        for j in 0..d {
            let f = BandLimitedFunction::matrix_coefficient(pi, k, j);
            out[(k, j)] = op
                .apply(&f, g)
                .map_err(|e| Error::Operator(format!("on coefficient ({k},{j}) of {pi}: {e}")))?;
        }
    }
    Ok(out)
}

/// `σ_A(g, π) = π(g)* (Aπ)(g)` at a single point.
pub fn symbol_at<A: Operator + ?Sized>(op: &A, g: &GroupElement, pi: &IrrepId) -> Result<ComplexMatrix> {
    Ok(rep_matrix(pi, g)?.adjoint().matmul(&operator_on_irrep(op, pi, g)?))
}

/// Sampled symbol of `op` on `grid`.
pub fn symbol_from_operator<A: Operator + ?Sized>(
    op: &A,
    irreps: &[IrrepId],
    grid: &[GroupElement],
) -> Result<Symbol> {
    let kind = op.kind();
    let tables = irreps
        .par_iter()
        .map(|p| {
            let col = grid
                .par_iter()
                .map(|g| symbol_at(op, g, p))
                .collect::<Result<Vec<_>>>()?;
            Ok((p.clone(), col))
        })
        .collect::<Result<BTreeMap<_, _>>>()?;
    Ok(Symbol::sampled(kind, grid.to_vec(), tables, false))
}

/// `Af(g) = Σ_π d_π tr(σ(g,π) f̂(π) π(g))`.
pub fn apply_pdo(s: &Symbol, f: &BandLimitedFunction, g: &GroupElement) -> Result<Complex64> {
    let mut acc = Complex64::new(0.0, 0.0);
    for (p, m) in &f.coeffs().coeffs {
        if m.max_abs() == 0.0 {
            continue;
        }
        if !s.contains(p) {
            return Err(Error::IrrepNotInSet(p.key()));
        }
        let sm = s.eval(g, p)?.matmul(m);
        acc += trace_of_product(&sm, &rep_matrix(p, g)?) * p.dim() as f64;
    }
    Ok(acc)
}

/// Symbol `π(g)* dπ(X) π(g)` of the right-invariant field `X'`.
pub fn right_invariant_vf_symbol(kind: GroupKind, x: &LieAlgebraVector, cutoff: u32) -> Symbol {
    let x = x.clone();
    Symbol::analytic(kind, irreps_up_to(kind, cutoff), kind.dim() == 0, move |g, p| {
        let u = rep_matrix(p, g)?;
        Ok(u.adjoint().matmul(&rep_derivative(p, &x)?).matmul(&u))
    })
}

/// `h_π(ψ, φ)(g) = ⟨π(g)ψ, φ⟩ = φ* π(g) ψ`.
pub fn h_pi(pi: &IrrepId, psi: &[Complex64], phi: &[Complex64]) -> BandLimitedFunction {
    let d = pi.dim();
    let mut coeffs = FourierCoeffs::zeros(pi.kind(), pi.band());
    // φ* π ψ = tr(ψ φ* π)
    *coeffs.get_mut(pi).unwrap() =
        ComplexMatrix::from_fn(d, d, |a, b| psi[a] * phi[b].conj() / d as f64);
    BandLimitedFunction::new(coeffs)
}

/// Largest jump `‖σ(g_{k+1},π) − σ(g_k,π)‖_F` of the symbol of `op` along
/// `n` equally spaced points of the closed one-parameter loop through `X_1`.
pub fn symbol_loop_modulus<A: Operator + ?Sized>(op: &A, pi: &IrrepId, n: usize) -> Result<f64> {
    let kind = op.kind();
    let period = match kind {
        GroupKind::Torus(_) => std::f64::consts::TAU,
        GroupKind::SU2 => 2.0 * std::f64::consts::TAU,
    };
    let grid: Vec<GroupElement> = (0..n)
        .map(|k| crate::group::exp_map(kind, &LieAlgebraVector::basis(kind.dim(), 0).scale(period * k as f64 / n as f64)))
        .collect::<Result<_>>()?;
    let vals = grid.par_iter().map(|g| symbol_at(op, g, pi)).collect::<Result<Vec<_>>>()?;
    Ok((0..n)
        .map(|k| vals[k].frobenius_distance(&vals[(k + 1) % n]))
        .fold(0.0, f64::max))
}
