//! Small dense complex matrices.
//!
//! Everything here is sized for irreducible representations of desk-scale
//! dimension (a dozen rows at most), so the kernels favour robustness over
//! blocking or cache tricks.

use std::fmt;
use std::ops::{Add, AddAssign, Index, IndexMut, Mul, Neg, Sub, SubAssign};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Default backward-error target for [`mat_exp`].
pub const DEFAULT_EXP_TOL: f64 = 1e-12;

/// Dense row-major complex matrix.
#[derive(Clone, PartialEq, Serialize, Deserialize)]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Complex64>,
}

impl fmt::Debug for ComplexMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "ComplexMatrix {}x{} [", self.rows, self.cols)?;
        for r in 0..self.rows {
            write!(f, "  ")?;
            for c in 0..self.cols {
                let z = self[(r, c)];
                write!(f, "{:+.6e}{:+.6e}i  ", z.re, z.im)?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

impl ComplexMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        assert!(rows > 0 && cols > 0, "matrix dimensions must be positive");
        Self {
            rows,
            cols,
            data: vec![Complex64::new(0.0, 0.0); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = Complex64::new(1.0, 0.0);
        }
        m
    }

    pub fn scalar(z: Complex64) -> Self {
        Self::from_diag(&[z])
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Complex64) -> Self {
        let mut m = Self::zeros(rows, cols);
        for r in 0..rows {
            for c in 0..cols {
                m[(r, c)] = f(r, c);
            }
        }
        m
    }

    pub fn from_diag(diag: &[Complex64]) -> Self {
        let n = diag.len();
        let mut m = Self::zeros(n, n);
        for (i, z) in diag.iter().enumerate() {
            m[(i, i)] = *z;
        }
        m
    }

    pub fn from_real_diag(diag: &[f64]) -> Self {
        let d: Vec<Complex64> = diag.iter().map(|&x| Complex64::new(x, 0.0)).collect();
        Self::from_diag(&d)
    }

    /// Builds a matrix from nested rows; panics on ragged input.
    pub fn from_rows(rows: &[Vec<Complex64>]) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        assert!(rows.iter().all(|row| row.len() == c), "ragged rows");
        Self::from_fn(r, c, |i, j| rows[i][j])
    }

    /// Single-entry matrix `E_{ij}` scaled by `z`.
    pub fn unit(rows: usize, cols: usize, i: usize, j: usize, z: Complex64) -> Self {
        let mut m = Self::zeros(rows, cols);
        m[(i, j)] = z;
        m
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn as_slice(&self) -> &[Complex64] {
        &self.data
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |r, c| self[(c, r)].conj())
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |r, c| self[(c, r)])
    }

    pub fn conj(&self) -> Self {
        Self::from_fn(self.rows, self.cols, |r, c| self[(r, c)].conj())
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).sum()
    }

    pub fn scale(&self, z: Complex64) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|x| x * z).collect(),
        }
    }

    pub fn scale_real(&self, x: f64) -> Self {
        self.scale(Complex64::new(x, 0.0))
    }

    /// `self += z * other`.
    pub fn axpy(&mut self, z: Complex64, other: &Self) {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        for (a, b) in self.data.iter_mut().zip(&other.data) {
            *a += z * b;
        }
    }

    pub fn matmul(&self, other: &Self) -> Self {
        assert_eq!(self.cols, other.rows, "matmul dimension mismatch");
        let mut out = Self::zeros(self.rows, other.cols);
        for r in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(r, k)];
                if a.re == 0.0 && a.im == 0.0 {
                    continue;
                }
                for c in 0..other.cols {
                    out.data[r * other.cols + c] += a * other.data[k * other.cols + c];
                }
            }
        }
        out
    }

    pub fn try_matmul(&self, other: &Self) -> Result<Self> {
        if self.cols != other.rows {
            return Err(Error::DimensionMismatch {
                left: (self.rows, self.cols),
                right: (other.rows, other.cols),
            });
        }
        Ok(self.matmul(other))
    }

    pub fn commutator(&self, other: &Self) -> Self {
        &self.matmul(other) - &other.matmul(self)
    }

    pub fn hermitian_part(&self) -> Self {
        (self + &self.adjoint()).scale_real(0.5)
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Max-column-sum norm.
    pub fn one_norm(&self) -> f64 {
        (0..self.cols)
            .map(|c| (0..self.rows).map(|r| self[(r, c)].norm()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    pub fn frobenius_distance(&self, other: &Self) -> f64 {
        (self - other).frobenius_norm()
    }

    /// Operator (spectral) norm estimated by power iteration on `A*A`.
    pub fn operator_norm(&self) -> f64 {
        let gram = self.adjoint().matmul(self);
        let n = gram.rows;
        // deterministic start vector with generic components
        let mut v: Vec<Complex64> = (0..n)
            .map(|k| Complex64::new(1.0 + 0.37 * k as f64, 0.11 * (k as f64 + 1.0).sqrt()))
            .collect();
        normalize(&mut v);
        let mut lambda = 0.0;
        for _ in 0..2000 {
            let w = gram.mul_vec(&v);
            let next: f64 = w.iter().zip(&v).map(|(a, b)| (b.conj() * a).re).sum();
            let nrm = vec_norm(&w);
            if nrm == 0.0 {
                return 0.0;
            }
            v = w.iter().map(|z| z / nrm).collect();
            if (next - lambda).abs() <= 1e-16 * next.abs().max(1e-300) {
                lambda = next;
                break;
            }
            lambda = next;
        }
        lambda.max(0.0).sqrt()
    }

    pub fn mul_vec(&self, v: &[Complex64]) -> Vec<Complex64> {
        assert_eq!(self.cols, v.len());
        (0..self.rows)
            .map(|r| (0..self.cols).map(|c| self[(r, c)] * v[c]).sum())
            .collect()
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.is_square() && self.max_abs_diff(&self.adjoint()) <= tol
    }

    pub fn is_skew_hermitian(&self, tol: f64) -> bool {
        self.is_square() && (self + &self.adjoint()).max_abs() <= tol
    }

    pub fn is_unitary(&self, tol: f64) -> bool {
        self.is_square()
            && self
                .adjoint()
                .matmul(self)
                .max_abs_diff(&Self::identity(self.rows))
                <= tol
    }

    /// Row-major nested `[re, im]` pairs, the on-disk layout for results.
    pub fn to_pairs(&self) -> Vec<Vec<[f64; 2]>> {
        (0..self.rows)
            .map(|r| (0..self.cols).map(|c| [self[(r, c)].re, self[(r, c)].im]).collect())
            .collect()
    }
}

fn vec_norm(v: &[Complex64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

fn normalize(v: &mut [Complex64]) {
    let n = vec_norm(v);
    for z in v.iter_mut() {
        *z /= n;
    }
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = Complex64;
    #[inline]
    fn index(&self, (r, c): (usize, usize)) -> &Complex64 {
        &self.data[r * self.cols + c]
    }
}

impl IndexMut<(usize, usize)> for ComplexMatrix {
    #[inline]
    fn index_mut(&mut self, (r, c): (usize, usize)) -> &mut Complex64 {
        &mut self.data[r * self.cols + c]
    }
}

impl Add for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn add(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        let mut out = self.clone();
        out += rhs;
        out
    }
}

impl Sub for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn sub(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        let mut out = self.clone();
        out -= rhs;
        out
    }
}

impl Mul for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn mul(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        self.matmul(rhs)
    }
}

impl Neg for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn neg(self) -> ComplexMatrix {
        self.scale_real(-1.0)
    }
}

impl AddAssign<&ComplexMatrix> for ComplexMatrix {
    fn add_assign(&mut self, rhs: &ComplexMatrix) {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols), "add dimension mismatch");
        for (a, b) in self.data.iter_mut().zip(&rhs.data) {
            *a += b;
        }
    }
}

impl SubAssign<&ComplexMatrix> for ComplexMatrix {
    fn sub_assign(&mut self, rhs: &ComplexMatrix) {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols), "sub dimension mismatch");
        for (a, b) in self.data.iter_mut().zip(&rhs.data) {
            *a -= b;
        }
    }
}

/// Hilbert–Schmidt inner product `tr(A* B)`.
pub fn hs_inner(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<Complex64> {
    if (a.rows, a.cols) != (b.rows, b.cols) {
        return Err(Error::DimensionMismatch {
            left: (a.rows, a.cols),
            right: (b.rows, b.cols),
        });
    }
    Ok(a.data.iter().zip(&b.data).map(|(x, y)| x.conj() * y).sum())
}

// Padé(13,13) numerator coefficients.
const PADE13: [f64; 14] = [
    64764752532480000.0,
    32382376266240000.0,
    7771770303897600.0,
    1187353796428800.0,
    129060195264000.0,
    10559470521600.0,
    670442572800.0,
    33522128640.0,
    1323241920.0,
    40840800.0,
    960960.0,
    16380.0,
    182.0,
    1.0,
];

const THETA13: f64 = 5.371920351148152;

/// Matrix exponential by scaling and squaring with the order-13 diagonal
/// Padé approximant. Backward error is at unit-roundoff level, so any
/// `tol >= f64::EPSILON` is met.
pub fn mat_exp_tol(m: &ComplexMatrix, tol: f64) -> Result<ComplexMatrix> {
    if !m.is_square() {
        return Err(Error::NotSquare {
            rows: m.rows,
            cols: m.cols,
        });
    }
    if !(tol >= f64::EPSILON) {
        return Err(Error::InvalidArgument(format!(
            "mat_exp tolerance {tol:e} is below unit roundoff"
        )));
    }
    if !m.is_finite() {
        return Err(Error::NonFinite("mat_exp input".into()));
    }
    let n = m.rows;
    if n == 1 {
        return Ok(ComplexMatrix::scalar(m[(0, 0)].exp()));
    }
    let norm = m.one_norm();
    let squarings = if norm > THETA13 {
        (norm / THETA13).log2().ceil().max(0.0) as u32
    } else {
        0
    };
    let a = m.scale_real(0.5f64.powi(squarings as i32));
    let id = ComplexMatrix::identity(n);
    let a2 = a.matmul(&a);
    let a4 = a2.matmul(&a2);
    let a6 = a4.matmul(&a2);
    let b = &PADE13;
    let re = |x: f64| Complex64::new(x, 0.0);

    let mut inner_u = a6.scale(re(b[13]));
    inner_u.axpy(re(b[11]), &a4);
    inner_u.axpy(re(b[9]), &a2);
    let mut u = a6.matmul(&inner_u);
    u.axpy(re(b[7]), &a6);
    u.axpy(re(b[5]), &a4);
    u.axpy(re(b[3]), &a2);
    u.axpy(re(b[1]), &id);
    let u = a.matmul(&u);

    let mut inner_v = a6.scale(re(b[12]));
    inner_v.axpy(re(b[10]), &a4);
    inner_v.axpy(re(b[8]), &a2);
    let mut v = a6.matmul(&inner_v);
    v.axpy(re(b[6]), &a6);
    v.axpy(re(b[4]), &a4);
    v.axpy(re(b[2]), &a2);
    v.axpy(re(b[0]), &id);

    let p = &v + &u;
    let q = &v - &u;
    let mut r = mat_solve(&q, &p)?.x;
    for _ in 0..squarings {
        r = r.matmul(&r);
    }
    Ok(r)
}

pub fn mat_exp(m: &ComplexMatrix) -> Result<ComplexMatrix> {
    mat_exp_tol(m, DEFAULT_EXP_TOL)
}

/// Solution of `A X = B` with the 1-norm condition estimate of `A`.
#[derive(Clone, Debug)]
pub struct Solve {
    pub x: ComplexMatrix,
    pub condition: f64,
}

/// LU with partial pivoting.
pub fn mat_solve(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<Solve> {
    if !a.is_square() {
        return Err(Error::NotSquare {
            rows: a.rows,
            cols: a.cols,
        });
    }
    if a.rows != b.rows {
        return Err(Error::DimensionMismatch {
            left: (a.rows, a.cols),
            right: (b.rows, b.cols),
        });
    }
    let n = a.rows;
    let scale = a.max_abs();
    if scale == 0.0 {
        return Err(Error::Singular { pivot: 0.0 });
    }
    let mut lu = a.clone();
    let mut perm: Vec<usize> = (0..n).collect();
    for k in 0..n {
        let (p, pmax) = (k..n)
            .map(|r| (r, lu[(r, k)].norm()))
            .fold((k, -1.0), |acc, x| if x.1 > acc.1 { x } else { acc });
        if pmax <= 1e-14 * scale {
            return Err(Error::Singular { pivot: pmax });
        }
        if p != k {
            for c in 0..n {
                let tmp = lu[(k, c)];
                lu[(k, c)] = lu[(p, c)];
                lu[(p, c)] = tmp;
            }
            perm.swap(k, p);
        }
        let pivot = lu[(k, k)];
        for r in (k + 1)..n {
            let factor = lu[(r, k)] / pivot;
            lu[(r, k)] = factor;
            for c in (k + 1)..n {
                let t = lu[(k, c)];
                lu[(r, c)] -= factor * t;
            }
        }
    }
    let solve_with = |rhs: &ComplexMatrix| -> ComplexMatrix {
        let m = rhs.cols;
        let mut x = ComplexMatrix::from_fn(n, m, |r, c| rhs[(perm[r], c)]);
        for c in 0..m {
            for r in 0..n {
                let mut s = x[(r, c)];
                for k in 0..r {
                    s -= lu[(r, k)] * x[(k, c)];
                }
                x[(r, c)] = s;
            }
            for r in (0..n).rev() {
                let mut s = x[(r, c)];
                for k in (r + 1)..n {
                    s -= lu[(r, k)] * x[(k, c)];
                }
                x[(r, c)] = s / lu[(r, r)];
            }
        }
        x
    };
    let x = solve_with(b);
    let inv = solve_with(&ComplexMatrix::identity(n));
    let condition = a.one_norm() * inv.one_norm();
    if !x.is_finite() {
        return Err(Error::NonFinite("mat_solve result".into()));
    }
    Ok(Solve { x, condition })
}

/// Eigenvalues of a Hermitian matrix in ascending order (cyclic Jacobi on
/// the real symmetric embedding; each eigenvalue appears twice there).
pub fn hermitian_eigenvalues(h: &ComplexMatrix) -> Result<Vec<f64>> {
    if !h.is_square() {
        return Err(Error::NotSquare {
            rows: h.rows,
            cols: h.cols,
        });
    }
    let n = h.rows;
    let herm = h.hermitian_part();
    let m = 2 * n;
    let mut s = vec![0.0; m * m];
    for r in 0..n {
        for c in 0..n {
            let z = herm[(r, c)];
            s[r * m + c] = z.re;
            s[(r + n) * m + (c + n)] = z.re;
            s[(r + n) * m + c] = z.im;
            s[r * m + (c + n)] = -z.im;
        }
    }
    let mut eig = real_symmetric_eigenvalues(&mut s, m);
    eig.sort_by(|a, b| a.partial_cmp(b).unwrap());
    Ok(eig.chunks(2).map(|p| 0.5 * (p[0] + p[1])).collect())
}

/// Eigenvalues of a real symmetric matrix given as a row-major slice.
pub fn symmetric_eigenvalues(a: &[f64], n: usize) -> Vec<f64> {
    let mut s = a.to_vec();
    let mut eig = real_symmetric_eigenvalues(&mut s, n);
    eig.sort_by(|a, b| a.partial_cmp(b).unwrap());
    eig
}

fn real_symmetric_eigenvalues(s: &mut [f64], m: usize) -> Vec<f64> {
    for _sweep in 0..100 {
        let off: f64 = (0..m)
            .flat_map(|r| (0..m).filter(move |&c| c != r).map(move |c| (r, c)))
            .map(|(r, c)| s[r * m + c] * s[r * m + c])
            .sum();
        let diag: f64 = (0..m).map(|i| s[i * m + i] * s[i * m + i]).sum();
        if off <= 1e-30 * diag.max(1e-300) || off == 0.0 {
            break;
        }
        for p in 0..m {
            for q in (p + 1)..m {
                let apq = s[p * m + q];
                if apq.abs() < 1e-300 {
                    continue;
                }
                let app = s[p * m + p];
                let aqq = s[q * m + q];
                let theta = (aqq - app) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let sn = t * c;
                for k in 0..m {
                    let akp = s[k * m + p];
                    let akq = s[k * m + q];
                    s[k * m + p] = c * akp - sn * akq;
                    s[k * m + q] = sn * akp + c * akq;
                }
                for k in 0..m {
                    let apk = s[p * m + k];
                    let aqk = s[q * m + k];
                    s[p * m + k] = c * apk - sn * aqk;
                    s[q * m + k] = sn * apk + c * aqk;
                }
            }
        }
    }
    (0..m).map(|i| s[i * m + i]).collect()
}

/// Checks that a real square matrix (rows as vectors) is symmetric and
/// positive semidefinite to `tol`.
pub fn check_psd(a: &[Vec<f64>], tol: f64) -> Result<()> {
    let n = a.len();
    if a.iter().any(|r| r.len() != n) {
        return Err(Error::NotSquare {
            rows: n,
            cols: a.first().map_or(0, |r| r.len()),
        });
    }
    let scale = a.iter().flatten().fold(1.0f64, |m, v| m.max(v.abs()));
    for i in 0..n {
        for j in 0..n {
            if !a[i][j].is_finite() {
                return Err(Error::NonFinite("diffusion matrix".into()));
            }
            if (a[i][j] - a[j][i]).abs() > tol * scale {
                return Err(Error::InvalidArgument(format!("matrix is not symmetric at ({i},{j})")));
            }
        }
    }
    let flat: Vec<f64> = a.iter().flatten().copied().collect();
    let min = symmetric_eigenvalues(&flat, n).first().copied().unwrap_or(0.0);
    if min < -tol * scale {
        return Err(Error::InvalidArgument(format!(
            "matrix is not positive semidefinite (eigenvalue {min:e})"
        )));
    }
    Ok(())
}

/// Lower-triangular `L` with `L Lᵀ = a` for symmetric positive semidefinite
/// `a`; directions with vanishing pivots get zero columns.
pub fn psd_cholesky(a: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let n = a.len();
    let scale = a.iter().flatten().fold(0.0f64, |m, v| m.max(v.abs()));
    let mut l = vec![vec![0.0; n]; n];
    for j in 0..n {
        let s: f64 = (0..j).map(|k| l[j][k] * l[j][k]).sum();
        let d = a[j][j] - s;
        if d <= 1e-14 * scale {
            continue;
        }
        let dj = d.sqrt();
        l[j][j] = dj;
        for i in (j + 1)..n {
            let s: f64 = (0..j).map(|k| l[i][k] * l[j][k]).sum();
            l[i][j] = (a[i][j] - s) / dj;
        }
    }
    l
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    /// Plain Taylor series with enough terms for small-norm inputs.
    fn taylor_exp(m: &ComplexMatrix) -> ComplexMatrix {
        let n = m.rows();
        let mut term = ComplexMatrix::identity(n);
        let mut sum = ComplexMatrix::identity(n);
        for k in 1..80 {
            term = term.matmul(m).scale_real(1.0 / k as f64);
            sum += &term;
        }
        sum
    }

    fn skew_hermitian_3x3() -> ComplexMatrix {
        let h = ComplexMatrix::from_rows(&[
            vec![c(0.3, 0.0), c(0.2, -0.7), c(-0.4, 0.1)],
            vec![c(0.2, 0.7), c(-1.1, 0.0), c(0.5, 0.9)],
            vec![c(-0.4, -0.1), c(0.5, -0.9), c(0.8, 0.0)],
        ]);
        h.scale(c(0.0, 1.0))
    }

    #[test]
    fn exp_of_zero_is_identity() {
        let e = mat_exp(&ComplexMatrix::zeros(3, 3)).unwrap();
        assert!(e.max_abs_diff(&ComplexMatrix::identity(3)) < 1e-15);
    }

    #[test]
    fn exp_of_diagonal() {
        let e = mat_exp(&ComplexMatrix::from_real_diag(&[-1.0, -4.0])).unwrap();
        let expect = ComplexMatrix::from_real_diag(&[(-1.0f64).exp(), (-4.0f64).exp()]);
        assert!(e.max_abs_diff(&expect) < 1e-15);
    }

    #[test]
    fn exp_of_skew_hermitian_is_unitary_and_matches_taylor() {
        let a = skew_hermitian_3x3();
        let e = mat_exp(&a).unwrap();
        assert!(e.is_unitary(1e-12));
        assert!(e.max_abs_diff(&taylor_exp(&a)) < 1e-12);
    }

    #[test]
    fn exp_with_scaling_matches_taylor_squared() {
        // large norm forces squarings; compare with Taylor on a/2^6 squared 6 times
        let a = skew_hermitian_3x3().scale_real(9.0);
        let mut t = taylor_exp(&a.scale_real(1.0 / 64.0));
        for _ in 0..6 {
            t = t.matmul(&t);
        }
        assert!(mat_exp(&a).unwrap().max_abs_diff(&t) < 1e-11);
    }

    #[test]
    fn exp_rejects_non_square() {
        assert!(matches!(
            mat_exp(&ComplexMatrix::zeros(2, 3)),
            Err(Error::NotSquare { .. })
        ));
    }

    #[test]
    fn exp_commuting_sum() {
        let a = skew_hermitian_3x3();
        let b = a.scale_real(-0.37);
        let lhs = mat_exp(&(&a + &b)).unwrap();
        let rhs = mat_exp(&a).unwrap().matmul(&mat_exp(&b).unwrap());
        assert!(lhs.max_abs_diff(&rhs) < 1e-10);
    }

    #[test]
    fn solve_identity_and_diagonal() {
        let b = skew_hermitian_3x3();
        let s = mat_solve(&ComplexMatrix::identity(3), &b).unwrap();
        assert!(s.x.max_abs_diff(&b) < 1e-15);
        let s = mat_solve(
            &ComplexMatrix::from_real_diag(&[2.0, 5.0]),
            &ComplexMatrix::identity(2),
        )
        .unwrap();
        assert!(s.x.max_abs_diff(&ComplexMatrix::from_real_diag(&[0.5, 0.2])) < 1e-15);
        assert!((s.condition - 2.5).abs() < 1e-12);
    }

    fn det(m: &ComplexMatrix) -> Complex64 {
        let n = m.rows();
        if n == 1 {
            return m[(0, 0)];
        }
        (0..n)
            .map(|c| {
                let sign = if c % 2 == 0 { 1.0 } else { -1.0 };
                m[(0, c)] * det(&minor(m, 0, c)) * sign
            })
            .sum()
    }

    fn minor(m: &ComplexMatrix, r0: usize, c0: usize) -> ComplexMatrix {
        let n = m.rows();
        let rows: Vec<usize> = (0..n).filter(|&r| r != r0).collect();
        let cols: Vec<usize> = (0..n).filter(|&c| c != c0).collect();
        ComplexMatrix::from_fn(n - 1, n - 1, |r, c| m[(rows[r], cols[c])])
    }

    #[test]
    fn solve_matches_adjugate_inverse() {
        let a = ComplexMatrix::from_fn(4, 4, |r, col| {
            c(((r * 7 + col * 3) % 5) as f64 - 1.5, ((r + 2 * col) % 3) as f64 * 0.4)
        });
        let a = &a + &ComplexMatrix::identity(4).scale_real(3.0);
        let d = det(&a);
        let adj_inv = ComplexMatrix::from_fn(4, 4, |r, c| {
            let sign = if (r + c) % 2 == 0 { 1.0 } else { -1.0 };
            det(&minor(&a, c, r)) * sign / d
        });
        let s = mat_solve(&a, &ComplexMatrix::identity(4)).unwrap();
        assert!(s.x.max_abs_diff(&adj_inv) < 1e-12);
        let resid = (&a.matmul(&s.x) - &ComplexMatrix::identity(4)).frobenius_norm() / 2.0;
        assert!(resid < 1e-10);
    }

    #[test]
    fn solve_detects_singular() {
        let a = ComplexMatrix::from_rows(&[vec![c(1.0, 0.0), c(2.0, 0.0)], vec![c(2.0, 0.0), c(4.0, 0.0)]]);
        assert!(matches!(
            mat_solve(&a, &ComplexMatrix::identity(2)),
            Err(Error::Singular { .. })
        ));
    }

    #[test]
    fn inner_products_and_norms() {
        let i2 = ComplexMatrix::identity(2);
        assert_eq!(hs_inner(&i2, &i2).unwrap(), c(2.0, 0.0));
        assert_eq!(ComplexMatrix::zeros(3, 3).frobenius_norm(), 0.0);
        let d = ComplexMatrix::from_real_diag(&[3.0, -7.0]);
        assert!((d.operator_norm() - 7.0).abs() < 1e-12);
        assert!(hs_inner(&i2, &ComplexMatrix::identity(3)).is_err());
    }

    #[test]
    fn psd_checks_and_cholesky() {
        let a = vec![vec![4.0, 2.0, 0.0], vec![2.0, 2.0, 0.0], vec![0.0, 0.0, 0.0]];
        check_psd(&a, 1e-12).unwrap();
        let l = psd_cholesky(&a);
        for i in 0..3 {
            for j in 0..3 {
                let v: f64 = (0..3).map(|k| l[i][k] * l[j][k]).sum();
                assert!((v - a[i][j]).abs() < 1e-14);
            }
        }
        assert!(check_psd(&[vec![1.0, 2.0], vec![2.0, 1.0]], 1e-12).is_err());
        assert!(check_psd(&[vec![1.0, 0.5], vec![0.0, 1.0]], 1e-12).is_err());
    }

    #[test]
    fn hermitian_spectrum() {
        let h = skew_hermitian_3x3().scale(c(0.0, -1.0));
        let eig = hermitian_eigenvalues(&h).unwrap();
        let tr: f64 = eig.iter().sum();
        assert!((tr - h.trace().re).abs() < 1e-12);
        let fro2: f64 = eig.iter().map(|x| x * x).sum();
        assert!((fro2 - h.frobenius_norm().powi(2)).abs() < 1e-10);
        // operator norm agrees with the spectral radius for Hermitian input
        let rad = eig.iter().map(|x| x.abs()).fold(0.0, f64::max);
        assert!((h.operator_norm() - rad).abs() < 1e-9);
    }
}
