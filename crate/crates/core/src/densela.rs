//! Dense real symmetric linear algebra: Jacobi eigendecomposition, shifted
//! solves, operator norms and spectral functions.
//!
//! All matrices here are small (n <= ~200) and dense; the eigensolver is a
//! cyclic Jacobi sweep, which preserves symmetry exactly and is deterministic
//! for a fixed input.

use std::fmt::Write as _;

use thiserror::Error;

/// Relative symmetry tolerance accepted by [`SymMatrix::new`].
pub const SYMMETRY_TOL: f64 = 1e-12;

#[derive(Debug, Error)]
pub enum DenselaError {
    #[error("invalid matrix: {0}")]
    InvalidMatrix(String),
    #[error("eigensolver failed to converge within {sweeps} sweeps (off-diagonal {off:e})")]
    NoConvergence { sweeps: usize, off: f64 },
    #[error("matrix is not positive definite on the requested function (eigenvalue {eigenvalue:e})")]
    NotPositiveDefinite { eigenvalue: f64 },
    #[error("shift {shift:e} is within {distance:e} of an eigenvalue")]
    SingularShift { shift: f64, distance: f64 },
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },
}

/// Dense rectangular matrix, row-major. Work-horse for eigenvector blocks and
/// subspace bases; no invariants beyond finite entries being the caller's job.
#[derive(Debug, Clone, PartialEq)]
pub struct Mat {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<f64>,
}

impl Mat {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Mat { rows, cols, data: vec![0.0; rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Mat::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = 1.0;
        }
        m
    }

    pub fn from_columns(rows: usize, cols: &[Vec<f64>]) -> Self {
        let mut m = Mat::zeros(rows, cols.len());
        for (j, c) in cols.iter().enumerate() {
            assert_eq!(c.len(), rows);
            for i in 0..rows {
                m[(i, j)] = c[i];
            }
        }
        m
    }

    pub fn column(&self, j: usize) -> Vec<f64> {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }

    pub fn transpose(&self) -> Mat {
        let mut t = Mat::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t[(j, i)] = self[(i, j)];
            }
        }
        t
    }

    pub fn matmul(&self, other: &Mat) -> Mat {
        assert_eq!(self.cols, other.rows);
        let mut out = Mat::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a == 0.0 {
                    continue;
                }
                for j in 0..other.cols {
                    out[(i, j)] += a * other[(k, j)];
                }
            }
        }
        out
    }

    pub fn matvec(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(self.cols, x.len());
        let mut y = vec![0.0; self.rows];
        for i in 0..self.rows {
            let mut acc = 0.0;
            for j in 0..self.cols {
                acc += self[(i, j)] * x[j];
            }
            y[i] = acc;
        }
        y
    }
}

impl std::ops::Index<(usize, usize)> for Mat {
    type Output = f64;
    fn index(&self, (i, j): (usize, usize)) -> &f64 {
        &self.data[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for Mat {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut f64 {
        &mut self.data[i * self.cols + j]
    }
}

/// Dense real symmetric matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct SymMatrix {
    n: usize,
    data: Vec<f64>,
}

impl SymMatrix {
    /// Build from row-major entries, validating finiteness and symmetry to
    /// `SYMMETRY_TOL * max(1, max|a_kl|)`.
    pub fn new(n: usize, data: Vec<f64>) -> Result<Self, DenselaError> {
        if n == 0 {
            return Err(DenselaError::InvalidMatrix("dimension must be positive".into()));
        }
        if data.len() != n * n {
            return Err(DenselaError::InvalidMatrix(format!(
                "expected {} entries for n = {n}, got {}",
                n * n,
                data.len()
            )));
        }
        let mut scale: f64 = 0.0;
        for &x in &data {
            if !x.is_finite() {
                return Err(DenselaError::InvalidMatrix(format!("non-finite entry {x}")));
            }
            scale = scale.max(x.abs());
        }
        let tol = SYMMETRY_TOL * scale.max(1.0);
        for i in 0..n {
            for j in (i + 1)..n {
                let d = (data[i * n + j] - data[j * n + i]).abs();
                if d > tol {
                    return Err(DenselaError::InvalidMatrix(format!(
                        "asymmetry {d:e} at ({i},{j}) exceeds tolerance {tol:e}"
                    )));
                }
            }
        }
        let mut m = SymMatrix { n, data };
        m.symmetrize();
        Ok(m)
    }

    pub fn zeros(n: usize) -> Self {
        SymMatrix { n, data: vec![0.0; n * n] }
    }

    pub fn identity(n: usize) -> Self {
        Self::diag(&vec![1.0; n])
    }

    pub fn diag(d: &[f64]) -> Self {
        let n = d.len();
        let mut m = SymMatrix::zeros(n);
        for i in 0..n {
            m.data[i * n + i] = d[i];
        }
        m
    }

    /// Build from `f(i, j)`; only `j >= i` is evaluated, the lower triangle
    /// mirrors it, so the result is symmetric by construction.
    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut m = SymMatrix::zeros(n);
        for i in 0..n {
            for j in i..n {
                let v = f(i, j);
                m.data[i * n + j] = v;
                m.data[j * n + i] = v;
            }
        }
        m
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.n + j]
    }

    /// Set both `(i, j)` and `(j, i)`.
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.data[i * self.n + j] = v;
        self.data[j * self.n + i] = v;
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    /// Replace each off-diagonal pair by its mean. Used after floating-point
    /// operations that are symmetric only in exact arithmetic.
    pub fn symmetrize(&mut self) {
        let n = self.n;
        for i in 0..n {
            for j in (i + 1)..n {
                let v = 0.5 * (self.data[i * n + j] + self.data[j * n + i]);
                self.data[i * n + j] = v;
                self.data[j * n + i] = v;
            }
        }
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0_f64, |m, &x| m.max(x.abs()))
    }

    pub fn fro_norm(&self) -> f64 {
        self.data.iter().map(|x| x * x).sum::<f64>().sqrt()
    }

    /// Max absolute row sum; cheap upper bound on the operator norm.
    pub fn inf_norm(&self) -> f64 {
        (0..self.n)
            .map(|i| (0..self.n).map(|j| self.get(i, j).abs()).sum::<f64>())
            .fold(0.0_f64, f64::max)
    }

    pub fn trace(&self) -> f64 {
        (0..self.n).map(|i| self.get(i, i)).sum()
    }

    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(x.len(), self.n);
        let mut y = vec![0.0; self.n];
        for i in 0..self.n {
            let row = &self.data[i * self.n..(i + 1) * self.n];
            y[i] = row.iter().zip(x).map(|(a, b)| a * b).sum();
        }
        y
    }

    pub fn add(&self, other: &SymMatrix) -> SymMatrix {
        assert_eq!(self.n, other.n);
        let data = self.data.iter().zip(&other.data).map(|(a, b)| a + b).collect();
        SymMatrix { n: self.n, data }
    }

    pub fn sub(&self, other: &SymMatrix) -> SymMatrix {
        assert_eq!(self.n, other.n);
        let data = self.data.iter().zip(&other.data).map(|(a, b)| a - b).collect();
        SymMatrix { n: self.n, data }
    }

    pub fn scale(&self, t: f64) -> SymMatrix {
        SymMatrix { n: self.n, data: self.data.iter().map(|x| t * x).collect() }
    }

    pub fn to_mat(&self) -> Mat {
        Mat { rows: self.n, cols: self.n, data: self.data.clone() }
    }

    /// `B' A B` for a rectangular basis `B` (columns), symmetrized.
    pub fn conjugate(&self, basis: &Mat) -> SymMatrix {
        assert_eq!(basis.rows, self.n);
        let ab = self.to_mat().matmul(basis);
        let full = basis.transpose().matmul(&ab);
        let mut out = SymMatrix { n: basis.cols, data: full.data };
        out.symmetrize();
        out
    }

    /// Parse the plain text format: first line `n`, then `n` rows of `n`
    /// whitespace-separated numbers. Symmetry is validated on load.
    pub fn parse(text: &str) -> Result<Self, DenselaError> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(k, l)| (k + 1, l.trim()))
            .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
        let (line_no, header) = lines
            .next()
            .ok_or(DenselaError::Parse { line: 1, msg: "empty input".into() })?;
        let n: usize = header.parse().map_err(|_| DenselaError::Parse {
            line: line_no,
            msg: format!("expected dimension, got {header:?}"),
        })?;
        let mut data = Vec::with_capacity(n * n);
        for _ in 0..n {
            let (line_no, row) = lines.next().ok_or(DenselaError::Parse {
                line: line_no,
                msg: format!("expected {n} rows"),
            })?;
            let vals: Result<Vec<f64>, _> = row.split_whitespace().map(str::parse).collect();
            let vals = vals.map_err(|e| DenselaError::Parse {
                line: line_no,
                msg: format!("bad number: {e}"),
            })?;
            if vals.len() != n {
                return Err(DenselaError::Parse {
                    line: line_no,
                    msg: format!("expected {n} entries per row, got {}", vals.len()),
                });
            }
            data.extend(vals);
        }
        SymMatrix::new(n, data)
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "{}", self.n);
        for i in 0..self.n {
            let row: Vec<String> = (0..self.n).map(|j| format!("{}", self.get(i, j))).collect();
            let _ = writeln!(s, "{}", row.join(" "));
        }
        s
    }
}

/// Spectral factorization `A = Q diag(values) Q'` with ascending eigenvalues
/// and orthonormal eigenvector columns.
#[derive(Debug, Clone)]
pub struct EigDecomp {
    pub values: Vec<f64>,
    pub vectors: Mat,
}

impl EigDecomp {
    pub fn reconstruct(&self) -> SymMatrix {
        let n = self.values.len();
        SymMatrix::from_fn(n, |i, j| {
            (0..n)
                .map(|k| self.vectors[(i, k)] * self.values[k] * self.vectors[(j, k)])
                .sum()
        })
    }
}

const MAX_SWEEPS: usize = 100;

/// Full eigendecomposition by cyclic Jacobi rotations.
///
/// Stops when the off-diagonal Frobenius norm drops below `1e-14 ||A||_F`;
/// errors with `NoConvergence` after 100 sweeps. Deterministic: fixed
/// row-major sweep order, eigenvalues sorted ascending, each eigenvector
/// signed so its largest-magnitude component is positive.
pub fn sym_eig(a: &SymMatrix) -> Result<EigDecomp, DenselaError> {
    let n = a.n;
    for &x in &a.data {
        if !x.is_finite() {
            return Err(DenselaError::InvalidMatrix(format!("non-finite entry {x}")));
        }
    }
    let mut m = a.clone();
    let mut v = Mat::identity(n);
    let target = 1e-14 * a.fro_norm();
    // entries this small cannot push the off-norm past the target
    let skip = target / ((n * n) as f64 + 1.0);

    let mut converged = false;
    let mut off = off_norm(&m);
    for _ in 0..MAX_SWEEPS {
        if off <= target {
            converged = true;
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = m.get(p, q);
                if apq.abs() <= skip {
                    continue;
                }
                let app = m.get(p, p);
                let aqq = m.get(q, q);
                let tau = (aqq - app) / (2.0 * apq);
                let t = if tau >= 0.0 {
                    1.0 / (tau + (1.0 + tau * tau).sqrt())
                } else {
                    1.0 / (tau - (1.0 + tau * tau).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;
                for k in 0..n {
                    if k == p || k == q {
                        continue;
                    }
                    let akp = m.get(k, p);
                    let akq = m.get(k, q);
                    m.set(k, p, c * akp - s * akq);
                    m.set(k, q, s * akp + c * akq);
                }
                m.set(p, p, app - t * apq);
                m.set(q, q, aqq + t * apq);
                m.set(p, q, 0.0);
                for k in 0..n {
                    let vkp = v[(k, p)];
                    let vkq = v[(k, q)];
                    v[(k, p)] = c * vkp - s * vkq;
                    v[(k, q)] = s * vkp + c * vkq;
                }
            }
        }
        off = off_norm(&m);
    }
    if !converged && off > target {
        return Err(DenselaError::NoConvergence { sweeps: MAX_SWEEPS, off });
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| m.get(i, i).partial_cmp(&m.get(j, j)).unwrap());
    let values: Vec<f64> = order.iter().map(|&i| m.get(i, i)).collect();
    let mut vectors = Mat::zeros(n, n);
    for (newj, &oldj) in order.iter().enumerate() {
        let col = v.column(oldj);
        // deterministic sign: largest-|.| component positive
        let mut lead = 0;
        for i in 1..n {
            if col[i].abs() > col[lead].abs() {
                lead = i;
            }
        }
        let sign = if col[lead] < 0.0 { -1.0 } else { 1.0 };
        for i in 0..n {
            vectors[(i, newj)] = sign * col[i];
        }
    }
    Ok(EigDecomp { values, vectors })
}

fn off_norm(m: &SymMatrix) -> f64 {
    let n = m.n;
    let mut s = 0.0;
    for i in 0..n {
        for j in (i + 1)..n {
            let x = m.get(i, j);
            s += 2.0 * x * x;
        }
    }
    s.sqrt()
}

/// Operator norm of a symmetric matrix: `max_i |lambda_i|`.
pub fn op_norm(a: &SymMatrix) -> Result<f64, DenselaError> {
    let e = sym_eig(a)?;
    Ok(e.values.iter().fold(0.0_f64, |m, &x| m.max(x.abs())))
}

/// `Q f(Lambda) Q'`. Errors with `NotPositiveDefinite` if `f` blows up on an
/// eigenvalue (e.g. `x^(-1/2)` on a non-positive spectrum).
pub fn spectral_apply(
    a: &SymMatrix,
    f: impl Fn(f64) -> f64,
) -> Result<SymMatrix, DenselaError> {
    let e = sym_eig(a)?;
    let mut fv = Vec::with_capacity(e.values.len());
    for &lam in &e.values {
        let y = f(lam);
        if !y.is_finite() {
            return Err(DenselaError::NotPositiveDefinite { eigenvalue: lam });
        }
        fv.push(y);
    }
    Ok(EigDecomp { values: fv, vectors: e.vectors }.reconstruct())
}

/// Solve `(A - shift I) x = b` via the spectral factorization.
///
/// Errors with `SingularShift` when the shift sits within `1e-12 ||A||` of
/// the spectrum; the reported distance is to the nearest eigenvalue.
pub fn solve_shifted(
    a: &SymMatrix,
    shift: f64,
    b: &[f64],
) -> Result<Vec<f64>, DenselaError> {
    assert_eq!(b.len(), a.n);
    let e = sym_eig(a)?;
    let norm = e.values.iter().fold(0.0_f64, |m, &x| m.max(x.abs()));
    let dist = e
        .values
        .iter()
        .map(|&lam| (lam - shift).abs())
        .fold(f64::INFINITY, f64::min);
    if dist <= 1e-12 * norm.max(1.0) {
        return Err(DenselaError::SingularShift { shift, distance: dist });
    }
    let qt_b = e.vectors.transpose().matvec(b);
    let scaled: Vec<f64> = qt_b
        .iter()
        .zip(&e.values)
        .map(|(&c, &lam)| c / (lam - shift))
        .collect();
    Ok(e.vectors.matvec(&scaled))
}

/// Orthogonal projector stored as an orthonormal basis of its range.
#[derive(Debug, Clone)]
pub struct OrthProjector {
    n: usize,
    basis: Mat,
}

/// Orthonormality tolerance enforced by [`OrthProjector::new`].
pub const ORTHO_TOL: f64 = 1e-10;

impl OrthProjector {
    pub fn new(basis: Mat) -> Result<Self, DenselaError> {
        let (n, m) = (basis.rows, basis.cols);
        if m == 0 || m > n {
            return Err(DenselaError::InvalidMatrix(format!(
                "projector rank {m} incompatible with dimension {n}"
            )));
        }
        for i in 0..m {
            for j in i..m {
                let dot: f64 = (0..n).map(|k| basis[(k, i)] * basis[(k, j)]).sum();
                let want = if i == j { 1.0 } else { 0.0 };
                if (dot - want).abs() > ORTHO_TOL {
                    return Err(DenselaError::InvalidMatrix(format!(
                        "basis not orthonormal: <v{i}, v{j}> = {dot}"
                    )));
                }
            }
        }
        Ok(OrthProjector { n, basis })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn rank(&self) -> usize {
        self.basis.cols
    }

    pub fn basis(&self) -> &Mat {
        &self.basis
    }

    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        let coeffs = self.basis.transpose().matvec(x);
        self.basis.matvec(&coeffs)
    }

    /// Materialize `P = V V'` as a dense symmetric matrix.
    pub fn materialize(&self) -> SymMatrix {
        let m = self.rank();
        SymMatrix::from_fn(self.n, |i, j| {
            (0..m).map(|k| self.basis[(i, k)] * self.basis[(j, k)]).sum()
        })
    }
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn norm2(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    #[test]
    fn eig_diagonal() {
        let a = SymMatrix::diag(&[1.0, 2.0]);
        let e = sym_eig(&a).unwrap();
        assert_eq!(e.values, vec![1.0, 2.0]);
        assert_eq!(e.vectors[(0, 0)], 1.0);
        assert_eq!(e.vectors[(1, 1)], 1.0);
        assert_eq!(e.vectors[(0, 1)], 0.0);
    }

    #[test]
    fn eig_2x2_closed_form() {
        let a = SymMatrix::new(2, vec![1.0, 0.1, 0.1, 2.0]).unwrap();
        let e = sym_eig(&a).unwrap();
        let d = 1.04_f64.sqrt();
        assert_abs_diff_eq!(e.values[0], (3.0 - d) / 2.0, epsilon = 1e-14);
        assert_abs_diff_eq!(e.values[1], (3.0 + d) / 2.0, epsilon = 1e-14);
        assert_abs_diff_eq!(e.values[0], 0.9900980486, epsilon = 1e-10);
        assert_abs_diff_eq!(e.values[1], 2.0099019514, epsilon = 1e-10);
    }

    #[test]
    fn eig_off_diagonal_pair() {
        let a = SymMatrix::new(2, vec![0.0, 1.0, 1.0, 0.0]).unwrap();
        let e = sym_eig(&a).unwrap();
        assert_abs_diff_eq!(e.values[0], -1.0, epsilon = 1e-14);
        assert_abs_diff_eq!(e.values[1], 1.0, epsilon = 1e-14);
    }

    #[test]
    fn eig_rejects_non_finite() {
        let a = SymMatrix { n: 2, data: vec![0.0, f64::NAN, f64::NAN, 0.0] };
        assert!(matches!(sym_eig(&a), Err(DenselaError::InvalidMatrix(_))));
    }

    #[test]
    fn new_rejects_asymmetry_and_nan() {
        assert!(SymMatrix::new(2, vec![0.0, 1.0, 1.0 + 1e-6, 0.0]).is_err());
        assert!(SymMatrix::new(2, vec![0.0, f64::INFINITY, f64::INFINITY, 0.0]).is_err());
        // tolerated: asymmetry below threshold gets symmetrized away
        let m = SymMatrix::new(2, vec![0.0, 1.0, 1.0 + 1e-14, 0.0]).unwrap();
        assert_eq!(m.get(0, 1), m.get(1, 0));
    }

    #[test]
    fn op_norm_cases() {
        assert_eq!(op_norm(&SymMatrix::zeros(3)).unwrap(), 0.0);
        assert_eq!(op_norm(&SymMatrix::diag(&[-3.0, 2.0])).unwrap(), 3.0);
        let a = SymMatrix::new(2, vec![1.0, 0.1, 0.1, 2.0]).unwrap();
        assert_abs_diff_eq!(op_norm(&a).unwrap(), 2.0099019514, epsilon = 1e-10);
    }

    #[test]
    fn spectral_apply_diagonal_inv_sqrt() {
        let a = SymMatrix::diag(&[4.0, 9.0]);
        let b = spectral_apply(&a, |x| x.powf(-0.5)).unwrap();
        assert_abs_diff_eq!(b.get(0, 0), 0.5, epsilon = 1e-14);
        assert_abs_diff_eq!(b.get(1, 1), 1.0 / 3.0, epsilon = 1e-14);
        assert_abs_diff_eq!(b.get(0, 1), 0.0, epsilon = 1e-14);
    }

    #[test]
    fn spectral_apply_identity_function() {
        let a = SymMatrix::new(3, vec![2.0, 0.3, 0.0, 0.3, 1.0, -0.2, 0.0, -0.2, 4.0]).unwrap();
        let b = spectral_apply(&a, |x| x).unwrap();
        for i in 0..3 {
            for j in 0..3 {
                assert_abs_diff_eq!(b.get(i, j), a.get(i, j), epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn spectral_apply_inv_sqrt_self_consistency() {
        let a = SymMatrix::new(2, vec![2.0, 1.0, 1.0, 2.0]).unwrap();
        let b = spectral_apply(&a, |x| x.powf(-0.5)).unwrap();
        let bab = b.to_mat().matmul(&a.to_mat()).matmul(&b.to_mat());
        for i in 0..2 {
            for j in 0..2 {
                let want = if i == j { 1.0 } else { 0.0 };
                assert_abs_diff_eq!(bab[(i, j)], want, epsilon = 1e-10);
            }
        }
    }

    #[test]
    fn spectral_apply_rejects_nonpositive() {
        let a = SymMatrix::diag(&[-1.0, 2.0]);
        let r = spectral_apply(&a, |x| x.powf(-0.5));
        assert!(matches!(r, Err(DenselaError::NotPositiveDefinite { .. })));
    }

    #[test]
    fn solve_shifted_diagonal() {
        let a = SymMatrix::diag(&[1.0, 2.0]);
        let x = solve_shifted(&a, 0.0, &[1.0, 1.0]).unwrap();
        assert_abs_diff_eq!(x[0], 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(x[1], 0.5, epsilon = 1e-12);
        let x = solve_shifted(&a, 1.5, &[1.0, 1.0]).unwrap();
        assert_abs_diff_eq!(x[0], -2.0, epsilon = 1e-12);
        assert_abs_diff_eq!(x[1], 2.0, epsilon = 1e-12);
    }

    #[test]
    fn solve_shifted_near_singular() {
        let a = SymMatrix::diag(&[1.0, 2.0]);
        let r = solve_shifted(&a, 1.0 + 1e-15, &[1.0, 0.0]);
        assert!(matches!(r, Err(DenselaError::SingularShift { .. })));
    }

    #[test]
    fn solve_shifted_residual_on_spd() {
        // fixed 5x5 SPD matrix: diag-dominant
        let mut a = SymMatrix::from_fn(5, |i, j| {
            if i == j { 4.0 + i as f64 } else { 0.3 / (1.0 + (i + j) as f64) }
        });
        a.symmetrize();
        let b = [1.0, -2.0, 0.5, 3.0, -1.0];
        let shift = 0.7;
        let x = solve_shifted(&a, shift, &b).unwrap();
        let ax = a.apply(&x);
        let mut res = 0.0_f64;
        for i in 0..5 {
            res += (ax[i] - shift * x[i] - b[i]).powi(2);
        }
        assert!(res.sqrt() <= 1e-9 * norm2(&b));
    }

    #[test]
    fn projector_invariants() {
        let b = Mat::from_columns(3, &[vec![1.0, 0.0, 0.0], vec![0.0, 1.0, 0.0]]);
        let p = OrthProjector::new(b).unwrap();
        let m = p.materialize();
        let m2 = m.to_mat().matmul(&m.to_mat());
        for i in 0..3 {
            for j in 0..3 {
                assert_abs_diff_eq!(m2[(i, j)], m.get(i, j), epsilon = 1e-10);
            }
        }
        let bad = Mat::from_columns(2, &[vec![1.0, 1.0]]);
        assert!(OrthProjector::new(bad).is_err());
    }

    #[test]
    fn parse_round_trip_and_errors() {
        let a = SymMatrix::new(2, vec![1.0, 0.25, 0.25, -3.5]).unwrap();
        let b = SymMatrix::parse(&a.to_text()).unwrap();
        assert_eq!(a, b);
        assert!(matches!(
            SymMatrix::parse("2\n1 2\n3 4\n"),
            Err(DenselaError::InvalidMatrix(_))
        ));
        assert!(matches!(SymMatrix::parse(""), Err(DenselaError::Parse { .. })));
        assert!(matches!(SymMatrix::parse("2\n1 2\n"), Err(DenselaError::Parse { .. })));
        assert!(matches!(SymMatrix::parse("x\n"), Err(DenselaError::Parse { .. })));
    }

    fn sym_strategy(max_n: usize) -> impl Strategy<Value = SymMatrix> {
        (1..=max_n)
            .prop_flat_map(|n| {
                proptest::collection::vec(-10.0..10.0_f64, n * n).prop_map(move |v| {
                    let mut m = SymMatrix { n, data: v };
                    m.symmetrize();
                    m
                })
            })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn reconstruction(a in sym_strategy(50)) {
            let e = sym_eig(&a).unwrap();
            let r = e.reconstruct();
            let scale = op_norm(&a).unwrap().max(1.0);
            let err = a.sub(&r).max_abs();
            prop_assert!(err <= 1e-9 * scale, "err {err:e} scale {scale:e}");
        }

        #[test]
        fn orthonormal_vectors(a in sym_strategy(30)) {
            let e = sym_eig(&a).unwrap();
            let q = &e.vectors;
            let qtq = q.transpose().matmul(q);
            let n = a.n();
            for i in 0..n {
                for j in 0..n {
                    let want = if i == j { 1.0 } else { 0.0 };
                    prop_assert!((qtq[(i, j)] - want).abs() <= 1e-10);
                }
            }
            // residual per eigenpair
            let norm = op_norm(&a).unwrap().max(1.0);
            for k in 0..n {
                let v = q.column(k);
                let av = a.apply(&v);
                let mut res = 0.0_f64;
                for i in 0..n {
                    res += (av[i] - e.values[k] * v[i]).powi(2);
                }
                prop_assert!(res.sqrt() <= 1e-10 * norm);
            }
        }

        #[test]
        fn values_sorted_and_trace(a in sym_strategy(30)) {
            let e = sym_eig(&a).unwrap();
            for w in e.values.windows(2) {
                prop_assert!(w[0] <= w[1]);
            }
            let sum: f64 = e.values.iter().sum();
            let scale = (a.n() as f64) * op_norm(&a).unwrap().max(1.0);
            prop_assert!((sum - a.trace()).abs() <= 1e-9 * scale);
        }

        #[test]
        fn op_norm_matches_power_iteration(
            mut d in proptest::collection::vec(-10.0..10.0_f64, 2..=20),
            angles in proptest::collection::vec(0.0..std::f64::consts::PI, 8),
        ) {
            // spectrum with a separated dominant eigenvalue, then a rotation;
            // power iteration on A^2 then converges geometrically
            let n = d.len();
            let mut top = 0;
            for i in 1..n {
                if d[i].abs() > d[top].abs() {
                    top = i;
                }
            }
            d[top] = 1.5 * d[top].abs().max(1.0);
            let mut rot = Mat::identity(n);
            for (k, &ang) in angles.iter().enumerate() {
                let (i, j) = (k % n, (k + 1 + k / n) % n);
                if i == j {
                    continue;
                }
                let (c, s) = (ang.cos(), ang.sin());
                let mut g = Mat::identity(n);
                g[(i, i)] = c;
                g[(i, j)] = -s;
                g[(j, i)] = s;
                g[(j, j)] = c;
                rot = rot.matmul(&g);
            }
            let a = SymMatrix::diag(&d).conjugate(&rot);
            let want = op_norm(&a).unwrap();
            let a2m = a.to_mat().matmul(&a.to_mat());
            let mut v: Vec<f64> = (0..n).map(|i| ((i + 1) as f64).sin() + 1.5).collect();
            let nv = norm2(&v);
            v.iter_mut().for_each(|x| *x /= nv);
            let mut lam2 = 0.0;
            for _ in 0..400 {
                let w = a2m.matvec(&v);
                let nw = norm2(&w);
                if nw == 0.0 {
                    lam2 = 0.0;
                    break;
                }
                lam2 = dot(&v, &w);
                v = w.iter().map(|x| x / nw).collect();
            }
            prop_assert!(
                (lam2.max(0.0).sqrt() - want).abs() <= 1e-8 * want.max(1.0),
                "power {} vs eig {}", lam2.max(0.0).sqrt(), want
            );
        }

        #[test]
        fn spectral_inverse(d in proptest::collection::vec(0.1..10.0_f64, 1..=8)) {
            // SPD via a rotation of a positive diagonal
            let n = d.len();
            let mut a = SymMatrix::diag(&d);
            if n > 1 {
                // deterministic rotation in the (0, n-1) plane
                let (c, s) = (0.6, 0.8);
                let mut g = Mat::identity(n);
                g[(0, 0)] = c;
                g[(0, n - 1)] = -s;
                g[(n - 1, 0)] = s;
                g[(n - 1, n - 1)] = c;
                a = a.conjugate(&g);
            }
            let inv = spectral_apply(&a, |x| 1.0 / x).unwrap();
            let prod = a.to_mat().matmul(&inv.to_mat());
            for i in 0..n {
                for j in 0..n {
                    let want = if i == j { 1.0 } else { 0.0 };
                    prop_assert!((prod[(i, j)] - want).abs() <= 1e-8);
                }
            }
        }

        #[test]
        fn text_round_trip(a in sym_strategy(8)) {
            let b = SymMatrix::parse(&a.to_text()).unwrap();
            prop_assert_eq!(a, b);
        }
    }
}
