//! Small dense complex Hermitian linear algebra.
//!
//! Everything here is sized for density operators of dimension up to a few
//! dozen: matrices are stored row-major in a flat `Vec`, and the eigensolver
//! is a cyclic complex Jacobi iteration.

use std::fmt;
use std::ops::{Index, IndexMut};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Eigenvalues at or below this value are treated as zero (rank, logs, support tests).
pub const ZERO_EIGENVALUE: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum LinalgError {
    #[error("matrix is not square: row {row} has {len} entries, expected {dim}")]
    NotSquare { row: usize, len: usize, dim: usize },
    #[error("matrix is not Hermitian: max |A - A^dagger| = {violation:e}")]
    NotHermitian { violation: f64 },
    #[error("trace is {trace}, not within {tolerance:e} of 1")]
    NotUnitTrace { trace: f64, tolerance: f64 },
    #[error("negative eigenvalue {value:e} below tolerance -{tolerance:e}")]
    NegativeEigenvalue { value: f64, tolerance: f64 },
    #[error("Jacobi eigensolver did not converge after {sweeps} sweeps (off-diagonal norm {off_diagonal:e})")]
    NoConvergence { sweeps: usize, off_diagonal: f64 },
    #[error("matrix function undefined at eigenvalue {eigenvalue:e}")]
    DomainError { eigenvalue: f64 },
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("vectors are not orthonormal: max |V^dagger V - I| = {violation:e}")]
    NotOrthonormal { violation: f64 },
    #[error("empty matrix")]
    Empty,
}

/// Tolerances used by validation and the eigensolver.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinalgConfig {
    pub hermitian_tol: f64,
    pub trace_tol: f64,
    pub negative_tol: f64,
    /// Iteration cap for the Jacobi solver, counted in full sweeps.
    pub max_sweeps: usize,
}

impl Default for LinalgConfig {
    fn default() -> Self {
        Self {
            hermitian_tol: 1e-10,
            trace_tol: 1e-10,
            negative_tol: 1e-10,
            max_sweeps: 64,
        }
    }
}

/// A square complex matrix, row-major.
#[derive(Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "MatrixJson", into = "MatrixJson")]
pub struct ComplexMatrix {
    dim: usize,
    data: Vec<Complex64>,
}

impl ComplexMatrix {
    pub fn zeros(dim: usize) -> Self {
        Self {
            dim,
            data: vec![Complex64::new(0.0, 0.0); dim * dim],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m[(i, i)] = Complex64::new(1.0, 0.0);
        }
        m
    }

    pub fn from_fn(dim: usize, mut f: impl FnMut(usize, usize) -> Complex64) -> Self {
        let mut data = Vec::with_capacity(dim * dim);
        for i in 0..dim {
            for j in 0..dim {
                data.push(f(i, j));
            }
        }
        Self { dim, data }
    }

    pub fn from_rows(rows: Vec<Vec<Complex64>>) -> Result<Self, LinalgError> {
        let dim = rows.len();
        if dim == 0 {
            return Err(LinalgError::Empty);
        }
        let mut data = Vec::with_capacity(dim * dim);
        for (row, entries) in rows.into_iter().enumerate() {
            if entries.len() != dim {
                return Err(LinalgError::NotSquare {
                    row,
                    len: entries.len(),
                    dim,
                });
            }
            data.extend(entries);
        }
        Ok(Self { dim, data })
    }

    pub fn from_real_rows(rows: &[Vec<f64>]) -> Result<Self, LinalgError> {
        Self::from_rows(
            rows.iter()
                .map(|r| r.iter().map(|&x| Complex64::new(x, 0.0)).collect())
                .collect(),
        )
    }

    pub fn from_diag(diag: &[f64]) -> Self {
        let mut m = Self::zeros(diag.len());
        for (i, &x) in diag.iter().enumerate() {
            m[(i, i)] = Complex64::new(x, 0.0);
        }
        m
    }

    /// Outer product |v⟩⟨v|.
    pub fn projector(v: &[Complex64]) -> Self {
        Self::from_fn(v.len(), |i, j| v[i] * v[j].conj())
    }

    /// Matrix whose columns are the given vectors.
    pub fn from_columns(columns: &[Vec<Complex64>]) -> Result<Self, LinalgError> {
        let dim = columns.len();
        if dim == 0 {
            return Err(LinalgError::Empty);
        }
        for (j, c) in columns.iter().enumerate() {
            if c.len() != dim {
                return Err(LinalgError::NotSquare {
                    row: j,
                    len: c.len(),
                    dim,
                });
            }
        }
        Ok(Self::from_fn(dim, |i, j| columns[j][i]))
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn rows(&self) -> impl Iterator<Item = &[Complex64]> {
        self.data.chunks(self.dim.max(1))
    }

    pub fn column(&self, j: usize) -> Vec<Complex64> {
        (0..self.dim).map(|i| self[(i, j)]).collect()
    }

    pub fn columns(&self) -> Vec<Vec<Complex64>> {
        (0..self.dim).map(|j| self.column(j)).collect()
    }

    pub fn diagonal(&self) -> Vec<Complex64> {
        (0..self.dim).map(|i| self[(i, i)]).collect()
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.dim, |i, j| self[(j, i)].conj())
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.dim).map(|i| self[(i, i)]).sum()
    }

    pub fn scale(&self, s: Complex64) -> Self {
        Self {
            dim: self.dim,
            data: self.data.iter().map(|&z| z * s).collect(),
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(self.dim, other.dim, "matrix dimension mismatch");
        Self {
            dim: self.dim,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a + b).collect(),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        assert_eq!(self.dim, other.dim, "matrix dimension mismatch");
        Self {
            dim: self.dim,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a - b).collect(),
        }
    }

    pub fn matmul(&self, other: &Self) -> Self {
        assert_eq!(self.dim, other.dim, "matrix dimension mismatch");
        let n = self.dim;
        let mut out = Self::zeros(n);
        for i in 0..n {
            for l in 0..n {
                let a = self[(i, l)];
                if a == Complex64::new(0.0, 0.0) {
                    continue;
                }
                for j in 0..n {
                    out.data[i * n + j] += a * other.data[l * n + j];
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[Complex64]) -> Vec<Complex64> {
        assert_eq!(self.dim, v.len(), "vector dimension mismatch");
        self.rows()
            .map(|row| row.iter().zip(v).map(|(a, b)| a * b).sum())
            .collect()
    }

    /// U A U†.
    pub fn conjugate_by(&self, u: &Self) -> Self {
        u.matmul(self).matmul(&u.adjoint())
    }

    /// Largest entrywise modulus of `self - other`.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        assert_eq!(self.dim, other.dim, "matrix dimension mismatch");
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    pub fn hermiticity_violation(&self) -> f64 {
        let n = self.dim;
        let mut worst = 0.0f64;
        for i in 0..n {
            for j in i..n {
                worst = worst.max((self[(i, j)] - self[(j, i)].conj()).norm());
            }
        }
        worst
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    fn off_diagonal_norm(&self) -> f64 {
        let n = self.dim;
        let mut acc = 0.0;
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    acc += self[(i, j)].norm_sqr();
                }
            }
        }
        acc.sqrt()
    }

    /// (A + A†)/2.
    fn hermitian_part(&self) -> Self {
        Self::from_fn(self.dim, |i, j| (self[(i, j)] + self[(j, i)].conj()) * 0.5)
    }

    /// ⟨v|A|v⟩
    pub fn expectation(&self, v: &[Complex64]) -> Complex64 {
        inner(v, &self.mul_vec(v))
    }
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = Complex64;

    fn index(&self, (i, j): (usize, usize)) -> &Complex64 {
        &self.data[i * self.dim + j]
    }
}

impl IndexMut<(usize, usize)> for ComplexMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex64 {
        &mut self.data[i * self.dim + j]
    }
}

impl fmt::Debug for ComplexMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "ComplexMatrix({}x{})", self.dim, self.dim)?;
        for row in self.rows() {
            let cells: Vec<String> = row
                .iter()
                .map(|z| format!("{:+.6}{:+.6}i", z.re, z.im))
                .collect();
            writeln!(f, "  [{}]", cells.join(", "))?;
        }
        Ok(())
    }
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum EntryJson {
    Pair([f64; 2]),
    Real(f64),
}

#[derive(Serialize, Deserialize)]
struct MatrixJson {
    dim: usize,
    entries: Vec<Vec<EntryJson>>,
}

impl TryFrom<MatrixJson> for ComplexMatrix {
    type Error = LinalgError;

    fn try_from(json: MatrixJson) -> Result<Self, LinalgError> {
        if json.entries.len() != json.dim {
            return Err(LinalgError::DimensionMismatch {
                expected: json.dim,
                found: json.entries.len(),
            });
        }
        let rows = json
            .entries
            .into_iter()
            .map(|row| {
                row.into_iter()
                    .map(|e| match e {
                        EntryJson::Pair([re, im]) => Complex64::new(re, im),
                        EntryJson::Real(re) => Complex64::new(re, 0.0),
                    })
                    .collect()
            })
            .collect();
        Self::from_rows(rows)
    }
}

impl From<ComplexMatrix> for MatrixJson {
    fn from(m: ComplexMatrix) -> Self {
        MatrixJson {
            dim: m.dim,
            entries: m
                .rows()
                .map(|row| row.iter().map(|z| EntryJson::Pair([z.re, z.im])).collect())
                .collect(),
        }
    }
}

impl fmt::Display for LinalgConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "hermitian_tol={:e} trace_tol={:e} negative_tol={:e} max_sweeps={}",
            self.hermitian_tol, self.trace_tol, self.negative_tol, self.max_sweeps
        )
    }
}

/// ⟨u|v⟩, antilinear in the first argument.
pub fn inner(u: &[Complex64], v: &[Complex64]) -> Complex64 {
    u.iter().zip(v).map(|(a, b)| a.conj() * b).sum()
}

pub fn norm(v: &[Complex64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// Largest entry of |G - I| for the Gram matrix of `vectors`.
pub fn orthonormality_violation(vectors: &[Vec<Complex64>]) -> f64 {
    let mut worst = 0.0f64;
    for (i, u) in vectors.iter().enumerate() {
        for (j, v) in vectors.iter().enumerate() {
            let target = if i == j { 1.0 } else { 0.0 };
            worst = worst.max((inner(u, v) - Complex64::new(target, 0.0)).norm());
        }
    }
    worst
}

/// Eigenvalues sorted descending with matching orthonormal eigenvectors.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralDecomposition {
    pub eigenvalues: Vec<f64>,
    /// Eigenvectors as columns.
    pub eigenvectors: ComplexMatrix,
}

impl SpectralDecomposition {
    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn vector(&self, i: usize) -> Vec<Complex64> {
        self.eigenvectors.column(i)
    }

    pub fn vectors(&self) -> Vec<Vec<Complex64>> {
        self.eigenvectors.columns()
    }

    /// V f(Λ) V†.
    pub fn reconstruct_with(&self, f: impl Fn(f64) -> f64) -> ComplexMatrix {
        let n = self.dim();
        let v = &self.eigenvectors;
        let fvals: Vec<f64> = self.eigenvalues.iter().map(|&x| f(x)).collect();
        ComplexMatrix::from_fn(n, |i, j| {
            (0..n)
                .map(|l| v[(i, l)] * v[(j, l)].conj() * fvals[l])
                .sum()
        })
    }

    pub fn reconstruct(&self) -> ComplexMatrix {
        self.reconstruct_with(|x| x)
    }
}

/// Cyclic Jacobi diagonalization of a Hermitian matrix.
///
/// Only the Hermitian part of `a` is used. Eigenvalues come back sorted
/// descending; each eigenvector has its largest-magnitude component made real
/// and positive (lowest index wins ties).
pub fn eigh_hermitian(
    a: &ComplexMatrix,
    max_sweeps: usize,
) -> Result<SpectralDecomposition, LinalgError> {
    let n = a.dim();
    if n == 0 {
        return Err(LinalgError::Empty);
    }
    let mut m = a.hermitian_part();
    let mut v = ComplexMatrix::identity(n);
    let scale = m.frobenius_norm();
    let threshold = 1e-15 * scale.max(f64::MIN_POSITIVE) * (n as f64);

    let mut sweeps = 0;
    loop {
        let off = m.off_diagonal_norm();
        if off <= threshold {
            break;
        }
        if sweeps >= max_sweeps {
            return Err(LinalgError::NoConvergence {
                sweeps,
                off_diagonal: off,
            });
        }
        sweeps += 1;
        for p in 0..n {
            for q in (p + 1)..n {
                jacobi_rotate(&mut m, &mut v, p, q);
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    let diag: Vec<f64> = (0..n).map(|i| m[(i, i)].re).collect();
    order.sort_by(|&i, &j| diag[j].total_cmp(&diag[i]).then(i.cmp(&j)));

    let eigenvalues = order.iter().map(|&i| diag[i]).collect();
    let columns: Vec<Vec<Complex64>> = order
        .iter()
        .map(|&j| fix_phase(v.column(j)))
        .collect();
    Ok(SpectralDecomposition {
        eigenvalues,
        eigenvectors: ComplexMatrix::from_columns(&columns)?,
    })
}

fn jacobi_rotate(m: &mut ComplexMatrix, v: &mut ComplexMatrix, p: usize, q: usize) {
    let n = m.dim();
    let apq = m[(p, q)];
    let b = apq.norm();
    if b < 1e-300 {
        return;
    }
    // a_pq = b e^{i phi}; phase the q axis so the pivot becomes real, then
    // apply a real rotation to the 2x2 block.
    let phase = apq / b;
    let app = m[(p, p)].re;
    let aqq = m[(q, q)].re;
    let theta = (aqq - app) / (2.0 * b);
    let t = if theta.abs() > 1e150 {
        0.5 / theta
    } else {
        theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt())
    };
    let c = 1.0 / (t * t + 1.0).sqrt();
    let s = t * c;
    let gqp = -phase.conj() * s;
    let gqq = phase.conj() * c;

    for r in 0..n {
        let mrp = m[(r, p)];
        let mrq = m[(r, q)];
        m[(r, p)] = mrp * c + mrq * gqp;
        m[(r, q)] = mrp * s + mrq * gqq;
    }
    for r in 0..n {
        let mpr = m[(p, r)];
        let mqr = m[(q, r)];
        m[(p, r)] = mpr * c + mqr * gqp.conj();
        m[(q, r)] = mpr * s + mqr * gqq.conj();
    }
    m[(p, q)] = Complex64::new(0.0, 0.0);
    m[(q, p)] = Complex64::new(0.0, 0.0);
    m[(p, p)].im = 0.0;
    m[(q, q)].im = 0.0;

    for r in 0..n {
        let vrp = v[(r, p)];
        let vrq = v[(r, q)];
        v[(r, p)] = vrp * c + vrq * gqp;
        v[(r, q)] = vrp * s + vrq * gqq;
    }
}

fn fix_phase(mut col: Vec<Complex64>) -> Vec<Complex64> {
    let max = col.iter().map(|z| z.norm()).fold(0.0, f64::max);
    if max == 0.0 {
        return col;
    }
    let pivot = col
        .iter()
        .position(|z| z.norm() >= max - 1e-12)
        .expect("some component attains the max");
    let rot = col[pivot].conj() / col[pivot].norm();
    for z in col.iter_mut() {
        *z *= rot;
    }
    col[pivot] = Complex64::new(col[pivot].re, 0.0);
    col
}

/// A validated density operator together with its spectral decomposition.
///
/// The decomposition is computed once at construction; its eigenvalues are
/// clamped into [0, 1] and sum to one.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityOperator {
    matrix: ComplexMatrix,
    spectrum: SpectralDecomposition,
}

impl DensityOperator {
    pub fn new(matrix: ComplexMatrix) -> Result<Self, LinalgError> {
        validate_density(matrix, &LinalgConfig::default())
    }

    pub fn diagonal(probs: &[f64]) -> Result<Self, LinalgError> {
        Self::new(ComplexMatrix::from_diag(probs))
    }

    /// |ψ⟩⟨ψ| for a normalized ψ.
    pub fn pure(state: &[Complex64]) -> Result<Self, LinalgError> {
        Self::new(ComplexMatrix::projector(state))
    }

    /// Builds Σ_i w_i |v_i⟩⟨v_i| from non-negative weights and orthonormal
    /// vectors. Weights are renormalized to unit sum.
    pub fn from_spectrum(
        weights: &[f64],
        vectors: &[Vec<Complex64>],
    ) -> Result<Self, LinalgError> {
        if weights.len() != vectors.len() {
            return Err(LinalgError::DimensionMismatch {
                expected: vectors.len(),
                found: weights.len(),
            });
        }
        if let Some(&w) = weights.iter().find(|&&w| w < 0.0 || !w.is_finite()) {
            return Err(LinalgError::NegativeEigenvalue {
                value: w,
                tolerance: 0.0,
            });
        }
        let violation = orthonormality_violation(vectors);
        if violation > 1e-9 {
            return Err(LinalgError::NotOrthonormal { violation });
        }
        let total: f64 = weights.iter().sum();
        if total <= 0.0 {
            return Err(LinalgError::NotUnitTrace {
                trace: total,
                tolerance: 0.0,
            });
        }
        let mut order: Vec<usize> = (0..weights.len()).collect();
        order.sort_by(|&i, &j| weights[j].total_cmp(&weights[i]).then(i.cmp(&j)));
        let eigenvalues: Vec<f64> = order.iter().map(|&i| weights[i] / total).collect();
        let columns: Vec<Vec<Complex64>> = order.iter().map(|&i| vectors[i].clone()).collect();
        let spectrum = SpectralDecomposition {
            eigenvalues,
            eigenvectors: ComplexMatrix::from_columns(&columns)?,
        };
        Ok(Self {
            matrix: spectrum.reconstruct(),
            spectrum,
        })
    }

    pub fn dim(&self) -> usize {
        self.matrix.dim()
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn spectrum(&self) -> &SpectralDecomposition {
        &self.spectrum
    }

    pub fn eigenvalues(&self) -> &[f64] {
        &self.spectrum.eigenvalues
    }

    pub fn eigenvectors(&self) -> Vec<Vec<Complex64>> {
        self.spectrum.vectors()
    }

    /// Number of eigenvalues above [`ZERO_EIGENVALUE`].
    pub fn rank(&self) -> usize {
        self.eigenvalues()
            .iter()
            .filter(|&&x| x > ZERO_EIGENVALUE)
            .count()
    }

    /// ⟨v|ρ|v⟩, which is real for Hermitian ρ.
    pub fn expectation(&self, v: &[Complex64]) -> f64 {
        self.matrix.expectation(v).re
    }

    /// U ρ U† for a unitary U.
    pub fn conjugate_by(&self, u: &ComplexMatrix) -> Result<Self, LinalgError> {
        let vectors: Vec<Vec<Complex64>> = self
            .spectrum
            .vectors()
            .iter()
            .map(|v| u.mul_vec(v))
            .collect();
        Self::from_spectrum(&self.spectrum.eigenvalues, &vectors)
    }
}

/// Checks the density-operator invariants and returns the validated operator.
///
/// Small negative eigenvalues (above `-negative_tol`) are clamped to zero and
/// the spectrum is renormalized.
pub fn validate_density(
    matrix: ComplexMatrix,
    config: &LinalgConfig,
) -> Result<DensityOperator, LinalgError> {
    let violation = matrix.hermiticity_violation();
    if violation > config.hermitian_tol {
        return Err(LinalgError::NotHermitian { violation });
    }
    let trace = matrix.trace().re;
    if (trace - 1.0).abs() > config.trace_tol {
        return Err(LinalgError::NotUnitTrace {
            trace,
            tolerance: config.trace_tol,
        });
    }
    let mut spectrum = eigh_hermitian(&matrix, config.max_sweeps)?;
    if let Some(&lowest) = spectrum.eigenvalues.last() {
        if lowest < -config.negative_tol {
            return Err(LinalgError::NegativeEigenvalue {
                value: lowest,
                tolerance: config.negative_tol,
            });
        }
    }
    let mut clamped = false;
    for x in spectrum.eigenvalues.iter_mut() {
        let y = x.clamp(0.0, 1.0);
        clamped |= y != *x;
        *x = y;
    }
    let total: f64 = spectrum.eigenvalues.iter().sum();
    for x in spectrum.eigenvalues.iter_mut() {
        *x /= total;
    }
    let matrix = if clamped {
        spectrum.reconstruct()
    } else {
        matrix.hermitian_part().scale(Complex64::new(1.0 / trace, 0.0))
    };
    Ok(DensityOperator { matrix, spectrum })
}

/// The spectral decomposition of ρ.
pub fn eigh(rho: &DensityOperator) -> SpectralDecomposition {
    rho.spectrum.clone()
}

/// V f(Λ) V† built from ρ's spectral decomposition.
pub fn mat_fn(rho: &DensityOperator, f: impl Fn(f64) -> f64) -> Result<ComplexMatrix, LinalgError> {
    for &x in rho.eigenvalues() {
        if !f(x).is_finite() {
            return Err(LinalgError::DomainError { eigenvalue: x });
        }
    }
    Ok(rho.spectrum.reconstruct_with(f))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn maximally_mixed_is_valid() {
        let rho = DensityOperator::diagonal(&[0.5, 0.5]).unwrap();
        assert_eq!(rho.eigenvalues(), &[0.5, 0.5]);
    }

    #[test]
    fn trace_violation_is_reported() {
        let err = DensityOperator::diagonal(&[0.7, 0.3 + 2e-3]).unwrap_err();
        match err {
            LinalgError::NotUnitTrace { trace, .. } => assert!((trace - 1.002).abs() < 1e-12),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn negative_eigenvalue_is_reported() {
        let err = DensityOperator::diagonal(&[1.1, -0.1]).unwrap_err();
        match err {
            LinalgError::NegativeEigenvalue { value, .. } => assert!((value + 0.1).abs() < 1e-12),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn non_hermitian_is_rejected() {
        let m = ComplexMatrix::from_rows(vec![
            vec![c(0.5, 0.0), c(0.1, 0.1)],
            vec![c(0.1, 0.1), c(0.5, 0.0)],
        ])
        .unwrap();
        assert!(matches!(
            DensityOperator::new(m),
            Err(LinalgError::NotHermitian { .. })
        ));
    }

    #[test]
    fn tiny_negative_eigenvalue_is_clamped() {
        let rho = DensityOperator::diagonal(&[1.0 + 5e-11, -5e-11]).unwrap();
        assert_eq!(rho.eigenvalues()[1], 0.0);
        assert!((rho.eigenvalues()[0] - 1.0).abs() < 1e-15);
    }

    #[test]
    fn ragged_rows_are_rejected() {
        let err = ComplexMatrix::from_rows(vec![vec![c(1.0, 0.0)], vec![]]).unwrap_err();
        assert!(matches!(err, LinalgError::NotSquare { .. }));
    }

    #[test]
    fn diagonal_input_gives_permuted_basis() {
        let rho = DensityOperator::diagonal(&[0.25, 0.75]).unwrap();
        let s = eigh(&rho);
        assert_eq!(s.eigenvalues, vec![0.75, 0.25]);
        assert_eq!(s.vector(0), vec![c(0.0, 0.0), c(1.0, 0.0)]);
        assert_eq!(s.vector(1), vec![c(1.0, 0.0), c(0.0, 0.0)]);
    }

    #[test]
    fn rank_one_projector() {
        let m = ComplexMatrix::from_real_rows(&[vec![0.5, 0.5], vec![0.5, 0.5]]).unwrap();
        let rho = DensityOperator::new(m).unwrap();
        let s = eigh(&rho);
        assert!((s.eigenvalues[0] - 1.0).abs() < 1e-14);
        assert!(s.eigenvalues[1].abs() < 1e-14);
        let v = s.vector(0);
        let h = 0.5f64.sqrt();
        assert!((v[0] - c(h, 0.0)).norm() < 1e-14);
        assert!((v[1] - c(h, 0.0)).norm() < 1e-14);
    }

    #[test]
    fn complex_hermitian_reconstruction() {
        let m = ComplexMatrix::from_rows(vec![
            vec![c(2.0, 0.0), c(0.3, -1.2), c(0.0, 0.4)],
            vec![c(0.3, 1.2), c(-1.0, 0.0), c(0.7, 0.7)],
            vec![c(0.0, -0.4), c(0.7, -0.7), c(0.5, 0.0)],
        ])
        .unwrap();
        let s = eigh_hermitian(&m, 64).unwrap();
        assert!(s.reconstruct().max_abs_diff(&m) < 1e-12);
        assert!(orthonormality_violation(&s.vectors()) < 1e-12);
        assert!(s.eigenvalues.windows(2).all(|w| w[0] >= w[1]));
    }

    #[test]
    fn iteration_cap_reports_no_convergence() {
        let m = ComplexMatrix::from_real_rows(&[
            vec![1.0, 0.3, 0.2],
            vec![0.3, 0.5, 0.1],
            vec![0.2, 0.1, 0.2],
        ])
        .unwrap();
        assert!(matches!(
            eigh_hermitian(&m, 0),
            Err(LinalgError::NoConvergence { .. })
        ));
    }

    #[test]
    fn matrix_square_root_on_diagonal() {
        let rho = DensityOperator::diagonal(&[0.64, 0.36]).unwrap();
        let r = mat_fn(&rho, f64::sqrt).unwrap();
        assert!(r.max_abs_diff(&ComplexMatrix::from_diag(&[0.8, 0.6])) < 1e-15);

        let rho = DensityOperator::diagonal(&[0.5, 0.5, 0.0]).unwrap();
        let r = mat_fn(&rho, f64::sqrt).unwrap();
        let h = 0.5f64.sqrt();
        assert!(r.max_abs_diff(&ComplexMatrix::from_diag(&[h, h, 0.0])) < 1e-15);
    }

    #[test]
    fn undefined_function_value_is_a_domain_error() {
        let rho = DensityOperator::diagonal(&[1.0, 0.0]).unwrap();
        assert!(matches!(
            mat_fn(&rho, f64::ln),
            Err(LinalgError::DomainError { .. })
        ));
    }

    #[test]
    fn matrix_json_accepts_real_shorthand() {
        let m: ComplexMatrix =
            serde_json::from_str(r#"{"dim":2,"entries":[[0.5,[0,-0.5]],[[0,0.5],0.5]]}"#).unwrap();
        assert_eq!(m[(0, 1)], c(0.0, -0.5));
        assert_eq!(m[(1, 1)], c(0.5, 0.0));
        let back: ComplexMatrix = serde_json::from_str(&serde_json::to_string(&m).unwrap()).unwrap();
        assert_eq!(back, m);
    }

    #[test]
    fn matrix_json_dim_must_match() {
        let r: Result<ComplexMatrix, _> = serde_json::from_str(r#"{"dim":3,"entries":[[1]]}"#);
        assert!(r.is_err());
    }
}
