//! Dense complex matrix kernel.
//!
//! Everything here works on `nalgebra` dynamic matrices of `Complex<f64>`.
//! Eigenvalues and singular values are always reported in descending order.

use nalgebra::{DMatrix, DVector, SymmetricEigen, SVD};
use num_complex::Complex;

use crate::error::{Error, Result};

pub type C64 = Complex<f64>;
pub type CMatrix = DMatrix<C64>;
pub type CVector = DVector<C64>;

/// Relative tolerance for Hermitian / symmetric input checks.
pub const SYMMETRY_TOL: f64 = 1e-10;

/// Eigenvalues in `[-EIG_CLAMP, 0)` are treated as exact zeros.
pub const EIG_CLAMP: f64 = 1e-10;

const EIG_MAX_SWEEPS_PER_DIM: usize = 1000;

pub fn c64(re: f64, im: f64) -> C64 {
    Complex::new(re, im)
}

pub fn frobenius(m: &CMatrix) -> f64 {
    m.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// Entrywise complex conjugate (not the adjoint).
pub fn conj(m: &CMatrix) -> CMatrix {
    m.map(|z| z.conj())
}

pub fn kron(a: &CMatrix, b: &CMatrix) -> CMatrix {
    a.kronecker(b)
}

/// `‖M − M†‖_F / max(1, ‖M‖_F)`.
pub fn hermitian_residual(m: &CMatrix) -> f64 {
    frobenius(&(m - m.adjoint())) / frobenius(m).max(1.0)
}

/// `‖T − Tᵀ‖_F / max(1, ‖T‖_F)`.
pub fn symmetric_residual(m: &CMatrix) -> f64 {
    frobenius(&(m - m.transpose())) / frobenius(m).max(1.0)
}

fn require_square(m: &CMatrix) -> Result<()> {
    if m.nrows() == 0 || m.nrows() != m.ncols() {
        return Err(Error::BadShape(format!(
            "expected a non-empty square matrix, got {}x{}",
            m.nrows(),
            m.ncols()
        )));
    }
    Ok(())
}

/// Spectral decomposition of a Hermitian matrix.
#[derive(Debug, Clone)]
pub struct HermitianEig {
    /// Descending.
    pub eigenvalues: Vec<f64>,
    /// Columns are eigenvectors, in the same order as `eigenvalues`.
    pub eigenvectors: CMatrix,
}

impl HermitianEig {
    pub fn reconstruct(&self) -> CMatrix {
        let v = &self.eigenvectors;
        let mut scaled = v.clone();
        for (k, lambda) in self.eigenvalues.iter().enumerate() {
            scaled.column_mut(k).scale_mut(*lambda);
        }
        scaled * v.adjoint()
    }

    /// Smallest eigenvalue.
    pub fn min(&self) -> f64 {
        self.eigenvalues.last().copied().unwrap_or(0.0)
    }
}

/// Eigen-decomposition of a Hermitian matrix, eigenvalues descending.
///
/// Ties keep the order in which the solver produced them.
pub fn hermitian_eig(m: &CMatrix) -> Result<HermitianEig> {
    require_square(m)?;
    let asymmetry = hermitian_residual(m);
    if asymmetry > SYMMETRY_TOL {
        return Err(Error::NotHermitian { asymmetry });
    }
    let n = m.nrows();
    let sym = (m + m.adjoint()).scale(0.5);
    let eig = SymmetricEigen::try_new(sym, f64::EPSILON, EIG_MAX_SWEEPS_PER_DIM * n)
        .ok_or(Error::ConvergenceFailure("Hermitian eigensolver"))?;

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));
    let eigenvalues = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    let eigenvectors = CMatrix::from_fn(n, n, |r, c| eig.eigenvectors[(r, order[c])]);
    Ok(HermitianEig {
        eigenvalues,
        eigenvectors,
    })
}

/// Eigenvalues only, descending.
pub fn hermitian_eigenvalues(m: &CMatrix) -> Result<Vec<f64>> {
    require_square(m)?;
    let asymmetry = hermitian_residual(m);
    if asymmetry > SYMMETRY_TOL {
        return Err(Error::NotHermitian { asymmetry });
    }
    let n = m.nrows();
    let sym = (m + m.adjoint()).scale(0.5);
    let vals = SymmetricEigen::try_new(sym, f64::EPSILON, EIG_MAX_SWEEPS_PER_DIM * n)
        .ok_or(Error::ConvergenceFailure("Hermitian eigensolver"))?
        .eigenvalues;
    let mut vals: Vec<f64> = vals.iter().copied().collect();
    vals.sort_by(|a, b| b.total_cmp(a));
    Ok(vals)
}

/// Clamp roundoff negatives in `[-EIG_CLAMP, 0)` to zero.
pub fn clamp_eigenvalue(lambda: f64) -> f64 {
    if (-EIG_CLAMP..0.0).contains(&lambda) {
        0.0
    } else {
        lambda
    }
}

/// Principal square root of a Hermitian positive semidefinite matrix.
pub fn sqrt_psd(m: &CMatrix) -> Result<CMatrix> {
    let eig = hermitian_eig(m)?;
    let min = eig.min();
    if min < -EIG_CLAMP {
        return Err(Error::NotPsd {
            min_eigenvalue: min,
        });
    }
    let roots = HermitianEig {
        eigenvalues: eig
            .eigenvalues
            .iter()
            .map(|&l| clamp_eigenvalue(l).max(0.0).sqrt())
            .collect(),
        eigenvectors: eig.eigenvectors,
    };
    let r = roots.reconstruct();
    Ok((&r + r.adjoint()).scale(0.5))
}

/// Singular values, descending.
pub fn singular_values(m: &CMatrix) -> Result<Vec<f64>> {
    let svd = SVD::try_new(m.clone(), false, false, f64::EPSILON, 0)
        .ok_or(Error::ConvergenceFailure("singular value decomposition"))?;
    let mut s: Vec<f64> = svd.singular_values.iter().copied().collect();
    s.sort_by(|a, b| b.total_cmp(a));
    Ok(s)
}

/// Takagi factorization `U·T·Uᵀ = diag(values)` of a complex symmetric matrix.
#[derive(Debug, Clone)]
pub struct Takagi {
    pub unitary: CMatrix,
    /// Nonnegative, descending.
    pub values: Vec<f64>,
}

impl Takagi {
    /// `U·T·Uᵀ` for the matrix this factorization was computed from.
    pub fn diagonalize(&self, t: &CMatrix) -> CMatrix {
        &self.unitary * t * self.unitary.transpose()
    }
}

/// Takagi factorization via the real symmetric embedding
/// `[[Re T, Im T], [Im T, −Re T]]`.
///
/// The embedding has eigenvalues `±σ_k`. An eigenvector `(x; y)` for `σ > 0`
/// gives a Takagi vector `w = x + i·y` with `T·w̄ = σ·w`; distinct eigenvectors
/// of the same `σ` give orthonormal complex vectors, so degenerate blocks need
/// no extra treatment. The kernel of `T` is filled with an orthonormal
/// complement.
pub fn takagi(t: &CMatrix) -> Result<Takagi> {
    require_square(t)?;
    let asymmetry = symmetric_residual(t);
    if asymmetry > SYMMETRY_TOL {
        return Err(Error::NotSymmetric { asymmetry });
    }
    let n = t.nrows();
    let sym = (t + t.transpose()).scale(0.5);
    let mut embed = DMatrix::<f64>::zeros(2 * n, 2 * n);
    for r in 0..n {
        for c in 0..n {
            let z = sym[(r, c)];
            embed[(r, c)] = z.re;
            embed[(r, c + n)] = z.im;
            embed[(r + n, c)] = z.im;
            embed[(r + n, c + n)] = -z.re;
        }
    }
    let eig = SymmetricEigen::try_new(embed, f64::EPSILON, EIG_MAX_SWEEPS_PER_DIM * 2 * n)
        .ok_or(Error::ConvergenceFailure("Takagi embedding eigensolver"))?;

    let mut order: Vec<usize> = (0..2 * n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));
    let scale = eig.eigenvalues.iter().fold(0.0_f64, |acc, x| acc.max(x.abs()));
    let cutoff = 1e-13 * scale.max(1e-300);

    let mut columns: Vec<CVector> = Vec::with_capacity(n);
    let mut values = Vec::with_capacity(n);
    for &k in order.iter().take(n) {
        let sigma = eig.eigenvalues[k];
        if sigma <= cutoff {
            break;
        }
        let col = eig.eigenvectors.column(k);
        let w = CVector::from_fn(n, |r, _| c64(col[r], col[r + n]));
        if let Some(w) = orthonormalize_against(&w, &columns) {
            columns.push(w);
            values.push(sigma);
        }
    }
    for e in 0..n {
        if columns.len() == n {
            break;
        }
        let mut basis = CVector::zeros(n);
        basis[e] = c64(1.0, 0.0);
        if let Some(w) = orthonormalize_against(&basis, &columns) {
            columns.push(w);
            values.push(0.0);
        }
    }
    if columns.len() != n {
        return Err(Error::NumericalInconsistency(
            "could not complete a Takagi basis".into(),
        ));
    }
    let w = CMatrix::from_columns(&columns);
    Ok(Takagi {
        unitary: w.adjoint(),
        values,
    })
}

/// Two passes of Gram–Schmidt; `None` if `v` is (numerically) in the span.
fn orthonormalize_against(v: &CVector, basis: &[CVector]) -> Option<CVector> {
    let mut w = v.clone();
    let start = w.norm();
    for _ in 0..2 {
        for b in basis {
            let overlap = b.dotc(&w);
            w -= b * overlap;
        }
    }
    let norm = w.norm();
    if norm <= 1e-8 * start.max(f64::MIN_POSITIVE) {
        None
    } else {
        Some(w.unscale(norm))
    }
}

/// Neumaier-compensated running sum.
#[derive(Debug, Default, Clone, Copy)]
pub struct CompensatedSum {
    sum: f64,
    carry: f64,
}

impl CompensatedSum {
    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.carry += (self.sum - t) + x;
        } else {
            self.carry += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.carry
    }
}

impl FromIterator<f64> for CompensatedSum {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        let mut acc = CompensatedSum::default();
        for x in iter {
            acc.add(x);
        }
        acc
    }
}
