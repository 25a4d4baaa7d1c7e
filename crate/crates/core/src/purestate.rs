//! Pure bipartite states on `H ⊗ H` with `dim H = N`, and their measures.
//!
//! A state is stored as its `N×N` coefficient matrix `A`, `|ψ⟩ = Σ a_ip e_i⊗e_p`.
//! The state vector component at index `N·i + p` (zero based) is `a_ip`.

use std::f64::consts::SQRT_2;
use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::linalg::{self, CMatrix, CVector, C64};

/// Absolute norm below which a coefficient matrix counts as zero.
const ZERO_NORM: f64 = 1e-12;

/// Default relative gap separating eigenvalue clusters.
pub const DEFAULT_PROFILE_TOL: f64 = 1e-8;

/// Schmidt eigenvalues below this are treated as zero when matching profiles.
const ZERO_EIGENVALUE: f64 = linalg::EIG_CLAMP;

#[derive(Debug, Clone, PartialEq)]
pub struct PureState {
    coeffs: CMatrix,
}

/// The pair of local-unitary invariants `I0 = Tr(AA†)`, `I1 = Tr[(AA†)²]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LocalInvariants {
    pub i0: f64,
    pub i1: f64,
}

/// `n` distinct nonzero eigenvalues of `AA†`, each with multiplicity `m`.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectrumProfile {
    pub m: usize,
    pub n: usize,
    /// Descending; coincident clusters appear as repeated values.
    pub values: Vec<f64>,
}

impl SpectrumProfile {
    pub fn product(&self) -> f64 {
        self.values.iter().product()
    }
}

/// Outcome of matching a spectrum against an `(m, n)` profile.
#[derive(Debug, Clone, PartialEq)]
pub(crate) enum ProfileFit {
    Interior(SpectrumProfile),
    /// Fewer than `n` nonzero clusters; the missing values are filled from
    /// the (near) zero eigenvalues, so the product is tiny but continuous.
    Boundary(SpectrumProfile),
}

impl PureState {
    /// Build a state from its coefficient matrix.
    ///
    /// Matrices whose Frobenius norm is within `tol` of one are rescaled to
    /// exact unit norm; others are rescaled only when `renormalize` is set.
    pub fn from_coefficients(a: CMatrix, tol: f64, renormalize: bool) -> Result<Self> {
        if a.nrows() != a.ncols() {
            return Err(Error::BadShape(format!(
                "coefficient matrix must be square, got {}x{}",
                a.nrows(),
                a.ncols()
            )));
        }
        if a.nrows() < 2 {
            return Err(Error::BadShape("factor dimension must be at least 2".into()));
        }
        if a.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::BadShape("non-finite coefficient".into()));
        }
        let norm = linalg::frobenius(&a);
        if norm < ZERO_NORM {
            return Err(Error::ZeroState);
        }
        if (norm - 1.0).abs() > tol && !renormalize {
            return Err(Error::NotNormalized { norm });
        }
        Ok(Self {
            coeffs: a.unscale(norm),
        })
    }

    /// Build a state from a length-`N²` vector (index `N·i + p` holds `a_ip`).
    pub fn from_vector(v: &CVector, dim: usize, tol: f64, renormalize: bool) -> Result<Self> {
        if v.len() != dim * dim {
            return Err(Error::DimensionMismatch {
                expected: dim * dim,
                found: v.len(),
            });
        }
        let a = CMatrix::from_fn(dim, dim, |i, p| v[dim * i + p]);
        Self::from_coefficients(a, tol, renormalize)
    }

    /// Wraps an already unit-norm matrix; callers guarantee normalization.
    pub(crate) fn from_normalized_unchecked(coeffs: CMatrix) -> Self {
        Self { coeffs }
    }

    pub fn dim(&self) -> usize {
        self.coeffs.nrows()
    }

    pub fn coeffs(&self) -> &CMatrix {
        &self.coeffs
    }

    pub fn to_vector(&self) -> CVector {
        let n = self.dim();
        CVector::from_fn(n * n, |k, _| self.coeffs[(k / n, k % n)])
    }

    /// `a_ip·a_jq − a_iq·a_jp`, zero-based indices.
    pub fn minor(&self, i: usize, p: usize, j: usize, q: usize) -> C64 {
        let a = &self.coeffs;
        a[(i, p)] * a[(j, q)] - a[(i, q)] * a[(j, p)]
    }

    /// The state `(U⊗V)|ψ⟩`, i.e. `A ↦ U·A·Vᵀ`.
    pub fn apply_local(&self, u: &CMatrix, v: &CMatrix) -> Self {
        let a = u * &self.coeffs * v.transpose();
        let norm = linalg::frobenius(&a);
        Self {
            coeffs: a.unscale(norm),
        }
    }

    /// `ρ₁ = A·A†`.
    pub fn reduced_density(&self) -> CMatrix {
        &self.coeffs * self.coeffs.adjoint()
    }

    /// Eigenvalues of `AA†`, descending, roundoff negatives clamped to zero.
    pub fn schmidt_spectrum(&self) -> Result<Vec<f64>> {
        Ok(linalg::hermitian_eigenvalues(&self.reduced_density())?
            .into_iter()
            .map(|l| linalg::clamp_eigenvalue(l).max(0.0))
            .collect())
    }

    /// Entanglement of formation in bits: the entropy of `AA†`.
    pub fn eof(&self) -> Result<f64> {
        Ok(entropy_bits(&self.schmidt_spectrum()?))
    }

    /// Two-qubit concurrence `2|a₁₁a₂₂ − a₁₂a₂₁|`.
    pub fn concurrence_c2(&self) -> Result<f64> {
        if self.dim() != 2 {
            return Err(Error::DimensionMismatch {
                expected: 2,
                found: self.dim(),
            });
        }
        Ok(2.0 * self.minor(0, 0, 1, 1).norm())
    }

    pub fn local_invariants(&self) -> LocalInvariants {
        let rho1 = self.reduced_density();
        let i0 = (0..self.dim()).map(|k| rho1[(k, k)].re).sum();
        let i1 = rho1.iter().map(|z| z.norm_sqr()).sum();
        LocalInvariants { i0, i1 }
    }

    /// `C_N = √(N/(N−1)·(I0² − I1))`.
    pub fn concurrence_cn(&self) -> Result<f64> {
        let n = self.dim() as f64;
        let LocalInvariants { i0, i1 } = self.local_invariants();
        let radicand = n / (n - 1.0) * (i0 * i0 - i1);
        if radicand < -1e-12 {
            return Err(Error::NumericalInconsistency(format!(
                "negative C_N radicand {radicand:e}"
            )));
        }
        Ok(radicand.max(0.0).sqrt())
    }

    /// Match the nonzero spectrum of `AA†` against `n` distinct values of
    /// multiplicity `m`. Values closer than `tol` (relative) are one cluster;
    /// eigenvalues below `1e-10` count as zero.
    pub fn spectrum_profile(&self, m: usize, n: usize, tol: f64) -> Result<SpectrumProfile> {
        match fit_profile(&self.schmidt_spectrum()?, self.dim(), m, n, tol)? {
            ProfileFit::Interior(p) => Ok(p),
            ProfileFit::Boundary(_) => Err(Error::ProfileMismatch {
                m,
                n,
                diagnostic: format!(
                    "fewer than {n} nonzero clusters: {}",
                    describe_clusters(&self.schmidt_spectrum()?, tol)
                ),
            }),
        }
    }

    /// Generalized concurrence `D = m·n·√(λ₁⋯λₙ)`.
    ///
    /// States whose spectrum lacks some of the `n` clusters only because the
    /// corresponding eigenvalues are (numerically) zero use those eigenvalues
    /// directly, so `D` is zero or nearly so.
    pub fn generalized_concurrence(&self, m: usize, n: usize) -> Result<f64> {
        self.generalized_concurrence_tol(m, n, DEFAULT_PROFILE_TOL)
    }

    pub fn generalized_concurrence_tol(&self, m: usize, n: usize, tol: f64) -> Result<f64> {
        // unclamped, so D stays continuous near product states
        let spectrum: Vec<f64> = linalg::hermitian_eigenvalues(&self.reduced_density())?
            .into_iter()
            .map(|l| l.max(0.0))
            .collect();
        Ok(match fit_profile(&spectrum, self.dim(), m, n, tol)? {
            ProfileFit::Interior(p) | ProfileFit::Boundary(p) => (m * n) as f64 * p.product().sqrt(),
        })
    }

    /// `(mn/√2)·√(I0² − I1)`, the quadratic-form expression for `D`.
    pub fn invariant_concurrence(&self, m: usize, n: usize) -> f64 {
        let LocalInvariants { i0, i1 } = self.local_invariants();
        (m * n) as f64 / SQRT_2 * (i0 * i0 - i1).max(0.0).sqrt()
    }

    /// Condition iii of the class Ψ: `D` equals its quadratic-form expression.
    pub fn psi_condition_iii(&self, m: usize, n: usize, tol: f64) -> Result<bool> {
        let d = self.generalized_concurrence(m, n)?;
        Ok((d - self.invariant_concurrence(m, n)).abs() <= tol)
    }
}

/// Whether a generalized concurrence lies in its nominal range `[0, 1]`.
pub fn concurrence_in_range(d: f64) -> bool {
    (-1e-12..=1.0 + 1e-12).contains(&d)
}

/// `−Σ λ log₂ λ` with `0·log 0 = 0`.
pub fn entropy_bits(values: &[f64]) -> f64 {
    values
        .iter()
        .filter(|&&l| l > 0.0)
        .map(|&l| -l * l.log2())
        .sum::<f64>()
        .max(0.0)
}

/// Clusters of the nonzero part of a descending spectrum, and its zero part.
fn clusters(spectrum: &[f64], tol: f64) -> (Vec<(f64, usize)>, Vec<f64>) {
    let mut out: Vec<(f64, usize, f64)> = Vec::new();
    let mut zeros = Vec::new();
    for &l in spectrum {
        if l < ZERO_EIGENVALUE {
            zeros.push(l.max(0.0));
            continue;
        }
        match out.last_mut() {
            Some((sum, count, prev)) if *prev - l <= tol * *prev => {
                *sum += l;
                *count += 1;
                *prev = l;
            }
            _ => out.push((l, 1, l)),
        }
    }
    let clusters = out
        .into_iter()
        .map(|(sum, count, _)| (sum / count as f64, count))
        .collect();
    (clusters, zeros)
}

fn describe_clusters(spectrum: &[f64], tol: f64) -> String {
    let (cl, zeros) = clusters(spectrum, tol);
    let mut s = String::from("[");
    for (k, (v, c)) in cl.iter().enumerate() {
        if k > 0 {
            s.push_str(", ");
        }
        let _ = write!(s, "{v:.6e} x{c}");
    }
    let _ = write!(s, "] plus {} zero eigenvalue(s)", zeros.len());
    s
}

pub(crate) fn fit_profile(
    spectrum: &[f64],
    dim: usize,
    m: usize,
    n: usize,
    tol: f64,
) -> Result<ProfileFit> {
    let mismatch = |diagnostic: String| Error::ProfileMismatch { m, n, diagnostic };
    if m == 0 || n == 0 {
        return Err(mismatch("m and n must be positive".into()));
    }
    if m * n > dim {
        return Err(mismatch(format!("m·n = {} exceeds N = {dim}", m * n)));
    }
    let (cl, zeros) = clusters(spectrum, tol);
    if cl.iter().any(|&(_, c)| c % m != 0) {
        return Err(mismatch(format!(
            "cluster sizes are not multiples of {m}: {}",
            describe_clusters(spectrum, tol)
        )));
    }
    let distinct: usize = cl.iter().map(|&(_, c)| c / m).sum();
    if distinct == n {
        let values = cl
            .iter()
            .flat_map(|&(v, c)| std::iter::repeat_n(v, c / m))
            .collect();
        return Ok(ProfileFit::Interior(SpectrumProfile { m, n, values }));
    }
    if distinct < n && zeros.len() >= (n - distinct) * m {
        let mut values: Vec<f64> = cl
            .iter()
            .flat_map(|&(v, c)| std::iter::repeat_n(v, c / m))
            .collect();
        values.extend(
            zeros
                .chunks(m)
                .take(n - distinct)
                .map(|c| c.iter().sum::<f64>() / m as f64),
        );
        return Ok(ProfileFit::Boundary(SpectrumProfile { m, n, values }));
    }
    Err(mismatch(describe_clusters(spectrum, tol)))
}
