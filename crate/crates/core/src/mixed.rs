//! Mixed states: the `S^{ipjq}` matrices, their Λ-spectra, the
//! generalized-concurrence lower bound and the partial transpose test.
//!
//! Density matrices act on `C^N ⊗ C^N` in the product basis `e_i ⊗ e_p`,
//! stored at index `N·i + p`. Complex conjugation `ρ*` is entrywise in that
//! basis.

use std::fmt;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::linalg::{self, c64, CMatrix, CVector, CompensatedSum, HermitianEig, EIG_CLAMP};
use crate::purestate::PureState;
use crate::spectra::{eof_of_d, EigFamily};

/// Default tolerance for validating density matrices.
pub const DENSITY_TOL: f64 = 1e-10;

/// Eigenvalues of ρ at or below this are outside its support.
pub const RANK_TOL: f64 = 1e-12;

/// Singular values past the fourth must stay below this.
pub const RANK_VIOLATION: f64 = 1e-8;

/// Decomposition members with squared norm below this are dropped.
pub const NEGLIGIBLE_WEIGHT: f64 = 1e-14;

#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    dim: usize,
    matrix: CMatrix,
}

impl DensityMatrix {
    /// Validate an `N²×N²` matrix as a density operator.
    pub fn new(dim: usize, matrix: CMatrix, tol: f64) -> Result<Self> {
        if dim < 2 || matrix.nrows() != dim * dim || matrix.ncols() != dim * dim {
            return Err(Error::BadShape(format!(
                "expected {0}x{0} for N={dim}, got {1}x{2}",
                dim * dim,
                matrix.nrows(),
                matrix.ncols()
            )));
        }
        let asymmetry = linalg::hermitian_residual(&matrix);
        if asymmetry > tol {
            return Err(Error::NotHermitian { asymmetry });
        }
        let min_eigenvalue = *linalg::hermitian_eigenvalues(&matrix)?
            .last()
            .expect("non-empty");
        if min_eigenvalue < -tol {
            return Err(Error::NotPsd { min_eigenvalue });
        }
        let trace: f64 = (0..dim * dim).map(|k| matrix[(k, k)].re).sum();
        if (trace - 1.0).abs() >= tol {
            return Err(Error::BadTrace { trace });
        }
        let matrix = (&matrix + matrix.adjoint()).scale(0.5);
        Ok(Self { dim, matrix })
    }

    pub(crate) fn from_matrix_unchecked(dim: usize, matrix: CMatrix) -> Self {
        Self { dim, matrix }
    }

    /// `|ψ⟩⟨ψ|`.
    pub fn from_pure(state: &PureState) -> Self {
        let v = state.to_vector();
        Self {
            dim: state.dim(),
            matrix: &v * v.adjoint(),
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn trace(&self) -> f64 {
        (0..self.matrix.nrows()).map(|k| self.matrix[(k, k)].re).sum()
    }

    pub fn eigen(&self) -> Result<HermitianEig> {
        linalg::hermitian_eig(&self.matrix)
    }

    /// Number of eigenvalues above `RANK_TOL`.
    pub fn rank(&self) -> usize {
        linalg::hermitian_eigenvalues(&self.matrix)
            .map(|v| v.into_iter().filter(|&l| l > RANK_TOL).count())
            .unwrap_or(0)
    }

    /// `(U⊗V)·ρ·(U⊗V)†`.
    pub fn apply_local(&self, u: &CMatrix, v: &CMatrix) -> Self {
        let w = linalg::kron(u, v);
        let m = &w * &self.matrix * w.adjoint();
        Self {
            dim: self.dim,
            matrix: (&m + m.adjoint()).scale(0.5),
        }
    }

    /// Orthogonal eigenvectors scaled so `⟨v_k|v_k⟩` is the k-th eigenvalue;
    /// only the support (eigenvalues above `RANK_TOL`) is returned.
    pub fn subnormalized_eigenvectors(&self) -> Result<Vec<CVector>> {
        let eig = self.eigen()?;
        Ok(eig
            .eigenvalues
            .iter()
            .enumerate()
            .filter(|(_, &l)| l > RANK_TOL)
            .map(|(k, &l)| eig.eigenvectors.column(k).scale(l.sqrt()))
            .collect())
    }

    /// Transpose on the second factor: `ρ^{T_B}[(i,p),(j,q)] = ρ[(i,q),(j,p)]`.
    pub fn partial_transpose(&self) -> CMatrix {
        let n = self.dim;
        CMatrix::from_fn(n * n, n * n, |r, c| {
            let (i, p) = (r / n, r % n);
            let (j, q) = (c / n, c % n);
            self.matrix[(n * i + q, n * j + p)]
        })
    }

    /// Positive-partial-transpose test.
    pub fn ppt_check(&self) -> Result<PptReport> {
        let vals = linalg::hermitian_eigenvalues(&self.partial_transpose())?;
        let min_eigenvalue = *vals.last().expect("non-empty");
        Ok(PptReport {
            is_ppt: min_eigenvalue >= -EIG_CLAMP,
            min_eigenvalue,
        })
    }

    /// Weight of ρ outside the subspace where coefficient rows 2 and 3 agree
    /// (N = 3 only): `Tr(Π⊥ρ)` with `Π⊥` projecting on `(e₂−e₃)/√2 ⊗ C³`.
    pub fn form_a_leak(&self) -> Result<f64> {
        if self.dim != 3 {
            return Err(Error::DimensionMismatch {
                expected: 3,
                found: self.dim,
            });
        }
        let m = &self.matrix;
        let leak: f64 = (0..3)
            .map(|p| {
                let (a, b) = (3 + p, 6 + p);
                0.5 * (m[(a, a)] + m[(b, b)] - m[(a, b)] - m[(b, a)]).re
            })
            .sum();
        Ok(leak.max(0.0))
    }

    /// Whether ρ is supported on form-(a) states (rows 2 and 3 of every
    /// coefficient matrix in its support equal), up to `tol` leaked weight.
    pub fn form_a_check(&self, tol: f64) -> Result<bool> {
        Ok(self.form_a_leak()? <= tol)
    }
}

/// Result of the partial transpose test.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PptReport {
    pub is_ppt: bool,
    pub min_eigenvalue: f64,
}

/// `p|Φ⁺⟩⟨Φ⁺| + (1−p)·I/4` on two qubits.
pub fn werner(p: f64) -> DensityMatrix {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let phi = CVector::from_vec(vec![c64(h, 0.0), c64(0.0, 0.0), c64(0.0, 0.0), c64(h, 0.0)]);
    let proj = &phi * phi.adjoint();
    let m = proj.scale(p) + CMatrix::identity(4, 4).scale((1.0 - p) / 4.0);
    DensityMatrix::from_matrix_unchecked(2, m)
}

/// One member `(p_a, ψ_a)` of a pure-state decomposition.
#[derive(Debug, Clone, PartialEq)]
pub struct Member {
    pub weight: f64,
    pub state: PureState,
}

/// `ρ = Σ_a p_a |ψ_a⟩⟨ψ_a|`.
#[derive(Debug, Clone, PartialEq)]
pub struct Decomposition {
    members: Vec<Member>,
}

impl Decomposition {
    pub fn new(members: Vec<Member>) -> Result<Self> {
        if members.is_empty() {
            return Err(Error::BadShape("empty decomposition".into()));
        }
        let dim = members[0].state.dim();
        if let Some(m) = members.iter().find(|m| m.state.dim() != dim) {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: m.state.dim(),
            });
        }
        if let Some(m) = members.iter().find(|m| !(m.weight > 0.0 && m.weight <= 1.0)) {
            return Err(Error::OutOfRange(format!("weight {} outside (0, 1]", m.weight)));
        }
        let total: f64 = members.iter().map(|m| m.weight).sum();
        if (total - 1.0).abs() > 1e-10 {
            return Err(Error::OutOfRange(format!("weights sum to {total}")));
        }
        Ok(Self { members })
    }

    /// From unnormalized vectors `|w_k⟩` with `Σ|w_k⟩⟨w_k| = ρ`. Vectors with
    /// squared norm below `NEGLIGIBLE_WEIGHT` are dropped and the remaining
    /// weights rescaled to sum to one.
    pub fn from_subnormalized(vectors: &[CVector], dim: usize) -> Result<Self> {
        let mut members = Vec::with_capacity(vectors.len());
        for w in vectors {
            let weight = w.norm_squared();
            if weight < NEGLIGIBLE_WEIGHT {
                continue;
            }
            let state = PureState::from_vector(w, dim, f64::INFINITY, true)?;
            members.push(Member { weight, state });
        }
        let total: f64 = members.iter().map(|m| m.weight).sum();
        if members.is_empty() || total <= 0.0 {
            return Err(Error::ZeroState);
        }
        for m in &mut members {
            m.weight /= total;
        }
        Ok(Self { members })
    }

    pub fn members(&self) -> &[Member] {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.members[0].state.dim()
    }

    /// `Σ p_a |ψ_a⟩⟨ψ_a|`.
    pub fn density_matrix(&self) -> CMatrix {
        let n = self.dim();
        let mut rho = CMatrix::zeros(n * n, n * n);
        for m in &self.members {
            let v = m.state.to_vector();
            rho += (&v * v.adjoint()).scale(m.weight);
        }
        rho
    }

    pub fn reconstruction_error(&self, rho: &DensityMatrix) -> f64 {
        linalg::frobenius(&(self.density_matrix() - rho.matrix()))
    }
}

/// Canonical index quadruple `(i, p, j, q)`, one based, with `i < j`, `p < q`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SIndex {
    i: usize,
    p: usize,
    j: usize,
    q: usize,
}

impl SIndex {
    /// Canonical representative of an ordered quadruple together with the
    /// sign relating the two matrices: `S^{ipjq} = sign · S^{canonical}`.
    pub fn canonical(i: usize, p: usize, j: usize, q: usize, dim: usize) -> Result<(Self, f64)> {
        let bad = || Error::BadIndex { i, p, j, q, dim };
        if [i, p, j, q].iter().any(|&x| x == 0 || x > dim) || i == j || p == q {
            return Err(bad());
        }
        let (i, p, j, q) = if i < j { (i, p, j, q) } else { (j, q, i, p) };
        Ok(if p < q {
            (Self { i, p, j, q }, 1.0)
        } else {
            (Self { i, p: q, j, q: p }, -1.0)
        })
    }

    /// Already canonical quadruple.
    pub fn new(i: usize, p: usize, j: usize, q: usize, dim: usize) -> Result<Self> {
        match Self::canonical(i, p, j, q, dim)? {
            (idx, sign) if sign > 0.0 && (idx.i, idx.p, idx.j, idx.q) == (i, p, j, q) => Ok(idx),
            _ => Err(Error::BadIndex { i, p, j, q, dim }),
        }
    }

    /// All canonical quadruples for dimension `dim`, rows `(i, j)` outer.
    pub fn all(dim: usize) -> Vec<Self> {
        let mut out = Vec::new();
        for i in 1..=dim {
            for j in (i + 1)..=dim {
                for p in 1..=dim {
                    for q in (p + 1)..=dim {
                        out.push(Self { i, p, j, q });
                    }
                }
            }
        }
        out
    }

    /// The four ordered quadruples sharing this Λ-spectrum.
    pub fn equivalents(&self) -> [(usize, usize, usize, usize); 4] {
        let Self { i, p, j, q } = *self;
        [(i, p, j, q), (j, q, i, p), (i, q, j, p), (j, p, i, q)]
    }

    pub fn as_tuple(&self) -> (usize, usize, usize, usize) {
        (self.i, self.p, self.j, self.q)
    }

    /// Compact label such as `1122`.
    pub fn label(&self) -> String {
        if self.q < 10 && self.j < 10 {
            format!("{}{}{}{}", self.i, self.p, self.j, self.q)
        } else {
            format!("{},{},{},{}", self.i, self.p, self.j, self.q)
        }
    }
}

impl fmt::Display for SIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{},{},{})", self.i, self.p, self.j, self.q)
    }
}

/// Nonzero entries `(row, col, value)` of `S^{ipjq}` for an ordered quadruple.
fn s_entries(i: usize, p: usize, j: usize, q: usize, dim: usize) -> [(usize, usize, f64); 4] {
    let at = |row: usize, col: usize| (row - 1) * dim + (col - 1);
    [
        (at(i, p), at(j, q), 1.0),
        (at(j, q), at(i, p), 1.0),
        (at(i, q), at(j, p), -1.0),
        (at(j, p), at(i, q), -1.0),
    ]
}

/// `S^{ipjq}` for an arbitrary ordered quadruple with `i ≠ j`, `p ≠ q`.
pub fn s_matrix_ordered(i: usize, p: usize, j: usize, q: usize, dim: usize) -> Result<CMatrix> {
    SIndex::canonical(i, p, j, q, dim)?;
    let mut s = CMatrix::zeros(dim * dim, dim * dim);
    for (r, c, v) in s_entries(i, p, j, q, dim) {
        s[(r, c)] = c64(v, 0.0);
    }
    Ok(s)
}

pub fn s_matrix(idx: SIndex, dim: usize) -> CMatrix {
    let (i, p, j, q) = idx.as_tuple();
    s_matrix_ordered(i, p, j, q, dim).expect("canonical index is valid")
}

/// `S·x` without forming `S`.
fn s_apply(idx: SIndex, dim: usize, x: &CVector) -> CVector {
    let (i, p, j, q) = idx.as_tuple();
    let mut out = CVector::zeros(x.len());
    for (r, c, v) in s_entries(i, p, j, q, dim) {
        out[r] += x[c] * v;
    }
    out
}

/// `d_{ipjq}(ψ) = |⟨ψ|S ψ*⟩| = 2|a_ip a_jq − a_iq a_jp|`, evaluated both ways.
pub fn d_ipjq_pure(state: &PureState, idx: SIndex) -> Result<f64> {
    let (i, p, j, q) = idx.as_tuple();
    let minor_form = 2.0 * state.minor(i - 1, p - 1, j - 1, q - 1).norm();
    let psi = state.to_vector();
    let quadratic = psi.dotc(&s_apply(idx, state.dim(), &psi.conjugate())).norm();
    if (minor_form - quadratic).abs() > 1e-12 {
        return Err(Error::NumericalInconsistency(format!(
            "d_ipjq minor form {minor_form} vs quadratic form {quadratic}"
        )));
    }
    Ok(minor_form)
}

/// `(Λ₁, Λ₂, Λ₃, Λ₄)`, descending, plus the largest discarded singular value.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LambdaSpectrum {
    pub values: [f64; 4],
    pub fifth: f64,
}

impl LambdaSpectrum {
    /// `Λ₁ − Λ₂ − Λ₃ − Λ₄`.
    pub fn delta(&self) -> f64 {
        let [a, b, c, d] = self.values;
        a - b - c - d
    }
}

/// `√ρ` and `(√ρ)*`, reused across indices.
#[derive(Debug, Clone)]
pub struct LambdaContext {
    dim: usize,
    sqrt_rho: CMatrix,
    sqrt_rho_conj: CMatrix,
}

impl LambdaContext {
    pub fn new(rho: &DensityMatrix) -> Result<Self> {
        let sqrt_rho = linalg::sqrt_psd(rho.matrix())?;
        let sqrt_rho_conj = linalg::conj(&sqrt_rho);
        Ok(Self {
            dim: rho.dim(),
            sqrt_rho,
            sqrt_rho_conj,
        })
    }

    /// `X = √ρ · S · (√ρ)*`; its singular values are the eigenvalues of
    /// `√(√ρ S ρ* S √ρ)`.
    pub fn x_matrix(&self, idx: SIndex) -> CMatrix {
        let (i, p, j, q) = idx.as_tuple();
        let size = self.dim * self.dim;
        let mut x = CMatrix::zeros(size, size);
        for (r, c, v) in s_entries(i, p, j, q, self.dim) {
            let col = self.sqrt_rho.column(r);
            let row = self.sqrt_rho_conj.row(c);
            for a in 0..size {
                let left = col[a] * v;
                for b in 0..size {
                    x[(a, b)] += left * row[b];
                }
            }
        }
        x
    }

    /// All singular values of `X`, descending.
    pub fn singular_values(&self, idx: SIndex) -> Result<Vec<f64>> {
        linalg::singular_values(&self.x_matrix(idx))
    }

    pub fn spectrum(&self, idx: SIndex) -> Result<LambdaSpectrum> {
        let sv = self.singular_values(idx)?;
        let mut values = [0.0; 4];
        for (slot, v) in values.iter_mut().zip(&sv) {
            *slot = *v;
        }
        let fifth = sv.get(4).copied().unwrap_or(0.0);
        if fifth >= RANK_VIOLATION {
            return Err(Error::RankViolation { fifth });
        }
        Ok(LambdaSpectrum { values, fifth })
    }
}

pub fn lambda_spectrum(rho: &DensityMatrix, idx: SIndex) -> Result<LambdaSpectrum> {
    LambdaContext::new(rho)?.spectrum(idx)
}

/// Matrix of `⟨w_k|S w_l*⟩` over a list of (unnormalized) vectors.
pub fn s_overlaps(vectors: &[CVector], idx: SIndex, dim: usize) -> CMatrix {
    let images: Vec<CVector> = vectors
        .iter()
        .map(|w| s_apply(idx, dim, &w.conjugate()))
        .collect();
    CMatrix::from_fn(vectors.len(), vectors.len(), |k, l| vectors[k].dotc(&images[l]))
}

/// `τ_kl = ⟨v_k|S v_l*⟩` over the subnormalized eigenvectors of ρ.
pub fn tau_matrix(rho: &DensityMatrix, idx: SIndex) -> Result<CMatrix> {
    Ok(s_overlaps(&rho.subnormalized_eigenvectors()?, idx, rho.dim()))
}

/// A decomposition `{w_k}` in which `⟨w_k|S w_l*⟩ = Λ_k δ_kl` for one index.
#[derive(Debug, Clone)]
pub struct IndexDecomposition {
    pub index: SIndex,
    /// Unnormalized members, `Σ|w_k⟩⟨w_k| = ρ`.
    pub vectors: Vec<CVector>,
    /// Takagi values of τ, descending.
    pub lambdas: Vec<f64>,
}

impl IndexDecomposition {
    pub fn decomposition(&self) -> Result<Decomposition> {
        let dim = (self.vectors[0].len() as f64).sqrt().round() as usize;
        Decomposition::from_subnormalized(&self.vectors, dim)
    }
}

/// Rotate the eigenvectors of ρ by the Takagi unitary of τ:
/// `|w_k⟩ = Σ_l U*_kl |v_l⟩`.
pub fn optimal_index_decomposition(rho: &DensityMatrix, idx: SIndex) -> Result<IndexDecomposition> {
    let vs = rho.subnormalized_eigenvectors()?;
    let tau = s_overlaps(&vs, idx, rho.dim());
    let tk = linalg::takagi(&tau)?;
    let r = vs.len();
    let vectors = (0..r)
        .map(|k| {
            let mut w = CVector::zeros(vs[0].len());
            for (l, v) in vs.iter().enumerate() {
                w += v * tk.unitary[(k, l)].conj();
            }
            w
        })
        .collect();
    Ok(IndexDecomposition {
        index: idx,
        vectors,
        lambdas: tk.values,
    })
}

/// One index's contribution to the bound.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundTerm {
    pub index: SIndex,
    pub spectrum: LambdaSpectrum,
    /// `Λ₁ − Λ₂ − Λ₃ − Λ₄` before clamping.
    pub delta: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConcurrenceBound {
    pub value: f64,
    pub m: usize,
    pub n: usize,
    pub clamp: bool,
    /// Whether clamping changed at least one term.
    pub clamped_any: bool,
    pub terms: Vec<BoundTerm>,
    /// Largest fifth singular value seen.
    pub max_fifth: f64,
}

fn combine(terms: &[f64], clamp: bool) -> (f64, bool) {
    let mut acc = CompensatedSum::default();
    let mut clamped_any = false;
    for &delta in terms {
        let d = if clamp && delta < 0.0 {
            clamped_any = true;
            0.0
        } else {
            delta
        };
        acc.add(d * d);
    }
    (acc.value().max(0.0), clamped_any)
}

/// `(mn/4)·[Σ_{ipjq} (Λ₁−Λ₂−Λ₃−Λ₄)²]^{1/2}` over ordered quadruples,
/// evaluated as four times the canonical sum. With `clamp`, negative
/// differences count as zero.
pub fn concurrence_bound(rho: &DensityMatrix, m: usize, n: usize, clamp: bool) -> Result<ConcurrenceBound> {
    let ctx = LambdaContext::new(rho)?;
    let indices = SIndex::all(rho.dim());
    let spectra: Vec<Result<LambdaSpectrum>> = indices.par_iter().map(|&idx| ctx.spectrum(idx)).collect();
    let mut terms = Vec::with_capacity(indices.len());
    for (idx, spec) in indices.into_iter().zip(spectra) {
        let spectrum = spec?;
        terms.push(BoundTerm {
            index: idx,
            spectrum,
            delta: spectrum.delta(),
        });
    }
    let deltas: Vec<f64> = terms.iter().map(|t| t.delta).collect();
    let (sum_sq, clamped_any) = combine(&deltas, clamp);
    let value = (m * n) as f64 / 4.0 * (4.0 * sum_sq).sqrt();
    let max_fifth = terms.iter().map(|t| t.spectrum.fifth).fold(0.0, f64::max);
    Ok(ConcurrenceBound {
        value,
        m,
        n,
        clamp,
        clamped_any,
        terms,
        max_fifth,
    })
}

pub fn d_lower_bound(rho: &DensityMatrix, m: usize, n: usize, clamp: bool) -> Result<f64> {
    Ok(concurrence_bound(rho, m, n, clamp)?.value)
}

/// Entanglement-of-formation lower bound `E(D(ρ))` from the clamped bound.
///
/// `n = 2` uses the closed form `E(d)` with multiplicity `m`; `n = 3` uses the
/// arithmetic three-eigenvalue family, inverting `D` numerically.
pub fn eof_lower_bound(rho: &DensityMatrix, m: usize, n: usize) -> Result<f64> {
    if !(n == 2 || n == 3) {
        return Err(Error::UnsupportedFamily { n });
    }
    let d = d_lower_bound(rho, m, n, true)?;
    eof_from_bound(d, m, n)
}

/// Map a generalized-concurrence value to entanglement for the `(m, n)` family.
pub fn eof_from_bound(d: f64, m: usize, n: usize) -> Result<f64> {
    if d <= 0.0 {
        return Ok(0.0);
    }
    match n {
        2 => {
            if d > 1.0 + 1e-9 {
                return Err(Error::OutOfRange(format!("bound {d} exceeds 1")));
            }
            eof_of_d(d.min(1.0), m)
        }
        3 => {
            let fam = EigFamily::ArithmeticThree { m };
            let t = fam.parameter_for_concurrence(d)?;
            fam.eof_at(t)
        }
        _ => Err(Error::UnsupportedFamily { n }),
    }
}

/// The three-term expression `√2·[Σ_{1122,1123,1223} (Λ₁−Λ₂−Λ₃−Λ₄)²]^{1/2}`
/// for N = 3 densities supported on form-(a) states.
pub fn example_3x3_bound(rho: &DensityMatrix, clamp: bool) -> Result<f64> {
    let leak = rho.form_a_leak()?;
    if leak > DENSITY_TOL {
        return Err(Error::NotFormA { leak });
    }
    let ctx = LambdaContext::new(rho)?;
    let mut deltas = Vec::with_capacity(3);
    for (p, q) in [(1, 2), (1, 3), (2, 3)] {
        deltas.push(ctx.spectrum(SIndex::new(1, p, 2, q, 3)?)?.delta());
    }
    let (sum_sq, _) = combine(&deltas, clamp);
    Ok(std::f64::consts::SQRT_2 * sum_sq.sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sampling::{self, rng_from_seed};

    fn bell_state() -> PureState {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let a = CMatrix::from_row_slice(2, 2, &[c64(h, 0.0), c64(0.0, 0.0), c64(0.0, 0.0), c64(h, 0.0)]);
        PureState::from_coefficients(a, 1e-12, false).unwrap()
    }

    fn max_abs(m: &CMatrix) -> f64 {
        m.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    #[test]
    fn validate_density_examples() {
        assert!(DensityMatrix::new(2, CMatrix::identity(4, 4).scale(0.25), 1e-10).is_ok());
        let neg = CMatrix::from_diagonal(&CVector::from_vec(vec![
            c64(0.51, 0.0),
            c64(0.5, 0.0),
            c64(0.0, 0.0),
            c64(-0.01, 0.0),
        ]));
        assert!(matches!(DensityMatrix::new(2, neg, 1e-10), Err(Error::NotPsd { .. })));
        let short = CMatrix::identity(4, 4).scale(0.225);
        assert!(matches!(DensityMatrix::new(2, short, 1e-10), Err(Error::BadTrace { .. })));
        let mut skew = CMatrix::identity(4, 4).scale(0.25);
        skew[(0, 1)] = c64(0.1, 0.0);
        assert!(matches!(DensityMatrix::new(2, skew, 1e-10), Err(Error::NotHermitian { .. })));
        assert!(matches!(
            DensityMatrix::new(2, CMatrix::identity(9, 9).scale(1.0 / 9.0), 1e-10),
            Err(Error::BadShape(_))
        ));
    }

    #[test]
    fn subnormalized_eigenvectors_examples() {
        let rho = DensityMatrix::from_pure(&bell_state());
        let vs = rho.subnormalized_eigenvectors().unwrap();
        assert_eq!(vs.len(), 1);
        assert!((vs[0].dotc(&bell_state().to_vector()).norm() - 1.0).abs() < 1e-12);

        let mixed = werner(0.0);
        let vs = mixed.subnormalized_eigenvectors().unwrap();
        assert_eq!(vs.len(), 4);
        for v in &vs {
            assert!((v.norm_squared() - 0.25).abs() < 1e-14);
        }

        let mut rng = rng_from_seed(20);
        let rho = sampling::random_mixture(3, 2, &mut rng).unwrap();
        let vs = rho.subnormalized_eigenvectors().unwrap();
        assert_eq!(vs.len(), 2);
        assert!(vs[0].dotc(&vs[1]).norm() < 1e-12);
        let back = Decomposition::from_subnormalized(&vs, 3).unwrap();
        assert!(back.reconstruction_error(&rho) < 1e-9);
    }

    #[test]
    fn s_matrix_for_qubits() {
        let s = s_matrix(SIndex::new(1, 1, 2, 2, 2).unwrap(), 2);
        let expect = [
            [0.0, 0.0, 0.0, 1.0],
            [0.0, 0.0, -1.0, 0.0],
            [0.0, -1.0, 0.0, 0.0],
            [1.0, 0.0, 0.0, 0.0],
        ];
        for r in 0..4 {
            for c in 0..4 {
                assert_eq!(s[(r, c)], c64(expect[r][c], 0.0));
            }
        }
    }

    #[test]
    fn s_matrix_structure() {
        for dim in 2..=4 {
            for idx in SIndex::all(dim) {
                let s = s_matrix(idx, dim);
                assert_eq!(s.iter().filter(|z| z.norm() > 0.0).count(), 4);
                assert_eq!(s, s.transpose());
                let (i, p, j, q) = idx.as_tuple();
                let swapped = s_matrix_ordered(i, q, j, p, dim).unwrap();
                assert_eq!(swapped, -&s);
                let (canon, sign) = SIndex::canonical(i, q, j, p, dim).unwrap();
                assert_eq!(canon, idx);
                assert_eq!(sign, -1.0);
                let (canon, sign) = SIndex::canonical(j, q, i, p, dim).unwrap();
                assert_eq!((canon, sign), (idx, 1.0));
            }
        }
        assert_eq!(SIndex::all(3).len(), 9);
        assert!(SIndex::canonical(1, 1, 1, 2, 2).is_err());
        assert!(SIndex::canonical(1, 1, 3, 2, 2).is_err());
        assert!(SIndex::new(2, 1, 1, 2, 2).is_err());
    }

    #[test]
    fn d_ipjq_examples() {
        let idx = SIndex::new(1, 1, 2, 2, 2).unwrap();
        assert!((d_ipjq_pure(&bell_state(), idx).unwrap() - 1.0).abs() < 1e-15);
        let mut rng = rng_from_seed(21);
        let u = sampling::random_pure(3, &mut rng).coeffs().column(0).into_owned();
        let w = sampling::random_pure(3, &mut rng).coeffs().row(0).into_owned();
        let product = PureState::from_coefficients(&u * &w, 1e-3, true).unwrap();
        for idx in SIndex::all(3) {
            assert!(d_ipjq_pure(&product, idx).unwrap() < 1e-12);
        }
        for _ in 0..50 {
            let s = sampling::random_pure(4, &mut rng);
            for idx in SIndex::all(4) {
                d_ipjq_pure(&s, idx).unwrap();
            }
        }
    }

    #[test]
    fn lambda_spectrum_examples() {
        let mut rng = rng_from_seed(22);
        let psi = sampling::random_pure(3, &mut rng);
        let rho = DensityMatrix::from_pure(&psi);
        for idx in SIndex::all(3) {
            let spec = lambda_spectrum(&rho, idx).unwrap();
            assert!((spec.values[0] - d_ipjq_pure(&psi, idx).unwrap()).abs() < 1e-10);
            assert!(spec.values[1] < 1e-10);
        }
        let idx = SIndex::new(1, 1, 2, 2, 2).unwrap();
        let spec = lambda_spectrum(&werner(0.0), idx).unwrap();
        for v in spec.values {
            assert!((v - 0.25).abs() < 1e-12);
        }
        let spec = lambda_spectrum(&werner(0.5), idx).unwrap();
        let expect = [0.625, 0.125, 0.125, 0.125];
        for (v, e) in spec.values.iter().zip(expect) {
            assert!((v - e).abs() < 1e-12, "{:?}", spec.values);
        }
    }

    #[test]
    fn lambda_spectra_of_equivalent_quadruples_agree() {
        let mut rng = rng_from_seed(23);
        let rho = sampling::random_mixture(3, 4, &mut rng).unwrap();
        let ctx = LambdaContext::new(&rho).unwrap();
        for idx in SIndex::all(3) {
            let reference = ctx.singular_values(idx).unwrap();
            for (i, p, j, q) in idx.equivalents() {
                let s = s_matrix_ordered(i, p, j, q, 3).unwrap();
                let x = &ctx.sqrt_rho * s * &ctx.sqrt_rho_conj;
                let sv = linalg::singular_values(&x).unwrap();
                for (a, b) in sv.iter().zip(&reference).take(4) {
                    assert!((a - b).abs() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn tau_matrix_examples() {
        let mut rng = rng_from_seed(24);
        let psi = sampling::random_pure(2, &mut rng);
        let idx = SIndex::new(1, 1, 2, 2, 2).unwrap();
        let tau = tau_matrix(&DensityMatrix::from_pure(&psi), idx).unwrap();
        assert_eq!(tau.shape(), (1, 1));
        assert!((tau[(0, 0)].norm() - d_ipjq_pure(&psi, idx).unwrap()).abs() < 1e-12);

        let tau = tau_matrix(&werner(0.0), idx).unwrap();
        assert_eq!(tau.shape(), (4, 4));
        assert!(linalg::symmetric_residual(&tau) < 1e-14);
        let sv = linalg::singular_values(&tau).unwrap();
        for v in sv {
            assert!((v - 0.25).abs() < 1e-12);
        }

        let rho = sampling::random_mixture(3, 3, &mut rng).unwrap();
        for idx in SIndex::all(3) {
            let tau = tau_matrix(&rho, idx).unwrap();
            assert!(linalg::symmetric_residual(&tau) < 1e-12);
            let tk = linalg::takagi(&tau).unwrap();
            let spec = lambda_spectrum(&rho, idx).unwrap();
            for (a, b) in tk.values.iter().zip(spec.values) {
                assert!((a - b).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn optimal_index_decomposition_examples() {
        let mut rng = rng_from_seed(25);
        let psi = sampling::random_pure(2, &mut rng);
        let idx = SIndex::new(1, 1, 2, 2, 2).unwrap();
        let rho = DensityMatrix::from_pure(&psi);
        let od = optimal_index_decomposition(&rho, idx).unwrap();
        assert_eq!(od.vectors.len(), 1);
        let dec = od.decomposition().unwrap();
        assert_eq!(dec.len(), 1);
        assert!(dec.reconstruction_error(&rho) < 1e-12);

        let od = optimal_index_decomposition(&werner(0.0), idx).unwrap();
        let g = s_overlaps(&od.vectors, idx, 2);
        for k in 0..4 {
            for l in 0..4 {
                let expect = if k == l { c64(0.25, 0.0) } else { c64(0.0, 0.0) };
                assert!((g[(k, l)] - expect).norm() < 1e-8);
            }
        }

        let rho = sampling::random_mixture(3, 2, &mut rng).unwrap();
        for idx in SIndex::all(3) {
            let od = optimal_index_decomposition(&rho, idx).unwrap();
            let g = s_overlaps(&od.vectors, idx, 3);
            let target = CMatrix::from_diagonal(&CVector::from_iterator(
                od.lambdas.len(),
                od.lambdas.iter().map(|&l| c64(l, 0.0)),
            ));
            assert!(max_abs(&(g - target)) < 1e-8);
            assert!(od.decomposition().unwrap().reconstruction_error(&rho) < 1e-9);
        }
    }

    #[test]
    fn werner_bounds() {
        let b = d_lower_bound(&werner(0.5), 1, 2, true).unwrap();
        assert!((b - 0.25).abs() < 1e-12);
        assert_eq!(d_lower_bound(&werner(0.25), 1, 2, true).unwrap(), 0.0);
        let raw = d_lower_bound(&werner(0.25), 1, 2, false).unwrap();
        assert!((raw - 0.125).abs() < 1e-12);
        assert!((eof_lower_bound(&werner(1.0), 1, 2).unwrap() - 1.0).abs() < 1e-9);
        assert_eq!(eof_lower_bound(&werner(0.25), 1, 2).unwrap(), 0.0);
        assert!(matches!(eof_lower_bound(&werner(0.5), 1, 4), Err(Error::UnsupportedFamily { n: 4 })));
    }

    #[test]
    fn pure_form_a_bound_matches_d() {
        let c = std::f64::consts::FRAC_1_SQRT_2;
        let a = CMatrix::from_row_slice(3, 3, &[
            c64(c, 0.0), c64(0.0, 0.0), c64(0.0, 0.0),
            c64(0.0, 0.0), c64(0.5, 0.0), c64(0.0, 0.0),
            c64(0.0, 0.0), c64(0.5, 0.0), c64(0.0, 0.0),
        ]);
        let psi = PureState::from_coefficients(a, 1e-12, false).unwrap();
        let rho = DensityMatrix::from_pure(&psi);
        assert!((d_lower_bound(&rho, 1, 2, true).unwrap() - 1.0).abs() < 1e-9);
        assert!((example_3x3_bound(&rho, true).unwrap() - 1.0).abs() < 1e-9);
    }

    #[test]
    fn example_bound_on_product_and_mixtures() {
        let a = CMatrix::from_fn(3, 3, |i, j| if i == 0 && j == 0 { c64(1.0, 0.0) } else { c64(0.0, 0.0) });
        let rho = DensityMatrix::from_pure(&PureState::from_coefficients(a, 1e-12, false).unwrap());
        assert!(example_3x3_bound(&rho, true).unwrap() < 1e-12);

        let mut rng = rng_from_seed(26);
        for rank in 1..=4 {
            let rho = sampling::random_form_a_mixture(rank, &mut rng).unwrap();
            let a = example_3x3_bound(&rho, true).unwrap();
            let b = d_lower_bound(&rho, 1, 2, true).unwrap();
            assert!((a - b).abs() < 1e-10);
        }
        let generic = sampling::random_mixture(3, 3, &mut rng).unwrap();
        assert!(matches!(example_3x3_bound(&generic, true), Err(Error::NotFormA { .. })));
        assert!(matches!(example_3x3_bound(&werner(0.5), true), Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn ppt_examples() {
        let r = werner(0.0).ppt_check().unwrap();
        assert!(r.is_ppt && (r.min_eigenvalue - 0.25).abs() < 1e-12);
        let r = DensityMatrix::from_pure(&bell_state()).ppt_check().unwrap();
        assert!(!r.is_ppt && (r.min_eigenvalue + 0.5).abs() < 1e-12);
        let mut rng = rng_from_seed(27);
        let r = DensityMatrix::from_pure(&sampling::random_form_a_state(&mut rng))
            .ppt_check()
            .unwrap();
        assert!(!r.is_ppt && r.min_eigenvalue < 0.0);
    }

    #[test]
    fn separable_mixtures_are_ppt() {
        let mut rng = rng_from_seed(28);
        for trial in 0..100 {
            let dim = 2 + trial % 3;
            let k = 1 + trial % 5;
            let weights = sampling::dirichlet_weights(k, &mut rng);
            let mut rho = CMatrix::zeros(dim * dim, dim * dim);
            for w in weights {
                let u = sampling::haar_unitary(dim, &mut rng);
                let v = sampling::haar_unitary(dim, &mut rng);
                let prod = linalg::kron(&u.columns(0, 1).into_owned(), &v.columns(0, 1).into_owned());
                rho += (&prod * prod.adjoint()).scale(w);
            }
            let rho = DensityMatrix::new(dim, rho, 1e-10).unwrap();
            assert!(rho.ppt_check().unwrap().is_ppt);
        }
    }

    #[test]
    fn form_a_check_examples() {
        let mut rng = rng_from_seed(29);
        for rank in 1..=6 {
            let rho = sampling::random_form_a_mixture(rank, &mut rng).unwrap();
            assert!(rho.form_a_check(1e-10).unwrap());
        }
        let generic = sampling::random_mixture(3, 2, &mut rng).unwrap();
        assert!(!generic.form_a_check(1e-10).unwrap());
        assert!(werner(0.3).form_a_check(1e-10).is_err());
    }

    #[test]
    fn decomposition_validation() {
        let psi = bell_state();
        assert!(Decomposition::new(vec![Member { weight: 0.5, state: psi.clone() }]).is_err());
        let d = Decomposition::new(vec![
            Member { weight: 0.5, state: psi.clone() },
            Member { weight: 0.5, state: psi.clone() },
        ])
        .unwrap();
        assert!(d.reconstruction_error(&DensityMatrix::from_pure(&psi)) < 1e-15);
    }

    #[test]
    fn qubit_bound_is_local_unitary_invariant() {
        let mut rng = rng_from_seed(31);
        for _ in 0..20 {
            let rho = sampling::random_mixture(2, 3, &mut rng).unwrap();
            let (u, v) = (sampling::haar_unitary(2, &mut rng), sampling::haar_unitary(2, &mut rng));
            let a = d_lower_bound(&rho, 1, 2, true).unwrap();
            let b = d_lower_bound(&rho.apply_local(&u, &v), 1, 2, true).unwrap();
            assert!((a - b).abs() < 1e-12, "{a} vs {b}");
        }
    }
}
