//! Reproducible random states.
//!
//! All randomness comes from ChaCha8 (`rand_chacha::ChaCha8Rng`) seeded with
//! `seed_from_u64`. Batch item `k` of a seed draws from stream `k` of that
//! seed, so items never depend on how many other items were generated.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Exp1, StandardNormal};

use crate::error::{Error, Result};
use crate::linalg::{c64, CMatrix, CVector};
use crate::mixed::DensityMatrix;
use crate::purestate::PureState;

/// Dimension of the support of a form-(a) mixture (rows 2 and 3 equal).
pub const FORM_A_SUPPORT_DIM: usize = 6;

pub fn rng_from_seed(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Generator for item `stream` of a seeded batch.
pub fn rng_for_item(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Matrix with i.i.d. standard complex Gaussian entries.
pub fn ginibre<R: Rng + ?Sized>(rows: usize, cols: usize, rng: &mut R) -> CMatrix {
    CMatrix::from_fn(rows, cols, |_, _| {
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = rng.sample(StandardNormal);
        c64(re, im) * std::f64::consts::FRAC_1_SQRT_2
    })
}

/// Haar-distributed unitary: QR of a Ginibre matrix with the phases of
/// `diag(R)` moved into `Q`.
pub fn haar_unitary<R: Rng + ?Sized>(n: usize, rng: &mut R) -> CMatrix {
    let qr = ginibre(n, n, rng).qr();
    let r = qr.r();
    let mut q = qr.q();
    for k in 0..n {
        let d = r[(k, k)];
        let phase = if d.norm() > 0.0 { d / d.norm() } else { c64(1.0, 0.0) };
        for row in 0..n {
            q[(row, k)] *= phase;
        }
    }
    q
}

pub fn random_pure<R: Rng + ?Sized>(n: usize, rng: &mut R) -> PureState {
    PureState::from_coefficients(ginibre(n, n, rng), f64::INFINITY, true)
        .expect("Gaussian matrix is nonzero")
}

/// Random N=3 state whose coefficient matrix has identical second and third rows.
pub fn random_form_a_state<R: Rng + ?Sized>(rng: &mut R) -> PureState {
    let rows = ginibre(2, 3, rng);
    let a = CMatrix::from_fn(3, 3, |i, j| rows[(i.min(1), j)]);
    PureState::from_coefficients(a, f64::INFINITY, true).expect("Gaussian matrix is nonzero")
}

/// Symmetric Dirichlet(1) weights (uniform on the simplex).
pub fn dirichlet_weights<R: Rng + ?Sized>(k: usize, rng: &mut R) -> Vec<f64> {
    let draws: Vec<f64> = (0..k).map(|_| rng.sample::<f64, _>(Exp1)).collect();
    let total: f64 = draws.iter().sum();
    draws.into_iter().map(|x| x / total).collect()
}

fn mixture(states: &[PureState], weights: &[f64]) -> DensityMatrix {
    let n = states[0].dim();
    let mut rho = CMatrix::zeros(n * n, n * n);
    for (s, &w) in states.iter().zip(weights) {
        let v: CVector = s.to_vector();
        rho += (&v * v.adjoint()).scale(w);
    }
    DensityMatrix::from_matrix_unchecked(n, rho)
}

/// Convex mixture of `rank` form-(a) states with Dirichlet(1) weights.
pub fn random_form_a_mixture<R: Rng + ?Sized>(rank: usize, rng: &mut R) -> Result<DensityMatrix> {
    if rank == 0 || rank > FORM_A_SUPPORT_DIM {
        return Err(Error::BadRank {
            rank,
            reason: "form-(a) mixtures have rank between 1 and 6",
        });
    }
    let states: Vec<PureState> = (0..rank).map(|_| random_form_a_state(rng)).collect();
    let weights = dirichlet_weights(rank, rng);
    Ok(mixture(&states, &weights))
}

/// Convex mixture of `rank` Haar-random pure states on `C^n ⊗ C^n`.
pub fn random_mixture<R: Rng + ?Sized>(n: usize, rank: usize, rng: &mut R) -> Result<DensityMatrix> {
    if rank == 0 || rank > n * n {
        return Err(Error::BadRank {
            rank,
            reason: "rank must be between 1 and N²",
        });
    }
    let states: Vec<PureState> = (0..rank).map(|_| random_pure(n, rng)).collect();
    let weights = dirichlet_weights(rank, rng);
    Ok(mixture(&states, &weights))
}

/// Batch description: `count` items of dimension `dim` and rank `rank`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SampleSpec {
    pub seed: u64,
    pub dim: usize,
    pub rank: usize,
    pub count: usize,
}

impl SampleSpec {
    pub fn pure_states(&self) -> Vec<PureState> {
        (0..self.count)
            .map(|k| random_pure(self.dim, &mut rng_for_item(self.seed, k as u64)))
            .collect()
    }

    pub fn form_a_states(&self) -> Vec<PureState> {
        (0..self.count)
            .map(|k| random_form_a_state(&mut rng_for_item(self.seed, k as u64)))
            .collect()
    }

    pub fn form_a_mixtures(&self) -> Result<Vec<DensityMatrix>> {
        (0..self.count)
            .map(|k| random_form_a_mixture(self.rank, &mut rng_for_item(self.seed, k as u64)))
            .collect()
    }

    pub fn mixtures(&self) -> Result<Vec<DensityMatrix>> {
        (0..self.count)
            .map(|k| random_mixture(self.dim, self.rank, &mut rng_for_item(self.seed, k as u64)))
            .collect()
    }
}
