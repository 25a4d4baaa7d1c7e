//! Numerical convex roof: minimize the average of a pure-state quantity over
//! decompositions of a density matrix.
//!
//! Every decomposition with `t` members is `|z_k⟩ = Σ_l V*_kl |v_l⟩` for a
//! `t×r` isometry `V`, where `|v_l⟩` are the subnormalized eigenvectors of ρ.
//! The search rotates pairs of members (equivalently pairs of rows of `V`)
//! by complex Givens rotations and keeps a rotation only if it lowers the
//! objective. Each pair is tried along the phases `0`, `π/2` and one phase
//! drawn from the restart's seeded generator.

use std::f64::consts::{FRAC_PI_2, PI};

use rand::Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::linalg::{self, c64, CMatrix, CVector};
use crate::mixed::{self, Decomposition, DensityMatrix, NEGLIGIBLE_WEIGHT};
use crate::purestate::PureState;
use crate::sampling;

/// Profile tolerance for members under `AverageD`.
pub const ROOF_PROFILE_TOL: f64 = 1e-6;

/// Isometry residual accepted by `transform_decomposition`.
pub const ISOMETRY_TOL: f64 = 1e-10;

const GRID: usize = 12;
const GOLDEN_STEPS: usize = 26;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Objective {
    /// Average entanglement entropy (bits).
    AverageE,
    /// Average generalized concurrence with profile `(m, n)`.
    AverageD { m: usize, n: usize },
}

impl Objective {
    pub fn value(&self, state: &PureState) -> Result<f64> {
        match *self {
            Objective::AverageE => state.eof(),
            Objective::AverageD { m, n } => state.generalized_concurrence_tol(m, n, ROOF_PROFILE_TOL),
        }
    }

    pub fn label(&self) -> String {
        match self {
            Objective::AverageE => "E".into(),
            Objective::AverageD { m, n } => format!("D(m={m},n={n})"),
        }
    }
}

/// Rows of `V` mix the vectors: `z_k = Σ_l V*_kl v_l`.
fn mix(vectors: &[CVector], v: &CMatrix) -> Vec<CVector> {
    (0..v.nrows())
        .map(|k| {
            let mut z = CVector::zeros(vectors[0].len());
            for (l, vl) in vectors.iter().enumerate() {
                z += vl * v[(k, l)].conj();
            }
            z
        })
        .collect()
}

/// Decomposition `{z_k}` obtained from ρ's subnormalized eigenvectors and a
/// columns-orthonormal `V` (`t×r`, `t ≥ r`).
pub fn transform_decomposition(vectors: &[CVector], v: &CMatrix) -> Result<Decomposition> {
    if vectors.is_empty() {
        return Err(Error::ZeroState);
    }
    if v.ncols() != vectors.len() || v.nrows() < v.ncols() {
        return Err(Error::DimensionMismatch {
            expected: vectors.len(),
            found: v.ncols(),
        });
    }
    let residual = linalg::frobenius(&(v.adjoint() * v - CMatrix::identity(v.ncols(), v.ncols())));
    if residual > ISOMETRY_TOL {
        return Err(Error::NotIsometry { residual });
    }
    let dim = (vectors[0].len() as f64).sqrt().round() as usize;
    Decomposition::from_subnormalized(&mix(vectors, v), dim)
}

/// `Σ_a p_a f(ψ_a)`.
pub fn average_objective(decomposition: &Decomposition, objective: Objective) -> Result<f64> {
    let mut acc = linalg::CompensatedSum::default();
    for m in decomposition.members() {
        acc.add(m.weight * objective.value(&m.state)?);
    }
    Ok(acc.value())
}

#[derive(Debug, Clone)]
pub struct RoofProblem {
    pub target: DensityMatrix,
    pub objective: Objective,
    /// Largest cardinality tried; `None` means rank + 2.
    pub t_max: Option<usize>,
    pub restarts: usize,
    pub seed: u64,
    /// A restart stops once a sweep lowers the objective by less than this.
    pub tol: f64,
    pub max_sweeps: usize,
}

impl RoofProblem {
    pub fn new(target: DensityMatrix, objective: Objective) -> Self {
        Self {
            target,
            objective,
            t_max: None,
            restarts: 4,
            seed: 0,
            tol: 1e-8,
            max_sweeps: 200,
        }
    }
}

/// Objective values after each sweep of one restart.
#[derive(Debug, Clone, PartialEq)]
pub struct RestartTrace {
    pub cardinality: usize,
    pub restart: usize,
    pub values: Vec<f64>,
    pub converged: bool,
}

#[derive(Debug, Clone)]
pub struct RoofResult {
    pub value: f64,
    pub decomposition: Decomposition,
    /// Sweeps used by the winning restart.
    pub iterations: usize,
    pub converged: bool,
    pub cardinality: usize,
    pub restart: usize,
    pub traces: Vec<RestartTrace>,
}

fn contribution(objective: Objective, z: &CVector, dim: usize) -> f64 {
    let w = z.norm_squared();
    if w < NEGLIGIBLE_WEIGHT {
        return 0.0;
    }
    let s = 1.0 / w.sqrt();
    let a = CMatrix::from_fn(dim, dim, |i, p| z[dim * i + p] * s);
    match objective.value(&PureState::from_normalized_unchecked(a)) {
        Ok(f) => w * f,
        Err(_) => f64::INFINITY,
    }
}

/// `(z_a, z_b) → (c·z_a − e^{−iφ}s·z_b, e^{iφ}s·z_a + c·z_b)`, the action of
/// the row rotation `[[c, −e^{iφ}s], [e^{−iφ}s, c]]` on `V`.
fn rotate(za: &CVector, zb: &CVector, theta: f64, phi: f64) -> (CVector, CVector) {
    let (s, c) = theta.sin_cos();
    let e = c64(phi.cos(), phi.sin());
    (za * c64(c, 0.0) - zb * (e.conj() * s), za * (e * s) + zb * c64(c, 0.0))
}

struct Search {
    objective: Objective,
    dim: usize,
    z: Vec<CVector>,
    g: Vec<f64>,
}

impl Search {
    fn new(objective: Objective, dim: usize, z: Vec<CVector>) -> Self {
        let g = z.iter().map(|zk| contribution(objective, zk, dim)).collect();
        Self { objective, dim, z, g }
    }

    fn total(&self) -> f64 {
        self.g.iter().sum()
    }

    fn pair_value(&self, a: usize, b: usize, theta: f64, phi: f64) -> f64 {
        let (za, zb) = rotate(&self.z[a], &self.z[b], theta, phi);
        contribution(self.objective, &za, self.dim) + contribution(self.objective, &zb, self.dim)
    }

    /// Grid scan on (−π/2, π/2], then golden section around the best point.
    fn line_search(&self, a: usize, b: usize, phi: f64) -> Option<(f64, f64)> {
        let current = self.g[a] + self.g[b];
        let f = |theta: f64| self.pair_value(a, b, theta, phi);
        let step = PI / GRID as f64;
        let mut best = (0.0, current);
        for j in 1..=GRID {
            let theta = -FRAC_PI_2 + j as f64 * step;
            if j == GRID / 2 {
                continue;
            }
            let val = f(theta);
            if val < best.1 {
                best = (theta, val);
            }
        }
        let ratio = (5f64.sqrt() - 1.0) / 2.0;
        let (mut lo, mut hi) = (best.0 - step, best.0 + step);
        let mut x1 = hi - ratio * (hi - lo);
        let mut x2 = lo + ratio * (hi - lo);
        let (mut f1, mut f2) = (f(x1), f(x2));
        for _ in 0..GOLDEN_STEPS {
            if f1 < f2 {
                hi = x2;
                x2 = x1;
                f2 = f1;
                x1 = hi - ratio * (hi - lo);
                f1 = f(x1);
            } else {
                lo = x1;
                x1 = x2;
                f1 = f2;
                x2 = lo + ratio * (hi - lo);
                f2 = f(x2);
            }
        }
        for (x, v) in [(x1, f1), (x2, f2)] {
            if v < best.1 {
                best = (x, v);
            }
        }
        (best.1 < current).then_some(best)
    }

    fn sweep<R: Rng>(&mut self, rng: &mut R) {
        let t = self.z.len();
        for a in 0..t {
            for b in (a + 1)..t {
                // fixed real and imaginary directions plus one random phase;
                // the objective has kinks that fixed directions alone stall on
                let phases = [0.0, FRAC_PI_2, rng.random::<f64>() * PI];
                for phi in phases {
                    if let Some((theta, _)) = self.line_search(a, b, phi) {
                        let (za, zb) = rotate(&self.z[a], &self.z[b], theta, phi);
                        let (ga, gb) = (
                            contribution(self.objective, &za, self.dim),
                            contribution(self.objective, &zb, self.dim),
                        );
                        let before = self.total();
                        let (old_a, old_b) = (self.g[a], self.g[b]);
                        self.g[a] = ga;
                        self.g[b] = gb;
                        // compare totals so the recorded trace can never rise
                        if self.total() < before {
                            self.z[a] = za;
                            self.z[b] = zb;
                        } else {
                            self.g[a] = old_a;
                            self.g[b] = old_b;
                        }
                    }
                }
            }
        }
    }
}

struct Outcome {
    z: Vec<CVector>,
    trace: RestartTrace,
}

fn run_restart(problem: &RoofProblem, vectors: &[CVector], t: usize, restart: usize, stream: u64) -> Outcome {
    let r = vectors.len();
    let mut rng = sampling::rng_for_item(problem.seed, stream);
    let v = if restart == 0 {
        CMatrix::identity(t, r)
    } else {
        sampling::haar_unitary(t, &mut rng).columns(0, r).into_owned()
    };
    let mut search = Search::new(problem.objective, problem.target.dim(), mix(vectors, &v));
    let mut values = vec![search.total()];
    let mut converged = false;
    if t == 1 {
        converged = true;
    } else {
        for _ in 0..problem.max_sweeps {
            search.sweep(&mut rng);
            let now = search.total();
            let prev = *values.last().expect("non-empty");
            values.push(now);
            if now.is_finite() && prev - now < problem.tol {
                converged = true;
                break;
            }
        }
    }
    Outcome {
        z: search.z,
        trace: RestartTrace {
            cardinality: t,
            restart,
            values,
            converged,
        },
    }
}

/// Multi-start search over decompositions with `rank..=t_max` members.
///
/// The result does not depend on the number of worker threads: restarts are
/// seeded by their position and the best is chosen in that order.
pub fn minimize_roof(problem: &RoofProblem) -> Result<RoofResult> {
    let vectors = problem.target.subnormalized_eigenvectors()?;
    let rank = vectors.len();
    if rank == 0 {
        return Err(Error::ZeroState);
    }
    if problem.restarts == 0 {
        return Err(Error::BadRank {
            rank: 0,
            reason: "at least one restart is required",
        });
    }
    let t_max = problem.t_max.unwrap_or(rank + 2);
    if t_max < rank {
        return Err(Error::BadRank {
            rank: t_max,
            reason: "cardinality cap is below the rank of the state",
        });
    }
    let tasks: Vec<(usize, usize)> = (rank..=t_max)
        .flat_map(|t| (0..problem.restarts).map(move |k| (t, k)))
        .collect();
    let outcomes: Vec<Outcome> = tasks
        .par_iter()
        .enumerate()
        .map(|(stream, &(t, k))| run_restart(problem, &vectors, t, k, stream as u64))
        .collect();

    let mut best: Option<usize> = None;
    for (i, o) in outcomes.iter().enumerate() {
        let v = *o.trace.values.last().expect("non-empty");
        if v.is_finite() && best.is_none_or(|b| v < *outcomes[b].trace.values.last().unwrap()) {
            best = Some(i);
        }
    }
    let Some(b) = best else {
        let (m, n) = match problem.objective {
            Objective::AverageD { m, n } => (m, n),
            Objective::AverageE => (0, 0),
        };
        return Err(Error::ProfileMismatch {
            m,
            n,
            diagnostic: "no decomposition with every member in the (m, n) class was found".into(),
        });
    };
    let decomposition = Decomposition::from_subnormalized(&outcomes[b].z, problem.target.dim())?;
    let value = average_objective(&decomposition, problem.objective)?;
    let winner = &outcomes[b].trace;
    Ok(RoofResult {
        value,
        iterations: winner.values.len() - 1,
        converged: winner.converged,
        cardinality: winner.cardinality,
        restart: winner.restart,
        decomposition,
        traces: outcomes.into_iter().map(|o| o.trace).collect(),
    })
}

/// Comparison of the concurrence bound with the numerical roof minimum.
#[derive(Debug, Clone, PartialEq)]
pub struct Certificate {
    pub bound: f64,
    pub roof_min: f64,
    /// `roof_min − bound`.
    pub gap: f64,
    /// `gap < −1e-6`.
    pub violated: bool,
    pub converged: bool,
}

/// Bound `D(ρ)` against `minimize_roof(AverageD)`, with the problem's knobs
/// taken from `settings` (its target and objective are replaced).
pub fn certify_bound(rho: &DensityMatrix, m: usize, n: usize, settings: &RoofProblem) -> Result<Certificate> {
    let bound = mixed::d_lower_bound(rho, m, n, true)?;
    let problem = RoofProblem {
        target: rho.clone(),
        objective: Objective::AverageD { m, n },
        ..settings.clone()
    };
    let roof = minimize_roof(&problem)?;
    let gap = roof.value - bound;
    Ok(Certificate {
        bound,
        roof_min: roof.value,
        gap,
        violated: gap < -1e-6,
        converged: roof.converged,
    })
}
