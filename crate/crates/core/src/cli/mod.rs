//! Command-line front end. `run` takes the argument list and returns the
//! text to print and the exit code, so it is testable without a process.
//!
//! Exit codes: 0 success, 1 input error, 2 numerical failure.

pub mod files;
pub mod report;

use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};

use crate::error::Error;
use crate::mixed::{self, DensityMatrix};
use crate::purestate::{self, PureState};
use crate::roofopt::{self, Objective, RoofProblem};
use crate::sampling;
use crate::spectra::{self, EigFamily, SpectrumCurve, Verdict};

use files::{load_state, LoadError, LoadedState, StateKind};
use report::Report;

pub const EXIT_OK: i32 = 0;
pub const EXIT_INPUT: i32 = 1;
pub const EXIT_NUMERICAL: i32 = 2;

/// Quantities checked by `invariance` must move less than this.
pub const INVARIANCE_TOL: f64 = 1e-8;

#[derive(Parser, Debug)]
#[command(name = "qconc", version, about = "Entanglement of formation and generalized concurrence")]
struct Cli {
    /// Print a JSON report instead of text.
    #[arg(long, global = true)]
    json: bool,
    /// Treat an unconverged optimization as a failure (exit 2).
    #[arg(long, global = true)]
    strict: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Which {
    C2,
    Cn,
    #[value(name = "D")]
    D,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum ObjectiveArg {
    #[value(name = "D")]
    D,
    #[value(name = "E")]
    E,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum FamilyArg {
    Two,
    Arith3,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Entanglement of a pure state (entropy of the reduced state, bits).
    EofPure { file: PathBuf },
    /// Pure-state concurrences.
    Concurrence {
        file: PathBuf,
        #[arg(long, value_enum)]
        which: Which,
        #[arg(long, default_value_t = 1)]
        m: usize,
        #[arg(long, default_value_t = 2)]
        n: usize,
    },
    /// Lower bound on the generalized concurrence of a density matrix.
    Bound {
        file: PathBuf,
        #[arg(long)]
        m: Option<usize>,
        #[arg(long)]
        n: Option<usize>,
        /// Use the raw per-index differences instead of their positive part.
        #[arg(long)]
        no_clamp: bool,
        /// Also report the entanglement-of-formation bound.
        #[arg(long)]
        eof: bool,
    },
    /// Numerical convex-roof minimum.
    Roof {
        file: PathBuf,
        #[arg(long, value_enum)]
        objective: ObjectiveArg,
        #[arg(long, default_value_t = 1)]
        m: usize,
        #[arg(long, default_value_t = 2)]
        n: usize,
        #[arg(long, default_value_t = 4)]
        restarts: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        t_max: Option<usize>,
    },
    /// Compare the bound with the numerical roof of the average concurrence.
    Certify {
        file: PathBuf,
        #[arg(long)]
        m: Option<usize>,
        #[arg(long)]
        n: Option<usize>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 4)]
        restarts: usize,
    },
    /// Validate a state and report PPT and form-(a) membership.
    Check { file: PathBuf },
    /// Entanglement-monotone and convexity conditions along a spectrum family.
    Lemma {
        #[arg(long, value_enum)]
        family: FamilyArg,
        #[arg(long, default_value_t = 1)]
        m: usize,
        #[arg(long, allow_hyphen_values = true)]
        u: Option<f64>,
        #[arg(long, allow_hyphen_values = true)]
        v: Option<f64>,
        /// Finite-difference step (default scales with the family).
        #[arg(long)]
        step: Option<f64>,
    },
    /// Check invariance of the measures under random local unitaries.
    Invariance {
        file: PathBuf,
        #[arg(long, default_value_t = 100)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        m: Option<usize>,
        #[arg(long)]
        n: Option<usize>,
    },
}

/// What a command run produced.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub stdout: String,
    pub stderr: String,
    pub code: i32,
}

enum Failure {
    Input(String),
    Numerical(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        if e.is_numerical() {
            Failure::Numerical(e.to_string())
        } else {
            Failure::Input(e.to_string())
        }
    }
}

impl From<LoadError> for Failure {
    fn from(e: LoadError) -> Self {
        Failure::Input(e.to_string())
    }
}

type CmdResult = std::result::Result<Report, Failure>;

/// Parse `args` (without the program name) and execute.
pub fn run<I, T>(args: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<String>,
{
    let argv: Vec<String> = args.into_iter().map(Into::into).collect();
    let cli = match Cli::try_parse_from(std::iter::once("qconc".to_string()).chain(argv.iter().cloned())) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            return match e.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => Outcome {
                    stdout: text,
                    stderr: String::new(),
                    code: EXIT_OK,
                },
                _ => Outcome {
                    stdout: String::new(),
                    stderr: text,
                    code: EXIT_INPUT,
                },
            };
        }
    };
    let pool = match thread_pool() {
        Ok(p) => p,
        Err(msg) => {
            return Outcome {
                stdout: String::new(),
                stderr: format!("error: {msg}\n"),
                code: EXIT_INPUT,
            }
        }
    };
    let result = match &pool {
        Some(pool) => pool.install(|| execute(&cli, &argv)),
        None => execute(&cli, &argv),
    };
    match result {
        Ok(report) => {
            let stdout = if cli.json { report.to_json() } else { report.to_text() };
            let failed = cli.strict && report.flags.get("converged") == Some(&false);
            Outcome {
                stdout,
                stderr: if failed { "error: optimization did not converge\n".into() } else { String::new() },
                code: if failed { EXIT_NUMERICAL } else { EXIT_OK },
            }
        }
        Err(Failure::Input(msg)) => Outcome {
            stdout: String::new(),
            stderr: format!("error: {msg}\n"),
            code: EXIT_INPUT,
        },
        Err(Failure::Numerical(msg)) => Outcome {
            stdout: String::new(),
            stderr: format!("numerical error: {msg}\n"),
            code: EXIT_NUMERICAL,
        },
    }
}

/// A pool capped by `QCONC_THREADS`, if set.
fn thread_pool() -> std::result::Result<Option<rayon::ThreadPool>, String> {
    let Ok(raw) = std::env::var("QCONC_THREADS") else {
        return Ok(None);
    };
    let threads: usize = raw
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| format!("QCONC_THREADS must be a positive integer, got {raw:?}"))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map(Some)
        .map_err(|e| e.to_string())
}

fn load(file: &Path, kind: Option<StateKind>, report: &mut Report) -> std::result::Result<LoadedState, Failure> {
    let loaded = load_state(file, kind)?;
    report.inputs_digest = Some(loaded.digest);
    Ok(loaded.state)
}

fn load_pure(file: &Path, report: &mut Report) -> std::result::Result<PureState, Failure> {
    match load(file, Some(StateKind::Pure), report)? {
        LoadedState::Pure(p) => Ok(p),
        LoadedState::Density(_) => unreachable!("kind checked on load"),
    }
}

fn load_density(file: &Path, report: &mut Report) -> std::result::Result<DensityMatrix, Failure> {
    Ok(load(file, None, report)?.into_density())
}

/// `(m, n)` from flags, defaulting to `(1, 2)` for two qubits.
fn profile(m: Option<usize>, n: Option<usize>, dim: usize) -> std::result::Result<(usize, usize), Failure> {
    match (m, n) {
        (Some(m), Some(n)) => Ok((m, n)),
        (None, None) if dim == 2 => Ok((1, 2)),
        _ => Err(Failure::Input("--m and --n are required unless N = 2".into())),
    }
}

fn execute(cli: &Cli, argv: &[String]) -> CmdResult {
    match &cli.command {
        Command::EofPure { file } => {
            let mut r = Report::new("eof-pure", argv);
            let psi = load_pure(file, &mut r)?;
            r.result("eof_bits", psi.eof()?)
                .result("schmidt_spectrum", psi.schmidt_spectrum()?)
                .result("dim", psi.dim());
            Ok(r)
        }
        Command::Concurrence { file, which, m, n } => {
            let mut r = Report::new("concurrence", argv);
            let psi = load_pure(file, &mut r)?;
            match which {
                Which::C2 => {
                    r.result("c2", psi.concurrence_c2()?);
                }
                Which::Cn => {
                    r.result("cn", psi.concurrence_cn()?);
                }
                Which::D => {
                    let d = psi.generalized_concurrence(*m, *n)?;
                    let in_range = purestate::concurrence_in_range(d);
                    r.result("d", d).result("m", *m).result("n", *n).flag("in_range", in_range);
                    if !in_range {
                        r.warn(format!("D = {d} lies outside [0, 1]"));
                    }
                }
            }
            Ok(r)
        }
        Command::Bound { file, m, n, no_clamp, eof } => {
            let mut r = Report::new("bound", argv);
            let rho = load_density(file, &mut r)?;
            let (m, n) = profile(*m, *n, rho.dim())?;
            let b = mixed::concurrence_bound(&rho, m, n, !no_clamp)?;
            r.result("d_bound", b.value)
                .result("m", m)
                .result("n", n)
                .result("max_fifth_singular_value", b.max_fifth)
                .flag("clamp", !no_clamp)
                .flag("clamped", b.clamped_any);
            for term in &b.terms {
                r.result(&format!("delta_{}", term.index.label()), term.delta);
            }
            if *eof {
                if *no_clamp {
                    r.warn("the entanglement bound always uses the clamped concurrence bound");
                }
                let clamped = if *no_clamp { mixed::d_lower_bound(&rho, m, n, true)? } else { b.value };
                r.result("e_bound_bits", mixed::eof_from_bound(clamped, m, n)?);
            }
            Ok(r)
        }
        Command::Roof { file, objective, m, n, restarts, seed, t_max } => {
            let mut r = Report::new("roof", argv);
            let rho = load_density(file, &mut r)?;
            let objective = match objective {
                ObjectiveArg::D => Objective::AverageD { m: *m, n: *n },
                ObjectiveArg::E => Objective::AverageE,
            };
            let mut problem = RoofProblem::new(rho.clone(), objective);
            problem.restarts = *restarts;
            problem.seed = *seed;
            problem.t_max = *t_max;
            let res = roofopt::minimize_roof(&problem)?;
            r.result("objective", objective.label())
                .result("value", res.value)
                .result("members", res.decomposition.len())
                .result("cardinality", res.cardinality)
                .result("iterations", res.iterations)
                .result("restart", res.restart)
                .result("reconstruction_error", res.decomposition.reconstruction_error(&rho))
                .flag("converged", res.converged);
            Ok(r)
        }
        Command::Certify { file, m, n, seed, restarts } => {
            let mut r = Report::new("certify", argv);
            let rho = load_density(file, &mut r)?;
            let (m, n) = profile(*m, *n, rho.dim())?;
            let mut settings = RoofProblem::new(rho.clone(), Objective::AverageD { m, n });
            settings.seed = *seed;
            settings.restarts = *restarts;
            let c = roofopt::certify_bound(&rho, m, n, &settings)?;
            r.result("bound", c.bound)
                .result("roof_min", c.roof_min)
                .result("gap", c.gap)
                .flag("violated", c.violated)
                .flag("converged", c.converged);
            if c.violated {
                r.warn("numerical roof fell below the bound");
            }
            Ok(r)
        }
        Command::Check { file } => {
            let mut r = Report::new("check", argv);
            let state = load(file, None, &mut r)?;
            r.result("kind", state.kind().as_str());
            let rho = state.into_density();
            let purity = (rho.matrix() * rho.matrix()).trace().re;
            let ppt = rho.ppt_check()?;
            r.result("dim", rho.dim())
                .result("trace", rho.trace())
                .result("rank", rho.rank())
                .result("purity", purity)
                .result("min_partial_transpose_eigenvalue", ppt.min_eigenvalue)
                .flag("valid", true)
                .flag("ppt", ppt.is_ppt);
            if rho.dim() == 3 {
                let leak = rho.form_a_leak()?;
                r.result("form_a_leak", leak)
                    .flag("form_a", leak <= mixed::DENSITY_TOL);
            }
            Ok(r)
        }
        Command::Lemma { family, m, u, v, step } => lemma(argv, *family, *m, *u, *v, *step),
        Command::Invariance { file, trials, seed, m, n } => {
            let mut r = Report::new("invariance", argv);
            let state = load(file, None, &mut r)?;
            invariance(&mut r, state, *trials, *seed, *m, *n)?;
            Ok(r)
        }
    }
}

fn lemma(argv: &[String], family: FamilyArg, m: usize, u: Option<f64>, v: Option<f64>, step: Option<f64>) -> CmdResult {
    let mut r = Report::new("lemma", argv);
    if m == 0 {
        return Err(Failure::Input("--m must be positive".into()));
    }
    let fam = match family {
        FamilyArg::Two => EigFamily::TwoEigen { m },
        FamilyArg::Arith3 => EigFamily::ArithmeticThree { m },
    };
    let mf = m as f64;
    let (u, v) = match (family, u, v) {
        (FamilyArg::Two, Some(u), v) => (u, v.unwrap_or(1.0 / mf - u)),
        (FamilyArg::Arith3, u, Some(v)) => (u.unwrap_or(1.0 / (3.0 * mf) - v), v),
        (FamilyArg::Two, None, _) => return Err(Failure::Input("--u is required for --family two".into())),
        (FamilyArg::Arith3, _, None) => return Err(Failure::Input("--v is required for --family arith3".into())),
    };
    let t = fam.parameter(u, v)?;
    let step = step.unwrap_or(0.0);
    let lemma = spectra::lemma_value(&fam, t, step)?;
    let convexity = spectra::convexity_value(&fam, t, step)?;
    r.result("u", u)
        .result("v", v)
        .result("m", m)
        .result("eigenvalues", fam.eigenvalues(t))
        .result("concurrence", fam.concurrence(t))
        .result("lemma_value", lemma)
        .result("lemma_verdict", Verdict::of(lemma).as_str())
        .result("de_dd", spectra::de_dd(&fam, t, step)?)
        .result("convexity_value", convexity)
        .result("convexity_verdict", Verdict::of(convexity).as_str());
    if let (FamilyArg::Arith3, Ok((cl, cc))) = (family, spectra::arith3_closed_forms(m, v)) {
        r.result("lemma_closed_form", cl).result("convexity_closed_form", cc);
    }
    Ok(r)
}

fn record_deviation(r: &mut Report, name: &str, dev: f64) {
    r.result(&format!("max_deviation_{name}"), dev)
        .flag(&format!("invariant_{name}"), dev < INVARIANCE_TOL);
}

fn invariance(
    r: &mut Report,
    state: LoadedState,
    trials: usize,
    seed: u64,
    m: Option<usize>,
    n: Option<usize>,
) -> std::result::Result<(), Failure> {
    let locals = |k: usize, dim: usize| {
        let mut rng = sampling::rng_for_item(seed, k as u64);
        let u = sampling::haar_unitary(dim, &mut rng);
        let v = sampling::haar_unitary(dim, &mut rng);
        (u, v)
    };
    r.result("trials", trials);
    match state {
        LoadedState::Pure(psi) => {
            let (m, n) = profile(m, n, psi.dim())?;
            let measures = |s: &PureState| -> crate::Result<[Option<f64>; 5]> {
                let inv = s.local_invariants();
                Ok([
                    Some(s.eof()?),
                    Some(s.concurrence_cn()?),
                    Some(inv.i0),
                    Some(inv.i1),
                    s.generalized_concurrence(m, n).ok(),
                ])
            };
            let names = ["eof", "cn", "i0", "i1", "d"];
            let base = measures(&psi)?;
            let mut dev = [0.0f64; 5];
            for k in 0..trials {
                let (u, v) = locals(k, psi.dim());
                let moved = measures(&psi.apply_local(&u, &v))?;
                for q in 0..5 {
                    if let (Some(a), Some(b)) = (base[q], moved[q]) {
                        dev[q] = dev[q].max((a - b).abs());
                    }
                }
            }
            for q in 0..5 {
                if base[q].is_some() {
                    record_deviation(r, names[q], dev[q]);
                } else {
                    r.warn(format!("D skipped: spectrum does not match (m={m}, n={n})"));
                }
            }
        }
        LoadedState::Density(rho) => {
            let (m, n) = profile(m, n, rho.dim())?;
            let base = mixed::d_lower_bound(&rho, m, n, true)?;
            let mut dev = 0.0f64;
            for k in 0..trials {
                let (u, v) = locals(k, rho.dim());
                let moved = mixed::d_lower_bound(&rho.apply_local(&u, &v), m, n, true)?;
                dev = dev.max((moved - base).abs());
            }
            r.result("d_bound", base);
            record_deviation(r, "d_bound", dev);
        }
    }
    Ok(())
}
