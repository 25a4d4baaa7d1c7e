//! Entanglement as a function of the reduced spectrum, and the monotonicity /
//! convexity conditions for two-parameter eigenvalue families.
//!
//! A family `λ_i(u, v)` with multiplicity `m` is restricted to its normalized
//! curve `m·Σλ_i = 1`, which leaves one free parameter `t`. Derivatives with
//! respect to the generalized concurrence `D` go through the chain rule in
//! `t`, with `dD/dt` and `dλ_i/dt` from Richardson-extrapolated central
//! differences.

use std::f64::consts::LN_2;

use crate::error::{Error, Result};

/// Residual allowed on the normalization `m·Σλ_i = 1` of a user point.
pub const CURVE_TOL: f64 = 1e-8;

/// Values within this margin below zero are inconclusive.
pub const SIGN_MARGIN: f64 = 1e-9;

/// Absolute floor on `|dD/dt|`. Below it, or below `1e-8·D/extent`, the
/// point is treated as stationary.
pub const DEGENERATE_SLOPE: f64 = 1e-12;

/// A one-parameter curve of distinct eigenvalues, each of multiplicity `m`,
/// already normalized. Implement this to evaluate a new family.
pub trait SpectrumCurve {
    fn multiplicity(&self) -> usize;

    /// Open interval of the parameter on which every eigenvalue is positive.
    fn domain(&self) -> (f64, f64);

    /// Distinct eigenvalues at parameter `t`.
    fn eigenvalues(&self, t: f64) -> Vec<f64>;

    /// Typical length scale of the parameter; sets the default step.
    fn extent(&self) -> f64 {
        let (lo, hi) = self.domain();
        hi - lo
    }

    /// `D = m·n·√(Πλ_i)`.
    fn concurrence(&self, t: f64) -> f64 {
        let lambdas = self.eigenvalues(t);
        let mn = (self.multiplicity() * lambdas.len()) as f64;
        mn * lambdas.iter().product::<f64>().max(0.0).sqrt()
    }
}

/// The closed set of built-in families.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EigFamily {
    /// `λ₁ = u`, `λ₂ = v`; free parameter `u`.
    TwoEigen { m: usize },
    /// `λ = (u, u+v, u+2v)`; free parameter `v`.
    ArithmeticThree { m: usize },
}

impl EigFamily {
    pub fn m(&self) -> usize {
        match *self {
            EigFamily::TwoEigen { m } | EigFamily::ArithmeticThree { m } => m,
        }
    }

    /// Number of distinct eigenvalues.
    pub fn n(&self) -> usize {
        match self {
            EigFamily::TwoEigen { .. } => 2,
            EigFamily::ArithmeticThree { .. } => 3,
        }
    }

    /// Eigenvalues as functions of the two raw parameters.
    pub fn raw_eigenvalues(&self, u: f64, v: f64) -> Vec<f64> {
        match self {
            EigFamily::TwoEigen { .. } => vec![u, v],
            EigFamily::ArithmeticThree { .. } => vec![u, u + v, u + 2.0 * v],
        }
    }

    /// Free parameter of a point `(u, v)` on the normalized curve.
    pub fn parameter(&self, u: f64, v: f64) -> Result<f64> {
        let m = self.m() as f64;
        let residual = (m * self.raw_eigenvalues(u, v).iter().sum::<f64>() - 1.0).abs();
        if residual > CURVE_TOL {
            return Err(Error::OffCurve { residual });
        }
        let t = match self {
            EigFamily::TwoEigen { .. } => u,
            EigFamily::ArithmeticThree { .. } => v,
        };
        let (lo, hi) = self.domain();
        if !(t > lo && t < hi) {
            return Err(Error::OutOfRange(format!(
                "parameter {t} outside ({lo}, {hi}); some eigenvalue is not positive"
            )));
        }
        Ok(t)
    }

    /// The point `(u, v)` at parameter `t`.
    pub fn point(&self, t: f64) -> (f64, f64) {
        let m = self.m() as f64;
        match self {
            EigFamily::TwoEigen { .. } => (t, 1.0 / m - t),
            EigFamily::ArithmeticThree { .. } => (1.0 / (3.0 * m) - t, t),
        }
    }

    /// Parameter on the branch `t ≥ t_max` (where `D` is decreasing) whose
    /// concurrence equals `d`, by bisection.
    pub fn parameter_for_concurrence(&self, d: f64) -> Result<f64> {
        let (_, hi) = self.domain();
        let peak = match self {
            EigFamily::TwoEigen { m } => 1.0 / (2.0 * *m as f64),
            EigFamily::ArithmeticThree { .. } => 0.0,
        };
        let d_max = self.concurrence(peak);
        if !(0.0..=d_max + 1e-12).contains(&d) {
            return Err(Error::OutOfRange(format!(
                "concurrence {d} outside [0, {d_max}] for {self:?}"
            )));
        }
        let (mut lo, mut up) = (peak, hi);
        for _ in 0..200 {
            let mid = 0.5 * (lo + up);
            if self.concurrence(mid) > d {
                lo = mid;
            } else {
                up = mid;
            }
            if up - lo < 1e-15 {
                break;
            }
        }
        Ok(0.5 * (lo + up))
    }

    /// Entanglement along the curve.
    pub fn eof_at(&self, t: f64) -> Result<f64> {
        eof_from_spectrum(&self.eigenvalues(t), self.m())
    }
}

impl SpectrumCurve for EigFamily {
    fn multiplicity(&self) -> usize {
        self.m()
    }

    fn domain(&self) -> (f64, f64) {
        let m = self.m() as f64;
        match self {
            EigFamily::TwoEigen { .. } => (0.0, 1.0 / m),
            EigFamily::ArithmeticThree { .. } => (-1.0 / (3.0 * m), 1.0 / (3.0 * m)),
        }
    }

    fn extent(&self) -> f64 {
        let m = self.m() as f64;
        match self {
            EigFamily::TwoEigen { .. } => 1.0 / m,
            EigFamily::ArithmeticThree { .. } => 1.0 / (3.0 * m),
        }
    }

    fn eigenvalues(&self, t: f64) -> Vec<f64> {
        let (u, v) = self.point(t);
        self.raw_eigenvalues(u, v)
    }
}

/// `−Σ m·λ_i·log₂λ_i` over distinct eigenvalues of multiplicity `m`.
// `!(l > 0.0)` also rejects NaN.
#[allow(clippy::neg_cmp_op_on_partial_ord)]
pub fn eof_from_spectrum(values: &[f64], m: usize) -> Result<f64> {
    if let Some(bad) = values.iter().find(|&&l| !(l > 0.0)) {
        return Err(Error::BadSpectrum(format!("nonpositive eigenvalue {bad}")));
    }
    let total = m as f64 * values.iter().sum::<f64>();
    if total > 1.0 + 1e-8 {
        return Err(Error::BadSpectrum(format!("m·Σλ = {total} exceeds 1")));
    }
    Ok(-(m as f64) * values.iter().map(|&l| l * l.log2()).sum::<f64>())
}

/// Entanglement of a state with two nonzero eigenvalues of multiplicity `m`
/// as a function of `d = 2m√(λ₁λ₂)`.
pub fn eof_of_d(d: f64, m: usize) -> Result<f64> {
    if !(0.0..=1.0).contains(&d) {
        return Err(Error::OutOfRange(format!("d = {d} outside [0, 1]")));
    }
    if m == 0 {
        return Err(Error::OutOfRange("multiplicity must be positive".into()));
    }
    let inv_m = 1.0 / m as f64;
    let x = 0.5 * (inv_m + (inv_m * inv_m * (1.0 - d * d)).sqrt());
    let y = inv_m - x;
    let xlogx = |z: f64| if z > 0.0 { z * z.log2() } else { 0.0 };
    Ok((m as f64 * -(xlogx(x) + xlogx(y))).max(0.0))
}

/// `d = 2m√(λ₁λ₂)`.
pub fn d_two_eigen(lambda1: f64, lambda2: f64, m: usize) -> f64 {
    2.0 * m as f64 * (lambda1 * lambda2).sqrt()
}

/// Eigenvalues and their first two derivatives with respect to `D` at one
/// point of a curve.
#[derive(Debug, Clone, PartialEq)]
pub struct CurveDerivatives {
    pub lambdas: Vec<f64>,
    pub concurrence: f64,
    pub dd_dt: f64,
    pub dlambda_dd: Vec<f64>,
    pub d2lambda_dd2: Vec<f64>,
}

fn richardson(coarse: f64, fine: f64) -> f64 {
    (4.0 * fine - coarse) / 3.0
}

/// Derivatives of `λ_i` with respect to `D` by the chain rule in `t`.
///
/// `step <= 0` selects the default step `1e-4 · extent`.
#[allow(clippy::neg_cmp_op_on_partial_ord)]
pub fn curve_derivatives<C: SpectrumCurve + ?Sized>(
    curve: &C,
    t: f64,
    step: f64,
) -> Result<CurveDerivatives> {
    let (lo, hi) = curve.domain();
    let room = (t - lo).min(hi - t);
    if !(room > 0.0) {
        return Err(Error::OutOfRange(format!("parameter {t} outside ({lo}, {hi})")));
    }
    let base = if step > 0.0 && step.is_finite() { step } else { 1e-4 * curve.extent() };
    let h = base.min(0.5 * room);

    let lambdas = curve.eigenvalues(t);
    let n = lambdas.len();
    let concurrence = curve.concurrence(t);

    // f(t) = (λ_1..λ_n, D)
    let eval = |s: f64| {
        let mut v = curve.eigenvalues(s);
        v.push(curve.concurrence(s));
        v
    };
    let center = eval(t);
    let diffs = |h: f64| {
        let (plus, minus) = (eval(t + h), eval(t - h));
        let first: Vec<f64> = (0..=n).map(|k| (plus[k] - minus[k]) / (2.0 * h)).collect();
        let second: Vec<f64> = (0..=n)
            .map(|k| (plus[k] - 2.0 * center[k] + minus[k]) / (h * h))
            .collect();
        (first, second)
    };
    let (f1, s1) = diffs(h);
    let (f2, s2) = diffs(0.5 * h);
    let first: Vec<f64> = (0..=n).map(|k| richardson(f1[k], f2[k])).collect();
    let second: Vec<f64> = (0..=n).map(|k| richardson(s1[k], s2[k])).collect();

    let dd = first[n];
    let d2d = second[n];
    // central differences of D carry roundoff of order ε·D/h
    let floor = DEGENERATE_SLOPE.max(1e-8 * concurrence.abs() / curve.extent());
    if dd.abs() < floor {
        return Err(Error::DegeneratePoint { slope: dd.abs() });
    }
    let dlambda_dd = (0..n).map(|k| first[k] / dd).collect();
    let d2lambda_dd2 = (0..n)
        .map(|k| (second[k] * dd - first[k] * d2d) / (dd * dd * dd))
        .collect();
    Ok(CurveDerivatives {
        lambdas,
        concurrence,
        dd_dt: dd,
        dlambda_dd,
        d2lambda_dd2,
    })
}

/// `Σ_i (∂λ_i/∂D)·log₂λ_i`; `D` is an entanglement measure where this is negative.
pub fn lemma_value<C: SpectrumCurve + ?Sized>(curve: &C, t: f64, step: f64) -> Result<f64> {
    let der = curve_derivatives(curve, t, step)?;
    Ok(der
        .lambdas
        .iter()
        .zip(&der.dlambda_dd)
        .map(|(l, dl)| dl * l.log2())
        .sum())
}

/// `∂E/∂D = −Σ_i m·log₂λ_i·(∂λ_i/∂D)`.
pub fn de_dd<C: SpectrumCurve + ?Sized>(curve: &C, t: f64, step: f64) -> Result<f64> {
    let der = curve_derivatives(curve, t, step)?;
    let m = curve.multiplicity() as f64;
    Ok(-m * der
        .lambdas
        .iter()
        .zip(&der.dlambda_dd)
        .map(|(l, dl)| l.log2() * dl)
        .sum::<f64>())
}

/// `Σ_i [(1/λ_i)(∂λ_i/∂D)² + (∂²λ_i/∂D²)·ln λ_i]`; `E` is convex in `D`
/// where this is negative.
pub fn convexity_value<C: SpectrumCurve + ?Sized>(curve: &C, t: f64, step: f64) -> Result<f64> {
    let der = curve_derivatives(curve, t, step)?;
    Ok((0..der.lambdas.len())
        .map(|k| {
            let l = der.lambdas[k];
            der.dlambda_dd[k].powi(2) / l + der.d2lambda_dd2[k] * l.ln()
        })
        .sum())
}

/// Closed forms of the Lemma and convexity sums for the arithmetic
/// three-eigenvalue family: `(lemma, convexity)`.
pub fn arith3_closed_forms(m: usize, v: f64) -> Result<(f64, f64)> {
    let mf = m as f64;
    if m == 0 || !(v != 0.0 && v.abs() < 1.0 / (3.0 * mf)) {
        return Err(Error::OutOfRange(format!(
            "need 0 < |v| < 1/(3m), got v = {v}, m = {m}"
        )));
    }
    let x = 3.0 * mf * v;
    let log_ratio = ((1.0 - x) / (1.0 + x)).ln();
    let lemma = (1.0 - x * x).sqrt() * log_ratio / LN_2 / (3.0 * mf * v * (3.0 * mf).sqrt());
    let convexity = (6.0 * mf * v + log_ratio) / (27.0 * mf.powi(3) * v.powi(3));
    Ok((lemma, convexity))
}

/// Sign classification with the inconclusive band `(−SIGN_MARGIN, 0)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Satisfied,
    Inconclusive,
    Violated,
}

impl Verdict {
    pub fn of(value: f64) -> Self {
        if value < -SIGN_MARGIN {
            Verdict::Satisfied
        } else if value < 0.0 {
            Verdict::Inconclusive
        } else {
            Verdict::Violated
        }
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            Verdict::Satisfied => "satisfied",
            Verdict::Inconclusive => "inconclusive",
            Verdict::Violated => "violated",
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{c64, CMatrix};
    use crate::purestate::PureState;

    const A3: EigFamily = EigFamily::ArithmeticThree { m: 1 };
    const TWO: EigFamily = EigFamily::TwoEigen { m: 1 };

    #[test]
    fn eof_from_spectrum_examples() {
        assert!((eof_from_spectrum(&[0.5, 0.5], 1).unwrap() - 1.0).abs() < 1e-15);
        assert!((eof_from_spectrum(&[0.25], 4).unwrap() - 2.0).abs() < 1e-15);
        assert!(matches!(eof_from_spectrum(&[0.5, 0.0], 1), Err(Error::BadSpectrum(_))));
        assert!(matches!(eof_from_spectrum(&[0.7, 0.7], 1), Err(Error::BadSpectrum(_))));
    }

    #[test]
    fn eof_from_spectrum_matches_diagonal_state() {
        let values: [f64; 3] = [0.2, 0.3, 0.5];
        let a = CMatrix::from_fn(3, 3, |i, j| if i == j { c64(values[i].sqrt(), 0.0) } else { c64(0.0, 0.0) });
        let s = PureState::from_coefficients(a, 1e-10, false).unwrap();
        assert!((s.eof().unwrap() - eof_from_spectrum(&values, 1).unwrap()).abs() < 1e-12);
    }

    #[test]
    fn eof_of_d_examples() {
        assert!((eof_of_d(1.0, 1).unwrap() - 1.0).abs() < 1e-15);
        assert!(eof_of_d(1e-9, 1).unwrap() < 1e-15);
        assert_eq!(eof_of_d(0.0, 1).unwrap(), 0.0);
        assert!((eof_of_d(1.0, 2).unwrap() - 2.0).abs() < 1e-15);
        assert!(matches!(eof_of_d(1.1, 1), Err(Error::OutOfRange(_))));
        assert!(matches!(eof_of_d(-0.1, 1), Err(Error::OutOfRange(_))));
    }

    #[test]
    fn d_two_eigen_examples() {
        assert!((d_two_eigen(0.5, 0.5, 1) - 1.0).abs() < 1e-15);
        assert_eq!(d_two_eigen(1.0, 0.0, 1), 0.0);
        assert!((d_two_eigen(0.3, 0.7, 1) - 0.916_515_138_991_168).abs() < 1e-12);
    }

    #[test]
    fn two_eigen_curve_reproduces_eof_of_d() {
        for m in 1..=3 {
            let fam = EigFamily::TwoEigen { m };
            for k in 1..50 {
                let u = 1.0 / (2.0 * m as f64) + k as f64 / 100.0 / m as f64;
                if u >= 1.0 / m as f64 {
                    break;
                }
                let l = fam.eigenvalues(u);
                let d = d_two_eigen(l[0], l[1], m);
                let e = eof_from_spectrum(&l, m).unwrap();
                assert!((e - eof_of_d(d, m).unwrap()).abs() < 1e-10);
                let norm: f64 = m as f64 * l.iter().sum::<f64>();
                assert!((norm - 1.0).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn arith3_lemma_example() {
        let t = A3.parameter(1.0 / 3.0 - 0.1, 0.1).unwrap();
        let fd = lemma_value(&A3, t, 0.0).unwrap();
        let (cf, conv_cf) = arith3_closed_forms(1, 0.1).unwrap();
        assert!((cf - (-1.639_575_839_71)).abs() < 1e-9);
        assert!((fd - cf).abs() < 1e-6);
        let conv = convexity_value(&A3, t, 0.0).unwrap();
        assert!((conv_cf - (-0.705_155_866_897)).abs() < 1e-9);
        assert!((conv - conv_cf).abs() < 1e-4);
        let slope = de_dd(&A3, t, 0.0).unwrap();
        assert!((slope + fd).abs() < 1e-9);
        assert!(slope > 0.0);
    }

    #[test]
    fn de_dd_matches_difference_of_entropy() {
        for (fam, t) in [(A3, 0.1), (A3, -0.05), (TWO, 0.7), (EigFamily::TwoEigen { m: 2 }, 0.3)] {
            let slope = de_dd(&fam, t, 0.0).unwrap();
            // independent route: dE/dt / dD/dt from plain central differences
            let h = 1e-6;
            let de = (fam.eof_at(t + h).unwrap() - fam.eof_at(t - h).unwrap()) / (2.0 * h);
            let dd = (fam.concurrence(t + h) - fam.concurrence(t - h)) / (2.0 * h);
            assert!((slope - de / dd).abs() < 1e-6, "{fam:?} {slope} {}", de / dd);
        }
    }

    #[test]
    fn two_eigen_signs() {
        let slightly_off = 0.5 + 1e-3;
        assert!(lemma_value(&TWO, slightly_off, 0.0).unwrap() < 0.0);
        for k in 1..20 {
            let u = 0.5 + 0.025 * k as f64;
            assert!(lemma_value(&TWO, u, 0.0).unwrap() < 0.0);
            assert!(de_dd(&TWO, u, 0.0).unwrap() > 0.0);
            assert!(convexity_value(&TWO, u, 0.0).unwrap() < 0.0, "u={u}");
        }
        assert!(matches!(lemma_value(&TWO, 0.5, 0.0), Err(Error::DegeneratePoint { .. })));
        assert!(matches!(de_dd(&TWO, 0.5, 0.0), Err(Error::DegeneratePoint { .. })));
        assert!(matches!(lemma_value(&A3, 0.0, 0.0), Err(Error::DegeneratePoint { .. })));
    }

    #[test]
    fn closed_forms_sign_and_limits() {
        let (l, c) = arith3_closed_forms(1, -0.1).unwrap();
        assert!(l < 0.0 && c < 0.0);
        // towards the edge of the domain the lemma value tends to 0 from
        // below while the convexity value diverges to −∞
        let mut prev = 0.0;
        for k in 1..=30 {
            let v = 1.0 / 3.0 * (1.0 - 0.5f64.powi(k));
            let (l, c) = arith3_closed_forms(1, v).unwrap();
            assert!(l < 0.0);
            if k > 1 {
                assert!(c < prev);
            }
            prev = c;
        }
        assert!(prev < -15.0);
        assert!(arith3_closed_forms(1, 0.0).is_err());
        assert!(arith3_closed_forms(1, 0.34).is_err());
    }

    #[test]
    fn convexity_near_zero_parameter() {
        // limit v → 0 of the closed form is −2/3
        for v in [1e-3, -1e-3, 2e-3] {
            let value = convexity_value(&A3, v, 0.0).unwrap();
            assert!(value < 0.0 && (value + 2.0 / 3.0).abs() < 0.05, "v={v}: {value}");
        }
    }

    #[test]
    fn off_curve_point_is_rejected() {
        assert!(matches!(A3.parameter(0.2, 0.1), Err(Error::OffCurve { .. })));
        assert!(matches!(TWO.parameter(1.2, -0.2), Err(Error::OutOfRange(_))));
    }

    #[test]
    fn inversion_round_trips() {
        for fam in [TWO, A3, EigFamily::TwoEigen { m: 2 }, EigFamily::ArithmeticThree { m: 2 }] {
            for t in [0.1, 0.4, 0.7, 0.95] {
                let (lo, hi) = fam.domain();
                let peak = if fam.n() == 2 { 0.5 / fam.m() as f64 } else { 0.0 };
                let s = peak + t * (hi - peak);
                assert!(s > lo);
                let d = fam.concurrence(s);
                let back = fam.parameter_for_concurrence(d).unwrap();
                assert!((fam.concurrence(back) - d).abs() < 1e-12);
            }
        }
        assert!(A3.parameter_for_concurrence(0.9).is_err());
    }

    #[test]
    fn verdicts() {
        assert_eq!(Verdict::of(-1.0), Verdict::Satisfied);
        assert_eq!(Verdict::of(-1e-10), Verdict::Inconclusive);
        assert_eq!(Verdict::of(0.0), Verdict::Violated);
    }
}
