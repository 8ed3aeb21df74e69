//! Positive definiteness of the Hessian of a symmetric binary quartic.
//!
//! With `A = l (y1^4 + y2^4) + m (y1^3 y2 + y1 y2^3) + n y1^2 y2^2`, the Hessian
//! of `A` is positive definite away from the origin iff
//! `1.5 sqrt(4l^2 + 2m^2) - 3l < n < 6l`. Inside that window the definiteness
//! polynomial `P(z)` is irreducible below `(8l^2 + m^2) / 4l`, a perfect square
//! of a quadratic at that value, and reducible above it.

mod field;
mod table;
mod witness;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::sympoly::{k, CoefficientSet2D, Scalar};

pub use field::{check_field, FieldTriple, GridPoint2D, PointError, PointFailure, RegularityReport, VerdictCounts};
pub use table::{format_bound, format_interval, interval_table, IntervalTable};
pub use witness::{find_witness, Minor2D, Witness2D};

/// Snap tolerance for declaring `n` equal to the critical value.
pub const CRITICAL_RTOL: f64 = 1e-9;

/// Hessian of `A` at `y`.
pub fn hessian2d<T: Scalar>(c: &CoefficientSet2D<T>, y: [T; 2]) -> [[T; 2]; 2] {
    let CoefficientSet2D { l, m, n } = *c;
    let [y1, y2] = y;
    let (s1, s2, p) = (y1 * y1, y2 * y2, y1 * y2);
    let a11 = k::<T>(12) * l * s1 + k::<T>(6) * m * p + k::<T>(2) * n * s2;
    let a12 = k::<T>(3) * m * (s1 + s2) + k::<T>(4) * n * p;
    let a22 = k::<T>(2) * n * s1 + k::<T>(6) * m * p + k::<T>(12) * l * s2;
    [[a11, a12], [a12, a22]]
}

/// `c40 (y1^4 + y2^4) + c31 (y1^3 y2 + y1 y2^3) + c22 y1^2 y2^2`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Quartic2Form<T = f64> {
    pub c40: T,
    pub c31: T,
    pub c22: T,
}

impl<T: Scalar> Quartic2Form<T> {
    pub fn eval(&self, y: [T; 2]) -> T {
        CoefficientSet2D::new(self.c40, self.c31, self.c22).eval(y)
    }
}

/// Coefficients of `det A_ij` as a quartic form in `y`.
pub fn det_hessian_coeffs<T: Scalar>(c: &CoefficientSet2D<T>) -> Quartic2Form<T> {
    let CoefficientSet2D { l, m, n } = *c;
    Quartic2Form {
        c40: k::<T>(24) * l * n - k::<T>(9) * m * m,
        c31: k::<T>(72) * l * m - k::<T>(12) * m * n,
        c22: k::<T>(144) * l * l + k::<T>(18) * m * m - k::<T>(12) * n * n,
    }
}

/// `P(z) = alpha z^2 + beta z + gamma`, where `z = t + 1/t` along `y = (t, 1)`
/// and `det A(t, 1) = 3 t^2 P(z)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DefinitenessPolynomial<T = f64> {
    pub alpha: T,
    pub beta: T,
    pub gamma: T,
    pub delta1: T,
    pub delta2: T,
}

impl<T: Scalar> DefinitenessPolynomial<T> {
    pub fn eval(&self, z: T) -> T {
        (self.alpha * z + self.beta) * z + self.gamma
    }

    pub fn discriminant(&self) -> T {
        self.beta * self.beta - k::<T>(4) * self.alpha * self.gamma
    }
}

pub fn definiteness_polynomial<T: Scalar>(c: &CoefficientSet2D<T>) -> DefinitenessPolynomial<T> {
    let CoefficientSet2D { l, m, n } = *c;
    DefinitenessPolynomial {
        alpha: k::<T>(8) * l * n - k::<T>(3) * m * m,
        beta: k::<T>(24) * l * m - k::<T>(4) * m * n,
        gamma: k::<T>(48) * l * l + k::<T>(12) * m * m - k::<T>(4) * n * n - k::<T>(16) * l * n,
        delta1: k::<T>(9) * m * m - k::<T>(12) * l * n - k::<T>(2) * n * n,
        delta2: k::<T>(8) * l * l - k::<T>(4) * l * n + m * m,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConditionCheck {
    pub name: &'static str,
    pub holds: bool,
    /// Positive exactly when the condition holds.
    pub margin: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NecessaryConditions {
    pub checks: Vec<ConditionCheck>,
}

impl NecessaryConditions {
    pub fn all_hold(&self) -> bool {
        self.checks.iter().all(|c| c.holds)
    }

    pub fn get(&self, name: &str) -> Option<&ConditionCheck> {
        self.checks.iter().find(|c| c.name == name)
    }
}

pub fn necessary_conditions(c: &CoefficientSet2D) -> NecessaryConditions {
    let CoefficientSet2D { l, m, n } = *c;
    let check = |name, margin: f64| ConditionCheck { name, holds: margin > 0.0, margin };
    NecessaryConditions {
        checks: vec![
            check("l > 0", l),
            check("8ln > 3m^2", 8.0 * l * n - 3.0 * m * m),
            check("n < 6l", 6.0 * l - n),
            check("2|m| < 2l + n", 2.0 * l + n - 2.0 * m.abs()),
            check("|m| < 4l", 4.0 * l - m.abs()),
        ],
    }
}

/// `1.5 sqrt(4l^2 + 2m^2) - 3l`, written without cancellation when `l > 0`.
pub fn lower_bound(l: f64, m: f64) -> f64 {
    let root = (4.0 * l * l + 2.0 * m * m).sqrt();
    if l > 0.0 {
        3.0 * m * m / (root + 2.0 * l)
    } else {
        1.5 * root - 3.0 * l
    }
}

/// `(8l^2 + m^2) / 4l`.
pub fn critical_value(l: f64, m: f64) -> f64 {
    (8.0 * l * l + m * m) / (4.0 * l)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct NBounds {
    pub lower: f64,
    pub upper: f64,
    /// Absent when `l <= 0`.
    pub critical: Option<f64>,
    /// Absent unless `l > 0` and `|m| < 4l`.
    pub star: Option<f64>,
}

impl NBounds {
    pub fn new(l: f64, m: f64) -> Self {
        Self {
            lower: lower_bound(l, m),
            upper: 6.0 * l,
            critical: (l > 0.0).then(|| critical_value(l, m)),
            star: reducible_case_bounds(&CoefficientSet2D::new(l, m, 0.0)).ok(),
        }
    }

    pub fn contains(&self, n: f64) -> bool {
        self.lower < n && n < self.upper
    }

    /// Distance from `n` to the nearer end of the window.
    pub fn distance(&self, n: f64) -> f64 {
        (n - self.lower).abs().min((self.upper - n).abs())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PdCheck {
    pub positive_definite: bool,
    pub bounds: NBounds,
}

pub fn is_positive_definite(c: &CoefficientSet2D) -> PdCheck {
    let bounds = NBounds::new(c.l, c.m);
    let finite = c.l.is_finite() && c.m.is_finite() && c.n.is_finite();
    PdCheck { positive_definite: finite && c.l > 0.0 && bounds.contains(c.n), bounds }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Verdict2D {
    NotPositiveDefinite,
    PDIrreducible,
    PDReducible,
    PDRiemannianCritical,
}

impl Verdict2D {
    pub fn is_positive_definite(self) -> bool {
        self != Verdict2D::NotPositiveDefinite
    }

    pub fn label(self) -> &'static str {
        match self {
            Verdict2D::NotPositiveDefinite => "not-pd",
            Verdict2D::PDIrreducible => "irreducible",
            Verdict2D::PDReducible => "reducible",
            Verdict2D::PDRiemannianCritical => "critical",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Classification2D {
    pub verdict: Verdict2D,
    pub bounds: NBounds,
    pub reason: Option<String>,
    pub witness: Option<Witness2D>,
}

pub fn classify(c: &CoefficientSet2D) -> Classification2D {
    let CoefficientSet2D { l, m, n } = *c;
    let pd = is_positive_definite(c);
    let bounds = pd.bounds;
    if !(l.is_finite() && m.is_finite() && n.is_finite()) {
        return Classification2D {
            verdict: Verdict2D::NotPositiveDefinite,
            bounds,
            reason: Some("coefficients must be finite".into()),
            witness: None,
        };
    }
    if !pd.positive_definite {
        let reason = if l <= 0.0 {
            "l must be positive".to_string()
        } else if n >= bounds.upper {
            format!("n = {n} is not below 6l = {}", bounds.upper)
        } else {
            format!("n = {n} is not above the lower bound {}", bounds.lower)
        };
        return Classification2D {
            verdict: Verdict2D::NotPositiveDefinite,
            bounds,
            reason: Some(reason),
            witness: find_witness(c),
        };
    }
    let critical = critical_value(l, m);
    let verdict = if (n - critical).abs() <= CRITICAL_RTOL * (1.0 + n.abs()) {
        Verdict2D::PDRiemannianCritical
    } else if n < critical {
        Verdict2D::PDIrreducible
    } else {
        Verdict2D::PDReducible
    };
    Classification2D { verdict, bounds, reason: None, witness: None }
}

/// The slope bound `3m(m + 2l)/(8l + m)` for `m >= 0`, `3m(m - 2l)/(8l - m)` otherwise.
pub fn reducible_case_bounds(c: &CoefficientSet2D) -> Result<f64> {
    let CoefficientSet2D { l, m, .. } = *c;
    if !(l > 0.0 && m.abs() < 4.0 * l) {
        return Err(Error::Precondition(format!("need l > 0 and |m| < 4l, got l = {l}, m = {m}")));
    }
    Ok(if m >= 0.0 { 3.0 * m * (m + 2.0 * l) / (8.0 * l + m) } else { 3.0 * m * (m - 2.0 * l) / (8.0 * l - m) })
}

/// Open window of admissible `n`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OpenInterval {
    pub lower: f64,
    pub upper: f64,
}

pub fn n_interval(l: f64, m: f64) -> Result<OpenInterval> {
    if !(l > 0.0 && m.abs() < 4.0 * l) {
        return Err(Error::Precondition(format!("need l > 0 and |m| < 4l, got l = {l}, m = {m}")));
    }
    Ok(OpenInterval { lower: lower_bound(l, m), upper: 6.0 * l })
}

/// Share of the admissible `n` window on the reducible side of the critical
/// value, as a function of `|m| / l`. The closed end at 4 is the degenerate limit.
pub fn reducible_fraction(ratio: f64) -> Result<f64> {
    if !(0.0..=4.0).contains(&ratio) {
        return Err(Error::Precondition(format!("ratio must lie in [0, 4], got {ratio}")));
    }
    Ok(0.5 + (4.0 + 2.0 * ratio * ratio).sqrt() / 12.0)
}
