//! Second-root metrics `A = a s1^2 + b s2` and the curvature of the surface model
//! `g = [[1, p], [p, 1]]` with `p = 1 + b / 2a`.
//!
//! Curvature is assembled from the Christoffel symbols through the usual index
//! contractions, so every component is computed from `p` and its partials alone.

use nalgebra::DMatrix;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::exprfield::{BinOp, Expr, Func, ScalarField};

/// Evaluation refuses points with `|p| >= 1 - SINGULAR_EPS`.
pub const SINGULAR_EPS: f64 = 1e-8;
/// Sample points with `1 - p^2` at or below this are skipped by the verifier.
pub const VERIFY_MIN_GAP: f64 = 1e-6;
/// Default relative step for finite-difference partials of `p`.
pub const FD_STEP: f64 = 1e-4;

#[derive(Debug, Clone, PartialEq)]
pub struct SymmetricSecondRoot {
    pub a: ScalarField,
    pub b: ScalarField,
    pub n: usize,
}

impl SymmetricSecondRoot {
    pub fn new(a: ScalarField, b: ScalarField, n: usize) -> Result<Self> {
        if n < 2 {
            return Err(Error::UnsupportedDimension(n));
        }
        Ok(Self { a, b, n })
    }

    pub fn p_parameter(&self, x: &[f64]) -> Result<f64> {
        let a = self.a.evaluate(x)?;
        if !(a > 0.0) {
            return Err(Error::Regularity(format!("a(x) = {a} must be positive")));
        }
        Ok(1.0 + self.b.evaluate(x)? / (2.0 * a))
    }

    /// `1 + b / (2 a)` as a field of its own.
    pub fn p_field(&self) -> ScalarField {
        let two_a = Expr::Binary(BinOp::Mul, Box::new(Expr::Num(2.0)), Box::new(self.a.expr().clone()));
        let ratio = Expr::Binary(BinOp::Div, Box::new(self.b.expr().clone()), Box::new(two_a));
        ScalarField::from_expr(Expr::Binary(BinOp::Add, Box::new(Expr::Num(1.0)), Box::new(ratio)))
    }

    pub fn check_at(&self, x: &[f64]) -> Result<SecondRootCheck> {
        is_pd_second_root(self.p_parameter(x)?, self.n)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Eigenvalue {
    pub value: f64,
    pub multiplicity: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SecondRootCheck {
    pub p: f64,
    pub n: usize,
    pub positive_definite: bool,
    /// `1 - p` with multiplicity `n - 1`, then `1 + (n - 1) p`.
    pub eigenvalues: [Eigenvalue; 2],
}

pub fn is_pd_second_root(p: f64, n: usize) -> Result<SecondRootCheck> {
    if n < 2 {
        return Err(Error::UnsupportedDimension(n));
    }
    let nm1 = (n - 1) as f64;
    Ok(SecondRootCheck {
        p,
        n,
        positive_definite: -1.0 / nm1 < p && p < 1.0,
        eigenvalues: [
            Eigenvalue { value: 1.0 - p, multiplicity: n - 1 },
            Eigenvalue { value: 1.0 + nm1 * p, multiplicity: 1 },
        ],
    })
}

/// Unit diagonal, `p` everywhere else.
pub fn model_matrix(p: f64, n: usize) -> DMatrix<f64> {
    DMatrix::from_fn(n, n, |i, j| if i == j { 1.0 } else { p })
}

pub fn inverse_metric(p: f64, n: usize) -> Result<DMatrix<f64>> {
    if !is_pd_second_root(p, n)?.positive_definite {
        return Err(Error::Regularity(format!("p = {p} is outside ]-1/{}, 1[", n - 1)));
    }
    let nm1 = (n - 1) as f64;
    let scale = 1.0 / ((1.0 - p) * (1.0 + nm1 * p));
    let diag = 1.0 + (n as f64 - 2.0) * p;
    Ok(DMatrix::from_fn(n, n, |i, j| scale * if i == j { diag } else { -p }))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum DerivativeMode {
    /// Chain rule over the expression tree.
    Exact,
    /// Central differences; `None` uses `FD_STEP * max(1, |x_i|)`.
    FiniteDifference(Option<f64>),
}

/// `p` with its first and second partials at one point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PJet {
    pub p: f64,
    pub d: [f64; 2],
    pub dd: [[f64; 2]; 2],
}

pub fn p_jet(p: &ScalarField, x: [f64; 2], mode: DerivativeMode) -> Result<PJet> {
    match mode {
        DerivativeMode::Exact => {
            let mixed = p.jet(&x, 0, 1)?;
            let d11 = p.jet(&x, 0, 0)?.dab;
            let d22 = p.jet(&x, 1, 1)?.dab;
            Ok(PJet { p: mixed.value, d: [mixed.da, mixed.db], dd: [[d11, mixed.dab], [mixed.dab, d22]] })
        }
        DerivativeMode::FiniteDifference(step) => {
            let h = |i: usize| step.unwrap_or(FD_STEP * x[i].abs().max(1.0));
            let d = [p.partial(0, &x, Some(h(0)))?, p.partial(1, &x, Some(h(1)))?];
            let d11 = p.second_partial(0, 0, &x, Some(h(0)))?;
            let d22 = p.second_partial(1, 1, &x, Some(h(1)))?;
            let d12 = match step {
                Some(s) => p.second_partial(0, 1, &x, Some(s))?,
                None => p.second_partial(0, 1, &x, Some(FD_STEP * x[0].abs().max(x[1].abs()).max(1.0)))?,
            };
            Ok(PJet { p: p.evaluate(&x)?, d, dd: [[d11, d12], [d12, d22]] })
        }
    }
}

type T3 = [[[f64; 2]; 2]; 2];
type T4 = [[[[f64; 2]; 2]; 2]; 2];

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CurvatureData {
    pub x: [f64; 2],
    pub p: f64,
    /// `christoffel[k][i][j]` is `Γ^k_ij`.
    pub christoffel: T3,
    /// `riemann_up[l][i][j][k]` is `R^l_ijk`.
    pub riemann_up: T4,
    /// `riemann_down[i][j][k][l]` is `R_ijkl = g_lm R^m_ijk`.
    pub riemann_down: T4,
    pub ricci: [[f64; 2]; 2],
    pub scalar: f64,
    pub gauss: f64,
}

fn singular_guard(p: f64) -> Result<f64> {
    let gap = 1.0 - p * p;
    if !(p.abs() < 1.0 - SINGULAR_EPS) {
        return Err(Error::SingularMetric { one_minus_p2: gap });
    }
    Ok(gap)
}

fn metric(p: f64) -> [[f64; 2]; 2] {
    [[1.0, p], [p, 1.0]]
}

fn inverse(p: f64) -> [[f64; 2]; 2] {
    let d = 1.0 - p * p;
    [[1.0 / d, -p / d], [-p / d, 1.0 / d]]
}

fn gamma_from(j: &PJet) -> (T3, [T3; 2]) {
    let g_inv = inverse(j.p);
    let off = |i: usize, k: usize| if i == k { 0.0 } else { 1.0 };
    // ∂_a g_ij and ∂_a ∂_b g_ij.
    let dg = |a: usize, i: usize, k: usize| off(i, k) * j.d[a];
    let ddg = |a: usize, b: usize, i: usize, k: usize| off(i, k) * j.dd[a][b];
    // ∂_a g^kl = -g^km ∂_a g_mn g^nl.
    let mut dg_inv = [[[0.0; 2]; 2]; 2];
    for a in 0..2 {
        for k in 0..2 {
            for l in 0..2 {
                let mut s = 0.0;
                for m in 0..2 {
                    for n in 0..2 {
                        s -= g_inv[k][m] * dg(a, m, n) * g_inv[n][l];
                    }
                }
                dg_inv[a][k][l] = s;
            }
        }
    }
    let mut gamma = [[[0.0; 2]; 2]; 2];
    let mut dgamma = [[[[0.0; 2]; 2]; 2]; 2];
    for k in 0..2 {
        for i in 0..2 {
            for jj in 0..2 {
                for l in 0..2 {
                    let first = dg(i, jj, l) + dg(jj, i, l) - dg(l, i, jj);
                    gamma[k][i][jj] += 0.5 * g_inv[k][l] * first;
                    for a in 0..2 {
                        let second = ddg(a, i, jj, l) + ddg(a, jj, i, l) - ddg(a, l, i, jj);
                        dgamma[a][k][i][jj] += 0.5 * (dg_inv[a][k][l] * first + g_inv[k][l] * second);
                    }
                }
            }
        }
    }
    (gamma, dgamma)
}

/// Christoffel symbols of the surface model at `x`.
pub fn christoffel(p: &ScalarField, x: [f64; 2], mode: DerivativeMode) -> Result<T3> {
    let j = p_jet(p, x, mode)?;
    singular_guard(j.p)?;
    Ok(gamma_from(&j).0)
}

pub fn curvature(p: &ScalarField, x: [f64; 2], mode: DerivativeMode) -> Result<CurvatureData> {
    curvature_from_jet(&p_jet(p, x, mode)?, x)
}

pub fn curvature_from_jet(j: &PJet, x: [f64; 2]) -> Result<CurvatureData> {
    singular_guard(j.p)?;
    let (gamma, dgamma) = gamma_from(j);
    let g = metric(j.p);
    let g_inv = inverse(j.p);

    let mut up = [[[[0.0; 2]; 2]; 2]; 2];
    for l in 0..2 {
        for i in 0..2 {
            for jj in 0..2 {
                for k in 0..2 {
                    let mut v = dgamma[i][l][jj][k] - dgamma[jj][l][i][k];
                    for r in 0..2 {
                        v += gamma[l][i][r] * gamma[r][jj][k] - gamma[l][jj][r] * gamma[r][i][k];
                    }
                    up[l][i][jj][k] = v;
                }
            }
        }
    }
    let mut down = [[[[0.0; 2]; 2]; 2]; 2];
    for i in 0..2 {
        for jj in 0..2 {
            for k in 0..2 {
                for l in 0..2 {
                    down[i][jj][k][l] = (0..2).map(|m| g[l][m] * up[m][i][jj][k]).sum();
                }
            }
        }
    }
    // Ric_jk = R^i_ijk.
    let mut ricci = [[0.0; 2]; 2];
    for jj in 0..2 {
        for k in 0..2 {
            ricci[jj][k] = (0..2).map(|i| up[i][i][jj][k]).sum();
        }
    }
    let scalar: f64 = (0..2).flat_map(|i| (0..2).map(move |k| (i, k))).map(|(i, k)| g_inv[i][k] * ricci[i][k]).sum();
    Ok(CurvatureData {
        x,
        p: j.p,
        christoffel: gamma,
        riemann_up: up,
        riemann_down: down,
        ricci,
        scalar,
        gauss: 0.5 * scalar,
    })
}

/// `((1 - p^2) p_12 + p p_1 p_2) / (1 - p^2)^2`.
pub fn gauss_closed_form(j: &PJet) -> f64 {
    let d = 1.0 - j.p * j.p;
    (d * j.dd[0][1] + j.p * j.d[0] * j.d[1]) / (d * d)
}

#[derive(Debug, Clone, PartialEq)]
pub enum Branch {
    /// `2 tanh^2(c1 x1 - k x2 / c1 + c2) - 1`.
    Plus,
    /// `1 - 2 tanh^2(c1 x1 + k x2 / c1 + c2)`.
    Minus,
    /// A field of a single coordinate; flat for any choice.
    Separable(ScalarField),
}

fn num(v: f64) -> Box<Expr> {
    Box::new(Expr::Num(v))
}

fn bin(op: BinOp, a: Expr, b: Expr) -> Expr {
    Expr::Binary(op, Box::new(a), Box::new(b))
}

pub fn constant_curvature_solution(k: f64, c1: f64, c2: f64, branch: Branch) -> Result<ScalarField> {
    if let Branch::Separable(f) = branch {
        if k != 0.0 {
            return Err(Error::Precondition(format!("the separable branch only solves k = 0, got k = {k}")));
        }
        let vars = f.variables();
        if vars.iter().any(|&v| v > 1) {
            return Err(Error::Precondition(format!("`{f}` must be a field of x1 and x2 only")));
        }
        if vars.len() > 1 {
            return Err(Error::Precondition(format!(
                "`{f}` depends on both coordinates; with p = f1(x1) f2(x2) zero curvature forces f1' f2' = 0"
            )));
        }
        return Ok(f);
    }
    if c1 == 0.0 || !c1.is_finite() {
        return Err(Error::Precondition(format!("c1 must be a non-zero real, got {c1}")));
    }
    let slope = match branch {
        Branch::Plus => -k / c1,
        _ => k / c1,
    };
    let mut arg = bin(BinOp::Mul, Expr::Num(c1), Expr::Var(0));
    if slope != 0.0 {
        arg = bin(BinOp::Add, arg, bin(BinOp::Mul, Expr::Num(slope), Expr::Var(1)));
    }
    let arg = bin(BinOp::Add, arg, Expr::Num(c2));
    let tanh2 = Expr::Pow(Box::new(Expr::Call(Func::Tanh, Box::new(arg))), 2);
    let twice = Expr::Binary(BinOp::Mul, num(2.0), Box::new(tanh2));
    let expr = match branch {
        Branch::Plus => bin(BinOp::Sub, twice, Expr::Num(1.0)),
        _ => bin(BinOp::Sub, Expr::Num(1.0), twice),
    };
    Ok(ScalarField::from_expr(expr))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PointResidual {
    pub x: [f64; 2],
    pub gauss: f64,
    pub residual: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CurvatureVerification {
    pub k: f64,
    pub tol: f64,
    pub mode: DerivativeMode,
    pub evaluated: Vec<PointResidual>,
    /// Points with `1 - p^2 <= VERIFY_MIN_GAP`, skipped.
    pub singular: Vec<[f64; 2]>,
    pub errors: Vec<String>,
    pub worst: Option<PointResidual>,
    pub passes: bool,
}

/// Evaluates Gaussian curvature at each point and compares it with `k`.
pub fn verify_constant_curvature(
    p: &ScalarField,
    k: f64,
    points: &[[f64; 2]],
    tol: f64,
    mode: DerivativeMode,
) -> CurvatureVerification {
    enum Outcome {
        Ok(PointResidual),
        Singular,
        Failed(String),
    }
    let outcomes: Vec<Outcome> = points
        .par_iter()
        .map(|&x| {
            let j = match p_jet(p, x, mode) {
                Ok(j) => j,
                Err(e) => return Outcome::Failed(format!("{x:?}: {e}")),
            };
            if !(1.0 - j.p * j.p > VERIFY_MIN_GAP) {
                return Outcome::Singular;
            }
            match curvature_from_jet(&j, x) {
                Ok(c) => Outcome::Ok(PointResidual { x, gauss: c.gauss, residual: (c.gauss - k).abs() }),
                Err(e) => Outcome::Failed(format!("{x:?}: {e}")),
            }
        })
        .collect();
    let mut report = CurvatureVerification {
        k,
        tol,
        mode,
        evaluated: Vec::new(),
        singular: Vec::new(),
        errors: Vec::new(),
        worst: None,
        passes: false,
    };
    for (x, o) in points.iter().zip(outcomes) {
        match o {
            Outcome::Ok(r) => report.evaluated.push(r),
            Outcome::Singular => report.singular.push(*x),
            Outcome::Failed(e) => report.errors.push(e),
        }
    }
    report.worst = report.evaluated.iter().max_by(|a, b| a.residual.total_cmp(&b.residual)).cloned();
    report.passes =
        report.errors.is_empty() && !report.evaluated.is_empty() && report.evaluated.iter().all(|r| r.residual <= tol);
    report
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use nalgebra::SymmetricEigen;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn field(s: &str) -> ScalarField {
        ScalarField::parse(s).unwrap()
    }

    fn rel(a: f64, b: f64) -> f64 {
        (a - b).abs() / (1.0 + a.abs().max(b.abs()))
    }

    #[test]
    fn p_parameter_examples() {
        let m = |a: &str, b: &str| SymmetricSecondRoot::new(field(a), field(b), 2).unwrap();
        assert_eq!(m("1", "0").p_parameter(&[0.0, 0.0]).unwrap(), 1.0);
        assert_eq!(m("1", "-2").p_parameter(&[0.0, 0.0]).unwrap(), 0.0);
        assert_eq!(m("2", "-2").p_parameter(&[0.0, 0.0]).unwrap(), 0.5);
        assert!(matches!(m("x1", "1").p_parameter(&[-1.0, 0.0]), Err(Error::Regularity(_))));
        let s = m("2 + x1^2", "x2 - 3");
        let x = [0.4, -1.3];
        assert_relative_eq!(s.p_field().evaluate(&x).unwrap(), s.p_parameter(&x).unwrap(), max_relative = 1e-15);
        assert!(SymmetricSecondRoot::new(field("1"), field("0"), 1).is_err());
    }

    #[test]
    fn second_root_examples() {
        let r = is_pd_second_root(0.0, 2).unwrap();
        assert!(r.positive_definite);
        assert_eq!(r.eigenvalues.map(|e| e.value), [1.0, 1.0]);
        let r = is_pd_second_root(0.5, 3).unwrap();
        assert!(r.positive_definite);
        assert_eq!(r.eigenvalues[0], Eigenvalue { value: 0.5, multiplicity: 2 });
        assert_eq!(r.eigenvalues[1], Eigenvalue { value: 2.0, multiplicity: 1 });
        assert!(!is_pd_second_root(-0.5, 3).unwrap().positive_definite);
        assert!(!is_pd_second_root(1.0, 2).unwrap().positive_definite);
    }

    #[test]
    fn inverse_examples() {
        let p = 0.3;
        let g = inverse_metric(p, 2).unwrap();
        let d = 1.0 - p * p;
        assert_relative_eq!(g[(0, 0)], 1.0 / d, max_relative = 1e-15);
        assert_relative_eq!(g[(0, 1)], -p / d, max_relative = 1e-15);
        assert_eq!(inverse_metric(0.0, 5).unwrap(), DMatrix::identity(5, 5));
        let g = inverse_metric(0.5, 3).unwrap();
        assert_relative_eq!(g[(0, 0)], 1.5, max_relative = 1e-15);
        assert_relative_eq!(g[(1, 2)], -0.5, max_relative = 1e-15);
        assert!((g * model_matrix(0.5, 3) - DMatrix::identity(3, 3)).amax() < 1e-12);
        assert!(inverse_metric(1.0, 2).is_err());
    }

    #[test]
    fn random_models_match_numeric_eigensolver() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..1000 {
            let n = rng.random_range(2..=6usize);
            let lo = -1.0 / (n - 1) as f64;
            let p = rng.random_range(lo..1.0);
            if p == lo {
                continue;
            }
            let r = is_pd_second_root(p, n).unwrap();
            let mut numeric: Vec<f64> = SymmetricEigen::new(model_matrix(p, n)).eigenvalues.iter().copied().collect();
            numeric.sort_by(f64::total_cmp);
            let mut formula = vec![r.eigenvalues[0].value; n - 1];
            formula.push(r.eigenvalues[1].value);
            formula.sort_by(f64::total_cmp);
            for (a, b) in numeric.iter().zip(&formula) {
                assert!((a - b).abs() < 1e-10, "n = {n}, p = {p}");
            }
            let (x, a) = (inverse_metric(p, n).unwrap(), model_matrix(p, n));
            let residual = (&x * &a - DMatrix::identity(n, n)).amax();
            assert!(residual <= 1e-12 * x.amax() * a.amax() * n as f64, "n = {n}, p = {p}");
        }
    }

    #[test]
    fn christoffel_examples() {
        let g = christoffel(&field("0.3"), [0.1, 0.2], DerivativeMode::Exact).unwrap();
        assert_eq!(g, [[[0.0; 2]; 2]; 2]);
        let g = christoffel(&field("0.5*x1"), [0.0, 0.0], DerivativeMode::Exact).unwrap();
        assert_eq!(g[1][0][0], 0.5);
        assert_eq!(g[0][0][0], 0.0);
        assert_eq!(g[0][1][1], 0.0);
        assert_eq!(g[1][1][1], 0.0);
        assert!(matches!(
            christoffel(&field("1"), [0.0, 0.0], DerivativeMode::Exact),
            Err(Error::SingularMetric { .. })
        ));
    }

    /// The printed component formulas, in terms of `N = (1 - p^2) p_12 + p p_1 p_2`.
    fn check_against_printed(c: &CurvatureData, j: &PJet) {
        let (p, d) = (j.p, 1.0 - j.p * j.p);
        let n = d * j.dd[0][1] + p * j.d[0] * j.d[1];
        let g = &c.christoffel;
        let close = |a: f64, b: f64| assert!(rel(a, b) < 1e-9, "{a} vs {b}");
        close(g[0][0][0], -p * j.d[0] / d);
        close(g[1][0][0], j.d[0] / d);
        close(g[0][1][1], j.d[1] / d);
        close(g[1][1][1], -p * j.d[1] / d);
        for k in 0..2 {
            close(g[k][0][1], 0.0);
            close(g[k][1][0], 0.0);
        }
        let u = &c.riemann_up;
        let d2 = d * d;
        close(u[0][0][1][0], p * n / d2);
        close(u[1][0][1][0], -n / d2);
        close(u[0][0][1][1], n / d2);
        close(u[1][0][1][1], -p * n / d2);
        close(u[0][1][0][0], -p * n / d2);
        close(u[1][1][0][0], n / d2);
        close(u[0][1][0][1], -n / d2);
        close(u[1][1][0][1], p * n / d2);
        for l in 0..2 {
            for k in 0..2 {
                for i in 0..2 {
                    close(u[l][i][i][k], 0.0);
                }
            }
        }
        let r = &c.riemann_down;
        close(r[0][1][0][1], -n / d);
        close(r[0][1][1][0], n / d);
        close(r[1][0][0][1], n / d);
        close(r[1][0][1][0], -n / d);
        close(r[0][1][0][0], 0.0);
        close(r[0][1][1][1], 0.0);
        close(c.ricci[0][0], n / d2);
        close(c.ricci[1][1], n / d2);
        close(c.ricci[0][1], p * n / d2);
        close(c.ricci[1][0], p * n / d2);
        close(c.scalar, 2.0 * n / d2);
        close(c.gauss, gauss_closed_form(j));
    }

    #[test]
    fn tensor_pipeline_reproduces_printed_components() {
        for (s, x) in [
            ("0.3*sin(x1*x2) + 0.1*x1", [0.4, -0.7]),
            ("0.2*x1^2 - 0.1*x1*x2 + 0.05*x2^3", [1.1, 0.6]),
            ("1 - 2*tanh(x1 + x2)^2", [0.7, 0.3]),
            ("0.5*exp(-x1^2 - x2^2)", [0.2, 0.9]),
        ] {
            let p = field(s);
            let j = p_jet(&p, x, DerivativeMode::Exact).unwrap();
            check_against_printed(&curvature(&p, x, DerivativeMode::Exact).unwrap(), &j);
        }
    }

    #[test]
    fn curvature_examples() {
        let c = curvature(&field("0.3"), [0.5, 0.5], DerivativeMode::Exact).unwrap();
        assert_eq!(c.gauss, 0.0);
        for x in [[0.1, 0.2], [1.5, -2.0], [-0.7, 0.4]] {
            let c = curvature(&field("0.5*sin(x1)"), x, DerivativeMode::Exact).unwrap();
            assert!(c.gauss.abs() < 1e-12);
        }
        let c = curvature(&field("1 - 2*tanh(x1 + 1*x2)^2"), [0.7, 0.3], DerivativeMode::Exact).unwrap();
        assert!((c.gauss - 1.0).abs() < 1e-6);
    }

    #[test]
    fn solution_fields() {
        let f = constant_curvature_solution(1.0, 1.0, 0.0, Branch::Minus).unwrap();
        let g = field("1 - 2*tanh(x1 + x2)^2");
        let f_plus = constant_curvature_solution(1.0, 1.0, 0.0, Branch::Plus).unwrap();
        let g_plus = field("2*tanh(x1 - x2)^2 - 1");
        for x in [[0.3, 0.1], [-1.0, 2.0]] {
            assert_relative_eq!(f.evaluate(&x).unwrap(), g.evaluate(&x).unwrap(), max_relative = 1e-15);
            assert_relative_eq!(f_plus.evaluate(&x).unwrap(), g_plus.evaluate(&x).unwrap(), max_relative = 1e-15);
        }
        let sep = constant_curvature_solution(0.0, 1.0, 0.0, Branch::Separable(field("0.3*tanh(x2)"))).unwrap();
        let pts = [[0.2, 0.5], [1.0, -1.0], [2.0, 1.7]];
        assert!(verify_constant_curvature(&sep, 0.0, &pts, 1e-12, DerivativeMode::Exact).passes);

        assert!(constant_curvature_solution(1.0, 0.0, 0.0, Branch::Minus).is_err());
        assert!(constant_curvature_solution(1.0, 1.0, 0.0, Branch::Separable(field("x1"))).is_err());
        assert!(constant_curvature_solution(0.0, 1.0, 0.0, Branch::Separable(field("x1*x2"))).is_err());
        let flat = constant_curvature_solution(0.0, 2.0, 0.1, Branch::Minus).unwrap();
        assert_eq!(flat.variables().len(), 1);
    }

    #[test]
    fn verification_examples() {
        let p = field("0.3");
        let pts = [[0.1, 0.1], [1.0, 2.0]];
        assert!(verify_constant_curvature(&p, 0.0, &pts, 1e-12, DerivativeMode::Exact).passes);
        let r = verify_constant_curvature(&p, 1.0, &pts, 1e-6, DerivativeMode::Exact);
        assert!(!r.passes);
        assert_eq!(r.worst.unwrap().residual, 1.0);

        let r = verify_constant_curvature(
            &field("1 - 2*tanh(x1 + x2)^2"),
            1.0,
            &[[0.0, 0.0], [0.5, 0.5]],
            1e-6,
            DerivativeMode::Exact,
        );
        assert_eq!(r.singular, vec![[0.0, 0.0]]);
        assert!(r.passes);
    }

    fn sample_points(seed: u64, count: usize) -> Vec<[f64; 2]> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..count).map(|_| [rng.random_range(0.2..2.0), rng.random_range(0.2..2.0)]).collect()
    }

    #[test]
    fn tanh_families_have_constant_curvature() {
        let pts = sample_points(11, 50);
        for k in [-2.0, -1.0, 1.0, 2.0] {
            for branch in [Branch::Plus, Branch::Minus] {
                let p = constant_curvature_solution(k, 1.3, -0.2, branch).unwrap();
                let r = verify_constant_curvature(&p, k, &pts, 1e-6, DerivativeMode::Exact);
                assert!(r.passes, "k = {k}: {:?}", r.worst);
            }
        }
    }

    proptest! {
        #[test]
        fn structural_identities(a in -0.4..0.4f64, b in -0.4..0.4f64, c in -0.3..0.3f64,
                                 x1 in -1.0..1.0f64, x2 in -1.0..1.0f64) {
            let p = field(&format!("{a}*sin(x1) + {b}*x1*x2 + {c}*cos(x2)"));
            let d = curvature(&p, [x1, x2], DerivativeMode::Exact).unwrap();
            let r = &d.riemann_down;
            prop_assert!(rel(r[0][1][0][1], -r[0][1][1][0]) < 1e-9);
            prop_assert!(rel(r[0][1][0][1], -r[1][0][0][1]) < 1e-9);
            prop_assert!(rel(r[0][1][0][1], r[1][0][1][0]) < 1e-9);
            prop_assert!(rel(d.ricci[0][1], d.p * d.ricci[0][0]) < 1e-9);
            prop_assert!(rel(d.ricci[0][0], d.ricci[1][1]) < 1e-9);
            prop_assert!(rel(d.scalar, 2.0 * d.gauss) < 1e-12);
            for k in 0..2 {
                prop_assert!(rel(d.christoffel[k][0][1], d.christoffel[k][1][0]) < 1e-15);
            }
        }

        #[test]
        fn finite_differences_track_exact_partials(k in prop::sample::select(vec![-2.0, -1.0, 1.0, 2.0]),
                                                   x1 in 0.2..2.0f64, x2 in 0.2..2.0f64) {
            let p = constant_curvature_solution(k, 1.0, 0.0, Branch::Minus).unwrap();
            let j = p_jet(&p, [x1, x2], DerivativeMode::Exact).unwrap();
            prop_assume!(1.0 - j.p * j.p > 1e-2);
            let exact = curvature(&p, [x1, x2], DerivativeMode::Exact).unwrap().gauss;
            let fd = curvature(&p, [x1, x2], DerivativeMode::FiniteDifference(None)).unwrap().gauss;
            prop_assert!((exact - fd).abs() < 1e-4, "{exact} vs {fd}");
        }
    }
}
