//! Brute-force cross-checks that do not use any closed-form criterion.
//!
//! The eigenvalue oracle expands the quartic into dense monomials, differentiates
//! term by term, and scans the unit sphere.

use nalgebra::{DMatrix, SymmetricEigen};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::pd2d::{hessian2d, is_positive_definite};
use crate::search::{compass_polish, golden_min};
use crate::sympoly::{CoefficientSet2D, DensePolynomial};

pub const DEFAULT_CIRCLE_DIRECTIONS: usize = 720;
pub const DEFAULT_SPHERE_DIRECTIONS: usize = 2000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SamplingScheme {
    /// Equally spaced angles on `[0, pi)`; the Hessian is even in `y`.
    UniformAngle,
    FibonacciLattice,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct DirectionSampler {
    pub dimension: usize,
    pub count: usize,
    pub scheme: SamplingScheme,
}

impl DirectionSampler {
    pub fn new(dimension: usize, count: usize) -> Result<Self> {
        let scheme = match dimension {
            2 => SamplingScheme::UniformAngle,
            3 => SamplingScheme::FibonacciLattice,
            d => return Err(Error::UnsupportedDimension(d)),
        };
        if count == 0 {
            return Err(Error::InvalidInput("direction count must be positive".into()));
        }
        Ok(Self { dimension, count, scheme })
    }

    pub fn circle() -> Self {
        Self { dimension: 2, count: DEFAULT_CIRCLE_DIRECTIONS, scheme: SamplingScheme::UniformAngle }
    }

    pub fn sphere() -> Self {
        Self { dimension: 3, count: DEFAULT_SPHERE_DIRECTIONS, scheme: SamplingScheme::FibonacciLattice }
    }

    /// Sampled directions followed by the special directions.
    pub fn directions(&self) -> Vec<Vec<f64>> {
        match self.scheme {
            SamplingScheme::UniformAngle => circle_directions(self.count).into_iter().map(Vec::from).collect(),
            SamplingScheme::FibonacciLattice => sphere_directions(self.count).into_iter().map(Vec::from).collect(),
        }
    }
}

/// `count` angles on `[0, pi)` plus the axes and the two diagonals.
pub fn circle_directions(count: usize) -> Vec<[f64; 2]> {
    let step = std::f64::consts::PI / count as f64;
    let h = std::f64::consts::FRAC_1_SQRT_2;
    (0..count)
        .map(|k| {
            let t = k as f64 * step;
            [t.cos(), t.sin()]
        })
        .chain([[1.0, 0.0], [0.0, 1.0], [h, h], [h, -h]])
        .collect()
}

/// Axes, face diagonals and body diagonals, normalised.
pub fn special_directions_3d() -> Vec<[f64; 3]> {
    let (a, b) = (std::f64::consts::FRAC_1_SQRT_2, 1.0 / 3f64.sqrt());
    vec![
        [1.0, 0.0, 0.0],
        [0.0, 1.0, 0.0],
        [0.0, 0.0, 1.0],
        [a, a, 0.0],
        [a, -a, 0.0],
        [a, 0.0, a],
        [a, 0.0, -a],
        [0.0, a, a],
        [0.0, a, -a],
        [b, b, b],
        [b, b, -b],
        [b, -b, b],
        [b, -b, -b],
    ]
}

pub fn fibonacci_sphere(count: usize) -> Vec<[f64; 3]> {
    let golden_angle = std::f64::consts::PI * (3.0 - 5f64.sqrt());
    (0..count)
        .map(|i| {
            let z = 1.0 - (2 * i + 1) as f64 / count as f64;
            let r = (1.0 - z * z).max(0.0).sqrt();
            let phi = i as f64 * golden_angle;
            [r * phi.cos(), r * phi.sin(), z]
        })
        .collect()
}

/// Fibonacci lattice of `count` points plus the 13 special directions.
pub fn sphere_directions(count: usize) -> Vec<[f64; 3]> {
    let mut dirs = fibonacci_sphere(count);
    dirs.extend(special_directions_3d());
    dirs
}

fn min_eigen(h: &DMatrix<f64>) -> f64 {
    if h.nrows() == 2 {
        let (a, b, d) = (h[(0, 0)], 0.5 * (h[(0, 1)] + h[(1, 0)]), h[(1, 1)]);
        0.5 * (a + d) - (0.5 * (a - d)).hypot(b)
    } else {
        SymmetricEigen::new(h.clone()).eigenvalues.min()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EigenMinimum {
    pub value: f64,
    pub direction: Vec<f64>,
    pub directions: usize,
}

impl EigenMinimum {
    pub fn pd_evidence(&self) -> bool {
        self.value > 0.0
    }
}

/// Smallest Hessian eigenvalue of a quartic over the sampler's directions, refined
/// locally around the sampled minima.
pub fn min_eigenvalue_on_sphere(a: &DensePolynomial, sampler: &DirectionSampler) -> Result<EigenMinimum> {
    if a.degree() != 4 {
        return Err(Error::Precondition(format!("expected a quartic, got degree {}", a.degree())));
    }
    if a.dimension() != sampler.dimension {
        return Err(Error::InvalidInput(format!(
            "polynomial has {} variables but the sampler is {}-dimensional",
            a.dimension(),
            sampler.dimension
        )));
    }
    let lam = |y: &[f64]| min_eigen(&a.hessian(y));
    match sampler.dimension {
        2 => {
            let steps = sampler.count;
            let step = std::f64::consts::PI / steps as f64;
            let on_circle = |t: f64| lam(&[t.cos(), t.sin()]);
            let values: Vec<f64> = (0..steps).map(|k| on_circle(k as f64 * step)).collect();
            let mut best = (0.0, f64::INFINITY);
            for k in 0..steps {
                let (prev, next) = (values[(k + steps - 1) % steps], values[(k + 1) % steps]);
                let v = values[k];
                let t = k as f64 * step;
                if v < best.1 {
                    best = (t, v);
                }
                if v <= prev && v <= next {
                    let tr = golden_min(&on_circle, t - step, t + step, 60);
                    let vr = on_circle(tr);
                    if vr < best.1 {
                        best = (tr, vr);
                    }
                }
            }
            for y in &circle_directions(0) {
                let v = lam(y);
                if v < best.1 {
                    best = (y[1].atan2(y[0]), v);
                }
            }
            Ok(EigenMinimum { value: best.1, direction: vec![best.0.cos(), best.0.sin()], directions: steps + 4 })
        }
        _ => {
            let dirs = sphere_directions(sampler.count);
            let values: Vec<f64> = dirs.par_iter().map(|y| lam(y)).collect();
            let (idx, v) = values
                .iter()
                .copied()
                .enumerate()
                .min_by(|x, y| x.1.total_cmp(&y.1).then(x.0.cmp(&y.0)))
                .expect("non-empty sampler");
            let (y, v) = compass_polish(&|y: [f64; 3]| lam(&y), dirs[idx], v);
            Ok(EigenMinimum { value: v, direction: y.to_vec(), directions: dirs.len() })
        }
    }
}

/// Central second differences; the mixed entries use the four-point cross stencil,
/// which is symmetric in `i` and `j`.
pub fn finite_diff_hessian(f: &dyn Fn(&[f64]) -> f64, y: &[f64], h: f64) -> Result<DMatrix<f64>> {
    if !(h > 0.0) {
        return Err(Error::Precondition(format!("step must be positive, got {h}")));
    }
    if y.iter().all(|v| *v == 0.0) {
        return Err(Error::Precondition("the point must be non-zero".into()));
    }
    let n = y.len();
    let shifted = |moves: &[(usize, f64)]| {
        let mut p = y.to_vec();
        for &(i, d) in moves {
            p[i] += d;
        }
        f(&p)
    };
    let f0 = f(y);
    let mut out = DMatrix::zeros(n, n);
    for i in 0..n {
        out[(i, i)] = (shifted(&[(i, h)]) - 2.0 * f0 + shifted(&[(i, -h)])) / (h * h);
        for j in i + 1..n {
            let v = (shifted(&[(i, h), (j, h)]) - shifted(&[(i, h), (j, -h)]) - shifted(&[(i, -h), (j, h)])
                + shifted(&[(i, -h), (j, -h)]))
                / (4.0 * h * h);
            out[(i, j)] = v;
            out[(j, i)] = v;
        }
    }
    Ok(out)
}

pub const ENERGY_FD_STEP: f64 = 1e-4;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EnergyReport {
    pub direction: [f64; 2],
    pub energy: f64,
    /// `max |A_ij - (8 E_i E_j + 8 E E_ij)| / max |A_ij|`.
    pub residual: f64,
    pub tol: f64,
    pub passes: bool,
}

/// Checks `A_ij = 8 E_i E_j + 8 E E_ij` for `E = sqrt(A) / 2`, with `E`'s derivatives
/// taken by finite differences.
pub fn energy_relation_check(c: &CoefficientSet2D, y: [f64; 2], tol: f64) -> Result<EnergyReport> {
    let a = c.eval(y);
    if !(a > 0.0) {
        return Err(Error::Domain(format!("A(y) = {a} must be positive")));
    }
    let energy = |p: &[f64]| 0.5 * c.eval([p[0], p[1]]).sqrt();
    let h = ENERGY_FD_STEP * (y[0].hypot(y[1])).max(1.0);
    let grad = [0, 1].map(|i| {
        let mut p = y;
        p[i] += h;
        let up = energy(&p);
        p[i] -= 2.0 * h;
        (up - energy(&p)) / (2.0 * h)
    });
    let second = finite_diff_hessian(&energy, &y, h)?;
    let e = energy(&y);
    let exact = hessian2d(c, y);
    let mut worst: f64 = 0.0;
    let mut scale: f64 = 0.0;
    for i in 0..2 {
        for j in 0..2 {
            let rebuilt = 8.0 * grad[i] * grad[j] + 8.0 * e * second[(i, j)];
            worst = worst.max((exact[i][j] - rebuilt).abs());
            scale = scale.max(exact[i][j].abs());
        }
    }
    let residual = worst / scale.max(f64::MIN_POSITIVE);
    Ok(EnergyReport { direction: y, energy: e, residual, tol, passes: residual <= tol })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HarnessConfig {
    pub samples: usize,
    pub lo: f64,
    pub hi: f64,
    /// Samples closer than `margin (1 + |l| + |m| + |n|)` to the criterion boundary are redrawn.
    pub margin: f64,
    pub seed: u64,
    pub directions: usize,
}

impl Default for HarnessConfig {
    fn default() -> Self {
        Self {
            samples: 10_000,
            lo: -10.0,
            hi: 10.0,
            margin: 1e-6,
            seed: 20_240_601,
            directions: DEFAULT_CIRCLE_DIRECTIONS,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Disagreement {
    pub coefficients: CoefficientSet2D,
    pub criterion: bool,
    pub oracle_min_eigenvalue: f64,
    pub oracle_direction: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HarnessReport {
    pub config: HarnessConfig,
    pub compared: usize,
    pub redrawn_near_boundary: usize,
    pub agree_positive: usize,
    pub agree_negative: usize,
    pub disagreements: Vec<Disagreement>,
}

pub fn boundary_distance_ok(c: &CoefficientSet2D, margin: f64) -> bool {
    let bounds = is_positive_definite(c).bounds;
    bounds.distance(c.n) > margin * (1.0 + c.l.abs() + c.m.abs() + c.n.abs())
}

/// Compares the closed-form criterion against the eigenvalue oracle on uniformly drawn
/// coefficients. Draws are sequential from a seeded generator, so the report depends only
/// on the configuration.
pub fn agreement_harness(config: &HarnessConfig) -> Result<HarnessReport> {
    if !(config.margin > 0.0) {
        return Err(Error::Precondition("margin must be positive".into()));
    }
    if !(config.lo < config.hi) {
        return Err(Error::InvalidInput("coefficient box must have lo < hi".into()));
    }
    let sampler = DirectionSampler::new(2, config.directions)?;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut draws = Vec::with_capacity(config.samples);
    let mut redrawn = 0;
    while draws.len() < config.samples {
        let c = CoefficientSet2D::new(
            rng.random_range(config.lo..config.hi),
            rng.random_range(config.lo..config.hi),
            rng.random_range(config.lo..config.hi),
        );
        if boundary_distance_ok(&c, config.margin) {
            draws.push(c);
        } else {
            redrawn += 1;
        }
    }
    let outcomes: Vec<(CoefficientSet2D, bool, EigenMinimum)> = draws
        .par_iter()
        .map(|c| {
            let oracle = min_eigenvalue_on_sphere(&c.to_dense(), &sampler)?;
            Ok((*c, is_positive_definite(c).positive_definite, oracle))
        })
        .collect::<Result<_>>()?;

    let mut report = HarnessReport {
        config: config.clone(),
        compared: outcomes.len(),
        redrawn_near_boundary: redrawn,
        agree_positive: 0,
        agree_negative: 0,
        disagreements: Vec::new(),
    };
    for (c, criterion, oracle) in outcomes {
        match (criterion, oracle.pd_evidence()) {
            (true, true) => report.agree_positive += 1,
            (false, false) => report.agree_negative += 1,
            _ => report.disagreements.push(Disagreement {
                coefficients: c,
                criterion,
                oracle_min_eigenvalue: oracle.value,
                oracle_direction: oracle.direction,
            }),
        }
    }
    Ok(report)
}
