//! Hessian minors of a symmetric ternary quartic.
//!
//! Only necessary conditions for positive definiteness are known in three
//! variables, so [`numeric_pd_check_3d`] reports sampled evidence, not a proof.

use nalgebra::{Matrix3, SymmetricEigen};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::oracle::sphere_directions;
use crate::pd2d::{is_positive_definite, PdCheck};
use crate::search::compass_polish;
use crate::sympoly::{k, CoefficientSet3D, Scalar};

pub fn hessian3d<T: Scalar>(c: &CoefficientSet3D<T>, y: [T; 3]) -> [[T; 3]; 3] {
    let CoefficientSet3D { l, m, n, q } = *c;
    let [y1, y2, y3] = y;
    let (two, three, four, six, twelve) = (k::<T>(2), k::<T>(3), k::<T>(4), k::<T>(6), k::<T>(12));
    let diag =
        |a: T, b: T, c: T| twelve * l * a * a + six * m * a * (b + c) + two * n * (b * b + c * c) + two * q * b * c;
    let off =
        |a: T, b: T, c: T| three * m * (a * a + b * b) + four * n * a * b + q * (two * a * c + two * b * c + c * c);
    let a11 = diag(y1, y2, y3);
    let a22 = diag(y2, y1, y3);
    let a33 = diag(y3, y1, y2);
    let a12 = off(y1, y2, y3);
    let a13 = off(y1, y3, y2);
    let a23 = off(y2, y3, y1);
    [[a11, a12, a13], [a12, a22, a23], [a13, a23, a33]]
}

/// The three leading principal minors.
pub fn leading_minors<T: Scalar>(h: &[[T; 3]; 3]) -> [T; 3] {
    let d1 = h[0][0];
    let d2 = h[0][0] * h[1][1] - h[0][1] * h[1][0];
    let d3 = h[0][0] * (h[1][1] * h[2][2] - h[1][2] * h[2][1]) - h[0][1] * (h[1][0] * h[2][2] - h[1][2] * h[2][0])
        + h[0][2] * (h[1][0] * h[2][1] - h[1][1] * h[2][0]);
    [d1, d2, d3]
}

/// Base matrix `B` with `A_11 = y^T B y`.
pub fn base_matrix<T: Scalar>(c: &CoefficientSet3D<T>) -> [[T; 3]; 3] {
    let CoefficientSet3D { l, m, n, q } = *c;
    let (three_m, two_n) = (k::<T>(3) * m, k::<T>(2) * n);
    [[k::<T>(12) * l, three_m, three_m], [three_m, two_n, q], [three_m, q, two_n]]
}

/// `A_11 A_22 - A_12^2` as a quartic in three variables, one coefficient per monomial.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Minor2Form3D<T = f64> {
    pub terms: [([u32; 3], T); 15],
}

impl<T: Scalar> Minor2Form3D<T> {
    pub fn coefficient(&self, exps: [u32; 3]) -> T {
        self.terms.iter().find(|(e, _)| *e == exps).map(|(_, v)| *v).unwrap_or_else(T::zero)
    }

    pub fn eval(&self, y: [T; 3]) -> T {
        self.terms.iter().fold(T::zero(), |acc, (e, v)| {
            let mut t = *v;
            for (i, &p) in e.iter().enumerate() {
                for _ in 0..p {
                    t = t * y[i];
                }
            }
            acc + t
        })
    }
}

pub fn minor2_coeffs<T: Scalar>(c: &CoefficientSet3D<T>) -> Minor2Form3D<T> {
    let CoefficientSet3D { l, m, n, q } = *c;
    let i = |v: i64| k::<T>(v);
    let c40 = i(24) * l * n - i(9) * m * m;
    let c31 = i(72) * l * m - i(12) * m * n;
    let c301 = i(24) * l * q + i(12) * m * n - i(12) * m * q;
    let c22 = i(144) * l * l + i(18) * m * m - i(12) * n * n;
    let c211 = i(72) * l * m + i(36) * m * m - i(12) * n * q;
    let c202 = i(24) * l * n + i(6) * m * q + i(4) * n * n - i(4) * q * q;
    let c112 = i(36) * m * m + i(24) * m * n - i(8) * n * q - i(4) * q * q;
    let c103 = i(12) * m * n + i(4) * n * q - i(4) * q * q;
    let c004 = i(4) * n * n - q * q;
    Minor2Form3D {
        terms: [
            ([4, 0, 0], c40),
            ([3, 1, 0], c31),
            ([3, 0, 1], c301),
            ([2, 2, 0], c22),
            ([2, 1, 1], c211),
            ([2, 0, 2], c202),
            ([1, 3, 0], c31),
            ([1, 2, 1], c211),
            ([1, 1, 2], c112),
            ([1, 0, 3], c103),
            ([0, 4, 0], c40),
            ([0, 3, 1], c301),
            ([0, 2, 2], c202),
            ([0, 1, 3], c103),
            ([0, 0, 4], c004),
        ],
    }
}

/// `det A_ij` on the seven symmetric orbits of degree-6 monomials:
/// `a y1^6`, `b y1^5 y2`, `c y1^4 y2^2`, `d y1^4 y2 y3`, `e y1^3 y2^3`, `f y1^3 y2^2 y3`, `g y1^2 y2^2 y3^2`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Sextic3Form<T = f64> {
    pub a: T,
    pub b: T,
    pub c: T,
    pub d: T,
    pub e: T,
    pub f: T,
    pub g: T,
}

impl<T: Scalar> Sextic3Form<T> {
    pub fn eval(&self, y: [T; 3]) -> T {
        let pw = |v: T, p: u32| (0..p).fold(T::one(), |acc, _| acc * v);
        let mut s6 = T::zero();
        let mut s51 = T::zero();
        let mut s42 = T::zero();
        let mut s33 = T::zero();
        let mut s3 = T::zero();
        let mut s21 = T::zero();
        for i in 0..3 {
            s6 = s6 + pw(y[i], 6);
            s3 = s3 + pw(y[i], 3);
            for j in 0..3 {
                if i != j {
                    s51 = s51 + pw(y[i], 5) * y[j];
                    s42 = s42 + pw(y[i], 4) * pw(y[j], 2);
                    s21 = s21 + pw(y[i], 2) * y[j];
                    if i < j {
                        s33 = s33 + pw(y[i], 3) * pw(y[j], 3);
                    }
                }
            }
        }
        let p = y[0] * y[1] * y[2];
        self.a * s6 + self.b * s51 + self.c * s42 + self.d * p * s3 + self.e * s33 + self.f * p * s21 + self.g * p * p
    }
}

pub fn det_coeffs<T: Scalar>(c: &CoefficientSet3D<T>) -> Sextic3Form<T> {
    let CoefficientSet3D { l, m, n, q } = *c;
    let i = |v: i64| k::<T>(v);
    let (l2, m2, n2, q2) = (l * l, m * m, n * n, q * q);
    let (m3, n3, q3) = (m2 * m, n2 * n, q2 * q);
    Sextic3Form {
        a: i(48) * l * n2 - i(12) * l * q2 - i(36) * m2 * n + i(18) * m2 * q,
        b: i(144) * l * m * n + i(48) * l * n * q - i(48) * l * q2 - i(54) * m3 + i(18) * m2 * q - i(24) * m * n2
            + i(6) * m * q2,
        c: i(288) * l2 * n - i(108) * l * m2 + i(72) * l * m * q + i(48) * l * n2 - i(48) * l * q2
            + i(54) * m3
            + i(18) * m2 * n
            - i(54) * m2 * q
            + i(12) * m * n * q
            + i(6) * m * q2
            - i(24) * n3
            + i(6) * n * q2,
        d: i(432) * l * m2 + i(288) * l * m * n - i(96) * l * n * q - i(48) * l * q2 - i(108) * m3 - i(72) * m2 * n
            + i(96) * m * n * q
            - i(24) * m * q2
            - i(24) * n2 * q
            + i(6) * q3,
        e: i(288) * l2 * q + i(288) * l * m * n - i(288) * l * m * q + i(72) * m2 * n + i(36) * m2 * q
            - i(48) * m * n2
            - i(24) * m * q2
            - i(24) * n2 * q
            + i(24) * n * q2,
        f: i(864) * l2 * m + i(432) * l * m2 - i(144) * l * m * n - i(144) * l * n * q + i(108) * m3 + i(72) * m2 * n
            - i(36) * m2 * q
            + i(48) * m * n2
            - i(96) * m * n * q
            - i(24) * m * q2
            + i(24) * n2 * q
            + i(12) * q3,
        g: i(1728) * l2 * l + i(648) * l * m2 - i(432) * l * n2 + i(540) * m3 - i(162) * m2 * q - i(216) * m * n * q
            + i(144) * n3
            + i(18) * q3,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NecessaryConditions3D {
    pub l_positive: bool,
    /// `(3m^2 - 4ln) / 2l`; absent when `l = 0`.
    pub q_lower: Option<f64>,
    pub q_upper: f64,
    pub q_in_range: bool,
    /// The two-variable criterion on `(l, m, n)`.
    pub planar: PdCheck,
    pub all_hold: bool,
}

pub fn necessary_conditions_3d(c: &CoefficientSet3D) -> NecessaryConditions3D {
    let CoefficientSet3D { l, m, n, q } = *c;
    let l_positive = l > 0.0;
    let q_lower = (l != 0.0).then(|| (3.0 * m * m - 4.0 * l * n) / (2.0 * l));
    let q_upper = 2.0 * n;
    let q_in_range = l_positive && q_lower.is_some_and(|lo| lo < q) && q < q_upper;
    let planar = is_positive_definite(&c.planar());
    NecessaryConditions3D {
        l_positive,
        q_lower,
        q_upper,
        q_in_range,
        all_hold: l_positive && q_in_range && planar.positive_definite,
        planar,
    }
}

pub const MIN_SAMPLES_3D: usize = 100;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MinorMinimum {
    /// 1, 2 or 3.
    pub order: usize,
    pub value: f64,
    pub direction: [f64; 3],
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NumericPd3D {
    /// Non-certifying: all three leading minors were positive at every sampled direction.
    pub pd_evidence: bool,
    pub directions: usize,
    pub minima: [MinorMinimum; 3],
    /// Lowest-order minor that is not positive somewhere.
    pub failing: Option<MinorMinimum>,
}

/// Samples the leading minors over Fibonacci-lattice directions plus the 13 axis and
/// diagonal directions, then polishes each minimum with a compass search on the sphere.
pub fn numeric_pd_check_3d(c: &CoefficientSet3D, samples: usize) -> Result<NumericPd3D> {
    if samples < MIN_SAMPLES_3D {
        return Err(Error::Precondition(format!("need at least {MIN_SAMPLES_3D} samples, got {samples}")));
    }
    let dirs = sphere_directions(samples);
    let values: Vec<[f64; 3]> = dirs.par_iter().map(|&y| leading_minors(&hessian3d(c, y))).collect();

    let mut minima = [0, 1, 2].map(|order| {
        let (idx, v) = values
            .iter()
            .enumerate()
            .map(|(i, v)| (i, v[order]))
            .min_by(|a, b| a.1.total_cmp(&b.1).then(a.0.cmp(&b.0)))
            .expect("at least one direction");
        let minor = |y: [f64; 3]| leading_minors(&hessian3d(c, y))[order];
        let (direction, value) = compass_polish(&minor, dirs[idx], v);
        MinorMinimum { order: order + 1, value, direction }
    });

    // A_11 is a quadratic form, so its minimum on the sphere is an eigenvalue.
    let b = base_matrix(c);
    let eig = SymmetricEigen::new(Matrix3::from_fn(|i, j| b[i][j]));
    let (imin, lambda) =
        eig.eigenvalues.iter().copied().enumerate().min_by(|a, b| a.1.total_cmp(&b.1)).expect("three eigenvalues");
    if lambda < minima[0].value {
        let v = eig.eigenvectors.column(imin);
        minima[0] = MinorMinimum { order: 1, value: lambda, direction: [v[0], v[1], v[2]] };
    }

    let failing = minima.iter().find(|m| !(m.value > 0.0)).copied();
    Ok(NumericPd3D { pd_evidence: failing.is_none(), directions: dirs.len(), minima, failing })
}
