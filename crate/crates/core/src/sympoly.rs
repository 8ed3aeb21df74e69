//! Symmetric polynomial plumbing.
//!
//! A locally symmetric fourth-root metric is a symmetric quartic form in the
//! fiber coordinates. It can be written either in the elementary symmetric
//! polynomials `s1, s2, s3` (the characteristic basis, coefficients `a, b, c, d`)
//! or in monomial orbit sums (coefficients `l, m, n, q`). The two bases are
//! related by a unit lower-triangular integer matrix, so the transforms here
//! are generic over [`Scalar`] and round-trip exactly in integer or rational
//! arithmetic.

use std::collections::BTreeMap;
use std::fmt::Debug;

use itertools::Itertools;
use nalgebra::DMatrix;
use num_rational::Ratio;
use num_traits::Num;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Exact rational scalar for the linear basis transforms.
pub type Rational = Ratio<i64>;

/// Numeric types the algebraic (square-root free) formulas are evaluated in.
pub trait Scalar: Num + Copy + PartialOrd + Debug {
    fn from_int(k: i64) -> Self;
}

impl Scalar for f64 {
    fn from_int(k: i64) -> Self {
        k as f64
    }
}

impl Scalar for i64 {
    fn from_int(k: i64) -> Self {
        k
    }
}

impl Scalar for i128 {
    fn from_int(k: i64) -> Self {
        k as i128
    }
}

impl Scalar for Rational {
    fn from_int(k: i64) -> Self {
        Ratio::from_integer(k)
    }
}

#[inline]
pub(crate) fn k<T: Scalar>(v: i64) -> T {
    T::from_int(v)
}

/// Coefficients of `a s1^4 + b s1^2 s2 + c s2^2` in two variables.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CharPolyCoeffs2D<T = f64> {
    pub a: T,
    pub b: T,
    pub c: T,
}

/// Coefficients of `a s1^4 + b s1^2 s2 + c s2^2 + d s1 s3` in three variables.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CharPolyCoeffs3D<T = f64> {
    pub a: T,
    pub b: T,
    pub c: T,
    pub d: T,
}

/// Monomial orbit coefficients of a symmetric binary quartic:
/// `A = l (y1^4 + y2^4) + m (y1^3 y2 + y1 y2^3) + n y1^2 y2^2`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CoefficientSet2D<T = f64> {
    pub l: T,
    pub m: T,
    pub n: T,
}

/// Monomial orbit coefficients of a symmetric ternary quartic:
/// `l Σ y_i^4 + m Σ y_i^3 y_j + n Σ y_i^2 y_j^2 + q Σ y_i^2 y_j y_k`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CoefficientSet3D<T = f64> {
    pub l: T,
    pub m: T,
    pub n: T,
    pub q: T,
}

impl<T: Scalar> CoefficientSet2D<T> {
    pub fn new(l: T, m: T, n: T) -> Self {
        Self { l, m, n }
    }

    /// `A(y)` evaluated directly from the orbit form.
    pub fn eval(&self, y: [T; 2]) -> T {
        let [y1, y2] = y;
        let (s2, p) = (y1 * y1, y2 * y2);
        self.l * (s2 * s2 + p * p) + self.m * (s2 * y1 * y2 + y1 * y2 * p) + self.n * s2 * p
    }

    pub fn scaled(&self, t: T) -> Self {
        Self::new(self.l * t, self.m * t, self.n * t)
    }
}

impl<T: Scalar> CoefficientSet3D<T> {
    pub fn new(l: T, m: T, n: T, q: T) -> Self {
        Self { l, m, n, q }
    }

    /// The `(l, m, n)` part, i.e. the restriction to the plane `y3 = 0`.
    pub fn planar(&self) -> CoefficientSet2D<T> {
        CoefficientSet2D::new(self.l, self.m, self.n)
    }

    pub fn eval(&self, y: [T; 3]) -> T {
        let [y1, y2, y3] = y;
        let quartic = y1 * y1 * y1 * y1 + y2 * y2 * y2 * y2 + y3 * y3 * y3 * y3;
        let cubic_linear = y1 * y1 * y1 * (y2 + y3) + y2 * y2 * y2 * (y1 + y3) + y3 * y3 * y3 * (y1 + y2);
        let squares = y1 * y1 * y2 * y2 + y1 * y1 * y3 * y3 + y2 * y2 * y3 * y3;
        let mixed = y1 * y2 * y3 * (y1 + y2 + y3);
        self.l * quartic + self.m * cubic_linear + self.n * squares + self.q * mixed
    }
}

impl CoefficientSet2D<f64> {
    /// Dense monomial expansion of the orbit form.
    pub fn to_dense(&self) -> DensePolynomial {
        orbit_sum(&[4, 0])
            .scale(self.l)
            .add(&orbit_sum(&[3, 1]).scale(self.m))
            .and_then(|p| p.add(&orbit_sum(&[2, 2]).scale(self.n)))
            .expect("orbit sums share dimension and degree")
    }
}

impl CoefficientSet3D<f64> {
    pub fn to_dense(&self) -> DensePolynomial {
        [([4, 0, 0], self.l), ([3, 1, 0], self.m), ([2, 2, 0], self.n), ([2, 1, 1], self.q)]
            .iter()
            .map(|(rep, c)| orbit_sum(rep).scale(*c))
            .reduce(|acc, p| acc.add(&p).expect("orbit sums share dimension and degree"))
            .expect("non-empty")
    }
}

/// `(l, m, n) = (a, 4a + b, 6a + 2b + c)`.
pub fn charpoly_to_monomial_2d<T: Scalar>(c: CharPolyCoeffs2D<T>) -> CoefficientSet2D<T> {
    CoefficientSet2D { l: c.a, m: k::<T>(4) * c.a + c.b, n: k::<T>(6) * c.a + k::<T>(2) * c.b + c.c }
}

/// Inverse of [`charpoly_to_monomial_2d`] by forward substitution.
pub fn monomial_to_charpoly_2d<T: Scalar>(c: CoefficientSet2D<T>) -> CharPolyCoeffs2D<T> {
    let a = c.l;
    let b = c.m - k::<T>(4) * a;
    let cc = c.n - k::<T>(6) * a - k::<T>(2) * b;
    CharPolyCoeffs2D { a, b, c: cc }
}

/// `(l, m, n, q) = (a, 4a + b, 6a + 2b + c, 12a + 5b + 2c + d)`.
pub fn charpoly_to_monomial_3d<T: Scalar>(c: CharPolyCoeffs3D<T>) -> CoefficientSet3D<T> {
    CoefficientSet3D {
        l: c.a,
        m: k::<T>(4) * c.a + c.b,
        n: k::<T>(6) * c.a + k::<T>(2) * c.b + c.c,
        q: k::<T>(12) * c.a + k::<T>(5) * c.b + k::<T>(2) * c.c + c.d,
    }
}

pub fn monomial_to_charpoly_3d<T: Scalar>(c: CoefficientSet3D<T>) -> CharPolyCoeffs3D<T> {
    let a = c.l;
    let b = c.m - k::<T>(4) * a;
    let cc = c.n - k::<T>(6) * a - k::<T>(2) * b;
    let d = c.q - k::<T>(12) * a - k::<T>(5) * b - k::<T>(2) * cc;
    CharPolyCoeffs3D { a, b, c: cc, d }
}

/// Elementary symmetric values `(s1, ..., sn)` of `y`.
pub fn elementary_symmetric(y: &[f64]) -> Result<Vec<f64>> {
    if y.is_empty() {
        return Err(Error::InvalidInput("elementary symmetric polynomials of an empty tuple".into()));
    }
    // e[k] holds the k-th elementary symmetric value of the prefix seen so far.
    let mut e = vec![0.0; y.len() + 1];
    e[0] = 1.0;
    for (i, &yi) in y.iter().enumerate() {
        for k in (1..=i + 1).rev() {
            e[k] += yi * e[k - 1];
        }
    }
    Ok(e.split_off(1))
}

/// A homogeneous real polynomial stored as a sorted map from exponent
/// multi-index to coefficient.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DensePolynomial {
    dimension: usize,
    degree: u32,
    terms: BTreeMap<Vec<u32>, f64>,
}

impl DensePolynomial {
    pub fn zero(dimension: usize, degree: u32) -> Result<Self> {
        if dimension == 0 {
            return Err(Error::InvalidInput("polynomial dimension must be positive".into()));
        }
        Ok(Self { dimension, degree, terms: BTreeMap::new() })
    }

    /// Builds a polynomial from `(exponents, coefficient)` pairs. Repeated
    /// exponents accumulate; exact zeros are dropped.
    pub fn from_terms<I>(dimension: usize, degree: u32, terms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (Vec<u32>, f64)>,
    {
        let mut p = Self::zero(dimension, degree)?;
        for (exps, c) in terms {
            if exps.len() != dimension {
                return Err(Error::InvalidInput(format!(
                    "multi-index {exps:?} has length {} but the dimension is {dimension}",
                    exps.len()
                )));
            }
            if exps.iter().sum::<u32>() != degree {
                return Err(Error::InvalidInput(format!("multi-index {exps:?} does not sum to {degree}")));
            }
            p.accumulate(exps, c);
        }
        Ok(p)
    }

    fn accumulate(&mut self, exps: Vec<u32>, c: f64) {
        use std::collections::btree_map::Entry;
        match self.terms.entry(exps) {
            Entry::Vacant(slot) => {
                if c != 0.0 {
                    slot.insert(c);
                }
            }
            Entry::Occupied(mut slot) => {
                *slot.get_mut() += c;
                if *slot.get() == 0.0 {
                    slot.remove();
                }
            }
        }
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn degree(&self) -> u32 {
        self.degree
    }

    pub fn terms(&self) -> impl Iterator<Item = (&[u32], f64)> + '_ {
        self.terms.iter().map(|(e, c)| (e.as_slice(), *c))
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coefficient(&self, exps: &[u32]) -> f64 {
        self.terms.get(exps).copied().unwrap_or(0.0)
    }

    pub fn eval(&self, y: &[f64]) -> f64 {
        assert_eq!(y.len(), self.dimension, "point dimension mismatch");
        self.terms.iter().map(|(e, c)| c * e.iter().zip(y).map(|(&k, &v)| v.powi(k as i32)).product::<f64>()).sum()
    }

    pub fn scale(&self, factor: f64) -> Self {
        let terms = self.terms.iter().map(|(e, c)| (e.clone(), c * factor)).filter(|(_, c)| *c != 0.0).collect();
        Self { terms, ..*self }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        if self.dimension != other.dimension || self.degree != other.degree {
            return Err(Error::InvalidInput(format!(
                "cannot add degree-{} polynomial in {} variables to degree-{} polynomial in {}",
                self.degree, self.dimension, other.degree, other.dimension
            )));
        }
        let mut out = self.clone();
        for (e, c) in &other.terms {
            out.accumulate(e.clone(), *c);
        }
        Ok(out)
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        if self.dimension != other.dimension {
            return Err(Error::InvalidInput("cannot multiply polynomials of different dimensions".into()));
        }
        let mut out = Self::zero(self.dimension, self.degree + other.degree)?;
        for ((e1, c1), (e2, c2)) in self.terms.iter().cartesian_product(other.terms.iter()) {
            let exps = e1.iter().zip(e2).map(|(a, b)| a + b).collect();
            out.accumulate(exps, c1 * c2);
        }
        Ok(out)
    }

    /// `p ∘ σ`, i.e. `y ↦ p(y_σ(1), ..., y_σ(n))`.
    pub fn permuted(&self, sigma: &[usize]) -> Self {
        assert_eq!(sigma.len(), self.dimension);
        let mut out = Self { dimension: self.dimension, degree: self.degree, terms: BTreeMap::new() };
        for (e, c) in &self.terms {
            let mut moved = vec![0; self.dimension];
            for (i, &ei) in e.iter().enumerate() {
                moved[sigma[i]] = ei;
            }
            out.accumulate(moved, *c);
        }
        out
    }

    /// Largest coefficient difference between `self` and `other`.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.terms
            .keys()
            .chain(other.terms.keys())
            .map(|e| (self.coefficient(e) - other.coefficient(e)).abs())
            .fold(0.0, f64::max)
    }

    pub fn is_symmetric(&self, tol: f64) -> bool {
        (0..self.dimension).permutations(self.dimension).all(|sigma| self.permuted(&sigma).max_abs_diff(self) <= tol)
    }

    pub fn gradient(&self, y: &[f64]) -> Vec<f64> {
        assert_eq!(y.len(), self.dimension, "point dimension mismatch");
        let mut g = vec![0.0; self.dimension];
        for (e, c) in &self.terms {
            for i in 0..self.dimension {
                if e[i] == 0 {
                    continue;
                }
                let mut term = c * e[i] as f64;
                for (j, (&k, &v)) in e.iter().zip(y).enumerate() {
                    let k = if j == i { k - 1 } else { k };
                    term *= v.powi(k as i32);
                }
                g[i] += term;
            }
        }
        g
    }

    /// Hessian by term-wise differentiation of the monomials.
    pub fn hessian(&self, y: &[f64]) -> DMatrix<f64> {
        assert_eq!(y.len(), self.dimension, "point dimension mismatch");
        let n = self.dimension;
        let mut h = DMatrix::zeros(n, n);
        let mut lowered = vec![0u32; n];
        for (e, c) in &self.terms {
            for i in 0..n {
                for j in i..n {
                    lowered.copy_from_slice(e);
                    let mut factor = *c;
                    for idx in [i, j] {
                        if lowered[idx] == 0 {
                            factor = 0.0;
                            break;
                        }
                        factor *= lowered[idx] as f64;
                        lowered[idx] -= 1;
                    }
                    if factor == 0.0 {
                        continue;
                    }
                    let v = factor * lowered.iter().zip(y).map(|(&k, &v)| v.powi(k as i32)).product::<f64>();
                    h[(i, j)] += v;
                    if i != j {
                        h[(j, i)] += v;
                    }
                }
            }
        }
        h
    }
}

/// Sum of all distinct monomials whose exponent vector is a permutation of `rep`.
pub fn orbit_sum(rep: &[u32]) -> DensePolynomial {
    let n = rep.len();
    let degree = rep.iter().sum();
    let monomials: std::collections::BTreeSet<Vec<u32>> =
        (0..n).permutations(n).map(|sigma| sigma.iter().map(|&i| rep[i]).collect()).collect();
    DensePolynomial::from_terms(n, degree, monomials.into_iter().map(|e| (e, 1.0))).expect("valid orbit")
}

/// The elementary symmetric polynomial `s_k` in `n` variables.
pub fn elementary_symmetric_polynomial(n: usize, k: usize) -> Result<DensePolynomial> {
    if n == 0 || k > n {
        return Err(Error::InvalidInput(format!("s_{k} is not defined in {n} variables")));
    }
    let terms = (0..n).combinations(k).map(|subset| {
        let mut e = vec![0; n];
        for i in subset {
            e[i] = 1;
        }
        (e, 1.0)
    });
    DensePolynomial::from_terms(n, k as u32, terms)
}

/// Largest dimension for which [`symmetrize`] enumerates permutations.
pub const MAX_SYMMETRIZE_DIMENSION: usize = 6;

/// Averages `p` over all coordinate permutations.
pub fn symmetrize(p: &DensePolynomial) -> Result<DensePolynomial> {
    let n = p.dimension();
    if n > MAX_SYMMETRIZE_DIMENSION {
        return Err(Error::InvalidInput(format!(
            "symmetrization enumerates n! permutations and supports n <= {MAX_SYMMETRIZE_DIMENSION}, got {n}"
        )));
    }
    let mut count = 0usize;
    let mut acc = DensePolynomial::zero(n, p.degree())?;
    for sigma in (0..n).permutations(n) {
        acc = acc.add(&p.permuted(&sigma))?;
        count += 1;
    }
    Ok(acc.scale(1.0 / count as f64))
}

/// A characteristic polynomial in two or three variables.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum CharPoly {
    TwoD(CharPolyCoeffs2D),
    ThreeD(CharPolyCoeffs3D),
}

/// Dense monomial expansion of a characteristic polynomial in `n` variables.
///
/// The two-variable form `a s1^4 + b s1^2 s2 + c s2^2` is meaningful for
/// `n ∈ {2, 3}`; the form with an `s1 s3` term needs `n = 3`.
pub fn expand_charpoly(c: &CharPoly, n: usize) -> Result<DensePolynomial> {
    if !(2..=3).contains(&n) {
        return Err(Error::UnsupportedDimension(n));
    }
    let (a, b, cc, d) = match *c {
        CharPoly::TwoD(c) => (c.a, c.b, c.c, 0.0),
        CharPoly::ThreeD(c) => {
            if n != 3 {
                return Err(Error::UnsupportedDimension(n));
            }
            (c.a, c.b, c.c, c.d)
        }
    };
    let s1 = elementary_symmetric_polynomial(n, 1)?;
    let s2 = elementary_symmetric_polynomial(n, 2)?;
    let s1_sq = s1.mul(&s1)?;
    let mut out = s1_sq.mul(&s1_sq)?.scale(a);
    out = out.add(&s1_sq.mul(&s2)?.scale(b))?;
    out = out.add(&s2.mul(&s2)?.scale(cc))?;
    if n == 3 {
        let s3 = elementary_symmetric_polynomial(n, 3)?;
        out = out.add(&s1.mul(&s3)?.scale(d))?;
    }
    Ok(out)
}
