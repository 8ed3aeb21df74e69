//! Positive definiteness and curvature of fourth-root metrics with symmetric
//! quartic coefficient forms.

// `!(x > 0.0)` is used on purpose so NaN fails the test; tensor code reads best with index loops.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod error;
pub mod exprfield;
pub mod grid;
pub mod oracle;
pub mod pd2d;
pub mod pd3d;
pub mod riemann;
mod search;
pub mod sympoly;

pub use error::{Error, Result};
pub use exprfield::ScalarField;
pub use grid::Region;
pub use oracle::{DirectionSampler, HarnessConfig, HarnessReport};
pub use pd2d::{Classification2D, NBounds, Verdict2D};
pub use pd3d::NumericPd3D;
pub use riemann::{Branch, CurvatureData, DerivativeMode, SymmetricSecondRoot};
pub use sympoly::{CharPolyCoeffs2D, CharPolyCoeffs3D, CoefficientSet2D, CoefficientSet3D, DensePolynomial, Rational};
