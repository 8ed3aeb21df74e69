//! Directions where a leading minor of the Hessian fails to be positive.

use serde::Serialize;

use super::{definiteness_polynomial, det_hessian_coeffs};
use crate::search::golden_min;
use crate::sympoly::CoefficientSet2D;

const SCAN_STEPS: usize = 360;
const REFINE_ITERS: usize = 80;
const MAX_HEIGHT: i64 = 12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Minor2D {
    /// `A_11`.
    LeadingEntry,
    /// `det A_ij`.
    Determinant,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Witness2D {
    pub minor: Minor2D,
    /// Unit direction.
    pub direction: [f64; 2],
    /// The minor at `direction`; never positive.
    pub value: f64,
    /// Smallest-height primitive integer direction where the minor is not positive, if one
    /// exists up to height 12.
    pub integer_direction: Option<[i64; 2]>,
    pub integer_value: Option<f64>,
}

/// Searches for a direction where `A_11 <= 0` or `det A_ij <= 0`.
///
/// `A_11` is a quadratic form, so its minimum on the circle is an eigenvalue. The
/// determinant is scanned on a half circle, refined by golden section, and as a
/// last resort minimised exactly through the definiteness polynomial.
pub fn find_witness(c: &CoefficientSet2D) -> Option<Witness2D> {
    let CoefficientSet2D { l, m, n } = *c;
    if !(l.is_finite() && m.is_finite() && n.is_finite()) {
        return None;
    }
    let a11 = |y: [f64; 2]| 12.0 * l * y[0] * y[0] + 6.0 * m * y[0] * y[1] + 2.0 * n * y[1] * y[1];
    let (lambda, v) = min_eigen_2x2(12.0 * l, 3.0 * m, 2.0 * n);
    if lambda <= 0.0 {
        return Some(build(Minor2D::LeadingEntry, v, a11(v).min(lambda), &a11, 2));
    }

    let form = det_hessian_coeffs(c);
    let det = |y: [f64; 2]| form.eval(y);
    let on_circle = |theta: f64| det([theta.cos(), theta.sin()]);
    let step = std::f64::consts::PI / SCAN_STEPS as f64;
    let (k_min, _) = (0..SCAN_STEPS)
        .map(|k| (k, on_circle(k as f64 * step)))
        .min_by(|a, b| a.1.total_cmp(&b.1))
        .expect("scan is non-empty");
    let centre = k_min as f64 * step;
    let theta = golden_min(&on_circle, centre - step, centre + step, REFINE_ITERS);
    let (mut theta, mut value) = (theta, on_circle(theta));
    if on_circle(centre) < value {
        (theta, value) = (centre, on_circle(centre));
    }
    let mut direction = [theta.cos(), theta.sin()];

    if value > 0.0 {
        let y = analytic_direction(c)?;
        let v = det(y);
        if v > 0.0 {
            return None;
        }
        (direction, value) = (y, v);
    }
    Some(build(Minor2D::Determinant, direction, value, &det, 4))
}

fn build(minor: Minor2D, direction: [f64; 2], value: f64, f: &dyn Fn([f64; 2]) -> f64, degree: i32) -> Witness2D {
    let integer = integer_direction(f, degree);
    Witness2D {
        minor,
        direction,
        value,
        integer_direction: integer.map(|(d, _)| d),
        integer_value: integer.map(|(_, v)| v),
    }
}

/// Lowest height first, then the most negative value on the unit circle, then lexicographic.
fn integer_direction(f: &dyn Fn([f64; 2]) -> f64, degree: i32) -> Option<([i64; 2], f64)> {
    for h in 1..=MAX_HEIGHT {
        let best = (-h..=h)
            .flat_map(|a| (-h..=h).map(move |b| [a, b]))
            .filter(|&[a, b]| a.abs().max(b.abs()) == h && (a > 0 || (a == 0 && b > 0)) && gcd(a, b) == 1)
            .filter_map(|d| {
                let v = f([d[0] as f64, d[1] as f64]);
                let norm2 = (d[0] * d[0] + d[1] * d[1]) as f64;
                (v <= 0.0).then_some((d, v, v / norm2.powi(degree / 2)))
            })
            .min_by(|x, y| x.2.total_cmp(&y.2).then(x.0.cmp(&y.0)));
        if let Some((d, v, _)) = best {
            return Some((d, v));
        }
    }
    None
}

fn gcd(a: i64, b: i64) -> i64 {
    let (mut a, mut b) = (a.abs(), b.abs());
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// Smallest eigenvalue and a unit eigenvector of `[[a, b], [b, d]]`.
fn min_eigen_2x2(a: f64, b: f64, d: f64) -> (f64, [f64; 2]) {
    let mean = 0.5 * (a + d);
    let radius = (0.5 * (a - d)).hypot(b);
    let lambda = mean - radius;
    let v = if b == 0.0 {
        if a <= d {
            [1.0, 0.0]
        } else {
            [0.0, 1.0]
        }
    } else if a - lambda >= d - lambda {
        [-b, a - lambda]
    } else {
        [d - lambda, -b]
    };
    let norm = v[0].hypot(v[1]);
    (lambda, [v[0] / norm, v[1] / norm])
}

/// Minimum of `P(z)` over the attainable range `|z| >= 2`, mapped back to a unit direction.
fn analytic_direction(c: &CoefficientSet2D) -> Option<[f64; 2]> {
    let p = definiteness_polynomial(c);
    let mut candidates = vec![2.0, -2.0];
    if p.alpha > 0.0 {
        let vertex = -p.beta / (2.0 * p.alpha);
        if vertex.abs() >= 2.0 {
            candidates.push(vertex);
        }
    }
    let z = candidates.into_iter().min_by(|a, b| p.eval(*a).total_cmp(&p.eval(*b)))?;
    if p.eval(z) > 0.0 {
        return None;
    }
    let t = 0.5 * (z + z.signum() * (z * z - 4.0).max(0.0).sqrt());
    let norm = t.hypot(1.0);
    Some([t / norm, 1.0 / norm])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn eigen_2x2() {
        let (lambda, v) = min_eigen_2x2(2.0, 1.0, 2.0);
        assert!((lambda - 1.0).abs() < 1e-15);
        assert!((v[0] + v[1]).abs() < 1e-15);
        assert_eq!(min_eigen_2x2(3.0, 0.0, -1.0), (-1.0, [0.0, 1.0]));
    }

    #[test]
    fn leading_entry_witness() {
        // 8ln < 3m^2 so A_11 fails somewhere.
        let w = find_witness(&CoefficientSet2D::new(1.0, 3.0, 1.0)).unwrap();
        assert_eq!(w.minor, Minor2D::LeadingEntry);
        assert!(w.value < 0.0);
        let [a, b] = w.integer_direction.unwrap();
        assert!(12.0 * (a * a) as f64 + 18.0 * (a * b) as f64 + 2.0 * (b * b) as f64 <= 0.0);
    }

    #[test]
    fn boundary_point_gets_a_zero_witness() {
        let w = find_witness(&CoefficientSet2D::new(1.0, 0.0, 6.0)).unwrap();
        assert_eq!(w.minor, Minor2D::Determinant);
        assert!(w.value <= 0.0);
        assert_eq!(w.integer_direction, Some([1, -1]));
        assert_eq!(w.integer_value, Some(0.0));
    }

    #[test]
    fn pd_input_has_no_witness() {
        assert!(find_witness(&CoefficientSet2D::new(1.0, 2.0, 3.0)).is_none());
        assert!(find_witness(&CoefficientSet2D::new(1.0, 0.0, 4.0)).is_none());
    }

    #[test]
    fn refined_minimum_beats_the_grid() {
        let c = CoefficientSet2D::new(4.0, 6.0, 5.0);
        let w = find_witness(&c).unwrap();
        let form = det_hessian_coeffs(&c);
        for k in 0..720 {
            let t = k as f64 * std::f64::consts::PI / 720.0;
            assert!(w.value <= form.eval([t.cos(), t.sin()]) + 1e-9);
        }
    }
}
