//! Local one- and two-parameter minimisers used to polish sampled minima.

/// Golden-section search on `[a, b]`; returns the abscissa of the smaller end value.
pub(crate) fn golden_min(f: &dyn Fn(f64) -> f64, mut a: f64, mut b: f64, iters: usize) -> f64 {
    let inv_phi = 0.5 * (5f64.sqrt() - 1.0);
    let mut x1 = b - inv_phi * (b - a);
    let mut x2 = a + inv_phi * (b - a);
    let (mut f1, mut f2) = (f(x1), f(x2));
    for _ in 0..iters {
        if f1 <= f2 {
            b = x2;
            (x2, f2) = (x1, f1);
            x1 = b - inv_phi * (b - a);
            f1 = f(x1);
        } else {
            a = x1;
            (x1, f1) = (x2, f2);
            x2 = a + inv_phi * (b - a);
            f2 = f(x2);
        }
    }
    if f1 <= f2 {
        x1
    } else {
        x2
    }
}

/// Compass search on the unit sphere: coordinate moves followed by renormalisation,
/// halving the step whenever no move improves.
pub(crate) fn compass_polish(f: &dyn Fn([f64; 3]) -> f64, start: [f64; 3], value: f64) -> ([f64; 3], f64) {
    let (mut y, mut best) = (start, value);
    let mut step = 0.05;
    while step > 1e-9 {
        let mut improved = false;
        for axis in 0..3 {
            for sign in [1.0, -1.0] {
                let mut t = y;
                t[axis] += sign * step;
                let r = (t[0] * t[0] + t[1] * t[1] + t[2] * t[2]).sqrt();
                let t = [t[0] / r, t[1] / r, t[2] / r];
                let v = f(t);
                if v < best {
                    (y, best, improved) = (t, v, true);
                }
            }
        }
        if !improved {
            step *= 0.5;
        }
    }
    (y, best)
}
