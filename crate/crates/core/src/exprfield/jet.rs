//! Second-order jets along two seed directions.
//!
//! A [`Jet`] carries `(f, ∂a f, ∂b f, ∂a∂b f)`. Evaluating an expression tree
//! over jets applies the chain rule node by node, which gives the first and
//! mixed second partials of a field exactly (up to rounding) without any step
//! size.

use std::ops::{Add, Div, Mul, Neg, Sub};

use super::Func;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Jet {
    pub value: f64,
    pub da: f64,
    pub db: f64,
    pub dab: f64,
}

impl Jet {
    pub fn constant(value: f64) -> Self {
        Self { value, da: 0.0, db: 0.0, dab: 0.0 }
    }

    /// Applies a scalar function given its value and first two derivatives at `self.value`.
    fn chain(self, f: f64, df: f64, d2f: f64) -> Self {
        Self { value: f, da: df * self.da, db: df * self.db, dab: d2f * self.da * self.db + df * self.dab }
    }

    pub fn powi(self, k: i32) -> Self {
        match k {
            0 => Jet::constant(1.0),
            1 => self,
            _ => {
                let v = self.value;
                let kf = k as f64;
                self.chain(v.powi(k), kf * v.powi(k - 1), kf * (kf - 1.0) * v.powi(k - 2))
            }
        }
    }

    pub fn apply(self, func: Func) -> Self {
        let v = self.value;
        match func {
            Func::Sin => self.chain(v.sin(), v.cos(), -v.sin()),
            Func::Cos => self.chain(v.cos(), -v.sin(), -v.cos()),
            Func::Tan => {
                let t = v.tan();
                let sec2 = 1.0 + t * t;
                self.chain(t, sec2, 2.0 * t * sec2)
            }
            Func::Tanh => {
                let t = v.tanh();
                let sech2 = 1.0 - t * t;
                self.chain(t, sech2, -2.0 * t * sech2)
            }
            Func::Sqrt => {
                let r = v.sqrt();
                self.chain(r, 0.5 / r, -0.25 / (r * v))
            }
            Func::Exp => {
                let e = v.exp();
                self.chain(e, e, e)
            }
            Func::Abs => self.chain(v.abs(), v.signum(), 0.0),
        }
    }

    fn recip(self) -> Self {
        let v = self.value;
        self.chain(1.0 / v, -1.0 / (v * v), 2.0 / (v * v * v))
    }
}

impl Add for Jet {
    type Output = Jet;
    fn add(self, o: Jet) -> Jet {
        Jet { value: self.value + o.value, da: self.da + o.da, db: self.db + o.db, dab: self.dab + o.dab }
    }
}

impl Sub for Jet {
    type Output = Jet;
    fn sub(self, o: Jet) -> Jet {
        Jet { value: self.value - o.value, da: self.da - o.da, db: self.db - o.db, dab: self.dab - o.dab }
    }
}

impl Neg for Jet {
    type Output = Jet;
    fn neg(self) -> Jet {
        Jet { value: -self.value, da: -self.da, db: -self.db, dab: -self.dab }
    }
}

impl Mul for Jet {
    type Output = Jet;
    fn mul(self, o: Jet) -> Jet {
        Jet {
            value: self.value * o.value,
            da: self.da * o.value + self.value * o.da,
            db: self.db * o.value + self.value * o.db,
            dab: self.dab * o.value + self.da * o.db + self.db * o.da + self.value * o.dab,
        }
    }
}

impl Div for Jet {
    type Output = Jet;
    #[allow(clippy::suspicious_arithmetic_impl)]
    fn div(self, o: Jet) -> Jet {
        self * o.recip()
    }
}
