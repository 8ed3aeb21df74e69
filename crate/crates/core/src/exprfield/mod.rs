//! Position-dependent scalar fields given as expressions in `x1, x2, x3`.
//!
//! Fields are parsed once into an [`Expr`] tree and evaluated many times.
//! Besides plain evaluation the module offers central finite differences and
//! jet evaluation ([`ScalarField::jet`]), which propagates first and mixed
//! second partials through the tree by the chain rule.

mod jet;
mod parser;

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

pub use jet::Jet;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Func {
    Sin,
    Cos,
    Tan,
    Tanh,
    Sqrt,
    Exp,
    Abs,
}

impl Func {
    pub const ALL: [Func; 7] = [Func::Sin, Func::Cos, Func::Tan, Func::Tanh, Func::Sqrt, Func::Exp, Func::Abs];

    pub fn name(self) -> &'static str {
        match self {
            Func::Sin => "sin",
            Func::Cos => "cos",
            Func::Tan => "tan",
            Func::Tanh => "tanh",
            Func::Sqrt => "sqrt",
            Func::Exp => "exp",
            Func::Abs => "abs",
        }
    }

    pub fn from_name(name: &str) -> Option<Func> {
        Func::ALL.into_iter().find(|f| f.name() == name)
    }

    pub fn apply(self, v: f64) -> f64 {
        match self {
            Func::Sin => v.sin(),
            Func::Cos => v.cos(),
            Func::Tan => v.tan(),
            Func::Tanh => v.tanh(),
            Func::Sqrt => v.sqrt(),
            Func::Exp => v.exp(),
            Func::Abs => v.abs(),
        }
    }
}

/// Expression tree. Variables are zero-based: `Var(0)` is `x1`.
#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Num(f64),
    Var(usize),
    Neg(Box<Expr>),
    Binary(BinOp, Box<Expr>, Box<Expr>),
    Pow(Box<Expr>, i32),
    Call(Func, Box<Expr>),
}

impl Expr {
    /// Value of a variable-free subtree.
    pub fn constant_value(&self) -> Option<f64> {
        Some(match self {
            Expr::Num(v) => *v,
            Expr::Var(_) => return None,
            Expr::Neg(e) => -e.constant_value()?,
            Expr::Binary(op, a, b) => binary(*op, a.constant_value()?, b.constant_value()?),
            Expr::Pow(b, k) => b.constant_value()?.powi(*k),
            Expr::Call(f, a) => f.apply(a.constant_value()?),
        })
    }

    fn collect_vars(&self, out: &mut BTreeSet<usize>) {
        match self {
            Expr::Num(_) => {}
            Expr::Var(i) => {
                out.insert(*i);
            }
            Expr::Neg(e) | Expr::Pow(e, _) | Expr::Call(_, e) => e.collect_vars(out),
            Expr::Binary(_, a, b) => {
                a.collect_vars(out);
                b.collect_vars(out);
            }
        }
    }

    fn eval(&self, x: &[f64]) -> f64 {
        match self {
            Expr::Num(v) => *v,
            Expr::Var(i) => x[*i],
            Expr::Neg(e) => -e.eval(x),
            Expr::Binary(op, a, b) => binary(*op, a.eval(x), b.eval(x)),
            Expr::Pow(b, k) => b.eval(x).powi(*k),
            Expr::Call(f, a) => f.apply(a.eval(x)),
        }
    }

    fn eval_jet(&self, x: &[Jet]) -> Jet {
        match self {
            Expr::Num(v) => Jet::constant(*v),
            Expr::Var(i) => x[*i],
            Expr::Neg(e) => -e.eval_jet(x),
            Expr::Binary(op, a, b) => {
                let (a, b) = (a.eval_jet(x), b.eval_jet(x));
                match op {
                    BinOp::Add => a + b,
                    BinOp::Sub => a - b,
                    BinOp::Mul => a * b,
                    BinOp::Div => a / b,
                }
            }
            Expr::Pow(b, k) => b.eval_jet(x).powi(*k),
            Expr::Call(f, a) => a.eval_jet(x).apply(*f),
        }
    }

    fn precedence(&self) -> u8 {
        match self {
            Expr::Binary(BinOp::Add | BinOp::Sub, ..) => 1,
            Expr::Binary(BinOp::Mul | BinOp::Div, ..) => 2,
            Expr::Neg(_) => 3,
            Expr::Pow(..) => 4,
            Expr::Num(_) | Expr::Var(_) | Expr::Call(..) => 5,
        }
    }
}

fn binary(op: BinOp, a: f64, b: f64) -> f64 {
    match op {
        BinOp::Add => a + b,
        BinOp::Sub => a - b,
        BinOp::Mul => a * b,
        BinOp::Div => a / b,
    }
}

struct Wrapped<'a>(&'a Expr, bool);

impl fmt::Display for Wrapped<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.1 {
            write!(f, "({})", self.0)
        } else {
            write!(f, "{}", self.0)
        }
    }
}

/// Canonical form: minimal parentheses, no whitespace. Parsing it yields an
/// identical tree.
impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let prec = self.precedence();
        match self {
            Expr::Num(v) => write!(f, "{v}"),
            Expr::Var(i) => write!(f, "x{}", i + 1),
            Expr::Neg(e) => write!(f, "-{}", Wrapped(e, e.precedence() < prec)),
            Expr::Binary(op, a, b) => {
                let sym = match op {
                    BinOp::Add => '+',
                    BinOp::Sub => '-',
                    BinOp::Mul => '*',
                    BinOp::Div => '/',
                };
                write!(f, "{}{sym}{}", Wrapped(a, a.precedence() < prec), Wrapped(b, b.precedence() <= prec))
            }
            Expr::Pow(b, k) => {
                let base = Wrapped(b, b.precedence() <= prec);
                if *k < 0 {
                    write!(f, "{base}^(-{})", -(*k as i64))
                } else {
                    write!(f, "{base}^{k}")
                }
            }
            Expr::Call(func, a) => write!(f, "{}({a})", func.name()),
        }
    }
}

/// Scale-aware default step `1e-5 · max(1, |x|)`.
pub fn default_step(x: f64) -> f64 {
    1e-5 * x.abs().max(1.0)
}

/// A real-valued function of position backed by a parsed expression.
#[derive(Debug, Clone, PartialEq)]
pub struct ScalarField {
    expr: Expr,
    arity: usize,
}

impl ScalarField {
    pub fn parse(text: &str) -> Result<Self> {
        Ok(Self::from_expr(parser::parse_expr(text)?))
    }

    pub fn from_expr(expr: Expr) -> Self {
        let mut vars = BTreeSet::new();
        expr.collect_vars(&mut vars);
        let arity = vars.last().map_or(0, |i| i + 1);
        Self { expr, arity }
    }

    pub fn constant(value: f64) -> Self {
        Self { expr: Expr::Num(value), arity: 0 }
    }

    pub fn expr(&self) -> &Expr {
        &self.expr
    }

    /// Number of leading position coordinates evaluation needs.
    pub fn arity(&self) -> usize {
        self.arity
    }

    /// Zero-based indices of the variables the expression mentions.
    pub fn variables(&self) -> BTreeSet<usize> {
        let mut vars = BTreeSet::new();
        self.expr.collect_vars(&mut vars);
        vars
    }

    pub fn as_constant(&self) -> Option<f64> {
        self.expr.constant_value()
    }

    fn check_arity(&self, supplied: usize) -> Result<()> {
        if supplied < self.arity {
            Err(Error::MissingVariable { index: self.arity, supplied })
        } else {
            Ok(())
        }
    }

    /// IEEE evaluation; NaN and infinities propagate to the caller.
    pub fn evaluate(&self, x: &[f64]) -> Result<f64> {
        self.check_arity(x.len())?;
        Ok(self.expr.eval(x))
    }

    /// Jet of the field seeded along coordinates `a` and `b` (zero-based).
    /// With `a == b` the `dab` component is the pure second partial.
    pub fn jet(&self, x: &[f64], a: usize, b: usize) -> Result<Jet> {
        self.check_arity(x.len())?;
        if a >= x.len() || b >= x.len() {
            return Err(Error::InvalidInput(format!("partial index out of range for a {}-point", x.len())));
        }
        let seeds: Vec<Jet> = x
            .iter()
            .enumerate()
            .map(|(i, &v)| Jet { value: v, da: f64::from(u8::from(i == a)), db: f64::from(u8::from(i == b)), dab: 0.0 })
            .collect();
        Ok(self.expr.eval_jet(&seeds))
    }

    /// Central difference `(f(x + h e_i) - f(x - h e_i)) / 2h` in coordinate `i`
    /// (zero-based). `step = None` uses [`default_step`].
    pub fn partial(&self, i: usize, x: &[f64], step: Option<f64>) -> Result<f64> {
        let h = resolve_step(step, x, i)?;
        let mut y = x.to_vec();
        y[i] = x[i] + h;
        let fp = self.evaluate(&y)?;
        y[i] = x[i] - h;
        let fm = self.evaluate(&y)?;
        Ok((fp - fm) / (2.0 * h))
    }

    /// Second partial `∂i∂j f`: three-point stencil for `i == j`, the 4-point
    /// cross stencil otherwise.
    pub fn second_partial(&self, i: usize, j: usize, x: &[f64], step: Option<f64>) -> Result<f64> {
        let hi = resolve_step(step, x, i)?;
        let mut y = x.to_vec();
        if i == j {
            let f0 = self.evaluate(x)?;
            y[i] = x[i] + hi;
            let fp = self.evaluate(&y)?;
            y[i] = x[i] - hi;
            let fm = self.evaluate(&y)?;
            return Ok((fp - 2.0 * f0 + fm) / (hi * hi));
        }
        let hj = resolve_step(step, x, j)?;
        let mut corner = |si: f64, sj: f64| {
            y[i] = x[i] + si * hi;
            y[j] = x[j] + sj * hj;
            self.evaluate(&y)
        };
        let (pp, pm, mp, mm) = (corner(1.0, 1.0)?, corner(1.0, -1.0)?, corner(-1.0, 1.0)?, corner(-1.0, -1.0)?);
        Ok((pp - pm - mp + mm) / (4.0 * hi * hj))
    }
}

fn resolve_step(step: Option<f64>, x: &[f64], i: usize) -> Result<f64> {
    if i >= x.len() {
        return Err(Error::InvalidInput(format!("partial index x{} out of range for a {}-point", i + 1, x.len())));
    }
    match step {
        Some(h) if h > 0.0 && h.is_finite() => Ok(h),
        Some(h) => Err(Error::Precondition(format!("finite-difference step must be positive, got {h}"))),
        None => Ok(default_step(x[i])),
    }
}

impl fmt::Display for ScalarField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.expr.fmt(f)
    }
}

impl FromStr for ScalarField {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Self::parse(s)
    }
}

impl Serialize for ScalarField {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for ScalarField {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let text = String::deserialize(d)?;
        Self::parse(&text).map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn field(s: &str) -> ScalarField {
        ScalarField::parse(s).unwrap()
    }

    #[test]
    fn evaluates_trigonometric_coefficients() {
        assert_eq!(field("cos(x1*x2)+2").evaluate(&[0.0, 0.0]).unwrap(), 3.0);
        assert_eq!(field("2").evaluate(&[]).unwrap(), 2.0);
        assert_eq!(field("2").as_constant(), Some(2.0));
        assert_eq!(field("sqrt(2)*sin(x1*x2)").evaluate(&[0.0, 5.0]).unwrap(), 0.0);
        assert!((field("tanh(x1)").evaluate(&[1e6]).unwrap() - 1.0).abs() <= 1e-12);
        let p = field("1-2*tanh(x1+x2)^2");
        let t = 0.7f64.tanh();
        assert_relative_eq!(p.evaluate(&[0.3, 0.4]).unwrap(), 1.0 - 2.0 * t * t, max_relative = 1e-15);
    }

    #[test]
    fn precedence_and_associativity() {
        assert_eq!(field("-x1^2").evaluate(&[3.0]).unwrap(), -9.0);
        assert_eq!(field("2^3^2").evaluate(&[]).unwrap(), 512.0);
        assert_eq!(field("x1^-1").evaluate(&[4.0]).unwrap(), 0.25);
        assert_eq!(field("1-2-3").evaluate(&[]).unwrap(), -4.0);
        assert_eq!(field("8/4/2").evaluate(&[]).unwrap(), 1.0);
        assert_eq!(field("2*-3").evaluate(&[]).unwrap(), -6.0);
        assert_eq!(field("  1 +\t2 * 3 ").evaluate(&[]).unwrap(), 7.0);
        assert_eq!(field("1.5e1 + .5").evaluate(&[]).unwrap(), 15.5);
        assert_eq!(field("(x1+1)^2").evaluate(&[2.0]).unwrap(), 9.0);
        assert_eq!(field("abs(-3)+exp(0)+tan(0)").evaluate(&[]).unwrap(), 4.0);
    }

    #[test]
    fn reports_syntax_errors_with_offsets() {
        assert!(matches!(ScalarField::parse("1 + * 2"), Err(Error::Syntax { offset: 4, .. })));
        assert!(matches!(ScalarField::parse("(1 + 2"), Err(Error::Syntax { offset: 6, .. })));
        assert!(matches!(ScalarField::parse(""), Err(Error::Syntax { offset: 0, .. })));
        assert!(matches!(ScalarField::parse("1 2"), Err(Error::Syntax { offset: 2, .. })));
        assert!(matches!(ScalarField::parse("x1 $ 2"), Err(Error::Syntax { offset: 3, .. })));
        assert!(matches!(ScalarField::parse("x1^x2"), Err(Error::Syntax { offset: 3, .. })));
        assert!(matches!(ScalarField::parse("x1^0.5"), Err(Error::Syntax { .. })));
        assert!(matches!(ScalarField::parse("1e999"), Err(Error::Syntax { offset: 0, .. })));
        assert_eq!(ScalarField::parse("2*pi"), Err(Error::UnknownIdentifier { name: "pi".into(), offset: 2 }));
        assert_eq!(ScalarField::parse("log(x1)"), Err(Error::UnknownIdentifier { name: "log".into(), offset: 0 }));
        assert!(matches!(ScalarField::parse("x4 + 1"), Err(Error::UnknownIdentifier { .. })));
    }

    #[test]
    fn missing_variables_are_errors() {
        let f = field("x1 + x3");
        assert_eq!(f.arity(), 3);
        assert_eq!(f.variables().into_iter().collect::<Vec<_>>(), vec![0, 2]);
        assert_eq!(f.evaluate(&[1.0, 2.0]), Err(Error::MissingVariable { index: 3, supplied: 2 }));
        assert_eq!(f.evaluate(&[1.0, 2.0, 3.0]), Ok(4.0));
    }

    #[test]
    fn non_finite_values_propagate() {
        assert!(field("sqrt(x1)").evaluate(&[-1.0]).unwrap().is_nan());
        assert!(field("1/x1").evaluate(&[0.0]).unwrap().is_infinite());
    }

    #[test]
    fn finite_difference_partials() {
        let f = field("x1^2");
        assert!((f.partial(0, &[3.0], Some(1e-5)).unwrap() - 6.0).abs() <= 1e-8);
        let c = field("7.5");
        for i in 0..2 {
            assert!(c.partial(i, &[0.3, -2.0], None).unwrap().abs() <= 1e-10);
            assert!(c.second_partial(0, 1, &[0.3, -2.0], None).unwrap().abs() <= 1e-10);
        }
        let xy = field("x1*x2");
        for x in [[0.0, 0.0], [3.0, -7.0], [-9.5, 4.25]] {
            assert!((xy.second_partial(0, 1, &x, None).unwrap() - 1.0).abs() <= 1e-6);
        }
        assert!(matches!(f.partial(0, &[1.0], Some(0.0)), Err(Error::Precondition(_))));
        assert!(matches!(f.partial(0, &[1.0], Some(-1e-3)), Err(Error::Precondition(_))));
    }

    #[test]
    fn jets_match_closed_form_derivatives() {
        let f = field("x1^3*x2 - 2*sin(x2) + tanh(x1*x2)/x1 + sqrt(x1) + exp(x2)^2 + cos(x1)*tan(x2)");
        let (x1, x2) = (0.8, -0.35);
        let j = f.jet(&[x1, x2], 0, 1).unwrap();
        let t = (x1 * x2).tanh();
        let sech2 = 1.0 - t * t;
        let d1 = 3.0 * x1 * x1 * x2 + (sech2 * x2 * x1 - t) / (x1 * x1) + 0.5 / x1.sqrt() - x1.sin() * x2.tan();
        let d2 = x1.powi(3) - 2.0 * x2.cos() + sech2 + 2.0 * (2.0 * x2).exp() + x1.cos() / x2.cos().powi(2);
        let d12 = 3.0 * x1 * x1 - 2.0 * x2 * t * sech2 - x1.sin() / x2.cos().powi(2);
        assert_relative_eq!(j.value, f.evaluate(&[x1, x2]).unwrap(), max_relative = 1e-14);
        assert_relative_eq!(j.da, d1, max_relative = 1e-12);
        assert_relative_eq!(j.db, d2, max_relative = 1e-12);
        assert_relative_eq!(j.dab, d12, max_relative = 1e-12);

        let pure = field("x1^4").jet(&[2.0], 0, 0).unwrap();
        assert_eq!((pure.da, pure.dab), (32.0, 48.0));
    }

    #[test]
    fn canonical_printing() {
        assert_eq!(field("1 - (2 - 3)").to_string(), "1-(2-3)");
        assert_eq!(field("(1 - 2) - 3").to_string(), "1-2-3");
        assert_eq!(field("-x1^2").to_string(), "-x1^2");
        assert_eq!(field("(-x1)^2").to_string(), "(-x1)^2");
        assert_eq!(field("(x1^2)^3").to_string(), "(x1^2)^3");
        assert_eq!(field("x1^-2").to_string(), "x1^(-2)");
        assert_eq!(field("cos( x1 * x2 ) + 2").to_string(), "cos(x1*x2)+2");
        assert_eq!(field("0.00001*x1").to_string(), "0.00001*x1");
    }

    fn arb_expr() -> impl Strategy<Value = Expr> {
        let leaf = prop_oneof![(0.0f64..100.0).prop_map(Expr::Num), (0usize..3).prop_map(Expr::Var),];
        leaf.prop_recursive(4, 32, 3, |inner| {
            prop_oneof![
                inner.clone().prop_map(|e| Expr::Neg(Box::new(e))),
                (inner.clone(), inner.clone(), 0..4usize).prop_map(|(a, b, op)| {
                    let op = [BinOp::Add, BinOp::Sub, BinOp::Mul, BinOp::Div][op];
                    Expr::Binary(op, Box::new(a), Box::new(b))
                }),
                (inner.clone(), -3i32..5).prop_map(|(b, k)| Expr::Pow(Box::new(b), k)),
                (inner, 0..7usize).prop_map(|(a, f)| Expr::Call(Func::ALL[f], Box::new(a))),
            ]
        })
    }

    proptest! {
        #[test]
        fn print_parse_round_trip(e in arb_expr()) {
            let printed = e.to_string();
            let reparsed = parser::parse_expr(&printed).unwrap();
            prop_assert_eq!(&reparsed, &e);
            prop_assert_eq!(reparsed.to_string(), printed);
        }

        #[test]
        fn fd_partials_of_cubics_match_exact(
            c in prop::array::uniform4(-3.0f64..3.0),
            x in prop::array::uniform2(-10.0f64..10.0),
        ) {
            let text = format!("{}*x1^3 + {}*x1^2*x2 + {}*x1*x2^2 + {}*x2^3", c[0], c[1], c[2], c[3]);
            let f = ScalarField::parse(&text).unwrap();
            let exact_d1 = 3.0 * c[0] * x[0] * x[0] + 2.0 * c[1] * x[0] * x[1] + c[2] * x[1] * x[1];
            let exact_d2 = c[1] * x[0] * x[0] + 2.0 * c[2] * x[0] * x[1] + 3.0 * c[3] * x[1] * x[1];
            let scale = 1.0 + c.iter().map(|v| v.abs()).sum::<f64>() * 300.0;
            let d1 = f.partial(0, &x, Some(1e-5)).unwrap();
            let d2 = f.partial(1, &x, Some(1e-5)).unwrap();
            prop_assert!((d1 - exact_d1).abs() <= 1e-7 * exact_d1.abs().max(scale));
            prop_assert!((d2 - exact_d2).abs() <= 1e-7 * exact_d2.abs().max(scale));
        }
    }
}
