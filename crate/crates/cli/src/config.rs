//! JSON metric configuration.

use std::collections::BTreeMap;
use std::path::Path;

use anyhow::{bail, Context, Result};
use serde::{Deserialize, Serialize};
use symroot_core::exprfield::{BinOp, Expr};
use symroot_core::pd2d::FieldTriple;
use symroot_core::riemann::{constant_curvature_solution, Branch, SymmetricSecondRoot};
use symroot_core::sympoly::{charpoly_to_monomial_2d, charpoly_to_monomial_3d, CharPolyCoeffs2D, CharPolyCoeffs3D};
use symroot_core::{CoefficientSet2D, CoefficientSet3D, Region, ScalarField};

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Basis {
    #[default]
    Monomial,
    Charpoly,
}

/// A literal number or an expression in `x1, x2, ...`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Coefficient {
    Number(f64),
    Expr(String),
}

impl Coefficient {
    pub fn field(&self) -> Result<ScalarField> {
        match self {
            Coefficient::Number(v) => Ok(ScalarField::constant(*v)),
            Coefficient::Expr(s) => ScalarField::parse(s).with_context(|| format!("cannot parse `{s}`")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SecondRootConfig {
    pub a: Coefficient,
    pub b: Coefficient,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BranchName {
    Plus,
    Minus,
    Separable,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolutionConfig {
    pub branch: BranchName,
    pub k: f64,
    #[serde(default = "one")]
    pub c1: f64,
    #[serde(default)]
    pub c2: f64,
    /// One-variable field for the separable branch.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub f: Option<String>,
}

fn one() -> f64 {
    1.0
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MetricConfig {
    pub dimension: usize,
    #[serde(default)]
    pub basis: Basis,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub coefficients: BTreeMap<String, Coefficient>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub region: Option<Region>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub grid: Option<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub point: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub points: Option<Vec<Vec<f64>>>,
    /// Off-diagonal entry of the surface model, for `curvature`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p: Option<Coefficient>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub second_root: Option<SecondRootConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub solution: Option<SolutionConfig>,
}

impl MetricConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))?;
        let config: Self = serde_json::from_str(&text).with_context(|| format!("invalid config {}", path.display()))?;
        config.validate()?;
        Ok(config)
    }

    pub fn monomial_2d(c: CoefficientSet2D) -> Self {
        let coefficients = [("l", c.l), ("m", c.m), ("n", c.n)]
            .into_iter()
            .map(|(k, v)| (k.to_string(), Coefficient::Number(v)))
            .collect();
        Self { dimension: 2, coefficients, ..Self::empty(2) }
    }

    pub fn monomial_3d(c: CoefficientSet3D) -> Self {
        let coefficients = [("l", c.l), ("m", c.m), ("n", c.n), ("q", c.q)]
            .into_iter()
            .map(|(k, v)| (k.to_string(), Coefficient::Number(v)))
            .collect();
        Self { dimension: 3, coefficients, ..Self::empty(3) }
    }

    fn empty(dimension: usize) -> Self {
        Self {
            dimension,
            basis: Basis::Monomial,
            coefficients: BTreeMap::new(),
            region: None,
            grid: None,
            point: None,
            points: None,
            p: None,
            second_root: None,
            solution: None,
        }
    }

    pub fn coefficient_names(&self) -> Result<&'static [&'static str]> {
        Ok(match (self.dimension, self.basis) {
            (2, Basis::Monomial) => &["l", "m", "n"],
            (2, Basis::Charpoly) => &["a", "b", "c"],
            (3, Basis::Monomial) => &["l", "m", "n", "q"],
            (3, Basis::Charpoly) => &["a", "b", "c", "d"],
            (d, _) => bail!("dimension must be 2 or 3, got {d}"),
        })
    }

    pub fn validate(&self) -> Result<()> {
        let names = self.coefficient_names()?;
        if !self.coefficients.is_empty() {
            for key in self.coefficients.keys() {
                if !names.contains(&key.as_str()) {
                    bail!("unknown coefficient `{key}`; expected {}", names.join(", "));
                }
            }
            for name in names {
                if !self.coefficients.contains_key(*name) {
                    bail!("missing coefficient `{name}`");
                }
            }
        }
        if let Some(r) = &self.region {
            r.validate()?;
        }
        if let (Some(r), Some(g)) = (&self.region, &self.grid) {
            if g.len() != r.dimension() {
                bail!("grid has {} axes but the region has {}", g.len(), r.dimension());
            }
        }
        Ok(())
    }

    fn named_fields(&self) -> Result<Vec<ScalarField>> {
        let names = self.coefficient_names()?;
        if self.coefficients.is_empty() {
            bail!("config has no coefficients");
        }
        names.iter().map(|n| self.coefficients[*n].field()).collect()
    }

    /// Coefficient values at the configured `point`; constants need no point.
    fn values(&self) -> Result<Vec<f64>> {
        let fields = self.named_fields()?;
        let point = self.point.as_deref();
        fields
            .iter()
            .map(|f| match (f.as_constant(), point) {
                (Some(v), _) => Ok(v),
                (None, Some(x)) => Ok(f.evaluate(x)?),
                (None, None) => bail!("coefficient `{f}` depends on position; give a `point`"),
            })
            .collect()
    }

    pub fn constant_2d(&self) -> Result<CoefficientSet2D> {
        if self.dimension != 2 {
            bail!("expected a 2-dimensional config, got dimension {}", self.dimension);
        }
        let v = self.values()?;
        Ok(match self.basis {
            Basis::Monomial => CoefficientSet2D::new(v[0], v[1], v[2]),
            Basis::Charpoly => charpoly_to_monomial_2d(CharPolyCoeffs2D { a: v[0], b: v[1], c: v[2] }),
        })
    }

    pub fn constant_3d(&self) -> Result<CoefficientSet3D> {
        if self.dimension != 3 {
            bail!("expected a 3-dimensional config, got dimension {}", self.dimension);
        }
        let v = self.values()?;
        Ok(match self.basis {
            Basis::Monomial => CoefficientSet3D::new(v[0], v[1], v[2], v[3]),
            Basis::Charpoly => charpoly_to_monomial_3d(CharPolyCoeffs3D { a: v[0], b: v[1], c: v[2], d: v[3] }),
        })
    }

    /// Monomial coefficient fields over position space.
    pub fn fields_2d(&self) -> Result<FieldTriple> {
        if self.dimension != 2 {
            bail!("expected a 2-dimensional config, got dimension {}", self.dimension);
        }
        let f = self.named_fields()?;
        Ok(match self.basis {
            Basis::Monomial => FieldTriple::new(f[0].clone(), f[1].clone(), f[2].clone()),
            Basis::Charpoly => {
                let (a, b, c) = (f[0].expr(), f[1].expr(), f[2].expr());
                FieldTriple::new(f[0].clone(), combine(&[(4.0, a), (1.0, b)]), combine(&[(6.0, a), (2.0, b), (1.0, c)]))
            }
        })
    }

    /// The `p` field for curvature runs, from exactly one of `p`, `second_root`, `solution`.
    pub fn p_field(&self) -> Result<ScalarField> {
        let sources = [self.p.is_some(), self.second_root.is_some(), self.solution.is_some()];
        if sources.iter().filter(|s| **s).count() != 1 {
            bail!("give exactly one of `p`, `second_root` or `solution`");
        }
        if let Some(p) = &self.p {
            return p.field();
        }
        if let Some(sr) = &self.second_root {
            return Ok(SymmetricSecondRoot::new(sr.a.field()?, sr.b.field()?, 2)?.p_field());
        }
        let s = self.solution.as_ref().expect("one source is present");
        let branch = match s.branch {
            BranchName::Plus => Branch::Plus,
            BranchName::Minus => Branch::Minus,
            BranchName::Separable => {
                let f = s.f.as_deref().context("the separable branch needs `f`")?;
                Branch::Separable(ScalarField::parse(f)?)
            }
        };
        Ok(constant_curvature_solution(s.k, s.c1, s.c2, branch)?)
    }

    /// Evaluation points: `points`, else `point`, else the region grid.
    pub fn sample_points(&self, default_grid: usize) -> Result<Vec<Vec<f64>>> {
        if let Some(ps) = &self.points {
            return Ok(ps.clone());
        }
        if let Some(p) = &self.point {
            return Ok(vec![p.clone()]);
        }
        let region = self.region.as_ref().context("config needs `points`, `point` or a `region`")?;
        let grid = self.grid.clone().unwrap_or_else(|| vec![default_grid; region.dimension()]);
        Ok(region.grid(&grid)?)
    }
}

fn combine(terms: &[(f64, &Expr)]) -> ScalarField {
    let scaled = |(w, e): &(f64, &Expr)| {
        if *w == 1.0 {
            (*e).clone()
        } else {
            Expr::Binary(BinOp::Mul, Box::new(Expr::Num(*w)), Box::new((*e).clone()))
        }
    };
    let mut it = terms.iter();
    let first = scaled(it.next().expect("at least one term"));
    ScalarField::from_expr(it.fold(first, |acc, t| Expr::Binary(BinOp::Add, Box::new(acc), Box::new(scaled(t)))))
}
