//! Grid classification of position-dependent coefficients.

use std::fmt::Write as _;

use rayon::prelude::*;
use serde::Serialize;

use super::{classify, NBounds, Verdict2D, Witness2D};
use crate::error::{Error, Result};
use crate::exprfield::ScalarField;
use crate::grid::Region;
use crate::sympoly::CoefficientSet2D;

#[derive(Debug, Clone, PartialEq)]
pub struct FieldTriple {
    pub l: ScalarField,
    pub m: ScalarField,
    pub n: ScalarField,
}

impl FieldTriple {
    pub fn new(l: ScalarField, m: ScalarField, n: ScalarField) -> Self {
        Self { l, m, n }
    }

    pub fn constant(c: CoefficientSet2D) -> Self {
        Self::new(ScalarField::constant(c.l), ScalarField::constant(c.m), ScalarField::constant(c.n))
    }

    pub fn evaluate(&self, x: &[f64]) -> Result<CoefficientSet2D> {
        let c = CoefficientSet2D::new(self.l.evaluate(x)?, self.m.evaluate(x)?, self.n.evaluate(x)?);
        if !(c.l.is_finite() && c.m.is_finite() && c.n.is_finite()) {
            return Err(Error::Domain(format!("non-finite coefficients ({}, {}, {})", c.l, c.m, c.n)));
        }
        Ok(c)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GridPoint2D {
    pub x: Vec<f64>,
    pub coefficients: Option<CoefficientSet2D>,
    pub verdict: Option<Verdict2D>,
    pub bounds: Option<NBounds>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PointFailure {
    pub index: usize,
    pub x: Vec<f64>,
    pub coefficients: CoefficientSet2D,
    pub reason: Option<String>,
    pub witness: Option<Witness2D>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PointError {
    pub index: usize,
    pub x: Vec<f64>,
    pub message: String,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct VerdictCounts {
    pub not_positive_definite: usize,
    pub irreducible: usize,
    pub reducible: usize,
    pub critical: usize,
    pub errors: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RegularityReport {
    pub region: Region,
    pub grid: [usize; 2],
    /// True when every node evaluated and classified as positive definite.
    pub positive_definite_everywhere: bool,
    pub counts: VerdictCounts,
    /// Grid-adjacent node pairs whose verdicts differ.
    pub classification_changes: usize,
    pub points: Vec<GridPoint2D>,
    pub failures: Vec<PointFailure>,
    pub errors: Vec<PointError>,
}

enum Outcome {
    Classified(CoefficientSet2D, super::Classification2D),
    Failed(String),
}

/// Classifies the coefficient fields at every node of a `grid[0] x grid[1]` tensor grid.
/// Nodes are evaluated in parallel; the report is in row-major node order.
pub fn check_field(fields: &FieldTriple, region: &Region, grid: [usize; 2]) -> Result<RegularityReport> {
    if region.dimension() != 2 {
        return Err(Error::UnsupportedDimension(region.dimension()));
    }
    let nodes = region.grid(&grid)?;
    let outcomes: Vec<Outcome> = nodes
        .par_iter()
        .map(|x| match fields.evaluate(x) {
            Ok(c) => Outcome::Classified(c, classify(&c)),
            Err(e) => Outcome::Failed(e.to_string()),
        })
        .collect();

    let mut counts = VerdictCounts::default();
    let mut points = Vec::with_capacity(nodes.len());
    let mut failures = Vec::new();
    let mut errors = Vec::new();
    for (index, (x, outcome)) in nodes.into_iter().zip(outcomes).enumerate() {
        match outcome {
            Outcome::Classified(c, class) => {
                match class.verdict {
                    Verdict2D::NotPositiveDefinite => counts.not_positive_definite += 1,
                    Verdict2D::PDIrreducible => counts.irreducible += 1,
                    Verdict2D::PDReducible => counts.reducible += 1,
                    Verdict2D::PDRiemannianCritical => counts.critical += 1,
                }
                if class.verdict == Verdict2D::NotPositiveDefinite {
                    failures.push(PointFailure {
                        index,
                        x: x.clone(),
                        coefficients: c,
                        reason: class.reason.clone(),
                        witness: class.witness.clone(),
                    });
                }
                points.push(GridPoint2D {
                    x,
                    coefficients: Some(c),
                    verdict: Some(class.verdict),
                    bounds: Some(class.bounds),
                });
            }
            Outcome::Failed(message) => {
                counts.errors += 1;
                errors.push(PointError { index, x: x.clone(), message });
                points.push(GridPoint2D { x, coefficients: None, verdict: None, bounds: None });
            }
        }
    }

    let [rows, cols] = grid;
    let verdict = |i: usize, j: usize| points[i * cols + j].verdict;
    let mut classification_changes = 0;
    for i in 0..rows {
        for j in 0..cols {
            if j + 1 < cols && verdict(i, j) != verdict(i, j + 1) {
                classification_changes += 1;
            }
            if i + 1 < rows && verdict(i, j) != verdict(i + 1, j) {
                classification_changes += 1;
            }
        }
    }

    Ok(RegularityReport {
        region: region.clone(),
        grid,
        positive_definite_everywhere: failures.is_empty() && errors.is_empty(),
        counts,
        classification_changes,
        points,
        failures,
        errors,
    })
}

impl RegularityReport {
    pub fn verdict_present(&self, v: Verdict2D) -> bool {
        self.points.iter().any(|p| p.verdict == Some(v))
    }

    pub fn summary(&self) -> String {
        let c = &self.counts;
        let mut s = String::new();
        let _ =
            writeln!(s, "grid {}x{} over {:?} .. {:?}", self.grid[0], self.grid[1], self.region.min, self.region.max);
        let _ = writeln!(
            s,
            "positive definite everywhere: {}",
            if self.positive_definite_everywhere { "yes" } else { "no" }
        );
        let _ = writeln!(
            s,
            "irreducible {}  reducible {}  critical {}  not-pd {}  errors {}",
            c.irreducible, c.reducible, c.critical, c.not_positive_definite, c.errors
        );
        let _ = writeln!(s, "classification changes between neighbours: {}", self.classification_changes);
        if let Some(f) = self.failures.first() {
            let _ =
                writeln!(s, "first failure at {:?}: {}", f.x, f.reason.as_deref().unwrap_or("not positive definite"));
        }
        if let Some(e) = self.errors.first() {
            let _ = writeln!(s, "first evaluation error at {:?}: {}", e.x, e.message);
        }
        s
    }
}
