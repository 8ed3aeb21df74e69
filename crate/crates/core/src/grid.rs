use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Axis-aligned box in position space.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Region {
    pub min: Vec<f64>,
    pub max: Vec<f64>,
}

impl Region {
    pub fn new(min: Vec<f64>, max: Vec<f64>) -> Result<Self> {
        let r = Self { min, max };
        r.validate()?;
        Ok(r)
    }

    pub fn square(lo: f64, hi: f64) -> Self {
        Self { min: vec![lo, lo], max: vec![hi, hi] }
    }

    pub fn dimension(&self) -> usize {
        self.min.len()
    }

    pub fn validate(&self) -> Result<()> {
        if self.min.is_empty() || self.min.len() != self.max.len() {
            return Err(Error::InvalidInput("region min and max must be non-empty and of equal length".into()));
        }
        if self.min.iter().zip(&self.max).any(|(a, b)| !(a.is_finite() && b.is_finite() && a <= b)) {
            return Err(Error::InvalidInput("region bounds must be finite with min <= max".into()));
        }
        Ok(())
    }

    /// Row-major tensor grid with `counts[i]` nodes along axis `i`, the last
    /// axis varying fastest. A single node sits at the axis midpoint.
    pub fn grid(&self, counts: &[usize]) -> Result<Vec<Vec<f64>>> {
        self.validate()?;
        if counts.len() != self.dimension() {
            return Err(Error::InvalidInput(format!(
                "grid has {} axes but the region has {}",
                counts.len(),
                self.dimension()
            )));
        }
        if counts.contains(&0) {
            return Err(Error::InvalidInput("grid counts must be positive".into()));
        }
        let axes: Vec<Vec<f64>> = counts
            .iter()
            .enumerate()
            .map(|(i, &c)| {
                let (lo, hi) = (self.min[i], self.max[i]);
                if c == 1 {
                    vec![0.5 * (lo + hi)]
                } else {
                    (0..c).map(|k| lo + (hi - lo) * k as f64 / (c - 1) as f64).collect()
                }
            })
            .collect();
        let mut points = vec![Vec::new()];
        for axis in &axes {
            points = points
                .into_iter()
                .flat_map(|p| {
                    axis.iter().map(move |&v| {
                        let mut q = p.clone();
                        q.push(v);
                        q
                    })
                })
                .collect();
        }
        Ok(points)
    }
}
