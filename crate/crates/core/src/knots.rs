use alloc::format;
use alloc::vec::Vec;

use crate::error::{Error, Result};

/// Fewest knots a level may have for a family of order `m`.
pub fn min_knots(m: usize) -> usize {
    (m + 1).max(3)
}

/// Strictly increasing knots on `[0, 1]` with both endpoints present.
#[derive(Debug, Clone, PartialEq)]
pub struct KnotGrid {
    knots: Vec<f64>,
}

impl KnotGrid {
    pub fn new(knots: Vec<f64>) -> Result<Self> {
        if knots.len() < 2 {
            return Err(Error::InvalidGrid(format!(
                "need at least two knots, got {}",
                knots.len()
            )));
        }
        if knots.iter().any(|x| !x.is_finite()) {
            return Err(Error::InvalidGrid("knots must be finite".into()));
        }
        if knots[0] != 0.0 || *knots.last().unwrap() != 1.0 {
            return Err(Error::InvalidGrid("first knot must be 0 and last knot 1".into()));
        }
        if let Some(i) = knots.windows(2).position(|w| w[1] <= w[0]) {
            return Err(Error::InvalidGrid(format!(
                "knots must be strictly increasing: knot {} ({}) follows {}",
                i + 1,
                knots[i + 1],
                knots[i]
            )));
        }
        Ok(Self { knots })
    }

    pub fn uniform(count: usize) -> Result<Self> {
        if count < 2 {
            return Err(Error::InvalidGrid("need at least two knots".into()));
        }
        let last = (count - 1) as f64;
        Self::new((0..count).map(|i| i as f64 / last).collect())
    }

    pub fn len(&self) -> usize {
        self.knots.len()
    }

    pub fn is_empty(&self) -> bool {
        self.knots.is_empty()
    }

    pub fn knots(&self) -> &[f64] {
        &self.knots
    }

    pub fn knot(&self, i: usize) -> f64 {
        self.knots[i]
    }

    pub fn interval_count(&self) -> usize {
        self.knots.len() - 1
    }

    pub fn width(&self, i: usize) -> f64 {
        self.knots[i + 1] - self.knots[i]
    }

    /// Interval containing `x`, with interior knots assigned to the interval
    /// on their left (left-limit convention).
    pub fn interval_of(&self, x: f64) -> usize {
        let last = self.interval_count() - 1;
        let i = self.knots.partition_point(|k| *k < x);
        i.saturating_sub(1).min(last)
    }

    /// Exact index of `x` among the knots.
    pub fn position(&self, x: f64) -> Option<usize> {
        let i = self.knots.partition_point(|k| *k < x);
        (i < self.knots.len() && self.knots[i] == x).then_some(i)
    }

    /// Inserts one new knot inside every interval. `ratios[i]` places the
    /// new knot at `x_i + ratios[i] * (x_{i+1} - x_i)`.
    pub fn refine_with(&self, ratios: &[f64]) -> Result<Self> {
        if ratios.len() != self.interval_count() {
            return Err(Error::InvalidGrid(format!(
                "expected {} insertion ratios, got {}",
                self.interval_count(),
                ratios.len()
            )));
        }
        let mut fine = Vec::with_capacity(2 * self.len() - 1);
        for (i, &t) in ratios.iter().enumerate() {
            if !(t > 0.0 && t < 1.0) {
                return Err(Error::InvalidGrid(format!(
                    "insertion ratio {t} for interval {i} must lie strictly inside (0, 1)"
                )));
            }
            let (a, b) = (self.knots[i], self.knots[i + 1]);
            fine.push(a);
            fine.push(a + t * (b - a));
        }
        fine.push(1.0);
        Self::new(fine)
    }

    pub fn refine_midpoints(&self) -> Result<Self> {
        let ratios: Vec<f64> = (0..self.interval_count()).map(|_| 0.5).collect();
        self.refine_with(&ratios)
    }
}

/// Nested grids `X_0 ⊂ X_1 ⊂ .. ⊂ X_L`, each finer level inserting exactly
/// one knot between every pair of adjacent coarse knots. Fine knots with
/// even index are the coarse knots (bitwise equal), odd ones are new.
#[derive(Debug, Clone, PartialEq)]
pub struct KnotHierarchy {
    levels: Vec<KnotGrid>,
}

impl KnotHierarchy {
    pub fn new(levels: Vec<KnotGrid>) -> Result<Self> {
        if levels.is_empty() {
            return Err(Error::InvalidGrid("hierarchy needs at least one level".into()));
        }
        for (j, pair) in levels.windows(2).enumerate() {
            let (coarse, fine) = (&pair[0], &pair[1]);
            if fine.len() != 2 * coarse.len() - 1 {
                return Err(Error::InvalidGrid(format!(
                    "level {} has {} knots; even-odd refinement of {} knots needs {}",
                    j + 1,
                    fine.len(),
                    coarse.len(),
                    2 * coarse.len() - 1
                )));
            }
            for (k, x) in coarse.knots().iter().enumerate() {
                if fine.knot(2 * k).to_bits() != x.to_bits() {
                    return Err(Error::InvalidGrid(format!(
                        "level {} knot {} ({}) is not coarse knot {} ({})",
                        j + 1,
                        2 * k,
                        fine.knot(2 * k),
                        k,
                        x
                    )));
                }
            }
        }
        Ok(Self { levels })
    }

    /// Repeated midpoint insertion, `refinements` times.
    pub fn midpoint(coarse: KnotGrid, refinements: usize) -> Result<Self> {
        let mut levels = Vec::with_capacity(refinements + 1);
        levels.push(coarse);
        for _ in 0..refinements {
            let next = levels.last().unwrap().refine_midpoints()?;
            levels.push(next);
        }
        Self::new(levels)
    }

    /// Number of grids (`L + 1`).
    pub fn len(&self) -> usize {
        self.levels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.levels.is_empty()
    }

    /// Finest level index `L`.
    pub fn finest(&self) -> usize {
        self.levels.len() - 1
    }

    pub fn level(&self, j: usize) -> &KnotGrid {
        &self.levels[j]
    }

    pub fn levels(&self) -> &[KnotGrid] {
        &self.levels
    }

    /// Indices at level `j + 1` that are not knots of level `j`.
    pub fn odd_indices(&self, j: usize) -> impl Iterator<Item = usize> {
        let n = self.levels[j + 1].len();
        (1..n).step_by(2)
    }

    /// Indices at level `j + 1` inherited from level `j`.
    pub fn even_indices(&self, j: usize) -> impl Iterator<Item = usize> {
        let n = self.levels[j + 1].len();
        (0..n).step_by(2)
    }
}
