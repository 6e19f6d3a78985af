//! Symmetric distance tables on finite point sets.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::space::Universe;

/// A candidate metric: an `n x n` table of distances.
///
/// Construction and parsing validate only shape and finiteness; the metric
/// axioms themselves are the business of `axioms::check_metric`, so that a
/// broken table can be loaded and reported on rather than rejected at parse
/// time.
///
/// JSON form: `{"points": ["a","b"], "dist": [[0.0,1.0],[1.0,0.0]]}` (full
/// matrix).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "MetricRepr", into = "MetricRepr")]
pub struct FiniteMetric {
    universe: Universe,
    dist: Vec<Vec<f64>>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct MetricRepr {
    points: Vec<String>,
    dist: Vec<Vec<f64>>,
}

impl TryFrom<MetricRepr> for FiniteMetric {
    type Error = Error;
    fn try_from(repr: MetricRepr) -> Result<Self> {
        FiniteMetric::new(Universe::new(repr.points)?, repr.dist)
    }
}

impl From<FiniteMetric> for MetricRepr {
    fn from(m: FiniteMetric) -> Self {
        MetricRepr {
            points: m.universe.names().to_vec(),
            dist: m.dist,
        }
    }
}

impl FiniteMetric {
    pub fn new(universe: Universe, dist: Vec<Vec<f64>>) -> Result<Self> {
        let n = universe.len();
        if dist.len() != n {
            return Err(Error::input(format!(
                "distance table has {} rows for {} points",
                dist.len(),
                n
            )));
        }
        for (i, row) in dist.iter().enumerate() {
            if row.len() != n {
                return Err(Error::input(format!(
                    "distance row {i} has {} entries for {} points",
                    row.len(),
                    n
                )));
            }
            if let Some(j) = row.iter().position(|v| !v.is_finite()) {
                return Err(Error::input(format!("distance [{i}][{j}] is not finite")));
            }
        }
        Ok(FiniteMetric { universe, dist })
    }

    pub fn universe(&self) -> &Universe {
        &self.universe
    }

    pub fn len(&self) -> usize {
        self.universe.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn dist(&self, i: usize, j: usize) -> f64 {
        self.dist[i][j]
    }

    pub fn rows(&self) -> &[Vec<f64>] {
        &self.dist
    }
}
