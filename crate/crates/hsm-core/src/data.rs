//! Observed data: points, groups sharing one latent parameter, and the
//! sufficient statistics the conjugate linear formulas consume.

use serde::{Deserialize, Serialize};
use std::collections::HashSet;

use crate::error::{HsmError, Result};

/// A single (x, y) observation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DataPoint {
    x: f64,
    y: f64,
}

impl DataPoint {
    pub fn new(x: f64, y: f64) -> Result<Self> {
        if !x.is_finite() || !y.is_finite() {
            return Err(HsmError::NonFinite(format!("DataPoint ({x}, {y})")));
        }
        Ok(Self { x, y })
    }

    pub fn x(&self) -> f64 {
        self.x
    }

    pub fn y(&self) -> f64 {
        self.y
    }
}

/// Sufficient statistics of a point set under the linear forward model:
/// x'x, x'y, y'y and the point count.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct GroupStats {
    pub sxx: f64,
    pub sxy: f64,
    pub syy: f64,
    pub n: usize,
}

impl GroupStats {
    pub fn from_points(points: &[DataPoint]) -> Self {
        let mut s = GroupStats { n: points.len(), ..Default::default() };
        for p in points {
            s.sxx += p.x * p.x;
            s.sxy += p.x * p.y;
            s.syy += p.y * p.y;
        }
        s
    }

    pub fn merged(mut self, other: &GroupStats) -> Self {
        self.sxx += other.sxx;
        self.sxy += other.sxy;
        self.syy += other.syy;
        self.n += other.n;
        self
    }
}

/// One group of observations sharing a single latent parameter.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DataSet {
    id: String,
    points: Vec<DataPoint>,
    #[serde(skip)]
    stats: Option<GroupStats>,
}

impl DataSet {
    pub fn new(id: impl Into<String>, points: Vec<DataPoint>) -> Result<Self> {
        if points.is_empty() {
            return Err(HsmError::invalid("DataSet must contain at least one point"));
        }
        let stats = GroupStats::from_points(&points);
        Ok(Self { id: id.into(), points, stats: Some(stats) })
    }

    pub fn id(&self) -> &str {
        &self.id
    }

    pub fn points(&self) -> &[DataPoint] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn stats(&self) -> GroupStats {
        self.stats
            .unwrap_or_else(|| GroupStats::from_points(&self.points))
    }

    /// Per-point ratios y/x. Errors if any x = 0 (delta-likelihood use sites).
    pub fn ratios(&self) -> Result<Vec<f64>> {
        self.points
            .iter()
            .map(|p| {
                if p.x == 0.0 {
                    Err(HsmError::invalid(format!("x = 0 in group '{}'", self.id)))
                } else {
                    Ok(p.y / p.x)
                }
            })
            .collect()
    }
}

/// A partition of all observations into groups.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroupedData {
    datasets: Vec<DataSet>,
}

impl GroupedData {
    pub fn new(datasets: Vec<DataSet>) -> Result<Self> {
        let mut seen = HashSet::new();
        for ds in &datasets {
            if !seen.insert(ds.id().to_owned()) {
                return Err(HsmError::invalid(format!("duplicate group id '{}'", ds.id())));
            }
        }
        Ok(Self { datasets })
    }

    /// Wraps one dataset as a single-group collection.
    pub fn single(ds: DataSet) -> Self {
        Self { datasets: vec![ds] }
    }

    /// Re-partitions a dataset so each point forms its own group.
    pub fn singletons(ds: &DataSet) -> Self {
        let datasets = ds
            .points()
            .iter()
            .enumerate()
            .map(|(i, &p)| DataSet::new(format!("p{i}"), vec![p]).expect("one point"))
            .collect();
        Self { datasets }
    }

    pub fn datasets(&self) -> &[DataSet] {
        &self.datasets
    }

    pub fn n_groups(&self) -> usize {
        self.datasets.len()
    }

    /// Total point count N_d across all groups.
    pub fn total_points(&self) -> usize {
        self.datasets.iter().map(|d| d.len()).sum()
    }

    /// Sufficient statistics of all points pooled together.
    pub fn pooled_stats(&self) -> GroupStats {
        self.datasets
            .iter()
            .fold(GroupStats::default(), |acc, d| acc.merged(&d.stats()))
    }

    pub fn iter_points(&self) -> impl Iterator<Item = &DataPoint> {
        self.datasets.iter().flat_map(|d| d.points().iter())
    }
}
