use serde::Serialize;

use crate::bfs::BfsSpec;
use crate::error::{Error, Result};
use crate::metric::FiniteMetricSpace;

/// A map from finitely many points of a metric space into functions on atoms.
///
/// Row `k` of `values` is the function assigned to point `domain[k]`. A row is
/// a concrete representative; its a.e. class is the row modulo zero-weight atoms.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SampledMap {
    domain: Vec<usize>,
    values: Vec<Vec<f64>>,
    #[serde(skip)]
    range: BfsSpec,
}

impl SampledMap {
    pub fn new(domain: Vec<usize>, values: Vec<Vec<f64>>, range: BfsSpec) -> Result<Self> {
        if domain.len() != values.len() {
            return Err(Error::Shape(format!(
                "{} domain points but {} value rows",
                domain.len(),
                values.len()
            )));
        }
        let n = range.base().len();
        if let Some(k) = values.iter().position(|r| r.len() != n) {
            return Err(Error::Shape(format!(
                "value row {k} has {} entries but the range has {n} atoms",
                values[k].len()
            )));
        }
        if values.iter().flatten().any(|v| !v.is_finite()) {
            return Err(Error::Invalid("map values must be finite".into()));
        }
        let mut seen = domain.clone();
        seen.sort_unstable();
        if seen.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::Invalid("domain lists a point twice".into()));
        }
        Ok(SampledMap { domain, values, range })
    }

    /// A map defined on every point `0..values.len()` in order.
    pub fn total(values: Vec<Vec<f64>>, range: BfsSpec) -> Result<Self> {
        Self::new((0..values.len()).collect(), values, range)
    }

    /// A real-valued map; the range is ℝ with the absolute value.
    pub fn scalar(domain: Vec<usize>, values: Vec<f64>) -> Result<Self> {
        Self::new(domain, values.into_iter().map(|v| vec![v]).collect(), BfsSpec::scalar())
    }

    pub fn domain(&self) -> &[usize] {
        &self.domain
    }

    pub fn values(&self) -> &[Vec<f64>] {
        &self.values
    }

    pub fn range(&self) -> &BfsSpec {
        &self.range
    }

    pub fn len(&self) -> usize {
        self.domain.len()
    }

    pub fn is_empty(&self) -> bool {
        self.domain.is_empty()
    }

    pub fn atoms(&self) -> usize {
        self.range.base().len()
    }

    pub fn row(&self, k: usize) -> &[f64] {
        &self.values[k]
    }

    /// Row for ambient point `x`, if `x` is in the domain.
    pub fn value_at(&self, x: usize) -> Option<&[f64]> {
        self.domain.iter().position(|&p| p == x).map(|k| self.values[k].as_slice())
    }

    /// Same points and values, different range norm.
    pub fn with_range(&self, range: BfsSpec) -> Result<Self> {
        Self::new(self.domain.clone(), self.values.clone(), range)
    }

    /// True when the domain is exactly `0..space.len()` in order.
    pub fn is_total_on(&self, space: &FiniteMetricSpace) -> bool {
        self.domain.len() == space.len() && self.domain.iter().enumerate().all(|(k, &p)| k == p)
    }

    pub(crate) fn check_points(&self, space: &FiniteMetricSpace) -> Result<()> {
        if let Some(&p) = self.domain.iter().find(|&&p| p >= space.len()) {
            return Err(Error::Shape(format!(
                "domain point {p} is outside the {}-point metric space",
                space.len()
            )));
        }
        Ok(())
    }

    pub(crate) fn require_total(&self, space: &FiniteMetricSpace) -> Result<()> {
        if self.is_total_on(space) {
            Ok(())
        } else {
            Err(Error::Shape("map must be defined on every point of the metric space, in order".into()))
        }
    }
}
