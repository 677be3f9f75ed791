//! Green's function convolution powers `G_d^{*n}(0)` of simple random walk.
//!
//! Two independent routes are provided: a Bessel integral ([`greens_power_integral`])
//! and the return-probability series ([`greens_power_series`]). A [`GreensTable`]
//! collects values by `(d, n)` for the bound computations.

mod bessel;
pub mod integral;
mod quadrature;
pub mod series;

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

pub use integral::{greens_power_integral, IntegralValue, INTEGRAL_TOLERANCE};
pub use series::{
    greens_power_series, hurwitz_zeta, series_from_return_probabilities, ReturnProbabilities, SeriesValue,
    DEFAULT_STEPS, SERIES_TOLERANCE,
};

use crate::error::{Error, Result};
use crate::par::{map_indexed, Execution};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GreensMethod {
    Integral,
    Series,
    /// An externally published rigorous upper bound.
    Published,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GreensEntry {
    pub value: f64,
    pub method: GreensMethod,
    pub error_estimate: f64,
}

/// One exported table row.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GreensRow {
    pub d: usize,
    pub n: usize,
    pub value: f64,
    pub method: GreensMethod,
    pub error_estimate: f64,
}

/// Published upper bounds `(d, n, G_d^{*n}(0) <= value)`.
pub const PUBLISHED_BOUNDS: [(usize, usize, f64); 5] =
    [(8, 1, 1.07865), (8, 2, 1.28901), (11, 1, 1.05314), (11, 2, 1.18018), (11, 3, 1.43043)];

/// `G_d^{*n}(0)` values keyed by `(d, n)`.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct GreensTable {
    entries: BTreeMap<(usize, usize), GreensEntry>,
}

impl GreensTable {
    pub fn new() -> Self {
        Self::default()
    }

    /// Table holding only [`PUBLISHED_BOUNDS`].
    pub fn published() -> Self {
        let mut table = Self::new();
        for (d, n, value) in PUBLISHED_BOUNDS {
            table
                .insert(d, n, GreensEntry { value, method: GreensMethod::Published, error_estimate: 0.0 })
                .expect("published values are valid");
        }
        table
    }

    /// Computes every `(d, n)` in `pairs` by the integral method, in parallel.
    pub fn compute(pairs: &[(usize, usize)], exec: Execution) -> Result<Self> {
        let values = map_indexed(exec, pairs.len(), |i| greens_power_integral(pairs[i].0, pairs[i].1));
        let mut table = Self::new();
        for (&(d, n), value) in pairs.iter().zip(values) {
            let v = value?;
            table.insert(d, n, GreensEntry { value: v.value, method: GreensMethod::Integral, error_estimate: v.error_estimate })?;
        }
        Ok(table)
    }

    /// All finite `G_{d-1}^{*n}`, `n = 1..=3`, needed by the bounds for each `d` in `dims`.
    pub fn for_bounds(dims: impl IntoIterator<Item = usize>, exec: Execution) -> Result<Self> {
        let mut pairs: Vec<(usize, usize)> =
            dims.into_iter().flat_map(|d| (1..=3).map(move |n| (d.saturating_sub(1), n))).filter(|&(g, n)| g > 2 * n).collect();
        pairs.sort_unstable();
        pairs.dedup();
        Self::compute(&pairs, exec)
    }

    /// Inserts an entry after checking `d > 2n` and `value >= 1`.
    pub fn insert(&mut self, d: usize, n: usize, entry: GreensEntry) -> Result<()> {
        integral::check_finite(d, n)?;
        if !(entry.value >= 1.0) {
            return Err(Error::Domain(format!("G_{d}^{{*{n}}}(0) must be at least 1 (got {})", entry.value)));
        }
        self.entries.insert((d, n), entry);
        Ok(())
    }

    /// Copy of `self` with entries of `other` taking precedence.
    pub fn overlay(&self, other: &GreensTable) -> GreensTable {
        let mut entries = self.entries.clone();
        entries.extend(other.entries.iter().map(|(&k, &v)| (k, v)));
        GreensTable { entries }
    }

    pub fn entry(&self, d: usize, n: usize) -> Option<&GreensEntry> {
        self.entries.get(&(d, n))
    }

    /// The value at `(d, n)`, or a divergence/missing-entry error.
    pub fn value(&self, d: usize, n: usize) -> Result<f64> {
        integral::check_finite(d, n)?;
        self.entry(d, n).map(|e| e.value).ok_or(Error::MissingGreens { d, n })
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn rows(&self) -> Vec<GreensRow> {
        self.entries
            .iter()
            .map(|(&(d, n), e)| GreensRow { d, n, value: e.value, method: e.method, error_estimate: e.error_estimate })
            .collect()
    }

    pub fn from_rows(rows: &[GreensRow]) -> Result<Self> {
        let mut table = Self::new();
        for r in rows {
            table.insert(r.d, r.n, GreensEntry { value: r.value, method: r.method, error_estimate: r.error_estimate })?;
        }
        Ok(table)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn published_table() {
        let t = GreensTable::published();
        assert_eq!(t.len(), 5);
        assert_eq!(t.value(11, 3).unwrap(), 1.43043);
        assert_eq!(t.value(12, 1), Err(Error::MissingGreens { d: 12, n: 1 }));
        assert!(matches!(t.value(6, 3), Err(Error::Divergent(_))));
    }

    #[test]
    fn insert_checks_invariants() {
        let mut t = GreensTable::new();
        let e = GreensEntry { value: 0.9, method: GreensMethod::Integral, error_estimate: 0.0 };
        assert!(t.insert(8, 1, e).is_err());
        assert!(t.insert(4, 2, GreensEntry { value: 2.0, ..e }).is_err());
    }

    #[test]
    fn bounds_table_skips_divergent_entries() {
        let t = GreensTable::for_bounds([6, 7], Execution::Sequential).unwrap();
        let keys: Vec<_> = t.rows().iter().map(|r| (r.d, r.n)).collect();
        assert_eq!(keys, vec![(5, 1), (5, 2), (6, 1), (6, 2)]);
    }

    #[test]
    fn rows_round_trip() {
        let t = GreensTable::published();
        assert_eq!(GreensTable::from_rows(&t.rows()).unwrap(), t);
    }

    #[test]
    fn overlay_prefers_other() {
        let computed = GreensTable::compute(&[(11, 1), (12, 1)], Execution::Sequential).unwrap();
        let merged = computed.overlay(&GreensTable::published());
        assert_eq!(merged.entry(11, 1).unwrap().method, GreensMethod::Published);
        assert_eq!(merged.entry(12, 1).unwrap().method, GreensMethod::Integral);
    }
}
