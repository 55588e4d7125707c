use std::cmp::Ordering;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A real vector whose entries are nondecreasing.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct SortedVector(Vec<f64>);

impl SortedVector {
    /// Wraps `values`, rejecting input outside the sorted region.
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if is_in_sorted_region(&values) {
            Ok(Self(values))
        } else {
            Err(Error::Unsorted)
        }
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }
}

impl TryFrom<Vec<f64>> for SortedVector {
    type Error = Error;

    fn try_from(values: Vec<f64>) -> Result<Self> {
        Self::new(values)
    }
}

impl From<SortedVector> for Vec<f64> {
    fn from(v: SortedVector) -> Self {
        v.0
    }
}

impl AsRef<[f64]> for SortedVector {
    fn as_ref(&self) -> &[f64] {
        &self.0
    }
}

/// Stable ascending sort; ties keep their original order.
pub fn sort_ascending(v: &[f64]) -> SortedVector {
    let mut out = v.to_vec();
    out.sort_by(|a, b| a.partial_cmp(b).unwrap_or(Ordering::Equal));
    SortedVector(out)
}

/// Indicator of the (closed) sorted region: `v[i] <= v[i+1]` for all i.
pub fn is_in_sorted_region(v: &[f64]) -> bool {
    v.windows(2).all(|w| w[0] <= w[1])
}

/// Writes into `idx` the stable argsort of `v`, so that `v[idx[0]] <= v[idx[1]] <= …`.
///
/// Insertion sort: the inputs here have at most eight entries.
pub(crate) fn argsort_into(v: &[f64], idx: &mut [usize]) {
    for (i, slot) in idx.iter_mut().enumerate() {
        *slot = i;
    }
    for i in 1..idx.len() {
        let cur = idx[i];
        let mut j = i;
        while j > 0 && v[idx[j - 1]] > v[cur] {
            idx[j] = idx[j - 1];
            j -= 1;
        }
        idx[j] = cur;
    }
}
