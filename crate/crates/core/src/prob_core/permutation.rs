use crate::error::{check_len, Error, Result};

/// Largest dimension for which all n! permutations are enumerated.
pub const MAX_PERMUTATION_DIM: usize = 8;

/// A bijection on `{0, …, n-1}`.
///
/// Acting on a vector, `output[i] = v[mapping[i]]`, which is the product of
/// the permutation matrix with rows `e_{mapping[i]}` and `v`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Permutation {
    mapping: Vec<usize>,
}

impl Permutation {
    pub fn new(mapping: Vec<usize>) -> Result<Self> {
        let n = mapping.len();
        let mut seen = vec![false; n];
        for &m in &mapping {
            if m >= n || seen[m] {
                return Err(Error::Domain(format!("{mapping:?} is not a permutation")));
            }
            seen[m] = true;
        }
        Ok(Self { mapping })
    }

    pub fn identity(n: usize) -> Self {
        Self {
            mapping: (0..n).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.mapping.len()
    }

    pub fn is_empty(&self) -> bool {
        self.mapping.is_empty()
    }

    pub fn mapping(&self) -> &[usize] {
        &self.mapping
    }

    pub fn is_identity(&self) -> bool {
        self.mapping.iter().enumerate().all(|(i, &m)| i == m)
    }

    pub fn inverse(&self) -> Self {
        let mut inv = vec![0; self.mapping.len()];
        for (i, &m) in self.mapping.iter().enumerate() {
            inv[m] = i;
        }
        Self { mapping: inv }
    }

    /// `self ∘ other`: applying the result equals applying `self` to the
    /// output of `other`.
    pub fn compose(&self, other: &Permutation) -> Result<Self> {
        check_len(self.len(), other.len())?;
        Ok(Self {
            mapping: self.mapping.iter().map(|&m| other.mapping[m]).collect(),
        })
    }

    pub fn apply(&self, v: &[f64]) -> Result<Vec<f64>> {
        check_len(self.len(), v.len())?;
        Ok(self.mapping.iter().map(|&m| v[m]).collect())
    }

    /// Position of this permutation in lexicographic enumeration order.
    pub fn lexicographic_rank(&self) -> usize {
        lexicographic_rank(&self.mapping)
    }
}

/// `perm` applied to `v`: `output[i] = v[perm.mapping()[i]]`.
pub fn apply_permutation(perm: &Permutation, v: &[f64]) -> Result<Vec<f64>> {
    perm.apply(v)
}

/// Lehmer-code rank of a mapping in lexicographic order.
pub(crate) fn lexicographic_rank(mapping: &[usize]) -> usize {
    let n = mapping.len();
    let mut rank = 0;
    for i in 0..n {
        let smaller_after = mapping[i + 1..].iter().filter(|&&m| m < mapping[i]).count();
        rank = rank * (n - i) + smaller_after;
    }
    rank
}

pub fn factorial(n: usize) -> usize {
    (1..=n).product()
}

pub(crate) fn check_permutation_dim(n: usize) -> Result<()> {
    if (1..=MAX_PERMUTATION_DIM).contains(&n) {
        Ok(())
    } else {
        Err(Error::Config(format!(
            "permutation sums need 1 <= n <= {MAX_PERMUTATION_DIM}, got n = {n}"
        )))
    }
}

/// All n! permutations of `{0, …, n-1}` in lexicographic order, starting
/// with the identity.
pub fn permutations(n: usize) -> Result<Permutations> {
    check_permutation_dim(n)?;
    Ok(Permutations {
        next: Some((0..n).collect()),
    })
}

/// Iterator returned by [`permutations`].
#[derive(Debug, Clone)]
pub struct Permutations {
    next: Option<Vec<usize>>,
}

impl Iterator for Permutations {
    type Item = Permutation;

    fn next(&mut self) -> Option<Permutation> {
        let current = self.next.take()?;
        let mut succ = current.clone();
        if next_lexicographic(&mut succ) {
            self.next = Some(succ);
        }
        Some(Permutation { mapping: current })
    }
}

fn next_lexicographic(v: &mut [usize]) -> bool {
    let n = v.len();
    if n < 2 {
        return false;
    }
    let Some(pivot) = (0..n - 1).rev().find(|&i| v[i] < v[i + 1]) else {
        return false;
    };
    let succ = (pivot + 1..n).rev().find(|&j| v[j] > v[pivot]).unwrap();
    v.swap(pivot, succ);
    v[pivot + 1..].reverse();
    true
}

/// All permutations of dimension `n`, materialized.
pub fn all_permutations(n: usize) -> Result<Vec<Permutation>> {
    Ok(permutations(n)?.collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::collections::HashSet;

    #[test]
    fn counts_and_first() {
        let one: Vec<_> = permutations(1).unwrap().collect();
        assert_eq!(one, vec![Permutation::identity(1)]);
        assert_eq!(permutations(3).unwrap().count(), 6);
        let four: Vec<_> = permutations(4).unwrap().collect();
        assert_eq!(four.len(), 24);
        assert!(four[0].is_identity());
    }

    #[test]
    fn exhaustive_distinct_bijections() {
        for n in 1..=6 {
            let all = all_permutations(n).unwrap();
            assert_eq!(all.len(), factorial(n));
            let set: HashSet<_> = all.iter().map(|p| p.mapping().to_vec()).collect();
            assert_eq!(set.len(), factorial(n));
            for (k, p) in all.iter().enumerate() {
                assert!(Permutation::new(p.mapping().to_vec()).is_ok());
                assert_eq!(p.lexicographic_rank(), k);
            }
        }
    }

    #[test]
    fn dimension_guard() {
        assert!(matches!(permutations(0), Err(Error::Config(_))));
        assert!(matches!(permutations(9), Err(Error::Config(_))));
        assert_eq!(permutations(8).unwrap().count(), 40_320);
    }

    #[test]
    fn apply_examples() {
        let id = Permutation::identity(3);
        assert_eq!(id.apply(&[1.0, 2.0, 3.0]).unwrap(), vec![1.0, 2.0, 3.0]);
        // π = {2,3,1} in one-based notation
        let p = Permutation::new(vec![1, 2, 0]).unwrap();
        let (a, b, c) = (10.0, 20.0, 30.0);
        assert_eq!(p.apply(&[a, b, c]).unwrap(), vec![b, c, a]);
        assert!(matches!(
            p.apply(&[1.0, 2.0]),
            Err(Error::LengthMismatch { .. })
        ));
    }

    #[test]
    fn rejects_non_bijections() {
        assert!(Permutation::new(vec![0, 0]).is_err());
        assert!(Permutation::new(vec![0, 2]).is_err());
    }

    proptest! {
        #[test]
        fn inverse_roundtrip(n in 1usize..=6, k in 0usize..720, v in proptest::collection::vec(-5.0f64..5.0, 6)) {
            let all = all_permutations(n).unwrap();
            let p = &all[k % all.len()];
            let v = &v[..n];
            let back = p.inverse().apply(&p.apply(v).unwrap()).unwrap();
            prop_assert_eq!(back, v.to_vec());
            prop_assert!(p.compose(&p.inverse()).unwrap().is_identity());
        }

        #[test]
        fn apply_preserves_multiset(n in 1usize..=5, k in 0usize..120, v in proptest::collection::vec(-5.0f64..5.0, 5)) {
            let all = all_permutations(n).unwrap();
            let p = &all[k % all.len()];
            let mut sorted = v[..n].to_vec();
            sorted.sort_by(f64::total_cmp);
            let mut out = p.apply(&sorted).unwrap();
            out.sort_by(f64::total_cmp);
            prop_assert_eq!(out, sorted);
        }
    }
}
