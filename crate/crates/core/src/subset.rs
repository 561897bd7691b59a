use crate::error::{Error, Result};

/// A set of qubit indices, kept sorted and free of duplicates.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct QubitSubset {
    indices: Vec<usize>,
}

impl QubitSubset {
    /// Builds a subset from arbitrary indices. Duplicates are rejected rather
    /// than merged, as are indices not below `n` and the empty set.
    pub fn new(indices: impl IntoIterator<Item = usize>, n: usize) -> Result<Self> {
        let mut indices: Vec<usize> = indices.into_iter().collect();
        if indices.is_empty() {
            return Err(Error::InvalidSubset("empty subset".into()));
        }
        indices.sort_unstable();
        if indices.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::InvalidSubset(format!("duplicate index in {indices:?}")));
        }
        if let Some(&q) = indices.last() {
            if q >= n {
                return Err(Error::InvalidSubset(format!("index {q} out of range for {n} qubits")));
            }
        }
        Ok(Self { indices })
    }

    /// Contiguous range `start..end`.
    pub fn range(start: usize, end: usize, n: usize) -> Result<Self> {
        Self::new(start..end, n)
    }

    pub fn indices(&self) -> &[usize] {
        &self.indices
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    pub fn contains(&self, q: usize) -> bool {
        self.indices.binary_search(&q).is_ok()
    }

    /// Complement within `0..n`; `None` when the subset already covers every qubit.
    pub fn complement(&self, n: usize) -> Option<Self> {
        let rest: Vec<usize> = (0..n).filter(|q| !self.contains(*q)).collect();
        if rest.is_empty() {
            None
        } else {
            Some(Self { indices: rest })
        }
    }

    pub fn is_disjoint(&self, other: &Self) -> bool {
        !self.indices.iter().any(|q| other.contains(*q))
    }

    pub fn union(&self, other: &Self) -> Self {
        let mut indices: Vec<usize> = self.indices.iter().chain(&other.indices).copied().collect();
        indices.sort_unstable();
        indices.dedup();
        Self { indices }
    }

    /// Bit mask of the subset (requires every index < 64).
    pub fn mask(&self) -> u64 {
        self.indices.iter().fold(0u64, |m, &q| m | (1u64 << q))
    }
}
