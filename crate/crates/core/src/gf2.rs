//! Dense GF(2) matrices with rows packed into `u64` words.

/// Row-major bit matrix over GF(2).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BitMatrix {
    rows: usize,
    cols: usize,
    words: usize,
    data: Vec<u64>,
}

impl BitMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        let words = cols.div_ceil(64).max(1);
        Self { rows, cols, words, data: vec![0; rows * words] }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> bool {
        (self.data[r * self.words + c / 64] >> (c % 64)) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, r: usize, c: usize, v: bool) {
        let w = &mut self.data[r * self.words + c / 64];
        let bit = 1u64 << (c % 64);
        if v {
            *w |= bit;
        } else {
            *w &= !bit;
        }
    }

    pub fn row(&self, r: usize) -> &[u64] {
        &self.data[r * self.words..(r + 1) * self.words]
    }

    /// Rank by word-wise Gaussian elimination. Consumes a scratch copy.
    pub fn rank(&self) -> usize {
        let mut m = self.clone();
        m.eliminate()
    }

    /// In-place row reduction; returns the rank.
    pub fn eliminate(&mut self) -> usize {
        let w = self.words;
        let mut rank = 0;
        for c in 0..self.cols {
            if rank == self.rows {
                break;
            }
            let (wi, bit) = (c / 64, 1u64 << (c % 64));
            let Some(p) = (rank..self.rows).find(|&r| self.data[r * w + wi] & bit != 0) else {
                continue;
            };
            if p != rank {
                for k in 0..w {
                    self.data.swap(p * w + k, rank * w + k);
                }
            }
            for r in 0..self.rows {
                if r != rank && self.data[r * w + wi] & bit != 0 {
                    for k in wi..w {
                        let v = self.data[rank * w + k];
                        self.data[r * w + k] ^= v;
                    }
                }
            }
            rank += 1;
        }
        rank
    }
}

/// Rank of a list of single-word rows (columns < 64). Rows are overwritten.
pub fn rank_u64(rows: &mut [u64]) -> usize {
    let mut rank = 0;
    for i in 0..rows.len() {
        let pivot = rows[i];
        if pivot == 0 {
            continue;
        }
        let low = pivot & pivot.wrapping_neg();
        for r in rows.iter_mut().skip(i + 1) {
            if *r & low != 0 {
                *r ^= pivot;
            }
        }
        rank += 1;
    }
    rank
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn brute_rank(rows: &[u64], cols: usize) -> usize {
        // size of the row span by enumeration of all combinations
        let mut span = std::collections::HashSet::new();
        span.insert(0u64);
        for &r in rows {
            let cur: Vec<u64> = span.iter().copied().collect();
            for v in cur {
                span.insert(v ^ (r & ((1u64 << cols) - 1)));
            }
        }
        span.len().trailing_zeros() as usize
    }

    #[test]
    fn identity_rank() {
        let mut m = BitMatrix::zeros(5, 70);
        for i in 0..5 {
            m.set(i, i * 13, true);
        }
        assert_eq!(m.rank(), 5);
        m.set(4, 0, true);
        m.set(4, 52, false);
        assert_eq!(m.rank(), 4);
        assert!(m.get(4, 0));
    }

    proptest! {
        #[test]
        fn rank_matches_span_size(rows in proptest::collection::vec(0u64..(1 << 12), 1..10)) {
            let mut m = BitMatrix::zeros(rows.len(), 12);
            for (i, &r) in rows.iter().enumerate() {
                for c in 0..12 {
                    m.set(i, c, (r >> c) & 1 == 1);
                }
            }
            let expected = brute_rank(&rows, 12);
            prop_assert_eq!(m.rank(), expected);
            let mut copy = rows.clone();
            prop_assert_eq!(rank_u64(&mut copy), expected);
        }
    }
}
