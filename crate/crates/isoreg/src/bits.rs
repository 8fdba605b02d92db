//! Packed boolean matrices for reachability sets.

/// A dense n×n bit matrix with 64-bit row words.
///
/// Row `u` holds the set of columns related to `u`; unions of whole rows
/// make transitive-closure accumulation cheap.
#[derive(Clone, Debug)]
pub struct BitMatrix {
    n: usize,
    words: usize,
    bits: Vec<u64>,
}

impl BitMatrix {
    pub fn new(n: usize) -> Self {
        let words = n.div_ceil(64);
        BitMatrix {
            n,
            words,
            bits: vec![0; n * words],
        }
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    #[inline]
    pub fn set(&mut self, row: usize, col: usize) {
        debug_assert!(row < self.n && col < self.n);
        self.bits[row * self.words + col / 64] |= 1u64 << (col % 64);
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize) -> bool {
        debug_assert!(row < self.n && col < self.n);
        self.bits[row * self.words + col / 64] >> (col % 64) & 1 == 1
    }

    /// OR the source row into the destination row.
    pub fn or_row_into(&mut self, src: usize, dst: usize) {
        debug_assert!(src != dst);
        let (s, d) = (src * self.words, dst * self.words);
        for w in 0..self.words {
            let v = self.bits[s + w];
            self.bits[d + w] |= v;
        }
    }

    pub fn row(&self, row: usize) -> &[u64] {
        &self.bits[row * self.words..(row + 1) * self.words]
    }

    /// Number of set bits in a row.
    pub fn row_count(&self, row: usize) -> usize {
        self.row(row).iter().map(|w| w.count_ones() as usize).sum()
    }

    /// Iterates set columns of a row in ascending order.
    pub fn iter_row(&self, row: usize) -> impl Iterator<Item = usize> + '_ {
        let words = self.row(row);
        words.iter().enumerate().flat_map(|(wi, &w)| {
            let base = wi * 64;
            BitIter(w).map(move |b| base + b)
        })
    }

    /// Transposed copy (column sets become row sets).
    pub fn transpose(&self) -> BitMatrix {
        let mut t = BitMatrix::new(self.n);
        for r in 0..self.n {
            for c in self.iter_row(r) {
                t.set(c, r);
            }
        }
        t
    }
}

struct BitIter(u64);

impl Iterator for BitIter {
    type Item = usize;

    fn next(&mut self) -> Option<usize> {
        if self.0 == 0 {
            None
        } else {
            let b = self.0.trailing_zeros() as usize;
            self.0 &= self.0 - 1;
            Some(b)
        }
    }
}

/// A subset of 0..n as a packed mask, used to restrict relation scans to a
/// subproblem without copying the matrix.
#[derive(Clone, Debug)]
pub struct Mask {
    words: Vec<u64>,
}

impl Mask {
    pub fn empty(n: usize) -> Self {
        Mask {
            words: vec![0; n.div_ceil(64)],
        }
    }

    pub fn full(n: usize) -> Self {
        let mut m = Mask::empty(n);
        for i in 0..n {
            m.insert(i);
        }
        m
    }

    pub fn from_indices(n: usize, indices: &[usize]) -> Self {
        let mut m = Mask::empty(n);
        for &i in indices {
            m.insert(i);
        }
        m
    }

    #[inline]
    pub fn insert(&mut self, i: usize) {
        self.words[i / 64] |= 1 << (i % 64);
    }

    #[inline]
    pub fn remove(&mut self, i: usize) {
        self.words[i / 64] &= !(1 << (i % 64));
    }

    #[inline]
    pub fn contains(&self, i: usize) -> bool {
        self.words[i / 64] >> (i % 64) & 1 == 1
    }

    pub fn words(&self) -> &[u64] {
        &self.words
    }

    /// Iterates row ∩ mask, ascending.
    pub fn iter_intersection<'a>(
        &'a self,
        row: &'a [u64],
    ) -> impl Iterator<Item = usize> + 'a {
        row.iter()
            .zip(&self.words)
            .enumerate()
            .flat_map(|(wi, (&r, &m))| {
                let base = wi * 64;
                BitIter(r & m).map(move |b| base + b)
            })
    }

    /// True if row ∩ mask is nonempty.
    pub fn intersects(&self, row: &[u64]) -> bool {
        row.iter().zip(&self.words).any(|(&r, &m)| r & m != 0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn set_get_round_trip() {
        let mut m = BitMatrix::new(130);
        m.set(0, 0);
        m.set(3, 127);
        m.set(129, 64);
        assert!(m.get(0, 0) && m.get(3, 127) && m.get(129, 64));
        assert!(!m.get(0, 1) && !m.get(127, 3));
    }

    #[test]
    fn row_union_and_iteration() {
        let mut m = BitMatrix::new(100);
        m.set(1, 5);
        m.set(1, 70);
        m.set(2, 6);
        m.or_row_into(1, 2);
        assert_eq!(m.iter_row(2).collect::<Vec<_>>(), vec![5, 6, 70]);
        assert_eq!(m.row_count(2), 3);
    }

    #[test]
    fn transpose_flips_pairs() {
        let mut m = BitMatrix::new(70);
        m.set(3, 69);
        m.set(69, 0);
        let t = m.transpose();
        assert!(t.get(69, 3) && t.get(0, 69));
        assert!(!t.get(3, 69));
    }

    #[test]
    fn mask_intersection() {
        let mut m = BitMatrix::new(128);
        m.set(0, 10);
        m.set(0, 90);
        let mask = Mask::from_indices(128, &[90, 91]);
        assert_eq!(mask.iter_intersection(m.row(0)).collect::<Vec<_>>(), vec![90]);
        assert!(mask.intersects(m.row(0)));
        assert!(!Mask::empty(128).intersects(m.row(0)));
    }
}
