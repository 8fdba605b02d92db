//! Dense, transitively closed view of a partial order, for instances whose
//! order arrives as point domination or an arbitrary comparator rather than
//! as an edge list.

use crate::bits::{BitMatrix, Mask};
use crate::error::{Error, Result};

/// A strict partial order stored as successor and predecessor bit rows.
/// Both matrices are transitively closed; `succ.get(u, v)` means `u ≺ v`.
#[derive(Clone, Debug)]
pub(crate) struct Relation {
    pub succ: BitMatrix,
    pub pred: BitMatrix,
    /// A linear extension: vertices sorted by predecessor count.
    pub topo: Vec<usize>,
}

impl Relation {
    pub fn from_succ(succ: BitMatrix) -> Relation {
        let pred = succ.transpose();
        let n = succ.len();
        let mut topo: Vec<usize> = (0..n).collect();
        topo.sort_by_key(|&v| pred.row_count(v));
        Relation { succ, pred, topo }
    }

    /// Evaluates `precedes` on every ordered pair. The comparator must be a
    /// strict partial order; antisymmetry is always checked, transitivity is
    /// spot-checked (exhaustively for small n) under debug assertions.
    pub fn from_comparator<F>(n: usize, mut precedes: F) -> Result<Relation>
    where
        F: FnMut(usize, usize) -> bool,
    {
        let mut succ = BitMatrix::new(n);
        for u in 0..n {
            for v in 0..n {
                if u != v && precedes(u, v) {
                    succ.set(u, v);
                }
            }
        }
        for u in 0..n {
            for v in u + 1..n {
                if succ.get(u, v) && succ.get(v, u) {
                    return Err(Error::OrderViolation([u, v, u]));
                }
            }
        }
        if cfg!(debug_assertions) {
            spot_check_transitivity(&succ)?;
        }
        Ok(Relation::from_succ(succ))
    }

    pub fn len(&self) -> usize {
        self.succ.len()
    }

    /// Vertices inside `within` that sit in at least one violating pair.
    pub fn violating_mask(&self, f: &[i64], within: &Mask) -> Vec<bool> {
        let n = self.len();
        let mut out = vec![false; n];
        for v in 0..n {
            if !within.contains(v) {
                continue;
            }
            let bad = within
                .iter_intersection(self.pred.row(v))
                .any(|u| f[u] > f[v])
                || within
                    .iter_intersection(self.succ.row(v))
                    .any(|w| f[w] < f[v]);
            out[v] = bad;
        }
        out
    }

    /// Value bounds imposed on every vertex by holding `fixed` vertices at
    /// their values: max over fixed predecessors, min over fixed successors.
    pub fn bands(&self, f: &[i64], fixed: &[bool]) -> (Vec<i64>, Vec<i64>) {
        let n = self.len();
        let mut lo = vec![i64::MIN; n];
        let mut hi = vec![i64::MAX; n];
        let all = Mask::full(n);
        for v in 0..n {
            for u in all.iter_intersection(self.pred.row(v)) {
                if fixed[u] {
                    lo[v] = lo[v].max(f[u]);
                }
            }
            for w in all.iter_intersection(self.succ.row(v)) {
                if fixed[w] {
                    hi[v] = hi[v].min(f[w]);
                }
            }
        }
        (lo, hi)
    }

    /// Ordered pairs `(u, v)` inside `within` with `u ≺ v` and `f(u) > f(v)`.
    pub fn violating_pairs(&self, f: &[i64], within: &Mask) -> Vec<(usize, usize)> {
        let mut edges = Vec::new();
        for u in 0..self.len() {
            if !within.contains(u) {
                continue;
            }
            for v in within.iter_intersection(self.succ.row(u)) {
                if f[u] > f[v] {
                    edges.push((u, v));
                }
            }
        }
        edges
    }

    /// Linear extension restricted to `within`.
    pub fn topo_within(&self, within: &Mask) -> Vec<usize> {
        self.topo.iter().copied().filter(|&v| within.contains(v)).collect()
    }

    /// True iff `values` never decrease along the order.
    pub fn is_isotonic_i64(&self, values: &[i64]) -> bool {
        let full = Mask::full(self.len());
        (0..self.len()).all(|u| {
            full.iter_intersection(self.succ.row(u))
                .all(|v| values[u] <= values[v])
        })
    }

    /// True iff `values` never decrease along the order.
    pub fn is_isotonic_rat(&self, values: &[crate::rational::Rat]) -> bool {
        let full = Mask::full(self.len());
        (0..self.len()).all(|u| {
            full.iter_intersection(self.succ.row(u))
                .all(|v| values[u] <= values[v])
        })
    }

}

/// Transitivity check: exhaustive for n ≤ 128, otherwise a deterministic
/// sample of pairs continued through every successor.
fn spot_check_transitivity(succ: &BitMatrix) -> Result<()> {
    let n = succ.len();
    let full = Mask::full(n);
    let check_via = |u: usize, v: usize| -> Option<[usize; 3]> {
        full.iter_intersection(succ.row(v))
            .find(|&w| w != u && !succ.get(u, w))
            .map(|w| [u, v, w])
    };
    if n <= 128 {
        for u in 0..n {
            for v in full.iter_intersection(succ.row(u)) {
                if let Some(w) = check_via(u, v) {
                    return Err(Error::OrderViolation(w));
                }
            }
        }
    } else {
        let stride = (n * n / 100_000).max(1);
        let mut k = 0;
        for u in 0..n {
            for v in 0..n {
                k += 1;
                if k % stride == 0 && succ.get(u, v) {
                    if let Some(w) = check_via(u, v) {
                        return Err(Error::OrderViolation(w));
                    }
                }
            }
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn diamond() -> Relation {
        // 0 ≺ {1,2} ≺ 3 as a closed relation.
        Relation::from_comparator(4, |u, v| {
            matches!((u, v), (0, 1) | (0, 2) | (0, 3) | (1, 3) | (2, 3))
        })
        .unwrap()
    }

    #[test]
    fn comparator_relation_has_closed_rows() {
        let r = diamond();
        assert!(r.succ.get(0, 3));
        assert!(r.pred.get(3, 0));
        assert_eq!(r.succ.row_count(0), 3);
    }

    #[test]
    fn antisymmetry_violation_detected() {
        let err = Relation::from_comparator(2, |_, _| true).unwrap_err();
        assert!(matches!(err, Error::OrderViolation(_)));
    }

    #[test]
    fn transitivity_violation_detected_in_debug() {
        if cfg!(debug_assertions) {
            let err = Relation::from_comparator(3, |u, v| (u, v) == (0, 1) || (u, v) == (1, 2))
                .unwrap_err();
            assert!(matches!(err, Error::OrderViolation([0, 1, 2])));
        }
    }

    #[test]
    fn violating_masks_and_pairs() {
        let r = diamond();
        let f = [5, 1, 9, 4];
        let full = Mask::full(4);
        let pairs = r.violating_pairs(&f, &full);
        assert_eq!(pairs, vec![(0, 1), (0, 3), (2, 3)]);
        let mask = r.violating_mask(&f, &full);
        assert_eq!(mask, vec![true, true, true, true]);
        // Restricting to {0, 2, 3} hides the pair through vertex 1.
        let sub = Mask::from_indices(4, &[0, 2, 3]);
        let pairs = r.violating_pairs(&f, &sub);
        assert_eq!(pairs, vec![(0, 3), (2, 3)]);
    }

    #[test]
    fn bands_from_fixed_vertices() {
        let r = diamond();
        let f = [5, 1, 9, 4];
        let fixed = [false, true, true, false];
        let (lo, hi) = r.bands(&f, &fixed);
        assert_eq!(hi[0], 1); // must stay below fixed successor 1
        assert_eq!(lo[3], 9); // must stay above fixed predecessor 2
    }

    #[test]
    fn topo_within_is_a_linear_extension() {
        let r = diamond();
        let within = Mask::from_indices(4, &[0, 1, 3]);
        let t = r.topo_within(&within);
        assert_eq!(t.len(), 3);
        let pos0 = t.iter().position(|&v| v == 0).unwrap();
        let pos3 = t.iter().position(|&v| v == 3).unwrap();
        assert!(pos0 < pos3);
    }
}
