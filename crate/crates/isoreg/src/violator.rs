//! Violator graphs: directed graphs whose paths between real vertices are
//! exactly the violating pairs of a weighted function on a partial order —
//! pairs `u ≺ v` with `f(u) > f(v)`. A maximum-weight antichain of such a
//! graph is the set of vertices an optimal weighted-change regression keeps.

pub mod points;
pub mod steiner;

pub use points::{boxes_to_domination, rendezvous_violator, PointSet};
pub use steiner::{down_choices, steiner_relation, up_choices, SteinerCoordinate, SteinerOrder};

use crate::bits::BitMatrix;
use crate::error::Result;
use crate::order::{closure_matrix, topological_order, Dag, WeightedFunction};
use crate::relation::Relation;

/// A violator graph. Vertices `0..real` are the instance's own vertices;
/// `real..real+steiner` are helper vertices used only for routing. Every
/// edge goes real→helper, helper→real, or real→real.
#[derive(Clone, Debug)]
pub struct ViolatorDag {
    real: usize,
    steiner: usize,
    edges: Vec<(u32, u32)>,
}

impl ViolatorDag {
    pub(crate) fn new(real: usize, steiner: usize, edges: Vec<(u32, u32)>) -> ViolatorDag {
        ViolatorDag {
            real,
            steiner,
            edges,
        }
    }

    pub fn real_vertices(&self) -> usize {
        self.real
    }

    pub fn steiner_vertices(&self) -> usize {
        self.steiner
    }

    pub fn total_vertices(&self) -> usize {
        self.real + self.steiner
    }

    pub fn edges(&self) -> &[(u32, u32)] {
        &self.edges
    }

    /// Reachability between real vertices, computed by transitive closure
    /// over the whole graph. Quadratic memory in the total vertex count —
    /// meant for verification on small graphs, not production sizes.
    pub fn reachability(&self) -> Result<BitMatrix> {
        let total = self.total_vertices();
        let edges: Vec<(usize, usize)> = self
            .edges
            .iter()
            .map(|&(u, v)| (u as usize, v as usize))
            .collect();
        let topo = topological_order(total, &edges)?;
        let mut adj = vec![Vec::new(); total];
        for &(u, v) in &edges {
            adj[u].push(v);
        }
        let mut m = BitMatrix::new(total);
        for &v in topo.iter().rev() {
            for i in 0..adj[v].len() {
                let w = adj[v][i];
                m.or_row_into(w, v);
                m.set(v, w);
            }
        }
        let mut real = BitMatrix::new(self.real);
        for u in 0..self.real {
            for v in m.iter_row(u) {
                if v < self.real {
                    real.set(u, v);
                }
            }
        }
        Ok(real)
    }
}

/// Reachability rows of a dag: bit `(u, v)` set iff `u ≺ v`.
pub fn transitive_closure(dag: &Dag) -> BitMatrix {
    closure_matrix(dag)
}

/// The violator graph of `wf` on a dag, with one edge per violating pair
/// (computed through the transitive closure; no helper vertices).
pub fn violator_closure(dag: &Dag, wf: &WeightedFunction) -> Result<ViolatorDag> {
    let f = wf.values();
    let closure = closure_matrix(dag);
    let mut edges = Vec::new();
    for u in 0..dag.len() {
        for v in closure.iter_row(u) {
            if f[u] > f[v] {
                edges.push((u as u32, v as u32));
            }
        }
    }
    Ok(ViolatorDag::new(dag.len(), 0, edges))
}

/// The violator graph of `wf` on an order given as a comparator over
/// `0..n`. The comparator must define a strict partial order: antisymmetry
/// is checked, transitivity spot-checked under debug assertions.
pub fn violator_pairwise<F>(n: usize, precedes: F, wf: &WeightedFunction) -> Result<ViolatorDag>
where
    F: FnMut(usize, usize) -> bool,
{
    let rel = Relation::from_comparator(n, precedes)?;
    let f = wf.values();
    let mut edges = Vec::new();
    for u in 0..n {
        for v in rel.succ.iter_row(u) {
            if f[u] > f[v] {
                edges.push((u as u32, v as u32));
            }
        }
    }
    Ok(ViolatorDag::new(n, 0, edges))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn wf(values: &[i64]) -> WeightedFunction {
        WeightedFunction::unweighted(values.to_vec()).unwrap()
    }

    #[test]
    fn closure_violator_lists_all_violating_pairs() {
        // Chain with values 0,5,3,4,9: pairs (1,2) and (1,3).
        let dag = Dag::chain(5);
        let vd = violator_closure(&dag, &wf(&[0, 5, 3, 4, 9])).unwrap();
        assert_eq!(vd.real_vertices(), 5);
        assert_eq!(vd.steiner_vertices(), 0);
        assert_eq!(vd.edges(), &[(1, 2), (1, 3)]);
    }

    #[test]
    fn pairwise_violator_agrees_with_closure() {
        let dag = Dag::new(4, vec![(0, 1), (1, 3), (0, 2)]).unwrap();
        let f = wf(&[7, 3, 2, 5]);
        let a = violator_closure(&dag, &f).unwrap();
        let closure = transitive_closure(&dag);
        let b = violator_pairwise(4, |u, v| closure.get(u, v), &f).unwrap();
        let mut ea = a.edges().to_vec();
        let mut eb = b.edges().to_vec();
        ea.sort_unstable();
        eb.sort_unstable();
        assert_eq!(ea, eb);
    }

    #[test]
    fn reachability_includes_helper_paths() {
        // 0 → helper(2) → 1 gives real reachability (0, 1).
        let vd = ViolatorDag::new(2, 1, vec![(0, 2), (2, 1)]);
        let m = vd.reachability().unwrap();
        assert!(m.get(0, 1));
        assert!(!m.get(1, 0));
    }
}
