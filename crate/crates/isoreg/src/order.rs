//! Partial orders as dags, weighted functions on their vertices, and the
//! shared vocabulary of regression results.
//!
//! A function `g` is isotonic on a dag when `u ≺ v` (reachability) implies
//! `g(u) ≤ g(v)`. Everything in this crate minimizes a per-metric distance
//! to the input function over the set of isotonic functions.

use crate::bits::BitMatrix;
use crate::error::{Error, Result};
use crate::rational::{rat, rat_to_f64, Rat};
use num_traits::Zero;

/// Directed acyclic graph whose reachability relation is the partial order.
///
/// Construction validates endpoints, rejects self-loops and duplicate
/// edges, and fails with a witness cycle if the edge list is cyclic.
/// Redundant (transitively implied) edges are allowed.
#[derive(Clone, Debug)]
pub struct Dag {
    n: usize,
    edges: Vec<(usize, usize)>,
    out_adj: Vec<Vec<u32>>,
    in_adj: Vec<Vec<u32>>,
    topo: Vec<usize>,
}

impl Dag {
    pub fn new(n: usize, edges: Vec<(usize, usize)>) -> Result<Self> {
        let mut seen = std::collections::HashSet::with_capacity(edges.len());
        for &(u, v) in &edges {
            if u >= n || v >= n {
                return Err(Error::InvalidVertex(u, v, n));
            }
            if u == v {
                return Err(Error::SelfLoop(u));
            }
            if !seen.insert((u, v)) {
                return Err(Error::DuplicateEdge(u, v));
            }
        }
        let topo = topological_order(n, &edges)?;
        let mut out_adj = vec![Vec::new(); n];
        let mut in_adj = vec![Vec::new(); n];
        for &(u, v) in &edges {
            out_adj[u].push(v as u32);
            in_adj[v].push(u as u32);
        }
        Ok(Dag {
            n,
            edges,
            out_adj,
            in_adj,
            topo,
        })
    }

    /// A chain 0 → 1 → … → n−1.
    pub fn chain(n: usize) -> Self {
        let edges = (1..n).map(|i| (i - 1, i)).collect();
        Dag::new(n, edges).expect("chain edges are always valid")
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn successors(&self, v: usize) -> &[u32] {
        &self.out_adj[v]
    }

    pub fn predecessors(&self, v: usize) -> &[u32] {
        &self.in_adj[v]
    }

    /// A fixed topological order computed at construction.
    pub fn topo(&self) -> &[usize] {
        &self.topo
    }

    /// The dag induced on `keep` (ascending vertex list), relabelled to
    /// 0..keep.len(). Only edges with both endpoints kept survive, so
    /// relations that pass through dropped vertices are not represented;
    /// callers that drop vertices must restore such constraints themselves.
    pub fn induced(&self, keep: &[usize]) -> (Dag, Vec<Option<usize>>) {
        let mut to_new = vec![None; self.n];
        for (new, &old) in keep.iter().enumerate() {
            to_new[old] = Some(new);
        }
        let edges = self
            .edges
            .iter()
            .filter_map(|&(u, v)| Some((to_new[u]?, to_new[v]?)))
            .collect();
        let dag = Dag::new(keep.len(), edges).expect("induced subgraph of a dag is a dag");
        (dag, to_new)
    }

    /// Weakly connected components, each as an ascending vertex list.
    pub fn weak_components(&self) -> Vec<Vec<usize>> {
        let mut parent: Vec<usize> = (0..self.n).collect();
        fn find(parent: &mut Vec<usize>, mut x: usize) -> usize {
            while parent[x] != x {
                parent[x] = parent[parent[x]];
                x = parent[x];
            }
            x
        }
        for &(u, v) in &self.edges {
            let (ru, rv) = (find(&mut parent, u), find(&mut parent, v));
            if ru != rv {
                parent[ru.max(rv)] = ru.min(rv);
            }
        }
        let mut groups: std::collections::BTreeMap<usize, Vec<usize>> = Default::default();
        for v in 0..self.n {
            let r = find(&mut parent, v);
            groups.entry(r).or_default().push(v);
        }
        groups.into_values().collect()
    }
}

/// Topological order of the vertices, or a witness cycle.
///
/// Iterative depth-first search; the witness is the vertex sequence of one
/// directed cycle found via a back edge.
pub fn topological_order(n: usize, edges: &[(usize, usize)]) -> Result<Vec<usize>> {
    let mut adj = vec![Vec::new(); n];
    for &(u, v) in edges {
        if u >= n || v >= n {
            return Err(Error::InvalidVertex(u, v, n));
        }
        adj[u].push(v);
    }
    const WHITE: u8 = 0;
    const GRAY: u8 = 1;
    const BLACK: u8 = 2;
    let mut color = vec![WHITE; n];
    let mut order = Vec::with_capacity(n);
    let mut stack: Vec<(usize, usize)> = Vec::new();
    let mut path: Vec<usize> = Vec::new();
    for root in 0..n {
        if color[root] != WHITE {
            continue;
        }
        color[root] = GRAY;
        stack.push((root, 0));
        path.push(root);
        while let Some(&mut (v, ref mut i)) = stack.last_mut() {
            if *i < adj[v].len() {
                let w = adj[v][*i];
                *i += 1;
                match color[w] {
                    WHITE => {
                        color[w] = GRAY;
                        stack.push((w, 0));
                        path.push(w);
                    }
                    GRAY => {
                        let start = path.iter().position(|&x| x == w).unwrap();
                        return Err(Error::CycleDetected(path[start..].to_vec()));
                    }
                    _ => {}
                }
            } else {
                color[v] = BLACK;
                order.push(v);
                stack.pop();
                path.pop();
            }
        }
    }
    order.reverse();
    Ok(order)
}

/// Integer function values with nonnegative integer weights, one pair per
/// vertex. Zero weights are legal: such vertices constrain the order but
/// contribute nothing to any error.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WeightedFunction {
    values: Vec<i64>,
    weights: Vec<i64>,
}

impl WeightedFunction {
    pub fn new(values: Vec<i64>, weights: Vec<i64>) -> Result<Self> {
        if values.len() != weights.len() {
            return Err(Error::LengthMismatch {
                context: "values vs weights",
                expected: values.len(),
                got: weights.len(),
            });
        }
        let mut wsum: i128 = 0;
        for (i, &w) in weights.iter().enumerate() {
            if w < 0 {
                return Err(Error::NegativeWeight(w, i));
            }
            wsum += w as i128;
        }
        let max_abs = values.iter().map(|v| v.unsigned_abs()).max().unwrap_or(0);
        if wsum.checked_mul(max_abs as i128).is_none_or(|p| p > i64::MAX as i128) {
            return Err(Error::Overflow);
        }
        Ok(WeightedFunction { values, weights })
    }

    pub fn unweighted(values: Vec<i64>) -> Result<Self> {
        let n = values.len();
        WeightedFunction::new(values, vec![1; n])
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn values(&self) -> &[i64] {
        &self.values
    }

    pub fn weights(&self) -> &[i64] {
        &self.weights
    }

    pub fn total_weight(&self) -> i128 {
        self.weights.iter().map(|&w| w as i128).sum()
    }

    /// Restriction to `keep` (ascending original indices).
    pub fn restricted(&self, keep: &[usize]) -> WeightedFunction {
        WeightedFunction {
            values: keep.iter().map(|&i| self.values[i]).collect(),
            weights: keep.iter().map(|&i| self.weights[i]).collect(),
        }
    }
}

/// The distance being minimized.
///
/// All finite-p errors are reported as the p-th power sum Σ w·|f−g|^p
/// without the final 1/p root; L0 is the total weight of changed vertices.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Metric {
    L0,
    L1,
    L2,
    Lp(f64),
}

impl Metric {
    /// Validated Lp metric; `p` must be finite and greater than 1
    /// (p = 1 is `L1`, p = 2 may use `L2`).
    pub fn lp(p: f64) -> Result<Metric> {
        if !p.is_finite() || p <= 1.0 {
            return Err(Error::InvalidP(p));
        }
        Ok(Metric::Lp(p))
    }
}

/// An exact or floating error total. L0/L1/L2 errors of integer data are
/// exact rationals; Lp power sums for non-integer p are floats.
#[derive(Clone, Debug, PartialEq)]
pub enum ErrorSum {
    Exact(Rat),
    Approx(f64),
}

impl ErrorSum {
    pub fn as_f64(&self) -> f64 {
        match self {
            ErrorSum::Exact(r) => rat_to_f64(r),
            ErrorSum::Approx(x) => *x,
        }
    }

    /// The exact value; panics if the sum was only computed approximately.
    pub fn expect_exact(&self) -> &Rat {
        match self {
            ErrorSum::Exact(r) => r,
            ErrorSum::Approx(_) => panic!("error sum is approximate"),
        }
    }
}

/// Sizes observed while solving, reported alongside every regression.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Diagnostics {
    /// Maximum-weight antichain total (L0 solves; per-split internals are
    /// not reported for the partition metrics).
    pub antichain_weight: Option<i128>,
    /// Vertices of the largest violator graph built (originals + helpers).
    pub violator_vertices: usize,
    /// Edges of the largest violator graph built.
    pub violator_edges: usize,
    /// Helper vertices of the largest violator graph built.
    pub steiner_vertices: usize,
    /// Number of flow-backed subproblems solved.
    pub subproblems: usize,
    /// Vertices fixed by the pre-solve prune.
    pub pruned_removed: usize,
    /// Weakly connected components processed after pruning.
    pub components: usize,
}

impl Diagnostics {
    pub(crate) fn observe_violator(&mut self, vertices: usize, edges: usize, steiner: usize) {
        if vertices >= self.violator_vertices {
            self.violator_vertices = vertices;
            self.steiner_vertices = steiner;
        }
        self.violator_edges = self.violator_edges.max(edges);
        self.subproblems += 1;
    }
}

/// An isotonic regression: one value per vertex plus its error under the
/// metric it was solved for.
#[derive(Clone, Debug)]
pub struct RegressionResult {
    pub values: Vec<Rat>,
    pub error: ErrorSum,
    pub diagnostics: Diagnostics,
}

impl RegressionResult {
    /// Builds a result after verifying the values are isotonic on `dag`
    /// and the error matches a recomputation; both failing indicates a
    /// solver bug.
    pub(crate) fn checked(
        dag: &Dag,
        wf: &WeightedFunction,
        metric: Metric,
        values: Vec<Rat>,
        diagnostics: Diagnostics,
    ) -> Result<Self> {
        if !isotonic_check(dag, &values).is_empty() {
            return Err(Error::Internal("regression output is not isotonic"));
        }
        let error = regression_error(wf, &values, metric)?;
        Ok(RegressionResult {
            values,
            error,
            diagnostics,
        })
    }
}

/// True iff integer `values` never decrease along an edge.
pub(crate) fn isotonic_values_ok(dag: &Dag, values: &[i64]) -> bool {
    dag.edges().iter().all(|&(u, v)| values[u] <= values[v])
}

/// Edges `(u, v)` whose values violate `g(u) ≤ g(v)`. Empty iff `values`
/// is isotonic on the dag (edge checks suffice: reachability is the
/// transitive closure of the edges).
pub fn isotonic_check(dag: &Dag, values: &[Rat]) -> Vec<(usize, usize)> {
    dag.edges()
        .iter()
        .copied()
        .filter(|&(u, v)| values[u] > values[v])
        .collect()
}

/// The error of `values` against the weighted function under `metric`.
pub fn regression_error(wf: &WeightedFunction, values: &[Rat], metric: Metric) -> Result<ErrorSum> {
    if values.len() != wf.len() {
        return Err(Error::LengthMismatch {
            context: "regression values vs function",
            expected: wf.len(),
            got: values.len(),
        });
    }
    match metric {
        Metric::L0 => {
            let mut sum = Rat::zero();
            for i in 0..wf.len() {
                if values[i] != rat(wf.values()[i]) {
                    sum += rat(wf.weights()[i]);
                }
            }
            Ok(ErrorSum::Exact(sum))
        }
        Metric::L1 => Ok(exact_or_approx(wf, values, false)),
        Metric::L2 => Ok(exact_or_approx(wf, values, true)),
        Metric::Lp(p) => {
            if !p.is_finite() || p <= 1.0 {
                return Err(Error::InvalidP(p));
            }
            let mut sum = 0.0;
            for i in 0..wf.len() {
                let d = rat_to_f64(&(values[i].clone() - rat(wf.values()[i]))).abs();
                sum += wf.weights()[i] as f64 * d.powf(p);
            }
            Ok(ErrorSum::Approx(sum))
        }
    }
}

/// Σ w·|f − v| (or Σ w·(f − v)² when `squared`), exact while the running
/// rational sum fits 128-bit arithmetic. Values with unrelated denominators
/// can make the exact sum unrepresentable long before its magnitude is
/// interesting, so past that point the sum is reported as a float
/// approximation instead.
fn exact_or_approx(wf: &WeightedFunction, values: &[Rat], squared: bool) -> ErrorSum {
    if let Some(total) = exact_sum(wf, values, squared) {
        return ErrorSum::Exact(total);
    }
    let mut sum = 0.0;
    for i in 0..wf.len() {
        let d = (rat_to_f64(&values[i]) - wf.values()[i] as f64).abs();
        sum += wf.weights()[i] as f64 * if squared { d * d } else { d };
    }
    ErrorSum::Approx(sum)
}

fn exact_sum(wf: &WeightedFunction, values: &[Rat], squared: bool) -> Option<Rat> {
    let mut total = Rat::zero();
    for i in 0..wf.len() {
        let v = &values[i];
        let b = *v.denom();
        let dn = (wf.values()[i] as i128)
            .checked_mul(b)?
            .checked_sub(*v.numer())?;
        let w = wf.weights()[i] as i128;
        let term = if squared {
            Rat::new(dn.checked_mul(dn)?.checked_mul(w)?, b.checked_mul(b)?)
        } else {
            Rat::new(dn.checked_abs()?.checked_mul(w)?, b)
        };
        total = checked_rat_add(&total, &term)?;
    }
    Some(total)
}

fn checked_rat_add(a: &Rat, b: &Rat) -> Option<Rat> {
    let (an, ad) = (*a.numer(), *a.denom());
    let (bn, bd) = (*b.numer(), *b.denom());
    let g = num_integer::Integer::gcd(&ad, &bd);
    let db = bd / g;
    let denom = ad.checked_mul(db)?;
    let num = an
        .checked_mul(db)?
        .checked_add(bn.checked_mul(ad / g)?)?;
    Some(Rat::new(num, denom))
}

/// Outcome of removing vertices that cannot be in any violating pair.
#[derive(Clone, Debug)]
pub struct Pruned {
    /// Kept vertices, ascending original ids.
    pub kept: Vec<usize>,
    /// Removed vertices, ascending original ids; each keeps its value.
    pub removed: Vec<usize>,
    /// Old id → new id within the subdag.
    pub to_sub: Vec<Option<usize>>,
    /// The dag induced on the kept vertices.
    pub subdag: Dag,
    /// The function restricted to the kept vertices.
    pub sub_wf: WeightedFunction,
}

/// Removes every vertex `v` with max{f(u): u ≺ v} ≤ f(v) ≤ min{f(z): v ≺ z}
/// — vertices in no violating pair. Removed vertices are fixed at their
/// original values; any optimal regression of the remaining instance,
/// clamped to the bounds those fixed values impose, completes to an
/// optimal regression of the full instance.
pub fn prune_nonviolating(dag: &Dag, wf: &WeightedFunction) -> Result<Pruned> {
    if wf.len() != dag.len() {
        return Err(Error::LengthMismatch {
            context: "function vs dag",
            expected: dag.len(),
            got: wf.len(),
        });
    }
    let keep = violating_mask(dag, wf.values());
    let kept: Vec<usize> = (0..dag.len()).filter(|&v| keep[v]).collect();
    let removed: Vec<usize> = (0..dag.len()).filter(|&v| !keep[v]).collect();
    let (subdag, to_sub) = dag.induced(&kept);
    let sub_wf = wf.restricted(&kept);
    Ok(Pruned {
        kept,
        removed,
        to_sub,
        subdag,
        sub_wf,
    })
}

/// `true` for vertices that participate in at least one violating pair.
pub(crate) fn violating_mask(dag: &Dag, f: &[i64]) -> Vec<bool> {
    let n = dag.len();
    // Running max of ancestor values and min of descendant values,
    // propagated along edges in topological order.
    let mut pre_max = vec![i64::MIN; n];
    for &v in dag.topo() {
        for &u in dag.predecessors(v) {
            let u = u as usize;
            pre_max[v] = pre_max[v].max(pre_max[u]).max(f[u]);
        }
    }
    let mut suc_min = vec![i64::MAX; n];
    for &v in dag.topo().iter().rev() {
        for &w in dag.successors(v) {
            let w = w as usize;
            suc_min[v] = suc_min[v].min(suc_min[w]).min(f[w]);
        }
    }
    (0..n).map(|v| pre_max[v] > f[v] || suc_min[v] < f[v]).collect()
}

/// Per-vertex bounds induced by fixing `removed` vertices at their values:
/// `lo[v]` = max value over removed ancestors, `hi[v]` = min over removed
/// descendants. Clamping any regression of the kept vertices into these
/// bands restores isotonicity across the removed vertices and never
/// increases the error (each vertex's own value lies inside its band).
pub(crate) fn removal_bands(dag: &Dag, f: &[i64], removed_mask: &[bool]) -> (Vec<i64>, Vec<i64>) {
    let n = dag.len();
    let mut lo = vec![i64::MIN; n];
    for &v in dag.topo() {
        for &u in dag.predecessors(v) {
            let u = u as usize;
            let via = if removed_mask[u] { lo[u].max(f[u]) } else { lo[u] };
            lo[v] = lo[v].max(via);
        }
    }
    let mut hi = vec![i64::MAX; n];
    for &v in dag.topo().iter().rev() {
        for &w in dag.successors(v) {
            let w = w as usize;
            let via = if removed_mask[w] { hi[w].min(f[w]) } else { hi[w] };
            hi[v] = hi[v].min(via);
        }
    }
    (lo, hi)
}

/// Reachability rows (successor sets) of the dag: `row(u)` bit `v` is set
/// iff `u ≺ v`. Accumulated in reverse topological order with whole-row
/// unions.
pub(crate) fn closure_matrix(dag: &Dag) -> BitMatrix {
    let mut m = BitMatrix::new(dag.len());
    for &v in dag.topo().iter().rev() {
        // Union successor rows first, then add the direct edges.
        for i in 0..dag.successors(v).len() {
            let w = dag.successors(v)[i] as usize;
            m.or_row_into(w, v);
        }
        for i in 0..dag.successors(v).len() {
            let w = dag.successors(v)[i] as usize;
            m.set(v, w);
        }
    }
    m
}

#[cfg(test)]
mod tests {
    use super::*;

    fn wf(values: &[i64], weights: &[i64]) -> WeightedFunction {
        WeightedFunction::new(values.to_vec(), weights.to_vec()).unwrap()
    }

    #[test]
    fn dag_rejects_bad_edges() {
        assert!(matches!(
            Dag::new(2, vec![(0, 2)]),
            Err(Error::InvalidVertex(0, 2, 2))
        ));
        assert!(matches!(Dag::new(2, vec![(1, 1)]), Err(Error::SelfLoop(1))));
        assert!(matches!(
            Dag::new(2, vec![(0, 1), (0, 1)]),
            Err(Error::DuplicateEdge(0, 1))
        ));
    }

    #[test]
    fn cycle_detection_reports_witness() {
        let err = Dag::new(3, vec![(0, 1), (1, 2), (2, 0)]).unwrap_err();
        match err {
            Error::CycleDetected(cycle) => {
                assert_eq!(cycle.len(), 3);
                // Consecutive witness vertices are actual edges.
                for i in 0..cycle.len() {
                    let (u, v) = (cycle[i], cycle[(i + 1) % cycle.len()]);
                    assert!([(0, 1), (1, 2), (2, 0)].contains(&(u, v)));
                }
            }
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn topological_order_on_fork() {
        // 2 → 0 → 1 has exactly one topological order.
        let order = topological_order(3, &[(2, 0), (0, 1)]).unwrap();
        assert_eq!(order, vec![2, 0, 1]);
    }

    #[test]
    fn topological_order_is_a_linear_extension() {
        let dag = Dag::new(6, vec![(0, 3), (3, 1), (4, 1), (5, 0), (2, 4)]).unwrap();
        let pos: Vec<usize> = {
            let mut p = vec![0; 6];
            for (i, &v) in dag.topo().iter().enumerate() {
                p[v] = i;
            }
            p
        };
        for &(u, v) in dag.edges() {
            assert!(pos[u] < pos[v]);
        }
    }

    #[test]
    fn weighted_function_validation() {
        assert!(matches!(
            WeightedFunction::new(vec![1], vec![1, 2]),
            Err(Error::LengthMismatch { .. })
        ));
        assert!(matches!(
            WeightedFunction::new(vec![1, 2], vec![1, -3]),
            Err(Error::NegativeWeight(-3, 1))
        ));
        assert!(matches!(
            WeightedFunction::new(vec![i64::MAX, 2], vec![i64::MAX, i64::MAX]),
            Err(Error::Overflow)
        ));
        // Zero weights are legal.
        assert!(WeightedFunction::new(vec![1, 2], vec![0, 0]).is_ok());
    }

    #[test]
    fn error_sums_per_metric() {
        let f = wf(&[1, 0], &[1, 1]);
        let half = vec![Rat::new(1, 2), Rat::new(1, 2)];
        let e2 = regression_error(&f, &half, Metric::L2).unwrap();
        assert_eq!(e2.expect_exact(), &Rat::new(1, 2));
        let e1 = regression_error(&f, &half, Metric::L1).unwrap();
        assert_eq!(e1.expect_exact(), &Rat::new(1, 1));
        let e0 = regression_error(&f, &half, Metric::L0).unwrap();
        assert_eq!(e0.expect_exact(), &rat(2));
        // Weight 0 vertices never contribute.
        let g = wf(&[1, 0], &[0, 5]);
        let e = regression_error(&g, &[rat(7), rat(0)], Metric::L0).unwrap();
        assert_eq!(e.expect_exact(), &rat(0));
    }

    #[test]
    fn error_sum_falls_back_to_float_when_exact_overflows() {
        // Three coprime near-2^60 denominators force the exact running sum
        // past i128; the result must degrade to an approximation, not panic.
        let f = wf(&[0, 0, 0], &[1, 1, 1]);
        let d1 = (1i128 << 60) - 93; // pairwise coprime (odd, distinct)
        let d2 = (1i128 << 60) - 173;
        let d3 = (1i128 << 60) - 255;
        let vals = vec![Rat::new(1, d1), Rat::new(1, d2), Rat::new(1, d3)];
        match regression_error(&f, &vals, Metric::L1).unwrap() {
            ErrorSum::Approx(x) => assert!(x > 0.0 && x < 1e-15),
            ErrorSum::Exact(_) => panic!("sum cannot be exact in 128 bits"),
        }
        // Small sums with mixed denominators stay exact.
        let small = vec![Rat::new(1, 3), Rat::new(1, 5), Rat::new(1, 7)];
        let e = regression_error(&f, &small, Metric::L2).unwrap();
        assert_eq!(
            e.expect_exact(),
            &(Rat::new(1, 9) + Rat::new(1, 25) + Rat::new(1, 49))
        );
    }

    #[test]
    fn lp_error_matches_hand_computation() {
        let f = wf(&[1, 0], &[1, 1]);
        let half = vec![Rat::new(1, 2), Rat::new(1, 2)];
        let e = regression_error(&f, &half, Metric::Lp(3.0)).unwrap();
        match e {
            ErrorSum::Approx(x) => assert!((x - 0.25).abs() < 1e-12),
            _ => panic!("expected approximate sum"),
        }
    }

    #[test]
    fn isotonic_check_reports_violated_edges() {
        let dag = Dag::new(3, vec![(0, 1), (1, 2)]).unwrap();
        let vals = vec![rat(2), rat(1), rat(3)];
        assert_eq!(isotonic_check(&dag, &vals), vec![(0, 1)]);
        let ok = vec![rat(1), rat(1), rat(3)];
        assert!(isotonic_check(&dag, &ok).is_empty());
    }

    #[test]
    fn prune_keeps_only_violating_vertices() {
        // Chain values 0,5,3,4,9: the endpoints are below/above everything
        // they relate to and drop out; 5,3,4 all sit in violating pairs.
        let dag = Dag::chain(5);
        let f = wf(&[0, 5, 3, 4, 9], &[1, 1, 1, 1, 1]);
        let pruned = prune_nonviolating(&dag, &f).unwrap();
        assert_eq!(pruned.kept, vec![1, 2, 3]);
        assert_eq!(pruned.removed, vec![0, 4]);
        assert_eq!(pruned.sub_wf.values(), &[5, 3, 4]);
        assert_eq!(pruned.subdag.edges(), &[(0, 1), (1, 2)]);
    }

    #[test]
    fn prune_on_isotonic_input_removes_everything() {
        let dag = Dag::chain(4);
        let f = wf(&[1, 1, 2, 5], &[1, 1, 1, 1]);
        let pruned = prune_nonviolating(&dag, &f).unwrap();
        assert!(pruned.kept.is_empty());
        assert_eq!(pruned.removed, vec![0, 1, 2, 3]);
    }

    #[test]
    fn prune_sees_reachability_not_just_edges() {
        // 0→1→2 plus 0→2: vertex 2 relates to 0 through both routes; a
        // violating ancestor two steps away must keep it.
        let dag = Dag::new(3, vec![(0, 1), (1, 2)]).unwrap();
        let f = wf(&[9, 9, 5], &[1, 1, 1]);
        let pruned = prune_nonviolating(&dag, &f).unwrap();
        assert_eq!(pruned.kept, vec![0, 1, 2]);
    }

    #[test]
    fn removal_bands_bound_through_removed_vertices() {
        // 0→1→2 with 1 removed: 0 must stay ≤ f(1), 2 must stay ≥ f(1).
        let dag = Dag::new(3, vec![(0, 1), (1, 2)]).unwrap();
        let (lo, hi) = removal_bands(&dag, &[1, 4, 9], &[false, true, false]);
        assert_eq!(hi[0], 4);
        assert_eq!(lo[2], 4);
        assert_eq!(lo[0], i64::MIN);
        assert_eq!(hi[2], i64::MAX);
    }

    #[test]
    fn closure_matrix_is_transitive_reachability() {
        let dag = Dag::new(4, vec![(0, 1), (1, 2), (3, 2)]).unwrap();
        let m = closure_matrix(&dag);
        assert!(m.get(0, 1) && m.get(0, 2) && m.get(1, 2) && m.get(3, 2));
        assert!(!m.get(2, 0) && !m.get(0, 3) && !m.get(1, 3));
    }

    #[test]
    fn weak_components_split() {
        let dag = Dag::new(5, vec![(0, 1), (3, 2)]).unwrap();
        let comps = dag.weak_components();
        assert_eq!(comps, vec![vec![0, 1], vec![2, 3], vec![4]]);
    }
}
