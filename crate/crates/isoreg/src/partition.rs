//! Distance-metric isotonic regression (L1, exact L2, approximate Lp) by
//! recursive value partitioning. Each level picks a grid midpoint, solves a
//! two-value instance — which is a weighted-change problem on 0/1 labels —
//! and recurses on the two halves independently. The two-value solves reuse
//! the violator-graph / maximum-weight-antichain machinery.

use std::cmp::Ordering;

use crate::bits::Mask;
use crate::error::{Error, Result};
use crate::flow::max_weight_antichain;
use crate::l0::{extend_antichain, extend_masked, extend_over_relation, RELATION_LIMIT};
use crate::order::{
    closure_matrix, isotonic_values_ok, prune_nonviolating, regression_error, removal_bands,
    violating_mask, Dag, Diagnostics, Metric, Pruned, RegressionResult, WeightedFunction,
};
use crate::rational::{rat, rat_to_f64, Rat};
use crate::relation::Relation;
use crate::violator::{PointSet, ViolatorDag};

/// Per-vertex label and weight for one two-value split. `assign(v, mid)`
/// returns `(side, weight)`: side 0 prefers the grid value at `mid`, side 1
/// prefers the one at `mid + 1`, and `weight` is proportional to the cost of
/// flipping the vertex to the other side (scaled per split; only ratios
/// within one split matter).
pub(crate) trait SplitCosts {
    fn assign(&self, v: usize, mid: i128) -> (u8, i128);
}

/// Solves one two-value instance: given preferred sides and flip weights for
/// `verts` (parallel slices), returns an isotonic 0/1 relabeling of minimum
/// flipped weight.
pub(crate) trait BinarySolver {
    fn solve(
        &self,
        verts: &[usize],
        labels: &[u8],
        weights: &[i128],
        diag: &mut Diagnostics,
    ) -> Result<Vec<u8>>;
}

/// Two-value solver over a dag; `verts` are vertex ids of that dag.
pub(crate) struct DagSolver<'a> {
    pub dag: &'a Dag,
}

impl BinarySolver for DagSolver<'_> {
    fn solve(
        &self,
        verts: &[usize],
        labels: &[u8],
        weights: &[i128],
        diag: &mut Diagnostics,
    ) -> Result<Vec<u8>> {
        let (sub, _) = self.dag.induced(verts);
        let lab: Vec<i64> = labels.iter().map(|&b| b as i64).collect();
        let keep = violating_mask(&sub, &lab);
        let mut anchors: Vec<bool> = keep.iter().map(|&k| !k).collect();
        let kept: Vec<usize> = (0..sub.len()).filter(|&v| keep[v]).collect();
        if !kept.is_empty() {
            let (kdag, _) = sub.induced(&kept);
            // With 0/1 labels, every path between two label-violating kept
            // vertices passes only through kept vertices, so the closure of
            // the kept-induced dag already contains every violating pair.
            let closure = closure_matrix(&kdag);
            let full = Mask::full(kept.len());
            let mut edges = Vec::new();
            for u in 0..kept.len() {
                if lab[kept[u]] == 0 {
                    continue;
                }
                for v in full.iter_intersection(closure.row(u)) {
                    if lab[kept[v]] == 0 {
                        edges.push((u as u32, v as u32));
                    }
                }
            }
            let vd = ViolatorDag::new(kept.len(), 0, edges);
            let kw: Vec<i128> = kept.iter().map(|&v| weights[v]).collect();
            diag.observe_violator(vd.total_vertices(), vd.edges().len(), 0);
            let r = max_weight_antichain(&vd, &kw)?;
            for m in r.members {
                anchors[kept[m]] = true;
            }
        }
        let out = extend_antichain(&sub, &lab, &anchors)?;
        debug_assert!(isotonic_values_ok(&sub, &out));
        Ok(out.iter().map(|&x| x as u8).collect())
    }
}

/// Two-value solver over a dense closed relation; `verts` are relation ids.
pub(crate) struct RelSolver<'a> {
    pub rel: &'a Relation,
}

impl BinarySolver for RelSolver<'_> {
    fn solve(
        &self,
        verts: &[usize],
        labels: &[u8],
        weights: &[i128],
        diag: &mut Diagnostics,
    ) -> Result<Vec<u8>> {
        let n = self.rel.len();
        let mask = Mask::from_indices(n, verts);
        let mut lab = vec![0i64; n];
        let mut to_local = vec![usize::MAX; n];
        for (i, &v) in verts.iter().enumerate() {
            lab[v] = labels[i] as i64;
            to_local[v] = i;
        }
        let keep = self.rel.violating_mask(&lab, &mask);
        let mut anchors = vec![false; n];
        for &v in verts {
            anchors[v] = !keep[v];
        }
        let kept: Vec<usize> = verts.iter().copied().filter(|&v| keep[v]).collect();
        if !kept.is_empty() {
            let kept_mask = Mask::from_indices(n, &kept);
            let pairs = self.rel.violating_pairs(&lab, &kept_mask);
            let mut to_kept = vec![u32::MAX; n];
            for (i, &v) in kept.iter().enumerate() {
                to_kept[v] = i as u32;
            }
            let edges: Vec<(u32, u32)> = pairs
                .into_iter()
                .map(|(u, v)| (to_kept[u], to_kept[v]))
                .collect();
            let vd = ViolatorDag::new(kept.len(), 0, edges);
            let kw: Vec<i128> = kept.iter().map(|&v| weights[to_local[v]]).collect();
            diag.observe_violator(vd.total_vertices(), vd.edges().len(), 0);
            let r = max_weight_antichain(&vd, &kw)?;
            for m in r.members {
                anchors[kept[m]] = true;
            }
        }
        let out = extend_masked(self.rel, &mask, &lab, &anchors)?;
        debug_assert!(self.rel.violating_pairs(&out, &mask).is_empty());
        Ok(verts.iter().map(|&v| out[v] as u8).collect())
    }
}

/// Two-value solver for a chain; `verts` must be listed in chain order. An
/// isotonic 0/1 labeling of a chain is a prefix of zeros, so the best cut is
/// found by a prefix-sum scan (earliest cut on ties).
pub(crate) struct ChainSolver;

impl BinarySolver for ChainSolver {
    fn solve(
        &self,
        verts: &[usize],
        labels: &[u8],
        weights: &[i128],
        diag: &mut Diagnostics,
    ) -> Result<Vec<u8>> {
        diag.subproblems += 1;
        let n = verts.len();
        let mut suffix0: i128 = (0..n).filter(|&i| labels[i] == 0).map(|i| weights[i]).sum();
        let mut best = (suffix0, 0usize);
        let mut prefix1 = 0i128;
        for k in 1..=n {
            if labels[k - 1] == 1 {
                prefix1 += weights[k - 1];
            } else {
                suffix0 -= weights[k - 1];
            }
            let cost = prefix1 + suffix0;
            if cost < best.0 {
                best = (cost, k);
            }
        }
        let cut = best.1;
        Ok((0..n).map(|i| (i >= cut) as u8).collect())
    }
}

/// Assigns every vertex in `verts` a grid index in `[lo, hi]` by recursive
/// two-value splits, writing indices into `out` (indexed by vertex id). The
/// side-0 vertices of each split recurse on `[lo, mid]`, side-1 on
/// `[mid + 1, hi]`; isotonic split labels keep the halves independent.
pub(crate) fn partition_split<B, C>(
    solver: &B,
    costs: &C,
    verts: Vec<usize>,
    lo: i128,
    hi: i128,
    out: &mut [i128],
    diag: &mut Diagnostics,
) -> Result<()>
where
    B: BinarySolver + ?Sized,
    C: SplitCosts + ?Sized,
{
    if verts.is_empty() {
        return Ok(());
    }
    if lo == hi {
        for &v in &verts {
            out[v] = lo;
        }
        return Ok(());
    }
    let mid = lo + (hi - lo) / 2;
    let mut labels = Vec::with_capacity(verts.len());
    let mut weights = Vec::with_capacity(verts.len());
    for &v in &verts {
        let (side, weight) = costs.assign(v, mid);
        debug_assert!(weight >= 0);
        labels.push(side);
        weights.push(weight);
    }
    let solved = solver.solve(&verts, &labels, &weights, diag)?;
    let mut va = Vec::new();
    let mut vb = Vec::new();
    for (i, v) in verts.into_iter().enumerate() {
        if solved[i] == 0 {
            va.push(v);
        } else {
            vb.push(v);
        }
    }
    partition_split(solver, costs, va, lo, mid, out, diag)?;
    partition_split(solver, costs, vb, mid + 1, hi, out, diag)
}

/// L1 split costs over an explicit sorted grid of candidate values: a vertex
/// prefers the half its value lies in, and flipping costs its weight times
/// the (per-split constant) grid gap, so the weight alone suffices.
pub(crate) struct L1Costs<'a> {
    pub f: &'a [i64],
    pub w: &'a [i64],
    pub grid: &'a [i64],
}

impl SplitCosts for L1Costs<'_> {
    fn assign(&self, v: usize, mid: i128) -> (u8, i128) {
        let a = self.grid[mid as usize];
        ((self.f[v] > a) as u8, self.w[v] as i128)
    }
}

/// Exact L2 split costs over the implicit grid `base + i / scale`. With
/// `a = base + mid/scale` and `b = a + 1/scale`, the squared-error
/// difference is `w·(2f − a − b)/scale` up to sign, and
/// `q = 2·(f − base)·scale − (2·mid + 1)` is that bracket times `scale`:
/// an odd integer, hence never zero — no ties.
struct L2Costs<'a> {
    f: &'a [i64],
    w: &'a [i64],
    base: i64,
    scale: i128,
}

impl SplitCosts for L2Costs<'_> {
    fn assign(&self, v: usize, mid: i128) -> (u8, i128) {
        let q = 2 * (self.f[v] - self.base) as i128 * self.scale - (2 * mid + 1);
        ((q > 0) as u8, self.w[v] as i128 * q.abs())
    }
}

/// Approximate Lp split costs over the implicit grid `base + i·delta`,
/// evaluated in floating point and rounded to integers after dividing out
/// the per-split magnitude `delta · range^(p−1)`. Ties (zero difference)
/// prefer the lower half.
struct LpCosts<'a> {
    f: &'a [i64],
    w: &'a [i64],
    base: f64,
    delta: f64,
    p: f64,
    norm: f64,
    weight_scale: f64,
}

impl SplitCosts for LpCosts<'_> {
    fn assign(&self, v: usize, mid: i128) -> (u8, i128) {
        let a = self.base + mid as f64 * self.delta;
        let b = a + self.delta;
        let fv = self.f[v] as f64;
        let d = self.w[v] as f64 * ((fv - b).abs().powf(self.p) - (fv - a).abs().powf(self.p));
        // Saturate so pathological p / weight combinations cannot overflow
        // the flow arithmetic; relative precision is already approximate.
        let weight = (d.abs() / self.norm * self.weight_scale).round().min(9.0e18);
        ((d < 0.0) as u8, weight as i128)
    }
}

/// Clamps kept-vertex values into the bands imposed by pruned vertices and
/// packages the full result. Bands are monotone along the order and contain
/// each vertex's own value, so clamping keeps the output isotonic and never
/// increases the error while restoring every relation that passed through a
/// pruned vertex.
fn assemble_dag(
    dag: &Dag,
    wf: &WeightedFunction,
    metric: Metric,
    pruned: &Pruned,
    sub_values: &[Rat],
    diag: Diagnostics,
) -> Result<RegressionResult> {
    let mut removed_mask = vec![true; dag.len()];
    for &v in &pruned.kept {
        removed_mask[v] = false;
    }
    let (lo, hi) = removal_bands(dag, wf.values(), &removed_mask);
    let mut values: Vec<Rat> = wf.values().iter().map(|&v| rat(v)).collect();
    for (i, &orig) in pruned.kept.iter().enumerate() {
        let mut x = sub_values[i].clone();
        if x < rat(lo[orig]) {
            x = rat(lo[orig]);
        }
        if x > rat(hi[orig]) {
            x = rat(hi[orig]);
        }
        values[orig] = x;
    }
    RegressionResult::checked(dag, wf, metric, values, diag)
}

/// Relation-order counterpart of [`assemble_dag`].
fn assemble_rel(
    rel: &Relation,
    wf: &WeightedFunction,
    metric: Metric,
    kept: &[usize],
    keep_mask: &[bool],
    sub_values: &[Rat],
    diag: Diagnostics,
) -> Result<RegressionResult> {
    let fixed: Vec<bool> = keep_mask.iter().map(|&k| !k).collect();
    let (lo, hi) = rel.bands(wf.values(), &fixed);
    let mut values: Vec<Rat> = wf.values().iter().map(|&v| rat(v)).collect();
    for (i, &orig) in kept.iter().enumerate() {
        let mut x = sub_values[i].clone();
        if x < rat(lo[orig]) {
            x = rat(lo[orig]);
        }
        if x > rat(hi[orig]) {
            x = rat(hi[orig]);
        }
        values[orig] = x;
    }
    if !rel.is_isotonic_rat(&values) {
        return Err(Error::Internal("regression output is not isotonic"));
    }
    let error = regression_error(wf, &values, metric)?;
    Ok(RegressionResult {
        values,
        error,
        diagnostics: diag,
    })
}

fn relation_for_points(points: &PointSet, wf: &WeightedFunction) -> Result<Relation> {
    if wf.len() != points.len() {
        return Err(Error::LengthMismatch {
            context: "function vs points",
            expected: points.len(),
            got: wf.len(),
        });
    }
    if points.len() > RELATION_LIMIT {
        return Err(Error::TooLarge(format!(
            "point regression supports at most {RELATION_LIMIT} points, got {}",
            points.len()
        )));
    }
    Ok(points.relation())
}

/// Minimum-cost assignment of every vertex to one of two values `a < b`
/// under the isotonic constraint: `false` = take `a`, `true` = take `b`.
/// Misfit is the L1 distance from the vertex's value, times its weight.
pub fn binary_l1(dag: &Dag, wf: &WeightedFunction, a: i64, b: i64) -> Result<Vec<bool>> {
    if a >= b {
        return Err(Error::InvalidSplit(a, b));
    }
    if wf.len() != dag.len() {
        return Err(Error::LengthMismatch {
            context: "function vs dag",
            expected: dag.len(),
            got: wf.len(),
        });
    }
    let f = wf.values();
    let mut labels = Vec::with_capacity(dag.len());
    let mut weights = Vec::with_capacity(dag.len());
    let mut total: i128 = 0;
    for v in 0..dag.len() {
        let da = (f[v] as i128 - a as i128).abs();
        let db = (f[v] as i128 - b as i128).abs();
        let w = (wf.weights()[v] as i128)
            .checked_mul((da - db).abs())
            .ok_or(Error::Overflow)?;
        total = total.checked_add(w).ok_or(Error::Overflow)?;
        labels.push((db < da) as u8);
        weights.push(w);
    }
    let _ = total;
    let solver = DagSolver { dag };
    let verts: Vec<usize> = (0..dag.len()).collect();
    let mut diag = Diagnostics::default();
    let solved = solver.solve(&verts, &labels, &weights, &mut diag)?;
    Ok(solved.into_iter().map(|s| s == 1).collect())
}

/// L1 isotonic regression on a dag: minimizes `Σ w(v)·|g(v) − f(v)|`.
/// Some optimum takes values among the input values, so the partition grid
/// is the sorted distinct kept values and the result is exact.
pub fn l1_regress(dag: &Dag, wf: &WeightedFunction) -> Result<RegressionResult> {
    let pruned = prune_nonviolating(dag, wf)?;
    let mut diag = Diagnostics {
        pruned_removed: pruned.removed.len(),
        ..Default::default()
    };
    if pruned.kept.is_empty() {
        let values = wf.values().iter().map(|&v| rat(v)).collect();
        return RegressionResult::checked(dag, wf, Metric::L1, values, diag);
    }
    let mut grid: Vec<i64> = pruned.sub_wf.values().to_vec();
    grid.sort_unstable();
    grid.dedup();
    let costs = L1Costs {
        f: pruned.sub_wf.values(),
        w: pruned.sub_wf.weights(),
        grid: &grid,
    };
    let solver = DagSolver {
        dag: &pruned.subdag,
    };
    let m = pruned.kept.len();
    let mut out = vec![0i128; m];
    partition_split(
        &solver,
        &costs,
        (0..m).collect(),
        0,
        grid.len() as i128 - 1,
        &mut out,
        &mut diag,
    )?;
    let sub_values: Vec<Rat> = out.iter().map(|&i| rat(grid[i as usize])).collect();
    assemble_dag(dag, wf, Metric::L1, &pruned, &sub_values, diag)
}

/// L1 isotonic regression on points under strict domination.
pub fn l1_regress_points(points: &PointSet, wf: &WeightedFunction) -> Result<RegressionResult> {
    let rel = relation_for_points(points, wf)?;
    let n = rel.len();
    let keep_mask = rel.violating_mask(wf.values(), &Mask::full(n));
    let kept: Vec<usize> = (0..n).filter(|&v| keep_mask[v]).collect();
    let mut diag = Diagnostics {
        pruned_removed: n - kept.len(),
        ..Default::default()
    };
    if kept.is_empty() {
        let values: Vec<Rat> = wf.values().iter().map(|&v| rat(v)).collect();
        let error = regression_error(wf, &values, Metric::L1)?;
        return Ok(RegressionResult {
            values,
            error,
            diagnostics: diag,
        });
    }
    let mut grid: Vec<i64> = kept.iter().map(|&v| wf.values()[v]).collect();
    grid.sort_unstable();
    grid.dedup();
    let costs = L1Costs {
        f: wf.values(),
        w: wf.weights(),
        grid: &grid,
    };
    let solver = RelSolver { rel: &rel };
    let mut out = vec![0i128; n];
    partition_split(
        &solver,
        &costs,
        kept.clone(),
        0,
        grid.len() as i128 - 1,
        &mut out,
        &mut diag,
    )?;
    let sub_values: Vec<Rat> = kept.iter().map(|&v| rat(grid[out[v] as usize])).collect();
    assemble_rel(&rel, wf, Metric::L1, &kept, &keep_mask, &sub_values, diag)
}

/// Grid resolution for exact L2: step `1/scale` with `scale = 16·W²`
/// (`W` = total kept weight). Distinct optimal level means are rational with
/// denominators at most `W`, hence at least `16/scale` apart, far wider than
/// the ±2-step wobble of grid optima — levels stay separable. Also verifies
/// the split weights and their sums fit in `i128` with headroom.
fn l2_grid(w_total: i128, fmin: i64, fmax: i64) -> Result<(i128, i128)> {
    let scale = w_total
        .checked_mul(w_total)
        .and_then(|x| x.checked_mul(16))
        .ok_or(Error::Overflow)?;
    let span = fmax as i128 - fmin as i128;
    let count = span.checked_mul(scale).ok_or(Error::Overflow)?;
    w_total
        .checked_mul(count.max(1))
        .and_then(|x| x.checked_mul(4))
        .ok_or(Error::Overflow)?;
    Ok((scale, count))
}

/// Maps final L2 grid indices to exact values. Positive-weight vertices of
/// one optimal level land within two grid steps of the level's weighted
/// mean, and distinct level means are at least fourteen steps apart, so
/// positive-weight indices cluster with gaps of at most two inside a level.
/// Each cluster window maps to its exact weighted mean; indices outside
/// every window (only zero-weight vertices) keep their grid value. The
/// resulting index→value map is monotone, preserving isotonicity.
fn l2_recover(out: &[i128], f: &[i64], w: &[i64], fmin: i64, scale: i128) -> Vec<Rat> {
    let m = out.len();
    let mut pos: Vec<usize> = (0..m).filter(|&i| w[i] > 0).collect();
    pos.sort_unstable_by_key(|&i| out[i]);
    let mut clusters: Vec<(i128, i128, Rat)> = Vec::new();
    let mut start = 0;
    while start < pos.len() {
        let mut end = start + 1;
        while end < pos.len() && out[pos[end]] - out[pos[end - 1]] <= 2 {
            end += 1;
        }
        let mut wsum = 0i128;
        let mut wfsum = 0i128;
        for &i in &pos[start..end] {
            wsum += w[i] as i128;
            wfsum += w[i] as i128 * f[i] as i128;
        }
        clusters.push((out[pos[start]] - 2, out[pos[end - 1]] + 2, Rat::new(wfsum, wsum)));
        start = end;
    }
    debug_assert!(clusters
        .windows(2)
        .all(|c| c[0].1 < c[1].0 && c[0].2 < c[1].2));
    out.iter()
        .map(|&idx| {
            let hit = clusters.binary_search_by(|c| {
                if c.1 < idx {
                    Ordering::Less
                } else if c.0 > idx {
                    Ordering::Greater
                } else {
                    Ordering::Equal
                }
            });
            match hit {
                Ok(k) => clusters[k].2.clone(),
                Err(_) => rat(fmin) + Rat::new(idx, scale),
            }
        })
        .collect()
}

/// Exact L2 (least-squares) isotonic regression on a dag: minimizes
/// `Σ w(v)·(g(v) − f(v))²` with exact rational output values.
pub fn l2_exact(dag: &Dag, wf: &WeightedFunction) -> Result<RegressionResult> {
    let pruned = prune_nonviolating(dag, wf)?;
    let mut diag = Diagnostics {
        pruned_removed: pruned.removed.len(),
        ..Default::default()
    };
    if pruned.kept.is_empty() {
        let values = wf.values().iter().map(|&v| rat(v)).collect();
        return RegressionResult::checked(dag, wf, Metric::L2, values, diag);
    }
    let w_total = pruned.sub_wf.total_weight();
    if w_total == 0 {
        // Every violating vertex is weightless: any isotonic completion
        // around the pruned vertices has zero error.
        let mut anchors = vec![false; dag.len()];
        for &v in &pruned.removed {
            anchors[v] = true;
        }
        let ext = extend_antichain(dag, wf.values(), &anchors)?;
        let values = ext.into_iter().map(rat).collect();
        return RegressionResult::checked(dag, wf, Metric::L2, values, diag);
    }
    let f = pruned.sub_wf.values();
    let fmin = *f.iter().min().unwrap();
    let fmax = *f.iter().max().unwrap();
    let (scale, count) = l2_grid(w_total, fmin, fmax)?;
    let costs = L2Costs {
        f,
        w: pruned.sub_wf.weights(),
        base: fmin,
        scale,
    };
    let solver = DagSolver {
        dag: &pruned.subdag,
    };
    let m = pruned.kept.len();
    let mut out = vec![0i128; m];
    partition_split(
        &solver,
        &costs,
        (0..m).collect(),
        0,
        count,
        &mut out,
        &mut diag,
    )?;
    let sub_values = l2_recover(&out, f, pruned.sub_wf.weights(), fmin, scale);
    assemble_dag(dag, wf, Metric::L2, &pruned, &sub_values, diag)
}

/// Exact L2 isotonic regression on points under strict domination.
pub fn l2_exact_points(points: &PointSet, wf: &WeightedFunction) -> Result<RegressionResult> {
    let rel = relation_for_points(points, wf)?;
    let n = rel.len();
    let keep_mask = rel.violating_mask(wf.values(), &Mask::full(n));
    let kept: Vec<usize> = (0..n).filter(|&v| keep_mask[v]).collect();
    let mut diag = Diagnostics {
        pruned_removed: n - kept.len(),
        ..Default::default()
    };
    if kept.is_empty() {
        let values: Vec<Rat> = wf.values().iter().map(|&v| rat(v)).collect();
        let error = regression_error(wf, &values, Metric::L2)?;
        return Ok(RegressionResult {
            values,
            error,
            diagnostics: diag,
        });
    }
    let kept_wf = wf.restricted(&kept);
    let w_total = kept_wf.total_weight();
    if w_total == 0 {
        let anchors: Vec<bool> = keep_mask.iter().map(|&k| !k).collect();
        let ext = extend_over_relation(&rel, wf.values(), &anchors)?;
        let values: Vec<Rat> = ext.into_iter().map(rat).collect();
        if !rel.is_isotonic_rat(&values) {
            return Err(Error::Internal("regression output is not isotonic"));
        }
        let error = regression_error(wf, &values, Metric::L2)?;
        return Ok(RegressionResult {
            values,
            error,
            diagnostics: diag,
        });
    }
    let fmin = *kept_wf.values().iter().min().unwrap();
    let fmax = *kept_wf.values().iter().max().unwrap();
    let (scale, count) = l2_grid(w_total, fmin, fmax)?;
    let costs = L2Costs {
        f: wf.values(),
        w: wf.weights(),
        base: fmin,
        scale,
    };
    let solver = RelSolver { rel: &rel };
    let mut out = vec![0i128; n];
    partition_split(
        &solver,
        &costs,
        kept.clone(),
        0,
        count,
        &mut out,
        &mut diag,
    )?;
    let out_kept: Vec<i128> = kept.iter().map(|&v| out[v]).collect();
    let sub_values = l2_recover(&out_kept, kept_wf.values(), kept_wf.weights(), fmin, scale);
    assemble_rel(&rel, wf, Metric::L2, &kept, &keep_mask, &sub_values, diag)
}

/// Grid cell count for an Lp solve: `ceil(span / delta)`.
fn lp_grid_count(span: i64, delta: &Rat) -> Result<i128> {
    let num = *delta.numer();
    let den = *delta.denom();
    let prod = (span as i128)
        .checked_mul(den)
        .ok_or_else(|| Error::InvalidDelta("step too fine for this value range".into()))?;
    let count = num_integer::Integer::div_ceil(&prod, &num);
    if count > 1i128 << 62 {
        return Err(Error::InvalidDelta(format!(
            "step yields {count} grid cells; refusing more than 2^62"
        )));
    }
    Ok(count)
}

/// Approximate Lp isotonic regression (`p > 1`, finite) on a dag: minimizes
/// `Σ w(v)·|g(v) − f(v)|^p` over the grid `fmin + i·delta`. The default
/// step splits the value range into 2^20 cells; `weight_scale` controls the
/// integer resolution of the per-split costs.
pub fn lp_approx(
    dag: &Dag,
    wf: &WeightedFunction,
    p: f64,
    delta: Option<Rat>,
    weight_scale: i64,
) -> Result<RegressionResult> {
    let metric = Metric::lp(p)?;
    if weight_scale <= 0 {
        return Err(Error::InvalidDelta(format!(
            "weight scale must be positive, got {weight_scale}"
        )));
    }
    let pruned = prune_nonviolating(dag, wf)?;
    let mut diag = Diagnostics {
        pruned_removed: pruned.removed.len(),
        ..Default::default()
    };
    if pruned.kept.is_empty() {
        let values = wf.values().iter().map(|&v| rat(v)).collect();
        return RegressionResult::checked(dag, wf, metric, values, diag);
    }
    let f = pruned.sub_wf.values();
    let fmin = *f.iter().min().unwrap();
    let fmax = *f.iter().max().unwrap();
    let span = fmax - fmin;
    let delta = match delta {
        Some(d) => d,
        None => Rat::new(span as i128, 1i128 << 20),
    };
    if delta <= rat(0) {
        return Err(Error::InvalidDelta(format!("step must be positive, got {delta}")));
    }
    let count = lp_grid_count(span, &delta)?;
    let delta_f64 = rat_to_f64(&delta);
    let costs = LpCosts {
        f,
        w: pruned.sub_wf.weights(),
        base: fmin as f64,
        delta: delta_f64,
        p,
        norm: delta_f64 * (span as f64).powf(p - 1.0),
        weight_scale: weight_scale as f64,
    };
    let solver = DagSolver {
        dag: &pruned.subdag,
    };
    let m = pruned.kept.len();
    let mut out = vec![0i128; m];
    partition_split(
        &solver,
        &costs,
        (0..m).collect(),
        0,
        count,
        &mut out,
        &mut diag,
    )?;
    let sub_values: Vec<Rat> = out
        .iter()
        .map(|&i| rat(fmin) + Rat::new(i, 1) * delta.clone())
        .collect();
    assemble_dag(dag, wf, metric, &pruned, &sub_values, diag)
}

/// Approximate Lp isotonic regression on points under strict domination.
pub fn lp_approx_points(
    points: &PointSet,
    wf: &WeightedFunction,
    p: f64,
    delta: Option<Rat>,
    weight_scale: i64,
) -> Result<RegressionResult> {
    let metric = Metric::lp(p)?;
    if weight_scale <= 0 {
        return Err(Error::InvalidDelta(format!(
            "weight scale must be positive, got {weight_scale}"
        )));
    }
    let rel = relation_for_points(points, wf)?;
    let n = rel.len();
    let keep_mask = rel.violating_mask(wf.values(), &Mask::full(n));
    let kept: Vec<usize> = (0..n).filter(|&v| keep_mask[v]).collect();
    let mut diag = Diagnostics {
        pruned_removed: n - kept.len(),
        ..Default::default()
    };
    if kept.is_empty() {
        let values: Vec<Rat> = wf.values().iter().map(|&v| rat(v)).collect();
        let error = regression_error(wf, &values, metric)?;
        return Ok(RegressionResult {
            values,
            error,
            diagnostics: diag,
        });
    }
    let kept_f: Vec<i64> = kept.iter().map(|&v| wf.values()[v]).collect();
    let fmin = *kept_f.iter().min().unwrap();
    let fmax = *kept_f.iter().max().unwrap();
    let span = fmax - fmin;
    let delta = match delta {
        Some(d) => d,
        None => Rat::new(span as i128, 1i128 << 20),
    };
    if delta <= rat(0) {
        return Err(Error::InvalidDelta(format!("step must be positive, got {delta}")));
    }
    let count = lp_grid_count(span, &delta)?;
    let delta_f64 = rat_to_f64(&delta);
    let costs = LpCosts {
        f: wf.values(),
        w: wf.weights(),
        base: fmin as f64,
        delta: delta_f64,
        p,
        norm: delta_f64 * (span as f64).powf(p - 1.0),
        weight_scale: weight_scale as f64,
    };
    let solver = RelSolver { rel: &rel };
    let mut out = vec![0i128; n];
    partition_split(
        &solver,
        &costs,
        kept.clone(),
        0,
        count,
        &mut out,
        &mut diag,
    )?;
    let sub_values: Vec<Rat> = kept
        .iter()
        .map(|&v| rat(fmin) + Rat::new(out[v], 1) * delta.clone())
        .collect();
    assemble_rel(&rel, wf, metric, &kept, &keep_mask, &sub_values, diag)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::order::ErrorSum;

    fn wf(values: &[i64], weights: &[i64]) -> WeightedFunction {
        WeightedFunction::new(values.to_vec(), weights.to_vec()).unwrap()
    }

    fn exact(r: &RegressionResult) -> Rat {
        r.error.expect_exact().clone()
    }

    #[test]
    fn l1_on_worked_chain() {
        let dag = Dag::chain(5);
        let r = l1_regress(&dag, &wf(&[0, 5, 3, 4, 9], &[1, 1, 1, 1, 1])).unwrap();
        assert_eq!(exact(&r), rat(2));
        assert_eq!(r.values[0], rat(0));
        assert_eq!(r.values[4], rat(9));
        for i in 1..5 {
            assert!(r.values[i - 1] <= r.values[i]);
        }
    }

    #[test]
    fn l1_two_vertex_conflict_collapses() {
        let dag = Dag::chain(2);
        let r = l1_regress(&dag, &wf(&[10, 0], &[1, 1])).unwrap();
        assert_eq!(exact(&r), rat(10));
        assert_eq!(r.values[0], r.values[1]);
    }

    #[test]
    fn l1_weights_shift_the_solution() {
        // Heavy downstream vertex pins the value near 0.
        let dag = Dag::chain(2);
        let r = l1_regress(&dag, &wf(&[10, 0], &[1, 5])).unwrap();
        assert_eq!(exact(&r), rat(10));
        assert_eq!(r.values[0], rat(0));
        assert_eq!(r.values[1], rat(0));
    }

    #[test]
    fn l1_points_matches_dag_on_a_line() {
        let coords: Vec<Vec<i64>> = (0..5).map(|i| vec![i]).collect();
        let ps = PointSet::new(&coords).unwrap();
        let r = l1_regress_points(&ps, &wf(&[0, 5, 3, 4, 9], &[1, 1, 1, 1, 1])).unwrap();
        assert_eq!(exact(&r), rat(2));
    }

    #[test]
    fn l2_two_vertex_mean() {
        let dag = Dag::chain(2);
        let r = l2_exact(&dag, &wf(&[1, 0], &[1, 1])).unwrap();
        assert_eq!(r.values[0], Rat::new(1, 2));
        assert_eq!(r.values[1], Rat::new(1, 2));
        assert_eq!(exact(&r), Rat::new(1, 2));
    }

    #[test]
    fn l2_weighted_mean() {
        let dag = Dag::chain(2);
        let r = l2_exact(&dag, &wf(&[1, 0], &[1, 3])).unwrap();
        assert_eq!(r.values[0], Rat::new(1, 4));
        assert_eq!(r.values[1], Rat::new(1, 4));
        assert_eq!(exact(&r), Rat::new(3, 4));
    }

    #[test]
    fn l2_on_worked_chain() {
        let dag = Dag::chain(5);
        let r = l2_exact(&dag, &wf(&[0, 5, 3, 4, 9], &[1, 1, 1, 1, 1])).unwrap();
        assert_eq!(exact(&r), rat(2));
        assert_eq!(r.values[1], rat(4));
        assert_eq!(r.values[2], rat(4));
        assert_eq!(r.values[3], rat(4));
    }

    #[test]
    fn l2_zero_weight_vertices_follow_for_free() {
        let dag = Dag::chain(2);
        let r = l2_exact(&dag, &wf(&[5, 0], &[1, 0])).unwrap();
        assert_eq!(exact(&r), rat(0));
        assert_eq!(r.values[0], rat(5));
        assert!(r.values[1] >= rat(5));
    }

    #[test]
    fn l2_all_zero_weights_cost_nothing() {
        let dag = Dag::chain(3);
        let r = l2_exact(&dag, &wf(&[5, 9, 0], &[0, 0, 0])).unwrap();
        assert_eq!(exact(&r), rat(0));
        for i in 1..3 {
            assert!(r.values[i - 1] <= r.values[i]);
        }
    }

    #[test]
    fn l2_points_incomparable_stay_put() {
        // Antichain in 2-d: nothing to fix.
        let ps = PointSet::new(&[vec![0, 1], vec![1, 0]]).unwrap();
        let r = l2_exact_points(&ps, &wf(&[7, -3], &[2, 5])).unwrap();
        assert_eq!(exact(&r), rat(0));
        assert_eq!(r.values[0], rat(7));
        assert_eq!(r.values[1], rat(-3));
    }

    #[test]
    fn lp_two_vertex_converges_to_the_midpoint() {
        let dag = Dag::chain(2);
        let r = lp_approx(&dag, &wf(&[1, 0], &[1, 1]), 2.0, None, 1 << 20).unwrap();
        assert_eq!(r.values[0], Rat::new(1, 2));
        assert_eq!(r.values[1], Rat::new(1, 2));
        match r.error {
            ErrorSum::Approx(e) => assert!((e - 0.5).abs() < 1e-12, "error {e}"),
            _ => panic!("approximate metric must report an approximate error"),
        }
    }

    #[test]
    fn lp_three_halves_behaves_like_a_median_mean_blend() {
        // p = 1.5 on a two-vertex conflict lands strictly between the
        // endpoints and stays isotonic.
        let dag = Dag::chain(2);
        let r = lp_approx(&dag, &wf(&[8, 0], &[1, 1]), 1.5, None, 1 << 20).unwrap();
        assert!(r.values[0] <= r.values[1]);
        assert!(r.values[0] > rat(0) && r.values[0] < rat(8));
    }

    #[test]
    fn lp_rejects_bad_parameters() {
        let dag = Dag::chain(2);
        let f = wf(&[1, 0], &[1, 1]);
        assert!(matches!(
            lp_approx(&dag, &f, 1.0, None, 1 << 20),
            Err(Error::InvalidP(_))
        ));
        assert!(matches!(
            lp_approx(&dag, &f, 2.0, Some(rat(0)), 1 << 20),
            Err(Error::InvalidDelta(_))
        ));
        assert!(matches!(
            lp_approx(&dag, &f, 2.0, None, 0),
            Err(Error::InvalidDelta(_))
        ));
    }

    #[test]
    fn binary_split_prefers_the_cheaper_flip() {
        let dag = Dag::chain(2);
        // Heavy upstream vertex keeps its preferred high side.
        let sides = binary_l1(&dag, &wf(&[9, 2], &[5, 1]), 2, 9).unwrap();
        assert_eq!(sides, vec![true, true]);
        // Equal weights still collapse to one side (never stay violating).
        let sides = binary_l1(&dag, &wf(&[9, 2], &[1, 1]), 2, 9).unwrap();
        assert_eq!(sides[0], sides[1]);
        // Isotonic preferences are kept as-is.
        let sides = binary_l1(&dag, &wf(&[2, 9], &[1, 1]), 2, 9).unwrap();
        assert_eq!(sides, vec![false, true]);
    }

    #[test]
    fn binary_split_validates_endpoints() {
        let dag = Dag::chain(2);
        assert!(matches!(
            binary_l1(&dag, &wf(&[1, 0], &[1, 1]), 7, 7),
            Err(Error::InvalidSplit(7, 7))
        ));
    }

    #[test]
    fn l1_matches_brute_force_on_small_chains() {
        // Exhaustive check over all value vectors in a small box.
        let dag = Dag::chain(3);
        for a in 0..4 {
            for b in 0..4 {
                for c in 0..4 {
                    let f = wf(&[a, b, c], &[2, 1, 3]);
                    let r = l1_regress(&dag, &f).unwrap();
                    let mut best = i64::MAX;
                    for x in 0..4i64 {
                        for y in x..4 {
                            for z in y..4 {
                                let cost = 2 * (x - a).abs() + (y - b).abs() + 3 * (z - c).abs();
                                best = best.min(cost);
                            }
                        }
                    }
                    assert_eq!(exact(&r), rat(best), "f = {:?}", (a, b, c));
                }
            }
        }
    }
}
