//! Fast paths for linear orders. Vertices are ordered by index:
//! `0 ≺ 1 ≺ … ≺ n−1`. These avoid the flow machinery entirely: L2 by
//! pooling adjacent violators, L0 by a maximum-weight weakly increasing
//! subsequence, L1 by value partitioning with prefix-sum splits.

use crate::error::{Error, Result};
use crate::l0::extend_antichain;
use crate::order::{
    removal_bands, Dag, Diagnostics, Metric, RegressionResult, WeightedFunction,
};
use crate::partition::{partition_split, BinarySolver, ChainSolver, L1Costs};
use crate::rational::{rat, Rat};

/// Exact L2 isotonic regression on a chain by pooling adjacent violators:
/// scan left to right keeping a stack of blocks with increasing means,
/// merging whenever a new block's mean drops below its predecessor's. Each
/// final block takes its exact weighted mean (unweighted mean for an
/// all-zero-weight block, whose value is free but must stay in order).
pub fn pav_l2(wf: &WeightedFunction) -> Result<RegressionResult> {
    let n = wf.len();
    struct Block {
        wsum: i128,
        wfsum: i128,
        count: i128,
        fsum: i128,
        len: usize,
    }
    fn mean(b: &Block) -> Rat {
        if b.wsum > 0 {
            Rat::new(b.wfsum, b.wsum)
        } else {
            Rat::new(b.fsum, b.count)
        }
    }
    let mut stack: Vec<(Block, Rat)> = Vec::new();
    for v in 0..n {
        let w = wf.weights()[v] as i128;
        let f = wf.values()[v] as i128;
        let b = Block {
            wsum: w,
            wfsum: w * f,
            count: 1,
            fsum: f,
            len: 1,
        };
        let m = mean(&b);
        stack.push((b, m));
        while stack.len() >= 2 && stack[stack.len() - 2].1 > stack[stack.len() - 1].1 {
            let (top, _) = stack.pop().unwrap();
            let last = stack.last_mut().unwrap();
            last.0.wsum += top.wsum;
            last.0.wfsum += top.wfsum;
            last.0.count += top.count;
            last.0.fsum += top.fsum;
            last.0.len += top.len;
            last.1 = mean(&last.0);
        }
    }
    let mut values = Vec::with_capacity(n);
    for (b, m) in &stack {
        for _ in 0..b.len {
            values.push(m.clone());
        }
    }
    RegressionResult::checked(&Dag::chain(n), wf, Metric::L2, values, Diagnostics::default())
}

/// Prefix-maximum tree over value ranks: `best_up_to(r)` returns the largest
/// stored entry among ranks `0..=r`. Entries only grow, which is all a
/// longest/heaviest increasing subsequence scan needs.
struct PrefixMax {
    tree: Vec<(i128, u32)>,
}

impl PrefixMax {
    fn new(size: usize) -> PrefixMax {
        PrefixMax {
            tree: vec![(i128::MIN, u32::MAX); size + 1],
        }
    }

    fn raise(&mut self, rank: usize, entry: (i128, u32)) {
        let mut i = rank + 1;
        while i < self.tree.len() {
            if entry > self.tree[i] {
                self.tree[i] = entry;
            }
            i += i & i.wrapping_neg();
        }
    }

    fn best_up_to(&self, rank: usize) -> (i128, u32) {
        let mut best = (i128::MIN, u32::MAX);
        let mut i = rank + 1;
        while i > 0 {
            if self.tree[i] > best {
                best = self.tree[i];
            }
            i -= i & i.wrapping_neg();
        }
        best
    }
}

/// Weighted-change (L0) isotonic regression on a chain: the kept vertices
/// form a maximum-weight weakly increasing subsequence, found in
/// `O(n log n)` with a prefix-maximum tree over value ranks; everything else
/// is changed and extended between the kept anchors.
pub fn l0_chain(wf: &WeightedFunction) -> Result<RegressionResult> {
    let n = wf.len();
    let dag = Dag::chain(n);
    if n == 0 {
        return RegressionResult::checked(&dag, wf, Metric::L0, Vec::new(), Diagnostics::default());
    }
    let f = wf.values();
    let mut ranks: Vec<i64> = f.to_vec();
    ranks.sort_unstable();
    ranks.dedup();
    let rank = |v: i64| ranks.partition_point(|&x| x < v);
    let mut tree = PrefixMax::new(ranks.len());
    let mut parent = vec![u32::MAX; n];
    let mut score = vec![0i128; n];
    let mut best_end: usize = 0;
    for v in 0..n {
        let r = rank(f[v]);
        let (prev, prev_v) = tree.best_up_to(r);
        let base = if prev == i128::MIN { 0 } else { prev };
        score[v] = base + wf.weights()[v] as i128;
        parent[v] = if prev == i128::MIN { u32::MAX } else { prev_v };
        if score[v] > score[best_end] {
            best_end = v;
        }
        tree.raise(r, (score[v], v as u32));
    }
    let mut anchors = vec![false; n];
    let mut v = best_end as u32;
    loop {
        anchors[v as usize] = true;
        if parent[v as usize] == u32::MAX {
            break;
        }
        v = parent[v as usize];
    }
    let values = extend_antichain(&dag, f, &anchors)?;
    let values: Vec<Rat> = values.into_iter().map(rat).collect();
    // Report the same split as the flow pipeline: vertices outside every
    // violating pair count as pruned, and the antichain weight covers only
    // the kept violating vertices. Every positive-weight non-violating
    // vertex belongs to some maximum subsequence, so subtracting their
    // weight from the subsequence total gives exactly the antichain weight.
    let keep = crate::order::violating_mask(&dag, f);
    let removed_weight: i128 = (0..n)
        .filter(|&v| !keep[v])
        .map(|v| wf.weights()[v] as i128)
        .sum();
    let diag = Diagnostics {
        antichain_weight: Some(score[best_end] - removed_weight),
        pruned_removed: keep.iter().filter(|&&k| !k).count(),
        ..Default::default()
    };
    RegressionResult::checked(&dag, wf, Metric::L0, values, diag)
}

/// Minimum-cost two-value assignment on a chain (`false` = lower value):
/// isotonic 0/1 labelings of a chain are zero-prefixes, so a prefix-sum
/// scan finds the best cut, taking the earliest cut on ties.
pub fn binary_l1_chain(wf: &WeightedFunction, a: i64, b: i64) -> Result<Vec<bool>> {
    if a >= b {
        return Err(Error::InvalidSplit(a, b));
    }
    let n = wf.len();
    let f = wf.values();
    let mut labels = Vec::with_capacity(n);
    let mut weights = Vec::with_capacity(n);
    for v in 0..n {
        let da = (f[v] as i128 - a as i128).abs();
        let db = (f[v] as i128 - b as i128).abs();
        let w = (wf.weights()[v] as i128)
            .checked_mul((da - db).abs())
            .ok_or(Error::Overflow)?;
        labels.push((db < da) as u8);
        weights.push(w);
    }
    let verts: Vec<usize> = (0..n).collect();
    let mut diag = Diagnostics::default();
    let solved = ChainSolver.solve(&verts, &labels, &weights, &mut diag)?;
    Ok(solved.into_iter().map(|s| s == 1).collect())
}

/// Exact L1 isotonic regression on a chain by value partitioning, with each
/// two-value split solved by the prefix-sum cut instead of a flow.
pub fn l1_chain(wf: &WeightedFunction) -> Result<RegressionResult> {
    let n = wf.len();
    let dag = Dag::chain(n);
    let f = wf.values();
    // Prune vertices outside every violating pair: value at least the
    // prefix maximum and at most the suffix minimum.
    let mut keep = vec![false; n];
    let mut pre_max = i64::MIN;
    for v in 0..n {
        if pre_max > f[v] {
            keep[v] = true;
        }
        pre_max = pre_max.max(f[v]);
    }
    let mut suc_min = i64::MAX;
    for v in (0..n).rev() {
        if suc_min < f[v] {
            keep[v] = true;
        }
        suc_min = suc_min.min(f[v]);
    }
    let kept: Vec<usize> = (0..n).filter(|&v| keep[v]).collect();
    let mut diag = Diagnostics {
        pruned_removed: n - kept.len(),
        ..Default::default()
    };
    if kept.is_empty() {
        let values = f.iter().map(|&v| rat(v)).collect();
        return RegressionResult::checked(&dag, wf, Metric::L1, values, diag);
    }
    let kept_wf = wf.restricted(&kept);
    let mut grid: Vec<i64> = kept_wf.values().to_vec();
    grid.sort_unstable();
    grid.dedup();
    let costs = L1Costs {
        f: kept_wf.values(),
        w: kept_wf.weights(),
        grid: &grid,
    };
    let m = kept.len();
    let mut out = vec![0i128; m];
    partition_split(
        &ChainSolver,
        &costs,
        (0..m).collect(),
        0,
        grid.len() as i128 - 1,
        &mut out,
        &mut diag,
    )?;
    let removed_mask: Vec<bool> = keep.iter().map(|&k| !k).collect();
    let (lo, hi) = removal_bands(&dag, f, &removed_mask);
    let mut values: Vec<Rat> = f.iter().map(|&v| rat(v)).collect();
    for (i, &orig) in kept.iter().enumerate() {
        let v = grid[out[i] as usize].clamp(lo[orig], hi[orig]);
        values[orig] = rat(v);
    }
    RegressionResult::checked(&dag, wf, Metric::L1, values, diag)
}
