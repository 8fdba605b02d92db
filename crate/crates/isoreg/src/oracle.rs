//! Brute-force reference solvers, for verifying the real pipelines on small
//! instances. Everything here is exponential and guarded by size limits.

use crate::bits::Mask;
use crate::error::{Error, Result};
use crate::order::{
    closure_matrix, regression_error, Dag, ErrorSum, Metric, WeightedFunction,
};
use crate::rational::{rat, rat_to_f64, Rat};
use crate::violator::ViolatorDag;

const MAX_ORACLE_VERTICES: usize = 10;
const MAX_ORACLE_STATES: f64 = 1e7;
const MAX_ANTICHAIN_VERTICES: usize = 20;

fn guard_states(grid: usize, n: usize) -> Result<()> {
    if (grid.max(1) as f64).powi(n as i32) > MAX_ORACLE_STATES {
        return Err(Error::TooLarge(format!(
            "oracle search space {grid}^{n} exceeds {MAX_ORACLE_STATES:e} states"
        )));
    }
    Ok(())
}

/// Exhaustive isotonic regression by searching every isotonic assignment of
/// grid values in topological order. The grid is the distinct input values
/// for L0 and L1 (some optimum always lies on it), the max-min formula for
/// L2 (positive weights required), and a `delta`-spaced grid for Lp
/// (`delta` defaults to 1/1024 of the value range). Limited to 10 vertices
/// and 10^7 search states.
pub fn oracle_regress(
    dag: &Dag,
    wf: &WeightedFunction,
    metric: Metric,
    delta: Option<Rat>,
) -> Result<(Vec<Rat>, ErrorSum)> {
    if wf.len() != dag.len() {
        return Err(Error::LengthMismatch {
            context: "function vs dag",
            expected: dag.len(),
            got: wf.len(),
        });
    }
    let n = dag.len();
    if n > MAX_ORACLE_VERTICES {
        return Err(Error::TooLarge(format!(
            "oracle supports at most {MAX_ORACLE_VERTICES} vertices, got {n}"
        )));
    }
    if n == 0 {
        return Ok((Vec::new(), regression_error(wf, &[], metric)?));
    }
    match metric {
        Metric::L2 => {
            let values = oracle_l2_maxmin(dag, wf)?;
            let error = regression_error(wf, &values, Metric::L2)?;
            Ok((values, error))
        }
        Metric::L0 | Metric::L1 => {
            let mut grid: Vec<i64> = wf.values().to_vec();
            grid.sort_unstable();
            grid.dedup();
            guard_states(grid.len(), n)?;
            let values = search_exact(dag, wf, metric, &grid);
            let values: Vec<Rat> = values.into_iter().map(rat).collect();
            let error = regression_error(wf, &values, metric)?;
            Ok((values, error))
        }
        Metric::Lp(p) => {
            let f = wf.values();
            let fmin = *f.iter().min().unwrap();
            let fmax = *f.iter().max().unwrap();
            let span = fmax - fmin;
            let grid: Vec<Rat> = if span == 0 {
                vec![rat(fmin)]
            } else {
                let delta = match delta {
                    Some(d) => d,
                    None => Rat::new(span as i128, 1024),
                };
                if delta <= rat(0) {
                    return Err(Error::InvalidDelta(format!(
                        "step must be positive, got {delta}"
                    )));
                }
                let count = num_integer::Integer::div_ceil(
                    &((span as i128) * delta.denom()),
                    delta.numer(),
                );
                if count > 1 << 24 {
                    return Err(Error::InvalidDelta(format!(
                        "step yields {count} oracle grid cells"
                    )));
                }
                (0..=count)
                    .map(|i| rat(fmin) + Rat::new(i, 1) * delta.clone())
                    .collect()
            };
            guard_states(grid.len(), n)?;
            let values = search_approx(dag, wf, p, &grid);
            let error = regression_error(wf, &values, metric)?;
            Ok((values, error))
        }
    }
}

/// Depth-first search over isotonic grid assignments with integer costs.
fn search_exact(dag: &Dag, wf: &WeightedFunction, metric: Metric, grid: &[i64]) -> Vec<i64> {
    let n = dag.len();
    let cost = |v: usize, g: i64| -> i128 {
        let w = wf.weights()[v] as i128;
        match metric {
            Metric::L0 => {
                if g == wf.values()[v] {
                    0
                } else {
                    w
                }
            }
            _ => w * (g - wf.values()[v]).abs() as i128,
        }
    };
    let mut idx = vec![0usize; n];
    let mut best_cost = i128::MAX;
    let mut best_idx = vec![0usize; n];
    fn dfs(
        k: usize,
        dag: &Dag,
        grid_len: usize,
        cost: &dyn Fn(usize, usize) -> i128,
        idx: &mut Vec<usize>,
        so_far: i128,
        best_cost: &mut i128,
        best_idx: &mut Vec<usize>,
    ) {
        let topo = dag.topo();
        if k == topo.len() {
            if so_far < *best_cost {
                *best_cost = so_far;
                best_idx.clone_from(idx);
            }
            return;
        }
        let v = topo[k];
        let lb = dag
            .predecessors(v)
            .iter()
            .map(|&u| idx[u as usize])
            .max()
            .unwrap_or(0);
        for i in lb..grid_len {
            let c = so_far + cost(v, i);
            if c >= *best_cost {
                continue;
            }
            idx[v] = i;
            dfs(k + 1, dag, grid_len, cost, idx, c, best_cost, best_idx);
        }
    }
    let cost_at = |v: usize, i: usize| cost(v, grid[i]);
    dfs(
        0,
        dag,
        grid.len(),
        &cost_at,
        &mut idx,
        0,
        &mut best_cost,
        &mut best_idx,
    );
    best_idx.iter().map(|&i| grid[i]).collect()
}

/// Depth-first search over isotonic grid assignments with `f64` costs.
fn search_approx(dag: &Dag, wf: &WeightedFunction, p: f64, grid: &[Rat]) -> Vec<Rat> {
    let n = dag.len();
    let grid_f: Vec<f64> = grid.iter().map(rat_to_f64).collect();
    let cost = |v: usize, i: usize| -> f64 {
        wf.weights()[v] as f64 * (grid_f[i] - wf.values()[v] as f64).abs().powf(p)
    };
    let topo = dag.topo();
    let mut idx = vec![0usize; n];
    let mut best_cost = f64::INFINITY;
    let mut best_idx = vec![0usize; n];
    // Iterative stack of (topo position, next grid index to try).
    let mut k = 0usize;
    let mut next = vec![0usize; n + 1];
    next[0] = 0;
    loop {
        if k == n {
            let total: f64 = (0..n).map(|v| cost(v, idx[v])).sum();
            if total < best_cost {
                best_cost = total;
                best_idx.clone_from(&idx);
            }
            k -= 1;
            continue;
        }
        let v = topo[k];
        let lb = dag
            .predecessors(v)
            .iter()
            .map(|&u| idx[u as usize])
            .max()
            .unwrap_or(0);
        let i = next[k].max(lb);
        if i >= grid_f.len() {
            if k == 0 {
                break;
            }
            k -= 1;
            continue;
        }
        idx[v] = i;
        next[k] = i + 1;
        next[k + 1] = 0;
        k += 1;
    }
    best_idx.iter().map(|&i| grid[i].clone()).collect()
}

/// Exact L2 values by the max-min formula: the optimum at `x` equals the
/// maximum over upper sets `U ∋ x` of the minimum over lower sets `L ∋ x`
/// of the weighted mean of `U ∩ L`. Requires strictly positive weights
/// (means of weightless sets are undefined) and at most 10 vertices.
pub fn oracle_l2_maxmin(dag: &Dag, wf: &WeightedFunction) -> Result<Vec<Rat>> {
    let n = dag.len();
    if wf.len() != n {
        return Err(Error::LengthMismatch {
            context: "function vs dag",
            expected: n,
            got: wf.len(),
        });
    }
    if n > MAX_ORACLE_VERTICES {
        return Err(Error::TooLarge(format!(
            "max-min oracle supports at most {MAX_ORACLE_VERTICES} vertices, got {n}"
        )));
    }
    for v in 0..n {
        if wf.weights()[v] <= 0 {
            return Err(Error::ZeroWeight(v));
        }
    }
    if n == 0 {
        return Ok(Vec::new());
    }
    let closure = closure_matrix(dag);
    let full = Mask::full(n);
    let mut anc = vec![0u32; n];
    let mut desc = vec![0u32; n];
    for u in 0..n {
        for v in full.iter_intersection(closure.row(u)) {
            desc[u] |= 1 << v;
            anc[v] |= 1 << u;
        }
    }
    let total = 1usize << n;
    let mut wsum = vec![0i128; total];
    let mut wfsum = vec![0i128; total];
    for s in 1..total {
        let b = s.trailing_zeros() as usize;
        let rest = s & (s - 1);
        wsum[s] = wsum[rest] + wf.weights()[b] as i128;
        wfsum[s] = wfsum[rest] + wf.weights()[b] as i128 * wf.values()[b] as i128;
    }
    let mut lower_sets: Vec<u32> = Vec::new();
    let mut upper_sets: Vec<u32> = Vec::new();
    for s in 0..total as u32 {
        let mut is_lower = true;
        let mut is_upper = true;
        let mut bits = s;
        while bits != 0 && (is_lower || is_upper) {
            let v = bits.trailing_zeros() as usize;
            bits &= bits - 1;
            if anc[v] & !s != 0 {
                is_lower = false;
            }
            if desc[v] & !s != 0 {
                is_upper = false;
            }
        }
        if is_lower {
            lower_sets.push(s);
        }
        if is_upper {
            upper_sets.push(s);
        }
    }
    // Means compared by cross-multiplication; intersections always contain
    // x, so their weight is positive.
    let less = |a: (i128, i128), b: (i128, i128)| a.0 * b.1 < b.0 * a.1;
    let mut out = Vec::with_capacity(n);
    for x in 0..n {
        let xb = 1u32 << x;
        let mut best: Option<(i128, i128)> = None;
        for &u in &upper_sets {
            if u & xb == 0 {
                continue;
            }
            let mut worst: Option<(i128, i128)> = None;
            for &l in &lower_sets {
                if l & xb == 0 {
                    continue;
                }
                let s = (u & l) as usize;
                let cand = (wfsum[s], wsum[s]);
                worst = Some(match worst {
                    Some(w) if !less(cand, w) => w,
                    _ => cand,
                });
            }
            let w = worst.expect("the full vertex set is a lower set");
            best = Some(match best {
                Some(b) if !less(b, w) => b,
                _ => w,
            });
        }
        let b = best.expect("the full vertex set is an upper set");
        out.push(Rat::new(b.0, b.1));
    }
    Ok(out)
}

/// Maximum-weight antichain of a violator graph by subset enumeration over
/// its real vertices (paths through helper vertices included). Limited to
/// 20 real vertices.
pub fn oracle_antichain(vd: &ViolatorDag, weights: &[i64]) -> Result<(Vec<usize>, i128)> {
    let r = vd.real_vertices();
    if weights.len() != r {
        return Err(Error::LengthMismatch {
            context: "weights vs violator vertices",
            expected: r,
            got: weights.len(),
        });
    }
    if r > MAX_ANTICHAIN_VERTICES {
        return Err(Error::TooLarge(format!(
            "antichain oracle supports at most {MAX_ANTICHAIN_VERTICES} vertices, got {r}"
        )));
    }
    let reach = vd.reachability()?;
    let mut conflict = vec![0u32; r];
    for u in 0..r {
        for v in 0..r {
            if u != v && (reach.get(u, v) || reach.get(v, u)) {
                conflict[u] |= 1 << v;
            }
        }
    }
    let mut best_weight = 0i128;
    let mut best_set = 0u32;
    for s in 0..(1u64 << r) as u32 {
        let mut ok = true;
        let mut weight = 0i128;
        let mut bits = s;
        while bits != 0 {
            let v = bits.trailing_zeros() as usize;
            bits &= bits - 1;
            if conflict[v] & s != 0 {
                ok = false;
                break;
            }
            weight += weights[v] as i128;
        }
        if ok && weight > best_weight {
            best_weight = weight;
            best_set = s;
        }
    }
    let members: Vec<usize> = (0..r).filter(|&v| best_set & (1 << v) != 0).collect();
    Ok((members, best_weight))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chain::pav_l2;
    use crate::l0::l0_regress;
    use crate::partition::{l1_regress, l2_exact};
    use crate::violator::violator_closure;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn wf(values: &[i64], weights: &[i64]) -> WeightedFunction {
        WeightedFunction::new(values.to_vec(), weights.to_vec()).unwrap()
    }

    fn random_dag(rng: &mut ChaCha8Rng, n: usize) -> Dag {
        let mut edges = Vec::new();
        for u in 0..n {
            for v in u + 1..n {
                if rng.gen_bool(0.35) {
                    edges.push((u, v));
                }
            }
        }
        Dag::new(n, edges).unwrap()
    }

    #[test]
    fn maxmin_matches_pooling_on_chains() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..100 {
            let n = rng.gen_range(1..=6);
            let f: Vec<i64> = (0..n).map(|_| rng.gen_range(-3..=3)).collect();
            let w: Vec<i64> = (0..n).map(|_| rng.gen_range(1..=4)).collect();
            let dag = Dag::chain(n);
            let func = wf(&f, &w);
            let oracle = oracle_l2_maxmin(&dag, &func).unwrap();
            let pav = pav_l2(&func).unwrap();
            assert_eq!(oracle, pav.values, "f {f:?} w {w:?}");
        }
    }

    #[test]
    fn maxmin_matches_partition_solver_on_random_dags() {
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        for _ in 0..60 {
            let n = rng.gen_range(1..=6);
            let dag = random_dag(&mut rng, n);
            let f: Vec<i64> = (0..n).map(|_| rng.gen_range(0..=4)).collect();
            let w: Vec<i64> = (0..n).map(|_| rng.gen_range(1..=3)).collect();
            let func = wf(&f, &w);
            let oracle = oracle_l2_maxmin(&dag, &func).unwrap();
            let solved = l2_exact(&dag, &func).unwrap();
            assert_eq!(oracle, solved.values, "n {n} f {f:?} w {w:?}");
        }
    }

    #[test]
    fn maxmin_requires_positive_weights() {
        let dag = Dag::chain(2);
        let err = oracle_l2_maxmin(&dag, &wf(&[1, 0], &[1, 0])).unwrap_err();
        assert!(matches!(err, Error::ZeroWeight(1)));
    }

    #[test]
    fn exhaustive_search_matches_l0_and_l1_pipelines() {
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        for _ in 0..80 {
            let n = rng.gen_range(1..=5);
            let dag = random_dag(&mut rng, n);
            let f: Vec<i64> = (0..n).map(|_| rng.gen_range(0..=3)).collect();
            let w: Vec<i64> = (0..n).map(|_| rng.gen_range(1..=3)).collect();
            let func = wf(&f, &w);
            let (_, e0) = oracle_regress(&dag, &func, Metric::L0, None).unwrap();
            let r0 = l0_regress(&dag, &func).unwrap();
            assert_eq!(e0.expect_exact(), r0.error.expect_exact(), "L0 f {f:?}");
            let (_, e1) = oracle_regress(&dag, &func, Metric::L1, None).unwrap();
            let r1 = l1_regress(&dag, &func).unwrap();
            assert_eq!(e1.expect_exact(), r1.error.expect_exact(), "L1 f {f:?}");
        }
    }

    #[test]
    fn oracle_rejects_large_instances() {
        let dag = Dag::chain(11);
        let f: Vec<i64> = (0..11).collect();
        let w = vec![1i64; 11];
        assert!(matches!(
            oracle_regress(&dag, &wf(&f, &w), Metric::L1, None),
            Err(Error::TooLarge(_))
        ));
    }

    #[test]
    fn antichain_oracle_on_the_worked_chain() {
        // Violator graph of values 0,5,3,4,9 on a chain, kept vertices only.
        let dag = Dag::chain(3);
        let func = wf(&[5, 3, 4], &[1, 1, 1]);
        let vd = violator_closure(&dag, &func).unwrap();
        let (members, weight) = oracle_antichain(&vd, func.weights()).unwrap();
        assert_eq!(weight, 2);
        assert_eq!(members, vec![1, 2]);
    }

    #[test]
    fn antichain_oracle_handles_the_empty_graph() {
        let dag = Dag::chain(2);
        let func = wf(&[1, 2], &[1, 1]);
        let vd = violator_closure(&dag, &func).unwrap();
        let (members, weight) = oracle_antichain(&vd, func.weights()).unwrap();
        assert_eq!(weight, 2);
        assert_eq!(members.len(), 2);
    }
}
