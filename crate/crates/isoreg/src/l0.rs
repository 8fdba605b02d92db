//! Weighted-change (L0) isotonic regression: keep a maximum-weight set of
//! vertices at their values — an antichain of the violator graph together
//! with every pruned vertex — and extend isotonically over the rest.

use crate::bits::Mask;
use crate::error::{Error, Result};
use crate::flow::max_weight_antichain;
use crate::order::{
    prune_nonviolating, regression_error, Dag, Diagnostics, Metric, RegressionResult,
    WeightedFunction,
};
use crate::rational::{rat, Rat};
use crate::relation::Relation;
use crate::violator::{rendezvous_violator, violator_closure, PointSet, ViolatorDag};

/// Largest vertex count for pipelines that materialize a dense relation.
pub(crate) const RELATION_LIMIT: usize = 20_000;

/// Extends the values of `anchors` (which must already be isotonic among
/// themselves) to a fully isotonic function that agrees with `values` on
/// every anchor. Non-anchor vertices get, in topological order: the running
/// maximum of their predecessors if an anchor lies above them, otherwise
/// the minimum anchor value below them, otherwise their own value capped
/// from below by their predecessors.
pub fn extend_antichain(dag: &Dag, values: &[i64], anchors: &[bool]) -> Result<Vec<i64>> {
    if values.len() != dag.len() || anchors.len() != dag.len() {
        return Err(Error::LengthMismatch {
            context: "extension inputs vs dag",
            expected: dag.len(),
            got: values.len().min(anchors.len()),
        });
    }
    extend_core(
        dag.len(),
        dag.topo(),
        values,
        anchors,
        |v, each| {
            for &u in dag.predecessors(v) {
                each(u as usize);
            }
        },
        |v, each| {
            for &w in dag.successors(v) {
                each(w as usize);
            }
        },
    )
}

/// Extension over a dense relation (point and comparator instances).
pub(crate) fn extend_over_relation(
    rel: &Relation,
    values: &[i64],
    anchors: &[bool],
) -> Result<Vec<i64>> {
    extend_masked(rel, &Mask::full(rel.len()), values, anchors)
}

/// Extension over the sub-order induced by `within`; vertices outside the
/// mask are ignored entirely and keep a zero in the output.
pub(crate) fn extend_masked(
    rel: &Relation,
    within: &Mask,
    values: &[i64],
    anchors: &[bool],
) -> Result<Vec<i64>> {
    let topo = rel.topo_within(within);
    extend_core(
        rel.len(),
        &topo,
        values,
        anchors,
        |v, each| {
            for u in within.iter_intersection(rel.pred.row(v)) {
                each(u);
            }
        },
        |v, each| {
            for w in within.iter_intersection(rel.succ.row(v)) {
                each(w);
            }
        },
    )
}

fn extend_core<P, S>(
    n: usize,
    topo: &[usize],
    f: &[i64],
    anchor: &[bool],
    preds: P,
    succs: S,
) -> Result<Vec<i64>>
where
    P: Fn(usize, &mut dyn FnMut(usize)),
    S: Fn(usize, &mut dyn FnMut(usize)),
{
    // Anchor-ancestor maxima, to verify the anchors are isotonic.
    let mut anc_max = vec![(false, i64::MIN); n];
    for &v in topo {
        let mut acc = (false, i64::MIN);
        preds(v, &mut |u| {
            if anc_max[u].0 {
                acc = (true, acc.1.max(anc_max[u].1));
            }
            if anchor[u] {
                acc = (true, acc.1.max(f[u]));
            }
        });
        if anchor[v] && acc.0 && acc.1 > f[v] {
            return Err(Error::NotAntichain(v));
        }
        anc_max[v] = acc;
    }
    // Minimum anchor value at or below each vertex.
    let mut below = vec![(false, i64::MAX); n];
    for &v in topo.iter().rev() {
        let mut acc = if anchor[v] { (true, f[v]) } else { (false, i64::MAX) };
        succs(v, &mut |w| {
            if below[w].0 {
                acc = (true, acc.1.min(below[w].1));
            }
        });
        below[v] = acc;
    }
    let mut out = vec![0i64; n];
    for &v in topo {
        if anchor[v] {
            out[v] = f[v];
            continue;
        }
        let mut pred_max = (false, i64::MIN);
        preds(v, &mut |u| {
            pred_max = (true, pred_max.1.max(out[u]));
        });
        out[v] = if anc_max[v].0 {
            // An anchor above caps every vertex below it, so the running
            // maximum of already-final predecessors is safe and isotonic.
            pred_max.1
        } else if below[v].0 {
            below[v].1
        } else if pred_max.0 {
            pred_max.1.max(f[v])
        } else {
            f[v]
        };
    }
    Ok(out)
}

/// Shared tail of every weighted-change pipeline: anchor the kept antichain
/// and the pruned vertices, extend, and package the result.
fn finish_l0(
    wf: &WeightedFunction,
    values: Vec<i64>,
    isotonic: bool,
    diagnostics: Diagnostics,
) -> Result<RegressionResult> {
    if !isotonic {
        return Err(Error::Internal("weighted-change output is not isotonic"));
    }
    let values: Vec<Rat> = values.into_iter().map(rat).collect();
    let error = regression_error(wf, &values, Metric::L0)?;
    Ok(RegressionResult {
        values,
        error,
        diagnostics,
    })
}

fn antichain_over_dag(
    dag: &Dag,
    wf: &WeightedFunction,
    diagnostics: &mut Diagnostics,
) -> Result<(Vec<usize>, i128)> {
    let vd = violator_closure(dag, wf)?;
    antichain_of(&vd, wf.weights(), diagnostics)
}

pub(crate) fn antichain_of(
    vd: &ViolatorDag,
    weights: &[i64],
    diagnostics: &mut Diagnostics,
) -> Result<(Vec<usize>, i128)> {
    let w128: Vec<i128> = weights.iter().map(|&w| w as i128).collect();
    diagnostics.observe_violator(
        vd.total_vertices(),
        vd.edges().len(),
        vd.steiner_vertices(),
    );
    let r = max_weight_antichain(vd, &w128)?;
    Ok((r.members, r.weight))
}

/// Weighted-change isotonic regression on a dag.
///
/// Prunes vertices outside every violating pair, solves a maximum-weight
/// antichain per weakly connected component of the remainder, and extends.
/// The reported error equals the total kept weight minus the antichain
/// weight, which is optimal.
pub fn l0_regress(dag: &Dag, wf: &WeightedFunction) -> Result<RegressionResult> {
    let pruned = prune_nonviolating(dag, wf)?;
    let mut diagnostics = Diagnostics {
        pruned_removed: pruned.removed.len(),
        ..Default::default()
    };
    if pruned.kept.is_empty() {
        return finish_l0(wf, wf.values().to_vec(), true, diagnostics);
    }
    let mut anchors = vec![false; dag.len()];
    for &v in &pruned.removed {
        anchors[v] = true;
    }
    let mut total_weight = 0i128;
    for comp in pruned.subdag.weak_components() {
        diagnostics.components += 1;
        if comp.len() == 1 {
            // A kept vertex with no kept neighbors can only pair with
            // removed vertices, which is impossible; still solve it for
            // uniformity (it forms a singleton antichain).
        }
        let (comp_dag, _) = pruned.subdag.induced(&comp);
        let comp_wf = pruned.sub_wf.restricted(&comp);
        let (members, weight) = antichain_over_dag(&comp_dag, &comp_wf, &mut diagnostics)?;
        total_weight += weight;
        for m in members {
            anchors[pruned.kept[comp[m]]] = true;
        }
    }
    diagnostics.antichain_weight = Some(total_weight);
    let values = extend_antichain(dag, wf.values(), &anchors)?;
    let isotonic = crate::order::isotonic_values_ok(dag, &values);
    finish_l0(wf, values, isotonic, diagnostics)
}

/// Weighted-change isotonic regression on points under strict domination,
/// using the rendezvous violator graph.
pub fn l0_regress_points(points: &PointSet, wf: &WeightedFunction) -> Result<RegressionResult> {
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
    let rel = points.relation();
    let f = wf.values();
    let full = Mask::full(points.len());
    let keep_mask = rel.violating_mask(f, &full);
    let kept: Vec<usize> = (0..points.len()).filter(|&v| keep_mask[v]).collect();
    let mut diagnostics = Diagnostics {
        pruned_removed: points.len() - kept.len(),
        ..Default::default()
    };
    let mut anchors: Vec<bool> = keep_mask.iter().map(|&k| !k).collect();
    if !kept.is_empty() {
        diagnostics.components = 1;
        let sub_points = points.restricted(&kept);
        let sub_wf = wf.restricted(&kept);
        let vd = rendezvous_violator(&sub_points, &sub_wf)?;
        let (members, weight) = antichain_of(&vd, sub_wf.weights(), &mut diagnostics)?;
        diagnostics.antichain_weight = Some(weight);
        for m in members {
            anchors[kept[m]] = true;
        }
    }
    let values = extend_over_relation(&rel, f, &anchors)?;
    let isotonic = rel.is_isotonic_i64(&values);
    finish_l0(wf, values, isotonic, diagnostics)
}

/// Weighted-change isotonic regression on an order given as a comparator.
pub fn l0_regress_pairwise<F>(
    n: usize,
    precedes: F,
    wf: &WeightedFunction,
) -> Result<RegressionResult>
where
    F: FnMut(usize, usize) -> bool,
{
    if wf.len() != n {
        return Err(Error::LengthMismatch {
            context: "function vs order",
            expected: n,
            got: wf.len(),
        });
    }
    if n > RELATION_LIMIT {
        return Err(Error::TooLarge(format!(
            "comparator regression supports at most {RELATION_LIMIT} vertices, got {n}"
        )));
    }
    let rel = Relation::from_comparator(n, precedes)?;
    let f = wf.values();
    let full = Mask::full(n);
    let keep_mask = rel.violating_mask(f, &full);
    let kept: Vec<usize> = (0..n).filter(|&v| keep_mask[v]).collect();
    let mut diagnostics = Diagnostics {
        pruned_removed: n - kept.len(),
        ..Default::default()
    };
    let mut anchors: Vec<bool> = keep_mask.iter().map(|&k| !k).collect();
    if !kept.is_empty() {
        diagnostics.components = 1;
        let kept_mask_bits = Mask::from_indices(n, &kept);
        let pairs = rel.violating_pairs(f, &kept_mask_bits);
        let mut to_sub = vec![u32::MAX; n];
        for (i, &v) in kept.iter().enumerate() {
            to_sub[v] = i as u32;
        }
        let edges: Vec<(u32, u32)> = pairs
            .into_iter()
            .map(|(u, v)| (to_sub[u], to_sub[v]))
            .collect();
        let vd = ViolatorDag::new(kept.len(), 0, edges);
        let sub_wf = wf.restricted(&kept);
        let (members, weight) = antichain_of(&vd, sub_wf.weights(), &mut diagnostics)?;
        diagnostics.antichain_weight = Some(weight);
        for m in members {
            anchors[kept[m]] = true;
        }
    }
    let values = extend_over_relation(&rel, f, &anchors)?;
    let isotonic = rel.is_isotonic_i64(&values);
    finish_l0(wf, values, isotonic, diagnostics)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::order::ErrorSum;

    fn wf(values: &[i64], weights: &[i64]) -> WeightedFunction {
        WeightedFunction::new(values.to_vec(), weights.to_vec()).unwrap()
    }

    fn l0_error(r: &RegressionResult) -> Rat {
        match &r.error {
            ErrorSum::Exact(e) => e.clone(),
            _ => panic!("weighted-change error must be exact"),
        }
    }

    #[test]
    fn extension_respects_anchors_and_order() {
        // Chain 0..5 with anchors {0,2,4} already isotonic.
        let dag = Dag::chain(5);
        let f = [1, 9, 3, -2, 7];
        let anchors = [true, false, true, false, true];
        let out = extend_antichain(&dag, &f, &anchors).unwrap();
        assert_eq!(out[0], 1);
        assert_eq!(out[2], 3);
        assert_eq!(out[4], 7);
        for i in 1..5 {
            assert!(out[i - 1] <= out[i]);
        }
    }

    #[test]
    fn extension_rejects_non_isotonic_anchors() {
        let dag = Dag::chain(2);
        let err = extend_antichain(&dag, &[5, 1], &[true, true]).unwrap_err();
        assert!(matches!(err, Error::NotAntichain(1)));
    }

    #[test]
    fn extension_mixes_lower_and_upper_rules_safely() {
        // Mixed configuration: x precedes y and c2, c1 precedes y. Anchors
        // c1 = 5 and c2 = 6 pull x down and y up; a naive "max below /
        // min above" assignment would order x above y and violate the edge
        // x → y.
        let dag = Dag::new(4, vec![(0, 1), (0, 3), (2, 1)]).unwrap();
        let f = [7, 4, 5, 6]; // x, y, c1, c2
        let anchors = [false, false, true, true];
        let out = extend_antichain(&dag, &f, &anchors).unwrap();
        assert_eq!(out[2], 5);
        assert_eq!(out[3], 6);
        assert!(out[0] <= out[1], "edge x→y violated: {out:?}");
        assert!(out[0] <= out[3] && out[2] <= out[1]);
    }

    #[test]
    fn l0_on_worked_chain() {
        // Values 0,5,3,4,9: keeping {0,3,4,9} changes one unit of weight.
        let dag = Dag::chain(5);
        let f = wf(&[0, 5, 3, 4, 9], &[1, 1, 1, 1, 1]);
        let r = l0_regress(&dag, &f).unwrap();
        assert_eq!(l0_error(&r), rat(1));
        assert_eq!(r.diagnostics.antichain_weight, Some(2));
        assert_eq!(r.diagnostics.pruned_removed, 2);
        assert_eq!(r.values[0], rat(0));
        assert_eq!(r.values[2], rat(3));
        assert_eq!(r.values[3], rat(4));
        assert_eq!(r.values[4], rat(9));
    }

    #[test]
    fn l0_weights_pick_the_cheaper_side() {
        // One violating pair; the heavy vertex must keep its value.
        let dag = Dag::chain(2);
        let r = l0_regress(&dag, &wf(&[9, 2], &[10, 1])).unwrap();
        assert_eq!(l0_error(&r), rat(1));
        assert_eq!(r.values[0], rat(9));
        assert!(r.values[1] >= rat(9));
    }

    #[test]
    fn l0_isotonic_input_is_free() {
        let dag = Dag::chain(4);
        let r = l0_regress(&dag, &wf(&[1, 1, 4, 9], &[3, 1, 4, 1])).unwrap();
        assert_eq!(l0_error(&r), rat(0));
        assert_eq!(r.diagnostics.pruned_removed, 4);
    }

    #[test]
    fn l0_disconnected_components_solve_independently() {
        // Two separate violating chains.
        let dag = Dag::new(4, vec![(0, 1), (2, 3)]).unwrap();
        let r = l0_regress(&dag, &wf(&[5, 1, 8, 2], &[1, 2, 3, 1])).unwrap();
        assert_eq!(l0_error(&r), rat(2));
        assert_eq!(r.diagnostics.components, 2);
    }

    #[test]
    fn l0_points_matches_dag_on_a_line() {
        let coords: Vec<Vec<i64>> = (0..5).map(|i| vec![i]).collect();
        let ps = PointSet::new(&coords).unwrap();
        let f = wf(&[0, 5, 3, 4, 9], &[1, 1, 1, 1, 1]);
        let r = l0_regress_points(&ps, &f).unwrap();
        assert_eq!(l0_error(&r), rat(1));
    }

    #[test]
    fn l0_pairwise_on_divisibility_order() {
        // 1 | 2 | 4 and 1 | 3: a small non-chain order via a comparator.
        let labels = [1i64, 2, 3, 4];
        let f = wf(&[4, 1, 2, 3], &[1, 1, 1, 1]);
        let r = l0_regress_pairwise(
            4,
            |u, v| labels[v] % labels[u] == 0 && labels[u] != labels[v],
            &f,
        )
        .unwrap();
        // Vertex 0 (label 1, value 4) conflicts with everything above it.
        assert_eq!(l0_error(&r), rat(1));
    }
}
