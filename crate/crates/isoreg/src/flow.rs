//! Minimum flow with lower bounds, and the maximum-weight antichain it
//! yields on a violator graph.
//!
//! Every graph vertex `v` is split into `v_in → v_out` with a lower bound of
//! `w(v)` (zero for helpers) and unbounded capacity; the source feeds every
//! real `v_in`, every real `v_out` drains to the sink, and violator edges
//! connect `u_out → v_in`. The minimum feasible flow value equals the
//! maximum antichain weight, and the split arcs crossing the cut found from
//! the final residual graph are exactly an optimal antichain.

use crate::error::{Error, Result};
use crate::violator::ViolatorDag;

/// One arc with a lower bound, a capacity, and its current flow.
#[derive(Clone, Copy, Debug)]
pub struct FlowArc {
    pub from: u32,
    pub to: u32,
    pub lower: i128,
    pub cap: i128,
    pub flow: i128,
}

/// A flow network. Node 0 is the source, node 1 the sink; adjacency stores
/// `(arc index, is_forward)` so an arc is walkable in both directions.
#[derive(Clone, Debug)]
pub struct FlowNetwork {
    pub nodes: usize,
    pub source: usize,
    pub sink: usize,
    pub arcs: Vec<FlowArc>,
    adj: Vec<Vec<(u32, bool)>>,
}

impl FlowNetwork {
    pub fn new(nodes: usize, source: usize, sink: usize) -> FlowNetwork {
        FlowNetwork {
            nodes,
            source,
            sink,
            arcs: Vec::new(),
            adj: vec![Vec::new(); nodes],
        }
    }

    pub fn add_arc(&mut self, from: usize, to: usize, lower: i128, cap: i128) -> usize {
        let id = self.arcs.len();
        self.arcs.push(FlowArc {
            from: from as u32,
            to: to as u32,
            lower,
            cap,
            flow: 0,
        });
        self.adj[from].push((id as u32, true));
        self.adj[to].push((id as u32, false));
        id
    }

    /// Net flow out of the source.
    pub fn value(&self) -> i128 {
        let s = self.source as u32;
        self.arcs
            .iter()
            .map(|a| {
                if a.from == s {
                    a.flow
                } else if a.to == s {
                    -a.flow
                } else {
                    0
                }
            })
            .sum()
    }

    /// Checks conservation at internal nodes and per-arc bound compliance.
    pub fn is_feasible(&self) -> bool {
        if self.arcs.iter().any(|a| a.flow < a.lower || a.flow > a.cap) {
            return false;
        }
        let mut net = vec![0i128; self.nodes];
        for a in &self.arcs {
            net[a.from as usize] -= a.flow;
            net[a.to as usize] += a.flow;
        }
        (0..self.nodes)
            .filter(|&v| v != self.source && v != self.sink)
            .all(|v| net[v] == 0)
    }

    fn residual(&self, arc: &FlowArc, forward: bool, respect_lower: bool) -> i128 {
        if forward {
            arc.cap - arc.flow
        } else if respect_lower {
            arc.flow - arc.lower
        } else {
            arc.flow
        }
    }

    /// Dinic's algorithm from `from` to `to` on the residual graph. With
    /// `respect_lower`, backward residuals stop at each arc's lower bound
    /// (the mode used to reduce a feasible flow to a minimum one).
    pub fn max_flow(&mut self, from: usize, to: usize, respect_lower: bool) -> i128 {
        let mut total = 0i128;
        loop {
            // BFS levels on residual arcs.
            let mut level = vec![u32::MAX; self.nodes];
            level[from] = 0;
            let mut queue = std::collections::VecDeque::from([from]);
            while let Some(v) = queue.pop_front() {
                for &(id, fwd) in &self.adj[v] {
                    let a = &self.arcs[id as usize];
                    let next = if fwd { a.to } else { a.from } as usize;
                    if level[next] == u32::MAX && self.residual(a, fwd, respect_lower) > 0 {
                        level[next] = level[v] + 1;
                        queue.push_back(next);
                    }
                }
            }
            if level[to] == u32::MAX {
                return total;
            }
            // Iterative blocking-flow DFS with per-node arc pointers.
            let mut ptr = vec![0usize; self.nodes];
            'augment: loop {
                let mut path: Vec<(u32, bool)> = Vec::new();
                let mut v = from;
                loop {
                    if v == to {
                        let mut push = i128::MAX;
                        for &(id, fwd) in &path {
                            push =
                                push.min(self.residual(&self.arcs[id as usize], fwd, respect_lower));
                        }
                        for &(id, fwd) in &path {
                            let a = &mut self.arcs[id as usize];
                            if fwd {
                                a.flow += push;
                            } else {
                                a.flow -= push;
                            }
                        }
                        total += push;
                        // Retreat to just after the first saturated arc.
                        let mut keep = 0;
                        for (i, &(id, fwd)) in path.iter().enumerate() {
                            if self.residual(&self.arcs[id as usize], fwd, respect_lower) == 0 {
                                keep = i;
                                break;
                            }
                        }
                        path.truncate(keep);
                        v = path.last().map_or(from, |&(id, fwd)| {
                            let a = &self.arcs[id as usize];
                            (if fwd { a.to } else { a.from }) as usize
                        });
                        continue;
                    }
                    // Advance along the next viable arc, or retreat.
                    let mut advanced = false;
                    while ptr[v] < self.adj[v].len() {
                        let (id, fwd) = self.adj[v][ptr[v]];
                        let a = &self.arcs[id as usize];
                        let next = if fwd { a.to } else { a.from } as usize;
                        if level[next] == level[v] + 1
                            && self.residual(a, fwd, respect_lower) > 0
                        {
                            path.push((id, fwd));
                            v = next;
                            advanced = true;
                            break;
                        }
                        ptr[v] += 1;
                    }
                    if advanced {
                        continue;
                    }
                    // Dead end: cut this node out of the level graph.
                    level[v] = u32::MAX;
                    match path.pop() {
                        Some((id, fwd)) => {
                            let a = &self.arcs[id as usize];
                            v = (if fwd { a.from } else { a.to }) as usize;
                        }
                        None => break 'augment,
                    }
                }
            }
        }
    }

    /// Nodes reachable from `start` through positive residuals (with lower
    /// bounds respected on backward traversal).
    pub fn residual_reachable(&self, start: usize) -> Vec<bool> {
        let mut seen = vec![false; self.nodes];
        seen[start] = true;
        let mut stack = vec![start];
        while let Some(v) = stack.pop() {
            for &(id, fwd) in &self.adj[v] {
                let a = &self.arcs[id as usize];
                let next = if fwd { a.to } else { a.from } as usize;
                if !seen[next] && self.residual(a, fwd, true) > 0 {
                    seen[next] = true;
                    stack.push(next);
                }
            }
        }
        seen
    }
}

#[inline]
fn node_in(v: usize) -> usize {
    2 + 2 * v
}

#[inline]
fn node_out(v: usize) -> usize {
    3 + 2 * v
}

/// Builds the antichain network for a violator graph: split arcs carry each
/// real vertex's weight as a lower bound, helpers route freely, and all
/// capacities are effectively unbounded.
pub fn build_antichain_network(vd: &ViolatorDag, weights: &[i128]) -> Result<FlowNetwork> {
    if weights.len() != vd.real_vertices() {
        return Err(Error::LengthMismatch {
            context: "weights vs violator vertices",
            expected: vd.real_vertices(),
            got: weights.len(),
        });
    }
    if let Some(i) = weights.iter().position(|&w| w < 0) {
        return Err(Error::NegativeWeight(weights[i].min(i64::MAX as i128) as i64, i));
    }
    let total = vd.total_vertices();
    let mut net = FlowNetwork::new(2 + 2 * total, 0, 1);
    // The network is acyclic, so no arc can ever carry more than the total
    // of all lower bounds; one more than that is effectively infinite.
    let inf: i128 = weights.iter().sum::<i128>() + 1;
    for v in 0..total {
        let lower = if v < vd.real_vertices() { weights[v] } else { 0 };
        net.add_arc(node_in(v), node_out(v), lower, inf);
    }
    for v in 0..vd.real_vertices() {
        net.add_arc(net.source, node_in(v), 0, inf);
        net.add_arc(node_out(v), net.sink, 0, inf);
    }
    for &(u, v) in vd.edges() {
        net.add_arc(node_out(u as usize), node_in(v as usize), 0, inf);
    }
    Ok(net)
}

/// Establishes a feasible flow (routing each vertex's weight through its
/// split arc), then reduces it to a minimum flow by pushing sink-to-source
/// flow in the residual graph. Returns the minimum flow value.
pub fn min_flow_lower_bounds(net: &mut FlowNetwork) -> Result<i128> {
    // The antichain network admits the direct per-vertex routing; find the
    // three arcs of each route by scanning. Arc order from the builder:
    // split arcs first, then (source, v_in) and (v_out, sink) pairs.
    for a in &mut net.arcs {
        a.flow = 0;
    }
    let mut feed_into = vec![usize::MAX; net.nodes];
    let mut drain_from = vec![usize::MAX; net.nodes];
    for (i, a) in net.arcs.iter().enumerate() {
        if a.from as usize == net.source {
            feed_into[a.to as usize] = i;
        }
        if a.to as usize == net.sink {
            drain_from[a.from as usize] = i;
        }
    }
    for id in 0..net.arcs.len() {
        let (from, to, need) = {
            let a = &net.arcs[id];
            (a.from as usize, a.to as usize, a.lower)
        };
        if need == 0 {
            continue;
        }
        let feed = feed_into[from];
        let drain = drain_from[to];
        if feed == usize::MAX || drain == usize::MAX {
            return Err(Error::Internal("split arc lacks a source feed or sink drain"));
        }
        net.arcs[feed].flow += need;
        net.arcs[id].flow += need;
        net.arcs[drain].flow += need;
    }
    if !net.is_feasible() {
        return Err(Error::Internal("initial routing is not feasible"));
    }
    let (sink, source) = (net.sink, net.source);
    net.max_flow(sink, source, true);
    if !net.is_feasible() {
        return Err(Error::Internal("flow reduction broke feasibility"));
    }
    Ok(net.value())
}

/// A maximum-weight antichain with the matching flow value.
#[derive(Clone, Debug)]
pub struct AntichainResult {
    /// Real vertex ids, ascending.
    pub members: Vec<usize>,
    /// Total weight of the members.
    pub weight: i128,
    /// Minimum flow value of the network; equals `weight`.
    pub flow_value: i128,
}

/// Computes a maximum-weight antichain of the violator graph: no member
/// reaches another by a path, and no heavier such set exists.
pub fn max_weight_antichain(vd: &ViolatorDag, weights: &[i128]) -> Result<AntichainResult> {
    let mut net = build_antichain_network(vd, weights)?;
    let flow_value = min_flow_lower_bounds(&mut net)?;
    let reach = net.residual_reachable(net.sink);
    let mut members = Vec::new();
    let mut weight = 0i128;
    for v in 0..vd.real_vertices() {
        if reach[node_out(v)] && !reach[node_in(v)] {
            members.push(v);
            weight += weights[v];
        }
    }
    // Helper split arcs may also cross the cut, but they carry zero lower
    // bound; the real members must account for the entire flow value.
    if weight != flow_value {
        return Err(Error::ExtractionMismatch(
            "antichain weight does not match the minimum flow value",
        ));
    }
    Ok(AntichainResult {
        members,
        weight,
        flow_value,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn antichain(real: usize, edges: Vec<(u32, u32)>, weights: &[i128]) -> AntichainResult {
        let vd = ViolatorDag::new(real, 0, edges);
        max_weight_antichain(&vd, weights).unwrap()
    }

    #[test]
    fn no_edges_keeps_every_weighted_vertex() {
        let r = antichain(3, vec![], &[2, 3, 4]);
        assert_eq!(r.members, vec![0, 1, 2]);
        assert_eq!(r.weight, 9);
        assert_eq!(r.flow_value, 9);
    }

    #[test]
    fn two_vertex_conflict_keeps_the_heavier() {
        let r = antichain(2, vec![(0, 1)], &[5, 3]);
        assert_eq!(r.members, vec![0]);
        assert_eq!(r.weight, 5);
        let r = antichain(2, vec![(0, 1)], &[3, 5]);
        assert_eq!(r.members, vec![1]);
    }

    #[test]
    fn chain_conflict_is_an_independent_set_problem() {
        // 0→1, 1→2, 0→2: any two of {0,1,2} conflict, so best is the max.
        let r = antichain(3, vec![(0, 1), (1, 2), (0, 2)], &[4, 6, 5]);
        assert_eq!(r.members, vec![1]);
        assert_eq!(r.weight, 6);
    }

    #[test]
    fn v_shape_keeps_both_leaves() {
        // 0 reaches both 1 and 2; 1 and 2 are unrelated.
        let r = antichain(3, vec![(0, 1), (0, 2)], &[5, 3, 3]);
        assert_eq!(r.members, vec![1, 2]);
        assert_eq!(r.weight, 6);
        let r = antichain(3, vec![(0, 1), (0, 2)], &[7, 3, 3]);
        assert_eq!(r.members, vec![0]);
    }

    #[test]
    fn helper_vertices_route_conflicts() {
        // 0 → h → 1 with helper id 2: same as a direct conflict.
        let vd = ViolatorDag::new(2, 1, vec![(0, 2), (2, 1)]);
        let r = max_weight_antichain(&vd, &[2, 9]).unwrap();
        assert_eq!(r.members, vec![1]);
        assert_eq!(r.weight, 9);
    }

    #[test]
    fn zero_weight_vertices_never_join() {
        let r = antichain(2, vec![], &[0, 7]);
        assert_eq!(r.members, vec![1]);
        assert_eq!(r.weight, 7);
    }

    #[test]
    fn min_flow_leaves_a_feasible_network() {
        let vd = ViolatorDag::new(3, 0, vec![(0, 1), (0, 2)]);
        let mut net = build_antichain_network(&vd, &[5, 3, 3]).unwrap();
        let value = min_flow_lower_bounds(&mut net).unwrap();
        assert!(net.is_feasible());
        assert_eq!(value, net.value());
        assert_eq!(value, 6);
    }
}
