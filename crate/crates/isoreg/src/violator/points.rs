//! Points under strict domination, and the rendezvous violator graph that
//! represents all violating pairs with near-linear edges.

use std::collections::HashMap;

use crate::bits::BitMatrix;
use crate::error::{Error, Result};
use crate::order::WeightedFunction;
use crate::relation::Relation;
use crate::violator::steiner::{down_choices, up_choices, SteinerCoordinate};
use crate::violator::ViolatorDag;

/// Distinct points in `d ≥ 1` dimensions, ordered by strict domination:
/// `u ≺ v` iff `u ≤ v` in every coordinate and `u ≠ v`.
///
/// Coordinates are kept as dense per-dimension ranks; domination only
/// depends on per-dimension order, so ranks are equivalent to raw values.
#[derive(Clone, Debug)]
pub struct PointSet {
    n: usize,
    d: usize,
    /// `ranks[i][v]`: rank of point v's i-th coordinate among the distinct
    /// values seen in dimension i.
    ranks: Vec<Vec<u32>>,
    /// Number of distinct values per dimension.
    sizes: Vec<u32>,
}

impl PointSet {
    /// Validates dimensions agree and points are pairwise distinct.
    pub fn new(coords: &[Vec<i64>]) -> Result<PointSet> {
        let n = coords.len();
        let d = coords.first().map_or(1, |c| c.len());
        if d == 0 {
            return Err(Error::LengthMismatch {
                context: "point dimension",
                expected: 1,
                got: 0,
            });
        }
        for c in coords {
            if c.len() != d {
                return Err(Error::LengthMismatch {
                    context: "point coordinates",
                    expected: d,
                    got: c.len(),
                });
            }
        }
        let mut ranks: Vec<Vec<u32>> = Vec::with_capacity(d);
        let mut sizes: Vec<u32> = Vec::with_capacity(d);
        for i in 0..d {
            let mut values: Vec<i64> = coords.iter().map(|c| c[i]).collect();
            values.sort_unstable();
            values.dedup();
            ranks.push(
                coords
                    .iter()
                    .map(|c| values.partition_point(|&x| x < c[i]) as u32)
                    .collect(),
            );
            sizes.push(values.len() as u32);
        }
        // Duplicate detection via rank tuples.
        let mut seen: HashMap<Vec<u32>, usize> = HashMap::with_capacity(n);
        for v in 0..n {
            let key: Vec<u32> = (0..d).map(|i| ranks[i][v]).collect();
            if let Some(&u) = seen.get(&key) {
                return Err(Error::DuplicatePoint(u, v));
            }
            seen.insert(key, v);
        }
        Ok(PointSet { n, d, ranks, sizes })
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    /// Strict domination: every coordinate of `u` at most `v`'s, points
    /// distinct (distinctness is a construction invariant).
    pub fn dominated_by(&self, u: usize, v: usize) -> bool {
        u != v && (0..self.d).all(|i| self.ranks[i][u] <= self.ranks[i][v])
    }

    /// Restriction to `keep` (ascending indices), re-ranked.
    pub(crate) fn restricted(&self, keep: &[usize]) -> PointSet {
        let coords: Vec<Vec<i64>> = keep
            .iter()
            .map(|&v| (0..self.d).map(|i| self.ranks[i][v] as i64).collect())
            .collect();
        PointSet::new(&coords).expect("a subset of distinct points stays distinct")
    }

    /// The full domination relation as a dense matrix pair.
    pub(crate) fn relation(&self) -> Relation {
        let mut succ = BitMatrix::new(self.n);
        for u in 0..self.n {
            for v in 0..self.n {
                if self.dominated_by(u, v) {
                    succ.set(u, v);
                }
            }
        }
        Relation::from_succ(succ)
    }

    /// Per-dimension rank sum, the tie-breaker that keeps equal-value
    /// comparable points unconnected in the rendezvous graph.
    fn rank_sum(&self, v: usize) -> u64 {
        (0..self.d).map(|i| self.ranks[i][v] as u64).sum()
    }
}

/// Maps boxes (axis-aligned, given as lower/upper corners) to points in
/// `2d` dimensions such that strict box containment becomes strict
/// domination: the image is `(−lower_1, …, −lower_d, upper_1, …, upper_d)`.
pub fn boxes_to_domination(lowers: &[Vec<i64>], uppers: &[Vec<i64>]) -> Result<PointSet> {
    if lowers.len() != uppers.len() {
        return Err(Error::LengthMismatch {
            context: "box corner lists",
            expected: lowers.len(),
            got: uppers.len(),
        });
    }
    let d = lowers.first().map_or(1, |c| c.len());
    let mut coords = Vec::with_capacity(lowers.len());
    for (b, (lo, hi)) in lowers.iter().zip(uppers).enumerate() {
        if lo.len() != d || hi.len() != d {
            return Err(Error::LengthMismatch {
                context: "box dimension",
                expected: d,
                got: lo.len().max(hi.len()),
            });
        }
        if lo.iter().zip(hi).any(|(l, h)| l > h) {
            return Err(Error::InvalidBox(b));
        }
        let mut c: Vec<i64> = lo.iter().map(|&l| l.checked_neg().ok_or(Error::Overflow)).collect::<Result<_>>()?;
        c.extend_from_slice(hi);
        coords.push(c);
    }
    PointSet::new(&coords)
}

/// One effective dimension of the rendezvous encoding.
struct RvDim {
    /// Modified coordinate per point (reversed base rank, or the final
    /// violation-rank dimension).
    coord: Vec<u32>,
    /// Bit width of the coordinates.
    width: u8,
    /// Bit offset of this dimension's code inside the packed key.
    shift: u32,
}

/// Builds the violator graph of a weighted function on a point set via
/// rendezvous vertices.
///
/// Modified coordinates reverse every base dimension and append a rank of
/// `(value, rank sum)`, so one point's modified coordinates dominate
/// another's exactly when the pair is violating. Each point then links down
/// and up to dyadic-prefix helper vertices; a violating pair always meets at
/// a unique helper two edges apart, and every path implies a violating pair.
pub fn rendezvous_violator(points: &PointSet, wf: &WeightedFunction) -> Result<ViolatorDag> {
    let n = points.len();
    if wf.len() != n {
        return Err(Error::LengthMismatch {
            context: "function vs points",
            expected: n,
            got: wf.len(),
        });
    }
    if n <= 1 {
        return Ok(ViolatorDag::new(n, 0, Vec::new()));
    }
    let f = wf.values();

    let mut dims = Vec::new();
    let mut shift = 0u32;
    for i in 0..points.dim() {
        let size = points.sizes[i];
        if size <= 1 {
            continue; // single-valued dimensions order nothing
        }
        let width = bit_width(size - 1);
        let top = size - 1;
        let coord = (0..n).map(|v| top - points.ranks[i][v]).collect();
        dims.push(RvDim { coord, width, shift });
        shift += width as u32 + 1;
    }
    // Final dimension: dense ascending rank of (value, rank sum). A
    // violating pair then dominates in every modified dimension, while a
    // comparable non-violating pair always fails here: for equal values the
    // dominated point's rank sum is strictly larger. Point index breaks
    // exact ties to keep the rank injective.
    {
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by_key(|&v| (f[v], points.rank_sum(v), v));
        let mut coord = vec![0u32; n];
        for (r, &v) in order.iter().enumerate() {
            coord[v] = r as u32;
        }
        let width = bit_width((n - 1) as u32);
        dims.push(RvDim { coord, width, shift });
        shift += width as u32 + 1;
    }
    if shift > 127 {
        return Err(Error::TooLarge(format!(
            "rendezvous key needs {shift} bits; at most 127 supported"
        )));
    }
    if shift <= 64 {
        build_edges(n, &dims, |codes, dims| {
            let mut key = 0u64;
            for (c, dim) in codes.iter().zip(dims) {
                key |= (*c as u64) << dim.shift;
            }
            key
        })
    } else {
        build_edges(n, &dims, |codes, dims| {
            let mut key = 0u128;
            for (c, dim) in codes.iter().zip(dims) {
                key |= (*c as u128) << dim.shift;
            }
            key
        })
    }
}

fn bit_width(max_value: u32) -> u8 {
    (32 - max_value.leading_zeros()).max(1) as u8
}

/// Enumerates every down- and up-combination of prefix choices per point,
/// keeps helper keys that occur in both directions, and emits the edges.
fn build_edges<K, P>(n: usize, dims: &[RvDim], pack: P) -> Result<ViolatorDag>
where
    K: Copy + Ord + std::hash::Hash,
    P: Fn(&[u64], &[RvDim]) -> K,
{
    let mut down: Vec<(K, u32)> = Vec::new(); // point → helper
    let mut up: Vec<(K, u32)> = Vec::new(); // helper → point
    let mut choices: Vec<Vec<SteinerCoordinate>> = Vec::with_capacity(dims.len());
    let mut codes: Vec<u64> = vec![0; dims.len()];
    for v in 0..n {
        for direction in 0..2 {
            choices.clear();
            for dim in dims {
                let x = dim.coord[v];
                choices.push(if direction == 0 {
                    down_choices(x, dim.width)
                } else {
                    up_choices(x, dim.width)
                });
            }
            // Odometer over the choice lists; index 0 everywhere is the
            // all-exact combination, i.e. the point itself — skipped.
            let mut idx = vec![0usize; dims.len()];
            loop {
                let mut i = 0;
                loop {
                    idx[i] += 1;
                    if idx[i] < choices[i].len() {
                        break;
                    }
                    idx[i] = 0;
                    i += 1;
                    if i == dims.len() {
                        break;
                    }
                }
                if i == dims.len() {
                    break; // wrapped around: enumeration done
                }
                for (j, &k) in idx.iter().enumerate() {
                    codes[j] = choices[j][k].heap_code();
                }
                let key = pack(&codes, dims);
                if direction == 0 {
                    down.push((key, v as u32));
                } else {
                    up.push((key, v as u32));
                }
            }
        }
    }

    down.sort_unstable();
    up.sort_unstable();

    // Helpers reachable from above and exiting below; everything else can
    // sit on no point-to-point path.
    let mut ids: HashMap<K, u32> = HashMap::new();
    {
        let (mut i, mut j) = (0, 0);
        while i < down.len() && j < up.len() {
            match down[i].0.cmp(&up[j].0) {
                std::cmp::Ordering::Less => i += 1,
                std::cmp::Ordering::Greater => j += 1,
                std::cmp::Ordering::Equal => {
                    let key = down[i].0;
                    let next = ids.len() as u32;
                    ids.insert(key, next);
                    while i < down.len() && down[i].0 == key {
                        i += 1;
                    }
                    while j < up.len() && up[j].0 == key {
                        j += 1;
                    }
                }
            }
        }
    }

    let steiner = ids.len();
    let mut edges = Vec::new();
    for (key, v) in down {
        if let Some(&s) = ids.get(&key) {
            edges.push((v, n as u32 + s));
        }
    }
    for (key, v) in up {
        if let Some(&s) = ids.get(&key) {
            edges.push((n as u32 + s, v));
        }
    }
    Ok(ViolatorDag::new(n, steiner, edges))
}
