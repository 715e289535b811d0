//! Order of the routes inside every bundle of the routing graph.
//!
//! To order two routes on an edge we walk along their common subpath until
//! they split (a fork) or until an edge whose order is already fixed.
//! Horizontal edges always look west and vertical edges south, so order
//! changes can only happen where the shared subpath bends.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::vec::Vec;

use crate::error::{invalid, Result};
use crate::geom::{Point, Side};
use crate::routing::{corners_of, EdgePath};
use crate::routing_graph::RoutingGraph;

/// Routing graph edge as `(a, b)` with `b` east or north of `a`.
pub type HEdge = (usize, usize);

pub fn h_edge(h: &RoutingGraph, a: usize, b: usize) -> HEdge {
    match Side::between(h.points[a], h.points[b]) {
        Some(Side::E) | Some(Side::N) => (a, b),
        _ => (b, a),
    }
}

/// Per routing graph edge, the routes using it (as indices into the path
/// list): top to bottom on horizontal edges, left to right on vertical ones.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct BundleOrder {
    pub bundles: BTreeMap<HEdge, Vec<usize>>,
}

impl BundleOrder {
    pub fn get(&self, e: HEdge) -> Option<&[usize]> {
        self.bundles.get(&e).map(|v| v.as_slice())
    }

    pub fn rank(&self, e: HEdge, path: usize) -> Option<usize> {
        self.bundles.get(&e)?.iter().position(|&p| p == path)
    }
}

/// Sorted `(vertex, position)` pairs of a path.
struct PathIndex(Vec<(usize, usize)>);

impl PathIndex {
    fn new(vertices: &[usize]) -> Self {
        let mut v: Vec<(usize, usize)> = vertices.iter().enumerate().map(|(i, &x)| (x, i)).collect();
        v.sort_unstable();
        Self(v)
    }

    fn pos(&self, v: usize) -> Option<usize> {
        self.0.binary_search_by(|e| e.0.cmp(&v)).ok().map(|i| self.0[i].1)
    }
}

fn dir(h: &RoutingGraph, a: usize, b: usize) -> Side {
    Side::between(h.points[a], h.points[b]).expect("routing graph edges are axis-aligned")
}

/// +1 for a left turn, -1 for a right turn, 0 for straight on.
fn leftness(from: Side, to: Side) -> i8 {
    match (to.ccw_steps() + 4 - from.ccw_steps()) % 4 {
        1 => 1,
        3 => -1,
        _ => 0,
    }
}

/// Whether the earlier route in an edge's stored order is on the left when
/// travelling in `travel`.
fn earlier_is_left(travel: Side) -> bool {
    matches!(travel, Side::E | Side::N)
}

struct Walker<'a> {
    h: &'a RoutingGraph,
    paths: &'a [EdgePath],
    index: &'a [PathIndex],
}

impl Walker<'_> {
    /// Vertex after `cur` on path `p` when arriving from `prev`.
    fn next(&self, p: usize, prev: usize, cur: usize) -> Option<usize> {
        let verts = &self.paths[p].vertices;
        let i = self.index[p].pos(cur)?;
        let before = i.checked_sub(1).map(|k| verts[k]);
        let after = verts.get(i + 1).copied();
        if before == Some(prev) {
            after
        } else {
            before
        }
    }

    /// Whether `p` lies left of `q` when both run from `from` to `to`,
    /// judged from the first fork or fixed edge further along. `None` when
    /// one of them ends there and the other goes straight on.
    fn p_left_of_q(&self, done: &BTreeMap<HEdge, Vec<usize>>, p: usize, q: usize, from: usize, to: usize) -> Option<bool> {
        let (mut prev, mut cur, mut travel) = (from, to, dir(self.h, from, to));
        loop {
            let np = self.next(p, prev, cur);
            let nq = self.next(q, prev, cur);
            match (np, nq) {
                (Some(a), Some(b)) if a == b => {
                    let t = dir(self.h, cur, a);
                    if let Some(order) = done.get(&h_edge(self.h, cur, a)) {
                        let rp = order.iter().position(|&x| x == p).expect("route on its edge");
                        let rq = order.iter().position(|&x| x == q).expect("route on its edge");
                        return Some((rp < rq) == earlier_is_left(t));
                    }
                    prev = cur;
                    cur = a;
                    travel = t;
                }
                _ => {
                    let lp = np.map_or(0, |a| leftness(travel, dir(self.h, cur, a)));
                    let lq = nq.map_or(0, |b| leftness(travel, dir(self.h, cur, b)));
                    return (lp != lq).then_some(lp > lq);
                }
            }
        }
    }
}

/// Orders every bundle. Edges are handled in ascending `(a, b)` order.
pub fn order_paths(h: &RoutingGraph, paths: &[EdgePath]) -> Result<BundleOrder> {
    let index: Vec<PathIndex> = paths.iter().map(|p| PathIndex::new(&p.vertices)).collect();
    for (pi, idx) in index.iter().enumerate() {
        if idx.0.windows(2).any(|w| w[0].0 == w[1].0) {
            return Err(invalid(format!("route of edge index {} visits a vertex twice", paths[pi].edge)));
        }
    }
    let mut users: BTreeMap<HEdge, Vec<usize>> = BTreeMap::new();
    for (pi, p) in paths.iter().enumerate() {
        for w in p.vertices.windows(2) {
            users.entry(h_edge(h, w[0], w[1])).or_default().push(pi);
        }
    }
    let walker = Walker { h, paths, index: &index };
    let mut done: BTreeMap<HEdge, Vec<usize>> = BTreeMap::new();
    for (e, members) in users {
        let (a, b) = e;
        // Look west or south: travel from b to a.
        let travel = dir(h, b, a);
        let k = members.len();
        let mut later = alloc::vec![0usize; k];
        for x in 0..k {
            for y in x + 1..k {
                let (p, q) = (members[x], members[y]);
                let left = walker
                    .p_left_of_q(&done, p, q, b, a)
                    .or_else(|| walker.p_left_of_q(&done, p, q, a, b).map(|l| !l))
                    .unwrap_or(p > q);
                // Left of a westward or southward walk is later in order.
                let x_later = left != earlier_is_left(travel);
                if x_later {
                    later[x] += 1;
                } else {
                    later[y] += 1;
                }
            }
        }
        let mut order: Vec<usize> = (0..k).collect();
        order.sort_by(|&x, &y| later[x].cmp(&later[y]).then(members[x].cmp(&members[y])));
        done.insert(e, order.into_iter().map(|i| members[i]).collect());
    }
    Ok(BundleOrder { bundles: done })
}

/// Crossings between routes `p` and `q` implied by the bundle order along
/// their maximal common subpaths, counting order changes between
/// consecutive shared edges and mismatches with the arms at both ends.
/// Crossings at a single shared vertex are included.
pub fn implied_crossings(h: &RoutingGraph, paths: &[EdgePath], order: &BundleOrder, p: usize, q: usize) -> usize {
    let pv = &paths[p].vertices;
    let qv = &paths[q].vertices;
    let mut total = 0;
    for r in crate::routing::shared_runs(pv, qv) {
        if r.i == r.j {
            total += crate::routing::run_crosses(h, pv, qv, &r) as usize;
            continue;
        }
        let qat = |t: isize| (t >= 0 && (t as usize) < qv.len()).then(|| qv[t as usize]);
        let k = r.k as isize;
        let l = k + r.step * (r.j - r.i) as isize;
        let mut sides = Vec::with_capacity(r.j - r.i);
        for s in r.i..r.j {
            let t = dir(h, pv[s], pv[s + 1]);
            let e = h_edge(h, pv[s], pv[s + 1]);
            let rp = order.rank(e, p).expect("route on its edge");
            let rq = order.rank(e, q).expect("route on its edge");
            sides.push((rp < rq) == earlier_is_left(t));
        }
        total += sides.windows(2).filter(|w| w[0] != w[1]).count();
        let x = pv[r.i];
        if let (Some(pa), Some(qa)) = (r.i.checked_sub(1).map(|s| pv[s]), qat(k - r.step)) {
            let t0 = dir(h, x, pv[r.i + 1]);
            let turn = |v: usize| (dir(h, x, v).ccw_steps() + 4 - t0.ccw_steps()) % 4;
            let p_left = turn(pa) < turn(qa);
            total += (p_left != sides[0]) as usize;
        }
        let y = pv[r.j];
        if let (Some(pb), Some(qb)) = (pv.get(r.j + 1).copied(), qat(l + r.step)) {
            let t1 = dir(h, pv[r.j - 1], y);
            let p_left = leftness(t1, dir(h, y, pb)) > leftness(t1, dir(h, y, qb));
            total += (p_left != *sides.last().expect("non-empty run")) as usize;
        }
    }
    total
}

/// Polyline with collinear runs merged and repeated points removed, so
/// consecutive segments alternate orientation.
pub fn join_collinear(points: &[Point]) -> Vec<Point> {
    corners_of(points)
}
