//! Shortest, then bend-minimal, edge routes in the routing graph, and the
//! repair step that makes every pair of routes cross at most once.

use alloc::collections::{BTreeSet, BinaryHeap};
use alloc::vec;
use alloc::vec::Vec;
use core::cmp::Ordering;

use crate::error::{Error, Result};
use crate::geom::{Point, Side};
use crate::graph::Multigraph;
use crate::ports::port_index;
use crate::routing_graph::RoutingGraph;

/// Route of one edge as a vertex sequence of the routing graph.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EdgePath {
    /// Edge index.
    pub edge: usize,
    pub vertices: Vec<usize>,
}

impl EdgePath {
    pub fn points(&self, h: &RoutingGraph) -> Vec<Point> {
        self.vertices.iter().map(|&v| h.points[v]).collect()
    }

    pub fn length(&self, h: &RoutingGraph) -> f64 {
        self.vertices.windows(2).map(|w| h.points[w[0]].dist(h.points[w[1]])).sum()
    }

    pub fn bends(&self, h: &RoutingGraph) -> usize {
        let dirs: Vec<Side> = self.directions(h);
        dirs.windows(2).filter(|w| w[0] != w[1]).count()
    }

    /// Direction of each step.
    pub fn directions(&self, h: &RoutingGraph) -> Vec<Side> {
        self.vertices
            .windows(2)
            .map(|w| Side::between(h.points[w[0]], h.points[w[1]]).expect("routing graph edges are axis-aligned"))
            .collect()
    }

    /// Endpoints and bend points.
    pub fn corners(&self, h: &RoutingGraph) -> Vec<Point> {
        corners_of(&self.points(h))
    }
}

/// Drops interior points where the direction does not change.
pub fn corners_of(points: &[Point]) -> Vec<Point> {
    let mut out: Vec<Point> = Vec::with_capacity(points.len());
    for &p in points {
        if out.last().is_some_and(|q: &Point| q.approx_eq(p)) {
            continue;
        }
        if out.len() >= 2 {
            let a = out[out.len() - 2];
            let b = out[out.len() - 1];
            if Side::between(a, b) == Side::between(b, p) {
                out.pop();
            }
        }
        out.push(p);
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq)]
struct Cost {
    len: f64,
    bends: u32,
}

impl Cost {
    fn better_than(&self, other: &Cost) -> bool {
        let tol = 1e-9 * (1.0 + other.len.abs());
        self.len < other.len - tol || (self.len <= other.len + tol && self.bends < other.bends)
    }
}

#[derive(Debug, PartialEq)]
struct Item {
    cost: Cost,
    state: usize,
}

impl Eq for Item {}

impl Ord for Item {
    fn cmp(&self, other: &Self) -> Ordering {
        // Min-heap on (length, bends, state).
        other
            .cost
            .len
            .total_cmp(&self.cost.len)
            .then(other.cost.bends.cmp(&self.cost.bends))
            .then(other.state.cmp(&self.state))
    }
}

impl PartialOrd for Item {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Relaxation order of outgoing directions.
const RELAX: [Side; 4] = [Side::E, Side::N, Side::W, Side::S];

/// Minimum-length path from `source` to `target`, and among those one with
/// the fewest bends. The search state is a vertex plus the direction it was
/// entered from. `edge` is stored in the result; `edge_id` is reported on
/// failure.
pub fn route_edge(h: &RoutingGraph, source: usize, target: usize, edge: usize, edge_id: u32) -> Result<EdgePath> {
    if source == target {
        return Ok(EdgePath { edge, vertices: vec![source] });
    }
    // State 5v + d: d < 4 is the entry direction, 4 is "not entered yet".
    let n = h.vertex_count();
    let mut best: Vec<Option<Cost>> = vec![None; 5 * n];
    let mut pred: Vec<usize> = vec![usize::MAX; 5 * n];
    let mut heap = BinaryHeap::new();
    let start = 5 * source + 4;
    best[start] = Some(Cost { len: 0.0, bends: 0 });
    heap.push(Item { cost: Cost { len: 0.0, bends: 0 }, state: start });
    while let Some(Item { cost, state }) = heap.pop() {
        if best[state] != Some(cost) {
            continue;
        }
        let v = state / 5;
        if v == target {
            break;
        }
        let entered = state % 5;
        for dir in RELAX {
            let Some(w) = h.neighbor(v, dir) else { continue };
            let turn = entered != 4 && entered != dir.index();
            let next = Cost { len: cost.len + h.points[v].dist(h.points[w]), bends: cost.bends + turn as u32 };
            let s = 5 * w + dir.index();
            if best[s].map_or(true, |b| next.better_than(&b)) {
                best[s] = Some(next);
                pred[s] = state;
                heap.push(Item { cost: next, state: s });
            }
        }
    }
    let end = (0..4)
        .map(|d| 5 * target + d)
        .filter(|&s| best[s].is_some())
        .reduce(|a, b| if best[b].unwrap().better_than(&best[a].unwrap()) { b } else { a })
        .ok_or(Error::RoutingFailure { edge: edge_id })?;
    let mut vertices = Vec::new();
    let mut s = end;
    while s != usize::MAX {
        vertices.push(s / 5);
        s = pred[s];
    }
    vertices.reverse();
    Ok(EdgePath { edge, vertices })
}

/// Routes every edge between its two port vertices.
pub fn route_all(graph: &Multigraph, h: &RoutingGraph) -> Result<Vec<EdgePath>> {
    graph
        .edges()
        .iter()
        .enumerate()
        .map(|(ei, e)| {
            let s = h.port_vertices[port_index(ei, 0)];
            let t = h.port_vertices[port_index(ei, 1)];
            route_edge(h, s, t, ei, e.id)
        })
        .collect()
}

/// Counterclockwise quarter turns from `from` to `to`.
fn turn(from: Side, to: Side) -> u8 {
    (to.ccw_steps() + 4 - from.ccw_steps()) % 4
}

fn dir(h: &RoutingGraph, a: usize, b: usize) -> Side {
    Side::between(h.points[a], h.points[b]).expect("routing graph edges are axis-aligned")
}

/// A maximal common subpath: `p[i..=j]` equals a run of `q`, walked
/// forward (`step = 1`) or backward (`step = -1`) from `q[k]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SharedRun {
    pub i: usize,
    pub j: usize,
    pub k: usize,
    pub step: isize,
}

/// Maximal common subpaths of two simple paths, in `p` order.
pub fn shared_runs(p: &[usize], q: &[usize]) -> Vec<SharedRun> {
    let mut qpos: Vec<(usize, usize)> = q.iter().enumerate().map(|(i, &v)| (v, i)).collect();
    qpos.sort_unstable();
    let find = |v: usize| qpos.binary_search_by(|e| e.0.cmp(&v)).ok().map(|x| qpos[x].1);
    let mut runs = Vec::new();
    let mut i = 0;
    while i < p.len() {
        let Some(k) = find(p[i]) else {
            i += 1;
            continue;
        };
        let mut j = i;
        let mut step = 0isize;
        while j + 1 < p.len() {
            let Some(next) = find(p[j + 1]) else { break };
            let cur = (k as isize) + step * (j - i) as isize;
            let d = next as isize - cur;
            if (d == 1 || d == -1) && (step == 0 || step == d) {
                step = d;
                j += 1;
            } else {
                break;
            }
        }
        runs.push(SharedRun { i, j, k, step: if step == 0 { 1 } else { step } });
        i = j + 1;
    }
    runs
}

/// Whether `q` crosses `p` transversally along a shared run.
pub fn run_crosses(h: &RoutingGraph, p: &[usize], q: &[usize], r: &SharedRun) -> bool {
    let qat = |t: isize| -> Option<usize> { (t >= 0 && (t as usize) < q.len()).then(|| q[t as usize]) };
    let k = r.k as isize;
    let l = k + r.step * (r.j - r.i) as isize;
    let (pa, pb) = (r.i.checked_sub(1).map(|x| p[x]), p.get(r.j + 1).copied());
    let (qa, qb) = (qat(k - r.step), qat(l + r.step));
    let (Some(pa), Some(pb), Some(qa), Some(qb)) = (pa, pb, qa, qb) else {
        return false;
    };
    let x = p[r.i];
    let y = p[r.j];
    if r.i == r.j {
        // Single vertex: arms alternate around it.
        let base = dir(h, x, pa);
        let tp = turn(base, dir(h, x, pb));
        let t1 = turn(base, dir(h, x, qa));
        let t2 = turn(base, dir(h, x, qb));
        return (t1 < tp) != (t2 < tp);
    }
    let rx = dir(h, x, p[r.i + 1]);
    let ry = dir(h, y, p[r.j - 1]);
    let at_x = turn(rx, dir(h, x, pa)) < turn(rx, dir(h, x, qa));
    let at_y = turn(ry, dir(h, y, pb)) < turn(ry, dir(h, y, qb));
    at_x == at_y
}

/// Transversal crossings between two routes.
pub fn count_crossings(h: &RoutingGraph, p: &[usize], q: &[usize]) -> usize {
    shared_runs(p, q).iter().filter(|r| run_crosses(h, p, q, r)).count()
}

/// Replaces the section of `q` between its first and last vertex shared
/// with `p` by the corresponding section of `p`.
fn adopt_section(p: &[usize], q: &[usize]) -> Option<Vec<usize>> {
    let mut ppos: Vec<(usize, usize)> = p.iter().enumerate().map(|(i, &v)| (v, i)).collect();
    ppos.sort_unstable();
    let find = |v: usize| ppos.binary_search_by(|e| e.0.cmp(&v)).ok().map(|x| ppos[x].1);
    let k0 = q.iter().position(|&v| find(v).is_some())?;
    let k1 = q.iter().rposition(|&v| find(v).is_some())?;
    let (i0, i1) = (find(q[k0])?, find(q[k1])?);
    let mut out: Vec<usize> = q[..k0].to_vec();
    if i0 <= i1 {
        out.extend_from_slice(&p[i0..=i1]);
    } else {
        out.extend(p[i1..=i0].iter().rev());
    }
    out.extend_from_slice(&q[k1 + 1..]);
    Some(out)
}

/// Repeatedly picks the lexicographically first pair of routes that cross
/// more than once and reroutes the later one along the earlier one between
/// their first and last shared vertex. Returns the number of rewrites;
/// stops after `max_rewrites`.
pub fn reduce_crossings(h: &RoutingGraph, paths: &mut [EdgePath], max_rewrites: usize) -> usize {
    let k = paths.len();
    let mut pending: BTreeSet<(usize, usize)> = BTreeSet::new();
    for a in 0..k {
        for b in a + 1..k {
            pending.insert((a, b));
        }
    }
    let mut rewrites = 0;
    while let Some((a, b)) = pending.pop_first() {
        if count_crossings(h, &paths[a].vertices, &paths[b].vertices) < 2 {
            continue;
        }
        if rewrites == max_rewrites {
            break;
        }
        let Some(next) = adopt_section(&paths[a].vertices, &paths[b].vertices) else { continue };
        paths[b].vertices = next;
        rewrites += 1;
        for x in 0..k {
            if x != b {
                pending.insert((x.min(b), x.max(b)));
            }
        }
    }
    rewrites
}
