//! Sparse routing graph built from the empty channels between boxes.
//!
//! Every box (and the left border) gets its narrowest channel to the right;
//! every box (and the bottom border) its narrowest channel above. One
//! straight representative per surviving channel, plus stubs from ports,
//! and the graph vertices are ports and representative crossings.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{invalid, Error, Result};
use crate::geom::{point_key, BoxShape, Interval, OrdF64, Orientation, OrthoSegment, Point, Rect, SegmentOwner, Side, EPS};
use crate::ports::PortAssignment;

/// What bounds a channel on one side.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Bound {
    Box(usize),
    Border,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Channel {
    pub orientation: Orientation,
    pub rect: Rect,
    /// Left object for vertical channels, lower object for horizontal ones.
    pub low: Bound,
    /// Right object for vertical channels, upper object for horizontal ones.
    pub high: Bound,
}

impl Channel {
    /// Extent along the channel's own direction: y for vertical channels.
    pub fn projection(&self) -> Interval {
        match self.orientation {
            Orientation::Vertical => self.rect.y_range(),
            Orientation::Horizontal => self.rect.x_range(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RepSource {
    Channel(usize),
    /// Stub leaving the port with this index.
    Port(usize),
    /// Crossbar placed so a stub that met no representative is reachable.
    Bridge(usize),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Representative {
    pub segment: OrthoSegment,
    pub source: RepSource,
}

/// Bounding box of all boxes, enlarged by `margin` on every side.
pub fn routing_bounds(boxes: &[BoxShape], margin: f64) -> Option<Rect> {
    let mut it = boxes.iter().map(|b| b.rect());
    let first = it.next()?;
    Some(it.fold(first, |acc, r| acc.union(&r)).inflate(margin))
}

fn check_inside(rects: &[Rect], bounds: &Rect) -> Result<()> {
    for (i, r) in rects.iter().enumerate() {
        if r.x0 < bounds.x0 || r.y0 < bounds.y0 || r.x1 > bounds.x1 || r.y1 > bounds.y1 {
            return Err(invalid(format!("box {i} lies outside the routing bounds")));
        }
    }
    Ok(())
}

/// Removes the open range `cut` from every interval of `free`.
fn subtract(free: &mut Vec<Interval>, cut: Interval) {
    let mut out = Vec::with_capacity(free.len() + 1);
    for f in free.iter() {
        if !f.overlaps_open(&cut) {
            out.push(*f);
            continue;
        }
        if f.lo < cut.lo {
            out.push(Interval { lo: f.lo, hi: cut.lo });
        }
        if cut.hi < f.hi {
            out.push(Interval { lo: cut.hi, hi: f.hi });
        }
    }
    *free = out;
}

/// Narrowest channel to the right of the object with right edge `ux` and
/// vertical extent `iu`. `order` lists box indices sorted by `(x0, index)`.
fn right_channel(rects: &[Rect], order: &[usize], bounds: &Rect, low: Bound, ux: f64, iu: Interval) -> Option<Channel> {
    let own = match low {
        Bound::Box(u) => Some(u),
        Bound::Border => None,
    };
    let mut free = vec![bounds.y_range()];
    for (i, r) in rects.iter().enumerate() {
        if Some(i) != own && r.x0 <= ux + EPS && r.x1 > ux {
            subtract(&mut free, r.y_range());
        }
    }
    free.retain(|f| f.overlaps_open(&iu));
    let start = order.partition_point(|&i| rects[i].x0 <= ux + EPS);
    let mut k = start;
    while k < order.len() && !free.is_empty() {
        let x = rects[order[k]].x0;
        let end = k + order[k..].iter().take_while(|&&i| rects[i].x0 == x).count();
        for &w in &order[k..end] {
            let wy = rects[w].y_range();
            if let Some(f) = free.iter().find(|f| f.overlaps_open(&wy)) {
                return Some(Channel {
                    orientation: Orientation::Vertical,
                    rect: Rect::new(ux, f.lo, x, f.hi),
                    low,
                    high: Bound::Box(w),
                });
            }
        }
        for &w in &order[k..end] {
            subtract(&mut free, rects[w].y_range());
        }
        free.retain(|f| f.overlaps_open(&iu));
        k = end;
    }
    let f = free.first()?;
    (bounds.x1 > ux + EPS).then(|| Channel {
        orientation: Orientation::Vertical,
        rect: Rect::new(ux, f.lo, bounds.x1, f.hi),
        low,
        high: Bound::Border,
    })
}

fn vertical_channels(rects: &[Rect], bounds: &Rect) -> Vec<Channel> {
    let mut order: Vec<usize> = (0..rects.len()).collect();
    order.sort_by(|&a, &b| rects[a].x0.total_cmp(&rects[b].x0).then(a.cmp(&b)));
    let mut out = Vec::new();
    out.extend(right_channel(rects, &order, bounds, Bound::Border, bounds.x0, bounds.y_range()));
    for (u, r) in rects.iter().enumerate() {
        out.extend(right_channel(rects, &order, bounds, Bound::Box(u), r.x1, r.y_range()));
    }
    out
}

/// Vertical channels (one per box and the left border) followed by
/// horizontal ones (one per box and the bottom border).
pub fn find_channels(boxes: &[BoxShape], bounds: &Rect) -> Result<Vec<Channel>> {
    let rects: Vec<Rect> = boxes.iter().map(|b| b.rect()).collect();
    check_inside(&rects, bounds)?;
    let mut out = vertical_channels(&rects, bounds);
    let t: Vec<Rect> = rects.iter().map(|r| r.transposed()).collect();
    out.extend(vertical_channels(&t, &bounds.transposed()).into_iter().map(|c| Channel {
        orientation: Orientation::Horizontal,
        rect: c.rect.transposed(),
        ..c
    }));
    Ok(out)
}

/// Channels not dominated by another channel of the same orientation: one
/// whose rectangle overlaps theirs and whose projection contains theirs.
/// Among equal projections the earlier channel survives.
pub fn undominated(channels: &[Channel]) -> Vec<usize> {
    (0..channels.len())
        .filter(|&i| {
            let c = &channels[i];
            let pc = c.projection();
            !channels.iter().enumerate().any(|(j, d)| {
                if j == i || d.orientation != c.orientation || !c.rect.overlaps(&d.rect) {
                    return false;
                }
                let pd = d.projection();
                let contained = pd.lo <= pc.lo + EPS && pc.hi <= pd.hi + EPS;
                let equal = (pd.lo - pc.lo).abs() <= EPS && (pd.hi - pc.hi).abs() <= EPS;
                contained && (!equal || j < i)
            })
        })
        .collect()
}

/// Distance from `p` along `dir` to the first box interior or the border.
fn free_run(rects: &[Rect], bounds: &Rect, p: Point, dir: Side) -> f64 {
    let mut best = match dir {
        Side::E => bounds.x1 - p.x,
        Side::W => p.x - bounds.x0,
        Side::N => bounds.y1 - p.y,
        Side::S => p.y - bounds.y0,
    };
    for r in rects {
        let d = match dir {
            Side::E if r.y0 < p.y && p.y < r.y1 && r.x1 > p.x => r.x0 - p.x,
            Side::W if r.y0 < p.y && p.y < r.y1 && r.x0 < p.x => p.x - r.x1,
            Side::N if r.x0 < p.x && p.x < r.x1 && r.y1 > p.y => r.y0 - p.y,
            Side::S if r.x0 < p.x && p.x < r.x1 && r.y0 < p.y => p.y - r.y1,
            _ => continue,
        };
        best = best.min(d.max(0.0));
    }
    best
}

fn step(p: Point, dir: Side, d: f64) -> Point {
    let (nx, ny) = dir.normal();
    Point::new(p.x + nx * d, p.y + ny * d)
}

fn on_segment(s: &OrthoSegment, p: Point) -> bool {
    match s.orientation {
        Orientation::Horizontal => s.fixed == p.y && s.span.contains(p.x),
        Orientation::Vertical => s.fixed == p.x && s.span.contains(p.y),
    }
}

/// One representative per undominated channel, then a stub for every port
/// not already on a representative.
pub fn select_representatives(
    channels: &[Channel],
    boxes: &[BoxShape],
    bounds: &Rect,
    ports: &PortAssignment,
) -> Vec<Representative> {
    let rects: Vec<Rect> = boxes.iter().map(|b| b.rect()).collect();
    let mut reps = Vec::new();
    for ci in undominated(channels) {
        let c = &channels[ci];
        let r = &c.rect;
        let (fixed, span) = match c.orientation {
            Orientation::Vertical => {
                let mid = (r.x0 + r.x1) / 2.0;
                // Ports on the channel's bottom or top boundary, strictly inside.
                let through = ports
                    .ports
                    .iter()
                    .filter(|p| {
                        let q = p.position;
                        r.x0 < q.x
                            && q.x < r.x1
                            && ((p.side == Side::N && q.y == r.y0) || (p.side == Side::S && q.y == r.y1))
                    })
                    .min_by(|a, b| (a.position.x - mid).abs().total_cmp(&(b.position.x - mid).abs()));
                (through.map_or(mid, |p| p.position.x), r.y_range())
            }
            Orientation::Horizontal => {
                let mid = (r.y0 + r.y1) / 2.0;
                let through = ports
                    .ports
                    .iter()
                    .filter(|p| {
                        let q = p.position;
                        r.y0 < q.y
                            && q.y < r.y1
                            && ((p.side == Side::E && q.x == r.x0) || (p.side == Side::W && q.x == r.x1))
                    })
                    .min_by(|a, b| (a.position.y - mid).abs().total_cmp(&(b.position.y - mid).abs()));
                (through.map_or(mid, |p| p.position.y), r.x_range())
            }
        };
        reps.push(Representative {
            segment: OrthoSegment { orientation: c.orientation, fixed, span, owner: SegmentOwner::Dummy },
            source: RepSource::Channel(ci),
        });
    }

    let channel_reps = reps.len();
    for (pi, port) in ports.ports.iter().enumerate() {
        let p = port.position;
        if reps.iter().any(|r| on_segment(&r.segment, p)) {
            continue;
        }
        let dir = port.side;
        let limit = free_run(&rects, bounds, p, dir);
        let across = dir.exit_orientation().flip();
        let (along, sign) = match dir {
            Side::E => (p.x, 1.0),
            Side::W => (p.x, -1.0),
            Side::N => (p.y, 1.0),
            Side::S => (p.y, -1.0),
        };
        let cross_at = |p: Point| match across {
            Orientation::Vertical => p.y,
            Orientation::Horizontal => p.x,
        };
        let hit = reps[..channel_reps]
            .iter()
            .filter(|r| r.segment.orientation == across && r.segment.span.contains(cross_at(p)))
            .map(|r| ((r.segment.fixed - along) * sign, r.segment.fixed))
            .filter(|&(d, _)| d > EPS && d <= limit + EPS)
            .min_by(|a, b| a.0.total_cmp(&b.0));
        let len = hit.map_or(limit, |h| h.0);
        if len <= EPS {
            continue;
        }
        // End exactly on the representative so the crossing is found.
        let end = match (hit, dir.exit_orientation()) {
            (Some((_, f)), Orientation::Horizontal) => Point::new(f, p.y),
            (Some((_, f)), Orientation::Vertical) => Point::new(p.x, f),
            (None, _) => step(p, dir, len),
        };
        let stub = OrthoSegment::from_points(p, end, SegmentOwner::Dummy).expect("axis-aligned stub");
        reps.push(Representative { segment: stub, source: RepSource::Port(pi) });
        if hit.is_none() {
            let m = step(p, dir, len / 2.0);
            let (a, b) = match across {
                Orientation::Vertical => (Side::S, Side::N),
                Orientation::Horizontal => (Side::W, Side::E),
            };
            let lo = step(m, a, free_run(&rects, bounds, m, a));
            let hi = step(m, b, free_run(&rects, bounds, m, b));
            if let Some(seg) = OrthoSegment::from_points(lo, hi, SegmentOwner::Dummy) {
                reps.push(Representative { segment: seg, source: RepSource::Bridge(pi) });
            }
        }
    }
    reps
}

/// Partial grid graph. Neighbors are stored per direction.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct RoutingGraph {
    pub points: Vec<Point>,
    /// Neighbor in each direction, indexed by `Side::index`.
    pub adj: Vec<[Option<usize>; 4]>,
    /// Vertex of each port, indexed like `PortAssignment::ports`.
    pub port_vertices: Vec<usize>,
}

/// Unions collinear segments that overlap or touch.
pub fn merge_collinear(segments: &[OrthoSegment]) -> Vec<OrthoSegment> {
    let mut groups: BTreeMap<(bool, OrdF64), Vec<Interval>> = BTreeMap::new();
    for s in segments {
        let key = (s.orientation == Orientation::Vertical, OrdF64(s.fixed + 0.0));
        groups.entry(key).or_default().push(s.span);
    }
    let mut out = Vec::new();
    for ((vertical, fixed), mut spans) in groups {
        spans.sort_by(|a, b| a.lo.total_cmp(&b.lo));
        let mut cur: Option<Interval> = None;
        let orientation = if vertical { Orientation::Vertical } else { Orientation::Horizontal };
        for s in spans {
            match cur {
                Some(ref mut c) if s.lo <= c.hi => c.hi = c.hi.max(s.hi),
                _ => {
                    if let Some(c) = cur.take() {
                        out.push(OrthoSegment { orientation, fixed: fixed.0, span: c, owner: SegmentOwner::Dummy });
                    }
                    cur = Some(s);
                }
            }
        }
        if let Some(c) = cur {
            out.push(OrthoSegment { orientation, fixed: fixed.0, span: c, owner: SegmentOwner::Dummy });
        }
    }
    out
}

impl RoutingGraph {
    /// Graph whose vertices are the given ports and all crossings of
    /// perpendicular segments; consecutive vertices on a segment are joined.
    pub fn from_segments(segments: &[OrthoSegment], port_points: &[Point]) -> Result<Self> {
        let merged = merge_collinear(segments);
        let mut on: Vec<Vec<f64>> = vec![Vec::new(); merged.len()];
        let h_idx: Vec<usize> = (0..merged.len()).filter(|&i| merged[i].orientation == Orientation::Horizontal).collect();
        let v_idx: Vec<usize> = (0..merged.len()).filter(|&i| merged[i].orientation == Orientation::Vertical).collect();
        for &hi in &h_idx {
            let h = &merged[hi];
            for &vi in &v_idx {
                let v = &merged[vi];
                if h.span.contains(v.fixed) && v.span.contains(h.fixed) {
                    on[hi].push(v.fixed);
                    on[vi].push(h.fixed);
                }
            }
        }
        for &p in port_points {
            for (i, s) in merged.iter().enumerate() {
                if on_segment(s, p) {
                    on[i].push(match s.orientation {
                        Orientation::Horizontal => p.x,
                        Orientation::Vertical => p.y,
                    });
                }
            }
        }

        let mut g = RoutingGraph::default();
        let mut ids: BTreeMap<(OrdF64, OrdF64), usize> = BTreeMap::new();
        let mut vertex = |g: &mut RoutingGraph, p: Point| -> usize {
            *ids.entry(point_key(p)).or_insert_with(|| {
                g.points.push(p);
                g.adj.push([None; 4]);
                g.points.len() - 1
            })
        };
        for &p in port_points {
            let v = vertex(&mut g, p);
            g.port_vertices.push(v);
        }
        for (i, s) in merged.iter().enumerate() {
            let list = &mut on[i];
            list.sort_by(f64::total_cmp);
            list.dedup();
            let at = |t: f64| match s.orientation {
                Orientation::Horizontal => Point::new(t, s.fixed),
                Orientation::Vertical => Point::new(s.fixed, t),
            };
            let (fwd, back) = match s.orientation {
                Orientation::Horizontal => (Side::E, Side::W),
                Orientation::Vertical => (Side::N, Side::S),
            };
            for w in list.windows(2) {
                let a = vertex(&mut g, at(w[0]));
                let b = vertex(&mut g, at(w[1]));
                g.adj[a][fwd.index()] = Some(b);
                g.adj[b][back.index()] = Some(a);
            }
        }
        for (pi, &v) in g.port_vertices.iter().enumerate() {
            if g.degree(v) == 0 {
                let p = g.points[v];
                return Err(Error::ConstructionFailure(format!(
                    "port {pi} at ({}, {}) has no routing graph edge",
                    p.x, p.y
                )));
            }
        }
        Ok(g)
    }

    pub fn vertex_count(&self) -> usize {
        self.points.len()
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adj[v].iter().flatten().count()
    }

    pub fn neighbor(&self, v: usize, dir: Side) -> Option<usize> {
        self.adj[v][dir.index()]
    }

    /// Each undirected edge once, as `(a, b)` with `b` east or north of `a`.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.adj.iter().enumerate().flat_map(|(a, n)| {
            [n[Side::E.index()], n[Side::N.index()]].into_iter().flatten().map(move |b| (a, b))
        })
    }

    /// Number of edges.
    pub fn edge_count(&self) -> usize {
        self.edges().count()
    }

    /// Vertices reachable from `v`.
    pub fn reachable(&self, v: usize) -> Vec<bool> {
        let mut seen = vec![false; self.points.len()];
        let mut stack = vec![v];
        seen[v] = true;
        while let Some(u) = stack.pop() {
            for w in self.adj[u].iter().flatten() {
                if !seen[*w] {
                    seen[*w] = true;
                    stack.push(*w);
                }
            }
        }
        seen
    }
}

/// Representatives plus port vertices as a routing graph.
pub fn build_routing_graph(reps: &[Representative], ports: &PortAssignment) -> Result<RoutingGraph> {
    let segments: Vec<OrthoSegment> = reps.iter().map(|r| r.segment).collect();
    let points: Vec<Point> = ports.ports.iter().map(|p| p.position).collect();
    RoutingGraph::from_segments(&segments, &points)
}
