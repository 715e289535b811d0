//! Port assignment: where each edge attaches to its boxes.
//!
//! Sides come from where the center-to-center segment leaves each box. If
//! it leaves through the outer quarter of a side, one endpoint moves to the
//! neighboring side so the edge can be an L instead of a Z. Ports on a side
//! follow the circular order of the neighbors and are spread evenly.

use alloc::format;
use alloc::vec::Vec;
use core::f64::consts::PI;

use crate::error::{invalid, Result};
use crate::geom::{BoxShape, Point, Rect, Side};
use crate::graph::Multigraph;
use crate::math;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Port {
    /// Edge index.
    pub edge: usize,
    /// 0 for the source end, 1 for the target end.
    pub end: u8,
    pub vertex: usize,
    pub side: Side,
    pub position: Point,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PortAssignment {
    /// Indexed by `2 * edge + end`.
    pub ports: Vec<Port>,
    /// Per vertex and side (`Side::index`), port indices in counterclockwise
    /// order around the box.
    pub sides: Vec<[Vec<usize>; 4]>,
}

pub fn port_index(edge: usize, end: u8) -> usize {
    2 * edge + end as usize
}

impl PortAssignment {
    pub fn port(&self, edge: usize, end: u8) -> &Port {
        &self.ports[port_index(edge, end)]
    }

    /// Ports given explicitly as `(source point, target point)` per edge.
    /// Each point must lie on the boundary of its box.
    pub fn from_positions(graph: &Multigraph, boxes: &[BoxShape], points: &[(Point, Point)]) -> Result<Self> {
        check_boxes(graph, boxes)?;
        if points.len() != graph.m() {
            return Err(invalid("one port pair per edge required"));
        }
        let mut ports = Vec::with_capacity(2 * graph.m());
        for (ei, e) in graph.edges().iter().enumerate() {
            for (end, (v, p)) in [(e.source, points[ei].0), (e.target, points[ei].1)].into_iter().enumerate() {
                let side = side_of_boundary_point(&boxes[v].rect(), p).ok_or_else(|| {
                    invalid(format!("port of edge {} at ({}, {}) is not on its box boundary", e.id, p.x, p.y))
                })?;
                ports.push(Port { edge: ei, end: end as u8, vertex: v, side, position: p });
            }
        }
        let mut sides: Vec<[Vec<usize>; 4]> = (0..graph.n()).map(|_| Default::default()).collect();
        for (i, p) in ports.iter().enumerate() {
            sides[p.vertex][p.side.index()].push(i);
        }
        for (v, per_side) in sides.iter_mut().enumerate() {
            let r = boxes[v].rect();
            for (s, list) in Side::ALL.iter().zip(per_side.iter_mut()) {
                list.sort_by(|&a, &b| ccw_offset(&r, *s, ports[a].position).total_cmp(&ccw_offset(&r, *s, ports[b].position)));
            }
        }
        Ok(Self { ports, sides })
    }
}

/// Distance along `side` in counterclockwise direction from its start corner.
fn ccw_offset(r: &Rect, side: Side, p: Point) -> f64 {
    match side {
        Side::E => p.y - r.y0,
        Side::N => r.x1 - p.x,
        Side::W => r.y1 - p.y,
        Side::S => p.x - r.x0,
    }
}

fn side_length(r: &Rect, side: Side) -> f64 {
    match side {
        Side::E | Side::W => r.height(),
        Side::N | Side::S => r.width(),
    }
}

fn point_at(r: &Rect, side: Side, offset: f64) -> Point {
    match side {
        Side::E => Point::new(r.x1, r.y0 + offset),
        Side::N => Point::new(r.x1 - offset, r.y1),
        Side::W => Point::new(r.x0, r.y1 - offset),
        Side::S => Point::new(r.x0 + offset, r.y0),
    }
}

pub fn side_of_boundary_point(r: &Rect, p: Point) -> Option<Side> {
    let tol = 1e-6 * (1.0 + r.width().max(r.height()));
    let in_x = p.x >= r.x0 - tol && p.x <= r.x1 + tol;
    let in_y = p.y >= r.y0 - tol && p.y <= r.y1 + tol;
    if in_x && (p.y - r.y1).abs() <= tol {
        Some(Side::N)
    } else if in_y && (p.x - r.x1).abs() <= tol {
        Some(Side::E)
    } else if in_x && (p.y - r.y0).abs() <= tol {
        Some(Side::S)
    } else if in_y && (p.x - r.x0).abs() <= tol {
        Some(Side::W)
    } else {
        None
    }
}

fn check_boxes(graph: &Multigraph, boxes: &[BoxShape]) -> Result<()> {
    if boxes.len() != graph.n() {
        return Err(invalid("one box per vertex required"));
    }
    for i in 0..boxes.len() {
        for j in i + 1..boxes.len() {
            if boxes[i].rect().overlaps(&boxes[j].rect()) {
                return Err(invalid(format!(
                    "boxes of vertices {} and {} overlap",
                    graph.vertices()[i].id,
                    graph.vertices()[j].id
                )));
            }
        }
    }
    Ok(())
}

/// Where the ray from the box center towards `target` leaves the box:
/// the side, and the crossing's fraction along that side (measured from
/// the bottom for `E`/`W`, from the left for `N`/`S`).
pub fn exit_crossing(b: &BoxShape, target: Point) -> (Side, f64) {
    let dx = target.x - b.center.x;
    let dy = target.y - b.center.y;
    let hw = b.width / 2.0;
    let hh = b.height / 2.0;
    let tx = if dx != 0.0 { hw / dx.abs() } else { f64::INFINITY };
    let ty = if dy != 0.0 { hh / dy.abs() } else { f64::INFINITY };
    if tx <= ty {
        let off = dy * tx;
        let side = if dx > 0.0 { Side::E } else { Side::W };
        (side, (off + hh) / (2.0 * hh))
    } else {
        let off = dx * ty;
        let side = if dy > 0.0 { Side::N } else { Side::S };
        (side, (off + hw) / (2.0 * hw))
    }
}

fn in_outer_quarter(f: f64) -> bool {
    f < 0.25 || f > 0.75
}

/// Neighbor of `side` closer to the crossing at fraction `f`.
fn nearer_adjacent(side: Side, f: f64) -> Side {
    match side {
        Side::E | Side::W => {
            if f > 0.5 {
                Side::N
            } else {
                Side::S
            }
        }
        Side::N | Side::S => {
            if f > 0.5 {
                Side::E
            } else {
                Side::W
            }
        }
    }
}

fn mid_angle(side: Side) -> f64 {
    match side {
        Side::E => 0.0,
        Side::N => PI / 2.0,
        Side::W => PI,
        Side::S => -PI / 2.0,
    }
}

fn wrap(a: f64) -> f64 {
    let mut a = a;
    while a <= -PI {
        a += 2.0 * PI;
    }
    while a > PI {
        a -= 2.0 * PI;
    }
    a
}

/// Sides chosen for the two ends of a non-loop edge `(u, v)`, with the
/// quarter rule applied. The second value tells which end (0 = u) was
/// reassigned, if any.
pub fn edge_sides(bu: &BoxShape, bv: &BoxShape, u: usize, v: usize) -> ((Side, Side), Option<u8>) {
    let (su, fu) = exit_crossing(bu, bv.center);
    let (sv, fv) = exit_crossing(bv, bu.center);
    if !in_outer_quarter(fu) && !in_outer_quarter(fv) {
        return ((su, sv), None);
    }
    let eu = (fu - 0.5).abs();
    let ev = (fv - 0.5).abs();
    let pick_u = if eu != ev { eu > ev } else { u <= v };
    if pick_u {
        ((nearer_adjacent(su, fu), sv), Some(0))
    } else {
        ((su, nearer_adjacent(sv, fv)), Some(1))
    }
}

pub fn assign_ports(graph: &Multigraph, boxes: &[BoxShape]) -> Result<PortAssignment> {
    check_boxes(graph, boxes)?;
    let n = graph.n();
    let mut ports: Vec<Port> = Vec::with_capacity(2 * graph.m());
    for (ei, e) in graph.edges().iter().enumerate() {
        let (ss, st) = if e.is_loop() {
            (Side::N, Side::N)
        } else {
            edge_sides(&boxes[e.source], &boxes[e.target], e.source, e.target).0
        };
        ports.push(Port { edge: ei, end: 0, vertex: e.source, side: ss, position: Point::default() });
        ports.push(Port { edge: ei, end: 1, vertex: e.target, side: st, position: Point::default() });
    }

    // Order non-loop ports per side by the direction to the other endpoint.
    let mut sides: Vec<[Vec<usize>; 4]> = (0..n).map(|_| Default::default()).collect();
    struct Key {
        angle: f64,
        tie: i64,
        port: usize,
    }
    let mut keyed: Vec<[Vec<Key>; 4]> = (0..n).map(|_| Default::default()).collect();
    for (pi, p) in ports.iter().enumerate() {
        let e = graph.edges()[p.edge];
        if e.is_loop() {
            continue;
        }
        let other = e.other(p.vertex);
        let c = boxes[p.vertex].center;
        let o = boxes[other].center;
        let angle = wrap(math::atan2(o.y - c.y, o.x - c.x) - mid_angle(p.side));
        // Parallel edges: ascending id at the smaller endpoint, descending
        // at the larger, so parallel straight routes do not cross.
        let id = e.id as i64;
        let tie = if p.vertex < other { id } else { -id };
        keyed[p.vertex][p.side.index()].push(Key { angle, tie, port: pi });
    }
    for (v, per_side) in keyed.iter_mut().enumerate() {
        for (s, list) in per_side.iter_mut().enumerate() {
            list.sort_by(|a, b| a.angle.total_cmp(&b.angle).then(a.tie.cmp(&b.tie)));
            sides[v][s] = list.iter().map(|k| k.port).collect();
        }
    }

    // Self-loops take two neighboring ports on the least populated side.
    for (ei, e) in graph.edges().iter().enumerate() {
        if !e.is_loop() {
            continue;
        }
        let v = e.source;
        let side = *Side::ALL
            .iter()
            .min_by_key(|s| (sides[v][s.index()].len(), s.index()))
            .expect("four sides");
        for end in 0..2u8 {
            let pi = port_index(ei, end);
            ports[pi].side = side;
            sides[v][side.index()].push(pi);
        }
    }

    // Even spacing: k-th of p ports at k/(p+1) along the side.
    for (v, per_side) in sides.iter().enumerate() {
        let r = boxes[v].rect();
        for (s, list) in Side::ALL.iter().zip(per_side.iter()) {
            let len = side_length(&r, *s);
            let p = list.len() as f64;
            for (k, &pi) in list.iter().enumerate() {
                ports[pi].position = point_at(&r, *s, len * (k as f64 + 1.0) / (p + 1.0));
            }
        }
    }
    Ok(PortAssignment { ports, sides })
}

/// Whether `p` lies on side `side` of `r` within tolerance.
pub fn on_side(r: &Rect, side: Side, p: Point) -> bool {
    let tol = 1e-6 * (1.0 + r.width().max(r.height()));
    match side {
        Side::N => (p.y - r.y1).abs() <= tol && p.x >= r.x0 - tol && p.x <= r.x1 + tol,
        Side::S => (p.y - r.y0).abs() <= tol && p.x >= r.x0 - tol && p.x <= r.x1 + tol,
        Side::E => (p.x - r.x1).abs() <= tol && p.y >= r.y0 - tol && p.y <= r.y1 + tol,
        Side::W => (p.x - r.x0).abs() <= tol && p.y >= r.y0 - tol && p.y <= r.y1 + tol,
    }
}
