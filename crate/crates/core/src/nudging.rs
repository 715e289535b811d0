//! Final coordinates for route segments and box sides.
//!
//! A horizontal pass moves vertical objects (vertical route segments and the
//! left/right sides of boxes) along x; a vertical pass is a horizontal pass
//! on the transposed drawing. Each pass orders the objects, connects
//! neighbours whose extents overlap by separation constraints and solves a
//! linear program.
//!
//! In constrained mode box sides and segments attached to ports stay put,
//! and the free segments spread out as evenly as possible. In full mode every
//! object moves, every separation is at least `delta_min`, and boxes may
//! grow beyond their original size.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::vec;
use alloc::vec::Vec;
use core::cmp::Ordering;

use crate::drawing::{exit_side, Drawing, DrawnEdge};
use crate::error::{invalid, Error, Result};
use crate::geom::{Interval, OrdF64, Point, Side, EPS};
use crate::lp::{Cmp, LinearProgram, LpOutcome, LpSolution, LpSolver};
use crate::ordering::BundleOrder;
use crate::routing::corners_of;
use crate::routing_graph::RoutingGraph;

/// Absolute tolerance for checking separation constraints after solving.
pub const CHECK_TOLERANCE: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NudgeMode {
    Constrained,
    Full,
}

/// Direction in which a pass moves objects.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Axis {
    /// Moves vertical objects along x.
    Horizontal,
    /// Moves horizontal objects along y.
    Vertical,
}

#[derive(Debug, Clone, PartialEq)]
pub struct NudgeConfig {
    pub mode: NudgeMode,
    pub delta_min: f64,
    pub schedule: Vec<Axis>,
    /// Let consecutive parallel segments of one route meet, removing bends.
    pub collapse_bends: bool,
}

impl Default for NudgeConfig {
    fn default() -> Self {
        Self {
            mode: NudgeMode::Full,
            delta_min: 12.0,
            schedule: vec![Axis::Horizontal, Axis::Vertical, Axis::Horizontal],
            collapse_bends: false,
        }
    }
}

/// Route order on shared lines of the routing graph, used to order
/// co-located segments.
///
/// Keys are `(vertical, fixed coordinate)`. Every entry lists routes in
/// ascending order of the perpendicular coordinate (left to right on
/// vertical lines, bottom to top on horizontal ones).
#[derive(Debug, Clone, PartialEq, Default)]
pub struct TieOrder {
    lines: BTreeMap<(bool, OrdF64), Vec<(Interval, Vec<usize>)>>,
}

impl TieOrder {
    pub fn from_bundles(h: &RoutingGraph, order: &BundleOrder) -> Self {
        let mut lines: BTreeMap<(bool, OrdF64), Vec<(Interval, Vec<usize>)>> = BTreeMap::new();
        for (&(a, b), routes) in &order.bundles {
            let (pa, pb) = (h.points[a], h.points[b]);
            if pa.x == pb.x {
                lines.entry((true, OrdF64(pa.x + 0.0))).or_default().push((Interval::new(pa.y, pb.y), routes.clone()));
            } else {
                let mut r = routes.clone();
                r.reverse();
                lines.entry((false, OrdF64(pa.y + 0.0))).or_default().push((Interval::new(pa.x, pb.x), r));
            }
        }
        Self { lines }
    }

    pub fn transposed(&self) -> Self {
        Self { lines: self.lines.iter().map(|(&(v, c), e)| ((!v, c), e.clone())).collect() }
    }

    /// Order of routes `p` and `q` on the vertical line `x`, taken from the
    /// shared piece of that line closest to `near`.
    pub fn vertical_order(&self, x: f64, p: usize, q: usize, near: Interval) -> Option<Ordering> {
        let entries = self.lines.get(&(true, OrdF64(x + 0.0)))?;
        let mut best: Option<(f64, Ordering)> = None;
        for (span, routes) in entries {
            let rp = routes.iter().position(|&r| r == p);
            let rq = routes.iter().position(|&r| r == q);
            if let (Some(rp), Some(rq)) = (rp, rq) {
                let gap = (span.lo - near.hi).max(near.lo - span.hi).max(0.0);
                if best.is_none_or(|(g, _)| gap < g) {
                    best = Some((gap, rp.cmp(&rq)));
                }
            }
        }
        best.map(|(_, o)| o)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum ObjectKind {
    /// Segment `points[index]..points[index + 1]` of an edge.
    Segment { edge: usize, index: usize },
    BoxLeft(usize),
    BoxRight(usize),
    Alpha,
    Omega,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NudgeObject {
    pub kind: ObjectKind,
    pub coord: f64,
    /// Perpendicular extent used for the overlap test (possibly padded).
    pub extent: Interval,
    /// Perpendicular extent as drawn.
    pub span: Interval,
    /// Box sides and segments attached to ports.
    pub pinned: bool,
}

impl NudgeObject {
    pub fn is_dummy(&self) -> bool {
        matches!(self.kind, ObjectKind::Alpha | ObjectKind::Omega)
    }

    /// Splits components in the shared-distance graph.
    pub fn is_barrier(&self) -> bool {
        self.pinned || self.is_dummy()
    }

    fn edge(&self) -> Option<usize> {
        match self.kind {
            ObjectKind::Segment { edge, .. } => Some(edge),
            _ => None,
        }
    }
}

/// Objects of one pass in their left-to-right order.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct OrderChi {
    pub objects: Vec<NudgeObject>,
}

fn is_vertical(a: Point, b: Point) -> bool {
    a.x == b.x && a.y != b.y
}

/// Direction (-1 west, +1 east) in which the route continues at the end of
/// vertical segment `index` lying at height `y`; `None` at ports.
fn attached_direction(e: &DrawnEdge, index: usize, y: f64) -> Option<i8> {
    let pts = &e.points;
    let (k, nb) = if pts[index].y == y {
        (index, index.checked_sub(1)?)
    } else if pts[index + 1].y == y {
        (index + 1, index + 2)
    } else {
        return None;
    };
    let q = *pts.get(nb)?;
    let dx = q.x - pts[k].x;
    (dx != 0.0).then_some(if dx < 0.0 { -1 } else { 1 })
}

/// Whether segment `a` goes left of the equal-coordinate segment `b`.
fn segment_tie(d: &Drawing, tie: &TieOrder, a: &NudgeObject, b: &NudgeObject) -> Option<Ordering> {
    let (ObjectKind::Segment { edge: ea, index: ia }, ObjectKind::Segment { edge: eb, index: ib }) = (a.kind, b.kind) else {
        return None;
    };
    if ea == eb {
        return None;
    }
    let common = a.span.intersect(&b.span)?;
    if common.len() > 0.0 {
        if let Some(o) = tie.vertical_order(a.coord, ea, eb, common) {
            return Some(o);
        }
    }
    let da = attached_direction(&d.edges[ea], ia, common.lo);
    let db = attached_direction(&d.edges[eb], ib, common.lo);
    match (da, db) {
        (Some(x), Some(y)) if x != y => Some(x.cmp(&y)),
        _ => {
            let da = attached_direction(&d.edges[ea], ia, common.hi);
            let db = attached_direction(&d.edges[eb], ib, common.hi);
            match (da, db) {
                (Some(x), Some(y)) if x != y => Some(x.cmp(&y)),
                _ => None,
            }
        }
    }
}

/// Orders equal-coordinate segments: pairwise tie rules where they apply,
/// otherwise by `(edge, index)`.
fn order_segment_group(d: &Drawing, tie: &TieOrder, group: &mut [NudgeObject]) {
    let n = group.len();
    if n < 2 {
        return;
    }
    group.sort_by_key(|o| o.kind);
    let mut succ: Vec<Vec<usize>> = vec![Vec::new(); n];
    let mut indeg = vec![0usize; n];
    for i in 0..n {
        for j in i + 1..n {
            match segment_tie(d, tie, &group[i], &group[j]) {
                Some(Ordering::Less) => {
                    succ[i].push(j);
                    indeg[j] += 1;
                }
                Some(Ordering::Greater) => {
                    succ[j].push(i);
                    indeg[i] += 1;
                }
                _ => {}
            }
        }
    }
    let mut ready: BTreeSet<usize> = (0..n).filter(|&i| indeg[i] == 0).collect();
    let mut placed = vec![false; n];
    let mut out = Vec::with_capacity(n);
    while out.len() < n {
        let i = match ready.pop_first() {
            Some(i) => i,
            // Contradictory rules: release the first remaining segment.
            None => (0..n).find(|&i| !placed[i]).expect("unplaced segment"),
        };
        if placed[i] {
            continue;
        }
        placed[i] = true;
        out.push(group[i]);
        for &j in &succ[i] {
            indeg[j] = indeg[j].saturating_sub(1);
            if indeg[j] == 0 && !placed[j] {
                ready.insert(j);
            }
        }
    }
    group.copy_from_slice(&out);
}

/// Builds the left-to-right order of all vertical objects of `d`.
///
/// Extents are widened by `pad` on both ends. Dummy bars sit `margin` left
/// and right of everything.
pub fn build_order_chi(d: &Drawing, tie: &TieOrder, pad: f64, margin: f64) -> Result<OrderChi> {
    for i in 0..d.boxes.len() {
        for j in i + 1..d.boxes.len() {
            if d.boxes[i].rect().overlaps(&d.boxes[j].rect()) {
                return Err(invalid(format!("boxes {i} and {j} overlap")));
            }
        }
    }
    let bounds = d.bounds().ok_or_else(|| invalid("empty drawing"))?;
    let mut objs = Vec::new();
    for (i, b) in d.boxes.iter().enumerate() {
        let r = b.rect();
        let span = r.y_range();
        objs.push(NudgeObject { kind: ObjectKind::BoxLeft(i), coord: r.x0, extent: span.inflate(pad), span, pinned: true });
        objs.push(NudgeObject { kind: ObjectKind::BoxRight(i), coord: r.x1, extent: span.inflate(pad), span, pinned: true });
    }
    for (ei, e) in d.edges.iter().enumerate() {
        let last = e.points.len().saturating_sub(2);
        for (i, w) in e.points.windows(2).enumerate() {
            if is_vertical(w[0], w[1]) {
                let span = Interval::new(w[0].y, w[1].y);
                objs.push(NudgeObject {
                    kind: ObjectKind::Segment { edge: ei, index: i },
                    coord: w[0].x,
                    extent: span.inflate(pad),
                    span,
                    pinned: i == 0 || i == last,
                });
            }
        }
    }
    objs.sort_by(|a, b| a.coord.total_cmp(&b.coord).then(a.kind.cmp(&b.kind)));

    let full = bounds.y_range().inflate(pad + margin.max(1.0));
    let mut chi = Vec::with_capacity(objs.len() + 2);
    chi.push(NudgeObject { kind: ObjectKind::Alpha, coord: bounds.x0 - margin, extent: full, span: full, pinned: false });
    let mut start = 0;
    while start < objs.len() {
        let mut end = start + 1;
        while end < objs.len() && objs[end].coord - objs[end - 1].coord <= EPS {
            end += 1;
        }
        let group = &objs[start..end];
        let rank = |o: &NudgeObject| match o.kind {
            ObjectKind::BoxRight(_) => 0,
            ObjectKind::BoxLeft(_) => 2,
            _ => 1,
        };
        chi.extend(group.iter().filter(|o| rank(o) == 0).copied());
        let mut segs: Vec<NudgeObject> = group.iter().filter(|o| rank(o) == 1).copied().collect();
        order_segment_group(d, tie, &mut segs);
        chi.extend(segs);
        chi.extend(group.iter().filter(|o| rank(o) == 2).copied());
        start = end;
    }
    chi.push(NudgeObject { kind: ObjectKind::Omega, coord: bounds.x1 + margin, extent: full, span: full, pinned: false });
    Ok(OrderChi { objects: chi })
}

/// Arcs `u → v` (positions in `chi`, `u < v`) between objects whose extents
/// share a point not covered by any object ordered between them.
///
/// Sweeps the extents bottom to top. At each event height, new objects are
/// inserted first and linked to their neighbours; then the finished objects
/// are removed together and the neighbours they separated are linked.
pub fn build_constraint_graph(chi: &OrderChi) -> Vec<(usize, usize)> {
    let mut events: Vec<(f64, bool, usize)> = Vec::with_capacity(2 * chi.objects.len());
    for (i, o) in chi.objects.iter().enumerate() {
        events.push((o.extent.lo, false, i));
        events.push((o.extent.hi, true, i));
    }
    events.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)).then(a.2.cmp(&b.2)));
    let mut active: BTreeSet<usize> = BTreeSet::new();
    let mut arcs: BTreeSet<(usize, usize)> = BTreeSet::new();
    let mut k = 0;
    while k < events.len() {
        let y = events[k].0;
        let mut end = k;
        while end < events.len() && events[end].0 == y {
            end += 1;
        }
        let batch = &events[k..end];
        for &(_, _, i) in batch.iter().filter(|e| !e.1) {
            active.insert(i);
        }
        for &(_, _, i) in batch.iter().filter(|e| !e.1) {
            if let Some(&p) = active.range(..i).next_back() {
                arcs.insert((p, i));
            }
            if let Some(&s) = active.range(i + 1..).next() {
                arcs.insert((i, s));
            }
        }
        for &(_, _, i) in batch.iter().filter(|e| e.1) {
            active.remove(&i);
        }
        for &(_, _, i) in batch.iter().filter(|e| e.1) {
            if let (Some(&p), Some(&s)) = (active.range(..i).next_back(), active.range(i + 1..).next()) {
                arcs.insert((p, s));
            }
        }
        k = end;
    }
    arcs.into_iter().collect()
}

/// Right-hand side of a separation constraint `x[to] - x[from] >= gap`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Gap {
    /// The distance variable of a component.
    Shared(usize),
    Constant(f64),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Separation {
    pub from: usize,
    pub to: usize,
    pub gap: Gap,
}

/// Separation constraints of one pass, with positions into `chi`.
#[derive(Debug, Clone, PartialEq)]
pub struct ConstraintProblem {
    pub chi: OrderChi,
    pub mode: NudgeMode,
    pub delta_min: f64,
    /// Arcs left after removing transitive ones.
    pub arcs: Vec<(usize, usize)>,
    pub separations: Vec<Separation>,
    pub components: usize,
    /// End objects `(left, right)` of every perpendicular segment; their
    /// order must not flip.
    pub perpendicular: Vec<(usize, usize)>,
    /// `(left side, right side, original width)` per box.
    pub widths: Vec<(usize, usize, f64)>,
}

/// Splits arcs into `(kept, transitive)`: `u → w` is transitive when some
/// `v` has arcs `u → v` and `v → w`.
pub fn remove_transitive(arcs: &[(usize, usize)]) -> (Vec<(usize, usize)>, Vec<(usize, usize)>) {
    let mut out: BTreeMap<usize, BTreeSet<usize>> = BTreeMap::new();
    let mut inc: BTreeMap<usize, BTreeSet<usize>> = BTreeMap::new();
    for &(u, v) in arcs {
        out.entry(u).or_default().insert(v);
        inc.entry(v).or_default().insert(u);
    }
    let empty = BTreeSet::new();
    let (mut kept, mut removed) = (Vec::new(), Vec::new());
    for &(u, w) in arcs {
        let a = out.get(&u).unwrap_or(&empty);
        let b = inc.get(&w).unwrap_or(&empty);
        let (small, large) = if a.len() <= b.len() { (a, b) } else { (b, a) };
        if small.iter().any(|v| large.contains(v)) {
            removed.push((u, w));
        } else {
            kept.push((u, w));
        }
    }
    (kept, removed)
}

fn find(parent: &mut [usize], mut x: usize) -> usize {
    while parent[x] != x {
        parent[x] = parent[parent[x]];
        x = parent[x];
    }
    x
}

fn same_box(a: &NudgeObject, b: &NudgeObject) -> bool {
    matches!((a.kind, b.kind), (ObjectKind::BoxLeft(i), ObjectKind::BoxRight(j)) if i == j)
}

/// Same route, and the two segments may meet without the route folding.
fn collapsible(a: &NudgeObject, b: &NudgeObject) -> bool {
    a.edge().is_some() && a.edge() == b.edge() && !a.span.overlaps_open(&b.span)
}

/// Turns the arcs of a constraint graph into separation constraints.
///
/// Transitive arcs go first. Arcs whose ends are both barriers need no
/// distance variable; every other arc joins the component of its movable
/// ends and uses that component's shared distance.
pub fn simplify_constraints(
    chi: OrderChi,
    arcs: &[(usize, usize)],
    mode: NudgeMode,
    delta_min: f64,
    collapse_bends: bool,
) -> Result<ConstraintProblem> {
    if let Some(&(u, v)) = arcs.iter().find(|&&(u, v)| u >= v) {
        return Err(Error::Internal(format!("constraint arc {u} -> {v} runs against the object order")));
    }
    let (kept, transitive) = remove_transitive(arcs);
    let objs = &chi.objects;
    let mut parent: Vec<usize> = (0..objs.len()).collect();
    let special = |u: usize, v: usize| same_box(&objs[u], &objs[v]) || (collapse_bends && collapsible(&objs[u], &objs[v]));
    for &(u, v) in &kept {
        if !special(u, v) && !objs[u].is_barrier() && !objs[v].is_barrier() {
            let (a, b) = (find(&mut parent, u), find(&mut parent, v));
            parent[a.max(b)] = a.min(b);
        }
    }
    let mut component_of: BTreeMap<usize, usize> = BTreeMap::new();
    let mut separations = Vec::new();
    let constant = match mode {
        NudgeMode::Constrained => 0.0,
        NudgeMode::Full => delta_min,
    };
    for &(u, v) in &kept {
        let (a, b) = (&objs[u], &objs[v]);
        if same_box(a, b) {
            continue;
        }
        let gap = if collapse_bends && collapsible(a, b) {
            Gap::Constant(0.0)
        } else if a.is_barrier() && b.is_barrier() {
            if mode == NudgeMode::Constrained && !a.is_dummy() && !b.is_dummy() {
                continue;
            }
            Gap::Constant(constant)
        } else {
            let root = find(&mut parent, if a.is_barrier() { v } else { u });
            let next = component_of.len();
            Gap::Shared(*component_of.entry(root).or_insert(next))
        };
        separations.push(Separation { from: u, to: v, gap });
    }
    if mode == NudgeMode::Full {
        for &(u, v) in &transitive {
            let (a, b) = (&objs[u], &objs[v]);
            if same_box(a, b) {
                continue;
            }
            let gap = if collapse_bends && collapsible(a, b) { 0.0 } else { delta_min };
            separations.push(Separation { from: u, to: v, gap: Gap::Constant(gap) });
        }
    }
    Ok(ConstraintProblem {
        chi,
        mode,
        delta_min,
        arcs: kept,
        separations,
        components: component_of.len(),
        perpendicular: Vec::new(),
        widths: Vec::new(),
    })
}

fn horizontal_end(d: &Drawing, e: &DrawnEdge, k: usize) -> Result<ObjectKind> {
    let n = e.points.len();
    let (b, side) = if k == 0 {
        (e.source, exit_side(&d.boxes[e.source], e.points[0], e.points[1]))
    } else {
        (e.target, exit_side(&d.boxes[e.target], e.points[n - 1], e.points[n - 2]))
    };
    match side {
        Some(Side::E) => Ok(ObjectKind::BoxRight(b)),
        Some(Side::W) => Ok(ObjectKind::BoxLeft(b)),
        _ => Err(invalid(format!("edge {} does not leave its box through a side", e.id))),
    }
}

/// Object that fixes the x-coordinate of point `k` of a route.
fn anchor(d: &Drawing, ei: usize, k: usize) -> Result<ObjectKind> {
    let e = &d.edges[ei];
    let p = &e.points;
    if k >= 1 && is_vertical(p[k - 1], p[k]) {
        Ok(ObjectKind::Segment { edge: ei, index: k - 1 })
    } else if k + 1 < p.len() && is_vertical(p[k], p[k + 1]) {
        Ok(ObjectKind::Segment { edge: ei, index: k })
    } else if k == 0 || k + 1 == p.len() {
        horizontal_end(d, e, k)
    } else {
        Err(invalid(format!("edge {} has consecutive horizontal segments", e.id)))
    }
}

/// Objects, constraint graph and separation constraints of a horizontal
/// pass over `d`.
pub fn build_problem(d: &Drawing, tie: &TieOrder, cfg: &NudgeConfig) -> Result<ConstraintProblem> {
    let pad = match cfg.mode {
        NudgeMode::Constrained => 0.0,
        NudgeMode::Full => cfg.delta_min / 2.0,
    };
    let chi = build_order_chi(d, tie, pad, cfg.delta_min)?;
    let arcs = build_constraint_graph(&chi);
    let mut problem = simplify_constraints(chi, &arcs, cfg.mode, cfg.delta_min, cfg.collapse_bends)?;
    let pos: BTreeMap<ObjectKind, usize> = problem.chi.objects.iter().enumerate().map(|(i, o)| (o.kind, i)).collect();
    for (ei, e) in d.edges.iter().enumerate() {
        for (i, w) in e.points.windows(2).enumerate() {
            if w[0].y == w[1].y && w[0].x != w[1].x {
                let a = pos[&anchor(d, ei, i)?];
                let b = pos[&anchor(d, ei, i + 1)?];
                problem.perpendicular.push(if w[0].x < w[1].x { (a, b) } else { (b, a) });
            }
        }
    }
    for (bi, b) in d.boxes.iter().enumerate() {
        problem.widths.push((pos[&ObjectKind::BoxLeft(bi)], pos[&ObjectKind::BoxRight(bi)], b.original_width));
    }
    Ok(problem)
}

/// The linear program of a pass: one variable per object of `chi` (same
/// positions) followed by one distance variable per component.
pub fn build_lp(problem: &ConstraintProblem) -> (LinearProgram, Vec<usize>) {
    let objs = &problem.chi.objects;
    let full = problem.mode == NudgeMode::Full;
    let mut lp = LinearProgram::new();
    for o in objs {
        let v = lp.add_var(f64::NEG_INFINITY, f64::INFINITY, 0.0);
        let fixed = if full { o.kind == ObjectKind::Alpha } else { o.pinned };
        if fixed {
            lp.fix(v, o.coord);
        }
    }
    let lower = if full { problem.delta_min } else { 0.0 };
    let deltas: Vec<usize> = (0..problem.components).map(|_| lp.add_var(lower, f64::INFINITY, -1.0)).collect();
    for s in &problem.separations {
        match s.gap {
            Gap::Shared(k) => lp.add_difference_var(s.from, s.to, deltas[k]),
            Gap::Constant(c) => lp.add_difference(s.from, s.to, c),
        }
    }
    for &(l, r) in &problem.perpendicular {
        lp.add_difference(l, r, 0.0);
    }
    let (alpha, omega) = (0, objs.len() - 1);
    if full {
        let k = 2.0 * (problem.components + problem.perpendicular.len()) as f64;
        lp.add_cost(omega, k);
        for &(l, r, w) in &problem.widths {
            lp.add_difference(l, r, w);
            lp.add_cost(r, k);
            lp.add_cost(l, -k);
        }
        for &(l, r) in &problem.perpendicular {
            lp.add_cost(r, 2.0);
            lp.add_cost(l, -2.0);
        }
    } else {
        let w = problem.components.max(1) as f64;
        lp.add_cost(omega, w);
        lp.add_cost(alpha, -w);
    }
    (lp, deltas)
}

/// Solution of a pass's linear program.
#[derive(Debug, Clone, PartialEq)]
pub struct Nudged {
    pub lp: LinearProgram,
    pub solution: LpSolution,
    /// Variables holding the components' distances.
    pub delta_vars: Vec<usize>,
}

impl Nudged {
    /// New coordinate of the object at position `i` of `chi`.
    pub fn coord(&self, i: usize) -> f64 {
        self.solution.values[i]
    }

    pub fn delta(&self, k: usize) -> f64 {
        self.solution.values[self.delta_vars[k]]
    }
}

/// Solves the linear program of `problem`.
pub fn nudge(problem: &ConstraintProblem, solver: &dyn LpSolver) -> Result<Nudged> {
    let (lp, delta_vars) = build_lp(problem);
    let mut solution = match solver.solve(&lp) {
        LpOutcome::Optimal(s) => s,
        LpOutcome::Infeasible => return Err(Error::Internal("nudging program is infeasible".into())),
        LpOutcome::Unbounded => return Err(Error::Internal("nudging program is unbounded".into())),
    };
    for j in 0..lp.num_vars() {
        if lp.lower[j] == lp.upper[j] {
            solution.values[j] = lp.lower[j];
        }
    }
    let violation = lp.max_violation(&solution.values);
    if violation > CHECK_TOLERANCE {
        return Err(Error::Internal(format!("nudging solution violates a constraint by {violation}")));
    }
    Ok(Nudged { lp, solution, delta_vars })
}

/// How much the sum of the component distances can still grow without
/// making the objective worse. Zero (up to solver tolerance) at an optimum.
pub fn optimality_gap(n: &Nudged, solver: &dyn LpSolver) -> Result<f64> {
    let mut lp = n.lp.clone();
    let best = n.lp.objective_value(&n.solution.values);
    let terms: Vec<(usize, f64)> =
        n.lp.objective.iter().enumerate().filter(|(_, &c)| c != 0.0).map(|(j, &c)| (j, c)).collect();
    lp.add_row(terms, Cmp::Le, best + 1e-9 + 1e-14 * best.abs());
    lp.objective = vec![0.0; lp.num_vars()];
    for &k in &n.delta_vars {
        lp.objective[k] = -1.0;
    }
    let now: f64 = n.delta_vars.iter().map(|&k| n.solution.values[k]).sum();
    match solver.solve(&lp) {
        LpOutcome::Optimal(s) => Ok(n.delta_vars.iter().map(|&k| s.values[k]).sum::<f64>() - now),
        LpOutcome::Infeasible => Err(Error::Internal("optimal face is empty".into())),
        LpOutcome::Unbounded => Err(Error::Internal("optimal face is unbounded".into())),
    }
}

/// Moves the objects of a horizontal pass to their solved coordinates.
fn apply(d: &Drawing, problem: &ConstraintProblem, n: &Nudged) -> Result<Drawing> {
    let x: BTreeMap<ObjectKind, f64> =
        problem.chi.objects.iter().enumerate().map(|(i, o)| (o.kind, n.coord(i))).collect();
    let mut out = d.clone();
    if problem.mode == NudgeMode::Full {
        for (bi, b) in out.boxes.iter_mut().enumerate() {
            let mut r = b.rect();
            r.x0 = x[&ObjectKind::BoxLeft(bi)];
            r.x1 = x[&ObjectKind::BoxRight(bi)];
            *b = b.with_rect(r);
        }
    }
    for (ei, e) in out.edges.iter_mut().enumerate() {
        let mut pts = e.points.clone();
        for (k, p) in pts.iter_mut().enumerate() {
            p.x = x[&anchor(d, ei, k)?];
        }
        e.points = corners_of(&pts);
    }
    Ok(out)
}

/// Result of one pass, kept for inspection.
#[derive(Debug, Clone, PartialEq)]
pub struct PassReport {
    pub axis: Axis,
    /// Problem in the pass's own frame (transposed for vertical passes).
    pub problem: ConstraintProblem,
    pub nudged: Nudged,
}

/// One nudging pass along `axis`.
pub fn nudge_pass(
    d: &Drawing,
    tie: &TieOrder,
    axis: Axis,
    cfg: &NudgeConfig,
    solver: &dyn LpSolver,
) -> Result<(Drawing, PassReport)> {
    let horizontal = |d: &Drawing, tie: &TieOrder| -> Result<(Drawing, PassReport)> {
        let problem = build_problem(d, tie, cfg)?;
        let nudged = nudge(&problem, solver)?;
        let out = apply(d, &problem, &nudged)?;
        Ok((out, PassReport { axis, problem, nudged }))
    };
    match axis {
        Axis::Horizontal => horizontal(d, tie),
        Axis::Vertical => {
            let (t, report) = horizontal(&d.transposed(), &tie.transposed())?;
            Ok((t.transposed(), report))
        }
    }
}

/// Runs the passes of `cfg.schedule` in order.
pub fn run_nudging_passes(d: &Drawing, tie: &TieOrder, cfg: &NudgeConfig, solver: &dyn LpSolver) -> Result<Drawing> {
    run_nudging_passes_with_reports(d, tie, cfg, solver).map(|(d, _)| d)
}

pub fn run_nudging_passes_with_reports(
    d: &Drawing,
    tie: &TieOrder,
    cfg: &NudgeConfig,
    solver: &dyn LpSolver,
) -> Result<(Drawing, Vec<PassReport>)> {
    if cfg.schedule.is_empty() {
        return Err(invalid("empty nudging schedule"));
    }
    if !(cfg.delta_min >= 0.0 && cfg.delta_min.is_finite()) {
        return Err(invalid("delta_min must be finite and non-negative"));
    }
    crate::drawing::check_drawing(d)?;
    let mut cur = d.clone();
    let mut reports = Vec::with_capacity(cfg.schedule.len());
    for &axis in &cfg.schedule {
        let (next, report) = nudge_pass(&cur, tie, axis, cfg, solver)?;
        cur = next;
        reports.push(report);
    }
    Ok((cur, reports))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom::BoxShape;
    use crate::lp::DenseSimplex;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn obj(kind: ObjectKind, coord: f64, lo: f64, hi: f64, pinned: bool) -> NudgeObject {
        let span = Interval::new(lo, hi);
        NudgeObject { kind, coord, extent: span, span, pinned }
    }

    fn seg(edge: usize, coord: f64, lo: f64, hi: f64) -> NudgeObject {
        obj(ObjectKind::Segment { edge, index: 1 }, coord, lo, hi, false)
    }

    fn walls(right: f64, inner: &[f64]) -> OrderChi {
        let mut objects = vec![
            obj(ObjectKind::Alpha, -5.0, -1.0, 11.0, false),
            obj(ObjectKind::BoxRight(0), 0.0, 0.0, 10.0, true),
        ];
        for (i, &x) in inner.iter().enumerate() {
            objects.push(seg(i, x, 0.0, 10.0));
        }
        objects.push(obj(ObjectKind::BoxLeft(1), right, 0.0, 10.0, true));
        objects.push(obj(ObjectKind::Omega, right + 5.0, -1.0, 11.0, false));
        OrderChi { objects }
    }

    fn solve_chi(chi: OrderChi, mode: NudgeMode, delta_min: f64) -> (ConstraintProblem, Nudged) {
        let arcs = build_constraint_graph(&chi);
        let p = simplify_constraints(chi, &arcs, mode, delta_min, false).unwrap();
        let n = nudge(&p, &DenseSimplex::default()).unwrap();
        (p, n)
    }

    #[test]
    fn two_segments_between_walls() {
        let (p, n) = solve_chi(walls(12.0, &[3.0, 5.0]), NudgeMode::Constrained, 0.0);
        assert_eq!(p.components, 1);
        assert!((n.delta(0) - 4.0).abs() < 1e-6);
        assert!((n.coord(2) - 4.0).abs() < 1e-6);
        assert!((n.coord(3) - 8.0).abs() < 1e-6);
        assert_eq!(n.coord(1), 0.0);
        assert_eq!(n.coord(4), 12.0);
        assert!(optimality_gap(&n, &DenseSimplex::default()).unwrap() < 1e-6);
    }

    #[test]
    fn one_segment_between_walls() {
        let (_, n) = solve_chi(walls(10.0, &[1.0]), NudgeMode::Constrained, 0.0);
        assert!((n.coord(2) - 5.0).abs() < 1e-6);
        assert!((n.delta(0) - 5.0).abs() < 1e-6);
    }

    #[test]
    fn chain_between_dummies_shares_one_distance() {
        let chi = OrderChi {
            objects: vec![
                obj(ObjectKind::Alpha, 0.0, 0.0, 10.0, false),
                seg(0, 1.0, 0.0, 10.0),
                seg(1, 2.0, 0.0, 10.0),
                obj(ObjectKind::Omega, 3.0, 0.0, 10.0, false),
            ],
        };
        let arcs = build_constraint_graph(&chi);
        assert_eq!(arcs, vec![(0, 1), (1, 2), (2, 3)]);
        let p = simplify_constraints(chi, &arcs, NudgeMode::Constrained, 0.0, false).unwrap();
        assert_eq!(p.components, 1);
        assert!(p.separations.iter().all(|s| s.gap == Gap::Shared(0)));
        assert_eq!(p.separations.len(), 3);
    }

    #[test]
    fn arcs_follow_overlaps() {
        let chi = OrderChi {
            objects: vec![seg(0, 0.0, 0.0, 2.0), seg(1, 1.0, 1.0, 3.0), seg(2, 2.0, 2.5, 4.0)],
        };
        assert_eq!(build_constraint_graph(&chi), vec![(0, 1), (1, 2)]);
        let chi = OrderChi { objects: vec![seg(0, 0.0, 0.0, 1.0), seg(1, 1.0, 2.0, 3.0)] };
        assert!(build_constraint_graph(&chi).is_empty());
    }

    #[test]
    fn transitive_arcs_and_pinned_pairs_are_dropped() {
        let (kept, removed) = remove_transitive(&[(0, 1), (1, 2), (0, 2)]);
        assert_eq!(kept, vec![(0, 1), (1, 2)]);
        assert_eq!(removed, vec![(0, 2)]);
        let chi = OrderChi {
            objects: vec![
                obj(ObjectKind::Alpha, -1.0, 0.0, 10.0, false),
                obj(ObjectKind::BoxRight(0), 0.0, 0.0, 10.0, true),
                obj(ObjectKind::BoxLeft(1), 5.0, 0.0, 10.0, true),
                obj(ObjectKind::Omega, 6.0, 0.0, 10.0, false),
            ],
        };
        let arcs = build_constraint_graph(&chi);
        let p = simplify_constraints(chi.clone(), &arcs, NudgeMode::Constrained, 0.0, false).unwrap();
        assert!(!p.separations.iter().any(|s| (s.from, s.to) == (1, 2)));
        assert_eq!(p.components, 0);
        let p = simplify_constraints(chi, &arcs, NudgeMode::Full, 3.0, false).unwrap();
        assert!(p.separations.iter().any(|s| (s.from, s.to) == (1, 2) && s.gap == Gap::Constant(3.0)));
        assert!(simplify_constraints(OrderChi::default(), &[(2, 1)], NudgeMode::Full, 1.0, false).is_err());
    }

    /// Brute force: some point of the common extent is not covered by any
    /// object ordered strictly between.
    fn oracle_arcs(chi: &OrderChi) -> Vec<(usize, usize)> {
        let o = &chi.objects;
        let mut ends: Vec<f64> = o.iter().flat_map(|x| [x.extent.lo, x.extent.hi]).collect();
        ends.sort_by(f64::total_cmp);
        ends.dedup();
        let mut probes = ends.clone();
        probes.extend(ends.windows(2).map(|w| (w[0] + w[1]) / 2.0));
        let mut arcs = Vec::new();
        for u in 0..o.len() {
            for v in u + 1..o.len() {
                let Some(common) = o[u].extent.intersect(&o[v].extent) else { continue };
                let visible = probes
                    .iter()
                    .filter(|&&y| common.contains(y))
                    .any(|&y| !(u + 1..v).any(|w| o[w].extent.contains(y)));
                if visible {
                    arcs.push((u, v));
                }
            }
        }
        arcs
    }

    fn random_chi(rng: &mut ChaCha8Rng, n: usize) -> OrderChi {
        let objects = (0..n)
            .map(|i| {
                let lo = rng.gen_range(0..20) as f64;
                let hi = lo + rng.gen_range(0..8) as f64;
                seg(i, i as f64, lo, hi)
            })
            .collect();
        OrderChi { objects }
    }

    #[test]
    fn sweep_matches_brute_force() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..50 {
            let chi = random_chi(&mut rng, 30);
            assert_eq!(build_constraint_graph(&chi), oracle_arcs(&chi));
        }
    }

    fn two_box_drawing() -> Drawing {
        let a = BoxShape::new(Point::new(5.0, 5.0), 10.0, 10.0).unwrap();
        let b = BoxShape::new(Point::new(45.0, 35.0), 10.0, 10.0).unwrap();
        Drawing {
            boxes: vec![a, b],
            edges: vec![DrawnEdge {
                id: 0,
                source: 0,
                target: 1,
                points: vec![Point::new(10.0, 5.0), Point::new(18.0, 5.0), Point::new(18.0, 35.0), Point::new(40.0, 35.0)],
            }],
        }
    }

    #[test]
    fn constrained_pass_centres_and_then_stays() {
        let cfg = NudgeConfig {
            mode: NudgeMode::Constrained,
            delta_min: 0.0,
            schedule: vec![Axis::Horizontal],
            collapse_bends: false,
        };
        let solver = DenseSimplex::default();
        let d = two_box_drawing();
        let once = run_nudging_passes(&d, &TieOrder::default(), &cfg, &solver).unwrap();
        assert_eq!(once.boxes, d.boxes);
        assert!((once.edges[0].points[1].x - 25.0).abs() < 1e-9);
        let twice = run_nudging_passes(&once, &TieOrder::default(), &cfg, &solver).unwrap();
        assert_eq!(twice, once);
    }

    #[test]
    fn full_mode_box_keeps_original_width() {
        let mut b = BoxShape::new(Point::new(0.0, 0.0), 2.0, 2.0).unwrap();
        b.width = 6.0;
        let d = Drawing { boxes: vec![b], edges: vec![] };
        let cfg = NudgeConfig { schedule: vec![Axis::Horizontal], ..NudgeConfig::default() };
        let out = run_nudging_passes(&d, &TieOrder::default(), &cfg, &DenseSimplex::default()).unwrap();
        assert!((out.boxes[0].width - 2.0).abs() < 1e-9);
        assert!((out.boxes[0].height - 2.0).abs() < 1e-9);
    }

    #[test]
    fn chi_puts_right_sides_before_segments_and_left_sides_after() {
        let a = BoxShape::new(Point::new(3.0, 0.0), 2.0, 2.0).unwrap();
        let c = BoxShape::new(Point::new(5.0, 10.0), 2.0, 2.0).unwrap();
        let e = DrawnEdge {
            id: 0,
            source: 0,
            target: 1,
            points: vec![Point::new(3.0, 1.0), Point::new(3.0, 5.0), Point::new(4.0, 5.0), Point::new(4.0, 9.0)],
        };
        let d = Drawing { boxes: vec![a, c], edges: vec![e] };
        let chi = build_order_chi(&d, &TieOrder::default(), 0.0, 1.0).unwrap();
        let kinds: Vec<ObjectKind> = chi.objects.iter().map(|o| o.kind).collect();
        let at = |k: ObjectKind| kinds.iter().position(|&x| x == k).unwrap();
        let s = at(ObjectKind::Segment { edge: 0, index: 2 });
        assert!(at(ObjectKind::BoxRight(0)) < s);
        assert!(s < at(ObjectKind::BoxLeft(1)));
        assert_eq!(kinds[0], ObjectKind::Alpha);
        assert_eq!(*kinds.last().unwrap(), ObjectKind::Omega);
    }

    #[test]
    fn chi_rejects_overlapping_boxes() {
        let a = BoxShape::new(Point::new(0.0, 0.0), 4.0, 4.0).unwrap();
        let b = BoxShape::new(Point::new(1.0, 1.0), 4.0, 4.0).unwrap();
        let d = Drawing { boxes: vec![a, b], edges: vec![] };
        assert!(build_order_chi(&d, &TieOrder::default(), 0.0, 1.0).is_err());
    }

    /// Two routes sharing the vertical line x = 20 between two stacked pairs
    /// of boxes; the bundle says route 1 is left of route 0.
    fn shared_corridor() -> (Drawing, TieOrder) {
        let bx = |x: f64, y: f64| BoxShape::new(Point::new(x, y), 10.0, 10.0).unwrap();
        let d = Drawing {
            boxes: vec![bx(5.0, 5.0), bx(35.0, 65.0), bx(5.0, 25.0), bx(35.0, 45.0)],
            edges: vec![
                DrawnEdge {
                    id: 0,
                    source: 0,
                    target: 1,
                    points: vec![Point::new(10.0, 5.0), Point::new(20.0, 5.0), Point::new(20.0, 65.0), Point::new(30.0, 65.0)],
                },
                DrawnEdge {
                    id: 1,
                    source: 2,
                    target: 3,
                    points: vec![Point::new(10.0, 25.0), Point::new(20.0, 25.0), Point::new(20.0, 45.0), Point::new(30.0, 45.0)],
                },
            ],
        };
        let mut tie = TieOrder::default();
        tie.lines.insert((true, OrdF64(20.0)), vec![(Interval::new(25.0, 45.0), vec![1, 0])]);
        (d, tie)
    }

    #[test]
    fn co_located_segments_follow_the_bundle() {
        let (d, tie) = shared_corridor();
        let chi = build_order_chi(&d, &tie, 0.0, 1.0).unwrap();
        let kinds: Vec<ObjectKind> = chi.objects.iter().map(|o| o.kind).collect();
        let at = |k: ObjectKind| kinds.iter().position(|&x| x == k).unwrap();
        assert!(at(ObjectKind::Segment { edge: 1, index: 1 }) < at(ObjectKind::Segment { edge: 0, index: 1 }));
        let mut flipped = tie.clone();
        flipped.lines.insert((true, OrdF64(20.0)), vec![(Interval::new(25.0, 45.0), vec![0, 1])]);
        let chi = build_order_chi(&d, &flipped, 0.0, 1.0).unwrap();
        let kinds: Vec<ObjectKind> = chi.objects.iter().map(|o| o.kind).collect();
        let at = |k: ObjectKind| kinds.iter().position(|&x| x == k).unwrap();
        assert!(at(ObjectKind::Segment { edge: 0, index: 1 }) < at(ObjectKind::Segment { edge: 1, index: 1 }));
    }

    #[test]
    fn full_passes_separate_the_corridor() {
        let (d, tie) = shared_corridor();
        let solver = DenseSimplex::default();
        let (out, reports) = run_nudging_passes_with_reports(&d, &tie, &NudgeConfig::default(), &solver).unwrap();
        crate::drawing::check_drawing(&out).unwrap();
        let x0 = out.edges[0].points[1].x;
        let x1 = out.edges[1].points[1].x;
        assert!(x0 - x1 >= 12.0 - 1e-6, "{x0} {x1}");
        for r in &reports {
            assert!(r.nudged.lp.max_violation(&r.nudged.solution.values) <= CHECK_TOLERANCE);
            assert!(optimality_gap(&r.nudged, &solver).unwrap() <= 1e-6);
            for (i, b) in out.boxes.iter().enumerate() {
                assert!(b.width >= b.original_width - 1e-9, "box {i}");
                assert!(b.height >= b.original_height - 1e-9, "box {i}");
            }
        }
    }

    #[test]
    fn bend_collapse_straightens_a_step() {
        let bx = |x: f64, y: f64| BoxShape::new(Point::new(x, y), 10.0, 10.0).unwrap();
        let d = Drawing {
            boxes: vec![bx(20.0, 5.0), bx(22.0, 65.0)],
            edges: vec![DrawnEdge {
                id: 0,
                source: 0,
                target: 1,
                points: vec![Point::new(20.0, 10.0), Point::new(20.0, 35.0), Point::new(22.0, 35.0), Point::new(22.0, 60.0)],
            }],
        };
        let cfg = NudgeConfig { collapse_bends: true, ..NudgeConfig::default() };
        let out = run_nudging_passes(&d, &TieOrder::default(), &cfg, &DenseSimplex::default()).unwrap();
        crate::drawing::check_drawing(&out).unwrap();
        assert_eq!(out.edges[0].points.len(), 2, "{:?}", out.edges[0].points);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn arcs_respect_order_and_overlap(seed in 0u64..10_000, n in 1usize..25) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let chi = random_chi(&mut rng, n);
            for (u, v) in build_constraint_graph(&chi) {
                prop_assert!(u < v);
                prop_assert!(chi.objects[u].extent.intersect(&chi.objects[v].extent).is_some());
            }
        }

        #[test]
        fn solution_satisfies_every_separation(seed in 0u64..10_000, n in 1usize..12) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut objects = vec![obj(ObjectKind::Alpha, -1.0, -1.0, 30.0, false)];
            for i in 0..n {
                let lo = rng.gen_range(0..20) as f64;
                let hi = lo + rng.gen_range(1..8) as f64;
                let pinned = rng.gen_bool(0.3);
                objects.push(obj(ObjectKind::Segment { edge: i, index: 0 }, 2.0 * i as f64, lo, hi, pinned));
            }
            objects.push(obj(ObjectKind::Omega, 2.0 * n as f64, -1.0, 30.0, false));
            for mode in [NudgeMode::Constrained, NudgeMode::Full] {
                let (p, sol) = solve_chi(OrderChi { objects: objects.clone() }, mode, 2.0);
                for s in &p.separations {
                    let gap = match s.gap { Gap::Shared(k) => sol.delta(k), Gap::Constant(c) => c };
                    prop_assert!(sol.coord(s.to) - sol.coord(s.from) >= gap - CHECK_TOLERANCE);
                }
                if mode == NudgeMode::Constrained {
                    for (i, o) in p.chi.objects.iter().enumerate() {
                        if o.pinned { prop_assert_eq!(sol.coord(i), o.coord); }
                    }
                }
                prop_assert!(optimality_gap(&sol, &DenseSimplex::default()).unwrap() <= 1e-6);
            }
        }
    }
}
