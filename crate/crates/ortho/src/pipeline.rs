//! The full layout pipeline and its three entry modes.

use std::collections::BTreeMap;
use std::time::{Duration, Instant};

use ortho_core::drawing::{Drawing, DrawnEdge};
use ortho_core::geom::{box_from_label, BoxShape, BoxSizing, OrdF64, Orientation, OrthoSegment, Point, Rect, SegmentOwner};
use ortho_core::graph::Multigraph;
use ortho_core::layout::{force_layout, remove_overlaps, LayoutConfig};
use ortho_core::metrics::{compute_metrics, DrawingMetrics};
use ortho_core::nudging::{run_nudging_passes_with_reports, Axis, NudgeConfig, NudgeMode, PassReport, TieOrder};
use ortho_core::ordering::{join_collinear, order_paths, BundleOrder};
use ortho_core::ports::assign_ports;
use ortho_core::routing::{reduce_crossings, route_all, EdgePath};
use ortho_core::routing_graph::{build_routing_graph, find_channels, routing_bounds, select_representatives, RoutingGraph};
use ortho_core::Error;

use crate::error::{PipelineError, Stage};
use crate::instance::{Instance, Mode, NudgeKind};
use crate::solver::MicroLp;

#[derive(Debug, Clone, PartialEq)]
pub struct PipelineConfig {
    pub mode: Mode,
    pub nudge: NudgeConfig,
    pub seed: u64,
    /// Force-directed parameters; the ideal edge length defaults to twice
    /// the largest box diagonal and the seed to `seed`.
    pub layout: Option<LayoutConfig>,
    pub sizing: BoxSizing,
    /// Free space around the boxes for routing.
    pub routing_margin: f64,
    /// Cap on route rewrites during crossing reduction.
    pub max_rewrites: usize,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        Self {
            mode: Mode::Force,
            nudge: NudgeConfig::default(),
            seed: 0,
            layout: None,
            sizing: BoxSizing::default(),
            routing_margin: 24.0,
            max_rewrites: 100_000,
        }
    }
}

/// Parses a schedule such as `"HVH"`.
pub fn parse_schedule(s: &str) -> Result<Vec<Axis>, String> {
    let out: Result<Vec<Axis>, String> = s
        .chars()
        .filter(|c| !matches!(c, ',' | ' '))
        .map(|c| match c.to_ascii_uppercase() {
            'H' => Ok(Axis::Horizontal),
            'V' => Ok(Axis::Vertical),
            other => Err(format!("unknown pass '{other}' (use H or V)")),
        })
        .collect();
    let out = out?;
    if out.is_empty() {
        return Err("empty pass schedule".into());
    }
    Ok(out)
}

impl PipelineConfig {
    /// Applies the settings carried by an instance document.
    pub fn with_instance(mut self, inst: &Instance) -> Result<Self, String> {
        let c = &inst.config;
        if let Some(m) = c.mode {
            self.mode = m;
        }
        if let Some(d) = c.delta_min {
            self.nudge.delta_min = d;
        }
        if let Some(n) = c.nudge {
            self.nudge.mode = nudge_mode(n);
        }
        if let Some(p) = &c.passes {
            self.nudge.schedule = parse_schedule(p)?;
        }
        if let Some(s) = c.seed {
            self.seed = s;
        }
        Ok(self)
    }
}

pub fn nudge_mode(k: NudgeKind) -> NudgeMode {
    match k {
        NudgeKind::Constrained => NudgeMode::Constrained,
        NudgeKind::Full => NudgeMode::Full,
    }
}

/// Routing graph, routes and bundle order of a run.
#[derive(Debug, Clone)]
pub struct Routing {
    pub h: RoutingGraph,
    pub paths: Vec<EdgePath>,
    pub order: BundleOrder,
}

/// Geometry for optional SVG layers.
#[derive(Debug, Clone, Default)]
pub struct DebugLayers {
    pub channels: Vec<Rect>,
    pub representatives: Vec<OrthoSegment>,
    /// Constraint arcs of the last pass, in final coordinates.
    pub arcs: Vec<(Point, Point)>,
}

#[derive(Debug, Clone)]
pub struct PipelineOutput {
    /// The drawn graph (the largest component of the input).
    pub graph: Multigraph,
    pub drawing: Drawing,
    /// Routes before nudging.
    pub routed: Drawing,
    pub routing: Routing,
    pub reports: Vec<PassReport>,
    pub metrics: DrawingMetrics,
    /// Wall-clock time per stage, in execution order.
    pub timings: Vec<(Stage, Duration)>,
    pub total: Duration,
    pub debug: DebugLayers,
    /// Vertices left out because they lie outside the largest component.
    pub dropped_vertices: usize,
}

impl PipelineOutput {
    pub fn stage_time(&self, stage: Stage) -> Duration {
        self.timings.iter().filter(|(s, _)| *s == stage).map(|(_, d)| *d).sum()
    }
}

struct Timer {
    timings: Vec<(Stage, Duration)>,
}

impl Timer {
    fn run<T>(&mut self, stage: Stage, f: impl FnOnce() -> Result<T, Error>) -> Result<T, PipelineError> {
        let start = Instant::now();
        let out = f().map_err(PipelineError::at(stage));
        self.timings.push((stage, start.elapsed()));
        out
    }
}

fn input_error(msg: impl Into<String>) -> PipelineError {
    PipelineError { stage: Stage::Input, source: Error::InvalidArgument(msg.into()) }
}

/// Largest component, with the paths of its edges.
fn largest_component(graph: &Multigraph, paths: Option<&[Vec<Point>]>) -> (Multigraph, Option<Vec<Vec<Point>>>, usize) {
    let comps = graph.components();
    if comps.len() <= 1 {
        return (graph.clone(), paths.map(|p| p.to_vec()), 0);
    }
    let keep = &comps[0];
    let sub = graph.induced(keep);
    let dropped = graph.n() - keep.len();
    log::warn!("input is disconnected; drawing the largest component ({} of {} vertices)", keep.len(), graph.n());
    let paths = paths.map(|p| {
        let by_id: BTreeMap<u32, &Vec<Point>> = graph.edges().iter().zip(p).map(|(e, q)| (e.id, q)).collect();
        sub.edges().iter().map(|e| by_id[&e.id].clone()).collect()
    });
    (sub, paths, dropped)
}

fn initial_boxes(graph: &Multigraph, sizing: &BoxSizing) -> Result<Vec<BoxShape>, Error> {
    let degrees = graph.degrees();
    graph
        .vertices()
        .iter()
        .zip(degrees)
        .map(|(v, d)| match v.shape {
            Some(s) => Ok(s),
            None => box_from_label(v.label.as_deref().unwrap_or(""), sizing, d),
        })
        .collect()
}

/// Routing graph over given polylines, and each polyline as a vertex path.
pub fn routing_from_polylines(paths: &[Vec<Point>]) -> Result<(RoutingGraph, Vec<EdgePath>), Error> {
    let mut segments = Vec::new();
    let mut ends = Vec::new();
    for p in paths {
        for w in p.windows(2) {
            if let Some(s) = OrthoSegment::from_points(w[0], w[1], SegmentOwner::Dummy) {
                if s.length() > 0.0 {
                    segments.push(s);
                }
            }
        }
        ends.push(p[0]);
        ends.push(p[p.len() - 1]);
    }
    let h = RoutingGraph::from_segments(&segments, &ends)?;
    let mut by_x: BTreeMap<OrdF64, Vec<(f64, usize)>> = BTreeMap::new();
    let mut by_y: BTreeMap<OrdF64, Vec<(f64, usize)>> = BTreeMap::new();
    for (i, q) in h.points.iter().enumerate() {
        by_x.entry(OrdF64(q.x + 0.0)).or_default().push((q.y, i));
        by_y.entry(OrdF64(q.y + 0.0)).or_default().push((q.x, i));
    }
    let mut out = Vec::with_capacity(paths.len());
    for (ei, p) in paths.iter().enumerate() {
        let mut vertices: Vec<usize> = Vec::new();
        for w in p.windows(2) {
            let Some(s) = OrthoSegment::from_points(w[0], w[1], SegmentOwner::Dummy) else {
                return Err(Error::InvalidArgument(format!("route {ei} has a non-orthogonal segment")));
            };
            let (line, from, to) = match s.orientation {
                Orientation::Vertical => (by_x.get(&OrdF64(s.fixed + 0.0)), w[0].y, w[1].y),
                Orientation::Horizontal => (by_y.get(&OrdF64(s.fixed + 0.0)), w[0].x, w[1].x),
            };
            let mut on: Vec<(f64, usize)> = line
                .map(|l| l.iter().copied().filter(|&(c, _)| s.span.contains(c)).collect())
                .unwrap_or_default();
            on.sort_by(|a, b| a.0.total_cmp(&b.0));
            if from > to {
                on.reverse();
            }
            for (_, v) in on {
                if vertices.last() != Some(&v) {
                    vertices.push(v);
                }
            }
        }
        if vertices.is_empty() {
            return Err(Error::InvalidArgument(format!("route {ei} is empty")));
        }
        out.push(EdgePath { edge: ei, vertices });
    }
    Ok((h, out))
}

fn drawing_from_routes(graph: &Multigraph, boxes: &[BoxShape], h: &RoutingGraph, paths: &[EdgePath]) -> Drawing {
    Drawing {
        boxes: boxes.to_vec(),
        edges: graph
            .edges()
            .iter()
            .zip(paths)
            .map(|(e, p)| DrawnEdge { id: e.id, source: e.source, target: e.target, points: join_collinear(&p.points(h)) })
            .collect(),
    }
}

fn arcs_layer(report: &PassReport) -> Vec<(Point, Point)> {
    let objs = &report.problem.chi.objects;
    let at = |i: usize| {
        let o = &objs[i];
        let p = Point::new(report.nudged.coord(i), (o.span.lo + o.span.hi) / 2.0);
        match report.axis {
            Axis::Horizontal => p,
            Axis::Vertical => p.transposed(),
        }
    };
    report
        .problem
        .arcs
        .iter()
        .filter(|&&(u, v)| !objs[u].is_dummy() && !objs[v].is_dummy())
        .map(|&(u, v)| (at(u), at(v)))
        .collect()
}

/// Runs the pipeline on `graph`. `paths` (one per edge, graph edge order)
/// are required in given-routing mode and ignored otherwise.
pub fn run_pipeline(graph: &Multigraph, paths: Option<&[Vec<Point>]>, cfg: &PipelineConfig) -> Result<PipelineOutput, PipelineError> {
    let start = Instant::now();
    if graph.n() == 0 {
        return Err(input_error("the graph has no vertices"));
    }
    let (graph, paths, dropped_vertices) = largest_component(graph, paths);
    let mut timer = Timer { timings: Vec::new() };
    let mut boxes = timer.run(Stage::Input, || initial_boxes(&graph, &cfg.sizing))?;
    let mut debug = DebugLayers::default();

    match cfg.mode {
        Mode::Force => {
            boxes = timer.run(Stage::ForceDirected, || {
                let mut lc = cfg.layout.unwrap_or(LayoutConfig {
                    ideal_edge_length: LayoutConfig::ideal_length_for(&boxes),
                    ..LayoutConfig::default()
                });
                if cfg.layout.is_none() {
                    lc.seed = cfg.seed;
                }
                let pos = force_layout(&graph, &lc)?;
                let placed: Vec<BoxShape> = boxes.iter().zip(pos).map(|(b, p)| b.at(p)).collect();
                Ok(remove_overlaps(&placed, lc.margin))
            })?;
        }
        Mode::GivenPositions | Mode::GivenRouting => {
            for (b, v) in boxes.iter_mut().zip(graph.vertices()) {
                let p = v.position.ok_or_else(|| input_error(format!("vertex {} has no position", v.id)))?;
                *b = b.at(p);
            }
        }
    }

    let routing = if cfg.mode == Mode::GivenRouting {
        let given = paths.as_ref().ok_or_else(|| input_error("given-routing mode needs a path for every edge"))?;
        let (h, routes) = timer.run(Stage::EdgeRouting, || routing_from_polylines(given))?;
        let order = timer.run(Stage::EdgeOrdering, || order_paths(&h, &routes))?;
        Routing { h, paths: routes, order }
    } else {
        let (h, mut routes) = timer.run(Stage::EdgeRouting, || {
            let ports = assign_ports(&graph, &boxes)?;
            let bounds = routing_bounds(&boxes, cfg.routing_margin).expect("at least one box");
            let channels = find_channels(&boxes, &bounds)?;
            let reps = select_representatives(&channels, &boxes, &bounds, &ports);
            debug.channels = channels.iter().map(|c| c.rect).collect();
            debug.representatives = reps.iter().map(|r| r.segment).collect();
            let h = build_routing_graph(&reps, &ports)?;
            let routes = route_all(&graph, &h)?;
            Ok((h, routes))
        })?;
        timer.run(Stage::CrossingReduction, || {
            reduce_crossings(&h, &mut routes, cfg.max_rewrites);
            Ok(())
        })?;
        let order = timer.run(Stage::EdgeOrdering, || order_paths(&h, &routes))?;
        Routing { h, paths: routes, order }
    };

    let routed = match (cfg.mode, &paths) {
        (Mode::GivenRouting, Some(p)) => Drawing {
            boxes: boxes.clone(),
            edges: graph
                .edges()
                .iter()
                .zip(p)
                .map(|(e, q)| DrawnEdge { id: e.id, source: e.source, target: e.target, points: join_collinear(q) })
                .collect(),
        },
        _ => drawing_from_routes(&graph, &boxes, &routing.h, &routing.paths),
    };
    let (drawing, reports) = timer.run(Stage::EdgeNudging, || {
        let tie = TieOrder::from_bundles(&routing.h, &routing.order);
        run_nudging_passes_with_reports(&routed, &tie, &cfg.nudge, &MicroLp)
    })?;
    if let Some(last) = reports.last() {
        debug.arcs = arcs_layer(last);
    }
    let metrics = timer.run(Stage::Metrics, || compute_metrics(&drawing))?;
    Ok(PipelineOutput {
        graph,
        drawing,
        routed,
        routing,
        reports,
        metrics,
        timings: timer.timings,
        total: start.elapsed(),
        debug,
        dropped_vertices,
    })
}

/// Convenience wrapper for a parsed instance.
pub fn run_instance(inst: &Instance, cfg: &PipelineConfig) -> Result<PipelineOutput, PipelineError> {
    run_pipeline(&inst.graph, inst.paths.as_deref(), cfg)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn schedules_parse() {
        assert_eq!(parse_schedule("HVH").unwrap(), vec![Axis::Horizontal, Axis::Vertical, Axis::Horizontal]);
        assert_eq!(parse_schedule("h,v").unwrap(), vec![Axis::Horizontal, Axis::Vertical]);
        assert!(parse_schedule("").is_err());
        assert!(parse_schedule("HX").is_err());
    }

    #[test]
    fn polylines_become_vertex_paths() {
        let paths = vec![
            vec![Point::new(0.0, 0.0), Point::new(10.0, 0.0), Point::new(10.0, 10.0)],
            vec![Point::new(5.0, -5.0), Point::new(5.0, 5.0)],
        ];
        let (h, routes) = routing_from_polylines(&paths).unwrap();
        assert_eq!(routes[0].points(&h).len(), 4);
        assert_eq!(routes[0].points(&h)[1], Point::new(5.0, 0.0));
        assert_eq!(routes[1].points(&h), vec![Point::new(5.0, -5.0), Point::new(5.0, 0.0), Point::new(5.0, 5.0)]);
    }
}
