//! Initial placement: Fruchterman–Reingold on points, then GTree-style
//! overlap removal on the boxes centered at those points.

use alloc::vec;
use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{invalid, Result};
use crate::geom::{BoxShape, Point};
use crate::graph::Multigraph;
use crate::math;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LayoutConfig {
    pub iterations: usize,
    pub ideal_edge_length: f64,
    /// Temperature factor applied after every iteration, in `(0, 1)`.
    pub cooling: f64,
    pub seed: u64,
    /// Minimum gap between boxes after overlap removal.
    pub margin: f64,
}

impl Default for LayoutConfig {
    fn default() -> Self {
        Self { iterations: 1000, ideal_edge_length: 100.0, cooling: 0.99, seed: 0, margin: 12.0 }
    }
}

impl LayoutConfig {
    /// Twice the largest box diagonal, the default ideal edge length.
    pub fn ideal_length_for(boxes: &[BoxShape]) -> f64 {
        let d = boxes.iter().map(|b| math::hypot(b.width, b.height)).fold(0.0, f64::max);
        if d > 0.0 {
            2.0 * d
        } else {
            100.0
        }
    }

    fn validate(&self) -> Result<()> {
        if self.iterations == 0 {
            return Err(invalid("iterations must be at least 1"));
        }
        if !(self.ideal_edge_length > 0.0) {
            return Err(invalid("ideal edge length must be positive"));
        }
        if !(self.cooling > 0.0 && self.cooling < 1.0) {
            return Err(invalid("cooling must lie in (0, 1)"));
        }
        if !(self.margin >= 0.0) {
            return Err(invalid("margin must be non-negative"));
        }
        Ok(())
    }
}

/// Force-directed placement of the vertices as points, indexed like
/// `graph.vertices()`.
///
/// Repulsion `k²/d` acts between all pairs, attraction `d²/k` once per
/// non-loop edge occurrence. Initial positions are uniform in a square of
/// side `k·√n`; the temperature starts at a tenth of that side.
pub fn force_layout(graph: &Multigraph, cfg: &LayoutConfig) -> Result<Vec<Point>> {
    cfg.validate()?;
    let n = graph.n();
    if n == 0 {
        return Err(invalid("cannot lay out an empty graph"));
    }
    let k = cfg.ideal_edge_length;
    let side = k * math::sqrt(n as f64);
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut pos: Vec<Point> = (0..n).map(|_| Point::new(rng.gen::<f64>() * side, rng.gen::<f64>() * side)).collect();
    if n == 1 {
        return Ok(pos);
    }
    let mut temperature = side / 10.0;
    let min_dist = k * 1e-4;
    let mut disp = vec![(0.0f64, 0.0f64); n];
    for _ in 0..cfg.iterations {
        disp.iter_mut().for_each(|d| *d = (0.0, 0.0));
        for i in 0..n {
            for j in i + 1..n {
                let (mut dx, mut dy) = (pos[i].x - pos[j].x, pos[i].y - pos[j].y);
                let mut d = math::hypot(dx, dy);
                if d < min_dist {
                    // Coincident points: separate along x, deterministically.
                    dx = min_dist;
                    dy = 0.0;
                    d = min_dist;
                }
                let f = k * k / d;
                let (fx, fy) = (dx / d * f, dy / d * f);
                disp[i].0 += fx;
                disp[i].1 += fy;
                disp[j].0 -= fx;
                disp[j].1 -= fy;
            }
        }
        for e in graph.edges().iter().filter(|e| !e.is_loop()) {
            let (s, t) = (e.source, e.target);
            let (dx, dy) = (pos[s].x - pos[t].x, pos[s].y - pos[t].y);
            let d = math::hypot(dx, dy).max(min_dist);
            let f = d * d / k;
            let (fx, fy) = (dx / d * f, dy / d * f);
            disp[s].0 -= fx;
            disp[s].1 -= fy;
            disp[t].0 += fx;
            disp[t].1 += fy;
        }
        for (p, &(dx, dy)) in pos.iter_mut().zip(&disp) {
            let len = math::hypot(dx, dy);
            if len > 0.0 {
                let step = len.min(temperature);
                p.x += dx / len * step;
                p.y += dy / len * step;
            }
        }
        temperature *= cfg.cooling;
    }
    Ok(pos)
}

/// Smallest factor `t` such that scaling the center offset of `a` and `b`
/// by `t` separates them by at least `margin` on some axis. `t <= 1` means
/// the pair is already separated.
fn overlap_factor(a: &BoxShape, b: &BoxShape, margin: f64) -> f64 {
    let dx = (b.center.x - a.center.x).abs();
    let dy = (b.center.y - a.center.y).abs();
    let need_x = (a.width + b.width) / 2.0 + margin;
    let need_y = (a.height + b.height) / 2.0 + margin;
    let tx = if dx > 0.0 { need_x / dx } else { f64::INFINITY };
    let ty = if dy > 0.0 { need_y / dy } else { f64::INFINITY };
    tx.min(ty)
}

const SEPARATED: f64 = 1.0 + 1e-12;

fn separated(a: &BoxShape, b: &BoxShape, margin: f64) -> bool {
    overlap_factor(a, b, margin) <= SEPARATED
}

/// Gap between two boxes along the axis where it is larger (negative when
/// they overlap on both axes).
pub fn box_gap(a: &BoxShape, b: &BoxShape) -> f64 {
    let gx = (b.center.x - a.center.x).abs() - (a.width + b.width) / 2.0;
    let gy = (b.center.y - a.center.y).abs() - (a.height + b.height) / 2.0;
    gx.max(gy)
}

/// Moves boxes apart until every pair is separated by `margin` on at least
/// one axis. Sizes are unchanged. Already separated inputs come back as-is.
///
/// Each round builds a minimum spanning tree over all center pairs, where
/// overlapping pairs weigh `-t` (their overlap factor) and separated pairs
/// their gap, then walks the tree from the root and pushes each overlapping
/// child subtree outward along the parent-child direction.
pub fn remove_overlaps(boxes: &[BoxShape], margin: f64) -> Vec<BoxShape> {
    let n = boxes.len();
    let mut out = boxes.to_vec();
    if n < 2 || all_separated(&out, margin) {
        return out;
    }
    // Coincident centers: nudge the later box right by a hair.
    for j in 1..n {
        for i in 0..j {
            if out[i].center.approx_eq(out[j].center) {
                out[j].center.x += 1e-6 * (1.0 + out[j].center.x.abs());
            }
        }
    }
    let max_rounds = 10 * n + 100;
    for _ in 0..max_rounds {
        if !gtree_round(&mut out, margin) {
            return out;
        }
    }
    if !all_separated(&out, margin) {
        scale_apart(&mut out, margin);
    }
    out
}

fn all_separated(boxes: &[BoxShape], margin: f64) -> bool {
    (0..boxes.len()).all(|i| (i + 1..boxes.len()).all(|j| separated(&boxes[i], &boxes[j], margin)))
}

fn pair_weight(a: &BoxShape, b: &BoxShape, margin: f64) -> f64 {
    let t = overlap_factor(a, b, margin);
    if t > SEPARATED {
        -t
    } else {
        box_gap(a, b) - margin
    }
}

/// One GTree round. Returns whether any overlap remained.
fn gtree_round(boxes: &mut [BoxShape], margin: f64) -> bool {
    let n = boxes.len();
    let mut parent = vec![usize::MAX; n];
    let mut in_tree = vec![false; n];
    let mut best = vec![f64::INFINITY; n];
    let mut order = Vec::with_capacity(n);
    best[0] = f64::NEG_INFINITY;
    for _ in 0..n {
        let u = (0..n)
            .filter(|&v| !in_tree[v])
            .min_by(|&a, &b| best[a].total_cmp(&best[b]).then(a.cmp(&b)))
            .expect("a vertex remains outside the tree");
        in_tree[u] = true;
        order.push(u);
        for v in 0..n {
            if !in_tree[v] {
                let w = pair_weight(&boxes[u], &boxes[v], margin);
                if w < best[v] {
                    best[v] = w;
                    parent[v] = u;
                }
            }
        }
    }
    let mut children: Vec<Vec<usize>> = vec![Vec::new(); n];
    for &v in &order[1..] {
        children[parent[v]].push(v);
    }
    let mut any = false;
    // Prim order is a valid top-down order: parents precede children.
    for &v in &order[1..] {
        let p = parent[v];
        let t = overlap_factor(&boxes[p], &boxes[v], margin);
        if t > SEPARATED && t.is_finite() {
            any = true;
            let dx = (boxes[v].center.x - boxes[p].center.x) * (t - 1.0);
            let dy = (boxes[v].center.y - boxes[p].center.y) * (t - 1.0);
            let mut stack = vec![v];
            while let Some(u) = stack.pop() {
                boxes[u].center.x += dx;
                boxes[u].center.y += dy;
                stack.extend_from_slice(&children[u]);
            }
        }
    }
    any || !all_separated(boxes, margin)
}

/// Scales all centers about the first box's center by the largest overlap
/// factor; afterwards every pair is separated.
fn scale_apart(boxes: &mut [BoxShape], margin: f64) {
    let mut t: f64 = 1.0;
    for i in 0..boxes.len() {
        for j in i + 1..boxes.len() {
            t = t.max(overlap_factor(&boxes[i], &boxes[j], margin));
        }
    }
    let t = t * (1.0 + 1e-9);
    let origin = boxes[0].center;
    for b in boxes.iter_mut() {
        b.center.x = origin.x + (b.center.x - origin.x) * t;
        b.center.y = origin.y + (b.center.y - origin.y) * t;
    }
}
