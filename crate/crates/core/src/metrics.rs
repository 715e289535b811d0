//! Quality measures of a finished drawing.
//!
//! Crossings count transversal intersections between segments of distinct
//! edges, where the intersection point lies strictly inside both segments.
//! A collinear overlap of positive length between segments of distinct
//! edges counts as one crossing. Touching at a segment end is not a
//! crossing.

use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;

use crate::drawing::Drawing;
use crate::error::{invalid, Result};
use crate::geom::{segment_intersection, OrdF64, Orientation, OrthoSegment, Rect, SegmentIntersection};

/// How collinear overlaps enter the crossing count, for exported metadata.
pub const CROSSING_POLICY: &str = "collinear overlap of positive length counts as one crossing";

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DrawingMetrics {
    pub crossings: usize,
    pub bends: usize,
    pub total_edge_length: f64,
    /// Population variance of the per-edge lengths.
    pub edge_length_variance: f64,
    pub area: f64,
    /// `max(w, h) / min(w, h)` of the bounding box.
    pub aspect_ratio: f64,
    /// Smallest distance between objects that may not touch; infinite when
    /// there is no such pair.
    pub delta_min: f64,
}

impl DrawingMetrics {
    /// Flat `(name, value)` record.
    pub fn fields(&self) -> [(&'static str, f64); 7] {
        [
            ("crossings", self.crossings as f64),
            ("bends", self.bends as f64),
            ("total_edge_length", self.total_edge_length),
            ("edge_length_variance", self.edge_length_variance),
            ("area", self.area),
            ("aspect_ratio", self.aspect_ratio),
            ("delta_min", self.delta_min),
        ]
    }
}

/// `(edge index, segment)` for every segment of positive length.
fn all_segments(d: &Drawing) -> Vec<(usize, OrthoSegment)> {
    d.edges.iter().enumerate().flat_map(|(i, e)| e.segments().into_iter().map(move |s| (i, s))).collect()
}

/// Crossings contributed by one pair of segments.
pub fn segment_crossings(a: &OrthoSegment, b: &OrthoSegment) -> usize {
    match segment_intersection(a, b) {
        SegmentIntersection::None => 0,
        SegmentIntersection::Overlap { span, .. } => usize::from(span.len() > 0.0),
        SegmentIntersection::Point(p) => {
            let inside = |s: &OrthoSegment| {
                let v = if s.orientation == Orientation::Horizontal { p.x } else { p.y };
                s.span.lo < v && v < s.span.hi
            };
            usize::from(a.orientation != b.orientation && inside(a) && inside(b))
        }
    }
}

/// Crossings per unordered pair of edge indices, by checking every pair of
/// segments.
pub fn crossings_by_pair(d: &Drawing) -> BTreeMap<(usize, usize), usize> {
    let segs = all_segments(d);
    let mut out = BTreeMap::new();
    for i in 0..segs.len() {
        for j in i + 1..segs.len() {
            let (ea, eb) = (segs[i].0, segs[j].0);
            if ea == eb {
                continue;
            }
            let c = segment_crossings(&segs[i].1, &segs[j].1);
            if c > 0 {
                *out.entry((ea.min(eb), ea.max(eb))).or_insert(0) += c;
            }
        }
    }
    out
}

/// Total crossings by checking every pair of segments.
pub fn count_crossings_naive(d: &Drawing) -> usize {
    crossings_by_pair(d).values().sum()
}

struct Fenwick(Vec<usize>);

impl Fenwick {
    fn add(&mut self, mut i: usize, v: isize) {
        i += 1;
        while i < self.0.len() {
            self.0[i] = (self.0[i] as isize + v) as usize;
            i += i & i.wrapping_neg();
        }
    }

    /// Sum over positions `< i`.
    fn prefix(&self, mut i: usize) -> usize {
        let mut s = 0;
        while i > 0 {
            s += self.0[i];
            i -= i & i.wrapping_neg();
        }
        s
    }
}

/// Total crossings with a sweep over x for perpendicular pairs and a sort
/// per line for collinear overlaps.
pub fn count_crossings(d: &Drawing) -> usize {
    let segs = all_segments(d);
    let (hs, vs): (Vec<_>, Vec<_>) = segs.iter().partition(|(_, s)| s.orientation == Orientation::Horizontal);
    let mut ys: Vec<f64> = hs.iter().map(|(_, s)| s.fixed).collect();
    ys.sort_by(f64::total_cmp);
    ys.dedup();
    let idx = |y: f64| ys.partition_point(|&v| v < y);

    // Event kinds at equal x: removals, then queries, then insertions.
    let mut events: Vec<(f64, u8, usize)> = Vec::new();
    for (i, (_, h)) in hs.iter().enumerate() {
        events.push((h.span.lo, 2, i));
        events.push((h.span.hi, 0, i));
    }
    for (i, (_, v)) in vs.iter().enumerate() {
        events.push((v.fixed, 1, i));
    }
    events.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
    let mut tree = Fenwick(vec![0; ys.len() + 1]);
    let mut total = 0usize;
    for (_, kind, i) in events {
        match kind {
            0 => tree.add(idx(hs[i].1.fixed), -1),
            2 => tree.add(idx(hs[i].1.fixed), 1),
            _ => {
                let v = &vs[i].1;
                // Horizontal lines strictly between v's ends.
                let lo = ys.partition_point(|&y| y <= v.span.lo);
                let hi = ys.partition_point(|&y| y < v.span.hi);
                if hi > lo {
                    total += tree.prefix(hi) - tree.prefix(lo);
                }
            }
        }
    }
    // The sweep also counted crossings of an edge with itself.
    for e in &d.edges {
        let s = e.segments();
        for i in 0..s.len() {
            for j in i + 1..s.len() {
                if s[i].orientation != s[j].orientation {
                    total -= segment_crossings(&s[i], &s[j]);
                }
            }
        }
    }
    // Collinear overlaps of distinct edges.
    let mut lines: BTreeMap<(bool, OrdF64), Vec<(usize, OrthoSegment)>> = BTreeMap::new();
    for &(e, s) in &segs {
        lines.entry((s.orientation == Orientation::Horizontal, OrdF64(s.fixed + 0.0))).or_default().push((e, s));
    }
    for line in lines.values_mut() {
        line.sort_by(|a, b| a.1.span.lo.total_cmp(&b.1.span.lo));
        for i in 0..line.len() {
            for j in i + 1..line.len() {
                if line[j].1.span.lo >= line[i].1.span.hi {
                    break;
                }
                if line[i].0 != line[j].0 {
                    total += 1;
                }
            }
        }
    }
    total
}

fn segment_rect(s: &OrthoSegment) -> Rect {
    let (a, b) = s.endpoints();
    Rect::new(a.x, a.y, b.x, b.y)
}

/// Smallest distance between segments of distinct edges that do not cross,
/// between segments and boxes their edge does not end at, and between
/// boxes.
pub fn min_object_distance(d: &Drawing) -> f64 {
    let segs = all_segments(d);
    let rects: Vec<Rect> = d.boxes.iter().map(|b| b.rect()).collect();
    let mut best = f64::INFINITY;
    for i in 0..rects.len() {
        for j in i + 1..rects.len() {
            best = best.min(rects[i].distance(&rects[j]));
        }
    }
    for (e, s) in &segs {
        let r = segment_rect(s);
        let edge = &d.edges[*e];
        for (b, br) in rects.iter().enumerate() {
            if b != edge.source && b != edge.target {
                best = best.min(r.distance(br));
            }
        }
    }
    for i in 0..segs.len() {
        for j in i + 1..segs.len() {
            let ((ea, a), (eb, b)) = (&segs[i], &segs[j]);
            if ea == eb || (a.orientation != b.orientation && segment_crossings(a, b) > 0) {
                continue;
            }
            best = best.min(a.distance(b));
        }
    }
    best
}

pub fn compute_metrics(d: &Drawing) -> Result<DrawingMetrics> {
    if d.boxes.is_empty() {
        return Err(invalid("empty drawing"));
    }
    // Sorted so the sums do not depend on the edge order.
    let mut lengths: Vec<f64> = d.edges.iter().map(|e| e.length()).collect();
    lengths.sort_by(f64::total_cmp);
    let total: f64 = lengths.iter().sum();
    let m = lengths.len();
    let variance = if m == 0 {
        0.0
    } else {
        let mean = total / m as f64;
        let mut sq: Vec<f64> = lengths.iter().map(|l| (l - mean) * (l - mean)).collect();
        sq.sort_by(f64::total_cmp);
        sq.iter().sum::<f64>() / m as f64
    };
    let bounds = d.bounds().ok_or_else(|| invalid("empty drawing"))?;
    let (w, h) = (bounds.width(), bounds.height());
    Ok(DrawingMetrics {
        crossings: count_crossings(d),
        bends: d.edges.iter().map(|e| e.bends()).sum(),
        total_edge_length: total,
        edge_length_variance: variance,
        area: w * h,
        aspect_ratio: w.max(h) / w.min(h),
        delta_min: min_object_distance(d),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::drawing::DrawnEdge;
    use crate::geom::{BoxShape, Point};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn bx(x: f64, y: f64) -> BoxShape {
        BoxShape::new(Point::new(x, y), 2.0, 2.0).unwrap()
    }

    fn edge(id: u32, source: usize, target: usize, pts: &[(f64, f64)]) -> DrawnEdge {
        DrawnEdge { id, source, target, points: pts.iter().map(|&(x, y)| Point::new(x, y)).collect() }
    }

    #[test]
    fn plus_sign_has_one_crossing() {
        let d = Drawing {
            boxes: vec![bx(0.0, 10.0), bx(0.0, -10.0), bx(-10.0, 0.0), bx(10.0, 0.0)],
            edges: vec![edge(0, 1, 0, &[(0.0, -9.0), (0.0, 9.0)]), edge(1, 2, 3, &[(-9.0, 0.0), (9.0, 0.0)])],
        };
        let m = compute_metrics(&d).unwrap();
        assert_eq!(m.crossings, 1);
        assert_eq!(m.bends, 0);
        assert_eq!(count_crossings_naive(&d), 1);
        assert_eq!(m.edge_length_variance, 0.0);
        assert_eq!(m.aspect_ratio, 1.0);
        // Edge 0 passes box 2 at distance 9.
        assert!((m.delta_min - 9.0).abs() < 1e-12);
    }

    #[test]
    fn l_shape_and_aspect_ratio() {
        let d = Drawing {
            boxes: vec![BoxShape::new(Point::new(0.5, 0.5), 1.0, 1.0).unwrap(), BoxShape::new(Point::new(3.5, 1.5), 1.0, 1.0).unwrap()],
            edges: vec![edge(0, 0, 1, &[(1.0, 0.5), (2.0, 0.5), (2.0, 1.5), (3.0, 1.5)])],
        };
        let m = compute_metrics(&d).unwrap();
        assert_eq!(m.bends, 2);
        assert_eq!(m.aspect_ratio, 2.0);
        assert_eq!(m.area, 8.0);
        let d2 = Drawing {
            boxes: vec![BoxShape::new(Point::new(0.5, 0.5), 1.0, 1.0).unwrap(), BoxShape::new(Point::new(3.5, 1.5), 1.0, 1.0).unwrap()],
            edges: vec![edge(0, 0, 1, &[(1.0, 0.5), (3.5, 0.5), (3.5, 1.0)])],
        };
        assert_eq!(compute_metrics(&d2).unwrap().bends, 1);
    }

    #[test]
    fn variance_is_population_variance() {
        let d = Drawing {
            boxes: vec![bx(0.0, 0.0), bx(10.0, 0.0), bx(0.0, 20.0), bx(20.0, 20.0)],
            edges: vec![edge(0, 0, 1, &[(1.0, 0.0), (9.0, 0.0)]), edge(1, 2, 3, &[(1.0, 20.0), (19.0, 20.0)])],
        };
        let m = compute_metrics(&d).unwrap();
        assert_eq!(m.total_edge_length, 26.0);
        assert_eq!(m.edge_length_variance, 25.0);
    }

    #[test]
    fn empty_drawing_is_rejected() {
        assert!(compute_metrics(&Drawing::default()).is_err());
    }

    #[test]
    fn collinear_overlap_counts_once() {
        let d = Drawing {
            boxes: vec![bx(0.0, 0.0), bx(20.0, 0.0), bx(5.0, 10.0), bx(30.0, 10.0)],
            edges: vec![
                edge(0, 0, 1, &[(0.0, 1.0), (0.0, 5.0), (20.0, 5.0), (20.0, 1.0)]),
                edge(1, 2, 3, &[(5.0, 9.0), (5.0, 5.0), (30.0, 5.0), (30.0, 9.0)]),
            ],
        };
        assert_eq!(count_crossings(&d), 1);
        assert_eq!(count_crossings_naive(&d), 1);
    }

    fn random_drawing(rng: &mut ChaCha8Rng) -> Drawing {
        let boxes = vec![bx(-100.0, -100.0), bx(100.0, 100.0)];
        let edges = (0..rng.gen_range(1..12))
            .map(|id| {
                let mut p = Point::new(rng.gen_range(0..20) as f64, rng.gen_range(0..20) as f64);
                let mut pts = vec![p];
                for k in 0..rng.gen_range(1..6) {
                    let step = rng.gen_range(1..10) as f64 * if rng.gen_bool(0.5) { 1.0 } else { -1.0 };
                    if k % 2 == 0 {
                        p.x += step;
                    } else {
                        p.y += step;
                    }
                    pts.push(p);
                }
                DrawnEdge { id, source: 0, target: 1, points: pts }
            })
            .collect();
        Drawing { boxes, edges }
    }

    #[test]
    fn sweep_matches_pairwise_count() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..300 {
            let d = random_drawing(&mut rng);
            assert_eq!(count_crossings(&d), count_crossings_naive(&d));
        }
    }

    #[test]
    fn metrics_ignore_edge_order() {
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        for _ in 0..50 {
            let d = random_drawing(&mut rng);
            let mut r = d.clone();
            r.edges.reverse();
            assert_eq!(compute_metrics(&d).unwrap(), compute_metrics(&r).unwrap());
        }
    }
}
