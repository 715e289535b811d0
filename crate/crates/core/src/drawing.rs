//! A finished or partially finished drawing: boxes plus one orthogonal
//! polyline per edge.

use alloc::format;
use alloc::vec::Vec;

use crate::error::{invalid, Result};
use crate::geom::{BoxShape, Orientation, OrthoSegment, Point, Rect, SegmentOwner, Side};
use crate::ports::on_side;
use crate::routing::corners_of;

#[derive(Debug, Clone, PartialEq)]
pub struct DrawnEdge {
    pub id: u32,
    /// Box index of the first point.
    pub source: usize,
    /// Box index of the last point.
    pub target: usize,
    /// Corner points, starting and ending at the ports.
    pub points: Vec<Point>,
}

impl DrawnEdge {
    pub fn segments(&self) -> Vec<OrthoSegment> {
        self.points
            .windows(2)
            .filter_map(|w| OrthoSegment::from_points(w[0], w[1], SegmentOwner::Edge(self.id)))
            .filter(|s| s.length() > 0.0)
            .collect()
    }

    pub fn length(&self) -> f64 {
        self.points.windows(2).map(|w| (w[1].x - w[0].x).abs() + (w[1].y - w[0].y).abs()).sum()
    }

    pub fn bends(&self) -> usize {
        corners_of(&self.points).len().saturating_sub(2)
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Drawing {
    pub boxes: Vec<BoxShape>,
    pub edges: Vec<DrawnEdge>,
}

impl Drawing {
    /// Mirror image in the main diagonal.
    pub fn transposed(&self) -> Drawing {
        Drawing {
            boxes: self.boxes.iter().map(|b| b.transposed()).collect(),
            edges: self
                .edges
                .iter()
                .map(|e| DrawnEdge { points: e.points.iter().map(|p| p.transposed()).collect(), ..e.clone() })
                .collect(),
        }
    }

    /// Bounding box over boxes and edge points.
    pub fn bounds(&self) -> Option<Rect> {
        let corners = self.boxes.iter().flat_map(|b| {
            let r = b.rect();
            [Point::new(r.x0, r.y0), Point::new(r.x1, r.y1)]
        });
        Rect::bounding(corners.chain(self.edges.iter().flat_map(|e| e.points.iter().copied())))
    }
}

/// Side of `b` through which a route leaves from `port` towards `next`.
pub(crate) fn exit_side(b: &BoxShape, port: Point, next: Point) -> Option<Side> {
    let d = Side::between(port, next)?;
    on_side(&b.rect(), d, port).then_some(d)
}

/// Checks the structural invariants of a drawing: disjoint boxes, axis
/// parallel segments of positive length with alternating orientation, and
/// routes that start and end on their boxes' boundaries, leaving outwards.
pub fn check_drawing(d: &Drawing) -> Result<()> {
    for i in 0..d.boxes.len() {
        for j in i + 1..d.boxes.len() {
            if d.boxes[i].rect().touches(&d.boxes[j].rect()) {
                return Err(invalid(format!("boxes {i} and {j} intersect")));
            }
        }
    }
    for e in &d.edges {
        if e.source >= d.boxes.len() || e.target >= d.boxes.len() {
            return Err(invalid(format!("edge {} references a missing box", e.id)));
        }
        if e.points.len() < 2 {
            return Err(invalid(format!("edge {} has fewer than two points", e.id)));
        }
        let mut last: Option<Orientation> = None;
        for w in e.points.windows(2) {
            let side = Side::between(w[0], w[1])
                .ok_or_else(|| invalid(format!("edge {} has a non-orthogonal or empty segment", e.id)))?;
            let o = side.exit_orientation();
            if w[0].x != w[1].x && w[0].y != w[1].y {
                return Err(invalid(format!("edge {} has a non-orthogonal segment", e.id)));
            }
            if last == Some(o) {
                return Err(invalid(format!("edge {} has two consecutive parallel segments", e.id)));
            }
            last = Some(o);
        }
        let n = e.points.len();
        if exit_side(&d.boxes[e.source], e.points[0], e.points[1]).is_none() {
            return Err(invalid(format!("edge {} does not leave its source box through a side", e.id)));
        }
        if exit_side(&d.boxes[e.target], e.points[n - 1], e.points[n - 2]).is_none() {
            return Err(invalid(format!("edge {} does not enter its target box through a side", e.id)));
        }
    }
    Ok(())
}
