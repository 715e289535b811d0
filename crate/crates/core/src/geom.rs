//! Geometric primitives shared by all stages.
//!
//! Coordinates are pixels in a y-up frame: side `N` of a box is its top
//! (largest y). Renderers flip y on output.

use core::cmp::Ordering;

use crate::error::{invalid, Result};
use crate::math;

/// Absolute tolerance for geometric comparisons.
pub const EPS: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    pub fn dist(self, other: Point) -> f64 {
        math::hypot(self.x - other.x, self.y - other.y)
    }

    pub fn approx_eq(self, other: Point) -> bool {
        (self.x - other.x).abs() <= EPS && (self.y - other.y).abs() <= EPS
    }

    /// Swaps the axes; used to run vertical passes through horizontal code.
    pub fn transposed(self) -> Point {
        Point::new(self.y, self.x)
    }
}

/// `f64` with a total order, for use as a map key.
#[derive(Debug, Clone, Copy)]
pub struct OrdF64(pub f64);

impl PartialEq for OrdF64 {
    fn eq(&self, other: &Self) -> bool {
        self.0.total_cmp(&other.0) == Ordering::Equal
    }
}
impl Eq for OrdF64 {}
impl PartialOrd for OrdF64 {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for OrdF64 {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0.total_cmp(&other.0)
    }
}

/// Point key with exact coordinate equality.
pub(crate) fn point_key(p: Point) -> (OrdF64, OrdF64) {
    (OrdF64(p.x + 0.0), OrdF64(p.y + 0.0))
}

/// Closed interval `[lo, hi]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub fn new(a: f64, b: f64) -> Self {
        if a <= b {
            Self { lo: a, hi: b }
        } else {
            Self { lo: b, hi: a }
        }
    }

    pub fn len(&self) -> f64 {
        self.hi - self.lo
    }

    pub fn contains(&self, v: f64) -> bool {
        self.lo <= v && v <= self.hi
    }

    /// Closed intersection, `None` when disjoint.
    pub fn intersect(&self, other: &Interval) -> Option<Interval> {
        let lo = self.lo.max(other.lo);
        let hi = self.hi.min(other.hi);
        (lo <= hi).then_some(Interval { lo, hi })
    }

    /// Intersection of positive length.
    pub fn overlaps_open(&self, other: &Interval) -> bool {
        self.lo.max(other.lo) < self.hi.min(other.hi)
    }

    pub fn inflate(&self, by: f64) -> Interval {
        Interval { lo: self.lo - by, hi: self.hi + by }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Orientation {
    Horizontal,
    Vertical,
}

impl Orientation {
    pub fn flip(self) -> Orientation {
        match self {
            Orientation::Horizontal => Orientation::Vertical,
            Orientation::Vertical => Orientation::Horizontal,
        }
    }
}

/// Side of a box, also used as a compass direction.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Side {
    N,
    E,
    S,
    W,
}

impl Side {
    pub const ALL: [Side; 4] = [Side::N, Side::E, Side::S, Side::W];

    pub fn index(self) -> usize {
        self as usize
    }

    /// Unit vector pointing away from the box.
    pub fn normal(self) -> (f64, f64) {
        match self {
            Side::N => (0.0, 1.0),
            Side::E => (1.0, 0.0),
            Side::S => (0.0, -1.0),
            Side::W => (-1.0, 0.0),
        }
    }

    pub fn opposite(self) -> Side {
        match self {
            Side::N => Side::S,
            Side::E => Side::W,
            Side::S => Side::N,
            Side::W => Side::E,
        }
    }

    /// Orientation of a segment leaving through this side.
    pub fn exit_orientation(self) -> Orientation {
        match self {
            Side::N | Side::S => Orientation::Vertical,
            Side::E | Side::W => Orientation::Horizontal,
        }
    }

    /// Counterclockwise quarter turns from `E`.
    pub(crate) fn ccw_steps(self) -> u8 {
        match self {
            Side::E => 0,
            Side::N => 1,
            Side::W => 2,
            Side::S => 3,
        }
    }

    /// Direction of travel from `a` to `b` along an axis-aligned step.
    pub fn between(a: Point, b: Point) -> Option<Side> {
        let dx = b.x - a.x;
        let dy = b.y - a.y;
        if dx.abs() <= EPS && dy.abs() <= EPS {
            None
        } else if dy.abs() <= EPS {
            Some(if dx > 0.0 { Side::E } else { Side::W })
        } else if dx.abs() <= EPS {
            Some(if dy > 0.0 { Side::N } else { Side::S })
        } else {
            None
        }
    }

    pub fn transposed(self) -> Side {
        match self {
            Side::N => Side::E,
            Side::E => Side::N,
            Side::S => Side::W,
            Side::W => Side::S,
        }
    }
}

/// Axis-aligned rectangle `[x0, x1] × [y0, y1]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Rect {
    pub x0: f64,
    pub y0: f64,
    pub x1: f64,
    pub y1: f64,
}

impl Rect {
    pub fn new(x0: f64, y0: f64, x1: f64, y1: f64) -> Self {
        Self { x0, y0, x1, y1 }
    }

    pub fn width(&self) -> f64 {
        self.x1 - self.x0
    }

    pub fn height(&self) -> f64 {
        self.y1 - self.y0
    }

    pub fn center(&self) -> Point {
        Point::new((self.x0 + self.x1) / 2.0, (self.y0 + self.y1) / 2.0)
    }

    pub fn x_range(&self) -> Interval {
        Interval { lo: self.x0, hi: self.x1 }
    }

    pub fn y_range(&self) -> Interval {
        Interval { lo: self.y0, hi: self.y1 }
    }

    /// Interiors intersect.
    pub fn overlaps(&self, other: &Rect) -> bool {
        self.x_range().overlaps_open(&other.x_range()) && self.y_range().overlaps_open(&other.y_range())
    }

    /// Closed rectangles intersect (touching counts).
    pub fn touches(&self, other: &Rect) -> bool {
        self.x_range().intersect(&other.x_range()).is_some()
            && self.y_range().intersect(&other.y_range()).is_some()
    }

    pub fn contains_point(&self, p: Point) -> bool {
        self.x_range().contains(p.x) && self.y_range().contains(p.y)
    }

    pub fn contains_point_strictly(&self, p: Point) -> bool {
        self.x0 < p.x && p.x < self.x1 && self.y0 < p.y && p.y < self.y1
    }

    pub fn union(&self, other: &Rect) -> Rect {
        Rect::new(
            self.x0.min(other.x0),
            self.y0.min(other.y0),
            self.x1.max(other.x1),
            self.y1.max(other.y1),
        )
    }

    pub fn inflate(&self, by: f64) -> Rect {
        Rect::new(self.x0 - by, self.y0 - by, self.x1 + by, self.y1 + by)
    }

    pub fn transposed(&self) -> Rect {
        Rect::new(self.y0, self.x0, self.y1, self.x1)
    }

    /// Euclidean distance between two closed rectangles.
    pub fn distance(&self, other: &Rect) -> f64 {
        let dx = (other.x0 - self.x1).max(self.x0 - other.x1).max(0.0);
        let dy = (other.y0 - self.y1).max(self.y0 - other.y1).max(0.0);
        math::hypot(dx, dy)
    }

    /// Bounding rectangle of a point set.
    pub fn bounding(points: impl IntoIterator<Item = Point>) -> Option<Rect> {
        let mut it = points.into_iter();
        let first = it.next()?;
        let mut r = Rect::new(first.x, first.y, first.x, first.y);
        for p in it {
            r = r.union(&Rect::new(p.x, p.y, p.x, p.y));
        }
        Some(r)
    }
}

/// A vertex box. Boxes may grow but never shrink below their original size.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoxShape {
    pub center: Point,
    pub width: f64,
    pub height: f64,
    pub original_width: f64,
    pub original_height: f64,
}

impl BoxShape {
    pub fn new(center: Point, width: f64, height: f64) -> Result<Self> {
        if !(width > 0.0 && height > 0.0) || !width.is_finite() || !height.is_finite() {
            return Err(invalid("box dimensions must be positive and finite"));
        }
        Ok(Self { center, width, height, original_width: width, original_height: height })
    }

    pub fn rect(&self) -> Rect {
        let hw = self.width / 2.0;
        let hh = self.height / 2.0;
        Rect::new(self.center.x - hw, self.center.y - hh, self.center.x + hw, self.center.y + hh)
    }

    /// Same original size, new extent. Used by nudging when sides move.
    pub fn with_rect(&self, r: Rect) -> BoxShape {
        BoxShape {
            center: r.center(),
            width: r.width(),
            height: r.height(),
            original_width: self.original_width,
            original_height: self.original_height,
        }
    }

    pub fn at(&self, center: Point) -> BoxShape {
        BoxShape { center, ..*self }
    }

    pub fn transposed(&self) -> BoxShape {
        BoxShape {
            center: self.center.transposed(),
            width: self.height,
            height: self.width,
            original_width: self.original_height,
            original_height: self.original_width,
        }
    }
}

/// Parameters for sizing a box around its label and ports.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoxSizing {
    pub base_width: f64,
    pub base_height: f64,
    pub per_char_width: f64,
    pub min_port_gap: f64,
}

impl Default for BoxSizing {
    fn default() -> Self {
        Self { base_width: 12.0, base_height: 38.0, per_char_width: 8.0, min_port_gap: 18.0 }
    }
}

/// Number of ports a side of length `len` holds at even spacing with gaps
/// of at least `gap`: `p` ports need `len >= (p + 1) * gap`.
pub fn side_capacity(len: f64, gap: f64) -> usize {
    if gap <= 0.0 {
        return usize::MAX;
    }
    let slots = math::floor(len / gap + EPS);
    if slots < 1.0 {
        0
    } else {
        slots as usize - 1
    }
}

/// Box that fits `label` and `degree` ports. Only the width grows; the
/// result is centered at the origin.
pub fn box_from_label(label: &str, sizing: &BoxSizing, degree: usize) -> Result<BoxShape> {
    if !(sizing.base_width > 0.0 && sizing.base_height > 0.0) {
        return Err(invalid("base box dimensions must be positive"));
    }
    let chars = label.chars().count() as f64;
    let mut width = sizing.base_width.max(chars * sizing.per_char_width);
    let height = sizing.base_height;
    let gap = sizing.min_port_gap;
    if degree > 0 && gap > 0.0 {
        let vertical = 2 * side_capacity(height, gap);
        if vertical < degree {
            let per_side = (degree - vertical).div_ceil(2);
            width = width.max((per_side + 1) as f64 * gap);
        }
    }
    BoxShape::new(Point::default(), width, height)
}

/// What a segment belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SegmentOwner {
    Edge(u32),
    BoxSide(u32, Side),
    Dummy,
}

/// Axis-parallel segment: a horizontal segment's fixed coordinate is its y,
/// a vertical one's is its x.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OrthoSegment {
    pub orientation: Orientation,
    pub fixed: f64,
    pub span: Interval,
    pub owner: SegmentOwner,
}

impl OrthoSegment {
    /// Segment between two axis-aligned points; `None` for a diagonal.
    pub fn from_points(a: Point, b: Point, owner: SegmentOwner) -> Option<Self> {
        if (a.y - b.y).abs() <= EPS {
            Some(Self { orientation: Orientation::Horizontal, fixed: a.y, span: Interval::new(a.x, b.x), owner })
        } else if (a.x - b.x).abs() <= EPS {
            Some(Self { orientation: Orientation::Vertical, fixed: a.x, span: Interval::new(a.y, b.y), owner })
        } else {
            None
        }
    }

    pub fn endpoints(&self) -> (Point, Point) {
        match self.orientation {
            Orientation::Horizontal => (Point::new(self.span.lo, self.fixed), Point::new(self.span.hi, self.fixed)),
            Orientation::Vertical => (Point::new(self.fixed, self.span.lo), Point::new(self.fixed, self.span.hi)),
        }
    }

    pub fn length(&self) -> f64 {
        self.span.len()
    }

    /// Euclidean distance between two axis-parallel segments.
    pub fn distance(&self, other: &OrthoSegment) -> f64 {
        let (a0, a1) = self.endpoints();
        let (b0, b1) = other.endpoints();
        Rect::new(a0.x, a0.y, a1.x, a1.y).distance(&Rect::new(b0.x, b0.y, b1.x, b1.y))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SegmentIntersection {
    None,
    Point(Point),
    /// Collinear overlap: the shared line and the common span.
    Overlap { orientation: Orientation, fixed: f64, span: Interval },
}

pub fn segment_intersection(a: &OrthoSegment, b: &OrthoSegment) -> SegmentIntersection {
    if a.orientation == b.orientation {
        if (a.fixed - b.fixed).abs() > EPS {
            return SegmentIntersection::None;
        }
        match a.span.intersect(&b.span) {
            Some(span) => SegmentIntersection::Overlap { orientation: a.orientation, fixed: a.fixed, span },
            None => SegmentIntersection::None,
        }
    } else {
        let (h, v) = if a.orientation == Orientation::Horizontal { (a, b) } else { (b, a) };
        if h.span.inflate(EPS).contains(v.fixed) && v.span.inflate(EPS).contains(h.fixed) {
            SegmentIntersection::Point(Point::new(v.fixed, h.fixed))
        } else {
            SegmentIntersection::None
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn seg(o: Orientation, fixed: f64, lo: f64, hi: f64) -> OrthoSegment {
        OrthoSegment { orientation: o, fixed, span: Interval::new(lo, hi), owner: SegmentOwner::Dummy }
    }

    #[test]
    fn perpendicular_hit_and_miss() {
        let v = seg(Orientation::Vertical, 2.0, 0.0, 4.0);
        let h = seg(Orientation::Horizontal, 1.0, 0.0, 5.0);
        assert_eq!(segment_intersection(&v, &h), SegmentIntersection::Point(Point::new(2.0, 1.0)));
        let far = seg(Orientation::Horizontal, 9.0, 0.0, 5.0);
        assert_eq!(segment_intersection(&v, &far), SegmentIntersection::None);
    }

    #[test]
    fn collinear_overlap() {
        let a = seg(Orientation::Horizontal, 3.0, 0.0, 4.0);
        let b = seg(Orientation::Horizontal, 3.0, 2.0, 8.0);
        assert_eq!(
            segment_intersection(&a, &b),
            SegmentIntersection::Overlap { orientation: Orientation::Horizontal, fixed: 3.0, span: Interval::new(2.0, 4.0) }
        );
    }

    #[test]
    fn empty_label_keeps_default_box() {
        let b = box_from_label("", &BoxSizing::default(), 0).unwrap();
        assert_eq!((b.width, b.height), (12.0, 38.0));
        assert_eq!((b.original_width, b.original_height), (12.0, 38.0));
    }

    #[test]
    fn label_widens_only_horizontally() {
        let b = box_from_label("AB", &BoxSizing::default(), 0).unwrap();
        assert!(b.width >= 16.0);
        assert_eq!(b.height, 38.0);
    }

    #[test]
    fn degree_widens_box_until_ports_fit() {
        let sizing = BoxSizing::default();
        let b = box_from_label("", &sizing, 10).unwrap();
        // Independent check: evenly spaced ports on each side with gap >= 18.
        let fits = |w: f64, h: f64| {
            let cap = |len: f64| {
                let mut p = 0usize;
                while len / (p as f64 + 2.0) >= 18.0 - 1e-12 {
                    p += 1;
                }
                p
            };
            2 * cap(w) + 2 * cap(h)
        };
        assert!(fits(b.width, b.height) >= 10);
        assert_eq!(b.height, 38.0);
        assert_eq!(b.width, 90.0);
        // Nothing narrower would do.
        assert!(fits(b.width - 1.0, b.height) < 10);
    }

    #[test]
    fn rejects_non_positive_base() {
        let sizing = BoxSizing { base_width: 0.0, ..BoxSizing::default() };
        assert!(box_from_label("x", &sizing, 0).is_err());
    }

    fn arb_seg() -> impl Strategy<Value = OrthoSegment> {
        (any::<bool>(), -10i32..10, -10i32..10, -10i32..10).prop_map(|(h, f, a, b)| {
            let o = if h { Orientation::Horizontal } else { Orientation::Vertical };
            seg(o, f as f64, a as f64, b as f64)
        })
    }

    proptest! {
        #[test]
        fn intersection_is_symmetric(a in arb_seg(), b in arb_seg()) {
            prop_assert_eq!(segment_intersection(&a, &b), segment_intersection(&b, &a));
        }

        #[test]
        fn label_box_never_below_base(label in "[a-z]{0,12}", degree in 0usize..40) {
            let b = box_from_label(&label, &BoxSizing::default(), degree).unwrap();
            prop_assert!(b.width >= b.original_width && b.height >= b.original_height);
            prop_assert!(b.width >= 12.0 && b.height == 38.0);
        }
    }
}
