//! 2-D primitives shared by every stage: points, map bounds, label boxes and
//! the spacing predicates that define "conflict".
//!
//! All comparisons are exact floating-point comparisons. Grid coordinates are
//! produced by closed-form arithmetic, so no epsilon is applied anywhere.

use std::fmt;

use crate::error::{Error, Result};

/// One-based identifier of a point feature within an instance.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct PointId(pub u32);

/// One-based identifier of a candidate label within a candidate set.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct LabelId(pub u32);

macro_rules! one_based_id {
    ($ty:ident) => {
        impl $ty {
            /// Zero-based position in the owning list.
            #[inline]
            pub fn index(self) -> usize {
                self.0 as usize - 1
            }

            #[inline]
            pub fn from_index(index: usize) -> Self {
                $ty(index as u32 + 1)
            }
        }

        impl fmt::Display for $ty {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                write!(f, "{}", self.0)
            }
        }
    };
}

one_based_id!(PointId);
one_based_id!(LabelId);

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub const fn new(x: f64, y: f64) -> Self {
        Point { x, y }
    }

    /// Squared Euclidean distance.
    #[inline]
    pub fn dist2(self, other: Point) -> f64 {
        let dx = self.x - other.x;
        let dy = self.y - other.y;
        dx * dx + dy * dy
    }
}

/// A point feature (node) that needs a label.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PointFeature {
    pub id: PointId,
    pub x: f64,
    pub y: f64,
}

impl PointFeature {
    pub fn new(id: u32, x: f64, y: f64) -> Self {
        PointFeature {
            id: PointId(id),
            x,
            y,
        }
    }

    #[inline]
    pub fn pos(&self) -> Point {
        Point::new(self.x, self.y)
    }
}

impl From<&PointFeature> for Point {
    fn from(p: &PointFeature) -> Self {
        p.pos()
    }
}

impl From<PointFeature> for Point {
    fn from(p: PointFeature) -> Self {
        p.pos()
    }
}

/// The map (graph) boundary.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MapBounds {
    pub x_min: f64,
    pub x_max: f64,
    pub y_min: f64,
    pub y_max: f64,
}

impl MapBounds {
    pub fn new(x_min: f64, x_max: f64, y_min: f64, y_max: f64) -> Result<Self> {
        let all_finite = [x_min, x_max, y_min, y_max].iter().all(|v| v.is_finite());
        if !all_finite || !(x_min < x_max) || !(y_min < y_max) {
            return Err(Error::Validation(format!(
                "bounds ({x_min},{x_max})x({y_min},{y_max}) must be finite with min < max"
            )));
        }
        Ok(MapBounds {
            x_min,
            x_max,
            y_min,
            y_max,
        })
    }

    pub fn width(&self) -> f64 {
        self.x_max - self.x_min
    }

    pub fn height(&self) -> f64 {
        self.y_max - self.y_min
    }

    pub fn area(&self) -> f64 {
        self.width() * self.height()
    }

    /// Open-rectangle membership.
    pub fn contains_strict(&self, x: f64, y: f64) -> bool {
        self.x_min < x && x < self.x_max && self.y_min < y && y < self.y_max
    }
}

impl Default for MapBounds {
    /// The 3000 x 4000 experimental region.
    fn default() -> Self {
        MapBounds {
            x_min: 0.0,
            x_max: 3000.0,
            y_min: 0.0,
            y_max: 4000.0,
        }
    }
}

/// Common label geometry and spacing for one run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LabelConfig {
    /// Label width.
    pub w: f64,
    /// Label height.
    pub h: f64,
    /// Label safe distance: minimum whitespace between two labels.
    pub lsd: f64,
    /// Screen safe distance: minimum whitespace between a label and the bounds.
    pub ssd: f64,
    /// Depth of the nearest-label matrix. `None` selects [`LabelConfig::default_k`].
    pub k: Option<usize>,
}

impl Default for LabelConfig {
    fn default() -> Self {
        LabelConfig {
            w: 150.0,
            h: 100.0,
            lsd: 10.0,
            ssd: 10.0,
            k: None,
        }
    }
}

impl LabelConfig {
    pub fn with_size(self, w: f64, h: f64) -> Self {
        LabelConfig { w, h, ..self }
    }

    pub fn validate(&self, bounds: &MapBounds) -> Result<()> {
        let finite = [self.w, self.h, self.lsd, self.ssd].iter().all(|v| v.is_finite());
        if !finite || !(self.w > 0.0) || !(self.h > 0.0) {
            return Err(Error::Validation(format!(
                "label size {}x{} must be positive",
                self.w, self.h
            )));
        }
        if !(self.lsd >= 0.0) || !(self.ssd >= 0.0) {
            return Err(Error::Validation(format!(
                "lsd ({}) and ssd ({}) must be non-negative",
                self.lsd, self.ssd
            )));
        }
        if self.k == Some(0) {
            return Err(Error::Validation("k must be at least 1".into()));
        }
        if self.w + 2.0 * self.ssd > bounds.width() || self.h + 2.0 * self.ssd > bounds.height() {
            return Err(Error::Validation(format!(
                "a {}x{} label with ssd {} does not fit in {}x{} bounds",
                self.w,
                self.h,
                self.ssd,
                bounds.width(),
                bounds.height()
            )));
        }
        Ok(())
    }

    /// `min(m, max(8, ceil(m / 10)))`.
    pub fn default_k(m: usize) -> usize {
        m.min(8.max(m.div_ceil(10)))
    }

    /// Effective NLM depth for a candidate set of size `m`, clamped to `1..=m`.
    pub fn resolve_k(&self, m: usize) -> usize {
        let k = self.k.unwrap_or_else(|| Self::default_k(m));
        k.min(m).max(1)
    }
}

/// Label corners, in tie-break order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Corner {
    BottomLeft = 0,
    BottomRight = 1,
    TopLeft = 2,
    TopRight = 3,
}

impl Corner {
    pub const ALL: [Corner; 4] = [
        Corner::BottomLeft,
        Corner::BottomRight,
        Corner::TopLeft,
        Corner::TopRight,
    ];

    pub fn from_index(i: usize) -> Corner {
        Corner::ALL[i]
    }

    pub fn name(self) -> &'static str {
        match self {
            Corner::BottomLeft => "bl",
            Corner::BottomRight => "br",
            Corner::TopLeft => "tl",
            Corner::TopRight => "tr",
        }
    }
}

/// An axis-parallel label rectangle, stored by its center.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LabelBox {
    pub id: LabelId,
    pub cx: f64,
    pub cy: f64,
    pub w: f64,
    pub h: f64,
}

impl LabelBox {
    pub fn new(id: u32, cx: f64, cy: f64, w: f64, h: f64) -> Self {
        LabelBox {
            id: LabelId(id),
            cx,
            cy,
            w,
            h,
        }
    }

    /// Box whose bottom-left corner is at `(left, bottom)`.
    pub fn from_corner(id: LabelId, left: f64, bottom: f64, w: f64, h: f64) -> Self {
        LabelBox {
            id,
            cx: left + w / 2.0,
            cy: bottom + h / 2.0,
            w,
            h,
        }
    }

    #[inline]
    pub fn left(&self) -> f64 {
        self.cx - self.w / 2.0
    }

    #[inline]
    pub fn right(&self) -> f64 {
        self.cx + self.w / 2.0
    }

    #[inline]
    pub fn bottom(&self) -> f64 {
        self.cy - self.h / 2.0
    }

    #[inline]
    pub fn top(&self) -> f64 {
        self.cy + self.h / 2.0
    }

    pub fn area(&self) -> f64 {
        self.w * self.h
    }

    #[inline]
    pub fn corner(&self, c: Corner) -> Point {
        match c {
            Corner::BottomLeft => Point::new(self.left(), self.bottom()),
            Corner::BottomRight => Point::new(self.right(), self.bottom()),
            Corner::TopLeft => Point::new(self.left(), self.top()),
            Corner::TopRight => Point::new(self.right(), self.top()),
        }
    }

    pub fn corners(&self) -> [Point; 4] {
        Corner::ALL.map(|c| self.corner(c))
    }

    /// Nearest corner to `p` and its squared distance; ties go to the earlier corner.
    pub fn nearest_corner(&self, p: Point) -> (Corner, f64) {
        let mut best = (Corner::BottomLeft, p.dist2(self.corner(Corner::BottomLeft)));
        for c in &Corner::ALL[1..] {
            let d = p.dist2(self.corner(*c));
            if d < best.1 {
                best = (*c, d);
            }
        }
        best
    }

    /// Every edge at least `margin` (within [`EPS`]) inside the bounds.
    pub fn keeps_margin(&self, bounds: &MapBounds, margin: f64) -> bool {
        self.left() >= bounds.x_min + margin - EPS
            && self.right() <= bounds.x_max - margin + EPS
            && self.bottom() >= bounds.y_min + margin - EPS
            && self.top() <= bounds.y_max - margin + EPS
    }
}

/// Absolute slack, in map units, for separations that are exact in real
/// arithmetic but come out a few ulps short after rounding (adjacent grid
/// cells sit exactly `lsd` apart).
pub const EPS: f64 = 1e-9;

/// True iff the two boxes are closer than `gap` on both axes, i.e. inflating
/// each by `gap / 2` makes them intersect with positive area. A separation of
/// exactly `gap` (within [`EPS`]) is legal.
#[inline]
pub fn rect_overlaps(a: &LabelBox, b: &LabelBox, gap: f64) -> bool {
    let sep_x = (b.left() - a.right()).max(a.left() - b.right());
    let sep_y = (b.bottom() - a.top()).max(a.bottom() - b.top());
    sep_x < gap - EPS && sep_y < gap - EPS
}

/// True iff `p` lies in `b` inflated by `gap` on every side, boundary included.
#[inline]
pub fn point_in_rect(p: impl Into<Point>, b: &LabelBox, gap: f64) -> bool {
    let p = p.into();
    b.left() - gap <= p.x && p.x <= b.right() + gap && b.bottom() - gap <= p.y && p.y <= b.top() + gap
}

/// Strict center-in-bounds constraint: the box lies in the open bounds rectangle.
#[inline]
pub fn within_bounds(b: &LabelBox, bounds: &MapBounds) -> bool {
    bounds.x_min + b.w / 2.0 < b.cx
        && b.cx < bounds.x_max - b.w / 2.0
        && bounds.y_min + b.h / 2.0 < b.cy
        && b.cy < bounds.y_max - b.h / 2.0
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn bx(cx: f64, cy: f64) -> LabelBox {
        LabelBox::new(1, cx, cy, 150.0, 100.0)
    }

    #[test]
    fn overlap_examples() {
        assert!(!rect_overlaps(&bx(0.0, 0.0), &bx(150.0, 0.0), 0.0));
        assert!(rect_overlaps(&bx(0.0, 0.0), &bx(149.0, 0.0), 0.0));
        assert!(rect_overlaps(&bx(0.0, 0.0), &bx(155.0, 0.0), 10.0));
        // exactly at the gap
        assert!(!rect_overlaps(&bx(0.0, 0.0), &bx(160.0, 0.0), 10.0));
    }

    /// Brute-force oracle: sample a lattice over the union and look for a point
    /// strictly inside both inflated boxes.
    fn sampled_overlap(a: &LabelBox, b: &LabelBox, gap: f64) -> bool {
        let g = gap / 2.0;
        let inside = |r: &LabelBox, x: f64, y: f64| {
            r.left() - g < x && x < r.right() + g && r.bottom() - g < y && y < r.top() + g
        };
        let x0 = a.left().min(b.left()) - g;
        let x1 = a.right().max(b.right()) + g;
        let y0 = a.bottom().min(b.bottom()) - g;
        let y1 = a.top().max(b.top()) + g;
        let steps = 400;
        (0..=steps).any(|i| {
            let x = x0 + (x1 - x0) * i as f64 / steps as f64;
            (0..=steps).any(|j| {
                let y = y0 + (y1 - y0) * j as f64 / steps as f64;
                inside(a, x, y) && inside(b, x, y)
            })
        })
    }

    #[test]
    fn overlap_matches_point_sampling() {
        let a = bx(0.0, 0.0);
        assert!(sampled_overlap(&a, &bx(155.0, 0.0), 10.0));
        assert!(!sampled_overlap(&a, &bx(170.0, 0.0), 10.0));
        for (cx, cy, gap) in [(155.0, 0.0, 10.0), (170.0, 0.0, 10.0), (100.0, 107.0, 10.0), (0.0, 120.0, 10.0)] {
            let b = bx(cx, cy);
            assert_eq!(rect_overlaps(&a, &b, gap), sampled_overlap(&a, &b, gap), "{cx},{cy},{gap}");
        }
    }

    #[test]
    fn point_in_rect_examples() {
        let b = bx(0.0, 0.0);
        assert!(point_in_rect(Point::new(0.0, 0.0), &b, 0.0));
        assert!(!point_in_rect(Point::new(100.0, 0.0), &b, 0.0));
        assert!(point_in_rect(Point::new(80.0, 0.0), &b, 10.0));
        // closed boundary
        assert!(point_in_rect(Point::new(85.0, 60.0), &b, 10.0));
        assert!(!point_in_rect(Point::new(85.0001, 0.0), &b, 10.0));
    }

    #[test]
    fn within_bounds_examples() {
        let bounds = MapBounds::default();
        assert!(!within_bounds(&bx(75.0, 50.0), &bounds));
        assert!(within_bounds(&bx(76.0, 51.0), &bounds));
        assert!(!within_bounds(&bx(2925.0, 3950.0), &bounds));
        assert!(within_bounds(&bx(2924.0, 3949.0), &bounds));
    }

    #[test]
    fn nearest_corner_tie_prefers_corner_order() {
        let b = bx(75.0, 50.0);
        assert_eq!(b.nearest_corner(Point::new(200.0, 50.0)), (Corner::BottomRight, 5000.0));
        assert_eq!(b.nearest_corner(Point::new(-10.0, 50.0)), (Corner::BottomLeft, 2600.0));
        assert_eq!(b.nearest_corner(Point::new(0.0, 0.0)), (Corner::BottomLeft, 0.0));
    }

    #[test]
    fn config_validation() {
        let bounds = MapBounds::default();
        assert!(LabelConfig::default().validate(&bounds).is_ok());
        let bad = LabelConfig { w: 0.0, ..Default::default() };
        assert!(bad.validate(&bounds).is_err());
        let bad = LabelConfig { lsd: -1.0, ..Default::default() };
        assert!(bad.validate(&bounds).is_err());
        let bad = LabelConfig { k: Some(0), ..Default::default() };
        assert!(bad.validate(&bounds).is_err());
        let tight = MapBounds::new(0.0, 170.0, 0.0, 120.0).unwrap();
        assert!(LabelConfig::default().validate(&tight).is_ok());
        let too_small = MapBounds::new(0.0, 169.0, 0.0, 120.0).unwrap();
        assert!(LabelConfig::default().validate(&too_small).is_err());
        assert!(MapBounds::new(1.0, 1.0, 0.0, 2.0).is_err());
    }

    #[test]
    fn default_k_formula() {
        assert_eq!(LabelConfig::default_k(3), 3);
        assert_eq!(LabelConfig::default_k(8), 8);
        assert_eq!(LabelConfig::default_k(79), 8);
        assert_eq!(LabelConfig::default_k(81), 9);
        assert_eq!(LabelConfig::default_k(648), 65);
    }

    fn arb_box() -> impl Strategy<Value = LabelBox> {
        (-500i32..500, -500i32..500, 1i32..200, 1i32..200)
            .prop_map(|(x, y, w, h)| LabelBox::new(1, x as f64, y as f64, w as f64, h as f64))
    }

    proptest! {
        #[test]
        fn overlap_is_symmetric(a in arb_box(), b in arb_box(), g in 0i32..50) {
            let g = g as f64;
            prop_assert_eq!(rect_overlaps(&a, &b, g), rect_overlaps(&b, &a, g));
        }

        #[test]
        fn overlap_monotone_in_gap(a in arb_box(), b in arb_box(), g1 in 0i32..50, extra in 1i32..50) {
            let g1 = g1 as f64;
            if rect_overlaps(&a, &b, g1) {
                prop_assert!(rect_overlaps(&a, &b, g1 + extra as f64));
            }
        }

        #[test]
        fn within_bounds_fails_once_inflated(
            cx in 0i32..3000, cy in 0i32..4000, w in 1i32..400, h in 1i32..400, eps in 1u32..1000
        ) {
            let bounds = MapBounds::default();
            let b = LabelBox::new(1, cx as f64, cy as f64, w as f64, h as f64);
            if !within_bounds(&b, &bounds) {
                let eps = eps as f64 / 100.0;
                let grown = LabelBox { w: b.w + eps, h: b.h + eps, ..b };
                prop_assert!(!within_bounds(&grown, &bounds));
            }
        }
    }
}
