//! Leader lines and placement quality.
//!
//! A leader joins a point feature to the nearest corner of its assigned label.
//! Quality scoring only measures leader crossings; nothing here tries to
//! avoid them.

use crate::error::{Error, Result};
use crate::exec::{self, Exec};
use crate::geometry::{Corner, LabelBox, LabelId, Point, PointFeature, PointId};
use crate::grid::CandidateLabelSet;
use crate::matching::Assignment;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LeaderSegment {
    pub point: PointId,
    pub label: LabelId,
    pub corner: Corner,
    pub from: Point,
    pub to: Point,
    /// Euclidean length in map units.
    pub length: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct QualityReport {
    pub total_leader_length: f64,
    pub max_leader_length: f64,
    /// (leader, placed label other than its own) pairs where the leader enters the label interior.
    pub leader_label_crossings: usize,
    /// Leader pairs that cross at a single interior point of both.
    pub leader_leader_crossings: usize,
    pub unlabeled: usize,
}

/// Index points by id so callers may pass them in any order.
pub(crate) fn index_by_id(points: &[PointFeature]) -> Vec<Option<usize>> {
    let max = points.iter().map(|p| p.id.0 as usize).max().unwrap_or(0);
    let mut slots = vec![None; max];
    for (i, p) in points.iter().enumerate() {
        if p.id.0 > 0 {
            slots[p.id.index()] = Some(i);
        }
    }
    slots
}

pub fn build_leaders(
    assignment: &Assignment,
    cls: &CandidateLabelSet,
    points: &[PointFeature],
) -> Result<Vec<LeaderSegment>> {
    let by_id = index_by_id(points);
    assignment
        .pairs
        .iter()
        .map(|pair| {
            let label = cls.label(pair.label).ok_or_else(|| {
                Error::InconsistentScene(format!("label {} is not in the candidate set", pair.label))
            })?;
            let point = by_id
                .get(pair.point.index())
                .copied()
                .flatten()
                .map(|i| &points[i])
                .ok_or_else(|| {
                    Error::InconsistentScene(format!("point {} is not in the instance", pair.point))
                })?;
            let from = point.pos();
            let to = label.corner(pair.corner);
            Ok(LeaderSegment {
                point: pair.point,
                label: pair.label,
                corner: pair.corner,
                from,
                to,
                length: from.dist2(to).sqrt(),
            })
        })
        .collect()
}

#[inline]
fn cross(o: Point, a: Point, b: Point) -> f64 {
    (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x)
}

/// Proper crossing: the segments meet at one point interior to both.
pub fn segments_cross(a0: Point, a1: Point, b0: Point, b1: Point) -> bool {
    let d1 = cross(b0, b1, a0);
    let d2 = cross(b0, b1, a1);
    let d3 = cross(a0, a1, b0);
    let d4 = cross(a0, a1, b1);
    ((d1 > 0.0 && d2 < 0.0) || (d1 < 0.0 && d2 > 0.0))
        && ((d3 > 0.0 && d4 < 0.0) || (d3 < 0.0 && d4 > 0.0))
}

/// True iff the segment passes through the open interior of `b`.
///
/// Clips the segment to the closed box (Liang-Barsky); the clipped piece
/// must have positive length and its midpoint must be strictly inside.
/// Touching an edge or a corner, or running along an edge, does not count.
pub fn segment_enters_box(p0: Point, p1: Point, b: &LabelBox) -> bool {
    let (dx, dy) = (p1.x - p0.x, p1.y - p0.y);
    let mut t0 = 0.0f64;
    let mut t1 = 1.0f64;
    let edges = [
        (-dx, p0.x - b.left()),
        (dx, b.right() - p0.x),
        (-dy, p0.y - b.bottom()),
        (dy, b.top() - p0.y),
    ];
    for (p, q) in edges {
        if p == 0.0 {
            if q < 0.0 {
                return false;
            }
        } else {
            let t = q / p;
            if p < 0.0 {
                t0 = t0.max(t);
            } else {
                t1 = t1.min(t);
            }
        }
    }
    if !(t0 < t1) {
        return false;
    }
    let tm = 0.5 * (t0 + t1);
    let mid = Point::new(p0.x + tm * dx, p0.y + tm * dy);
    b.left() < mid.x && mid.x < b.right() && b.bottom() < mid.y && mid.y < b.top()
}

pub fn score_quality(
    leaders: &[LeaderSegment],
    cls: &CandidateLabelSet,
    assignment: &Assignment,
) -> QualityReport {
    score_quality_with(leaders, cls, assignment, Exec::default())
}

/// Crossings are counted against the placed labels only; unused candidates
/// are erased from the final map.
pub fn score_quality_with(
    leaders: &[LeaderSegment],
    cls: &CandidateLabelSet,
    assignment: &Assignment,
    exec: Exec,
) -> QualityReport {
    let placed: Vec<&LabelBox> = assignment
        .pairs
        .iter()
        .filter_map(|p| cls.label(p.label))
        .collect();

    let per_leader: Vec<(usize, usize)> = exec::map_range(exec, leaders.len(), |i| {
        let l = &leaders[i];
        let label_hits = placed
            .iter()
            .filter(|b| b.id != l.label && segment_enters_box(l.from, l.to, b))
            .count();
        let leader_hits = leaders[i + 1..]
            .iter()
            .filter(|o| segments_cross(l.from, l.to, o.from, o.to))
            .count();
        (label_hits, leader_hits)
    });

    QualityReport {
        total_leader_length: leaders.iter().map(|l| l.length).sum(),
        max_leader_length: leaders.iter().map(|l| l.length).fold(0.0, f64::max),
        leader_label_crossings: per_leader.iter().map(|c| c.0).sum(),
        leader_leader_crossings: per_leader.iter().map(|c| c.1).sum(),
        unlabeled: assignment.unassigned.len(),
    }
}
