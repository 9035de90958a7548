//! Reference implementations used as oracles by the integration tests.
//!
//! Everything here is deliberately naive: all-pairs scans, eager list
//! manipulation, no indexing. Only the shared geometric predicates come
//! from the library.

#![allow(dead_code)]

use gridlabel::geometry::{
    point_in_rect, rect_overlaps, Corner, EPS, LabelBox, LabelConfig, LabelId, MapBounds, Point, PointFeature,
    PointId,
};
use gridlabel::grid::CandidateLabelSet;
use gridlabel::matching::{AssignedPair, Level};
use rand_core::Rng;
use rand_pcg::Pcg64;

/// Grid cells by direct enumeration, then all-pairs point conflict removal.
pub fn naive_grid(bounds: &MapBounds, cfg: &LabelConfig, points: &[PointFeature]) -> Vec<LabelBox> {
    let mut cells = Vec::new();
    let mut r = 0usize;
    loop {
        let bottom = bounds.y_min + cfg.ssd + r as f64 * (cfg.h + cfg.lsd);
        if bottom + cfg.h > bounds.y_max - cfg.ssd {
            break;
        }
        let mut c = 0usize;
        loop {
            let left = bounds.x_min + cfg.ssd + c as f64 * (cfg.w + cfg.lsd);
            if left + cfg.w > bounds.x_max - cfg.ssd {
                break;
            }
            let cell = LabelBox::from_corner(LabelId(0), left, bottom, cfg.w, cfg.h);
            if !points.iter().any(|p| point_in_rect(p, &cell, cfg.lsd)) {
                cells.push(cell);
            }
            c += 1;
        }
        r += 1;
    }
    for (i, cell) in cells.iter_mut().enumerate() {
        cell.id = LabelId(i as u32 + 1);
    }
    cells
}

/// Literal sweep: every check is an all-pairs scan over the current state.
pub fn naive_sweep(
    labels: &[LabelBox],
    cfg: &LabelConfig,
    bounds: &MapBounds,
    points: &[PointFeature],
) -> Vec<LabelBox> {
    let mut labels = labels.to_vec();
    let mut by_id: Vec<&PointFeature> = points.iter().collect();
    by_id.sort_by_key(|p| p.id);
    for p in by_id {
        let mut best: Option<usize> = None;
        for (i, l) in labels.iter().enumerate() {
            let x_d = p.x - l.right();
            let in_band = l.bottom() <= p.y && p.y <= l.top();
            if in_band && cfg.lsd < x_d && x_d < cfg.lsd + cfg.w {
                best = match best {
                    Some(b) if labels[b].right() >= l.right() => Some(b),
                    _ => Some(i),
                };
            }
        }
        let Some(i) = best else { continue };
        let moved = LabelBox {
            cx: p.x - cfg.lsd - cfg.w / 2.0,
            ..labels[i]
        };
        if moved.cx <= labels[i].cx {
            continue;
        }
        let margin = moved.left() - bounds.x_min >= cfg.ssd - EPS
            && bounds.x_max - moved.right() >= cfg.ssd - EPS
            && moved.bottom() - bounds.y_min >= cfg.ssd - EPS
            && bounds.y_max - moved.top() >= cfg.ssd - EPS;
        let clear_labels = labels
            .iter()
            .enumerate()
            .all(|(j, o)| j == i || !rect_overlaps(&moved, o, cfg.lsd));
        let clear_points = points.iter().all(|q| {
            if q.id == p.id {
                !point_in_rect(q, &moved, 0.0)
            } else {
                !point_in_rect(q, &moved, cfg.lsd)
            }
        });
        if margin && clear_labels && clear_points {
            labels[i] = moved;
        }
    }
    labels
}

/// Squared distance to the nearest corner, first corner wins ties.
pub fn corner_dist(p: &PointFeature, l: &LabelBox) -> (f64, Corner) {
    let corners = [
        (Corner::BottomLeft, l.left(), l.bottom()),
        (Corner::BottomRight, l.right(), l.bottom()),
        (Corner::TopLeft, l.left(), l.top()),
        (Corner::TopRight, l.right(), l.top()),
    ];
    let mut best = (f64::INFINITY, Corner::BottomLeft);
    for (c, x, y) in corners {
        let d = (p.x - x) * (p.x - x) + (p.y - y) * (p.y - y);
        if d < best.0 {
            best = (d, c);
        }
    }
    best
}

#[derive(Debug, Clone, PartialEq)]
pub struct OracleResult {
    pub pairs: Vec<(PointId, LabelId, Corner, Level)>,
    pub unassigned: Vec<PointId>,
}

/// Step-by-step closeness-level assignment with eager purging.
///
/// The matrix is a list of rows of optional label slots. Each grant blanks
/// that label in every row immediately; slots never shift.
pub fn brute_force_assign(points: &[PointFeature], labels: &[LabelBox], k: usize) -> OracleResult {
    let n = points.len();
    let dist: Vec<Vec<(f64, Corner)>> = points
        .iter()
        .map(|p| labels.iter().map(|l| corner_dist(p, l)).collect())
        .collect();

    let mut nlm: Vec<Vec<Option<usize>>> = (0..n)
        .map(|i| {
            let mut all: Vec<usize> = (0..labels.len()).collect();
            all.sort_by(|&a, &b| dist[i][a].0.total_cmp(&dist[i][b].0).then(a.cmp(&b)));
            all.truncate(k);
            all.into_iter().map(Some).collect()
        })
        .collect();

    let mut owner: Vec<Option<(usize, Level)>> = vec![None; n];
    let mut used = vec![false; labels.len()];

    for level in 1..=k {
        let mut bids: Vec<(usize, usize)> = Vec::new();
        for i in 0..n {
            if owner[i].is_none() {
                if let Some(j) = nlm[i][level - 1] {
                    bids.push((j, i));
                }
            }
        }
        let mut wanted: Vec<usize> = bids.iter().map(|&(j, _)| j).collect();
        wanted.sort_unstable();
        wanted.dedup();
        for j in wanted {
            if used[j] {
                continue;
            }
            let winner = bids
                .iter()
                .filter(|&&(bj, _)| bj == j)
                .map(|&(_, i)| i)
                .min_by(|&a, &b| {
                    dist[a][j]
                        .0
                        .total_cmp(&dist[b][j].0)
                        .then(points[a].id.cmp(&points[b].id))
                })
                .unwrap();
            owner[winner] = Some((j, Level::Rank(level as u32)));
            used[j] = true;
            for row in nlm.iter_mut() {
                for slot in row.iter_mut() {
                    if *slot == Some(j) {
                        *slot = None;
                    }
                }
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by_key(|&i| points[i].id);
    let mut unassigned = Vec::new();
    for i in order {
        if owner[i].is_some() {
            continue;
        }
        let best = (0..labels.len())
            .filter(|&j| !used[j])
            .min_by(|&a, &b| dist[i][a].0.total_cmp(&dist[i][b].0).then(a.cmp(&b)));
        match best {
            Some(j) => {
                used[j] = true;
                owner[i] = Some((j, Level::Fallback));
            }
            None => unassigned.push(points[i].id),
        }
    }

    let mut pairs: Vec<(PointId, LabelId, Corner, Level)> = owner
        .iter()
        .enumerate()
        .filter_map(|(i, o)| o.map(|(j, level)| (points[i].id, labels[j].id, dist[i][j].1, level)))
        .collect();
    pairs.sort_by_key(|p| p.0);
    OracleResult { pairs, unassigned }
}

/// Tiny random configuration: up to 4 points, up to 6 labels placed freely
/// (not on a grid), and a random NLM depth.
pub fn micro_case(rng: &mut Pcg64) -> (Vec<PointFeature>, CandidateLabelSet, usize) {
    // coarse integer coordinates make distance ties common
    let mut coord = |span: u64| (rng.next_u64() % span) as f64 * 10.0;
    let m = 1 + (coord(6) / 10.0) as usize;
    let n = 1 + (coord(4) / 10.0) as usize;
    let cfg = LabelConfig {
        w: 20.0,
        h: 10.0,
        lsd: 0.0,
        ssd: 0.0,
        k: None,
    };
    let bounds = MapBounds::new(0.0, 200.0, 0.0, 200.0).unwrap();
    let labels: Vec<LabelBox> = (0..m)
        .map(|_| LabelBox::new(0, 10.0 + coord(18), 5.0 + coord(19), cfg.w, cfg.h))
        .collect();
    let points: Vec<PointFeature> = (0..n)
        .map(|i| point(i as u32 + 1, 5.0 + coord(19), 5.0 + coord(19)))
        .collect();
    let k = 1 + (coord(m as u64) / 10.0) as usize;
    let cls = CandidateLabelSet::from_labels(labels, cfg, bounds).unwrap();
    (points, cls, k)
}

pub fn pairs_of(assigned: &[AssignedPair]) -> Vec<(PointId, LabelId, Corner, Level)> {
    assigned.iter().map(|a| (a.point, a.label, a.corner, a.level)).collect()
}

/// Candidate count along one axis by unit-step scanning, independent of the
/// closed-form lattice.
pub fn enumerate_axis(extent: f64, size: f64, gap: f64, margin: f64) -> usize {
    let mut count = 0;
    let mut next_free = margin;
    let mut x = 0.0;
    while x + size <= extent {
        if x >= next_free && x + size <= extent - margin {
            count += 1;
            next_free = x + size + gap;
        }
        x += 1.0;
    }
    count
}

/// Label-label pairs closer than `lsd` on both axes and labels containing a
/// point (boundary included), by direct interval comparison. `tol` absorbs
/// rounding on separations that are exactly `lsd`.
pub fn count_conflicts(labels: &[LabelBox], lsd: f64, points: &[PointFeature], tol: f64) -> (usize, usize) {
    let span = |l: &LabelBox| (l.cx - l.w / 2.0, l.cx + l.w / 2.0, l.cy - l.h / 2.0, l.cy + l.h / 2.0);
    let mut overlaps = 0;
    let mut contains = 0;
    for (i, a) in labels.iter().enumerate() {
        let (ax0, ax1, ay0, ay1) = span(a);
        for b in &labels[i + 1..] {
            let (bx0, bx1, by0, by1) = span(b);
            let x_close = ax0 < bx1 + lsd - tol && bx0 < ax1 + lsd - tol;
            let y_close = ay0 < by1 + lsd - tol && by0 < ay1 + lsd - tol;
            if x_close && y_close {
                overlaps += 1;
            }
        }
        contains += points
            .iter()
            .filter(|p| ax0 <= p.x && p.x <= ax1 && ay0 <= p.y && p.y <= ay1)
            .count();
    }
    (overlaps, contains)
}

pub fn point(id: u32, x: f64, y: f64) -> PointFeature {
    PointFeature::new(id, x, y)
}

pub fn pt(x: f64, y: f64) -> Point {
    Point { x, y }
}
