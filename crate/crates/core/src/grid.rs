//! Conflict-free candidate label set.
//!
//! Labels are laid out row by row from the bottom-left corner of the map,
//! separated by the label safe distance and kept the screen safe distance
//! away from the bounds. Cells that would sit within `lsd` of a point feature
//! are dropped. The sweep phase then slides individual labels to the right so
//! that they hug a nearby point from the left at exactly `lsd`.

use std::cmp::Ordering;

use crate::error::{Error, Result};
use crate::exec::{self, Exec};
use crate::geometry::{
    point_in_rect, rect_overlaps, LabelBox, LabelConfig, LabelId, MapBounds, PointFeature,
};

/// A horizontal band of labels sharing one center y, sorted left to right.
#[derive(Debug, Clone, PartialEq)]
struct Row {
    cy: f64,
    /// Range into `CandidateLabelSet::order`.
    start: u32,
    end: u32,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CandidateLabelSet {
    labels: Vec<LabelBox>,
    /// Label indices sorted by (cy, cx); each row is a contiguous run.
    order: Vec<u32>,
    rows: Vec<Row>,
    config: LabelConfig,
    bounds: MapBounds,
}

impl CandidateLabelSet {
    /// Wrap an explicit list of boxes. Boxes are renumbered `1..=m` in the given
    /// order and take their size from `config`.
    pub fn from_labels(
        labels: impl IntoIterator<Item = LabelBox>,
        config: LabelConfig,
        bounds: MapBounds,
    ) -> Result<Self> {
        config.validate(&bounds)?;
        let labels: Vec<LabelBox> = labels
            .into_iter()
            .enumerate()
            .map(|(i, b)| LabelBox {
                id: LabelId::from_index(i),
                w: config.w,
                h: config.h,
                ..b
            })
            .collect();
        if labels.is_empty() {
            return Err(Error::EmptyGrid("no labels supplied".into()));
        }
        let mut order: Vec<u32> = (0..labels.len() as u32).collect();
        order.sort_by(|&a, &b| {
            let (a, b) = (&labels[a as usize], &labels[b as usize]);
            a.cy.total_cmp(&b.cy)
                .then(a.cx.total_cmp(&b.cx))
                .then(a.id.cmp(&b.id))
        });
        let rows = index_rows(&labels, &order);
        Ok(CandidateLabelSet {
            labels,
            order,
            rows,
            config,
            bounds,
        })
    }

    pub fn labels(&self) -> &[LabelBox] {
        &self.labels
    }

    pub fn label(&self, id: LabelId) -> Option<&LabelBox> {
        self.labels.get(id.index())
    }

    pub fn m(&self) -> usize {
        self.labels.len()
    }

    pub fn config(&self) -> &LabelConfig {
        &self.config
    }

    pub fn bounds(&self) -> &MapBounds {
        &self.bounds
    }

    /// Rows whose center y lies in the open interval `(lo, hi)`.
    fn rows_between(&self, lo: f64, hi: f64) -> &[Row] {
        let start = self.rows.partition_point(|r| r.cy <= lo);
        let end = self.rows.partition_point(|r| r.cy < hi);
        &self.rows[start..end.max(start)]
    }

    fn members(&self, row: &Row) -> &[u32] {
        &self.order[row.start as usize..row.end as usize]
    }

    fn overlaps_any(&self, candidate: &LabelBox) -> bool {
        let LabelConfig { w, h, lsd, .. } = self.config;
        let reach = h + lsd;
        for row in self.rows_between(candidate.cy - reach, candidate.cy + reach) {
            let members = self.members(row);
            let first = members.partition_point(|&i| self.labels[i as usize].right() < candidate.left() - lsd - w);
            for &i in &members[first..] {
                let other = &self.labels[i as usize];
                if other.left() > candidate.right() + lsd {
                    break;
                }
                if other.id != candidate.id && rect_overlaps(candidate, other, lsd) {
                    return true;
                }
            }
        }
        false
    }
}

fn index_rows(labels: &[LabelBox], order: &[u32]) -> Vec<Row> {
    let mut rows: Vec<Row> = Vec::new();
    for (pos, &i) in order.iter().enumerate() {
        let cy = labels[i as usize].cy;
        match rows.last_mut() {
            Some(row) if row.cy == cy => row.end = pos as u32 + 1,
            _ => rows.push(Row {
                cy,
                start: pos as u32,
                end: pos as u32 + 1,
            }),
        }
    }
    rows
}

/// Point features bucketed on a uniform lattice, for box queries.
struct PointGrid<'a> {
    points: &'a [PointFeature],
    x0: f64,
    y0: f64,
    cw: f64,
    ch: f64,
    cols: usize,
    rows: usize,
    /// CSR offsets into `items`, one slot per cell plus a sentinel.
    start: Vec<u32>,
    items: Vec<u32>,
}

impl<'a> PointGrid<'a> {
    fn new(points: &'a [PointFeature], bounds: &MapBounds, cw: f64, ch: f64) -> Self {
        let cols = ((bounds.width() / cw).ceil() as usize).clamp(1, 1 << 12);
        let rows = ((bounds.height() / ch).ceil() as usize).clamp(1, 1 << 12);
        let mut grid = PointGrid {
            points,
            x0: bounds.x_min,
            y0: bounds.y_min,
            cw,
            ch,
            cols,
            rows,
            start: vec![0; cols * rows + 1],
            items: vec![0; points.len()],
        };
        let cells: Vec<usize> = points.iter().map(|p| grid.cell_of(p.x, p.y)).collect();
        for &c in &cells {
            grid.start[c + 1] += 1;
        }
        for c in 0..cols * rows {
            grid.start[c + 1] += grid.start[c];
        }
        let mut fill = grid.start.clone();
        for (i, &c) in cells.iter().enumerate() {
            grid.items[fill[c] as usize] = i as u32;
            fill[c] += 1;
        }
        grid
    }

    // Monotone in `v`, so a query window maps onto a contiguous cell range.
    fn axis(v: f64, origin: f64, size: f64, count: usize) -> usize {
        let k = ((v - origin) / size).floor();
        if k <= 0.0 {
            0
        } else {
            (k as usize).min(count - 1)
        }
    }

    fn cell_of(&self, x: f64, y: f64) -> usize {
        Self::axis(y, self.y0, self.ch, self.rows) * self.cols + Self::axis(x, self.x0, self.cw, self.cols)
    }

    /// Any point (other than `skip`) inside `b` inflated by `gap`.
    fn any_within(&self, b: &LabelBox, gap: f64, skip: Option<usize>) -> bool {
        let c0 = Self::axis(b.left() - gap, self.x0, self.cw, self.cols);
        let c1 = Self::axis(b.right() + gap, self.x0, self.cw, self.cols);
        let r0 = Self::axis(b.bottom() - gap, self.y0, self.ch, self.rows);
        let r1 = Self::axis(b.top() + gap, self.y0, self.ch, self.rows);
        for r in r0..=r1 {
            let lo = self.start[r * self.cols + c0] as usize;
            let hi = self.start[r * self.cols + c1 + 1] as usize;
            for &i in &self.items[lo..hi] {
                if Some(i as usize) != skip && point_in_rect(self.points[i as usize], b, gap) {
                    return true;
                }
            }
        }
        false
    }
}

/// Left edges of the columns (or bottoms of the rows) that fit in `[lo, hi]`.
fn lattice(lo: f64, hi: f64, size: f64, pitch: f64) -> Vec<f64> {
    let mut out = Vec::with_capacity(((hi - lo) / pitch).max(0.0) as usize + 2);
    let mut c = 0usize;
    loop {
        let start = lo + c as f64 * pitch;
        if start + size > hi {
            break;
        }
        out.push(start);
        c += 1;
    }
    out
}

/// Lattice indices whose cell might lie within `gap` of `v`; callers confirm
/// with the exact predicate. The epsilon only widens the range.
fn near(v: f64, lattice: &[f64], size: f64, gap: f64, pitch: f64) -> std::ops::Range<usize> {
    const SLACK: f64 = 1e-9;
    let origin = lattice[0];
    let lo = ((v - origin - size - gap) / pitch - SLACK).ceil();
    let hi = ((v - origin + gap) / pitch + SLACK).floor() + 1.0;
    let clamp = |k: f64| k.clamp(0.0, lattice.len() as f64) as usize;
    clamp(lo)..clamp(hi)
}

/// Build the candidate grid. See the module docs for the layout rule.
pub fn generate_grid(
    bounds: &MapBounds,
    config: &LabelConfig,
    points: &[PointFeature],
) -> Result<CandidateLabelSet> {
    generate_grid_with(bounds, config, points, Exec::default())
}

pub fn generate_grid_with(
    bounds: &MapBounds,
    config: &LabelConfig,
    points: &[PointFeature],
    exec: Exec,
) -> Result<CandidateLabelSet> {
    config.validate(bounds)?;
    let LabelConfig { w, h, lsd, ssd, .. } = *config;

    let lefts = lattice(bounds.x_min + ssd, bounds.x_max - ssd, w, w + lsd);
    let bottoms = lattice(bounds.y_min + ssd, bounds.y_max - ssd, h, h + lsd);
    if lefts.is_empty() || bottoms.is_empty() {
        return Err(Error::EmptyGrid("no cell fits inside the bounds".into()));
    }
    let cols = lefts.len();
    let cell = |r: usize, c: usize| LabelBox::from_corner(LabelId(0), lefts[c], bottoms[r], w, h);

    let mut dead = vec![false; cols * bottoms.len()];
    for p in points {
        for r in near(p.y, &bottoms, h, lsd, h + lsd) {
            for c in near(p.x, &lefts, w, lsd, w + lsd) {
                if !dead[r * cols + c] && point_in_rect(p, &cell(r, c), lsd) {
                    dead[r * cols + c] = true;
                }
            }
        }
    }

    let survivors: Vec<Vec<LabelBox>> = if exec.is_parallel() {
        exec::map_range(exec, bottoms.len(), |r| {
            (0..cols)
                .filter(|&c| !dead[r * cols + c])
                .map(|c| cell(r, c))
                .collect()
        })
    } else {
        let mut all = Vec::with_capacity(dead.iter().filter(|&&d| !d).count());
        all.extend((0..dead.len()).filter(|&i| !dead[i]).map(|i| cell(i / cols, i % cols)));
        vec![all]
    };

    let mut labels: Vec<LabelBox> = Vec::with_capacity(survivors.iter().map(Vec::len).sum());
    for row in survivors {
        labels.extend(row);
    }
    for (i, label) in labels.iter_mut().enumerate() {
        label.id = LabelId::from_index(i);
    }
    // emitted row-major, so already in (cy, cx) order
    let order: Vec<u32> = (0..labels.len() as u32).collect();
    let rows = index_rows(&labels, &order);
    if labels.is_empty() {
        return Err(Error::EmptyGrid(format!(
            "all {} cells conflict with the {} point features",
            dead.len(),
            points.len()
        )));
    }
    Ok(CandidateLabelSet {
        labels,
        order,
        rows,
        config: *config,
        bounds: *bounds,
    })
}

/// Slide labels rightward so they sit exactly `lsd` left of a nearby point.
///
/// Points are visited in ascending id. For each, the nearest label to its left
/// in the same row with `lsd < x_d < lsd + w` is moved, provided the moved box
/// still keeps the `ssd` margin, clears every other label by `lsd` and every
/// other point by `lsd`. The triggering point itself only has to stay outside
/// the box (it ends up exactly `lsd` away, which would otherwise count as
/// contained).
pub fn sweep_phase(mut cls: CandidateLabelSet, points: &[PointFeature]) -> CandidateLabelSet {
    let LabelConfig { w, h, lsd, ssd, .. } = cls.config;
    let bounds = cls.bounds;
    let index = PointGrid::new(points, &bounds, w + 2.0 * lsd, h + 2.0 * lsd);

    let mut order: Vec<usize> = (0..points.len()).collect();
    if !points.is_sorted_by_key(|p| p.id) {
        order.sort_by_key(|&i| points[i].id);
    }

    for pi in order {
        let p = &points[pi];
        let mut best: Option<(f64, LabelId, usize)> = None;
        for row in cls.rows_between(p.y - h, p.y + h) {
            let members = cls.members(row);
            let first_label = &cls.labels[members[0] as usize];
            if !(first_label.bottom() <= p.y && p.y <= first_label.top()) {
                continue;
            }
            let after = members.partition_point(|&i| p.x - cls.labels[i as usize].right() > lsd);
            let Some(&li) = after.checked_sub(1).map(|k| &members[k]) else {
                continue;
            };
            let label = &cls.labels[li as usize];
            let x_d = p.x - label.right();
            if !(lsd < x_d && x_d < lsd + w) {
                continue;
            }
            let better = match best {
                None => true,
                Some((right, id, _)) => match label.right().total_cmp(&right) {
                    Ordering::Greater => true,
                    Ordering::Equal => label.id < id,
                    Ordering::Less => false,
                },
            };
            if better {
                best = Some((label.right(), label.id, li as usize));
            }
        }
        let Some((_, _, li)) = best else { continue };

        let shifted = LabelBox {
            cx: p.x - lsd - w / 2.0,
            ..cls.labels[li]
        };
        if shifted.cx <= cls.labels[li].cx {
            continue;
        }
        let ok = shifted.keeps_margin(&bounds, ssd)
            && !cls.overlaps_any(&shifted)
            && !point_in_rect(p, &shifted, 0.0)
            && !index.any_within(&shifted, lsd, Some(pi));
        if ok {
            cls.labels[li] = shifted;
        }
    }
    cls
}

/// Naive O(m² + n·m) audit of the candidate-set invariants.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Audit {
    /// Label pairs closer than `lsd`.
    pub label_overlaps: usize,
    /// (point, label) pairs where the point lies in the label (gap 0).
    pub point_containments: usize,
    /// Labels closer than `ssd` to the bounds.
    pub margin_violations: usize,
}

impl Audit {
    pub fn is_clean(&self) -> bool {
        *self == Audit::default()
    }
}

pub fn audit(cls: &CandidateLabelSet, points: &[PointFeature]) -> Audit {
    audit_labels(cls.labels(), cls.config(), cls.bounds(), points)
}

/// Audit an arbitrary subset of labels (e.g. only the assigned ones).
pub fn audit_labels(
    labels: &[LabelBox],
    config: &LabelConfig,
    bounds: &MapBounds,
    points: &[PointFeature],
) -> Audit {
    let mut out = Audit::default();
    for (i, a) in labels.iter().enumerate() {
        for b in &labels[i + 1..] {
            if rect_overlaps(a, b, config.lsd) {
                out.label_overlaps += 1;
            }
        }
        for p in points {
            if point_in_rect(p, a, 0.0) {
                out.point_containments += 1;
            }
        }
        if !a.keeps_margin(bounds, config.ssd) {
            out.margin_violations += 1;
        }
    }
    out
}
