//! Point-to-label matching.
//!
//! Each point is compared against the four corners of every candidate label
//! using squared Euclidean distance; a label's distance to a point is that of
//! its nearest corner. The k nearest labels of every point form the nearest
//! label matrix (NLM). Assignment then walks closeness levels 1..=k: at each
//! level every still-unlabeled point bids for its level-r label, a contested
//! label goes to the closest bidder (smaller point id on ties), and a granted
//! label disappears from every row. Points that run out of levels fall back to
//! the globally nearest free label.

use std::cmp::Ordering;

use crate::error::{Error, Result};
use crate::exec::{self, Exec};
use crate::geometry::{Corner, LabelId, Point, PointFeature, PointId};
use crate::grid::CandidateLabelSet;

/// Squared nearest-corner distances from every point to every label.
#[derive(Debug, Clone, PartialEq)]
pub struct CornerDistanceTable {
    n: usize,
    m: usize,
    point_ids: Vec<PointId>,
    corners: Vec<[Point; 4]>,
    dist: Vec<f64>,
    nearest: Vec<Corner>,
}

impl CornerDistanceTable {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.m
    }

    /// The m x 4 corner table, corners in [`Corner::ALL`] order.
    pub fn corners(&self) -> &[[Point; 4]] {
        &self.corners
    }

    pub fn point_id(&self, row: usize) -> PointId {
        self.point_ids[row]
    }

    /// Squared distance from the point in `row` to label index `col`.
    #[inline]
    pub fn dist(&self, row: usize, col: usize) -> f64 {
        self.dist[row * self.m + col]
    }

    #[inline]
    pub fn nearest_corner(&self, row: usize, col: usize) -> Corner {
        self.nearest[row * self.m + col]
    }

    pub fn row(&self, row: usize) -> &[f64] {
        &self.dist[row * self.m..(row + 1) * self.m]
    }
}

pub fn corner_distance_table(points: &[PointFeature], cls: &CandidateLabelSet) -> CornerDistanceTable {
    corner_distance_table_with(points, cls, Exec::default())
}

pub fn corner_distance_table_with(
    points: &[PointFeature],
    cls: &CandidateLabelSet,
    exec: Exec,
) -> CornerDistanceTable {
    let n = points.len();
    let m = cls.m();
    let corners: Vec<[Point; 4]> = cls.labels().iter().map(|l| l.corners()).collect();

    let mut dist = vec![0.0f64; n * m];
    let mut nearest = vec![Corner::BottomLeft; n * m];
    exec::for_each_row_pair(exec, &mut dist, &mut nearest, m, |i, drow, crow| {
        let p = points[i].pos();
        for ((d, c), cs) in drow.iter_mut().zip(crow.iter_mut()).zip(&corners) {
            let mut best = (p.dist2(cs[0]), Corner::BottomLeft);
            for (k, corner) in cs.iter().enumerate().skip(1) {
                let dk = p.dist2(*corner);
                if dk < best.0 {
                    best = (dk, Corner::from_index(k));
                }
            }
            (*d, *c) = best;
        }
    });

    CornerDistanceTable {
        n,
        m,
        point_ids: points.iter().map(|p| p.id).collect(),
        corners,
        dist,
        nearest,
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NlmEntry {
    pub label: LabelId,
    pub corner: Corner,
    /// Squared distance to `corner`.
    pub dist: f64,
}

/// n x k ranking of each point's nearest labels, nearest first.
#[derive(Debug, Clone, PartialEq)]
pub struct NearestLabelMatrix {
    n: usize,
    k: usize,
    point_ids: Vec<PointId>,
    entries: Vec<NlmEntry>,
}

impl NearestLabelMatrix {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn point_id(&self, row: usize) -> PointId {
        self.point_ids[row]
    }

    pub fn row(&self, row: usize) -> &[NlmEntry] {
        &self.entries[row * self.k..(row + 1) * self.k]
    }

    /// Entry at closeness level `level` (1-based) of `row`.
    #[inline]
    pub fn entry(&self, row: usize, level: usize) -> &NlmEntry {
        &self.entries[row * self.k + level - 1]
    }
}

#[inline]
fn rank_cmp(row: &[f64], a: u32, b: u32) -> Ordering {
    row[a as usize]
        .total_cmp(&row[b as usize])
        .then(a.cmp(&b))
}

/// Top-`k` labels of every row; ties by ascending label id.
pub fn build_nlm(table: &CornerDistanceTable, k: usize) -> Result<NearestLabelMatrix> {
    build_nlm_with(table, k, Exec::default())
}

pub fn build_nlm_with(table: &CornerDistanceTable, k: usize, exec: Exec) -> Result<NearestLabelMatrix> {
    let m = table.m();
    if k == 0 || k > m {
        return Err(Error::Validation(format!("NLM depth k={k} must lie in 1..={m}")));
    }
    let rows: Vec<Vec<NlmEntry>> = exec::map_range_with(
        exec,
        table.n(),
        || Vec::<u32>::with_capacity(m),
        |order, i| {
            let dist = table.row(i);
            order.clear();
            order.extend(0..m as u32);
            if k < m {
                order.select_nth_unstable_by(k - 1, |&a, &b| rank_cmp(dist, a, b));
            }
            let top = &mut order[..k];
            top.sort_unstable_by(|&a, &b| rank_cmp(dist, a, b));
            top.iter()
                .map(|&j| NlmEntry {
                    label: LabelId::from_index(j as usize),
                    corner: table.nearest_corner(i, j as usize),
                    dist: dist[j as usize],
                })
                .collect()
        },
    );
    Ok(NearestLabelMatrix {
        n: table.n(),
        k,
        point_ids: table.point_ids.clone(),
        entries: rows.into_iter().flatten().collect(),
    })
}

/// Closeness level at which a pair was formed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Level {
    /// 1-based NLM level.
    Rank(u32),
    /// Assigned by the nearest-free-label scan after all k levels.
    Fallback,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AssignedPair {
    pub point: PointId,
    pub label: LabelId,
    pub corner: Corner,
    pub level: Level,
    /// Squared point-to-corner distance.
    pub dist: f64,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Assignment {
    /// Sorted by point id.
    pub pairs: Vec<AssignedPair>,
    /// Sorted ascending.
    pub unassigned: Vec<PointId>,
}

impl Assignment {
    pub fn pair_for(&self, point: PointId) -> Option<&AssignedPair> {
        self.pairs
            .binary_search_by_key(&point, |p| p.point)
            .ok()
            .map(|i| &self.pairs[i])
    }

    pub fn is_complete(&self) -> bool {
        self.unassigned.is_empty()
    }

    pub fn total_squared_distance(&self) -> f64 {
        self.pairs.iter().map(|p| p.dist).sum()
    }
}

const NO_BID: u32 = u32::MAX;

pub fn assign_labels(nlm: &NearestLabelMatrix, table: &CornerDistanceTable) -> Assignment {
    let n = nlm.n();
    let m = table.m();
    let mut taken = vec![false; m];
    let mut remaining = m;
    let mut granted: Vec<Option<AssignedPair>> = vec![None; n];
    let mut active: Vec<u32> = (0..n as u32).collect();

    // Best bid per label at the current level, as a row index.
    let mut bid = vec![NO_BID; m];
    let mut contested: Vec<u32> = Vec::new();

    for level in 1..=nlm.k() {
        if active.is_empty() || remaining == 0 {
            break;
        }
        for &i in &active {
            let e = nlm.entry(i as usize, level);
            let j = e.label.index();
            if taken[j] {
                continue;
            }
            let current = bid[j];
            if current == NO_BID {
                bid[j] = i;
                contested.push(j as u32);
            } else {
                let held = nlm.entry(current as usize, level).dist;
                let wins = match e.dist.total_cmp(&held) {
                    Ordering::Less => true,
                    Ordering::Equal => nlm.point_id(i as usize) < nlm.point_id(current as usize),
                    Ordering::Greater => false,
                };
                if wins {
                    bid[j] = i;
                }
            }
        }
        for j in contested.drain(..) {
            let winner = std::mem::replace(&mut bid[j as usize], NO_BID) as usize;
            let e = nlm.entry(winner, level);
            taken[j as usize] = true;
            remaining -= 1;
            granted[winner] = Some(AssignedPair {
                point: nlm.point_id(winner),
                label: e.label,
                corner: e.corner,
                level: Level::Rank(level as u32),
                dist: e.dist,
            });
        }
        active.retain(|&i| granted[i as usize].is_none());
    }

    let mut unassigned = Vec::new();
    if !active.is_empty() {
        active.sort_by_key(|&i| nlm.point_id(i as usize));
        let mut free: Vec<u32> = (0..m as u32).filter(|&j| !taken[j as usize]).collect();
        for i in active {
            let i = i as usize;
            let best = free
                .iter()
                .enumerate()
                .min_by(|(_, &a), (_, &b)| {
                    table
                        .dist(i, a as usize)
                        .total_cmp(&table.dist(i, b as usize))
                        .then(a.cmp(&b))
                })
                .map(|(pos, &j)| (pos, j as usize));
            match best {
                Some((pos, j)) => {
                    free.swap_remove(pos);
                    granted[i] = Some(AssignedPair {
                        point: table.point_id(i),
                        label: LabelId::from_index(j),
                        corner: table.nearest_corner(i, j),
                        level: Level::Fallback,
                        dist: table.dist(i, j),
                    });
                }
                None => unassigned.push(table.point_id(i)),
            }
        }
    }

    let mut pairs: Vec<AssignedPair> = granted.into_iter().flatten().collect();
    pairs.sort_by_key(|p| p.point);
    Assignment { pairs, unassigned }
}

/// True iff the candidate set has at least one label per point.
pub fn cls_capacity_check(cls: &CandidateLabelSet, n: usize) -> bool {
    cls.m() >= n
}
