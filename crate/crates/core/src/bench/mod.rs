//! End-to-end solve with per-stage timing, and the sweep harness built on it.
//!
//! The three timed stages are:
//!
//! 1. candidate positions: grid generation and the sweep phase (`t1`),
//! 2. cost evaluation: corner distance table and NLM (`t2`),
//! 3. label assignment (`t3`).
//!
//! Leader construction follows stage 3 but is timed on its own and left out
//! of the three-way percentage split. Quality scoring is not part of the
//! solve at all.

mod report;
mod sweep;

use std::time::{Duration, Instant};

pub use report::{emit_report, read_report, sig6, CSV_COLUMNS};
pub use sweep::{
    aggregate, run_trial, sweep_label_sizes, sweep_nodes, BenchSettings, BenchmarkRow, TrialResult,
};

use crate::error::Result;
use crate::exec::Exec;
use crate::geometry::LabelConfig;
use crate::grid::{generate_grid_with, sweep_phase, CandidateLabelSet};
use crate::instance::Instance;
use crate::leader::{build_leaders, score_quality_with, LeaderSegment, QualityReport};
use crate::matching::{assign_labels, build_nlm_with, corner_distance_table_with, Assignment};

/// Final result of one labeling run.
#[derive(Debug, Clone, PartialEq)]
pub struct Placement {
    /// Post-sweep candidate set.
    pub cls: CandidateLabelSet,
    /// Effective NLM depth.
    pub k: usize,
    pub assignment: Assignment,
    /// One per assigned pair, in the same order.
    pub leaders: Vec<LeaderSegment>,
    pub quality: QualityReport,
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct StageTimings {
    pub t1: Duration,
    pub t2: Duration,
    pub t3: Duration,
    /// Leader construction, excluded from the percentages.
    pub leaders: Duration,
    /// Wall time from the start of stage 1 to the end of leader construction.
    pub total: Duration,
    /// Quality scoring after the solve.
    pub scoring: Duration,
    /// Stage shares of `t1 + t2 + t3`, in percent.
    pub p1: f64,
    pub p2: f64,
    pub p3: f64,
}

impl StageTimings {
    fn new(t1: Duration, t2: Duration, t3: Duration, leaders: Duration, total: Duration) -> Self {
        let sum = (t1 + t2 + t3).as_secs_f64();
        let pct = |d: Duration| if sum > 0.0 { 100.0 * d.as_secs_f64() / sum } else { 0.0 };
        StageTimings {
            t1,
            t2,
            t3,
            leaders,
            total,
            scoring: Duration::ZERO,
            p1: pct(t1),
            p2: pct(t2),
            p3: pct(t3),
        }
    }

    pub fn staged(&self) -> Duration {
        self.t1 + self.t2 + self.t3
    }
}

/// Solve on the calling thread only, as the timing protocol requires.
pub fn solve(instance: &Instance, config: &LabelConfig) -> Result<(Placement, StageTimings)> {
    solve_with(instance, config, Exec::Sequential)
}

pub fn solve_with(
    instance: &Instance,
    config: &LabelConfig,
    exec: Exec,
) -> Result<(Placement, StageTimings)> {
    let points = &instance.points;

    let start = Instant::now();
    let cls = generate_grid_with(&instance.bounds, config, points, exec)?;
    let cls = sweep_phase(cls, points);
    let stage1 = Instant::now();

    let table = corner_distance_table_with(points, &cls, exec);
    let k = config.resolve_k(cls.m());
    let nlm = build_nlm_with(&table, k, exec)?;
    let stage2 = Instant::now();

    let assignment = assign_labels(&nlm, &table);
    let stage3 = Instant::now();

    let leaders = build_leaders(&assignment, &cls, points)?;
    let end = Instant::now();

    let quality = score_quality_with(&leaders, &cls, &assignment, exec);
    let scored = Instant::now();

    let mut timings = StageTimings::new(
        stage1 - start,
        stage2 - stage1,
        stage3 - stage2,
        end - stage3,
        end - start,
    );
    timings.scoring = scored - end;
    Ok((
        Placement {
            cls,
            k,
            assignment,
            leaders,
            quality,
        },
        timings,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{MapBounds, PointFeature};
    use crate::grid::audit_labels;
    use crate::instance::random_instance;

    #[test]
    fn small_instance_fully_labeled() {
        let inst = random_instance(25, MapBounds::default(), 5);
        let (p, t) = solve(&inst, &LabelConfig::default()).unwrap();
        assert!(p.assignment.is_complete());
        assert_eq!(p.assignment.pairs.len(), 25);
        let placed: Vec<_> = p.assignment.pairs.iter().map(|a| *p.cls.label(a.label).unwrap()).collect();
        assert!(audit_labels(&placed, p.cls.config(), p.cls.bounds(), &inst.points).is_clean());
        assert!(t.staged() <= t.total);
        assert!((t.p1 + t.p2 + t.p3 - 100.0).abs() < 1e-9);
    }

    #[test]
    fn pigeonhole_reports_unassigned() {
        // five points along the top edge knock out the top row of cells
        let bounds = MapBounds::new(0.0, 300.0, 0.0, 300.0).unwrap();
        let cfg = LabelConfig {
            lsd: 0.0,
            ssd: 0.0,
            ..LabelConfig::default()
        };
        let points: Vec<_> = (0..5)
            .map(|i| PointFeature::new(i + 1, 20.0 + 50.0 * i as f64, 290.0))
            .collect();
        let inst = crate::instance::Instance {
            bounds,
            points,
            seed: 0,
        };
        let (p, _) = solve(&inst, &cfg).unwrap();
        assert_eq!(p.cls.m(), 4);
        let (p, _) = solve(&inst, &LabelConfig { h: 150.0, ..cfg }).unwrap();
        assert_eq!(p.cls.m(), 2);
        assert_eq!(p.assignment.pairs.len(), 2);
        assert_eq!(p.assignment.unassigned.len(), 3);
        assert_eq!(p.quality.unlabeled, 3);
    }

    #[test]
    fn parallel_solve_matches_sequential() {
        let inst = random_instance(300, MapBounds::default(), 77);
        let (a, _) = solve_with(&inst, &LabelConfig::default(), Exec::Sequential).unwrap();
        let (b, _) = solve_with(&inst, &LabelConfig::default(), Exec::Parallel).unwrap();
        assert_eq!(a, b);
    }
}
