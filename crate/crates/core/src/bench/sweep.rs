use std::time::Duration;

use crate::bench::{solve, StageTimings};
use crate::error::Result;
use crate::exec::{self, Exec};
use crate::geometry::{LabelConfig, MapBounds};
use crate::instance::random_instance;
use crate::leader::QualityReport;

/// Shared knobs for the sweep harness.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BenchSettings {
    pub bounds: MapBounds,
    pub config: LabelConfig,
    /// Trial `t` uses seed `seed0 + t`.
    pub seed0: u64,
    /// Run independent trials on worker threads. Each trial still solves on
    /// one thread; contention makes the stage shares noisier.
    pub trial_exec: Exec,
    /// Untimed solves per configuration before measuring.
    pub warmup: usize,
}

impl Default for BenchSettings {
    fn default() -> Self {
        BenchSettings {
            bounds: MapBounds::default(),
            config: LabelConfig::default(),
            seed0: 1,
            trial_exec: Exec::Sequential,
            warmup: 1,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrialResult {
    pub n: usize,
    pub m: usize,
    pub timings: StageTimings,
    pub quality: QualityReport,
}

pub fn run_trial(n: usize, bounds: &MapBounds, config: &LabelConfig, seed: u64) -> Result<TrialResult> {
    let inst = random_instance(n, *bounds, seed);
    let (placement, timings) = solve(&inst, config)?;
    Ok(TrialResult {
        n,
        m: placement.cls.m(),
        timings,
        quality: placement.quality,
    })
}

/// One aggregated line of a sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct BenchmarkRow {
    pub n: usize,
    pub w: f64,
    pub h: f64,
    pub lsd: f64,
    pub ssd: f64,
    /// Mean candidate count over the trials.
    pub m: f64,
    pub trials: usize,
    /// Seconds.
    pub mean_total: f64,
    pub std_total: f64,
    pub mean_t1: f64,
    pub mean_t2: f64,
    pub mean_t3: f64,
    /// Percent.
    pub mean_p1: f64,
    pub mean_p2: f64,
    pub mean_p3: f64,
    pub label_area: f64,
    pub map_area: f64,
    /// `label_area * m / map_area`.
    pub area_ratio: f64,
    pub mean_leader_length: f64,
    pub mean_leader_label_crossings: f64,
    pub mean_leader_leader_crossings: f64,
    pub mean_unlabeled: f64,
}

fn mean(xs: impl Iterator<Item = f64>) -> f64 {
    let (sum, count) = xs.fold((0.0, 0usize), |(s, c), x| (s + x, c + 1));
    if count == 0 {
        0.0
    } else {
        sum / count as f64
    }
}

/// Sample standard deviation; zero for fewer than two samples.
fn std_dev(xs: &[f64]) -> f64 {
    if xs.len() < 2 {
        return 0.0;
    }
    let mu = mean(xs.iter().copied());
    let ss: f64 = xs.iter().map(|x| (x - mu) * (x - mu)).sum();
    (ss / (xs.len() - 1) as f64).sqrt()
}

pub fn aggregate(config: &LabelConfig, bounds: &MapBounds, trials: &[TrialResult]) -> BenchmarkRow {
    let secs = |d: Duration| d.as_secs_f64();
    let totals: Vec<f64> = trials.iter().map(|t| secs(t.timings.total)).collect();
    let m = mean(trials.iter().map(|t| t.m as f64));
    let label_area = config.w * config.h;
    BenchmarkRow {
        n: trials.first().map_or(0, |t| t.n),
        w: config.w,
        h: config.h,
        lsd: config.lsd,
        ssd: config.ssd,
        m,
        trials: trials.len(),
        mean_total: mean(totals.iter().copied()),
        std_total: std_dev(&totals),
        mean_t1: mean(trials.iter().map(|t| secs(t.timings.t1))),
        mean_t2: mean(trials.iter().map(|t| secs(t.timings.t2))),
        mean_t3: mean(trials.iter().map(|t| secs(t.timings.t3))),
        mean_p1: mean(trials.iter().map(|t| t.timings.p1)),
        mean_p2: mean(trials.iter().map(|t| t.timings.p2)),
        mean_p3: mean(trials.iter().map(|t| t.timings.p3)),
        label_area,
        map_area: bounds.area(),
        area_ratio: label_area * m / bounds.area(),
        mean_leader_length: mean(trials.iter().map(|t| t.quality.total_leader_length)),
        mean_leader_label_crossings: mean(trials.iter().map(|t| t.quality.leader_label_crossings as f64)),
        mean_leader_leader_crossings: mean(trials.iter().map(|t| t.quality.leader_leader_crossings as f64)),
        mean_unlabeled: mean(trials.iter().map(|t| t.quality.unlabeled as f64)),
    }
}

/// Run `trials` seeded instances for every `(n, config)` cell.
///
/// Trials are interleaved round-robin across cells (trial 0 of every cell,
/// then trial 1, ...) so slow drift in machine state spreads evenly instead
/// of biasing whichever cell ran last.
fn run_cells(
    cells: &[(usize, LabelConfig)],
    trials: usize,
    settings: &BenchSettings,
) -> Result<Vec<BenchmarkRow>> {
    for &(n, config) in cells {
        for w in 0..settings.warmup {
            run_trial(n, &settings.bounds, &config, settings.seed0.wrapping_add(w as u64))?;
        }
    }
    let jobs: Vec<(usize, usize)> = (0..trials)
        .flat_map(|t| (0..cells.len()).map(move |c| (t, c)))
        .collect();
    let results: Vec<Result<TrialResult>> = exec::map_range(settings.trial_exec, jobs.len(), |j| {
        let (t, c) = jobs[j];
        let (n, config) = cells[c];
        run_trial(n, &settings.bounds, &config, settings.seed0.wrapping_add(t as u64))
    });

    let mut per_cell: Vec<Vec<TrialResult>> = vec![Vec::with_capacity(trials); cells.len()];
    for (&(_, c), r) in jobs.iter().zip(results) {
        per_cell[c].push(r?);
    }
    Ok(cells
        .iter()
        .zip(&per_cell)
        .map(|((_, config), rs)| aggregate(config, &settings.bounds, rs))
        .collect())
}

/// One row per `n`, in the order given (callers pass ascending `n`).
pub fn sweep_nodes(n_list: &[usize], trials: usize, settings: &BenchSettings) -> Result<Vec<BenchmarkRow>> {
    let trials = trials.max(1);
    let cells: Vec<(usize, LabelConfig)> = n_list.iter().map(|&n| (n, settings.config)).collect();
    run_cells(&cells, trials, settings)
}

/// Cartesian product `h x w x n`, h outermost.
pub fn sweep_label_sizes(
    h_values: &[f64],
    w_values: &[f64],
    n_list: &[usize],
    trials: usize,
    settings: &BenchSettings,
) -> Result<Vec<BenchmarkRow>> {
    let trials = trials.max(1);
    let mut cells = Vec::with_capacity(h_values.len() * w_values.len() * n_list.len());
    for &h in h_values {
        for &w in w_values {
            for &n in n_list {
                cells.push((n, settings.config.with_size(w, h)));
            }
        }
    }
    run_cells(&cells, trials, settings)
}
