use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use gridlabel::bench::{self, emit_report, BenchSettings};
use gridlabel::geometry::{LabelConfig, MapBounds};
use gridlabel::grid::{generate_grid, sweep_phase};
use gridlabel::instance::{load_instance, load_placement, random_instance, save_instance, save_placement};
use gridlabel::render::{render_scene, scene_path, write_scene, RenderStyle, Stage};
use gridlabel::{Error, Exec, Result};

/// `println!` that tolerates a closed stdout (e.g. piped into `head`).
macro_rules! say {
    ($($t:tt)*) => {{
        use std::io::Write as _;
        let _ = writeln!(std::io::stdout(), $($t)*);
    }};
}

// Aliases keep clap from treating the parsed list as a repeated argument.
type Sizes = Vec<usize>;
type Values = Vec<f64>;

#[derive(Parser)]
#[command(name = "gridlabel", version, about = "Grid-based point labeling with leader lines")]
struct Cli {
    /// Directory for outputs whose path is not given explicitly.
    #[arg(long, global = true, env = "GRIDLABEL_OUT_DIR", default_value = ".")]
    out_dir: PathBuf,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a uniform random instance.
    Gen {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        /// x_min,x_max,y_min,y_max
        #[arg(long, default_value = "0,3000,0,4000", value_parser = parse_bounds)]
        bounds: MapBounds,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Label an instance and write the placement dump.
    Solve {
        #[arg(long)]
        instance: PathBuf,
        #[command(flatten)]
        label: LabelArgs,
        /// Also write `<id>_grid.svg` and `<id>_final.svg`.
        #[arg(long)]
        render: bool,
        #[arg(long)]
        style: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Timing sweep over node counts.
    BenchNodes {
        /// Comma list or start:end:step.
        #[arg(long, default_value = "50:500:10", value_parser = parse_usize_list)]
        n_list: Sizes,
        #[arg(long, default_value_t = 100)]
        trials: usize,
        #[command(flatten)]
        label: LabelArgs,
        #[command(flatten)]
        sweep: SweepArgs,
    },
    /// Timing sweep over label sizes.
    BenchSizes {
        #[arg(long, default_value = "50:150:10", value_parser = parse_f64_list)]
        h_range: Values,
        #[arg(long, default_value = "130:200:10", value_parser = parse_f64_list)]
        w_range: Values,
        #[arg(long, default_value = "50,100,150,250,500", value_parser = parse_usize_list)]
        n_list: Sizes,
        #[arg(long, default_value_t = 20)]
        trials: usize,
        #[command(flatten)]
        label: LabelArgs,
        #[command(flatten)]
        sweep: SweepArgs,
    },
    /// Render an instance, optionally with a placement dump.
    Render {
        #[arg(long)]
        instance: PathBuf,
        /// Without a placement, the candidate grid for the given label size is drawn.
        #[arg(long)]
        placement: Option<PathBuf>,
        #[command(flatten)]
        label: LabelArgs,
        #[arg(long)]
        style: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Args, Clone, Copy)]
struct LabelArgs {
    #[arg(long, default_value_t = 150.0)]
    w: f64,
    #[arg(long, default_value_t = 100.0)]
    h: f64,
    #[arg(long, default_value_t = 10.0)]
    lsd: f64,
    #[arg(long, default_value_t = 10.0)]
    ssd: f64,
    /// NLM depth; defaults to min(m, max(8, ceil(m/10))).
    #[arg(long)]
    k: Option<usize>,
}

impl LabelArgs {
    fn config(self) -> LabelConfig {
        LabelConfig {
            w: self.w,
            h: self.h,
            lsd: self.lsd,
            ssd: self.ssd,
            k: self.k,
        }
    }
}

#[derive(Args, Clone)]
struct SweepArgs {
    #[arg(long, default_value = "0,3000,0,4000", value_parser = parse_bounds)]
    bounds: MapBounds,
    #[arg(long, default_value_t = 1)]
    seed0: u64,
    /// Run trials on all cores. Faster, but stage shares get noisier.
    #[arg(long)]
    parallel_trials: bool,
    #[arg(long)]
    csv: Option<PathBuf>,
}

impl SweepArgs {
    fn settings(&self, config: LabelConfig) -> BenchSettings {
        BenchSettings {
            bounds: self.bounds,
            config,
            seed0: self.seed0,
            trial_exec: if self.parallel_trials { Exec::default() } else { Exec::Sequential },
            ..BenchSettings::default()
        }
    }
}

fn parse_bounds(s: &str) -> std::result::Result<MapBounds, String> {
    let v: Vec<f64> = s
        .split(',')
        .map(|t| t.trim().parse::<f64>().map_err(|e| format!("`{t}`: {e}")))
        .collect::<std::result::Result<_, _>>()?;
    match v[..] {
        [x0, x1, y0, y1] => MapBounds::new(x0, x1, y0, y1).map_err(|e| e.to_string()),
        _ => Err("expected x_min,x_max,y_min,y_max".into()),
    }
}

/// `a,b,c` or inclusive `start:end:step`.
fn parse_f64_list(s: &str) -> std::result::Result<Vec<f64>, String> {
    let num = |t: &str| t.trim().parse::<f64>().map_err(|e| format!("`{t}`: {e}"));
    let parts: Vec<&str> = s.split(':').collect();
    let out: Vec<f64> = match parts[..] {
        [a, b, step] => {
            let (a, b, step) = (num(a)?, num(b)?, num(step)?);
            if !step.is_finite() || step <= 0.0 || b < a {
                return Err("range needs start <= end and step > 0".into());
            }
            let count = ((b - a) / step + 1e-9).floor() as usize + 1;
            (0..count).map(|i| a + step * i as f64).collect()
        }
        [_] => s.split(',').map(num).collect::<std::result::Result<_, _>>()?,
        _ => return Err("expected a comma list or start:end:step".into()),
    };
    if out.is_empty() {
        return Err("empty list".into());
    }
    Ok(out)
}

fn parse_usize_list(s: &str) -> std::result::Result<Vec<usize>, String> {
    parse_f64_list(s)?
        .into_iter()
        .map(|x| {
            if x >= 0.0 && x.fract() == 0.0 {
                Ok(x as usize)
            } else {
                Err(format!("`{x}` is not a non-negative integer"))
            }
        })
        .collect()
}

fn stem(path: &Path) -> String {
    path.file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "instance".into())
}

fn ensure_dir(dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir).map_err(|source| Error::Io {
        path: dir.to_path_buf(),
        source,
    })
}

fn load_style(path: Option<&Path>) -> Result<RenderStyle> {
    path.map_or_else(|| Ok(RenderStyle::default()), RenderStyle::load)
}

fn run(cli: Cli) -> Result<()> {
    let out_dir = cli.out_dir;
    match cli.command {
        Command::Gen { n, seed, bounds, out } => {
            let inst = random_instance(n, bounds, seed);
            let path = out.unwrap_or_else(|| out_dir.join(format!("instance_n{n}_s{seed}.txt")));
            if let Some(parent) = path.parent() {
                ensure_dir(parent)?;
            }
            save_instance(&inst, &path)?;
            say!("wrote {} points to {}", n, path.display());
        }
        Command::Solve {
            instance,
            label,
            render,
            style,
            out,
        } => {
            let config = label.config();
            let style = load_style(style.as_deref())?;
            let inst = load_instance(&instance)?;
            config.validate(&inst.bounds)?;
            let id = stem(&instance);
            let (placement, t) = bench::solve(&inst, &config)?;
            let path = out.unwrap_or_else(|| out_dir.join(format!("{id}_placement.txt")));
            if let Some(parent) = path.parent() {
                ensure_dir(parent)?;
            }
            save_placement(&placement, &path)?;
            if render {
                ensure_dir(&out_dir)?;
                let grid = render_scene(&inst.points, &placement.cls, None, None, &style)?;
                write_scene(&scene_path(&out_dir, &id, Stage::Grid), &grid)?;
                let fin = render_scene(
                    &inst.points,
                    &placement.cls,
                    Some(&placement.assignment),
                    Some(&placement.leaders),
                    &style,
                )?;
                write_scene(&scene_path(&out_dir, &id, Stage::Final), &fin)?;
            }
            let q = &placement.quality;
            say!(
                "n={} m={} k={} labeled={} unassigned={} leader_length={:.1} leader_label_crossings={} leader_leader_crossings={}",
                inst.n(),
                placement.cls.m(),
                placement.k,
                placement.assignment.pairs.len(),
                placement.assignment.unassigned.len(),
                q.total_leader_length,
                q.leader_label_crossings,
                q.leader_leader_crossings
            );
            say!(
                "t1={:.3}ms t2={:.3}ms t3={:.3}ms leaders={:.3}ms total={:.3}ms p1={:.1}% p2={:.1}% p3={:.1}%",
                t.t1.as_secs_f64() * 1e3,
                t.t2.as_secs_f64() * 1e3,
                t.t3.as_secs_f64() * 1e3,
                t.leaders.as_secs_f64() * 1e3,
                t.total.as_secs_f64() * 1e3,
                t.p1,
                t.p2,
                t.p3
            );
            say!("placement: {}", path.display());
        }
        Command::BenchNodes {
            n_list,
            trials,
            label,
            sweep,
        } => {
            let settings = sweep.settings(label.config());
            settings.config.validate(&settings.bounds)?;
            let rows = bench::sweep_nodes(&n_list, trials, &settings)?;
            let path = sweep.csv.unwrap_or_else(|| out_dir.join("bench_nodes.csv"));
            if let Some(parent) = path.parent() {
                ensure_dir(parent)?;
            }
            emit_report(&rows, &path)?;
            for r in &rows {
                say!(
                    "n={:<4} m={:<7.1} total={:.3}ms p1={:5.1}% p2={:5.1}% p3={:5.2}%",
                    r.n,
                    r.m,
                    r.mean_total * 1e3,
                    r.mean_p1,
                    r.mean_p2,
                    r.mean_p3
                );
            }
            say!("report: {}", path.display());
        }
        Command::BenchSizes {
            h_range,
            w_range,
            n_list,
            trials,
            label,
            sweep,
        } => {
            let settings = sweep.settings(label.config());
            for &h in &h_range {
                for &w in &w_range {
                    settings.config.with_size(w, h).validate(&settings.bounds)?;
                }
            }
            let rows = bench::sweep_label_sizes(&h_range, &w_range, &n_list, trials, &settings)?;
            let path = sweep.csv.unwrap_or_else(|| out_dir.join("bench_sizes.csv"));
            if let Some(parent) = path.parent() {
                ensure_dir(parent)?;
            }
            emit_report(&rows, &path)?;
            say!("{} rows, report: {}", rows.len(), path.display());
        }
        Command::Render {
            instance,
            placement,
            label,
            style,
            out,
        } => {
            let style = load_style(style.as_deref())?;
            let inst = load_instance(&instance)?;
            let id = stem(&instance);
            let (doc, stage) = match placement {
                Some(p) => {
                    let placement = load_placement(&p)?.rebuild(&inst)?;
                    let doc = render_scene(
                        &inst.points,
                        &placement.cls,
                        Some(&placement.assignment),
                        Some(&placement.leaders),
                        &style,
                    )?;
                    (doc, Stage::Final)
                }
                None => {
                    let config = label.config();
                    config.validate(&inst.bounds)?;
                    let cls = sweep_phase(generate_grid(&inst.bounds, &config, &inst.points)?, &inst.points);
                    (render_scene(&inst.points, &cls, None, None, &style)?, Stage::Grid)
                }
            };
            let path = match out {
                Some(p) => p,
                None => {
                    ensure_dir(&out_dir)?;
                    scene_path(&out_dir, &id, stage)
                }
            };
            write_scene(&path, &doc)?;
            say!("wrote {}", path.display());
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
