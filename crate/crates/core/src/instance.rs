//! Random instances and the plain-text instance / placement file formats.
//!
//! Instance file:
//!
//! ```text
//! # gridlabel instance
//! version 1
//! prng pcg64 stream=0xa02bdbf7bb3c0a7ac28fa16a64abf96 state=seed
//! seed 42
//! bounds 0 3000 0 4000
//! n 2
//! 1 1534.25 87.5
//! 2 12.0625 3999.5
//! ```
//!
//! Coordinates are written with Rust's shortest round-trip float formatting,
//! so `load(save(x)) == x` bit for bit.
//!
//! Placement file: a `config` line, the candidate count `m`, one
//! `point_id label_id corner_x corner_y level` line per assigned point
//! (`level` is the 1-based closeness level or `fallback`), an `unassigned`
//! line and a `quality` footer.

use std::collections::HashSet;
use std::fmt::Write as _;
use std::fs;
use std::path::Path;
use std::str::FromStr;

use rand_core::Rng;
use rand_pcg::Pcg64;

use crate::bench::Placement;
use crate::error::{Error, Result};
use crate::geometry::{LabelConfig, LabelId, MapBounds, Point, PointFeature, PointId};
use crate::grid::{generate_grid, sweep_phase};
use crate::leader::{build_leaders, index_by_id, score_quality, QualityReport};
use crate::matching::{AssignedPair, Assignment, Level};

pub const INSTANCE_FORMAT_VERSION: u32 = 1;

/// Default stream constant of the PCG reference implementation.
pub const PCG_STREAM: u128 = 0x0a02_bdbf_7bb3_c0a7_ac28_fa16_a64a_bf96;

const PRNG_LINE: &str = "pcg64 stream=0xa02bdbf7bb3c0a7ac28fa16a64abf96 state=seed";

#[derive(Debug, Clone, PartialEq)]
pub struct Instance {
    pub bounds: MapBounds,
    pub points: Vec<PointFeature>,
    pub seed: u64,
}

impl Instance {
    pub fn n(&self) -> usize {
        self.points.len()
    }

    /// Points strictly inside the bounds, pairwise distinct, ids exactly `1..=n` in order.
    pub fn validate(&self) -> Result<()> {
        let mut seen = HashSet::with_capacity(self.points.len());
        for (i, p) in self.points.iter().enumerate() {
            if p.id != PointId::from_index(i) {
                return Err(Error::Validation(format!(
                    "point ids must be 1..=n in order; found {} at position {}",
                    p.id,
                    i + 1
                )));
            }
            if !self.bounds.contains_strict(p.x, p.y) {
                return Err(Error::Validation(format!(
                    "point {} at ({}, {}) is not strictly inside the bounds",
                    p.id, p.x, p.y
                )));
            }
            if !seen.insert((p.x.to_bits(), p.y.to_bits())) {
                return Err(Error::Validation(format!(
                    "point {} duplicates the coordinates of an earlier point",
                    p.id
                )));
            }
        }
        Ok(())
    }
}

/// Uniform draw in `[0, 1)` from the top 53 bits.
#[inline]
fn unit(rng: &mut Pcg64) -> f64 {
    (rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

fn open_uniform(rng: &mut Pcg64, lo: f64, hi: f64) -> f64 {
    loop {
        let v = lo + unit(rng) * (hi - lo);
        if lo < v && v < hi {
            return v;
        }
    }
}

/// `n` i.i.d. uniform points in the open bounds rectangle. Each point draws x
/// then y; exact coordinate collisions are redrawn.
pub fn random_instance(n: usize, bounds: MapBounds, seed: u64) -> Instance {
    let mut rng = Pcg64::new(u128::from(seed), PCG_STREAM);
    let mut seen = HashSet::with_capacity(n);
    let mut points = Vec::with_capacity(n);
    while points.len() < n {
        let x = open_uniform(&mut rng, bounds.x_min, bounds.x_max);
        let y = open_uniform(&mut rng, bounds.y_min, bounds.y_max);
        if seen.insert((x.to_bits(), y.to_bits())) {
            points.push(PointFeature::new(points.len() as u32 + 1, x, y));
        }
    }
    Instance {
        bounds,
        points,
        seed,
    }
}

pub fn format_instance(inst: &Instance) -> String {
    let b = &inst.bounds;
    let mut out = String::with_capacity(32 * inst.n() + 160);
    out.push_str("# gridlabel instance\n");
    let _ = writeln!(out, "version {INSTANCE_FORMAT_VERSION}");
    let _ = writeln!(out, "prng {PRNG_LINE}");
    let _ = writeln!(out, "seed {}", inst.seed);
    let _ = writeln!(out, "bounds {} {} {} {}", b.x_min, b.x_max, b.y_min, b.y_max);
    let _ = writeln!(out, "n {}", inst.n());
    for p in &inst.points {
        let _ = writeln!(out, "{} {} {}", p.id, p.x, p.y);
    }
    out
}

pub fn save_instance(inst: &Instance, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    fs::write(path, format_instance(inst)).map_err(|e| Error::io(path, e))
}

pub fn load_instance(path: impl AsRef<Path>) -> Result<Instance> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_instance(&text)
}

/// Non-comment, non-blank lines with 1-based line numbers.
struct Lines<'a> {
    inner: std::iter::Enumerate<std::str::Lines<'a>>,
    last: usize,
}

impl<'a> Lines<'a> {
    fn new(text: &'a str) -> Self {
        Lines {
            inner: text.lines().enumerate(),
            last: 0,
        }
    }

    fn next_line(&mut self, what: &str) -> Result<(usize, Vec<&'a str>)> {
        for (i, line) in self.inner.by_ref() {
            self.last = i + 1;
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            return Ok((i + 1, line.split_whitespace().collect()));
        }
        Err(Error::parse(self.last + 1, what, "unexpected end of file"))
    }

    /// A `key value...` line; returns the values.
    fn keyed(&mut self, key: &str) -> Result<(usize, Vec<&'a str>)> {
        let (line, fields) = self.next_line(key)?;
        if fields[0] != key {
            return Err(Error::parse(line, key, format!("expected `{key}`, found `{}`", fields[0])));
        }
        Ok((line, fields[1..].to_vec()))
    }
}

fn field<T: FromStr>(line: usize, name: &str, raw: Option<&&str>) -> Result<T>
where
    T::Err: std::fmt::Display,
{
    let raw = raw.ok_or_else(|| Error::parse(line, name, "missing value"))?;
    raw.parse()
        .map_err(|e| Error::parse(line, name, format!("`{raw}`: {e}")))
}

fn finite(line: usize, name: &str, raw: Option<&&str>) -> Result<f64> {
    let v: f64 = field(line, name, raw)?;
    if !v.is_finite() {
        return Err(Error::parse(line, name, "value must be finite"));
    }
    Ok(v)
}

pub fn parse_instance(text: &str) -> Result<Instance> {
    let mut lines = Lines::new(text);
    let (line, v) = lines.keyed("version")?;
    let version: u32 = field(line, "version", v.first())?;
    if version != INSTANCE_FORMAT_VERSION {
        return Err(Error::parse(line, "version", format!("unsupported version {version}")));
    }
    lines.keyed("prng")?;
    let (line, v) = lines.keyed("seed")?;
    let seed: u64 = field(line, "seed", v.first())?;
    let (line, v) = lines.keyed("bounds")?;
    let bounds = MapBounds::new(
        finite(line, "bounds.x_min", v.first())?,
        finite(line, "bounds.x_max", v.get(1))?,
        finite(line, "bounds.y_min", v.get(2))?,
        finite(line, "bounds.y_max", v.get(3))?,
    )
    .map_err(|e| Error::parse(line, "bounds", e.to_string()))?;
    let (line, v) = lines.keyed("n")?;
    let n: usize = field(line, "n", v.first())?;

    let mut points = Vec::with_capacity(n);
    for _ in 0..n {
        let (line, f) = lines.next_line("point")?;
        if f.len() != 3 {
            return Err(Error::parse(line, "point", format!("expected `id x y`, got {} fields", f.len())));
        }
        let id: u32 = field(line, "id", f.first())?;
        let x = finite(line, "x", f.get(1))?;
        let y = finite(line, "y", f.get(2))?;
        points.push(PointFeature::new(id, x, y));
    }
    if let Ok((line, _)) = lines.next_line("end") {
        return Err(Error::parse(line, "point", format!("more than n={n} point lines")));
    }
    let inst = Instance {
        bounds,
        points,
        seed,
    };
    inst.validate()?;
    Ok(inst)
}

/// One assigned point in a placement file.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PlacementLine {
    pub point: PointId,
    pub label: LabelId,
    pub corner: Point,
    pub level: Level,
}

/// Parsed placement file.
#[derive(Debug, Clone, PartialEq)]
pub struct PlacementRecord {
    pub config: LabelConfig,
    /// Effective NLM depth.
    pub k: usize,
    pub m: usize,
    pub lines: Vec<PlacementLine>,
    pub unassigned: Vec<PointId>,
    pub quality: QualityReport,
}

impl PlacementRecord {
    /// Rebuild the full placement against `instance`, regenerating the
    /// candidate set from the recorded config and checking every line
    /// against it.
    pub fn rebuild(&self, instance: &Instance) -> Result<Placement> {
        let cls = generate_grid(&instance.bounds, &self.config, &instance.points)?;
        let cls = sweep_phase(cls, &instance.points);
        if cls.m() != self.m {
            return Err(Error::InconsistentScene(format!(
                "placement records m={} but the instance yields m={}",
                self.m,
                cls.m()
            )));
        }
        let by_id = index_by_id(&instance.points);
        let mut pairs = Vec::with_capacity(self.lines.len());
        for line in &self.lines {
            let label = cls.label(line.label).ok_or_else(|| {
                Error::InconsistentScene(format!("label {} is not in the candidate set", line.label))
            })?;
            let point = by_id
                .get(line.point.index())
                .copied()
                .flatten()
                .map(|i| instance.points[i])
                .ok_or_else(|| Error::InconsistentScene(format!("point {} is not in the instance", line.point)))?;
            let (corner, dist) = label.nearest_corner(point.pos());
            if label.corner(corner) != line.corner {
                return Err(Error::InconsistentScene(format!(
                    "point {} records corner ({}, {}) of label {}, nearest is ({}, {})",
                    line.point,
                    line.corner.x,
                    line.corner.y,
                    line.label,
                    label.corner(corner).x,
                    label.corner(corner).y
                )));
            }
            pairs.push(AssignedPair {
                point: line.point,
                label: line.label,
                corner,
                level: line.level,
                dist,
            });
        }
        let assignment = Assignment {
            pairs,
            unassigned: self.unassigned.clone(),
        };
        let leaders = build_leaders(&assignment, &cls, &instance.points)?;
        let quality = score_quality(&leaders, &cls, &assignment);
        Ok(Placement {
            cls,
            k: self.k,
            assignment,
            leaders,
            quality,
        })
    }
}

fn level_token(level: Level) -> String {
    match level {
        Level::Rank(r) => r.to_string(),
        Level::Fallback => "fallback".into(),
    }
}

pub fn format_placement(p: &Placement) -> String {
    let c = p.cls.config();
    let mut out = String::with_capacity(48 * p.leaders.len() + 256);
    out.push_str("# gridlabel placement v1\n");
    let _ = writeln!(out, "config w={} h={} lsd={} ssd={} k={}", c.w, c.h, c.lsd, c.ssd, p.k);
    let _ = writeln!(out, "m {}", p.cls.m());
    for (pair, leader) in p.assignment.pairs.iter().zip(&p.leaders) {
        let _ = writeln!(
            out,
            "{} {} {} {} {}",
            pair.point,
            pair.label,
            leader.to.x,
            leader.to.y,
            level_token(pair.level)
        );
    }
    out.push_str("unassigned");
    for id in &p.assignment.unassigned {
        let _ = write!(out, " {id}");
    }
    out.push('\n');
    let q = &p.quality;
    let _ = writeln!(
        out,
        "quality total_leader_length={} max_leader_length={} leader_label_crossings={} leader_leader_crossings={} unlabeled={}",
        q.total_leader_length, q.max_leader_length, q.leader_label_crossings, q.leader_leader_crossings, q.unlabeled
    );
    out
}

pub fn save_placement(p: &Placement, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    fs::write(path, format_placement(p)).map_err(|e| Error::io(path, e))
}

pub fn load_placement(path: impl AsRef<Path>) -> Result<PlacementRecord> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_placement(&text)
}

/// `key=value` pairs in a fixed order.
fn kv<'a>(line: usize, fields: &[&'a str], keys: &[&str]) -> Result<Vec<&'a str>> {
    if fields.len() != keys.len() {
        return Err(Error::parse(line, keys.join(","), format!("expected {} key=value pairs", keys.len())));
    }
    fields
        .iter()
        .zip(keys)
        .map(|(f, k)| match f.split_once('=') {
            Some((key, value)) if key == *k => Ok(value),
            _ => Err(Error::parse(line, *k, format!("expected `{k}=...`, found `{f}`"))),
        })
        .collect()
}

pub fn parse_placement(text: &str) -> Result<PlacementRecord> {
    let mut lines = Lines::new(text);
    let (line, v) = lines.keyed("config")?;
    let c = kv(line, &v, &["w", "h", "lsd", "ssd", "k"])?;
    let config = LabelConfig {
        w: finite(line, "w", c.first())?,
        h: finite(line, "h", c.get(1))?,
        lsd: finite(line, "lsd", c.get(2))?,
        ssd: finite(line, "ssd", c.get(3))?,
        k: None,
    };
    let k: usize = field(line, "k", c.get(4))?;
    let config = LabelConfig { k: Some(k), ..config };
    let (line, v) = lines.keyed("m")?;
    let m: usize = field(line, "m", v.first())?;

    let mut out = Vec::new();
    let (unassigned_line, unassigned_fields) = loop {
        let (line, f) = lines.next_line("placement")?;
        if f[0] == "unassigned" {
            break (line, f[1..].to_vec());
        }
        if f.len() != 5 {
            return Err(Error::parse(
                line,
                "placement",
                format!("expected `point_id label_id corner_x corner_y level`, got {} fields", f.len()),
            ));
        }
        let level = if f[4] == "fallback" {
            Level::Fallback
        } else {
            Level::Rank(field(line, "level", f.get(4))?)
        };
        out.push(PlacementLine {
            point: PointId(field(line, "point_id", f.first())?),
            label: LabelId(field(line, "label_id", f.get(1))?),
            corner: Point::new(finite(line, "corner_x", f.get(2))?, finite(line, "corner_y", f.get(3))?),
            level,
        });
    };
    let unassigned = unassigned_fields
        .iter()
        .map(|raw| field(unassigned_line, "unassigned", Some(raw)).map(PointId))
        .collect::<Result<Vec<_>>>()?;

    let (line, v) = lines.keyed("quality")?;
    let q = kv(
        line,
        &v,
        &[
            "total_leader_length",
            "max_leader_length",
            "leader_label_crossings",
            "leader_leader_crossings",
            "unlabeled",
        ],
    )?;
    let quality = QualityReport {
        total_leader_length: finite(line, "total_leader_length", q.first())?,
        max_leader_length: finite(line, "max_leader_length", q.get(1))?,
        leader_label_crossings: field(line, "leader_label_crossings", q.get(2))?,
        leader_leader_crossings: field(line, "leader_leader_crossings", q.get(3))?,
        unlabeled: field(line, "unlabeled", q.get(4))?,
    };
    Ok(PlacementRecord {
        config,
        k,
        m,
        lines: out,
        unassigned,
        quality,
    })
}
