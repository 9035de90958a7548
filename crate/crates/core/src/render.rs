//! SVG output for candidate grids and final placements.
//!
//! Coordinates in the document are map units. A single group transform flips
//! the y axis so that the stored numbers read the same as in the instance
//! file. Only `rect`, `circle` and `line` carry scene content; the map frame
//! is a `path` and ids are `text`, so counting the first three element kinds
//! recovers labels + points + leaders.

use std::collections::HashSet;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{LabelId, PointFeature};
use crate::grid::CandidateLabelSet;
use crate::leader::LeaderSegment;
use crate::matching::Assignment;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RenderStyle {
    pub label_stroke: f64,
    pub leader_stroke: f64,
    pub frame_stroke: f64,
    pub point_radius: f64,
    pub font_size: f64,
    pub label_color: String,
    pub assigned_fill: String,
    pub unused_color: String,
    pub point_color: String,
    pub leader_color: String,
    pub frame_color: String,
    /// Draw every candidate when no assignment is given.
    pub show_grid: bool,
    /// Draw unassigned candidates next to an assignment.
    pub show_unused: bool,
    pub show_points: bool,
    pub show_leaders: bool,
    pub show_label_ids: bool,
}

impl Default for RenderStyle {
    fn default() -> Self {
        RenderStyle {
            label_stroke: 2.0,
            leader_stroke: 2.0,
            frame_stroke: 4.0,
            point_radius: 8.0,
            font_size: 28.0,
            label_color: "#1f4e9c".into(),
            assigned_fill: "#cfe0ff".into(),
            unused_color: "#b0b0b0".into(),
            point_color: "#c0392b".into(),
            leader_color: "#222222".into(),
            frame_color: "#000000".into(),
            show_grid: true,
            show_unused: false,
            show_points: true,
            show_leaders: true,
            show_label_ids: false,
        }
    }
}

impl RenderStyle {
    pub fn validate(&self) -> Result<()> {
        let dims = [
            ("label_stroke", self.label_stroke),
            ("leader_stroke", self.leader_stroke),
            ("frame_stroke", self.frame_stroke),
            ("point_radius", self.point_radius),
            ("font_size", self.font_size),
        ];
        for (name, v) in dims {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::Validation(format!("style {name} must be positive, got {v}")));
            }
        }
        Ok(())
    }

    pub fn from_toml(text: &str) -> Result<Self> {
        let style: RenderStyle =
            toml::from_str(text).map_err(|e| Error::Validation(format!("style: {}", e.message())))?;
        style.validate()?;
        Ok(style)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_toml(&text)
    }
}

/// Shortest round-trip form, so equal inputs give equal bytes.
fn num(x: f64) -> String {
    if x == 0.0 {
        "0".into()
    } else {
        format!("{x}")
    }
}

pub fn render_scene(
    points: &[PointFeature],
    cls: &CandidateLabelSet,
    assignment: Option<&Assignment>,
    leaders: Option<&[LeaderSegment]>,
    style: &RenderStyle,
) -> Result<String> {
    style.validate()?;
    let b = cls.bounds();

    let assigned: Option<HashSet<LabelId>> = match assignment {
        Some(a) => {
            let mut set = HashSet::with_capacity(a.pairs.len());
            for pair in &a.pairs {
                if cls.label(pair.label).is_none() {
                    return Err(Error::InconsistentScene(format!(
                        "assignment uses label {} but the candidate set has {}",
                        pair.label,
                        cls.m()
                    )));
                }
                set.insert(pair.label);
            }
            Some(set)
        }
        None => None,
    };
    if let Some(ls) = leaders {
        if let Some(bad) = ls.iter().find(|l| cls.label(l.label).is_none()) {
            return Err(Error::InconsistentScene(format!(
                "leader uses label {} but the candidate set has {}",
                bad.label,
                cls.m()
            )));
        }
    }

    let pad = style.frame_stroke.max(style.point_radius);
    let mut s = String::with_capacity(128 * (cls.m() + points.len()) + 512);
    let _ = writeln!(s, r#"<?xml version="1.0" encoding="UTF-8"?>"#);
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" viewBox="{} {} {} {}" width="{}" height="{}">"#,
        num(b.x_min - pad),
        num(b.y_min - pad),
        num(b.width() + 2.0 * pad),
        num(b.height() + 2.0 * pad),
        num(b.width() / 4.0),
        num(b.height() / 4.0),
    );
    let _ = writeln!(s, r#"<g transform="matrix(1 0 0 -1 0 {})">"#, num(b.y_min + b.y_max));
    let _ = writeln!(
        s,
        r#"<path d="M{x0} {y0}H{x1}V{y1}H{x0}Z" fill="none" stroke="{}" stroke-width="{}"/>"#,
        style.frame_color,
        num(style.frame_stroke),
        x0 = num(b.x_min),
        y0 = num(b.y_min),
        x1 = num(b.x_max),
        y1 = num(b.y_max),
    );

    let _ = writeln!(s, r#"<g id="labels" stroke-width="{}">"#, num(style.label_stroke));
    for label in cls.labels() {
        let (fill, stroke) = match &assigned {
            Some(set) if set.contains(&label.id) => (style.assigned_fill.as_str(), style.label_color.as_str()),
            Some(_) if style.show_unused => ("none", style.unused_color.as_str()),
            None if style.show_grid => ("none", style.label_color.as_str()),
            _ => continue,
        };
        let _ = writeln!(
            s,
            r#"<rect id="l{}" x="{}" y="{}" width="{}" height="{}" fill="{fill}" stroke="{stroke}"/>"#,
            label.id,
            num(label.left()),
            num(label.bottom()),
            num(label.w),
            num(label.h),
        );
    }
    let _ = writeln!(s, "</g>");

    if style.show_leaders {
        if let Some(ls) = leaders {
            let mut ls: Vec<&LeaderSegment> = ls.iter().collect();
            ls.sort_by_key(|l| l.point);
            let _ = writeln!(
                s,
                r#"<g id="leaders" stroke="{}" stroke-width="{}">"#,
                style.leader_color,
                num(style.leader_stroke)
            );
            for l in ls {
                let _ = writeln!(
                    s,
                    r#"<line x1="{}" y1="{}" x2="{}" y2="{}"/>"#,
                    num(l.from.x),
                    num(l.from.y),
                    num(l.to.x),
                    num(l.to.y)
                );
            }
            let _ = writeln!(s, "</g>");
        }
    }

    if style.show_points {
        let mut ps: Vec<&PointFeature> = points.iter().collect();
        ps.sort_by_key(|p| p.id);
        let _ = writeln!(s, r#"<g id="points" fill="{}">"#, style.point_color);
        for p in ps {
            let _ = writeln!(
                s,
                r#"<circle id="p{}" cx="{}" cy="{}" r="{}"/>"#,
                p.id,
                num(p.x),
                num(p.y),
                num(style.point_radius)
            );
        }
        let _ = writeln!(s, "</g>");
    }
    let _ = writeln!(s, "</g>");

    if style.show_label_ids {
        // outside the flipped group so glyphs are upright
        let _ = writeln!(
            s,
            r#"<g id="label-ids" font-family="sans-serif" font-size="{}" text-anchor="middle">"#,
            num(style.font_size)
        );
        for label in cls.labels() {
            if assigned.as_ref().is_some_and(|set| !set.contains(&label.id)) {
                continue;
            }
            let _ = writeln!(
                s,
                r#"<text x="{}" y="{}">{}</text>"#,
                num(label.cx),
                num(b.y_min + b.y_max - label.cy),
                label.id
            );
        }
        let _ = writeln!(s, "</g>");
    }
    s.push_str("</svg>\n");
    Ok(s)
}

/// `<dir>/<id>_<stage>.svg`.
pub fn scene_path(dir: &Path, instance_id: &str, stage: Stage) -> PathBuf {
    dir.join(format!("{instance_id}_{}.svg", stage.as_str()))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Stage {
    Grid,
    Final,
}

impl Stage {
    pub fn as_str(self) -> &'static str {
        match self {
            Stage::Grid => "grid",
            Stage::Final => "final",
        }
    }
}

pub fn write_scene(path: &Path, doc: &str) -> Result<()> {
    std::fs::write(path, doc).map_err(|e| Error::io(path, e))
}
