// SPDX-License-Identifier: Apache-2.0

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use super::ReportError;
use crate::sampling::MentionCountHistogram;
use crate::stats::DistributionTable;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum FigureKind {
    /// Software ranked by mention count, one point per rank.
    RankCountDistribution,
    /// One group of bars per category, one bar per series.
    GroupedBars,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Axis {
    pub label: String,
    pub log: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Point {
    pub label: String,
    pub value: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Series {
    pub name: String,
    pub points: Vec<Point>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FigureData {
    pub kind: FigureKind,
    pub title: String,
    pub x: Axis,
    pub y: Axis,
    pub series: Vec<Series>,
}

impl FigureData {
    /// Values are finite and log axes only see positive values.
    pub fn check(&self) -> Result<(), ReportError> {
        for s in &self.series {
            for p in &s.points {
                if !p.value.is_finite() {
                    return Err(ReportError::InvalidFigure(format!("{}: {} is not finite", s.name, p.label)));
                }
                if self.y.log && p.value <= 0.0 {
                    return Err(ReportError::InvalidFigure(format!("{}: {} is not positive on a log axis", s.name, p.label)));
                }
            }
        }
        Ok(())
    }
}

/// A figure's data and its SVG rendering.
#[derive(Clone, Debug, PartialEq)]
pub struct Figure {
    pub data: FigureData,
    pub svg: String,
}

/// Mention counts by rank, most-mentioned software first, on a log rank axis.
pub fn render_distribution_figure(hist: &MentionCountHistogram, title: &str) -> Result<Figure, ReportError> {
    if hist.entries.is_empty() {
        return Err(ReportError::InvalidFigure("empty histogram".into()));
    }
    let data = FigureData {
        kind: FigureKind::RankCountDistribution,
        title: title.to_string(),
        x: Axis {
            label: "distinct software (rank, log)".into(),
            log: true,
        },
        y: Axis {
            label: "mentions per distinct software".into(),
            log: false,
        },
        series: vec![Series {
            name: "mentions".into(),
            points: hist
                .entries
                .iter()
                .map(|(k, c)| Point {
                    label: k.clone(),
                    value: *c as f64,
                })
                .collect(),
        }],
    };
    data.check()?;
    let svg = rank_svg(&data);
    Ok(Figure { data, svg })
}

/// Grouped bars of percents, one series per named distribution. All
/// distributions must have the same dimension and categories in the same
/// order.
pub fn render_comparison_figure(dists: &[(&str, &DistributionTable)], title: &str) -> Result<Figure, ReportError> {
    let Some((_, first)) = dists.first() else {
        return Err(ReportError::InvalidFigure("no distributions".into()));
    };
    let universe: Vec<&str> = first.categories().collect();
    for (name, d) in dists {
        if d.dimension != first.dimension || d.categories().ne(universe.iter().copied()) {
            return Err(ReportError::UniverseMismatch(format!(
                "{name} has {}: {:?}, expected {}: {:?}",
                d.dimension,
                d.categories().collect::<Vec<_>>(),
                first.dimension,
                universe
            )));
        }
    }
    let data = FigureData {
        kind: FigureKind::GroupedBars,
        title: title.to_string(),
        x: Axis {
            label: first.dimension.clone(),
            log: false,
        },
        y: Axis {
            label: "percent".into(),
            log: false,
        },
        series: dists
            .iter()
            .map(|(name, d)| Series {
                name: name.to_string(),
                points: d
                    .rows
                    .iter()
                    .map(|r| Point {
                        label: r.category.clone(),
                        value: r.percent.map_or(0.0, |p| p.as_f64()),
                    })
                    .collect(),
            })
            .collect(),
    };
    data.check()?;
    let svg = bars_svg(&data);
    Ok(Figure { data, svg })
}

const W: f64 = 640.0;
const H: f64 = 400.0;
const LEFT: f64 = 70.0;
const RIGHT: f64 = 20.0;
const TOP: f64 = 40.0;
const BOTTOM: f64 = 60.0;
const PALETTE: [&str; 6] = ["#4c72b0", "#dd8452", "#55a868", "#c44e52", "#8172b3", "#937860"];

fn esc(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;").replace('"', "&quot;")
}

fn header(out: &mut String, d: &FigureData) {
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" viewBox="0 0 {W} {H}" font-family="sans-serif" font-size="11">"#
    );
    let _ = writeln!(out, r#"<title>{}</title>"#, esc(&d.title));
    let _ = writeln!(out, r#"<rect width="{W}" height="{H}" fill="white"/>"#);
    let _ = writeln!(
        out,
        r#"<text x="{}" y="20" text-anchor="middle" font-size="13">{}</text>"#,
        W / 2.0,
        esc(&d.title)
    );
    let (x0, y0, x1, y1) = (LEFT, H - BOTTOM, W - RIGHT, TOP);
    let _ = writeln!(
        out,
        r#"<path d="M{x0} {y1}V{y0}H{x1}" fill="none" stroke="black"/>"#
    );
    let _ = writeln!(
        out,
        r#"<text x="{}" y="{}" text-anchor="middle">{}</text>"#,
        (x0 + x1) / 2.0,
        H - 15.0,
        esc(&d.x.label)
    );
    let _ = writeln!(
        out,
        r#"<text x="15" y="{}" text-anchor="middle" transform="rotate(-90 15 {})">{}</text>"#,
        (y0 + y1) / 2.0,
        (y0 + y1) / 2.0,
        esc(&d.y.label)
    );
}

/// Rounded tick step giving about five ticks up to `max`.
fn tick_step(max: f64) -> f64 {
    let raw = max / 5.0;
    let mag = 10f64.powf(raw.log10().floor());
    [1.0, 2.0, 5.0, 10.0]
        .into_iter()
        .map(|m| m * mag)
        .find(|s| *s >= raw)
        .unwrap_or(10.0 * mag)
}

fn y_ticks(out: &mut String, max: f64) -> f64 {
    let step = tick_step(max.max(1.0));
    let top = (max / step).ceil().max(1.0) * step;
    let mut v = 0.0;
    while v <= top + step / 2.0 {
        let y = H - BOTTOM - v / top * (H - BOTTOM - TOP);
        let _ = writeln!(
            out,
            r#"<path d="M{} {y:.2}h-4" stroke="black"/><text x="{}" y="{:.2}" text-anchor="end">{}</text>"#,
            LEFT,
            LEFT - 6.0,
            y + 4.0,
            trim(v)
        );
        v += step;
    }
    top
}

fn trim(v: f64) -> String {
    let s = format!("{v:.2}");
    s.trim_end_matches('0').trim_end_matches('.').to_string()
}

fn rank_svg(d: &FigureData) -> String {
    let mut out = String::new();
    header(&mut out, d);
    let pts = &d.series[0].points;
    let n = pts.len() as f64;
    let max = pts.iter().map(|p| p.value).fold(0.0, f64::max);
    let top = y_ticks(&mut out, max);
    let span = (n.log10()).max(1.0);
    let x_of = |rank: f64| LEFT + rank.log10() / span * (W - LEFT - RIGHT);
    let mut decade = 1.0;
    while decade <= n.max(10.0) {
        let x = x_of(decade);
        let _ = writeln!(
            out,
            r#"<path d="M{x:.2} {}v4" stroke="black"/><text x="{x:.2}" y="{}" text-anchor="middle">{}</text>"#,
            H - BOTTOM,
            H - BOTTOM + 16.0,
            decade
        );
        decade *= 10.0;
    }
    // Consecutive points on the same pixel collapse into one vertex.
    let mut path = String::new();
    let mut last = (f64::NAN, f64::NAN);
    for (i, p) in pts.iter().enumerate() {
        let x = (x_of(i as f64 + 1.0) * 10.0).round() / 10.0;
        let y = ((H - BOTTOM - p.value / top * (H - BOTTOM - TOP)) * 10.0).round() / 10.0;
        if (x, y) == last {
            continue;
        }
        let _ = write!(path, "{}{x:.1} {y:.1}", if path.is_empty() { "M" } else { "L" });
        last = (x, y);
    }
    let _ = writeln!(out, r#"<path d="{path}" fill="none" stroke="{}" stroke-width="1.5"/>"#, PALETTE[0]);
    out.push_str("</svg>\n");
    out
}

fn bars_svg(d: &FigureData) -> String {
    let mut out = String::new();
    header(&mut out, d);
    let max = d
        .series
        .iter()
        .flat_map(|s| s.points.iter().map(|p| p.value))
        .fold(0.0, f64::max);
    let top = y_ticks(&mut out, max);
    let groups = d.series.first().map_or(0, |s| s.points.len()).max(1);
    let group_w = (W - LEFT - RIGHT) / groups as f64;
    let bar_w = group_w * 0.8 / d.series.len() as f64;
    for g in 0..groups {
        let gx = LEFT + g as f64 * group_w;
        if let Some(p) = d.series[0].points.get(g) {
            let _ = writeln!(
                out,
                r#"<text x="{:.2}" y="{}" text-anchor="middle">{}</text>"#,
                gx + group_w / 2.0,
                H - BOTTOM + 16.0,
                esc(&p.label)
            );
        }
        for (si, s) in d.series.iter().enumerate() {
            let Some(p) = s.points.get(g) else { continue };
            let h = p.value / top * (H - BOTTOM - TOP);
            let _ = writeln!(
                out,
                r#"<rect x="{:.2}" y="{:.2}" width="{:.2}" height="{:.2}" fill="{}"><title>{}: {} {}</title></rect>"#,
                gx + group_w * 0.1 + si as f64 * bar_w,
                H - BOTTOM - h,
                bar_w,
                h,
                PALETTE[si % PALETTE.len()],
                esc(&s.name),
                esc(&p.label),
                trim(p.value)
            );
        }
    }
    for (si, s) in d.series.iter().enumerate() {
        let y = TOP + 4.0 + si as f64 * 14.0;
        let _ = writeln!(
            out,
            r#"<rect x="{}" y="{y}" width="10" height="10" fill="{}"/><text x="{}" y="{}">{}</text>"#,
            W - RIGHT - 120.0,
            PALETTE[si % PALETTE.len()],
            W - RIGHT - 105.0,
            y + 9.0,
            esc(&s.name)
        );
    }
    out.push_str("</svg>\n");
    out
}
