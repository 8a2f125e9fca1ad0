//! Standalone SVG line plots of log channels.
//!
//! A figure is a vertical stack of panels sharing the time axis. Angles and
//! rates are drawn in degrees, torques in N·m.

use std::fmt::Write as _;
use std::path::Path;

use astsm_core::TrajectoryLogD;
use thiserror::Error;

const WIDTH: f64 = 860.0;
const PANEL_HEIGHT: f64 = 210.0;
const TITLE_HEIGHT: f64 = 34.0;
const LEFT: f64 = 78.0;
const RIGHT: f64 = 150.0;
const PANEL_TOP: f64 = 22.0;
const PANEL_BOTTOM: f64 = 40.0;
const PALETTE: [&str; 6] = ["#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b"];

#[derive(Debug, Error, PartialEq)]
pub enum SvgError {
    #[error("no channels selected")]
    NoChannels,
    #[error("no logs to plot")]
    NoLogs,
    #[error("unknown channel `{0}`")]
    UnknownChannel(String),
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Quantity {
    Angle,
    Rate,
    Surface,
    Torque,
    Gain,
}

fn quantity(channel: &str) -> Quantity {
    match channel {
        "phi" | "theta" | "psi" | "phi_d" | "theta_d" | "psi_d" => Quantity::Angle,
        "p" | "q" | "r" => Quantity::Rate,
        c if c.starts_with("sig") => Quantity::Surface,
        c if c.starts_with('u') || c.starts_with('d') => Quantity::Torque,
        _ => Quantity::Gain,
    }
}

fn scale(q: Quantity) -> f64 {
    match q {
        Quantity::Angle | Quantity::Rate => 180.0 / std::f64::consts::PI,
        _ => 1.0,
    }
}

/// Axis label for a channel in display units.
pub fn axis_label(channel: &str) -> String {
    let name = match channel {
        "phi" => "φ",
        "theta" => "θ",
        "psi" => "ψ",
        c if c.starts_with('a') && c.len() == 2 => return format!("α{} [-]", &c[1..]),
        c if c.starts_with('b') && c.len() == 2 => return format!("β{} [-]", &c[1..]),
        c if c.starts_with("nu") => return format!("ν{} [N·m]", &c[2..]),
        c => c,
    };
    let unit = match quantity(channel) {
        Quantity::Angle => "deg",
        Quantity::Rate => "deg/s",
        Quantity::Surface => "rad/s",
        Quantity::Torque => "N·m",
        Quantity::Gain => "-",
    };
    format!("{name} [{unit}]")
}

#[derive(Debug, Clone)]
pub struct Series<'a> {
    pub label: String,
    pub log: &'a TrajectoryLogD,
}

#[derive(Debug, Clone)]
pub struct Panel<'a> {
    pub title: String,
    pub channel: String,
    pub series: Vec<Series<'a>>,
    /// Dashed reference trace, taken from `<channel>_d` of this log.
    pub reference: Option<&'a TrajectoryLogD>,
}

#[derive(Debug, Clone)]
pub struct Figure<'a> {
    pub title: String,
    pub panels: Vec<Panel<'a>>,
}

fn check_channel(channel: &str) -> Result<(), SvgError> {
    TrajectoryLogD::column_index(channel).map(|_| ()).ok_or_else(|| SvgError::UnknownChannel(channel.to_owned()))
}

fn reference_channel(channel: &str) -> Option<String> {
    matches!(channel, "phi" | "theta" | "psi").then(|| format!("{channel}_d"))
}

impl<'a> Figure<'a> {
    /// One panel per channel with every log overlaid.
    pub fn overlay(title: &str, logs: &[Series<'a>], channels: &[&str]) -> Result<Self, SvgError> {
        if channels.is_empty() {
            return Err(SvgError::NoChannels);
        }
        if logs.is_empty() {
            return Err(SvgError::NoLogs);
        }
        let mut panels = Vec::new();
        for &channel in channels {
            check_channel(channel)?;
            panels.push(Panel {
                title: axis_label(channel),
                channel: channel.to_owned(),
                series: logs.to_vec(),
                reference: reference_channel(channel).map(|_| logs[0].log),
            });
        }
        Ok(Self { title: title.to_owned(), panels })
    }

    /// One panel per log for a single channel.
    pub fn stacked(title: &str, logs: &[Series<'a>], channel: &str) -> Result<Self, SvgError> {
        if logs.is_empty() {
            return Err(SvgError::NoLogs);
        }
        check_channel(channel)?;
        let panels = logs
            .iter()
            .map(|s| Panel {
                title: format!("{}: {}", s.label, axis_label(channel)),
                channel: channel.to_owned(),
                series: vec![s.clone()],
                reference: reference_channel(channel).map(|_| s.log),
            })
            .collect();
        Ok(Self { title: title.to_owned(), panels })
    }

    pub fn render(&self) -> String {
        let height = TITLE_HEIGHT + PANEL_HEIGHT * self.panels.len() as f64;
        let mut s = String::new();
        let _ = writeln!(
            s,
            r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{height}" viewBox="0 0 {WIDTH} {height}" font-family="sans-serif" font-size="11">"#
        );
        let _ = writeln!(s, r#"<rect width="100%" height="100%" fill="white"/>"#);
        let _ = writeln!(
            s,
            r#"<text x="{:.1}" y="22" text-anchor="middle" font-size="15">{}</text>"#,
            WIDTH / 2.0,
            escape(&self.title)
        );
        for (i, panel) in self.panels.iter().enumerate() {
            render_panel(&mut s, panel, TITLE_HEIGHT + PANEL_HEIGHT * i as f64);
        }
        s.push_str("</svg>\n");
        s
    }
}

fn escape(text: &str) -> String {
    text.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

fn samples(log: &TrajectoryLogD, channel: &str) -> Vec<(f64, f64)> {
    let k = scale(quantity(channel));
    let values = log.channel(channel).unwrap_or_default();
    log.rows.iter().zip(values).map(|(r, v)| (r.t, v * k)).collect()
}

/// Tick spacing of 1, 2 or 5 times a power of ten giving about `target` intervals.
fn nice_step(span: f64, target: f64) -> f64 {
    let raw = span / target;
    let magnitude = 10f64.powf(raw.log10().floor());
    let fraction = raw / magnitude;
    let nice = if fraction < 1.5 {
        1.0
    } else if fraction < 3.5 {
        2.0
    } else if fraction < 7.5 {
        5.0
    } else {
        10.0
    };
    nice * magnitude
}

fn ticks(lo: f64, hi: f64, target: f64) -> (f64, Vec<f64>) {
    let step = nice_step(hi - lo, target);
    let first = (lo / step).ceil() as i64;
    let last = (hi / step).floor() as i64;
    (step, (first..=last).map(|k| k as f64 * step).collect())
}

fn tick_label(v: f64, step: f64) -> String {
    let decimals = if step >= 1.0 { 0 } else { (-step.log10().floor()) as usize };
    let v = if v.abs() < step * 1e-9 { 0.0 } else { v };
    format!("{v:.decimals$}")
}

fn render_panel(s: &mut String, panel: &Panel<'_>, top: f64) {
    let x0 = LEFT;
    let x1 = WIDTH - RIGHT;
    let y0 = top + PANEL_TOP;
    let y1 = top + PANEL_HEIGHT - PANEL_BOTTOM;

    let mut traces: Vec<(String, Vec<(f64, f64)>)> =
        panel.series.iter().map(|srs| (srs.label.clone(), samples(srs.log, &panel.channel))).collect();
    let reference = panel.reference.zip(reference_channel(&panel.channel)).map(|(log, ch)| samples(log, &ch));

    let all = traces.iter().flat_map(|(_, pts)| pts.iter()).chain(reference.iter().flatten());
    let (mut t_lo, mut t_hi, mut v_lo, mut v_hi) = (f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY);
    for &(t, v) in all {
        t_lo = t_lo.min(t);
        t_hi = t_hi.max(t);
        if v.is_finite() {
            v_lo = v_lo.min(v);
            v_hi = v_hi.max(v);
        }
    }
    if t_hi.partial_cmp(&t_lo) != Some(std::cmp::Ordering::Greater) {
        t_hi = t_lo + 1.0;
    }
    if !(v_lo.is_finite() && v_hi.is_finite()) {
        (v_lo, v_hi) = (-1.0, 1.0);
    }
    let pad = if v_hi > v_lo { 0.06 * (v_hi - v_lo) } else { v_lo.abs().max(1.0) * 0.1 };
    let (v_lo, v_hi) = (v_lo - pad, v_hi + pad);

    let px = |t: f64| x0 + (t - t_lo) / (t_hi - t_lo) * (x1 - x0);
    let py = |v: f64| y1 - (v - v_lo) / (v_hi - v_lo) * (y1 - y0);

    let _ = writeln!(s, r#"<g>"#);
    let _ = writeln!(s, r#"<text x="{x0:.1}" y="{:.1}" font-size="12">{}</text>"#, y0 - 6.0, escape(&panel.title));
    let (vstep, vticks) = ticks(v_lo, v_hi, 5.0);
    for v in vticks {
        let y = py(v);
        let _ = writeln!(s, r##"<line x1="{x0:.1}" y1="{y:.2}" x2="{x1:.1}" y2="{y:.2}" stroke="#e4e4e4"/>"##);
        let _ = writeln!(
            s,
            r#"<text x="{:.1}" y="{:.2}" text-anchor="end">{}</text>"#,
            x0 - 6.0,
            y + 4.0,
            tick_label(v, vstep)
        );
    }
    let (tstep, tticks) = ticks(t_lo, t_hi, 10.0);
    for t in tticks {
        let x = px(t);
        let _ = writeln!(s, r##"<line x1="{x:.2}" y1="{y0:.1}" x2="{x:.2}" y2="{y1:.1}" stroke="#f0f0f0"/>"##);
        let _ = writeln!(s, r#"<text x="{x:.2}" y="{:.1}" text-anchor="middle">{}</text>"#, y1 + 15.0, tick_label(t, tstep));
    }
    let _ = writeln!(s, r#"<text x="{:.1}" y="{:.1}" text-anchor="middle">t [s]</text>"#, (x0 + x1) / 2.0, y1 + 31.0);
    let _ = writeln!(
        s,
        r#"<rect x="{x0:.1}" y="{y0:.1}" width="{:.1}" height="{:.1}" fill="none" stroke="black"/>"#,
        x1 - x0,
        y1 - y0
    );

    let polyline = |s: &mut String, pts: &[(f64, f64)], attrs: &str| {
        let mut points = String::with_capacity(pts.len() * 16);
        for (i, &(t, v)) in pts.iter().enumerate() {
            if i > 0 {
                points.push(' ');
            }
            let _ = write!(points, "{:.2},{:.2}", px(t), py(v.clamp(v_lo, v_hi)));
        }
        let _ = writeln!(s, r#"<polyline fill="none" {attrs} points="{points}"/>"#);
    };
    if let Some(pts) = &reference {
        polyline(s, pts, r#"class="reference" stroke="black" stroke-width="1" stroke-dasharray="5,4""#);
    }
    for (i, (_, pts)) in traces.iter_mut().enumerate() {
        let color = PALETTE[i % PALETTE.len()];
        polyline(s, pts, &format!(r#"class="series" stroke="{color}" stroke-width="1.2""#));
    }

    let lx = x1 + 14.0;
    let mut ly = y0 + 12.0;
    for (i, (label, _)) in traces.iter().enumerate() {
        let color = PALETTE[i % PALETTE.len()];
        let _ = writeln!(s, r#"<line x1="{lx:.1}" y1="{ly:.1}" x2="{:.1}" y2="{ly:.1}" stroke="{color}" stroke-width="2"/>"#, lx + 18.0);
        let _ = writeln!(s, r#"<text x="{:.1}" y="{:.1}">{}</text>"#, lx + 24.0, ly + 4.0, escape(label));
        ly += 16.0;
    }
    if reference.is_some() {
        let _ = writeln!(
            s,
            r#"<line x1="{lx:.1}" y1="{ly:.1}" x2="{:.1}" y2="{ly:.1}" stroke="black" stroke-dasharray="5,4"/>"#,
            lx + 18.0
        );
        let _ = writeln!(s, r#"<text x="{:.1}" y="{:.1}">reference</text>"#, lx + 24.0, ly + 4.0);
    }
    let _ = writeln!(s, "</g>");
}

pub fn render_svg(figure: &Figure<'_>, path: &Path) -> std::io::Result<()> {
    std::fs::write(path, figure.render())
}
