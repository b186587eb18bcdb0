//! Emitted artifacts: verdict CSV, log–log SVG plots and the run manifest.

use std::fmt::Write as _;
use std::path::Path;

use sha2::{Digest, Sha256};

use super::io::{write_json, write_text, SCHEMA_VERSION};
use crate::besov::Direction;
use crate::error::{Error, Result};
use crate::verify::TheoremVerdict;

pub const VERDICT_HEADER: &str = "tag,direction,h,lhs,rhs,margin,pass,erratum_flag,hard";

pub fn verdicts_csv(verdicts: &[TheoremVerdict]) -> String {
    let mut s = String::from(VERDICT_HEADER);
    s.push('\n');
    for v in verdicts {
        let _ = writeln!(
            s,
            "{},{},{:e},{:e},{:e},{:e},{},{},{}",
            v.tag.tag(),
            v.direction.tag(),
            v.h,
            v.lhs,
            v.rhs,
            v.margin,
            v.pass,
            v.erratum_flag,
            v.hard
        );
    }
    s
}

/// One parsed verdict row.
#[derive(Debug, Clone, PartialEq)]
pub struct VerdictRow {
    pub tag: String,
    pub direction: Direction,
    pub h: f64,
    pub lhs: f64,
    pub rhs: f64,
    pub pass: bool,
    pub hard: bool,
}

pub fn parse_verdicts_csv(text: &str) -> Result<Vec<VerdictRow>> {
    let mut lines = text.lines();
    match lines.next() {
        Some(h) if h.trim() == VERDICT_HEADER => {}
        _ => return Err(Error::InvalidInput("verdict file: missing or wrong header".into())),
    }
    let mut out = Vec::new();
    for (i, line) in lines.enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let bad = |what: &str| Error::InvalidInput(format!("verdict file line {}: {what}", i + 2));
        let f: Vec<&str> = line.split(',').collect();
        if f.len() != 9 {
            return Err(bad("expected 9 fields"));
        }
        let num = |s: &str| s.parse::<f64>().map_err(|_| bad(&format!("bad number '{s}'")));
        let boolean = |s: &str| s.parse::<bool>().map_err(|_| bad(&format!("bad flag '{s}'")));
        let direction = match f[1] {
            "x" => Direction::X,
            "t" => Direction::T,
            o => return Err(bad(&format!("bad direction '{o}'"))),
        };
        out.push(VerdictRow {
            tag: f[0].to_string(),
            direction,
            h: num(f[2])?,
            lhs: num(f[3])?,
            rhs: num(f[4])?,
            pass: boolean(f[6])?,
            hard: boolean(f[8])?,
        });
    }
    Ok(out)
}

/// A named polyline on a log–log plot.
#[derive(Debug, Clone, PartialEq)]
pub struct Series {
    pub name: String,
    pub points: Vec<(f64, f64)>,
    pub dashed: bool,
}

const W: f64 = 640.0;
const H: f64 = 420.0;
const PAD: f64 = 60.0;
const COLORS: [&str; 6] = ["#1f4e79", "#b03a2e", "#1e8449", "#7d3c98", "#b9770e", "#555555"];

/// Log–log plot with a fixed viewport. Non-positive points are dropped;
/// with nothing left the plot carries a "no data" marker.
pub fn loglog_svg(title: &str, series: &[Series], notes: &[String]) -> String {
    let mut s = String::new();
    let _ = writeln!(
        s,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{W}\" height=\"{H}\" viewBox=\"0 0 {W} {H}\">"
    );
    let _ = writeln!(s, "<rect x=\"0\" y=\"0\" width=\"{W}\" height=\"{H}\" fill=\"white\"/>");
    let _ = writeln!(s, "<text x=\"{}\" y=\"24\" font-size=\"15\" text-anchor=\"middle\">{}</text>", W / 2.0, escape(title));
    let pts: Vec<(f64, f64)> = series
        .iter()
        .flat_map(|se| se.points.iter().copied())
        .filter(|(x, y)| *x > 0.0 && *y > 0.0 && x.is_finite() && y.is_finite())
        .map(|(x, y)| (x.log10(), y.log10()))
        .collect();
    if pts.is_empty() {
        let _ = writeln!(
            s,
            "<text x=\"{}\" y=\"{}\" font-size=\"20\" text-anchor=\"middle\" fill=\"#888888\">no data</text>",
            W / 2.0,
            H / 2.0
        );
        s.push_str("</svg>\n");
        return s;
    }
    let (mut x0, mut x1, mut y0, mut y1) = (f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY);
    for (x, y) in &pts {
        x0 = x0.min(*x);
        x1 = x1.max(*x);
        y0 = y0.min(*y);
        y1 = y1.max(*y);
    }
    if x1 - x0 < 1e-9 {
        x0 -= 0.5;
        x1 += 0.5;
    }
    if y1 - y0 < 1e-9 {
        y0 -= 0.5;
        y1 += 0.5;
    }
    let px = |x: f64| PAD + (x - x0) / (x1 - x0) * (W - 2.0 * PAD);
    let py = |y: f64| H - PAD - (y - y0) / (y1 - y0) * (H - 2.0 * PAD);
    let _ = writeln!(
        s,
        "<rect x=\"{PAD}\" y=\"{PAD}\" width=\"{}\" height=\"{}\" fill=\"none\" stroke=\"black\"/>",
        W - 2.0 * PAD,
        H - 2.0 * PAD
    );
    let _ = writeln!(s, "<text x=\"{}\" y=\"{}\" font-size=\"12\" text-anchor=\"middle\">log10 h [{:.3}, {:.3}]</text>", W / 2.0, H - 20.0, x0, x1);
    let _ = writeln!(
        s,
        "<text x=\"16\" y=\"{}\" font-size=\"12\" transform=\"rotate(-90 16 {})\" text-anchor=\"middle\">log10 value [{:.3}, {:.3}]</text>",
        H / 2.0,
        H / 2.0,
        y0,
        y1
    );
    for (i, se) in series.iter().enumerate() {
        let color = COLORS[i % COLORS.len()];
        let p: Vec<String> = se
            .points
            .iter()
            .filter(|(x, y)| *x > 0.0 && *y > 0.0 && x.is_finite() && y.is_finite())
            .map(|(x, y)| format!("{:.2},{:.2}", px(x.log10()), py(y.log10())))
            .collect();
        if p.is_empty() {
            continue;
        }
        let dash = if se.dashed { " stroke-dasharray=\"6 4\"" } else { "" };
        let _ = writeln!(s, "<polyline points=\"{}\" fill=\"none\" stroke=\"{color}\" stroke-width=\"2\"{dash}/>", p.join(" "));
        for q in &p {
            let (cx, cy) = q.split_once(',').unwrap();
            let _ = writeln!(s, "<circle cx=\"{cx}\" cy=\"{cy}\" r=\"3\" fill=\"{color}\"/>");
        }
        let _ = writeln!(
            s,
            "<text x=\"{}\" y=\"{}\" font-size=\"12\" fill=\"{color}\">{}</text>",
            PAD + 10.0,
            PAD + 16.0 + 15.0 * i as f64,
            escape(&se.name)
        );
    }
    for (i, n) in notes.iter().enumerate() {
        let _ = writeln!(
            s,
            "<text x=\"{}\" y=\"{}\" font-size=\"12\" text-anchor=\"end\">{}</text>",
            W - PAD - 10.0,
            H - PAD - 10.0 - 15.0 * i as f64,
            escape(n)
        );
    }
    s.push_str("</svg>\n");
    s
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

/// Plots lhs against h per (tag, direction), with the right-hand side dashed.
pub fn verdict_plot(title: &str, rows: &[VerdictRow]) -> String {
    let mut keys: Vec<(String, Direction)> = Vec::new();
    for r in rows {
        if !keys.iter().any(|k| k.0 == r.tag && k.1 == r.direction) {
            keys.push((r.tag.clone(), r.direction));
        }
    }
    let mut series = Vec::new();
    for (tag, dir) in keys {
        let sel: Vec<&VerdictRow> = rows.iter().filter(|r| r.tag == tag && r.direction == dir && r.hard).collect();
        series.push(Series {
            name: format!("{tag} {} lhs", dir.tag()),
            points: sel.iter().map(|r| (r.h, r.lhs)).collect(),
            dashed: false,
        });
        series.push(Series {
            name: format!("{tag} {} bound", dir.tag()),
            points: sel.iter().map(|r| (r.h, r.rhs)).collect(),
            dashed: true,
        });
    }
    let failed = rows.iter().filter(|r| r.hard && !r.pass).count();
    let notes = if rows.is_empty() { vec![] } else { vec![format!("{} verdicts, {failed} hard failures", rows.len())] };
    loglog_svg(title, &series, &notes)
}

#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct ManifestFile {
    pub name: String,
    pub sha256: String,
}

#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct RunManifest {
    pub schema_version: String,
    pub toolkit_version: String,
    pub command: String,
    pub config: serde_json::Value,
    pub files: Vec<ManifestFile>,
}

pub fn sha256_file(path: &Path) -> Result<String> {
    let bytes = std::fs::read(path).map_err(|e| Error::InvalidInput(format!("cannot read {}: {e}", path.display())))?;
    Ok(Sha256::digest(&bytes).iter().map(|b| format!("{b:02x}")).collect())
}

/// Writes `manifest.json` listing the checksums of `files` (relative to `dir`).
pub fn write_manifest(dir: &Path, command: &str, config: serde_json::Value, files: &[String]) -> Result<()> {
    let mut entries = Vec::new();
    for f in files {
        entries.push(ManifestFile { name: f.clone(), sha256: sha256_file(&dir.join(f))? });
    }
    let m = RunManifest {
        schema_version: SCHEMA_VERSION.into(),
        toolkit_version: env!("CARGO_PKG_VERSION").into(),
        command: command.into(),
        config,
        files: entries,
    };
    write_json(&dir.join("manifest.json"), &m)
}

pub fn write_plot(path: &Path, svg: &str) -> Result<()> {
    write_text(path, svg)
}
