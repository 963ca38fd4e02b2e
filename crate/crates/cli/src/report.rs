//! Report files: CSV, JSON, SVG and the run manifest.
//!
//! Data files are built in memory and hashed as written. Floats go through
//! `f64`'s `Display`, the shortest decimal that parses back to the same bits.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::config::Emit;
use crate::error::{io_error, CliError};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FileEntry {
    pub name: String,
    pub sha256: String,
    pub bytes: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WallClock {
    /// Seconds since the Unix epoch at start.
    pub started: u64,
    pub elapsed_seconds: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub experiment: String,
    pub version: String,
    /// sha256 of the canonical rendering of the effective config.
    pub config_hash: String,
    pub seed: Option<u64>,
    pub wall_clock: WallClock,
    pub files: Vec<FileEntry>,
}

pub const MANIFEST: &str = "manifest.json";

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

pub fn float(v: f64) -> String {
    format!("{v}")
}

/// A flat line plot.
pub struct Plot {
    pub title: String,
    pub x_label: &'static str,
    pub y_label: &'static str,
    pub points: Vec<(f64, f64)>,
}

/// Single writer for one run's output directory.
pub struct Emitter {
    dir: PathBuf,
    emit: Emit,
    files: Vec<FileEntry>,
}

impl Emitter {
    pub fn new(dir: &Path, emit: Emit) -> Result<Self, CliError> {
        fs::create_dir_all(dir).map_err(io_error(dir))?;
        Ok(Self {
            dir: dir.to_path_buf(),
            emit,
            files: Vec::new(),
        })
    }

    pub fn files(&self) -> &[FileEntry] {
        &self.files
    }

    pub fn into_files(self) -> Vec<FileEntry> {
        self.files
    }

    fn write(&mut self, name: &str, bytes: &[u8]) -> Result<(), CliError> {
        let path = self.dir.join(name);
        fs::write(&path, bytes).map_err(io_error(&path))?;
        self.files.push(FileEntry {
            name: name.to_string(),
            sha256: sha256_hex(bytes),
            bytes: bytes.len() as u64,
        });
        Ok(())
    }

    pub fn csv<I>(&mut self, name: &str, header: &[&str], rows: I) -> Result<(), CliError>
    where
        I: IntoIterator<Item = Vec<String>>,
    {
        if !self.emit.csv {
            return Ok(());
        }
        let bytes = csv_bytes(header, rows).map_err(|e| CliError::Io {
            path: self.dir.join(name),
            source: e.into(),
        })?;
        self.write(name, &bytes)
    }

    pub fn json<T: Serialize>(&mut self, name: &str, value: &T) -> Result<(), CliError> {
        if !self.emit.json {
            return Ok(());
        }
        let bytes = json_bytes(value);
        self.write(name, &bytes)
    }

    pub fn svg(&mut self, name: &str, plot: &Plot) -> Result<(), CliError> {
        if !self.emit.svg {
            return Ok(());
        }
        let text = render_svg(plot);
        self.write(name, text.as_bytes())
    }

    /// Writes the manifest last; it lists every file written before it.
    pub fn manifest(&self, manifest: &RunManifest) -> Result<PathBuf, CliError> {
        let path = self.dir.join(MANIFEST);
        fs::write(&path, json_bytes(manifest)).map_err(io_error(&path))?;
        Ok(path)
    }
}

pub fn json_bytes<T: Serialize>(value: &T) -> Vec<u8> {
    let mut bytes = serde_json::to_vec_pretty(value).expect("reports serialize to JSON");
    bytes.push(b'\n');
    bytes
}

pub fn csv_bytes<I>(header: &[&str], rows: I) -> csv::Result<Vec<u8>>
where
    I: IntoIterator<Item = Vec<String>>,
{
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header)?;
    for row in rows {
        w.write_record(&row)?;
    }
    w.into_inner().map_err(|e| e.into_error().into())
}

const WIDTH: f64 = 720.0;
const HEIGHT: f64 = 440.0;
const MARGIN: f64 = 64.0;
const MAX_PLOT_POINTS: usize = 4000;

/// Keeps the first and last point of each bucket plus its extremes, so spikes
/// survive thinning.
fn thin(points: &[(f64, f64)]) -> Vec<(f64, f64)> {
    if points.len() <= MAX_PLOT_POINTS {
        return points.to_vec();
    }
    let bucket = points.len().div_ceil(MAX_PLOT_POINTS / 4);
    let mut out = Vec::with_capacity(MAX_PLOT_POINTS);
    for chunk in points.chunks(bucket) {
        let lo = chunk
            .iter()
            .min_by(|a, b| a.1.total_cmp(&b.1))
            .expect("nonempty");
        let hi = chunk
            .iter()
            .max_by(|a, b| a.1.total_cmp(&b.1))
            .expect("nonempty");
        let mut keep = vec![chunk[0], *lo, *hi, chunk[chunk.len() - 1]];
        keep.sort_by(|a, b| a.0.total_cmp(&b.0));
        keep.dedup();
        out.extend(keep);
    }
    out
}

fn span(values: impl Iterator<Item = f64>) -> (f64, f64) {
    let (lo, hi) = values
        .filter(|v| v.is_finite())
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| {
            (lo.min(v), hi.max(v))
        });
    if !lo.is_finite() {
        return (0.0, 1.0);
    }
    if hi - lo < 1e-12 * lo.abs().max(1.0) {
        let pad = 0.5 * lo.abs().max(1.0);
        return (lo - pad, hi + pad);
    }
    let pad = 0.05 * (hi - lo);
    (lo - pad, hi + pad)
}

fn tick_label(v: f64) -> String {
    if v == 0.0 {
        "0".into()
    } else if v.abs() >= 1e5 || v.abs() < 1e-3 {
        format!("{v:.2e}")
    } else {
        let s = format!("{v:.4}");
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    }
}

fn escape(text: &str) -> String {
    text.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
}

pub fn render_svg(plot: &Plot) -> String {
    let pts = thin(&plot.points);
    let (x0, x1) = span(pts.iter().map(|p| p.0));
    let (y0, y1) = span(pts.iter().map(|p| p.1));
    let (pw, ph) = (WIDTH - 2.0 * MARGIN, HEIGHT - 2.0 * MARGIN);
    let sx = |x: f64| MARGIN + (x - x0) / (x1 - x0) * pw;
    let sy = |y: f64| HEIGHT - MARGIN - (y - y0) / (y1 - y0) * ph;

    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}">"#
    );
    let _ = writeln!(s, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(
        s,
        r#"<text x="{}" y="24" text-anchor="middle" font-family="sans-serif" font-size="15">{}</text>"#,
        WIDTH / 2.0,
        escape(&plot.title)
    );
    let (left, right, top, bottom) = (MARGIN, WIDTH - MARGIN, MARGIN, HEIGHT - MARGIN);
    let _ = writeln!(
        s,
        r#"<path d="M{left} {top} V{bottom} H{right}" fill="none" stroke="black" stroke-width="1"/>"#
    );
    for i in 0..=4 {
        let t = i as f64 / 4.0;
        let (xv, yv) = (x0 + t * (x1 - x0), y0 + t * (y1 - y0));
        let (px, py) = (sx(xv), sy(yv));
        let _ = writeln!(
            s,
            r#"<line x1="{px:.2}" y1="{bottom}" x2="{px:.2}" y2="{:.2}" stroke="black"/><text x="{px:.2}" y="{:.2}" text-anchor="middle" font-family="sans-serif" font-size="11">{}</text>"#,
            bottom + 5.0,
            bottom + 18.0,
            tick_label(xv)
        );
        let _ = writeln!(
            s,
            r#"<line x1="{:.2}" y1="{py:.2}" x2="{left}" y2="{py:.2}" stroke="black"/><text x="{:.2}" y="{:.2}" text-anchor="end" font-family="sans-serif" font-size="11">{}</text>"#,
            left - 5.0,
            left - 8.0,
            py + 4.0,
            tick_label(yv)
        );
    }
    let _ = writeln!(
        s,
        r#"<text x="{}" y="{}" text-anchor="middle" font-family="sans-serif" font-size="13">{}</text>"#,
        WIDTH / 2.0,
        HEIGHT - 18.0,
        plot.x_label
    );
    let _ = writeln!(
        s,
        r#"<text x="18" y="{}" text-anchor="middle" font-family="sans-serif" font-size="13" transform="rotate(-90 18 {})">{}</text>"#,
        HEIGHT / 2.0,
        HEIGHT / 2.0,
        plot.y_label
    );
    let mut path = String::new();
    let mut pen_down = false;
    for &(x, y) in &pts {
        if !(x.is_finite() && y.is_finite()) {
            pen_down = false;
            continue;
        }
        let _ = write!(
            path,
            "{}{:.2} {:.2} ",
            if pen_down { "L" } else { "M" },
            sx(x),
            sy(y)
        );
        pen_down = true;
    }
    let _ = writeln!(
        s,
        r#"<path d="{}" fill="none" stroke="steelblue" stroke-width="1.2"/>"#,
        path.trim_end()
    );
    if pts.len() <= 64 {
        for &(x, y) in pts.iter().filter(|p| p.0.is_finite() && p.1.is_finite()) {
            let _ = writeln!(
                s,
                r#"<circle cx="{:.2}" cy="{:.2}" r="2.5" fill="steelblue"/>"#,
                sx(x),
                sy(y)
            );
        }
    }
    s.push_str("</svg>\n");
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_uses_shortest_round_trip_floats() {
        let rows = [0.1, 1.0, 2f64.ln(), 1e-20, -0.5].map(|v| vec!["1".to_string(), float(v)]);
        let text = String::from_utf8(csv_bytes(&["n", "psi_n"], rows).unwrap()).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "n,psi_n");
        assert_eq!(lines[1], "1,0.1");
        assert_eq!(lines[2], "1,1");
        assert_eq!(lines[3], "1,0.6931471805599453");
        for (line, v) in lines[1..].iter().zip([0.1, 1.0, 2f64.ln(), 1e-20, -0.5]) {
            let parsed: f64 = line.split(',').nth(1).unwrap().parse().unwrap();
            assert_eq!(parsed.to_bits(), v.to_bits());
        }
    }

    #[test]
    fn svg_is_labeled_and_thinned() {
        let points: Vec<(f64, f64)> = (1..=100_000)
            .map(|n| (n as f64, (n as f64).sin()))
            .collect();
        let svg = render_svg(&Plot {
            title: "a < b".into(),
            x_label: "n",
            y_label: "value",
            points,
        });
        assert!(svg.starts_with("<svg"));
        assert!(svg.contains(">n</text>") && svg.contains(">value</text>"));
        assert!(svg.contains("a &lt; b"));
        let segments = svg.matches('L').count();
        assert!(segments < MAX_PLOT_POINTS + 10, "{segments}");
    }

    #[test]
    fn flat_series_still_has_a_range() {
        let svg = render_svg(&Plot {
            title: "flat".into(),
            x_label: "n",
            y_label: "value",
            points: vec![(1.0, 2.0), (2.0, 2.0)],
        });
        assert!(!svg.contains("NaN") && !svg.contains("inf"));
    }
}
