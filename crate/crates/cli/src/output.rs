//! CSV, JSON and SVG serialisation of result tables.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use serde::Serialize;
use serde_json::{json, Value};

use crate::config::Format;
use crate::CliError;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// A named table of numbers; the first column is the abscissa.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Table {
    pub name: String,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl Table {
    pub fn new(name: impl Into<String>, columns: &[&str]) -> Self {
        Table {
            name: name.into(),
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn with_columns(name: impl Into<String>, columns: Vec<String>) -> Self {
        Table {
            name: name.into(),
            columns,
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<f64>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    /// Multiplies the named columns by `factor`.
    pub fn scale_columns(&mut self, names: &[&str], factor: f64) {
        let idx: Vec<usize> = self
            .columns
            .iter()
            .enumerate()
            .filter(|(_, c)| names.contains(&c.as_str()))
            .map(|(i, _)| i)
            .collect();
        for row in &mut self.rows {
            for &i in &idx {
                row[i] *= factor;
            }
        }
    }
}

/// The result of one subcommand.
#[derive(Debug, Clone, PartialEq)]
pub struct Artifact {
    pub command: String,
    /// Full parameter set, embedded in every file.
    pub params: Value,
    pub summary: Value,
    pub tables: Vec<Table>,
}

fn metadata(artifact: &Artifact) -> Value {
    json!({
        "program": "polariton",
        "version": VERSION,
        "command": artifact.command,
        "params": artifact.params,
    })
}

/// Scientific notation with 12 significant digits.
pub fn format_number(x: f64) -> String {
    format!("{x:.11e}")
}

pub fn to_csv(artifact: &Artifact, table: &Table) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "# polariton {VERSION}");
    let _ = writeln!(s, "# command: {}", artifact.command);
    let _ = writeln!(s, "# params: {}", artifact.params);
    let _ = writeln!(s, "# summary: {}", artifact.summary);
    let _ = writeln!(s, "{}", table.columns.join(","));
    for row in &table.rows {
        let cells: Vec<String> = row.iter().map(|x| format_number(*x)).collect();
        let _ = writeln!(s, "{}", cells.join(","));
    }
    s
}

pub fn to_json(artifact: &Artifact) -> String {
    let doc = json!({
        "metadata": metadata(artifact),
        "summary": artifact.summary,
        "tables": artifact.tables,
    });
    let mut s = serde_json::to_string_pretty(&doc).expect("JSON values always serialise");
    s.push('\n');
    s
}

const PALETTE: [&str; 8] = [
    "#c0392b", "#27ae60", "#2980b9", "#e67e22", "#8e5b3a", "#8e44ad", "#16a085", "#7f8c8d",
];

/// A bare line plot of every column against the first.
pub fn to_svg(artifact: &Artifact, table: &Table) -> String {
    let (width, height, margin) = (720.0, 440.0, 50.0);
    let finite = |v: f64| v.is_finite();
    let xs: Vec<f64> = table.rows.iter().map(|r| r[0]).filter(|v| finite(*v)).collect();
    let ys: Vec<f64> = table
        .rows
        .iter()
        .flat_map(|r| r[1..].iter().copied())
        .filter(|v| finite(*v))
        .collect();
    let bounds = |v: &[f64]| {
        let lo = v.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = v.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        if lo.is_finite() && hi > lo {
            (lo, hi)
        } else if lo.is_finite() {
            (lo - 0.5, lo + 0.5)
        } else {
            (0.0, 1.0)
        }
    };
    let (x0, x1) = bounds(&xs);
    let (y0, y1) = bounds(&ys);
    let px = |x: f64| margin + (x - x0) / (x1 - x0) * (width - 2.0 * margin);
    let py = |y: f64| height - margin - (y - y0) / (y1 - y0) * (height - 2.0 * margin);

    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" viewBox="0 0 {width} {height}">"#
    );
    let _ = writeln!(s, "<!-- {} -->", serde_json::to_string(&metadata(artifact)).unwrap_or_default().replace("--", "- -"));
    let _ = writeln!(s, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(
        s,
        r#"<rect x="{margin}" y="{margin}" width="{}" height="{}" fill="none" stroke="black"/>"#,
        width - 2.0 * margin,
        height - 2.0 * margin
    );
    let label = |v: f64| format!("{v:.4e}");
    let _ = writeln!(s, r#"<text x="{margin}" y="{}" font-size="11">{}</text>"#, height - 30.0, label(x0));
    let _ = writeln!(
        s,
        r#"<text x="{}" y="{}" font-size="11" text-anchor="end">{}</text>"#,
        width - margin,
        height - 30.0,
        label(x1)
    );
    let _ = writeln!(s, r#"<text x="4" y="{}" font-size="11">{}</text>"#, height - margin, label(y0));
    let _ = writeln!(s, r#"<text x="4" y="{}" font-size="11">{}</text>"#, margin + 10.0, label(y1));
    for (k, name) in table.columns.iter().enumerate().skip(1) {
        let colour = PALETTE[(k - 1) % PALETTE.len()];
        let points: Vec<String> = table
            .rows
            .iter()
            .filter(|r| finite(r[0]) && finite(r[k]))
            .map(|r| format!("{:.2},{:.2}", px(r[0]), py(r[k])))
            .collect();
        let _ = writeln!(
            s,
            r#"<polyline fill="none" stroke="{colour}" stroke-width="1.2" points="{}"/>"#,
            points.join(" ")
        );
        let _ = writeln!(
            s,
            r#"<text x="{}" y="{}" font-size="11" fill="{colour}">{name}</text>"#,
            width - margin - 150.0,
            margin + 14.0 * k as f64
        );
    }
    s.push_str("</svg>\n");
    s
}

/// Writes the artifact into `dir`: one file per table in the requested
/// format (JSON bundles all tables into one file) plus a JSON summary.
pub fn write_outputs(artifact: &Artifact, dir: &Path, format: Format) -> Result<Vec<PathBuf>, CliError> {
    std::fs::create_dir_all(dir).map_err(|e| CliError::Io(format!("{}: {e}", dir.display())))?;
    let mut files: Vec<(PathBuf, String)> = Vec::new();
    match format {
        Format::Csv => {
            for t in &artifact.tables {
                files.push((dir.join(format!("{}.csv", t.name)), to_csv(artifact, t)));
            }
        }
        Format::Svg => {
            for t in &artifact.tables {
                files.push((dir.join(format!("{}.svg", t.name)), to_svg(artifact, t)));
            }
        }
        Format::Json => {}
    }
    files.push((dir.join(format!("{}.json", artifact.command.replace(' ', "_"))), to_json(artifact)));
    let mut written = Vec::with_capacity(files.len());
    for (path, content) in files {
        std::fs::write(&path, content).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
        written.push(path);
    }
    Ok(written)
}
