//! Deterministic CSV and key=value summary writers: identical inputs give
//! byte-identical files (floats at 17 significant digits).

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

pub struct OutputDir {
    pub dir: PathBuf,
    pub csv: bool,
    pub svg: bool,
}

impl OutputDir {
    pub fn new(dir: &str, formats: &str) -> std::io::Result<OutputDir> {
        let dir = PathBuf::from(dir);
        fs::create_dir_all(&dir)?;
        let mut csv = false;
        let mut svg = false;
        for f in formats.split(',') {
            match f.trim() {
                "csv" => csv = true,
                "svg" => svg = true,
                other => {
                    return Err(std::io::Error::new(
                        std::io::ErrorKind::InvalidInput,
                        format!("unknown output format `{other}` (expected csv,svg)"),
                    ))
                }
            }
        }
        Ok(OutputDir { dir, csv, svg })
    }

    pub fn path(&self, name: &str) -> PathBuf {
        self.dir.join(name)
    }
}

pub fn fmt_f64(x: f64) -> String {
    if x.is_nan() {
        "nan".to_string()
    } else {
        format!("{x:.16e}")
    }
}

pub fn write_csv(path: &Path, header: &[&str], rows: &[Vec<f64>]) -> std::io::Result<()> {
    let mut out = String::new();
    out.push_str(&header.join(","));
    out.push('\n');
    for row in rows {
        let cells: Vec<String> = row.iter().map(|&x| fmt_f64(x)).collect();
        out.push_str(&cells.join(","));
        out.push('\n');
    }
    fs::write(path, out)
}

/// Rows that carry a label column (scan classes).
pub fn write_labeled_csv(
    path: &Path,
    header: &[&str],
    rows: &[(Vec<f64>, String, Vec<f64>)],
) -> std::io::Result<()> {
    let mut out = String::new();
    out.push_str(&header.join(","));
    out.push('\n');
    for (pre, label, post) in rows {
        let mut cells: Vec<String> = pre.iter().map(|&x| fmt_f64(x)).collect();
        cells.push(label.clone());
        cells.extend(post.iter().map(|&x| fmt_f64(x)));
        out.push_str(&cells.join(","));
        out.push('\n');
    }
    fs::write(path, out)
}

pub struct Summary {
    lines: Vec<String>,
}

impl Summary {
    pub fn new() -> Summary {
        Summary { lines: Vec::new() }
    }

    pub fn push_str(&mut self, key: &str, value: &str) {
        self.lines.push(format!("{key}={value}"));
    }

    pub fn push_f64(&mut self, key: &str, value: f64) {
        self.lines.push(format!("{key}={}", fmt_f64(value)));
    }

    pub fn push_usize(&mut self, key: &str, value: usize) {
        self.lines.push(format!("{key}={value}"));
    }

    pub fn write(&self, path: &Path) -> std::io::Result<()> {
        let mut f = fs::File::create(path)?;
        for line in &self.lines {
            writeln!(f, "{line}")?;
        }
        Ok(())
    }
}
