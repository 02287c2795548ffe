//! Minimal SVG line plots: axes box, tick labels, polylines and vertical
//! markers. No dependencies; the emitted text is deterministic.

use std::fmt::Write;
use std::path::Path;

const COLORS: [&str; 6] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"];

pub struct Plot {
    title: String,
    x_label: String,
    y_label: String,
    series: Vec<(String, Vec<(f64, f64)>)>,
    vlines: Vec<f64>,
}

impl Plot {
    pub fn new(title: &str, x_label: &str, y_label: &str) -> Plot {
        Plot {
            title: title.to_string(),
            x_label: x_label.to_string(),
            y_label: y_label.to_string(),
            series: Vec::new(),
            vlines: Vec::new(),
        }
    }

    pub fn add_series(&mut self, name: &str, points: Vec<(f64, f64)>) {
        self.series.push((name.to_string(), points));
    }

    pub fn add_vline(&mut self, x: f64) {
        self.vlines.push(x);
    }

    pub fn write(&self, path: &Path) -> std::io::Result<()> {
        std::fs::write(path, self.render())
    }

    fn render(&self) -> String {
        let (w, h) = (760.0, 520.0);
        let (ml, mr, mt, mb) = (72.0, 18.0, 34.0, 52.0);
        let (pw, ph) = (w - ml - mr, h - mt - mb);
        let mut x_min = f64::INFINITY;
        let mut x_max = f64::NEG_INFINITY;
        let mut y_min = f64::INFINITY;
        let mut y_max = f64::NEG_INFINITY;
        for (_, pts) in &self.series {
            for &(x, y) in pts {
                if x.is_finite() && y.is_finite() {
                    x_min = x_min.min(x);
                    x_max = x_max.max(x);
                    y_min = y_min.min(y);
                    y_max = y_max.max(y);
                }
            }
        }
        for &x in &self.vlines {
            x_min = x_min.min(x);
            x_max = x_max.max(x);
        }
        if !x_min.is_finite() {
            x_min = 0.0;
            x_max = 1.0;
        }
        if !y_min.is_finite() {
            y_min = 0.0;
            y_max = 1.0;
        }
        if x_max - x_min < 1e-300 {
            x_max = x_min + 1.0;
        }
        if y_max - y_min < 1e-300 {
            y_max = y_min + 1.0;
        }
        let pad_y = 0.05 * (y_max - y_min);
        y_min -= pad_y;
        y_max += pad_y;
        let sx = |x: f64| ml + (x - x_min) / (x_max - x_min) * pw;
        let sy = |y: f64| mt + (y_max - y) / (y_max - y_min) * ph;

        let mut out = String::new();
        let _ = writeln!(
            out,
            r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" viewBox="0 0 {w} {h}">"#
        );
        let _ = writeln!(out, r#"<rect width="{w}" height="{h}" fill="white"/>"#);
        let _ = writeln!(
            out,
            r##"<rect x="{ml}" y="{mt}" width="{pw}" height="{ph}" fill="none" stroke="#333" stroke-width="1"/>"##
        );
        let _ = writeln!(
            out,
            r#"<text x="{}" y="20" text-anchor="middle" font-family="monospace" font-size="14">{}</text>"#,
            ml + pw / 2.0,
            xml_escape(&self.title)
        );
        // ticks
        for i in 0..=4 {
            let xv = x_min + (x_max - x_min) * i as f64 / 4.0;
            let yv = y_min + (y_max - y_min) * i as f64 / 4.0;
            let xp = sx(xv);
            let yp = sy(yv);
            let _ = writeln!(
                out,
                r##"<line x1="{xp:.2}" y1="{}" x2="{xp:.2}" y2="{}" stroke="#333"/>"##,
                mt + ph,
                mt + ph + 5.0
            );
            let _ = writeln!(
                out,
                r#"<text x="{xp:.2}" y="{}" text-anchor="middle" font-family="monospace" font-size="11">{}</text>"#,
                mt + ph + 18.0,
                tick_label(xv)
            );
            let _ = writeln!(
                out,
                r##"<line x1="{}" y1="{yp:.2}" x2="{ml}" y2="{yp:.2}" stroke="#333"/>"##,
                ml - 5.0
            );
            let _ = writeln!(
                out,
                r#"<text x="{}" y="{:.2}" text-anchor="end" font-family="monospace" font-size="11">{}</text>"#,
                ml - 8.0,
                yp + 4.0,
                tick_label(yv)
            );
        }
        let _ = writeln!(
            out,
            r#"<text x="{}" y="{}" text-anchor="middle" font-family="monospace" font-size="12">{}</text>"#,
            ml + pw / 2.0,
            h - 12.0,
            xml_escape(&self.x_label)
        );
        let _ = writeln!(
            out,
            r#"<text x="16" y="{}" text-anchor="middle" font-family="monospace" font-size="12" transform="rotate(-90 16 {})">{}</text>"#,
            mt + ph / 2.0,
            mt + ph / 2.0,
            xml_escape(&self.y_label)
        );
        for &vx in &self.vlines {
            let xp = sx(vx);
            let _ = writeln!(
                out,
                r##"<line x1="{xp:.2}" y1="{mt}" x2="{xp:.2}" y2="{}" stroke="#d62728" stroke-width="1" stroke-dasharray="4 3"/>"##,
                mt + ph
            );
        }
        for (si, (name, pts)) in self.series.iter().enumerate() {
            let color = COLORS[si % COLORS.len()];
            let mut d = String::new();
            let mut pen_down = false;
            for &(x, y) in pts {
                if !(x.is_finite() && y.is_finite()) {
                    pen_down = false;
                    continue;
                }
                let cmd = if pen_down { 'L' } else { 'M' };
                let _ = write!(d, "{cmd}{:.2} {:.2} ", sx(x), sy(y));
                pen_down = true;
            }
            let _ = writeln!(
                out,
                r#"<path d="{}" fill="none" stroke="{color}" stroke-width="1.5"/>"#,
                d.trim_end()
            );
            let ly = mt + 16.0 + 16.0 * si as f64;
            let _ = writeln!(
                out,
                r#"<line x1="{}" y1="{ly}" x2="{}" y2="{ly}" stroke="{color}" stroke-width="2"/>"#,
                ml + pw - 130.0,
                ml + pw - 106.0
            );
            let _ = writeln!(
                out,
                r#"<text x="{}" y="{}" font-family="monospace" font-size="11">{}</text>"#,
                ml + pw - 100.0,
                ly + 4.0,
                xml_escape(name)
            );
        }
        out.push_str("</svg>\n");
        out
    }
}

fn tick_label(v: f64) -> String {
    if v == 0.0 {
        return "0".to_string();
    }
    let a = v.abs();
    if (1e-3..1e4).contains(&a) {
        format!("{v:.3}")
    } else {
        format!("{v:.2e}")
    }
}

fn xml_escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}
