//! Minimal SVG line charts and heatmaps written by hand.

use std::fmt::Write;

const PALETTE: [&str; 10] = [
    "#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd", "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf",
];
const DASHES: [&str; 2] = ["", "6,3"];

pub struct Series {
    pub name: String,
    /// `None` leaves a gap in the line.
    pub points: Vec<(f64, Option<f64>)>,
}

pub struct LineChart<'a> {
    pub title: &'a str,
    pub x_label: &'a str,
    pub y_label: &'a str,
    /// Tick positions with their labels.
    pub x_ticks: Vec<(f64, String)>,
    pub y_range: (f64, f64),
    pub series: Vec<Series>,
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

impl LineChart<'_> {
    pub fn render(&self) -> String {
        let (w, h) = (720.0, 420.0);
        let (left, right, top, bottom) = (60.0, 200.0, 40.0, 50.0);
        let pw = w - left - right;
        let ph = h - top - bottom;
        let (x0, x1) = self
            .x_ticks
            .iter()
            .map(|t| t.0)
            .chain(self.series.iter().flat_map(|s| s.points.iter().map(|p| p.0)))
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), x| (a.min(x), b.max(x)));
        let (x0, x1) = if x0 < x1 { (x0, x1) } else { (x0 - 0.5, x0 + 0.5) };
        let (y0, y1) = self.y_range;
        let sx = |x: f64| left + (x - x0) / (x1 - x0) * pw;
        let sy = |y: f64| top + ph - (y.clamp(y0, y1) - y0) / (y1 - y0) * ph;

        let mut s = String::new();
        let _ = writeln!(
            s,
            r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" viewBox="0 0 {w} {h}" font-family="sans-serif" font-size="12">"#
        );
        let _ = writeln!(s, r#"<rect width="{w}" height="{h}" fill="white"/>"#);
        let _ = writeln!(
            s,
            r#"<text x="{:.2}" y="22" text-anchor="middle" font-size="14">{}</text>"#,
            left + pw / 2.0,
            escape(self.title)
        );
        for k in 0..=5 {
            let y = y0 + (y1 - y0) * k as f64 / 5.0;
            let py = sy(y);
            let _ = writeln!(
                s,
                r##"<line x1="{left:.2}" y1="{py:.2}" x2="{:.2}" y2="{py:.2}" stroke="#dddddd"/>"##,
                left + pw
            );
            let _ = writeln!(
                s,
                r#"<text x="{:.2}" y="{:.2}" text-anchor="end">{y:.1}</text>"#,
                left - 6.0,
                py + 4.0
            );
        }
        for (x, label) in &self.x_ticks {
            let px = sx(*x);
            let _ = writeln!(
                s,
                r##"<line x1="{px:.2}" y1="{:.2}" x2="{px:.2}" y2="{:.2}" stroke="#333333"/>"##,
                top + ph,
                top + ph + 5.0
            );
            let _ = writeln!(
                s,
                r#"<text x="{px:.2}" y="{:.2}" text-anchor="middle">{}</text>"#,
                top + ph + 18.0,
                escape(label)
            );
        }
        let _ = writeln!(
            s,
            r##"<rect x="{left:.2}" y="{top:.2}" width="{pw:.2}" height="{ph:.2}" fill="none" stroke="#333333"/>"##
        );
        let _ = writeln!(
            s,
            r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">{}</text>"#,
            left + pw / 2.0,
            h - 10.0,
            escape(self.x_label)
        );
        let _ = writeln!(
            s,
            r#"<text x="16" y="{:.2}" text-anchor="middle" transform="rotate(-90 16 {:.2})">{}</text>"#,
            top + ph / 2.0,
            top + ph / 2.0,
            escape(self.y_label)
        );

        for (i, series) in self.series.iter().enumerate() {
            let color = PALETTE[i % PALETTE.len()];
            let dash = DASHES[(i / PALETTE.len()) % DASHES.len()];
            let dash_attr = if dash.is_empty() {
                String::new()
            } else {
                format!(r#" stroke-dasharray="{dash}""#)
            };
            // split at gaps so missing values are never interpolated
            let mut runs: Vec<Vec<(f64, f64)>> = vec![Vec::new()];
            for &(x, y) in &series.points {
                match y {
                    Some(y) => runs.last_mut().expect("non-empty").push((sx(x), sy(y))),
                    None => runs.push(Vec::new()),
                }
            }
            for run in runs.iter().filter(|r| !r.is_empty()) {
                let pts: Vec<String> = run.iter().map(|(x, y)| format!("{x:.2},{y:.2}")).collect();
                let _ = writeln!(
                    s,
                    r#"<polyline points="{}" fill="none" stroke="{color}" stroke-width="2"{dash_attr}/>"#,
                    pts.join(" ")
                );
                for (x, y) in run {
                    let _ = writeln!(s, r#"<circle cx="{x:.2}" cy="{y:.2}" r="3" fill="{color}"/>"#);
                }
            }
            let ly = top + 10.0 + 18.0 * i as f64;
            let lx = left + pw + 15.0;
            let _ = writeln!(
                s,
                r#"<line x1="{lx:.2}" y1="{ly:.2}" x2="{:.2}" y2="{ly:.2}" stroke="{color}" stroke-width="2"{dash_attr}/>"#,
                lx + 20.0
            );
            let _ = writeln!(
                s,
                r#"<text x="{:.2}" y="{:.2}">{}</text>"#,
                lx + 26.0,
                ly + 4.0,
                escape(&series.name)
            );
        }
        s.push_str("</svg>\n");
        s
    }
}

/// Square heatmap of integer cells in `[-100, 100]`, blue for negative and
/// red for positive.
pub fn heatmap(title: &str, labels: &[String], cells: &[Vec<i64>]) -> String {
    let n = labels.len();
    let cell = 34.0;
    let margin = 170.0;
    let size = margin + cell * n as f64 + 20.0;
    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{size:.2}" height="{:.2}" viewBox="0 0 {size:.2} {:.2}" font-family="sans-serif" font-size="11">"#,
        size + 30.0,
        size + 30.0
    );
    let _ = writeln!(s, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(s, r#"<text x="10" y="20" font-size="14">{}</text>"#, escape(title));
    let top = margin + 30.0;
    for (i, label) in labels.iter().enumerate() {
        let c = margin + cell * (i as f64 + 0.5);
        let _ = writeln!(
            s,
            r#"<text x="{:.2}" y="{:.2}" text-anchor="end" dominant-baseline="middle">{}</text>"#,
            margin - 6.0,
            top + cell * (i as f64 + 0.5),
            escape(label)
        );
        let _ = writeln!(
            s,
            r#"<text x="{c:.2}" y="{:.2}" text-anchor="start" transform="rotate(-60 {c:.2} {:.2})">{}</text>"#,
            top - 6.0,
            top - 6.0,
            escape(label)
        );
    }
    for (i, row) in cells.iter().enumerate() {
        for (j, &v) in row.iter().enumerate() {
            let t = (v.clamp(-100, 100) as f64) / 100.0;
            let (r, g, b) = if t >= 0.0 {
                (255.0, 255.0 * (1.0 - t), 255.0 * (1.0 - t))
            } else {
                (255.0 * (1.0 + t), 255.0 * (1.0 + t), 255.0)
            };
            let x = margin + cell * j as f64;
            let y = top + cell * i as f64;
            let _ = writeln!(
                s,
                r##"<rect x="{x:.2}" y="{y:.2}" width="{cell:.2}" height="{cell:.2}" fill="rgb({},{},{})" stroke="#ffffff"/>"##,
                r.round() as u8,
                g.round() as u8,
                b.round() as u8
            );
            let _ = writeln!(
                s,
                r#"<text x="{:.2}" y="{:.2}" text-anchor="middle" dominant-baseline="middle">{v}</text>"#,
                x + cell / 2.0,
                y + cell / 2.0
            );
        }
    }
    s.push_str("</svg>\n");
    s
}
