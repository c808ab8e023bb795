//! Minimal SVG charts. Output depends only on the input data, so plots are
//! byte-reproducible.

use std::fmt::Write;

const W: f64 = 420.0;
const H: f64 = 320.0;
const MARGIN_L: f64 = 62.0;
const MARGIN_R: f64 = 16.0;
const MARGIN_T: f64 = 34.0;
const MARGIN_B: f64 = 48.0;

pub const PALETTE: [&str; 8] = [
    "#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#e377c2", "#17becf",
];
pub const GRAY: &str = "#9a9a9a";

pub fn color(i: usize) -> &'static str {
    PALETTE[i % PALETTE.len()]
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Style {
    Line,
    Markers,
    LineMarkers,
}

#[derive(Clone, Debug)]
pub struct Series {
    pub name: String,
    pub color: String,
    pub style: Style,
    pub points: Vec<(f64, f64)>,
    /// Symmetric vertical error bars, one per point.
    pub errors: Option<Vec<f64>>,
}

impl Series {
    pub fn new(name: impl Into<String>, color: &str, style: Style, points: Vec<(f64, f64)>) -> Self {
        Self {
            name: name.into(),
            color: color.into(),
            style,
            points,
            errors: None,
        }
    }

    pub fn with_errors(mut self, errors: Vec<f64>) -> Self {
        self.errors = Some(errors);
        self
    }
}

/// A covariance ellipse: centre, semi-axes and rotation of the major axis.
#[derive(Clone, Debug)]
pub struct Ellipse {
    pub cx: f64,
    pub cy: f64,
    pub rx: f64,
    pub ry: f64,
    pub angle: f64,
    pub color: String,
}

impl Ellipse {
    /// One-standard-deviation ellipse of a 2×2 covariance.
    pub fn from_cov(cx: f64, cy: f64, cov: [[f64; 2]; 2], color: &str) -> Self {
        let (a, b, c) = (cov[0][0], cov[0][1], cov[1][1]);
        let mid = (a + c) / 2.0;
        let rad = (((a - c) / 2.0).powi(2) + b * b).sqrt();
        let angle = 0.5 * (2.0 * b).atan2(a - c);
        Self {
            cx,
            cy,
            rx: (mid + rad).max(0.0).sqrt(),
            ry: (mid - rad).max(0.0).sqrt(),
            angle,
            color: color.into(),
        }
    }
}

#[derive(Clone, Debug, Default)]
pub struct Chart {
    pub title: String,
    pub x_label: String,
    pub y_label: String,
    pub series: Vec<Series>,
    pub ellipses: Vec<Ellipse>,
    pub log_y: bool,
    /// Equal scaling on both axes, for the complex plane.
    pub square: bool,
}

impl Chart {
    pub fn new(title: impl Into<String>, x_label: impl Into<String>, y_label: impl Into<String>) -> Self {
        Self {
            title: title.into(),
            x_label: x_label.into(),
            y_label: y_label.into(),
            ..Self::default()
        }
    }

    fn bounds(&self) -> (f64, f64, f64, f64) {
        let mut xs = Vec::new();
        let mut ys = Vec::new();
        for s in &self.series {
            for (i, &(x, y)) in s.points.iter().enumerate() {
                let e = s.errors.as_ref().map_or(0.0, |e| e[i]);
                xs.push(x);
                ys.extend([y - e, y + e]);
            }
        }
        for e in &self.ellipses {
            let r = e.rx.max(e.ry);
            xs.extend([e.cx - r, e.cx + r]);
            ys.extend([e.cy - r, e.cy + r]);
        }
        if self.log_y {
            ys.retain(|&y| y > 0.0);
            ys.iter_mut().for_each(|y| *y = y.log10());
        }
        let span = |v: &[f64]| {
            let lo = v
                .iter()
                .copied()
                .filter(|x| x.is_finite())
                .fold(f64::INFINITY, f64::min);
            let hi = v
                .iter()
                .copied()
                .filter(|x| x.is_finite())
                .fold(f64::NEG_INFINITY, f64::max);
            if !lo.is_finite() {
                (0.0, 1.0)
            } else if hi - lo < 1e-12 {
                (lo - 0.5, hi + 0.5)
            } else {
                let pad = 0.05 * (hi - lo);
                (lo - pad, hi + pad)
            }
        };
        let (x0, x1) = span(&xs);
        let (y0, y1) = span(&ys);
        if self.square {
            let (cx, cy) = ((x0 + x1) / 2.0, (y0 + y1) / 2.0);
            let half = ((x1 - x0) / (W - MARGIN_L - MARGIN_R)).max((y1 - y0) / (H - MARGIN_T - MARGIN_B)) / 2.0;
            let (hx, hy) = (half * (W - MARGIN_L - MARGIN_R), half * (H - MARGIN_T - MARGIN_B));
            return (cx - hx, cx + hx, cy - hy, cy + hy);
        }
        (x0, x1, y0, y1)
    }

    /// Renders into a group translated by `(ox, oy)`.
    fn render_at(&self, out: &mut String, ox: f64, oy: f64) {
        let (x0, x1, y0, y1) = self.bounds();
        let pw = W - MARGIN_L - MARGIN_R;
        let ph = H - MARGIN_T - MARGIN_B;
        let log_y = self.log_y;
        let sx = |x: f64| MARGIN_L + (x - x0) / (x1 - x0) * pw;
        let sy = |y: f64| {
            let y = if log_y { y.max(1e-300).log10() } else { y };
            MARGIN_T + (y1 - y) / (y1 - y0) * ph
        };
        let _ = writeln!(out, r#"<g transform="translate({ox:.1},{oy:.1})">"#);
        let _ = writeln!(
            out,
            r##"<rect x="{MARGIN_L}" y="{MARGIN_T}" width="{pw}" height="{ph}" fill="none" stroke="#333"/>"##
        );
        let _ = writeln!(
            out,
            r#"<text x="{:.1}" y="20" text-anchor="middle" font-size="13">{}</text>"#,
            MARGIN_L + pw / 2.0,
            escape(&self.title)
        );
        let _ = writeln!(
            out,
            r#"<text x="{:.1}" y="{:.1}" text-anchor="middle" font-size="11">{}</text>"#,
            MARGIN_L + pw / 2.0,
            H - 10.0,
            escape(&self.x_label)
        );
        let _ = writeln!(
            out,
            r#"<text x="14" y="{:.1}" text-anchor="middle" font-size="11" transform="rotate(-90 14 {:.1})">{}</text>"#,
            MARGIN_T + ph / 2.0,
            MARGIN_T + ph / 2.0,
            escape(&self.y_label)
        );
        for i in 0..=4 {
            let fx = x0 + (x1 - x0) * i as f64 / 4.0;
            let fy = y0 + (y1 - y0) * i as f64 / 4.0;
            let ylabel = if log_y {
                format!("{:.3}", 10f64.powf(fy))
            } else {
                tick(fy)
            };
            let ty = MARGIN_T + (y1 - fy) / (y1 - y0) * ph;
            let _ = writeln!(
                out,
                r#"<text x="{:.1}" y="{:.1}" text-anchor="middle" font-size="9">{}</text>"#,
                sx(fx),
                MARGIN_T + ph + 13.0,
                tick(fx)
            );
            let _ = writeln!(
                out,
                r#"<text x="{:.1}" y="{:.1}" text-anchor="end" font-size="9">{}</text>"#,
                MARGIN_L - 4.0,
                ty + 3.0,
                ylabel
            );
        }
        if y0 < 0.0 && y1 > 0.0 && !log_y {
            let _ = writeln!(
                out,
                r##"<line x1="{MARGIN_L}" x2="{:.1}" y1="{:.2}" y2="{:.2}" stroke="#ccc"/>"##,
                MARGIN_L + pw,
                sy(0.0),
                sy(0.0)
            );
        }
        for e in &self.ellipses {
            let rx = e.rx / (x1 - x0) * pw;
            let ry = e.ry / (y1 - y0) * ph;
            let _ = writeln!(
                out,
                r#"<ellipse cx="{:.2}" cy="{:.2}" rx="{rx:.2}" ry="{ry:.2}" transform="rotate({:.2} {:.2} {:.2})" fill="none" stroke="{}" stroke-width="1"/>"#,
                sx(e.cx),
                sy(e.cy),
                -e.angle.to_degrees(),
                sx(e.cx),
                sy(e.cy),
                e.color
            );
        }
        for s in &self.series {
            let pts: Vec<(f64, f64)> = s
                .points
                .iter()
                .filter(|p| p.0.is_finite() && p.1.is_finite() && (!log_y || p.1 > 0.0))
                .map(|&(x, y)| (sx(x), sy(y)))
                .collect();
            if matches!(s.style, Style::Line | Style::LineMarkers) && pts.len() > 1 {
                let d: Vec<String> = pts.iter().map(|(x, y)| format!("{x:.2},{y:.2}")).collect();
                let _ = writeln!(
                    out,
                    r#"<polyline points="{}" fill="none" stroke="{}" stroke-width="1.5"/>"#,
                    d.join(" "),
                    s.color
                );
            }
            if matches!(s.style, Style::Markers | Style::LineMarkers) {
                for (x, y) in &pts {
                    let _ = writeln!(out, r#"<circle cx="{x:.2}" cy="{y:.2}" r="2.5" fill="{}"/>"#, s.color);
                }
            }
            if let Some(errs) = &s.errors {
                for (&(x, y), &e) in s.points.iter().zip(errs) {
                    if e > 0.0 && x.is_finite() && y.is_finite() && (!log_y || y - e > 0.0) {
                        let _ = writeln!(
                            out,
                            r#"<line x1="{:.2}" x2="{:.2}" y1="{:.2}" y2="{:.2}" stroke="{}"/>"#,
                            sx(x),
                            sx(x),
                            sy(y - e),
                            sy(y + e),
                            s.color
                        );
                    }
                }
            }
        }
        for (i, s) in self.series.iter().filter(|s| !s.name.is_empty()).enumerate() {
            let y = MARGIN_T + 12.0 + 12.0 * i as f64;
            let x = MARGIN_L + pw - 6.0;
            let _ = writeln!(
                out,
                r#"<text x="{x:.1}" y="{y:.1}" text-anchor="end" font-size="9" fill="{}">{}</text>"#,
                s.color,
                escape(&s.name)
            );
        }
        out.push_str("</g>\n");
    }
}

/// Lays charts out left to right in one SVG document.
pub fn render(charts: &[Chart]) -> String {
    let n = charts.len().max(1);
    let mut out = String::new();
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{:.0}" height="{H:.0}" viewBox="0 0 {:.0} {H:.0}" font-family="sans-serif">"#,
        W * n as f64,
        W * n as f64
    );
    out.push_str(r#"<rect width="100%" height="100%" fill="white"/>"#);
    out.push('\n');
    for (i, c) in charts.iter().enumerate() {
        c.render_at(&mut out, W * i as f64, 0.0);
    }
    out.push_str("</svg>\n");
    out
}

fn tick(v: f64) -> String {
    let s = format!("{v:.2}");
    if s == "-0.00" {
        "0.00".into()
    } else {
        s
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}
