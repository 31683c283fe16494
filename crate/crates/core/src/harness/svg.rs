//! Minimal SVG line/bar/heatmap figures.

use std::fmt::Write;

const W: f64 = 640.0;
const H: f64 = 420.0;
const LEFT: f64 = 70.0;
const RIGHT: f64 = 20.0;
const TOP: f64 = 40.0;
const BOTTOM: f64 = 50.0;

#[derive(Debug, Clone)]
pub enum Mark {
    Line { points: Vec<(f64, f64)>, color: &'static str },
    Dots { points: Vec<(f64, f64)>, color: &'static str },
    /// `(x, low, high)` vertical whiskers.
    Whiskers { bars: Vec<(f64, f64, f64)>, color: &'static str },
    /// `(x0, x1, height)` rectangles from zero.
    Bars { bars: Vec<(f64, f64, f64)>, color: &'static str },
}

#[derive(Debug, Clone)]
pub struct Plot {
    pub title: String,
    pub x_label: String,
    pub y_label: String,
    pub marks: Vec<Mark>,
    pub log_y: bool,
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

fn header(out: &mut String, title: &str) {
    let _ = write!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" viewBox="0 0 {W} {H}" font-family="sans-serif" font-size="12">"#
    );
    let _ = write!(out, r#"<rect width="{W}" height="{H}" fill="white"/>"#);
    let _ = write!(
        out,
        r#"<text x="{}" y="22" text-anchor="middle" font-size="14">{}</text>"#,
        W / 2.0,
        escape(title)
    );
}

fn ticks(lo: f64, hi: f64) -> Vec<f64> {
    (0..=4).map(|k| lo + (hi - lo) * k as f64 / 4.0).collect()
}

impl Plot {
    pub fn new(title: impl Into<String>, x_label: impl Into<String>, y_label: impl Into<String>) -> Self {
        Self {
            title: title.into(),
            x_label: x_label.into(),
            y_label: y_label.into(),
            marks: Vec::new(),
            log_y: false,
        }
    }

    pub fn mark(mut self, m: Mark) -> Self {
        self.marks.push(m);
        self
    }

    fn ty(&self, y: f64) -> f64 {
        if self.log_y {
            y.max(1e-300).log10()
        } else {
            y
        }
    }

    fn extent(&self) -> Option<(f64, f64, f64, f64)> {
        let mut xs = Vec::new();
        let mut ys = Vec::new();
        for m in &self.marks {
            match m {
                Mark::Line { points, .. } | Mark::Dots { points, .. } => {
                    for &(x, y) in points {
                        xs.push(x);
                        ys.push(self.ty(y));
                    }
                }
                Mark::Whiskers { bars, .. } => {
                    for &(x, lo, hi) in bars {
                        xs.push(x);
                        if !self.log_y || lo > 0.0 {
                            ys.push(self.ty(lo));
                        }
                        ys.push(self.ty(hi));
                    }
                }
                Mark::Bars { bars, .. } => {
                    for &(x0, x1, h) in bars {
                        xs.extend([x0, x1]);
                        ys.extend([0.0, self.ty(h)]);
                    }
                }
            }
        }
        let finite = |v: &Vec<f64>| v.iter().copied().filter(|x| x.is_finite()).collect::<Vec<_>>();
        let (xs, ys) = (finite(&xs), finite(&ys));
        if xs.is_empty() || ys.is_empty() {
            return None;
        }
        let span = |v: &[f64]| {
            let lo = v.iter().copied().fold(f64::INFINITY, f64::min);
            let hi = v.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            if hi > lo {
                (lo, hi)
            } else {
                (lo - 0.5, hi + 0.5)
            }
        };
        let (x0, x1) = span(&xs);
        let (y0, y1) = span(&ys);
        Some((x0, x1, y0, y1))
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        header(&mut out, &self.title);
        let Some((x0, x1, y0, y1)) = self.extent() else {
            out.push_str("</svg>\n");
            return out;
        };
        let pw = W - LEFT - RIGHT;
        let ph = H - TOP - BOTTOM;
        let sx = |x: f64| LEFT + (x - x0) / (x1 - x0) * pw;
        let sy = |y: f64| TOP + ph - (self.ty(y) - y0) / (y1 - y0) * ph;
        let _ = write!(
            out,
            r#"<rect x="{LEFT}" y="{TOP}" width="{pw}" height="{ph}" fill="none" stroke="black"/>"#
        );
        for t in ticks(x0, x1) {
            let x = LEFT + (t - x0) / (x1 - x0) * pw;
            let _ = write!(
                out,
                r#"<text x="{x:.2}" y="{:.2}" text-anchor="middle">{t:.3}</text>"#,
                TOP + ph + 16.0
            );
        }
        for t in ticks(y0, y1) {
            let y = TOP + ph - (t - y0) / (y1 - y0) * ph;
            let shown = if self.log_y { format!("1e{t:.1}") } else { format!("{t:.3}") };
            let _ = write!(
                out,
                r#"<text x="{:.2}" y="{:.2}" text-anchor="end">{shown}</text>"#,
                LEFT - 6.0,
                y + 4.0
            );
        }
        let _ = write!(
            out,
            r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">{}</text>"#,
            LEFT + pw / 2.0,
            H - 12.0,
            escape(&self.x_label)
        );
        let _ = write!(
            out,
            r#"<text x="16" y="{:.2}" text-anchor="middle" transform="rotate(-90 16 {:.2})">{}</text>"#,
            TOP + ph / 2.0,
            TOP + ph / 2.0,
            escape(&self.y_label)
        );
        for m in &self.marks {
            match m {
                Mark::Line { points, color } => {
                    let pts: Vec<String> = points
                        .iter()
                        .filter(|p| p.1.is_finite() && (!self.log_y || p.1 > 0.0))
                        .map(|&(x, y)| format!("{:.2},{:.2}", sx(x), sy(y)))
                        .collect();
                    let _ = write!(
                        out,
                        r#"<polyline fill="none" stroke="{color}" stroke-width="1.5" points="{}"/>"#,
                        pts.join(" ")
                    );
                }
                Mark::Dots { points, color } => {
                    for &(x, y) in points.iter().filter(|p| p.1.is_finite() && (!self.log_y || p.1 > 0.0)) {
                        let _ = write!(out, r#"<circle cx="{:.2}" cy="{:.2}" r="3" fill="{color}"/>"#, sx(x), sy(y));
                    }
                }
                Mark::Whiskers { bars, color } => {
                    for &(x, lo, hi) in bars {
                        let lo = if self.log_y && lo <= 0.0 { 10f64.powf(y0) } else { lo };
                        let _ = write!(
                            out,
                            r#"<line x1="{:.2}" x2="{:.2}" y1="{:.2}" y2="{:.2}" stroke="{color}"/>"#,
                            sx(x),
                            sx(x),
                            sy(lo),
                            sy(hi)
                        );
                    }
                }
                Mark::Bars { bars, color } => {
                    for &(a, b, h) in bars {
                        let top = sy(h);
                        let base = sy(if self.log_y { 10f64.powf(y0) } else { 0.0 });
                        let _ = write!(
                            out,
                            r#"<rect x="{:.2}" y="{:.2}" width="{:.2}" height="{:.2}" fill="{color}" fill-opacity="0.5"/>"#,
                            sx(a),
                            top.min(base),
                            (sx(b) - sx(a)).max(0.0),
                            (base - top).abs()
                        );
                    }
                }
            }
        }
        out.push_str("</svg>\n");
        out
    }
}

/// Square heatmap of `values[i][j]` over `grid × grid`, shaded from white
/// (0) to dark red (`max`).
pub fn heatmap(title: &str, grid: &[f64], values: &[Vec<f64>]) -> String {
    let mut out = String::new();
    header(&mut out, title);
    let n = grid.len().max(1);
    let size = (H - TOP - BOTTOM).min(W - LEFT - RIGHT);
    let cell = size / n as f64;
    let max = values
        .iter()
        .flatten()
        .copied()
        .fold(0.0, f64::max)
        .max(f64::MIN_POSITIVE);
    for (i, row) in values.iter().enumerate() {
        for (j, &v) in row.iter().enumerate() {
            let level = (255.0 * (1.0 - v / max)).round() as u8;
            let _ = write!(
                out,
                r#"<rect x="{:.2}" y="{:.2}" width="{:.2}" height="{:.2}" fill="rgb(255,{level},{level})"><title>{:.4}</title></rect>"#,
                LEFT + j as f64 * cell,
                TOP + (n - 1 - i) as f64 * cell,
                cell,
                cell,
                v
            );
        }
    }
    for (k, t) in grid.iter().enumerate().step_by(2) {
        let _ = write!(
            out,
            r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">{t}</text>"#,
            LEFT + (k as f64 + 0.5) * cell,
            TOP + size + 16.0
        );
        let _ = write!(
            out,
            r#"<text x="{:.2}" y="{:.2}" text-anchor="end">{t}</text>"#,
            LEFT - 6.0,
            TOP + (n as f64 - k as f64 - 0.5) * cell + 4.0
        );
    }
    let _ = write!(
        out,
        r#"<text x="{:.2}" y="{:.2}">max {max:.4}</text>"#,
        LEFT + size + 10.0,
        TOP + 12.0
    );
    out.push_str("</svg>\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn renders_well_formed_documents() {
        let p = Plot::new("t <1>", "x", "y")
            .mark(Mark::Line {
                points: vec![(0.0, 1.0), (1.0, 2.0)],
                color: "black",
            })
            .mark(Mark::Bars {
                bars: vec![(0.0, 0.5, 1.0)],
                color: "steelblue",
            });
        let s = p.render();
        assert!(s.starts_with("<svg") && s.trim_end().ends_with("</svg>"));
        assert!(s.contains("t &lt;1&gt;"));
        let empty = Plot::new("e", "x", "y").render();
        assert!(empty.trim_end().ends_with("</svg>"));
        let h = heatmap("h", &[0.0, 1.0], &[vec![0.0, 0.5], vec![0.25, 1.0]]);
        assert_eq!(h.matches("<rect").count(), 5);
    }
}
