//! Minimal self-contained SVG line plots for membership curves.

use std::fmt::Write as _;

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 400.0;
const LEFT: f64 = 60.0;
const RIGHT: f64 = 20.0;
const TOP: f64 = 40.0;
const BOTTOM: f64 = 50.0;

const PALETTE: [&str; 4] = ["#1f4e9c", "#c0392b", "#27ae60", "#8e44ad"];

#[derive(Debug, Clone)]
pub struct Series {
    pub label: String,
    pub xs: Vec<f64>,
    pub ys: Vec<f64>,
}

#[derive(Debug, Clone, Default)]
pub struct Plot {
    pub title: String,
    pub x_label: String,
    pub x_range: (f64, f64),
    pub series: Vec<Series>,
    /// Dashed horizontal line at this membership level.
    pub level: Option<f64>,
    /// Shaded band over this x interval.
    pub band: Option<(f64, f64)>,
    /// Solid vertical segment from 0 up to `y` at `x`.
    pub marker: Option<(f64, f64)>,
}

impl Plot {
    fn sx(&self, x: f64) -> f64 {
        let (a, b) = self.x_range;
        LEFT + (x - a) / (b - a) * (WIDTH - LEFT - RIGHT)
    }

    fn sy(&self, y: f64) -> f64 {
        TOP + (1.0 - y.clamp(0.0, 1.0)) * (HEIGHT - TOP - BOTTOM)
    }

    pub fn render(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(
            s,
            r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
        );
        let _ = writeln!(s, r#"<rect width="100%" height="100%" fill="white"/>"#);
        let _ = writeln!(s, r#"<text x="{}" y="22" text-anchor="middle" font-size="14">{}</text>"#, WIDTH / 2.0, escape(&self.title));

        if let Some((lo, hi)) = self.band {
            let (x0, x1) = (self.sx(lo), self.sx(hi));
            let _ = writeln!(
                s,
                r##"<rect x="{:.2}" y="{TOP}" width="{:.2}" height="{:.2}" fill="#f1c40f" fill-opacity="0.2"/>"##,
                x0,
                (x1 - x0).max(0.5),
                HEIGHT - TOP - BOTTOM
            );
            let y0 = self.sy(0.0);
            let _ = writeln!(s, r#"<line x1="{x0:.2}" y1="{y0:.2}" x2="{x1:.2}" y2="{y0:.2}" stroke="black" stroke-width="3"/>"#);
        }

        // axes and ticks
        let (x0, x1) = (LEFT, WIDTH - RIGHT);
        let (y0, y1) = (self.sy(0.0), self.sy(1.0));
        let _ = writeln!(s, r#"<path d="M{x0} {y1:.2} L{x0} {y0:.2} L{x1} {y0:.2}" fill="none" stroke="black"/>"#);
        for i in 0..=5 {
            let y = i as f64 / 5.0;
            let py = self.sy(y);
            let _ = writeln!(s, r#"<line x1="{}" y1="{py:.2}" x2="{x0}" y2="{py:.2}" stroke="black"/>"#, x0 - 4.0);
            let _ = writeln!(s, r#"<text x="{}" y="{:.2}" text-anchor="end">{y:.1}</text>"#, x0 - 7.0, py + 4.0);
        }
        let (a, b) = self.x_range;
        for i in 0..=4 {
            let x = a + (b - a) * i as f64 / 4.0;
            let px = self.sx(x);
            let _ = writeln!(s, r#"<line x1="{px:.2}" y1="{y0:.2}" x2="{px:.2}" y2="{:.2}" stroke="black"/>"#, y0 + 4.0);
            let _ = writeln!(s, r#"<text x="{px:.2}" y="{:.2}" text-anchor="middle">{}</text>"#, y0 + 18.0, tick(x));
        }
        let _ = writeln!(s, r#"<text x="{}" y="{}" text-anchor="middle">{}</text>"#, (x0 + x1) / 2.0, HEIGHT - 10.0, escape(&self.x_label));

        if let Some(level) = self.level {
            let py = self.sy(level);
            let _ = writeln!(s, r#"<line x1="{x0}" y1="{py:.2}" x2="{x1}" y2="{py:.2}" stroke="black" stroke-dasharray="6 4"/>"#);
        }
        if let Some((x, y)) = self.marker {
            let px = self.sx(x);
            let _ = writeln!(s, r#"<line x1="{px:.2}" y1="{y0:.2}" x2="{px:.2}" y2="{:.2}" stroke="black" stroke-width="1.5"/>"#, self.sy(y));
        }

        for (k, series) in self.series.iter().enumerate() {
            let color = PALETTE[k % PALETTE.len()];
            let mut d = String::new();
            for (i, (x, y)) in series.xs.iter().zip(&series.ys).enumerate() {
                let _ = write!(d, "{}{:.2} {:.2}", if i == 0 { "M" } else { " L" }, self.sx(*x), self.sy(*y));
            }
            let _ = writeln!(s, r#"<path d="{d}" fill="none" stroke="{color}" stroke-width="1.8"/>"#);
            let ly = TOP + 16.0 * (k as f64 + 1.0);
            let _ = writeln!(s, r#"<line x1="{}" y1="{ly}" x2="{}" y2="{ly}" stroke="{color}" stroke-width="2"/>"#, x1 - 110.0, x1 - 90.0);
            let _ = writeln!(s, r#"<text x="{}" y="{}">{}</text>"#, x1 - 85.0, ly + 4.0, escape(&series.label));
        }
        s.push_str("</svg>\n");
        s
    }
}

fn tick(x: f64) -> String {
    let r = (x * 100.0).round() / 100.0;
    if r == 0.0 {
        "0".into()
    } else {
        format!("{r}")
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn renders_standalone_document() {
        let plot = Plot {
            title: "a < b".into(),
            x_label: "theta".into(),
            x_range: (-1.0, 1.0),
            series: vec![Series { label: "mu".into(), xs: vec![-1.0, 0.0, 1.0], ys: vec![0.0, 1.0, 0.0] }],
            level: Some(0.05),
            band: Some((0.0, 0.2)),
            marker: Some((0.2, 0.3)),
        };
        let svg = plot.render();
        assert!(svg.starts_with("<svg xmlns=\"http://www.w3.org/2000/svg\""));
        assert!(svg.trim_end().ends_with("</svg>"));
        assert!(svg.contains("a &lt; b"));
        assert!(svg.contains("stroke-dasharray"));
        assert!(!svg.contains("href"));
    }
}
