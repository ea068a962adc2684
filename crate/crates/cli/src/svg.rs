use std::fmt::Write;

/// Floor applied to non-positive values on log axes.
pub const LOG_FLOOR: f64 = 1e-16;

const WIDTH: f64 = 720.0;
const HEIGHT: f64 = 440.0;
const LEFT: f64 = 80.0;
const RIGHT: f64 = 80.0;
const TOP: f64 = 40.0;
const BOTTOM: f64 = 60.0;
const PALETTE: &[&str] = &["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#17becf"];

/// A log-y plot against singular-vector index with horizontal markers and an
/// optional linear secondary series.
#[derive(Clone, Debug, Default)]
pub struct FigureSeries {
    pub title: String,
    pub y_label: String,
    pub x: Vec<f64>,
    pub series: Vec<(String, Vec<f64>)>,
    /// `(label, value, index of the series it belongs to)`
    pub markers: Vec<(String, f64, usize)>,
    pub secondary: Option<(String, Vec<f64>)>,
}

fn esc(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;").replace('"', "&quot;")
}

fn floor_log(v: f64) -> f64 {
    if v.is_finite() && v > LOG_FLOOR {
        v.log10()
    } else if v.is_infinite() && v > 0.0 {
        f64::NAN
    } else {
        LOG_FLOOR.log10()
    }
}

impl FigureSeries {
    pub fn polyline_count(&self) -> usize {
        self.series.len() + usize::from(self.secondary.is_some())
    }

    pub fn render(&self) -> String {
        let n = self.x.len();
        let logs: Vec<f64> = self
            .series
            .iter()
            .flat_map(|(_, ys)| ys.iter().copied())
            .chain(self.markers.iter().map(|m| m.1))
            .map(floor_log)
            .filter(|v| v.is_finite())
            .collect();
        let mut lo = logs.iter().copied().fold(f64::INFINITY, f64::min).floor();
        let mut hi = logs.iter().copied().fold(f64::NEG_INFINITY, f64::max).ceil();
        if !lo.is_finite() {
            lo = -1.0;
            hi = 1.0;
        }
        if hi <= lo {
            hi = lo + 1.0;
        }
        let pw = WIDTH - LEFT - RIGHT;
        let ph = HEIGHT - TOP - BOTTOM;
        let xmax = (n.max(2) - 1) as f64;
        let px = |i: usize| LEFT + pw * i as f64 / xmax;
        let py = |v: f64| {
            let l = floor_log(v);
            let l = if l.is_finite() { l } else { hi };
            TOP + ph * (hi - l) / (hi - lo)
        };

        let mut s = String::new();
        let _ = writeln!(s, r#"<?xml version="1.0" encoding="UTF-8"?>"#);
        let _ = writeln!(
            s,
            r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}">"#
        );
        let _ = writeln!(s, r#"<rect x="0" y="0" width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#);
        let _ = writeln!(
            s,
            r#"<text x="{}" y="24" text-anchor="middle" font-family="sans-serif" font-size="15">{}</text>"#,
            WIDTH / 2.0,
            esc(&self.title)
        );
        let _ = writeln!(
            s,
            r#"<rect x="{LEFT}" y="{TOP}" width="{pw}" height="{ph}" fill="none" stroke="black"/>"#
        );
        for d in (lo as i64)..=(hi as i64) {
            let y = TOP + ph * (hi - d as f64) / (hi - lo);
            let _ = writeln!(
                s,
                r##"<line x1="{LEFT}" y1="{y:.2}" x2="{}" y2="{y:.2}" stroke="#dddddd"/><text x="{}" y="{:.2}" text-anchor="end" font-family="sans-serif" font-size="11">1e{d}</text>"##,
                LEFT + pw,
                LEFT - 6.0,
                y + 4.0
            );
        }
        let _ = writeln!(
            s,
            r#"<text x="{}" y="{}" text-anchor="middle" font-family="sans-serif" font-size="12">singular vector index</text>"#,
            LEFT + pw / 2.0,
            HEIGHT - 18.0
        );
        let _ = writeln!(
            s,
            r#"<text x="18" y="{}" transform="rotate(-90 18 {})" text-anchor="middle" font-family="sans-serif" font-size="12">{}</text>"#,
            TOP + ph / 2.0,
            TOP + ph / 2.0,
            esc(&self.y_label)
        );

        for (k, (name, ys)) in self.series.iter().enumerate() {
            let color = PALETTE[k % PALETTE.len()];
            let pts: Vec<String> = ys.iter().enumerate().map(|(i, v)| format!("{:.2},{:.2}", px(i), py(*v))).collect();
            let _ = writeln!(
                s,
                r#"<polyline class="series" data-name="{}" fill="none" stroke="{color}" stroke-width="1.5" points="{}"/>"#,
                esc(name),
                pts.join(" ")
            );
            let _ = writeln!(
                s,
                r#"<text x="{}" y="{}" font-family="sans-serif" font-size="11" fill="{color}">{}</text>"#,
                LEFT + 8.0,
                TOP + 14.0 + 14.0 * k as f64,
                esc(name)
            );
        }
        for (name, value, k) in &self.markers {
            let color = PALETTE[k % PALETTE.len()];
            let y = py(*value);
            let _ = writeln!(
                s,
                r#"<line class="marker" data-name="{}" x1="{LEFT}" y1="{y:.2}" x2="{}" y2="{y:.2}" stroke="{color}" stroke-dasharray="6,3,1,3"/>"#,
                esc(name),
                LEFT + pw
            );
        }
        if let Some((name, ys)) = &self.secondary {
            let top = ys.iter().copied().fold(0.0_f64, f64::max).max(1e-300);
            let pts: Vec<String> = ys
                .iter()
                .enumerate()
                .map(|(i, v)| format!("{:.2},{:.2}", px(i), TOP + ph * (1.0 - v / top)))
                .collect();
            let _ = writeln!(
                s,
                r#"<polyline class="secondary" data-name="{}" fill="none" stroke="black" stroke-dasharray="2,3" points="{}"/>"#,
                esc(name),
                pts.join(" ")
            );
            for t in 0..=4 {
                let v = top * t as f64 / 4.0;
                let y = TOP + ph * (1.0 - t as f64 / 4.0);
                let _ = writeln!(
                    s,
                    r#"<text x="{}" y="{:.2}" font-family="sans-serif" font-size="11">{:.2}</text>"#,
                    LEFT + pw + 6.0,
                    y + 4.0,
                    v
                );
            }
            let _ = writeln!(
                s,
                r#"<text x="{}" y="{}" transform="rotate(90 {} {})" text-anchor="middle" font-family="sans-serif" font-size="12">{}</text>"#,
                WIDTH - 18.0,
                TOP + ph / 2.0,
                WIDTH - 18.0,
                TOP + ph / 2.0,
                esc(name)
            );
        }
        s.push_str("</svg>\n");
        s
    }
}
