//! Static SVG line plots rendered from CSV files already on disk.

use std::fmt::Write as _;
use std::path::Path;

use crate::error::CliError;

const WIDTH: f64 = 820.0;
const HEIGHT: f64 = 520.0;
const LEFT: f64 = 90.0;
const RIGHT: f64 = 170.0;
const TOP: f64 = 60.0;
const BOTTOM: f64 = 70.0;
/// Ordinate span is capped at this many decades below the maximum.
const MAX_DECADES: f64 = 14.0;
const COLORS: [&str; 4] = ["#1f4e9c", "#c0392b", "#27864a", "#8e44ad"];

pub struct PlotSpec<'a> {
    pub x_column: &'a str,
    pub series: Vec<(&'a str, &'a str)>,
    pub x_label: &'a str,
    pub y_label: &'a str,
    pub title: String,
    pub notes: Vec<String>,
    pub log_x: bool,
}

/// Reads `csv_path` and writes a log-ordinate line plot to `svg_path`.
pub fn plot_csv(csv_path: &Path, svg_path: &Path, spec: &PlotSpec) -> Result<(), CliError> {
    let mut reader = csv::Reader::from_path(csv_path).map_err(|e| CliError::Io(std::io::Error::other(e)))?;
    let headers = reader.headers().map_err(|e| CliError::Io(std::io::Error::other(e)))?.clone();
    let col = |name: &str| {
        headers
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| CliError::Io(std::io::Error::other(format!("column {name} missing from {}", csv_path.display()))))
    };
    let xi = col(spec.x_column)?;
    let yi: Vec<usize> = spec.series.iter().map(|(c, _)| col(c)).collect::<Result<_, _>>()?;
    let mut xs = Vec::new();
    let mut ys: Vec<Vec<f64>> = vec![Vec::new(); yi.len()];
    for rec in reader.records() {
        let rec = rec.map_err(|e| CliError::Io(std::io::Error::other(e)))?;
        let num = |i: usize| rec.get(i).and_then(|s| s.parse::<f64>().ok()).unwrap_or(f64::NAN);
        xs.push(num(xi));
        for (j, &i) in yi.iter().enumerate() {
            ys[j].push(num(i));
        }
    }
    std::fs::write(svg_path, render(&xs, &ys, spec))?;
    Ok(())
}

fn render(xs: &[f64], ys: &[Vec<f64>], spec: &PlotSpec) -> String {
    let tx = |x: f64| if spec.log_x { x.log10() } else { x };
    let finite_x: Vec<f64> = xs.iter().copied().filter(|x| x.is_finite() && (!spec.log_x || *x > 0.0)).map(tx).collect();
    let (mut x0, mut x1) = bounds(&finite_x).unwrap_or((0.0, 1.0));
    if x1 <= x0 {
        x0 -= 0.5;
        x1 += 0.5;
    }
    let logs: Vec<f64> = ys.iter().flatten().copied().filter(|v| v.is_finite() && *v > 0.0).map(f64::log10).collect();
    let (mut y0, mut y1) = bounds(&logs).unwrap_or((0.0, 1.0));
    y1 = y1.ceil();
    y0 = y0.floor().max(y1 - MAX_DECADES);
    if y1 <= y0 {
        y0 = y1 - 1.0;
    }
    let pw = WIDTH - LEFT - RIGHT;
    let ph = HEIGHT - TOP - BOTTOM;
    let px = |x: f64| LEFT + (x - x0) / (x1 - x0) * pw;
    let py = |ly: f64| TOP + (y1 - ly.clamp(y0, y1)) / (y1 - y0) * ph;

    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(s, r#"<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#);
    let _ = writeln!(s, r#"<text x="{LEFT}" y="28" font-size="15">{}</text>"#, escape(&spec.title));
    let _ = writeln!(s, r##"<rect x="{LEFT}" y="{TOP}" width="{pw}" height="{ph}" fill="none" stroke="#333"/>"##);

    let step = if y1 - y0 > 8.0 { 2.0 } else { 1.0 };
    let mut d = y0;
    while d <= y1 + 1e-9 {
        let y = py(d);
        let _ = writeln!(s, r##"<line x1="{LEFT}" y1="{y:.2}" x2="{:.2}" y2="{y:.2}" stroke="#ddd"/>"##, LEFT + pw);
        let _ = writeln!(s, r#"<text x="{:.2}" y="{:.2}" text-anchor="end">1e{}</text>"#, LEFT - 6.0, y + 4.0, d as i64);
        d += step;
    }
    for t in ticks(x0, x1) {
        let x = px(t);
        let label = if spec.log_x { format!("{:.4}", 10f64.powf(t)) } else { format!("{t:.4}") };
        let label = label.trim_end_matches('0').trim_end_matches('.').to_string();
        let _ = writeln!(s, r##"<line x1="{x:.2}" y1="{:.2}" x2="{x:.2}" y2="{:.2}" stroke="#333"/>"##, TOP + ph, TOP + ph + 5.0);
        let _ = writeln!(s, r#"<text x="{x:.2}" y="{:.2}" text-anchor="middle">{label}</text>"#, TOP + ph + 18.0);
    }
    let _ = writeln!(s, r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">{}</text>"#, LEFT + pw / 2.0, HEIGHT - 25.0, escape(spec.x_label));
    let _ = writeln!(
        s,
        r#"<text x="22" y="{:.2}" text-anchor="middle" transform="rotate(-90 22 {:.2})">{}</text>"#,
        TOP + ph / 2.0,
        TOP + ph / 2.0,
        escape(spec.y_label)
    );

    for (j, series) in ys.iter().enumerate() {
        let color = COLORS[j % COLORS.len()];
        let mut pts = String::new();
        for (x, y) in xs.iter().zip(series) {
            if x.is_finite() && y.is_finite() && *y > 0.0 && (!spec.log_x || *x > 0.0) {
                let _ = write!(pts, "{:.2},{:.2} ", px(tx(*x)), py(y.log10()));
            }
        }
        let _ = writeln!(s, r#"<polyline fill="none" stroke="{color}" stroke-width="1.4" points="{}"/>"#, pts.trim_end());
        let ly = TOP + 10.0 + 18.0 * j as f64;
        let lx = LEFT + pw + 14.0;
        let _ = writeln!(s, r#"<line x1="{lx:.2}" y1="{ly:.2}" x2="{:.2}" y2="{ly:.2}" stroke="{color}" stroke-width="2"/>"#, lx + 22.0);
        let _ = writeln!(s, r#"<text x="{:.2}" y="{:.2}">{}</text>"#, lx + 28.0, ly + 4.0, escape(spec.series[j].1));
    }
    for (i, note) in spec.notes.iter().enumerate() {
        let _ = writeln!(s, r#"<text x="{:.2}" y="{:.2}" font-size="10">{}</text>"#, LEFT + pw + 14.0, TOP + 90.0 + 14.0 * i as f64, escape(note));
    }
    s.push_str("</svg>\n");
    s
}

fn bounds(v: &[f64]) -> Option<(f64, f64)> {
    let lo = v.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = v.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    (lo.is_finite() && hi.is_finite()).then_some((lo, hi))
}

/// Round-number ticks inside [a, b].
fn ticks(a: f64, b: f64) -> Vec<f64> {
    let raw = (b - a) / 6.0;
    let mag = 10f64.powf(raw.log10().floor());
    let step = [1.0, 2.0, 5.0, 10.0].iter().map(|m| m * mag).find(|s| *s >= raw).unwrap_or(10.0 * mag);
    let mut t = (a / step).ceil() * step;
    let mut out = Vec::new();
    while t <= b + 1e-9 * step {
        out.push(t);
        t += step;
    }
    out
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tick_steps() {
        assert_eq!(ticks(0.0, 6.0), vec![0.0, 1.0, 2.0, 3.0, 4.0, 5.0, 6.0]);
        assert!(ticks(0.5, 2.0).len() >= 4);
    }

    #[test]
    fn renders_polyline() {
        let spec = PlotSpec {
            x_column: "x",
            series: vec![("y", "y <label>")],
            x_label: "u",
            y_label: "rad/s",
            title: "t".into(),
            notes: vec!["N = 1".into()],
            log_x: false,
        };
        let s = render(&[1.0, 2.0, 3.0], &[vec![1.0, 10.0, f64::NAN]], &spec);
        assert!(s.starts_with("<svg"));
        assert!(s.contains("<polyline"));
        assert!(s.contains("y &lt;label&gt;"));
        assert_eq!(s.matches("<polyline").count(), 1);
    }
}
