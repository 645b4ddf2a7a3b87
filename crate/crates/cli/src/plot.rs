use crate::CliError;
use qha_core::numerics::linear_fit;
use std::fmt::Write;
use std::path::Path;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PlotKind {
    /// `n,lambda_n`: |λ_n| against n on log-log axes with the least-squares
    /// slope over n in [10³, 10⁵] (or the upper two thirds of the decades).
    LoglogSpectrum,
    /// `p,ratio`: tail ratio against p on a log y axis.
    RatioCurve,
}

impl std::str::FromStr for PlotKind {
    type Err = CliError;
    fn from_str(s: &str) -> Result<Self, CliError> {
        match s {
            "loglog-spectrum" => Ok(Self::LoglogSpectrum),
            "ratio-curve" => Ok(Self::RatioCurve),
            _ => Err(CliError::Usage(format!("unknown plot kind \"{s}\"; expected loglog-spectrum or ratio-curve"))),
        }
    }
}

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 400.0;
const MARGIN: f64 = 56.0;
/// Plotted points after log-spaced decimation.
const MAX_POINTS: usize = 400;

/// Reads a two-column CSV with the given header.
fn read_columns(path: &Path, header: [&str; 2]) -> Result<Vec<(f64, f64)>, CliError> {
    let bad = |msg: String| CliError::Usage(format!("{}: {msg}", path.display()));
    let mut r = csv::Reader::from_path(path).map_err(|e| bad(e.to_string()))?;
    let h = r.headers().map_err(|e| bad(e.to_string()))?.clone();
    if h.len() != 2 || h.get(0) != Some(header[0]) || h.get(1) != Some(header[1]) {
        return Err(bad(format!("expected columns {},{}", header[0], header[1])));
    }
    let mut rows = Vec::new();
    for rec in r.records() {
        let rec = rec.map_err(|e| bad(e.to_string()))?;
        let parse = |i: usize| -> Result<f64, CliError> {
            rec.get(i)
                .and_then(|s| s.trim().parse::<f64>().ok())
                .filter(|v| v.is_finite())
                .ok_or_else(|| bad(format!("bad number on line {}", rows.len() + 2)))
        };
        rows.push((parse(0)?, parse(1)?));
    }
    if rows.is_empty() {
        return Err(bad("no data rows".into()));
    }
    Ok(rows)
}

/// Renders a CSV written by an experiment into an SVG document. Fonts,
/// sizes and number formats are fixed so equal input gives equal bytes.
pub fn render_plot(csv_path: &Path, kind: PlotKind) -> Result<String, CliError> {
    match kind {
        PlotKind::LoglogSpectrum => {
            let rows = read_columns(csv_path, ["n", "lambda_n"])?;
            let pts: Vec<(f64, f64)> = rows.iter().filter(|(n, l)| *n >= 1.0 && l.abs() > 0.0).map(|(n, l)| (n.log10(), l.abs().log10())).collect();
            if pts.len() < 2 {
                return Err(CliError::Usage(format!("{}: fewer than two plottable points", csv_path.display())));
            }
            // Same window as the threshold report when the data reach it.
            let top = pts[pts.len() - 1].0;
            let (lo, hi) = if top >= 5.0 { (3.0, 5.0) } else { (top / 3.0, top) };
            let (xs, ys): (Vec<f64>, Vec<f64>) = pts.iter().filter(|(x, _)| *x >= lo && *x <= hi).copied().unzip();
            let slope = linear_fit(&xs, &ys).map(|(s, _)| s);
            let label = match slope {
                Some(s) => format!("slope={s:.4}"),
                None => "slope=n/a".to_string(),
            };
            Ok(svg(&decimate(&pts), "log10 n", "log10 |lambda_n|", &label))
        }
        PlotKind::RatioCurve => {
            let rows = read_columns(csv_path, ["p", "ratio"])?;
            let pts: Vec<(f64, f64)> = rows.iter().filter(|(_, r)| *r > 0.0).map(|(p, r)| (*p, r.log10())).collect();
            if pts.len() < 2 {
                return Err(CliError::Usage(format!("{}: fewer than two plottable points", csv_path.display())));
            }
            let cross = pts.windows(2).find_map(|w| {
                let c = 0.05f64.log10();
                (w[0].1 >= c && w[1].1 < c).then(|| w[0].0 + (w[0].1 - c) / (w[0].1 - w[1].1) * (w[1].0 - w[0].0))
            });
            let label = match cross {
                Some(p) => format!("crossing 0.05 at p={p:.3}"),
                None => "no crossing of 0.05".to_string(),
            };
            Ok(svg(&pts, "p", "log10 tail ratio", &label))
        }
    }
}

pub fn write_plot(csv_path: &Path, kind: PlotKind, out: &Path) -> Result<(), CliError> {
    let text = render_plot(csv_path, kind)?;
    std::fs::write(out, text).map_err(|e| CliError::Io(format!("{}: {e}", out.display())))
}

fn decimate(pts: &[(f64, f64)]) -> Vec<(f64, f64)> {
    if pts.len() <= MAX_POINTS {
        return pts.to_vec();
    }
    let (x0, x1) = (pts[0].0, pts[pts.len() - 1].0);
    let step = (x1 - x0) / MAX_POINTS as f64;
    let mut out = Vec::with_capacity(MAX_POINTS + 1);
    let mut next = x0;
    for &p in pts {
        if p.0 >= next {
            out.push(p);
            next = p.0 + step;
        }
    }
    out
}

fn svg(pts: &[(f64, f64)], xlabel: &str, ylabel: &str, note: &str) -> String {
    let lo = |f: fn(&(f64, f64)) -> f64| pts.iter().map(f).fold(f64::INFINITY, f64::min);
    let hi = |f: fn(&(f64, f64)) -> f64| pts.iter().map(f).fold(f64::NEG_INFINITY, f64::max);
    let (mut x0, mut x1, mut y0, mut y1) = (lo(|p| p.0), hi(|p| p.0), lo(|p| p.1), hi(|p| p.1));
    if x1 - x0 < 1e-12 {
        x0 -= 0.5;
        x1 += 0.5;
    }
    if y1 - y0 < 1e-12 {
        y0 -= 0.5;
        y1 += 0.5;
    }
    let sx = |x: f64| MARGIN + (x - x0) / (x1 - x0) * (WIDTH - 2.0 * MARGIN);
    let sy = |y: f64| HEIGHT - MARGIN - (y - y0) / (y1 - y0) * (HEIGHT - 2.0 * MARGIN);
    let mut s = String::new();
    let _ = writeln!(s, r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}">"#);
    let _ = writeln!(s, r#"<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#);
    let _ = writeln!(
        s,
        r#"<rect x="{MARGIN}" y="{MARGIN}" width="{}" height="{}" fill="none" stroke="black"/>"#,
        WIDTH - 2.0 * MARGIN,
        HEIGHT - 2.0 * MARGIN
    );
    let mut path = String::new();
    for (k, (x, y)) in pts.iter().enumerate() {
        let _ = write!(path, "{}{:.2},{:.2}", if k == 0 { "M" } else { " L" }, sx(*x), sy(*y));
    }
    let _ = writeln!(s, r#"<path d="{path}" fill="none" stroke="steelblue" stroke-width="1.5"/>"#);
    let font = r#"font-family="monospace" font-size="12""#;
    for (v, anchor, x, y) in [(x0, "start", MARGIN, HEIGHT - MARGIN + 16.0), (x1, "end", WIDTH - MARGIN, HEIGHT - MARGIN + 16.0)] {
        let _ = writeln!(s, r#"<text x="{x:.2}" y="{y:.2}" {font} text-anchor="{anchor}">{v:.3}</text>"#);
    }
    for (v, y) in [(y0, HEIGHT - MARGIN), (y1, MARGIN + 10.0)] {
        let _ = writeln!(s, r#"<text x="{:.2}" y="{y:.2}" {font} text-anchor="end">{v:.3}</text>"#, MARGIN - 4.0);
    }
    let _ = writeln!(s, r#"<text x="{:.2}" y="{:.2}" {font} text-anchor="middle">{xlabel}</text>"#, WIDTH / 2.0, HEIGHT - 16.0);
    let _ = writeln!(
        s,
        r#"<text x="16" y="{:.2}" {font} text-anchor="middle" transform="rotate(-90 16 {:.2})">{ylabel}</text>"#,
        HEIGHT / 2.0,
        HEIGHT / 2.0
    );
    let _ = writeln!(s, r#"<text x="{:.2}" y="{:.2}" {font} text-anchor="end">{note}</text>"#, WIDTH - MARGIN - 6.0, MARGIN + 18.0);
    s.push_str("</svg>\n");
    s
}
