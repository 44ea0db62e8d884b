//! Byte-stable SVG line plots for scenario artifacts.
//!
//! The renderer is a pure function of its inputs: fixed canvas geometry,
//! fixed palette, fixed number formatting. Identical inputs therefore
//! produce identical bytes, which is what the determinism contract for
//! scenario outputs requires.

use crate::error::{Error, Result};
use std::fmt::Write as _;
use std::path::Path;

const WIDTH: f64 = 720.0;
const HEIGHT: f64 = 480.0;
const MARGIN_L: f64 = 72.0;
const MARGIN_R: f64 = 24.0;
const MARGIN_T: f64 = 36.0;
const MARGIN_B: f64 = 52.0;
const PALETTE: [&str; 8] = [
    "#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#17becf", "#7f7f7f",
];

/// One labelled polyline.
#[derive(Debug, Clone)]
pub struct Series {
    pub label: String,
    pub xs: Vec<f64>,
    pub ys: Vec<f64>,
}

/// Plot layout: titles, optional log-scale ordinate, and optional
/// threshold lines (a vertical marker, e.g. a light cone position, and a
/// horizontal marker, e.g. a tolerance level).
#[derive(Debug, Clone, Default)]
pub struct PlotSpec {
    pub title: String,
    pub x_label: String,
    pub y_label: String,
    pub log_y: bool,
    pub vline: Option<(f64, String)>,
    pub hline: Option<(f64, String)>,
}

fn fmt_tick(v: f64) -> String {
    if v == 0.0 {
        "0".into()
    } else if v.abs() >= 1e-3 && v.abs() < 1e4 {
        format!("{v:.4}")
    } else {
        format!("{v:.3e}")
    }
}

/// Render the plot, or `None` when no series contributes a drawable point
/// (the empty-trajectory case: no file should be written).
pub fn render_svg(spec: &PlotSpec, series: &[Series]) -> Option<String> {
    // collect drawable points; log plots drop non-positive ordinates
    let mut pts: Vec<Vec<(f64, f64)>> = Vec::with_capacity(series.len());
    for s in series {
        let p: Vec<(f64, f64)> = s
            .xs
            .iter()
            .zip(&s.ys)
            .filter(|(x, y)| x.is_finite() && y.is_finite() && (!spec.log_y || **y > 0.0))
            .map(|(&x, &y)| (x, if spec.log_y { y.log10() } else { y }))
            .collect();
        pts.push(p);
    }
    let mut x_min = f64::INFINITY;
    let mut x_max = f64::NEG_INFINITY;
    let mut y_min = f64::INFINITY;
    let mut y_max = f64::NEG_INFINITY;
    for p in &pts {
        for &(x, y) in p {
            x_min = x_min.min(x);
            x_max = x_max.max(x);
            y_min = y_min.min(y);
            y_max = y_max.max(y);
        }
    }
    if !x_min.is_finite() {
        return None;
    }
    if let Some((h, _)) = &spec.hline {
        let h = if spec.log_y {
            if *h > 0.0 { h.log10() } else { y_min }
        } else {
            *h
        };
        y_min = y_min.min(h);
        y_max = y_max.max(h);
    }
    if x_max - x_min < 1e-300 {
        x_min -= 0.5;
        x_max += 0.5;
    }
    if y_max - y_min < 1e-300 {
        y_min -= 0.5;
        y_max += 0.5;
    }
    let pad = 0.04 * (y_max - y_min);
    y_min -= pad;
    y_max += pad;
    let px = |x: f64| MARGIN_L + (x - x_min) / (x_max - x_min) * (WIDTH - MARGIN_L - MARGIN_R);
    let py = |y: f64| HEIGHT - MARGIN_B - (y - y_min) / (y_max - y_min) * (HEIGHT - MARGIN_T - MARGIN_B);

    let mut svg = String::new();
    let _ = write!(
        svg,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{WIDTH}\" height=\"{HEIGHT}\" \
         viewBox=\"0 0 {WIDTH} {HEIGHT}\">\n\
         <rect width=\"{WIDTH}\" height=\"{HEIGHT}\" fill=\"white\"/>\n"
    );
    let _ = write!(
        svg,
        "<text x=\"{:.1}\" y=\"22\" font-family=\"monospace\" font-size=\"14\" text-anchor=\"middle\">{}</text>\n",
        0.5 * WIDTH,
        xml_escape(&spec.title)
    );
    // axes box
    let _ = write!(
        svg,
        "<rect x=\"{MARGIN_L}\" y=\"{MARGIN_T}\" width=\"{:.1}\" height=\"{:.1}\" \
         fill=\"none\" stroke=\"black\" stroke-width=\"1\"/>\n",
        WIDTH - MARGIN_L - MARGIN_R,
        HEIGHT - MARGIN_T - MARGIN_B
    );
    // ticks: 5 per axis, value labels in fixed formatting
    for i in 0..=4 {
        let fx = x_min + (x_max - x_min) * i as f64 / 4.0;
        let fy = y_min + (y_max - y_min) * i as f64 / 4.0;
        let _ = write!(
            svg,
            "<line x1=\"{0:.2}\" y1=\"{1:.2}\" x2=\"{0:.2}\" y2=\"{2:.2}\" stroke=\"#cccccc\" stroke-width=\"0.5\"/>\n\
             <text x=\"{0:.2}\" y=\"{3:.2}\" font-family=\"monospace\" font-size=\"11\" text-anchor=\"middle\">{4}</text>\n",
            px(fx),
            MARGIN_T,
            HEIGHT - MARGIN_B,
            HEIGHT - MARGIN_B + 16.0,
            fmt_tick(fx)
        );
        let label = if spec.log_y { format!("1e{}", fmt_tick(fy)) } else { fmt_tick(fy) };
        let _ = write!(
            svg,
            "<line x1=\"{0:.2}\" y1=\"{1:.2}\" x2=\"{2:.2}\" y2=\"{1:.2}\" stroke=\"#cccccc\" stroke-width=\"0.5\"/>\n\
             <text x=\"{3:.2}\" y=\"{4:.2}\" font-family=\"monospace\" font-size=\"11\" text-anchor=\"end\">{5}</text>\n",
            MARGIN_L,
            py(fy),
            WIDTH - MARGIN_R,
            MARGIN_L - 6.0,
            py(fy) + 4.0,
            label
        );
    }
    let _ = write!(
        svg,
        "<text x=\"{:.1}\" y=\"{:.1}\" font-family=\"monospace\" font-size=\"12\" text-anchor=\"middle\">{}</text>\n",
        0.5 * WIDTH,
        HEIGHT - 12.0,
        xml_escape(&spec.x_label)
    );
    let _ = write!(
        svg,
        "<text x=\"16\" y=\"{:.1}\" font-family=\"monospace\" font-size=\"12\" text-anchor=\"middle\" \
         transform=\"rotate(-90 16 {:.1})\">{}</text>\n",
        0.5 * HEIGHT,
        0.5 * HEIGHT,
        xml_escape(&spec.y_label)
    );
    // threshold markers
    if let Some((x, label)) = &spec.vline {
        if *x >= x_min && *x <= x_max {
            let _ = write!(
                svg,
                "<line x1=\"{0:.2}\" y1=\"{1}\" x2=\"{0:.2}\" y2=\"{2:.1}\" stroke=\"#444444\" \
                 stroke-width=\"1\" stroke-dasharray=\"5,3\"/>\n\
                 <text x=\"{3:.2}\" y=\"{4:.1}\" font-family=\"monospace\" font-size=\"11\">{5}</text>\n",
                px(*x),
                MARGIN_T,
                HEIGHT - MARGIN_B,
                px(*x) + 4.0,
                MARGIN_T + 14.0,
                xml_escape(label)
            );
        }
    }
    if let Some((y, label)) = &spec.hline {
        let yv = if spec.log_y { y.log10() } else { *y };
        if yv.is_finite() && yv >= y_min && yv <= y_max {
            let _ = write!(
                svg,
                "<line x1=\"{0}\" y1=\"{1:.2}\" x2=\"{2:.1}\" y2=\"{1:.2}\" stroke=\"#444444\" \
                 stroke-width=\"1\" stroke-dasharray=\"5,3\"/>\n\
                 <text x=\"{3:.1}\" y=\"{4:.2}\" font-family=\"monospace\" font-size=\"11\" text-anchor=\"end\">{5}</text>\n",
                MARGIN_L,
                py(yv),
                WIDTH - MARGIN_R,
                WIDTH - MARGIN_R - 4.0,
                py(yv) - 4.0,
                xml_escape(label)
            );
        }
    }
    // polylines + legend
    for (k, (s, p)) in series.iter().zip(&pts).enumerate() {
        let color = PALETTE[k % PALETTE.len()];
        if !p.is_empty() {
            let mut d = String::new();
            for &(x, y) in p {
                let _ = write!(d, "{:.2},{:.2} ", px(x), py(y));
            }
            let _ = write!(
                svg,
                "<polyline points=\"{}\" fill=\"none\" stroke=\"{color}\" stroke-width=\"1.5\"/>\n",
                d.trim_end()
            );
        }
        let ly = MARGIN_T + 16.0 + 16.0 * k as f64;
        let _ = write!(
            svg,
            "<line x1=\"{0:.1}\" y1=\"{1:.1}\" x2=\"{2:.1}\" y2=\"{1:.1}\" stroke=\"{color}\" stroke-width=\"2\"/>\n\
             <text x=\"{3:.1}\" y=\"{4:.1}\" font-family=\"monospace\" font-size=\"11\">{5}</text>\n",
            WIDTH - MARGIN_R - 150.0,
            ly,
            WIDTH - MARGIN_R - 130.0,
            WIDTH - MARGIN_R - 124.0,
            ly + 4.0,
            xml_escape(&s.label)
        );
    }
    svg.push_str("</svg>\n");
    Some(svg)
}

fn xml_escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

/// Write the plot to `path`; returns whether a file was produced (an empty
/// trajectory produces none).
pub fn write_svg(path: &Path, spec: &PlotSpec, series: &[Series]) -> Result<bool> {
    match render_svg(spec, series) {
        Some(svg) => {
            std::fs::write(path, svg).map_err(|e| Error::Io(std::io::Error::new(e.kind(), format!("{}: {e}", path.display()))))?;
            Ok(true)
        }
        None => Ok(false),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn demo() -> (PlotSpec, Vec<Series>) {
        let spec = PlotSpec {
            title: "demo".into(),
            x_label: "t".into(),
            y_label: "v".into(),
            log_y: true,
            vline: Some((1.5, "cone".into())),
            hline: Some((1e-6, "tol".into())),
        };
        let xs: Vec<f64> = (0..50).map(|i| i as f64 * 0.1).collect();
        let ys: Vec<f64> = xs.iter().map(|&x| (-2.0 * x).exp()).collect();
        (spec, vec![Series { label: "u".into(), xs, ys }])
    }

    #[test]
    fn render_is_byte_stable() {
        let (spec, series) = demo();
        let a = render_svg(&spec, &series).unwrap();
        let b = render_svg(&spec, &series).unwrap();
        assert_eq!(a, b);
        assert!(a.starts_with("<svg"));
        assert!(a.contains("polyline"));
    }

    #[test]
    fn empty_input_renders_nothing() {
        let spec = PlotSpec::default();
        assert!(render_svg(&spec, &[]).is_none());
        let empty = Series { label: "e".into(), xs: vec![], ys: vec![] };
        assert!(render_svg(&spec, &[empty]).is_none());
    }

    #[test]
    fn log_scale_drops_nonpositive_points() {
        let spec = PlotSpec { log_y: true, ..Default::default() };
        let s = Series {
            label: "s".into(),
            xs: vec![0.0, 1.0, 2.0],
            ys: vec![-1.0, 0.0, 10.0],
        };
        // a single positive point still renders (as a degenerate polyline)
        assert!(render_svg(&spec, &[s]).is_some());
        let all_bad = Series { label: "b".into(), xs: vec![0.0, 1.0], ys: vec![-1.0, 0.0] };
        assert!(render_svg(&spec, &[all_bad]).is_none());
    }
}
