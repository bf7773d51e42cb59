//! Minimal log-log magnitude plots rendered directly as SVG text.

use std::fmt::Write as _;

pub struct Series<'a> {
    pub label: &'a str,
    pub color: &'a str,
    /// (omega, magnitude) pairs; non-positive values are skipped.
    pub points: &'a [(f64, f64)],
}

const WIDTH: f64 = 860.0;
const HEIGHT: f64 = 560.0;
const MARGIN_L: f64 = 70.0;
const MARGIN_R: f64 = 20.0;
const MARGIN_T: f64 = 40.0;
const MARGIN_B: f64 = 55.0;

/// Log-log polyline plot with decade gridlines and a horizontal line at the
/// threshold magnitude.
pub fn render_loglog(
    title: &str,
    x_label: &str,
    y_label: &str,
    series: &[Series<'_>],
    threshold: f64,
) -> String {
    let mut lo_x = f64::INFINITY;
    let mut hi_x = f64::NEG_INFINITY;
    let mut lo_y = f64::INFINITY;
    let mut hi_y = f64::NEG_INFINITY;
    for s in series {
        for &(x, y) in s.points {
            if x > 0.0 && y > 0.0 {
                lo_x = lo_x.min(x);
                hi_x = hi_x.max(x);
                lo_y = lo_y.min(y);
                hi_y = hi_y.max(y);
            }
        }
    }
    if !lo_x.is_finite() || !lo_y.is_finite() {
        lo_x = 1e-2;
        hi_x = 1e3;
        lo_y = 1e-2;
        hi_y = 1e2;
    }
    lo_y = lo_y.min(threshold / 10.0);
    hi_y = hi_y.max(threshold * 10.0);

    let (lx0, lx1) = (lo_x.log10().floor(), hi_x.log10().ceil());
    let (ly0, ly1) = (lo_y.log10().floor(), hi_y.log10().ceil());
    let plot_w = WIDTH - MARGIN_L - MARGIN_R;
    let plot_h = HEIGHT - MARGIN_T - MARGIN_B;
    let to_px = |x: f64, y: f64| -> (f64, f64) {
        let fx = (x.log10() - lx0) / (lx1 - lx0);
        let fy = (y.log10() - ly0) / (ly1 - ly0);
        (MARGIN_L + fx * plot_w, HEIGHT - MARGIN_B - fy * plot_h)
    };

    let mut out = String::new();
    let _ = writeln!(
        out,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{WIDTH}\" height=\"{HEIGHT}\" viewBox=\"0 0 {WIDTH} {HEIGHT}\">"
    );
    let _ = writeln!(
        out,
        "<rect width=\"{WIDTH}\" height=\"{HEIGHT}\" fill=\"white\"/>"
    );
    let _ = writeln!(
        out,
        "<text x=\"{:.2}\" y=\"24\" font-family=\"sans-serif\" font-size=\"16\" text-anchor=\"middle\">{title}</text>",
        WIDTH / 2.0
    );

    // decade gridlines and tick labels
    let mut dec = lx0 as i64;
    while dec <= lx1 as i64 {
        let (px, _) = to_px(10f64.powi(dec as i32), 10f64.powf(ly0));
        let _ = writeln!(
            out,
            "<line x1=\"{px:.2}\" y1=\"{MARGIN_T}\" x2=\"{px:.2}\" y2=\"{:.2}\" stroke=\"#dddddd\"/>",
            HEIGHT - MARGIN_B
        );
        let _ = writeln!(
            out,
            "<text x=\"{px:.2}\" y=\"{:.2}\" font-family=\"sans-serif\" font-size=\"12\" text-anchor=\"middle\">1e{dec}</text>",
            HEIGHT - MARGIN_B + 18.0
        );
        dec += 1;
    }
    let mut dec = ly0 as i64;
    while dec <= ly1 as i64 {
        let (_, py) = to_px(10f64.powf(lx0), 10f64.powi(dec as i32));
        let _ = writeln!(
            out,
            "<line x1=\"{MARGIN_L}\" y1=\"{py:.2}\" x2=\"{:.2}\" y2=\"{py:.2}\" stroke=\"#dddddd\"/>",
            WIDTH - MARGIN_R
        );
        let _ = writeln!(
            out,
            "<text x=\"{:.2}\" y=\"{:.2}\" font-family=\"sans-serif\" font-size=\"12\" text-anchor=\"end\">1e{dec}</text>",
            MARGIN_L - 6.0,
            py + 4.0
        );
        dec += 1;
    }

    // frame
    let _ = writeln!(
        out,
        "<rect x=\"{MARGIN_L}\" y=\"{MARGIN_T}\" width=\"{plot_w:.2}\" height=\"{plot_h:.2}\" fill=\"none\" stroke=\"black\"/>"
    );

    // threshold line
    if threshold > 0.0 {
        let (_, py) = to_px(10f64.powf(lx0), threshold);
        let _ = writeln!(
            out,
            "<line x1=\"{MARGIN_L}\" y1=\"{py:.2}\" x2=\"{:.2}\" y2=\"{py:.2}\" stroke=\"#555555\" stroke-dasharray=\"6,4\"/>",
            WIDTH - MARGIN_R
        );
    }

    for (i, s) in series.iter().enumerate() {
        let mut path = String::new();
        let mut pen_down = false;
        for &(x, y) in s.points {
            if x <= 0.0 || y <= 0.0 || !x.is_finite() || !y.is_finite() {
                pen_down = false;
                continue;
            }
            let (px, py) = to_px(x, y);
            let _ = write!(path, "{}{px:.2} {py:.2} ", if pen_down { "L" } else { "M" });
            pen_down = true;
        }
        let _ = writeln!(
            out,
            "<path d=\"{}\" fill=\"none\" stroke=\"{}\" stroke-width=\"1.8\"/>",
            path.trim_end(),
            s.color
        );
        let ly = MARGIN_T + 18.0 + 18.0 * i as f64;
        let _ = writeln!(
            out,
            "<line x1=\"{:.2}\" y1=\"{ly:.2}\" x2=\"{:.2}\" y2=\"{ly:.2}\" stroke=\"{}\" stroke-width=\"1.8\"/>",
            MARGIN_L + 10.0,
            MARGIN_L + 34.0,
            s.color
        );
        let _ = writeln!(
            out,
            "<text x=\"{:.2}\" y=\"{:.2}\" font-family=\"sans-serif\" font-size=\"13\">{}</text>",
            MARGIN_L + 40.0,
            ly + 4.0,
            s.label
        );
    }

    let _ = writeln!(
        out,
        "<text x=\"{:.2}\" y=\"{:.2}\" font-family=\"sans-serif\" font-size=\"14\" text-anchor=\"middle\">{x_label}</text>",
        MARGIN_L + plot_w / 2.0,
        HEIGHT - 12.0
    );
    let _ = writeln!(
        out,
        "<text x=\"18\" y=\"{:.2}\" font-family=\"sans-serif\" font-size=\"14\" text-anchor=\"middle\" transform=\"rotate(-90 18 {:.2})\">{y_label}</text>",
        MARGIN_T + plot_h / 2.0,
        MARGIN_T + plot_h / 2.0
    );
    out.push_str("</svg>\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn produces_paths_for_each_series() {
        let pts_a: Vec<(f64, f64)> = (1..100).map(|i| (i as f64, 1.0 / i as f64)).collect();
        let pts_b: Vec<(f64, f64)> = (1..100).map(|i| (i as f64, i as f64)).collect();
        let svg = render_loglog(
            "t",
            "x",
            "y",
            &[
                Series {
                    label: "a",
                    color: "#c0392b",
                    points: &pts_a,
                },
                Series {
                    label: "b",
                    color: "#2980b9",
                    points: &pts_b,
                },
            ],
            1.0,
        );
        assert_eq!(svg.matches("<path").count(), 2);
        assert!(svg.contains("stroke-dasharray"));
        assert!(svg.starts_with("<svg"));
        assert!(svg.trim_end().ends_with("</svg>"));
    }

    #[test]
    fn skips_non_positive_points() {
        let pts = [(0.0, 1.0), (1.0, 0.5), (2.0, -1.0), (3.0, 0.25)];
        let svg = render_loglog(
            "t",
            "x",
            "y",
            &[Series {
                label: "a",
                color: "#000",
                points: &pts,
            }],
            1.0,
        );
        // two disjoint segments: both start with M
        let path_line = svg.lines().find(|l| l.starts_with("<path")).unwrap();
        assert_eq!(path_line.matches('M').count(), 2);
    }
}
