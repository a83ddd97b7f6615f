//! Schematic SVG renderings of the pipeline outputs: cluster maps as colored
//! grids and the modularity / anticorrelation traces as line charts. These
//! are quick-look figures, not publication graphics — fixed canvas, small
//! palette, everything built as plain strings so output stays deterministic.

use std::fmt::Write as _;

use crate::connectivity::{AnticorrMode, MatrixKind};
use crate::error::Result;
use crate::pipeline::{PipelineConfig, WindowResult};
use crate::report::MethodId;
use crate::signal::Recording;

const WIDTH: f64 = 800.0;
const HEIGHT: f64 = 360.0;
const MARGIN_LEFT: f64 = 60.0;
const MARGIN_RIGHT: f64 = 110.0;
const MARGIN_TOP: f64 = 34.0;
const MARGIN_BOTTOM: f64 = 40.0;

/// Cluster-id fill colors; ids beyond the palette wrap around.
const PALETTE: [&str; 12] = [
    "#4e79a7", "#f28e2b", "#e15759", "#76b7b2", "#59a14f", "#edc948", "#b07aa1", "#ff9da7",
    "#9c755f", "#bab0ab", "#86bcb6", "#d37295",
];

fn method_color(method: MethodId) -> &'static str {
    match method {
        MethodId::A => "#1f77b4",
        MethodId::B => "#d62728",
        MethodId::C => "#2ca02c",
        MethodId::D => "#9467bd",
    }
}

fn svg_open(title: &str) -> String {
    let mut s = String::new();
    writeln!(
        s,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{WIDTH:.0}\" height=\"{HEIGHT:.0}\" \
         viewBox=\"0 0 {WIDTH:.0} {HEIGHT:.0}\" font-family=\"sans-serif\">"
    )
    .unwrap();
    writeln!(s, "<rect width=\"{WIDTH:.0}\" height=\"{HEIGHT:.0}\" fill=\"white\"/>").unwrap();
    writeln!(
        s,
        "<text x=\"{:.2}\" y=\"20\" font-size=\"14\" fill=\"#222\">{title}</text>",
        MARGIN_LEFT
    )
    .unwrap();
    s
}

/// One polyline per series over a shared x axis of window positions.
fn line_chart(title: &str, x_label: &str, series: &[(String, &'static str, Vec<f64>)]) -> String {
    let mut svg = svg_open(title);
    let plot_w = WIDTH - MARGIN_LEFT - MARGIN_RIGHT;
    let plot_h = HEIGHT - MARGIN_TOP - MARGIN_BOTTOM;
    let n = series.iter().map(|(_, _, ys)| ys.len()).max().unwrap_or(0);

    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for (_, _, ys) in series {
        for &y in ys {
            lo = lo.min(y);
            hi = hi.max(y);
        }
    }
    if !lo.is_finite() || !hi.is_finite() {
        lo = 0.0;
        hi = 1.0;
    }
    if hi - lo < 1e-9 {
        lo -= 0.5;
        hi += 0.5;
    }
    let pad = 0.05 * (hi - lo);
    lo -= pad;
    hi += pad;

    let x_of = |i: usize| {
        if n <= 1 {
            MARGIN_LEFT + plot_w / 2.0
        } else {
            MARGIN_LEFT + plot_w * i as f64 / (n - 1) as f64
        }
    };
    let y_of = |v: f64| MARGIN_TOP + plot_h * (1.0 - (v - lo) / (hi - lo));

    // Axes with min/max labels.
    write!(
        svg,
        "<line x1=\"{l:.2}\" y1=\"{t:.2}\" x2=\"{l:.2}\" y2=\"{b:.2}\" stroke=\"#888\"/>\n\
         <line x1=\"{l:.2}\" y1=\"{b:.2}\" x2=\"{r:.2}\" y2=\"{b:.2}\" stroke=\"#888\"/>\n",
        l = MARGIN_LEFT,
        t = MARGIN_TOP,
        b = MARGIN_TOP + plot_h,
        r = MARGIN_LEFT + plot_w
    )
    .unwrap();
    for (v, y) in [(hi, MARGIN_TOP), (lo, MARGIN_TOP + plot_h)] {
        writeln!(
            svg,
            "<text x=\"{:.2}\" y=\"{:.2}\" font-size=\"10\" fill=\"#444\" \
             text-anchor=\"end\">{v:.2}</text>",
            MARGIN_LEFT - 6.0,
            y + 4.0
        )
        .unwrap();
    }
    writeln!(
        svg,
        "<text x=\"{:.2}\" y=\"{:.2}\" font-size=\"10\" fill=\"#444\" \
         text-anchor=\"middle\">{x_label}</text>",
        MARGIN_LEFT + plot_w / 2.0,
        HEIGHT - 10.0
    )
    .unwrap();
    if hi > 0.0 && lo < 0.0 {
        let y0 = y_of(0.0);
        writeln!(
            svg,
            "<line x1=\"{:.2}\" y1=\"{y0:.2}\" x2=\"{:.2}\" y2=\"{y0:.2}\" \
             stroke=\"#ccc\" stroke-dasharray=\"3,3\"/>",
            MARGIN_LEFT,
            MARGIN_LEFT + plot_w
        )
        .unwrap();
    }

    for (si, (label, color, ys)) in series.iter().enumerate() {
        let points: Vec<String> = ys
            .iter()
            .enumerate()
            .map(|(i, &y)| format!("{:.2},{:.2}", x_of(i), y_of(y)))
            .collect();
        writeln!(
            svg,
            "<polyline fill=\"none\" stroke=\"{color}\" stroke-width=\"1.5\" \
             points=\"{}\"/>",
            points.join(" ")
        )
        .unwrap();
        let ly = MARGIN_TOP + 14.0 * si as f64 + 8.0;
        write!(
            svg,
            "<rect x=\"{x:.2}\" y=\"{y:.2}\" width=\"10\" height=\"3\" fill=\"{color}\"/>\n\
             <text x=\"{tx:.2}\" y=\"{ty:.2}\" font-size=\"11\" fill=\"#222\">{label}</text>\n",
            x = WIDTH - MARGIN_RIGHT + 12.0,
            y = ly,
            tx = WIDTH - MARGIN_RIGHT + 26.0,
            ty = ly + 4.0
        )
        .unwrap();
    }
    svg.push_str("</svg>\n");
    svg
}

/// Vertices down, windows across, each cell tinted by its 1-based cluster id.
fn cluster_map_svg(title: &str, grid: &[Vec<usize>]) -> String {
    let mut svg = svg_open(title);
    let rows = grid.len();
    let cols = grid.first().map_or(0, |r| r.len());
    let plot_w = WIDTH - MARGIN_LEFT - MARGIN_RIGHT;
    let plot_h = HEIGHT - MARGIN_TOP - MARGIN_BOTTOM;
    if rows > 0 && cols > 0 {
        let cw = plot_w / cols as f64;
        let ch = plot_h / rows as f64;
        for (v, row) in grid.iter().enumerate() {
            for (w, &id) in row.iter().enumerate() {
                let color = PALETTE[(id - 1) % PALETTE.len()];
                writeln!(
                    svg,
                    "<rect x=\"{:.2}\" y=\"{:.2}\" width=\"{:.2}\" height=\"{:.2}\" \
                     fill=\"{color}\"/>",
                    MARGIN_LEFT + cw * w as f64,
                    MARGIN_TOP + ch * v as f64,
                    cw,
                    ch
                )
                .unwrap();
            }
        }
    }
    writeln!(
        svg,
        "<text x=\"{:.2}\" y=\"{:.2}\" font-size=\"10\" fill=\"#444\" \
         text-anchor=\"middle\">window</text>",
        MARGIN_LEFT + plot_w / 2.0,
        HEIGHT - 10.0
    )
    .unwrap();
    writeln!(
        svg,
        "<text x=\"14\" y=\"{:.2}\" font-size=\"10\" fill=\"#444\" \
         transform=\"rotate(-90 14 {0:.2})\" text-anchor=\"middle\">channel</text>",
        MARGIN_TOP + plot_h / 2.0
    )
    .unwrap();
    svg.push_str("</svg>\n");
    svg
}

pub(crate) fn emit_plots(
    cfg: &PipelineConfig,
    rec: &Recording,
    results: &[WindowResult],
) -> Result<()> {
    let dir = cfg.out_dir.join("plots");
    std::fs::create_dir_all(&dir).map_err(|e| crate::error::Error::io(&dir, e))?;

    for &kind in &cfg.kinds {
        let rows: Vec<&WindowResult> = results.iter().filter(|r| r.kind == kind).collect();

        for (mi, &method) in cfg.methods.iter().enumerate() {
            let grid: Vec<Vec<usize>> = (0..rec.n_channels())
                .map(|v| {
                    rows.iter()
                        .map(|r| r.reports[mi].chosen().clustering.assignment()[v] + 1)
                        .collect()
                })
                .collect();
            let title = format!("cluster map — {kind}, method {method}");
            let path = dir.join(format!("cluster_map_{}_{}.svg", kind.as_str(), method.letter()));
            std::fs::write(&path, cluster_map_svg(&title, &grid))
                .map_err(|e| crate::error::Error::io(&path, e))?;
        }

        let series: Vec<(String, &'static str, Vec<f64>)> = cfg
            .methods
            .iter()
            .enumerate()
            .map(|(mi, &method)| {
                let ys: Vec<f64> = rows.iter().map(|r| r.reports[mi].chosen().q_s).collect();
                (format!("method {method}"), method_color(method), ys)
            })
            .collect();
        let title = format!("chosen signed modularity — {kind}");
        let path = dir.join(format!("modularity_{}.svg", kind.as_str()));
        std::fs::write(&path, line_chart(&title, "window", &series))
            .map_err(|e| crate::error::Error::io(&path, e))?;
    }

    if cfg.kinds.contains(&MatrixKind::Correlation) {
        let rows: Vec<&WindowResult> =
            results.iter().filter(|r| r.kind == MatrixKind::Correlation).collect();
        let (label, pick): (&str, fn(&WindowResult) -> f64) = match cfg.anticorr_mode {
            AnticorrMode::Weighted => ("weighted", |r| r.anticorr_weighted.unwrap()),
            AnticorrMode::Count => ("count", |r| r.anticorr_count.unwrap()),
        };
        let ys: Vec<f64> = rows.iter().map(|r| pick(r)).collect();
        let series = vec![(label.to_string(), "#1f77b4", ys)];
        let path = dir.join("anticorrelation.svg");
        std::fs::write(&path, line_chart("anticorrelation index", "window", &series))
            .map_err(|e| crate::error::Error::io(&path, e))?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn charts_are_wellformed_and_deterministic() {
        let series = vec![
            ("method A".to_string(), "#1f77b4", vec![0.1, 0.4, 0.35]),
            ("method D".to_string(), "#9467bd", vec![-0.2, 0.5, 0.5]),
        ];
        let a = line_chart("t", "window", &series);
        let b = line_chart("t", "window", &series);
        assert_eq!(a, b);
        assert!(a.starts_with("<svg"));
        assert!(a.trim_end().ends_with("</svg>"));
        assert_eq!(a.matches("<polyline").count(), 2);

        let grid = vec![vec![1, 1, 2], vec![1, 2, 2]];
        let m = cluster_map_svg("m", &grid);
        assert_eq!(m.matches("<rect").count(), 1 + 6); // background + cells
    }

    #[test]
    fn flat_series_still_renders() {
        let series = vec![("x".to_string(), "#000000", vec![0.5, 0.5])];
        let svg = line_chart("flat", "window", &series);
        assert!(svg.contains("<polyline"));
        assert!(!svg.contains("NaN"));
    }
}
