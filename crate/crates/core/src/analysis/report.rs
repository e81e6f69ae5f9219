//! CSV and SVG output for analysis results.

use std::fmt::Write as _;
use std::io::Write;

use super::free_boundary::{FreeBoundarySet, PointLabel};
use super::pipeline::AnalysisReport;
use crate::error::Result;
use crate::geometry::format_g17;
use crate::geometry::ScalarField;

fn coord_header(dim: usize) -> &'static str {
    if dim == 1 {
        "x,t"
    } else {
        "x,y,t"
    }
}

fn coords(report: &AnalysisReport, index: usize) -> String {
    let p = &report.free_boundary.points[index];
    let mut s = String::new();
    for a in 0..report.free_boundary.dim {
        s.push_str(&format_g17(p.z.x[a]));
        s.push(',');
    }
    s.push_str(&format_g17(p.z.t));
    s
}

fn or_nan<T>(r: &std::result::Result<T, String>, f: impl Fn(&T) -> f64) -> String {
    format_g17(r.as_ref().map_or(f64::NAN, f))
}

/// One row per analysed point: growth exponent, fitted constants and the
/// interior second-derivative bound.
pub fn write_regularity_csv<W: Write>(report: &AnalysisReport, mut out: W) -> Result<()> {
    writeln!(
        out,
        "point,{},exponent,c_lower,c_upper,m_bound,note",
        coord_header(report.free_boundary.dim)
    )?;
    for p in &report.points {
        let note = match (&p.regularity, &p.m_bound) {
            (Err(e), _) | (_, Err(e)) => e.replace(',', ";"),
            _ => String::new(),
        };
        writeln!(
            out,
            "{},{},{},{},{},{},{}",
            p.index,
            coords(report, p.index),
            or_nan(&p.regularity, |r| r.fitted_exponent),
            or_nan(&p.regularity, |r| r.fitted_c_lower),
            or_nan(&p.regularity, |r| r.fitted_c_upper),
            or_nan(&p.m_bound, |m| *m),
            note
        )?;
    }
    Ok(())
}

/// One row per analysed point: label, Weiss ratio and blow-up fit.
pub fn write_classification_csv<W: Write>(report: &AnalysisReport, mut out: W) -> Result<()> {
    writeln!(
        out,
        "point,{},label,ratio,limit,extrapolation_residual,blowup,fit_residual,e_x,e_y,m,alt_trace_gap,note",
        coord_header(report.free_boundary.dim)
    )?;
    for p in &report.points {
        let note = match (&p.weiss, &p.fit) {
            (Err(e), _) | (_, Err(e)) => e.replace(',', ";"),
            _ => String::new(),
        };
        writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{},{},{},{}",
            p.index,
            coords(report, p.index),
            p.label.as_str(),
            or_nan(&p.weiss, |w| w.ratio),
            or_nan(&p.weiss, |w| w.extrapolated_limit),
            or_nan(&p.weiss, |w| w.extrapolation_residual),
            p.fit.as_ref().map_or("none", |f| f.kind.as_str()),
            or_nan(&p.fit, |f| f.fit_residual),
            or_nan(&p.fit, |f| f.e[0]),
            or_nan(&p.fit, |f| f.e[1]),
            or_nan(&p.fit, |f| f.m),
            or_nan(&p.fit, |f| f.alt_trace_gap),
            note
        )?;
    }
    Ok(())
}

/// Long format: one row per point and `τ`.
pub fn write_weiss_csv<W: Write>(report: &AnalysisReport, mut out: W) -> Result<()> {
    writeln!(out, "point,tau,w")?;
    for p in &report.points {
        if let Ok(w) = &p.weiss {
            for (tau, v) in w.tau_values.iter().zip(&w.w_values) {
                writeln!(out, "{},{},{}", p.index, format_g17(*tau), format_g17(*v))?;
            }
        }
    }
    Ok(())
}

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 480.0;
const MARGIN: f64 = 48.0;

struct Frame {
    x0: f64,
    x1: f64,
    y0: f64,
    y1: f64,
}

impl Frame {
    fn new(x0: f64, x1: f64, y0: f64, y1: f64) -> Self {
        let (y0, y1) = if y1 > y0 {
            (y0, y1)
        } else {
            (y0 - 0.5, y0 + 0.5)
        };
        Frame { x0, x1, y0, y1 }
    }

    fn px(&self, x: f64) -> f64 {
        MARGIN + (x - self.x0) / (self.x1 - self.x0) * (WIDTH - 2.0 * MARGIN)
    }

    fn py(&self, y: f64) -> f64 {
        HEIGHT - MARGIN - (y - self.y0) / (self.y1 - self.y0) * (HEIGHT - 2.0 * MARGIN)
    }
}

fn svg_open(s: &mut String, title: &str, frame: &Frame, xlabel: &str, ylabel: &str) {
    let _ = writeln!(
        s,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{WIDTH}\" height=\"{HEIGHT}\" viewBox=\"0 0 {WIDTH} {HEIGHT}\">"
    );
    let _ = writeln!(s, "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>");
    let _ = writeln!(
        s,
        "<rect x=\"{MARGIN}\" y=\"{MARGIN}\" width=\"{}\" height=\"{}\" fill=\"none\" stroke=\"black\"/>",
        WIDTH - 2.0 * MARGIN,
        HEIGHT - 2.0 * MARGIN
    );
    let _ = writeln!(
        s,
        "<text x=\"{}\" y=\"24\" text-anchor=\"middle\" font-size=\"14\">{title}</text>",
        WIDTH / 2.0
    );
    let _ = writeln!(
        s,
        "<text x=\"{}\" y=\"{}\" text-anchor=\"middle\" font-size=\"12\">{xlabel} [{:.3}, {:.3}]</text>",
        WIDTH / 2.0,
        HEIGHT - 12.0,
        frame.x0,
        frame.x1
    );
    let _ = writeln!(
        s,
        "<text x=\"14\" y=\"{}\" font-size=\"12\" transform=\"rotate(-90 14 {})\" text-anchor=\"middle\">{ylabel} [{:.3}, {:.3}]</text>",
        HEIGHT / 2.0,
        HEIGHT / 2.0,
        frame.y0,
        frame.y1
    );
}

fn label_colour(label: PointLabel) -> &'static str {
    match label {
        PointLabel::Regular => "#1f77b4",
        PointLabel::Singular => "#d62728",
        PointLabel::Unresolved => "#7f7f7f",
    }
}

/// Free boundary overlay. In 1D the interface is drawn in the `(x, t)`
/// plane; in 2D the points of every level are drawn in the `(x, y)` plane,
/// shaded by time. Singular clusters are ringed in red.
pub fn overlay_svg(u: &ScalarField, report: &AnalysisReport) -> String {
    let fb = &report.free_boundary;
    let g = u.grid();
    let tg = u.time_grid();
    let dim = g.dim();
    let frame = if dim == 1 {
        Frame::new(g.origin(0), g.origin(0) + g.extent(0), tg.t0(), tg.t_end())
    } else {
        Frame::new(
            g.origin(0),
            g.origin(0) + g.extent(0),
            g.origin(1),
            g.origin(1) + g.extent(1),
        )
    };
    let mut s = String::new();
    let (ylabel, title) = if dim == 1 {
        ("t", "free boundary in the (x, t) plane")
    } else {
        ("y", "free boundary by time level")
    };
    svg_open(&mut s, title, &frame, "x", ylabel);
    let span = tg.n_steps().max(1) as f64;
    for p in &fb.points {
        let (cx, cy) = if dim == 1 {
            (frame.px(p.z.x[0]), frame.py(p.z.t))
        } else {
            (frame.px(p.z.x[0]), frame.py(p.z.x[1]))
        };
        let colour = if p.label != PointLabel::Unresolved || dim == 1 {
            label_colour(p.label).to_string()
        } else {
            let shade = (200.0 * (1.0 - p.slice as f64 / span)) as u8;
            format!("rgb({shade},{shade},{shade})")
        };
        let _ = writeln!(
            s,
            "<circle cx=\"{cx:.2}\" cy=\"{cy:.2}\" r=\"1.5\" fill=\"{colour}\"/>"
        );
    }
    for sp in &report.singular.singular {
        let (cx, cy) = if dim == 1 {
            (frame.px(sp.z.x[0]), frame.py(sp.z.t))
        } else {
            (frame.px(sp.z.x[0]), frame.py(sp.z.x[1]))
        };
        let _ = writeln!(
            s,
            "<circle cx=\"{cx:.2}\" cy=\"{cy:.2}\" r=\"6\" fill=\"none\" stroke=\"#d62728\" stroke-width=\"2\"/>"
        );
    }
    s.push_str("</svg>\n");
    s
}

/// Solution plots: in 1D a few profiles `u(·, t_j)`, in 2D a shaded map of
/// the last level with its free boundary points.
pub fn profiles_svg(u: &ScalarField, fb: &FreeBoundarySet) -> String {
    let g = u.grid();
    let tg = u.time_grid();
    let mut s = String::new();
    if g.dim() == 1 {
        let frame = Frame::new(
            g.origin(0),
            g.origin(0) + g.extent(0),
            u.min().min(0.0),
            u.max(),
        );
        svg_open(&mut s, "profiles u(x, t)", &frame, "x", "u");
        let n = tg.n_steps();
        let picks: Vec<usize> = {
            let mut v: Vec<usize> = (0..=4).map(|k| k * n / 4).collect();
            v.dedup();
            v
        };
        for (k, &j) in picks.iter().enumerate() {
            let shade = 200 - (200 * k / picks.len().max(1)) as u32;
            let pts: Vec<String> = (0..g.node_count())
                .map(|i| format!("{:.2},{:.2}", frame.px(g.coord(0, i)), frame.py(u.at(i, j))))
                .collect();
            let _ = writeln!(
                s,
                "<polyline points=\"{}\" fill=\"none\" stroke=\"rgb({shade},{shade},255)\" stroke-width=\"1.5\"><title>t = {}</title></polyline>",
                pts.join(" "),
                format_g17(tg.time(j))
            );
        }
    } else {
        let frame = Frame::new(
            g.origin(0),
            g.origin(0) + g.extent(0),
            g.origin(1),
            g.origin(1) + g.extent(1),
        );
        svg_open(&mut s, "u at the last time level", &frame, "x", "y");
        let j = tg.n_steps();
        let slice = u.slice(j);
        let top = slice
            .iter()
            .cloned()
            .fold(0.0f64, f64::max)
            .max(f64::MIN_POSITIVE);
        let (hx, hy) = (g.h(0), g.h(1));
        for (node, &value) in slice.iter().enumerate() {
            let [x, y] = g.node_position(node);
            let level = (value / top).clamp(0.0, 1.0);
            let c = (255.0 * (1.0 - level)) as u8;
            let (x0, y1) = (frame.px(x - hx / 2.0), frame.py(y + hy / 2.0));
            let w = frame.px(x + hx / 2.0) - x0;
            let h = frame.py(y - hy / 2.0) - y1;
            let _ = writeln!(
                s,
                "<rect x=\"{x0:.2}\" y=\"{y1:.2}\" width=\"{w:.2}\" height=\"{h:.2}\" fill=\"rgb(255,{c},{c})\"/>"
            );
        }
        for p in fb.slice_points(j) {
            let _ = writeln!(
                s,
                "<circle cx=\"{:.2}\" cy=\"{:.2}\" r=\"1.2\" fill=\"black\"/>",
                frame.px(p.z.x[0]),
                frame.py(p.z.x[1])
            );
        }
    }
    s.push_str("</svg>\n");
    s
}
