//! Static SVG renderings of diagrams and Betti curves.

use std::fmt::Write as _;

use cechtda_core::persistence::{BettiCurve, PersistenceDiagram};

const W: f64 = 420.0;
const H: f64 = 420.0;
const M: f64 = 40.0;
const COLORS: [&str; 4] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd"];

fn open(title: &str) -> String {
    format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{W}\" height=\"{H}\" viewBox=\"0 0 {W} {H}\">\n\
         <rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n\
         <text x=\"{}\" y=\"20\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\">{}</text>\n\
         <line x1=\"{M}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"black\"/>\n\
         <line x1=\"{M}\" y1=\"{}\" x2=\"{M}\" y2=\"{M}\" stroke=\"black\"/>\n",
        W / 2.0,
        escape(title),
        H - M,
        W - M,
        H - M,
        H - M
    )
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

fn legend(svg: &mut String, dims: impl Iterator<Item = usize>) {
    for (row, k) in dims.enumerate() {
        let y = M + 14.0 * row as f64;
        let _ = writeln!(
            svg,
            "<text x=\"{}\" y=\"{y}\" font-family=\"sans-serif\" font-size=\"11\" fill=\"{}\">H{k}</text>",
            W - M - 20.0,
            COLORS[k % COLORS.len()]
        );
    }
}

/// Birth–death scatter with the diagonal; essential classes sit on a dashed
/// line above the plot range.
pub fn diagram_svg(d: &PersistenceDiagram, title: &str) -> String {
    let finite_max = d.iter().flat_map(|(_, p)| [p.birth, p.death]).filter(|v| v.is_finite()).fold(d.epsilon_max, f64::max);
    let top = if finite_max > 0.0 { finite_max * 1.08 } else { 1.0 };
    let span = W - 2.0 * M;
    let sx = |v: f64| M + span * v / top;
    let sy = |v: f64| H - M - span * v / top;
    let mut svg = open(title);
    let _ = writeln!(svg, "<line x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"#999\"/>", sx(0.0), sy(0.0), sx(top), sy(top));
    let inf_y = sy(top) + 4.0;
    let _ = writeln!(svg, "<line x1=\"{M}\" y1=\"{inf_y}\" x2=\"{}\" y2=\"{inf_y}\" stroke=\"#999\" stroke-dasharray=\"4 3\"/>", W - M);
    for (k, p) in d.iter() {
        let y = if p.is_infinite() { inf_y } else { sy(p.death) };
        let _ = writeln!(svg, "<circle cx=\"{:.3}\" cy=\"{:.3}\" r=\"3\" fill=\"{}\" fill-opacity=\"0.7\"/>", sx(p.birth), y, COLORS[k % COLORS.len()]);
    }
    legend(&mut svg, 0..d.pairs.len());
    svg.push_str("</svg>\n");
    svg
}

/// Step plot of β_k(ε) for each curve.
pub fn betti_svg(curves: &[BettiCurve], title: &str) -> String {
    let x_max = curves.iter().flat_map(|c| c.grid.last().copied()).fold(0.0, f64::max).max(f64::MIN_POSITIVE);
    let y_max = curves.iter().flat_map(|c| c.values.iter().copied()).max().unwrap_or(0).max(1) as f64;
    let sx = |v: f64| M + (W - 2.0 * M) * v / x_max;
    let sy = |v: f64| H - M - (H - 2.0 * M) * v / (y_max * 1.05);
    let mut svg = open(title);
    for c in curves {
        let mut pts = String::new();
        for (i, (&e, &b)) in c.grid.iter().zip(&c.values).enumerate() {
            if i > 0 {
                let _ = write!(pts, "{:.3},{:.3} ", sx(e), sy(c.values[i - 1] as f64));
            }
            let _ = write!(pts, "{:.3},{:.3} ", sx(e), sy(b as f64));
        }
        let _ = writeln!(svg, "<polyline points=\"{}\" fill=\"none\" stroke=\"{}\" stroke-width=\"1.5\"/>", pts.trim_end(), COLORS[c.dim % COLORS.len()]);
    }
    legend(&mut svg, curves.iter().map(|c| c.dim));
    svg.push_str("</svg>\n");
    svg
}
