//! SVG rendering of piecewise-linear braid diagrams.

use braidforce::braid::DiscretizedBraid;
use braidforce::{rat_to_f64, Rat};

fn approx(v: &Rat) -> f64 {
    rat_to_f64(v)
}

/// Render a braid as an SVG strip diagram: black skeletal strands, red free
/// strands, anchor dots, slice markers, and crossing gaps with the
/// larger-slope strand on top.
pub fn render_svg(braid: &DiscretizedBraid, n_red: usize) -> String {
    let _m = braid.strand_count();
    let d = braid.period();
    let width = 760.0;
    let height = 420.0;
    let margin = 40.0;
    let xs = |j: usize| margin + (width - 2.0 * margin) * j as f64 / d.max(1) as f64;

    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for s in braid.strands() {
        for v in s {
            let v = approx(v);
            lo = lo.min(v);
            hi = hi.max(v);
        }
    }
    if !lo.is_finite() || lo == hi {
        lo -= 1.0;
        hi += 1.0;
    }
    let pad = 0.08 * (hi - lo);
    let (lo, hi) = (lo - pad, hi + pad);
    let ys = |v: f64| height - margin - (height - 2.0 * margin) * (v - lo) / (hi - lo);

    let color = |s: usize| if s < n_red { "#c21807" } else { "#222222" };

    let mut svg = String::new();
    svg.push_str(&format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{width}\" height=\"{height}\" \
         viewBox=\"0 0 {width} {height}\">\n"
    ));
    svg.push_str("<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n");
    for j in 0..=d {
        svg.push_str(&format!(
            "<line x1=\"{0:.1}\" y1=\"{1:.1}\" x2=\"{0:.1}\" y2=\"{2:.1}\" \
             stroke=\"#bbbbbb\" stroke-width=\"1\" stroke-dasharray=\"4 4\"/>\n",
            xs(j),
            margin * 0.5,
            height - margin * 0.5
        ));
    }

    // Strand polylines.
    for (s, strand) in braid.strands().iter().enumerate() {
        let pts: Vec<String> = strand
            .iter()
            .enumerate()
            .map(|(j, v)| format!("{:.2},{:.2}", xs(j), ys(approx(v))))
            .collect();
        svg.push_str(&format!(
            "<polyline points=\"{}\" fill=\"none\" stroke=\"{}\" stroke-width=\"2.5\"/>\n",
            pts.join(" "),
            color(s)
        ));
    }

    // Crossings: re-draw the over strand (larger slope) with a casing gap.
    for c in braid.diagram().crossings {
        let (a, b) = c.strands;
        let t = approx(&c.t);
        let j = ((t * d as f64).floor() as usize).min(d.saturating_sub(1));
        let slope = |s: usize| {
            approx(&braid.strands()[s][j + 1]) - approx(&braid.strands()[s][j])
        };
        let over = if slope(a) >= slope(b) { a } else { b };
        let cx = margin + (width - 2.0 * margin) * t;
        let cy = ys(approx(&c.height));
        let frac = t * d as f64 - j as f64;
        let dx = (xs(j + 1) - xs(j)) * 0.06;
        let dy = (ys(approx(&braid.strands()[over][j + 1])) - ys(approx(&braid.strands()[over][j])))
            * 0.06
            / (1.0f64).max(frac.max(1.0 - frac) / 0.5);
        svg.push_str(&format!(
            "<line x1=\"{:.2}\" y1=\"{:.2}\" x2=\"{:.2}\" y2=\"{:.2}\" stroke=\"white\" \
             stroke-width=\"7\"/>\n",
            cx - dx,
            cy - dy,
            cx + dx,
            cy + dy
        ));
        svg.push_str(&format!(
            "<line x1=\"{:.2}\" y1=\"{:.2}\" x2=\"{:.2}\" y2=\"{:.2}\" stroke=\"{}\" \
             stroke-width=\"2.5\"/>\n",
            cx - dx,
            cy - dy,
            cx + dx,
            cy + dy,
            color(over)
        ));
    }

    // Anchor dots.
    for (s, strand) in braid.strands().iter().enumerate() {
        for (j, v) in strand.iter().enumerate() {
            svg.push_str(&format!(
                "<circle cx=\"{:.2}\" cy=\"{:.2}\" r=\"3\" fill=\"{}\"/>\n",
                xs(j),
                ys(approx(v)),
                color(s)
            ));
        }
    }
    svg.push_str("</svg>\n");
    svg
}
