//! Minimal SVG line plot of an HF₁ estimate with the bound in a log inset.

use std::fmt::Write;

const W: f64 = 640.0;
const H: f64 = 400.0;
const PAD: f64 = 50.0;

fn polyline(points: &[(f64, f64)], x0: f64, y0: f64, w: f64, h: f64, color: &str) -> String {
    let (xmin, xmax) = points.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |a, p| (a.0.min(p.0), a.1.max(p.0)));
    let (ymin, ymax) = points.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |a, p| (a.0.min(p.1), a.1.max(p.1)));
    let sx = if xmax > xmin { w / (xmax - xmin) } else { 0.0 };
    let sy = if ymax > ymin { h / (ymax - ymin) } else { 0.0 };
    let pts: Vec<String> = points
        .iter()
        .map(|(x, y)| format!("{:.2},{:.2}", x0 + (x - xmin) * sx, y0 + h - (y - ymin) * sy))
        .collect();
    format!("<polyline fill=\"none\" stroke=\"{color}\" stroke-width=\"2\" points=\"{}\"/>\n", pts.join(" "))
}

/// `curve` holds `(l, estimate)`; `bound_log2` holds `(l, log₂(f₁l+f₂))`.
pub fn hf1_svg(curve: &[(f64, f64)], bound_log2: &[(f64, f64)], seed: u64) -> String {
    let mut s = String::new();
    writeln!(s, "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{W}\" height=\"{H}\" viewBox=\"0 0 {W} {H}\">").unwrap();
    writeln!(s, "<rect width=\"{W}\" height=\"{H}\" fill=\"white\"/>").unwrap();
    let (pw, ph) = (W - 2.0 * PAD, H - 2.0 * PAD);
    writeln!(s, "<rect x=\"{PAD}\" y=\"{PAD}\" width=\"{pw}\" height=\"{ph}\" fill=\"none\" stroke=\"black\"/>").unwrap();
    if !curve.is_empty() {
        s += &polyline(curve, PAD, PAD, pw, ph, "steelblue");
        let lmax = curve.iter().map(|p| p.0).fold(0.0, f64::max);
        let emax = curve.iter().map(|p| p.1).fold(0.0, f64::max);
        writeln!(s, "<text x=\"{PAD}\" y=\"{}\" font-size=\"12\">l from {:.3} to {lmax:.3}; estimate up to {emax:.4}</text>", H - 15.0, curve[0].0).unwrap();
    }
    // inset: log₂ of the bound line
    let (ix, iy, iw, ih) = (W - PAD - 180.0, PAD + 10.0, 170.0, 100.0);
    writeln!(s, "<rect x=\"{ix}\" y=\"{iy}\" width=\"{iw}\" height=\"{ih}\" fill=\"#f8f8f8\" stroke=\"gray\"/>").unwrap();
    if !bound_log2.is_empty() {
        s += &polyline(bound_log2, ix + 5.0, iy + 15.0, iw - 10.0, ih - 25.0, "firebrick");
        let lo = bound_log2.iter().map(|p| p.1).fold(f64::INFINITY, f64::min);
        let hi = bound_log2.iter().map(|p| p.1).fold(f64::NEG_INFINITY, f64::max);
        writeln!(s, "<text x=\"{}\" y=\"{}\" font-size=\"10\">log2(f1 l + f2): {lo:.4e} to {hi:.4e}</text>", ix + 4.0, iy + 11.0).unwrap();
    }
    writeln!(s, "<text x=\"{PAD}\" y=\"30\" font-size=\"14\">HF1 estimate (seed {seed})</text>").unwrap();
    s += "</svg>\n";
    s
}
