//! Minimal two-panel SVG line chart of power and expected sample size.

use std::fmt::Write;

use crate::performance::PerformanceCurve;

const WIDTH: f64 = 720.0;
const PANEL_HEIGHT: f64 = 260.0;
const MARGIN: f64 = 56.0;

pub fn render_svg(curve: &PerformanceCurve, title: &str) -> String {
    let height = 2.0 * PANEL_HEIGHT + 3.0 * MARGIN;
    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{height}" viewBox="0 0 {WIDTH} {height}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(svg, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(
        svg,
        r#"<text x="{}" y="24" text-anchor="middle" font-size="14">{}</text>"#,
        WIDTH / 2.0,
        escape(title)
    );
    panel(&mut svg, curve, &curve.power, "P(reject H0)", MARGIN, Some((0.0, 1.0)));
    panel(&mut svg, curve, &curve.ess, "E(N)", 2.0 * MARGIN + PANEL_HEIGHT, None);
    svg.push_str("</svg>\n");
    svg
}

fn panel(svg: &mut String, curve: &PerformanceCurve, values: &[f64], label: &str, top: f64, range: Option<(f64, f64)>) {
    let left = MARGIN;
    let right = WIDTH - MARGIN / 2.0;
    let bottom = top + PANEL_HEIGHT;
    let (x0, x1) = (curve.tau[0], *curve.tau.last().unwrap());
    let (mut y0, mut y1) = range.unwrap_or_else(|| {
        let lo = values.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        (lo, hi)
    });
    if y1 - y0 < 1e-12 {
        y0 -= 0.5;
        y1 += 0.5;
    }
    let sx = |x: f64| left + (x - x0) / (x1 - x0) * (right - left);
    let sy = |y: f64| bottom - (y - y0) / (y1 - y0) * (bottom - top);

    let _ = writeln!(
        svg,
        r#"<rect x="{left}" y="{top}" width="{}" height="{PANEL_HEIGHT}" fill="none" stroke="black"/>"#,
        right - left
    );
    let points: Vec<String> = curve
        .tau
        .iter()
        .zip(values)
        .map(|(&x, &y)| format!("{:.2},{:.2}", sx(x), sy(y)))
        .collect();
    let _ = writeln!(
        svg,
        r#"<polyline fill="none" stroke="steelblue" stroke-width="2" points="{}"/>"#,
        points.join(" ")
    );
    for (y, anchor) in [(y0, bottom), (y1, top)] {
        let _ = writeln!(
            svg,
            r#"<text x="{}" y="{}" text-anchor="end">{}</text>"#,
            left - 4.0,
            anchor + 4.0,
            tick(y)
        );
    }
    for (x, pos) in [(x0, left), (x1, right)] {
        let _ = writeln!(
            svg,
            r#"<text x="{pos}" y="{}" text-anchor="middle">{}</text>"#,
            bottom + 16.0,
            tick(x)
        );
    }
    let _ = writeln!(
        svg,
        r#"<text x="{}" y="{}" text-anchor="middle">tau</text>"#,
        (left + right) / 2.0,
        bottom + 16.0
    );
    let _ = writeln!(svg, r#"<text x="{}" y="{}">{}</text>"#, left + 6.0, top + 16.0, escape(label));
}

fn tick(v: f64) -> String {
    if v.abs() >= 100.0 {
        format!("{v:.0}")
    } else {
        format!("{v:.3}")
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn renders_both_panels() {
        let c = PerformanceCurve {
            tau: vec![-0.2, 0.0, 0.2],
            power: vec![0.8, 0.05, 0.8],
            ess: vec![900.0, 1000.0, 900.0],
        };
        let svg = render_svg(&c, "a < b");
        assert!(svg.starts_with("<svg"));
        assert_eq!(svg.matches("<polyline").count(), 2);
        assert!(svg.contains("a &lt; b"));
    }
}
