//! Minimal static SVG line plots.

use std::fmt::Write as _;

pub struct Series<'a> {
    pub label: &'a str,
    pub color: &'a str,
    pub points: &'a [(f64, f64)],
}

const W: f64 = 800.0;
const H: f64 = 480.0;
const PAD: f64 = 50.0;

pub fn line_plot(title: &str, x_label: &str, series: &[Series]) -> String {
    let all = series.iter().flat_map(|s| s.points.iter()).filter(|p| p.0.is_finite() && p.1.is_finite());
    let (mut x0, mut x1, mut y0, mut y1) = (f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY);
    for &(x, y) in all {
        x0 = x0.min(x);
        x1 = x1.max(x);
        y0 = y0.min(y);
        y1 = y1.max(y);
    }
    if !(x0 < x1) {
        x1 = x0 + 1.0;
    }
    if !(y0 < y1) {
        y0 -= 0.5;
        y1 += 0.5;
    }
    let sx = |x: f64| PAD + (x - x0) / (x1 - x0) * (W - 2.0 * PAD);
    let sy = |y: f64| H - PAD - (y - y0) / (y1 - y0) * (H - 2.0 * PAD);

    let mut svg = String::new();
    writeln!(svg, r#"<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" viewBox="0 0 {W} {H}">"#).unwrap();
    writeln!(svg, r#"<rect width="{W}" height="{H}" fill="white"/>"#).unwrap();
    writeln!(
        svg,
        r#"<rect x="{PAD}" y="{PAD}" width="{}" height="{}" fill="none" stroke="black"/>"#,
        W - 2.0 * PAD,
        H - 2.0 * PAD
    )
    .unwrap();
    writeln!(svg, r#"<text x="{}" y="30" text-anchor="middle" font-size="16">{}</text>"#, W / 2.0, escape(title)).unwrap();
    writeln!(svg, r#"<text x="{}" y="{}" text-anchor="middle" font-size="12">{}</text>"#, W / 2.0, H - 15.0, escape(x_label))
        .unwrap();
    for (v, anchor, x, y) in [
        (x0, "start", PAD, H - PAD + 15.0),
        (x1, "end", W - PAD, H - PAD + 15.0),
        (y0, "end", PAD - 5.0, H - PAD),
        (y1, "end", PAD - 5.0, PAD + 10.0),
    ] {
        writeln!(svg, r#"<text x="{x}" y="{y}" text-anchor="{anchor}" font-size="11">{v:.4}</text>"#).unwrap();
    }
    for (i, s) in series.iter().enumerate() {
        let pts: Vec<String> = s
            .points
            .iter()
            .filter(|p| p.0.is_finite() && p.1.is_finite())
            .map(|&(x, y)| format!("{:.2},{:.2}", sx(x), sy(y)))
            .collect();
        writeln!(svg, r#"<polyline fill="none" stroke="{}" stroke-width="1" points="{}"/>"#, s.color, pts.join(" "))
            .unwrap();
        let ly = PAD + 15.0 + 15.0 * i as f64;
        writeln!(svg, r#"<text x="{}" y="{ly}" font-size="12" fill="{}">{}</text>"#, W - PAD - 120.0, s.color, escape(s.label))
            .unwrap();
    }
    svg.push_str("</svg>\n");
    svg
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn renders_polylines() {
        let pts = [(0.0, 1.0), (0.5, -1.0), (1.0, 1.0)];
        let svg = line_plot("F <test>", "x", &[Series { label: "Re F", color: "black", points: &pts }]);
        assert!(svg.starts_with("<svg") && svg.trim_end().ends_with("</svg>"));
        assert!(svg.contains("F &lt;test&gt;"));
        assert_eq!(svg.matches("<polyline").count(), 1);
    }
}
