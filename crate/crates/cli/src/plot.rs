//! Bland-Altman scatter plots as standalone SVG.

use std::fmt::Write;

use periometry::stats::AgreementReport;

const WIDTH: f64 = 480.0;
const HEIGHT: f64 = 360.0;
const MARGIN_L: f64 = 64.0;
const MARGIN_R: f64 = 96.0;
const MARGIN_T: f64 = 36.0;
const MARGIN_B: f64 = 52.0;

fn extent(vals: impl Iterator<Item = f64>) -> (f64, f64) {
    let (lo, hi) = vals.fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| {
        (lo.min(v), hi.max(v))
    });
    if !lo.is_finite() {
        return (-1.0, 1.0);
    }
    let pad = ((hi - lo) * 0.08).max(1e-6);
    (lo - pad, hi + pad)
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
}

/// Differences against pair means, with the mean difference and both
/// limits of agreement drawn as dashed lines.
pub fn bland_altman_svg(title: &str, units: &str, r: &AgreementReport) -> String {
    let (x0, x1) = extent(r.points.iter().map(|p| p.0));
    let (y0, y1) = extent(
        r.points
            .iter()
            .map(|p| p.1)
            .chain([r.loa_low, r.loa_high, r.mean_diff]),
    );
    let pw = WIDTH - MARGIN_L - MARGIN_R;
    let ph = HEIGHT - MARGIN_T - MARGIN_B;
    let sx = |x: f64| MARGIN_L + (x - x0) / (x1 - x0) * pw;
    let sy = |y: f64| MARGIN_T + (y1 - y) / (y1 - y0) * ph;

    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="11">"#
    );
    let _ = writeln!(s, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(
        s,
        r#"<text x="{:.1}" y="20" text-anchor="middle" font-size="13">{}</text>"#,
        WIDTH / 2.0,
        escape(title)
    );
    let _ = writeln!(
        s,
        r##"<rect x="{MARGIN_L}" y="{MARGIN_T}" width="{pw}" height="{ph}" fill="none" stroke="#444"/>"##
    );
    for k in 0..=4 {
        let f = k as f64 / 4.0;
        let (vx, vy) = (x0 + f * (x1 - x0), y0 + f * (y1 - y0));
        let _ = writeln!(
            s,
            r#"<text x="{:.1}" y="{:.1}" text-anchor="middle">{:.2}</text>"#,
            sx(vx),
            MARGIN_T + ph + 16.0,
            vx
        );
        let _ = writeln!(
            s,
            r#"<text x="{:.1}" y="{:.1}" text-anchor="end">{:.2}</text>"#,
            MARGIN_L - 6.0,
            sy(vy) + 4.0,
            vy
        );
    }
    let _ = writeln!(
        s,
        r#"<text x="{:.1}" y="{:.1}" text-anchor="middle">mean of methods ({units})</text>"#,
        MARGIN_L + pw / 2.0,
        HEIGHT - 12.0
    );
    let _ = writeln!(
        s,
        r#"<text x="16" y="{:.1}" text-anchor="middle" transform="rotate(-90 16 {:.1})">predicted − reference ({units})</text>"#,
        MARGIN_T + ph / 2.0,
        MARGIN_T + ph / 2.0
    );
    for (y, label, colour) in [
        (r.loa_high, "+1.96 SD", "#c0392b"),
        (r.mean_diff, "mean", "#2c3e50"),
        (r.loa_low, "−1.96 SD", "#c0392b"),
    ] {
        let _ = writeln!(
            s,
            r#"<line x1="{MARGIN_L}" y1="{0:.2}" x2="{1:.2}" y2="{0:.2}" stroke="{colour}" stroke-dasharray="6 4"/>"#,
            sy(y),
            MARGIN_L + pw
        );
        let _ = writeln!(
            s,
            r#"<text x="{:.1}" y="{:.1}" fill="{colour}">{label} {:.3}</text>"#,
            MARGIN_L + pw + 4.0,
            sy(y) + 4.0,
            y
        );
    }
    for &(m, d) in &r.points {
        let _ = writeln!(
            s,
            r##"<circle cx="{:.2}" cy="{:.2}" r="2.5" fill="#2980b9" fill-opacity="0.6"/>"##,
            sx(m),
            sy(d)
        );
    }
    s.push_str("</svg>\n");
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn draws_every_point_and_three_lines() {
        let r = AgreementReport {
            mean_diff: 0.5,
            sd_diff: 1.0,
            loa_low: -1.46,
            loa_high: 2.46,
            pct_outside: 0.0,
            n: 3,
            points: vec![(1.0, 0.0), (2.0, 1.0), (3.0, 0.5)],
        };
        let svg = bland_altman_svg("mrd1 <px>", "px", &r);
        assert!(svg.starts_with("<svg"));
        assert_eq!(svg.matches("<circle").count(), 3);
        assert_eq!(svg.matches("stroke-dasharray").count(), 3);
        assert!(svg.contains("mrd1 &lt;px&gt;"));
    }
}
