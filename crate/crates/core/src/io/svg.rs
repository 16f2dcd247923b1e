//! Minimal line plots of CSV channels as standalone SVG.

use std::fmt::Write;

use crate::observables::{Channel, TimeSeries};

const WIDTH: f64 = 800.0;
const PANEL_HEIGHT: f64 = 260.0;
const MARGIN_LEFT: f64 = 90.0;
const MARGIN_RIGHT: f64 = 20.0;
const MARGIN_TOP: f64 = 30.0;
const MARGIN_BOTTOM: f64 = 50.0;
const TICKS: usize = 5;

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

fn range(v: impl Iterator<Item = f64>) -> (f64, f64) {
    let (lo, hi) = v
        .filter(|x| x.is_finite())
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), x| (lo.min(x), hi.max(x)));
    if !lo.is_finite() {
        (0.0, 1.0)
    } else if hi - lo <= f64::EPSILON * lo.abs().max(1.0) {
        (lo - 0.5, hi + 0.5)
    } else {
        (lo, hi)
    }
}

fn tick_label(v: f64) -> String {
    if v != 0.0 && (v.abs() >= 1e4 || v.abs() < 1e-2) {
        format!("{v:.2e}")
    } else {
        format!("{v:.3}")
    }
}

/// One panel per channel, stacked vertically, sharing the time axis.
pub fn render_svg(series: &TimeSeries, channels: &[Channel], time_label: &str, title: &str) -> String {
    let height = PANEL_HEIGHT * channels.len().max(1) as f64;
    let mut out = String::new();
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{height}" viewBox="0 0 {WIDTH} {height}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(out, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let (t0, t1) = range(series.t.iter().copied());
    let plot_w = WIDTH - MARGIN_LEFT - MARGIN_RIGHT;
    let plot_h = PANEL_HEIGHT - MARGIN_TOP - MARGIN_BOTTOM;
    for (panel, &ch) in channels.iter().enumerate() {
        let y_off = panel as f64 * PANEL_HEIGHT + MARGIN_TOP;
        let ys = series.channel(ch);
        let (lo, hi) = range(ys.iter().copied());
        let px = |t: f64| MARGIN_LEFT + (t - t0) / (t1 - t0) * plot_w;
        let py = |y: f64| y_off + plot_h - (y - lo) / (hi - lo) * plot_h;

        if panel == 0 && !title.is_empty() {
            let _ = writeln!(
                out,
                r#"<text x="{}" y="{}" text-anchor="middle" font-size="14">{}</text>"#,
                WIDTH / 2.0,
                MARGIN_TOP - 10.0,
                escape(title)
            );
        }
        let _ = writeln!(
            out,
            r#"<rect x="{MARGIN_LEFT}" y="{y_off}" width="{plot_w}" height="{plot_h}" fill="none" stroke="black"/>"#
        );
        for k in 0..=TICKS {
            let f = k as f64 / TICKS as f64;
            let (tv, yv) = (t0 + f * (t1 - t0), lo + f * (hi - lo));
            let (x, y) = (px(tv), py(yv));
            let _ = writeln!(
                out,
                r#"<line x1="{x:.2}" y1="{:.2}" x2="{x:.2}" y2="{:.2}" stroke="black"/><text x="{x:.2}" y="{:.2}" text-anchor="middle">{}</text>"#,
                y_off + plot_h,
                y_off + plot_h + 5.0,
                y_off + plot_h + 18.0,
                tick_label(tv)
            );
            let _ = writeln!(
                out,
                r#"<line x1="{:.2}" y1="{y:.2}" x2="{MARGIN_LEFT}" y2="{y:.2}" stroke="black"/><text x="{:.2}" y="{:.2}" text-anchor="end">{}</text>"#,
                MARGIN_LEFT - 5.0,
                MARGIN_LEFT - 8.0,
                y + 4.0,
                tick_label(yv)
            );
        }
        let _ = writeln!(
            out,
            r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">{}</text>"#,
            MARGIN_LEFT + plot_w / 2.0,
            y_off + plot_h + 38.0,
            escape(time_label)
        );
        let (lx, ly) = (18.0, y_off + plot_h / 2.0);
        let _ = writeln!(
            out,
            r#"<text x="{lx}" y="{ly:.2}" text-anchor="middle" transform="rotate(-90 {lx} {ly:.2})">{}</text>"#,
            escape(ch.axis_label())
        );
        // Non-finite samples split the curve.
        let mut segment: Vec<String> = Vec::new();
        let flush = |segment: &mut Vec<String>, out: &mut String| {
            if segment.len() > 1 {
                let _ = writeln!(
                    out,
                    r#"<polyline fill="none" stroke="steelblue" stroke-width="1.2" points="{}"/>"#,
                    segment.join(" ")
                );
            }
            segment.clear();
        };
        for (t, y) in series.t.iter().zip(ys) {
            if y.is_finite() {
                segment.push(format!("{:.2},{:.2}", px(*t), py(*y)));
            } else {
                flush(&mut segment, &mut out);
            }
        }
        flush(&mut segment, &mut out);
    }
    out.push_str("</svg>\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::MeanFieldState;
    use crate::observables::Estimator;
    use crate::params::Backend;

    #[test]
    fn renders_labelled_polylines() {
        let mut s = TimeSeries::with_capacity(0, Backend::MeanField, Estimator::MeanFieldIntensity);
        for k in 0..50 {
            let t = k as f64 * 0.1;
            s.push(t, &MeanFieldState::default(), t.sin(), if k == 20 { f64::NAN } else { t }, 0.0);
        }
        let svg = render_svg(&s, &[Channel::A, Channel::B], "γt", "demo <1>");
        assert!(svg.starts_with("<svg"));
        assert!(svg.contains("A(t)") && svg.contains("B(t)") && svg.contains("γt"));
        assert!(svg.contains("demo &lt;1&gt;"));
        assert_eq!(svg.matches("<polyline").count(), 3);
    }
}
