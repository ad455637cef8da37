use std::fmt::Write as _;

use crate::dataset::DerivedPanel;
use crate::regress::{fitted_value_ci, CONSTANT};
use crate::scalar::{mean, Real};
use crate::threshold::{columns, ThresholdFit};

use super::AnalysisError;

pub const FIGURE_WIDTH: f64 = 720.0;
pub const FIGURE_HEIGHT: f64 = 480.0;
const MARGIN_LEFT: f64 = 80.0;
const MARGIN_RIGHT: f64 = 24.0;
const MARGIN_TOP: f64 = 36.0;
const MARGIN_BOTTOM: f64 = 64.0;
/// Points traced along each regime line.
const LINE_POINTS: usize = 48;
const TICKS: usize = 5;

const LOW_COLOUR: &str = "#1f5fa8";
const HIGH_COLOUR: &str = "#b2322a";
const RULE_COLOUR: &str = "green";
const POINT_COLOUR: &str = "#444444";

/// Data-to-pixel mapping of the plot area.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FigureFrame {
    pub x_min: f64,
    pub x_max: f64,
    pub y_min: f64,
    pub y_max: f64,
}

impl FigureFrame {
    fn padded(lo: f64, hi: f64) -> (f64, f64) {
        let span = hi - lo;
        let pad = if span > 0.0 { span * 0.05 } else { lo.abs().max(1.0) * 0.05 };
        (lo - pad, hi + pad)
    }

    /// Frame covering `xs` and `ys` with 5% padding on every side.
    pub fn covering(xs: impl IntoIterator<Item = f64>, ys: impl IntoIterator<Item = f64>) -> Self {
        let (xl, xh) = bounds(xs);
        let (yl, yh) = bounds(ys);
        let (x_min, x_max) = Self::padded(xl, xh);
        let (y_min, y_max) = Self::padded(yl, yh);
        FigureFrame { x_min, x_max, y_min, y_max }
    }

    pub fn x_pixel(&self, x: f64) -> f64 {
        let w = FIGURE_WIDTH - MARGIN_LEFT - MARGIN_RIGHT;
        MARGIN_LEFT + (x - self.x_min) / (self.x_max - self.x_min) * w
    }

    pub fn y_pixel(&self, y: f64) -> f64 {
        let h = FIGURE_HEIGHT - MARGIN_TOP - MARGIN_BOTTOM;
        MARGIN_TOP + (self.y_max - y) / (self.y_max - self.y_min) * h
    }

    fn bottom(&self) -> f64 {
        FIGURE_HEIGHT - MARGIN_BOTTOM
    }
}

fn bounds(values: impl IntoIterator<Item = f64>) -> (f64, f64) {
    values
        .into_iter()
        .filter(|v| v.is_finite())
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| (lo.min(v), hi.max(v)))
}

struct Trace {
    x: Vec<f64>,
    fit: Vec<f64>,
    lower: Vec<f64>,
    upper: Vec<f64>,
}

/// Regressor row for share `s` in the given regime, controls at their means.
fn design_row<F: Real>(names: &[String], s: F, high: bool, trend: F, residual: F) -> Vec<F> {
    names
        .iter()
        .map(|n| match n.as_str() {
            CONSTANT => F::one(),
            columns::INTERCEPT_SHIFT if high => F::one(),
            columns::SHARE_LOW if !high => s,
            columns::SHARE_HIGH if high => s,
            columns::TREND => trend,
            columns::RESIDUAL => residual,
            _ => F::zero(),
        })
        .collect()
}

fn trace<F: Real>(fit: &ThresholdFit<F>, from: F, to: F, high: bool, trend: F, residual: F) -> Result<Trace, AnalysisError> {
    let mut t = Trace { x: vec![], fit: vec![], lower: vec![], upper: vec![] };
    for i in 0..LINE_POINTS {
        let s = from + (to - from) * F::from_count(i) / F::from_count(LINE_POINTS - 1);
        let row = design_row(&fit.fit.names, s, high, trend, residual);
        let centre = fit.fit.predict(&row)?;
        let (lo, hi) = fitted_value_ci(&fit.fit, &row, F::lit(0.95))?;
        t.x.push(s.as_f64());
        t.fit.push(centre.as_f64());
        t.lower.push(lo.as_f64());
        t.upper.push(hi.as_f64());
    }
    Ok(t)
}

fn path_data(frame: &FigureFrame, xs: &[f64], ys: &[f64]) -> String {
    let mut d = String::new();
    for (i, (x, y)) in xs.iter().zip(ys).enumerate() {
        let cmd = if i == 0 { 'M' } else { 'L' };
        let _ = write!(d, "{}{:.2},{:.2} ", cmd, frame.x_pixel(*x), frame.y_pixel(*y));
    }
    d.trim_end().to_string()
}

fn band_points(frame: &FigureFrame, t: &Trace) -> String {
    let upper = t.x.iter().zip(&t.upper);
    let lower = t.x.iter().zip(&t.lower).rev();
    upper
        .chain(lower)
        .map(|(x, y)| format!("{:.2},{:.2}", frame.x_pixel(*x), frame.y_pixel(*y)))
        .collect::<Vec<_>>()
        .join(" ")
}

fn tick_label(v: f64, step: f64) -> String {
    let decimals = (-step.log10().floor()).max(0.0) as usize + 1;
    let s = format!("{v:.decimals$}");
    if s.trim_start_matches('-').chars().all(|c| c == '0' || c == '.') {
        format!("{:.decimals$}", 0.0)
    } else {
        s
    }
}

fn layout<F: Real>(fit: &ThresholdFit<F>, panel: &DerivedPanel<F>) -> Result<(FigureFrame, Trace, Trace), AnalysisError> {
    let shares = &panel.market_share;
    let trend = mean(&panel.time_trend);
    let residual = mean(&panel.tbill_change_residual);
    let s_min = shares.iter().copied().fold(F::infinity(), F::min);
    let s_max = shares.iter().copied().fold(F::neg_infinity(), F::max);
    let tau = fit.tau;
    let low = trace(fit, s_min, tau.min(s_max), false, trend, residual)?;
    let high = trace(fit, tau.max(s_min), s_max, true, trend, residual)?;

    let bands = [&low.lower, &low.upper, &high.lower, &high.upper];
    let frame = FigureFrame::covering(
        shares.iter().map(|s| s.as_f64()).chain([tau.as_f64()]),
        panel
            .column(fit.response)
            .iter()
            .map(|y| y.as_f64())
            .chain(bands.iter().flat_map(|b| b.iter().copied())),
    );
    Ok((frame, low, high))
}

/// Frame used by [`render_regime_figure`] for this fit and panel.
pub fn regime_figure_frame<F: Real>(fit: &ThresholdFit<F>, panel: &DerivedPanel<F>) -> Result<FigureFrame, AnalysisError> {
    layout(fit, panel).map(|(frame, _, _)| frame)
}

/// Scatter of the response against market share with the two fitted regime
/// lines, their 95% pointwise bands, and a dashed rule at the threshold.
///
/// Lines are evaluated with the time trend and issuance residual at their
/// sample means. Element classes: `observation` (circles), `fit-line`
/// (paths), `ci-band` (polygons), `threshold-rule` (one line).
pub fn render_regime_figure<F: Real>(fit: &ThresholdFit<F>, panel: &DerivedPanel<F>) -> Result<String, AnalysisError> {
    let (frame, low, high) = layout(fit, panel)?;
    let tau = fit.tau;
    let xs: Vec<f64> = panel.market_share.iter().map(|s| s.as_f64()).collect();
    let ys: Vec<f64> = panel.column(fit.response).iter().map(|y| y.as_f64()).collect();

    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" viewBox="0 0 {w} {h}" font-family="sans-serif" font-size="12">"#,
        w = FIGURE_WIDTH,
        h = FIGURE_HEIGHT
    );
    let _ = writeln!(svg, r#"<rect class="background" x="0" y="0" width="{FIGURE_WIDTH}" height="{FIGURE_HEIGHT}" fill="white"/>"#);

    // Axes and ticks.
    let (left, right, top, bottom) = (MARGIN_LEFT, FIGURE_WIDTH - MARGIN_RIGHT, MARGIN_TOP, frame.bottom());
    let _ = writeln!(svg, r#"<line class="axis" x1="{left}" y1="{bottom}" x2="{right}" y2="{bottom}" stroke="black"/>"#);
    let _ = writeln!(svg, r#"<line class="axis" x1="{left}" y1="{top}" x2="{left}" y2="{bottom}" stroke="black"/>"#);
    let x_step = (frame.x_max - frame.x_min) / TICKS as f64;
    let y_step = (frame.y_max - frame.y_min) / TICKS as f64;
    for i in 0..=TICKS {
        let xv = frame.x_min + x_step * i as f64;
        let px = frame.x_pixel(xv);
        let _ = writeln!(svg, r#"<line class="tick" x1="{px:.2}" y1="{bottom}" x2="{px:.2}" y2="{:.2}" stroke="black"/>"#, bottom + 5.0);
        let _ = writeln!(
            svg,
            r#"<text class="tick-label" x="{px:.2}" y="{:.2}" text-anchor="middle">{}</text>"#,
            bottom + 20.0,
            tick_label(xv * 100.0, x_step * 100.0)
        );
        let yv = frame.y_min + y_step * i as f64;
        let py = frame.y_pixel(yv);
        let _ = writeln!(svg, r#"<line class="tick" x1="{:.2}" y1="{py:.2}" x2="{left}" y2="{py:.2}" stroke="black"/>"#, left - 5.0);
        let _ = writeln!(
            svg,
            r#"<text class="tick-label" x="{:.2}" y="{:.2}" text-anchor="end">{}</text>"#,
            left - 8.0,
            py + 4.0,
            tick_label(yv, y_step)
        );
    }
    let _ = writeln!(
        svg,
        r#"<text class="axis-label" x="{:.2}" y="{:.2}" text-anchor="middle">Market share (% of T-bills outstanding)</text>"#,
        (left + right) / 2.0,
        FIGURE_HEIGHT - 16.0
    );
    let cy = (top + bottom) / 2.0;
    let _ = writeln!(
        svg,
        r#"<text class="axis-label" x="20" y="{cy:.2}" text-anchor="middle" transform="rotate(-90 20 {cy:.2})">{} (log of % p.a.)</text>"#,
        fit.response.label()
    );

    // Bands under lines under points.
    for (t, colour, regime) in [(&low, LOW_COLOUR, "low"), (&high, HIGH_COLOUR, "high")] {
        let _ = writeln!(
            svg,
            r#"<polygon class="ci-band {regime}" points="{}" fill="{colour}" fill-opacity="0.15" stroke="none"/>"#,
            band_points(&frame, t)
        );
    }
    for (t, colour, regime, dash) in [(&low, LOW_COLOUR, "low", ""), (&high, HIGH_COLOUR, "high", r#" stroke-dasharray="10 3""#)] {
        let _ = writeln!(
            svg,
            r#"<path class="fit-line {regime}" d="{}" fill="none" stroke="{colour}" stroke-width="2"{dash}/>"#,
            path_data(&frame, &t.x, &t.fit)
        );
    }
    let tx = frame.x_pixel(tau.as_f64());
    let _ = writeln!(
        svg,
        r#"<line class="threshold-rule" x1="{tx:.2}" y1="{top}" x2="{tx:.2}" y2="{bottom}" stroke="{RULE_COLOUR}" stroke-width="1.5" stroke-dasharray="6 4"/>"#
    );
    for (i, (x, y)) in xs.iter().zip(&ys).enumerate() {
        let _ = writeln!(
            svg,
            r#"<circle class="observation" cx="{:.2}" cy="{:.2}" r="4" fill="{POINT_COLOUR}"><title>{}</title></circle>"#,
            frame.x_pixel(*x),
            frame.y_pixel(*y),
            panel.date_labels[i]
        );
    }
    let _ = writeln!(
        svg,
        r#"<text class="legend" x="{:.2}" y="{:.2}" fill="{RULE_COLOUR}">threshold {}%</text>"#,
        tx + 4.0,
        top + 12.0,
        super::format_number(tau.as_f64() * 100.0)
    );
    svg.push_str("</svg>\n");
    Ok(svg)
}
