//! SVG rendering of the entangled region, `B/|J|` across and `kT/|J|` up.

use std::fmt::Write as _;

use thermowitness::thermolimit::{boundary_trace, critical_field, BoundaryOutcome, GridAxes, TraceConfig, XxOptions};
use thermowitness::Result;

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 480.0;
const LEFT: f64 = 72.0;
const RIGHT: f64 = 24.0;
const TOP: f64 = 24.0;
const BOTTOM: f64 = 60.0;

/// Region where `W > 1`, in `(B/|J|, kT/|J|)` data coordinates.
#[derive(Debug, Clone, PartialEq)]
pub struct RegionOutline {
    /// Closed polygon, clipped to the plotted temperature range.
    pub vertices: Vec<(f64, f64)>,
    /// The traced `W = 1` curve inside the plotted window.
    pub contour: Vec<(f64, f64)>,
}

/// Traces the boundary at every field of the grid. The region is the run of
/// columns starting at the lowest field in which the witness fires at
/// `kT_min`; it closes along the bottom edge at the critical field there.
pub fn region_outline(axes: &GridAxes, opts: &XxOptions) -> Result<RegionOutline> {
    let (kt_axis, b_axis) = (axes.kt_over_j, axes.b_over_j);
    let config = TraceConfig { kt_min: kt_axis.min, kt_max: kt_axis.max, ..TraceConfig::default() };
    let curve = boundary_trace(&b_axis.values(), axes.coupling, &config, opts)?;

    let tops: Vec<(f64, Option<f64>)> = curve
        .points
        .iter()
        .map(|p| {
            let top = match p.outcome {
                BoundaryOutcome::Crossing { kt_over_j, .. } => Some(kt_over_j),
                BoundaryOutcome::NoCrossing { w_at_kt_min, .. } if w_at_kt_min > 1.0 => Some(kt_axis.max),
                _ => None,
            };
            (p.b_over_j, top)
        })
        .collect();

    let run: Vec<(f64, f64)> = tops.iter().map_while(|&(b, top)| top.map(|t| (b, t))).collect();
    let mut contour = curve.crossings();
    let Some(&(first_b, _)) = run.first() else {
        return Ok(RegionOutline { vertices: Vec::new(), contour });
    };
    let (last_b, _) = *run.last().expect("run is non-empty");

    let edge = match tops.get(run.len()) {
        None => last_b,
        Some(&(next_b, _)) => critical_field(kt_axis.min, axes.coupling, 1e-9, opts)?
            .map_or(last_b, |b| b.clamp(last_b, next_b)),
    };

    let mut vertices = Vec::with_capacity(run.len() + 2);
    vertices.push((first_b, kt_axis.min));
    vertices.extend(run.iter().copied());
    vertices.push((edge, kt_axis.min));
    if edge > last_b {
        contour.push((edge, kt_axis.min));
    }
    Ok(RegionOutline { vertices, contour })
}

struct Frame {
    b_min: f64,
    b_max: f64,
    kt_min: f64,
    kt_max: f64,
}

impl Frame {
    fn x(&self, b: f64) -> f64 {
        let span = (self.b_max - self.b_min).max(f64::MIN_POSITIVE);
        LEFT + (b - self.b_min) / span * (WIDTH - LEFT - RIGHT)
    }

    fn y(&self, kt: f64) -> f64 {
        let span = (self.kt_max - self.kt_min).max(f64::MIN_POSITIVE);
        TOP + (1.0 - (kt - self.kt_min) / span) * (HEIGHT - TOP - BOTTOM)
    }

    fn points(&self, data: &[(f64, f64)]) -> String {
        data.iter().map(|&(b, t)| format!("{:.3},{:.3}", self.x(b), self.y(t))).collect::<Vec<_>>().join(" ")
    }
}

fn ticks(min: f64, max: f64, count: usize) -> Vec<f64> {
    (0..count).map(|i| min + (max - min) * i as f64 / (count - 1) as f64).collect()
}

pub fn render_svg(axes: &GridAxes, outline: &RegionOutline) -> String {
    let frame =
        Frame { b_min: axes.b_over_j.min, b_max: axes.b_over_j.max, kt_min: axes.kt_over_j.min, kt_max: axes.kt_over_j.max };
    let (x0, x1, y0, y1) = (LEFT, WIDTH - RIGHT, TOP, HEIGHT - BOTTOM);
    let mut s = String::new();
    let w = &mut s;
    let _ = writeln!(
        w,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(w, r#"<rect x="0" y="0" width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#);
    if !outline.vertices.is_empty() {
        let _ = writeln!(
            w,
            r##"<polygon class="entangled-region" fill="#9ecae1" stroke="none" points="{}"/>"##,
            frame.points(&outline.vertices)
        );
    }
    if outline.contour.len() > 1 {
        let _ = writeln!(
            w,
            r##"<polyline class="witness-contour" fill="none" stroke="#08519c" stroke-width="2" points="{}"/>"##,
            frame.points(&outline.contour)
        );
    }
    let _ = writeln!(
        w,
        r#"<rect class="frame" x="{x0}" y="{y0}" width="{}" height="{}" fill="none" stroke="black"/>"#,
        x1 - x0,
        y1 - y0
    );
    for b in ticks(frame.b_min, frame.b_max, 7) {
        let x = frame.x(b);
        let _ = writeln!(w, r#"<line x1="{x:.3}" y1="{y1}" x2="{x:.3}" y2="{}" stroke="black"/>"#, y1 + 5.0);
        let _ = writeln!(w, r#"<text x="{x:.3}" y="{}" text-anchor="middle">{b:.2}</text>"#, y1 + 18.0);
    }
    for t in ticks(frame.kt_min, frame.kt_max, 7) {
        let y = frame.y(t);
        let _ = writeln!(w, r#"<line x1="{}" y1="{y:.3}" x2="{x0}" y2="{y:.3}" stroke="black"/>"#, x0 - 5.0);
        let _ = writeln!(w, r#"<text x="{}" y="{:.3}" text-anchor="end">{t:.2}</text>"#, x0 - 8.0, y + 4.0);
    }
    let _ = writeln!(
        w,
        r#"<text class="axis-label" x="{:.1}" y="{}" text-anchor="middle" font-size="14">B/|J|</text>"#,
        0.5 * (x0 + x1),
        HEIGHT - 14.0
    );
    let _ = writeln!(
        w,
        r#"<text class="axis-label" x="18" y="{:.1}" text-anchor="middle" font-size="14" transform="rotate(-90 18 {:.1})">kT/|J|</text>"#,
        0.5 * (y0 + y1),
        0.5 * (y0 + y1)
    );
    let _ = writeln!(w, r#"<text x="{}" y="{}" text-anchor="end">shaded: W &gt; 1 (entangled)</text>"#, x1 - 8.0, y0 + 16.0);
    s.push_str("</svg>\n");
    s
}
