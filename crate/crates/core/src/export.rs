//! CSV and SVG writers for the artifacts produced by the other modules.

use std::fmt::Write as _;
use std::io::Write;

use crate::error::Result;
use crate::hardy::{HalfPlaneField, PhaseCurve};
use crate::heat::TemperatureField;
use crate::limit_sets::examples::ZeroSet;
use crate::oscillation::DensityProfile;
use crate::signals::{SampledSignal, Spectrum};

fn rows<W: Write>(w: W, header: &[&str], rows: impl IntoIterator<Item = Vec<String>>) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record(header)?;
    for r in rows {
        out.write_record(&r)?;
    }
    out.flush()?;
    Ok(())
}

fn num(v: f64) -> String {
    format!("{v:.17e}")
}

/// Columns `x,value`.
pub fn write_signal<W: Write>(w: W, s: &SampledSignal) -> Result<()> {
    rows(
        w,
        &["x", "value"],
        s.grid.points().zip(&s.values).map(|(x, v)| vec![num(x), num(*v)]),
    )
}

/// Columns `xi,re,im,abs` with per-sample amplitudes.
pub fn write_spectrum<W: Write>(w: W, sp: &Spectrum) -> Result<()> {
    let amps = sp.per_sample();
    rows(
        w,
        &["xi", "re", "im", "abs"],
        sp.freqs
            .iter()
            .zip(&amps)
            .map(|(xi, a)| vec![num(*xi), num(a.re), num(a.im), num(a.norm())]),
    )
}

/// Columns `r,s,density`.
pub fn write_density<W: Write>(w: W, d: &DensityProfile) -> Result<()> {
    rows(
        w,
        &["r", "s", "density"],
        d.samples
            .iter()
            .map(|p| vec![num(p.r), p.s.to_string(), num(p.density)]),
    )
}

/// One integer per line, no header.
pub fn write_zero_set<W: Write>(mut w: W, zs: &ZeroSet) -> Result<()> {
    for n in &zs.positions {
        writeln!(w, "{n}")?;
    }
    Ok(())
}

/// Columns `t,x,u`, one row per lattice point.
pub fn write_temperature<W: Write>(w: W, f: &TemperatureField) -> Result<()> {
    rows(
        w,
        &["t", "x", "u"],
        f.times.iter().zip(&f.values).flat_map(|(t, row)| {
            f.grid
                .points()
                .zip(row)
                .map(move |(x, u)| vec![num(*t), num(x), num(*u)])
        }),
    )
}

/// Columns `t,x`: one row per zero position per time.
pub fn write_zero_trajectory<W: Write>(w: W, traj: &[(f64, Vec<f64>)]) -> Result<()> {
    rows(
        w,
        &["t", "x"],
        traj.iter()
            .flat_map(|(t, xs)| xs.iter().map(move |x| vec![num(*t), num(*x)])),
    )
}

/// Columns `x,phi`; jumps appear as repeated abscissae.
pub fn write_phase_curve<W: Write>(w: W, c: &PhaseCurve) -> Result<()> {
    rows(
        w,
        &["x", "phi"],
        c.xs.iter().zip(&c.phi).map(|(x, p)| vec![num(*x), num(*p)]),
    )
}

/// Columns `x,y,re,im`.
pub fn write_half_plane<W: Write>(w: W, f: &HalfPlaneField) -> Result<()> {
    rows(
        w,
        &["x", "y", "re", "im"],
        f.ys.iter().zip(&f.rows).flat_map(|(y, row)| {
            f.grid
                .points()
                .zip(row)
                .map(move |(x, h)| vec![num(x), num(*y), num(h.re), num(h.im)])
        }),
    )
}

/// A named polyline for [`svg_plot`].
pub struct Series<'a> {
    pub name: &'a str,
    pub points: Vec<(f64, f64)>,
}

/// A bare line plot: polylines, optional horizontal reference lines, axis
/// extents in the corners.
pub fn svg_plot(title: &str, series: &[Series<'_>], hlines: &[f64]) -> String {
    const W: f64 = 640.0;
    const H: f64 = 400.0;
    const PAD: f64 = 40.0;
    const COLORS: [&str; 4] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd"];
    let all = series.iter().flat_map(|s| s.points.iter().copied());
    let (mut x0, mut x1, mut y0, mut y1) = (f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY);
    for (x, y) in all.filter(|(x, y)| x.is_finite() && y.is_finite()) {
        x0 = x0.min(x);
        x1 = x1.max(x);
        y0 = y0.min(y);
        y1 = y1.max(y);
    }
    if !x0.is_finite() {
        (x0, x1, y0, y1) = (0.0, 1.0, 0.0, 1.0);
    }
    if x1 == x0 {
        x1 = x0 + 1.0;
    }
    if y1 == y0 {
        y1 = y0 + 1.0;
    }
    let sx = |x: f64| PAD + (x - x0) / (x1 - x0) * (W - 2.0 * PAD);
    let sy = |y: f64| H - PAD - (y - y0) / (y1 - y0) * (H - 2.0 * PAD);

    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" viewBox="0 0 {W} {H}">"#
    );
    let _ = writeln!(svg, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(
        svg,
        r#"<text x="{PAD}" y="20" font-family="sans-serif" font-size="14">{}</text>"#,
        escape(title)
    );
    for &h in hlines.iter().filter(|h| (y0..=y1).contains(*h)) {
        let y = sy(h);
        let _ = writeln!(
            svg,
            r##"<line x1="{PAD}" y1="{y:.2}" x2="{:.2}" y2="{y:.2}" stroke="#999" stroke-dasharray="4 3"/>"##,
            W - PAD
        );
    }
    for (i, s) in series.iter().enumerate() {
        let pts: Vec<String> = s
            .points
            .iter()
            .filter(|(x, y)| x.is_finite() && y.is_finite())
            .map(|&(x, y)| format!("{:.2},{:.2}", sx(x), sy(y)))
            .collect();
        let color = COLORS[i % COLORS.len()];
        let _ = writeln!(
            svg,
            r#"<polyline fill="none" stroke="{color}" stroke-width="1" points="{}"/>"#,
            pts.join(" ")
        );
        let _ = writeln!(
            svg,
            r#"<text x="{:.0}" y="{:.0}" font-family="sans-serif" font-size="11" fill="{color}">{}</text>"#,
            W - PAD - 120.0,
            PAD + 14.0 * i as f64,
            escape(s.name)
        );
    }
    let _ = writeln!(
        svg,
        r#"<text x="{PAD}" y="{:.0}" font-family="sans-serif" font-size="10">x: [{x0:.4}, {x1:.4}]  y: [{y0:.4}, {y1:.4}]</text>"#,
        H - 10.0
    );
    svg.push_str("</svg>\n");
    svg
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}
