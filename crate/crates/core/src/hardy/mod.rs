//! The decomposition `f = h + h̄` and the analytic machinery built on it.
//!
//! `h` carries the positive-frequency half of `f`:
//! `h(z) = (1/2π) ∫_0^∞ e^{itz} f̂(t) dt`, so that `cos(ax)` gives
//! `h(z) = e^{iaz}/2`. The primary evaluator is spectral (one-sided DFT); the
//! Cauchy integral `h(z) = (i/2π) ∫ f(s)/(z - s) ds` is kept as an independent
//! check.

mod hilbert;
mod phase;

pub use hilbert::{
    hilbert_transform, j_functional, kolmogorov_check, pv_hilbert, spectral_hilbert, tail_split, HarmonicPair, JReport,
    KolmogorovReport, KolmogorovRow, Split,
};
pub use phase::{
    blaschke, lattice_crossings, phase_curve, phase_curve_fn, quant_bound, Lattice, PhaseCurve, PhaseJump,
};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::error::{invalid, Result};
use crate::numerics::{ls_slope, simpson, trapezoid};
use crate::signals::{spectrum_of, GapSpec, Grid, SampledSignal, Spectrum, TrigPoly};

/// Terms below this fraction of the largest amplitude are treated as rounding
/// noise and dropped from the off-axis evaluator.
const PRUNE: f64 = 1e-14;

/// `h` sampled on horizontal lines `Im z = y`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HalfPlaneField {
    pub grid: Grid,
    pub ys: Vec<f64>,
    /// `rows[i][j] = h(x_j + i·ys[i])`.
    pub rows: Vec<Vec<Complex64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnalyticDecomposition {
    pub grid: Grid,
    pub h_real_axis: Vec<Complex64>,
    pub h_upper: Option<HalfPlaneField>,
    pub source_band: Option<GapSpec>,
    /// `(ξ ≥ 0, amplitude)` pairs: `h(z) = Σ amplitude·e^{iξz}`.
    terms: Vec<(f64, Complex64)>,
}

/// One-sided projection: positive bins kept, the `ξ = 0` bin (and the Nyquist
/// bin of an even-length grid) halved, negative bins zeroed.
fn one_sided(sp: &Spectrum) -> Spectrum {
    let n = sp.grid.n;
    let mut out = sp.clone();
    out.amplitudes = sp.per_sample();
    out.normalization = crate::signals::Normalization::PerSample;
    for (p, (xi, a)) in out.freqs.iter().zip(out.amplitudes.iter_mut()).enumerate() {
        let nyquist = n.is_multiple_of(2) && p == 0;
        if *xi == 0.0 || nyquist {
            *a *= 0.5;
        } else if *xi < 0.0 {
            *a = Complex64::default();
        }
    }
    out
}

fn prune(terms: Vec<(f64, Complex64)>) -> Vec<(f64, Complex64)> {
    let max = terms.iter().fold(0.0f64, |m, (_, a)| m.max(a.norm()));
    terms.into_iter().filter(|(_, a)| a.norm() > PRUNE * max).collect()
}

pub fn decompose(s: &SampledSignal) -> AnalyticDecomposition {
    let sp = one_sided(&spectrum_of(s));
    let h_real_axis = sp.inverse_complex();
    let n = s.grid.n;
    let terms = sp
        .freqs
        .iter()
        .zip(&sp.amplitudes)
        .enumerate()
        .filter_map(|(p, (&xi, &a))| {
            if n.is_multiple_of(2) && p == 0 {
                // The Nyquist alias is moved to +π/dx with the phase that keeps
                // its grid values unchanged.
                let shift = Complex64::cis(-2.0 * xi.abs() * s.grid.x0);
                Some((xi.abs(), a * shift))
            } else {
                (xi >= 0.0).then_some((xi, a))
            }
        })
        .collect();
    AnalyticDecomposition {
        grid: s.grid,
        h_real_axis,
        h_upper: None,
        source_band: None,
        terms: prune(terms),
    }
}

/// Decomposition with the upper half-plane field filled on the lines `ys`.
pub fn decompose_on(s: &SampledSignal, ys: &[f64]) -> Result<AnalyticDecomposition> {
    if ys.iter().any(|&y| !(y > 0.0)) {
        return invalid("half-plane lines need y > 0");
    }
    let mut d = decompose(s);
    let sp = one_sided(&spectrum_of(s));
    let rows = ys
        .iter()
        .map(|&y| sp.map(|xi, a| a * (-xi.abs() * y).exp()).inverse_complex())
        .collect();
    d.h_upper = Some(HalfPlaneField {
        grid: s.grid,
        ys: ys.to_vec(),
        rows,
    });
    Ok(d)
}

/// Exact decomposition of a trigonometric polynomial: `h = c_0 + Σ_{n>0} c_n e^{inωz}`.
pub fn decompose_trig(p: &TrigPoly, grid: Grid) -> AnalyticDecomposition {
    let w = p.omega();
    let terms: Vec<(f64, Complex64)> = p.coeffs().map(|(n, c)| (n as f64 * w, c)).collect();
    let mut d = AnalyticDecomposition {
        grid,
        h_real_axis: Vec::new(),
        h_upper: None,
        source_band: None,
        terms,
    };
    d.h_real_axis = grid.points().map(|x| d.eval(Complex64::new(x, 0.0))).collect();
    d
}

impl AnalyticDecomposition {
    pub fn with_band(mut self, gap: GapSpec) -> Self {
        self.source_band = Some(gap);
        self
    }

    pub fn terms(&self) -> &[(f64, Complex64)] {
        &self.terms
    }

    pub fn eval(&self, z: Complex64) -> Complex64 {
        self.terms
            .iter()
            .map(|&(xi, a)| a * (Complex64::i() * xi * z).exp())
            .sum()
    }

    pub fn eval_derivative(&self, z: Complex64) -> Complex64 {
        self.terms
            .iter()
            .map(|&(xi, a)| a * Complex64::new(0.0, xi) * (Complex64::i() * xi * z).exp())
            .sum()
    }

    /// `ln|h(z)|` with the smallest frequency factored out, so that values far
    /// up the half-plane do not underflow.
    pub fn log_abs(&self, z: Complex64) -> f64 {
        let Some(xi0) = self.terms.iter().map(|t| t.0).reduce(f64::min) else {
            return f64::NEG_INFINITY;
        };
        let scaled: Complex64 = self
            .terms
            .iter()
            .map(|&(xi, a)| a * Complex64::cis(xi * z.re) * (-(xi - xi0) * z.im).exp())
            .sum();
        scaled.norm().ln() - xi0 * z.im
    }

    /// `max|s - 2 Re h| / max|s|` on the grid.
    pub fn reconstruction_error(&self, s: &SampledSignal) -> f64 {
        let err = s
            .values
            .iter()
            .zip(&self.h_real_axis)
            .fold(0.0f64, |m, (v, h)| m.max((v - 2.0 * h.re).abs()));
        let scale = s.max_abs();
        if scale == 0.0 {
            err
        } else {
            err / scale
        }
    }

    /// Energy fraction of `h` below frequency `a`.
    pub fn in_gap_ratio(&self, a: f64) -> f64 {
        let (inside, total) = self.terms.iter().fold((0.0, 0.0), |(i, t), &(xi, c)| {
            let e = c.norm_sqr();
            (if xi < a * (1.0 - 1e-9) { i + e } else { i }, t + e)
        });
        if total == 0.0 {
            0.0
        } else {
            inside / total
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CauchyValue {
    pub value: Complex64,
    /// Quadrature error estimate plus a truncation bound from the oscillation
    /// of the antiderivative of `f` near the window ends.
    pub tolerance: f64,
}

/// `h(z) = (i/2π) ∫ f(s)/(z - s) ds` over the sampled window.
pub fn cauchy_h(s: &SampledSignal, z: Complex64) -> Result<CauchyValue> {
    if !(z.im > 0.0) {
        return invalid(format!("Cauchy integral needs Im z > 0, got {z}"));
    }
    let g = s.grid;
    let pref = Complex64::new(0.0, 1.0 / (2.0 * PI));
    let integrand: Vec<Complex64> = s.values.iter().enumerate().map(|(j, &v)| v / (z - g.x(j))).collect();
    let re: Vec<f64> = integrand.iter().map(|c| c.re).collect();
    let im: Vec<f64> = integrand.iter().map(|c| c.im).collect();
    let simp = Complex64::new(simpson(&re, g.dx), simpson(&im, g.dx));
    let trap = Complex64::new(trapezoid(&re, g.dx), trapezoid(&im, g.dx));
    let quad_err = (simp - trap).norm() / (2.0 * PI);

    // Integration by parts on the missing tails: |∫_R^∞ f/(z-s)| ≲ osc(F)·2/dist.
    let n = g.n;
    let edge = (n / 10).max(2);
    let mut cumulative = vec![0.0; n];
    for j in 1..n {
        cumulative[j] = cumulative[j - 1] + 0.5 * g.dx * (s.values[j - 1] + s.values[j]);
    }
    let osc = |lo: usize, hi: usize| {
        let (mn, mx) = cumulative[lo..hi]
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &c| (a.min(c), b.max(c)));
        mx - mn
    };
    let dist_lo = (z - g.x(0)).norm();
    let dist_hi = (z - g.last()).norm();
    let trunc = (osc(0, edge) * 2.0 / dist_lo + osc(n - edge, n) * 2.0 / dist_hi) / (2.0 * PI);

    Ok(CauchyValue {
        value: pref * simp,
        tolerance: quad_err + trunc,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DecayProbe {
    pub x: f64,
    pub y: f64,
    pub abs_h: f64,
    pub bound: f64,
    pub ratio: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecayReport {
    pub probes: Vec<DecayProbe>,
    pub max_ratio: f64,
    pub pass: bool,
}

/// Checks `|h(x+iy)| ≤ e^{-ay}/(2πy)·sup|f̂|·(1 + margin)` at each probe,
/// comparing logarithms so that deep probes do not underflow.
pub fn decay_check(
    d: &AnalyticDecomposition,
    a: f64,
    f_hat_sup: f64,
    probes: &[(f64, f64)],
    margin: f64,
) -> Result<DecayReport> {
    if !(a > 0.0) {
        return invalid("gap half-width must be positive");
    }
    let leak = d.in_gap_ratio(a);
    if leak > 1e-8 {
        return invalid(format!("spectral gap ({a}) not verified: in-gap energy ratio {leak:e}"));
    }
    let mut out = Vec::with_capacity(probes.len());
    let mut pass = true;
    let mut max_ratio = 0.0f64;
    for &(x, y) in probes {
        if !(y > 0.0) {
            return invalid(format!("probe ({x}, {y}) is not in the upper half-plane"));
        }
        let log_h = d.log_abs(Complex64::new(x, y));
        let log_bound = -a * y - (2.0 * PI * y).ln() + f_hat_sup.ln();
        let log_ratio = log_h - log_bound;
        pass &= log_ratio <= margin.ln_1p();
        let ratio = log_ratio.exp();
        max_ratio = max_ratio.max(ratio);
        out.push(DecayProbe {
            x,
            y,
            abs_h: log_h.exp(),
            bound: log_bound.exp(),
            ratio,
        });
    }
    Ok(DecayReport {
        probes: out,
        max_ratio,
        pass,
    })
}

/// Least-squares estimate of `-lim ln|h(x+iy)|/y` from `samples` points on
/// `y ∈ [y_lo, y_hi]`.
pub fn nevanlinna_exponent(d: &AnalyticDecomposition, x: f64, y_lo: f64, y_hi: f64, samples: usize) -> Result<f64> {
    if !(y_lo > 0.0 && y_hi > y_lo) || samples < 2 {
        return invalid("need 0 < y_lo < y_hi and at least two samples");
    }
    let ys: Vec<f64> = (0..samples)
        .map(|i| y_lo + (y_hi - y_lo) * i as f64 / (samples - 1) as f64)
        .collect();
    let logs: Vec<f64> = ys.iter().map(|&y| d.log_abs(Complex64::new(x, y))).collect();
    if logs.iter().any(|v| !v.is_finite()) {
        return invalid("h vanishes on the probe line");
    }
    Ok(-ls_slope(&ys, &logs))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Half {
    Upper,
    Lower,
}

/// Windowed `F⁺(z) = ∫_{-∞}^0 f(t) e^{-itz} dt` (upper half-plane) or
/// `F⁻(z) = -∫_0^∞ f(t) e^{-itz} dt` (lower half-plane).
pub fn carleman_pair(s: &SampledSignal, z: Complex64, half: Half) -> Result<Complex64> {
    match half {
        Half::Upper if z.im <= 0.0 => return invalid(format!("F+ needs Im z > 0, got {z}")),
        Half::Lower if z.im >= 0.0 => return invalid(format!("F- needs Im z < 0, got {z}")),
        _ => {}
    }
    let kernel = |t: f64| (Complex64::new(0.0, -t) * z).exp();
    let (lo, hi, sign) = match half {
        Half::Upper => (s.grid.x0, 0.0f64.min(s.grid.last()), 1.0),
        Half::Lower => (0.0f64.max(s.grid.x0), s.grid.last(), -1.0),
    };
    Ok(sign * integrate_segment(s, lo, hi, &kernel))
}

/// `∫_lo^hi f(t)·w(t) dt` over the sampled window: Simpson on the whole cells
/// inside, linear interpolation on the partial cells at the ends.
fn integrate_segment(s: &SampledSignal, lo: f64, hi: f64, w: &dyn Fn(f64) -> Complex64) -> Complex64 {
    let g = s.grid;
    if hi <= lo {
        return Complex64::default();
    }
    let first = ((lo - g.x0) / g.dx).ceil().max(0.0) as usize;
    let last = (((hi - g.x0) / g.dx).floor() as usize).min(g.n - 1);
    if first > last {
        let mid = 0.5 * (lo + hi);
        let f = crate::numerics::interp_uniform(&s.values, g.x0, g.dx, mid).unwrap_or(0.0);
        return f * w(mid) * (hi - lo);
    }
    let vals: Vec<Complex64> = (first..=last).map(|j| s.values[j] * w(g.x(j))).collect();
    let re: Vec<f64> = vals.iter().map(|c| c.re).collect();
    let im: Vec<f64> = vals.iter().map(|c| c.im).collect();
    let mut total = Complex64::new(simpson(&re, g.dx), simpson(&im, g.dx));
    let piece = |a: f64, b: f64| {
        if b - a <= 0.0 {
            return Complex64::default();
        }
        let fa = crate::numerics::interp_uniform(&s.values, g.x0, g.dx, a).unwrap_or(0.0);
        let fb = crate::numerics::interp_uniform(&s.values, g.x0, g.dx, b).unwrap_or(0.0);
        0.5 * (b - a) * (fa * w(a) + fb * w(b))
    };
    total += piece(lo, g.x(first));
    total += piece(g.x(last), hi);
    total
}
