//! Signal and spectrum carriers, gap/band-limited synthesis and gap verification.
//!
//! Frequencies are angular (radians per unit length). A [`Spectrum`] produced by
//! [`spectrum_of`] is normalized per sample so that its amplitudes approximate
//! `(1/L) ∫ f(x) e^{-iξx} dx` over the sampled window of length `L`.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::ops::RangeInclusive;

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};

/// Relative slack used when deciding whether a bin frequency lies inside a gap.
const EDGE_SLACK: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    pub x0: f64,
    pub dx: f64,
    pub n: usize,
}

impl Grid {
    pub fn new(x0: f64, dx: f64, n: usize) -> Result<Self> {
        if !(x0.is_finite() && dx.is_finite()) || dx <= 0.0 {
            return invalid(format!("grid step must be positive and finite, got {dx}"));
        }
        if n < 2 {
            return invalid(format!("grid needs at least 2 points, got {n}"));
        }
        Ok(Self { x0, dx, n })
    }

    /// `n` points covering `[x0, x0 + length)`; the right end is excluded so
    /// that periodic signals sample each period identically.
    pub fn periodic(x0: f64, length: f64, n: usize) -> Result<Self> {
        Self::new(x0, length / n as f64, n)
    }

    /// `n` points covering the closed interval `[lo, hi]`.
    pub fn closed(lo: f64, hi: f64, n: usize) -> Result<Self> {
        if n < 2 || hi <= lo {
            return invalid(format!("bad closed grid [{lo}, {hi}] with {n} points"));
        }
        Self::new(lo, (hi - lo) / (n - 1) as f64, n)
    }

    #[inline]
    pub fn x(&self, j: usize) -> f64 {
        self.x0 + j as f64 * self.dx
    }

    pub fn points(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.n).map(move |j| self.x(j))
    }

    /// Window length `n·dx` (the period of the DFT).
    pub fn length(&self) -> f64 {
        self.n as f64 * self.dx
    }

    pub fn last(&self) -> f64 {
        self.x(self.n - 1)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampledSignal {
    pub grid: Grid,
    pub values: Vec<f64>,
}

impl SampledSignal {
    pub fn new(grid: Grid, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.n {
            return invalid(format!("{} values for a grid of {} points", values.len(), grid.n));
        }
        if let Some(j) = values.iter().position(|v| !v.is_finite()) {
            return invalid(format!("non-finite sample at index {j}"));
        }
        Ok(Self { grid, values })
    }

    pub fn from_fn(grid: Grid, f: impl Fn(f64) -> f64) -> Result<Self> {
        let values = grid.points().map(f).collect();
        Self::new(grid, values)
    }

    pub fn zeros(grid: Grid) -> Self {
        Self {
            grid,
            values: vec![0.0; grid.n],
        }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0f64, |m, v| m.max(v.abs()))
    }

    /// `Σ f² dx`, the Riemann-sum energy over the window.
    pub fn energy(&self) -> f64 {
        self.values.iter().map(|v| v * v).sum::<f64>() * self.grid.dx
    }

    pub fn l1_norm(&self) -> f64 {
        self.values.iter().map(|v| v.abs()).sum::<f64>() * self.grid.dx
    }

    pub fn map(&self, f: impl Fn(f64, f64) -> f64) -> Result<Self> {
        let values = self
            .values
            .iter()
            .enumerate()
            .map(|(j, &v)| f(self.grid.x(j), v))
            .collect();
        Self::new(self.grid, values)
    }
}

/// Real trigonometric polynomial `Σ_n (c_n e^{inωx} + c̄_n e^{-inωx})`,
/// `ω = 2π/period`.
///
/// Coefficients are stored for `n ≥ 0`; the negative-index partner is implied by
/// the reality constraint. The constant term contributes `2·c_0`, so `c_0` must
/// be real.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrigPoly {
    coeffs: BTreeMap<u32, Complex64>,
    period: f64,
}

impl TrigPoly {
    pub fn new(period: f64) -> Result<Self> {
        if !(period.is_finite() && period > 0.0) {
            return invalid(format!("period must be positive, got {period}"));
        }
        Ok(Self {
            coeffs: BTreeMap::new(),
            period,
        })
    }

    /// Builds from `(n, c_n)` pairs over all integers. Pairs stored at both `n`
    /// and `-n` must be complex conjugates; `c_0` is the (real) mean.
    pub fn from_coeffs(pairs: impl IntoIterator<Item = (i64, Complex64)>, period: f64) -> Result<Self> {
        let mut p = Self::new(period)?;
        let mut negative: BTreeMap<u32, Complex64> = BTreeMap::new();
        for (n, c) in pairs {
            if !(c.re.is_finite() && c.im.is_finite()) {
                return invalid(format!("non-finite coefficient at n = {n}"));
            }
            if n == 0 && c.im.abs() > 1e-14 * (1.0 + c.re.abs()) {
                return invalid(format!("c_0 = {c} is not real"));
            }
            let key = n.unsigned_abs() as u32;
            if n >= 0 {
                p.coeffs
                    .insert(key, if n == 0 { Complex64::new(c.re / 2.0, 0.0) } else { c });
            } else {
                negative.insert(key, c);
            }
        }
        for (key, c) in negative {
            match p.coeffs.get(&key) {
                Some(pos) => {
                    let diff = (*pos - c.conj()).norm();
                    if diff > 1e-12 * (1.0 + pos.norm()) {
                        return invalid(format!("reality violated: c_{key} = {pos} but c_-{key} = {c}"));
                    }
                }
                None => {
                    p.coeffs.insert(key, c.conj());
                }
            }
        }
        p.coeffs.retain(|_, c| c.norm() > 0.0);
        Ok(p)
    }

    /// `amplitude · cos(n ω x)`.
    pub fn cos(n: u32, amplitude: f64, period: f64) -> Result<Self> {
        let c = if n == 0 { amplitude } else { amplitude / 2.0 };
        Self::from_coeffs([(n as i64, Complex64::new(c, 0.0))], period)
    }

    /// `amplitude · sin(n ω x)`, `n ≥ 1`.
    pub fn sin(n: u32, amplitude: f64, period: f64) -> Result<Self> {
        if n == 0 {
            return invalid("sin(0·x) is the zero function");
        }
        Self::from_coeffs([(n as i64, Complex64::new(0.0, -amplitude / 2.0))], period)
    }

    pub fn period(&self) -> f64 {
        self.period
    }

    pub fn omega(&self) -> f64 {
        2.0 * PI / self.period
    }

    pub fn coeff(&self, n: u32) -> Complex64 {
        self.coeffs.get(&n).copied().unwrap_or_default()
    }

    pub fn coeffs(&self) -> impl Iterator<Item = (u32, Complex64)> + '_ {
        self.coeffs.iter().map(|(&n, &c)| (n, c))
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// `min{|n| : c_n ≠ 0}`, or `None` for the zero polynomial.
    pub fn gap_order(&self) -> Option<u32> {
        self.coeffs.keys().next().copied()
    }

    pub fn degree(&self) -> Option<u32> {
        self.coeffs.keys().next_back().copied()
    }

    /// Two-sided coefficient of `e^{inωx}`.
    pub fn full_coeff(&self, n: i64) -> Complex64 {
        let c = self.coeff(n.unsigned_abs() as u32);
        match n.cmp(&0) {
            std::cmp::Ordering::Greater => c,
            std::cmp::Ordering::Less => c.conj(),
            std::cmp::Ordering::Equal => c * 2.0,
        }
    }

    pub fn eval(&self, x: f64) -> f64 {
        let w = self.omega();
        self.coeffs
            .iter()
            .map(|(&n, c)| {
                let z = Complex64::cis(n as f64 * w * x);
                2.0 * (c * z).re
            })
            .sum()
    }

    pub fn eval_derivative(&self, x: f64) -> f64 {
        let w = self.omega();
        self.coeffs
            .iter()
            .map(|(&n, c)| {
                let k = n as f64 * w;
                2.0 * (c * Complex64::new(0.0, k) * Complex64::cis(k * x)).re
            })
            .sum()
    }

    pub fn scale(&self, factor: f64) -> Self {
        let mut p = self.clone();
        p.coeffs.values_mut().for_each(|c| *c *= factor);
        p.coeffs.retain(|_, c| c.norm() > 0.0);
        p
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        if (self.period - other.period).abs() > 1e-12 * self.period {
            return invalid("adding trigonometric polynomials of different periods");
        }
        let mut p = self.clone();
        for (&n, &c) in &other.coeffs {
            *p.coeffs.entry(n).or_default() += c;
        }
        p.coeffs.retain(|_, c| c.norm() > 0.0);
        Ok(p)
    }

    /// Heat-flow solution at time `t`: `c_n ↦ e^{-(nω)² t/4} c_n`.
    pub fn heat(&self, t: f64) -> Self {
        let w = self.omega();
        let mut p = self.clone();
        for (&n, c) in p.coeffs.iter_mut() {
            let k = n as f64 * w;
            *c *= (-k * k * t / 4.0).exp();
        }
        p
    }

    /// Conjugate function (Hilbert transform): multiplier `-i·sign(ξ)`.
    pub fn hilbert(&self) -> Self {
        let mut p = self.clone();
        p.coeffs.remove(&0);
        p.coeffs.values_mut().for_each(|c| *c *= Complex64::new(0.0, -1.0));
        p
    }
}

/// Samples `p` on `grid`.
pub fn synth_trig(p: &TrigPoly, grid: Grid) -> Result<SampledSignal> {
    SampledSignal::from_fn(grid, |x| p.eval(x))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Normalization {
    /// Raw DFT sums.
    None,
    /// DFT sums divided by the sample count.
    PerSample,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Spectrum {
    /// Angular frequencies, strictly increasing.
    pub freqs: Vec<f64>,
    pub amplitudes: Vec<Complex64>,
    pub normalization: Normalization,
    /// Sampling grid the spectrum belongs to; needed for inversion.
    pub grid: Grid,
}

/// Signed DFT bin index at sorted position `p` for `n` samples.
fn bin_of_position(p: usize, n: usize) -> i64 {
    p as i64 - (n / 2) as i64
}

fn fft_slot(k: i64, n: usize) -> usize {
    k.rem_euclid(n as i64) as usize
}

impl Spectrum {
    pub fn len(&self) -> usize {
        self.freqs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.freqs.is_empty()
    }

    /// Spectrum whose per-sample amplitudes sample a continuous transform:
    /// `amplitude(ξ) = transform(ξ) / L`.
    pub fn from_transform(grid: Grid, transform: impl Fn(f64) -> Complex64) -> Self {
        let n = grid.n;
        let length = grid.length();
        let freqs: Vec<f64> = (0..n)
            .map(|p| 2.0 * PI * bin_of_position(p, n) as f64 / length)
            .collect();
        let amplitudes = freqs.iter().map(|&xi| transform(xi) / length).collect();
        Self {
            freqs,
            amplitudes,
            normalization: Normalization::PerSample,
            grid,
        }
    }

    pub fn per_sample(&self) -> Vec<Complex64> {
        match self.normalization {
            Normalization::PerSample => self.amplitudes.clone(),
            Normalization::None => {
                let n = self.grid.n as f64;
                self.amplitudes.iter().map(|a| a / n).collect()
            }
        }
    }

    /// Applies `f(ξ, amplitude)` bin by bin.
    pub fn map(&self, f: impl Fn(f64, Complex64) -> Complex64) -> Self {
        let amplitudes = self
            .freqs
            .iter()
            .zip(&self.amplitudes)
            .map(|(&xi, &a)| f(xi, a))
            .collect();
        Self {
            amplitudes,
            ..self.clone()
        }
    }

    /// `Σ |a|²` over bins (per-sample normalization).
    pub fn energy(&self) -> f64 {
        self.per_sample().iter().map(|a| a.norm_sqr()).sum::<f64>() * self.grid.length()
    }

    /// Estimate of `sup |f̂|` for the continuous transform, `L · max|a|`.
    pub fn transform_sup(&self) -> f64 {
        self.per_sample().iter().fold(0.0f64, |m, a| m.max(a.norm())) * self.grid.length()
    }

    /// Complex samples `Σ_k a_k e^{iξ_k x_j}` on the spectrum's grid.
    pub fn inverse_complex(&self) -> Vec<Complex64> {
        let n = self.grid.n;
        let x0 = self.grid.x0;
        let mut buf = vec![Complex64::default(); n];
        for (p, (&xi, &a)) in self.freqs.iter().zip(&self.per_sample()).enumerate() {
            buf[fft_slot(bin_of_position(p, n), n)] = a * Complex64::cis(xi * x0);
        }
        FftPlanner::new().plan_fft_inverse(n).process(&mut buf);
        buf
    }

    /// Real signal from a Hermitian-symmetric spectrum. Fails when the
    /// imaginary residue exceeds `1e-10` of the largest magnitude.
    pub fn synthesize(&self) -> Result<SampledSignal> {
        let z = self.inverse_complex();
        let max_mag = z.iter().fold(0.0f64, |m, c| m.max(c.norm()));
        let max_im = z.iter().fold(0.0f64, |m, c| m.max(c.im.abs()));
        if max_im > 1e-10 * max_mag.max(f64::MIN_POSITIVE) {
            return invalid(format!(
                "spectrum is not Hermitian: imaginary residue {max_im:e} vs magnitude {max_mag:e}"
            ));
        }
        SampledSignal::new(self.grid, z.iter().map(|c| c.re).collect())
    }

    /// Largest imaginary residue of the inverse relative to the largest magnitude.
    pub fn reality_residue(&self) -> f64 {
        let z = self.inverse_complex();
        let max_mag = z.iter().fold(0.0f64, |m, c| m.max(c.norm()));
        let max_im = z.iter().fold(0.0f64, |m, c| m.max(c.im.abs()));
        if max_mag == 0.0 {
            0.0
        } else {
            max_im / max_mag
        }
    }
}

/// Per-sample DFT of `s`, phase-referenced to the absolute abscissa.
pub fn spectrum_of(s: &SampledSignal) -> Spectrum {
    let n = s.grid.n;
    let length = s.grid.length();
    let mut buf: Vec<Complex64> = s.values.iter().map(|&v| Complex64::new(v, 0.0)).collect();
    FftPlanner::new().plan_fft_forward(n).process(&mut buf);
    let mut freqs = Vec::with_capacity(n);
    let mut amplitudes = Vec::with_capacity(n);
    for p in 0..n {
        let k = bin_of_position(p, n);
        let xi = 2.0 * PI * k as f64 / length;
        freqs.push(xi);
        amplitudes.push(buf[fft_slot(k, n)] * Complex64::cis(-xi * s.grid.x0) / n as f64);
    }
    Spectrum {
        freqs,
        amplitudes,
        normalization: Normalization::PerSample,
        grid: s.grid,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GapSpec {
    /// Gap half-width: the transform vanishes on `(-a, a)`.
    pub a: f64,
    /// Optional outer band edge: the transform vanishes for `|ξ| > b`.
    pub b: Option<f64>,
}

impl GapSpec {
    pub fn new(a: f64, b: Option<f64>) -> Result<Self> {
        if !(a.is_finite() && a > 0.0) {
            return invalid(format!("gap half-width must be positive, got {a}"));
        }
        if let Some(b) = b {
            if !(b.is_finite() && b >= a) {
                return invalid(format!("band edge {b} below gap {a}"));
            }
        }
        Ok(Self { a, b })
    }

    pub fn high_pass(a: f64) -> Result<Self> {
        Self::new(a, None)
    }

    pub fn band(a: f64, b: f64) -> Result<Self> {
        Self::new(a, Some(b))
    }

    pub fn in_gap(&self, xi: f64) -> bool {
        xi.abs() < self.a * (1.0 - EDGE_SLACK)
    }

    pub fn out_of_band(&self, xi: f64) -> bool {
        self.b.is_some_and(|b| xi.abs() > b * (1.0 + EDGE_SLACK))
    }
}

/// Seeded random high-pass polynomial with standard-normal coefficients on every
/// admissible index `n` (those with `nω ≥ a`, and `nω ≤ b` when banded).
pub fn random_highpass(gap: &GapSpec, degrees: RangeInclusive<u32>, period: f64, seed: u64) -> Result<TrigPoly> {
    let w = 2.0 * PI / period;
    let admissible: Vec<u32> = degrees
        .filter(|&n| n > 0 && !gap.in_gap(n as f64 * w) && !gap.out_of_band(n as f64 * w))
        .collect();
    if admissible.is_empty() {
        return invalid("no admissible degree for the requested gap");
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let pairs: Vec<(i64, Complex64)> = admissible
        .iter()
        .map(|&n| {
            let re: f64 = StandardNormal.sample(&mut rng);
            let im: f64 = StandardNormal.sample(&mut rng);
            (n as i64, Complex64::new(re, im) / 2.0)
        })
        .collect();
    TrigPoly::from_coeffs(pairs, period)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GapReport {
    pub in_gap_energy_ratio: f64,
    pub pass: bool,
}

pub fn verify_gap(s: &SampledSignal, gap: &GapSpec, rel_tol: f64) -> Result<GapReport> {
    verify_gap_spectrum(&spectrum_of(s), gap, rel_tol)
}

/// Energy fraction of the spectrum inside the gap (and beyond the band edge,
/// when one is given).
pub fn verify_gap_spectrum(sp: &Spectrum, gap: &GapSpec, rel_tol: f64) -> Result<GapReport> {
    if !(rel_tol > 0.0 && rel_tol < 1.0) {
        return invalid(format!("rel_tol must lie in (0, 1), got {rel_tol}"));
    }
    let amps = sp.per_sample();
    let (outside, total) = sp.freqs.iter().zip(&amps).fold((0.0, 0.0), |(o, t), (&xi, a)| {
        let e = a.norm_sqr();
        let bad = gap.in_gap(xi) || gap.out_of_band(xi);
        (if bad { o + e } else { o }, t + e)
    });
    if total == 0.0 {
        return Ok(GapReport {
            in_gap_energy_ratio: 0.0,
            pass: true,
        });
    }
    let ratio = outside / total;
    Ok(GapReport {
        in_gap_energy_ratio: ratio,
        pass: ratio <= rel_tol,
    })
}

/// Zeroes bins with `|ξ| < a` and, when banded, `|ξ| > b`.
pub fn apply_gap_mask(sp: &Spectrum, gap: &GapSpec) -> Spectrum {
    sp.map(|xi, a| {
        if gap.in_gap(xi) || gap.out_of_band(xi) {
            Complex64::default()
        } else {
            a
        }
    })
}
