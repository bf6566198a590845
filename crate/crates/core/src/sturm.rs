//! Oscillation of trigonometric polynomials: the `2m` sign-change bound, the
//! orthogonality witness behind it, the winding-number count, and the
//! modulation identity `f(nπ/b) = (-1)^n g(nπ/b)` for band-limited signals.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::error::{invalid, GapwaveError, Result};
use crate::hardy::decompose;
use crate::numerics::trapezoid;
use crate::oscillation::{default_zero_tol, s_count, sign_change_places};
use crate::signals::{verify_gap, GapSpec, Grid, SampledSignal, TrigPoly};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SturmCheck {
    pub m: u32,
    pub count: usize,
    pub pass: bool,
}

/// Sign changes of `p` over one period `(-P/2, P/2]`, located by bisection on
/// the exact evaluator.
pub fn period_sign_changes(p: &TrigPoly) -> Result<Vec<f64>> {
    let period = p.period();
    let degree = p.degree().unwrap_or(0) as usize;
    let per_period = 16384.max(64 * degree);
    let dx = period / per_period as f64;
    // Extend past both ends so that no place in the period touches the window edge.
    let pad = 4;
    let grid = Grid::new(-period / 2.0 - pad as f64 * dx, dx, per_period + 2 * pad + 1)?;
    let eval = |x: f64| p.eval(x);
    let s = SampledSignal::from_fn(grid, eval)?;
    let rep = sign_change_places(&s, default_zero_tol(&s), Some(&eval))?;
    Ok(rep
        .sign_change_positions()
        .into_iter()
        .filter(|&x| x > -period / 2.0 && x <= period / 2.0)
        .collect())
}

pub fn check_sturm_bound(p: &TrigPoly) -> Result<SturmCheck> {
    let Some(m) = p.gap_order() else {
        return invalid("zero polynomial has no gap order");
    };
    let count = period_sign_changes(p)?.len();
    Ok(SturmCheck {
        m,
        count,
        pass: count >= 2 * m as usize,
    })
}

/// `Π_j sin(ω(x - x_j)/2)` expanded as a trigonometric polynomial of degree
/// `s/2`; `points` must have even length.
pub fn witness_poly(points: &[f64], period: f64) -> Result<TrigPoly> {
    if points.len() % 2 == 1 {
        return invalid("witness needs an even number of sign changes");
    }
    let w = 2.0 * PI / period;
    let s = points.len();
    // Laurent coefficients in u = e^{iωx/2}; index k stands for u^{k - s}.
    let mut poly = vec![Complex64::default(); 2 * s + 1];
    poly[s] = Complex64::new(1.0, 0.0);
    let half_i = Complex64::new(0.0, 2.0).inv();
    for &xj in points {
        let plus = Complex64::cis(-w * xj / 2.0) * half_i;
        let minus = -Complex64::cis(w * xj / 2.0) * half_i;
        let mut next = vec![Complex64::default(); 2 * s + 1];
        for (k, &c) in poly.iter().enumerate() {
            if c == Complex64::default() {
                continue;
            }
            if k < 2 * s {
                next[k + 1] += c * plus;
            }
            if k >= 1 {
                next[k - 1] += c * minus;
            }
        }
        poly = next;
    }
    // u^{2n} = e^{inωx}; only even powers survive for an even number of factors.
    let pairs = (0..=s / 2).map(|n| {
        let c = poly[s + 2 * n];
        (n as i64, if n == 0 { Complex64::new(c.re, 0.0) } else { c })
    });
    TrigPoly::from_coeffs(pairs, period)
}

/// `∫ p·g` over one period; trapezoid quadrature with more nodes than the
/// combined degree, hence exact up to rounding.
pub fn period_integral(p: &TrigPoly, g: &TrigPoly) -> Result<f64> {
    let degree = p.degree().unwrap_or(0) + g.degree().unwrap_or(0);
    let n = 4 * (degree as usize + 1) + 1;
    let grid = Grid::closed(-p.period() / 2.0, p.period() / 2.0, n)?;
    let vals: Vec<f64> = grid.points().map(|x| p.eval(x) * g.eval(x)).collect();
    Ok(trapezoid(&vals, grid.dx))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "kebab-case")]
pub enum Witness {
    /// `s ≥ 2m`, or `m = 0`: the orthogonality argument has nothing to refute.
    NotApplicable { m: u32, count: usize },
    /// `s < 2m` sign changes at `points`; `g` has degree `s/2 < m`, so `∫ p·g`
    /// vanishes by orthogonality while `p·g` keeps one sign.
    Contradiction {
        points: Vec<f64>,
        g: TrigPoly,
        integral: f64,
    },
}

pub fn orthogonality_witness(p: &TrigPoly) -> Result<Witness> {
    let Some(m) = p.gap_order() else {
        return invalid("zero polynomial has no gap order");
    };
    let points = period_sign_changes(p)?;
    let count = points.len();
    if m == 0 || count >= 2 * m as usize {
        return Ok(Witness::NotApplicable { m, count });
    }
    if count % 2 == 1 {
        return Err(GapwaveError::Diagnostic(format!(
            "odd number ({count}) of sign changes over a period; unresolved multiple zero"
        )));
    }
    let (g, integral) = witness_integral(p, &points)?;
    Ok(Witness::Contradiction { points, g, integral })
}

/// Witness polynomial through the given points and the value of `∫ p·g`.
pub fn witness_integral(p: &TrigPoly, points: &[f64]) -> Result<(TrigPoly, f64)> {
    let g = witness_poly(points, p.period())?;
    let integral = period_integral(p, &g)?;
    Ok((g, integral))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct WindingReport {
    pub turns: i64,
    pub imag_axis_crossings: usize,
    pub samples: usize,
}

/// Winding of `x ↦ p(e^{ix})` about the origin, `p(z) = Σ coeffs[k] z^k`.
/// The sample count doubles until consecutive argument steps stay below `π/2`.
pub fn winding_count(coeffs: &[Complex64], samples: usize) -> Result<WindingReport> {
    if samples < 64 {
        return invalid(format!("need at least 64 samples, got {samples}"));
    }
    if coeffs.iter().all(|c| *c == Complex64::default()) {
        return invalid("zero polynomial");
    }
    let eval = |x: f64| {
        let z = Complex64::cis(x);
        coeffs.iter().rev().fold(Complex64::default(), |acc, &c| acc * z + c)
    };
    let mut n = samples;
    loop {
        let values: Vec<Complex64> = (0..=n).map(|k| eval(2.0 * PI * k as f64 / n as f64)).collect();
        if let Some((k, v)) = values.iter().enumerate().find(|(_, v)| v.norm() < 1e-12) {
            return Err(GapwaveError::NearZeroOnCircle {
                angle: 2.0 * PI * k as f64 / n as f64,
                modulus: v.norm(),
            });
        }
        let steps: Vec<f64> = values.windows(2).map(|w| (w[1] * w[0].conj()).arg()).collect();
        if steps.iter().any(|d| d.abs() >= PI / 2.0) && n < (1 << 24) {
            n *= 2;
            continue;
        }
        let total: f64 = steps.iter().sum();
        let crossings = values[..n]
            .iter()
            .zip(values[1..].iter())
            .filter(|(a, b)| (a.re > 0.0) != (b.re > 0.0) && a.re != 0.0 && b.re != 0.0)
            .count();
        return Ok(WindingReport {
            turns: (total / (2.0 * PI)).round() as i64,
            imag_axis_crossings: crossings,
            samples: n,
        });
    }
}

/// `g = 2 Re(e^{-ibx} h)` for a signal with spectrum in `a ≤ |ξ| ≤ b`; its own
/// spectrum lies in `[-(b-a), b-a]`.
pub fn logan_g(s: &SampledSignal, a: f64, b: f64) -> Result<SampledSignal> {
    let band = GapSpec::band(a, b)?;
    let check = verify_gap(s, &band, 1e-8)?;
    if !check.pass {
        return invalid(format!(
            "signal is not band-limited to [{a}, {b}]: out-of-band energy ratio {:e}",
            check.in_gap_energy_ratio
        ));
    }
    let d = decompose(s);
    let values = d
        .h_real_axis
        .iter()
        .enumerate()
        .map(|(j, h)| 2.0 * (Complex64::cis(-b * s.grid.x(j)) * h).re)
        .collect();
    SampledSignal::new(s.grid, values)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AlternationDeviation {
    pub max_deviation: f64,
    pub nodes: usize,
}

/// `max |f(nπ/b) - (-1)^n g(nπ/b)|` over the nodes `nπ/b` that fall on grid points.
pub fn alternation_deviation(f: &SampledSignal, g: &SampledSignal, b: f64) -> Result<AlternationDeviation> {
    if f.grid != g.grid {
        return invalid("f and g must share a grid");
    }
    let grid = f.grid;
    let step = PI / b;
    let n_lo = (grid.x0 / step).ceil() as i64;
    let n_hi = (grid.last() / step).floor() as i64;
    let mut max_deviation = 0.0f64;
    let mut nodes = 0;
    for n in n_lo..=n_hi {
        let x = n as f64 * step;
        let pos = (x - grid.x0) / grid.dx;
        let j = pos.round();
        if (pos - j).abs() > 1e-6 || j < 0.0 || j as usize >= grid.n {
            continue;
        }
        let j = j as usize;
        let sign = if n.rem_euclid(2) == 0 { 1.0 } else { -1.0 };
        max_deviation = max_deviation.max((f.values[j] - sign * g.values[j]).abs());
        nodes += 1;
    }
    Ok(AlternationDeviation { max_deviation, nodes })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AlternationBound {
    pub lower_bound: i64,
    pub s_f: usize,
    pub s_g: usize,
    pub pass: bool,
}

/// `s(r, f) ≥ ⌊br/π⌋ - s(r, g)`.
pub fn alternation_bound(f: &SampledSignal, g: &SampledSignal, b: f64, r: f64) -> Result<AlternationBound> {
    let rf = sign_change_places(f, default_zero_tol(f), None)?;
    let rg = sign_change_places(g, default_zero_tol(g), None)?;
    let s_f = s_count(&rf, r)?;
    let s_g = s_count(&rg, r)?;
    let lower_bound = (b * r / PI).floor() as i64 - s_g as i64;
    Ok(AlternationBound {
        lower_bound,
        s_f,
        s_g,
        pass: s_f as i64 >= lower_bound,
    })
}
