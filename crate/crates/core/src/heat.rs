//! Heat-kernel smoothing `f_t = K_t ∗ f`, `K_t(x) = e^{-x²/t}/√(πt)`, and the
//! behaviour of sign changes along the flow.
//!
//! In Fourier terms `f̂_t(ξ) = e^{-ξ²t/4} f̂(ξ)`; `u(x, t) = f_t(x)` solves
//! `4 u_t = u_xx`.

use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::error::{invalid, GapwaveError, Result};
use crate::hardy::{decompose, j_functional};
use crate::numerics::simpson;
use crate::oscillation::{default_zero_tol, s_count, sign_change_places, zero_places};
use crate::signals::{spectrum_of, Grid, SampledSignal, TrigPoly};

pub fn heat_kernel(x: f64, t: f64) -> Result<f64> {
    if !(t > 0.0) {
        return invalid(format!("heat kernel needs t > 0, got {t}"));
    }
    Ok((-x * x / t).exp() / (PI * t).sqrt())
}

/// Spectral heat smoothing; exact for trigonometric polynomials sampled on a
/// whole number of periods.
pub fn heat_convolve(s: &SampledSignal, t: f64) -> Result<SampledSignal> {
    if !(t >= 0.0) {
        return invalid(format!("heat time must be nonnegative, got {t}"));
    }
    if t == 0.0 {
        return Ok(s.clone());
    }
    spectrum_of(s).map(|xi, a| a * (-xi * xi * t / 4.0).exp()).synthesize()
}

/// Direct quadrature of `K_t ∗ f` over the window (test oracle; `O(n²)`).
pub fn heat_convolve_quadrature(s: &SampledSignal, t: f64) -> Result<SampledSignal> {
    heat_kernel(0.0, t)?;
    let g = s.grid;
    let values = (0..g.n)
        .map(|i| {
            let xi = g.x(i);
            let row: Vec<f64> = (0..g.n)
                .map(|j| s.values[j] * (-(xi - g.x(j)).powi(2) / t).exp())
                .collect();
            simpson(&row, g.dx) / (PI * t).sqrt()
        })
        .collect();
    SampledSignal::new(g, values)
}

/// `∂_x f_t` by the spectral multiplier `iξ·e^{-ξ²t/4}`.
pub fn heat_derivative(s: &SampledSignal, t: f64) -> Result<SampledSignal> {
    if !(t >= 0.0) {
        return invalid(format!("heat time must be nonnegative, got {t}"));
    }
    spectrum_of(s)
        .map(|xi, a| a * num_complex::Complex64::new(0.0, xi) * (-xi * xi * t / 4.0).exp())
        .synthesize()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TemperatureField {
    pub grid: Grid,
    pub times: Vec<f64>,
    /// `values[i][j] = u(x_j, times[i])`.
    pub values: Vec<Vec<f64>>,
}

impl TemperatureField {
    pub fn from_fn(grid: Grid, times: &[f64], u: impl Fn(f64, f64) -> f64) -> Result<Self> {
        check_times(times)?;
        let values = times
            .iter()
            .map(|&t| grid.points().map(|x| u(x, t)).collect())
            .collect();
        Ok(Self {
            grid,
            times: times.to_vec(),
            values,
        })
    }

    pub fn from_signal(s: &SampledSignal, times: &[f64]) -> Result<Self> {
        check_times(times)?;
        let values = times
            .iter()
            .map(|&t| heat_convolve(s, t).map(|f| f.values))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            grid: s.grid,
            times: times.to_vec(),
            values,
        })
    }

    pub fn from_trig(p: &TrigPoly, grid: Grid, times: &[f64]) -> Result<Self> {
        check_times(times)?;
        let values = times
            .iter()
            .map(|&t| {
                let q = p.heat(t);
                grid.points().map(|x| q.eval(x)).collect()
            })
            .collect();
        Ok(Self {
            grid,
            times: times.to_vec(),
            values,
        })
    }
}

fn check_times(times: &[f64]) -> Result<()> {
    if times.first() != Some(&0.0) {
        return invalid("time grid must start at 0");
    }
    if times.windows(2).any(|w| w[1] <= w[0]) {
        return invalid("time grid must be strictly increasing");
    }
    Ok(())
}

/// `max |4 ∂_t u - ∂²_x u|` over interior lattice points, by centred
/// differences (non-uniform in `t`).
pub fn heat_residual(field: &TemperatureField) -> Result<f64> {
    let nt = field.times.len();
    let nx = field.grid.n;
    if nt < 3 || nx < 3 {
        return invalid("heat residual needs at least 3 time rows and 3 columns");
    }
    let dx = field.grid.dx;
    let mut worst = 0.0f64;
    for i in 1..nt - 1 {
        let (hm, hp) = (field.times[i] - field.times[i - 1], field.times[i + 1] - field.times[i]);
        let (prev, row, next) = (&field.values[i - 1], &field.values[i], &field.values[i + 1]);
        for j in 1..nx - 1 {
            let ut = ((next[j] - row[j]) * hm / hp + (row[j] - prev[j]) * hp / hm) / (hm + hp);
            let uxx = (row[j + 1] - 2.0 * row[j] + row[j - 1]) / (dx * dx);
            worst = worst.max((4.0 * ut - uxx).abs());
        }
    }
    Ok(worst)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MonotonicityReport {
    pub times: Vec<f64>,
    pub counts: Vec<usize>,
    pub violations: usize,
    pub pass: bool,
}

fn monotone(times: &[f64], counts: Vec<usize>) -> MonotonicityReport {
    let violations = counts.windows(2).filter(|w| w[1] > w[0]).count();
    MonotonicityReport {
        times: times.to_vec(),
        counts,
        violations,
        pass: violations == 0,
    }
}

/// `s(r, f_t)` along `t_grid`, asserted nonincreasing.
pub fn monotonicity_check(s: &SampledSignal, t_grid: &[f64], r: f64) -> Result<MonotonicityReport> {
    check_times(t_grid)?;
    let counts = t_grid
        .iter()
        .map(|&t| {
            let ft = heat_convolve(s, t)?;
            let rep = sign_change_places(&ft, default_zero_tol(&ft), None)?;
            s_count(&rep, r)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(monotone(t_grid, counts))
}

/// Sign changes of `p` with left endpoint in `(0, r]`, on `samples_per_unit`
/// samples per unit length with bisection refinement.
pub fn trig_sign_changes(p: &TrigPoly, r: f64, samples_per_unit: f64) -> Result<usize> {
    let n = ((r * samples_per_unit).ceil() as usize).max(16);
    let dx = r / n as f64;
    let grid = Grid::new(-2.0 * dx, dx, n + 5)?;
    let eval = |x: f64| p.eval(x);
    let s = SampledSignal::from_fn(grid, eval)?;
    let rep = sign_change_places(&s, default_zero_tol(&s), Some(&eval))?;
    s_count(&rep, r)
}

/// Exact-evaluator version of [`monotonicity_check`] for trigonometric
/// polynomials.
pub fn monotonicity_check_trig(
    p: &TrigPoly,
    t_grid: &[f64],
    r: f64,
    samples_per_unit: f64,
) -> Result<MonotonicityReport> {
    check_times(t_grid)?;
    let counts = t_grid
        .iter()
        .map(|&t| trig_sign_changes(&p.heat(t), r, samples_per_unit))
        .collect::<Result<Vec<_>>>()?;
    Ok(monotone(t_grid, counts))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimpleZeroTime {
    pub t: f64,
    pub zeros: Vec<f64>,
}

/// Smallest `T` in `{t0·2^{-k}}` (k = 40, …, 0) such that every zero place of
/// `f_T` in `(0, r]` is a point with `|∂_x f_T|` above
/// `1e-6·max|f_T|/period`, where the period is the window length.
pub fn simple_zero_time(s: &SampledSignal, t0: f64, r: f64) -> Result<SimpleZeroTime> {
    if !(t0 > 0.0) {
        return invalid(format!("t0 must be positive, got {t0}"));
    }
    let period = s.grid.length();
    for k in (0..=40).rev() {
        let t = t0 * 0.5f64.powi(k);
        let ft = heat_convolve(s, t)?;
        let dft = heat_derivative(s, t)?;
        let floor = 1e-6 * ft.max_abs() / period;
        let places = zero_places(&ft, default_zero_tol(&ft), None)?;
        let inside: Vec<_> = places.iter().filter(|p| p.left > 0.0 && p.left <= r).collect();
        let simple = inside.iter().all(|p| {
            if !p.is_point() {
                return false;
            }
            let pos = (p.left - s.grid.x0) / s.grid.dx;
            let j = (pos.floor() as usize).min(s.grid.n - 2);
            let frac = pos - j as f64;
            let slope = dft.values[j] * (1.0 - frac) + dft.values[j + 1] * frac;
            slope.abs() > floor
        });
        if simple {
            return Ok(SimpleZeroTime {
                t,
                zeros: inside.iter().map(|p| p.left).collect(),
            });
        }
    }
    Err(GapwaveError::NeedsRefinement(format!(
        "no time in (0, {t0}] leaves only simple zeros on (0, {r}]"
    )))
}

/// Zero positions of `f_t` in the window, per time.
pub fn zero_trajectory(s: &SampledSignal, t_grid: &[f64]) -> Result<Vec<(f64, Vec<f64>)>> {
    t_grid
        .iter()
        .map(|&t| {
            let ft = heat_convolve(s, t)?;
            let rep = sign_change_places(&ft, default_zero_tol(&ft), None)?;
            Ok((t, rep.places.iter().map(|p| 0.5 * (p.left + p.right)).collect()))
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LogPlusRow {
    pub t: f64,
    pub l1: f64,
    pub j: f64,
    /// `∫_{|x|≥r0} |log|h_t||/(1+x²)` over the window.
    pub tail: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LogPlusReport {
    pub rows: Vec<LogPlusRow>,
    pub l1_contracts: bool,
    pub j_max: f64,
    pub tail_max: f64,
}

/// Along the heat flow: `‖f_t‖₁ ≤ ‖f‖₁`, and `J(log|h_t|)` and its tail beyond
/// `r0`, reported per time so that uniformity in `t` can be inspected.
pub fn logplus_check(s: &SampledSignal, t_grid: &[f64], r0: f64) -> Result<LogPlusReport> {
    check_times(t_grid)?;
    let l1_0 = s.l1_norm();
    let g = s.grid;
    let rows = t_grid
        .iter()
        .map(|&t| {
            let ft = heat_convolve(s, t)?;
            let d = decompose(&ft);
            let u = SampledSignal::new(g, d.h_real_axis.iter().map(|h| h.norm().ln()).collect())?;
            let j = j_functional(&u, None).value;
            let tail_vals: Vec<f64> = u
                .values
                .iter()
                .enumerate()
                .map(|(k, v)| {
                    if g.x(k).abs() >= r0 {
                        v.abs() / (1.0 + g.x(k).powi(2))
                    } else {
                        0.0
                    }
                })
                .collect();
            Ok(LogPlusRow {
                t,
                l1: ft.l1_norm(),
                j,
                tail: simpson(&tail_vals, g.dx),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let l1_contracts = rows.iter().all(|r| r.l1 <= l1_0 * (1.0 + 1e-9));
    let j_max = rows.iter().map(|r| r.j).fold(0.0, f64::max);
    let tail_max = rows.iter().map(|r| r.tail).fold(0.0, f64::max);
    Ok(LogPlusReport {
        rows,
        l1_contracts,
        j_max,
        tail_max,
    })
}
