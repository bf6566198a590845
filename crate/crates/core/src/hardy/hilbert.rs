//! Conjugate functions on the line, the weighted norm `J(u) = ∫ |u|/(1+x²)`,
//! Kolmogorov's weak-type inequality and the near/far split of `u`.
//!
//! The transform is `v(x) = (1/π) ∫ (1/(x-t) + t/(t²+1)) u(t) dt`. The principal
//! value is computed in subtraction form,
//! `PV∫ u/(x-t) = ∫ (u(t)-u(x))/(x-t) dt + u(x)·ln((x-lo)/(hi-x))`,
//! with the midpoint rule on cells centred at the samples; the discrete
//! convolution with `1/(i-j)` runs through an FFT.

use num_complex::Complex64;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::error::{invalid, GapwaveError, Result};
use crate::numerics::simpson;
use crate::signals::{Grid, SampledSignal};

/// `Σ_{j≠i} u_j/(i-j)` for every `i`, by zero-padded FFT convolution.
fn discrete_cauchy(u: &[f64]) -> Vec<f64> {
    let n = u.len();
    let size = (2 * n).next_power_of_two();
    let mut a: Vec<Complex64> = u.iter().map(|&v| Complex64::new(v, 0.0)).collect();
    a.resize(size, Complex64::default());
    let mut k = vec![Complex64::default(); size];
    for m in 1..n {
        k[m] = Complex64::new(1.0 / m as f64, 0.0);
        k[size - m] = Complex64::new(-1.0 / m as f64, 0.0);
    }
    let mut planner = FftPlanner::new();
    let fwd = planner.plan_fft_forward(size);
    fwd.process(&mut a);
    fwd.process(&mut k);
    for (x, y) in a.iter_mut().zip(&k) {
        *x *= y;
    }
    planner.plan_fft_inverse(size).process(&mut a);
    a[..n].iter().map(|c| c.re / size as f64).collect()
}

fn harmonic_numbers(n: usize) -> Vec<f64> {
    let mut h = vec![0.0; n + 1];
    for m in 1..=n {
        h[m] = h[m - 1] + 1.0 / m as f64;
    }
    h
}

/// `(1/π) PV∫ u(t)/(x-t) dt` over the cells of the grid, without the
/// normalization term.
pub fn pv_hilbert(u: &SampledSignal) -> SampledSignal {
    let n = u.len();
    let dx = u.grid.dx;
    let vals = &u.values;
    let conv = discrete_cauchy(vals);
    let harm = harmonic_numbers(n);
    let out = (0..n)
        .map(|i| {
            let deriv = if i == 0 {
                (vals[1] - vals[0]) / dx
            } else if i == n - 1 {
                (vals[n - 1] - vals[n - 2]) / dx
            } else {
                (vals[i + 1] - vals[i - 1]) / (2.0 * dx)
            };
            let d_i = harm[i] - harm[n - 1 - i];
            let log_term = ((i as f64 + 0.5) / ((n - 1 - i) as f64 + 0.5)).ln();
            (conv[i] - vals[i] * d_i - dx * deriv + vals[i] * log_term) / PI
        })
        .collect();
    SampledSignal {
        grid: u.grid,
        values: out,
    }
}

/// The normalized conjugate function `v = H(u)`.
pub fn hilbert_transform(u: &SampledSignal) -> SampledSignal {
    let mut v = pv_hilbert(u);
    let weighted: Vec<f64> = u
        .values
        .iter()
        .enumerate()
        .map(|(j, &val)| {
            let t = u.grid.x(j);
            t * val / (t * t + 1.0)
        })
        .collect();
    let c = simpson(&weighted, u.grid.dx) / PI;
    v.values.iter_mut().for_each(|x| *x += c);
    v
}

/// Periodic conjugate function by the multiplier `-i·sign(ξ)`, after
/// zero-padding the window `pad` times on each side. Matches [`pv_hilbert`]
/// for compactly supported inputs as the padding grows.
pub fn spectral_hilbert(u: &SampledSignal, pad: usize) -> Result<SampledSignal> {
    let n = u.len();
    let total = n * (2 * pad + 1);
    let mut buf = vec![Complex64::default(); total];
    for (j, &v) in u.values.iter().enumerate() {
        buf[pad * n + j] = Complex64::new(v, 0.0);
    }
    let mut planner = FftPlanner::new();
    planner.plan_fft_forward(total).process(&mut buf);
    for (k, c) in buf.iter_mut().enumerate() {
        let signed = if 2 * k < total {
            k as i64
        } else {
            k as i64 - total as i64
        };
        *c *= match signed.cmp(&0) {
            _ if total.is_multiple_of(2) && 2 * k == total => Complex64::default(),
            std::cmp::Ordering::Greater => Complex64::new(0.0, -1.0),
            std::cmp::Ordering::Less => Complex64::new(0.0, 1.0),
            std::cmp::Ordering::Equal => Complex64::default(),
        };
    }
    planner.plan_fft_inverse(total).process(&mut buf);
    let values = buf[pad * n..pad * n + n].iter().map(|c| c.re / total as f64).collect();
    SampledSignal::new(u.grid, values)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct JReport {
    pub value: f64,
    /// Bound on `∫ |u|/(1+x²)` outside the window.
    pub tail_bound: f64,
    /// Whether the tail bound is below `1e-6`.
    pub controlled: bool,
}

fn outside_weight(grid: &Grid) -> f64 {
    (PI / 2.0 - grid.last().atan()) + (PI / 2.0 + grid.x0.atan())
}

/// `J(u)` by quadrature over the window. The tail beyond the window is bounded
/// by `outside_sup·∫_{outside} dx/(1+x²)`; when `outside_sup` is `None` it is
/// estimated from the outer tenth of the samples on each side.
pub fn j_functional(u: &SampledSignal, outside_sup: Option<f64>) -> JReport {
    let g = u.grid;
    let weighted: Vec<f64> = u
        .values
        .iter()
        .enumerate()
        .map(|(j, v)| v.abs() / (1.0 + g.x(j) * g.x(j)))
        .collect();
    let value = simpson(&weighted, g.dx);
    let sup = outside_sup.unwrap_or_else(|| {
        let edge = (g.n / 10).max(1);
        u.values[..edge]
            .iter()
            .chain(&u.values[g.n - edge..])
            .fold(0.0f64, |m, v| m.max(v.abs()))
    });
    let tail_bound = sup * outside_weight(&g);
    JReport {
        value,
        tail_bound,
        controlled: tail_bound < 1e-6,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Split {
    pub r0: f64,
    pub epsilon: f64,
    /// Weighted tail `∫_{|x|>r0} |u|/(1+x²)`, including the modelled part
    /// beyond the window.
    pub tail: f64,
    pub u0: Vec<f64>,
    pub u1: Vec<f64>,
    pub v0: Vec<f64>,
    pub v1: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HarmonicPair {
    pub grid: Grid,
    pub u: Vec<f64>,
    pub v: Vec<f64>,
    pub split: Option<Split>,
}

impl HarmonicPair {
    pub fn from_u(u: &SampledSignal) -> Self {
        let v = hilbert_transform(u);
        Self {
            grid: u.grid,
            u: u.values.clone(),
            v: v.values,
            split: None,
        }
    }

    /// Shifts `v` by a constant so that `v(x*) = target`, where `x*` is the
    /// sample nearest to the origin.
    pub fn with_v_at_origin(mut self, target: f64) -> Self {
        let j = ((-self.grid.x0) / self.grid.dx)
            .round()
            .clamp(0.0, (self.grid.n - 1) as f64) as usize;
        let shift = target - self.v[j];
        self.v.iter_mut().for_each(|x| *x += shift);
        self
    }

    pub fn u_signal(&self) -> SampledSignal {
        SampledSignal {
            grid: self.grid,
            values: self.u.clone(),
        }
    }
}

/// Smallest sample radius `r0` with `∫_{|x|>r0} |u|/(1+x²) < ε²/8`, and the
/// induced split `u = u0 + u1`, `u0 = u·1_{[-r0, r0]}`.
///
/// `outside_sup` bounds `|u|` beyond the window (`0` for compact support); the
/// corresponding tail is added analytically.
pub fn tail_split(u: &SampledSignal, epsilon: f64, outside_sup: f64) -> Result<HarmonicPair> {
    if !(epsilon > 0.0) || !(outside_sup >= 0.0) {
        return invalid("tail split needs ε > 0 and outside_sup ≥ 0");
    }
    let g = u.grid;
    let target = epsilon * epsilon / 8.0;
    let beyond = outside_sup * outside_weight(&g);
    if beyond >= target {
        return Err(GapwaveError::NoSplit {
            target,
            achievable: beyond,
        });
    }
    let mut order: Vec<usize> = (0..g.n).collect();
    order.sort_by(|&i, &j| g.x(i).abs().total_cmp(&g.x(j).abs()));
    let weight = |j: usize| u.values[j].abs() / (1.0 + g.x(j) * g.x(j)) * g.dx;

    // Walk radii from the outside in; `tail` is the mass strictly beyond `r`.
    let mut tail = beyond;
    let mut r0 = g.x(order[g.n - 1]).abs();
    let mut r0_tail = beyond;
    let mut k = g.n;
    while k > 0 {
        let r = g.x(order[k - 1]).abs();
        if tail >= target {
            break;
        }
        r0 = r;
        r0_tail = tail;
        while k > 0 && g.x(order[k - 1]).abs() == r {
            tail += weight(order[k - 1]);
            k -= 1;
        }
    }

    let (u0, u1): (Vec<f64>, Vec<f64>) = u
        .values
        .iter()
        .enumerate()
        .map(|(j, &v)| if g.x(j).abs() <= r0 { (v, 0.0) } else { (0.0, v) })
        .unzip();
    let v0 = hilbert_transform(&SampledSignal {
        grid: g,
        values: u0.clone(),
    })
    .values;
    let v1 = hilbert_transform(&SampledSignal {
        grid: g,
        values: u1.clone(),
    })
    .values;
    let mut pair = HarmonicPair::from_u(u);
    pair.split = Some(Split {
        r0,
        epsilon,
        tail: r0_tail,
        u0,
        u1,
        v0,
        v1,
    });
    Ok(pair)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KolmogorovRow {
    pub lambda: f64,
    /// `∫_{|v|>λ} dx/(1+x²)` over the window.
    pub lhs: f64,
    /// `(4/λ)·J(u)`.
    pub rhs: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KolmogorovReport {
    pub j: f64,
    pub rows: Vec<KolmogorovRow>,
    pub violations: usize,
}

pub fn kolmogorov_check(pair: &HarmonicPair, lambdas: &[f64]) -> Result<KolmogorovReport> {
    if lambdas.iter().any(|&l| !(l > 0.0)) {
        return invalid("λ must be positive");
    }
    let g = pair.grid;
    let j = j_functional(&pair.u_signal(), None).value;
    let rows: Vec<KolmogorovRow> = lambdas
        .iter()
        .map(|&lambda| {
            let lhs: f64 = pair
                .v
                .iter()
                .enumerate()
                .filter(|(_, v)| v.abs() > lambda)
                .map(|(i, _)| g.dx / (1.0 + g.x(i) * g.x(i)))
                .sum();
            let rhs = 4.0 / lambda * j;
            KolmogorovRow {
                lambda,
                lhs,
                rhs,
                pass: lhs <= rhs,
            }
        })
        .collect();
    let violations = rows.iter().filter(|r| !r.pass).count();
    Ok(KolmogorovReport { j, rows, violations })
}
