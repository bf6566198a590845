//! The compactly supported profile `u = -k(1-(x-1)²)²` on `[0, 2]`, the
//! distribution function `Q` of its Riesz charge, the density `q = Q'`, and the
//! constants `m = -min q`, `η = max_{x≥0} Q(x)/x`, `m' = m + q(0)`.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, GapwaveError, Result};
use crate::hardy::pv_hilbert;
use crate::numerics::scan_min;
use crate::signals::{Grid, SampledSignal};

/// Beyond this distance from the centre the tail series replaces the closed
/// form, whose leading terms cancel.
const SERIES_FROM: f64 = 4.0;

pub fn u0_profile(x: f64, k: f64) -> f64 {
    let y = x - 1.0;
    if y.abs() > 1.0 {
        0.0
    } else {
        -k * (1.0 - y * y).powi(2)
    }
}

/// `log|(y+1)/(y-1)|` weighted by `(y² - 1)`, with the limit `0` at `y = ±1`.
fn weighted_log(y: f64, power: i32) -> f64 {
    let w = y * y - 1.0;
    if w == 0.0 {
        0.0
    } else {
        w.powi(power) * ((y + 1.0) / (y - 1.0)).abs().ln()
    }
}

/// `16 Σ_{p≥2} coef(p)·y^{3-2p}/((2p+1)(2p-1)(2p-3))` for `|y| > 1`.
fn tail_series(y: f64, coef: impl Fn(i32) -> f64, shift: i32) -> f64 {
    let inv2 = 1.0 / (y * y);
    let mut pow = y.powi(shift - 4);
    let mut sum = 0.0;
    for p in 2..200 {
        let denom = ((2 * p + 1) * (2 * p - 1) * (2 * p - 3)) as f64;
        let term = coef(p) * pow / denom;
        sum += term;
        if term.abs() < 1e-18 * sum.abs() {
            break;
        }
        pow *= inv2;
    }
    16.0 * sum
}

#[allow(non_snake_case)]
pub fn Q_closed(x: f64, k: f64) -> f64 {
    let y = x - 1.0;
    if y.abs() >= SERIES_FROM {
        return k * tail_series(y, |_| 1.0, 3);
    }
    k * (weighted_log(y, 2) - 2.0 * y.powi(3) + 10.0 * y / 3.0)
}

pub fn q_closed(x: f64, k: f64) -> f64 {
    let y = x - 1.0;
    if y.abs() >= SERIES_FROM {
        return k * tail_series(y, |p| (3 - 2 * p) as f64, 2);
    }
    k * (4.0 * y * weighted_log(y, 1) - 8.0 * y * y + 16.0 / 3.0)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChargeProfile {
    pub k: f64,
    pub grid: Grid,
    #[serde(rename = "Q_values")]
    pub big_q: Vec<f64>,
    #[serde(rename = "q_values")]
    pub q: Vec<f64>,
    #[serde(rename = "u_values")]
    pub u: Vec<f64>,
}

impl ChargeProfile {
    pub fn new(k: f64, grid: Grid) -> Result<Self> {
        if !(k > 0.0) {
            return invalid(format!("k must be positive, got {k}"));
        }
        Ok(Self {
            k,
            grid,
            big_q: grid.points().map(|x| Q_closed(x, k)).collect(),
            q: grid.points().map(|x| q_closed(x, k)).collect(),
            u: grid.points().map(|x| u0_profile(x, k)).collect(),
        })
    }

    /// Largest relative discrepancy between `q` and a central difference of
    /// `Q` with step `h`, over samples at least `1e-3` away from `0` and `2`.
    /// Relative to `max|q|` on the grid.
    pub fn derivative_residual(&self, h: f64) -> f64 {
        let scale = self.q.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        self.grid
            .points()
            .zip(&self.q)
            .filter(|(x, _)| x.abs() >= 1e-3 && (x - 2.0).abs() >= 1e-3)
            .map(|(x, q)| {
                let fd = (Q_closed(x + h, self.k) - Q_closed(x - h, self.k)) / (2.0 * h);
                (fd - q).abs() / scale
            })
            .fold(0.0, f64::max)
    }

    /// Largest discrepancy, relative to `k`, between `u` and `H(Q)/π` on this
    /// profile's grid, where `H(Q)` is the principal value
    /// `(1/π) PV∫ Q(t)/(x-t) dt` computed over `[-half_width, half_width]`
    /// with step `dx`, shifted to vanish at the origin (the shift removes the
    /// `O(1/half_width)` truncation offset).
    ///
    /// The closed forms for `Q` and `u` carry a relative factor `π²`:
    /// `PV∫ Q(t)/(x-t) dt = π² u(x)`.
    pub fn hilbert_residual(&self, half_width: f64, dx: f64) -> Result<f64> {
        let h = hilbert_of_q(self.k, half_width, dx)?;
        let at0 = value_at(&h, 0.0)?;
        self.grid
            .points()
            .zip(&self.u)
            .map(|(x, u)| Ok(((value_at(&h, x)? - at0) / std::f64::consts::PI - u).abs() / self.k))
            .try_fold(0.0f64, |m, r: Result<f64>| Ok(m.max(r?)))
    }
}

/// `(1/π) PV∫ Q(t)/(x-t) dt` sampled on `[-half_width, half_width]`.
pub fn hilbert_of_q(k: f64, half_width: f64, dx: f64) -> Result<SampledSignal> {
    let n = (2.0 * half_width / dx).round() as usize + 1;
    let grid = Grid::closed(-half_width, half_width, n)?;
    let q = SampledSignal::from_fn(grid, |x| Q_closed(x, k))?;
    Ok(pv_hilbert(&q))
}

fn value_at(s: &SampledSignal, x: f64) -> Result<f64> {
    crate::numerics::interp_uniform(&s.values, s.grid.x0, s.grid.dx, x).ok_or(GapwaveError::OutOfRange {
        what: "x",
        value: x,
        lo: s.grid.x0,
        hi: s.grid.last(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Example2Constants {
    pub k: f64,
    pub m: f64,
    /// Minimizers of `q`.
    pub m_at: (f64, f64),
    pub eta: f64,
    /// Maximizer `x*` of `Q(x)/x` over `x > 0`.
    pub x_star: f64,
    /// `max_{x>0} (Q(x) - Q(0))/x`, the slope seen from a count starting at 0.
    pub eta_from_origin: f64,
    pub m_prime: f64,
    pub max_q: f64,
    pub k_threshold: f64,
    pub admissible: bool,
}

fn interior(x: f64, lo: f64, hi: f64, what: &str) -> Result<()> {
    let margin = 1e-6 * (hi - lo);
    if x - lo < margin || hi - x < margin {
        return Err(GapwaveError::Diagnostic(format!(
            "{what}: optimum {x} at the scan boundary [{lo}, {hi}]"
        )));
    }
    Ok(())
}

pub fn find_constants(k: f64) -> Result<Example2Constants> {
    if !(k > 0.0) {
        return invalid(format!("k must be positive, got {k}"));
    }
    let q = |x: f64| q_closed(x, k);
    let (left, right) = ((-1.0, 1.0), (1.0, 3.0));
    let (x1, v1) = scan_min(&q, left.0, left.1, 20_000);
    let (x2, v2) = scan_min(&q, right.0, right.1, 20_000);
    interior(x1, left.0, left.1, "min q")?;
    interior(x2, right.0, right.1, "min q")?;
    let m = -v1.min(v2);

    let neg_q = |x: f64| -q(x);
    let (_, nq) = scan_min(&neg_q, -4.0, 6.0, 20_000);
    let max_q = -nq;

    let ratio = |x: f64| -Q_closed(x, k) / x;
    let (x_star, r) = scan_min(&ratio, 1e-3, 20.0, 40_000);
    interior(x_star, 1e-3, 20.0, "max Q/x")?;
    let q0 = Q_closed(0.0, k);
    let from_origin = |x: f64| -(Q_closed(x, k) - q0) / x;
    let (x0, r0) = scan_min(&from_origin, 1e-3, 20.0, 40_000);
    interior(x0, 1e-3, 20.0, "max (Q - Q(0))/x")?;

    let k_threshold = k / (m + max_q);
    Ok(Example2Constants {
        k,
        m,
        m_at: (x1, x2),
        eta: -r,
        x_star,
        eta_from_origin: -r0,
        m_prime: m + q(0.0),
        max_q,
        k_threshold,
        admissible: k < k_threshold,
    })
}

/// `Q₁(x) = Q(x) + m x`.
pub fn q1_closed(x: f64, c: &Example2Constants) -> f64 {
    Q_closed(x, c.k) + c.m * x
}
