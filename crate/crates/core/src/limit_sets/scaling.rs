//! The rescalings `(A_t u)(z) = u(tz)/t` of subharmonic functions and
//! `(B_t μ)(E) = μ(tE)/t` of measures, intertwined by the Riesz charge
//! `(2π)^{-1} Δ`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::error::{invalid, Result};
use crate::numerics::{interp_uniform, simpson};
use crate::signals::{Grid, SampledSignal};

use super::closed_forms::u0_profile;

/// A function on `C`, harmonic off the real line, with Riesz charge on `R`.
pub trait Subharmonic {
    fn eval(&self, z: Complex64) -> f64;
}

/// `c·|Im z|`; its charge is `(c/π)·dx`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Cone {
    pub c: f64,
}

impl Subharmonic for Cone {
    fn eval(&self, z: Complex64) -> f64 {
        self.c * z.im.abs()
    }
}

/// Poisson extension of `u0_profile(·, k)` plus the cone `π m |Im z|`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChargePotential {
    pub k: f64,
    pub m: f64,
}

impl ChargePotential {
    /// `∫_0^2 p(s)/(s - z) ds` for the quartic `p = u0_profile`, `Im z > 0`.
    fn cauchy(&self, z: Complex64) -> Complex64 {
        let c = [0.0, 0.0, -4.0 * self.k, 4.0 * self.k, -self.k];
        let p = |w: Complex64| c.iter().rev().fold(Complex64::default(), |acc, &cj| acc * w + cj);
        let logs = (2.0 - z).ln() - (-z).ln();
        let mut poly = Complex64::default();
        for (j, &cj) in c.iter().enumerate() {
            for i in 0..j {
                poly += cj * z.powu((j - 1 - i) as u32) * 2f64.powi(i as i32 + 1) / (i as f64 + 1.0);
            }
        }
        p(z) * logs + poly
    }
}

impl Subharmonic for ChargePotential {
    fn eval(&self, z: Complex64) -> f64 {
        let cone = PI * self.m * z.im.abs();
        if z.im == 0.0 {
            return u0_profile(z.re, self.k);
        }
        let w = if z.im > 0.0 { z } else { z.conj() };
        self.cauchy(w).im / PI + cone
    }
}

/// `A_t u`.
pub struct Scaled<'a> {
    pub base: &'a dyn Subharmonic,
    pub t: f64,
}

impl Subharmonic for Scaled<'_> {
    fn eval(&self, z: Complex64) -> f64 {
        self.base.eval(z * self.t) / self.t
    }
}

/// Density of the Riesz charge at `x ∈ R`: the jump of `∂_y u` across the
/// axis over `2π`, from symmetric transversal differences with step `delta`,
/// Richardson-extrapolated.
pub fn riesz_density(u: &dyn Subharmonic, x: f64, delta: f64) -> f64 {
    let at = |d: f64| {
        let u0 = u.eval(Complex64::new(x, 0.0));
        (u.eval(Complex64::new(x, d)) + u.eval(Complex64::new(x, -d)) - 2.0 * u0) / (2.0 * PI * d)
    };
    2.0 * at(0.5 * delta) - at(delta)
}

/// Charge of `[a, b]` by Simpson quadrature of [`riesz_density`].
pub fn interval_mass(u: &dyn Subharmonic, a: f64, b: f64, delta: f64, samples: usize) -> f64 {
    let n = samples.max(3) | 1;
    let dx = (b - a) / (n - 1) as f64;
    let d: Vec<f64> = (0..n).map(|i| riesz_density(u, a + i as f64 * dx, delta)).collect();
    simpson(&d, dx)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScaledProfile {
    pub signal: SampledSignal,
    /// Nonzero source data fell outside the target window.
    pub truncated: bool,
}

fn check_t(t: f64) -> Result<()> {
    if !(t > 0.0 && t.is_finite()) {
        return invalid(format!("scaling factor must be positive, got {t}"));
    }
    Ok(())
}

/// `A_t` on boundary data: `x ↦ u(tx)/t` on the same grid, linear
/// interpolation, zero where `tx` leaves the window.
pub fn scale_u(u: &SampledSignal, t: f64) -> Result<ScaledProfile> {
    check_t(t)?;
    if t == 1.0 {
        return Ok(ScaledProfile {
            signal: u.clone(),
            truncated: false,
        });
    }
    let g = u.grid;
    let values = g
        .points()
        .map(|x| interp_uniform(&u.values, g.x0, g.dx, t * x).map_or(0.0, |v| v / t))
        .collect();
    let tol = 1e-12 * u.max_abs();
    let truncated = g
        .points()
        .zip(&u.values)
        .any(|(x, v)| v.abs() > tol && !(g.x0..=g.last()).contains(&(x / t)));
    Ok(ScaledProfile {
        signal: SampledSignal::new(g, values)?,
        truncated,
    })
}

/// A measure on `R` through its distribution function `F`, `F(x0) = 0`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Measure {
    pub grid: Grid,
    pub cumulative: Vec<f64>,
}

impl Measure {
    pub fn from_density(density: &SampledSignal) -> Self {
        let g = density.grid;
        let mut cumulative = vec![0.0; g.n];
        for j in 1..g.n {
            cumulative[j] = cumulative[j - 1] + 0.5 * g.dx * (density.values[j - 1] + density.values[j]);
        }
        Self { grid: g, cumulative }
    }

    pub fn lebesgue(grid: Grid) -> Self {
        Self {
            grid,
            cumulative: grid.points().map(|x| x - grid.x0).collect(),
        }
    }

    pub fn mass(&self, a: f64, b: f64) -> Option<f64> {
        let g = self.grid;
        Some(interp_uniform(&self.cumulative, g.x0, g.dx, b)? - interp_uniform(&self.cumulative, g.x0, g.dx, a)?)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScaledMeasure {
    pub measure: Measure,
    pub truncated: bool,
}

/// `B_t` on the same grid. The measure is taken to vanish beyond the window;
/// mass that `B_t` pushes out of the window is dropped and the result flagged.
pub fn scale_mu(mu: &Measure, t: f64) -> Result<ScaledMeasure> {
    check_t(t)?;
    let g = mu.grid;
    let (lo, hi) = (g.x0, g.last());
    let at = |x: f64| {
        let y = (t * x).clamp(lo, hi);
        interp_uniform(&mu.cumulative, g.x0, g.dx, y).unwrap_or(0.0)
    };
    let base = at(lo);
    let cumulative = g.points().map(|x| (at(x) - base) / t).collect();
    let total = mu.cumulative.last().copied().unwrap_or(0.0) - mu.cumulative[0];
    let kept = interp_uniform(&mu.cumulative, g.x0, g.dx, (t * hi).clamp(lo, hi)).unwrap_or(0.0)
        - interp_uniform(&mu.cumulative, g.x0, g.dx, (t * lo).clamp(lo, hi)).unwrap_or(0.0);
    let truncated = (total - kept).abs() > 1e-12 * total.abs().max(1e-300);
    Ok(ScaledMeasure {
        measure: Measure { grid: g, cumulative },
        truncated,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SplitReport {
    pub t: f64,
    pub cells: usize,
    /// `max |charge(A_t u)(I) - (B_t charge(u))(I)|` over the cells `I`.
    pub max_discrepancy: f64,
    pub total_mass: f64,
}

impl SplitReport {
    pub fn relative(&self) -> f64 {
        if self.total_mass == 0.0 {
            self.max_discrepancy
        } else {
            self.max_discrepancy / self.total_mass.abs()
        }
    }
}

/// Compares the charge of `A_t u` with `B_t` of the charge of `u` on `cells`
/// equal intervals of `[lo, hi]`.
pub fn split_check(u: &dyn Subharmonic, t: f64, lo: f64, hi: f64, cells: usize) -> Result<SplitReport> {
    check_t(t)?;
    if !(hi > lo) || cells == 0 {
        return invalid("split check needs lo < hi and at least one cell");
    }
    const DELTA: f64 = 1e-3;
    const SAMPLES: usize = 201;
    let scaled = Scaled { base: u, t };
    let w = (hi - lo) / cells as f64;
    let mut worst = 0.0f64;
    let mut total = 0.0;
    for c in 0..cells {
        let (a, b) = (lo + c as f64 * w, lo + (c + 1) as f64 * w);
        let lhs = interval_mass(&scaled, a, b, DELTA, SAMPLES);
        let rhs = interval_mass(u, t * a, t * b, DELTA, SAMPLES) / t;
        worst = worst.max((lhs - rhs).abs());
        total += rhs.abs();
    }
    Ok(SplitReport {
        t,
        cells,
        max_discrepancy: worst,
        total_mass: total,
    })
}

/// Snapshots `A_t u` of sampled boundary data along a list of scales.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScalingOrbit {
    pub base: SampledSignal,
    pub t_values: Vec<f64>,
    pub profiles: Vec<ScaledProfile>,
}

impl ScalingOrbit {
    pub fn new(base: SampledSignal, t_values: &[f64]) -> Result<Self> {
        let profiles = t_values.iter().map(|&t| scale_u(&base, t)).collect::<Result<_>>()?;
        Ok(Self {
            base,
            t_values: t_values.to_vec(),
            profiles,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::limit_sets::closed_forms::q_closed;

    #[test]
    fn identity_and_cone() {
        let g = Grid::closed(-4.0, 6.0, 1001).unwrap();
        let u = SampledSignal::from_fn(g, |x| u0_profile(x, 0.3)).unwrap();
        let s = scale_u(&u, 1.0).unwrap();
        assert_eq!(s.signal, u);
        assert!(!s.truncated);
        assert!(scale_u(&u, 0.1).unwrap().truncated);
        assert!(!scale_u(&u, 2.0).unwrap().truncated);
        assert!(scale_u(&u, 0.0).is_err());

        let cone = Cone { c: PI * 0.4 };
        for t in [0.5, 3.0, 17.0] {
            let z = Complex64::new(1.3, -0.7);
            assert!((Scaled { base: &cone, t }.eval(z) - cone.eval(z)).abs() < 1e-15);
        }
        assert!((interval_mass(&cone, 0.0, 1.0, 1e-3, 11) - 0.4).abs() < 1e-12);
    }

    #[test]
    fn lebesgue_is_fixed() {
        let g = Grid::closed(-10.0, 10.0, 2001).unwrap();
        let mu = Measure::lebesgue(g);
        for t in [0.5, 2.0] {
            let s = scale_mu(&mu, t).unwrap();
            assert_eq!(s.truncated, t < 1.0);
            for (a, b) in [(-3.0, 1.0), (0.0, 2.5)] {
                assert!((s.measure.mass(a, b).unwrap() - (b - a)).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn poisson_extension_boundary_values() {
        let u = ChargePotential { k: 1.0, m: 0.0 };
        for x in [-1.0, 0.3, 1.0, 1.7, 3.0] {
            assert!(
                (u.eval(Complex64::new(x, 1e-9)) - u0_profile(x, 1.0)).abs() < 1e-6,
                "{x}"
            );
        }
        assert!(u.eval(Complex64::new(1.0, 1e3)).abs() < 1e-3);
    }

    #[test]
    fn charge_density_is_q_over_pi_squared() {
        let u = ChargePotential { k: 1.0, m: 0.0 };
        for x in [-2.0, 0.5, 1.0, 1.5, 3.5] {
            let d = riesz_density(&u, x, 1e-4);
            assert!((d - q_closed(x, 1.0) / (PI * PI)).abs() < 1e-5, "{x}: {d}");
        }
    }

    #[test]
    fn laplacian_intertwines_scalings() {
        let u1 = ChargePotential { k: 0.1, m: 0.3257 };
        let r = split_check(&u1, 1.0, -1.0, 3.0, 8).unwrap();
        assert_eq!(r.max_discrepancy, 0.0);
        let r = split_check(&u1, 2.0, -1.0, 3.0, 8).unwrap();
        assert!(r.relative() < 1e-6, "{}", r.relative());
    }
}
