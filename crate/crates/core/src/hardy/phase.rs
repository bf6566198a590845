//! The phase curve `γ`: the graph of `φ = arg h` on the real axis with a
//! vertical segment of length `π` (downwards) at each simple real zero of `h`.
//!
//! `f = 2 Re h` vanishes exactly where `h` is purely imaginary, that is where
//! `γ` meets one of the lines `y = π/2 + kπ`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use super::AnalyticDecomposition;
use crate::error::{invalid, GapwaveError, Result};
use crate::numerics::{bisect_sign_change, golden_min};
use crate::signals::Grid;

const MAX_DEPTH: u32 = 48;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Lattice {
    pub offset: f64,
    pub spacing: f64,
}

impl Default for Lattice {
    fn default() -> Self {
        Self {
            offset: PI / 2.0,
            spacing: PI,
        }
    }
}

impl Lattice {
    /// Index of the lattice band containing `phi`.
    pub fn band(&self, phi: f64) -> i64 {
        ((phi - self.offset) / self.spacing).floor() as i64
    }

    pub fn on_line(&self, phi: f64, tol: f64) -> bool {
        let r = (phi - self.offset) / self.spacing;
        (r - r.round()).abs() * self.spacing < tol
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhaseJump {
    pub x: f64,
    pub before: f64,
    pub after: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PhaseCurve {
    /// Graph samples; `phi` is continuous between jumps.
    pub xs: Vec<f64>,
    pub phi: Vec<f64>,
    pub jumps: Vec<PhaseJump>,
    /// Abscissae at which `γ` crosses a lattice line, increasing.
    pub crossings: Vec<f64>,
    /// Samples lying on a lattice line to within `1e-12` (tangential touches
    /// are counted once and flagged here).
    pub touches: usize,
}

struct Tracker<'a> {
    h: &'a dyn Fn(f64) -> Complex64,
    lattice: Lattice,
    phi: f64,
    curve: PhaseCurve,
}

impl Tracker<'_> {
    fn record_crossing(&mut self, a: f64, b: f64, phi_a: f64, phi_b: f64) {
        if self.lattice.band(phi_a) == self.lattice.band(phi_b) {
            return;
        }
        let re = |x: f64| (self.h)(x).re;
        let x = if (re(a) > 0.0) != (re(b) > 0.0) {
            bisect_sign_change(&re, a, b)
        } else {
            let line = self.lattice.offset + self.lattice.spacing * self.lattice.band(phi_a.max(phi_b)) as f64;
            a + (b - a) * (line - phi_a) / (phi_b - phi_a)
        };
        self.curve.crossings.push(x);
    }

    fn step(&mut self, a: f64, b: f64, ha: Complex64, hb: Complex64, depth: u32) {
        let d = (hb * ha.conj()).arg();
        if d.abs() < PI / 2.0 {
            let (pa, pb) = (self.phi, self.phi + d);
            self.record_crossing(a, b, pa, pb);
            self.phi = pb;
            return;
        }
        if depth == MAX_DEPTH || b - a <= 1e-13 * (1.0 + a.abs()) {
            // A real zero of h inside [a, b]: vertical segment of length -π.
            let x = 0.5 * (a + b);
            let before = self.phi;
            let after = before - PI;
            self.curve.jumps.push(PhaseJump { x, before, after });
            if self.lattice.band(before) != self.lattice.band(after) {
                self.curve.crossings.push(x);
            }
            let rest = (d + PI + PI).rem_euclid(2.0 * PI) - PI;
            self.phi = after + rest;
            return;
        }
        let mid = 0.5 * (a + b);
        let hm = (self.h)(mid);
        self.step(a, mid, ha, hm, depth + 1);
        self.step(mid, b, hm, hb, depth + 1);
    }
}

/// Phase curve of an arbitrary evaluator `h` sampled on `grid`, with `dh` its
/// derivative. Minima of `|h|` below `zero_tol·max|h|` must be simple zeros;
/// otherwise the signal needs smoothing first.
pub fn phase_curve_fn(
    h: &dyn Fn(f64) -> Complex64,
    dh: &dyn Fn(f64) -> Complex64,
    grid: Grid,
    samples: Option<&[Complex64]>,
    zero_tol: f64,
) -> Result<PhaseCurve> {
    let values: Vec<Complex64> = match samples {
        Some(v) if v.len() == grid.n => v.to_vec(),
        Some(_) => return invalid("sample count does not match grid"),
        None => grid.points().map(h).collect(),
    };
    let scale = values.iter().fold(0.0f64, |m, c| m.max(c.norm()));
    if scale == 0.0 {
        return invalid("h vanishes identically");
    }

    // Non-simple zeros: a minimum of |h| that reaches zero with |h'| ≈ 0.
    let length_unit = grid.length();
    let abs2 = |x: f64| h(x).norm_sqr();
    for j in 1..grid.n - 1 {
        let m = values[j].norm();
        if m <= values[j - 1].norm() && m <= values[j + 1].norm() {
            let (xm, _) = golden_min(&abs2, grid.x(j - 1), grid.x(j + 1), 1e-14 * (1.0 + grid.x(j).abs()));
            if h(xm).norm() <= zero_tol * scale && dh(xm).norm() < 1e-6 * scale / length_unit.min(1.0) {
                return Err(GapwaveError::NeedsHeating { x: xm });
            }
        }
    }

    let lattice = Lattice::default();
    let mut t = Tracker {
        h,
        lattice,
        phi: values[0].arg(),
        curve: PhaseCurve {
            xs: vec![grid.x(0)],
            phi: vec![values[0].arg()],
            jumps: Vec::new(),
            crossings: Vec::new(),
            touches: 0,
        },
    };
    for j in 0..grid.n - 1 {
        t.step(grid.x(j), grid.x(j + 1), values[j], values[j + 1], 0);
        t.curve.xs.push(grid.x(j + 1));
        t.curve.phi.push(t.phi);
    }
    t.curve.touches = t.curve.phi.iter().filter(|&&p| lattice.on_line(p, 1e-12)).count();
    Ok(t.curve)
}

/// Phase curve of `h` from a decomposition, on its grid.
pub fn phase_curve(d: &AnalyticDecomposition, zero_tol: f64) -> Result<PhaseCurve> {
    let h = |x: f64| d.eval(Complex64::new(x, 0.0));
    let dh = |x: f64| d.eval_derivative(Complex64::new(x, 0.0));
    phase_curve_fn(&h, &dh, d.grid, Some(&d.h_real_axis), zero_tol)
}

/// Crossings of `γ` with the lattice lines over `x ∈ (0, r]`.
pub fn lattice_crossings(c: &PhaseCurve, r: f64) -> Result<usize> {
    let (lo, hi) = (c.xs[0], c.xs[c.xs.len() - 1]);
    if lo > 0.0 || r > hi || r < 0.0 {
        return Err(GapwaveError::OutOfRange {
            what: "r",
            value: r,
            lo: lo.max(0.0),
            hi,
        });
    }
    Ok(c.crossings.iter().filter(|&&x| x > 0.0 && x <= r).count())
}

/// Finite Blaschke product `Π (1 - z/z_n)/(1 - z/z̄_n)` over upper half-plane
/// zeros.
pub fn blaschke(zeros: &[Complex64], z: Complex64) -> Result<Complex64> {
    if let Some(bad) = zeros.iter().find(|w| !(w.im > 0.0)) {
        return invalid(format!("Blaschke zero {bad} is not in the upper half-plane"));
    }
    Ok(zeros.iter().map(|w| (1.0 - z / w) / (1.0 - z / w.conj())).product())
}

/// `(a - ε) r/π - J(2r0 + 1/r0)/π - 1`.
pub fn quant_bound(a: f64, epsilon: f64, r0: f64, j: f64, r: f64) -> Result<f64> {
    if !(epsilon > 0.0 && epsilon < 0.5) {
        return invalid(format!("ε = {epsilon} outside (0, 1/2)"));
    }
    if !(r0 > 1.0) {
        return invalid(format!("r0 = {r0} must exceed 1"));
    }
    if !(r > 2.0 * r0) {
        return invalid(format!("r = {r} must exceed 2·r0 = {}", 2.0 * r0));
    }
    if !(a > 0.0 && j >= 0.0) {
        return invalid("need a > 0 and J ≥ 0");
    }
    Ok((a - epsilon) * r / PI - j * (2.0 * r0 + 1.0 / r0) / PI - 1.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn linear_phase_has_no_jumps() {
        let g = Grid::closed(-1.0, 101.0, 20001).unwrap();
        let h = |x: f64| Complex64::cis(3.0 * x) / 2.0;
        let dh = |x: f64| Complex64::new(0.0, 1.5) * Complex64::cis(3.0 * x);
        let c = phase_curve_fn(&h, &dh, g, None, 1e-6).unwrap();
        assert!(c.jumps.is_empty());
        let j = g.n / 2;
        assert!((c.phi[j] - c.phi[0] - 3.0 * (g.x(j) - g.x(0))).abs() < 1e-9);
        assert_eq!(lattice_crossings(&c, 100.0).unwrap(), 95);
    }

    #[test]
    fn simple_real_zero_gives_one_jump() {
        let g = Grid::closed(0.0, 10.0, 1001).unwrap();
        let h = |x: f64| (x - 5.0) * Complex64::cis(2.0 * x);
        let dh = |x: f64| Complex64::cis(2.0 * x) * (1.0 + Complex64::new(0.0, 2.0) * (x - 5.0));
        let c = phase_curve_fn(&h, &dh, g, None, 1e-6).unwrap();
        assert_eq!(c.jumps.len(), 1);
        assert!((c.jumps[0].x - 5.0).abs() < 1e-9);
        assert!((c.jumps[0].after - c.jumps[0].before + PI).abs() < 1e-15);
    }

    #[test]
    fn double_zero_needs_heating() {
        let g = Grid::closed(0.0, 10.0, 1001).unwrap();
        let h = |x: f64| (x - 5.0).powi(2) * Complex64::cis(2.0 * x);
        let dh = |x: f64| Complex64::cis(2.0 * x) * (2.0 * (x - 5.0) + Complex64::new(0.0, 2.0) * (x - 5.0).powi(2));
        assert!(matches!(
            phase_curve_fn(&h, &dh, g, None, 1e-6),
            Err(GapwaveError::NeedsHeating { .. })
        ));
    }

    #[test]
    fn constant_phase_never_crosses() {
        let g = Grid::closed(0.0, 10.0, 101).unwrap();
        let h = |_: f64| Complex64::new(1.0, 0.0);
        let dh = |_: f64| Complex64::default();
        let c = phase_curve_fn(&h, &dh, g, None, 1e-6).unwrap();
        assert_eq!(lattice_crossings(&c, 10.0).unwrap(), 0);
    }

    #[test]
    fn blaschke_basics() {
        let i = Complex64::i();
        assert!((blaschke(&[i], Complex64::default()).unwrap() - 1.0).norm() < 1e-15);
        for x in [-3.0, 0.2, 7.0] {
            assert!((blaschke(&[i], Complex64::new(x, 0.0)).unwrap().norm() - 1.0).abs() < 1e-12);
        }
        assert!(blaschke(&[Complex64::new(1.0, 0.0)], i).is_err());
    }

    #[test]
    fn quant_arithmetic() {
        let v = quant_bound(3.0, 0.1, 5.0, 2.0, 20.0).unwrap();
        assert!((v - (2.9 * 20.0 / PI - 2.0 * 10.2 / PI - 1.0)).abs() < 1e-12);
        assert!((v - 10.97).abs() < 0.01);
        assert!(quant_bound(3.0, 0.1, 5.0, 2.0, 10.0).is_err());
        assert!(quant_bound(3.0, 0.6, 5.0, 2.0, 20.0).is_err());
    }
}
