//! Zero places, sign-change places and the counting functions `s(r, f)` and
//! `S(r, f)`.
//!
//! A zero place is a maximal interval on which the signal is below the zero
//! tolerance. Strict sign flips between consecutive samples give point places
//! located by bisection (when an evaluator is supplied) or by linear
//! interpolation. `s(r, f)` counts sign-change places whose left endpoint lies
//! in the half-open interval `(0, r]`.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, GapwaveError, Result};
use crate::numerics::{bisect_predicate, bisect_sign_change};
use crate::signals::SampledSignal;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PlaceKind {
    SignChange,
    NoChange,
    /// Touches the window edge; the flanking sign on one side is unknown.
    Boundary,
    /// The whole signal is below tolerance.
    Degenerate,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ZeroPlace {
    pub left: f64,
    pub right: f64,
    pub kind: PlaceKind,
}

impl ZeroPlace {
    pub fn is_sign_change(&self) -> bool {
        self.kind == PlaceKind::SignChange
    }

    pub fn is_point(&self) -> bool {
        self.left == self.right
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SignChangeReport {
    pub places: Vec<ZeroPlace>,
    /// Sampled window `[x_first, x_last]`.
    pub window: (f64, f64),
    pub zero_tol: f64,
    pub degenerate: bool,
}

/// `1e-9 · max|values|`.
pub fn default_zero_tol(s: &SampledSignal) -> f64 {
    1e-9 * s.max_abs()
}

type Evaluator<'a> = Option<&'a dyn Fn(f64) -> f64>;

/// Zero places of `s`, each classified by the signs of its nearest nonzero
/// neighbours. `refine` is an exact evaluator of the sampled function, used to
/// place crossings and run endpoints below grid resolution.
pub fn zero_places(s: &SampledSignal, zero_tol: f64, refine: Evaluator<'_>) -> Result<Vec<ZeroPlace>> {
    if !(zero_tol >= 0.0) {
        return invalid(format!("zero tolerance must be nonnegative, got {zero_tol}"));
    }
    let g = s.grid;
    let v = &s.values;
    let n = v.len();
    let small = |j: usize| v[j].abs() <= zero_tol;
    if (0..n).all(small) {
        return Ok(vec![ZeroPlace {
            left: g.x(0),
            right: g.last(),
            kind: PlaceKind::Degenerate,
        }]);
    }

    let mut places = Vec::new();
    let mut j = 0;
    while j < n {
        if small(j) {
            let first = j;
            while j + 1 < n && small(j + 1) {
                j += 1;
            }
            let last = j;
            let before = first.checked_sub(1);
            let after = (last + 1 < n).then_some(last + 1);
            let (mut left, mut right) = (g.x(first), g.x(last));
            if let Some(f) = refine {
                let inside = |x: f64| f(x).abs() <= zero_tol;
                if let Some(b) = before {
                    if inside(left) && !inside(g.x(b)) {
                        left = bisect_predicate(&inside, g.x(b), left);
                    }
                }
                if let Some(a) = after {
                    if inside(right) && !inside(g.x(a)) {
                        right = bisect_predicate(&inside, g.x(a), right);
                    }
                }
            }
            let kind = match (before, after) {
                (Some(b), Some(a)) if (v[b] > 0.0) != (v[a] > 0.0) => PlaceKind::SignChange,
                (Some(_), Some(_)) => PlaceKind::NoChange,
                _ => PlaceKind::Boundary,
            };
            places.push(ZeroPlace { left, right, kind });
        } else if j + 1 < n && !small(j + 1) && (v[j] > 0.0) != (v[j + 1] > 0.0) {
            let (xl, xr) = (g.x(j), g.x(j + 1));
            let x = match refine {
                Some(f) if (f(xl) > 0.0) != (f(xr) > 0.0) => bisect_sign_change(f, xl, xr),
                _ => xl + (xr - xl) * v[j] / (v[j] - v[j + 1]),
            };
            places.push(ZeroPlace {
                left: x,
                right: x,
                kind: PlaceKind::SignChange,
            });
        }
        j += 1;
    }
    Ok(places)
}

pub fn sign_change_places(s: &SampledSignal, zero_tol: f64, refine: Evaluator<'_>) -> Result<SignChangeReport> {
    let places = zero_places(s, zero_tol, refine)?;
    let degenerate = places.first().is_some_and(|p| p.kind == PlaceKind::Degenerate);
    Ok(SignChangeReport {
        places,
        window: (s.grid.x0, s.grid.last()),
        zero_tol,
        degenerate,
    })
}

impl SignChangeReport {
    /// Left endpoints of all sign-change places.
    pub fn sign_change_positions(&self) -> Vec<f64> {
        self.places
            .iter()
            .filter(|p| p.is_sign_change())
            .map(|p| p.left)
            .collect()
    }

    /// Sign-change places with left endpoint in `(lo, hi]`.
    pub fn count_between(&self, lo: f64, hi: f64) -> usize {
        self.places
            .iter()
            .filter(|p| p.is_sign_change() && p.left > lo && p.left <= hi)
            .count()
    }

    fn check_inside(&self, what: &'static str, x: f64) -> Result<()> {
        let (lo, hi) = self.window;
        if x < lo || x > hi || !x.is_finite() {
            return Err(GapwaveError::OutOfRange { what, value: x, lo, hi });
        }
        Ok(())
    }
}

/// `s(r, f)`: sign-change places with left endpoint in `(0, r]`.
pub fn s_count(report: &SignChangeReport, r: f64) -> Result<usize> {
    report.check_inside("r", r)?;
    Ok(report.count_between(0.0, r))
}

/// `s(-t, f)`: sign-change places with left endpoint in `[-t, 0)`.
pub fn s_count_negative(report: &SignChangeReport, t: f64) -> Result<usize> {
    report.check_inside("-t", -t)?;
    Ok(report
        .places
        .iter()
        .filter(|p| p.is_sign_change() && p.left >= -t && p.left < 0.0)
        .count())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DensitySample {
    pub r: f64,
    pub s: usize,
    pub density: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DensityProfile {
    pub samples: Vec<DensitySample>,
    /// Minimum of `s(r)/r` over `r` at or beyond the midpoint of the probe range.
    pub tail_min: f64,
    pub degenerate: bool,
}

pub fn density_profile(report: &SignChangeReport, r_grid: &[f64]) -> Result<DensityProfile> {
    if r_grid.is_empty() {
        return invalid("empty r grid");
    }
    if r_grid.windows(2).any(|w| w[1] <= w[0]) || r_grid[0] <= 0.0 {
        return invalid("r grid must be positive and strictly increasing");
    }
    // Counts are accumulated in one sweep over the sorted positions.
    let positions: Vec<f64> = report
        .sign_change_positions()
        .into_iter()
        .filter(|&p| p > 0.0)
        .collect();
    let mut samples = Vec::with_capacity(r_grid.len());
    let mut k = 0;
    for &r in r_grid {
        report.check_inside("r", r)?;
        while k < positions.len() && positions[k] <= r {
            k += 1;
        }
        samples.push(DensitySample {
            r,
            s: k,
            density: k as f64 / r,
        });
    }
    let mid = 0.5 * (r_grid[0] + r_grid[r_grid.len() - 1]);
    let tail_min = samples
        .iter()
        .filter(|d| d.r >= mid)
        .map(|d| d.density)
        .fold(f64::INFINITY, f64::min);
    Ok(DensityProfile {
        samples,
        tail_min,
        degenerate: report.degenerate,
    })
}

/// `S(r, f) = ∫ (s(t) + s(-t)) / t dt` over `(0, r]`, summed exactly: each
/// sign change at distance `p` from the origin contributes `ln(r/p)`.
pub fn averaged_s(report_pos: &SignChangeReport, report_neg: &SignChangeReport, r: f64) -> Result<f64> {
    report_pos.check_inside("r", r)?;
    report_neg.check_inside("-r", -r)?;
    let right: f64 = report_pos
        .sign_change_positions()
        .into_iter()
        .filter(|&p| p > 0.0 && p <= r)
        .map(|p| (r / p).ln())
        .sum();
    let left: f64 = report_neg
        .sign_change_positions()
        .into_iter()
        .filter(|&p| p < 0.0 && p >= -r)
        .map(|p| (r / -p).ln())
        .sum();
    Ok(right + left)
}
