//! Desk-scale versions of the two constructions: a signal with a spectral gap
//! and no sign changes on prescribed long intervals, and a signal whose zeros
//! outnumber the sign changes a gap would force.

use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::error::{invalid, Result};
use crate::oscillation::{default_zero_tol, sign_change_places};
use crate::signals::{spectrum_of, verify_gap_spectrum, GapSpec, Grid, SampledSignal};

use super::closed_forms::{find_constants, q_closed, Example2Constants, Q_closed};

/// Integer zeros, each of multiplicity one, inside `[0, R]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ZeroSet {
    pub positions: Vec<i64>,
    pub window: (f64, f64),
}

impl ZeroSet {
    /// Zeros in `(lo, hi]`.
    pub fn count_between(&self, lo: f64, hi: f64) -> usize {
        let a = self.positions.partition_point(|&n| n as f64 <= lo);
        let b = self.positions.partition_point(|&n| n as f64 <= hi);
        b - a
    }

    pub fn contains(&self, n: i64) -> bool {
        self.positions.binary_search(&n).is_ok()
    }
}

/// Rounds the measure `dF` to unit masses at integers: `n ∈ (0, R]` is a zero
/// iff `⌊F(n)⌋ > ⌊F(n-1)⌋`. `f_at_integers[n] = F(n)` for `n = 0..=R`.
pub fn integer_zero_set(f_at_integers: &[f64]) -> Result<ZeroSet> {
    if f_at_integers.len() < 2 {
        return invalid("need F at two or more integers");
    }
    if let Some(n) = f_at_integers
        .windows(2)
        .position(|w| w[1] < w[0] - 1e-12 * w[0].abs().max(1.0))
    {
        return invalid(format!("F decreases between {n} and {}", n + 1));
    }
    let positions = f_at_integers
        .windows(2)
        .enumerate()
        .filter(|(_, w)| w[1].floor() > w[0].floor())
        .map(|(n, _)| n as i64 + 1)
        .collect();
    Ok(ZeroSet {
        positions,
        window: (0.0, (f_at_integers.len() - 1) as f64),
    })
}

/// `max_n |#zeros in (0, n] - (F(n) - F(0))|`.
pub fn mass_deviation(zs: &ZeroSet, f_at_integers: &[f64]) -> f64 {
    let mut count = 0usize;
    let mut worst = 0.0f64;
    for (n, f) in f_at_integers.iter().enumerate().skip(1) {
        if zs.contains(n as i64) {
            count += 1;
        }
        worst = worst.max((count as f64 - (f - f_at_integers[0])).abs());
    }
    worst
}

/// `log|Π (1 - x/n)|` and the sign of the product, over positive integers `n`.
pub fn log_product(zeros: &[i64], x: f64) -> (f64, f64) {
    zeros.iter().fold((0.0, 1.0), |(l, s), &n| {
        let factor = 1.0 - x / n as f64;
        (l + factor.abs().ln(), if factor < 0.0 { -s } else { s })
    })
}

/// How the charge density is prescribed on a schedule block `[r_k, r_{k+1})`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Block {
    /// `k = n²`: the rescaled profile `q₁(x/s_k)`, `s_k = √(r_k r_{k+1})`.
    Scaled { s: f64 },
    /// `k = n² + j`, `1 ≤ j ≤ 2n`: constant `(j/2n) m' + ((2n-j)/2n) m`.
    Mixed { density: f64 },
}

fn block_kind(k: usize, radii: &[f64], c: &Example2Constants) -> Block {
    let n = (k as f64).sqrt().floor() as usize;
    if n >= 1 && n * n == k {
        return Block::Scaled {
            s: (radii[k] * radii[k + 1]).sqrt(),
        };
    }
    if n == 0 {
        return Block::Mixed { density: c.m };
    }
    let j = (k - n * n) as f64;
    let w = j / (2 * n) as f64;
    Block::Mixed {
        density: w * c.m_prime + (1.0 - w) * c.m,
    }
}

/// `r_k = 5·4^k` up to the first radius at or beyond `r_max`.
pub fn default_schedule(r_max: f64) -> Vec<f64> {
    let mut radii = vec![5.0];
    while *radii.last().unwrap() < r_max {
        radii.push(4.0 * radii.last().unwrap());
    }
    if radii.len() < 2 {
        radii.push(20.0);
    }
    radii
}

/// The orbit-scheduled charge density on `[0, last radius)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScheduledCharge {
    pub constants: Example2Constants,
    pub radii: Vec<f64>,
    pub blocks: Vec<Block>,
}

impl ScheduledCharge {
    pub fn new(c: Example2Constants, radii: &[f64]) -> Result<Self> {
        if radii.len() < 2 || !(radii[0] > 0.0) {
            return invalid("schedule needs two or more positive radii");
        }
        if let Some(w) = radii.windows(2).find(|w| w[1] < 4.0 * w[0]) {
            return invalid(format!("schedule ratio {}/{} below 4", w[1], w[0]));
        }
        let blocks = (0..radii.len() - 1).map(|k| block_kind(k, radii, &c)).collect();
        Ok(Self {
            constants: c,
            radii: radii.to_vec(),
            blocks,
        })
    }

    fn block_integral(&self, block: &Block, a: f64, b: f64) -> f64 {
        let c = &self.constants;
        match *block {
            Block::Scaled { s } => s * (Q_closed(b / s, c.k) - Q_closed(a / s, c.k)) + c.m * (b - a),
            Block::Mixed { density } => density * (b - a),
        }
    }

    pub fn density(&self, x: f64) -> f64 {
        let c = &self.constants;
        match self.radii.iter().rposition(|&r| r <= x) {
            Some(k) if k < self.blocks.len() => match self.blocks[k] {
                Block::Scaled { s } => q_closed(x / s, c.k) + c.m,
                Block::Mixed { density } => density,
            },
            _ => c.m,
        }
    }

    /// `F(x) = ∫_0^x density`.
    pub fn cumulative(&self, x: f64) -> f64 {
        let mut total = self.constants.m * x.min(self.radii[0]);
        for (k, block) in self.blocks.iter().enumerate() {
            let (a, b) = (self.radii[k], self.radii[k + 1]);
            if x <= a {
                break;
            }
            total += self.block_integral(block, a, x.min(b));
        }
        total
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Example2Report {
    pub label: String,
    pub constants: Example2Constants,
    pub radii: Vec<f64>,
    pub r_max: f64,
    pub max_density: f64,
    pub mass_deviation: f64,
    pub peak_block: usize,
    pub peak_scale: f64,
    /// `s·x*`: the window `[0, peak_r]` on which densities are measured.
    pub peak_r: f64,
    pub zero_count: usize,
    pub zero_density: f64,
    pub m_plus_eta: f64,
    pub m_plus_eta_from_origin: f64,
    pub zero_density_rel_error: f64,
    pub sign_changes: usize,
    pub sign_change_density: f64,
    /// `1 - zero_density + 0.05`.
    pub sign_change_bound: f64,
    pub one_minus_m: f64,
    /// Every sign change lies within one sample of an integer outside the
    /// zero set, and each such integer carries exactly one sign change.
    pub sign_changes_at_free_integers: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Example2 {
    pub zeros: ZeroSet,
    /// `f = g·sin πx` divided by a positive factor: by `|g|` away from the
    /// zero set, and by `|g(x)|·n/|x - n|` within half a unit of a zero `n`.
    /// The sign pattern, and so every sign change, is that of `f`.
    pub f: SampledSignal,
    pub report: Example2Report,
}

/// Sign of `Π_{n ∈ zeros, n ≠ skip} (1 - x/n)`.
fn product_sign(zeros: &[i64], x: f64, skip: Option<i64>) -> f64 {
    let below = zeros.partition_point(|&n| (n as f64) < x);
    let skipped = skip.is_some_and(|n| (n as f64) < x);
    if (below - skipped as usize).is_multiple_of(2) {
        1.0
    } else {
        -1.0
    }
}

/// Normalized `g·sin πx` for the finite product `g` over `zs`.
pub fn normalized_f(zs: &ZeroSet, x: f64) -> f64 {
    let nearest = x.round() as i64;
    if nearest > 0 && zs.contains(nearest) {
        product_sign(&zs.positions, x, Some(nearest)) * (nearest as f64 - x) * (PI * x).sin()
    } else {
        product_sign(&zs.positions, x, None) * (PI * x).sin()
    }
}

pub fn example2_build(k: f64, radii: &[f64], r_max: f64) -> Result<Example2> {
    let c = find_constants(k)?;
    if !c.admissible {
        return invalid(format!(
            "k = {k} not below the admissibility threshold {:.4}",
            c.k_threshold
        ));
    }
    let charge = ScheduledCharge::new(c, radii)?;
    let last = *radii.last().unwrap();
    if !(r_max > 0.0 && r_max <= last) {
        return invalid(format!("R = {r_max} must lie in (0, {last}]"));
    }
    let peak = (0..charge.blocks.len())
        .rev()
        .find_map(|kb| match charge.blocks[kb] {
            Block::Scaled { s } if s * c.x_star <= r_max => Some((kb, s)),
            _ => None,
        })
        .ok_or_else(|| {
            crate::error::GapwaveError::InvalidInput(format!("no scaled block peak fits below R = {r_max}"))
        })?;
    let (peak_block, s) = peak;
    let peak_r = s * c.x_star;

    let top = r_max.floor() as usize;
    let f_int: Vec<f64> = (0..=top).map(|n| charge.cumulative(n as f64)).collect();
    let zeros = integer_zero_set(&f_int)?;
    let deviation = mass_deviation(&zeros, &f_int);
    let max_density = (0..=top * 4)
        .map(|i| charge.density(i as f64 * 0.25))
        .fold(f64::MIN, f64::max);

    let grid = Grid::new(0.05, 0.1, (r_max * 10.0).floor() as usize)?;
    let f = SampledSignal::from_fn(grid, |x| normalized_f(&zeros, x))?;
    let eval = |x: f64| normalized_f(&zeros, x);
    let rep = sign_change_places(&f, default_zero_tol(&f), Some(&eval))?;

    let in_peak: Vec<f64> = rep
        .sign_change_positions()
        .into_iter()
        .filter(|&x| x <= peak_r)
        .collect();
    let zero_count = zeros.count_between(0.0, peak_r);
    let zero_density = zero_count as f64 / peak_r;
    let sign_change_density = in_peak.len() as f64 / peak_r;
    let free: Vec<i64> = (1..=peak_r.floor() as i64).filter(|&n| !zeros.contains(n)).collect();
    let located =
        in_peak.len() == free.len() && in_peak.iter().zip(&free).all(|(&x, &n)| (x - n as f64).abs() < grid.dx);
    let m_plus_eta = c.m + c.eta;

    let report = Example2Report {
        label: "finite-schedule approximation".into(),
        constants: c,
        radii: radii.to_vec(),
        r_max,
        max_density,
        mass_deviation: deviation,
        peak_block,
        peak_scale: s,
        peak_r,
        zero_count,
        zero_density,
        m_plus_eta,
        m_plus_eta_from_origin: c.m + c.eta_from_origin,
        zero_density_rel_error: (zero_density - m_plus_eta).abs() / m_plus_eta,
        sign_changes: in_peak.len(),
        sign_change_density,
        sign_change_bound: 1.0 - zero_density + 0.05,
        one_minus_m: 1.0 - c.m,
        sign_changes_at_free_integers: located,
    };
    Ok(Example2 { zeros, f, report })
}

/// `Σ_{j≤n} (x_j - y_j) ≤ x_n^α` for every `n`, over integer-aligned, disjoint,
/// increasing intervals in `[1, ∞)`.
pub fn check_growth(intervals: &[(i64, i64)], alpha: f64) -> Result<()> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return invalid(format!("α = {alpha} outside (0, 1)"));
    }
    if intervals.is_empty() {
        return invalid("no intervals");
    }
    let mut total = 0i64;
    let mut prev_end = 0i64;
    for &(y, x) in intervals {
        if y <= prev_end || x <= y {
            return invalid(format!(
                "interval [{y}, {x}] not increasing, disjoint and to the right of 0"
            ));
        }
        total += x - y;
        if total as f64 > (x as f64).powf(alpha) {
            return invalid(format!("growth condition fails at [{y}, {x}]: {total} > {x}^{alpha}"));
        }
        prev_end = x;
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IntervalReport {
    pub interval: (i64, i64),
    pub sign_changes: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Example1Report {
    pub intervals: Vec<IntervalReport>,
    pub alpha: f64,
    pub epsilon: f64,
    /// Power `2N` of the sinc multiplier.
    pub multiplier_power: u32,
    /// `max |f|` over the outer tenth of the window relative to `max |f|`.
    pub edge_ratio: f64,
    pub gap: f64,
    pub gap_energy_ratio: f64,
    /// Largest `||ξ| - π|` over bins carrying at least `1e-6` of the peak
    /// amplitude; the finite window leaks beyond the true `ε`.
    pub measured_epsilon: f64,
    /// Energy fraction outside `π ± 2ε`.
    pub outside_band_ratio: f64,
    /// Sign changes per unit length on `(0, 2·x_last]` away from the intervals
    /// (within one unit of an interval counts as inside).
    pub outside_density: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Example1 {
    pub f: SampledSignal,
    pub report: Example1Report,
}

/// `(sin u / u)^{2N}` with `u = εx/(2N)`: nonnegative, exponential type `ε`.
pub fn sinc_multiplier(x: f64, epsilon: f64, n: u32) -> f64 {
    let u = epsilon * x / (2.0 * n as f64);
    let s = if u == 0.0 { 1.0 } else { u.sin() / u };
    s.powi(2 * n as i32)
}

struct Example1Fn<'a> {
    zeros: &'a [i64],
    epsilon: f64,
    n: u32,
}

impl Example1Fn<'_> {
    fn f1(&self, x: f64) -> f64 {
        let g1: f64 = self.zeros.iter().map(|&n| 1.0 - x / n as f64).product();
        sinc_multiplier(x, self.epsilon, self.n) * g1 * (PI * x).sin()
    }

    fn f(&self, x: f64) -> f64 {
        self.f1(x + 0.5) + self.f1(x)
    }
}

fn edge_ratio(f: &dyn Fn(f64) -> f64, half_width: f64) -> f64 {
    let samples = 4000;
    let (mut inner, mut edge) = (0.0f64, 0.0f64);
    for i in 0..=samples {
        let x = -half_width + 2.0 * half_width * i as f64 / samples as f64;
        let v = f(x).abs();
        inner = inner.max(v);
        if x.abs() >= 0.9 * half_width {
            edge = edge.max(v);
        }
    }
    edge / inner
}

/// `f(x) = f₁(x + 1/2) + f₁(x)`, `f₁ = g·g₁·sin πx`, sampled on
/// `[-half_width, half_width]` with step `dx`; `g₁` vanishes on the integers of
/// the intervals and `g` is the sinc multiplier with the power that best
/// confines `f` to the window.
pub fn example1_build(
    intervals: &[(i64, i64)],
    alpha: f64,
    epsilon: f64,
    half_width: f64,
    dx: f64,
) -> Result<Example1> {
    check_growth(intervals, alpha)?;
    if !(epsilon > 0.0 && epsilon < PI / 2.0) {
        return invalid(format!("ε = {epsilon} outside (0, π/2)"));
    }
    let last = intervals.last().unwrap().1 as f64;
    if !(half_width > last + 1.0) {
        return invalid(format!(
            "window half-width {half_width} must exceed the last interval end {last}"
        ));
    }
    let zeros: Vec<i64> = intervals.iter().flat_map(|&(y, x)| y..=x).collect();
    let min_n = (zeros.len() as u32 + 2).div_ceil(2);
    let (n, edge) = (min_n..=min_n + 400)
        .map(|n| {
            let e = Example1Fn {
                zeros: &zeros,
                epsilon,
                n,
            };
            (n, edge_ratio(&|x| e.f(x), half_width))
        })
        .fold(
            (min_n, f64::INFINITY),
            |best, cur| if cur.1 < best.1 { cur } else { best },
        );
    let e = Example1Fn {
        zeros: &zeros,
        epsilon,
        n,
    };
    let f_eval = |x: f64| e.f(x);

    let per_interval = intervals
        .iter()
        .map(|&(y, x)| {
            let len = (x - y) as f64;
            let g = Grid::closed(y as f64, x as f64, (len * 100.0) as usize + 1)?;
            let s = SampledSignal::from_fn(g, f_eval)?;
            let rep = sign_change_places(&s, default_zero_tol(&s), Some(&f_eval))?;
            Ok(IntervalReport {
                interval: (y, x),
                sign_changes: rep.places.iter().filter(|p| p.is_sign_change()).count(),
            })
        })
        .collect::<Result<Vec<_>>>()?;

    let npts = (2.0 * half_width / dx).round() as usize;
    let grid = Grid::periodic(-half_width, 2.0 * half_width, npts)?;
    let f = SampledSignal::from_fn(grid, f_eval)?;
    let sp = spectrum_of(&f);
    let gap = PI - 2.0 * epsilon;
    let gap_report = verify_gap_spectrum(&sp, &GapSpec::high_pass(gap)?, 0.5)?;
    let amps = sp.per_sample();
    let peak = amps.iter().fold(0.0f64, |m, a| m.max(a.norm()));
    let (mut outside, mut total, mut measured) = (0.0, 0.0, 0.0f64);
    for (xi, a) in sp.freqs.iter().zip(&amps) {
        let off = (xi.abs() - PI).abs();
        let e2 = a.norm_sqr();
        total += e2;
        if off > 2.0 * epsilon {
            outside += e2;
        }
        if a.norm() >= 1e-6 * peak {
            measured = measured.max(off);
        }
    }

    // `|f|` spans many orders of magnitude over the window; a relative zero
    // tolerance would swallow whole stretches, so only exact zeros count.
    let rep = sign_change_places(&f, 0.0, Some(&f_eval))?;
    let in_interval = |x: f64| {
        intervals
            .iter()
            .any(|&(y, xe)| x >= y as f64 - 1.0 && x <= xe as f64 + 1.0)
    };
    let reach = 2.0 * last;
    let outside_changes = rep
        .sign_change_positions()
        .into_iter()
        .filter(|&x| x > 0.0 && x <= reach && !in_interval(x))
        .count();
    let excluded: f64 = intervals.iter().map(|&(y, x)| (x - y) as f64 + 2.0).sum();
    let report = Example1Report {
        intervals: per_interval,
        alpha,
        epsilon,
        multiplier_power: 2 * n,
        edge_ratio: edge,
        gap,
        gap_energy_ratio: gap_report.in_gap_energy_ratio,
        measured_epsilon: measured,
        outside_band_ratio: if total > 0.0 { outside / total } else { 0.0 },
        outside_density: outside_changes as f64 / (reach - excluded),
    };
    Ok(Example1 { f, report })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::limit_sets::closed_forms::q1_closed;

    #[test]
    fn floor_increments() {
        let f: Vec<f64> = (0..=10).map(|n| n as f64).collect();
        assert_eq!(integer_zero_set(&f).unwrap().positions, (1..=10).collect::<Vec<_>>());
        let f: Vec<f64> = (0..=10).map(|n| n as f64 / 2.0).collect();
        let zs = integer_zero_set(&f).unwrap();
        assert_eq!(zs.positions, vec![2, 4, 6, 8, 10]);
        assert!(integer_zero_set(&[0.0, 1.0, 0.5]).is_err());
    }

    #[test]
    fn q1_rounding_stays_within_one() {
        let c = find_constants(0.1).unwrap();
        let f: Vec<f64> = (0..=50).map(|n| q1_closed(n as f64, &c)).collect();
        let zs = integer_zero_set(&f).unwrap();
        assert!(mass_deviation(&zs, &f) <= 1.0);
    }

    #[test]
    fn schedule_blocks() {
        let c = find_constants(0.1).unwrap();
        let radii = default_schedule(5000.0);
        assert_eq!(radii, vec![5.0, 20.0, 80.0, 320.0, 1280.0, 5120.0]);
        let ch = ScheduledCharge::new(c, &radii).unwrap();
        assert_eq!(ch.blocks[1], Block::Scaled { s: 40.0 });
        assert_eq!(ch.blocks[3], Block::Mixed { density: c.m_prime });
        assert!(ScheduledCharge::new(c, &[5.0, 10.0]).is_err());
        let h = 1e-4;
        for x in [3.0, 33.3, 100.0, 2000.0, 4000.0] {
            let fd = (ch.cumulative(x + h) - ch.cumulative(x - h)) / (2.0 * h);
            assert!((fd - ch.density(x)).abs() < 1e-6, "{x}");
        }
    }

    #[test]
    fn parity_sign_matches_log_product() {
        let zs = ZeroSet {
            positions: vec![2, 3, 7, 11],
            window: (0.0, 12.0),
        };
        for x in [0.3, 1.7, 2.2, 4.5, 6.9, 7.4, 9.0, 11.6] {
            let (l, s) = log_product(&zs.positions, x);
            let f = s * l.exp() * (PI * x).sin();
            let nf = normalized_f(&zs, x);
            assert_eq!(f.signum(), nf.signum(), "{x}");
        }
    }

    #[test]
    fn example2_sign_changes_at_free_integers() {
        let ex = example2_build(0.1, &default_schedule(300.0), 320.0).unwrap();
        let r = &ex.report;
        assert!(r.sign_changes_at_free_integers);
        assert!(r.max_density < 1.0);
        assert!(r.mass_deviation <= 1.0);
        assert!(r.sign_change_density < r.one_minus_m);
        assert!(example2_build(0.2, &default_schedule(300.0), 320.0).is_err());
    }

    #[test]
    fn growth_condition() {
        assert!(check_growth(&[(10, 13)], 0.75).is_ok());
        assert!(check_growth(&[(10, 30)], 0.5).is_err());
        assert!(check_growth(&[(10, 13), (12, 20)], 0.75).is_err());
    }

    #[test]
    fn example1_no_sign_changes_on_intervals() {
        let ex = example1_build(&[(10, 13), (40, 46)], 0.75, 0.05 * PI, 500.0, 0.05).unwrap();
        for iv in &ex.report.intervals {
            assert_eq!(iv.sign_changes, 0, "{:?}", iv.interval);
        }
        assert!(ex.report.gap_energy_ratio < 1e-2, "{:?}", ex.report);
        assert!((ex.report.outside_density - 1.0).abs() < 0.1, "{:?}", ex.report);
    }
}
