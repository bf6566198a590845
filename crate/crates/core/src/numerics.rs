//! Small numerical kernels shared by the modules: uniform-grid quadrature,
//! bracketed root refinement, golden-section search and a least-squares slope.

/// Composite trapezoid rule on uniformly spaced samples.
pub fn trapezoid(values: &[f64], dx: f64) -> f64 {
    match values.len() {
        0 | 1 => 0.0,
        n => {
            let inner: f64 = values[1..n - 1].iter().sum();
            dx * (inner + 0.5 * (values[0] + values[n - 1]))
        }
    }
}

/// Composite Simpson rule; falls back to a trapezoid panel on the last
/// interval when the number of intervals is odd.
pub fn simpson(values: &[f64], dx: f64) -> f64 {
    let n = values.len();
    if n < 3 {
        return trapezoid(values, dx);
    }
    let intervals = n - 1;
    let even = intervals - intervals % 2;
    let mut acc = values[0] + values[even];
    for (i, v) in values.iter().enumerate().take(even).skip(1) {
        acc += if i % 2 == 1 { 4.0 * v } else { 2.0 * v };
    }
    let mut total = acc * dx / 3.0;
    if even < intervals {
        total += 0.5 * dx * (values[n - 2] + values[n - 1]);
    }
    total
}

/// Refines a sign change of `f` inside `[lo, hi]` by bisection.
///
/// `f(lo)` and `f(hi)` must have opposite signs (or one of them be zero).
pub fn bisect_sign_change(f: &dyn Fn(f64) -> f64, mut lo: f64, mut hi: f64) -> f64 {
    let mut f_lo = f(lo);
    if f_lo == 0.0 {
        return lo;
    }
    if f(hi) == 0.0 {
        return hi;
    }
    for _ in 0..80 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let f_mid = f(mid);
        if f_mid == 0.0 {
            return mid;
        }
        if (f_mid > 0.0) == (f_lo > 0.0) {
            lo = mid;
            f_lo = f_mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Bisection on a predicate that is `false` at `outside` and `true` at
/// `inside`; returns the transition point to within `1e-14` relative.
pub fn bisect_predicate(pred: &dyn Fn(f64) -> bool, mut outside: f64, mut inside: f64) -> f64 {
    for _ in 0..80 {
        let mid = 0.5 * (outside + inside);
        if mid == outside || mid == inside {
            break;
        }
        if pred(mid) {
            inside = mid;
        } else {
            outside = mid;
        }
    }
    inside
}

/// Golden-section search for a local minimum of `f` on `[a, b]`.
/// Returns `(argmin, min)`.
pub fn golden_min(f: &dyn Fn(f64) -> f64, mut a: f64, mut b: f64, tol: f64) -> (f64, f64) {
    let ratio = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - ratio * (b - a);
    let mut d = a + ratio * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    let mut iter = 0;
    while (b - a).abs() > tol && iter < 200 {
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - ratio * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + ratio * (b - a);
            fd = f(d);
        }
        iter += 1;
    }
    let x = 0.5 * (a + b);
    (x, f(x))
}

/// Dense scan followed by golden-section refinement around the best sample.
/// Returns `(argmin, min)` over `[lo, hi]`.
pub fn scan_min(f: &dyn Fn(f64) -> f64, lo: f64, hi: f64, samples: usize) -> (f64, f64) {
    let step = (hi - lo) / samples as f64;
    let (best_i, _) = (0..=samples)
        .map(|i| (i, f(lo + i as f64 * step)))
        .filter(|(_, v)| v.is_finite())
        .fold(
            (0usize, f64::INFINITY),
            |acc, (i, v)| if v < acc.1 { (i, v) } else { acc },
        );
    let a = (lo + (best_i as f64 - 1.0) * step).max(lo);
    let b = (lo + (best_i as f64 + 1.0) * step).min(hi);
    golden_min(f, a, b, 1e-12 * (1.0 + a.abs().max(b.abs())))
}

/// Ordinary least-squares slope of `ys` against `xs`.
pub fn ls_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let (num, den) = xs.iter().zip(ys).fold((0.0, 0.0), |(num, den), (x, y)| {
        (num + (x - mx) * (y - my), den + (x - mx) * (x - mx))
    });
    num / den
}

/// Linear interpolation of uniformly sampled data; `None` outside the samples.
pub fn interp_uniform(values: &[f64], x0: f64, dx: f64, x: f64) -> Option<f64> {
    let pos = (x - x0) / dx;
    let last = values.len().checked_sub(1)? as f64;
    if !(-1e-9..=last + 1e-9).contains(&pos) {
        return None;
    }
    let pos = pos.clamp(0.0, last);
    let i = (pos.floor() as usize).min(values.len().saturating_sub(2));
    let frac = pos - i as f64;
    if values.len() == 1 {
        return Some(values[0]);
    }
    Some(values[i] * (1.0 - frac) + values[i + 1] * frac)
}
