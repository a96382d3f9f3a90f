//! Adaptive composite Gauss-Legendre quadrature.
//!
//! Each panel is integrated with a 15-point rule and compared against the sum
//! of the same rule on its two halves; panels that disagree by more than their
//! share of the tolerance are bisected.

use std::sync::OnceLock;

use crate::error::{Error, Result};

const ORDER: usize = 15;
const MAX_DEPTH: u32 = 48;

/// Default absolute tolerance used by the bound computations.
pub const DEFAULT_TOL: f64 = 1e-10;

struct Rule {
    nodes: [f64; ORDER],
    weights: [f64; ORDER],
}

fn rule() -> &'static Rule {
    static RULE: OnceLock<Rule> = OnceLock::new();
    RULE.get_or_init(|| {
        let n = ORDER;
        let mut nodes = [0.0; ORDER];
        let mut weights = [0.0; ORDER];
        for i in 0..n {
            // Chebyshev initial guess, then Newton on P_n.
            let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (p, d) = legendre(n, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            let (_, d) = legendre(n, x);
            dp = if d != 0.0 { d } else { dp };
            nodes[i] = x;
            weights[i] = 2.0 / ((1.0 - x * x) * dp * dp);
        }
        Rule { nodes, weights }
    })
}

// P_n(x) and P_n'(x) by the three-term recurrence.
fn legendre(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let k = k as f64;
        let p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Fixed 15-point Gauss-Legendre estimate of the integral over `[a, b]`.
pub fn gauss_legendre<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> f64 {
    let r = rule();
    let half = 0.5 * (b - a);
    let mid = 0.5 * (a + b);
    let mut sum = 0.0;
    for (x, w) in r.nodes.iter().zip(r.weights.iter()) {
        sum += w * f(mid + half * x);
    }
    sum * half
}

/// Integrates `f` over `[a, b]` to absolute tolerance `tol`.
pub fn integrate<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, tol: f64) -> Result<f64> {
    if a == b {
        return Ok(0.0);
    }
    if b < a {
        return integrate(f, b, a, tol).map(|v| -v);
    }
    let whole = gauss_legendre(f, a, b);
    adapt(f, a, b, whole, tol, 0)
}

fn adapt<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, whole: f64, tol: f64, depth: u32) -> Result<f64> {
    let mid = 0.5 * (a + b);
    let left = gauss_legendre(f, a, mid);
    let right = gauss_legendre(f, mid, b);
    let refined = left + right;
    if !refined.is_finite() {
        return Err(Error::NumericalFailure(format!(
            "non-finite integrand on [{a}, {b}]"
        )));
    }
    let err = (refined - whole).abs();
    // Below rounding level further bisection cannot help.
    if err <= tol || err <= 8.0 * f64::EPSILON * refined.abs() || b - a <= 1e-12 * (1.0 + mid.abs()) {
        return Ok(refined);
    }
    if depth >= MAX_DEPTH {
        return Err(Error::NumericalFailure(format!(
            "quadrature did not converge on [{a}, {b}] (error estimate {:e}, tol {:e})",
            (refined - whole).abs(),
            tol
        )));
    }
    Ok(adapt(f, a, mid, left, 0.5 * tol, depth + 1)? + adapt(f, mid, b, right, 0.5 * tol, depth + 1)?)
}

/// Integrates over `[a, b]` after splitting at the given break points (kinks or
/// jumps of the integrand). The tolerance is shared in proportion to length.
pub fn integrate_with_breaks<F: Fn(f64) -> f64>(
    f: &F,
    a: f64,
    b: f64,
    breaks: &[f64],
    tol: f64,
) -> Result<f64> {
    if b <= a {
        return Ok(0.0);
    }
    let mut pts: Vec<f64> = breaks.iter().copied().filter(|&x| x > a && x < b).collect();
    pts.sort_by(|x, y| x.total_cmp(y));
    pts.dedup();
    let width = b - a;
    let mut lo = a;
    let mut total = 0.0;
    for hi in pts.into_iter().chain(std::iter::once(b)) {
        if hi > lo {
            total += integrate(f, lo, hi, tol * (hi - lo) / width)?;
        }
        lo = hi;
    }
    Ok(total)
}

/// Integrates over `[a, b]` intersected with the union of the windows
/// `[c - radius, c + radius]`. Used for integrands that vanish away from a few
/// narrow peaks, where a single rule on `[a, b]` could miss them entirely.
pub fn integrate_windowed<F: Fn(f64) -> f64>(
    f: &F,
    a: f64,
    b: f64,
    centers: &[f64],
    radius: f64,
    breaks: &[f64],
    tol: f64,
) -> Result<f64> {
    let mut spans: Vec<(f64, f64)> = centers
        .iter()
        .map(|&c| ((c - radius).max(a), (c + radius).min(b)))
        .filter(|(lo, hi)| hi > lo)
        .collect();
    spans.sort_by(|x, y| x.0.total_cmp(&y.0));
    let mut merged: Vec<(f64, f64)> = Vec::with_capacity(spans.len());
    for (lo, hi) in spans {
        match merged.last_mut() {
            Some(last) if lo <= last.1 => last.1 = last.1.max(hi),
            _ => merged.push((lo, hi)),
        }
    }
    let total_len: f64 = merged.iter().map(|(lo, hi)| hi - lo).sum();
    let mut total = 0.0;
    for (lo, hi) in merged {
        total += integrate_with_breaks(f, lo, hi, breaks, tol * (hi - lo) / total_len)?;
    }
    Ok(total)
}
