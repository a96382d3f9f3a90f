//! Output probability `g(θ)`, its derivative, Fisher information and the
//! maximum Cramér-Rao bound of a quantizer under a noise density.
//!
//! The parameter range is `[-1, 1]`. Worst-case bounds are taken on the grid
//! `θ_l = -l/L, l = 0..=L`, which covers the range for antisymmetric
//! quantizers because their bound is even in `θ`. The closed end `θ = -1` is
//! included; it is dropped only when `g` degenerates exactly there (e.g. the
//! sine quantizer without noise), where the bound extends continuously from
//! the interior.

use std::f64::consts::PI;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::noise::{NoiseDensity, NoiseFamily};
use crate::quadrature::{integrate_windowed, DEFAULT_TOL};
use crate::quantizer::Quantizer;
use crate::search::golden_section;
use crate::special::gamma;

/// `g` outside `(ε, 1 - ε)` counts as degenerate.
pub const DEGENERACY_EPS: f64 = 1e-12;
/// Tolerance of the strict-increase test for admissibility.
pub const ADMISSIBILITY_TOL: f64 = 1e-10;
/// Relative tolerance of the pointwise dominance test.
pub const DOMINANCE_TOL: f64 = 1e-9;

// Tighter tolerance for the finite-difference derivative path.
const FD_QUAD_TOL: f64 = 1e-13;

fn check_theta(theta: f64) -> Result<()> {
    if !(-1.0..=1.0).contains(&theta) {
        return Err(Error::InvalidParameter(format!(
            "theta must lie in [-1, 1], got {theta}"
        )));
    }
    Ok(())
}

/// `g(θ) = ∫ γ(x) f(x - θ) dx`, the probability that a sensor emits 1.
///
/// Point-mass noise returns `γ(θ)` and the threshold quantizer returns
/// `F(θ)` exactly; everything else is integrated numerically.
pub fn g_of_theta(q: &Quantizer, d: &NoiseDensity, theta: f64) -> Result<f64> {
    check_theta(theta)?;
    g_internal(q, d, theta, DEFAULT_TOL)
}

fn g_internal(q: &Quantizer, d: &NoiseDensity, theta: f64, tol: f64) -> Result<f64> {
    if d.is_point_mass() {
        return Ok(q.evaluate(theta));
    }
    match q {
        Quantizer::Threshold => Ok(d.cdf(theta)),
        Quantizer::Complement(inner) => Ok(1.0 - g_internal(inner, d, theta, tol)?),
        _ => g_by_quadrature(q, d, theta, tol),
    }
}

/// The defining integral of `g` evaluated numerically for any quantizer, with
/// the saturated tails added in closed form through the distribution function.
pub fn g_by_quadrature(q: &Quantizer, d: &NoiseDensity, theta: f64, tol: f64) -> Result<f64> {
    d.pdf(0.0)?;
    let radius = d.effective_radius();
    let integrand = |x: f64| q.evaluate(x) * d.density(x - theta);
    let mut breaks = q.breakpoints();
    breaks.push(theta);
    match q.saturation() {
        Some(s) => {
            let hw = s.half_width;
            let core = integrate_windowed(&integrand, -hw, hw, &[theta], radius, &breaks, tol)?;
            Ok(core + s.low * d.cdf(-hw - theta) + s.high * d.cdf(theta - hw))
        }
        None => {
            let lo = theta - radius;
            let hi = theta + radius;
            let core = integrate_windowed(&integrand, lo, hi, &[theta], radius, &breaks, tol)?;
            let tail = d.cdf(-radius);
            Ok(core + tail * (q.evaluate(lo) + q.evaluate(hi)))
        }
    }
}

/// `g(θ) = F(θ) + ∫_{-1}^{0} γ(x) ξ(θ, x) dx` with `ξ(θ, x) = f(x - θ) - f(x + θ)`,
/// valid for antisymmetric unit-support quantizers under symmetric noise.
pub fn g_antisymmetric_form(q: &Quantizer, d: &NoiseDensity, theta: f64, tol: f64) -> Result<f64> {
    d.pdf(0.0)?;
    if !q.is_unit_support() {
        return Err(Error::InvalidParameter(
            "antisymmetric form needs a unit-support quantizer".into(),
        ));
    }
    let xi = |x: f64| q.evaluate(x) * (d.density(x - theta) - d.density(x + theta));
    let mut breaks = q.breakpoints();
    breaks.extend([theta, -theta]);
    let core = integrate_windowed(&xi, -1.0, 0.0, &[theta, -theta], d.effective_radius(), &breaks, tol)?;
    Ok(d.cdf(theta) + core)
}

/// `g'(θ)`.
///
/// Uses `-∫ γ(x) f'(x - θ) dx` where the density is differentiable, exact
/// forms for the threshold quantizer and for point-mass noise, and a central
/// difference of `g` with step `1e-5 max(σ, 1e-3)` for the Laplacian.
pub fn g_prime(q: &Quantizer, d: &NoiseDensity, theta: f64) -> Result<f64> {
    check_theta(theta)?;
    g_prime_internal(q, d, theta)
}

fn g_prime_internal(q: &Quantizer, d: &NoiseDensity, theta: f64) -> Result<f64> {
    if d.is_point_mass() {
        return q.derivative(theta).ok_or_else(|| {
            Error::InvalidParameter(format!(
                "{} quantizer has no derivative at {theta} under point-mass noise",
                q.label()
            ))
        });
    }
    match q {
        Quantizer::Threshold => return Ok(d.density(theta)),
        Quantizer::Complement(inner) => return Ok(-g_prime_internal(inner, d, theta)?),
        _ => {}
    }
    if d.beta() == Some(1.0) {
        let h = 1e-5 * d.sigma().max(1e-3);
        let up = g_by_quadrature(q, d, theta + h, FD_QUAD_TOL)?;
        let down = g_by_quadrature(q, d, theta - h, FD_QUAD_TOL)?;
        return Ok((up - down) / (2.0 * h));
    }
    let radius = d.effective_radius();
    let integrand = |x: f64| -q.evaluate(x) * d.density_derivative(x - theta);
    let mut breaks = q.breakpoints();
    breaks.push(theta);
    match q.saturation() {
        Some(s) => {
            let hw = s.half_width;
            let core = integrate_windowed(&integrand, -hw, hw, &[theta], radius, &breaks, DEFAULT_TOL)?;
            Ok(core - s.low * d.density(-hw - theta) + s.high * d.density(theta - hw))
        }
        None => integrate_windowed(
            &integrand,
            theta - radius,
            theta + radius,
            &[theta],
            radius,
            &breaks,
            DEFAULT_TOL,
        ),
    }
}

fn degenerate(g: f64) -> bool {
    !(g > DEGENERACY_EPS && g < 1.0 - DEGENERACY_EPS)
}

/// `I(θ) = g'(θ)^2 / (g(θ)(1 - g(θ)))`.
pub fn fisher_information(q: &Quantizer, d: &NoiseDensity, theta: f64) -> Result<f64> {
    let g = g_of_theta(q, d, theta)?;
    if degenerate(g) {
        return Err(Error::DegenerateProbability { theta, g });
    }
    let gp = g_prime(q, d, theta)?;
    Ok(gp * gp / (g * (1.0 - g)))
}

/// `CRB(θ) = 1 / I(θ)`.
pub fn crb(q: &Quantizer, d: &NoiseDensity, theta: f64) -> Result<f64> {
    Ok(1.0 / fisher_information(q, d, theta)?)
}

/// Bound at one grid point: `None` when `g` is degenerate, together with `g`.
fn crb_point(q: &Quantizer, d: &NoiseDensity, theta: f64) -> Result<(f64, Option<f64>)> {
    let g = g_of_theta(q, d, theta)?;
    if degenerate(g) {
        return Ok((g, None));
    }
    let gp = g_prime(q, d, theta)?;
    Ok((g, Some(g * (1.0 - g) / (gp * gp))))
}

/// Bound sampled on `θ_l = -l/L` together with its maximum.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CrbProfile {
    #[serde(skip)]
    pub thetas: Vec<f64>,
    #[serde(skip)]
    pub g_values: Vec<f64>,
    #[serde(skip)]
    pub crb_values: Vec<f64>,
    pub phi: f64,
    pub argmax_theta: f64,
    #[serde(rename = "L")]
    pub grid_size: usize,
}

impl CrbProfile {
    /// Rows `theta,g,crb` in grid order.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("theta,g,crb\n");
        for ((t, g), c) in self.thetas.iter().zip(&self.g_values).zip(&self.crb_values) {
            out.push_str(&format!("{t},{g},{c}\n"));
        }
        out
    }

    /// Summary `{"phi", "argmax_theta", "L"}`.
    pub fn sidecar_json(&self) -> String {
        serde_json::json!({
            "phi": self.phi,
            "argmax_theta": self.argmax_theta,
            "L": self.grid_size,
        })
        .to_string()
    }
}

/// Grid size `⌈10/σ⌉` clamped to `[100, 2000]`.
pub fn default_grid_size(sigma: f64) -> usize {
    let raw = (10.0 / sigma).ceil();
    if raw.is_finite() {
        (raw as usize).clamp(100, 2000)
    } else {
        2000
    }
}

/// Half-grid parameter points `θ_l = -l/L`, `l = 0..=L`.
pub fn half_grid(grid_size: usize) -> Vec<f64> {
    (0..=grid_size).map(|l| 0.0 - l as f64 / grid_size as f64).collect()
}

/// Worst-case bound `φ(γ, f)` over the half grid.
///
/// Interior points with degenerate `g` carry an infinite bound; the endpoint
/// `θ = -1` is dropped if degenerate. Ties resolve to the lowest index.
pub fn max_crb(q: &Quantizer, d: &NoiseDensity, grid_size: usize) -> Result<CrbProfile> {
    if grid_size < 10 {
        return Err(Error::InvalidParameter(format!(
            "grid size must be at least 10, got {grid_size}"
        )));
    }
    let thetas = half_grid(grid_size);
    let points: Vec<(f64, Option<f64>)> = thetas
        .par_iter()
        .map(|&t| crb_point(q, d, t))
        .collect::<Result<_>>()?;

    let mut profile = CrbProfile {
        thetas: Vec::with_capacity(points.len()),
        g_values: Vec::with_capacity(points.len()),
        crb_values: Vec::with_capacity(points.len()),
        phi: f64::NEG_INFINITY,
        argmax_theta: f64::NAN,
        grid_size,
    };
    let mut finite = 0usize;
    for (l, (&theta, (g, value))) in thetas.iter().zip(points).enumerate() {
        let value = match value {
            Some(v) => {
                finite += 1;
                v
            }
            None if l == grid_size => continue,
            None => f64::INFINITY,
        };
        if value > profile.phi {
            profile.phi = value;
            profile.argmax_theta = theta;
        }
        profile.thetas.push(theta);
        profile.g_values.push(g);
        profile.crb_values.push(value);
    }
    if finite == 0 {
        return Err(Error::DegenerateProbability {
            theta: profile.argmax_theta,
            g: profile.g_values.first().copied().unwrap_or(f64::NAN),
        });
    }
    Ok(profile)
}

/// Whether `g` increases over the full grid `θ = -1, -1 + 1/L, …, 1`
/// (steps may not fall by more than [`ADMISSIBILITY_TOL`], and the total rise
/// must be positive).
pub fn is_admissible(q: &Quantizer, d: &NoiseDensity, grid_size: usize) -> Result<bool> {
    let n = grid_size.max(1);
    let g: Vec<f64> = (0..=2 * n)
        .into_par_iter()
        .map(|j| g_of_theta(q, d, ((j as f64) - n as f64) / n as f64))
        .collect::<Result<_>>()?;
    let rising = g.windows(2).all(|w| w[1] - w[0] > -ADMISSIBILITY_TOL);
    Ok(rising && g[2 * n] > g[0])
}

/// A grid point where the first quantizer's bound exceeds the second's.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DominanceViolation {
    pub theta: f64,
    pub crb_first: f64,
    pub crb_second: f64,
}

/// Grid points of `θ_l = -l/L` where `CRB(θ, q1) > CRB(θ, q2)` beyond the
/// relative tolerance [`DOMINANCE_TOL`]. Degenerate points count as infinite.
pub fn dominance_violations(
    q1: &Quantizer,
    q2: &Quantizer,
    d: &NoiseDensity,
    grid_size: usize,
) -> Result<Vec<DominanceViolation>> {
    let thetas = half_grid(grid_size);
    let pairs: Vec<(f64, f64)> = thetas
        .par_iter()
        .map(|&t| {
            let a = crb_point(q1, d, t)?.1.unwrap_or(f64::INFINITY);
            let b = crb_point(q2, d, t)?.1.unwrap_or(f64::INFINITY);
            Ok((a, b))
        })
        .collect::<Result<_>>()?;
    Ok(thetas
        .iter()
        .zip(pairs)
        .filter(|(_, (a, b))| *a > *b && *a - *b > DOMINANCE_TOL * b.abs().max(1.0))
        .map(|(&theta, (crb_first, crb_second))| DominanceViolation {
            theta,
            crb_first,
            crb_second,
        })
        .collect())
}

/// Whether `q1` has a bound no larger than `q2` at every grid point.
pub fn dominates(q1: &Quantizer, q2: &Quantizer, d: &NoiseDensity, grid_size: usize) -> Result<bool> {
    Ok(dominance_violations(q1, q2, d, grid_size)?.is_empty())
}

/// Search interval, tolerance and grid of the critical-σ search.
pub const CRITICAL_SIGMA_RANGE: (f64, f64) = (0.05, 3.0);
pub const CRITICAL_SIGMA_TOL: f64 = 1e-4;
pub const CRITICAL_SIGMA_GRID: usize = 200;

/// Threshold-quantizer worst-case bound for the family member with standard
/// deviation `sigma`.
pub fn threshold_phi(family: NoiseFamily, sigma: f64) -> Result<f64> {
    Ok(max_crb(&Quantizer::Threshold, &family.with_sigma(sigma)?, CRITICAL_SIGMA_GRID)?.phi)
}

/// Standard deviation minimizing the threshold quantizer's worst-case bound
/// within the family: the level dithering pads the noise up to.
pub fn critical_sigma(family: NoiseFamily) -> Result<f64> {
    if family.beta().is_none() {
        return Err(Error::NoDensity);
    }
    let (lo, hi) = CRITICAL_SIGMA_RANGE;
    let mut failure = None;
    let (sigma, _) = golden_section(
        |s| match threshold_phi(family, s) {
            Ok(v) => v,
            Err(e) => {
                failure.get_or_insert(e);
                f64::INFINITY
            }
        },
        lo,
        hi,
        CRITICAL_SIGMA_TOL,
    );
    if let Some(e) = failure {
        return Err(e);
    }
    if sigma - lo < 2.0 * CRITICAL_SIGMA_TOL || hi - sigma < 2.0 * CRITICAL_SIGMA_TOL {
        return Err(Error::OptimizationFailure(format!(
            "critical sigma search ended at the interval boundary ({sigma})"
        )));
    }
    Ok(sigma)
}

/// Dithering quantizer that pads noise of standard deviation `sigma` up to
/// `critical_sigma` with independent dither from the same family; plain
/// threshold once no padding is needed.
pub fn dithering_quantizer(family: NoiseFamily, sigma: f64, critical_sigma: f64) -> Result<Quantizer> {
    let pad = critical_sigma * critical_sigma - sigma * sigma;
    if pad > 0.0 {
        Quantizer::dithered(family, pad)
    } else {
        Ok(Quantizer::threshold())
    }
}

/// Limit of the sine quantizer's boundary bound as σ → 0, from the normalized
/// one-sided mean: `(4/π²) / (2 μ1²)`.
pub fn sine_high_snr_limit(family: NoiseFamily) -> Result<f64> {
    let mu1 = family.with_variance(1.0)?.normalized_one_sided_mean()?;
    Ok(4.0 / (PI * PI) / (2.0 * mu1 * mu1))
}

/// The same limit for the generalized Gaussian written through Γ:
/// `(8/π²) Γ(1/β) Γ(3/β) / Γ(2/β)²`.
pub fn sine_high_snr_limit_gamma_form(family: NoiseFamily) -> Result<f64> {
    let beta = family.beta().ok_or(Error::NoDensity)?;
    let g2 = gamma(2.0 / beta);
    Ok(8.0 / (PI * PI) * gamma(1.0 / beta) * gamma(3.0 / beta) / (g2 * g2))
}
