//! Design of antisymmetric unit-support piecewise-linear (AUPL) quantizers.
//!
//! The negative half of the quantizer lives on `K` equal cells
//! `D_k = [x_{k-1}, x_k]`, `x_k = -1 + k/K`, with slope `m_k` on cell `k`.
//! For a symmetric density the output probability and its derivative are
//! affine in `m`:
//!
//! ```text
//! g(θ)  = a(θ)ᵀ m + F(θ)      a = J q + r
//! g'(θ) = c(θ)ᵀ m + f(θ)      c = J q' + r'
//! ```
//!
//! where `q_k = Δx ∫_{D_k} ξ`, `r_k = ∫_{D_k} x ξ`, `ξ(θ, x) = f(x - θ) - f(x + θ)`
//! and `J` is upper triangular with diagonal `K, K-1, …, 1` and ones above.
//! The design minimizes the largest bound over `θ_l = -l/L` subject to
//! prefix sums of `m` in `[0, K]` and `Σ m = K/2`.

use std::f64::consts::FRAC_PI_2;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::crb::{half_grid, max_crb, CrbProfile, DEGENERACY_EPS};
use crate::error::{Error, Result};
use crate::lp;
use crate::noise::NoiseDensity;
use crate::quadrature::integrate_with_breaks;
use crate::quantizer::{PiecewiseLinear, Quantizer};

/// Relative spread within which terms count as jointly active.
pub const TIE_TOL: f64 = 1e-12;
const CELL_TOL: f64 = 1e-13;

/// Upper-triangular `J` with diagonal `K, K-1, …, 1` and ones above it.
pub fn j_matrix(k: usize) -> Vec<Vec<f64>> {
    (0..k)
        .map(|i| {
            (0..k)
                .map(|j| match j.cmp(&i) {
                    std::cmp::Ordering::Less => 0.0,
                    std::cmp::Ordering::Equal => (k - i) as f64,
                    std::cmp::Ordering::Greater => 1.0,
                })
                .collect()
        })
        .collect()
}

// J v without forming J.
fn apply_j(v: &[f64]) -> Vec<f64> {
    let k = v.len();
    let mut out = vec![0.0; k];
    let mut tail = 0.0;
    for i in (0..k).rev() {
        out[i] = (k - i) as f64 * v[i] + tail;
        tail += v[i];
    }
    out
}

/// Affine coefficients of `g` and `g'` on the parameter grid.
#[derive(Debug, Clone, PartialEq)]
pub struct AuplCoefficients {
    pub k: usize,
    pub l: usize,
    pub thetas: Vec<f64>,
    pub q: Vec<Vec<f64>>,
    pub r: Vec<Vec<f64>>,
    pub q_prime: Vec<Vec<f64>>,
    pub r_prime: Vec<Vec<f64>>,
    pub a: Vec<Vec<f64>>,
    pub c: Vec<Vec<f64>>,
    pub big_f: Vec<f64>,
    pub small_f: Vec<f64>,
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

impl AuplCoefficients {
    /// `g(θ_l)` for slopes `m`.
    pub fn g(&self, l: usize, m: &[f64]) -> f64 {
        dot(&self.a[l], m) + self.big_f[l]
    }

    /// `g'(θ_l)` for slopes `m`.
    pub fn g_prime(&self, l: usize, m: &[f64]) -> f64 {
        dot(&self.c[l], m) + self.small_f[l]
    }
}

/// Builds the coefficients for `K` cells and the grid `θ_l = -l/L`.
///
/// `r` is integrated numerically on each cell; `q` and the `θ`-derivatives
/// have exact antiderivatives in terms of `F` and `f`.
pub fn precompute_coefficients(d: &NoiseDensity, k: usize, l: usize) -> Result<AuplCoefficients> {
    if k == 0 || l == 0 {
        return Err(Error::InvalidParameter("K and L must be at least 1".into()));
    }
    d.pdf(0.0)?;
    let thetas = half_grid(l);
    let dx = 1.0 / k as f64;
    let node = |i: usize| -1.0 + i as f64 * dx;
    let rows: Vec<[Vec<f64>; 4]> = thetas
        .par_iter()
        .map(|&theta| {
            let mut q = Vec::with_capacity(k);
            let mut r = Vec::with_capacity(k);
            let mut qp = Vec::with_capacity(k);
            let mut rp = Vec::with_capacity(k);
            let big = |x: f64| d.cdf(x - theta) - d.cdf(x + theta);
            let both = |x: f64| d.density(x - theta) + d.density(x + theta);
            let mass = |x: f64| d.cdf(x - theta) + d.cdf(x + theta);
            for i in 1..=k {
                let (lo, hi) = (node(i - 1), node(i));
                q.push(dx * (big(hi) - big(lo)));
                let xi = |x: f64| x * (d.density(x - theta) - d.density(x + theta));
                r.push(if theta == 0.0 {
                    0.0
                } else {
                    integrate_with_breaks(&xi, lo, hi, &[theta, -theta], CELL_TOL)?
                });
                qp.push(-dx * (both(hi) - both(lo)));
                rp.push(-(hi * both(hi) - lo * both(lo)) + mass(hi) - mass(lo));
            }
            Ok([q, r, qp, rp])
        })
        .collect::<Result<_>>()?;

    let mut out = AuplCoefficients {
        k,
        l,
        big_f: thetas.iter().map(|&t| d.cdf(t)).collect(),
        small_f: thetas.iter().map(|&t| d.density(t)).collect(),
        thetas,
        q: Vec::with_capacity(l + 1),
        r: Vec::with_capacity(l + 1),
        q_prime: Vec::with_capacity(l + 1),
        r_prime: Vec::with_capacity(l + 1),
        a: Vec::with_capacity(l + 1),
        c: Vec::with_capacity(l + 1),
    };
    for [q, r, qp, rp] in rows {
        out.a.push(apply_j(&q).iter().zip(&r).map(|(x, y)| x + y).collect());
        out.c.push(apply_j(&qp).iter().zip(&rp).map(|(x, y)| x + y).collect());
        out.q.push(q);
        out.r.push(r);
        out.q_prime.push(qp);
        out.r_prime.push(rp);
    }
    Ok(out)
}

/// Value of the discretized worst-case bound and the indices attaining it.
#[derive(Debug, Clone, PartialEq)]
pub struct ObjectiveValue {
    pub value: f64,
    pub active: Vec<usize>,
}

// Per-term bounds; `None` for a degenerate last grid point, which is left out
// as in `max_crb`. Degenerate interior points give an infinite term.
fn term(g: f64, h: f64, l: usize, last: usize) -> Result<Option<f64>> {
    if !(g > DEGENERACY_EPS && g < 1.0 - DEGENERACY_EPS) {
        return Ok(if l == last { None } else { Some(f64::INFINITY) });
    }
    if !(h > 0.0) {
        return Err(Error::InadmissibleIterate { index: l });
    }
    Ok(Some(g * (1.0 - g) / (h * h)))
}

fn select_active(terms: &[Option<f64>]) -> ObjectiveValue {
    let value = terms.iter().flatten().fold(f64::NEG_INFINITY, |a, &b| a.max(b));
    let active = terms
        .iter()
        .enumerate()
        .filter(|(_, t)| match t {
            Some(v) if value.is_infinite() => *v == value,
            Some(v) => value - v <= TIE_TOL * value.abs(),
            None => false,
        })
        .map(|(l, _)| l)
        .collect();
    ObjectiveValue { value, active }
}

fn check_len(coeffs: &AuplCoefficients, m: &[f64]) -> Result<()> {
    if m.len() != coeffs.k {
        return Err(Error::InvalidParameter(format!(
            "expected {} slopes, got {}",
            coeffs.k,
            m.len()
        )));
    }
    Ok(())
}

/// `max_l g_l(1 - g_l) / h_l²` with `g_l = a_lᵀm + F_l` and `h_l = c_lᵀm + f_l`.
pub fn objective(coeffs: &AuplCoefficients, m: &[f64]) -> Result<ObjectiveValue> {
    check_len(coeffs, m)?;
    let terms = (0..=coeffs.l)
        .map(|l| term(coeffs.g(l, m), coeffs.g_prime(l, m), l, coeffs.l))
        .collect::<Result<Vec<_>>>()?;
    Ok(select_active(&terms))
}

/// Gradient of one term with respect to `m`.
pub fn term_gradient(coeffs: &AuplCoefficients, l: usize, m: &[f64]) -> Vec<f64> {
    let g = coeffs.g(l, m);
    let h = coeffs.g_prime(l, m);
    let wa = (1.0 - 2.0 * g) / (h * h);
    let wc = -2.0 * g * (1.0 - g) / (h * h * h);
    coeffs.a[l].iter().zip(&coeffs.c[l]).map(|(a, c)| wa * a + wc * c).collect()
}

/// Gradient of the active term, averaged over ties.
pub fn objective_subgradient(coeffs: &AuplCoefficients, m: &[f64]) -> Result<Vec<f64>> {
    let obj = objective(coeffs, m)?;
    if !obj.value.is_finite() {
        return Err(Error::NumericalFailure("objective is infinite".into()));
    }
    let mut grad = vec![0.0; coeffs.k];
    for &l in &obj.active {
        for (s, v) in grad.iter_mut().zip(term_gradient(coeffs, l, m)) {
            *s += v;
        }
    }
    let n = obj.active.len() as f64;
    grad.iter_mut().for_each(|v| *v /= n);
    Ok(grad)
}

/// A labelled initial slope vector.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StartingPoint {
    pub label: String,
    pub slopes: Vec<f64>,
}

/// Threshold-like start: all mass on the last cell.
pub fn threshold_like(k: usize) -> Vec<f64> {
    let mut m = vec![0.0; k];
    m[k - 1] = k as f64 / 2.0;
    m
}

/// Slopes sampling an increasing function `gamma` on `[-1, 0]` with
/// `gamma(0) = 1/2`, rescaled so they sum to exactly `K/2`.
pub fn slopes_from_nodes<G: Fn(f64) -> f64>(k: usize, gamma: G) -> Vec<f64> {
    let kf = k as f64;
    let mut m: Vec<f64> = (1..=k)
        .map(|i| kf * (gamma(-1.0 + i as f64 / kf) - gamma(-1.0 + (i - 1) as f64 / kf)))
        .collect();
    let total: f64 = m.iter().sum();
    let scale = kf / 2.0 / total;
    m.iter_mut().for_each(|v| *v *= scale);
    m
}

/// Sine-like start: slopes sampled from the half-sine quantizer.
pub fn sine_like(k: usize) -> Vec<f64> {
    slopes_from_nodes(k, |x| 0.5 * (1.0 + (FRAC_PI_2 * x).sin()))
}

/// The two standard starts, threshold-like first.
pub fn starting_points(k: usize) -> Vec<StartingPoint> {
    vec![
        StartingPoint { label: "threshold-like".into(), slopes: threshold_like(k) },
        StartingPoint { label: "sine-like".into(), slopes: sine_like(k) },
    ]
}

/// `⌈10/σ⌉` clamped to `[50, 400]`.
pub fn default_design_size(sigma: f64) -> usize {
    let raw = (10.0 / sigma).ceil();
    if raw.is_finite() {
        (raw as usize).clamp(50, 400)
    } else {
        400
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DesignOptions {
    pub max_iterations: usize,
    /// Additional slope vectors tried after the standard starts.
    pub extra_starts: Vec<Vec<f64>>,
    /// Number of random monotone starts.
    pub random_starts: usize,
    pub seed: u64,
}

impl Default for DesignOptions {
    fn default() -> Self {
        Self { max_iterations: 2000, extra_starts: Vec::new(), random_starts: 0, seed: 0 }
    }
}

/// Outcome of the local solver from one start.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StartOutcome {
    pub label: String,
    pub phi: f64,
    pub iterations: usize,
    pub converged: bool,
    pub message: String,
    #[serde(skip)]
    pub slopes: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DesignResult {
    #[serde(rename = "K")]
    pub k: usize,
    #[serde(rename = "L")]
    pub l: usize,
    pub slopes: Vec<f64>,
    pub phi: f64,
    pub start_label: String,
    #[serde(skip)]
    pub iterations: usize,
    pub converged: bool,
    #[serde(skip)]
    pub profile: CrbProfile,
    #[serde(skip)]
    pub starts: Vec<StartOutcome>,
}

impl DesignResult {
    pub fn quantizer(&self) -> Result<Quantizer> {
        Quantizer::piecewise_linear(self.slopes.clone())
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("design result serializes")
    }
}

/// Random start: sorted uniform node values on `[0, 1/2]`.
fn random_start(k: usize, rng: &mut ChaCha8Rng) -> Vec<f64> {
    let mut nodes: Vec<f64> = (0..k - 1).map(|_| rng.random::<f64>() * 0.5).collect();
    nodes.sort_by(|a, b| a.total_cmp(b));
    let kf = k as f64;
    let mut prev = 0.0;
    let mut m: Vec<f64> = nodes
        .iter()
        .map(|&v| {
            let s = kf * (v - prev);
            prev = v;
            s
        })
        .collect();
    m.push(kf * (0.5 - prev));
    m
}

/// Designs an AUPL quantizer by running the local solver from every start
/// and keeping the smallest converged objective (earliest start on ties).
pub fn design(d: &NoiseDensity, k: usize, l: usize, options: &DesignOptions) -> Result<DesignResult> {
    if k < 10 || l < 10 {
        return Err(Error::InvalidParameter(format!(
            "design needs K, L ≥ 10, got K = {k}, L = {l}"
        )));
    }
    d.pdf(0.0)?;
    let coeffs = precompute_coefficients(d, k, l)?;
    let mut starts = starting_points(k);
    for (i, m) in options.extra_starts.iter().enumerate() {
        check_len(&coeffs, m)?;
        starts.push(StartingPoint { label: format!("other-{i}"), slopes: m.clone() });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(options.seed);
    for i in 0..options.random_starts {
        starts.push(StartingPoint { label: format!("random-{i}"), slopes: random_start(k, &mut rng) });
    }

    let outcomes: Vec<StartOutcome> = starts
        .par_iter()
        .map(|s| solve_from(&coeffs, s, options.max_iterations))
        .collect();

    let mut best: Option<&StartOutcome> = None;
    for o in outcomes.iter().filter(|o| o.converged && o.phi.is_finite()) {
        if best.is_none_or(|b| o.phi < b.phi - TIE_TOL * b.phi) {
            best = Some(o);
        }
    }
    let Some(best) = best else {
        let detail: Vec<String> = outcomes
            .iter()
            .map(|o| format!("{}: {} (phi {}, {} iterations)", o.label, o.message, o.phi, o.iterations))
            .collect();
        return Err(Error::OptimizationFailure(format!(
            "no start converged: {}",
            detail.join("; ")
        )));
    };
    let q = Quantizer::piecewise_linear(best.slopes.clone())?;
    let profile = max_crb(&q, d, l)?;
    let label = if best.label.starts_with("other") || best.label.starts_with("random") {
        "other".to_string()
    } else {
        best.label.clone()
    };
    Ok(DesignResult {
        k,
        l,
        slopes: best.slopes.clone(),
        phi: best.phi,
        start_label: label,
        iterations: best.iterations,
        converged: best.converged,
        profile,
        starts: outcomes.clone(),
    })
}

// The solver works on prefix sums s_k = m_1 + … + m_k, k = 1..K-1, with
// s_K = K/2 fixed, so the feasible set is the box [0, K]^(K-1).
struct Reduced {
    n: usize,
    k: usize,
    a: Vec<Vec<f64>>,
    c: Vec<Vec<f64>>,
    g0: Vec<f64>,
    h0: Vec<f64>,
}

impl Reduced {
    fn new(coeffs: &AuplCoefficients) -> Self {
        let k = coeffs.k;
        let half = k as f64 / 2.0;
        let shift = |v: &Vec<f64>| -> Vec<f64> { (0..k - 1).map(|i| v[i] - v[i + 1]).collect() };
        Self {
            n: k - 1,
            k,
            a: coeffs.a.iter().map(shift).collect(),
            c: coeffs.c.iter().map(shift).collect(),
            g0: coeffs.a.iter().zip(&coeffs.big_f).map(|(a, f)| f + a[k - 1] * half).collect(),
            h0: coeffs.c.iter().zip(&coeffs.small_f).map(|(c, f)| f + c[k - 1] * half).collect(),
        }
    }

    fn terms(&self, s: &[f64]) -> Result<Vec<Option<f64>>> {
        let last = self.a.len() - 1;
        (0..=last)
            .map(|l| term(dot(&self.a[l], s) + self.g0[l], dot(&self.c[l], s) + self.h0[l], l, last))
            .collect()
    }

    fn gradient(&self, l: usize, s: &[f64]) -> Vec<f64> {
        let g = dot(&self.a[l], s) + self.g0[l];
        let h = dot(&self.c[l], s) + self.h0[l];
        let wa = (1.0 - 2.0 * g) / (h * h);
        let wc = -2.0 * g * (1.0 - g) / (h * h * h);
        self.a[l].iter().zip(&self.c[l]).map(|(a, c)| wa * a + wc * c).collect()
    }

    fn to_prefix(&self, m: &[f64]) -> Vec<f64> {
        let mut acc = 0.0;
        m[..self.n].iter().map(|v| { acc += v; acc }).collect()
    }

    fn to_slopes(&self, s: &[f64]) -> Vec<f64> {
        let mut m = Vec::with_capacity(self.k);
        let mut prev = 0.0;
        for &v in s {
            m.push(v - prev);
            prev = v;
        }
        m.push(self.k as f64 / 2.0 - prev);
        m
    }
}

fn max_term(terms: &[Option<f64>]) -> f64 {
    terms.iter().flatten().fold(f64::NEG_INFINITY, |a, &b| a.max(b))
}

// Sequential linear programming with a trust region for the minimax problem:
// each step solves min_d max_l (T_l + ∇T_l·d) over |d|∞ ≤ Δ inside the box.
fn solve_from(coeffs: &AuplCoefficients, start: &StartingPoint, max_iterations: usize) -> StartOutcome {
    let red = Reduced::new(coeffs);
    let kf = red.k as f64;
    let mut outcome = StartOutcome {
        label: start.label.clone(),
        phi: f64::INFINITY,
        iterations: 0,
        converged: false,
        message: String::new(),
        slopes: start.slopes.clone(),
    };
    let mut s: Vec<f64> = red.to_prefix(&start.slopes).iter().map(|v| v.clamp(0.0, kf)).collect();
    let mut terms = match red.terms(&s) {
        Ok(t) => t,
        Err(e) => {
            outcome.message = format!("start rejected: {e}");
            return outcome;
        }
    };
    let mut phi = max_term(&terms);
    if !phi.is_finite() {
        outcome.message = "start has an infinite bound".into();
        return outcome;
    }
    let mut radius = (0.05 * kf).max(0.5);
    let mut history = vec![phi];

    let mut iterations = 0;
    while iterations < max_iterations {
        iterations += 1;
        let n = red.n;
        let lo: Vec<f64> = s.iter().map(|&v| (-radius).max(-v)).collect();
        let hi: Vec<f64> = s.iter().map(|&v| radius.min(kf - v)).collect();

        let mut rows: Vec<(f64, Vec<f64>, f64, f64)> = Vec::new();
        for (l, t) in terms.iter().enumerate() {
            let Some(t) = *t else { continue };
            let g = red.gradient(l, &s);
            let (mut up, mut down) = (0.0, 0.0);
            for i in 0..n {
                let (x, y) = (g[i] * lo[i], g[i] * hi[i]);
                up += x.max(y);
                down += x.min(y);
            }
            rows.push((t, g, t + up, t + down));
        }
        let floor = rows.iter().fold(f64::NEG_INFINITY, |a, r| a.max(r.3));
        rows.retain(|r| r.2 >= floor - 1e-12 * floor.abs());

        // Variables: p (n), q (n), tau; d = p - q, objective max tau.
        let mut cost = vec![0.0; 2 * n + 1];
        cost[2 * n] = 1.0;
        let mut upper: Vec<f64> = hi.clone();
        upper.extend(lo.iter().map(|v| -v));
        upper.push(f64::INFINITY);
        let mut a_rows = Vec::with_capacity(rows.len());
        let mut b = Vec::with_capacity(rows.len());
        for (t, g, _, _) in &rows {
            let scale = 1.0 / g.iter().fold(1.0f64, |a, v| a.max(v.abs()));
            let mut row = Vec::with_capacity(2 * n + 1);
            row.extend(g.iter().map(|v| v * scale));
            row.extend(g.iter().map(|v| -v * scale));
            row.push(scale);
            a_rows.push(row);
            b.push(((phi - t) * scale).max(0.0));
        }
        let sol = match lp::maximize(&cost, &a_rows, &b, &upper) {
            Ok(sol) => sol,
            Err(e) => {
                outcome.message = format!("subproblem failed: {e}");
                break;
            }
        };
        let predicted = sol.x[2 * n];
        if predicted <= 1e-10 * phi {
            outcome.converged = true;
            outcome.message = format!("stationary (radius {radius:e})");
            break;
        }
        let step: Vec<f64> = (0..n).map(|i| sol.x[i] - sol.x[n + i]).collect();
        let step_norm = step.iter().fold(0.0f64, |a, v| a.max(v.abs()));
        let trial: Vec<f64> = s.iter().zip(&step).map(|(v, d)| (v + d).clamp(0.0, kf)).collect();
        let (rho, new_terms) = match red.terms(&trial) {
            Ok(t) => {
                let p = max_term(&t);
                if p.is_finite() {
                    ((phi - p) / predicted, Some((t, p)))
                } else {
                    (f64::NEG_INFINITY, None)
                }
            }
            Err(_) => (f64::NEG_INFINITY, None),
        };
        if rho > 1e-4 {
            let (t, p) = new_terms.expect("accepted step has terms");
            s = trial;
            terms = t;
            phi = p;
            history.push(phi);
            if history.len() > 5 {
                let old = history[history.len() - 6];
                if (old - phi).abs() <= 1e-10 * phi {
                    outcome.converged = true;
                    outcome.message = "objective settled".into();
                    break;
                }
            }
        }
        if rho > 0.75 && step_norm > 0.9 * radius {
            radius = (2.0 * radius).min(kf);
        } else if rho < 0.25 {
            radius = radius.min(step_norm) / 4.0;
        }
        if radius < 1e-12 * kf {
            outcome.converged = true;
            outcome.message = "trust region collapsed".into();
            break;
        }
    }
    if !outcome.converged && outcome.message.is_empty() {
        outcome.message = "iteration limit reached".into();
    }
    outcome.iterations = iterations;
    outcome.phi = phi;
    outcome.slopes = red.to_slopes(&s);
    outcome
}

/// Quantizer shape as CSV `x,gamma` at `n` evenly spaced points on `[-1.5, 1.5]`.
pub fn shape_csv(q: &Quantizer, n: usize) -> String {
    let mut out = String::from("x,gamma\n");
    for i in 0..n {
        let x = -1.5 + 3.0 * i as f64 / (n - 1) as f64;
        out.push_str(&format!("{x},{}\n", q.evaluate(x)));
    }
    out
}

/// `g` as CSV `theta,g` on `θ = -1, -1 + 1/L, …, 1`.
pub fn g_curve_csv(q: &Quantizer, d: &NoiseDensity, l: usize) -> Result<String> {
    let values: Vec<(f64, f64)> = (0..=2 * l)
        .into_par_iter()
        .map(|j| {
            let t = (j as f64 - l as f64) / l as f64;
            Ok((t, crate::crb::g_of_theta(q, d, t)?))
        })
        .collect::<Result<_>>()?;
    let mut out = String::from("theta,g\n");
    for (t, g) in values {
        out.push_str(&format!("{t},{g}\n"));
    }
    Ok(out)
}

/// Slopes of the truncated quantizer `γ(x)` sampled at the cell nodes, for
/// use as an extra start.
pub fn slopes_from_quantizer(q: &Quantizer, k: usize) -> Vec<f64> {
    slopes_from_nodes(k, |x| if x >= 0.0 { 0.5 } else { q.evaluate(x) })
}

impl From<&DesignResult> for crate::quantizer::AuplFile {
    fn from(r: &DesignResult) -> Self {
        Self { k: r.k, slopes: r.slopes.clone() }
    }
}

impl TryFrom<&DesignResult> for PiecewiseLinear {
    type Error = Error;
    fn try_from(r: &DesignResult) -> Result<Self> {
        PiecewiseLinear::new(r.slopes.clone())
    }
}
