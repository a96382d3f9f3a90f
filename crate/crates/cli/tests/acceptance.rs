//! Acceptance criteria, one line each. Run with `cargo test --test acceptance`.

use std::f64::consts::PI;
use std::path::Path;
use std::process::Command;
use std::time::Instant;

use qdesign::aupl::{self, default_design_size, DesignOptions, DesignResult};
use qdesign::crb::{
    crb, critical_sigma, dithering_quantizer, dominance_violations, g_antisymmetric_form,
    g_by_quadrature, is_admissible, max_crb,
};
use qdesign::quadrature::DEFAULT_TOL;
use qdesign::sim::{self, SimConfig};
use qdesign::{NoiseDensity, NoiseFamily, Quantizer};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const PHI0: f64 = 4.0 / (PI * PI);

struct Outcome {
    pass: bool,
    detail: String,
}

impl Outcome {
    fn new(pass: bool, detail: impl Into<String>) -> Self {
        Self { pass, detail: detail.into() }
    }
}

fn gauss(sigma2: f64) -> NoiseDensity {
    NoiseDensity::gaussian(sigma2).unwrap()
}

fn c1_noiseless_sine() -> Outcome {
    let p = max_crb(&Quantizer::sine(), &NoiseDensity::point_mass(), 200).unwrap();
    let spread = p.crb_values.iter().fold(0.0f64, |a, v| a.max((v - p.crb_values[0]).abs()));
    let pass = (p.phi - PHI0).abs() < 1e-6 && spread < 1e-9;
    Outcome::new(pass, format!("phi = {:.9} (4/pi^2 = {PHI0:.9}), CRB spread = {spread:.2e}", p.phi))
}

fn c2_high_snr_limits() -> Outcome {
    let floor = 8.0 / (PI * PI);
    let g = crb(&Quantizer::sine(), &gauss(1e-4), -1.0).unwrap();
    let l = crb(&Quantizer::sine(), &NoiseDensity::laplacian(1e-4).unwrap(), -1.0).unwrap();
    let eg = (g / (4.0 / PI) - 1.0).abs();
    let el = (l / (16.0 / (PI * PI)) - 1.0).abs();
    let pass = eg < 0.02 && el < 0.02 && g > floor && l > floor;
    Outcome::new(
        pass,
        format!("Gaussian {g:.5} (rel. err {eg:.2e}), Laplacian {l:.5} (rel. err {el:.2e}), floor {floor:.5}"),
    )
}

fn c3_critical_sigma() -> Outcome {
    let g = critical_sigma(NoiseFamily::GAUSSIAN).unwrap();
    let l = critical_sigma(NoiseFamily::LAPLACIAN).unwrap();
    let pg = (g - 0.63).abs() <= 0.02;
    let pl = (l - 0.79).abs() <= 0.02;
    Outcome::new(
        pg && pl,
        format!(
            "Gaussian {g:.5} (target 0.63 +- 0.02: {}), Laplacian {l:.5} (target 0.79 +- 0.02: {})",
            if pg { "ok" } else { "out of range" },
            if pl { "ok" } else { "out of range" }
        ),
    )
}

fn c4_condition_checker() -> Outcome {
    let step = qdesign::noise::CONDITION_GRID_STEP;
    let one = gauss(1.0).check_threshold_optimality_condition(step).unwrap();
    let four = gauss(4.0).check_threshold_optimality_condition(step).unwrap();
    let quarter = gauss(0.25).threshold_condition_witness(step).unwrap();
    let pass = one && four && quarter.is_some();
    let witness = quarter
        .map(|w| format!("w = {}, z = {}, value = {:.4}", w.w, w.z, w.value))
        .unwrap_or_else(|| "none".into());
    Outcome::new(pass, format!("sigma^2 = 1: {one}, 4: {four}, 0.25 witness: {witness}"))
}

// Monotone antisymmetric tabulated quantizer whose support extends past 1.
fn random_super_support(rng: &mut ChaCha8Rng) -> Quantizer {
    let half_width = rng.random_range(1.1..2.5);
    let n = rng.random_range(3..12);
    let mut nodes: Vec<f64> = (0..n - 1).map(|_| -rng.random_range(0.01..half_width)).collect();
    nodes.push(-half_width);
    nodes.sort_by(|a, b| a.total_cmp(b));
    nodes.dedup();
    nodes.push(0.0);
    let mut values: Vec<f64> = (0..nodes.len() - 1).map(|_| rng.random_range(0.0..0.5)).collect();
    values.sort_by(|a, b| a.total_cmp(b));
    values.push(0.5);
    Quantizer::tabulated(nodes, values).unwrap()
}

// Admissible unit-support AUPL quantizer with nonnegative slopes.
fn random_unit_support(rng: &mut ChaCha8Rng) -> Quantizer {
    let k = rng.random_range(2..30);
    let mut m: Vec<f64> = (0..k).map(|_| rng.random_range(0.0..1.0)).collect();
    let total: f64 = m.iter().sum();
    m.iter_mut().for_each(|v| *v *= k as f64 / 2.0 / total);
    Quantizer::piecewise_linear(m).unwrap()
}

fn c5_truncation_dominance() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut violations = 0;
    let mut checked = 0;
    for _ in 0..20 {
        let q = random_super_support(&mut rng);
        let t = q.truncate_to_unit_support();
        for s2 in [0.25, 1.0] {
            let d = gauss(s2);
            assert!(is_admissible(&q, &d, 200).unwrap() && is_admissible(&t, &d, 200).unwrap());
            violations += dominance_violations(&t, &q, &d, 200).unwrap().len();
            checked += 1;
        }
    }
    Outcome::new(violations == 0, format!("{checked} quantizer/noise pairs, {violations} grid violations"))
}

fn c6_threshold_dominance() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let d = gauss(1.0);
    let mut violations = 0;
    for _ in 0..20 {
        let q = random_unit_support(&mut rng);
        assert!(is_admissible(&q, &d, 200).unwrap());
        violations += dominance_violations(&Quantizer::threshold(), &q, &d, 200).unwrap().len();
    }
    Outcome::new(violations == 0, format!("20 quantizers, {violations} grid violations"))
}

fn c7_coincidence(designs: &mut Vec<(String, DesignResult)>) -> Outcome {
    let d = gauss(1.0);
    let r = aupl::design(&d, 100, 100, &DesignOptions::default()).unwrap();
    let t = max_crb(&Quantizer::threshold(), &d, 100).unwrap().phi;
    let rel = (r.phi / t - 1.0).abs();
    let out = Outcome::new(rel < 0.01, format!("AUPL {:.6} vs threshold {t:.6} (rel. diff {rel:.2e})", r.phi));
    designs.push(("gaussian sigma=1".into(), r));
    out
}

fn c8_superiority(designs: &mut Vec<(String, DesignResult)>) -> Outcome {
    // Near σ = 0.7 the optimum is a step and the ramp of a K-cell design
    // trails it by O(1/K²), so that point uses a finer grid.
    let points = [(0.05, default_design_size(0.05)), (0.2, default_design_size(0.2)), (0.7, 800)];
    let mut pass = true;
    let mut parts = Vec::new();
    for (name, family) in [("G", NoiseFamily::GAUSSIAN), ("L", NoiseFamily::LAPLACIAN)] {
        let sf = critical_sigma(family).unwrap();
        for (sigma, k) in points {
            let d = family.with_sigma(sigma).unwrap();
            let r = aupl::design(&d, k, k, &DesignOptions::default()).unwrap();
            let phi = r.profile.phi;
            let base = [
                max_crb(&Quantizer::threshold(), &d, k).unwrap().phi,
                max_crb(&Quantizer::sine(), &d, k).unwrap().phi,
                max_crb(&dithering_quantizer(family, sigma, sf).unwrap(), &d, k).unwrap().phi,
            ];
            let best = base.iter().copied().fold(f64::INFINITY, f64::min);
            let mut ok = phi <= best + 1e-6;
            if sigma == 0.05 {
                ok &= phi <= 0.97 * best;
            }
            pass &= ok;
            parts.push(format!(
                "{name} s={sigma}: {phi:.6}/{best:.6}{}",
                if ok { "" } else { " (FAIL)" }
            ));
            designs.push((format!("{name} sigma={sigma}"), r));
        }
    }
    Outcome::new(pass, format!("AUPL/best baseline: {}", parts.join(", ")))
}

fn c9_floor(designs: &[(String, DesignResult)]) -> Outcome {
    let worst = designs
        .iter()
        .map(|(n, r)| (n.as_str(), r.phi.min(r.profile.phi)))
        .fold(("", f64::INFINITY), |a, b| if b.1 < a.1 { b } else { a });
    Outcome::new(
        worst.1 >= PHI0 - 1e-3,
        format!("{} designs, smallest phi {:.6} ({}) vs floor {PHI0:.6}", designs.len(), worst.1, worst.0),
    )
}

fn c10_monte_carlo() -> Outcome {
    let d = gauss(1.0);
    let q = Quantizer::threshold();
    // CRB(0) from the quadrature path: g' by a central difference.
    let h = 1e-4;
    let gp = (g_by_quadrature(&q, &d, h, 1e-14).unwrap() - g_by_quadrature(&q, &d, -h, 1e-14).unwrap()) / (2.0 * h);
    let quad_crb = 0.25 / (gp * gp);
    let closed = PI / 2.0;
    let cfg = SimConfig { theta_true: 0.0, n: 1000, trials: 5000, seed: 2024, quantizer: q, noise: d };
    let r = sim::run(&cfg).unwrap();
    let scaled = r.empirical_mse * 1000.0;
    let ratio = scaled / closed;
    let pass = (0.95..=1.08).contains(&ratio) && (quad_crb / closed - 1.0).abs() < 1e-7;
    Outcome::new(
        pass,
        format!("MSE*N = {scaled:.5}, CRB(0) = {closed:.5} (quadrature {quad_crb:.8}), ratio {ratio:.4}, clamps {}", r.clamp_count),
    )
}

fn c11_cross_checks(designs: &[(String, DesignResult)]) -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut form_gap = 0.0f64;
    for _ in 0..20 {
        let q = random_unit_support(&mut rng);
        let d = gauss(rng.random_range(0.01..2.0));
        let t = rng.random_range(-1.0..1.0);
        let a = g_by_quadrature(&q, &d, t, DEFAULT_TOL).unwrap();
        let b = g_antisymmetric_form(&q, &d, t, DEFAULT_TOL).unwrap();
        form_gap = form_gap.max((a - b).abs());
    }

    let d = gauss(0.3);
    let coeffs = aupl::precompute_coefficients(&d, 40, 40).unwrap();
    let mut grad_err = 0.0f64;
    let mut tested = 0;
    while tested < 20 {
        let m = random_interior_slopes(&mut rng, 40);
        let obj = aupl::objective(&coeffs, &m).unwrap();
        if obj.active.len() != 1 {
            continue;
        }
        let grad = aupl::objective_subgradient(&coeffs, &m).unwrap();
        let l = obj.active[0];
        let i = rng.random_range(0..39);
        // Direction e_i - e_{i+1} keeps Σm fixed.
        let value = |s: f64| {
            let mut mm = m.clone();
            mm[i] += s;
            mm[i + 1] -= s;
            let g = coeffs.g(l, &mm);
            let h = coeffs.g_prime(l, &mm);
            g * (1.0 - g) / (h * h)
        };
        let h = 1e-6;
        let fd = (value(h) - value(-h)) / (2.0 * h);
        let an = grad[i] - grad[i + 1];
        grad_err = grad_err.max((fd - an).abs() / an.abs().max(1e-8));
        tested += 1;
    }

    let path_gap = designs
        .iter()
        .map(|(_, r)| (r.profile.phi / r.phi - 1.0).abs())
        .fold(0.0f64, f64::max);
    let pass = form_gap < 1e-8 && grad_err < 1e-5 && path_gap < 0.01;
    Outcome::new(
        pass,
        format!(
            "g forms max gap {form_gap:.2e}, subgradient max rel. err {grad_err:.2e}, coefficient vs quadrature phi max rel. gap {path_gap:.2e}"
        ),
    )
}

fn random_interior_slopes(rng: &mut ChaCha8Rng, k: usize) -> Vec<f64> {
    let mut m: Vec<f64> = (0..k).map(|_| rng.random_range(0.05..1.0)).collect();
    let total: f64 = m.iter().sum();
    m.iter_mut().for_each(|v| *v *= k as f64 / 2.0 / total);
    m
}

fn run_cli(args: &[&str], threads: Option<&str>) -> bool {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_qdesign"));
    cmd.args(args);
    if let Some(t) = threads {
        cmd.env("QDESIGN_THREADS", t);
    }
    cmd.output().map(|o| o.status.success()).unwrap_or(false)
}

fn outputs_for(dir: &Path, threads: Option<&str>) -> Vec<Vec<u8>> {
    let p = |name: &str| dir.join(name).to_string_lossy().into_owned();
    let design = p("design.json");
    let curve = p("curve.csv");
    let sweep = p("sweep.csv");
    let simulate = p("sim.csv");
    let ok = run_cli(&["design", "--noise", "gg:beta=1,sigma=0.3", "--out", &design, "--random-starts", "2", "--seed", "9"], threads)
        && run_cli(&["crb-curve", "--noise", "gg:beta=2,sigma=0.4", "--quantizer", "sine", "--out", &curve], threads)
        && run_cli(&["sweep", "--family", "gaussian", "--sigmas", "0.1,0.5,1.5", "--out", &sweep], threads)
        && run_cli(
            &["simulate", "--noise", "gg:beta=2,sigma=0.5", "--quantizer", "sine", "--theta", "0.4", "-N", "500", "--trials", "300", "--seed", "77", "--out", &simulate],
            threads,
        );
    assert!(ok, "CLI run failed");
    ["design.json", "design.shape.csv", "design.g.csv", "curve.csv", "curve.json", "sweep.csv", "sim.csv"]
        .iter()
        .map(|n| std::fs::read(dir.join(n)).unwrap())
        .collect()
}

fn c12_determinism() -> Outcome {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let c = tempfile::tempdir().unwrap();
    let first = outputs_for(a.path(), None);
    let second = outputs_for(b.path(), None);
    let serial = outputs_for(c.path(), Some("1"));
    let same = first == second && first == serial;
    Outcome::new(same, format!("{} files compared across two runs and a single-threaded run", first.len()))
}

fn main() {
    // `cargo test` passes harness flags such as `--nocapture`; they are ignored.
    let mut designs: Vec<(String, DesignResult)> = Vec::new();
    let mut results: Vec<(usize, Outcome, f64)> = Vec::new();
    let mut timed = |n: usize, f: &mut dyn FnMut() -> Outcome| {
        let t = Instant::now();
        let o = f();
        let secs = t.elapsed().as_secs_f64();
        println!("criterion {n:>2}: {} ({secs:.1} s) {}", if o.pass { "PASS" } else { "FAIL" }, o.detail);
        results.push((n, o, secs));
    };
    timed(1, &mut c1_noiseless_sine);
    timed(2, &mut c2_high_snr_limits);
    timed(3, &mut c3_critical_sigma);
    timed(4, &mut c4_condition_checker);
    timed(5, &mut c5_truncation_dominance);
    timed(6, &mut c6_threshold_dominance);
    timed(7, &mut || c7_coincidence(&mut designs));
    timed(8, &mut || c8_superiority(&mut designs));
    timed(9, &mut || c9_floor(&designs));
    timed(10, &mut c10_monte_carlo);
    timed(11, &mut || c11_cross_checks(&designs));
    timed(12, &mut c12_determinism);
    let failed: Vec<usize> = results.iter().filter(|r| !r.1.pass).map(|r| r.0).collect();
    println!(
        "acceptance: {} of {} criteria passed{}",
        results.len() - failed.len(),
        results.len(),
        if failed.is_empty() { String::new() } else { format!("; failed: {failed:?}") }
    );
    if !failed.is_empty() {
        std::process::exit(1);
    }
}
