//! Monte Carlo simulation of sensors, one-bit quantization and maximum
//! likelihood fusion by inverting `g`.
//!
//! Trial `i` draws from `ChaCha8Rng::seed_from_u64(seed)` on stream `i`, so a
//! run is reproducible regardless of how trials are scheduled.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::crb::{crb, g_of_theta, is_admissible};
use crate::error::{Error, Result};
use crate::noise::NoiseDensity;
use crate::quantizer::Quantizer;

/// Bisection tolerance of the inversion.
pub const INVERSION_TOL: f64 = 1e-10;
const ADMISSIBILITY_GRID: usize = 200;

#[derive(Debug, Clone, PartialEq)]
pub struct SimConfig {
    pub theta_true: f64,
    pub n: usize,
    pub trials: usize,
    pub seed: u64,
    pub quantizer: Quantizer,
    pub noise: NoiseDensity,
}

impl SimConfig {
    fn validate(&self) -> Result<()> {
        if !(-1.0..=1.0).contains(&self.theta_true) {
            return Err(Error::InvalidParameter(format!(
                "theta must lie in [-1, 1], got {}",
                self.theta_true
            )));
        }
        if self.n == 0 || self.trials == 0 {
            return Err(Error::InvalidParameter("N and trials must be at least 1".into()));
        }
        Ok(())
    }

    /// Generator for trial `index`.
    pub fn trial_rng(&self, index: u64) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(index);
        rng
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SimReport {
    pub theta: f64,
    #[serde(rename = "N")]
    pub n: usize,
    pub trials: usize,
    pub empirical_mse: f64,
    pub empirical_bias: f64,
    #[serde(rename = "crb_over_N")]
    pub crb_over_n: f64,
    pub efficiency: f64,
    pub clamp_count: usize,
    /// Fraction of ones over all sensors and trials.
    pub mean_output: f64,
}

impl SimReport {
    pub const CSV_HEADER: &'static str = "theta,N,trials,mse,bias,crb_over_N,efficiency,clamps";

    pub fn csv_row(&self) -> String {
        format!(
            "{},{},{},{},{},{},{},{}",
            self.theta,
            self.n,
            self.trials,
            self.empirical_mse,
            self.empirical_bias,
            self.crb_over_n,
            self.efficiency,
            self.clamp_count
        )
    }
}

/// Inverts `g` on `[-1, 1]` by bisection.
#[derive(Debug, Clone)]
pub struct Inverter<'a> {
    q: &'a Quantizer,
    d: &'a NoiseDensity,
    g_low: f64,
    g_high: f64,
}

/// An estimate and whether the sample mean fell outside `g`'s range.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate {
    pub theta: f64,
    pub clamped: bool,
}

impl<'a> Inverter<'a> {
    pub fn new(q: &'a Quantizer, d: &'a NoiseDensity) -> Result<Self> {
        Ok(Self { q, d, g_low: g_of_theta(q, d, -1.0)?, g_high: g_of_theta(q, d, 1.0)? })
    }

    pub fn invert(&self, y: f64) -> Result<Estimate> {
        if y < self.g_low {
            return Ok(Estimate { theta: -1.0, clamped: true });
        }
        if y > self.g_high {
            return Ok(Estimate { theta: 1.0, clamped: true });
        }
        let (mut lo, mut hi) = (-1.0f64, 1.0f64);
        while hi - lo > INVERSION_TOL {
            let mid = 0.5 * (lo + hi);
            let g = g_of_theta(self.q, self.d, mid)?;
            if g == y {
                return Ok(Estimate { theta: mid, clamped: false });
            }
            if g < y {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        Ok(Estimate { theta: 0.5 * (lo + hi), clamped: false })
    }
}

// Number of ones among `n` sensors.
fn count_ones<R: Rng>(cfg: &SimConfig, rng: &mut R) -> usize {
    (0..cfg.n)
        .map(|_| {
            let x = cfg.theta_true + cfg.noise.sample(rng);
            let u: f64 = rng.random();
            cfg.quantizer.sample_output(x, u) as usize
        })
        .sum()
}

/// One trial: `N` sensors, sample mean `Ȳ`, estimate `g⁻¹(Ȳ)`.
pub fn run_trial<R: Rng>(cfg: &SimConfig, rng: &mut R) -> Result<Estimate> {
    cfg.validate()?;
    if !is_admissible(&cfg.quantizer, &cfg.noise, ADMISSIBILITY_GRID)? {
        return Err(Error::Inadmissible);
    }
    let ones = count_ones(cfg, rng);
    Inverter::new(&cfg.quantizer, &cfg.noise)?.invert(ones as f64 / cfg.n as f64)
}

/// Runs all trials and compares the empirical error with `CRB(θ)/N`.
pub fn run(cfg: &SimConfig) -> Result<SimReport> {
    cfg.validate()?;
    if !is_admissible(&cfg.quantizer, &cfg.noise, ADMISSIBILITY_GRID)? {
        return Err(Error::Inadmissible);
    }
    let counts: Vec<usize> = (0..cfg.trials as u64)
        .into_par_iter()
        .map(|i| count_ones(cfg, &mut cfg.trial_rng(i)))
        .collect();

    let inverter = Inverter::new(&cfg.quantizer, &cfg.noise)?;
    let mut distinct: Vec<usize> = counts.clone();
    distinct.sort_unstable();
    distinct.dedup();
    let estimates: BTreeMap<usize, Estimate> = distinct
        .par_iter()
        .map(|&c| Ok((c, inverter.invert(c as f64 / cfg.n as f64)?)))
        .collect::<Result<_>>()?;

    let trials = cfg.trials as f64;
    let mut sq = 0.0;
    let mut bias = 0.0;
    let mut clamps = 0;
    for c in &counts {
        let e = estimates[c];
        let err = e.theta - cfg.theta_true;
        sq += err * err;
        bias += err;
        clamps += usize::from(e.clamped);
    }
    let mse = sq / trials;
    let crb_over_n = crb(&cfg.quantizer, &cfg.noise, cfg.theta_true)? / cfg.n as f64;
    let ones: usize = counts.iter().sum();
    Ok(SimReport {
        theta: cfg.theta_true,
        n: cfg.n,
        trials: cfg.trials,
        empirical_mse: mse,
        empirical_bias: bias / trials,
        crb_over_n,
        efficiency: crb_over_n / mse,
        clamp_count: clamps,
        mean_output: ones as f64 / (trials * cfg.n as f64),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::noise::NoiseFamily;
    use proptest::prelude::*;
    use std::f64::consts::PI;

    fn threshold_cfg(n: usize, trials: usize, seed: u64) -> SimConfig {
        SimConfig {
            theta_true: 0.0,
            n,
            trials,
            seed,
            quantizer: Quantizer::threshold(),
            noise: NoiseDensity::gaussian(1.0).unwrap(),
        }
    }

    #[test]
    fn half_inverts_to_zero() {
        let d = NoiseDensity::gaussian(0.3).unwrap();
        for q in [Quantizer::threshold(), Quantizer::sine()] {
            let e = Inverter::new(&q, &d).unwrap().invert(0.5).unwrap();
            assert!(e.theta.abs() < 1e-10 && !e.clamped);
        }
    }

    #[test]
    fn noiseless_sine_is_consistent() {
        let cfg = SimConfig {
            theta_true: 0.3,
            n: 200_000,
            trials: 1,
            seed: 5,
            quantizer: Quantizer::sine(),
            noise: NoiseDensity::point_mass(),
        };
        let e = run_trial(&cfg, &mut cfg.trial_rng(0)).unwrap();
        // Binomial standard error of Ȳ is about 1e-3; divide by g'(0.3).
        let sd = (0.5f64 * 0.5 / 200_000.0).sqrt() / (PI / 4.0 * (0.15 * PI).cos());
        assert!((e.theta - 0.3).abs() < 5.0 * sd);
    }

    #[test]
    fn single_threshold_trial_within_five_sigma() {
        let cfg = threshold_cfg(10_000, 1, 3);
        let e = run_trial(&cfg, &mut cfg.trial_rng(0)).unwrap();
        assert!(e.theta.abs() < 5.0 * (PI / 2.0 / 10_000.0).sqrt());
    }

    #[test]
    fn single_trial_report() {
        let cfg = threshold_cfg(100, 1, 9);
        let r = run(&cfg).unwrap();
        let e = run_trial(&cfg, &mut cfg.trial_rng(0)).unwrap();
        assert_eq!(r.empirical_mse, e.theta * e.theta);
        assert_eq!(r.empirical_bias, e.theta);
    }

    #[test]
    fn threshold_efficiency() {
        let r = run(&threshold_cfg(1000, 5000, 2024)).unwrap();
        assert!((r.crb_over_n * 1000.0 - PI / 2.0).abs() < 1e-12);
        assert!((0.93..=1.05).contains(&r.efficiency), "{r:?}");
        assert!(r.empirical_bias.abs() < 4.0 * (r.empirical_mse / 5000.0).sqrt());
        // Mean output within 4 binomial standard errors of g(0) = 1/2.
        assert!((r.mean_output - 0.5).abs() < 4.0 * (0.25 / 5e6f64).sqrt());
    }

    #[test]
    fn sine_near_boundary() {
        let cfg = SimConfig {
            theta_true: -0.95,
            n: 1000,
            trials: 5000,
            seed: 77,
            quantizer: Quantizer::sine(),
            noise: NoiseDensity::gaussian(0.05 * 0.05).unwrap(),
        };
        let r = run(&cfg).unwrap();
        let scaled = r.empirical_mse * 1000.0;
        let bound = r.crb_over_n * 1000.0;
        assert!((scaled / bound - 1.0).abs() < 0.15, "{scaled} vs {bound}");
    }

    #[test]
    fn reproducible_and_seed_sensitive() {
        let a = run(&threshold_cfg(300, 200, 1)).unwrap();
        let b = run(&threshold_cfg(300, 200, 1)).unwrap();
        let c = run(&threshold_cfg(300, 200, 2)).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.csv_row(), b.csv_row());
        assert_ne!(a.empirical_mse, c.empirical_mse);
    }

    #[test]
    fn rejects_bad_configurations() {
        let mut cfg = threshold_cfg(10, 10, 0);
        cfg.theta_true = 1.5;
        assert!(run(&cfg).is_err());
        let mut cfg = threshold_cfg(0, 10, 0);
        assert!(run(&cfg).is_err());
        cfg.n = 10;
        cfg.quantizer = Quantizer::complement(Quantizer::threshold());
        assert_eq!(run(&cfg), Err(Error::Inadmissible));
    }

    #[test]
    fn clamping_is_counted() {
        // Few sensors under tiny noise: Ȳ often lands on 0 or 1.
        let cfg = SimConfig {
            theta_true: -0.99,
            n: 5,
            trials: 400,
            seed: 4,
            quantizer: Quantizer::sine(),
            noise: NoiseDensity::gaussian(1e-4).unwrap(),
        };
        let r = run(&cfg).unwrap();
        assert!(r.clamp_count > 0);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(100))]

        #[test]
        fn inversion_round_trip(t in -1.0f64..1.0, which in 0usize..3) {
            let d = NoiseDensity::generalized_gaussian(2.0, 0.2).unwrap();
            let q = match which {
                0 => Quantizer::threshold(),
                1 => Quantizer::sine(),
                _ => Quantizer::dithered(NoiseFamily::LAPLACIAN, 0.1).unwrap(),
            };
            let inv = Inverter::new(&q, &d).unwrap();
            let e = inv.invert(g_of_theta(&q, &d, t).unwrap()).unwrap();
            prop_assert!((e.theta - t).abs() < 1e-8);
        }
    }
}
