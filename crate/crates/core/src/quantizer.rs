//! Probability-form one-bit quantizers `γ(x) = P(Y = S1 | x)`.

use std::f64::consts::FRAC_PI_2;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::noise::{NoiseDensity, NoiseFamily};

/// Tolerance on the slope-vector constraints of a piecewise-linear quantizer.
pub const SLOPE_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub enum Quantizer {
    /// Hard sign quantizer; outputs 1 for `x >= 0`.
    Threshold,
    /// Half-sine ramp on `[-1, 1]`, the noiseless minimax optimum.
    Sine,
    /// Threshold applied after adding independent dither noise.
    Dithered(NoiseDensity),
    /// Antisymmetric unit-support piecewise-linear quantizer stored by slopes.
    PiecewiseLinear(PiecewiseLinear),
    /// Antisymmetric piecewise-linear quantizer on arbitrary nodes of the
    /// negative half-axis.
    Tabulated(Tabulated),
    /// The inner quantizer clamped to 0 below -1 and to 1 above 1.
    Truncated(Box<Quantizer>),
    /// `1 - γ(x)`.
    Complement(Box<Quantizer>),
}

/// Outside `[-half_width, half_width]` the quantizer is constant: `low` to the
/// left and `high` to the right.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Saturation {
    pub half_width: f64,
    pub low: f64,
    pub high: f64,
}

impl Quantizer {
    pub fn threshold() -> Self {
        Quantizer::Threshold
    }

    pub fn sine() -> Self {
        Quantizer::Sine
    }

    /// Dithering quantizer `γ(x) = P(x + D >= 0)` with dither `D` drawn from
    /// `family` at variance `dither_sigma2`.
    pub fn dithered(family: NoiseFamily, dither_sigma2: f64) -> Result<Self> {
        if !(dither_sigma2 > 0.0) || !dither_sigma2.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "dither variance must be positive, got {dither_sigma2}"
            )));
        }
        if matches!(family, NoiseFamily::PointMass) {
            return Err(Error::InvalidParameter("dither family must have a density".into()));
        }
        Ok(Quantizer::Dithered(family.with_variance(dither_sigma2)?))
    }

    pub fn piecewise_linear(slopes: Vec<f64>) -> Result<Self> {
        Ok(Quantizer::PiecewiseLinear(PiecewiseLinear::new(slopes)?))
    }

    pub fn tabulated(nodes: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        Ok(Quantizer::Tabulated(Tabulated::new(nodes, values)?))
    }

    pub fn complement(inner: Quantizer) -> Self {
        Quantizer::Complement(Box::new(inner))
    }

    /// `γ(x)`, always in `[0, 1]`.
    pub fn evaluate(&self, x: f64) -> f64 {
        match self {
            Quantizer::Threshold => {
                if x >= 0.0 {
                    1.0
                } else {
                    0.0
                }
            }
            Quantizer::Sine => {
                if x > 1.0 {
                    1.0
                } else if x < -1.0 {
                    0.0
                } else if x > 0.0 {
                    1.0 - sine_ramp(-x)
                } else {
                    sine_ramp(x)
                }
            }
            Quantizer::Dithered(d) => {
                // P(x + D >= 0) = P(D <= x) by symmetry of D.
                d.cdf(x)
            }
            Quantizer::PiecewiseLinear(p) => antisymmetric(x, |v| p.negative_half(v)),
            Quantizer::Tabulated(t) => antisymmetric(x, |v| t.negative_half(v)),
            Quantizer::Truncated(inner) => {
                if x > 1.0 {
                    1.0
                } else if x < -1.0 {
                    0.0
                } else {
                    inner.evaluate(x)
                }
            }
            Quantizer::Complement(inner) => 1.0 - inner.evaluate(x),
        }
    }

    /// `γ'(x)` where it is defined. At a node of a piecewise-linear quantizer
    /// the mean of the one-sided slopes is returned.
    pub fn derivative(&self, x: f64) -> Option<f64> {
        match self {
            Quantizer::Threshold => (x != 0.0).then_some(0.0),
            Quantizer::Sine => Some(if x.abs() <= 1.0 {
                0.5 * FRAC_PI_2 * (FRAC_PI_2 * x).cos()
            } else {
                0.0
            }),
            Quantizer::Dithered(d) => Some(d.density(x)),
            Quantizer::PiecewiseLinear(p) => Some(p.slope_at(-x.abs())),
            Quantizer::Tabulated(t) => Some(t.slope_at(-x.abs())),
            Quantizer::Truncated(inner) => {
                if x.abs() > 1.0 {
                    Some(0.0)
                } else if x.abs() == 1.0 {
                    inner.derivative(x).map(|d| 0.5 * d)
                } else {
                    inner.derivative(x)
                }
            }
            Quantizer::Complement(inner) => inner.derivative(x).map(|d| -d),
        }
    }

    /// Points where `γ` or its derivative may jump.
    pub fn breakpoints(&self) -> Vec<f64> {
        match self {
            Quantizer::Threshold | Quantizer::Dithered(_) => vec![0.0],
            Quantizer::Sine => vec![-1.0, 1.0],
            Quantizer::PiecewiseLinear(p) => {
                let k = p.k();
                (0..=k)
                    .flat_map(|i| {
                        let x = -((k - i) as f64) / k as f64;
                        [x, -x]
                    })
                    .collect()
            }
            Quantizer::Tabulated(t) => t.nodes.iter().flat_map(|&x| [x, -x]).collect(),
            Quantizer::Truncated(inner) => {
                let mut b = inner.breakpoints();
                b.retain(|x| x.abs() < 1.0);
                b.extend([-1.0, 1.0]);
                b
            }
            Quantizer::Complement(inner) => inner.breakpoints(),
        }
    }

    /// Interval outside which `γ` is constant, if any.
    pub fn saturation(&self) -> Option<Saturation> {
        let unit = |half_width| Saturation {
            half_width,
            low: 0.0,
            high: 1.0,
        };
        match self {
            Quantizer::Threshold => Some(unit(0.0)),
            Quantizer::Sine | Quantizer::PiecewiseLinear(_) => Some(unit(1.0)),
            Quantizer::Dithered(_) => None,
            Quantizer::Tabulated(t) => Some(unit(-t.nodes[0])),
            Quantizer::Truncated(inner) => Some(unit(
                inner.saturation().map_or(1.0, |s| s.half_width.min(1.0)),
            )),
            Quantizer::Complement(inner) => inner.saturation().map(|s| Saturation {
                half_width: s.half_width,
                low: 1.0 - s.low,
                high: 1.0 - s.high,
            }),
        }
    }

    /// Whether `γ(x) = 0` for `x < -1` and `γ(x) = 1` for `x > 1`.
    pub fn is_unit_support(&self) -> bool {
        self.saturation()
            .is_some_and(|s| s.half_width <= 1.0 && s.low == 0.0 && s.high == 1.0)
    }

    /// Clamps the quantizer to 0 below -1 and 1 above 1. Idempotent, and
    /// quantizers already of unit support are returned unchanged.
    pub fn truncate_to_unit_support(&self) -> Quantizer {
        if self.is_unit_support() {
            self.clone()
        } else {
            Quantizer::Truncated(Box::new(self.clone()))
        }
    }

    /// One stochastic output: 1 iff `u < γ(x)`, with `u` uniform on `[0, 1)`.
    pub fn sample_output(&self, x: f64, u: f64) -> u8 {
        u8::from(u < self.evaluate(x))
    }

    pub fn label(&self) -> &'static str {
        match self {
            Quantizer::Threshold => "threshold",
            Quantizer::Sine => "sine",
            Quantizer::Dithered(_) => "dither",
            Quantizer::PiecewiseLinear(_) => "aupl",
            Quantizer::Tabulated(_) => "tabulated",
            Quantizer::Truncated(_) => "truncated",
            Quantizer::Complement(_) => "complement",
        }
    }
}

fn sine_ramp(x: f64) -> f64 {
    0.5 * (1.0 + (FRAC_PI_2 * x).sin())
}

fn antisymmetric(x: f64, negative_half: impl Fn(f64) -> f64) -> f64 {
    if x == 0.0 {
        0.5
    } else if x > 0.0 {
        1.0 - negative_half(-x)
    } else {
        negative_half(x)
    }
}

/// AUPL quantizer on the uniform grid `x_i = -(K - i)/K` of `[-1, 0]`.
#[derive(Debug, Clone, PartialEq)]
pub struct PiecewiseLinear {
    slopes: Vec<f64>,
    // prefix[i] = m_1 + ... + m_i, so γ(x_i) = prefix[i] / K.
    prefix: Vec<f64>,
}

impl PiecewiseLinear {
    pub fn new(slopes: Vec<f64>) -> Result<Self> {
        let k = slopes.len();
        if k == 0 {
            return Err(Error::InvalidSlopes {
                index: 0,
                reason: "slope vector is empty".into(),
            });
        }
        let kf = k as f64;
        let mut prefix = Vec::with_capacity(k + 1);
        prefix.push(0.0);
        let mut acc = 0.0;
        for (i, &m) in slopes.iter().enumerate() {
            if !m.is_finite() {
                return Err(Error::InvalidSlopes {
                    index: i + 1,
                    reason: format!("slope {m} is not finite"),
                });
            }
            acc += m;
            if acc < -SLOPE_TOL || acc > kf + SLOPE_TOL {
                return Err(Error::InvalidSlopes {
                    index: i + 1,
                    reason: format!("prefix sum {acc} outside [0, {k}]"),
                });
            }
            prefix.push(acc);
        }
        if (acc - 0.5 * kf).abs() > SLOPE_TOL {
            return Err(Error::InvalidSlopes {
                index: k,
                reason: format!("slopes sum to {acc}, expected {}", 0.5 * kf),
            });
        }
        Ok(PiecewiseLinear { slopes, prefix })
    }

    pub fn k(&self) -> usize {
        self.slopes.len()
    }

    pub fn slopes(&self) -> &[f64] {
        &self.slopes
    }

    /// `γ` at the grid nodes `x_0 = -1, …, x_K = 0`.
    pub fn node_values(&self) -> Vec<f64> {
        let kf = self.k() as f64;
        self.prefix.iter().map(|s| s / kf).collect()
    }

    fn negative_half(&self, x: f64) -> f64 {
        if x < -1.0 {
            return 0.0;
        }
        let k = self.k();
        let pos = (x + 1.0) * k as f64;
        let i = (pos.floor().max(0.0) as usize).min(k - 1);
        let v = (self.prefix[i] + self.slopes[i] * (pos - i as f64)) / k as f64;
        v.clamp(0.0, 1.0)
    }

    fn slope_at(&self, x: f64) -> f64 {
        if x < -1.0 {
            return 0.0;
        }
        let k = self.k();
        let pos = (x + 1.0) * k as f64;
        if pos == pos.floor() {
            let i = pos as usize;
            let left = if i == 0 { 0.0 } else { self.slopes[i - 1] };
            let right = if i == k { self.slopes[k - 1] } else { self.slopes[i] };
            return 0.5 * (left + right);
        }
        self.slopes[(pos.floor() as usize).min(k - 1)]
    }
}

/// On-disk form of an AUPL quantizer: `{"K": int, "slopes": [...]}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AuplFile {
    #[serde(rename = "K")]
    pub k: usize,
    pub slopes: Vec<f64>,
}

impl AuplFile {
    pub fn into_quantizer(self) -> Result<Quantizer> {
        if self.k != self.slopes.len() {
            return Err(Error::InvalidSlopes {
                index: self.slopes.len(),
                reason: format!("K = {} but {} slopes given", self.k, self.slopes.len()),
            });
        }
        Quantizer::piecewise_linear(self.slopes)
    }
}

impl From<&PiecewiseLinear> for AuplFile {
    fn from(p: &PiecewiseLinear) -> Self {
        AuplFile {
            k: p.k(),
            slopes: p.slopes.clone(),
        }
    }
}

/// Antisymmetric quantizer interpolating `values` at `nodes` on the negative
/// half-axis (`nodes` increasing and ending at 0, where the value is 1/2);
/// zero to the left of the first node.
#[derive(Debug, Clone, PartialEq)]
pub struct Tabulated {
    nodes: Vec<f64>,
    values: Vec<f64>,
}

impl Tabulated {
    pub fn new(nodes: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        if nodes.len() < 2 || nodes.len() != values.len() {
            return Err(Error::InvalidParameter(
                "tabulated quantizer needs matching node and value lists of length >= 2".into(),
            ));
        }
        if nodes.windows(2).any(|w| !(w[1] > w[0])) || *nodes.last().unwrap() != 0.0 {
            return Err(Error::InvalidParameter(
                "tabulated nodes must increase strictly and end at 0".into(),
            ));
        }
        if values.iter().any(|v| !(0.0..=1.0).contains(v)) || *values.last().unwrap() != 0.5 {
            return Err(Error::InvalidParameter(
                "tabulated values must lie in [0, 1] and end at 1/2".into(),
            ));
        }
        Ok(Tabulated { nodes, values })
    }

    fn segment(&self, x: f64) -> usize {
        self.nodes.partition_point(|&n| n <= x).saturating_sub(1).min(self.nodes.len() - 2)
    }

    fn negative_half(&self, x: f64) -> f64 {
        if x < self.nodes[0] {
            return 0.0;
        }
        let i = self.segment(x);
        let (x0, x1) = (self.nodes[i], self.nodes[i + 1]);
        let t = (x - x0) / (x1 - x0);
        self.values[i] + t * (self.values[i + 1] - self.values[i])
    }

    fn slope_at(&self, x: f64) -> f64 {
        if x < self.nodes[0] {
            return 0.0;
        }
        let i = self.segment(x);
        (self.values[i + 1] - self.values[i]) / (self.nodes[i + 1] - self.nodes[i])
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn threshold_follows_sign_convention() {
        let q = Quantizer::threshold();
        assert_eq!(q.evaluate(0.5), 1.0);
        assert_eq!(q.evaluate(0.0), 1.0);
        assert_eq!(q.evaluate(-0.5), 0.0);
        assert_eq!(q.evaluate(-3.0), 0.0);
        assert_eq!(q.sample_output(0.5, 0.999), 1);
    }

    #[test]
    fn sine_reference_values() {
        let q = Quantizer::sine();
        assert_eq!(q.evaluate(0.0), 0.5);
        assert_eq!(q.evaluate(1.0), 1.0);
        assert_eq!(q.evaluate(2.0), 1.0);
        assert_eq!(q.evaluate(-1.0), 0.0);
        let expected = 0.5 * (1.0 - (std::f64::consts::FRAC_PI_4).sin());
        assert!((q.evaluate(-0.5) - expected).abs() < 1e-15);
        assert!((expected - 0.146_446_609_406_726_24).abs() < 1e-15);
        assert_eq!(q.sample_output(0.0, 0.3), 1);
        assert_eq!(q.sample_output(0.0, 0.7), 0);
    }

    #[test]
    fn dithered_is_dither_cdf() {
        let q = Quantizer::dithered(NoiseFamily::GAUSSIAN, 1.0).unwrap();
        assert_eq!(q.evaluate(0.0), 0.5);
        assert!((q.evaluate(1.0) - 0.841_344_746_068_542_9).abs() < 1e-14);
        assert!((q.evaluate(40.0) - 1.0).abs() < 1e-15);
        assert!(matches!(
            Quantizer::dithered(NoiseFamily::GAUSSIAN, 0.0),
            Err(Error::InvalidParameter(_))
        ));
        assert!(Quantizer::dithered(NoiseFamily::GAUSSIAN, -1.0).is_err());
    }

    #[test]
    fn piecewise_linear_examples() {
        let q = Quantizer::piecewise_linear(vec![0.5]).unwrap();
        assert_eq!(q.evaluate(-1.0), 0.0);
        assert_eq!(q.evaluate(-0.5), 0.25);
        assert_eq!(q.evaluate(0.0), 0.5);
        assert_eq!(q.evaluate(-1.5), 0.0);
        assert_eq!(q.evaluate(1.5), 1.0);
        let q2 = Quantizer::piecewise_linear(vec![0.0, 1.0]).unwrap();
        assert!((q2.evaluate(-0.25) - 0.25).abs() < 1e-15);
        assert_eq!(q2.evaluate(-0.75), 0.0);
        assert!((q2.evaluate(0.25) - 0.75).abs() < 1e-15);
    }

    #[test]
    fn piecewise_linear_rejects_bad_slopes() {
        assert!(matches!(
            PiecewiseLinear::new(vec![-1.0, 2.0]),
            Err(Error::InvalidSlopes { index: 1, .. })
        ));
        assert!(matches!(
            PiecewiseLinear::new(vec![0.0, 0.0, 5.0, -3.0]),
            Err(Error::InvalidSlopes { index: 3, .. })
        ));
        assert!(matches!(
            PiecewiseLinear::new(vec![0.5, 0.6]),
            Err(Error::InvalidSlopes { index: 2, .. })
        ));
        assert!(PiecewiseLinear::new(vec![]).is_err());
    }

    #[test]
    fn truncation_examples() {
        let sine = Quantizer::sine();
        assert_eq!(sine.truncate_to_unit_support(), sine);
        let dith = Quantizer::dithered(NoiseFamily::GAUSSIAN, 1.0).unwrap();
        assert!((dith.evaluate(-2.0) - 0.022_750_131_948_179_2).abs() < 1e-14);
        let tr = dith.truncate_to_unit_support();
        assert_eq!(tr.evaluate(-2.0), 0.0);
        assert_eq!(tr.evaluate(1.5), 1.0);
        assert_eq!(tr.evaluate(0.3), dith.evaluate(0.3));
        assert_eq!(tr.truncate_to_unit_support(), tr);
        assert!(tr.is_unit_support());
        assert!(!dith.is_unit_support());
    }

    #[test]
    fn tabulated_and_complement() {
        let t = Quantizer::tabulated(vec![-2.0, -1.0, 0.0], vec![0.0, 0.2, 0.5]).unwrap();
        assert!((t.evaluate(-1.5) - 0.1).abs() < 1e-15);
        assert!((t.evaluate(1.5) - 0.9).abs() < 1e-15);
        assert!(!t.is_unit_support());
        let c = Quantizer::complement(Quantizer::threshold());
        assert_eq!(c.evaluate(1.0), 0.0);
        assert_eq!(c.evaluate(-1.0), 1.0);
        assert!(Quantizer::tabulated(vec![-1.0, 0.0], vec![0.0, 0.4]).is_err());
    }

    #[test]
    fn aupl_file_round_trip_shape() {
        let json = r#"{"K": 2, "slopes": [0.0, 1.0]}"#;
        let f: AuplFile = serde_json::from_str(json).unwrap();
        assert_eq!(f.k, 2);
        assert!(f.clone().into_quantizer().is_ok());
        let bad = AuplFile { k: 3, slopes: vec![0.0, 1.0] };
        assert!(bad.into_quantizer().is_err());
        assert_eq!(serde_json::to_string(&f).unwrap(), r#"{"K":2,"slopes":[0.0,1.0]}"#);
    }

    #[test]
    fn sample_output_mean_matches_probability() {
        use rand::{Rng, SeedableRng};
        let q = Quantizer::sine();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        let n = 1_000_000;
        let hits: u64 = (0..n).map(|_| q.sample_output(-0.5, rng.random::<f64>()) as u64).sum();
        let mean = hits as f64 / n as f64;
        assert!((mean - 0.146_45).abs() < 1e-3, "{mean}");
    }

    fn random_slopes(k: usize, raw: &[f64]) -> Vec<f64> {
        // Node values in [0, 1] ending at 1/2, turned into slopes.
        let mut nodes: Vec<f64> = raw.iter().take(k - 1).copied().collect();
        nodes.push(0.5);
        let mut prev = 0.0;
        nodes
            .iter()
            .map(|&v| {
                let m = (v - prev) * k as f64;
                prev = v;
                m
            })
            .collect()
    }

    fn all_variants(raw: &[f64]) -> Vec<Quantizer> {
        vec![
            Quantizer::threshold(),
            Quantizer::sine(),
            Quantizer::dithered(NoiseFamily::LAPLACIAN, 0.3).unwrap(),
            Quantizer::piecewise_linear(random_slopes(8, raw)).unwrap(),
            Quantizer::tabulated(vec![-2.5, -1.2, -0.4, 0.0], vec![0.0, raw[0], raw[1], 0.5]).unwrap(),
            Quantizer::dithered(NoiseFamily::GAUSSIAN, 1.0).unwrap().truncate_to_unit_support(),
            Quantizer::complement(Quantizer::sine()),
        ]
    }

    proptest! {
        #[test]
        fn antisymmetry_and_range(x in -3.0f64..3.0, raw in proptest::collection::vec(0.0f64..1.0, 7)) {
            prop_assume!(x != 0.0);
            for q in all_variants(&raw) {
                let a = q.evaluate(x);
                let b = q.evaluate(-x);
                prop_assert!((0.0..=1.0).contains(&a));
                prop_assert!((a + b - 1.0).abs() <= 2.0 * f64::EPSILON, "{} at {}: {}", q.label(), x, a + b);
            }
        }

        #[test]
        fn piecewise_linear_endpoint_values_bound_the_function(raw in proptest::collection::vec(0.0f64..1.0, 7), x in -1.0f64..0.0) {
            let p = PiecewiseLinear::new(random_slopes(8, &raw)).unwrap();
            let nodes = p.node_values();
            let lo = nodes.iter().copied().fold(f64::INFINITY, f64::min);
            let hi = nodes.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            prop_assert!(lo >= 0.0 && hi <= 1.0);
            let v = Quantizer::PiecewiseLinear(p).evaluate(x);
            prop_assert!(v >= lo - 1e-15 && v <= hi + 1e-15);
        }

        #[test]
        fn truncation_is_idempotent(raw in proptest::collection::vec(0.0f64..1.0, 7), x in -3.0f64..3.0) {
            for q in all_variants(&raw) {
                let t = q.truncate_to_unit_support();
                prop_assert_eq!(t.truncate_to_unit_support(), t.clone());
                if x.abs() <= 1.0 {
                    prop_assert_eq!(t.evaluate(x), q.evaluate(x));
                }
            }
        }
    }
}
