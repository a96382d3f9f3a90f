//! Symmetric zero-mean noise densities.
//!
//! The generalized Gaussian family with shape `beta` and variance `sigma2`
//! has density `beta / (2 alpha Γ(1/beta)) exp(-(|w|/alpha)^beta)` with
//! `alpha^2 = sigma2 Γ(1/beta) / Γ(3/beta)`; `beta = 1` is Laplacian and
//! `beta = 2` Gaussian. A point mass at zero stands in for noiseless sensing.

use rand::Rng;
use rand_distr::{Distribution, Gamma};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::special::{gamma, gamma_q};

/// Shape descriptor of a noise family with the scale left free.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum NoiseFamily {
    GeneralizedGaussian { beta: f64 },
    PointMass,
}

impl NoiseFamily {
    pub const GAUSSIAN: NoiseFamily = NoiseFamily::GeneralizedGaussian { beta: 2.0 };
    pub const LAPLACIAN: NoiseFamily = NoiseFamily::GeneralizedGaussian { beta: 1.0 };

    /// Generalized Gaussian family. Shapes below 1 have a cusp at the mode and
    /// are rejected.
    pub fn generalized_gaussian(beta: f64) -> Result<Self> {
        if !beta.is_finite() || !(1.0..=64.0).contains(&beta) {
            return Err(Error::InvalidParameter(format!(
                "generalized Gaussian shape must lie in [1, 64], got {beta}"
            )));
        }
        Ok(NoiseFamily::GeneralizedGaussian { beta })
    }

    pub fn beta(&self) -> Option<f64> {
        match *self {
            NoiseFamily::GeneralizedGaussian { beta } => Some(beta),
            NoiseFamily::PointMass => None,
        }
    }

    /// Member of the family with standard deviation `sigma`.
    pub fn with_sigma(self, sigma: f64) -> Result<NoiseDensity> {
        self.with_variance(sigma * sigma)
    }

    /// Member of the family with variance `sigma2`.
    pub fn with_variance(self, sigma2: f64) -> Result<NoiseDensity> {
        match self {
            NoiseFamily::PointMass => Ok(NoiseDensity::point_mass()),
            NoiseFamily::GeneralizedGaussian { beta } => NoiseDensity::generalized_gaussian(beta, sigma2),
        }
    }
}

/// A symmetric zero-mean noise density. Immutable after construction.
#[derive(Debug, Clone, PartialEq)]
pub struct NoiseDensity {
    family: NoiseFamily,
    sigma2: f64,
    alpha: f64,
    norm: f64,
}

/// A grid point at which `f'(w - z) + f'(w + z) > 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConditionWitness {
    pub w: f64,
    pub z: f64,
    pub value: f64,
}

/// Slack allowed by the threshold-optimality condition check.
pub const CONDITION_SLACK: f64 = 1e-12;
/// Default grid spacing of the threshold-optimality condition check.
pub const CONDITION_GRID_STEP: f64 = 1e-3;

impl NoiseDensity {
    pub fn generalized_gaussian(beta: f64, sigma2: f64) -> Result<Self> {
        let family = NoiseFamily::generalized_gaussian(beta)?;
        if !sigma2.is_finite() || sigma2 <= 0.0 {
            return Err(Error::InvalidParameter(format!(
                "variance must be positive and finite, got {sigma2}"
            )));
        }
        let g1 = gamma(1.0 / beta);
        let alpha = (sigma2 * g1 / gamma(3.0 / beta)).sqrt();
        Ok(NoiseDensity {
            family,
            sigma2,
            alpha,
            norm: beta / (2.0 * alpha * g1),
        })
    }

    pub fn gaussian(sigma2: f64) -> Result<Self> {
        Self::generalized_gaussian(2.0, sigma2)
    }

    pub fn laplacian(sigma2: f64) -> Result<Self> {
        Self::generalized_gaussian(1.0, sigma2)
    }

    pub fn point_mass() -> Self {
        NoiseDensity {
            family: NoiseFamily::PointMass,
            sigma2: 0.0,
            alpha: 0.0,
            norm: f64::INFINITY,
        }
    }

    pub fn family(&self) -> NoiseFamily {
        self.family
    }

    pub fn beta(&self) -> Option<f64> {
        self.family.beta()
    }

    pub fn variance(&self) -> f64 {
        self.sigma2
    }

    pub fn sigma(&self) -> f64 {
        self.sigma2.sqrt()
    }

    /// Scale `alpha` of the generalized Gaussian parameterization (0 for a point mass).
    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn is_point_mass(&self) -> bool {
        matches!(self.family, NoiseFamily::PointMass)
    }

    fn shape(&self) -> Result<f64> {
        self.beta().ok_or(Error::NoDensity)
    }

    pub fn pdf(&self, w: f64) -> Result<f64> {
        self.shape()?;
        Ok(self.density(w))
    }

    /// Density without the family check; callers guarantee a density exists.
    pub(crate) fn density(&self, w: f64) -> f64 {
        let NoiseFamily::GeneralizedGaussian { beta } = self.family else {
            unreachable!("density() called on point mass");
        };
        let u = w.abs() / self.alpha;
        let e = if beta == 2.0 {
            u * u
        } else if beta == 1.0 {
            u
        } else {
            u.powf(beta)
        };
        self.norm * (-e).exp()
    }

    /// Distribution function. The point mass gives the unit step with value 1 at 0.
    pub fn cdf(&self, w: f64) -> f64 {
        match self.family {
            NoiseFamily::PointMass => {
                if w >= 0.0 {
                    1.0
                } else {
                    0.0
                }
            }
            NoiseFamily::GeneralizedGaussian { beta } => {
                let tail = 0.5 * gamma_q(1.0 / beta, (w.abs() / self.alpha).powf(beta));
                if w < 0.0 {
                    tail
                } else {
                    1.0 - tail
                }
            }
        }
    }

    /// Derivative of the density. Requires a differentiable point: the
    /// Laplacian is not differentiable at the origin.
    pub fn pdf_derivative(&self, w: f64) -> Result<f64> {
        let beta = self.shape()?;
        if beta == 1.0 && w == 0.0 {
            return Err(Error::NotDifferentiable { w });
        }
        Ok(self.density_derivative(w))
    }

    pub(crate) fn density_derivative(&self, w: f64) -> f64 {
        let NoiseFamily::GeneralizedGaussian { beta } = self.family else {
            unreachable!("density_derivative() called on point mass");
        };
        if w == 0.0 {
            return 0.0;
        }
        let u = w.abs() / self.alpha;
        let du = if beta == 2.0 {
            2.0 * u
        } else if beta == 1.0 {
            1.0
        } else {
            beta * u.powf(beta - 1.0)
        };
        -w.signum() * du / self.alpha * self.density(w)
    }

    /// `sigma^-1 ∫_0^∞ w f(w) dw`; scale invariant and strictly below 1/2.
    pub fn normalized_one_sided_mean(&self) -> Result<f64> {
        let beta = self.shape()?;
        Ok(one_sided_mean_for_shape(beta))
    }

    /// `sigma^-4 ∫ w^4 f(w) dw` (the kurtosis); scale invariant.
    pub fn normalized_fourth_moment(&self) -> Result<f64> {
        let beta = self.shape()?;
        let g3 = gamma(3.0 / beta);
        Ok(gamma(5.0 / beta) * gamma(1.0 / beta) / (g3 * g3))
    }

    /// Half-width beyond which the tail mass on either side is below ~1e-17.
    pub fn effective_radius(&self) -> f64 {
        match self.family {
            NoiseFamily::PointMass => 0.0,
            NoiseFamily::GeneralizedGaussian { beta } => {
                (10.0 * self.sigma()).max(self.alpha * 40f64.powf(1.0 / beta))
            }
        }
    }

    /// Largest violation of `f'(w - z) + f'(w + z) <= 0` over a uniform grid
    /// on `[0, 1]^2` with spacing `grid_step`, or `None` if the condition holds
    /// everywhere on the grid (within [`CONDITION_SLACK`]).
    ///
    /// This is a dense-grid check, not a proof over the continuum; the
    /// condition is smooth in `(w, z)` for shapes above 1, so refinement converges.
    pub fn threshold_condition_witness(&self, grid_step: f64) -> Result<Option<ConditionWitness>> {
        let beta = self.shape()?;
        if beta <= 1.0 {
            return Err(Error::NotDifferentiable { w: 0.0 });
        }
        if !(grid_step > 0.0 && grid_step <= 1.0) {
            return Err(Error::InvalidParameter(format!(
                "grid step must lie in (0, 1], got {grid_step}"
            )));
        }
        let n = (1.0 / grid_step).round().max(1.0) as usize;
        let mut worst: Option<ConditionWitness> = None;
        for i in 0..=n {
            let w = i as f64 / n as f64;
            for j in 0..=n {
                let z = j as f64 / n as f64;
                let value = self.density_derivative(w - z) + self.density_derivative(w + z);
                if value > CONDITION_SLACK && worst.is_none_or(|c| value > c.value) {
                    worst = Some(ConditionWitness { w, z, value });
                }
            }
        }
        Ok(worst)
    }

    /// Whether `f'(w - z) + f'(w + z) <= 0` holds on the `[0, 1]^2` grid.
    pub fn check_threshold_optimality_condition(&self, grid_step: f64) -> Result<bool> {
        Ok(self.threshold_condition_witness(grid_step)?.is_none())
    }

    /// Draws one noise sample.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        match self.family {
            NoiseFamily::PointMass => 0.0,
            NoiseFamily::GeneralizedGaussian { beta } => {
                // |W| / alpha = G^(1/beta) with G ~ Gamma(1/beta, 1).
                let g: f64 = Gamma::new(1.0 / beta, 1.0)
                    .expect("valid gamma shape")
                    .sample(rng);
                let magnitude = self.alpha * g.powf(1.0 / beta);
                if rng.random::<bool>() {
                    magnitude
                } else {
                    -magnitude
                }
            }
        }
    }
}

/// Normalized one-sided mean `Γ(2/β) / (2 sqrt(Γ(1/β) Γ(3/β)))` of the
/// generalized Gaussian with shape `beta`.
pub(crate) fn one_sided_mean_for_shape(beta: f64) -> f64 {
    // alpha / sigma = sqrt(Γ(1/β) / Γ(3/β))
    let g1 = gamma(1.0 / beta);
    let scale = (g1 / gamma(3.0 / beta)).sqrt();
    scale * gamma(2.0 / beta) / (2.0 * g1)
}
