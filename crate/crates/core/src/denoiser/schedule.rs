use crate::geom::Vec3;
use crate::molio::Pose;
use crate::rng::Rng;
use crate::{Error, Result};
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

/// Noise levels σ_1 < … < σ_T in Å. σ_0 = 0 denotes clean coordinates.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiffusionSchedule {
    sigmas: Vec<f64>,
}

pub const DEFAULT_SIGMA_MIN: f64 = 0.1;
pub const DEFAULT_SIGMA_MAX: f64 = 5.0;

impl Default for DiffusionSchedule {
    fn default() -> Self {
        Self::linear(20, DEFAULT_SIGMA_MIN, DEFAULT_SIGMA_MAX).expect("default schedule is valid")
    }
}

impl DiffusionSchedule {
    pub fn linear(steps: usize, sigma_min: f64, sigma_max: f64) -> Result<Self> {
        if steps == 0 {
            return Err(Error::Config("schedule needs at least one step".into()));
        }
        let sigmas = if steps == 1 {
            vec![sigma_max]
        } else {
            (0..steps)
                .map(|k| sigma_min + (sigma_max - sigma_min) * k as f64 / (steps - 1) as f64)
                .collect()
        };
        Self::from_sigmas(sigmas)
    }

    pub fn from_sigmas(sigmas: Vec<f64>) -> Result<Self> {
        let increasing = sigmas.windows(2).all(|w| w[0] < w[1]);
        if sigmas.is_empty() || !increasing || sigmas[0] <= 0.0 || sigmas.iter().any(|s| !s.is_finite()) {
            return Err(Error::Config(
                "sigmas must be positive, finite and strictly increasing".into(),
            ));
        }
        Ok(Self { sigmas })
    }

    /// Number of noise levels T.
    pub fn steps(&self) -> usize {
        self.sigmas.len()
    }

    /// σ_t for t in 0..=T.
    pub fn sigma(&self, t: usize) -> f64 {
        if t == 0 {
            0.0
        } else {
            self.sigmas[t - 1]
        }
    }

    pub fn sigma_max(&self) -> f64 {
        *self.sigmas.last().unwrap()
    }

    pub fn sigmas(&self) -> &[f64] {
        &self.sigmas
    }
}

pub fn standard_normal_vec3(rng: &mut Rng) -> Vec3 {
    Vec3::new(
        StandardNormal.sample(rng),
        StandardNormal.sample(rng),
        StandardNormal.sample(rng),
    )
}

/// Returns `x0 + σ_t·ε` and `ε`. `t = 0` yields the clean pose.
pub fn noise_coords(pose: &Pose, t: usize, schedule: &DiffusionSchedule, rng: &mut Rng) -> Result<(Pose, Vec<Vec3>)> {
    if t > schedule.steps() {
        return Err(Error::Contract(format!(
            "timestep {t} exceeds T = {}",
            schedule.steps()
        )));
    }
    let sigma = schedule.sigma(t);
    let eps: Vec<Vec3> = pose.coordinates.iter().map(|_| standard_normal_vec3(rng)).collect();
    let coordinates = pose.coordinates.iter().zip(&eps).map(|(x, e)| x + e * sigma).collect();
    Ok((
        Pose {
            coordinates,
            score: 0.0,
            provenance: pose.provenance,
        },
        eps,
    ))
}
