//! Angular sampling of the far-field sphere.
//!
//! Directions are indexed θ-major: `k = i_theta * phi.len() + i_phi`.
//! Pattern vectors hold the θ-polarized block (`0..K`) followed by the
//! φ-polarized block (`K..2K`).

use alloc::format;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::math;

#[derive(Debug, Clone, PartialEq)]
pub struct AngularGrid {
    theta_deg: Vec<f64>,
    phi_deg: Vec<f64>,
}

/// Weighting used for inner products over the grid.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SphereWeighting {
    /// Plain ℓ2 over the 2K samples.
    #[default]
    Unweighted,
    /// sin(θ) solid-angle quadrature, normalized to mean weight 1.
    SinTheta,
}

impl AngularGrid {
    pub fn new(theta_deg: Vec<f64>, phi_deg: Vec<f64>) -> Result<Self> {
        if theta_deg.is_empty() || phi_deg.is_empty() {
            return Err(Error::InvalidGrid("theta and phi lists must be nonempty".into()));
        }
        check_axis("theta", &theta_deg, |t| (0.0..=180.0).contains(&t))?;
        check_axis("phi", &phi_deg, |p| (0.0..360.0).contains(&p))?;
        Ok(Self { theta_deg, phi_deg })
    }

    /// θ from 0° to 180° inclusive and φ from 0° up to (not including) 360°,
    /// both at `step_deg`.
    pub fn uniform(step_deg: f64) -> Result<Self> {
        if !(step_deg > 0.0) || step_deg > 180.0 {
            return Err(Error::InvalidGrid(format!("step {step_deg} must be in (0, 180]")));
        }
        let n_theta = (180.0 / step_deg + 1e-9) as usize + 1;
        let n_phi = libm::ceil(360.0 / step_deg - 1e-9) as usize;
        let theta = (0..n_theta).map(|i| i as f64 * step_deg).collect();
        let phi = (0..n_phi).map(|i| i as f64 * step_deg).collect();
        Self::new(theta, phi)
    }

    pub fn theta_deg(&self) -> &[f64] {
        &self.theta_deg
    }

    pub fn phi_deg(&self) -> &[f64] {
        &self.phi_deg
    }

    /// Number of sampled directions K.
    pub fn len(&self) -> usize {
        self.theta_deg.len() * self.phi_deg.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// `(theta_deg, phi_deg)` of direction `k`.
    pub fn direction(&self, k: usize) -> (f64, f64) {
        let n_phi = self.phi_deg.len();
        (self.theta_deg[k / n_phi], self.phi_deg[k % n_phi])
    }

    pub fn directions(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.theta_deg
            .iter()
            .flat_map(move |&t| self.phi_deg.iter().map(move |&p| (t, p)))
    }

    /// Per-direction weights (length K) for the chosen inner product.
    pub fn weights(&self, weighting: SphereWeighting) -> Vec<f64> {
        match weighting {
            SphereWeighting::Unweighted => alloc::vec![1.0; self.len()],
            SphereWeighting::SinTheta => {
                let raw: Vec<f64> = self.directions().map(|(t, _)| math::sin(t.to_radians())).collect();
                let mean = raw.iter().sum::<f64>() / raw.len() as f64;
                if mean > 0.0 {
                    raw.into_iter().map(|w| w / mean).collect()
                } else {
                    raw
                }
            }
        }
    }
}

impl Default for AngularGrid {
    /// 5° resolution: 37 × 72 = 2664 directions.
    fn default() -> Self {
        Self::uniform(5.0).expect("5 degree grid is valid")
    }
}

fn check_axis(name: &str, values: &[f64], in_range: impl Fn(f64) -> bool) -> Result<()> {
    for (i, &v) in values.iter().enumerate() {
        if !v.is_finite() || !in_range(v) {
            return Err(Error::InvalidGrid(format!("{name}[{i}] = {v} out of range")));
        }
        if i > 0 && values[i - 1] >= v {
            return Err(Error::InvalidGrid(format!(
                "{name} must be strictly increasing at index {i}"
            )));
        }
    }
    Ok(())
}
