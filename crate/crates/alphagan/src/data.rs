//! Synthetic data: the 2D Gaussian ring, latent noise, mode coverage and the
//! 1D toy scenarios used to illustrate training pathologies.

use std::f64::consts::TAU;
use std::io::Write;

use ndarray::Array2;
use serde::{Deserialize, Serialize};

use crate::density::Density1D;
use crate::error::{domain, Error, Result};
use crate::rng::{stream, SeededRng};

/// Full-scale split sizes; desk runs multiply both by one scale factor.
pub const FULL_TRAIN: usize = 50_000;
pub const FULL_TEST: usize = 25_000;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RingSpec {
    pub n_modes: usize,
    pub radius: f64,
    pub variance: f64,
    pub n_samples: usize,
}

impl Default for RingSpec {
    fn default() -> Self {
        RingSpec { n_modes: 8, radius: 1.0, variance: 1e-4, n_samples: FULL_TRAIN }
    }
}

impl RingSpec {
    pub fn validate(&self) -> Result<()> {
        if self.n_modes == 0 {
            return Err(Error::Config("ring needs at least one mode".into()));
        }
        if !(self.radius > 0.0 && self.radius.is_finite()) {
            return Err(Error::Config(format!("ring radius must be positive, got {}", self.radius)));
        }
        if !(self.variance >= 0.0 && self.variance.is_finite()) {
            return Err(Error::Config(format!("ring variance must be >= 0, got {}", self.variance)));
        }
        Ok(())
    }

    pub fn mode_mean(&self, i: usize) -> (f64, f64) {
        let th = TAU * i as f64 / self.n_modes as f64;
        (self.radius * th.cos(), self.radius * th.sin())
    }

    pub fn means(&self) -> Vec<(f64, f64)> {
        (0..self.n_modes).map(|i| self.mode_mean(i)).collect()
    }

    /// Coverage radius: three standard deviations.
    pub fn coverage_radius(&self) -> f64 {
        3.0 * self.variance.sqrt()
    }
}

/// Ring samples and the mode each was drawn from.
#[derive(Debug, Clone, PartialEq)]
pub struct RingSample {
    pub points: Array2<f64>,
    pub modes: Vec<usize>,
}

/// Draw `spec.n_samples` points: uniform mode, isotropic Gaussian noise.
pub fn sample_ring(spec: &RingSpec, seed: u64) -> Result<RingSample> {
    spec.validate()?;
    let mut rng = SeededRng::new(seed, stream::RING);
    let sd = spec.variance.sqrt();
    let mut points = Array2::zeros((spec.n_samples, 2));
    let mut modes = Vec::with_capacity(spec.n_samples);
    for i in 0..spec.n_samples {
        let k = rng.index(spec.n_modes);
        let (mx, my) = spec.mode_mean(k);
        points[[i, 0]] = mx + sd * rng.normal();
        points[[i, 1]] = my + sd * rng.normal();
        modes.push(k);
    }
    Ok(RingSample { points, modes })
}

/// Number of modes with at least one sample within `3σ` of the mode mean.
pub fn mode_coverage(samples: &Array2<f64>, spec: &RingSpec) -> Result<usize> {
    if samples.ncols() != 2 {
        return Err(Error::Shape(format!("samples must be n x 2, got {:?}", samples.dim())));
    }
    if samples.nrows() == 0 {
        return domain("mode coverage needs at least one sample");
    }
    let r2 = spec.coverage_radius().powi(2);
    let hit = spec
        .means()
        .iter()
        .filter(|&&(mx, my)| {
            samples.outer_iter().any(|row| {
                let (dx, dy) = (row[0] - mx, row[1] - my);
                dx * dx + dy * dy <= r2
            })
        })
        .count();
    Ok(hit)
}

/// I.i.d. standard normal matrix `[n × dim]`.
pub fn latent_noise(dim: usize, n: usize, seed: u64) -> Array2<f64> {
    latent_noise_stream(dim, n, seed, stream::LATENT)
}

pub fn latent_noise_stream(dim: usize, n: usize, seed: u64, stream_id: u64) -> Array2<f64> {
    let mut rng = SeededRng::new(seed, stream_id);
    fill_normal(&mut rng, n, dim)
}

pub fn fill_normal(rng: &mut SeededRng, n: usize, dim: usize) -> Array2<f64> {
    let mut m = Array2::zeros((n, dim));
    m.iter_mut().for_each(|v| *v = rng.normal());
    m
}

/// Write `x,y,mode_index` rows.
pub fn export_ring_csv<W: Write>(sample: &RingSample, mut w: W) -> Result<()> {
    writeln!(w, "x,y,mode_index")?;
    for (row, m) in sample.points.outer_iter().zip(&sample.modes) {
        writeln!(w, "{:.17e},{:.17e},{}", row[0], row[1], m)?;
    }
    Ok(())
}

/// A real/generated density pair.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Scenario {
    pub name: String,
    pub p_r: Density1D,
    pub p_g: Density1D,
}

pub const SCENARIOS: [&str; 4] = ["fig1", "fig4", "fig6", "fig7"];

/// Toy scenarios:
///
/// | name | real | generated |
/// |---|---|---|
/// | `fig1` | N(−2, 0.5²) | N(2, 0.5²) |
/// | `fig4` | ½N(2, 0.5²) + ½N(3, 0.5²) | N(2, 0.5²) |
/// | `fig6` | ½N(1, 0.3²) + ½N(4, 0.3²) | N(4, 0.3²) |
/// | `fig7` | N(4, 0.5²) | 0.1N(1, (1/9)²) + 0.9N(3.9, 0.5²) |
pub fn figure_scenario(name: &str) -> Result<Scenario> {
    let (p_r, p_g) = match name {
        "fig1" => (Density1D::gaussian(-2.0, 0.5)?, Density1D::gaussian(2.0, 0.5)?),
        "fig4" => (
            Density1D::mixture(&[(0.5, 2.0, 0.5), (0.5, 3.0, 0.5)])?,
            Density1D::gaussian(2.0, 0.5)?,
        ),
        "fig6" => (
            Density1D::mixture(&[(0.5, 1.0, 0.3), (0.5, 4.0, 0.3)])?,
            Density1D::gaussian(4.0, 0.3)?,
        ),
        "fig7" => (
            Density1D::gaussian(4.0, 0.5)?,
            Density1D::mixture(&[(0.1, 1.0, 1.0 / 9.0), (0.9, 3.9, 0.5)])?,
        ),
        _ => return Err(Error::Config(format!("unknown scenario '{name}'"))),
    };
    Ok(Scenario { name: name.to_string(), p_r, p_g })
}
