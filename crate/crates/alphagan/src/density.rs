//! One-dimensional densities: Gaussians, Gaussian mixtures and tabulated
//! piecewise-linear profiles.
//!
//! Mixture densities and their log-derivatives are evaluated in log space, so
//! scores stay finite far into the tails where the density itself underflows.

use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};
use crate::quadrature::{integrate_with_breaks, QuadResult, ABS_TOL, MAX_INTERVALS};
use crate::rng::SeededRng;

/// Half-width of a Gaussian support, in standard deviations.
pub const SUPPORT_SIGMAS: f64 = 8.0;

const LN_SQRT_2PI: f64 = 0.918_938_533_204_672_8;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Component {
    pub weight: f64,
    pub mu: f64,
    pub sigma: f64,
}

impl Component {
    fn log_pdf(&self, x: f64) -> f64 {
        let z = (x - self.mu) / self.sigma;
        self.weight.ln() - 0.5 * z * z - self.sigma.ln() - LN_SQRT_2PI
    }

    fn score(&self, x: f64) -> f64 {
        -(x - self.mu) / (self.sigma * self.sigma)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Density1D {
    Gaussian { mu: f64, sigma: f64 },
    Mixture { components: Vec<Component> },
    /// Piecewise-linear density through `(xs[i], ps[i])`, zero outside.
    Tabulated { xs: Vec<f64>, ps: Vec<f64> },
}

impl Density1D {
    pub fn gaussian(mu: f64, sigma: f64) -> Result<Self> {
        if !(sigma > 0.0 && sigma.is_finite() && mu.is_finite()) {
            return domain(format!("invalid gaussian N({mu}, {sigma}^2)"));
        }
        Ok(Density1D::Gaussian { mu, sigma })
    }

    /// Mixture from `(weight, mu, sigma)` triples; weights must sum to 1.
    pub fn mixture(parts: &[(f64, f64, f64)]) -> Result<Self> {
        if parts.is_empty() {
            return domain("mixture needs at least one component");
        }
        let total: f64 = parts.iter().map(|p| p.0).sum();
        if (total - 1.0).abs() > 1e-12 {
            return domain(format!("mixture weights sum to {total}, not 1"));
        }
        let mut components = Vec::with_capacity(parts.len());
        for &(weight, mu, sigma) in parts {
            if !(weight > 0.0 && sigma > 0.0 && sigma.is_finite() && mu.is_finite()) {
                return domain(format!("invalid mixture component ({weight}, {mu}, {sigma})"));
            }
            components.push(Component { weight, mu, sigma });
        }
        Ok(Density1D::Mixture { components })
    }

    /// Piecewise-linear density, renormalised to unit mass.
    pub fn tabulated(xs: Vec<f64>, ps: Vec<f64>) -> Result<Self> {
        if xs.len() < 2 || xs.len() != ps.len() {
            return domain("tabulated density needs matching xs/ps of length >= 2");
        }
        if xs.windows(2).any(|w| !(w[1] > w[0])) {
            return domain("tabulated xs must be strictly increasing");
        }
        if ps.iter().any(|&p| !(p >= 0.0 && p.is_finite())) {
            return domain("tabulated ps must be finite and nonnegative");
        }
        let mass: f64 = xs
            .windows(2)
            .zip(ps.windows(2))
            .map(|(x, p)| 0.5 * (x[1] - x[0]) * (p[0] + p[1]))
            .sum();
        if !(mass > 0.0) {
            return domain("tabulated density has zero mass");
        }
        Ok(Density1D::Tabulated { xs, ps: ps.into_iter().map(|p| p / mass).collect() })
    }

    fn components(&self) -> Option<Vec<Component>> {
        match self {
            Density1D::Gaussian { mu, sigma } => {
                Some(vec![Component { weight: 1.0, mu: *mu, sigma: *sigma }])
            }
            Density1D::Mixture { components } => Some(components.clone()),
            Density1D::Tabulated { .. } => None,
        }
    }

    fn segment(xs: &[f64], x: f64) -> Option<usize> {
        if x < xs[0] || x > *xs.last().unwrap() {
            return None;
        }
        let i = xs.partition_point(|&v| v <= x);
        Some(i.clamp(1, xs.len() - 1) - 1)
    }

    pub fn log_pdf(&self, x: f64) -> f64 {
        match self {
            Density1D::Tabulated { .. } => self.pdf(x).ln(),
            _ => {
                let cs = self.components().unwrap();
                let logs: Vec<f64> = cs.iter().map(|c| c.log_pdf(x)).collect();
                let m = logs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
                if m == f64::NEG_INFINITY {
                    return m;
                }
                m + logs.iter().map(|l| (l - m).exp()).sum::<f64>().ln()
            }
        }
    }

    pub fn pdf(&self, x: f64) -> f64 {
        match self {
            Density1D::Tabulated { xs, ps } => match Self::segment(xs, x) {
                None => 0.0,
                Some(i) => {
                    let t = (x - xs[i]) / (xs[i + 1] - xs[i]);
                    ps[i] + t * (ps[i + 1] - ps[i])
                }
            },
            _ => self.log_pdf(x).exp(),
        }
    }

    /// `d/dx log p(x)`; responsibilities are normalised in log space.
    pub fn log_pdf_deriv(&self, x: f64) -> f64 {
        match self {
            Density1D::Tabulated { xs, ps } => match Self::segment(xs, x) {
                None => f64::NAN,
                Some(i) => {
                    let slope = (ps[i + 1] - ps[i]) / (xs[i + 1] - xs[i]);
                    slope / self.pdf(x)
                }
            },
            _ => {
                let cs = self.components().unwrap();
                let logs: Vec<f64> = cs.iter().map(|c| c.log_pdf(x)).collect();
                let m = logs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
                let (mut num, mut den) = (0.0, 0.0);
                for (c, l) in cs.iter().zip(&logs) {
                    let r = (l - m).exp();
                    num += r * c.score(x);
                    den += r;
                }
                num / den
            }
        }
    }

    /// `p'(x)`.
    pub fn pdf_deriv(&self, x: f64) -> f64 {
        self.pdf(x) * self.log_pdf_deriv(x)
    }

    /// Closed interval outside which the density is treated as zero.
    pub fn support(&self) -> (f64, f64) {
        match self {
            Density1D::Tabulated { xs, .. } => (xs[0], *xs.last().unwrap()),
            _ => {
                let cs = self.components().unwrap();
                let lo = cs.iter().map(|c| c.mu - SUPPORT_SIGMAS * c.sigma).fold(f64::INFINITY, f64::min);
                let hi = cs.iter().map(|c| c.mu + SUPPORT_SIGMAS * c.sigma).fold(f64::NEG_INFINITY, f64::max);
                (lo, hi)
            }
        }
    }

    /// Points where the integrand may change character quickly: component
    /// means and ±1σ, ±3σ around them, or the table knots.
    pub fn breakpoints(&self) -> Vec<f64> {
        match self {
            Density1D::Tabulated { xs, .. } => xs.clone(),
            _ => self
                .components()
                .unwrap()
                .iter()
                .flat_map(|c| [-3.0, -1.0, 0.0, 1.0, 3.0].map(|k| c.mu + k * c.sigma))
                .collect(),
        }
    }

    pub fn mean(&self) -> f64 {
        match self {
            Density1D::Tabulated { .. } => {
                let (lo, hi) = self.support();
                integrate_with_breaks(|x| x * self.pdf(x), lo, hi, &self.breakpoints(), ABS_TOL, MAX_INTERVALS)
                    .map(|r| r.value)
                    .unwrap_or(f64::NAN)
            }
            _ => self.components().unwrap().iter().map(|c| c.weight * c.mu).sum(),
        }
    }

    /// Total mass over the support.
    pub fn mass(&self) -> Result<QuadResult> {
        let (lo, hi) = self.support();
        integrate_with_breaks(|x| self.pdf(x), lo, hi, &self.breakpoints(), ABS_TOL, MAX_INTERVALS)
    }

    /// Draw `n` samples (Gaussian families only).
    pub fn sample(&self, n: usize, rng: &mut SeededRng) -> Result<Vec<f64>> {
        let cs = match self.components() {
            Some(cs) => cs,
            None => return domain("sampling is only available for gaussian families"),
        };
        let mut out = Vec::with_capacity(n);
        for _ in 0..n {
            let mut u = rng.uniform();
            let mut pick = cs.len() - 1;
            for (i, c) in cs.iter().enumerate() {
                if u < c.weight {
                    pick = i;
                    break;
                }
                u -= c.weight;
            }
            let c = cs[pick];
            out.push(c.mu + c.sigma * rng.normal());
        }
        Ok(out)
    }
}

/// Union of the two supports.
pub fn union_support(p: &Density1D, q: &Density1D) -> (f64, f64) {
    let (a, b) = p.support();
    let (c, d) = q.support();
    (a.min(c), b.max(d))
}
