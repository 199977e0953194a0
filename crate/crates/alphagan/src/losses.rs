//! Class-probability-estimation (CPE) losses and the value functions built
//! from them.
//!
//! A CPE loss `ℓ(y, ŷ)` scores a soft prediction `ŷ ∈ [0,1]` of a binary
//! label. GAN value functions use the partial losses `φ(t) = −ℓ(1,t)` and
//! `ψ(t) = −ℓ(0,t)`:
//!
//! ```text
//! V(θ, ω) = E_real[φ(D(x))] + E_gen[ψ(D(x))]
//! ```
//!
//! The α-loss family `ℓ_α(1, ŷ) = α/(α−1)·(1 − ŷ^{(α−1)/α})` covers the
//! exponential (α = ½), log (α = 1) and soft 0-1 (α = ∞) losses.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::math::{check_alpha, sigmoid, softplus};

/// Shared scalar function.
pub type ScalarFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// α-loss `ℓ_α(y, ŷ)` for `α ∈ (0, ∞]`, `y ∈ {0,1}`, `ŷ ∈ [0,1]`.
///
/// May return `+∞` (e.g. `α ≤ 1`, `y = 1`, `ŷ = 0`).
pub fn alpha_loss(alpha: f64, y: u8, yhat: f64) -> Result<f64> {
    check_alpha(alpha, "alpha")?;
    check_prob(yhat)?;
    match y {
        1 => Ok(alpha_loss1(alpha, yhat)),
        0 => Ok(alpha_loss1(alpha, 1.0 - yhat)),
        _ => domain(format!("label must be 0 or 1, got {y}")),
    }
}

/// `ℓ_α(1, t)` without argument checks. `ℓ_α(0, t) = ℓ_α(1, 1−t)`.
#[inline]
pub fn alpha_loss1(alpha: f64, t: f64) -> f64 {
    if alpha == 1.0 {
        -t.ln()
    } else if alpha.is_infinite() {
        1.0 - t
    } else {
        // α/(α−1)·(1 − t^β) with β = (α−1)/α, written to avoid cancellation.
        let beta = (alpha - 1.0) / alpha;
        -(beta * t.ln()).exp_m1() / beta
    }
}

/// `ℓ_α(1, σ(z))` evaluated from the logit, finite wherever the result is.
/// `ℓ_α(0, σ(z))` is the same function at `−z`.
pub fn alpha_loss1_logit(alpha: f64, z: f64) -> f64 {
    let nl = softplus(-z); // −ln σ(z)
    if alpha == 1.0 {
        nl
    } else if alpha.is_infinite() {
        sigmoid(-z)
    } else {
        let beta = (alpha - 1.0) / alpha;
        -(-beta * nl).exp_m1() / beta
    }
}

/// `∂ℓ_α(y, ŷ)/∂ŷ` on the open interval `ŷ ∈ (0,1)`.
pub fn alpha_loss_deriv(alpha: f64, y: u8, yhat: f64) -> Result<f64> {
    check_alpha(alpha, "alpha")?;
    if !(yhat > 0.0 && yhat < 1.0) {
        return domain(format!("derivative needs yhat in (0,1), got {yhat}"));
    }
    match y {
        1 => Ok(alpha_loss1_deriv(alpha, yhat)),
        0 => Ok(-alpha_loss1_deriv(alpha, 1.0 - yhat)),
        _ => domain(format!("label must be 0 or 1, got {y}")),
    }
}

/// `d/dt ℓ_α(1, t) = −t^{−1/α}`.
#[inline]
pub fn alpha_loss1_deriv(alpha: f64, t: f64) -> f64 {
    if alpha.is_infinite() {
        -1.0
    } else if alpha == 1.0 {
        -1.0 / t
    } else {
        -(-t.ln() / alpha).exp()
    }
}

fn check_prob(t: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&t) {
        return domain(format!("prediction must lie in [0,1], got {t}"));
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum LossKind {
    Alpha,
    SquareDisc,
    SquareGen,
    Lsgan,
    Custom,
}

impl FromStr for LossKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "alpha" => Ok(LossKind::Alpha),
            "square-disc" => Ok(LossKind::SquareDisc),
            "square-gen" => Ok(LossKind::SquareGen),
            "lsgan" => Ok(LossKind::Lsgan),
            "custom" => Ok(LossKind::Custom),
            _ => Err(Error::Config(format!("unknown loss kind '{s}'"))),
        }
    }
}

impl fmt::Display for LossKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            LossKind::Alpha => "alpha",
            LossKind::SquareDisc => "square-disc",
            LossKind::SquareGen => "square-gen",
            LossKind::Lsgan => "lsgan",
            LossKind::Custom => "custom",
        })
    }
}

/// A CPE loss as its pair of partial losses.
#[derive(Clone)]
pub struct LossSpec {
    pub kind: LossKind,
    pub alpha: Option<f64>,
    /// `φ(t) = −ℓ(1, t)`.
    pub phi: ScalarFn,
    /// `ψ(t) = −ℓ(0, t)`.
    pub psi: ScalarFn,
    /// `φ'(t)`, when known in closed form.
    pub dphi: Option<ScalarFn>,
    pub symmetric: bool,
}

impl fmt::Debug for LossSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("LossSpec")
            .field("kind", &self.kind)
            .field("alpha", &self.alpha)
            .field("symmetric", &self.symmetric)
            .finish()
    }
}

/// Grid used by the symmetry and constraint checks: 1001 points on `[0,1]`.
pub fn unit_grid(n: usize) -> impl Iterator<Item = f64> {
    (0..n).map(move |i| i as f64 / (n - 1) as f64)
}

impl LossSpec {
    /// Build a loss from arbitrary partial losses.
    pub fn custom(phi: ScalarFn, psi: ScalarFn, symmetric: bool) -> Self {
        LossSpec { kind: LossKind::Custom, alpha: None, phi, psi, dphi: None, symmetric }
    }

    /// `ℓ(1, t)`.
    pub fn ell1(&self, t: f64) -> f64 {
        -(self.phi)(t)
    }

    /// `ℓ(0, t)`.
    pub fn ell0(&self, t: f64) -> f64 {
        -(self.psi)(t)
    }

    /// `d/dt ℓ(1, t)`: closed form if available, else a central difference.
    pub fn ell1_deriv(&self, t: f64) -> f64 {
        match &self.dphi {
            Some(d) => -d(t),
            None => {
                let h = (t.min(1.0 - t) / 2.0).min(1e-6);
                -((self.phi)(t + h) - (self.phi)(t - h)) / (2.0 * h)
            }
        }
    }

    /// Largest `|ψ(t) − φ(1−t)|` over the grid.
    pub fn symmetry_residual(&self) -> f64 {
        unit_grid(1001)
            .map(|t| {
                let (a, b) = ((self.psi)(t), (self.phi)(1.0 - t));
                if a == b {
                    0.0
                } else {
                    (a - b).abs()
                }
            })
            .fold(0.0, f64::max)
    }

    pub fn is_symmetric_on_grid(&self) -> bool {
        self.symmetry_residual() <= 1e-12
    }

    /// Largest violation of `φ(t)+ψ(t) ≤ φ(½)+ψ(½)` over the grid (0 if none).
    pub fn constraint_violation(&self) -> f64 {
        let c = (self.phi)(0.5) + (self.psi)(0.5);
        unit_grid(1001)
            .map(|t| {
                let s = (self.phi)(t) + (self.psi)(t);
                if s.is_nan() {
                    f64::INFINITY
                } else {
                    (s - c).max(0.0)
                }
            })
            .fold(0.0, f64::max)
    }

    pub fn satisfies_constraint(&self) -> bool {
        self.constraint_violation() <= 1e-12
    }
}

/// Construct a named loss. `alpha` must be given exactly when `kind` is
/// [`LossKind::Alpha`].
///
/// The `lsgan` loss carries the least-squares partials with targets 0/1
/// (`ℓ(1,t) = (t−1)²/2`, `ℓ(0,t) = t²/2`); the generator side of the 0-1
/// scheme scores fakes with `ℓ(1, ·)`.
pub fn make_loss(kind: LossKind, alpha: Option<f64>) -> Result<LossSpec> {
    match (kind, alpha) {
        (LossKind::Alpha, Some(a)) => {
            check_alpha(a, "alpha")?;
            Ok(LossSpec {
                kind,
                alpha: Some(a),
                phi: Arc::new(move |t| -alpha_loss1(a, t)),
                psi: Arc::new(move |t| -alpha_loss1(a, 1.0 - t)),
                dphi: Some(Arc::new(move |t| -alpha_loss1_deriv(a, t))),
                symmetric: true,
            })
        }
        (LossKind::Alpha, None) => Err(Error::Config("alpha loss needs an alpha".into())),
        (_, Some(_)) => Err(Error::Config(format!("loss kind '{kind}' takes no alpha"))),
        (LossKind::SquareDisc, None) | (LossKind::Lsgan, None) => Ok(LossSpec {
            kind,
            alpha: None,
            phi: Arc::new(|t| -(t - 1.0) * (t - 1.0) / 2.0),
            psi: Arc::new(|t| -t * t / 2.0),
            dphi: Some(Arc::new(|t| 1.0 - t)),
            symmetric: true,
        }),
        (LossKind::SquareGen, None) => Ok(LossSpec {
            kind,
            alpha: None,
            phi: Arc::new(|t| -(1.0 - t * t) / 2.0),
            psi: Arc::new(|t| -(1.0 - (1.0 - t) * (1.0 - t)) / 2.0),
            dphi: Some(Arc::new(|t| t)),
            symmetric: true,
        }),
        (LossKind::Custom, None) => Err(Error::Config(
            "custom losses are built with LossSpec::custom".into(),
        )),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EstimateMethod {
    MonteCarlo,
    Quadrature,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ValueEstimate {
    pub value: f64,
    pub n_real: usize,
    pub n_gen: usize,
    pub method: EstimateMethod,
}

/// `mean φ(D(real)) + mean ψ(D(gen))`.
///
/// For α-losses this is exactly `α/(α−1)(E D^β + E (1−D)^β − 2)`: the −2
/// is already carried by the partial losses, so no constant is added.
pub fn empirical_value(loss: &LossSpec, real: &[f64], gen: &[f64]) -> Result<ValueEstimate> {
    if real.is_empty() || gen.is_empty() {
        return domain("empirical_value needs nonempty output lists");
    }
    for &t in real.iter().chain(gen) {
        check_prob(t)?;
    }
    let mr = real.iter().map(|&t| (loss.phi)(t)).sum::<f64>() / real.len() as f64;
    let mg = gen.iter().map(|&t| (loss.psi)(t)).sum::<f64>() / gen.len() as f64;
    Ok(ValueEstimate {
        value: mr + mg,
        n_real: real.len(),
        n_gen: gen.len(),
        method: EstimateMethod::MonteCarlo,
    })
}

/// Non-saturating generator value `mean ℓ_{α_G}(1, D(gen))`.
pub fn ns_generator_value(alpha_g: f64, gen: &[f64]) -> Result<f64> {
    check_alpha(alpha_g, "alpha_g")?;
    if gen.is_empty() {
        return domain("ns_generator_value needs a nonempty output list");
    }
    let mut s = 0.0;
    for &t in gen {
        check_prob(t)?;
        s += alpha_loss1(alpha_g, t);
    }
    Ok(s / gen.len() as f64)
}
