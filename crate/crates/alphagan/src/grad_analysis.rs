//! Generator-loss gradients in sample space under the optimal discriminator.
//!
//! With `D* = σ(α_D (ln p − ln q))`, the per-sample generator losses
//! `−ℓ_{α_G}(0, D*(x))` (saturating) and `ℓ_{α_G}(1, D*(x))` (NS) have
//! derivatives `C · (q'/q − p'/p)`, where the scalars
//!
//! ```text
//! C_sat = α_D P (1−P)^{1−1/α_G}      C_ns = α_D (1−P) P^{1−1/α_G}
//! ```
//!
//! depend on the tilted posterior `P = D*(x)` only. The direction of the
//! gradient is therefore fixed by the score difference, whatever the α's.

use serde::Serialize;

use crate::closed_form::opt_disc_logit;
use crate::density::Density1D;
use crate::error::{domain, Result};
use crate::losses::alpha_loss1_logit;
use crate::math::{check_alpha, expo, sigmoid, softplus};

/// `α_D P (1−P)^{1−1/α_G}`.
pub fn c_sat(alpha_d: f64, alpha_g: f64, posterior: f64) -> Result<f64> {
    check_scalar_args(alpha_d, alpha_g, posterior)?;
    Ok(alpha_d * posterior * pow0(1.0 - posterior, expo(alpha_g)))
}

/// `α_D (1−P) P^{1−1/α_G}`.
pub fn c_ns(alpha_d: f64, alpha_g: f64, posterior: f64) -> Result<f64> {
    check_scalar_args(alpha_d, alpha_g, posterior)?;
    Ok(alpha_d * (1.0 - posterior) * pow0(posterior, expo(alpha_g)))
}

/// `x^e` with `0^0 = 1`.
fn pow0(x: f64, e: f64) -> f64 {
    if e == 0.0 {
        1.0
    } else {
        x.powf(e)
    }
}

fn check_scalar_args(alpha_d: f64, alpha_g: f64, posterior: f64) -> Result<()> {
    check_alpha(alpha_d, "alpha_d")?;
    check_alpha(alpha_g, "alpha_g")?;
    if !(0.0..=1.0).contains(&posterior) {
        return domain(format!("posterior must lie in [0,1], got {posterior}"));
    }
    Ok(())
}

/// `ln C` from the discriminator logit `z`, finite even where `P` rounds to
/// 0 or 1.
fn log_scalar(alpha_d: f64, alpha_g: f64, z: f64, saturating: bool) -> f64 {
    let (ln_p, ln_1p) = (-softplus(-z), -softplus(z));
    let b = expo(alpha_g);
    let ln_c = if saturating { ln_p + b * ln_1p } else { ln_1p + b * ln_p };
    alpha_d.ln() + ln_c
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GradientSample {
    pub x: f64,
    /// `D*(x)`, the tilted posterior.
    pub d_star: f64,
    /// The untilted posterior `p/(p+q)`.
    pub posterior: f64,
    /// Generator loss at `x`.
    pub loss: f64,
    /// `d loss / dx`.
    pub grad: f64,
    /// `C` or `C^NS`.
    pub scalar: f64,
    pub log_scalar: f64,
    /// `q'/q − p'/p`.
    pub score_diff: f64,
}

impl GradientSample {
    /// Sign of the gradient, read from the score difference so that it is
    /// exact even where `C` underflows.
    pub fn sign(&self) -> f64 {
        if self.score_diff == 0.0 || self.log_scalar == f64::NEG_INFINITY {
            0.0
        } else {
            self.score_diff.signum()
        }
    }

    /// Direction a gradient-descent step moves the generated sample.
    pub fn descent_direction(&self) -> f64 {
        -self.sign()
    }
}

/// Generator loss at a generated sample `x` under `D*`.
pub fn generator_loss_at(
    p: &Density1D,
    q: &Density1D,
    alpha_d: f64,
    alpha_g: f64,
    x: f64,
    saturating: bool,
) -> Result<f64> {
    check_alpha(alpha_d, "alpha_d")?;
    check_alpha(alpha_g, "alpha_g")?;
    let z = opt_disc_logit(p.log_pdf(x), q.log_pdf(x), alpha_d);
    Ok(if saturating {
        -alpha_loss1_logit(alpha_g, -z)
    } else {
        alpha_loss1_logit(alpha_g, z)
    })
}

/// Analytic gradient of the generator loss with respect to `x`.
pub fn gen_loss_spatial_grad(
    p: &Density1D,
    q: &Density1D,
    alpha_d: f64,
    alpha_g: f64,
    x: f64,
    saturating: bool,
) -> Result<GradientSample> {
    check_alpha(alpha_d, "alpha_d")?;
    check_alpha(alpha_g, "alpha_g")?;
    let (lp, lq) = (p.log_pdf(x), q.log_pdf(x));
    if !(lp.is_finite() && lq.is_finite()) {
        return domain(format!("gradient needs p(x), q(x) > 0 at x = {x}"));
    }
    let z = opt_disc_logit(lp, lq, alpha_d);
    let score_diff = q.log_pdf_deriv(x) - p.log_pdf_deriv(x);
    let ls = if alpha_d.is_infinite() {
        // D* is piecewise constant; the gradient vanishes off the tie set.
        f64::NEG_INFINITY
    } else {
        log_scalar(alpha_d, alpha_g, z, saturating)
    };
    let scalar = ls.exp();
    let loss = if saturating { -alpha_loss1_logit(alpha_g, -z) } else { alpha_loss1_logit(alpha_g, z) };
    Ok(GradientSample {
        x,
        d_star: sigmoid(z),
        posterior: sigmoid(opt_disc_logit(lp, lq, 1.0)),
        loss,
        grad: scalar * score_diff,
        scalar,
        log_scalar: ls,
        score_diff,
    })
}

/// Central-difference step used by gradient checks.
pub fn fd_step(x: f64) -> f64 {
    1e-5 * x.abs().max(1.0)
}

/// Central difference of [`generator_loss_at`].
pub fn finite_difference_grad(
    p: &Density1D,
    q: &Density1D,
    alpha_d: f64,
    alpha_g: f64,
    x: f64,
    saturating: bool,
) -> Result<f64> {
    let h = fd_step(x);
    let up = generator_loss_at(p, q, alpha_d, alpha_g, x + h, saturating)?;
    let dn = generator_loss_at(p, q, alpha_d, alpha_g, x - h, saturating)?;
    Ok((up - dn) / (2.0 * h))
}

/// Gradient samples on an evenly spaced grid.
#[allow(clippy::too_many_arguments)]
pub fn gradient_table(
    p: &Density1D,
    q: &Density1D,
    alpha_d: f64,
    alpha_g: f64,
    saturating: bool,
    lo: f64,
    hi: f64,
    n: usize,
) -> Result<Vec<GradientSample>> {
    if n < 2 || !(hi > lo) {
        return domain("gradient grid needs n >= 2 and hi > lo");
    }
    (0..n)
        .map(|i| {
            let x = lo + (hi - lo) * i as f64 / (n - 1) as f64;
            gen_loss_spatial_grad(p, q, alpha_d, alpha_g, x, saturating)
        })
        .collect()
}
