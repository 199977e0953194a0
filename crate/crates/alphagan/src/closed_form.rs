//! Optimal play under unlimited capacity: the tilted-posterior optimal
//! discriminator, generator objectives at that discriminator, and the
//! implicit-equation solver for general symmetric CPE discriminator losses.

use serde::Serialize;

use crate::density::Density1D;
use crate::divergence::{f_divergence, integrate_pair, ns_constant, sat_constant, FGen};
use crate::error::{Error, Result};
use crate::losses::{alpha_loss1_logit, LossSpec};
use crate::math::{check_alpha, golden_max, sigmoid};

/// Logit of the optimal discriminator, `α_D (ln p − ln q)`, with the
/// conventions `0/0 → ½` and exact ties under `α_D = ∞` giving ½.
pub fn opt_disc_logit(log_p: f64, log_q: f64, alpha_d: f64) -> f64 {
    if log_p == log_q || (log_p.is_infinite() && log_q.is_infinite() && log_p < 0.0 && log_q < 0.0) {
        return 0.0;
    }
    let z = alpha_d * (log_p - log_q);
    if z.is_nan() {
        0.0
    } else {
        z
    }
}

/// `p^{α_D}/(p^{α_D} + q^{α_D})` from the density values `p`, `q ≥ 0`;
/// `𝟙{p>q} + ½𝟙{p=q}` at α_D = ∞, and ½ when both vanish.
pub fn optimal_disc_values(p: f64, q: f64, alpha_d: f64) -> Result<f64> {
    check_alpha(alpha_d, "alpha_d")?;
    if !(p >= 0.0 && q >= 0.0) {
        return Err(Error::Domain(format!("densities must be >= 0, got ({p}, {q})")));
    }
    Ok(sigmoid(opt_disc_logit(p.ln(), q.ln(), alpha_d)))
}

/// Optimal discriminator output at `x`, evaluated in log space.
pub fn optimal_disc(p: &Density1D, q: &Density1D, alpha_d: f64, x: f64) -> Result<f64> {
    check_alpha(alpha_d, "alpha_d")?;
    Ok(sigmoid(opt_disc_logit(p.log_pdf(x), q.log_pdf(x), alpha_d)))
}

/// True posterior `p/(p+q)` at `x` (equal class priors).
pub fn true_posterior(p: &Density1D, q: &Density1D, x: f64) -> f64 {
    sigmoid(opt_disc_logit(p.log_pdf(x), q.log_pdf(x), 1.0))
}

/// Tilted posterior from the true one: `u^{α_D}/(1+u^{α_D})`, `u = P/(1−P)`.
pub fn tilt_posterior(posterior: f64, alpha_d: f64) -> Result<f64> {
    check_alpha(alpha_d, "alpha_d")?;
    if !(0.0..=1.0).contains(&posterior) {
        return Err(Error::Domain(format!("posterior must lie in [0,1], got {posterior}")));
    }
    Ok(sigmoid(opt_disc_logit(posterior.ln(), (1.0 - posterior).ln(), alpha_d)))
}

/// Grid resolution of the brute-force search.
pub const BRUTE_GRID: usize = 2001;

/// Maximise `a φ(t) + b ψ(t)` over `t ∈ [0, 1]` by grid search and
/// golden-section refinement. Returns `(t*, value)`.
pub fn brute_force_pointwise_opt(loss: &LossSpec, a: f64, b: f64) -> Result<(f64, f64)> {
    if !(a >= 0.0 && b >= 0.0) || a + b == 0.0 {
        return Err(Error::Domain(format!("weights must be >= 0 and not both 0, got ({a}, {b})")));
    }
    let obj = |t: f64| {
        let x = (if a == 0.0 { 0.0 } else { a * (loss.phi)(t) }) + (if b == 0.0 { 0.0 } else { b * (loss.psi)(t) });
        if x.is_nan() {
            f64::NEG_INFINITY
        } else {
            x
        }
    };
    let n = BRUTE_GRID - 1;
    let (i, _) = (0..=n)
        .map(|i| (i, obj(i as f64 / n as f64)))
        .fold((0, f64::NEG_INFINITY), |best, c| if c.1 > best.1 { c } else { best });
    let lo = (i.saturating_sub(1)) as f64 / n as f64;
    let hi = ((i + 1).min(n)) as f64 / n as f64;
    let (t, v) = golden_max(obj, lo, hi, 1e-13);
    // Values are flat to rounding within ~1e-8 of the peak; sharpen with
    // bisection on the sign of a central difference.
    let (t, v) = sharpen(&obj, lo, hi).filter(|s| s.1 >= v).unwrap_or((t, v));
    // Endpoints are not visited by golden section.
    let best = [(t, v), (lo, obj(lo)), (hi, obj(hi))]
        .into_iter()
        .fold((t, f64::NEG_INFINITY), |b, c| if c.1 > b.1 { c } else { b });
    Ok(best)
}

fn sharpen<F: Fn(f64) -> f64>(obj: &F, lo: f64, hi: f64) -> Option<(f64, f64)> {
    let h = 1e-7;
    let slope = |t: f64| obj(t + h) - obj(t - h);
    let (mut a, mut b) = (lo.max(2.0 * h), hi.min(1.0 - 2.0 * h));
    if !(slope(a) > 0.0 && slope(b) < 0.0) {
        return None;
    }
    for _ in 0..100 {
        let m = 0.5 * (a + b);
        if m <= a || m >= b {
            break;
        }
        if slope(m) > 0.0 {
            a = m;
        } else {
            b = m;
        }
    }
    let t = 0.5 * (a + b);
    Some((t, obj(t)))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GeneratorObjective {
    /// `D_f(P‖Q)` with the saturating or NS generator.
    pub divergence: f64,
    pub constant: f64,
    /// `divergence + constant`.
    pub total: f64,
}

/// Generator objective under the optimal discriminator, as divergence plus
/// constant.
pub fn generator_obj_at_opt_disc(
    alpha_d: f64,
    alpha_g: f64,
    p: &Density1D,
    q: &Density1D,
    saturating: bool,
) -> Result<GeneratorObjective> {
    let (f, constant) = if saturating {
        (FGen::f_sat(alpha_d, alpha_g)?, sat_constant(alpha_g))
    } else {
        (FGen::f_ns(alpha_d, alpha_g)?, ns_constant(alpha_g))
    };
    let divergence = f_divergence(&f, p, q)?;
    Ok(GeneratorObjective { divergence, constant, total: divergence + constant })
}

/// The same objective by direct quadrature of the generator's value
/// function at `D*`: `E_P[−ℓ(1,D*)] + E_Q[−ℓ(0,D*)]` (saturating) or
/// `E_Q[ℓ(1,D*)]` (NS), all losses with `α_G`.
pub fn generator_value_direct(
    alpha_d: f64,
    alpha_g: f64,
    p: &Density1D,
    q: &Density1D,
    saturating: bool,
) -> Result<f64> {
    check_alpha(alpha_d, "alpha_d")?;
    check_alpha(alpha_g, "alpha_g")?;
    let h = |x: f64| {
        let (lp, lq) = (p.log_pdf(x), q.log_pdf(x));
        let z = opt_disc_logit(lp, lq, alpha_d);
        let weighted = |l: f64, loss: f64| if l == f64::NEG_INFINITY { 0.0 } else { l.exp() * loss };
        if saturating {
            -weighted(lp, alpha_loss1_logit(alpha_g, z)) - weighted(lq, alpha_loss1_logit(alpha_g, -z))
        } else {
            weighted(lq, alpha_loss1_logit(alpha_g, z))
        }
    };
    Ok(integrate_pair(p, q, h)?.value)
}

/// Bisection bracket and iteration cap of the implicit solver.
pub const IMPLICIT_LO: f64 = 1e-12;
pub const IMPLICIT_HI: f64 = 1.0 - 1e-12;
pub const IMPLICIT_ITERS: usize = 200;

/// Whether `ℓ(1, ·)` is strictly convex on an interior grid (positive
/// second differences).
pub fn ell1_strictly_convex(loss: &LossSpec) -> bool {
    let n = 200;
    let h = 1.0 / n as f64;
    (1..n).all(|i| {
        let t = i as f64 * h;
        let d2 = loss.ell1(t - h) - 2.0 * loss.ell1(t) + loss.ell1(t + h);
        d2 > 1e-12
    })
}

/// Stationarity residual `ℓ'(1, 1−t) − u ℓ'(1, t)` of the pointwise
/// discriminator objective; decreasing in `t` for strictly convex `ℓ(1,·)`.
pub fn implicit_residual(loss: &LossSpec, u: f64, t: f64) -> f64 {
    loss.ell1_deriv(1.0 - t) - u * loss.ell1_deriv(t)
}

/// Solve `ℓ'_D(1, 1−t) = u ℓ'_D(1, t)` for the optimal discriminator output.
/// Without an interior root the answer is an endpoint (0 or 1).
pub fn solve_implicit_disc(loss_d: &LossSpec, u: f64) -> Result<f64> {
    if !loss_d.is_symmetric_on_grid() {
        return Err(Error::Precondition("implicit solver needs a symmetric loss".into()));
    }
    if !ell1_strictly_convex(loss_d) {
        return Err(Error::Precondition("implicit solver needs a strictly convex l(1, .)".into()));
    }
    if u.is_nan() || u < 0.0 {
        return Err(Error::Domain(format!("likelihood ratio must be >= 0, got {u}")));
    }
    if u.is_infinite() {
        return Ok(1.0);
    }
    let r = |t: f64| implicit_residual(loss_d, u, t);
    let (mut lo, mut hi) = (IMPLICIT_LO, IMPLICIT_HI);
    if r(lo) <= 0.0 {
        return Ok(0.0);
    }
    if r(hi) >= 0.0 {
        return Ok(1.0);
    }
    for _ in 0..IMPLICIT_ITERS {
        let m = 0.5 * (lo + hi);
        if m <= lo || m >= hi {
            break;
        }
        if r(m) > 0.0 {
            lo = m;
        } else {
            hi = m;
        }
    }
    let (rl, rh) = (r(lo).abs(), r(hi).abs());
    Ok(if rl <= rh { lo } else { hi })
}

/// Generator `f` of the dual-objective game for a pair of symmetric CPE
/// losses, with `A(u)` from the implicit solver, and a numerical convexity
/// verdict on a log-grid over `[1e-3, 1e3]`.
pub fn dual_cpe_generator(loss_d: &LossSpec, loss_g: &LossSpec) -> Result<(FGen, bool)> {
    solve_implicit_disc(loss_d, 1.0)?;
    let (ld, lg) = (loss_d.clone(), loss_g.clone());
    let f = FGen::custom(
        move |u| {
            let a = solve_implicit_disc(&ld, u).unwrap_or(f64::NAN);
            crate::divergence::dual_cpe_f(u, &lg, |_| a)
        },
        f64::NAN,
    );
    let n = 400;
    let xs: Vec<f64> = (0..=n).map(|i| 10f64.powf(-3.0 + 6.0 * i as f64 / n as f64)).collect();
    let ys: Vec<f64> = xs.iter().map(|&u| f.eval(u)).collect();
    // Convexity on a non-uniform grid: slopes must be non-decreasing.
    let convex = xs.windows(3).zip(ys.windows(3)).all(|(x, y)| {
        let s1 = (y[1] - y[0]) / (x[1] - x[0]);
        let s2 = (y[2] - y[1]) / (x[2] - x[1]);
        s2 >= s1 - 1e-9 * (1.0 + s1.abs())
    });
    Ok((f, convex))
}
