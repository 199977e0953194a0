//! f-generators, their conjugate links, numerical f-divergences and the
//! total-variation sandwich.
//!
//! Conventions: `D_f(P‖Q) = ∫ q f(p/q)`, natural logarithms, and the
//! unscaled classical divergences `D_JS`, `D_TV = ½∫|p−q|` and
//! `D_H² = ½∫(√p−√q)²`, so that `D_{f_1} = 2 D_JS`, `D_{f_½} = 2 D_H²` and
//! `D_{f_∞} = D_TV`.

use std::fmt;
use std::sync::Arc;

use serde::Serialize;

use crate::density::{union_support, Density1D};
use crate::error::{domain, Error, Result};
use crate::losses::{alpha_loss1, LossSpec};
use crate::math::{check_alpha, expo, logit, ratio, sigmoid, softplus};
use crate::quadrature::{integrate_with_breaks, QuadResult, ABS_TOL, MAX_INTERVALS};
use crate::rng::SeededRng;

const LN_2: f64 = std::f64::consts::LN_2;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum FName {
    FAlpha { alpha: f64 },
    FTilde { alpha: f64 },
    FSat { alpha_d: f64, alpha_g: f64 },
    FNs { alpha_d: f64, alpha_g: f64 },
    DualCpe,
    Custom,
}

type RealFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// A generator `f : [0, ∞) → ℝ` with its slope at infinity,
/// `lim_{u→∞} f(u)/u`, used where `q = 0 < p`.
#[derive(Clone)]
pub struct FGen {
    pub name: FName,
    f: RealFn,
    pub slope_at_inf: f64,
}

impl fmt::Debug for FGen {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FGen")
            .field("name", &self.name)
            .field("slope_at_inf", &self.slope_at_inf)
            .finish()
    }
}

impl FGen {
    pub fn custom<F: Fn(f64) -> f64 + Send + Sync + 'static>(f: F, slope_at_inf: f64) -> Self {
        FGen { name: FName::Custom, f: Arc::new(f), slope_at_inf }
    }

    pub fn eval(&self, u: f64) -> f64 {
        (self.f)(u)
    }

    pub fn f_at_1(&self) -> f64 {
        self.eval(1.0)
    }

    pub fn f_alpha(alpha: f64) -> Result<Self> {
        check_alpha(alpha, "alpha")?;
        Ok(FGen { name: FName::FAlpha { alpha }, f: Arc::new(move |u| f_alpha_raw(u, alpha)), slope_at_inf: 0.0 })
    }

    pub fn f_tilde(alpha: f64) -> Result<Self> {
        check_alpha(alpha, "alpha")?;
        Ok(FGen { name: FName::FTilde { alpha }, f: Arc::new(move |u| f_tilde_raw(u, alpha)), slope_at_inf: 0.0 })
    }

    pub fn f_sat(alpha_d: f64, alpha_g: f64) -> Result<Self> {
        check_alpha(alpha_d, "alpha_d")?;
        check_alpha(alpha_g, "alpha_g")?;
        let slope = if alpha_g == 1.0 { 0.0 } else { 1.0 / expo(alpha_g) };
        Ok(FGen {
            name: FName::FSat { alpha_d, alpha_g },
            f: Arc::new(move |u| f_sat_raw(u, alpha_d, alpha_g)),
            slope_at_inf: slope,
        })
    }

    pub fn f_ns(alpha_d: f64, alpha_g: f64) -> Result<Self> {
        check_alpha(alpha_d, "alpha_d")?;
        check_alpha(alpha_g, "alpha_g")?;
        Ok(FGen {
            name: FName::FNs { alpha_d, alpha_g },
            f: Arc::new(move |u| f_ns_raw(u, alpha_d, alpha_g)),
            slope_at_inf: 0.0,
        })
    }

    /// Parse a generator tag: `f_alpha`, `f_tilde`, `f_sat`, `f_ns`.
    pub fn from_tag(tag: &str, alpha_d: f64, alpha_g: f64) -> Result<Self> {
        match tag {
            "f_alpha" => Self::f_alpha(alpha_d),
            "f_tilde" => Self::f_tilde(alpha_d),
            "f_sat" => Self::f_sat(alpha_d, alpha_g),
            "f_ns" => Self::f_ns(alpha_d, alpha_g),
            _ => Err(Error::Config(format!("unknown f-generator '{tag}' (f_alpha|f_tilde|f_sat|f_ns)"))),
        }
    }
}

fn check_u(u: f64) -> Result<()> {
    if u.is_nan() || u < 0.0 {
        return domain(format!("generator argument must be >= 0, got {u}"));
    }
    Ok(())
}

/// `(1+u^α)^{1/α}` as `max(1,u)·(1+min(u,1/u)^α)^{1/α}`, stable for large α.
fn lp_norm(u: f64, alpha: f64) -> f64 {
    let (hi, lo) = if u >= 1.0 { (u, 1.0 / u) } else { (1.0, u) };
    if alpha.is_infinite() {
        return hi;
    }
    hi * (lo.powf(alpha).ln_1p() / alpha).exp()
}

fn f_tilde_raw(u: f64, alpha: f64) -> f64 {
    if alpha == 1.0 {
        xlogx(u) - (1.0 + u) * u.ln_1p()
    } else if alpha.is_infinite() {
        -u.min(1.0)
    } else {
        ratio(alpha) * (lp_norm(u, alpha) - (1.0 + u))
    }
}

fn f_alpha_raw(u: f64, alpha: f64) -> f64 {
    if alpha == 1.0 {
        f_tilde_raw(u, 1.0) + 2.0 * LN_2
    } else if alpha.is_infinite() {
        (1.0 - u).max(0.0)
    } else {
        // −2^{1/α} + 2 = −(2^{1/α} − 2), with 2^{1/α} − 1 via expm1.
        ratio(alpha) * (lp_norm(u, alpha) - (1.0 + u)) - ratio(alpha) * ((LN_2 / alpha).exp_m1() - 1.0)
    }
}

fn xlogx(u: f64) -> f64 {
    if u == 0.0 {
        0.0
    } else {
        u * u.ln()
    }
}

/// `(ln D*, ln(1−D*))` for the tilted posterior `u^a/(1+u^a)`.
fn log_posterior(u: f64, a: f64) -> (f64, f64) {
    if a.is_infinite() {
        return if u > 1.0 {
            (0.0, f64::NEG_INFINITY)
        } else if u < 1.0 {
            (f64::NEG_INFINITY, 0.0)
        } else {
            (-LN_2, -LN_2)
        };
    }
    let z = a * u.ln();
    (z - softplus(z), -softplus(z))
}

/// `exp(b·l)` with the convention `0^0 = 1`.
fn pow_log(l: f64, b: f64) -> f64 {
    if b == 0.0 {
        1.0
    } else {
        (b * l).exp()
    }
}

fn f_sat_raw(u: f64, alpha_d: f64, alpha_g: f64) -> f64 {
    let (ld, l1d) = log_posterior(u, alpha_d);
    if alpha_g == 1.0 {
        // Limit form without the divergent linear term (u − 1)/β.
        let t = if u == 0.0 { 0.0 } else { u * ld };
        return t + l1d + 2.0 * LN_2;
    }
    let beta = expo(alpha_g);
    let first = if u == 0.0 { 0.0 } else { u * pow_log(ld, beta) };
    (first + pow_log(l1d, beta) - (LN_2 * (1.0 - beta)).exp()) / beta
}

fn f_ns_raw(u: f64, alpha_d: f64, alpha_g: f64) -> f64 {
    let (ld, _) = log_posterior(u, alpha_d);
    if alpha_g == 1.0 {
        return -ld - LN_2;
    }
    let beta = expo(alpha_g);
    ((-LN_2 * beta).exp() - pow_log(ld, beta)) / beta
}

/// Arimoto generator `f_α(u) = (α/(α−1))((1+u^α)^{1/α} − (1+u) − 2^{1/α} + 2)`,
/// with `u ln u − (1+u) ln(1+u) + 2 ln 2` at α=1 and `(1−u)⁺` at α=∞.
pub fn f_alpha(u: f64, alpha: f64) -> Result<f64> {
    check_u(u)?;
    check_alpha(alpha, "alpha")?;
    Ok(f_alpha_raw(u, alpha))
}

/// `f̃_α(u) = (α/(α−1))((1+u^α)^{1/α} − (1+u))`.
pub fn f_tilde_alpha(u: f64, alpha: f64) -> Result<f64> {
    check_u(u)?;
    check_alpha(alpha, "alpha")?;
    Ok(f_tilde_raw(u, alpha))
}

/// Lower end of `dom f̃*_α` (the upper end is 0).
pub fn conjugate_domain_lo(alpha: f64) -> f64 {
    if alpha > 1.0 {
        -ratio(alpha)
    } else {
        f64::NEG_INFINITY
    }
}

fn check_t(t: f64, alpha: f64) -> Result<()> {
    check_alpha(alpha, "alpha")?;
    if t.is_nan() || t > 0.0 || t < conjugate_domain_lo(alpha) {
        return domain(format!("t = {t} outside the conjugate domain for alpha = {alpha}"));
    }
    Ok(())
}

/// `s(t) = (1 + ((α−1)/α) t)^{α/(α−1)}`; `e^t` at α=1.
pub fn s_link(t: f64, alpha: f64) -> Result<f64> {
    check_t(t, alpha)?;
    Ok(if alpha == 1.0 {
        t.exp()
    } else {
        let e = expo(alpha);
        ((e * t).ln_1p() / e).exp()
    })
}

/// `f̃*_α(t) = (α/(α−1))(1 − (1 − s(t))^{(α−1)/α})`; `−ln(1−e^t)` at α=1.
pub fn f_tilde_conjugate(t: f64, alpha: f64) -> Result<f64> {
    let s = s_link(t, alpha)?;
    Ok(alpha_loss1(alpha, 1.0 - s))
}

/// `g_{f_α}(v) = (α/(α−1))((1+e^{−v})^{−(α−1)/α} − 1) = −ℓ_α(1, σ(v))`.
pub fn g_f_alpha(v: f64, alpha: f64) -> Result<f64> {
    check_alpha(alpha, "alpha")?;
    if v.is_nan() {
        return domain("g_f_alpha argument is NaN");
    }
    if alpha == 1.0 {
        return Ok(-softplus(-v));
    }
    Ok(-alpha_loss1(alpha, sigmoid(v)))
}

/// Inverse of [`g_f_alpha`]: `logit(s(t))`.
pub fn g_inverse(t: f64, alpha: f64) -> Result<f64> {
    Ok(logit(s_link(t, alpha)?))
}

/// `k(v) = s(g_{f_α}(v))`, which simplifies to `σ(v)`.
pub fn k_map(v: f64, alpha: f64) -> Result<f64> {
    s_link(g_f_alpha(v, alpha)?, alpha)
}

/// Saturating (α_D, α_G) generator,
/// `(α_G/(α_G−1))((u^{α_D(1−1/α_G)+1} + 1)/(u^{α_D}+1)^{1−1/α_G} − 2^{1/α_G})`.
///
/// At α_G = 1 the generic form has no finite limit; the branch returns
/// `α_D u ln u − (u+1) ln(1+u^{α_D}) + 2 ln 2`, which differs from it by the
/// linear term `(u−1)/β` and so induces the same divergence.
pub fn f_sat(u: f64, alpha_d: f64, alpha_g: f64) -> Result<f64> {
    check_u(u)?;
    check_alpha(alpha_d, "alpha_d")?;
    check_alpha(alpha_g, "alpha_g")?;
    Ok(f_sat_raw(u, alpha_d, alpha_g))
}

/// Non-saturating generator
/// `(α_G/(α_G−1))(2^{1/α_G−1} − u^{α_D(1−1/α_G)}/(u^{α_D}+1)^{1−1/α_G})`.
pub fn f_ns(u: f64, alpha_d: f64, alpha_g: f64) -> Result<f64> {
    check_u(u)?;
    check_alpha(alpha_d, "alpha_d")?;
    check_alpha(alpha_g, "alpha_g")?;
    Ok(f_ns_raw(u, alpha_d, alpha_g))
}

/// Constant added to `D_{f_sat}` in the saturating generator objective:
/// `(α_G/(α_G−1))(2^{1/α_G} − 2)`, `−2 ln 2` at α_G=1.
pub fn sat_constant(alpha_g: f64) -> f64 {
    if alpha_g == 1.0 {
        -2.0 * LN_2
    } else {
        2.0 * (LN_2 * (1.0 / alpha_g - 1.0)).exp_m1() / expo(alpha_g)
    }
}

/// Constant added to `D_{f_ns}`: `(α_G/(α_G−1))(1 − 2^{1/α_G−1})`, `ln 2` at α_G=1.
pub fn ns_constant(alpha_g: f64) -> f64 {
    if alpha_g == 1.0 {
        LN_2
    } else {
        -(LN_2 * (1.0 / alpha_g - 1.0)).exp_m1() / expo(alpha_g)
    }
}

/// `f(u) = −u ℓ_G(1, A(u)) − ℓ_G(1, 1−A(u)) + 2 ℓ_G(1, ½)`.
pub fn dual_cpe_f<A: Fn(f64) -> f64>(u: f64, loss_g: &LossSpec, a_of_u: A) -> f64 {
    let a = a_of_u(u);
    let first = if u == 0.0 { 0.0 } else { -u * loss_g.ell1(a) };
    first - loss_g.ell1(1.0 - a) + 2.0 * loss_g.ell1(0.5)
}

/// Points where `p = q`, found by scanning `ln p − ln q` on a grid and
/// bisecting each sign change.
pub fn crossings(p: &Density1D, q: &Density1D, lo: f64, hi: f64) -> Vec<f64> {
    const SCAN: usize = 2000;
    let g = |x: f64| p.log_pdf(x) - q.log_pdf(x);
    let mut out = Vec::new();
    let mut xa = lo;
    let mut ga = g(xa);
    for i in 1..=SCAN {
        let xb = lo + (hi - lo) * i as f64 / SCAN as f64;
        let gb = g(xb);
        if ga.is_finite() && gb.is_finite() && (ga < 0.0) != (gb < 0.0) {
            let (mut a, mut b) = (xa, xb);
            for _ in 0..100 {
                let m = 0.5 * (a + b);
                if m <= a || m >= b {
                    break;
                }
                if (g(m) < 0.0) == (ga < 0.0) {
                    a = m;
                } else {
                    b = m;
                }
            }
            out.push(0.5 * (a + b));
        }
        xa = xb;
        ga = gb;
    }
    out
}

fn breaks(p: &Density1D, q: &Density1D, lo: f64, hi: f64) -> Vec<f64> {
    let mut b = p.breakpoints();
    b.extend(q.breakpoints());
    b.extend(crossings(p, q, lo, hi));
    b
}

/// Integrate `h(x)` over the union support with breakpoints at component
/// features and at crossings of the two densities.
pub fn integrate_pair<H: Fn(f64) -> f64>(p: &Density1D, q: &Density1D, h: H) -> Result<QuadResult> {
    let (lo, hi) = union_support(p, q);
    integrate_with_breaks(h, lo, hi, &breaks(p, q, lo, hi), ABS_TOL, MAX_INTERVALS)
}

/// `q f(p/q)` at one point, evaluated as `p·f(u)/u` when `u > 1` and as
/// `p·slope_at_inf` where `q` vanishes.
pub fn f_integrand(f: &FGen, p: f64, q: f64) -> f64 {
    if p == 0.0 && q == 0.0 {
        return 0.0;
    }
    if q == 0.0 {
        return p * f.slope_at_inf;
    }
    let u = p / q;
    if u.is_infinite() {
        p * f.slope_at_inf
    } else if u > 1.0 {
        p * (f.eval(u) / u)
    } else {
        q * f.eval(u)
    }
}

/// `D_f(P‖Q) = ∫ q f(p/q)` by adaptive quadrature (absolute tolerance 1e-7).
pub fn f_divergence(f: &FGen, p: &Density1D, q: &Density1D) -> Result<f64> {
    Ok(integrate_pair(p, q, |x| f_integrand(f, p.pdf(x), q.pdf(x)))?.value)
}

/// Jensen–Shannon divergence `½KL(P‖M) + ½KL(Q‖M)`, `M = (P+Q)/2`.
pub fn jsd(p: &Density1D, q: &Density1D) -> Result<f64> {
    let h = |x: f64| {
        let (lp, lq) = (p.log_pdf(x), q.log_pdf(x));
        let lm = if lp == f64::NEG_INFINITY && lq == f64::NEG_INFINITY {
            return 0.0;
        } else {
            let m = lp.max(lq);
            m + ((lp - m).exp() + (lq - m).exp()).ln() - LN_2
        };
        let term = |l: f64| if l == f64::NEG_INFINITY { 0.0 } else { l.exp() * (l - lm) };
        0.5 * (term(lp) + term(lq))
    };
    Ok(integrate_pair(p, q, h)?.value)
}

/// Total variation `½∫|p − q|`.
pub fn tvd(p: &Density1D, q: &Density1D) -> Result<f64> {
    Ok(integrate_pair(p, q, |x| 0.5 * (p.pdf(x) - q.pdf(x)).abs())?.value)
}

/// Squared Hellinger distance `½∫(√p − √q)²`.
pub fn hellinger2(p: &Density1D, q: &Density1D) -> Result<f64> {
    Ok(integrate_pair(p, q, |x| 0.5 * (p.pdf(x).sqrt() - q.pdf(x).sqrt()).powi(2))?.value)
}

/// `γ_f(x) = (1+x) f((1−x)/(1+x))` for `x ∈ [0, 1]`.
pub fn gamma_f(x: f64, f: &FGen) -> Result<f64> {
    if !(0.0..=1.0).contains(&x) {
        return domain(format!("gamma_f needs x in [0,1], got {x}"));
    }
    Ok((1.0 + x) * f.eval((1.0 - x) / (1.0 + x)))
}

/// Grid used for symmetry checks: 201 log-spaced points on `[1e-3, 1e3]`.
fn sym_grid() -> impl Iterator<Item = f64> {
    (0..=200).map(|i| 10f64.powf(-3.0 + 6.0 * i as f64 / 200.0))
}

/// Largest `|u f(1/u) − f(u)|` on the symmetry grid.
pub fn symmetry_residual(f: &FGen) -> f64 {
    sym_grid().map(|u| (u * f.eval(1.0 / u) - f.eval(u)).abs()).fold(0.0, f64::max)
}

/// Symmetric representative of `f`.
///
/// When `u f(1/u) − f(u) = k(u−1)` (a linear defect, which leaves `D_f`
/// unchanged), returns `f + (k/2)(u−1)`, which is symmetric and induces the
/// same divergence. The slope `k` is read off at `u = 2` and the residual
/// must be linear on the grid to 1e-9 relative.
pub fn symmetrize(f: &FGen) -> Result<FGen> {
    let defect = |u: f64| u * f.eval(1.0 / u) - f.eval(u);
    let k = defect(2.0);
    let worst = sym_grid()
        .map(|u| (defect(u) - k * (u - 1.0)).abs() / (1.0 + u.max(1.0 / u) * (1.0 + k.abs())))
        .fold(0.0, f64::max);
    if !(worst < 1e-9) {
        return Err(Error::Precondition(format!(
            "generator is not symmetric up to a linear term (residual {worst:.3e})"
        )));
    }
    let g = f.clone();
    let f0 = f.eval(0.0);
    if !f0.is_finite() {
        return Err(Error::Precondition("sandwich needs f(0) < inf".into()));
    }
    Ok(FGen {
        name: f.name,
        f: Arc::new(move |u| g.eval(u) + 0.5 * k * (u - 1.0)),
        slope_at_inf: f.slope_at_inf + 0.5 * k,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SandwichReport {
    pub lower: f64,
    pub divergence: f64,
    pub upper: f64,
    pub tvd: f64,
    pub holds: bool,
}

/// Slack allowed on both sides of the sandwich.
pub const SANDWICH_SLACK: f64 = 1e-6;

/// `γ_f(D_TV) ≤ D_f ≤ γ_f(1)·D_TV`, computed with the symmetric
/// representative of `f`.
pub fn sandwich_check(f: &FGen, p: &Density1D, q: &Density1D) -> Result<SandwichReport> {
    let fs = symmetrize(f)?;
    let tv = tvd(p, q)?;
    let divergence = f_divergence(f, p, q)?;
    let lower = gamma_f(tv.min(1.0), &fs)?;
    let upper = gamma_f(1.0, &fs)? * tv;
    let holds = lower <= divergence + SANDWICH_SLACK && divergence <= upper + SANDWICH_SLACK;
    Ok(SandwichReport { lower, divergence, upper, tvd: tv, holds })
}

/// Random Gaussian pair with means in `[−2, 2]` and scales in `[0.3, 2]`.
pub fn random_gaussian_pair(rng: &mut SeededRng) -> (Density1D, Density1D) {
    let mut g = || Density1D::gaussian(rng.uniform_in(-2.0, 2.0), rng.uniform_in(0.3, 2.0)).unwrap();
    (g(), g())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn f_alpha_examples() {
        for a in [0.5, 1.0, 2.0, 7.0, f64::INFINITY] {
            assert!(f_alpha(1.0, a).unwrap().abs() < 1e-15, "{a}");
        }
        assert!((f_alpha(0.0, 0.5).unwrap() - 2.0).abs() < 1e-14);
        let want = 2.0 * (10f64.sqrt() - 2f64.sqrt() - 2.0);
        assert!((f_alpha(3.0, 2.0).unwrap() - want).abs() < 1e-13);
        assert!(f_alpha(-1.0, 2.0).is_err());
    }

    #[test]
    fn f_alpha_zero_closed_form() {
        for a in [0.3, 2.0, 5.0] {
            let want = ratio(a) * (2.0 - 2f64.powf(1.0 / a));
            assert!((f_alpha(0.0, a).unwrap() - want).abs() < 1e-13);
        }
    }

    #[test]
    fn large_alpha_is_finite_and_near_tv_generator() {
        for u in [0.1, 0.9, 1.1, 50.0, 1e6] {
            let v = f_alpha(u, 1000.0).unwrap();
            assert!((v - (1.0 - u).max(0.0)).abs() < 2e-3 * (1.0 + u.ln().abs()), "{u}: {v}");
        }
    }

    #[test]
    fn links_examples() {
        assert_eq!(s_link(0.0, 2.0).unwrap(), 1.0);
        assert_eq!(g_f_alpha(f64::INFINITY, 1.0).unwrap(), 0.0);
        assert_eq!(g_f_alpha(f64::NEG_INFINITY, 2.0).unwrap(), -2.0);
        assert!((k_map(0.0, 1.0).unwrap() - 0.5).abs() < 1e-15);
        assert_eq!(k_map(f64::INFINITY, 3.0).unwrap(), 1.0);
        assert!((k_map(1.0, 2.0).unwrap() - sigmoid(1.0)).abs() < 1e-12);
        assert!(s_link(0.1, 2.0).is_err());
        assert!(s_link(-2.5, 2.0).is_err());
    }

    #[test]
    fn conjugate_recovers_loss0() {
        for a in [0.5, 2.0, 5.0] {
            for i in 1..10 {
                let d = i as f64 / 10.0;
                let t = -alpha_loss1(a, d);
                let got = f_tilde_conjugate(t, a).unwrap();
                assert!((got - alpha_loss1(a, 1.0 - d)).abs() < 1e-9, "{a} {d}");
            }
        }
    }

    #[test]
    fn f_sat_and_f_ns_vanish_at_one() {
        for (ad, ag) in [(0.5, 1.0), (2.0, 1.5), (1.0, 1.0), (0.3, 4.0), (f64::INFINITY, f64::INFINITY)] {
            assert!(f_sat(1.0, ad, ag).unwrap().abs() < 1e-14, "{ad},{ag}");
            assert!(f_ns(1.0, ad, ag).unwrap().abs() < 1e-14, "{ad},{ag}");
        }
    }

    #[test]
    fn f_sat_equal_alphas_differs_from_f_alpha_by_linear_term() {
        for a in [0.5, 2.0] {
            for u in [0.5, 2.0] {
                let diff = f_sat(u, a, a).unwrap() - f_alpha(u, a).unwrap();
                assert!((diff - ratio(a) * (u - 1.0)).abs() < 1e-12, "{a} {u}");
            }
        }
    }

    #[test]
    fn infinite_pair_is_tv_generator() {
        for u in [0.0, 0.3, 1.0, 4.0] {
            assert_eq!(f_sat(u, f64::INFINITY, f64::INFINITY).unwrap(), u.max(1.0) - 1.0);
        }
    }

    #[test]
    fn constants_at_alpha_g_one_are_limits() {
        assert!((sat_constant(1.0) - sat_constant(1.0 + 1e-7)).abs() < 1e-6);
        assert!((ns_constant(1.0) - ns_constant(1.0 - 1e-7)).abs() < 1e-6);
        assert!((sat_constant(2.0) - 2.0 * (2f64.sqrt() - 2.0)).abs() < 1e-15);
    }

    #[test]
    fn dual_cpe_square_example() {
        let lg = crate::losses::make_loss(crate::losses::LossKind::SquareGen, None).unwrap();
        let a = |u: f64| u / (u + 1.0);
        assert!((dual_cpe_f(3.0, &lg, a) + 0.375).abs() < 1e-12);
        assert!((dual_cpe_f(0.0, &lg, a) - 0.75).abs() < 1e-12);
        assert!(dual_cpe_f(1.0, &lg, a).abs() < 1e-15);
    }

    #[test]
    fn gamma_endpoints() {
        let f = symmetrize(&FGen::f_alpha(2.0).unwrap()).unwrap();
        assert!(gamma_f(0.0, &f).unwrap().abs() < 1e-15);
        assert!((gamma_f(1.0, &f).unwrap() - 2.0 * f.eval(0.0)).abs() < 1e-15);
        assert!(gamma_f(1.5, &f).is_err());
    }

    #[test]
    fn symmetrize_rejects_asymmetric() {
        let f = FGen::custom(|u| u * u.ln() - u + 1.0, f64::INFINITY);
        assert!(matches!(symmetrize(&f), Err(Error::Precondition(_))));
    }

    #[test]
    fn equal_densities_give_zero() {
        let p = Density1D::gaussian(0.3, 1.2).unwrap();
        for f in [FGen::f_alpha(0.5).unwrap(), FGen::f_sat(0.5, 1.0).unwrap(), FGen::f_ns(1.0, 1.0).unwrap()] {
            assert!(f_divergence(&f, &p, &p).unwrap().abs() < 1e-9);
        }
        assert!(tvd(&p, &p).unwrap().abs() < 1e-9);
    }

    #[test]
    fn disjoint_jsd_is_ln2() {
        let p = Density1D::gaussian(-20.0, 0.5).unwrap();
        let q = Density1D::gaussian(20.0, 0.5).unwrap();
        assert!((jsd(&p, &q).unwrap() - LN_2).abs() < 1e-6);
    }
}
