//! Convexity regions of the saturating and non-saturating (α_D, α_G)
//! generators, with analytic second derivatives.
//!
//! Writing `a = α_D`, `β = 1 − 1/α_G`, `w = u^a`:
//!
//! ```text
//! f_sat''(u) = a (1+w)^{−2−β} u^{−2} [ (1+aβ)(u w^β + w²) + (1−a)(u w^{β+1} + w) ]
//! f_ns''(u)  = a w^β (1+w)^{−2−β} u^{−2} [ (1−aβ) + (1+a) w ]
//! ```
//!
//! Every term is a signed power of `u`, so signs and magnitudes are computed
//! in log space; this keeps witness searches meaningful where `u^a`
//! overflows.

use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};
use crate::math::{check_alpha, golden_max, softplus};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    Sat,
    Ns,
}

impl std::str::FromStr for Mode {
    type Err = crate::Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "sat" => Ok(Mode::Sat),
            "ns" => Ok(Mode::Ns),
            _ => Err(crate::Error::Config(format!("unknown region mode '{s}' (sat|ns)"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum RegionTag {
    R1,
    R2,
    #[serde(rename = "R_NS")]
    RNs,
    #[serde(rename = "outside")]
    Outside,
}

impl RegionTag {
    pub fn as_str(self) -> &'static str {
        match self {
            RegionTag::R1 => "R1",
            RegionTag::R2 => "R2",
            RegionTag::RNs => "R_NS",
            RegionTag::Outside => "outside",
        }
    }
}

/// A point where the generator is not convex.
///
/// `second_deriv` is `f''(u)` and may underflow to `-0.0` far out in the
/// tails; `log_u` and `scaled` (f'' divided by a positive factor, always
/// strictly negative) remain exact there.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Witness {
    pub u: f64,
    pub log_u: f64,
    pub second_deriv: f64,
    pub scaled: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RegionVerdict {
    pub in_region: bool,
    pub region_tag: RegionTag,
    pub witness: Option<Witness>,
}

/// Saturating region: `α_D ≤ 1, α_G > α_D/(α_D+1)` (R1) or
/// `α_D > 1, α_D/2 < α_G ≤ α_D` (R2). `(∞, ∞)` is the limit of R2.
pub fn region_sat(alpha_d: f64, alpha_g: f64) -> RegionTag {
    if alpha_d.is_infinite() {
        return if alpha_g.is_infinite() { RegionTag::R2 } else { RegionTag::Outside };
    }
    if alpha_d <= 1.0 {
        if alpha_g > alpha_d / (alpha_d + 1.0) {
            return RegionTag::R1;
        }
    } else if alpha_d / 2.0 < alpha_g && alpha_g <= alpha_d {
        return RegionTag::R2;
    }
    RegionTag::Outside
}

pub fn in_region_sat(alpha_d: f64, alpha_g: f64) -> bool {
    region_sat(alpha_d, alpha_g) != RegionTag::Outside
}

/// `α_D + α_G > α_G α_D`, evaluated as `1/α_D + 1/α_G > 1` so that infinite
/// parameters take their limits. Strict: `(2, 2)` is outside.
pub fn in_region_ns(alpha_d: f64, alpha_g: f64) -> bool {
    1.0 / alpha_d + 1.0 / alpha_g > 1.0
}

pub fn in_region(mode: Mode, alpha_d: f64, alpha_g: f64) -> bool {
    match mode {
        Mode::Sat => in_region_sat(alpha_d, alpha_g),
        Mode::Ns => in_region_ns(alpha_d, alpha_g),
    }
}

/// Distance (in parameter units) to the nearest boundary of the predicate,
/// including the `α_D = 1` seam of the saturating region.
pub fn predicate_margin(mode: Mode, alpha_d: f64, alpha_g: f64) -> f64 {
    match mode {
        Mode::Sat => {
            let seam = (alpha_d - 1.0).abs();
            let lower = if alpha_d <= 1.0 {
                (alpha_g - alpha_d / (alpha_d + 1.0)).abs()
            } else {
                (alpha_g - alpha_d / 2.0).abs().min((alpha_d - alpha_g).abs())
            };
            seam.min(lower)
        }
        Mode::Ns => (alpha_d + alpha_g - alpha_g * alpha_d).abs(),
    }
}

/// `(log |c|, sign c, log-magnitude)` terms whose signed sum is the bracket.
struct Terms {
    prefix: f64,
    terms: Vec<(f64, f64)>,
}

impl Terms {
    fn collect(&self) -> (f64, f64) {
        let lse = |sign: f64| {
            let xs: Vec<f64> = self.terms.iter().filter(|t| t.0 == sign).map(|t| t.1).collect();
            let m = xs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            if m == f64::NEG_INFINITY {
                m
            } else {
                m + xs.iter().map(|x| (x - m).exp()).sum::<f64>().ln()
            }
        };
        (lse(1.0), lse(-1.0))
    }

    /// Bracket value scaled so that its larger part has magnitude 1.
    fn scaled(&self) -> f64 {
        let (pos, neg) = self.collect();
        let m = pos.max(neg);
        if m == f64::NEG_INFINITY {
            return 0.0;
        }
        (pos - m).exp() - (neg - m).exp()
    }

    fn value(&self) -> f64 {
        let (pos, neg) = self.collect();
        (self.prefix + pos).exp() - (self.prefix + neg).exp()
    }
}

fn push(terms: &mut Vec<(f64, f64)>, c: f64, log_mag: f64) {
    if c != 0.0 {
        terms.push((c.signum(), c.abs().ln() + log_mag));
    }
}

fn sat_terms(log_u: f64, a: f64, alpha_g: f64) -> Terms {
    let beta = 1.0 - 1.0 / alpha_g;
    let lw = a * log_u;
    let prefix = a.ln() - (2.0 + beta) * softplus(lw) - 2.0 * log_u;
    let (c1, c2) = (1.0 + a * beta, 1.0 - a);
    let mut terms = Vec::with_capacity(4);
    push(&mut terms, c1, log_u + beta * lw);
    push(&mut terms, c1, 2.0 * lw);
    push(&mut terms, c2, log_u + (beta + 1.0) * lw);
    push(&mut terms, c2, lw);
    Terms { prefix, terms }
}

fn ns_terms(log_u: f64, a: f64, alpha_g: f64) -> Terms {
    let beta = 1.0 - 1.0 / alpha_g;
    let lw = a * log_u;
    let prefix = a.ln() + beta * lw - (2.0 + beta) * softplus(lw) - 2.0 * log_u;
    let mut terms = Vec::with_capacity(2);
    push(&mut terms, 1.0 - a * beta, 0.0);
    push(&mut terms, 1.0 + a, lw);
    Terms { prefix, terms }
}

fn terms(mode: Mode, log_u: f64, a: f64, alpha_g: f64) -> Terms {
    match mode {
        Mode::Sat => sat_terms(log_u, a, alpha_g),
        Mode::Ns => ns_terms(log_u, a, alpha_g),
    }
}

fn check(u: f64, alpha_d: f64, alpha_g: f64) -> Result<()> {
    check_alpha(alpha_d, "alpha_d")?;
    check_alpha(alpha_g, "alpha_g")?;
    if !(u > 0.0 && u.is_finite()) {
        return domain(format!("second derivative needs finite u > 0, got {u}"));
    }
    Ok(())
}

/// Analytic `f_sat''(u)`. With `α_D = ∞` the generator is piecewise linear
/// and the result is 0 away from `u = 1`.
pub fn second_deriv_sat(u: f64, alpha_d: f64, alpha_g: f64) -> Result<f64> {
    check(u, alpha_d, alpha_g)?;
    if alpha_d.is_infinite() {
        return Ok(0.0);
    }
    Ok(sat_terms(u.ln(), alpha_d, alpha_g).value())
}

/// Analytic `f_ns''(u)`.
pub fn second_deriv_ns(u: f64, alpha_d: f64, alpha_g: f64) -> Result<f64> {
    check(u, alpha_d, alpha_g)?;
    if alpha_d.is_infinite() {
        return Ok(0.0);
    }
    Ok(ns_terms(u.ln(), alpha_d, alpha_g).value())
}

pub fn second_deriv(mode: Mode, u: f64, alpha_d: f64, alpha_g: f64) -> Result<f64> {
    match mode {
        Mode::Sat => second_deriv_sat(u, alpha_d, alpha_g),
        Mode::Ns => second_deriv_ns(u, alpha_d, alpha_g),
    }
}

/// Points of the base log-grid on `[1e-4, 1e4]`.
pub const WITNESS_GRID: usize = 401;
/// Largest `|ln u|` visited when the base grid has no witness.
pub const WITNESS_LOG_U_MAX: f64 = 1e7;

fn witness_at(mode: Mode, log_u: f64, a: f64, alpha_g: f64) -> Witness {
    let t = terms(mode, log_u, a, alpha_g);
    Witness { u: log_u.exp(), log_u, second_deriv: t.value(), scaled: t.scaled() }
}

/// Search for `f'' < 0`: the 401-point grid on `[1e-4, 1e4]` first, then
/// geometrically growing steps in `ln u` out to `±WITNESS_LOG_U_MAX`.
/// The most negative grid point is refined by golden section.
pub fn find_witness(mode: Mode, alpha_d: f64, alpha_g: f64) -> Option<Witness> {
    if alpha_d.is_infinite() {
        return None;
    }
    let score = |l: f64| -terms(mode, l, alpha_d, alpha_g).scaled();
    let lo = 1e-4f64.ln();
    let step = (2.0 * -lo) / (WITNESS_GRID - 1) as f64;
    let mut grid: Vec<f64> = (0..WITNESS_GRID).map(|i| lo + step * i as f64).collect();
    let mut l = -lo;
    let mut h = step;
    while l < WITNESS_LOG_U_MAX {
        h *= 1.25;
        l += h;
        grid.push(l);
        grid.push(-l);
    }
    let (best, val) = grid
        .iter()
        .map(|&l| (l, score(l)))
        .fold((0.0, f64::NEG_INFINITY), |b, c| if c.1 > b.1 { c } else { b });
    if val <= 0.0 {
        return None;
    }
    let w = (best.abs() * 0.2).max(step);
    let (l, v) = golden_max(score, best - w, best + w, 1e-10 * best.abs().max(1.0));
    let l = if v > val { l } else { best };
    Some(witness_at(mode, l, alpha_d, alpha_g))
}

/// Verdict with a non-convexity witness when outside (finite α_D only).
pub fn classify(mode: Mode, alpha_d: f64, alpha_g: f64) -> Result<RegionVerdict> {
    check_alpha(alpha_d, "alpha_d")?;
    check_alpha(alpha_g, "alpha_g")?;
    let tag = match mode {
        Mode::Sat => region_sat(alpha_d, alpha_g),
        Mode::Ns if in_region_ns(alpha_d, alpha_g) => RegionTag::RNs,
        Mode::Ns => RegionTag::Outside,
    };
    let in_region = tag != RegionTag::Outside;
    let witness = if in_region { None } else { find_witness(mode, alpha_d, alpha_g) };
    Ok(RegionVerdict { in_region, region_tag: tag, witness })
}

/// Whether the analytic `f''` is positive at every point of a log-grid.
pub fn convex_on_grid(mode: Mode, alpha_d: f64, alpha_g: f64, lo: f64, hi: f64, n: usize) -> bool {
    let (a, b) = (lo.ln(), hi.ln());
    (0..n).all(|i| {
        let l = a + (b - a) * i as f64 / (n - 1) as f64;
        terms(mode, l, alpha_d, alpha_g).scaled() > 0.0
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn predicate_examples() {
        assert!(in_region_sat(0.5, 1.0));
        assert!(!in_region_sat(2.0, 3.0));
        assert!(in_region_sat(1.0, 1.0));
        assert!(in_region_ns(1.0, 1.0));
        assert!(!in_region_ns(3.0, 3.0));
        assert!(in_region_ns(0.5, 10.0));
        assert!(!in_region_ns(2.0, 2.0));
        assert!(in_region_sat(f64::INFINITY, f64::INFINITY));
        assert!(!in_region_ns(f64::INFINITY, 2.0));
        assert!(in_region_ns(f64::INFINITY, 0.5));
    }

    #[test]
    fn inside_r1_positive_on_grid() {
        assert!(convex_on_grid(Mode::Sat, 0.5, 1.0, 1e-2, 1e2, 401));
        assert!(classify(Mode::Sat, 0.5, 1.0).unwrap().witness.is_none());
    }

    #[test]
    fn ns_three_three_has_witness() {
        let v = classify(Mode::Ns, 3.0, 3.0).unwrap();
        assert_eq!(v.region_tag, RegionTag::Outside);
        let w = v.witness.unwrap();
        assert!(w.second_deriv < 0.0 && w.scaled < 0.0);
        assert!(second_deriv_ns(w.u, 3.0, 3.0).unwrap() < 0.0);
    }

    #[test]
    fn far_witness_near_the_diagonal() {
        // The negative tail starts near ln u ≈ 700 here.
        let w = find_witness(Mode::Sat, 2.0, 2.002).unwrap();
        assert!(w.log_u > 100.0 && w.scaled < 0.0);
    }

    #[test]
    fn log_space_value_matches_direct_formula() {
        let (u, a, ag) = (1.7f64, 0.8, 2.5);
        let beta = 1.0 - 1.0 / ag;
        let w = u.powf(a);
        let direct = a * (1.0 + w).powf(-2.0 - beta) / (u * u)
            * ((1.0 + a * beta) * (u * w.powf(beta) + w * w)
                + (1.0 - a) * (u * w.powf(beta + 1.0) + w));
        assert!((second_deriv_sat(u, a, ag).unwrap() - direct).abs() < 1e-14);
        let direct_ns = a * w.powf(beta) * (1.0 + w).powf(-2.0 - beta) / (u * u)
            * ((1.0 - a * beta) + (1.0 + a) * w);
        assert!((second_deriv_ns(u, a, ag).unwrap() - direct_ns).abs() < 1e-14);
    }

    #[test]
    fn rejects_bad_inputs() {
        assert!(second_deriv_sat(0.0, 1.0, 1.0).is_err());
        assert!(second_deriv_ns(1.0, 0.0, 1.0).is_err());
    }
}
