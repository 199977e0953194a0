//! Small numerically careful scalar helpers.

/// Logistic sigmoid, evaluated without overflow for either sign.
#[inline]
pub fn sigmoid(z: f64) -> f64 {
    if z >= 0.0 {
        1.0 / (1.0 + (-z).exp())
    } else {
        let e = z.exp();
        e / (1.0 + e)
    }
}

/// `ln(1 + e^x)`.
#[inline]
pub fn softplus(x: f64) -> f64 {
    if x == f64::NEG_INFINITY {
        0.0
    } else if x > 0.0 {
        x + (-x).exp().ln_1p()
    } else {
        x.exp().ln_1p()
    }
}

/// `ln(p / (1 - p))`.
#[inline]
pub fn logit(p: f64) -> f64 {
    p.ln() - (-p).ln_1p()
}

/// `α/(α−1)`, the recurring prefactor; `1` at `α = ∞`.
#[inline]
pub fn ratio(alpha: f64) -> f64 {
    if alpha.is_infinite() {
        1.0
    } else {
        alpha / (alpha - 1.0)
    }
}

/// `(α−1)/α`, the recurring exponent; `1` at `α = ∞`.
#[inline]
pub fn expo(alpha: f64) -> f64 {
    if alpha.is_infinite() {
        1.0
    } else {
        (alpha - 1.0) / alpha
    }
}

/// Reject α outside `(0, ∞]`.
pub fn check_alpha(alpha: f64, what: &str) -> crate::Result<()> {
    if alpha.is_nan() || alpha <= 0.0 {
        return crate::error::domain(format!("{what} must lie in (0, inf], got {alpha}"));
    }
    Ok(())
}

/// Golden-section maximisation of a unimodal function on `[lo, hi]`.
pub fn golden_max<F: Fn(f64) -> f64>(f: F, mut lo: f64, mut hi: f64, tol: f64) -> (f64, f64) {
    let g = (5f64.sqrt() - 1.0) / 2.0;
    let mut x1 = hi - g * (hi - lo);
    let mut x2 = lo + g * (hi - lo);
    let (mut f1, mut f2) = (f(x1), f(x2));
    for _ in 0..300 {
        if hi - lo <= tol {
            break;
        }
        if f1 < f2 {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + g * (hi - lo);
            f2 = f(x2);
        } else {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - g * (hi - lo);
            f1 = f(x1);
        }
    }
    if f1 >= f2 {
        (x1, f1)
    } else {
        (x2, f2)
    }
}
