//! Globally adaptive Gauss–Kronrod (7/15) quadrature.
//!
//! The interval with the largest error estimate is bisected until the summed
//! estimate drops below the absolute tolerance. The split order depends only
//! on the integrand, so results are deterministic.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::error::{Error, Result};

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_18,
    0.140_653_259_715_525_92,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_83,
];
// Gauss weights for the odd-indexed Kronrod nodes (1, 3, 5, 7).
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

/// Default absolute tolerance.
pub const ABS_TOL: f64 = 1e-7;
/// Default cap on the number of subintervals.
pub const MAX_INTERVALS: usize = 1 << 14;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadResult {
    pub value: f64,
    pub error: f64,
    pub intervals: usize,
}

#[derive(Debug, Clone, Copy)]
struct Piece {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

impl PartialEq for Piece {
    fn eq(&self, o: &Self) -> bool {
        self.cmp(o) == Ordering::Equal
    }
}
impl Eq for Piece {}
impl PartialOrd for Piece {
    fn partial_cmp(&self, o: &Self) -> Option<Ordering> {
        Some(self.cmp(o))
    }
}
impl Ord for Piece {
    fn cmp(&self, o: &Self) -> Ordering {
        // Largest error first; ties broken by position for determinism.
        self.error
            .total_cmp(&o.error)
            .then_with(|| o.a.total_cmp(&self.a))
    }
}

fn kronrod<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> Piece {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut k = WGK[7] * fc;
    let mut g = WG[3] * fc;
    for j in 0..7 {
        let dx = h * XGK[j];
        let s = f(c - dx) + f(c + dx);
        k += WGK[j] * s;
        if j % 2 == 1 {
            g += WG[j / 2] * s;
        }
    }
    let value = k * h;
    let error = ((k - g) * h).abs();
    Piece { a, b, value, error: if error.is_nan() { f64::INFINITY } else { error } }
}

/// Integrate `f` over `[a, b]`, starting from the given interior breakpoints.
pub fn integrate_with_breaks<F: Fn(f64) -> f64>(
    f: F,
    a: f64,
    b: f64,
    breaks: &[f64],
    abs_tol: f64,
    max_intervals: usize,
) -> Result<QuadResult> {
    if !(a.is_finite() && b.is_finite()) {
        return Err(Error::Domain("integration limits must be finite".into()));
    }
    if a == b {
        return Ok(QuadResult { value: 0.0, error: 0.0, intervals: 0 });
    }
    let (lo, hi, sign) = if a < b { (a, b, 1.0) } else { (b, a, -1.0) };
    let mut pts: Vec<f64> = breaks.iter().copied().filter(|&x| x > lo && x < hi).collect();
    pts.push(lo);
    pts.push(hi);
    pts.sort_by(f64::total_cmp);
    pts.dedup();
    let mut heap: BinaryHeap<Piece> = pts.windows(2).map(|w| kronrod(&f, w[0], w[1])).collect();
    let total = |h: &BinaryHeap<Piece>| h.iter().fold((0.0, 0.0), |(v, e), p| (v + p.value, e + p.error));
    let mut err_sum = total(&heap).1;
    loop {
        if err_sum <= abs_tol {
            // Running sums drift; confirm with an exact re-summation.
            let (value, error) = total(&heap);
            if error <= abs_tol {
                return Ok(QuadResult { value: sign * value, error, intervals: heap.len() });
            }
            err_sum = error;
        }
        if heap.len() >= max_intervals {
            return Err(Error::Quadrature { achieved: total(&heap).1, tol: abs_tol });
        }
        let worst = heap.pop().unwrap();
        let m = 0.5 * (worst.a + worst.b);
        if !(m > worst.a && m < worst.b) {
            heap.push(worst);
            return Err(Error::Quadrature { achieved: total(&heap).1, tol: abs_tol });
        }
        let (l, r) = (kronrod(&f, worst.a, m), kronrod(&f, m, worst.b));
        err_sum += l.error + r.error - worst.error;
        heap.push(l);
        heap.push(r);
    }
}

/// Integrate `f` over `[a, b]` with the default tolerance and cap.
pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64) -> Result<QuadResult> {
    integrate_with_breaks(f, a, b, &[], ABS_TOL, MAX_INTERVALS)
}
