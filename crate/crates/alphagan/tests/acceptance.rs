//! Acceptance run: one PASS/FAIL line per criterion; exits non-zero if any
//! criterion fails. Every tolerance and time budget is a named constant.

use std::process::ExitCode;
use std::time::Instant;

use alphagan::bounds::{c_h, estimation_upper_bound, estimation_upper_bound_single, LossLipschitz, NetSpec};
use alphagan::closed_form::{
    brute_force_pointwise_opt, generator_obj_at_opt_disc, generator_value_direct, optimal_disc_values,
    solve_implicit_disc,
};
use alphagan::data::{figure_scenario, SCENARIOS};
use alphagan::density::Density1D;
use alphagan::divergence::{
    dual_cpe_f, f_divergence, f_sat, f_ns, f_tilde_conjugate, g_f_alpha, g_inverse, hellinger2, jsd, k_map,
    random_gaussian_pair, sandwich_check, tvd, FGen,
};
use alphagan::grad_analysis::{gen_loss_spatial_grad, generator_loss_at};
use alphagan::losses::{alpha_loss1, make_loss, LossKind};
use alphagan::nn::{Activation, Mlp};
use alphagan::regions::{find_witness, in_region, predicate_margin, second_deriv, Mode};
use alphagan::rng::SeededRng;
use alphagan::train::{sweep, train_with_hook, training_data, SweepRow, TrainConfig, Variant};
use ndarray::Array2;

// Criterion 1
const OPT_TOL: f64 = 1e-6;
const OPT_BUDGET_S: f64 = 5.0;
// Criterion 2
const IDENTITY_TOL: f64 = 1e-5;
const IDENTITY_BUDGET_S: f64 = 30.0;
// Criterion 3
const JS_TOL: f64 = 1e-2;
const HELLINGER_TOL: f64 = 1e-6;
const TV_TOL: f64 = 1e-3;
// Criterion 4
const EQUIV_TOL: f64 = 1e-9;
// Criterion 5
const SANDWICH_PAIRS: usize = 20;
const CONVERGENCE_END: f64 = 1e-3;
// Criterion 6
const SECOND_DIFF_TOL: f64 = 1e-4;
const BOUNDARY_BAND: f64 = 1e-3;
const REGION_SAMPLES: usize = 500;
// Criterion 7
const GRAD_TOL: f64 = 1e-5;
/// Evaluation error of a loss or generator function, in ulps of its value;
/// sets the rounding floor of the finite-difference oracles in 6 and 7.
const F_EVAL_ULPS: f64 = 64.0;
// Criterion 8
const BOUND_TOL: f64 = 1e-12;
// Criterion 9
const BACKPROP_TOL: f64 = 1e-4;
const BACKPROP_FLOOR: f64 = 1e-2;
const BACKPROP_NETS: usize = 20;
// Criterion 10
const RING_SEEDS: u64 = 20;
const RING_SEEDS_RERUN: u64 = 40;
const RING_EPOCHS: usize = 100;
/// Training-set size: the full 50 000 scaled by 0.1.
const RING_TRAIN: usize = 5_000;
// Criterion 11
const IMPLICIT_TOL: f64 = 1e-10;
const DUAL_F_TOL: f64 = 1e-12;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome { pass, detail: detail.into() }
}

fn gauss(mu: f64, sigma: f64) -> Density1D {
    Density1D::gaussian(mu, sigma).unwrap()
}

fn c1_closed_form_optimality() -> Outcome {
    let t0 = Instant::now();
    let mut rng = SeededRng::new(101, 0);
    let mut worst = 0.0f64;
    for _ in 0..200 {
        let p = rng.uniform_in(0.05, 5.0);
        let q = rng.uniform_in(0.05, 5.0);
        let alpha = rng.uniform_in(0.3f64.ln(), 10f64.ln()).exp();
        let loss = make_loss(LossKind::Alpha, Some(alpha)).unwrap();
        let (t, _) = brute_force_pointwise_opt(&loss, p, q).unwrap();
        worst = worst.max((t - optimal_disc_values(p, q, alpha).unwrap()).abs());
    }
    let secs = t0.elapsed().as_secs_f64();
    outcome(
        worst < OPT_TOL && secs < OPT_BUDGET_S,
        format!("max |t_brute - D*| = {worst:.2e} (tol {OPT_TOL:e}), {secs:.2}s (budget {OPT_BUDGET_S}s)"),
    )
}

fn c2_divergence_identity() -> Outcome {
    let t0 = Instant::now();
    let sat = [(0.5, 1.0), (1.0, 1.0), (0.8, 2.0), (3.0, 2.0), (2.0, 1.5)];
    let ns = [(0.5, 1.0), (1.0, 1.0), (1.5, 1.5), (3.0, 1.2), (0.8, 4.0)];
    let mut rng = SeededRng::new(202, 0);
    let mut worst = 0.0f64;
    for _ in 0..10 {
        let (p, q) = random_gaussian_pair(&mut rng);
        for (pairs, saturating) in [(&sat, true), (&ns, false)] {
            for &(ad, ag) in pairs {
                let mode = if saturating { Mode::Sat } else { Mode::Ns };
                assert!(in_region(mode, ad, ag));
                let direct = generator_value_direct(ad, ag, &p, &q, saturating).unwrap();
                let via_f = generator_obj_at_opt_disc(ad, ag, &p, &q, saturating).unwrap().total;
                worst = worst.max((direct - via_f).abs());
            }
        }
    }
    let secs = t0.elapsed().as_secs_f64();
    outcome(
        worst < IDENTITY_TOL && secs < IDENTITY_BUDGET_S,
        format!("max |V(D*) - (D_f + c)| = {worst:.2e} (tol {IDENTITY_TOL:e}), {secs:.2}s (budget {IDENTITY_BUDGET_S}s)"),
    )
}

fn c3_special_cases() -> Outcome {
    let (p, q) = (gauss(0.0, 1.0), gauss(1.0, 1.0));
    let js = (f_divergence(&FGen::f_alpha(0.999).unwrap(), &p, &q).unwrap() - 2.0 * jsd(&p, &q).unwrap()).abs();
    let h_oracle = 2.0 * -(-1.0f64 / 8.0).exp_m1();
    let h = (f_divergence(&FGen::f_alpha(0.5).unwrap(), &p, &q).unwrap() - h_oracle).abs();
    let h_quad = (2.0 * hellinger2(&p, &q).unwrap() - h_oracle).abs();
    // TV oracle: 2Φ(1/2) − 1.
    let tv_oracle = erf_series(0.5 / std::f64::consts::SQRT_2);
    let tv = (f_divergence(&FGen::f_alpha(1000.0).unwrap(), &p, &q).unwrap() - tv_oracle).abs();
    let tv_quad = (tvd(&p, &q).unwrap() - tv_oracle).abs();
    outcome(
        js < JS_TOL && h < HELLINGER_TOL && h_quad < HELLINGER_TOL && tv < TV_TOL && tv_quad < TV_TOL,
        format!(
            "|D_0.999 - 2JS| = {js:.2e} (tol {JS_TOL:e}); |D_1/2 - 2H^2| = {h:.2e} (tol {HELLINGER_TOL:e}); \
             |D_1000 - TV| = {tv:.2e} (tol {TV_TOL:e})"
        ),
    )
}

/// `erf(x)` by its Maclaurin series; accurate to machine precision for
/// `|x| < 1`.
fn erf_series(x: f64) -> f64 {
    let mut term = x;
    let mut sum = x;
    for n in 1..60 {
        term *= -x * x / n as f64;
        sum += term / (2 * n + 1) as f64;
    }
    2.0 / std::f64::consts::PI.sqrt() * sum
}

fn c4_equivalence_maps() -> Outcome {
    let mut worst = 0.0f64;
    let mut monotone = true;
    for alpha in [0.5, 1.0, 2.0, 5.0] {
        let mut last = f64::NEG_INFINITY;
        for i in 1..=99 {
            let d = i as f64 / 100.0;
            let l1 = alpha_loss1(alpha, d);
            let v = g_inverse(-l1, alpha).unwrap();
            let t = g_f_alpha(v, alpha).unwrap();
            worst = worst.max((t + l1).abs());
            worst = worst.max((f_tilde_conjugate(t, alpha).unwrap() - alpha_loss1(alpha, 1.0 - d)).abs());
        }
        for i in 0..=400 {
            let k = k_map(-20.0 + 0.1 * i as f64, alpha).unwrap();
            monotone &= k > last;
            last = k;
        }
    }
    outcome(
        worst < EQUIV_TOL && monotone,
        format!("max identity residual {worst:.2e} (tol {EQUIV_TOL:e}); k strictly increasing: {monotone}"),
    )
}

fn c5_sandwich() -> Outcome {
    let mut rng = SeededRng::new(505, 0);
    let pairs: Vec<_> = (0..SANDWICH_PAIRS).map(|_| random_gaussian_pair(&mut rng)).collect();
    let mut violations = 0;
    let mut monotone = true;
    let mut end = 0.0f64;
    for alpha in [0.5, 1.0, 2.0, 5.0] {
        let f = FGen::f_alpha(alpha).unwrap();
        for (p, q) in &pairs {
            if !sandwich_check(&f, p, q).unwrap().holds {
                violations += 1;
            }
        }
        let base = gauss(0.0, 1.0);
        let mut last = f64::INFINITY;
        for n in 1..=100 {
            let d = f_divergence(&f, &gauss(1.0 / n as f64, 1.0), &base).unwrap();
            monotone &= d < last;
            last = d;
        }
        end = end.max(last);
    }
    outcome(
        violations == 0 && monotone && end < CONVERGENCE_END,
        format!(
            "sandwich violations {violations}/{}; D(P_n||P) decreasing: {monotone}; max at n=100 {end:.2e} (tol {CONVERGENCE_END:e})",
            4 * SANDWICH_PAIRS
        ),
    )
}

fn c6_regions() -> Outcome {
    // Analytic f'' against second differences of f on log-grids.
    let pairs = [(0.5, 1.0), (2.0, 1.5), (3.0, 3.0), (0.3, 0.2), (1.0, 2.0), (5.0, 1.2)];
    let mut worst = 0.0f64;
    for mode in [Mode::Sat, Mode::Ns] {
        for &(ad, ag) in &pairs {
            let f = |u: f64| match mode {
                Mode::Sat => f_sat(u, ad, ag).unwrap(),
                Mode::Ns => f_ns(u, ad, ag).unwrap(),
            };
            for i in 0..=40 {
                let u = 10f64.powf(-2.0 + 0.1 * i as f64);
                let (fd, err, h) = ridders(|h| (f(u + h) - 2.0 * f(u) + f(u - h)) / (h * h), 0.1 * u);
                let an = second_deriv(mode, u, ad, ag).unwrap();
                // Oracle uncertainty: rounding at the chosen step, or its own error estimate.
                let floor = (F_EVAL_ULPS * f64::EPSILON * f(u).abs().max(1.0) / (h * h)).max(2.0 * err);
                let rel = (fd - an).abs() / (an.abs() + floor / SECOND_DIFF_TOL);
                worst = worst.max(rel);
            }
        }
    }
    // Predicate vs numerical convexity search on random α pairs.
    let mut rng = SeededRng::new(606, 0);
    let (mut contradictions, mut checked) = (0, 0);
    for mode in [Mode::Sat, Mode::Ns] {
        for _ in 0..REGION_SAMPLES {
            let ad = rng.uniform_in(0.1f64.ln(), 10f64.ln()).exp();
            let ag = rng.uniform_in(0.1f64.ln(), 10f64.ln()).exp();
            if predicate_margin(mode, ad, ag).abs() < BOUNDARY_BAND {
                continue;
            }
            checked += 1;
            let convex = find_witness(mode, ad, ag).is_none();
            if convex != in_region(mode, ad, ag) {
                contradictions += 1;
            }
        }
    }
    outcome(
        worst < SECOND_DIFF_TOL && contradictions == 0,
        format!(
            "max relative f'' error {worst:.2e} (tol {SECOND_DIFF_TOL:e}); {contradictions} contradictions in {checked} samples outside the {BOUNDARY_BAND:e} band"
        ),
    )
}

/// Ridders' extrapolation of a difference quotient `q(h)` whose error is
/// even in h. Returns the estimate, its error estimate and the step of the
/// tableau entry that produced it.
fn ridders(q: impl Fn(f64) -> f64, h0: f64) -> (f64, f64, f64) {
    const N: usize = 12;
    const CON: f64 = 1.4;
    let mut a = [[0.0f64; N]; N];
    let mut h = h0;
    a[0][0] = q(h);
    let (mut best, mut err, mut step) = (a[0][0], f64::INFINITY, h0);
    for i in 1..N {
        h /= CON;
        a[0][i] = q(h);
        let mut fac = CON * CON;
        for j in 1..=i {
            a[j][i] = (a[j - 1][i] * fac - a[j - 1][i - 1]) / (fac - 1.0);
            fac *= CON * CON;
            let e = (a[j][i] - a[j - 1][i]).abs().max((a[j][i] - a[j - 1][i - 1]).abs());
            if e <= err {
                (best, err, step) = (a[j][i], e, h);
            }
        }
        if (a[i][i] - a[i - 1][i - 1]).abs() >= 2.0 * err {
            break;
        }
    }
    (best, err, step)
}

/// μ ± 3σ hull of a Gaussian or Gaussian mixture.
fn bulk(d: &Density1D) -> (f64, f64) {
    match d {
        Density1D::Gaussian { mu, sigma } => (mu - 3.0 * sigma, mu + 3.0 * sigma),
        Density1D::Mixture { components } => components
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), c| (lo.min(c.mu - 3.0 * c.sigma), hi.max(c.mu + 3.0 * c.sigma))),
        Density1D::Tabulated { xs, .. } => (xs[0], xs[xs.len() - 1]),
    }
}

fn c7_gradients() -> Outcome {
    let mut worst = 0.0f64;
    let mut sign_breaks = 0;
    let alphas = [0.3, 0.7, 1.0, 2.0, 5.0];
    for name in SCENARIOS {
        let s = figure_scenario(name).unwrap();
        let ((a, b), (c, d)) = (bulk(&s.p_r), bulk(&s.p_g));
        let (lo, hi) = (a.min(c), b.max(d));
        for i in 0..=40 {
            let x = lo + (hi - lo) * i as f64 / 40.0;
            for &ad in &alphas {
                for &ag in &alphas {
                    for saturating in [true, false] {
                        let g = gen_loss_spatial_grad(&s.p_r, &s.p_g, ad, ag, x, saturating).unwrap();
                        let l = |t: f64| generator_loss_at(&s.p_r, &s.p_g, ad, ag, t, saturating).unwrap();
                        // Start the extrapolation below the loss's own e-folding length.
                        let dl = 1e-6 * x.abs().max(1.0);
                        let k = ((l(x + dl).abs().ln() - l(x - dl).abs().ln()) / (2.0 * dl)).abs();
                        let h0 = (1e-2 * x.abs().max(1.0)).min(0.1 / k.max(f64::MIN_POSITIVE));
                        let (fd, err, step) = ridders(|h| (l(x + h) - l(x - h)) / (2.0 * h), h0);
                        // Oracle uncertainty: rounding at the chosen step, or its own error estimate.
                        let floor = (F_EVAL_ULPS * f64::EPSILON * l(x).abs() / step).max(2.0 * err);
                        worst = worst.max((g.grad - fd).abs() / (g.grad.abs() + floor / GRAD_TOL));
                        if g.score_diff != 0.0 && g.sign() != g.score_diff.signum() {
                            sign_breaks += 1;
                        }
                        if g.grad != 0.0 && g.grad.signum() != g.sign() {
                            sign_breaks += 1;
                        }
                    }
                }
            }
        }
    }
    outcome(
        worst < GRAD_TOL && sign_breaks == 0,
        format!("max relative FD error {worst:.2e} on the mu±3sigma bulk (tol {GRAD_TOL:e}); sign changes across the 5x5 grid: {sign_breaks}"),
    )
}

fn c8_bounds() -> Outcome {
    let exact_inf = c_h(2.0, f64::INFINITY).unwrap() == 0.25;
    let chs: Vec<f64> = [1.1, 2.0, 5.0, 50.0, 1000.0].iter().map(|&a| c_h(3.0, a).unwrap()).collect();
    let decreasing = chs.windows(2).all(|w| w[1] < w[0]) && chs.iter().all(|&c| c > 0.25);
    let mut rng = SeededRng::new(808, 0);
    let mut worst = 0.0f64;
    let mut bit_exact = true;
    for _ in 0..50 {
        let k = 1 + rng.index(4);
        let l = 1 + rng.index(4);
        let spec = |rng: &mut SeededRng, depth: usize| {
            NetSpec::new(
                (0..depth).map(|_| rng.uniform_in(0.5, 3.0)).collect(),
                (0..depth - 1).map(|_| rng.uniform_in(0.2, 1.0)).collect(),
                rng.uniform_in(0.5, 2.0),
            )
            .unwrap()
        };
        let (d, g) = (spec(&mut rng, k), spec(&mut rng, l));
        let (n, m) = (10 + rng.index(10_000), 10 + rng.index(10_000));
        let delta = rng.uniform_in(0.001, 0.5);
        let lip = if rng.uniform() < 0.5 {
            LossLipschitz::Explicit { l_phi: rng.uniform_in(0.1, 4.0), l_psi: rng.uniform_in(0.1, 4.0) }
        } else {
            LossLipschitz::Alpha(rng.uniform_in(0.5, 20.0))
        };
        let dual = estimation_upper_bound(&d, &g, n, m, delta, lip).unwrap();
        let single = estimation_upper_bound_single(&d, &g, n, m, delta, lip).unwrap();
        bit_exact &= dual.bound.to_bits() == single.bound.to_bits();
        // Independent recomputation: products in log space, terms regrouped.
        let log_prod = |s: &NetSpec| {
            s.layer_norms.iter().map(|x| x.ln()).sum::<f64>() + s.activation_lipschitz.iter().map(|x| x.ln()).sum::<f64>()
        };
        let (uw, ut) = (log_prod(&d).exp(), log_prod(&g).exp());
        let (lphi, lpsi) = match lip {
            LossLipschitz::Explicit { l_phi, l_psi } => (l_phi, l_psi),
            LossLipschitz::Alpha(a) => {
                let ch = |h: f64| {
                    if a <= 1.0 {
                        let (s, t) = (1.0 / (1.0 + (-h).exp()), 1.0 / (1.0 + h.exp()));
                        s * t.powf((a - 1.0) / a)
                    } else {
                        ((a - 1.0) / (2.0 * a - 1.0)).powf(1.0 - 1.0 / a) * a / (2.0 * a - 1.0)
                    }
                };
                (4.0 * ch(uw * d.input_bound), 4.0 * ch(uw * ut * g.input_bound))
            }
        };
        let (bx, bz, nf, mf) = (d.input_bound, g.input_bound, n as f64, m as f64);
        let ld = (1.0 / delta).ln().sqrt();
        let expect = uw * lphi * bx * ((3.0 * k as f64 / nf).sqrt() + ld / (2.0 * nf).sqrt())
            + uw * ut * lpsi * bz * ((3.0 * (k + l - 1) as f64 / mf).sqrt() + ld / (2.0 * mf).sqrt());
        worst = worst.max((dual.bound - expect).abs() / expect);
    }
    outcome(
        exact_inf && decreasing && worst < BOUND_TOL && bit_exact,
        format!(
            "C_h(inf)=0.25 exactly: {exact_inf}; C_h decreasing: {decreasing}; max relative recomputation error {worst:.2e} (tol {BOUND_TOL:e}); single == dual bitwise: {bit_exact}"
        ),
    )
}

fn c9_nn_engine() -> Outcome {
    let mut rng = SeededRng::new(909, 0);
    let mut worst = 0.0f64;
    for i in 0..BACKPROP_NETS {
        let act = Activation::ALL[i % Activation::ALL.len()];
        let depth = 2 + i % 3;
        let mut sizes = vec![2 + rng.index(3)];
        sizes.extend((0..depth).map(|_| 2 + rng.index(4)));
        let acts: Vec<Activation> = (0..depth).map(|j| if j + 1 == depth { Activation::Identity } else { act }).collect();
        let mut net = Mlp::new(&sizes, &acts, &mut rng).unwrap();
        // Random biases too, so no ReLU pre-activation sits exactly on its kink.
        let randomized: Vec<f64> = net.flat_params().iter().map(|_| 0.5 * rng.normal()).collect();
        net.set_flat_params(&randomized).unwrap();
        let b = 4;
        let x = Array2::from_shape_fn((b, sizes[0]), |_| rng.normal());
        let c = Array2::from_shape_fn((b, *sizes.last().unwrap()), |_| rng.normal());
        // Scalar loss Σ c ⊙ tanh(out).
        let loss = |out: &Array2<f64>| out.iter().zip(c.iter()).map(|(o, w)| w * o.tanh()).sum::<f64>();
        let (out, cache) = net.forward(&x).unwrap();
        let dout = Array2::from_shape_fn(out.dim(), |(r, k)| c[[r, k]] * (1.0 - out[[r, k]].tanh().powi(2)));
        let g = net.backward(&cache, &dout).unwrap();
        let analytic: Vec<f64> =
            g.w.iter().zip(&g.b).flat_map(|(w, b)| w.iter().chain(b.iter()).copied().collect::<Vec<_>>()).collect();
        let p0 = net.flat_params();
        let mut probe = net.clone();
        for (k, &an) in analytic.iter().enumerate() {
            let h = 1e-6;
            let mut p = p0.clone();
            p[k] += h;
            probe.set_flat_params(&p).unwrap();
            let lp = loss(&probe.predict(&x).unwrap());
            p[k] -= 2.0 * h;
            probe.set_flat_params(&p).unwrap();
            let lm = loss(&probe.predict(&x).unwrap());
            let fd = (lp - lm) / (2.0 * h);
            worst = worst.max((fd - an).abs() / an.abs().max(BACKPROP_FLOOR));
        }
    }
    // End-to-end determinism: two identical runs, byte-identical weights.
    let cfg = TrainConfig {
        epochs: 3,
        batch_size: 32,
        d_hidden: vec![16, 16],
        g_hidden: vec![16, 16],
        n_train: 256,
        eval_every: 1,
        eval_samples: 200,
        seed: 9,
        ..Default::default()
    };
    let data = training_data(&cfg).unwrap();
    let snapshot = || {
        let mut bytes = Vec::new();
        train_with_hook(&cfg, &data, |epoch, t| {
            if epoch == cfg.epochs {
                t.d.write_snapshot(&mut bytes).unwrap();
                t.g.write_snapshot(&mut bytes).unwrap();
            }
        })
        .unwrap();
        bytes
    };
    let (a, b) = (snapshot(), snapshot());
    let identical = !a.is_empty() && a == b;
    outcome(
        worst < BACKPROP_TOL && identical,
        format!(
            "max backprop/FD relative error {worst:.2e} over {BACKPROP_NETS} nets (tol {BACKPROP_TOL:e}); identical weights: {identical}"
        ),
    )
}

fn ring_rows(seeds: u64) -> (SweepRow, SweepRow, f64) {
    let t0 = Instant::now();
    let base = TrainConfig {
        epochs: RING_EPOCHS,
        batch_size: 128,
        lr: 1e-4,
        d_hidden: vec![100; 3],
        g_hidden: vec![200; 3],
        n_train: RING_TRAIN,
        ..Default::default()
    };
    let variants =
        [Variant::Sat { alpha_d: 1.0, alpha_g: 1.0 }, Variant::Sat { alpha_d: 0.5, alpha_g: 1.0 }];
    let seed_list: Vec<u64> = (0..seeds).collect();
    let workers = std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1);
    let res = sweep(&base, &variants, &seed_list, workers).unwrap();
    (res.rows[0].clone(), res.rows[1].clone(), t0.elapsed().as_secs_f64())
}

fn c10_ring() -> Outcome {
    let fmt = |r: &SweepRow| format!("{} {:.0}/{:.0}", r.variant, r.success_pct, r.failure_pct);
    let strict = |v: &SweepRow, t: &SweepRow| t.success_pct > v.success_pct && t.failure_pct < v.failure_pct;
    let (vanilla, tuned, secs) = ring_rows(RING_SEEDS);
    let mut detail = format!("{RING_SEEDS} seeds: {} vs {} (success/failure %), {secs:.0}s", fmt(&tuned), fmt(&vanilla));
    let mut pass = strict(&vanilla, &tuned);
    if !pass {
        let (vanilla, tuned, secs) = ring_rows(RING_SEEDS_RERUN);
        pass = strict(&vanilla, &tuned);
        detail += &format!("; not strict, {RING_SEEDS_RERUN} seeds: {} vs {}, {secs:.0}s", fmt(&tuned), fmt(&vanilla));
    }
    outcome(pass, detail)
}

fn c11_square_example() -> Outcome {
    let sq = make_loss(LossKind::SquareDisc, None).unwrap();
    let sg = make_loss(LossKind::SquareGen, None).unwrap();
    let (mut w_t, mut w_f) = (0.0f64, 0.0f64);
    for i in 0..=80 {
        let u = 10f64.powf(-4.0 + 0.1 * i as f64);
        let a = u / (u + 1.0);
        w_t = w_t.max((solve_implicit_disc(&sq, u).unwrap() - a).abs());
        let f = dual_cpe_f(u, &sg, |u| u / (u + 1.0));
        w_f = w_f.max((f - 3.0 * (1.0 - u) / (4.0 * (u + 1.0))).abs());
    }
    outcome(
        w_t < IMPLICIT_TOL && w_f < DUAL_F_TOL,
        format!("max |t*(u) - u/(u+1)| = {w_t:.2e} (tol {IMPLICIT_TOL:e}); max |f(u) - 3(1-u)/(4(u+1))| = {w_f:.2e} (tol {DUAL_F_TOL:e})"),
    )
}

type Criterion = (&'static str, fn() -> Outcome);

fn main() -> ExitCode {
    let criteria: [Criterion; 11] = [
        ("closed-form optimal discriminator", c1_closed_form_optimality),
        ("generator objective = divergence + constant", c2_divergence_identity),
        ("special-case limits", c3_special_cases),
        ("equivalence maps", c4_equivalence_maps),
        ("sandwich and convergence", c5_sandwich),
        ("convexity regions", c6_regions),
        ("gradient decomposition", c7_gradients),
        ("bound calculators", c8_bounds),
        ("network engine", c9_nn_engine),
        ("2D ring: tuned vs vanilla", c10_ring),
        ("square-loss worked example", c11_square_example),
    ];
    let skip_ring = std::env::var_os("ALPHAGAN_SKIP_RING").is_some();
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        if i == 9 && skip_ring {
            println!("criterion {:>2} FAIL {name}: not run (ALPHAGAN_SKIP_RING set)", i + 1);
            failed += 1;
            continue;
        }
        let o = run();
        println!("criterion {:>2} {} {name}: {}", i + 1, if o.pass { "PASS" } else { "FAIL" }, o.detail);
        failed += usize::from(!o.pass);
    }
    println!("acceptance: {} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
