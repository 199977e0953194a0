//! Subcommand implementations. Each one resolves its config section, writes
//! `config.resolved` into its output directory and then its artifacts.

use std::path::{Path, PathBuf};

use alphagan::bounds::{
    estimation_upper_bound, estimation_upper_bound_single, fano_constant, generalization_threshold, BoundReport,
    LossLipschitz, NetSpec,
};
use alphagan::closed_form::generator_obj_at_opt_disc;
use alphagan::data::figure_scenario;
use alphagan::density::Density1D;
use alphagan::divergence::{
    f_divergence, f_tilde_conjugate, g_f_alpha, g_inverse, hellinger2, jsd, k_map, sat_constant, tvd, FGen,
};
use alphagan::fmt17;
use alphagan::grad_analysis::{gen_loss_spatial_grad, generator_loss_at, gradient_table};
use alphagan::losses::alpha_loss1;
use alphagan::nn::Activation;
use alphagan::regions::{classify, predicate_margin, Mode};
use alphagan::train::{ext_real, sweep, train, training_data, TrainConfig, Variant};
use serde::{Deserialize, Serialize};

use crate::config::{prepare_out, value, write};
use crate::error::{CliError, Result};

/// Default x-range of the 1D scenario tables; covers every figure scenario.
const X_RANGE: (f64, f64) = (-4.0, 6.0);

fn usage<T>(msg: impl Into<String>) -> Result<T> {
    Err(CliError::Usage(msg.into()))
}

fn linspace(lo: f64, hi: f64, n: usize) -> impl Iterator<Item = f64> {
    (0..n).map(move |i| lo + (hi - lo) * i as f64 / (n - 1) as f64)
}

fn logspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![lo];
    }
    linspace(lo.ln(), hi.ln(), n).map(f64::exp).collect()
}

fn to_json<T: Serialize>(v: &T) -> String {
    serde_json::to_string_pretty(v).expect("report serializes") + "\n"
}

fn x_range(x_min: Option<f64>, x_max: Option<f64>, n: usize) -> Result<(f64, f64)> {
    let (lo, hi) = (x_min.unwrap_or(X_RANGE.0), x_max.unwrap_or(X_RANGE.1));
    if !(hi > lo) || n < 2 {
        return usage(format!("need x_min < x_max and at least 2 points, got [{lo}, {hi}] with {n}"));
    }
    Ok((lo, hi))
}

// ---------------------------------------------------------------- loss-curves

#[derive(Debug, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LossCurves {
    pub scenario: String,
    /// α_D values; α_G equals α_D unless `alpha_g` is set.
    pub alphas: Vec<f64>,
    pub alpha_g: Option<f64>,
    pub grid_points: usize,
    pub x_min: Option<f64>,
    pub x_max: Option<f64>,
    /// Generator objective whose gradient fills the `grad` column.
    pub grad_mode: Mode,
    pub out: PathBuf,
}

impl Default for LossCurves {
    fn default() -> Self {
        LossCurves {
            scenario: "fig1".into(),
            alphas: vec![0.2, 0.5, 1.0, 3.0],
            alpha_g: None,
            grid_points: 401,
            x_min: None,
            x_max: None,
            grad_mode: Mode::Sat,
            out: "out/loss-curves".into(),
        }
    }
}

pub fn loss_curves(c: &LossCurves) -> Result<()> {
    if c.alphas.is_empty() {
        return usage("alpha list is empty");
    }
    let (lo, hi) = x_range(c.x_min, c.x_max, c.grid_points)?;
    let s = figure_scenario(&c.scenario)?;
    let sat = c.grad_mode == Mode::Sat;
    let mut csv = String::from("x,alpha_d,alpha_g,d_star,sat_loss,ns_loss,grad\n");
    for &ad in &c.alphas {
        let ag = c.alpha_g.unwrap_or(ad);
        for x in linspace(lo, hi, c.grid_points) {
            let g = gen_loss_spatial_grad(&s.p_r, &s.p_g, ad, ag, x, sat)?;
            let sat_loss = generator_loss_at(&s.p_r, &s.p_g, ad, ag, x, true)?;
            let ns_loss = generator_loss_at(&s.p_r, &s.p_g, ad, ag, x, false)?;
            let row = [x, ad, ag, g.d_star, sat_loss, ns_loss, g.grad].map(fmt17).join(",");
            csv.push_str(&row);
            csv.push('\n');
        }
    }
    prepare_out(&c.out, vec![("loss_curves", value(c)?)])?;
    write(&c.out, "loss_curves.csv", &csv)
}

// ----------------------------------------------------------------- divergence

#[derive(Debug, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Divergence {
    /// `f_alpha`, `f_tilde`, `f_sat` or `f_ns`.
    pub f: String,
    pub alpha: Option<f64>,
    pub alpha_d: Option<f64>,
    pub alpha_g: Option<f64>,
    /// Fills `p`/`q` from a named scenario when they are not given.
    pub scenario: Option<String>,
    pub p: Option<Density1D>,
    pub q: Option<Density1D>,
    pub out: PathBuf,
}

impl Default for Divergence {
    fn default() -> Self {
        Divergence {
            f: "f_alpha".into(),
            alpha: None,
            alpha_d: None,
            alpha_g: None,
            scenario: None,
            p: None,
            q: None,
            out: "out/divergence".into(),
        }
    }
}

#[derive(Debug, Serialize)]
struct DivergenceReport {
    f: String,
    #[serde(with = "ext_real")]
    alpha_d: f64,
    #[serde(with = "ext_real")]
    alpha_g: f64,
    divergence: f64,
    constant: f64,
    total_generator_objective: f64,
    references: References,
}

/// Classical divergences of the same pair, natural log throughout.
#[derive(Debug, Serialize)]
struct References {
    js: f64,
    two_js: f64,
    tv: f64,
    hellinger2: f64,
}

/// Re-validate a density read from a config file.
fn checked(d: &Density1D) -> Result<Density1D> {
    Ok(match d {
        Density1D::Gaussian { mu, sigma } => Density1D::gaussian(*mu, *sigma)?,
        Density1D::Mixture { components } => {
            let parts: Vec<_> = components.iter().map(|c| (c.weight, c.mu, c.sigma)).collect();
            Density1D::mixture(&parts)?
        }
        Density1D::Tabulated { xs, ps } => Density1D::tabulated(xs.clone(), ps.clone())?,
    })
}

/// `gaussian:mu,sigma` or `mixture:w,mu,sigma;w,mu,sigma;...`.
pub fn parse_density(s: &str) -> Result<Density1D> {
    let bad = || CliError::Usage(format!("cannot parse density '{s}' (gaussian:mu,sigma | mixture:w,mu,s;...)"));
    let nums = |t: &str| -> Result<Vec<f64>> {
        t.split(',').map(|x| x.trim().parse::<f64>().map_err(|_| bad())).collect()
    };
    let (kind, rest) = s.split_once(':').ok_or_else(bad)?;
    match kind.trim() {
        "gaussian" => match nums(rest)?[..] {
            [mu, sigma] => Ok(Density1D::gaussian(mu, sigma)?),
            _ => Err(bad()),
        },
        "mixture" => {
            let mut parts = Vec::new();
            for comp in rest.split(';') {
                match nums(comp)?[..] {
                    [w, mu, sigma] => parts.push((w, mu, sigma)),
                    _ => return Err(bad()),
                }
            }
            Ok(Density1D::mixture(&parts)?)
        }
        _ => Err(bad()),
    }
}

pub fn divergence(c: &Divergence) -> Result<()> {
    let scen = c.scenario.as_deref().map(figure_scenario).transpose()?;
    let pick = |given: &Option<Density1D>, from: Option<&Density1D>, name: &str| -> Result<Density1D> {
        match (given, from) {
            (Some(d), _) => checked(d),
            (None, Some(d)) => Ok(d.clone()),
            (None, None) => usage(format!("density {name} missing (set {name} or scenario)")),
        }
    };
    let p = pick(&c.p, scen.as_ref().map(|s| &s.p_r), "p")?;
    let q = pick(&c.q, scen.as_ref().map(|s| &s.p_g), "q")?;
    let alpha_d = c.alpha_d.or(c.alpha).ok_or_else(|| CliError::Usage("alpha (or alpha_d) is required".into()))?;
    let alpha_g = c.alpha_g.or(c.alpha).unwrap_or(alpha_d);
    let (divergence, constant) = match c.f.as_str() {
        "f_sat" | "f_ns" => {
            let obj = generator_obj_at_opt_disc(alpha_d, alpha_g, &p, &q, c.f == "f_sat")?;
            (obj.divergence, obj.constant)
        }
        // α-GAN value at D*: D_{f_α} + constant, which equals D_{f̃_α}.
        "f_alpha" => (f_divergence(&FGen::f_alpha(alpha_d)?, &p, &q)?, sat_constant(alpha_d)),
        "f_tilde" => (f_divergence(&FGen::f_tilde(alpha_d)?, &p, &q)?, 0.0),
        other => return Err(FGen::from_tag(other, alpha_d, alpha_g).unwrap_err().into()),
    };
    let report = DivergenceReport {
        f: c.f.clone(),
        alpha_d,
        alpha_g,
        divergence,
        constant,
        total_generator_objective: divergence + constant,
        references: {
            let js = jsd(&p, &q)?;
            References { js, two_js: 2.0 * js, tv: tvd(&p, &q)?, hellinger2: hellinger2(&p, &q)? }
        },
    };
    prepare_out(&c.out, vec![("divergence", value(c)?)])?;
    let json = to_json(&report);
    print!("{json}");
    write(&c.out, "divergence.json", &json)
}

// --------------------------------------------------------------------- region

#[derive(Debug, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Region {
    pub mode: Mode,
    /// Explicit α_D values; a log-spaced grid on `[alpha_min, alpha_max]`
    /// when empty.
    pub alpha_d: Vec<f64>,
    pub alpha_g: Vec<f64>,
    pub alpha_min: f64,
    pub alpha_max: f64,
    pub grid: usize,
    pub out: PathBuf,
}

impl Default for Region {
    fn default() -> Self {
        Region {
            mode: Mode::Sat,
            alpha_d: vec![],
            alpha_g: vec![],
            alpha_min: 0.1,
            alpha_max: 10.0,
            grid: 41,
            out: "out/region".into(),
        }
    }
}

pub fn region(c: &Region) -> Result<()> {
    if !(c.alpha_min > 0.0 && c.alpha_max > c.alpha_min) || c.grid == 0 {
        return usage("region grid needs 0 < alpha_min < alpha_max and grid >= 1");
    }
    let axis = |given: &Vec<f64>| if given.is_empty() { logspace(c.alpha_min, c.alpha_max, c.grid) } else { given.clone() };
    let (ads, ags) = (axis(&c.alpha_d), axis(&c.alpha_g));
    let mut csv = String::from(
        "alpha_d,alpha_g,in_region,region_tag,margin,witness_u,witness_log_u,witness_second_deriv,witness_scaled\n",
    );
    for &ad in &ads {
        for &ag in &ags {
            let v = classify(c.mode, ad, ag)?;
            let w = v
                .witness
                .map(|w| [w.u, w.log_u, w.second_deriv, w.scaled].map(fmt17).join(","))
                .unwrap_or_else(|| ",,,".into());
            csv.push_str(&format!(
                "{},{},{},{},{},{w}\n",
                fmt17(ad),
                fmt17(ag),
                v.in_region,
                v.region_tag.as_str(),
                fmt17(predicate_margin(c.mode, ad, ag))
            ));
        }
    }
    prepare_out(&c.out, vec![("region", value(c)?)])?;
    write(&c.out, "region.csv", &csv)
}

// ------------------------------------------------------------------- gradient

#[derive(Debug, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Gradient {
    pub scenario: String,
    pub alpha_d: Vec<f64>,
    pub alpha_g: Vec<f64>,
    pub mode: Mode,
    pub x_min: Option<f64>,
    pub x_max: Option<f64>,
    pub points: usize,
    pub out: PathBuf,
}

impl Default for Gradient {
    fn default() -> Self {
        Gradient {
            scenario: "fig1".into(),
            alpha_d: vec![0.5, 1.0, 2.0],
            alpha_g: vec![1.0],
            mode: Mode::Sat,
            x_min: None,
            x_max: None,
            points: 201,
            out: "out/gradient".into(),
        }
    }
}

pub fn gradient(c: &Gradient) -> Result<()> {
    if c.alpha_d.is_empty() || c.alpha_g.is_empty() {
        return usage("alpha lists must be non-empty");
    }
    let (lo, hi) = x_range(c.x_min, c.x_max, c.points)?;
    let s = figure_scenario(&c.scenario)?;
    let mut csv = String::from("x,alpha_d,alpha_g,d_star,posterior,loss,grad,scalar,log_scalar,score_diff\n");
    for &ad in &c.alpha_d {
        for &ag in &c.alpha_g {
            for g in gradient_table(&s.p_r, &s.p_g, ad, ag, c.mode == Mode::Sat, lo, hi, c.points)? {
                let row = [g.x, ad, ag, g.d_star, g.posterior, g.loss, g.grad, g.scalar, g.log_scalar, g.score_diff];
                csv.push_str(&row.map(fmt17).join(","));
                csv.push('\n');
            }
        }
    }
    prepare_out(&c.out, vec![("gradient", value(c)?)])?;
    write(&c.out, "gradient.csv", &csv)
}

// --------------------------------------------------------------------- bounds

#[derive(Debug, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Threshold {
    /// Universal constant; unspecified in theory, so 1 by default.
    pub c: f64,
    pub p: u64,
    pub delta_cap: f64,
    pub lipschitz: f64,
    pub eps: f64,
}

impl Default for Threshold {
    fn default() -> Self {
        Threshold { c: 1.0, p: 1, delta_cap: 1.0, lipschitz: 1.0, eps: 0.1 }
    }
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Bounds {
    pub d: NetSpec,
    pub g: NetSpec,
    pub n: usize,
    pub m: usize,
    pub delta: f64,
    pub loss: LossLipschitz,
    /// Use the single-objective form (same numbers by construction).
    pub single_objective: bool,
    /// Activations of D's hidden layers; enables the lower-bound constant.
    pub d_activations: Option<Vec<Activation>>,
    pub threshold: Option<Threshold>,
    pub out: PathBuf,
}

impl Default for Bounds {
    fn default() -> Self {
        Bounds {
            d: NetSpec::ones(2),
            g: NetSpec::ones(2),
            n: 1000,
            m: 1000,
            delta: 0.05,
            loss: LossLipschitz::Explicit { l_phi: 1.0, l_psi: 1.0 },
            single_objective: false,
            d_activations: None,
            threshold: None,
            out: "out/bounds".into(),
        }
    }
}

#[derive(Debug, Serialize)]
struct BoundsOutput {
    estimation: BoundReport,
    single_objective: bool,
    generalization_threshold: Option<u64>,
    lower_bound_constant: Option<f64>,
}

pub fn bounds(c: &Bounds) -> Result<()> {
    let f = if c.single_objective { estimation_upper_bound_single } else { estimation_upper_bound };
    let estimation = f(&c.d, &c.g, c.n, c.m, c.delta, c.loss)?;
    let generalization_threshold = c
        .threshold
        .as_ref()
        .map(|t| {
            let k = &estimation.constants;
            generalization_threshold(t.c, t.p, t.delta_cap, t.lipschitz, k.l_phi, k.l_psi, t.eps)
        })
        .transpose()?;
    let lower_bound_constant = c
        .d_activations
        .as_ref()
        .map(|acts| fano_constant(&c.d.layer_norms, acts, c.d.input_bound))
        .transpose()?;
    let out = BoundsOutput { estimation, single_objective: c.single_objective, generalization_threshold, lower_bound_constant };
    prepare_out(&c.out, vec![("bounds", value(c)?)])?;
    let json = to_json(&out);
    print!("{json}");
    write(&c.out, "bounds.json", &json)
}

// ---------------------------------------------------------- equivalence-check

#[derive(Debug, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Equivalence {
    pub alphas: Vec<f64>,
    /// Interior points `d = i/(grid+1)`.
    pub grid: usize,
    pub tolerance: f64,
    pub out: PathBuf,
}

impl Default for Equivalence {
    fn default() -> Self {
        Equivalence { alphas: vec![0.5, 1.0, 2.0, 5.0], grid: 99, tolerance: 1e-9, out: "out/equivalence".into() }
    }
}

#[derive(Debug, Serialize)]
struct EquivalenceRow {
    #[serde(with = "ext_real")]
    alpha: f64,
    /// `max |g(v) + ℓ(1,d)|` with `v = g⁻¹(−ℓ(1,d))`.
    max_residual_loss1: f64,
    /// `max |f̃*(g(v)) − ℓ(0,d)|`.
    max_residual_loss0: f64,
    /// `max |k(v) − d|`.
    max_residual_k: f64,
    k_strictly_increasing: bool,
}

#[derive(Debug, Serialize)]
struct EquivalenceReport {
    rows: Vec<EquivalenceRow>,
    max_residual: f64,
    passed: bool,
}

pub fn equivalence(c: &Equivalence) -> Result<()> {
    if c.alphas.is_empty() || c.grid == 0 {
        return usage("equivalence check needs alphas and grid >= 1");
    }
    let ds: Vec<f64> = (1..=c.grid).map(|i| i as f64 / (c.grid + 1) as f64).collect();
    let mut rows = Vec::new();
    for &alpha in &c.alphas {
        let (mut r1, mut r0, mut rk) = (0.0f64, 0.0f64, 0.0f64);
        let mut ks = Vec::with_capacity(ds.len());
        for &d in &ds {
            let l1 = alpha_loss1(alpha, d);
            let v = g_inverse(-l1, alpha)?;
            let t = g_f_alpha(v, alpha)?;
            r1 = r1.max((t + l1).abs());
            r0 = r0.max((f_tilde_conjugate(t, alpha)? - alpha_loss1(alpha, 1.0 - d)).abs());
            let k = k_map(v, alpha)?;
            rk = rk.max((k - d).abs());
            ks.push(k);
        }
        let k_strictly_increasing = ks.windows(2).all(|w| w[1] > w[0]);
        rows.push(EquivalenceRow {
            alpha,
            max_residual_loss1: r1,
            max_residual_loss0: r0,
            max_residual_k: rk,
            k_strictly_increasing,
        });
    }
    let max_residual =
        rows.iter().map(|r| r.max_residual_loss1.max(r.max_residual_loss0).max(r.max_residual_k)).fold(0.0, f64::max);
    let passed = max_residual < c.tolerance && rows.iter().all(|r| r.k_strictly_increasing);
    let report = EquivalenceReport { rows, max_residual, passed };
    prepare_out(&c.out, vec![("equivalence", value(c)?)])?;
    let json = to_json(&report);
    print!("{json}");
    write(&c.out, "equivalence.json", &json)
}

// -------------------------------------------------------------- train / sweep

/// Default output directory of `train`.
pub const TRAIN_OUT: &str = "out/train";

#[derive(Serialize)]
struct TrainOut<'a> {
    #[serde(flatten)]
    config: &'a TrainConfig,
    out: &'a Path,
}

pub fn run_train(config: &TrainConfig, out: &Path) -> Result<()> {
    config.validate()?;
    let data = training_data(config)?;
    let report = train(config, &data)?;
    for w in &report.warnings {
        eprintln!("{}", serde_json::json!({ "warning": w }));
    }
    prepare_out(out, vec![("train", value(&TrainOut { config, out })?)])?;
    write(out, "report.json", &to_json(&report))?;
    write(out, "trace.csv", &report.trace_csv())
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SweepSection {
    pub variants: Vec<Variant>,
    /// `a..b` (end exclusive) or a comma-separated list.
    pub seeds: String,
    pub out: PathBuf,
}

impl Default for SweepSection {
    fn default() -> Self {
        SweepSection {
            variants: vec![
                Variant::Sat { alpha_d: 1.0, alpha_g: 1.0 },
                Variant::Sat { alpha_d: 0.5, alpha_g: 1.0 },
            ],
            seeds: "0..20".into(),
            out: "out/sweep".into(),
        }
    }
}

pub fn parse_seeds(s: &str) -> Result<Vec<u64>> {
    let bad = || CliError::Usage(format!("cannot parse seeds '{s}' (a..b or a,b,c)"));
    let seeds: Vec<u64> = if let Some((a, b)) = s.split_once("..") {
        let (a, b): (u64, u64) = (a.trim().parse().map_err(|_| bad())?, b.trim().parse().map_err(|_| bad())?);
        (a..b).collect()
    } else {
        s.split(',').map(|x| x.trim().parse().map_err(|_| bad())).collect::<Result<_>>()?
    };
    if seeds.is_empty() {
        return Err(bad());
    }
    Ok(seeds)
}

pub fn run_sweep(base: &TrainConfig, c: &SweepSection, workers: usize) -> Result<()> {
    base.validate()?;
    if c.variants.is_empty() {
        return usage("sweep needs at least one variant");
    }
    for v in &c.variants {
        v.validate()?;
    }
    let seeds = parse_seeds(&c.seeds)?;
    let result = sweep(base, &c.variants, &seeds, workers)?;
    prepare_out(&c.out, vec![("train", value(base)?), ("sweep", value(c)?)])?;
    write(&c.out, "sweep.csv", &result.table_csv())?;
    write(&c.out, "runs.json", &to_json(&result.runs))
}
