//! (α_D, α_G)-GAN training on the 2D ring: saturating, non-saturating and
//! least-squares variants, plus multi-seed sweeps.
//!
//! Each iteration the discriminator plays first (one real batch plus one
//! freshly generated batch per D step), then the generator takes one step on
//! a freshly generated batch. The discriminator network outputs a logit `z`;
//! α-loss variants read `D = σ(z)` and LSGAN reads `D = z` directly.

use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use ndarray::{Array2, Axis};
use serde::{Deserialize, Serialize};

use crate::data::{fill_normal, mode_coverage, sample_ring, RingSpec};
use crate::error::{Error, Result};
use crate::losses::alpha_loss1;
use crate::math::{check_alpha, sigmoid};
use crate::nn::{Activation, AdamState, Mlp};
use crate::regions::{in_region_ns, in_region_sat};
use crate::rng::{stream, SeededRng};

/// Discriminator outputs are clamped to `[CLAMP, 1 − CLAMP]` inside losses.
pub const CLAMP: f64 = 1e-7;

/// Consecutive non-finite steps tolerated before a run is aborted.
const MAX_BAD_STEPS: usize = 10;

/// Serde helpers for α values, which may be `inf`.
pub mod ext_real {
    use serde::{de, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &f64, s: S) -> Result<S::Ok, S::Error> {
        if v.is_infinite() && *v > 0.0 {
            s.serialize_str("inf")
        } else {
            s.serialize_f64(*v)
        }
    }

    #[derive(Deserialize)]
    #[serde(untagged)]
    enum Raw {
        Num(f64),
        Text(String),
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
        match Raw::deserialize(d)? {
            Raw::Num(v) => Ok(v),
            Raw::Text(t) => super::parse_alpha(&t).map_err(de::Error::custom),
        }
    }
}

/// Parse an α value; accepts `inf`/`infinity`.
pub fn parse_alpha(s: &str) -> Result<f64> {
    let t = s.trim();
    let v = match t.to_ascii_lowercase().as_str() {
        "inf" | "infinity" | "+inf" => f64::INFINITY,
        _ => t
            .parse::<f64>()
            .map_err(|_| Error::Config(format!("cannot parse alpha '{s}'")))?,
    };
    check_alpha(v, "alpha")?;
    Ok(v)
}

pub fn fmt_alpha(a: f64) -> String {
    if a.is_infinite() {
        "inf".into()
    } else {
        format!("{a}")
    }
}

/// GAN objective family.
///
/// Deserializes from either the tagged table form or the `sat:αD,αG`
/// string form.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
#[serde(try_from = "VariantInput")]
pub enum Variant {
    Sat {
        #[serde(with = "ext_real")]
        alpha_d: f64,
        #[serde(with = "ext_real")]
        alpha_g: f64,
    },
    Ns {
        #[serde(with = "ext_real")]
        alpha_d: f64,
        #[serde(with = "ext_real")]
        alpha_g: f64,
    },
    /// Least squares with targets a = 0, b = 1, c = 1.
    Lsgan,
}

#[derive(Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
enum Tagged {
    Sat {
        #[serde(with = "ext_real")]
        alpha_d: f64,
        #[serde(with = "ext_real")]
        alpha_g: f64,
    },
    Ns {
        #[serde(with = "ext_real")]
        alpha_d: f64,
        #[serde(with = "ext_real")]
        alpha_g: f64,
    },
    Lsgan,
}

#[derive(Deserialize)]
#[serde(untagged)]
enum VariantInput {
    Text(String),
    Tagged(Tagged),
}

impl TryFrom<VariantInput> for Variant {
    type Error = Error;
    fn try_from(v: VariantInput) -> Result<Self> {
        match v {
            VariantInput::Text(s) => s.parse(),
            VariantInput::Tagged(Tagged::Sat { alpha_d, alpha_g }) => Ok(Variant::Sat { alpha_d, alpha_g }),
            VariantInput::Tagged(Tagged::Ns { alpha_d, alpha_g }) => Ok(Variant::Ns { alpha_d, alpha_g }),
            VariantInput::Tagged(Tagged::Lsgan) => Ok(Variant::Lsgan),
        }
    }
}

impl Variant {
    pub fn validate(&self) -> Result<()> {
        match *self {
            Variant::Sat { alpha_d, alpha_g } | Variant::Ns { alpha_d, alpha_g } => {
                check_alpha(alpha_d, "alpha_d")?;
                check_alpha(alpha_g, "alpha_g")
            }
            Variant::Lsgan => Ok(()),
        }
    }

    /// Whether the generator's induced f is strictly convex for these α.
    pub fn in_region(&self) -> Option<bool> {
        match *self {
            Variant::Sat { alpha_d, alpha_g } => Some(in_region_sat(alpha_d, alpha_g)),
            Variant::Ns { alpha_d, alpha_g } => Some(in_region_ns(alpha_d, alpha_g)),
            Variant::Lsgan => None,
        }
    }
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Variant::Sat { alpha_d, alpha_g } => {
                write!(f, "sat:{},{}", fmt_alpha(alpha_d), fmt_alpha(alpha_g))
            }
            Variant::Ns { alpha_d, alpha_g } => {
                write!(f, "ns:{},{}", fmt_alpha(alpha_d), fmt_alpha(alpha_g))
            }
            Variant::Lsgan => f.write_str("lsgan"),
        }
    }
}

impl FromStr for Variant {
    type Err = Error;
    /// `sat:αD,αG`, `ns:αD,αG` or `lsgan`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s == "lsgan" {
            return Ok(Variant::Lsgan);
        }
        let (tag, rest) = s
            .split_once(':')
            .ok_or_else(|| Error::Config(format!("invalid variant '{s}'")))?;
        let (a, b) = rest
            .split_once(',')
            .ok_or_else(|| Error::Config(format!("variant '{s}' needs two alphas")))?;
        let (alpha_d, alpha_g) = (parse_alpha(a)?, parse_alpha(b)?);
        match tag {
            "sat" => Ok(Variant::Sat { alpha_d, alpha_g }),
            "ns" => Ok(Variant::Ns { alpha_d, alpha_g }),
            _ => Err(Error::Config(format!("unknown variant tag '{tag}'"))),
        }
    }
}

/// Full description of one training run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TrainConfig {
    pub variant: Variant,
    pub epochs: usize,
    pub batch_size: usize,
    pub lr: f64,
    /// Hidden widths of D (input 2, output 1 logit).
    pub d_hidden: Vec<usize>,
    /// Hidden widths of G (input `latent_dim`, output 2).
    pub g_hidden: Vec<usize>,
    pub hidden_activation: Activation,
    pub latent_dim: usize,
    pub n_train: usize,
    pub ring_modes: usize,
    pub ring_radius: f64,
    pub ring_variance: f64,
    /// Seed for the training set (shared by all runs of a sweep).
    pub data_seed: u64,
    /// Seed for weight initialisation, shuffling and noise.
    pub seed: u64,
    pub d_steps_per_g_step: usize,
    pub eval_every: usize,
    pub eval_samples: usize,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            variant: Variant::Sat { alpha_d: 1.0, alpha_g: 1.0 },
            epochs: 400,
            batch_size: 128,
            lr: 1e-4,
            d_hidden: vec![200, 200, 200],
            g_hidden: vec![400, 400, 400],
            hidden_activation: Activation::LeakyRelu,
            latent_dim: 2,
            n_train: crate::data::FULL_TRAIN,
            ring_modes: 8,
            ring_radius: 1.0,
            ring_variance: 1e-4,
            data_seed: 0,
            seed: 0,
            d_steps_per_g_step: 1,
            eval_every: 10,
            eval_samples: 2500,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<()> {
        self.variant.validate()?;
        let pos = [
            ("batch_size", self.batch_size),
            ("latent_dim", self.latent_dim),
            ("n_train", self.n_train),
            ("d_steps_per_g_step", self.d_steps_per_g_step),
            ("eval_every", self.eval_every),
            ("eval_samples", self.eval_samples),
        ];
        for (name, v) in pos {
            if v == 0 {
                return Err(Error::Config(format!("{name} must be positive")));
            }
        }
        if !(self.lr > 0.0 && self.lr.is_finite()) {
            return Err(Error::Config(format!("lr must be positive, got {}", self.lr)));
        }
        if self.d_hidden.contains(&0) || self.g_hidden.contains(&0) {
            return Err(Error::Config("hidden widths must be positive".into()));
        }
        self.ring().validate()
    }

    pub fn ring(&self) -> RingSpec {
        RingSpec {
            n_modes: self.ring_modes,
            radius: self.ring_radius,
            variance: self.ring_variance,
            n_samples: self.n_train,
        }
    }

    fn arch(&self, input: usize, hidden: &[usize], output: usize) -> (Vec<usize>, Vec<Activation>) {
        let mut sizes = vec![input];
        sizes.extend(hidden);
        sizes.push(output);
        let mut acts = vec![self.hidden_activation; hidden.len()];
        acts.push(Activation::Identity);
        (sizes, acts)
    }

    /// Fresh D (logit output) and G networks for this seed.
    pub fn init_networks(&self) -> Result<(Mlp, Mlp)> {
        let (ds, da) = self.arch(2, &self.d_hidden, 1);
        let (gs, ga) = self.arch(self.latent_dim, &self.g_hidden, 2);
        let d = Mlp::new(&ds, &da, &mut SeededRng::new(self.seed, stream::INIT_D))?;
        let g = Mlp::new(&gs, &ga, &mut SeededRng::new(self.seed, stream::INIT_G))?;
        Ok((d, g))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Outcome {
    Success,
    Failure,
    Partial,
}

impl Outcome {
    pub fn classify(coverage: usize, n_modes: usize) -> Self {
        if coverage == n_modes {
            Outcome::Success
        } else if coverage == 0 {
            Outcome::Failure
        } else {
            Outcome::Partial
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EpochRecord {
    pub epoch: usize,
    pub coverage: Option<usize>,
    pub d_loss: Option<f64>,
    pub g_loss: Option<f64>,
}

/// Result of one seed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub seed: u64,
    pub variant: String,
    pub in_region: Option<bool>,
    pub warnings: Vec<String>,
    /// Epoch 0 is the untrained generator and carries no losses.
    pub trace: Vec<EpochRecord>,
    pub final_coverage: usize,
    pub outcome: Outcome,
    pub diagnostic: Option<String>,
    pub wall_time_s: f64,
}

impl RunReport {
    /// `(epoch, coverage)` at every evaluation.
    pub fn coverage_trace(&self) -> Vec<(usize, usize)> {
        self.trace.iter().filter_map(|r| r.coverage.map(|c| (r.epoch, c))).collect()
    }

    /// `epoch,coverage,d_loss,g_loss` with an empty coverage cell on
    /// epochs that were not evaluated.
    pub fn trace_csv(&self) -> String {
        let mut s = String::from("epoch,coverage,d_loss,g_loss\n");
        for r in &self.trace {
            let c = r.coverage.map(|c| c.to_string()).unwrap_or_default();
            let d = r.d_loss.map(crate::fmt17).unwrap_or_default();
            let g = r.g_loss.map(crate::fmt17).unwrap_or_default();
            s.push_str(&format!("{},{c},{d},{g}\n", r.epoch));
        }
        s
    }
}

#[inline]
fn clamp_d(d: f64) -> f64 {
    d.clamp(CLAMP, 1.0 - CLAMP)
}

/// `ℓ_α(1, D)` and its derivative with respect to the logit `z`, at
/// `D = clamp(σ(z))`. The clamped value is used in both chain factors.
#[inline]
fn loss1_logit(alpha: f64, z: f64) -> (f64, f64) {
    let d = clamp_d(sigmoid(z));
    let dl = if alpha.is_infinite() {
        -1.0
    } else {
        -(-d.ln() / alpha).exp()
    };
    (alpha_loss1(alpha, d), dl * d * (1.0 - d))
}

/// `ℓ_α(0, D)` and its logit derivative; `ℓ_α(0, σ(z)) = ℓ_α(1, σ(−z))`.
#[inline]
fn loss0_logit(alpha: f64, z: f64) -> (f64, f64) {
    let (l, g) = loss1_logit(alpha, -z);
    (l, -g)
}

/// Per-batch discriminator loss (`−V_{α_D}`, or the LSGAN D objective) and
/// its gradient with respect to the real and fake logits.
pub fn d_objective(
    variant: &Variant,
    z_real: &[f64],
    z_fake: &[f64],
) -> (f64, Vec<f64>, Vec<f64>) {
    let (nr, nf) = (z_real.len() as f64, z_fake.len() as f64);
    match *variant {
        Variant::Sat { alpha_d, .. } | Variant::Ns { alpha_d, .. } => {
            let mut loss = 0.0;
            let gr = z_real
                .iter()
                .map(|&z| {
                    let (l, g) = loss1_logit(alpha_d, z);
                    loss += l / nr;
                    g / nr
                })
                .collect();
            let gf = z_fake
                .iter()
                .map(|&z| {
                    let (l, g) = loss0_logit(alpha_d, z);
                    loss += l / nf;
                    g / nf
                })
                .collect();
            (loss, gr, gf)
        }
        Variant::Lsgan => {
            let lr: f64 = z_real.iter().map(|d| (d - 1.0).powi(2)).sum::<f64>() / nr;
            let lf: f64 = z_fake.iter().map(|d| d * d).sum::<f64>() / nf;
            let gr = z_real.iter().map(|d| (d - 1.0) / nr).collect();
            let gf = z_fake.iter().map(|d| d / nf).collect();
            (0.5 * (lr + lf), gr, gf)
        }
    }
}

/// Per-batch generator loss as reported, and its gradient with respect to the
/// fake logits. The reported saturating loss is the full `V_{α_G}`,
/// including the real-data term, which carries no generator gradient.
pub fn g_objective(variant: &Variant, z_real: &[f64], z_fake: &[f64]) -> (f64, Vec<f64>) {
    let (nr, nf) = (z_real.len() as f64, z_fake.len() as f64);
    match *variant {
        Variant::Sat { alpha_g, .. } => {
            let real: f64 = z_real.iter().map(|&z| -loss1_logit(alpha_g, z).0).sum::<f64>() / nr;
            let mut fake = 0.0;
            let g = z_fake
                .iter()
                .map(|&z| {
                    let (l, g) = loss0_logit(alpha_g, z);
                    fake -= l / nf;
                    -g / nf
                })
                .collect();
            (real + fake, g)
        }
        Variant::Ns { alpha_g, .. } => {
            let mut loss = 0.0;
            let g = z_fake
                .iter()
                .map(|&z| {
                    let (l, g) = loss1_logit(alpha_g, z);
                    loss += l / nf;
                    g / nf
                })
                .collect();
            (loss, g)
        }
        Variant::Lsgan => {
            let lr: f64 = z_real.iter().map(|d| (d - 1.0).powi(2)).sum::<f64>() / nr;
            let lf: f64 = z_fake.iter().map(|d| (d - 1.0).powi(2)).sum::<f64>() / nf;
            let g = z_fake.iter().map(|d| (d - 1.0) / nf).collect();
            (0.5 * (lr + lf), g)
        }
    }
}

fn column(v: Vec<f64>) -> Array2<f64> {
    let n = v.len();
    Array2::from_shape_vec((n, 1), v).unwrap()
}

/// Mutable state of one run, exposed for step-level tests.
pub struct Trainer {
    pub config: TrainConfig,
    pub d: Mlp,
    pub g: Mlp,
    d_opt: AdamState,
    g_opt: AdamState,
    noise: SeededRng,
}

/// Losses of one D+G iteration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepLosses {
    pub d_loss: f64,
    pub g_loss: f64,
    pub finite: bool,
}

impl Trainer {
    pub fn new(config: TrainConfig) -> Result<Self> {
        config.validate()?;
        let (d, g) = config.init_networks()?;
        let d_opt = AdamState::new(&d, config.lr);
        let g_opt = AdamState::new(&g, config.lr);
        let noise = SeededRng::new(config.seed, stream::TRAIN_NOISE);
        Ok(Trainer { config, d, g, d_opt, g_opt, noise })
    }

    /// One discriminator step (repeated `d_steps_per_g_step` times) and one
    /// generator step on `real`.
    pub fn step(&mut self, real: &Array2<f64>) -> Result<StepLosses> {
        let v = self.config.variant;
        let b = real.nrows();
        let mut d_loss = 0.0;
        let mut finite = true;
        for _ in 0..self.config.d_steps_per_g_step {
            let z = fill_normal(&mut self.noise, b, self.config.latent_dim);
            let fake = self.g.predict(&z)?;
            let (zr, cr) = self.d.forward(real)?;
            let (zf, cf) = self.d.forward(&fake)?;
            let (l, gr, gf) = d_objective(&v, zr.as_slice().unwrap(), zf.as_slice().unwrap());
            let mut grads = self.d.backward(&cr, &column(gr))?;
            grads.add_assign(&self.d.backward(&cf, &column(gf))?);
            d_loss = l;
            if l.is_finite() && grads.all_finite() {
                self.d_opt.step(&mut self.d, &grads)?;
            } else {
                finite = false;
            }
        }
        let z = fill_normal(&mut self.noise, b, self.config.latent_dim);
        let (fake, gc) = self.g.forward(&z)?;
        let (zf, dc) = self.d.forward(&fake)?;
        let zr = self.d.predict(real)?;
        let (g_loss, gf) = g_objective(&v, zr.as_slice().unwrap(), zf.as_slice().unwrap());
        let through_d = self.d.backward(&dc, &column(gf))?;
        let grads = self.g.backward(&gc, &through_d.input)?;
        if g_loss.is_finite() && grads.all_finite() {
            self.g_opt.step(&mut self.g, &grads)?;
        } else {
            finite = false;
        }
        Ok(StepLosses { d_loss, g_loss, finite })
    }
}

/// Generate `n` points from `g` using noise drawn from `rng`.
pub fn generate(g: &Mlp, n: usize, rng: &mut SeededRng) -> Result<Array2<f64>> {
    let z = fill_normal(rng, n, g.input_dim());
    g.predict(&z)
}

fn coverage_of(g: &Mlp, cfg: &TrainConfig, rng: &mut SeededRng) -> Result<usize> {
    let x = generate(g, cfg.eval_samples, rng)?;
    if x.iter().any(|v| !v.is_finite()) {
        return Ok(0);
    }
    mode_coverage(&x, &cfg.ring())
}

/// Train one seed on `data` (an `n × 2` matrix of ring samples).
pub fn train(config: &TrainConfig, data: &Array2<f64>) -> Result<RunReport> {
    train_with_hook(config, data, |_, _| {})
}

/// As [`train`], calling `hook(epoch, &trainer)` after each epoch.
pub fn train_with_hook<F: FnMut(usize, &Trainer)>(
    config: &TrainConfig,
    data: &Array2<f64>,
    mut hook: F,
) -> Result<RunReport> {
    let t0 = Instant::now();
    if data.ncols() != 2 || data.nrows() == 0 {
        return Err(Error::Shape(format!("training data must be n x 2, got {:?}", data.dim())));
    }
    let mut tr = Trainer::new(config.clone())?;
    let mut warnings = Vec::new();
    let in_region = config.variant.in_region();
    if in_region == Some(false) {
        warnings.push(format!(
            "{} lies outside the strict-convexity region of its generator objective",
            config.variant
        ));
    }
    let mut shuffle = SeededRng::new(config.seed, stream::SHUFFLE);
    let mut eval_rng = SeededRng::new(config.seed, stream::EVAL_NOISE);
    let n_modes = config.ring_modes;
    let mut trace = vec![EpochRecord {
        epoch: 0,
        coverage: Some(coverage_of(&tr.g, config, &mut eval_rng)?),
        d_loss: None,
        g_loss: None,
    }];
    let mut idx: Vec<usize> = (0..data.nrows()).collect();
    let mut bad = 0usize;
    let mut diagnostic = None;
    'epochs: for epoch in 1..=config.epochs {
        shuffle.shuffle(&mut idx);
        let (mut dsum, mut gsum, mut nb) = (0.0, 0.0, 0usize);
        for chunk in idx.chunks(config.batch_size) {
            let real = data.select(Axis(0), chunk);
            let s = tr.step(&real)?;
            if s.finite {
                bad = 0;
            } else {
                bad += 1;
                if bad >= MAX_BAD_STEPS {
                    diagnostic = Some(format!(
                        "aborted at epoch {epoch}: {MAX_BAD_STEPS} consecutive non-finite steps"
                    ));
                    trace.push(EpochRecord {
                        epoch,
                        coverage: Some(0),
                        d_loss: Some(s.d_loss),
                        g_loss: Some(s.g_loss),
                    });
                    break 'epochs;
                }
            }
            dsum += s.d_loss;
            gsum += s.g_loss;
            nb += 1;
        }
        let coverage = if epoch % config.eval_every == 0 || epoch == config.epochs {
            Some(coverage_of(&tr.g, config, &mut eval_rng)?)
        } else {
            None
        };
        trace.push(EpochRecord {
            epoch,
            coverage,
            d_loss: Some(dsum / nb as f64),
            g_loss: Some(gsum / nb as f64),
        });
        hook(epoch, &tr);
    }
    let final_coverage = trace.iter().rev().find_map(|r| r.coverage).unwrap_or(0);
    Ok(RunReport {
        seed: config.seed,
        variant: config.variant.to_string(),
        in_region,
        warnings,
        trace,
        final_coverage,
        outcome: if diagnostic.is_some() {
            Outcome::Failure
        } else {
            Outcome::classify(final_coverage, n_modes)
        },
        diagnostic,
        wall_time_s: t0.elapsed().as_secs_f64(),
    })
}

/// Training set for a config: `n_train` ring samples from `data_seed`.
pub fn training_data(config: &TrainConfig) -> Result<Array2<f64>> {
    Ok(sample_ring(&config.ring(), config.data_seed)?.points)
}

/// One aggregated sweep row.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub variant: String,
    pub seeds: usize,
    pub success_pct: f64,
    pub failure_pct: f64,
    pub mean_coverage: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepResult {
    pub rows: Vec<SweepRow>,
    /// Per-variant reports, sorted by seed.
    pub runs: Vec<Vec<RunReport>>,
}

impl SweepResult {
    pub fn table_csv(&self) -> String {
        let mut s = String::from("variant,seeds,success_pct,failure_pct,mean_coverage\n");
        for r in &self.rows {
            s.push_str(&format!(
                "{},{},{},{},{}\n",
                r.variant,
                r.seeds,
                crate::fmt17(r.success_pct),
                crate::fmt17(r.failure_pct),
                crate::fmt17(r.mean_coverage)
            ));
        }
        s
    }
}

/// Aggregate reports of one variant (order-independent).
pub fn aggregate(variant: &str, reports: &[RunReport]) -> SweepRow {
    let n = reports.len().max(1) as f64;
    let count = |o| reports.iter().filter(|r| r.outcome == o).count() as f64;
    SweepRow {
        variant: variant.to_string(),
        seeds: reports.len(),
        success_pct: 100.0 * count(Outcome::Success) / n,
        failure_pct: 100.0 * count(Outcome::Failure) / n,
        mean_coverage: reports.iter().map(|r| r.final_coverage as f64).sum::<f64>() / n,
    }
}

/// Train every `(variant, seed)` pair on a shared dataset using `workers`
/// threads. Results do not depend on `workers`.
pub fn sweep(base: &TrainConfig, variants: &[Variant], seeds: &[u64], workers: usize) -> Result<SweepResult> {
    let data = training_data(base)?;
    let jobs: Vec<(usize, u64)> =
        (0..variants.len()).flat_map(|v| seeds.iter().map(move |&s| (v, s))).collect();
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers.max(1))
        .build()
        .map_err(|e| Error::Config(format!("thread pool: {e}")))?;
    let results: Vec<Result<(usize, RunReport)>> = pool.install(|| {
        use rayon::prelude::*;
        jobs.par_iter()
            .map(|&(v, seed)| {
                let cfg = TrainConfig { variant: variants[v], seed, ..base.clone() };
                train(&cfg, &data).map(|r| (v, r))
            })
            .collect()
    });
    let mut runs: Vec<Vec<RunReport>> = vec![Vec::new(); variants.len()];
    for r in results {
        let (v, rep) = r?;
        runs[v].push(rep);
    }
    for rs in &mut runs {
        rs.sort_by_key(|r| r.seed);
    }
    let rows = variants
        .iter()
        .zip(&runs)
        .map(|(v, rs)| aggregate(&v.to_string(), rs))
        .collect();
    Ok(SweepResult { rows, runs })
}
