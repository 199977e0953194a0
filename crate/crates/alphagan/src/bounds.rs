//! Calculators for estimation-error and sample-complexity bounds of
//! neural-network GANs: the α-loss Lipschitz constant `C_h(α)`, network norm
//! products, the upper bound on estimation error, the generalization
//! sample threshold and the lower-bound constant.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::math::{check_alpha, sigmoid};
use crate::nn::Activation;

/// Lipschitz constant of `ℓ_α` composed with a sigmoid whose input is
/// bounded by `h`:
///
/// - `α ≤ 1`: `σ(h) σ(−h)^{(α−1)/α}` (so `σ(h)` at α = 1),
/// - `α > 1`: `((α−1)/(2α−1))^{(α−1)/α} · α/(2α−1)`, independent of `h`,
/// - `α = ∞`: `1/4`.
///
/// The two branches do not meet at α = 1; the case split is taken as stated.
pub fn c_h(h: f64, alpha: f64) -> Result<f64> {
    check_alpha(alpha, "alpha")?;
    if !(h > 0.0) || h.is_nan() {
        return Err(Error::Domain(format!("h must be positive, got {h}")));
    }
    if alpha.is_infinite() {
        return Ok(0.25);
    }
    if alpha <= 1.0 {
        let e = (alpha - 1.0) / alpha;
        return Ok(sigmoid(h) * if e == 0.0 { 1.0 } else { sigmoid(-h).powf(e) });
    }
    let e = (alpha - 1.0) / alpha;
    Ok(((alpha - 1.0) / (2.0 * alpha - 1.0)).powf(e) * alpha / (2.0 * alpha - 1.0))
}

/// Norm bounds of a feed-forward network: `layer_norms[i]` bounds the
/// Frobenius norm of layer `i+1` (the last entry is the output layer) and
/// `activation_lipschitz[i]` is the Lipschitz constant of the activation
/// after layer `i+1`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NetSpec {
    pub layer_norms: Vec<f64>,
    pub activation_lipschitz: Vec<f64>,
    /// `B_x` for the discriminator, `B_z` for the generator.
    pub input_bound: f64,
}

impl NetSpec {
    pub fn new(layer_norms: Vec<f64>, activation_lipschitz: Vec<f64>, input_bound: f64) -> Result<Self> {
        let s = NetSpec { layer_norms, activation_lipschitz, input_bound };
        s.validate()?;
        Ok(s)
    }

    /// Unit norms and 1-Lipschitz activations.
    pub fn ones(depth: usize) -> Self {
        NetSpec { layer_norms: vec![1.0; depth], activation_lipschitz: vec![1.0; depth.saturating_sub(1)], input_bound: 1.0 }
    }

    pub fn depth(&self) -> usize {
        self.layer_norms.len()
    }

    pub fn validate(&self) -> Result<()> {
        if self.layer_norms.is_empty() {
            return Err(Error::Config("network spec needs at least one layer".into()));
        }
        if self.activation_lipschitz.len() + 1 != self.layer_norms.len() {
            return Err(Error::Config(format!(
                "{} layers need {} activation constants, got {}",
                self.layer_norms.len(),
                self.layer_norms.len() - 1,
                self.activation_lipschitz.len()
            )));
        }
        let all = self.layer_norms.iter().chain(&self.activation_lipschitz).chain([&self.input_bound]);
        if all.clone().any(|v| !(*v > 0.0 && v.is_finite())) {
            return Err(Error::Config("norms, Lipschitz constants and input bound must be positive".into()));
        }
        Ok(())
    }

    /// `M_k ∏_{i<k} M_i R_i`.
    pub fn norm_product(&self) -> f64 {
        let k = self.depth();
        self.layer_norms[..k - 1]
            .iter()
            .zip(&self.activation_lipschitz)
            .fold(self.layer_norms[k - 1], |acc, (m, r)| acc * m * r)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct NormProducts {
    pub u_omega: f64,
    pub u_theta: f64,
    pub q_x: f64,
    pub q_z: f64,
}

/// `U_ω`, `U_θ`, `Q_x = U_ω B_x`, `Q_z = U_ω U_θ B_z`.
pub fn norm_products(d_spec: &NetSpec, g_spec: &NetSpec) -> Result<NormProducts> {
    d_spec.validate()?;
    g_spec.validate()?;
    let u_omega = d_spec.norm_product();
    let u_theta = g_spec.norm_product();
    Ok(NormProducts {
        u_omega,
        u_theta,
        q_x: u_omega * d_spec.input_bound,
        q_z: u_omega * u_theta * g_spec.input_bound,
    })
}

/// Lipschitz constants of the generator's partial losses.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum LossLipschitz {
    Explicit { l_phi: f64, l_psi: f64 },
    /// α-loss: `L_φ = 4 C_{Q_x}(α)`, `L_ψ = 4 C_{Q_z}(α)`.
    Alpha(#[serde(with = "crate::train::ext_real")] f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BoundTerms {
    pub real_sample: f64,
    pub gen_sample: f64,
    pub confidence: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BoundConstants {
    pub u_omega: f64,
    pub u_theta: f64,
    pub q_x: f64,
    pub q_z: f64,
    pub l_phi: f64,
    pub l_psi: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BoundReport {
    pub bound: f64,
    pub terms: BoundTerms,
    pub constants: BoundConstants,
}

fn rhs(d: &NetSpec, g: &NetSpec, n: usize, m: usize, delta: f64, lip: LossLipschitz) -> Result<BoundReport> {
    if n == 0 || m == 0 {
        return Err(Error::Domain("sample counts n and m must be at least 1".into()));
    }
    if !(delta > 0.0 && delta < 1.0) {
        return Err(Error::Domain(format!("delta must lie in (0,1), got {delta}")));
    }
    let np = norm_products(d, g)?;
    let (l_phi, l_psi) = match lip {
        LossLipschitz::Explicit { l_phi, l_psi } => {
            if !(l_phi >= 0.0 && l_psi >= 0.0 && l_phi.is_finite() && l_psi.is_finite()) {
                return Err(Error::Domain("Lipschitz constants must be finite and >= 0".into()));
            }
            (l_phi, l_psi)
        }
        LossLipschitz::Alpha(a) => (4.0 * c_h(np.q_x, a)?, 4.0 * c_h(np.q_z, a)?),
    };
    let (k, l) = (d.depth() as f64, g.depth() as f64);
    let (nf, mf) = (n as f64, m as f64);
    let (bx, bz) = (d.input_bound, g.input_bound);
    let real_sample = l_phi * bx * np.u_omega * (3.0 * k).sqrt() / nf.sqrt();
    let gen_sample = l_psi * np.u_omega * np.u_theta * bz * (3.0 * (k + l - 1.0)).sqrt() / mf.sqrt();
    let confidence = np.u_omega
        * (1.0 / delta).ln().sqrt()
        * (l_phi * bx / (2.0 * nf).sqrt() + l_psi * bz * np.u_theta / (2.0 * mf).sqrt());
    Ok(BoundReport {
        bound: real_sample + gen_sample + confidence,
        terms: BoundTerms { real_sample, gen_sample, confidence },
        constants: BoundConstants { u_omega: np.u_omega, u_theta: np.u_theta, q_x: np.q_x, q_z: np.q_z, l_phi, l_psi },
    })
}

/// Upper bound on the estimation error of a dual-objective GAN, holding
/// with probability at least `1 − 2δ`. Only the generator's loss enters.
pub fn estimation_upper_bound(
    d_spec: &NetSpec,
    g_spec: &NetSpec,
    n: usize,
    m: usize,
    delta: f64,
    loss_lipschitz: LossLipschitz,
) -> Result<BoundReport> {
    rhs(d_spec, g_spec, n, m, delta, loss_lipschitz)
}

/// The single-objective bound: the same right-hand side with the shared
/// loss's constants.
pub fn estimation_upper_bound_single(
    d_spec: &NetSpec,
    g_spec: &NetSpec,
    n: usize,
    m: usize,
    delta: f64,
    loss_lipschitz: LossLipschitz,
) -> Result<BoundReport> {
    rhs(d_spec, g_spec, n, m, delta, loss_lipschitz)
}

/// Sample count above which the neural-net divergence generalizes:
/// `⌈c p Δ² ln(L max(L_φ, L_ψ) p / ε) / ε²⌉`. The universal constant `c`
/// is not known and must be supplied.
pub fn generalization_threshold(
    c: f64,
    p: u64,
    delta_cap: f64,
    lipschitz: f64,
    l_phi: f64,
    l_psi: f64,
    eps: f64,
) -> Result<u64> {
    for (name, v) in [("c", c), ("delta", delta_cap), ("L", lipschitz), ("L_phi", l_phi), ("L_psi", l_psi), ("eps", eps)] {
        if !(v > 0.0 && v.is_finite()) {
            return Err(Error::Domain(format!("{name} must be positive, got {v}")));
        }
    }
    if p == 0 {
        return Err(Error::Domain("capacity p must be at least 1".into()));
    }
    let arg = lipschitz * l_phi.max(l_psi) * p as f64 / eps;
    if arg <= 1.0 {
        return Err(Error::Domain(format!("log argument L*max(L_phi,L_psi)*p/eps = {arg} must exceed 1")));
    }
    let m = c * p as f64 * delta_cap * delta_cap * arg.ln() / (eps * eps);
    Ok(m.ceil() as u64)
}

fn act_apply(a: Activation, x: f64) -> Result<f64> {
    match a {
        Activation::Relu | Activation::LeakyRelu | Activation::Identity => Ok(a.apply(x)),
        _ => Err(Error::Unsupported(format!(
            "lower-bound constant needs positive-homogeneous activations, got {a:?}"
        ))),
    }
}

/// Lower-bound constant
/// `(ln 2/20)[σ(M_k r_{k−1}(… r_1(M_1 B_x))) − σ(M_k r_{k−1}(… r_1(−M_1 B_x)))]`.
pub fn fano_constant(norms: &[f64], activations: &[Activation], b_x: f64) -> Result<f64> {
    if norms.is_empty() || activations.len() + 1 != norms.len() {
        return Err(Error::Config(format!(
            "{} layer norms need {} activations, got {}",
            norms.len(),
            norms.len().saturating_sub(1),
            activations.len()
        )));
    }
    if norms.iter().any(|m| !(*m > 0.0)) || !(b_x >= 0.0) {
        return Err(Error::Domain("norms must be positive and B_x >= 0".into()));
    }
    let chain = |sign: f64| -> Result<f64> {
        let mut a = sign * norms[0] * b_x;
        for (i, act) in activations.iter().enumerate() {
            a = norms[i + 1] * act_apply(*act, a)?;
        }
        Ok(a)
    };
    Ok(std::f64::consts::LN_2 / 20.0 * (sigmoid(chain(1.0)?) - sigmoid(chain(-1.0)?)))
}
