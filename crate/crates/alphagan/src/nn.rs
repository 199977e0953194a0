//! Minimal dense network engine: forward pass, exact backpropagation, Adam.
//!
//! Rows of a batch matrix are samples. Layer `i` computes
//! `a_{i+1} = act_i(a_i · W_i + b_i)` with `W_i` shaped `[fan_in × fan_out]`.
//!
//! Weight snapshots use a flat little-endian layout:
//!
//! | bytes | content |
//! |---|---|
//! | 8 | magic `b"ALPHAMLP"` |
//! | 4 | format version (`u32`, currently 1) |
//! | 4 | number of layers `L` (`u32`) |
//! | 8·(L+1) | layer sizes (`u64`) |
//! | L | activation tags (`u8`, see [`Activation::tag`]) |
//! | 8·P | parameters (`f64`): per layer, `W` row-major then `b` |

use std::io::{Read, Write};

use ndarray::{Array1, Array2, Axis, Zip};

use crate::error::{Error, Result};
use crate::rng::SeededRng;

/// Negative-side slope of [`Activation::LeakyRelu`].
pub const LEAKY_SLOPE: f64 = 0.2;

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Activation {
    Relu,
    LeakyRelu,
    Tanh,
    Sigmoid,
    Identity,
}

impl Activation {
    pub const ALL: [Activation; 5] = [
        Activation::Relu,
        Activation::LeakyRelu,
        Activation::Tanh,
        Activation::Sigmoid,
        Activation::Identity,
    ];

    pub fn tag(self) -> u8 {
        match self {
            Activation::Relu => 0,
            Activation::LeakyRelu => 1,
            Activation::Tanh => 2,
            Activation::Sigmoid => 3,
            Activation::Identity => 4,
        }
    }

    pub fn from_tag(t: u8) -> Result<Self> {
        Activation::ALL
            .into_iter()
            .find(|a| a.tag() == t)
            .ok_or_else(|| Error::Snapshot(format!("unknown activation tag {t}")))
    }

    #[inline]
    pub fn apply(self, z: f64) -> f64 {
        match self {
            Activation::Relu => z.max(0.0),
            Activation::LeakyRelu => {
                if z > 0.0 {
                    z
                } else {
                    LEAKY_SLOPE * z
                }
            }
            Activation::Tanh => z.tanh(),
            Activation::Sigmoid => crate::math::sigmoid(z),
            Activation::Identity => z,
        }
    }

    /// Derivative expressed through the pre-activation `z` and output `a`.
    #[inline]
    pub fn deriv(self, z: f64, a: f64) -> f64 {
        match self {
            Activation::Relu => {
                if z > 0.0 {
                    1.0
                } else {
                    0.0
                }
            }
            Activation::LeakyRelu => {
                if z > 0.0 {
                    1.0
                } else {
                    LEAKY_SLOPE
                }
            }
            Activation::Tanh => 1.0 - a * a,
            Activation::Sigmoid => a * (1.0 - a),
            Activation::Identity => 1.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Layer {
    pub w: Array2<f64>,
    pub b: Array1<f64>,
    pub act: Activation,
}

/// Feedforward network.
#[derive(Debug, Clone, PartialEq)]
pub struct Mlp {
    pub layers: Vec<Layer>,
    version: u64,
}

/// Intermediate values of one forward pass.
#[derive(Debug, Clone)]
pub struct Cache {
    inputs: Vec<Array2<f64>>,
    pre: Vec<Array2<f64>>,
    outputs: Vec<Array2<f64>>,
    version: u64,
}

/// Gradients with respect to every parameter and to the batch input.
#[derive(Debug, Clone)]
pub struct Grads {
    pub w: Vec<Array2<f64>>,
    pub b: Vec<Array1<f64>>,
    pub input: Array2<f64>,
}

impl Grads {
    pub fn zeros_like(net: &Mlp, batch: usize) -> Self {
        Grads {
            w: net.layers.iter().map(|l| Array2::zeros(l.w.raw_dim())).collect(),
            b: net.layers.iter().map(|l| Array1::zeros(l.b.raw_dim())).collect(),
            input: Array2::zeros((batch, net.input_dim())),
        }
    }

    /// Accumulate `other` into `self` (parameter parts only).
    pub fn add_assign(&mut self, other: &Grads) {
        for (a, b) in self.w.iter_mut().zip(&other.w) {
            *a += b;
        }
        for (a, b) in self.b.iter_mut().zip(&other.b) {
            *a += b;
        }
    }

    pub fn all_finite(&self) -> bool {
        self.w.iter().all(|m| m.iter().all(|x| x.is_finite()))
            && self.b.iter().all(|v| v.iter().all(|x| x.is_finite()))
    }
}

impl Mlp {
    /// Build a network with Glorot-uniform weights `U(±√(6/(fan_in+fan_out)))`
    /// and zero biases. `activations.len()` must be `sizes.len() - 1`.
    pub fn new(sizes: &[usize], activations: &[Activation], rng: &mut SeededRng) -> Result<Self> {
        Self::check_arch(sizes, activations)?;
        let layers = sizes
            .windows(2)
            .zip(activations)
            .map(|(io, &act)| {
                let (fi, fo) = (io[0], io[1]);
                let lim = (6.0 / (fi + fo) as f64).sqrt();
                let w = Array2::from_shape_fn((fi, fo), |_| rng.uniform_in(-lim, lim));
                Layer { w, b: Array1::zeros(fo), act }
            })
            .collect();
        Ok(Mlp { layers, version: 0 })
    }

    /// Network with every parameter zero.
    pub fn zeros(sizes: &[usize], activations: &[Activation]) -> Result<Self> {
        Self::check_arch(sizes, activations)?;
        let layers = sizes
            .windows(2)
            .zip(activations)
            .map(|(io, &act)| Layer {
                w: Array2::zeros((io[0], io[1])),
                b: Array1::zeros(io[1]),
                act,
            })
            .collect();
        Ok(Mlp { layers, version: 0 })
    }

    pub fn from_layers(layers: Vec<Layer>) -> Result<Self> {
        if layers.is_empty() {
            return Err(Error::Shape("network needs at least one layer".into()));
        }
        for (i, l) in layers.iter().enumerate() {
            if l.b.len() != l.w.ncols() {
                return Err(Error::Shape(format!("layer {i}: bias length mismatch")));
            }
            if i > 0 && layers[i - 1].w.ncols() != l.w.nrows() {
                return Err(Error::Shape(format!("layer {i}: input width mismatch")));
            }
        }
        Ok(Mlp { layers, version: 0 })
    }

    fn check_arch(sizes: &[usize], activations: &[Activation]) -> Result<()> {
        if sizes.len() < 2 || activations.len() != sizes.len() - 1 {
            return Err(Error::Shape(format!(
                "{} sizes need {} activations, got {}",
                sizes.len(),
                sizes.len().saturating_sub(1),
                activations.len()
            )));
        }
        if sizes.contains(&0) {
            return Err(Error::Shape("layer sizes must be positive".into()));
        }
        Ok(())
    }

    pub fn layer_sizes(&self) -> Vec<usize> {
        let mut s = vec![self.input_dim()];
        s.extend(self.layers.iter().map(|l| l.w.ncols()));
        s
    }

    pub fn input_dim(&self) -> usize {
        self.layers[0].w.nrows()
    }

    pub fn output_dim(&self) -> usize {
        self.layers.last().unwrap().w.ncols()
    }

    pub fn n_params(&self) -> usize {
        self.layers.iter().map(|l| l.w.len() + l.b.len()).sum()
    }

    /// Frobenius norm of each weight matrix.
    pub fn frobenius_norms(&self) -> Vec<f64> {
        self.layers
            .iter()
            .map(|l| l.w.iter().map(|x| x * x).sum::<f64>().sqrt())
            .collect()
    }

    /// Output only, no cache.
    pub fn predict(&self, x: &Array2<f64>) -> Result<Array2<f64>> {
        self.check_input(x)?;
        let mut a = x.clone();
        for l in &self.layers {
            let mut z = a.dot(&l.w);
            z += &l.b;
            z.mapv_inplace(|v| l.act.apply(v));
            a = z;
        }
        Ok(a)
    }

    fn check_input(&self, x: &Array2<f64>) -> Result<()> {
        if x.ncols() != self.input_dim() {
            return Err(Error::Shape(format!(
                "batch has {} columns, network expects {}",
                x.ncols(),
                self.input_dim()
            )));
        }
        Ok(())
    }

    pub fn forward(&self, x: &Array2<f64>) -> Result<(Array2<f64>, Cache)> {
        self.check_input(x)?;
        let n = self.layers.len();
        let mut inputs = Vec::with_capacity(n);
        let mut pre = Vec::with_capacity(n);
        let mut outputs = Vec::with_capacity(n);
        let mut a = x.clone();
        for l in &self.layers {
            let mut z = a.dot(&l.w);
            z += &l.b;
            let out = z.mapv(|v| l.act.apply(v));
            inputs.push(a);
            pre.push(z);
            a = out.clone();
            outputs.push(out);
        }
        Ok((a, Cache { inputs, pre, outputs, version: self.version }))
    }

    /// Backpropagate `output_grad = ∂L/∂output` through the cached pass.
    pub fn backward(&self, cache: &Cache, output_grad: &Array2<f64>) -> Result<Grads> {
        if cache.version != self.version || cache.pre.len() != self.layers.len() {
            return Err(Error::Precondition(
                "stale cache: parameters changed since the forward pass".into(),
            ));
        }
        let last = cache.outputs.last().unwrap();
        if output_grad.dim() != last.dim() {
            return Err(Error::Shape(format!(
                "output gradient {:?} does not match output {:?}",
                output_grad.dim(),
                last.dim()
            )));
        }
        let n = self.layers.len();
        let mut gw = vec![Array2::zeros((0, 0)); n];
        let mut gb = vec![Array1::zeros(0); n];
        let mut delta = output_grad.clone();
        for i in (0..n).rev() {
            let l = &self.layers[i];
            Zip::from(&mut delta)
                .and(&cache.pre[i])
                .and(&cache.outputs[i])
                .for_each(|d, &z, &a| *d *= l.act.deriv(z, a));
            gw[i] = cache.inputs[i].t().dot(&delta);
            gb[i] = delta.sum_axis(Axis(0));
            delta = delta.dot(&l.w.t());
        }
        Ok(Grads { w: gw, b: gb, input: delta })
    }

    fn bump(&mut self) {
        self.version = self.version.wrapping_add(1);
    }

    /// Flat view of all parameters in snapshot order.
    pub fn flat_params(&self) -> Vec<f64> {
        let mut v = Vec::with_capacity(self.n_params());
        for l in &self.layers {
            v.extend(l.w.iter());
            v.extend(l.b.iter());
        }
        v
    }

    /// Overwrite all parameters from a flat slice (snapshot order).
    pub fn set_flat_params(&mut self, p: &[f64]) -> Result<()> {
        if p.len() != self.n_params() {
            return Err(Error::Shape(format!(
                "expected {} parameters, got {}",
                self.n_params(),
                p.len()
            )));
        }
        let mut k = 0;
        for l in &mut self.layers {
            for x in l.w.iter_mut() {
                *x = p[k];
                k += 1;
            }
            for x in l.b.iter_mut() {
                *x = p[k];
                k += 1;
            }
        }
        self.bump();
        Ok(())
    }

    pub fn write_snapshot<W: Write>(&self, mut w: W) -> Result<()> {
        w.write_all(b"ALPHAMLP")?;
        w.write_all(&1u32.to_le_bytes())?;
        w.write_all(&(self.layers.len() as u32).to_le_bytes())?;
        for s in self.layer_sizes() {
            w.write_all(&(s as u64).to_le_bytes())?;
        }
        for l in &self.layers {
            w.write_all(&[l.act.tag()])?;
        }
        for x in self.flat_params() {
            w.write_all(&x.to_le_bytes())?;
        }
        Ok(())
    }

    pub fn read_snapshot<R: Read>(mut r: R) -> Result<Self> {
        let mut magic = [0u8; 8];
        r.read_exact(&mut magic)?;
        if &magic != b"ALPHAMLP" {
            return Err(Error::Snapshot("bad magic".into()));
        }
        let mut b4 = [0u8; 4];
        r.read_exact(&mut b4)?;
        let ver = u32::from_le_bytes(b4);
        if ver != 1 {
            return Err(Error::Snapshot(format!("unsupported version {ver}")));
        }
        r.read_exact(&mut b4)?;
        let n = u32::from_le_bytes(b4) as usize;
        if n == 0 || n > 1 << 16 {
            return Err(Error::Snapshot(format!("implausible layer count {n}")));
        }
        let mut b8 = [0u8; 8];
        let mut sizes = Vec::with_capacity(n + 1);
        for _ in 0..=n {
            r.read_exact(&mut b8)?;
            sizes.push(u64::from_le_bytes(b8) as usize);
        }
        let mut acts = Vec::with_capacity(n);
        for _ in 0..n {
            let mut t = [0u8; 1];
            r.read_exact(&mut t)?;
            acts.push(Activation::from_tag(t[0])?);
        }
        let mut net = Mlp::zeros(&sizes, &acts)?;
        let mut p = Vec::with_capacity(net.n_params());
        for _ in 0..net.n_params() {
            r.read_exact(&mut b8)?;
            p.push(f64::from_le_bytes(b8));
        }
        net.set_flat_params(&p)?;
        Ok(net)
    }
}

/// Adam optimiser state for one network.
#[derive(Debug, Clone)]
pub struct AdamState {
    pub lr: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub eps: f64,
    pub step: u64,
    m_w: Vec<Array2<f64>>,
    v_w: Vec<Array2<f64>>,
    m_b: Vec<Array1<f64>>,
    v_b: Vec<Array1<f64>>,
}

impl AdamState {
    pub fn new(net: &Mlp, lr: f64) -> Self {
        let zw: Vec<Array2<f64>> =
            net.layers.iter().map(|l| Array2::zeros(l.w.raw_dim())).collect();
        let zb: Vec<Array1<f64>> =
            net.layers.iter().map(|l| Array1::zeros(l.b.raw_dim())).collect();
        AdamState {
            lr,
            beta1: 0.9,
            beta2: 0.999,
            eps: 1e-8,
            step: 0,
            m_w: zw.clone(),
            v_w: zw,
            m_b: zb.clone(),
            v_b: zb,
        }
    }

    /// One bias-corrected Adam descent step on `net` using `grads`.
    pub fn step(&mut self, net: &mut Mlp, grads: &Grads) -> Result<()> {
        if grads.w.len() != net.layers.len()
            || grads.w.iter().zip(&net.layers).any(|(g, l)| g.dim() != l.w.dim())
        {
            return Err(Error::Shape("gradient shapes do not match network".into()));
        }
        self.step += 1;
        let (b1, b2, eps) = (self.beta1, self.beta2, self.eps);
        let c1 = 1.0 - b1.powi(self.step as i32);
        let c2 = 1.0 - b2.powi(self.step as i32);
        let lr = self.lr;
        let upd = |p: &mut f64, m: &mut f64, v: &mut f64, g: f64| {
            *m = b1 * *m + (1.0 - b1) * g;
            *v = b2 * *v + (1.0 - b2) * g * g;
            *p -= lr * (*m / c1) / ((*v / c2).sqrt() + eps);
        };
        for (i, l) in net.layers.iter_mut().enumerate() {
            Zip::from(&mut l.w)
                .and(&mut self.m_w[i])
                .and(&mut self.v_w[i])
                .and(&grads.w[i])
                .for_each(|p, m, v, &g| upd(p, m, v, g));
            Zip::from(&mut l.b)
                .and(&mut self.m_b[i])
                .and(&mut self.v_b[i])
                .and(&grads.b[i])
                .for_each(|p, m, v, &g| upd(p, m, v, g));
        }
        net.bump();
        Ok(())
    }
}
