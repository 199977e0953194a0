//! Tunable CPE-loss GANs.
//!
//! - [`losses`]: α-loss and square losses, empirical value functions.
//! - [`divergence`]: f-generators, numerical f-divergences, conjugate links.
//! - [`closed_form`]: optimal discriminators and generator objectives.
//! - [`grad_analysis`]: generator-loss gradients under the optimal discriminator.
//! - [`regions`]: convexity regions of the (α_D, α_G) generators.
//! - [`bounds`]: estimation-error and sample-complexity calculators.
//! - [`nn`]: dense network engine with backprop and Adam.
//! - [`data`]: 2D ring data, mode coverage, toy 1D scenarios.
//! - [`train`]: GAN training loop and seed sweeps.

// `!(x > 0.0)` style checks are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bounds;
pub mod closed_form;
pub mod data;
pub mod density;
pub mod divergence;
pub mod error;
pub mod grad_analysis;
pub mod losses;
pub mod math;
pub mod nn;
pub mod quadrature;
pub mod regions;
pub mod rng;
pub mod train;

pub use error::{Error, Result};

/// Format a real with 17 significant digits, as used in every CSV output.
pub fn fmt17(x: f64) -> String {
    format!("{x:.16e}")
}
