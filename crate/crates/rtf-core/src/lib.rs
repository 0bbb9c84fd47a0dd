//! Rational transfer function (RTF) parametrization of linear time-invariant
//! state-space models.
//!
//! A SISO system is parametrized by the proper rational function
//!
//! ```text
//! H(z) = h0 + (b1 z^-1 + ... + bn z^-n) / (1 + a1 z^-1 + ... + an z^-n)
//! ```
//!
//! with `2n + 1` trainable parameters per channel. This crate provides:
//!
//! - exact power-series expansion and pointwise evaluation of `H(z)` ([`params`]),
//! - state-free O(l log l) kernel generation and FFT convolution ([`spectral`]),
//! - companion-form realization with O(n) recurrent stepping and the
//!   numerator truncation/correction pair ([`statespace`]),
//! - conversions between dense, companion, and modal representations ([`convert`]),
//! - Jury stability tests, Montel projection, and initialization schemes
//!   ([`stability`]),
//! - analytic reverse-mode gradients for kernel generation and convolution
//!   ([`grad`]).
//!
//! All arithmetic is in `f64`. Everything here is a pure function over
//! immutable inputs; callers may parallelize over channels.

#![no_std]
#![forbid(unsafe_code)]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod convert;
pub mod error;
pub mod fft;
pub mod grad;
pub mod linalg;
pub mod params;
pub mod rng;
pub mod spectral;
pub mod stability;
pub mod statespace;

pub use error::RtfError;
pub use params::{Kernel, NumeratorForm, RtfParams, Signal};

/// Complex scalar used throughout.
pub type Complex64 = num_complex::Complex<f64>;

/// Result alias over [`RtfError`].
pub type Result<T> = core::result::Result<T, RtfError>;
