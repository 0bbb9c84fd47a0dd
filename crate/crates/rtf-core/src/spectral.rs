//! State-free kernel generation and causal FFT convolution.
//!
//! The kernel of a rational transfer function is generated without ever
//! materializing states: pad the numerator and denominator coefficients to
//! length l, evaluate both polynomials at the l roots of unity with one FFT
//! each, divide elementwise, add the feedthrough, and inverse-transform.
//! Space O(l), time O(l log l), independent of the state size n.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::RtfError;
use crate::fft::{fft, fft_real, ifft};
use crate::params::{Kernel, NumeratorForm, RtfParams, Signal};
use crate::{Complex64, Result};

/// Transfer-function values at the m roots of unity, per channel.
#[derive(Debug, Clone)]
pub struct Spectrum {
    /// d x m complex bins; bin t is the value at `z = e^{2 pi i t / m}`.
    pub bins: Vec<Vec<Complex64>>,
    pub m: usize,
}

impl Spectrum {
    pub fn channels(&self) -> usize {
        self.bins.len()
    }
}

/// Evaluates the polynomial `sum_k alpha_k z^{-tk}` at the m roots of unity:
/// one forward FFT of the coefficients.
pub fn fft_roots_eval(coeffs: &[f64]) -> Spectrum {
    let bins = fft_real(coeffs);
    Spectrum { m: coeffs.len(), bins: vec![bins] }
}

/// Generates the length-l kernel of every channel from its coefficients.
///
/// For truncated-form parameters with `trained_length == l` the output is the
/// exact length-l truncation of the underlying corrected system; for
/// corrected-form parameters it is the time-aliased kernel
/// `sum_j h_{t + j l}`.
pub fn kernel_generate(params: &RtfParams, length: usize) -> Result<Kernel> {
    let spectrum = kernel_spectrum(params, length)?;
    let mut values = Vec::with_capacity(spectrum.channels());
    for bins in &spectrum.bins {
        let mut buf = bins.clone();
        ifft(&mut buf);
        values.push(buf.iter().map(|c| c.re).collect());
    }
    Kernel::new(values)
}

/// Frequency-domain half of [`kernel_generate`]: `H_t = B_t / A_t + h0`.
pub fn kernel_spectrum(params: &RtfParams, length: usize) -> Result<Spectrum> {
    let n = params.state_size();
    if length < n + 1 {
        return Err(RtfError::LengthTooShort);
    }

    // One denominator FFT per shared row.
    let mut den_spectra: Vec<Vec<Complex64>> = Vec::with_capacity(params.num_denominators());
    for a in &params.a {
        let mut padded = vec![0.0f64; length];
        padded[0] = 1.0;
        padded[1..=n].copy_from_slice(a);
        let bins = fft_real(&padded);
        if bins.iter().any(|v| v.norm() <= 1e-300) {
            return Err(RtfError::DenominatorZeroOnUnitCircle);
        }
        den_spectra.push(bins);
    }

    let truncated = params.numerator_form() == NumeratorForm::Truncated;
    let mut out = Vec::with_capacity(params.channels());
    for c in 0..params.channels() {
        let mut padded = vec![0.0f64; length];
        padded[1..=n].copy_from_slice(&params.b[c]);
        let num = fft_real(&padded);
        let den = &den_spectra[params.denominator_row(c)];
        let h0 = params.h0[c];
        let mut ratio: Vec<Complex64> =
            num.iter().zip(den.iter()).map(|(b, a)| b / a).collect();
        if truncated {
            // The strictly proper part of a truncated system still wraps its
            // t = l coefficient onto time index 0 at FFT length l. That wrap
            // equals the mean of the ratio spectrum, so removing the mean
            // makes the time-domain output an exact length-l truncation.
            let mean = ratio.iter().sum::<Complex64>() / length as f64;
            for v in ratio.iter_mut() {
                *v -= mean;
            }
        }
        out.push(ratio.into_iter().map(|v| v + h0).collect());
    }
    Ok(Spectrum { bins: out, m: length })
}

/// Causal convolution `y_t = sum_{j<=t} h_{t-j} u_j`, evaluated by
/// zero-padding to twice the working length, multiplying spectra, and keeping
/// the first `u.length` output samples.
pub fn fft_conv(u: &Signal, h: &Kernel) -> Result<Signal> {
    if u.channels() != h.channels() {
        return Err(RtfError::ChannelMismatch);
    }
    let work = u.length.max(h.length);
    let fft_len = 2 * work;
    let mut samples = Vec::with_capacity(u.channels());
    for (u_row, h_row) in u.samples.iter().zip(h.values.iter()) {
        let mut ub = vec![Complex64::new(0.0, 0.0); fft_len];
        for (dst, &v) in ub.iter_mut().zip(u_row.iter()) {
            dst.re = v;
        }
        let mut hb = vec![Complex64::new(0.0, 0.0); fft_len];
        for (dst, &v) in hb.iter_mut().zip(h_row.iter()) {
            dst.re = v;
        }
        fft(&mut ub);
        fft(&mut hb);
        for (x, y) in ub.iter_mut().zip(hb.iter()) {
            *x *= *y;
        }
        ifft(&mut ub);
        samples.push(ub[..u.length].iter().map(|c| c.re).collect());
    }
    Signal::new(samples)
}
