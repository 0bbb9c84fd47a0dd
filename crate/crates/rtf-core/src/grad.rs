//! Analytic reverse-mode gradients for kernel generation and convolution.
//!
//! Both adjoints are circular correlations, computed in the frequency domain.
//! With `G = FFT(grad_h)`, `A` and `B` the padded coefficient spectra:
//!
//! ```text
//! grad_b_k  =  Re IFFT(G . conj(1/A))_k          k = 1..n
//! grad_a_k  = -Re IFFT(G . conj(B/A^2))_k        k = 1..n
//! grad_h0   =  grad_h_0
//! ```
//!
//! Gradients are taken with respect to the stored numerator (the truncated
//! form during training); for truncated-form parameters the kernel's time
//! index 0 carries only h0, so its cotangent is excluded from the
//! coefficient adjoints.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::RtfError;
use crate::fft::{fft, fft_real, ifft};
use crate::params::{Kernel, NumeratorForm, RtfParams, Signal};
use crate::{Complex64, Result};

/// Gradients mirroring the [`RtfParams`] shapes.
#[derive(Debug, Clone, PartialEq)]
pub struct ParamGrads {
    /// m x n; denominator rows accumulate over the channels that share them.
    pub grad_a: Vec<Vec<f64>>,
    /// d x n.
    pub grad_b: Vec<Vec<f64>>,
    /// d.
    pub grad_h0: Vec<f64>,
}

impl ParamGrads {
    pub fn zeros(m: usize, d: usize, n: usize) -> Self {
        Self {
            grad_a: vec![vec![0.0; n]; m],
            grad_b: vec![vec![0.0; n]; d],
            grad_h0: vec![0.0; d],
        }
    }

    pub fn is_finite(&self) -> bool {
        self.grad_a
            .iter()
            .chain(self.grad_b.iter())
            .flatten()
            .chain(self.grad_h0.iter())
            .all(|v| v.is_finite())
    }
}

/// Adjoint of kernel generation: pulls a cotangent on the kernel back to
/// cotangents on `(a, b, h0)`.
pub fn kernel_backward(params: &RtfParams, grad_h: &Kernel, length: usize) -> Result<ParamGrads> {
    let n = params.state_size();
    if length < n + 1 {
        return Err(RtfError::LengthTooShort);
    }
    if grad_h.channels() != params.channels() || grad_h.length != length {
        return Err(RtfError::ChannelMismatch);
    }

    // Denominator spectra per shared row.
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
    let mut grads =
        ParamGrads::zeros(params.num_denominators(), params.channels(), n);
    for c in 0..params.channels() {
        let den = &den_spectra[params.denominator_row(c)];
        let mut padded = vec![0.0f64; length];
        padded[1..=n].copy_from_slice(&params.b[c]);
        let num = fft_real(&padded);

        let mut g: Vec<Complex64> =
            grad_h.values[c].iter().map(|&v| Complex64::new(v, 0.0)).collect();
        // Truncated-form generation discards the rational part's wrap onto
        // time index 0, so that sample only reaches h0 in the forward pass
        // and its cotangent must not flow into the coefficient adjoints.
        if truncated {
            g[0] = Complex64::new(0.0, 0.0);
        }
        fft(&mut g);

        // grad_b: correlation of grad_h with IFFT(1/A).
        let mut gb: Vec<Complex64> =
            g.iter().zip(den.iter()).map(|(gs, a)| gs * (1.0 / a).conj()).collect();
        ifft(&mut gb);
        // grad_a: negated correlation with IFFT(B/A^2).
        let mut ga: Vec<Complex64> = g
            .iter()
            .zip(num.iter().zip(den.iter()))
            .map(|(gs, (b, a))| gs * (b / (a * a)).conj())
            .collect();
        ifft(&mut ga);

        let row = params.denominator_row(c);
        for k in 1..=n {
            grads.grad_b[c][k - 1] = gb[k].re;
            grads.grad_a[row][k - 1] -= ga[k].re;
        }
        grads.grad_h0[c] = grad_h.values[c][0];
    }
    if !grads.is_finite() {
        return Err(RtfError::NonFiniteGradient);
    }
    Ok(grads)
}

/// Adjoint of causal convolution:
/// `grad_h_t = sum_{s>=t} grad_y_s u_{s-t}`, `grad_u_j = sum_{s>=j} grad_y_s h_{s-j}`,
/// both computed as FFT correlations at twice the working length.
pub fn conv_backward(u: &Signal, h: &Kernel, grad_y: &Signal) -> Result<(Signal, Kernel)> {
    if u.channels() != h.channels() || grad_y.channels() != u.channels() {
        return Err(RtfError::ChannelMismatch);
    }
    if grad_y.length != u.length {
        return Err(RtfError::LengthMismatch);
    }
    let work = u.length.max(h.length);
    let fft_len = 2 * work;

    let mut grad_u = Vec::with_capacity(u.channels());
    let mut grad_h = Vec::with_capacity(u.channels());
    for c in 0..u.channels() {
        let mut g = vec![Complex64::new(0.0, 0.0); fft_len];
        for (dst, &v) in g.iter_mut().zip(grad_y.samples[c].iter()) {
            dst.re = v;
        }
        fft(&mut g);

        let mut ub = vec![Complex64::new(0.0, 0.0); fft_len];
        for (dst, &v) in ub.iter_mut().zip(u.samples[c].iter()) {
            dst.re = v;
        }
        fft(&mut ub);
        let mut gh: Vec<Complex64> =
            g.iter().zip(ub.iter()).map(|(gs, us)| gs * us.conj()).collect();
        ifft(&mut gh);
        grad_h.push(gh[..h.length].iter().map(|v| v.re).collect::<Vec<f64>>());

        let mut hb = vec![Complex64::new(0.0, 0.0); fft_len];
        for (dst, &v) in hb.iter_mut().zip(h.values[c].iter()) {
            dst.re = v;
        }
        fft(&mut hb);
        let mut gu: Vec<Complex64> =
            g.iter().zip(hb.iter()).map(|(gs, hs)| gs * hs.conj()).collect();
        ifft(&mut gu);
        grad_u.push(gu[..u.length].iter().map(|v| v.re).collect::<Vec<f64>>());
    }
    Ok((Signal::new(grad_u)?, Kernel::new(grad_h)?))
}

/// Central-difference harness: max over coordinates of
/// `|analytic_i - (f(x + e_i step) - f(x - e_i step)) / (2 step)| / max(1, |analytic_i|)`.
pub fn fd_check<F>(mut f: F, point: &[f64], analytic: &[f64], step: f64) -> Result<f64>
where
    F: FnMut(&[f64]) -> Result<f64>,
{
    debug_assert!(step > 0.0);
    debug_assert_eq!(point.len(), analytic.len());
    let mut worst = 0.0f64;
    let mut x = point.to_vec();
    for i in 0..point.len() {
        x[i] = point[i] + step;
        let plus = f(&x)?;
        x[i] = point[i] - step;
        let minus = f(&x)?;
        x[i] = point[i];
        if !plus.is_finite() || !minus.is_finite() {
            return Err(RtfError::NonFiniteObjective);
        }
        let numeric = (plus - minus) / (2.0 * step);
        let err = (analytic[i] - numeric).abs() / analytic[i].abs().max(1.0);
        worst = worst.max(err);
    }
    Ok(worst)
}
