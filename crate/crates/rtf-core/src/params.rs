//! Transfer-function data model and exact (non-FFT) reference evaluations.
//!
//! [`series_expand`] and [`eval_tf`] are the oracles the FFT paths are tested
//! against: O(l n) power-series expansion by long division and pointwise
//! Horner evaluation of `H(z) = h0 + B(z)/A(z)`.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::RtfError;
use crate::{Complex64, Result};

/// Whether the stored numerator is the deployment numerator `b` or the
/// trained truncated numerator `b~ = b (I - A^l)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NumeratorForm {
    /// Deployment numerator: `H(z)` is the true infinite-response system.
    Corrected,
    /// Trained numerator: the FFT path at `trained_length` yields the exact
    /// length-l truncation of the underlying corrected system.
    Truncated,
}

/// Parameters of a bank of SISO rational transfer functions.
///
/// Each of `d` channels has its own numerator row `b` and feedthrough `h0`;
/// the `m` denominator rows are equally dispersed across channels, channel
/// `c` using row `floor(c * m / d)`. Coefficients are stored ascending in
/// delay order (`a[0]` multiplies `z^-1`); the implicit `a0 = 1` and `b0 = 0`
/// are never stored.
#[derive(Debug, Clone, PartialEq)]
pub struct RtfParams {
    state_size: usize,
    channels: usize,
    num_denominators: usize,
    /// m x n denominator coefficients.
    pub a: Vec<Vec<f64>>,
    /// d x n numerator coefficients.
    pub b: Vec<Vec<f64>>,
    /// d feedthrough values.
    pub h0: Vec<f64>,
    numerator_form: NumeratorForm,
    trained_length: Option<usize>,
}

impl RtfParams {
    /// Validates shapes and finiteness. `trained_length` is required exactly
    /// when `numerator_form` is truncated.
    pub fn new(
        a: Vec<Vec<f64>>,
        b: Vec<Vec<f64>>,
        h0: Vec<f64>,
        numerator_form: NumeratorForm,
        trained_length: Option<usize>,
    ) -> Result<Self> {
        let m = a.len();
        let d = b.len();
        if m == 0 || d == 0 || h0.len() != d {
            return Err(RtfError::InvalidShape("empty coefficient bank or h0 length != channels"));
        }
        if d % m != 0 {
            return Err(RtfError::InvalidShape("num_denominators must divide channels"));
        }
        let n = a[0].len();
        if n == 0 {
            return Err(RtfError::InvalidShape("state size must be positive"));
        }
        if a.iter().any(|row| row.len() != n) || b.iter().any(|row| row.len() != n) {
            return Err(RtfError::InvalidShape("ragged coefficient rows"));
        }
        let finite = a.iter().chain(b.iter()).flatten().chain(h0.iter()).all(|v| v.is_finite());
        if !finite {
            return Err(RtfError::NonFinite("coefficients"));
        }
        match (numerator_form, trained_length) {
            (NumeratorForm::Truncated, None) => {
                return Err(RtfError::InvalidShape("truncated form requires trained_length"))
            }
            (NumeratorForm::Truncated, Some(0)) => {
                return Err(RtfError::InvalidShape("trained_length must be positive"))
            }
            (NumeratorForm::Corrected, Some(_)) => {
                return Err(RtfError::InvalidShape("corrected form must not carry trained_length"))
            }
            _ => {}
        }
        Ok(Self {
            state_size: n,
            channels: d,
            num_denominators: m,
            a,
            b,
            h0,
            numerator_form,
            trained_length,
        })
    }

    /// Single shared denominator, corrected form.
    pub fn siso(a: Vec<f64>, b: Vec<f64>, h0: f64) -> Result<Self> {
        Self::new(vec![a], vec![b], vec![h0], NumeratorForm::Corrected, None)
    }

    pub fn state_size(&self) -> usize {
        self.state_size
    }

    pub fn channels(&self) -> usize {
        self.channels
    }

    pub fn num_denominators(&self) -> usize {
        self.num_denominators
    }

    pub fn numerator_form(&self) -> NumeratorForm {
        self.numerator_form
    }

    pub fn trained_length(&self) -> Option<usize> {
        self.trained_length
    }

    /// Denominator row used by `channel`: `floor(c * m / d)`.
    pub fn denominator_row(&self, channel: usize) -> usize {
        channel * self.num_denominators / self.channels
    }

    /// Denominator coefficients used by `channel`.
    pub fn a_for_channel(&self, channel: usize) -> &[f64] {
        &self.a[self.denominator_row(channel)]
    }

    /// Re-tag the numerator form without touching coefficients. Used by
    /// training code that owns the interpretation of the stored numerator.
    pub fn with_form(mut self, form: NumeratorForm, trained_length: Option<usize>) -> Result<Self> {
        match (form, trained_length) {
            (NumeratorForm::Truncated, Some(l)) if l > 0 => {}
            (NumeratorForm::Corrected, None) => {}
            _ => return Err(RtfError::InvalidShape("inconsistent numerator form tag")),
        }
        self.numerator_form = form;
        self.trained_length = trained_length;
        Ok(self)
    }
}

/// Length-l real impulse response per channel.
#[derive(Debug, Clone, PartialEq)]
pub struct Kernel {
    /// d x l samples, channel-major.
    pub values: Vec<Vec<f64>>,
    pub length: usize,
}

impl Kernel {
    pub fn new(values: Vec<Vec<f64>>) -> Result<Self> {
        let length = values.first().map_or(0, |row| row.len());
        if length == 0 || values.iter().any(|row| row.len() != length) {
            return Err(RtfError::InvalidShape("kernel must be rectangular and non-empty"));
        }
        if values.iter().flatten().any(|v| !v.is_finite()) {
            return Err(RtfError::NonFinite("kernel values"));
        }
        Ok(Self { values, length })
    }

    pub fn channels(&self) -> usize {
        self.values.len()
    }
}

/// Multichannel time series (inputs u_t or outputs y_t).
#[derive(Debug, Clone, PartialEq)]
pub struct Signal {
    /// d x l samples, channel-major.
    pub samples: Vec<Vec<f64>>,
    pub length: usize,
}

impl Signal {
    pub fn new(samples: Vec<Vec<f64>>) -> Result<Self> {
        let length = samples.first().map_or(0, |row| row.len());
        if samples.is_empty() || samples.iter().any(|row| row.len() != length) {
            return Err(RtfError::InvalidShape("signal must be rectangular"));
        }
        if samples.iter().flatten().any(|v| !v.is_finite()) {
            return Err(RtfError::NonFinite("signal samples"));
        }
        Ok(Self { samples, length })
    }

    pub fn channels(&self) -> usize {
        self.samples.len()
    }
}

/// Exact first `length` impulse-response samples of each channel, by long
/// division of `b(z)/a(z)`: `h_0 = h0`, and for `t >= 1`
/// `h_t = b_t - sum_{k=1}^{min(t,n)} a_k h_{t-k}` where the recurrence runs
/// over the strictly proper part (the feedthrough `h0` does not feed back).
pub fn series_expand(params: &RtfParams, length: usize) -> Result<Kernel> {
    if params.numerator_form() == NumeratorForm::Truncated {
        return Err(RtfError::TruncatedFormNotExpandable);
    }
    if length == 0 {
        return Err(RtfError::InvalidShape("length must be positive"));
    }
    let n = params.state_size();
    let mut values = Vec::with_capacity(params.channels());
    for c in 0..params.channels() {
        let a = params.a_for_channel(c);
        let b = &params.b[c];
        // g is the impulse response of the strictly proper part B/A.
        let mut g = vec![0.0f64; length];
        for t in 1..length {
            let mut acc = if t <= n { b[t - 1] } else { 0.0 };
            for k in 1..=t.min(n) {
                acc -= a[k - 1] * g[t - k];
            }
            g[t] = acc;
        }
        g[0] = params.h0[c];
        values.push(g);
    }
    Kernel::new(values)
}

/// Pointwise evaluation `H(z) = h0 + B(z)/A(z)` by Horner's rule in `z^-1`.
pub fn eval_tf(params: &RtfParams, channel: usize, z: Complex64) -> Result<Complex64> {
    let a = params.a_for_channel(channel);
    let b = &params.b[channel];
    let w = Complex64::new(1.0, 0.0) / z;

    // B(z) = b1 w + ... + bn w^n ; A(z) = 1 + a1 w + ... + an w^n.
    let mut num = Complex64::new(0.0, 0.0);
    let mut den = Complex64::new(0.0, 0.0);
    for k in (0..a.len()).rev() {
        num = (num + b[k]) * w;
        den = (den + a[k]) * w;
    }
    den += 1.0;

    if den.norm() <= 1e-300 {
        return Err(RtfError::PoleAtEvaluationPoint);
    }
    Ok(params.h0[channel] + num / den)
}

/// Circular wrap-around oracle: folds a length `J*period` kernel into
/// `out_t = sum_j in_{t + j*period}`.
pub fn alias_fold(kernel: &Kernel, period: usize) -> Result<Kernel> {
    if period == 0 || kernel.length % period != 0 {
        return Err(RtfError::LengthMismatch);
    }
    let folds = kernel.length / period;
    let values = kernel
        .values
        .iter()
        .map(|row| {
            (0..period).map(|t| (0..folds).map(|j| row[t + j * period]).sum()).collect()
        })
        .collect();
    Kernel::new(values)
}
