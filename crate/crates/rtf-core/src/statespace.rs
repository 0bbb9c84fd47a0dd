//! Companion-form realization, O(n) recurrent stepping, prefill, and the
//! numerator truncation/correction pair.
//!
//! The companion realization of `(a, b, h0)` has
//!
//! ```text
//! A = [ -a1 -a2 ... -an ]      B = e1,   C = b,   y_t = C x_t + h0 u_t
//!     [  1   0  ...   0 ]
//!     [      ...        ]
//!     [  0  ...  1    0 ]
//! ```
//!
//! so a step is two length-n inner products and a shift. The truncated
//! numerator `b~ = b (I - A^l)` makes the FFT kernel path produce the exact
//! length-l truncation; `correct_numerator` inverts that map for deployment.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::RtfError;
use crate::linalg::{Lu, Matrix};
use crate::params::{Kernel, NumeratorForm, RtfParams, Signal};
use crate::Result;

/// Unstructured SISO state-space realization.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseSsm {
    pub a: Matrix,
    pub b: Vec<f64>,
    pub c: Vec<f64>,
    pub h0: f64,
}

impl DenseSsm {
    pub fn new(a: Matrix, b: Vec<f64>, c: Vec<f64>, h0: f64) -> Result<Self> {
        let n = a.rows;
        if a.cols != n || b.len() != n || c.len() != n || n == 0 {
            return Err(RtfError::InvalidShape("dense SSM dimensions"));
        }
        if !h0.is_finite()
            || a.data.iter().any(|v| !v.is_finite())
            || b.iter().chain(c.iter()).any(|v| !v.is_finite())
        {
            return Err(RtfError::NonFinite("dense SSM entries"));
        }
        Ok(Self { a, b, c, h0 })
    }

    pub fn state_size(&self) -> usize {
        self.a.rows
    }
}

/// Companion-form SISO system; the implied A/B/C are never materialized.
#[derive(Debug, Clone, PartialEq)]
pub struct CompanionSsm {
    pub a: Vec<f64>,
    pub b: Vec<f64>,
    pub h0: f64,
}

impl CompanionSsm {
    pub fn state_size(&self) -> usize {
        self.a.len()
    }

    /// Materializes the dense Eq-form matrices (for tests and conversions).
    pub fn to_dense(&self) -> DenseSsm {
        let n = self.state_size();
        let mut a = Matrix::zeros(n, n);
        for j in 0..n {
            a.set(0, j, -self.a[j]);
        }
        for i in 1..n {
            a.set(i, i - 1, 1.0);
        }
        let mut b = vec![0.0; n];
        b[0] = 1.0;
        DenseSsm { a, b, c: self.b.clone(), h0: self.h0 }
    }
}

/// Per-channel running state.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    pub x: Vec<f64>,
}

impl StateVector {
    pub fn zeros(n: usize) -> Self {
        Self { x: vec![0.0; n] }
    }
}

/// Impulse response of a dense realization: `h_0 = h0`,
/// `h_t = C A^{t-1} B` via iterated matrix-vector products.
pub fn dense_impulse(ssm: &DenseSsm, length: usize) -> Result<Kernel> {
    if length == 0 {
        return Err(RtfError::InvalidShape("length must be positive"));
    }
    let mut h = vec![0.0; length];
    h[0] = ssm.h0;
    let mut v = ssm.b.clone();
    for t in 1..length {
        h[t] = ssm.c.iter().zip(v.iter()).map(|(c, x)| c * x).sum();
        v = ssm.a.matvec(&v);
    }
    Kernel::new(vec![h])
}

/// Companion realization of one channel. Requires the corrected numerator:
/// the truncated numerator does not define the same recurrence.
pub fn companion_realize(params: &RtfParams, channel: usize) -> Result<CompanionSsm> {
    if params.numerator_form() == NumeratorForm::Truncated {
        return Err(RtfError::NeedsCorrectedNumerator);
    }
    Ok(CompanionSsm {
        a: params.a_for_channel(channel).to_vec(),
        b: params.b[channel].clone(),
        h0: params.h0[channel],
    })
}

/// One recurrent step: `y = b . x + h0 u`, then `x' = (u - a . x, x1, ..., x_{n-1})`.
/// Two inner products and a shift; no n x n storage.
pub fn step(ssm: &CompanionSsm, state: &mut StateVector, u: f64) -> Result<f64> {
    let n = ssm.state_size();
    if state.x.len() != n {
        return Err(RtfError::StateSizeMismatch);
    }
    let y: f64 = ssm.b.iter().zip(state.x.iter()).map(|(b, x)| b * x).sum::<f64>() + ssm.h0 * u;
    let new_first: f64 = u - ssm.a.iter().zip(state.x.iter()).map(|(a, x)| a * x).sum::<f64>();
    for i in (1..n).rev() {
        state.x[i] = state.x[i - 1];
    }
    state.x[0] = new_first;
    Ok(y)
}

/// State after consuming all of a single-channel input from the zero state.
pub fn prefill_naive(ssm: &CompanionSsm, u: &Signal) -> Result<StateVector> {
    if u.channels() != 1 {
        return Err(RtfError::ChannelMismatch);
    }
    let mut state = StateVector::zeros(ssm.state_size());
    for &sample in &u.samples[0] {
        step(ssm, &mut state, sample)?;
    }
    Ok(state)
}

/// Runs the recurrence over a whole signal, returning outputs.
pub fn recurrent_apply(ssm: &CompanionSsm, u: &[f64]) -> Result<Vec<f64>> {
    let mut state = StateVector::zeros(ssm.state_size());
    u.iter().map(|&sample| step(ssm, &mut state, sample)).collect()
}

/// Companion matrix of the monic polynomial `z^n + a1 z^{n-1} + ... + an`.
pub fn companion_matrix(a: &[f64]) -> Matrix {
    CompanionSsm { a: a.to_vec(), b: vec![0.0; a.len()], h0: 0.0 }.to_dense().a
}

/// `A^exponent` by binary exponentiation, O(n^3 log exponent).
pub fn companion_power(a: &[f64], exponent: usize) -> Matrix {
    let n = a.len();
    let mut result = Matrix::identity(n);
    let mut base = companion_matrix(a);
    let mut e = exponent;
    while e > 0 {
        if e & 1 == 1 {
            result = result.matmul(&base);
        }
        e >>= 1;
        if e > 0 {
            base = base.matmul(&base);
        }
    }
    result
}

fn truncation_matrix(a: &[f64], trained_length: usize) -> Matrix {
    let mut m = companion_power(a, trained_length);
    m.scale(-1.0);
    m.add_scaled_identity(1.0);
    m
}

/// Truncated numerator `b~ = b (I - A^l)`.
pub fn truncate_numerator(a: &[f64], b: &[f64], trained_length: usize) -> Result<Vec<f64>> {
    if a.len() != b.len() {
        return Err(RtfError::InvalidShape("a and b must share length"));
    }
    if trained_length == 0 {
        return Err(RtfError::InvalidShape("trained_length must be positive"));
    }
    Ok(truncation_matrix(a, trained_length).vecmat(b))
}

/// Deployment numerator `b` solving `b (I - A^l) = b~`, by LU with partial
/// pivoting on the transposed system. Errors when the correction system is
/// singular or has one-norm condition above 1e12 (some pole^l near 1).
pub fn correct_numerator(a: &[f64], b_tilde: &[f64], trained_length: usize) -> Result<Vec<f64>> {
    if a.len() != b_tilde.len() {
        return Err(RtfError::InvalidShape("a and b~ must share length"));
    }
    if trained_length == 0 {
        return Err(RtfError::InvalidShape("trained_length must be positive"));
    }
    let m = truncation_matrix(a, trained_length);
    let n = a.len();
    let mut mt = Matrix::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            mt.set(j, i, m.get(i, j));
        }
    }
    let lu = Lu::factor(&mt)?;
    if lu.condition_one_norm(&mt) > 1e12 {
        return Err(RtfError::NearSingularCorrection);
    }
    let b = lu.solve(b_tilde);
    if b.iter().any(|v| !v.is_finite()) {
        return Err(RtfError::NearSingularCorrection);
    }
    Ok(b)
}

/// Corrects a whole truncated-form parameter bank for deployment.
pub fn correct_params(params: &RtfParams) -> Result<RtfParams> {
    let l = match (params.numerator_form(), params.trained_length()) {
        (NumeratorForm::Truncated, Some(l)) => l,
        _ => return Err(RtfError::InvalidShape("correct_params expects truncated form")),
    };
    let b = (0..params.channels())
        .map(|c| correct_numerator(params.a_for_channel(c), &params.b[c], l))
        .collect::<Result<Vec<_>>>()?;
    RtfParams::new(params.a.clone(), b, params.h0.clone(), NumeratorForm::Corrected, None)
}

/// Truncates a whole corrected-form parameter bank for training/FFT use.
pub fn truncate_params(params: &RtfParams, trained_length: usize) -> Result<RtfParams> {
    if params.numerator_form() != NumeratorForm::Corrected {
        return Err(RtfError::NeedsCorrectedNumerator);
    }
    let b = (0..params.channels())
        .map(|c| truncate_numerator(params.a_for_channel(c), &params.b[c], trained_length))
        .collect::<Result<Vec<_>>>()?;
    RtfParams::new(
        params.a.clone(),
        b,
        params.h0.clone(),
        NumeratorForm::Truncated,
        Some(trained_length),
    )
}
