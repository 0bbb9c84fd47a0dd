//! Desk-scale training harness: the delay task and kernel distillation,
//! optimized with a self-contained deterministic Adam.
//!
//! A single linear layer is trained in truncated numerator form through the
//! state-free pipeline `kernel_generate -> fft_conv -> MSE`; the analytic
//! adjoints from `rtf_core::grad` supply exact gradients, so no autodiff
//! machinery is involved.

use std::time::Instant;

use serde::{Deserialize, Serialize};

use rtf_core::error::RtfError;
use rtf_core::fft::{fft, ifft};
use rtf_core::grad::{conv_backward, kernel_backward, ParamGrads};
use rtf_core::params::{Kernel, NumeratorForm};
use rtf_core::rng::SplitMix64;
use rtf_core::spectral::{fft_conv, kernel_generate};
use rtf_core::stability::{initialize, InitScheme};
use rtf_core::{Complex64, Result, RtfParams, Signal};

/// Delay-task training configuration; read from JSON by the CLI.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TrainConfig {
    pub state_size: usize,
    pub channels: usize,
    pub seq_len: usize,
    pub delay: usize,
    /// Fraction of Nyquist retained by the input low-pass, in (0, 1].
    pub band_fraction: f64,
    pub learning_rate: f64,
    pub steps: usize,
    pub batch_size: usize,
    pub seed: u64,
    /// Ablation switch: project every denominator row back into the Montel
    /// region after each update. Off by default; zero init plus a moderate
    /// learning rate keeps training inside the stable region unaided.
    #[serde(default)]
    pub montel_projection: bool,
}

impl TrainConfig {
    fn validate(&self) -> Result<()> {
        if self.state_size == 0
            || self.channels == 0
            || self.seq_len == 0
            || self.steps == 0
            || self.batch_size == 0
        {
            return Err(RtfError::InvalidShape("all counts must be positive"));
        }
        if self.delay >= self.seq_len {
            return Err(RtfError::InvalidShape("delay must be below seq_len"));
        }
        if !(self.band_fraction > 0.0 && self.band_fraction <= 1.0) {
            return Err(RtfError::InvalidShape("band_fraction must be in (0, 1]"));
        }
        if !self.learning_rate.is_finite() || self.learning_rate <= 0.0 {
            return Err(RtfError::NonFinite("learning_rate"));
        }
        Ok(())
    }
}

/// Outcome of a training run.
#[derive(Debug, Clone)]
pub struct TrainReport {
    /// One MSE per optimizer step.
    pub loss_trace: Vec<f64>,
    /// Masked RMSE on a held-out batch drawn after the last training batch.
    pub final_rmse: f64,
    pub params: RtfParams,
    pub wall_seconds: f64,
}

/// One delay-task example: bandlimited unit-variance Gaussian noise and its
/// D-step shift (zeros before the delay). Deterministic in (seed, batch).
pub fn delay_dataset(config: &TrainConfig, batch_index: u64) -> Result<(Signal, Signal)> {
    config.validate()?;
    let len = config.seq_len;
    let cutoff = ((config.band_fraction * len as f64) / 2.0).floor() as usize;
    let mut inputs = Vec::with_capacity(config.channels);
    let mut targets = Vec::with_capacity(config.channels);
    for c in 0..config.channels {
        let mut rng =
            SplitMix64::fork(config.seed, batch_index * config.channels as u64 + c as u64);
        let mut buf: Vec<Complex64> =
            (0..len).map(|_| Complex64::new(rng.normal(), 0.0)).collect();
        fft(&mut buf);
        for (k, v) in buf.iter_mut().enumerate() {
            if k.min(len - k) > cutoff {
                *v = Complex64::new(0.0, 0.0);
            }
        }
        ifft(&mut buf);
        let mut u: Vec<f64> = buf.iter().map(|v| v.re).collect();
        let mean = u.iter().sum::<f64>() / len as f64;
        let var = u.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / len as f64;
        let scale = 1.0 / var.sqrt().max(1e-12);
        for v in u.iter_mut() {
            *v = (*v - mean) * scale;
        }
        let mut target = vec![0.0; len];
        target[config.delay..].copy_from_slice(&u[..len - config.delay]);
        inputs.push(u);
        targets.push(target);
    }
    Ok((Signal::new(inputs)?, Signal::new(targets)?))
}

/// First/second-moment accumulators for Adam, flattened over (a, b, h0).
#[derive(Debug, Clone)]
pub struct AdamState {
    m: Vec<f64>,
    v: Vec<f64>,
    step: usize,
}

impl AdamState {
    pub fn new(params: &RtfParams) -> Self {
        let len = flatten(params).len();
        Self { m: vec![0.0; len], v: vec![0.0; len], step: 0 }
    }
}

fn flatten(params: &RtfParams) -> Vec<f64> {
    params
        .a
        .iter()
        .chain(params.b.iter())
        .flatten()
        .copied()
        .chain(params.h0.iter().copied())
        .collect()
}

fn flatten_grads(grads: &ParamGrads) -> Vec<f64> {
    grads
        .grad_a
        .iter()
        .chain(grads.grad_b.iter())
        .flatten()
        .copied()
        .chain(grads.grad_h0.iter().copied())
        .collect()
}

fn unflatten(template: &RtfParams, flat: &[f64]) -> Result<RtfParams> {
    let n = template.state_size();
    let m = template.num_denominators();
    let d = template.channels();
    let a: Vec<Vec<f64>> = (0..m).map(|i| flat[i * n..(i + 1) * n].to_vec()).collect();
    let b: Vec<Vec<f64>> =
        (0..d).map(|i| flat[(m + i) * n..(m + i + 1) * n].to_vec()).collect();
    let h0 = flat[(m + d) * n..].to_vec();
    RtfParams::new(a, b, h0, template.numerator_form(), template.trained_length())
}

/// Textbook bias-corrected Adam: beta1 = 0.9, beta2 = 0.999, eps = 1e-8.
pub fn adam_update(
    params: &RtfParams,
    grads: &ParamGrads,
    state: &mut AdamState,
    lr: f64,
) -> Result<RtfParams> {
    const BETA1: f64 = 0.9;
    const BETA2: f64 = 0.999;
    const EPS: f64 = 1e-8;
    if !grads.is_finite() {
        return Err(RtfError::NonFiniteGradient);
    }
    let mut flat = flatten(params);
    let g = flatten_grads(grads);
    if g.len() != flat.len() {
        return Err(RtfError::InvalidShape("gradient shape mismatch"));
    }
    state.step += 1;
    let t = state.step as f64;
    let bc1 = 1.0 - BETA1.powf(t);
    let bc2 = 1.0 - BETA2.powf(t);
    for i in 0..flat.len() {
        state.m[i] = BETA1 * state.m[i] + (1.0 - BETA1) * g[i];
        state.v[i] = BETA2 * state.v[i] + (1.0 - BETA2) * g[i] * g[i];
        let m_hat = state.m[i] / bc1;
        let v_hat = state.v[i] / bc2;
        flat[i] -= lr * m_hat / (v_hat.sqrt() + EPS);
    }
    unflatten(params, &flat)
}

/// Masked MSE and its cotangent: only samples `t >= delay` count (the
/// earlier targets are zeros by construction and would dilute the metric).
fn masked_loss(y: &Signal, target: &Signal, delay: usize) -> (f64, Signal) {
    let len = y.length;
    let count = (y.channels() * (len - delay)) as f64;
    let mut loss = 0.0;
    let mut grad = Vec::with_capacity(y.channels());
    for (y_row, t_row) in y.samples.iter().zip(target.samples.iter()) {
        let mut g_row = vec![0.0; len];
        for t in delay..len {
            let r = y_row[t] - t_row[t];
            loss += r * r;
            g_row[t] = 2.0 * r / count;
        }
        grad.push(g_row);
    }
    (loss / count, Signal::new(grad).expect("shapes fixed above"))
}

fn accumulate(into: &mut ParamGrads, from: &ParamGrads, weight: f64) {
    for (dst, src) in into.grad_a.iter_mut().flatten().zip(from.grad_a.iter().flatten()) {
        *dst += weight * src;
    }
    for (dst, src) in into.grad_b.iter_mut().flatten().zip(from.grad_b.iter().flatten()) {
        *dst += weight * src;
    }
    for (dst, src) in into.grad_h0.iter_mut().zip(from.grad_h0.iter()) {
        *dst += weight * src;
    }
}

fn montel_pull_back(params: &RtfParams) -> Result<RtfParams> {
    let mut a = params.a.clone();
    for row in a.iter_mut() {
        let sum: f64 = row.iter().map(|v| v.abs()).sum();
        if sum > 1.0 {
            for v in row.iter_mut() {
                *v /= sum;
            }
        }
    }
    RtfParams::new(
        a,
        params.b.clone(),
        params.h0.clone(),
        params.numerator_form(),
        params.trained_length(),
    )
}

/// Masked forward pass: returns the loss and the parameter cotangents.
fn delay_step(
    params: &RtfParams,
    u: &Signal,
    target: &Signal,
    delay: usize,
) -> Result<(f64, ParamGrads)> {
    let kernel = kernel_generate(params, u.length)?;
    let y = fft_conv(u, &kernel)?;
    let (loss, grad_y) = masked_loss(&y, target, delay);
    let (_, grad_h) = conv_backward(u, &kernel, &grad_y)?;
    let grads = kernel_backward(params, &grad_h, u.length)?;
    Ok((loss, grads))
}

/// Trains a zero-initialized truncated-form filter to reproduce its input
/// delayed by `config.delay` steps.
pub fn train_delay(config: &TrainConfig) -> Result<TrainReport> {
    config.validate()?;
    if config.state_size < config.delay {
        eprintln!(
            "warning: state_size {} < delay {}; the task has no exact FIR solution",
            config.state_size, config.delay
        );
    }
    let start = Instant::now();
    let mut params = initialize(
        InitScheme::Zero,
        config.state_size,
        config.channels,
        config.channels,
    )?
    .with_form(NumeratorForm::Truncated, Some(config.seq_len))?;
    let mut adam = AdamState::new(&params);
    let mut trace = Vec::with_capacity(config.steps);
    for step in 0..config.steps {
        let mut total = ParamGrads::zeros(
            params.num_denominators(),
            params.channels(),
            params.state_size(),
        );
        let mut loss = 0.0;
        for b in 0..config.batch_size {
            let batch_index = (step * config.batch_size + b) as u64;
            let (u, target) = delay_dataset(config, batch_index)?;
            let (l, grads) = delay_step(&params, &u, &target, config.delay)?;
            loss += l / config.batch_size as f64;
            accumulate(&mut total, &grads, 1.0 / config.batch_size as f64);
        }
        if !loss.is_finite() {
            return Err(RtfError::NonFiniteObjective);
        }
        if loss > 1e6 {
            return Err(RtfError::TrainingDiverged);
        }
        trace.push(loss);
        params = adam_update(&params, &total, &mut adam, config.learning_rate)?;
        if config.montel_projection {
            params = montel_pull_back(&params)?;
        }
    }

    // Held-out evaluation on the batch index right after the training range.
    let (u, target) = delay_dataset(config, (config.steps * config.batch_size) as u64)?;
    let kernel = kernel_generate(&params, u.length)?;
    let y = fft_conv(&u, &kernel)?;
    let (mse, _) = masked_loss(&y, &target, config.delay);
    Ok(TrainReport {
        loss_trace: trace,
        final_rmse: mse.sqrt(),
        params,
        wall_seconds: start.elapsed().as_secs_f64(),
    })
}

/// Fits a truncated-form filter to an arbitrary target kernel by Adam on
/// `||kernel_generate(theta) - target||^2 / (d l)`; returns the best-seen
/// parameters and their MSE.
pub fn distill(
    target: &Kernel,
    state_size: usize,
    iterations: usize,
    lr: f64,
) -> Result<(RtfParams, f64)> {
    if target.length < state_size + 1 {
        return Err(RtfError::LengthTooShort);
    }
    let d = target.channels();
    let len = target.length;
    let mut params = initialize(InitScheme::Zero, state_size, d, d)?
        .with_form(NumeratorForm::Truncated, Some(len))?;
    let mut adam = AdamState::new(&params);
    let count = (d * len) as f64;
    let mut best_mse = f64::INFINITY;
    let mut best = params.clone();
    for _ in 0..iterations {
        let kernel = kernel_generate(&params, len)?;
        let mut mse = 0.0;
        let mut grad = Vec::with_capacity(d);
        for (k_row, t_row) in kernel.values.iter().zip(target.values.iter()) {
            let mut g_row = Vec::with_capacity(len);
            for (&k, &t) in k_row.iter().zip(t_row.iter()) {
                let r = k - t;
                mse += r * r / count;
                g_row.push(2.0 * r / count);
            }
            grad.push(g_row);
        }
        if !mse.is_finite() {
            return Err(RtfError::NonFiniteObjective);
        }
        if mse > 1e6 {
            return Err(RtfError::TrainingDiverged);
        }
        if mse < best_mse {
            best_mse = mse;
            best = params.clone();
        }
        let grads = kernel_backward(&params, &Kernel::new(grad)?, len)?;
        params = adam_update(&params, &grads, &mut adam, lr)?;
    }
    Ok((best, best_mse))
}
