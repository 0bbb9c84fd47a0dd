//! Scaling benchmarks: state-free kernel generation + convolution against a
//! materialized-history diagonal scan and the O(n)-per-step recurrence.
//!
//! Memory is reported by explicit accounting of the numeric buffers each
//! method allocates, not by OS measurements: deterministic, portable, and
//! directly comparable with the asymptotic claims (state-free cost is flat in
//! state size; scan history grows as l * n).
//!
//! The benchmark family uses denominators `z^n - c` (only `a_n` nonzero), so
//! the companion transition matrix satisfies `A^n = c I` and the truncated
//! numerator `b (I - A^l)` has a closed form even at n = 2048, where a dense
//! matrix power would dominate the run.

use std::time::Instant;

use rtf_core::convert::ModalParams;
use rtf_core::params::NumeratorForm;
use rtf_core::rng::SplitMix64;
use rtf_core::spectral::{fft_conv, kernel_generate};
use rtf_core::statespace::{recurrent_apply, CompanionSsm};
use rtf_core::{Complex64, Result, RtfParams, Signal};

pub const DEFAULT_REPEATS: usize = 7;

/// One benchmark cell.
#[derive(Debug, Clone)]
pub struct BenchRow {
    /// "rtf", "scan_modal", or "recurrent".
    pub method: &'static str,
    pub seq_len: usize,
    pub state_size: usize,
    pub channels: usize,
    pub wall_ms_median: f64,
    pub buffer_bytes: u64,
}

/// Diagonal recurrence with the full complex state history materialized,
/// modeling the memory profile of a parallel scan. Returns the output and
/// the history's byte count (16 bytes per complex entry, l * n entries).
pub fn scan_baseline_apply(modal: &ModalParams, u: &Signal) -> Result<(Signal, u64)> {
    let n = modal.state_size();
    let len = u.length;
    let mut samples = Vec::with_capacity(u.channels());
    // l x n complex history, the scan's defining allocation.
    let mut history = vec![Complex64::new(0.0, 0.0); len * n];
    for row in &u.samples {
        for v in history.iter_mut() {
            *v = Complex64::new(0.0, 0.0);
        }
        let mut y = Vec::with_capacity(len);
        for t in 0..len {
            if t > 0 {
                let (done, cur) = history.split_at_mut(t * n);
                let prev = &done[(t - 1) * n..];
                for i in 0..n {
                    cur[i] = modal.poles[i] * prev[i] + row[t - 1];
                }
            }
            let state = &history[t * n..(t + 1) * n];
            let acc: Complex64 = modal
                .residues
                .iter()
                .zip(state.iter())
                .map(|(r, x)| r * x)
                .sum();
            y.push(modal.h0 * row[t] + acc.re);
        }
        samples.push(y);
    }
    Ok((Signal::new(samples)?, 16 * (len * n) as u64))
}

/// Benchmark system with denominator `z^n - c`: poles are the n-th roots of
/// c, and `A^l = c^(l/n) A^(l mod n)` gives the truncated numerator exactly.
pub struct BenchSystem {
    /// Corrected-form parameters (the numerator as drawn).
    pub corrected: RtfParams,
    /// Truncated-form parameters for the state-free path.
    pub truncated: RtfParams,
    pub modal: ModalParams,
}

/// Row-vector times companion matrix in O(n): with first row -a and ones on
/// the subdiagonal, `(x A)_j = -a_j x_0 + x_{j+1}`.
fn vecmat_companion(x: &[f64], a: &[f64]) -> Vec<f64> {
    let n = x.len();
    (0..n)
        .map(|j| -a[j] * x[0] + if j + 1 < n { x[j + 1] } else { 0.0 })
        .collect()
}

pub fn bench_system(state_size: usize, seq_len: usize, seed: u64) -> Result<BenchSystem> {
    let n = state_size;
    let c = 0.5f64;
    let mut a = vec![0.0; n];
    a[n - 1] = -c;
    let mut rng = SplitMix64::fork(seed, n as u64);
    let b: Vec<f64> = (0..n).map(|_| rng.uniform(-1.0, 1.0)).collect();
    let h0 = rng.uniform(-1.0, 1.0);
    let corrected = RtfParams::siso(a.clone(), b.clone(), h0)?;

    // b_tilde = b (I - A^l) = b - c^(l/n) * (b A^(l mod n)).
    let scale = c.powi((seq_len / n) as i32);
    let mut shifted = b.clone();
    for _ in 0..seq_len % n {
        shifted = vecmat_companion(&shifted, &a);
    }
    let b_tilde: Vec<f64> = b.iter().zip(shifted.iter()).map(|(v, s)| v - scale * s).collect();
    let truncated = RtfParams::siso(a.clone(), b_tilde, h0)?
        .with_form(NumeratorForm::Truncated, Some(seq_len))?;

    // Poles: c^(1/n) times the n-th roots of unity. Residues from the
    // z-domain form N(z)/D'(z) with D(z) = z^n - c, D'(z) = n z^(n-1).
    let radius = c.powf(1.0 / n as f64);
    let mut poles = Vec::with_capacity(n);
    let mut residues = Vec::with_capacity(n);
    for k in 0..n {
        let theta = core::f64::consts::TAU * k as f64 / n as f64;
        let pole = Complex64::new(radius * theta.cos(), radius * theta.sin());
        // N(z) = sum_k b_k z^(n-k), Horner over b.
        let mut num = Complex64::new(0.0, 0.0);
        for &bk in &b {
            num = num * pole + bk;
        }
        let dprime = pole.powu(n as u32 - 1) * n as f64;
        poles.push(pole);
        residues.push(num / dprime);
    }
    let modal = ModalParams { residues, poles, h0 };
    Ok(BenchSystem { corrected, truncated, modal })
}

fn median(mut xs: Vec<f64>) -> f64 {
    xs.sort_by(|p, q| p.partial_cmp(q).unwrap());
    xs[xs.len() / 2]
}

fn time_median<F: FnMut() -> Result<()>>(repeats: usize, mut f: F) -> Result<f64> {
    for _ in 0..2 {
        f()?;
    }
    let mut times = Vec::with_capacity(repeats);
    for _ in 0..repeats {
        let t0 = Instant::now();
        f()?;
        times.push(t0.elapsed().as_secs_f64() * 1e3);
    }
    Ok(median(times))
}

/// Explicit accounting for the state-free path: two length-l coefficient
/// pads, the denominator/numerator spectra and the spectrum IFFT (complex),
/// the real kernel, and the two 2l-point convolution transforms. Flat in n
/// up to the n + 1 coefficients living inside the pads.
fn rtf_buffer_bytes(len: usize) -> u64 {
    let pads = 2 * 8 * len;
    let spectra = 3 * 16 * len;
    let kernel = 8 * len;
    let conv = 2 * 16 * 2 * len;
    (pads + spectra + kernel + conv) as u64
}

/// Runs every method over the (lengths x state_sizes) grid. Single-threaded;
/// wall-clock medians over `repeats` timed runs after two warmups.
pub fn run_bench(
    lengths: &[usize],
    state_sizes: &[usize],
    channels: usize,
    repeats: usize,
) -> Result<Vec<BenchRow>> {
    assert!(repeats >= 3, "medians need at least 3 repeats");
    let mut rows = Vec::new();
    for &len in lengths {
        for &n in state_sizes {
            let system = bench_system(n, len, 17)?;
            let mut rng = SplitMix64::fork(29, (len * n) as u64);
            let u = Signal::new(
                (0..channels)
                    .map(|_| (0..len).map(|_| rng.uniform(-1.0, 1.0)).collect())
                    .collect(),
            )?;

            let rtf_ms = time_median(repeats, || {
                let kernel = kernel_generate(&system.truncated, len)?;
                let y = fft_conv(&u, &kernel)?;
                std::hint::black_box(&y);
                Ok(())
            })?;
            rows.push(BenchRow {
                method: "rtf",
                seq_len: len,
                state_size: n,
                channels,
                wall_ms_median: rtf_ms,
                buffer_bytes: rtf_buffer_bytes(len),
            });

            let mut scan_bytes = 0;
            let scan_ms = time_median(repeats, || {
                let (y, bytes) = scan_baseline_apply(&system.modal, &u)?;
                scan_bytes = bytes;
                std::hint::black_box(&y);
                Ok(())
            })?;
            rows.push(BenchRow {
                method: "scan_modal",
                seq_len: len,
                state_size: n,
                channels,
                wall_ms_median: scan_ms,
                buffer_bytes: scan_bytes,
            });

            let ssm = CompanionSsm {
                a: system.corrected.a[0].clone(),
                b: system.corrected.b[0].clone(),
                h0: system.corrected.h0[0],
            };
            let rec_ms = time_median(repeats, || {
                for row in &u.samples {
                    let y = recurrent_apply(&ssm, row)?;
                    std::hint::black_box(&y);
                }
                Ok(())
            })?;
            rows.push(BenchRow {
                method: "recurrent",
                seq_len: len,
                state_size: n,
                channels,
                // Running state plus the output row.
                buffer_bytes: (8 * (n + len)) as u64,
                wall_ms_median: rec_ms,
            });
        }
    }
    Ok(rows)
}

/// CSV with the fixed header; floats in shortest round-trip form.
pub fn rows_to_csv(rows: &[BenchRow]) -> String {
    let mut out = String::from("method,seq_len,state_size,channels,wall_ms_median,buffer_bytes\n");
    for r in rows {
        out.push_str(&format!(
            "{},{},{},{},{},{}\n",
            r.method, r.seq_len, r.state_size, r.channels, r.wall_ms_median, r.buffer_bytes
        ));
    }
    out
}
