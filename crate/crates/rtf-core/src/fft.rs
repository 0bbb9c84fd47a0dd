//! In-place complex FFT for arbitrary lengths.
//!
//! Forward transform uses the `e^{-2 pi i k t / m}` sign convention; the
//! inverse scales by `1/m`. Power-of-two lengths run an iterative radix-2
//! decimation-in-time pass; other lengths go through Bluestein's chirp-z
//! reduction to a power-of-two convolution.

use alloc::vec;
use alloc::vec::Vec;

use crate::Complex64;

/// Forward DFT: `X_t = sum_k x_k e^{-2 pi i k t / m}`.
pub fn fft(buf: &mut [Complex64]) {
    transform(buf, false);
}

/// Inverse DFT: `x_k = (1/m) sum_t X_t e^{+2 pi i k t / m}`.
pub fn ifft(buf: &mut [Complex64]) {
    transform(buf, true);
    let scale = 1.0 / buf.len() as f64;
    for v in buf.iter_mut() {
        *v *= scale;
    }
}

/// Forward DFT of a real vector.
pub fn fft_real(input: &[f64]) -> Vec<Complex64> {
    let mut buf: Vec<Complex64> = input.iter().map(|&x| Complex64::new(x, 0.0)).collect();
    fft(&mut buf);
    buf
}

fn transform(buf: &mut [Complex64], inverse: bool) {
    let m = buf.len();
    if m <= 1 {
        return;
    }
    if m.is_power_of_two() {
        radix2(buf, inverse);
    } else {
        bluestein(buf, inverse);
    }
}

fn radix2(buf: &mut [Complex64], inverse: bool) {
    let m = buf.len();
    let levels = m.trailing_zeros();

    // Bit-reversal permutation.
    for i in 0..m {
        let j = i.reverse_bits() >> (usize::BITS - levels);
        if j > i {
            buf.swap(i, j);
        }
    }

    let sign = if inverse { 1.0 } else { -1.0 };
    let mut size = 2;
    while size <= m {
        let half = size / 2;
        let step = sign * core::f64::consts::TAU / size as f64;
        for start in (0..m).step_by(size) {
            for k in 0..half {
                let angle = step * k as f64;
                let w = Complex64::new(libm::cos(angle), libm::sin(angle));
                let t = buf[start + k + half] * w;
                let u = buf[start + k];
                buf[start + k] = u + t;
                buf[start + k + half] = u - t;
            }
        }
        size *= 2;
    }
}

/// Chirp-z: X_t = w^{t^2/2} sum_k (x_k w^{k^2/2}) w^{-(t-k)^2/2}, a circular
/// convolution evaluated at any power-of-two length >= 2m - 1.
fn bluestein(buf: &mut [Complex64], inverse: bool) {
    let m = buf.len();
    let sign = if inverse { 1.0 } else { -1.0 };
    let conv_len = (2 * m - 1).next_power_of_two();

    // k^2 mod 2m keeps the chirp angle bounded.
    let chirp: Vec<Complex64> = (0..m)
        .map(|k| {
            let sq = (k * k) % (2 * m);
            let angle = sign * core::f64::consts::PI * sq as f64 / m as f64;
            Complex64::new(libm::cos(angle), libm::sin(angle))
        })
        .collect();

    let mut a = vec![Complex64::new(0.0, 0.0); conv_len];
    for k in 0..m {
        a[k] = buf[k] * chirp[k];
    }
    let mut b = vec![Complex64::new(0.0, 0.0); conv_len];
    b[0] = chirp[0].conj();
    for k in 1..m {
        let c = chirp[k].conj();
        b[k] = c;
        b[conv_len - k] = c;
    }

    radix2(&mut a, false);
    radix2(&mut b, false);
    for (x, y) in a.iter_mut().zip(b.iter()) {
        *x *= *y;
    }
    radix2(&mut a, true);
    let scale = 1.0 / conv_len as f64;
    for (t, out) in buf.iter_mut().enumerate() {
        *out = a[t] * chirp[t] * scale;
    }
}
