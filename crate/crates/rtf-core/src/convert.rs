//! Conversions among dense state-space, transfer-function, and modal
//! (diagonal) representations.
//!
//! Characteristic polynomials come from the Faddeev-LeVerrier trace
//! recurrence rather than an eigensolver; denominator roots come from
//! Durand-Kerner simultaneous iteration. Coefficient conditioning degrades
//! past n of roughly 64; [`CharpolyResult::conditioning_warning`] flags it.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::RtfError;
use crate::linalg::Matrix;
use crate::params::{Kernel, NumeratorForm, RtfParams};
use crate::statespace::DenseSsm;
use crate::{Complex64, Result};

/// Minimum pole separation accepted by the residue formula.
pub const POLE_SEPARATION_TOL: f64 = 1e-8;

/// First-order partial fraction decomposition: residue/pole pairs plus
/// feedthrough.
#[derive(Debug, Clone)]
pub struct ModalParams {
    pub residues: Vec<Complex64>,
    pub poles: Vec<Complex64>,
    pub h0: f64,
}

impl ModalParams {
    pub fn state_size(&self) -> usize {
        self.poles.len()
    }
}

/// Characteristic polynomial with a conditioning note.
#[derive(Debug, Clone)]
pub struct CharpolyResult {
    /// Monic coefficients in descending powers: `[1, c1, ..., cn]`.
    pub coeffs: Vec<f64>,
    /// Set when n > 64, where coefficient conditioning degrades.
    pub conditioning_warning: bool,
}

/// Coefficients of `det(zI - A)` via the Faddeev-LeVerrier recurrence:
/// `M_1 = A, c_1 = -tr(M_1)`, `M_{k+1} = A (M_k + c_k I)`,
/// `c_{k+1} = -tr(M_{k+1}) / (k+1)`.
pub fn charpoly(a: &Matrix) -> CharpolyResult {
    let n = a.rows;
    debug_assert_eq!(a.cols, n);
    let mut coeffs = Vec::with_capacity(n + 1);
    coeffs.push(1.0);
    let mut m = a.clone();
    for k in 1..=n {
        let c = -m.trace() / k as f64;
        coeffs.push(c);
        if k < n {
            m.add_scaled_identity(c);
            m = a.matmul(&m);
        }
    }
    CharpolyResult { coeffs, conditioning_warning: n > 64 }
}

/// Transfer function of a dense SISO realization, as corrected-form params.
///
/// `a` is the tail of `charpoly(A)`; `b` is the tail of
/// `charpoly(A - B C) - charpoly(A)`, using the matrix-determinant identity
/// `C (zI - A)^{-1} B = [det(zI - A + B C) - det(zI - A)] / det(zI - A)`.
pub fn ssm_to_tf(ssm: &DenseSsm) -> Result<RtfParams> {
    let n = ssm.state_size();
    let den = charpoly(&ssm.a);

    let mut shifted = ssm.a.clone();
    for i in 0..n {
        for j in 0..n {
            let v = shifted.get(i, j) - ssm.b[i] * ssm.c[j];
            shifted.set(i, j, v);
        }
    }
    let num = charpoly(&shifted);

    let a_tail = den.coeffs[1..].to_vec();
    let b_tail: Vec<f64> =
        num.coeffs[1..].iter().zip(den.coeffs[1..].iter()).map(|(x, y)| x - y).collect();
    RtfParams::siso(a_tail, b_tail, ssm.h0)
}

/// Durand-Kerner simultaneous iteration on the monic polynomial
/// `z^n + a1 z^{n-1} + ... + an`. Initial guesses sit on a circle of radius
/// `1 + max|ak|` with a 0.4 rad offset to break symmetry; convergence is a
/// 1e-13 step norm within 500 iterations.
pub fn denominator_roots(a: &[f64]) -> Result<Vec<Complex64>> {
    let n = a.len();
    if n == 0 {
        return Err(RtfError::InvalidShape("empty polynomial"));
    }
    if n == 1 {
        return Ok(vec![Complex64::new(-a[0], 0.0)]);
    }

    let radius = 1.0 + a.iter().fold(0.0f64, |acc, v| acc.max(v.abs()));
    let mut roots: Vec<Complex64> = (0..n)
        .map(|k| {
            let angle = core::f64::consts::TAU * k as f64 / n as f64 + 0.4;
            Complex64::new(radius * libm::cos(angle), radius * libm::sin(angle))
        })
        .collect();

    let eval = |z: Complex64| -> Complex64 {
        let mut acc = Complex64::new(1.0, 0.0);
        for &coeff in a {
            acc = acc * z + coeff;
        }
        acc
    };

    for _ in 0..500 {
        let mut step_norm = 0.0f64;
        for i in 0..n {
            let mut denom = Complex64::new(1.0, 0.0);
            for j in 0..n {
                if j != i {
                    denom *= roots[i] - roots[j];
                }
            }
            if denom.norm() == 0.0 {
                // Coincident iterates; nudge apart.
                roots[i] += Complex64::new(1e-6, 1e-6);
                continue;
            }
            let delta = eval(roots[i]) / denom;
            roots[i] -= delta;
            step_norm = step_norm.max(delta.norm());
        }
        if step_norm < 1e-13 {
            // Residual check on the converged set.
            for &root in &roots {
                let bound = 1e-12 * libm::pow(root.norm().max(1.0), n as f64).max(1.0);
                if eval(root).norm() > bound * 1e2 {
                    return Err(RtfError::RootFindingDiverged);
                }
            }
            return Ok(roots);
        }
    }
    Err(RtfError::RootFindingDiverged)
}

/// Modal decomposition of one channel: poles from the denominator roots,
/// residues `r_i = N(lambda_i) / D'(lambda_i)` with
/// `N(z) = b1 z^{n-1} + ... + bn` and `D(z) = z^n + a1 z^{n-1} + ... + an`.
pub fn tf_to_modal(params: &RtfParams, channel: usize) -> Result<ModalParams> {
    if params.numerator_form() == NumeratorForm::Truncated {
        return Err(RtfError::NeedsCorrectedNumerator);
    }
    let a = params.a_for_channel(channel);
    let b = &params.b[channel];
    let n = a.len();
    let poles = denominator_roots(a)?;

    for i in 0..n {
        for j in i + 1..n {
            if (poles[i] - poles[j]).norm() <= POLE_SEPARATION_TOL {
                return Err(RtfError::RepeatedPoles);
            }
        }
    }

    let residues = poles
        .iter()
        .map(|&z| {
            // Horner for N(z) and D'(z).
            let mut num = Complex64::new(0.0, 0.0);
            for &coeff in b.iter() {
                num = num * z + coeff;
            }
            let mut dprime = Complex64::new(n as f64, 0.0);
            let mut power = n as f64;
            for &coeff in a.iter().take(n - 1) {
                power -= 1.0;
                dprime = dprime * z + coeff * power;
            }
            num / dprime
        })
        .collect();

    Ok(ModalParams { residues, poles, h0: params.h0[channel] })
}

/// Kernel of a modal system: `h_0 = h0`,
/// `h_t = Re sum_i r_i lambda_i^{t-1}` for `t >= 1`. Errors when the
/// imaginary residual exceeds `1e-9 * ||h||` (non-conjugate-paired input).
pub fn modal_kernel(modal: &ModalParams, length: usize) -> Result<Kernel> {
    if length == 0 {
        return Err(RtfError::InvalidShape("length must be positive"));
    }
    let n = modal.state_size();
    let mut h = vec![0.0; length];
    h[0] = modal.h0;
    let mut powers: Vec<Complex64> = vec![Complex64::new(1.0, 0.0); n];
    let mut imag_max = 0.0f64;
    let mut norm_sq = modal.h0 * modal.h0;
    for sample in h.iter_mut().skip(1) {
        let mut acc = Complex64::new(0.0, 0.0);
        for (power, residue) in powers.iter_mut().zip(modal.residues.iter()) {
            acc += residue * *power;
        }
        for (power, pole) in powers.iter_mut().zip(modal.poles.iter()) {
            *power *= pole;
        }
        *sample = acc.re;
        imag_max = imag_max.max(acc.im.abs());
        norm_sq += acc.re * acc.re;
    }
    if imag_max > 1e-9 * libm::sqrt(norm_sq).max(1e-30) {
        return Err(RtfError::NonRealKernel);
    }
    Kernel::new(vec![h])
}
