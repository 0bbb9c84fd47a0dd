//! Stability tests, Montel projection, and initialization schemes.
//!
//! A rational transfer function is stable when every root of its denominator
//! `z^n + a1 z^{n-1} + ... + an` lies strictly inside the unit circle.
//! [`jury_stable`] decides this without root finding via the Schur-Cohn
//! step-down recursion; [`montel_project`] maps an arbitrary raw vector into
//! the conservative one-norm region `sum |ak| <= 1`, which always yields a
//! stable denominator but covers only a subset of the stable coefficient
//! space.

use alloc::vec;
use alloc::vec::Vec;

use crate::convert::denominator_roots;
use crate::error::RtfError;
use crate::params::{NumeratorForm, RtfParams};
use crate::rng::SplitMix64;
use crate::Result;

/// Stability diagnosis of one denominator row.
#[derive(Debug, Clone)]
pub struct StabilityReport {
    pub jury_stable: bool,
    /// Pole magnitudes, sorted descending.
    pub pole_radii: Vec<f64>,
    /// `1 - sum |ak|`; nonnegative inside the Montel region.
    pub montel_margin: f64,
}

/// Builds the full report for one denominator row.
pub fn stability_report(a: &[f64]) -> Result<StabilityReport> {
    Ok(StabilityReport {
        jury_stable: jury_stable(a),
        pole_radii: pole_radii(a)?,
        montel_margin: 1.0 - a.iter().map(|v| v.abs()).sum::<f64>(),
    })
}

/// True iff all roots of `z^n + a1 z^{n-1} + ... + an` lie strictly inside
/// the unit circle. Schur-Cohn step-down: the monic polynomial is stable iff
/// every reflection coefficient (its constant term) has magnitude < 1 and the
/// degree-reduced polynomial is stable. Boundary cases within 1e-12 count as
/// unstable.
pub fn jury_stable(a: &[f64]) -> bool {
    // coeffs[k] multiplies z^{m-k}; coeffs[0] = 1 (monic).
    let mut coeffs: Vec<f64> = Vec::with_capacity(a.len() + 1);
    coeffs.push(1.0);
    coeffs.extend_from_slice(a);
    if coeffs.iter().any(|v| !v.is_finite()) {
        return false;
    }

    let mut m = a.len();
    while m > 0 {
        let k = coeffs[m]; // constant term of the monic degree-m polynomial
        if k.abs() >= 1.0 - 1e-12 {
            return false;
        }
        let scale = 1.0 / (1.0 - k * k);
        let reduced: Vec<f64> =
            (0..m).map(|j| (coeffs[j] - k * coeffs[m - j]) * scale).collect();
        coeffs = reduced; // reduced[0] == 1 exactly by construction
        m -= 1;
    }
    true
}

/// Pole magnitudes sorted descending. Repeated roots are not an error here.
pub fn pole_radii(a: &[f64]) -> Result<Vec<f64>> {
    let mut radii: Vec<f64> = denominator_roots(a)?.iter().map(|z| z.norm()).collect();
    radii.sort_by(|x, y| y.partial_cmp(x).unwrap());
    Ok(radii)
}

/// Montel projection: divide all `n + 1` raw values by their one-norm and
/// keep the first `n`. The result satisfies `sum |ak| <= 1`, hence is stable
/// (strictly, whenever the dropped component is nonzero).
pub fn montel_project(raw: &[f64]) -> Result<Vec<f64>> {
    if raw.len() < 2 {
        return Err(RtfError::InvalidShape("montel_project needs n + 1 >= 2 values"));
    }
    let one_norm: f64 = raw.iter().map(|v| v.abs()).sum();
    if one_norm == 0.0 {
        return Err(RtfError::ZeroVector);
    }
    Ok(raw[..raw.len() - 1].iter().map(|v| v / one_norm).collect())
}

/// Initialization schemes for RTF parameter banks.
#[derive(Debug, Clone)]
pub enum InitScheme {
    /// `a = b = 0`, `h0 = 1`: the identity impulse, and the one-norm
    /// minimizer of the Montel constraint.
    Zero,
    /// Exact FIR embedding of taps `k0..k_{m-1}`: `h0 = k0`, `b_i = k_i`,
    /// `a = 0`. Requires at most `n + 1` taps.
    Fir(Vec<f64>),
    /// Uniform draws on [0, 1) for all coefficient arrays, denominators
    /// projected into the Montel region.
    UniformMontel { seed: u64 },
    /// Uniform draws on `(-s, s)` with `s = sqrt(6 / (n + n))` per
    /// coefficient array; `h0 = 1`. Stability not guaranteed.
    Xavier { seed: u64 },
}

/// Builds a corrected-form parameter bank of `d` channels sharing `m`
/// denominator rows. Random schemes are deterministic under their seed.
pub fn initialize(scheme: InitScheme, n: usize, d: usize, m: usize) -> Result<RtfParams> {
    if n == 0 || d == 0 || m == 0 || d % m != 0 {
        return Err(RtfError::InvalidShape("initialize requires n, d >= 1 and m dividing d"));
    }
    let (a, b, h0) = match scheme {
        InitScheme::Zero => (vec![vec![0.0; n]; m], vec![vec![0.0; n]; d], vec![1.0; d]),
        InitScheme::Fir(taps) => {
            if taps.len() > n + 1 {
                return Err(RtfError::FirTooLong);
            }
            let h0 = taps.first().copied().unwrap_or(0.0);
            let mut b = vec![0.0; n];
            for (i, &tap) in taps.iter().skip(1).enumerate() {
                b[i] = tap;
            }
            (vec![vec![0.0; n]; m], vec![b; d], vec![h0; d])
        }
        InitScheme::UniformMontel { seed } => {
            let mut rng = SplitMix64::new(seed);
            let a = (0..m)
                .map(|_| {
                    let raw: Vec<f64> = (0..n + 1).map(|_| rng.next_f64()).collect();
                    montel_project(&raw)
                })
                .collect::<Result<Vec<_>>>()?;
            let b = (0..d).map(|_| (0..n).map(|_| rng.next_f64()).collect()).collect();
            let h0 = (0..d).map(|_| rng.next_f64()).collect();
            (a, b, h0)
        }
        InitScheme::Xavier { seed } => {
            let mut rng = SplitMix64::new(seed);
            let s = libm::sqrt(6.0 / (n + n) as f64);
            let a = (0..m).map(|_| (0..n).map(|_| rng.uniform(-s, s)).collect()).collect();
            let b = (0..d).map(|_| (0..n).map(|_| rng.uniform(-s, s)).collect()).collect();
            (a, b, vec![1.0; d])
        }
    };
    RtfParams::new(a, b, h0, NumeratorForm::Corrected, None)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::params::series_expand;
    use alloc::vec;

    #[test]
    fn jury_scalar_cases() {
        assert!(jury_stable(&[0.5]));
        assert!(!jury_stable(&[1.5]));
        assert!(!jury_stable(&[1.0])); // boundary is unstable
    }

    #[test]
    fn jury_conjugate_pair_cases() {
        assert!(jury_stable(&[-1.0, 0.9]));
        assert!(!jury_stable(&[-1.0, 1.1]));
    }

    #[test]
    fn jury_agrees_with_root_radii() {
        let mut rng = SplitMix64::new(101);
        for _ in 0..200 {
            let n = 1 + (rng.next_u64() % 8) as usize;
            let a: Vec<f64> = (0..n).map(|_| rng.uniform(-1.2, 1.2)).collect();
            let radii = match pole_radii(&a) {
                Ok(r) => r,
                Err(_) => continue,
            };
            let by_roots = radii[0] < 1.0 - 1e-9;
            let clearly_unstable = radii[0] > 1.0 + 1e-9;
            let jury = jury_stable(&a);
            if by_roots {
                assert!(jury, "stable by roots but jury says no: {a:?}");
            }
            if clearly_unstable {
                assert!(!jury, "unstable by roots but jury says yes: {a:?}");
            }
        }
    }

    #[test]
    fn montel_known_projections() {
        assert_eq!(montel_project(&[1.0, 1.0, 1.0, 1.0]).unwrap(), vec![0.25, 0.25, 0.25]);
        assert_eq!(montel_project(&[0.0, 0.0, 0.0, 3.0]).unwrap(), vec![0.0, 0.0, 0.0]);
        assert_eq!(montel_project(&[-2.0, 0.0, 0.0, 2.0]).unwrap(), vec![-0.5, 0.0, 0.0]);
        assert_eq!(montel_project(&[0.0, 0.0]), Err(RtfError::ZeroVector));
    }

    #[test]
    fn montel_outputs_are_jury_stable() {
        let mut rng = SplitMix64::new(77);
        for _ in 0..500 {
            let n = 1 + (rng.next_u64() % 12) as usize;
            let raw: Vec<f64> = (0..n + 1).map(|_| rng.uniform(-5.0, 5.0)).collect();
            if raw.iter().all(|&v| v == 0.0) {
                continue;
            }
            let a = montel_project(&raw).unwrap();
            assert!(a.iter().map(|v| v.abs()).sum::<f64>() <= 1.0 + 1e-15);
            // Strict interior whenever the dropped slot carried mass.
            if raw[n] != 0.0 {
                assert!(jury_stable(&a), "montel output not stable: {a:?}");
            }
        }
    }

    #[test]
    fn montel_region_is_strict_subset_of_stable() {
        let a = [-1.0, 0.9];
        assert!(jury_stable(&a));
        assert!(a.iter().map(|v| v.abs()).sum::<f64>() > 1.0);
    }

    #[test]
    fn order_two_analytic_region() {
        // For conjugate-root denominators (a1^2 < 4 a2), stability is a2 < 1.
        let mut a1 = -2.0f64;
        while a1 <= 2.0 {
            let mut a2 = -1.5f64;
            while a2 <= 1.5 {
                if a1 * a1 < 4.0 * a2 {
                    let expected = a2 < 1.0 - 1e-9;
                    let boundary = (a2 - 1.0).abs() <= 1e-9;
                    if !boundary {
                        assert_eq!(
                            jury_stable(&[a1, a2]),
                            expected,
                            "a1={a1} a2={a2}"
                        );
                    }
                }
                a2 += 0.01;
            }
            a1 += 0.01;
        }
    }

    #[test]
    fn zero_init_is_delta_and_montel_optimal() {
        let p = initialize(InitScheme::Zero, 4, 2, 1).unwrap();
        let k = series_expand(&p, 6).unwrap();
        for row in &k.values {
            assert_eq!(row[0], 1.0);
            assert!(row[1..].iter().all(|&v| v == 0.0));
        }
        assert_eq!(p.a[0].iter().map(|v| v.abs()).sum::<f64>(), 0.0);
    }

    #[test]
    fn fir_init_embeds_taps_exactly() {
        let p = initialize(InitScheme::Fir(vec![2.0, 3.0, 4.0]), 2, 1, 1).unwrap();
        let k = series_expand(&p, 5).unwrap();
        assert_eq!(k.values[0], vec![2.0, 3.0, 4.0, 0.0, 0.0]);
        assert_eq!(
            initialize(InitScheme::Fir(vec![1.0; 5]), 2, 1, 1),
            Err(RtfError::FirTooLong)
        );
    }

    #[test]
    fn uniform_montel_seeded_is_stable_and_deterministic() {
        let p = initialize(InitScheme::UniformMontel { seed: 7 }, 8, 1, 1).unwrap();
        assert!(jury_stable(&p.a[0]));
        let q = initialize(InitScheme::UniformMontel { seed: 7 }, 8, 1, 1).unwrap();
        assert_eq!(p, q);
    }

    #[test]
    fn xavier_scale_and_determinism() {
        let n = 8;
        let p = initialize(InitScheme::Xavier { seed: 3 }, n, 2, 2).unwrap();
        let s = libm::sqrt(6.0 / (n + n) as f64);
        for v in p.a.iter().chain(p.b.iter()).flatten() {
            assert!(v.abs() < s);
        }
        assert_eq!(p.h0, vec![1.0, 1.0]);
        let q = initialize(InitScheme::Xavier { seed: 3 }, n, 2, 2).unwrap();
        assert_eq!(p, q);
    }
}
