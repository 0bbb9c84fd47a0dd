//! Error type shared by all modules.

use core::fmt;

/// Domain errors. Every fallible operation in this crate returns one of these.
#[derive(Debug, Clone, PartialEq)]
pub enum RtfError {
    /// Parameter arrays have inconsistent or empty shapes.
    InvalidShape(&'static str),
    /// A coefficient or sample is NaN or infinite.
    NonFinite(&'static str),
    /// `series_expand` called on truncated-form parameters.
    TruncatedFormNotExpandable,
    /// Transfer-function evaluation requested at (or too close to) a pole.
    PoleAtEvaluationPoint,
    /// Kernel length is not a multiple of the fold period.
    LengthMismatch,
    /// Kernel generation requires `len >= n + 1`.
    LengthTooShort,
    /// The denominator spectrum has a zero bin: a pole sits on a root of unity.
    DenominatorZeroOnUnitCircle,
    /// Signal/kernel channel counts differ.
    ChannelMismatch,
    /// Operation requires corrected-form numerator coefficients.
    NeedsCorrectedNumerator,
    /// State vector length does not match the system order.
    StateSizeMismatch,
    /// `I - A^l` is singular or has condition number above 1e12.
    NearSingularCorrection,
    /// Denominator roots closer than the separation tolerance.
    RepeatedPoles,
    /// Simultaneous root iteration failed to converge.
    RootFindingDiverged,
    /// Modal kernel has imaginary residue beyond tolerance.
    NonRealKernel,
    /// Montel projection of an all-zero vector.
    ZeroVector,
    /// FIR initialization with more than `n + 1` taps.
    FirTooLong,
    /// A gradient is NaN or infinite.
    NonFiniteGradient,
    /// Finite-difference check hit a non-finite objective value.
    NonFiniteObjective,
    /// Training loss exceeded the divergence threshold.
    TrainingDiverged,
}

impl fmt::Display for RtfError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::InvalidShape(what) => write!(f, "invalid shape: {what}"),
            Self::NonFinite(what) => write!(f, "non-finite value in {what}"),
            Self::TruncatedFormNotExpandable => {
                write!(f, "truncated-form numerator cannot be series-expanded; correct it first")
            }
            Self::PoleAtEvaluationPoint => write!(f, "denominator vanishes at evaluation point"),
            Self::LengthMismatch => write!(f, "kernel length is not a multiple of the period"),
            Self::LengthTooShort => write!(f, "kernel length must be at least n + 1"),
            Self::DenominatorZeroOnUnitCircle => {
                write!(f, "denominator spectrum has a zero bin (pole on a root of unity)")
            }
            Self::ChannelMismatch => write!(f, "channel counts differ"),
            Self::NeedsCorrectedNumerator => write!(f, "operation requires corrected-form numerator"),
            Self::StateSizeMismatch => write!(f, "state vector length does not match system order"),
            Self::NearSingularCorrection => {
                write!(f, "numerator correction system is singular or ill-conditioned (> 1e12)")
            }
            Self::RepeatedPoles => write!(f, "denominator roots closer than separation tolerance"),
            Self::RootFindingDiverged => write!(f, "polynomial root iteration did not converge"),
            Self::NonRealKernel => write!(f, "modal kernel has non-negligible imaginary part"),
            Self::ZeroVector => write!(f, "cannot project an all-zero coefficient vector"),
            Self::FirTooLong => write!(f, "FIR initialization longer than n + 1 taps"),
            Self::NonFiniteGradient => write!(f, "non-finite gradient"),
            Self::NonFiniteObjective => write!(f, "non-finite objective value"),
            Self::TrainingDiverged => write!(f, "training diverged"),
        }
    }
}
