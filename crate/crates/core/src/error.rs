use thiserror::Error;

pub type Result<T, E = RwaError> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum RwaError {
    /// The undamped linear response has a pole at the natural frequency.
    #[error("resonance singularity at omega = {omega} (undamped response diverges)")]
    ResonanceSingularity { omega: f64 },

    #[error("degenerate cubic: c3 = c1 = 0 with c0 = {c0}")]
    DegenerateCubic { c0: f64 },

    #[error("numerical blowup at omega = {omega}, t = {t:.6}: |x| = {x:.3e} exceeds bound")]
    NumericalBlowup { omega: f64, t: f64, x: f64 },

    #[error("reference amplitude is zero")]
    ZeroReference,

    #[error("no oracle jump frequency for F0 = {f0}")]
    MissingOracle { f0: f64 },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}
