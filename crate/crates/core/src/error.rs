use thiserror::Error;

/// Errors raised by the simulator. Each variant names the physical or
/// numerical invariant that was violated.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("cutoff n_max={n_max} too small: truncated tail mass {tail:.3e} exceeds tolerance {tol:.3e}")]
    CutoffTooSmall { n_max: usize, tail: f64, tol: f64 },

    #[error("unphysical squeezing: lambda={lambda} must satisfy 0 <= lambda < 1")]
    UnphysicalSqueezing { lambda: f64 },

    #[error(
        "post-selection nearly orthogonal to pre-selection: |<post|pre>|={overlap:.3e} below threshold {threshold:.3e}"
    )]
    NearOrthogonalPostSelection { overlap: f64, threshold: f64 },

    #[error("no closed-form weak value for this scheme: {0}")]
    UnsupportedScheme(String),

    #[error("coupling kappa_T={kappa_t} must be positive for the success condition")]
    NonPositiveCoupling { kappa_t: f64 },

    #[error("post-selection event has vanishing probability {prob:.3e}")]
    VanishingPostSelection { prob: f64 },

    #[error("predicted output is unphysical: lambda^2 exp(2 kappa_T Im O_W) = {growth} >= 1")]
    UnphysicalOutput { growth: f64 },

    #[error("state not normalized: squared norm {norm_sqr}")]
    NotNormalized { norm_sqr: f64 },

    #[error("invalid parameter {name}={value}: {reason}")]
    InvalidParameter { name: &'static str, value: f64, reason: &'static str },

    #[error("cutoff mismatch: {left} vs {right}")]
    CutoffMismatch { left: usize, right: usize },
}

impl Error {
    /// True for errors that signal a physical regime problem (divergent
    /// output or an impossible post-selection) rather than malformed input.
    pub fn is_physical(&self) -> bool {
        matches!(
            self,
            Error::UnphysicalOutput { .. }
                | Error::VanishingPostSelection { .. }
                | Error::NearOrthogonalPostSelection { .. }
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
