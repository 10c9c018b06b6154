use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// An argument lies outside the mathematical domain of the function.
    #[error("domain error in {func}: {detail}")]
    Domain { func: &'static str, detail: String },

    /// An argument lies outside the supported (implemented) range.
    #[error("{what} = {value} is outside the supported range {range}")]
    OutOfRange { what: &'static str, value: f64, range: &'static str },

    #[error("invalid parameter {name}: {detail}")]
    InvalidParameter { name: &'static str, detail: String },

    #[error("resonance condition violated: bias {bias} != k = {k}")]
    OffResonance { bias: f64, k: u32 },

    #[error("Fock truncation n_max = {n_max} is inadequate: {detail}")]
    TruncationInadequate { n_max: usize, detail: String },

    #[error("truncation leak: weight {weight:e} in the top of the Fock basis (n_max = {n_max})")]
    TruncationLeak { n_max: usize, weight: f64 },

    #[error("norm drift {drift:e} at t = {time}")]
    NormDrift { time: f64, drift: f64 },

    #[error("could not identify the GRWA pair: captured weight {weight:.3} < {threshold}")]
    PairIdentification { weight: f64, threshold: f64 },

    #[error("fit objective is flat over [{lo}, {hi}]")]
    FitDegenerate { lo: f64, hi: f64 },

    #[error("no spectral peak: peak {peak:e} vs median {median:e}")]
    NoPeak { peak: f64, median: f64 },

    #[error("eigendecomposition failed: {0}")]
    Eigen(String),
}

impl Error {
    pub(crate) fn domain(func: &'static str, detail: impl Into<String>) -> Self {
        Error::Domain { func, detail: detail.into() }
    }

    pub(crate) fn invalid(name: &'static str, detail: impl Into<String>) -> Self {
        Error::InvalidParameter { name, detail: detail.into() }
    }

    /// True for failures of the numerics (as opposed to bad inputs).
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::TruncationInadequate { .. }
                | Error::TruncationLeak { .. }
                | Error::NormDrift { .. }
                | Error::PairIdentification { .. }
                | Error::FitDegenerate { .. }
                | Error::NoPeak { .. }
                | Error::Eigen(_)
        )
    }
}
