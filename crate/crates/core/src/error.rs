use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter `{name}` = {value}: {reason}")]
    Parameter {
        name: &'static str,
        value: f64,
        reason: &'static str,
    },

    #[error("domain error: {0}")]
    Domain(String),

    /// A principal-branch power was asked for at a point where its base
    /// leaves the right half-plane.
    #[error("branch safety violated at radius {radius}: {detail}; lower the contour radius")]
    BranchSafety { radius: f64, detail: String },

    #[error("malformed descriptor near `{token}`: {reason}")]
    Descriptor { token: String, reason: String },

    #[error("sampling overflow: {0}")]
    Overflow(String),

    #[error("i/o error: {0}")]
    Io(String),
}

impl Error {
    pub(crate) fn param(name: &'static str, value: f64, reason: &'static str) -> Self {
        Error::Parameter {
            name,
            value,
            reason,
        }
    }

    pub(crate) fn descriptor(token: impl Into<String>, reason: impl Into<String>) -> Self {
        Error::Descriptor {
            token: token.into(),
            reason: reason.into(),
        }
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
