use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// A parameter lies outside the domain of the operation.
    #[error("`{name}` = {value} is out of range: {requirement}")]
    Domain {
        name: &'static str,
        value: f64,
        requirement: &'static str,
    },

    /// A simulated round produced a non-finite or otherwise invalid value.
    #[error("numerical failure at round {round}: {detail}")]
    Round { round: usize, detail: String },

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("{0}")]
    Input(String),

    #[error("{0}")]
    Analysis(String),
}

impl Error {
    pub(crate) fn domain(name: &'static str, value: f64, requirement: &'static str) -> Self {
        Error::Domain {
            name,
            value,
            requirement,
        }
    }

    /// True for failures of the numerics rather than of the inputs.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::Round { .. } | Error::Numerical(_) | Error::Analysis(_)
        )
    }
}
