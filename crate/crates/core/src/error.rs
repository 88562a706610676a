use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter `{field}`: {reason}")]
    Invalid { field: String, reason: String },

    #[error("dimension mismatch for `{field}`: expected {expected}, found {found}")]
    Dimension {
        field: String,
        expected: usize,
        found: usize,
    },

    #[error("integration diverged at t = {time} in region {region}")]
    IntegrationDiverged { time: f64, region: usize },

    #[error("logarithm undefined: s_{region}({time}) = {value} is not positive")]
    Domain { time: f64, region: usize, value: f64 },

    #[error("action {value} for region {region} leaves the admissible range [{lo}, {hi})")]
    OutOfRange {
        region: usize,
        value: f64,
        lo: f64,
        hi: f64,
    },

    #[error("bound not applicable for region {region}: denominator {denominator} is not negative")]
    ConditionViolated { region: usize, denominator: f64 },

    #[error("transmission matrix is singular")]
    Singular,

    #[error("profile space has {required} profiles, budget is {budget}")]
    BudgetExceeded { required: u128, budget: u128 },

    #[error("no pure Nash equilibrium on the action grid")]
    NoEquilibrium,

    #[error("degenerate scenario: {0} is not positive")]
    Degenerate(&'static str),

    #[error("scenario parse error: {0}")]
    Parse(#[from] serde_json::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn invalid(field: impl Into<String>, reason: impl Into<String>) -> Self {
        Error::Invalid {
            field: field.into(),
            reason: reason.into(),
        }
    }
}
