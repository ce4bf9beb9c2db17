use std::fmt;

use thiserror::Error;

/// Position of a problem inside a delimited text input.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Location {
    pub file: Option<String>,
    /// 1-based line number.
    pub line: usize,
    /// 1-based column (field) number, when the problem is tied to one field.
    pub column: Option<usize>,
}

impl fmt::Display for Location {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let Some(file) = &self.file {
            write!(f, "{file}:")?;
        }
        write!(f, "line {}", self.line)?;
        if let Some(col) = self.column {
            write!(f, ", column {col}")?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("no data")]
    NoData,

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("sample value {value} lies outside the bin grid [{lower}, {upper}]")]
    OutsideGrid { value: f64, lower: f64, upper: f64 },

    #[error(
        "grid too short: only {captured:.9} of the stationary mass lies below r_max; \
         try r_max >= {suggested_r_max}"
    )]
    GridTooShort { captured: f64, suggested_r_max: f64 },

    #[error("time step {dt} violates the stability bound dt <= {bound}")]
    Unstable { dt: f64, bound: f64 },

    #[error("no power-law tail (pure exponential regime)")]
    NoPowerLawTail,

    #[error("not exponential in window (log-linear slope {slope})")]
    NotExponential { slope: f64 },

    #[error("not a power law in window (log-log slope {slope})")]
    NotPowerLaw { slope: f64 },

    #[error("window [{lower}, {upper}] holds {found} usable points, need at least {needed}")]
    InsufficientPoints { lower: f64, upper: f64, needed: usize, found: usize },

    #[error("no crossover between exponential and power-law fits: {0}; revise the fit windows")]
    NoCrossover(String),

    #[error("bulk temperature exceeds mean (T = {temperature}, mean = {mean})")]
    TemperatureExceedsMean { temperature: f64, mean: f64 },

    #[error("total is zero")]
    ZeroTotal,

    #[error("{location}: {message}")]
    Parse { location: Location, message: String },

    #[error("duplicate country code {code:?} in year {year:?}")]
    DuplicateCode { code: String, year: Option<i32> },

    #[error("i/o error on {path}: {message}")]
    Io { path: String, message: String },
}

pub type Result<T> = std::result::Result<T, Error>;
