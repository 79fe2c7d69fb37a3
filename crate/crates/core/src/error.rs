use thiserror::Error;

/// Errors shared across the physics, kinematics, simulation and analysis
/// modules. Configuration problems carry the offending field name so callers
/// can report them precisely; everything else is a numerical domain error.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("wind speed {speed_mps} m/s is outside [0, c) with c = {c_mps} m/s")]
    SuperluminalWind { speed_mps: f64, c_mps: f64 },

    #[error("length must be positive, got {value} m")]
    NonPositiveLength { value: f64 },

    #[error("wind speed is zero: no finite apparatus produces an orientation shift")]
    ZeroWindSpeed,

    #[error("phase shift target must be positive, got {value} rad")]
    NonPositiveShift { value: f64 },

    #[error("wind direction has horizontal projection below 1e-12 (wind along local vertical)")]
    DegenerateWindProjection,

    #[error("direction vector has norm {norm}, expected unit norm within 1e-9")]
    NotUnitVector { norm: f64 },

    #[error("stage angle {angle_rad} rad is outside {{0, pi/2}} required by aligned mode")]
    StageOutsideAlignedMode { angle_rad: f64 },

    #[error("tally has no post-selected coincidences")]
    EmptyTally,

    #[error("proportions are equal; no sample size separates them")]
    EqualProportions,

    #[error("proportion {value} is outside the open interval (0, 1)")]
    InvalidProportion { value: f64 },

    #[error("invalid configuration: field `{field}`: {message}")]
    InvalidConfig { field: String, message: String },
}

impl Error {
    pub fn invalid_config(field: &str, message: impl Into<String>) -> Self {
        Error::InvalidConfig {
            field: field.to_string(),
            message: message.into(),
        }
    }

    /// True for errors that indicate a bad configuration rather than a
    /// numerical domain problem hit at run time.
    pub fn is_config_error(&self) -> bool {
        matches!(self, Error::InvalidConfig { .. })
    }
}

pub type Result<T> = std::result::Result<T, Error>;
