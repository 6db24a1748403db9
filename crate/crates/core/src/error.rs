use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("profile rejected at theta={theta}: {reason}")]
    ProfileRejected { theta: f64, reason: String },

    #[error("invalid profile: {0}")]
    InvalidProfile(String),

    #[error("z={z} outside the body's axial range [{z_min}, {z_max}]")]
    OutOfRange { z: f64, z_min: f64, z_max: f64 },

    #[error("curvature is not defined at the pole theta={0}")]
    Pole(f64),

    #[error("rectangle search exhausted {0} shrink steps")]
    RectNotFound(usize),

    #[error("brute-force box holds {points} points, above the limit {limit}")]
    BoxTooLarge { points: u128, limit: u128 },

    #[error("value {value} exceeds the table range [{lo}, {hi}]")]
    TableLimit { value: u64, lo: u64, hi: u64 },

    #[error("table size {requested} is above the memory guard {max}")]
    TableTooLarge { requested: u64, max: u64 },

    #[error("spectral cutoff {cutoff} exceeds the arithmetic table limit {limit}")]
    CutoffExceedsTable { cutoff: f64, limit: u64 },

    #[error("Borel weight mass on the window is {mass}, below 1 - {tolerance}")]
    Normalization { mass: f64, tolerance: f64 },

    #[error("grid step {step} is coarser than the resolution bound {bound}")]
    Resolution { step: f64, bound: f64 },

    #[error("class (l={ell}, m3={m3}) has lambda={lambda} outside [{lo}, {hi}]")]
    LambdaWindow { ell: u64, m3: i64, lambda: f64, lo: f64, hi: f64 },

    #[error("invalid lemma instance: {0}")]
    InvalidInstance(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("config error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
