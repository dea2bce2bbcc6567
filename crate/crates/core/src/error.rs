use thiserror::Error;

use crate::farey::Slope;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid slope {0:?}")]
    InvalidSlope(String),
    #[error("invalid tree address {0:?}")]
    InvalidAddress(Vec<u8>),
    #[error("{0} and {1} are not Farey neighbors")]
    NotNeighbors(Slope, Slope),
    #[error("base region {0} has no parents")]
    BaseRegion(Slope),
    #[error("precision exhausted evaluating slope {slope} at {bits} bits")]
    PrecisionExhausted { slope: Slope, bits: u32 },
    #[error("precision must be at least {min} bits, got {bits}")]
    PrecisionTooLow { bits: u32, min: u32 },
    #[error("triple is not geometric: {0}")]
    NotGeometric(String),
    #[error("degenerate value 2 at slope {0}: the side collapses")]
    Degenerate(Slope),
    #[error("singular linear system while solving for the side of slope {0}")]
    Singular(Slope),
    #[error("side of slope {slope} fails its geometric-progression certificate (deviation {deviation:e})")]
    CertificateFailed { slope: Slope, deviation: f64 },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("cannot parse real number {0:?}")]
    Parse(String),
}
