use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("operator is not Hermitian (max deviation {0:.3e})")]
    NotHermitian(f64),
    #[error("operator is not unitary (max deviation {0:.3e})")]
    NotUnitary(f64),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("evolution time {time} s is not an integer multiple of the Trotter slice {tau} s")]
    NonIntegerTrotter { time: f64, tau: f64 },
    #[error("h0 has constant sign; no band-inversion surface")]
    EmptyBis,
    #[error("gradient of h0 vanishes near k = ({0:.6}, {1:.6}, {2:.6})")]
    DegenerateGradient(f64, f64, f64),
    #[error("shell root not bracketed within path length pi/2 from vertex {vertex}")]
    NoConvergence { vertex: usize },
    #[error("mesh is not closed: {0}")]
    OpenMesh(String),
    #[error("{flagged} of {total} vertices have a vanishing field (limit 1%)")]
    FieldGap { flagged: usize, total: usize },
    #[error("J-coupling delay {delay:.6e} s exceeds the {limit:.3e} s bound")]
    DelayOverflow { delay: f64, limit: f64 },
    #[error("gradient crush is not a unitary primitive")]
    NonUnitaryPrimitive,
    #[error("cannot parse pulse line {line}: {reason}")]
    PulseParse { line: usize, reason: String },
}
