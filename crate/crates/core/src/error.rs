use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("rank overflow: {left} + {right} exceeds the maximum rank {max}")]
    RankOverflow { left: usize, right: usize, max: usize },

    #[error("rank mismatch: expected {expected}, found {found}")]
    RankMismatch { expected: usize, found: usize },

    #[error("unsupported rank {rank}: {context}")]
    UnsupportedRank { rank: usize, context: &'static str },

    #[error("tensor of rank {rank} needs {expected} components, found {found}")]
    ComponentCount { rank: usize, expected: usize, found: usize },

    #[error("frame is not right-handed orthonormal: {0}")]
    InvalidFrame(String),

    #[error("invalid beam: {0}")]
    InvalidBeam(String),

    #[error("invalid beam profile: {0}")]
    InvalidProfile(String),

    #[error("invalid molecular model: {0}")]
    InvalidModel(String),

    #[error(
        "near resonance: transition {index} ({transition_energy:.6e} J) lies within {floor:.1}% of the photon energy {photon_energy:.6e} J"
    )]
    NearResonance {
        index: usize,
        transition_energy: f64,
        photon_energy: f64,
        floor: f64,
    },

    #[error("energy shift is not real: imaginary residual {residual:.3e} J against total {total:.3e} J")]
    ImaginaryResidual { residual: f64, total: f64 },

    #[error("beam pair mismatch: {0}")]
    BeamPairMismatch(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("{0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
