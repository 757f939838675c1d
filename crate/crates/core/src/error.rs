use thiserror::Error;

/// Errors raised by the geometry, solver and campaign layers.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// Coincident or collinear points, zero-length rays, and similar.
    #[error("degenerate input: {0}")]
    DegenerateInput(String),
    /// A subtended angle is (numerically) 0 or π.
    #[error("degenerate subtended angle: cosine {0} is at ±1")]
    DegenerateAngle(f64),
    /// Cosines that no optical center can realize.
    #[error("infeasible view angles: {0}")]
    InfeasibleAngles(String),
    /// The two characteristic conics share a component (cocyclic center).
    #[error("degenerate conic pencil: {0}")]
    DegeneratePencil(String),
    #[error("ratio point ({u}, {v}) does not give a positive distance")]
    InfeasibleRatio { u: f64, v: f64 },
    #[error("inconsistent input: constraint residual {0:e} exceeds tolerance")]
    InconsistentInput(f64),
    #[error("distances do not describe a point in space (squared height {0:e})")]
    InfeasibleTriplet(f64),
    /// A point-share line needs `1 / cos` of a subtended angle that is 90°.
    #[error("point-share line undefined: subtended angle cosine {0:e} is zero")]
    RightAngleDegeneracy(f64),
    #[error("triplet is not on the constraint line (residual {0:e})")]
    NotOnLine(f64),
    #[error("locus sampling failed after {0} rejections")]
    SamplingFailure(usize),
    #[error("scene generation failed after {0} rejections")]
    GenerationFailure(usize),
    #[error("unknown theorem id `{0}`")]
    UnknownTheorem(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
