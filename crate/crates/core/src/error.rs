use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid wavenumber (k = {k}, m = {m}): need k >= 0 and m != 0")]
    InvalidWavenumber { k: f64, m: f64 },
    #[error("action spectrum is singular at k = 0")]
    ZeroHorizontalWavenumber,
    #[error("amplitude n0 must be positive, got {0}")]
    InvalidAmplitude(f64),
    #[error("physical constants must be positive (N = {buoyancy}, g = {gravity})")]
    InvalidConstants { buoyancy: f64, gravity: f64 },
    #[error("cosine {0} outside [-1, 1]")]
    CosineOutOfRange(f64),
    #[error("({k}, {k1}, {k2}) is not strictly inside the kinematic box")]
    OutsideKinematicBox { k: f64, k1: f64, k2: f64 },
    #[error("degenerate triangle ({k}, {k1}, {k2})")]
    DegenerateTriangle { k: f64, k1: f64, k2: f64 },
    #[error("invalid quadrature config: {0}")]
    InvalidConfig(String),
    #[error("non-finite integrand at k1 = {k1}, k2 = {k2} (x = {x}, y = {y})")]
    NonFiniteIntegrand { x: f64, y: f64, k1: f64, k2: f64 },
    #[error("zero denominator: I(k, m) = {0} is too small for a scaling ratio")]
    VanishingReference(f64),
    #[error("no sign change on [{lo}, {hi}] at {fixed} = {at}: I = ({f_lo}, {f_hi})")]
    NoSignChange { fixed: char, at: f64, lo: f64, hi: f64, f_lo: f64, f_hi: f64 },
    #[error("collision integral diverges at (x, y) = ({x}, {y})")]
    NonConvergent { x: f64, y: f64 },
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("nothing to emit: {0} is empty")]
    EmptyData(&'static str),
    #[error("figure needs at least a 2x2 block of non-divergent cells")]
    InsufficientCells,
    #[error("i/o: {0}")]
    Io(String),
    #[error("parse error on line {line}: {msg}")]
    Parse { line: usize, msg: String },
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
