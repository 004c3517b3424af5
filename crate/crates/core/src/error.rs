use thiserror::Error;

/// Errors raised by the shift, cocycle, holonomy and rigidity layers.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid shift space: {0}")]
    InvalidSpace(String),

    #[error("invalid point: {0}")]
    InvalidPoint(String),

    #[error("cannot parse point literal {literal:?}: {reason}")]
    ParsePoint { literal: String, reason: String },

    #[error("bracket undefined: distance {distance} is not below tau {tau}")]
    BracketUndefined { distance: f64, tau: f64 },

    #[error("closing precondition violated: d(f^n z, z) = {distance} is not below epsilon0 {epsilon0}")]
    NotRecurrent { distance: f64, epsilon0: f64 },

    #[error("word {0:?} is not admissible in this shift")]
    Inadmissible(Vec<u8>),

    #[error("enumeration of {requested} items exceeds the cap of {cap}")]
    CapExceeded { requested: u128, cap: u128 },

    #[error("no connecting word of length at most {0} exists")]
    NoConnection(usize),

    #[error("invalid generator: {0}")]
    InvalidGenerator(String),

    #[error("matrix norm {norm:e} exceeds overflow cap {cap:e}")]
    Overflow { norm: f64, cap: f64 },

    #[error("cocycle is not fiber bunched: fitted rate {theta} vs contraction rate {rate}")]
    NotBunched { theta: f64, rate: f64 },

    #[error("points are not in the same {0} set")]
    NotAsymptotic(&'static str),

    #[error("point is not periodic with period {0}")]
    NotPeriodic(i64),

    #[error("cocycles are incompatible: {0}")]
    Incompatible(String),

    #[error("anchor data mismatch: residual {0:e}")]
    AnchorMismatch(f64),

    #[error("extension did not converge within radius {radius}: last gap {gap:e}")]
    NoConvergence { radius: usize, gap: f64 },

    #[error("{m} and {n} are not coprime")]
    NotCoprime { m: i64, n: i64 },

    #[error("premise A^{power} = P(f^{power}) B^{power} P^-1 fails: residual {residual:e}")]
    PremiseViolated { power: i64, residual: f64 },

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
