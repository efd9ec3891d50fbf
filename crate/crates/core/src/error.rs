use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: norm expects {expected} coordinates, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("parameter {t} outside domain [{a}, {b}]")]
    OutsideDomain { t: f64, a: f64, b: f64 },

    #[error("invalid interval: {lo} > {hi}")]
    InvalidInterval { lo: f64, hi: f64 },

    #[error("curve is constant on ({lo}, {hi}); use phi_reparam instead of arc-length reparameterization")]
    ConstancyInterval { lo: f64, hi: f64 },

    #[error(
        "variation refinement does not converge (last increment {increment:e} at depth {depth})"
    )]
    UnboundedVariation { increment: f64, depth: u32 },

    #[error("zero variation on [{lo}, {hi}]; the ratio is undefined")]
    ZeroVariation { lo: f64, hi: f64 },

    #[error("ladder scale {scale:e} is below the resolvable parameter spacing at x = {x}")]
    LadderUnresolvable { scale: f64, x: f64 },

    #[error("invalid ladder: {0}")]
    InvalidLadder(String),

    #[error("point {x} is not in the set")]
    NotInSet { x: f64 },

    #[error("closed set has nonempty interior: [{lo}, {hi}]")]
    NonemptyInterior { lo: f64, hi: f64 },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error(
        "domain mismatch: homeomorphism range [{range_lo}, {range_hi}] vs curve domain [{a}, {b}]"
    )]
    DomainMismatch {
        range_lo: f64,
        range_hi: f64,
        a: f64,
        b: f64,
    },

    #[error("construction failed: {0}")]
    Construction(String),

    #[error("code of length {len} exceeds built depth {depth}")]
    CodeTooLong { len: usize, depth: usize },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
