use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("{what} at {at:?}")]
    Domain { what: String, at: [f64; 2] },

    #[error("division by zero at {at:?}")]
    DivisionByZero { at: [f64; 2] },

    #[error("non-positive base {value} in real power at {at:?}")]
    NegativeBase { value: f64, at: [f64; 2] },

    #[error("derivative order {requested} exceeds available order {available}")]
    OrderOverflow { requested: usize, available: usize },

    #[error("tabulated node refuses derivative order {requested} (limit 2)")]
    TabulatedOrder { requested: usize },

    #[error("abscissa {value} outside tabulated domain [{lo}, {hi}]")]
    OutsideTable { value: f64, lo: f64, hi: f64 },

    #[error("invalid table: {0}")]
    Table(String),

    #[error("invalid input: {0}")]
    InvalidSpec(String),

    #[error("rank decision indeterminate: gap {gap:.3e} below required {required:.1e}")]
    IndeterminateRank {
        gap: f64,
        required: f64,
        spectrum: Vec<f64>,
    },

    #[error("radius {r} at or below r_min {r_min}")]
    RadiusTooSmall { r: f64, r_min: f64 },

    #[error("denominator vanishes near theta = {theta}")]
    Pole { theta: f64 },

    #[error("no real slope: discriminant {discriminant:.3e} at tau = {tau}")]
    NegativeDiscriminant { tau: f64, discriminant: f64 },

    #[error("parabolic degeneracy: leading coefficient {leading:.3e} at tau = {tau}")]
    Degenerate { tau: f64, leading: f64 },

    #[error("step size underflow at t = {t}")]
    StepUnderflow { t: f64 },

    #[error("initial data on singular locus: {0}")]
    SingularInitialData(String),

    #[error("constraint violated: {0}")]
    Constraint(String),

    #[error("trajectory entered r < r_min ({r}) at t = {t}")]
    Singularity { r: f64, t: f64 },

    #[error("drift budget {budget:.1e} unreachable at minimum step {dt:.3e} (drift {drift:.3e})")]
    DriftBudget { budget: f64, dt: f64, drift: f64 },

    #[error("no Poincaré section crossing within the horizon")]
    NoSectionCrossing,

    #[error("ill-conditioned sampling: {0}")]
    IllConditioned(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
