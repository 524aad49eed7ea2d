use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("{name} must be non-negative, got {value}")]
    NegativeRate { name: &'static str, value: f64 },

    #[error("{name} must be finite")]
    NonFinite { name: &'static str },

    #[error("mixing angle undefined: {0}")]
    DegenerateAngles(&'static str),

    #[error("state is not normalized (norm² = {norm_sqr})")]
    NotNormalized { norm_sqr: f64 },

    #[error(
        "not a density matrix: hermiticity error {hermiticity:.3e}, trace error {trace_error:.3e}, \
         min eigenvalue {min_eigenvalue:.3e}"
    )]
    InvalidDensityMatrix {
        hermiticity: f64,
        trace_error: f64,
        min_eigenvalue: f64,
    },

    #[error("steady state is not unique: null space has dimension {nullity}")]
    NonUniqueSteadyState { nullity: usize },

    #[error("steady-state solve failed: {0}")]
    SolveFailure(String),

    #[error("integration failed at t = {t_ps:.6e} ps (step {step:.3e} ps)")]
    IntegrationFailure { t_ps: f64, step: f64 },

    #[error("invariant violated at t = {t_ps:.6e} ps: {detail}")]
    InvariantViolation { t_ps: f64, detail: String },

    #[error("asymptotic-state denominator vanishes")]
    DegenerateDenominator,

    #[error("stationary fidelity is singular at T_e = 0")]
    TeZeroSingularity,

    #[error("requires a positive direct-exciton decay rate gamma1")]
    RequiresDirectDecay,

    #[error("relaxation time is infinite: mixing angle at 0 or pi")]
    InfiniteRelaxation,

    #[error("no convergence to the steady state by t = {t_ps:.6e} ps (residual {residual:.3e})")]
    ConvergenceTimeout { t_ps: f64, residual: f64 },

    #[error("readout requires a non-zero drive amplitude omega")]
    NoReadoutDrive,

    #[error("ambiguous readout: P00(t1) = {p00:.6} lies in the band [0.4, 0.6]")]
    AmbiguousReadout { p00: f64 },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}
