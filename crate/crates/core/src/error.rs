use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("spin 2J = 0 is a single level with identically vanishing magnetization")]
    TrivialSpin,

    #[error("coupling vector is zero: the system is not coupled to the bath")]
    ZeroCoupling,

    #[error("no closed-form solution for linear polarization; use the numeric solver")]
    LinearNotAnalytic,

    #[error("invalid time grid: {0}")]
    InvalidGrid(String),

    #[error(
        "propagator lost unitarity (max |U^dagger U - 1| = {deviation:.3e}); increase n_steps"
    )]
    NonUnitary { deviation: f64 },

    #[error("Fourier cutoff l_max = {l_max} needs n_t >= {needed} samples (have {n_t})")]
    FourierCutoff {
        l_max: usize,
        n_t: usize,
        needed: usize,
    },

    #[error("negative argument {0} passed to spectral density")]
    NegativeFrequency(f64),

    #[error("transition frequency {0:.3e} is resonant (below tolerance)")]
    ResonantFrequency(f64),

    #[error("bath cannot equilibrate system: every transition rate vanishes")]
    DisconnectedRates,

    #[error("degenerate steady state: {0}")]
    DegenerateSteadyState(String),

    #[error("steady-state solution has negative component {0:.3e}")]
    NegativeProbability(f64),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("analytic and numeric Floquet solutions disagree: {0}")]
    SolverMismatch(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}
