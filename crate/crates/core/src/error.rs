use thiserror::Error;

/// Errors surfaced by the discrimination library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("validation error: {0}")]
    Validation(String),

    #[error("matrix is not Hermitian: max|A - A^dag| = {deviation:.3e}")]
    NonHermitian { deviation: f64 },

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("eigensolver failed to converge after {sweeps} sweeps (off-diagonal norm {off:.3e})")]
    NoConvergence { sweeps: usize, off: f64 },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("states are linearly dependent (Gram minimum eigenvalue {min_eig:.3e})")]
    LinearlyDependent { min_eig: f64 },

    #[error("vector outside basis span: residual {residual:.3e}")]
    OutsideSpan { residual: f64 },

    #[error("coordinate sets refer to different bases")]
    BasisMismatch,

    #[error("measurement is ambiguous: element {element} responds to state {state} with {response:.3e}")]
    Ambiguous {
        element: usize,
        state: usize,
        response: f64,
    },

    #[error("target efficiency infeasible: maximum feasible efficiency is {max_feasible:.12}")]
    InfeasibleEfficiency { max_feasible: f64 },

    #[error("degenerate component: |mu_1{index}| = {magnitude:.3e} below tolerance")]
    DegenerateComponent { index: usize, magnitude: f64 },

    #[error("solver did not converge: {0}")]
    SolverFailure(String),

    #[error("index out of range: {0}")]
    IndexOutOfRange(usize),
}

pub type Result<T> = std::result::Result<T, Error>;
