use thiserror::Error;

/// Errors surfaced by the analysis routines.
///
/// Every variant is a genuine domain failure: callers are expected to treat
/// these as terminal for the requested computation, not retry.
#[derive(Debug, Error)]
pub enum Error {
    /// Invalid argument or parameter value (non-positive mass, bad depth, ...).
    #[error("domain error: {0}")]
    Domain(String),

    /// The request is valid but would exceed configured resource limits.
    #[error("resource limit: {0}")]
    ResourceLimit(String),

    /// Euler-angle kinematics break down near |pitch| = pi/2.
    #[error("attitude singularity: |pitch| = {theta:.6} rad is too close to pi/2")]
    AttitudeSingularity { theta: f64 },

    /// The constrained stiffness matrix is singular; the structure is a
    /// mechanism. Reports the node with the largest component of the
    /// near-null displacement mode.
    #[error("mechanism detected: singular stiffness matrix; {detail}")]
    Mechanism { detail: String },

    /// A case the analytical machinery deliberately does not cover.
    #[error("unsupported case: {0}")]
    Unsupported(String),

    /// An iterative solver failed to converge to its tolerance.
    #[error("solver failure: {0}")]
    Solver(String),
}

pub type Result<T> = std::result::Result<T, Error>;
