//! Errors for the Weyl-matrix computations.

use crate::solver::SolverError;
use crate::tree::{EdgeId, VertexId};
use std::fmt;

#[derive(Debug, Clone)]
pub enum WeylError {
    /// |S(L)| fell below the singularity threshold on a single segment:
    /// lambda is (numerically) a Dirichlet eigenvalue of that segment.
    DirichletEigenvalue {
        edge: Option<EdgeId>,
        magnitude: f64,
    },
    /// An attachment solve was numerically singular, either through the
    /// condition estimate of the bundle system or through a vanishing
    /// S_j(L_j) on one of the attached edges. `step` is the 1-based index
    /// in the growth plan (0 for a standalone attachment).
    SingularStep {
        step: usize,
        anchor: VertexId,
        edge: Option<EdgeId>,
        rcond: f64,
    },
    /// An attachment solve failed its substitution check.
    StepResidual { anchor: VertexId, residual: f64 },
    /// The global assembly is numerically singular: lambda sits too close
    /// to the Dirichlet spectrum of the whole tree.
    SingularSystem { rcond: f64 },
    DimensionMismatch(String),
    LeafMismatch(String),
    InvalidInput(String),
    InvalidTree(String),
    Solver(SolverError),
}

impl fmt::Display for WeylError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            WeylError::DirichletEigenvalue { edge, magnitude } => {
                write!(f, "lambda is a Dirichlet eigenvalue of the segment")?;
                if let Some(edge) = edge {
                    write!(f, " (edge {edge})")?;
                }
                write!(f, ": |S(L)| = {magnitude:.3e}")
            }
            WeylError::SingularStep {
                step,
                anchor,
                edge,
                rcond,
            } => {
                write!(f, "attachment step {step} at anchor {anchor}")?;
                if let Some(edge) = edge {
                    write!(f, " (edge {edge})")?;
                }
                write!(
                    f,
                    " is singular (rcond = {rcond:.3e}); lambda may be a Dirichlet \
                     eigenvalue of an intermediate subtree - re-planning from a \
                     different root leaf changes the intermediate subtrees"
                )
            }
            WeylError::StepResidual { anchor, residual } => write!(
                f,
                "attachment solve at anchor {anchor} failed its substitution check \
                 (relative residual {residual:.3e})"
            ),
            WeylError::SingularSystem { rcond } => write!(
                f,
                "global system is numerically singular (rcond = {rcond:.3e}); \
                 lambda is too close to the Dirichlet spectrum"
            ),
            WeylError::DimensionMismatch(msg) => write!(f, "dimension mismatch: {msg}"),
            WeylError::LeafMismatch(msg) => write!(f, "leaf mismatch: {msg}"),
            WeylError::InvalidInput(msg) => write!(f, "invalid input: {msg}"),
            WeylError::InvalidTree(msg) => write!(f, "invalid tree: {msg}"),
            WeylError::Solver(e) => write!(f, "{e}"),
        }
    }
}

impl std::error::Error for WeylError {
    fn source(&self) -> Option<&(dyn std::error::Error + 'static)> {
        match self {
            WeylError::Solver(e) => Some(e),
            _ => None,
        }
    }
}

impl From<SolverError> for WeylError {
    fn from(e: SolverError) -> Self {
        WeylError::Solver(e)
    }
}
