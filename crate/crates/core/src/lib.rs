//! Weyl matrices and Dirichlet-to-Neumann maps of quantum tree graphs.
//!
//! A metric tree carries the operator -d^2/dx^2 + q(x) on every edge, with
//! value continuity and vanishing outward-derivative sums at the internal
//! vertices. The Weyl matrix M(lambda) collects the outward derivatives of
//! the Weyl solutions at the leaves; its transpose maps Dirichlet boundary
//! data to Neumann boundary data, and its singularities are the Dirichlet
//! eigenvalues.
//!
//! Two independent computations of M are provided and verified against each
//! other:
//!
//! * [`synthesize`] grows the tree one leaf-anchored edge bundle at a time,
//!   computing the matrix of each enlarged tree from the previous one via
//!   small dense solves;
//! * [`direct_weyl`] assembles all edge and vertex conditions into one
//!   global system and solves it with m right-hand sides.
//!
//! All types are immutable after construction and all operations are pure
//! functions, so trees, plans and matrices can be shared freely across
//! threads; independent spectral parameters are the natural parallel axis.

pub mod dtn;
pub mod error;
pub mod linalg;
pub mod oracle;
pub mod parse;
pub mod potential;
pub mod solver;
pub mod spectrum;
pub mod synthesis;
pub mod tree;

pub use dtn::{apply_dtn, BoundaryData, BoundaryRole};
pub use error::WeylError;
pub use oracle::{compare, direct_weyl, DirectWeyl};
pub use parse::{parse_graph, ParseError};
pub use potential::Potential;
pub use solver::{fundamental_data, EndpointData, SolverOptions, SpectralParameter};
pub use spectrum::{dirichlet_scan, ScanOptions};
pub use synthesis::{attach, base_weyl, synthesize, AttachInputs, NewEdgeData, Synthesis, WeylMatrix};
pub use tree::{
    AttachStep, Edge, EdgeId, GrowthPlan, MetricTree, PlanError, ValidationReport, VertexId,
    Violation, Warning,
};
