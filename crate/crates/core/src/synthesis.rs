//! Incremental construction of the Weyl matrix.
//!
//! A Weyl matrix of a tree with m leaves holds the outward derivatives
//! M_ij = d w_i(leaf_j) of the Weyl solutions w_i (the solution equal to 1
//! at leaf i and 0 at every other leaf). The construction starts from the
//! closed 2x2 form on a single segment and grows the tree one leaf-anchored
//! edge bundle at a time; each bundle costs one factorization of an
//! (m1+1) x (m1+1) system that is shared by every right-hand side of the
//! step.
//!
//! Outward-derivative convention: at a local x = 0 endpoint the outward
//! derivative is +d/dx, at x = L it is -d/dx. New edges are always oriented
//! with the new leaf at x = 0 and the anchor at x = L.

use crate::error::WeylError;
use crate::linalg::{CMatrix, LuFactors};
use crate::solver::{fundamental_data, EndpointData, SolverOptions, SpectralParameter};
use crate::tree::{EdgeId, GrowthPlan, MetricTree, VertexId};
use num_complex::Complex64;

/// Dense m x m Weyl matrix together with the leaf ids labelling its rows
/// and columns and the spectral parameter it was evaluated at.
#[derive(Clone, Debug)]
pub struct WeylMatrix {
    lambda: Complex64,
    leaves: Vec<VertexId>,
    entries: CMatrix,
}

impl WeylMatrix {
    pub fn new(
        lambda: Complex64,
        leaves: Vec<VertexId>,
        entries: CMatrix,
    ) -> Result<WeylMatrix, WeylError> {
        if entries.rows() != entries.cols() {
            return Err(WeylError::DimensionMismatch(format!(
                "entries are {}x{}",
                entries.rows(),
                entries.cols()
            )));
        }
        if leaves.len() != entries.rows() {
            return Err(WeylError::DimensionMismatch(format!(
                "{} leaves for a {}x{} matrix",
                leaves.len(),
                entries.rows(),
                entries.rows()
            )));
        }
        let mut sorted = leaves.clone();
        sorted.sort();
        sorted.dedup();
        if sorted.len() != leaves.len() {
            return Err(WeylError::LeafMismatch("duplicate leaf id".into()));
        }
        Ok(WeylMatrix {
            lambda,
            leaves,
            entries,
        })
    }

    pub fn dim(&self) -> usize {
        self.leaves.len()
    }

    pub fn lambda(&self) -> Complex64 {
        self.lambda
    }

    pub fn leaves(&self) -> &[VertexId] {
        &self.leaves
    }

    pub fn entries(&self) -> &CMatrix {
        &self.entries
    }

    pub fn entry(&self, i: usize, j: usize) -> Complex64 {
        self.entries[(i, j)]
    }

    pub fn index_of(&self, leaf: VertexId) -> Option<usize> {
        self.leaves.iter().position(|&v| v == leaf)
    }

    pub fn max_abs(&self) -> f64 {
        self.entries.max_abs()
    }

    /// Largest |M_ij - M_ji|.
    pub fn symmetry_defect(&self) -> f64 {
        let n = self.dim();
        let mut worst = 0.0_f64;
        for i in 0..n {
            for j in (i + 1)..n {
                worst = worst.max((self.entries[(i, j)] - self.entries[(j, i)]).norm());
            }
        }
        worst
    }

    /// Entrywise conjugate at the conjugate spectral parameter.
    pub fn conjugated(&self) -> WeylMatrix {
        WeylMatrix {
            lambda: self.lambda.conj(),
            leaves: self.leaves.clone(),
            entries: self.entries.conjugated(),
        }
    }

    /// Reorder rows and columns so leaves come in ascending id order.
    pub fn with_canonical_leaf_order(&self) -> WeylMatrix {
        let mut order: Vec<usize> = (0..self.dim()).collect();
        order.sort_by_key(|&i| self.leaves[i]);
        let mut leaves = Vec::with_capacity(self.dim());
        let mut entries = CMatrix::zeros(self.dim(), self.dim());
        for (new_i, &old_i) in order.iter().enumerate() {
            leaves.push(self.leaves[old_i]);
            for (new_j, &old_j) in order.iter().enumerate() {
                entries[(new_i, new_j)] = self.entries[(old_i, old_j)];
            }
        }
        WeylMatrix {
            lambda: self.lambda,
            leaves,
            entries,
        }
    }
}

/// Endpoint data of one attached edge, oriented with the new leaf at x = 0.
#[derive(Clone, Debug)]
pub struct NewEdgeData {
    pub leaf: VertexId,
    /// Edge id, if known; used only in error reports.
    pub edge: Option<EdgeId>,
    pub data: EndpointData,
}

/// One attachment: the known subtree matrix, the subtree leaf that becomes
/// internal, and the endpoint data of the edges attached to it.
#[derive(Clone, Debug)]
pub struct AttachInputs<'a> {
    pub subtree: &'a WeylMatrix,
    pub anchor: VertexId,
    pub new_edges: &'a [NewEdgeData],
}

/// Result of a Weyl-matrix computation together with the smallest
/// reciprocal-condition estimate encountered along the way.
#[derive(Clone, Debug)]
pub struct Synthesis {
    pub weyl: WeylMatrix,
    pub min_rcond: f64,
}

/// 2x2 Weyl matrix of a single segment with `root_leaf` at x = 0 and
/// `far_leaf` at x = L:
///
/// M_00 = -phi(L)/S(L)            M_01 = -(phi'(L) + M_00 S'(L))
/// M_10 = 1/S(L)                  M_11 = -S'(L)/S(L)
pub fn base_weyl(
    data: &EndpointData,
    root_leaf: VertexId,
    far_leaf: VertexId,
    lambda: Complex64,
    options: &SolverOptions,
) -> Result<WeylMatrix, WeylError> {
    if root_leaf == far_leaf {
        return Err(WeylError::InvalidInput(format!(
            "segment endpoints must differ, got {root_leaf} twice"
        )));
    }
    let s_mag = data.s.norm();
    if s_mag < options.singularity_threshold * data.phi.norm().max(1.0) {
        return Err(WeylError::DirichletEigenvalue {
            edge: None,
            magnitude: s_mag,
        });
    }
    let m00 = -data.phi / data.s;
    let m01 = -(data.dphi + m00 * data.ds);
    let m10 = Complex64::new(1.0, 0.0) / data.s;
    let m11 = -data.ds / data.s;
    let mut entries = CMatrix::zeros(2, 2);
    entries[(0, 0)] = m00;
    entries[(0, 1)] = m01;
    entries[(1, 0)] = m10;
    entries[(1, 1)] = m11;
    WeylMatrix::new(lambda, vec![root_leaf, far_leaf], entries)
}

/// Grow the subtree by one bundle of edges attached at `anchor`.
///
/// The step factors one (m1+1) x (m1+1) matrix and reuses it for all
/// right-hand sides: first the rows of the new leaves (unknowns: the new
/// diagonal block and the continuation coefficient of each new Weyl
/// solution), then the new columns of the surviving leaves (unknowns: the
/// off-diagonal block and the value each old Weyl solution takes at the
/// anchor). The surviving rows and columns are completed by rank-one
/// updates with the anchor row and column of the subtree matrix.
///
/// Leaf order of the result: surviving subtree leaves in their prior
/// relative order, then the new leaves in input order.
pub fn attach(inputs: &AttachInputs<'_>, options: &SolverOptions) -> Result<Synthesis, WeylError> {
    let subtree = inputs.subtree;
    let anchor_idx = subtree.index_of(inputs.anchor).ok_or_else(|| {
        WeylError::LeafMismatch(format!("anchor {} is not a subtree leaf", inputs.anchor))
    })?;
    let bundle = inputs.new_edges.len();
    if bundle == 0 {
        return Err(WeylError::InvalidInput("attachment needs at least one edge".into()));
    }
    for new_edge in inputs.new_edges {
        let clashes = subtree.index_of(new_edge.leaf).is_some_and(|i| i != anchor_idx)
            || inputs
                .new_edges
                .iter()
                .filter(|other| other.leaf == new_edge.leaf)
                .count()
                > 1;
        if clashes || new_edge.leaf == inputs.anchor {
            return Err(WeylError::LeafMismatch(format!(
                "new leaf {} is not distinct",
                new_edge.leaf
            )));
        }
    }
    for new_edge in inputs.new_edges {
        let s_mag = new_edge.data.s.norm();
        if s_mag < options.singularity_threshold * new_edge.data.phi.norm().max(1.0) {
            return Err(WeylError::SingularStep {
                step: 0,
                anchor: inputs.anchor,
                edge: new_edge.edge,
                rcond: s_mag,
            });
        }
    }

    let anchor_diag = subtree.entry(anchor_idx, anchor_idx);

    // Shared coefficient matrix: row r (one per new edge) couples that
    // edge's unknown to the common value at the anchor; the last row is the
    // flux balance at the anchor.
    let mut a = CMatrix::zeros(bundle + 1, bundle + 1);
    for (r, new_edge) in inputs.new_edges.iter().enumerate() {
        a[(r, r)] = new_edge.data.s;
        a[(r, bundle)] = Complex64::new(-1.0, 0.0);
        a[(bundle, r)] = new_edge.data.ds;
    }
    a[(bundle, bundle)] = -anchor_diag;
    let lu = LuFactors::compute(&a);
    let rcond = lu.rcond_one();
    if rcond < options.rcond_threshold {
        return Err(WeylError::SingularStep {
            step: 0,
            anchor: inputs.anchor,
            edge: None,
            rcond,
        });
    }

    let old_dim = subtree.dim();
    let survivors: Vec<usize> = (0..old_dim).filter(|&i| i != anchor_idx).collect();
    let new_dim = survivors.len() + bundle;
    let mut entries = CMatrix::zeros(new_dim, new_dim);

    // Rows of the new leaves.
    let mut rhs = vec![Complex64::new(0.0, 0.0); bundle + 1];
    for (j, new_edge) in inputs.new_edges.iter().enumerate() {
        rhs.fill(Complex64::new(0.0, 0.0));
        rhs[j] = -new_edge.data.phi;
        rhs[bundle] = -new_edge.data.dphi;
        lu.solve_in_place(&mut rhs);
        let continuation = rhs[bundle];
        // Substitution check on the continuity equation of edge j.
        let lhs = new_edge.data.phi + rhs[j] * new_edge.data.s;
        let scale = new_edge
            .data
            .phi
            .norm()
            .max((rhs[j] * new_edge.data.s).norm())
            .max(continuation.norm())
            .max(1.0);
        let residual = (lhs - continuation).norm() / scale;
        if residual > 1e-12 {
            return Err(WeylError::StepResidual {
                anchor: inputs.anchor,
                residual,
            });
        }
        let row = survivors.len() + j;
        for (k, value) in rhs[..bundle].iter().enumerate() {
            entries[(row, survivors.len() + k)] = *value;
        }
        for (col, &old_i) in survivors.iter().enumerate() {
            entries[(row, col)] = continuation * subtree.entry(anchor_idx, old_i);
        }
    }

    // Rows of the surviving leaves.
    for (row, &old_i) in survivors.iter().enumerate() {
        rhs.fill(Complex64::new(0.0, 0.0));
        rhs[bundle] = subtree.entry(old_i, anchor_idx);
        lu.solve_in_place(&mut rhs);
        let anchor_value = rhs[bundle];
        for (k, value) in rhs[..bundle].iter().enumerate() {
            entries[(row, survivors.len() + k)] = *value;
        }
        for (col, &old_j) in survivors.iter().enumerate() {
            entries[(row, col)] =
                subtree.entry(old_i, old_j) + anchor_value * subtree.entry(anchor_idx, old_j);
        }
    }

    let mut leaves: Vec<VertexId> = survivors.iter().map(|&i| subtree.leaves[i]).collect();
    leaves.extend(inputs.new_edges.iter().map(|e| e.leaf));
    Ok(Synthesis {
        weyl: WeylMatrix::new(subtree.lambda, leaves, entries)?,
        min_rcond: rcond,
    })
}

/// Orient the potential of `edge` so that local x = 0 sits at `origin`.
fn oriented_potential(
    edge: &crate::tree::Edge,
    origin: VertexId,
) -> crate::potential::Potential {
    if edge.a == origin {
        edge.potential.clone()
    } else {
        edge.potential.reversed()
    }
}

/// Build the Weyl matrix of the whole tree: base case on the plan's root
/// edge, one attachment per plan step, and a final permutation to ascending
/// leaf-id order. `min_rcond` is the smallest condition estimate over all
/// attachment solves.
pub fn synthesize(
    tree: &MetricTree,
    plan: &GrowthPlan,
    rho: SpectralParameter,
    options: &SolverOptions,
) -> Result<Synthesis, WeylError> {
    let report = tree.validate();
    if !report.is_ok() {
        return Err(WeylError::InvalidTree(
            report
                .violations
                .iter()
                .map(|v| v.to_string())
                .collect::<Vec<_>>()
                .join("; "),
        ));
    }
    let root_edge = tree
        .edge_by_id(plan.root_edge)
        .ok_or_else(|| WeylError::InvalidInput(format!("unknown root edge {}", plan.root_edge)))?;
    let far_leaf = root_edge.other_endpoint(plan.root_leaf).ok_or_else(|| {
        WeylError::InvalidInput(format!(
            "root leaf {} is not an endpoint of edge {}",
            plan.root_leaf, plan.root_edge
        ))
    })?;
    let lambda = rho.lambda();
    let root_data = fundamental_data(
        &oriented_potential(root_edge, plan.root_leaf),
        root_edge.length,
        rho,
        options,
    )?;
    let mut current = base_weyl(&root_data, plan.root_leaf, far_leaf, lambda, options).map_err(
        |e| match e {
            WeylError::DirichletEigenvalue { magnitude, .. } => WeylError::DirichletEigenvalue {
                edge: Some(root_edge.id),
                magnitude,
            },
            other => other,
        },
    )?;
    let mut min_rcond = 1.0_f64;

    for (step_idx, step) in plan.steps.iter().enumerate() {
        let mut new_edges = Vec::with_capacity(step.edges.len());
        for edge_id in &step.edges {
            let edge = tree.edge_by_id(*edge_id).ok_or_else(|| {
                WeylError::InvalidInput(format!("unknown edge {edge_id} in step {}", step_idx + 1))
            })?;
            let new_leaf = edge.other_endpoint(step.anchor).ok_or_else(|| {
                WeylError::InvalidInput(format!(
                    "edge {edge_id} is not incident to anchor {}",
                    step.anchor
                ))
            })?;
            let data = fundamental_data(
                &oriented_potential(edge, new_leaf),
                edge.length,
                rho,
                options,
            )?;
            new_edges.push(NewEdgeData {
                leaf: new_leaf,
                edge: Some(edge.id),
                data,
            });
        }
        let inputs = AttachInputs {
            subtree: &current,
            anchor: step.anchor,
            new_edges: &new_edges,
        };
        let result = attach(&inputs, options).map_err(|e| match e {
            WeylError::SingularStep {
                anchor,
                edge,
                rcond,
                ..
            } => WeylError::SingularStep {
                step: step_idx + 1,
                anchor,
                edge,
                rcond,
            },
            other => other,
        })?;
        current = result.weyl;
        min_rcond = min_rcond.min(result.min_rcond);
    }

    Ok(Synthesis {
        weyl: current.with_canonical_leaf_order(),
        min_rcond,
    })
}
