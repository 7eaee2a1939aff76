//! Metric tree graphs: vertices, edges with lengths and potentials,
//! validation, and the decomposition of a tree into a root edge plus a
//! sequence of leaf-anchored edge-bundle attachments.

use crate::potential::Potential;
use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct VertexId(pub u64);

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct EdgeId(pub u64);

impl From<u64> for VertexId {
    fn from(id: u64) -> Self {
        VertexId(id)
    }
}

impl From<u64> for EdgeId {
    fn from(id: u64) -> Self {
        EdgeId(id)
    }
}

impl fmt::Display for VertexId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl fmt::Display for EdgeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// An edge between two vertices. The potential lives in the edge's local
/// coordinate with x = 0 at `a` and x = length at `b`.
#[derive(Clone, Debug)]
pub struct Edge {
    pub id: EdgeId,
    pub a: VertexId,
    pub b: VertexId,
    pub length: f64,
    pub potential: Potential,
}

impl Edge {
    pub fn new(
        id: impl Into<EdgeId>,
        a: impl Into<VertexId>,
        b: impl Into<VertexId>,
        length: f64,
        potential: Potential,
    ) -> Edge {
        Edge {
            id: id.into(),
            a: a.into(),
            b: b.into(),
            length,
            potential,
        }
    }

    /// The endpoint opposite to `v`, if `v` is an endpoint at all.
    pub fn other_endpoint(&self, v: VertexId) -> Option<VertexId> {
        if v == self.a {
            Some(self.b)
        } else if v == self.b {
            Some(self.a)
        } else {
            None
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Violation {
    NoEdges,
    DuplicateEdgeId(EdgeId),
    SelfLoop(EdgeId),
    BadLength { edge: EdgeId, length_text: String },
    MalformedPotential { edge: EdgeId, reason: String },
    Disconnected { components: usize },
    Cycle,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::NoEdges => write!(f, "graph has no edges"),
            Violation::DuplicateEdgeId(id) => write!(f, "duplicate edge id {id}"),
            Violation::SelfLoop(id) => write!(f, "edge {id} joins a vertex to itself"),
            Violation::BadLength { edge, length_text } => {
                write!(f, "edge {edge} has nonpositive or non-finite length {length_text}")
            }
            Violation::MalformedPotential { edge, reason } => {
                write!(f, "edge {edge} has a malformed potential: {reason}")
            }
            Violation::Disconnected { components } => {
                write!(f, "graph is disconnected ({components} components)")
            }
            Violation::Cycle => write!(f, "graph contains a cycle"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Warning {
    DegreeTwoVertex(VertexId),
}

impl fmt::Display for Warning {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Warning::DegreeTwoVertex(v) => write!(f, "vertex {v} has degree 2"),
        }
    }
}

/// Outcome of `MetricTree::validate`. Warnings do not block computation.
#[derive(Clone, Debug, Default)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
    pub warnings: Vec<Warning>,
}

impl ValidationReport {
    pub fn is_ok(&self) -> bool {
        self.violations.is_empty()
    }
}

/// A metric tree: a connected, cycle-free graph whose edges carry lengths
/// and potentials. Immutable after construction; all operations are pure.
#[derive(Clone, Debug)]
pub struct MetricTree {
    vertices: Vec<VertexId>,
    edges: Vec<Edge>,
    incidence: BTreeMap<VertexId, Vec<usize>>,
}

impl MetricTree {
    /// Build a tree from edges plus optional explicitly declared vertices
    /// (vertices implied by edges are always included).
    pub fn new(extra_vertices: impl IntoIterator<Item = VertexId>, edges: Vec<Edge>) -> MetricTree {
        let mut vertex_set: BTreeSet<VertexId> = extra_vertices.into_iter().collect();
        let mut incidence: BTreeMap<VertexId, Vec<usize>> = BTreeMap::new();
        for (idx, edge) in edges.iter().enumerate() {
            vertex_set.insert(edge.a);
            vertex_set.insert(edge.b);
            incidence.entry(edge.a).or_default().push(idx);
            if edge.b != edge.a {
                incidence.entry(edge.b).or_default().push(idx);
            }
        }
        for v in &vertex_set {
            incidence.entry(*v).or_default();
        }
        MetricTree {
            vertices: vertex_set.into_iter().collect(),
            edges,
            incidence,
        }
    }

    pub fn vertices(&self) -> &[VertexId] {
        &self.vertices
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn edge_by_id(&self, id: EdgeId) -> Option<&Edge> {
        self.edges.iter().find(|e| e.id == id)
    }

    pub fn degree(&self, v: VertexId) -> usize {
        self.incidence.get(&v).map_or(0, |l| l.len())
    }

    pub fn is_leaf(&self, v: VertexId) -> bool {
        self.degree(v) == 1
    }

    /// Indices into `edges()` of the edges incident to `v`.
    pub fn incident_edges(&self, v: VertexId) -> &[usize] {
        self.incidence.get(&v).map_or(&[], |l| l.as_slice())
    }

    /// Leaves (degree-1 vertices) in ascending id order. This order defines
    /// the rows and columns of every Weyl matrix produced for this tree.
    pub fn leaf_order(&self) -> Vec<VertexId> {
        self.vertices
            .iter()
            .copied()
            .filter(|v| self.is_leaf(*v))
            .collect()
    }

    /// Report structural problems: missing edges, duplicate ids, self loops,
    /// bad lengths, malformed potentials, disconnection, cycles. Degree-2
    /// vertices are reported as warnings only; every formula here stays valid
    /// for them with a bundle size of one.
    pub fn validate(&self) -> ValidationReport {
        let mut report = ValidationReport::default();
        if self.edges.is_empty() {
            report.violations.push(Violation::NoEdges);
            return report;
        }
        let mut seen = BTreeSet::new();
        for edge in &self.edges {
            if !seen.insert(edge.id) {
                report.violations.push(Violation::DuplicateEdgeId(edge.id));
            }
            if edge.a == edge.b {
                report.violations.push(Violation::SelfLoop(edge.id));
            }
            if !(edge.length.is_finite() && edge.length > 0.0) {
                report.violations.push(Violation::BadLength {
                    edge: edge.id,
                    length_text: format!("{}", edge.length),
                });
            } else if let Err(reason) = edge.potential.check(edge.length) {
                report.violations.push(Violation::MalformedPotential {
                    edge: edge.id,
                    reason,
                });
            }
        }
        // Connectivity and cycles by breadth-first traversal.
        let mut visited: BTreeSet<VertexId> = BTreeSet::new();
        let mut components = 0usize;
        let mut has_cycle = false;
        for &start in &self.vertices {
            if visited.contains(&start) {
                continue;
            }
            components += 1;
            let mut comp_vertices = 0usize;
            let mut comp_edges: BTreeSet<usize> = BTreeSet::new();
            let mut queue = VecDeque::new();
            queue.push_back(start);
            visited.insert(start);
            while let Some(v) = queue.pop_front() {
                comp_vertices += 1;
                for &ei in self.incident_edges(v) {
                    comp_edges.insert(ei);
                    let edge = &self.edges[ei];
                    let w = if edge.a == v { edge.b } else { edge.a };
                    if visited.insert(w) {
                        queue.push_back(w);
                    }
                }
            }
            if comp_edges.len() >= comp_vertices {
                has_cycle = true;
            }
        }
        if has_cycle {
            report.violations.push(Violation::Cycle);
        }
        if components > 1 {
            report.violations.push(Violation::Disconnected { components });
        }
        for &v in &self.vertices {
            if self.degree(v) == 2 {
                report.warnings.push(Warning::DegreeTwoVertex(v));
            }
        }
        report
    }

    /// Decompose the tree into a root edge plus attachment steps, walking
    /// internal vertices breadth-first from the far endpoint of the root
    /// edge. Each step attaches every not-yet-included edge incident to its
    /// anchor at once. The same root always yields the same plan.
    pub fn plan_growth(&self, root_leaf: VertexId) -> Result<GrowthPlan, PlanError> {
        let report = self.validate();
        if !report.is_ok() {
            return Err(PlanError::InvalidTree(
                report
                    .violations
                    .iter()
                    .map(|v| v.to_string())
                    .collect::<Vec<_>>()
                    .join("; "),
            ));
        }
        if !self.is_leaf(root_leaf) {
            return Err(PlanError::NotALeaf(root_leaf));
        }
        let root_edge_idx = self.incident_edges(root_leaf)[0];
        let root_edge = &self.edges[root_edge_idx];
        let far = root_edge.other_endpoint(root_leaf).expect("incident edge");

        let mut used = vec![false; self.edges.len()];
        used[root_edge_idx] = true;
        let mut steps = Vec::new();
        let mut queue = VecDeque::new();
        queue.push_back(far);
        while let Some(anchor) = queue.pop_front() {
            let mut new_edges = Vec::new();
            for &ei in self.incident_edges(anchor) {
                if used[ei] {
                    continue;
                }
                used[ei] = true;
                new_edges.push(self.edges[ei].id);
                let next = self.edges[ei].other_endpoint(anchor).expect("incident edge");
                queue.push_back(next);
            }
            if !new_edges.is_empty() {
                steps.push(AttachStep {
                    anchor,
                    edges: new_edges,
                });
            }
        }
        Ok(GrowthPlan {
            root_leaf,
            root_edge: root_edge.id,
            steps,
        })
    }
}

/// One attachment: convert the leaf `anchor` of the current subtree into an
/// internal vertex by attaching `edges`, each oriented with its far endpoint
/// (the new leaf) at local x = 0 and the anchor at x = L.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AttachStep {
    pub anchor: VertexId,
    pub edges: Vec<EdgeId>,
}

/// Root edge (root leaf at local x = 0) plus ordered attachment steps that
/// together cover every edge of the tree exactly once.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GrowthPlan {
    pub root_leaf: VertexId,
    pub root_edge: EdgeId,
    pub steps: Vec<AttachStep>,
}

#[derive(Debug, thiserror::Error)]
pub enum PlanError {
    #[error("vertex {0} is not a leaf")]
    NotALeaf(VertexId),
    #[error("tree is not valid: {0}")]
    InvalidTree(String),
}

/// Random tree with `edge_count` free unit edges: every new vertex attaches
/// to a uniformly chosen existing one. Test helper.
#[cfg(test)]
pub(crate) fn random_tree(seed: u64, edge_count: usize) -> MetricTree {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let mut edges = Vec::new();
    for i in 0..edge_count {
        let parent = rng.random_range(0..=i as u64);
        edges.push(Edge::new(
            i as u64,
            parent,
            i as u64 + 1,
            1.0,
            Potential::Zero,
        ));
    }
    MetricTree::new([], edges)
}
