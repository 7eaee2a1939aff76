//! Direct computation of the Weyl matrix from one global linear system.
//!
//! On every edge the solution is written as u = a phi + b S in the edge's
//! own file-orientation coordinate, giving 2P unknowns. The rows are the m
//! leaf boundary values, and per internal vertex of degree d, d - 1 value
//! continuity rows plus one flux (Kirchhoff) row: m + sum(d - 1) + #internal
//! = 2P, so the system is square. One factorization serves all m right-hand
//! sides. This path shares nothing with the incremental construction except
//! the per-edge endpoint data, which makes it the verification oracle.

use crate::error::WeylError;
use crate::linalg::{CMatrix, LuFactors};
use crate::solver::{fundamental_data, EndpointData, SolverOptions, SpectralParameter};
use crate::synthesis::WeylMatrix;
use crate::tree::{MetricTree, VertexId};
use num_complex::Complex64;

/// Weyl matrix plus the reciprocal-condition estimate of the global system.
#[derive(Clone, Debug)]
pub struct DirectWeyl {
    pub weyl: WeylMatrix,
    pub rcond: f64,
}

pub(crate) struct GlobalSystem {
    pub matrix: CMatrix,
    pub leaves: Vec<VertexId>,
    pub edge_data: Vec<EndpointData>,
}

/// Value coefficients (on a, b) of the edge solution at vertex `v`.
fn value_coeffs(edge: &crate::tree::Edge, data: &EndpointData, v: VertexId) -> (Complex64, Complex64) {
    if v == edge.a {
        (Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0))
    } else {
        (data.phi, data.s)
    }
}

/// Outward-derivative coefficients (on a, b) at vertex `v`: +u'(0) at the
/// local origin, -u'(L) at the far end.
fn outward_coeffs(
    edge: &crate::tree::Edge,
    data: &EndpointData,
    v: VertexId,
) -> (Complex64, Complex64) {
    if v == edge.a {
        (Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0))
    } else {
        (-data.dphi, -data.ds)
    }
}

pub(crate) fn assemble_global(
    tree: &MetricTree,
    rho: SpectralParameter,
    options: &SolverOptions,
) -> Result<GlobalSystem, WeylError> {
    let edges = tree.edges();
    let n = 2 * edges.len();
    let mut edge_data = Vec::with_capacity(edges.len());
    for edge in edges {
        edge_data.push(fundamental_data(&edge.potential, edge.length, rho, options)?);
    }
    let leaves = tree.leaf_order();
    let mut matrix = CMatrix::zeros(n, n);
    let mut row = 0usize;
    for &leaf in &leaves {
        let ei = tree.incident_edges(leaf)[0];
        let (ca, cb) = value_coeffs(&edges[ei], &edge_data[ei], leaf);
        matrix[(row, 2 * ei)] = ca;
        matrix[(row, 2 * ei + 1)] = cb;
        row += 1;
    }
    for &v in tree.vertices() {
        let incident = tree.incident_edges(v);
        if incident.len() < 2 {
            continue;
        }
        let first = incident[0];
        let (fa, fb) = value_coeffs(&edges[first], &edge_data[first], v);
        for &ei in &incident[1..] {
            let (ca, cb) = value_coeffs(&edges[ei], &edge_data[ei], v);
            matrix[(row, 2 * ei)] = ca;
            matrix[(row, 2 * ei + 1)] = cb;
            matrix[(row, 2 * first)] = -fa;
            matrix[(row, 2 * first + 1)] = -fb;
            row += 1;
        }
        for &ei in incident {
            let (da, db) = outward_coeffs(&edges[ei], &edge_data[ei], v);
            matrix[(row, 2 * ei)] += da;
            matrix[(row, 2 * ei + 1)] += db;
        }
        row += 1;
    }
    debug_assert_eq!(row, n, "global assembly must be square");
    Ok(GlobalSystem {
        matrix,
        leaves,
        edge_data,
    })
}

/// Assemble and solve the global system, one right-hand side per Weyl
/// solution, and read the outward derivatives off at the leaves.
pub fn direct_weyl(
    tree: &MetricTree,
    rho: SpectralParameter,
    options: &SolverOptions,
) -> Result<DirectWeyl, WeylError> {
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
    let system = assemble_global(tree, rho, options)?;
    let m = system.leaves.len();
    let lu = LuFactors::compute(&system.matrix);
    let rcond = lu.rcond_one();
    if rcond < options.rcond_threshold {
        return Err(WeylError::SingularSystem { rcond });
    }
    let mut rhs = CMatrix::zeros(system.matrix.rows(), m);
    for i in 0..m {
        rhs[(i, i)] = Complex64::new(1.0, 0.0);
    }
    lu.solve_columns_in_place(&mut rhs);

    let edges = tree.edges();
    let mut entries = CMatrix::zeros(m, m);
    for (j, &leaf) in system.leaves.iter().enumerate() {
        let ei = tree.incident_edges(leaf)[0];
        let (da, db) = outward_coeffs(&edges[ei], &system.edge_data[ei], leaf);
        for i in 0..m {
            entries[(i, j)] = da * rhs[(2 * ei, i)] + db * rhs[(2 * ei + 1, i)];
        }
    }
    Ok(DirectWeyl {
        weyl: WeylMatrix::new(rho.lambda(), system.leaves, entries)?,
        rcond,
    })
}

/// Largest entry deviation between two Weyl matrices with the same leaves
/// and the same lambda, relative to max(1, largest entry magnitude).
pub fn compare(a: &WeylMatrix, b: &WeylMatrix) -> Result<f64, WeylError> {
    if a.lambda() != b.lambda() {
        return Err(WeylError::InvalidInput(format!(
            "matrices evaluated at different lambda: {} vs {}",
            a.lambda(),
            b.lambda()
        )));
    }
    let mut leaves_a: Vec<VertexId> = a.leaves().to_vec();
    let mut leaves_b: Vec<VertexId> = b.leaves().to_vec();
    leaves_a.sort();
    leaves_b.sort();
    if leaves_a != leaves_b {
        return Err(WeylError::LeafMismatch(format!(
            "leaf sets differ: {leaves_a:?} vs {leaves_b:?}"
        )));
    }
    let idx_a: Vec<usize> = leaves_a.iter().map(|&v| a.index_of(v).unwrap()).collect();
    let idx_b: Vec<usize> = leaves_a.iter().map(|&v| b.index_of(v).unwrap()).collect();
    let mut worst = 0.0_f64;
    for (&ia, &ib) in idx_a.iter().zip(&idx_b) {
        for (&ja, &jb) in idx_a.iter().zip(&idx_b) {
            worst = worst.max((a.entry(ia, ja) - b.entry(ib, jb)).norm());
        }
    }
    let scale = a.max_abs().max(b.max_abs()).max(1.0);
    Ok(worst / scale)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::potential::Potential;
    use crate::synthesis::synthesize;
    use crate::tree::{Edge, MetricTree};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn opts() -> SolverOptions {
        SolverOptions::default()
    }

    #[test]
    fn single_edge_matches_closed_form() {
        let tree = MetricTree::new([], vec![Edge::new(0, 0, 1, 1.0, Potential::Zero)]);
        let rho = SpectralParameter::from_rho(c(2.0, 0.0));
        let result = direct_weyl(&tree, rho, &opts()).unwrap();
        let diag = 0.9153151087205715;
        let off = 2.199_500_340_589_233;
        for (i, j, want) in [(0, 0, diag), (0, 1, off), (1, 0, off), (1, 1, diag)] {
            assert!(
                (result.weyl.entry(i, j) - c(want, 0.0)).norm() < 1e-13,
                "entry ({i},{j}) = {}",
                result.weyl.entry(i, j)
            );
        }
    }

    #[test]
    fn global_system_is_square_with_two_rows_per_edge() {
        for seed in 0..10u64 {
            let tree = crate::tree::random_tree(seed, 1 + seed as usize);
            let rho = SpectralParameter::from_rho(c(1.0, 0.5));
            let system = assemble_global(&tree, rho, &opts()).unwrap();
            assert_eq!(system.matrix.rows(), 2 * tree.edges().len());
            assert_eq!(system.matrix.cols(), 2 * tree.edges().len());
        }
    }

    #[test]
    fn symmetric_star_has_symmetric_matrix_and_equal_diagonal() {
        let tree = MetricTree::new(
            [],
            vec![
                Edge::new(0, 1, 0, 1.0, Potential::Zero),
                Edge::new(1, 2, 0, 1.0, Potential::Zero),
                Edge::new(2, 3, 0, 1.0, Potential::Zero),
            ],
        );
        let rho = SpectralParameter::from_rho(c(1.0, 0.5));
        let result = direct_weyl(&tree, rho, &opts()).unwrap();
        let m = &result.weyl;
        assert_eq!(m.dim(), 3);
        assert!(m.symmetry_defect() < 1e-12 * m.max_abs().max(1.0));
        assert!((m.entry(0, 0) - m.entry(1, 1)).norm() < 1e-12);
        assert!((m.entry(1, 1) - m.entry(2, 2)).norm() < 1e-12);
    }

    #[test]
    fn degree_two_path_equals_merged_segment() {
        let rho = SpectralParameter::from_rho(c(1.0, 0.0));
        let path = MetricTree::new(
            [],
            vec![
                Edge::new(0, 0, 1, 1.0, Potential::Zero),
                Edge::new(1, 1, 2, 1.0, Potential::Zero),
            ],
        );
        let merged = MetricTree::new([], vec![Edge::new(0, 0, 2, 2.0, Potential::Zero)]);
        let a = direct_weyl(&path, rho, &opts()).unwrap().weyl;
        let b = direct_weyl(&merged, rho, &opts()).unwrap().weyl;
        assert!(compare(&a, &b).unwrap() < 1e-12);
        let off = 1.0997501702946165; // 1/sin2
        assert!((a.entry(0, 1) - c(off, 0.0)).norm() < 1e-13);
    }

    #[test]
    fn degree_two_merge_holds_with_potentials() {
        // concatenating the two potentials along the path equals the merged
        // piecewise potential on one long edge
        let rho = SpectralParameter::from_rho(c(1.4, 0.3));
        let path = MetricTree::new(
            [],
            vec![
                Edge::new(
                    0,
                    0,
                    1,
                    1.0,
                    Potential::PiecewiseConstant(vec![(0.5, c(0.4, 0.0)), (0.5, c(-0.1, 0.0))]),
                ),
                Edge::new(
                    1,
                    1,
                    2,
                    0.9,
                    Potential::PiecewiseConstant(vec![(0.3, c(0.2, 0.0)), (0.6, c(0.7, 0.0))]),
                ),
            ],
        );
        let merged = MetricTree::new(
            [],
            vec![Edge::new(
                0,
                0,
                2,
                1.9,
                Potential::PiecewiseConstant(vec![
                    (0.5, c(0.4, 0.0)),
                    (0.5, c(-0.1, 0.0)),
                    (0.3, c(0.2, 0.0)),
                    (0.6, c(0.7, 0.0)),
                ]),
            )],
        );
        let a = direct_weyl(&path, rho, &opts()).unwrap().weyl;
        let b = direct_weyl(&merged, rho, &opts()).unwrap().weyl;
        assert!(compare(&a, &b).unwrap() < 1e-12);
    }

    #[test]
    fn synthesis_agrees_with_direct_assembly_on_star() {
        let tree = MetricTree::new(
            [],
            vec![
                Edge::new(0, 1, 0, 1.0, Potential::Zero),
                Edge::new(1, 2, 0, 1.0, Potential::Zero),
                Edge::new(2, 3, 0, 1.0, Potential::Zero),
            ],
        );
        let rho = SpectralParameter::from_rho(c(1.0, 0.5));
        let plan = tree.plan_growth(VertexId(1)).unwrap();
        let synth = synthesize(&tree, &plan, rho, &opts()).unwrap();
        let direct = direct_weyl(&tree, rho, &opts()).unwrap();
        assert!(compare(&synth.weyl, &direct.weyl).unwrap() <= 1e-10);
    }

    #[test]
    fn compare_reports_entry_perturbations() {
        let tree = MetricTree::new([], vec![Edge::new(0, 0, 1, 1.0, Potential::Zero)]);
        let rho = SpectralParameter::from_rho(c(2.0, 0.0));
        let m = direct_weyl(&tree, rho, &opts()).unwrap().weyl;
        assert_eq!(compare(&m, &m).unwrap(), 0.0);

        let mut entries = CMatrix::zeros(2, 2);
        for i in 0..2 {
            for j in 0..2 {
                entries[(i, j)] = m.entry(i, j);
            }
        }
        entries[(0, 1)] += c(1e-6, 0.0);
        let perturbed = WeylMatrix::new(m.lambda(), m.leaves().to_vec(), entries).unwrap();
        let dev = compare(&m, &perturbed).unwrap();
        // entries are O(1), so the relative deviation is about 1e-6
        assert!((dev - 1e-6 / m.max_abs().max(1.0)).abs() < 1e-9);
    }

    #[test]
    fn compare_rejects_mismatched_inputs() {
        let tree = MetricTree::new([], vec![Edge::new(0, 0, 1, 1.0, Potential::Zero)]);
        let other = MetricTree::new([], vec![Edge::new(0, 0, 2, 1.0, Potential::Zero)]);
        let rho = SpectralParameter::from_rho(c(2.0, 0.0));
        let a = direct_weyl(&tree, rho, &opts()).unwrap().weyl;
        let b = direct_weyl(&other, rho, &opts()).unwrap().weyl;
        assert!(matches!(compare(&a, &b), Err(WeylError::LeafMismatch(_))));
        let c2 = direct_weyl(&tree, SpectralParameter::from_rho(c(2.5, 0.0)), &opts())
            .unwrap()
            .weyl;
        assert!(matches!(compare(&a, &c2), Err(WeylError::InvalidInput(_))));
    }

    #[test]
    fn factoring_once_matches_separate_factorizations() {
        let tree = crate::tree::random_tree(3, 6);
        let rho = SpectralParameter::from_rho(c(1.1, 0.6));
        let via_api = direct_weyl(&tree, rho, &opts()).unwrap().weyl;
        // re-assemble and solve each right-hand side with its own fresh
        // factorization
        let system = assemble_global(&tree, rho, &opts()).unwrap();
        let m = system.leaves.len();
        let n = system.matrix.rows();
        let mut entries = CMatrix::zeros(m, m);
        for i in 0..m {
            let lu = LuFactors::compute(&system.matrix);
            let mut rhs = vec![Complex64::new(0.0, 0.0); n];
            rhs[i] = Complex64::new(1.0, 0.0);
            lu.solve_in_place(&mut rhs);
            for (j, &leaf) in system.leaves.iter().enumerate() {
                let ei = tree.incident_edges(leaf)[0];
                let (da, db) =
                    outward_coeffs(&tree.edges()[ei], &system.edge_data[ei], leaf);
                entries[(i, j)] = da * rhs[2 * ei] + db * rhs[2 * ei + 1];
            }
        }
        let rebuilt = WeylMatrix::new(rho.lambda(), system.leaves, entries).unwrap();
        assert!(compare(&via_api, &rebuilt).unwrap() <= 1e-12);
    }

    #[test]
    fn singular_lambda_is_reported() {
        let tree = MetricTree::new([], vec![Edge::new(0, 0, 1, 1.0, Potential::Zero)]);
        let rho = SpectralParameter::from_rho(c(std::f64::consts::PI, 0.0));
        assert!(matches!(
            direct_weyl(&tree, rho, &opts()),
            Err(WeylError::SingularSystem { .. })
        ));
    }
}
