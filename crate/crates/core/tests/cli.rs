//! End-to-end tests of the command-line interface against fixture graphs.

use num_complex::Complex64;
use std::path::PathBuf;
use std::process::{Command, Output};

fn bin() -> &'static str {
    env!("CARGO_BIN_EXE_weyltree")
}

fn fixture(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("tests/fixtures")
        .join(name)
        .to_string_lossy()
        .into_owned()
}

fn run(args: &[&str]) -> Output {
    Command::new(bin()).args(args).output().expect("binary should run")
}

fn stdout(output: &Output) -> String {
    String::from_utf8_lossy(&output.stdout).into_owned()
}

fn stderr(output: &Output) -> String {
    String::from_utf8_lossy(&output.stderr).into_owned()
}

fn data_rows(text: &str) -> Vec<Vec<f64>> {
    text.lines()
        .filter(|line| !line.starts_with('#') && !line.trim().is_empty())
        .map(|line| {
            line.split(',')
                .map(|cell| cell.trim().parse::<f64>().expect("numeric cell"))
                .collect()
        })
        .collect()
}

#[test]
fn weyl_single_edge_emits_closed_form_csv() {
    let out = run(&[
        "weyl",
        "--graph",
        &fixture("single_edge.txt"),
        "--rho",
        "2,0",
    ]);
    assert_eq!(out.status.code(), Some(0), "stderr: {}", stderr(&out));
    let rows = data_rows(&stdout(&out));
    assert_eq!(rows.len(), 2);
    assert_eq!(rows[0].len(), 4); // two complex cells per row
    let diag = 0.9153151087205715;
    let off = 2.199_500_340_589_233;
    assert!((rows[0][0] - diag).abs() < 1e-11);
    assert!((rows[0][2] - off).abs() < 1e-11);
    assert!((rows[1][0] - off).abs() < 1e-11);
    assert!((rows[1][2] - diag).abs() < 1e-11);
    for row in &rows {
        assert!(row[1].abs() < 1e-11 && row[3].abs() < 1e-11, "real data");
    }
    assert!(stdout(&out).contains("# leaves: 0 1"));
}

#[test]
fn output_is_byte_deterministic() {
    let args = [
        "weyl",
        "--graph",
        &fixture("random15.txt"),
        "--rho",
        "0.8,0.6",
        "--rho",
        "1.7,0.3",
    ];
    let first = run(&args);
    let second = run(&args);
    assert_eq!(first.status.code(), Some(0));
    assert_eq!(first.stdout, second.stdout);

    let vargs = [
        "verify",
        "--graph",
        &fixture("star3.txt"),
        "--rho",
        "1,0.5",
    ];
    let first = run(&vargs);
    let second = run(&vargs);
    assert_eq!(first.status.code(), Some(0));
    assert_eq!(first.stdout, second.stdout);
}

#[test]
fn parse_error_exits_2_and_names_the_line() {
    let out = run(&[
        "weyl",
        "--graph",
        &fixture("bad_syntax.txt"),
        "--rho",
        "1,0",
    ]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("line 2"), "stderr: {}", stderr(&out));
}

#[test]
fn dirichlet_eigenvalue_exits_3() {
    let out = run(&[
        "weyl",
        "--graph",
        &fixture("single_edge.txt"),
        "--rho",
        "3.141592653589793,0",
    ]);
    assert_eq!(out.status.code(), Some(3));
    assert!(stderr(&out).contains("Dirichlet"), "stderr: {}", stderr(&out));
}

#[test]
fn validation_failure_exits_4() {
    let out = run(&["weyl", "--graph", &fixture("triangle.txt"), "--rho", "1,0"]);
    assert_eq!(out.status.code(), Some(4));
    assert!(stderr(&out).contains("cycle"), "stderr: {}", stderr(&out));
}

#[test]
fn verify_tolerance_violation_exits_5() {
    let out = run(&[
        "verify",
        "--graph",
        &fixture("sampled_star.txt"),
        "--rho",
        "1.1,0.5",
        "--tolerance",
        "1e-16",
    ]);
    assert_eq!(out.status.code(), Some(5), "stderr: {}", stderr(&out));
    assert!(stderr(&out).contains("exceeds tolerance"));
}

#[test]
fn verify_passes_at_default_tolerance() {
    for graph in ["star3.txt", "random15.txt", "sampled_star.txt", "path2.txt"] {
        let out = run(&[
            "verify",
            "--graph",
            &fixture(graph),
            "--rho",
            "1,0.5",
            "--rho",
            "0.8,0.6",
        ]);
        assert_eq!(out.status.code(), Some(0), "{graph} stderr: {}", stderr(&out));
        assert!(stdout(&out).contains("max_deviation="));
    }
}

#[test]
fn spectrum_lists_free_edge_eigenvalues() {
    let out = run(&[
        "spectrum",
        "--graph",
        &fixture("single_pi.txt"),
        "--interval",
        "0.5,10",
        "--grid",
        "400",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let lines: Vec<f64> = stdout(&out)
        .lines()
        .map(|l| l.trim().parse().expect("eigenvalue line"))
        .collect();
    assert_eq!(lines.len(), 3, "stdout: {}", stdout(&out));
    for (got, want) in lines.iter().zip([1.0, 4.0, 9.0]) {
        assert!((got - want).abs() < 1e-6);
    }
}

#[test]
fn empty_spectrum_window_prints_nothing() {
    let out = run(&[
        "spectrum",
        "--graph",
        &fixture("single_pi.txt"),
        "--interval",
        "0.5,0.6",
        "--grid",
        "50",
    ]);
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).is_empty());
}

#[test]
fn dtn_unit_vector_prints_first_matrix_row() {
    let out = run(&[
        "dtn",
        "--graph",
        &fixture("single_edge.txt"),
        "--rho",
        "2,0",
        "--f",
        "1,0,0,0",
    ]);
    assert_eq!(out.status.code(), Some(0), "stderr: {}", stderr(&out));
    let rows = data_rows(&stdout(&out));
    assert_eq!(rows.len(), 2);
    // leaf id, re, im
    assert_eq!(rows[0][0], 0.0);
    assert!((rows[0][1] - 0.9153151087205715).abs() < 1e-11);
    assert_eq!(rows[1][0], 1.0);
    assert!((rows[1][1] - 2.199_500_340_589_233).abs() < 1e-11);
}

#[test]
fn dtn_rejects_wrong_vector_length() {
    let out = run(&[
        "dtn",
        "--graph",
        &fixture("single_edge.txt"),
        "--rho",
        "2,0",
        "--f",
        "1,0",
    ]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("needs 4 numbers"));
}

#[test]
fn plan_describes_root_edge_and_steps() {
    let out = run(&["plan", "--graph", &fixture("star3.txt")]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert!(text.contains("root edge 0: leaf 1 at x=0"), "stdout: {text}");
    assert!(text.contains("step 1: anchor 0"), "stdout: {text}");
    assert!(text.contains("leaves: 1 2 3"), "stdout: {text}");
}

#[test]
fn root_flag_must_name_a_leaf() {
    let ok = run(&[
        "weyl",
        "--graph",
        &fixture("star3.txt"),
        "--rho",
        "1,0.5",
        "--root",
        "2",
    ]);
    assert_eq!(ok.status.code(), Some(0));
    let bad = run(&[
        "weyl",
        "--graph",
        &fixture("star3.txt"),
        "--rho",
        "1,0.5",
        "--root",
        "0",
    ]);
    assert_eq!(bad.status.code(), Some(1));
    assert!(stderr(&bad).contains("not a leaf"));
}

#[test]
fn emitted_csv_round_trips_to_printed_precision() {
    let precision = 9;
    let out = run(&[
        "weyl",
        "--graph",
        &fixture("star3.txt"),
        "--rho",
        "1,0.5",
        "--precision",
        "9",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let rows = data_rows(&stdout(&out));

    let text = std::fs::read_to_string(fixture("star3.txt")).unwrap();
    let tree = weyltree::parse_graph(&text).unwrap();
    let plan = tree.plan_growth(weyltree::VertexId(1)).unwrap();
    let rho = weyltree::SpectralParameter::from_rho(Complex64::new(1.0, 0.5));
    let reference = weyltree::synthesize(&tree, &plan, rho, &weyltree::SolverOptions::default())
        .unwrap()
        .weyl;

    let half_ulp = 0.5 * 10f64.powi(-precision) + 1e-15;
    assert_eq!(rows.len(), reference.dim());
    for (i, row) in rows.iter().enumerate() {
        assert_eq!(row.len(), 2 * reference.dim());
        for j in 0..reference.dim() {
            let want = reference.entry(i, j);
            assert!((row[2 * j] - want.re).abs() <= half_ulp);
            assert!((row[2 * j + 1] - want.im).abs() <= half_ulp);
        }
    }
}

#[test]
fn multiple_rho_blocks_are_separated() {
    let out = run(&[
        "weyl",
        "--graph",
        &fixture("single_edge.txt"),
        "--rho",
        "2,0",
        "--rho",
        "1,0.5",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert_eq!(text.matches("# rho = ").count(), 2);
    assert_eq!(text.matches("# leaves: 0 1").count(), 2);
}
