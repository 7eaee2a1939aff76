//! Acceptance suite. Each test covers one numbered criterion and prints a
//! PASS line with the measured figures; run with
//!
//! ```text
//! cargo test --test acceptance -- --nocapture
//! ```

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::path::PathBuf;
use std::process::Command;
use std::time::Instant;
use weyltree::{
    compare, dirichlet_scan, direct_weyl, synthesize, Edge, MetricTree, Potential, ScanOptions,
    SolverOptions, SpectralParameter, VertexId,
};

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn opts() -> SolverOptions {
    SolverOptions::default()
}

#[derive(Clone, Copy, PartialEq)]
enum PotentialKind {
    PiecewiseReal,
    SampledSine,
}

fn random_potential(rng: &mut ChaCha8Rng, length: f64, kind: PotentialKind) -> Potential {
    match kind {
        PotentialKind::PiecewiseReal => {
            let pieces_count = rng.random_range(1..=3usize);
            let mut widths = Vec::with_capacity(pieces_count);
            for _ in 0..pieces_count {
                widths.push(rng.random_range(0.2..1.0));
            }
            let total: f64 = widths.iter().sum();
            let pieces = widths
                .iter()
                .map(|w| (w / total * length, c(rng.random_range(-1.0..1.0), 0.0)))
                .collect();
            Potential::PiecewiseConstant(pieces)
        }
        PotentialKind::SampledSine => {
            let amplitude = rng.random_range(0.2..1.0);
            let frequency = rng.random_range(1.0..4.0);
            let phase = rng.random_range(0.0..std::f64::consts::TAU);
            let samples = (0..200)
                .map(|k| {
                    let x = length * k as f64 / 199.0;
                    c(amplitude * (frequency * x + phase).sin(), 0.0)
                })
                .collect();
            Potential::Sampled(samples)
        }
    }
}

/// Random recursive tree: vertex i+1 hangs off a uniformly chosen earlier
/// vertex, edge lengths uniform in [0.5, 2].
fn random_tree(rng: &mut ChaCha8Rng, edge_count: usize, kind: PotentialKind) -> MetricTree {
    let mut edges = Vec::with_capacity(edge_count);
    for i in 0..edge_count {
        let parent = rng.random_range(0..=i as u64);
        let length = rng.random_range(0.5..2.0);
        let potential = random_potential(rng, length, kind);
        edges.push(Edge::new(i as u64, parent, i as u64 + 1, length, potential));
    }
    MetricTree::new([], edges)
}

fn random_rho(rng: &mut ChaCha8Rng) -> SpectralParameter {
    SpectralParameter::from_rho(c(
        rng.random_range(0.3..3.0),
        rng.random_range(0.2..1.0),
    ))
}

struct EquivalenceRun {
    used: usize,
    skipped: usize,
    max_deviation: f64,
}

/// Shared harness of criteria 1 and 2: random trees, synthesis vs direct
/// assembly, draws with a reciprocal condition estimate below `1e-8` on
/// either path are skipped.
fn equivalence_run(seed: u64, draws: usize, kind: PotentialKind) -> EquivalenceRun {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut run = EquivalenceRun {
        used: 0,
        skipped: 0,
        max_deviation: 0.0,
    };
    for _ in 0..draws {
        let edge_count = rng.random_range(1..=15usize);
        let tree = random_tree(&mut rng, edge_count, kind);
        let rho = random_rho(&mut rng);
        let leaves = tree.leaf_order();
        let root = leaves[rng.random_range(0..leaves.len())];
        let plan = tree.plan_growth(root).expect("random trees are valid");
        let synthesis = synthesize(&tree, &plan, rho, &opts()).expect("off the spectrum");
        let direct = direct_weyl(&tree, rho, &opts()).expect("off the spectrum");
        if synthesis.min_rcond < 1e-8 || direct.rcond < 1e-8 {
            run.skipped += 1;
            continue;
        }
        run.used += 1;
        let deviation = compare(&synthesis.weyl, &direct.weyl).expect("same tree, same lambda");
        run.max_deviation = run.max_deviation.max(deviation);
    }
    run
}

#[test]
fn criterion_1_oracle_equivalence_piecewise() {
    let start = Instant::now();
    let run = equivalence_run(0xC0FFEE, 50, PotentialKind::PiecewiseReal);
    let elapsed = start.elapsed().as_secs_f64();
    assert!(run.used >= 40, "too many skipped draws: {}", run.skipped);
    assert!(
        run.max_deviation <= 1e-10,
        "max deviation {} above 1e-10",
        run.max_deviation
    );
    assert!(elapsed < 10.0, "runtime {elapsed:.2} s exceeds 10 s");
    println!(
        "PASS criterion 1: synthesis vs direct assembly (piecewise) max deviation {:.3e} \
         over {} draws ({} skipped) in {elapsed:.2} s",
        run.max_deviation, run.used, run.skipped
    );
}

#[test]
fn criterion_2_oracle_equivalence_sampled() {
    let start = Instant::now();
    let run = equivalence_run(0xBEEF, 50, PotentialKind::SampledSine);
    let elapsed = start.elapsed().as_secs_f64();
    assert!(run.used >= 40, "too many skipped draws: {}", run.skipped);
    assert!(
        run.max_deviation <= 1e-7,
        "max deviation {} above 1e-7",
        run.max_deviation
    );
    println!(
        "PASS criterion 2: synthesis vs direct assembly (sampled) max deviation {:.3e} \
         over {} draws ({} skipped) in {elapsed:.2} s",
        run.max_deviation, run.used, run.skipped
    );
}

#[test]
fn criterion_3_plan_independence() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x9A7E);
    let mut worst = 0.0_f64;
    for _ in 0..10 {
        let edge_count = rng.random_range(2..=15usize);
        let tree = random_tree(&mut rng, edge_count, PotentialKind::PiecewiseReal);
        let rho = random_rho(&mut rng);
        let leaves = tree.leaf_order();
        let plan_a = tree.plan_growth(leaves[0]).unwrap();
        let plan_b = tree.plan_growth(*leaves.last().unwrap()).unwrap();
        let a = synthesize(&tree, &plan_a, rho, &opts()).unwrap();
        let b = synthesize(&tree, &plan_b, rho, &opts()).unwrap();
        worst = worst.max(compare(&a.weyl, &b.weyl).unwrap());
    }
    assert!(worst <= 1e-10, "plans disagree by {worst}");
    println!(
        "PASS criterion 3: synthesis from two different roots agrees to {worst:.3e} \
         over 10 trees"
    );
}

#[test]
fn criterion_4_symmetry_and_conjugation() {
    // same draws as criterion 1
    let mut rng = ChaCha8Rng::seed_from_u64(0xC0FFEE);
    let mut worst_symmetry = 0.0_f64;
    let mut worst_conjugation = 0.0_f64;
    for _ in 0..50 {
        let edge_count = rng.random_range(1..=15usize);
        let tree = random_tree(&mut rng, edge_count, PotentialKind::PiecewiseReal);
        let rho = random_rho(&mut rng);
        let leaves = tree.leaf_order();
        let root = leaves[rng.random_range(0..leaves.len())];
        let plan = tree.plan_growth(root).unwrap();
        let m = synthesize(&tree, &plan, rho, &opts()).unwrap().weyl;
        worst_symmetry =
            worst_symmetry.max(m.symmetry_defect() / m.max_abs().max(1.0));
        let conj_rho = SpectralParameter::from_lambda(rho.lambda().conj());
        let m_conj = synthesize(&tree, &plan, conj_rho, &opts()).unwrap().weyl;
        worst_conjugation =
            worst_conjugation.max(compare(&m_conj, &m.conjugated()).unwrap());
    }
    assert!(worst_symmetry <= 1e-10, "symmetry defect {worst_symmetry}");
    assert!(
        worst_conjugation <= 1e-10,
        "conjugation defect {worst_conjugation}"
    );
    println!(
        "PASS criterion 4: symmetry defect {worst_symmetry:.3e}, conjugation defect \
         {worst_conjugation:.3e} over the draws of criterion 1"
    );
}

#[test]
fn criterion_5_path_merge_closed_form() {
    let tree = MetricTree::new(
        [],
        vec![
            Edge::new(0, 0, 1, 1.0, Potential::Zero),
            Edge::new(1, 1, 2, 1.0, Potential::Zero),
        ],
    );
    let plan = tree.plan_growth(VertexId(0)).unwrap();
    let rho = SpectralParameter::from_rho(c(1.0, 0.0));
    let m = synthesize(&tree, &plan, rho, &opts()).unwrap().weyl;
    let off = 1.0997501702946165; // 1/sin 2
    let diag = 0.4576575543602858; // -cos 2 / sin 2
    let mut worst = 0.0_f64;
    for (i, j, want) in [(0, 0, diag), (0, 1, off), (1, 0, off), (1, 1, diag)] {
        worst = worst.max((m.entry(i, j) - c(want, 0.0)).norm());
    }
    assert!(worst <= 1e-12, "deviation {worst} from the merged closed form");
    println!(
        "PASS criterion 5: two-segment path reproduces the length-2 closed form to {worst:.3e}"
    );
}

#[test]
fn criterion_6_wronskian_conservation() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5EED);
    let mut worst = 0.0_f64;
    for draw in 0..1000 {
        let length = rng.random_range(0.5..2.0);
        let potential = match draw % 4 {
            0 => Potential::Zero,
            1 => Potential::Constant(c(rng.random_range(-1.0..1.0), 0.0)),
            2 => random_potential(&mut rng, length, PotentialKind::PiecewiseReal),
            _ => {
                let n = rng.random_range(2..=200usize);
                Potential::Sampled(
                    (0..n).map(|_| c(rng.random_range(-1.0..1.0), 0.0)).collect(),
                )
            }
        };
        // |rho| up to 20, kept near the real axis so the endpoint data stays
        // at a scale where an absolute defect bound is meaningful
        let re: f64 = rng.random_range(0.3..20.0);
        let im = rng.random_range(0.0..(400.0 - re * re).sqrt().min(1.0));
        let rho = SpectralParameter::from_rho(c(re, im));
        let data = weyltree::fundamental_data(&potential, length, rho, &opts()).unwrap();
        worst = worst.max((data.wronskian() - c(1.0, 0.0)).norm());
    }
    assert!(worst <= 1e-9, "wronskian defect {worst}");
    println!("PASS criterion 6: wronskian defect {worst:.3e} over 1000 draws with |rho| <= 20");
}

#[test]
fn criterion_7_spectrum_scan() {
    let start = Instant::now();
    let tree = MetricTree::new(
        [],
        vec![Edge::new(0, 0, 1, std::f64::consts::PI, Potential::Zero)],
    );
    let found = dirichlet_scan(&tree, (0.5, 10.0), 400, &ScanOptions::default()).unwrap();
    let elapsed = start.elapsed().as_secs_f64();
    assert_eq!(found.len(), 3, "found {found:?}");
    let mut worst = 0.0_f64;
    for (got, want) in found.iter().zip([1.0, 4.0, 9.0]) {
        worst = worst.max((got - want).abs());
        assert!((got - want).abs() < 1e-6, "got {got}, want {want}");
    }
    assert!(elapsed < 2.0, "runtime {elapsed:.2} s exceeds 2 s");
    println!(
        "PASS criterion 7: scan found {{1, 4, 9}} with error {worst:.3e} in {elapsed:.2} s"
    );
}

#[test]
fn criterion_8_pole_growth_near_eigenvalues() {
    let tree = MetricTree::new(
        [],
        vec![Edge::new(0, 0, 1, std::f64::consts::PI, Potential::Zero)],
    );
    let found = dirichlet_scan(&tree, (0.5, 10.0), 400, &ScanOptions::default()).unwrap();
    assert_eq!(found.len(), 3);
    let plan = tree.plan_growth(VertexId(0)).unwrap();
    let mut ratios = Vec::new();
    for &lambda_star in &found {
        let coarse = synthesize(
            &tree,
            &plan,
            SpectralParameter::from_lambda(c(lambda_star, 1e-3)),
            &opts(),
        )
        .unwrap()
        .weyl
        .max_abs();
        let close = synthesize(
            &tree,
            &plan,
            SpectralParameter::from_lambda(c(lambda_star, 1e-4)),
            &opts(),
        )
        .unwrap()
        .weyl
        .max_abs();
        assert!(
            close > coarse,
            "no pole growth at lambda* = {lambda_star}: {close} vs {coarse}"
        );
        ratios.push(close / coarse);
    }
    println!(
        "PASS criterion 8: matrix magnitude grows toward each eigenvalue \
         (growth factors {ratios:.3?} for eps 1e-3 -> 1e-4)"
    );
}

#[test]
fn criterion_9_cli_contract() {
    let bin = env!("CARGO_BIN_EXE_weyltree");
    let fixture = |name: &str| {
        PathBuf::from(env!("CARGO_MANIFEST_DIR"))
            .join("tests/fixtures")
            .join(name)
            .to_string_lossy()
            .into_owned()
    };
    let run = |args: &[&str]| Command::new(bin).args(args).output().expect("binary runs");

    let parse = run(&["weyl", "--graph", &fixture("bad_syntax.txt"), "--rho", "1,0"]);
    assert_eq!(parse.status.code(), Some(2));
    let singular = run(&[
        "weyl",
        "--graph",
        &fixture("single_edge.txt"),
        "--rho",
        "3.141592653589793,0",
    ]);
    assert_eq!(singular.status.code(), Some(3));
    let invalid = run(&["weyl", "--graph", &fixture("triangle.txt"), "--rho", "1,0"]);
    assert_eq!(invalid.status.code(), Some(4));
    let tolerance = run(&[
        "verify",
        "--graph",
        &fixture("sampled_star.txt"),
        "--rho",
        "1.1,0.5",
        "--tolerance",
        "1e-16",
    ]);
    assert_eq!(tolerance.status.code(), Some(5));

    let args = [
        "weyl",
        "--graph",
        &fixture("random15.txt"),
        "--rho",
        "0.8,0.6",
        "--rho",
        "2.1,0.4",
    ];
    let first = run(&args);
    let second = run(&args);
    assert_eq!(first.status.code(), Some(0));
    assert_eq!(first.stdout, second.stdout, "stdout must be byte-identical");
    assert_eq!(first.stderr, second.stderr, "stderr must be byte-identical");

    println!(
        "PASS criterion 9: CLI exit codes 2/3/4/5 observed and output is byte-deterministic"
    );
}
