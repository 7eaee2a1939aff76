//! Dirichlet-spectrum localization.
//!
//! The Weyl matrix has poles exactly at the Dirichlet eigenvalues, so the
//! matrix itself is useless there; instead the scan watches the reciprocal
//! condition estimate of the oracle's global system on a real-lambda grid,
//! refines every interior local minimum by golden-section search, and keeps
//! the refined points whose conditioning collapses relative to the grid
//! median.

use crate::error::WeylError;
use crate::linalg::LuFactors;
use crate::oracle::assemble_global;
use crate::solver::{SolverOptions, SpectralParameter};
use crate::tree::MetricTree;
use num_complex::Complex64;

#[derive(Clone, Debug)]
pub struct ScanOptions {
    pub solver: SolverOptions,
    /// A refined minimum counts as an eigenvalue when its rcond falls below
    /// this fraction of the median grid rcond.
    pub detection_ratio: f64,
    pub golden_max_iters: usize,
    pub golden_width: f64,
}

impl Default for ScanOptions {
    fn default() -> Self {
        ScanOptions {
            solver: SolverOptions::default(),
            detection_ratio: 1e-6,
            golden_max_iters: 60,
            golden_width: 1e-10,
        }
    }
}

fn rcond_at(tree: &MetricTree, lambda: f64, options: &SolverOptions) -> Result<f64, WeylError> {
    let rho = SpectralParameter::from_lambda(Complex64::new(lambda, 0.0));
    let system = assemble_global(tree, rho, options)?;
    Ok(LuFactors::compute(&system.matrix).rcond_one())
}

const INV_GOLDEN: f64 = 0.618_033_988_749_894_8;

fn golden_minimize(
    mut f: impl FnMut(f64) -> Result<f64, WeylError>,
    mut a: f64,
    mut b: f64,
    max_iters: usize,
    width: f64,
) -> Result<f64, WeylError> {
    let mut c = b - INV_GOLDEN * (b - a);
    let mut d = a + INV_GOLDEN * (b - a);
    let mut fc = f(c)?;
    let mut fd = f(d)?;
    for _ in 0..max_iters {
        if (b - a).abs() <= width {
            break;
        }
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_GOLDEN * (b - a);
            fc = f(c)?;
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_GOLDEN * (b - a);
            fd = f(d)?;
        }
    }
    Ok(0.5 * (a + b))
}

/// Approximate real Dirichlet eigenvalues in `interval`, deduplicated
/// within the grid resolution and sorted ascending. An empty result means
/// no conditioning dip was found.
pub fn dirichlet_scan(
    tree: &MetricTree,
    interval: (f64, f64),
    grid_points: usize,
    options: &ScanOptions,
) -> Result<Vec<f64>, WeylError> {
    let (lo, hi) = interval;
    if !(lo.is_finite() && hi.is_finite() && lo < hi) {
        return Err(WeylError::InvalidInput(format!(
            "interval [{lo}, {hi}] must be finite and increasing"
        )));
    }
    if grid_points < 2 {
        return Err(WeylError::InvalidInput(
            "the scan needs at least 2 grid points".into(),
        ));
    }
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

    let spacing = (hi - lo) / (grid_points - 1) as f64;
    let grid: Vec<f64> = (0..grid_points)
        .map(|k| lo + k as f64 * spacing)
        .collect();
    let mut values = Vec::with_capacity(grid_points);
    for &lambda in &grid {
        values.push(rcond_at(tree, lambda, &options.solver)?);
    }
    let mut sorted = values.clone();
    sorted.sort_by(|a, b| a.total_cmp(b));
    let median = sorted[sorted.len() / 2];
    let threshold = options.detection_ratio * median;

    let mut found: Vec<f64> = Vec::new();
    for k in 1..grid_points - 1 {
        if !(values[k] < values[k - 1] && values[k] <= values[k + 1]) {
            continue;
        }
        let refined = golden_minimize(
            |lambda| rcond_at(tree, lambda, &options.solver),
            grid[k - 1],
            grid[k + 1],
            options.golden_max_iters,
            options.golden_width,
        )?;
        if rcond_at(tree, refined, &options.solver)? < threshold {
            found.push(refined);
        }
    }
    found.sort_by(|a, b| a.total_cmp(b));
    found.dedup_by(|a, b| (*a - *b).abs() <= spacing);
    Ok(found)
}
