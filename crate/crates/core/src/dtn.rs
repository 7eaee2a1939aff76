//! Dirichlet-to-Neumann application of a Weyl matrix.

use crate::error::WeylError;
use crate::synthesis::WeylMatrix;
use num_complex::Complex64;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BoundaryRole {
    Dirichlet,
    Neumann,
}

/// Boundary values at the leaves, in canonical (ascending id) leaf order.
#[derive(Clone, Debug, PartialEq)]
pub struct BoundaryData {
    pub role: BoundaryRole,
    pub values: Vec<Complex64>,
}

impl BoundaryData {
    pub fn dirichlet(values: Vec<Complex64>) -> BoundaryData {
        BoundaryData {
            role: BoundaryRole::Dirichlet,
            values,
        }
    }
}

/// Map Dirichlet data to Neumann data: the outward derivatives at the
/// leaves are M^T f, i.e. (d u)_j = sum_i M_ij f_i.
pub fn apply_dtn(weyl: &WeylMatrix, f: &BoundaryData) -> Result<BoundaryData, WeylError> {
    if f.role != BoundaryRole::Dirichlet {
        return Err(WeylError::InvalidInput(
            "apply_dtn takes Dirichlet boundary data".into(),
        ));
    }
    let m = weyl.dim();
    if f.values.len() != m {
        return Err(WeylError::DimensionMismatch(format!(
            "{} boundary values for {} leaves",
            f.values.len(),
            m
        )));
    }
    let mut out = vec![Complex64::new(0.0, 0.0); m];
    for (j, slot) in out.iter_mut().enumerate() {
        for (i, value) in f.values.iter().enumerate() {
            *slot += weyl.entry(i, j) * value;
        }
    }
    Ok(BoundaryData {
        role: BoundaryRole::Neumann,
        values: out,
    })
}
