//! Fundamental solutions of the edge equation -y'' + q(x) y = rho^2 y.
//!
//! `fundamental_data` propagates the pair of solutions phi (phi(0) = 1,
//! phi'(0) = 0) and S (S(0) = 0, S'(0) = 1) to the far endpoint x = L. Zero,
//! constant and piecewise-constant potentials use exact per-piece 2x2
//! propagators; sampled potentials use classical fixed-step fourth-order
//! Runge-Kutta on the first-order system (y, y')' = (y', (q - rho^2) y),
//! with steps aligned to the sample grid so the integrand stays smooth
//! within every step.

use crate::potential::Potential;
use num_complex::Complex64;

/// Spectral parameter rho with lambda = rho^2, normalized so Im rho >= 0
/// (and Re rho >= 0 on the real axis); rho and -rho describe the same
/// lambda and all results depend on rho only through lambda.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SpectralParameter {
    rho: Complex64,
    lambda: Complex64,
}

impl SpectralParameter {
    pub fn from_rho(rho: Complex64) -> SpectralParameter {
        let normalized = if rho.im < 0.0 || (rho.im == 0.0 && rho.re < 0.0) {
            -rho
        } else {
            rho
        };
        SpectralParameter {
            rho: normalized,
            lambda: normalized * normalized,
        }
    }

    /// Keeps `lambda` exactly as given; rho is the square root normalized
    /// into the closed upper half plane.
    pub fn from_lambda(lambda: Complex64) -> SpectralParameter {
        let root = lambda.sqrt();
        let normalized = if root.im < 0.0 || (root.im == 0.0 && root.re < 0.0) {
            -root
        } else {
            root
        };
        SpectralParameter {
            rho: normalized,
            lambda,
        }
    }

    pub fn rho(&self) -> Complex64 {
        self.rho
    }

    pub fn lambda(&self) -> Complex64 {
        self.lambda
    }

    pub fn is_finite(&self) -> bool {
        self.rho.re.is_finite() && self.rho.im.is_finite()
    }
}

/// Values of the fundamental solutions at the far endpoint of an edge.
/// The Wronskian phi * ds - dphi * s is identically 1.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EndpointData {
    pub phi: Complex64,
    pub dphi: Complex64,
    pub s: Complex64,
    pub ds: Complex64,
}

impl EndpointData {
    pub fn wronskian(&self) -> Complex64 {
        self.phi * self.ds - self.dphi * self.s
    }
}

/// Knobs shared by the propagation and the linear-algebra layers.
#[derive(Clone, Debug)]
pub struct SolverOptions {
    /// Runge-Kutta steps per unit length and per unit of (1 + |rho|).
    pub steps_per_unit: f64,
    /// Lower bound on the step count of a sampled-potential edge.
    pub min_steps: usize,
    /// Hard cap on the step count of a single edge.
    pub max_steps: usize,
    /// |S(L)| below this (relative to max(1, |phi(L)|)) marks a Dirichlet
    /// eigenvalue of the segment.
    pub singularity_threshold: f64,
    /// Reciprocal-condition estimates below this mark a singular solve.
    pub rcond_threshold: f64,
}

impl Default for SolverOptions {
    fn default() -> Self {
        SolverOptions {
            steps_per_unit: 100.0,
            min_steps: 64,
            max_steps: 50_000_000,
            singularity_threshold: 1e-12,
            rcond_threshold: 1e-12,
        }
    }
}

#[derive(Debug, Clone, thiserror::Error)]
pub enum SolverError {
    #[error("non-finite input: {0}")]
    NonFinite(String),
    #[error("edge length must be positive and finite, got {0}")]
    BadLength(f64),
    #[error("malformed potential: {0}")]
    BadPotential(String),
    #[error("sampled edge needs {required} integration steps, above the maximum {max}")]
    StepOverflow { required: usize, max: usize },
}

/// cos(z) and sin(z)/z, with series near z = 0 to avoid cancellation.
fn cos_sinc(z: Complex64) -> (Complex64, Complex64) {
    if z.norm() < 1e-6 {
        let z2 = z * z;
        let one = Complex64::new(1.0, 0.0);
        let cos = one - z2 * 0.5 + z2 * z2 * (1.0 / 24.0);
        let sinc = one - z2 * (1.0 / 6.0) + z2 * z2 * (1.0 / 120.0);
        (cos, sinc)
    } else {
        (z.cos(), z.sin() / z)
    }
}

// Transfer matrix [[phi, S], [phi', S']] stored row-major.
type Transfer = [Complex64; 4];

const IDENTITY: fn() -> Transfer = || {
    [
        Complex64::new(1.0, 0.0),
        Complex64::new(0.0, 0.0),
        Complex64::new(0.0, 0.0),
        Complex64::new(1.0, 0.0),
    ]
};

fn compose(left: &Transfer, right: &Transfer) -> Transfer {
    [
        left[0] * right[0] + left[1] * right[2],
        left[0] * right[1] + left[1] * right[3],
        left[2] * right[0] + left[3] * right[2],
        left[2] * right[1] + left[3] * right[3],
    ]
}

/// Exact propagator over a piece of width `h` with constant potential `q`:
/// with w = sqrt(lambda - q), the matrix is
/// [[cos(wh), sin(wh)/w], [-w sin(wh), cos(wh)]]; every entry is even in w,
/// so the branch of the square root does not matter.
fn constant_piece(lambda: Complex64, q: Complex64, h: f64) -> Transfer {
    let w2 = lambda - q;
    let z = w2.sqrt() * h;
    let (cos, sinc) = cos_sinc(z);
    let s_over_w = sinc * h;
    [cos, s_over_w, -w2 * s_over_w, cos]
}

fn propagate_pieces(lambda: Complex64, pieces: &[(f64, Complex64)]) -> Transfer {
    let mut t = IDENTITY();
    for &(width, q) in pieces {
        t = compose(&constant_piece(lambda, q, width), &t);
    }
    t
}

fn deriv(p: Complex64, y: &Transfer) -> Transfer {
    [y[2], y[3], p * y[0], p * y[1]]
}

fn axpy(y: &Transfer, scale: f64, k: &Transfer) -> Transfer {
    [
        y[0] + scale * k[0],
        y[1] + scale * k[1],
        y[2] + scale * k[2],
        y[3] + scale * k[3],
    ]
}

fn propagate_sampled(
    lambda: Complex64,
    values: &[Complex64],
    length: f64,
    rho_mag: f64,
    options: &SolverOptions,
) -> Result<Transfer, SolverError> {
    let intervals = values.len() - 1;
    let base = (options.steps_per_unit * length * (1.0 + rho_mag)).ceil() as usize;
    let base = base.max(options.min_steps);
    let substeps = base.div_ceil(intervals).max(1);
    let total = substeps
        .checked_mul(intervals)
        .ok_or(SolverError::StepOverflow {
            required: usize::MAX,
            max: options.max_steps,
        })?;
    if total > options.max_steps {
        return Err(SolverError::StepOverflow {
            required: total,
            max: options.max_steps,
        });
    }
    let dx = length / intervals as f64;
    let h = dx / substeps as f64;
    let mut y = IDENTITY();
    for i in 0..intervals {
        let left = values[i];
        let slope = values[i + 1] - values[i];
        // potential at parameter t in [0, 1] across this interval
        let q_at = |t: f64| left + slope * t;
        for sub in 0..substeps {
            let t0 = sub as f64 / substeps as f64;
            let t_half = (sub as f64 + 0.5) / substeps as f64;
            let t1 = (sub as f64 + 1.0) / substeps as f64;
            let p0 = q_at(t0) - lambda;
            let p_half = q_at(t_half) - lambda;
            let p1 = q_at(t1) - lambda;
            let k1 = deriv(p0, &y);
            let k2 = deriv(p_half, &axpy(&y, h * 0.5, &k1));
            let k3 = deriv(p_half, &axpy(&y, h * 0.5, &k2));
            let k4 = deriv(p1, &axpy(&y, h, &k3));
            for c in 0..4 {
                y[c] += h / 6.0 * (k1[c] + 2.0 * k2[c] + 2.0 * k3[c] + k4[c]);
            }
        }
    }
    Ok(y)
}

/// phi, phi', S, S' at x = L for one oriented edge.
pub fn fundamental_data(
    potential: &Potential,
    length: f64,
    rho: SpectralParameter,
    options: &SolverOptions,
) -> Result<EndpointData, SolverError> {
    if !rho.is_finite() {
        return Err(SolverError::NonFinite(format!("rho = {}", rho.rho())));
    }
    if !(length.is_finite() && length > 0.0) {
        return Err(SolverError::BadLength(length));
    }
    potential.check(length).map_err(SolverError::BadPotential)?;
    let lambda = rho.lambda();
    let t = match potential {
        Potential::Zero => propagate_pieces(lambda, &[(length, Complex64::new(0.0, 0.0))]),
        Potential::Constant(q) => propagate_pieces(lambda, &[(length, *q)]),
        Potential::PiecewiseConstant(pieces) => propagate_pieces(lambda, pieces),
        Potential::Sampled(values) => {
            propagate_sampled(lambda, values, length, rho.rho().norm(), options)?
        }
    };
    Ok(EndpointData {
        phi: t[0],
        s: t[1],
        dphi: t[2],
        ds: t[3],
    })
}
