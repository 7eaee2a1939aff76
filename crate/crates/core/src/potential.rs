//! Edge potentials, described in the local coordinate of their edge.

use num_complex::Complex64;

/// Potential q(x) on a single edge, x in [0, L]. Complex values are allowed
/// throughout; real potentials are the common case.
#[derive(Clone, Debug, PartialEq)]
pub enum Potential {
    Zero,
    Constant(Complex64),
    /// Constant pieces as (width, value) pairs, laid out left to right from
    /// x = 0. Widths must be positive and sum to the edge length.
    PiecewiseConstant(Vec<(f64, Complex64)>),
    /// Uniform samples over [0, L] (at least two), linearly interpolated.
    Sampled(Vec<Complex64>),
}

impl Potential {
    /// Build a piecewise-constant potential from breakpoints, the way graph
    /// files describe it: value k holds on [x_{k-1}, x_k) with x_0 = 0, and
    /// the final breakpoint must equal the edge length exactly.
    pub fn piecewise_from_breakpoints(
        breakpoints: &[f64],
        values: &[Complex64],
        length: f64,
    ) -> Result<Potential, String> {
        if breakpoints.is_empty() {
            return Err("piecewise potential needs at least one piece".into());
        }
        if breakpoints.len() != values.len() {
            return Err(format!(
                "piecewise potential has {} breakpoints but {} values",
                breakpoints.len(),
                values.len()
            ));
        }
        let mut prev = 0.0;
        let mut pieces = Vec::with_capacity(breakpoints.len());
        for (&x, &v) in breakpoints.iter().zip(values) {
            if !x.is_finite() || x <= prev {
                return Err(format!(
                    "piecewise breakpoints must be finite and strictly increasing (got {x} after {prev})"
                ));
            }
            pieces.push((x - prev, v));
            prev = x;
        }
        if prev != length {
            return Err(format!(
                "last piecewise breakpoint {prev} must equal the edge length {length}"
            ));
        }
        Ok(Potential::PiecewiseConstant(pieces))
    }

    /// Breakpoint view of a piecewise-constant potential (cumulative widths).
    pub fn breakpoints(&self) -> Option<Vec<f64>> {
        match self {
            Potential::PiecewiseConstant(pieces) => {
                let mut acc = 0.0;
                Some(
                    pieces
                        .iter()
                        .map(|(w, _)| {
                            acc += w;
                            acc
                        })
                        .collect(),
                )
            }
            _ => None,
        }
    }

    /// Check well-formedness for an edge of the given length.
    pub fn check(&self, length: f64) -> Result<(), String> {
        if !(length.is_finite() && length > 0.0) {
            return Err(format!("edge length must be positive and finite, got {length}"));
        }
        match self {
            Potential::Zero => Ok(()),
            Potential::Constant(v) => {
                if v.re.is_finite() && v.im.is_finite() {
                    Ok(())
                } else {
                    Err("constant potential value is not finite".into())
                }
            }
            Potential::PiecewiseConstant(pieces) => {
                if pieces.is_empty() {
                    return Err("piecewise potential has no pieces".into());
                }
                let mut sum = 0.0;
                for (w, v) in pieces {
                    if !(w.is_finite() && *w > 0.0) {
                        return Err(format!("piecewise piece width {w} must be positive"));
                    }
                    if !(v.re.is_finite() && v.im.is_finite()) {
                        return Err("piecewise potential value is not finite".into());
                    }
                    sum += w;
                }
                // Widths come from exact breakpoint differences; allow only
                // rounding-level slack against the edge length.
                if (sum - length).abs() > 1e-12 * length.max(1.0) {
                    return Err(format!(
                        "piecewise pieces span {sum} but the edge has length {length}"
                    ));
                }
                Ok(())
            }
            Potential::Sampled(values) => {
                if values.len() < 2 {
                    return Err("sampled potential needs at least 2 samples".into());
                }
                if values.iter().any(|v| !(v.re.is_finite() && v.im.is_finite())) {
                    return Err("sampled potential value is not finite".into());
                }
                Ok(())
            }
        }
    }

    /// The potential seen from the opposite end of the edge, q(L - x).
    /// Reversing twice is the identity.
    pub fn reversed(&self) -> Potential {
        match self {
            Potential::Zero => Potential::Zero,
            Potential::Constant(v) => Potential::Constant(*v),
            Potential::PiecewiseConstant(pieces) => {
                Potential::PiecewiseConstant(pieces.iter().rev().copied().collect())
            }
            Potential::Sampled(values) => {
                Potential::Sampled(values.iter().rev().copied().collect())
            }
        }
    }

    pub fn is_real(&self) -> bool {
        match self {
            Potential::Zero => true,
            Potential::Constant(v) => v.im == 0.0,
            Potential::PiecewiseConstant(pieces) => pieces.iter().all(|(_, v)| v.im == 0.0),
            Potential::Sampled(values) => values.iter().all(|v| v.im == 0.0),
        }
    }
}
