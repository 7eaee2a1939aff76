//! Line-oriented graph file format.
//!
//! ```text
//! # comment
//! vertex 7
//! edge 0 0 1 length=1.5 potential=zero
//! edge 1 1 2 length=1 potential=const:0.5,-0.25
//! edge 2 1 3 length=1 potential=pwc:0.3:1;1.0:2,0.5
//! edge 3 1 4 length=2 potential=samples:0;0.1,0;0.4;0.9
//! ```
//!
//! Potentials are written in the edge's local coordinate with x = 0 at the
//! first listed vertex. `pwc` pieces are `x_k:value` with value k holding on
//! [x_{k-1}, x_k); the final x_k must equal the edge length. `samples` are a
//! uniform grid over [0, L]. Complex scalars are `re` or `re,im`.

use crate::potential::Potential;
use crate::tree::{Edge, MetricTree, VertexId};
use num_complex::Complex64;

#[derive(Debug, Clone, thiserror::Error)]
#[error("line {line}: {message}")]
pub struct ParseError {
    pub line: usize,
    pub message: String,
}

fn err(line: usize, message: impl Into<String>) -> ParseError {
    ParseError {
        line,
        message: message.into(),
    }
}

fn parse_f64(text: &str, line: usize, what: &str) -> Result<f64, ParseError> {
    text.parse::<f64>()
        .map_err(|_| err(line, format!("cannot parse {what} `{text}` as a number")))
}

fn parse_u64(text: &str, line: usize, what: &str) -> Result<u64, ParseError> {
    text.parse::<u64>()
        .map_err(|_| err(line, format!("cannot parse {what} `{text}` as a non-negative integer")))
}

fn parse_complex(text: &str, line: usize, what: &str) -> Result<Complex64, ParseError> {
    let mut parts = text.splitn(2, ',');
    let re = parse_f64(parts.next().unwrap_or(""), line, what)?;
    let im = match parts.next() {
        Some(im_text) => parse_f64(im_text, line, what)?,
        None => 0.0,
    };
    Ok(Complex64::new(re, im))
}

fn parse_potential(spec: &str, length: f64, line: usize) -> Result<Potential, ParseError> {
    if spec == "zero" {
        return Ok(Potential::Zero);
    }
    if let Some(rest) = spec.strip_prefix("const:") {
        return Ok(Potential::Constant(parse_complex(rest, line, "constant potential")?));
    }
    if let Some(rest) = spec.strip_prefix("pwc:") {
        let mut breakpoints = Vec::new();
        let mut values = Vec::new();
        for piece in rest.split(';') {
            let mut halves = piece.splitn(2, ':');
            let x_text = halves.next().unwrap_or("");
            let v_text = halves
                .next()
                .ok_or_else(|| err(line, format!("pwc piece `{piece}` must look like x:value")))?;
            breakpoints.push(parse_f64(x_text, line, "pwc breakpoint")?);
            values.push(parse_complex(v_text, line, "pwc value")?);
        }
        return Potential::piecewise_from_breakpoints(&breakpoints, &values, length)
            .map_err(|reason| err(line, reason));
    }
    if let Some(rest) = spec.strip_prefix("samples:") {
        let values = rest
            .split(';')
            .map(|s| parse_complex(s, line, "sample"))
            .collect::<Result<Vec<_>, _>>()?;
        if values.len() < 2 {
            return Err(err(line, "samples potential needs at least 2 samples"));
        }
        return Ok(Potential::Sampled(values));
    }
    Err(err(
        line,
        format!("unknown potential `{spec}` (expected zero, const:, pwc: or samples:)"),
    ))
}

/// Parse a whole graph file. Errors carry the 1-based source line.
pub fn parse_graph(text: &str) -> Result<MetricTree, ParseError> {
    let mut vertices = Vec::new();
    let mut edges: Vec<Edge> = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let content = raw.split('#').next().unwrap_or("");
        let mut tokens = content.split_whitespace();
        let Some(directive) = tokens.next() else {
            continue;
        };
        match directive {
            "vertex" => {
                let id_text = tokens
                    .next()
                    .ok_or_else(|| err(line, "vertex line needs an id"))?;
                vertices.push(VertexId(parse_u64(id_text, line, "vertex id")?));
                if let Some(extra) = tokens.next() {
                    return Err(err(line, format!("unexpected token `{extra}` after vertex id")));
                }
            }
            "edge" => {
                let id_text = tokens.next().ok_or_else(|| err(line, "edge line needs an id"))?;
                let a_text = tokens
                    .next()
                    .ok_or_else(|| err(line, "edge line needs two vertex ids"))?;
                let b_text = tokens
                    .next()
                    .ok_or_else(|| err(line, "edge line needs two vertex ids"))?;
                let id = parse_u64(id_text, line, "edge id")?;
                let a = parse_u64(a_text, line, "vertex id")?;
                let b = parse_u64(b_text, line, "vertex id")?;
                let mut length: Option<f64> = None;
                let mut potential_text: Option<String> = None;
                for token in tokens {
                    if let Some(v) = token.strip_prefix("length=") {
                        length = Some(parse_f64(v, line, "length")?);
                    } else if let Some(v) = token.strip_prefix("potential=") {
                        potential_text = Some(v.to_string());
                    } else {
                        return Err(err(line, format!("unexpected token `{token}` on edge line")));
                    }
                }
                let length = length.ok_or_else(|| err(line, "edge line is missing length="))?;
                let potential_text =
                    potential_text.ok_or_else(|| err(line, "edge line is missing potential="))?;
                let potential = parse_potential(&potential_text, length, line)?;
                edges.push(Edge::new(id, a, b, length, potential));
            }
            other => {
                return Err(err(
                    line,
                    format!("unknown directive `{other}` (expected vertex or edge)"),
                ));
            }
        }
    }
    Ok(MetricTree::new(vertices, edges))
}
