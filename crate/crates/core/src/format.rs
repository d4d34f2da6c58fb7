//! Line-oriented input formats.
//!
//! Theory files:
//!
//! ```text
//! # U(2) with one flavour and an extra U(1)
//! gl 2
//! torus 1
//! weight 1 0 0
//! weight 0 1 0
//! ```
//!
//! Quiver files use `vertex <name> V=<int> W=<int>` and `edge <out> <in>`.
//! Torus-sequence files list the inclusion matrix one `include` row at a time
//! and the projection matrix one `project` row at a time. Blank lines and
//! lines starting with `#` are ignored everywhere.

use thiserror::Error;

use crate::linalg::IntMatrix;
use crate::theory::{GaugeTheory, QuiverSpec, QuiverVertex, TheoryError, TorusSequence};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("line {line}: {message}")]
pub struct ParseError {
    /// 1-based; 0 when the error concerns the file as a whole.
    pub line: usize,
    pub message: String,
}

impl ParseError {
    fn new(line: usize, message: impl Into<String>) -> Self {
        Self { line, message: message.into() }
    }

    fn theory(line: usize, e: TheoryError) -> Self {
        Self::new(line, e.to_string())
    }
}

/// Non-comment lines with their 1-based numbers, split on whitespace.
fn directives(text: &str) -> impl Iterator<Item = (usize, Vec<&str>)> {
    text.lines().enumerate().filter_map(|(i, raw)| {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            return None;
        }
        Some((i + 1, line.split_whitespace().collect()))
    })
}

fn int<T: std::str::FromStr>(line: usize, token: &str) -> Result<T, ParseError> {
    token.parse().map_err(|_| ParseError::new(line, format!("expected an integer, found '{token}'")))
}

fn ints(line: usize, tokens: &[&str]) -> Result<Vec<i64>, ParseError> {
    tokens.iter().map(|t| int(line, t)).collect()
}

fn single<T: std::str::FromStr>(line: usize, directive: &str, args: &[&str]) -> Result<T, ParseError> {
    match args {
        [x] => int(line, x),
        _ => Err(ParseError::new(line, format!("'{directive}' takes exactly one integer"))),
    }
}

pub fn parse_theory(text: &str) -> Result<GaugeTheory, ParseError> {
    let mut gl = Vec::new();
    let mut torus: Option<usize> = None;
    let mut weights: Vec<(usize, Vec<i64>)> = Vec::new();
    for (line, tokens) in directives(text) {
        match (tokens[0], &tokens[1..]) {
            ("gl", args) => gl.push(single::<i64>(line, "gl", args)?),
            ("torus", args) => {
                if torus.is_some() {
                    return Err(ParseError::new(line, "duplicate 'torus' directive"));
                }
                torus = Some(single(line, "torus", args)?);
            }
            ("weight", args) => weights.push((line, ints(line, args)?)),
            (other, _) => return Err(ParseError::new(line, format!("unknown directive '{other}'"))),
        }
    }
    let torus = torus.unwrap_or(0);
    if let Some((index, &rank)) = gl.iter().enumerate().find(|(_, &n)| n <= 0) {
        return Err(ParseError::theory(0, TheoryError::NonpositiveRank { index, rank }));
    }
    let expected = gl.iter().sum::<i64>() as usize + torus;
    if let Some((line, w)) = weights.iter().find(|(_, w)| w.len() != expected) {
        let e = TheoryError::WeightLength { weight: w.clone(), len: w.len(), expected };
        return Err(ParseError::theory(*line, e));
    }
    GaugeTheory::new(gl, torus, weights.into_iter().map(|(_, w)| w).collect()).map_err(|e| ParseError::theory(0, e))
}

/// Canonical theory file; [`parse_theory`] reads it back to the same theory.
pub fn render_theory(theory: &GaugeTheory) -> String {
    let mut out = String::new();
    for n in theory.gl_factors() {
        out.push_str(&format!("gl {n}\n"));
    }
    if theory.torus_rank() > 0 || theory.gl_factors().is_empty() {
        out.push_str(&format!("torus {}\n", theory.torus_rank()));
    }
    for w in theory.weights() {
        out.push_str("weight");
        for x in w {
            out.push_str(&format!(" {x}"));
        }
        out.push('\n');
    }
    out
}

pub fn parse_quiver(text: &str) -> Result<QuiverSpec, ParseError> {
    let mut vertices: Vec<QuiverVertex> = Vec::new();
    let mut edges: Vec<(usize, String, String)> = Vec::new();
    for (line, tokens) in directives(text) {
        match (tokens[0], &tokens[1..]) {
            ("vertex", [name, rest @ ..]) => {
                if vertices.iter().any(|v| v.name == *name) {
                    return Err(ParseError::new(line, format!("duplicate vertex '{name}'")));
                }
                let (mut dim_v, mut dim_w) = (None, None);
                for kv in rest {
                    match kv.split_once('=') {
                        Some(("V", x)) if dim_v.is_none() => dim_v = Some(int(line, x)?),
                        Some(("W", x)) if dim_w.is_none() => dim_w = Some(int(line, x)?),
                        _ => return Err(ParseError::new(line, format!("unexpected vertex attribute '{kv}'"))),
                    }
                }
                let dim_v = dim_v.ok_or_else(|| ParseError::new(line, "vertex needs V=<int>"))?;
                vertices.push(QuiverVertex { name: name.to_string(), dim_v, dim_w: dim_w.unwrap_or(0) });
            }
            ("vertex", _) => return Err(ParseError::new(line, "'vertex' needs a name")),
            ("edge", [a, b]) => edges.push((line, a.to_string(), b.to_string())),
            ("edge", _) => return Err(ParseError::new(line, "'edge' takes two vertex names")),
            (other, _) => return Err(ParseError::new(line, format!("unknown directive '{other}'"))),
        }
    }
    for (line, a, b) in &edges {
        for name in [a, b] {
            if !vertices.iter().any(|v| &v.name == name) {
                return Err(ParseError::theory(*line, TheoryError::UnknownVertex(name.clone())));
            }
        }
    }
    QuiverSpec::new(vertices, edges.into_iter().map(|(_, a, b)| (a, b)).collect()).map_err(|e| ParseError::theory(0, e))
}

pub fn parse_sequence(text: &str) -> Result<TorusSequence, ParseError> {
    let mut include: Vec<(usize, Vec<i64>)> = Vec::new();
    let mut project: Vec<(usize, Vec<i64>)> = Vec::new();
    for (line, tokens) in directives(text) {
        match tokens[0] {
            "include" => include.push((line, ints(line, &tokens[1..])?)),
            "project" => project.push((line, ints(line, &tokens[1..])?)),
            other => return Err(ParseError::new(line, format!("unknown directive '{other}'"))),
        }
    }
    let d = if !include.is_empty() {
        include.len()
    } else if let Some((_, row)) = project.first() {
        row.len()
    } else {
        return Err(ParseError::new(0, "sequence file has no 'include' or 'project' rows"));
    };
    let k = include.first().map_or(0, |(_, r)| r.len());
    let matrix = |rows: &[(usize, Vec<i64>)], width: usize, what: &str| {
        if let Some((line, _)) = rows.iter().find(|(_, r)| r.len() != width) {
            return Err(ParseError::new(*line, format!("{what} row must have {width} entries")));
        }
        let plain: Vec<Vec<i64>> = rows.iter().map(|(_, r)| r.clone()).collect();
        Ok(IntMatrix::from_rows(&plain, width).expect("row widths checked"))
    };
    let inclusion = if include.is_empty() { IntMatrix::zeros(d, 0) } else { matrix(&include, k, "include")? };
    let projection = matrix(&project, d, "project")?;
    TorusSequence::new(inclusion, projection).map_err(|e| ParseError::theory(0, e))
}

/// Canonical sequence file.
pub fn render_sequence(s: &TorusSequence) -> String {
    let mut out = String::new();
    for row in s.inclusion().to_rows() {
        out.push_str("include");
        for x in row {
            out.push_str(&format!(" {x}"));
        }
        out.push('\n');
    }
    for row in s.projection().to_rows() {
        out.push_str("project");
        for x in row {
            out.push_str(&format!(" {x}"));
        }
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn theory_round_trip() {
        let text = "# two flavours\ngl 2\ntorus 1\nweight 1 0 0\nweight 0 1 0\n\nweight 0 0 -2\n";
        let th = parse_theory(text).unwrap();
        assert_eq!(th.gl_factors(), &[2]);
        assert_eq!(th.torus_rank(), 1);
        assert_eq!(parse_theory(&render_theory(&th)).unwrap(), th);
    }

    #[test]
    fn theory_errors_carry_lines() {
        let e = parse_theory("torus 1\nflavour 3\n").unwrap_err();
        assert_eq!(e.line, 2);
        assert!(e.message.contains("unknown directive"));
        let e = parse_theory("gl 2\nweight 1 0 0\n").unwrap_err();
        assert_eq!(e.line, 2);
        let e = parse_theory("torus x\n").unwrap_err();
        assert_eq!(e.line, 1);
        assert!(parse_theory("torus 1\ntorus 2\n").is_err());
        assert!(parse_theory("gl 0\n").is_err());
    }

    #[test]
    fn rank_zero_theory() {
        let th = parse_theory("torus 0\nweight\nweight\n").unwrap();
        assert_eq!(th.weights().len(), 2);
        assert_eq!(parse_theory(&render_theory(&th)).unwrap(), th);
    }

    #[test]
    fn quivers() {
        let q = parse_quiver("vertex a V=1 W=1\nedge a a\n").unwrap();
        assert_eq!(q.to_theory().weights(), &[vec![0], vec![1]]);
        let e = parse_quiver("vertex a V=1 W=1\n\nedge a b\n").unwrap_err();
        assert_eq!(e.line, 3);
        assert!(e.message.contains("'b'"));
        assert_eq!(parse_quiver("vertex a V=1\nloop a\n").unwrap_err().line, 2);
        assert!(parse_quiver("vertex a W=1\n").is_err());
    }

    #[test]
    fn sequences() {
        let s = parse_sequence("include 1\ninclude 1\nproject 1 -1\n").unwrap();
        assert_eq!(s.ambient_rank(), 2);
        assert_eq!(parse_sequence(&render_sequence(&s)).unwrap(), s);
        let torsion = parse_sequence("include 2\n").unwrap_err();
        assert!(torsion.message.contains("invariant factor 2"), "{}", torsion.message);
        let trivial_t = parse_sequence("project 1 0\nproject 0 1\n").unwrap();
        assert_eq!(trivial_t.inclusion().ncols(), 0);
        assert_eq!(parse_sequence("include 1\ninclude 1 2\n").unwrap_err().line, 2);
        assert!(parse_sequence("include 1\nmatrix 2\n").unwrap_err().message.contains("unknown"));
    }
}
