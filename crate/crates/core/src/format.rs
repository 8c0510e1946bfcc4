//! The `.ohx` text format and its JSON mirror.
//!
//! ```text
//! ohx linear 3 5
//! # comment lines start with '#'
//! 0 1 2
//! 1 2 4
//! ```
//!
//! The header is `ohx <mode> <r> <n>`; each further line is one edge given as
//! `r` strictly increasing vertex indices. The JSON mirror is an object with
//! fields `mode`, `r`, `n`, `edges` and an optional `weights` array aligned
//! with `edges` (weights are exact rationals written as `"p/q"`, `"p"` or a
//! JSON integer).

use std::fmt::Write as _;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed};
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::hypergraph::{Edge, Hypergraph, Mode, WeightedHypergraph};

/// Writes a hypergraph in `.ohx` text form.
pub fn to_ohx(h: &Hypergraph) -> String {
    let mut out = format!("ohx {} {} {}\n", h.mode(), h.r(), h.n());
    for e in h.edges() {
        let line = e.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(" ");
        let _ = writeln!(out, "{line}");
    }
    out
}

/// Parses `.ohx` text. Errors carry the 1-based line number.
pub fn parse_ohx(text: &str) -> Result<Hypergraph> {
    let mut header: Option<(Mode, usize, usize)> = None;
    let mut edges: Vec<Edge> = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let err = |message: String| Error::Parse { line: line_no, message };
        match header {
            None => {
                let parts: Vec<&str> = line.split_whitespace().collect();
                if parts.len() != 4 || parts[0] != "ohx" {
                    return Err(err(format!("expected header `ohx <mode> <r> <n>`, found `{line}`")));
                }
                let mode = Mode::from_str(parts[1]).map_err(|e| err(e.to_string()))?;
                let r: usize = parts[2].parse().map_err(|_| err(format!("bad uniformity `{}`", parts[2])))?;
                let n: usize = parts[3].parse().map_err(|_| err(format!("bad vertex count `{}`", parts[3])))?;
                if r == 0 {
                    return Err(err("uniformity must be positive".into()));
                }
                header = Some((mode, r, n));
            }
            Some((_, r, n)) => {
                let edge = line
                    .split_whitespace()
                    .map(|t| t.parse::<usize>().map_err(|_| err(format!("bad vertex `{t}`"))))
                    .collect::<Result<Vec<_>>>()?;
                if edge.len() != r {
                    return Err(err(format!("edge has {} vertices, expected {r}", edge.len())));
                }
                if edge.windows(2).any(|w| w[0] >= w[1]) {
                    return Err(err(format!("edge {edge:?} is not strictly increasing")));
                }
                if edge[r - 1] >= n {
                    return Err(err(format!("vertex {} out of range 0..{n}", edge[r - 1])));
                }
                edges.push(edge);
            }
        }
    }
    let (mode, r, n) = header.ok_or(Error::Parse { line: 1, message: "missing `ohx` header".into() })?;
    Hypergraph::new(n, r, mode, edges)
}

/// Serialized JSON shape shared by plain and weighted hypergraphs.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HypergraphDoc {
    pub mode: Mode,
    pub r: usize,
    pub n: usize,
    pub edges: Vec<Edge>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub weights: Option<Vec<WeightValue>>,
}

/// A weight as it appears in JSON.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum WeightValue {
    Int(i64),
    Text(String),
}

impl WeightValue {
    pub fn to_rational(&self) -> Result<BigRational> {
        match self {
            WeightValue::Int(v) => Ok(BigRational::from_integer(BigInt::from(*v))),
            WeightValue::Text(s) => parse_rational(s),
        }
    }
}

impl From<&BigRational> for WeightValue {
    fn from(q: &BigRational) -> Self {
        WeightValue::Text(format_rational(q))
    }
}

/// `"p/q"` for non-integers, `"p"` otherwise.
pub fn format_rational(q: &BigRational) -> String {
    if q.is_integer() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

pub(crate) fn ser_rational<S: serde::Serializer>(q: &BigRational, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&format_rational(q))
}

pub(crate) fn ser_opt_rational<S: serde::Serializer>(
    q: &Option<BigRational>,
    s: S,
) -> std::result::Result<S::Ok, S::Error> {
    match q {
        Some(q) => s.serialize_str(&format_rational(q)),
        None => s.serialize_none(),
    }
}

/// Parses `p`, `p/q` or a finite decimal such as `0.25`.
pub fn parse_rational(s: &str) -> Result<BigRational> {
    let s = s.trim();
    let bad = || invalid(format!("cannot parse `{s}` as a rational"));
    if let Some((p, q)) = s.split_once('/') {
        let p: BigInt = p.trim().parse().map_err(|_| bad())?;
        let q: BigInt = q.trim().parse().map_err(|_| bad())?;
        if q == BigInt::from(0) {
            return Err(bad());
        }
        return Ok(BigRational::new(p, q));
    }
    if let Some((int, frac)) = s.split_once('.') {
        if frac.is_empty() || !frac.bytes().all(|b| b.is_ascii_digit()) {
            return Err(bad());
        }
        let negative = int.starts_with('-');
        let int_part: BigInt =
            if int.is_empty() || int == "-" { BigInt::from(0) } else { int.parse().map_err(|_| bad())? };
        let frac_part: BigInt = frac.parse().map_err(|_| bad())?;
        let scale = num_traits::pow(BigInt::from(10), frac.len());
        let magnitude = BigRational::from_integer(int_part.abs()) + BigRational::new(frac_part, scale);
        return Ok(if negative { -magnitude } else { magnitude });
    }
    Ok(BigRational::from_integer(s.parse().map_err(|_| bad())?))
}

impl HypergraphDoc {
    pub fn from_hypergraph(h: &Hypergraph) -> Self {
        HypergraphDoc { mode: h.mode(), r: h.r(), n: h.n(), edges: h.edges().to_vec(), weights: None }
    }

    pub fn from_weighted(w: &WeightedHypergraph) -> Self {
        let (edges, weights): (Vec<_>, Vec<_>) = w.iter().map(|(e, x)| (e.clone(), WeightValue::from(x))).unzip();
        HypergraphDoc { mode: w.mode(), r: w.r(), n: w.n(), edges, weights: Some(weights) }
    }

    pub fn to_hypergraph(&self) -> Result<Hypergraph> {
        Hypergraph::new(self.n, self.r, self.mode, &self.edges)
    }

    /// Weighted view; edges without a `weights` array get weight 1.
    pub fn to_weighted(&self) -> Result<WeightedHypergraph> {
        let mut w = WeightedHypergraph::new(self.n, self.r, self.mode)?;
        match &self.weights {
            None => {
                for e in &self.edges {
                    w.add(e, BigRational::one())?;
                }
            }
            Some(ws) => {
                if ws.len() != self.edges.len() {
                    return Err(invalid(format!("{} weights given for {} edges", ws.len(), self.edges.len())));
                }
                for (e, x) in self.edges.iter().zip(ws) {
                    w.add(e, x.to_rational()?)?;
                }
            }
        }
        Ok(w)
    }
}

pub fn to_json(h: &Hypergraph) -> String {
    serde_json::to_string_pretty(&HypergraphDoc::from_hypergraph(h)).expect("serializable")
}

pub fn weighted_to_json(w: &WeightedHypergraph) -> String {
    serde_json::to_string_pretty(&HypergraphDoc::from_weighted(w)).expect("serializable")
}

pub fn parse_json(text: &str) -> Result<HypergraphDoc> {
    Ok(serde_json::from_str(text)?)
}

/// Reads either format, deciding by the first non-blank character.
pub fn parse_any(text: &str) -> Result<HypergraphDoc> {
    if text.trim_start().starts_with('{') {
        parse_json(text)
    } else {
        Ok(HypergraphDoc::from_hypergraph(&parse_ohx(text)?))
    }
}
