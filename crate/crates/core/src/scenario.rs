//! Protocol scenario files: `{"protocol": name, "params": {...}}`.
//!
//! | protocol           | params                                                        |
//! |--------------------|---------------------------------------------------------------|
//! | `switch`           | `u1`, `u2`, `control` (two amplitudes), `sys`, `project` (ket) |
//! | `collapse_qubit`   | `v`, `sys`                                                    |
//! | `collapse_general` | `v`, `sys`                                                    |
//! | `temporal_order`   | `u1`, `u2`, `p0`, `p1`, `sys`, `project` (ket)                |
//! | `temporal_bell`    | `ua1`, `ua2`, `ub1`, `ub2`, `p0`, `p1`, `sys_a`, `sys_b`       |
//! | `signaling`        | `kraus`, `dims`                                               |
//!
//! Matrices use the shared pair encoding; states are arrays of `[re, im]`.

use std::fmt;

use serde::Deserialize;
use serde_json::Value;

use crate::channels::Channel;
use crate::io::{state_from_pairs, LoadError, MatrixRepr};
use crate::matrix::{ComplexMatrix, StateVector};
use crate::protocols::{
    collapse_general, collapse_qubit, signaling_test, switch_superpose, temporal_bell, temporal_order,
    ProtocolOutcome, SignalingWitness,
};
use crate::Error;

pub const PROTOCOLS: [&str; 6] = [
    "switch",
    "collapse_qubit",
    "collapse_general",
    "temporal_order",
    "temporal_bell",
    "signaling",
];

#[derive(Debug)]
pub enum ScenarioError {
    UnknownProtocol(String),
    Load(LoadError),
}

impl fmt::Display for ScenarioError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ScenarioError::UnknownProtocol(p) => {
                write!(f, "unknown protocol {p:?} (expected one of {})", PROTOCOLS.join(", "))
            }
            ScenarioError::Load(e) => write!(f, "{e}"),
        }
    }
}

impl std::error::Error for ScenarioError {}

impl From<LoadError> for ScenarioError {
    fn from(e: LoadError) -> Self {
        ScenarioError::Load(e)
    }
}

impl From<Error> for ScenarioError {
    fn from(e: Error) -> Self {
        ScenarioError::Load(LoadError::Data(e))
    }
}

/// A numeric or boolean summary line.
#[derive(Debug, Clone, PartialEq)]
pub enum Scalar {
    Real(f64),
    Bool(bool),
    Text(String),
}

/// Everything a scenario run produces, in a fixed order.
#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioReport {
    pub protocol: String,
    pub branches: Vec<ProtocolOutcome>,
    pub summary: Vec<(String, Scalar)>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct ScenarioFile {
    protocol: String,
    params: Value,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct SwitchParams {
    u1: MatrixRepr,
    u2: MatrixRepr,
    control: [[f64; 2]; 2],
    sys: Vec<[f64; 2]>,
    project: Vec<[f64; 2]>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct CollapseParams {
    v: MatrixRepr,
    sys: Vec<[f64; 2]>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct TemporalParams {
    u1: MatrixRepr,
    u2: MatrixRepr,
    p0: f64,
    p1: f64,
    sys: Vec<[f64; 2]>,
    project: Vec<[f64; 2]>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct BellParams {
    ua1: MatrixRepr,
    ua2: MatrixRepr,
    ub1: MatrixRepr,
    ub2: MatrixRepr,
    p0: f64,
    p1: f64,
    sys_a: Vec<[f64; 2]>,
    sys_b: Vec<[f64; 2]>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct SignalingParams {
    kraus: Vec<MatrixRepr>,
    dims: Vec<usize>,
}

fn params<T: for<'de> Deserialize<'de>>(v: Value) -> Result<T, ScenarioError> {
    serde_json::from_value(v).map_err(|e| ScenarioError::Load(LoadError::Schema(e.to_string())))
}

fn ket_projector(pairs: &[[f64; 2]]) -> ComplexMatrix {
    state_from_pairs(pairs).projector()
}

fn witness_summary(prefix: &str, w: &Option<SignalingWitness>, out: &mut Vec<(String, Scalar)>) {
    if let Some(w) = w {
        out.push((format!("{prefix}_witness_distance"), Scalar::Real(w.distance)));
        out.push((format!("{prefix}_witness_first"), Scalar::Text(format_state(&w.first))));
        out.push((format!("{prefix}_witness_second"), Scalar::Text(format_state(&w.second))));
        out.push((format!("{prefix}_witness_partner"), Scalar::Text(format_state(&w.partner))));
    }
}

/// `[re,im;re,im;...]` with 12 decimals.
pub fn format_state(v: &StateVector) -> String {
    let parts: Vec<String> = v
        .amplitudes()
        .iter()
        .map(|z| format!("{},{}", fixed(z.re), fixed(z.im)))
        .collect();
    format!("[{}]", parts.join(";"))
}

/// Fixed 12-decimal formatting with negative zero folded to zero.
pub fn fixed(x: f64) -> String {
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    let s = format!("{x:.12}");
    if s.trim_start_matches('-').chars().all(|c| c == '0' || c == '.') {
        s.trim_start_matches('-').to_string()
    } else {
        s
    }
}

/// Parses and runs a scenario document.
pub fn run_scenario(doc: Value) -> Result<ScenarioReport, ScenarioError> {
    let file: ScenarioFile = params(doc)?;
    let mut summary = Vec::new();
    let branches = match file.protocol.as_str() {
        "switch" => {
            let p: SwitchParams = params(file.params)?;
            let c = (
                crate::C64::new(p.control[0][0], p.control[0][1]),
                crate::C64::new(p.control[1][0], p.control[1][1]),
            );
            let out = switch_superpose(
                &p.u1.to_matrix()?,
                &p.u2.to_matrix()?,
                c,
                &state_from_pairs(&p.sys),
                &ket_projector(&p.project),
            )?;
            vec![out]
        }
        "collapse_qubit" | "collapse_general" => {
            let p: CollapseParams = params(file.params)?;
            let v = p.v.to_matrix()?;
            let sys = state_from_pairs(&p.sys);
            let out = if file.protocol == "collapse_qubit" {
                collapse_qubit(&v, &sys)?
            } else {
                collapse_general(&v, &sys)?
            };
            let total: f64 = out.iter().map(|o| o.probability).sum();
            summary.push(("probability_total".into(), Scalar::Real(total)));
            out
        }
        "temporal_order" => {
            let p: TemporalParams = params(file.params)?;
            let out = temporal_order(
                &p.u1.to_matrix()?,
                &p.u2.to_matrix()?,
                p.p0,
                p.p1,
                &state_from_pairs(&p.sys),
                &ket_projector(&p.project),
            )?;
            summary.push(("x".into(), Scalar::Real(out.probability)));
            vec![out]
        }
        "temporal_bell" => {
            let p: BellParams = params(file.params)?;
            let r = temporal_bell(
                &p.ua1.to_matrix()?,
                &p.ua2.to_matrix()?,
                &p.ub1.to_matrix()?,
                &p.ub2.to_matrix()?,
                p.p0,
                p.p1,
                &state_from_pairs(&p.sys_a),
                &state_from_pairs(&p.sys_b),
            )?;
            summary.push(("x".into(), Scalar::Real(r.outcome.probability)));
            summary.push(("entanglement_entropy".into(), Scalar::Real(r.entanglement_entropy)));
            if let Some(c) = r.chsh_max {
                summary.push(("chsh_max".into(), Scalar::Real(c)));
            }
            vec![r.outcome]
        }
        "signaling" => {
            let p: SignalingParams = params(file.params)?;
            let kraus = p.kraus.iter().map(|m| m.to_matrix()).collect::<Result<Vec<_>, _>>()?;
            let ch = Channel::new(kraus)?;
            let r = signaling_test(&ch, &p.dims)?;
            summary.push(("a_to_b".into(), Scalar::Bool(r.a_to_b)));
            summary.push(("b_to_a".into(), Scalar::Bool(r.b_to_a)));
            witness_summary("a", &r.a_witness, &mut summary);
            witness_summary("b", &r.b_witness, &mut summary);
            vec![]
        }
        other => return Err(ScenarioError::UnknownProtocol(other.to_string())),
    };
    Ok(ScenarioReport {
        protocol: file.protocol,
        branches,
        summary,
    })
}
