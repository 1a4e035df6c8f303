//! JSON file schemas.
//!
//! A matrix is written as nested rows of `[re, im]` pairs. A flat row-major
//! list of pairs is also accepted on input for square matrices.

use std::fmt;

use serde::Deserialize;
use serde_json::{json, Value};

use crate::bases::{non_unitary_basis, schwinger_basis, BasisKind, BasisSet};
use crate::bipartite::BipartiteChannel;
use crate::channels::{Channel, ChoiMatrix};
use crate::matrix::{ComplexMatrix, StateVector, C64};
use crate::superops::SuperOp;
use crate::Error;

/// Failure while reading an input file.
#[derive(Debug)]
pub enum LoadError {
    /// Malformed JSON, with 1-based position.
    Syntax { line: usize, column: usize, message: String },
    /// Well-formed JSON that does not follow the schema.
    Schema(String),
    /// Schema-valid data rejected by the numerical core.
    Data(Error),
}

impl fmt::Display for LoadError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LoadError::Syntax { line, column, message } => write!(f, "line {line}, column {column}: {message}"),
            LoadError::Schema(m) => write!(f, "schema: {m}"),
            LoadError::Data(e) => write!(f, "{e}"),
        }
    }
}

impl std::error::Error for LoadError {}

impl From<Error> for LoadError {
    fn from(e: Error) -> Self {
        LoadError::Data(e)
    }
}

pub type LoadResult<T> = std::result::Result<T, LoadError>;

/// Parses JSON text, reporting syntax errors with their position.
pub fn parse_json(text: &str) -> LoadResult<Value> {
    serde_json::from_str(text).map_err(|e| {
        if e.is_syntax() || e.is_eof() {
            LoadError::Syntax {
                line: e.line(),
                column: e.column(),
                message: e.to_string(),
            }
        } else {
            LoadError::Schema(e.to_string())
        }
    })
}

#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
pub enum MatrixRepr {
    Nested(Vec<Vec<[f64; 2]>>),
    Flat(Vec<[f64; 2]>),
}

fn pair(p: &[f64; 2]) -> C64 {
    C64::new(p[0], p[1])
}

impl MatrixRepr {
    pub fn to_matrix(&self) -> LoadResult<ComplexMatrix> {
        match self {
            MatrixRepr::Nested(rows) => {
                let r = rows.len();
                let c = rows.first().map_or(0, |x| x.len());
                if rows.iter().any(|x| x.len() != c) {
                    return Err(LoadError::Schema("matrix rows have different lengths".into()));
                }
                let data = rows.iter().flat_map(|x| x.iter().map(pair)).collect();
                Ok(ComplexMatrix::new(r, c, data)?)
            }
            MatrixRepr::Flat(entries) => {
                let n = (entries.len() as f64).sqrt().round() as usize;
                if n * n != entries.len() {
                    return Err(LoadError::Schema(format!(
                        "flat matrix with {} entries is not square",
                        entries.len()
                    )));
                }
                Ok(ComplexMatrix::new(n, n, entries.iter().map(pair).collect())?)
            }
        }
    }
}

pub fn matrix_to_json(m: &ComplexMatrix) -> Value {
    Value::Array(
        (0..m.rows())
            .map(|r| Value::Array((0..m.cols()).map(|c| json!([m[(r, c)].re, m[(r, c)].im])).collect()))
            .collect(),
    )
}

pub fn state_to_json(v: &StateVector) -> Value {
    Value::Array(v.amplitudes().iter().map(|z| json!([z.re, z.im])).collect())
}

pub fn state_from_pairs(pairs: &[[f64; 2]]) -> StateVector {
    StateVector::from_amplitudes(pairs.iter().map(pair).collect())
}

fn from_value<T: for<'de> Deserialize<'de>>(v: Value) -> LoadResult<T> {
    serde_json::from_value(v).map_err(|e| LoadError::Schema(e.to_string()))
}

fn check_dim(m: &ComplexMatrix, n: usize, what: &str) -> LoadResult<()> {
    if m.rows() != n || m.cols() != n {
        return Err(LoadError::Data(Error::Dimension(format!(
            "{what} is {}x{}, expected {n}x{n}",
            m.rows(),
            m.cols()
        ))));
    }
    Ok(())
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct BasisFile {
    dim: usize,
    kind: String,
    #[serde(default)]
    ops: Option<Vec<MatrixRepr>>,
}

/// `{"dim", "kind", "ops"}`. Canonical kinds may omit `ops`.
pub fn basis_from_json(v: Value) -> LoadResult<BasisSet> {
    let f: BasisFile = from_value(v)?;
    let kind = BasisKind::parse(&f.kind).ok_or_else(|| LoadError::Schema(format!("unknown basis kind {:?}", f.kind)))?;
    match (kind, f.ops) {
        (BasisKind::NonUnitary, None) => Ok(non_unitary_basis(f.dim)?),
        (BasisKind::Schwinger, None) => Ok(schwinger_basis(f.dim)?),
        (BasisKind::Custom, None) => Err(LoadError::Schema("custom basis needs \"ops\"".into())),
        (_, Some(ops)) => {
            let ops = ops.iter().map(|m| m.to_matrix()).collect::<LoadResult<Vec<_>>>()?;
            for op in &ops {
                check_dim(op, f.dim, "basis operator")?;
            }
            let custom = BasisSet::custom(f.dim, ops)?;
            let canonical = match kind {
                BasisKind::NonUnitary => non_unitary_basis(f.dim)?,
                BasisKind::Schwinger => schwinger_basis(f.dim)?,
                BasisKind::Custom => return Ok(custom),
            };
            let same = canonical
                .ops()
                .iter()
                .zip(custom.ops())
                .all(|(a, b)| a.max_abs_diff(b) <= crate::Tolerances::DEFAULT.recon);
            if !same {
                return Err(LoadError::Data(Error::Contract(format!(
                    "operators do not match the {} family; use \"kind\": \"custom\"",
                    kind
                ))));
            }
            Ok(canonical)
        }
    }
}

pub fn basis_to_json(b: &BasisSet) -> Value {
    json!({
        "dim": b.dim(),
        "kind": b.kind().name(),
        "ops": b.ops().iter().map(matrix_to_json).collect::<Vec<_>>(),
    })
}

/// Parsed channel file. `dims` and `factors` are only present for bipartite input.
#[derive(Debug, Clone)]
pub struct ChannelInput {
    pub dim: usize,
    pub kraus: Vec<ComplexMatrix>,
    pub dims: Option<(usize, usize)>,
    pub factors: Option<Vec<(ComplexMatrix, ComplexMatrix)>>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct ChannelFile {
    dim: usize,
    kraus: Vec<MatrixRepr>,
    #[serde(default)]
    dims: Option<Vec<usize>>,
    #[serde(default)]
    factors: Option<Vec<[MatrixRepr; 2]>>,
}

/// `{"dim", "kraus"}` with optional `"dims": [dA, dB]` and `"factors"`.
pub fn channel_input_from_json(v: Value) -> LoadResult<ChannelInput> {
    let f: ChannelFile = from_value(v)?;
    if f.kraus.is_empty() {
        return Err(LoadError::Schema("\"kraus\" must not be empty".into()));
    }
    let kraus = f.kraus.iter().map(|m| m.to_matrix()).collect::<LoadResult<Vec<_>>>()?;
    for k in &kraus {
        check_dim(k, f.dim, "Kraus operator")?;
    }
    let dims = match f.dims.as_deref() {
        None => None,
        Some(&[a, b]) => {
            if a * b != f.dim {
                return Err(LoadError::Data(Error::Dimension(format!(
                    "dims [{a}, {b}] do not multiply to dim {}",
                    f.dim
                ))));
            }
            Some((a, b))
        }
        Some(_) => return Err(LoadError::Schema("\"dims\" must have two entries".into())),
    };
    let factors = match f.factors {
        None => None,
        Some(fs) => Some(
            fs.iter()
                .map(|[a, b]| Ok((a.to_matrix()?, b.to_matrix()?)))
                .collect::<LoadResult<Vec<_>>>()?,
        ),
    };
    Ok(ChannelInput {
        dim: f.dim,
        kraus,
        dims,
        factors,
    })
}

impl ChannelInput {
    pub fn channel(&self) -> LoadResult<Channel> {
        Ok(Channel::new(self.kraus.clone())?)
    }

    pub fn bipartite(&self) -> LoadResult<BipartiteChannel> {
        let dims = self
            .dims
            .ok_or_else(|| LoadError::Data(Error::Contract("bipartite input needs \"dims\": [dA, dB]".into())))?;
        let ch = BipartiteChannel::new(self.channel()?, dims)?;
        match &self.factors {
            Some(f) => Ok(ch.with_factors(f.clone())?),
            None => Ok(ch),
        }
    }
}

pub fn channel_to_json(ch: &Channel) -> Value {
    json!({
        "dim": ch.dim(),
        "kraus": ch.kraus().iter().map(matrix_to_json).collect::<Vec<_>>(),
    })
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct ChoiFile {
    dim: usize,
    choi: MatrixRepr,
}

/// `{"dim", "choi"}`.
pub fn choi_from_json(v: Value) -> LoadResult<ChoiMatrix> {
    let f: ChoiFile = from_value(v)?;
    let m = f.choi.to_matrix()?;
    check_dim(&m, f.dim * f.dim, "Choi matrix")?;
    Ok(ChoiMatrix::new(f.dim, m)?)
}

pub fn choi_to_json(c: &ChoiMatrix) -> Value {
    json!({ "dim": c.dim(), "choi": matrix_to_json(c.matrix()) })
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct SuperOpFile {
    dim: usize,
    elements: Vec<MatrixRepr>,
}

/// `{"dim", "elements"}` with `d²×d²` elements.
pub fn superop_from_json(v: Value) -> LoadResult<SuperOp> {
    let f: SuperOpFile = from_value(v)?;
    let els = f.elements.iter().map(|m| m.to_matrix()).collect::<LoadResult<Vec<_>>>()?;
    for e in &els {
        check_dim(e, f.dim * f.dim, "super-operation element")?;
    }
    Ok(SuperOp::new(els)?)
}

pub fn superop_to_json(s: &SuperOp) -> Value {
    let d = (s.input_size() as f64).sqrt().round() as usize;
    json!({
        "dim": d,
        "elements": s.elements().iter().map(matrix_to_json).collect::<Vec<_>>(),
    })
}
