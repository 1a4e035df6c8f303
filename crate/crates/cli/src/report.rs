//! Run reports: `key=value` lines or a JSON object, always in insertion order.

use chansup::scenario::fixed;
use chansup::Divergence;
use serde_json::{Map, Number, Value};

#[derive(Debug, Clone)]
pub enum Val {
    Str(String),
    Real(f64),
    /// Thresholds and other inputs echoed in exponent form.
    Sci(f64),
    Int(i64),
    Bool(bool),
}

impl Val {
    fn text(&self) -> String {
        match self {
            Val::Str(s) => s.clone(),
            Val::Real(x) => fixed(*x),
            Val::Sci(x) => format!("{x:e}"),
            Val::Int(i) => i.to_string(),
            Val::Bool(b) => b.to_string(),
        }
    }

    fn json(&self) -> Value {
        match self {
            Val::Str(s) => Value::String(s.clone()),
            Val::Real(x) if x.is_finite() => {
                // same digits as the text form
                let rounded: f64 = fixed(*x).parse().expect("fixed output parses");
                Value::Number(Number::from_f64(rounded).expect("finite"))
            }
            Val::Real(x) => Value::String(fixed(*x)),
            Val::Sci(x) => Number::from_f64(*x).map_or(Value::Null, Value::Number),
            Val::Int(i) => Value::Number((*i).into()),
            Val::Bool(b) => Value::Bool(*b),
        }
    }
}

impl From<&str> for Val {
    fn from(s: &str) -> Self {
        Val::Str(s.to_string())
    }
}

impl From<String> for Val {
    fn from(s: String) -> Self {
        Val::Str(s)
    }
}

impl From<f64> for Val {
    fn from(x: f64) -> Self {
        Val::Real(x)
    }
}

impl From<bool> for Val {
    fn from(b: bool) -> Self {
        Val::Bool(b)
    }
}

impl From<usize> for Val {
    fn from(i: usize) -> Self {
        Val::Int(i as i64)
    }
}

impl From<Divergence> for Val {
    fn from(d: Divergence) -> Self {
        Val::Real(d.value())
    }
}

pub type Row = Vec<(String, Val)>;

#[derive(Debug, Clone, Default)]
pub struct Report {
    header: Row,
    rows: Vec<Row>,
    error: Option<String>,
    pub status: u8,
}

impl Report {
    pub fn new(command: &str) -> Self {
        Report {
            header: vec![("command".into(), command.into())],
            ..Default::default()
        }
    }

    pub fn echo(&mut self, key: &str, v: impl Into<Val>) {
        self.header.push((key.into(), v.into()));
    }

    pub fn row(&mut self, fields: Vec<(&str, Val)>) {
        self.rows.push(fields.into_iter().map(|(k, v)| (k.to_string(), v)).collect());
    }

    pub fn push_row(&mut self, row: Row) {
        self.rows.push(row);
    }

    pub fn line(&mut self, key: &str, v: impl Into<Val>) {
        self.row(vec![(key, v.into())]);
    }

    pub fn fail(&mut self, status: u8, message: String) {
        self.status = status;
        self.error = Some(message);
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for (k, v) in &self.header {
            out.push_str(&format!("{k}={}\n", v.text()));
        }
        for row in &self.rows {
            let parts: Vec<String> = row.iter().map(|(k, v)| format!("{k}={}", v.text())).collect();
            out.push_str(&parts.join(" "));
            out.push('\n');
        }
        if let Some(e) = &self.error {
            out.push_str(&format!("error={e}\n"));
        }
        out.push_str(&format!("status={}\n", self.status));
        out
    }

    pub fn to_json(&self) -> Value {
        let mut obj = Map::new();
        for (k, v) in &self.header {
            obj.insert(k.clone(), v.json());
        }
        let rows = self
            .rows
            .iter()
            .map(|row| Value::Object(row.iter().map(|(k, v)| (k.clone(), v.json())).collect()))
            .collect();
        obj.insert("results".into(), Value::Array(rows));
        if let Some(e) = &self.error {
            obj.insert("error".into(), Value::String(e.clone()));
        }
        obj.insert("status".into(), Value::Number(self.status.into()));
        Value::Object(obj)
    }
}
