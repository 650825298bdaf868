use std::collections::{BTreeMap, BTreeSet};

use num_bigint::BigInt;
use serde::{Deserialize, Serialize};

use crate::blockmat::{BlockProfile, IPInstance, IntMatrix};
use crate::error::{Error, Result};

/// Schema tag written into every document and required on input.
pub const SCHEMA: &str = "blockstruct-instance/1";

/// Where an instance came from: generator name, its parameters and a
/// summary of the reduction certificate.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Provenance {
    pub source: String,
    #[serde(default)]
    pub parameters: BTreeMap<String, String>,
    #[serde(default)]
    pub certificate: BTreeMap<String, String>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InstanceDocument {
    pub instance: IPInstance,
    pub provenance: Option<Provenance>,
}

impl InstanceDocument {
    pub fn new(instance: IPInstance) -> Self {
        InstanceDocument { instance, provenance: None }
    }

    pub fn with_provenance(mut self, provenance: Provenance) -> Self {
        self.provenance = Some(provenance);
        self
    }
}

/// On-disk layout. Indices are 1-based, integers are decimal strings and a
/// `null` bound means unbounded.
#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawDocument {
    schema: String,
    rows: usize,
    cols: usize,
    matrix: Vec<(usize, usize, String)>,
    rhs: Vec<String>,
    lower: Vec<Option<String>>,
    upper: Vec<Option<String>>,
    objective: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    profile: Option<BlockProfile>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    provenance: Option<Provenance>,
}

pub fn emit_json(inst: &IPInstance) -> String {
    emit_document(&InstanceDocument::new(inst.clone()))
}

pub fn emit_document(doc: &InstanceDocument) -> String {
    let inst = &doc.instance;
    let strings = |v: &[BigInt]| v.iter().map(BigInt::to_string).collect::<Vec<_>>();
    let bounds = |v: &[Option<BigInt>]| v.iter().map(|b| b.as_ref().map(BigInt::to_string)).collect();
    let raw = RawDocument {
        schema: SCHEMA.to_string(),
        rows: inst.rows(),
        cols: inst.cols(),
        matrix: inst.matrix().iter().map(|(i, j, v)| (i + 1, j + 1, v.to_string())).collect(),
        rhs: strings(inst.rhs()),
        lower: bounds(inst.lower()),
        upper: bounds(inst.upper()),
        objective: strings(inst.objective()),
        profile: inst.profile().cloned(),
        provenance: doc.provenance.clone(),
    };
    let mut text = serde_json::to_string_pretty(&raw).expect("document serialises");
    text.push('\n');
    text
}

pub fn parse_json(text: &str) -> Result<IPInstance> {
    parse_document(text).map(|doc| doc.instance)
}

pub fn parse_document(text: &str) -> Result<InstanceDocument> {
    let raw: RawDocument = serde_json::from_str(text).map_err(|e| {
        Error::Format(format!("line {}, column {}: {}", e.line(), e.column(), strip_position(&e)))
    })?;
    if raw.schema != SCHEMA {
        return Err(field_error("schema", format!("expected {SCHEMA:?}, found {:?}", raw.schema)));
    }
    let mut seen = BTreeSet::new();
    let mut entries = Vec::with_capacity(raw.matrix.len());
    for (k, (i, j, v)) in raw.matrix.iter().enumerate() {
        let field = format!("matrix[{k}]");
        if *i == 0 || *j == 0 || *i > raw.rows || *j > raw.cols {
            return Err(field_error(
                &field,
                format!("index ({i}, {j}) outside 1..={} x 1..={}", raw.rows, raw.cols),
            ));
        }
        if !seen.insert((*i, *j)) {
            return Err(field_error(&field, format!("duplicate entry ({i}, {j})")));
        }
        entries.push((i - 1, j - 1, integer(&field, v)?));
    }
    let matrix = IntMatrix::from_entries(raw.rows, raw.cols, entries)?;
    let rhs = integers("rhs", &raw.rhs)?;
    let objective = integers("objective", &raw.objective)?;
    let lower = optional_integers("lower", &raw.lower)?;
    let upper = optional_integers("upper", &raw.upper)?;
    let instance = IPInstance::new(matrix, rhs, lower, upper, objective, raw.profile)
        .map_err(|e| Error::Format(format!("instance rejected: {e}")))?;
    Ok(InstanceDocument { instance, provenance: raw.provenance })
}

fn strip_position(e: &serde_json::Error) -> String {
    let msg = e.to_string();
    match msg.rfind(" at line ") {
        Some(pos) => msg[..pos].to_string(),
        None => msg,
    }
}

fn field_error(field: &str, msg: String) -> Error {
    Error::Format(format!("field `{field}`: {msg}"))
}

fn integer(field: &str, s: &str) -> Result<BigInt> {
    // BigInt's parser accepts a leading '+' and digit separators; the schema
    // only allows plain decimal.
    let digits = s.strip_prefix('-').unwrap_or(s);
    if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
        return Err(field_error(field, format!("{s:?} is not a decimal integer")));
    }
    Ok(s.parse().expect("validated decimal"))
}

fn integers(name: &str, values: &[String]) -> Result<Vec<BigInt>> {
    values
        .iter()
        .enumerate()
        .map(|(k, s)| integer(&format!("{name}[{k}]"), s))
        .collect()
}

fn optional_integers(name: &str, values: &[Option<String>]) -> Result<Vec<Option<BigInt>>> {
    values
        .iter()
        .enumerate()
        .map(|(k, s)| s.as_deref().map(|s| integer(&format!("{name}[{k}]"), s)).transpose())
        .collect()
}
