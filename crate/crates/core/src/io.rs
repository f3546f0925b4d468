//! JSON instance documents and report envelopes.
//!
//! An instance document lists each component of `f` and `g` as terms with a
//! decimal-string coefficient and an exponent vector:
//!
//! ```json
//! {
//!   "schema_version": 1,
//!   "n": 2,
//!   "f": [[{"coefficient": "1", "exponents": [0, 1]}, {"coefficient": "-1", "exponents": [0, 0]}], ...],
//!   "g": [...]
//! }
//! ```

use serde::{Deserialize, Serialize};

use crate::error::{PcpError, Result};
use crate::instance::PcpInstance;
use crate::poly::{Monomial, PolyMap, Polynomial};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TermDocument {
    pub coefficient: String,
    pub exponents: Vec<u32>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Metadata {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub source: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InstanceDocument {
    pub schema_version: u32,
    pub n: usize,
    pub f: Vec<Vec<TermDocument>>,
    pub g: Vec<Vec<TermDocument>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub metadata: Option<Metadata>,
}

fn parse_error(path: impl Into<String>, message: impl Into<String>) -> PcpError {
    PcpError::Parse {
        path: path.into(),
        message: message.into(),
    }
}

fn map_from_document(name: &str, n: usize, comps: &[Vec<TermDocument>]) -> Result<PolyMap> {
    if comps.len() != n {
        return Err(parse_error(name, format!("expected {n} components, found {}", comps.len())));
    }
    let mut out = Vec::with_capacity(n);
    for (i, comp) in comps.iter().enumerate() {
        let mut terms = Vec::with_capacity(comp.len());
        for (k, t) in comp.iter().enumerate() {
            let path = format!("{name}[{i}][{k}]");
            if t.exponents.len() != n {
                return Err(parse_error(
                    format!("{path}.exponents"),
                    format!("expected {n} exponents, found {}", t.exponents.len()),
                ));
            }
            let c: f64 = t
                .coefficient
                .trim()
                .parse()
                .map_err(|_| parse_error(format!("{path}.coefficient"), format!("not a decimal number: {:?}", t.coefficient)))?;
            if !c.is_finite() {
                return Err(parse_error(format!("{path}.coefficient"), "coefficient must be finite"));
            }
            terms.push((Monomial::new(t.exponents.clone()), c));
        }
        let p = Polynomial::from_terms(n, terms).map_err(|e| parse_error(format!("{name}[{i}]"), e.to_string()))?;
        out.push(p);
    }
    PolyMap::new(out)
}

/// Validates a parsed document and builds the instance.
pub fn instance_from_document(doc: &InstanceDocument) -> Result<PcpInstance> {
    if doc.schema_version != SCHEMA_VERSION {
        return Err(parse_error("schema_version", format!("unsupported version {}", doc.schema_version)));
    }
    if doc.n == 0 {
        return Err(parse_error("n", "dimension must be positive"));
    }
    let f = map_from_document("f", doc.n, &doc.f)?;
    let g = map_from_document("g", doc.n, &doc.g)?;
    PcpInstance::new(f, g).map_err(|e| parse_error(".", e.to_string()))
}

pub fn parse_document(text: &str) -> Result<InstanceDocument> {
    let de = &mut serde_json::Deserializer::from_str(text);
    serde_path_to_error::deserialize(de).map_err(|e| {
        let path = e.path().to_string();
        parse_error(path, e.into_inner().to_string())
    })
}

/// Parses an instance document. Errors name the offending JSON path.
pub fn parse_instance(text: &str) -> Result<PcpInstance> {
    instance_from_document(&parse_document(text)?)
}

/// Shortest decimal string that parses back to `c`.
pub fn format_coefficient(c: f64) -> String {
    let a = c.abs();
    if a == 0.0 || (1e-5..1e16).contains(&a) {
        format!("{c}")
    } else {
        format!("{c:e}")
    }
}

fn map_to_document(map: &PolyMap) -> Vec<Vec<TermDocument>> {
    map.components()
        .iter()
        .map(|p| {
            p.terms()
                .map(|(m, c)| TermDocument {
                    coefficient: format_coefficient(c),
                    exponents: m.exponents().to_vec(),
                })
                .collect()
        })
        .collect()
}

/// Canonical document: terms in descending graded-lex order.
pub fn instance_to_document(inst: &PcpInstance, metadata: Option<Metadata>) -> InstanceDocument {
    InstanceDocument {
        schema_version: SCHEMA_VERSION,
        n: inst.n(),
        f: map_to_document(inst.f()),
        g: map_to_document(inst.g()),
        metadata,
    }
}

pub fn serialize_instance(inst: &PcpInstance, metadata: Option<Metadata>) -> String {
    let mut s = serde_json::to_string_pretty(&instance_to_document(inst, metadata)).expect("documents serialize");
    s.push('\n');
    s
}

/// Envelope written by every command.
#[derive(Clone, Debug, Serialize)]
pub struct ReportDocument<C: Serialize, P: Serialize> {
    pub schema_version: u32,
    pub command: String,
    pub config: C,
    pub payload: P,
}

impl<C: Serialize, P: Serialize> ReportDocument<C, P> {
    pub fn new(command: &str, config: C, payload: P) -> Self {
        ReportDocument {
            schema_version: SCHEMA_VERSION,
            command: command.to_string(),
            config,
            payload,
        }
    }

    pub fn render(&self) -> Result<String> {
        let mut s = serde_json::to_string_pretty(self).map_err(|e| PcpError::InvalidInput(format!("report serialization: {e}")))?;
        s.push('\n');
        Ok(s)
    }
}
