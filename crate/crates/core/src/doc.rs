//! Output documents. Every document is a JSON object whose first field is
//! `format_version: 1`.

use num_rational::BigRational;
use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

use crate::netgraph::{LayerBlock, NetworkGraph};
use crate::path::Path;
use crate::subroutine::BasisPathSet;
use crate::verify::SpanMembership;

pub const FORMAT_VERSION: u32 = 1;

/// Serializes `body` (which must be a JSON object) behind a leading `format_version`.
pub fn versioned<T: Serialize>(body: &T) -> Value {
    let inner = serde_json::to_value(body).expect("documents serialize");
    let mut map = Map::new();
    map.insert("format_version".into(), FORMAT_VERSION.into());
    match inner {
        Value::Object(fields) => map.extend(fields),
        other => {
            map.insert("value".into(), other);
        }
    }
    Value::Object(map)
}

/// Pretty JSON with a trailing newline.
pub fn render<T: Serialize>(body: &T) -> String {
    let mut s = serde_json::to_string_pretty(&versioned(body)).expect("documents serialize");
    s.push('\n');
    s
}

fn clamp(v: u128) -> u64 {
    u64::try_from(v).unwrap_or(u64::MAX)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GraphStats {
    pub layers: Vec<usize>,
    pub blocks: Vec<LayerBlock>,
    #[serde(rename = "L")]
    pub last_layer: usize,
    pub m: usize,
    #[serde(rename = "H")]
    pub h: usize,
    pub has_skip_edges: bool,
    /// Saturates at `u64::MAX`.
    pub path_count: u64,
}

impl GraphStats {
    pub fn of(g: &NetworkGraph) -> Self {
        Self {
            layers: g.layer_sizes().to_vec(),
            blocks: g.blocks().to_vec(),
            last_layer: g.last_layer(),
            m: g.edge_count(),
            h: g.hidden_count(),
            has_skip_edges: g.has_skip_edges(),
            path_count: clamp(g.path_count()),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PathList {
    pub count: usize,
    pub paths: Vec<Path>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RepresentTerm {
    pub coefficient: String,
    pub path: Path,
}

/// Span membership of one path, with rational coefficients as strings
/// (`"1"`, `"-1"`, `"1/2"`).
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Representation {
    pub path: Path,
    pub in_span: bool,
    pub integer: bool,
    pub coefficients: Vec<String>,
    /// Nonzero terms only.
    pub terms: Vec<RepresentTerm>,
}

impl Representation {
    pub fn new(target: &Path, basis: &BasisPathSet, membership: &SpanMembership) -> Self {
        match membership {
            SpanMembership::No => Self {
                path: target.clone(),
                in_span: false,
                integer: false,
                coefficients: Vec::new(),
                terms: Vec::new(),
            },
            SpanMembership::Yes {
                coefficients,
                integer,
            } => Self {
                path: target.clone(),
                in_span: true,
                integer: *integer,
                coefficients: coefficients.iter().map(BigRational::to_string).collect(),
                terms: coefficients
                    .iter()
                    .zip(basis.paths())
                    .filter(|(c, _)| !num_traits::Zero::is_zero(*c))
                    .map(|(c, p)| RepresentTerm {
                        coefficient: c.to_string(),
                        path: p.clone(),
                    })
                    .collect(),
            },
        }
    }
}

/// Reads a basis from either a basis document or an hbps result document.
pub fn parse_basis(text: &str) -> Result<BasisPathSet, String> {
    let value: Value = serde_json::from_str(text).map_err(|e| e.to_string())?;
    if let Some(v) = value.get("format_version") {
        if v != &Value::from(FORMAT_VERSION) {
            return Err(format!("unsupported format_version {v}"));
        }
    }
    let inner = match value.get("basis") {
        Some(b) => b.clone(),
        None => value,
    };
    serde_json::from_value(inner).map_err(|e| e.to_string())
}

/// Reads a path given as `[[layer, index], ...]`, or `{"path": [...]}`.
pub fn parse_path(text: &str) -> Result<Path, String> {
    let value: Value = serde_json::from_str(text).map_err(|e| e.to_string())?;
    let inner = match value.get("path") {
        Some(p) => p.clone(),
        None => value,
    };
    serde_json::from_value(inner).map_err(|e| e.to_string())
}
