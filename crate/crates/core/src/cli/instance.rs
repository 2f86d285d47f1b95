//! JSON instance files: parsing, validation with JSON-pointer locations, and
//! emission of extended maps as new instances.

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::bfs::{exponent, set_function, BfsSpec, FiniteMeasureSpace, SetFunctionKind, SetFunctionTable};
use crate::map::SampledMap;
use crate::metric::{validate_metric, FiniteMetricSpace};
use crate::subset::Subset;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawInstance {
    pub version: u32,
    pub metric_space: RawMetric,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub subset: Option<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub measure: Option<RawMeasure>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub space: Option<RawSpace>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub space2: Option<RawSpace>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub map: Option<RawMap>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub phi: Option<RawPhi>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub constants: Option<RawConstants>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawMetric {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub labels: Option<Vec<String>>,
    pub dist: Vec<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawMeasure {
    pub weights: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawSpace {
    #[serde(with = "exponent")]
    pub p: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub scale: Option<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawMap {
    pub values: Vec<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum RawPhi {
    IndicatorNorm {
        #[serde(rename = "K")]
        k: f64,
        #[serde(rename = "Z")]
        z: RawSpace,
    },
    /// Keys are bit strings over the atoms, atom 0 first.
    Table { values: BTreeMap<String, f64> },
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawConstants {
    #[serde(rename = "K", default, skip_serializing_if = "Option::is_none")]
    pub k: Option<f64>,
    #[serde(rename = "K0", default, skip_serializing_if = "Option::is_none")]
    pub k0: Option<f64>,
    #[serde(rename = "K1", default, skip_serializing_if = "Option::is_none")]
    pub k1: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub theta: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p_interp: Option<f64>,
}

/// Why an instance could not be loaded.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum LoadError {
    Io { path: String, message: String },
    Parse { line: usize, column: usize, message: String },
    Validation { pointer: String, message: String },
}

impl std::fmt::Display for LoadError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            LoadError::Io { path, message } => write!(f, "cannot read {path}: {message}"),
            LoadError::Parse { line, column, message } => write!(f, "parse error at line {line}, column {column}: {message}"),
            LoadError::Validation { pointer, message } => write!(f, "invalid instance at {pointer}: {message}"),
        }
    }
}

impl std::error::Error for LoadError {}

fn invalid(pointer: impl Into<String>, message: impl Into<String>) -> LoadError {
    LoadError::Validation { pointer: pointer.into(), message: message.into() }
}

/// A validated instance. Every field is already checked against the others.
#[derive(Debug, Clone)]
pub struct Instance {
    pub raw: RawInstance,
    pub space: FiniteMetricSpace,
    pub subset: Vec<usize>,
    pub measure: Option<FiniteMeasureSpace>,
    /// The range space `Y` (defaults to `L^∞(μ)` when a measure is given).
    pub y: Option<BfsSpec>,
    pub y2: Option<BfsSpec>,
    pub map: Option<SampledMap>,
    pub phi: Option<SetFunctionTable>,
    pub constants: RawConstants,
    pub seed: Option<u64>,
}

pub fn load_instance(path: &Path, max_atoms: usize) -> Result<Instance, LoadError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| LoadError::Io { path: path.display().to_string(), message: e.to_string() })?;
    parse_instance(&text, max_atoms)
}

pub fn parse_instance(text: &str, max_atoms: usize) -> Result<Instance, LoadError> {
    let raw: RawInstance = serde_json::from_str(text)
        .map_err(|e| LoadError::Parse { line: e.line(), column: e.column(), message: e.to_string() })?;
    validate(raw, max_atoms)
}

fn check_finite(values: &[f64], pointer: &str) -> Result<(), LoadError> {
    match values.iter().position(|v| !v.is_finite()) {
        Some(i) => Err(invalid(format!("{pointer}/{i}"), "must be finite")),
        None => Ok(()),
    }
}

fn build_space(raw: &RawSpace, mu: &FiniteMeasureSpace, pointer: &str) -> Result<BfsSpec, LoadError> {
    if !(raw.p >= 1.0) {
        return Err(invalid(format!("{pointer}/p"), format!("exponent {} must be at least 1", raw.p)));
    }
    match &raw.scale {
        None => Ok(BfsSpec::new(mu.clone(), raw.p).expect("p checked")),
        Some(s) => {
            if s.len() != mu.len() {
                return Err(invalid(
                    format!("{pointer}/scale"),
                    format!("{} entries for {} atoms", s.len(), mu.len()),
                ));
            }
            if let Some(i) = s.iter().position(|v| !(v.is_finite() && *v > 0.0)) {
                return Err(invalid(format!("{pointer}/scale/{i}"), "scale must be positive and finite"));
            }
            BfsSpec::with_scale(mu.clone(), raw.p, s.clone()).map_err(|e| invalid(pointer, e.to_string()))
        }
    }
}

fn validate(raw: RawInstance, max_atoms: usize) -> Result<Instance, LoadError> {
    if raw.version != SCHEMA_VERSION {
        return Err(invalid("/version", format!("unsupported schema version {}", raw.version)));
    }
    let dist = &raw.metric_space.dist;
    let n = dist.len();
    if n == 0 {
        return Err(invalid("/metric_space/dist", "the metric space has no points"));
    }
    if let Some(i) = dist.iter().position(|r| r.len() != n) {
        return Err(invalid(format!("/metric_space/dist/{i}"), format!("row has {} entries, expected {n}", dist[i].len())));
    }
    let violations = validate_metric(dist).map_err(|e| invalid("/metric_space/dist", e.to_string()))?;
    if let Some(v) = violations.first() {
        let pointer = match v.indices.as_slice() {
            [i] => format!("/metric_space/dist/{i}/{i}"),
            [i, j, ..] => format!("/metric_space/dist/{i}/{j}"),
            _ => "/metric_space/dist".to_string(),
        };
        return Err(invalid(pointer, v.to_string()));
    }
    let labels = match &raw.metric_space.labels {
        Some(l) if l.len() != n => {
            return Err(invalid("/metric_space/labels", format!("{} labels for {n} points", l.len())));
        }
        Some(l) => l.clone(),
        None => (0..n).map(|i| i.to_string()).collect(),
    };
    let space = FiniteMetricSpace::new(labels, dist.clone()).map_err(|e| invalid("/metric_space", e.to_string()))?;

    let subset = match &raw.subset {
        Some(s) => {
            if s.is_empty() {
                return Err(invalid("/subset", "the subset is empty"));
            }
            for (k, &p) in s.iter().enumerate() {
                if p >= n {
                    return Err(invalid(format!("/subset/{k}"), format!("point {p} is outside the {n}-point space")));
                }
                if s[..k].contains(&p) {
                    return Err(invalid(format!("/subset/{k}"), format!("point {p} appears twice")));
                }
            }
            s.clone()
        }
        None => (0..n).collect(),
    };

    let measure = match &raw.measure {
        Some(m) => {
            if m.weights.is_empty() {
                return Err(invalid("/measure/weights", "no atoms"));
            }
            if m.weights.len() > max_atoms {
                return Err(invalid(
                    "/measure/weights",
                    format!("{} atoms exceed the limit of {max_atoms} (raise it with --max-atoms)", m.weights.len()),
                ));
            }
            for (i, w) in m.weights.iter().enumerate() {
                if !w.is_finite() || *w < 0.0 {
                    return Err(invalid(format!("/measure/weights/{i}"), format!("weight {w} must be nonnegative and finite")));
                }
            }
            Some(FiniteMeasureSpace::new(m.weights.clone()).map_err(|e| invalid("/measure/weights", e.to_string()))?)
        }
        None => None,
    };

    let (y, y2) = match &measure {
        Some(mu) => {
            let y = match &raw.space {
                Some(s) => build_space(s, mu, "/space")?,
                None => BfsSpec::linf(mu.clone()),
            };
            let y2 = raw.space2.as_ref().map(|s| build_space(s, mu, "/space2")).transpose()?;
            (Some(y), y2)
        }
        None => {
            for (field, present) in [("/space", raw.space.is_some()), ("/space2", raw.space2.is_some()), ("/phi", raw.phi.is_some())] {
                if present {
                    return Err(invalid(field, "requires a measure"));
                }
            }
            (None, None)
        }
    };

    let map = match &raw.map {
        Some(m) => {
            if m.values.len() != subset.len() {
                return Err(invalid(
                    "/map/values",
                    format!("{} rows for a {}-point subset", m.values.len(), subset.len()),
                ));
            }
            let cols = measure.as_ref().map_or(1, |mu| mu.len());
            for (k, row) in m.values.iter().enumerate() {
                if row.len() != cols {
                    return Err(invalid(format!("/map/values/{k}"), format!("{} entries, expected {cols}", row.len())));
                }
                check_finite(row, &format!("/map/values/{k}"))?;
            }
            let range = y.clone().unwrap_or_else(BfsSpec::scalar);
            Some(SampledMap::new(subset.clone(), m.values.clone(), range).map_err(|e| invalid("/map", e.to_string()))?)
        }
        None => None,
    };

    let phi = match (&raw.phi, &measure) {
        (Some(p), Some(mu)) => Some(build_phi(p, mu)?),
        _ => None,
    };

    let constants = raw.constants.clone().unwrap_or_default();
    for (name, v) in [("K", constants.k), ("K0", constants.k0), ("K1", constants.k1)] {
        if let Some(v) = v {
            if !(v.is_finite() && v >= 0.0) {
                return Err(invalid(format!("/constants/{name}"), "must be nonnegative and finite"));
            }
        }
    }
    if let Some(t) = constants.theta {
        if !(t > 0.0 && t < 1.0) {
            return Err(invalid("/constants/theta", "must lie in (0, 1)"));
        }
    }
    if let Some(p) = constants.p_interp {
        if !(p.is_finite() && p >= 1.0) {
            return Err(invalid("/constants/p_interp", "must lie in [1, ∞)"));
        }
    }
    let seed = raw.seed;
    Ok(Instance { raw, space, subset, measure, y, y2, map, phi, constants, seed })
}

fn build_phi(raw: &RawPhi, mu: &FiniteMeasureSpace) -> Result<SetFunctionTable, LoadError> {
    let n = mu.len();
    match raw {
        RawPhi::IndicatorNorm { k, z } => {
            if !(k.is_finite() && *k >= 0.0) {
                return Err(invalid("/phi/K", "must be nonnegative and finite"));
            }
            let z = build_space(z, mu, "/phi/Z")?;
            set_function(SetFunctionKind::IndicatorNorm { k: *k, z }).map_err(|e| invalid("/phi", e.to_string()))
        }
        RawPhi::Table { values } => {
            let mut table = vec![f64::NAN; 1 << n];
            for (key, v) in values {
                let pointer = format!("/phi/values/{key}");
                let s = Subset::parse_bits(key, n).map_err(|e| invalid(&pointer, e.to_string()))?;
                if !v.is_finite() {
                    return Err(invalid(pointer, "must be finite"));
                }
                table[s.index()] = *v;
            }
            if let Some(m) = table.iter().position(|v| v.is_nan()) {
                return Err(invalid(
                    "/phi/values",
                    format!("missing entry for subset {}", Subset(m as u32).to_bits(n)),
                ));
            }
            SetFunctionTable::from_values(n, table).map_err(|e| invalid("/phi/values", e.to_string()))
        }
    }
}

/// An instance whose map is `extended` on every point, keeping the rest of `base`.
pub fn extended_instance(base: &RawInstance, extended: &SampledMap) -> RawInstance {
    let mut out = base.clone();
    out.subset = Some(extended.domain().to_vec());
    out.map = Some(RawMap { values: extended.values().to_vec() });
    out
}

/// Pretty JSON for an instance. Reals use the shortest representation that
/// parses back to the same `f64`, so reloading is exact.
pub fn instance_text(raw: &RawInstance) -> String {
    let mut s = serde_json::to_string_pretty(raw).expect("instances serialize");
    s.push('\n');
    s
}
