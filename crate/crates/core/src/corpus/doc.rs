//! The JSON input document: charts, named fields and forms, and an optional
//! vector-valued one-form assembled from named components.

use std::collections::BTreeMap;
use std::sync::Arc;

use serde::Deserialize;

use crate::chart::Chart;
use crate::error::CorpusError;
use crate::exterior::{DiffForm, VecValuedOneForm, VectorField};
use crate::expr::{parse, Expr};

pub const SCHEMA_VERSION: u32 = 1;

/// Raw deserialized document (see `docs/format.md`).
#[derive(Debug, Clone, Deserialize)]
pub struct InputDocument {
    pub schema: u32,
    #[serde(default)]
    pub name: Option<String>,
    pub chart: Vec<String>,
    #[serde(default)]
    pub constants: Vec<String>,
    #[serde(default)]
    pub fields: BTreeMap<String, Vec<String>>,
    #[serde(default)]
    pub forms: BTreeMap<String, FormSpec>,
    /// Component form names of the vector-valued one-form, in basis order.
    #[serde(default)]
    pub kform: Vec<String>,
    /// Closure generators, by field name.
    #[serde(default)]
    pub generators: Vec<String>,
    /// Coefficient symbol names for time-dependent systems (`b1`, ... by
    /// default).
    #[serde(default)]
    pub coeffs: Vec<String>,
    /// Free-form task descriptors; the CLI reads defaults from here.
    #[serde(default)]
    pub tasks: Vec<serde_json::Value>,
}

/// A differential form: degree plus a map from comma-joined 1-based index
/// tuples to coefficient expressions.
#[derive(Debug, Clone, Deserialize)]
pub struct FormSpec {
    pub degree: usize,
    pub terms: BTreeMap<String, String>,
}

/// A document with all symbols resolved against its chart.
#[derive(Debug, Clone)]
pub struct Document {
    pub chart: Arc<Chart>,
    pub fields: BTreeMap<String, VectorField>,
    pub forms: BTreeMap<String, DiffForm>,
    pub kform: Option<VecValuedOneForm>,
    pub raw: InputDocument,
}

impl Document {
    pub fn parse_str(text: &str) -> Result<Document, CorpusError> {
        let raw: InputDocument =
            serde_json::from_str(text).map_err(|e| CorpusError::BadData(e.to_string()))?;
        Document::resolve(raw)
    }

    pub fn resolve(raw: InputDocument) -> Result<Document, CorpusError> {
        if raw.schema != SCHEMA_VERSION {
            return Err(CorpusError::BadData(format!(
                "unsupported schema version {} (expected {SCHEMA_VERSION})",
                raw.schema
            )));
        }
        let chart = Chart::new(raw.chart.clone(), raw.constants.clone())
            .map_err(|e| CorpusError::BadData(e.to_string()))?;
        let mut fields = BTreeMap::new();
        for (name, coeffs) in &raw.fields {
            if coeffs.len() != chart.dim() {
                return Err(CorpusError::BadData(format!(
                    "field `{name}` has {} coefficients on a {}-dimensional chart",
                    coeffs.len(),
                    chart.dim()
                )));
            }
            let parsed: Vec<Expr> = coeffs
                .iter()
                .map(|s| parse(s, &chart))
                .collect::<Result<_, _>>()
                .map_err(|e| CorpusError::BadData(format!("field `{name}`: {e}")))?;
            let vf = VectorField::new(chart.clone(), parsed)
                .map_err(|e| CorpusError::BadData(format!("field `{name}`: {e}")))?;
            fields.insert(name.clone(), vf);
        }
        let mut forms = BTreeMap::new();
        for (name, spec) in &raw.forms {
            forms.insert(
                name.clone(),
                parse_form(spec, &chart).map_err(|e| CorpusError::BadData(format!("form `{name}`: {e}")))?,
            );
        }
        let kform = if raw.kform.is_empty() {
            None
        } else {
            let comps: Vec<DiffForm> = raw
                .kform
                .iter()
                .map(|n| {
                    forms
                        .get(n)
                        .cloned()
                        .ok_or_else(|| CorpusError::BadData(format!("kform component `{n}` not found")))
                })
                .collect::<Result<_, _>>()?;
            Some(
                VecValuedOneForm::new(chart.clone(), comps)
                    .map_err(|e| CorpusError::BadData(e.to_string()))?,
            )
        };
        Ok(Document { chart, fields, forms, kform, raw })
    }

    pub fn field(&self, name: &str) -> Result<&VectorField, CorpusError> {
        self.fields
            .get(name)
            .ok_or_else(|| CorpusError::BadData(format!("unknown field `{name}`")))
    }

    pub fn fields_named(&self, names: &[String]) -> Result<Vec<VectorField>, CorpusError> {
        names.iter().map(|n| self.field(n).cloned()).collect()
    }
}

/// Parses a `FormSpec` over a chart. Indices in term keys are 1-based.
pub fn parse_form(spec: &FormSpec, chart: &Arc<Chart>) -> Result<DiffForm, CorpusError> {
    let mut terms = Vec::new();
    for (key, coeff) in &spec.terms {
        let idx: Vec<usize> = key
            .split(',')
            .map(|s| {
                s.trim()
                    .parse::<usize>()
                    .ok()
                    .filter(|&i| i >= 1 && i <= chart.dim())
                    .map(|i| i - 1)
                    .ok_or_else(|| CorpusError::BadData(format!("bad form index `{s}`")))
            })
            .collect::<Result<_, _>>()?;
        if idx.len() != spec.degree {
            return Err(CorpusError::BadData(format!(
                "index tuple `{key}` does not match degree {}",
                spec.degree
            )));
        }
        let e = parse(coeff, chart).map_err(|e| CorpusError::BadData(e.to_string()))?;
        terms.push((idx, e));
    }
    DiffForm::from_terms(chart, spec.degree, terms).map_err(|e| CorpusError::BadData(e.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_minimal_document() {
        let doc = Document::parse_str(
            r#"{
                "schema": 1,
                "chart": ["x", "z", "p"],
                "fields": {"R": ["0", "1", "0"]},
                "forms": {"eta": {"degree": 1, "terms": {"2": "1", "1": "-p"}}},
                "kform": ["eta"]
            }"#,
        )
        .unwrap();
        assert_eq!(doc.chart.dim(), 3);
        assert!(doc.kform.is_some());
        let report = crate::kcontact::verify_kcontact(doc.kform.as_ref().unwrap()).unwrap();
        assert!(report.is_kcontact);
    }

    #[test]
    fn rejects_wrong_schema() {
        let err = Document::parse_str(r#"{"schema": 9, "chart": ["x"]}"#).unwrap_err();
        assert!(matches!(err, CorpusError::BadData(_)));
    }
}
