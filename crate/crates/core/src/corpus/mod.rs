//! Golden-data corpus: bundled example systems with their expected closure
//! tables, Reeb fields, Hamiltonians, bracket tables, and numeric checks.
//!
//! The ground truth for every Hamiltonian entry is the defining equation
//! (minus the contraction with the form, verified through the residual
//! one-forms), not a table copied from anywhere: expected values are
//! assertions layered on top, and entries marked `printed_*` are known
//! typographical slips in the source displays, re-derived here and reported
//! as divergences rather than asserted.

mod doc;
mod pipeline;

pub use doc::{parse_form, Document, FormSpec, InputDocument, SCHEMA_VERSION};
pub use pipeline::{run_example, CorpusOptions};

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::CorpusError;

/// One bundled example: an input document plus expected data.
#[derive(Debug, Clone, Deserialize)]
pub struct CorpusFile {
    #[serde(flatten)]
    pub doc: InputDocument,
    pub closure: ClosureSpec,
    #[serde(default)]
    pub symmetry: Option<SymmetrySpec>,
    #[serde(default)]
    pub eta: Option<EtaSpec>,
    #[serde(default)]
    pub expected: Option<ExpectedSpec>,
    #[serde(default)]
    pub dissipated: Vec<DissipatedSpec>,
    #[serde(default)]
    pub numeric: Vec<NumericSpec>,
}

/// Sparse table entry: `[a, b, {c: coeff}]` meaning
/// `[a, b] = sum_c coeff * c` (names resolve against the closure basis).
pub type TableEntry = (String, String, BTreeMap<String, String>);

#[derive(Debug, Clone, Deserialize)]
pub struct ClosureSpec {
    pub dim: usize,
    /// Names assigned to the computed basis, in closure order. Names that
    /// also appear in `fields` are asserted equal to the computed element.
    pub basis: Vec<String>,
    /// Printed variants of basis elements that the source displays get
    /// wrong; reported as divergences against the computed fields.
    #[serde(default)]
    pub printed_basis: BTreeMap<String, Vec<String>>,
    /// Nonzero bracket table entries.
    pub table: Vec<TableEntry>,
    pub automorphic: bool,
    #[serde(default)]
    pub max_dim: Option<usize>,
    /// Extra declared fields that commute with the whole closure and extend
    /// the basis to a tangent-space frame.
    #[serde(default)]
    pub extra_commuting: Vec<String>,
}

#[derive(Debug, Clone, Deserialize)]
pub struct SymmetrySpec {
    /// Frame of Lie symmetries, by field name; each must commute with every
    /// closure basis element.
    pub frame: Vec<String>,
    /// Printed variants of symmetry fields with typographical slips.
    #[serde(default)]
    pub printed: BTreeMap<String, Vec<String>>,
    /// Expected nonzero closure table of the frame itself.
    #[serde(default)]
    pub table: Vec<TableEntry>,
    /// Printed dual-coframe rows to assert, keyed by 1-based row index.
    #[serde(default)]
    pub coframe: BTreeMap<String, FormSpec>,
    /// Assert invariance `L_{X_i} Upsilon^j = 0` for all pairs.
    #[serde(default)]
    pub invariance: bool,
}

#[derive(Debug, Clone, Deserialize)]
pub struct DualRoute {
    pub frame: Vec<String>,
    /// 1-based positions of the rows forming the k-contact components.
    pub take: Vec<usize>,
}

#[derive(Debug, Clone, Deserialize)]
pub struct BuildRoute {
    pub distribution: Vec<String>,
    pub symmetries: Vec<String>,
}

#[derive(Debug, Clone, Deserialize)]
pub struct EtaSpec {
    /// Explicit route: component form names from `forms`.
    #[serde(default)]
    pub components: Vec<String>,
    #[serde(default)]
    pub dual: Option<DualRoute>,
    #[serde(default)]
    pub build: Option<BuildRoute>,
    /// Expected components, asserted exactly when present.
    #[serde(default)]
    pub expect: Vec<FormSpec>,
    /// Printed component variants with slips, keyed by 1-based position.
    #[serde(default)]
    pub printed: BTreeMap<String, FormSpec>,
    /// Expected components of `d eta`, asserted exactly when present.
    #[serde(default)]
    pub deta_expect: Vec<FormSpec>,
}

#[derive(Debug, Clone, Deserialize)]
pub struct ExpectedSpec {
    pub k: usize,
    /// Reeb fields by field-name reference, in component order.
    #[serde(default)]
    pub reeb: Vec<String>,
    /// Expected Hamiltonian k-functions per basis name, asserted exactly.
    #[serde(default)]
    pub hamiltonians: BTreeMap<String, Vec<String>>,
    /// Printed Hamiltonian rows that are compared and diff-reported only.
    #[serde(default)]
    pub printed_hamiltonians: BTreeMap<String, Vec<String>>,
    /// Nonzero entries of the k-function bracket table over the basis.
    #[serde(default)]
    pub brackets: Vec<TableEntry>,
    #[serde(default)]
    pub projectable: Option<bool>,
}

/// A dissipation check: is `f` dissipated relative to `h = sum coeff X`?
#[derive(Debug, Clone, Deserialize)]
pub struct DissipatedSpec {
    /// Basis name whose Hamiltonian is the candidate dissipated function.
    pub f: String,
    /// Hamiltonian combination, basis name -> coefficient expression (may
    /// use opaque constants).
    pub h: BTreeMap<String, String>,
    pub expect: bool,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum NumericSpec {
    /// Conserve `sum_j scale_j int b_(name_j) + expr(x)` along a run.
    Conservation {
        coeffs: BTreeMap<String, Vec<f64>>,
        x0: Vec<f64>,
        t1: f64,
        step: f64,
        tol: f64,
        #[serde(default)]
        quad: Vec<(String, f64)>,
        expr: String,
    },
    /// Scalar Riccati superposition-rule reconstruction.
    Superposition {
        b: [Vec<f64>; 3],
        seeds: [f64; 3],
        fourth: f64,
        t1: f64,
        step: f64,
        tol: f64,
    },
    /// Momentum-map invariant-level-set check with generated samples.
    Momentum {
        theta: Vec<String>,
        generators: Vec<String>,
        samples: usize,
        zero_vars: Vec<String>,
        #[serde(default)]
        expect_exact: bool,
    },
    /// Companion-system nilpotency bound plus divided third differences of
    /// the projected Hamiltonians along a constant-coefficient run.
    Companion {
        thetas: Vec<Vec<String>>,
        expect_max_order: usize,
        #[serde(default)]
        fd: Option<CompanionFd>,
        /// Expected total-derivative expressions (in the opaque
        /// coefficients) of selected projected Hamiltonians.
        #[serde(default)]
        drift_expect: BTreeMap<String, String>,
    },
    /// Central-difference validation of one field component.
    FdCheck { field: String, vars: Vec<String> },
}

#[derive(Debug, Clone, Deserialize)]
pub struct CompanionFd {
    pub coeffs: Vec<f64>,
    pub x0: Vec<f64>,
    pub t1: f64,
    pub step: f64,
    pub sample_every: usize,
    pub tol: f64,
}

/// Outcome of one pipeline check.
#[derive(Debug, Clone, Serialize, PartialEq)]
pub enum CheckStatus {
    Pass,
    Fail,
    Info,
}

#[derive(Debug, Clone, Serialize)]
pub struct CheckResult {
    pub name: String,
    pub status: CheckStatus,
    pub detail: String,
}

/// A recorded divergence between a printed display and the recomputed value.
#[derive(Debug, Clone, Serialize)]
pub struct Divergence {
    pub entry: String,
    pub printed: String,
    pub recomputed: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct ExampleReport {
    pub name: String,
    pub pass: bool,
    pub elapsed_ms: u128,
    pub checks: Vec<CheckResult>,
    pub divergences: Vec<Divergence>,
}

impl ExampleReport {
    pub fn failed_checks(&self) -> Vec<&CheckResult> {
        self.checks.iter().filter(|c| c.status == CheckStatus::Fail).collect()
    }
}

/// Embedded data files, keyed by example name.
const DATA: &[(&str, &str)] = &[
    ("riccati", include_str!("data/riccati.json")),
    ("isotropic", include_str!("data/isotropic.json")),
    ("jet", include_str!("data/jet.json")),
    ("control2", include_str!("data/control2.json")),
    ("control3", include_str!("data/control3.json")),
    ("schwarz", include_str!("data/schwarz.json")),
    ("brockett3", include_str!("data/brockett3.json")),
    ("gbrockett", include_str!("data/gbrockett.json")),
    ("frontwheel", include_str!("data/frontwheel.json")),
];

/// Registered example names, in run order. `jet-prolonged` is derived from
/// `jet` by diagonal prolongation rather than stored.
pub fn example_names() -> Vec<&'static str> {
    let mut names: Vec<&'static str> = DATA.iter().map(|(n, _)| *n).collect();
    names.push("jet-prolonged");
    names
}

/// Resolves aliases and loads the raw corpus file for a stored example.
pub fn load(name: &str) -> Result<CorpusFile, CorpusError> {
    let canonical = match name {
        "control" => "control2",
        other => other,
    };
    let (_, text) = DATA
        .iter()
        .find(|(n, _)| *n == canonical)
        .ok_or_else(|| CorpusError::UnknownExample(name.to_string()))?;
    serde_json::from_str(text).map_err(|e| CorpusError::BadData(format!("{canonical}: {e}")))
}
