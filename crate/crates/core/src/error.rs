//! Error types shared across the crate.

use thiserror::Error;

/// Errors from the scalar expression layer.
#[derive(Debug, Clone, Error, PartialEq)]
pub enum ExprError {
    #[error("syntax error at byte {pos}: {msg}")]
    Syntax { pos: usize, msg: String },
    #[error("unknown symbol `{0}`")]
    UnknownSymbol(String),
    #[error("denominator is identically zero")]
    ZeroDenominator,
    #[error("symbol `{0}` is not bound")]
    UnboundSymbol(String),
    #[error("denominator vanishes at the evaluation point")]
    PoleAtPoint,
    #[error("invalid chart: {0}")]
    InvalidChart(String),
    #[error("chart mismatch: {0}")]
    ChartMismatch(String),
}

/// Errors from exterior-calculus operations.
#[derive(Debug, Clone, Error, PartialEq)]
pub enum CalcError {
    #[error("chart mismatch: {0}")]
    ChartMismatch(String),
    #[error("interior product needs degree >= 1")]
    DegreeZero,
    #[error("length mismatch: expected {expected}, got {got}")]
    LengthMismatch { expected: usize, got: usize },
    #[error(transparent)]
    Expr(#[from] ExprError),
}

/// Errors from exact linear algebra.
#[derive(Debug, Clone, Error, PartialEq)]
pub enum LinAlgError {
    #[error("expression blow-up during elimination (term budget exceeded)")]
    RankComputationOverflow,
    #[error(transparent)]
    Expr(#[from] ExprError),
}

/// Errors from the k-contact layer.
#[derive(Debug, Clone, Error, PartialEq)]
pub enum KContactError {
    #[error("the supplied form is not a k-contact form ({0})")]
    NotKContact(String),
    #[error("generic solve degenerates; vanishing locus: {locus:?}")]
    SingularSolve { locus: Vec<String> },
    #[error("input vector field is not Hamiltonian for this form: {0}")]
    NotHamiltonianInput(String),
    #[error("distribution admits no regular annihilator: {0}")]
    NoAnnihilator(String),
    #[error("symmetry condition fails: {0}")]
    SymmetryFailure(String),
    #[error("symmetries plus distribution do not span the tangent space: {0}")]
    SpanFailure(String),
    #[error("distribution is not maximally non-integrable")]
    NotMaxNonintegrable,
    #[error("k-function is not a first integral of the Reeb fields: {0}")]
    NotProjectable(String),
    #[error("internal inconsistency: {0}")]
    Internal(String),
    #[error(transparent)]
    Calc(#[from] CalcError),
    #[error(transparent)]
    LinAlg(#[from] LinAlgError),
}

impl From<ExprError> for KContactError {
    fn from(e: ExprError) -> Self {
        KContactError::Calc(CalcError::Expr(e))
    }
}

/// Errors from Lie-system level algebra.
#[derive(Debug, Clone, Error, PartialEq)]
pub enum LieError {
    #[error("bracket closure budget exhausted at word {word}")]
    NotClosed { word: String },
    #[error("frame is degenerate (determinant vanishes identically)")]
    DegenerateFrame,
    #[error("Reeb derivations do not act with constant coefficients: {0}")]
    LambdaNotConstant(String),
    #[error("projected Hamiltonians are linearly dependent")]
    DependentProjections,
    #[error("span decision procedure did not converge")]
    Indecisive,
    #[error(transparent)]
    KContact(#[from] KContactError),
    #[error(transparent)]
    Calc(#[from] CalcError),
    #[error(transparent)]
    LinAlg(#[from] LinAlgError),
}

impl From<ExprError> for LieError {
    fn from(e: ExprError) -> Self {
        LieError::Calc(CalcError::Expr(e))
    }
}

/// Errors from floating-point verification runs.
#[derive(Debug, Clone, Error, PartialEq)]
pub enum NumericError {
    #[error("pole encountered at t = {t}: {state:?}")]
    PoleEncountered { t: f64, state: Vec<f64> },
    #[error("seed solutions are degenerate: {0}")]
    DegenerateSeeds(String),
    #[error("sample {index} is not on the zero set (|{value}| >= {tol})")]
    SampleNotOnZeroSet { index: usize, value: f64, tol: f64 },
    #[error(transparent)]
    Expr(#[from] ExprError),
}

/// Errors from the golden-data corpus.
#[derive(Debug, Clone, Error, PartialEq)]
pub enum CorpusError {
    #[error("unknown example `{0}`")]
    UnknownExample(String),
    #[error("corpus data is malformed: {0}")]
    BadData(String),
    #[error("pipeline failure: {0}")]
    Pipeline(String),
}
