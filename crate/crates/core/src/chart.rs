//! Coordinate charts and the symbol universe expressions live over.

use std::fmt;
use std::sync::Arc;

use crate::error::ExprError;

/// An ordered coordinate chart plus a disjoint set of opaque formal
/// constants.
///
/// Chart variables are the coordinate functions `x^i`; opaque constants
/// (control coefficients `b1`, `b2`, ... and similar symbols) take part in
/// arithmetic but have zero coordinate derivative. Every symbolic value in
/// this crate carries an `Arc<Chart>` and operations mixing values from
/// different charts fail with `ChartMismatch`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Chart {
    vars: Vec<String>,
    consts: Vec<String>,
}

fn is_identifier(s: &str) -> bool {
    let mut chars = s.chars();
    match chars.next() {
        Some(c) if c.is_ascii_alphabetic() || c == '_' => {}
        _ => return false,
    }
    chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

impl Chart {
    /// Builds a chart from variable names and opaque constant names.
    ///
    /// Names must be unique across both lists and match the identifier
    /// grammar `[A-Za-z_][A-Za-z0-9_]*`; at least one variable is required.
    pub fn new<S: Into<String>>(
        vars: impl IntoIterator<Item = S>,
        consts: impl IntoIterator<Item = S>,
    ) -> Result<Arc<Chart>, ExprError> {
        let vars: Vec<String> = vars.into_iter().map(Into::into).collect();
        let consts: Vec<String> = consts.into_iter().map(Into::into).collect();
        if vars.is_empty() {
            return Err(ExprError::InvalidChart("chart needs at least one variable".into()));
        }
        let mut seen = std::collections::HashSet::new();
        for name in vars.iter().chain(consts.iter()) {
            if !is_identifier(name) {
                return Err(ExprError::InvalidChart(format!("bad symbol name `{name}`")));
            }
            if !seen.insert(name.clone()) {
                return Err(ExprError::InvalidChart(format!("duplicate symbol `{name}`")));
            }
        }
        Ok(Arc::new(Chart { vars, consts }))
    }

    /// Chart without opaque constants.
    pub fn coords<S: Into<String>>(vars: impl IntoIterator<Item = S>) -> Result<Arc<Chart>, ExprError> {
        Chart::new(vars, Vec::<S>::new())
    }

    pub fn dim(&self) -> usize {
        self.vars.len()
    }

    pub fn vars(&self) -> &[String] {
        &self.vars
    }

    pub fn consts(&self) -> &[String] {
        &self.consts
    }

    /// Total number of symbols (variables then constants).
    pub fn num_symbols(&self) -> usize {
        self.vars.len() + self.consts.len()
    }

    /// Symbol name by internal index; variables come first.
    pub fn symbol_name(&self, idx: usize) -> &str {
        if idx < self.vars.len() {
            &self.vars[idx]
        } else {
            &self.consts[idx - self.vars.len()]
        }
    }

    /// Index of a symbol, variables first.
    pub fn symbol_index(&self, name: &str) -> Option<usize> {
        if let Some(i) = self.vars.iter().position(|v| v == name) {
            return Some(i);
        }
        self.consts.iter().position(|c| c == name).map(|i| i + self.vars.len())
    }

    /// Index of a chart variable (not a constant).
    pub fn var_index(&self, name: &str) -> Option<usize> {
        self.vars.iter().position(|v| v == name)
    }

    pub fn is_var(&self, idx: usize) -> bool {
        idx < self.vars.len()
    }
}

impl fmt::Display for Chart {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}", self.vars.join(", "))?;
        if !self.consts.is_empty() {
            write!(f, "; {}", self.consts.join(", "))?;
        }
        write!(f, ")")
    }
}

/// Checks that two values share a chart, by value.
pub fn same_chart(a: &Arc<Chart>, b: &Arc<Chart>) -> bool {
    Arc::ptr_eq(a, b) || a == b
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_duplicates_and_bad_names() {
        assert!(Chart::coords(["x", "x"]).is_err());
        assert!(Chart::coords(["1x"]).is_err());
        assert!(Chart::new(["x"], ["x"]).is_err());
        assert!(Chart::coords(Vec::<&str>::new()).is_err());
        let c = Chart::new(["x1", "x2"], ["b1"]).unwrap();
        assert_eq!(c.dim(), 2);
        assert_eq!(c.symbol_index("b1"), Some(2));
        assert_eq!(c.symbol_name(2), "b1");
    }
}
