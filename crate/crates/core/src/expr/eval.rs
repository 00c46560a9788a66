//! Numeric and exact evaluation of expressions.

use std::collections::BTreeMap;

use num::{BigRational, Zero};

use crate::error::ExprError;

use super::poly::rational_to_f64;
use super::Expr;

/// Denominator magnitudes below this are treated as poles in floating point.
pub const POLE_TOLERANCE: f64 = 1e-12;

/// A full exact binding of a chart's symbols to rationals.
pub type ExactPoint = BTreeMap<String, BigRational>;

impl Expr {
    /// IEEE-double value at a point binding every variable and every opaque
    /// constant. Fails with `UnboundSymbol` on a missing binding and with
    /// `PoleAtPoint` when the denominator magnitude drops below `1e-12`.
    pub fn eval_f64(
        &self,
        point: &BTreeMap<String, f64>,
        consts: &BTreeMap<String, f64>,
    ) -> Result<f64, ExprError> {
        let chart = self.chart();
        let mut values = Vec::with_capacity(chart.num_symbols());
        for i in 0..chart.num_symbols() {
            let name = chart.symbol_name(i);
            let v = if chart.is_var(i) {
                point.get(name).or_else(|| consts.get(name))
            } else {
                consts.get(name).or_else(|| point.get(name))
            };
            match v {
                Some(&x) => values.push(x),
                None => {
                    // Unused symbols need no binding.
                    if self.numerator().depends_on(i) || self.denominator().depends_on(i) {
                        return Err(ExprError::UnboundSymbol(name.to_string()));
                    }
                    values.push(0.0);
                }
            }
        }
        let den = self.denominator().eval_f64(&values);
        if den.abs() < POLE_TOLERANCE {
            return Err(ExprError::PoleAtPoint);
        }
        Ok(self.numerator().eval_f64(&values) / den)
    }

    /// Exact rational value at a rational point. `PoleAtPoint` when the
    /// denominator vanishes exactly.
    pub fn eval_exact(&self, point: &ExactPoint) -> Result<BigRational, ExprError> {
        let chart = self.chart();
        let mut values = Vec::with_capacity(chart.num_symbols());
        for i in 0..chart.num_symbols() {
            let name = chart.symbol_name(i);
            match point.get(name) {
                Some(v) => values.push(v.clone()),
                None => {
                    if self.numerator().depends_on(i) || self.denominator().depends_on(i) {
                        return Err(ExprError::UnboundSymbol(name.to_string()));
                    }
                    values.push(BigRational::zero());
                }
            }
        }
        let den = self.denominator().eval_exact(&values);
        if den.is_zero() {
            return Err(ExprError::PoleAtPoint);
        }
        Ok(self.numerator().eval_exact(&values) / den)
    }

    /// Exact evaluation against a positional value slice (one per symbol).
    pub fn eval_exact_slice(&self, values: &[BigRational]) -> Result<BigRational, ExprError> {
        let den = self.denominator().eval_exact(values);
        if den.is_zero() {
            return Err(ExprError::PoleAtPoint);
        }
        Ok(self.numerator().eval_exact(values) / den)
    }

    /// Floating-point evaluation against a positional value slice.
    pub fn eval_f64_slice(&self, values: &[f64]) -> Result<f64, ExprError> {
        let den = self.denominator().eval_f64(values);
        if den.abs() < POLE_TOLERANCE {
            return Err(ExprError::PoleAtPoint);
        }
        Ok(self.numerator().eval_f64(values) / den)
    }
}

/// Compiled form of an expression for tight numeric loops: flat term lists
/// with f64 coefficients, indexed into a positional value slice.
#[derive(Debug, Clone)]
pub struct CompiledExpr {
    num: Vec<(f64, Vec<(usize, i32)>)>,
    den: Vec<(f64, Vec<(usize, i32)>)>,
}

impl CompiledExpr {
    pub fn new(e: &Expr) -> CompiledExpr {
        let flatten = |p: &super::poly::Poly| {
            p.terms
                .iter()
                .map(|(m, c)| {
                    let powers: Vec<(usize, i32)> = m
                        .0
                        .iter()
                        .enumerate()
                        .filter(|(_, &e)| e > 0)
                        .map(|(i, &e)| (i, e as i32))
                        .collect();
                    (rational_to_f64(c), powers)
                })
                .collect::<Vec<_>>()
        };
        CompiledExpr { num: flatten(e.numerator()), den: flatten(e.denominator()) }
    }

    /// Evaluates at positional symbol values; `None` signals a pole.
    pub fn eval(&self, values: &[f64]) -> Option<f64> {
        let run = |terms: &[(f64, Vec<(usize, i32)>)]| {
            let mut acc = 0.0;
            for (c, powers) in terms {
                let mut t = *c;
                for &(i, e) in powers {
                    t *= values[i].powi(e);
                }
                acc += t;
            }
            acc
        };
        let den = run(&self.den);
        if den.abs() < POLE_TOLERANCE {
            return None;
        }
        Some(run(&self.num) / den)
    }
}
