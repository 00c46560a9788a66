//! R^k-valued objects: one-forms, k-functions and k-vector fields.
//!
//! All operators on vector-valued objects act component-wise.

use std::sync::Arc;

use num::BigRational;

use crate::chart::{same_chart, Chart};
use crate::error::CalcError;
use crate::expr::Expr;

use super::{ext_deriv, interior, lie_derivative, DiffForm, VectorField};

/// An R^k-valued one-form `eta = sum_a eta^a (x) e_a`.
#[derive(Debug, Clone, PartialEq)]
pub struct VecValuedOneForm {
    chart: Arc<Chart>,
    components: Vec<DiffForm>,
}

impl VecValuedOneForm {
    pub fn new(chart: Arc<Chart>, components: Vec<DiffForm>) -> Result<VecValuedOneForm, CalcError> {
        if components.is_empty() {
            return Err(CalcError::LengthMismatch { expected: 1, got: 0 });
        }
        for c in &components {
            if !same_chart(c.chart(), &chart) {
                return Err(CalcError::ChartMismatch("k-form component chart".into()));
            }
            if c.degree() != 1 {
                return Err(CalcError::LengthMismatch { expected: 1, got: c.degree() });
            }
        }
        Ok(VecValuedOneForm { chart, components })
    }

    pub fn chart(&self) -> &Arc<Chart> {
        &self.chart
    }

    pub fn k(&self) -> usize {
        self.components.len()
    }

    pub fn components(&self) -> &[DiffForm] {
        &self.components
    }

    pub fn component(&self, a: usize) -> &DiffForm {
        &self.components[a]
    }

    /// Component-wise exterior derivative `d eta`.
    pub fn ext_deriv(&self) -> Vec<DiffForm> {
        self.components.iter().map(ext_deriv).collect()
    }

    /// Component-wise interior product, as a k-function `iota_X eta`.
    pub fn interior(&self, x: &VectorField) -> Result<KFunction, CalcError> {
        let comps = self
            .components
            .iter()
            .map(|c| Ok(interior(x, c)?.coeff(&[])))
            .collect::<Result<Vec<_>, CalcError>>()?;
        KFunction::new(self.chart.clone(), comps)
    }

    /// Component-wise Lie derivative.
    pub fn lie_derivative(&self, x: &VectorField) -> Result<Vec<DiffForm>, CalcError> {
        self.components.iter().map(|c| lie_derivative(x, c)).collect()
    }

    /// Real-linear combination of the components, `sum_a theta_a eta^a`.
    pub fn pair_covector(&self, theta: &[BigRational]) -> Result<DiffForm, CalcError> {
        if theta.len() != self.k() {
            return Err(CalcError::LengthMismatch { expected: self.k(), got: theta.len() });
        }
        let mut acc = DiffForm::zero(&self.chart, 1);
        for (t, c) in theta.iter().zip(&self.components) {
            acc = acc.add(&c.scale(t))?;
        }
        Ok(acc)
    }
}

/// An R^k-valued function `h = sum_a h^a e_a`.
#[derive(Debug, Clone, PartialEq)]
pub struct KFunction {
    chart: Arc<Chart>,
    components: Vec<Expr>,
}

impl KFunction {
    pub fn new(chart: Arc<Chart>, components: Vec<Expr>) -> Result<KFunction, CalcError> {
        if components.is_empty() {
            return Err(CalcError::LengthMismatch { expected: 1, got: 0 });
        }
        for c in &components {
            if !same_chart(c.chart(), &chart) {
                return Err(CalcError::ChartMismatch("k-function component chart".into()));
            }
        }
        Ok(KFunction { chart, components })
    }

    pub fn zero(chart: &Arc<Chart>, k: usize) -> KFunction {
        KFunction { chart: chart.clone(), components: vec![Expr::zero(chart); k] }
    }

    /// The constant k-function `c * e_a`.
    pub fn basis(chart: &Arc<Chart>, k: usize, a: usize, c: BigRational) -> KFunction {
        let mut f = KFunction::zero(chart, k);
        f.components[a] = Expr::constant(chart, c);
        f
    }

    pub fn chart(&self) -> &Arc<Chart> {
        &self.chart
    }

    pub fn k(&self) -> usize {
        self.components.len()
    }

    pub fn components(&self) -> &[Expr] {
        &self.components
    }

    pub fn component(&self, a: usize) -> &Expr {
        &self.components[a]
    }

    pub fn is_zero(&self) -> bool {
        self.components.iter().all(Expr::is_zero)
    }

    pub fn add(&self, other: &KFunction) -> Result<KFunction, CalcError> {
        if !same_chart(&self.chart, &other.chart) {
            return Err(CalcError::ChartMismatch("k-function addition".into()));
        }
        if self.k() != other.k() {
            return Err(CalcError::LengthMismatch { expected: self.k(), got: other.k() });
        }
        Ok(KFunction {
            chart: self.chart.clone(),
            components: self.components.iter().zip(&other.components).map(|(a, b)| a.add(b)).collect(),
        })
    }

    pub fn sub(&self, other: &KFunction) -> Result<KFunction, CalcError> {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> KFunction {
        KFunction { chart: self.chart.clone(), components: self.components.iter().map(Expr::neg).collect() }
    }

    pub fn scale(&self, c: &BigRational) -> KFunction {
        KFunction {
            chart: self.chart.clone(),
            components: self.components.iter().map(|e| e.scale(c)).collect(),
        }
    }

    pub fn scale_expr(&self, f: &Expr) -> KFunction {
        KFunction {
            chart: self.chart.clone(),
            components: self.components.iter().map(|e| e.mul(f)).collect(),
        }
    }

    /// Pairing with a real covector: `<h, theta> = sum_a theta_a h^a`.
    pub fn pairing(&self, theta: &[BigRational]) -> Result<Expr, CalcError> {
        if theta.len() != self.k() {
            return Err(CalcError::LengthMismatch { expected: self.k(), got: theta.len() });
        }
        let mut acc = Expr::zero(&self.chart);
        for (t, c) in theta.iter().zip(&self.components) {
            acc = acc.add(&c.scale(t));
        }
        Ok(acc)
    }

    /// Applies a vector field component-wise: `X h = sum_a (X h^a) e_a`.
    pub fn apply_field(&self, x: &VectorField) -> Result<KFunction, CalcError> {
        let comps = self
            .components
            .iter()
            .map(|c| x.apply(c))
            .collect::<Result<Vec<_>, CalcError>>()?;
        KFunction::new(self.chart.clone(), comps)
    }
}

/// A k-vector field `X = (X_1, ..., X_k)`.
#[derive(Debug, Clone, PartialEq)]
pub struct KVectorField {
    chart: Arc<Chart>,
    fields: Vec<VectorField>,
}

impl KVectorField {
    pub fn new(chart: Arc<Chart>, fields: Vec<VectorField>) -> Result<KVectorField, CalcError> {
        if fields.is_empty() {
            return Err(CalcError::LengthMismatch { expected: 1, got: 0 });
        }
        for f in &fields {
            if !same_chart(f.chart(), &chart) {
                return Err(CalcError::ChartMismatch("k-vector-field component chart".into()));
            }
        }
        Ok(KVectorField { chart, fields })
    }

    pub fn chart(&self) -> &Arc<Chart> {
        &self.chart
    }

    pub fn k(&self) -> usize {
        self.fields.len()
    }

    pub fn fields(&self) -> &[VectorField] {
        &self.fields
    }

    pub fn field(&self, a: usize) -> &VectorField {
        &self.fields[a]
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::parse;

    #[test]
    fn pairing_examples() {
        // Front-wheel h1 = x2 e1 - x3 e2; <h1, e1> = x2, <h1, 0> = 0.
        let c = Chart::coords(["x1", "x2", "x3", "x4"]).unwrap();
        let h1 = KFunction::new(
            c.clone(),
            vec![parse("x2", &c).unwrap(), parse("-x3", &c).unwrap()],
        )
        .unwrap();
        let one = BigRational::from_integer(1.into());
        let zero = BigRational::from_integer(0.into());
        assert_eq!(h1.pairing(&[one, zero.clone()]).unwrap(), parse("x2", &c).unwrap());
        assert!(h1.pairing(&[zero.clone(), zero]).unwrap().is_zero());
        assert!(h1.pairing(&[]).is_err());
    }
}
