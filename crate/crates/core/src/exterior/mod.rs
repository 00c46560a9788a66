//! Exterior calculus over a chart: vector fields, differential forms, and
//! the operators d, iota, wedge, Lie derivative, Lie bracket.

mod kvalued;

pub use kvalued::{KFunction, KVectorField, VecValuedOneForm};

use std::collections::BTreeMap;
use std::sync::Arc;

use num::BigRational;

use crate::chart::{same_chart, Chart};
use crate::error::CalcError;
use crate::expr::Expr;

/// A vector field written against the coordinate frame, one coefficient per
/// chart variable.
#[derive(Debug, Clone, PartialEq)]
pub struct VectorField {
    chart: Arc<Chart>,
    coeffs: Vec<Expr>,
}

impl VectorField {
    pub fn new(chart: Arc<Chart>, coeffs: Vec<Expr>) -> Result<VectorField, CalcError> {
        if coeffs.len() != chart.dim() {
            return Err(CalcError::LengthMismatch { expected: chart.dim(), got: coeffs.len() });
        }
        for c in &coeffs {
            if !same_chart(c.chart(), &chart) {
                return Err(CalcError::ChartMismatch("vector field coefficient chart".into()));
            }
        }
        Ok(VectorField { chart, coeffs })
    }

    pub fn zero(chart: &Arc<Chart>) -> VectorField {
        VectorField { chart: chart.clone(), coeffs: vec![Expr::zero(chart); chart.dim()] }
    }

    /// The coordinate field d/dx^i.
    pub fn coordinate(chart: &Arc<Chart>, idx: usize) -> VectorField {
        let mut v = VectorField::zero(chart);
        v.coeffs[idx] = Expr::one(chart);
        v
    }

    pub fn chart(&self) -> &Arc<Chart> {
        &self.chart
    }

    pub fn coeffs(&self) -> &[Expr] {
        &self.coeffs
    }

    pub fn coeff(&self, i: usize) -> &Expr {
        &self.coeffs[i]
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(Expr::is_zero)
    }

    pub fn add(&self, other: &VectorField) -> Result<VectorField, CalcError> {
        check_chart(&self.chart, &other.chart)?;
        Ok(VectorField {
            chart: self.chart.clone(),
            coeffs: self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a.add(b)).collect(),
        })
    }

    pub fn neg(&self) -> VectorField {
        VectorField { chart: self.chart.clone(), coeffs: self.coeffs.iter().map(Expr::neg).collect() }
    }

    pub fn scale(&self, c: &BigRational) -> VectorField {
        VectorField { chart: self.chart.clone(), coeffs: self.coeffs.iter().map(|e| e.scale(c)).collect() }
    }

    pub fn scale_expr(&self, f: &Expr) -> VectorField {
        VectorField { chart: self.chart.clone(), coeffs: self.coeffs.iter().map(|e| e.mul(f)).collect() }
    }

    /// Applies the field to a function: `X f = sum_i X^i df/dx^i`.
    pub fn apply(&self, f: &Expr) -> Result<Expr, CalcError> {
        check_chart(&self.chart, f.chart())?;
        let mut acc = Expr::zero(&self.chart);
        for (i, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let d = f.diff(self.chart.vars()[i].as_str())?;
            if !d.is_zero() {
                acc = acc.add(&c.mul(&d));
            }
        }
        Ok(acc)
    }
}

/// A differential p-form stored sparsely: strictly increasing index tuples
/// (0-based chart variable indices) mapped to nonzero coefficients.
#[derive(Debug, Clone, PartialEq)]
pub struct DiffForm {
    chart: Arc<Chart>,
    degree: usize,
    terms: BTreeMap<Vec<u8>, Expr>,
}

impl DiffForm {
    pub fn zero(chart: &Arc<Chart>, degree: usize) -> DiffForm {
        DiffForm { chart: chart.clone(), degree, terms: BTreeMap::new() }
    }

    /// A function viewed as a 0-form.
    pub fn from_function(f: Expr) -> DiffForm {
        let chart = f.chart().clone();
        let mut form = DiffForm::zero(&chart, 0);
        form.insert_signed(vec![], f);
        form
    }

    /// The coordinate one-form dx^i.
    pub fn coordinate(chart: &Arc<Chart>, idx: usize) -> DiffForm {
        let mut form = DiffForm::zero(chart, 1);
        form.insert_signed(vec![idx as u8], Expr::one(chart));
        form
    }

    /// Builds a form from (indices, coefficient) pairs; indices need not be
    /// sorted, the antisymmetry normalization happens on insertion.
    pub fn from_terms(
        chart: &Arc<Chart>,
        degree: usize,
        terms: impl IntoIterator<Item = (Vec<usize>, Expr)>,
    ) -> Result<DiffForm, CalcError> {
        let mut form = DiffForm::zero(chart, degree);
        for (idx, coeff) in terms {
            if idx.len() != degree {
                return Err(CalcError::LengthMismatch { expected: degree, got: idx.len() });
            }
            if idx.iter().any(|&i| i >= chart.dim()) {
                return Err(CalcError::ChartMismatch("form index out of range".into()));
            }
            if !same_chart(coeff.chart(), chart) {
                return Err(CalcError::ChartMismatch("form coefficient chart".into()));
            }
            form.insert_signed(idx.iter().map(|&i| i as u8).collect(), coeff);
        }
        Ok(form)
    }

    pub fn chart(&self) -> &Arc<Chart> {
        &self.chart
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&[u8], &Expr)> {
        self.terms.iter().map(|(k, v)| (k.as_slice(), v))
    }

    /// Coefficient of a strictly increasing index tuple.
    pub fn coeff(&self, idx: &[u8]) -> Expr {
        self.terms.get(idx).cloned().unwrap_or_else(|| Expr::zero(&self.chart))
    }

    /// Sorts indices, tracks the permutation sign, drops repeated indices.
    fn insert_signed(&mut self, mut idx: Vec<u8>, coeff: Expr) {
        if coeff.is_zero() {
            return;
        }
        // Insertion sort, counting transpositions.
        let mut sign = 1i32;
        for i in 1..idx.len() {
            let mut j = i;
            while j > 0 && idx[j - 1] > idx[j] {
                idx.swap(j - 1, j);
                sign = -sign;
                j -= 1;
            }
        }
        if idx.windows(2).any(|w| w[0] == w[1]) {
            return;
        }
        let coeff = if sign < 0 { coeff.neg() } else { coeff };
        use std::collections::btree_map::Entry;
        match self.terms.entry(idx) {
            Entry::Vacant(v) => {
                v.insert(coeff);
            }
            Entry::Occupied(mut o) => {
                let sum = o.get().add(&coeff);
                if sum.is_zero() {
                    o.remove();
                } else {
                    *o.get_mut() = sum;
                }
            }
        }
    }

    pub fn add(&self, other: &DiffForm) -> Result<DiffForm, CalcError> {
        check_chart(&self.chart, &other.chart)?;
        if self.degree != other.degree {
            return Err(CalcError::LengthMismatch { expected: self.degree, got: other.degree });
        }
        let mut out = self.clone();
        for (k, v) in &other.terms {
            out.insert_signed(k.clone(), v.clone());
        }
        Ok(out)
    }

    pub fn sub(&self, other: &DiffForm) -> Result<DiffForm, CalcError> {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> DiffForm {
        DiffForm {
            chart: self.chart.clone(),
            degree: self.degree,
            terms: self.terms.iter().map(|(k, v)| (k.clone(), v.neg())).collect(),
        }
    }

    pub fn scale(&self, c: &BigRational) -> DiffForm {
        if num::Zero::is_zero(c) {
            return DiffForm::zero(&self.chart, self.degree);
        }
        DiffForm {
            chart: self.chart.clone(),
            degree: self.degree,
            terms: self.terms.iter().map(|(k, v)| (k.clone(), v.scale(c))).collect(),
        }
    }

    pub fn scale_expr(&self, f: &Expr) -> DiffForm {
        if f.is_zero() {
            return DiffForm::zero(&self.chart, self.degree);
        }
        DiffForm {
            chart: self.chart.clone(),
            degree: self.degree,
            terms: self.terms.iter().map(|(k, v)| (k.clone(), v.mul(f))).collect(),
        }
    }

    /// Evaluates a p-form on p vector fields.
    pub fn apply(&self, fields: &[&VectorField]) -> Result<Expr, CalcError> {
        if fields.len() != self.degree {
            return Err(CalcError::LengthMismatch { expected: self.degree, got: fields.len() });
        }
        let mut form = self.clone();
        for x in fields {
            form = interior(x, &form)?;
        }
        Ok(form.coeff(&[]))
    }
}

fn check_chart(a: &Arc<Chart>, b: &Arc<Chart>) -> Result<(), CalcError> {
    if same_chart(a, b) {
        Ok(())
    } else {
        Err(CalcError::ChartMismatch(format!("{a} vs {b}")))
    }
}

/// Lie bracket `[X, Y]^i = sum_j (X^j dY^i/dx^j - Y^j dX^i/dx^j)`.
pub fn lie_bracket(x: &VectorField, y: &VectorField) -> Result<VectorField, CalcError> {
    check_chart(x.chart(), y.chart())?;
    let chart = x.chart().clone();
    let mut coeffs = Vec::with_capacity(chart.dim());
    for i in 0..chart.dim() {
        let a = x.apply(y.coeff(i))?;
        let b = y.apply(x.coeff(i))?;
        coeffs.push(a.sub(&b));
    }
    VectorField::new(chart, coeffs)
}

/// Exterior derivative. At top degree the result is the zero form.
pub fn ext_deriv(omega: &DiffForm) -> DiffForm {
    let chart = omega.chart().clone();
    let mut out = DiffForm::zero(&chart, omega.degree() + 1);
    if omega.degree() >= chart.dim() {
        return out;
    }
    for (idx, coeff) in &omega.terms {
        for j in 0..chart.dim() {
            let d = coeff.diff(chart.vars()[j].as_str()).expect("chart variable");
            if d.is_zero() {
                continue;
            }
            let mut tuple = Vec::with_capacity(idx.len() + 1);
            tuple.push(j as u8);
            tuple.extend_from_slice(idx);
            out.insert_signed(tuple, d);
        }
    }
    out
}

/// Wedge product in canonical index order; zero when degrees exceed the
/// chart dimension.
pub fn wedge(a: &DiffForm, b: &DiffForm) -> Result<DiffForm, CalcError> {
    check_chart(a.chart(), b.chart())?;
    let chart = a.chart().clone();
    let deg = a.degree() + b.degree();
    let mut out = DiffForm::zero(&chart, deg);
    if deg > chart.dim() {
        return Ok(out);
    }
    for (ia, ca) in &a.terms {
        for (ib, cb) in &b.terms {
            let mut tuple = Vec::with_capacity(deg);
            tuple.extend_from_slice(ia);
            tuple.extend_from_slice(ib);
            out.insert_signed(tuple, ca.mul(cb));
        }
    }
    Ok(out)
}

/// Interior product (contraction in the first slot); degree drops by one.
pub fn interior(x: &VectorField, omega: &DiffForm) -> Result<DiffForm, CalcError> {
    check_chart(x.chart(), omega.chart())?;
    if omega.degree() == 0 {
        return Err(CalcError::DegreeZero);
    }
    let chart = omega.chart().clone();
    let mut out = DiffForm::zero(&chart, omega.degree() - 1);
    for (idx, coeff) in &omega.terms {
        for (slot, &i) in idx.iter().enumerate() {
            let xi = x.coeff(i as usize);
            if xi.is_zero() {
                continue;
            }
            let rest: Vec<u8> = idx
                .iter()
                .enumerate()
                .filter(|&(s, _)| s != slot)
                .map(|(_, &v)| v)
                .collect();
            let mut c = coeff.mul(xi);
            if slot % 2 == 1 {
                c = c.neg();
            }
            out.insert_signed(rest, c);
        }
    }
    Ok(out)
}

/// Lie derivative via the Cartan formula `L_X = iota_X d + d iota_X`.
pub fn lie_derivative(x: &VectorField, omega: &DiffForm) -> Result<DiffForm, CalcError> {
    let a = interior(x, &ext_deriv(omega))?;
    if omega.degree() == 0 {
        // d iota_X degenerates at degree zero; L_X f = X f.
        let f = omega.coeff(&[]);
        let xf = x.apply(&f)?;
        return a.add(&DiffForm::from_function(xf));
    }
    let b = ext_deriv(&interior(x, omega)?);
    a.add(&b)
}

/// Differential of a function as a one-form.
pub fn differential(f: &Expr) -> DiffForm {
    ext_deriv(&DiffForm::from_function(f.clone()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::parse;

    fn chart5() -> Arc<Chart> {
        Chart::coords(["x1", "x2", "x3", "x4", "x5"]).unwrap()
    }

    fn vf(chart: &Arc<Chart>, coeffs: &[&str]) -> VectorField {
        VectorField::new(chart.clone(), coeffs.iter().map(|s| parse(s, chart).unwrap()).collect())
            .unwrap()
    }

    #[test]
    fn bracket_basics() {
        // [d/dx, x d/dx] = d/dx on the line.
        let c = Chart::coords(["x"]).unwrap();
        let x1 = vf(&c, &["1"]);
        let x2 = vf(&c, &["x"]);
        assert_eq!(lie_bracket(&x1, &x2).unwrap(), x1);
        // Antisymmetry: [X, X] = 0.
        assert!(lie_bracket(&x2, &x2).unwrap().is_zero());
    }

    #[test]
    fn control_bracket() {
        // [X1, X3] = 2 X4 for the five-dimensional control fields.
        let c = chart5();
        let x1 = vf(&c, &["1", "0", "0", "0", "0"]);
        let x3 = vf(&c, &["0", "0", "1", "2*x1", "2*x2"]);
        let x4 = vf(&c, &["0", "0", "0", "1", "0"]);
        assert_eq!(lie_bracket(&x1, &x3).unwrap(), x4.scale(&num::BigRational::from_integer(2.into())));
    }

    #[test]
    fn exterior_derivative() {
        let c = chart5();
        // d(dx1) = 0.
        let dx1 = DiffForm::coordinate(&c, 0);
        assert!(ext_deriv(&dx1).is_zero());
        // d(-x2 dx1 + dx3) = dx1 ^ dx2.
        let ups3 = DiffForm::from_terms(
            &c,
            1,
            [
                (vec![0], parse("-x2", &c).unwrap()),
                (vec![2], parse("1", &c).unwrap()),
            ],
        )
        .unwrap();
        let d = ext_deriv(&ups3);
        let expected =
            DiffForm::from_terms(&c, 2, [(vec![0, 1], parse("1", &c).unwrap())]).unwrap();
        assert_eq!(d, expected);
        // d(-2 x3 dx1 + dx4) = 2 dx1 ^ dx3.
        let ups4 = DiffForm::from_terms(
            &c,
            1,
            [
                (vec![0], parse("-2*x3", &c).unwrap()),
                (vec![3], parse("1", &c).unwrap()),
            ],
        )
        .unwrap();
        let expected4 =
            DiffForm::from_terms(&c, 2, [(vec![0, 2], parse("2", &c).unwrap())]).unwrap();
        assert_eq!(ext_deriv(&ups4), expected4);
    }

    #[test]
    fn wedge_antisymmetry() {
        let c = chart5();
        let dx1 = DiffForm::coordinate(&c, 0);
        let dx2 = DiffForm::coordinate(&c, 1);
        assert!(wedge(&dx1, &dx1).unwrap().is_zero());
        assert_eq!(wedge(&dx1, &dx2).unwrap(), wedge(&dx2, &dx1).unwrap().neg());
    }

    #[test]
    fn interior_and_reeb_duality() {
        let c = chart5();
        let ups4 = DiffForm::from_terms(
            &c,
            1,
            [
                (vec![0], parse("-2*x3", &c).unwrap()),
                (vec![3], parse("1", &c).unwrap()),
            ],
        )
        .unwrap();
        let x4 = vf(&c, &["0", "0", "0", "1", "0"]);
        let got = interior(&x4, &ups4).unwrap();
        assert_eq!(got.coeff(&[]), Expr::one(&c));
        // Contraction of the zero form errors at degree zero.
        assert!(interior(&x4, &DiffForm::from_function(Expr::one(&c))).is_err());
        // iota_{X3} Ups4 = 2 x1, minus the first Hamiltonian component.
        let x3 = vf(&c, &["0", "0", "1", "2*x1", "2*x2"]);
        assert_eq!(interior(&x3, &ups4).unwrap().coeff(&[]), parse("2*x1", &c).unwrap());
    }

    #[test]
    fn lie_derivative_examples() {
        // L_{X4} omega = 2 omega for the Euler field on phase space.
        let c = Chart::coords(["x1", "v1", "x2", "v2"]).unwrap();
        let omega = DiffForm::from_terms(
            &c,
            2,
            [
                (vec![0, 1], Expr::one(&c)),
                (vec![2, 3], Expr::one(&c)),
            ],
        )
        .unwrap();
        let euler = vf(&c, &["x1", "v1", "x2", "v2"]);
        let ld = lie_derivative(&euler, &omega).unwrap();
        assert_eq!(ld, omega.scale(&num::BigRational::from_integer(2.into())));
        // L_{d/dx4} dx1 = 0.
        let c5 = chart5();
        let x = vf(&c5, &["0", "0", "0", "1", "0"]);
        assert!(lie_derivative(&x, &DiffForm::coordinate(&c5, 0)).unwrap().is_zero());
    }
}
