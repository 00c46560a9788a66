//! Exact scalar arithmetic: canonical multivariate rational functions.

mod display;
pub mod eval;
pub mod gcd;
mod parse;
pub mod poly;

use std::collections::BTreeMap;
use std::sync::Arc;

use num::{BigInt, BigRational, One, Zero};

use crate::chart::{same_chart, Chart};
use crate::error::ExprError;
use gcd::poly_gcd;
use poly::Poly;

pub use eval::ExactPoint;
pub use parse::parse;

/// A canonical rational function `p/q` over a chart's variables and opaque
/// constants.
///
/// Canonical form: `gcd(p, q) = 1`, `q` is nonzero with leading coefficient
/// one in graded-lex order, and `p = 0` forces `q = 1`. Two expressions are
/// equal iff their charts and canonical forms coincide, so `==` decides
/// symbolic equality.
#[derive(Debug, Clone, PartialEq)]
pub struct Expr {
    chart: Arc<Chart>,
    num: Poly,
    den: Poly,
}

impl Expr {
    fn make(chart: Arc<Chart>, num: Poly, den: Poly) -> Result<Expr, ExprError> {
        if den.is_zero() {
            return Err(ExprError::ZeroDenominator);
        }
        if num.is_zero() {
            let n = chart.num_symbols();
            return Ok(Expr { chart, num: Poly::zero(n), den: Poly::one(n) });
        }
        let g = poly_gcd(&num, &den);
        let (num, den) = if g.is_constant() && g.as_constant().map(|c| c.is_one()).unwrap_or(false) {
            (num, den)
        } else {
            (
                num.div_exact(&g).expect("gcd divides numerator"),
                den.div_exact(&g).expect("gcd divides denominator"),
            )
        };
        let (den, lead) = den.monic();
        let num = num.scale(&(BigRational::one() / lead));
        Ok(Expr { chart, num, den })
    }

    pub fn zero(chart: &Arc<Chart>) -> Expr {
        let n = chart.num_symbols();
        Expr { chart: chart.clone(), num: Poly::zero(n), den: Poly::one(n) }
    }

    pub fn one(chart: &Arc<Chart>) -> Expr {
        Expr::constant(chart, BigRational::one())
    }

    pub fn constant(chart: &Arc<Chart>, c: BigRational) -> Expr {
        let n = chart.num_symbols();
        Expr { chart: chart.clone(), num: Poly::constant(n, c), den: Poly::one(n) }
    }

    pub fn int(chart: &Arc<Chart>, c: i64) -> Expr {
        Expr::constant(chart, BigRational::from(BigInt::from(c)))
    }

    /// Wraps a polynomial as an expression (denominator one). Polynomials
    /// over unit denominators are already canonical, so no gcd runs.
    pub(crate) fn from_poly(chart: &Arc<Chart>, p: Poly) -> Expr {
        if p.is_zero() {
            return Expr::zero(chart);
        }
        Expr { chart: chart.clone(), num: p, den: Poly::one(chart.num_symbols()) }
    }

    /// The symbol `name` as an expression (variable or opaque constant).
    pub fn symbol(chart: &Arc<Chart>, name: &str) -> Result<Expr, ExprError> {
        let idx = chart
            .symbol_index(name)
            .ok_or_else(|| ExprError::UnknownSymbol(name.to_string()))?;
        let n = chart.num_symbols();
        Ok(Expr { chart: chart.clone(), num: Poly::var(n, idx), den: Poly::one(n) })
    }

    pub fn chart(&self) -> &Arc<Chart> {
        &self.chart
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    /// Constant value if the expression has no symbols.
    pub fn as_constant(&self) -> Option<BigRational> {
        let n = self.num.as_constant()?;
        let d = self.den.as_constant()?;
        Some(n / d)
    }

    pub fn numerator(&self) -> &Poly {
        &self.num
    }

    pub fn denominator(&self) -> &Poly {
        &self.den
    }

    pub fn is_polynomial(&self) -> bool {
        self.den.as_constant().map(|c| c.is_one()).unwrap_or(false)
    }

    /// Rough size measure used for pivot selection and blow-up guards.
    pub fn size(&self) -> usize {
        self.num.num_terms() + self.den.num_terms()
    }

    pub fn total_degree(&self) -> u32 {
        self.num.total_degree().max(self.den.total_degree())
    }

    fn assert_same_chart(&self, other: &Expr) {
        assert!(
            same_chart(&self.chart, &other.chart),
            "expression arithmetic across different charts ({} vs {})",
            self.chart,
            other.chart
        );
    }

    pub fn add(&self, other: &Expr) -> Expr {
        self.assert_same_chart(other);
        if self.is_zero() {
            return other.clone();
        }
        if other.is_zero() {
            return self.clone();
        }
        // p1/q1 + p2/q2 with g = gcd(q1, q2) to limit growth.
        let g = poly_gcd(&self.den, &other.den);
        let q1g = self.den.div_exact(&g).unwrap();
        let q2g = other.den.div_exact(&g).unwrap();
        let num = self.num.mul(&q2g).add(&other.num.mul(&q1g));
        let den = self.den.mul(&q2g);
        Expr::make(self.chart.clone(), num, den).expect("nonzero denominator")
    }

    pub fn sub(&self, other: &Expr) -> Expr {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Expr {
        Expr { chart: self.chart.clone(), num: self.num.neg(), den: self.den.clone() }
    }

    pub fn mul(&self, other: &Expr) -> Expr {
        self.assert_same_chart(other);
        if self.is_zero() || other.is_zero() {
            return Expr::zero(&self.chart);
        }
        // Cross-reduce before multiplying.
        let g1 = poly_gcd(&self.num, &other.den);
        let g2 = poly_gcd(&other.num, &self.den);
        let n1 = self.num.div_exact(&g1).unwrap();
        let d2 = other.den.div_exact(&g1).unwrap();
        let n2 = other.num.div_exact(&g2).unwrap();
        let d1 = self.den.div_exact(&g2).unwrap();
        Expr::make(self.chart.clone(), n1.mul(&n2), d1.mul(&d2)).expect("nonzero denominator")
    }

    pub fn scale(&self, c: &BigRational) -> Expr {
        if c.is_zero() {
            return Expr::zero(&self.chart);
        }
        Expr { chart: self.chart.clone(), num: self.num.scale(c), den: self.den.clone() }
    }

    pub fn div(&self, other: &Expr) -> Result<Expr, ExprError> {
        self.assert_same_chart(other);
        if other.is_zero() {
            return Err(ExprError::ZeroDenominator);
        }
        Ok(self.mul(&Expr {
            chart: other.chart.clone(),
            num: other.den.clone(),
            den: other.num.clone(),
        }))
    }

    pub fn recip(&self) -> Result<Expr, ExprError> {
        Expr::one(&self.chart).div(self)
    }

    pub fn pow(&self, e: i32) -> Result<Expr, ExprError> {
        if e == 0 {
            return Ok(Expr::one(&self.chart));
        }
        if e < 0 {
            if self.is_zero() {
                return Err(ExprError::ZeroDenominator);
            }
            return self.recip()?.pow(-e);
        }
        Ok(Expr {
            chart: self.chart.clone(),
            num: self.num.pow(e as u32),
            den: self.den.pow(e as u32),
        })
    }

    /// Exact partial derivative with respect to a chart variable. Opaque
    /// constants differentiate to zero; unknown names are an error.
    pub fn diff(&self, var: &str) -> Result<Expr, ExprError> {
        let idx = self
            .chart
            .symbol_index(var)
            .ok_or_else(|| ExprError::UnknownSymbol(var.to_string()))?;
        if !self.chart.is_var(idx) {
            // Differentiating along a constant direction is a caller bug;
            // within the chart, d(const)/dx = 0 comes out of the quotient rule.
            return Ok(Expr::zero(&self.chart));
        }
        let dn = self.num.diff(idx);
        let dd = self.den.diff(idx);
        if dd.is_zero() {
            return Expr::make(self.chart.clone(), dn, self.den.clone());
        }
        let num = dn.mul(&self.den).sub(&self.num.mul(&dd));
        let den = self.den.mul(&self.den);
        Expr::make(self.chart.clone(), num, den)
    }

    /// Quotient-rule derivative with respect to an arbitrary symbol index,
    /// including opaque constants. Used where constants carry implicit
    /// dependence (integrability of t-dependent systems).
    pub(crate) fn diff_symbol(&self, idx: usize) -> Expr {
        let dn = self.num.diff(idx);
        let dd = self.den.diff(idx);
        if dd.is_zero() {
            return Expr::make(self.chart.clone(), dn, self.den.clone()).expect("nonzero denominator");
        }
        let num = dn.mul(&self.den).sub(&self.num.mul(&dd));
        let den = self.den.mul(&self.den);
        Expr::make(self.chart.clone(), num, den).expect("nonzero denominator")
    }

    /// Substitutes chart variables by expressions over a target chart.
    ///
    /// Unbound variables and all opaque constants must exist verbatim in the
    /// target chart. Fails with `ZeroDenominator` if the denominator collapses
    /// after substitution.
    pub fn substitute(
        &self,
        bindings: &BTreeMap<String, Expr>,
        target: &Arc<Chart>,
    ) -> Result<Expr, ExprError> {
        let mut images: Vec<Expr> = Vec::with_capacity(self.chart.num_symbols());
        for i in 0..self.chart.num_symbols() {
            let name = self.chart.symbol_name(i);
            let image = if self.chart.is_var(i) {
                match bindings.get(name) {
                    Some(e) => {
                        if !same_chart(e.chart(), target) {
                            return Err(ExprError::ChartMismatch(format!(
                                "binding for `{name}` lives on {}, expected {}",
                                e.chart(),
                                target
                            )));
                        }
                        e.clone()
                    }
                    None => Expr::symbol(target, name)
                        .map_err(|_| ExprError::UnboundSymbol(name.to_string()))?,
                }
            } else {
                Expr::symbol(target, name).map_err(|_| ExprError::UnboundSymbol(name.to_string()))?
            };
            images.push(image);
        }
        let num = eval_poly_with(&self.num, &images, target);
        let den = eval_poly_with(&self.den, &images, target);
        if den.is_zero() {
            return Err(ExprError::ZeroDenominator);
        }
        num.div(&den)
    }

    /// Renames every symbol through `f`, producing an expression on `target`.
    /// Monomial structure is preserved, so this is cheap and exact.
    pub fn rename_symbols(
        &self,
        target: &Arc<Chart>,
        f: impl Fn(&str) -> String,
    ) -> Result<Expr, ExprError> {
        let map_poly = |p: &Poly| -> Result<Poly, ExprError> {
            let mut out = Poly::zero(target.num_symbols());
            for (m, c) in &p.terms {
                let mut v = vec![0u16; target.num_symbols()];
                for (i, &e) in m.0.iter().enumerate() {
                    if e == 0 {
                        continue;
                    }
                    let name = f(self.chart.symbol_name(i));
                    let j = target
                        .symbol_index(&name)
                        .ok_or_else(|| ExprError::UnknownSymbol(name.clone()))?;
                    v[j] += e;
                }
                out.terms.insert(poly::Mono(v.into_boxed_slice()), c.clone());
            }
            Ok(out)
        };
        Expr::make(target.clone(), map_poly(&self.num)?, map_poly(&self.den)?)
    }

    /// True when the expression does not involve the given symbol.
    pub fn independent_of(&self, name: &str) -> bool {
        match self.chart.symbol_index(name) {
            None => true,
            Some(i) => !self.num.depends_on(i) && !self.den.depends_on(i),
        }
    }
}

fn eval_poly_with(p: &Poly, images: &[Expr], target: &Arc<Chart>) -> Expr {
    let mut acc = Expr::zero(target);
    for (m, c) in &p.terms {
        let mut term = Expr::constant(target, c.clone());
        for (i, &e) in m.0.iter().enumerate() {
            if e > 0 {
                term = term.mul(&images[i].pow(e as i32).expect("positive power"));
            }
        }
        acc = acc.add(&term);
    }
    acc
}

impl Eq for Expr {}

#[cfg(test)]
mod tests {
    use super::*;

    fn chart() -> Arc<Chart> {
        Chart::new(["x1", "x2", "v1", "v2"], ["c"]).unwrap()
    }

    fn e(s: &str) -> Expr {
        parse(s, &chart()).unwrap()
    }

    #[test]
    fn cancellation_to_zero() {
        assert!(e("x1^2 - x1^2").is_zero());
        assert!(e("(v2*x2 - x2*v2)/(v1*x2 - x1*v2)").is_zero());
    }

    #[test]
    fn canonical_equality() {
        assert_eq!(e("x1/x2 + 1"), e("(x1 + x2)/x2"));
        assert_eq!(e("(x1^2 - x2^2)/(x1 - x2)"), e("x1 + x2"));
        assert_ne!(e("x1"), e("x2"));
    }

    #[test]
    fn diff_rules() {
        assert_eq!(e("x1^2*x2").diff("x1").unwrap(), e("2*x1*x2"));
        assert!(e("c").diff("x1").unwrap().is_zero());
        // Quotient rule on 1/(v1*x2 - x1*v2).
        let d = e("1/(v1*x2 - x1*v2)").diff("x1").unwrap();
        assert_eq!(d, e("v2/(v1*x2 - x1*v2)^2"));
    }

    #[test]
    fn substitution() {
        let target = Chart::coords(["y"]).unwrap();
        let mut b = BTreeMap::new();
        b.insert("x1".to_string(), parse("y+1", &target).unwrap());
        let src_chart = Chart::coords(["x1"]).unwrap();
        let src = parse("x1^2", &src_chart).unwrap();
        assert_eq!(src.substitute(&b, &target).unwrap(), parse("y^2 + 2*y + 1", &target).unwrap());

        // substitute(x/y, {x: y}) = 1 with y passing through.
        let c2 = Chart::coords(["x", "y"]).unwrap();
        let mut b2 = BTreeMap::new();
        b2.insert("x".to_string(), parse("y", &c2).unwrap());
        let r = parse("x/y", &c2).unwrap().substitute(&b2, &c2).unwrap();
        assert_eq!(r, Expr::one(&c2));
    }

    #[test]
    fn zero_denominator_after_substitution() {
        let c2 = Chart::coords(["x", "y"]).unwrap();
        let mut b = BTreeMap::new();
        b.insert("x".to_string(), parse("y", &c2).unwrap());
        let r = parse("1/(x - y)", &c2).unwrap().substitute(&b, &c2);
        assert_eq!(r, Err(ExprError::ZeroDenominator));
    }

    #[test]
    fn negative_powers() {
        assert_eq!(e("x1^-2"), e("1/x1^2"));
        assert!(Expr::zero(&chart()).pow(-1).is_err());
    }
}
