//! Canonical printing. `parse(print(e)) == e` for every expression.

use std::fmt;

use num::{BigRational, One, Signed};

use super::poly::Poly;
use super::Expr;

fn write_coeff_mono(
    f: &mut fmt::Formatter<'_>,
    chart_names: &dyn Fn(usize) -> String,
    coeff: &BigRational,
    mono: &[u16],
    first: bool,
) -> fmt::Result {
    let neg = coeff.is_negative();
    let abs = coeff.abs();
    if first {
        if neg {
            write!(f, "-")?;
        }
    } else if neg {
        write!(f, " - ")?;
    } else {
        write!(f, " + ")?;
    }
    let has_symbols = mono.iter().any(|&e| e > 0);
    let mut wrote = false;
    if !abs.is_one() || !has_symbols {
        if abs.denom().is_one() {
            write!(f, "{}", abs.numer())?;
        } else {
            write!(f, "{}/{}", abs.numer(), abs.denom())?;
        }
        wrote = true;
    }
    for (i, &e) in mono.iter().enumerate() {
        if e == 0 {
            continue;
        }
        if wrote {
            write!(f, "*")?;
        }
        write!(f, "{}", chart_names(i))?;
        if e > 1 {
            write!(f, "^{e}")?;
        }
        wrote = true;
    }
    Ok(())
}

fn fmt_poly(f: &mut fmt::Formatter<'_>, p: &Poly, names: &dyn Fn(usize) -> String) -> fmt::Result {
    if p.is_zero() {
        return write!(f, "0");
    }
    // Descending graded-lex, matching the leading-term convention.
    for (i, (m, c)) in p.terms.iter().rev().enumerate() {
        write_coeff_mono(f, names, c, &m.0, i == 0)?;
    }
    Ok(())
}

struct PolyDisplay<'a> {
    poly: &'a Poly,
    expr: &'a Expr,
}

impl fmt::Display for PolyDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let chart = self.expr.chart();
        fmt_poly(f, self.poly, &|i| chart.symbol_name(i).to_string())
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let num = PolyDisplay { poly: self.numerator(), expr: self };
        if self.is_polynomial() {
            return write!(f, "{num}");
        }
        let den = PolyDisplay { poly: self.denominator(), expr: self };
        write!(f, "({num})/({den})")
    }
}

#[cfg(test)]
mod tests {
    use crate::chart::Chart;
    use crate::expr::parse;

    #[test]
    fn print_parse_roundtrip() {
        let chart = Chart::new(["x1", "x2", "v1"], ["c"]).unwrap();
        for s in [
            "0",
            "1",
            "-3/2",
            "x1",
            "-x1 + x2",
            "3/2*x1^2*x2 - v1 + 1/7",
            "(x1 + 1)/(x2^2 - v1)",
            "(c*x1)/(x2 + 1)",
            "1/x1",
        ] {
            let e = parse(s, &chart).unwrap();
            let printed = e.to_string();
            let back = parse(&printed, &chart).unwrap();
            assert_eq!(e, back, "roundtrip failed for `{s}` printed as `{printed}`");
        }
    }
}
