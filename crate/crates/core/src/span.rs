//! Real-linear span decisions by evaluate-then-verify.
//!
//! Whether a symbolic object lies in the constant-coefficient span of others
//! is decided by evaluating everything at seeded random rational points,
//! solving the resulting exact linear system over the rationals, and then
//! verifying any candidate combination symbolically. Sampling can only cost
//! extra work; inconsistency of the sampled system soundly proves
//! independence, and the symbolic verification guards against unlucky
//! sample sets.

use num::{BigRational, Zero};

use crate::error::LieError;
use crate::exterior::KFunction;
use crate::exterior::VectorField;
use crate::expr::Expr;
use crate::rng::SampleRng;

/// Objects that can be sampled to exact rational stacks and recombined.
pub trait SpanElement: Clone {
    /// Evaluates the object at a positional rational point; `None` on poles.
    fn sample(&self, point: &[BigRational]) -> Option<Vec<BigRational>>;
    /// Number of chart symbols a sample point must cover.
    fn num_symbols(&self) -> usize;
    /// Constant-coefficient linear combination.
    fn combine(items: &[Self], coeffs: &[BigRational]) -> Self;
    /// Exact symbolic equality.
    fn sym_eq(&self, other: &Self) -> bool;
}

impl SpanElement for Expr {
    fn sample(&self, point: &[BigRational]) -> Option<Vec<BigRational>> {
        self.eval_exact_slice(point).ok().map(|v| vec![v])
    }

    fn num_symbols(&self) -> usize {
        self.chart().num_symbols()
    }

    fn combine(items: &[Self], coeffs: &[BigRational]) -> Self {
        let chart = items[0].chart().clone();
        let mut acc = Expr::zero(&chart);
        for (it, c) in items.iter().zip(coeffs) {
            acc = acc.add(&it.scale(c));
        }
        acc
    }

    fn sym_eq(&self, other: &Self) -> bool {
        self == other
    }
}

impl SpanElement for VectorField {
    fn sample(&self, point: &[BigRational]) -> Option<Vec<BigRational>> {
        self.coeffs()
            .iter()
            .map(|e| e.eval_exact_slice(point).ok())
            .collect()
    }

    fn num_symbols(&self) -> usize {
        self.chart().num_symbols()
    }

    fn combine(items: &[Self], coeffs: &[BigRational]) -> Self {
        let mut acc = VectorField::zero(items[0].chart());
        for (it, c) in items.iter().zip(coeffs) {
            acc = acc.add(&it.scale(c)).expect("same chart");
        }
        acc
    }

    fn sym_eq(&self, other: &Self) -> bool {
        self == other
    }
}

impl SpanElement for KFunction {
    fn sample(&self, point: &[BigRational]) -> Option<Vec<BigRational>> {
        self.components()
            .iter()
            .map(|e| e.eval_exact_slice(point).ok())
            .collect()
    }

    fn num_symbols(&self) -> usize {
        self.chart().num_symbols()
    }

    fn combine(items: &[Self], coeffs: &[BigRational]) -> Self {
        let mut acc = KFunction::zero(items[0].chart(), items[0].k());
        for (it, c) in items.iter().zip(coeffs) {
            acc = acc.add(&it.scale(c)).expect("same chart");
        }
        acc
    }

    fn sym_eq(&self, other: &Self) -> bool {
        self == other
    }
}

/// Outcome of an exact rational solve.
enum QSolve {
    Inconsistent,
    Unique(Vec<BigRational>),
    Underdetermined(Vec<BigRational>),
}

/// Gaussian elimination over the rationals on `a x = b`.
fn qsolve(a: &[Vec<BigRational>], b: &[BigRational], cols: usize) -> QSolve {
    let rows = a.len();
    let mut m: Vec<Vec<BigRational>> = a
        .iter()
        .zip(b)
        .map(|(row, rhs)| {
            let mut r = row.clone();
            r.push(rhs.clone());
            r
        })
        .collect();
    let mut pivot_cols = Vec::new();
    let mut rank = 0usize;
    for col in 0..cols {
        let Some(p) = (rank..rows).find(|&r| !m[r][col].is_zero()) else { continue };
        m.swap(rank, p);
        let pivot = m[rank][col].clone();
        for r in 0..rows {
            if r == rank || m[r][col].is_zero() {
                continue;
            }
            let f = &m[r][col] / &pivot;
            for c in col..=cols {
                let sub = &f * &m[rank][c];
                m[r][c] = &m[r][c] - sub;
            }
        }
        pivot_cols.push(col);
        rank += 1;
        if rank == rows {
            break;
        }
    }
    // Inconsistency: zero row with nonzero rhs.
    for r in rank..rows {
        if !m[r][cols].is_zero() {
            return QSolve::Inconsistent;
        }
    }
    let mut x = vec![BigRational::zero(); cols];
    for (i, &pc) in pivot_cols.iter().enumerate() {
        x[pc] = &m[i][cols] / &m[i][pc];
    }
    if rank == cols {
        QSolve::Unique(x)
    } else {
        QSolve::Underdetermined(x)
    }
}

/// Draws a sample point where every item (and the target) evaluates cleanly.
fn draw_point<T: SpanElement>(
    items: &[T],
    target: &T,
    rng: &mut SampleRng,
) -> Result<(Vec<BigRational>, Vec<Vec<BigRational>>, Vec<BigRational>), LieError> {
    let n = target.num_symbols();
    for _ in 0..400 {
        let point: Vec<BigRational> = (0..n).map(|_| rng.small_rational()).collect();
        let Some(tv) = target.sample(&point) else { continue };
        let samples: Option<Vec<Vec<BigRational>>> = items.iter().map(|i| i.sample(&point)).collect();
        if let Some(sv) = samples {
            return Ok((point, sv, tv));
        }
    }
    Err(LieError::Indecisive)
}

/// Expresses `target` in the constant real span of `items`, or proves it
/// is not in the span.
///
/// `Ok(Some(c))` means `target = sum_i c_i items_i` exactly (verified
/// symbolically); `Ok(None)` means the target is independent of the items.
pub fn express_in_span<T: SpanElement>(
    items: &[T],
    target: &T,
    rng: &mut SampleRng,
) -> Result<Option<Vec<BigRational>>, LieError> {
    if items.is_empty() {
        return Ok(if target.sym_eq(&T::combine(&[target.clone()], &[BigRational::zero()])) {
            Some(vec![])
        } else {
            None
        });
    }
    let base_points = 2 * target.num_symbols() + items.len();
    let mut rows: Vec<Vec<BigRational>> = Vec::new();
    let mut rhs: Vec<BigRational> = Vec::new();
    for round in 0..8 {
        let want = if round == 0 { base_points } else { items.len() + 2 };
        for _ in 0..want {
            let (_, samples, tv) = draw_point(items, target, rng)?;
            // One matrix row per stacked component.
            for comp in 0..tv.len() {
                rows.push(samples.iter().map(|s| s[comp].clone()).collect());
                rhs.push(tv[comp].clone());
            }
        }
        match qsolve(&rows, &rhs, items.len()) {
            QSolve::Inconsistent => return Ok(None),
            QSolve::Unique(c) => {
                if T::combine(items, &c).sym_eq(target) {
                    return Ok(Some(c));
                }
                // A symbolic miss with full sample rank means the target
                // really is outside the span: any true relation would have
                // to agree with the unique sampled solution.
                return Ok(None);
            }
            QSolve::Underdetermined(c) => {
                if T::combine(items, &c).sym_eq(target) {
                    return Ok(Some(c));
                }
                // Items look dependent at the sampled points; add more.
                continue;
            }
        }
    }
    Err(LieError::Indecisive)
}

/// True when the items are linearly independent over the reals.
///
/// Dependence is established by a symbolically verified vanishing
/// combination; independence by sampled full column rank.
pub fn independent<T: SpanElement>(items: &[T], rng: &mut SampleRng) -> Result<bool, LieError> {
    if items.is_empty() {
        return Ok(true);
    }
    // Identically-zero items are dependent by convention.
    let zero_like = T::combine(&items[..1], &[BigRational::zero()]);
    if items.iter().any(|it| it.sym_eq(&zero_like)) {
        return Ok(false);
    }
    // Check each item against the span of the preceding ones.
    for i in 1..items.len() {
        if express_in_span(&items[..i], &items[i], rng)?.is_some() {
            return Ok(false);
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chart::Chart;
    use crate::expr::parse;

    #[test]
    fn expr_span() {
        let c = Chart::coords(["x", "y"]).unwrap();
        let items = vec![parse("x", &c).unwrap(), parse("y", &c).unwrap()];
        let mut rng = SampleRng::default();
        let got = express_in_span(&items, &parse("2*x - 3*y", &c).unwrap(), &mut rng).unwrap();
        assert_eq!(
            got,
            Some(vec![
                BigRational::from_integer(2.into()),
                BigRational::from_integer((-3).into())
            ])
        );
        assert!(express_in_span(&items, &parse("x*y", &c).unwrap(), &mut rng)
            .unwrap()
            .is_none());
        assert!(independent(&items, &mut rng).unwrap());
        let dep = vec![
            parse("x", &c).unwrap(),
            parse("y", &c).unwrap(),
            parse("x + y", &c).unwrap(),
        ];
        assert!(!independent(&dep, &mut rng).unwrap());
    }

    #[test]
    fn rational_functions_with_poles() {
        let c = Chart::coords(["x", "y"]).unwrap();
        let items = vec![parse("1/(x - y)", &c).unwrap(), parse("x/(x - y)", &c).unwrap()];
        let mut rng = SampleRng::default();
        let target = parse("(2 + 5*x)/(x - y)", &c).unwrap();
        let got = express_in_span(&items, &target, &mut rng).unwrap().unwrap();
        assert_eq!(got[0], BigRational::from_integer(2.into()));
        assert_eq!(got[1], BigRational::from_integer(5.into()));
    }
}
