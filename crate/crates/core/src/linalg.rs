//! Exact linear algebra over the rational-function field.
//!
//! Forward elimination is fraction-free (Bareiss): rows are cleared to
//! polynomial form and every update divides exactly by the previous pivot,
//! so intermediate entries stay minors of the input instead of growing
//! fractions. Back-substitution happens in the fraction field on the final
//! entries only. "Generic" means over the function field: the vanishing
//! locus of the chosen pivots is collected so callers can report where a
//! computation degenerates, but the locus itself is not analysed.

use std::sync::Arc;

use num::One;

use crate::chart::Chart;
use crate::error::LinAlgError;
use crate::expr::gcd::poly_gcd;
use crate::expr::poly::Poly;
use crate::expr::Expr;

/// Hard ceiling on term counts of intermediate entries; elimination aborts
/// with `RankComputationOverflow` beyond it.
const TERM_BUDGET: usize = 200_000;

/// Dense matrix of expressions over a shared chart.
#[derive(Debug, Clone)]
pub struct ExprMatrix {
    pub chart: Arc<Chart>,
    pub rows: usize,
    pub cols: usize,
    data: Vec<Expr>,
}

/// Result of a reduction: rank, pivot bookkeeping, and the pivot locus.
#[derive(Debug, Clone)]
pub struct Reduction {
    pub rank: usize,
    /// Column index of each pivot, in elimination order.
    pub pivot_cols: Vec<usize>,
    /// Pivot polynomials chosen along the way; their common vanishing locus
    /// is where genericity fails.
    pub locus: Vec<String>,
}

/// Echelonized polynomial matrix produced by Bareiss elimination.
struct Echelon {
    data: Vec<Poly>,
    rows: usize,
    cols: usize,
    rank: usize,
    pivot_cols: Vec<usize>,
    locus: Vec<String>,
    sign_flips: usize,
    /// Product of the per-row denominators cleared before elimination.
    row_multipliers: Vec<Poly>,
}

impl Echelon {
    fn at(&self, r: usize, c: usize) -> &Poly {
        &self.data[r * self.cols + c]
    }
}

impl ExprMatrix {
    pub fn new(chart: Arc<Chart>, rows: usize, cols: usize) -> ExprMatrix {
        let data = vec![Expr::zero(&chart); rows * cols];
        ExprMatrix { chart, rows, cols, data }
    }

    pub fn from_rows(chart: Arc<Chart>, rows: Vec<Vec<Expr>>) -> ExprMatrix {
        let nrows = rows.len();
        let ncols = rows.first().map(|r| r.len()).unwrap_or(0);
        let mut data = Vec::with_capacity(nrows * ncols);
        for r in rows {
            assert_eq!(r.len(), ncols, "ragged matrix");
            data.extend(r);
        }
        ExprMatrix { chart, rows: nrows, cols: ncols, data }
    }

    pub fn at(&self, r: usize, c: usize) -> &Expr {
        &self.data[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, e: Expr) {
        self.data[r * self.cols + c] = e;
    }

    /// Appends extra columns (e.g. right-hand sides).
    fn augmented(&self, rhs: &[Vec<Expr>]) -> ExprMatrix {
        let k = rhs.len();
        let mut aug = ExprMatrix::new(self.chart.clone(), self.rows, self.cols + k);
        for r in 0..self.rows {
            for c in 0..self.cols {
                aug.set(r, c, self.at(r, c).clone());
            }
            for (j, b) in rhs.iter().enumerate() {
                assert_eq!(b.len(), self.rows, "rhs length mismatch");
                aug.set(r, self.cols + j, b[r].clone());
            }
        }
        aug
    }

    /// Fraction-free forward elimination. `primary_cols` limits pivot
    /// selection to the leading block (augmented columns never pivot).
    fn bareiss(&self, primary_cols: usize) -> Result<Echelon, LinAlgError> {
        let nsyms = self.chart.num_symbols();
        let mut data: Vec<Poly> = Vec::with_capacity(self.rows * self.cols);
        let mut row_multipliers = Vec::with_capacity(self.rows);
        for r in 0..self.rows {
            // Clear the row to polynomial form by its denominator lcm.
            let mut lcm = Poly::one(nsyms);
            for c in 0..self.cols {
                let den = self.at(r, c).denominator();
                if den.as_constant().map(|k| k.is_one()).unwrap_or(false) {
                    continue;
                }
                let g = poly_gcd(&lcm, den);
                lcm = lcm.mul(&den.div_exact(&g).expect("gcd divides"));
            }
            for c in 0..self.cols {
                let e = self.at(r, c);
                let scaled = e
                    .numerator()
                    .mul(&lcm.div_exact(e.denominator()).expect("lcm of denominators"));
                data.push(scaled);
            }
            row_multipliers.push(lcm);
        }

        let mut ech = Echelon {
            data,
            rows: self.rows,
            cols: self.cols,
            rank: 0,
            pivot_cols: Vec::new(),
            locus: Vec::new(),
            sign_flips: 0,
            row_multipliers,
        };
        let mut prev = Poly::one(nsyms);
        for col in 0..primary_cols {
            let pivot_row = (ech.rank..ech.rows)
                .filter(|&r| !ech.at(r, col).is_zero())
                .min_by_key(|&r| (ech.at(r, col).num_terms(), ech.at(r, col).total_degree()));
            let Some(p) = pivot_row else { continue };
            if p != ech.rank {
                for c in 0..ech.cols {
                    ech.data.swap(ech.rank * ech.cols + c, p * ech.cols + c);
                }
                ech.sign_flips += 1;
            }
            let pivot = ech.at(ech.rank, col).clone();
            if pivot.as_constant().is_none() {
                ech.locus.push(format!("{}", PolyDisplay { poly: &pivot, chart: &self.chart }));
            }
            for r in ech.rank + 1..ech.rows {
                let head = ech.at(r, col).clone();
                for c in 0..ech.cols {
                    let val = if c <= col {
                        Poly::zero(nsyms)
                    } else {
                        let t = pivot.mul(ech.at(r, c)).sub(&head.mul(ech.at(ech.rank, c)));
                        t.div_exact(&prev).expect("Bareiss division is exact")
                    };
                    if val.num_terms() > TERM_BUDGET {
                        return Err(LinAlgError::RankComputationOverflow);
                    }
                    ech.data[r * ech.cols + c] = val;
                }
            }
            prev = pivot;
            ech.pivot_cols.push(col);
            ech.rank += 1;
            if ech.rank == ech.rows {
                break;
            }
        }
        Ok(ech)
    }

    /// Generic rank over the function field.
    pub fn rank(&self) -> Result<Reduction, LinAlgError> {
        let ech = self.bareiss(self.cols)?;
        Ok(Reduction { rank: ech.rank, pivot_cols: ech.pivot_cols, locus: ech.locus })
    }

    /// Basis of the right kernel `{v : A v = 0}`.
    pub fn nullspace(&self) -> Result<Vec<Vec<Expr>>, LinAlgError> {
        let ech = self.bareiss(self.cols)?;
        let pivots = &ech.pivot_cols;
        let free: Vec<usize> = (0..self.cols).filter(|c| !pivots.contains(c)).collect();
        let mut basis = Vec::with_capacity(free.len());
        for &fc in &free {
            let mut v = vec![Expr::zero(&self.chart); self.cols];
            v[fc] = Expr::one(&self.chart);
            for i in (0..pivots.len()).rev() {
                let pc = pivots[i];
                let mut acc = Expr::zero(&self.chart);
                for c in pc + 1..self.cols {
                    if !ech.at(i, c).is_zero() && !v[c].is_zero() {
                        acc = acc.add(&Expr::from_poly(&self.chart, ech.at(i, c).clone()).mul(&v[c]));
                    }
                }
                v[pc] = acc
                    .neg()
                    .div(&Expr::from_poly(&self.chart, ech.at(i, pc).clone()))
                    .expect("pivot nonzero");
            }
            basis.push(v);
        }
        Ok(basis)
    }

    /// Solves `A x = b` for several right-hand sides simultaneously.
    ///
    /// Returns `Ok(None)` when the system is inconsistent or the solution is
    /// not unique (rank < cols).
    pub fn solve(&self, rhs: &[Vec<Expr>]) -> Result<Option<Vec<Vec<Expr>>>, LinAlgError> {
        let k = rhs.len();
        let aug = self.augmented(rhs);
        let ech = aug.bareiss(self.cols)?;
        if ech.rank < self.cols {
            return Ok(None);
        }
        // Inconsistent when a zeroed row keeps a nonzero right-hand side.
        for r in ech.rank..self.rows {
            for j in 0..k {
                if !ech.at(r, self.cols + j).is_zero() {
                    return Ok(None);
                }
            }
        }
        let mut solutions = vec![vec![Expr::zero(&self.chart); self.cols]; k];
        for j in 0..k {
            for i in (0..self.cols).rev() {
                let pc = ech.pivot_cols[i];
                let mut acc = Expr::from_poly(&self.chart, ech.at(i, self.cols + j).clone());
                for c in pc + 1..self.cols {
                    if !ech.at(i, c).is_zero() && !solutions[j][c].is_zero() {
                        acc = acc
                            .sub(&Expr::from_poly(&self.chart, ech.at(i, c).clone()).mul(&solutions[j][c]));
                    }
                }
                solutions[j][pc] =
                    acc.div(&Expr::from_poly(&self.chart, ech.at(i, pc).clone())).expect("pivot nonzero");
            }
        }
        Ok(Some(solutions))
    }

    /// Matrix inverse; `Ok(None)` when singular.
    pub fn inverse(&self) -> Result<Option<ExprMatrix>, LinAlgError> {
        assert_eq!(self.rows, self.cols, "inverse needs a square matrix");
        let n = self.rows;
        let id: Vec<Vec<Expr>> = (0..n)
            .map(|j| {
                (0..n)
                    .map(|i| if i == j { Expr::one(&self.chart) } else { Expr::zero(&self.chart) })
                    .collect()
            })
            .collect();
        match self.solve(&id)? {
            None => Ok(None),
            Some(cols) => {
                let mut inv = ExprMatrix::new(self.chart.clone(), n, n);
                for (j, col) in cols.iter().enumerate() {
                    for (i, e) in col.iter().enumerate() {
                        inv.set(i, j, e.clone());
                    }
                }
                Ok(Some(inv))
            }
        }
    }

    /// Determinant from the last Bareiss pivot, corrected for row clearing
    /// and swaps.
    pub fn det(&self) -> Result<Expr, LinAlgError> {
        assert_eq!(self.rows, self.cols);
        let ech = self.bareiss(self.cols)?;
        if ech.rank < self.cols {
            return Ok(Expr::zero(&self.chart));
        }
        // Bareiss leaves det(cleared matrix) as the last pivot.
        let last = ech.at(ech.rank - 1, ech.pivot_cols[ech.rank - 1]).clone();
        let mut det = Expr::from_poly(&self.chart, last);
        if ech.sign_flips % 2 == 1 {
            det = det.neg();
        }
        for m in &ech.row_multipliers {
            if !m.as_constant().map(|c| c.is_one()).unwrap_or(false) {
                det = det.div(&Expr::from_poly(&self.chart, m.clone())).expect("multiplier nonzero");
            }
        }
        Ok(det)
    }
}

struct PolyDisplay<'a> {
    poly: &'a Poly,
    chart: &'a Arc<Chart>,
}

impl std::fmt::Display for PolyDisplay<'_> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", Expr::from_poly(self.chart, self.poly.clone()))
    }
}
