//! Companion systems for t-dependent constants of motion, and momentum-map
//! invariant-level-set checks.

use std::sync::Arc;

use num::{BigRational, Zero};

use crate::chart::Chart;
use crate::error::{KContactError, LieError, NumericError};
use crate::expr::eval::ExactPoint;
use crate::expr::poly::rational_to_f64;
use crate::expr::Expr;
use crate::exterior::KFunction;
use crate::kcontact::KContact;
use crate::rng::SampleRng;
use crate::span::express_in_span;

use super::{
    check_hamiltonian_list, hamiltonian_bracket_table, nonzero_independent_projections, LieClosure,
};

/// The linear system governing coefficient functions `f^a(t)` that make
/// `sum_a f^a(t) <h_a, theta>` a constant of motion, together with the
/// derivation data used for master-symmetry order bounds.
#[derive(Debug, Clone)]
pub struct CompanionSystem {
    /// Chart `(t; b1..br)` the coefficient matrices live on.
    pub coeff_chart: Arc<Chart>,
    pub theta: Vec<BigRational>,
    /// `lambda[a][b][g]`: expansion of `R_{h_a} <h_b, theta>` over the
    /// projected Hamiltonians.
    pub lambda: Vec<Vec<Vec<BigRational>>>,
    /// `matrix[a][n]` drives `d f^a/dt = sum_n matrix[a][n] f^n`.
    pub matrix: Vec<Vec<Expr>>,
    /// `derivation[a][n]`: `d <h_a,theta>/dt = sum_n derivation[a][n] <h_n,theta>`
    /// along the flow, entries linear in the opaque coefficients.
    pub derivation: Vec<Vec<Expr>>,
    /// Smallest `m <= r` with the derivation matrix nilpotent of order `m`,
    /// i.e. every projected Hamiltonian generates a constant of motion of
    /// order at most `m`.
    pub nilpotency_order: Option<usize>,
    /// Per-basis-element total derivative `d <h_a,theta>/dt` as a function of
    /// the coefficients, when all contributing projections are constants.
    pub drift: Vec<Option<Expr>>,
}

/// Builds the companion system of a Hamiltonian closure for a covector
/// `theta`.
///
/// Requires the Reeb derivations to act on the projected Hamiltonians with
/// constant coefficients (`LambdaNotConstant` otherwise) and the nonzero
/// projections to be linearly independent (`DependentProjections`).
pub fn companion_system(
    closure: &LieClosure,
    kc: &KContact,
    hams: &[KFunction],
    theta: &[BigRational],
    rng: &mut SampleRng,
) -> Result<CompanionSystem, LieError> {
    check_hamiltonian_list(closure, kc, hams)?;
    let r = closure.dim();
    let projections: Vec<Expr> = hams
        .iter()
        .map(|h| h.pairing(theta).map_err(LieError::Calc))
        .collect::<Result<_, _>>()?;
    let support = nonzero_independent_projections(&projections, rng)?;
    let span_items: Vec<Expr> = support.iter().map(|&i| projections[i].clone()).collect();

    // Function-algebra constants; asserted to be the negated field table.
    let chat = hamiltonian_bracket_table(closure, kc, hams, rng)?;

    // lambda[a][b]: R_{h_a} <h_b, theta> in the projected basis.
    let mut lambda = vec![vec![vec![BigRational::zero(); r]; r]; r];
    for a in 0..r {
        let reeb_der = kc.reeb_derivation(&hams[a])?;
        for b in 0..r {
            let target = reeb_der.apply(&projections[b]).map_err(KContactError::Calc)?;
            if target.is_zero() {
                continue;
            }
            let coeffs = express_in_span(&span_items, &target, rng)?.ok_or_else(|| {
                LieError::LambdaNotConstant(format!(
                    "R_(h{}) <h{}, theta> is outside the constant span",
                    a + 1,
                    b + 1
                ))
            })?;
            for (slot, &g) in support.iter().enumerate() {
                lambda[a][b][g] = coeffs[slot].clone();
            }
        }
    }

    // Coefficient chart (t; b1..br).
    let coeff_names: Vec<String> = (1..=r).map(|i| format!("b{i}")).collect();
    let coeff_chart = Chart::new(vec!["t".to_string()], coeff_names.clone())?;
    let b_sym: Vec<Expr> = coeff_names
        .iter()
        .map(|n| Expr::symbol(&coeff_chart, n))
        .collect::<Result<_, _>>()?;

    let mut matrix = vec![vec![Expr::zero(&coeff_chart); r]; r];
    let mut derivation = vec![vec![Expr::zero(&coeff_chart); r]; r];
    for a in 0..r {
        for n in 0..r {
            let mut m_entry = Expr::zero(&coeff_chart);
            let mut d_entry = Expr::zero(&coeff_chart);
            for (b, bs) in b_sym.iter().enumerate() {
                let mc = &chat[n][b][a] - &lambda[n][b][a];
                if !mc.is_zero() {
                    m_entry = m_entry.sub(&bs.scale(&mc));
                }
                let dc = &chat[b][a][n] + &lambda[a][b][n];
                if !dc.is_zero() {
                    d_entry = d_entry.sub(&bs.scale(&dc));
                }
            }
            matrix[a][n] = m_entry;
            derivation[a][n] = d_entry;
        }
    }

    let nilpotency_order = nilpotency(&derivation, &coeff_chart, r);

    let mut drift = Vec::with_capacity(r);
    for a in 0..r {
        let mut acc = Expr::zero(&coeff_chart);
        let mut ok = true;
        for n in 0..r {
            if derivation[a][n].is_zero() {
                continue;
            }
            match projections[n].as_constant() {
                Some(c) => acc = acc.add(&derivation[a][n].scale(&c)),
                None => {
                    ok = false;
                    break;
                }
            }
        }
        drift.push(if ok { Some(acc) } else { None });
    }

    Ok(CompanionSystem {
        coeff_chart,
        theta: theta.to_vec(),
        lambda,
        matrix,
        derivation,
        nilpotency_order,
        drift,
    })
}

/// Least `m <= r` with `D^m = 0` identically in the coefficients.
fn nilpotency(d: &[Vec<Expr>], chart: &Arc<Chart>, r: usize) -> Option<usize> {
    let mut power: Vec<Vec<Expr>> = d.to_vec();
    for m in 1..=r {
        if power.iter().all(|row| row.iter().all(Expr::is_zero)) {
            return Some(m);
        }
        if m == r {
            break;
        }
        let mut next = vec![vec![Expr::zero(chart); r]; r];
        for i in 0..r {
            for j in 0..r {
                let mut acc = Expr::zero(chart);
                for l in 0..r {
                    if !power[i][l].is_zero() && !d[l][j].is_zero() {
                        acc = acc.add(&power[i][l].mul(&d[l][j]));
                    }
                }
                next[i][j] = acc;
            }
        }
        power = next;
    }
    None
}

/// Report of a momentum-map invariance check on the zero level set.
#[derive(Debug, Clone)]
pub struct MomentumReport {
    pub samples_checked: usize,
    /// Largest `|<h_a, theta>|` over the samples (on-set defect).
    pub max_on_set: f64,
    /// Largest `|R_{h_b} <h_a, theta>|` over the samples.
    pub max_reeb_residual: f64,
    /// Largest `|X_b <h_a, theta>|` over the samples (tangency defect).
    pub max_tangency_residual: f64,
    /// All residuals vanish exactly as rationals.
    pub exact_zero: bool,
    pub tol: f64,
}

/// Checks that the zero level set of `J^theta = (<h_a, theta>)_a` is
/// invariant: at every supplied sample the projections vanish (within
/// `tol`, else `SampleNotOnZeroSet`), the Reeb derivations annihilate them,
/// and the generating fields are tangent to the set.
pub fn momentum_invariance(
    closure: &LieClosure,
    kc: &KContact,
    hams: &[KFunction],
    theta: &[BigRational],
    samples: &[ExactPoint],
    tol: f64,
) -> Result<MomentumReport, NumericError> {
    let projections: Vec<Expr> = hams
        .iter()
        .map(|h| h.pairing(theta))
        .collect::<Result<_, _>>()
        .map_err(|e: crate::error::CalcError| match e {
            crate::error::CalcError::Expr(e) => NumericError::Expr(e),
            other => NumericError::Expr(crate::error::ExprError::InvalidChart(other.to_string())),
        })?;
    let mut max_on_set: f64 = 0.0;
    let mut max_reeb: f64 = 0.0;
    let mut max_tan: f64 = 0.0;
    let mut exact = true;

    // Symbolic residual generators, evaluated per sample.
    let mut reeb_res: Vec<Expr> = Vec::new();
    let mut tan_res: Vec<Expr> = Vec::new();
    for (b, h_b) in hams.iter().enumerate() {
        let rd = kc
            .reeb_derivation(h_b)
            .map_err(|e| NumericError::Expr(crate::error::ExprError::InvalidChart(e.to_string())))?;
        for p in &projections {
            reeb_res.push(rd.apply(p).map_err(|e| {
                NumericError::Expr(crate::error::ExprError::InvalidChart(e.to_string()))
            })?);
        }
        let x_b = &closure.basis()[b];
        for p in &projections {
            tan_res.push(x_b.apply(p).map_err(|e| {
                NumericError::Expr(crate::error::ExprError::InvalidChart(e.to_string()))
            })?);
        }
    }

    for (idx, sample) in samples.iter().enumerate() {
        for p in &projections {
            let v = p.eval_exact(sample)?;
            let fv = rational_to_f64(&v).abs();
            if fv >= tol {
                return Err(NumericError::SampleNotOnZeroSet { index: idx, value: fv, tol });
            }
            exact &= v.is_zero();
            max_on_set = max_on_set.max(fv);
        }
        for e in reeb_res.iter() {
            let v = e.eval_exact(sample)?;
            exact &= v.is_zero();
            max_reeb = max_reeb.max(rational_to_f64(&v).abs());
        }
        for e in tan_res.iter() {
            let v = e.eval_exact(sample)?;
            exact &= v.is_zero();
            max_tan = max_tan.max(rational_to_f64(&v).abs());
        }
    }
    Ok(MomentumReport {
        samples_checked: samples.len(),
        max_on_set,
        max_reeb_residual: max_reeb,
        max_tangency_residual: max_tan,
        exact_zero: exact,
        tol,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exterior::{DiffForm, VecValuedOneForm, VectorField};
    use crate::expr::parse;
    use crate::liesys::bracket_closure;

    fn jet() -> (Arc<Chart>, KContact) {
        let c = Chart::coords(["q", "z1", "z2", "p1", "p2"]).unwrap();
        let mk = |idx: usize, coef: &str| {
            DiffForm::from_terms(
                &c,
                1,
                [(vec![idx], Expr::one(&c)), (vec![0], parse(coef, &c).unwrap())],
            )
            .unwrap()
        };
        let eta = VecValuedOneForm::new(c.clone(), vec![mk(1, "-p1"), mk(2, "-p2")]).unwrap();
        (c.clone(), KContact::new(eta).unwrap())
    }

    #[test]
    fn abelian_closure_has_zero_companion_matrix() {
        // <d/dz1, d/dz2, d/dq> is abelian with Hamiltonians -e1, -e2,
        // p1 e1 + p2 e2; every coefficient function stays constant.
        let (c, kc) = jet();
        let gens = vec![
            VectorField::coordinate(&c, 1),
            VectorField::coordinate(&c, 2),
            VectorField::coordinate(&c, 0),
        ];
        let mut rng = SampleRng::default();
        let cl = bracket_closure(&gens, 8, 4, &mut rng).unwrap();
        assert!(cl.is_abelian());
        let hams: Vec<_> = cl.basis().iter().map(|x| kc.hamiltonian_of(x).unwrap()).collect();
        let theta = vec![
            BigRational::from_integer(1.into()),
            BigRational::from_integer(0.into()),
        ];
        let cs = companion_system(&cl, &kc, &hams, &theta, &mut rng).unwrap();
        assert!(cs.matrix.iter().all(|row| row.iter().all(Expr::is_zero)));
        assert_eq!(cs.nilpotency_order, Some(1));
    }

    #[test]
    fn dependent_projections_rejected() {
        // Two Reeb fields project to the constants (-1, -2): dependent.
        let (c, kc) = jet();
        let gens = vec![VectorField::coordinate(&c, 1), VectorField::coordinate(&c, 2)];
        let mut rng = SampleRng::default();
        let cl = bracket_closure(&gens, 8, 4, &mut rng).unwrap();
        let hams: Vec<_> = cl.basis().iter().map(|x| kc.hamiltonian_of(x).unwrap()).collect();
        let theta = vec![
            BigRational::from_integer(1.into()),
            BigRational::from_integer(2.into()),
        ];
        match companion_system(&cl, &kc, &hams, &theta, &mut rng) {
            Err(LieError::DependentProjections) => {}
            other => panic!("expected DependentProjections, got {other:?}"),
        }
    }
}
