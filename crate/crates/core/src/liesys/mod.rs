//! Lie-system level algebra: bracket closures with exact structure
//! constants, locally automorphic detection, dual coframes, structure
//! equations of coframes, projectability, prolongation, companion systems.

mod companion;
mod pde;
mod prolong;

pub use companion::{companion_system, momentum_invariance, CompanionSystem, MomentumReport};
pub use pde::pde_integrability;
pub use prolong::{diagonal_prolongation, Prolongation};

use std::sync::Arc;

use num::{BigRational, Zero};

use crate::chart::Chart;
use crate::error::{KContactError, LieError};
use crate::exterior::{ext_deriv, lie_bracket, wedge, DiffForm, KFunction, VectorField};
use crate::kcontact::KContact;
use crate::linalg::ExprMatrix;
use crate::rng::SampleRng;
use crate::span::{express_in_span, independent};

/// A basis of vector fields closed under the Lie bracket, with exact rational
/// structure constants and the bracket words that generated each element.
#[derive(Debug, Clone)]
pub struct LieClosure {
    chart: Arc<Chart>,
    basis: Vec<VectorField>,
    /// `structure[i][j]` expands `[basis_i, basis_j]` in the basis.
    structure: Vec<Vec<Vec<BigRational>>>,
    provenance: Vec<String>,
    generator_count: usize,
    pub closed: bool,
}

impl LieClosure {
    pub fn chart(&self) -> &Arc<Chart> {
        &self.chart
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &[VectorField] {
        &self.basis
    }

    pub fn provenance(&self) -> &[String] {
        &self.provenance
    }

    pub fn generator_count(&self) -> usize {
        self.generator_count
    }

    /// Structure constant `c_{ij}^k`.
    pub fn c(&self, i: usize, j: usize, k: usize) -> &BigRational {
        &self.structure[i][j][k]
    }

    /// Expansion coefficients of `[basis_i, basis_j]`.
    pub fn bracket_coeffs(&self, i: usize, j: usize) -> &[BigRational] {
        &self.structure[i][j]
    }

    pub fn is_abelian(&self) -> bool {
        self.structure
            .iter()
            .all(|row| row.iter().all(|v| v.iter().all(Zero::is_zero)))
    }

    /// Exact Jacobi identity on the structure constants.
    pub fn jacobi_holds(&self) -> bool {
        let r = self.dim();
        for i in 0..r {
            for j in 0..r {
                for k in 0..r {
                    for m in 0..r {
                        let mut acc = BigRational::zero();
                        for l in 0..r {
                            acc += self.c(i, j, l) * self.c(l, k, m);
                            acc += self.c(j, k, l) * self.c(l, i, m);
                            acc += self.c(k, i, l) * self.c(l, j, m);
                        }
                        if !acc.is_zero() {
                            return false;
                        }
                    }
                }
            }
        }
        true
    }
}

/// Closes a family of vector fields under the Lie bracket.
///
/// Real-linear independence is decided by evaluating at seeded random
/// rational points and verifying every candidate relation symbolically, so
/// the random choices never change the result. New elements are appended in
/// the order their brackets are processed (pairs ordered by the larger index
/// first), which matches the usual hand-labelling of closure bases.
pub fn bracket_closure(
    generators: &[VectorField],
    max_dim: usize,
    max_depth: usize,
    rng: &mut SampleRng,
) -> Result<LieClosure, LieError> {
    assert!(max_dim <= 64, "closure budget capped at 64");
    if generators.is_empty() {
        return Err(LieError::NotClosed { word: "<empty generator list>".into() });
    }
    let chart = generators[0].chart().clone();
    let mut basis: Vec<VectorField> = Vec::new();
    let mut provenance: Vec<String> = Vec::new();
    let mut depth: Vec<usize> = Vec::new();
    for (i, g) in generators.iter().enumerate() {
        if express_in_span(&basis, g, rng)?.is_none() {
            basis.push(g.clone());
            provenance.push(format!("#{}", i + 1));
            depth.push(0);
        }
    }
    if basis.is_empty() {
        return Err(LieError::NotClosed { word: "<all generators zero>".into() });
    }

    // Bracket expansions found along the way, keyed by (i, j) with i < j.
    let mut expansions: Vec<((usize, usize), Vec<BigRational>)> = Vec::new();
    // Pairs ordered by (larger index, smaller index).
    let mut j = 1usize;
    while j < basis.len() {
        for i in 0..j {
            let word = format!("[{}, {}]", provenance[i], provenance[j]);
            let bracket = lie_bracket(&basis[i], &basis[j])?;
            match express_in_span(&basis, &bracket, rng)? {
                Some(coeffs) => expansions.push(((i, j), coeffs)),
                None => {
                    let d = depth[i].max(depth[j]) + 1;
                    if basis.len() >= max_dim || d > max_depth {
                        return Err(LieError::NotClosed { word });
                    }
                    let mut coeffs = vec![BigRational::zero(); basis.len() + 1];
                    coeffs[basis.len()] = BigRational::from_integer(1.into());
                    basis.push(bracket);
                    provenance.push(word);
                    depth.push(d);
                    expansions.push(((i, j), coeffs));
                }
            }
        }
        j += 1;
    }

    let r = basis.len();
    let mut structure = vec![vec![vec![BigRational::zero(); r]; r]; r];
    for ((i, j), coeffs) in expansions {
        for (k, c) in coeffs.iter().enumerate() {
            structure[i][j][k] = c.clone();
            structure[j][i][k] = -c.clone();
        }
    }
    let closure = LieClosure {
        chart,
        basis,
        structure,
        provenance,
        generator_count: generators.len(),
        closed: true,
    };
    if !closure.jacobi_holds() {
        return Err(LieError::KContact(KContactError::Internal(
            "structure constants violate the Jacobi identity".into(),
        )));
    }
    Ok(closure)
}

/// A Lie system is locally automorphic when its algebra has dimension equal
/// to the manifold dimension and the basis fields span the tangent space at
/// a generic point.
pub fn is_locally_automorphic(closure: &LieClosure) -> Result<bool, LieError> {
    let dim = closure.chart().dim();
    if closure.dim() != dim {
        return Ok(false);
    }
    let rows: Vec<Vec<crate::expr::Expr>> =
        closure.basis().iter().map(|f| f.coeffs().to_vec()).collect();
    let m = ExprMatrix::from_rows(closure.chart().clone(), rows);
    Ok(!m.det()?.is_zero())
}

/// Dual coframe of a pointwise-independent frame: the unique one-forms with
/// `Upsilon^i(Y_j) = delta^i_j`, solved exactly over the function field.
pub fn dual_coframe(frame: &[VectorField]) -> Result<Vec<DiffForm>, LieError> {
    if frame.is_empty() {
        return Err(LieError::DegenerateFrame);
    }
    let chart = frame[0].chart().clone();
    if frame.len() != chart.dim() {
        return Err(LieError::DegenerateFrame);
    }
    match crate::kcontact::frame_dual_rows(&chart, frame) {
        Ok(rows) => Ok(rows),
        Err(KContactError::SpanFailure(_)) => Err(LieError::DegenerateFrame),
        Err(e) => Err(LieError::KContact(e)),
    }
}

/// Outcome of the structure-equation check of a coframe.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MaurerCartan {
    pub holds: bool,
    /// First coframe index where the identity fails.
    pub failing_index: Option<usize>,
}

/// Checks `d Upsilon^i = -1/2 sum_{jk} c_{jk}^i Upsilon^j ^ Upsilon^k`, where
/// `c` are the structure constants of the frame the coframe is dual to.
pub fn maurer_cartan_check(
    coframe: &[DiffForm],
    frame_closure: &LieClosure,
) -> Result<MaurerCartan, LieError> {
    let r = coframe.len();
    if r != frame_closure.dim() {
        return Err(LieError::Calc(crate::error::CalcError::LengthMismatch {
            expected: frame_closure.dim(),
            got: r,
        }));
    }
    let chart = frame_closure.chart();
    for i in 0..r {
        let mut rhs = DiffForm::zero(chart, 2);
        for j in 0..r {
            for k in (j + 1)..r {
                let c = frame_closure.c(j, k, i);
                if c.is_zero() {
                    continue;
                }
                rhs = rhs.add(&wedge(&coframe[j], &coframe[k])?.scale(&-c.clone()))?;
            }
        }
        if ext_deriv(&coframe[i]) != rhs {
            return Ok(MaurerCartan { holds: false, failing_index: Some(i) });
        }
    }
    Ok(MaurerCartan { holds: true, failing_index: None })
}

/// Projectability of a closure relative to a k-contact structure: every
/// basis Hamiltonian must be a first integral of every Reeb field. The
/// equivalent commutator condition `[R_b, X_a] = 0` is computed as well and
/// the two routes must agree pairwise.
pub fn projectability_check(closure: &LieClosure, kc: &KContact) -> Result<bool, LieError> {
    let mut all = true;
    for x in closure.basis() {
        let h = kc.hamiltonian_of(x)?;
        for reeb in kc.reeb() {
            let via_h = h.apply_field(reeb)?.is_zero();
            let via_bracket = lie_bracket(reeb, x)?.is_zero();
            if via_h != via_bracket {
                return Err(LieError::KContact(KContactError::Internal(
                    "projectability routes disagree (R h = 0 vs [R, X] = 0)".into(),
                )));
            }
            all &= via_h;
        }
    }
    Ok(all)
}

/// Hamiltonian k-functions of every basis element of a closure.
pub fn closure_hamiltonians(closure: &LieClosure, kc: &KContact) -> Result<Vec<KFunction>, LieError> {
    closure
        .basis()
        .iter()
        .map(|x| kc.hamiltonian_of(x).map_err(LieError::KContact))
        .collect()
}

/// Expands the bracket table of Hamiltonian k-functions in their own basis,
/// returning exact constants. By the algebra isomorphism these must be the
/// negated field structure constants; the identity is asserted.
pub fn hamiltonian_bracket_table(
    closure: &LieClosure,
    kc: &KContact,
    hams: &[KFunction],
    rng: &mut SampleRng,
) -> Result<Vec<Vec<Vec<BigRational>>>, LieError> {
    let r = closure.dim();
    let mut table = vec![vec![vec![BigRational::zero(); r]; r]; r];
    for i in 0..r {
        for j in (i + 1)..r {
            let bracket =
                kc.bracket(&hams[i], &hams[j], &closure.basis()[i], &closure.basis()[j])?;
            let coeffs = express_in_span(hams, &bracket, rng)?.ok_or_else(|| {
                LieError::KContact(KContactError::Internal(
                    "bracket of Hamiltonians escapes their span".into(),
                ))
            })?;
            for (k, c) in coeffs.iter().enumerate() {
                if c != &-closure.c(i, j, k) {
                    return Err(LieError::KContact(KContactError::Internal(format!(
                        "bracket table is not the negated field table at ({i},{j},{k})"
                    ))));
                }
                table[i][j][k] = c.clone();
                table[j][i][k] = -c.clone();
            }
        }
    }
    Ok(table)
}

/// A time-dependent Lie system `X(t) = sum_a b_a(t) X_a` described by a
/// closure basis and named coefficient symbols.
#[derive(Debug, Clone)]
pub struct TDepSystem {
    pub closure: LieClosure,
    pub coeff_names: Vec<String>,
}

impl TDepSystem {
    pub fn new(closure: LieClosure, coeff_names: Vec<String>) -> Result<TDepSystem, LieError> {
        if coeff_names.len() != closure.dim() {
            return Err(LieError::Calc(crate::error::CalcError::LengthMismatch {
                expected: closure.dim(),
                got: coeff_names.len(),
            }));
        }
        Ok(TDepSystem { closure, coeff_names })
    }
}

/// Re-checks that `hams[i]` is the Hamiltonian of `closure.basis()[i]`.
pub(crate) fn check_hamiltonian_list(
    closure: &LieClosure,
    kc: &KContact,
    hams: &[KFunction],
) -> Result<(), LieError> {
    if hams.len() != closure.dim() {
        return Err(LieError::Calc(crate::error::CalcError::LengthMismatch {
            expected: closure.dim(),
            got: hams.len(),
        }));
    }
    for (x, h) in closure.basis().iter().zip(hams) {
        let got = kc.hamiltonian_of(x)?;
        if &got != h {
            return Err(LieError::KContact(KContactError::NotHamiltonianInput(
                "supplied k-function does not match its field".into(),
            )));
        }
    }
    Ok(())
}

/// Shared helper: drops zero projections, requires the rest independent.
pub(crate) fn nonzero_independent_projections(
    projections: &[crate::expr::Expr],
    rng: &mut SampleRng,
) -> Result<Vec<usize>, LieError> {
    let nonzero: Vec<usize> = projections
        .iter()
        .enumerate()
        .filter(|(_, e)| !e.is_zero())
        .map(|(i, _)| i)
        .collect();
    let items: Vec<crate::expr::Expr> =
        nonzero.iter().map(|&i| projections[i].clone()).collect();
    if !independent(&items, rng)? {
        return Err(LieError::DependentProjections);
    }
    Ok(nonzero)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::parse;

    fn vf(chart: &Arc<Chart>, coeffs: &[&str]) -> VectorField {
        VectorField::new(chart.clone(), coeffs.iter().map(|s| parse(s, chart).unwrap()).collect())
            .unwrap()
    }

    #[test]
    fn riccati_closure() {
        let c = Chart::coords(["x"]).unwrap();
        let gens = vec![vf(&c, &["1"]), vf(&c, &["x"]), vf(&c, &["x^2"])];
        let mut rng = SampleRng::default();
        let cl = bracket_closure(&gens, 8, 6, &mut rng).unwrap();
        assert_eq!(cl.dim(), 3);
        let one = BigRational::from_integer(1.into());
        let two = BigRational::from_integer(2.into());
        // [X1, X2] = X1, [X1, X3] = 2 X2, [X2, X3] = X3.
        assert_eq!(cl.c(0, 1, 0), &one);
        assert_eq!(cl.c(0, 2, 1), &two);
        assert_eq!(cl.c(1, 2, 2), &one);
        assert!(cl.jacobi_holds());
        // One field alone is abelian of dimension one.
        let single = bracket_closure(&gens[..1], 8, 6, &mut rng).unwrap();
        assert_eq!(single.dim(), 1);
        assert!(single.is_abelian());
        // Not automorphic: three fields on a one-dimensional chart.
        assert!(!is_locally_automorphic(&cl).unwrap());
    }

    #[test]
    fn front_wheel_closure_labels() {
        let c = Chart::coords(["x1", "x2", "x3", "x4"]).unwrap();
        let x1 = vf(&c, &["1", "0", "x2", "x3"]);
        let x2 = vf(&c, &["0", "1", "0", "0"]);
        let mut rng = SampleRng::default();
        let cl = bracket_closure(&[x1, x2], 8, 6, &mut rng).unwrap();
        assert_eq!(cl.dim(), 4);
        // X3 = [X1, X2] = -d/dx3, X4 = [X1, X3] = d/dx4.
        assert_eq!(cl.basis()[2], vf(&c, &["0", "0", "-1", "0"]));
        assert_eq!(cl.basis()[3], vf(&c, &["0", "0", "0", "1"]));
        assert_eq!(cl.provenance()[2], "[#1, #2]");
        assert!(is_locally_automorphic(&cl).unwrap());
    }

    #[test]
    fn closure_budget() {
        let c = Chart::coords(["x", "y"]).unwrap();
        // <d/dx, x^2 d/dx + y d/dy>-style pair generating growing brackets.
        let a = vf(&c, &["1", "0"]);
        let b = vf(&c, &["x^2*y", "0"]);
        let mut rng = SampleRng::default();
        match bracket_closure(&[a, b], 4, 8, &mut rng) {
            Err(LieError::NotClosed { .. }) => {}
            other => panic!("expected NotClosed, got {other:?}"),
        }
    }

    #[test]
    fn identity_coframe() {
        let c = Chart::coords(["x1", "x2", "x3"]).unwrap();
        let frame: Vec<VectorField> = (0..3).map(|i| VectorField::coordinate(&c, i)).collect();
        let co = dual_coframe(&frame).unwrap();
        for (i, f) in co.iter().enumerate() {
            assert_eq!(f, &DiffForm::coordinate(&c, i));
        }
        let mut rng = SampleRng::default();
        let cl = bracket_closure(&frame, 8, 4, &mut rng).unwrap();
        let mc = maurer_cartan_check(&co, &cl).unwrap();
        assert!(mc.holds);
    }
}
