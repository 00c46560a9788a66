//! k-contact structure: verification, Reeb fields, Hamiltonian k-functions,
//! the induced bracket, and dissipation.

mod distribution;
mod hdw;
mod presymplectic;

pub use distribution::{build_kcontact, max_nonintegrable, Distribution};
pub(crate) use distribution::frame_dual_rows;
pub use hdw::{combine_hamiltonians, verify_hdw};
pub use presymplectic::{presymplectic_extend, presymplectic_project, project_bracket_compat, PresymplecticExtension};

use std::sync::Arc;

use serde::Serialize;

use crate::chart::Chart;
use crate::error::KContactError;
use crate::exterior::{
    differential, interior, lie_bracket, DiffForm, KFunction, VecValuedOneForm, VectorField,
};
use crate::expr::Expr;
use crate::linalg::ExprMatrix;

/// Why verification failed, if it did.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum FailureReason {
    CorankMismatch,
    ReebRankMismatch,
    NontrivialIntersection,
    None,
}

/// Outcome of checking the three defining conditions of a k-contact form.
#[derive(Debug, Clone)]
pub struct KContactReport {
    pub is_kcontact: bool,
    pub rank_ker_eta: usize,
    pub rank_ker_deta: usize,
    pub rank_intersection: usize,
    pub k: usize,
    pub dim: usize,
    pub reeb: Option<Vec<VectorField>>,
    pub failure_reason: FailureReason,
    /// Pivot numerators whose common zero locus is where genericity fails.
    pub locus: Vec<String>,
}

/// The coefficient matrix of the one-form components: `E[a][i] = eta^a_i`.
fn eta_matrix(eta: &VecValuedOneForm) -> ExprMatrix {
    let chart = eta.chart().clone();
    let dim = chart.dim();
    let mut m = ExprMatrix::new(chart.clone(), eta.k(), dim);
    for (a, comp) in eta.components().iter().enumerate() {
        for (idx, c) in comp.terms() {
            m.set(a, idx[0] as usize, c.clone());
        }
    }
    m
}

/// Contraction matrix of a two-form: row m holds the dx_m coefficient of
/// `iota_v omega` as a linear functional of v.
fn two_form_matrix(omega: &DiffForm, chart: &Arc<Chart>) -> ExprMatrix {
    let dim = chart.dim();
    let mut m = ExprMatrix::new(chart.clone(), dim, dim);
    for (idx, c) in omega.terms() {
        let (i, j) = (idx[0] as usize, idx[1] as usize);
        // omega = c dx_i ^ dx_j contributes c v^i to slot j and -c v^j to slot i.
        m.set(j, i, m.at(j, i).add(c));
        m.set(i, j, m.at(i, j).sub(c));
    }
    m
}

fn stack(mats: &[&ExprMatrix], chart: &Arc<Chart>) -> ExprMatrix {
    let cols = mats[0].cols;
    let rows: usize = mats.iter().map(|m| m.rows).sum();
    let mut out = ExprMatrix::new(chart.clone(), rows, cols);
    let mut r0 = 0;
    for m in mats {
        for r in 0..m.rows {
            for c in 0..cols {
                out.set(r0 + r, c, m.at(r, c).clone());
            }
        }
        r0 += m.rows;
    }
    out
}

/// Checks the defining conditions of a k-contact form and, when they hold,
/// solves for the Reeb fields. Ranks are generic ranks over the
/// rational-function field.
pub fn verify_kcontact(eta: &VecValuedOneForm) -> Result<KContactReport, KContactError> {
    let chart = eta.chart().clone();
    let k = eta.k();
    let dim = chart.dim();
    if k >= dim {
        return Err(KContactError::NotKContact(format!("need 1 <= k < dim, got k={k}, dim={dim}")));
    }
    let e = eta_matrix(eta);
    let deta = eta.ext_deriv();
    let a_mats: Vec<ExprMatrix> = deta.iter().map(|w| two_form_matrix(w, &chart)).collect();
    let a_refs: Vec<&ExprMatrix> = a_mats.iter().collect();
    let a = stack(&a_refs, &chart);
    let combined = stack(&[&e, &a], &chart);

    let red_e = e.rank()?;
    let red_a = a.rank()?;
    let red_c = combined.rank()?;
    let rank_ker_eta = dim - red_e.rank;
    let rank_ker_deta = dim - red_a.rank;
    let rank_intersection = dim - red_c.rank;
    let mut locus: Vec<String> = Vec::new();
    for l in red_e.locus.iter().chain(red_a.locus.iter()).chain(red_c.locus.iter()) {
        if !locus.contains(l) {
            locus.push(l.clone());
        }
    }

    let failure_reason = if rank_ker_eta != dim - k {
        FailureReason::CorankMismatch
    } else if rank_ker_deta != k {
        FailureReason::ReebRankMismatch
    } else if rank_intersection != 0 {
        FailureReason::NontrivialIntersection
    } else {
        FailureReason::None
    };

    let mut report = KContactReport {
        is_kcontact: failure_reason == FailureReason::None,
        rank_ker_eta,
        rank_ker_deta,
        rank_intersection,
        k,
        dim,
        reeb: None,
        failure_reason,
        locus,
    };
    if report.is_kcontact {
        report.reeb = Some(solve_reeb(eta, &e, &a)?);
    }
    Ok(report)
}

/// Solves the duality system for the Reeb fields and asserts uniqueness and
/// pairwise commutation.
fn solve_reeb(
    eta: &VecValuedOneForm,
    e: &ExprMatrix,
    a: &ExprMatrix,
) -> Result<Vec<VectorField>, KContactError> {
    let chart = eta.chart().clone();
    let k = eta.k();
    let dim = chart.dim();
    let sys = stack(&[e, a], &chart);
    let mut rhs = Vec::with_capacity(k);
    for alpha in 0..k {
        let mut b = vec![Expr::zero(&chart); k + k * dim];
        b[alpha] = Expr::one(&chart);
        rhs.push(b);
    }
    let sols = sys.solve(&rhs)?.ok_or_else(|| KContactError::SingularSolve {
        locus: sys.rank().map(|r| r.locus).unwrap_or_default(),
    })?;
    let reeb: Vec<VectorField> = sols
        .into_iter()
        .map(|coeffs| VectorField::new(chart.clone(), coeffs))
        .collect::<Result<_, _>>()
        .map_err(KContactError::Calc)?;
    // Uniqueness is a theorem; so is pairwise commutation. A violation here
    // means the verification above mis-passed.
    for (i, ri) in reeb.iter().enumerate() {
        for rj in reeb.iter().skip(i + 1) {
            if !lie_bracket(ri, rj)?.is_zero() {
                return Err(KContactError::Internal("Reeb fields fail to commute".into()));
            }
        }
    }
    Ok(reeb)
}

/// Solves just the Reeb fields, failing if the form is not k-contact.
pub fn reeb_fields(eta: &VecValuedOneForm) -> Result<Vec<VectorField>, KContactError> {
    let report = verify_kcontact(eta)?;
    report
        .reeb
        .ok_or_else(|| KContactError::NotKContact(format!("{:?}", report.failure_reason)))
}

/// A verified k-contact structure with its Reeb fields and differentials
/// cached; the entry point for all Hamiltonian-level operations.
#[derive(Debug, Clone)]
pub struct KContact {
    eta: VecValuedOneForm,
    deta: Vec<DiffForm>,
    reeb: Vec<VectorField>,
    report: KContactReport,
}

impl KContact {
    pub fn new(eta: VecValuedOneForm) -> Result<KContact, KContactError> {
        let report = verify_kcontact(&eta)?;
        if !report.is_kcontact {
            return Err(KContactError::NotKContact(format!("{:?}", report.failure_reason)));
        }
        let deta = eta.ext_deriv();
        let reeb = report.reeb.clone().expect("verified form has Reeb fields");
        Ok(KContact { eta, deta, reeb, report })
    }

    pub fn chart(&self) -> &Arc<Chart> {
        self.eta.chart()
    }

    pub fn k(&self) -> usize {
        self.eta.k()
    }

    pub fn eta(&self) -> &VecValuedOneForm {
        &self.eta
    }

    pub fn deta(&self) -> &[DiffForm] {
        &self.deta
    }

    pub fn reeb(&self) -> &[VectorField] {
        &self.reeb
    }

    pub fn report(&self) -> &KContactReport {
        &self.report
    }

    /// Tests whether `x` is Hamiltonian and returns its candidate k-function
    /// `h = -iota_X eta` together with the residual one-forms
    /// `iota_X d eta^a - d h^a + sum_b (R_b h^a) eta^b`.
    pub fn hamiltonian_check(&self, x: &VectorField) -> Result<HamiltonianCheck, KContactError> {
        let h = self.eta.interior(x)?.neg();
        let mut residuals = Vec::with_capacity(self.k());
        for a in 0..self.k() {
            let mut res = interior(x, &self.deta[a])?.sub(&differential(h.component(a)))?;
            for (b, reeb) in self.reeb.iter().enumerate() {
                let coeff = reeb.apply(h.component(a))?;
                if !coeff.is_zero() {
                    res = res.add(&self.eta.component(b).scale_expr(&coeff))?;
                }
            }
            residuals.push(res);
        }
        let is_hamiltonian = residuals.iter().all(DiffForm::is_zero);
        Ok(HamiltonianCheck { is_hamiltonian, h, residuals })
    }

    /// `h` when `x` is Hamiltonian, error otherwise.
    pub fn hamiltonian_of(&self, x: &VectorField) -> Result<KFunction, KContactError> {
        let check = self.hamiltonian_check(x)?;
        if !check.is_hamiltonian {
            return Err(KContactError::NotHamiltonianInput("residual one-forms are nonzero".into()));
        }
        Ok(check.h)
    }

    fn require_pair(&self, f: &KFunction, x: &VectorField) -> Result<(), KContactError> {
        let check = self.hamiltonian_check(x)?;
        if !check.is_hamiltonian {
            return Err(KContactError::NotHamiltonianInput("field is not Hamiltonian".into()));
        }
        if &check.h != f {
            return Err(KContactError::NotHamiltonianInput(
                "k-function does not match -iota_X eta".into(),
            ));
        }
        Ok(())
    }

    /// The bracket `{f, g} = eta([X_f, X_g])`, cross-validated against the
    /// Lie-derivative route `-X_f g - R_g f`; the two must agree exactly.
    pub fn bracket(
        &self,
        f: &KFunction,
        g: &KFunction,
        x_f: &VectorField,
        x_g: &VectorField,
    ) -> Result<KFunction, KContactError> {
        self.require_pair(f, x_f)?;
        self.require_pair(g, x_g)?;
        let direct = self.eta.interior(&lie_bracket(x_f, x_g)?)?;
        let alt = g.apply_field(x_f)?.neg().sub(&f.apply_field(&self.reeb_derivation(g)?)?)?;
        if direct != alt {
            return Err(KContactError::Internal(
                "bracket disagrees between eta([X_f,X_g]) and -L_{X_f} g - R_g f".into(),
            ));
        }
        Ok(direct)
    }

    /// The Reeb derivation `R_h = sum_a h^a R_a`.
    pub fn reeb_derivation(&self, h: &KFunction) -> Result<VectorField, KContactError> {
        if h.k() != self.k() {
            return Err(KContactError::Calc(crate::error::CalcError::LengthMismatch {
                expected: self.k(),
                got: h.k(),
            }));
        }
        let mut acc = VectorField::zero(self.chart());
        for (a, reeb) in self.reeb.iter().enumerate() {
            acc = acc.add(&reeb.scale_expr(h.component(a)))?;
        }
        Ok(acc)
    }

    /// Dissipation test: `f` is dissipated relative to `h` iff
    /// `X_h f = -R_f h`, equivalently `{h, f} = 0`. Both routes are computed
    /// and must agree.
    pub fn is_dissipated(
        &self,
        f: &KFunction,
        h: &KFunction,
        x_h: &VectorField,
        x_f: &VectorField,
    ) -> Result<bool, KContactError> {
        let direct = {
            let lhs = f.apply_field(x_h)?;
            let rhs = h.apply_field(&self.reeb_derivation(f)?)?.neg();
            lhs == rhs
        };
        let via_bracket = self.bracket(h, f, x_h, x_f)?.is_zero();
        if direct != via_bracket {
            return Err(KContactError::Internal(
                "dissipation routes disagree (X_h f = -R_f h vs {h,f} = 0)".into(),
            ));
        }
        Ok(direct)
    }

    /// First-integral test of `h` against all Reeb fields (projectability of
    /// a single Hamiltonian k-function).
    pub fn reeb_invariant(&self, h: &KFunction) -> Result<bool, KContactError> {
        for reeb in &self.reeb {
            if !h.apply_field(reeb)?.is_zero() {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

/// Result of the Hamiltonian test for one vector field.
#[derive(Debug, Clone)]
pub struct HamiltonianCheck {
    pub is_hamiltonian: bool,
    pub h: KFunction,
    pub residuals: Vec<DiffForm>,
}

/// The kernel of the form as a distribution, spanned by a generic null-space
/// basis of the coefficient matrix.
pub fn eta_kernel_distribution(
    kc: &KContact,
    rng: &crate::rng::SampleRng,
) -> Result<Distribution, KContactError> {
    let chart = kc.chart().clone();
    let e = eta_matrix(kc.eta());
    let basis = e.nullspace()?;
    let fields: Vec<VectorField> = basis
        .into_iter()
        .map(|coeffs| VectorField::new(chart.clone(), coeffs))
        .collect::<Result<_, _>>()
        .map_err(KContactError::Calc)?;
    Distribution::new(chart, fields, rng)
}

/// Convenience: the k-form components of `eta` contracted into `d eta`.
pub(crate) fn pair_deta(
    deta: &[DiffForm],
    theta: &[num::BigRational],
    chart: &Arc<Chart>,
) -> Result<DiffForm, KContactError> {
    let mut acc = DiffForm::zero(chart, 2);
    for (t, w) in theta.iter().zip(deta) {
        acc = acc.add(&w.scale(t)).map_err(KContactError::Calc)?;
    }
    Ok(acc)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::parse;

    fn jet_eta() -> VecValuedOneForm {
        // eta_J = (dz1 - p1 dq) e1 + (dz2 - p2 dq) e2 on (q, z1, z2, p1, p2).
        let c = Chart::coords(["q", "z1", "z2", "p1", "p2"]).unwrap();
        let eta1 = DiffForm::from_terms(
            &c,
            1,
            [(vec![1], Expr::one(&c)), (vec![0], parse("-p1", &c).unwrap())],
        )
        .unwrap();
        let eta2 = DiffForm::from_terms(
            &c,
            1,
            [(vec![2], Expr::one(&c)), (vec![0], parse("-p2", &c).unwrap())],
        )
        .unwrap();
        VecValuedOneForm::new(c, vec![eta1, eta2]).unwrap()
    }

    #[test]
    fn jet_form_verifies_with_reeb() {
        let eta = jet_eta();
        let report = verify_kcontact(&eta).unwrap();
        assert!(report.is_kcontact);
        assert_eq!(report.rank_ker_eta, 3);
        assert_eq!(report.rank_ker_deta, 2);
        assert_eq!(report.rank_intersection, 0);
        let reeb = report.reeb.unwrap();
        let c = eta.chart();
        assert_eq!(reeb[0], VectorField::coordinate(c, 1));
        assert_eq!(reeb[1], VectorField::coordinate(c, 2));
    }

    #[test]
    fn repeated_component_fails_corank() {
        // dz e1 + dz e2 on R^3: ker has corank 1, not 2.
        let c = Chart::coords(["x", "y", "z"]).unwrap();
        let dz = DiffForm::coordinate(&c, 2);
        let eta = VecValuedOneForm::new(c, vec![dz.clone(), dz]).unwrap();
        let report = verify_kcontact(&eta).unwrap();
        assert!(!report.is_kcontact);
        assert_eq!(report.failure_reason, FailureReason::CorankMismatch);
        assert!(report.reeb.is_none());
    }

    #[test]
    fn canonical_contact_form() {
        // dz - p dx on R^3 has Reeb d/dz.
        let c = Chart::coords(["x", "z", "p"]).unwrap();
        let eta = DiffForm::from_terms(
            &c,
            1,
            [(vec![1], Expr::one(&c)), (vec![0], parse("-p", &c).unwrap())],
        )
        .unwrap();
        let vv = VecValuedOneForm::new(c.clone(), vec![eta]).unwrap();
        let reeb = reeb_fields(&vv).unwrap();
        assert_eq!(reeb, vec![VectorField::coordinate(&c, 1)]);
    }

    #[test]
    fn non_hamiltonian_field_detected() {
        let c = Chart::coords(["x", "z", "p"]).unwrap();
        let eta = DiffForm::from_terms(
            &c,
            1,
            [(vec![1], Expr::one(&c)), (vec![0], parse("-p", &c).unwrap())],
        )
        .unwrap();
        let kc = KContact::new(VecValuedOneForm::new(c.clone(), vec![eta]).unwrap()).unwrap();
        let dp = VectorField::coordinate(&c, 2);
        let check = kc.hamiltonian_check(&dp).unwrap();
        assert!(!check.is_hamiltonian);
        // Zero field is Hamiltonian with h = 0.
        let z = kc.hamiltonian_check(&VectorField::zero(&c)).unwrap();
        assert!(z.is_hamiltonian);
        assert!(z.h.is_zero());
    }

    #[test]
    fn reeb_hamiltonians_are_minus_basis() {
        let eta = jet_eta();
        let kc = KContact::new(eta).unwrap();
        for (a, reeb) in kc.reeb().to_vec().iter().enumerate() {
            let h = kc.hamiltonian_of(reeb).unwrap();
            let expected = KFunction::basis(kc.chart(), kc.k(), a, num::BigRational::from_integer((-1).into()));
            assert_eq!(h, expected);
        }
    }
}
