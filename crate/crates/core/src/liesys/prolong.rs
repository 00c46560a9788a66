//! Diagonal prolongation of vector fields and k-contact forms to product
//! charts.

use std::sync::Arc;

use crate::chart::Chart;
use crate::error::{KContactError, LieError};
use crate::exterior::{DiffForm, KFunction, VecValuedOneForm, VectorField};
use crate::expr::Expr;
use crate::kcontact::KContact;

/// Result of a diagonal prolongation: the product chart, the prolonged
/// fields and form, and the verified structure.
#[derive(Debug, Clone)]
pub struct Prolongation {
    pub chart: Arc<Chart>,
    pub fields: Vec<VectorField>,
    pub eta: VecValuedOneForm,
    pub kc: KContact,
    /// Hamiltonian k(l+1)-functions of the prolonged fields, one per input.
    pub hamiltonians: Vec<KFunction>,
    pub copies: usize,
}

fn copy_name(base: &str, copy: usize) -> String {
    format!("{base}_{copy}")
}

/// Diagonally prolongs Hamiltonian fields and their k-contact form to
/// `copies = l + 1` labelled factors.
///
/// Variables are suffixed `_0, _1, ...` and the `R^(k(l+1))` basis is
/// ordered copy-major, so component `a*k + b` is the pullback of `eta^b`
/// from copy `a`. The prolonged form is verified as a `k(l+1)`-contact form
/// and each prolonged field's Hamiltonian is checked to be the sum of its
/// per-copy pullbacks; both assertions fail loudly.
pub fn diagonal_prolongation(
    fields: &[VectorField],
    kc: &KContact,
    extra_copies: usize,
) -> Result<Prolongation, LieError> {
    let base = kc.chart().clone();
    if extra_copies == 0 {
        let hamiltonians = fields
            .iter()
            .map(|f| kc.hamiltonian_of(f).map_err(LieError::KContact))
            .collect::<Result<Vec<_>, _>>()?;
        return Ok(Prolongation {
            chart: base,
            fields: fields.to_vec(),
            eta: kc.eta().clone(),
            kc: kc.clone(),
            hamiltonians,
            copies: 1,
        });
    }
    let copies = extra_copies + 1;
    let k = kc.k();
    let mut vars = Vec::with_capacity(base.dim() * copies);
    for copy in 0..copies {
        for v in base.vars() {
            vars.push(copy_name(v, copy));
        }
    }
    let chart = Chart::new(vars, base.consts().to_vec())?;

    let lift_expr = |e: &Expr, copy: usize| -> Result<Expr, LieError> {
        Ok(e.rename_symbols(&chart, |name| {
            if base.var_index(name).is_some() {
                copy_name(name, copy)
            } else {
                name.to_string()
            }
        })?)
    };

    // Base Hamiltonians first; prolongation only makes sense for
    // Hamiltonian inputs.
    let base_hams = fields
        .iter()
        .map(|f| kc.hamiltonian_of(f).map_err(LieError::KContact))
        .collect::<Result<Vec<_>, _>>()?;

    let mut prolonged = Vec::with_capacity(fields.len());
    for f in fields {
        let mut coeffs = Vec::with_capacity(chart.dim());
        for copy in 0..copies {
            for e in f.coeffs() {
                coeffs.push(lift_expr(e, copy)?);
            }
        }
        prolonged.push(VectorField::new(chart.clone(), coeffs).map_err(LieError::Calc)?);
    }

    let mut comps = Vec::with_capacity(k * copies);
    for copy in 0..copies {
        for b in 0..k {
            let mut terms = Vec::new();
            for (idx, c) in kc.eta().component(b).terms() {
                let i = idx[0] as usize;
                let lifted = chart
                    .var_index(&copy_name(base.vars()[i].as_str(), copy))
                    .expect("prolonged variable exists");
                terms.push((vec![lifted], lift_expr(c, copy)?));
            }
            comps.push(DiffForm::from_terms(&chart, 1, terms).map_err(LieError::Calc)?);
        }
    }
    let eta = VecValuedOneForm::new(chart.clone(), comps).map_err(LieError::Calc)?;
    let kc_prol = KContact::new(eta.clone())?;

    // Each prolonged Hamiltonian must be the copy-wise sum of pullbacks.
    let mut hamiltonians = Vec::with_capacity(fields.len());
    for (f, h) in prolonged.iter().zip(&base_hams) {
        let got = kc_prol.hamiltonian_of(f)?;
        let mut expect = Vec::with_capacity(k * copies);
        for copy in 0..copies {
            for b in 0..k {
                expect.push(lift_expr(h.component(b), copy)?);
            }
        }
        let expect = KFunction::new(chart.clone(), expect).map_err(LieError::Calc)?;
        if got != expect {
            return Err(LieError::KContact(KContactError::Internal(
                "prolonged Hamiltonian is not the sum of per-copy pullbacks".into(),
            )));
        }
        hamiltonians.push(got);
    }

    Ok(Prolongation { chart, fields: prolonged, eta, kc: kc_prol, hamiltonians, copies })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::parse;
    use crate::rng::SampleRng;

    #[test]
    fn jet_prolongation_is_four_contact() {
        let c = Chart::coords(["q", "z1", "z2", "p1", "p2"]).unwrap();
        let mk = |idx: usize, coef: &str| -> DiffForm {
            DiffForm::from_terms(
                &c,
                1,
                [(vec![idx], Expr::one(&c)), (vec![0], parse(coef, &c).unwrap())],
            )
            .unwrap()
        };
        let eta = VecValuedOneForm::new(c.clone(), vec![mk(1, "-p1"), mk(2, "-p2")]).unwrap();
        let kc = KContact::new(eta).unwrap();
        let fields = vec![
            VectorField::coordinate(&c, 1),
            VectorField::coordinate(&c, 0),
        ];
        let prol = diagonal_prolongation(&fields, &kc, 1).unwrap();
        assert_eq!(prol.chart.dim(), 10);
        assert_eq!(prol.kc.k(), 4);
        assert!(prol.kc.report().is_kcontact);
        assert_eq!(prol.kc.reeb().len(), 4);

        // Structure constants survive prolongation.
        let mut rng = SampleRng::default();
        let base_cl = crate::liesys::bracket_closure(&fields, 8, 4, &mut rng).unwrap();
        let prol_cl = crate::liesys::bracket_closure(&prol.fields, 8, 4, &mut rng).unwrap();
        assert_eq!(base_cl.dim(), prol_cl.dim());
        for i in 0..base_cl.dim() {
            for j in 0..base_cl.dim() {
                for k in 0..base_cl.dim() {
                    assert_eq!(base_cl.c(i, j, k), prol_cl.c(i, j, k));
                }
            }
        }

        // l = 0 is the identity.
        let same = diagonal_prolongation(&fields, &kc, 0).unwrap();
        assert_eq!(same.chart, c);
        assert_eq!(same.eta, kc.eta().clone());
    }
}
