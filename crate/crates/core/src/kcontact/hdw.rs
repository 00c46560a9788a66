//! Hamilton--De Donder--Weyl style combination of k Hamiltonian fields into
//! a Hamiltonian k-vector field with a scalar Hamiltonian.

use crate::error::KContactError;
use crate::exterior::{differential, interior, DiffForm, KFunction, KVectorField};
use crate::expr::Expr;

use super::KContact;

/// Combines k Hamiltonian vector fields (with their k-functions) into a
/// Hamiltonian k-vector field. The scalar Hamiltonian is
/// `h = sum_a <h_a, e^a>` and the combined field satisfies the two defining
/// equations, which are asserted symbolically.
pub fn combine_hamiltonians(
    fields: &KVectorField,
    kc: &KContact,
    hams: &[KFunction],
) -> Result<(KVectorField, Expr), KContactError> {
    let k = kc.k();
    if fields.k() != k || hams.len() != k {
        return Err(KContactError::Calc(crate::error::CalcError::LengthMismatch {
            expected: k,
            got: fields.k().min(hams.len()),
        }));
    }
    let mut h = Expr::zero(kc.chart());
    for (a, ha) in hams.iter().enumerate() {
        let got = kc.hamiltonian_of(fields.field(a))?;
        if &got != ha {
            return Err(KContactError::NotHamiltonianInput(format!(
                "component {a} does not match its k-function"
            )));
        }
        h = h.add(ha.component(a));
    }
    if !verify_hdw(fields, &h, kc)? {
        return Err(KContactError::Internal("combined field fails the defining equations".into()));
    }
    Ok((fields.clone(), h))
}

/// Checks the two defining equations of a Hamiltonian k-vector field:
/// `sum_a iota_{X_a} d eta^a = dh - sum_a (R_a h) eta^a` and
/// `sum_a iota_{X_a} eta^a = -h`.
pub fn verify_hdw(fields: &KVectorField, h: &Expr, kc: &KContact) -> Result<bool, KContactError> {
    let k = kc.k();
    if fields.k() != k {
        return Err(KContactError::Calc(crate::error::CalcError::LengthMismatch {
            expected: k,
            got: fields.k(),
        }));
    }
    let chart = kc.chart();
    let mut lhs1 = DiffForm::zero(chart, 1);
    let mut contraction = Expr::zero(chart);
    for a in 0..k {
        lhs1 = lhs1
            .add(&interior(fields.field(a), &kc.deta()[a]).map_err(KContactError::Calc)?)
            .map_err(KContactError::Calc)?;
        contraction = contraction.add(
            &interior(fields.field(a), kc.eta().component(a))
                .map_err(KContactError::Calc)?
                .coeff(&[]),
        );
    }
    let mut rhs1 = differential(h);
    for (a, reeb) in kc.reeb().iter().enumerate() {
        let rah = reeb.apply(h).map_err(KContactError::Calc)?;
        if !rah.is_zero() {
            rhs1 = rhs1
                .sub(&kc.eta().component(a).scale_expr(&rah))
                .map_err(KContactError::Calc)?;
        }
    }
    Ok(lhs1 == rhs1 && contraction == h.neg())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chart::Chart;
    use crate::exterior::{VecValuedOneForm, VectorField};
    use crate::expr::parse;

    #[test]
    fn reeb_combination_gives_minus_k() {
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
        let kc = KContact::new(VecValuedOneForm::new(c.clone(), vec![eta1, eta2]).unwrap()).unwrap();
        let fields = KVectorField::new(c.clone(), kc.reeb().to_vec()).unwrap();
        let hams: Vec<_> = kc.reeb().iter().map(|r| kc.hamiltonian_of(r).unwrap()).collect();
        let (_, h) = combine_hamiltonians(&fields, &kc, &hams).unwrap();
        assert_eq!(h, parse("-2", &c).unwrap());
        // Zero fields combine to h = 0.
        let zeros = KVectorField::new(c.clone(), vec![VectorField::zero(&c); 2]).unwrap();
        let zh: Vec<_> = (0..2).map(|_| crate::exterior::KFunction::zero(&c, 2)).collect();
        let (_, h0) = combine_hamiltonians(&zeros, &kc, &zh).unwrap();
        assert!(h0.is_zero());
    }
}
