//! Presymplectic projection along a covector and the presymplectic extension
//! on `R^k x M`.

use std::sync::Arc;

use num::BigRational;

use crate::chart::Chart;
use crate::error::KContactError;
use crate::exterior::{
    differential, ext_deriv, interior, lie_derivative, DiffForm, KFunction, VectorField,
};
use crate::expr::Expr;

use super::{pair_deta, KContact};

/// Projects a Reeb-invariant Hamiltonian pair along a covector `theta`:
/// returns the presymplectic form `omega_theta = <d eta, theta>` and the
/// projected Hamiltonian `f^theta = <f, theta>`, with the Hamilton equation
/// `iota_{X_f} omega_theta = d f^theta` asserted.
pub fn presymplectic_project(
    kc: &KContact,
    theta: &[BigRational],
    f: &KFunction,
    x_f: &VectorField,
) -> Result<(DiffForm, Expr), KContactError> {
    let h = kc.hamiltonian_of(x_f)?;
    if &h != f {
        return Err(KContactError::NotHamiltonianInput("k-function/field pair mismatch".into()));
    }
    if !kc.reeb_invariant(f)? {
        return Err(KContactError::NotProjectable(
            "k-function is not a first integral of the Reeb fields".into(),
        ));
    }
    let omega = pair_deta(kc.deta(), theta, kc.chart())?;
    let f_theta = f.pairing(theta).map_err(KContactError::Calc)?;
    let lhs = interior(x_f, &omega).map_err(KContactError::Calc)?;
    let rhs = differential(&f_theta);
    if lhs != rhs {
        return Err(KContactError::Internal(
            "projection failed: iota_{X_f} omega_theta != d f^theta".into(),
        ));
    }
    Ok((omega, f_theta))
}

/// Bracket compatibility of the projection: for projectable pairs,
/// `<{f, g}, theta> = omega_theta(X_f, X_g)`.
pub fn project_bracket_compat(
    kc: &KContact,
    theta: &[BigRational],
    f: (&KFunction, &VectorField),
    g: (&KFunction, &VectorField),
) -> Result<bool, KContactError> {
    let omega = pair_deta(kc.deta(), theta, kc.chart())?;
    let bracket = kc.bracket(f.0, g.0, f.1, g.1)?;
    let lhs = bracket.pairing(theta).map_err(KContactError::Calc)?;
    let rhs = omega.apply(&[f.1, g.1]).map_err(KContactError::Calc)?;
    Ok(lhs == rhs)
}

/// The presymplectic extension of a Hamiltonian pair: chart extended by
/// `z_1..z_k`, the exact two-form `omega = d(sum_a z_a eta^a)`, and the
/// extended dynamics `sum_{a,b} z_a (R_b h^a) d/dz_b + X_h`.
#[derive(Debug, Clone)]
pub struct PresymplecticExtension {
    pub chart: Arc<Chart>,
    pub omega: DiffForm,
    pub field: VectorField,
    /// Names of the fresh fibre variables in order.
    pub z_vars: Vec<String>,
}

pub fn presymplectic_extend(
    kc: &KContact,
    h: &KFunction,
    x_h: &VectorField,
) -> Result<PresymplecticExtension, KContactError> {
    let got = kc.hamiltonian_of(x_h)?;
    if &got != h {
        return Err(KContactError::NotHamiltonianInput("k-function/field pair mismatch".into()));
    }
    let base = kc.chart();
    let k = kc.k();
    // Fresh fibre variable names, avoiding collisions with the base chart.
    let mut z_vars = Vec::with_capacity(k);
    for a in 1..=k {
        let mut name = format!("z_{a}");
        while base.symbol_index(&name).is_some() || z_vars.contains(&name) {
            name.push('_');
        }
        z_vars.push(name);
    }
    let mut vars: Vec<String> = base.vars().to_vec();
    vars.extend(z_vars.iter().cloned());
    let chart = Chart::new(vars, base.consts().to_vec())?;

    let lift_expr =
        |e: &Expr| -> Result<Expr, KContactError> { Ok(e.rename_symbols(&chart, |n| n.to_string())?) };
    let lift_form = |w: &DiffForm| -> Result<DiffForm, KContactError> {
        let mut terms = Vec::new();
        for (idx, c) in w.terms() {
            let lifted_idx: Vec<usize> = idx
                .iter()
                .map(|&i| chart.var_index(base.vars()[i as usize].as_str()).unwrap())
                .collect();
            terms.push((lifted_idx, lift_expr(c)?));
        }
        DiffForm::from_terms(&chart, w.degree(), terms).map_err(KContactError::Calc)
    };

    // theta_ext = sum_a z_a etahat^a; omega = d theta_ext.
    let mut theta_ext = DiffForm::zero(&chart, 1);
    for a in 0..k {
        let z = Expr::symbol(&chart, &z_vars[a])?;
        theta_ext = theta_ext
            .add(&lift_form(kc.eta().component(a))?.scale_expr(&z))
            .map_err(KContactError::Calc)?;
    }
    let omega = ext_deriv(&theta_ext);

    // Extended dynamics.
    let mut coeffs = Vec::with_capacity(chart.dim());
    for e in x_h.coeffs() {
        coeffs.push(lift_expr(e)?);
    }
    for b in 0..k {
        let mut drift = Expr::zero(&chart);
        for a in 0..k {
            let rbh = kc.reeb()[b].apply(h.component(a)).map_err(KContactError::Calc)?;
            if rbh.is_zero() {
                continue;
            }
            let z = Expr::symbol(&chart, &z_vars[a])?;
            drift = drift.add(&z.mul(&lift_expr(&rbh)?));
        }
        coeffs.push(drift);
    }
    let field = VectorField::new(chart.clone(), coeffs).map_err(KContactError::Calc)?;

    // The extended field is Hamiltonian for omega: its Lie derivative on
    // omega vanishes (in fact iota_Z omega is exact).
    let ld = lie_derivative(&field, &omega).map_err(KContactError::Calc)?;
    if !ld.is_zero() {
        return Err(KContactError::Internal("extension is not omega-Hamiltonian".into()));
    }
    Ok(PresymplecticExtension { chart, omega, field, z_vars })
}
