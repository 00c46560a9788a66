//! Integrability of t-dependent k-vector fields (zero-curvature check).

use crate::chart::Chart;
use crate::error::LieError;
use crate::exterior::{lie_bracket, VectorField};
use crate::expr::Expr;

/// Checks integrability of the system `d gamma / d t^a = X_a(t, gamma)`:
/// all pairwise brackets `[d/dt^a + X_a, d/dt^b + X_b]` must vanish.
///
/// The fields live on a chart containing the `t_vars` as ordinary chart
/// variables. Opaque constants are treated as unknown functions of the
/// `t_vars`: their t-derivatives become fresh opaque symbols, so a bracket
/// only vanishes when those unknown derivatives cancel structurally.
pub fn pde_integrability(fields: &[VectorField], t_vars: &[String]) -> Result<bool, LieError> {
    if fields.len() != t_vars.len() {
        return Err(LieError::Calc(crate::error::CalcError::LengthMismatch {
            expected: t_vars.len(),
            got: fields.len(),
        }));
    }
    if fields.len() <= 1 {
        // A single component (autonomised ODE system) is always integrable.
        return Ok(true);
    }
    let base = fields[0].chart().clone();
    for t in t_vars {
        if base.var_index(t).is_none() {
            return Err(LieError::Calc(crate::error::CalcError::ChartMismatch(format!(
                "t-variable `{t}` is not a chart variable"
            ))));
        }
    }

    // Opaque constants appearing anywhere get implicit t-dependence: their
    // derivatives along each t-variable become fresh opaque symbols `c_d<i>`.
    let used_consts: Vec<String> = base
        .consts()
        .iter()
        .filter(|c| fields.iter().any(|f| f.coeffs().iter().any(|e| !e.independent_of(c))))
        .cloned()
        .collect();
    let mut consts = base.consts().to_vec();
    let mut derived: std::collections::BTreeMap<(String, usize), String> =
        std::collections::BTreeMap::new();
    for c in &used_consts {
        for a in 0..t_vars.len() {
            let mut name = format!("{c}_d{}", a + 1);
            while consts.contains(&name) || base.var_index(&name).is_some() {
                name.push('_');
            }
            derived.insert((c.clone(), a), name.clone());
            consts.push(name);
        }
    }
    let chart = Chart::new(base.vars().to_vec(), consts)?;
    let lifted: Vec<VectorField> = fields
        .iter()
        .map(|f| {
            let coeffs = f
                .coeffs()
                .iter()
                .map(|e| e.rename_symbols(&chart, |n| n.to_string()))
                .collect::<Result<Vec<_>, _>>()?;
            VectorField::new(chart.clone(), coeffs).map_err(|e| {
                crate::error::ExprError::InvalidChart(e.to_string())
            })
        })
        .collect::<Result<_, _>>()?;

    // d/dt^a of a coefficient: explicit t-derivative plus the chain terms
    // through the opaque constants.
    let dt = |e: &Expr, a: usize| -> Result<Expr, LieError> {
        let mut acc = e.diff(&t_vars[a])?;
        for c in &used_consts {
            let idx = chart.symbol_index(c).expect("lifted chart keeps constants");
            let partial = e.diff_symbol(idx);
            if partial.is_zero() {
                continue;
            }
            let dname = &derived[&(c.clone(), a)];
            acc = acc.add(&partial.mul(&Expr::symbol(&chart, dname)?));
        }
        Ok(acc)
    };

    for a in 0..lifted.len() {
        for b in (a + 1)..lifted.len() {
            // [d/dt^a + X_a, d/dt^b + X_b]
            //   = dX_b/dt^a - dX_a/dt^b + [X_a, X_b].
            let bracket = lie_bracket(&lifted[a], &lifted[b])?;
            for i in 0..chart.dim() {
                let term = dt(lifted[b].coeff(i), a)?
                    .sub(&dt(lifted[a].coeff(i), b)?)
                    .add(bracket.coeff(i));
                if !term.is_zero() {
                    return Ok(false);
                }
            }
        }
    }
    Ok(true)
}
