//! Numeric consistency of the companion system: integrating the coefficient
//! ODE alongside the base flow keeps `sum_a f^a(t) <h_a, theta>` constant.

use std::collections::BTreeMap;

use num::BigRational;

use kontact_core::corpus::{load, Document};
use kontact_core::expr::eval::CompiledExpr;
use kontact_core::kcontact::KContact;
use kontact_core::liesys::{
    bracket_closure, closure_hamiltonians, companion_system, dual_coframe, LieClosure, TDepSystem,
};
use kontact_core::numeric::{integrate_system, CoeffProfile};
use kontact_core::rng::SampleRng;

fn q(n: i64) -> BigRational {
    BigRational::from_integer(n.into())
}

/// Evaluates the companion matrix at constant coefficient values.
fn matrix_at(cs: &kontact_core::liesys::CompanionSystem, b: &[f64]) -> Vec<Vec<f64>> {
    let chart = &cs.coeff_chart;
    let mut values = BTreeMap::new();
    values.insert("t".to_string(), 0.0);
    let consts: BTreeMap<String, f64> = chart
        .consts()
        .iter()
        .enumerate()
        .map(|(i, n)| (n.clone(), b[i]))
        .collect();
    cs.matrix
        .iter()
        .map(|row| row.iter().map(|e| e.eval_f64(&values, &consts).unwrap_or(0.0)).collect())
        .collect()
}

/// `exp(t M) v` by the Taylor series; exact after `r` terms for nilpotent
/// `M` and converged to machine precision otherwise (entries and times here
/// are order one).
fn linear_flow(m: &[Vec<f64>], t: f64, v: &[f64]) -> Vec<f64> {
    let r = v.len();
    let mut acc = v.to_vec();
    let mut term = v.to_vec();
    let mut factorial = 1.0;
    for k in 1..=80 {
        factorial *= k as f64;
        let mut next = vec![0.0; r];
        for i in 0..r {
            for (j, t_j) in term.iter().enumerate() {
                next[i] += m[i][j] * t_j;
            }
        }
        term = next;
        let scale = t.powi(k as i32) / factorial;
        for i in 0..r {
            acc[i] += scale * term[i];
        }
        if term.iter().all(|x| (x * scale).abs() < 1e-18) {
            break;
        }
    }
    acc
}

fn check_conservation(
    closure: &LieClosure,
    kc: &KContact,
    theta: &[BigRational],
    b: &[f64],
    x0: &[f64],
) {
    let mut rng = SampleRng::default();
    let hams = closure_hamiltonians(closure, kc).unwrap();
    let cs = companion_system(closure, kc, &hams, theta, &mut rng).unwrap();
    let m = matrix_at(&cs, b);

    let projections: Vec<CompiledExpr> = hams
        .iter()
        .map(|h| CompiledExpr::new(&h.pairing(theta).unwrap()))
        .collect();
    let coeff_names: Vec<String> = (1..=closure.dim()).map(|i| format!("b{i}")).collect();
    let system = TDepSystem::new(closure.clone(), coeff_names).unwrap();
    let profiles: Vec<CoeffProfile> = b.iter().map(|&c| CoeffProfile::Constant(c)).collect();
    let traj = integrate_system(&system, &profiles, x0, (0.0, 1.0), 1e-3).unwrap();

    let f0: Vec<f64> = (0..closure.dim()).map(|i| 0.3 + 0.1 * i as f64).collect();
    let nsyms = kc.chart().num_symbols();
    let mut initial = None;
    let mut max_drift: f64 = 0.0;
    for (i, state) in traj.states.iter().enumerate() {
        let t = traj.times[i];
        let f = linear_flow(&m, t, &f0);
        let mut values = vec![0.0; nsyms];
        values[..state.len()].copy_from_slice(state);
        let mut total = 0.0;
        for (fa, p) in f.iter().zip(&projections) {
            total += fa * p.eval(&values).expect("no poles along the run");
        }
        match initial {
            None => initial = Some(total),
            Some(i0) => max_drift = max_drift.max((total - i0).abs()),
        }
    }
    assert!(max_drift < 1e-6, "companion conservation drift {max_drift}");
}

#[test]
fn control_system_companion_conserves() {
    let file = load("control2").unwrap();
    let doc = Document::resolve(file.doc.clone()).unwrap();
    let frame = doc
        .fields_named(&["Y1".into(), "Y2".into(), "Y3".into(), "Y4".into(), "Y5".into()])
        .unwrap();
    let co = dual_coframe(&frame).unwrap();
    let eta = kontact_core::exterior::VecValuedOneForm::new(
        doc.chart.clone(),
        vec![co[3].clone(), co[4].clone()],
    )
    .unwrap();
    let kc = KContact::new(eta).unwrap();
    let mut rng = SampleRng::default();
    let closure =
        bracket_closure(&doc.fields_named(&doc.raw.generators).unwrap(), 16, 16, &mut rng).unwrap();
    check_conservation(
        &closure,
        &kc,
        &[q(1), q(0)],
        &[1.0, 0.7, 0.3, 0.2, 0.1],
        &[0.05, -0.1, 0.2, 0.1, -0.05],
    );
    check_conservation(
        &closure,
        &kc,
        &[q(0), q(1)],
        &[0.4, 1.0, 0.0, 0.1, 0.2],
        &[0.1, 0.2, -0.1, 0.0, 0.3],
    );
}

#[test]
fn isotropic_companion_conserves() {
    let file = load("isotropic").unwrap();
    let doc = Document::resolve(file.doc.clone()).unwrap();
    let frame = doc
        .fields_named(&["Y1".into(), "Y2".into(), "Y3".into(), "Y4".into()])
        .unwrap();
    let co = dual_coframe(&frame).unwrap();
    let eta = kontact_core::exterior::VecValuedOneForm::new(
        doc.chart.clone(),
        vec![co[1].clone(), co[3].clone()],
    )
    .unwrap();
    let kc = KContact::new(eta).unwrap();
    let mut rng = SampleRng::default();
    let closure =
        bracket_closure(&doc.fields_named(&doc.raw.generators).unwrap(), 16, 16, &mut rng).unwrap();
    check_conservation(&closure, &kc, &[q(1), q(0)], &[1.0, 0.0, 1.0, 0.0], &[1.0, 0.5, 0.25, -0.3]);
}
