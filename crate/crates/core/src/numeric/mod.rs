//! Floating-point verification: fixed-step RK4 integration, conservation
//! monitoring, superposition-rule checks, and finite-difference validation
//! of the symbolic calculus.

use std::collections::BTreeMap;

use crate::error::NumericError;
use crate::expr::eval::CompiledExpr;
use crate::expr::Expr;
use crate::exterior::VectorField;

/// Default tolerance for symbolic-vs-numeric comparisons.
pub const TOL_SYMBOLIC: f64 = 1e-9;
/// Default tolerance for conservation along trajectories.
pub const TOL_CONSERVATION: f64 = 1e-6;

/// A named time profile for one coefficient function `b(t)`.
#[derive(Debug, Clone)]
pub enum CoeffProfile {
    Constant(f64),
    /// `c0 + c1 t + c2 t^2 + ...`
    Polynomial(Vec<f64>),
    /// Linear interpolation through uniform samples starting at `t0`.
    Sampled { t0: f64, dt: f64, values: Vec<f64> },
}

impl CoeffProfile {
    pub fn at(&self, t: f64) -> f64 {
        match self {
            CoeffProfile::Constant(c) => *c,
            CoeffProfile::Polynomial(cs) => {
                let mut acc = 0.0;
                for c in cs.iter().rev() {
                    acc = acc * t + c;
                }
                acc
            }
            CoeffProfile::Sampled { t0, dt, values } => {
                if values.is_empty() {
                    return 0.0;
                }
                let s = (t - t0) / dt;
                let i = s.floor();
                let frac = s - i;
                let i = (i as isize).clamp(0, values.len() as isize - 1) as usize;
                let j = (i + 1).min(values.len() - 1);
                values[i] * (1.0 - frac) + values[j] * frac
            }
        }
    }
}

/// A fixed-step trajectory. Alongside the state, the running integrals
/// `int_0^t b_a(s) ds` of every coefficient are carried on the same RK4
/// grid so quadrature stays consistent with the flow.
#[derive(Debug, Clone)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<Vec<f64>>,
    pub coeff_integrals: Vec<Vec<f64>>,
    pub step: f64,
}

/// Right-hand side `sum_a b_a(t) X_a(x)` compiled for dense evaluation.
struct CompiledSystem {
    fields: Vec<Vec<CompiledExpr>>,
    dim: usize,
    nsyms: usize,
}

impl CompiledSystem {
    fn new(basis: &[VectorField]) -> CompiledSystem {
        let chart = basis[0].chart();
        CompiledSystem {
            fields: basis
                .iter()
                .map(|f| f.coeffs().iter().map(CompiledExpr::new).collect())
                .collect(),
            dim: chart.dim(),
            nsyms: chart.num_symbols(),
        }
    }

    /// Fills `out` with the state derivative; `None` on a pole.
    fn rhs(&self, t: f64, state: &[f64], coeffs: &[CoeffProfile], out: &mut [f64]) -> Option<()> {
        let mut values = vec![0.0; self.nsyms];
        values[..self.dim].copy_from_slice(&state[..self.dim]);
        for v in out.iter_mut() {
            *v = 0.0;
        }
        for (field, profile) in self.fields.iter().zip(coeffs) {
            let b = profile.at(t);
            if b == 0.0 {
                continue;
            }
            for (i, comp) in field.iter().enumerate() {
                let v = comp.eval(&values)?;
                out[i] += b * v;
            }
        }
        Some(())
    }
}

/// Integrates `dx/dt = sum_a b_a(t) X_a(x)` with classical fixed-step RK4.
///
/// The basis fields come from a closure or are provided directly; `coeffs`
/// must match their order. A pole of any coefficient function along the run
/// aborts with `PoleEncountered`.
pub fn integrate(
    basis: &[VectorField],
    coeffs: &[CoeffProfile],
    x0: &[f64],
    t_span: (f64, f64),
    step: f64,
) -> Result<Trajectory, NumericError> {
    assert_eq!(basis.len(), coeffs.len(), "one profile per basis field");
    assert!(step > 0.0 && t_span.1 > t_span.0, "forward integration only");
    let sys = CompiledSystem::new(basis);
    let dim = sys.dim;
    assert_eq!(x0.len(), dim, "initial state dimension");

    let n_steps = ((t_span.1 - t_span.0) / step).round() as usize;
    let mut times = Vec::with_capacity(n_steps + 1);
    let mut states = Vec::with_capacity(n_steps + 1);
    let mut integrals = Vec::with_capacity(n_steps + 1);
    let mut x = x0.to_vec();
    let mut q = vec![0.0; coeffs.len()];
    let mut t = t_span.0;
    times.push(t);
    states.push(x.clone());
    integrals.push(q.clone());

    let mut k1 = vec![0.0; dim];
    let mut k2 = vec![0.0; dim];
    let mut k3 = vec![0.0; dim];
    let mut k4 = vec![0.0; dim];
    let mut tmp = vec![0.0; dim];
    let pole = |t: f64, x: &[f64]| NumericError::PoleEncountered { t, state: x.to_vec() };

    for _ in 0..n_steps {
        let h = step;
        sys.rhs(t, &x, coeffs, &mut k1).ok_or_else(|| pole(t, &x))?;
        for i in 0..dim {
            tmp[i] = x[i] + 0.5 * h * k1[i];
        }
        sys.rhs(t + 0.5 * h, &tmp, coeffs, &mut k2).ok_or_else(|| pole(t + 0.5 * h, &tmp))?;
        for i in 0..dim {
            tmp[i] = x[i] + 0.5 * h * k2[i];
        }
        sys.rhs(t + 0.5 * h, &tmp, coeffs, &mut k3).ok_or_else(|| pole(t + 0.5 * h, &tmp))?;
        for i in 0..dim {
            tmp[i] = x[i] + h * k3[i];
        }
        sys.rhs(t + h, &tmp, coeffs, &mut k4).ok_or_else(|| pole(t + h, &tmp))?;
        for i in 0..dim {
            x[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        }
        // Quadrature of the coefficient functions on the same grid
        // (Simpson weights match RK4 for state-independent integrands).
        for (a, profile) in coeffs.iter().enumerate() {
            let b1 = profile.at(t);
            let b2 = profile.at(t + 0.5 * h);
            let b4 = profile.at(t + h);
            q[a] += h / 6.0 * (b1 + 4.0 * b2 + b4);
        }
        t += h;
        times.push(t);
        states.push(x.clone());
        integrals.push(q.clone());
    }
    Ok(Trajectory { times, states, coeff_integrals: integrals, step })
}

/// Integrates the time-dependent system described by a closure basis with
/// named coefficients; profiles bind by position.
pub fn integrate_system(
    system: &crate::liesys::TDepSystem,
    profiles: &[CoeffProfile],
    x0: &[f64],
    t_span: (f64, f64),
    step: f64,
) -> Result<Trajectory, NumericError> {
    integrate(system.closure.basis(), profiles, x0, t_span, step)
}

/// A possibly time-dependent invariant
/// `I(t, x) = sum_j scale_j * int_0^t b_(idx_j) + expr(x)`.
#[derive(Debug, Clone)]
pub struct Invariant {
    pub quad_terms: Vec<(usize, f64)>,
    pub expr: Expr,
}

impl Invariant {
    pub fn time_independent(expr: Expr) -> Invariant {
        Invariant { quad_terms: Vec::new(), expr }
    }
}

/// Drift report for one invariant along a trajectory.
#[derive(Debug, Clone)]
pub struct ConstantReport {
    pub max_drift: f64,
    pub initial: f64,
    pub tol: f64,
    pub pass: bool,
}

/// Evaluates the invariant along the trajectory and reports the largest
/// deviation from its initial value.
pub fn check_constant(
    traj: &Trajectory,
    invariant: &Invariant,
    chart_vars: &[String],
    tol: f64,
) -> Result<ConstantReport, NumericError> {
    let compiled = CompiledExpr::new(&invariant.expr);
    let nsyms = invariant.expr.chart().num_symbols();
    let dim = chart_vars.len();
    let mut initial = 0.0;
    let mut max_drift: f64 = 0.0;
    for (i, state) in traj.states.iter().enumerate() {
        let mut values = vec![0.0; nsyms];
        values[..dim].copy_from_slice(&state[..dim]);
        let mut v = compiled.eval(&values).ok_or(NumericError::PoleEncountered {
            t: traj.times[i],
            state: state.clone(),
        })?;
        for &(idx, scale) in &invariant.quad_terms {
            v += scale * traj.coeff_integrals[i][idx];
        }
        if i == 0 {
            initial = v;
        } else {
            max_drift = max_drift.max((v - initial).abs());
        }
    }
    Ok(ConstantReport { max_drift, initial, tol, pass: max_drift < tol })
}

/// Report of a superposition-rule reconstruction.
#[derive(Debug, Clone)]
pub struct SuperpositionReport {
    pub max_deviation: f64,
    pub mixing_constant: f64,
}

/// Integrates three particular solutions of the scalar Riccati equation
/// `dx/dt = b1 + b2 x + b3 x^2` plus an independent fourth, and reports the
/// largest deviation between the fourth and its reconstruction
/// `x = (x1 (x3 - x2) - k x2 (x3 - x1)) / ((x3 - x2) - k (x3 - x1))`.
pub fn riccati_superposition_check(
    profiles: &[CoeffProfile; 3],
    seeds: [f64; 3],
    fourth: f64,
    t_span: (f64, f64),
    step: f64,
) -> Result<SuperpositionReport, NumericError> {
    if seeds[0] == seeds[1] || seeds[0] == seeds[2] || seeds[1] == seeds[2] {
        return Err(NumericError::DegenerateSeeds("seed solutions coincide".into()));
    }
    let chart = crate::chart::Chart::coords(["x"]).expect("line chart");
    let basis = vec![
        VectorField::new(chart.clone(), vec![Expr::one(&chart)]).expect("constant field"),
        VectorField::new(chart.clone(), vec![crate::expr::parse("x", &chart).unwrap()]).unwrap(),
        VectorField::new(chart.clone(), vec![crate::expr::parse("x^2", &chart).unwrap()]).unwrap(),
    ];
    let run = |x0: f64| integrate(&basis, profiles.as_slice(), &[x0], t_span, step);
    let t1 = run(seeds[0])?;
    let t2 = run(seeds[1])?;
    let t3 = run(seeds[2])?;
    let t4 = run(fourth)?;

    // Mixing constant from the initial data.
    let (x1, x2, x3, x) = (seeds[0], seeds[1], seeds[2], fourth);
    let denom = (x2 - x) * (x3 - x1);
    if denom.abs() < 1e-12 {
        return Err(NumericError::DegenerateSeeds("mixing constant is singular".into()));
    }
    let k = (x1 - x) * (x3 - x2) / denom;

    let mut max_dev: f64 = 0.0;
    for i in 0..t4.times.len() {
        let (a, b, c, d) = (t1.states[i][0], t2.states[i][0], t3.states[i][0], t4.states[i][0]);
        let den = (c - b) - k * (c - a);
        if den.abs() < 1e-9 {
            return Err(NumericError::DegenerateSeeds(format!(
                "reconstruction denominator vanishes at t = {}",
                t4.times[i]
            )));
        }
        let rec = (a * (c - b) - k * b * (c - a)) / den;
        max_dev = max_dev.max((rec - d).abs());
    }
    Ok(SuperpositionReport { max_deviation: max_dev, mixing_constant: k })
}

/// Finite-difference report for one partial derivative.
#[derive(Debug, Clone)]
pub struct FdReport {
    pub symbolic: f64,
    pub central_difference: f64,
    pub relative_error: f64,
    pub pass: bool,
}

/// Validates `diff(e, var)` against a central difference at `point` with
/// stencil width `h_fd`; passes when the relative error is below `1e-6`.
pub fn fd_validate(
    e: &Expr,
    var: &str,
    point: &BTreeMap<String, f64>,
    h_fd: f64,
) -> Result<FdReport, NumericError> {
    let consts = BTreeMap::new();
    let sym = e.diff(var)?.eval_f64(point, &consts)?;
    let mut hi = point.clone();
    let mut lo = point.clone();
    let x = *point
        .get(var)
        .ok_or_else(|| crate::error::ExprError::UnboundSymbol(var.to_string()))?;
    hi.insert(var.to_string(), x + h_fd);
    lo.insert(var.to_string(), x - h_fd);
    let fd = (e.eval_f64(&hi, &consts)? - e.eval_f64(&lo, &consts)?) / (2.0 * h_fd);
    let rel = (fd - sym).abs() / sym.abs().max(1.0);
    Ok(FdReport { symbolic: sym, central_difference: fd, relative_error: rel, pass: rel < 1e-6 })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chart::Chart;
    use crate::expr::parse;

    fn front_wheel_basis() -> Vec<VectorField> {
        let c = Chart::coords(["x1", "x2", "x3", "x4"]).unwrap();
        let make = |coeffs: [&str; 4]| {
            VectorField::new(c.clone(), coeffs.iter().map(|s| parse(s, &c).unwrap()).collect())
                .unwrap()
        };
        vec![
            make(["1", "0", "x2", "x3"]),
            make(["0", "1", "0", "0"]),
            make(["0", "0", "-1", "0"]),
            make(["0", "0", "0", "1"]),
        ]
    }

    #[test]
    fn zero_field_constant_trajectory() {
        let c = Chart::coords(["x"]).unwrap();
        let basis = vec![VectorField::zero(&c)];
        let traj =
            integrate(&basis, &[CoeffProfile::Constant(1.0)], &[3.0], (0.0, 1.0), 1e-2).unwrap();
        assert!(traj.states.iter().all(|s| s[0] == 3.0));
    }

    #[test]
    fn front_wheel_triangular_flow() {
        // b1 = 1, b2 = 0 from the origin: x1(t) = t, everything else 0.
        let basis = front_wheel_basis();
        let coeffs = vec![
            CoeffProfile::Constant(1.0),
            CoeffProfile::Constant(0.0),
            CoeffProfile::Constant(0.0),
            CoeffProfile::Constant(0.0),
        ];
        let traj = integrate(&basis, &coeffs, &[0.0; 4], (0.0, 1.0), 1e-3).unwrap();
        let last = traj.states.last().unwrap();
        assert!((last[0] - 1.0).abs() < 1e-10);
        assert!(last[1].abs() < 1e-10 && last[2].abs() < 1e-10 && last[3].abs() < 1e-10);
    }

    #[test]
    fn riccati_tan_flow() {
        // dx/dt = 1 + x^2 from 0 is tan t.
        let c = Chart::coords(["x"]).unwrap();
        let basis = vec![
            VectorField::new(c.clone(), vec![Expr::one(&c)]).unwrap(),
            VectorField::new(c.clone(), vec![parse("x", &c).unwrap()]).unwrap(),
            VectorField::new(c.clone(), vec![parse("x^2", &c).unwrap()]).unwrap(),
        ];
        let coeffs = vec![
            CoeffProfile::Constant(1.0),
            CoeffProfile::Constant(0.0),
            CoeffProfile::Constant(1.0),
        ];
        let traj = integrate(&basis, &coeffs, &[0.0], (0.0, 0.5), 1e-3).unwrap();
        let x_end = traj.states.last().unwrap()[0];
        assert!((x_end - 0.5f64.tan()).abs() < 1e-8);
    }

    #[test]
    fn rk4_order() {
        // Halving the step shrinks the error against a fine reference by at
        // least 12x on a run with genuine truncation error (the tangent
        // flow; polynomial systems are integrated exactly to roundoff).
        let c = Chart::coords(["x"]).unwrap();
        let basis = vec![
            VectorField::new(c.clone(), vec![Expr::one(&c)]).unwrap(),
            VectorField::new(c.clone(), vec![parse("x^2", &c).unwrap()]).unwrap(),
        ];
        let coeffs = vec![CoeffProfile::Constant(1.0), CoeffProfile::Constant(1.0)];
        let reference = integrate(&basis, &coeffs, &[0.0], (0.0, 1.0), 1e-3).unwrap();
        let err = |step: f64| {
            let t = integrate(&basis, &coeffs, &[0.0], (0.0, 1.0), step).unwrap();
            (t.states.last().unwrap()[0] - reference.states.last().unwrap()[0]).abs()
        };
        let e1 = err(2e-2);
        let e2 = err(1e-2);
        assert!(e1 / e2 >= 12.0, "RK4 order check failed: {e1} vs {e2}");
    }

    #[test]
    fn constant_invariant_trivially_constant() {
        let c = Chart::coords(["x"]).unwrap();
        let basis = vec![VectorField::new(c.clone(), vec![Expr::one(&c)]).unwrap()];
        let traj =
            integrate(&basis, &[CoeffProfile::Constant(1.0)], &[0.0], (0.0, 1.0), 1e-2).unwrap();
        let inv = Invariant::time_independent(parse("17", &c).unwrap());
        let rep = check_constant(&traj, &inv, &["x".to_string()], 1e-12).unwrap();
        assert!(rep.pass);
        // int b dt - x is conserved for dx/dt = b(t).
        let inv2 = Invariant { quad_terms: vec![(0, 1.0)], expr: parse("-x", &c).unwrap() };
        let rep2 = check_constant(&traj, &inv2, &["x".to_string()], 1e-9).unwrap();
        assert!(rep2.pass, "drift {}", rep2.max_drift);
    }

    #[test]
    fn riccati_superposition() {
        // Translation flow: the rule reproduces the fourth solution exactly.
        let profiles =
            [CoeffProfile::Constant(1.0), CoeffProfile::Constant(0.0), CoeffProfile::Constant(0.0)];
        let rep =
            riccati_superposition_check(&profiles, [-0.5, 0.0, 0.3], 0.8, (0.0, 1.0), 1e-3).unwrap();
        assert!(rep.max_deviation < 1e-12);
        // Degenerate seeds are rejected.
        let bad = riccati_superposition_check(&profiles, [0.1, 0.1, 0.3], 0.8, (0.0, 1.0), 1e-3);
        assert!(matches!(bad, Err(NumericError::DegenerateSeeds(_))));
        // b = (1, 0, 1): the tangent flow, checked to 1e-6.
        let profiles2 =
            [CoeffProfile::Constant(1.0), CoeffProfile::Constant(0.0), CoeffProfile::Constant(1.0)];
        let rep2 = riccati_superposition_check(
            &profiles2,
            [(-0.5f64).tan(), 0.0, 0.3f64.tan()],
            (-0.2f64).tan(),
            (0.0, 1.0),
            1e-3,
        )
        .unwrap();
        assert!(rep2.max_deviation < 1e-6, "deviation {}", rep2.max_deviation);
    }

    #[test]
    fn fd_validation() {
        let c = Chart::coords(["x"]).unwrap();
        let e = parse("x^2", &c).unwrap();
        let mut p = BTreeMap::new();
        p.insert("x".to_string(), 3.0);
        let rep = fd_validate(&e, "x", &p, 1e-5).unwrap();
        assert!(rep.pass);
        assert!((rep.symbolic - 6.0).abs() < 1e-12);
        // Pole guard near x = 0 for 1/x.
        let pole = parse("1/x", &c).unwrap();
        let mut q = BTreeMap::new();
        q.insert("x".to_string(), 1e-7);
        assert!(matches!(
            fd_validate(&pole, "x", &q, 1e-5),
            Err(NumericError::Expr(crate::error::ExprError::PoleAtPoint))
        ));
    }
}
