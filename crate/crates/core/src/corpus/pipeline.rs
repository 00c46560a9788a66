//! The per-example verification pipeline: closure, symmetries, form
//! construction, Reeb solving, Hamiltonians, bracket tables, projectability,
//! dissipation, and numeric spot checks.

use std::collections::BTreeMap;
use std::sync::Arc;
use std::time::Instant;

use num::BigRational;

use crate::chart::Chart;
use crate::corpus::doc::parse_form;
use crate::corpus::{
    CheckResult, CheckStatus, Divergence, Document, ExampleReport, NumericSpec,
    TableEntry,
};
use crate::error::CorpusError;
use crate::expr::eval::ExactPoint;

use crate::expr::{parse, Expr};
use crate::exterior::{
    differential, interior, lie_bracket, lie_derivative, DiffForm, KFunction, VecValuedOneForm,
    VectorField,
};
use crate::kcontact::{
    build_kcontact, max_nonintegrable, Distribution, KContact,
};
use crate::liesys::{
    bracket_closure, companion_system, diagonal_prolongation, dual_coframe,
    hamiltonian_bracket_table, is_locally_automorphic, maurer_cartan_check, momentum_invariance,
    projectability_check, LieClosure,
};
use crate::numeric::{check_constant, integrate, CoeffProfile, Invariant};
use crate::rng::SampleRng;

/// Options shared by corpus runs.
#[derive(Debug, Clone)]
pub struct CorpusOptions {
    pub seed: u64,
    /// Tolerance for symbolic-vs-numeric spot checks.
    pub tol_symbolic: f64,
}

impl Default for CorpusOptions {
    fn default() -> Self {
        CorpusOptions { seed: crate::rng::DEFAULT_SEED, tol_symbolic: crate::numeric::TOL_SYMBOLIC }
    }
}

struct Runner {
    name: String,
    checks: Vec<CheckResult>,
    divergences: Vec<Divergence>,
    rng: SampleRng,
    tol_symbolic: f64,
    started: Instant,
}

impl Runner {
    fn pass(&mut self, name: &str, detail: impl Into<String>) {
        if std::env::var_os("KONTACT_TRACE").is_some() {
            eprintln!("TRACE pass {name} [{:?}]", self.started.elapsed());
        }
        self.checks.push(CheckResult { name: name.into(), status: CheckStatus::Pass, detail: detail.into() });
    }

    fn fail(&mut self, name: &str, detail: impl Into<String>) {
        self.checks.push(CheckResult { name: name.into(), status: CheckStatus::Fail, detail: detail.into() });
    }

    fn info(&mut self, name: &str, detail: impl Into<String>) {
        self.checks.push(CheckResult { name: name.into(), status: CheckStatus::Info, detail: detail.into() });
    }

    fn check(&mut self, name: &str, ok: bool, detail: impl Into<String>) {
        if ok {
            self.pass(name, detail);
        } else {
            self.fail(name, detail);
        }
    }

    fn diverge(&mut self, entry: &str, printed: String, recomputed: String) {
        self.divergences.push(Divergence { entry: entry.into(), printed, recomputed });
    }

    fn finish(self, started: Instant) -> ExampleReport {
        let pass = self.checks.iter().all(|c| c.status != CheckStatus::Fail);
        ExampleReport {
            name: self.name,
            pass,
            elapsed_ms: started.elapsed().as_millis(),
            checks: self.checks,
            divergences: self.divergences,
        }
    }
}

fn rational(s: &str) -> Result<BigRational, CorpusError> {
    let (num, den) = match s.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (s.trim(), "1"),
    };
    let n: num::BigInt =
        num.parse().map_err(|_| CorpusError::BadData(format!("bad rational `{s}`")))?;
    let d: num::BigInt =
        den.parse().map_err(|_| CorpusError::BadData(format!("bad rational `{s}`")))?;
    if d == num::BigInt::from(0) {
        return Err(CorpusError::BadData(format!("bad rational `{s}`")));
    }
    Ok(BigRational::new(n, d))
}

fn table_to_matrix(
    table: &[TableEntry],
    names: &[String],
    r: usize,
) -> Result<Vec<Vec<Vec<BigRational>>>, CorpusError> {
    let index = |n: &str| {
        names
            .iter()
            .position(|m| m == n)
            .ok_or_else(|| CorpusError::BadData(format!("unknown basis name `{n}` in table")))
    };
    let mut out = vec![vec![vec![BigRational::from_integer(0.into()); r]; r]; r];
    for (a, b, coeffs) in table {
        let i = index(a)?;
        let j = index(b)?;
        for (c, v) in coeffs {
            let k = index(c)?;
            let v = rational(v)?;
            out[i][j][k] = v.clone();
            out[j][i][k] = -v;
        }
    }
    Ok(out)
}

fn fmt_field(f: &VectorField) -> String {
    let parts: Vec<String> = f.coeffs().iter().map(|e| e.to_string()).collect();
    format!("({})", parts.join(", "))
}

fn fmt_kfunction(f: &KFunction) -> String {
    let parts: Vec<String> = f.components().iter().map(|e| e.to_string()).collect();
    format!("({})", parts.join(", "))
}

fn fmt_form(f: &DiffForm) -> String {
    if f.is_zero() {
        return "0".into();
    }
    let chart = f.chart().clone();
    let parts: Vec<String> = f
        .terms()
        .map(|(idx, c)| {
            let wedge: Vec<&str> =
                idx.iter().map(|&i| chart.vars()[i as usize].as_str()).collect();
            format!("({}) d{}", c, wedge.join("^d"))
        })
        .collect();
    parts.join(" + ")
}

fn parse_field_coeffs(
    chart: &Arc<Chart>,
    coeffs: &[String],
) -> Result<VectorField, CorpusError> {
    let parsed: Vec<Expr> = coeffs
        .iter()
        .map(|s| parse(s, chart))
        .collect::<Result<_, _>>()
        .map_err(|e| CorpusError::BadData(e.to_string()))?;
    VectorField::new(chart.clone(), parsed).map_err(|e| CorpusError::BadData(e.to_string()))
}

/// Runs the full pipeline for a registered example.
pub fn run_example(name: &str, options: &CorpusOptions) -> Result<ExampleReport, CorpusError> {
    let started = Instant::now();
    if name == "jet-prolonged" {
        return run_jet_prolonged(options, started);
    }
    let file = crate::corpus::load(name)?;
    let doc = Document::resolve(file.doc.clone())?;
    let mut runner = Runner {
        name: name.to_string(),
        checks: Vec::new(),
        divergences: Vec::new(),
        rng: SampleRng::new(options.seed),
        tol_symbolic: options.tol_symbolic,
        started,
    };
    let chart = doc.chart.clone();

    // --- Closure -----------------------------------------------------------
    let generators = doc.fields_named(&doc.raw.generators)?;
    let max_dim = file.closure.max_dim.unwrap_or(16);
    let closure = bracket_closure(&generators, max_dim, 16, &mut runner.rng)
        .map_err(|e| CorpusError::Pipeline(format!("closure: {e}")))?;
    runner.check(
        "closure.dim",
        closure.dim() == file.closure.dim,
        format!("computed {} expected {}", closure.dim(), file.closure.dim),
    );
    let basis_names = file.closure.basis.clone();
    if basis_names.len() != closure.dim() {
        return Err(CorpusError::BadData("closure basis name count mismatch".into()));
    }
    // Computed basis elements must match their declared fields; printed
    // variants get diffed instead of asserted.
    for (i, bname) in basis_names.iter().enumerate() {
        if let Some(declared) = doc.fields.get(bname) {
            runner.check(
                &format!("closure.basis.{bname}"),
                &closure.basis()[i] == declared,
                format!("via {}", closure.provenance()[i]),
            );
        }
        if let Some(printed) = file.closure.printed_basis.get(bname) {
            let pf = parse_field_coeffs(&chart, printed)?;
            if pf != closure.basis()[i] {
                runner.diverge(
                    &format!("closure.basis.{bname}"),
                    fmt_field(&pf),
                    fmt_field(&closure.basis()[i]),
                );
            }
        }
    }
    let expected_structure = table_to_matrix(&file.closure.table, &basis_names, closure.dim())?;
    let mut structure_ok = true;
    'outer: for i in 0..closure.dim() {
        for j in 0..closure.dim() {
            for k in 0..closure.dim() {
                if closure.c(i, j, k) != &expected_structure[i][j][k] {
                    structure_ok = false;
                    runner.fail(
                        "closure.table",
                        format!(
                            "c({},{})^{} = {} expected {}",
                            basis_names[i],
                            basis_names[j],
                            basis_names[k],
                            closure.c(i, j, k),
                            expected_structure[i][j][k]
                        ),
                    );
                    break 'outer;
                }
            }
        }
    }
    if structure_ok {
        runner.pass("closure.table", "all structure constants match");
    }
    runner.check("closure.jacobi", closure.jacobi_holds(), "exact Jacobi identity");
    let automorphic = is_locally_automorphic(&closure)
        .map_err(|e| CorpusError::Pipeline(format!("automorphic: {e}")))?;
    runner.check(
        "closure.automorphic",
        automorphic == file.closure.automorphic,
        format!("computed {automorphic}"),
    );
    for extra in &file.closure.extra_commuting {
        let xf = doc.field(extra)?;
        let commutes = closure
            .basis()
            .iter()
            .all(|b| lie_bracket(xf, b).map(|z| z.is_zero()).unwrap_or(false));
        runner.check(&format!("closure.extra.{extra}.commutes"), commutes, "");
        let mut all = closure.basis().to_vec();
        all.push(xf.clone());
        let rows: Vec<Vec<Expr>> = all.iter().map(|f| f.coeffs().to_vec()).collect();
        let rank = crate::linalg::ExprMatrix::from_rows(chart.clone(), rows)
            .rank()
            .map_err(|e| CorpusError::Pipeline(e.to_string()))?
            .rank;
        runner.check(
            &format!("closure.extra.{extra}.spans"),
            rank == chart.dim(),
            format!("rank {rank}"),
        );
    }

    // --- Symmetry frame ------------------------------------------------------
    let mut coframe: Option<Vec<DiffForm>> = None;
    if let Some(sym) = &file.symmetry {
        let frame = doc.fields_named(&sym.frame)?;
        let mut commute_ok = true;
        for y in &frame {
            for x in closure.basis() {
                if !lie_bracket(y, x).map(|z| z.is_zero()).unwrap_or(false) {
                    commute_ok = false;
                }
            }
        }
        runner.check("symmetry.commute", commute_ok, "[Y_i, X_j] = 0 for all pairs");
        for (name, printed) in &sym.printed {
            let pf = parse_field_coeffs(&chart, printed)?;
            let actual = doc.field(name)?;
            if &pf != actual {
                runner.diverge(&format!("symmetry.{name}"), fmt_field(&pf), fmt_field(actual));
            }
        }
        if !sym.table.is_empty() {
            let sym_closure = bracket_closure(&frame, 16, 16, &mut runner.rng)
                .map_err(|e| CorpusError::Pipeline(format!("symmetry closure: {e}")))?;
            let expected = table_to_matrix(&sym.table, &sym.frame, frame.len())?;
            let mut ok = sym_closure.dim() == frame.len();
            if ok {
                'sym: for i in 0..frame.len() {
                    for j in 0..frame.len() {
                        for k in 0..frame.len() {
                            if sym_closure.c(i, j, k) != &expected[i][j][k] {
                                ok = false;
                                break 'sym;
                            }
                        }
                    }
                }
            }
            runner.check("symmetry.table", ok, "frame closure constants");
            if frame.len() == chart.dim() {
                let co = dual_coframe(&frame)
                    .map_err(|e| CorpusError::Pipeline(format!("dual coframe: {e}")))?;
                for (key, spec) in &sym.coframe {
                    let idx: usize = key
                        .parse::<usize>()
                        .map_err(|_| CorpusError::BadData(format!("bad coframe index `{key}`")))?;
                    let expect = parse_form(spec, &chart)?;
                    runner.check(
                        &format!("symmetry.coframe.{key}"),
                        co[idx - 1] == expect,
                        String::new(),
                    );
                }
                let mc = maurer_cartan_check(&co, &sym_closure)
                    .map_err(|e| CorpusError::Pipeline(format!("structure equations: {e}")))?;
                runner.check(
                    "symmetry.maurer_cartan",
                    mc.holds,
                    match mc.failing_index {
                        Some(i) => format!("fails at row {}", i + 1),
                        None => "dUps^i = -1/2 c_jk^i Ups^j ^ Ups^k for all i".into(),
                    },
                );
                if sym.invariance {
                    let mut inv_ok = true;
                    for x in closure.basis() {
                        for u in &co {
                            if !lie_derivative(x, u)
                                .map(|z| z.is_zero())
                                .unwrap_or(false)
                            {
                                inv_ok = false;
                            }
                        }
                    }
                    runner.check("symmetry.invariance", inv_ok, "L_{X_i} Ups^j = 0 for all pairs");
                }
                coframe = Some(co);
            }
        }
    }

    // --- k-contact form -------------------------------------------------------
    let mut kc_opt: Option<KContact> = None;
    let mut eta_opt: Option<VecValuedOneForm> = None;
    if let Some(eta_spec) = &file.eta {
        let mut routes: Vec<(String, VecValuedOneForm)> = Vec::new();
        if !eta_spec.components.is_empty() {
            let comps: Vec<DiffForm> = eta_spec
                .components
                .iter()
                .map(|n| {
                    doc.forms
                        .get(n)
                        .cloned()
                        .ok_or_else(|| CorpusError::BadData(format!("unknown form `{n}`")))
                })
                .collect::<Result<_, _>>()?;
            routes.push((
                "explicit".into(),
                VecValuedOneForm::new(chart.clone(), comps)
                    .map_err(|e| CorpusError::BadData(e.to_string()))?,
            ));
        }
        if let Some(dual) = &eta_spec.dual {
            let frame = doc.fields_named(&dual.frame)?;
            let co = match &coframe {
                Some(co) if dual.frame == file.symmetry.as_ref().map(|s| s.frame.clone()).unwrap_or_default() => {
                    co.clone()
                }
                _ => dual_coframe(&frame)
                    .map_err(|e| CorpusError::Pipeline(format!("dual route: {e}")))?,
            };
            let comps: Vec<DiffForm> = dual.take.iter().map(|&i| co[i - 1].clone()).collect();
            routes.push((
                "dual".into(),
                VecValuedOneForm::new(chart.clone(), comps)
                    .map_err(|e| CorpusError::BadData(e.to_string()))?,
            ));
        }
        if let Some(build) = &eta_spec.build {
            let spanning = doc.fields_named(&build.distribution)?;
            let dist = Distribution::new(chart.clone(), spanning, &runner.rng)
                .map_err(|e| CorpusError::Pipeline(format!("distribution: {e}")))?;
            let syms = doc.fields_named(&build.symmetries)?;
            let (eta, _) = build_kcontact(&dist, &syms)
                .map_err(|e| CorpusError::Pipeline(format!("build route: {e}")))?;
            routes.push(("build".into(), eta));
        }
        if routes.is_empty() {
            return Err(CorpusError::BadData("eta section without any route".into()));
        }
        let eta = routes[0].1.clone();
        for (label, other) in routes.iter().skip(1) {
            runner.check(
                &format!("eta.routes.{label}"),
                other == &eta,
                "all construction routes agree",
            );
        }
        for (i, spec) in eta_spec.expect.iter().enumerate() {
            let expect = parse_form(spec, &chart)?;
            runner.check(
                &format!("eta.component.{}", i + 1),
                eta.component(i) == &expect,
                String::new(),
            );
        }
        for (key, spec) in &eta_spec.printed {
            let idx: usize = key
                .parse::<usize>()
                .map_err(|_| CorpusError::BadData(format!("bad eta index `{key}`")))?;
            let printed = parse_form(spec, &chart)?;
            if eta.component(idx - 1) != &printed {
                runner.diverge(
                    &format!("eta.component.{key}"),
                    fmt_form(&printed),
                    fmt_form(eta.component(idx - 1)),
                );
            }
        }
        let kc = KContact::new(eta.clone())
            .map_err(|e| CorpusError::Pipeline(format!("verify: {e}")))?;
        let rep = kc.report();
        runner.pass(
            "eta.verify",
            format!(
                "k = {}, ker eta rank {}, ker deta rank {}, intersection {}",
                rep.k, rep.rank_ker_eta, rep.rank_ker_deta, rep.rank_intersection
            ),
        );
        for (i, spec) in eta_spec.deta_expect.iter().enumerate() {
            let expect = parse_form(spec, &chart)?;
            runner.check(
                &format!("eta.deta.{}", i + 1),
                kc.deta()[i] == expect,
                String::new(),
            );
        }
        // Reeb duality, commutation, and the kernel's maximal
        // non-integrability are invariants of every verified form.
        let mut duality_ok = true;
        for (a, ra) in kc.reeb().iter().enumerate() {
            for (b, comp) in eta.components().iter().enumerate() {
                let pairing = interior(ra, comp)
                    .map_err(|e| CorpusError::Pipeline(e.to_string()))?
                    .coeff(&[]);
                let expect = if a == b { Expr::one(&chart) } else { Expr::zero(&chart) };
                duality_ok &= pairing == expect;
            }
            for w in kc.deta() {
                duality_ok &= interior(ra, w)
                    .map_err(|e| CorpusError::Pipeline(e.to_string()))?
                    .is_zero();
            }
        }
        runner.check("eta.reeb_duality", duality_ok, "iota_R eta = delta, iota_R deta = 0");
        // Kernel basis: prefer the declared distribution or the untaken
        // frame rows; fall back to a generic null-space basis.
        let kernel = if let Some(build) = &eta_spec.build {
            let spanning = doc.fields_named(&build.distribution)?;
            Distribution::new(chart.clone(), spanning, &runner.rng)
                .map_err(|e| CorpusError::Pipeline(e.to_string()))?
        } else if let Some(dual) = &eta_spec.dual {
            let rest: Vec<String> = dual
                .frame
                .iter()
                .enumerate()
                .filter(|(i, _)| !dual.take.contains(&(i + 1)))
                .map(|(_, n)| n.clone())
                .collect();
            Distribution::new(chart.clone(), doc.fields_named(&rest)?, &runner.rng)
                .map_err(|e| CorpusError::Pipeline(e.to_string()))?
        } else {
            crate::kcontact::eta_kernel_distribution(&kc, &runner.rng)
                .map_err(|e| CorpusError::Pipeline(e.to_string()))?
        };
        let mni = max_nonintegrable(&kernel, Some(kc.eta()))
            .map_err(|e| CorpusError::Pipeline(e.to_string()))?;
        runner.check("eta.kernel_max_nonintegrable", mni, "");
        eta_opt = Some(eta);
        kc_opt = Some(kc);
    }

    // --- Expected Reeb / Hamiltonians / brackets ------------------------------
    let mut hams: Vec<KFunction> = Vec::new();
    if let (Some(kc), Some(exp)) = (&kc_opt, &file.expected) {
        runner.check("expected.k", kc.k() == exp.k, format!("k = {}", kc.k()));
        if !exp.reeb.is_empty() {
            let mut ok = exp.reeb.len() == kc.reeb().len();
            if ok {
                for (r, name) in kc.reeb().iter().zip(&exp.reeb) {
                    ok &= r == doc.field(name)?;
                }
            }
            runner.check("expected.reeb", ok, format!("({})", exp.reeb.join(", ")));
        }
        for (i, x) in closure.basis().iter().enumerate() {
            let h = kc
                .hamiltonian_of(x)
                .map_err(|e| CorpusError::Pipeline(format!("hamiltonian {}: {e}", basis_names[i])))?;
            numeric_spot_check(&mut runner, kc, x, &h, &basis_names[i]);
            if let Some(expect) = exp.hamiltonians.get(&basis_names[i]) {
                let parsed: Vec<Expr> = expect
                    .iter()
                    .map(|s| parse(s, &chart))
                    .collect::<Result<_, _>>()
                    .map_err(|e| CorpusError::BadData(e.to_string()))?;
                let expect_kf = KFunction::new(chart.clone(), parsed)
                    .map_err(|e| CorpusError::BadData(e.to_string()))?;
                runner.check(
                    &format!("expected.hamiltonian.{}", basis_names[i]),
                    h == expect_kf,
                    String::new(),
                );
            }
            if let Some(printed) = exp.printed_hamiltonians.get(&basis_names[i]) {
                let parsed: Vec<Expr> = printed
                    .iter()
                    .map(|s| parse(s, &chart))
                    .collect::<Result<_, _>>()
                    .map_err(|e| CorpusError::BadData(e.to_string()))?;
                let printed_kf = KFunction::new(chart.clone(), parsed)
                    .map_err(|e| CorpusError::BadData(e.to_string()))?;
                if printed_kf != h {
                    runner.diverge(
                        &format!("hamiltonian.{}", basis_names[i]),
                        fmt_kfunction(&printed_kf),
                        fmt_kfunction(&h),
                    );
                } else {
                    runner.info(
                        &format!("expected.hamiltonian.{}", basis_names[i]),
                        "printed display agrees with recomputation",
                    );
                }
            }
            hams.push(h);
        }
        if !exp.brackets.is_empty() {
            let table = hamiltonian_bracket_table(&closure, kc, &hams, &mut runner.rng)
                .map_err(|e| CorpusError::Pipeline(format!("bracket table: {e}")))?;
            let expected = table_to_matrix(&exp.brackets, &basis_names, closure.dim())?;
            let mut ok = true;
            for i in 0..closure.dim() {
                for j in 0..closure.dim() {
                    for k in 0..closure.dim() {
                        ok &= table[i][j][k] == expected[i][j][k];
                    }
                }
            }
            runner.check("expected.brackets", ok, "k-function bracket table");
        }
        if let Some(projectable) = exp.projectable {
            let got = projectability_check(&closure, kc)
                .map_err(|e| CorpusError::Pipeline(format!("projectability: {e}")))?;
            runner.check("expected.projectable", got == projectable, format!("computed {got}"));
        }
    }

    // --- Dissipation checks ----------------------------------------------------
    if !file.dissipated.is_empty() {
        let kc = kc_opt
            .as_ref()
            .ok_or_else(|| CorpusError::BadData("dissipated checks need an eta section".into()))?;
        for spec in &file.dissipated {
            let fi = basis_names
                .iter()
                .position(|n| n == &spec.f)
                .ok_or_else(|| CorpusError::BadData(format!("unknown basis `{}`", spec.f)))?;
            let mut x_h = VectorField::zero(&chart);
            let mut h = KFunction::zero(&chart, kc.k());
            for (name, coeff) in &spec.h {
                let i = basis_names
                    .iter()
                    .position(|n| n == name)
                    .ok_or_else(|| CorpusError::BadData(format!("unknown basis `{name}`")))?;
                let c = parse(coeff, &chart).map_err(|e| CorpusError::BadData(e.to_string()))?;
                x_h = x_h
                    .add(&closure.basis()[i].scale_expr(&c))
                    .map_err(|e| CorpusError::Pipeline(e.to_string()))?;
                h = h
                    .add(&hams[i].scale_expr(&c))
                    .map_err(|e| CorpusError::Pipeline(e.to_string()))?;
            }
            let got = kc
                .is_dissipated(&hams[fi], &h, &x_h, &closure.basis()[fi])
                .map_err(|e| CorpusError::Pipeline(format!("dissipated: {e}")))?;
            runner.check(
                &format!("dissipated.{}", spec.f),
                got == spec.expect,
                format!("computed {got}"),
            );
        }
    }

    // --- Numeric checks ----------------------------------------------------------
    for (n, spec) in file.numeric.iter().enumerate() {
        run_numeric(&mut runner, &doc, &closure, &basis_names, kc_opt.as_ref(), &hams, spec, n)
            .map_err(|e| CorpusError::Pipeline(format!("numeric[{n}]: {e}")))?;
    }

    let _ = eta_opt;
    Ok(runner.finish(started))
}

/// Spot-checks the two sides of the defining Hamiltonian identity
/// numerically at ten random points.
fn numeric_spot_check(
    runner: &mut Runner,
    kc: &KContact,
    x: &VectorField,
    h: &KFunction,
    label: &str,
) {
    let chart = kc.chart().clone();
    let build = || -> Result<(Vec<DiffForm>, Vec<DiffForm>), crate::error::KContactError> {
        let mut lhs = Vec::new();
        let mut rhs = Vec::new();
        for a in 0..kc.k() {
            lhs.push(interior(x, &kc.deta()[a])?);
            let mut r = differential(h.component(a));
            for (b, reeb) in kc.reeb().iter().enumerate() {
                let c = reeb.apply(h.component(a))?;
                if !c.is_zero() {
                    r = r.sub(&kc.eta().component(b).scale_expr(&c))?;
                }
            }
            rhs.push(r);
        }
        Ok((lhs, rhs))
    };
    let (lhs, rhs) = match build() {
        Ok(v) => v,
        Err(e) => {
            runner.fail(&format!("spotcheck.{label}"), e.to_string());
            return;
        }
    };
    let mut max_resid: f64 = 0.0;
    let mut points = 0;
    let mut attempts = 0;
    while points < 10 && attempts < 200 {
        attempts += 1;
        let values: Vec<f64> =
            (0..chart.num_symbols()).map(|_| runner.rng.uniform(-2.0, 2.0)).collect();
        let mut ok = true;
        let mut resid: f64 = 0.0;
        for (l, r) in lhs.iter().zip(&rhs) {
            for i in 0..chart.dim() {
                let idx = [i as u8];
                let lv = l.coeff(&idx).eval_f64_slice(&values);
                let rv = r.coeff(&idx).eval_f64_slice(&values);
                match (lv, rv) {
                    (Ok(a), Ok(b)) => resid = resid.max((a - b).abs()),
                    _ => {
                        ok = false;
                        break;
                    }
                }
            }
            if !ok {
                break;
            }
        }
        if ok {
            points += 1;
            max_resid = max_resid.max(resid);
        }
    }
    runner.check(
        &format!("spotcheck.{label}"),
        points == 10 && max_resid < runner.tol_symbolic,
        format!("max residual {max_resid:.3e} over {points} points"),
    );
}

#[allow(clippy::too_many_arguments)]
fn run_numeric(
    runner: &mut Runner,
    doc: &Document,
    closure: &LieClosure,
    basis_names: &[String],
    kc: Option<&KContact>,
    hams: &[KFunction],
    spec: &NumericSpec,
    index: usize,
) -> Result<(), CorpusError> {
    let chart = doc.chart.clone();
    match spec {
        NumericSpec::Conservation { coeffs, x0, t1, step, tol, quad, expr } => {
            let profiles: Vec<CoeffProfile> = basis_names
                .iter()
                .map(|n| match coeffs.get(n) {
                    Some(c) if c.len() == 1 => CoeffProfile::Constant(c[0]),
                    Some(c) => CoeffProfile::Polynomial(c.clone()),
                    None => CoeffProfile::Constant(0.0),
                })
                .collect();
            let traj = integrate(closure.basis(), &profiles, x0, (0.0, *t1), *step)
                .map_err(|e| CorpusError::Pipeline(e.to_string()))?;
            let quad_terms: Vec<(usize, f64)> = quad
                .iter()
                .map(|(n, s)| {
                    basis_names
                        .iter()
                        .position(|m| m == n)
                        .map(|i| (i, *s))
                        .ok_or_else(|| CorpusError::BadData(format!("unknown coefficient `{n}`")))
                })
                .collect::<Result<_, _>>()?;
            let inv = Invariant {
                quad_terms,
                expr: parse(expr, &chart).map_err(|e| CorpusError::BadData(e.to_string()))?,
            };
            let rep = check_constant(&traj, &inv, chart.vars(), *tol)
                .map_err(|e| CorpusError::Pipeline(e.to_string()))?;
            runner.check(
                &format!("numeric[{index}].conservation"),
                rep.pass,
                format!("max drift {:.3e} (tol {tol:.1e})", rep.max_drift),
            );
        }
        NumericSpec::Superposition { b, seeds, fourth, t1, step, tol } => {
            let profiles = [
                CoeffProfile::Polynomial(b[0].clone()),
                CoeffProfile::Polynomial(b[1].clone()),
                CoeffProfile::Polynomial(b[2].clone()),
            ];
            let rep = crate::numeric::riccati_superposition_check(
                &profiles,
                *seeds,
                *fourth,
                (0.0, *t1),
                *step,
            )
            .map_err(|e| CorpusError::Pipeline(e.to_string()))?;
            runner.check(
                &format!("numeric[{index}].superposition"),
                rep.max_deviation < *tol,
                format!("max deviation {:.3e} (tol {tol:.1e})", rep.max_deviation),
            );
        }
        NumericSpec::Momentum { theta, generators, samples, zero_vars, expect_exact } => {
            let kc = kc.ok_or_else(|| CorpusError::BadData("momentum check needs eta".into()))?;
            let theta: Vec<BigRational> =
                theta.iter().map(|s| rational(s)).collect::<Result<_, _>>()?;
            let gen_fields = doc.fields_named(generators)?;
            let sub_closure = bracket_closure(&gen_fields, 16, 16, &mut runner.rng)
                .map_err(|e| CorpusError::Pipeline(e.to_string()))?;
            let sub_hams: Vec<KFunction> = sub_closure
                .basis()
                .iter()
                .map(|x| kc.hamiltonian_of(x))
                .collect::<Result<_, _>>()
                .map_err(|e| CorpusError::Pipeline(e.to_string()))?;
            let mut points: Vec<ExactPoint> = Vec::with_capacity(*samples);
            for _ in 0..*samples {
                let mut p = ExactPoint::new();
                for v in chart.vars() {
                    let value = if zero_vars.contains(v) {
                        BigRational::from_integer(0.into())
                    } else {
                        runner.rng.small_rational()
                    };
                    p.insert(v.clone(), value);
                }
                points.push(p);
            }
            let rep = momentum_invariance(&sub_closure, kc, &sub_hams, &theta, &points, 1e-9)
                .map_err(|e| CorpusError::Pipeline(e.to_string()))?;
            let ok = !expect_exact || rep.exact_zero;
            runner.check(
                &format!("numeric[{index}].momentum"),
                ok,
                format!(
                    "{} samples, exact_zero = {}, max residual {:.3e}",
                    rep.samples_checked,
                    rep.exact_zero,
                    rep.max_reeb_residual.max(rep.max_tangency_residual)
                ),
            );
            // Perturbed samples must be rejected.
            if let Some(first_zero) = zero_vars.first() {
                let mut bad = points[0].clone();
                bad.insert(first_zero.clone(), rational("1/1000")?);
                let rejected = momentum_invariance(
                    &sub_closure,
                    kc,
                    &sub_hams,
                    &theta,
                    &[bad],
                    1e-9,
                )
                .is_err();
                runner.check(
                    &format!("numeric[{index}].momentum.offset_rejected"),
                    rejected,
                    "perturbed sample off the zero set is rejected",
                );
            }
        }
        NumericSpec::Companion { thetas, expect_max_order, fd, drift_expect } => {
            let kc = kc.ok_or_else(|| CorpusError::BadData("companion check needs eta".into()))?;
            for theta_s in thetas {
                let theta: Vec<BigRational> =
                    theta_s.iter().map(|s| rational(s)).collect::<Result<_, _>>()?;
                let cs = companion_system(closure, kc, hams, &theta, &mut runner.rng)
                    .map_err(|e| CorpusError::Pipeline(e.to_string()))?;
                let ok = cs.nilpotency_order.map(|m| m <= *expect_max_order).unwrap_or(false);
                runner.check(
                    &format!("numeric[{index}].companion.order"),
                    ok,
                    format!("order {:?} (bound {expect_max_order})", cs.nilpotency_order),
                );
                for (name, expect) in drift_expect {
                    let a = basis_names
                        .iter()
                        .position(|n| n == name)
                        .ok_or_else(|| CorpusError::BadData(format!("unknown basis `{name}`")))?;
                    let expected = parse(expect, &cs.coeff_chart)
                        .map_err(|e| CorpusError::BadData(e.to_string()))?;
                    let got = cs.drift[a].clone();
                    runner.check(
                        &format!("numeric[{index}].companion.drift.{name}"),
                        got.as_ref() == Some(&expected),
                        format!("d<h,theta>/dt = {}", match &got {
                            Some(e) => e.to_string(),
                            None => "<non-constant projections>".into(),
                        }),
                    );
                }
                if let Some(fd) = fd {
                    let profiles: Vec<CoeffProfile> =
                        fd.coeffs.iter().map(|&c| CoeffProfile::Constant(c)).collect();
                    let traj = integrate(closure.basis(), &profiles, &fd.x0, (0.0, fd.t1), fd.step)
                        .map_err(|e| CorpusError::Pipeline(e.to_string()))?;
                    let mut worst: f64 = 0.0;
                    for h in hams {
                        let p = h
                            .pairing(&theta)
                            .map_err(|e| CorpusError::Pipeline(e.to_string()))?;
                        let compiled = crate::expr::eval::CompiledExpr::new(&p);
                        let mut series = Vec::new();
                        for (i, state) in traj.states.iter().enumerate() {
                            if i % fd.sample_every != 0 {
                                continue;
                            }
                            let mut values = vec![0.0; chart.num_symbols()];
                            values[..chart.dim()].copy_from_slice(state);
                            series.push(compiled.eval(&values).ok_or_else(|| {
                                CorpusError::Pipeline("pole during sampling".into())
                            })?);
                        }
                        let dt = fd.step * fd.sample_every as f64;
                        for w in series.windows(4) {
                            let d3 = (w[3] - 3.0 * w[2] + 3.0 * w[1] - w[0]) / dt.powi(3);
                            worst = worst.max(d3.abs());
                        }
                    }
                    runner.check(
                        &format!("numeric[{index}].companion.third_differences"),
                        worst < fd.tol,
                        format!("max |d^3 I / dt^3| ~ {worst:.3e} (tol {:.1e})", fd.tol),
                    );
                }
            }
        }
        NumericSpec::FdCheck { field, vars } => {
            let f = doc.field(field)?;
            let mut worst: f64 = 0.0;
            let mut all_pass = true;
            for var in vars {
                for comp in f.coeffs() {
                    if comp.is_zero() {
                        continue;
                    }
                    // Random nonsingular point.
                    let mut report = None;
                    for _ in 0..100 {
                        let mut p = BTreeMap::new();
                        for v in chart.vars() {
                            p.insert(v.clone(), runner.rng.uniform(0.3, 1.7));
                        }
                        match crate::numeric::fd_validate(comp, var, &p, 1e-5) {
                            Ok(r) => {
                                report = Some(r);
                                break;
                            }
                            Err(_) => continue,
                        }
                    }
                    match report {
                        Some(r) => {
                            worst = worst.max(r.relative_error);
                            all_pass &= r.pass;
                        }
                        None => all_pass = false,
                    }
                }
            }
            runner.check(
                &format!("numeric[{index}].fd.{field}"),
                all_pass,
                format!("max relative error {worst:.3e}"),
            );
        }
    }
    Ok(())
}

/// The derived example: the jet-bundle system diagonally prolonged once.
fn run_jet_prolonged(options: &CorpusOptions, started: Instant) -> Result<ExampleReport, CorpusError> {
    let file = crate::corpus::load("jet")?;
    let doc = Document::resolve(file.doc.clone())?;
    let mut runner = Runner {
        name: "jet-prolonged".to_string(),
        checks: Vec::new(),
        divergences: Vec::new(),
        rng: SampleRng::new(options.seed),
        tol_symbolic: options.tol_symbolic,
        started,
    };
    let generators = doc.fields_named(&doc.raw.generators)?;
    let closure = bracket_closure(&generators, 16, 16, &mut runner.rng)
        .map_err(|e| CorpusError::Pipeline(e.to_string()))?;
    let eta = doc.kform.clone().ok_or_else(|| CorpusError::BadData("jet kform missing".into()))?;
    let kc = KContact::new(eta).map_err(|e| CorpusError::Pipeline(e.to_string()))?;
    let prol = diagonal_prolongation(closure.basis(), &kc, 1)
        .map_err(|e| CorpusError::Pipeline(format!("prolongation: {e}")))?;
    runner.check("prolong.dim", prol.chart.dim() == 10, format!("dim {}", prol.chart.dim()));
    runner.check("prolong.k", prol.kc.k() == 4, format!("k = {}", prol.kc.k()));
    runner.pass("prolong.verify", "prolonged form is 4-contact".to_string());
    runner.check(
        "prolong.reeb_count",
        prol.kc.reeb().len() == 4,
        format!("{} Reeb fields", prol.kc.reeb().len()),
    );
    let prol_closure = bracket_closure(&prol.fields, 16, 16, &mut runner.rng)
        .map_err(|e| CorpusError::Pipeline(e.to_string()))?;
    let mut same = prol_closure.dim() == closure.dim();
    if same {
        'cmp: for i in 0..closure.dim() {
            for j in 0..closure.dim() {
                for k in 0..closure.dim() {
                    if closure.c(i, j, k) != prol_closure.c(i, j, k) {
                        same = false;
                        break 'cmp;
                    }
                }
            }
        }
    }
    runner.check("prolong.structure_constants", same, "base constants preserved");
    Ok(runner.finish(started))
}
