//! Subcommand implementations.

use std::collections::BTreeMap;

use num::BigRational;
use serde_json::{json, Value};

use kontact_core::corpus::{self, CorpusOptions, Document};
use kontact_core::exterior::{DiffForm, KFunction, VectorField};
use kontact_core::expr::parse;
use kontact_core::kcontact::{build_kcontact, verify_kcontact, Distribution, KContact};
use kontact_core::liesys::{
    bracket_closure, closure_hamiltonians, companion_system, diagonal_prolongation,
    hamiltonian_bracket_table, is_locally_automorphic, LieClosure,
};
use kontact_core::numeric::{check_constant, fd_validate, integrate, CoeffProfile, Invariant};
use kontact_core::rng::{SampleRng, DEFAULT_SEED};

use crate::report::Report;
use crate::{Cli, Command, CorpusAction};

pub fn dispatch(cli: &Cli) -> Result<bool, String> {
    let seed = parse_seed(cli.seed.as_deref())?;
    match &cli.command {
        Command::CheckKcontact { file } => check_kcontact(cli, file),
        Command::Closure { file, generators, max_dim, max_depth } => {
            closure_cmd(cli, file, generators.as_deref(), *max_dim, *max_depth, seed)
        }
        Command::Hamiltonians { file, fields } => hamiltonians_cmd(cli, file, fields.as_deref()),
        Command::BracketTable { file } => bracket_table_cmd(cli, file, seed),
        Command::BuildEta { file, distribution, symmetries } => {
            build_eta_cmd(cli, file, distribution, symmetries, seed)
        }
        Command::Prolong { file, copies } => prolong_cmd(cli, file, *copies, seed),
        Command::Companion { file, theta } => companion_cmd(cli, file, theta, seed),
        Command::Integrate { file, x0, t, step, check_constant, .. } => {
            let coeffs = [
                coeff_flag(&cli.command, 1),
                coeff_flag(&cli.command, 2),
                coeff_flag(&cli.command, 3),
                coeff_flag(&cli.command, 4),
                coeff_flag(&cli.command, 5),
                coeff_flag(&cli.command, 6),
                coeff_flag(&cli.command, 7),
                coeff_flag(&cli.command, 8),
            ];
            integrate_cmd(cli, file, &coeffs, x0.as_deref(), *t, *step, *check_constant)
        }
        Command::Corpus { action } => corpus_cmd(cli, action, seed),
        Command::FdCheck { file, field, vars } => fd_check_cmd(cli, file, field, vars.as_deref(), seed),
    }
}

fn coeff_flag(cmd: &Command, i: usize) -> Option<String> {
    if let Command::Integrate { b1, b2, b3, b4, b5, b6, b7, b8, .. } = cmd {
        [b1, b2, b3, b4, b5, b6, b7, b8][i - 1].clone()
    } else {
        None
    }
}

fn parse_seed(s: Option<&str>) -> Result<u64, String> {
    match s {
        None => Ok(DEFAULT_SEED),
        Some(s) => {
            let s = s.trim();
            let parsed = if let Some(hex) = s.strip_prefix("0x").or_else(|| s.strip_prefix("0X")) {
                u64::from_str_radix(hex, 16)
            } else {
                s.parse()
            };
            parsed.map_err(|_| format!("bad seed `{s}`"))
        }
    }
}

fn load_doc(path: &str) -> Result<Document, String> {
    let text = std::fs::read_to_string(path).map_err(|e| format!("{path}: {e}"))?;
    Document::parse_str(&text).map_err(|e| format!("{path}: {e}"))
}

fn split_names(s: &str) -> Vec<String> {
    s.split(',').map(|p| p.trim().to_string()).filter(|p| !p.is_empty()).collect()
}

fn rational_arg(s: &str) -> Result<BigRational, String> {
    let (num, den) = match s.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (s.trim(), "1"),
    };
    let n: num::BigInt = num.parse().map_err(|_| format!("bad rational `{s}`"))?;
    let d: num::BigInt = den.parse().map_err(|_| format!("bad rational `{s}`"))?;
    if d == 0.into() {
        return Err(format!("bad rational `{s}`"));
    }
    Ok(BigRational::new(n, d))
}

fn field_strings(f: &VectorField) -> Value {
    Value::Array(f.coeffs().iter().map(|e| Value::String(e.to_string())).collect())
}

fn kfunction_strings(f: &KFunction) -> Value {
    Value::Array(f.components().iter().map(|e| Value::String(e.to_string())).collect())
}

fn form_strings(f: &DiffForm) -> Value {
    let mut map = serde_json::Map::new();
    for (idx, c) in f.terms() {
        let key = idx.iter().map(|i| (i + 1).to_string()).collect::<Vec<_>>().join(",");
        map.insert(key, Value::String(c.to_string()));
    }
    json!({"degree": f.degree(), "terms": Value::Object(map)})
}

fn require_kform(doc: &Document) -> Result<KContact, String> {
    let eta = doc.kform.clone().ok_or("document declares no kform")?;
    KContact::new(eta).map_err(|e| e.to_string())
}

fn generators(doc: &Document, flag: Option<&str>) -> Result<Vec<VectorField>, String> {
    let names = match flag {
        Some(s) => split_names(s),
        None => doc.raw.generators.clone(),
    };
    if names.is_empty() {
        return Err("no generators given (document has none, pass --generators)".into());
    }
    doc.fields_named(&names).map_err(|e| e.to_string())
}

fn emit(report: Report, cli: &Cli) -> Result<bool, String> {
    let pass = report.all_pass();
    report.render(cli.json);
    Ok(pass)
}

fn check_kcontact(cli: &Cli, file: &str) -> Result<bool, String> {
    let doc = load_doc(file)?;
    let eta = doc.kform.clone().ok_or("document declares no kform")?;
    let rep = verify_kcontact(&eta).map_err(|e| e.to_string())?;
    let mut report = Report::new("check-kcontact");
    report.fact("k", rep.k);
    report.fact("dim", rep.dim);
    report.fact("rank_ker_eta", rep.rank_ker_eta);
    report.fact("rank_ker_deta", rep.rank_ker_deta);
    report.fact("rank_intersection", rep.rank_intersection);
    report.fact("failure_reason", format!("{:?}", rep.failure_reason));
    if let Some(reeb) = &rep.reeb {
        report.fact("reeb", Value::Array(reeb.iter().map(field_strings).collect()));
    }
    if !rep.locus.is_empty() {
        report.fact("pivot_locus", Value::Array(rep.locus.iter().cloned().map(Value::String).collect()));
    }
    report.check("kcontact", rep.is_kcontact, format!("{:?}", rep.failure_reason));
    emit(report, cli)
}

fn closure_with(
    doc: &Document,
    flag: Option<&str>,
    max_dim: usize,
    max_depth: usize,
    seed: u64,
) -> Result<Result<LieClosure, String>, String> {
    let gens = generators(doc, flag)?;
    let mut rng = SampleRng::new(seed);
    match bracket_closure(&gens, max_dim, max_depth, &mut rng) {
        Ok(c) => Ok(Ok(c)),
        Err(kontact_core::LieError::NotClosed { word }) => Ok(Err(word)),
        Err(e) => Err(e.to_string()),
    }
}

fn closure_facts(report: &mut Report, closure: &LieClosure) {
    report.fact("dim", closure.dim());
    let basis: Vec<Value> = closure
        .basis()
        .iter()
        .zip(closure.provenance())
        .map(|(f, word)| json!({"word": word, "coeffs": field_strings(f)}))
        .collect();
    report.fact("basis", Value::Array(basis));
    let mut table = Vec::new();
    for i in 0..closure.dim() {
        for j in (i + 1)..closure.dim() {
            let coeffs = closure.bracket_coeffs(i, j);
            if coeffs.iter().all(num::Zero::is_zero) {
                continue;
            }
            let mut entry = serde_json::Map::new();
            for (k, c) in coeffs.iter().enumerate() {
                if !num::Zero::is_zero(c) {
                    entry.insert(format!("{}", k + 1), Value::String(c.to_string()));
                }
            }
            table.push(json!([i + 1, j + 1, Value::Object(entry)]));
        }
    }
    report.fact("table", Value::Array(table));
}

fn closure_cmd(
    cli: &Cli,
    file: &str,
    gens: Option<&str>,
    max_dim: usize,
    max_depth: usize,
    seed: u64,
) -> Result<bool, String> {
    let doc = load_doc(file)?;
    let mut report = Report::new("closure");
    match closure_with(&doc, gens, max_dim, max_depth, seed)? {
        Ok(closure) => {
            closure_facts(&mut report, &closure);
            let auto = is_locally_automorphic(&closure).map_err(|e| e.to_string())?;
            report.fact("automorphic", auto);
            report.check("closed", true, format!("dimension {}", closure.dim()));
        }
        Err(word) => {
            report.check("closed", false, format!("budget exhausted at {word}"));
        }
    }
    emit(report, cli)
}

fn hamiltonians_cmd(cli: &Cli, file: &str, fields: Option<&str>) -> Result<bool, String> {
    let doc = load_doc(file)?;
    let kc = require_kform(&doc)?;
    let names = match fields {
        Some(s) => split_names(s),
        None => doc.raw.generators.clone(),
    };
    if names.is_empty() {
        return Err("no fields given (pass --fields or declare generators)".into());
    }
    let mut report = Report::new("hamiltonians");
    let mut hmap = BTreeMap::new();
    for name in &names {
        let f = doc.field(name).map_err(|e| e.to_string())?;
        let check = kc.hamiltonian_check(f).map_err(|e| e.to_string())?;
        hmap.insert(name.clone(), kfunction_strings(&check.h));
        report.check(
            &format!("hamiltonian.{name}"),
            check.is_hamiltonian,
            if check.is_hamiltonian { "residual one-forms vanish" } else { "nonzero residuals" },
        );
    }
    report.fact_map("hamiltonians", hmap);
    emit(report, cli)
}

fn bracket_table_cmd(cli: &Cli, file: &str, seed: u64) -> Result<bool, String> {
    let doc = load_doc(file)?;
    let kc = require_kform(&doc)?;
    let mut report = Report::new("bracket-table");
    let closure = match closure_with(&doc, None, 16, 16, seed)? {
        Ok(c) => c,
        Err(word) => {
            report.check("closed", false, format!("budget exhausted at {word}"));
            return emit(report, cli);
        }
    };
    closure_facts(&mut report, &closure);
    let hams = closure_hamiltonians(&closure, &kc).map_err(|e| e.to_string())?;
    let mut hmap = BTreeMap::new();
    for (i, h) in hams.iter().enumerate() {
        hmap.insert(format!("{}", i + 1), kfunction_strings(h));
    }
    report.fact_map("hamiltonians", hmap);
    let mut rng = SampleRng::new(seed);
    let table = hamiltonian_bracket_table(&closure, &kc, &hams, &mut rng).map_err(|e| e.to_string())?;
    let mut entries = Vec::new();
    for i in 0..closure.dim() {
        for j in (i + 1)..closure.dim() {
            if table[i][j].iter().all(num::Zero::is_zero) {
                continue;
            }
            let mut entry = serde_json::Map::new();
            for (k, c) in table[i][j].iter().enumerate() {
                if !num::Zero::is_zero(c) {
                    entry.insert(format!("{}", k + 1), Value::String(c.to_string()));
                }
            }
            entries.push(json!([i + 1, j + 1, Value::Object(entry)]));
        }
    }
    report.fact("brackets", Value::Array(entries));
    report.check("bracket_table", true, "matches negated field constants");
    emit(report, cli)
}

fn build_eta_cmd(
    cli: &Cli,
    file: &str,
    distribution: &str,
    symmetries: &str,
    seed: u64,
) -> Result<bool, String> {
    let doc = load_doc(file)?;
    let rng = SampleRng::new(seed);
    let spanning = doc.fields_named(&split_names(distribution)).map_err(|e| e.to_string())?;
    let syms = doc.fields_named(&split_names(symmetries)).map_err(|e| e.to_string())?;
    let dist = Distribution::new(doc.chart.clone(), spanning, &rng).map_err(|e| e.to_string())?;
    let mut report = Report::new("build-eta");
    report.fact("distribution_rank", dist.rank());
    match build_kcontact(&dist, &syms) {
        Ok((eta, kc)) => {
            report.fact(
                "eta",
                Value::Array(eta.components().iter().map(form_strings).collect()),
            );
            report.fact(
                "reeb",
                Value::Array(kc.reeb().iter().map(field_strings).collect()),
            );
            report.check("built", true, format!("k = {}", kc.k()));
        }
        Err(e) => report.check("built", false, e.to_string()),
    }
    emit(report, cli)
}

fn prolong_cmd(cli: &Cli, file: &str, copies: usize, seed: u64) -> Result<bool, String> {
    let doc = load_doc(file)?;
    let kc = require_kform(&doc)?;
    let gens = generators(&doc, None)?;
    let _ = seed;
    let prol = diagonal_prolongation(&gens, &kc, copies).map_err(|e| e.to_string())?;
    let mut report = Report::new("prolong");
    report.fact("copies", prol.copies);
    report.fact("dim", prol.chart.dim());
    report.fact("k", prol.kc.k());
    // Emit the prolonged system as a loadable document.
    let mut fields = serde_json::Map::new();
    for (i, f) in prol.fields.iter().enumerate() {
        fields.insert(format!("X{}", i + 1), field_strings(f));
    }
    let mut forms = serde_json::Map::new();
    let mut kform = Vec::new();
    for (a, comp) in prol.eta.components().iter().enumerate() {
        let name = format!("eta{}", a + 1);
        forms.insert(name.clone(), form_strings(comp));
        kform.push(Value::String(name));
    }
    report.fact(
        "document",
        json!({
            "schema": 1,
            "chart": prol.chart.vars(),
            "constants": prol.chart.consts(),
            "fields": Value::Object(fields),
            "forms": Value::Object(forms),
            "kform": Value::Array(kform),
            "generators": (1..=prol.fields.len()).map(|i| format!("X{i}")).collect::<Vec<_>>(),
        }),
    );
    report.check("verify", prol.kc.report().is_kcontact, format!("k = {}", prol.kc.k()));
    emit(report, cli)
}

fn companion_cmd(cli: &Cli, file: &str, theta: &str, seed: u64) -> Result<bool, String> {
    let doc = load_doc(file)?;
    let kc = require_kform(&doc)?;
    let mut report = Report::new("companion");
    let closure = match closure_with(&doc, None, 16, 16, seed)? {
        Ok(c) => c,
        Err(word) => {
            report.check("closed", false, format!("budget exhausted at {word}"));
            return emit(report, cli);
        }
    };
    let hams = closure_hamiltonians(&closure, &kc).map_err(|e| e.to_string())?;
    let theta: Vec<BigRational> =
        split_names(theta).iter().map(|s| rational_arg(s)).collect::<Result<_, _>>()?;
    if theta.len() != kc.k() {
        return Err(format!("theta needs {} components", kc.k()));
    }
    let mut rng = SampleRng::new(seed);
    match companion_system(&closure, &kc, &hams, &theta, &mut rng) {
        Ok(cs) => {
            let matrix: Vec<Value> = cs
                .matrix
                .iter()
                .map(|row| Value::Array(row.iter().map(|e| Value::String(e.to_string())).collect()))
                .collect();
            report.fact("matrix", Value::Array(matrix));
            let derivation: Vec<Value> = cs
                .derivation
                .iter()
                .map(|row| Value::Array(row.iter().map(|e| Value::String(e.to_string())).collect()))
                .collect();
            report.fact("derivation", Value::Array(derivation));
            report.fact(
                "nilpotency_order",
                cs.nilpotency_order.map(|m| json!(m)).unwrap_or(Value::Null),
            );
            let drifts: Vec<Value> = cs
                .drift
                .iter()
                .map(|d| d.as_ref().map(|e| Value::String(e.to_string())).unwrap_or(Value::Null))
                .collect();
            report.fact("drift", Value::Array(drifts));
            report.check("companion", true, "coefficient system assembled");
        }
        Err(e) => report.check("companion", false, e.to_string()),
    }
    emit(report, cli)
}

fn parse_profile(s: &str) -> Result<CoeffProfile, String> {
    if let Some(rest) = s.strip_prefix("poly:") {
        let coeffs: Vec<f64> = rest
            .split(',')
            .map(|p| p.trim().parse().map_err(|_| format!("bad profile `{s}`")))
            .collect::<Result<_, _>>()?;
        return Ok(CoeffProfile::Polynomial(coeffs));
    }
    s.parse::<f64>().map(CoeffProfile::Constant).map_err(|_| format!("bad coefficient `{s}`"))
}

#[allow(clippy::too_many_arguments)]
fn integrate_cmd(
    cli: &Cli,
    file: &str,
    coeff_flags: &[Option<String>; 8],
    x0: Option<&str>,
    t: f64,
    step: f64,
    do_check: bool,
) -> Result<bool, String> {
    let doc = load_doc(file)?;
    let gens = generators(&doc, None)?;
    let coeff_names: Vec<String> = if doc.raw.coeffs.len() >= gens.len() {
        doc.raw.coeffs[..gens.len()].to_vec()
    } else {
        (1..=gens.len()).map(|i| format!("b{i}")).collect()
    };
    let mut profiles = Vec::with_capacity(gens.len());
    for i in 0..gens.len() {
        let profile = match coeff_flags.get(i).and_then(|o| o.as_deref()) {
            Some(s) => parse_profile(s)?,
            None => CoeffProfile::Constant(0.0),
        };
        profiles.push(profile);
    }
    let x0: Vec<f64> = match x0 {
        Some(s) => s
            .split(',')
            .map(|p| p.trim().parse().map_err(|_| format!("bad x0 entry `{p}`")))
            .collect::<Result<_, _>>()?,
        None => vec![0.0; doc.chart.dim()],
    };
    if x0.len() != doc.chart.dim() {
        return Err(format!("x0 needs {} entries", doc.chart.dim()));
    }
    if t <= 0.0 || step <= 0.0 {
        return Err("t and step must be positive".into());
    }
    let mut report = Report::new("integrate");
    let traj = match integrate(&gens, &profiles, &x0, (0.0, t), step) {
        Ok(tr) => tr,
        Err(e) => {
            report.check("integration", false, e.to_string());
            return emit(report, cli);
        }
    };
    report.fact("steps", traj.times.len() - 1);
    report.fact(
        "final_state",
        Value::Array(
            traj.states.last().unwrap().iter().map(|v| json!(v)).collect(),
        ),
    );
    report.check("integration", true, format!("{} steps", traj.times.len() - 1));
    if do_check {
        let task = doc
            .raw
            .tasks
            .iter()
            .find(|t| t.get("type").and_then(Value::as_str) == Some("conservation"))
            .ok_or("document declares no conservation task")?;
        let expr_s = task
            .get("expr")
            .and_then(Value::as_str)
            .ok_or("conservation task without `expr`")?;
        let tol = cli
            .tol
            .or_else(|| task.get("tol").and_then(Value::as_f64))
            .unwrap_or(kontact_core::numeric::TOL_CONSERVATION);
        let mut quad_terms = Vec::new();
        if let Some(entries) = task.get("quad").and_then(Value::as_array) {
            for e in entries {
                let pair = e.as_array().ok_or("bad quad entry")?;
                let name = pair
                    .first()
                    .and_then(Value::as_str)
                    .ok_or("bad quad entry")?;
                let scale = pair.get(1).and_then(Value::as_f64).unwrap_or(1.0);
                let idx = coeff_names
                    .iter()
                    .position(|n| n == name)
                    .ok_or_else(|| format!("unknown coefficient `{name}` in quad"))?;
                quad_terms.push((idx, scale));
            }
        }
        let inv = Invariant {
            quad_terms,
            expr: parse(expr_s, &doc.chart).map_err(|e| e.to_string())?,
        };
        let rep = check_constant(&traj, &inv, doc.chart.vars(), tol).map_err(|e| e.to_string())?;
        report.check(
            "constant",
            rep.pass,
            format!("max drift {:.3e} (tol {:.1e})", rep.max_drift, tol),
        );
    }
    emit(report, cli)
}

fn corpus_cmd(cli: &Cli, action: &CorpusAction, seed: u64) -> Result<bool, String> {
    match action {
        CorpusAction::List => {
            let mut report = Report::new("corpus-list");
            report.fact(
                "examples",
                Value::Array(
                    corpus::example_names().iter().map(|n| Value::String(n.to_string())).collect(),
                ),
            );
            emit(report, cli)
        }
        CorpusAction::Run { name, all } => {
            let options = CorpusOptions {
                seed,
                tol_symbolic: cli.tol.unwrap_or(kontact_core::numeric::TOL_SYMBOLIC),
            };
            let names: Vec<String> = if *all {
                corpus::example_names().iter().map(|s| s.to_string()).collect()
            } else {
                vec![name.clone().ok_or("corpus run needs a name or --all")?]
            };
            let mut results: Vec<(String, corpus::ExampleReport)> = if names.len() > 1 {
                // Fan the independent examples out to a small worker pool;
                // assembly below is order-stable by example name.
                std::thread::scope(|scope| {
                    let handles: Vec<_> = names
                        .iter()
                        .map(|n| {
                            let options = options.clone();
                            let n = n.clone();
                            scope.spawn(move || {
                                let r = corpus::run_example(&n, &options);
                                (n, r)
                            })
                        })
                        .collect();
                    handles
                        .into_iter()
                        .map(|h| h.join().expect("worker panicked"))
                        .collect::<Vec<_>>()
                })
                .into_iter()
                .map(|(n, r)| r.map(|rep| (n, rep)))
                .collect::<Result<_, _>>()
                .map_err(|e| e.to_string())?
            } else {
                let n = names[0].clone();
                let rep = corpus::run_example(&n, &options).map_err(|e| e.to_string())?;
                vec![(n, rep)]
            };
            results.sort_by(|a, b| a.0.cmp(&b.0));

            let mut report = Report::new("corpus-run");
            for (name, rep) in &results {
                for c in &rep.checks {
                    let pass = c.status != corpus::CheckStatus::Fail;
                    report.check(&format!("{name}.{}", c.name), pass, c.detail.clone());
                }
                for d in &rep.divergences {
                    report.fact(
                        &format!("{name}.divergence.{}", d.entry),
                        json!({"printed": d.printed, "recomputed": d.recomputed}),
                    );
                }
                report.fact(&format!("{name}.pass"), rep.pass);
            }
            emit(report, cli)
        }
    }
}

fn fd_check_cmd(
    cli: &Cli,
    file: &str,
    field: &str,
    vars: Option<&str>,
    seed: u64,
) -> Result<bool, String> {
    let doc = load_doc(file)?;
    let f = doc.field(field).map_err(|e| e.to_string())?;
    let vars: Vec<String> = match vars {
        Some(s) => split_names(s),
        None => doc.chart.vars().to_vec(),
    };
    let mut rng = SampleRng::new(seed);
    let mut report = Report::new("fd-check");
    let mut worst: f64 = 0.0;
    let mut all = true;
    for var in &vars {
        if doc.chart.var_index(var).is_none() {
            return Err(format!("`{var}` is not a chart variable"));
        }
        for (i, comp) in f.coeffs().iter().enumerate() {
            if comp.is_zero() {
                continue;
            }
            let mut result = None;
            for _ in 0..100 {
                let mut p = BTreeMap::new();
                for v in doc.chart.vars() {
                    p.insert(v.clone(), rng.uniform(0.3, 1.7));
                }
                if let Ok(r) = fd_validate(comp, var, &p, 1e-5) {
                    result = Some(r);
                    break;
                }
            }
            match result {
                Some(r) => {
                    worst = worst.max(r.relative_error);
                    all &= r.pass;
                    report.check(
                        &format!("fd.{field}[{}]/d{var}", i + 1),
                        r.pass,
                        format!("relative error {:.3e}", r.relative_error),
                    );
                }
                None => {
                    all = false;
                    report.check(
                        &format!("fd.{field}[{}]/d{var}", i + 1),
                        false,
                        "no nonsingular sample point found",
                    );
                }
            }
        }
    }
    report.fact("max_relative_error", worst);
    let _ = all;
    emit(report, cli)
}
