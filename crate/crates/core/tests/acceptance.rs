//! Acceptance suite: one test per shipped criterion, each printing a
//! PASS/FAIL line. Run with `cargo test --test acceptance -- --nocapture`
//! to see the lines; any failure fails the corresponding test.

use kontact_core::corpus::{run_example, CheckStatus, CorpusOptions, ExampleReport};

fn run(name: &str) -> ExampleReport {
    let report = run_example(name, &CorpusOptions::default())
        .unwrap_or_else(|e| panic!("example `{name}` aborted: {e}"));
    assert!(
        report.elapsed_ms < 60_000,
        "`{name}` exceeded the 60 s budget ({} ms)",
        report.elapsed_ms
    );
    report
}

/// Asserts that every check whose name starts with one of the prefixes
/// passed, and that at least one such check ran per prefix.
fn require(report: &ExampleReport, prefixes: &[&str]) {
    for prefix in prefixes {
        let matching: Vec<_> =
            report.checks.iter().filter(|c| c.name.starts_with(prefix)).collect();
        assert!(!matching.is_empty(), "[{}] no check matches `{prefix}`", report.name);
        for c in &matching {
            assert!(
                c.status != CheckStatus::Fail,
                "[{}] check `{}` failed: {}",
                report.name,
                c.name,
                c.detail
            );
        }
    }
}

fn verdict(n: usize, label: &str, pass: bool) {
    println!("ACCEPTANCE {n} ({label}): {}", if pass { "PASS" } else { "FAIL" });
    assert!(pass, "acceptance criterion {n} ({label}) failed");
}

#[test]
fn acceptance_1_control_system() {
    let report = run("control2");
    require(
        &report,
        &[
            "closure.table",
            "eta.routes",
            "eta.component.1",
            "eta.component.2",
            "expected.reeb",
            "expected.hamiltonian.X1",
            "expected.hamiltonian.X2",
            "expected.hamiltonian.X3",
            "expected.hamiltonian.X4",
            "expected.hamiltonian.X5",
        ],
    );
    verdict(1, "control system closure, build route, Reeb, Hamiltonians", report.pass);
}

#[test]
fn acceptance_2_front_wheel() {
    let report = run("frontwheel");
    require(
        &report,
        &[
            "eta.component.1",
            "eta.component.2",
            "expected.brackets",
            "numeric[0].conservation",
            "numeric[1].conservation",
            "numeric[2].conservation",
        ],
    );
    verdict(2, "front-wheel construction, bracket table, conserved quadrature", report.pass);
}

#[test]
fn acceptance_3_isotropic_oscillator() {
    let report = run("isotropic");
    require(
        &report,
        &["expected.reeb", "expected.brackets", "numeric[0].conservation"],
    );
    verdict(3, "isotropic oscillator Reeb pair, brackets, conserved invariant", report.pass);
}

#[test]
fn acceptance_4_jet_bundle_system() {
    let report = run("jet");
    require(
        &report,
        &["eta.verify", "expected.brackets", "numeric[0].momentum"],
    );
    // The invariant-level-set residuals must vanish exactly.
    let momentum = report
        .checks
        .iter()
        .find(|c| c.name == "numeric[0].momentum")
        .expect("momentum check present");
    assert!(momentum.detail.contains("exact_zero = true"), "{}", momentum.detail);
    verdict(4, "jet-bundle verification, brackets, momentum level set", report.pass);
}

#[test]
fn acceptance_5_complex_schwarz() {
    let report = run("schwarz");
    require(
        &report,
        &[
            "closure.dim",
            "closure.table",
            "symmetry.maurer_cartan",
            "expected.hamiltonian.X2",
            "expected.hamiltonian.X3",
            "expected.hamiltonian.X4",
            "expected.hamiltonian.X5",
            "spotcheck.X1",
            "spotcheck.X6",
        ],
    );
    // The first and last rows are reported against the printed displays
    // rather than asserted; the recomputed h1 diverges from the print.
    assert!(
        report.divergences.iter().any(|d| d.entry == "hamiltonian.X1"),
        "expected a recorded print divergence for the first Hamiltonian row"
    );
    verdict(5, "complex Schwarz closure, structure equations, Hamiltonian table", report.pass);
}

#[test]
fn acceptance_6_brockett_family() {
    let b3 = run("brockett3");
    require(
        &b3,
        &[
            "closure.table",
            "eta.component",
            "eta.deta",
            "expected.hamiltonian.X1",
            "expected.hamiltonian.X2",
            "expected.brackets",
        ],
    );
    let gb = run("gbrockett");
    require(&gb, &["closure.table", "eta.verify", "eta.component", "expected.brackets"]);
    // Nilpotency of the control family: order <= 3 symbolically and via
    // third finite differences along a constant-coefficient run.
    let c2 = run("control2");
    require(
        &c2,
        &["numeric[0].companion.order", "numeric[0].companion.third_differences"],
    );
    verdict(6, "Brockett systems and third-order constants of motion", b3.pass && gb.pass && c2.pass);
}

#[test]
fn acceptance_7_diagonal_prolongation() {
    let report = run("jet-prolonged");
    require(
        &report,
        &["prolong.dim", "prolong.k", "prolong.verify", "prolong.structure_constants"],
    );
    verdict(7, "diagonal prolongation to a 4-contact form on 10 variables", report.pass);
}

#[test]
fn acceptance_8_riccati_superposition() {
    let report = run("riccati");
    require(&report, &["closure.table", "numeric[0].superposition", "numeric[1].superposition"]);
    verdict(8, "Riccati closure and superposition-rule reconstruction", report.pass);
}

#[test]
fn acceptance_9_property_suites_and_verdicts() {
    // Seeded 200-case fuzz of the three core identities, self-contained.
    use kontact_core::chart::Chart;
    use kontact_core::expr::Expr;
    use kontact_core::exterior::{
        ext_deriv, interior, lie_bracket, lie_derivative, DiffForm, VectorField,
    };
    use kontact_core::rng::SampleRng;

    let chart = Chart::coords(["x", "y", "z"]).unwrap();
    let mut rng = SampleRng::new(0xC0FFEE);
    let rand_poly = |rng: &mut SampleRng| {
        let monos = ["1", "x", "y", "z", "x^2", "x*y", "y*z"];
        let mut acc = Expr::zero(&chart);
        for m in monos {
            let k = rng.small_int() % 3;
            if k != 0 {
                acc = acc.add(
                    &kontact_core::expr::parse(m, &chart)
                        .unwrap()
                        .scale(&num::BigRational::from_integer(k.into())),
                );
            }
        }
        acc
    };
    for _ in 0..200 {
        let f = VectorField::new(
            chart.clone(),
            (0..3).map(|_| rand_poly(&mut rng)).collect(),
        )
        .unwrap();
        let g = VectorField::new(
            chart.clone(),
            (0..3).map(|_| rand_poly(&mut rng)).collect(),
        )
        .unwrap();
        let h = VectorField::new(
            chart.clone(),
            (0..3).map(|_| rand_poly(&mut rng)).collect(),
        )
        .unwrap();
        // Jacobi.
        let jac = lie_bracket(&lie_bracket(&f, &g).unwrap(), &h)
            .unwrap()
            .add(&lie_bracket(&lie_bracket(&g, &h).unwrap(), &f).unwrap())
            .unwrap()
            .add(&lie_bracket(&lie_bracket(&h, &f).unwrap(), &g).unwrap())
            .unwrap();
        assert!(jac.is_zero(), "Jacobi identity failed");
        // d^2 = 0.
        let omega = DiffForm::from_terms(
            &chart,
            1,
            (0..3).map(|i| (vec![i], rand_poly(&mut rng))),
        )
        .unwrap();
        assert!(ext_deriv(&ext_deriv(&omega)).is_zero(), "d^2 != 0");
        // Cartan commutator identity.
        let two = ext_deriv(&omega);
        let lhs = interior(&lie_bracket(&f, &g).unwrap(), &two).unwrap();
        let rhs = lie_derivative(&f, &interior(&g, &two).unwrap())
            .unwrap()
            .sub(&interior(&g, &lie_derivative(&f, &two).unwrap()).unwrap())
            .unwrap();
        assert_eq!(lhs, rhs, "Cartan commutator identity failed");
    }

    // Reeb duality and commutation hold in every corpus run, and the
    // projectability verdicts match: eta_c yes, eta'_c no.
    let mut all = true;
    for name in ["control2", "control3", "isotropic", "jet", "frontwheel", "brockett3", "gbrockett", "schwarz"] {
        let report = run(name);
        require(&report, &["eta.reeb_duality"]);
        let proj = report
            .checks
            .iter()
            .find(|c| c.name == "expected.projectable")
            .unwrap_or_else(|| panic!("[{name}] projectability check missing"));
        assert!(proj.status == CheckStatus::Pass, "[{name}] projectability verdict mismatch");
        all &= report.pass;
    }
    verdict(9, "fuzz identities, Reeb duality, projectability verdicts", all);
}
