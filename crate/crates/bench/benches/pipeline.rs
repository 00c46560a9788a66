use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};

use kontact_bench::{document, generator_fields, structure};
use kontact_core::kcontact::verify_kcontact;
use kontact_core::liesys::{bracket_closure, diagonal_prolongation, dual_coframe};
use kontact_core::numeric::{integrate, CoeffProfile};
use kontact_core::rng::SampleRng;

fn closure_schwarz(c: &mut Criterion) {
    let doc = document("schwarz");
    let gens = doc.fields_named(&doc.raw.generators).unwrap();
    c.bench_function("bracket_closure schwarz (3 gens -> dim 6)", |b| {
        b.iter(|| {
            let mut rng = SampleRng::new(0xC0FFEE);
            bracket_closure(black_box(&gens), 16, 16, &mut rng).unwrap()
        })
    });
}

fn coframe_schwarz(c: &mut Criterion) {
    let doc = document("schwarz");
    let frame = doc
        .fields_named(&["Y1".into(), "Y2".into(), "Y3".into(), "Y4".into(), "Y5".into(), "Y6".into()])
        .unwrap();
    c.bench_function("dual_coframe schwarz (6x6 rational frame)", |b| {
        b.iter(|| dual_coframe(black_box(&frame)).unwrap())
    });
}

fn verify_prolonged_jet(c: &mut Criterion) {
    let doc = document("jet");
    let kc = structure(&doc);
    let fields = generator_fields(&doc);
    let prolonged = diagonal_prolongation(&fields, &kc, 1).unwrap();
    c.bench_function("verify_kcontact prolonged jet (k=4, dim 10)", |b| {
        b.iter(|| verify_kcontact(black_box(prolonged.kc.eta())).unwrap())
    });
}

fn rk4_frontwheel(c: &mut Criterion) {
    let doc = document("frontwheel");
    let basis = generator_fields(&doc);
    let coeffs = vec![
        CoeffProfile::Constant(1.0),
        CoeffProfile::Polynomial(vec![0.0, 0.0, 1.0]),
    ];
    c.bench_function("rk4 frontwheel (1000 steps)", |b| {
        b.iter(|| integrate(black_box(&basis), &coeffs, &[0.0; 4], (0.0, 1.0), 1e-3).unwrap())
    });
}

criterion_group! {
    name = benches;
    config = Criterion::default().sample_size(10);
    targets = closure_schwarz, coframe_schwarz, verify_prolonged_jet, rk4_frontwheel
}
criterion_main!(benches);
