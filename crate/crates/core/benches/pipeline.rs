//! End-to-end timings for the pieces the test suites lean on hardest:
//! algebra law sweeps, a full monad law suite, effect inference over a
//! generated corpus, and the compile-and-run evaluation pipeline.

use std::collections::BTreeMap;

use criterion::{criterion_group, criterion_main, BatchSize, Criterion};

use idxeff::gen::{default_signature, Generator};
use idxeff::harness::{check_indexed_monad_laws, default_value_types, Budget};
use idxeff::semantics::instance_for;
use idxeff::{
    check_algebra_laws, eval_program, infer_effect, EffectAlgebra, EffectToken, InstanceKind,
    ProgramInputs,
};

fn bench_algebra_laws(c: &mut Criterion) {
    let alg = EffectAlgebra::powerset([
        EffectToken::Read("r".into()),
        EffectToken::Write("r".into()),
        EffectToken::Read("s".into()),
        EffectToken::Write("s".into()),
    ]);
    c.bench_function("algebra_laws/powerset_4_tokens", |b| {
        b.iter(|| check_algebra_laws(&alg).expect("laws run"))
    });
}

fn bench_monad_law_suite(c: &mut Criterion) {
    let sig = default_signature(InstanceKind::Reader);
    let inst = instance_for(InstanceKind::Reader, &sig);
    let types = default_value_types();
    let budget = Budget::default();
    c.bench_function("monad_laws/reader_full_suite", |b| {
        b.iter(|| check_indexed_monad_laws(&inst, &types, &budget))
    });
}

fn bench_inference(c: &mut Criterion) {
    let mut g = Generator::new(InstanceKind::Memory, 7001);
    let corpus: Vec<_> = (0..64).map(|_| g.gen_program(4).0).collect();
    let sig = g.signature().clone();
    let alg = g.algebra().clone();
    let ctx = BTreeMap::new();
    c.bench_function("infer_effect/memory_corpus_64", |b| {
        b.iter(|| {
            for term in &corpus {
                infer_effect(&sig, &alg, &ctx, term).expect("corpus programs infer");
            }
        })
    });
}

fn bench_eval(c: &mut Criterion) {
    let mut g = Generator::new(InstanceKind::Trace, 7002);
    let corpus: Vec<_> = (0..32).map(|_| g.gen_ground_program(4).0).collect();
    let sig = g.signature().clone();
    c.bench_function("eval_program/trace_corpus_32", |b| {
        b.iter_batched(
            ProgramInputs::default,
            |inputs| {
                for term in &corpus {
                    eval_program(InstanceKind::Trace, &sig, term, &inputs)
                        .expect("corpus programs evaluate");
                }
            },
            BatchSize::SmallInput,
        )
    });
}

criterion_group!(
    benches,
    bench_algebra_laws,
    bench_monad_law_suite,
    bench_inference,
    bench_eval
);
criterion_main!(benches);
