//! Coherence between the static systems and the denotational semantics, at
//! corpus scale: for every generated program the index assembled by the
//! denotation equals the index the type-and-effect (or coeffect) system
//! inferred. The denotation computes its index from the semantic structure
//! alone — η at the unit, μ through the algebra's product, joins at `if` —
//! so agreement is a theorem being checked, not a value being copied.

use std::collections::BTreeMap;

use idxeff::coeffects::{infer_coeffect, CoCtx};
use idxeff::gen::Generator;
use idxeff::semantics::{denote_coeffect, denote_effect, instance_for};
use idxeff::{make_partiality_instance, InstanceKind};

const PROGRAMS_PER_INSTANCE: usize = 200;

fn check_kind(kind: InstanceKind, seed: u64) {
    let mut g = Generator::new(kind, seed);
    let inst = instance_for(kind, g.signature());
    for i in 0..PROGRAMS_PER_INSTANCE {
        let (term, j) = g.gen_program(4);
        let den = denote_effect(&inst, g.signature(), &j)
            .unwrap_or_else(|e| panic!("{kind:?} #{i}: {e}\n{term}"));
        assert_eq!(
            den.index, j.effect,
            "{kind:?} #{i}: denotation landed at {} but inference said {}\n{term}",
            den.index, j.effect
        );
        // The compiled denotation must also run: closed programs denote
        // total elements of their carrier.
        den.run(&BTreeMap::new())
            .unwrap_or_else(|e| panic!("{kind:?} #{i}: {e}\n{term}"));
    }
}

#[test]
fn reader_denotation_index_matches_inference() {
    check_kind(InstanceKind::Reader, 101);
}

#[test]
fn memory_denotation_index_matches_inference() {
    check_kind(InstanceKind::Memory, 102);
}

#[test]
fn trace_denotation_index_matches_inference() {
    check_kind(InstanceKind::Trace, 103);
}

#[test]
fn identity_denotation_index_matches_inference() {
    check_kind(InstanceKind::Identity, 104);
}

#[test]
fn coeffect_denotation_index_matches_inference() {
    // The pure fragment, checked against the partiality comonad: the
    // liveness demand the analysis infers is the index the context
    // denotation is built at.
    let mut g = Generator::new(InstanceKind::Identity, 105);
    let inst = make_partiality_instance();
    let mut checked = 0;
    for _ in 0..PROGRAMS_PER_INSTANCE {
        let (term, _) = g.gen_program(4);
        let j = infer_coeffect(g.signature(), &CoCtx::new(), &term)
            .unwrap_or_else(|e| panic!("{e}\n{term}"));
        let den = denote_coeffect(&inst, g.signature(), &j)
            .unwrap_or_else(|e| panic!("{e}\n{term}"));
        assert_eq!(
            den.index, j.demand,
            "demand {} but denotation at {}\n{term}",
            j.demand, den.index
        );
        checked += 1;
    }
    assert_eq!(checked, PROGRAMS_PER_INSTANCE);
}
