//! The substitution lemma at corpus scale: a β-redex `(λx:σ. body) v` with a
//! closed value argument denotes the same element — same index, same carrier
//! point — as its contraction `body[v/x]`. Equality on function carriers is
//! extensional, so this really compares reader environments and memory
//! stores pointwise.

use std::collections::BTreeMap;

use idxeff::gen::Generator;
use idxeff::semantics::{denote_effect, instance_for};
use idxeff::value::sem_eq_default;
use idxeff::{infer_effect, InstanceKind};

const PAIRS_PER_INSTANCE: usize = 200;

fn check_kind(kind: InstanceKind, seed: u64) {
    let mut g = Generator::new(kind, seed);
    let inst = instance_for(kind, g.signature());
    let empty_ctx = BTreeMap::new();
    for i in 0..PAIRS_PER_INSTANCE {
        let (redex, reduct) = g.gen_beta_pair(3);
        let jr = infer_effect(g.signature(), g.algebra(), &empty_ctx, &redex)
            .unwrap_or_else(|e| panic!("#{i} redex: {e}\n{redex}"));
        let jc = infer_effect(g.signature(), g.algebra(), &empty_ctx, &reduct)
            .unwrap_or_else(|e| panic!("#{i} reduct: {e}\n{reduct}"));
        assert_eq!(
            jr.effect, jc.effect,
            "#{i}: redex at {} but reduct at {}\n{redex}\n~~>\n{reduct}",
            jr.effect, jc.effect
        );
        assert_eq!(jr.ty, jc.ty, "#{i}\n{redex}\n~~>\n{reduct}");

        let dr = denote_effect(&inst, g.signature(), &jr)
            .unwrap_or_else(|e| panic!("#{i}: {e}\n{redex}"));
        let dc = denote_effect(&inst, g.signature(), &jc)
            .unwrap_or_else(|e| panic!("#{i}: {e}\n{reduct}"));
        assert_eq!(dr.index, dc.index, "#{i}\n{redex}\n~~>\n{reduct}");

        let vr = dr.run(&BTreeMap::new()).unwrap_or_else(|e| panic!("#{i}: {e}\n{redex}"));
        let vc = dc.run(&BTreeMap::new()).unwrap_or_else(|e| panic!("#{i}: {e}\n{reduct}"));
        let equal = sem_eq_default(&vr, &vc)
            .unwrap_or_else(|e| panic!("#{i}: equality failed: {e}\n{redex}"));
        assert!(equal, "#{i}: denotations differ\n{redex}\n~~>\n{reduct}");
    }
}

#[test]
fn beta_reduction_preserves_reader_denotations() {
    check_kind(InstanceKind::Reader, 201);
}

#[test]
fn beta_reduction_preserves_memory_denotations() {
    check_kind(InstanceKind::Memory, 202);
}

#[test]
fn beta_reduction_preserves_trace_denotations() {
    check_kind(InstanceKind::Trace, 203);
}

#[test]
fn beta_reduction_preserves_identity_denotations() {
    check_kind(InstanceKind::Identity, 204);
}
