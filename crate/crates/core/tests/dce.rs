//! Dead-code elimination, observed rather than asserted: the coeffect
//! denotation of a dead `let` never invokes the bound computation. Every
//! binding carries an evaluation counter keyed `name@line:col`; a dead root
//! binding must stay at zero through a full run, a live one must fire
//! exactly once.

use idxeff::gen::Generator;
use idxeff::{eval_program, InstanceKind, ProgramInputs};

const DEAD_PROGRAMS: usize = 120;
const LIVE_PROGRAMS: usize = 60;

#[test]
fn dead_root_bindings_are_never_evaluated() {
    let mut g = Generator::new(InstanceKind::Identity, 401);
    for i in 0..DEAD_PROGRAMS {
        let (term, key) = g.gen_let_program(3, false);
        let report =
            eval_program(InstanceKind::Identity, g.signature(), &term, &ProgramInputs::default())
                .unwrap_or_else(|e| panic!("#{i}: {e}\n{term}"));
        let live = report
            .liveness
            .get(&key)
            .unwrap_or_else(|| panic!("#{i}: no liveness entry for {key}\n{term}"));
        assert!(!*live, "#{i}: {key} should be dead\n{term}");
        assert_eq!(
            report.counters.get(&key),
            Some(&0),
            "#{i}: dead binding {key} was evaluated\n{term}"
        );
    }
}

#[test]
fn live_root_bindings_are_evaluated_exactly_once() {
    let mut g = Generator::new(InstanceKind::Identity, 402);
    for i in 0..LIVE_PROGRAMS {
        let (term, key) = g.gen_let_program(3, true);
        let report =
            eval_program(InstanceKind::Identity, g.signature(), &term, &ProgramInputs::default())
                .unwrap_or_else(|e| panic!("#{i}: {e}\n{term}"));
        let live = report
            .liveness
            .get(&key)
            .unwrap_or_else(|| panic!("#{i}: no liveness entry for {key}\n{term}"));
        assert!(*live, "#{i}: {key} should be live\n{term}");
        assert_eq!(
            report.counters.get(&key),
            Some(&1),
            "#{i}: live root binding {key} should fire exactly once\n{term}"
        );
    }
}
