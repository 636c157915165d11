//! A direct-style reference interpreter, independent of the indexed
//! machinery: a plain environment-passing evaluator that threads one
//! global mutable store and appends to one trace, left to right. It is
//! the semantics every imperative programmer would write down, and the
//! denotational pipeline is required to agree with it on closed programs.
//!
//! Nothing here touches indices, carriers, `η`/`μ`, or inference — that
//! independence is the point of using it as an oracle.

use std::collections::BTreeMap;

use crate::calculus::{Term, TermNode};
use crate::value::{Scalar, SemValue};

/// Runtime values of the direct interpreter.
#[derive(Debug, Clone)]
pub enum OracleVal {
    Scalar(Scalar),
    Pair(Box<OracleVal>, Box<OracleVal>),
    Closure {
        param: String,
        body: Term,
        env: Vec<(String, OracleVal)>,
    },
}

impl OracleVal {
    /// First-order values translate to semantic values; closures do not.
    pub fn to_sem(&self) -> Option<SemValue> {
        match self {
            OracleVal::Scalar(s) => Some(SemValue::from_scalar(s)),
            OracleVal::Pair(a, b) => Some(SemValue::pair(a.to_sem()?, b.to_sem()?)),
            OracleVal::Closure { .. } => None,
        }
    }
}

/// Everything one direct run produces.
#[derive(Debug, Clone)]
pub struct OracleOutcome {
    pub value: OracleVal,
    /// Regions written at least once, with their last-written value.
    pub writes: BTreeMap<String, Scalar>,
    pub trace: Vec<(String, Scalar)>,
    /// The store after the run (initial store overridden by writes).
    pub final_store: BTreeMap<String, Scalar>,
}

struct World {
    params: BTreeMap<String, Scalar>,
    store: BTreeMap<String, Scalar>,
    writes: BTreeMap<String, Scalar>,
    trace: Vec<(String, Scalar)>,
}

/// Runs a closed program directly: `ask` looks up `params`, `read`/`write`
/// hit the threaded store, `out` appends to the trace. Evaluation order is
/// left to right and call by value, with `if` running exactly one branch.
pub fn oracle_eval_program(
    term: &Term,
    params: &BTreeMap<String, Scalar>,
    store: &BTreeMap<String, Scalar>,
) -> Result<OracleOutcome, String> {
    let mut world = World {
        params: params.clone(),
        store: store.clone(),
        writes: BTreeMap::new(),
        trace: Vec::new(),
    };
    let value = eval(term, &Vec::new(), &mut world)?;
    Ok(OracleOutcome {
        value,
        writes: world.writes,
        trace: world.trace,
        final_store: world.store,
    })
}

fn lookup(env: &[(String, OracleVal)], name: &str) -> Option<OracleVal> {
    env.iter()
        .rev()
        .find(|(n, _)| n == name)
        .map(|(_, v)| v.clone())
}

fn eval(
    term: &Term,
    env: &Vec<(String, OracleVal)>,
    world: &mut World,
) -> Result<OracleVal, String> {
    match &term.node {
        TermNode::Var(x) => {
            lookup(env, x).ok_or_else(|| format!("unbound variable `{x}`"))
        }
        TermNode::Const(s) => Ok(OracleVal::Scalar(s.clone())),
        TermNode::Lam(x, _, body) => Ok(OracleVal::Closure {
            param: x.clone(),
            body: (**body).clone(),
            env: env.clone(),
        }),
        TermNode::App(fun, arg) => {
            let f = eval(fun, env, world)?;
            let a = eval(arg, env, world)?;
            match f {
                OracleVal::Closure { param, body, env: closed } => {
                    let mut inner = closed;
                    inner.push((param, a));
                    eval(&body, &inner, world)
                }
                other => Err(format!("applied a non-function: {other:?}")),
            }
        }
        TermNode::Let(x, bound, body) => {
            let v = eval(bound, env, world)?;
            let mut inner = env.clone();
            inner.push((x.clone(), v));
            eval(body, &inner, world)
        }
        TermNode::Pair(a, b) => {
            let va = eval(a, env, world)?;
            let vb = eval(b, env, world)?;
            Ok(OracleVal::Pair(Box::new(va), Box::new(vb)))
        }
        TermNode::Fst(p) => match eval(p, env, world)? {
            OracleVal::Pair(a, _) => Ok(*a),
            other => Err(format!("fst of a non-pair: {other:?}")),
        },
        TermNode::Snd(p) => match eval(p, env, world)? {
            OracleVal::Pair(_, b) => Ok(*b),
            other => Err(format!("snd of a non-pair: {other:?}")),
        },
        TermNode::If(c, t, e) => match eval(c, env, world)? {
            OracleVal::Scalar(Scalar::Bool(true)) => eval(t, env, world),
            OracleVal::Scalar(Scalar::Bool(false)) => eval(e, env, world),
            other => Err(format!("if on a non-boolean: {other:?}")),
        },
        TermNode::Ask(p) => world
            .params
            .get(p)
            .cloned()
            .map(OracleVal::Scalar)
            .ok_or_else(|| format!("no value supplied for parameter `{p}`")),
        TermNode::Read(r) => world
            .store
            .get(r)
            .cloned()
            .map(OracleVal::Scalar)
            .ok_or_else(|| format!("read of uninitialized region `{r}`")),
        TermNode::Write(r, e) => {
            let v = eval(e, env, world)?;
            match v {
                OracleVal::Scalar(s) => {
                    world.store.insert(r.clone(), s.clone());
                    world.writes.insert(r.clone(), s);
                    Ok(OracleVal::Scalar(Scalar::Unit))
                }
                other => Err(format!("write of a non-scalar: {other:?}")),
            }
        }
        TermNode::Out(t, e) => {
            let v = eval(e, env, world)?;
            match v {
                OracleVal::Scalar(s) => {
                    world.trace.push((t.clone(), s));
                    Ok(OracleVal::Scalar(Scalar::Unit))
                }
                other => Err(format!("out of a non-scalar: {other:?}")),
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::calculus::parse;

    fn run(src: &str, store: &[(&str, Scalar)]) -> OracleOutcome {
        let (_, term) = parse(src).unwrap();
        let store = store
            .iter()
            .map(|(r, s)| (r.to_string(), s.clone()))
            .collect();
        oracle_eval_program(&term, &BTreeMap::new(), &store).unwrap()
    }

    #[test]
    fn later_write_wins_and_threads_into_reads() {
        let out = run(
            "region r : int4; let a = write r 1 in let b = write r 2 in read r",
            &[("r", Scalar::int_mod(0, 4))],
        );
        assert!(matches!(out.value, OracleVal::Scalar(Scalar::IntMod(2, 4))));
        assert_eq!(out.writes["r"], Scalar::int_mod(2, 4));
        assert_eq!(out.final_store["r"], Scalar::int_mod(2, 4));
    }

    #[test]
    fn if_runs_exactly_one_branch() {
        let out = run(
            "region r : int4; region s : int4; \
             if true then write r 1 else write s 2",
            &[("r", Scalar::int_mod(0, 4)), ("s", Scalar::int_mod(0, 4))],
        );
        assert!(out.writes.contains_key("r"));
        assert!(!out.writes.contains_key("s"));
    }

    #[test]
    fn trace_appends_left_to_right() {
        let out = run(
            "tag a : int4; tag b : bool; (out a 3, out b false)",
            &[],
        );
        assert_eq!(
            out.trace,
            vec![
                ("a".to_string(), Scalar::int_mod(3, 4)),
                ("b".to_string(), Scalar::Bool(false)),
            ]
        );
    }
}
