//! Seeded generation of well-typed programs.
//!
//! The integration tests need corpora, not hand-picked examples: hundreds of
//! programs whose inferred index must coincide with the denotation index,
//! β-redex/reduct pairs whose denotations must agree, closed memory and trace
//! programs replayed against the reference interpreter, and `let`-bindings
//! whose liveness drives dead-code elimination. Everything here is driven by
//! a `ChaCha8` stream, so a corpus is reproducible from its seed alone.
//!
//! Generation is type-directed but effect-free in spirit: the generator picks
//! a structure, and the effect index falls out of inference. Where a rule
//! needs the type of a subterm it already built (`let`, `if`, `app` on a
//! context variable), it simply runs inference on that subterm — terms are
//! small, inference is linear, and reusing the checker keeps the generator
//! honest about the type system instead of shadowing it.

use std::collections::BTreeMap;

use rand::prelude::*;
use rand_chacha::ChaCha8Rng;

use crate::calculus::{ObjType, Signature, Term, TermNode};
use crate::coeffects::{infer_coeffect, let_key};
use crate::effects::{default_algebra, infer_effect, EffectJudgment, InstanceKind};
use crate::value::{BaseTy, Scalar};

// ============================================================================
// Fixed signatures
// ============================================================================

/// The signature each generated corpus runs against: two declared names per
/// instance kind, one `int4`-valued and one `bool`-valued, so both scalar
/// bases show up in effect indices.
pub fn default_signature(kind: InstanceKind) -> Signature {
    let mut sig = Signature::default();
    match kind {
        InstanceKind::Reader => {
            sig.params.insert("p".to_string(), BaseTy::IntMod(4));
            sig.params.insert("q".to_string(), BaseTy::Bool);
        }
        InstanceKind::Memory => {
            sig.regions.insert("r".to_string(), BaseTy::IntMod(4));
            sig.regions.insert("s".to_string(), BaseTy::Bool);
        }
        InstanceKind::Trace => {
            sig.tags.insert("a".to_string(), BaseTy::IntMod(4));
            sig.tags.insert("b".to_string(), BaseTy::Bool);
        }
        InstanceKind::Identity => {}
    }
    sig
}

// ============================================================================
// Substitution
// ============================================================================

/// Capture-avoiding substitution of a closed term for a free variable,
/// `term[value/name]`. The replacement must be closed (the generator only
/// substitutes closed values), so binders never capture anything; a binder
/// that shadows `name` simply stops the walk.
pub fn subst(term: &Term, name: &str, value: &Term) -> Term {
    let node = match &term.node {
        TermNode::Var(y) if y == name => return value.clone(),
        TermNode::Var(y) => TermNode::Var(y.clone()),
        TermNode::Const(s) => TermNode::Const(s.clone()),
        TermNode::Lam(y, ann, body) if y == name => {
            TermNode::Lam(y.clone(), ann.clone(), body.clone())
        }
        TermNode::Lam(y, ann, body) => TermNode::Lam(
            y.clone(),
            ann.clone(),
            Box::new(subst(body, name, value)),
        ),
        TermNode::App(f, a) => TermNode::App(
            Box::new(subst(f, name, value)),
            Box::new(subst(a, name, value)),
        ),
        TermNode::Let(y, bound, body) if y == name => TermNode::Let(
            y.clone(),
            Box::new(subst(bound, name, value)),
            body.clone(),
        ),
        TermNode::Let(y, bound, body) => TermNode::Let(
            y.clone(),
            Box::new(subst(bound, name, value)),
            Box::new(subst(body, name, value)),
        ),
        TermNode::Pair(a, b) => TermNode::Pair(
            Box::new(subst(a, name, value)),
            Box::new(subst(b, name, value)),
        ),
        TermNode::Fst(e) => TermNode::Fst(Box::new(subst(e, name, value))),
        TermNode::Snd(e) => TermNode::Snd(Box::new(subst(e, name, value))),
        TermNode::If(c, t, e) => TermNode::If(
            Box::new(subst(c, name, value)),
            Box::new(subst(t, name, value)),
            Box::new(subst(e, name, value)),
        ),
        TermNode::Ask(p) => TermNode::Ask(p.clone()),
        TermNode::Read(r) => TermNode::Read(r.clone()),
        TermNode::Write(r, e) => {
            TermNode::Write(r.clone(), Box::new(subst(e, name, value)))
        }
        TermNode::Out(t, e) => {
            TermNode::Out(t.clone(), Box::new(subst(e, name, value)))
        }
    };
    Term::at(node, term.pos)
}

/// Whether `name` occurs free in `term`.
pub fn mentions(term: &Term, name: &str) -> bool {
    match &term.node {
        TermNode::Var(y) => y == name,
        TermNode::Const(_) | TermNode::Ask(_) | TermNode::Read(_) => false,
        TermNode::Lam(y, _, body) => y != name && mentions(body, name),
        TermNode::Let(y, bound, body) => {
            mentions(bound, name) || (y != name && mentions(body, name))
        }
        TermNode::App(a, b) | TermNode::Pair(a, b) => {
            mentions(a, name) || mentions(b, name)
        }
        TermNode::Fst(e)
        | TermNode::Snd(e)
        | TermNode::Write(_, e)
        | TermNode::Out(_, e) => mentions(e, name),
        TermNode::If(c, t, e) => {
            mentions(c, name) || mentions(t, name) || mentions(e, name)
        }
    }
}

// ============================================================================
// The generator
// ============================================================================

type Ctx = Vec<(String, ObjType)>;

fn ctx_map(ctx: &Ctx) -> BTreeMap<String, ObjType> {
    ctx.iter().cloned().collect()
}

/// A reproducible source of well-typed programs over one instance kind and
/// its [`default_signature`].
pub struct Generator {
    kind: InstanceKind,
    sig: Signature,
    alg: crate::algebra::EffectAlgebra,
    rng: ChaCha8Rng,
    fresh: usize,
}

impl Generator {
    pub fn new(kind: InstanceKind, seed: u64) -> Generator {
        let sig = default_signature(kind);
        let alg = default_algebra(kind, &sig);
        Generator {
            kind,
            sig,
            alg,
            rng: ChaCha8Rng::seed_from_u64(seed),
            fresh: 0,
        }
    }

    pub fn signature(&self) -> &Signature {
        &self.sig
    }

    pub fn algebra(&self) -> &crate::algebra::EffectAlgebra {
        &self.alg
    }

    fn fresh_name(&mut self) -> String {
        self.fresh += 1;
        format!("x{}", self.fresh)
    }

    fn infer(&self, ctx: &Ctx, term: &Term) -> Option<EffectJudgment> {
        infer_effect(&self.sig, &self.alg, &ctx_map(ctx), term).ok()
    }

    // ------------------------------------------------------------------
    // Small pieces
    // ------------------------------------------------------------------

    fn scalar(&mut self, base: BaseTy) -> Scalar {
        match base {
            BaseTy::Unit => Scalar::Unit,
            BaseTy::Bool => Scalar::Bool(self.rng.gen()),
            BaseTy::IntMod(m) => Scalar::IntMod(self.rng.gen_range(0..m), m),
        }
    }

    fn random_base(&mut self) -> BaseTy {
        match self.rng.gen_range(0..10) {
            0 => BaseTy::Unit,
            1..=5 => BaseTy::IntMod(4),
            _ => BaseTy::Bool,
        }
    }

    /// A type suitable as a λ domain: mostly bases, occasionally a product
    /// or a pure function type. Arrow domains always carry an empty latent
    /// set so the generator can always produce a matching argument.
    fn dom_type(&mut self) -> ObjType {
        match self.rng.gen_range(0..10) {
            0..=6 => base_obj(self.random_base()),
            7 | 8 => ObjType::prod(
                base_obj(self.random_base()),
                base_obj(self.random_base()),
            ),
            _ => ObjType::fun(
                base_obj(self.random_base()),
                Vec::new(),
                base_obj(self.random_base()),
            ),
        }
    }

    /// A term of the given base type: a literal, a matching context
    /// variable, or (when `effectful`) a matching `ask`/`read` primitive.
    fn base_atom(&mut self, ctx: &Ctx, base: BaseTy, effectful: bool) -> Term {
        let want = base_obj(base);
        let mut options: Vec<Term> = vec![Term::lit(self.scalar(base))];
        for (x, ty) in ctx {
            if *ty == want {
                options.push(Term::var(x));
            }
        }
        if effectful {
            match self.kind {
                InstanceKind::Reader => {
                    for (p, b) in &self.sig.params {
                        if *b == base {
                            options.push(Term::ask(p));
                        }
                    }
                }
                InstanceKind::Memory => {
                    for (r, b) in &self.sig.regions {
                        if *b == base {
                            options.push(Term::read(r));
                        }
                    }
                }
                InstanceKind::Trace | InstanceKind::Identity => {}
            }
        }
        let i = self.rng.gen_range(0..options.len());
        options.swap_remove(i)
    }

    /// A closed-over-`ctx`, *pure* term of exactly the requested type, used
    /// where a production must hit a type on the nose (function arguments,
    /// `if` branches). Returns `None` for arrow types with a non-empty
    /// latent index — a pure λ cannot inhabit those.
    fn value_of(&mut self, ctx: &Ctx, ty: &ObjType, depth: usize) -> Option<Term> {
        // A context variable of exactly this type is always an option.
        let vars: Vec<Term> = ctx
            .iter()
            .filter(|(_, t)| t == ty)
            .map(|(x, _)| Term::var(x))
            .collect();
        if !vars.is_empty() && self.rng.gen_range(0..4) == 0 {
            let i = self.rng.gen_range(0..vars.len());
            return Some(vars[i].clone());
        }
        match ty {
            ObjType::Unit => Some(Term::lit(Scalar::Unit)),
            ObjType::Bool => Some(Term::lit(Scalar::Bool(self.rng.gen()))),
            ObjType::IntMod(m) => Some(Term::lit(self.scalar(BaseTy::IntMod(*m)))),
            ObjType::Prod(a, b) => {
                let left = self.value_of(ctx, a, depth.saturating_sub(1))?;
                let right = self.value_of(ctx, b, depth.saturating_sub(1))?;
                Some(Term::pair(left, right))
            }
            ObjType::Fun(dom, latent, cod) => {
                if !latent.is_empty() {
                    return vars.first().cloned();
                }
                let x = self.fresh_name();
                let mut inner = ctx.clone();
                inner.push((x.clone(), (**dom).clone()));
                let body = self.value_of(&inner, cod, depth.saturating_sub(1))?;
                Some(Term::lam(&x, (**dom).clone(), body))
            }
        }
    }

    // ------------------------------------------------------------------
    // The main production
    // ------------------------------------------------------------------

    /// One term over `ctx`, structurally bounded by `depth`. Every branch
    /// produces a term that infers in `ctx` — except under the trace
    /// algebra, where deeply sequenced emissions can overflow the bounded
    /// index; callers retry in that case.
    fn term(&mut self, ctx: &Ctx, depth: usize) -> Term {
        if depth == 0 {
            let base = self.random_base();
            return self.base_atom(ctx, base, true);
        }
        match self.rng.gen_range(0..100) {
            0..=17 => {
                let base = self.random_base();
                self.base_atom(ctx, base, true)
            }
            18..=29 => self.gen_lam(ctx, depth),
            30..=47 => self.gen_app(ctx, depth),
            48..=61 => self.gen_let(ctx, depth),
            62..=69 => Term::pair(self.term(ctx, depth - 1), self.term(ctx, depth - 1)),
            70..=77 => self.gen_proj(ctx, depth),
            78..=85 => self.gen_if(ctx, depth),
            _ => self.gen_statement(ctx, depth),
        }
    }

    fn gen_lam(&mut self, ctx: &Ctx, depth: usize) -> Term {
        let x = self.fresh_name();
        let dom = self.dom_type();
        let mut inner = ctx.clone();
        inner.push((x.clone(), dom.clone()));
        let body = self.term(&inner, depth - 1);
        Term::lam(&x, dom, body)
    }

    fn gen_app(&mut self, ctx: &Ctx, depth: usize) -> Term {
        // Prefer applying a function already in scope when one exists;
        // otherwise build a fresh redex.
        let funs: Vec<(String, ObjType)> = ctx
            .iter()
            .filter(|(_, t)| matches!(t, ObjType::Fun(..)))
            .cloned()
            .collect();
        if !funs.is_empty() && self.rng.gen_range(0..3) == 0 {
            let (x, ty) = &funs[self.rng.gen_range(0..funs.len())];
            let ObjType::Fun(dom, _, _) = ty else { unreachable!() };
            if let Some(arg) = self.value_of(ctx, dom, 2) {
                return Term::app(Term::var(x), arg);
            }
        }
        let lam = self.gen_lam(ctx, depth);
        let TermNode::Lam(_, ref dom, _) = lam.node else { unreachable!() };
        let dom = dom.clone();
        let arg = match &dom {
            ObjType::Unit | ObjType::Bool | ObjType::IntMod(_) => {
                let base = match dom {
                    ObjType::Unit => BaseTy::Unit,
                    ObjType::Bool => BaseTy::Bool,
                    ObjType::IntMod(m) => BaseTy::IntMod(m),
                    _ => unreachable!(),
                };
                self.base_atom(ctx, base, true)
            }
            other => self
                .value_of(ctx, other, 2)
                .unwrap_or_else(|| Term::lit(Scalar::Unit)),
        };
        Term::app(lam, arg)
    }

    fn gen_let(&mut self, ctx: &Ctx, depth: usize) -> Term {
        let x = self.fresh_name();
        let bound = self.term(ctx, depth - 1);
        let Some(j) = self.infer(ctx, &bound) else {
            // Trace overflow in the bound term; fall back to an atom.
            let base = self.random_base();
            return self.base_atom(ctx, base, true);
        };
        let dead = self.rng.gen_range(0..4) == 0;
        let body = if dead {
            self.term(ctx, depth - 1)
        } else {
            let mut inner = ctx.clone();
            inner.push((x.clone(), j.ty));
            self.term(&inner, depth - 1)
        };
        Term::let_(&x, bound, body)
    }

    fn gen_proj(&mut self, ctx: &Ctx, depth: usize) -> Term {
        let prods: Vec<String> = ctx
            .iter()
            .filter(|(_, t)| matches!(t, ObjType::Prod(..)))
            .map(|(x, _)| x.clone())
            .collect();
        let src = if !prods.is_empty() && self.rng.gen_range(0..2) == 0 {
            Term::var(&prods[self.rng.gen_range(0..prods.len())])
        } else {
            Term::pair(self.term(ctx, depth - 1), self.term(ctx, depth - 1))
        };
        if self.rng.gen() {
            Term::fst(src)
        } else {
            Term::snd(src)
        }
    }

    fn gen_if(&mut self, ctx: &Ctx, depth: usize) -> Term {
        // `if` needs a join, which the trace algebra lacks.
        if self.kind == InstanceKind::Trace {
            return self.gen_statement(ctx, depth);
        }
        let cond = self.base_atom(ctx, BaseTy::Bool, true);
        let then = self.term(ctx, depth - 1);
        let els = match self.infer(ctx, &then) {
            Some(j) => self
                .value_of(ctx, &j.ty, 2)
                .unwrap_or_else(|| then.clone()),
            None => then.clone(),
        };
        Term::if_(cond, then, els)
    }

    /// A `write`/`out` statement for the kinds that have one; for the
    /// others, an effectful atom.
    fn gen_statement(&mut self, ctx: &Ctx, depth: usize) -> Term {
        match self.kind {
            InstanceKind::Memory => {
                let regions: Vec<(String, BaseTy)> =
                    self.sig.regions.iter().map(|(r, b)| (r.clone(), *b)).collect();
                let (r, base) = regions[self.rng.gen_range(0..regions.len())].clone();
                let value = if depth > 1 && self.rng.gen_range(0..3) == 0 {
                    self.term(ctx, depth - 1)
                } else {
                    self.base_atom(ctx, base, true)
                };
                // Keep the payload well-typed: re-check, fall back to an atom.
                let value = match self.infer(ctx, &value) {
                    Some(j) if j.ty == base_obj(base) => value,
                    _ => self.base_atom(ctx, base, true),
                };
                Term::write(&r, value)
            }
            InstanceKind::Trace => {
                let tags: Vec<(String, BaseTy)> =
                    self.sig.tags.iter().map(|(t, b)| (t.clone(), *b)).collect();
                let (t, base) = tags[self.rng.gen_range(0..tags.len())].clone();
                let value = self.base_atom(ctx, base, false);
                Term::out(&t, value)
            }
            InstanceKind::Reader | InstanceKind::Identity => {
                let base = self.random_base();
                self.base_atom(ctx, base, true)
            }
        }
    }

    // ------------------------------------------------------------------
    // Corpus entry points
    // ------------------------------------------------------------------

    /// One closed program together with its judgment. Retries on the rare
    /// trace-overflow rejection; the unit literal is the (never reached in
    /// practice) fallback.
    pub fn gen_program(&mut self, depth: usize) -> (Term, EffectJudgment) {
        let empty = Vec::new();
        for _ in 0..64 {
            let t = self.term(&empty, depth);
            if let Some(j) = self.infer(&empty, &t) {
                return (t, j);
            }
        }
        let t = Term::lit(Scalar::Unit);
        let j = self.infer(&empty, &t).expect("unit literal always infers");
        (t, j)
    }

    /// Like [`gen_program`](Self::gen_program) but saturated: while the
    /// program's type is an arrow, it is applied to a generated closed
    /// value, so the result type is first-order whenever possible and the
    /// reference interpreter can compare final values, not just stores.
    pub fn gen_ground_program(&mut self, depth: usize) -> (Term, EffectJudgment) {
        let empty = Vec::new();
        'outer: for _ in 0..64 {
            let (mut t, mut j) = self.gen_program(depth);
            for _ in 0..4 {
                let ObjType::Fun(dom, _, _) = &j.ty else { break };
                let Some(arg) = self.value_of(&empty, dom, 2) else {
                    continue 'outer;
                };
                t = Term::app(t, arg);
                match self.infer(&empty, &t) {
                    Some(next) => j = next,
                    None => continue 'outer,
                }
            }
            if !matches!(j.ty, ObjType::Fun(..)) {
                return (t, j);
            }
        }
        let t = Term::lit(Scalar::Unit);
        let j = self.infer(&empty, &t).expect("unit literal always infers");
        (t, j)
    }

    /// A β-redex `(λx:σ. body) v` with a closed pure argument, paired with
    /// its contraction `body[v/x]`. Both sides are closed and well-typed;
    /// their denotations must agree in index and value.
    pub fn gen_beta_pair(&mut self, depth: usize) -> (Term, Term) {
        let empty = Vec::new();
        for _ in 0..64 {
            let x = self.fresh_name();
            let dom = self.dom_type();
            let ctx = vec![(x.clone(), dom.clone())];
            let body = self.term(&ctx, depth);
            let Some(arg) = self.value_of(&empty, &dom, 2) else {
                continue;
            };
            let redex = Term::app(Term::lam(&x, dom, body.clone()), arg.clone());
            let reduct = subst(&body, &x, &arg);
            if self.infer(&empty, &redex).is_some()
                && self.infer(&empty, &reduct).is_some()
            {
                return (redex, reduct);
            }
        }
        let id = Term::app(
            Term::lam("x", ObjType::Bool, Term::var("x")),
            Term::lit(Scalar::Bool(true)),
        );
        (id, Term::lit(Scalar::Bool(true)))
    }

    /// A closed program whose *root* is a `let` binding that is dead or
    /// live *according to the coeffect analysis* — mention alone is not
    /// liveness, since a binder used only inside another dead binding is
    /// itself dead. The returned key identifies the binding in liveness
    /// tables and evaluation counters. Only generated for effect-free
    /// kinds, where the liveness analysis applies.
    pub fn gen_let_program(&mut self, depth: usize, live: bool) -> (Term, String) {
        let empty = Vec::new();
        for _ in 0..64 {
            let x = self.fresh_name();
            let bound = self.term(&empty, depth - 1);
            let Some(j) = self.infer(&empty, &bound) else {
                continue;
            };
            let body = if live {
                let ctx = vec![(x.clone(), j.ty)];
                let raw = self.term(&ctx, depth - 1);
                if mentions(&raw, &x) {
                    raw
                } else {
                    Term::pair(Term::var(&x), raw)
                }
            } else {
                self.term(&empty, depth - 1)
            };
            let term = Term::let_(&x, bound, body);
            if self.infer(&empty, &term).is_none() {
                continue;
            }
            let key = let_key(&x, term.pos);
            let Ok(cj) = infer_coeffect(&self.sig, &Vec::new(), &term) else {
                continue;
            };
            if cj.lets.get(&key) == Some(&live) {
                return (term, key);
            }
        }
        let term = Term::let_(
            "x",
            Term::lit(Scalar::Bool(true)),
            if live {
                Term::var("x")
            } else {
                Term::lit(Scalar::Unit)
            },
        );
        let key = let_key("x", term.pos);
        (term, key)
    }
}

fn base_obj(base: BaseTy) -> ObjType {
    match base {
        BaseTy::Unit => ObjType::Unit,
        BaseTy::Bool => ObjType::Bool,
        BaseTy::IntMod(m) => ObjType::IntMod(m),
    }
}

// ============================================================================
// Tests
// ============================================================================
