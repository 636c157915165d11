//! The type-and-effect system: synthesizes judgments `Γ ⊢ e : τ, F` over any
//! effect algebra, recording the full derivation tree and every point where
//! sub-effecting (`ι`) is used.
//!
//! Synthesis computes least effects: values (`Var`, `Const`, `Lam`) are pure,
//! a λ-body's effect becomes the latent annotation on its arrow, and `ι` is
//! inserted only where joins demand it — `if` branches and application
//! against a larger latent annotation. `if` needs a join, so algebras
//! without an order (trace) admit only straight-line programs.

use std::collections::BTreeMap;

use crate::algebra::{EffectAlgebra, EffectToken, Index};
use crate::calculus::{ObjType, Signature, Term, TermNode};
use crate::error::InferError;
use crate::value::Scalar;

/// Trace algebras built by [`default_algebra`] cap sequences at this length.
pub const DEFAULT_TRACE_MAX: usize = 8;

// ============================================================================
// Instances
// ============================================================================

/// The four shipped interpretations a program can be checked and run under.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InstanceKind {
    Reader,
    Memory,
    Trace,
    Identity,
}

impl InstanceKind {
    pub fn parse(name: &str) -> Option<InstanceKind> {
        Some(match name {
            "reader" => InstanceKind::Reader,
            "memory" => InstanceKind::Memory,
            "trace" => InstanceKind::Trace,
            "identity" => InstanceKind::Identity,
            _ => return None,
        })
    }

    pub fn name(self) -> &'static str {
        match self {
            InstanceKind::Reader => "reader",
            InstanceKind::Memory => "memory",
            InstanceKind::Trace => "trace",
            InstanceKind::Identity => "identity",
        }
    }
}

/// The algebra a signature induces for each instance: implicit-parameter
/// tokens for the reader, read/write tokens per region for memory, bounded
/// tag sequences for trace, and the one-point monoid for the identity
/// collapse.
pub fn default_algebra(kind: InstanceKind, sig: &Signature) -> EffectAlgebra {
    match kind {
        InstanceKind::Reader => EffectAlgebra::powerset(
            sig.params
                .keys()
                .map(|p| EffectToken::ImplicitParam(p.clone())),
        ),
        InstanceKind::Memory => EffectAlgebra::powerset(sig.regions.keys().flat_map(|r| {
            [
                EffectToken::Read(r.clone()),
                EffectToken::Write(r.clone()),
            ]
        })),
        InstanceKind::Trace => {
            EffectAlgebra::trace(sig.tags.keys().cloned(), DEFAULT_TRACE_MAX)
        }
        InstanceKind::Identity => EffectAlgebra::trivial(),
    }
}

// ============================================================================
// Judgments
// ============================================================================

/// A recorded use of `ι_{from ⊑ to}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Coercion {
    pub from: Index,
    pub to: Index,
    /// Which premise the coercion applies to, e.g. `then-branch`.
    pub site: String,
}

/// One node of a derivation of `Γ ⊢ e : τ, F`.
#[derive(Debug, Clone)]
pub struct EffectJudgment {
    pub ctx: BTreeMap<String, ObjType>,
    pub term: Term,
    pub ty: ObjType,
    pub effect: Index,
    pub rule: &'static str,
    pub children: Vec<EffectJudgment>,
    pub coercions: Vec<Coercion>,
}

// ============================================================================
// Annotations
// ============================================================================

/// Interprets a surface latent-effect annotation in the given algebra: a
/// token set for powerset algebras, an ordered tag sequence for traces, and
/// the point for the trivial algebra (which can express only purity).
pub fn annotation_to_index(
    alg: &EffectAlgebra,
    toks: &[EffectToken],
) -> Result<Index, InferError> {
    if let Some(universe) = alg.tokens() {
        for t in toks {
            if !universe.contains(t) {
                return Err(unsupported(alg, t));
            }
        }
        return Ok(Index::set(toks.iter().cloned()));
    }
    if let Some((tags, _)) = alg.trace_bounds() {
        let mut seq = Vec::new();
        for t in toks {
            match t {
                EffectToken::Out(tag) if tags.contains(tag) => seq.push(tag.clone()),
                _ => return Err(unsupported(alg, t)),
            }
        }
        let ix = Index::Seq(seq);
        if !alg.contains(&ix) {
            return Err(InferError::IndexOverflow(
                crate::error::AlgebraError::NotInCarrier(ix, alg.name().to_string()),
            ));
        }
        return Ok(ix);
    }
    match toks.first() {
        None => Ok(alg.unit()),
        Some(t) => Err(unsupported(alg, t)),
    }
}

/// The canonical surface spelling of an index (inverse of
/// [`annotation_to_index`] on canonical annotations).
pub fn index_to_tokens(ix: &Index) -> Vec<EffectToken> {
    match ix {
        Index::Set(s) => s.iter().cloned().collect(),
        Index::Seq(tags) => tags.iter().map(|t| EffectToken::Out(t.clone())).collect(),
        Index::Flag(_) | Index::Point => Vec::new(),
    }
}

/// Rewrites every arrow annotation in `ty` to its canonical spelling so
/// structural equality on types coincides with index equality.
pub fn canon_type(alg: &EffectAlgebra, ty: &ObjType) -> Result<ObjType, InferError> {
    Ok(match ty {
        ObjType::Unit | ObjType::Bool | ObjType::IntMod(_) => ty.clone(),
        ObjType::Prod(a, b) => ObjType::prod(canon_type(alg, a)?, canon_type(alg, b)?),
        ObjType::Fun(dom, latent, cod) => ObjType::fun(
            canon_type(alg, dom)?,
            index_to_tokens(&annotation_to_index(alg, latent)?),
            canon_type(alg, cod)?,
        ),
    })
}

fn unsupported(alg: &EffectAlgebra, tok: &EffectToken) -> InferError {
    InferError::UnsupportedPrimitive {
        prim: tok.to_string(),
        instance: alg.name().to_string(),
    }
}

// ============================================================================
// Subtyping
// ============================================================================

/// `sub ≤ sup`: arrows are covariant in the latent effect (via the algebra's
/// order) and in the codomain, invariant in the domain. Returns the latent
/// coercions needed, or `None` if the relation does not hold. Types must be
/// canonical.
fn subtype(
    alg: &EffectAlgebra,
    sub: &ObjType,
    sup: &ObjType,
    site: &str,
) -> Result<Option<Vec<Coercion>>, InferError> {
    if sub == sup {
        return Ok(Some(Vec::new()));
    }
    match (sub, sup) {
        (ObjType::Prod(a1, b1), ObjType::Prod(a2, b2)) => {
            let (Some(mut ca), Some(cb)) = (
                subtype(alg, a1, a2, site)?,
                subtype(alg, b1, b2, site)?,
            ) else {
                return Ok(None);
            };
            ca.extend(cb);
            Ok(Some(ca))
        }
        (ObjType::Fun(d1, l1, c1), ObjType::Fun(d2, l2, c2)) => {
            if d1 != d2 {
                return Ok(None);
            }
            let i1 = annotation_to_index(alg, l1)?;
            let i2 = annotation_to_index(alg, l2)?;
            let mut cs = Vec::new();
            if i1 != i2 {
                if !alg.has_order() || !alg.leq(&i1, &i2)? {
                    return Ok(None);
                }
                cs.push(Coercion {
                    from: i1,
                    to: i2,
                    site: site.to_string(),
                });
            }
            match subtype(alg, c1, c2, site)? {
                Some(inner) => {
                    cs.extend(inner);
                    Ok(Some(cs))
                }
                None => Ok(None),
            }
        }
        _ => Ok(None),
    }
}

// ============================================================================
// Inference
// ============================================================================

/// Infers the least judgment `Γ ⊢ e : τ, F`. `ctx` types must be canonical
/// (as produced by [`canon_type`]); inferred types are canonical.
pub fn infer_effect(
    sig: &Signature,
    alg: &EffectAlgebra,
    ctx: &BTreeMap<String, ObjType>,
    term: &Term,
) -> Result<EffectJudgment, InferError> {
    let judge = |ty: ObjType,
                 effect: Index,
                 rule: &'static str,
                 children: Vec<EffectJudgment>,
                 coercions: Vec<Coercion>| EffectJudgment {
        ctx: ctx.clone(),
        term: term.clone(),
        ty,
        effect,
        rule,
        children,
        coercions,
    };
    let terr = |msg: String| InferError::Type {
        line: term.pos.line,
        col: term.pos.col,
        msg,
    };

    match &term.node {
        TermNode::Var(x) => match ctx.get(x) {
            Some(ty) => Ok(judge(ty.clone(), alg.unit(), "var", vec![], vec![])),
            None => Err(InferError::Scope {
                line: term.pos.line,
                col: term.pos.col,
                name: x.clone(),
            }),
        },
        TermNode::Const(s) => {
            let ty = match s {
                Scalar::Unit => ObjType::Unit,
                Scalar::Bool(_) => ObjType::Bool,
                Scalar::IntMod(_, m) => ObjType::IntMod(*m),
            };
            Ok(judge(ty, alg.unit(), "const", vec![], vec![]))
        }
        TermNode::Lam(x, ann, body) => {
            let ann = canon_type(alg, ann)?;
            let mut inner = ctx.clone();
            inner.insert(x.clone(), ann.clone());
            let jb = infer_effect(sig, alg, &inner, body)?;
            let latent = index_to_tokens(&jb.effect);
            let ty = ObjType::fun(ann, latent, jb.ty.clone());
            Ok(judge(ty, alg.unit(), "lam", vec![jb], vec![]))
        }
        TermNode::App(f, a) => {
            let jf = infer_effect(sig, alg, ctx, f)?;
            let ja = infer_effect(sig, alg, ctx, a)?;
            let ObjType::Fun(dom, latent, cod) = jf.ty.clone() else {
                return Err(terr(format!("applied a non-function of type {}", jf.ty)));
            };
            let Some(coercions) = subtype(alg, &ja.ty, &dom, "argument")? else {
                return Err(terr(format!(
                    "argument of type {} does not match domain {}",
                    ja.ty, dom
                )));
            };
            let latent = annotation_to_index(alg, &latent)?;
            let effect = alg.combine(&alg.combine(&jf.effect, &ja.effect)?, &latent)?;
            Ok(judge(*cod, effect, "app", vec![jf, ja], coercions))
        }
        TermNode::Let(x, bound, body) => {
            let jb = infer_effect(sig, alg, ctx, bound)?;
            let mut inner = ctx.clone();
            inner.insert(x.clone(), jb.ty.clone());
            let jc = infer_effect(sig, alg, &inner, body)?;
            let effect = alg.combine(&jb.effect, &jc.effect)?;
            Ok(judge(jc.ty.clone(), effect, "let", vec![jb, jc], vec![]))
        }
        TermNode::Pair(a, b) => {
            let ja = infer_effect(sig, alg, ctx, a)?;
            let jb = infer_effect(sig, alg, ctx, b)?;
            let ty = ObjType::prod(ja.ty.clone(), jb.ty.clone());
            let effect = alg.combine(&ja.effect, &jb.effect)?;
            Ok(judge(ty, effect, "pair", vec![ja, jb], vec![]))
        }
        TermNode::Fst(e) => {
            let je = infer_effect(sig, alg, ctx, e)?;
            let ObjType::Prod(a, _) = je.ty.clone() else {
                return Err(terr(format!("fst of a non-product of type {}", je.ty)));
            };
            let effect = je.effect.clone();
            Ok(judge(*a, effect, "fst", vec![je], vec![]))
        }
        TermNode::Snd(e) => {
            let je = infer_effect(sig, alg, ctx, e)?;
            let ObjType::Prod(_, b) = je.ty.clone() else {
                return Err(terr(format!("snd of a non-product of type {}", je.ty)));
            };
            let effect = je.effect.clone();
            Ok(judge(*b, effect, "snd", vec![je], vec![]))
        }
        TermNode::If(c, t, e) => {
            let jc = infer_effect(sig, alg, ctx, c)?;
            if jc.ty != ObjType::Bool {
                return Err(terr(format!("if condition has type {}", jc.ty)));
            }
            let jt = infer_effect(sig, alg, ctx, t)?;
            let je = infer_effect(sig, alg, ctx, e)?;
            if jt.ty != je.ty {
                return Err(terr(format!(
                    "branches have different types {} and {}",
                    jt.ty, je.ty
                )));
            }
            if !alg.has_order() {
                return Err(InferError::NoLattice {
                    construct: "if".to_string(),
                    algebra: alg.name().to_string(),
                });
            }
            let joined = alg.join(&jt.effect, &je.effect)?;
            let mut coercions = Vec::new();
            for (j, site) in [(&jt, "then-branch"), (&je, "else-branch")] {
                if j.effect != joined {
                    coercions.push(Coercion {
                        from: j.effect.clone(),
                        to: joined.clone(),
                        site: site.to_string(),
                    });
                }
            }
            let effect = alg.combine(&jc.effect, &joined)?;
            let ty = jt.ty.clone();
            Ok(judge(ty, effect, "if", vec![jc, jt, je], coercions))
        }
        TermNode::Ask(p) => {
            let Some(base) = sig.params.get(p) else {
                return Err(terr(format!("undeclared parameter `{p}`")));
            };
            let ix = primitive_index(alg, &EffectToken::ImplicitParam(p.clone()))?;
            Ok(judge(ObjType::base(*base), ix, "ask", vec![], vec![]))
        }
        TermNode::Read(r) => {
            let Some(base) = sig.regions.get(r) else {
                return Err(terr(format!("undeclared region `{r}`")));
            };
            let ix = primitive_index(alg, &EffectToken::Read(r.clone()))?;
            Ok(judge(ObjType::base(*base), ix, "read", vec![], vec![]))
        }
        TermNode::Write(r, e) => {
            let Some(base) = sig.regions.get(r).copied() else {
                return Err(terr(format!("undeclared region `{r}`")));
            };
            let je = infer_effect(sig, alg, ctx, e)?;
            if je.ty != ObjType::base(base) {
                return Err(terr(format!(
                    "write of {} to region `{r}` of {}",
                    je.ty,
                    ObjType::base(base)
                )));
            }
            let wix = primitive_index(alg, &EffectToken::Write(r.clone()))?;
            let effect = alg.combine(&je.effect, &wix)?;
            Ok(judge(ObjType::Unit, effect, "write", vec![je], vec![]))
        }
        TermNode::Out(t, e) => {
            let Some(base) = sig.tags.get(t).copied() else {
                return Err(terr(format!("undeclared tag `{t}`")));
            };
            let je = infer_effect(sig, alg, ctx, e)?;
            if je.ty != ObjType::base(base) {
                return Err(terr(format!(
                    "out of {} on tag `{t}` of {}",
                    je.ty,
                    ObjType::base(base)
                )));
            }
            let oix = primitive_index(alg, &EffectToken::Out(t.clone()))?;
            let effect = alg.combine(&je.effect, &oix)?;
            Ok(judge(ObjType::Unit, effect, "out", vec![je], vec![]))
        }
    }
}

/// The singleton index an effect primitive contributes, or
/// `UnsupportedPrimitive` when the algebra has no token for it.
pub(crate) fn primitive_index(alg: &EffectAlgebra, tok: &EffectToken) -> Result<Index, InferError> {
    if let Some(universe) = alg.tokens() {
        if universe.contains(tok) {
            return Ok(Index::singleton(tok.clone()));
        }
    } else if let Some((tags, _)) = alg.trace_bounds() {
        if let EffectToken::Out(t) = tok {
            if tags.contains(t) {
                return Ok(Index::Seq(vec![t.clone()]));
            }
        }
    }
    Err(unsupported(alg, tok))
}

// ============================================================================
// Annotation checking
// ============================================================================

/// Checks an inferred judgment against a declared effect: ok iff
/// `F ⊑ declared`, returning the final `ι` coercion. Orderless algebras
/// accept exactly the inferred index.
pub fn check_against_annotation(
    alg: &EffectAlgebra,
    j: &EffectJudgment,
    declared: &Index,
) -> Result<Coercion, InferError> {
    let ok = if alg.has_order() {
        alg.leq(&j.effect, declared)?
    } else {
        j.effect == *declared
    };
    if ok {
        Ok(Coercion {
            from: j.effect.clone(),
            to: declared.clone(),
            site: "ascription".to_string(),
        })
    } else {
        Err(InferError::EffectEscape {
            found: j.effect.clone(),
            declared: declared.clone(),
        })
    }
}

// ============================================================================
// Derivation replay
// ============================================================================

/// Recomputes every node's conclusion from its children's stored judgments
/// and compares with the stored conclusion — the bottom-up soundness check
/// for derivation trees. Returns the first discrepancy.
pub fn verify_derivation(
    sig: &Signature,
    alg: &EffectAlgebra,
    j: &EffectJudgment,
) -> Result<(), String> {
    for child in &j.children {
        verify_derivation(sig, alg, child)?;
    }
    let (ty, effect) = replay_node(sig, alg, j).map_err(|e| e.to_string())?;
    if ty != j.ty {
        return Err(format!(
            "rule {}: replayed type {} differs from stored {}",
            j.rule, ty, j.ty
        ));
    }
    if effect != j.effect {
        return Err(format!(
            "rule {}: replayed effect {} differs from stored {}",
            j.rule, effect, j.effect
        ));
    }
    Ok(())
}

/// One rule application: conclusion of `j` from its children's conclusions.
fn replay_node(
    sig: &Signature,
    alg: &EffectAlgebra,
    j: &EffectJudgment,
) -> Result<(ObjType, Index), InferError> {
    let child = |k: usize| -> &EffectJudgment { &j.children[k] };
    Ok(match (&j.term.node, j.rule) {
        (TermNode::Var(x), "var") => (
            j.ctx
                .get(x)
                .cloned()
                .expect("var rule stores its binding in ctx"),
            alg.unit(),
        ),
        (TermNode::Const(s), "const") => {
            let ty = match s {
                Scalar::Unit => ObjType::Unit,
                Scalar::Bool(_) => ObjType::Bool,
                Scalar::IntMod(_, m) => ObjType::IntMod(*m),
            };
            (ty, alg.unit())
        }
        (TermNode::Lam(_, ann, _), "lam") => {
            let ann = canon_type(alg, ann)?;
            let body = child(0);
            (
                ObjType::fun(ann, index_to_tokens(&body.effect), body.ty.clone()),
                alg.unit(),
            )
        }
        (TermNode::App(..), "app") => {
            let (jf, ja) = (child(0), child(1));
            let ObjType::Fun(_, latent, cod) = &jf.ty else {
                unreachable!("app rule applied to non-function");
            };
            let latent = annotation_to_index(alg, latent)?;
            let effect = alg.combine(&alg.combine(&jf.effect, &ja.effect)?, &latent)?;
            (*cod.clone(), effect)
        }
        (TermNode::Let(..), "let") => {
            let effect = alg.combine(&child(0).effect, &child(1).effect)?;
            (child(1).ty.clone(), effect)
        }
        (TermNode::Pair(..), "pair") => {
            let effect = alg.combine(&child(0).effect, &child(1).effect)?;
            (
                ObjType::prod(child(0).ty.clone(), child(1).ty.clone()),
                effect,
            )
        }
        (TermNode::Fst(..), "fst") => {
            let ObjType::Prod(a, _) = &child(0).ty else {
                unreachable!("fst rule applied to non-product");
            };
            (*a.clone(), child(0).effect.clone())
        }
        (TermNode::Snd(..), "snd") => {
            let ObjType::Prod(_, b) = &child(0).ty else {
                unreachable!("snd rule applied to non-product");
            };
            (*b.clone(), child(0).effect.clone())
        }
        (TermNode::If(..), "if") => {
            let joined = alg.join(&child(1).effect, &child(2).effect)?;
            let effect = alg.combine(&child(0).effect, &joined)?;
            (child(1).ty.clone(), effect)
        }
        (TermNode::Ask(p), "ask") => (
            ObjType::base(sig.params[p]),
            primitive_index(alg, &EffectToken::ImplicitParam(p.clone()))?,
        ),
        (TermNode::Read(r), "read") => (
            ObjType::base(sig.regions[r]),
            primitive_index(alg, &EffectToken::Read(r.clone()))?,
        ),
        (TermNode::Write(r, _), "write") => {
            let wix = primitive_index(alg, &EffectToken::Write(r.clone()))?;
            (ObjType::Unit, alg.combine(&child(0).effect, &wix)?)
        }
        (TermNode::Out(t, _), "out") => {
            let oix = primitive_index(alg, &EffectToken::Out(t.clone()))?;
            (ObjType::Unit, alg.combine(&child(0).effect, &oix)?)
        }
        (node, rule) => {
            return Err(InferError::Type {
                line: j.term.pos.line,
                col: j.term.pos.col,
                msg: format!("rule `{rule}` does not conclude {node:?}"),
            })
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::calculus::parse;

    fn infer_with(
        kind: InstanceKind,
        src: &str,
    ) -> Result<(Signature, EffectAlgebra, EffectJudgment), InferError> {
        let (sig, term) = parse(src).unwrap();
        let alg = default_algebra(kind, &sig);
        let j = infer_effect(&sig, &alg, &BTreeMap::new(), &term)?;
        Ok((sig, alg, j))
    }

    fn ip(p: &str) -> EffectToken {
        EffectToken::ImplicitParam(p.to_string())
    }
    fn rd(r: &str) -> EffectToken {
        EffectToken::Read(r.to_string())
    }
    fn wr(r: &str) -> EffectToken {
        EffectToken::Write(r.to_string())
    }

    #[test]
    fn lambda_is_pure_and_captures_its_body_effect_as_latent() {
        let (_, _, j) =
            infer_with(InstanceKind::Reader, "param p : int4; \\x:int4. ask p").unwrap();
        assert_eq!(j.effect, Index::empty_set());
        assert_eq!(
            j.ty,
            ObjType::fun(ObjType::IntMod(4), vec![ip("p")], ObjType::IntMod(4)),
        );
        assert_eq!(j.rule, "lam");
    }

    #[test]
    fn let_unions_read_and_write_effects() {
        let (_, _, j) = infer_with(
            InstanceKind::Memory,
            "region r : int4; region s : int4; let x = read r in write s x",
        )
        .unwrap();
        assert_eq!(j.effect, Index::set([rd("r"), wr("s")]));
        assert_eq!(j.ty, ObjType::Unit);
    }

    #[test]
    fn if_joins_branches_and_records_both_coercions() {
        let (sig, term) =
            parse("param p : int4; region r : int4; if true then read r else ask p").unwrap();
        let alg = EffectAlgebra::powerset([rd("r"), ip("p")]);
        let j = infer_effect(&sig, &alg, &BTreeMap::new(), &term).unwrap();
        assert_eq!(j.effect, Index::set([rd("r"), ip("p")]));
        assert_eq!(j.coercions.len(), 2);
        assert_eq!(j.coercions[0].from, Index::set([rd("r")]));
        assert_eq!(j.coercions[0].to, j.effect);
        assert_eq!(j.coercions[1].from, Index::set([ip("p")]));
        verify_derivation(&sig, &alg, &j).unwrap();
    }

    #[test]
    fn application_releases_the_latent_effect() {
        let (_, _, j) = infer_with(
            InstanceKind::Memory,
            "region r : int4; (\\x:unit. read r) unit",
        )
        .unwrap();
        assert_eq!(j.effect, Index::set([rd("r")]));
        assert_eq!(j.ty, ObjType::IntMod(4));
    }

    #[test]
    fn latent_covariance_records_a_coercion_at_the_call_site() {
        let src = "region r : int4; \\f:(unit -> {rd r} int4) -> {} bool. f (\\y:unit. 2)";
        let (_, _, j) = infer_with(InstanceKind::Memory, src).unwrap();
        // The body is the application; its argument's latent ∅ widens to {rd r}.
        let app = &j.children[0];
        assert_eq!(app.rule, "app");
        assert_eq!(app.coercions.len(), 1);
        assert_eq!(app.coercions[0].from, Index::empty_set());
        assert_eq!(app.coercions[0].to, Index::set([rd("r")]));
    }

    #[test]
    fn latent_contravariance_is_rejected() {
        let src = "region r : int4; \\f:(unit -> {} int4) -> {} bool. f (\\y:unit. read r)";
        let err = infer_with(InstanceKind::Memory, src).unwrap_err();
        assert!(matches!(err, InferError::Type { .. }), "got {err:?}");
    }

    #[test]
    fn trace_effects_concatenate_in_evaluation_order() {
        let (_, _, j) = infer_with(
            InstanceKind::Trace,
            "tag a : int4; tag b : bool; let x = out a 1 in out b true",
        )
        .unwrap();
        assert_eq!(
            j.effect,
            Index::Seq(vec!["a".to_string(), "b".to_string()]),
        );
    }

    #[test]
    fn if_under_trace_has_no_join() {
        let err = infer_with(
            InstanceKind::Trace,
            "tag a : int4; if true then out a 1 else out a 2",
        )
        .unwrap_err();
        assert!(
            matches!(err, InferError::NoLattice { construct, .. } if construct == "if"),
        );
    }

    #[test]
    fn trace_overflow_surfaces_at_inference_time() {
        let (sig, term) =
            parse("tag a : int4; let x = out a 1 in out a 2").unwrap();
        let alg = EffectAlgebra::trace(["a".to_string()], 1);
        let err = infer_effect(&sig, &alg, &BTreeMap::new(), &term).unwrap_err();
        assert!(matches!(err, InferError::IndexOverflow(_)), "got {err:?}");
    }

    #[test]
    fn primitives_outside_the_algebra_are_unsupported() {
        let err = infer_with(InstanceKind::Reader, "region r : int4; read r").unwrap_err();
        assert!(
            matches!(
                err,
                InferError::UnsupportedPrimitive { prim, instance }
                    if prim == "rd r" && instance.contains("powerset")
            ),
        );
    }

    #[test]
    fn annotation_check_is_sub_effecting() {
        let (_, alg, j) = infer_with(InstanceKind::Memory, "region r : int4; read r").unwrap();
        let wider = Index::set([rd("r"), wr("r")]);
        let c = check_against_annotation(&alg, &j, &wider).unwrap();
        assert_eq!((c.from, c.to), (j.effect.clone(), wider));

        let disjoint = Index::set([wr("r")]);
        assert!(matches!(
            check_against_annotation(&alg, &j, &disjoint),
            Err(InferError::EffectEscape { .. }),
        ));

        let exact = check_against_annotation(&alg, &j, &j.effect).unwrap();
        assert_eq!(exact.from, exact.to);
    }

    #[test]
    fn derivations_replay_to_their_stored_conclusions() {
        for (kind, src) in [
            (InstanceKind::Reader, "param p : int4; param q : bool; (ask p, if ask q then 1 else ask p)"),
            (InstanceKind::Memory, "region r : int4; let x = read r in let y = write r x in read r"),
            (InstanceKind::Trace, "tag a : int4; let x = out a 3 in x"),
            (InstanceKind::Identity, "let f = \\x:int4. (x, x) in snd (f 2)"),
        ] {
            let (sig, term) = parse(src).unwrap();
            let alg = default_algebra(kind, &sig);
            let j = infer_effect(&sig, &alg, &BTreeMap::new(), &term).unwrap();
            verify_derivation(&sig, &alg, &j).unwrap();
        }
    }

    #[test]
    fn values_are_pure_under_every_instance() {
        for kind in [
            InstanceKind::Reader,
            InstanceKind::Memory,
            InstanceKind::Trace,
            InstanceKind::Identity,
        ] {
            let (_, alg, j) = infer_with(kind, "\\x:bool. (x, 1)").unwrap();
            assert_eq!(j.effect, alg.unit(), "lam impure under {:?}", kind);
        }
    }
}
