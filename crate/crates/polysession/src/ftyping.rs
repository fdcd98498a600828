//! Checkers for the term judgments: Ω;Γ;Δ ⊢ M : A (the linear λ-calculus,
//! DILL style) and Ψ ⊢ M : τ (the simply-typed data layer of the
//! value-passing calculi, including the contextual monad).
//!
//! Checking is bidirectional: introduction forms check against an expected
//! type (existential packages do not synthesise), eliminations synthesise.
//! Unlike the process checker there is no automatic absorption — the term
//! syntax has explicit eliminators for 1 and !, so an unused linear variable
//! is a linear violation.

use crate::ast::{Process, Term};
use crate::judgment::{Calculus, Contexts, Judgment, LfDerivation, LfRule};
use crate::names::Name;
use crate::pityping::{self, CResult, Env, ErrorKind, TypeError};
use crate::print::{print_term, print_type};
use crate::types::Ty;
use std::collections::HashSet;

fn err_at(kind: ErrorKind, msg: impl Into<String>, m: &Term) -> TypeError {
    TypeError::new(kind, msg, print_term(m))
}

// ---------------------------------------------------------------------------
// Linear-F: Ω;Γ;Δ ⊢ M : A
// ---------------------------------------------------------------------------

struct LfEnv {
    omega: Vec<Name>,
    gamma: Vec<(Name, Ty)>,
    lin: LfLin,
}

#[derive(Default)]
struct LfLin {
    stack: Vec<(Name, Ty, bool)>,
}

impl LfLin {
    fn push(&mut self, n: Name, t: Ty) {
        self.stack.push((n, t, false));
    }
    fn lookup(&self, n: &Name) -> Option<(usize, Ty)> {
        self.stack
            .iter()
            .enumerate()
            .rev()
            .find(|(_, (m, _, used))| !used && m == n)
            .map(|(i, (_, t, _))| (i, t.clone()))
    }
    fn save(&self) -> Vec<bool> {
        self.stack.iter().map(|(_, _, u)| *u).collect()
    }
    fn restore(&mut self, snap: &[bool]) {
        self.stack.truncate(snap.len());
        for ((_, _, u), s) in self.stack.iter_mut().zip(snap) {
            *u = *s;
        }
    }
    fn consumed_since(&self, snap: &[bool]) -> Vec<(Name, Ty)> {
        self.stack
            .iter()
            .take(snap.len())
            .zip(snap)
            .filter(|((_, _, u), was)| *u && !**was)
            .map(|((n, t, _), _)| (n.clone(), t.clone()))
            .collect()
    }
    /// Pop entries down to `base`; each must have been consumed.
    fn pop_strict(&mut self, base: usize, at: &Term) -> CResult<()> {
        for i in (base..self.stack.len()).rev() {
            let (n, t, used) = &self.stack[i];
            if !used {
                return Err(err_at(
                    ErrorKind::LinearViolation,
                    format!("linear variable {}:{} left unused", n, print_type(t)),
                    at,
                ));
            }
        }
        self.stack.truncate(base);
        Ok(())
    }
}

impl LfEnv {
    fn contexts(&self, delta: Vec<(Name, Ty)>) -> Contexts {
        Contexts {
            psi: Vec::new(),
            omega: self.omega.clone(),
            gamma: self.gamma.clone(),
            delta,
        }
    }
}

fn mk_lf(
    env: &LfEnv,
    rule: LfRule,
    term: &Term,
    ty: &Ty,
    delta: Vec<(Name, Ty)>,
    principal: Option<Name>,
    ty_arg: Option<Ty>,
    children: Vec<LfDerivation>,
) -> LfDerivation {
    LfDerivation {
        rule,
        judgment: Judgment::Term {
            ctx: env.contexts(delta),
            term: term.clone(),
            ty: ty.clone(),
            data: false,
        },
        principal,
        ty_arg,
        children,
        proc_children: vec![],
    }
}

/// Check Ω;Γ;Δ ⊢ M : A. The whole Δ must be consumed.
pub fn check_term(ctx: &Contexts, m: &Term, a: &Ty) -> Result<LfDerivation, TypeError> {
    let mut seen = HashSet::new();
    for (n, _) in ctx.delta.iter().chain(&ctx.gamma) {
        if !seen.insert(n.clone()) {
            return Err(err_at(
                ErrorKind::LinearViolation,
                format!("context name {n} bound twice"),
                m,
            ));
        }
    }
    let mut env = LfEnv {
        omega: ctx.omega.clone(),
        gamma: ctx.gamma.clone(),
        lin: LfLin::default(),
    };
    for (n, t) in &ctx.delta {
        env.lin.push(n.clone(), t.clone());
    }
    let d = lf_check(&mut env, m, a)?;
    env.lin.pop_strict(0, m)?;
    Ok(d)
}

/// Synthesise Ω;Γ;Δ ⊢ M : ?. The whole Δ must be consumed.
pub fn synth_term(ctx: &Contexts, m: &Term) -> Result<(LfDerivation, Ty), TypeError> {
    let mut env = LfEnv {
        omega: ctx.omega.clone(),
        gamma: ctx.gamma.clone(),
        lin: LfLin::default(),
    };
    for (n, t) in &ctx.delta {
        env.lin.push(n.clone(), t.clone());
    }
    let r = lf_synth(&mut env, m)?;
    env.lin.pop_strict(0, m)?;
    Ok(r)
}

fn lf_check(env: &mut LfEnv, m: &Term, expected: &Ty) -> CResult<LfDerivation> {
    let snap = env.lin.save();
    match (m, expected) {
        (Term::Lam(x, ann, body), Ty::Lolli(a, b)) => {
            if !ann.alpha_eq(a) {
                return Err(err_at(
                    ErrorKind::TypeMismatch,
                    format!("λ binder annotated {}, expected {}", print_type(ann), print_type(a)),
                    m,
                ));
            }
            let base = env.lin.stack.len();
            env.lin.push(x.clone(), (**a).clone());
            let d = lf_check(env, body, b)?;
            env.lin.pop_strict(base, m)?;
            let delta = env.lin.consumed_since(&snap);
            Ok(mk_lf(env, LfRule::LolliI, m, expected, delta, None, None, vec![d]))
        }
        (Term::TLam(v, body), Ty::Forall(x0, a)) => {
            let a2 = a.subst_tyvar(x0, &Ty::Var(v.clone()));
            env.omega.push(v.clone());
            let d = lf_check(env, body, &a2);
            env.omega.pop();
            let d = d?;
            let delta = env.lin.consumed_since(&snap);
            Ok(mk_lf(env, LfRule::ForallI, m, expected, delta, None, None, vec![d]))
        }
        (Term::Pack(a, body, asc), Ty::Exists(x0, b)) => {
            if let Some(t) = asc {
                if !t.alpha_eq(expected) {
                    return Err(err_at(
                        ErrorKind::TypeMismatch,
                        format!(
                            "package ascribed {}, expected {}",
                            print_type(t),
                            print_type(expected)
                        ),
                        m,
                    ));
                }
            }
            if !a.wf(&env.omega.iter().cloned().collect()) {
                return Err(err_at(
                    ErrorKind::IllFormedType,
                    format!("packed type {} has free variables outside Ω", print_type(a)),
                    m,
                ));
            }
            let inner = b.subst_tyvar(x0, a);
            let d = lf_check(env, body, &inner)?;
            let delta = env.lin.consumed_since(&snap);
            Ok(mk_lf(env, LfRule::ExistsI, m, expected, delta, None, Some(a.clone()), vec![d]))
        }
        (Term::Pair(m1, m2), Ty::Tensor(a, b)) => {
            let d1 = lf_check(env, m1, a)?;
            let d2 = lf_check(env, m2, b)?;
            let delta = env.lin.consumed_since(&snap);
            Ok(mk_lf(env, LfRule::TensorI, m, expected, delta, None, None, vec![d1, d2]))
        }
        (Term::WithPair(m1, m2), Ty::With(a, b)) => {
            let (d1, d2) = lf_branches(env, m1, a, m2, b, None, None, m)?;
            let delta = env.lin.consumed_since(&snap);
            Ok(mk_lf(env, LfRule::WithI, m, expected, delta, None, None, vec![d1, d2]))
        }
        (Term::Bang(inner), Ty::Bang(a)) => {
            let lin_saved = std::mem::take(&mut env.lin);
            let res = lf_check(env, inner, a);
            env.lin = lin_saved;
            let d = res?;
            Ok(mk_lf(env, LfRule::BangI, m, expected, vec![], None, None, vec![d]))
        }
        (Term::Inj(left, ann, inner), Ty::Plus(a, b)) => {
            if !ann.alpha_eq(expected) {
                return Err(err_at(
                    ErrorKind::TypeMismatch,
                    format!("injection annotated {}, expected {}", print_type(ann), print_type(expected)),
                    m,
                ));
            }
            let goal = if *left { a } else { b };
            let d = lf_check(env, inner, goal)?;
            let delta = env.lin.consumed_since(&snap);
            let rule = if *left { LfRule::PlusI1 } else { LfRule::PlusI2 };
            Ok(mk_lf(env, rule, m, expected, delta, None, None, vec![d]))
        }
        // eliminations and let-forms: check the body against the expectation
        (Term::LetPair(..), _)
        | (Term::LetBang(..), _)
        | (Term::LetUnit(..), _)
        | (Term::LetPack(..), _)
        | (Term::CaseSum(..), _) => lf_elim(env, m, Some(expected)).map(|(d, _)| d),
        _ => {
            let (d, got) = lf_synth(env, m)?;
            if got.alpha_eq(expected) {
                Ok(d)
            } else {
                Err(err_at(
                    ErrorKind::TypeMismatch,
                    format!("has type {}, expected {}", print_type(&got), print_type(expected)),
                    m,
                ))
            }
        }
    }
}

fn lf_synth(env: &mut LfEnv, m: &Term) -> CResult<(LfDerivation, Ty)> {
    let snap = env.lin.save();
    match m {
        Term::Var(x) => {
            if let Some((i, t)) = env.lin.lookup(x) {
                env.lin.stack[i].2 = true;
                let delta = vec![(x.clone(), t.clone())];
                Ok((mk_lf(env, LfRule::Var, m, &t, delta, Some(x.clone()), None, vec![]), t))
            } else if let Some(t) = Contexts::lookup(&env.gamma, x) {
                Ok((mk_lf(env, LfRule::UVar, m, &t, vec![], Some(x.clone()), None, vec![]), t))
            } else {
                Err(err_at(ErrorKind::UnboundName, format!("unbound variable {x}"), m))
            }
        }
        Term::Unit => Ok((mk_lf(env, LfRule::OneI, m, &Ty::One, vec![], None, None, vec![]), Ty::One)),
        Term::True => Ok((mk_lf(env, LfRule::TwoI1, m, &Ty::Two, vec![], None, None, vec![]), Ty::Two)),
        Term::False => Ok((mk_lf(env, LfRule::TwoI2, m, &Ty::Two, vec![], None, None, vec![]), Ty::Two)),
        Term::Lam(x, ann, body) => {
            let base = env.lin.stack.len();
            env.lin.push(x.clone(), ann.clone());
            let (d, bty) = lf_synth(env, body)?;
            env.lin.pop_strict(base, m)?;
            let ty = Ty::lolli(ann.clone(), bty);
            let delta = env.lin.consumed_since(&snap);
            Ok((mk_lf(env, LfRule::LolliI, m, &ty, delta, None, None, vec![d]), ty))
        }
        Term::App(f, arg) => {
            let (df, fty) = lf_synth(env, f)?;
            let Ty::Lolli(a, b) = fty else {
                return Err(err_at(
                    ErrorKind::TypeMismatch,
                    format!("applied term has type {}", print_type(&fty)),
                    m,
                ));
            };
            let da = lf_check(env, arg, &a)?;
            let delta = env.lin.consumed_since(&snap);
            Ok((mk_lf(env, LfRule::LolliE, m, &b, delta, None, None, vec![df, da]), *b))
        }
        Term::TLam(v, body) => {
            env.omega.push(v.clone());
            let res = lf_synth(env, body);
            env.omega.pop();
            let (d, bty) = res?;
            let ty = Ty::Forall(v.clone(), Box::new(bty));
            let delta = env.lin.consumed_since(&snap);
            Ok((mk_lf(env, LfRule::ForallI, m, &ty, delta, None, None, vec![d]), ty))
        }
        Term::TApp(f, a) => {
            if !a.wf(&env.omega.iter().cloned().collect()) {
                return Err(err_at(
                    ErrorKind::IllFormedType,
                    format!("type argument {} has free variables outside Ω", print_type(a)),
                    m,
                ));
            }
            let (df, fty) = lf_synth(env, f)?;
            let Ty::Forall(x0, b) = fty else {
                return Err(err_at(
                    ErrorKind::TypeMismatch,
                    format!("type-applied term has type {}", print_type(&fty)),
                    m,
                ));
            };
            let ty = b.subst_tyvar(&x0, a);
            let delta = env.lin.consumed_since(&snap);
            Ok((mk_lf(env, LfRule::ForallE, m, &ty, delta, None, Some(a.clone()), vec![df]), ty))
        }
        Term::Pair(m1, m2) => {
            let (d1, t1) = lf_synth(env, m1)?;
            let (d2, t2) = lf_synth(env, m2)?;
            let ty = Ty::tensor(t1, t2);
            let delta = env.lin.consumed_since(&snap);
            Ok((mk_lf(env, LfRule::TensorI, m, &ty, delta, None, None, vec![d1, d2]), ty))
        }
        Term::WithPair(m1, m2) => {
            let base = env.lin.stack.len();
            let s0 = env.lin.save();
            let (d1, t1) = lf_synth(env, m1)?;
            let u1 = env.lin.save();
            env.lin.restore(&s0);
            let (d2, t2) = lf_synth(env, m2)?;
            let u2 = env.lin.save();
            for i in 0..base {
                if u1[i] != u2[i] {
                    return Err(err_at(
                        ErrorKind::LinearViolation,
                        "components of an additive pair must use the same channels",
                        m,
                    ));
                }
            }
            let ty = Ty::with(t1, t2);
            let delta = env.lin.consumed_since(&snap);
            Ok((mk_lf(env, LfRule::WithI, m, &ty, delta, None, None, vec![d1, d2]), ty))
        }
        Term::Bang(inner) => {
            let lin_saved = std::mem::take(&mut env.lin);
            let res = lf_synth(env, inner);
            env.lin = lin_saved;
            let (d, t) = res?;
            let ty = Ty::bang(t);
            Ok((mk_lf(env, LfRule::BangI, m, &ty, vec![], None, None, vec![d]), ty))
        }
        Term::Fst(inner) | Term::Snd(inner) => {
            let left = matches!(m, Term::Fst(_));
            let (d, t) = lf_synth(env, inner)?;
            let Ty::With(a, b) = t else {
                return Err(err_at(
                    ErrorKind::TypeMismatch,
                    format!("projection from {}", print_type(&t)),
                    m,
                ));
            };
            let ty = if left { *a } else { *b };
            let delta = env.lin.consumed_since(&snap);
            let rule = if left { LfRule::WithE1 } else { LfRule::WithE2 };
            Ok((mk_lf(env, rule, m, &ty, delta, None, None, vec![d]), ty))
        }
        Term::Inj(left, ann, inner) => {
            let Ty::Plus(a, b) = ann else {
                return Err(err_at(
                    ErrorKind::TypeMismatch,
                    format!("injection annotated with non-sum {}", print_type(ann)),
                    m,
                ));
            };
            let goal = if *left { a } else { b };
            let d = lf_check(env, inner, goal)?;
            let delta = env.lin.consumed_since(&snap);
            let rule = if *left { LfRule::PlusI1 } else { LfRule::PlusI2 };
            Ok((mk_lf(env, rule, m, ann, delta, None, None, vec![d]), ann.clone()))
        }
        Term::Pack(_, _, asc) => match asc {
            Some(t) => {
                let t = t.clone();
                let d = lf_check(env, m, &t)?;
                Ok((d, t))
            }
            None => Err(err_at(
                ErrorKind::RuleInapplicable,
                "existential package needs an expected type or an ascription",
                m,
            )),
        },
        Term::LetPair(..) | Term::LetBang(..) | Term::LetUnit(..) | Term::LetPack(..)
        | Term::CaseSum(..) => {
            let (d, t) = lf_elim(env, m, None)?;
            Ok((d, t.expect("synth mode returns a type")))
        }
        Term::Quote(..) => Err(err_at(
            ErrorKind::RuleInapplicable,
            "quotes live in the data layer, not in the linear λ-calculus",
            m,
        )),
    }
}

/// Let-forms and case. In check mode (expected = Some) bodies are checked,
/// otherwise synthesised; returns the type in synth mode.
fn lf_elim(env: &mut LfEnv, m: &Term, expected: Option<&Ty>) -> CResult<(LfDerivation, Option<Ty>)> {
    let snap = env.lin.save();
    let body_goal = |env: &mut LfEnv, body: &Term, expected: Option<&Ty>| -> CResult<(LfDerivation, Option<Ty>)> {
        match expected {
            Some(t) => Ok((lf_check(env, body, t)?, None)),
            None => {
                let (d, t) = lf_synth(env, body)?;
                Ok((d, Some(t)))
            }
        }
    };
    match m {
        Term::LetPair(x, y, scrut, body) => {
            let (ds, st) = lf_synth(env, scrut)?;
            let Ty::Tensor(a, b) = st else {
                return Err(err_at(
                    ErrorKind::TypeMismatch,
                    format!("let-pair on {}", print_type(&st)),
                    m,
                ));
            };
            let base = env.lin.stack.len();
            env.lin.push(x.clone(), *a);
            env.lin.push(y.clone(), *b);
            let (db, t) = body_goal(env, body, expected)?;
            env.lin.pop_strict(base, m)?;
            let ty = expected.cloned().or(t).unwrap();
            let delta = env.lin.consumed_since(&snap);
            Ok((mk_lf(env, LfRule::TensorE, m, &ty, delta, None, None, vec![ds, db]), Some(ty)))
        }
        Term::LetBang(u, scrut, body) => {
            let (ds, st) = lf_synth(env, scrut)?;
            let Ty::Bang(a) = st else {
                return Err(err_at(
                    ErrorKind::TypeMismatch,
                    format!("let-! on {}", print_type(&st)),
                    m,
                ));
            };
            env.gamma.push((u.clone(), *a));
            let res = body_goal(env, body, expected);
            env.gamma.pop();
            let (db, t) = res?;
            let ty = expected.cloned().or(t).unwrap();
            let delta = env.lin.consumed_since(&snap);
            Ok((mk_lf(env, LfRule::BangE, m, &ty, delta, None, None, vec![ds, db]), Some(ty)))
        }
        Term::LetUnit(scrut, body) => {
            let ds = lf_check(env, scrut, &Ty::One)?;
            let (db, t) = body_goal(env, body, expected)?;
            let ty = expected.cloned().or(t).unwrap();
            let delta = env.lin.consumed_since(&snap);
            Ok((mk_lf(env, LfRule::OneE, m, &ty, delta, None, None, vec![ds, db]), Some(ty)))
        }
        Term::LetPack(v, y, scrut, body) => {
            let (ds, st) = lf_synth(env, scrut)?;
            let Ty::Exists(x0, a) = st else {
                return Err(err_at(
                    ErrorKind::TypeMismatch,
                    format!("unpack on {}", print_type(&st)),
                    m,
                ));
            };
            let a2 = a.subst_tyvar(&x0, &Ty::Var(v.clone()));
            let base = env.lin.stack.len();
            env.omega.push(v.clone());
            env.lin.push(y.clone(), a2);
            let res = body_goal(env, body, expected);
            let strict = env.lin.pop_strict(base, m);
            env.omega.pop();
            let (db, t) = res?;
            strict?;
            let ty = expected.cloned().or(t).unwrap();
            // the result type must not mention the opened variable
            if ty.free_tyvars().contains(v) {
                return Err(err_at(
                    ErrorKind::IllFormedType,
                    format!("type variable {v} escapes its unpack scope"),
                    m,
                ));
            }
            let delta = env.lin.consumed_since(&snap);
            Ok((mk_lf(env, LfRule::ExistsE, m, &ty, delta, None, None, vec![ds, db]), Some(ty)))
        }
        Term::CaseSum(scrut, x, n1, y, n2) => {
            let (ds, st) = lf_synth(env, scrut)?;
            let Ty::Plus(a, b) = st else {
                return Err(err_at(
                    ErrorKind::TypeMismatch,
                    format!("case on {}", print_type(&st)),
                    m,
                ));
            };
            let goal = match expected {
                Some(t) => t.clone(),
                None => {
                    // synthesise from the first branch, then check the second
                    let s0 = env.lin.save();
                    let base = env.lin.stack.len();
                    env.lin.push(x.clone(), (*a).clone());
                    let (_, t) = lf_synth(env, n1)?;
                    env.lin.restore(&s0);
                    let _ = base;
                    t
                }
            };
            let (d1, d2) = lf_branches(
                env,
                n1,
                &goal,
                n2,
                &goal,
                Some((x.clone(), (*a).clone())),
                Some((y.clone(), (*b).clone())),
                m,
            )?;
            let delta = env.lin.consumed_since(&snap);
            Ok((mk_lf(env, LfRule::PlusE, m, &goal, delta, None, None, vec![ds, d1, d2]), Some(goal)))
        }
        _ => unreachable!(),
    }
}

#[allow(clippy::too_many_arguments)]
fn lf_branches(
    env: &mut LfEnv,
    m1: &Term,
    t1: &Ty,
    m2: &Term,
    t2: &Ty,
    push1: Option<(Name, Ty)>,
    push2: Option<(Name, Ty)>,
    at: &Term,
) -> CResult<(LfDerivation, LfDerivation)> {
    let snap = env.lin.save();
    let base = env.lin.stack.len();
    let mut run = |env: &mut LfEnv, m: &Term, t: &Ty, push: &Option<(Name, Ty)>| -> CResult<LfDerivation> {
        if let Some((n, ty)) = push {
            env.lin.push(n.clone(), ty.clone());
        }
        let d = lf_check(env, m, t)?;
        env.lin.pop_strict(base, m)?;
        Ok(d)
    };
    let d1 = run(env, m1, t1, &push1)?;
    let u1 = env.lin.save();
    env.lin.restore(&snap);
    let d2 = run(env, m2, t2, &push2)?;
    let u2 = env.lin.save();
    for i in 0..base {
        if u1[i] != u2[i] {
            return Err(err_at(
                ErrorKind::LinearViolation,
                "branches must consume the same linear variables",
                at,
            ));
        }
    }
    Ok((d1, d2))
}

// ---------------------------------------------------------------------------
// Data layer: Ψ ⊢ M : τ
// ---------------------------------------------------------------------------

fn mk_data(
    env: &Env,
    rule: LfRule,
    term: &Term,
    ty: &Ty,
    principal: Option<Name>,
    children: Vec<LfDerivation>,
    proc_children: Vec<crate::judgment::Derivation>,
) -> LfDerivation {
    LfDerivation {
        rule,
        judgment: Judgment::Term {
            ctx: Contexts {
                psi: env.psi.clone(),
                omega: vec![],
                gamma: vec![],
                delta: vec![],
            },
            term: term.clone(),
            ty: ty.clone(),
            data: true,
        },
        principal,
        ty_arg: None,
        children,
        proc_children,
    }
}

pub(crate) fn synth_data(env: &mut Env, m: &Term) -> CResult<(LfDerivation, Ty)> {
    match m {
        Term::Var(x) => match Contexts::lookup(&env.psi, x) {
            Some(t) => Ok((mk_data(env, LfRule::DVar, m, &t, Some(x.clone()), vec![], vec![]), t)),
            None => Err(err_at(ErrorKind::UnboundName, format!("unbound data variable {x}"), m)),
        },
        Term::True => Ok((mk_data(env, LfRule::DTrue, m, &Ty::Two, None, vec![], vec![]), Ty::Two)),
        Term::False => Ok((mk_data(env, LfRule::DFalse, m, &Ty::Two, None, vec![], vec![]), Ty::Two)),
        Term::Lam(x, ann, body) => {
            if !ann.is_data() {
                return Err(err_at(
                    ErrorKind::IllFormedType,
                    format!("{} is not a data type", print_type(ann)),
                    m,
                ));
            }
            env.psi.push((x.clone(), ann.clone()));
            let res = synth_data(env, body);
            env.psi.pop();
            let (d, bty) = res?;
            let ty = Ty::arrow(ann.clone(), bty);
            Ok((mk_data(env, LfRule::DLam, m, &ty, None, vec![d], vec![]), ty))
        }
        Term::App(f, arg) => {
            let (df, fty) = synth_data(env, f)?;
            let Ty::Arrow(a, b) = fty else {
                return Err(err_at(
                    ErrorKind::TypeMismatch,
                    format!("applied data term has type {}", print_type(&fty)),
                    m,
                ));
            };
            let da = check_data(env, arg, &a)?;
            Ok((mk_data(env, LfRule::DApp, m, &b, None, vec![df, da], vec![]), *b))
        }
        Term::Quote(z, ann, body, qctx) => {
            let Some(offered) = ann else {
                return Err(err_at(
                    ErrorKind::RuleInapplicable,
                    format!("quote needs an offered-type annotation: quote {{{z}:A <- ...}}"),
                    m,
                ));
            };
            let ty = Ty::Monad(qctx.clone(), z.clone(), Box::new(offered.clone()));
            let d = quote_rule(env, m, z, body, qctx, offered, &ty)?;
            Ok((d, ty))
        }
        _ => Err(err_at(
            ErrorKind::RuleInapplicable,
            "not a data-layer term (data terms are variables, λ, application, booleans and quotes)",
            m,
        )),
    }
}

pub(crate) fn check_data(env: &mut Env, m: &Term, expected: &Ty) -> CResult<LfDerivation> {
    match (m, expected) {
        (Term::Quote(z, ann, body, qctx), Ty::Monad(mctx, _, a)) => {
            if let Some(t) = ann {
                if !t.alpha_eq(a) {
                    return Err(err_at(
                        ErrorKind::TypeMismatch,
                        format!("quote annotated {}, expected {}", print_type(t), print_type(a)),
                        m,
                    ));
                }
            }
            if qctx.len() != mctx.len()
                || qctx.iter().zip(mctx).any(|((_, t1), (_, t2))| !t1.alpha_eq(t2))
            {
                return Err(err_at(
                    ErrorKind::TypeMismatch,
                    "quote context does not match the monad type",
                    m,
                ));
            }
            quote_rule(env, m, z, body, qctx, a, expected)
        }
        (Term::Lam(x, ann, body), Ty::Arrow(a, b)) => {
            if !ann.alpha_eq(a) {
                return Err(err_at(
                    ErrorKind::TypeMismatch,
                    format!("λ binder annotated {}, expected {}", print_type(ann), print_type(a)),
                    m,
                ));
            }
            env.psi.push((x.clone(), (**a).clone()));
            let res = check_data(env, body, b);
            env.psi.pop();
            let d = res?;
            Ok(mk_data(env, LfRule::DLam, m, expected, None, vec![d], vec![]))
        }
        _ => {
            let (d, got) = synth_data(env, m)?;
            if got.alpha_eq(expected) {
                Ok(d)
            } else {
                Err(err_at(
                    ErrorKind::TypeMismatch,
                    format!("has type {}, expected {}", print_type(&got), print_type(expected)),
                    m,
                ))
            }
        }
    }
}

fn quote_rule(
    env: &mut Env,
    m: &Term,
    z: &Name,
    body: &Process,
    qctx: &[(Name, Ty)],
    offered: &Ty,
    monad_ty: &Ty,
) -> CResult<LfDerivation> {
    if env.calculus == Calculus::Core {
        return Err(err_at(
            ErrorKind::RuleInapplicable,
            "quotes need the higher-order calculus",
            m,
        ));
    }
    for (_, t) in qctx {
        if !t.is_session() {
            return Err(err_at(
                ErrorKind::IllFormedType,
                format!("{} is not a session type", print_type(t)),
                m,
            ));
        }
    }
    if !offered.is_session() {
        return Err(err_at(
            ErrorKind::IllFormedType,
            format!("{} is not a session type", print_type(offered)),
            m,
        ));
    }
    let d = pityping::check_quote_body(env, z, body, qctx, offered)?;
    Ok(mk_data(env, LfRule::MonadI, m, monad_ty, None, vec![], vec![d]))
}

/// The polymorphic Church booleans: type ∀X.!X⊸!X⊸X with its two
/// inhabitants.
pub fn church_bool_term() -> (Ty, Term, Term) {
    let x = || Ty::var("X");
    let ty = Ty::forall("X", Ty::lolli(Ty::bang(x()), Ty::lolli(Ty::bang(x()), x())));
    let body = |result: &str| {
        Term::tlam(
            "X",
            Term::lam(
                "u",
                Ty::bang(x()),
                Term::lam(
                    "v",
                    Ty::bang(x()),
                    Term::let_bang(
                        "x",
                        Term::var("u"),
                        Term::let_bang("y", Term::var("v"), Term::var(result)),
                    ),
                ),
            ),
        )
    };
    (ty, body("x"), body("y"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parse::{parse_term, parse_type};

    fn closed() -> Contexts {
        Contexts::default()
    }

    #[test]
    fn unit_checks() {
        let d = check_term(&closed(), &Term::Unit, &Ty::One).unwrap();
        assert_eq!(d.rule, LfRule::OneI);
    }

    #[test]
    fn example2_pairing_term() {
        // ΛX.ΛY.λx:X.λy:Y.⟨x⊗y⟩ : ∀X.∀Y.X⊸Y⊸X⊗Y
        let m = parse_term("/\\X. /\\Y. \\x:X. \\y:Y. (x * y)").unwrap();
        let t = parse_type("forall X. forall Y. X -o Y -o X * Y").unwrap();
        check_term(&closed(), &m, &t).unwrap();
    }

    #[test]
    fn church_booleans_check() {
        let (ty, tt, ff) = church_bool_term();
        check_term(&closed(), &tt, &ty).unwrap();
        check_term(&closed(), &ff, &ty).unwrap();
        assert!(!tt.alpha_eq(&ff));
    }

    #[test]
    fn linear_violation_double_use() {
        // λx:1.⟨x⊗x⟩ is a linear violation
        let m = parse_term("\\x:1. (x * x)").unwrap();
        let t = parse_type("1 -o 1 * 1").unwrap();
        let e = check_term(&closed(), &m, &t).unwrap_err();
        assert!(matches!(e.kind, ErrorKind::UnboundName | ErrorKind::LinearViolation));
    }

    #[test]
    fn unused_linear_variable_rejected() {
        let m = parse_term("\\x:1. ()").unwrap();
        let t = parse_type("1 -o 1").unwrap();
        assert!(check_term(&closed(), &m, &t).is_err());
    }

    #[test]
    fn pack_checks_against_existential() {
        let m = parse_term("pack 1 with \\x:1. x").unwrap();
        let t = parse_type("exists X. X -o X").unwrap();
        check_term(&closed(), &m, &t).unwrap();
    }
}
