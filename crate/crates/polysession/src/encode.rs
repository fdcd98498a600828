//! The translations between the two calculi.
//!
//! Functions-as-processes ⟦−⟧_z maps term derivations to processes offering
//! the result channel z (introduction rules become right rules, eliminations
//! become cut + left rule + identity). Processes-as-functions ⦅−⦆ maps
//! process typing derivations to terms (right rules become introductions,
//! left rules become eliminations combined with substitution). Both walk the
//! recorded derivation: the rule tags disambiguate how a session is used,
//! which raw syntax cannot.
//!
//! The value-passing and higher-order calculi reuse the same walkers with
//! the extra clauses for ∧/⊃, the data layer and the contextual monad. The
//! `revised` flag selects the normalisation-friendly variant of ⦅−⦆ that
//! wraps copy uses in a unit-let so every process reduction maps to at least
//! one β-step.

use crate::ast::{Process, Term};
use crate::ftyping::church_bool_term;
use crate::judgment::{Derivation, Judgment, LfDerivation, LfRule, PiRule};
use crate::names::{Name, NameGen};
use crate::types::Ty;
use thiserror::Error;

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum EncodingName {
    F2Pi,
    Pi2F,
    ValsF2Pi,
    ValsPi2F,
    HoF2Pi,
    HoPi2F,
    HoPi2FPlus,
}

#[derive(Error, Debug, Clone)]
pub enum EncodeError {
    #[error("booleans must be Church-desugared before the core translation (found {0})")]
    UndesugaredBoolean(String),
    #[error("result channel {0} occurs free in the term")]
    ZCapture(Name),
    #[error("rule {0} is not part of this translation")]
    UnsupportedRule(String),
}

type EResult<T> = Result<T, EncodeError>;

/// Type translation shared by both directions: the core connectives are the
/// identity; the data-layer types flatten into the linear ones.
///   τ∧A ↦ !τ⊗A    τ⊃A ↦ !τ⊸A    τ→σ ↦ !τ⊸σ    2 ↦ ∀X.!X⊸!X⊸X
///   {x̄:Ā ⊢ z:A} ↦ Ā₀⊸…⊸Āₙ⊸A
pub fn ty_flat(t: &Ty) -> Ty {
    match t {
        Ty::One | Ty::Var(_) => t.clone(),
        Ty::Two => church_bool_term().0,
        Ty::Lolli(a, b) => Ty::lolli(ty_flat(a), ty_flat(b)),
        Ty::Tensor(a, b) => Ty::tensor(ty_flat(a), ty_flat(b)),
        Ty::With(a, b) => Ty::with(ty_flat(a), ty_flat(b)),
        Ty::Plus(a, b) => Ty::plus(ty_flat(a), ty_flat(b)),
        Ty::Bang(a) => Ty::bang(ty_flat(a)),
        Ty::Forall(x, a) => Ty::Forall(x.clone(), Box::new(ty_flat(a))),
        Ty::Exists(x, a) => Ty::Exists(x.clone(), Box::new(ty_flat(a))),
        Ty::And(t, a) => Ty::tensor(Ty::bang(ty_flat(t)), ty_flat(a)),
        Ty::Impl(t, a) => Ty::lolli(Ty::bang(ty_flat(t)), ty_flat(a)),
        Ty::Arrow(t, s) => Ty::lolli(Ty::bang(ty_flat(t)), ty_flat(s)),
        Ty::Monad(ctx, _, a) => {
            let mut out = ty_flat(a);
            for (_, t) in ctx.iter().rev() {
                out = Ty::lolli(ty_flat(t), out);
            }
            out
        }
    }
}

/// Church-desugar the boolean type and constants, recursively.
pub fn desugar_booleans_ty(t: &Ty) -> Ty {
    match t {
        Ty::Two => church_bool_term().0,
        Ty::One | Ty::Var(_) => t.clone(),
        Ty::Lolli(a, b) => Ty::lolli(desugar_booleans_ty(a), desugar_booleans_ty(b)),
        Ty::Tensor(a, b) => Ty::tensor(desugar_booleans_ty(a), desugar_booleans_ty(b)),
        Ty::With(a, b) => Ty::with(desugar_booleans_ty(a), desugar_booleans_ty(b)),
        Ty::Plus(a, b) => Ty::plus(desugar_booleans_ty(a), desugar_booleans_ty(b)),
        Ty::Bang(a) => Ty::bang(desugar_booleans_ty(a)),
        Ty::Forall(x, a) => Ty::Forall(x.clone(), Box::new(desugar_booleans_ty(a))),
        Ty::Exists(x, a) => Ty::Exists(x.clone(), Box::new(desugar_booleans_ty(a))),
        Ty::And(a, b) => Ty::and(desugar_booleans_ty(a), desugar_booleans_ty(b)),
        Ty::Impl(a, b) => Ty::impl_(desugar_booleans_ty(a), desugar_booleans_ty(b)),
        Ty::Arrow(a, b) => Ty::arrow(desugar_booleans_ty(a), desugar_booleans_ty(b)),
        Ty::Monad(ctx, z, a) => Ty::Monad(
            ctx.iter()
                .map(|(n, t)| (n.clone(), desugar_booleans_ty(t)))
                .collect(),
            z.clone(),
            Box::new(desugar_booleans_ty(a)),
        ),
    }
}

pub fn desugar_booleans(m: &Term) -> Term {
    let go = desugar_booleans;
    let goty = desugar_booleans_ty;
    match m {
        Term::True => church_bool_term().1,
        Term::False => church_bool_term().2,
        Term::Var(_) | Term::Unit => m.clone(),
        Term::Lam(x, t, b) => Term::Lam(x.clone(), goty(t), Box::new(go(b))),
        Term::App(a, b) => Term::app(go(a), go(b)),
        Term::Pair(a, b) => Term::pair(go(a), go(b)),
        Term::WithPair(a, b) => Term::WithPair(Box::new(go(a)), Box::new(go(b))),
        Term::LetPair(x, y, a, b) => {
            Term::LetPair(x.clone(), y.clone(), Box::new(go(a)), Box::new(go(b)))
        }
        Term::Bang(a) => Term::bang(go(a)),
        Term::LetBang(u, a, b) => Term::LetBang(u.clone(), Box::new(go(a)), Box::new(go(b))),
        Term::TLam(v, a) => Term::TLam(v.clone(), Box::new(go(a))),
        Term::TApp(a, t) => Term::TApp(Box::new(go(a)), goty(t)),
        Term::Pack(t, a, asc) => Term::Pack(goty(t), Box::new(go(a)), asc.as_ref().map(goty)),
        Term::LetPack(v, y, a, b) => {
            Term::LetPack(v.clone(), y.clone(), Box::new(go(a)), Box::new(go(b)))
        }
        Term::LetUnit(a, b) => Term::let_unit(go(a), go(b)),
        Term::Inj(s, t, a) => Term::Inj(*s, goty(t), Box::new(go(a))),
        Term::CaseSum(s, x, a, y, b) => Term::CaseSum(
            Box::new(go(s)),
            x.clone(),
            Box::new(go(a)),
            y.clone(),
            Box::new(go(b)),
        ),
        Term::Fst(a) => Term::Fst(Box::new(go(a))),
        Term::Snd(a) => Term::Snd(Box::new(go(a))),
        Term::Quote(z, ann, p, ctx) => Term::Quote(
            z.clone(),
            ann.as_ref().map(goty),
            p.clone(),
            ctx.iter().map(|(n, t)| (n.clone(), goty(t))).collect(),
        ),
    }
}

// ---------------------------------------------------------------------------
// ⟦−⟧_z : terms to processes
// ---------------------------------------------------------------------------

struct F2Pi {
    gen: NameGen,
}

/// Encode a term derivation as a process offering `z`.
pub fn encode_f2pi(d: &LfDerivation, z: &Name) -> EResult<Process> {
    let Judgment::Term { term, .. } = &d.judgment else {
        return Err(EncodeError::UnsupportedRule("process judgment".into()));
    };
    if term.free_vars().contains(z) {
        return Err(EncodeError::ZCapture(z.clone()));
    }
    let mut enc = F2Pi {
        gen: NameGen::avoiding(term.all_names().iter().chain(std::iter::once(z))),
    };
    enc.term(d, z)
}

/// Encode a value-passing / higher-order process derivation into the core
/// calculus.
pub fn encode_proc_f2pi(d: &Derivation) -> EResult<Process> {
    let Judgment::Proc { proc, chan, .. } = &d.judgment else {
        return Err(EncodeError::UnsupportedRule("term judgment".into()));
    };
    let mut enc = F2Pi {
        gen: NameGen::avoiding(proc.all_names().iter().chain(std::iter::once(chan))),
    };
    enc.proc(d)
}

impl F2Pi {
    fn fresh(&mut self, base: &str) -> Name {
        self.gen.fresh(base)
    }

    fn term(&mut self, d: &LfDerivation, z: &Name) -> EResult<Process> {
        let term = match &d.judgment {
            Judgment::Term { term, .. } => term,
            _ => return Err(EncodeError::UnsupportedRule("process judgment".into())),
        };
        let ty = d.judgment.ty().clone();
        match d.rule {
            LfRule::Var => {
                let Term::Var(x) = term else { unreachable!() };
                Ok(Process::Fwd(x.clone(), z.clone()))
            }
            LfRule::UVar => {
                let Term::Var(u) = term else { unreachable!() };
                let x = self.fresh("x");
                Ok(Process::bout(
                    u.clone(),
                    x.clone(),
                    Some(ty_flat(&ty)),
                    Process::Fwd(x, z.clone()),
                ))
            }
            LfRule::LolliI => {
                let Term::Lam(x, _, _) = term else { unreachable!() };
                let body = self.term(&d.children[0], z)?;
                Ok(Process::In(z.clone(), x.clone(), Box::new(body)))
            }
            LfRule::LolliE => {
                // (νx)(⟦M⟧x | (νy)x⟨y⟩.(⟦N⟧y | [x↔z]))
                let fun_ty = ty_flat(d.children[0].judgment.ty());
                let Ty::Lolli(arg_ty, _) = &fun_ty else { unreachable!() };
                let x = self.fresh("x");
                let y = self.fresh("y");
                let pm = self.term(&d.children[0], &x)?;
                let pn = self.term(&d.children[1], &y)?;
                Ok(Process::new_(
                    x.clone(),
                    Some(fun_ty.clone()),
                    Process::par(
                        pm,
                        Process::bout(
                            x.clone(),
                            y,
                            Some((**arg_ty).clone()),
                            Process::par(pn, Process::Fwd(x, z.clone())),
                        ),
                    ),
                ))
            }
            LfRule::TensorI => {
                let y = self.fresh("y");
                let pm = self.term(&d.children[0], &y)?;
                let pn = self.term(&d.children[1], z)?;
                let payload = ty_flat(d.children[0].judgment.ty());
                Ok(Process::bout(z.clone(), y, Some(payload), Process::par(pm, pn)))
            }
            LfRule::TensorE => {
                // let x⊗y = M in N  ↦  (νy)(⟦M⟧y | y(x).⟦N⟧z)
                let Term::LetPair(x, y, _, _) = term else { unreachable!() };
                let pair_ty = ty_flat(d.children[0].judgment.ty());
                let pm = self.term(&d.children[0], y)?;
                let pn = self.term(&d.children[1], z)?;
                Ok(Process::new_(
                    y.clone(),
                    Some(pair_ty),
                    Process::par(pm, Process::In(y.clone(), x.clone(), Box::new(pn))),
                ))
            }
            LfRule::BangI => {
                let x = self.fresh("x");
                let pm = self.term(&d.children[0], &x)?;
                Ok(Process::Rep(z.clone(), x, Box::new(pm)))
            }
            LfRule::BangE => {
                // let !u = M in N ↦ (νx)(⟦M⟧x | ⟦N⟧z{x/u})
                let Term::LetBang(u, _, _) = term else { unreachable!() };
                let bang_ty = ty_flat(d.children[0].judgment.ty());
                let x = self.fresh("x");
                let pm = self.term(&d.children[0], &x)?;
                let pn = self.term(&d.children[1], z)?.subst_name(&x, u);
                Ok(Process::new_(x, Some(bang_ty), Process::par(pm, pn)))
            }
            LfRule::ForallI => {
                let Term::TLam(v, _) = term else { unreachable!() };
                let body = self.term(&d.children[0], z)?;
                Ok(Process::TyIn(z.clone(), v.clone(), Box::new(body)))
            }
            LfRule::ForallE => {
                let fun_ty = ty_flat(d.children[0].judgment.ty());
                let arg = ty_flat(d.ty_arg.as_ref().unwrap());
                let x = self.fresh("x");
                let pm = self.term(&d.children[0], &x)?;
                Ok(Process::new_(
                    x.clone(),
                    Some(fun_ty),
                    Process::par(
                        pm,
                        Process::TyOut(x.clone(), arg, Box::new(Process::Fwd(x, z.clone()))),
                    ),
                ))
            }
            LfRule::ExistsI => {
                let arg = ty_flat(d.ty_arg.as_ref().unwrap());
                let pm = self.term(&d.children[0], z)?;
                Ok(Process::TyOut(z.clone(), arg, Box::new(pm)))
            }
            LfRule::ExistsE => {
                // let (X,y) = M in N ↦ (νy)(⟦M⟧y | y(X).⟦N⟧z)
                let Term::LetPack(v, y, _, _) = term else { unreachable!() };
                let pk_ty = ty_flat(d.children[0].judgment.ty());
                let pm = self.term(&d.children[0], y)?;
                let pn = self.term(&d.children[1], z)?;
                Ok(Process::new_(
                    y.clone(),
                    Some(pk_ty),
                    Process::par(pm, Process::TyIn(y.clone(), v.clone(), Box::new(pn))),
                ))
            }
            LfRule::OneI => Ok(Process::Zero),
            LfRule::OneE => {
                let x = self.fresh("x");
                let pm = self.term(&d.children[0], &x)?;
                let pn = self.term(&d.children[1], z)?;
                Ok(Process::new_(x, Some(Ty::One), Process::par(pm, pn)))
            }
            LfRule::TwoI1 | LfRule::TwoI2 => Err(EncodeError::UndesugaredBoolean(
                crate::print::print_term(term),
            )),
            LfRule::PlusI1 => {
                let pm = self.term(&d.children[0], z)?;
                Ok(Process::Inl(z.clone(), Box::new(pm)))
            }
            LfRule::PlusI2 => {
                let pm = self.term(&d.children[0], z)?;
                Ok(Process::Inr(z.clone(), Box::new(pm)))
            }
            LfRule::PlusE => {
                // case M of inl x⇒N₁ | inr y⇒N₂
                //   ↦ (νw)(⟦M⟧w | w.case(⟦N₁{w/x}⟧z, ⟦N₂{w/y}⟧z))
                let Term::CaseSum(_, x, _, y, _) = term else { unreachable!() };
                let sum_ty = ty_flat(d.children[0].judgment.ty());
                let w = self.fresh("w");
                let pm = self.term(&d.children[0], &w)?;
                let p1 = self.term(&d.children[1], z)?.subst_name(&w, x);
                let p2 = self.term(&d.children[2], z)?.subst_name(&w, y);
                Ok(Process::new_(
                    w.clone(),
                    Some(sum_ty),
                    Process::par(pm, Process::Case(w, Box::new(p1), Box::new(p2))),
                ))
            }
            LfRule::WithI => {
                let p1 = self.term(&d.children[0], z)?;
                let p2 = self.term(&d.children[1], z)?;
                Ok(Process::Case(z.clone(), Box::new(p1), Box::new(p2)))
            }
            LfRule::WithE1 | LfRule::WithE2 => {
                let with_ty = ty_flat(d.children[0].judgment.ty());
                let x = self.fresh("x");
                let pm = self.term(&d.children[0], &x)?;
                let sel = if d.rule == LfRule::WithE1 {
                    Process::Inl(x.clone(), Box::new(Process::Fwd(x.clone(), z.clone())))
                } else {
                    Process::Inr(x.clone(), Box::new(Process::Fwd(x.clone(), z.clone())))
                };
                Ok(Process::new_(x, Some(with_ty), Process::par(pm, sel)))
            }
            // data layer
            LfRule::DVar => {
                // ⟦x⟧_z = x̄⟨y⟩.[y↔z]
                let Term::Var(x) = term else { unreachable!() };
                let y = self.fresh("y");
                Ok(Process::bout(
                    x.clone(),
                    y.clone(),
                    Some(ty_flat(&ty)),
                    Process::Fwd(y, z.clone()),
                ))
            }
            LfRule::DLam => {
                let Term::Lam(x, _, _) = term else { unreachable!() };
                let body = self.term(&d.children[0], z)?;
                Ok(Process::In(z.clone(), x.clone(), Box::new(body)))
            }
            LfRule::DApp => {
                // ⟦M N⟧_z = (νy)(⟦M⟧y | ȳ⟨x⟩.(!x(w).⟦N⟧w | [y↔z]))
                let fun_ty = ty_flat(d.children[0].judgment.ty());
                let Ty::Lolli(arg_bang, _) = &fun_ty else { unreachable!() };
                let Ty::Bang(arg_ty) = &**arg_bang else { unreachable!() };
                let y = self.fresh("y");
                let x = self.fresh("x");
                let w = self.fresh("w");
                let pm = self.term(&d.children[0], &y)?;
                let pn = self.term(&d.children[1], &w)?;
                Ok(Process::new_(
                    y.clone(),
                    Some(fun_ty.clone()),
                    Process::par(
                        pm,
                        Process::bout(
                            y.clone(),
                            x.clone(),
                            Some(Ty::bang((**arg_ty).clone())),
                            Process::par(
                                Process::Rep(x, w, Box::new(pn)),
                                Process::Fwd(y, z.clone()),
                            ),
                        ),
                    ),
                ))
            }
            LfRule::DTrue | LfRule::DFalse => {
                // booleans translate through their Church encodings
                let (ty2, tt, ff) = church_bool_term();
                let m = if d.rule == LfRule::DTrue { tt } else { ff };
                let dd = crate::ftyping::check_term(&Default::default(), &m, &ty2)
                    .expect("church booleans are well-typed");
                self.term(&dd, z)
            }
            LfRule::MonadI => {
                // ⟦{x←P←ȳᵢ}⟧_z = z(y₀)…z(yₙ).⟦P{z/x}⟧
                let Term::Quote(qz, _, _, ctx) = term else { unreachable!() };
                let body = self.proc(&d.proc_children[0])?;
                let body = body.subst_name(z, qz);
                let mut out = body;
                for (yi, _) in ctx.iter().rev() {
                    out = Process::In(z.clone(), yi.clone(), Box::new(out));
                }
                Ok(out)
            }
            other => Err(EncodeError::UnsupportedRule(other.to_string())),
        }
    }

    /// The process part of the value-passing / higher-order translation:
    /// homomorphic on the core rules, with the ∧/⊃/{}E clauses.
    fn proc(&mut self, d: &Derivation) -> EResult<Process> {
        let (proc, chan) = match &d.judgment {
            Judgment::Proc { proc, chan, .. } => (proc, chan),
            _ => return Err(EncodeError::UnsupportedRule("term judgment".into())),
        };
        match d.rule {
            PiRule::OneR => Ok(Process::Zero),
            PiRule::Id => Ok(proc.clone()),
            PiRule::OneL | PiRule::BangL => self.proc(&d.children[0]),
            PiRule::LolliR | PiRule::ImplR => {
                let Process::In(x, y, _) = proc else { unreachable!() };
                let body = self.proc(&d.children[0])?;
                if d.rule == PiRule::ImplR {
                    // z(x).P with x a data variable: the image receives the
                    // replicated channel x directly
                    Ok(Process::In(x.clone(), y.clone(), Box::new(body)))
                } else {
                    Ok(Process::In(x.clone(), y.clone(), Box::new(body)))
                }
            }
            PiRule::TensorL | PiRule::AndL => {
                let Process::In(x, y, _) = proc else { unreachable!() };
                let body = self.proc(&d.children[0])?;
                Ok(Process::In(x.clone(), y.clone(), Box::new(body)))
            }
            PiRule::TensorR | PiRule::LolliL => {
                let (s, y) = bout_parts(proc);
                let payload = ty_flat(d.children[0].judgment.ty());
                let p = self.proc(&d.children[0])?;
                let q = self.proc(&d.children[1])?;
                Ok(Process::bout(s, y, Some(payload), Process::par(p, q)))
            }
            PiRule::Copy => {
                let (s, y) = bout_parts(proc);
                let body = self.proc(&d.children[0])?;
                let payload = crate::judgment::Contexts::lookup(&d.judgment.ctx().gamma, &s)
                    .map(|t| ty_flat(&t));
                Ok(Process::bout(s, y, payload, body))
            }
            PiRule::WithR | PiRule::PlusL => {
                let Process::Case(x, _, _) = proc else { unreachable!() };
                let p = self.proc(&d.children[0])?;
                let q = self.proc(&d.children[1])?;
                Ok(Process::Case(x.clone(), Box::new(p), Box::new(q)))
            }
            PiRule::WithL1 | PiRule::PlusR1 => {
                let (Process::Inl(x, _) | Process::Inr(x, _)) = proc else { unreachable!() };
                let p = self.proc(&d.children[0])?;
                Ok(Process::Inl(x.clone(), Box::new(p)))
            }
            PiRule::WithL2 | PiRule::PlusR2 => {
                let (Process::Inl(x, _) | Process::Inr(x, _)) = proc else { unreachable!() };
                let p = self.proc(&d.children[0])?;
                Ok(Process::Inr(x.clone(), Box::new(p)))
            }
            PiRule::BangR => {
                let Process::Rep(x, y, _) = proc else { unreachable!() };
                let p = self.proc(&d.children[0])?;
                Ok(Process::Rep(x.clone(), y.clone(), Box::new(p)))
            }
            PiRule::ForallR | PiRule::ExistsL => {
                let Process::TyIn(x, v, _) = proc else { unreachable!() };
                let p = self.proc(&d.children[0])?;
                Ok(Process::TyIn(x.clone(), v.clone(), Box::new(p)))
            }
            PiRule::ForallL | PiRule::ExistsR => {
                let Process::TyOut(x, t, _) = proc else { unreachable!() };
                let p = self.proc(&d.children[0])?;
                Ok(Process::TyOut(x.clone(), ty_flat(t), Box::new(p)))
            }
            PiRule::Cut => {
                let Process::New(x, ann, _) = proc else { unreachable!() };
                let p = self.proc(&d.children[0])?;
                let q = self.proc(&d.children[1])?;
                Ok(Process::new_(
                    x.clone(),
                    ann.as_ref().map(ty_flat),
                    Process::par(p, q),
                ))
            }
            PiRule::CutBang => {
                let Process::New(u, ann, body) = proc else { unreachable!() };
                let Process::Par(l, r) = &**body else { unreachable!() };
                let w = match (&**l, &**r) {
                    (Process::Rep(_, w, _), _) => w.clone(),
                    (_, Process::Rep(_, w, _)) => w.clone(),
                    _ => unreachable!(),
                };
                let p = self.proc(&d.children[0])?;
                let q = self.proc(&d.children[1])?;
                Ok(Process::new_(
                    u.clone(),
                    ann.as_ref().map(ty_flat),
                    Process::par(Process::Rep(u.clone(), w, Box::new(p)), q),
                ))
            }
            PiRule::AndR => {
                // ⟦z⟨M⟩.P⟧ = z̄⟨x⟩.(!x(y).⟦M⟧y | ⟦P⟧)
                let Process::TermOut(zc, _, _) = proc else { unreachable!() };
                let x = self.fresh("x");
                let y = self.fresh("y");
                let data_ty = ty_flat(d.term_children[0].judgment.ty());
                let pm = self.term(&d.term_children[0], &y)?;
                let p = self.proc(&d.children[0])?;
                Ok(Process::bout(
                    zc.clone(),
                    x.clone(),
                    Some(Ty::bang(data_ty)),
                    Process::par(Process::Rep(x, y, Box::new(pm)), p),
                ))
            }
            PiRule::ImplL => {
                // ⟦x⟨M⟩.P⟧ = x̄⟨y⟩.(!y(w).⟦M⟧w | ⟦P⟧)
                let Process::TermOut(xc, _, _) = proc else { unreachable!() };
                let y = self.fresh("y");
                let w = self.fresh("w");
                let data_ty = ty_flat(d.term_children[0].judgment.ty());
                let pm = self.term(&d.term_children[0], &w)?;
                let p = self.proc(&d.children[0])?;
                Ok(Process::bout(
                    xc.clone(),
                    y.clone(),
                    Some(Ty::bang(data_ty)),
                    Process::par(Process::Rep(y, w, Box::new(pm)), p),
                ))
            }
            PiRule::MonadE => {
                // ⟦x←M←ȳᵢ;Q⟧ = (νx)(⟦M⟧x | x̄⟨a₀⟩.([a₀↔y₀] | … | ⟦Q⟧))
                let Process::Spawn(x, _, ys, _) = proc else { unreachable!() };
                let monad_ty = ty_flat(d.term_children[0].judgment.ty());
                let pm = self.term(&d.term_children[0], x)?;
                let q = self.proc(&d.children[0])?;
                // peel the ⊸-spine for payload annotations
                let mut spine_tys = Vec::new();
                let mut t = &monad_ty;
                for _ in ys {
                    let Ty::Lolli(a, b) = t else { unreachable!() };
                    spine_tys.push((**a).clone());
                    t = b;
                }
                let mut out = q;
                for (yi, ti) in ys.iter().zip(spine_tys).rev() {
                    let ai = self.fresh("a");
                    out = Process::bout(
                        x.clone(),
                        ai.clone(),
                        Some(ti),
                        Process::par(Process::Fwd(ai, yi.clone()), out),
                    );
                }
                Ok(Process::new_(x.clone(), Some(monad_ty), Process::par(pm, out)))
            }
        }
    }
}

fn bout_parts(p: &Process) -> (Name, Name) {
    match p {
        Process::New(y, _, body) => match &**body {
            Process::Out(s, _, _) => (s.clone(), y.clone()),
            _ => unreachable!("not a bound output"),
        },
        _ => unreachable!("not a bound output"),
    }
}

// ---------------------------------------------------------------------------
// ⦅−⦆ : processes to terms
// ---------------------------------------------------------------------------

/// Encode a process derivation as a term. `revised` selects the ⦅−⦆⁺
/// variant whose copy clause introduces a unit-let.
pub fn encode_pi2f(d: &Derivation, revised: bool) -> EResult<Term> {
    let (proc, _chan) = match &d.judgment {
        Judgment::Proc { proc, chan, .. } => (proc, chan),
        _ => return Err(EncodeError::UnsupportedRule("term judgment".into())),
    };
    let ty = d.judgment.ty();
    match d.rule {
        PiRule::OneR => Ok(Term::Unit),
        PiRule::Id => {
            let x = d.principal.clone().expect("id has a principal");
            Ok(Term::Var(x))
        }
        PiRule::OneL => {
            let x = d.principal.clone().unwrap();
            let body = encode_pi2f(&d.children[0], revised)?;
            Ok(Term::LetUnit(Box::new(Term::Var(x)), Box::new(body)))
        }
        PiRule::BangL => {
            let x = d.principal.clone().unwrap();
            let body = encode_pi2f(&d.children[0], revised)?;
            Ok(Term::LetBang(x.clone(), Box::new(Term::Var(x)), Box::new(body)))
        }
        PiRule::Copy => {
            let u = d.principal.clone().unwrap();
            let (_, y) = bout_parts(proc);
            let body = encode_pi2f(&d.children[0], revised)?;
            let sub = body.subst_term(&Term::Var(u), &y);
            if revised {
                Ok(Term::LetUnit(Box::new(Term::Unit), Box::new(sub)))
            } else {
                Ok(sub)
            }
        }
        PiRule::LolliR => {
            let Process::In(_, x, _) = proc else { unreachable!() };
            let Ty::Lolli(a, _) = ty else { unreachable!() };
            let body = encode_pi2f(&d.children[0], revised)?;
            Ok(Term::Lam(x.clone(), ty_flat(a), Box::new(body)))
        }
        PiRule::LolliL => {
            let x = d.principal.clone().unwrap();
            let p = encode_pi2f(&d.children[0], revised)?;
            let q = encode_pi2f(&d.children[1], revised)?;
            Ok(q.subst_term(&Term::app(Term::Var(x.clone()), p), &x))
        }
        PiRule::TensorR => {
            let p = encode_pi2f(&d.children[0], revised)?;
            let q = encode_pi2f(&d.children[1], revised)?;
            Ok(Term::pair(p, q))
        }
        PiRule::TensorL => {
            // x(y).P ↦ let y⊗x = x in ⦅P⦆ (received component first)
            let Process::In(x, y, _) = proc else { unreachable!() };
            let body = encode_pi2f(&d.children[0], revised)?;
            Ok(Term::LetPair(
                y.clone(),
                x.clone(),
                Box::new(Term::Var(x.clone())),
                Box::new(body),
            ))
        }
        PiRule::WithR => {
            let p = encode_pi2f(&d.children[0], revised)?;
            let q = encode_pi2f(&d.children[1], revised)?;
            Ok(Term::WithPair(Box::new(p), Box::new(q)))
        }
        PiRule::WithL1 | PiRule::WithL2 => {
            let x = d.principal.clone().unwrap();
            let body = encode_pi2f(&d.children[0], revised)?;
            let proj = if d.rule == PiRule::WithL1 {
                Term::Fst(Box::new(Term::Var(x.clone())))
            } else {
                Term::Snd(Box::new(Term::Var(x.clone())))
            };
            Ok(body.subst_term(&proj, &x))
        }
        PiRule::PlusR1 | PiRule::PlusR2 => {
            let body = encode_pi2f(&d.children[0], revised)?;
            Ok(Term::Inj(
                d.rule == PiRule::PlusR1,
                ty_flat(ty),
                Box::new(body),
            ))
        }
        PiRule::PlusL => {
            let x = d.principal.clone().unwrap();
            let p = encode_pi2f(&d.children[0], revised)?;
            let q = encode_pi2f(&d.children[1], revised)?;
            Ok(Term::CaseSum(
                Box::new(Term::Var(x.clone())),
                x.clone(),
                Box::new(p),
                x.clone(),
                Box::new(q),
            ))
        }
        PiRule::BangR => {
            let body = encode_pi2f(&d.children[0], revised)?;
            Ok(Term::bang(body))
        }
        PiRule::ForallR => {
            let Process::TyIn(_, v, _) = proc else { unreachable!() };
            let body = encode_pi2f(&d.children[0], revised)?;
            Ok(Term::TLam(v.clone(), Box::new(body)))
        }
        PiRule::ForallL => {
            let x = d.principal.clone().unwrap();
            let b = ty_flat(d.ty_arg.as_ref().unwrap());
            let body = encode_pi2f(&d.children[0], revised)?;
            Ok(body.subst_term(&Term::TApp(Box::new(Term::Var(x.clone())), b), &x))
        }
        PiRule::ExistsR => {
            let b = ty_flat(d.ty_arg.as_ref().unwrap());
            let body = encode_pi2f(&d.children[0], revised)?;
            Ok(Term::Pack(b, Box::new(body), Some(ty_flat(ty))))
        }
        PiRule::ExistsL => {
            let Process::TyIn(x, v, _) = proc else { unreachable!() };
            let body = encode_pi2f(&d.children[0], revised)?;
            Ok(Term::LetPack(
                v.clone(),
                x.clone(),
                Box::new(Term::Var(x.clone())),
                Box::new(body),
            ))
        }
        PiRule::Cut => {
            let x = d.principal.clone().unwrap();
            let p = encode_pi2f(&d.children[0], revised)?;
            let q = encode_pi2f(&d.children[1], revised)?;
            Ok(q.subst_term(&p, &x))
        }
        PiRule::CutBang => {
            let u = d.principal.clone().unwrap();
            let p = encode_pi2f(&d.children[0], revised)?;
            let q = encode_pi2f(&d.children[1], revised)?;
            Ok(q.subst_term(&p, &u))
        }
        PiRule::AndR => {
            let m = encode_data_pi2f(&d.term_children[0], revised)?;
            let p = encode_pi2f(&d.children[0], revised)?;
            Ok(Term::pair(Term::bang(m), p))
        }
        PiRule::AndL => {
            // x(y).P ↦ let y⊗x = x in let !y = y in ⦅P⦆
            let Process::In(x, y, _) = proc else { unreachable!() };
            let body = encode_pi2f(&d.children[0], revised)?;
            Ok(Term::LetPair(
                y.clone(),
                x.clone(),
                Box::new(Term::Var(x.clone())),
                Box::new(Term::LetBang(
                    y.clone(),
                    Box::new(Term::Var(y.clone())),
                    Box::new(body),
                )),
            ))
        }
        PiRule::ImplR => {
            let Process::In(_, x, _) = proc else { unreachable!() };
            let Ty::Impl(t, _) = ty else { unreachable!() };
            let body = encode_pi2f(&d.children[0], revised)?;
            Ok(Term::Lam(
                x.clone(),
                Ty::bang(ty_flat(t)),
                Box::new(Term::LetBang(
                    x.clone(),
                    Box::new(Term::Var(x.clone())),
                    Box::new(body),
                )),
            ))
        }
        PiRule::ImplL => {
            let x = d.principal.clone().unwrap();
            let m = encode_data_pi2f(&d.term_children[0], revised)?;
            let body = encode_pi2f(&d.children[0], revised)?;
            Ok(body.subst_term(&Term::app(Term::Var(x.clone()), Term::bang(m)), &x))
        }
        PiRule::MonadE => {
            // x←M←ȳᵢ;Q ↦ ⦅Q⦆{(⦅M⦆ ȳᵢ)/x}
            let Process::Spawn(x, _, ys, _) = proc else { unreachable!() };
            let m = encode_data_pi2f(&d.term_children[0], revised)?;
            let q = encode_pi2f(&d.children[0], revised)?;
            let mut app = m;
            for yi in ys {
                app = Term::app(app, Term::Var(yi.clone()));
            }
            Ok(q.subst_term(&app, x))
        }
    }
}

/// ⦅−⦆ on data-layer terms.
pub fn encode_data_pi2f(d: &LfDerivation, revised: bool) -> EResult<Term> {
    let Judgment::Term { term, .. } = &d.judgment else {
        return Err(EncodeError::UnsupportedRule("process judgment".into()));
    };
    match d.rule {
        LfRule::DVar => Ok(term.clone()),
        LfRule::DLam => {
            let Term::Lam(x, t, _) = term else { unreachable!() };
            let body = encode_data_pi2f(&d.children[0], revised)?;
            Ok(Term::Lam(
                x.clone(),
                Ty::bang(ty_flat(t)),
                Box::new(Term::LetBang(
                    x.clone(),
                    Box::new(Term::Var(x.clone())),
                    Box::new(body),
                )),
            ))
        }
        LfRule::DApp => {
            let m = encode_data_pi2f(&d.children[0], revised)?;
            let n = encode_data_pi2f(&d.children[1], revised)?;
            Ok(Term::app(m, Term::bang(n)))
        }
        LfRule::DTrue => Ok(church_bool_term().1),
        LfRule::DFalse => Ok(church_bool_term().2),
        LfRule::MonadI => {
            // {x←P←w̄ᵢ} ↦ λw₀…λwₙ.⦅P⦆
            let Term::Quote(_, _, _, ctx) = term else { unreachable!() };
            let body = encode_pi2f(&d.proc_children[0], revised)?;
            let mut out = body;
            for (wi, ti) in ctx.iter().rev() {
                out = Term::Lam(wi.clone(), ty_flat(ti), Box::new(out));
            }
            Ok(out)
        }
        other => Err(EncodeError::UnsupportedRule(other.to_string())),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::judgment::{Calculus, Contexts};
    use crate::parse::{parse_process, parse_term, parse_type};
    use crate::pityping::check_process;

    fn n(s: &str) -> Name {
        Name::new(s)
    }

    fn enc_term(src: &str, ty: &str, z: &str) -> Process {
        let m = parse_term(src).unwrap();
        let t = parse_type(ty).unwrap();
        let d = crate::ftyping::check_term(&Contexts::default(), &m, &t).unwrap();
        encode_f2pi(&d, &n(z)).unwrap()
    }

    #[test]
    fn var_clauses() {
        // ⟦x⟧_z = [x↔z] for a linear variable
        let m = Term::var("x");
        let mut ctx = Contexts::default();
        ctx.delta.push((n("x"), Ty::One));
        let d = crate::ftyping::check_term(&ctx, &m, &Ty::One).unwrap();
        let p = encode_f2pi(&d, &n("z")).unwrap();
        assert_eq!(p, Process::Fwd(n("x"), n("z")));

        // ⟦u⟧_z = (νx)u⟨x⟩.[x↔z] for an unrestricted variable
        let mut ctx = Contexts::default();
        ctx.gamma.push((n("u"), Ty::One));
        let d = crate::ftyping::check_term(&ctx, &Term::var("u"), &Ty::One).unwrap();
        let p = encode_f2pi(&d, &n("z")).unwrap();
        let expect = parse_process("send u (x) fwd x z").unwrap();
        assert!(p.alpha_eq(&expect), "{}", crate::print::print_process(&p));
    }

    #[test]
    fn lambda_clause() {
        let p = enc_term("\\x:1. x", "1 -o 1", "z");
        let expect = parse_process("z(x). fwd x z").unwrap();
        assert!(p.alpha_eq(&expect));
    }

    #[test]
    fn encoded_terms_recheck() {
        for (src, ty) in [
            ("\\x:1. x", "1 -o 1"),
            ("/\\X. \\x:X. x", "forall X. X -o X"),
            ("(\\x:1. x) ()", "1"),
            ("let 1 = () in ()", "1"),
            ("pack 1 with \\x:1. x", "exists X. X -o X"),
            ("\\y:!1. let ! u = y in u", "!1 -o 1"),
            ("\\p:1 * (1 -o 1). let a * b = p in (b * a)", "(1 * (1 -o 1)) -o ((1 -o 1) * 1)"),
            ("case inl<1 + (1 -o 1)> () of inl a => a | inr f => f ()", "1"),
            ("fst (() & ())", "1"),
        ] {
            let m = parse_term(src).unwrap();
            let t = parse_type(ty).unwrap();
            let d = crate::ftyping::check_term(&Contexts::default(), &m, &t).unwrap();
            let p = encode_f2pi(&d, &n("z")).unwrap();
            check_process(Calculus::Core, &Contexts::default(), &p, &n("z"), &t)
                .unwrap_or_else(|e| panic!("{src}: {e}\n{}", crate::print::print_process(&p)));
        }
    }

    #[test]
    fn example3_pi2f_goldens() {
        // ⦅P⦆ = ΛX.ΛY.λx:X.λy:Y.⟨x⊗y⟩
        let p = parse_process(
            "recvty z (X). recvty z (Y). z(x). z(y). send z (w: fwd x w) fwd y z",
        )
        .unwrap();
        let ty = parse_type("forall X. forall Y. X -o Y -o X * Y").unwrap();
        let d = check_process(Calculus::Core, &Contexts::default(), &p, &n("z"), &ty).unwrap();
        let m = encode_pi2f(&d, false).unwrap();
        let expect = parse_term("/\\X. /\\Y. \\x:X. \\y:Y. (x * y)").unwrap();
        assert!(m.alpha_eq(&expect), "{}", crate::print::print_term(&m));

        // ⦅Q⦆ = let x⊗y = z[1][1]⟨⟩⟨⟩ in let 1=y in x
        let q = parse_process(
            "sendty z <1>. sendty z <1>. send z (x: 0) send z (y: 0) z(w). fwd w r",
        )
        .unwrap();
        let mut ctx = Contexts::default();
        ctx.delta.push((n("z"), ty.clone()));
        let d = check_process(Calculus::Core, &ctx, &q, &n("r"), &Ty::One).unwrap();
        let m = encode_pi2f(&d, false).unwrap();
        let expect = parse_term("let x * y = z[1][1] () () in let 1 = y in x").unwrap();
        assert!(m.alpha_eq(&expect), "{}", crate::print::print_term(&m));

        // ⦅[x↔z]⦆ = x
        let mut ctx = Contexts::default();
        ctx.delta.push((n("x"), Ty::One));
        let d = check_process(
            Calculus::Core,
            &ctx,
            &Process::Fwd(n("x"), n("z")),
            &n("z"),
            &Ty::One,
        )
        .unwrap();
        assert_eq!(encode_pi2f(&d, false).unwrap(), Term::var("x"));
    }

    #[test]
    fn pi2f_output_rechecks_in_linear_f() {
        let p = parse_process(
            "new z: forall X. forall Y. X -o Y -o X * Y. \
             ((recvty z (X). recvty z (Y). z(x). z(y). send z (w: fwd x w) fwd y z) | \
              (sendty z <1>. sendty z <1>. send z (x: 0) send z (y: 0) z(w). fwd w r))",
        )
        .unwrap();
        let d = check_process(Calculus::Core, &Contexts::default(), &p, &n("r"), &Ty::One).unwrap();
        let m = encode_pi2f(&d, false).unwrap();
        crate::ftyping::check_term(&Contexts::default(), &m, &Ty::One).unwrap();
        // and it normalises to ⟨⟩ (Example 3)
        assert_eq!(crate::fsem::normalize(&m, 1000).unwrap(), Term::Unit);
    }

    #[test]
    fn vals_42_displayed_encodings() {
        // the §4.2 example, both directions
        let src = "z(x). z<{x}>. z<\\y:2. x>. 0";
        let ty = parse_type("2 => (2 /\\ (((2 -> 2) /\\ 1)))").unwrap();
        let p = parse_process(src).unwrap();
        let d = check_process(Calculus::Vals, &Contexts::default(), &p, &n("z"), &ty).unwrap();

        // ⟦−⟧: z(x).z̄⟨w⟩.(!w(u).x̄⟨y⟩.[y↔u] | z̄⟨v⟩.(!v(i).i(y).x̄⟨t⟩.[t↔i] | 0))
        let img = encode_proc_f2pi(&d).unwrap();
        let expect = parse_process(
            "z(x). send z (w: srv w(u). send x (y) fwd y u) \
             send z (v: srv v(i). i(y). send x (t) fwd t i) 0",
        )
        .unwrap();
        assert!(
            img.alpha_eq(&expect),
            "got {}",
            crate::print::print_process(&img)
        );
        // image re-checks at the translated type in the core calculus
        check_process(
            Calculus::Core,
            &Contexts::default(),
            &img,
            &n("z"),
            &ty_flat(&ty),
        )
        .unwrap();

        // ⦅−⦆: λx:!τ.let !x=x in ⟨!x ⊗ ⟨!(λy:!σ.let !y=y in x) ⊗ ⟨⟩⟩⟩
        let m = encode_pi2f(&d, false).unwrap();
        let two = "forall X. !X -o !X -o X";
        let expect = parse_term(&format!(
            "\\x:!({two}). let !x = x in (!x * (!(\\y:!({two}). let !y = y in x) * ()))"
        ))
        .unwrap();
        assert!(m.alpha_eq(&expect), "got {}", crate::print::print_term(&m));
        crate::ftyping::check_term(&Contexts::default(), &m, &ty_flat(&ty)).unwrap();
    }
}
