//! The shared type grammar.
//!
//! One AST covers session types, Linear-F types and the data layer: the
//! connectives 1, ⊸, ⊗, &, ⊕, !, ∀, ∃ and variables are common to both
//! calculi (the encodings translate types as the identity on this fragment).
//! Linear-F additionally has the boolean type 2; the value-passing calculus
//! adds `τ ∧ A` and `τ ⊃ A`; the data layer adds `τ → σ` and the contextual
//! monad `{x̄:Ā ⊢ z:A}`.

use crate::names::Name;
use std::collections::HashSet;

#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub enum Ty {
    /// 1 — no further behaviour / multiplicative unit
    One,
    /// 2 — Linear-F booleans, the basic observable
    Two,
    Var(Name),
    /// A ⊸ B
    Lolli(Box<Ty>, Box<Ty>),
    /// A ⊗ B
    Tensor(Box<Ty>, Box<Ty>),
    /// A & B
    With(Box<Ty>, Box<Ty>),
    /// A ⊕ B
    Plus(Box<Ty>, Box<Ty>),
    /// !A
    Bang(Box<Ty>),
    Forall(Name, Box<Ty>),
    Exists(Name, Box<Ty>),
    /// τ ∧ A — output a data value, continue as A
    And(Box<Ty>, Box<Ty>),
    /// τ ⊃ A — input a data value, continue as A
    Impl(Box<Ty>, Box<Ty>),
    /// τ → σ — data-layer functions
    Arrow(Box<Ty>, Box<Ty>),
    /// {x̄:Ā ⊢ z:A} — a quoted open process using x̄:Ā, offering z:A.
    /// The names are labels for positions; alpha-equivalence ignores them.
    Monad(Vec<(Name, Ty)>, Name, Box<Ty>),
}

impl Ty {
    pub fn lolli(a: Ty, b: Ty) -> Ty {
        Ty::Lolli(Box::new(a), Box::new(b))
    }
    pub fn tensor(a: Ty, b: Ty) -> Ty {
        Ty::Tensor(Box::new(a), Box::new(b))
    }
    pub fn with(a: Ty, b: Ty) -> Ty {
        Ty::With(Box::new(a), Box::new(b))
    }
    pub fn plus(a: Ty, b: Ty) -> Ty {
        Ty::Plus(Box::new(a), Box::new(b))
    }
    pub fn bang(a: Ty) -> Ty {
        Ty::Bang(Box::new(a))
    }
    pub fn forall(x: impl Into<String>, a: Ty) -> Ty {
        Ty::Forall(Name::new(x), Box::new(a))
    }
    pub fn exists(x: impl Into<String>, a: Ty) -> Ty {
        Ty::Exists(Name::new(x), Box::new(a))
    }
    pub fn and(t: Ty, a: Ty) -> Ty {
        Ty::And(Box::new(t), Box::new(a))
    }
    pub fn impl_(t: Ty, a: Ty) -> Ty {
        Ty::Impl(Box::new(t), Box::new(a))
    }
    pub fn arrow(t: Ty, s: Ty) -> Ty {
        Ty::Arrow(Box::new(t), Box::new(s))
    }
    pub fn var(x: impl Into<String>) -> Ty {
        Ty::Var(Name::new(x))
    }

    pub fn free_tyvars(&self) -> HashSet<Name> {
        let mut out = HashSet::new();
        self.collect_ftv(&mut Vec::new(), &mut out);
        out
    }

    fn collect_ftv(&self, bound: &mut Vec<Name>, out: &mut HashSet<Name>) {
        match self {
            Ty::One | Ty::Two => {}
            Ty::Var(x) => {
                if !bound.contains(x) {
                    out.insert(x.clone());
                }
            }
            Ty::Lolli(a, b)
            | Ty::Tensor(a, b)
            | Ty::With(a, b)
            | Ty::Plus(a, b)
            | Ty::And(a, b)
            | Ty::Impl(a, b)
            | Ty::Arrow(a, b) => {
                a.collect_ftv(bound, out);
                b.collect_ftv(bound, out);
            }
            Ty::Bang(a) => a.collect_ftv(bound, out),
            Ty::Forall(x, a) | Ty::Exists(x, a) => {
                bound.push(x.clone());
                a.collect_ftv(bound, out);
                bound.pop();
            }
            Ty::Monad(ctx, _, a) => {
                for (_, t) in ctx {
                    t.collect_ftv(bound, out);
                }
                a.collect_ftv(bound, out);
            }
        }
    }

    /// Capture-avoiding substitution A{B/X}.
    pub fn subst_tyvar(&self, target: &Name, b: &Ty) -> Ty {
        match self {
            Ty::One | Ty::Two => self.clone(),
            Ty::Var(x) => {
                if x == target {
                    b.clone()
                } else {
                    self.clone()
                }
            }
            Ty::Lolli(l, r) => Ty::lolli(l.subst_tyvar(target, b), r.subst_tyvar(target, b)),
            Ty::Tensor(l, r) => Ty::tensor(l.subst_tyvar(target, b), r.subst_tyvar(target, b)),
            Ty::With(l, r) => Ty::with(l.subst_tyvar(target, b), r.subst_tyvar(target, b)),
            Ty::Plus(l, r) => Ty::plus(l.subst_tyvar(target, b), r.subst_tyvar(target, b)),
            Ty::And(l, r) => Ty::and(l.subst_tyvar(target, b), r.subst_tyvar(target, b)),
            Ty::Impl(l, r) => Ty::impl_(l.subst_tyvar(target, b), r.subst_tyvar(target, b)),
            Ty::Arrow(l, r) => Ty::arrow(l.subst_tyvar(target, b), r.subst_tyvar(target, b)),
            Ty::Bang(a) => Ty::bang(a.subst_tyvar(target, b)),
            Ty::Forall(x, a) | Ty::Exists(x, a) => {
                let mk = |x: Name, a: Ty| match self {
                    Ty::Forall(..) => Ty::Forall(x, Box::new(a)),
                    _ => Ty::Exists(x, Box::new(a)),
                };
                if x == target {
                    return self.clone();
                }
                if b.free_tyvars().contains(x) {
                    // rename the binder away from fv(b)
                    let mut used: HashSet<Name> = b.free_tyvars();
                    used.extend(a.free_tyvars());
                    used.insert(target.clone());
                    let x2 = x.freshen(&used);
                    let a2 = a.subst_tyvar(x, &Ty::Var(x2.clone()));
                    mk(x2, a2.subst_tyvar(target, b))
                } else {
                    mk(x.clone(), a.subst_tyvar(target, b))
                }
            }
            Ty::Monad(ctx, z, a) => Ty::Monad(
                ctx.iter()
                    .map(|(n, t)| (n.clone(), t.subst_tyvar(target, b)))
                    .collect(),
                z.clone(),
                Box::new(a.subst_tyvar(target, b)),
            ),
        }
    }

    /// Canonical form: every bound type variable renamed to a serial index,
    /// monad labels erased. Structural equality on canonical forms is
    /// alpha-equivalence.
    pub fn canon(&self) -> Ty {
        fn go(t: &Ty, env: &mut Vec<(Name, Name)>, ctr: &mut u32) -> Ty {
            match t {
                Ty::One | Ty::Two => t.clone(),
                Ty::Var(x) => {
                    for (from, to) in env.iter().rev() {
                        if from == x {
                            return Ty::Var(to.clone());
                        }
                    }
                    t.clone()
                }
                Ty::Lolli(a, b) => Ty::lolli(go(a, env, ctr), go(b, env, ctr)),
                Ty::Tensor(a, b) => Ty::tensor(go(a, env, ctr), go(b, env, ctr)),
                Ty::With(a, b) => Ty::with(go(a, env, ctr), go(b, env, ctr)),
                Ty::Plus(a, b) => Ty::plus(go(a, env, ctr), go(b, env, ctr)),
                Ty::And(a, b) => Ty::and(go(a, env, ctr), go(b, env, ctr)),
                Ty::Impl(a, b) => Ty::impl_(go(a, env, ctr), go(b, env, ctr)),
                Ty::Arrow(a, b) => Ty::arrow(go(a, env, ctr), go(b, env, ctr)),
                Ty::Bang(a) => Ty::bang(go(a, env, ctr)),
                Ty::Forall(x, a) | Ty::Exists(x, a) => {
                    let fresh = Name::with_id("%T", *ctr);
                    *ctr += 1;
                    env.push((x.clone(), fresh.clone()));
                    let a2 = go(a, env, ctr);
                    env.pop();
                    match t {
                        Ty::Forall(..) => Ty::Forall(fresh, Box::new(a2)),
                        _ => Ty::Exists(fresh, Box::new(a2)),
                    }
                }
                Ty::Monad(ctx, _, a) => Ty::Monad(
                    ctx.iter()
                        .map(|(_, t)| (Name::new("%m"), go(t, env, ctr)))
                        .collect(),
                    Name::new("%m"),
                    Box::new(go(a, env, ctr)),
                ),
            }
        }
        go(self, &mut Vec::new(), &mut 0)
    }

    pub fn alpha_eq(&self, other: &Ty) -> bool {
        self.canon() == other.canon()
    }

    /// Well-formedness wrt a type-variable environment: fv(A) ⊆ Ω.
    pub fn wf(&self, omega: &HashSet<Name>) -> bool {
        self.free_tyvars().is_subset(omega)
    }

    /// Types admissible in the data layer: 2, data functions and monads.
    pub fn is_data(&self) -> bool {
        match self {
            Ty::Two => true,
            Ty::Arrow(t, s) => t.is_data() && s.is_data(),
            Ty::Monad(ctx, _, a) => {
                ctx.iter().all(|(_, t)| t.is_session()) && a.is_session()
            }
            _ => false,
        }
    }

    /// Types admissible as session types in the value-passing calculi.
    pub fn is_session(&self) -> bool {
        match self {
            Ty::One | Ty::Var(_) => true,
            Ty::Two | Ty::Arrow(..) | Ty::Monad(..) => false,
            Ty::Lolli(a, b) | Ty::Tensor(a, b) | Ty::With(a, b) | Ty::Plus(a, b) => {
                a.is_session() && b.is_session()
            }
            Ty::Bang(a) | Ty::Forall(_, a) | Ty::Exists(_, a) => a.is_session(),
            Ty::And(t, a) | Ty::Impl(t, a) => t.is_data() && a.is_session(),
        }
    }

    /// Nat ≜ ∀X.!((1 ⊕ X) ⊸ X) ⊸ X
    pub fn nat() -> Ty {
        let x = || Ty::var("X");
        Ty::forall(
            "X",
            Ty::lolli(Ty::bang(Ty::lolli(Ty::plus(Ty::One, x()), x())), x()),
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn subst_trivial_cases() {
        // (∀Y.X){1/X} → ∀Y.1
        let t = Ty::forall("Y", Ty::var("X"));
        assert_eq!(
            t.subst_tyvar(&Name::new("X"), &Ty::One),
            Ty::forall("Y", Ty::One)
        );
        // X{1⊸1/X} → 1⊸1
        let t = Ty::var("X");
        assert_eq!(
            t.subst_tyvar(&Name::new("X"), &Ty::lolli(Ty::One, Ty::One)),
            Ty::lolli(Ty::One, Ty::One)
        );
    }

    #[test]
    fn subst_capture_avoidance() {
        // (∃X.X⊗Y){X/Y} → ∃X′.X′⊗X
        let t = Ty::exists("X", Ty::tensor(Ty::var("X"), Ty::var("Y")));
        let got = t.subst_tyvar(&Name::new("Y"), &Ty::var("X"));
        // oracle: rename binder first, substitute naively afterwards
        let expected = Ty::Exists(
            Name::with_id("X", 1),
            Box::new(Ty::tensor(Ty::Var(Name::with_id("X", 1)), Ty::var("X"))),
        );
        assert!(got.alpha_eq(&expected));
        // the free X must not be captured
        assert!(got.free_tyvars().contains(&Name::new("X")));
    }

    #[test]
    fn alpha_eq_binders() {
        let a = Ty::forall("X", Ty::lolli(Ty::var("X"), Ty::var("Y")));
        let b = Ty::forall("Z", Ty::lolli(Ty::var("Z"), Ty::var("Y")));
        assert!(a.alpha_eq(&b));
        let c = Ty::forall("Z", Ty::lolli(Ty::var("Y"), Ty::var("Z")));
        assert!(!a.alpha_eq(&c));
    }

    #[test]
    fn free_tyvars_forall() {
        // free_tyvars(∀X.X⊸Y) → {Y}
        let t = Ty::forall("X", Ty::lolli(Ty::var("X"), Ty::var("Y")));
        let fv = t.free_tyvars();
        assert_eq!(fv.len(), 1);
        assert!(fv.contains(&Name::new("Y")));
    }

    #[test]
    fn wf_examples() {
        let mut omega = HashSet::new();
        omega.insert(Name::new("X"));
        assert!(Ty::forall("Y", Ty::lolli(Ty::var("X"), Ty::var("Y"))).wf(&omega));
        assert!(!Ty::var("X").wf(&HashSet::new()));
        // Nat is closed
        assert!(Ty::nat().wf(&HashSet::new()));
    }
}
