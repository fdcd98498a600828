//! Process and term ASTs with capture-avoiding substitution and
//! alpha-equivalence.
//!
//! Processes and terms are mutually recursive: the value-passing calculus
//! embeds terms in processes (`x⟨M⟩.P`, monadic composition) and the
//! higher-order calculus embeds processes in terms (the contextual monad
//! quote). Channel names and term variables share one namespace of [`Name`]s;
//! typing keeps them apart.

use crate::names::Name;
use crate::types::Ty;
use std::collections::HashSet;

#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub enum Process {
    /// 0
    Zero,
    /// [x↔y]
    Fwd(Name, Name),
    /// P | Q
    Par(Box<Process>, Box<Process>),
    /// (νx)P — the annotation is the cut type, filled in by the checker or
    /// the encoders; comparisons ignore it.
    New(Name, Option<Ty>, Box<Process>),
    /// x⟨y⟩.P — free output. Bound output x̄⟨y⟩.P is represented as
    /// New(y, _, Out(x, y, P)).
    Out(Name, Name, Box<Process>),
    /// x(y).P — channel or data input, depending on the type of x
    In(Name, Name, Box<Process>),
    /// !x(y).P
    Rep(Name, Name, Box<Process>),
    /// x⟨A⟩.P
    TyOut(Name, Ty, Box<Process>),
    /// x(X).P
    TyIn(Name, Name, Box<Process>),
    /// x.inl;P
    Inl(Name, Box<Process>),
    /// x.inr;P
    Inr(Name, Box<Process>),
    /// x.case(P,Q)
    Case(Name, Box<Process>, Box<Process>),
    /// x⟨M⟩.P — term output (value-passing calculus)
    TermOut(Name, Term, Box<Process>),
    /// x ← M ← ȳ; Q — monadic composition (higher-order calculus)
    Spawn(Name, Term, Vec<Name>, Box<Process>),
}

#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub enum Term {
    Var(Name),
    /// λx:A.M
    Lam(Name, Ty, Box<Term>),
    App(Box<Term>, Box<Term>),
    /// ⟨M ⊗ N⟩
    Pair(Box<Term>, Box<Term>),
    /// let x⊗y = M in N
    LetPair(Name, Name, Box<Term>, Box<Term>),
    /// !M
    Bang(Box<Term>),
    /// let !u = M in N
    LetBang(Name, Box<Term>, Box<Term>),
    /// ΛX.M
    TLam(Name, Box<Term>),
    /// M[A]
    TApp(Box<Term>, Ty),
    /// pack A with M (optionally ascribed with the full existential type,
    /// which lets the package synthesise)
    Pack(Ty, Box<Term>, Option<Ty>),
    /// let (X,y) = M in N
    LetPack(Name, Name, Box<Term>, Box<Term>),
    /// ⟨⟩
    Unit,
    /// let 1 = M in N
    LetUnit(Box<Term>, Box<Term>),
    True,
    False,
    /// inl M at the annotated sum type
    Inj(bool, Ty, Box<Term>),
    /// case M of inl x ⇒ N₁ | inr y ⇒ N₂
    CaseSum(Box<Term>, Name, Box<Term>, Name, Box<Term>),
    /// ⟨M & N⟩
    WithPair(Box<Term>, Box<Term>),
    Fst(Box<Term>),
    Snd(Box<Term>),
    /// {z ← P ← x̄:Ā} — quoted open process; z and x̄ bind into P. The
    /// optional type is the offered type of z, needed when the monad type
    /// cannot be synthesised from context.
    Quote(Name, Option<Ty>, Box<Process>, Vec<(Name, Ty)>),
}

impl Process {
    pub fn par(p: Process, q: Process) -> Process {
        Process::Par(Box::new(p), Box::new(q))
    }
    pub fn new_(x: Name, ty: Option<Ty>, p: Process) -> Process {
        Process::New(x, ty, Box::new(p))
    }
    /// Bound output sugar x̄⟨y⟩.P ≜ (νy)x⟨y⟩.P.
    pub fn bout(x: Name, y: Name, ty: Option<Ty>, p: Process) -> Process {
        Process::New(y.clone(), ty, Box::new(Process::Out(x, y, Box::new(p))))
    }

    pub fn free_names(&self) -> HashSet<Name> {
        let mut out = HashSet::new();
        self.collect_fn(&mut Vec::new(), &mut out);
        out
    }

    fn collect_fn(&self, bound: &mut Vec<Name>, out: &mut HashSet<Name>) {
        let mut hit = |n: &Name, bound: &Vec<Name>, out: &mut HashSet<Name>| {
            if !bound.contains(n) {
                out.insert(n.clone());
            }
        };
        match self {
            Process::Zero => {}
            Process::Fwd(a, b) => {
                hit(a, bound, out);
                hit(b, bound, out);
            }
            Process::Par(p, q) => {
                p.collect_fn(bound, out);
                q.collect_fn(bound, out);
            }
            Process::New(x, _, p) => {
                bound.push(x.clone());
                p.collect_fn(bound, out);
                bound.pop();
            }
            Process::Out(x, y, p) => {
                hit(x, bound, out);
                hit(y, bound, out);
                p.collect_fn(bound, out);
            }
            Process::In(x, y, p) | Process::Rep(x, y, p) => {
                hit(x, bound, out);
                bound.push(y.clone());
                p.collect_fn(bound, out);
                bound.pop();
            }
            Process::TyOut(x, _, p) => {
                hit(x, bound, out);
                p.collect_fn(bound, out);
            }
            Process::TyIn(x, _, p) => {
                hit(x, bound, out);
                p.collect_fn(bound, out);
            }
            Process::Inl(x, p) | Process::Inr(x, p) => {
                hit(x, bound, out);
                p.collect_fn(bound, out);
            }
            Process::Case(x, p, q) => {
                hit(x, bound, out);
                p.collect_fn(bound, out);
                q.collect_fn(bound, out);
            }
            Process::TermOut(x, m, p) => {
                hit(x, bound, out);
                m.collect_fn(bound, out);
                p.collect_fn(bound, out);
            }
            Process::Spawn(x, m, ys, q) => {
                m.collect_fn(bound, out);
                for y in ys {
                    hit(y, bound, out);
                }
                bound.push(x.clone());
                q.collect_fn(bound, out);
                bound.pop();
            }
        }
    }

    /// Every name occurring anywhere (free or bound); used to seed fresh
    /// supplies.
    pub fn all_names(&self) -> HashSet<Name> {
        let mut out = HashSet::new();
        self.collect_all(&mut out);
        out
    }

    fn collect_all(&self, out: &mut HashSet<Name>) {
        match self {
            Process::Zero => {}
            Process::Fwd(a, b) => {
                out.insert(a.clone());
                out.insert(b.clone());
            }
            Process::Par(p, q) => {
                p.collect_all(out);
                q.collect_all(out);
            }
            Process::New(x, _, p) => {
                out.insert(x.clone());
                p.collect_all(out);
            }
            Process::Out(x, y, p) => {
                out.insert(x.clone());
                out.insert(y.clone());
                p.collect_all(out);
            }
            Process::In(x, y, p) | Process::Rep(x, y, p) => {
                out.insert(x.clone());
                out.insert(y.clone());
                p.collect_all(out);
            }
            Process::TyOut(x, _, p) | Process::TyIn(x, _, p) => {
                out.insert(x.clone());
                p.collect_all(out);
            }
            Process::Inl(x, p) | Process::Inr(x, p) => {
                out.insert(x.clone());
                p.collect_all(out);
            }
            Process::Case(x, p, q) => {
                out.insert(x.clone());
                p.collect_all(out);
                q.collect_all(out);
            }
            Process::TermOut(x, m, p) => {
                out.insert(x.clone());
                m.collect_all(out);
                p.collect_all(out);
            }
            Process::Spawn(x, m, ys, q) => {
                out.insert(x.clone());
                m.collect_all(out);
                out.extend(ys.iter().cloned());
                q.collect_all(out);
            }
        }
    }

    /// P{y/x}: rename free occurrences of x to y, capture avoided.
    pub fn subst_name(&self, y: &Name, x: &Name) -> Process {
        if x == y {
            return self.clone();
        }
        let r = |n: &Name| if n == x { y.clone() } else { n.clone() };
        match self {
            Process::Zero => Process::Zero,
            Process::Fwd(a, b) => Process::Fwd(r(a), r(b)),
            Process::Par(p, q) => Process::par(p.subst_name(y, x), q.subst_name(y, x)),
            Process::New(b, t, p) => {
                if b == x {
                    return self.clone();
                }
                let (b2, p2) = rename_binder_p(b, p, x, y);
                Process::New(b2, t.clone(), Box::new(p2.subst_name(y, x)))
            }
            Process::Out(a, b, p) => Process::Out(r(a), r(b), Box::new(p.subst_name(y, x))),
            Process::In(a, b, p) => {
                if b == x {
                    return Process::In(r(a), b.clone(), p.clone());
                }
                let (b2, p2) = rename_binder_p(b, p, x, y);
                Process::In(r(a), b2, Box::new(p2.subst_name(y, x)))
            }
            Process::Rep(a, b, p) => {
                if b == x {
                    return Process::Rep(r(a), b.clone(), p.clone());
                }
                let (b2, p2) = rename_binder_p(b, p, x, y);
                Process::Rep(r(a), b2, Box::new(p2.subst_name(y, x)))
            }
            Process::TyOut(a, t, p) => {
                Process::TyOut(r(a), t.clone(), Box::new(p.subst_name(y, x)))
            }
            Process::TyIn(a, v, p) => Process::TyIn(r(a), v.clone(), Box::new(p.subst_name(y, x))),
            Process::Inl(a, p) => Process::Inl(r(a), Box::new(p.subst_name(y, x))),
            Process::Inr(a, p) => Process::Inr(r(a), Box::new(p.subst_name(y, x))),
            Process::Case(a, p, q) => Process::Case(
                r(a),
                Box::new(p.subst_name(y, x)),
                Box::new(q.subst_name(y, x)),
            ),
            Process::TermOut(a, m, p) => Process::TermOut(
                r(a),
                m.subst_name(y, x),
                Box::new(p.subst_name(y, x)),
            ),
            Process::Spawn(c, m, ys, q) => {
                let m2 = m.subst_name(y, x);
                let ys2: Vec<Name> = ys.iter().map(&r).collect();
                if c == x {
                    return Process::Spawn(c.clone(), m2, ys2, q.clone());
                }
                let (c2, q2) = rename_binder_p(c, q, x, y);
                Process::Spawn(c2, m2, ys2, Box::new(q2.subst_name(y, x)))
            }
        }
    }

    /// Replace the free data variable `x` by term `m` in embedded terms.
    pub fn subst_term(&self, m: &Term, x: &Name) -> Process {
        match self {
            Process::Zero | Process::Fwd(..) => self.clone(),
            Process::Par(p, q) => Process::par(p.subst_term(m, x), q.subst_term(m, x)),
            Process::New(b, t, p) => {
                if b == x {
                    return self.clone();
                }
                let (b2, p2) = rename_binder_term_p(b, p, x, m);
                Process::New(b2, t.clone(), Box::new(p2.subst_term(m, x)))
            }
            Process::Out(a, b, p) => {
                Process::Out(a.clone(), b.clone(), Box::new(p.subst_term(m, x)))
            }
            Process::In(a, b, p) => {
                if b == x {
                    return self.clone();
                }
                let (b2, p2) = rename_binder_term_p(b, p, x, m);
                Process::In(a.clone(), b2, Box::new(p2.subst_term(m, x)))
            }
            Process::Rep(a, b, p) => {
                if b == x {
                    return self.clone();
                }
                let (b2, p2) = rename_binder_term_p(b, p, x, m);
                Process::Rep(a.clone(), b2, Box::new(p2.subst_term(m, x)))
            }
            Process::TyOut(a, t, p) => {
                Process::TyOut(a.clone(), t.clone(), Box::new(p.subst_term(m, x)))
            }
            Process::TyIn(a, v, p) => {
                Process::TyIn(a.clone(), v.clone(), Box::new(p.subst_term(m, x)))
            }
            Process::Inl(a, p) => Process::Inl(a.clone(), Box::new(p.subst_term(m, x))),
            Process::Inr(a, p) => Process::Inr(a.clone(), Box::new(p.subst_term(m, x))),
            Process::Case(a, p, q) => Process::Case(
                a.clone(),
                Box::new(p.subst_term(m, x)),
                Box::new(q.subst_term(m, x)),
            ),
            Process::TermOut(a, n, p) => Process::TermOut(
                a.clone(),
                n.subst_term(m, x),
                Box::new(p.subst_term(m, x)),
            ),
            Process::Spawn(c, n, ys, q) => {
                let n2 = n.subst_term(m, x);
                if c == x {
                    return Process::Spawn(c.clone(), n2, ys.clone(), q.clone());
                }
                let (c2, q2) = rename_binder_term_p(c, q, x, m);
                Process::Spawn(c2, n2, ys.clone(), Box::new(q2.subst_term(m, x)))
            }
        }
    }

    /// P{B/X} on embedded types.
    pub fn subst_tyvar(&self, target: &Name, b: &Ty) -> Process {
        match self {
            Process::Zero | Process::Fwd(..) => self.clone(),
            Process::Par(p, q) => {
                Process::par(p.subst_tyvar(target, b), q.subst_tyvar(target, b))
            }
            Process::New(x, t, p) => Process::New(
                x.clone(),
                t.as_ref().map(|t| t.subst_tyvar(target, b)),
                Box::new(p.subst_tyvar(target, b)),
            ),
            Process::Out(a, y, p) => {
                Process::Out(a.clone(), y.clone(), Box::new(p.subst_tyvar(target, b)))
            }
            Process::In(a, y, p) => {
                Process::In(a.clone(), y.clone(), Box::new(p.subst_tyvar(target, b)))
            }
            Process::Rep(a, y, p) => {
                Process::Rep(a.clone(), y.clone(), Box::new(p.subst_tyvar(target, b)))
            }
            Process::TyOut(a, t, p) => Process::TyOut(
                a.clone(),
                t.subst_tyvar(target, b),
                Box::new(p.subst_tyvar(target, b)),
            ),
            Process::TyIn(a, v, p) => {
                if v == target {
                    return self.clone();
                }
                if b.free_tyvars().contains(v) {
                    let mut used: HashSet<Name> = b.free_tyvars();
                    used.insert(target.clone());
                    p.collect_tyvars(&mut used);
                    let v2 = v.freshen(&used);
                    let p2 = p.subst_tyvar(v, &Ty::Var(v2.clone()));
                    Process::TyIn(a.clone(), v2, Box::new(p2.subst_tyvar(target, b)))
                } else {
                    Process::TyIn(a.clone(), v.clone(), Box::new(p.subst_tyvar(target, b)))
                }
            }
            Process::Inl(a, p) => Process::Inl(a.clone(), Box::new(p.subst_tyvar(target, b))),
            Process::Inr(a, p) => Process::Inr(a.clone(), Box::new(p.subst_tyvar(target, b))),
            Process::Case(a, p, q) => Process::Case(
                a.clone(),
                Box::new(p.subst_tyvar(target, b)),
                Box::new(q.subst_tyvar(target, b)),
            ),
            Process::TermOut(a, m, p) => Process::TermOut(
                a.clone(),
                m.subst_tyvar(target, b),
                Box::new(p.subst_tyvar(target, b)),
            ),
            Process::Spawn(c, m, ys, q) => Process::Spawn(
                c.clone(),
                m.subst_tyvar(target, b),
                ys.clone(),
                Box::new(q.subst_tyvar(target, b)),
            ),
        }
    }

    fn collect_tyvars(&self, out: &mut HashSet<Name>) {
        match self {
            Process::Zero | Process::Fwd(..) => {}
            Process::Par(p, q) | Process::Case(_, p, q) => {
                p.collect_tyvars(out);
                q.collect_tyvars(out);
            }
            Process::New(_, t, p) => {
                if let Some(t) = t {
                    out.extend(t.free_tyvars());
                }
                p.collect_tyvars(out);
            }
            Process::Out(_, _, p)
            | Process::In(_, _, p)
            | Process::Rep(_, _, p)
            | Process::Inl(_, p)
            | Process::Inr(_, p) => p.collect_tyvars(out),
            Process::TyOut(_, t, p) => {
                out.extend(t.free_tyvars());
                p.collect_tyvars(out);
            }
            Process::TyIn(_, v, p) => {
                let mut inner = HashSet::new();
                p.collect_tyvars(&mut inner);
                inner.remove(v);
                out.extend(inner);
            }
            Process::TermOut(_, m, p) => {
                m.collect_tyvars(out);
                p.collect_tyvars(out);
            }
            Process::Spawn(_, m, _, q) => {
                m.collect_tyvars(out);
                q.collect_tyvars(out);
            }
        }
    }

    /// Canonical alpha-form: binders renamed serially, annotations dropped.
    pub fn canon(&self) -> Process {
        let mut ctr = Ctr::default();
        self.canon_in(&mut Vec::new(), &mut Vec::new(), &mut ctr)
    }

    fn canon_in(&self, env: &mut Vec<(Name, Name)>, tenv: &mut Vec<(Name, Name)>, ctr: &mut Ctr) -> Process {
        let r = |n: &Name, env: &Vec<(Name, Name)>| -> Name {
            for (from, to) in env.iter().rev() {
                if from == n {
                    return to.clone();
                }
            }
            n.clone()
        };
        match self {
            Process::Zero => Process::Zero,
            Process::Fwd(a, b) => Process::Fwd(r(a, env), r(b, env)),
            Process::Par(p, q) => {
                Process::par(p.canon_in(env, tenv, ctr), q.canon_in(env, tenv, ctr))
            }
            Process::New(x, _, p) => {
                let fresh = ctr.name();
                env.push((x.clone(), fresh.clone()));
                let p2 = p.canon_in(env, tenv, ctr);
                env.pop();
                Process::New(fresh, None, Box::new(p2))
            }
            Process::Out(a, b, p) => Process::Out(
                r(a, env),
                r(b, env),
                Box::new(p.canon_in(env, tenv, ctr)),
            ),
            Process::In(a, b, p) => {
                let fresh = ctr.name();
                let a2 = r(a, env);
                env.push((b.clone(), fresh.clone()));
                let p2 = p.canon_in(env, tenv, ctr);
                env.pop();
                Process::In(a2, fresh, Box::new(p2))
            }
            Process::Rep(a, b, p) => {
                let fresh = ctr.name();
                let a2 = r(a, env);
                env.push((b.clone(), fresh.clone()));
                let p2 = p.canon_in(env, tenv, ctr);
                env.pop();
                Process::Rep(a2, fresh, Box::new(p2))
            }
            Process::TyOut(a, t, p) => Process::TyOut(
                r(a, env),
                canon_ty_in(t, tenv, ctr),
                Box::new(p.canon_in(env, tenv, ctr)),
            ),
            Process::TyIn(a, v, p) => {
                let fresh = ctr.name();
                let a2 = r(a, env);
                tenv.push((v.clone(), fresh.clone()));
                let p2 = p.canon_in(env, tenv, ctr);
                tenv.pop();
                Process::TyIn(a2, fresh, Box::new(p2))
            }
            Process::Inl(a, p) => Process::Inl(r(a, env), Box::new(p.canon_in(env, tenv, ctr))),
            Process::Inr(a, p) => Process::Inr(r(a, env), Box::new(p.canon_in(env, tenv, ctr))),
            Process::Case(a, p, q) => Process::Case(
                r(a, env),
                Box::new(p.canon_in(env, tenv, ctr)),
                Box::new(q.canon_in(env, tenv, ctr)),
            ),
            Process::TermOut(a, m, p) => Process::TermOut(
                r(a, env),
                m.canon_in(env, tenv, ctr),
                Box::new(p.canon_in(env, tenv, ctr)),
            ),
            Process::Spawn(c, m, ys, q) => {
                let m2 = m.canon_in(env, tenv, ctr);
                let ys2 = ys.iter().map(|y| r(y, env)).collect();
                let fresh = ctr.name();
                env.push((c.clone(), fresh.clone()));
                let q2 = q.canon_in(env, tenv, ctr);
                env.pop();
                Process::Spawn(fresh, m2, ys2, Box::new(q2))
            }
        }
    }

    pub fn alpha_eq(&self, other: &Process) -> bool {
        self.canon() == other.canon()
    }
}

impl Term {
    pub fn lam(x: impl Into<String>, ty: Ty, m: Term) -> Term {
        Term::Lam(Name::new(x), ty, Box::new(m))
    }
    pub fn app(m: Term, n: Term) -> Term {
        Term::App(Box::new(m), Box::new(n))
    }
    pub fn pair(m: Term, n: Term) -> Term {
        Term::Pair(Box::new(m), Box::new(n))
    }
    pub fn bang(m: Term) -> Term {
        Term::Bang(Box::new(m))
    }
    pub fn tlam(x: impl Into<String>, m: Term) -> Term {
        Term::TLam(Name::new(x), Box::new(m))
    }
    pub fn tapp(m: Term, a: Ty) -> Term {
        Term::TApp(Box::new(m), a)
    }
    pub fn var(x: impl Into<String>) -> Term {
        Term::Var(Name::new(x))
    }
    pub fn let_bang(u: impl Into<String>, m: Term, n: Term) -> Term {
        Term::LetBang(Name::new(u), Box::new(m), Box::new(n))
    }
    pub fn let_pair(x: impl Into<String>, y: impl Into<String>, m: Term, n: Term) -> Term {
        Term::LetPair(Name::new(x), Name::new(y), Box::new(m), Box::new(n))
    }
    pub fn let_unit(m: Term, n: Term) -> Term {
        Term::LetUnit(Box::new(m), Box::new(n))
    }

    pub fn free_vars(&self) -> HashSet<Name> {
        let mut out = HashSet::new();
        self.collect_fn(&mut Vec::new(), &mut out);
        out
    }

    fn collect_fn(&self, bound: &mut Vec<Name>, out: &mut HashSet<Name>) {
        match self {
            Term::Var(x) => {
                if !bound.contains(x) {
                    out.insert(x.clone());
                }
            }
            Term::Unit | Term::True | Term::False => {}
            Term::Lam(x, _, m) => {
                bound.push(x.clone());
                m.collect_fn(bound, out);
                bound.pop();
            }
            Term::App(m, n) | Term::Pair(m, n) | Term::WithPair(m, n) | Term::LetUnit(m, n) => {
                m.collect_fn(bound, out);
                n.collect_fn(bound, out);
            }
            Term::LetPair(x, y, m, n) => {
                m.collect_fn(bound, out);
                bound.push(x.clone());
                bound.push(y.clone());
                n.collect_fn(bound, out);
                bound.pop();
                bound.pop();
            }
            Term::Bang(m) | Term::Fst(m) | Term::Snd(m) | Term::Inj(_, _, m) => {
                m.collect_fn(bound, out)
            }
            Term::LetBang(u, m, n) => {
                m.collect_fn(bound, out);
                bound.push(u.clone());
                n.collect_fn(bound, out);
                bound.pop();
            }
            Term::TLam(_, m) => m.collect_fn(bound, out),
            Term::TApp(m, _) => m.collect_fn(bound, out),
            Term::Pack(_, m, _) => m.collect_fn(bound, out),
            Term::LetPack(_, y, m, n) => {
                m.collect_fn(bound, out);
                bound.push(y.clone());
                n.collect_fn(bound, out);
                bound.pop();
            }
            Term::CaseSum(m, x, n1, y, n2) => {
                m.collect_fn(bound, out);
                bound.push(x.clone());
                n1.collect_fn(bound, out);
                bound.pop();
                bound.push(y.clone());
                n2.collect_fn(bound, out);
                bound.pop();
            }
            Term::Quote(z, _, p, ctx) => {
                bound.push(z.clone());
                for (x, _) in ctx {
                    bound.push(x.clone());
                }
                p.collect_fn(bound, out);
                for _ in ctx {
                    bound.pop();
                }
                bound.pop();
            }
        }
    }

    pub fn all_names(&self) -> HashSet<Name> {
        let mut out = HashSet::new();
        self.collect_all(&mut out);
        out
    }

    fn collect_all(&self, out: &mut HashSet<Name>) {
        match self {
            Term::Var(x) => {
                out.insert(x.clone());
            }
            Term::Unit | Term::True | Term::False => {}
            Term::Lam(x, _, m) => {
                out.insert(x.clone());
                m.collect_all(out);
            }
            Term::App(m, n) | Term::Pair(m, n) | Term::WithPair(m, n) | Term::LetUnit(m, n) => {
                m.collect_all(out);
                n.collect_all(out);
            }
            Term::LetPair(x, y, m, n) => {
                out.insert(x.clone());
                out.insert(y.clone());
                m.collect_all(out);
                n.collect_all(out);
            }
            Term::Bang(m) | Term::Fst(m) | Term::Snd(m) | Term::Inj(_, _, m) => m.collect_all(out),
            Term::LetBang(u, m, n) => {
                out.insert(u.clone());
                m.collect_all(out);
                n.collect_all(out);
            }
            Term::TLam(_, m) | Term::TApp(m, _) | Term::Pack(_, m, _) => m.collect_all(out),
            Term::LetPack(_, y, m, n) => {
                out.insert(y.clone());
                m.collect_all(out);
                n.collect_all(out);
            }
            Term::CaseSum(m, x, n1, y, n2) => {
                out.insert(x.clone());
                out.insert(y.clone());
                m.collect_all(out);
                n1.collect_all(out);
                n2.collect_all(out);
            }
            Term::Quote(z, _, p, ctx) => {
                out.insert(z.clone());
                out.extend(ctx.iter().map(|(x, _)| x.clone()));
                p.collect_all(out);
            }
        }
    }

    /// M{y/x}: rename a free name.
    pub fn subst_name(&self, y: &Name, x: &Name) -> Term {
        self.subst_term(&Term::Var(y.clone()), x)
    }

    /// M{N/x}: capture-avoiding term substitution.
    pub fn subst_term(&self, n: &Term, x: &Name) -> Term {
        match self {
            Term::Var(v) => {
                if v == x {
                    n.clone()
                } else {
                    self.clone()
                }
            }
            Term::Unit | Term::True | Term::False => self.clone(),
            Term::Lam(b, ty, m) => {
                if b == x {
                    return self.clone();
                }
                let (b2, m2) = rename_binder_t(b, m, x, n);
                Term::Lam(b2, ty.clone(), Box::new(m2.subst_term(n, x)))
            }
            Term::App(m1, m2) => Term::app(m1.subst_term(n, x), m2.subst_term(n, x)),
            Term::Pair(m1, m2) => Term::pair(m1.subst_term(n, x), m2.subst_term(n, x)),
            Term::WithPair(m1, m2) => {
                Term::WithPair(Box::new(m1.subst_term(n, x)), Box::new(m2.subst_term(n, x)))
            }
            Term::LetPair(a, b, m1, m2) => {
                let m1s = m1.subst_term(n, x);
                // rename both binders if needed
                let (a2, m2a) = rename_binder_t(a, m2, x, n);
                let shadowed = a == x;
                let (b2, m2b) = if shadowed {
                    (b.clone(), m2a)
                } else {
                    rename_binder_t2(b, &m2a, x, n)
                };
                if a == x || b2 == *x {
                    return Term::LetPair(a2, b2, Box::new(m1s), Box::new(m2b));
                }
                Term::LetPair(a2, b2, Box::new(m1s), Box::new(m2b.subst_term(n, x)))
            }
            Term::Bang(m) => Term::bang(m.subst_term(n, x)),
            Term::LetBang(u, m1, m2) => {
                let m1s = m1.subst_term(n, x);
                let (u2, m2r) = rename_binder_t(u, m2, x, n);
                if u == x {
                    return Term::LetBang(u2, Box::new(m1s), Box::new(m2r));
                }
                Term::LetBang(u2, Box::new(m1s), Box::new(m2r.subst_term(n, x)))
            }
            Term::TLam(v, m) => Term::TLam(v.clone(), Box::new(m.subst_term(n, x))),
            Term::TApp(m, a) => Term::TApp(Box::new(m.subst_term(n, x)), a.clone()),
            Term::Pack(a, m, asc) => Term::Pack(a.clone(), Box::new(m.subst_term(n, x)), asc.clone()),
            Term::LetPack(v, y, m1, m2) => {
                let m1s = m1.subst_term(n, x);
                let (y2, m2r) = rename_binder_t(y, m2, x, n);
                if y == x {
                    return Term::LetPack(v.clone(), y2, Box::new(m1s), Box::new(m2r));
                }
                Term::LetPack(v.clone(), y2, Box::new(m1s), Box::new(m2r.subst_term(n, x)))
            }
            Term::LetUnit(m1, m2) => Term::let_unit(m1.subst_term(n, x), m2.subst_term(n, x)),
            Term::Inj(side, ty, m) => Term::Inj(*side, ty.clone(), Box::new(m.subst_term(n, x))),
            Term::CaseSum(m, a, n1, b, n2) => {
                let ms = m.subst_term(n, x);
                let (a2, n1r) = rename_binder_t(a, n1, x, n);
                let n1s = if a == x { n1r } else { n1r.subst_term(n, x) };
                let (b2, n2r) = rename_binder_t(b, n2, x, n);
                let n2s = if b == x { n2r } else { n2r.subst_term(n, x) };
                Term::CaseSum(Box::new(ms), a2, Box::new(n1s), b2, Box::new(n2s))
            }
            Term::Fst(m) => Term::Fst(Box::new(m.subst_term(n, x))),
            Term::Snd(m) => Term::Snd(Box::new(m.subst_term(n, x))),
            Term::Quote(z, ann, p, ctx) => {
                if z == x || ctx.iter().any(|(c, _)| c == x) {
                    return self.clone();
                }
                let ann = ann.clone();
                // freshen interface names that clash with fv(n)
                let nfv = n.free_vars();
                let mut z = z.clone();
                let mut p = (**p).clone();
                let mut ctx = ctx.clone();
                let mut used: HashSet<Name> = self.all_names();
                used.extend(nfv.iter().cloned());
                if nfv.contains(&z) {
                    let z2 = z.freshen(&used);
                    used.insert(z2.clone());
                    p = p.subst_name(&z2, &z);
                    z = z2;
                }
                for (c, _) in ctx.iter_mut() {
                    if nfv.contains(c) {
                        let c2 = c.freshen(&used);
                        used.insert(c2.clone());
                        p = p.subst_name(&c2, c);
                        *c = c2;
                    }
                }
                Term::Quote(z, ann, Box::new(p.subst_term(n, x)), ctx)
            }
        }
    }

    /// M{B/X} on embedded types.
    pub fn subst_tyvar(&self, target: &Name, b: &Ty) -> Term {
        let s = |t: &Ty| t.subst_tyvar(target, b);
        match self {
            Term::Var(_) | Term::Unit | Term::True | Term::False => self.clone(),
            Term::Lam(x, ty, m) => Term::Lam(x.clone(), s(ty), Box::new(m.subst_tyvar(target, b))),
            Term::App(m, n) => Term::app(m.subst_tyvar(target, b), n.subst_tyvar(target, b)),
            Term::Pair(m, n) => Term::pair(m.subst_tyvar(target, b), n.subst_tyvar(target, b)),
            Term::WithPair(m, n) => Term::WithPair(
                Box::new(m.subst_tyvar(target, b)),
                Box::new(n.subst_tyvar(target, b)),
            ),
            Term::LetPair(x, y, m, n) => Term::LetPair(
                x.clone(),
                y.clone(),
                Box::new(m.subst_tyvar(target, b)),
                Box::new(n.subst_tyvar(target, b)),
            ),
            Term::Bang(m) => Term::bang(m.subst_tyvar(target, b)),
            Term::LetBang(u, m, n) => Term::LetBang(
                u.clone(),
                Box::new(m.subst_tyvar(target, b)),
                Box::new(n.subst_tyvar(target, b)),
            ),
            Term::TLam(v, m) => {
                if v == target {
                    return self.clone();
                }
                if b.free_tyvars().contains(v) {
                    let mut used: HashSet<Name> = b.free_tyvars();
                    used.insert(target.clone());
                    m.collect_tyvars(&mut used);
                    let v2 = v.freshen(&used);
                    let m2 = m.subst_tyvar(v, &Ty::Var(v2.clone()));
                    Term::TLam(v2, Box::new(m2.subst_tyvar(target, b)))
                } else {
                    Term::TLam(v.clone(), Box::new(m.subst_tyvar(target, b)))
                }
            }
            Term::TApp(m, a) => Term::TApp(Box::new(m.subst_tyvar(target, b)), s(a)),
            Term::Pack(a, m, asc) => Term::Pack(s(a), Box::new(m.subst_tyvar(target, b)), asc.as_ref().map(s)),
            Term::LetPack(v, y, m, n) => {
                if v == target {
                    return Term::LetPack(
                        v.clone(),
                        y.clone(),
                        Box::new(m.subst_tyvar(target, b)),
                        n.clone(),
                    );
                }
                if b.free_tyvars().contains(v) {
                    let mut used: HashSet<Name> = b.free_tyvars();
                    used.insert(target.clone());
                    n.collect_tyvars(&mut used);
                    let v2 = v.freshen(&used);
                    let n2 = n.subst_tyvar(v, &Ty::Var(v2.clone()));
                    Term::LetPack(
                        v2,
                        y.clone(),
                        Box::new(m.subst_tyvar(target, b)),
                        Box::new(n2.subst_tyvar(target, b)),
                    )
                } else {
                    Term::LetPack(
                        v.clone(),
                        y.clone(),
                        Box::new(m.subst_tyvar(target, b)),
                        Box::new(n.subst_tyvar(target, b)),
                    )
                }
            }
            Term::LetUnit(m, n) => {
                Term::let_unit(m.subst_tyvar(target, b), n.subst_tyvar(target, b))
            }
            Term::Inj(side, ty, m) => {
                Term::Inj(*side, s(ty), Box::new(m.subst_tyvar(target, b)))
            }
            Term::CaseSum(m, x, n1, y, n2) => Term::CaseSum(
                Box::new(m.subst_tyvar(target, b)),
                x.clone(),
                Box::new(n1.subst_tyvar(target, b)),
                y.clone(),
                Box::new(n2.subst_tyvar(target, b)),
            ),
            Term::Fst(m) => Term::Fst(Box::new(m.subst_tyvar(target, b))),
            Term::Snd(m) => Term::Snd(Box::new(m.subst_tyvar(target, b))),
            Term::Quote(z, ann, p, ctx) => Term::Quote(
                z.clone(),
                ann.as_ref().map(|t| t.subst_tyvar(target, b)),
                Box::new(p.subst_tyvar(target, b)),
                ctx.iter().map(|(c, t)| (c.clone(), s(t))).collect(),
            ),
        }
    }

    fn collect_tyvars(&self, out: &mut HashSet<Name>) {
        match self {
            Term::Var(_) | Term::Unit | Term::True | Term::False => {}
            Term::Lam(_, ty, m) => {
                out.extend(ty.free_tyvars());
                m.collect_tyvars(out);
            }
            Term::App(m, n)
            | Term::Pair(m, n)
            | Term::WithPair(m, n)
            | Term::LetUnit(m, n)
            | Term::LetPair(_, _, m, n)
            | Term::LetBang(_, m, n) => {
                m.collect_tyvars(out);
                n.collect_tyvars(out);
            }
            Term::Bang(m) | Term::Fst(m) | Term::Snd(m) => m.collect_tyvars(out),
            Term::TLam(v, m) => {
                let mut inner = HashSet::new();
                m.collect_tyvars(&mut inner);
                inner.remove(v);
                out.extend(inner);
            }
            Term::TApp(m, a) => {
                out.extend(a.free_tyvars());
                m.collect_tyvars(out);
            }
            Term::Pack(a, m, asc) => {
                out.extend(a.free_tyvars());
                if let Some(t) = asc {
                    out.extend(t.free_tyvars());
                }
                m.collect_tyvars(out);
            }
            Term::LetPack(v, _, m, n) => {
                m.collect_tyvars(out);
                let mut inner = HashSet::new();
                n.collect_tyvars(&mut inner);
                inner.remove(v);
                out.extend(inner);
            }
            Term::Inj(_, ty, m) => {
                out.extend(ty.free_tyvars());
                m.collect_tyvars(out);
            }
            Term::CaseSum(m, _, n1, _, n2) => {
                m.collect_tyvars(out);
                n1.collect_tyvars(out);
                n2.collect_tyvars(out);
            }
            Term::Quote(_, ann, p, ctx) => {
                if let Some(t) = ann {
                    out.extend(t.free_tyvars());
                }
                p.collect_tyvars(out);
                for (_, t) in ctx {
                    out.extend(t.free_tyvars());
                }
            }
        }
    }

    pub fn canon(&self) -> Term {
        let mut ctr = Ctr::default();
        self.canon_in(&mut Vec::new(), &mut Vec::new(), &mut ctr)
    }

    fn canon_in(&self, env: &mut Vec<(Name, Name)>, tenv: &mut Vec<(Name, Name)>, ctr: &mut Ctr) -> Term {
        let r = |n: &Name, env: &Vec<(Name, Name)>| -> Name {
            for (from, to) in env.iter().rev() {
                if from == n {
                    return to.clone();
                }
            }
            n.clone()
        };
        match self {
            Term::Var(x) => Term::Var(r(x, env)),
            Term::Unit | Term::True | Term::False => self.clone(),
            Term::Lam(x, ty, m) => {
                let fresh = ctr.name();
                let ty2 = canon_ty_in(ty, tenv, ctr);
                env.push((x.clone(), fresh.clone()));
                let m2 = m.canon_in(env, tenv, ctr);
                env.pop();
                Term::Lam(fresh, ty2, Box::new(m2))
            }
            Term::App(m, n) => Term::app(m.canon_in(env, tenv, ctr), n.canon_in(env, tenv, ctr)),
            Term::Pair(m, n) => Term::pair(m.canon_in(env, tenv, ctr), n.canon_in(env, tenv, ctr)),
            Term::WithPair(m, n) => Term::WithPair(
                Box::new(m.canon_in(env, tenv, ctr)),
                Box::new(n.canon_in(env, tenv, ctr)),
            ),
            Term::LetPair(x, y, m, n) => {
                let m2 = m.canon_in(env, tenv, ctr);
                let fx = ctr.name();
                let fy = ctr.name();
                env.push((x.clone(), fx.clone()));
                env.push((y.clone(), fy.clone()));
                let n2 = n.canon_in(env, tenv, ctr);
                env.pop();
                env.pop();
                Term::LetPair(fx, fy, Box::new(m2), Box::new(n2))
            }
            Term::Bang(m) => Term::bang(m.canon_in(env, tenv, ctr)),
            Term::LetBang(u, m, n) => {
                let m2 = m.canon_in(env, tenv, ctr);
                let fu = ctr.name();
                env.push((u.clone(), fu.clone()));
                let n2 = n.canon_in(env, tenv, ctr);
                env.pop();
                Term::LetBang(fu, Box::new(m2), Box::new(n2))
            }
            Term::TLam(v, m) => {
                let fv = ctr.name();
                tenv.push((v.clone(), fv.clone()));
                let m2 = m.canon_in(env, tenv, ctr);
                tenv.pop();
                Term::TLam(fv, Box::new(m2))
            }
            Term::TApp(m, a) => {
                Term::TApp(Box::new(m.canon_in(env, tenv, ctr)), canon_ty_in(a, tenv, ctr))
            }
            Term::Pack(a, m, asc) => Term::Pack(
                canon_ty_in(a, tenv, ctr),
                Box::new(m.canon_in(env, tenv, ctr)),
                asc.as_ref().map(|t| canon_ty_in(t, tenv, ctr)),
            ),
            Term::LetPack(v, y, m, n) => {
                let m2 = m.canon_in(env, tenv, ctr);
                let fv = ctr.name();
                let fy = ctr.name();
                tenv.push((v.clone(), fv.clone()));
                env.push((y.clone(), fy.clone()));
                let n2 = n.canon_in(env, tenv, ctr);
                env.pop();
                tenv.pop();
                Term::LetPack(fv, fy, Box::new(m2), Box::new(n2))
            }
            Term::LetUnit(m, n) => {
                Term::let_unit(m.canon_in(env, tenv, ctr), n.canon_in(env, tenv, ctr))
            }
            Term::Inj(side, ty, m) => Term::Inj(
                *side,
                canon_ty_in(ty, tenv, ctr),
                Box::new(m.canon_in(env, tenv, ctr)),
            ),
            Term::CaseSum(m, x, n1, y, n2) => {
                let ms = m.canon_in(env, tenv, ctr);
                let fx = ctr.name();
                env.push((x.clone(), fx.clone()));
                let n1s = n1.canon_in(env, tenv, ctr);
                env.pop();
                let fy = ctr.name();
                env.push((y.clone(), fy.clone()));
                let n2s = n2.canon_in(env, tenv, ctr);
                env.pop();
                Term::CaseSum(Box::new(ms), fx, Box::new(n1s), fy, Box::new(n2s))
            }
            Term::Fst(m) => Term::Fst(Box::new(m.canon_in(env, tenv, ctr))),
            Term::Snd(m) => Term::Snd(Box::new(m.canon_in(env, tenv, ctr))),
            Term::Quote(z, _, p, ctx) => {
                let fz = ctr.name();
                let mut ctx2 = Vec::new();
                env.push((z.clone(), fz.clone()));
                for (c, t) in ctx {
                    let fc = ctr.name();
                    env.push((c.clone(), fc.clone()));
                    ctx2.push((fc, canon_ty_in(t, tenv, ctr)));
                }
                let p2 = p.canon_in(env, tenv, ctr);
                for _ in ctx {
                    env.pop();
                }
                env.pop();
                Term::Quote(fz, None, Box::new(p2), ctx2)
            }
        }
    }

    pub fn alpha_eq(&self, other: &Term) -> bool {
        self.canon() == other.canon()
    }
}

#[derive(Default)]
struct Ctr(u32);

impl Ctr {
    fn name(&mut self) -> Name {
        let n = Name::with_id("%", self.0);
        self.0 += 1;
        n
    }
}

fn canon_ty_in(t: &Ty, tenv: &Vec<(Name, Name)>, _ctr: &mut Ctr) -> Ty {
    // apply the pending tyvar renamings, then canonicalise the type's own
    // binders
    let mut t = t.clone();
    for (from, to) in tenv.iter() {
        t = t.subst_tyvar(from, &Ty::Var(to.clone()));
    }
    t.canon()
}

fn rename_binder_p(b: &Name, body: &Process, x: &Name, y: &Name) -> (Name, Process) {
    debug_assert!(b != x, "shadowed binders are handled by the caller");
    if b == y {
        let mut used = body.all_names();
        used.insert(x.clone());
        used.insert(y.clone());
        let b2 = b.freshen(&used);
        let body2 = body.subst_name(&b2, b);
        (b2, body2)
    } else {
        (b.clone(), (*body).clone())
    }
}

fn rename_binder_term_p(b: &Name, body: &Process, x: &Name, m: &Term) -> (Name, Process) {
    if b == x {
        return (b.clone(), (*body).clone());
    }
    if m.free_vars().contains(b) {
        let mut used = body.all_names();
        used.extend(m.free_vars());
        used.insert(x.clone());
        let b2 = b.freshen(&used);
        let body2 = body.subst_name(&b2, b);
        (b2, body2)
    } else {
        (b.clone(), (*body).clone())
    }
}

fn rename_binder_t(b: &Name, body: &Term, x: &Name, n: &Term) -> (Name, Term) {
    if b == x {
        return (b.clone(), (*body).clone());
    }
    if n.free_vars().contains(b) {
        let mut used = body.all_names();
        used.extend(n.free_vars());
        used.insert(x.clone());
        let b2 = b.freshen(&used);
        let body2 = body.subst_term(&Term::Var(b2.clone()), b);
        (b2, body2)
    } else {
        (b.clone(), (*body).clone())
    }
}

fn rename_binder_t2(b: &Name, body: &Term, x: &Name, n: &Term) -> (Name, Term) {
    if b == x {
        return (b.clone(), (*body).clone());
    }
    rename_binder_t(b, body, x, n)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn n(s: &str) -> Name {
        Name::new(s)
    }

    #[test]
    fn subst_fwd() {
        // [x↔z]{y/x} → [y↔z]
        let p = Process::Fwd(n("x"), n("z"));
        assert_eq!(p.subst_name(&n("y"), &n("x")), Process::Fwd(n("y"), n("z")));
    }

    #[test]
    fn subst_input_subject() {
        // (x(w).0){y/x} → y(w).0
        let p = Process::In(n("x"), n("w"), Box::new(Process::Zero));
        assert_eq!(
            p.subst_name(&n("y"), &n("x")),
            Process::In(n("y"), n("w"), Box::new(Process::Zero))
        );
    }

    #[test]
    fn subst_capture_avoiding_bound_output() {
        // ((νy)x⟨y⟩.0){y/x} → (νy′)y⟨y′⟩.0
        let p = Process::bout(n("x"), n("y"), None, Process::Zero);
        let got = p.subst_name(&n("y"), &n("x"));
        // oracle: rename the binder first, then substitute naively
        let expected = Process::bout(n("y"), Name::with_id("y", 1), None, Process::Zero);
        assert!(got.alpha_eq(&expected));
        // the free y must not be captured: subject must be y, payload distinct
        if let Process::New(b, _, inner) = &got {
            if let Process::Out(subj, obj, _) = &**inner {
                assert_eq!(subj, &n("y"));
                assert_eq!(obj, b);
                assert_ne!(obj, &n("y"));
                return;
            }
        }
        panic!("unexpected shape: {:?}", got);
    }

    #[test]
    fn term_subst_examples() {
        // x{⟨⟩/x} → ⟨⟩
        assert_eq!(Term::var("x").subst_term(&Term::Unit, &n("x")), Term::Unit);
        // (λy:1.x){⟨⟩/x} → λy:1.⟨⟩
        let m = Term::lam("y", Ty::One, Term::var("x"));
        assert_eq!(
            m.subst_term(&Term::Unit, &n("x")),
            Term::lam("y", Ty::One, Term::Unit)
        );
        // (λy:1.y x){y/x} → λy′:1.y′ y  (capture-avoidance)
        let m = Term::lam("y", Ty::One, Term::app(Term::var("y"), Term::var("x")));
        let got = m.subst_term(&Term::var("y"), &n("x"));
        let expected = Term::Lam(
            Name::with_id("y", 1),
            Ty::One,
            Box::new(Term::app(
                Term::Var(Name::with_id("y", 1)),
                Term::var("y"),
            )),
        );
        assert!(got.alpha_eq(&expected));
    }

    #[test]
    fn alpha_eq_examples() {
        // λx:1.x vs λy:1.y → true
        assert!(Term::lam("x", Ty::One, Term::var("x"))
            .alpha_eq(&Term::lam("y", Ty::One, Term::var("y"))));
        // z(x).0 vs z(w).0 → true
        let a = Process::In(n("z"), n("x"), Box::new(Process::Zero));
        let b = Process::In(n("z"), n("w"), Box::new(Process::Zero));
        assert!(a.alpha_eq(&b));
        // [x↔z] vs [z↔x] → false (alpha only; ≡ handles symmetry)
        assert!(!Process::Fwd(n("x"), n("z")).alpha_eq(&Process::Fwd(n("z"), n("x"))));
    }

    #[test]
    fn free_names_examples() {
        // free_names((νy)x⟨y⟩.[y↔z]) → {x,z}
        let p = Process::bout(n("x"), n("y"), None, Process::Fwd(n("y"), n("z")));
        let fv = p.free_names();
        assert_eq!(fv.len(), 2);
        assert!(fv.contains(&n("x")) && fv.contains(&n("z")));
        assert!(Process::Zero.free_names().is_empty());
    }

    #[test]
    fn subst_name_identity_is_alpha_identity() {
        let p = Process::bout(n("x"), n("y"), None, Process::Fwd(n("y"), n("z")));
        assert!(p.subst_name(&n("x"), &n("x")).alpha_eq(&p));
    }

    #[test]
    fn fn_of_subst_subset() {
        // free_names(P{y/x}) ⊆ (free_names(P)∖{x}) ∪ {y}
        let p = Process::par(
            Process::Fwd(n("x"), n("z")),
            Process::In(n("x"), n("w"), Box::new(Process::Fwd(n("w"), n("q")))),
        );
        let got = p.subst_name(&n("y"), &n("x"));
        let mut allowed = p.free_names();
        allowed.remove(&n("x"));
        allowed.insert(n("y"));
        assert!(got.free_names().is_subset(&allowed));
    }

    #[test]
    fn quote_binds_interface() {
        // fn({z ← [x↔z] ← x:1}) = ∅
        let q = Term::Quote(
            n("z"),
            None,
            Box::new(Process::Fwd(n("x"), n("z"))),
            vec![(n("x"), Ty::One)],
        );
        assert!(q.free_vars().is_empty());
    }
}
