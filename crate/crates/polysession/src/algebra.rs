//! Initial F-algebras and final F-coalgebras: the functorial action, the
//! fold/in/unfold/out term builders, the derived foldP/unfoldP processes,
//! and the natural-number and stream example suites.
//!
//! For a type F with one distinguished variable X occurring only positively,
//!   Tᵢ = ∀X.!(F(X)⊸X)⊸X       is the inductive carrier,
//!   T_f = ∃X.!(X⊸F(X))⊗X      the coinductive one.

use crate::ast::{Process, Term};
use crate::encode::{encode_f2pi, EncodeError};
use crate::ftyping::check_term;
use crate::judgment::{Calculus, Contexts};
use crate::names::{Name, NameGen};
use crate::pityping::check_process;
use crate::types::Ty;
use thiserror::Error;

#[derive(Clone, Debug)]
pub struct Functor {
    pub var: Name,
    pub body: Ty,
}

#[derive(Error, Debug, Clone)]
pub enum AlgebraError {
    #[error("the functor variable occurs negatively (under an odd number of left arrows)")]
    NotPositive,
    #[error("{0} has no functorial action")]
    NotFunctorial(String),
    #[error("{0}")]
    Encode(#[from] EncodeError),
}

impl Functor {
    pub fn new(var: impl Into<String>, body: Ty) -> Functor {
        Functor { var: Name::new(var), body }
    }

    /// F(A): instantiate the distinguished variable.
    pub fn apply(&self, a: &Ty) -> Ty {
        self.body.subst_tyvar(&self.var, a)
    }

    /// X occurs only positively in the body.
    pub fn is_positive(&self) -> bool {
        fn go(t: &Ty, x: &Name, pos: bool) -> bool {
            match t {
                Ty::Var(v) => v != x || pos,
                Ty::One | Ty::Two => true,
                Ty::Lolli(a, b) => go(a, x, !pos) && go(b, x, pos),
                Ty::Tensor(a, b) | Ty::With(a, b) | Ty::Plus(a, b) => {
                    go(a, x, pos) && go(b, x, pos)
                }
                Ty::Bang(a) => go(a, x, pos),
                Ty::Forall(v, a) | Ty::Exists(v, a) => v == x || go(a, x, pos),
                Ty::And(a, b) | Ty::Impl(a, b) | Ty::Arrow(a, b) => {
                    go(a, x, !pos) && go(b, x, pos)
                }
                Ty::Monad(ctx, _, a) => {
                    ctx.iter().all(|(_, t)| go(t, x, !pos)) && go(a, x, pos)
                }
            }
        }
        go(&self.body, &self.var, true)
    }

    /// Tᵢ = ∀X.!(F(X)⊸X)⊸X
    pub fn t_initial(&self) -> Ty {
        let x = self.var.clone();
        Ty::Forall(
            x.clone(),
            Box::new(Ty::lolli(
                Ty::bang(Ty::lolli(self.body.clone(), Ty::Var(x.clone()))),
                Ty::Var(x),
            )),
        )
    }

    /// T_f = ∃X.!(X⊸F(X))⊗X
    pub fn t_final(&self) -> Ty {
        let x = self.var.clone();
        Ty::Exists(
            x.clone(),
            Box::new(Ty::tensor(
                Ty::bang(Ty::lolli(Ty::Var(x.clone()), self.body.clone())),
                Ty::Var(x),
            )),
        )
    }
}

/// The functorial action F(g) : F(src)⊸F(dst), by induction on the body.
/// When the variable occurs under ! (or more than once), g must only use
/// unrestricted assumptions — the type checker enforces it downstream.
pub fn functor_map(f: &Functor, g: &Term, src: &Ty, dst: &Ty) -> Result<Term, AlgebraError> {
    if !f.is_positive() {
        return Err(AlgebraError::NotPositive);
    }
    let mut gen = NameGen::avoiding(g.all_names().iter());
    map_pol(&f.var, &f.body, g, src, dst, true, &mut gen)
}

fn map_pol(
    x: &Name,
    body: &Ty,
    g: &Term,
    src: &Ty,
    dst: &Ty,
    pos: bool,
    gen: &mut NameGen,
) -> Result<Term, AlgebraError> {
    // input/output instantiations flip with polarity
    let (a_in, a_out) = if pos { (src, dst) } else { (dst, src) };
    let inst_in = |t: &Ty| t.subst_tyvar(x, a_in);
    if !body.free_tyvars().contains(x) {
        let p = gen.fresh("c");
        return Ok(Term::Lam(p.clone(), body.clone(), Box::new(Term::Var(p))));
    }
    match body {
        Ty::Var(v) if v == x => {
            debug_assert!(pos);
            Ok(g.clone())
        }
        Ty::Tensor(f1, f2) => {
            let p = gen.fresh("p");
            let a = gen.fresh("a");
            let b = gen.fresh("b");
            let left = apply_map(x, f1, g, src, dst, pos, gen, Term::Var(a.clone()))?;
            let right = apply_map(x, f2, g, src, dst, pos, gen, Term::Var(b.clone()))?;
            Ok(Term::Lam(
                p.clone(),
                inst_in(body),
                Box::new(Term::LetPair(
                    a,
                    b,
                    Box::new(Term::Var(p)),
                    Box::new(Term::pair(left, right)),
                )),
            ))
        }
        Ty::Plus(f1, f2) => {
            let p = gen.fresh("p");
            let a = gen.fresh("a");
            let b = gen.fresh("b");
            let out_ty = body.subst_tyvar(x, a_out);
            let left = apply_map(x, f1, g, src, dst, pos, gen, Term::Var(a.clone()))?;
            let right = apply_map(x, f2, g, src, dst, pos, gen, Term::Var(b.clone()))?;
            Ok(Term::Lam(
                p.clone(),
                inst_in(body),
                Box::new(Term::CaseSum(
                    Box::new(Term::Var(p)),
                    a,
                    Box::new(Term::Inj(true, out_ty.clone(), Box::new(left))),
                    b,
                    Box::new(Term::Inj(false, out_ty, Box::new(right))),
                )),
            ))
        }
        Ty::With(f1, f2) => {
            let p = gen.fresh("p");
            let left = apply_map(x, f1, g, src, dst, pos, gen, Term::Fst(Box::new(Term::Var(p.clone()))))?;
            let right = apply_map(x, f2, g, src, dst, pos, gen, Term::Snd(Box::new(Term::Var(p.clone()))))?;
            Ok(Term::Lam(
                p,
                inst_in(body),
                Box::new(Term::WithPair(Box::new(left), Box::new(right))),
            ))
        }
        Ty::Bang(f1) => {
            let p = gen.fresh("p");
            let a = gen.fresh("a");
            let inner = apply_map(x, f1, g, src, dst, pos, gen, Term::Var(a.clone()))?;
            Ok(Term::Lam(
                p.clone(),
                inst_in(body),
                Box::new(Term::LetBang(
                    a,
                    Box::new(Term::Var(p)),
                    Box::new(Term::bang(inner)),
                )),
            ))
        }
        Ty::Lolli(f1, f2) => {
            let h = gen.fresh("h");
            let a = gen.fresh("a");
            let arg = apply_map(x, f1, g, src, dst, !pos, gen, Term::Var(a.clone()))?;
            let res = apply_map(
                x,
                f2,
                g,
                src,
                dst,
                pos,
                gen,
                Term::app(Term::Var(h.clone()), arg),
            )?;
            // λh:F1[in]⊸F2[in]. λa:F1[out-of-F1-flipped]. map⁺(h (map⁻ a))
            let h_ty = inst_in(body);
            let a_ty = f1.subst_tyvar(x, a_out);
            Ok(Term::Lam(
                h,
                h_ty,
                Box::new(Term::Lam(a, a_ty, Box::new(res))),
            ))
        }
        Ty::Forall(v, f1) => {
            let p = gen.fresh("p");
            let inner = apply_map(
                x,
                f1,
                g,
                src,
                dst,
                pos,
                gen,
                Term::TApp(Box::new(Term::Var(p.clone())), Ty::Var(v.clone())),
            )?;
            Ok(Term::Lam(
                p,
                inst_in(body),
                Box::new(Term::TLam(v.clone(), Box::new(inner))),
            ))
        }
        Ty::Exists(v, f1) => {
            let p = gen.fresh("p");
            let y = gen.fresh("y");
            let inner = apply_map(x, f1, g, src, dst, pos, gen, Term::Var(y.clone()))?;
            let out_ty = body.subst_tyvar(x, a_out);
            let Ty::Exists(v_out, _) = &out_ty else { unreachable!() };
            let packed = Term::Pack(Ty::Var(v.clone()), Box::new(inner), Some(out_ty.clone()));
            let _ = v_out;
            Ok(Term::Lam(
                p.clone(),
                inst_in(body),
                Box::new(Term::LetPack(
                    v.clone(),
                    y,
                    Box::new(Term::Var(p)),
                    Box::new(packed),
                )),
            ))
        }
        other => Err(AlgebraError::NotFunctorial(crate::print::print_type(other))),
    }
}

/// Apply the map for a sub-functor to an argument, short-cutting the
/// constant case to avoid an administrative redex.
#[allow(clippy::too_many_arguments)]
fn apply_map(
    x: &Name,
    sub: &Ty,
    g: &Term,
    src: &Ty,
    dst: &Ty,
    pos: bool,
    gen: &mut NameGen,
    arg: Term,
) -> Result<Term, AlgebraError> {
    if !sub.free_tyvars().contains(x) {
        return Ok(arg);
    }
    let m = map_pol(x, sub, g, src, dst, pos, gen)?;
    Ok(Term::app(m, arg))
}

/// fold ≜ ΛX.λu:!(F(X)⊸X).λy:Tᵢ.(y[X]) u
pub fn fold_term(f: &Functor) -> Term {
    let x = f.var.clone();
    Term::TLam(
        x.clone(),
        Box::new(Term::Lam(
            Name::new("u"),
            Ty::bang(Ty::lolli(f.body.clone(), Ty::Var(x.clone()))),
            Box::new(Term::Lam(
                Name::new("y"),
                f.t_initial(),
                Box::new(Term::app(
                    Term::TApp(Box::new(Term::var("y")), Ty::Var(x)),
                    Term::var("u"),
                )),
            )),
        )),
    )
}

/// in ≜ λx:F(Tᵢ).ΛX.λy:!(F(X)⊸X).let !u = y in u (F(fold[X](!u)) x)
pub fn in_term(f: &Functor) -> Result<Term, AlgebraError> {
    let x = f.var.clone();
    let ti = f.t_initial();
    let fold_xu = Term::app(
        Term::TApp(Box::new(fold_term(f)), Ty::Var(x.clone())),
        Term::bang(Term::var("u")),
    );
    let fmap = functor_map(f, &fold_xu, &ti, &Ty::Var(x.clone()))?;
    Ok(Term::Lam(
        Name::new("s"),
        f.apply(&ti),
        Box::new(Term::TLam(
            x.clone(),
            Box::new(Term::Lam(
                Name::new("y"),
                Ty::bang(Ty::lolli(f.body.clone(), Ty::Var(x))),
                Box::new(Term::LetBang(
                    Name::new("u"),
                    Box::new(Term::var("y")),
                    Box::new(Term::app(
                        Term::var("u"),
                        Term::app(fmap, Term::var("s")),
                    )),
                )),
            )),
        )),
    ))
}

/// unfold ≜ ΛX.λu:!(X⊸F(X)).λx:X.pack X with ⟨u⊗x⟩
pub fn unfold_term(f: &Functor) -> Term {
    let x = f.var.clone();
    Term::TLam(
        x.clone(),
        Box::new(Term::Lam(
            Name::new("u"),
            Ty::bang(Ty::lolli(Ty::Var(x.clone()), f.body.clone())),
            Box::new(Term::Lam(
                Name::new("s"),
                Ty::Var(x.clone()),
                Box::new(Term::Pack(
                    Ty::Var(x),
                    Box::new(Term::pair(Term::var("u"), Term::var("s"))),
                    Some(f.t_final()),
                )),
            )),
        )),
    )
}

/// out ≜ λt:T_f.let (X,p) = t in let u⊗x = p in let !f = u in
///        F(unfold[X](!f)) (f x)
pub fn out_term(f: &Functor) -> Result<Term, AlgebraError> {
    let x = f.var.clone();
    let tf = f.t_final();
    let unfold_xf = Term::app(
        Term::TApp(Box::new(unfold_term(f)), Ty::Var(x.clone())),
        Term::bang(Term::var("g")),
    );
    let fmap = functor_map(f, &unfold_xf, &Ty::Var(x.clone()), &tf)?;
    Ok(Term::Lam(
        Name::new("t"),
        tf,
        Box::new(Term::LetPack(
            x,
            Name::new("p"),
            Box::new(Term::var("t")),
            Box::new(Term::LetPair(
                Name::new("u"),
                Name::new("s"),
                Box::new(Term::var("p")),
                Box::new(Term::LetBang(
                    Name::new("g"),
                    Box::new(Term::var("u")),
                    Box::new(Term::app(
                        fmap,
                        Term::app(Term::var("g"), Term::var("s")),
                    )),
                )),
            )),
        )),
    ))
}

/// ⟦fold⟧_z / ⟦unfold⟧_z as processes.
pub fn fold_proc(f: &Functor, z: &Name) -> Result<Process, AlgebraError> {
    let m = fold_term(f);
    let ty = fold_type(f);
    let d = check_term(&Contexts::default(), &m, &ty).expect("fold is well-typed");
    Ok(encode_f2pi(&d, z)?)
}

pub fn unfold_proc(f: &Functor, z: &Name) -> Result<Process, AlgebraError> {
    let m = unfold_term(f);
    let ty = unfold_type(f);
    let d = check_term(&Contexts::default(), &m, &ty).expect("unfold is well-typed");
    Ok(encode_f2pi(&d, z)?)
}

/// ∀X.!(F(X)⊸X)⊸Tᵢ⊸X
pub fn fold_type(f: &Functor) -> Ty {
    let x = f.var.clone();
    Ty::Forall(
        x.clone(),
        Box::new(Ty::lolli(
            Ty::bang(Ty::lolli(f.body.clone(), Ty::Var(x.clone()))),
            Ty::lolli(f.t_initial(), Ty::Var(x)),
        )),
    )
}

/// ∀X.!(X⊸F(X))⊸X⊸T_f
pub fn unfold_type(f: &Functor) -> Ty {
    let x = f.var.clone();
    Ty::Forall(
        x.clone(),
        Box::new(Ty::lolli(
            Ty::bang(Ty::lolli(Ty::Var(x.clone()), f.body.clone())),
            Ty::lolli(Ty::Var(x), f.t_final()),
        )),
    )
}

/// foldP(A)_{y₁,y₂} ≜ (νx)(⟦fold⟧_x | x⟨A⟩.x̄⟨v⟩.(!v(w).ū⟨s⟩.[s↔w]
///                       | x̄⟨t⟩.([t↔y₁] | [x↔y₂])))
/// with the F-algebra morphism available on the shared channel u; consumes
/// y₁:Tᵢ, offers y₂:A.
pub fn fold_p(
    f: &Functor,
    a: &Ty,
    u: &Name,
    y1: &Name,
    y2: &Name,
) -> Result<Process, AlgebraError> {
    let inner_chan = fresh_for(&[u, y1, y2], "x");
    spine_p(fold_proc(f, &inner_chan)?, &inner_chan, f, a, u, y1, y2, true)
}

fn fresh_for(avoid: &[&Name], base: &str) -> Name {
    let used: std::collections::HashSet<Name> = avoid.iter().map(|n| (*n).clone()).collect();
    let mut n = Name::new(base);
    while used.contains(&n) {
        n = n.freshen(&used);
    }
    n
}

/// unfoldP(A)_{y₁,y₂}: consumes the seed y₁:A, offers y₂:T_f, with the
/// coalgebra morphism on u.
pub fn unfold_p(
    f: &Functor,
    a: &Ty,
    u: &Name,
    y1: &Name,
    y2: &Name,
) -> Result<Process, AlgebraError> {
    let inner_chan = fresh_for(&[u, y1, y2], "x");
    spine_p(unfold_proc(f, &inner_chan)?, &inner_chan, f, a, u, y1, y2, false)
}

#[allow(clippy::too_many_arguments)]
fn spine_p(
    inner: Process,
    inner_chan: &Name,
    f: &Functor,
    a: &Ty,
    u: &Name,
    y1: &Name,
    y2: &Name,
    initial: bool,
) -> Result<Process, AlgebraError> {
    let mut used: std::collections::HashSet<Name> =
        [u.clone(), y1.clone(), y2.clone()].into_iter().collect();
    used.extend(inner.all_names());
    let mut pick = |base: &str| {
        let mut n = Name::new(base);
        while used.contains(&n) {
            n = n.freshen(&used);
        }
        used.insert(n.clone());
        n
    };
    let x = inner_chan.clone();
    let morph = if initial {
        Ty::lolli(f.apply(a), a.clone())
    } else {
        Ty::lolli(a.clone(), f.apply(a))
    };
    let seed_ty = if initial { f.t_initial() } else { a.clone() };
    let v = pick("v");
    let w = pick("w");
    let s = pick("s");
    let t = pick("t");
    // !v(w).ū⟨s⟩.[s↔w]
    let server = Process::Rep(
        v.clone(),
        w.clone(),
        Box::new(Process::bout(
            u.clone(),
            s.clone(),
            Some(morph.clone()),
            Process::Fwd(s, w),
        )),
    );
    // x̄⟨t⟩.([t↔y₁] | [x↔y₂])
    let tail = Process::bout(
        x.clone(),
        t.clone(),
        Some(seed_ty),
        Process::par(Process::Fwd(t, y1.clone()), Process::Fwd(x.clone(), y2.clone())),
    );
    let body = Process::TyOut(
        x.clone(),
        a.clone(),
        Box::new(Process::bout(
            x.clone(),
            v,
            Some(Ty::bang(morph)),
            Process::par(server, tail),
        )),
    );
    let outer_ty = if initial { fold_type(f) } else { unfold_type(f) };
    Ok(Process::new_(x, Some(outer_ty), Process::par(inner, body)))
}

// ---------------------------------------------------------------------------
// Natural numbers: F(X) = 1 ⊕ X
// ---------------------------------------------------------------------------

pub fn nat_functor() -> Functor {
    Functor::new("X", Ty::plus(Ty::One, Ty::var("X")))
}

/// A named process together with the judgment it checks at.
#[derive(Clone, Debug)]
pub struct SuiteItem {
    pub name: &'static str,
    pub proc: Process,
    pub ctx: Contexts,
    pub chan: Name,
    pub ty: Ty,
}

impl SuiteItem {
    pub fn check(&self) -> Result<crate::judgment::Derivation, crate::pityping::TypeError> {
        check_process(Calculus::Core, &self.ctx, &self.proc, &self.chan, &self.ty)
    }
}

fn delta(entries: &[(&Name, &Ty)]) -> Contexts {
    Contexts {
        delta: entries
            .iter()
            .map(|(n, t)| ((*n).clone(), (*t).clone()))
            .collect(),
        ..Default::default()
    }
}

/// zero_x ≜ (νz)(z.inl;0 | ⟦in(z)⟧_x)
pub fn zero_proc(x: &Name) -> Process {
    let f = nat_functor();
    let nat = f.t_initial();
    let z = fresh_for(&[x], "z");
    let fz = f.apply(&nat);
    // ⟦in z⟧_x from the derivation of (in z) with z:F(Nat) linear
    let in_z = Term::app(in_term(&f).unwrap(), Term::Var(z.clone()));
    let ctx = delta(&[(&z, &fz)]);
    let d = check_term(&ctx, &in_z, &nat).expect("in(z) is well-typed");
    let enc = encode_f2pi(&d, x).unwrap();
    Process::new_(
        z.clone(),
        Some(fz),
        Process::par(Process::Inl(z, Box::new(Process::Zero)), enc),
    )
}

/// succ_{y,x} ≜ (νs)(s.inr;[y↔s] | ⟦in(s)⟧_x)
pub fn succ_proc(y: &Name, x: &Name) -> Process {
    let f = nat_functor();
    let nat = f.t_initial();
    let s = fresh_for(&[y, x], "s");
    let fz = f.apply(&nat);
    let in_s = Term::app(in_term(&f).unwrap(), Term::Var(s.clone()));
    let ctx = delta(&[(&s, &fz)]);
    let d = check_term(&ctx, &in_s, &nat).expect("in(s) is well-typed");
    let enc = encode_f2pi(&d, x).unwrap();
    Process::new_(
        s.clone(),
        Some(fz),
        Process::par(
            Process::Inr(s.clone(), Box::new(Process::Fwd(y.clone(), s))),
            enc,
        ),
    )
}

/// one_x ≜ (νy)(zero_y | succ_{y,x})
pub fn one_proc(x: &Name) -> Process {
    let y = fresh_for(&[x], "y");
    Process::new_(
        y.clone(),
        Some(nat_functor().t_initial()),
        Process::par(zero_proc(&y), succ_proc(&y, x)),
    )
}

/// stepDec_d ≜ d(n).n.case(zero_d, [n↔d]) :: d:(1⊕Nat)⊸Nat
pub fn step_dec_proc(d: &Name) -> Process {
    let n = fresh_for(&[d], "n");
    Process::In(
        d.clone(),
        n.clone(),
        Box::new(Process::Case(
            n.clone(),
            Box::new(zero_proc(d)),
            Box::new(Process::Fwd(n, d.clone())),
        )),
    )
}

/// dec_{x,z} ≜ (νu)(!u(d).stepDec_d | foldP(Nat)_{x,z})
pub fn dec_proc(x: &Name, z: &Name) -> Process {
    let f = nat_functor();
    let nat = f.t_initial();
    let u = fresh_for(&[x, z], "u");
    let d = fresh_for(&[x, z, &u], "d");
    let morph = Ty::lolli(f.apply(&nat), nat.clone());
    let foldp = fold_p(&f, &nat, &u, x, z).unwrap();
    Process::new_(
        u.clone(),
        Some(Ty::bang(morph)),
        Process::par(Process::Rep(u, d.clone(), Box::new(step_dec_proc(&d))), foldp),
    )
}

/// The harness observer: converts a Nat session into a 1⊕1 verdict
/// (inl = zero, inr = nonzero) offered on r.
pub fn nat_observer(x: &Name, r: &Name) -> Process {
    let two = Ty::plus(Ty::One, Ty::One);
    let v = fresh_for(&[x, r], "v");
    let w = fresh_for(&[x, r, &v], "w");
    let s = fresh_for(&[x, r, &v, &w], "s");
    // step_w = w(s).s.case(w.inl;0, s.case(w.inr;0, w.inr;0))
    let step = Process::In(
        w.clone(),
        s.clone(),
        Box::new(Process::Case(
            s.clone(),
            Box::new(Process::Inl(w.clone(), Box::new(Process::Zero))),
            Box::new(Process::Case(
                s.clone(),
                Box::new(Process::Inr(w.clone(), Box::new(Process::Zero))),
                Box::new(Process::Inr(w.clone(), Box::new(Process::Zero))),
            )),
        )),
    );
    let morph = Ty::lolli(Ty::plus(Ty::One, two.clone()), two.clone());
    Process::TyOut(
        x.clone(),
        two,
        Box::new(Process::bout(
            x.clone(),
            v.clone(),
            Some(Ty::bang(morph)),
            Process::par(
                Process::Rep(v, w, Box::new(step)),
                Process::Fwd(x.clone(), r.clone()),
            ),
        )),
    )
}

pub fn nat_suite() -> Vec<SuiteItem> {
    let f = nat_functor();
    let nat = f.t_initial();
    let (x, y, z, d, r) = (
        Name::new("x"),
        Name::new("y"),
        Name::new("z"),
        Name::new("d"),
        Name::new("r"),
    );
    let two = Ty::plus(Ty::One, Ty::One);
    vec![
        SuiteItem {
            name: "zero",
            proc: zero_proc(&x),
            ctx: Contexts::default(),
            chan: x.clone(),
            ty: nat.clone(),
        },
        SuiteItem {
            name: "succ",
            proc: succ_proc(&y, &x),
            ctx: delta(&[(&y, &nat)]),
            chan: x.clone(),
            ty: nat.clone(),
        },
        SuiteItem {
            name: "one",
            proc: one_proc(&x),
            ctx: Contexts::default(),
            chan: x.clone(),
            ty: nat.clone(),
        },
        SuiteItem {
            name: "stepDec",
            proc: step_dec_proc(&d),
            ctx: Contexts::default(),
            chan: d.clone(),
            ty: Ty::lolli(f.apply(&nat), nat.clone()),
        },
        SuiteItem {
            name: "dec",
            proc: dec_proc(&x, &z),
            ctx: delta(&[(&x, &nat)]),
            chan: z.clone(),
            ty: nat.clone(),
        },
        SuiteItem {
            name: "natObserver",
            proc: nat_observer(&x, &r),
            ctx: delta(&[(&x, &nat)]),
            chan: r,
            ty: two,
        },
    ]
}

// ---------------------------------------------------------------------------
// Streams: F(X) = Nat ⊗ X over the carrier !Nat
// ---------------------------------------------------------------------------

pub fn stream_functor() -> Functor {
    Functor::new("X", Ty::tensor(nat_functor().t_initial(), Ty::var("X")))
}

/// The terminating variant F(X) = Nat ⊗ !X.
pub fn stream_functor_ter() -> Functor {
    Functor::new(
        "X",
        Ty::tensor(nat_functor().t_initial(), Ty::bang(Ty::var("X"))),
    )
}

/// The element-discarding variant F(X) = !Nat ⊗ X.
pub fn stream_functor_discard() -> Functor {
    Functor::new(
        "X",
        Ty::tensor(Ty::bang(nat_functor().t_initial()), Ty::var("X")),
    )
}

/// genHdNext_z ≜ z(n).z̄⟨y⟩.(n̄⟨m⟩.[m↔y] | !z(w).n̄⟨m⟩.succ_{m,w})
///   :: z : !Nat ⊸ (Nat ⊗ !Nat)
pub fn gen_hd_next(z: &Name) -> Process {
    let nat = nat_functor().t_initial();
    let n = fresh_for(&[z], "n");
    let y = fresh_for(&[z, &n], "y");
    let w = fresh_for(&[z, &n, &y], "w");
    let m1 = fresh_for(&[z, &n, &y, &w], "m");
    let m2 = fresh_for(&[z, &n, &y, &w, &m1], "m'");
    Process::In(
        z.clone(),
        n.clone(),
        Box::new(Process::bout(
            z.clone(),
            y.clone(),
            Some(nat.clone()),
            Process::par(
                Process::bout(n.clone(), m1.clone(), Some(nat.clone()), Process::Fwd(m1, y)),
                Process::Rep(
                    z.clone(),
                    w.clone(),
                    Box::new(Process::bout(
                        n,
                        m2.clone(),
                        Some(nat),
                        succ_proc(&m2, &w),
                    )),
                ),
            ),
        )),
    )
}

/// The generator for the terminating variant:
/// genHdNextTer_z ≜ z(n).z̄⟨y⟩.(n̄⟨m⟩.[m↔y] | !z(w).!w(w').n̄⟨m⟩.succ_{m,w'})
pub fn gen_hd_next_ter(z: &Name) -> Process {
    let nat = nat_functor().t_initial();
    let n = fresh_for(&[z], "n");
    let y = fresh_for(&[z, &n], "y");
    let w = fresh_for(&[z, &n, &y], "w");
    let w2 = fresh_for(&[z, &n, &y, &w], "w'");
    let m1 = fresh_for(&[z, &n, &y, &w, &w2], "m");
    let m2 = fresh_for(&[z, &n, &y, &w, &w2, &m1], "m'");
    Process::In(
        z.clone(),
        n.clone(),
        Box::new(Process::bout(
            z.clone(),
            y.clone(),
            Some(nat.clone()),
            Process::par(
                Process::bout(n.clone(), m1.clone(), Some(nat.clone()), Process::Fwd(m1, y)),
                Process::Rep(
                    z.clone(),
                    w.clone(),
                    Box::new(Process::Rep(
                        w,
                        w2.clone(),
                        Box::new(Process::bout(n, m2.clone(), Some(nat), succ_proc(&m2, &w2))),
                    )),
                ),
            ),
        )),
    )
}

/// The generator for the element-discarding variant:
/// z(n).z̄⟨y⟩.(!y(a).n̄⟨b⟩.[b↔a] | !z(w).n̄⟨b⟩.succ_{b,w})
pub fn gen_hd_next_discard(z: &Name) -> Process {
    let nat = nat_functor().t_initial();
    let n = fresh_for(&[z], "n");
    let y = fresh_for(&[z, &n], "y");
    let a = fresh_for(&[z, &n, &y], "a");
    let b1 = fresh_for(&[z, &n, &y, &a], "b");
    let w = fresh_for(&[z, &n, &y, &a, &b1], "w");
    let b2 = fresh_for(&[z, &n, &y, &a, &b1, &w], "b'");
    Process::In(
        z.clone(),
        n.clone(),
        Box::new(Process::bout(
            z.clone(),
            y.clone(),
            Some(Ty::bang(nat.clone())),
            Process::par(
                Process::Rep(
                    y,
                    a.clone(),
                    Box::new(Process::bout(n.clone(), b1.clone(), Some(nat.clone()), Process::Fwd(b1, a))),
                ),
                Process::Rep(
                    z.clone(),
                    w.clone(),
                    Box::new(Process::bout(n, b2.clone(), Some(nat), succ_proc(&b2, &w))),
                ),
            ),
        )),
    )
}

/// nats_y for a given functor/generator/seed: servers for the coalgebra
/// morphism and the promoted seed around unfoldP(!Nat).
fn stream_of(
    f: &Functor,
    generator: impl Fn(&Name) -> Process,
    seed: impl Fn(&Name) -> Process,
    y: &Name,
) -> Process {
    let nat = nat_functor().t_initial();
    let carrier = Ty::bang(nat);
    let u = fresh_for(&[y], "u");
    let z = fresh_for(&[y, &u], "z");
    let x = fresh_for(&[y, &u, &z], "x");
    let w = fresh_for(&[y, &u, &z, &x], "w");
    let morph = Ty::lolli(carrier.clone(), f.apply(&carrier));
    let unf = unfold_p(f, &carrier, &u, &x, y).unwrap();
    let seeded = Process::new_(
        x.clone(),
        Some(carrier.clone()),
        Process::par(Process::Rep(x.clone(), w.clone(), Box::new(seed(&w))), unf),
    );
    Process::new_(
        u.clone(),
        Some(Ty::bang(morph)),
        Process::par(Process::Rep(u, z.clone(), Box::new(generator(&z))), seeded),
    )
}

pub fn nats_proc(y: &Name) -> Process {
    stream_of(&stream_functor(), gen_hd_next, zero_proc, y)
}

pub fn one_nats_proc(y: &Name) -> Process {
    stream_of(&stream_functor(), gen_hd_next, one_proc, y)
}

pub fn nats_discard_proc(y: &Name) -> Process {
    stream_of(&stream_functor_discard(), gen_hd_next_discard, zero_proc, y)
}

pub fn one_nats_discard_proc(y: &Name) -> Process {
    stream_of(&stream_functor_discard(), gen_hd_next_discard, one_proc, y)
}

pub fn stream_suite() -> Vec<SuiteItem> {
    let nat = nat_functor().t_initial();
    let carrier = Ty::bang(nat.clone());
    let (z, y) = (Name::new("z"), Name::new("y"));
    let nat_stream = stream_functor().t_final();
    vec![
        SuiteItem {
            name: "genHdNext",
            proc: gen_hd_next(&z),
            ctx: Contexts::default(),
            chan: z.clone(),
            ty: Ty::lolli(carrier.clone(), stream_functor().apply(&carrier)),
        },
        SuiteItem {
            name: "genHdNextTer",
            proc: gen_hd_next_ter(&z),
            ctx: Contexts::default(),
            chan: z.clone(),
            ty: Ty::lolli(carrier.clone(), stream_functor_ter().apply(&carrier)),
        },
        SuiteItem {
            name: "nats",
            proc: nats_proc(&y),
            ctx: Contexts::default(),
            chan: y.clone(),
            ty: nat_stream.clone(),
        },
        SuiteItem {
            name: "oneNats",
            proc: one_nats_proc(&y),
            ctx: Contexts::default(),
            chan: y.clone(),
            ty: nat_stream,
        },
        SuiteItem {
            name: "natsDiscard",
            proc: nats_discard_proc(&y),
            ctx: Contexts::default(),
            chan: y.clone(),
            ty: stream_functor_discard().t_final(),
        },
        SuiteItem {
            name: "oneNatsDiscard",
            proc: one_nats_discard_proc(&y),
            ctx: Contexts::default(),
            chan: y.clone(),
            ty: stream_functor_discard().t_final(),
        },
    ]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fsem::{beta_eta_eq, normalize};
    use crate::parse::parse_type;

    #[test]
    fn positivity() {
        assert!(nat_functor().is_positive());
        assert!(stream_functor().is_positive());
        // X ⊸ 1 is negative
        assert!(!Functor::new("X", Ty::lolli(Ty::var("X"), Ty::One)).is_positive());
        // (X ⊸ 1) ⊸ 1 is positive again
        assert!(Functor::new("X", Ty::lolli(Ty::lolli(Ty::var("X"), Ty::One), Ty::One))
            .is_positive());
    }

    #[test]
    fn functor_map_types() {
        // functor_map(X, f) = f
        let f = Functor::new("X", Ty::var("X"));
        let g = Term::var("g");
        assert_eq!(
            functor_map(&f, &g, &Ty::One, &Ty::Two).unwrap(),
            Term::var("g")
        );
        // functor_map(1⊕X, f) types at (1⊕A)⊸(1⊕B)
        let f = nat_functor();
        let a = Ty::One;
        let b = Ty::lolli(Ty::One, Ty::One);
        // a concrete closed g : 1 ⊸ (1⊸1)
        let g = crate::parse::parse_term("\\v:1. \\w:1. let 1 = v in w").unwrap();
        let m = functor_map(&f, &g, &a, &b).unwrap();
        let ty = Ty::lolli(f.apply(&a), f.apply(&b));
        crate::ftyping::check_term(&Contexts::default(), &m, &ty).unwrap();
        // functor_map(Nat⊗X, f) types at (Nat⊗A)⊸(Nat⊗B)
        let sf = stream_functor();
        let m = functor_map(&sf, &g, &a, &b).unwrap();
        let ty = Ty::lolli(sf.apply(&a), sf.apply(&b));
        crate::ftyping::check_term(&Contexts::default(), &m, &ty).unwrap();
    }

    #[test]
    fn fold_in_unfold_out_types() {
        for f in [nat_functor(), stream_functor(), stream_functor_ter()] {
            crate::ftyping::check_term(&Contexts::default(), &fold_term(&f), &fold_type(&f))
                .unwrap();
            crate::ftyping::check_term(
                &Contexts::default(),
                &in_term(&f).unwrap(),
                &Ty::lolli(f.apply(&f.t_initial()), f.t_initial()),
            )
            .unwrap();
            crate::ftyping::check_term(&Contexts::default(), &unfold_term(&f), &unfold_type(&f))
                .unwrap();
            crate::ftyping::check_term(
                &Contexts::default(),
                &out_term(&f).unwrap(),
                &Ty::lolli(f.t_final(), f.apply(&f.t_final())),
            )
            .unwrap();
        }
    }

    #[test]
    fn fold_unfold_proc_goldens() {
        // ⟦fold⟧_z matches the displayed process
        let f = nat_functor();
        let z = Name::new("z");
        let got = fold_proc(&f, &z).unwrap();
        let expect = crate::parse::parse_process(
            "recvty z (X). z(u). z(y). \
             new w. (new x. (fwd y x | sendty x <X>. fwd x w) | \
                     send w (v: fwd u v) fwd w z)",
        )
        .unwrap();
        assert!(
            got.alpha_eq(&expect),
            "got {}",
            crate::print::print_process(&got)
        );
        // ⟦unfold⟧_z ≜ z(X).z(u).z(x).z⟨X⟩.z̄⟨y⟩.([u↔y]|[x↔z])
        let got = unfold_proc(&f, &z).unwrap();
        let expect = crate::parse::parse_process(
            "recvty z (X). z(u). z(s). sendty z <X>. send z (y: fwd u y) fwd s z",
        )
        .unwrap();
        assert!(
            got.alpha_eq(&expect),
            "got {}",
            crate::print::print_process(&got)
        );
    }

    #[test]
    fn nat_suite_checks() {
        for item in nat_suite() {
            item.check().unwrap_or_else(|e| {
                panic!("{}: {e}", item.name);
            });
        }
    }

    #[test]
    fn nat_stream_type_wf() {
        // NatStream ≜ ∃X.!(X⊸(Nat⊗X))⊗X
        let ns = stream_functor().t_final();
        assert!(ns.wf(&Default::default()));
        let nat = parse_type("forall X. !((1 + X) -o X) -o X").unwrap();
        let expect = Ty::Exists(
            Name::new("X"),
            Box::new(Ty::tensor(
                Ty::bang(Ty::lolli(
                    Ty::var("X"),
                    Ty::tensor(nat, Ty::var("X")),
                )),
                Ty::var("X"),
            )),
        );
        assert!(ns.alpha_eq(&expect));
    }

    #[test]
    fn stream_suite_checks() {
        for item in stream_suite() {
            item.check().unwrap_or_else(|e| {
                panic!("{}: {e}", item.name);
            });
        }
    }

    #[test]
    fn fold_in_diagram_closes() {
        // the initial-algebra square at F(X)=1⊕X, A=Nat, f=stepDec
        let f = nat_functor();
        let nat = f.t_initial();
        let zero = Term::app(in_term(&f).unwrap(), Term::Inj(true, f.apply(&nat), Box::new(Term::Unit)));
        // stepDec : (1⊕Nat) ⊸ Nat
        let step = {
            let s = Name::new("s");
            let u = Name::new("w");
            let n = Name::new("n");
            Term::Lam(
                s.clone(),
                f.apply(&nat),
                Box::new(Term::CaseSum(
                    Box::new(Term::Var(s)),
                    u.clone(),
                    Box::new(Term::let_unit(Term::Var(u), zero.clone())),
                    n.clone(),
                    Box::new(Term::Var(n)),
                )),
            )
        };
        crate::ftyping::check_term(
            &Contexts::default(),
            &step,
            &Ty::lolli(f.apply(&nat), nat.clone()),
        )
        .unwrap();
        let fold_nat_f = Term::app(
            Term::TApp(Box::new(fold_term(&f)), nat.clone()),
            Term::bang(step.clone()),
        );
        let fmap = functor_map(&f, &fold_nat_f, &nat, &nat).unwrap();
        for arg in [
            Term::Inj(true, f.apply(&nat), Box::new(Term::Unit)),
            Term::Inj(false, f.apply(&nat), Box::new(zero.clone())),
        ] {
            let lhs = Term::app(
                fold_nat_f.clone(),
                Term::app(in_term(&f).unwrap(), arg.clone()),
            );
            let rhs = Term::app(step.clone(), Term::app(fmap.clone(), arg));
            assert!(
                beta_eta_eq(&lhs, &rhs),
                "lhs {:?} rhs {:?}",
                normalize(&lhs, 10000),
                normalize(&rhs, 10000)
            );
        }
    }

    #[test]
    fn unfold_out_diagram_closes() {
        // the final-coalgebra square at the terminating-stream functor
        let f = stream_functor_ter();
        let nat = nat_functor().t_initial();
        let zero = Term::app(
            in_term(&nat_functor()).unwrap(),
            Term::Inj(true, nat_functor().apply(&nat), Box::new(Term::Unit)),
        );
        // g : Nat ⊸ F(Nat) = λn:Nat.⟨n ⊗ !zero⟩
        let g = Term::Lam(
            Name::new("n"),
            nat.clone(),
            Box::new(Term::pair(Term::var("n"), Term::bang(zero.clone()))),
        );
        crate::ftyping::check_term(
            &Contexts::default(),
            &g,
            &Ty::lolli(nat.clone(), f.apply(&nat)),
        )
        .unwrap();
        let unfold_nat_g = Term::app(
            Term::TApp(Box::new(unfold_term(&f)), nat.clone()),
            Term::bang(g.clone()),
        );
        let fmap = functor_map(&f, &unfold_nat_g, &nat, &f.t_final()).unwrap();
        let lhs = Term::app(
            out_term(&f).unwrap(),
            Term::app(unfold_nat_g.clone(), zero.clone()),
        );
        let rhs = Term::app(fmap, Term::app(g, zero));
        assert!(beta_eta_eq(&lhs, &rhs));
    }
}
