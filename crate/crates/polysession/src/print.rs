//! Pretty-printers. `parse(print(a))` is alpha-equal to `a` and printing is
//! deterministic.
//!
//! Binders whose rendered name would clash with a name already in scope are
//! renamed on the way out, so the printed text re-binds exactly like the AST.

use crate::ast::{Process, Term};
use crate::names::Name;
use crate::types::Ty;
use std::collections::HashSet;

pub fn print_type(t: &Ty) -> String {
    let mut s = String::new();
    ty(t, 0, &mut s);
    s
}

// precedence levels: 0 = quantifier/arrow position, 1 = sum, 2 = product,
// 3 = atom
fn ty(t: &Ty, prec: u8, out: &mut String) {
    let paren = |needed: bool, out: &mut String, f: &dyn Fn(&mut String)| {
        if needed {
            out.push('(');
            f(out);
            out.push(')');
        } else {
            f(out);
        }
    };
    match t {
        Ty::One => out.push('1'),
        Ty::Two => out.push('2'),
        Ty::Var(x) => out.push_str(&x.to_string()),
        Ty::Forall(x, a) => paren(prec > 0, out, &|o| {
            o.push_str("forall ");
            o.push_str(&x.to_string());
            o.push_str(". ");
            ty(a, 0, o);
        }),
        Ty::Exists(x, a) => paren(prec > 0, out, &|o| {
            o.push_str("exists ");
            o.push_str(&x.to_string());
            o.push_str(". ");
            ty(a, 0, o);
        }),
        Ty::Lolli(a, b) => paren(prec > 0, out, &|o| {
            ty(a, 1, o);
            o.push_str(" -o ");
            ty(b, 0, o);
        }),
        Ty::Arrow(a, b) => paren(prec > 0, out, &|o| {
            ty(a, 1, o);
            o.push_str(" -> ");
            ty(b, 0, o);
        }),
        Ty::Impl(a, b) => paren(prec > 0, out, &|o| {
            ty(a, 1, o);
            o.push_str(" => ");
            ty(b, 0, o);
        }),
        Ty::And(a, b) => paren(prec > 0, out, &|o| {
            ty(a, 1, o);
            o.push_str(" /\\ ");
            ty(b, 0, o);
        }),
        Ty::Plus(a, b) => paren(prec > 1, out, &|o| {
            ty(a, 1, o);
            o.push_str(" + ");
            ty(b, 2, o);
        }),
        Ty::With(a, b) => paren(prec > 1, out, &|o| {
            ty(a, 1, o);
            o.push_str(" & ");
            ty(b, 2, o);
        }),
        Ty::Tensor(a, b) => paren(prec > 2, out, &|o| {
            ty(a, 2, o);
            o.push_str(" * ");
            ty(b, 3, o);
        }),
        Ty::Bang(a) => {
            out.push('!');
            ty(a, 3, out);
        }
        Ty::Monad(ctx, z, a) => {
            out.push('{');
            for (i, (x, t)) in ctx.iter().enumerate() {
                if i > 0 {
                    out.push_str(", ");
                }
                out.push_str(&x.to_string());
                out.push(':');
                ty(t, 0, out);
            }
            if !ctx.is_empty() {
                out.push(' ');
            }
            out.push_str("|- ");
            out.push_str(&z.to_string());
            out.push(':');
            ty(a, 0, out);
            out.push('}');
        }
    }
}

/// Scope used while printing: maps in-AST names to rendered names and tracks
/// which rendered names are taken.
struct Scope {
    map: Vec<(Name, Name)>,
    taken: HashSet<Name>,
}

impl Scope {
    fn for_process(p: &Process) -> Scope {
        Scope { map: Vec::new(), taken: p.free_names() }
    }
    fn for_term(m: &Term) -> Scope {
        Scope { map: Vec::new(), taken: m.free_vars() }
    }
    fn render(&self, n: &Name) -> Name {
        for (from, to) in self.map.iter().rev() {
            if from == n {
                return to.clone();
            }
        }
        n.clone()
    }
    fn bind(&mut self, n: &Name) -> Name {
        let mut cand = n.clone();
        while self.taken.contains(&cand) {
            cand = cand.freshen(&self.taken);
        }
        self.taken.insert(cand.clone());
        self.map.push((n.clone(), cand.clone()));
        cand
    }
    fn unbind(&mut self, rendered: &Name) {
        self.map.pop();
        self.taken.remove(rendered);
    }
}

pub fn print_process(p: &Process) -> String {
    let mut out = String::new();
    let mut sc = Scope::for_process(p);
    proc(p, &mut sc, &mut out);
    out
}

fn proc(p: &Process, sc: &mut Scope, out: &mut String) {
    match p {
        Process::Zero => out.push('0'),
        Process::Fwd(a, b) => {
            out.push_str("fwd ");
            out.push_str(&sc.render(a).to_string());
            out.push(' ');
            out.push_str(&sc.render(b).to_string());
        }
        Process::Par(_, _) => {
            out.push('(');
            let mut first = true;
            for q in flatten(p) {
                if !first {
                    out.push_str(" | ");
                }
                first = false;
                proc(q, sc, out);
            }
            out.push(')');
        }
        Process::New(x, ty_ann, body) => {
            // re-sugar bound output (νx)s⟨x⟩.B when the subject differs from x
            if let Process::Out(s, y, b) = &**body {
                if y == x && s != x {
                    let subj = sc.render(s).to_string();
                    let rx = sc.bind(x);
                    out.push_str("send ");
                    out.push_str(&subj);
                    out.push_str(" (");
                    out.push_str(&rx.to_string());
                    if let Process::Par(p1, q1) = &**b {
                        out.push_str(": ");
                        proc(p1, sc, out);
                        out.push_str(") ");
                        proc(q1, sc, out);
                    } else {
                        out.push_str(") ");
                        proc(b, sc, out);
                    }
                    sc.unbind(&rx);
                    return;
                }
            }
            let rx = sc.bind(x);
            out.push_str("new ");
            out.push_str(&rx.to_string());
            if let Some(t) = ty_ann {
                out.push(':');
                out.push_str(&print_type(t));
            }
            out.push_str(". ");
            proc(body, sc, out);
            sc.unbind(&rx);
        }
        Process::Out(a, b, cont) => {
            out.push_str(&sc.render(a).to_string());
            out.push('<');
            out.push_str(&sc.render(b).to_string());
            out.push_str(">. ");
            proc(cont, sc, out);
        }
        Process::In(a, y, cont) => {
            out.push_str(&sc.render(a).to_string());
            out.push('(');
            let ry = sc.bind(y);
            out.push_str(&ry.to_string());
            out.push_str("). ");
            proc(cont, sc, out);
            sc.unbind(&ry);
        }
        Process::Rep(a, y, cont) => {
            out.push_str("srv ");
            out.push_str(&sc.render(a).to_string());
            out.push('(');
            let ry = sc.bind(y);
            out.push_str(&ry.to_string());
            out.push_str("). ");
            proc(cont, sc, out);
            sc.unbind(&ry);
        }
        Process::TyOut(a, t, cont) => {
            out.push_str("sendty ");
            out.push_str(&sc.render(a).to_string());
            out.push_str(" <");
            out.push_str(&print_type(t));
            out.push_str(">. ");
            proc(cont, sc, out);
        }
        Process::TyIn(a, v, cont) => {
            out.push_str("recvty ");
            out.push_str(&sc.render(a).to_string());
            out.push_str(" (");
            out.push_str(&v.to_string());
            out.push_str("). ");
            proc(cont, sc, out);
        }
        Process::Inl(a, cont) => {
            out.push_str(&sc.render(a).to_string());
            out.push_str(".inl; ");
            proc(cont, sc, out);
        }
        Process::Inr(a, cont) => {
            out.push_str(&sc.render(a).to_string());
            out.push_str(".inr; ");
            proc(cont, sc, out);
        }
        Process::Case(a, p1, p2) => {
            out.push_str("case ");
            out.push_str(&sc.render(a).to_string());
            out.push_str(" (");
            proc(p1, sc, out);
            out.push_str(", ");
            proc(p2, sc, out);
            out.push(')');
        }
        Process::TermOut(a, m, cont) => {
            out.push_str(&sc.render(a).to_string());
            if matches!(m, Term::Var(_)) {
                // braces keep a bare-variable payload parsing as a term
                out.push_str("<{");
                term(m, sc, out);
                out.push_str("}>. ");
            } else {
                out.push('<');
                term(m, sc, out);
                out.push_str(">. ");
            }
            proc(cont, sc, out);
        }
        Process::Spawn(x, m, ys, q) => {
            out.push_str("spawn ");
            let m_ys: Vec<String> = ys.iter().map(|y| sc.render(y).to_string()).collect();
            let rx = sc.bind(x);
            out.push_str(&rx.to_string());
            out.push_str(" <- ");
            term(m, sc, out);
            if !m_ys.is_empty() {
                out.push_str(" <- ");
                out.push_str(&m_ys.join(" "));
            }
            out.push_str("; ");
            proc(q, sc, out);
            sc.unbind(&rx);
        }
    }
}

fn flatten(p: &Process) -> Vec<&Process> {
    match p {
        Process::Par(a, b) => {
            let mut v = flatten(a);
            v.extend(flatten(b));
            v
        }
        other => vec![other],
    }
}

pub fn print_term(m: &Term) -> String {
    let mut out = String::new();
    let mut sc = Scope::for_term(m);
    term(m, &mut sc, &mut out);
    out
}

fn term(m: &Term, sc: &mut Scope, out: &mut String) {
    match m {
        Term::Var(x) => out.push_str(&sc.render(x).to_string()),
        Term::Unit => out.push_str("()"),
        Term::True => out.push_str("true"),
        Term::False => out.push_str("false"),
        Term::Lam(x, t, b) => {
            out.push('\\');
            let rx = sc.bind(x);
            out.push_str(&rx.to_string());
            out.push(':');
            out.push_str(&print_type(t));
            out.push_str(". ");
            term(b, sc, out);
            sc.unbind(&rx);
        }
        Term::TLam(v, b) => {
            out.push_str("/\\");
            out.push_str(&v.to_string());
            out.push_str(". ");
            term(b, sc, out);
        }
        Term::App(f, a) => {
            atomish(f, sc, out, true);
            out.push(' ');
            atomish(a, sc, out, false);
        }
        Term::TApp(f, t) => {
            atomish(f, sc, out, true);
            out.push('[');
            out.push_str(&print_type(t));
            out.push(']');
        }
        Term::Pair(a, b) => {
            out.push('(');
            term(a, sc, out);
            out.push_str(" * ");
            term(b, sc, out);
            out.push(')');
        }
        Term::WithPair(a, b) => {
            out.push('(');
            term(a, sc, out);
            out.push_str(" & ");
            term(b, sc, out);
            out.push(')');
        }
        Term::LetPair(x, y, a, b) => {
            out.push_str("let ");
            term_in_let(&[x, y], a, b, sc, out, |o, names| {
                o.push_str(&names[0]);
                o.push_str(" * ");
                o.push_str(&names[1]);
            });
        }
        Term::Bang(a) => {
            out.push('!');
            atomish(a, sc, out, false);
        }
        Term::LetBang(u, a, b) => {
            out.push_str("let ");
            term_in_let(&[u], a, b, sc, out, |o, names| {
                o.push('!');
                o.push_str(&names[0]);
            });
        }
        Term::Pack(t, a, asc) => {
            out.push_str("pack ");
            out.push_str(&print_type(t));
            out.push_str(" with ");
            term(a, sc, out);
            if let Some(e) = asc {
                out.push_str(" as ");
                out.push_str(&print_type(e));
            }
        }
        Term::LetPack(v, y, a, b) => {
            out.push_str("unpack ");
            term(a, sc, out);
            out.push_str(" as (");
            out.push_str(&v.to_string());
            out.push_str(", ");
            let ry = sc.bind(y);
            out.push_str(&ry.to_string());
            out.push_str(") in ");
            term(b, sc, out);
            sc.unbind(&ry);
        }
        Term::LetUnit(a, b) => {
            out.push_str("let 1 = ");
            term(a, sc, out);
            out.push_str(" in ");
            term(b, sc, out);
        }
        Term::Inj(left, t, a) => {
            out.push_str(if *left { "inl" } else { "inr" });
            out.push('<');
            out.push_str(&print_type(t));
            out.push_str("> ");
            atomish(a, sc, out, false);
        }
        Term::CaseSum(s, x, n1, y, n2) => {
            out.push_str("case ");
            term(s, sc, out);
            out.push_str(" of inl ");
            let rx = sc.bind(x);
            out.push_str(&rx.to_string());
            out.push_str(" => ");
            term(n1, sc, out);
            sc.unbind(&rx);
            out.push_str(" | inr ");
            let ry = sc.bind(y);
            out.push_str(&ry.to_string());
            out.push_str(" => ");
            term(n2, sc, out);
            sc.unbind(&ry);
        }
        Term::Fst(a) => {
            out.push_str("fst ");
            atomish(a, sc, out, false);
        }
        Term::Snd(a) => {
            out.push_str("snd ");
            atomish(a, sc, out, false);
        }
        Term::Quote(z, ann, p, ctx) => {
            out.push_str("quote {");
            let rz = sc.bind(z);
            let mut bound = vec![rz.clone()];
            out.push_str(&rz.to_string());
            if let Some(t) = ann {
                out.push(':');
                out.push_str(&print_type(t));
            }
            out.push_str(" <- ");
            let mut ctx_rendered = Vec::new();
            for (c, t) in ctx {
                let rc = sc.bind(c);
                ctx_rendered.push(format!("{}:{}", rc, print_type(t)));
                bound.push(rc);
            }
            proc(p, sc, out);
            if !ctx_rendered.is_empty() {
                out.push_str(" <- ");
                out.push_str(&ctx_rendered.join(", "));
            }
            out.push('}');
            for rc in bound.iter().rev() {
                sc.unbind(rc);
            }
        }
    }
}

fn term_in_let(
    binders: &[&Name],
    scrutinee: &Term,
    body: &Term,
    sc: &mut Scope,
    out: &mut String,
    write_pat: impl Fn(&mut String, &[String]),
) {
    // scrutinee is outside the binders' scope
    let mut s_scrut = String::new();
    term(scrutinee, sc, &mut s_scrut);
    let rendered: Vec<Name> = binders.iter().map(|b| sc.bind(b)).collect();
    let names: Vec<String> = rendered.iter().map(|n| n.to_string()).collect();
    write_pat(out, &names);
    out.push_str(" = ");
    out.push_str(&s_scrut);
    out.push_str(" in ");
    term(body, sc, out);
    for r in rendered.iter().rev() {
        sc.unbind(r);
    }
}

/// Print a term in application position: atoms stand alone, anything else is
/// parenthesised. `head` allows applications/type applications unparenthesised
/// on the left.
fn atomish(m: &Term, sc: &mut Scope, out: &mut String, head: bool) {
    let atomic = matches!(
        m,
        Term::Var(_) | Term::Unit | Term::True | Term::False | Term::Pair(..)
            | Term::WithPair(..) | Term::Bang(_) | Term::Quote(..)
    ) || (head && matches!(m, Term::App(..) | Term::TApp(..)));
    if atomic {
        term(m, sc, out);
    } else {
        out.push('(');
        term(m, sc, out);
        out.push(')');
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parse::{parse_process, parse_term};

    #[test]
    fn print_trivia() {
        assert_eq!(print_process(&Process::Zero), "0");
        assert_eq!(
            print_process(&Process::Fwd(Name::new("x"), Name::new("z"))),
            "fwd x z"
        );
    }

    #[test]
    fn roundtrip_examples() {
        for src in [
            "new x:1 -o 1. (fwd y x | send x (w: 0) 0)",
            "srv u(y). y(w). 0",
            "sendty x <forall X. X -o X>. recvty x (Y). 0",
            "case x (x.inl; 0, x.inr; 0)",
            "spawn c <- quote {d <- 0}; c(n). 0",
            "z(x). z<{x}>. z<\\y:2. x>. 0",
        ] {
            let p = parse_process(src).unwrap();
            let printed = print_process(&p);
            let p2 = parse_process(&printed).unwrap_or_else(|e| {
                panic!("reparse failed for {printed:?}: {e}");
            });
            assert!(p.alpha_eq(&p2), "{src} => {printed}");
        }
        for src in [
            "\\x:1. x",
            "/\\X. \\x:X. x",
            "let x * y = p in (y * x)",
            "let ! u = y in ! (u ())",
            "pack 1 with \\x:1. x",
            "unpack p as (X, y) in pack X with y",
            "case inl<1 + 1> () of inl a => a | inr b => b",
            "(fst (x & y)) [1] () (z w)",
        ] {
            let m = parse_term(src).unwrap();
            let printed = print_term(&m);
            let m2 = parse_term(&printed).unwrap_or_else(|e| {
                panic!("reparse failed for {printed:?}: {e}");
            });
            assert!(m.alpha_eq(&m2), "{src} => {printed}");
        }
    }

    #[test]
    fn printing_is_deterministic() {
        let p = parse_process("new x:1. (0 | fwd x y)").unwrap();
        assert_eq!(print_process(&p), print_process(&p.clone()));
    }

    #[test]
    fn shadowed_binder_renamed_on_print() {
        // (νx)(fwd x y | (νx) fwd x x) — inner binder must not capture outer
        let inner = Process::new_(Name::new("x"), None, Process::Fwd(Name::new("x"), Name::new("x")));
        let p = Process::new_(
            Name::new("x"),
            None,
            Process::par(Process::Fwd(Name::new("x"), Name::new("y")), inner),
        );
        let printed = print_process(&p);
        let p2 = parse_process(&printed).unwrap();
        assert!(p.alpha_eq(&p2), "{printed}");
    }
}
