//! Extended reduction ↦ on typed processes modulo ≡: communication prefixes
//! may fire under process contexts, as induced by the commuting conversions
//! of linear logic.
//!
//!   (1) C[(νy)x⟨y⟩.P] | x(y).Q   ↦  C[(νy)(P | Q)]
//!   (2) C[(νy)x⟨y⟩.P] | !x(y).Q  ↦  C[(νy)(P | Q)] | !x(y).Q
//!   (3) (νx)(!x(y).Q)            ↦  0
//!
//! where C does not capture the bound name y (nor bind x). The search works
//! on the ≡-normal form and also fires the value-passing analogue of (1)
//! for term outputs.

use crate::ast::{Process, Term};
use crate::congruence::struct_normalize;
use crate::names::Name;
use std::collections::HashSet;

/// All one-step ↦-reducts of `p` (≡-normalised).
pub fn extended_reduce(p: &Process) -> Vec<Process> {
    let p = struct_normalize(p, false);
    let mut out = Vec::new();
    rewrites(&p, &mut |q| out.push(struct_normalize(&q, false)));
    // dedupe
    let mut seen = HashSet::new();
    out.retain(|q| seen.insert(crate::print::print_process(&q.canon())));
    out
}

/// ↦*-reachable set to the given depth (including p itself).
pub fn extended_reachable(p: &Process, depth: usize) -> Vec<Process> {
    let start = struct_normalize(p, false);
    let mut seen = HashSet::new();
    seen.insert(crate::print::print_process(&start.canon()));
    let mut out = vec![start.clone()];
    let mut frontier = vec![start];
    for _ in 0..depth {
        let mut next = Vec::new();
        for q in &frontier {
            for r in extended_reduce(q) {
                let key = crate::print::print_process(&r.canon());
                if seen.insert(key) {
                    out.push(r.clone());
                    next.push(r);
                }
            }
        }
        if next.is_empty() {
            break;
        }
        frontier = next;
    }
    out
}

/// Visit every subterm position, offering the rewrites applicable there.
fn rewrites(p: &Process, emit: &mut dyn FnMut(Process)) {
    at_position(p, emit);
    // recurse into children through a structural map
    each_child(p, &mut |child, rebuild| {
        rewrites(child, &mut |c2| emit(rebuild(c2)));
    });
}

/// Rewrites whose redex is rooted at this position.
fn at_position(p: &Process, emit: &mut dyn FnMut(Process)) {
    // ↦ extends plain reduction: every τ-step at this position is included
    // (compatibility lifts it under prefixes via the surrounding traversal)
    for (l, t) in crate::lts::lts_step(p, &[]) {
        if matches!(l, crate::lts::Label::Tau) {
            emit(t);
        }
    }
    // clause (3): (νx)(!x(y).Q) ↦ 0
    if let Process::New(x, _, body) = p {
        let comps = flatten(body);
        if comps.len() == 1 {
            if let Process::Rep(u, _, q) = comps[0] {
                if u == x && !q.free_names().contains(x) {
                    emit(Process::Zero);
                }
            }
        }
    }
    // clauses (1), (2): a parallel composition where one component is an
    // input (or server) on x and a sibling contains a bound output on x
    // under a context not binding x
    let comps = flatten_owned(p);
    if comps.len() < 2 {
        return;
    }
    for j in 0..comps.len() {
        let (x, w, q, replicated) = match &comps[j] {
            Process::In(x, w, q) => (x.clone(), w.clone(), (**q).clone(), false),
            Process::Rep(x, w, q) => (x.clone(), w.clone(), (**q).clone(), true),
            _ => continue,
        };
        for i in 0..comps.len() {
            if i == j {
                continue;
            }
            // make the host component's binders fresh for the moving body
            let mut avoid = q.free_names();
            avoid.insert(x.clone());
            let host = uniquify(&comps[i], &avoid);
            plug_bouts(&host, &x, &mut |y, payload_ty, p0, rebuild| {
                // name-passing redex: (νy)x⟨y⟩.P0 | x(w).Q ↦ (νy)(P0 | Q{y/w})
                let moved = q.subst_name(y, &w);
                let new_inner = Process::New(
                    y.clone(),
                    payload_ty.clone(),
                    Box::new(Process::par(p0.clone(), moved)),
                );
                let new_host = rebuild(new_inner);
                let mut cs: Vec<Process> = comps.clone();
                cs[i] = new_host;
                if !replicated {
                    cs.remove(j);
                }
                emit(par_all(cs));
            });
            if !replicated {
                // value-passing analogue: C[x⟨M⟩.P0] | x(w).Q ↦ C[P0] | Q{M/w}
                plug_term_outs(&host, &x, &mut |m: &Term, p0, rebuild| {
                    let moved = q.subst_term(m, &w);
                    let new_host = rebuild(p0.clone());
                    let mut cs: Vec<Process> = comps.clone();
                    cs[i] = new_host;
                    cs[j] = moved;
                    emit(par_all(cs));
                });
            }
        }
    }
}

type Rebuild<'a> = &'a dyn Fn(Process) -> Process;

/// Find all bound-output prefixes on subject `x` inside `p`, reachable
/// through a context that does not bind `x`.
fn plug_bouts(
    p: &Process,
    x: &Name,
    visit: &mut dyn FnMut(&Name, &Option<crate::types::Ty>, &Process, Rebuild),
) {
    if let Process::New(y, t, body) = p {
        if let Process::Out(s, y2, cont) = &**body {
            if s == x && y2 == y && y != x {
                visit(y, t, cont, &|repl| repl);
            }
        }
    }
    each_child(p, &mut |child, rebuild| {
        if binds_along(p, child, x) {
            return;
        }
        plug_bouts(child, x, &mut |y, t, cont, inner_rb| {
            visit(y, t, cont, &|repl| rebuild(inner_rb(repl)));
        });
    });
}

fn plug_term_outs(
    p: &Process,
    x: &Name,
    visit: &mut dyn FnMut(&Term, &Process, Rebuild),
) {
    if let Process::TermOut(s, m, cont) = p {
        if s == x {
            visit(m, cont, &|repl| repl);
        }
    }
    each_child(p, &mut |child, rebuild| {
        if binds_along(p, child, x) {
            return;
        }
        plug_term_outs(child, x, &mut |m, cont, inner_rb| {
            visit(m, cont, &|repl| rebuild(inner_rb(repl)));
        });
    });
}

/// Does descending from `p` into `child` cross a binder for `x`?
fn binds_along(p: &Process, _child: &Process, x: &Name) -> bool {
    match p {
        Process::New(b, _, _) => b == x,
        Process::In(_, b, _) | Process::Rep(_, b, _) => b == x,
        Process::Spawn(b, _, _, _) => b == x,
        _ => false,
    }
}

/// Map over immediate children with a rebuilding closure.
fn each_child(p: &Process, f: &mut dyn FnMut(&Process, Rebuild)) {
    match p {
        Process::Zero | Process::Fwd(..) => {}
        Process::Par(a, b) => {
            let (ac, bc) = ((**a).clone(), (**b).clone());
            f(a, &{
                let bc = bc.clone();
                move |a2| Process::par(a2, bc.clone())
            });
            f(b, &move |b2| Process::par(ac.clone(), b2));
        }
        Process::New(x, t, body) => {
            let (x, t) = (x.clone(), t.clone());
            f(body, &move |b2| Process::New(x.clone(), t.clone(), Box::new(b2)));
        }
        Process::Out(x, y, body) => {
            let (x, y) = (x.clone(), y.clone());
            f(body, &move |b2| Process::Out(x.clone(), y.clone(), Box::new(b2)));
        }
        Process::In(x, y, body) => {
            let (x, y) = (x.clone(), y.clone());
            f(body, &move |b2| Process::In(x.clone(), y.clone(), Box::new(b2)));
        }
        Process::Rep(x, y, body) => {
            let (x, y) = (x.clone(), y.clone());
            f(body, &move |b2| Process::Rep(x.clone(), y.clone(), Box::new(b2)));
        }
        Process::TyOut(x, t, body) => {
            let (x, t) = (x.clone(), t.clone());
            f(body, &move |b2| Process::TyOut(x.clone(), t.clone(), Box::new(b2)));
        }
        Process::TyIn(x, v, body) => {
            let (x, v) = (x.clone(), v.clone());
            f(body, &move |b2| Process::TyIn(x.clone(), v.clone(), Box::new(b2)));
        }
        Process::Inl(x, body) => {
            let x = x.clone();
            f(body, &move |b2| Process::Inl(x.clone(), Box::new(b2)));
        }
        Process::Inr(x, body) => {
            let x = x.clone();
            f(body, &move |b2| Process::Inr(x.clone(), Box::new(b2)));
        }
        Process::Case(x, a, b) => {
            let (xc, ac, bc) = (x.clone(), (**a).clone(), (**b).clone());
            f(a, &{
                let (xc, bc) = (xc.clone(), bc.clone());
                move |a2| Process::Case(xc.clone(), Box::new(a2), Box::new(bc.clone()))
            });
            f(b, &move |b2| {
                Process::Case(xc.clone(), Box::new(ac.clone()), Box::new(b2))
            });
        }
        Process::TermOut(x, m, body) => {
            let (x, m) = (x.clone(), m.clone());
            f(body, &move |b2| {
                Process::TermOut(x.clone(), m.clone(), Box::new(b2))
            });
        }
        Process::Spawn(c, m, ys, q) => {
            let (c, m, ys) = (c.clone(), m.clone(), ys.clone());
            f(q, &move |q2| {
                Process::Spawn(c.clone(), m.clone(), ys.clone(), Box::new(q2))
            });
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

fn flatten_owned(p: &Process) -> Vec<Process> {
    flatten(p).into_iter().cloned().collect()
}

fn par_all(mut ps: Vec<Process>) -> Process {
    match ps.len() {
        0 => Process::Zero,
        1 => ps.pop().unwrap(),
        _ => {
            let mut it = ps.into_iter().rev();
            let last = it.next().unwrap();
            it.fold(last, |acc, p| Process::par(p, acc))
        }
    }
}

/// Rename every binder in `p` that clashes with `avoid` (or repeats) to a
/// fresh name.
fn uniquify(p: &Process, avoid: &HashSet<Name>) -> Process {
    fn go(p: &Process, used: &mut HashSet<Name>) -> Process {
        match p {
            Process::New(x, t, body) => {
                let (x2, body2) = rebind(x, body, used);
                Process::New(x2, t.clone(), Box::new(go(&body2, used)))
            }
            Process::In(s, x, body) => {
                let (x2, body2) = rebind(x, body, used);
                Process::In(s.clone(), x2, Box::new(go(&body2, used)))
            }
            Process::Rep(s, x, body) => {
                let (x2, body2) = rebind(x, body, used);
                Process::Rep(s.clone(), x2, Box::new(go(&body2, used)))
            }
            Process::Spawn(c, m, ys, q) => {
                let (c2, q2) = rebind(c, q, used);
                Process::Spawn(c2, m.clone(), ys.clone(), Box::new(go(&q2, used)))
            }
            other => {
                let mut clone = other.clone();
                each_child_mut(&mut clone, &mut |child| {
                    *child = go(child, used);
                });
                clone
            }
        }
    }
    fn rebind(x: &Name, body: &Process, used: &mut HashSet<Name>) -> (Name, Process) {
        if used.contains(x) {
            let mut all = used.clone();
            all.extend(body.all_names());
            let x2 = x.freshen(&all);
            used.insert(x2.clone());
            (x2.clone(), body.subst_name(&x2, x))
        } else {
            used.insert(x.clone());
            (x.clone(), body.clone())
        }
    }
    fn each_child_mut(p: &mut Process, f: &mut dyn FnMut(&mut Process)) {
        match p {
            Process::Zero | Process::Fwd(..) => {}
            Process::Par(a, b) | Process::Case(_, a, b) => {
                f(a);
                f(b);
            }
            Process::New(_, _, b)
            | Process::Out(_, _, b)
            | Process::In(_, _, b)
            | Process::Rep(_, _, b)
            | Process::TyOut(_, _, b)
            | Process::TyIn(_, _, b)
            | Process::Inl(_, b)
            | Process::Inr(_, b)
            | Process::TermOut(_, _, b)
            | Process::Spawn(_, _, _, b) => f(b),
        }
    }
    let mut used = avoid.clone();
    used.extend(p.free_names());
    go(p, &mut used)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parse::parse_process;

    fn p(src: &str) -> Process {
        parse_process(src).unwrap()
    }

    fn has(reducts: &[Process], expect: &Process) -> bool {
        let e = struct_normalize(expect, false);
        reducts.iter().any(|r| r.alpha_eq(&e))
    }

    #[test]
    fn clause1_top_level() {
        // (νx)(x̄⟨y⟩.P | x(y).Q) reducts contain (νx)(νy)(P|Q)
        let q = p("new x:1 * 1. (send x (y: 0) 0 | x(y). 0)");
        let rs = extended_reduce(&q);
        assert!(has(&rs, &p("new x. new y. (0 | (0 | 0))")), "{rs:?}");
    }

    #[test]
    fn clause3_server_gc() {
        let q = p("new x. srv x(y). 0");
        let rs = extended_reduce(&q);
        assert!(has(&rs, &Process::Zero));
    }

    #[test]
    fn blocked_output_fires_under_prefix() {
        // x̄⟨y⟩.(νz)(z(w).0 | z̄⟨w⟩.0) ↦ x̄⟨y⟩.(νz,w)(0|0)
        let q = p("send x (y: 0) new z: 1 * 1. (z(w). 0 | send z (w: 0) 0)");
        let rs = extended_reduce(&q);
        assert!(
            has(&rs, &p("send x (y: 0) new z. new w. (0 | (0 | 0))")),
            "{}",
            rs.iter().map(crate::print::print_process).collect::<Vec<_>>().join("\n")
        );
    }

    #[test]
    fn every_tau_is_covered() {
        // ↦ extends τ-reduction on cuts
        let q = p("new x: forall X. X -o X. ((recvty x (X). x(a). fwd a x) | sendty x <1>. send x (b: 0) x(w). fwd w r)");
        let taus: Vec<Process> = crate::lts::lts_step(&struct_normalize(&q, false), &[])
            .into_iter()
            .filter(|(l, _)| matches!(l, crate::lts::Label::Tau))
            .map(|(_, t)| struct_normalize(&t, false))
            .collect();
        let ext = extended_reduce(&q);
        for t in &taus {
            assert!(
                ext.iter().any(|e| e.alpha_eq(t)),
                "tau-reduct {} not in ↦ set",
                crate::print::print_process(t)
            );
        }
    }
}
