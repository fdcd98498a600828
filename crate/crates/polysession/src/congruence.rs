//! Structural congruence ≡ and its sharpened extension ≡!.
//!
//! `struct_normalize` computes a canonical representative of the ≡-class
//! (≡!-class when `sharpened`): parallel composition is flattened and sorted
//! by a stable structural key, restrictions are hoisted as far out as scope
//! extrusion allows, dead restrictions and 0 components are erased,
//! forwarders are oriented, and — under ≡! — unreachable replicated servers
//! are garbage-collected.
//!
//! The sharpened server-distribution axioms are identifications the
//! normaliser does not apply (they duplicate servers); the canonical form is
//! therefore finer than ≡! on processes that differ only by distribution.

use crate::ast::Process;
use crate::names::Name;
use crate::types::Ty;
use std::collections::HashSet;

pub fn struct_normalize(p: &Process, sharpened: bool) -> Process {
    let mut q = normalize(p, sharpened);
    // hoisting can expose new redundancies; iterate to a fixpoint
    for _ in 0..8 {
        let q2 = normalize(&q, sharpened);
        if q2 == q {
            break;
        }
        q = q2;
    }
    q
}

/// Canonical hash key for ≡!-classes (modulo the caveat above): the printed
/// canonical alpha-form of the normal form.
pub fn canon_key(p: &Process) -> String {
    crate::print::print_process(&struct_normalize(p, true).canon())
}

fn is_bound_output(x: &Name, body: &Process) -> bool {
    matches!(body, Process::Out(s, y, _) if y == x && s != x)
}

fn normalize(p: &Process, sharpened: bool) -> Process {
    match p {
        Process::New(x, t, body) if is_bound_output(x, body) => {
            let Process::Out(s, y, cont) = &**body else { unreachable!() };
            Process::New(
                x.clone(),
                t.clone(),
                Box::new(Process::Out(
                    s.clone(),
                    y.clone(),
                    Box::new(normalize(cont, sharpened)),
                )),
            )
        }
        Process::Par(..) | Process::New(..) => normalize_cluster(p, sharpened),
        Process::Zero | Process::Fwd(..) => orient(p.clone()),
        Process::Out(x, y, q) => {
            Process::Out(x.clone(), y.clone(), Box::new(normalize(q, sharpened)))
        }
        Process::In(x, y, q) => Process::In(x.clone(), y.clone(), Box::new(normalize(q, sharpened))),
        Process::Rep(x, y, q) => {
            Process::Rep(x.clone(), y.clone(), Box::new(normalize(q, sharpened)))
        }
        Process::TyOut(x, t, q) => {
            Process::TyOut(x.clone(), t.clone(), Box::new(normalize(q, sharpened)))
        }
        Process::TyIn(x, v, q) => {
            Process::TyIn(x.clone(), v.clone(), Box::new(normalize(q, sharpened)))
        }
        Process::Inl(x, q) => Process::Inl(x.clone(), Box::new(normalize(q, sharpened))),
        Process::Inr(x, q) => Process::Inr(x.clone(), Box::new(normalize(q, sharpened))),
        Process::Case(x, a, b) => Process::Case(
            x.clone(),
            Box::new(normalize(a, sharpened)),
            Box::new(normalize(b, sharpened)),
        ),
        Process::TermOut(x, m, q) => {
            Process::TermOut(x.clone(), m.clone(), Box::new(normalize(q, sharpened)))
        }
        Process::Spawn(c, m, ys, q) => Process::Spawn(
            c.clone(),
            m.clone(),
            ys.clone(),
            Box::new(normalize(q, sharpened)),
        ),
    }
}

fn orient(p: Process) -> Process {
    match p {
        Process::Fwd(a, b) if b < a => Process::Fwd(b, a),
        other => other,
    }
}

/// Normalise a parallel/restriction cluster: collect hoistable restrictions
/// and flat components.
fn normalize_cluster(p: &Process, sharpened: bool) -> Process {
    let mut binders: Vec<(Name, Option<Ty>)> = Vec::new();
    let mut comps: Vec<Process> = Vec::new();
    gather(p.clone(), &mut binders, &mut comps, sharpened);

    // normalise components recursively, splicing nested clusters whose
    // restrictions were hoisted out by the recursive pass
    let mut work = comps;
    let mut comps: Vec<Process> = Vec::new();
    let mut guard = 0;
    while let Some(c) = work.pop() {
        guard += 1;
        if guard > 10_000 {
            comps.push(c);
            continue;
        }
        let c = normalize(&c, sharpened);
        match c {
            Process::Zero => {}
            Process::Par(a, b) => {
                work.push(*a);
                work.push(*b);
            }
            Process::New(x, t, body) if !is_bound_output(&x, &body) => {
                // hoist, renaming if the binder collides with the rest
                let clash = work
                    .iter()
                    .chain(comps.iter())
                    .any(|q| q.free_names().contains(&x))
                    || binders.iter().any(|(b, _)| *b == x);
                if clash {
                    let mut used: HashSet<Name> = body.all_names();
                    for q in work.iter().chain(comps.iter()) {
                        used.extend(q.free_names());
                    }
                    used.extend(binders.iter().map(|(b, _)| b.clone()));
                    let x2 = x.freshen(&used);
                    binders.push((x2.clone(), t));
                    work.push(body.subst_name(&x2, &x));
                } else {
                    binders.push((x.clone(), t));
                    work.push(*body);
                }
            }
            other => comps.push(other),
        }
    }

    // erase dead servers (sharpened) and dead binders
    loop {
        let mut changed = false;
        // dead binders: bound name free nowhere
        binders.retain(|(x, _)| {
            let live = comps.iter().any(|c| c.free_names().contains(x));
            if !live {
                changed = true;
            }
            live
        });
        if sharpened {
            // (νu)(!u(y).Q | R) ≡! R when u ∉ fn(R): a bound server whose
            // channel occurs nowhere else
            let mut i = 0;
            while i < comps.len() {
                let erase = match &comps[i] {
                    Process::Rep(u, _, _) => {
                        binders.iter().any(|(b, _)| b == u)
                            && comps
                                .iter()
                                .enumerate()
                                .all(|(j, c)| j == i || !c.free_names().contains(u))
                    }
                    _ => false,
                };
                if erase {
                    let u = match &comps[i] {
                        Process::Rep(u, _, _) => u.clone(),
                        _ => unreachable!(),
                    };
                    comps.remove(i);
                    binders.retain(|(b, _)| *b != u);
                    changed = true;
                } else {
                    i += 1;
                }
            }
        }
        if !changed {
            break;
        }
    }

    sort_components(&mut comps);

    // order binders by first use in the sorted component list
    let mut ordered: Vec<(Name, Option<Ty>)> = Vec::new();
    for c in &comps {
        let fns = c.free_names();
        let mut i = 0;
        while i < binders.len() {
            if fns.contains(&binders[i].0) {
                ordered.push(binders.remove(i));
            } else {
                i += 1;
            }
        }
    }
    ordered.extend(binders);

    let mut body = match comps.len() {
        0 => Process::Zero,
        _ => {
            let mut it = comps.into_iter().rev();
            let last = it.next().unwrap();
            it.fold(last, |acc, c| Process::par(c, acc))
        }
    };
    for (x, t) in ordered.into_iter().rev() {
        body = Process::New(x, t, Box::new(body));
    }
    body
}

fn gather(p: Process, binders: &mut Vec<(Name, Option<Ty>)>, comps: &mut Vec<Process>, sharpened: bool) {
    match p {
        Process::Par(a, b) => {
            gather(*a, binders, comps, sharpened);
            gather(*b, binders, comps, sharpened);
        }
        Process::New(x, t, body) => {
            // bound output is a prefix, not a restriction to hoist
            if let Process::Out(s, y, _) = &*body {
                if *y == x && *s != x {
                    comps.push(Process::New(x, t, body));
                    return;
                }
            }
            let clash = binders.iter().any(|(b, _)| *b == x)
                || comps.iter().any(|c| c.free_names().contains(&x));
            if clash {
                let mut used: HashSet<Name> = body.all_names();
                used.extend(binders.iter().map(|(b, _)| b.clone()));
                for c in comps.iter() {
                    used.extend(c.free_names());
                }
                let x2 = x.freshen(&used);
                binders.push((x2.clone(), t));
                gather(body.subst_name(&x2, &x), binders, comps, sharpened);
            } else {
                binders.push((x, t));
                gather(*body, binders, comps, sharpened);
            }
        }
        Process::Zero => {}
        other => comps.push(other),
    }
}

/// Deterministic component order. Keys replace cluster-bound names by a
/// placeholder so the order is stable under alpha-renaming of the bound
/// names; two passes settle mutual references.
fn sort_components(comps: &mut [Process]) {
    comps.sort_by_cached_key(|c| crate::print::print_process(&c.canon()));
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parse::parse_process;

    fn norm(src: &str, sharp: bool) -> Process {
        struct_normalize(&parse_process(src).unwrap(), sharp)
    }

    #[test]
    fn unit_par_erased() {
        // P | 0 ≡ P
        let p = norm("(fwd x y | 0)", false);
        assert!(p.alpha_eq(&parse_process("fwd x y").unwrap()));
    }

    #[test]
    fn dead_server_erased_when_sharpened() {
        // (νx)(!x(y).0) ≡! 0
        let p = norm("new x. srv x(y). 0", true);
        assert_eq!(p, Process::Zero);
        // but not under plain ≡
        let q = norm("new x. srv x(y). 0", false);
        assert_ne!(q, Process::Zero);
    }

    #[test]
    fn fwd_orientation() {
        let a = norm("fwd x y", false);
        let b = norm("fwd y x", false);
        assert_eq!(a, b);
    }

    #[test]
    fn scope_extrusion_and_sorting() {
        let a = norm("(fwd a b | new x. (x(w). 0 | fwd x c))", false);
        let b = norm("new x. (fwd x c | (x(w). 0 | fwd a b))", false);
        assert!(a.alpha_eq(&b), "{:?} vs {:?}", a, b);
    }

    #[test]
    fn normalize_idempotent() {
        for src in [
            "(fwd a b | new x. (x(w). 0 | fwd x c))",
            "new u. (srv u(y). 0 | send u (x) 0)",
            "(0 | (0 | 0))",
            "send z (w: fwd x w) fwd y z",
        ] {
            for sharp in [false, true] {
                let p1 = norm(src, sharp);
                let p2 = struct_normalize(&p1, sharp);
                assert_eq!(p1, p2, "{src}");
            }
        }
    }

    #[test]
    fn alpha_variants_same_key() {
        let a = parse_process("new x. (x(w). 0 | fwd x c)").unwrap();
        let b = parse_process("new q. (q(v). 0 | fwd q c)").unwrap();
        assert_eq!(canon_key(&a), canon_key(&b));
    }
}
