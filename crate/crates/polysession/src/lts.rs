//! The early labelled transition system, τ-execution and barbs.
//!
//! Transitions are computed compositionally. Input actions are kept symbolic
//! (binder plus template) so parallel composition can synchronise them with
//! the actual payload; `lts_step` instantiates the ones that survive to the
//! top with one representative fresh name (free inputs) or the candidate
//! type set (type inputs) — the finite-branching restriction.

use crate::ast::{Process, Term};
use crate::congruence::struct_normalize;
use crate::names::Name;
use crate::print::{print_process, print_type};
use crate::types::Ty;
use std::collections::{BTreeSet, HashSet};
use std::fmt;

#[derive(Clone, PartialEq, Debug)]
pub enum Label {
    Tau,
    Out(Name, Name),
    BoundOut(Name, Name),
    In(Name, Name),
    TyOut(Name, Ty),
    TyIn(Name, Ty),
    SelL(Name),
    SelR(Name),
    OffL(Name),
    OffR(Name),
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Label::Tau => write!(f, "tau"),
            Label::Out(x, y) => write!(f, "{x}!{y}"),
            Label::BoundOut(x, y) => write!(f, "{x}!(new {y})"),
            Label::In(x, y) => write!(f, "{x}?{y}"),
            Label::TyOut(x, a) => write!(f, "{x}!<{}>", print_type(a)),
            Label::TyIn(x, a) => write!(f, "{x}?<{}>", print_type(a)),
            Label::SelL(x) => write!(f, "{x}!.inl"),
            Label::SelR(x) => write!(f, "{x}!.inr"),
            Label::OffL(x) => write!(f, "{x}?.inl"),
            Label::OffR(x) => write!(f, "{x}?.inr"),
        }
    }
}

/// A symbolic action: inputs carry their binder and template.
#[derive(Clone, Debug)]
pub enum Act {
    /// internal step; the name records the subject of a replicated server
    /// when the step spawned a replica (used for the bisimulation bound)
    Tau(Process, Option<Name>),
    Out(Name, Name, Process),
    BoundOut(Name, Name, Option<Ty>, Process),
    In(Name, Name, Process, bool), // bool: replicated input
    TyOut(Name, Ty, Process),
    TyIn(Name, Name, Process),
    SelL(Name, Process),
    SelR(Name, Process),
    OffL(Name, Process),
    OffR(Name, Process),
    TermOut(Name, Term, Process),
}

impl Act {
    fn subject(&self) -> &Name {
        match self {
            Act::Tau(..) => unreachable!("tau has no subject"),
            Act::Out(x, ..)
            | Act::BoundOut(x, ..)
            | Act::In(x, ..)
            | Act::TyOut(x, ..)
            | Act::TyIn(x, ..)
            | Act::SelL(x, _)
            | Act::SelR(x, _)
            | Act::OffL(x, _)
            | Act::OffR(x, _)
            | Act::TermOut(x, ..) => x,
        }
    }

    /// Does the action mention `x` among its free names (subject or free
    /// payload)?
    fn mentions(&self, x: &Name) -> bool {
        match self {
            Act::Tau(..) => false,
            Act::Out(s, y, _) => s == x || y == x,
            Act::BoundOut(s, _, _, _) => s == x,
            Act::In(s, _, _, _) => s == x,
            Act::TyOut(s, _, _) | Act::TyIn(s, _, _) => s == x,
            Act::SelL(s, _) | Act::SelR(s, _) | Act::OffL(s, _) | Act::OffR(s, _) => s == x,
            Act::TermOut(s, m, _) => s == x || m.free_vars().contains(x),
        }
    }

    fn map_target(self, f: impl Fn(Process) -> Process) -> Act {
        match self {
            Act::Tau(p, s) => Act::Tau(f(p), s),
            Act::Out(x, y, p) => Act::Out(x, y, f(p)),
            Act::BoundOut(x, y, t, p) => Act::BoundOut(x, y, t, f(p)),
            Act::In(x, w, p, r) => Act::In(x, w, f(p), r),
            Act::TyOut(x, t, p) => Act::TyOut(x, t, f(p)),
            Act::TyIn(x, v, p) => Act::TyIn(x, v, f(p)),
            Act::SelL(x, p) => Act::SelL(x, f(p)),
            Act::SelR(x, p) => Act::SelR(x, f(p)),
            Act::OffL(x, p) => Act::OffL(x, f(p)),
            Act::OffR(x, p) => Act::OffR(x, f(p)),
            Act::TermOut(x, m, p) => Act::TermOut(x, m, f(p)),
        }
    }
}

/// All strong actions of `p`.
pub fn acts(p: &Process) -> Vec<Act> {
    match p {
        Process::Zero | Process::Fwd(..) => vec![],
        Process::Out(x, y, q) => vec![Act::Out(x.clone(), y.clone(), (**q).clone())],
        Process::In(x, w, q) => vec![Act::In(x.clone(), w.clone(), (**q).clone(), false)],
        Process::Rep(x, w, q) => {
            let template = Process::par((**q).clone(), p.clone());
            vec![Act::In(x.clone(), w.clone(), template, true)]
        }
        Process::TyOut(x, a, q) => vec![Act::TyOut(x.clone(), a.clone(), (**q).clone())],
        Process::TyIn(x, v, q) => vec![Act::TyIn(x.clone(), v.clone(), (**q).clone())],
        Process::Inl(x, q) => vec![Act::SelL(x.clone(), (**q).clone())],
        Process::Inr(x, q) => vec![Act::SelR(x.clone(), (**q).clone())],
        Process::Case(x, a, b) => vec![
            Act::OffL(x.clone(), (**a).clone()),
            Act::OffR(x.clone(), (**b).clone()),
        ],
        Process::TermOut(x, m, q) => vec![Act::TermOut(x.clone(), m.clone(), (**q).clone())],
        Process::Spawn(c, m, ys, q) => match m {
            Term::Quote(z, ann, body, ctx) => {
                let mut inner = (**body).clone();
                for ((xi, _), yi) in ctx.iter().zip(ys) {
                    inner = inner.subst_name(yi, xi);
                }
                inner = inner.subst_name(c, z);
                let target = Process::New(
                    c.clone(),
                    ann.clone(),
                    Box::new(Process::par(inner, (**q).clone())),
                );
                vec![Act::Tau(target, None)]
            }
            _ => match crate::fsem::cbn_step(m) {
                Some(m2) => vec![Act::Tau(
                    Process::Spawn(c.clone(), m2, ys.clone(), q.clone()),
                    None,
                )],
                None => vec![],
            },
        },
        Process::Par(a, b) => {
            let la = acts(a);
            let lb = acts(b);
            let mut out = Vec::new();
            for act in &la {
                out.push(act.clone().map_target(|t| Process::par(t, (**b).clone())));
            }
            for act in &lb {
                out.push(act.clone().map_target(|t| Process::par((**a).clone(), t)));
            }
            // synchronisations, both orientations
            for (outs, ins, left_out) in [(&la, &lb, true), (&lb, &la, false)] {
                for o in outs.iter() {
                    for i in ins.iter() {
                        if let Some(t) = sync(o, i, left_out) {
                            out.push(t);
                        }
                    }
                }
            }
            out
        }
        Process::New(x, ann, body) => {
            let mut out = Vec::new();
            // the (id) rule: (νx)([x↔y] | P) —τ→ P{y/x}
            let comps = flatten(body);
            for (idx, c) in comps.iter().enumerate() {
                if let Process::Fwd(a, b) = c {
                    let other = if a == x {
                        Some(b)
                    } else if b == x {
                        Some(a)
                    } else {
                        None
                    };
                    if let Some(y) = other {
                        if y != x {
                            let rest: Vec<Process> = comps
                                .iter()
                                .enumerate()
                                .filter(|(j, _)| *j != idx)
                                .map(|(_, c)| (*c).clone())
                                .collect();
                            let joined = par_all(rest);
                            out.push(Act::Tau(joined.subst_name(y, x), None));
                        }
                    }
                }
            }
            for act in acts(body) {
                match &act {
                    Act::Out(s, y, target) if y == x && s != x => {
                        out.push(Act::BoundOut(
                            s.clone(),
                            x.clone(),
                            ann.clone(),
                            target.clone(),
                        ));
                    }
                    Act::Tau(..) => {
                        out.push(act.map_target(|t| Process::New(x.clone(), ann.clone(), Box::new(t))));
                    }
                    a if !a.mentions(x) => {
                        // keep the restriction around the target; for input
                        // templates capture-avoiding substitution protects x
                        // at instantiation time
                        out.push(act.clone().map_target(|t| {
                            Process::New(x.clone(), ann.clone(), Box::new(t))
                        }));
                    }
                    _ => {}
                }
            }
            out
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

/// Synchronise an output-like action with an input-like one; `left_out`
/// orients the resulting parallel composition.
fn sync(o: &Act, i: &Act, left_out: bool) -> Option<Act> {
    let compose = |p: Process, q: Process| {
        if left_out {
            Process::par(p, q)
        } else {
            Process::par(q, p)
        }
    };
    match (o, i) {
        (Act::Out(x, y, p), Act::In(x2, w, q, rep)) if x == x2 => {
            let q2 = q.subst_name(y, w);
            Some(Act::Tau(
                compose(p.clone(), q2),
                rep.then(|| x.clone()),
            ))
        }
        (Act::BoundOut(x, y, t, p), Act::In(x2, w, q, rep)) if x == x2 => {
            // (close): re-bind y around both; rename if it collides with the
            // receiver
            let mut y2 = y.clone();
            let mut p2 = p.clone();
            if q.free_names().contains(y) {
                let mut used = q.all_names();
                used.extend(p.all_names());
                y2 = y.freshen(&used);
                p2 = p.subst_name(&y2, y);
            }
            let q2 = q.subst_name(&y2, w);
            Some(Act::Tau(
                Process::New(y2, t.clone(), Box::new(compose(p2, q2))),
                rep.then(|| x.clone()),
            ))
        }
        (Act::TermOut(x, m, p), Act::In(x2, w, q, rep)) if x == x2 => {
            let q2 = q.subst_term(m, w);
            Some(Act::Tau(compose(p.clone(), q2), rep.then(|| x.clone())))
        }
        (Act::TyOut(x, a, p), Act::TyIn(x2, v, q)) if x == x2 => {
            let q2 = q.subst_tyvar(v, a);
            Some(Act::Tau(compose(p.clone(), q2), None))
        }
        (Act::SelL(x, p), Act::OffL(x2, q)) if x == x2 => {
            Some(Act::Tau(compose(p.clone(), q.clone()), None))
        }
        (Act::SelR(x, p), Act::OffR(x2, q)) if x == x2 => {
            Some(Act::Tau(compose(p.clone(), q.clone()), None))
        }
        _ => None,
    }
}

/// The early transitions of `p`, with free inputs instantiated by one
/// representative fresh name and type inputs by the candidate set.
pub fn lts_step(p: &Process, tycands: &[Ty]) -> Vec<(Label, Process)> {
    let used = p.all_names();
    let mut out = Vec::new();
    for act in acts(p) {
        match act {
            Act::Tau(t, _) => out.push((Label::Tau, t)),
            Act::Out(x, y, t) => out.push((Label::Out(x, y), t)),
            Act::BoundOut(x, y, _, t) => out.push((Label::BoundOut(x, y), t)),
            Act::In(x, w, template, _) => {
                let fresh = Name::new(format!("in_{}", x.base)).freshen(&used);
                let inst = template.subst_name(&fresh, &w);
                out.push((Label::In(x, fresh), inst));
            }
            Act::TyIn(x, v, template) => {
                for b in tycands {
                    out.push((
                        Label::TyIn(x.clone(), b.clone()),
                        template.subst_tyvar(&v, b),
                    ));
                }
            }
            Act::TyOut(x, a, t) => out.push((Label::TyOut(x, a), t)),
            Act::SelL(x, t) => out.push((Label::SelL(x), t)),
            Act::SelR(x, t) => out.push((Label::SelR(x), t)),
            Act::OffL(x, t) => out.push((Label::OffL(x), t)),
            Act::OffR(x, t) => out.push((Label::OffR(x), t)),
            // unsynchronised term traffic is observable as a barb but not
            // exposed as a first-class transition
            Act::TermOut(..) => {}
        }
    }
    out
}

#[derive(Clone, Debug)]
pub struct TauRun {
    pub final_state: Process,
    pub trace: Vec<Process>,
    pub exhausted: bool,
}

/// Apply τ-steps (normalising with ≡ between steps) until stuck or out of
/// budget. Deterministic: the first successor in generation order is taken.
pub fn tau_run(p: &Process, maxsteps: usize) -> TauRun {
    let mut cur = struct_normalize(p, false);
    let mut trace = Vec::new();
    for _ in 0..maxsteps {
        let next = acts(&cur).into_iter().find_map(|a| match a {
            Act::Tau(t, _) => Some(t),
            _ => None,
        });
        match next {
            Some(t) => {
                cur = struct_normalize(&t, false);
                trace.push(cur.clone());
            }
            None => {
                return TauRun { final_state: cur, trace, exhausted: false };
            }
        }
    }
    let exhausted = acts(&cur).iter().any(|a| matches!(a, Act::Tau(..)));
    TauRun { final_state: cur, trace, exhausted }
}

/// Basic observables: x! for outputs (of names, types or terms), x? for
/// inputs, and the four selection/offer barbs.
pub fn barbs(p: &Process) -> BTreeSet<String> {
    let q = struct_normalize(p, false);
    let mut out = BTreeSet::new();
    for a in acts(&q) {
        match a {
            Act::Tau(..) => {}
            Act::Out(x, ..) | Act::BoundOut(x, ..) | Act::TyOut(x, ..) | Act::TermOut(x, ..) => {
                out.insert(format!("{x}!"));
            }
            Act::In(x, ..) | Act::TyIn(x, ..) => {
                out.insert(format!("{x}?"));
            }
            Act::SelL(x, _) => {
                out.insert(format!("{x}!.inl"));
            }
            Act::SelR(x, _) => {
                out.insert(format!("{x}!.inr"));
            }
            Act::OffL(x, _) => {
                out.insert(format!("{x}?.inl"));
            }
            Act::OffR(x, _) => {
                out.insert(format!("{x}?.inr"));
            }
        }
    }
    out
}

/// τ-reachable states up to `bound` steps (≡-normalised, deduplicated).
pub fn tau_reachable(p: &Process, bound: usize) -> Vec<Process> {
    let start = struct_normalize(p, false);
    let mut seen = HashSet::new();
    seen.insert(print_process(&start.canon()));
    let mut frontier = vec![start.clone()];
    let mut out = vec![start];
    for _ in 0..bound {
        let mut next = Vec::new();
        for q in &frontier {
            for a in acts(q) {
                if let Act::Tau(t, _) = a {
                    let t = struct_normalize(&t, false);
                    let key = print_process(&t.canon());
                    if seen.insert(key) {
                        out.push(t.clone());
                        next.push(t);
                    }
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

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parse::parse_process;

    fn p(src: &str) -> Process {
        parse_process(src).unwrap()
    }

    #[test]
    fn out_prefix_steps() {
        // x⟨y⟩.P —x̄⟨y⟩→ P
        let steps = lts_step(&p("x<y>. 0"), &[]);
        assert_eq!(steps.len(), 1);
        assert!(matches!(&steps[0].0, Label::Out(a, b) if a.base == "x" && b.base == "y"));
    }

    #[test]
    fn id_rule_renames() {
        // (νx)([x↔y] | P) —τ→ P{y/x}
        let steps = lts_step(&p("new x. (fwd x y | x(w). 0)"), &[]);
        let taus: Vec<_> = steps
            .iter()
            .filter(|(l, _)| matches!(l, Label::Tau))
            .collect();
        assert_eq!(taus.len(), 1);
        assert!(taus[0].1.alpha_eq(&p("y(w). 0")));
    }

    #[test]
    fn replication_spawns() {
        // !x(y).P steps to a replica alongside the server
        let steps = lts_step(&p("srv x(y). 0"), &[]);
        assert_eq!(steps.len(), 1);
        match &steps[0] {
            (Label::In(x, _), target) => {
                assert_eq!(x.base, "x");
                let comps = flatten(target).len();
                assert_eq!(comps, 2);
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn close_rebinds() {
        // (νy)x⟨y⟩.0 | x(w).w(v).0 —τ→ (νy)(0 | y(v).0)
        let q = p("(send x (y) 0 | x(w). w(v). 0)");
        let taus: Vec<_> = lts_step(&q, &[])
            .into_iter()
            .filter(|(l, _)| matches!(l, Label::Tau))
            .collect();
        assert_eq!(taus.len(), 1);
        let expect = p("new y. (0 | y(v). 0)");
        assert!(taus[0].1.alpha_eq(&expect), "{}", print_process(&taus[0].1));
    }

    #[test]
    fn tau_run_close_com() {
        // tau_run((νx)(x(y).0 | (νy)x⟨y⟩.0)) ends ≡ 0
        let q = p("new x. (x(y). 0 | send x (y) 0)");
        let r = tau_run(&q, 16);
        assert!(!r.exhausted);
        assert_eq!(r.final_state, Process::Zero);
        assert_eq!(tau_run(&Process::Zero, 4).trace.len(), 0);
    }

    #[test]
    fn barbs_examples() {
        // barbs(x̄⟨y⟩.0) = {x!}
        assert_eq!(
            barbs(&p("send x (y) 0")).into_iter().collect::<Vec<_>>(),
            vec!["x!".to_string()]
        );
        assert!(barbs(&Process::Zero).is_empty());
        // barbs(x.case(P,Q)) = {x?.inl, x?.inr}
        assert_eq!(
            barbs(&p("case x (0, 0)")).into_iter().collect::<Vec<_>>(),
            vec!["x?.inl".to_string(), "x?.inr".to_string()]
        );
    }

    #[test]
    fn type_sync() {
        let q = p("new x. (recvty x (X). 0 | sendty x <1>. 0)");
        let r = tau_run(&q, 8);
        assert_eq!(r.final_state, Process::Zero);
    }

    #[test]
    fn spawn_reduces() {
        let q = p("spawn c <- quote {d:1 <- 0}; c(n). 0");
        // the spawn fires, then nothing (input on c waits on 0-provider)
        let steps = lts_step(&q, &[]);
        assert!(steps.iter().any(|(l, _)| matches!(l, Label::Tau)));
    }

    #[test]
    fn term_comm_substitutes() {
        let q = p("new x:2 /\\ 1. (x<true>. 0 | x(v). 0)");
        let r = tau_run(&q, 8);
        assert_eq!(r.final_state, Process::Zero);
    }
}
