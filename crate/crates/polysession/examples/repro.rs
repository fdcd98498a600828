use polysession::algebra::*;
use polysession::ast::Process;
use polysession::bisim::{bounded_weak_bisim, BisimParams, BisimVerdict};
use polysession::names::Name;
use polysession::types::Ty;
use std::time::Instant;

fn main() {
    let (x, z) = (Name::new("x"), Name::new("z"));
    let nat = nat_functor().t_initial();
    let one_dec = Process::new_(
        x.clone(),
        Some(nat),
        Process::par(one_proc(&x), dec_proc(&x, &z)),
    );
    let zero = zero_proc(&z);
    // sanity: tau_run each side a bit
    let t0 = Instant::now();
    let r = polysession::lts::tau_run(&one_dec, 200);
    println!("one|dec tau-run: {} steps, exhausted={} ({:?})", r.trace.len(), r.exhausted, t0.elapsed());
    let t0 = Instant::now();
    let v = bounded_weak_bisim(&one_dec, &zero, &BisimParams::default());
    println!("bisim verdict: {:?} ({:?})", match &v {
        BisimVerdict::EquivalentWithinBounds => "equivalent".to_string(),
        BisimVerdict::Distinguished(tr) => format!("distinguished {tr:?}"),
        BisimVerdict::Inconclusive => "inconclusive".to_string(),
    }, t0.elapsed());
}
