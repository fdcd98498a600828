//! Typing judgments, rule names and derivation trees for both calculi.
//!
//! A derivation records at each node the rule, the conclusion judgment, the
//! principal name (for left rules, cut and copy) and the type argument where
//! a rule carries one (cut type, sent type). The linear split is implicit in
//! the children's Δ contexts: replay checks it is an exact partition.

use crate::ast::{Process, Term};
use crate::names::Name;
use crate::types::Ty;
use std::fmt;

/// Which rule system a process is checked in.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Calculus {
    /// Polymorphic session calculus, no data layer.
    Core,
    /// Value passing: data layer, ∧/⊃, no polymorphism.
    Vals,
    /// Higher order: value passing plus the contextual monad.
    Ho,
}

impl fmt::Display for Calculus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Calculus::Core => write!(f, "core"),
            Calculus::Vals => write!(f, "vals"),
            Calculus::Ho => write!(f, "ho"),
        }
    }
}

/// Ψ; Ω; Γ; Δ with a subject. Core judgments have empty Ψ, value-passing
/// judgments have empty Ω.
#[derive(Clone, PartialEq, Debug, Default)]
pub struct Contexts {
    /// data variables x:τ
    pub psi: Vec<(Name, Ty)>,
    /// type variables
    pub omega: Vec<Name>,
    /// unrestricted sessions u:A
    pub gamma: Vec<(Name, Ty)>,
    /// linear sessions x:A
    pub delta: Vec<(Name, Ty)>,
}

impl Contexts {
    pub fn lookup(entries: &[(Name, Ty)], n: &Name) -> Option<Ty> {
        entries
            .iter()
            .rev()
            .find(|(m, _)| m == n)
            .map(|(_, t)| t.clone())
    }
}

/// Conclusion of a process rule: contexts ⊢ P :: z:A, or of a term rule:
/// contexts ⊢ M : A.
#[derive(Clone, PartialEq, Debug)]
pub enum Judgment {
    Proc {
        ctx: Contexts,
        proc: Process,
        chan: Name,
        ty: Ty,
    },
    Term {
        ctx: Contexts,
        term: Term,
        ty: Ty,
        /// true when this is the data-layer judgment Ψ ⊢ M : τ
        data: bool,
    },
}

impl Judgment {
    pub fn ctx(&self) -> &Contexts {
        match self {
            Judgment::Proc { ctx, .. } => ctx,
            Judgment::Term { ctx, .. } => ctx,
        }
    }
    pub fn ty(&self) -> &Ty {
        match self {
            Judgment::Proc { ty, .. } => ty,
            Judgment::Term { ty, .. } => ty,
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum PiRule {
    Id,
    OneR,
    OneL,
    LolliR,
    LolliL,
    TensorR,
    TensorL,
    WithR,
    WithL1,
    WithL2,
    PlusR1,
    PlusR2,
    PlusL,
    BangR,
    BangL,
    Copy,
    ForallR,
    ForallL,
    ExistsR,
    ExistsL,
    Cut,
    CutBang,
    AndR,
    AndL,
    ImplR,
    ImplL,
    MonadE,
}

impl fmt::Display for PiRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            PiRule::Id => "id",
            PiRule::OneR => "1R",
            PiRule::OneL => "1L",
            PiRule::LolliR => "-oR",
            PiRule::LolliL => "-oL",
            PiRule::TensorR => "*R",
            PiRule::TensorL => "*L",
            PiRule::WithR => "&R",
            PiRule::WithL1 => "&L1",
            PiRule::WithL2 => "&L2",
            PiRule::PlusR1 => "+R1",
            PiRule::PlusR2 => "+R2",
            PiRule::PlusL => "+L",
            PiRule::BangR => "!R",
            PiRule::BangL => "!L",
            PiRule::Copy => "copy",
            PiRule::ForallR => "forallR",
            PiRule::ForallL => "forallL",
            PiRule::ExistsR => "existsR",
            PiRule::ExistsL => "existsL",
            PiRule::Cut => "cut",
            PiRule::CutBang => "cut!",
            PiRule::AndR => "/\\R",
            PiRule::AndL => "/\\L",
            PiRule::ImplR => "=>R",
            PiRule::ImplL => "=>L",
            PiRule::MonadE => "{}E",
        };
        write!(f, "{s}")
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum LfRule {
    Var,
    UVar,
    LolliI,
    LolliE,
    TensorI,
    TensorE,
    BangI,
    BangE,
    ForallI,
    ForallE,
    ExistsI,
    ExistsE,
    OneI,
    OneE,
    TwoI1,
    TwoI2,
    PlusI1,
    PlusI2,
    PlusE,
    WithI,
    WithE1,
    WithE2,
    // data layer
    DVar,
    DLam,
    DApp,
    DTrue,
    DFalse,
    MonadI,
}

impl fmt::Display for LfRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            LfRule::Var => "var",
            LfRule::UVar => "uvar",
            LfRule::LolliI => "-oI",
            LfRule::LolliE => "-oE",
            LfRule::TensorI => "*I",
            LfRule::TensorE => "*E",
            LfRule::BangI => "!I",
            LfRule::BangE => "!E",
            LfRule::ForallI => "forallI",
            LfRule::ForallE => "forallE",
            LfRule::ExistsI => "existsI",
            LfRule::ExistsE => "existsE",
            LfRule::OneI => "1I",
            LfRule::OneE => "1E",
            LfRule::TwoI1 => "2I1",
            LfRule::TwoI2 => "2I2",
            LfRule::PlusI1 => "+I1",
            LfRule::PlusI2 => "+I2",
            LfRule::PlusE => "+E",
            LfRule::WithI => "&I",
            LfRule::WithE1 => "&E1",
            LfRule::WithE2 => "&E2",
            LfRule::DVar => "dvar",
            LfRule::DLam => "dlam",
            LfRule::DApp => "dapp",
            LfRule::DTrue => "dtrue",
            LfRule::DFalse => "dfalse",
            LfRule::MonadI => "{}I",
        };
        write!(f, "{s}")
    }
}

/// Process-typing derivation. Data premises (∧R, ⊃L, {}E) live in
/// `term_children`; {}I inside a term derivation points back to a process
/// derivation.
#[derive(Clone, PartialEq, Debug)]
pub struct Derivation {
    pub rule: PiRule,
    pub judgment: Judgment,
    pub principal: Option<Name>,
    /// type argument for cut (cut type), ∀L/∃R (sent type)
    pub ty_arg: Option<Ty>,
    pub children: Vec<Derivation>,
    pub term_children: Vec<LfDerivation>,
}

#[derive(Clone, PartialEq, Debug)]
pub struct LfDerivation {
    pub rule: LfRule,
    pub judgment: Judgment,
    pub principal: Option<Name>,
    pub ty_arg: Option<Ty>,
    pub children: Vec<LfDerivation>,
    pub proc_children: Vec<Derivation>,
}

fn json_escape(s: &str) -> String {
    s.replace('\\', "\\\\").replace('"', "\\\"")
}

fn ctx_json(c: &Contexts, out: &mut String) {
    let pairs = |entries: &[(Name, Ty)], out: &mut String| {
        out.push('[');
        for (i, (n, t)) in entries.iter().enumerate() {
            if i > 0 {
                out.push(',');
            }
            out.push_str(&format!(
                "{{\"name\":\"{}\",\"type\":\"{}\"}}",
                json_escape(&n.to_string()),
                json_escape(&crate::print::print_type(t))
            ));
        }
        out.push(']');
    };
    out.push_str("{\"psi\":");
    pairs(&c.psi, out);
    out.push_str(",\"omega\":[");
    for (i, n) in c.omega.iter().enumerate() {
        if i > 0 {
            out.push(',');
        }
        out.push_str(&format!("\"{}\"", json_escape(&n.to_string())));
    }
    out.push_str("],\"gamma\":");
    pairs(&c.gamma, out);
    out.push_str(",\"delta\":");
    pairs(&c.delta, out);
    out.push('}');
}

fn judgment_json(j: &Judgment, out: &mut String) {
    match j {
        Judgment::Proc { ctx, proc, chan, ty } => {
            out.push_str("{\"kind\":\"proc\",\"ctx\":");
            ctx_json(ctx, out);
            out.push_str(&format!(
                ",\"process\":\"{}\",\"channel\":\"{}\",\"type\":\"{}\"}}",
                json_escape(&crate::print::print_process(proc)),
                json_escape(&chan.to_string()),
                json_escape(&crate::print::print_type(ty))
            ));
        }
        Judgment::Term { ctx, term, ty, data } => {
            out.push_str("{\"kind\":\"term\",\"data\":");
            out.push_str(if *data { "true" } else { "false" });
            out.push_str(",\"ctx\":");
            ctx_json(ctx, out);
            out.push_str(&format!(
                ",\"term\":\"{}\",\"type\":\"{}\"}}",
                json_escape(&crate::print::print_term(term)),
                json_escape(&crate::print::print_type(ty))
            ));
        }
    }
}

impl Derivation {
    /// Machine-readable dump, documented in `docs/derivations.md`.
    pub fn to_json(&self) -> String {
        let mut s = String::new();
        self.write_json(&mut s);
        s
    }

    fn write_json(&self, out: &mut String) {
        out.push_str(&format!("{{\"rule\":\"{}\",\"judgment\":", self.rule));
        judgment_json(&self.judgment, out);
        if let Some(p) = &self.principal {
            out.push_str(&format!(",\"principal\":\"{}\"", json_escape(&p.to_string())));
        }
        if let Some(t) = &self.ty_arg {
            out.push_str(&format!(
                ",\"type_arg\":\"{}\"",
                json_escape(&crate::print::print_type(t))
            ));
        }
        out.push_str(",\"children\":[");
        for (i, c) in self.children.iter().enumerate() {
            if i > 0 {
                out.push(',');
            }
            c.write_json(out);
        }
        out.push_str("],\"term_children\":[");
        for (i, c) in self.term_children.iter().enumerate() {
            if i > 0 {
                out.push(',');
            }
            c.write_json(out);
        }
        out.push_str("]}");
    }
}

impl LfDerivation {
    pub fn to_json(&self) -> String {
        let mut s = String::new();
        self.write_json(&mut s);
        s
    }

    fn write_json(&self, out: &mut String) {
        out.push_str(&format!("{{\"rule\":\"{}\",\"judgment\":", self.rule));
        judgment_json(&self.judgment, out);
        if let Some(p) = &self.principal {
            out.push_str(&format!(",\"principal\":\"{}\"", json_escape(&p.to_string())));
        }
        if let Some(t) = &self.ty_arg {
            out.push_str(&format!(
                ",\"type_arg\":\"{}\"",
                json_escape(&crate::print::print_type(t))
            ));
        }
        out.push_str(",\"children\":[");
        for (i, c) in self.children.iter().enumerate() {
            if i > 0 {
                out.push(',');
            }
            c.write_json(out);
        }
        out.push_str("],\"proc_children\":[");
        for (i, c) in self.proc_children.iter().enumerate() {
            if i > 0 {
                out.push(',');
            }
            c.write_json(out);
        }
        out.push_str("]}");
    }
}
