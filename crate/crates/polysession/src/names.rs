//! Channel names, term variables and type variables.
//!
//! All binders are represented by [`Name`]s: a display base plus a numeric
//! disambiguator. Source names parse with `id == 0`; freshening bumps the id.
//! Alpha-equivalence never inspects ids directly, it goes through the
//! canonicalisation pass in the AST modules.

use std::collections::HashSet;
use std::fmt;

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct Name {
    pub base: String,
    pub id: u32,
}

impl Name {
    pub fn new(base: impl Into<String>) -> Name {
        Name { base: base.into(), id: 0 }
    }

    pub fn with_id(base: impl Into<String>, id: u32) -> Name {
        Name { base: base.into(), id }
    }

    /// A variant of this name that avoids everything in `used`.
    pub fn freshen(&self, used: &HashSet<Name>) -> Name {
        let mut id = self.id.wrapping_add(1).max(1);
        loop {
            let cand = Name { base: self.base.clone(), id };
            if !used.contains(&cand) {
                return cand;
            }
            id += 1;
        }
    }
}

impl fmt::Display for Name {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.id == 0 {
            write!(f, "{}", self.base)
        } else {
            write!(f, "{}_{}", self.base, self.id)
        }
    }
}

/// Fresh-name supply threaded through encoders and the LTS.
#[derive(Debug, Default, Clone)]
pub struct NameGen {
    next: u32,
}

impl NameGen {
    pub fn new() -> NameGen {
        NameGen { next: 1 }
    }

    /// Start above every id occurring in `names` so generated names are
    /// globally fresh for the terms at hand.
    pub fn avoiding<'a>(names: impl IntoIterator<Item = &'a Name>) -> NameGen {
        let mut next = 1;
        for n in names {
            next = next.max(n.id + 1);
        }
        NameGen { next }
    }

    pub fn fresh(&mut self, base: &str) -> Name {
        let id = self.next;
        self.next += 1;
        Name { base: base.to_string(), id }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn freshen_avoids_used() {
        let x = Name::new("x");
        let mut used = HashSet::new();
        used.insert(Name::with_id("x", 1));
        used.insert(Name::with_id("x", 2));
        let y = x.freshen(&used);
        assert_eq!(y, Name::with_id("x", 3));
    }

    #[test]
    fn display_roundtrips_shape() {
        assert_eq!(Name::new("foo").to_string(), "foo");
        assert_eq!(Name::with_id("foo", 7).to_string(), "foo_7");
    }
}
