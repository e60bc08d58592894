//! Collections of families: explicit lists, predicates, refinement hulls and
//! complement views.

use std::fmt;

use crate::error::Result;
use crate::instance::Instance;
use crate::predicate::Predicate;
use crate::set::SetFamily;
use crate::star::{hull_membership, HullKind};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Collection {
    /// Sorted, deduplicated list of families.
    Extensional(Vec<SetFamily>),
    Intensional(Predicate),
    /// `R-(base)` or `R+(base)`.
    Hull { kind: HullKind, base: Box<Collection> },
    /// `{F^c : F in inner}` for collections with no cheaper representation.
    Complemented(Box<Collection>),
}

impl Collection {
    pub fn extensional<I: IntoIterator<Item = SetFamily>>(families: I) -> Self {
        Collection::Extensional(normalize_families(families))
    }

    pub fn cover() -> Self {
        Collection::Intensional(Predicate::Cover)
    }

    pub fn hull(kind: HullKind, base: Collection) -> Self {
        Collection::Hull { kind, base: Box::new(base) }
    }

    pub fn contains(&self, f: &SetFamily, ctx: &Instance) -> Result<bool> {
        match self {
            Collection::Extensional(list) => Ok(list.binary_search(f).is_ok()),
            Collection::Intensional(p) => p.eval(f, ctx),
            Collection::Hull { kind, base } => hull_membership(*kind, base, f, ctx),
            Collection::Complemented(inner) => inner.contains(&f.complement(ctx.ground), ctx),
        }
    }

    pub fn is_extensional(&self) -> bool {
        matches!(self, Collection::Extensional(_))
    }

    /// True when membership can be decided without enumerating families.
    pub fn needs_enumeration(&self) -> bool {
        match self {
            Collection::Extensional(_) | Collection::Intensional(_) => false,
            Collection::Hull { base, .. } => !base.is_extensional() || base.needs_enumeration(),
            Collection::Complemented(inner) => inner.needs_enumeration(),
        }
    }
}

/// Membership of `f` in `c`, evaluated in the context of `ctx`.
pub fn collection_contains(c: &Collection, f: &SetFamily, ctx: &Instance) -> Result<bool> {
    c.contains(f, ctx)
}

pub fn normalize_families<I: IntoIterator<Item = SetFamily>>(families: I) -> Vec<SetFamily> {
    let mut v: Vec<SetFamily> = families.into_iter().collect();
    v.sort();
    v.dedup();
    v
}

impl fmt::Display for Collection {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Collection::Extensional(list) => {
                write!(f, "[")?;
                for (i, fam) in list.iter().enumerate() {
                    if i > 0 {
                        write!(f, ", ")?;
                    }
                    write!(f, "{fam}")?;
                }
                write!(f, "]")
            }
            Collection::Intensional(p) => write!(f, "{{F : {p}}}"),
            Collection::Hull { kind: HullKind::Minus, base } => write!(f, "R-({base})"),
            Collection::Hull { kind: HullKind::Plus, base } => write!(f, "R+({base})"),
            Collection::Complemented(inner) => write!(f, "({inner})^c"),
        }
    }
}
