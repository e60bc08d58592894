//! Star, complement, refinement and the union/intersection families built
//! from a selected set or point.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::collection::Collection;
use crate::error::{Error, Result};
use crate::instance::Instance;
use crate::predicate::Predicate;
use crate::set::{all_families, GroundSet, SetFamily, Subset};

/// `St(A, U)`: the union of the members of `u` that meet `a`.
pub fn star(a: Subset, u: &SetFamily) -> Subset {
    u.iter().filter(|m| m.meets(a)).fold(Subset::EMPTY, |acc, &m| acc.union(m))
}

pub fn complement_family(u: &SetFamily, ground: GroundSet) -> SetFamily {
    u.complement(ground)
}

/// Collection whose members are exactly the complements of members of `c`.
pub fn complement_collection(c: &Collection, ground: GroundSet) -> Collection {
    match c {
        Collection::Extensional(list) => {
            Collection::extensional(list.iter().map(|f| f.complement(ground)))
        }
        Collection::Intensional(p) => Collection::Intensional(Predicate::complement_view(p.clone())),
        Collection::Complemented(inner) => (**inner).clone(),
        other => Collection::Complemented(Box::new(other.clone())),
    }
}

/// `a ≺ b`: every member of `a` is contained in some member of `b`.
pub fn refines(a: &SetFamily, b: &SetFamily) -> bool {
    a.iter().all(|&x| b.iter().any(|&y| x.is_subset_of(y)))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum HullKind {
    /// Families refining some member.
    Minus,
    /// Families refined by some member.
    Plus,
}

fn hull_relation(kind: HullKind, r: &SetFamily, b: &SetFamily) -> bool {
    match kind {
        HullKind::Minus => refines(r, b),
        HullKind::Plus => refines(b, r),
    }
}

/// Membership of `r` in the refinement hull of `b`. Non-extensional bases are
/// decided by enumerating every family over the ground set, so they are
/// limited to ground sets of at most 4 elements.
pub fn hull_membership(
    kind: HullKind,
    b: &Collection,
    r: &SetFamily,
    ctx: &Instance,
) -> Result<bool> {
    if let Collection::Extensional(list) = b {
        return Ok(list.iter().any(|f| hull_relation(kind, r, f)));
    }
    if b.contains(r, ctx)? {
        return Ok(true);
    }
    let families = all_families(ctx.ground).map_err(|_| {
        Error::BudgetExceeded(format!(
            "hull over a non-extensional collection needs n <= 4, got n = {}",
            ctx.ground.size()
        ))
    })?;
    for f in families {
        if hull_relation(kind, r, &f) && b.contains(&f, ctx)? {
            return Ok(true);
        }
    }
    Ok(false)
}

/// All unions of nonempty subfamilies of `gens`.
fn union_closure(gens: impl Iterator<Item = Subset>) -> SetFamily {
    let mut acc: BTreeSet<Subset> = BTreeSet::new();
    for g in gens {
        let grown: Vec<Subset> = acc.iter().map(|s| s.union(g)).collect();
        acc.insert(g);
        acc.extend(grown);
    }
    SetFamily::new(acc)
}

/// All intersections of nonempty subfamilies of `gens`.
fn intersection_closure(gens: impl Iterator<Item = Subset>) -> SetFamily {
    let mut acc: BTreeSet<Subset> = BTreeSet::new();
    for g in gens {
        let grown: Vec<Subset> = acc.iter().map(|s| s.intersection(g)).collect();
        acc.insert(g);
        acc.extend(grown);
    }
    SetFamily::new(acc)
}

/// `{⋃V : V a nonempty finite subfamily of u, every V in V meets sel}`.
///
/// The union of the result is `star(sel, u)`.
pub fn build_v(u: &SetFamily, sel: Subset) -> SetFamily {
    union_closure(u.iter().copied().filter(|m| m.meets(sel)))
}

/// `{⋂F : F a nonempty finite subfamily of d, sel^c ∩ E^c ≠ ∅ for every E in F}`.
pub fn build_f(d: &SetFamily, sel: Subset, ground: GroundSet) -> SetFamily {
    let sel_c = ground.complement(sel);
    intersection_closure(d.iter().copied().filter(|&e| sel_c.meets(ground.complement(e))))
}

/// Point form of [`build_v`]: subfamilies whose members all contain `x`.
pub fn build_v_point(u: &SetFamily, x: usize) -> SetFamily {
    union_closure(u.iter().copied().filter(|m| m.contains(x)))
}

/// Point form of [`build_f`]: subfamilies whose members all miss `x`.
pub fn build_f_point(d: &SetFamily, x: usize) -> SetFamily {
    intersection_closure(d.iter().copied().filter(|m| !m.contains(x)))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fam<const N: usize>(lists: [&[usize]; N]) -> SetFamily {
        SetFamily::from_lists(lists.iter().map(|l| l.iter().copied()))
    }

    fn s(elems: &[usize]) -> Subset {
        Subset::from_elements(elems.iter().copied())
    }

    fn g(n: usize) -> GroundSet {
        GroundSet::new(n).unwrap()
    }

    #[test]
    fn star_examples() {
        assert_eq!(star(s(&[0]), &fam([&[0, 1], &[1, 2]])), s(&[0, 1]));
        assert_eq!(star(Subset::EMPTY, &fam([&[0, 1], &[1, 2]])), Subset::EMPTY);
        let segments = SetFamily::new((0..5).map(|k| Subset::from_elements(0..=k)));
        assert_eq!(star(s(&[2]), &segments), s(&[0, 1, 2, 3, 4]));
    }

    #[test]
    fn complement_family_examples() {
        assert_eq!(fam([&[0, 1], &[1, 2]]).complement(g(3)), fam([&[2], &[0]]));
        assert_eq!(SetFamily::empty().complement(g(3)), SetFamily::empty());
        assert_eq!(fam([&[0], &[1], &[0, 1]]).complement(g(2)), fam([&[1], &[0], &[]]));
    }

    #[test]
    fn complement_collection_examples() {
        let c = Collection::extensional([fam([&[0]])]);
        assert_eq!(complement_collection(&c, g(1)), Collection::extensional([fam([&[]])]));
        assert_eq!(
            complement_collection(&Collection::cover(), g(1)),
            Collection::Intensional(Predicate::complement_view(Predicate::Cover))
        );
    }

    #[test]
    fn refines_examples() {
        assert!(refines(&fam([&[0], &[1]]), &fam([&[0, 1]])));
        assert!(!refines(&fam([&[0, 1]]), &fam([&[0], &[1]])));
        assert!(refines(&SetFamily::empty(), &fam([&[0]])));
        assert!(refines(&SetFamily::empty(), &SetFamily::empty()));
    }

    #[test]
    fn build_v_examples() {
        assert_eq!(
            build_v(&fam([&[0, 1], &[1, 2]]), s(&[0, 1])),
            fam([&[0, 1], &[1, 2], &[0, 1, 2]])
        );
        assert_eq!(build_v(&fam([&[0], &[1]]), s(&[0])), fam([&[0]]));
        assert_eq!(build_v(&fam([&[1]]), s(&[0])), SetFamily::empty());
    }

    #[test]
    fn build_f_examples() {
        assert_eq!(build_f(&fam([&[2], &[0]]), s(&[2]), g(3)), fam([&[2], &[0], &[]]));
        assert_eq!(build_f(&fam([&[1, 2], &[0, 2]]), s(&[1, 2]), g(3)), fam([&[1, 2]]));
        // sel^c = {} meets nothing
        assert_eq!(build_f(&fam([&[0], &[1]]), s(&[0, 1]), g(2)), SetFamily::empty());
    }

    #[test]
    fn point_examples() {
        let u = fam([&[0, 1], &[1, 2]]);
        assert_eq!(build_v_point(&u, 1), fam([&[0, 1], &[1, 2], &[0, 1, 2]]));
        assert_eq!(build_v_point(&u, 0), fam([&[0, 1]]));
        assert_eq!(build_v_point(&fam([&[1]]), 0), SetFamily::empty());

        assert_eq!(build_f_point(&fam([&[2], &[0]]), 1), fam([&[2], &[0], &[]]));
        assert_eq!(build_f_point(&fam([&[1, 2], &[0, 2]]), 2), SetFamily::empty());
        assert_eq!(build_f_point(&fam([&[]]), 0), fam([&[]]));
    }
}
