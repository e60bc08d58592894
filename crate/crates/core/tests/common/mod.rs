//! Reference implementations written directly from the definitions, over
//! plain ordered sets. Slow on purpose: every finite subfamily and every
//! combination of per-round choices is enumerated.

#![allow(dead_code)]

use std::collections::BTreeSet;

use itertools::Itertools;
use starsel::{Collection, Instance, Kappa, Predicate, PrincipleId, SetFamily, Subset};

pub type Set = BTreeSet<usize>;
pub type Fam = BTreeSet<Set>;

pub fn set_of(s: Subset) -> Set {
    s.elements().collect()
}

pub fn fam_of(f: &SetFamily) -> Fam {
    f.iter().map(|&s| set_of(s)).collect()
}

pub fn ground(n: usize) -> Set {
    (0..n).collect()
}

pub fn complement_set(s: &Set, n: usize) -> Set {
    ground(n).difference(s).copied().collect()
}

pub fn complement_fam(f: &Fam, n: usize) -> Fam {
    f.iter().map(|s| complement_set(s, n)).collect()
}

pub fn star(a: &Set, u: &Fam) -> Set {
    let mut out = Set::new();
    for m in u {
        if !m.is_disjoint(a) {
            out.extend(m.iter().copied());
        }
    }
    out
}

/// Every nonempty subfamily of `members`.
fn nonempty_subfamilies(members: &[Set]) -> Vec<Vec<Set>> {
    members.iter().cloned().powerset().filter(|v| !v.is_empty()).collect()
}

fn unions(members: Vec<Set>) -> Fam {
    nonempty_subfamilies(&members)
        .into_iter()
        .map(|v| v.into_iter().flatten().collect())
        .collect()
}

fn intersections(members: Vec<Set>, n: usize) -> Fam {
    nonempty_subfamilies(&members)
        .into_iter()
        .map(|v| v.iter().fold(ground(n), |acc, s| acc.intersection(s).copied().collect()))
        .collect()
}

pub fn build_v(u: &Fam, sel: &Set) -> Fam {
    unions(u.iter().filter(|m| !m.is_disjoint(sel)).cloned().collect())
}

pub fn build_f(d: &Fam, sel: &Set, n: usize) -> Fam {
    let sel_c = complement_set(sel, n);
    intersections(
        d.iter().filter(|e| !sel_c.is_disjoint(&complement_set(e, n))).cloned().collect(),
        n,
    )
}

pub fn build_v_point(u: &Fam, x: usize) -> Fam {
    unions(u.iter().filter(|m| m.contains(&x)).cloned().collect())
}

pub fn build_f_point(d: &Fam, x: usize, n: usize) -> Fam {
    intersections(d.iter().filter(|m| !m.contains(&x)).cloned().collect(), n)
}

fn all_sets(n: usize) -> Vec<Set> {
    (0..n).powerset().map(|v| v.into_iter().collect()).collect()
}

fn union_over<F: Fn(&Set) -> Fam>(parts: &[Set], f: F) -> Fam {
    parts.iter().flat_map(|p| f(p)).collect()
}

fn kappa_sets(p: PrincipleId, inst: &Instance) -> Vec<Set> {
    let n = inst.ground.size();
    let kappa = match p {
        PrincipleId::SS1star => Kappa::Singletons,
        PrincipleId::SSfinstar => Kappa::FiniteNonempty,
        _ => inst.kappa.clone(),
    };
    match kappa {
        Kappa::Singletons => (0..n).map(|x| Set::from([x])).collect(),
        Kappa::FiniteNonempty => all_sets(n).into_iter().filter(|s| !s.is_empty()).collect(),
        Kappa::FiniteWithEmpty => all_sets(n),
        Kappa::Extensional(list) => list.iter().map(|&s| set_of(s)).collect(),
    }
}

/// Every family one round of `p` on `u` can contribute.
pub fn contributions(p: PrincipleId, u: &Fam, inst: &Instance) -> Vec<Fam> {
    use PrincipleId::*;
    let n = inst.ground.size();
    let members: Vec<Set> = u.iter().cloned().collect();
    let subfamilies = |allow_empty: bool| -> Vec<Vec<Set>> {
        members.iter().cloned().powerset().filter(|v| allow_empty || !v.is_empty()).collect()
    };
    let point_sets = |allow_empty: bool| -> Vec<Set> {
        all_sets(n).into_iter().filter(|s| allow_empty || !s.is_empty()).collect()
    };
    let sfin_empty = inst.options.sfin_allow_empty;
    let fin_empty = inst.options.fin_allow_empty;
    match p {
        S1 => members.iter().map(|m| Fam::from([m.clone()])).collect(),
        Sfin => subfamilies(sfin_empty).into_iter().map(|v| v.into_iter().collect()).collect(),
        S1star => members.iter().map(|m| Fam::from([star(m, u)])).collect(),
        Sfinstar => subfamilies(sfin_empty)
            .into_iter()
            .map(|v| v.iter().map(|m| star(m, u)).collect())
            .collect(),
        SSstarK | SS1star | SSfinstar => {
            kappa_sets(p, inst).iter().map(|k| Fam::from([star(k, u)])).collect()
        }
        CS1 => members.iter().map(|m| build_v(u, m)).collect(),
        CSfin => subfamilies(fin_empty).into_iter().map(|v| union_over(&v, |m| build_v(u, m))).collect(),
        DS1 => members.iter().map(|m| build_f(u, m, n)).collect(),
        DSfin => subfamilies(fin_empty)
            .into_iter()
            .map(|v| union_over(&v, |m| build_f(u, m, n)))
            .collect(),
        SCS1 => (0..n).map(|x| build_v_point(u, x)).collect(),
        SCSfin => point_sets(fin_empty)
            .into_iter()
            .map(|k| k.iter().flat_map(|&x| build_v_point(u, x)).collect())
            .collect(),
        SDS1 => (0..n).map(|x| build_f_point(u, x, n)).collect(),
        SDSfin => point_sets(fin_empty)
            .into_iter()
            .map(|k| k.iter().flat_map(|&x| build_f_point(u, x, n)).collect())
            .collect(),
    }
}

/// Membership for explicit collections and the cover predicate.
pub fn in_b(f: &Fam, inst: &Instance) -> bool {
    match &inst.collection_b {
        Collection::Extensional(list) => list.iter().any(|b| fam_of(b) == *f),
        Collection::Intensional(Predicate::Cover) => {
            f.iter().flatten().copied().collect::<Set>() == ground(inst.ground.size())
        }
        other => panic!("oracle does not decide {other}"),
    }
}

/// Whether some choice of per-round selections on `seq` lands in `B`.
pub fn sequence_succeeds(p: PrincipleId, inst: &Instance, seq: &[usize]) -> bool {
    let per_round: Vec<Vec<Fam>> = seq
        .iter()
        .map(|&i| contributions(p, &fam_of(&inst.collection_a[i]), inst))
        .collect();
    per_round
        .into_iter()
        .multi_cartesian_product()
        .any(|choice| in_b(&choice.into_iter().flatten().collect(), inst))
}

pub fn holds(p: PrincipleId, inst: &Instance) -> bool {
    first_failure(p, inst).is_none()
}

/// Lexicographically first sequence with no successful selection.
pub fn first_failure(p: PrincipleId, inst: &Instance) -> Option<Vec<usize>> {
    (0..inst.horizon)
        .map(|_| 0..inst.collection_a.len())
        .multi_cartesian_product()
        .find(|seq| !sequence_succeeds(p, inst, seq))
}
