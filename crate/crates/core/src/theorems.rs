//! Theorems as data: each one is a list of arrows `from => to`, where both
//! sides are evaluated on a view of the same base instance (the instance
//! itself, its Cover specialization, a refinement hull of its `B`, or its
//! dual). The harness evaluates every arrow, records violations, and pushes
//! every witness of the source side through the arrow's witness map.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;

use crate::collection::{normalize_families, Collection};
use crate::error::{Error, Result};
use crate::instance::Instance;
use crate::principles::{Evaluator, PrincipleId, Selection, Witness};
use crate::set::{SetFamily, Subset};
use crate::star::{complement_collection, HullKind};

/// Witness round trips per arrow and instance are capped at this many sequences.
pub const MAX_ROUNDTRIP_SEQUENCES: u64 = 256;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
#[allow(non_camel_case_types)]
pub enum TheoremId {
    P2_1,
    P2_2,
    T2_4,
    P2_6,
    P2_7,
    T2_9,
    T3_2,
    T3_3,
    T3_4,
    T3_5,
    T3_6a,
    T3_6b,
    T3_6c,
    T3_6d,
    T3_7,
    T3_8,
    T3_9,
    T3_10,
    DIAG,
}

/// The view of the base instance a side is evaluated on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum View {
    Base,
    Cover,
    HullMinus,
    HullPlus,
    Dual,
}

impl View {
    pub fn as_str(self) -> &'static str {
        match self {
            View::Base => "B",
            View::Cover => "cover",
            View::HullMinus => "R-(B)",
            View::HullPlus => "R+(B)",
            View::Dual => "dual",
        }
    }

    pub fn apply(self, inst: &Instance) -> Instance {
        match self {
            View::Base => inst.clone(),
            View::Cover => inst.with_b(Collection::cover()),
            View::HullMinus => inst.with_b(Collection::hull(HullKind::Minus, inst.collection_b.clone())),
            View::HullPlus => inst.with_b(Collection::hull(HullKind::Plus, inst.collection_b.clone())),
            View::Dual => dualize(inst),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WitnessMap {
    /// The same selection in every round.
    Same,
    /// Members and subfamilies follow complementation; points stay.
    Complement,
    KappaToPoint,
    PointToKappa,
    KappaToPointSet,
    PointSetToKappa,
    /// A member `B` becomes the singleton of its least point.
    ElementToKappa,
    /// A singleton `{x}` becomes the first member containing `x`.
    KappaToElement,
    /// Least points of the chosen nonempty members.
    SubfamilyToKappa,
    /// For each point, the first member containing it.
    KappaToSubfamily,
    ElementToSubfamily,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Arrow {
    pub from: PrincipleId,
    pub from_view: View,
    pub to: PrincipleId,
    pub to_view: View,
    pub map: WitnessMap,
    /// Only instances whose families in `A` are all nonempty qualify.
    pub nonempty_families: bool,
}

impl Arrow {
    const fn new(from: PrincipleId, from_view: View, to: PrincipleId, to_view: View, map: WitnessMap) -> Self {
        Arrow { from, from_view, to, to_view, map, nonempty_families: false }
    }

    const fn on_nonempty(mut self) -> Self {
        self.nonempty_families = true;
        self
    }

    pub fn applies_to(&self, inst: &Instance) -> bool {
        !self.nonempty_families || inst.collection_a.iter().all(|f| !f.is_empty())
    }
}

impl fmt::Display for Arrow {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} on {} => {} on {}",
            self.from,
            self.from_view.as_str(),
            self.to,
            self.to_view.as_str()
        )
    }
}

impl TheoremId {
    pub const ALL: [TheoremId; 19] = [
        TheoremId::P2_1,
        TheoremId::P2_2,
        TheoremId::T2_4,
        TheoremId::P2_6,
        TheoremId::P2_7,
        TheoremId::T2_9,
        TheoremId::T3_2,
        TheoremId::T3_3,
        TheoremId::T3_4,
        TheoremId::T3_5,
        TheoremId::T3_6a,
        TheoremId::T3_6b,
        TheoremId::T3_6c,
        TheoremId::T3_6d,
        TheoremId::T3_7,
        TheoremId::T3_8,
        TheoremId::T3_9,
        TheoremId::T3_10,
        TheoremId::DIAG,
    ];

    pub fn as_str(self) -> &'static str {
        use TheoremId::*;
        match self {
            P2_1 => "p2_1",
            P2_2 => "p2_2",
            T2_4 => "t2_4",
            P2_6 => "p2_6",
            P2_7 => "p2_7",
            T2_9 => "t2_9",
            T3_2 => "t3_2",
            T3_3 => "t3_3",
            T3_4 => "t3_4",
            T3_5 => "t3_5",
            T3_6a => "t3_6a",
            T3_6b => "t3_6b",
            T3_6c => "t3_6c",
            T3_6d => "t3_6d",
            T3_7 => "t3_7",
            T3_8 => "t3_8",
            T3_9 => "t3_9",
            T3_10 => "t3_10",
            DIAG => "diag",
        }
    }

    pub fn arrows(self) -> Vec<Arrow> {
        use PrincipleId as P;
        use TheoremId::*;
        use View::*;
        use WitnessMap as M;
        let dual = |a: PrincipleId, b: PrincipleId| {
            vec![
                Arrow::new(a, Base, b, Dual, M::Complement),
                Arrow::new(b, Dual, a, Base, M::Complement),
            ]
        };
        match self {
            P2_1 => vec![Arrow::new(P::CS1, Cover, P::S1star, Cover, M::Same)],
            P2_2 => vec![Arrow::new(P::S1star, Cover, P::CS1, Cover, M::Same)],
            T2_4 => [P2_1.arrows(), P2_2.arrows()].concat(),
            P2_6 => vec![Arrow::new(P::CSfin, Cover, P::Sfinstar, Cover, M::Same)],
            P2_7 => vec![Arrow::new(P::Sfinstar, Cover, P::CSfin, Cover, M::Same)],
            T2_9 => [P2_6.arrows(), P2_7.arrows()].concat(),
            T3_2 => vec![Arrow::new(P::S1star, Base, P::CS1, HullMinus, M::Same)],
            T3_3 => vec![Arrow::new(P::CS1, Base, P::S1star, HullPlus, M::Same)],
            T3_4 => vec![Arrow::new(P::Sfinstar, Base, P::CSfin, HullMinus, M::Same)],
            T3_5 => vec![Arrow::new(P::CSfin, Base, P::Sfinstar, HullPlus, M::Same)],
            T3_6a => vec![Arrow::new(P::SS1star, Base, P::SCS1, HullMinus, M::KappaToPoint)],
            T3_6b => vec![Arrow::new(P::SCS1, Base, P::SS1star, HullPlus, M::PointToKappa)],
            T3_6c => vec![Arrow::new(P::SSfinstar, Base, P::SCSfin, HullMinus, M::KappaToPointSet)],
            T3_6d => vec![Arrow::new(P::SCSfin, Base, P::SSfinstar, HullPlus, M::PointSetToKappa)],
            T3_7 => dual(P::CS1, P::DS1),
            T3_8 => dual(P::SCS1, P::SDS1),
            T3_9 => dual(P::CSfin, P::DSfin),
            T3_10 => dual(P::SCSfin, P::SDSfin),
            DIAG => vec![
                Arrow::new(P::S1, Cover, P::SS1star, Cover, M::ElementToKappa),
                Arrow::new(P::SS1star, Cover, P::S1star, Cover, M::KappaToElement).on_nonempty(),
                Arrow::new(P::Sfin, Cover, P::SSfinstar, Cover, M::SubfamilyToKappa),
                Arrow::new(P::SSfinstar, Cover, P::Sfinstar, Cover, M::KappaToSubfamily)
                    .on_nonempty(),
                Arrow::new(P::S1, Cover, P::Sfin, Cover, M::ElementToSubfamily),
                Arrow::new(P::SS1star, Cover, P::SSfinstar, Cover, M::Same),
                Arrow::new(P::S1star, Cover, P::Sfinstar, Cover, M::ElementToSubfamily),
            ],
        }
    }

    /// Pairs of `S*_fin` with `CS_fin` compare like with like: both sides
    /// share one convention on empty selections.
    fn aligns_empty_selections(self) -> bool {
        use TheoremId::*;
        matches!(self, P2_6 | P2_7 | T2_9 | T3_4 | T3_5)
    }

    /// The base instance the arrows are evaluated on.
    pub fn prepare(self, inst: &Instance) -> Instance {
        let mut out = inst.clone();
        if self.aligns_empty_selections() {
            out.options.sfin_allow_empty = out.options.fin_allow_empty;
        }
        out
    }
}

impl fmt::Display for TheoremId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for TheoremId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let lower = s.to_ascii_lowercase();
        TheoremId::ALL.into_iter().find(|t| t.as_str() == lower).ok_or_else(|| {
            let valid: Vec<_> = TheoremId::ALL.iter().map(|t| t.as_str()).collect();
            Error::Format(format!("unknown theorem `{s}`; valid ids: {}", valid.join(", ")))
        })
    }
}

/// Complements every family of `A` and passes `B` to its complement
/// collection. Named families and collections are left as they are.
pub fn dualize(inst: &Instance) -> Instance {
    let g = inst.ground;
    Instance {
        collection_a: normalize_families(inst.collection_a.iter().map(|f| f.complement(g))),
        collection_b: complement_collection(&inst.collection_b, g),
        ..inst.clone()
    }
}

/// Maps a witness along the first arrow of `t`.
pub fn map_witness(t: TheoremId, inst: &Instance, w: &Witness) -> Result<Witness> {
    map_witness_along(t, 0, inst, w)
}

/// Maps a witness for the source side of arrow `arrow` of `t` on `inst` to
/// a witness for its target side, and replays the result.
pub fn map_witness_along(t: TheoremId, arrow: usize, inst: &Instance, w: &Witness) -> Result<Witness> {
    let arrows = t.arrows();
    let a = arrows.get(arrow).ok_or_else(|| {
        Error::Format(format!("{t} has {} arrows, no arrow #{arrow}", arrows.len()))
    })?;
    let base = t.prepare(inst);
    let source = a.from_view.apply(&base);
    let target = a.to_view.apply(&base);
    map_between(a, &source, &target, w)
}

fn map_between(a: &Arrow, source: &Instance, target: &Instance, w: &Witness) -> Result<Witness> {
    if !w.replay(a.from, source)? {
        return Err(Error::InvalidInputWitness(format!("witness does not replay for {}", a.from)));
    }
    if !a.applies_to(source) {
        return Err(Error::InvalidInputWitness(format!("{a} needs nonempty families")));
    }
    let mut sequence = Vec::with_capacity(w.steps.len());
    let mut selections = Vec::with_capacity(w.steps.len());
    for step in &w.steps {
        let u = &source.collection_a[step.family_id];
        let (id, v) = if a.map == WitnessMap::Complement {
            let c = u.complement(source.ground);
            let id = target.collection_a.binary_search(&c).map_err(|_| {
                Error::MappedWitnessRejected(format!("no family {c} in the dual collection"))
            })?;
            (id, &target.collection_a[id])
        } else {
            (step.family_id, u)
        };
        sequence.push(id);
        selections.push(map_selection(a, u, v, step.selection, target)?);
    }
    let mapped = Witness::from_selections(a.to, target, &sequence, &selections)
        .map_err(|e| Error::MappedWitnessRejected(e.to_string()))?;
    if !mapped.replay(a.to, target)? {
        return Err(Error::MappedWitnessRejected(format!(
            "mapped witness for {} does not replay: {:?}",
            a.to, selections
        )));
    }
    Ok(mapped)
}

fn bad_input(a: &Arrow, sel: Selection) -> Error {
    Error::InvalidInputWitness(format!("{sel} is not a selection for {}", a.from))
}

fn first_containing(u: &SetFamily, x: usize) -> Option<usize> {
    u.iter().position(|m| m.contains(x))
}

fn map_selection(
    a: &Arrow,
    u: &SetFamily,
    v: &SetFamily,
    sel: Selection,
    target: &Instance,
) -> Result<Selection> {
    use Selection as S;
    use WitnessMap as M;
    let g = target.ground;
    let member = |i: usize| u.members().get(i).copied().ok_or_else(|| bad_input(a, sel));
    let singleton = |s: Subset| match (s.len(), s.min()) {
        (1, Some(x)) => Ok(x),
        _ => Err(bad_input(a, sel)),
    };
    Ok(match (a.map, sel) {
        (M::Same, s) => s,
        (M::Complement, S::Element(i)) => {
            let c = g.complement(member(i)?);
            S::Element(v.index_of(c).ok_or_else(|| bad_input(a, sel))?)
        }
        (M::Complement, S::FiniteSubfamily(m)) => {
            let mut out = 0u32;
            for s in u.subfamily(m).iter() {
                out |= 1 << v.index_of(g.complement(*s)).ok_or_else(|| bad_input(a, sel))?;
            }
            S::FiniteSubfamily(out)
        }
        (M::Complement, s @ (S::Point(_) | S::PointSet(_))) => s,
        (M::KappaToPoint, S::KappaMember(s)) => S::Point(singleton(s)?),
        (M::PointToKappa, S::Point(x)) => S::KappaMember(Subset::singleton(x)),
        (M::KappaToPointSet, S::KappaMember(k)) => S::PointSet(k),
        (M::PointSetToKappa, S::PointSet(k)) => {
            S::KappaMember(if k.is_empty() { Subset::singleton(0) } else { k })
        }
        (M::ElementToKappa, S::Element(i)) => {
            S::KappaMember(Subset::singleton(member(i)?.min().unwrap_or(0)))
        }
        (M::KappaToElement, S::KappaMember(s)) => {
            let x = singleton(s)?;
            S::Element(first_containing(u, x).unwrap_or(0))
        }
        (M::SubfamilyToKappa, S::FiniteSubfamily(m)) => {
            let k = u.subfamily(m).iter().filter_map(|b| Subset::min(*b)).map(Subset::singleton).fold(
                Subset::EMPTY,
                Subset::union,
            );
            S::KappaMember(if k.is_empty() { Subset::singleton(0) } else { k })
        }
        (M::KappaToSubfamily, S::KappaMember(k)) => {
            let mut mask = k.elements().filter_map(|x| first_containing(u, x)).fold(0u32, |m, i| m | 1 << i);
            if mask == 0 && !target.options.sfin_allow_empty && !u.is_empty() {
                mask = 1;
            }
            S::FiniteSubfamily(mask)
        }
        (M::ElementToSubfamily, S::Element(i)) => {
            member(i)?;
            S::FiniteSubfamily(1 << i)
        }
        _ => return Err(bad_input(a, sel)),
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ViolationKind {
    /// The source side holds and the target side fails.
    Implication { counterexample: Option<Vec<usize>> },
    /// A mapped witness failed its replay.
    WitnessRejected { sequence: Vec<usize>, message: String },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Violation {
    /// Position of the instance in the corpus.
    pub instance: usize,
    pub arrow: Arrow,
    pub kind: ViolationKind,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TheoremReport {
    pub theorem: TheoremId,
    pub instances_checked: usize,
    pub violations: Vec<Violation>,
    pub witness_roundtrips: usize,
    pub rejected_witnesses: usize,
    pub skipped_budget: usize,
    /// Arrow checks skipped because the instance failed the arrow's hypothesis.
    pub not_applicable: usize,
}

impl TheoremReport {
    pub fn new(theorem: TheoremId) -> Self {
        TheoremReport {
            theorem,
            instances_checked: 0,
            violations: Vec::new(),
            witness_roundtrips: 0,
            rejected_witnesses: 0,
            skipped_budget: 0,
            not_applicable: 0,
        }
    }

    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }

    /// Appends `other`, whose instances come after this report's.
    pub fn merge(mut self, other: TheoremReport) -> TheoremReport {
        self.instances_checked += other.instances_checked;
        self.violations.extend(other.violations);
        self.witness_roundtrips += other.witness_roundtrips;
        self.rejected_witnesses += other.rejected_witnesses;
        self.skipped_budget += other.skipped_budget;
        self.not_applicable += other.not_applicable;
        self
    }
}

/// Lazily built views of one base instance.
struct Views {
    base: Instance,
    built: Vec<(View, Instance)>,
}

impl Views {
    fn get(&mut self, v: View) -> &Instance {
        if let Some(pos) = self.built.iter().position(|(k, _)| *k == v) {
            return &self.built[pos].1;
        }
        let inst = v.apply(&self.base);
        self.built.push((v, inst));
        &self.built.last().unwrap().1
    }
}

fn check_instance(t: TheoremId, index: usize, inst: &Instance) -> Result<TheoremReport> {
    let mut report = TheoremReport::new(t);
    let base = t.prepare(inst);
    let mut views = Views { base, built: Vec::new() };
    for v in [View::Base, View::Cover, View::HullMinus, View::HullPlus, View::Dual] {
        if t.arrows().iter().any(|a| a.from_view == v || a.to_view == v) {
            views.get(v);
        }
    }
    let lookup = |v: View| -> &Instance { &views.built.iter().find(|(k, _)| *k == v).unwrap().1 };
    for arrow in t.arrows() {
        let source = lookup(arrow.from_view);
        let target = lookup(arrow.to_view);
        if !arrow.applies_to(source) {
            report.not_applicable += 1;
            continue;
        }
        let from = Evaluator::new(arrow.from, source)?;
        let from_result = from.run()?;
        if !from_result.verdict.holds() {
            continue;
        }
        let to_result = Evaluator::new(arrow.to, target)?.run()?;
        if !to_result.verdict.holds() {
            report.violations.push(Violation {
                instance: index,
                arrow,
                kind: ViolationKind::Implication { counterexample: to_result.counterexample },
            });
        }
        let count = from.sequence_count()?.min(MAX_ROUNDTRIP_SEQUENCES);
        for k in 0..count {
            let seq = from.sequence(k);
            let Some(w) = from.witness_for(&seq)? else {
                continue;
            };
            match map_between(&arrow, source, target, &w) {
                Ok(_) => report.witness_roundtrips += 1,
                Err(Error::MappedWitnessRejected(message)) => {
                    report.rejected_witnesses += 1;
                    report.violations.push(Violation {
                        instance: index,
                        arrow,
                        kind: ViolationKind::WitnessRejected { sequence: seq, message },
                    });
                }
                Err(e) => return Err(e),
            }
        }
    }
    report.instances_checked = 1;
    Ok(report)
}

/// Runs theorem `t` over `corpus`. Instances are checked in parallel and the
/// per-instance reports are merged in corpus order; instances that exceed a
/// budget are counted in `skipped_budget`.
pub fn check_theorem<I>(t: TheoremId, corpus: I) -> Result<TheoremReport>
where
    I: IntoIterator<Item = Instance>,
{
    let corpus: Vec<Instance> = corpus.into_iter().collect();
    let parts: Vec<Result<TheoremReport>> = corpus
        .par_iter()
        .enumerate()
        .map(|(i, inst)| match check_instance(t, i, inst) {
            Err(Error::BudgetExceeded(_)) => {
                let mut r = TheoremReport::new(t);
                r.skipped_budget = 1;
                Ok(r)
            }
            other => other,
        })
        .collect();
    parts.into_iter().try_fold(TheoremReport::new(t), |acc, part| Ok(acc.merge(part?)))
}
