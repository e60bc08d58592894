//! Bounded-horizon evaluation of the selection principles.
//!
//! A principle holds on an instance when for every sequence in `A^H` some
//! per-round selection produces a family in `B`. The existential part is a
//! depth-first search over rounds, memoized on `(round, family produced so
//! far)`; the universal part runs over sequences in lexicographic order of
//! family indices and may be spread over worker threads.

use std::collections::{HashMap, HashSet};
use std::fmt;
use std::str::FromStr;
use std::sync::Mutex;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::instance::{Instance, Kappa};
use crate::set::{GroundSet, SetFamily, Subset};
use crate::star::{build_f, build_f_point, build_v, build_v_point, star};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum PrincipleId {
    S1,
    Sfin,
    S1star,
    Sfinstar,
    SSstarK,
    SS1star,
    SSfinstar,
    CS1,
    CSfin,
    DS1,
    DSfin,
    SCS1,
    SCSfin,
    SDS1,
    SDSfin,
}

impl PrincipleId {
    pub const ALL: [PrincipleId; 15] = [
        PrincipleId::S1,
        PrincipleId::Sfin,
        PrincipleId::S1star,
        PrincipleId::Sfinstar,
        PrincipleId::SSstarK,
        PrincipleId::SS1star,
        PrincipleId::SSfinstar,
        PrincipleId::CS1,
        PrincipleId::CSfin,
        PrincipleId::DS1,
        PrincipleId::DSfin,
        PrincipleId::SCS1,
        PrincipleId::SCSfin,
        PrincipleId::SDS1,
        PrincipleId::SDSfin,
    ];

    pub fn as_str(self) -> &'static str {
        use PrincipleId::*;
        match self {
            S1 => "s1",
            Sfin => "sfin",
            S1star => "s1star",
            Sfinstar => "sfinstar",
            SSstarK => "ssstark",
            SS1star => "ss1star",
            SSfinstar => "ssfinstar",
            CS1 => "cs1",
            CSfin => "csfin",
            DS1 => "ds1",
            DSfin => "dsfin",
            SCS1 => "scs1",
            SCSfin => "scsfin",
            SDS1 => "sds1",
            SDSfin => "sdsfin",
        }
    }

    pub fn selector_kind(self) -> SelectorKind {
        use PrincipleId::*;
        match self {
            S1 | S1star | CS1 | DS1 => SelectorKind::Element,
            Sfin | Sfinstar | CSfin | DSfin => SelectorKind::FiniteSubfamily,
            SCS1 | SDS1 => SelectorKind::Point,
            SCSfin | SDSfin => SelectorKind::PointSet,
            SSstarK | SS1star | SSfinstar => SelectorKind::KappaMember,
        }
    }

    /// The kappa a strongly-star principle draws from; aliases fix it.
    pub fn kappa<'a>(self, inst: &'a Instance) -> std::borrow::Cow<'a, Kappa> {
        use std::borrow::Cow;
        match self {
            PrincipleId::SS1star => Cow::Owned(Kappa::Singletons),
            PrincipleId::SSfinstar => Cow::Owned(Kappa::FiniteNonempty),
            _ => Cow::Borrowed(&inst.kappa),
        }
    }

    fn allows_empty(self, inst: &Instance) -> bool {
        use PrincipleId::*;
        match self {
            Sfin | Sfinstar => inst.options.sfin_allow_empty,
            CSfin | DSfin | SCSfin | SDSfin => inst.options.fin_allow_empty,
            _ => false,
        }
    }
}

impl fmt::Display for PrincipleId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for PrincipleId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        PrincipleId::ALL.into_iter().find(|p| p.as_str() == s).ok_or_else(|| {
            let valid: Vec<_> = PrincipleId::ALL.iter().map(|p| p.as_str()).collect();
            Error::Format(format!("unknown principle `{s}`; valid ids: {}", valid.join(", ")))
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SelectorKind {
    Element,
    FiniteSubfamily,
    Point,
    PointSet,
    KappaMember,
}

/// One round's choice.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Selection {
    /// Index into the round's family (members in canonical order).
    Element(usize),
    /// Bit `i` picks member `i` of the round's family.
    FiniteSubfamily(u32),
    Point(usize),
    PointSet(Subset),
    KappaMember(Subset),
}

impl Selection {
    pub fn kind(self) -> SelectorKind {
        match self {
            Selection::Element(_) => SelectorKind::Element,
            Selection::FiniteSubfamily(_) => SelectorKind::FiniteSubfamily,
            Selection::Point(_) => SelectorKind::Point,
            Selection::PointSet(_) => SelectorKind::PointSet,
            Selection::KappaMember(_) => SelectorKind::KappaMember,
        }
    }
}

impl fmt::Display for Selection {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Selection::Element(i) => write!(f, "element #{i}"),
            Selection::FiniteSubfamily(m) => write!(f, "subfamily mask {m:#b}"),
            Selection::Point(x) => write!(f, "point {x}"),
            Selection::PointSet(s) => write!(f, "points {s}"),
            Selection::KappaMember(s) => write!(f, "kappa member {s}"),
        }
    }
}

fn mismatch(p: PrincipleId, sel: Selection) -> Error {
    Error::TypeMismatch { principle: p.to_string(), selection: sel.to_string() }
}

/// The family a single round contributes to the produced object.
pub fn contribution(
    p: PrincipleId,
    u: &SetFamily,
    sel: Selection,
    ground: GroundSet,
) -> Result<SetFamily> {
    use PrincipleId::*;
    if sel.kind() != p.selector_kind() {
        return Err(mismatch(p, sel));
    }
    let member = |i: usize| u.members().get(i).copied().ok_or_else(|| mismatch(p, sel));
    let picked = |mask: u32| -> Result<SetFamily> {
        if u.len() < 32 && mask >> u.len() != 0 {
            return Err(mismatch(p, sel));
        }
        Ok(u.subfamily(mask))
    };
    let point = |x: usize| if x < ground.size() { Ok(x) } else { Err(mismatch(p, sel)) };
    let fits = |s: Subset| if ground.contains_subset(s) { Ok(s) } else { Err(mismatch(p, sel)) };

    Ok(match (p, sel) {
        (S1, Selection::Element(i)) => SetFamily::new([member(i)?]),
        (Sfin, Selection::FiniteSubfamily(m)) => picked(m)?,
        (S1star, Selection::Element(i)) => SetFamily::new([star(member(i)?, u)]),
        (Sfinstar, Selection::FiniteSubfamily(m)) => {
            picked(m)?.iter().map(|&b| star(b, u)).collect()
        }
        (SSstarK | SS1star | SSfinstar, Selection::KappaMember(k)) => {
            SetFamily::new([star(fits(k)?, u)])
        }
        (CS1, Selection::Element(i)) => build_v(u, member(i)?),
        (CSfin, Selection::FiniteSubfamily(m)) => picked(m)?
            .iter()
            .fold(SetFamily::empty(), |acc, &ui| acc.merge(&build_v(u, ui))),
        (DS1, Selection::Element(i)) => build_f(u, member(i)?, ground),
        (DSfin, Selection::FiniteSubfamily(m)) => picked(m)?
            .iter()
            .fold(SetFamily::empty(), |acc, &di| acc.merge(&build_f(u, di, ground))),
        (SCS1, Selection::Point(x)) => build_v_point(u, point(x)?),
        (SCSfin, Selection::PointSet(s)) => fits(s)?
            .elements()
            .fold(SetFamily::empty(), |acc, x| acc.merge(&build_v_point(u, x))),
        (SDS1, Selection::Point(x)) => build_f_point(u, point(x)?),
        (SDSfin, Selection::PointSet(s)) => fits(s)?
            .elements()
            .fold(SetFamily::empty(), |acc, x| acc.merge(&build_f_point(u, x))),
        _ => return Err(mismatch(p, sel)),
    })
}

/// The object tested against `B`: the union of every round's contribution.
pub fn produced_family(
    p: PrincipleId,
    rounds: &[(SetFamily, Selection)],
    ground: GroundSet,
) -> Result<SetFamily> {
    rounds.iter().try_fold(SetFamily::empty(), |acc, (u, sel)| {
        Ok(acc.merge(&contribution(p, u, *sel, ground)?))
    })
}

/// Every selection available for `p` on family `u`, in canonical order.
pub fn selector_space(p: PrincipleId, u: &SetFamily, inst: &Instance) -> Vec<Selection> {
    let allow_empty = p.allows_empty(inst);
    match p.selector_kind() {
        SelectorKind::Element => (0..u.len()).map(Selection::Element).collect(),
        SelectorKind::FiniteSubfamily => {
            let start = if allow_empty { 0 } else { 1 };
            (start..(1u64 << u.len())).map(|m| Selection::FiniteSubfamily(m as u32)).collect()
        }
        SelectorKind::Point => inst.ground.points().map(Selection::Point).collect(),
        SelectorKind::PointSet => inst
            .ground
            .subsets()
            .filter(|s| allow_empty || !s.is_empty())
            .map(Selection::PointSet)
            .collect(),
        SelectorKind::KappaMember => p
            .kappa(inst)
            .members(inst.ground)
            .into_iter()
            .map(Selection::KappaMember)
            .collect(),
    }
}

/// Size of [`selector_space`] without building it.
fn selector_space_len(p: PrincipleId, u: &SetFamily, inst: &Instance) -> u64 {
    let allow_empty = p.allows_empty(inst) as u64;
    let n = inst.ground.size() as u32;
    match p.selector_kind() {
        SelectorKind::Element => u.len() as u64,
        SelectorKind::FiniteSubfamily => (1u64 << u.len()) - 1 + allow_empty,
        SelectorKind::Point => n as u64,
        SelectorKind::PointSet => (1u64 << n) - 1 + allow_empty,
        SelectorKind::KappaMember => match &*p.kappa(inst) {
            Kappa::Singletons => n as u64,
            Kappa::FiniteNonempty => (1u64 << n) - 1,
            Kappa::FiniteWithEmpty => 1u64 << n,
            Kappa::Extensional(list) => list.len() as u64,
        },
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WitnessStep {
    pub round: usize,
    /// Index into the instance's `collection_a`.
    pub family_id: usize,
    pub selection: Selection,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Witness {
    pub steps: Vec<WitnessStep>,
    pub produced: SetFamily,
}

impl Witness {
    pub fn sequence(&self) -> Vec<usize> {
        self.steps.iter().map(|s| s.family_id).collect()
    }

    pub fn from_selections(
        p: PrincipleId,
        inst: &Instance,
        sequence: &[usize],
        selections: &[Selection],
    ) -> Result<Witness> {
        if sequence.len() != selections.len() {
            return Err(Error::InvalidInputWitness(
                "sequence and selections differ in length".into(),
            ));
        }
        let steps: Vec<WitnessStep> = sequence
            .iter()
            .zip(selections)
            .enumerate()
            .map(|(round, (&family_id, &selection))| WitnessStep { round, family_id, selection })
            .collect();
        let rounds = rounds_of(inst, &steps)?;
        let produced = produced_family(p, &rounds, inst.ground)?;
        Ok(Witness { steps, produced })
    }

    /// Replays the selections: the stored produced family must be reproduced
    /// and must lie in the instance's `B`.
    pub fn replay(&self, p: PrincipleId, inst: &Instance) -> Result<bool> {
        if self.steps.len() != inst.horizon
            || self.steps.iter().enumerate().any(|(i, s)| s.round != i)
        {
            return Ok(false);
        }
        let rounds = match rounds_of(inst, &self.steps) {
            Ok(r) => r,
            Err(_) => return Ok(false),
        };
        let space_ok = rounds
            .iter()
            .all(|(u, sel)| selector_space(p, u, inst).contains(sel));
        if !space_ok {
            return Ok(false);
        }
        let produced = match produced_family(p, &rounds, inst.ground) {
            Ok(f) => f,
            Err(Error::TypeMismatch { .. }) => return Ok(false),
            Err(e) => return Err(e),
        };
        Ok(produced == self.produced && inst.collection_b.contains(&produced, inst)?)
    }
}

fn rounds_of(inst: &Instance, steps: &[WitnessStep]) -> Result<Vec<(SetFamily, Selection)>> {
    steps
        .iter()
        .map(|s| {
            inst.collection_a
                .get(s.family_id)
                .map(|u| (u.clone(), s.selection))
                .ok_or_else(|| {
                    Error::InvalidInputWitness(format!("no family #{} in A", s.family_id))
                })
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Holds,
    Fails,
}

impl Verdict {
    pub fn as_str(self) -> &'static str {
        match self {
            Verdict::Holds => "holds",
            Verdict::Fails => "fails",
        }
    }

    pub fn holds(self) -> bool {
        self == Verdict::Holds
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EvalResult {
    pub principle: PrincipleId,
    pub verdict: Verdict,
    /// Witness for the lexicographically first sequence, when the principle holds.
    pub witness: Option<Witness>,
    /// Lexicographically first sequence (indices into `A`) with no valid selection.
    pub counterexample: Option<Vec<usize>>,
    pub sequences_checked: u64,
    /// Families of `A` offering no selection at all (e.g. the empty family
    /// for member-selecting principles); sequences through them fail.
    pub empty_selection: Vec<usize>,
}

/// Precomputed per-family options for one principle on one instance.
pub struct Evaluator<'a> {
    principle: PrincipleId,
    inst: &'a Instance,
    options: Vec<Vec<(Selection, SetFamily)>>,
    membership: Mutex<HashMap<SetFamily, bool>>,
}

impl<'a> Evaluator<'a> {
    pub fn new(p: PrincipleId, inst: &'a Instance) -> Result<Self> {
        if inst.collection_a.is_empty() {
            return Err(Error::Format("collection_A must contain at least one family".into()));
        }
        if inst.horizon == 0 {
            return Err(Error::Format("horizon must be positive".into()));
        }
        let mut options = Vec::with_capacity(inst.collection_a.len());
        for u in &inst.collection_a {
            let len = selector_space_len(p, u, inst);
            if len > inst.budgets.max_states {
                return Err(Error::BudgetExceeded(format!(
                    "{len} selections per round for {p} exceed the state budget"
                )));
            }
            let opts = selector_space(p, u, inst)
                .into_iter()
                .map(|sel| Ok((sel, contribution(p, u, sel, inst.ground)?)))
                .collect::<Result<Vec<_>>>()?;
            options.push(opts);
        }
        Ok(Evaluator { principle: p, inst, options, membership: Mutex::new(HashMap::new()) })
    }

    pub fn sequence_count(&self) -> Result<u64> {
        let a = self.inst.collection_a.len() as u64;
        let count = a.checked_pow(self.inst.horizon as u32).filter(|&c| c <= self.inst.budgets.max_sequences);
        count.ok_or_else(|| {
            Error::BudgetExceeded(format!(
                "|A|^H = {a}^{} sequences exceed the budget of {}",
                self.inst.horizon, self.inst.budgets.max_sequences
            ))
        })
    }

    /// The `k`-th sequence in lexicographic order; round 0 is most significant.
    pub fn sequence(&self, mut k: u64) -> Vec<usize> {
        let a = self.inst.collection_a.len() as u64;
        let mut seq = vec![0; self.inst.horizon];
        for slot in seq.iter_mut().rev() {
            *slot = (k % a) as usize;
            k /= a;
        }
        seq
    }

    fn accepts(&self, f: &SetFamily) -> Result<bool> {
        if let Some(&hit) = self.membership.lock().unwrap().get(f) {
            return Ok(hit);
        }
        let hit = self.inst.collection_b.contains(f, self.inst)?;
        self.membership.lock().unwrap().insert(f.clone(), hit);
        Ok(hit)
    }

    /// Lexicographically first selection path for `seq`, if any.
    pub fn search(&self, seq: &[usize]) -> Result<Option<Vec<usize>>> {
        let mut visited: HashSet<(usize, SetFamily)> = HashSet::new();
        let mut path = Vec::with_capacity(seq.len());
        let found = self.dfs(seq, 0, SetFamily::empty(), &mut visited, &mut path)?;
        Ok(found.then_some(path))
    }

    fn dfs(
        &self,
        seq: &[usize],
        round: usize,
        acc: SetFamily,
        visited: &mut HashSet<(usize, SetFamily)>,
        path: &mut Vec<usize>,
    ) -> Result<bool> {
        if round == seq.len() {
            return self.accepts(&acc);
        }
        // a revisited state already failed: success returns immediately
        if !visited.insert((round, acc.clone())) {
            return Ok(false);
        }
        if visited.len() as u64 > self.inst.budgets.max_states {
            return Err(Error::BudgetExceeded(format!(
                "search for {} visited more than {} states",
                self.principle, self.inst.budgets.max_states
            )));
        }
        for (k, (_, contrib)) in self.options[seq[round]].iter().enumerate() {
            path.push(k);
            if self.dfs(seq, round + 1, acc.merge(contrib), visited, path)? {
                return Ok(true);
            }
            path.pop();
        }
        Ok(false)
    }

    /// Witness for one sequence, reconstructed on demand.
    pub fn witness_for(&self, seq: &[usize]) -> Result<Option<Witness>> {
        let Some(path) = self.search(seq)? else {
            return Ok(None);
        };
        let mut produced = SetFamily::empty();
        let steps = seq
            .iter()
            .zip(&path)
            .enumerate()
            .map(|(round, (&family_id, &k))| {
                let (selection, contrib) = &self.options[family_id][k];
                produced = produced.merge(contrib);
                WitnessStep { round, family_id, selection: *selection }
            })
            .collect();
        Ok(Some(Witness { steps, produced }))
    }

    pub fn run(&self) -> Result<EvalResult> {
        let count = self.sequence_count()?;
        let check = |k: u64| -> Option<Result<u64>> {
            match self.search(&self.sequence(k)) {
                Ok(Some(_)) => None,
                Ok(None) => Some(Ok(k)),
                Err(e) => Some(Err(e)),
            }
        };
        let first_failure = if count <= 16 {
            (0..count).find_map(check)
        } else {
            (0..count).into_par_iter().find_map_first(check)
        };
        let empty_selection = self
            .options
            .iter()
            .enumerate()
            .filter(|(_, o)| o.is_empty())
            .map(|(i, _)| i)
            .collect();
        let mut result = EvalResult {
            principle: self.principle,
            verdict: Verdict::Holds,
            witness: None,
            counterexample: None,
            sequences_checked: count,
            empty_selection,
        };
        match first_failure.transpose()? {
            Some(k) => {
                result.verdict = Verdict::Fails;
                result.counterexample = Some(self.sequence(k));
                result.sequences_checked = k + 1;
            }
            None => result.witness = self.witness_for(&self.sequence(0))?,
        }
        Ok(result)
    }
}

/// Evaluates principle `p` on `inst`.
pub fn evaluate(p: PrincipleId, inst: &Instance) -> Result<EvalResult> {
    Evaluator::new(p, inst)?.run()
}
