//! Instance corpora and the separation finder.
//!
//! Exhaustive corpora run over tiny ground sets in a fixed canonical order.
//! Random corpora are drawn from a ChaCha stream seeded by the budget:
//!
//! 1. `n` uniform in `1..=max_n`, `H` uniform in `1..=max_horizon`;
//! 2. `|A|` uniform in `1..=max_a_size`; each family draws a size uniform in
//!    `1..=max_family_size` and that many members uniform over all subsets
//!    (duplicates collapse);
//! 3. `B` according to the mode. An extensional `B` has size uniform in
//!    `0..=max_b_size`; each of its families is, with probability 1/2, the
//!    family produced by a random principle under random selections on a
//!    random sequence from `A`, and otherwise a uniform random family.

use std::path::{Path, PathBuf};

use itertools::Itertools;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::collection::Collection;
use crate::error::{Error, Result};
use crate::instance::{instance_to_json, load_instance, Instance};
use crate::predicate::Predicate;
use crate::principles::{
    evaluate, produced_family, selector_space, EvalResult, Evaluator, PrincipleId, Verdict,
};
use crate::report::{to_json, EvalDoc, VerdictSidecar};
use crate::set::{all_families, GroundSet, SetFamily, Subset};

/// Ground sets larger than this cannot be enumerated exhaustively.
pub const MAX_EXHAUSTIVE_N: usize = 3;

/// How `B` is chosen for generated instances.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BMode {
    Extensional,
    Cover,
    PredicatePool,
    /// Extensional and pool predicates, alternately in enumeration and by
    /// coin flip in random draws.
    Mixed,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Budget {
    pub max_n: usize,
    pub max_family_size: usize,
    pub max_a_size: usize,
    /// Largest extensional `B`.
    pub max_b_size: usize,
    pub max_horizon: usize,
    pub max_instances: usize,
    pub seed: u64,
    pub b_mode: BMode,
}

impl Budget {
    pub fn new(seed: u64) -> Self {
        Budget {
            max_n: 16,
            max_family_size: 16,
            max_a_size: 4,
            max_b_size: 4,
            max_horizon: 4,
            max_instances: 10_000,
            seed,
            b_mode: BMode::Extensional,
        }
    }

    fn check(&self) -> Result<()> {
        let fields = [
            ("max_n", self.max_n),
            ("max_family_size", self.max_family_size),
            ("max_a_size", self.max_a_size),
            ("max_horizon", self.max_horizon),
            ("max_instances", self.max_instances),
        ];
        for (name, v) in fields {
            if v == 0 {
                return Err(Error::Format(format!("budget field {name} must be positive")));
            }
        }
        GroundSet::new(self.max_n)?;
        Ok(())
    }
}

/// `n` initial segments `{0}, {0,1}, .., {0,..,n-1}` as the single family
/// of `A`, exported under the name `U`.
pub fn initial_segments_instance(n: usize, b_spec: Collection) -> Result<Instance> {
    let ground = GroundSet::new(n)?;
    let u = initial_segments(n);
    Ok(Instance::new(ground, vec![u.clone()], b_spec, 1).with_family("U", u))
}

pub fn initial_segments(n: usize) -> SetFamily {
    SetFamily::new((0..n).map(|k| Subset::from_elements(0..=k)))
}

/// The fixed pool of predicates drawn from in predicate modes.
pub fn predicate_pool(ground: GroundSet) -> Vec<Predicate> {
    use Predicate::*;
    let n = ground.size();
    let half = n.div_ceil(2);
    vec![
        Cover,
        True,
        NonEmptyMembers,
        MaxSize(half),
        MinSize(1),
        CardLe(2),
        Predicate::and(Cover, MaxSize(half)),
        Predicate::and(Cover, CardLe(2)),
        Predicate::or(Cover, Contains(Subset::singleton(0))),
        Predicate::not(Cover),
        Predicate::complement_view(Cover),
        Predicate::and(NonEmptyMembers, Predicate::not(Contains(ground.full()))),
    ]
}

fn b_choices(ground: GroundSet, b: &Budget, families: &[SetFamily]) -> Vec<Collection> {
    let extensional = || {
        (0..=b.max_b_size.min(families.len()))
            .flat_map(|k| families.iter().cloned().combinations(k))
            .map(Collection::extensional)
    };
    let pool = || predicate_pool(ground).into_iter().map(Collection::Intensional);
    match b.b_mode {
        BMode::Extensional => extensional().collect(),
        BMode::Cover => vec![Collection::cover()],
        BMode::PredicatePool => pool().collect(),
        BMode::Mixed => extensional().chain(pool()).collect(),
    }
}

/// Every instance within `b` with `n <= 3`, in canonical order: by `n`, then
/// horizon, then `A` (by size, then lexicographically in family mask order),
/// then `B` (same order for extensional `B`, pool order for predicates).
/// At most `max_instances` are produced.
pub fn enumerate_instances(b: &Budget) -> Result<impl Iterator<Item = Instance>> {
    b.check()?;
    if b.max_n > MAX_EXHAUSTIVE_N {
        return Err(Error::BudgetExceeded(format!(
            "exhaustive enumeration needs max_n <= {MAX_EXHAUSTIVE_N}, got {}",
            b.max_n
        )));
    }
    let b = *b;
    let per_n = move |n: usize| {
        let ground = GroundSet::new(n).expect("n within bounds");
        let families: Vec<SetFamily> = all_families(ground)
            .expect("n <= 3")
            .filter(|f| f.len() <= b.max_family_size)
            .collect();
        let bs = b_choices(ground, &b, &families);
        (1..=b.max_horizon).flat_map(move |h| {
            let families = families.clone();
            let bs = bs.clone();
            (1..=b.max_a_size.min(families.len())).flat_map(move |k| {
                let bs = bs.clone();
                families.clone().into_iter().combinations(k).flat_map(move |a| {
                    bs.clone().into_iter().map(move |coll| Instance::new(ground, a.clone(), coll, h))
                })
            })
        })
    };
    Ok((1..=b.max_n).flat_map(per_n).take(b.max_instances))
}

fn random_family(rng: &mut ChaCha8Rng, ground: GroundSet, max_size: usize, min_size: usize) -> SetFamily {
    let size = rng.gen_range(min_size..=max_size);
    let count = ground.subset_count() as u32;
    SetFamily::new((0..size).map(|_| Subset::from_bits(rng.gen_range(0..count) as u16)))
}

/// The family produced by a random principle under uniformly random
/// selections on a uniformly random sequence from `A`.
fn planted_family(rng: &mut ChaCha8Rng, inst: &Instance) -> Option<SetFamily> {
    let p = *PrincipleId::ALL.choose(rng)?;
    let mut rounds = Vec::with_capacity(inst.horizon);
    for _ in 0..inst.horizon {
        let u = inst.collection_a.choose(rng)?;
        let space = selector_space(p, u, inst);
        let sel = *space.choose(rng)?;
        rounds.push((u.clone(), sel));
    }
    produced_family(p, &rounds, inst.ground).ok()
}

fn random_with(rng: &mut ChaCha8Rng, b: &Budget) -> Instance {
    let n = rng.gen_range(1..=b.max_n);
    let ground = GroundSet::new(n).expect("n within bounds");
    let horizon = rng.gen_range(1..=b.max_horizon);
    let a_size = rng.gen_range(1..=b.max_a_size);
    let a: Vec<SetFamily> =
        (0..a_size).map(|_| random_family(rng, ground, b.max_family_size, 1)).collect();
    let mut inst = Instance::new(ground, a, Collection::cover(), horizon);
    let extensional = match b.b_mode {
        BMode::Extensional => true,
        BMode::Cover => return inst,
        BMode::PredicatePool => false,
        BMode::Mixed => rng.gen_bool(0.5),
    };
    inst.collection_b = if extensional {
        let size = rng.gen_range(0..=b.max_b_size);
        let mut families = Vec::with_capacity(size);
        for _ in 0..size {
            let planted = if rng.gen_bool(0.5) { planted_family(rng, &inst) } else { None };
            families.push(planted.unwrap_or_else(|| random_family(rng, ground, b.max_family_size, 0)));
        }
        Collection::extensional(families)
    } else {
        let pool = predicate_pool(ground);
        Collection::Intensional(pool[rng.gen_range(0..pool.len())].clone())
    };
    inst
}

/// One instance drawn with the budget's seed.
pub fn random_instance(b: &Budget) -> Result<Instance> {
    Ok(random_instances(b, 1)?.remove(0))
}

/// `count` instances from the stream seeded by `b.seed`.
pub fn random_instances(b: &Budget, count: usize) -> Result<Vec<Instance>> {
    b.check()?;
    let mut rng = ChaCha8Rng::seed_from_u64(b.seed);
    Ok((0..count).map(|_| random_with(&mut rng, b)).collect())
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SeparationResult {
    pub left: PrincipleId,
    pub right: PrincipleId,
    pub instance: Instance,
    pub left_result: EvalResult,
    pub right_result: EvalResult,
}

impl SeparationResult {
    /// Re-evaluates both sides and checks the stored verdicts, the left
    /// witness and the right counterexample.
    pub fn verify(&self) -> Result<bool> {
        let left = evaluate(self.left, &self.instance)?;
        let right = evaluate(self.right, &self.instance)?;
        if left != self.left_result || right != self.right_result {
            return Ok(false);
        }
        let witness_ok = match &left.witness {
            Some(w) => w.replay(self.left, &self.instance)?,
            None => false,
        };
        let counterexample_ok = match &right.counterexample {
            Some(seq) => Evaluator::new(self.right, &self.instance)?.search(seq)?.is_none(),
            None => false,
        };
        Ok(left.verdict == Verdict::Holds
            && right.verdict == Verdict::Fails
            && witness_ok
            && counterexample_ok)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SearchOutcome {
    Found(Box<SeparationResult>),
    NotFoundWithinBudget { examined: usize },
}

fn separates(left: PrincipleId, right: PrincipleId, inst: &Instance) -> Option<SeparationResult> {
    // candidates over an evaluation budget are skipped
    let l = evaluate(left, inst).ok()?;
    if !l.verdict.holds() {
        return None;
    }
    let r = evaluate(right, inst).ok()?;
    if r.verdict.holds() {
        return None;
    }
    Some(SeparationResult { left, right, instance: inst.clone(), left_result: l, right_result: r })
}

const CHUNK: usize = 512;

/// First instance, exhaustive corpus first and then the seeded random
/// stream, on which `left` holds and `right` fails.
pub fn find_separation(left: PrincipleId, right: PrincipleId, b: &Budget) -> Result<SearchOutcome> {
    b.check()?;
    let mut examined = 0;
    let mut scan = |chunk: Vec<Instance>| -> Result<Option<SeparationResult>> {
        let hit = chunk.par_iter().find_map_first(|inst| separates(left, right, inst));
        examined += match &hit {
            Some(found) => chunk.iter().position(|c| *c == found.instance).unwrap_or(0) + 1,
            None => chunk.len(),
        };
        match hit {
            Some(found) if found.verify()? => Ok(Some(found)),
            Some(_) => Err(Error::Format("separation failed re-verification".into())),
            None => Ok(None),
        }
    };
    if b.max_n <= MAX_EXHAUSTIVE_N {
        for chunk in &enumerate_instances(b)?.chunks(CHUNK) {
            if let Some(found) = scan(chunk.collect())? {
                return Ok(SearchOutcome::Found(Box::new(found)));
            }
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(b.seed);
    let mut left_to_draw = b.max_instances;
    while left_to_draw > 0 {
        let take = left_to_draw.min(CHUNK);
        left_to_draw -= take;
        let chunk: Vec<Instance> = (0..take).map(|_| random_with(&mut rng, b)).collect();
        if let Some(found) = scan(chunk)? {
            return Ok(SearchOutcome::Found(Box::new(found)));
        }
    }
    Ok(SearchOutcome::NotFoundWithinBudget { examined })
}

/// Paths of the instance document and its verdict sidecar for `stem`.
pub fn separation_paths(dir: &Path, stem: &str) -> (PathBuf, PathBuf) {
    (dir.join(format!("{stem}.json")), dir.join(format!("{stem}.verdict.json")))
}

/// Writes the instance document and the verdict sidecar.
pub fn save_separation(result: &SeparationResult, dir: &Path, stem: &str) -> Result<(PathBuf, PathBuf)> {
    let (inst_path, sidecar_path) = separation_paths(dir, stem);
    std::fs::write(&inst_path, instance_to_json(&result.instance)?)?;
    let sidecar = VerdictSidecar {
        left: EvalDoc::from(&result.left_result),
        right: EvalDoc::from(&result.right_result),
    };
    std::fs::write(&sidecar_path, to_json(&sidecar)?)?;
    Ok((inst_path, sidecar_path))
}

/// Loads a persisted separation and re-verifies it: both verdicts are
/// re-evaluated and must match the sidecar, and the stored witness must
/// replay.
pub fn load_separation(instance_path: &Path, sidecar_path: &Path) -> Result<SeparationResult> {
    let instance = load_instance(&std::fs::read(instance_path)?)?;
    let sidecar: VerdictSidecar = serde_json::from_slice(&std::fs::read(sidecar_path)?)
        .map_err(|e| Error::Format(e.to_string()))?;
    let left: PrincipleId = sidecar.left.principle.parse()?;
    let right: PrincipleId = sidecar.right.principle.parse()?;
    let result = SeparationResult {
        left,
        right,
        left_result: evaluate(left, &instance)?,
        right_result: evaluate(right, &instance)?,
        instance,
    };
    if EvalDoc::from(&result.left_result) != sidecar.left
        || EvalDoc::from(&result.right_result) != sidecar.right
    {
        return Err(Error::Format("stored verdicts do not match re-evaluation".into()));
    }
    let stored = sidecar.left.witness(&result.instance)?;
    let replays = match stored {
        Some(w) => w.replay(left, &result.instance)?,
        None => false,
    };
    if !replays || !result.verify()? {
        return Err(Error::Format("stored separation does not re-verify".into()));
    }
    Ok(result)
}
