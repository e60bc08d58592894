//! Instances and the JSON instance document.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::collection::{normalize_families, Collection};
use crate::error::{Error, Result};
use crate::predicate::{parse_predicate, DeclaredNames};
use crate::set::{GroundSet, SetFamily, Subset};

/// Default limit on the number of members of a family in `A`.
pub const MAX_FAMILY_MEMBERS: usize = 16;
/// Limit with `allow_over_budget`; subfamily masks are 32 bits wide.
pub const HARD_MAX_FAMILY_MEMBERS: usize = 24;
pub const MAX_HORIZON: usize = 4;
pub const HARD_MAX_HORIZON: usize = 8;

/// The family `K` that strongly-star principles draw their sets from.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub enum Kappa {
    #[default]
    Singletons,
    FiniteNonempty,
    FiniteWithEmpty,
    Extensional(Vec<Subset>),
}

impl Kappa {
    /// Members in canonical order.
    pub fn members(&self, ground: GroundSet) -> Vec<Subset> {
        match self {
            Kappa::Singletons => ground.points().map(Subset::singleton).collect(),
            Kappa::FiniteNonempty => ground.subsets().skip(1).collect(),
            Kappa::FiniteWithEmpty => ground.subsets().collect(),
            Kappa::Extensional(list) => list.clone(),
        }
    }
}

/// Whether subfamily and point-set selections may be empty.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EvalOptions {
    /// `S_fin`, `S*_fin`: any finite subfamily, including the empty one.
    pub sfin_allow_empty: bool,
    /// `CS_fin`, `DS_fin`, `SCS_fin`, `SDS_fin`: selections name `k >= 1` sets.
    pub fin_allow_empty: bool,
}

impl Default for EvalOptions {
    fn default() -> Self {
        EvalOptions { sfin_allow_empty: true, fin_allow_empty: false }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Budgets {
    /// Lifts the default limits on family size and horizon.
    pub allow_over_budget: bool,
    /// Cap on `|A|^H`.
    pub max_sequences: u64,
    /// Cap on search states visited for a single sequence.
    pub max_states: u64,
}

impl Default for Budgets {
    fn default() -> Self {
        Budgets { allow_over_budget: false, max_sequences: 1 << 20, max_states: 1 << 22 }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Instance {
    pub ground: GroundSet,
    pub families: BTreeMap<String, SetFamily>,
    pub collections: BTreeMap<String, Vec<SetFamily>>,
    /// Sorted and deduplicated; the quantified collection.
    pub collection_a: Vec<SetFamily>,
    pub collection_b: Collection,
    pub kappa: Kappa,
    pub horizon: usize,
    pub options: EvalOptions,
    pub budgets: Budgets,
}

impl Instance {
    /// An instance with default kappa, options and budgets. Not validated;
    /// see [`Instance::validate`].
    pub fn new(
        ground: GroundSet,
        collection_a: Vec<SetFamily>,
        collection_b: Collection,
        horizon: usize,
    ) -> Self {
        Instance {
            ground,
            families: BTreeMap::new(),
            collections: BTreeMap::new(),
            collection_a: normalize_families(collection_a),
            collection_b,
            kappa: Kappa::default(),
            horizon,
            options: EvalOptions::default(),
            budgets: Budgets::default(),
        }
    }

    pub fn with_family(mut self, name: &str, f: SetFamily) -> Self {
        self.families.insert(name.to_string(), f);
        self
    }

    pub fn with_kappa(mut self, kappa: Kappa) -> Self {
        self.kappa = kappa;
        self
    }

    pub fn with_b(&self, collection_b: Collection) -> Self {
        Instance { collection_b, ..self.clone() }
    }

    pub fn with_horizon(&self, horizon: usize) -> Self {
        Instance { horizon, ..self.clone() }
    }

    pub fn family(&self, name: &str) -> Result<&SetFamily> {
        self.families.get(name).ok_or_else(|| Error::UnknownReference(name.to_string()))
    }

    pub fn named_collection(&self, name: &str) -> Result<&Vec<SetFamily>> {
        self.collections.get(name).ok_or_else(|| Error::UnknownReference(name.to_string()))
    }

    pub fn declared_names(&self) -> DeclaredNames {
        DeclaredNames {
            families: self.families.keys().cloned().collect(),
            collections: self.collections.keys().cloned().collect(),
        }
    }

    /// Checks every instance invariant.
    pub fn validate(&self) -> Result<()> {
        let g = self.ground;
        let fits = |f: &SetFamily, what: &str| -> Result<()> {
            if f.fits(g) {
                Ok(())
            } else {
                Err(Error::Format(format!(
                    "{what} has an element outside the ground set of size {}",
                    g.size()
                )))
            }
        };
        for (name, f) in &self.families {
            fits(f, &format!("family `{name}`"))?;
        }
        for (name, c) in &self.collections {
            for f in c {
                fits(f, &format!("collection `{name}`"))?;
            }
        }
        if self.collection_a.is_empty() {
            return Err(Error::Format("collection_A must contain at least one family".into()));
        }
        let member_limit = if self.budgets.allow_over_budget {
            HARD_MAX_FAMILY_MEMBERS
        } else {
            MAX_FAMILY_MEMBERS
        };
        for f in &self.collection_a {
            fits(f, "collection_A")?;
            if f.len() > member_limit {
                return Err(Error::BudgetExceeded(format!(
                    "a family in collection_A has {} members (limit {member_limit})",
                    f.len()
                )));
            }
        }
        if self.horizon == 0 {
            return Err(Error::Format("horizon must be positive".into()));
        }
        let horizon_limit =
            if self.budgets.allow_over_budget { HARD_MAX_HORIZON } else { MAX_HORIZON };
        if self.horizon > horizon_limit {
            return Err(Error::BudgetExceeded(format!(
                "horizon {} exceeds the limit of {horizon_limit}",
                self.horizon
            )));
        }
        if let Kappa::Extensional(list) = &self.kappa {
            if list.iter().any(|&s| !g.contains_subset(s)) {
                return Err(Error::Format("kappa has an element outside the ground set".into()));
            }
        }
        self.validate_collection(&self.collection_b)
    }

    fn validate_collection(&self, c: &Collection) -> Result<()> {
        match c {
            Collection::Extensional(list) => {
                if list.iter().any(|f| !f.fits(self.ground)) {
                    return Err(Error::Format(
                        "collection_B has an element outside the ground set".into(),
                    ));
                }
                Ok(())
            }
            Collection::Intensional(p) => {
                let (fams, colls) = p.references();
                for name in fams {
                    self.family(name)?;
                }
                for name in colls {
                    self.named_collection(name)?;
                }
                if !self.ground.contains_subset(p.literal_elements()) {
                    return Err(Error::Format(
                        "predicate literal has an element outside the ground set".into(),
                    ));
                }
                Ok(())
            }
            Collection::Hull { base, .. } => self.validate_collection(base),
            Collection::Complemented(inner) => self.validate_collection(inner),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
enum FamilyDoc {
    Name(String),
    Inline(Vec<Vec<i64>>),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
enum CollectionDoc {
    Predicate(String),
    Extensional(Vec<FamilyDoc>),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
enum KappaDoc {
    Named(String),
    Listed { extensional: Vec<Vec<i64>> },
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct InstanceDoc {
    ground_set: i64,
    #[serde(default)]
    families: BTreeMap<String, Vec<Vec<i64>>>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    collections: BTreeMap<String, Vec<FamilyDoc>>,
    #[serde(rename = "collection_A")]
    collection_a: Vec<FamilyDoc>,
    #[serde(rename = "collection_B")]
    collection_b: CollectionDoc,
    #[serde(default = "default_kappa")]
    kappa: KappaDoc,
    horizon: i64,
    #[serde(default, skip_serializing_if = "is_default_options")]
    options: EvalOptions,
    #[serde(default, skip_serializing_if = "is_default_budgets")]
    budgets: Budgets,
}

fn default_kappa() -> KappaDoc {
    KappaDoc::Named("singletons".into())
}

fn is_default_options(o: &EvalOptions) -> bool {
    *o == EvalOptions::default()
}

fn is_default_budgets(b: &Budgets) -> bool {
    *b == Budgets::default()
}

fn subset_from_doc(list: &[i64], n: usize, what: &str) -> Result<Subset> {
    let mut s = Subset::EMPTY;
    for &x in list {
        if x < 0 || x as usize >= n {
            return Err(Error::Format(format!(
                "element {x} in {what} is outside the ground set of size {n}"
            )));
        }
        s = s.union(Subset::singleton(x as usize));
    }
    Ok(s)
}

fn family_from_lists(lists: &[Vec<i64>], n: usize, what: &str) -> Result<SetFamily> {
    lists.iter().map(|l| subset_from_doc(l, n, what)).collect()
}

fn subset_to_doc(s: Subset) -> Vec<i64> {
    s.elements().map(|x| x as i64).collect()
}

fn family_to_doc(f: &SetFamily) -> Vec<Vec<i64>> {
    f.iter().map(|&s| subset_to_doc(s)).collect()
}

/// Decodes and validates an instance document.
pub fn load_instance(bytes: &[u8]) -> Result<Instance> {
    let doc: InstanceDoc =
        serde_json::from_slice(bytes).map_err(|e| Error::Format(e.to_string()))?;
    if doc.ground_set < 1 {
        return Err(Error::Format(format!("ground_set must be at least 1, got {}", doc.ground_set)));
    }
    let ground = GroundSet::new(doc.ground_set as usize)?;
    let n = ground.size();

    let mut families = BTreeMap::new();
    for (name, lists) in &doc.families {
        families.insert(name.clone(), family_from_lists(lists, n, &format!("family `{name}`"))?);
    }
    let resolve = |r: &FamilyDoc, what: &str| -> Result<SetFamily> {
        match r {
            FamilyDoc::Name(name) => {
                families.get(name).cloned().ok_or_else(|| Error::UnknownReference(name.clone()))
            }
            FamilyDoc::Inline(lists) => family_from_lists(lists, n, what),
        }
    };
    let mut collections = BTreeMap::new();
    for (name, refs) in &doc.collections {
        let list: Result<Vec<_>> =
            refs.iter().map(|r| resolve(r, &format!("collection `{name}`"))).collect();
        collections.insert(name.clone(), normalize_families(list?));
    }
    let collection_a: Vec<SetFamily> =
        doc.collection_a.iter().map(|r| resolve(r, "collection_A")).collect::<Result<_>>()?;

    let kappa = match &doc.kappa {
        KappaDoc::Named(s) => match s.as_str() {
            "singletons" => Kappa::Singletons,
            "finite_nonempty" => Kappa::FiniteNonempty,
            "finite_with_empty" => Kappa::FiniteWithEmpty,
            other => return Err(Error::Format(format!("unknown kappa `{other}`"))),
        },
        KappaDoc::Listed { extensional } => {
            let mut v: Vec<Subset> = extensional
                .iter()
                .map(|l| subset_from_doc(l, n, "kappa"))
                .collect::<Result<_>>()?;
            v.sort();
            v.dedup();
            Kappa::Extensional(v)
        }
    };
    if doc.horizon < 1 {
        return Err(Error::Format(format!("horizon must be at least 1, got {}", doc.horizon)));
    }

    let collection_b = match &doc.collection_b {
        CollectionDoc::Predicate(text) => {
            let names = DeclaredNames {
                families: families.keys().cloned().collect(),
                collections: collections.keys().cloned().collect(),
            };
            Collection::Intensional(parse_predicate(text, &names)?)
        }
        CollectionDoc::Extensional(refs) => Collection::extensional(
            refs.iter().map(|r| resolve(r, "collection_B")).collect::<Result<Vec<_>>>()?,
        ),
    };
    let inst = Instance {
        ground,
        families,
        collections,
        collection_a: normalize_families(collection_a),
        collection_b,
        kappa,
        horizon: doc.horizon as usize,
        options: doc.options,
        budgets: doc.budgets,
    };
    inst.validate()?;
    Ok(inst)
}

/// Canonical JSON document for `inst` (sorted, deduplicated, inline families
/// for the collections).
pub fn instance_to_json(inst: &Instance) -> Result<String> {
    let collection_b = match &inst.collection_b {
        Collection::Extensional(list) => {
            CollectionDoc::Extensional(list.iter().map(|f| FamilyDoc::Inline(family_to_doc(f))).collect())
        }
        Collection::Intensional(p) => CollectionDoc::Predicate(p.to_string()),
        other => {
            return Err(Error::Format(format!("collection {other} has no document form")))
        }
    };
    let kappa = match &inst.kappa {
        Kappa::Singletons => KappaDoc::Named("singletons".into()),
        Kappa::FiniteNonempty => KappaDoc::Named("finite_nonempty".into()),
        Kappa::FiniteWithEmpty => KappaDoc::Named("finite_with_empty".into()),
        Kappa::Extensional(list) => {
            KappaDoc::Listed { extensional: list.iter().map(|&s| subset_to_doc(s)).collect() }
        }
    };
    let doc = InstanceDoc {
        ground_set: inst.ground.size() as i64,
        families: inst.families.iter().map(|(k, f)| (k.clone(), family_to_doc(f))).collect(),
        collections: inst
            .collections
            .iter()
            .map(|(k, c)| (k.clone(), c.iter().map(|f| FamilyDoc::Inline(family_to_doc(f))).collect()))
            .collect(),
        collection_a: inst.collection_a.iter().map(|f| FamilyDoc::Inline(family_to_doc(f))).collect(),
        collection_b,
        kappa,
        horizon: inst.horizon as i64,
        options: inst.options,
        budgets: inst.budgets,
    };
    serde_json::to_string_pretty(&doc).map_err(|e| Error::Format(e.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::predicate::Predicate;

    const EXAMPLE: &str = r#"{
      "ground_set": 3,
      "families": { "U0": [[0,1],[1,2]] },
      "collection_A": ["U0"],
      "collection_B": { "predicate": "cover" },
      "kappa": "singletons",
      "horizon": 2
    }"#;

    #[test]
    fn loads_example_document() {
        let inst = load_instance(EXAMPLE.as_bytes()).unwrap();
        assert_eq!(inst.ground.size(), 3);
        assert_eq!(inst.collection_a.len(), 1);
        assert_eq!(inst.collection_b, Collection::Intensional(Predicate::Cover));
        assert_eq!(inst.horizon, 2);
        assert_eq!(inst.kappa, Kappa::Singletons);
    }

    #[test]
    fn rejects_empty_ground_set() {
        let doc = EXAMPLE.replace("\"ground_set\": 3", "\"ground_set\": 0");
        assert!(matches!(load_instance(doc.as_bytes()), Err(Error::Format(_))));
    }

    #[test]
    fn rejects_out_of_range_element() {
        let doc = EXAMPLE.replace("[[0,1],[1,2]]", "[[0,1],[1,7]]");
        assert!(matches!(load_instance(doc.as_bytes()), Err(Error::Format(_))));
    }

    #[test]
    fn budget_errors() {
        let doc = EXAMPLE.replace("\"ground_set\": 3", "\"ground_set\": 17");
        assert!(matches!(load_instance(doc.as_bytes()), Err(Error::BudgetExceeded(_))));
        let doc = EXAMPLE.replace("\"horizon\": 2", "\"horizon\": 5");
        assert!(matches!(load_instance(doc.as_bytes()), Err(Error::BudgetExceeded(_))));
        let doc = doc.replace(
            "\"horizon\": 5",
            "\"horizon\": 5, \"budgets\": {\"allow_over_budget\": true}",
        );
        assert_eq!(load_instance(doc.as_bytes()).unwrap().horizon, 5);
    }

    #[test]
    fn unknown_references() {
        let doc = EXAMPLE.replace("[\"U0\"]", "[\"U9\"]");
        assert_eq!(load_instance(doc.as_bytes()).unwrap_err(), Error::UnknownReference("U9".into()));
        let doc = EXAMPLE.replace("\"cover\"", "\"refines(W)\"");
        assert_eq!(load_instance(doc.as_bytes()).unwrap_err(), Error::UnknownReference("W".into()));
    }

    #[test]
    fn literal_out_of_range() {
        let doc = EXAMPLE.replace("\"cover\"", "\"contains({5})\"");
        assert!(matches!(load_instance(doc.as_bytes()), Err(Error::Format(_))));
    }

    #[test]
    fn malformed_documents() {
        assert!(matches!(load_instance(b"{"), Err(Error::Format(_))));
        let doc = EXAMPLE.replace("\"horizon\": 2", "\"horizon\": 2, \"extra\": 1");
        assert!(matches!(load_instance(doc.as_bytes()), Err(Error::Format(_))));
        let doc = EXAMPLE.replace("[\"U0\"]", "[]");
        assert!(matches!(load_instance(doc.as_bytes()), Err(Error::Format(_))));
        let doc = EXAMPLE.replace("\"singletons\"", "\"pairs\"");
        assert!(matches!(load_instance(doc.as_bytes()), Err(Error::Format(_))));
    }

    #[test]
    fn canonical_document_round_trips() {
        let doc = r#"{
          "ground_set": 3,
          "families": { "U0": [[1,2],[0,1],[0,1]] },
          "collections": { "C": [[[2]], "U0", [[2]]] },
          "collection_A": ["U0", [[2],[0]], "U0"],
          "collection_B": { "extensional": [ [[0,1,2]], "U0" ] },
          "kappa": {"extensional": [[2],[0,1]]},
          "horizon": 1,
          "options": {"fin_allow_empty": true}
        }"#;
        let inst = load_instance(doc.as_bytes()).unwrap();
        assert_eq!(inst.collection_a.len(), 2);
        assert_eq!(inst.collections["C"].len(), 2);
        assert!(inst.options.fin_allow_empty && inst.options.sfin_allow_empty);
        let text = instance_to_json(&inst).unwrap();
        let again = load_instance(text.as_bytes()).unwrap();
        assert_eq!(again, inst);
        assert_eq!(instance_to_json(&again).unwrap(), text);
    }
}
