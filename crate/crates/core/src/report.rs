//! JSON report documents. Every document is built from owned, ordered data so
//! the same inputs always render to the same bytes.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::instance::{instance_to_json, Instance};
use crate::principles::{EvalResult, PrincipleId, Selection, Witness};
use crate::set::{SetFamily, Subset};
use crate::theorems::{TheoremReport, ViolationKind};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum SelectionDoc {
    Element(usize),
    /// Indices of the chosen members.
    Subfamily(Vec<usize>),
    Point(usize),
    Points(Vec<usize>),
    Kappa(Vec<usize>),
}

impl From<Selection> for SelectionDoc {
    fn from(s: Selection) -> Self {
        match s {
            Selection::Element(i) => SelectionDoc::Element(i),
            Selection::FiniteSubfamily(m) => {
                SelectionDoc::Subfamily((0..32).filter(|i| m >> i & 1 == 1).collect())
            }
            Selection::Point(x) => SelectionDoc::Point(x),
            Selection::PointSet(k) => SelectionDoc::Points(k.elements().collect()),
            Selection::KappaMember(k) => SelectionDoc::Kappa(k.elements().collect()),
        }
    }
}

fn subset_of(points: &[usize]) -> Result<Subset> {
    if points.iter().any(|&x| x >= 16) {
        return Err(Error::Format("selection point outside any ground set".into()));
    }
    Ok(Subset::from_elements(points.iter().copied()))
}

impl TryFrom<&SelectionDoc> for Selection {
    type Error = Error;

    fn try_from(d: &SelectionDoc) -> Result<Self> {
        Ok(match d {
            SelectionDoc::Element(i) => Selection::Element(*i),
            SelectionDoc::Subfamily(idx) => {
                if idx.iter().any(|&i| i >= 32) {
                    return Err(Error::Format("subfamily index out of range".into()));
                }
                Selection::FiniteSubfamily(idx.iter().fold(0u32, |m, &i| m | 1 << i))
            }
            SelectionDoc::Point(x) => Selection::Point(*x),
            SelectionDoc::Points(p) => Selection::PointSet(subset_of(p)?),
            SelectionDoc::Kappa(p) => Selection::KappaMember(subset_of(p)?),
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StepDoc {
    pub round: usize,
    /// Index into `collection_A`.
    pub family: usize,
    pub selection: SelectionDoc,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EvalDoc {
    pub principle: String,
    pub verdict: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub witness: Option<Vec<StepDoc>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub produced: Option<Vec<Vec<usize>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub counterexample: Option<Vec<usize>>,
    pub sequences_checked: u64,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub empty_selection: Vec<usize>,
}

fn lists(f: &SetFamily) -> Vec<Vec<usize>> {
    f.to_lists()
}

pub fn witness_steps(w: &Witness) -> Vec<StepDoc> {
    w.steps
        .iter()
        .map(|s| StepDoc { round: s.round, family: s.family_id, selection: s.selection.into() })
        .collect()
}

impl From<&EvalResult> for EvalDoc {
    fn from(r: &EvalResult) -> Self {
        EvalDoc {
            principle: r.principle.to_string(),
            verdict: r.verdict.as_str().to_string(),
            witness: r.witness.as_ref().map(witness_steps),
            produced: r.witness.as_ref().map(|w| lists(&w.produced)),
            counterexample: r.counterexample.clone(),
            sequences_checked: r.sequences_checked,
            empty_selection: r.empty_selection.clone(),
        }
    }
}

impl EvalDoc {
    /// Rebuilds the stored witness against `inst`.
    pub fn witness(&self, inst: &Instance) -> Result<Option<Witness>> {
        let Some(steps) = &self.witness else {
            return Ok(None);
        };
        let p: PrincipleId = self.principle.parse()?;
        let sequence: Vec<usize> = steps.iter().map(|s| s.family).collect();
        let selections =
            steps.iter().map(|s| Selection::try_from(&s.selection)).collect::<Result<Vec<_>>>()?;
        Witness::from_selections(p, inst, &sequence, &selections).map(Some)
    }
}

pub fn eval_report(r: &EvalResult) -> Result<String> {
    to_json(&EvalDoc::from(r))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ViolationDoc {
    pub instance: usize,
    pub direction: String,
    pub kind: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub counterexample: Option<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sequence: Option<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub message: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TheoremDoc {
    pub theorem: String,
    pub checked: usize,
    pub violations: Vec<ViolationDoc>,
    pub skipped_budget: usize,
    pub not_applicable: usize,
    pub witness_roundtrips: usize,
    pub rejected_witnesses: usize,
}

impl From<&TheoremReport> for TheoremDoc {
    fn from(r: &TheoremReport) -> Self {
        let violations = r
            .violations
            .iter()
            .map(|v| {
                let mut doc = ViolationDoc {
                    instance: v.instance,
                    direction: v.arrow.to_string(),
                    kind: String::new(),
                    counterexample: None,
                    sequence: None,
                    message: None,
                };
                match &v.kind {
                    ViolationKind::Implication { counterexample } => {
                        doc.kind = "implication".into();
                        doc.counterexample = counterexample.clone();
                    }
                    ViolationKind::WitnessRejected { sequence, message } => {
                        doc.kind = "witness_rejected".into();
                        doc.sequence = Some(sequence.clone());
                        doc.message = Some(message.clone());
                    }
                }
                doc
            })
            .collect();
        TheoremDoc {
            theorem: r.theorem.to_string(),
            checked: r.instances_checked,
            violations,
            skipped_budget: r.skipped_budget,
            not_applicable: r.not_applicable,
            witness_roundtrips: r.witness_roundtrips,
            rejected_witnesses: r.rejected_witnesses,
        }
    }
}

pub fn theorem_report(r: &TheoremReport) -> Result<String> {
    to_json(&TheoremDoc::from(r))
}

/// Several theorem reports in one document.
pub fn theorem_reports(reports: &[TheoremReport]) -> Result<String> {
    #[derive(Serialize)]
    struct All {
        reports: Vec<TheoremDoc>,
        violations: usize,
    }
    to_json(&All {
        reports: reports.iter().map(TheoremDoc::from).collect(),
        violations: reports.iter().map(|r| r.violations.len()).sum(),
    })
}

/// Verdicts stored next to a persisted separation instance.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VerdictSidecar {
    pub left: EvalDoc,
    pub right: EvalDoc,
}

/// Instance document with the given verdicts, as one JSON value.
pub fn separation_report(
    inst: &Instance,
    left: &EvalResult,
    right: &EvalResult,
) -> Result<String> {
    #[derive(Serialize)]
    struct Found {
        found: bool,
        left: EvalDoc,
        right: EvalDoc,
        instance: serde_json::Value,
    }
    let instance: serde_json::Value = serde_json::from_str(&instance_to_json(inst)?)
        .map_err(|e| Error::Format(e.to_string()))?;
    to_json(&Found { found: true, left: left.into(), right: right.into(), instance })
}

pub fn not_found_report(left: PrincipleId, right: PrincipleId, examined: usize) -> Result<String> {
    #[derive(Serialize)]
    struct NotFound {
        found: bool,
        left: String,
        right: String,
        examined: usize,
    }
    to_json(&NotFound { found: false, left: left.to_string(), right: right.to_string(), examined })
}

pub fn to_json<T: Serialize>(value: &T) -> Result<String> {
    serde_json::to_string_pretty(value).map_err(|e| Error::Format(e.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn selection_docs_round_trip() {
        let all = [
            Selection::Element(2),
            Selection::FiniteSubfamily(0b101),
            Selection::Point(3),
            Selection::PointSet(Subset::from_elements([0, 2])),
            Selection::KappaMember(Subset::from_elements([1])),
        ];
        for s in all {
            let doc = SelectionDoc::from(s);
            let text = serde_json::to_string(&doc).unwrap();
            let back: SelectionDoc = serde_json::from_str(&text).unwrap();
            assert_eq!(Selection::try_from(&back).unwrap(), s);
        }
        assert_eq!(
            serde_json::to_string(&SelectionDoc::from(Selection::FiniteSubfamily(0b110))).unwrap(),
            r#"{"subfamily":[1,2]}"#
        );
    }
}
