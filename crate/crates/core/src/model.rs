//! Documents, markables, anaphoric interpretations and crowd judgments.
//!
//! Everything here is immutable after construction and all operations are
//! pure, so callers are free to fan out over documents concurrently.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Markable identifier, unique within one document.
pub type MarkableId = u32;

#[derive(Debug, Error, PartialEq)]
pub enum ModelError {
    #[error("document {doc}: sentence bounds do not partition [0, {tokens})")]
    BadSentenceBounds { doc: String, tokens: usize },
    #[error("document {doc}: markable {markable} span [{start}, {end}) invalid for {tokens} tokens")]
    BadSpan {
        doc: String,
        markable: MarkableId,
        start: usize,
        end: usize,
        tokens: usize,
    },
    #[error("document {doc}: markable {markable} head {head} outside its span")]
    BadHead {
        doc: String,
        markable: MarkableId,
        head: usize,
    },
    #[error("document {doc}: duplicate markable id {markable}")]
    DuplicateMarkable { doc: String, markable: MarkableId },
    #[error("document {doc}: label references unknown markable id {markable}")]
    UnknownMarkable { doc: String, markable: MarkableId },
    #[error("document {doc}: markable {markable} has no label")]
    MissingLabel { doc: String, markable: MarkableId },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Genre {
    Gutenberg,
    Wikipedia,
    Other,
}

impl Genre {
    pub const ALL: [Genre; 3] = [Genre::Gutenberg, Genre::Wikipedia, Genre::Other];

    pub fn name(self) -> &'static str {
        match self {
            Genre::Gutenberg => "gutenberg",
            Genre::Wikipedia => "wikipedia",
            Genre::Other => "other",
        }
    }
}

/// A token span that is a candidate referring expression. `start`/`end` are a
/// half-open token range; `head`, when present, lies inside it.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Markable {
    pub id: MarkableId,
    pub start: usize,
    pub end: usize,
    pub head: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Document {
    pub id: String,
    pub genre: Genre,
    pub tokens: Vec<String>,
    /// Half-open token ranges partitioning `[0, tokens.len())`.
    pub sentence_bounds: Vec<(usize, usize)>,
    pub markables: Vec<Markable>,
}

impl Document {
    /// Check the structural invariants: sentence bounds partition the token
    /// range, spans are in bounds, heads are inside their spans, ids unique.
    pub fn validate(&self) -> Result<(), ModelError> {
        let n = self.tokens.len();
        let mut cursor = 0usize;
        for &(s, e) in &self.sentence_bounds {
            if s != cursor || e <= s || e > n {
                return Err(ModelError::BadSentenceBounds {
                    doc: self.id.clone(),
                    tokens: n,
                });
            }
            cursor = e;
        }
        if cursor != n {
            return Err(ModelError::BadSentenceBounds {
                doc: self.id.clone(),
                tokens: n,
            });
        }
        let mut seen = BTreeSet::new();
        for m in &self.markables {
            if m.start >= m.end || m.end > n {
                return Err(ModelError::BadSpan {
                    doc: self.id.clone(),
                    markable: m.id,
                    start: m.start,
                    end: m.end,
                    tokens: n,
                });
            }
            if let Some(h) = m.head {
                if h < m.start || h >= m.end {
                    return Err(ModelError::BadHead {
                        doc: self.id.clone(),
                        markable: m.id,
                        head: h,
                    });
                }
            }
            if !seen.insert(m.id) {
                return Err(ModelError::DuplicateMarkable {
                    doc: self.id.clone(),
                    markable: m.id,
                });
            }
        }
        Ok(())
    }

    pub fn markable(&self, id: MarkableId) -> Option<&Markable> {
        self.markables.iter().find(|m| m.id == id)
    }

    /// Index of the sentence containing token `tok`.
    pub fn sentence_of(&self, tok: usize) -> usize {
        match self.sentence_bounds.binary_search_by(|&(s, _)| s.cmp(&tok)) {
            Ok(i) => i,
            Err(i) => i.saturating_sub(1),
        }
    }

    /// Markables ordered by (start, end, id) — document order.
    pub fn markables_in_order(&self) -> Vec<&Markable> {
        let mut v: Vec<&Markable> = self.markables.iter().collect();
        v.sort_by_key(|m| (m.start, m.end, m.id));
        v
    }
}

/// One anaphoric judgment value.
///
/// A discourse-old interpretation carries its antecedent set; more than one
/// antecedent encodes a split-antecedent plural. A predicative interpretation
/// may carry the markable it is predicated of.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(tag = "type")]
pub enum Interpretation {
    #[serde(rename = "DN")]
    DiscourseNew,
    #[serde(rename = "DO")]
    DiscourseOld { antecedents: BTreeSet<MarkableId> },
    #[serde(rename = "EX")]
    Expletive,
    #[serde(rename = "PR")]
    Predicative { anchor: Option<MarkableId> },
}

impl Interpretation {
    pub fn discourse_old(antecedents: impl IntoIterator<Item = MarkableId>) -> Self {
        Interpretation::DiscourseOld {
            antecedents: antecedents.into_iter().collect(),
        }
    }

    pub fn class(&self) -> InterpretationClass {
        interpretation_class(self)
    }

    pub fn is_split_antecedent(&self) -> bool {
        matches!(self, Interpretation::DiscourseOld { antecedents } if antecedents.len() > 1)
    }

    /// The single antecedent of a non-split discourse-old interpretation.
    pub fn single_antecedent(&self) -> Option<MarkableId> {
        match self {
            Interpretation::DiscourseOld { antecedents } if antecedents.len() == 1 => {
                antecedents.iter().next().copied()
            }
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum InterpretationClass {
    #[serde(rename = "DN")]
    DiscourseNew,
    #[serde(rename = "DO")]
    DiscourseOld,
    #[serde(rename = "EX")]
    Expletive,
    #[serde(rename = "PR")]
    Predicative,
}

impl InterpretationClass {
    pub const ALL: [InterpretationClass; 4] = [
        InterpretationClass::DiscourseNew,
        InterpretationClass::DiscourseOld,
        InterpretationClass::Expletive,
        InterpretationClass::Predicative,
    ];

    pub fn index(self) -> usize {
        match self {
            InterpretationClass::DiscourseNew => 0,
            InterpretationClass::DiscourseOld => 1,
            InterpretationClass::Expletive => 2,
            InterpretationClass::Predicative => 3,
        }
    }

    /// Tie-break priority for decoding: DO > DN > PR > EX.
    pub fn decode_priority(self) -> u8 {
        match self {
            InterpretationClass::DiscourseOld => 3,
            InterpretationClass::DiscourseNew => 2,
            InterpretationClass::Predicative => 1,
            InterpretationClass::Expletive => 0,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            InterpretationClass::DiscourseNew => "DN",
            InterpretationClass::DiscourseOld => "DO",
            InterpretationClass::Expletive => "EX",
            InterpretationClass::Predicative => "PR",
        }
    }
}

/// Tag of the interpretation union.
pub fn interpretation_class(i: &Interpretation) -> InterpretationClass {
    match i {
        Interpretation::DiscourseNew => InterpretationClass::DiscourseNew,
        Interpretation::DiscourseOld { .. } => InterpretationClass::DiscourseOld,
        Interpretation::Expletive => InterpretationClass::Expletive,
        Interpretation::Predicative { .. } => InterpretationClass::Predicative,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum JudgmentKind {
    Annotation,
    Validation,
}

/// Agreement sign of a validation. Annotations are always `Agree`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Polarity {
    Agree,
    Disagree,
}

impl Polarity {
    pub fn sign(self) -> i8 {
        match self {
            Polarity::Agree => 1,
            Polarity::Disagree => -1,
        }
    }
}

impl Serialize for Polarity {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_i8(self.sign())
    }
}

impl<'de> Deserialize<'de> for Polarity {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        match i8::deserialize(d)? {
            1 => Ok(Polarity::Agree),
            -1 => Ok(Polarity::Disagree),
            other => Err(serde::de::Error::custom(format!(
                "polarity must be 1 or -1, got {other}"
            ))),
        }
    }
}

/// One observation from the annotation or validation game.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Judgment {
    pub doc: String,
    pub markable: MarkableId,
    pub player: String,
    pub kind: JudgmentKind,
    pub polarity: Polarity,
    pub interpretation: Interpretation,
}

impl Judgment {
    pub fn annotation(
        doc: impl Into<String>,
        markable: MarkableId,
        player: impl Into<String>,
        interpretation: Interpretation,
    ) -> Self {
        Judgment {
            doc: doc.into(),
            markable,
            player: player.into(),
            kind: JudgmentKind::Annotation,
            polarity: Polarity::Agree,
            interpretation,
        }
    }

    pub fn validation(
        doc: impl Into<String>,
        markable: MarkableId,
        player: impl Into<String>,
        interpretation: Interpretation,
        polarity: Polarity,
    ) -> Self {
        Judgment {
            doc: doc.into(),
            markable,
            player: player.into(),
            kind: JudgmentKind::Validation,
            polarity,
            interpretation,
        }
    }
}

/// The completeness rule: at least `min_annotations` annotations per markable
/// and at least `min_validations_per_interpretation` validations for every
/// distinct interpretation observed on it.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct CompletionPolicy {
    pub min_annotations: usize,
    pub min_validations_per_interpretation: usize,
}

impl Default for CompletionPolicy {
    fn default() -> Self {
        CompletionPolicy {
            min_annotations: 8,
            min_validations_per_interpretation: 4,
        }
    }
}

/// True iff every markable of `doc` meets the policy thresholds.
///
/// `judgments` must already be filtered to `doc`. Note that a fresh
/// interpretation entered on a previously complete document re-opens it: the
/// new interpretation starts with zero validations.
pub fn is_complete(doc: &Document, judgments: &[Judgment], policy: &CompletionPolicy) -> bool {
    let mut annotations: BTreeMap<MarkableId, usize> = BTreeMap::new();
    let mut validations: BTreeMap<(MarkableId, &Interpretation), usize> = BTreeMap::new();
    let mut observed: BTreeMap<MarkableId, BTreeSet<&Interpretation>> = BTreeMap::new();
    for j in judgments {
        debug_assert_eq!(j.doc, doc.id, "judgments must be filtered to the document");
        observed.entry(j.markable).or_default().insert(&j.interpretation);
        match j.kind {
            JudgmentKind::Annotation => *annotations.entry(j.markable).or_default() += 1,
            JudgmentKind::Validation => {
                *validations.entry((j.markable, &j.interpretation)).or_default() += 1
            }
        }
    }
    doc.markables.iter().all(|m| {
        annotations.get(&m.id).copied().unwrap_or(0) >= policy.min_annotations
            && observed.get(&m.id).map_or(true, |ints| {
                ints.iter().all(|i| {
                    validations.get(&(m.id, *i)).copied().unwrap_or(0)
                        >= policy.min_validations_per_interpretation
                })
            })
    })
}

/// A document's markables partitioned into entity clusters plus the
/// non-referring set. Split-antecedent plurals sit in singleton clusters and
/// are flagged separately so scoring can exclude them from link metrics.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClusterSet {
    pub clusters: Vec<BTreeSet<MarkableId>>,
    pub non_referring: BTreeSet<MarkableId>,
    pub split_antecedent: BTreeSet<MarkableId>,
}

impl ClusterSet {
    pub fn mention_count(&self) -> usize {
        self.clusters.iter().map(|c| c.len()).sum::<usize>() + self.non_referring.len()
    }
}

/// Connected components of the single-antecedent discourse-old graph.
///
/// Expletive and predicative markables end up in the non-referring set, but
/// the edges of discourse-old labels pointing at them still merge the
/// referring markables around them — disagreements between a non-referring
/// label and incoming links are for the aggregator to settle, not this
/// function. Split-antecedent labels contribute no edges.
pub fn derive_clusters(
    doc: &Document,
    labels: &BTreeMap<MarkableId, Interpretation>,
) -> Result<ClusterSet, ModelError> {
    let ids: Vec<MarkableId> = {
        let mut v: Vec<MarkableId> = doc.markables.iter().map(|m| m.id).collect();
        v.sort_unstable();
        v
    };
    let index: BTreeMap<MarkableId, usize> =
        ids.iter().enumerate().map(|(i, &id)| (id, i)).collect();
    for &id in labels.keys() {
        if !index.contains_key(&id) {
            return Err(ModelError::UnknownMarkable {
                doc: doc.id.clone(),
                markable: id,
            });
        }
    }

    let mut parent: Vec<usize> = (0..ids.len()).collect();
    fn find(parent: &mut [usize], mut x: usize) -> usize {
        while parent[x] != x {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        x
    }
    let mut union = |parent: &mut Vec<usize>, a: usize, b: usize| {
        let (ra, rb) = (find(parent, a), find(parent, b));
        if ra != rb {
            parent[ra.max(rb)] = ra.min(rb);
        }
    };

    let mut non_referring = BTreeSet::new();
    let mut split_antecedent = BTreeSet::new();
    for &id in &ids {
        let label = labels.get(&id).ok_or_else(|| ModelError::MissingLabel {
            doc: doc.id.clone(),
            markable: id,
        })?;
        match label {
            Interpretation::DiscourseNew => {}
            Interpretation::Expletive => {
                non_referring.insert(id);
            }
            Interpretation::Predicative { anchor } => {
                if let Some(a) = anchor {
                    if !index.contains_key(a) {
                        return Err(ModelError::UnknownMarkable {
                            doc: doc.id.clone(),
                            markable: *a,
                        });
                    }
                }
                non_referring.insert(id);
            }
            Interpretation::DiscourseOld { antecedents } => {
                for a in antecedents {
                    if !index.contains_key(a) {
                        return Err(ModelError::UnknownMarkable {
                            doc: doc.id.clone(),
                            markable: *a,
                        });
                    }
                }
                if antecedents.len() == 1 {
                    let a = *antecedents.iter().next().unwrap();
                    union(&mut parent, index[&id], index[&a]);
                } else {
                    split_antecedent.insert(id);
                }
            }
        }
    }

    let mut components: BTreeMap<usize, BTreeSet<MarkableId>> = BTreeMap::new();
    for (i, &id) in ids.iter().enumerate() {
        if non_referring.contains(&id) {
            continue;
        }
        let root = find(&mut parent, i);
        components.entry(root).or_default().insert(id);
    }
    let mut clusters: Vec<BTreeSet<MarkableId>> = components.into_values().collect();
    clusters.sort_by_key(|c| *c.iter().next().unwrap());
    Ok(ClusterSet {
        clusters,
        non_referring,
        split_antecedent,
    })
}
