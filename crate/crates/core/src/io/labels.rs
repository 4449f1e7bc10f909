//! Decoded-label files: one JSON object mapping document id → markable id →
//! decoded interpretation with its posterior.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::{utf8, IoError, FORMAT_VERSION};
use crate::aggregation::AggregatedLabel;
use crate::model::MarkableId;

/// Decoded labels for a corpus, keyed by document then markable.
pub type LabelMap = BTreeMap<String, BTreeMap<MarkableId, AggregatedLabel>>;

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct LabelsWire {
    kind: String,
    version: u32,
    docs: LabelMap,
}

pub fn serialize_labels(labels: &LabelMap) -> Vec<u8> {
    let wire = LabelsWire {
        kind: "labels".into(),
        version: FORMAT_VERSION,
        docs: labels.clone(),
    };
    let mut out = serde_json::to_string(&wire).expect("labels serialize");
    out.push('\n');
    out.into_bytes()
}

pub fn parse_labels(bytes: &[u8]) -> Result<LabelMap, IoError> {
    let text = utf8(bytes)?;
    let wire: LabelsWire = serde_json::from_str(text).map_err(|e| IoError::Parse {
        line: 1,
        message: e.to_string(),
    })?;
    if wire.kind != "labels" || wire.version != FORMAT_VERSION {
        return Err(IoError::BadHeader { expected: "labels" });
    }
    Ok(wire.docs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::Interpretation;

    #[test]
    fn labels_round_trip() {
        let mut labels = LabelMap::new();
        labels.entry("d1".into()).or_default().insert(
            3,
            AggregatedLabel {
                interpretation: Interpretation::discourse_old([1]),
                posterior: 0.875,
            },
        );
        let bytes = serialize_labels(&labels);
        let reparsed = parse_labels(&bytes).unwrap();
        assert_eq!(labels, reparsed);
        assert_eq!(bytes, serialize_labels(&reparsed));
    }
}
