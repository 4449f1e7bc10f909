//! The judgment log: an append-only stream of annotation and validation
//! records, one JSON object per line.

use super::corpus::validate_interpretation_refs;
use super::{check_header, header_line, utf8, CorpusFile, IoError};
use crate::model::{Judgment, JudgmentKind, Polarity};

/// Parse a judgment log, preserving file order.
pub fn parse_judgments(bytes: &[u8]) -> Result<Vec<Judgment>, IoError> {
    let text = utf8(bytes)?;
    let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
    check_header(lines.next().map(|(_, l)| l), "judgments")?;
    let mut out = Vec::new();
    for (idx, line) in lines {
        let judgment: Judgment = serde_json::from_str(line).map_err(|e| IoError::Parse {
            line: idx + 1,
            message: e.to_string(),
        })?;
        if judgment.kind == JudgmentKind::Annotation && judgment.polarity == Polarity::Disagree {
            return Err(IoError::NegativeAnnotation {
                line: idx + 1,
                doc: judgment.doc,
                markable: judgment.markable,
            });
        }
        out.push(judgment);
    }
    Ok(out)
}

/// Canonical bytes: header plus records in the given (file) order.
pub fn serialize_judgments(log: &[Judgment]) -> Vec<u8> {
    let mut out = String::new();
    out.push_str(&header_line("judgments"));
    out.push('\n');
    for j in log {
        out.push_str(&serde_json::to_string(j).expect("judgment serializes"));
        out.push('\n');
    }
    out.into_bytes()
}

/// Referential integrity of a log against its corpus: every record names a
/// known document and markable, and interpretations only reference markables
/// that precede the judged one.
pub fn validate_log(corpus: &CorpusFile, log: &[Judgment]) -> Result<(), IoError> {
    for j in log {
        let Some(rec) = corpus.document(&j.doc) else {
            return Err(IoError::UnknownDocument(j.doc.clone()));
        };
        let doc = &rec.document;
        if doc.markable(j.markable).is_none() {
            return Err(IoError::UnknownMarkable {
                doc: j.doc.clone(),
                markable: j.markable,
            });
        }
        validate_interpretation_refs(doc, j.markable, &j.interpretation)?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::Interpretation;

    fn log_text(body: &str) -> String {
        format!("{{\"kind\":\"judgments\",\"version\":1}}\n{body}\n")
    }

    #[test]
    fn parses_annotation_line() {
        let text = log_text(
            r#"{"doc":"d","markable":5,"player":"alice","kind":"annotation","polarity":1,"interpretation":{"type":"DO","antecedents":[2]}}"#,
        );
        let log = parse_judgments(text.as_bytes()).unwrap();
        assert_eq!(log.len(), 1);
        assert_eq!(log[0].kind, JudgmentKind::Annotation);
        assert_eq!(log[0].polarity, Polarity::Agree);
        assert_eq!(log[0].interpretation, Interpretation::discourse_old([2]));
    }

    #[test]
    fn parses_disagreeing_validation() {
        let text = log_text(
            r#"{"doc":"d","markable":5,"player":"bob","kind":"validation","polarity":-1,"interpretation":{"type":"DN"}}"#,
        );
        let log = parse_judgments(text.as_bytes()).unwrap();
        assert_eq!(log[0].kind, JudgmentKind::Validation);
        assert_eq!(log[0].polarity, Polarity::Disagree);
    }

    #[test]
    fn negative_annotation_rejected() {
        let text = log_text(
            r#"{"doc":"d","markable":5,"player":"bob","kind":"annotation","polarity":-1,"interpretation":{"type":"DN"}}"#,
        );
        let err = parse_judgments(text.as_bytes()).unwrap_err();
        assert!(matches!(err, IoError::NegativeAnnotation { line: 2, .. }), "{err}");
    }

    #[test]
    fn unknown_kind_is_parse_error() {
        let text = log_text(
            r#"{"doc":"d","markable":5,"player":"bob","kind":"guess","polarity":1,"interpretation":{"type":"DN"}}"#,
        );
        let err = parse_judgments(text.as_bytes()).unwrap_err();
        assert!(matches!(err, IoError::Parse { line: 2, .. }), "{err}");
    }

    #[test]
    fn round_trip_preserves_order() {
        let log = vec![
            Judgment::annotation("d", 2, "p1", Interpretation::DiscourseNew),
            Judgment::annotation("d", 1, "p2", Interpretation::Expletive),
            Judgment::validation(
                "d",
                2,
                "p3",
                Interpretation::DiscourseNew,
                Polarity::Disagree,
            ),
        ];
        let bytes = serialize_judgments(&log);
        let reparsed = parse_judgments(&bytes).unwrap();
        assert_eq!(log, reparsed);
        assert_eq!(bytes, serialize_judgments(&reparsed));
    }
}
