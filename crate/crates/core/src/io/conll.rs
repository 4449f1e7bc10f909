//! CoNLL-style column export for external scorers, plus a strict re-parser
//! used to verify exports and to fuzz the bracket grammar.
//!
//! One token per line: document id, token index, form, coreference column.
//! Entity spans use `(e` / `e)` / `(e)` brackets; non-referring markables use
//! the `(e=EX)` / `(e=PR)` variants. Sentences are separated by blank lines.

use std::collections::BTreeMap;

use super::IoError;
use crate::model::{derive_clusters, Document, Interpretation, InterpretationClass, MarkableId};

/// A span reconstructed from the coreference column.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct ConllSpan {
    pub entity: u32,
    /// `Some(EX)` / `Some(PR)` for non-referring markables.
    pub subtype: Option<InterpretationClass>,
    pub start: usize,
    pub end: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConllDocument {
    pub id: String,
    pub tokens: Vec<String>,
    pub spans: Vec<ConllSpan>,
}

fn entity_tag(entity: u32, subtype: Option<InterpretationClass>) -> String {
    match subtype {
        Some(InterpretationClass::Expletive) => format!("{entity}=EX"),
        Some(InterpretationClass::Predicative) => format!("{entity}=PR"),
        _ => format!("{entity}"),
    }
}

/// Export one document with a total label map.
///
/// Entity numbers come from cluster derivation, ordered by smallest markable
/// id; non-referring markables are numbered after the clusters. Markables
/// with identical spans are emitted in id order.
pub fn export_conll(
    doc: &Document,
    labels: &BTreeMap<MarkableId, Interpretation>,
) -> Result<Vec<u8>, IoError> {
    let clusters = derive_clusters(doc, labels)?;
    let mut entity_of: BTreeMap<MarkableId, (u32, Option<InterpretationClass>)> = BTreeMap::new();
    let mut next = 1u32;
    for cluster in &clusters.clusters {
        for &m in cluster {
            entity_of.insert(m, (next, None));
        }
        next += 1;
    }
    for &m in &clusters.non_referring {
        let class = labels[&m].class();
        entity_of.insert(m, (next, Some(class)));
        next += 1;
    }

    #[derive(Default)]
    struct Cell {
        opens: Vec<(usize, MarkableId, String)>,
        singles: Vec<(MarkableId, String)>,
        closes: Vec<(usize, MarkableId, String)>,
    }
    let mut cells: Vec<Cell> = (0..doc.tokens.len()).map(|_| Cell::default()).collect();
    let mut sorted = doc.markables.clone();
    sorted.sort_by_key(|m| m.id);
    for m in &sorted {
        let (entity, subtype) = entity_of[&m.id];
        let tag = entity_tag(entity, subtype);
        if m.end == m.start + 1 {
            cells[m.start].singles.push((m.id, format!("({tag})")));
        } else {
            cells[m.start].opens.push((m.end, m.id, format!("({tag}")));
            cells[m.end - 1].closes.push((m.start, m.id, format!("{tag})")));
        }
    }

    let mut out = String::new();
    for (si, &(s, e)) in doc.sentence_bounds.iter().enumerate() {
        if si > 0 {
            out.push('\n');
        }
        for t in s..e {
            let cell = &mut cells[t];
            // Longer spans open first; closes close inner spans first.
            cell.opens.sort_by(|a, b| b.0.cmp(&a.0).then(a.1.cmp(&b.1)));
            cell.closes.sort_by(|a, b| b.0.cmp(&a.0).then(a.1.cmp(&b.1)));
            cell.singles.sort();
            let parts: Vec<&str> = cell
                .opens
                .iter()
                .map(|(_, _, s)| s.as_str())
                .chain(cell.singles.iter().map(|(_, s)| s.as_str()))
                .chain(cell.closes.iter().map(|(_, _, s)| s.as_str()))
                .collect();
            let coref = if parts.is_empty() {
                "-".to_string()
            } else {
                parts.join("|")
            };
            out.push_str(&format!("{}\t{}\t{}\t{}\n", doc.id, t, doc.tokens[t], coref));
        }
    }
    Ok(out.into_bytes())
}

fn parse_tag(s: &str) -> Result<(u32, Option<InterpretationClass>), IoError> {
    let (num, subtype) = if let Some(n) = s.strip_suffix("=EX") {
        (n, Some(InterpretationClass::Expletive))
    } else if let Some(n) = s.strip_suffix("=PR") {
        (n, Some(InterpretationClass::Predicative))
    } else {
        (s, None)
    };
    let entity: u32 = num
        .parse()
        .map_err(|_| IoError::Conll(format!("bad entity tag {s:?}")))?;
    Ok((entity, subtype))
}

/// Re-parse an exported column file. Strict: token indices must count up per
/// document, brackets must balance.
pub fn parse_conll(bytes: &[u8]) -> Result<Vec<ConllDocument>, IoError> {
    let text = super::utf8(bytes)?;
    let mut docs: Vec<ConllDocument> = Vec::new();
    // Open brackets per (doc, entity, subtype), LIFO.
    let mut open: BTreeMap<(String, u32, Option<InterpretationClass>), Vec<usize>> =
        BTreeMap::new();
    for (idx, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let lineno = idx + 1;
        let cols: Vec<&str> = line.split('\t').collect();
        if cols.len() != 4 {
            return Err(IoError::Conll(format!(
                "line {lineno}: expected 4 tab-separated columns, found {}",
                cols.len()
            )));
        }
        let (doc_id, index_str, form, coref) = (cols[0], cols[1], cols[2], cols[3]);
        let index: usize = index_str
            .parse()
            .map_err(|_| IoError::Conll(format!("line {lineno}: bad token index")))?;
        if docs.last().map(|d| d.id.as_str()) != Some(doc_id) {
            docs.push(ConllDocument {
                id: doc_id.to_string(),
                tokens: Vec::new(),
                spans: Vec::new(),
            });
        }
        let doc = docs.last_mut().unwrap();
        if index != doc.tokens.len() {
            return Err(IoError::Conll(format!(
                "line {lineno}: token index {index} out of sequence (expected {})",
                doc.tokens.len()
            )));
        }
        doc.tokens.push(form.to_string());
        if coref == "-" {
            continue;
        }
        for part in coref.split('|') {
            if part.is_empty() {
                return Err(IoError::Conll(format!("line {lineno}: empty coref entry")));
            }
            let opens = part.starts_with('(');
            let closes = part.ends_with(')');
            let tag = part
                .trim_start_matches('(')
                .trim_end_matches(')');
            if tag.is_empty() || (!opens && !closes) {
                return Err(IoError::Conll(format!(
                    "line {lineno}: malformed coref entry {part:?}"
                )));
            }
            let (entity, subtype) = parse_tag(tag)?;
            match (opens, closes) {
                (true, true) => doc.spans.push(ConllSpan {
                    entity,
                    subtype,
                    start: index,
                    end: index + 1,
                }),
                (true, false) => open
                    .entry((doc.id.clone(), entity, subtype))
                    .or_default()
                    .push(index),
                (false, true) => {
                    let start = open
                        .get_mut(&(doc.id.clone(), entity, subtype))
                        .and_then(|v| v.pop())
                        .ok_or_else(|| {
                            IoError::Conll(format!(
                                "line {lineno}: close without open for entity {entity}"
                            ))
                        })?;
                    doc.spans.push(ConllSpan {
                        entity,
                        subtype,
                        start,
                        end: index + 1,
                    });
                }
                (false, false) => unreachable!(),
            }
        }
    }
    if let Some(((doc, entity, _), _)) = open.iter().find(|(_, v)| !v.is_empty()) {
        return Err(IoError::Conll(format!(
            "document {doc}: unclosed bracket for entity {entity}"
        )));
    }
    for doc in &mut docs {
        doc.spans.sort();
    }
    Ok(docs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{Genre, Markable};

    fn doc() -> Document {
        Document {
            id: "d".into(),
            genre: Genre::Other,
            tokens: ["the", "king", "sighed", "it", "is", "late"]
                .iter()
                .map(|s| s.to_string())
                .collect(),
            sentence_bounds: vec![(0, 3), (3, 6)],
            markables: vec![
                Markable { id: 1, start: 0, end: 2, head: Some(1) },
                Markable { id: 2, start: 1, end: 2, head: Some(1) },
                Markable { id: 3, start: 3, end: 4, head: Some(3) },
            ],
        }
    }

    fn labels() -> BTreeMap<MarkableId, Interpretation> {
        BTreeMap::from([
            (1, Interpretation::DiscourseNew),
            (2, Interpretation::discourse_old([1])),
            (3, Interpretation::Expletive),
        ])
    }

    #[test]
    fn bracket_notation() {
        let bytes = export_conll(&doc(), &labels()).unwrap();
        let text = String::from_utf8(bytes).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        // Two-token markable opens on the first token and closes on the last;
        // the nested single-token markable sits inside.
        assert_eq!(lines[0], "d\t0\tthe\t(1");
        assert_eq!(lines[1], "d\t1\tking\t(1)|1)");
        assert_eq!(lines[2], "d\t2\tsighed\t-");
        assert_eq!(lines[3], "");
        assert_eq!(lines[4], "d\t3\tit\t(2=EX)");
    }

    #[test]
    fn non_blank_line_count_matches_tokens() {
        let bytes = export_conll(&doc(), &labels()).unwrap();
        let text = String::from_utf8(bytes).unwrap();
        let non_blank = text.lines().filter(|l| !l.trim().is_empty()).count();
        assert_eq!(non_blank, doc().tokens.len());
    }

    #[test]
    fn reparse_recovers_spans() {
        let bytes = export_conll(&doc(), &labels()).unwrap();
        let parsed = parse_conll(&bytes).unwrap();
        assert_eq!(parsed.len(), 1);
        assert_eq!(parsed[0].tokens.len(), 6);
        assert_eq!(
            parsed[0].spans,
            vec![
                ConllSpan { entity: 1, subtype: None, start: 0, end: 2 },
                ConllSpan { entity: 1, subtype: None, start: 1, end: 2 },
                ConllSpan {
                    entity: 2,
                    subtype: Some(InterpretationClass::Expletive),
                    start: 3,
                    end: 4
                },
            ]
        );
    }

    #[test]
    fn unmatched_close_is_error() {
        let err = parse_conll(b"d\t0\tx\t1)\n").unwrap_err();
        assert!(matches!(err, IoError::Conll(_)), "{err}");
    }

    #[test]
    fn unclosed_open_is_error() {
        let err = parse_conll(b"d\t0\tx\t(1\n").unwrap_err();
        assert!(matches!(err, IoError::Conll(_)), "{err}");
    }
}
