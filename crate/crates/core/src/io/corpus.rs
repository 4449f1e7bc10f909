//! The corpus format: a header line followed by one JSON document record per
//! line, with optional gold labels.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use super::{check_header, header_line, utf8, IoError};
use crate::model::{derive_clusters, Document, Genre, Interpretation, MarkableId};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct GoldEntry {
    markable: MarkableId,
    interpretation: Interpretation,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct DocumentWire {
    id: String,
    genre: Genre,
    tokens: Vec<String>,
    sentence_bounds: Vec<(usize, usize)>,
    markables: Vec<crate::model::Markable>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    gold: Option<Vec<GoldEntry>>,
}

/// One corpus document plus its optional gold label map.
#[derive(Debug, Clone, PartialEq)]
pub struct DocumentRecord {
    pub document: Document,
    pub gold: Option<BTreeMap<MarkableId, Interpretation>>,
}

/// A parsed corpus: documents with unique ids, each structurally valid, and
/// gold labels (when present) total over the document's markables.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct CorpusFile {
    pub documents: Vec<DocumentRecord>,
}

impl CorpusFile {
    pub fn document(&self, id: &str) -> Option<&DocumentRecord> {
        self.documents.iter().find(|d| d.document.id == id)
    }

    pub fn doc_ids(&self) -> Vec<String> {
        self.documents.iter().map(|d| d.document.id.clone()).collect()
    }

    /// Verify unique ids, per-document invariants, and gold totality.
    pub fn validate(&self) -> Result<(), IoError> {
        let mut seen = BTreeSet::new();
        for rec in &self.documents {
            let doc = &rec.document;
            if !seen.insert(doc.id.clone()) {
                return Err(IoError::DuplicateDocument(doc.id.clone()));
            }
            doc.validate()?;
            if let Some(gold) = &rec.gold {
                validate_labels_for(doc, gold)?;
            }
        }
        Ok(())
    }
}

/// Check a total label map against a document: totality, known ids, and
/// strictly backward-pointing antecedents in document order.
pub(crate) fn validate_labels_for(
    doc: &Document,
    labels: &BTreeMap<MarkableId, Interpretation>,
) -> Result<(), IoError> {
    for m in &doc.markables {
        if !labels.contains_key(&m.id) {
            return Err(IoError::GoldIncomplete {
                doc: doc.id.clone(),
                markable: m.id,
            });
        }
    }
    for (&id, interpretation) in labels {
        validate_interpretation_refs(doc, id, interpretation)?;
    }
    Ok(())
}

/// Position of a markable in document order, for backwardness checks.
fn doc_order_key(doc: &Document, id: MarkableId) -> Option<(usize, usize, MarkableId)> {
    doc.markable(id).map(|m| (m.start, m.end, m.id))
}

pub(crate) fn validate_interpretation_refs(
    doc: &Document,
    markable: MarkableId,
    interpretation: &Interpretation,
) -> Result<(), IoError> {
    let Some(own) = doc_order_key(doc, markable) else {
        return Err(IoError::UnknownMarkable {
            doc: doc.id.clone(),
            markable,
        });
    };
    let mut check = |referenced: MarkableId| -> Result<(), IoError> {
        match doc_order_key(doc, referenced) {
            None => Err(IoError::UnknownMarkable {
                doc: doc.id.clone(),
                markable: referenced,
            }),
            Some(key) if key >= own => Err(IoError::ForwardAntecedent {
                doc: doc.id.clone(),
                markable,
                antecedent: referenced,
            }),
            Some(_) => Ok(()),
        }
    };
    match interpretation {
        Interpretation::DiscourseOld { antecedents } => {
            for &a in antecedents {
                check(a)?;
            }
        }
        Interpretation::Predicative { anchor: Some(a) } => check(*a)?,
        _ => {}
    }
    Ok(())
}

/// Parse a corpus file and verify every invariant.
pub fn parse_corpus(bytes: &[u8]) -> Result<CorpusFile, IoError> {
    let text = utf8(bytes)?;
    let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
    check_header(lines.next().map(|(_, l)| l), "corpus")?;
    let mut documents = Vec::new();
    for (idx, line) in lines {
        let wire: DocumentWire = serde_json::from_str(line).map_err(|e| IoError::Parse {
            line: idx + 1,
            message: e.to_string(),
        })?;
        let DocumentWire {
            id,
            genre,
            tokens,
            sentence_bounds,
            markables,
            gold,
        } = wire;
        let document = Document {
            id,
            genre,
            tokens,
            sentence_bounds,
            markables,
        };
        let gold = gold.map(|entries| {
            entries
                .into_iter()
                .map(|e| (e.markable, e.interpretation))
                .collect::<BTreeMap<_, _>>()
        });
        documents.push(DocumentRecord { document, gold });
    }
    let corpus = CorpusFile { documents };
    corpus.validate()?;
    Ok(corpus)
}

/// Canonical bytes: header, then documents in id order, markables in id
/// order, gold entries in markable order, compact JSON.
pub fn serialize_corpus(corpus: &CorpusFile) -> Vec<u8> {
    let mut records: Vec<&DocumentRecord> = corpus.documents.iter().collect();
    records.sort_by(|a, b| a.document.id.cmp(&b.document.id));
    let mut out = String::new();
    out.push_str(&header_line("corpus"));
    out.push('\n');
    for rec in records {
        let mut markables = rec.document.markables.clone();
        markables.sort_by_key(|m| m.id);
        let gold = rec.gold.as_ref().map(|g| {
            g.iter()
                .map(|(&markable, interpretation)| GoldEntry {
                    markable,
                    interpretation: interpretation.clone(),
                })
                .collect::<Vec<_>>()
        });
        let wire = DocumentWire {
            id: rec.document.id.clone(),
            genre: rec.document.genre,
            tokens: rec.document.tokens.clone(),
            sentence_bounds: rec.document.sentence_bounds.clone(),
            markables,
            gold,
        };
        out.push_str(&serde_json::to_string(&wire).expect("document serializes"));
        out.push('\n');
    }
    out.into_bytes()
}

/// Per-genre corpus statistics; non-singleton counts come from gold labels
/// where present.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct GenreStats {
    pub documents: u64,
    pub tokens: u64,
    pub markables: u64,
    pub non_singletons: u64,
    pub documents_with_gold: u64,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct CorpusStats {
    pub by_genre: BTreeMap<Genre, GenreStats>,
    pub total: GenreStats,
}

impl CorpusStats {
    /// Plain-text table: docs / tokens / markables, with non-singleton counts
    /// in parentheses when gold labels are available.
    pub fn render(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!(
            "{:<12} {:>6} {:>10} {:>22}\n",
            "genre", "docs", "tokens", "markables"
        ));
        let mut row = |name: &str, s: &GenreStats| {
            let markables = if s.documents_with_gold > 0 {
                format!("{} ({})", s.markables, s.non_singletons)
            } else {
                format!("{}", s.markables)
            };
            out.push_str(&format!(
                "{:<12} {:>6} {:>10} {:>22}\n",
                name, s.documents, s.tokens, markables
            ));
        };
        for genre in Genre::ALL {
            if let Some(s) = self.by_genre.get(&genre) {
                row(genre.name(), s);
            }
        }
        row("total", &self.total);
        out
    }
}

pub fn corpus_stats(corpus: &CorpusFile) -> CorpusStats {
    let mut stats = CorpusStats::default();
    for rec in &corpus.documents {
        let doc = &rec.document;
        let entry = stats.by_genre.entry(doc.genre).or_default();
        let mut add = |s: &mut GenreStats, non_singletons: u64, with_gold: u64| {
            s.documents += 1;
            s.tokens += doc.tokens.len() as u64;
            s.markables += doc.markables.len() as u64;
            s.non_singletons += non_singletons;
            s.documents_with_gold += with_gold;
        };
        let (ns, wg) = match &rec.gold {
            Some(gold) => {
                let clusters = derive_clusters(doc, gold).expect("validated corpus");
                let ns: u64 = clusters
                    .clusters
                    .iter()
                    .filter(|c| c.len() > 1)
                    .map(|c| c.len() as u64)
                    .sum();
                (ns, 1)
            }
            None => (0, 0),
        };
        add(entry, ns, wg);
        add(&mut stats.total, ns, wg);
    }
    stats
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::Markable;

    fn minimal_corpus_text() -> String {
        let mut s = String::from("{\"kind\":\"corpus\",\"version\":1}\n");
        s.push_str(
            r#"{"id":"doc1","genre":"other","tokens":["a","b","c"],"sentence_bounds":[[0,3]],"markables":[{"id":1,"start":0,"end":2,"head":1}]}"#,
        );
        s.push('\n');
        s
    }

    #[test]
    fn parses_minimal_document() {
        let corpus = parse_corpus(minimal_corpus_text().as_bytes()).unwrap();
        assert_eq!(corpus.documents.len(), 1);
        assert_eq!(corpus.documents[0].document.tokens.len(), 3);
        assert_eq!(corpus.documents[0].document.markables.len(), 1);
    }

    #[test]
    fn span_out_of_bounds_is_validation_error() {
        let mut s = String::from("{\"kind\":\"corpus\",\"version\":1}\n");
        s.push_str(
            r#"{"id":"doc1","genre":"other","tokens":["a"],"sentence_bounds":[[0,1]],"markables":[{"id":1,"start":0,"end":2,"head":null}]}"#,
        );
        let err = parse_corpus(s.as_bytes()).unwrap_err();
        assert!(matches!(err, IoError::Model(_)), "{err}");
    }

    #[test]
    fn missing_header_rejected() {
        let err = parse_corpus(b"{}\n").unwrap_err();
        assert!(matches!(err, IoError::BadHeader { .. }));
    }

    #[test]
    fn non_utf8_rejected() {
        let err = parse_corpus(&[0xff, 0xfe, 0x00]).unwrap_err();
        assert!(matches!(err, IoError::NotUtf8));
    }

    #[test]
    fn record_order_canonicalizes() {
        let doc = |id: &str| DocumentRecord {
            document: Document {
                id: id.into(),
                genre: Genre::Wikipedia,
                tokens: vec!["x".into()],
                sentence_bounds: vec![(0, 1)],
                markables: vec![],
            },
            gold: None,
        };
        let a = CorpusFile {
            documents: vec![doc("d1"), doc("d2")],
        };
        let b = CorpusFile {
            documents: vec![doc("d2"), doc("d1")],
        };
        assert_eq!(serialize_corpus(&a), serialize_corpus(&b));
    }

    #[test]
    fn round_trip_is_identity() {
        let corpus = parse_corpus(minimal_corpus_text().as_bytes()).unwrap();
        let bytes = serialize_corpus(&corpus);
        let reparsed = parse_corpus(&bytes).unwrap();
        assert_eq!(corpus, reparsed);
        assert_eq!(bytes, serialize_corpus(&reparsed));
    }

    #[test]
    fn forward_antecedent_rejected() {
        let mut s = String::from("{\"kind\":\"corpus\",\"version\":1}\n");
        s.push_str(concat!(
            r#"{"id":"d","genre":"other","tokens":["a","b"],"sentence_bounds":[[0,2]],"#,
            r#""markables":[{"id":1,"start":0,"end":1,"head":null},{"id":2,"start":1,"end":2,"head":null}],"#,
            r#""gold":[{"markable":1,"interpretation":{"type":"DO","antecedents":[2]}},{"markable":2,"interpretation":{"type":"DN"}}]}"#,
        ));
        let err = parse_corpus(s.as_bytes()).unwrap_err();
        assert!(matches!(err, IoError::ForwardAntecedent { .. }), "{err}");
    }

    /// Corpus shaped like the full release: 805 documents, 1,378,503 tokens,
    /// 383,558 markables across the three genres.
    #[test]
    fn release_shaped_stats() {
        let shape = [
            (Genre::Gutenberg, 206u64, 400_183u64, 110_412u64),
            (Genre::Wikipedia, 592, 970_037, 270_687),
            (Genre::Other, 7, 8_283, 2_459),
        ];
        let mut documents = Vec::new();
        for (genre, docs, tokens, markables) in shape {
            for i in 0..docs {
                let t = tokens / docs + if i < tokens % docs { 1 } else { 0 };
                let m = markables / docs + if i < markables % docs { 1 } else { 0 };
                let doc = Document {
                    id: format!("{}-{i}", genre.name()),
                    genre,
                    tokens: vec!["t".into(); t as usize],
                    sentence_bounds: vec![(0, t as usize)],
                    markables: (0..m)
                        .map(|k| Markable {
                            id: k as MarkableId + 1,
                            start: (k % t) as usize,
                            end: (k % t) as usize + 1,
                            head: None,
                        })
                        .collect(),
                };
                documents.push(DocumentRecord {
                    document: doc,
                    gold: None,
                });
            }
        }
        let stats = corpus_stats(&CorpusFile { documents });
        assert_eq!(stats.total.documents, 805);
        assert_eq!(stats.total.tokens, 1_378_503);
        assert_eq!(stats.total.markables, 383_558);
        assert_eq!(stats.by_genre[&Genre::Gutenberg].tokens, 400_183);
        assert_eq!(stats.by_genre[&Genre::Wikipedia].markables, 270_687);
    }
}
