//! File formats: corpus and judgment-log JSON streams, decoded-label files,
//! and the CoNLL-style column export.
//!
//! Serialization is canonical — fixed key order, id-ordered records, compact
//! JSON, one trailing newline per record — so equal values always produce
//! identical bytes. All readers reject non-UTF-8 input and report the line
//! of the first malformed record.

mod conll;
mod corpus;
mod judgments;
mod labels;

pub use conll::{export_conll, parse_conll, ConllDocument};
pub use corpus::{
    corpus_stats, parse_corpus, serialize_corpus, CorpusFile, CorpusStats, DocumentRecord,
    GenreStats,
};
pub use judgments::{parse_judgments, serialize_judgments, validate_log};
pub use labels::{parse_labels, serialize_labels, LabelMap};

use thiserror::Error;

use crate::model::{MarkableId, ModelError};

/// Format version written into every file header.
pub const FORMAT_VERSION: u32 = 1;

#[derive(Debug, Error)]
pub enum IoError {
    #[error("input is not valid UTF-8")]
    NotUtf8,
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("missing or invalid header: expected {{\"kind\":\"{expected}\",\"version\":{FORMAT_VERSION}}}")]
    BadHeader { expected: &'static str },
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error("duplicate document id {0}")]
    DuplicateDocument(String),
    #[error("document {doc}: gold label missing for markable {markable}")]
    GoldIncomplete { doc: String, markable: MarkableId },
    #[error("document {doc}: markable {markable}: antecedent {antecedent} does not precede it")]
    ForwardAntecedent {
        doc: String,
        markable: MarkableId,
        antecedent: MarkableId,
    },
    #[error("line {line}: annotation with polarity -1 (document {doc}, markable {markable})")]
    NegativeAnnotation {
        line: usize,
        doc: String,
        markable: MarkableId,
    },
    #[error("judgment references unknown document {0}")]
    UnknownDocument(String),
    #[error("document {doc}: judgment references unknown markable {markable}")]
    UnknownMarkable { doc: String, markable: MarkableId },
    #[error("conll: {0}")]
    Conll(String),
}

pub(crate) fn utf8(bytes: &[u8]) -> Result<&str, IoError> {
    std::str::from_utf8(bytes).map_err(|_| IoError::NotUtf8)
}

#[derive(Debug, serde::Serialize, serde::Deserialize, PartialEq)]
pub(crate) struct Header<'a> {
    pub kind: &'a str,
    pub version: u32,
}

/// Parse the mandatory header line of a record stream.
pub(crate) fn check_header(line: Option<&str>, expected: &'static str) -> Result<(), IoError> {
    let Some(line) = line else {
        return Err(IoError::BadHeader { expected });
    };
    let header: Header = serde_json::from_str(line).map_err(|_| IoError::BadHeader { expected })?;
    if header.kind != expected || header.version != FORMAT_VERSION {
        return Err(IoError::BadHeader { expected });
    }
    Ok(())
}

pub(crate) fn header_line(kind: &str) -> String {
    serde_json::to_string(&Header {
        kind,
        version: FORMAT_VERSION,
    })
    .expect("header serializes")
}
