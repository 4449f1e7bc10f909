//! Toolkit for turning noisy crowd judgments of anaphoric reference into
//! reliable silver labels.
//!
//! The crate covers the whole batch path:
//!
//! - [`model`]: documents, markables, interpretations, judgments and the
//!   cluster derivation shared by every other module.
//! - [`io`]: the corpus / judgment-log / label / CoNLL file formats, with
//!   canonical (byte-stable) serialization.
//! - [`aggregation`]: the mention-pair aggregation model — EM over binarized
//!   coreference judgments with per-annotator, per-class sensitivity and
//!   specificity.
//! - [`resolver`]: a deterministic sieve plus a trainable feature-based
//!   mention-pair scorer that acts as one more annotator covering every
//!   markable.
//! - [`pipeline`]: the iterative resolve-and-aggregate loop with plateau
//!   detection and per-iteration diagnostics.
//! - [`scoring`]: MUC, B³, CEAF-e, the CoNLL average and non-referring F1 in
//!   singleton-included and -excluded modes.
//! - [`sim`]: a seeded generator of planted-truth corpora and simulated
//!   players, so the pipeline's claims can be checked end to end.

pub mod aggregation;
pub mod io;
pub mod model;
pub mod pipeline;
pub mod resolver;
pub mod rng;
pub mod scoring;
pub mod sim;

pub use model::{
    derive_clusters, interpretation_class, is_complete, ClusterSet, CompletionPolicy, Document,
    Genre, Interpretation, InterpretationClass, Judgment, JudgmentKind, Markable, MarkableId,
    Polarity,
};
