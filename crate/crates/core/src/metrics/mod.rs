//! Evaluation metrics: SMATCH over AMR triples, dependency-pair F1 and
//! classifier F1-macro.

mod scores;
mod smatch;

pub use scores::{confusion_matrix, f1_macro, pair_f1, PairScore, Prf};
pub use smatch::{
    corpus_smatch, smatch, smatch_alignment, smatch_oracle, CorpusSmatch, SentenceSmatch,
    SmatchScore, VariableMapping, DEFAULT_RESTARTS, ORACLE_MAX_VARIABLES,
};
