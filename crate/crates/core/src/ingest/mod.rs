//! Readers for the three input formats: extended CoNLL-U sentence
//! annotations, AMR corpora and word2vec text embeddings.

mod amr_corpus;
mod conllu;
mod embeddings;

pub use amr_corpus::{read_amr_corpus, write_amr_corpus, AmrEntry};
pub use conllu::{read_conllu, write_conllu, AnnotatedSentence, Token};
pub use embeddings::{embed, load_embeddings, EmbeddingTable};
