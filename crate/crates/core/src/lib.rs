//! Redundancy-based factoid question answering.
//!
//! Questions are rewritten into search queries, snippets are retrieved from
//! a local corpus or a web search API, and answers are mined from the
//! n-grams that recur across snippets. Alternative selection strategies and
//! an evaluation harness sit on top of the extraction pipeline.

pub mod corpora;
pub mod evaluate;
pub mod extract;
pub mod interpret;
pub mod lexicon;
pub mod retrieve;
pub mod select;

pub use corpora::{QuestionRecord, SnippetRecord, SnippetStore, TermStats};
pub use extract::{AnswerList, Candidate, Pipeline, Verdict};
pub use interpret::{Query, QueryKind};
pub use retrieve::{Backend, LocalBackend};

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error(transparent)]
    Corpus(#[from] corpora::CorpusError),
    #[error(transparent)]
    Interpret(#[from] interpret::InterpretError),
    #[error(transparent)]
    Retrieve(#[from] retrieve::RetrieveError),
    #[error(transparent)]
    Pipeline(#[from] extract::PipelineError),
    #[error(transparent)]
    Eval(#[from] evaluate::EvalError),
}
