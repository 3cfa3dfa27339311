//! Random micro-corpora for comparing the staged pipeline with the naive
//! oracle.

use qa_core::corpora::{SnippetRecord, TermStats};
use qa_core::extract::{ClosedClassTable, Pipeline};
use qa_core::interpret::{Query, QueryKind};
use qa_core::retrieve::RetrievedPassage;
use rand::seq::SliceRandom;
use rand::Rng;

use super::naive::naive_answer;

const QUESTIONS: &[&str] = &[
    "Who wrote Hamlet?",
    "When did the war end?",
    "Where is the Grand Canyon?",
    "What is the capital of France?",
    "How many moons does Mars have?",
    "How old is the oak tree?",
    "Which river flows through Cairo?",
    "Name a famous painter.",
];

const WORDS: &[&str] = &[
    "Paris", "paris", "Shakespeare", "wrote", "Hamlet", "the", "of", "in", "is", "1945", "two", "2", "moons",
    "Mars", "Arizona", "Nile", "Cairo", "France", "Rome", "river", "years", "old", "300", "war", "ended",
    "William", "Canyon", "a", "and", "Picasso", "famous", "oak", "Berlin",
];

const PUNCT: &[&str] = &[",", ".", ";", "?"];

pub struct MicroCase {
    pub question: String,
    pub passages: Vec<(String, f64)>,
    pub stats: TermStats,
}

pub fn random_case<R: Rng>(rng: &mut R) -> MicroCase {
    let question = QUESTIONS.choose(rng).unwrap().to_string();
    let n_snippets = rng.gen_range(1..=5);
    let mut passages = Vec::new();
    for _ in 0..n_snippets {
        let len = rng.gen_range(1..=8);
        let mut text = String::new();
        for i in 0..len {
            let tok = if i > 0 && rng.gen_bool(0.15) {
                *PUNCT.choose(rng).unwrap()
            } else {
                *WORDS.choose(rng).unwrap()
            };
            if i > 0 && !PUNCT.contains(&tok) {
                text.push(' ');
            }
            text.push_str(tok);
        }
        if !text.chars().any(char::is_alphanumeric) {
            text.push_str(" Paris");
        }
        let weight = *[1.0, 1.0, 2.0, 5.0, 0.5].choose(rng).unwrap();
        passages.push((text, weight));
    }
    let mut docs: Vec<String> = passages.iter().map(|(t, _)| t.clone()).collect();
    for _ in 0..rng.gen_range(1..20) {
        let k = rng.gen_range(1..6);
        docs.push(WORDS.choose_multiple(rng, k).cloned().collect::<Vec<_>>().join(" "));
    }
    MicroCase {
        question,
        passages,
        stats: TermStats::build(&docs).unwrap(),
    }
}

pub fn retrieved(passages: &[(String, f64)]) -> Vec<RetrievedPassage> {
    passages
        .iter()
        .enumerate()
        .map(|(i, (text, weight))| {
            let query = Query {
                kind: if *weight > 1.0 { QueryKind::Exact } else { QueryKind::Keyword },
                terms: vec!["q".into()],
                slot: None,
                weight: *weight,
            };
            RetrievedPassage {
                snippet: SnippetRecord {
                    question_id: None,
                    url: format!("http://example.org/{i}"),
                    title: String::new(),
                    text: text.clone(),
                    rank: i as u32 + 1,
                    source_tag: "test".into(),
                },
                query: query.clone(),
                origins: vec![query],
                retrieval_rank: i + 1,
                weight: *weight,
            }
        })
        .collect()
}

/// Runs both implementations and reports the first disagreement.
pub fn check_case(case: &MicroCase) -> Result<bool, String> {
    let pipeline = Pipeline::new(case.stats.clone());
    let ctx = pipeline.context(&case.question).map_err(|e| e.to_string())?;
    let trace = pipeline.trace_passages(&case.question, ctx, Vec::new(), retrieved(&case.passages));
    let expected = naive_answer(&case.question, &case.passages, &case.stats, &ClosedClassTable::bundled());
    let got: Vec<(String, f64)> = trace.answers.ranked.iter().map(|c| (c.surface.clone(), c.score)).collect();
    if got != expected.ranked {
        return Err(format!(
            "{:?} over {:?}\n pipeline {:?}\n naive    {:?}",
            case.question, case.passages, got, expected.ranked
        ));
    }
    let dont_know = trace.answers.verdict == qa_core::Verdict::DontKnow;
    if dont_know != expected.dont_know {
        return Err(format!("verdict differs for {:?}", case.passages));
    }
    Ok(dont_know)
}
