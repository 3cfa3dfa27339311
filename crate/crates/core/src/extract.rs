//! Redundancy-based answer extraction.
//!
//! Every 1- to 4-word n-gram of every retrieved snippet becomes a candidate
//! occurrence carrying the weight of the query that found the snippet.
//! Occurrences are then voted, filtered, combined, IDF-scored, reranked and
//! finally gated on snippet support:
//!
//! ```text
//! ngrams -> vote -> type-neutral -> type-specific -> closed-class
//!        -> combine -> score -> rerank -> support gate
//! ```
//!
//! Punctuation splits a snippet into segments; n-grams never cross a
//! segment boundary.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::path::Path;
use std::sync::LazyLock;

use serde::{Deserialize, Serialize};

use crate::corpora::TermStats;
use crate::interpret::{Analyzer, InterpretError, Query, QueryGenerator, QueryKind, Token};
use crate::lexicon;
use crate::retrieve::{retrieve_all, Backend, RetrieveError, RetrievedPassage, DEFAULT_MAX_SNIPPETS};

const DEFAULT_CLOSED_CLASS: &str = include_str!("../data/closed_class.txt");

#[derive(Debug, thiserror::Error)]
pub enum PipelineError {
    #[error(transparent)]
    Interpret(#[from] InterpretError),
    #[error(transparent)]
    Retrieve(#[from] RetrieveError),
}

/// One n-gram occurrence in one snippet.
#[derive(Debug, Clone, PartialEq)]
pub struct Occurrence {
    pub terms: Vec<String>,
    /// Every word of the occurrence starts with an uppercase letter.
    pub capitalized: bool,
    pub score: f64,
    pub snippet: usize,
    pub kind: QueryKind,
}

/// A voted answer candidate. `support` holds indices into the passage list
/// the candidate was extracted from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Candidate {
    pub terms: Vec<String>,
    pub surface: String,
    pub score: f64,
    pub support: BTreeSet<usize>,
    pub origins: BTreeSet<QueryKind>,
    pub occurrences: usize,
    /// Occurrences written with every word capitalized.
    pub capitalized: usize,
    /// Set by reranking when the candidate matches the question class's
    /// preferred answer form.
    #[serde(default)]
    pub promoted: bool,
}

impl Candidate {
    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Verdict {
    Answered,
    DontKnow,
}

/// Final ranked answers. Promoted candidates come first; scores are
/// non-increasing within the promoted and the unpromoted tier.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnswerList {
    pub ranked: Vec<Candidate>,
    pub verdict: Verdict,
}

impl AnswerList {
    pub fn dont_know() -> Self {
        AnswerList {
            ranked: Vec::new(),
            verdict: Verdict::DontKnow,
        }
    }

    pub fn surfaces(&self) -> Vec<String> {
        self.ranked.iter().map(|c| c.surface.clone()).collect()
    }
}

/// Question classes that drive the type-specific filter and reranking.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum QuestionClass {
    Who,
    When,
    Where,
    What,
    Which,
    HowMany,
    HowOld,
    HowLong,
    HowHot,
    HowOther,
    Name,
    Other,
}

impl QuestionClass {
    pub fn of(tokens: &[Token]) -> Self {
        let words: Vec<&str> = tokens
            .iter()
            .filter(|t| t.is_word())
            .map(|t| t.normalized.as_str())
            .collect();
        let asks_year = words
            .windows(2)
            .any(|w| matches!(w[0], "what" | "which") && w[1] == "year");
        if asks_year {
            return QuestionClass::When;
        }
        match words.first().copied() {
            Some("who" | "whom" | "whose") => QuestionClass::Who,
            Some("when") => QuestionClass::When,
            Some("where") => QuestionClass::Where,
            Some("what") => QuestionClass::What,
            Some("which") => QuestionClass::Which,
            Some("name") => QuestionClass::Name,
            Some("how") => match words.get(1).copied() {
                Some("many" | "much") => QuestionClass::HowMany,
                Some("old") => QuestionClass::HowOld,
                Some("long") => QuestionClass::HowLong,
                Some("hot") => QuestionClass::HowHot,
                _ => QuestionClass::HowOther,
            },
            _ => QuestionClass::Other,
        }
    }

    /// Answers must carry a digit or a written number.
    pub fn requires_number(self) -> bool {
        matches!(
            self,
            QuestionClass::HowOld
                | QuestionClass::HowLong
                | QuestionClass::HowHot
                | QuestionClass::HowMany
                | QuestionClass::When
        )
    }

    /// Question focus words (units, "years old") tend to appear inside the
    /// answer, so candidates may repeat question words.
    pub fn expects_focus_words(self) -> bool {
        matches!(
            self,
            QuestionClass::HowMany | QuestionClass::HowOld | QuestionClass::HowLong | QuestionClass::HowHot
        )
    }
}

/// Closed answer sets keyed by answer type, with the question phrases that
/// select each type.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ClosedClassTable {
    types: Vec<ClosedClass>,
}

#[derive(Debug, Clone, PartialEq)]
struct ClosedClass {
    name: String,
    triggers: Vec<Vec<String>>,
    values: BTreeSet<String>,
}

fn normalize_phrase(text: &str) -> String {
    Analyzer::shared().words(text).join(" ")
}

static DEFAULT_CLOSED_CLASS_TABLE: LazyLock<ClosedClassTable> = LazyLock::new(|| {
    ClosedClassTable::parse(DEFAULT_CLOSED_CLASS).expect("bundled closed-class table parses")
});

impl ClosedClassTable {
    pub fn bundled() -> Self {
        DEFAULT_CLOSED_CLASS_TABLE.clone()
    }

    /// Section format:
    ///
    /// ```text
    /// [nationality]
    /// trigger = what nationality | nationality of
    /// irish
    /// american
    /// ```
    pub fn parse(text: &str) -> Result<Self, String> {
        let mut types: Vec<ClosedClass> = Vec::new();
        for (idx, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            if let Some(name) = line.strip_prefix('[').and_then(|l| l.strip_suffix(']')) {
                types.push(ClosedClass {
                    name: name.trim().to_string(),
                    triggers: Vec::new(),
                    values: BTreeSet::new(),
                });
                continue;
            }
            let current = types
                .last_mut()
                .ok_or_else(|| format!("line {}: value before any [type] header", idx + 1))?;
            if let Some(triggers) = line.strip_prefix("trigger") {
                let triggers = triggers
                    .trim_start()
                    .strip_prefix('=')
                    .ok_or_else(|| format!("line {}: expected `trigger = ...`", idx + 1))?;
                for t in triggers.split('|') {
                    let words = Analyzer::shared().words(t);
                    if !words.is_empty() {
                        current.triggers.push(words);
                    }
                }
            } else {
                let value = normalize_phrase(line);
                if !value.is_empty() {
                    current.values.insert(value);
                }
            }
        }
        if let Some(empty) = types.iter().find(|t| t.values.is_empty()) {
            return Err(format!("answer type `{}` has no values", empty.name));
        }
        Ok(ClosedClassTable { types })
    }

    pub fn load(path: &Path) -> Result<Self, String> {
        let text = std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
        Self::parse(&text)
    }

    pub fn type_names(&self) -> impl Iterator<Item = &str> {
        self.types.iter().map(|t| t.name.as_str())
    }

    /// First answer type (in file order) with a trigger phrase occurring in
    /// the question.
    pub fn detect(&self, question_words: &[String]) -> Option<&str> {
        self.types
            .iter()
            .find(|t| {
                t.triggers.iter().any(|trig| {
                    question_words.len() >= trig.len()
                        && question_words.windows(trig.len()).any(|w| w == trig.as_slice())
                })
            })
            .map(|t| t.name.as_str())
    }

    pub fn has_type(&self, answer_type: &str) -> bool {
        self.types.iter().any(|t| t.name == answer_type)
    }

    /// `None` when the type is not in the table.
    pub fn admits(&self, answer_type: &str, surface: &str) -> Option<bool> {
        self.types
            .iter()
            .find(|t| t.name == answer_type)
            .map(|t| t.values.contains(&normalize_phrase(surface)))
    }
}

/// Everything the filters and reranker need to know about the question.
#[derive(Debug, Clone)]
pub struct QuestionContext {
    pub tokens: Vec<Token>,
    pub class: QuestionClass,
    pub answer_type: Option<String>,
    pub content_words: BTreeSet<String>,
}

impl QuestionContext {
    pub fn new(tokens: Vec<Token>, closed: &ClosedClassTable) -> Self {
        let words: Vec<String> = tokens
            .iter()
            .filter(|t| t.is_word())
            .map(|t| t.normalized.clone())
            .collect();
        let content_words = tokens
            .iter()
            .filter(|t| t.is_word() && !t.is_stopword)
            .map(|t| t.normalized.clone())
            .collect();
        QuestionContext {
            class: QuestionClass::of(&tokens),
            answer_type: closed.detect(&words).map(str::to_string),
            content_words,
            tokens,
        }
    }
}

pub fn generate_ngrams(passages: &[RetrievedPassage], analyzer: &Analyzer, max_n: usize) -> Vec<Occurrence> {
    let mut out = Vec::new();
    for (idx, p) in passages.iter().enumerate() {
        let Ok(tokens) = analyzer.tokenize(&p.snippet.text) else {
            continue;
        };
        for segment in tokens.split(|t| !t.is_word()) {
            for start in 0..segment.len() {
                for n in 1..=max_n.min(segment.len() - start) {
                    let gram = &segment[start..start + n];
                    out.push(Occurrence {
                        terms: gram.iter().map(|t| t.normalized.clone()).collect(),
                        capitalized: gram.iter().all(Token::is_capitalized),
                        score: p.weight,
                        snippet: idx,
                        kind: p.query.kind,
                    });
                }
            }
        }
    }
    out
}

/// Sums occurrence scores per distinct n-gram. Output is ordered by surface.
pub fn vote(occurrences: &[Occurrence]) -> Vec<Candidate> {
    let mut by_surface: BTreeMap<String, Candidate> = BTreeMap::new();
    for occ in occurrences {
        let surface = occ.terms.join(" ");
        let c = by_surface.entry(surface.clone()).or_insert_with(|| Candidate {
            terms: occ.terms.clone(),
            surface,
            score: 0.0,
            support: BTreeSet::new(),
            origins: BTreeSet::new(),
            occurrences: 0,
            capitalized: 0,
            promoted: false,
        });
        c.score += occ.score;
        c.support.insert(occ.snippet);
        c.origins.insert(occ.kind);
        c.occurrences += 1;
        if occ.capitalized {
            c.capitalized += 1;
        }
    }
    by_surface.into_values().collect()
}

/// Drops candidates that start or end with a stopword, and (unless the
/// question class expects focus words in answers) candidates that repeat a
/// content word of the question.
pub fn filter_type_neutral(candidates: Vec<Candidate>, ctx: &QuestionContext, analyzer: &Analyzer) -> Vec<Candidate> {
    candidates
        .into_iter()
        .filter(|c| {
            let (Some(first), Some(last)) = (c.terms.first(), c.terms.last()) else {
                return false;
            };
            if analyzer.is_stopword(first) || analyzer.is_stopword(last) {
                return false;
            }
            ctx.class.expects_focus_words() || !c.terms.iter().any(|t| ctx.content_words.contains(t))
        })
        .collect()
}

pub fn has_numeric_component(terms: &[String]) -> bool {
    terms
        .iter()
        .any(|t| t.chars().any(|c| c.is_ascii_digit()) || lexicon::is_written_number(t))
}

/// Numeric question classes keep only candidates with a numeric component.
pub fn filter_type_specific(candidates: Vec<Candidate>, class: QuestionClass) -> Vec<Candidate> {
    if !class.requires_number() {
        return candidates;
    }
    candidates
        .into_iter()
        .filter(|c| has_numeric_component(&c.terms))
        .collect()
}

/// Keeps only admissible values when the answer type has a closed set.
pub fn filter_closed_class(
    candidates: Vec<Candidate>,
    answer_type: Option<&str>,
    table: &ClosedClassTable,
) -> Vec<Candidate> {
    match answer_type {
        Some(t) if table.has_type(t) => candidates
            .into_iter()
            .filter(|c| table.admits(t, &c.surface) == Some(true))
            .collect(),
        _ => candidates,
    }
}

/// Adds the voted score of each component unigram to multi-word candidates.
/// Unigrams that did not survive filtering contribute nothing.
pub fn combine(candidates: Vec<Candidate>) -> Vec<Candidate> {
    let unigrams: HashMap<String, f64> = candidates
        .iter()
        .filter(|c| c.terms.len() == 1)
        .map(|c| (c.terms[0].clone(), c.score))
        .collect();
    candidates
        .into_iter()
        .map(|mut c| {
            if c.terms.len() >= 2 {
                let boost: f64 = c.terms.iter().map(|t| unigrams.get(t).copied().unwrap_or(0.0)).sum();
                c.score += boost;
            }
            c
        })
        .collect()
}

/// `score * (1/|c|) * Σ ln(N / W_cnt(w))` over the distinct terms of the
/// candidate, summed in lexicographic term order.
pub fn score_idf(candidate: &Candidate, stats: &TermStats) -> f64 {
    let distinct: BTreeSet<&str> = candidate.terms.iter().map(String::as_str).collect();
    if distinct.is_empty() {
        return 0.0;
    }
    let n = stats.total_docs() as f64;
    let sum: f64 = distinct
        .iter()
        .map(|w| (n / stats.doc_freq(w) as f64).ln())
        .sum();
    candidate.score * (1.0 / distinct.len() as f64) * sum
}

pub fn score_all(candidates: Vec<Candidate>, stats: &TermStats) -> Vec<Candidate> {
    candidates
        .into_iter()
        .map(|mut c| {
            c.score = score_idf(&c, stats);
            c
        })
        .collect()
}

fn is_year(term: &str) -> bool {
    term.len() == 4 && term.parse::<u32>().is_ok_and(|y| (1000..=2099).contains(&y))
}

/// Preferred answer form for a question class, if it has one.
pub fn matches_preferred_form(c: &Candidate, class: QuestionClass) -> bool {
    match class {
        QuestionClass::When => c.terms.iter().any(|t| is_year(t)),
        QuestionClass::Who | QuestionClass::Where => {
            c.capitalized * 2 > c.occurrences && c.terms.iter().all(|t| t.chars().all(char::is_alphabetic))
        }
        QuestionClass::HowMany | QuestionClass::HowOld | QuestionClass::HowLong | QuestionClass::HowHot => c
            .terms
            .first()
            .is_some_and(|t| t.chars().any(|ch| ch.is_ascii_digit()) || lexicon::is_written_number(t)),
        _ => false,
    }
}

/// Score order with ties broken by surface.
pub fn rank_by_score(candidates: &mut [Candidate]) {
    candidates.sort_by(|a, b| b.score.total_cmp(&a.score).then_with(|| a.surface.cmp(&b.surface)));
}

/// Orders by score, then moves candidates in the class's preferred form
/// ahead of the rest, keeping relative order within each group.
pub fn rerank(mut candidates: Vec<Candidate>, class: QuestionClass) -> Vec<Candidate> {
    rank_by_score(&mut candidates);
    for c in &mut candidates {
        c.promoted = matches_preferred_form(c, class);
    }
    let (mut promoted, rest): (Vec<_>, Vec<_>) = candidates.into_iter().partition(|c| c.promoted);
    promoted.extend(rest);
    promoted
}

/// Keeps candidates found in at least `min_support` distinct snippets.
pub fn support_gate(candidates: Vec<Candidate>, min_support: usize) -> AnswerList {
    let ranked: Vec<Candidate> = candidates
        .into_iter()
        .filter(|c| c.support.len() >= min_support)
        .collect();
    if ranked.is_empty() {
        AnswerList::dont_know()
    } else {
        AnswerList {
            ranked,
            verdict: Verdict::Answered,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExtractConfig {
    pub ngram_max: usize,
    pub support_min: usize,
    pub max_snippets: usize,
}

impl Default for ExtractConfig {
    fn default() -> Self {
        ExtractConfig {
            ngram_max: 4,
            support_min: 2,
            max_snippets: DEFAULT_MAX_SNIPPETS,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Stage {
    Ngrams,
    Vote,
    TypeNeutral,
    TypeSpecific,
    ClosedClass,
    Combine,
    Score,
    Rerank,
    SupportGate,
}

impl Stage {
    pub fn name(self) -> &'static str {
        match self {
            Stage::Ngrams => "ngrams",
            Stage::Vote => "vote",
            Stage::TypeNeutral => "filter/type-neutral",
            Stage::TypeSpecific => "filter/type-specific",
            Stage::ClosedClass => "filter/closed-class",
            Stage::Combine => "combine",
            Stage::Score => "score",
            Stage::Rerank => "rerank",
            Stage::SupportGate => "support-gate",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StageSnapshot {
    pub stage: Stage,
    /// Occurrences for the n-gram stage, candidates afterwards.
    pub count: usize,
    pub candidates: Vec<Candidate>,
}

/// Everything a single question went through.
#[derive(Debug, Clone)]
pub struct Trace {
    pub question: String,
    pub class: QuestionClass,
    pub answer_type: Option<String>,
    pub queries: Vec<Query>,
    pub passages: Vec<RetrievedPassage>,
    pub stages: Vec<StageSnapshot>,
    pub answers: AnswerList,
}

impl Trace {
    pub fn stage(&self, stage: Stage) -> Option<&StageSnapshot> {
        self.stages.iter().find(|s| s.stage == stage)
    }

    /// Scored candidates handed to answer selection.
    pub fn extracted(&self) -> &[Candidate] {
        self.stage(Stage::Score).map(|s| s.candidates.as_slice()).unwrap_or(&[])
    }
}

/// The assembled extraction pipeline with its read-only resources.
#[derive(Debug, Clone)]
pub struct Pipeline {
    pub queries: QueryGenerator,
    pub closed_class: ClosedClassTable,
    pub stats: TermStats,
    pub config: ExtractConfig,
}

impl Pipeline {
    pub fn new(stats: TermStats) -> Self {
        Pipeline {
            queries: QueryGenerator::default(),
            closed_class: ClosedClassTable::bundled(),
            stats,
            config: ExtractConfig::default(),
        }
    }

    pub fn analyzer(&self) -> &Analyzer {
        &self.queries.analyzer
    }

    pub fn context(&self, question: &str) -> Result<QuestionContext, InterpretError> {
        let tokens = self.queries.analyzer.tokenize(question)?;
        Ok(QuestionContext::new(tokens, &self.closed_class))
    }

    pub fn answer<B: Backend + ?Sized>(&self, question: &str, backend: &B) -> Result<AnswerList, PipelineError> {
        Ok(self.trace(question, backend)?.answers)
    }

    pub fn trace<B: Backend + ?Sized>(&self, question: &str, backend: &B) -> Result<Trace, PipelineError> {
        let ctx = self.context(question)?;
        let queries = self.queries.generate_from_tokens(&ctx.tokens);
        let passages = retrieve_all(&queries, backend, self.config.max_snippets)?;
        Ok(self.trace_passages(question, ctx, queries, passages))
    }

    /// Runs extraction over already retrieved passages.
    pub fn trace_passages(
        &self,
        question: &str,
        ctx: QuestionContext,
        queries: Vec<Query>,
        passages: Vec<RetrievedPassage>,
    ) -> Trace {
        let analyzer = &self.queries.analyzer;
        let mut stages = Vec::with_capacity(9);
        let mut snap = |stage: Stage, cands: &[Candidate]| {
            stages.push(StageSnapshot {
                stage,
                count: cands.len(),
                candidates: cands.to_vec(),
            });
        };

        let occurrences = generate_ngrams(&passages, analyzer, self.config.ngram_max);
        let voted = vote(&occurrences);
        let neutral = filter_type_neutral(voted.clone(), &ctx, analyzer);
        let specific = filter_type_specific(neutral.clone(), ctx.class);
        let closed = filter_closed_class(specific.clone(), ctx.answer_type.as_deref(), &self.closed_class);
        let combined = combine(closed.clone());
        let mut scored = score_all(combined.clone(), &self.stats);
        rank_by_score(&mut scored);
        let reranked = rerank(scored.clone(), ctx.class);
        let answers = support_gate(reranked.clone(), self.config.support_min);

        snap(Stage::Ngrams, &[]);
        snap(Stage::Vote, &voted);
        snap(Stage::TypeNeutral, &neutral);
        snap(Stage::TypeSpecific, &specific);
        snap(Stage::ClosedClass, &closed);
        snap(Stage::Combine, &combined);
        snap(Stage::Score, &scored);
        snap(Stage::Rerank, &reranked);
        snap(Stage::SupportGate, &answers.ranked);
        stages[0].count = occurrences.len();

        Trace {
            question: question.to_string(),
            class: ctx.class,
            answer_type: ctx.answer_type,
            queries,
            passages,
            stages,
            answers,
        }
    }
}
