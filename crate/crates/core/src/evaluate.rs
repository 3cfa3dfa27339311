//! Judging answers against gold sets, run metrics, intrinsic passage and
//! stage statistics, multi-run averaging and report rendering.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;
use std::str::FromStr;

use num_rational::Ratio;
use regex::Regex;
use serde::{Deserialize, Serialize};

use crate::corpora::{QuestionRecord, QuestionWord};
use crate::extract::{AnswerList, Verdict};
use crate::interpret::Analyzer;

#[derive(Debug, thiserror::Error)]
pub enum EvalError {
    #[error("question `{question_id}`: final answer is correct but no extracted candidate matches gold")]
    Consistency { question_id: String },
    #[error("invalid bucket edges: {0}")]
    Buckets(String),
    #[error("pattern file line {line}: {message}")]
    Pattern { line: usize, message: String },
    #[error("report line {line}: {message}")]
    Report { line: usize, message: String },
    #[error("{}: {source}", path.display())]
    Io {
        path: std::path::PathBuf,
        #[source]
        source: std::io::Error,
    },
}

/// How an answer string is compared with a gold string.
#[derive(Debug, Clone, Default)]
pub enum JudgePolicy {
    /// Normalized forms are equal.
    Exact,
    /// Normalized forms are equal, or one occurs in the other on word
    /// boundaries.
    #[default]
    WordBoundary,
    /// Per-question regular expressions; questions without patterns fall back
    /// to word-boundary matching.
    Patterns(BTreeMap<String, Vec<Regex>>),
}

impl JudgePolicy {
    /// Parses a pattern file of `<question-id> <regex>` lines. Blank lines and
    /// `#` comments are skipped.
    pub fn parse_patterns(text: &str) -> Result<Self, EvalError> {
        let mut map: BTreeMap<String, Vec<Regex>> = BTreeMap::new();
        for (i, line) in text.lines().enumerate() {
            let t = line.trim();
            if t.is_empty() || t.starts_with('#') {
                continue;
            }
            let err = |message: String| EvalError::Pattern { line: i + 1, message };
            let (qid, pattern) = t
                .split_once(char::is_whitespace)
                .ok_or_else(|| err("expected `<question-id> <regex>`".into()))?;
            let re = Regex::new(pattern.trim()).map_err(|e| err(e.to_string()))?;
            map.entry(qid.to_string()).or_default().push(re);
        }
        Ok(JudgePolicy::Patterns(map))
    }

    pub fn load_patterns(path: &Path) -> Result<Self, EvalError> {
        let text = std::fs::read_to_string(path).map_err(|source| EvalError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        Self::parse_patterns(&text)
    }

    pub fn name(&self) -> &'static str {
        match self {
            JudgePolicy::Exact => "exact",
            JudgePolicy::WordBoundary => "word-boundary",
            JudgePolicy::Patterns(_) => "patterns",
        }
    }

    /// Whether `text` counts as a correct answer for the question.
    pub fn matches(&self, question_id: &str, text: &str, gold: &[String]) -> bool {
        match self {
            JudgePolicy::Patterns(map) => match map.get(question_id) {
                Some(res) => res.iter().any(|re| re.is_match(text)),
                None => gold.iter().any(|g| word_boundary_match(text, g)),
            },
            JudgePolicy::Exact => {
                let a = normalize_answer(text);
                !a.is_empty() && gold.iter().any(|g| normalize_answer(g) == a)
            }
            JudgePolicy::WordBoundary => gold.iter().any(|g| word_boundary_match(text, g)),
        }
    }
}

impl FromStr for JudgePolicy {
    type Err = String;

    /// `exact`, `word-boundary`, or `patterns:<file>`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "exact" => Ok(JudgePolicy::Exact),
            "word-boundary" => Ok(JudgePolicy::WordBoundary),
            _ => match s.strip_prefix("patterns:") {
                Some(path) => JudgePolicy::load_patterns(Path::new(path)).map_err(|e| e.to_string()),
                None => Err(format!(
                    "unknown judge policy `{s}` (exact | word-boundary | patterns:<file>)"
                )),
            },
        }
    }
}

/// Lowercased word tokens joined by single spaces.
pub fn normalize_answer(text: &str) -> String {
    Analyzer::shared().words(text).join(" ")
}

fn word_boundary_match(answer: &str, gold: &str) -> bool {
    let a = normalize_answer(answer);
    let g = normalize_answer(gold);
    if a.is_empty() || g.is_empty() {
        return false;
    }
    let padded = |s: &str| format!(" {s} ");
    padded(&g).contains(&padded(&a)) || padded(&a).contains(&padded(&g))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum JudgeVerdict {
    Correct,
    Wrong,
    NoAnswer,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Judgement {
    pub question_id: String,
    pub question_word: QuestionWord,
    pub verdict: JudgeVerdict,
    /// 1-based rank of the first answer that matches gold, at any rank.
    pub answered_rank: Option<usize>,
}

impl Judgement {
    pub fn new(question_id: impl Into<String>, question_word: QuestionWord, verdict: JudgeVerdict, answered_rank: Option<usize>) -> Self {
        Judgement {
            question_id: question_id.into(),
            question_word,
            verdict,
            answered_rank,
        }
    }
}

/// Judges a ranked answer list; an empty list means no answer.
pub fn judge_ranked(question: &QuestionRecord, ranked: &[String], policy: &JudgePolicy) -> Judgement {
    let rank = ranked
        .iter()
        .position(|a| policy.matches(&question.id, a, &question.gold_answers))
        .map(|i| i + 1);
    let verdict = match (ranked.is_empty(), rank) {
        (true, _) => JudgeVerdict::NoAnswer,
        (false, Some(1)) => JudgeVerdict::Correct,
        (false, _) => JudgeVerdict::Wrong,
    };
    Judgement::new(question.id.clone(), question.question_word, verdict, rank)
}

pub fn judge(question: &QuestionRecord, answers: &AnswerList, policy: &JudgePolicy) -> Judgement {
    match answers.verdict {
        Verdict::DontKnow => judge_ranked(question, &[], policy),
        Verdict::Answered => judge_ranked(question, &answers.surfaces(), policy),
    }
}

/// Verdict tallies with exact rational metrics.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct Counts {
    pub correct: u64,
    pub wrong: u64,
    pub no_answer: u64,
}

impl Counts {
    pub fn new(correct: u64, wrong: u64, no_answer: u64) -> Self {
        Counts {
            correct,
            wrong,
            no_answer,
        }
    }

    pub fn of(judgements: &[Judgement]) -> Self {
        let mut c = Counts::default();
        for j in judgements {
            match j.verdict {
                JudgeVerdict::Correct => c.correct += 1,
                JudgeVerdict::Wrong => c.wrong += 1,
                JudgeVerdict::NoAnswer => c.no_answer += 1,
            }
        }
        c
    }

    pub fn total(&self) -> u64 {
        self.correct + self.wrong + self.no_answer
    }

    pub fn answered(&self) -> u64 {
        self.correct + self.wrong
    }

    fn ratio(num: u64, den: u64) -> Ratio<u64> {
        if den == 0 {
            Ratio::from_integer(0)
        } else {
            Ratio::new(num, den)
        }
    }

    pub fn accuracy_exact(&self) -> Ratio<u64> {
        Self::ratio(self.correct, self.total())
    }

    /// Zero answered gives 0; check [`Counts::precision_undefined`].
    pub fn precision_exact(&self) -> Ratio<u64> {
        Self::ratio(self.correct, self.answered())
    }

    pub fn precision_undefined(&self) -> bool {
        self.answered() == 0
    }

    pub fn recall_exact(&self) -> Ratio<u64> {
        Self::ratio(self.answered(), self.total())
    }

    pub fn accuracy(&self) -> f64 {
        to_f64(self.accuracy_exact())
    }

    pub fn precision(&self) -> f64 {
        to_f64(self.precision_exact())
    }

    pub fn recall(&self) -> f64 {
        to_f64(self.recall_exact())
    }
}

fn to_f64(r: Ratio<u64>) -> f64 {
    *r.numer() as f64 / *r.denom() as f64
}

pub fn accuracy(judgements: &[Judgement]) -> f64 {
    Counts::of(judgements).accuracy()
}

pub fn precision(judgements: &[Judgement]) -> f64 {
    Counts::of(judgements).precision()
}

pub fn recall(judgements: &[Judgement]) -> f64 {
    Counts::of(judgements).recall()
}

/// Mean reciprocal rank of the first correct answer; 0 for an empty set.
pub fn mrr(judgements: &[Judgement]) -> f64 {
    if judgements.is_empty() {
        return 0.0;
    }
    let sum: f64 = judgements
        .iter()
        .filter_map(|j| j.answered_rank)
        .map(|r| 1.0 / r as f64)
        .sum();
    sum / judgements.len() as f64
}

/// Fraction of questions with a correct answer within rank `k`; `None` is
/// unbounded.
pub fn c_at_k(judgements: &[Judgement], k: Option<usize>) -> f64 {
    if judgements.is_empty() {
        return 0.0;
    }
    let hits = judgements
        .iter()
        .filter(|j| j.answered_rank.is_some_and(|r| k.is_none_or(|k| r <= k)))
        .count();
    hits as f64 / judgements.len() as f64
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PassageRow {
    pub question_id: String,
    pub first_positive_rank: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PassageStats {
    pub per_question: Vec<PassageRow>,
    pub questions_with_positive: usize,
    pub mrr_all_q: f64,
    pub mrr_pos_only: f64,
    /// No question had a positive passage, so `mrr_pos_only` is reported as 0.
    pub mrr_pos_only_undefined: bool,
}

impl PassageStats {
    pub fn from_rows(per_question: Vec<PassageRow>) -> Self {
        let ranks: Vec<usize> = per_question.iter().filter_map(|r| r.first_positive_rank).collect();
        let recip: f64 = ranks.iter().map(|&r| 1.0 / r as f64).sum();
        let n = per_question.len();
        PassageStats {
            questions_with_positive: ranks.len(),
            mrr_all_q: if n == 0 { 0.0 } else { recip / n as f64 },
            mrr_pos_only: if ranks.is_empty() { 0.0 } else { recip / ranks.len() as f64 },
            mrr_pos_only_undefined: ranks.is_empty(),
            per_question,
        }
    }
}

/// Passages of one question in retrieval order.
#[derive(Debug, Clone)]
pub struct QuestionPassages<'a> {
    pub question: &'a QuestionRecord,
    pub passages: Vec<String>,
}

pub fn passage_metrics(items: &[QuestionPassages<'_>], policy: &JudgePolicy) -> PassageStats {
    let rows = items
        .iter()
        .map(|item| PassageRow {
            question_id: item.question.id.clone(),
            first_positive_rank: item
                .passages
                .iter()
                .position(|p| policy.matches(&item.question.id, p, &item.question.gold_answers))
                .map(|i| i + 1),
        })
        .collect();
    PassageStats::from_rows(rows)
}

/// Inclusive range of extracted-candidate counts; `hi = None` is open-ended.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Bucket {
    pub lo: usize,
    pub hi: Option<usize>,
}

impl Bucket {
    pub fn contains(&self, n: usize) -> bool {
        n >= self.lo && self.hi.is_none_or(|hi| n <= hi)
    }

    pub fn label(&self) -> String {
        match self.hi {
            Some(hi) if hi == self.lo => hi.to_string(),
            Some(hi) => format!("{} to {}", self.lo, hi),
            None => format!("{}+", self.lo),
        }
    }
}

/// Buckets from strictly increasing inclusive upper edges: `0,10,20` yields
/// `0`, `1 to 10`, `11 to 20` and `21+`.
pub fn buckets_from_edges(edges: &[usize]) -> Result<Vec<Bucket>, EvalError> {
    if edges.windows(2).any(|w| w[0] >= w[1]) {
        return Err(EvalError::Buckets("edges must be strictly increasing".into()));
    }
    let mut out = Vec::with_capacity(edges.len() + 1);
    let mut lo = 0;
    for &hi in edges {
        out.push(Bucket { lo, hi: Some(hi) });
        lo = hi + 1;
    }
    out.push(Bucket { lo, hi: None });
    Ok(out)
}

pub fn parse_bucket_edges(text: &str) -> Result<Vec<Bucket>, EvalError> {
    let edges = text
        .split(',')
        .map(|s| s.trim().parse::<usize>())
        .collect::<Result<Vec<_>, _>>()
        .map_err(|e| EvalError::Buckets(format!("`{text}`: {e}")))?;
    buckets_from_edges(&edges)
}

pub const DEFAULT_BUCKET_EDGES: [usize; 7] = [0, 10, 20, 40, 60, 100, 150];

pub fn default_buckets() -> Vec<Bucket> {
    buckets_from_edges(&DEFAULT_BUCKET_EDGES).expect("default edges are increasing")
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct QuestionStage {
    pub question_id: String,
    pub extracted_count: usize,
    pub cae_success: bool,
    pub as_success: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BucketRow {
    pub bucket: Bucket,
    pub questions: usize,
    /// `None` for the bucket holding only questions with nothing extracted.
    pub cae_success: Option<usize>,
    pub as_success: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StageStats {
    pub per_question: Vec<QuestionStage>,
    pub buckets: Vec<BucketRow>,
}

impl StageStats {
    pub fn cae_total(&self) -> usize {
        self.per_question.iter().filter(|q| q.cae_success).count()
    }

    pub fn as_total(&self) -> usize {
        self.per_question.iter().filter(|q| q.as_success).count()
    }

    pub fn from_rows(per_question: Vec<QuestionStage>, buckets: &[Bucket]) -> Self {
        let rows = buckets
            .iter()
            .map(|&bucket| {
                let members: Vec<&QuestionStage> =
                    per_question.iter().filter(|q| bucket.contains(q.extracted_count)).collect();
                let dash = bucket.hi == Some(0);
                BucketRow {
                    bucket,
                    questions: members.len(),
                    cae_success: (!dash).then(|| members.iter().filter(|q| q.cae_success).count()),
                    as_success: (!dash).then(|| members.iter().filter(|q| q.as_success).count()),
                }
            })
            .collect();
        StageStats {
            per_question,
            buckets: rows,
        }
    }
}

/// Extraction and selection output for one question.
#[derive(Debug, Clone)]
pub struct QuestionExtraction<'a> {
    pub question: &'a QuestionRecord,
    pub extracted: Vec<String>,
    pub final_answer: Option<String>,
}

/// Buckets must cover every count exactly once, which [`buckets_from_edges`]
/// guarantees.
pub fn stage_stats(
    items: &[QuestionExtraction<'_>],
    buckets: &[Bucket],
    policy: &JudgePolicy,
) -> Result<StageStats, EvalError> {
    let mut rows = Vec::with_capacity(items.len());
    for item in items {
        let q = item.question;
        let cae = item.extracted.iter().any(|a| policy.matches(&q.id, a, &q.gold_answers));
        let final_ok = item
            .final_answer
            .as_deref()
            .is_some_and(|a| policy.matches(&q.id, a, &q.gold_answers));
        if final_ok && !cae {
            return Err(EvalError::Consistency {
                question_id: q.id.clone(),
            });
        }
        rows.push(QuestionStage {
            question_id: q.id.clone(),
            extracted_count: item.extracted.len(),
            cae_success: cae,
            as_success: final_ok,
        });
    }
    Ok(StageStats::from_rows(rows, buckets))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub total: u64,
    pub correct: u64,
    pub wrong: u64,
    pub no_answer: u64,
    pub accuracy: f64,
    pub precision: f64,
    pub precision_undefined: bool,
    pub recall: f64,
    pub mrr: f64,
    pub c_at_1: f64,
    pub c_at_5: f64,
}

impl Summary {
    pub fn of(judgements: &[Judgement]) -> Self {
        let c = Counts::of(judgements);
        Summary {
            total: c.total(),
            correct: c.correct,
            wrong: c.wrong,
            no_answer: c.no_answer,
            accuracy: c.accuracy(),
            precision: c.precision(),
            precision_undefined: c.precision_undefined(),
            recall: c.recall(),
            mrr: mrr(judgements),
            c_at_1: c_at_k(judgements, Some(1)),
            c_at_5: c_at_k(judgements, Some(5)),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WordRow {
    pub word: QuestionWord,
    pub correct: u64,
    pub incorrect: u64,
    pub no_answer: u64,
    pub accuracy: f64,
}

pub fn question_word_breakdown(judgements: &[Judgement]) -> Vec<WordRow> {
    QuestionWord::ALL
        .iter()
        .map(|&word| {
            let subset: Vec<Judgement> = judgements.iter().filter(|j| j.question_word == word).cloned().collect();
            let c = Counts::of(&subset);
            WordRow {
                word,
                correct: c.correct,
                incorrect: c.wrong,
                no_answer: c.no_answer,
                accuracy: c.accuracy(),
            }
        })
        .collect()
}

fn percent(r: Ratio<u64>) -> String {
    format!("{:.1}%", to_f64(r) * 100.0)
}

/// Explains the precision definition next to the alternative wrong/answered
/// reading that some reference results use.
pub fn precision_note(c: &Counts) -> Option<String> {
    if c.precision_undefined() {
        return Some("precision undefined: no question was answered; reported as 0".into());
    }
    let answered = c.answered();
    Some(format!(
        "precision is correct/answered = {}/{} = {}; wrong/answered would be {}/{} = {}",
        c.correct,
        answered,
        percent(c.precision_exact()),
        c.wrong,
        answered,
        percent(Ratio::new(c.wrong, answered)),
    ))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub judgements: Vec<Judgement>,
    pub summary: Summary,
    pub breakdown: Vec<WordRow>,
    pub passages: Option<PassageStats>,
    pub stages: Option<StageStats>,
    pub notes: Vec<String>,
}

impl RunReport {
    pub fn new(judgements: Vec<Judgement>, passages: Option<PassageStats>, stages: Option<StageStats>) -> Self {
        let summary = Summary::of(&judgements);
        let breakdown = question_word_breakdown(&judgements);
        let mut notes = Vec::new();
        if !judgements.is_empty() {
            notes.extend(precision_note(&Counts::of(&judgements)));
        }
        if passages.as_ref().is_some_and(|p| p.mrr_pos_only_undefined && !p.per_question.is_empty()) {
            notes.push("passage MRR over positive questions undefined: no positive passages; reported as 0".into());
        }
        RunReport {
            judgements,
            summary,
            breakdown,
            passages,
            stages,
            notes,
        }
    }

    pub fn counts(&self) -> Counts {
        Counts::of(&self.judgements)
    }
}

/// Arithmetic means of the scalar metrics over several runs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AveragedReport {
    pub runs: usize,
    pub total: f64,
    pub correct: f64,
    pub wrong: f64,
    pub no_answer: f64,
    pub accuracy: f64,
    pub precision: f64,
    pub recall: f64,
    pub mrr: f64,
    pub c_at_1: f64,
    pub c_at_5: f64,
    pub questions_with_positive: Option<f64>,
    pub mrr_all_q: Option<f64>,
    pub mrr_pos_only: Option<f64>,
    pub cae_success: Option<f64>,
    pub as_success: Option<f64>,
}

/// Mean computed as offsets from the first value, so identical inputs give
/// back that value exactly.
fn mean(values: impl IntoIterator<Item = f64>) -> f64 {
    let values: Vec<f64> = values.into_iter().collect();
    let Some(&first) = values.first() else {
        return 0.0;
    };
    let offset: f64 = values.iter().map(|v| v - first).sum();
    first + offset / values.len() as f64
}

fn mean_opt(values: impl IntoIterator<Item = Option<f64>>) -> Option<f64> {
    values.into_iter().collect::<Option<Vec<f64>>>().map(mean)
}

impl AveragedReport {
    pub fn of(reports: &[RunReport]) -> Self {
        let s = |f: fn(&Summary) -> f64| mean(reports.iter().map(|r| f(&r.summary)));
        let p = |f: fn(&PassageStats) -> f64| mean_opt(reports.iter().map(|r| r.passages.as_ref().map(f)));
        let st = |f: fn(&StageStats) -> f64| mean_opt(reports.iter().map(|r| r.stages.as_ref().map(f)));
        AveragedReport {
            runs: reports.len(),
            total: s(|x| x.total as f64),
            correct: s(|x| x.correct as f64),
            wrong: s(|x| x.wrong as f64),
            no_answer: s(|x| x.no_answer as f64),
            accuracy: s(|x| x.accuracy),
            precision: s(|x| x.precision),
            recall: s(|x| x.recall),
            mrr: s(|x| x.mrr),
            c_at_1: s(|x| x.c_at_1),
            c_at_5: s(|x| x.c_at_5),
            questions_with_positive: p(|x| x.questions_with_positive as f64),
            mrr_all_q: p(|x| x.mrr_all_q),
            mrr_pos_only: p(|x| x.mrr_pos_only),
            cae_success: st(|x| x.cae_total() as f64),
            as_success: st(|x| x.as_total() as f64),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MultiRun {
    pub runs: Vec<RunReport>,
    pub average: AveragedReport,
}

/// Calls `run` for run indices `0..k` and averages the results.
///
/// # Panics
/// If `k` is zero.
pub fn multi_run<E>(k: usize, mut run: impl FnMut(usize) -> Result<RunReport, E>) -> Result<MultiRun, E> {
    assert!(k >= 1, "multi_run needs at least one run");
    let runs = (0..k).map(&mut run).collect::<Result<Vec<_>, E>>()?;
    let average = AveragedReport::of(&runs);
    Ok(MultiRun { runs, average })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReportFormat {
    Table,
    Structured,
}

impl FromStr for ReportFormat {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "table" => Ok(ReportFormat::Table),
            "structured" | "jsonl" => Ok(ReportFormat::Structured),
            other => Err(format!("unknown report format `{other}` (table | structured)")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "record", rename_all = "snake_case")]
enum Record {
    Judgement(Judgement),
    Summary(Summary),
    QuestionWord(WordRow),
    Passage(PassageRow),
    PassageSummary {
        questions_with_positive: usize,
        mrr_all_q: f64,
        mrr_pos_only: f64,
        mrr_pos_only_undefined: bool,
    },
    Stage(QuestionStage),
    StageBucket(BucketRow),
    Note { text: String },
    Average(AveragedReport),
}

fn push_json(out: &mut String, record: &Record) {
    out.push_str(&serde_json::to_string(record).expect("report records serialize"));
    out.push('\n');
}

const WORD_HEADER: &str = "Question word  Correct  Incorrect  No answer  Accuracy";

fn render_table(report: &RunReport) -> String {
    let mut out = String::new();
    out.push_str(WORD_HEADER);
    out.push('\n');
    if report.judgements.is_empty() {
        return out;
    }
    for row in &report.breakdown {
        let _ = writeln!(
            out,
            "{:<13}  {:>7}  {:>9}  {:>9}  {:>7.2}%",
            row.word.label(),
            row.correct,
            row.incorrect,
            row.no_answer,
            row.accuracy * 100.0
        );
    }
    let s = &report.summary;
    let _ = writeln!(
        out,
        "{:<13}  {:>7}  {:>9}  {:>9}  {:>7.2}%",
        "Total",
        s.correct,
        s.wrong,
        s.no_answer,
        s.accuracy * 100.0
    );
    out.push('\n');
    let _ = writeln!(out, "Questions  {}", s.total);
    let _ = writeln!(out, "Accuracy   {:.1}%", s.accuracy * 100.0);
    let _ = writeln!(
        out,
        "Precision  {:.1}%{}",
        s.precision * 100.0,
        if s.precision_undefined { " (undefined)" } else { "" }
    );
    let _ = writeln!(out, "Recall     {:.1}%", s.recall * 100.0);
    let _ = writeln!(out, "MRR        {:.3}", s.mrr);
    let _ = writeln!(out, "C@1        {:.3}", s.c_at_1);
    let _ = writeln!(out, "C@5        {:.3}", s.c_at_5);
    if let Some(p) = &report.passages {
        out.push('\n');
        let n = p.per_question.len();
        let share = if n == 0 { 0.0 } else { p.questions_with_positive as f64 * 100.0 / n as f64 };
        let _ = writeln!(out, "Questions with positive passages  {} ({:.1}%)", p.questions_with_positive, share);
        let _ = writeln!(out, "MRR_ALLQ                          {:.3}", p.mrr_all_q);
        let _ = writeln!(
            out,
            "MRR_QPOSPASSAGES                  {:.3}{}",
            p.mrr_pos_only,
            if p.mrr_pos_only_undefined { " (undefined)" } else { "" }
        );
    }
    if let Some(st) = &report.stages {
        out.push('\n');
        out.push_str("Extracted answers  #Question  CAE success  AS success\n");
        let dash = |v: Option<usize>| v.map_or_else(|| "-".to_string(), |v| v.to_string());
        for row in &st.buckets {
            let _ = writeln!(
                out,
                "{:<17}  {:>9}  {:>11}  {:>10}",
                row.bucket.label(),
                row.questions,
                dash(row.cae_success),
                dash(row.as_success)
            );
        }
        let _ = writeln!(
            out,
            "{:<17}  {:>9}  {:>11}  {:>10}",
            "All",
            st.per_question.len(),
            st.cae_total(),
            st.as_total()
        );
    }
    if !report.notes.is_empty() {
        out.push('\n');
        for note in &report.notes {
            let _ = writeln!(out, "note: {note}");
        }
    }
    out
}

fn render_structured(report: &RunReport) -> String {
    let mut out = String::new();
    push_json(&mut out, &Record::Summary(report.summary.clone()));
    for row in &report.breakdown {
        push_json(&mut out, &Record::QuestionWord(row.clone()));
    }
    for j in &report.judgements {
        push_json(&mut out, &Record::Judgement(j.clone()));
    }
    if let Some(p) = &report.passages {
        push_json(
            &mut out,
            &Record::PassageSummary {
                questions_with_positive: p.questions_with_positive,
                mrr_all_q: p.mrr_all_q,
                mrr_pos_only: p.mrr_pos_only,
                mrr_pos_only_undefined: p.mrr_pos_only_undefined,
            },
        );
        for row in &p.per_question {
            push_json(&mut out, &Record::Passage(row.clone()));
        }
    }
    if let Some(st) = &report.stages {
        for row in &st.buckets {
            push_json(&mut out, &Record::StageBucket(row.clone()));
        }
        for q in &st.per_question {
            push_json(&mut out, &Record::Stage(q.clone()));
        }
    }
    for note in &report.notes {
        push_json(&mut out, &Record::Note { text: note.clone() });
    }
    out
}

pub fn render_report(report: &RunReport, format: ReportFormat) -> String {
    match format {
        ReportFormat::Table => render_table(report),
        ReportFormat::Structured => render_structured(report),
    }
}

pub fn render_average(avg: &AveragedReport, format: ReportFormat) -> String {
    match format {
        ReportFormat::Structured => {
            let mut out = String::new();
            push_json(&mut out, &Record::Average(avg.clone()));
            out
        }
        ReportFormat::Table => {
            let mut out = String::new();
            let _ = writeln!(out, "Runs       {}", avg.runs);
            let _ = writeln!(out, "Questions  {}", avg.total);
            let _ = writeln!(out, "Correct    {}", avg.correct);
            let _ = writeln!(out, "Wrong      {}", avg.wrong);
            let _ = writeln!(out, "No answer  {}", avg.no_answer);
            let _ = writeln!(out, "Accuracy   {:.1}%", avg.accuracy * 100.0);
            let _ = writeln!(out, "Precision  {:.1}%", avg.precision * 100.0);
            let _ = writeln!(out, "Recall     {:.1}%", avg.recall * 100.0);
            let _ = writeln!(out, "MRR        {:.3}", avg.mrr);
            let _ = writeln!(out, "C@1        {:.3}", avg.c_at_1);
            let _ = writeln!(out, "C@5        {:.3}", avg.c_at_5);
            if let (Some(a), Some(b)) = (avg.mrr_all_q, avg.mrr_pos_only) {
                let _ = writeln!(out, "MRR_ALLQ          {a:.3}");
                let _ = writeln!(out, "MRR_QPOSPASSAGES  {b:.3}");
            }
            if let (Some(c), Some(a)) = (avg.cae_success, avg.as_success) {
                let _ = writeln!(out, "CAE success  {c}");
                let _ = writeln!(out, "AS success   {a}");
            }
            out
        }
    }
}

/// Reads back a structured run report.
pub fn load_report(text: &str) -> Result<RunReport, EvalError> {
    let mut summary = None;
    let mut judgements = Vec::new();
    let mut breakdown = Vec::new();
    let mut passage_rows = Vec::new();
    let mut passage_summary = None;
    let mut stage_rows = Vec::new();
    let mut bucket_rows = Vec::new();
    let mut notes = Vec::new();
    for (i, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let err = |message: String| EvalError::Report { line: i + 1, message };
        let record: Record = serde_json::from_str(line).map_err(|e| err(e.to_string()))?;
        match record {
            Record::Summary(s) => summary = Some(s),
            Record::Judgement(j) => judgements.push(j),
            Record::QuestionWord(w) => breakdown.push(w),
            Record::Passage(p) => passage_rows.push(p),
            Record::PassageSummary {
                questions_with_positive,
                mrr_all_q,
                mrr_pos_only,
                mrr_pos_only_undefined,
            } => passage_summary = Some((questions_with_positive, mrr_all_q, mrr_pos_only, mrr_pos_only_undefined)),
            Record::Stage(s) => stage_rows.push(s),
            Record::StageBucket(b) => bucket_rows.push(b),
            Record::Note { text } => notes.push(text),
            Record::Average(_) => return Err(err("averaged record in a run report".into())),
        }
    }
    let summary = summary.ok_or(EvalError::Report {
        line: 0,
        message: "missing summary record".into(),
    })?;
    let passages = passage_summary.map(|(q, all, pos, undef)| PassageStats {
        per_question: passage_rows,
        questions_with_positive: q,
        mrr_all_q: all,
        mrr_pos_only: pos,
        mrr_pos_only_undefined: undef,
    });
    let stages = (!bucket_rows.is_empty() || !stage_rows.is_empty()).then_some(StageStats {
        per_question: stage_rows,
        buckets: bucket_rows,
    });
    Ok(RunReport {
        judgements,
        summary,
        breakdown,
        passages,
        stages,
        notes,
    })
}

pub fn load_average(text: &str) -> Result<AveragedReport, EvalError> {
    let line = text.lines().find(|l| !l.trim().is_empty()).unwrap_or("");
    match serde_json::from_str::<Record>(line) {
        Ok(Record::Average(a)) => Ok(a),
        Ok(_) => Err(EvalError::Report {
            line: 1,
            message: "expected an averaged record".into(),
        }),
        Err(e) => Err(EvalError::Report {
            line: 1,
            message: e.to_string(),
        }),
    }
}
