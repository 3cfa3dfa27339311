use std::cmp::Ordering;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use rayon::prelude::*;

use qa_core::corpora::{load_questions, QuestionRecord, SnippetStore, TermStats};
use qa_core::evaluate::{
    judge_ranked, multi_run, render_average, render_report, stage_stats, MultiRun, PassageStats, PassageRow,
    QuestionExtraction, ReportFormat, RunReport,
};
use qa_core::extract::{Pipeline, PipelineError, Stage, Trace};
use qa_core::retrieve::{retrieve_all, open_cached, Backend, LocalBackend, WebBackend};
use qa_core::select::{ephyra_select, justask_select, normalize_numeric, ScoredAnswer, Strategy};

use crate::config::{BackendKind, RunConfig};
use crate::CliError;

enum Source {
    Local(LocalBackend),
    Web(Box<dyn Backend>),
}

/// Term statistics used for IDF scoring.
enum Stats {
    Fixed,
    /// Built from the passages retrieved for each question.
    PerQuestion,
}

pub struct Engine {
    pipeline: Pipeline,
    source: Source,
    stats: Stats,
    config: RunConfig,
}

/// A selected answer with the URLs of the snippets supporting it.
#[derive(Debug, Clone, PartialEq)]
pub struct Selected {
    pub text: String,
    pub score: f64,
    pub urls: Vec<String>,
}

/// What one question produced under the configured strategy.
#[derive(Debug, Clone)]
pub struct Outcome {
    pub trace: Trace,
    /// Candidates as seen by the selection strategy.
    pub extracted: Vec<String>,
    pub answers: Vec<Selected>,
}

impl Engine {
    pub fn new(config: RunConfig) -> Result<Self, CliError> {
        let (source, corpus_stats) = match config.backend {
            BackendKind::Local => {
                let path = config.snippets.as_deref().expect("validated");
                let store = SnippetStore::load(path).map_err(CliError::Corpus)?;
                let stats = (!store.is_empty())
                    .then(|| TermStats::build(store.records().iter().map(|r| r.text.as_str())))
                    .transpose()
                    .map_err(CliError::Corpus)?;
                (Source::Local(LocalBackend::new(store)), stats)
            }
            BackendKind::Web => {
                let web = WebBackend::from_env(config.endpoint.clone().unwrap_or_default());
                let backend: Box<dyn Backend> = match &config.cache_dir {
                    Some(dir) => Box::new(
                        open_cached(web, dir, config.offline).map_err(|e| CliError::Config(e.to_string()))?,
                    ),
                    None => Box::new(web),
                };
                (Source::Web(backend), None)
            }
        };
        let file_stats = config
            .stats
            .as_deref()
            .map(TermStats::load)
            .transpose()
            .map_err(CliError::Corpus)?;
        let (stats, mode) = match file_stats.or(corpus_stats) {
            Some(s) => (s, Stats::Fixed),
            None => (TermStats::from_parts(1, Default::default()).expect("N=1 is valid"), Stats::PerQuestion),
        };
        let mut pipeline = Pipeline::new(stats);
        pipeline.config.max_snippets = config.max_snippets;
        Ok(Engine {
            pipeline,
            source,
            stats: mode,
            config,
        })
    }

    pub fn config(&self) -> &RunConfig {
        &self.config
    }

    pub fn questions(&self) -> Result<Vec<QuestionRecord>, CliError> {
        let path = self.config.require_questions()?;
        let mut qs = load_questions(path, self.config.question_format).map_err(CliError::Corpus)?;
        qs.sort_by(|a, b| id_order(&a.id, &b.id));
        Ok(qs)
    }

    pub fn trace(&self, question_id: Option<&str>, text: &str) -> Result<Trace, PipelineError> {
        let ctx = self.pipeline.context(text)?;
        let queries = self.pipeline.queries.generate_from_tokens(&ctx.tokens);
        let max = self.pipeline.config.max_snippets;
        let passages = match &self.source {
            Source::Local(local) => match question_id {
                Some(id) => retrieve_all(&queries, &local.for_question(id), max)?,
                None => retrieve_all(&queries, local, max)?,
            },
            Source::Web(web) => retrieve_all(&queries, web.as_ref(), max)?,
        };
        match self.stats {
            Stats::Fixed => Ok(self.pipeline.trace_passages(text, ctx, queries, passages)),
            Stats::PerQuestion => {
                let stats = TermStats::build(passages.iter().map(|p| p.snippet.text.as_str()))
                    .unwrap_or_else(|_| self.pipeline.stats.clone());
                let pipeline = Pipeline {
                    stats,
                    ..self.pipeline.clone()
                };
                Ok(pipeline.trace_passages(text, ctx, queries, passages))
            }
        }
    }

    fn urls_for(trace: &Trace, surface: &str) -> Vec<String> {
        trace
            .extracted()
            .iter()
            .find(|c| c.surface == surface)
            .map(|c| c.support.iter().map(|&i| trace.passages[i].snippet.url.clone()).collect())
            .unwrap_or_default()
    }

    pub fn select(&self, trace: &Trace, category: Option<&str>) -> (Vec<String>, Vec<Selected>) {
        let scored: Vec<ScoredAnswer> = trace.extracted().iter().map(ScoredAnswer::from).collect();
        let selected = |text: String, score: f64| Selected {
            urls: Self::urls_for(trace, &text),
            text,
            score,
        };
        match self.config.selection.strategy {
            Strategy::AraneaTop => (
                scored.iter().map(|a| a.text.clone()).collect(),
                trace
                    .answers
                    .ranked
                    .iter()
                    .map(|c| selected(c.surface.clone(), c.score))
                    .collect(),
            ),
            Strategy::Justask => {
                // One cluster member per supporting snippet, as if each
                // passage had contributed its own extraction.
                let members: Vec<ScoredAnswer> = trace
                    .extracted()
                    .iter()
                    .flat_map(|c| std::iter::repeat_n(ScoredAnswer::from(c), c.support.len().max(1)))
                    .collect();
                let normalized: Vec<String> = scored.iter().map(|a| normalize_numeric(&a.text, category)).collect();
                let pick = justask_select(&members, &trace.question, category, &self.config.selection);
                let answers = pick
                    .map(|text| {
                        let score = scored
                            .iter()
                            .zip(&normalized)
                            .filter(|(_, n)| **n == text)
                            .map(|(a, _)| a.score)
                            .fold(0.0, f64::max);
                        vec![selected(text, score)]
                    })
                    .unwrap_or_default();
                (normalized, answers)
            }
            Strategy::Ephyra => (
                scored.iter().map(|a| a.text.clone()).collect(),
                ephyra_select(&scored, &self.config.selection)
                    .answers()
                    .iter()
                    .map(|a| selected(a.text.clone(), a.score))
                    .collect(),
            ),
        }
    }

    pub fn run_question(&self, q: &QuestionRecord) -> Result<Outcome, PipelineError> {
        let trace = self.trace(Some(&q.id), &q.text)?;
        let (extracted, answers) = self.select(&trace, q.category.as_deref());
        Ok(Outcome {
            trace,
            extracted,
            answers,
        })
    }

    fn pool(&self) -> Result<rayon::ThreadPool, CliError> {
        rayon::ThreadPoolBuilder::new()
            .num_threads(self.config.jobs)
            .build()
            .map_err(|e| CliError::Config(format!("jobs: {e}")))
    }

    /// One evaluation pass over the corpus.
    pub fn run_once(&self, questions: &[QuestionRecord]) -> Result<RunOutput, CliError> {
        let outcomes: Vec<Result<Outcome, PipelineError>> =
            self.pool()?.install(|| questions.par_iter().map(|q| self.run_question(q)).collect());

        let mut judgements = Vec::new();
        let mut passage_rows = Vec::new();
        let mut extractions = Vec::new();
        let mut failures = Vec::new();
        for (q, outcome) in questions.iter().zip(outcomes) {
            match outcome {
                Ok(o) => {
                    let ranked: Vec<String> = o.answers.iter().map(|a| a.text.clone()).collect();
                    judgements.push(judge_ranked(q, &ranked, &self.config.judge_policy));
                    passage_rows.push(PassageRow {
                        question_id: q.id.clone(),
                        first_positive_rank: o
                            .trace
                            .passages
                            .iter()
                            .position(|p| self.config.judge_policy.matches(&q.id, &p.snippet.text, &q.gold_answers))
                            .map(|i| i + 1),
                    });
                    extractions.push(QuestionExtraction {
                        question: q,
                        extracted: o.extracted,
                        final_answer: ranked.into_iter().next(),
                    });
                }
                Err(e) => {
                    log::warn!("question {}: {e}", q.id);
                    failures.push((q.id.clone(), e.to_string()));
                }
            }
        }
        let stages = stage_stats(&extractions, &self.config.buckets, &self.config.judge_policy)
            .map_err(|e| CliError::Internal(e.to_string()))?;
        let mut report = RunReport::new(judgements, Some(PassageStats::from_rows(passage_rows)), Some(stages));
        if !failures.is_empty() {
            report.notes.insert(
                0,
                format!(
                    "WARNING: {} of {} questions failed; metrics cover the {} judged questions",
                    failures.len(),
                    questions.len(),
                    questions.len() - failures.len()
                ),
            );
            for (id, msg) in &failures {
                report.notes.push(format!("question {id} failed: {msg}"));
            }
        }
        Ok(RunOutput { report, failures })
    }

    /// Runs the configured number of passes and writes one report per run
    /// plus the averaged report.
    pub fn eval(&self) -> Result<EvalOutput, CliError> {
        let questions = self.questions()?;
        let mut failures = 0;
        let multi: MultiRun = multi_run(self.config.runs, |_| {
            let out = self.run_once(&questions)?;
            failures = failures.max(out.failures.len());
            Ok::<_, CliError>(out.report)
        })?;
        let dir = &self.config.output_dir;
        fs::create_dir_all(dir).map_err(|e| CliError::Io(dir.clone(), e))?;
        let ext = match self.config.report_format {
            ReportFormat::Structured => "jsonl",
            ReportFormat::Table => "txt",
        };
        let mut files = Vec::new();
        for (i, report) in multi.runs.iter().enumerate() {
            let path = dir.join(format!("run-{}.{ext}", i + 1));
            write(&path, &render_report(report, self.config.report_format))?;
            files.push(path);
        }
        let path = dir.join(format!("average.{ext}"));
        write(&path, &render_average(&multi.average, self.config.report_format))?;
        files.push(path);
        let budget_exceeded = self.config.error_budget.is_some_and(|b| failures > b);
        Ok(EvalOutput {
            multi,
            files,
            failures,
            budget_exceeded,
        })
    }
}

fn write(path: &Path, text: &str) -> Result<(), CliError> {
    fs::write(path, text).map_err(|e| CliError::Io(path.to_path_buf(), e))
}

/// Numeric ids in numeric order, before any non-numeric ids.
pub fn id_order(a: &str, b: &str) -> Ordering {
    match (a.parse::<u64>(), b.parse::<u64>()) {
        (Ok(x), Ok(y)) => x.cmp(&y).then_with(|| a.cmp(b)),
        (Ok(_), Err(_)) => Ordering::Less,
        (Err(_), Ok(_)) => Ordering::Greater,
        (Err(_), Err(_)) => a.cmp(b),
    }
}

pub struct RunOutput {
    pub report: RunReport,
    pub failures: Vec<(String, String)>,
}

pub struct EvalOutput {
    pub multi: MultiRun,
    pub files: Vec<PathBuf>,
    /// Largest number of failed questions in any run.
    pub failures: usize,
    pub budget_exceeded: bool,
}

pub fn render_answers(answers: &[Selected], top: usize) -> String {
    let mut out = String::new();
    if answers.is_empty() {
        out.push_str("don't know\n");
        return out;
    }
    for (i, a) in answers.iter().take(top).enumerate() {
        let _ = writeln!(out, "{}. {}  (score {:.4})", i + 1, a.text, a.score);
        for url in &a.urls {
            let _ = writeln!(out, "     {url}");
        }
    }
    out
}

const SECTIONS: [(&str, &[Stage]); 7] = [
    ("ngrams", &[Stage::Ngrams]),
    ("vote", &[Stage::Vote]),
    ("filter", &[Stage::TypeNeutral, Stage::TypeSpecific, Stage::ClosedClass]),
    ("combine", &[Stage::Combine]),
    ("score", &[Stage::Score]),
    ("rerank", &[Stage::Rerank]),
    ("support_gate", &[Stage::SupportGate]),
];

/// Stage-by-stage trace listing: queries, passages, then the candidates after
/// each of the seven extraction stages.
pub fn render_trace(trace: &Trace, answers: &[Selected], show: usize) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "question: {}", trace.question);
    let _ = writeln!(out, "class: {:?}", trace.class);
    if let Some(t) = &trace.answer_type {
        let _ = writeln!(out, "answer type: {t}");
    }
    let _ = writeln!(out, "\n[queries] {}", trace.queries.len());
    for q in &trace.queries {
        let _ = writeln!(out, "  {:<8} w={:<3} {}", q.kind.name(), q.weight, q.text());
    }
    let _ = writeln!(out, "\n[passages] {}", trace.passages.len());
    for (i, p) in trace.passages.iter().enumerate() {
        let _ = writeln!(out, "  #{i} rank={} w={} {}  {}", p.retrieval_rank, p.weight, p.snippet.url, p.snippet.text);
    }
    for (n, (name, stages)) in SECTIONS.iter().enumerate() {
        let _ = writeln!(out, "\n[stage {}/7: {name}]", n + 1);
        for &stage in *stages {
            let Some(snap) = trace.stage(stage) else { continue };
            if stages.len() > 1 {
                let _ = writeln!(out, "  -- {}: {}", stage.name(), snap.count);
            } else {
                let _ = writeln!(out, "  count: {}", snap.count);
            }
            for c in snap.candidates.iter().take(show) {
                let _ = writeln!(out, "    {:<30} {:>10.4}  support={}", c.surface, c.score, c.support.len());
            }
        }
    }
    let _ = writeln!(out, "\n[answers]");
    out.push_str(&render_answers(answers, show));
    out
}
