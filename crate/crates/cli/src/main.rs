use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::Context;
use clap::{Args, Parser, Subcommand};

use qa_cli::config::{RunConfig, Settings};
use qa_cli::engine::{render_answers, render_trace, Engine};
use qa_cli::{CliError, EXIT_BUDGET};
use qa_core::corpora::{SnippetStore, TermStats};
use qa_core::evaluate::render_average;

#[derive(Parser)]
#[command(name = "redqa", version, about = "Redundancy-based factoid question answering")]
struct Cli {
    #[command(flatten)]
    opts: RunArgs,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Answer a single question.
    Ask {
        question: String,
        /// Number of answers to print.
        #[arg(long, default_value_t = 5)]
        top: usize,
    },
    /// Evaluate the question corpus and write one report per run plus the average.
    Eval,
    /// Show queries, passages and candidates after every extraction stage.
    Inspect {
        id: String,
        /// Candidates listed per stage.
        #[arg(long, default_value_t = 10)]
        show: usize,
    },
    /// Build a term statistics file from documents.
    BuildStats {
        /// Snippet corpus (.jsonl) or plain text with one document per line.
        input: PathBuf,
        #[arg(long, short)]
        out: PathBuf,
        /// `snippets` or `lines`; guessed from the extension by default.
        #[arg(long)]
        input_format: Option<String>,
    },
}

#[derive(Args, Default)]
struct RunArgs {
    /// key = value configuration file; flags override it.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[arg(long, global = true)]
    questions: Option<String>,
    /// gold-qa | trec
    #[arg(long, global = true)]
    question_format: Option<String>,
    /// local | web
    #[arg(long, global = true)]
    backend: Option<String>,
    #[arg(long, global = true)]
    snippets: Option<String>,
    #[arg(long, global = true)]
    endpoint: Option<String>,
    #[arg(long, global = true)]
    stats: Option<String>,
    #[arg(long, global = true)]
    cache_dir: Option<String>,
    /// Serve searches from the cache only.
    #[arg(long, global = true)]
    offline: bool,
    #[arg(long, global = true)]
    max_snippets: Option<String>,
    /// justask | ephyra | aranea-top
    #[arg(long, global = true)]
    select: Option<String>,
    /// levenshtein | overlap
    #[arg(long, global = true)]
    distance: Option<String>,
    #[arg(long, global = true)]
    distance_threshold: Option<String>,
    #[arg(long, global = true)]
    score_threshold: Option<String>,
    #[arg(long, global = true)]
    runs: Option<String>,
    #[arg(long, global = true)]
    output_dir: Option<String>,
    /// exact | word-boundary | patterns:<file>
    #[arg(long, global = true)]
    judge_policy: Option<String>,
    /// Inclusive upper bucket edges, e.g. 0,10,20,40,60,100,150
    #[arg(long, global = true)]
    buckets: Option<String>,
    #[arg(long, global = true)]
    jobs: Option<String>,
    /// Failed questions tolerated per run before exiting with status 3.
    #[arg(long, global = true)]
    error_budget: Option<String>,
    /// table | structured
    #[arg(long, global = true)]
    report_format: Option<String>,
}

impl RunArgs {
    fn settings(&self) -> Result<Settings, CliError> {
        let base = match &self.config {
            Some(path) => Settings::load(path)?,
            None => Settings::default(),
        };
        let mut flags = Settings::default();
        let pairs = [
            ("questions", &self.questions),
            ("question-format", &self.question_format),
            ("backend", &self.backend),
            ("snippets", &self.snippets),
            ("endpoint", &self.endpoint),
            ("stats", &self.stats),
            ("cache-dir", &self.cache_dir),
            ("max-snippets", &self.max_snippets),
            ("select", &self.select),
            ("distance", &self.distance),
            ("distance-threshold", &self.distance_threshold),
            ("score-threshold", &self.score_threshold),
            ("runs", &self.runs),
            ("output-dir", &self.output_dir),
            ("judge-policy", &self.judge_policy),
            ("buckets", &self.buckets),
            ("jobs", &self.jobs),
            ("error-budget", &self.error_budget),
            ("report-format", &self.report_format),
        ];
        for (key, value) in pairs {
            if let Some(v) = value {
                flags.set(key, v.clone());
            }
        }
        if self.offline {
            flags.set("offline", "true");
        }
        Ok(base.overlay(flags))
    }
}

fn build_stats(input: &Path, out: &Path, format: Option<&str>) -> anyhow::Result<TermStats> {
    let snippets = match format {
        Some("snippets") => true,
        Some("lines") => false,
        Some(other) => anyhow::bail!("unknown input format `{other}` (snippets | lines)"),
        None => input.extension().is_some_and(|e| e == "jsonl"),
    };
    let stats = if snippets {
        let store = SnippetStore::load(input)?;
        TermStats::build(store.records().iter().map(|r| r.text.as_str()))?
    } else {
        let text = std::fs::read_to_string(input).with_context(|| input.display().to_string())?;
        TermStats::build(text.lines().filter(|l| !l.trim().is_empty()))?
    };
    stats.save(out)?;
    Ok(stats)
}

fn run(cli: Cli) -> Result<ExitCode, CliError> {
    let settings = cli.opts.settings()?;
    match cli.command {
        Command::BuildStats {
            input,
            out,
            input_format,
        } => {
            let stats = build_stats(&input, &out, input_format.as_deref()).map_err(|e| {
                if e.downcast_ref::<qa_core::corpora::CorpusError>().is_some() {
                    CliError::Corpus(e.downcast().expect("checked"))
                } else {
                    CliError::Config(format!("{e:#}"))
                }
            })?;
            println!(
                "wrote {} ({} documents, {} words)",
                out.display(),
                stats.total_docs(),
                stats.vocabulary_len()
            );
            Ok(ExitCode::SUCCESS)
        }
        Command::Ask { question, top } => {
            let engine = Engine::new(RunConfig::from_settings(&settings)?)?;
            let trace = engine
                .trace(None, &question)
                .map_err(|e| CliError::Config(e.to_string()))?;
            let (_, answers) = engine.select(&trace, None);
            print!("{}", render_answers(&answers, top));
            Ok(ExitCode::SUCCESS)
        }
        Command::Inspect { id, show } => {
            let engine = Engine::new(RunConfig::from_settings(&settings)?)?;
            let questions = engine.questions()?;
            let q = questions
                .iter()
                .find(|q| q.id == id)
                .ok_or_else(|| CliError::Config(format!("unknown question id `{id}`")))?;
            let outcome = engine.run_question(q).map_err(|e| CliError::Internal(e.to_string()))?;
            print!("{}", render_trace(&outcome.trace, &outcome.answers, show));
            Ok(ExitCode::SUCCESS)
        }
        Command::Eval => {
            let engine = Engine::new(RunConfig::from_settings(&settings)?)?;
            let out = engine.eval()?;
            if out.failures > 0 {
                eprintln!("warning: up to {} questions failed per run; see report notes", out.failures);
            }
            print!("{}", render_average(&out.multi.average, qa_core::evaluate::ReportFormat::Table));
            for f in &out.files {
                println!("wrote {}", f.display());
            }
            if out.budget_exceeded {
                eprintln!("error budget exceeded");
                return Ok(ExitCode::from(EXIT_BUDGET as u8));
            }
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
