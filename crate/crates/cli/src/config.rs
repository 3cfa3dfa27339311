//! Run configuration: a flat `key = value` file overlaid by command-line
//! flags.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use qa_core::corpora::QuestionFormat;
use qa_core::evaluate::{default_buckets, parse_bucket_edges, Bucket, JudgePolicy, ReportFormat};
use qa_core::retrieve::DEFAULT_MAX_SNIPPETS;
use qa_core::select::{Distance, SelectionConfig, Strategy};

use crate::CliError;

pub const KEYS: &[&str] = &[
    "questions",
    "question-format",
    "backend",
    "snippets",
    "endpoint",
    "stats",
    "cache-dir",
    "offline",
    "max-snippets",
    "select",
    "distance",
    "distance-threshold",
    "score-threshold",
    "runs",
    "output-dir",
    "judge-policy",
    "buckets",
    "jobs",
    "error-budget",
    "report-format",
];

const PATH_KEYS: &[&str] = &["questions", "snippets", "stats", "cache-dir", "output-dir"];

/// Raw settings keyed by option name.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Settings(BTreeMap<String, String>);

impl Settings {
    /// Parses `key = value` lines. Blank lines and `#` comments are skipped.
    /// Relative paths are resolved against `base`.
    pub fn parse(text: &str, base: Option<&Path>) -> Result<Self, CliError> {
        let mut map = BTreeMap::new();
        for (i, line) in text.lines().enumerate() {
            let t = line.trim();
            if t.is_empty() || t.starts_with('#') {
                continue;
            }
            let (key, value) = t
                .split_once('=')
                .ok_or_else(|| CliError::Config(format!("config line {}: expected `key = value`", i + 1)))?;
            let key = key.trim();
            if !KEYS.contains(&key) {
                return Err(CliError::Config(format!("config line {}: unknown key `{key}`", i + 1)));
            }
            let mut value = value.trim().to_string();
            if let Some(base) = base {
                if PATH_KEYS.contains(&key) && Path::new(&value).is_relative() {
                    value = base.join(&value).to_string_lossy().into_owned();
                }
            }
            map.insert(key.to_string(), value);
        }
        Ok(Settings(map))
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
        Self::parse(&text, path.parent())
    }

    pub fn set(&mut self, key: &str, value: impl Into<String>) {
        debug_assert!(KEYS.contains(&key), "unknown key {key}");
        self.0.insert(key.to_string(), value.into());
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.0.get(key).map(String::as_str)
    }

    /// Later settings win.
    pub fn overlay(mut self, other: Settings) -> Self {
        self.0.extend(other.0);
        self
    }

    fn parsed<T: FromStr>(&self, key: &str) -> Result<Option<T>, CliError>
    where
        T::Err: std::fmt::Display,
    {
        self.get(key)
            .map(|v| v.parse::<T>().map_err(|e| CliError::Config(format!("{key}: {e}"))))
            .transpose()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BackendKind {
    Local,
    Web,
}

impl FromStr for BackendKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "local" => Ok(BackendKind::Local),
            "web" => Ok(BackendKind::Web),
            other => Err(format!("unknown backend `{other}` (local | web)")),
        }
    }
}

#[derive(Debug, Clone)]
pub struct RunConfig {
    pub questions: Option<PathBuf>,
    pub question_format: QuestionFormat,
    pub backend: BackendKind,
    pub snippets: Option<PathBuf>,
    pub endpoint: Option<String>,
    pub stats: Option<PathBuf>,
    pub cache_dir: Option<PathBuf>,
    pub offline: bool,
    pub max_snippets: usize,
    pub selection: SelectionConfig,
    pub runs: usize,
    pub output_dir: PathBuf,
    pub judge_policy: JudgePolicy,
    pub buckets: Vec<Bucket>,
    /// 0 lets the thread pool pick.
    pub jobs: usize,
    /// Maximum number of failed questions tolerated per run; unlimited when
    /// unset.
    pub error_budget: Option<usize>,
    pub report_format: ReportFormat,
}

fn existing(path: Option<&str>, key: &str) -> Result<Option<PathBuf>, CliError> {
    match path {
        None => Ok(None),
        Some(p) => {
            let p = PathBuf::from(p);
            if p.exists() {
                Ok(Some(p))
            } else {
                Err(CliError::Config(format!("{key}: {} does not exist", p.display())))
            }
        }
    }
}

impl RunConfig {
    pub fn from_settings(s: &Settings) -> Result<Self, CliError> {
        let backend = s.parsed("backend")?.unwrap_or(BackendKind::Local);
        let max_snippets = s.parsed("max-snippets")?.unwrap_or(DEFAULT_MAX_SNIPPETS);
        if max_snippets == 0 {
            return Err(CliError::Config("max-snippets must be at least 1".into()));
        }
        let runs = s.parsed("runs")?.unwrap_or(5);
        if runs == 0 {
            return Err(CliError::Config("runs must be at least 1".into()));
        }

        let mut selection = SelectionConfig {
            strategy: s.parsed::<Strategy>("select")?.unwrap_or(Strategy::AraneaTop),
            ..SelectionConfig::default()
        };
        if let Some(d) = s.parsed::<Distance>("distance")? {
            selection = selection.with_distance(d);
        }
        if let Some(t) = s.parsed("distance-threshold")? {
            selection.distance_threshold = t;
        }
        if let Some(t) = s.parsed("score-threshold")? {
            selection.score_threshold = t;
        }
        selection.validate().map_err(CliError::Config)?;

        let buckets = match s.get("buckets") {
            Some(edges) => parse_bucket_edges(edges).map_err(|e| CliError::Config(e.to_string()))?,
            None => default_buckets(),
        };

        let config = RunConfig {
            questions: existing(s.get("questions"), "questions")?,
            question_format: s.parsed("question-format")?.unwrap_or(QuestionFormat::GoldQa),
            backend,
            snippets: existing(s.get("snippets"), "snippets")?,
            endpoint: s.get("endpoint").map(str::to_string),
            stats: existing(s.get("stats"), "stats")?,
            cache_dir: s.get("cache-dir").map(PathBuf::from),
            offline: s.parsed("offline")?.unwrap_or(false),
            max_snippets,
            selection,
            runs,
            output_dir: s.get("output-dir").map_or_else(|| PathBuf::from("reports"), PathBuf::from),
            judge_policy: s.parsed("judge-policy")?.unwrap_or_default(),
            buckets,
            jobs: s.parsed("jobs")?.unwrap_or(0),
            error_budget: s.parsed("error-budget")?,
            report_format: s.parsed("report-format")?.unwrap_or(ReportFormat::Structured),
        };
        match config.backend {
            BackendKind::Local if config.snippets.is_none() => {
                Err(CliError::Config("the local backend needs `snippets`".into()))
            }
            BackendKind::Web if config.endpoint.is_none() && !config.offline => {
                Err(CliError::Config("the web backend needs `endpoint`".into()))
            }
            BackendKind::Web if config.offline && config.cache_dir.is_none() => {
                Err(CliError::Config("offline mode needs `cache-dir`".into()))
            }
            _ => Ok(config),
        }
    }

    pub fn require_questions(&self) -> Result<&Path, CliError> {
        self.questions
            .as_deref()
            .ok_or_else(|| CliError::Config("no question corpus given (`questions`)".into()))
    }
}
