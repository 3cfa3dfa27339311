//! Question corpora, snippet corpora and document-frequency statistics.
//!
//! Three on-disk formats live here:
//!
//! * gold-QA questions, one per line:
//!   `Question <id>. Q:<question> - {<answer>} {<answer>} - <CATEGORY>`
//! * TREC-style question lists: `<id>\t<type>\t<question>`
//! * snippet corpora as JSON lines, one [`SnippetRecord`] per line
//!
//! plus the term statistics file (`N=<docs>` header followed by
//! `<word>\t<count>` lines) consumed by IDF scoring.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

#[derive(Debug, thiserror::Error)]
pub enum CorpusError {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("duplicate question id `{0}`")]
    DuplicateId(String),
    #[error("snippet record {index}: {message}")]
    Record { index: usize, message: String },
    #[error("term statistics need at least one document")]
    NoDocuments,
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl CorpusError {
    fn parse(line: usize, message: impl Into<String>) -> Self {
        CorpusError::Parse {
            line,
            message: message.into(),
        }
    }

    pub(crate) fn io(path: &Path, source: std::io::Error) -> Self {
        CorpusError::Io {
            path: path.to_path_buf(),
            source,
        }
    }
}

/// Leading interrogative of a question, bucketed the way corpus breakdowns
/// are reported.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum QuestionWord {
    Who,
    When,
    Where,
    What,
    Which,
    How,
    Name,
    Other,
}

impl QuestionWord {
    pub const ALL: [QuestionWord; 8] = [
        QuestionWord::Who,
        QuestionWord::When,
        QuestionWord::Where,
        QuestionWord::What,
        QuestionWord::Which,
        QuestionWord::How,
        QuestionWord::Name,
        QuestionWord::Other,
    ];

    pub fn of(question: &str) -> Self {
        let first = question
            .split(|c: char| !c.is_alphanumeric() && c != '\'')
            .find(|w| !w.is_empty())
            .unwrap_or("")
            .to_lowercase();
        match first.as_str() {
            "who" | "whom" | "whose" | "who's" => QuestionWord::Who,
            "when" => QuestionWord::When,
            "where" => QuestionWord::Where,
            "what" | "what's" => QuestionWord::What,
            "which" => QuestionWord::Which,
            "how" => QuestionWord::How,
            "name" => QuestionWord::Name,
            _ => QuestionWord::Other,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            QuestionWord::Who => "Who",
            QuestionWord::When => "When",
            QuestionWord::Where => "Where",
            QuestionWord::What => "What",
            QuestionWord::Which => "Which",
            QuestionWord::How => "How",
            QuestionWord::Name => "Name",
            QuestionWord::Other => "Other",
        }
    }
}

impl fmt::Display for QuestionWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct QuestionRecord {
    pub id: String,
    pub text: String,
    pub gold_answers: Vec<String>,
    pub category: Option<String>,
    pub question_word: QuestionWord,
}

impl QuestionRecord {
    pub fn new(
        id: impl Into<String>,
        text: impl Into<String>,
        gold_answers: Vec<String>,
        category: Option<String>,
    ) -> Self {
        let text = text.into();
        let question_word = QuestionWord::of(&text);
        QuestionRecord {
            id: id.into(),
            text,
            gold_answers,
            category,
            question_word,
        }
    }
}

fn is_comment_or_blank(line: &str) -> bool {
    let t = line.trim();
    t.is_empty() || t.starts_with('#')
}

/// Parses a gold-QA corpus. Blank lines and `#` comments are skipped.
pub fn parse_gold_qa(text: &str) -> Result<Vec<QuestionRecord>, CorpusError> {
    let mut records = Vec::new();
    let mut seen = HashSet::new();
    for (idx, raw) in text.lines().enumerate() {
        if is_comment_or_blank(raw) {
            continue;
        }
        let record = parse_gold_line(raw.trim(), idx + 1)?;
        if !seen.insert(record.id.clone()) {
            return Err(CorpusError::DuplicateId(record.id));
        }
        records.push(record);
    }
    Ok(records)
}

fn parse_gold_line(line: &str, lineno: usize) -> Result<QuestionRecord, CorpusError> {
    let rest = line
        .strip_prefix("Question ")
        .ok_or_else(|| CorpusError::parse(lineno, "expected `Question <id>.` prefix"))?;
    let (id, rest) = rest
        .split_once(". Q:")
        .ok_or_else(|| CorpusError::parse(lineno, "expected `. Q:` after the question id"))?;
    let id = id.trim();
    if id.is_empty() {
        return Err(CorpusError::parse(lineno, "empty question id"));
    }
    let (question, rest) = rest
        .split_once(" - {")
        .ok_or_else(|| CorpusError::parse(lineno, "missing ` - {answer}` section"))?;
    let question = question.trim();
    if question.is_empty() {
        return Err(CorpusError::parse(lineno, "empty question text"));
    }

    // `rest` starts just inside the first brace group.
    let mut answers = Vec::new();
    let mut cursor = rest;
    loop {
        let close = cursor
            .find('}')
            .ok_or_else(|| CorpusError::parse(lineno, "unterminated answer group"))?;
        let answer = cursor[..close].trim();
        if answer.is_empty() {
            return Err(CorpusError::parse(lineno, "empty answer group"));
        }
        if answer.contains('{') {
            return Err(CorpusError::parse(lineno, "nested `{` in answer group"));
        }
        answers.push(answer.to_string());
        cursor = cursor[close + 1..].trim_start();
        match cursor.strip_prefix('{') {
            Some(next) => cursor = next,
            None => break,
        }
    }

    let category = if cursor.is_empty() {
        None
    } else {
        let cat = cursor
            .strip_prefix('-')
            .ok_or_else(|| CorpusError::parse(lineno, "expected ` - <CATEGORY>` after answers"))?
            .trim();
        // Reference corpus lines end with a period.
        let cat = cat.strip_suffix('.').unwrap_or(cat).trim();
        if cat.is_empty() {
            return Err(CorpusError::parse(lineno, "empty category"));
        }
        Some(cat.to_string())
    };

    Ok(QuestionRecord::new(id, question, answers, category))
}

/// Inverse of [`parse_gold_qa`].
pub fn render_gold_qa(records: &[QuestionRecord]) -> String {
    let mut out = String::new();
    for r in records {
        out.push_str("Question ");
        out.push_str(&r.id);
        out.push_str(". Q:");
        out.push_str(&r.text);
        out.push_str(" -");
        for a in &r.gold_answers {
            out.push_str(" {");
            out.push_str(a);
            out.push('}');
        }
        if let Some(cat) = &r.category {
            out.push_str(" - ");
            out.push_str(cat);
        }
        out.push('\n');
    }
    out
}

/// Parses TREC-style question lists: `id`, `type`, `question` separated by
/// tabs, or by whitespace when no tab is present (the question then takes the
/// remainder of the line).
pub fn parse_trec_questions(text: &str) -> Result<Vec<QuestionRecord>, CorpusError> {
    let mut records = Vec::new();
    let mut seen = HashSet::new();
    for (idx, raw) in text.lines().enumerate() {
        if is_comment_or_blank(raw) {
            continue;
        }
        let lineno = idx + 1;
        let line = raw.trim();
        let fields: Vec<&str> = if line.contains('\t') {
            line.splitn(3, '\t').map(str::trim).collect()
        } else {
            let mut it = line.splitn(3, char::is_whitespace);
            it.by_ref().map(str::trim).collect()
        };
        let field = |i: usize, name: &str| -> Result<&str, CorpusError> {
            match fields.get(i) {
                Some(f) if !f.is_empty() => Ok(*f),
                _ => Err(CorpusError::parse(lineno, format!("missing {name} field"))),
            }
        };
        let id = field(0, "id")?;
        let kind = field(1, "type")?;
        let question = field(2, "question")?;
        if !seen.insert(id.to_string()) {
            return Err(CorpusError::DuplicateId(id.to_string()));
        }
        records.push(QuestionRecord::new(
            id,
            question,
            Vec::new(),
            Some(kind.to_string()),
        ));
    }
    Ok(records)
}

/// Lowercases and strips surrounding punctuation. Returns `None` when nothing
/// alphanumeric remains.
pub fn normalize_word(word: &str) -> Option<String> {
    let trimmed = word.trim_matches(|c: char| !c.is_alphanumeric());
    if trimmed.is_empty() {
        None
    } else {
        Some(trimmed.to_lowercase())
    }
}

/// Document-frequency statistics: `total_docs` documents, and for each word
/// the number of documents that contain it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TermStats {
    total_docs: u64,
    doc_freq: HashMap<String, u64>,
}

impl TermStats {
    pub fn build<I, S>(documents: I) -> Result<Self, CorpusError>
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        let mut total_docs = 0u64;
        let mut doc_freq: HashMap<String, u64> = HashMap::new();
        let mut seen = HashSet::new();
        for doc in documents {
            total_docs += 1;
            seen.clear();
            for word in doc.as_ref().split_whitespace().filter_map(normalize_word) {
                if seen.insert(word.clone()) {
                    *doc_freq.entry(word).or_insert(0) += 1;
                }
            }
        }
        if total_docs == 0 {
            return Err(CorpusError::NoDocuments);
        }
        Ok(TermStats {
            total_docs,
            doc_freq,
        })
    }

    pub fn from_parts(total_docs: u64, doc_freq: HashMap<String, u64>) -> Result<Self, CorpusError> {
        if total_docs == 0 {
            return Err(CorpusError::NoDocuments);
        }
        for (word, &count) in &doc_freq {
            if count == 0 || count > total_docs {
                return Err(CorpusError::parse(
                    0,
                    format!("document frequency {count} for `{word}` outside 1..={total_docs}"),
                ));
            }
        }
        Ok(TermStats {
            total_docs,
            doc_freq,
        })
    }

    pub fn total_docs(&self) -> u64 {
        self.total_docs
    }

    /// Number of indexed words.
    pub fn vocabulary_len(&self) -> usize {
        self.doc_freq.len()
    }

    /// Raw document frequency, `None` for unseen words.
    pub fn get(&self, word: &str) -> Option<u64> {
        self.doc_freq.get(word).copied()
    }

    /// Document frequency with unseen words smoothed to 1.
    pub fn doc_freq(&self, word: &str) -> u64 {
        self.get(word).unwrap_or(1)
    }

    /// Returns a copy with `N` and every count multiplied by `k`.
    pub fn scaled(&self, k: u64) -> TermStats {
        assert!(k >= 1, "scale factor must be positive");
        TermStats {
            total_docs: self.total_docs * k,
            doc_freq: self.doc_freq.iter().map(|(w, c)| (w.clone(), c * k)).collect(),
        }
    }

    pub fn render(&self) -> String {
        let sorted: BTreeMap<_, _> = self.doc_freq.iter().collect();
        let mut out = format!("N={}\n", self.total_docs);
        for (word, count) in sorted {
            out.push_str(word);
            out.push('\t');
            out.push_str(&count.to_string());
            out.push('\n');
        }
        out
    }

    pub fn parse(text: &str) -> Result<Self, CorpusError> {
        let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
        let (hidx, header) = lines
            .next()
            .ok_or_else(|| CorpusError::parse(1, "missing `N=<int>` header"))?;
        let total_docs: u64 = header
            .trim()
            .strip_prefix("N=")
            .and_then(|n| n.parse().ok())
            .ok_or_else(|| CorpusError::parse(hidx + 1, "expected `N=<int>` header"))?;
        let mut doc_freq = HashMap::new();
        for (idx, line) in lines {
            let (word, count) = line
                .split_once('\t')
                .ok_or_else(|| CorpusError::parse(idx + 1, "expected `<word>\\t<count>`"))?;
            let count: u64 = count
                .trim()
                .parse()
                .map_err(|_| CorpusError::parse(idx + 1, format!("bad count `{count}`")))?;
            if count == 0 || count > total_docs {
                return Err(CorpusError::parse(
                    idx + 1,
                    format!("count {count} outside 1..={total_docs}"),
                ));
            }
            doc_freq.insert(word.to_string(), count);
        }
        TermStats::from_parts(total_docs, doc_freq)
    }

    pub fn load(path: &Path) -> Result<Self, CorpusError> {
        let text = fs::read_to_string(path).map_err(|e| CorpusError::io(path, e))?;
        TermStats::parse(&text)
    }

    pub fn save(&self, path: &Path) -> Result<(), CorpusError> {
        fs::write(path, self.render()).map_err(|e| CorpusError::io(path, e))
    }
}

/// One retrieved text excerpt.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SnippetRecord {
    #[serde(default)]
    pub question_id: Option<String>,
    pub url: String,
    pub title: String,
    pub text: String,
    pub rank: u32,
    pub source_tag: String,
}

impl SnippetRecord {
    fn validate(&self) -> Result<(), String> {
        if self.rank == 0 {
            return Err("rank must be >= 1".into());
        }
        if self.text.trim().is_empty() {
            return Err("empty snippet text".into());
        }
        Ok(())
    }
}

/// Immutable snippet collection with a per-question index.
#[derive(Debug, Clone, Default)]
pub struct SnippetStore {
    records: Vec<SnippetRecord>,
    by_question: HashMap<String, Vec<usize>>,
}

impl SnippetStore {
    pub fn from_records(records: Vec<SnippetRecord>) -> Result<Self, CorpusError> {
        for (i, r) in records.iter().enumerate() {
            r.validate().map_err(|message| CorpusError::Record {
                index: i + 1,
                message,
            })?;
        }
        let mut by_question: HashMap<String, Vec<usize>> = HashMap::new();
        for (i, r) in records.iter().enumerate() {
            if let Some(q) = &r.question_id {
                by_question.entry(q.clone()).or_default().push(i);
            }
        }
        for ids in by_question.values_mut() {
            ids.sort_by_key(|&i| (records[i].rank, i));
        }
        Ok(SnippetStore {
            records,
            by_question,
        })
    }

    pub fn parse(text: &str) -> Result<Self, CorpusError> {
        let mut records = Vec::new();
        for (idx, line) in text.lines().enumerate() {
            if line.trim().is_empty() {
                continue;
            }
            let record: SnippetRecord =
                serde_json::from_str(line).map_err(|e| CorpusError::Record {
                    index: idx + 1,
                    message: e.to_string(),
                })?;
            record.validate().map_err(|message| CorpusError::Record {
                index: idx + 1,
                message,
            })?;
            records.push(record);
        }
        SnippetStore::from_records(records)
    }

    pub fn load(path: &Path) -> Result<Self, CorpusError> {
        let text = fs::read_to_string(path).map_err(|e| CorpusError::io(path, e))?;
        SnippetStore::parse(&text)
    }

    pub fn records(&self) -> &[SnippetRecord] {
        &self.records
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    /// Snippets attached to `question_id`, ascending by rank. Unknown ids
    /// yield an empty list.
    pub fn lookup(&self, question_id: &str) -> Vec<&SnippetRecord> {
        self.by_question
            .get(question_id)
            .map(|ids| ids.iter().map(|&i| &self.records[i]).collect())
            .unwrap_or_default()
    }

    pub fn has_question(&self, question_id: &str) -> bool {
        self.by_question.contains_key(question_id)
    }
}

pub fn render_snippet_corpus(records: &[SnippetRecord]) -> String {
    let mut out = String::new();
    for r in records {
        out.push_str(&serde_json::to_string(r).expect("snippet records always serialize"));
        out.push('\n');
    }
    out
}

pub fn write_snippet_corpus(path: &Path, records: &[SnippetRecord]) -> Result<(), CorpusError> {
    fs::write(path, render_snippet_corpus(records)).map_err(|e| CorpusError::io(path, e))
}

/// Loads a question corpus in either supported format.
pub fn load_questions(path: &Path, format: QuestionFormat) -> Result<Vec<QuestionRecord>, CorpusError> {
    let text = fs::read_to_string(path).map_err(|e| CorpusError::io(path, e))?;
    match format {
        QuestionFormat::GoldQa => parse_gold_qa(&text),
        QuestionFormat::Trec => parse_trec_questions(&text),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QuestionFormat {
    GoldQa,
    Trec,
}

impl std::str::FromStr for QuestionFormat {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "gold-qa" | "gold" => Ok(QuestionFormat::GoldQa),
            "trec" => Ok(QuestionFormat::Trec),
            other => Err(format!("unknown question format `{other}` (gold-qa | trec)")),
        }
    }
}

/// Bucket counts in [`QuestionWord::ALL`] order.
pub fn question_word_histogram(records: &[QuestionRecord]) -> [usize; 8] {
    let mut counts = [0usize; 8];
    for r in records {
        let slot = QuestionWord::ALL
            .iter()
            .position(|w| *w == r.question_word)
            .expect("every bucket is listed");
        counts[slot] += 1;
    }
    counts
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_the_somalia_line() {
        let line = "Question 1. Q:What is the capital of Somalia - {Mogadishu Somalia} {Mogadishu} - LOCATION_CITY";
        let recs = parse_gold_qa(line).unwrap();
        assert_eq!(recs.len(), 1);
        assert_eq!(recs[0].id, "1");
        assert_eq!(recs[0].text, "What is the capital of Somalia");
        assert_eq!(recs[0].gold_answers, vec!["Mogadishu Somalia", "Mogadishu"]);
        assert_eq!(recs[0].category.as_deref(), Some("LOCATION_CITY"));
        assert_eq!(recs[0].question_word, QuestionWord::What);
    }

    #[test]
    fn trailing_period_after_category_is_accepted() {
        let line = "Question 1. Q:What is the capital of Somalia - {Mogadishu} - LOCATION_CITY.";
        let recs = parse_gold_qa(line).unwrap();
        assert_eq!(recs[0].category.as_deref(), Some("LOCATION_CITY"));
    }

    #[test]
    fn empty_file_is_empty_corpus() {
        assert!(parse_gold_qa("").unwrap().is_empty());
        assert!(parse_gold_qa("# only a comment\n\n").unwrap().is_empty());
    }

    #[test]
    fn missing_answer_section_reports_line() {
        let text = "Question 1. Q:Who? - {X} - HUM\nQuestion 2. Q:What is it - LOCATION";
        match parse_gold_qa(text) {
            Err(CorpusError::Parse { line, .. }) => assert_eq!(line, 2),
            other => panic!("expected parse error, got {other:?}"),
        }
    }

    #[test]
    fn empty_answer_group_is_rejected() {
        assert!(parse_gold_qa("Question 1. Q:Who is it - {} - HUM").is_err());
    }

    #[test]
    fn duplicate_gold_ids_are_rejected() {
        let text = "Question 1. Q:A - {x}\nQuestion 1. Q:B - {y}";
        assert!(matches!(parse_gold_qa(text), Err(CorpusError::DuplicateId(id)) if id == "1"));
    }

    #[test]
    fn trec_lines_keep_order() {
        let text = "201\tFACTOID\tWho is X?\n202\tFACTOID\tWhen was Y?\n203 FACTOID Where is Z?\n";
        let recs = parse_trec_questions(text).unwrap();
        let ids: Vec<_> = recs.iter().map(|r| r.id.as_str()).collect();
        assert_eq!(ids, ["201", "202", "203"]);
        assert_eq!(recs[2].text, "Where is Z?");
        assert!(recs.iter().all(|r| r.gold_answers.is_empty()));
        assert_eq!(recs[0].category.as_deref(), Some("FACTOID"));
    }

    #[test]
    fn trec_duplicate_and_missing_field() {
        let dup = "1\tF\tA?\n1\tF\tB?";
        match parse_trec_questions(dup) {
            Err(CorpusError::DuplicateId(id)) => assert_eq!(id, "1"),
            other => panic!("{other:?}"),
        }
        match parse_trec_questions("7\tFACTOID") {
            Err(CorpusError::Parse { line, .. }) => assert_eq!(line, 1),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn document_frequency_not_term_frequency() {
        let s = TermStats::build(["a b", "b c"]).unwrap();
        assert_eq!(s.total_docs(), 2);
        assert_eq!(s.doc_freq("a"), 1);
        assert_eq!(s.doc_freq("b"), 2);
        assert_eq!(s.doc_freq("c"), 1);

        let s = TermStats::build(["b b b"]).unwrap();
        assert_eq!(s.doc_freq("b"), 1);
    }

    #[test]
    fn unseen_words_smooth_to_one() {
        let s = TermStats::build(["Alpha, beta!"]).unwrap();
        assert_eq!(s.get("alpha"), Some(1));
        assert_eq!(s.get("gamma"), None);
        assert_eq!(s.doc_freq("gamma"), 1);
    }

    #[test]
    fn zero_documents_is_an_error() {
        assert!(matches!(
            TermStats::build(Vec::<String>::new()),
            Err(CorpusError::NoDocuments)
        ));
    }

    #[test]
    fn term_stats_file_round_trip() {
        let s = TermStats::build(["x y", "y z", "z"]).unwrap();
        let text = s.render();
        assert!(text.starts_with("N=3\n"));
        assert_eq!(TermStats::parse(&text).unwrap(), s);
        assert!(TermStats::parse("N=2\nx\t3\n").is_err());
        assert!(TermStats::parse("x\t1\n").is_err());
    }

    #[test]
    fn snippet_lookup_by_question() {
        let rec = |q: &str, rank, text: &str| SnippetRecord {
            question_id: Some(q.into()),
            url: format!("http://e/{rank}"),
            title: "t".into(),
            text: text.into(),
            rank,
            source_tag: "web".into(),
        };
        let store = SnippetStore::from_records(vec![rec("1", 2, "second"), rec("1", 1, "first")]).unwrap();
        let hits: Vec<_> = store.lookup("1").iter().map(|r| r.text.as_str()).collect();
        assert_eq!(hits, ["first", "second"]);
        assert!(store.lookup("nope").is_empty());
    }

    #[test]
    fn malformed_snippet_reports_record_index() {
        let good = r#"{"question_id":"1","url":"u","title":"t","text":"x","rank":1,"source_tag":"web"}"#;
        let bad = r#"{"question_id":"1","url":"u","title":"t","text":"x","rank":0,"source_tag":"web"}"#;
        match SnippetStore::parse(&format!("{good}\n{bad}\n")) {
            Err(CorpusError::Record { index, .. }) => assert_eq!(index, 2),
            other => panic!("{other:?}"),
        }
        match SnippetStore::parse("{not json}") {
            Err(CorpusError::Record { index, .. }) => assert_eq!(index, 1),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn missing_snippet_file_is_io_error() {
        assert!(matches!(
            SnippetStore::load(Path::new("/definitely/not/here.jsonl")),
            Err(CorpusError::Io { .. })
        ));
    }

    #[test]
    fn question_word_buckets() {
        assert_eq!(QuestionWord::of("Whom did he marry?"), QuestionWord::Who);
        assert_eq!(QuestionWord::of("Name a planet."), QuestionWord::Name);
        assert_eq!(QuestionWord::of("In what year?"), QuestionWord::Other);
        assert_eq!(QuestionWord::of("how many?"), QuestionWord::How);
    }
}
