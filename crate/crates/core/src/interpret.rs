//! Question interpretation: tokenizing, coarse part-of-speech tagging and
//! turning a question into baseline, keyword, exact and inexact queries.
//!
//! Exact queries come from reformulation patterns matched over the
//! question's tokens and tags. A pattern rewrite places the anticipated
//! answer at a `?y` slot, e.g. `where is $1 => $1 is located in ?y`. The
//! inexact sibling keeps the same words without the slot and is matched as
//! an unordered bag. Prepositions directly next to the slot introduce the
//! answer and belong to it, so they are not part of the inexact bag.

use std::collections::HashSet;
use std::fmt;
use std::path::Path;
use std::sync::LazyLock;

use serde::{Deserialize, Serialize};

use crate::lexicon;

const DEFAULT_STOPWORDS: &str = include_str!("../data/stopwords.txt");
const DEFAULT_PATTERNS: &str = include_str!("../data/patterns.txt");

#[derive(Debug, thiserror::Error)]
pub enum InterpretError {
    #[error("question is empty")]
    EmptyQuestion,
    #[error("no content words left after stopword removal")]
    NoContentWords,
    #[error("pattern line {line}: {message}")]
    Pattern { line: usize, message: String },
    #[error("{path}: {message}")]
    Io { path: String, message: String },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Pos {
    #[serde(rename = "DET")]
    Det,
    #[serde(rename = "NOUN")]
    Noun,
    #[serde(rename = "VERB-BE")]
    VerbBe,
    #[serde(rename = "VERB")]
    Verb,
    #[serde(rename = "ADJ")]
    Adj,
    #[serde(rename = "ADV")]
    Adv,
    #[serde(rename = "PREP")]
    Prep,
    #[serde(rename = "WH")]
    Wh,
    #[serde(rename = "NUM")]
    Num,
    #[serde(rename = "OTHER")]
    Other,
}

impl Pos {
    pub fn name(self) -> &'static str {
        match self {
            Pos::Det => "DET",
            Pos::Noun => "NOUN",
            Pos::VerbBe => "VERB-BE",
            Pos::Verb => "VERB",
            Pos::Adj => "ADJ",
            Pos::Adv => "ADV",
            Pos::Prep => "PREP",
            Pos::Wh => "WH",
            Pos::Num => "NUM",
            Pos::Other => "OTHER",
        }
    }

    fn from_name(name: &str) -> Option<Pos> {
        Some(match name {
            "DET" => Pos::Det,
            "NOUN" => Pos::Noun,
            "VERB-BE" => Pos::VerbBe,
            "VERB" => Pos::Verb,
            "ADJ" => Pos::Adj,
            "ADV" => Pos::Adv,
            "PREP" => Pos::Prep,
            "WH" => Pos::Wh,
            "NUM" => Pos::Num,
            "OTHER" => Pos::Other,
            _ => return None,
        })
    }
}

impl fmt::Display for Pos {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Token {
    pub surface: String,
    pub normalized: String,
    pub pos: Pos,
    pub is_stopword: bool,
}

impl Token {
    /// True for tokens carrying at least one letter or digit.
    pub fn is_word(&self) -> bool {
        self.normalized.chars().any(char::is_alphanumeric)
    }

    /// True when the surface form starts with an uppercase letter.
    pub fn is_capitalized(&self) -> bool {
        self.surface.chars().next().is_some_and(char::is_uppercase)
    }
}

/// Coarse tag for a single lowercase word: closed lexicons first, then
/// suffix heuristics, then `NOUN`.
pub fn pos_of(word: &str) -> Pos {
    if !word.chars().any(char::is_alphanumeric) {
        return Pos::Other;
    }
    if lexicon::contains(lexicon::WH_WORDS, word) {
        Pos::Wh
    } else if lexicon::contains(lexicon::BE_FORMS, word) {
        Pos::VerbBe
    } else if lexicon::contains(lexicon::DETERMINERS, word) {
        Pos::Det
    } else if lexicon::contains(lexicon::PREPOSITIONS, word) {
        Pos::Prep
    } else if lexicon::contains(lexicon::VERBS, word) {
        Pos::Verb
    } else if lexicon::contains(lexicon::ADVERBS, word) {
        Pos::Adv
    } else if lexicon::contains(lexicon::ADJECTIVES, word) {
        Pos::Adj
    } else if lexicon::is_numeral(word) || lexicon::is_written_number(word) {
        Pos::Num
    } else if word.len() >= 5 && (word.ends_with("ed") || word.ends_with("ing")) {
        Pos::Verb
    } else if word.len() >= 5 && word.ends_with("ly") {
        Pos::Adv
    } else if word.len() >= 6
        && ["ous", "ful", "able", "ible", "less"]
            .iter()
            .any(|s| word.ends_with(s))
    {
        Pos::Adj
    } else {
        Pos::Noun
    }
}

/// Fills in `pos` for every token.
pub fn tag_pos(mut tokens: Vec<Token>) -> Vec<Token> {
    for t in &mut tokens {
        t.pos = pos_of(&t.normalized);
    }
    tokens
}

/// Tokenizer plus stopword list.
#[derive(Debug, Clone)]
pub struct Analyzer {
    stopwords: HashSet<String>,
}

static DEFAULT_ANALYZER: LazyLock<Analyzer> =
    LazyLock::new(|| Analyzer::from_stopword_text(DEFAULT_STOPWORDS));

impl Default for Analyzer {
    fn default() -> Self {
        DEFAULT_ANALYZER.clone()
    }
}

impl Analyzer {
    pub fn shared() -> &'static Analyzer {
        &DEFAULT_ANALYZER
    }

    pub fn from_stopword_text(text: &str) -> Self {
        let stopwords = text
            .lines()
            .map(str::trim)
            .filter(|l| !l.is_empty() && !l.starts_with('#'))
            .map(str::to_lowercase)
            .collect();
        Analyzer { stopwords }
    }

    pub fn load_stopwords(path: &Path) -> Result<Self, InterpretError> {
        let text = std::fs::read_to_string(path).map_err(|e| InterpretError::Io {
            path: path.display().to_string(),
            message: e.to_string(),
        })?;
        Ok(Self::from_stopword_text(&text))
    }

    pub fn is_stopword(&self, word: &str) -> bool {
        self.stopwords.contains(word)
    }

    pub fn stopwords(&self) -> impl Iterator<Item = &str> {
        self.stopwords.iter().map(String::as_str)
    }

    /// Splits text into tagged tokens. Punctuation becomes separate `OTHER`
    /// tokens except apostrophes and hyphens inside words and `.`/`,` inside
    /// numbers. Trailing question marks are dropped.
    pub fn tokenize(&self, text: &str) -> Result<Vec<Token>, InterpretError> {
        let surfaces = split_surfaces(text);
        let mut end = surfaces.len();
        while end > 0 && surfaces[end - 1] == "?" {
            end -= 1;
        }
        if end == 0 {
            return Err(InterpretError::EmptyQuestion);
        }
        let tokens = surfaces[..end]
            .iter()
            .map(|s| {
                let normalized = s.to_lowercase();
                Token {
                    is_stopword: self.is_stopword(&normalized),
                    surface: s.clone(),
                    normalized,
                    pos: Pos::Other,
                }
            })
            .collect();
        Ok(tag_pos(tokens))
    }

    /// Lowercased word tokens of arbitrary text (punctuation removed); the
    /// empty list for text without words.
    pub fn words(&self, text: &str) -> Vec<String> {
        split_surfaces(text)
            .into_iter()
            .filter(|s| s.chars().any(char::is_alphanumeric))
            .map(|s| s.to_lowercase())
            .collect()
    }
}

/// Tokenizes with the bundled stopword list.
pub fn tokenize(question: &str) -> Result<Vec<Token>, InterpretError> {
    Analyzer::shared().tokenize(question)
}

fn split_surfaces(text: &str) -> Vec<String> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let mut current = String::new();
    for (i, &c) in chars.iter().enumerate() {
        let next = chars.get(i + 1).copied();
        if c.is_alphanumeric() {
            current.push(c);
        } else if c.is_whitespace() {
            if !current.is_empty() {
                out.push(std::mem::take(&mut current));
            }
        } else if matches!(c, '\'' | '\u{2019}' | '-')
            && !current.is_empty()
            && next.is_some_and(char::is_alphanumeric)
        {
            current.push(if c == '-' { '-' } else { '\'' });
        } else if matches!(c, '.' | ',')
            && current.chars().last().is_some_and(|p| p.is_ascii_digit())
            && next.is_some_and(|n| n.is_ascii_digit())
        {
            current.push(c);
        } else {
            if !current.is_empty() {
                out.push(std::mem::take(&mut current));
            }
            out.push(c.to_string());
        }
    }
    if !current.is_empty() {
        out.push(current);
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum QueryKind {
    Baseline,
    Exact,
    Inexact,
    Keyword,
}

impl QueryKind {
    pub fn name(self) -> &'static str {
        match self {
            QueryKind::Baseline => "baseline",
            QueryKind::Exact => "exact",
            QueryKind::Inexact => "inexact",
            QueryKind::Keyword => "keyword",
        }
    }
}

/// A retrieval request. For exact queries `slot` is the index in `terms`
/// where the answer is expected: `terms[..slot]` precede it and
/// `terms[slot..]` follow it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Query {
    pub kind: QueryKind,
    pub terms: Vec<String>,
    pub slot: Option<usize>,
    pub weight: f64,
}

impl Query {
    /// Cache-key form: kind prefix, space-joined terms and the `?y` marker.
    pub fn canonical(&self) -> String {
        let mut parts: Vec<&str> = Vec::with_capacity(self.terms.len() + 1);
        for (i, t) in self.terms.iter().enumerate() {
            if self.slot == Some(i) {
                parts.push("?y");
            }
            parts.push(t);
        }
        if self.slot == Some(self.terms.len()) {
            parts.push("?y");
        }
        format!("{}:{}", self.kind.name(), parts.join(" "))
    }

    /// Text form without the kind prefix.
    pub fn text(&self) -> String {
        let c = self.canonical();
        c.split_once(':').map(|(_, t)| t.to_string()).unwrap_or(c)
    }

    /// Range of `terms` occupied by prepositions adjacent to the slot.
    pub fn slot_bound(&self) -> std::ops::Range<usize> {
        let Some(slot) = self.slot else {
            return 0..0;
        };
        let mut start = slot;
        while start > 0 && pos_of(&self.terms[start - 1]) == Pos::Prep {
            start -= 1;
        }
        let mut end = slot;
        while end < self.terms.len() && pos_of(&self.terms[end]) == Pos::Prep {
            end += 1;
        }
        start..end
    }

    /// Words before and after the slot. For slot-free queries everything is
    /// on the left.
    pub fn split_at_slot(&self) -> (&[String], &[String]) {
        match self.slot {
            Some(s) => self.terms.split_at(s),
            None => (&self.terms[..], &[]),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QueryWeights {
    pub base: f64,
    pub exact: f64,
}

impl Default for QueryWeights {
    fn default() -> Self {
        QueryWeights {
            base: 1.0,
            exact: 5.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
enum MatchElem {
    Literal(String),
    Class(Pos),
    Span(usize),
    ClassCapture(usize, Pos),
}

#[derive(Debug, Clone, PartialEq)]
enum RewriteElem {
    Literal(String),
    Capture(usize),
    Slot,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReformulationPattern {
    pub name: String,
    matcher: Vec<MatchElem>,
    rewrite: Vec<RewriteElem>,
}

type Captures = [Option<(usize, usize)>; 10];

impl ReformulationPattern {
    /// Parses `name :: match-template => rewrite-template`.
    pub fn parse(line: &str) -> Result<Self, String> {
        let (name, rest) = line
            .split_once("::")
            .ok_or("expected `name :: match => rewrite`")?;
        let (lhs, rhs) = rest.split_once("=>").ok_or("missing `=>`")?;
        let name = name.trim();
        if name.is_empty() {
            return Err("empty pattern name".into());
        }

        let mut bound = [false; 10];
        let mut matcher = Vec::new();
        for piece in lhs.split_whitespace() {
            let elem = if let Some(class) = piece.strip_prefix('%').and_then(|p| p.strip_suffix('%')) {
                MatchElem::Class(Pos::from_name(class).ok_or(format!("unknown class `{class}`"))?)
            } else if let Some(cap) = piece.strip_prefix('$') {
                let (num, class) = match cap.split_once(':') {
                    Some((n, c)) => (n, Some(c)),
                    None => (cap, None),
                };
                let idx = parse_capture_index(num)?;
                if bound[idx] {
                    return Err(format!("capture ${idx} bound twice"));
                }
                bound[idx] = true;
                match class {
                    Some(c) => MatchElem::ClassCapture(
                        idx,
                        Pos::from_name(c).ok_or(format!("unknown class `{c}`"))?,
                    ),
                    None => MatchElem::Span(idx),
                }
            } else {
                MatchElem::Literal(piece.to_lowercase())
            };
            matcher.push(elem);
        }
        if matcher.is_empty() {
            return Err("empty match template".into());
        }

        let mut rewrite = Vec::new();
        for piece in rhs.split_whitespace() {
            let elem = if piece == "?y" {
                RewriteElem::Slot
            } else if let Some(cap) = piece.strip_prefix('$') {
                let idx = parse_capture_index(cap)?;
                if !bound[idx] {
                    return Err(format!("rewrite uses unbound capture ${idx}"));
                }
                RewriteElem::Capture(idx)
            } else {
                RewriteElem::Literal(piece.to_lowercase())
            };
            rewrite.push(elem);
        }
        let slots = rewrite.iter().filter(|e| **e == RewriteElem::Slot).count();
        if slots != 1 {
            return Err(format!("rewrite must contain exactly one ?y, found {slots}"));
        }
        Ok(ReformulationPattern {
            name: name.to_string(),
            matcher,
            rewrite,
        })
    }

    /// First match over word tokens, trying start positions left to right.
    /// The template must consume the question through its last word.
    fn find(&self, words: &[&Token]) -> Option<Captures> {
        (0..words.len()).find_map(|start| {
            let mut caps: Captures = [None; 10];
            match_from(&self.matcher, 0, words, start, &mut caps).then_some(caps)
        })
    }

    /// Applies the pattern, returning the rewritten terms and slot index.
    pub fn apply(&self, tokens: &[Token]) -> Option<(Vec<String>, usize)> {
        let words: Vec<&Token> = tokens.iter().filter(|t| t.is_word()).collect();
        let caps = self.find(&words)?;
        let mut terms = Vec::new();
        let mut slot = 0;
        for elem in &self.rewrite {
            match elem {
                RewriteElem::Literal(w) => terms.push(w.clone()),
                RewriteElem::Capture(i) => {
                    let (s, e) = caps[*i].expect("validated at parse time");
                    terms.extend(words[s..e].iter().map(|t| t.normalized.clone()));
                }
                RewriteElem::Slot => slot = terms.len(),
            }
        }
        Some((terms, slot))
    }
}

fn parse_capture_index(num: &str) -> Result<usize, String> {
    match num.parse::<usize>() {
        Ok(i) if (1..=9).contains(&i) => Ok(i),
        _ => Err(format!("capture index `{num}` must be 1..9")),
    }
}

fn match_from(elems: &[MatchElem], ei: usize, words: &[&Token], ti: usize, caps: &mut Captures) -> bool {
    let Some(elem) = elems.get(ei) else {
        return ti == words.len();
    };
    match elem {
        MatchElem::Literal(w) => {
            ti < words.len() && words[ti].normalized == *w && match_from(elems, ei + 1, words, ti + 1, caps)
        }
        MatchElem::Class(p) => {
            ti < words.len() && words[ti].pos == *p && match_from(elems, ei + 1, words, ti + 1, caps)
        }
        MatchElem::ClassCapture(i, p) => {
            if ti < words.len() && words[ti].pos == *p {
                caps[*i] = Some((ti, ti + 1));
                if match_from(elems, ei + 1, words, ti + 1, caps) {
                    return true;
                }
                caps[*i] = None;
            }
            false
        }
        MatchElem::Span(i) => {
            for end in ti + 1..=words.len() {
                caps[*i] = Some((ti, end));
                if match_from(elems, ei + 1, words, end, caps) {
                    return true;
                }
            }
            caps[*i] = None;
            false
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PatternTable {
    patterns: Vec<ReformulationPattern>,
}

static DEFAULT_PATTERNS_TABLE: LazyLock<PatternTable> =
    LazyLock::new(|| PatternTable::parse(DEFAULT_PATTERNS).expect("bundled pattern table parses"));

impl Default for PatternTable {
    fn default() -> Self {
        DEFAULT_PATTERNS_TABLE.clone()
    }
}

impl PatternTable {
    pub fn parse(text: &str) -> Result<Self, InterpretError> {
        let mut patterns = Vec::new();
        for (idx, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let p = ReformulationPattern::parse(line).map_err(|message| InterpretError::Pattern {
                line: idx + 1,
                message,
            })?;
            patterns.push(p);
        }
        Ok(PatternTable { patterns })
    }

    pub fn load(path: &Path) -> Result<Self, InterpretError> {
        let text = std::fs::read_to_string(path).map_err(|e| InterpretError::Io {
            path: path.display().to_string(),
            message: e.to_string(),
        })?;
        Self::parse(&text)
    }

    pub fn patterns(&self) -> &[ReformulationPattern] {
        &self.patterns
    }

    pub fn len(&self) -> usize {
        self.patterns.len()
    }

    pub fn is_empty(&self) -> bool {
        self.patterns.is_empty()
    }
}

/// One `(exact, inexact)` pair per matching pattern, in table order.
pub fn apply_patterns(tokens: &[Token], table: &PatternTable, weights: &QueryWeights) -> Vec<(Query, Query)> {
    table
        .patterns
        .iter()
        .filter_map(|p| p.apply(tokens))
        .map(|(terms, slot)| {
            let exact = Query {
                kind: QueryKind::Exact,
                terms,
                slot: Some(slot),
                weight: weights.exact,
            };
            let bound = exact.slot_bound();
            let inexact_terms = exact
                .terms
                .iter()
                .enumerate()
                .filter(|(i, _)| !bound.contains(i))
                .map(|(_, t)| t.clone())
                .collect();
            let inexact = Query {
                kind: QueryKind::Inexact,
                terms: inexact_terms,
                slot: None,
                weight: weights.base,
            };
            (exact, inexact)
        })
        .collect()
}

/// Content words of the question in their original order.
pub fn keyword_query(tokens: &[Token], weights: &QueryWeights) -> Result<Query, InterpretError> {
    let terms: Vec<String> = tokens
        .iter()
        .filter(|t| t.is_word() && !t.is_stopword)
        .map(|t| t.normalized.clone())
        .collect();
    if terms.is_empty() {
        return Err(InterpretError::NoContentWords);
    }
    Ok(Query {
        kind: QueryKind::Keyword,
        terms,
        slot: None,
        weight: weights.base,
    })
}

/// Builds the full query set for a question.
#[derive(Debug, Clone, Default)]
pub struct QueryGenerator {
    pub analyzer: Analyzer,
    pub patterns: PatternTable,
    pub weights: QueryWeights,
}

impl QueryGenerator {
    /// Baseline first, then keyword (when the question has content words),
    /// then each pattern's exact and inexact queries.
    pub fn generate(&self, question: &str) -> Result<Vec<Query>, InterpretError> {
        let tokens = self.analyzer.tokenize(question)?;
        Ok(self.generate_from_tokens(&tokens))
    }

    pub fn generate_from_tokens(&self, tokens: &[Token]) -> Vec<Query> {
        let mut queries = vec![Query {
            kind: QueryKind::Baseline,
            terms: tokens
                .iter()
                .filter(|t| t.is_word())
                .map(|t| t.normalized.clone())
                .collect(),
            slot: None,
            weight: self.weights.base,
        }];
        if let Ok(k) = keyword_query(tokens, &self.weights) {
            queries.push(k);
        }
        for (exact, inexact) in apply_patterns(tokens, &self.patterns, &self.weights) {
            queries.push(exact);
            queries.push(inexact);
        }
        queries
    }
}

/// [`QueryGenerator::generate`] with the bundled stopwords and patterns.
pub fn generate_queries(question: &str) -> Result<Vec<Query>, InterpretError> {
    static GENERATOR: LazyLock<QueryGenerator> = LazyLock::new(QueryGenerator::default);
    GENERATOR.generate(question)
}
