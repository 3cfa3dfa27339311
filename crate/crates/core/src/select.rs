//! Alternative answer-selection strategies over a scored candidate list.
//!
//! * `justask`: canonicalize numeric answers, cluster similar answers by
//!   Levenshtein or overlap distance, drop clusters that echo the question,
//!   and return the longest member of the largest surviving cluster.
//! * `ephyra`: a filter chain. Sort by score, merge answers whose content
//!   words share stems, drop malformed answers, cap the output at a number
//!   of non-whitespace characters, apply a score threshold, and fall back to
//!   `NIL`.
//! * `aranea-top`: the extraction pipeline's own support-gated ranking.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::extract::Candidate;
use crate::interpret::Analyzer;
use crate::lexicon;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScoredAnswer {
    pub text: String,
    pub score: f64,
}

impl ScoredAnswer {
    pub fn new(text: impl Into<String>, score: f64) -> Self {
        ScoredAnswer {
            text: text.into(),
            score,
        }
    }
}

impl From<&Candidate> for ScoredAnswer {
    fn from(c: &Candidate) -> Self {
        ScoredAnswer::new(c.surface.clone(), c.score)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Strategy {
    Justask,
    Ephyra,
    AraneaTop,
}

impl FromStr for Strategy {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "justask" => Ok(Strategy::Justask),
            "ephyra" => Ok(Strategy::Ephyra),
            "aranea-top" | "aranea" => Ok(Strategy::AraneaTop),
            other => Err(format!("unknown strategy `{other}` (justask | ephyra | aranea-top)")),
        }
    }
}

impl fmt::Display for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Strategy::Justask => "justask",
            Strategy::Ephyra => "ephyra",
            Strategy::AraneaTop => "aranea-top",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Distance {
    Levenshtein,
    Overlap,
}

impl FromStr for Distance {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "levenshtein" => Ok(Distance::Levenshtein),
            "overlap" => Ok(Distance::Overlap),
            other => Err(format!("unknown distance `{other}` (levenshtein | overlap)")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SelectionConfig {
    pub strategy: Strategy,
    pub distance: Distance,
    pub distance_threshold: f64,
    pub score_threshold: f64,
    pub max_output_chars: usize,
}

impl Default for SelectionConfig {
    fn default() -> Self {
        SelectionConfig {
            strategy: Strategy::AraneaTop,
            distance: Distance::Levenshtein,
            distance_threshold: 2.0,
            score_threshold: 0.0,
            max_output_chars: 7000,
        }
    }
}

impl SelectionConfig {
    /// Default threshold for the given distance: 2 edits, or 0.5 overlap.
    pub fn with_distance(mut self, distance: Distance) -> Self {
        self.distance = distance;
        self.distance_threshold = match distance {
            Distance::Levenshtein => 2.0,
            Distance::Overlap => 0.5,
        };
        self
    }

    pub fn validate(&self) -> Result<(), String> {
        if !(0.0..).contains(&self.distance_threshold) || !(0.0..).contains(&self.score_threshold) {
            return Err("thresholds must be non-negative".into());
        }
        if self.max_output_chars == 0 {
            return Err("max_output_chars must be at least 1".into());
        }
        Ok(())
    }
}

fn words_of(text: &str) -> Vec<String> {
    Analyzer::shared().words(text)
}

fn category_kind(category: Option<&str>) -> Option<&'static str> {
    let c = category?.to_ascii_uppercase().replace(['_', ' '], ":");
    match c.as_str() {
        "NUMERIC:COUNT" | "NUM:COUNT" => Some("count"),
        "NUMERIC:DATE" | "NUM:DATE" => Some("date"),
        _ => None,
    }
}

fn parse_count(text: &str) -> Option<u64> {
    let words = words_of(text);
    if words.is_empty() {
        return None;
    }
    if words.len() == 1 && lexicon::is_numeral(&words[0]) && !words[0].contains('.') {
        return words[0].replace(',', "").parse().ok();
    }
    let refs: Vec<&str> = words.iter().map(String::as_str).collect();
    lexicon::parse_written_number(&refs)
}

fn parse_day(word: &str) -> Option<u32> {
    let digits = word
        .strip_suffix("st")
        .or_else(|| word.strip_suffix("nd"))
        .or_else(|| word.strip_suffix("rd"))
        .or_else(|| word.strip_suffix("th"))
        .unwrap_or(word);
    digits.parse().ok().filter(|d| (1..=31).contains(d))
}

fn parse_year(word: &str) -> Option<u32> {
    if word.len() == 4 || word.len() == 3 {
        word.parse().ok()
    } else {
        None
    }
}

/// Recognizes `July 4, 1776`, `4 July 1776`, `July 1776`, `July 4`, `1776`
/// and ISO `1776-07-04`.
fn parse_date(text: &str) -> Option<(Option<u32>, Option<u32>, Option<u32>)> {
    let trimmed = text.trim();
    let iso: Vec<&str> = trimmed.split('-').collect();
    if iso.len() == 3 && iso.iter().all(|p| p.chars().all(|c| c.is_ascii_digit()) && !p.is_empty()) {
        let y = parse_year(iso[0])?;
        let m: u32 = iso[1].parse().ok().filter(|m| (1..=12).contains(m))?;
        let d = parse_day(iso[2])?;
        return Some((Some(y), Some(m), Some(d)));
    }
    let words: Vec<String> = words_of(trimmed);
    let words: Vec<&str> = words.iter().map(String::as_str).filter(|w| *w != "of").collect();
    match words.as_slice() {
        [y] => parse_year(y).map(|y| (Some(y), None, None)),
        [a, b] => {
            if let Some(m) = lexicon::month_number(a) {
                if let Some(y) = parse_year(b) {
                    return Some((Some(y), Some(m), None));
                }
                return parse_day(b).map(|d| (None, Some(m), Some(d)));
            }
            let m = lexicon::month_number(b)?;
            parse_day(a).map(|d| (None, Some(m), Some(d)))
        }
        [a, b, c] => {
            if let Some(m) = lexicon::month_number(a) {
                Some((Some(parse_year(c)?), Some(m), Some(parse_day(b)?)))
            } else {
                let m = lexicon::month_number(b)?;
                Some((Some(parse_year(c)?), Some(m), Some(parse_day(a)?)))
            }
        }
        _ => None,
    }
}

fn format_date((y, m, d): (Option<u32>, Option<u32>, Option<u32>)) -> String {
    match (y, m, d) {
        (Some(y), Some(m), Some(d)) => format!("{y:04}-{m:02}-{d:02}"),
        (Some(y), Some(m), None) => format!("{y:04}-{m:02}"),
        (Some(y), None, _) => format!("{y:04}"),
        (None, Some(m), Some(d)) => format!("--{m:02}-{d:02}"),
        (None, Some(m), None) => format!("--{m:02}"),
        (None, None, _) => String::new(),
    }
}

/// Canonical form for counts (`seventy two` -> `72`) and dates
/// (`July 4, 1776` -> `1776-07-04`). Other categories, and values that do
/// not parse, come back unchanged.
pub fn normalize_numeric(text: &str, category: Option<&str>) -> String {
    match category_kind(category) {
        Some("count") => parse_count(text).map(|n| n.to_string()),
        Some("date") => parse_date(text).map(format_date).filter(|s| !s.is_empty()),
        _ => None,
    }
    .unwrap_or_else(|| text.to_string())
}

/// Unit-cost edit distance over Unicode scalar values.
pub fn levenshtein(a: &str, b: &str) -> usize {
    let a: Vec<char> = a.chars().collect();
    let b: Vec<char> = b.chars().collect();
    if a.is_empty() {
        return b.len();
    }
    let mut prev: Vec<usize> = (0..=b.len()).collect();
    let mut cur = vec![0; b.len() + 1];
    for (i, ca) in a.iter().enumerate() {
        cur[0] = i + 1;
        for (j, cb) in b.iter().enumerate() {
            let subst = prev[j] + usize::from(ca != cb);
            cur[j + 1] = subst.min(prev[j + 1] + 1).min(cur[j] + 1);
        }
        std::mem::swap(&mut prev, &mut cur);
    }
    prev[b.len()]
}

/// `1 - |a ∩ b| / min(|a|, |b|)`; 0 when both sets are empty, 1 when only
/// one is.
pub fn overlap_distance<T: Ord>(a: &BTreeSet<T>, b: &BTreeSet<T>) -> f64 {
    if a.is_empty() && b.is_empty() {
        return 0.0;
    }
    let smaller = a.len().min(b.len());
    if smaller == 0 {
        return 1.0;
    }
    let shared = a.intersection(b).count();
    1.0 - shared as f64 / smaller as f64
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnswerCluster {
    pub members: Vec<ScoredAnswer>,
    pub representative: ScoredAnswer,
    pub score: f64,
}

fn distance(a: &str, b: &str, kind: Distance) -> f64 {
    match kind {
        Distance::Levenshtein => levenshtein(&a.to_lowercase(), &b.to_lowercase()) as f64,
        Distance::Overlap => {
            let sa: BTreeSet<String> = words_of(a).into_iter().collect();
            let sb: BTreeSet<String> = words_of(b).into_iter().collect();
            overlap_distance(&sa, &sb)
        }
    }
}

fn find(parent: &mut [usize], mut x: usize) -> usize {
    while parent[x] != x {
        parent[x] = parent[parent[x]];
        x = parent[x];
    }
    x
}

/// Single-link clustering: answers within `distance_threshold` of each other
/// end up in the same cluster. Cluster score is its member count; the
/// representative is the longest member, ties going to the more frequent
/// surface and then the lexicographically first.
/// Clusters come back ordered by score, then representative.
pub fn cluster(answers: &[ScoredAnswer], config: &SelectionConfig) -> Vec<AnswerCluster> {
    let n = answers.len();
    let mut parent: Vec<usize> = (0..n).collect();
    for i in 0..n {
        for j in i + 1..n {
            if distance(&answers[i].text, &answers[j].text, config.distance) <= config.distance_threshold {
                let (ri, rj) = (find(&mut parent, i), find(&mut parent, j));
                if ri != rj {
                    parent[rj.max(ri)] = ri.min(rj);
                }
            }
        }
    }
    let mut groups: BTreeMap<usize, Vec<ScoredAnswer>> = BTreeMap::new();
    for i in 0..n {
        let root = find(&mut parent, i);
        groups.entry(root).or_default().push(answers[i].clone());
    }
    let mut clusters: Vec<AnswerCluster> = groups
        .into_values()
        .map(|members| {
            let representative = members
                .iter()
                .max_by(|a, b| {
                    let freq = |x: &ScoredAnswer| members.iter().filter(|m| m.text == x.text).count();
                    a.text
                        .chars()
                        .count()
                        .cmp(&b.text.chars().count())
                        .then_with(|| freq(a).cmp(&freq(b)))
                        .then_with(|| b.text.cmp(&a.text))
                })
                .expect("clusters are non-empty")
                .clone();
            AnswerCluster {
                score: members.len() as f64,
                members,
                representative,
            }
        })
        .collect();
    clusters.sort_by(|a, b| {
        b.score
            .total_cmp(&a.score)
            .then_with(|| a.representative.text.cmp(&b.representative.text))
    });
    clusters
}

/// True when the answer's words appear as a contiguous run in the question.
pub fn contained_in_question(answer: &str, question: &str) -> bool {
    let a = words_of(answer);
    let q = words_of(question);
    !a.is_empty() && q.len() >= a.len() && q.windows(a.len()).any(|w| w == a.as_slice())
}

/// Cluster-based selection; `None` means no answer.
pub fn justask_select(
    answers: &[ScoredAnswer],
    question: &str,
    category: Option<&str>,
    config: &SelectionConfig,
) -> Option<String> {
    let normalized: Vec<ScoredAnswer> = answers
        .iter()
        .map(|a| ScoredAnswer::new(normalize_numeric(&a.text, category), a.score))
        .collect();
    cluster(&normalized, config)
        .into_iter()
        .find(|c| !c.members.iter().any(|m| contained_in_question(&m.text, question)))
        .map(|c| c.representative.text)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum EphyraResult {
    Answers(Vec<ScoredAnswer>),
    Nil,
}

impl EphyraResult {
    pub fn answers(&self) -> &[ScoredAnswer] {
        match self {
            EphyraResult::Answers(a) => a,
            EphyraResult::Nil => &[],
        }
    }
}

fn sort_desc(answers: &mut [ScoredAnswer]) {
    answers.sort_by(|a, b| b.score.total_cmp(&a.score).then_with(|| a.text.cmp(&b.text)));
}

fn stem_key(text: &str, analyzer: &Analyzer) -> BTreeSet<String> {
    analyzer
        .words(text)
        .iter()
        .filter(|w| !analyzer.is_stopword(w))
        .map(|w| stem(w))
        .collect()
}

/// Merges answers whose content-word stem sets coincide: the higher-ranked
/// answer absorbs the lower-ranked one's score. The result is re-sorted.
pub fn merge_duplicates(answers: Vec<ScoredAnswer>, analyzer: &Analyzer) -> Vec<ScoredAnswer> {
    let mut sorted = answers;
    sort_desc(&mut sorted);
    let mut out: Vec<ScoredAnswer> = Vec::with_capacity(sorted.len());
    let mut keys: Vec<BTreeSet<String>> = Vec::with_capacity(sorted.len());
    for a in sorted {
        let key = stem_key(&a.text, analyzer);
        match keys.iter().position(|k| !key.is_empty() && *k == key) {
            Some(i) => out[i].score += a.score,
            None => {
                keys.push(key);
                out.push(a);
            }
        }
    }
    sort_desc(&mut out);
    out
}

/// Empty, punctuation-only, or bounded by a stopword.
pub fn is_malformed(text: &str, analyzer: &Analyzer) -> bool {
    let words = analyzer.words(text);
    match (words.first(), words.last()) {
        (Some(f), Some(l)) => analyzer.is_stopword(f) || analyzer.is_stopword(l),
        _ => true,
    }
}

pub fn non_whitespace_len(text: &str) -> usize {
    text.chars().filter(|c| !c.is_whitespace()).count()
}

/// Keeps the longest prefix whose total non-whitespace length is at most
/// `max_chars`.
pub fn truncate_output(answers: Vec<ScoredAnswer>, max_chars: usize) -> Vec<ScoredAnswer> {
    let mut total = 0;
    let mut out = Vec::new();
    for a in answers {
        total += non_whitespace_len(&a.text);
        if total > max_chars {
            break;
        }
        out.push(a);
    }
    out
}

pub fn ephyra_select(answers: &[ScoredAnswer], config: &SelectionConfig) -> EphyraResult {
    let analyzer = Analyzer::shared();
    let merged = merge_duplicates(answers.to_vec(), analyzer);
    let wellformed: Vec<ScoredAnswer> = merged.into_iter().filter(|a| !is_malformed(&a.text, analyzer)).collect();
    let kept: Vec<ScoredAnswer> = truncate_output(wellformed, config.max_output_chars)
        .into_iter()
        .filter(|a| a.score >= config.score_threshold)
        .collect();
    if kept.is_empty() {
        EphyraResult::Nil
    } else {
        EphyraResult::Answers(kept)
    }
}

fn is_vowel(c: u8) -> bool {
    matches!(c, b'a' | b'e' | b'i' | b'o' | b'u')
}

fn strip_once(word: &str) -> Option<String> {
    const SUFFIXES: [&str; 6] = ["ing", "ed", "es", "ly", "er", "s"];
    let bytes = word.as_bytes();
    for suffix in SUFFIXES {
        let Some(base) = word.strip_suffix(suffix) else {
            continue;
        };
        if base.len() < 3 || !base.bytes().any(is_vowel) {
            continue;
        }
        if suffix == "s" && matches!(bytes[bytes.len() - 2], b's' | b'u' | b'i') {
            continue;
        }
        if suffix == "es" && !matches!(base.as_bytes()[base.len() - 1], b's' | b'x' | b'z' | b'h') {
            continue;
        }
        let b = base.as_bytes();
        let n = b.len();
        // hopping -> hopp -> hop, but keep ll/ss/zz (calling -> call)
        if matches!(suffix, "ing" | "ed" | "er")
            && b[n - 1] == b[n - 2]
            && !is_vowel(b[n - 1])
            && !matches!(b[n - 1], b'l' | b's' | b'z')
        {
            return Some(base[..n - 1].to_string());
        }
        return Some(base.to_string());
    }
    None
}

/// Suffix-stripping stemmer. Rules repeat until nothing changes, which makes
/// the result idempotent. Non-ASCII words are returned lowercased.
pub fn stem(word: &str) -> String {
    let mut current = word.to_lowercase();
    if !current.is_ascii() {
        return current;
    }
    while let Some(next) = strip_once(&current) {
        current = next;
    }
    current
}
