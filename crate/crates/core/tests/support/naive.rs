//! Straight-line re-implementation of answer extraction over already
//! retrieved passages, used as an oracle for the staged pipeline.

use std::collections::{BTreeSet, HashMap};

use qa_core::corpora::TermStats;
use qa_core::extract::{ClosedClassTable, QuestionClass, QuestionContext};
use qa_core::interpret::Analyzer;
use qa_core::lexicon;

pub struct NaiveAnswer {
    pub ranked: Vec<(String, f64)>,
    pub dont_know: bool,
}

struct Tally {
    terms: Vec<String>,
    score: f64,
    snippets: BTreeSet<usize>,
    seen: usize,
    caps: usize,
}

fn numeric_word(w: &str) -> bool {
    w.chars().any(|c| c.is_ascii_digit()) || lexicon::is_written_number(w)
}

fn year(w: &str) -> bool {
    w.len() == 4 && w.parse::<u32>().is_ok_and(|y| (1000..=2099).contains(&y))
}

pub fn naive_answer(
    question: &str,
    passages: &[(String, f64)],
    stats: &TermStats,
    closed: &ClosedClassTable,
) -> NaiveAnswer {
    let analyzer = Analyzer::shared();
    let ctx = QuestionContext::new(analyzer.tokenize(question).unwrap(), closed);

    let mut table: HashMap<String, Tally> = HashMap::new();
    for (i, (text, weight)) in passages.iter().enumerate() {
        let Ok(tokens) = analyzer.tokenize(text) else { continue };
        let mut segment = Vec::new();
        let mut segments = Vec::new();
        for t in tokens {
            if t.normalized.chars().any(char::is_alphanumeric) {
                segment.push(t);
            } else {
                segments.push(std::mem::take(&mut segment));
            }
        }
        segments.push(segment);
        for seg in &segments {
            for a in 0..seg.len() {
                for b in a + 1..=seg.len().min(a + 4) {
                    let terms: Vec<String> = seg[a..b].iter().map(|t| t.normalized.clone()).collect();
                    let key = terms.join(" ");
                    let entry = table.entry(key).or_insert(Tally {
                        terms,
                        score: 0.0,
                        snippets: BTreeSet::new(),
                        seen: 0,
                        caps: 0,
                    });
                    entry.score += weight;
                    entry.snippets.insert(i);
                    entry.seen += 1;
                    if seg[a..b].iter().all(|t| t.surface.starts_with(char::is_uppercase)) {
                        entry.caps += 1;
                    }
                }
            }
        }
    }

    let mut keep: Vec<(String, Tally)> = Vec::new();
    for (key, t) in table {
        let first = &t.terms[0];
        let last = &t.terms[t.terms.len() - 1];
        if analyzer.is_stopword(first) || analyzer.is_stopword(last) {
            continue;
        }
        if !ctx.class.expects_focus_words() && t.terms.iter().any(|w| ctx.content_words.contains(w)) {
            continue;
        }
        if ctx.class.requires_number() && !t.terms.iter().any(|w| numeric_word(w)) {
            continue;
        }
        if let Some(kind) = &ctx.answer_type {
            if closed.has_type(kind) && closed.admits(kind, &key) != Some(true) {
                continue;
            }
        }
        keep.push((key, t));
    }

    let mut single: HashMap<String, f64> = HashMap::new();
    for (_, t) in &keep {
        if t.terms.len() == 1 {
            single.insert(t.terms[0].clone(), t.score);
        }
    }
    let n = stats.total_docs() as f64;
    let mut rows: Vec<(String, f64, bool, usize)> = Vec::new();
    for (key, t) in &keep {
        let mut s = t.score;
        if t.terms.len() > 1 {
            for w in &t.terms {
                s += single.get(w).copied().unwrap_or(0.0);
            }
        }
        let mut distinct: Vec<&String> = t.terms.iter().collect();
        distinct.sort();
        distinct.dedup();
        let mut idf = 0.0;
        for w in &distinct {
            idf += (n / stats.doc_freq(w) as f64).ln();
        }
        let score = s * (1.0 / distinct.len() as f64) * idf;
        let preferred = match ctx.class {
            QuestionClass::When => t.terms.iter().any(|w| year(w)),
            QuestionClass::Who | QuestionClass::Where => {
                2 * t.caps > t.seen && t.terms.iter().all(|w| w.chars().all(char::is_alphabetic))
            }
            QuestionClass::HowMany | QuestionClass::HowOld | QuestionClass::HowLong | QuestionClass::HowHot => {
                numeric_word(&t.terms[0])
            }
            _ => false,
        };
        rows.push((key.clone(), score, preferred, t.snippets.len()));
    }
    rows.sort_by(|a, b| {
        b.2.cmp(&a.2)
            .then(b.1.partial_cmp(&a.1).unwrap())
            .then(a.0.cmp(&b.0))
    });
    let ranked: Vec<(String, f64)> = rows
        .into_iter()
        .filter(|r| r.3 >= 2)
        .map(|r| (r.0, r.1))
        .collect();
    NaiveAnswer {
        dont_know: ranked.is_empty(),
        ranked,
    }
}
