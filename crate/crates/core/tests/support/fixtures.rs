//! Judgement and passage fixtures built from reference counts.

use qa_core::corpora::QuestionWord;
use qa_core::evaluate::{JudgeVerdict, Judgement, PassageRow};

/// Correct answers sit at rank 1; wrong and unanswered questions have no
/// correct answer at any rank.
pub fn judgements(correct: usize, wrong: usize, no_answer: usize) -> Vec<Judgement> {
    let mut out = Vec::new();
    let verdicts = [
        (JudgeVerdict::Correct, correct, Some(1)),
        (JudgeVerdict::Wrong, wrong, None),
        (JudgeVerdict::NoAnswer, no_answer, None),
    ];
    for (verdict, n, rank) in verdicts {
        for _ in 0..n {
            let id = (out.len() + 1).to_string();
            out.push(Judgement::new(id, QuestionWord::Other, verdict, rank));
        }
    }
    out
}

/// Per question word: (correct, incorrect, no answer).
pub const WORD_BREAKDOWN: [(QuestionWord, usize, usize, usize); 8] = [
    (QuestionWord::Who, 23, 13, 0),
    (QuestionWord::When, 15, 10, 0),
    (QuestionWord::Where, 10, 12, 0),
    (QuestionWord::What, 19, 16, 15),
    (QuestionWord::Which, 3, 4, 1),
    (QuestionWord::How, 8, 18, 3),
    (QuestionWord::Name, 3, 2, 3),
    (QuestionWord::Other, 7, 12, 3),
];

pub const WORD_ACCURACY: [&str; 8] = ["63.89", "60.00", "45.50", "38.00", "37.50", "27.59", "37.50", "31.82"];

pub fn word_breakdown_judgements() -> Vec<Judgement> {
    let mut out = Vec::new();
    for (word, c, w, n) in WORD_BREAKDOWN {
        for mut j in judgements(c, w, n) {
            j.question_id = format!("{}", out.len() + 1);
            j.question_word = word;
            out.push(j);
        }
    }
    out
}

/// 200 questions whose first correct answers give a mean reciprocal rank of
/// 0.37: 60 at rank 1, 28 at rank 2, the rest never correct.
pub fn mrr_fixture() -> Vec<Judgement> {
    let mut out = Vec::new();
    for i in 0..200 {
        let (verdict, rank) = match i {
            0..60 => (JudgeVerdict::Correct, Some(1)),
            60..88 => (JudgeVerdict::Wrong, Some(2)),
            _ => (JudgeVerdict::Wrong, None),
        };
        out.push(Judgement::new((i + 1).to_string(), QuestionWord::Other, verdict, rank));
    }
    out
}

/// 200 questions, 157 with a positive passage: 20 at rank 1, 71 at rank 2,
/// 66 at rank 4. Reciprocal sum 72, so 72/200 = 0.36 and 72/157 ≈ 0.4586.
pub fn passage_rows() -> Vec<PassageRow> {
    (0..200)
        .map(|i| PassageRow {
            question_id: (i + 1).to_string(),
            first_positive_rank: match i {
                0..20 => Some(1),
                20..91 => Some(2),
                91..157 => Some(4),
                _ => None,
            },
        })
        .collect()
}

/// Hand-labeled passages: (id, gold, passages in retrieval order, first
/// positive rank).
pub const LABELED_PASSAGES: [(&str, &str, &[&str], Option<usize>); 4] = [
    ("1", "Mogadishu", &["Mogadishu is the capital.", "Somalia"], Some(1)),
    ("2", "Shakespeare", &["Hamlet is a play.", "Marlowe", "by William Shakespeare"], Some(3)),
    ("3", "1756", &["born in Salzburg", "in 17560 units"], None),
    ("4", "Paris", &["Lyon", "Paris, France"], Some(2)),
];
