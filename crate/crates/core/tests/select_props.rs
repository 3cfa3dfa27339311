mod support;

use std::collections::BTreeSet;

use proptest::prelude::*;
use qa_core::interpret::Analyzer;
use qa_core::select::{
    cluster, contained_in_question, ephyra_select, justask_select, levenshtein, merge_duplicates, normalize_numeric,
    overlap_distance, stem, Distance, EphyraResult, ScoredAnswer, SelectionConfig, Strategy,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_word(rng: &mut ChaCha8Rng) -> String {
    const ALPHABET: &[char] = &['a', 'b', 'c', 'd', 'é', 'z', ' ', '1'];
    let len = rng.gen_range(0..=12);
    (0..len).map(|_| ALPHABET[rng.gen_range(0..ALPHABET.len())]).collect()
}

#[test]
fn levenshtein_matches_recursive_definition() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..10_000 {
        let a = random_word(&mut rng);
        let b = random_word(&mut rng);
        assert_eq!(levenshtein(&a, &b), support::lev::levenshtein(&a, &b), "{a:?} vs {b:?}");
    }
    assert_eq!(levenshtein("kitten", "sitting"), 3);
    assert_eq!(levenshtein("", "abc"), 3);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(500))]

    #[test]
    fn levenshtein_is_a_metric(a in "[a-d]{0,8}", b in "[a-d]{0,8}", c in "[a-d]{0,8}") {
        prop_assert_eq!(levenshtein(&a, &a), 0);
        prop_assert_eq!(levenshtein(&a, &b), levenshtein(&b, &a));
        prop_assert_eq!(levenshtein(&a, &b) == 0, a == b);
        prop_assert!(levenshtein(&a, &c) <= levenshtein(&a, &b) + levenshtein(&b, &c));
    }

    #[test]
    fn overlap_is_bounded_and_symmetric(a in prop::collection::btree_set(0u8..10, 0..6), b in prop::collection::btree_set(0u8..10, 0..6)) {
        let d = overlap_distance(&a, &b);
        prop_assert!((0.0..=1.0).contains(&d));
        prop_assert_eq!(d, overlap_distance(&b, &a));
        prop_assert_eq!(overlap_distance(&a, &a), 0.0);
        if a.is_subset(&b) && !a.is_empty() {
            prop_assert_eq!(d, 0.0);
        }
    }

    #[test]
    fn stemming_is_idempotent(w in "[a-z]{1,12}") {
        let s = stem(&w);
        prop_assert_eq!(stem(&s), s);
    }

    #[test]
    fn merging_conserves_score(items in prop::collection::vec(("(river|rivers|the nile|nile|paris|Paris|of|cairo)( (river|nile|city))?", 0u32..100), 0..12)) {
        let answers: Vec<ScoredAnswer> = items.iter().map(|(t, s)| ScoredAnswer::new(t.clone(), *s as f64)).collect();
        let merged = merge_duplicates(answers.clone(), Analyzer::shared());
        let before: f64 = answers.iter().map(|a| a.score).sum();
        let after: f64 = merged.iter().map(|a| a.score).sum();
        prop_assert_eq!(before, after);
        prop_assert!(merged.len() <= answers.len());
        for w in merged.windows(2) {
            prop_assert!(w[0].score >= w[1].score);
        }
    }

    #[test]
    fn clusters_partition_the_input(items in prop::collection::vec("[a-c]{1,4}( [a-c]{1,3})?", 0..15), overlap in any::<bool>()) {
        let answers: Vec<ScoredAnswer> = items.iter().map(|t| ScoredAnswer::new(t.clone(), 1.0)).collect();
        let d = if overlap { Distance::Overlap } else { Distance::Levenshtein };
        let clusters = cluster(&answers, &SelectionConfig::default().with_distance(d));
        let total: usize = clusters.iter().map(|c| c.members.len()).sum();
        prop_assert_eq!(total, answers.len());
        for c in &clusters {
            prop_assert_eq!(c.score, c.members.len() as f64);
            prop_assert!(c.members.contains(&c.representative));
            let longest = c.members.iter().map(|m| m.text.chars().count()).max().unwrap();
            prop_assert_eq!(c.representative.text.chars().count(), longest);
        }
        for w in clusters.windows(2) {
            prop_assert!(w[0].score >= w[1].score);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn justask_never_echoes_the_question(
        question_words in prop::collection::vec("[a-e]{1,3}", 1..6),
        candidates in prop::collection::vec(("[a-e]{1,3}( [a-e]{1,3}){0,2}", 1u8..5), 0..10),
        overlap in any::<bool>(),
    ) {
        let question = format!("{}?", question_words.join(" "));
        let answers: Vec<ScoredAnswer> = candidates.iter().map(|(t, s)| ScoredAnswer::new(t.clone(), *s as f64)).collect();
        let d = if overlap { Distance::Overlap } else { Distance::Levenshtein };
        let cfg = SelectionConfig { strategy: Strategy::Justask, ..SelectionConfig::default() }.with_distance(d);
        if let Some(answer) = justask_select(&answers, &question, None, &cfg) {
            prop_assert!(!contained_in_question(&answer, &question), "{answer:?} echoes {question:?}");
        }
    }
}

#[test]
fn justask_picks_the_biggest_cluster() {
    let answers: Vec<ScoredAnswer> = ["Mogadishu", "Mogadisho", "Mogadishu", "Hargeisa", "Somalia"]
        .iter()
        .map(|t| ScoredAnswer::new(*t, 1.0))
        .collect();
    let cfg = SelectionConfig::default();
    let got = justask_select(&answers, "What is the capital of Somalia?", None, &cfg);
    assert_eq!(got.as_deref(), Some("Mogadishu"));
    let only_echo = [ScoredAnswer::new("Somalia", 1.0)];
    assert_eq!(justask_select(&only_echo, "What is the capital of Somalia?", None, &cfg), None);
}

#[test]
fn numeric_normalization_before_clustering() {
    assert_eq!(normalize_numeric("eight", Some("NUMERIC_COUNT")), "8");
    assert_eq!(normalize_numeric("July 4, 1776", Some("NUMERIC_DATE")), "1776-07-04");
    assert_eq!(normalize_numeric("1776", Some("NUMERIC_DATE")), "1776");
    assert_eq!(normalize_numeric("Paris", Some("LOCATION_CITY")), "Paris");
}

fn chars(n: usize, c: char) -> String {
    std::iter::repeat_n(c, n).collect()
}

#[test]
fn output_cap_boundary() {
    let cfg = SelectionConfig { strategy: Strategy::Ephyra, ..SelectionConfig::default() };
    let exactly = [ScoredAnswer::new(chars(3500, 'a'), 2.0), ScoredAnswer::new(chars(3500, 'b'), 1.0)];
    assert_eq!(ephyra_select(&exactly, &cfg).answers().len(), 2);
    let over = [ScoredAnswer::new(chars(3500, 'a'), 2.0), ScoredAnswer::new(chars(3501, 'b'), 1.0)];
    assert_eq!(ephyra_select(&over, &cfg).answers().len(), 1);
    let spaced = [ScoredAnswer::new(format!("{} {}", chars(3500, 'a'), chars(3500, 'c')), 1.0)];
    assert_eq!(ephyra_select(&spaced, &cfg).answers().len(), 1);
    let single = [ScoredAnswer::new(chars(7001, 'a'), 1.0)];
    assert_eq!(ephyra_select(&single, &cfg), EphyraResult::Nil);
}

#[test]
fn ephyra_filters_and_thresholds() {
    let answers = [
        ScoredAnswer::new("the Nile", 4.0),
        ScoredAnswer::new("Nile", 3.0),
        ScoredAnswer::new("rivers", 2.0),
        ScoredAnswer::new("river", 1.0),
        ScoredAnswer::new("of", 9.0),
    ];
    // "Nile" merges into "the Nile", which is then dropped as malformed.
    let cfg = SelectionConfig { strategy: Strategy::Ephyra, score_threshold: 2.5, ..SelectionConfig::default() };
    let got = ephyra_select(&answers, &cfg);
    let texts: BTreeSet<&str> = got.answers().iter().map(|a| a.text.as_str()).collect();
    assert_eq!(texts, BTreeSet::from(["rivers"]));
    assert_eq!(got.answers()[0].score, 3.0);
    let strict = SelectionConfig { score_threshold: 100.0, ..cfg };
    assert_eq!(ephyra_select(&answers, &strict), EphyraResult::Nil);
}
