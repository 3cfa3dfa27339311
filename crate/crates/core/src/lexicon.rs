//! Closed word lists shared by tagging, filtering and normalization.

pub(crate) const WH_WORDS: &[&str] = &[
    "who", "whom", "whose", "what", "when", "where", "which", "why", "how",
];

pub(crate) const BE_FORMS: &[&str] = &["is", "are", "was", "were", "be", "been", "being", "am"];

pub(crate) const DETERMINERS: &[&str] = &[
    "the", "a", "an", "this", "that", "these", "those", "some", "any", "every", "each", "no",
    "its", "his", "her", "their", "our", "my", "your",
];

pub(crate) const PREPOSITIONS: &[&str] = &[
    "of", "in", "on", "at", "by", "for", "with", "from", "to", "into", "about", "as", "near",
    "over", "under", "between", "through", "during", "after", "before", "since", "upon",
    "within", "across", "against", "toward", "towards", "among", "around",
];

pub(crate) const VERBS: &[&str] = &[
    "did", "do", "does", "done", "has", "have", "had", "become", "became", "born", "die",
    "died", "win", "won", "write", "wrote", "written", "make", "made", "discover", "invent",
    "found", "lead", "led", "sing", "sang", "paint", "build", "built", "begin", "began",
    "take", "took", "get", "got", "run", "ran", "say", "said", "live", "lives", "stand",
    "mean", "means", "play", "plays", "go", "went", "come", "came", "give", "gave", "kill",
    "killed", "can", "could", "will", "would", "should", "may", "might", "must",
];

pub(crate) const ADVERBS: &[&str] = &["not", "very", "also", "too", "often", "ever", "never"];

pub(crate) const ADJECTIVES: &[&str] = &[
    "old", "long", "hot", "cold", "tall", "high", "big", "large", "small", "far", "many", "much",
    "deep", "wide", "heavy", "fast", "short", "new", "great", "famous", "largest",
    "biggest", "highest", "longest", "tallest", "smallest", "deepest",
];

const UNITS: &[(&str, u64)] = &[
    ("zero", 0),
    ("one", 1),
    ("two", 2),
    ("three", 3),
    ("four", 4),
    ("five", 5),
    ("six", 6),
    ("seven", 7),
    ("eight", 8),
    ("nine", 9),
    ("ten", 10),
    ("eleven", 11),
    ("twelve", 12),
    ("thirteen", 13),
    ("fourteen", 14),
    ("fifteen", 15),
    ("sixteen", 16),
    ("seventeen", 17),
    ("eighteen", 18),
    ("nineteen", 19),
    ("twenty", 20),
];

const TENS: &[(&str, u64)] = &[
    ("thirty", 30),
    ("forty", 40),
    ("fifty", 50),
    ("sixty", 60),
    ("seventy", 70),
    ("eighty", 80),
    ("ninety", 90),
];

const SCALES: &[(&str, u64)] = &[
    ("hundred", 100),
    ("thousand", 1_000),
    ("million", 1_000_000),
    ("billion", 1_000_000_000),
];

const ORDINALS: &[(&str, u64)] = &[
    ("first", 1),
    ("second", 2),
    ("third", 3),
    ("fourth", 4),
    ("fifth", 5),
    ("sixth", 6),
    ("seventh", 7),
    ("eighth", 8),
    ("ninth", 9),
    ("tenth", 10),
    ("eleventh", 11),
    ("twelfth", 12),
    ("thirteenth", 13),
    ("fourteenth", 14),
    ("fifteenth", 15),
    ("sixteenth", 16),
    ("seventeenth", 17),
    ("eighteenth", 18),
    ("nineteenth", 19),
    ("twentieth", 20),
    ("thirtieth", 30),
    ("fortieth", 40),
    ("fiftieth", 50),
    ("sixtieth", 60),
    ("seventieth", 70),
    ("eightieth", 80),
    ("ninetieth", 90),
    ("hundredth", 100),
    ("thousandth", 1_000),
    ("millionth", 1_000_000),
];

pub(crate) const MONTHS: &[(&str, u32)] = &[
    ("january", 1),
    ("february", 2),
    ("march", 3),
    ("april", 4),
    ("may", 5),
    ("june", 6),
    ("july", 7),
    ("august", 8),
    ("september", 9),
    ("october", 10),
    ("november", 11),
    ("december", 12),
    ("jan", 1),
    ("feb", 2),
    ("mar", 3),
    ("apr", 4),
    ("jun", 6),
    ("jul", 7),
    ("aug", 8),
    ("sep", 9),
    ("sept", 9),
    ("oct", 10),
    ("nov", 11),
    ("dec", 12),
];

fn lookup(table: &[(&str, u64)], word: &str) -> Option<u64> {
    table.iter().find(|(w, _)| *w == word).map(|&(_, v)| v)
}

pub(crate) fn contains(list: &[&str], word: &str) -> bool {
    list.contains(&word)
}

/// Cardinal or ordinal number word, including hyphenated compounds such as
/// `seventy-two` and ordinal compounds like `twenty-first`.
pub fn is_written_number(word: &str) -> bool {
    let w = word.to_lowercase();
    if w.contains('-') {
        return w.split('-').all(|p| !p.is_empty() && is_written_number(p));
    }
    lookup(UNITS, &w).is_some()
        || lookup(TENS, &w).is_some()
        || lookup(SCALES, &w).is_some()
        || lookup(ORDINALS, &w).is_some()
}

/// A token made of digits, optionally with `,` or `.` separators between them.
pub fn is_numeral(word: &str) -> bool {
    let mut saw_digit = false;
    for c in word.chars() {
        if c.is_ascii_digit() {
            saw_digit = true;
        } else if c != ',' && c != '.' {
            return false;
        }
    }
    saw_digit
}

/// Parses a written cardinal number (`seventy two`, `one hundred and five`,
/// `two thousand`) into its value. Returns `None` if any word is not part of
/// the number lexicon.
pub fn parse_written_number(words: &[&str]) -> Option<u64> {
    let mut parts: Vec<String> = Vec::new();
    for w in words {
        for p in w.split('-') {
            if !p.is_empty() {
                parts.push(p.to_lowercase());
            }
        }
    }
    if parts.is_empty() {
        return None;
    }
    let mut total: u64 = 0;
    let mut current: u64 = 0;
    let mut any = false;
    for p in &parts {
        if p == "and" {
            continue;
        }
        if let Some(v) = lookup(UNITS, p).or_else(|| lookup(TENS, p)) {
            current = current.checked_add(v)?;
            any = true;
        } else if let Some(scale) = lookup(SCALES, p) {
            let base = if current == 0 { 1 } else { current };
            if scale == 100 {
                current = base.checked_mul(100)?;
            } else {
                total = total.checked_add(base.checked_mul(scale)?)?;
                current = 0;
            }
            any = true;
        } else {
            return None;
        }
    }
    if any {
        total.checked_add(current)
    } else {
        None
    }
}

pub(crate) fn month_number(word: &str) -> Option<u32> {
    let w = word.trim_end_matches('.').to_lowercase();
    MONTHS.iter().find(|(m, _)| *m == w).map(|&(_, n)| n)
}
