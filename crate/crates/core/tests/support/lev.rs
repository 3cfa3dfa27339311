//! Memoized recursive edit distance, straight from the definition.

use std::collections::HashMap;

fn go(a: &[char], b: &[char], i: usize, j: usize, memo: &mut HashMap<(usize, usize), usize>) -> usize {
    if i == 0 {
        return j;
    }
    if j == 0 {
        return i;
    }
    if let Some(&d) = memo.get(&(i, j)) {
        return d;
    }
    let sub = go(a, b, i - 1, j - 1, memo) + usize::from(a[i - 1] != b[j - 1]);
    let del = go(a, b, i - 1, j, memo) + 1;
    let ins = go(a, b, i, j - 1, memo) + 1;
    let d = sub.min(del).min(ins);
    memo.insert((i, j), d);
    d
}

pub fn levenshtein(a: &str, b: &str) -> usize {
    let a: Vec<char> = a.chars().collect();
    let b: Vec<char> = b.chars().collect();
    go(&a, &b, a.len(), b.len(), &mut HashMap::new())
}
