//! Passage retrieval: search backends, per-query caps and weights, merging
//! across a question's queries, and an on-disk result cache for replayable
//! runs.

use std::collections::HashMap;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::sync::Arc;
use std::time::Duration;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::corpora::{SnippetRecord, SnippetStore};
use crate::interpret::{Analyzer, Query, QueryKind};

/// Answers longer than this many tokens cannot sit in an exact query's slot.
pub const MAX_SLOT_TOKENS: usize = 4;

pub const DEFAULT_MAX_SNIPPETS: usize = 100;

#[derive(Debug, thiserror::Error)]
pub enum RetrieveError {
    #[error("max_snippets must be at least 1")]
    InvalidLimit,
    #[error("backend `{backend}` failed for `{query}`: {message}")]
    Backend {
        backend: String,
        query: String,
        message: String,
    },
    #[error("offline: no cached result from `{backend}` for `{query}`")]
    CacheMiss { backend: String, query: String },
    #[error("corrupt cache entry {}: {message}", entry.display())]
    CacheCorrupt { entry: PathBuf, message: String },
    #[error("cache I/O at {}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

/// A search service returning ranked snippets for a query.
pub trait Backend: Send + Sync {
    fn name(&self) -> &str;

    /// At most `limit` snippets, best first.
    fn search(&self, query: &Query, limit: usize) -> Result<Vec<SnippetRecord>, RetrieveError>;
}

impl<B: Backend + ?Sized> Backend for &B {
    fn name(&self) -> &str {
        (**self).name()
    }

    fn search(&self, query: &Query, limit: usize) -> Result<Vec<SnippetRecord>, RetrieveError> {
        (**self).search(query, limit)
    }
}

impl<B: Backend + ?Sized> Backend for Arc<B> {
    fn name(&self) -> &str {
        (**self).name()
    }

    fn search(&self, query: &Query, limit: usize) -> Result<Vec<SnippetRecord>, RetrieveError> {
        (**self).search(query, limit)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RetrievedPassage {
    pub snippet: SnippetRecord,
    /// Highest-weight query that returned this snippet.
    pub query: Query,
    /// Every query that returned it, in first-seen order.
    pub origins: Vec<Query>,
    pub retrieval_rank: usize,
    pub weight: f64,
}

/// Runs one query, truncating to `max_snippets` and stamping rank and weight.
pub fn retrieve<B: Backend + ?Sized>(
    query: &Query,
    backend: &B,
    max_snippets: usize,
) -> Result<Vec<RetrievedPassage>, RetrieveError> {
    if max_snippets == 0 {
        return Err(RetrieveError::InvalidLimit);
    }
    let mut hits = backend.search(query, max_snippets)?;
    hits.truncate(max_snippets);
    Ok(hits
        .into_iter()
        .enumerate()
        .map(|(i, snippet)| RetrievedPassage {
            snippet,
            query: query.clone(),
            origins: vec![query.clone()],
            retrieval_rank: i + 1,
            weight: query.weight,
        })
        .collect())
}

fn snippet_key(text: &str) -> String {
    text.split_whitespace()
        .map(str::to_lowercase)
        .collect::<Vec<_>>()
        .join(" ")
}

/// Runs every query and merges duplicates by normalized snippet text. A
/// duplicate keeps its first position, takes the highest weight seen, and
/// accumulates the originating queries.
pub fn retrieve_all<B: Backend + ?Sized>(
    queries: &[Query],
    backend: &B,
    max_snippets: usize,
) -> Result<Vec<RetrievedPassage>, RetrieveError> {
    let mut merged: Vec<RetrievedPassage> = Vec::new();
    let mut index: HashMap<String, usize> = HashMap::new();
    for q in queries {
        for p in retrieve(q, backend, max_snippets)? {
            let key = snippet_key(&p.snippet.text);
            match index.get(&key) {
                Some(&i) => {
                    let existing = &mut merged[i];
                    if p.weight > existing.weight {
                        existing.weight = p.weight;
                        existing.query = p.query.clone();
                        existing.retrieval_rank = p.retrieval_rank;
                    }
                    if !existing.origins.iter().any(|o| o.canonical() == p.query.canonical()) {
                        existing.origins.push(p.query);
                    }
                }
                None => {
                    index.insert(key, merged.len());
                    merged.push(p);
                }
            }
        }
    }
    Ok(merged)
}

fn contains_phrase(haystack: &[String], needle: &[String], from: usize) -> Vec<usize> {
    if needle.is_empty() {
        return (from..=haystack.len()).collect();
    }
    if haystack.len() < needle.len() {
        return Vec::new();
    }
    (from..=haystack.len() - needle.len())
        .filter(|&i| haystack[i..i + needle.len()] == *needle)
        .collect()
}

/// Whether `words` (a normalized snippet) satisfies `query`.
///
/// Exact queries need the words before the slot and the words after it as
/// contiguous phrases with 1 to [`MAX_SLOT_TOKENS`] words between them.
/// Inexact and keyword queries need every term somewhere; baseline queries
/// the same over their non-stopword terms.
pub fn query_matches(query: &Query, words: &[String], analyzer: &Analyzer) -> bool {
    match query.kind {
        QueryKind::Exact => {
            let (left, right) = query.split_at_slot();
            for start in contains_phrase(words, left, 0) {
                let gap_from = start + left.len();
                if right.is_empty() {
                    if gap_from < words.len() {
                        return true;
                    }
                    continue;
                }
                let ok = contains_phrase(words, right, gap_from + 1)
                    .into_iter()
                    .any(|r| r - gap_from <= MAX_SLOT_TOKENS);
                if ok {
                    return true;
                }
            }
            false
        }
        QueryKind::Inexact | QueryKind::Keyword => {
            !query.terms.is_empty() && query.terms.iter().all(|t| words.contains(t))
        }
        QueryKind::Baseline => {
            let content: Vec<&String> = query.terms.iter().filter(|t| !analyzer.is_stopword(t)).collect();
            !content.is_empty() && content.iter().all(|t| words.contains(t))
        }
    }
}

/// Local search semantics over a snippet store, ordered by stored rank.
pub fn match_local<'a>(query: &Query, store: &'a SnippetStore) -> Vec<&'a SnippetRecord> {
    let analyzer = Analyzer::shared();
    let mut hits: Vec<(usize, &SnippetRecord)> = store
        .records()
        .iter()
        .enumerate()
        .filter(|(_, r)| query_matches(query, &analyzer.words(&r.text), analyzer))
        .collect();
    hits.sort_by_key(|(i, r)| (r.rank, *i));
    hits.into_iter().map(|(_, r)| r).collect()
}

/// Backend over a local snippet store. Optionally scoped to the snippets of
/// one question.
#[derive(Debug, Clone)]
pub struct LocalBackend {
    store: Arc<SnippetStore>,
    words: Arc<Vec<Vec<String>>>,
    analyzer: Analyzer,
    scope: Option<String>,
}

impl LocalBackend {
    pub fn new(store: SnippetStore) -> Self {
        Self::with_analyzer(store, Analyzer::default())
    }

    pub fn with_analyzer(store: SnippetStore, analyzer: Analyzer) -> Self {
        let words = store.records().iter().map(|r| analyzer.words(&r.text)).collect();
        LocalBackend {
            store: Arc::new(store),
            words: Arc::new(words),
            analyzer,
            scope: None,
        }
    }

    /// Restricts search to snippets tagged with `question_id` plus untagged
    /// ones. Questions without tagged snippets see the whole store.
    pub fn for_question(&self, question_id: &str) -> LocalBackend {
        let mut scoped = self.clone();
        scoped.scope = self
            .store
            .has_question(question_id)
            .then(|| question_id.to_string());
        scoped
    }

    pub fn store(&self) -> &SnippetStore {
        &self.store
    }
}

impl Backend for LocalBackend {
    fn name(&self) -> &str {
        "local"
    }

    fn search(&self, query: &Query, limit: usize) -> Result<Vec<SnippetRecord>, RetrieveError> {
        let records = self.store.records();
        let mut hits: Vec<usize> = (0..records.len())
            .filter(|&i| match (&self.scope, &records[i].question_id) {
                (Some(scope), Some(q)) => q == scope,
                _ => true,
            })
            .filter(|&i| query_matches(query, &self.words[i], &self.analyzer))
            .collect();
        hits.sort_by_key(|&i| (records[i].rank, i));
        hits.truncate(limit);
        Ok(hits.into_iter().map(|i| records[i].clone()).collect())
    }
}

#[derive(Debug, Serialize, Deserialize)]
struct CacheEntry {
    key: String,
    results: Vec<SnippetRecord>,
}

/// Directory of cached search results, one hash-named file per key.
#[derive(Debug, Clone)]
pub struct ResultCache {
    dir: PathBuf,
}

impl ResultCache {
    pub fn open(dir: impl Into<PathBuf>) -> Result<Self, RetrieveError> {
        let dir = dir.into();
        fs::create_dir_all(&dir).map_err(|source| RetrieveError::Io {
            path: dir.clone(),
            source,
        })?;
        Ok(ResultCache { dir })
    }

    pub fn key(backend: &str, query: &Query, limit: usize) -> String {
        format!("{backend}\n{}\n{limit}", query.canonical())
    }

    pub fn entry_path(&self, key: &str) -> PathBuf {
        let digest = Sha256::digest(key.as_bytes());
        self.dir.join(format!("{}.json", hex::encode(digest)))
    }

    pub fn get(&self, key: &str) -> Result<Option<Vec<SnippetRecord>>, RetrieveError> {
        let path = self.entry_path(key);
        let text = match fs::read_to_string(&path) {
            Ok(t) => t,
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => return Ok(None),
            Err(source) => return Err(RetrieveError::Io { path, source }),
        };
        let entry: CacheEntry = serde_json::from_str(&text).map_err(|e| RetrieveError::CacheCorrupt {
            entry: path.clone(),
            message: e.to_string(),
        })?;
        if entry.key != key {
            return Err(RetrieveError::CacheCorrupt {
                entry: path,
                message: "stored key does not match".into(),
            });
        }
        Ok(Some(entry.results))
    }

    /// Writes through a temporary file and renames it into place, so readers
    /// never observe a partial entry.
    pub fn put(&self, key: &str, results: &[SnippetRecord]) -> Result<(), RetrieveError> {
        let path = self.entry_path(key);
        let entry = CacheEntry {
            key: key.to_string(),
            results: results.to_vec(),
        };
        let body = serde_json::to_vec(&entry).expect("cache entries always serialize");
        let io = |source| RetrieveError::Io {
            path: path.clone(),
            source,
        };
        let mut tmp = tempfile::NamedTempFile::new_in(&self.dir).map_err(io)?;
        tmp.write_all(&body).map_err(io)?;
        tmp.persist(&path).map_err(|e| io(e.error))?;
        Ok(())
    }
}

/// Wraps a backend with the result cache. Fresh results are written to the
/// cache and read back, so live and replayed runs share one path. In offline
/// mode a miss is an error instead of a backend call.
pub struct CachedBackend<B> {
    inner: B,
    cache: ResultCache,
    offline: bool,
}

impl<B: Backend> CachedBackend<B> {
    pub fn new(inner: B, cache: ResultCache, offline: bool) -> Self {
        CachedBackend {
            inner,
            cache,
            offline,
        }
    }

    pub fn cache(&self) -> &ResultCache {
        &self.cache
    }
}

impl<B: Backend> Backend for CachedBackend<B> {
    fn name(&self) -> &str {
        self.inner.name()
    }

    fn search(&self, query: &Query, limit: usize) -> Result<Vec<SnippetRecord>, RetrieveError> {
        let key = ResultCache::key(self.inner.name(), query, limit);
        if let Some(hit) = self.cache.get(&key)? {
            return Ok(hit);
        }
        if self.offline {
            return Err(RetrieveError::CacheMiss {
                backend: self.inner.name().to_string(),
                query: query.canonical(),
            });
        }
        let fresh = self.inner.search(query, limit)?;
        self.cache.put(&key, &fresh)?;
        self.cache.get(&key)?.ok_or_else(|| RetrieveError::CacheCorrupt {
            entry: self.cache.entry_path(&key),
            message: "entry vanished after write".into(),
        })
    }
}

/// Environment variable holding the search API key.
pub const API_KEY_ENV: &str = "REDQA_SEARCH_API_KEY";

/// Thin client for a JSON web-search API.
///
/// Sends `GET <endpoint>?q=<query>&count=<limit>` (with a bearer token when
/// a key is configured) and expects
/// `{"results": [{"url": .., "title": .., "snippet": ..}, ..]}`.
pub struct WebBackend {
    endpoint: String,
    api_key: Option<String>,
    client: reqwest::blocking::Client,
}

#[derive(Debug, Deserialize)]
struct WebResponse {
    #[serde(default)]
    results: Vec<WebHit>,
}

#[derive(Debug, Deserialize)]
struct WebHit {
    #[serde(default)]
    url: String,
    #[serde(default)]
    title: String,
    #[serde(default)]
    snippet: String,
}

impl WebBackend {
    pub fn new(endpoint: impl Into<String>, api_key: Option<String>) -> Self {
        let client = reqwest::blocking::Client::builder()
            .timeout(Duration::from_secs(30))
            .build()
            .expect("HTTP client builds with static configuration");
        WebBackend {
            endpoint: endpoint.into(),
            api_key,
            client,
        }
    }

    /// Reads the API key from [`API_KEY_ENV`].
    pub fn from_env(endpoint: impl Into<String>) -> Self {
        Self::new(endpoint, std::env::var(API_KEY_ENV).ok())
    }

    /// Search-engine query string: exact queries become quoted phrases
    /// around the slot, everything else a plain term list.
    pub fn query_string(query: &Query) -> String {
        match query.kind {
            QueryKind::Exact => {
                let (left, right) = query.split_at_slot();
                [left, right]
                    .iter()
                    .filter(|side| !side.is_empty())
                    .map(|side| format!("\"{}\"", side.join(" ")))
                    .collect::<Vec<_>>()
                    .join(" ")
            }
            _ => query.terms.join(" "),
        }
    }

    pub fn parse_response(body: &str, limit: usize) -> Result<Vec<SnippetRecord>, String> {
        let value: serde_json::Value = serde_json::from_str(body).map_err(|e| e.to_string())?;
        if !value.is_object() {
            return Err("response is not a JSON object".into());
        }
        let parsed: WebResponse = serde_json::from_value(value).map_err(|e| e.to_string())?;
        Ok(parsed
            .results
            .into_iter()
            .filter(|h| !h.snippet.trim().is_empty())
            .take(limit)
            .enumerate()
            .map(|(i, h)| SnippetRecord {
                question_id: None,
                url: h.url,
                title: h.title,
                text: h.snippet,
                rank: (i + 1) as u32,
                source_tag: "web".into(),
            })
            .collect())
    }
}

impl Backend for WebBackend {
    fn name(&self) -> &str {
        "web"
    }

    fn search(&self, query: &Query, limit: usize) -> Result<Vec<SnippetRecord>, RetrieveError> {
        let fail = |message: String| RetrieveError::Backend {
            backend: "web".into(),
            query: query.canonical(),
            message,
        };
        let q = Self::query_string(query);
        let count = limit.to_string();
        let mut req = self
            .client
            .get(&self.endpoint)
            .query(&[("q", q.as_str()), ("count", count.as_str())]);
        if let Some(key) = &self.api_key {
            req = req.bearer_auth(key);
        }
        let resp = req.send().map_err(|e| fail(e.to_string()))?;
        let status = resp.status();
        let body = resp.text().map_err(|e| fail(e.to_string()))?;
        if !status.is_success() {
            return Err(fail(format!("HTTP {status}")));
        }
        Self::parse_response(&body, limit).map_err(fail)
    }
}

/// Helper for cache directories in configuration.
pub fn open_cached<B: Backend>(inner: B, dir: &Path, offline: bool) -> Result<CachedBackend<B>, RetrieveError> {
    Ok(CachedBackend::new(inner, ResultCache::open(dir)?, offline))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::interpret::QueryWeights;

    fn rec(text: &str, rank: u32) -> SnippetRecord {
        SnippetRecord {
            question_id: None,
            url: format!("http://example.org/{rank}"),
            title: String::new(),
            text: text.into(),
            rank,
            source_tag: "web".into(),
        }
    }

    fn q(kind: QueryKind, terms: &[&str], slot: Option<usize>, weight: f64) -> Query {
        Query {
            kind,
            terms: terms.iter().map(|s| s.to_string()).collect(),
            slot,
            weight,
        }
    }

    #[test]
    fn three_matches_ranked() {
        let store = SnippetStore::from_records(vec![
            rec("somalia capital mogadishu", 3),
            rec("capital of somalia", 1),
            rec("somalia has a capital", 2),
            rec("unrelated", 4),
        ])
        .unwrap();
        let backend = LocalBackend::new(store);
        let kw = q(QueryKind::Keyword, &["capital", "somalia"], None, 1.0);
        let got = retrieve(&kw, &backend, 100).unwrap();
        let ranks: Vec<_> = got.iter().map(|p| p.retrieval_rank).collect();
        assert_eq!(ranks, [1, 2, 3]);
        assert_eq!(got[0].snippet.text, "capital of somalia");
    }

    #[test]
    fn cap_at_max_snippets() {
        let store = SnippetStore::from_records((1..=150).map(|i| rec("alpha beta", i)).collect()).unwrap();
        let backend = LocalBackend::new(store);
        let kw = q(QueryKind::Keyword, &["alpha"], None, 1.0);
        assert_eq!(retrieve(&kw, &backend, 100).unwrap().len(), 100);
        assert!(matches!(retrieve(&kw, &backend, 0), Err(RetrieveError::InvalidLimit)));
    }

    #[test]
    fn weights_are_stamped() {
        let store = SnippetStore::from_records(vec![rec("x is located in y-land", 1)]).unwrap();
        let backend = LocalBackend::new(store);
        let w = QueryWeights::default();
        let exact = q(QueryKind::Exact, &["x", "is", "located", "in"], Some(4), w.exact);
        let kw = q(QueryKind::Keyword, &["x"], None, w.base);
        let e = retrieve(&exact, &backend, 10).unwrap();
        let k = retrieve(&kw, &backend, 10).unwrap();
        assert_eq!(e[0].weight / k[0].weight, 5.0);
    }

    #[test]
    fn local_match_semantics() {
        let a = Analyzer::default();
        let words = a.words("x is located in y-land");
        let exact = q(QueryKind::Exact, &["x", "is", "located", "in"], Some(4), 5.0);
        assert!(query_matches(&exact, &words, &a));
        // nothing after the phrase: no room for an answer
        assert!(!query_matches(&exact, &a.words("x is located in"), &a));

        let inexact = q(QueryKind::Inexact, &["grand", "canyon", "located"], None, 1.0);
        assert!(query_matches(&inexact, &a.words("located near the canyon grand"), &a));

        let kw = q(QueryKind::Keyword, &["grand", "canyon", "arizona"], None, 1.0);
        assert!(!query_matches(&kw, &a.words("grand canyon"), &a));

        let baseline = q(QueryKind::Baseline, &["where", "is", "the", "grand", "canyon"], None, 1.0);
        assert!(query_matches(&baseline, &a.words("Grand Canyon, Arizona"), &a));
    }

    #[test]
    fn exact_slot_in_the_middle() {
        let a = Analyzer::default();
        let exact = q(QueryKind::Exact, &["x", "is", "years", "old"], Some(2), 5.0);
        assert!(query_matches(&exact, &a.words("x is 72 years old"), &a));
        assert!(query_matches(&exact, &a.words("x is seventy two years old"), &a));
        assert!(!query_matches(&exact, &a.words("x is years old"), &a));
        assert!(!query_matches(&exact, &a.words("x is a b c d e years old"), &a));
    }

    #[test]
    fn match_local_orders_by_rank() {
        let store = SnippetStore::from_records(vec![rec("b a", 2), rec("a b", 1)]).unwrap();
        let kw = q(QueryKind::Keyword, &["a"], None, 1.0);
        let hits: Vec<_> = match_local(&kw, &store).iter().map(|r| r.rank).collect();
        assert_eq!(hits, [1, 2]);
    }

    #[test]
    fn merge_keeps_max_weight_and_all_origins() {
        let store = SnippetStore::from_records(vec![rec("x is located in paris", 1), rec("other x", 2)]).unwrap();
        let backend = LocalBackend::new(store);
        let exact = q(QueryKind::Exact, &["x", "is", "located", "in"], Some(4), 5.0);
        let kw = q(QueryKind::Keyword, &["x"], None, 1.0);
        let merged = retrieve_all(&[kw.clone(), exact.clone()], &backend, 10).unwrap();
        assert_eq!(merged.len(), 2);
        assert_eq!(merged[0].weight, 5.0);
        assert_eq!(merged[0].origins.len(), 2);
        assert_eq!(merged[0].query.kind, QueryKind::Exact);
        assert_eq!(merged[1].weight, 1.0);

        assert!(retrieve_all(&[], &backend, 10).unwrap().is_empty());
    }

    #[test]
    fn disjoint_results_concatenate() {
        let store = SnippetStore::from_records(vec![rec("alpha", 1), rec("beta", 2)]).unwrap();
        let backend = LocalBackend::new(store);
        let merged = retrieve_all(
            &[
                q(QueryKind::Keyword, &["alpha"], None, 1.0),
                q(QueryKind::Keyword, &["beta"], None, 1.0),
            ],
            &backend,
            10,
        )
        .unwrap();
        let texts: Vec<_> = merged.iter().map(|p| p.snippet.text.as_str()).collect();
        assert_eq!(texts, ["alpha", "beta"]);
    }

    #[test]
    fn scoped_backend() {
        let mut a = rec("alpha", 1);
        a.question_id = Some("1".into());
        let mut b = rec("alpha", 1);
        b.question_id = Some("2".into());
        b.text = "alpha two".into();
        let backend = LocalBackend::new(SnippetStore::from_records(vec![a, b]).unwrap());
        let kw = q(QueryKind::Keyword, &["alpha"], None, 1.0);
        assert_eq!(backend.search(&kw, 10).unwrap().len(), 2);
        assert_eq!(backend.for_question("1").search(&kw, 10).unwrap().len(), 1);
        assert_eq!(backend.for_question("zzz").search(&kw, 10).unwrap().len(), 2);
    }

    #[test]
    fn cache_put_get_and_miss() {
        let dir = tempfile::tempdir().unwrap();
        let cache = ResultCache::open(dir.path()).unwrap();
        let query = q(QueryKind::Keyword, &["a"], None, 1.0);
        let key = ResultCache::key("local", &query, 100);
        assert_eq!(cache.get(&key).unwrap(), None);
        let results = vec![rec("a b", 1), rec("a c", 2)];
        cache.put(&key, &results).unwrap();
        assert_eq!(cache.get(&key).unwrap(), Some(results));
    }

    #[test]
    fn corrupt_cache_entry_is_named() {
        let dir = tempfile::tempdir().unwrap();
        let cache = ResultCache::open(dir.path()).unwrap();
        let query = q(QueryKind::Keyword, &["a"], None, 1.0);
        let key = ResultCache::key("local", &query, 100);
        fs::write(cache.entry_path(&key), "{ nope").unwrap();
        match cache.get(&key) {
            Err(RetrieveError::CacheCorrupt { entry, .. }) => assert_eq!(entry, cache.entry_path(&key)),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn offline_cold_cache_errors() {
        let dir = tempfile::tempdir().unwrap();
        let backend = LocalBackend::new(SnippetStore::from_records(vec![rec("a", 1)]).unwrap());
        let kw = q(QueryKind::Keyword, &["a"], None, 1.0);
        let offline = open_cached(backend.clone(), dir.path(), true).unwrap();
        assert!(matches!(offline.search(&kw, 5), Err(RetrieveError::CacheMiss { .. })));
        let online = open_cached(backend, dir.path(), false).unwrap();
        let first = online.search(&kw, 5).unwrap();
        assert_eq!(offline.search(&kw, 5).unwrap(), first);
    }

    #[test]
    fn web_query_strings() {
        let exact = q(QueryKind::Exact, &["x", "is", "years", "old"], Some(2), 5.0);
        assert_eq!(WebBackend::query_string(&exact), "\"x is\" \"years old\"");
        let kw = q(QueryKind::Keyword, &["capital", "somalia"], None, 1.0);
        assert_eq!(WebBackend::query_string(&kw), "capital somalia");
    }

    #[test]
    fn web_response_parsing() {
        let body = r#"{"results":[{"url":"u1","title":"t1","snippet":"s1"},{"url":"u2","title":"t2","snippet":""},{"url":"u3","title":"t3","snippet":"s3"}]}"#;
        let recs = WebBackend::parse_response(body, 10).unwrap();
        assert_eq!(recs.len(), 2);
        assert_eq!(recs[1].rank, 2);
        assert_eq!(recs[1].text, "s3");
        assert_eq!(WebBackend::parse_response(body, 1).unwrap().len(), 1);
        assert!(WebBackend::parse_response("[]", 1).is_err());
    }
}
