//! Latent semantic analysis: corpus ingestion, term-document matrix,
//! truncated-SVD training and cosine similarity over word vectors.
//!
//! Word vectors are the rows of `W·S` (left factor scaled by the singular
//! values), which preserves the inner-product structure of the raw matrix at
//! full rank. Multiword labels use the unweighted mean of their tokens'
//! vectors.

use crate::checksum;
use crate::matrix::SparseMatrix;
use crate::matrix::{DenseMatrix, MatrixError};
use crate::svd::{self, SvdError};
use std::collections::{BTreeSet, HashMap};
use std::fmt;
use std::io::{BufRead, BufReader, Write};
use std::path::Path;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum LsaError {
    #[error("document collection is empty")]
    EmptyCollection,
    #[error("at least 2 documents are required, got 1")]
    SingleDocument,
    #[error("duplicate document id {0:?}")]
    DuplicateDocId(String),
    #[error("corpus produced no tokens")]
    NoTokens,
    #[error("unknown term {0:?}")]
    UnknownTerm(String),
    #[error("label {0:?} has no in-vocabulary token")]
    OutOfVocabulary(String),
    #[error(transparent)]
    Svd(#[from] SvdError),
    #[error(transparent)]
    Matrix(#[from] MatrixError),
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
    #[error("malformed latent space file at line {line}: {message}")]
    Parse { line: usize, message: String },
}

/// Lowercased alphabetic tokens; non-letters split tokens, tokens shorter
/// than 2 characters are dropped.
pub fn tokenize(text: &str) -> Vec<String> {
    tokenize_with(text, None)
}

pub fn tokenize_with(text: &str, stopwords: Option<&BTreeSet<String>>) -> Vec<String> {
    let mut tokens = Vec::new();
    let mut current = String::new();
    for ch in text.chars() {
        if ch.is_alphabetic() {
            for lc in ch.to_lowercase() {
                current.push(lc);
            }
        } else if !current.is_empty() {
            push_token(&mut tokens, std::mem::take(&mut current), stopwords);
        }
    }
    if !current.is_empty() {
        push_token(&mut tokens, current, stopwords);
    }
    tokens
}

fn push_token(tokens: &mut Vec<String>, token: String, stopwords: Option<&BTreeSet<String>>) {
    if token.chars().count() < 2 {
        return;
    }
    if let Some(stop) = stopwords {
        if stop.contains(&token) {
            return;
        }
    }
    tokens.push(token);
}

/// Ordered set of (doc_id, text) pairs.
#[derive(Debug, Clone)]
pub struct DocumentCollection {
    docs: Vec<(String, String)>,
}

impl DocumentCollection {
    pub fn from_pairs(docs: Vec<(String, String)>) -> Result<DocumentCollection, LsaError> {
        if docs.is_empty() {
            return Err(LsaError::EmptyCollection);
        }
        let mut seen = BTreeSet::new();
        for (id, _) in &docs {
            if !seen.insert(id.clone()) {
                return Err(LsaError::DuplicateDocId(id.clone()));
            }
        }
        Ok(DocumentCollection { docs })
    }

    /// One `.txt` file per document; doc_id is the file name. Files are
    /// loaded in sorted name order for determinism.
    pub fn from_dir(path: &Path) -> Result<DocumentCollection, LsaError> {
        let mut names: Vec<_> = std::fs::read_dir(path)?
            .filter_map(|e| e.ok())
            .map(|e| e.path())
            .filter(|p| p.extension().map(|e| e == "txt").unwrap_or(false))
            .collect();
        names.sort();
        let mut docs = Vec::new();
        for file in names {
            let id = file
                .file_name()
                .map(|n| n.to_string_lossy().to_string())
                .unwrap_or_default();
            docs.push((id, std::fs::read_to_string(&file)?));
        }
        DocumentCollection::from_pairs(docs)
    }

    /// Single file with `%%DOC <id>` separator lines.
    pub fn from_single_file(path: &Path) -> Result<DocumentCollection, LsaError> {
        let text = std::fs::read_to_string(path)?;
        let mut docs: Vec<(String, String)> = Vec::new();
        for line in text.lines() {
            if let Some(id) = line.strip_prefix("%%DOC ") {
                docs.push((id.trim().to_string(), String::new()));
            } else if let Some((_, body)) = docs.last_mut() {
                body.push_str(line);
                body.push('\n');
            }
            // text before the first %%DOC is ignored
        }
        DocumentCollection::from_pairs(docs)
    }

    pub fn len(&self) -> usize {
        self.docs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.docs.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &(String, String)> {
        self.docs.iter()
    }

    /// Flat token stream over all documents, for IC counting.
    pub fn all_tokens(&self) -> Vec<String> {
        self.docs
            .iter()
            .flat_map(|(_, text)| tokenize(text))
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Weighting {
    Raw,
    LogEntropy,
}

impl fmt::Display for Weighting {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Weighting::Raw => f.write_str("raw"),
            Weighting::LogEntropy => f.write_str("log_entropy"),
        }
    }
}

impl std::str::FromStr for Weighting {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "raw" => Ok(Weighting::Raw),
            "log_entropy" | "log-entropy" => Ok(Weighting::LogEntropy),
            other => Err(format!("unknown weighting {other:?}")),
        }
    }
}

/// Weighted term-document matrix; rows are vocabulary terms in
/// first-occurrence order, columns are documents.
#[derive(Debug, Clone)]
pub struct TermDocMatrix {
    pub vocabulary: Vec<String>,
    vocab_index: HashMap<String, usize>,
    pub doc_ids: Vec<String>,
    pub matrix: SparseMatrix,
    pub weighting: Weighting,
}

pub fn build_matrix(
    dc: &DocumentCollection,
    weighting: Weighting,
) -> Result<TermDocMatrix, LsaError> {
    if dc.is_empty() {
        return Err(LsaError::EmptyCollection);
    }
    if dc.len() == 1 {
        return Err(LsaError::SingleDocument);
    }

    let mut vocabulary: Vec<String> = Vec::new();
    let mut vocab_index: HashMap<String, usize> = HashMap::new();
    let mut doc_ids: Vec<String> = Vec::new();
    // counts[term][doc]
    let mut counts: Vec<HashMap<usize, f64>> = Vec::new();

    for (d, (id, text)) in dc.iter().enumerate() {
        doc_ids.push(id.clone());
        for token in tokenize(text) {
            let t = *vocab_index.entry(token.clone()).or_insert_with(|| {
                vocabulary.push(token);
                counts.push(HashMap::new());
                vocabulary.len() - 1
            });
            *counts[t].entry(d).or_insert(0.0) += 1.0;
        }
    }
    if vocabulary.is_empty() {
        return Err(LsaError::NoTokens);
    }

    let n_docs = dc.len() as f64;
    let mut entries: Vec<(usize, usize, f64)> = Vec::new();
    for (t, docs) in counts.iter().enumerate() {
        let weight_fn: Box<dyn Fn(f64) -> f64> = match weighting {
            Weighting::Raw => Box::new(|c| c),
            Weighting::LogEntropy => {
                let total: f64 = docs.values().sum();
                let entropy: f64 = docs
                    .values()
                    .map(|&c| {
                        let p = c / total;
                        -p * p.log2()
                    })
                    .sum();
                let global = 1.0 - entropy / n_docs.log2();
                Box::new(move |c: f64| (1.0 + c).log2() * global)
            }
        };
        let mut ordered: Vec<(&usize, &f64)> = docs.iter().collect();
        ordered.sort_by_key(|(d, _)| **d);
        for (&d, &c) in ordered {
            let w = weight_fn(c);
            if w != 0.0 {
                entries.push((t, d, w));
            }
        }
    }

    let matrix = SparseMatrix::from_triplets(vocabulary.len(), dc.len(), entries)?;
    Ok(TermDocMatrix {
        vocabulary,
        vocab_index,
        doc_ids,
        matrix,
        weighting,
    })
}

impl TermDocMatrix {
    pub fn term_index(&self, term: &str) -> Option<usize> {
        self.vocab_index.get(term).copied()
    }
}

/// Trained latent space: per-term `W·S` vectors plus metadata.
#[derive(Debug, Clone)]
pub struct LatentSpace {
    vectors: DenseMatrix,
    pub singular_values: Vec<f64>,
    pub vocabulary: Vec<String>,
    vocab_index: HashMap<String, usize>,
    pub k: usize,
    pub weighting: String,
    pub corpus_checksum: String,
}

/// Truncate the factorization of a term-document matrix to `k` dimensions.
pub fn train(
    m: &TermDocMatrix,
    k: usize,
    seed: u64,
    corpus_checksum: &str,
) -> Result<LatentSpace, LsaError> {
    let factors = svd::truncated_svd(
        &m.matrix,
        k,
        svd::DEFAULT_TRUNCATED_TOL,
        svd::DEFAULT_MAX_ITER,
        seed,
    )?;
    let mut vectors = DenseMatrix::zeros(m.vocabulary.len(), k);
    for i in 0..m.vocabulary.len() {
        for j in 0..k {
            vectors.set(i, j, factors.u.get(i, j) * factors.s[j]);
        }
    }
    Ok(LatentSpace {
        vectors,
        singular_values: factors.s,
        vocabulary: m.vocabulary.clone(),
        vocab_index: m.vocab_index.clone(),
        k,
        weighting: m.weighting.to_string(),
        corpus_checksum: corpus_checksum.to_string(),
    })
}

fn cosine(a: &[f64], b: &[f64]) -> f64 {
    let dot: f64 = a.iter().zip(b).map(|(x, y)| x * y).sum();
    let na: f64 = a.iter().map(|x| x * x).sum::<f64>().sqrt();
    let nb: f64 = b.iter().map(|x| x * x).sum::<f64>().sqrt();
    if na == 0.0 || nb == 0.0 {
        return 0.0;
    }
    (dot / (na * nb)).clamp(-1.0, 1.0)
}

impl LatentSpace {
    pub fn vocabulary_size(&self) -> usize {
        self.vocabulary.len()
    }

    pub fn word_vector(&self, term: &str) -> Result<&[f64], LsaError> {
        let idx = self
            .vocab_index
            .get(term)
            .ok_or_else(|| LsaError::UnknownTerm(term.to_string()))?;
        Ok(self.vectors.row(*idx))
    }

    /// Mean of the label's in-vocabulary token vectors.
    pub fn label_vector(&self, label: &str) -> Result<Vec<f64>, LsaError> {
        let tokens = tokenize(label);
        let mut acc = vec![0.0; self.k];
        let mut hits = 0usize;
        for token in &tokens {
            if let Some(&idx) = self.vocab_index.get(token) {
                for (a, v) in acc.iter_mut().zip(self.vectors.row(idx)) {
                    *a += v;
                }
                hits += 1;
            }
        }
        if hits == 0 {
            return Err(LsaError::OutOfVocabulary(label.to_string()));
        }
        for a in &mut acc {
            *a /= hits as f64;
        }
        Ok(acc)
    }

    /// Cosine similarity of two label vectors, in [-1, 1].
    pub fn similarity(&self, label1: &str, label2: &str) -> Result<f64, LsaError> {
        let v1 = self.label_vector(label1)?;
        let v2 = self.label_vector(label2)?;
        Ok(cosine(&v1, &v2))
    }

    /// Text persistence: header, vocabulary lines, then one `W·S` row per
    /// term with 17 significant digits.
    pub fn write<W: Write>(&self, mut out: W) -> Result<(), LsaError> {
        writeln!(
            out,
            "#semsim-lsa v1 k={} weighting={} corpus={}",
            self.k, self.weighting, self.corpus_checksum
        )?;
        for term in &self.vocabulary {
            writeln!(out, "{term}")?;
        }
        for i in 0..self.vocabulary.len() {
            let row: Vec<String> = self
                .vectors
                .row(i)
                .iter()
                .map(|v| format!("{v:.16e}"))
                .collect();
            writeln!(out, "{}", row.join(" "))?;
        }
        Ok(())
    }

    pub fn save(&self, path: &Path) -> Result<(), LsaError> {
        let file = std::fs::File::create(path)?;
        self.write(std::io::BufWriter::new(file))
    }

    pub fn load(path: &Path) -> Result<LatentSpace, LsaError> {
        let file = std::fs::File::open(path)?;
        let reader = BufReader::new(file);
        let mut lines = reader.lines();
        let header = lines.next().transpose()?.ok_or(LsaError::Parse {
            line: 1,
            message: "empty file".to_string(),
        })?;
        let rest = header.strip_prefix("#semsim-lsa v1 ").ok_or(LsaError::Parse {
            line: 1,
            message: "expected '#semsim-lsa v1' header".to_string(),
        })?;
        let mut k: Option<usize> = None;
        let mut weighting = String::new();
        let mut corpus_checksum = String::new();
        for field in rest.split_whitespace() {
            if let Some(v) = field.strip_prefix("k=") {
                k = Some(v.parse().map_err(|e| LsaError::Parse {
                    line: 1,
                    message: format!("bad k: {e}"),
                })?);
            } else if let Some(v) = field.strip_prefix("weighting=") {
                weighting = v.to_string();
            } else if let Some(v) = field.strip_prefix("corpus=") {
                corpus_checksum = v.to_string();
            }
        }
        let k = k.ok_or(LsaError::Parse {
            line: 1,
            message: "header missing k".to_string(),
        })?;

        let body: Vec<String> = lines.collect::<Result<_, _>>()?;
        let body: Vec<String> = body
            .into_iter()
            .filter(|l| !l.trim().is_empty())
            .collect();
        if body.len() % 2 != 0 {
            return Err(LsaError::Parse {
                line: body.len() + 1,
                message: "expected equal counts of vocabulary and vector lines".to_string(),
            });
        }
        let n = body.len() / 2;
        let vocabulary: Vec<String> = body[..n].to_vec();
        let mut vectors = DenseMatrix::zeros(n, k);
        for (i, line) in body[n..].iter().enumerate() {
            let values: Result<Vec<f64>, _> =
                line.split_whitespace().map(|f| f.parse::<f64>()).collect();
            let values = values.map_err(|e| LsaError::Parse {
                line: n + i + 2,
                message: format!("bad vector value: {e}"),
            })?;
            if values.len() != k {
                return Err(LsaError::Parse {
                    line: n + i + 2,
                    message: format!("expected {k} values, got {}", values.len()),
                });
            }
            for (j, v) in values.into_iter().enumerate() {
                vectors.set(i, j, v);
            }
        }
        let vocab_index = vocabulary
            .iter()
            .enumerate()
            .map(|(i, t)| (t.clone(), i))
            .collect();
        Ok(LatentSpace {
            vectors,
            singular_values: Vec::new(),
            vocabulary,
            vocab_index,
            k,
            weighting,
            corpus_checksum,
        })
    }
}

/// Checksum over the corpus text used for metadata.
pub fn corpus_checksum(dc: &DocumentCollection) -> String {
    let mut bytes = Vec::new();
    for (id, text) in dc.iter() {
        bytes.extend_from_slice(id.as_bytes());
        bytes.push(0);
        bytes.extend_from_slice(text.as_bytes());
        bytes.push(0);
    }
    checksum::of_bytes(&bytes)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dc(docs: &[(&str, &str)]) -> DocumentCollection {
        DocumentCollection::from_pairs(
            docs.iter()
                .map(|(a, b)| (a.to_string(), b.to_string()))
                .collect(),
        )
        .unwrap()
    }

    #[test]
    fn tokenize_rules() {
        assert_eq!(
            tokenize("The bank, the Bank!"),
            vec!["the", "bank", "the", "bank"]
        );
        assert_eq!(tokenize(""), Vec::<String>::new());
        assert_eq!(tokenize("e-mail 42 bank"), vec!["mail", "bank"]);
    }

    #[test]
    fn tokenize_stopwords() {
        let stop: BTreeSet<String> = ["the".to_string()].into();
        assert_eq!(
            tokenize_with("the bank", Some(&stop)),
            vec!["bank".to_string()]
        );
    }

    #[test]
    fn raw_matrix_counts() {
        // length-1 tokens are dropped, so use two-letter terms
        let c = dc(&[("d1", "aa bb"), ("d2", "bb")]);
        let m = build_matrix(&c, Weighting::Raw).unwrap();
        assert_eq!(m.vocabulary, vec!["aa", "bb"]);
        let d = m.matrix.to_dense();
        assert_eq!(d.get(0, 0), 1.0);
        assert_eq!(d.get(0, 1), 0.0);
        assert_eq!(d.get(1, 0), 1.0);
        assert_eq!(d.get(1, 1), 1.0);
    }

    #[test]
    fn log_entropy_weights() {
        let c = dc(&[("d1", "solo"), ("d2", "even"), ("d3", "even"), ("d4", "xx")]);
        let m = build_matrix(&c, Weighting::LogEntropy).unwrap();
        let d = m.matrix.to_dense();
        // "solo" occurs once in one doc: weight log2(2)·(1−0) = 1.
        let solo = m.term_index("solo").unwrap();
        assert!((d.get(solo, 0) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn uniform_term_zero_weight() {
        let c = dc(&[("d1", "uni xx"), ("d2", "uni yy")]);
        let m = build_matrix(&c, Weighting::LogEntropy).unwrap();
        let d = m.matrix.to_dense();
        let uni = m.term_index("uni").unwrap();
        assert_eq!(d.get(uni, 0), 0.0);
        assert_eq!(d.get(uni, 1), 0.0);
    }

    #[test]
    fn single_document_rejected() {
        let c = DocumentCollection::from_pairs(vec![("d1".into(), "text".into())]).unwrap();
        assert!(matches!(
            build_matrix(&c, Weighting::Raw),
            Err(LsaError::SingleDocument)
        ));
    }

    #[test]
    fn identical_rows_identical_vectors() {
        let c = dc(&[("d1", "twin clone xx"), ("d2", "twin clone yy")]);
        let m = build_matrix(&c, Weighting::Raw).unwrap();
        let ls = train(&m, 2, 42, "c").unwrap();
        assert_eq!(ls.similarity("twin", "clone").unwrap(), 1.0);
    }

    #[test]
    fn self_similarity_one() {
        let c = dc(&[("d1", "cat dog"), ("d2", "cat bird")]);
        let m = build_matrix(&c, Weighting::Raw).unwrap();
        let ls = train(&m, 2, 42, "c").unwrap();
        assert!((ls.similarity("cat", "cat").unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn full_rank_preserves_row_cosines() {
        let c = dc(&[
            ("d1", "car truck road car"),
            ("d2", "boat ship sea boat"),
            ("d3", "car boat port"),
        ]);
        let m = build_matrix(&c, Weighting::Raw).unwrap();
        let k = 3;
        let ls = train(&m, k, 42, "c").unwrap();
        let dense = m.matrix.to_dense();
        for t1 in 0..m.vocabulary.len() {
            for t2 in 0..m.vocabulary.len() {
                let raw = cosine(dense.row(t1), dense.row(t2));
                let latent = ls
                    .similarity(&m.vocabulary[t1], &m.vocabulary[t2])
                    .unwrap();
                assert!(
                    (raw - latent).abs() < 1e-6,
                    "{} vs {}: raw {raw} latent {latent}",
                    m.vocabulary[t1],
                    m.vocabulary[t2]
                );
            }
        }
    }

    #[test]
    fn out_of_vocabulary_names_label() {
        let c = dc(&[("d1", "cat dog"), ("d2", "cat bird")]);
        let m = build_matrix(&c, Weighting::Raw).unwrap();
        let ls = train(&m, 2, 42, "c").unwrap();
        match ls.similarity("cat", "zebra stripes") {
            Err(LsaError::OutOfVocabulary(l)) => assert_eq!(l, "zebra stripes"),
            other => panic!("expected OutOfVocabulary, got {other:?}"),
        }
    }

    #[test]
    fn save_load_round_trip() {
        let c = dc(&[
            ("d1", "car truck road"),
            ("d2", "boat ship sea"),
            ("d3", "car boat port"),
        ]);
        let m = build_matrix(&c, Weighting::LogEntropy).unwrap();
        let ls = train(&m, 2, 42, "abc").unwrap();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("space.lsa");
        ls.save(&path).unwrap();
        let loaded = LatentSpace::load(&path).unwrap();
        assert_eq!(loaded.k, 2);
        assert_eq!(loaded.corpus_checksum, "abc");
        for a in &m.vocabulary {
            for b in &m.vocabulary {
                let s1 = ls.similarity(a, b).unwrap();
                let s2 = loaded.similarity(a, b).unwrap();
                assert!((s1 - s2).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn doc_separator_format() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("corpus.txt");
        std::fs::write(&path, "%%DOC a\nfirst doc\n%%DOC b\nsecond doc\n").unwrap();
        let c = DocumentCollection::from_single_file(&path).unwrap();
        assert_eq!(c.len(), 2);
        let ids: Vec<&str> = c.iter().map(|(id, _)| id.as_str()).collect();
        assert_eq!(ids, vec!["a", "b"]);
    }
}
