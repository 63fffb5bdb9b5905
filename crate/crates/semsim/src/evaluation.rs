//! Alignment evaluation: pairwise similarity matrices, threshold filtering,
//! comparison against an expert reference, recall/precision/F-measure, and
//! the threshold sweep (default 0.70 to 1.00 in 0.05 steps).

use crate::infocontent::IcTable;
use crate::lsa::LatentSpace;
use crate::taxonomy::Taxonomy;
use serde::Serialize;
use std::collections::BTreeSet;
use std::io::Write;
use std::path::Path;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum EvalError {
    #[error("concept set is empty")]
    EmptyConceptSet,
    #[error("duplicate concept {0:?} in set {1:?}")]
    DuplicateConcept(String, String),
    #[error("reference table is empty")]
    EmptyReference,
    #[error("reference pair ({0:?}, {1:?}) names a concept missing from its set")]
    UnknownReferenceConcept(String, String),
    #[error("bad sweep config: start {start}, end {end}, step {step}")]
    BadSweepConfig { start: f64, end: f64, step: f64 },
    #[error("parse error in {file} at line {line}: {message}")]
    Parse {
        file: String,
        line: usize,
        message: String,
    },
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

/// Named, ordered set of unique concept labels.
#[derive(Debug, Clone)]
pub struct ConceptSet {
    pub domain_name: String,
    pub concepts: Vec<String>,
}

impl ConceptSet {
    pub fn new(domain_name: &str, concepts: Vec<String>) -> Result<ConceptSet, EvalError> {
        if concepts.is_empty() {
            return Err(EvalError::EmptyConceptSet);
        }
        let mut seen = BTreeSet::new();
        for c in &concepts {
            if !seen.insert(c.clone()) {
                return Err(EvalError::DuplicateConcept(
                    c.clone(),
                    domain_name.to_string(),
                ));
            }
        }
        Ok(ConceptSet {
            domain_name: domain_name.to_string(),
            concepts,
        })
    }

    /// One label per line; `#` comments and blank lines skipped.
    pub fn from_file(path: &Path) -> Result<ConceptSet, EvalError> {
        let text = std::fs::read_to_string(path)?;
        let concepts: Vec<String> = text
            .lines()
            .map(|l| l.trim())
            .filter(|l| !l.is_empty() && !l.starts_with('#'))
            .map(|l| l.to_string())
            .collect();
        let name = path
            .file_stem()
            .map(|s| s.to_string_lossy().to_string())
            .unwrap_or_else(|| "set".to_string());
        ConceptSet::new(&name, concepts)
    }

    pub fn len(&self) -> usize {
        self.concepts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.concepts.is_empty()
    }
}

/// A similarity measure over concept labels. Per-pair failures surface as
/// `Err(reason)` and land in the matrix's missing set.
pub trait SimilarityBackend {
    fn tag(&self) -> String;
    fn similarity(&self, a: &str, b: &str) -> Result<f64, String>;
}

pub struct WupBackend<'a>(pub &'a Taxonomy);

impl SimilarityBackend for WupBackend<'_> {
    fn tag(&self) -> String {
        "wup".to_string()
    }

    fn similarity(&self, a: &str, b: &str) -> Result<f64, String> {
        self.0.word_similarity_wup(a, b).map_err(|e| e.to_string())
    }
}

pub struct JcnBackend<'a> {
    pub taxonomy: &'a Taxonomy,
    pub ic_table: &'a IcTable,
}

impl SimilarityBackend for JcnBackend<'_> {
    fn tag(&self) -> String {
        "jcn".to_string()
    }

    fn similarity(&self, a: &str, b: &str) -> Result<f64, String> {
        self.ic_table
            .word_similarity_jcn(self.taxonomy, a, b)
            .map_err(|e| e.to_string())
    }
}

pub struct LsaBackend<'a> {
    pub space: &'a LatentSpace,
    pub space_id: String,
}

impl SimilarityBackend for LsaBackend<'_> {
    fn tag(&self) -> String {
        format!("lsa:{}", self.space_id)
    }

    fn similarity(&self, a: &str, b: &str) -> Result<f64, String> {
        self.space.similarity(a, b).map_err(|e| e.to_string())
    }
}

/// All pairwise scores between two concept sets under one measure.
#[derive(Debug, Clone)]
pub struct SimilarityMatrix {
    pub set_a: ConceptSet,
    pub set_b: ConceptSet,
    pub measure: String,
    scores: Vec<Vec<Option<f64>>>,
    missing: Vec<(usize, usize, String)>,
}

impl SimilarityMatrix {
    pub fn score(&self, i: usize, j: usize) -> Option<f64> {
        self.scores[i][j]
    }

    pub fn missing(&self) -> &[(usize, usize, String)] {
        &self.missing
    }

    /// Construct directly from a score grid (used by tests and sweeps over
    /// synthetic matrices).
    pub fn from_scores(
        set_a: ConceptSet,
        set_b: ConceptSet,
        measure: &str,
        scores: Vec<Vec<Option<f64>>>,
    ) -> SimilarityMatrix {
        assert_eq!(scores.len(), set_a.len());
        for row in &scores {
            assert_eq!(row.len(), set_b.len());
        }
        SimilarityMatrix {
            set_a,
            set_b,
            measure: measure.to_string(),
            scores,
            missing: Vec::new(),
        }
    }
}

/// Score the full cross product of two concept sets. Per-pair errors are
/// captured, never abort the matrix.
pub fn pairwise_similarity(
    set_a: &ConceptSet,
    set_b: &ConceptSet,
    backend: &dyn SimilarityBackend,
) -> SimilarityMatrix {
    let mut scores = vec![vec![None; set_b.len()]; set_a.len()];
    let mut missing = Vec::new();
    for (i, a) in set_a.concepts.iter().enumerate() {
        for (j, b) in set_b.concepts.iter().enumerate() {
            match backend.similarity(a, b) {
                Ok(s) => scores[i][j] = Some(s),
                Err(reason) => missing.push((i, j, reason)),
            }
        }
    }
    SimilarityMatrix {
        set_a: set_a.clone(),
        set_b: set_b.clone(),
        measure: backend.tag(),
        scores,
        missing,
    }
}

/// Pairs scoring at or above the threshold (inclusive, so exact-1.0 scores
/// survive the t=1.0 row). Missing pairs never pass.
pub fn filter_threshold(m: &SimilarityMatrix, t: f64) -> BTreeSet<(String, String)> {
    let mut predicted = BTreeSet::new();
    for (i, a) in m.set_a.concepts.iter().enumerate() {
        for (j, b) in m.set_b.concepts.iter().enumerate() {
            if let Some(score) = m.scores[i][j] {
                if score >= t {
                    predicted.insert((a.clone(), b.clone()));
                }
            }
        }
    }
    predicted
}

/// Expert reference alignment; pair order is fixed by (set_a, set_b) roles.
#[derive(Debug, Clone)]
pub struct ReferenceAlignment {
    pub pairs: BTreeSet<(String, String)>,
}

impl ReferenceAlignment {
    pub fn new(pairs: BTreeSet<(String, String)>) -> ReferenceAlignment {
        ReferenceAlignment { pairs }
    }

    /// CSV with header `concept_a,concept_b`.
    pub fn from_file(path: &Path) -> Result<ReferenceAlignment, EvalError> {
        let file = path.display().to_string();
        let text = std::fs::read_to_string(path)?;
        let mut lines = text.lines().enumerate();
        let (_, header) = lines.next().ok_or_else(|| EvalError::Parse {
            file: file.clone(),
            line: 1,
            message: "empty file".to_string(),
        })?;
        if header.trim() != "concept_a,concept_b" {
            return Err(EvalError::Parse {
                file,
                line: 1,
                message: "expected header 'concept_a,concept_b'".to_string(),
            });
        }
        let mut pairs = BTreeSet::new();
        for (i, line) in lines {
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            let Some((a, b)) = line.split_once(',') else {
                return Err(EvalError::Parse {
                    file,
                    line: i + 1,
                    message: "expected two comma-separated fields".to_string(),
                });
            };
            pairs.insert((a.trim().to_string(), b.trim().to_string()));
        }
        Ok(ReferenceAlignment { pairs })
    }

    pub fn beta(&self) -> usize {
        self.pairs.len()
    }

    pub fn validate_against(
        &self,
        set_a: &ConceptSet,
        set_b: &ConceptSet,
    ) -> Result<(), EvalError> {
        for (a, b) in &self.pairs {
            if !set_a.concepts.contains(a) || !set_b.concepts.contains(b) {
                return Err(EvalError::UnknownReferenceConcept(a.clone(), b.clone()));
            }
        }
        Ok(())
    }
}

/// `Δ = |predicted ∩ reference|`.
pub fn compare(predicted: &BTreeSet<(String, String)>, reference: &ReferenceAlignment) -> usize {
    predicted.intersection(&reference.pairs).count()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Metrics {
    pub recall: f64,
    pub precision: f64,
    pub f_measure: f64,
}

/// Recall = Δ/β, precision = Δ/ζ (0 at ζ=0), F = harmonic mean with a zero
/// guard at R=0 or P=0.
pub fn metrics(delta: usize, beta: usize, zeta: usize) -> Result<Metrics, EvalError> {
    if beta == 0 {
        return Err(EvalError::EmptyReference);
    }
    let recall = delta as f64 / beta as f64;
    let precision = if zeta == 0 {
        0.0
    } else {
        delta as f64 / zeta as f64
    };
    let f_measure = if recall == 0.0 || precision == 0.0 {
        0.0
    } else {
        2.0 / (1.0 / recall + 1.0 / precision)
    };
    Ok(Metrics {
        recall,
        precision,
        f_measure,
    })
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct SweepConfig {
    pub start: f64,
    pub end: f64,
    pub step: f64,
}

impl Default for SweepConfig {
    fn default() -> Self {
        SweepConfig {
            start: 0.70,
            end: 1.00,
            step: 0.05,
        }
    }
}

impl SweepConfig {
    /// Integer step counting avoids floating-point drift changing the row
    /// count; endpoint included within 1e-9 slack.
    pub fn thresholds(&self) -> Result<Vec<f64>, EvalError> {
        if self.step <= 0.0 || self.start > self.end || self.start < 0.0 || self.end > 1.0 + 1e-9
        {
            return Err(EvalError::BadSweepConfig {
                start: self.start,
                end: self.end,
                step: self.step,
            });
        }
        let n = ((self.end - self.start) / self.step).round() as usize;
        let mut out = Vec::with_capacity(n + 1);
        for i in 0..=n {
            let t = self.start + i as f64 * self.step;
            if t <= self.end + 1e-9 {
                out.push(t);
            }
        }
        Ok(out)
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ReportRow {
    pub threshold: f64,
    pub zeta: usize,
    pub delta: usize,
    pub recall: f64,
    pub precision: f64,
    pub f_measure: f64,
}

/// Provenance block carried in the JSON sidecar.
#[derive(Debug, Clone, Default, Serialize)]
pub struct ReportMetadata {
    pub measure: String,
    pub set_a: String,
    pub set_b: String,
    /// Normalization decisions baked into the scores (e.g. the jcn
    /// 1/(1+distance) mapping, log base).
    pub normalization: String,
    pub taxonomy_checksum: Option<String>,
    pub corpus_checksum: Option<String>,
    pub lsa_k: Option<usize>,
    pub lsa_weighting: Option<String>,
    pub seed: Option<u64>,
    pub missing_pairs: usize,
    pub timestamp: Option<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct EvaluationReport {
    pub rows: Vec<ReportRow>,
    pub metadata: ReportMetadata,
}

/// One report row per sweep threshold, ascending.
pub fn sweep(
    m: &SimilarityMatrix,
    reference: &ReferenceAlignment,
    config: &SweepConfig,
    metadata: ReportMetadata,
) -> Result<EvaluationReport, EvalError> {
    let thresholds = config.thresholds()?;
    let mut rows = Vec::with_capacity(thresholds.len());
    for t in thresholds {
        let predicted = filter_threshold(m, t);
        let zeta = predicted.len();
        let delta = compare(&predicted, reference);
        let metric = metrics(delta, reference.beta(), zeta)?;
        rows.push(ReportRow {
            threshold: t,
            zeta,
            delta,
            recall: metric.recall,
            precision: metric.precision,
            f_measure: metric.f_measure,
        });
    }
    Ok(EvaluationReport { rows, metadata })
}

impl EvaluationReport {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("threshold,zeta,delta,recall,precision,f_measure\n");
        for row in &self.rows {
            out.push_str(&format!(
                "{:.6},{},{},{:.6},{:.6},{:.6}\n",
                row.threshold, row.zeta, row.delta, row.recall, row.precision, row.f_measure
            ));
        }
        out
    }

    pub fn write_csv(&self, path: &Path) -> Result<(), EvalError> {
        let mut file = std::fs::File::create(path)?;
        file.write_all(self.to_csv().as_bytes())?;
        Ok(())
    }

    pub fn write_json(&self, path: &Path) -> Result<(), EvalError> {
        let json = serde_json::to_string_pretty(self).expect("report serializes");
        std::fs::write(path, json)?;
        Ok(())
    }

    /// Row with the best F-measure; earliest threshold wins ties.
    pub fn best_f_row(&self) -> Option<&ReportRow> {
        self.rows
            .iter()
            .reduce(|best, row| if row.f_measure > best.f_measure { row } else { best })
    }
}
