//! Corpus-derived information content and the Jiang-Conrath measure.
//!
//! Counting: each resolvable token splits one unit of credit evenly over its
//! matching synsets; every credited synset propagates the credit to all of
//! its ancestors, once per ancestor even under multiple inheritance. Add-one
//! smoothing keeps every IC value finite. IC uses the natural log; the
//! `1/(1+d)` similarity mapping absorbs the base anyway.

use crate::taxonomy::{SynsetId, Taxonomy, TaxonomyError};
use std::collections::BTreeMap;
use std::io::{BufRead, BufReader, Write};
use std::path::Path;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum IcError {
    #[error(transparent)]
    Taxonomy(#[from] TaxonomyError),
    #[error("unknown synset {0}")]
    UnknownSynset(SynsetId),
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
    #[error("malformed ic table at line {line}: {message}")]
    Parse { line: usize, message: String },
}

/// Propagated, smoothed synset counts. `total` is the root count.
#[derive(Debug, Clone)]
pub struct FrequencyTable {
    counts: BTreeMap<SynsetId, f64>,
    total: f64,
    resolved_tokens: usize,
}

impl FrequencyTable {
    pub fn count(&self, s: &SynsetId) -> Result<f64, IcError> {
        self.counts
            .get(s)
            .copied()
            .ok_or_else(|| IcError::UnknownSynset(s.clone()))
    }

    pub fn total(&self) -> f64 {
        self.total
    }

    /// Number of corpus tokens that resolved to at least one synset.
    pub fn resolved_tokens(&self) -> usize {
        self.resolved_tokens
    }

    /// True when no corpus token resolved and the table holds only the
    /// smoothing floor. Reported as a warning by callers, not a failure.
    pub fn is_smoothing_only(&self) -> bool {
        self.resolved_tokens == 0
    }

    pub fn iter(&self) -> impl Iterator<Item = (&SynsetId, f64)> {
        self.counts.iter().map(|(id, c)| (id, *c))
    }
}

/// Count corpus token occurrences into propagated, smoothed synset counts.
pub fn count_frequencies(taxonomy: &Taxonomy, tokens: &[String]) -> FrequencyTable {
    let mut counts: BTreeMap<SynsetId, f64> = taxonomy
        .synsets()
        .map(|s| (s.id.clone(), 0.0))
        .collect();
    let mut resolved_tokens = 0usize;

    for token in tokens {
        let Some(senses) = taxonomy.synsets_of_lemma(&token.to_lowercase()) else {
            continue;
        };
        resolved_tokens += 1;
        let credit = 1.0 / senses.len() as f64;
        for sense in senses {
            let ancestors = taxonomy
                .ancestor_distances(sense)
                .expect("sense comes from the lemma index");
            let mut ordered: Vec<&SynsetId> = ancestors.keys().collect();
            ordered.sort(); // deterministic summation order
            for ancestor in ordered {
                *counts.get_mut(ancestor).unwrap() += credit;
            }
        }
    }

    for count in counts.values_mut() {
        *count += 1.0;
    }
    let total = counts[taxonomy.root()];

    FrequencyTable {
        counts,
        total,
        resolved_tokens,
    }
}

/// `-ln(count(s) / total)`, clamped at zero against rounding.
pub fn information_content(ft: &FrequencyTable, s: &SynsetId) -> Result<f64, IcError> {
    let count = ft.count(s)?;
    Ok((-(count / ft.total).ln()).max(0.0))
}

#[derive(Debug, Clone, Copy)]
struct IcEntry {
    count: f64,
    ic: f64,
}

/// Per-synset information content with provenance identifiers.
#[derive(Debug, Clone)]
pub struct IcTable {
    entries: BTreeMap<SynsetId, IcEntry>,
    taxonomy_ref: String,
    corpus_ref: String,
}

impl IcTable {
    pub fn build(ft: &FrequencyTable, taxonomy_ref: &str, corpus_ref: &str) -> IcTable {
        let entries = ft
            .iter()
            .map(|(id, count)| {
                let ic = (-(count / ft.total()).ln()).max(0.0);
                (id.clone(), IcEntry { count, ic })
            })
            .collect();
        IcTable {
            entries,
            taxonomy_ref: taxonomy_ref.to_string(),
            corpus_ref: corpus_ref.to_string(),
        }
    }

    pub fn ic(&self, s: &SynsetId) -> Result<f64, IcError> {
        self.entries
            .get(s)
            .map(|e| e.ic)
            .ok_or_else(|| IcError::UnknownSynset(s.clone()))
    }

    pub fn taxonomy_ref(&self) -> &str {
        &self.taxonomy_ref
    }

    pub fn corpus_ref(&self) -> &str {
        &self.corpus_ref
    }

    /// `ic(a) + ic(b) − 2·ic(lcs(a,b))`, clamped at zero.
    pub fn jiang_conrath_distance(
        &self,
        taxonomy: &Taxonomy,
        a: &SynsetId,
        b: &SynsetId,
    ) -> Result<f64, IcError> {
        let lcs = taxonomy.lcs(a, b)?;
        let d = self.ic(a)? + self.ic(b)? - 2.0 * self.ic(&lcs)?;
        Ok(d.max(0.0))
    }

    /// `1 / (1 + distance)`: monotone, bounded, 1 exactly at distance 0.
    pub fn jcn_similarity(
        &self,
        taxonomy: &Taxonomy,
        a: &SynsetId,
        b: &SynsetId,
    ) -> Result<f64, IcError> {
        Ok(1.0 / (1.0 + self.jiang_conrath_distance(taxonomy, a, b)?))
    }

    /// Word-level Jiang-Conrath: maximum over all sense pairs.
    pub fn word_similarity_jcn(
        &self,
        taxonomy: &Taxonomy,
        w1: &str,
        w2: &str,
    ) -> Result<f64, IcError> {
        let (senses1, _) = taxonomy.resolve_label(w1)?;
        let (senses2, _) = taxonomy.resolve_label(w2)?;
        let mut best = f64::NEG_INFINITY;
        for a in &senses1 {
            for b in &senses2 {
                best = best.max(self.jcn_similarity(taxonomy, a, b)?);
            }
        }
        Ok(best)
    }

    /// Export as TSV: header line, then `synset_id<TAB>count<TAB>ic` rows.
    pub fn write_tsv<W: Write>(&self, mut out: W) -> Result<(), IcError> {
        writeln!(
            out,
            "#semsim-ic v1 taxonomy={} corpus={} log=nat smoothing=add1",
            self.taxonomy_ref, self.corpus_ref
        )?;
        for (id, entry) in &self.entries {
            writeln!(out, "{}\t{:.17e}\t{:.17e}", id, entry.count, entry.ic)?;
        }
        Ok(())
    }

    pub fn save(&self, path: &Path) -> Result<(), IcError> {
        let file = std::fs::File::create(path)?;
        self.write_tsv(std::io::BufWriter::new(file))
    }

    pub fn load(path: &Path) -> Result<IcTable, IcError> {
        let file = std::fs::File::open(path)?;
        let reader = BufReader::new(file);
        let mut lines = reader.lines();
        let header = lines.next().transpose()?.ok_or(IcError::Parse {
            line: 1,
            message: "empty file".to_string(),
        })?;
        let rest = header
            .strip_prefix("#semsim-ic v1 ")
            .ok_or(IcError::Parse {
                line: 1,
                message: "expected '#semsim-ic v1' header".to_string(),
            })?;
        let mut taxonomy_ref = String::new();
        let mut corpus_ref = String::new();
        for field in rest.split_whitespace() {
            if let Some(v) = field.strip_prefix("taxonomy=") {
                taxonomy_ref = v.to_string();
            } else if let Some(v) = field.strip_prefix("corpus=") {
                corpus_ref = v.to_string();
            }
        }
        let mut entries = BTreeMap::new();
        for (i, line) in lines.enumerate() {
            let line = line?;
            if line.trim().is_empty() {
                continue;
            }
            let lineno = i + 2;
            let mut parts = line.split('\t');
            let (Some(id), Some(count), Some(ic)) =
                (parts.next(), parts.next(), parts.next())
            else {
                return Err(IcError::Parse {
                    line: lineno,
                    message: "expected 3 tab-separated fields".to_string(),
                });
            };
            let count: f64 = count.parse().map_err(|e| IcError::Parse {
                line: lineno,
                message: format!("bad count: {e}"),
            })?;
            let ic: f64 = ic.parse().map_err(|e| IcError::Parse {
                line: lineno,
                message: format!("bad ic: {e}"),
            })?;
            entries.insert(SynsetId::new(id), IcEntry { count, ic });
        }
        Ok(IcTable {
            entries,
            taxonomy_ref,
            corpus_ref,
        })
    }
}
