//! Hypernym taxonomy with depth, least-common-subsumer, path-length and
//! Wu-Palmer similarity queries.
//!
//! The taxonomy is a DAG of synsets rooted at a single synset. Multi-root
//! inputs are unified under a virtual `ROOT` node so any two synsets are
//! comparable. Depth counts nodes, with `depth(root) = 1`, which keeps
//! Wu-Palmer strictly positive.

use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};
use std::fmt;
use thiserror::Error;

/// Identifier of the virtual root inserted over multi-root inputs.
pub const VIRTUAL_ROOT_ID: &str = "ROOT";
/// Lemma carried by the virtual root.
pub const VIRTUAL_ROOT_LEMMA: &str = "*root*";

/// Opaque synset identifier. WordNet sources use `pos-offset`
/// (e.g. `n-02958343`); fixtures use short names.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SynsetId(String);

impl SynsetId {
    pub fn new(value: impl Into<String>) -> Self {
        SynsetId(value.into())
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for SynsetId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<&str> for SynsetId {
    fn from(value: &str) -> Self {
        SynsetId(value.to_string())
    }
}

/// One concept node: a set of synonymous lemmas plus hypernym links.
#[derive(Debug, Clone)]
pub struct Synset {
    pub id: SynsetId,
    pub lemmas: Vec<String>,
    pub gloss: Option<String>,
    pub parents: BTreeSet<SynsetId>,
    pub children: BTreeSet<SynsetId>,
}

#[derive(Debug, Error)]
pub enum TaxonomyError {
    #[error("hypernym edges contain a cycle")]
    CycleDetected,
    #[error("duplicate synset id {0}")]
    DuplicateSynsetId(SynsetId),
    #[error("edge references undeclared synset {0}")]
    DanglingEdge(SynsetId),
    #[error("unknown synset {0}")]
    UnknownSynset(SynsetId),
    #[error("unknown word {0:?}")]
    UnknownWord(String),
    #[error("taxonomy has no synsets")]
    Empty,
    #[error("synset {0} declares no lemmas")]
    NoLemmas(SynsetId),
}

/// How a concept label was resolved to synsets.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LabelResolution {
    /// The full (possibly multiword) lemma was found in the index.
    Exact,
    /// Fallback: only the head word (last token) was found.
    HeadWord,
}

/// Immutable hypernym taxonomy. All queries are pure; share freely across
/// threads after construction.
#[derive(Debug, Clone)]
pub struct Taxonomy {
    synsets: BTreeMap<SynsetId, Synset>,
    root: SynsetId,
    lemma_index: BTreeMap<String, BTreeSet<SynsetId>>,
    depths: HashMap<SynsetId, u32>,
}

/// Build a validated taxonomy from node and edge lists.
///
/// Edges are `(child, parent)` hypernym links. If more than one synset has no
/// parent, a virtual root is inserted above all of them.
pub fn build_taxonomy(
    nodes: Vec<(SynsetId, Vec<String>, Option<String>)>,
    edges: Vec<(SynsetId, SynsetId)>,
) -> Result<Taxonomy, TaxonomyError> {
    if nodes.is_empty() {
        return Err(TaxonomyError::Empty);
    }

    let mut synsets: BTreeMap<SynsetId, Synset> = BTreeMap::new();
    for (id, lemmas, gloss) in nodes {
        if lemmas.is_empty() {
            return Err(TaxonomyError::NoLemmas(id));
        }
        let lemmas: Vec<String> = lemmas.iter().map(|l| l.trim().to_lowercase()).collect();
        let synset = Synset {
            id: id.clone(),
            lemmas,
            gloss,
            parents: BTreeSet::new(),
            children: BTreeSet::new(),
        };
        if synsets.insert(id.clone(), synset).is_some() {
            return Err(TaxonomyError::DuplicateSynsetId(id));
        }
    }

    for (child, parent) in &edges {
        if !synsets.contains_key(child) {
            return Err(TaxonomyError::DanglingEdge(child.clone()));
        }
        if !synsets.contains_key(parent) {
            return Err(TaxonomyError::DanglingEdge(parent.clone()));
        }
        if child == parent {
            return Err(TaxonomyError::CycleDetected);
        }
        synsets.get_mut(child).unwrap().parents.insert(parent.clone());
        synsets.get_mut(parent).unwrap().children.insert(child.clone());
    }

    detect_cycle(&synsets)?;

    let parentless: Vec<SynsetId> = synsets
        .values()
        .filter(|s| s.parents.is_empty())
        .map(|s| s.id.clone())
        .collect();
    let root = match parentless.len() {
        0 => return Err(TaxonomyError::CycleDetected),
        1 => parentless[0].clone(),
        _ => {
            let root_id = SynsetId::new(VIRTUAL_ROOT_ID);
            if synsets.contains_key(&root_id) {
                return Err(TaxonomyError::DuplicateSynsetId(root_id));
            }
            let mut virtual_root = Synset {
                id: root_id.clone(),
                lemmas: vec![VIRTUAL_ROOT_LEMMA.to_string()],
                gloss: None,
                parents: BTreeSet::new(),
                children: BTreeSet::new(),
            };
            for orphan in &parentless {
                virtual_root.children.insert(orphan.clone());
                synsets
                    .get_mut(orphan)
                    .unwrap()
                    .parents
                    .insert(root_id.clone());
            }
            synsets.insert(root_id.clone(), virtual_root);
            root_id
        }
    };

    let depths = compute_depths(&synsets, &root);

    let mut lemma_index: BTreeMap<String, BTreeSet<SynsetId>> = BTreeMap::new();
    for synset in synsets.values() {
        for lemma in &synset.lemmas {
            lemma_index
                .entry(lemma.clone())
                .or_default()
                .insert(synset.id.clone());
        }
    }

    Ok(Taxonomy {
        synsets,
        root,
        lemma_index,
        depths,
    })
}

fn detect_cycle(synsets: &BTreeMap<SynsetId, Synset>) -> Result<(), TaxonomyError> {
    // Kahn over child→parent edges.
    let mut indegree: HashMap<&SynsetId, usize> = synsets
        .values()
        .map(|s| (&s.id, s.parents.len()))
        .collect();
    let mut queue: VecDeque<&SynsetId> = indegree
        .iter()
        .filter(|(_, d)| **d == 0)
        .map(|(id, _)| *id)
        .collect();
    let mut visited = 0usize;
    while let Some(id) = queue.pop_front() {
        visited += 1;
        for child in &synsets[id].children {
            let d = indegree.get_mut(child).unwrap();
            *d -= 1;
            if *d == 0 {
                queue.push_back(child);
            }
        }
    }
    if visited != synsets.len() {
        return Err(TaxonomyError::CycleDetected);
    }
    Ok(())
}

fn compute_depths(
    synsets: &BTreeMap<SynsetId, Synset>,
    root: &SynsetId,
) -> HashMap<SynsetId, u32> {
    // BFS from the root gives the minimum-edge path under multiple inheritance.
    let mut depths: HashMap<SynsetId, u32> = HashMap::new();
    let mut queue = VecDeque::new();
    depths.insert(root.clone(), 1);
    queue.push_back(root.clone());
    while let Some(id) = queue.pop_front() {
        let d = depths[&id];
        for child in &synsets[&id].children {
            if !depths.contains_key(child) {
                depths.insert(child.clone(), d + 1);
                queue.push_back(child.clone());
            }
        }
    }
    depths
}

impl Taxonomy {
    pub fn root(&self) -> &SynsetId {
        &self.root
    }

    pub fn len(&self) -> usize {
        self.synsets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.synsets.is_empty()
    }

    pub fn contains(&self, id: &SynsetId) -> bool {
        self.synsets.contains_key(id)
    }

    pub fn synset(&self, id: &SynsetId) -> Result<&Synset, TaxonomyError> {
        self.synsets
            .get(id)
            .ok_or_else(|| TaxonomyError::UnknownSynset(id.clone()))
    }

    pub fn synsets(&self) -> impl Iterator<Item = &Synset> {
        self.synsets.values()
    }

    pub fn lemma_index(&self) -> &BTreeMap<String, BTreeSet<SynsetId>> {
        &self.lemma_index
    }

    /// Synsets carrying a lemma, if any.
    pub fn synsets_of_lemma(&self, lemma: &str) -> Option<&BTreeSet<SynsetId>> {
        self.lemma_index.get(lemma)
    }

    /// Node-counting depth: 1 + minimum hypernym edges to the root.
    pub fn depth(&self, id: &SynsetId) -> Result<u32, TaxonomyError> {
        self.depths
            .get(id)
            .copied()
            .ok_or_else(|| TaxonomyError::UnknownSynset(id.clone()))
    }

    /// Upward BFS: every ancestor (reflexive) with its minimum edge distance.
    pub fn ancestor_distances(
        &self,
        id: &SynsetId,
    ) -> Result<HashMap<SynsetId, u32>, TaxonomyError> {
        if !self.contains(id) {
            return Err(TaxonomyError::UnknownSynset(id.clone()));
        }
        let mut dist: HashMap<SynsetId, u32> = HashMap::new();
        let mut queue = VecDeque::new();
        dist.insert(id.clone(), 0);
        queue.push_back(id.clone());
        while let Some(cur) = queue.pop_front() {
            let d = dist[&cur];
            for parent in &self.synsets[&cur].parents {
                if !dist.contains_key(parent) {
                    dist.insert(parent.clone(), d + 1);
                    queue.push_back(parent.clone());
                }
            }
        }
        Ok(dist)
    }

    /// Deepest common ancestor. Depth ties are broken by the smaller total
    /// distance to the two query nodes (so `lcs(a, a) = a` even when an
    /// ancestor shares a's depth through a shortcut edge), then by
    /// lexicographically smallest id.
    pub fn lcs(&self, a: &SynsetId, b: &SynsetId) -> Result<SynsetId, TaxonomyError> {
        let anc_a = self.ancestor_distances(a)?;
        let anc_b = self.ancestor_distances(b)?;
        // Among common subsumers, pick the one maximising the through-subsumer
        // Wu-Palmer score 2d/(2d + dist_a + dist_b).  On trees this is simply
        // the deepest common ancestor, but on multi-inheritance graphs a
        // shortcut parent can sit deeper than its own descendant, and scoring
        // keeps lcs(a, a) == a.  Ties: deeper wins, then nearer, then smaller id.
        let mut best: Option<(f64, u32, u32, SynsetId)> = None;
        for (id, da) in &anc_a {
            if let Some(db) = anc_b.get(id) {
                let depth = self.depths[id];
                let total = da + db;
                let score = 2.0 * depth as f64 / (2.0 * depth as f64 + total as f64);
                let better = match &best {
                    None => true,
                    Some((bs, bd, bt, bid)) => {
                        score > *bs
                            || (score == *bs && depth > *bd)
                            || (score == *bs && depth == *bd && total < *bt)
                            || (score == *bs && depth == *bd && total == *bt && id < bid)
                    }
                };
                if better {
                    best = Some((score, depth, total, id.clone()));
                }
            }
        }
        // The root subsumes everything, so a common ancestor always exists.
        Ok(best.expect("rooted taxonomy has a common ancestor").3)
    }

    /// Minimum hypernym/hyponym edges on a path through a common subsumer.
    pub fn path_length(&self, a: &SynsetId, b: &SynsetId) -> Result<u32, TaxonomyError> {
        let anc_a = self.ancestor_distances(a)?;
        let anc_b = self.ancestor_distances(b)?;
        let mut best = u32::MAX;
        for (id, da) in &anc_a {
            if let Some(db) = anc_b.get(id) {
                best = best.min(da + db);
            }
        }
        Ok(best)
    }

    /// Wu-Palmer similarity: `2·depth(lcs) / (depth(a) + depth(b))`, with the
    /// two node depths measured through the LCS
    /// (`depth(lcs) + distance(node, lcs)`). On trees this equals plain
    /// depth; on multi-inheritance DAGs it keeps the score in (0, 1], which
    /// plain minimum depth cannot guarantee.
    pub fn wu_palmer(&self, a: &SynsetId, b: &SynsetId) -> Result<f64, TaxonomyError> {
        let anc_a = self.ancestor_distances(a)?;
        let anc_b = self.ancestor_distances(b)?;
        let lcs = self.lcs(a, b)?;
        let dl = self.depth(&lcs)? as f64;
        let da = dl + anc_a[&lcs] as f64;
        let db = dl + anc_b[&lcs] as f64;
        Ok(2.0 * dl / (da + db))
    }

    /// Resolve a concept label to candidate synsets.
    ///
    /// Multiword labels first try the exact lemma, then fall back to the head
    /// word (last token). The resolution kind is reported for diagnostics.
    pub fn resolve_label(
        &self,
        label: &str,
    ) -> Result<(Vec<SynsetId>, LabelResolution), TaxonomyError> {
        let normalized = label.trim().to_lowercase();
        if let Some(ids) = self.lemma_index.get(&normalized) {
            return Ok((ids.iter().cloned().collect(), LabelResolution::Exact));
        }
        if let Some(head) = normalized.split_whitespace().last() {
            if head != normalized {
                if let Some(ids) = self.lemma_index.get(head) {
                    return Ok((ids.iter().cloned().collect(), LabelResolution::HeadWord));
                }
            }
        }
        Err(TaxonomyError::UnknownWord(label.to_string()))
    }

    /// Word-level Wu-Palmer: maximum over all sense pairs of the two labels.
    pub fn word_similarity_wup(&self, w1: &str, w2: &str) -> Result<f64, TaxonomyError> {
        let (senses1, _) = self.resolve_label(w1)?;
        let (senses2, _) = self.resolve_label(w2)?;
        let mut best = f64::NEG_INFINITY;
        for a in &senses1 {
            for b in &senses2 {
                best = best.max(self.wu_palmer(a, b)?);
            }
        }
        Ok(best)
    }

    /// Canonical text form: sorted node and edge lines. Stable across loads of
    /// identical sources; used for checksums.
    pub fn canonical_serialization(&self) -> String {
        let mut out = String::new();
        for synset in self.synsets.values() {
            out.push_str("N ");
            out.push_str(synset.id.as_str());
            out.push(' ');
            out.push_str(&synset.lemmas.join(","));
            out.push('\n');
        }
        for synset in self.synsets.values() {
            for parent in &synset.parents {
                out.push_str("E ");
                out.push_str(synset.id.as_str());
                out.push(' ');
                out.push_str(parent.as_str());
                out.push('\n');
            }
        }
        out
    }

    /// Checksum of the canonical serialization.
    pub fn checksum(&self) -> String {
        crate::checksum::of_bytes(self.canonical_serialization().as_bytes())
    }
}
