//! Taxonomy loaders: the WordNet 3.x database file grammar
//! (`index.noun` / `data.noun`) and a simple line-oriented fixture format.
//!
//! Data-file grammar per field:
//! `offset lex_filenum ss_type w_cnt (word lex_id)* p_cnt (ptr)* ... | gloss`
//! where `w_cnt` and `lex_id` are hexadecimal and `p_cnt` is decimal.
//! Offsets are decimal despite the zero padding. Only `@` (hypernym) and
//! `@i` (instance hypernym) pointers become taxonomy edges; instance
//! hypernyms keep every noun synset rooted. License header lines start with
//! two spaces and are skipped.

use crate::taxonomy::{build_taxonomy, SynsetId, Taxonomy, TaxonomyError};
use std::collections::BTreeSet;
use std::io::Write;
use std::path::Path;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum WordNetError {
    #[error("io error reading {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("malformed line at byte {position}: {message}")]
    MalformedLine { position: usize, message: String },
    #[error("database file contains no synset records")]
    EmptyDatabase,
    #[error("pointer references missing offset {0}")]
    DanglingEdge(String),
    #[error(transparent)]
    Taxonomy(#[from] TaxonomyError),
    #[error("parse error at line {line}: {message}")]
    ParseError { line: usize, message: String },
}

/// One parsed `data.<pos>` record.
#[derive(Debug, Clone, PartialEq)]
pub struct RawSynsetRecord {
    pub offset: u64,
    pub pos: char,
    pub words: Vec<(String, u32)>,
    pub pointers: Vec<Pointer>,
    pub gloss: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Pointer {
    pub symbol: String,
    pub target_offset: u64,
    pub target_pos: char,
    pub source_target: u32,
}

/// Whitespace tokenizer that tracks byte positions for error reporting.
struct Cursor<'a> {
    line: &'a str,
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn new(line: &'a str) -> Cursor<'a> {
        Cursor { line, pos: 0 }
    }

    fn next_token(&mut self) -> Option<(&'a str, usize)> {
        let bytes = self.line.as_bytes();
        while self.pos < bytes.len() && bytes[self.pos] == b' ' {
            self.pos += 1;
        }
        if self.pos >= bytes.len() {
            return None;
        }
        let start = self.pos;
        while self.pos < bytes.len() && bytes[self.pos] != b' ' {
            self.pos += 1;
        }
        Some((&self.line[start..self.pos], start))
    }

    fn expect_token(&mut self, what: &str) -> Result<(&'a str, usize), WordNetError> {
        self.next_token().ok_or_else(|| WordNetError::MalformedLine {
            position: self.pos,
            message: format!("unexpected end of line, expected {what}"),
        })
    }

    fn rest(&self) -> &'a str {
        &self.line[self.pos.min(self.line.len())..]
    }
}

fn parse_decimal(token: &str, pos: usize, what: &str) -> Result<u64, WordNetError> {
    token.parse().map_err(|_| WordNetError::MalformedLine {
        position: pos,
        message: format!("{what}: expected decimal number, got {token:?}"),
    })
}

fn parse_hex(token: &str, pos: usize, what: &str) -> Result<u32, WordNetError> {
    u32::from_str_radix(token, 16).map_err(|_| WordNetError::MalformedLine {
        position: pos,
        message: format!("{what}: expected hexadecimal number, got {token:?}"),
    })
}

/// Parse one non-license line of a WordNet `data.<pos>` file.
pub fn parse_data_line(line: &str) -> Result<RawSynsetRecord, WordNetError> {
    let mut cursor = Cursor::new(line);

    let (tok, pos) = cursor.expect_token("synset offset")?;
    let offset = parse_decimal(tok, pos, "synset offset")?;

    let (tok, pos) = cursor.expect_token("lex_filenum")?;
    parse_decimal(tok, pos, "lex_filenum")?;

    let (tok, pos) = cursor.expect_token("ss_type")?;
    if tok.len() != 1 || !"nvasr".contains(tok) {
        return Err(WordNetError::MalformedLine {
            position: pos,
            message: format!("ss_type: expected one of n v a s r, got {tok:?}"),
        });
    }
    let ss_type = tok.chars().next().unwrap();

    let (tok, pos) = cursor.expect_token("w_cnt")?;
    let w_cnt = parse_hex(tok, pos, "w_cnt")?; // hex per the grammar
    if w_cnt == 0 {
        return Err(WordNetError::MalformedLine {
            position: pos,
            message: "w_cnt: synset must have at least one word".to_string(),
        });
    }

    let mut words = Vec::with_capacity(w_cnt as usize);
    for _ in 0..w_cnt {
        let (word, wpos) = cursor.expect_token("word")?;
        if word == "|" {
            return Err(WordNetError::MalformedLine {
                position: wpos,
                message: "word count exceeds the words present".to_string(),
            });
        }
        let (lex, lpos) = cursor.expect_token("lex_id")?;
        let lex_id = parse_hex(lex, lpos, "lex_id")?;
        words.push((word.to_string(), lex_id));
    }

    let (tok, pos) = cursor.expect_token("p_cnt")?;
    let p_cnt = parse_decimal(tok, pos, "p_cnt")?; // decimal, unlike w_cnt

    let mut pointers = Vec::with_capacity(p_cnt as usize);
    for _ in 0..p_cnt {
        let (symbol, spos) = cursor.expect_token("pointer symbol")?;
        if symbol == "|" {
            return Err(WordNetError::MalformedLine {
                position: spos,
                message: "pointer count exceeds the pointers present".to_string(),
            });
        }
        let (off, opos) = cursor.expect_token("pointer offset")?;
        let target_offset = parse_decimal(off, opos, "pointer offset")?;
        let (p, ppos) = cursor.expect_token("pointer pos")?;
        if p.len() != 1 || !"nvasr".contains(p) {
            return Err(WordNetError::MalformedLine {
                position: ppos,
                message: format!("pointer pos: expected one of n v a s r, got {p:?}"),
            });
        }
        let target_pos = p.chars().next().unwrap();
        let (st, stpos) = cursor.expect_token("source/target")?;
        let source_target = parse_hex(st, stpos, "source/target")?;
        pointers.push(Pointer {
            symbol: symbol.to_string(),
            target_offset,
            target_pos,
            source_target,
        });
    }

    // Verb records carry frames next; everything before the bar is skipped.
    let mut gloss = String::new();
    loop {
        match cursor.next_token() {
            Some(("|", _)) => {
                gloss = cursor.rest().trim().to_string();
                break;
            }
            Some(_) if ss_type == 'v' => continue,
            Some((tok, tpos)) => {
                return Err(WordNetError::MalformedLine {
                    position: tpos,
                    message: format!("expected '|' before gloss, got {tok:?}"),
                });
            }
            None => break, // gloss is optional
        }
    }

    Ok(RawSynsetRecord {
        offset,
        pos: ss_type,
        words,
        pointers,
        gloss,
    })
}

fn noun_id(offset: u64) -> SynsetId {
    SynsetId::new(format!("n-{offset:08}"))
}

fn normalize_lemma(word: &str) -> String {
    // strip adjective syntax markers like "(a)" and map underscores to spaces
    let word = word
        .strip_suffix("(p)")
        .or_else(|| word.strip_suffix("(a)"))
        .or_else(|| word.strip_suffix("(ip)"))
        .unwrap_or(word);
    word.to_lowercase().replace('_', " ")
}

/// Load the noun taxonomy from WordNet `index.noun` / `data.noun` files.
pub fn load_wordnet(index_path: &Path, data_path: &Path) -> Result<Taxonomy, WordNetError> {
    let read = |p: &Path| {
        std::fs::read_to_string(p).map_err(|source| WordNetError::Io {
            path: p.display().to_string(),
            source,
        })
    };
    let data_text = read(data_path)?;

    let mut nodes: Vec<(SynsetId, Vec<String>, Option<String>)> = Vec::new();
    let mut edges: Vec<(SynsetId, SynsetId)> = Vec::new();
    let mut offsets: BTreeSet<u64> = BTreeSet::new();
    let mut pending_edges: Vec<(u64, u64)> = Vec::new();

    for line in data_text.lines() {
        if line.starts_with("  ") || line.trim().is_empty() {
            continue; // license header
        }
        let record = parse_data_line(line)?;
        if record.pos != 'n' {
            continue;
        }
        offsets.insert(record.offset);
        let lemmas: Vec<String> = record
            .words
            .iter()
            .map(|(w, _)| normalize_lemma(w))
            .collect();
        let gloss = if record.gloss.is_empty() {
            None
        } else {
            Some(record.gloss.clone())
        };
        nodes.push((noun_id(record.offset), lemmas, gloss));
        for ptr in &record.pointers {
            if (ptr.symbol == "@" || ptr.symbol == "@i") && ptr.target_pos == 'n' {
                pending_edges.push((record.offset, ptr.target_offset));
            }
        }
    }
    if nodes.is_empty() {
        return Err(WordNetError::EmptyDatabase);
    }

    for (child, parent) in pending_edges {
        if !offsets.contains(&parent) {
            return Err(WordNetError::DanglingEdge(format!("{parent:08}")));
        }
        edges.push((noun_id(child), noun_id(parent)));
    }

    // The index file is validated for shape; its lemmas are already carried
    // by the data records.
    let index_text = read(index_path)?;
    for (i, line) in index_text.lines().enumerate() {
        if line.starts_with("  ") || line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split_whitespace().collect();
        if fields.len() < 5 {
            return Err(WordNetError::ParseError {
                line: i + 1,
                message: "index line has too few fields".to_string(),
            });
        }
    }

    Ok(build_taxonomy(nodes, edges)?)
}

/// Load the fixture format: `N <id> <lemma>[,<lemma>…]` and
/// `E <child> <parent>` lines, `#` comments.
pub fn load_simple_taxonomy(path: &Path) -> Result<Taxonomy, WordNetError> {
    let text = std::fs::read_to_string(path).map_err(|source| WordNetError::Io {
        path: path.display().to_string(),
        source,
    })?;
    parse_simple_taxonomy(&text)
}

pub fn parse_simple_taxonomy(text: &str) -> Result<Taxonomy, WordNetError> {
    let mut nodes: Vec<(SynsetId, Vec<String>, Option<String>)> = Vec::new();
    let mut edges: Vec<(SynsetId, SynsetId)> = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let lineno = i + 1;
        let mut fields = line.split_whitespace();
        match fields.next() {
            Some("N") => {
                let id = fields.next().ok_or(WordNetError::ParseError {
                    line: lineno,
                    message: "N line missing id".to_string(),
                })?;
                let lemmas_field = fields.next().ok_or(WordNetError::ParseError {
                    line: lineno,
                    message: "N line missing lemmas".to_string(),
                })?;
                let lemmas: Vec<String> = lemmas_field
                    .split(',')
                    .map(|l| l.replace('_', " "))
                    .collect();
                nodes.push((SynsetId::new(id), lemmas, None));
            }
            Some("E") => {
                let child = fields.next().ok_or(WordNetError::ParseError {
                    line: lineno,
                    message: "E line missing child".to_string(),
                })?;
                let parent = fields.next().ok_or(WordNetError::ParseError {
                    line: lineno,
                    message: "E line missing parent".to_string(),
                })?;
                edges.push((SynsetId::new(child), SynsetId::new(parent)));
            }
            Some(other) => {
                return Err(WordNetError::ParseError {
                    line: lineno,
                    message: format!("unknown directive {other:?}"),
                });
            }
            None => unreachable!(),
        }
    }
    if nodes.is_empty() {
        return Err(WordNetError::EmptyDatabase);
    }
    Ok(build_taxonomy(nodes, edges)?)
}

/// Serialize a taxonomy back to the simple format.
pub fn serialize_simple_taxonomy<W: Write>(
    taxonomy: &Taxonomy,
    mut out: W,
) -> std::io::Result<()> {
    for synset in taxonomy.synsets() {
        let lemmas: Vec<String> = synset.lemmas.iter().map(|l| l.replace(' ', "_")).collect();
        writeln!(out, "N {} {}", synset.id, lemmas.join(","))?;
    }
    for synset in taxonomy.synsets() {
        for parent in &synset.parents {
            writeln!(out, "E {} {}", synset.id, parent)?;
        }
    }
    Ok(())
}
