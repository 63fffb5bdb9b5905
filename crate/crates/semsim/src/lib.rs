//! Semantic similarity toolkit.
//!
//! Three measures over the same query surface: Wu-Palmer path similarity on a
//! hypernym taxonomy, Jiang-Conrath similarity from corpus information
//! content, and latent semantic analysis over a truncated SVD of a
//! term-document matrix. An evaluation pipeline scores concept-set alignments
//! against expert references with a threshold sweep and
//! recall/precision/F-measure.

pub mod checksum;
pub mod config;
pub mod evaluation;
pub mod infocontent;
pub mod lsa;
pub mod matrix;
pub mod svd;
pub mod taxonomy;
pub mod wordnet;
