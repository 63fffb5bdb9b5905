//! Short content checksums recorded in report metadata and persisted headers.

use sha2::{Digest, Sha256};
use std::io;
use std::path::Path;

/// Hex-encoded SHA-256 prefix (16 chars) of a byte slice.
pub fn of_bytes(bytes: &[u8]) -> String {
    let digest = Sha256::digest(bytes);
    digest.iter().take(8).map(|b| format!("{b:02x}")).collect()
}

/// Checksum of a file's contents.
pub fn of_file(path: &Path) -> io::Result<String> {
    Ok(of_bytes(&std::fs::read(path)?))
}
