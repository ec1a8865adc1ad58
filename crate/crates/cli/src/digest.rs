use std::path::Path;

use serde::Serialize;
use sha2::{Digest, Sha256};

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

pub fn file_digest(path: &Path) -> std::io::Result<String> {
    Ok(sha256_hex(&std::fs::read(path)?))
}

/// Digest of the JSON form. Struct fields serialize in declaration order
/// and maps are ordered, so equal values give equal digests.
pub fn value_digest<T: Serialize>(value: &T) -> String {
    sha256_hex(&serde_json::to_vec(value).expect("config serializes"))
}

/// Key used to order `items` reproducibly under `seed`.
pub fn seeded_rank(seed: u64, id: &str) -> String {
    sha256_hex(format!("{seed}\u{0}{id}").as_bytes())
}
