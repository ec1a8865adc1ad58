use std::io::Write;
use std::path::{Path, PathBuf};
use std::sync::Mutex;

use super::{GenerationRecord, InferenceError};

/// One JSON file per request key. Reads run concurrently; writes are
/// serialized and atomic (temp file, then rename).
#[derive(Debug)]
pub struct ResponseCache {
    dir: PathBuf,
    write_lock: Mutex<()>,
}

impl ResponseCache {
    pub fn open(dir: impl Into<PathBuf>) -> Result<Self, InferenceError> {
        let dir = dir.into();
        std::fs::create_dir_all(&dir).map_err(|e| InferenceError::Cache(format!("{}: {e}", dir.display())))?;
        Ok(Self { dir, write_lock: Mutex::new(()) })
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    pub fn path_for(&self, key: &str) -> PathBuf {
        self.dir.join(format!("{key}.json"))
    }

    pub fn get(&self, key: &str) -> Result<Option<GenerationRecord>, InferenceError> {
        let path = self.path_for(key);
        let raw = match std::fs::read_to_string(&path) {
            Ok(raw) => raw,
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => return Ok(None),
            Err(e) => return Err(InferenceError::Cache(format!("{}: {e}", path.display()))),
        };
        match serde_json::from_str::<GenerationRecord>(&raw) {
            Ok(rec) if rec.request_key == key => Ok(Some(rec)),
            Ok(_) | Err(_) => {
                log::warn!("ignoring unreadable cache entry {}", path.display());
                Ok(None)
            }
        }
    }

    pub fn put(&self, record: &GenerationRecord) -> Result<(), InferenceError> {
        let path = self.path_for(&record.request_key);
        let err = |e: std::io::Error| InferenceError::Cache(format!("{}: {e}", path.display()));
        let mut stored = record.clone();
        stored.from_cache = false;
        let body = serde_json::to_string_pretty(&stored).expect("record serializes");
        let _guard = self.write_lock.lock().unwrap_or_else(|p| p.into_inner());
        let tmp = self.dir.join(format!(".{}.{}.tmp", record.request_key, std::process::id()));
        let mut f = std::fs::File::create(&tmp).map_err(err)?;
        f.write_all(body.as_bytes()).map_err(err)?;
        f.sync_all().map_err(err)?;
        std::fs::rename(&tmp, &path).map_err(err)
    }

    pub fn len(&self) -> usize {
        std::fs::read_dir(&self.dir)
            .map(|rd| {
                rd.filter_map(Result::ok)
                    .filter(|e| e.path().extension().is_some_and(|x| x == "json"))
                    .count()
            })
            .unwrap_or(0)
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}
