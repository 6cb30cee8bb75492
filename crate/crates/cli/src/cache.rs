use std::fs;
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

use anyhow::Context;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

/// Bumped whenever a cached payload changes shape or meaning.
pub const SCHEMA: &str = "heegner-cache-v1";

#[derive(Serialize, Deserialize)]
struct Entry<T> {
    schema: String,
    kind: String,
    key: String,
    value: T,
}

#[derive(Debug, Default, Clone, Copy, PartialEq, Eq)]
pub struct CacheStats {
    pub hits: usize,
    pub misses: usize,
    /// Entries that existed but were unreadable or stale.
    pub rejected: usize,
}

/// Content-addressed JSON store. Readers run in parallel, writes go through one lock.
pub struct Cache {
    dir: Option<PathBuf>,
    schema: String,
    write_lock: Mutex<()>,
    hits: AtomicUsize,
    misses: AtomicUsize,
    rejected: AtomicUsize,
}

impl Cache {
    pub fn disabled() -> Self {
        Cache::build(None, SCHEMA)
    }

    pub fn open(dir: &Path) -> anyhow::Result<Self> {
        Cache::with_schema(dir, SCHEMA)
    }

    pub fn with_schema(dir: &Path, schema: &str) -> anyhow::Result<Self> {
        fs::create_dir_all(dir).with_context(|| format!("creating cache directory {}", dir.display()))?;
        Ok(Cache::build(Some(dir.to_path_buf()), schema))
    }

    fn build(dir: Option<PathBuf>, schema: &str) -> Self {
        Cache {
            dir,
            schema: schema.to_string(),
            write_lock: Mutex::new(()),
            hits: AtomicUsize::new(0),
            misses: AtomicUsize::new(0),
            rejected: AtomicUsize::new(0),
        }
    }

    pub fn stats(&self) -> CacheStats {
        CacheStats {
            hits: self.hits.load(Ordering::Relaxed),
            misses: self.misses.load(Ordering::Relaxed),
            rejected: self.rejected.load(Ordering::Relaxed),
        }
    }

    /// File holding `(kind, key)`; the schema tag is part of the address.
    pub fn path(&self, kind: &str, key: &str) -> Option<PathBuf> {
        let dir = self.dir.as_ref()?;
        let mut h = Sha256::new();
        for part in [self.schema.as_str(), kind, key] {
            h.update(part.as_bytes());
            h.update([0u8]);
        }
        let digest: String = h.finalize().iter().map(|b| format!("{b:02x}")).collect();
        Some(dir.join(kind).join(format!("{digest}.json")))
    }

    /// Cached value for `(kind, key)`, or `producer()` stored for next time.
    pub fn get_or_compute<T, F>(&self, kind: &str, key: &str, producer: F) -> anyhow::Result<T>
    where
        T: Serialize + DeserializeOwned,
        F: FnOnce() -> anyhow::Result<T>,
    {
        let Some(path) = self.path(kind, key) else {
            return producer();
        };
        if path.exists() {
            match self.read(&path, kind, key) {
                Ok(v) => {
                    self.hits.fetch_add(1, Ordering::Relaxed);
                    return Ok(v);
                }
                Err(why) => {
                    self.rejected.fetch_add(1, Ordering::Relaxed);
                    eprintln!("warning: cache entry {} rejected ({why}); recomputing", path.display());
                }
            }
        }
        self.misses.fetch_add(1, Ordering::Relaxed);
        let value = producer()?;
        self.write(&path, kind, key, &value)?;
        Ok(value)
    }

    fn read<T: DeserializeOwned>(&self, path: &Path, kind: &str, key: &str) -> Result<T, String> {
        let text = fs::read_to_string(path).map_err(|e| e.to_string())?;
        let entry: Entry<T> = serde_json::from_str(&text).map_err(|e| format!("corrupt: {e}"))?;
        if entry.schema != self.schema {
            return Err(format!("schema {} != {}", entry.schema, self.schema));
        }
        if entry.kind != kind || entry.key != key {
            return Err(format!("address collision with {}/{}", entry.kind, entry.key));
        }
        Ok(entry.value)
    }

    fn write<T: Serialize>(&self, path: &Path, kind: &str, key: &str, value: &T) -> anyhow::Result<()> {
        let entry = Entry { schema: self.schema.clone(), kind: kind.to_string(), key: key.to_string(), value };
        let text = serde_json::to_string(&entry)?;
        let _guard = self.write_lock.lock().unwrap_or_else(|e| e.into_inner());
        let dir = path.parent().expect("cache paths have a parent");
        fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
        let tmp = path.with_extension("tmp");
        fs::write(&tmp, text).with_context(|| format!("writing {}", tmp.display()))?;
        fs::rename(&tmp, path).with_context(|| format!("renaming into {}", path.display()))?;
        Ok(())
    }
}
