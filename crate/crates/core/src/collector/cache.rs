use std::collections::BTreeMap;
use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::sync::{Mutex, MutexGuard};

use chrono::{DateTime, Utc};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use url::Url;

const LOCK_STRIPES: usize = 64;

/// Sidecar stored next to each cached body.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CacheEntryMeta {
    pub url: String,
    pub fetched_at: DateTime<Utc>,
    pub status: u16,
    pub headers: BTreeMap<String, String>,
}

/// Pages keyed by SHA-256 of their canonical URL, laid out as
/// `<dir>/<2-hex-prefix>/<sha256>.html` with a `<sha256>.meta.json` sidecar.
#[derive(Debug)]
pub struct PageCache {
    dir: PathBuf,
    locks: Vec<Mutex<()>>,
}

/// Canonical form used for keying: fragment dropped.
pub fn canonical_url(url: &Url) -> String {
    let mut u = url.clone();
    u.set_fragment(None);
    u.to_string()
}

impl PageCache {
    pub fn new(dir: impl Into<PathBuf>) -> io::Result<Self> {
        let dir = dir.into();
        fs::create_dir_all(&dir)?;
        Ok(PageCache { dir, locks: (0..LOCK_STRIPES).map(|_| Mutex::new(())).collect() })
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    pub fn key(url: &Url) -> String {
        hex::encode(Sha256::digest(canonical_url(url).as_bytes()))
    }

    fn paths(&self, key: &str) -> (PathBuf, PathBuf) {
        let shard = self.dir.join(&key[..2]);
        (shard.join(format!("{key}.html")), shard.join(format!("{key}.meta.json")))
    }

    fn lock(&self, key: &str) -> MutexGuard<'_, ()> {
        let stripe = usize::from_str_radix(&key[..2], 16).unwrap() % LOCK_STRIPES;
        self.locks[stripe].lock().unwrap_or_else(|e| e.into_inner())
    }

    pub fn get(&self, url: &Url) -> io::Result<Option<(String, CacheEntryMeta)>> {
        let key = Self::key(url);
        let _guard = self.lock(&key);
        let (body_path, meta_path) = self.paths(&key);
        if !body_path.exists() || !meta_path.exists() {
            return Ok(None);
        }
        let body = fs::read_to_string(&body_path)?;
        let meta: CacheEntryMeta = serde_json::from_str(&fs::read_to_string(&meta_path)?)
            .map_err(|e| io::Error::new(io::ErrorKind::InvalidData, format!("{}: {e}", meta_path.display())))?;
        Ok(Some((body, meta)))
    }

    /// Stores a page. An existing entry is left untouched unless `overwrite`.
    pub fn put(&self, url: &Url, body: &str, meta: &CacheEntryMeta, overwrite: bool) -> io::Result<()> {
        let key = Self::key(url);
        let _guard = self.lock(&key);
        let (body_path, meta_path) = self.paths(&key);
        if !overwrite && body_path.exists() && meta_path.exists() {
            return Ok(());
        }
        let shard = body_path.parent().unwrap();
        fs::create_dir_all(shard)?;
        atomic_write(shard, &body_path, body.as_bytes())?;
        let meta_json = serde_json::to_vec_pretty(meta).map_err(io::Error::other)?;
        atomic_write(shard, &meta_path, &meta_json)
    }
}

fn atomic_write(dir: &Path, dest: &Path, bytes: &[u8]) -> io::Result<()> {
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(bytes)?;
    tmp.persist(dest).map_err(|e| e.error)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn meta(url: &str) -> CacheEntryMeta {
        CacheEntryMeta { url: url.into(), fetched_at: Utc::now(), status: 200, headers: BTreeMap::new() }
    }

    #[test]
    fn layout_and_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let cache = PageCache::new(dir.path()).unwrap();
        let url = Url::parse("https://example.org/wiki/A#frag").unwrap();
        assert!(cache.get(&url).unwrap().is_none());
        cache.put(&url, "<p>hi</p>", &meta(url.as_str()), false).unwrap();
        let key = PageCache::key(&url);
        assert_eq!(key.len(), 64);
        assert!(dir.path().join(&key[..2]).join(format!("{key}.html")).exists());
        assert!(dir.path().join(&key[..2]).join(format!("{key}.meta.json")).exists());
        // fragment is not part of the key
        let plain = Url::parse("https://example.org/wiki/A").unwrap();
        assert_eq!(cache.get(&plain).unwrap().unwrap().0, "<p>hi</p>");
    }

    #[test]
    fn no_overwrite_without_refresh() {
        let dir = tempfile::tempdir().unwrap();
        let cache = PageCache::new(dir.path()).unwrap();
        let url = Url::parse("https://example.org/x").unwrap();
        cache.put(&url, "first", &meta("x"), false).unwrap();
        cache.put(&url, "second", &meta("x"), false).unwrap();
        assert_eq!(cache.get(&url).unwrap().unwrap().0, "first");
        cache.put(&url, "third", &meta("x"), true).unwrap();
        assert_eq!(cache.get(&url).unwrap().unwrap().0, "third");
    }

    #[test]
    fn known_key() {
        // sha256("https://example.org/")
        let url = Url::parse("https://example.org").unwrap();
        assert_eq!(PageCache::key(&url), hex::encode(Sha256::digest(b"https://example.org/")));
    }
}
