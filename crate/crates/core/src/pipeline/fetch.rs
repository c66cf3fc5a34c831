//! Dataset download with a content cache keyed by URL.

use std::io::Read;
use std::path::{Path, PathBuf};

use sha2::{Digest, Sha256};
use thiserror::Error;

/// Environment variable overriding the cache directory.
pub const CACHE_ENV: &str = "SPECTRAL_CACHE_DIR";

#[derive(Debug, Error)]
pub enum FetchError {
    #[error("network error for {url}: {reason}")]
    NetworkError { url: String, reason: String },
    #[error("{0} returned an empty payload")]
    EmptyPayload(String),
    #[error("cache i/o: {0}")]
    Io(#[from] std::io::Error),
}

/// Source of remote bytes. Injected so everything but the default transport
/// runs offline.
pub trait Transport {
    fn get(&self, url: &str) -> Result<Vec<u8>, FetchError>;
}

/// HTTP(S) via `ureq`.
#[derive(Debug, Default, Clone, Copy)]
pub struct HttpTransport;

/// Response bodies above this size are rejected.
const MAX_BODY: u64 = 1 << 30;

impl Transport for HttpTransport {
    fn get(&self, url: &str) -> Result<Vec<u8>, FetchError> {
        let net = |reason: String| FetchError::NetworkError {
            url: url.to_string(),
            reason,
        };
        let resp = ureq::get(url).call().map_err(|e| net(e.to_string()))?;
        let mut body = Vec::new();
        resp.into_body()
            .into_reader()
            .take(MAX_BODY)
            .read_to_end(&mut body)
            .map_err(|e| net(e.to_string()))?;
        Ok(body)
    }
}

/// `$SPECTRAL_CACHE_DIR`, else `$XDG_CACHE_HOME/spectral`, else
/// `$HOME/.cache/spectral`, else `./.spectral-cache`.
pub fn default_cache_dir() -> PathBuf {
    if let Some(d) = std::env::var_os(CACHE_ENV) {
        return PathBuf::from(d);
    }
    if let Some(d) = std::env::var_os("XDG_CACHE_HOME") {
        return PathBuf::from(d).join("spectral");
    }
    if let Some(h) = std::env::var_os("HOME") {
        return PathBuf::from(h).join(".cache").join("spectral");
    }
    PathBuf::from(".spectral-cache")
}

/// Cache file for `url`: hex SHA-256 of the URL.
pub fn cache_path(url: &str, cache_dir: &Path) -> PathBuf {
    cache_dir.join(hex::encode(Sha256::digest(url.as_bytes())))
}

/// Returns the cached copy of `url`, downloading it first unless cached.
///
/// With `offline` set the transport is never used and a cache miss is a
/// `NetworkError`.
pub fn fetch_dataset<T: Transport + ?Sized>(
    url: &str,
    cache_dir: &Path,
    transport: &T,
    offline: bool,
) -> Result<PathBuf, FetchError> {
    let path = cache_path(url, cache_dir);
    if path.metadata().is_ok_and(|m| m.is_file() && m.len() > 0) {
        return Ok(path);
    }
    if offline {
        return Err(FetchError::NetworkError {
            url: url.to_string(),
            reason: "offline mode and no cached copy".into(),
        });
    }
    let body = transport.get(url)?;
    if body.is_empty() {
        return Err(FetchError::EmptyPayload(url.to_string()));
    }
    std::fs::create_dir_all(cache_dir)?;
    let tmp = path.with_extension("partial");
    std::fs::write(&tmp, &body)?;
    std::fs::rename(&tmp, &path)?;
    Ok(path)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::cell::Cell;

    struct Stub {
        body: Vec<u8>,
        calls: Cell<usize>,
    }

    impl Transport for Stub {
        fn get(&self, _url: &str) -> Result<Vec<u8>, FetchError> {
            self.calls.set(self.calls.get() + 1);
            Ok(self.body.clone())
        }
    }

    #[test]
    fn second_fetch_hits_cache() {
        let dir = tempfile::tempdir().unwrap();
        let stub = Stub {
            body: b"14.1\n21.0\n".to_vec(),
            calls: Cell::new(0),
        };
        let url = "https://example.org/zeros1";
        let a = fetch_dataset(url, dir.path(), &stub, false).unwrap();
        let b = fetch_dataset(url, dir.path(), &stub, false).unwrap();
        assert_eq!(a, b);
        assert_eq!(stub.calls.get(), 1);
        // Offline after caching still works.
        assert_eq!(fetch_dataset(url, dir.path(), &stub, true).unwrap(), a);
        assert_eq!(stub.calls.get(), 1);
    }

    #[test]
    fn offline_miss_and_empty_payload() {
        let dir = tempfile::tempdir().unwrap();
        let stub = Stub {
            body: Vec::new(),
            calls: Cell::new(0),
        };
        assert!(matches!(
            fetch_dataset("https://example.org/x", dir.path(), &stub, true),
            Err(FetchError::NetworkError { .. })
        ));
        assert_eq!(stub.calls.get(), 0);
        assert!(matches!(
            fetch_dataset("https://example.org/x", dir.path(), &stub, false),
            Err(FetchError::EmptyPayload(_))
        ));
    }
}
