use std::collections::HashMap;
use std::path::{Path, PathBuf};
use std::sync::{Arc, Mutex};

use blocktrace::{Error, Repository};

fn is_remote(s: &str) -> bool {
    s.contains("://") || s.starts_with("git@")
}

/// Directory name for a clone of `url`: its last path segment plus a hash
/// so that equally named repositories do not collide.
fn clone_dir(url: &str) -> String {
    let tail = url
        .trim_end_matches('/')
        .rsplit(['/', ':'])
        .next()
        .unwrap_or("repo")
        .trim_end_matches(".git");
    let safe: String = tail
        .chars()
        .map(|c| if c.is_ascii_alphanumeric() || c == '-' || c == '_' { c } else { '_' })
        .collect();
    let hash = blocktrace::srcmodel::content_hash(url);
    format!("{safe}-{:08x}", hash as u32)
}

/// Opened repositories shared by all requests, keyed by checkout path.
/// Remote URLs are cloned into the workspace directory on first use.
pub struct RepoPool {
    workspace: PathBuf,
    open: Mutex<HashMap<PathBuf, Arc<Repository>>>,
    cloning: Mutex<()>,
}

impl RepoPool {
    pub fn new(workspace: impl Into<PathBuf>) -> Self {
        RepoPool {
            workspace: workspace.into(),
            open: Mutex::new(HashMap::new()),
            cloning: Mutex::new(()),
        }
    }

    pub fn workspace(&self) -> &Path {
        &self.workspace
    }

    /// `spec` is a local path or a remote URL.
    pub fn get(&self, spec: &str) -> Result<Arc<Repository>, Error> {
        if is_remote(spec) {
            self.get_remote(spec)
        } else {
            self.get_local(Path::new(spec))
        }
    }

    pub fn get_local(&self, path: &Path) -> Result<Arc<Repository>, Error> {
        let key = path
            .canonicalize()
            .map_err(|_| Error::NotARepository(path.to_path_buf()))?;
        if let Some(r) = self.open.lock().expect("pool lock").get(&key) {
            return Ok(r.clone());
        }
        let repo = Arc::new(Repository::open(&key)?);
        self.open
            .lock()
            .expect("pool lock")
            .entry(key)
            .or_insert(repo.clone());
        Ok(repo)
    }

    pub fn get_remote(&self, url: &str) -> Result<Arc<Repository>, Error> {
        let dest = self.workspace.join(clone_dir(url));
        {
            // one clone at a time; a second request for the same URL waits
            // and then finds the checkout
            let _guard = self.cloning.lock().expect("clone lock");
            std::fs::create_dir_all(&self.workspace)?;
            if !dest.exists() {
                tracing::info!(%url, dest = %dest.display(), "cloning");
                Repository::clone_if_absent(url, &dest).map_err(|e| match e {
                    Error::Git { stderr, .. } => {
                        tracing::warn!(%url, %stderr, "clone failed");
                        Error::NotARepository(PathBuf::from(url))
                    }
                    other => other,
                })?;
            }
        }
        self.get_local(&dest)
    }
}
