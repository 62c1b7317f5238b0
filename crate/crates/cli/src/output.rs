// SPDX-License-Identifier: Apache-2.0
//! Artifact writing. Every file is written to a temporary sibling and
//! renamed into place only after all artifacts of a run are ready, so a
//! failed run leaves no partial files behind.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Artifact {
    /// `None` means standard output.
    pub path: Option<PathBuf>,
    pub bytes: Vec<u8>,
}

impl Artifact {
    pub fn new(path: Option<PathBuf>, bytes: impl Into<Vec<u8>>) -> Self {
        Artifact { path, bytes: bytes.into() }
    }

    pub fn json(path: Option<PathBuf>, value: &serde_json::Value) -> Result<Self> {
        let mut s = serde_json::to_string_pretty(value)?;
        s.push('\n');
        Ok(Artifact::new(path, s))
    }
}

fn temp_path(path: &Path) -> PathBuf {
    let name = path.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_default();
    path.with_file_name(format!(".{name}.tmp-{}", std::process::id()))
}

/// Writes all file artifacts atomically, then prints the standard-output
/// ones.
pub fn commit(artifacts: &[Artifact]) -> Result<()> {
    let mut staged: Vec<(PathBuf, PathBuf)> = Vec::new();
    let stage = |staged: &mut Vec<(PathBuf, PathBuf)>| -> Result<()> {
        for a in artifacts {
            let Some(path) = &a.path else { continue };
            let tmp = temp_path(path);
            staged.push((tmp.clone(), path.clone()));
            let mut f = fs::File::create(&tmp).with_context(|| format!("cannot create {}", tmp.display()))?;
            f.write_all(&a.bytes)?;
            f.sync_all()?;
        }
        for (tmp, path) in staged.iter() {
            fs::rename(tmp, path).with_context(|| format!("cannot write {}", path.display()))?;
        }
        Ok(())
    };
    if let Err(e) = stage(&mut staged) {
        for (tmp, _) in &staged {
            let _ = fs::remove_file(tmp);
        }
        return Err(e);
    }
    let stdout = std::io::stdout();
    let mut lock = stdout.lock();
    for a in artifacts.iter().filter(|a| a.path.is_none()) {
        lock.write_all(&a.bytes)?;
    }
    lock.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn failed_commit_leaves_no_temporaries() {
        let dir = tempfile::tempdir().unwrap();
        let good = dir.path().join("a.json");
        let bad = dir.path().join("missing").join("b.json");
        let arts = [Artifact::new(Some(good.clone()), "1"), Artifact::new(Some(bad), "2")];
        assert!(commit(&arts).is_err());
        let left: Vec<_> = fs::read_dir(dir.path()).unwrap().map(|e| e.unwrap().file_name()).collect();
        assert!(left.is_empty(), "{left:?}");
    }

    #[test]
    fn commit_writes_every_file() {
        let dir = tempfile::tempdir().unwrap();
        let a = dir.path().join("a.csv");
        let b = dir.path().join("b.svg");
        commit(&[Artifact::new(Some(a.clone()), "x"), Artifact::new(Some(b.clone()), "y")]).unwrap();
        assert_eq!(fs::read_to_string(a).unwrap(), "x");
        assert_eq!(fs::read_to_string(b).unwrap(), "y");
    }
}
