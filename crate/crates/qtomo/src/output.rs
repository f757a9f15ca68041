//! Staged outputs: nothing touches the output directory until every artifact is ready.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use tempfile::NamedTempFile;

use crate::error::{CliError, Result};

#[derive(Debug, Default)]
pub struct Staged {
    files: Vec<(String, Vec<u8>)>,
}

impl Staged {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, name: impl Into<String>, bytes: Vec<u8>) {
        self.files.push((name.into(), bytes));
    }

    pub fn names(&self) -> Vec<String> {
        self.files.iter().map(|(n, _)| n.clone()).collect()
    }

    /// Writes every file to a temporary sibling first, then renames them into place.
    pub fn commit(self, dir: &Path) -> Result<Vec<PathBuf>> {
        fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
        let mut temps = Vec::with_capacity(self.files.len());
        for (name, bytes) in &self.files {
            let mut tmp = NamedTempFile::new_in(dir).map_err(|e| CliError::io(dir, e))?;
            tmp.write_all(bytes).and_then(|_| tmp.as_file().sync_all()).map_err(|e| CliError::io(tmp.path(), e))?;
            temps.push((tmp, dir.join(name)));
        }
        let mut written = Vec::with_capacity(temps.len());
        for (tmp, dest) in temps {
            tmp.persist(&dest).map_err(|e| CliError::io(&dest, e.error))?;
            written.push(dest);
        }
        Ok(written)
    }
}
