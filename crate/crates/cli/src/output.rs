use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use serde::Serialize;
use tempfile::NamedTempFile;

/// Output directory whose files are replaced atomically.
pub struct OutDir {
    dir: PathBuf,
    written: Vec<String>,
}

impl OutDir {
    pub fn create(dir: &Path) -> Result<Self> {
        std::fs::create_dir_all(dir).with_context(|| format!("creating output directory {}", dir.display()))?;
        Ok(Self { dir: dir.to_path_buf(), written: Vec::new() })
    }

    pub fn write(&mut self, name: &str, contents: &str) -> Result<()> {
        let path = self.dir.join(name);
        let mut tmp = NamedTempFile::new_in(&self.dir).with_context(|| format!("writing {}", path.display()))?;
        tmp.write_all(contents.as_bytes()).with_context(|| format!("writing {}", path.display()))?;
        tmp.persist(&path).with_context(|| format!("replacing {}", path.display()))?;
        log::debug!("wrote {}", path.display());
        self.written.push(name.to_string());
        Ok(())
    }

    pub fn write_json<T: Serialize>(&mut self, name: &str, value: &T) -> Result<()> {
        let mut text = serde_json::to_string_pretty(value)?;
        text.push('\n');
        self.write(name, &text)
    }

    /// Names of the files written so far, in order.
    pub fn written(&self) -> Vec<String> {
        self.written.clone()
    }
}
