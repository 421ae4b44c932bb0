//! Output files. CSV and text files start with `#` header lines carrying the
//! config digest; JSON records carry it as a field. Bodies depend only on the
//! config, so two runs of the same config give identical bodies.

use std::fs;
use std::path::{Path, PathBuf};

use serde_json::Value;

use crate::config::ExperimentConfig;
use crate::HypoError;

pub const CONFIG_FILE: &str = "config.txt";

pub struct OutputDir {
    dir: PathBuf,
    digest: String,
    written: Vec<PathBuf>,
}

impl OutputDir {
    /// Creates the directory and writes the canonical config into it.
    pub fn create(dir: &Path, cfg: &ExperimentConfig) -> Result<Self, HypoError> {
        fs::create_dir_all(dir)?;
        let mut out = OutputDir {
            dir: dir.to_path_buf(),
            digest: cfg.digest(),
            written: Vec::new(),
        };
        let body = cfg.canonical();
        out.write_text(CONFIG_FILE, &body)?;
        Ok(out)
    }

    pub fn digest(&self) -> &str {
        &self.digest
    }

    pub fn path(&self, name: &str) -> PathBuf {
        self.dir.join(name)
    }

    pub fn written(&self) -> &[PathBuf] {
        &self.written
    }

    fn header(&self) -> String {
        format!(
            "# hypo {}\n# config-digest: {}\n",
            env!("CARGO_PKG_VERSION"),
            self.digest
        )
    }

    pub fn write_text(&mut self, name: &str, body: &str) -> Result<PathBuf, HypoError> {
        let path = self.path(name);
        fs::write(&path, format!("{}{}", self.header(), body))?;
        self.written.push(path.clone());
        Ok(path)
    }

    pub fn write_csv(&mut self, name: &str, columns: &[&str], rows: &[Vec<String>]) -> Result<PathBuf, HypoError> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(columns)?;
        for r in rows {
            w.write_record(r)?;
        }
        let body = String::from_utf8(w.into_inner().map_err(|e| HypoError::Io(e.into_error()))?)
            .expect("csv output is utf-8");
        self.write_text(name, &body)
    }

    /// Pretty-printed JSON with `config_digest` merged into the top object.
    pub fn write_json(&mut self, name: &str, mut record: Value) -> Result<PathBuf, HypoError> {
        if let Value::Object(map) = &mut record {
            map.insert("config_digest".into(), Value::String(self.digest.clone()));
        }
        let path = self.path(name);
        let mut text = serde_json::to_string_pretty(&record).expect("json values serialize");
        text.push('\n');
        fs::write(&path, text)?;
        self.written.push(path.clone());
        Ok(path)
    }
}

/// File contents with the `#` header lines removed.
pub fn body(text: &str) -> String {
    text.lines()
        .filter(|l| !l.starts_with('#'))
        .map(|l| format!("{}\n", l))
        .collect()
}
