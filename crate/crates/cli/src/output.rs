use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use crate::error::CliError;

/// Write to a temporary sibling then rename over the target.
pub fn write_atomic(path: &Path, contents: &str) -> Result<(), CliError> {
    if let Some(parent) = path.parent() {
        fs::create_dir_all(parent)?;
    }
    let name = path.file_name().and_then(|n| n.to_str()).unwrap_or("out");
    let tmp = path.with_file_name(format!(".{name}.tmp{}", std::process::id()));
    fs::write(&tmp, contents)?;
    fs::rename(&tmp, path)?;
    Ok(())
}

/// Columnar CSV with shortest round-trip float formatting.
pub struct Csv {
    text: String,
    width: usize,
}

impl Csv {
    pub fn new(header: &[&str]) -> Self {
        Self { text: format!("{}\n", header.join(",")), width: header.len() }
    }

    pub fn row(&mut self, values: &[f64]) {
        debug_assert_eq!(values.len(), self.width);
        let mut first = true;
        for v in values {
            if !first {
                self.text.push(',');
            }
            first = false;
            let _ = write!(self.text, "{v:e}");
        }
        self.text.push('\n');
    }

    pub fn text(&self) -> &str {
        &self.text
    }
}

/// key,value,unit table.
#[derive(Default)]
pub struct Report {
    rows: Vec<(String, String, String)>,
}

impl Report {
    pub fn num(&mut self, key: &str, value: f64, unit: &str) {
        self.rows.push((key.into(), format!("{value:e}"), unit.into()));
    }

    pub fn text(&mut self, key: &str, value: impl Into<String>) {
        self.rows.push((key.into(), value.into(), String::new()));
    }

    pub fn render(&self) -> String {
        let mut s = String::from("key,value,unit\n");
        for (k, v, u) in &self.rows {
            let v = if v.contains(',') || v.contains('"') { format!("\"{}\"", v.replace('"', "\"\"")) } else { v.clone() };
            let _ = writeln!(s, "{k},{v},{u}");
        }
        s
    }
}

pub struct Outputs {
    pub dir: PathBuf,
    pub written: Vec<String>,
}

impl Outputs {
    pub fn new(dir: PathBuf) -> Self {
        Self { dir, written: Vec::new() }
    }

    pub fn write(&mut self, name: &str, contents: &str) -> Result<(), CliError> {
        write_atomic(&self.dir.join(name), contents)?;
        self.written.push(name.to_string());
        Ok(())
    }

    /// Manifest embedding the config text so the run can be replayed from it.
    pub fn manifest(&mut self, command: &str, config_toml: &str, warnings: &[String]) -> Result<(), CliError> {
        let value = serde_json::json!({
            "tool": "spinbath",
            "version": env!("CARGO_PKG_VERSION"),
            "command": command,
            "outputs": self.written,
            "warnings": warnings,
            "config_toml": config_toml,
        });
        let text = serde_json::to_string_pretty(&value).map_err(|e| CliError::Io(e.to_string()))?;
        self.write(&format!("{command}_manifest.json"), &(text + "\n"))
    }
}
