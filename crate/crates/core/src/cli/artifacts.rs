//! Shared plumbing for command artifacts: provenance metadata, config
//! loading, input discovery and output writing.

use std::fs;
use std::path::{Path, PathBuf};

use serde::de::DeserializeOwned;
use serde::Serialize;
use serde_json::Value;

use crate::error::{Error, Result};
use crate::instance::Instance;
use crate::tsplib;
use crate::VERSION;

pub const SEED_ENV: &str = "TSPFORGE_SEED";

/// Provenance stamped into every artifact. Output locations and the worker
/// count are deliberately left out so that replays elsewhere, or with a
/// different `--jobs`, produce identical bytes.
#[derive(Debug, Serialize)]
pub struct Meta<'a, C: Serialize> {
    pub tool: &'static str,
    pub version: &'static str,
    pub command: &'static str,
    pub master_seed: u64,
    pub config: &'a C,
}

impl<'a, C: Serialize> Meta<'a, C> {
    pub fn new(command: &'static str, master_seed: u64, config: &'a C) -> Self {
        Meta {
            tool: "tspforge",
            version: VERSION,
            command,
            master_seed,
            config,
        }
    }

    fn config_json(&self) -> Result<String> {
        Ok(serde_json::to_string(self.config)?)
    }

    /// `#` lines placed above a CSV header.
    pub fn csv_preamble(&self) -> Result<String> {
        Ok(format!(
            "# {} {} {}\n# master_seed={}\n# config={}\n",
            self.tool,
            self.version,
            self.command,
            self.master_seed,
            self.config_json()?
        ))
    }

    /// Single-line text for a TSPLIB `COMMENT`.
    pub fn tsplib_comment(&self, extra: &str) -> Result<String> {
        Ok(format!(
            "{} {} {} master_seed={}{}{} config={}",
            self.tool,
            self.version,
            self.command,
            self.master_seed,
            if extra.is_empty() { "" } else { " " },
            extra,
            self.config_json()?
        ))
    }

    /// Pretty JSON document `{"meta": ..., <payload fields>}`.
    pub fn json_document(&self, payload: Value) -> Result<String> {
        let mut doc = serde_json::Map::new();
        doc.insert("meta".into(), serde_json::to_value(self)?);
        match payload {
            Value::Object(fields) => doc.extend(fields),
            other => {
                doc.insert("data".into(), other);
            }
        }
        Ok(serde_json::to_string_pretty(&Value::Object(doc))? + "\n")
    }
}

/// Master seed precedence: command-line flag, config file, environment,
/// then 0.
pub fn resolve_seed(flag: Option<u64>, file: Option<u64>) -> Result<u64> {
    if let Some(s) = flag.or(file) {
        return Ok(s);
    }
    match std::env::var(SEED_ENV) {
        Ok(v) => v.trim().parse().map_err(|_| {
            Error::Config(format!("{SEED_ENV} must be an unsigned integer, got `{v}`"))
        }),
        Err(_) => Ok(0),
    }
}

/// Reads a strict JSON config, or the defaults when no file is given. Also
/// returns the raw document so callers can inspect which keys were set.
pub fn load_config<T: DeserializeOwned + Default>(path: Option<&Path>) -> Result<(T, Value)> {
    let Some(path) = path else {
        return Ok((T::default(), Value::Null));
    };
    if !path.exists() {
        return Err(Error::MissingFiles(vec![path.to_path_buf()]));
    }
    let text = fs::read_to_string(path)?;
    let raw: Value = serde_json::from_str(&text)
        .map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
    let config = serde_json::from_value(raw.clone())
        .map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
    Ok((config, raw))
}

/// Expands inputs into files: directories contribute their entries with the
/// given extension in name order. Every missing input is reported at once.
pub fn collect_files(inputs: &[PathBuf], extensions: &[&str]) -> Result<Vec<PathBuf>> {
    let mut missing = Vec::new();
    let mut files = Vec::new();
    for input in inputs {
        if input.is_dir() {
            files.extend(walk(input, extensions)?);
        } else if input.is_file() {
            files.push(input.clone());
        } else {
            missing.push(input.clone());
        }
    }
    if !missing.is_empty() {
        return Err(Error::MissingFiles(missing));
    }
    Ok(files)
}

/// Files under `dir` (recursively) with one of `extensions`, sorted.
pub fn walk(dir: &Path, extensions: &[&str]) -> Result<Vec<PathBuf>> {
    let mut out = Vec::new();
    let mut stack = vec![dir.to_path_buf()];
    while let Some(d) = stack.pop() {
        for entry in fs::read_dir(&d)? {
            let path = entry?.path();
            if path.is_dir() {
                stack.push(path);
            } else if path
                .extension()
                .and_then(|e| e.to_str())
                .is_some_and(|e| extensions.contains(&e))
            {
                out.push(path);
            }
        }
    }
    out.sort();
    Ok(out)
}

pub fn read_instances(inputs: &[PathBuf]) -> Result<Vec<Instance>> {
    let files = collect_files(inputs, &["tsp"])?;
    if files.is_empty() {
        return Err(Error::usage("no .tsp instance files among the inputs"));
    }
    files
        .iter()
        .map(|p| {
            tsplib::read_file(p).map_err(|e| match e {
                Error::Parse { line, message } => Error::Parse {
                    line,
                    message: format!("{}: {message}", p.display()),
                },
                other => other,
            })
        })
        .collect()
}

pub fn write(path: &Path, contents: &str) -> Result<()> {
    if let Some(parent) = path.parent() {
        if !parent.as_os_str().is_empty() {
            fs::create_dir_all(parent)?;
        }
    }
    fs::write(path, contents)?;
    Ok(())
}

pub fn csv_writer() -> csv::Writer<Vec<u8>> {
    crate::analysis::csv_writer()
}

pub fn finish_csv(w: csv::Writer<Vec<u8>>) -> Result<String> {
    crate::analysis::finish_csv(w)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flag_beats_file_beats_default() {
        assert_eq!(resolve_seed(Some(3), Some(4)).unwrap(), 3);
        assert_eq!(resolve_seed(None, Some(4)).unwrap(), 4);
    }

    #[test]
    fn preamble_is_comment_lines() {
        let cfg = serde_json::json!({"a": 1});
        let p = Meta::new("solve", 9, &cfg).csv_preamble().unwrap();
        assert!(p.lines().all(|l| l.starts_with('#')));
        assert!(p.contains("master_seed=9"));
        assert!(p.contains(r#"config={"a":1}"#));
    }

    #[test]
    fn missing_inputs_are_listed_together() {
        let err = collect_files(&["/nope/a".into(), "/nope/b".into()], &["tsp"]).unwrap_err();
        match err {
            Error::MissingFiles(v) => assert_eq!(v.len(), 2),
            e => panic!("unexpected {e}"),
        }
    }
}
