//! Output directory plumbing: line-delimited JSON records and the manifest.

use std::fs::{self, OpenOptions};
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::Serialize;
use serde_json::{Map, Value};

use crate::CliError;

pub const RESULTS: &str = "results.jsonl";
pub const MANIFEST: &str = "manifest.json";

/// Writes the records of one command invocation into an output directory.
pub struct Sink {
    dir: PathBuf,
    command: &'static str,
    hash: String,
}

pub fn io_err(path: &Path, e: impl std::fmt::Display) -> CliError {
    CliError::Io(format!("{}: {e}", path.display()))
}

impl Sink {
    pub fn new(dir: &Path, command: &'static str, hash: String) -> Result<Self, CliError> {
        fs::create_dir_all(dir).map_err(|e| io_err(dir, e))?;
        Ok(Sink {
            dir: dir.to_path_buf(),
            command,
            hash,
        })
    }

    /// A sink that is only used to format records for standard output.
    pub fn detached(command: &'static str, hash: String) -> Self {
        Sink {
            dir: PathBuf::new(),
            command,
            hash,
        }
    }

    pub fn path(&self, name: &str) -> PathBuf {
        self.dir.join(name)
    }

    /// `body`'s fields prefixed by the command name and config hash.
    pub fn envelope<T: Serialize>(&self, body: &T) -> Value {
        let mut obj = Map::new();
        obj.insert("command".into(), self.command.into());
        obj.insert("config_hash".into(), self.hash.clone().into());
        match serde_json::to_value(body).expect("records serialize") {
            Value::Object(fields) => obj.extend(fields),
            other => {
                obj.insert("value".into(), other);
            }
        }
        Value::Object(obj)
    }

    /// Starts (or truncates) a line-delimited file.
    pub fn create(&self, name: &str) -> Result<(), CliError> {
        let path = self.path(name);
        fs::write(&path, "").map_err(|e| io_err(&path, e))
    }

    pub fn append<T: Serialize>(&self, name: &str, body: &T) -> Result<(), CliError> {
        let path = self.path(name);
        let mut f = OpenOptions::new()
            .create(true)
            .append(true)
            .open(&path)
            .map_err(|e| io_err(&path, e))?;
        let line = serde_json::to_string(&self.envelope(body)).expect("records serialize");
        writeln!(f, "{line}").map_err(|e| io_err(&path, e))
    }

    /// Appends the command's result record to `results.jsonl` and prints it.
    pub fn emit<T: Serialize>(&self, body: &T) -> Result<(), CliError> {
        self.append(RESULTS, body)?;
        println!("{}", serde_json::to_string(&self.envelope(body)).expect("records serialize"));
        Ok(())
    }

    /// Records this command's outputs under its name in `manifest.json`,
    /// keeping the entries of other commands.
    pub fn manifest<T: Serialize>(&self, entry: &T) -> Result<(), CliError> {
        let path = self.path(MANIFEST);
        let mut root = match fs::read_to_string(&path) {
            Ok(text) => match serde_json::from_str::<Value>(&text) {
                Ok(Value::Object(map)) => map,
                _ => return Err(io_err(&path, "existing manifest is not a JSON object")),
            },
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => Map::new(),
            Err(e) => return Err(io_err(&path, e)),
        };
        root.insert(self.command.into(), self.envelope(entry));
        let text = serde_json::to_string_pretty(&Value::Object(root)).expect("manifest serializes");
        fs::write(&path, text + "\n").map_err(|e| io_err(&path, e))
    }
}
