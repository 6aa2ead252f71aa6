//! Input loading, output writing, error reporting and run manifests.

use std::fs;
use std::path::{Path, PathBuf};

use serde::de::DeserializeOwned;
use serde::Serialize;

/// Failure with its process exit code.
#[derive(Debug)]
pub enum CliError {
    /// Malformed or invalid input: exit 2.
    Input { kind: &'static str, message: String },
    /// File system failure: exit 3.
    Io { message: String },
}

impl CliError {
    pub fn input(kind: &'static str, message: impl Into<String>) -> Self {
        CliError::Input {
            kind,
            message: message.into(),
        }
    }

    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Input { .. } => 2,
            CliError::Io { .. } => 3,
        }
    }

    pub fn to_json(&self) -> String {
        let (kind, message) = match self {
            CliError::Input { kind, message } => (*kind, message.as_str()),
            CliError::Io { message } => ("io", message.as_str()),
        };
        serde_json::json!({ "error": { "kind": kind, "message": message } }).to_string()
    }
}

impl From<pufcal::Error> for CliError {
    fn from(e: pufcal::Error) -> Self {
        use pufcal::Error as E;
        let kind = match &e {
            E::Io(_) => {
                return CliError::Io {
                    message: e.to_string(),
                }
            }
            E::InvalidDistribution(_) => "invalid_distribution",
            E::InvalidConfig(_) => "invalid_config",
            E::UnknownUser(_) => "unknown_user",
            E::InvalidEpsilon(_) => "invalid_epsilon",
            E::OutOfSupport { .. } => "out_of_support",
            E::MismatchedScale(..) => "mismatched_scale",
            E::NoConvergence { .. } => "no_convergence",
            E::Csv { .. } => "csv",
            E::MissingColumn(_) => "missing_column",
            E::EmptyMatch => "empty_match",
            E::UnknownCategory { .. } => "unknown_category",
            E::Json(_) => "json",
            _ => "invalid_parameter",
        };
        CliError::input(kind, e.to_string())
    }
}

pub type CliResult<T> = Result<T, CliError>;

fn read(path: &Path) -> CliResult<String> {
    fs::read_to_string(path).map_err(|e| CliError::Io {
        message: format!("{}: {e}", path.display()),
    })
}

/// Parses `arg` as inline JSON when it starts with `{` or `[`, otherwise
/// reads it as a file path.
pub fn load_json<T: DeserializeOwned>(arg: &str, what: &str) -> CliResult<T> {
    let trimmed = arg.trim_start();
    let text = if trimmed.starts_with('{') || trimmed.starts_with('[') {
        arg.to_string()
    } else {
        read(Path::new(arg))?
    };
    serde_json::from_str(&text).map_err(|e| CliError::input("json", format!("{what}: {e}")))
}

/// Where the primary output goes.
pub struct Sink {
    pub out: Option<PathBuf>,
}

impl Sink {
    pub fn emit(&self, body: &str) -> CliResult<()> {
        match &self.out {
            Some(path) => fs::write(path, body).map_err(|e| CliError::Io {
                message: format!("{}: {e}", path.display()),
            }),
            None => {
                print!("{body}");
                Ok(())
            }
        }
    }

    pub fn emit_json<T: Serialize>(&self, value: &T) -> CliResult<()> {
        let mut body = serde_json::to_string_pretty(value).expect("serializable output");
        body.push('\n');
        self.emit(&body)
    }

    /// Writes `<out>.manifest.json` next to a file output.
    pub fn manifest(&self, manifest: &RunManifest) -> CliResult<()> {
        let Some(out) = &self.out else { return Ok(()) };
        let mut name = out.as_os_str().to_owned();
        name.push(".manifest.json");
        let path = PathBuf::from(name);
        let mut body = serde_json::to_string_pretty(manifest).expect("serializable manifest");
        body.push('\n');
        fs::write(&path, body).map_err(|e| CliError::Io {
            message: format!("{}: {e}", path.display()),
        })
    }
}

/// Everything needed to rerun a command. No timestamps, so identical runs
/// give identical manifests.
#[derive(Debug, Serialize)]
pub struct RunManifest {
    pub tool: &'static str,
    pub version: &'static str,
    pub subcommand: &'static str,
    pub argv: Vec<String>,
    pub seed: u64,
    pub tolerance: f64,
    pub inputs: serde_json::Value,
}

/// Formats a float the way it reads back.
pub fn num(x: f64) -> String {
    format!("{x:?}")
}
