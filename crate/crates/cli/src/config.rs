//! `key = value` configuration files, turned into command-line flags that
//! are placed before the user's own flags so the latter take precedence.

use std::ffi::OsString;
use std::path::Path;

#[derive(Debug, thiserror::Error, PartialEq)]
pub enum ConfigError {
    #[error("{path}:{line}: expected `key = value`, found {text:?}")]
    Syntax { path: String, line: usize, text: String },
    #[error("cannot read config {path}: {message}")]
    Io { path: String, message: String },
}

/// Parses the file body. `#` starts a comment line; values may be quoted;
/// `true`/`false` toggle flags without values.
pub fn parse(path: &str, text: &str) -> Result<Vec<OsString>, ConfigError> {
    let mut args = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            return Err(ConfigError::Syntax {
                path: path.to_string(),
                line: idx + 1,
                text: line.to_string(),
            });
        };
        let key = key.trim().replace('_', "-");
        let value = value.trim().trim_matches('"');
        if key.is_empty() {
            return Err(ConfigError::Syntax {
                path: path.to_string(),
                line: idx + 1,
                text: line.to_string(),
            });
        }
        match value {
            "true" => args.push(format!("--{key}").into()),
            "false" => {}
            _ => {
                args.push(format!("--{key}").into());
                args.push(value.into());
            }
        }
    }
    Ok(args)
}

pub fn load(path: &Path) -> Result<Vec<OsString>, ConfigError> {
    let shown = path.display().to_string();
    let text = std::fs::read_to_string(path).map_err(|e| ConfigError::Io {
        path: shown.clone(),
        message: e.to_string(),
    })?;
    parse(&shown, &text)
}

/// Removes `--config <path>` (or `--config=<path>`) from the raw arguments
/// and splices the file's flags in right after the subcommand name.
pub fn expand(args: Vec<OsString>) -> Result<Vec<OsString>, ConfigError> {
    let mut rest = Vec::with_capacity(args.len());
    let mut config = None;
    let mut iter = args.into_iter();
    while let Some(arg) = iter.next() {
        let text = arg.to_string_lossy();
        if text == "--config" {
            config = iter.next();
        } else if let Some(path) = text.strip_prefix("--config=") {
            config = Some(path.into());
        } else {
            rest.push(arg);
        }
    }
    let Some(path) = config else {
        return Ok(rest);
    };
    let extra = load(Path::new(&path))?;
    // The subcommand is the first argument after the program name that is
    // not a flag.
    let pos = rest
        .iter()
        .skip(1)
        .position(|a| !a.to_string_lossy().starts_with('-'))
        .map(|i| i + 2)
        .unwrap_or(rest.len());
    let mut out = rest[..pos].to_vec();
    out.extend(extra);
    out.extend_from_slice(&rest[pos..]);
    Ok(out)
}
