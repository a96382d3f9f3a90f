//! `--config` files: flat `key = value` TOML, optionally with one table per
//! subcommand. Keys are flag names without the leading dashes; values are
//! injected ahead of the command-line flags, which therefore take precedence.

use std::ffi::OsString;

use clap::CommandFactory;
use qdesign::{Error, Result};

use crate::Cli;

fn value_to_arg(key: &str, value: &toml::Value) -> Result<Option<String>> {
    Ok(Some(match value {
        toml::Value::String(s) => s.clone(),
        toml::Value::Integer(i) => i.to_string(),
        toml::Value::Float(f) => f.to_string(),
        toml::Value::Boolean(true) => return Ok(None),
        toml::Value::Array(items) => items
            .iter()
            .map(|v| match v {
                toml::Value::String(s) => Ok(s.clone()),
                toml::Value::Integer(i) => Ok(i.to_string()),
                toml::Value::Float(f) => Ok(f.to_string()),
                _ => Err(Error::Parse(format!("config key '{key}': unsupported list item"))),
            })
            .collect::<Result<Vec<_>>>()?
            .join(","),
        _ => return Err(Error::Parse(format!("config key '{key}': unsupported value"))),
    }))
}

// Index of the subcommand in `args`, skipping the program name and the
// global `--config <path>` option.
fn subcommand_index(args: &[OsString]) -> Option<usize> {
    let mut i = 1;
    while i < args.len() {
        let a = args[i].to_string_lossy();
        if a == "--config" {
            i += 2;
        } else if a.starts_with("--config=") || a.starts_with('-') {
            i += 1;
        } else {
            return Some(i);
        }
    }
    None
}

fn config_path(args: &[OsString]) -> Option<String> {
    let mut it = args.iter().skip(1).map(|a| a.to_string_lossy().into_owned());
    while let Some(a) = it.next() {
        if a == "--config" {
            return it.next();
        }
        if let Some(p) = a.strip_prefix("--config=") {
            return Some(p.to_string());
        }
    }
    None
}

/// Rewrites `args` with config-file values inserted right after the
/// subcommand name. Without `--config` the arguments are returned unchanged.
pub fn apply_config(args: Vec<OsString>) -> Result<Vec<OsString>> {
    let Some(path) = config_path(&args) else { return Ok(args) };
    let Some(idx) = subcommand_index(&args) else { return Ok(args) };
    let name = args[idx].to_string_lossy().into_owned();
    let cmd = Cli::command();
    let Some(sub) = cmd.find_subcommand(&name) else { return Ok(args) };
    let known: Vec<String> = sub
        .get_arguments()
        .filter_map(|a| a.get_long().map(str::to_string))
        .collect();

    let text = std::fs::read_to_string(&path)
        .map_err(|e| Error::Parse(format!("cannot read config {path}: {e}")))?;
    let table: toml::Table = text
        .parse()
        .map_err(|e| Error::Parse(format!("bad config {path}: {e}")))?;

    let mut entries: Vec<(String, toml::Value)> = Vec::new();
    for (key, value) in &table {
        match value {
            toml::Value::Table(_) => {}
            _ => entries.push((key.replace('_', "-"), value.clone())),
        }
    }
    if let Some(toml::Value::Table(section)) = table.get(&name) {
        for (key, value) in section {
            let key = key.replace('_', "-");
            if !known.contains(&key) {
                return Err(Error::Parse(format!("config [{name}]: unknown key '{key}'")));
            }
            entries.retain(|(k, _)| *k != key);
            entries.push((key, value.clone()));
        }
    }

    let mut injected: Vec<OsString> = Vec::new();
    for (key, value) in entries {
        if !known.contains(&key) || value == toml::Value::Boolean(false) {
            continue;
        }
        injected.push(format!("--{key}").into());
        if let Some(v) = value_to_arg(&key, &value)? {
            injected.push(v.into());
        }
    }
    let mut out = args[..=idx].to_vec();
    out.extend(injected);
    out.extend_from_slice(&args[idx + 1..]);
    Ok(out)
}
