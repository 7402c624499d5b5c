//! `key = value` defaults file. Entries become `--key value` arguments of the
//! chosen subcommand unless that flag is already on the command line.

use std::fs;
use std::path::Path;

use clap::Command;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Entry {
    pub key: String,
    pub value: String,
}

pub fn parse(text: &str) -> Result<Vec<Entry>, String> {
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| format!("config line {}: expected key = value", i + 1))?;
        let key = key.trim().trim_start_matches("--").replace('_', "-");
        if key.is_empty() {
            return Err(format!("config line {}: empty key", i + 1));
        }
        out.push(Entry {
            key,
            value: value.trim().to_string(),
        });
    }
    Ok(out)
}

pub fn load(path: &Path) -> Result<Vec<Entry>, String> {
    let text = fs::read_to_string(path).map_err(|e| format!("cannot read config {}: {e}", path.display()))?;
    parse(&text)
}

fn flag_present(args: &[String], long: &str) -> bool {
    let bare = format!("--{long}");
    let prefixed = format!("--{long}=");
    args.iter().any(|a| a == &bare || a.starts_with(&prefixed))
}

/// Insert config defaults right after the subcommand token. Keys the
/// subcommand does not know are ignored, so one file can serve several
/// subcommands.
pub fn inject(args: &[String], subcommand: &str, cmd: &Command, entries: &[Entry]) -> Vec<String> {
    let Some(sub) = cmd.find_subcommand(subcommand) else {
        return args.to_vec();
    };
    let Some(pos) = args.iter().position(|a| a == subcommand) else {
        return args.to_vec();
    };
    let mut extra = Vec::new();
    for entry in entries {
        let Some(arg) = sub.get_arguments().find(|a| a.get_long() == Some(entry.key.as_str())) else {
            continue;
        };
        if flag_present(args, &entry.key) {
            continue;
        }
        if arg.get_action().takes_values() {
            extra.push(format!("--{}={}", entry.key, entry.value));
        } else if entry.value == "true" {
            extra.push(format!("--{}", entry.key));
        }
    }
    let mut out = args[..=pos].to_vec();
    out.extend(extra);
    out.extend_from_slice(&args[pos + 1..]);
    out
}
