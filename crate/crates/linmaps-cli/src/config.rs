//! Flat `key=value` config files with optional `[section]` headers.
//!
//! Keys outside any section, or under `[general]`, apply to every command; keys under a
//! section named after the subcommand apply to that command only. Each key becomes a long
//! flag placed before the command-line flags, so explicit flags win.

use std::path::Path;

use crate::error::CliError;

pub fn flags_for(path: &Path, command: &str) -> Result<Vec<String>, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
    parse(&text, command)
}

fn parse(text: &str, command: &str) -> Result<Vec<String>, CliError> {
    let mut section = String::from("general");
    let mut flags = Vec::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        if let Some(name) = line.strip_prefix('[').and_then(|l| l.strip_suffix(']')) {
            section = name.trim().to_string();
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| CliError::Usage(format!("config line {}: expected key=value", lineno + 1)))?;
        if section == "general" || section == command {
            flags.push(format!("--{}", key.trim()));
            flags.push(value.trim().to_string());
        }
    }
    Ok(flags)
}

/// Pulls `--config <path>` or `--config=<path>` out of the raw arguments.
pub fn extract_path(args: &mut Vec<String>) -> Result<Option<String>, CliError> {
    let Some(pos) = args.iter().position(|a| a == "--config" || a.starts_with("--config=")) else {
        return Ok(None);
    };
    let flag = args.remove(pos);
    if let Some(path) = flag.strip_prefix("--config=") {
        return Ok(Some(path.to_string()));
    }
    if pos < args.len() {
        Ok(Some(args.remove(pos)))
    } else {
        Err(CliError::Usage("--config needs a path".into()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sections_select_keys() {
        let text = "seed = 7\n# comment\n[expansion]\nset=builtin:rank-threshold:1\n[spectrum]\nd=2\n";
        assert_eq!(parse(text, "expansion").unwrap(), ["--seed", "7", "--set", "builtin:rank-threshold:1"]);
        assert_eq!(parse(text, "spectrum").unwrap(), ["--seed", "7", "--d", "2"]);
        assert!(parse("oops", "spectrum").is_err());
    }

    #[test]
    fn config_flag_is_extracted() {
        let mut args: Vec<String> = ["linmaps", "spectrum", "--config", "a.cfg", "--q", "3"].map(String::from).to_vec();
        assert_eq!(extract_path(&mut args).unwrap().as_deref(), Some("a.cfg"));
        assert_eq!(args, ["linmaps", "spectrum", "--q", "3"]);
        let mut args: Vec<String> = ["x", "--config=b"].map(String::from).to_vec();
        assert_eq!(extract_path(&mut args).unwrap().as_deref(), Some("b"));
    }
}
