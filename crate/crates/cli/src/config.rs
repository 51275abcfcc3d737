//! `--config FILE`: flat `key = value` lines mirroring the long flags.
//!
//! The file is expanded into ordinary flags placed before the ones given on
//! the command line, so explicit flags always win. `#` starts a comment;
//! boolean flags take `true` or `false`.

use std::collections::HashSet;
use std::ffi::OsString;
use std::path::Path;

use crate::error::{CliError, Result};

/// Flags that select between alternatives; setting one on the command line
/// drops the others from the file.
const EXCLUSIVE: &[&[&str]] = &[&["length", "lattice-const"]];

const BOOLEAN: &[&str] = &["strict-validation", "trim", "fit"];

/// Parses config text into `(key, value)` pairs in file order.
pub fn parse_config(text: &str) -> Result<Vec<(String, String)>> {
    let mut entries = Vec::new();
    let mut seen = HashSet::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| CliError::spec(format!("config line {}: expected key = value", lineno + 1)))?;
        let key = key.trim().trim_start_matches("--").replace('_', "-");
        let value = value.trim().to_string();
        if key.is_empty() || value.is_empty() {
            return Err(CliError::spec(format!(
                "config line {}: empty key or value",
                lineno + 1
            )));
        }
        if key == "config" {
            return Err(CliError::spec("config files cannot include other config files"));
        }
        if !seen.insert(key.clone()) {
            return Err(CliError::spec(format!("config key `{key}` given twice")));
        }
        entries.push((key, value));
    }
    Ok(entries)
}

fn flag_name(arg: &str) -> Option<String> {
    if arg == "-N" || arg.starts_with("-N") && !arg.starts_with("--") {
        return Some("sites".into());
    }
    let name = arg.strip_prefix("--")?;
    Some(name.split('=').next().unwrap_or(name).to_string())
}

fn find_config(argv: &[OsString]) -> Result<Option<(usize, usize, OsString)>> {
    for (i, arg) in argv.iter().enumerate() {
        let Some(s) = arg.to_str() else { continue };
        if s == "--" {
            break;
        }
        if let Some(path) = s.strip_prefix("--config=") {
            return Ok(Some((i, 1, path.into())));
        }
        if s == "--config" {
            let path = argv
                .get(i + 1)
                .ok_or_else(|| CliError::spec("--config needs a file name"))?;
            return Ok(Some((i, 2, path.clone())));
        }
    }
    Ok(None)
}

/// Replaces `--config FILE` in `argv` by the file's flags, inserted right
/// after the subcommand. Keys also present on the command line are skipped.
pub fn expand_config(argv: Vec<OsString>) -> Result<Vec<OsString>> {
    let Some((pos, width, path)) = find_config(&argv)? else {
        return Ok(argv);
    };
    let text = std::fs::read_to_string(Path::new(&path)).map_err(|e| CliError::io(Path::new(&path).display(), e))?;
    let entries = parse_config(&text)?;

    let mut rest: Vec<OsString> = argv[..pos].to_vec();
    rest.extend_from_slice(&argv[pos + width..]);

    let mut given: HashSet<String> = rest.iter().filter_map(|a| a.to_str().and_then(flag_name)).collect();
    for group in EXCLUSIVE {
        if group.iter().any(|k| given.contains(*k)) {
            given.extend(group.iter().map(|k| k.to_string()));
        }
    }

    let mut injected = Vec::new();
    for (key, value) in entries {
        if given.contains(&key) {
            continue;
        }
        if BOOLEAN.contains(&key.as_str()) {
            match value.as_str() {
                "true" => injected.push(OsString::from(format!("--{key}"))),
                "false" => {}
                _ => return Err(CliError::spec(format!("config key `{key}` takes true or false"))),
            }
        } else {
            injected.push(OsString::from(format!("--{key}={value}")));
        }
    }

    // argv[0] is the program, argv[1] the subcommand
    let split = rest.len().min(2);
    let mut out = rest[..split].to_vec();
    out.extend(injected);
    out.extend_from_slice(&rest[split..]);
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn os(v: &[&str]) -> Vec<OsString> {
        v.iter().map(OsString::from).collect()
    }

    #[test]
    fn parses_lines() {
        let entries = parse_config("# figure recipe\nsites = 16,32 # sizes\n\nlog_base=e\n").unwrap();
        assert_eq!(
            entries,
            vec![("sites".into(), "16,32".into()), ("log-base".into(), "e".into())]
        );
        assert!(parse_config("sites 16").is_err());
        assert!(parse_config("sites = 1\nsites = 2").is_err());
        assert!(parse_config("config = x").is_err());
    }

    #[test]
    fn flags_override_file() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("a.cfg");
        std::fs::write(&path, "sites = 16\nkappa = 1\nlength = 1\ntrim = true\nfit = false\n").unwrap();
        let argv = os(&[
            "gaussent",
            "size-scan",
            "--config",
            path.to_str().unwrap(),
            "--kappa",
            "5",
            "--lattice-const",
            "2",
        ]);
        let out = expand_config(argv).unwrap();
        let strs: Vec<&str> = out.iter().map(|s| s.to_str().unwrap()).collect();
        assert_eq!(
            strs,
            vec![
                "gaussent",
                "size-scan",
                "--sites=16",
                "--trim",
                "--kappa",
                "5",
                "--lattice-const",
                "2"
            ]
        );
    }

    #[test]
    fn short_sites_flag_counts_as_given() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("b.cfg");
        std::fs::write(&path, "sites = 16\n").unwrap();
        let argv = os(&[
            "gaussent",
            "kappa-scan",
            &format!("--config={}", path.display()),
            "-N",
            "8",
        ]);
        let out = expand_config(argv).unwrap();
        assert_eq!(out.len(), 4);
    }

    #[test]
    fn missing_file_is_an_error() {
        assert!(expand_config(os(&["gaussent", "fit", "--config", "/nonexistent/x.cfg"])).is_err());
        assert!(expand_config(os(&["gaussent", "fit", "--config"])).is_err());
    }
}
