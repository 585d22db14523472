//! `--config` files: one `key = value` per line, keys named after the long
//! flags. The same format is written next to every output file so a run can
//! be replayed with `klnn --config <file>.run`.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::path::Path;

use anyhow::{bail, Context, Result};

pub const SUBCOMMANDS: [&str; 5] = ["bias-table", "estimate", "experiment", "ground-truth", "sample"];

/// Parses config text into `(key, value)` pairs in file order.
pub fn parse(text: &str) -> Result<Vec<(String, String)>> {
    let mut pairs = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            bail!("config line {}: expected 'key = value', got '{line}'", i + 1);
        };
        let key = key.trim().trim_start_matches("--");
        if key.is_empty() {
            bail!("config line {}: empty key", i + 1);
        }
        pairs.push((key.to_string(), value.trim().to_string()));
    }
    Ok(pairs)
}

fn config_path(args: &[OsString]) -> Result<Option<(usize, usize, OsString)>> {
    for (i, a) in args.iter().enumerate().skip(1) {
        let s = a.to_string_lossy();
        if s == "--" {
            break;
        }
        if s == "--config" {
            let path = args.get(i + 1).context("--config needs a file path")?;
            return Ok(Some((i, 2, path.clone())));
        }
        if let Some(p) = s.strip_prefix("--config=") {
            return Ok(Some((i, 1, p.into())));
        }
    }
    Ok(None)
}

/// Splices the flags from a `--config` file into `args`, directly after the
/// subcommand, so flags given on the command line take precedence.
///
/// A `command` key names the subcommand when the command line omits it.
/// Boolean flags are written `flag = true`; `false` drops the flag.
pub fn expand_args(mut args: Vec<OsString>) -> Result<Vec<OsString>> {
    let Some((pos, width, path)) = config_path(&args)? else {
        return Ok(args);
    };
    args.drain(pos..pos + width);
    let path = Path::new(&path);
    let text = std::fs::read_to_string(path).with_context(|| format!("reading config {}", path.display()))?;
    let pairs = parse(&text).with_context(|| format!("in config {}", path.display()))?;

    let mut command = None;
    let mut flags: Vec<OsString> = Vec::new();
    for (key, value) in pairs {
        match (key.as_str(), value.as_str()) {
            ("command", v) => command = Some(v.to_string()),
            (_, "false") => {}
            (k, "true") => flags.push(format!("--{k}").into()),
            (k, v) => {
                flags.push(format!("--{k}").into());
                flags.push(v.into());
            }
        }
    }

    let sub = args
        .iter()
        .position(|a| SUBCOMMANDS.contains(&a.to_string_lossy().as_ref()));
    let at = match (sub, command) {
        (Some(i), Some(c)) if args[i] != *c => {
            bail!(
                "config names command '{c}' but the command line runs '{}'",
                args[i].to_string_lossy()
            )
        }
        (Some(i), _) => i + 1,
        (None, Some(c)) => {
            if !SUBCOMMANDS.contains(&c.as_str()) {
                bail!("config names unknown command '{c}'");
            }
            args.insert(1, c.into());
            2
        }
        (None, None) => bail!("config file does not name a command and none was given"),
    };
    args.splice(at..at, flags);
    Ok(args)
}

/// Renders the effective configuration of a run in the `--config` format.
pub fn render(command: &str, pairs: &[(&str, String)]) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "command = {command}");
    for (k, v) in pairs {
        let _ = writeln!(out, "{k} = {v}");
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn os(v: &[&str]) -> Vec<OsString> {
        v.iter().map(OsString::from).collect()
    }

    #[test]
    fn parses_comments_and_spacing() {
        let p = parse("# run\nk = 5\n\n--alpha=2\nrenyi = true\n").unwrap();
        assert_eq!(
            p,
            vec![
                ("k".into(), "5".into()),
                ("alpha".into(), "2".into()),
                ("renyi".into(), "true".into())
            ]
        );
        assert!(parse("just words").is_err());
    }

    #[test]
    fn config_flags_precede_command_line_flags() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("run.cfg");
        std::fs::write(&path, "command = estimate\nk = 7\nrenyi = true\nplot = false\n").unwrap();
        let args = os(&["klnn", "--config", path.to_str().unwrap(), "estimate", "--k", "4"]);
        let out = expand_args(args).unwrap();
        assert_eq!(out, os(&["klnn", "estimate", "--k", "7", "--renyi", "--k", "4"]));

        let args = os(&["klnn", &format!("--config={}", path.display())]);
        let out = expand_args(args).unwrap();
        assert_eq!(out, os(&["klnn", "estimate", "--k", "7", "--renyi"]));

        let args = os(&["klnn", "--config", path.to_str().unwrap(), "sample"]);
        assert!(expand_args(args).is_err());
    }
}
