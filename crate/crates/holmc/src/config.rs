//! `key = value` configuration files.
//!
//! Every key is the long name of a command-line flag. Values from the file
//! only apply to flags that are absent from the command line.

use std::ffi::OsString;

use crate::format::ParseError;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConfigEntry {
    pub key: String,
    pub value: String,
}

/// Parses `key = value` lines; `#` comments and blank lines are skipped.
pub fn parse_config(text: &str) -> Result<Vec<ConfigEntry>, ParseError> {
    let mut entries = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let content = raw.split('#').next().unwrap_or("");
        if content.trim().is_empty() {
            continue;
        }
        let err = |column: usize, message: &str| ParseError {
            line: i + 1,
            column,
            message: message.to_owned(),
        };
        let Some(eq) = content.find('=') else {
            let col = content.len() - content.trim_start().len() + 1;
            return Err(err(col, "expected `key = value`"));
        };
        let key = content[..eq].trim();
        let value = content[eq + 1..].trim();
        if key.is_empty() {
            return Err(err(eq + 1, "missing key before `=`"));
        }
        if let Some(bad) = key.find(|c: char| !(c.is_ascii_alphanumeric() || c == '-' || c == '_')) {
            let col = content[..content.find(key).unwrap_or(0) + bad].chars().count() + 1;
            return Err(err(col, "keys may only contain letters, digits, `-` and `_`"));
        }
        if value.is_empty() {
            return Err(err(eq + 2, "missing value after `=`"));
        }
        entries.push(ConfigEntry {
            key: key.replace('_', "-"),
            value: value.to_owned(),
        });
    }
    Ok(entries)
}

/// Removes `--config PATH` / `--config=PATH` from `args`, returning the path.
pub fn take_config_path(args: &mut Vec<OsString>) -> Result<Option<OsString>, String> {
    let mut found = None;
    let mut i = 0;
    while i < args.len() {
        let arg = args[i].to_string_lossy().into_owned();
        if arg == "--" {
            break;
        }
        if arg == "--config" {
            if i + 1 >= args.len() {
                return Err("`--config` needs a file name".into());
            }
            args.remove(i);
            found = Some(args.remove(i));
        } else if let Some(path) = arg.strip_prefix("--config=") {
            args.remove(i);
            found = Some(path.into());
        } else {
            i += 1;
        }
    }
    Ok(found)
}

/// Appends every entry whose flag is not already given. `true` becomes a bare
/// flag, `false` leaves the flag out.
pub fn merge_config(args: &mut Vec<OsString>, entries: &[ConfigEntry]) {
    let given = |key: &str| {
        let flag = format!("--{key}");
        let with_value = format!("--{key}=");
        args.iter().any(|a| {
            let a = a.to_string_lossy();
            a == flag || a.starts_with(&with_value)
        })
    };
    let mut extra = Vec::new();
    for entry in entries {
        if given(&entry.key) {
            continue;
        }
        match entry.value.as_str() {
            "false" => {}
            "true" => extra.push(OsString::from(format!("--{}", entry.key))),
            v => {
                extra.push(OsString::from(format!("--{}", entry.key)));
                extra.push(OsString::from(v));
            }
        }
    }
    // flags must precede a `--` separator
    let at = args.iter().position(|a| a == "--").unwrap_or(args.len());
    args.splice(at..at, extra);
}
