//! Config files are TOML. Top-level keys apply to every subcommand; a table
//! named after a subcommand applies to that subcommand only. Keys are flag
//! names (`prior_beta` or `prior-beta`). Values become flags inserted ahead of
//! the command-line ones, so an explicit flag always wins.

use std::fs;

use crate::CliError;

const GLOBAL_VALUE_FLAGS: [&str; 6] = ["--seed", "--reps", "--format", "--out", "--threads", "--config"];

fn flag_value(args: &[String], flag: &str) -> Option<String> {
    let prefix = format!("{flag}=");
    args.iter().enumerate().find_map(|(i, a)| {
        if a == flag {
            args.get(i + 1).cloned()
        } else {
            a.strip_prefix(&prefix).map(str::to_string)
        }
    })
}

fn subcommand_index(args: &[String]) -> Option<usize> {
    let mut i = 1;
    while i < args.len() {
        let a = &args[i];
        if GLOBAL_VALUE_FLAGS.contains(&a.as_str()) {
            i += 2;
            continue;
        }
        if !a.starts_with('-') {
            return Some(i);
        }
        i += 1;
    }
    None
}

fn user_sets(args: &[String], flag: &str) -> bool {
    let prefix = format!("{flag}=");
    args.iter().any(|a| a == flag || a.starts_with(&prefix))
}

fn scalar(key: &str, v: &toml::Value) -> Result<Option<String>, CliError> {
    Ok(match v {
        toml::Value::String(s) => Some(s.clone()),
        toml::Value::Integer(i) => Some(i.to_string()),
        toml::Value::Float(f) => Some(f.to_string()),
        toml::Value::Boolean(_) => None,
        _ => {
            return Err(CliError::Config(format!(
                "config key `{key}` has an unsupported value type"
            )))
        }
    })
}

fn push_flags(out: &mut Vec<String>, user: &[String], key: &str, value: &toml::Value) -> Result<(), CliError> {
    let flag = format!("--{}", key.replace('_', "-"));
    if user_sets(user, &flag) || flag == "--config" {
        return Ok(());
    }
    match value {
        toml::Value::Boolean(true) => out.push(flag),
        toml::Value::Boolean(false) => {}
        toml::Value::Array(items) => {
            for item in items {
                let s = scalar(key, item)?
                    .ok_or_else(|| CliError::Config(format!("config key `{key}` holds a boolean array")))?;
                out.push(flag.clone());
                out.push(s);
            }
        }
        other => {
            if let Some(s) = scalar(key, other)? {
                out.push(flag);
                out.push(s);
            }
        }
    }
    Ok(())
}

/// Rewrites `args` with values from `--config` inserted right after the
/// subcommand name. Returns `args` unchanged when no config is given.
pub fn expand(args: Vec<String>) -> Result<Vec<String>, CliError> {
    let Some(path) = flag_value(&args, "--config") else {
        return Ok(args);
    };
    let Some(sub_at) = subcommand_index(&args) else {
        return Ok(args);
    };
    let text =
        fs::read_to_string(&path).map_err(|e| CliError::Config(format!("cannot read config file {path}: {e}")))?;
    let doc: toml::Table = text
        .parse()
        .map_err(|e| CliError::Config(format!("config file {path} is not valid TOML: {e}")))?;
    let sub = args[sub_at].clone();

    let mut injected = Vec::new();
    for (key, value) in &doc {
        if value.is_table() {
            continue;
        }
        push_flags(&mut injected, &args, key, value)?;
    }
    if let Some(section) = doc.get(&sub) {
        let table = section
            .as_table()
            .ok_or_else(|| CliError::Config(format!("config key `{sub}` must be a table")))?;
        for (key, value) in table {
            push_flags(&mut injected, &args, key, value)?;
        }
    }
    for (key, value) in &doc {
        if value.is_table() && key != &sub && !crate::SUBCOMMANDS.contains(&key.as_str()) {
            return Err(CliError::Config(format!("unknown config section `{key}`")));
        }
    }

    let mut out = vec![args[0].clone(), sub];
    out.extend(injected);
    out.extend(
        args[1..]
            .iter()
            .enumerate()
            .filter(|(i, _)| i + 1 != sub_at)
            .map(|(_, a)| a.clone()),
    );
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn strs(v: &[&str]) -> Vec<String> {
        v.iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn finds_subcommand_after_global_values() {
        let a = strs(&["equivtest", "--seed", "3", "--out", "x.csv", "tables", "--row", "n=20"]);
        assert_eq!(subcommand_index(&a), Some(5));
    }

    #[test]
    fn flags_win_over_config() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("c.toml");
        fs::write(
            &path,
            "seed = 9\nreps = 10\n[tables]\nrow = [\"n=20\", \"n=30\"]\nalpha = 0.1\n",
        )
        .unwrap();
        let args = strs(&[
            "equivtest",
            "tables",
            "--config",
            path.to_str().unwrap(),
            "--seed",
            "1",
            "--row",
            "n=50",
        ]);
        let out = expand(args).unwrap();
        assert_eq!(out[1], "tables");
        assert!(!out.contains(&"9".to_string()));
        assert!(out.windows(2).any(|w| w[0] == "--reps" && w[1] == "10"));
        assert!(out.windows(2).any(|w| w[0] == "--alpha" && w[1] == "0.1"));
        assert!(!out.contains(&"n=20".to_string()));
        assert!(out.ends_with(&strs(&["--seed", "1", "--row", "n=50"])));
    }
}
