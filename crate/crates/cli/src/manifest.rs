use std::fs;
use std::path::{Path, PathBuf};

use chrono::{DateTime, SecondsFormat, Utc};
use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::args::Format;
use crate::commands::{CommandOutput, Resolved};
use crate::CliError;

pub const RNG_DESCRIPTION: &str =
    "ChaCha8 (rand_chacha), seeded with seed_from_u64(seed); stream id = (point << 32) | item";

#[derive(Debug, Serialize)]
pub struct Manifest {
    pub command: String,
    pub config_digest: String,
    pub resolved_config: Resolved,
    pub seed: u64,
    pub rng: &'static str,
    pub tool_version: &'static str,
    pub output: String,
    pub records: usize,
    pub started: String,
    pub finished: String,
}

/// SHA-256 over the command name and the sorted `key=value` lines of the
/// resolved settings.
pub fn config_digest(command: &str, format: Format, resolved: &Resolved) -> String {
    let mut hasher = Sha256::new();
    hasher.update(format!("command={command}\nformat={format:?}\n"));
    for (k, v) in resolved {
        hasher.update(format!("{k}={v}\n"));
    }
    hasher.finalize().iter().map(|b| format!("{b:02x}")).collect()
}

fn timestamp(t: DateTime<Utc>) -> String {
    t.to_rfc3339_opts(SecondsFormat::Millis, true)
}

impl Manifest {
    pub fn new(command: &str, out: &CommandOutput, format: Format, path: &Path, started: DateTime<Utc>) -> Manifest {
        Manifest {
            command: command.to_string(),
            config_digest: config_digest(command, format, &out.resolved),
            resolved_config: out.resolved.clone(),
            seed: out.seed,
            rng: RNG_DESCRIPTION,
            tool_version: env!("CARGO_PKG_VERSION"),
            output: path.display().to_string(),
            records: out.table.rows.len(),
            started: timestamp(started),
            finished: timestamp(Utc::now()),
        }
    }

    pub fn sidecar_path(out: &Path) -> PathBuf {
        let mut s = out.as_os_str().to_os_string();
        s.push(".manifest.json");
        PathBuf::from(s)
    }

    pub fn write_beside(&self, out: &Path) -> Result<(), CliError> {
        let path = Manifest::sidecar_path(out);
        let mut body = serde_json::to_string_pretty(self).expect("manifest serializes");
        body.push('\n');
        fs::write(&path, body).map_err(|e| CliError::Runtime(format!("cannot write {}: {e}", path.display())))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn digest_depends_only_on_content() {
        let mut a = Resolved::new();
        a.insert("n", "50".into());
        a.insert("margin", "0.25,0.75".into());
        let mut b = Resolved::new();
        b.insert("margin", "0.25,0.75".into());
        b.insert("n", "50".into());
        assert_eq!(
            config_digest("tables", Format::Csv, &a),
            config_digest("tables", Format::Csv, &b)
        );
        assert_ne!(
            config_digest("tables", Format::Csv, &a),
            config_digest("tables", Format::Json, &a)
        );
        assert_eq!(config_digest("x", Format::Csv, &a).len(), 64);
    }

    #[test]
    fn sidecar_name() {
        assert_eq!(
            Manifest::sidecar_path(Path::new("out/a.csv")),
            PathBuf::from("out/a.csv.manifest.json")
        );
    }
}
