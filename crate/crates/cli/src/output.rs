use std::path::Path;
use std::time::{SystemTime, UNIX_EPOCH};

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::CliError;

pub fn serialize_csv<T: Serialize>(rows: &[T]) -> Result<String, CliError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for row in rows {
        w.serialize(row)?;
    }
    let bytes = w
        .into_inner()
        .map_err(|e| CliError::Internal(format!("csv: {e}")))?;
    String::from_utf8(bytes).map_err(|e| CliError::Internal(e.to_string()))
}

/// Header row first.
pub fn csv_string(table: &[Vec<String>]) -> Result<String, CliError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for row in table {
        w.write_record(row)?;
    }
    let bytes = w
        .into_inner()
        .map_err(|e| CliError::Internal(format!("csv: {e}")))?;
    String::from_utf8(bytes).map_err(|e| CliError::Internal(e.to_string()))
}

pub fn write_csv<T: Serialize>(path: &Path, rows: &[T]) -> Result<(), CliError> {
    std::fs::write(path, serialize_csv(rows)?)?;
    Ok(())
}

pub fn write_json(path: &Path, text: &str) -> Result<(), CliError> {
    std::fs::write(path, format!("{text}\n"))?;
    Ok(())
}

/// Record written next to every output; `args` replays the run.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Manifest {
    pub tool: String,
    pub version: String,
    pub command: String,
    pub args: Vec<String>,
    pub config: Value,
    pub seed_base: Option<u64>,
    /// Seconds since the Unix epoch.
    pub timestamp: u64,
    pub outputs: Vec<String>,
}

impl Manifest {
    pub fn new(
        command: &str,
        args: &[String],
        config: Value,
        seed_base: Option<u64>,
        outputs: Vec<String>,
    ) -> Self {
        Manifest {
            tool: "coverlab".into(),
            version: env!("CARGO_PKG_VERSION").into(),
            command: command.into(),
            args: args.to_vec(),
            config,
            seed_base,
            timestamp: SystemTime::now()
                .duration_since(UNIX_EPOCH)
                .map(|d| d.as_secs())
                .unwrap_or(0),
            outputs,
        }
    }

    pub fn write(&self, dir: &Path) -> Result<(), CliError> {
        write_json(
            &dir.join("manifest.json"),
            &serde_json::to_string_pretty(self)?,
        )
    }

    pub fn read(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| {
            CliError::Usage(format!("cannot read manifest {}: {e}", path.display()))
        })?;
        serde_json::from_str(&text).map_err(|e| CliError::Usage(format!("malformed manifest: {e}")))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[derive(Serialize)]
    struct Row {
        a: u64,
        b: Option<u64>,
        c: bool,
    }

    #[test]
    fn optional_fields_are_empty() {
        let text = serialize_csv(&[
            Row {
                a: 1,
                b: None,
                c: true,
            },
            Row {
                a: 2,
                b: Some(5),
                c: false,
            },
        ])
        .unwrap();
        assert_eq!(text, "a,b,c\n1,,true\n2,5,false\n");
    }

    #[test]
    fn table_quotes_when_needed() {
        let t = vec![
            vec!["x".to_string(), "y".to_string()],
            vec!["1,2".to_string(), "3".to_string()],
        ];
        assert_eq!(csv_string(&t).unwrap(), "x,y\n\"1,2\",3\n");
    }

    #[test]
    fn manifest_roundtrip() {
        let dir = tempfile::tempdir().unwrap();
        let m = Manifest::new(
            "simulate",
            &["simulate".into(), "--env".into(), "star".into()],
            Value::Null,
            Some(3),
            vec![],
        );
        m.write(dir.path()).unwrap();
        let back = Manifest::read(&dir.path().join("manifest.json")).unwrap();
        assert_eq!(back.args, m.args);
        assert_eq!(back.seed_base, Some(3));
    }
}
