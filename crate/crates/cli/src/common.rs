use std::fmt;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::ValueEnum;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

/// Flags shared by every subcommand.
#[derive(Debug, Clone, clap::Args)]
pub struct Common {
    /// Output file (directory for `correlate`). Defaults to stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "csv")]
    pub format: Format,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

impl Common {
    pub fn write(&self, content: &str) -> Result<()> {
        match &self.out {
            Some(p) => write_file(p, content),
            None => {
                let mut out = std::io::stdout().lock();
                match out.write_all(content.as_bytes()).and_then(|()| out.flush()) {
                    Err(e) if e.kind() == std::io::ErrorKind::BrokenPipe => Ok(()),
                    other => Ok(other?),
                }
            }
        }
    }
}

pub fn write_file(path: &Path, content: &str) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    }
    fs::write(path, content).with_context(|| format!("writing {}", path.display()))
}

/// One-line machine-readable run summary: `key=value` pairs.
pub struct Summary {
    command: &'static str,
    fields: Vec<(&'static str, String)>,
    /// The report itself went to stdout, so the summary goes to stderr.
    pub report_on_stdout: bool,
}

impl Summary {
    pub fn new(command: &'static str, common: &Common) -> Self {
        Self {
            command,
            fields: vec![("seed", common.seed.to_string())],
            report_on_stdout: common.out.is_none(),
        }
    }

    pub fn field(mut self, key: &'static str, value: impl ToString) -> Self {
        self.fields.push((key, value.to_string()));
        self
    }
}

impl fmt::Display for Summary {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:", self.command)?;
        for (k, v) in &self.fields {
            write!(f, " {k}={v}")?;
        }
        Ok(())
    }
}

/// A feature CSV: `path`, `label`, then numeric columns.
pub struct FeatureTable {
    pub feature_names: Vec<String>,
    pub paths: Vec<String>,
    pub labels: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

pub fn read_feature_csv(path: &Path) -> Result<FeatureTable> {
    let mut rdr = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .from_path(path)
        .with_context(|| format!("reading {}", path.display()))?;
    let headers = rdr.headers()?.clone();
    let Some(label_col) = headers.iter().position(|h| h == "label") else {
        bail!("{}: no `label` column", path.display());
    };
    let path_col = headers.iter().position(|h| h == "path");
    let feature_cols: Vec<usize> = (0..headers.len()).filter(|&i| i != label_col && Some(i) != path_col).collect();
    if feature_cols.is_empty() {
        bail!("{}: no feature columns", path.display());
    }
    let mut t = FeatureTable {
        feature_names: feature_cols.iter().map(|&i| headers[i].to_string()).collect(),
        paths: Vec::new(),
        labels: Vec::new(),
        rows: Vec::new(),
    };
    for (n, rec) in rdr.records().enumerate() {
        let rec = rec?;
        let line = n + 2;
        let row = feature_cols
            .iter()
            .map(|&i| {
                let v = &rec[i];
                v.parse::<f64>()
                    .ok()
                    .filter(|x| x.is_finite())
                    .with_context(|| format!("{} line {line}: column `{}` is not a number: {v:?}", path.display(), &headers[i]))
            })
            .collect::<Result<Vec<_>>>()?;
        t.paths.push(path_col.map_or_else(|| format!("row{line}"), |i| rec[i].to_string()));
        t.labels.push(rec[label_col].to_string());
        t.rows.push(row);
    }
    Ok(t)
}
