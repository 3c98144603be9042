use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{bail, Result};
use cryptolab::classifier::mean_pool;
use cryptolab::jsmetrics::{csv_header, extract_features_lenient, FeatureVector, FEATURE_NAMES};
use rayon::prelude::*;
use serde_json::json;
use walkdir::WalkDir;

use crate::common::{write_file, Common, Format, Summary};

pub const CLASSES: [&str; 3] = ["cryptojacking", "malicious", "benign"];

#[derive(clap::Args)]
pub struct Args {
    /// Corpus root holding cryptojacking/, malicious/ and benign/.
    pub corpus: PathBuf,
    /// Also write one mean-pooled row per `websites/<site>/` directory.
    #[arg(long)]
    pub websites: Option<PathBuf>,
    #[command(flatten)]
    pub common: Common,
}

fn js_files(dir: &Path) -> Vec<PathBuf> {
    let mut files: Vec<PathBuf> = WalkDir::new(dir)
        .into_iter()
        .filter_map(|e| match e {
            Ok(e) => Some(e),
            Err(err) => {
                log::warn!("{err}");
                None
            }
        })
        .filter(|e| e.file_type().is_file() && e.path().extension().is_some_and(|x| x == "js"))
        .map(|e| e.into_path())
        .collect();
    files.sort();
    files
}

fn relative(root: &Path, p: &Path) -> String {
    let rel = p.strip_prefix(root).unwrap_or(p);
    rel.components()
        .map(|c| c.as_os_str().to_string_lossy())
        .collect::<Vec<_>>()
        .join("/")
}

struct Row {
    path: String,
    label: String,
    features: FeatureVector,
}

enum Outcome {
    Row(Row, Option<String>),
    Skipped(String),
}

fn analyze_file(root: &Path, path: &Path, label: &str) -> Outcome {
    let rel = relative(root, path);
    let bytes = match fs::read(path) {
        Ok(b) => b,
        Err(e) => return Outcome::Skipped(format!("{rel}: unreadable: {e}")),
    };
    let source = String::from_utf8_lossy(&bytes);
    match extract_features_lenient(&source) {
        Ok((features, lex)) => Outcome::Row(
            Row {
                path: rel.clone(),
                label: label.to_string(),
                features,
            },
            lex.map(|e| format!("{rel}: {e}")),
        ),
        Err(e) => Outcome::Skipped(format!("{rel}: {e}")),
    }
}

fn to_csv(rows: &[Row]) -> String {
    let mut out = csv_header();
    out.push('\n');
    for r in rows {
        out.push_str(&r.path);
        out.push(',');
        out.push_str(&r.label);
        for f in r.features.csv_fields() {
            out.push(',');
            out.push_str(&f);
        }
        out.push('\n');
    }
    out
}

fn to_json(rows: &[Row], warnings: &[String]) -> String {
    let rows: Vec<_> = rows
        .iter()
        .map(|r| {
            let feats: serde_json::Map<String, serde_json::Value> = FEATURE_NAMES
                .iter()
                .zip(r.features.to_row())
                .map(|(n, v)| (n.to_string(), json!(v)))
                .collect();
            json!({"path": r.path, "label": r.label, "features": feats})
        })
        .collect();
    let mut s = serde_json::to_string_pretty(&json!({"rows": rows, "warnings": warnings})).expect("json");
    s.push('\n');
    s
}

fn pooled_websites(root: &Path, warnings: &mut Vec<String>) -> Vec<(String, Vec<f64>)> {
    let Ok(entries) = fs::read_dir(root) else {
        return Vec::new();
    };
    let mut sites: Vec<PathBuf> = entries.filter_map(|e| e.ok()).map(|e| e.path()).filter(|p| p.is_dir()).collect();
    sites.sort();
    let mut out = Vec::new();
    for site in sites {
        let name = site.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_default();
        let vectors: Vec<Vec<f64>> = js_files(&site)
            .iter()
            .filter_map(|p| match analyze_file(root, p, "website") {
                Outcome::Row(r, _) => Some(r.features.to_row().to_vec()),
                Outcome::Skipped(w) => {
                    warnings.push(w);
                    None
                }
            })
            .collect();
        match mean_pool(&vectors) {
            Some(v) => out.push((name, v)),
            None => warnings.push(format!("websites/{name}: no analyzable scripts")),
        }
    }
    out
}

pub fn run(args: Args) -> Result<Summary> {
    let root = &args.corpus;
    if !root.is_dir() {
        bail!("corpus root {} is not a directory", root.display());
    }
    let mut warnings = Vec::new();
    let mut jobs = Vec::new();
    for class in CLASSES {
        let files = js_files(&root.join(class));
        if files.is_empty() {
            warnings.push(format!("class {class} has no .js files"));
        }
        jobs.extend(files.into_iter().map(|f| (f, class)));
    }
    jobs.sort_by(|a, b| a.0.cmp(&b.0));
    let outcomes: Vec<Outcome> = jobs.par_iter().map(|(f, class)| analyze_file(root, f, class)).collect();
    let mut rows = Vec::new();
    let mut skipped = 0;
    for o in outcomes {
        match o {
            Outcome::Row(r, w) => {
                warnings.extend(w);
                rows.push(r);
            }
            Outcome::Skipped(w) => {
                skipped += 1;
                warnings.push(w);
            }
        }
    }

    let mut site_count = 0;
    if let Some(out) = &args.websites {
        let sites = pooled_websites(&root.join("websites"), &mut warnings);
        site_count = sites.len();
        let mut s = String::from("site");
        for n in FEATURE_NAMES {
            s.push(',');
            s.push_str(n);
        }
        s.push('\n');
        for (name, v) in sites {
            s.push_str(&name);
            for x in v {
                s.push_str(&format!(",{x}"));
            }
            s.push('\n');
        }
        write_file(out, &s)?;
    }

    for w in &warnings {
        log::warn!("{w}");
    }
    let content = match args.common.format {
        Format::Csv => to_csv(&rows),
        Format::Json => to_json(&rows, &warnings),
    };
    args.common.write(&content)?;
    let mut summary = Summary::new("analyze", &args.common)
        .field("rows", rows.len())
        .field("skipped", skipped)
        .field("warnings", warnings.len());
    if args.websites.is_some() {
        summary = summary.field("websites", site_count);
    }
    Ok(summary)
}
