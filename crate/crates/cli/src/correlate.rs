use std::path::PathBuf;

use anyhow::{Context, Result};
use cryptolab::featanalysis::{correlation_matrix, row_means, significant_features, CorrelationMatrix};
use serde_json::json;

use crate::analyze::CLASSES;
use crate::common::{read_feature_csv, write_file, Common, Format, Summary};

#[derive(clap::Args)]
pub struct Args {
    /// Feature CSV as written by `analyze`.
    pub features: PathBuf,
    #[command(flatten)]
    pub common: Common,
}

fn matrix_json(m: &CorrelationMatrix) -> serde_json::Value {
    let entries: Vec<Vec<Option<f64>>> = (0..m.dim()).map(|i| (0..m.dim()).map(|j| m.get(i, j)).collect()).collect();
    json!({"features": m.feature_names(), "entries": entries})
}

pub fn run(args: Args) -> Result<Summary> {
    let table = read_feature_csv(&args.features)?;
    let mut matrices = Vec::new();
    let mut undefined = 0;
    for class in CLASSES {
        // Sorted rows make the floating-point sums independent of input order.
        let mut rows: Vec<(&String, &Vec<f64>)> = table
            .labels
            .iter()
            .zip(&table.paths)
            .zip(&table.rows)
            .filter(|((l, _), _)| l.as_str() == class)
            .map(|((_, p), r)| (p, r))
            .collect();
        rows.sort_by(|a, b| {
            a.0.cmp(b.0).then_with(|| {
                a.1.iter()
                    .zip(b.1)
                    .map(|(x, y)| x.total_cmp(y))
                    .find(|o| o.is_ne())
                    .unwrap_or(std::cmp::Ordering::Equal)
            })
        });
        let rows: Vec<Vec<f64>> = rows.into_iter().map(|(_, r)| r.clone()).collect();
        let m = correlation_matrix(&table.feature_names, &rows).with_context(|| format!("class {class}"))?;
        let na = (0..m.dim()).flat_map(|i| (0..m.dim()).map(move |j| (i, j))).filter(|&(i, j)| m.get(i, j).is_none()).count();
        if na > 0 {
            log::warn!("class {class}: {na} undefined correlation entries (constant features)");
        }
        undefined += na;
        matrices.push(m);
    }
    let selected = significant_features(&matrices[0], &matrices[1], &matrices[2])?;
    let means = row_means(&matrices[0], &matrices[1], &matrices[2])?;

    match (&args.common.out, args.common.format) {
        (Some(dir), Format::Csv) => {
            for (class, m) in CLASSES.iter().zip(&matrices) {
                write_file(&dir.join(format!("corr_{class}.csv")), &m.to_csv())?;
            }
            let mut s = format!("# seed={}\nfeature,mean_cryptojacking,mean_malicious,mean_benign,selected\n", args.common.seed);
            let fmt = |v: Option<f64>| v.map_or("NA".to_string(), |x| x.to_string());
            for (k, name) in table.feature_names.iter().enumerate() {
                s.push_str(&format!(
                    "{name},{},{},{},{}\n",
                    fmt(means.cryptojacking[k]),
                    fmt(means.malicious[k]),
                    fmt(means.benign[k]),
                    selected.contains(name)
                ));
            }
            write_file(&dir.join("selected.csv"), &s)?;
        }
        (out, format) => {
            let content = match format {
                Format::Json => {
                    let mut s = serde_json::to_string_pretty(&json!({
                        "seed": args.common.seed,
                        "matrices": {
                            "cryptojacking": matrix_json(&matrices[0]),
                            "malicious": matrix_json(&matrices[1]),
                            "benign": matrix_json(&matrices[2]),
                        },
                        "row_means": {
                            "cryptojacking": means.cryptojacking,
                            "malicious": means.malicious,
                            "benign": means.benign,
                        },
                        "selected": selected,
                    }))?;
                    s.push('\n');
                    s
                }
                Format::Csv => selected.iter().map(|s| format!("{s}\n")).collect(),
            };
            match out {
                Some(dir) => write_file(&dir.join("correlate.json"), &content)?,
                None => args.common.write(&content)?,
            }
        }
    }
    Ok(Summary::new("correlate", &args.common)
        .field("rows", table.rows.len())
        .field("selected", selected.len())
        .field("undefined_entries", undefined)
        .field("warnings", usize::from(undefined > 0)))
}
