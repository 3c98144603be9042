use std::path::PathBuf;

use anyhow::{Context, Result};
use cryptolab::classifier::{evaluate, Dataset, DistanceMetric, Hyperparameters, ModelKind, Protocol};
use serde_json::json;

use crate::common::{read_feature_csv, Common, Format, Summary};

#[derive(clap::Args)]
pub struct Args {
    /// Feature CSV with a `label` column.
    pub features: PathBuf,
    /// Comma-separated models: lr, lda, knn, svm, rf.
    #[arg(long, value_delimiter = ',', default_value = "lr,lda,knn,svm,rf")]
    pub models: Vec<ModelKind>,
    /// Training fraction per class.
    #[arg(long, default_value_t = 0.75)]
    pub split: f64,
    #[arg(long, default_value_t = 20)]
    pub reps: usize,
    #[arg(long, default_value = "euclidean")]
    pub knn_metric: DistanceMetric,
    #[arg(long, default_value_t = 3)]
    pub knn_k: usize,
    #[command(flatten)]
    pub common: Common,
}

pub fn run(args: Args) -> Result<Summary> {
    let table = read_feature_csv(&args.features)?;
    let data = Dataset::from_labelled(table.rows, &table.labels, None).context("building dataset")?;
    let hp = Hyperparameters {
        knn_metric: args.knn_metric,
        knn_k: args.knn_k,
        seed: args.common.seed,
        ..Default::default()
    };
    let protocol = Protocol {
        split: args.split,
        repetitions: args.reps,
        seed: args.common.seed,
    };
    let report = evaluate(&data, &args.models, &hp, &protocol)?;
    let content = match args.common.format {
        Format::Csv => format!(
            "# seed={} reps={} split={}\n{}",
            report.seed,
            report.repetitions,
            report.split,
            report.to_csv()
        ),
        Format::Json => {
            let scores: Vec<_> = report
                .scores
                .iter()
                .map(|s| json!({"model": s.kind.as_str(), "f1": s.f1, "precision": s.precision, "recall": s.recall}))
                .collect();
            let mut s = serde_json::to_string_pretty(&json!({
                "seed": report.seed,
                "repetitions": report.repetitions,
                "split": report.split,
                "classes": data.class_names,
                "samples": data.len(),
                "scores": scores,
            }))?;
            s.push('\n');
            s
        }
    };
    args.common.write(&content)?;
    let best = report
        .scores
        .iter()
        .max_by(|a, b| a.f1.total_cmp(&b.f1))
        .map(|s| format!("{}:{:.4}", s.kind, s.f1))
        .unwrap_or_default();
    Ok(Summary::new("classify", &args.common)
        .field("samples", data.len())
        .field("models", report.scores.len())
        .field("best_f1", best)
        .field("warnings", 0))
}
