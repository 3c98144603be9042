//! Per-class Pearson correlation matrices and selection of the features whose
//! within-class correlation sets cryptojacking scripts apart from the
//! malicious and benign classes.

use std::fmt::Write as _;

use thiserror::Error;

use crate::jsmetrics::{FEATURE_COUNT, FEATURE_NAMES};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum AnalysisError {
    #[error("series lengths differ: {0} vs {1}")]
    LengthMismatch(usize, usize),
    #[error("need at least 2 samples, got {0}")]
    TooFewSamples(usize),
    #[error("row {row} has {got} values, expected {expected}")]
    RaggedRow { row: usize, got: usize, expected: usize },
    #[error("feature names differ between matrices")]
    NameMismatch,
    #[error("class {0:?} has fewer than 2 rows")]
    SmallClass(String),
    #[error("invalid correlation matrix: {0}")]
    InvalidMatrix(String),
}

/// Pearson correlation of two series. `Ok(None)` when either series has zero
/// variance and the coefficient is undefined.
pub fn pearson(x: &[f64], y: &[f64]) -> Result<Option<f64>, AnalysisError> {
    if x.len() != y.len() {
        return Err(AnalysisError::LengthMismatch(x.len(), y.len()));
    }
    if x.len() < 2 {
        return Err(AnalysisError::TooFewSamples(x.len()));
    }
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (a, b) in x.iter().zip(y) {
        let (dx, dy) = (a - mx, b - my);
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if sxx == 0.0 || syy == 0.0 {
        return Ok(None);
    }
    Ok(Some((sxy / (sxx * syy).sqrt()).clamp(-1.0, 1.0)))
}

/// Labelled samples × features.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureMatrix {
    pub feature_names: Vec<String>,
    pub labels: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl FeatureMatrix {
    pub fn new(feature_names: Vec<String>, labels: Vec<String>, rows: Vec<Vec<f64>>) -> Result<Self, AnalysisError> {
        if labels.len() != rows.len() {
            return Err(AnalysisError::LengthMismatch(labels.len(), rows.len()));
        }
        for (i, r) in rows.iter().enumerate() {
            if r.len() != feature_names.len() {
                return Err(AnalysisError::RaggedRow {
                    row: i,
                    got: r.len(),
                    expected: feature_names.len(),
                });
            }
        }
        Ok(Self {
            feature_names,
            labels,
            rows,
        })
    }

    /// A matrix over the standard 17 features.
    pub fn with_standard_features(labels: Vec<String>, rows: Vec<Vec<f64>>) -> Result<Self, AnalysisError> {
        let names = FEATURE_NAMES.iter().map(|s| s.to_string()).collect();
        let m = Self::new(names, labels, rows)?;
        debug_assert_eq!(m.feature_names.len(), FEATURE_COUNT);
        Ok(m)
    }

    pub fn class_rows(&self, label: &str) -> Vec<Vec<f64>> {
        self.labels
            .iter()
            .zip(&self.rows)
            .filter(|(l, _)| l.as_str() == label)
            .map(|(_, r)| r.clone())
            .collect()
    }

    /// Correlation matrix of one class.
    pub fn class_correlation(&self, label: &str) -> Result<CorrelationMatrix, AnalysisError> {
        let rows = self.class_rows(label);
        if rows.len() < 2 {
            return Err(AnalysisError::SmallClass(label.to_string()));
        }
        correlation_matrix(&self.feature_names, &rows)
    }
}

/// Symmetric matrix of Pearson coefficients; `None` marks undefined entries.
#[derive(Debug, Clone, PartialEq)]
pub struct CorrelationMatrix {
    feature_names: Vec<String>,
    entries: Vec<Option<f64>>,
}

impl CorrelationMatrix {
    /// Builds a matrix from explicit entries, checking symmetry and range.
    pub fn from_entries(feature_names: Vec<String>, entries: Vec<Vec<Option<f64>>>) -> Result<Self, AnalysisError> {
        let d = feature_names.len();
        if entries.len() != d || entries.iter().any(|r| r.len() != d) {
            return Err(AnalysisError::InvalidMatrix(format!("expected {d}x{d}")));
        }
        for i in 0..d {
            for j in 0..d {
                let (a, b) = (entries[i][j], entries[j][i]);
                let same = match (a, b) {
                    (Some(a), Some(b)) => (a - b).abs() <= 1e-12,
                    (None, None) => true,
                    _ => false,
                };
                if !same {
                    return Err(AnalysisError::InvalidMatrix(format!("asymmetric at ({i},{j})")));
                }
                if let Some(v) = a {
                    if !(-1.0..=1.0).contains(&v) {
                        return Err(AnalysisError::InvalidMatrix(format!("entry ({i},{j}) = {v} outside [-1, 1]")));
                    }
                }
            }
        }
        Ok(Self {
            feature_names,
            entries: entries.into_iter().flatten().collect(),
        })
    }

    pub fn dim(&self) -> usize {
        self.feature_names.len()
    }

    pub fn feature_names(&self) -> &[String] {
        &self.feature_names
    }

    pub fn get(&self, i: usize, j: usize) -> Option<f64> {
        self.entries[i * self.dim() + j]
    }

    /// Mean of the defined entries of row `i`, diagonal included.
    pub fn row_mean(&self, i: usize) -> Option<f64> {
        let defined: Vec<f64> = (0..self.dim()).filter_map(|j| self.get(i, j)).collect();
        if defined.is_empty() {
            None
        } else {
            Some(defined.iter().sum::<f64>() / defined.len() as f64)
        }
    }

    /// Writes the matrix as CSV; undefined entries are `NA`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("feature");
        for n in &self.feature_names {
            out.push(',');
            out.push_str(n);
        }
        out.push('\n');
        for (i, n) in self.feature_names.iter().enumerate() {
            out.push_str(n);
            for j in 0..self.dim() {
                match self.get(i, j) {
                    Some(v) => {
                        let _ = write!(out, ",{v}");
                    }
                    None => out.push_str(",NA"),
                }
            }
            out.push('\n');
        }
        out
    }
}

pub fn correlation_matrix(feature_names: &[String], rows: &[Vec<f64>]) -> Result<CorrelationMatrix, AnalysisError> {
    if rows.len() < 2 {
        return Err(AnalysisError::TooFewSamples(rows.len()));
    }
    let d = feature_names.len();
    for (i, r) in rows.iter().enumerate() {
        if r.len() != d {
            return Err(AnalysisError::RaggedRow {
                row: i,
                got: r.len(),
                expected: d,
            });
        }
    }
    let columns: Vec<Vec<f64>> = (0..d).map(|j| rows.iter().map(|r| r[j]).collect()).collect();
    let mut entries = vec![None; d * d];
    for i in 0..d {
        for j in i..d {
            let mut v = pearson(&columns[i], &columns[j])?;
            if i == j {
                v = v.map(|_| 1.0);
            }
            entries[i * d + j] = v;
            entries[j * d + i] = v;
        }
    }
    Ok(CorrelationMatrix {
        feature_names: feature_names.to_vec(),
        entries,
    })
}

/// Per-feature row means of the three class matrices.
#[derive(Debug, Clone, PartialEq)]
pub struct RowMeans {
    pub cryptojacking: Vec<Option<f64>>,
    pub malicious: Vec<Option<f64>>,
    pub benign: Vec<Option<f64>>,
}

pub fn row_means(
    cryptojacking: &CorrelationMatrix,
    malicious: &CorrelationMatrix,
    benign: &CorrelationMatrix,
) -> Result<RowMeans, AnalysisError> {
    if cryptojacking.feature_names != malicious.feature_names || cryptojacking.feature_names != benign.feature_names {
        return Err(AnalysisError::NameMismatch);
    }
    let means = |m: &CorrelationMatrix| (0..m.dim()).map(|i| m.row_mean(i)).collect();
    Ok(RowMeans {
        cryptojacking: means(cryptojacking),
        malicious: means(malicious),
        benign: means(benign),
    })
}

/// The selection rule for one feature: both `c - m` and `c - b` must exceed
/// `m - b`.
pub fn is_significant(c: f64, m: f64, b: f64) -> bool {
    let baseline = m - b;
    c - m > baseline && c - b > baseline
}

/// Features whose cryptojacking row mean stands out against the malicious and
/// benign row means. Output keeps the input feature order. A feature with no
/// defined entries in any of the three matrices is never selected.
pub fn significant_features(
    cryptojacking: &CorrelationMatrix,
    malicious: &CorrelationMatrix,
    benign: &CorrelationMatrix,
) -> Result<Vec<String>, AnalysisError> {
    let means = row_means(cryptojacking, malicious, benign)?;
    let mut selected = Vec::new();
    for (k, name) in cryptojacking.feature_names.iter().enumerate() {
        let (Some(c), Some(m), Some(b)) = (means.cryptojacking[k], means.malicious[k], means.benign[k]) else {
            continue;
        };
        if is_significant(c, m, b) {
            selected.push(name.clone());
        }
    }
    Ok(selected)
}
