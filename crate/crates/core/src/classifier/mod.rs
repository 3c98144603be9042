//! Five classifiers (logistic regression, LDA, k-NN, linear SVM, random
//! forest) behind one `train`/`predict` surface, plus the repeated stratified
//! holdout bench in [`evaluate`].

mod eval;
mod forest;
mod knn;
mod lda;
mod logistic;
mod scaler;
pub mod synthetic;

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

pub use eval::{evaluate, macro_scores, stratified_split, ClassScores, EvaluationReport, ModelScore, Protocol};
pub use forest::{ForestParams, RandomForest};
pub use knn::{DistanceMetric, KnnModel};
pub use lda::LdaModel;
pub use logistic::{LogisticModel, LogisticParams};
pub use scaler::Scaler;
pub use svm::SvmModel;

mod svm;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ClassifierError {
    #[error("dataset is empty")]
    Empty,
    #[error("need at least 2 classes, found {0}")]
    TooFewClasses(usize),
    #[error("{samples} samples but {labels} labels")]
    LengthMismatch { samples: usize, labels: usize },
    #[error("expected {expected} features, got {got}")]
    WidthMismatch { expected: usize, got: usize },
    #[error("label {label} out of range for {classes} classes")]
    LabelOutOfRange { label: usize, classes: usize },
    #[error("non-finite feature value in sample {0}")]
    NonFinite(usize),
    #[error("class {0:?} has fewer than 2 samples")]
    ClassTooSmall(String),
    #[error("split ratio {0} must lie strictly between 0 and 1")]
    BadSplit(f64),
    #[error("unknown model {0:?}")]
    UnknownModel(String),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    pub samples: Vec<Vec<f64>>,
    pub labels: Vec<usize>,
    pub class_names: Vec<String>,
}

impl Dataset {
    pub fn new(samples: Vec<Vec<f64>>, labels: Vec<usize>, class_names: Vec<String>) -> Result<Self, ClassifierError> {
        if samples.len() != labels.len() {
            return Err(ClassifierError::LengthMismatch {
                samples: samples.len(),
                labels: labels.len(),
            });
        }
        if samples.is_empty() {
            return Err(ClassifierError::Empty);
        }
        let width = samples[0].len();
        for (i, s) in samples.iter().enumerate() {
            if s.len() != width {
                return Err(ClassifierError::WidthMismatch {
                    expected: width,
                    got: s.len(),
                });
            }
            if s.iter().any(|v| !v.is_finite()) {
                return Err(ClassifierError::NonFinite(i));
            }
        }
        if let Some(&label) = labels.iter().find(|&&l| l >= class_names.len()) {
            return Err(ClassifierError::LabelOutOfRange {
                label,
                classes: class_names.len(),
            });
        }
        Ok(Self {
            samples,
            labels,
            class_names,
        })
    }

    /// Builds a dataset from string labels; class ids follow first appearance
    /// in `class_order` if given, else sorted label order.
    pub fn from_labelled(samples: Vec<Vec<f64>>, labels: &[String], class_order: Option<&[String]>) -> Result<Self, ClassifierError> {
        let class_names: Vec<String> = match class_order {
            Some(order) => order.to_vec(),
            None => {
                let mut names: Vec<String> = labels.to_vec();
                names.sort();
                names.dedup();
                names
            }
        };
        let ids = labels
            .iter()
            .map(|l| {
                class_names
                    .iter()
                    .position(|c| c == l)
                    .ok_or(ClassifierError::LabelOutOfRange {
                        label: class_names.len(),
                        classes: class_names.len(),
                    })
            })
            .collect::<Result<Vec<_>, _>>()?;
        Self::new(samples, ids, class_names)
    }

    pub fn width(&self) -> usize {
        self.samples.first().map_or(0, Vec::len)
    }

    pub fn n_classes(&self) -> usize {
        self.class_names.len()
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn class_counts(&self) -> Vec<usize> {
        let mut counts = vec![0; self.n_classes()];
        for &l in &self.labels {
            counts[l] += 1;
        }
        counts
    }

    pub fn subset(&self, idx: &[usize]) -> Dataset {
        Dataset {
            samples: idx.iter().map(|&i| self.samples[i].clone()).collect(),
            labels: idx.iter().map(|&i| self.labels[i]).collect(),
            class_names: self.class_names.clone(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ModelKind {
    Logistic,
    Lda,
    Knn,
    Svm,
    RandomForest,
}

impl ModelKind {
    pub const ALL: [ModelKind; 5] = [Self::Logistic, Self::Lda, Self::Knn, Self::Svm, Self::RandomForest];

    pub fn as_str(self) -> &'static str {
        match self {
            Self::Logistic => "lr",
            Self::Lda => "lda",
            Self::Knn => "knn",
            Self::Svm => "svm",
            Self::RandomForest => "rf",
        }
    }
}

impl fmt::Display for ModelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ModelKind {
    type Err = ClassifierError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Self::ALL
            .into_iter()
            .find(|k| k.as_str().eq_ignore_ascii_case(s.trim()))
            .ok_or_else(|| ClassifierError::UnknownModel(s.to_string()))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Hyperparameters {
    pub lr_lambda: f64,
    pub lr_tolerance: f64,
    pub lr_max_iter: usize,
    pub lda_shrinkage: f64,
    pub knn_k: usize,
    pub knn_metric: DistanceMetric,
    pub svm_c: f64,
    pub svm_epochs: usize,
    pub rf_trees: usize,
    pub rf_max_depth: Option<usize>,
    pub seed: u64,
}

impl Default for Hyperparameters {
    fn default() -> Self {
        Self {
            lr_lambda: 1e-4,
            lr_tolerance: 1e-8,
            lr_max_iter: 5000,
            lda_shrinkage: 1e-6,
            knn_k: 3,
            knn_metric: DistanceMetric::Euclidean,
            svm_c: 1.0,
            svm_epochs: 2000,
            rf_trees: 100,
            rf_max_depth: None,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Inner {
    Logistic(LogisticModel),
    Lda(LdaModel),
    Knn(KnnModel),
    Svm(SvmModel),
    Forest(RandomForest),
}

/// A fitted classifier. Inputs are standardized with the training-split
/// statistics before reaching the underlying model.
#[derive(Debug, Clone, PartialEq)]
pub struct Model {
    kind: ModelKind,
    scaler: Scaler,
    width: usize,
    inner: Inner,
    /// Loss after each gradient step; empty for non-iterative models.
    pub training_loss: Vec<f64>,
}

pub fn train(kind: ModelKind, data: &Dataset, hp: &Hyperparameters) -> Result<Model, ClassifierError> {
    if data.is_empty() {
        return Err(ClassifierError::Empty);
    }
    let present = data.class_counts().iter().filter(|&&c| c > 0).count();
    if present < 2 {
        return Err(ClassifierError::TooFewClasses(present));
    }
    let scaler = Scaler::fit(&data.samples);
    let x = scaler.transform_all(&data.samples);
    let y = &data.labels;
    let k = data.n_classes();
    let mut training_loss = Vec::new();
    let inner = match kind {
        ModelKind::Logistic => {
            let params = LogisticParams {
                lambda: hp.lr_lambda,
                tolerance: hp.lr_tolerance,
                max_iter: hp.lr_max_iter,
            };
            let (m, hist) = LogisticModel::fit(&x, y, k, params);
            training_loss = hist;
            Inner::Logistic(m)
        }
        ModelKind::Lda => Inner::Lda(LdaModel::fit(&x, y, k, hp.lda_shrinkage)),
        ModelKind::Knn => Inner::Knn(KnnModel::fit(&x, y, k, hp.knn_k, hp.knn_metric)),
        ModelKind::Svm => Inner::Svm(SvmModel::fit(&x, y, k, hp.svm_c, hp.svm_epochs)),
        ModelKind::RandomForest => Inner::Forest(RandomForest::fit(
            &x,
            y,
            k,
            ForestParams {
                trees: hp.rf_trees,
                max_depth: hp.rf_max_depth,
                seed: hp.seed,
            },
        )),
    };
    Ok(Model {
        kind,
        scaler,
        width: data.width(),
        inner,
        training_loss,
    })
}

impl Model {
    pub fn kind(&self) -> ModelKind {
        self.kind
    }

    pub fn predict(&self, x: &[f64]) -> Result<usize, ClassifierError> {
        if x.len() != self.width {
            return Err(ClassifierError::WidthMismatch {
                expected: self.width,
                got: x.len(),
            });
        }
        let z = self.scaler.transform(x);
        Ok(match &self.inner {
            Inner::Logistic(m) => argmax_f64(&m.scores(&z)),
            Inner::Lda(m) => argmax_f64(&m.scores(&z)),
            Inner::Knn(m) => m.predict(&z),
            Inner::Svm(m) => argmax_f64(&m.scores(&z)),
            Inner::Forest(m) => argmax_usize(&m.votes(&z)),
        })
    }

    pub fn predict_all(&self, rows: &[Vec<f64>]) -> Result<Vec<usize>, ClassifierError> {
        rows.iter().map(|r| self.predict(r)).collect()
    }
}

/// Index of the largest value; the lowest index wins ties.
pub(crate) fn argmax_f64(v: &[f64]) -> usize {
    let mut best = 0;
    for (i, x) in v.iter().enumerate().skip(1) {
        if *x > v[best] {
            best = i;
        }
    }
    best
}

pub(crate) fn argmax_usize(v: &[usize]) -> usize {
    let mut best = 0;
    for (i, x) in v.iter().enumerate().skip(1) {
        if *x > v[best] {
            best = i;
        }
    }
    best
}

/// Website-level features: element-wise mean of the feature vectors of every
/// script on the site. `None` for a site with no scripts.
pub fn mean_pool(vectors: &[Vec<f64>]) -> Option<Vec<f64>> {
    let first = vectors.first()?;
    let mut acc = vec![0.0; first.len()];
    for v in vectors {
        for (a, x) in acc.iter_mut().zip(v) {
            *a += x;
        }
    }
    let n = vectors.len() as f64;
    Some(acc.into_iter().map(|a| a / n).collect())
}
