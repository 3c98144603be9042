use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::{train, ClassifierError, Dataset, Hyperparameters, ModelKind};

/// Repeated stratified holdout.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Protocol {
    /// Fraction of each class used for training.
    pub split: f64,
    pub repetitions: usize,
    pub seed: u64,
}

impl Default for Protocol {
    fn default() -> Self {
        Self {
            split: 0.75,
            repetitions: 20,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModelScore {
    pub kind: ModelKind,
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EvaluationReport {
    pub scores: Vec<ModelScore>,
    pub repetitions: usize,
    pub split: f64,
    pub seed: u64,
}

impl EvaluationReport {
    pub fn score(&self, kind: ModelKind) -> Option<&ModelScore> {
        self.scores.iter().find(|s| s.kind == kind)
    }

    /// `model,F1,precision,recall` rows.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("model,F1,precision,recall\n");
        for s in &self.scores {
            out.push_str(&format!("{},{:.4},{:.4},{:.4}\n", s.kind, s.f1, s.precision, s.recall));
        }
        out
    }
}

/// Per-class and macro-averaged precision, recall and F1.
#[derive(Debug, Clone, PartialEq)]
pub struct ClassScores {
    pub precision: Vec<f64>,
    pub recall: Vec<f64>,
    pub f1: Vec<f64>,
}

impl ClassScores {
    pub fn macro_precision(&self) -> f64 {
        mean(&self.precision)
    }

    pub fn macro_recall(&self) -> f64 {
        mean(&self.recall)
    }

    pub fn macro_f1(&self) -> f64 {
        mean(&self.f1)
    }
}

fn mean(v: &[f64]) -> f64 {
    if v.is_empty() {
        0.0
    } else {
        v.iter().sum::<f64>() / v.len() as f64
    }
}

/// Scores over all `n_classes`. A class never predicted has precision 0; a
/// class with precision + recall = 0 has F1 0.
pub fn macro_scores(truth: &[usize], predicted: &[usize], n_classes: usize) -> ClassScores {
    let mut tp = vec![0usize; n_classes];
    let mut pred = vec![0usize; n_classes];
    let mut actual = vec![0usize; n_classes];
    for (&t, &p) in truth.iter().zip(predicted) {
        actual[t] += 1;
        pred[p] += 1;
        if t == p {
            tp[t] += 1;
        }
    }
    let ratio = |a: usize, b: usize| if b == 0 { 0.0 } else { a as f64 / b as f64 };
    let precision: Vec<f64> = (0..n_classes).map(|c| ratio(tp[c], pred[c])).collect();
    let recall: Vec<f64> = (0..n_classes).map(|c| ratio(tp[c], actual[c])).collect();
    let f1 = precision
        .iter()
        .zip(&recall)
        .map(|(p, r)| if p + r == 0.0 { 0.0 } else { 2.0 * p * r / (p + r) })
        .collect();
    ClassScores { precision, recall, f1 }
}

/// Shuffles each class and puts `round(split · n_c)` of it in the training
/// set, keeping at least one sample on each side.
pub fn stratified_split(data: &Dataset, split: f64, rng: &mut ChaCha8Rng) -> Result<(Vec<usize>, Vec<usize>), ClassifierError> {
    if !(split > 0.0 && split < 1.0) {
        return Err(ClassifierError::BadSplit(split));
    }
    let mut train = Vec::new();
    let mut test = Vec::new();
    for c in 0..data.n_classes() {
        let mut idx: Vec<usize> = (0..data.len()).filter(|&i| data.labels[i] == c).collect();
        if idx.is_empty() {
            continue;
        }
        if idx.len() < 2 {
            return Err(ClassifierError::ClassTooSmall(data.class_names[c].clone()));
        }
        idx.shuffle(rng);
        let n_train = ((idx.len() as f64 * split).round() as usize).clamp(1, idx.len() - 1);
        train.extend_from_slice(&idx[..n_train]);
        test.extend_from_slice(&idx[n_train..]);
    }
    train.sort_unstable();
    test.sort_unstable();
    Ok((train, test))
}

/// Seed of repetition `rep`, derived from the base seed (SplitMix64 step).
fn repetition_seed(base: u64, rep: usize) -> u64 {
    let mut z = base.wrapping_add((rep as u64 + 1).wrapping_mul(0x9E37_79B9_7F4A_7C15));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Runs every model kind through `protocol.repetitions` stratified splits
/// and averages macro precision, recall and F1. Repetitions run in parallel
/// and are merged in repetition order, so the report depends only on the
/// inputs.
pub fn evaluate(
    data: &Dataset,
    kinds: &[ModelKind],
    hp: &Hyperparameters,
    protocol: &Protocol,
) -> Result<EvaluationReport, ClassifierError> {
    for (c, &n) in data.class_counts().iter().enumerate() {
        if n == 1 {
            return Err(ClassifierError::ClassTooSmall(data.class_names[c].clone()));
        }
    }
    let per_rep: Vec<Vec<(f64, f64, f64)>> = (0..protocol.repetitions)
        .into_par_iter()
        .map(|rep| {
            let seed = repetition_seed(protocol.seed, rep);
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let (tr, te) = stratified_split(data, protocol.split, &mut rng)?;
            let train_set = data.subset(&tr);
            let test_set = data.subset(&te);
            let rep_hp = Hyperparameters { seed, ..*hp };
            kinds
                .iter()
                .map(|&kind| {
                    let model = train(kind, &train_set, &rep_hp)?;
                    let pred = model.predict_all(&test_set.samples)?;
                    let s = macro_scores(&test_set.labels, &pred, data.n_classes());
                    Ok((s.macro_precision(), s.macro_recall(), s.macro_f1()))
                })
                .collect()
        })
        .collect::<Result<_, ClassifierError>>()?;

    let reps = per_rep.len().max(1) as f64;
    let scores = kinds
        .iter()
        .enumerate()
        .map(|(k, &kind)| {
            let (p, r, f) = per_rep
                .iter()
                .fold((0.0, 0.0, 0.0), |acc, rep| (acc.0 + rep[k].0, acc.1 + rep[k].1, acc.2 + rep[k].2));
            ModelScore {
                kind,
                precision: p / reps,
                recall: r / reps,
                f1: f / reps,
            }
        })
        .collect();
    Ok(EvaluationReport {
        scores,
        repetitions: protocol.repetitions,
        split: protocol.split,
        seed: protocol.seed,
    })
}
