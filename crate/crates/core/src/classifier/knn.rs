use std::str::FromStr;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum DistanceMetric {
    #[default]
    Euclidean,
    Manhattan,
}

impl FromStr for DistanceMetric {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "euclidean" => Ok(Self::Euclidean),
            "manhattan" => Ok(Self::Manhattan),
            other => Err(format!("unknown distance metric {other:?}")),
        }
    }
}

impl DistanceMetric {
    pub fn distance(self, a: &[f64], b: &[f64]) -> f64 {
        match self {
            Self::Euclidean => a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt(),
            Self::Manhattan => a.iter().zip(b).map(|(x, y)| (x - y).abs()).sum(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct KnnModel {
    points: Vec<Vec<f64>>,
    labels: Vec<usize>,
    n_classes: usize,
    k: usize,
    metric: DistanceMetric,
}

impl KnnModel {
    pub fn fit(x: &[Vec<f64>], y: &[usize], n_classes: usize, k: usize, metric: DistanceMetric) -> Self {
        Self {
            points: x.to_vec(),
            labels: y.to_vec(),
            n_classes,
            k: k.max(1),
            metric,
        }
    }

    /// Majority vote of the k nearest points; equal distances resolve by
    /// training order, equal votes by smallest class id.
    pub fn predict(&self, x: &[f64]) -> usize {
        let mut dist: Vec<(f64, usize)> = self
            .points
            .iter()
            .enumerate()
            .map(|(i, p)| (self.metric.distance(p, x), i))
            .collect();
        dist.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
        let mut votes = vec![0usize; self.n_classes];
        for &(_, i) in dist.iter().take(self.k) {
            votes[self.labels[i]] += 1;
        }
        super::argmax_usize(&votes)
    }
}
