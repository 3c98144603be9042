//! Random forest of Gini CART trees on bootstrap samples with √d features
//! tried per split.

use rand::seq::index;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[derive(Debug, Clone, PartialEq)]
enum Node {
    Leaf(usize),
    Split {
        feature: usize,
        threshold: f64,
        left: usize,
        right: usize,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct DecisionTree {
    nodes: Vec<Node>,
}

impl DecisionTree {
    pub fn predict(&self, x: &[f64]) -> usize {
        let mut i = 0;
        loop {
            match &self.nodes[i] {
                Node::Leaf(c) => return *c,
                Node::Split {
                    feature,
                    threshold,
                    left,
                    right,
                } => i = if x[*feature] <= *threshold { *left } else { *right },
            }
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct ForestParams {
    pub trees: usize,
    pub max_depth: Option<usize>,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RandomForest {
    trees: Vec<DecisionTree>,
    n_classes: usize,
}

impl RandomForest {
    pub fn fit(x: &[Vec<f64>], y: &[usize], n_classes: usize, p: ForestParams) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(p.seed);
        let d = x.first().map_or(0, Vec::len);
        let mtry = ((d as f64).sqrt().floor() as usize).clamp(1, d.max(1));
        let n = x.len();
        let trees = (0..p.trees)
            .map(|_| {
                let sample: Vec<usize> = (0..n).map(|_| rng.random_range(0..n)).collect();
                let mut builder = TreeBuilder {
                    x,
                    y,
                    n_classes,
                    mtry,
                    max_depth: p.max_depth,
                    rng: &mut rng,
                    nodes: Vec::new(),
                };
                builder.grow(sample, 0);
                DecisionTree { nodes: builder.nodes }
            })
            .collect();
        Self { trees, n_classes }
    }

    pub fn votes(&self, x: &[f64]) -> Vec<usize> {
        let mut votes = vec![0; self.n_classes];
        for t in &self.trees {
            votes[t.predict(x)] += 1;
        }
        votes
    }
}

struct TreeBuilder<'a, R: Rng> {
    x: &'a [Vec<f64>],
    y: &'a [usize],
    n_classes: usize,
    mtry: usize,
    max_depth: Option<usize>,
    rng: &'a mut R,
    nodes: Vec<Node>,
}

fn gini(counts: &[usize], total: usize) -> f64 {
    if total == 0 {
        return 0.0;
    }
    let t = total as f64;
    1.0 - counts.iter().map(|&c| (c as f64 / t).powi(2)).sum::<f64>()
}

impl<R: Rng> TreeBuilder<'_, R> {
    fn grow(&mut self, idx: Vec<usize>, depth: usize) -> usize {
        let me = self.nodes.len();
        self.nodes.push(Node::Leaf(0));
        let mut counts = vec![0usize; self.n_classes];
        for &i in &idx {
            counts[self.y[i]] += 1;
        }
        let majority = super::argmax_usize(&counts);
        let pure = counts.iter().filter(|&&c| c > 0).count() <= 1;
        let depth_capped = self.max_depth.is_some_and(|m| depth >= m);
        if pure || depth_capped || idx.len() < 2 {
            self.nodes[me] = Node::Leaf(majority);
            return me;
        }
        let Some((feature, threshold)) = self.best_split(&idx, &counts) else {
            self.nodes[me] = Node::Leaf(majority);
            return me;
        };
        let (l, r): (Vec<usize>, Vec<usize>) = idx.iter().partition(|&&i| self.x[i][feature] <= threshold);
        let left = self.grow(l, depth + 1);
        let right = self.grow(r, depth + 1);
        self.nodes[me] = Node::Split {
            feature,
            threshold,
            left,
            right,
        };
        me
    }

    fn best_split(&mut self, idx: &[usize], counts: &[usize]) -> Option<(usize, f64)> {
        let d = self.x[0].len();
        let parent = gini(counts, idx.len());
        let mut best: Option<(f64, usize, f64)> = None;
        let mut features = index::sample(self.rng, d, self.mtry).into_vec();
        features.sort_unstable();
        for f in features {
            let mut order: Vec<usize> = idx.to_vec();
            order.sort_by(|&a, &b| self.x[a][f].total_cmp(&self.x[b][f]));
            let mut left = vec![0usize; self.n_classes];
            let mut right = counts.to_vec();
            for k in 0..order.len() - 1 {
                let c = self.y[order[k]];
                left[c] += 1;
                right[c] -= 1;
                let (v, next) = (self.x[order[k]][f], self.x[order[k + 1]][f]);
                if v == next {
                    continue;
                }
                let nl = k + 1;
                let nr = order.len() - nl;
                let impurity = (nl as f64 * gini(&left, nl) + nr as f64 * gini(&right, nr)) / order.len() as f64;
                let gain = parent - impurity;
                if gain > 1e-12 && best.is_none_or(|(g, _, _)| gain > g) {
                    best = Some((gain, f, 0.5 * (v + next)));
                }
            }
        }
        best.map(|(_, f, t)| (f, t))
    }
}
