//! One-vs-rest linear SVM trained by full-batch subgradient descent on the
//! hinge loss (Pegasos schedule). The best iterate by objective is kept.

#[derive(Debug, Clone, PartialEq)]
pub struct SvmModel {
    /// Per class: weights with the bias appended.
    planes: Vec<Vec<f64>>,
}

impl SvmModel {
    pub fn fit(x: &[Vec<f64>], y: &[usize], n_classes: usize, c: f64, epochs: usize) -> Self {
        let planes = (0..n_classes)
            .map(|class| {
                let signs: Vec<f64> = y.iter().map(|&l| if l == class { 1.0 } else { -1.0 }).collect();
                fit_binary(x, &signs, c, epochs)
            })
            .collect();
        Self { planes }
    }

    pub fn scores(&self, x: &[f64]) -> Vec<f64> {
        self.planes.iter().map(|w| decision(w, x)).collect()
    }
}

fn decision(w: &[f64], x: &[f64]) -> f64 {
    let d = x.len();
    w[..d].iter().zip(x).map(|(a, b)| a * b).sum::<f64>() + w[d]
}

/// Minimizes λ/2‖w‖² + mean hinge with λ = 1/(C·n), which has the same
/// minimizer as ½‖w‖² + C·Σ hinge. The bias is an extra, lightly penalized
/// coordinate.
fn fit_binary(x: &[Vec<f64>], s: &[f64], c: f64, epochs: usize) -> Vec<f64> {
    let n = x.len();
    let d = x.first().map_or(0, Vec::len);
    let lambda = 1.0 / (c * n.max(1) as f64);
    let objective = |w: &[f64]| {
        let reg: f64 = w.iter().map(|v| v * v).sum::<f64>() * 0.5 * lambda;
        let hinge: f64 = x
            .iter()
            .zip(s)
            .map(|(xi, si)| (1.0 - si * decision(w, xi)).max(0.0))
            .sum::<f64>()
            / n.max(1) as f64;
        reg + hinge
    };
    let radius = 1.0 / lambda.sqrt();
    let mut w = vec![0.0; d + 1];
    let mut best = (objective(&w), w.clone());
    for t in 1..=epochs {
        let eta = 1.0 / (lambda * t as f64);
        let mut g: Vec<f64> = w.iter().map(|v| lambda * v).collect();
        for (xi, si) in x.iter().zip(s) {
            if si * decision(&w, xi) < 1.0 {
                for (gj, xj) in g[..d].iter_mut().zip(xi) {
                    *gj -= si * xj / n as f64;
                }
                g[d] -= si / n as f64;
            }
        }
        for (wj, gj) in w.iter_mut().zip(&g) {
            *wj -= eta * gj;
        }
        let norm = w.iter().map(|v| v * v).sum::<f64>().sqrt();
        if norm > radius {
            w.iter_mut().for_each(|v| *v *= radius / norm);
        }
        let obj = objective(&w);
        if obj < best.0 {
            best = (obj, w.clone());
        }
    }
    best.1
}
