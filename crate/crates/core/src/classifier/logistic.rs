//! Multinomial logistic regression with L2 penalty, fitted by gradient
//! descent with a backtracking (Armijo) step so every accepted step lowers
//! the loss.

#[derive(Debug, Clone, PartialEq)]
pub struct LogisticModel {
    /// `n_classes` rows of `width + 1` values, bias last.
    weights: Vec<Vec<f64>>,
}

#[derive(Debug, Clone, Copy)]
pub struct LogisticParams {
    pub lambda: f64,
    pub tolerance: f64,
    pub max_iter: usize,
}

impl LogisticModel {
    /// Fits the model and returns the loss after every iteration.
    pub fn fit(x: &[Vec<f64>], y: &[usize], n_classes: usize, p: LogisticParams) -> (Self, Vec<f64>) {
        let d = x.first().map_or(0, Vec::len);
        let mut w = vec![vec![0.0; d + 1]; n_classes];
        let mut loss = objective(&w, x, y, p.lambda);
        let mut history = vec![loss];
        let mut step = 1.0;
        for _ in 0..p.max_iter {
            let g = gradient(&w, x, y, p.lambda);
            let g_norm2: f64 = g.iter().flatten().map(|v| v * v).sum();
            if g_norm2 == 0.0 {
                break;
            }
            step *= 2.0;
            let (next, next_loss) = loop {
                let cand: Vec<Vec<f64>> = w
                    .iter()
                    .zip(&g)
                    .map(|(wr, gr)| wr.iter().zip(gr).map(|(a, b)| a - step * b).collect())
                    .collect();
                let l = objective(&cand, x, y, p.lambda);
                if l <= loss - 0.5 * step * g_norm2 || step < 1e-12 {
                    break (cand, l);
                }
                step *= 0.5;
            };
            if next_loss > loss {
                break;
            }
            let rel = (loss - next_loss) / loss.abs().max(f64::MIN_POSITIVE);
            w = next;
            loss = next_loss;
            history.push(loss);
            if rel < p.tolerance {
                break;
            }
        }
        (Self { weights: w }, history)
    }

    pub fn scores(&self, x: &[f64]) -> Vec<f64> {
        self.weights.iter().map(|w| linear(w, x)).collect()
    }
}

fn linear(w: &[f64], x: &[f64]) -> f64 {
    let d = x.len();
    w[..d].iter().zip(x).map(|(a, b)| a * b).sum::<f64>() + w[d]
}

fn softmax(z: &[f64]) -> Vec<f64> {
    let max = z.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let e: Vec<f64> = z.iter().map(|v| (v - max).exp()).collect();
    let s: f64 = e.iter().sum();
    e.into_iter().map(|v| v / s).collect()
}

fn objective(w: &[Vec<f64>], x: &[Vec<f64>], y: &[usize], lambda: f64) -> f64 {
    let n = x.len() as f64;
    let mut nll = 0.0;
    for (xi, &yi) in x.iter().zip(y) {
        let z: Vec<f64> = w.iter().map(|wk| linear(wk, xi)).collect();
        let max = z.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let lse = max + z.iter().map(|v| (v - max).exp()).sum::<f64>().ln();
        nll += lse - z[yi];
    }
    let d = x.first().map_or(0, Vec::len);
    let penalty: f64 = w.iter().map(|wk| wk[..d].iter().map(|v| v * v).sum::<f64>()).sum();
    nll / n + 0.5 * lambda * penalty
}

fn gradient(w: &[Vec<f64>], x: &[Vec<f64>], y: &[usize], lambda: f64) -> Vec<Vec<f64>> {
    let n = x.len() as f64;
    let d = x.first().map_or(0, Vec::len);
    let mut g = vec![vec![0.0; d + 1]; w.len()];
    for (xi, &yi) in x.iter().zip(y) {
        let z: Vec<f64> = w.iter().map(|wk| linear(wk, xi)).collect();
        let p = softmax(&z);
        for (k, gk) in g.iter_mut().enumerate() {
            let err = p[k] - f64::from(u8::from(k == yi));
            for (gj, xj) in gk[..d].iter_mut().zip(xi) {
                *gj += err * xj / n;
            }
            gk[d] += err / n;
        }
    }
    for (gk, wk) in g.iter_mut().zip(w) {
        for (gj, wj) in gk[..d].iter_mut().zip(&wk[..d]) {
            *gj += lambda * wj;
        }
    }
    g
}
