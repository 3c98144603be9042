use nalgebra::{DMatrix, DVector};

/// Linear discriminant analysis with a pooled, ridge-regularized covariance.
#[derive(Debug, Clone, PartialEq)]
pub struct LdaModel {
    /// Σ⁻¹ μ_k per class
    coef: Vec<DVector<f64>>,
    /// −½ μ_kᵀ Σ⁻¹ μ_k + ln π_k per class
    intercept: Vec<f64>,
}

impl LdaModel {
    /// `shrinkage` scales the ridge: ε = shrinkage · trace(Σ) / d.
    pub fn fit(x: &[Vec<f64>], y: &[usize], n_classes: usize, shrinkage: f64) -> Self {
        let n = x.len();
        let d = x.first().map_or(0, Vec::len);
        let mut counts = vec![0usize; n_classes];
        let mut means = vec![DVector::<f64>::zeros(d); n_classes];
        for (xi, &yi) in x.iter().zip(y) {
            counts[yi] += 1;
            means[yi] += DVector::from_column_slice(xi);
        }
        for (m, &c) in means.iter_mut().zip(&counts) {
            if c > 0 {
                *m /= c as f64;
            }
        }
        let mut cov = DMatrix::<f64>::zeros(d, d);
        for (xi, &yi) in x.iter().zip(y) {
            let dev = DVector::from_column_slice(xi) - &means[yi];
            cov += &dev * dev.transpose();
        }
        let present = counts.iter().filter(|&&c| c > 0).count();
        let dof = n.saturating_sub(present).max(1) as f64;
        cov /= dof;

        let trace = cov.trace();
        let mut eps = if trace > 0.0 { shrinkage * trace / d.max(1) as f64 } else { shrinkage };
        let chol = loop {
            let mut reg = cov.clone();
            for i in 0..d {
                reg[(i, i)] += eps;
            }
            if let Some(c) = reg.cholesky() {
                break c;
            }
            eps = (eps * 10.0).max(1e-12);
        };

        let mut coef = Vec::with_capacity(n_classes);
        let mut intercept = Vec::with_capacity(n_classes);
        for (m, &c) in means.iter().zip(&counts) {
            let a = chol.solve(m);
            let prior = c as f64 / n.max(1) as f64;
            let log_prior = if c > 0 { prior.ln() } else { f64::NEG_INFINITY };
            intercept.push(-0.5 * m.dot(&a) + log_prior);
            coef.push(a);
        }
        Self { coef, intercept }
    }

    pub fn scores(&self, x: &[f64]) -> Vec<f64> {
        let xv = DVector::from_column_slice(x);
        self.coef
            .iter()
            .zip(&self.intercept)
            .map(|(a, b)| a.dot(&xv) + b)
            .collect()
    }
}
