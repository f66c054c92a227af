use serde::{Deserialize, Serialize};

use super::Dataset;
use crate::error::{Error, Result};
use crate::matrix::{axpy, dot, norm, sigmoid, softplus};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LogRegParams {
    /// Step size in units of the inverse curvature bound `1 / L`, where
    /// `L = mean‖[x - x̄, 1]‖² / 4 + l2`. Values up to 2 are guaranteed to descend.
    pub learning_rate: f64,
    pub epochs: usize,
    pub l2: f64,
    /// Stop once the gradient norm falls below this.
    pub tolerance: f64,
}

impl Default for LogRegParams {
    fn default() -> Self {
        Self {
            learning_rate: 1.0,
            epochs: 1000,
            l2: 1e-3,
            tolerance: 1e-6,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LogisticRegression {
    pub weights: Vec<f64>,
    pub bias: f64,
}

impl LogisticRegression {
    pub fn proba_row(&self, x: &[f64]) -> f64 {
        sigmoid(dot(&self.weights, x) + self.bias)
    }

    pub fn predict_row(&self, x: &[f64]) -> u8 {
        u8::from(self.proba_row(x) >= 0.5)
    }
}

/// Mean binary cross-entropy plus `(l2 / 2)‖w‖²`, with its gradient.
pub fn logreg_loss_and_grad(weights: &[f64], bias: f64, data: &Dataset, l2: f64) -> Result<(f64, Vec<f64>, f64)> {
    if weights.len() != data.dim() {
        return Err(Error::DimensionMismatch {
            expected: data.dim(),
            got: weights.len(),
        });
    }
    let n = data.len() as f64;
    let mut loss = 0.0;
    let mut gw = vec![0.0; weights.len()];
    let mut gb = 0.0;
    for (x, &y) in data.x().iter_rows().zip(data.y()) {
        let z = dot(weights, x) + bias;
        let y = f64::from(y);
        // -[y ln σ(z) + (1-y) ln(1-σ(z))] = softplus(z) - y z
        loss += softplus(z) - y * z;
        let r = sigmoid(z) - y;
        axpy(r / n, x, &mut gw);
        gb += r / n;
    }
    loss /= n;
    loss += 0.5 * l2 * dot(weights, weights);
    axpy(l2, weights, &mut gw);
    Ok((loss, gw, gb))
}

/// Full-batch gradient descent from zero on centered features (an exact
/// reparametrization, since the bias is unpenalized).
pub fn train_logreg(data: &Dataset, params: &LogRegParams) -> Result<LogisticRegression> {
    let mean = data.x().column_means();
    let centered = Dataset::new(data.x().centered(&mean), data.y().to_vec())?;
    let curvature = 0.25 * (centered.x().mean_sq_row_norm() + 1.0) + params.l2;
    let step = params.learning_rate / curvature;
    let mut w = vec![0.0; data.dim()];
    let mut b = 0.0;
    for _ in 0..params.epochs {
        let (loss, gw, gb) = logreg_loss_and_grad(&w, b, &centered, params.l2)?;
        if !loss.is_finite() {
            return Err(Error::NonFinite { what: "logistic loss" });
        }
        if (norm(&gw).powi(2) + gb * gb).sqrt() < params.tolerance {
            break;
        }
        axpy(-step, &gw, &mut w);
        b -= step * gb;
    }
    let b = b - dot(&w, &mean);
    if !b.is_finite() || w.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite { what: "logistic weights" });
    }
    Ok(LogisticRegression { weights: w, bias: b })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::FeatureMatrix;

    fn data(rows: &[&[f64]], y: &[u8]) -> Dataset {
        let d = rows[0].len();
        Dataset::new(FeatureMatrix::from_rows(rows, d).unwrap(), y.to_vec()).unwrap()
    }

    #[test]
    fn zero_weights_on_balanced_data() {
        let ds = data(&[&[1.0, 2.0], &[-3.0, 0.5]], &[0, 1]);
        let (loss, _, gb) = logreg_loss_and_grad(&[0.0, 0.0], 0.0, &ds, 0.0).unwrap();
        assert!((loss - std::f64::consts::LN_2).abs() < 1e-15);
        assert_eq!(gb, 0.0);
    }

    #[test]
    fn large_penalty_dominates() {
        let ds = data(&[&[1.0], &[-1.0]], &[0, 1]);
        let (loss, _, _) = logreg_loss_and_grad(&[2.0], 0.0, &ds, 1e6).unwrap();
        let penalty = 0.5 * 1e6 * 4.0;
        assert!((loss - penalty).abs() / penalty < 1e-5);
    }

    #[test]
    fn one_dimensional_direction() {
        let ds = data(&[&[-1.0], &[1.0]], &[0, 1]);
        let m = train_logreg(&ds, &LogRegParams::default()).unwrap();
        assert!(m.weights[0] > 0.0);
        assert_eq!(m.predict_row(&[-1.0]), 0);
        assert_eq!(m.predict_row(&[1.0]), 1);
    }

    #[test]
    fn exploding_rate_reports_non_finite() {
        let ds = data(&[&[-1e150], &[1e150]], &[0, 1]);
        let p = LogRegParams {
            learning_rate: 1e308,
            l2: 0.0,
            ..Default::default()
        };
        assert!(matches!(train_logreg(&ds, &p), Err(Error::NonFinite { .. })));
    }
}
