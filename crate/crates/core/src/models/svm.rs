use serde::{Deserialize, Serialize};

use super::Dataset;
use crate::error::{Error, Result};
use crate::matrix::{axpy, dot};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SvmParams {
    /// Offset `γ₀` of the step target, in objective units (the objective
    /// is 1 at `w = 0`). Iteration `t` steps `(f - f_best + γ₀/√t) / ‖g‖²`.
    pub learning_rate: f64,
    pub epochs: usize,
    pub l2: f64,
}

impl Default for SvmParams {
    fn default() -> Self {
        Self {
            learning_rate: 0.1,
            epochs: 1000,
            l2: 1e-3,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LinearSvm {
    pub weights: Vec<f64>,
    pub bias: f64,
}

impl LinearSvm {
    pub fn decision(&self, x: &[f64]) -> f64 {
        dot(&self.weights, x) + self.bias
    }

    /// `sign(w·x + b)` with zero mapped to class 1.
    pub fn predict_row(&self, x: &[f64]) -> u8 {
        u8::from(self.decision(x) >= 0.0)
    }
}

/// `(l2/2)‖w‖² + mean max(0, 1 - y(w·x + b))` with labels mapped to ±1,
/// and a subgradient. Points with margin exactly 1 contribute nothing.
pub fn svm_objective_and_subgradient(
    weights: &[f64],
    bias: f64,
    data: &Dataset,
    l2: f64,
) -> Result<(f64, Vec<f64>, f64)> {
    if weights.len() != data.dim() {
        return Err(Error::DimensionMismatch {
            expected: data.dim(),
            got: weights.len(),
        });
    }
    let n = data.len() as f64;
    let mut obj = 0.5 * l2 * dot(weights, weights);
    let mut gw: Vec<f64> = weights.iter().map(|w| l2 * w).collect();
    let mut gb = 0.0;
    for (x, &label) in data.x().iter_rows().zip(data.y()) {
        let y = if label == 1 { 1.0 } else { -1.0 };
        let margin = y * (dot(weights, x) + bias);
        if margin < 1.0 {
            obj += (1.0 - margin) / n;
            axpy(-y / n, x, &mut gw);
            gb -= y / n;
        }
    }
    Ok((obj, gw, gb))
}

/// Full-batch subgradient descent with Polyak steps against an estimated
/// optimum; returns the iterate with the lowest objective seen.
///
/// Features are centered first. The bias is unpenalized, so this is an
/// exact reparametrization, and the bias is mapped back at the end.
pub fn train_svm(data: &Dataset, params: &SvmParams) -> Result<LinearSvm> {
    let mean = data.x().column_means();
    let centered = Dataset::new(data.x().centered(&mean), data.y().to_vec())?;
    let mut w = vec![0.0; data.dim()];
    let mut b = 0.0;
    let mut best = (f64::INFINITY, w.clone(), b);
    for t in 1..=params.epochs {
        let (obj, gw, gb) = svm_objective_and_subgradient(&w, b, &centered, params.l2)?;
        if !obj.is_finite() {
            return Err(Error::NonFinite { what: "hinge objective" });
        }
        if obj < best.0 {
            best = (obj, w.clone(), b);
        }
        let gg = dot(&gw, &gw) + gb * gb;
        if gg == 0.0 {
            break;
        }
        let step = (obj - best.0 + params.learning_rate / (t as f64).sqrt()) / gg;
        axpy(-step, &gw, &mut w);
        b -= step * gb;
    }
    let (obj, _, _) = svm_objective_and_subgradient(&w, b, &centered, params.l2)?;
    if obj.is_finite() && obj < best.0 {
        best = (obj, w, b);
    }
    let (_, weights, bias) = best;
    let bias = bias - dot(&weights, &mean);
    if !bias.is_finite() || weights.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite { what: "svm weights" });
    }
    Ok(LinearSvm { weights, bias })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::FeatureMatrix;

    fn ds(xs: &[f64], y: &[u8]) -> Dataset {
        let rows: Vec<[f64; 1]> = xs.iter().map(|&x| [x]).collect();
        Dataset::new(FeatureMatrix::from_rows(&rows, 1).unwrap(), y.to_vec()).unwrap()
    }

    #[test]
    fn separable_line() {
        let d = ds(&[-2.0, 2.0], &[0, 1]);
        let m = train_svm(&d, &SvmParams::default()).unwrap();
        assert!(m.weights[0] > 0.0);
        assert_eq!(m.predict_row(&[-2.0]), 0);
        assert_eq!(m.predict_row(&[2.0]), 1);
    }

    #[test]
    fn flat_region_leaves_only_regularizer() {
        // both points have margin 4 > 1
        let d = ds(&[-2.0, 2.0], &[0, 1]);
        let w = [2.0];
        let (obj, gw, gb) = svm_objective_and_subgradient(&w, 0.0, &d, 0.1).unwrap();
        assert_eq!(gw, vec![0.1 * 2.0]);
        assert_eq!(gb, 0.0);
        assert!((obj - 0.5 * 0.1 * 4.0).abs() < 1e-15);
    }

    #[test]
    fn zero_decision_is_class_one() {
        let m = LinearSvm {
            weights: vec![0.0],
            bias: 0.0,
        };
        assert_eq!(m.predict_row(&[3.0]), 1);
    }
}
