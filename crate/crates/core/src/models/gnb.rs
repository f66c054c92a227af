use std::f64::consts::PI;

use super::Dataset;
use crate::error::Result;
use crate::matrix::sigmoid;

/// Gaussian naive Bayes with per-class, per-feature means and variances.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussianNb {
    pub(crate) log_prior: [f64; 2],
    pub(crate) mean: [Vec<f64>; 2],
    pub(crate) var: [Vec<f64>; 2],
}

impl GaussianNb {
    pub fn dim(&self) -> usize {
        self.mean[0].len()
    }

    fn log_joint(&self, c: usize, x: &[f64]) -> f64 {
        let mut s = self.log_prior[c];
        for ((xi, mu), var) in x.iter().zip(&self.mean[c]).zip(&self.var[c]) {
            s -= 0.5 * (2.0 * PI * var).ln() + (xi - mu) * (xi - mu) / (2.0 * var);
        }
        s
    }

    /// Log-posterior margin of class 1 over class 0.
    pub fn margin(&self, x: &[f64]) -> f64 {
        self.log_joint(1, x) - self.log_joint(0, x)
    }

    pub fn proba_row(&self, x: &[f64]) -> f64 {
        sigmoid(self.margin(x))
    }

    pub fn predict_row(&self, x: &[f64]) -> u8 {
        u8::from(self.margin(x) >= 0.0)
    }
}

pub fn train_gnb(data: &Dataset, variance_floor: f64) -> Result<GaussianNb> {
    data.require_both_classes()?;
    let d = data.dim();
    let counts = data.class_counts();
    let mut mean = [vec![0.0; d], vec![0.0; d]];
    for (x, &y) in data.x().iter_rows().zip(data.y()) {
        for (m, v) in mean[y as usize].iter_mut().zip(x) {
            *m += v;
        }
    }
    for c in 0..2 {
        mean[c].iter_mut().for_each(|m| *m /= counts[c] as f64);
    }
    let mut var = [vec![0.0; d], vec![0.0; d]];
    for (x, &y) in data.x().iter_rows().zip(data.y()) {
        let c = y as usize;
        for ((s, v), m) in var[c].iter_mut().zip(x).zip(&mean[c]) {
            *s += (v - m) * (v - m);
        }
    }
    for c in 0..2 {
        var[c]
            .iter_mut()
            .for_each(|s| *s = (*s / counts[c] as f64).max(variance_floor));
    }
    let n = data.len() as f64;
    Ok(GaussianNb {
        log_prior: [(counts[0] as f64 / n).ln(), (counts[1] as f64 / n).ln()],
        mean,
        var,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::error::Error;
    use crate::matrix::FeatureMatrix;

    fn ds(rows: &[[f64; 2]], y: &[u8]) -> Dataset {
        Dataset::new(FeatureMatrix::from_rows(rows, 2).unwrap(), y.to_vec()).unwrap()
    }

    #[test]
    fn picks_the_nearer_class() {
        let d = ds(&[[-3.0, 0.0], [-1.0, 0.0], [1.0, 0.0], [3.0, 0.0]], &[0, 0, 1, 1]);
        let m = train_gnb(&d, 1e-9).unwrap();
        assert_eq!(m.predict_row(&[2.0, 0.0]), 1);
        assert_eq!(m.predict_row(&[-2.0, 0.0]), 0);
    }

    #[test]
    fn constant_feature_uses_floor_and_cancels() {
        let d = ds(&[[-3.0, 7.0], [-1.0, 7.0], [1.0, 7.0], [3.0, 7.0]], &[0, 0, 1, 1]);
        let m = train_gnb(&d, 1e-9).unwrap();
        assert_eq!(m.var[0][1], 1e-9);
        assert_eq!(m.var[1][1], 1e-9);
        let with = m.margin(&[0.5, 7.0]);
        let without = train_gnb(
            &Dataset::new(
                FeatureMatrix::from_rows(&[[-3.0], [-1.0], [1.0], [3.0]], 1).unwrap(),
                vec![0, 0, 1, 1],
            )
            .unwrap(),
            1e-9,
        )
        .unwrap()
        .margin(&[0.5]);
        assert!((with - without).abs() < 1e-12);
    }

    #[test]
    fn single_class_is_degenerate() {
        let d = ds(&[[0.0, 0.0], [1.0, 1.0]], &[1, 1]);
        assert!(matches!(train_gnb(&d, 1e-9), Err(Error::DegenerateClasses)));
    }
}
