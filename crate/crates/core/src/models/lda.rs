use super::Dataset;
use crate::error::Result;
use crate::matrix::sigmoid;

/// Two-class LDA with a diagonal pooled covariance.
///
/// The discriminant difference is kept in centered form,
/// `Σ_j w_j (x_j - m_j) + ln(p1/p0)` with `w_j = (μ1_j - μ0_j)/σ²_j` and
/// `m_j = (μ0_j + μ1_j)/2`, which is what makes it invariant to translating
/// the features.
#[derive(Debug, Clone, PartialEq)]
pub struct DiagonalLda {
    pub(crate) weights: Vec<f64>,
    pub(crate) midpoint: Vec<f64>,
    pub(crate) log_prior_ratio: f64,
}

impl DiagonalLda {
    pub fn score(&self, x: &[f64]) -> f64 {
        self.weights
            .iter()
            .zip(&self.midpoint)
            .zip(x)
            .map(|((w, m), xi)| w * (xi - m))
            .sum::<f64>()
            + self.log_prior_ratio
    }

    pub fn proba_row(&self, x: &[f64]) -> f64 {
        sigmoid(self.score(x))
    }

    /// Ties go to class 0.
    pub fn predict_row(&self, x: &[f64]) -> u8 {
        u8::from(self.score(x) > 0.0)
    }
}

pub fn train_lda(data: &Dataset, variance_floor: f64) -> Result<DiagonalLda> {
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
    let mut pooled = vec![0.0; d];
    for (x, &y) in data.x().iter_rows().zip(data.y()) {
        for ((s, v), m) in pooled.iter_mut().zip(x).zip(&mean[y as usize]) {
            *s += (v - m) * (v - m);
        }
    }
    let n = data.len();
    let dof = if n > 2 { n - 2 } else { n } as f64;
    pooled.iter_mut().for_each(|s| *s = (*s / dof).max(variance_floor));

    let weights = (0..d).map(|j| (mean[1][j] - mean[0][j]) / pooled[j]).collect();
    let midpoint = (0..d).map(|j| 0.5 * (mean[0][j] + mean[1][j])).collect();
    Ok(DiagonalLda {
        weights,
        midpoint,
        log_prior_ratio: (counts[1] as f64 / counts[0] as f64).ln(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::error::Error;
    use crate::matrix::FeatureMatrix;

    fn ds(xs: &[f64], y: &[u8]) -> Dataset {
        let rows: Vec<[f64; 1]> = xs.iter().map(|&x| [x]).collect();
        Dataset::new(FeatureMatrix::from_rows(&rows, 1).unwrap(), y.to_vec()).unwrap()
    }

    #[test]
    fn separates_symmetric_means() {
        let m = train_lda(&ds(&[-1.5, -0.5, 0.5, 1.5], &[0, 0, 1, 1]), 1e-9).unwrap();
        assert_eq!(m.predict_row(&[0.9]), 1);
        assert_eq!(m.predict_row(&[-0.9]), 0);
    }

    #[test]
    fn tie_goes_to_class_zero() {
        let m = train_lda(&ds(&[-1.0, 1.0, -1.0, 1.0], &[0, 0, 1, 1]), 1e-9).unwrap();
        assert_eq!(m.score(&[0.3]), 0.0);
        assert_eq!(m.predict_row(&[0.3]), 0);
        assert_eq!(m.proba_row(&[0.3]), 0.5);
    }

    #[test]
    fn single_class_is_degenerate() {
        assert!(matches!(
            train_lda(&ds(&[1.0, 2.0], &[0, 0]), 1e-9),
            Err(Error::DegenerateClasses)
        ));
    }
}
