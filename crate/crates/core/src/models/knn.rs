use serde::{Deserialize, Serialize};

use super::Dataset;
use crate::error::{Error, Result};
use crate::matrix::{sq_dist, FeatureMatrix};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct KnnParams {
    pub k: usize,
}

impl Default for KnnParams {
    fn default() -> Self {
        Self { k: 5 }
    }
}

/// Euclidean k-nearest-neighbor vote over the stored training set.
///
/// Equal distances are ordered by training index; a split vote goes to the
/// label of the single nearest neighbor.
#[derive(Debug, Clone, PartialEq)]
pub struct NearestNeighbors {
    pub(crate) k: usize,
    pub(crate) x: FeatureMatrix,
    pub(crate) y: Vec<u8>,
}

impl NearestNeighbors {
    pub fn dim(&self) -> usize {
        self.x.cols()
    }

    pub fn neighbors(&self, q: &[f64]) -> Vec<usize> {
        let mut d: Vec<(f64, usize)> = self
            .x
            .iter_rows()
            .enumerate()
            .map(|(i, r)| (sq_dist(r, q), i))
            .collect();
        let cmp = |a: &(f64, usize), b: &(f64, usize)| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1));
        if self.k < d.len() {
            d.select_nth_unstable_by(self.k - 1, cmp);
            d.truncate(self.k);
        }
        d.sort_by(cmp);
        d.into_iter().map(|(_, i)| i).collect()
    }

    pub fn predict_row(&self, q: &[f64]) -> u8 {
        let nn = self.neighbors(q);
        let ones = nn.iter().filter(|&&i| self.y[i] == 1).count();
        let zeros = nn.len() - ones;
        match ones.cmp(&zeros) {
            std::cmp::Ordering::Greater => 1,
            std::cmp::Ordering::Less => 0,
            std::cmp::Ordering::Equal => self.y[nn[0]],
        }
    }
}

pub fn train_knn(data: &Dataset, params: &KnnParams) -> Result<NearestNeighbors> {
    if params.k == 0 || params.k > data.len() {
        return Err(Error::InvalidParameter(format!(
            "k={} must lie in 1..={} (training size)",
            params.k,
            data.len()
        )));
    }
    Ok(NearestNeighbors {
        k: params.k,
        x: data.x().clone(),
        y: data.y().to_vec(),
    })
}
