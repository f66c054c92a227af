//! One-hidden-layer perceptron: `D -> hidden (ReLU) -> 1 (sigmoid)`.

use rand::distributions::{Distribution, Uniform};
use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use super::Dataset;
use crate::error::{Error, Result};
use crate::matrix::{dot, sigmoid, softplus};
use crate::util::rng_from_seed;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MlpParams {
    pub hidden_size: usize,
    pub learning_rate: f64,
    pub epochs: usize,
    pub batch_size: usize,
    /// Global gradient-norm clip per step; 0 disables clipping.
    pub clip_norm: f64,
}

impl Default for MlpParams {
    fn default() -> Self {
        Self {
            hidden_size: 16,
            learning_rate: 0.05,
            epochs: 100,
            batch_size: 32,
            clip_norm: 5.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Mlp {
    pub(crate) input_dim: usize,
    pub(crate) hidden: usize,
    /// `hidden x input_dim`, row-major.
    pub(crate) w1: Vec<f64>,
    pub(crate) b1: Vec<f64>,
    pub(crate) w2: Vec<f64>,
    pub(crate) b2: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MlpGradients {
    pub w1: Vec<f64>,
    pub b1: Vec<f64>,
    pub w2: Vec<f64>,
    pub b2: f64,
}

impl MlpGradients {
    fn zeros(m: &Mlp) -> Self {
        Self {
            w1: vec![0.0; m.w1.len()],
            b1: vec![0.0; m.hidden],
            w2: vec![0.0; m.hidden],
            b2: 0.0,
        }
    }

    fn norm(&self) -> f64 {
        let s: f64 = self
            .w1
            .iter()
            .chain(&self.b1)
            .chain(&self.w2)
            .map(|g| g * g)
            .sum();
        (s + self.b2 * self.b2).sqrt()
    }

    /// All gradients flattened in the order `w1, b1, w2, b2`.
    pub fn flatten(&self) -> Vec<f64> {
        let mut v = self.w1.clone();
        v.extend(&self.b1);
        v.extend(&self.w2);
        v.push(self.b2);
        v
    }
}

impl Mlp {
    pub fn zeros(input_dim: usize, hidden: usize) -> Self {
        Self {
            input_dim,
            hidden,
            w1: vec![0.0; hidden * input_dim],
            b1: vec![0.0; hidden],
            w2: vec![0.0; hidden],
            b2: 0.0,
        }
    }

    /// Glorot-uniform weights, zero biases.
    pub fn init(input_dim: usize, hidden: usize, seed: u64) -> Self {
        let mut rng = rng_from_seed(seed);
        let a1 = (6.0 / (input_dim + hidden) as f64).sqrt();
        let a2 = (6.0 / (hidden + 1) as f64).sqrt();
        let u1 = Uniform::new_inclusive(-a1, a1);
        let u2 = Uniform::new_inclusive(-a2, a2);
        let mut m = Self::zeros(input_dim, hidden);
        m.w1.iter_mut().for_each(|w| *w = u1.sample(&mut rng));
        m.w2.iter_mut().for_each(|w| *w = u2.sample(&mut rng));
        m
    }

    pub fn input_dim(&self) -> usize {
        self.input_dim
    }

    pub fn hidden_size(&self) -> usize {
        self.hidden
    }

    /// Parameters flattened in the order `w1, b1, w2, b2`.
    pub fn flatten(&self) -> Vec<f64> {
        let mut v = self.w1.clone();
        v.extend(&self.b1);
        v.extend(&self.w2);
        v.push(self.b2);
        v
    }

    pub fn from_flat(input_dim: usize, hidden: usize, flat: &[f64]) -> Result<Self> {
        let need = hidden * input_dim + 2 * hidden + 1;
        if flat.len() != need {
            return Err(Error::DimensionMismatch {
                expected: need,
                got: flat.len(),
            });
        }
        let (w1, rest) = flat.split_at(hidden * input_dim);
        let (b1, rest) = rest.split_at(hidden);
        let (w2, rest) = rest.split_at(hidden);
        Ok(Self {
            input_dim,
            hidden,
            w1: w1.to_vec(),
            b1: b1.to_vec(),
            w2: w2.to_vec(),
            b2: rest[0],
        })
    }

    fn pre_activations(&self, x: &[f64], out: &mut [f64]) {
        for (h, o) in out.iter_mut().enumerate() {
            *o = dot(&self.w1[h * self.input_dim..(h + 1) * self.input_dim], x) + self.b1[h];
        }
    }

    pub fn logit(&self, x: &[f64]) -> f64 {
        let mut pre = vec![0.0; self.hidden];
        self.pre_activations(x, &mut pre);
        pre.iter().zip(&self.w2).map(|(a, w)| a.max(0.0) * w).sum::<f64>() + self.b2
    }

    pub fn proba_row(&self, x: &[f64]) -> f64 {
        sigmoid(self.logit(x))
    }

    pub fn predict_row(&self, x: &[f64]) -> u8 {
        u8::from(self.proba_row(x) >= 0.5)
    }

    fn apply(&mut self, g: &MlpGradients, step: f64) {
        let upd = |p: &mut [f64], g: &[f64]| p.iter_mut().zip(g).for_each(|(p, g)| *p -= step * g);
        upd(&mut self.w1, &g.w1);
        upd(&mut self.b1, &g.b1);
        upd(&mut self.w2, &g.w2);
        self.b2 -= step * g.b2;
    }
}

fn loss_and_grad_rows(m: &Mlp, data: &Dataset, rows: &[usize]) -> (f64, MlpGradients) {
    let n = rows.len() as f64;
    let d = m.input_dim;
    let mut g = MlpGradients::zeros(m);
    let mut loss = 0.0;
    let mut pre = vec![0.0; m.hidden];
    for &i in rows {
        let x = data.x().row(i);
        let y = f64::from(data.y()[i]);
        m.pre_activations(x, &mut pre);
        let z = pre.iter().zip(&m.w2).map(|(a, w)| a.max(0.0) * w).sum::<f64>() + m.b2;
        loss += softplus(z) - y * z;
        let dz = (sigmoid(z) - y) / n;
        g.b2 += dz;
        for (h, &a) in pre.iter().enumerate() {
            if a <= 0.0 {
                continue;
            }
            g.w2[h] += dz * a;
            let dh = dz * m.w2[h];
            g.b1[h] += dh;
            for (gw, xj) in g.w1[h * d..(h + 1) * d].iter_mut().zip(x) {
                *gw += dh * xj;
            }
        }
    }
    (loss / n, g)
}

/// Mean binary cross-entropy over the whole dataset and its backpropagated
/// gradients.
pub fn mlp_loss_and_grad(params: &Mlp, data: &Dataset) -> Result<(f64, MlpGradients)> {
    if data.dim() != params.input_dim {
        return Err(Error::DimensionMismatch {
            expected: params.input_dim,
            got: data.dim(),
        });
    }
    let rows: Vec<usize> = (0..data.len()).collect();
    Ok(loss_and_grad_rows(params, data, &rows))
}

/// Mini-batch SGD; batch order is reshuffled every epoch from the seed.
pub fn train_mlp(data: &Dataset, params: &MlpParams, seed: u64) -> Result<Mlp> {
    if params.hidden_size == 0 {
        return Err(Error::InvalidParameter("mlp hidden_size must be >= 1".into()));
    }
    let mut m = Mlp::init(data.dim(), params.hidden_size, seed);
    let mut rng = rng_from_seed(crate::util::derive_seed(seed, 1));
    let mut order: Vec<usize> = (0..data.len()).collect();
    for _ in 0..params.epochs {
        order.shuffle(&mut rng);
        for batch in order.chunks(params.batch_size.max(1)) {
            let (loss, g) = loss_and_grad_rows(&m, data, batch);
            if !loss.is_finite() {
                return Err(Error::NonFinite { what: "mlp loss" });
            }
            let gn = g.norm();
            let mut step = params.learning_rate;
            if params.clip_norm > 0.0 && gn > params.clip_norm {
                step *= params.clip_norm / gn;
            }
            m.apply(&g, step);
        }
    }
    if m.flatten().iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite { what: "mlp weights" });
    }
    Ok(m)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::FeatureMatrix;

    fn xor() -> Dataset {
        Dataset::new(
            FeatureMatrix::from_rows(&[[0.0, 0.0], [0.0, 1.0], [1.0, 0.0], [1.0, 1.0]], 2).unwrap(),
            vec![0, 1, 1, 0],
        )
        .unwrap()
    }

    #[test]
    fn zero_parameters_give_ln2() {
        let m = Mlp::zeros(2, 3);
        let (loss, _) = mlp_loss_and_grad(&m, &xor()).unwrap();
        assert!((loss - std::f64::consts::LN_2).abs() < 1e-15);
        assert_eq!(m.proba_row(&[5.0, -1.0]), 0.5);
    }

    #[test]
    fn dead_unit_gets_no_gradient() {
        let mut m = Mlp::init(2, 3, 5);
        // unit 1 pre-activation is negative on all (non-negative) inputs
        m.w1[2] = -1.0;
        m.w1[3] = -1.0;
        m.b1[1] = -0.5;
        let (_, g) = mlp_loss_and_grad(&m, &xor()).unwrap();
        assert_eq!(&g.w1[2..4], &[0.0, 0.0]);
        assert_eq!(g.b1[1], 0.0);
        assert_eq!(g.w2[1], 0.0);
    }

    #[test]
    fn xor_is_learned() {
        let p = MlpParams {
            hidden_size: 8,
            learning_rate: 0.1,
            epochs: 2000,
            batch_size: 4,
            clip_norm: 5.0,
        };
        let d = xor();
        let m = train_mlp(&d, &p, 1).unwrap();
        let hits = d
            .x()
            .iter_rows()
            .zip(d.y())
            .filter(|(r, &y)| m.predict_row(r) == y)
            .count();
        assert_eq!(hits, 4);
    }

    #[test]
    fn zero_rate_keeps_initialization() {
        let p = MlpParams {
            learning_rate: 0.0,
            epochs: 3,
            ..Default::default()
        };
        let m = train_mlp(&xor(), &p, 8).unwrap();
        assert_eq!(m, Mlp::init(2, p.hidden_size, 8));
    }

    #[test]
    fn flat_round_trip() {
        let m = Mlp::init(3, 2, 1);
        assert_eq!(Mlp::from_flat(3, 2, &m.flatten()).unwrap(), m);
    }
}
