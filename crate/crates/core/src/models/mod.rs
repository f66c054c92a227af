//! Binary classifiers with a shared train/predict contract.
//!
//! Labels are `0`/`1`. Where a model has a probability output, the predicted
//! class is 1 iff that probability is at least 0.5, except for the exact-tie
//! rules documented on LDA and the forest (both resolve to class 0).

mod gnb;
mod io;
mod knn;
mod lda;
mod logreg;
mod mlp;
mod svm;
mod tree;

use std::fmt;

use serde::{Deserialize, Serialize};

pub use gnb::{train_gnb, GaussianNb};
pub use io::{model_fingerprint, read_model, write_model};
pub use knn::{train_knn, KnnParams, NearestNeighbors};
pub use lda::{train_lda, DiagonalLda};
pub use logreg::{logreg_loss_and_grad, train_logreg, LogRegParams, LogisticRegression};
pub use mlp::{mlp_loss_and_grad, train_mlp, Mlp, MlpGradients, MlpParams};
pub use svm::{svm_objective_and_subgradient, train_svm, LinearSvm, SvmParams};
pub use tree::{train_dtree, train_rforest, DecisionTree, ForestParams, RandomForest, TreeParams};

use crate::error::{Error, Result};
use crate::matrix::FeatureMatrix;

/// Feature rows paired with binary labels.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    x: FeatureMatrix,
    y: Vec<u8>,
}

impl Dataset {
    pub fn new(x: FeatureMatrix, y: Vec<u8>) -> Result<Self> {
        if x.rows() == 0 {
            return Err(Error::InvalidInput("dataset has no rows".into()));
        }
        if x.rows() != y.len() {
            return Err(Error::DimensionMismatch {
                expected: x.rows(),
                got: y.len(),
            });
        }
        if !x.all_finite() {
            return Err(Error::InvalidInput("dataset contains non-finite features".into()));
        }
        if y.iter().any(|&l| l > 1) {
            return Err(Error::InvalidInput("labels must be 0 or 1".into()));
        }
        Ok(Self { x, y })
    }

    pub fn x(&self) -> &FeatureMatrix {
        &self.x
    }

    pub fn y(&self) -> &[u8] {
        &self.y
    }

    pub fn len(&self) -> usize {
        self.y.len()
    }

    pub fn is_empty(&self) -> bool {
        self.y.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.x.cols()
    }

    pub fn class_counts(&self) -> [usize; 2] {
        let ones = self.y.iter().filter(|&&l| l == 1).count();
        [self.y.len() - ones, ones]
    }

    fn require_both_classes(&self) -> Result<()> {
        let [c0, c1] = self.class_counts();
        if c0 == 0 || c1 == 0 {
            return Err(Error::DegenerateClasses);
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModelKind {
    Logreg,
    Lda,
    Knn,
    Dtree,
    Svm,
    Rforest,
    Gnb,
    Mlp,
}

impl ModelKind {
    pub const ALL: [ModelKind; 8] = [
        ModelKind::Logreg,
        ModelKind::Lda,
        ModelKind::Knn,
        ModelKind::Dtree,
        ModelKind::Svm,
        ModelKind::Rforest,
        ModelKind::Gnb,
        ModelKind::Mlp,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            ModelKind::Logreg => "logreg",
            ModelKind::Lda => "lda",
            ModelKind::Knn => "knn",
            ModelKind::Dtree => "dtree",
            ModelKind::Svm => "svm",
            ModelKind::Rforest => "rforest",
            ModelKind::Gnb => "gnb",
            ModelKind::Mlp => "mlp",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|k| k.as_str() == s)
    }

    /// Table row label.
    pub fn display_name(self) -> &'static str {
        match self {
            ModelKind::Logreg => "Logistic Regression",
            ModelKind::Lda => "Linear Discriminant Analysis",
            ModelKind::Knn => "K-Nearest Neighbors",
            ModelKind::Dtree => "Decision Tree Classifier",
            ModelKind::Svm => "Support Vector Machine",
            ModelKind::Rforest => "Random Forest",
            ModelKind::Gnb => "Naive Bayes",
            ModelKind::Mlp => "MLP",
        }
    }

    pub fn has_proba(self) -> bool {
        matches!(
            self,
            ModelKind::Logreg | ModelKind::Gnb | ModelKind::Lda | ModelKind::Mlp | ModelKind::Rforest
        )
    }
}

impl fmt::Display for ModelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Hyperparameters for every model kind.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TrainConfig {
    pub logreg: LogRegParams,
    pub svm: SvmParams,
    pub knn: KnnParams,
    pub tree: TreeParams,
    pub forest: ForestParams,
    pub mlp: MlpParams,
    /// Lower bound on GNB/LDA variances.
    pub variance_floor: f64,
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self {
            logreg: LogRegParams::default(),
            svm: SvmParams::default(),
            knn: KnnParams::default(),
            tree: TreeParams::default(),
            forest: ForestParams::default(),
            mlp: MlpParams::default(),
            variance_floor: 1e-9,
        }
    }
}

impl TrainConfig {
    /// Returns every violated constraint as `(field path, message)`.
    pub fn violations(&self) -> Vec<(String, String)> {
        let mut v = Vec::new();
        let mut check = |ok: bool, path: &str, msg: &str| {
            if !ok {
                v.push((path.to_string(), msg.to_string()));
            }
        };
        let pos = |x: f64| x.is_finite() && x > 0.0;
        let nonneg = |x: f64| x.is_finite() && x >= 0.0;
        check(nonneg(self.logreg.learning_rate), "logreg.learning_rate", "must be finite and >= 0");
        check(self.logreg.epochs >= 1, "logreg.epochs", "must be >= 1");
        check(nonneg(self.logreg.l2), "logreg.l2", "must be finite and >= 0");
        check(nonneg(self.logreg.tolerance), "logreg.tolerance", "must be finite and >= 0");
        check(nonneg(self.svm.learning_rate), "svm.learning_rate", "must be finite and >= 0");
        check(self.svm.epochs >= 1, "svm.epochs", "must be >= 1");
        check(nonneg(self.svm.l2), "svm.l2", "must be finite and >= 0");
        check(self.knn.k >= 1, "knn.k", "must be >= 1");
        check(self.tree.max_depth >= 1, "tree.max_depth", "must be >= 1");
        check(self.tree.min_leaf >= 1, "tree.min_leaf", "must be >= 1");
        check(self.forest.n_trees >= 1, "forest.n_trees", "must be >= 1");
        check(
            self.forest.feature_fraction > 0.0 && self.forest.feature_fraction <= 1.0,
            "forest.feature_fraction",
            "must lie in (0, 1]",
        );
        check(self.mlp.hidden_size >= 1, "mlp.hidden_size", "must be >= 1");
        check(nonneg(self.mlp.learning_rate), "mlp.learning_rate", "must be finite and >= 0");
        check(self.mlp.epochs >= 1, "mlp.epochs", "must be >= 1");
        check(self.mlp.batch_size >= 1, "mlp.batch_size", "must be >= 1");
        check(nonneg(self.mlp.clip_norm), "mlp.clip_norm", "must be finite and >= 0");
        check(pos(self.variance_floor), "variance_floor", "must be finite and > 0");
        v
    }
}

/// A trained classifier.
#[derive(Debug, Clone, PartialEq)]
pub enum Model {
    Logreg(LogisticRegression),
    Lda(DiagonalLda),
    Knn(NearestNeighbors),
    Dtree(DecisionTree),
    Svm(LinearSvm),
    Rforest(RandomForest),
    Gnb(GaussianNb),
    Mlp(Mlp),
}

pub fn train(kind: ModelKind, data: &Dataset, config: &TrainConfig, seed: u64) -> Result<Model> {
    Ok(match kind {
        ModelKind::Logreg => Model::Logreg(train_logreg(data, &config.logreg)?),
        ModelKind::Lda => Model::Lda(train_lda(data, config.variance_floor)?),
        ModelKind::Knn => Model::Knn(train_knn(data, &config.knn)?),
        ModelKind::Dtree => Model::Dtree(train_dtree(data, &config.tree)?),
        ModelKind::Svm => Model::Svm(train_svm(data, &config.svm)?),
        ModelKind::Rforest => Model::Rforest(train_rforest(data, &config.tree, &config.forest, seed)?),
        ModelKind::Gnb => Model::Gnb(train_gnb(data, config.variance_floor)?),
        ModelKind::Mlp => Model::Mlp(train_mlp(data, &config.mlp, seed)?),
    })
}

impl Model {
    pub fn kind(&self) -> ModelKind {
        match self {
            Model::Logreg(_) => ModelKind::Logreg,
            Model::Lda(_) => ModelKind::Lda,
            Model::Knn(_) => ModelKind::Knn,
            Model::Dtree(_) => ModelKind::Dtree,
            Model::Svm(_) => ModelKind::Svm,
            Model::Rforest(_) => ModelKind::Rforest,
            Model::Gnb(_) => ModelKind::Gnb,
            Model::Mlp(_) => ModelKind::Mlp,
        }
    }

    pub fn feature_dim(&self) -> usize {
        match self {
            Model::Logreg(m) => m.weights.len(),
            Model::Lda(m) => m.weights.len(),
            Model::Knn(m) => m.dim(),
            Model::Dtree(m) => m.feature_dim(),
            Model::Svm(m) => m.weights.len(),
            Model::Rforest(m) => m.feature_dim(),
            Model::Gnb(m) => m.dim(),
            Model::Mlp(m) => m.input_dim(),
        }
    }

    fn check_width(&self, x: &FeatureMatrix) -> Result<()> {
        if x.rows() > 0 && x.cols() != self.feature_dim() {
            return Err(Error::DimensionMismatch {
                expected: self.feature_dim(),
                got: x.cols(),
            });
        }
        Ok(())
    }

    fn predict_row(&self, row: &[f64]) -> u8 {
        match self {
            Model::Logreg(m) => m.predict_row(row),
            Model::Lda(m) => m.predict_row(row),
            Model::Knn(m) => m.predict_row(row),
            Model::Dtree(m) => m.predict_row(row),
            Model::Svm(m) => m.predict_row(row),
            Model::Rforest(m) => m.predict_row(row),
            Model::Gnb(m) => m.predict_row(row),
            Model::Mlp(m) => m.predict_row(row),
        }
    }

    pub fn predict(&self, x: &FeatureMatrix) -> Result<Vec<u8>> {
        self.check_width(x)?;
        Ok(x.iter_rows().map(|r| self.predict_row(r)).collect())
    }

    /// Probability of class 1. Not available for KNN, the single tree, or
    /// the SVM.
    pub fn predict_proba(&self, x: &FeatureMatrix) -> Result<Vec<f64>> {
        self.check_width(x)?;
        let f: &dyn Fn(&[f64]) -> f64 = match self {
            Model::Logreg(m) => &|r| m.proba_row(r),
            Model::Lda(m) => &|r| m.proba_row(r),
            Model::Gnb(m) => &|r| m.proba_row(r),
            Model::Mlp(m) => &|r| m.proba_row(r),
            Model::Rforest(m) => &|r| m.proba_row(r),
            other => {
                return Err(Error::InvalidInput(format!(
                    "{} has no probability output",
                    other.kind()
                )))
            }
        };
        Ok(x.iter_rows().map(f).collect())
    }
}
