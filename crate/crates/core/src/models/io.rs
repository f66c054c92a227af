//! Plain-text model files.
//!
//! ```text
//! headline-trend-model 1
//! kind logreg
//! feature_dim 3
//! weights 3 1.0000000000000000e0 ...
//! bias 1 -2.5000000000000000e-1
//! end
//! ```
//!
//! Every parameter is a named flat array written with 17 significant digits,
//! which round-trips `f64` exactly.

use std::collections::HashMap;
use std::fmt::Write as _;

use super::gnb::GaussianNb;
use super::knn::NearestNeighbors;
use super::lda::DiagonalLda;
use super::logreg::LogisticRegression;
use super::mlp::Mlp;
use super::svm::LinearSvm;
use super::tree::{DecisionTree, Node, RandomForest};
use super::{Model, ModelKind};
use crate::error::{Error, Result};
use crate::matrix::FeatureMatrix;
use crate::util::Fingerprint;

const MAGIC: &str = "headline-trend-model";
const VERSION: u32 = 1;

fn tree_to_flat(t: &DecisionTree) -> Vec<f64> {
    let mut v = Vec::with_capacity(t.nodes.len() * 4);
    for n in &t.nodes {
        match *n {
            Node::Leaf { label } => v.extend([-1.0, f64::from(label), 0.0, 0.0]),
            Node::Split {
                feature,
                threshold,
                left,
                right,
            } => v.extend([feature as f64, threshold, left as f64, right as f64]),
        }
    }
    v
}

fn tree_from_flat(v: &[f64], feature_dim: usize) -> Result<DecisionTree> {
    if !v.len().is_multiple_of(4) || v.is_empty() {
        return Err(Error::ModelFormat("tree node array length must be a positive multiple of 4".into()));
    }
    let count = v.len() / 4;
    let idx = |x: f64, what: &str, bound: usize| -> Result<usize> {
        if x >= 0.0 && x.fract() == 0.0 && (x as usize) < bound {
            Ok(x as usize)
        } else {
            Err(Error::ModelFormat(format!("bad {what} {x}")))
        }
    };
    let mut nodes = Vec::with_capacity(count);
    for c in v.chunks_exact(4) {
        if c[0] == -1.0 {
            nodes.push(Node::Leaf {
                label: idx(c[1], "leaf label", 2)? as u8,
            });
        } else {
            nodes.push(Node::Split {
                feature: idx(c[0], "feature", feature_dim)?,
                threshold: c[1],
                left: idx(c[2], "child", count)?,
                right: idx(c[3], "child", count)?,
            });
        }
    }
    Ok(DecisionTree { nodes, feature_dim })
}

fn params_of(model: &Model) -> Vec<(String, Vec<f64>)> {
    let p = |k: &str, v: Vec<f64>| (k.to_string(), v);
    match model {
        Model::Logreg(m) => vec![p("weights", m.weights.clone()), p("bias", vec![m.bias])],
        Model::Svm(m) => vec![p("weights", m.weights.clone()), p("bias", vec![m.bias])],
        Model::Lda(m) => vec![
            p("weights", m.weights.clone()),
            p("midpoint", m.midpoint.clone()),
            p("log_prior_ratio", vec![m.log_prior_ratio]),
        ],
        Model::Gnb(m) => vec![
            p("log_prior", m.log_prior.to_vec()),
            p("mean0", m.mean[0].clone()),
            p("mean1", m.mean[1].clone()),
            p("var0", m.var[0].clone()),
            p("var1", m.var[1].clone()),
        ],
        Model::Knn(m) => vec![
            p("k", vec![m.k as f64]),
            p("y", m.y.iter().map(|&l| f64::from(l)).collect()),
            p("x", m.x.as_slice().to_vec()),
        ],
        Model::Dtree(t) => vec![p("nodes", tree_to_flat(t))],
        Model::Rforest(f) => {
            let mut v = vec![p("n_trees", vec![f.trees.len() as f64])];
            for (i, t) in f.trees.iter().enumerate() {
                v.push((format!("tree{i}"), tree_to_flat(t)));
            }
            v
        }
        Model::Mlp(m) => vec![
            p("hidden", vec![m.hidden as f64]),
            p("w1", m.w1.clone()),
            p("b1", m.b1.clone()),
            p("w2", m.w2.clone()),
            p("b2", vec![m.b2]),
        ],
    }
}

/// Digest of the kind, width and exact parameter bits.
pub fn model_fingerprint(model: &Model) -> String {
    let mut f = Fingerprint::new();
    f.str(model.kind().as_str()).u64(model.feature_dim() as u64);
    for (name, values) in params_of(model) {
        f.str(&name).f64s(&values);
    }
    f.finish()
}

pub fn write_model(model: &Model) -> String {
    let mut s = format!(
        "{MAGIC} {VERSION}\nkind {}\nfeature_dim {}\n",
        model.kind(),
        model.feature_dim()
    );
    for (name, values) in params_of(model) {
        let _ = write!(s, "{name} {}", values.len());
        for v in values {
            let _ = write!(s, " {v:.16e}");
        }
        s.push('\n');
    }
    s.push_str("end\n");
    s
}

struct Params {
    map: HashMap<String, Vec<f64>>,
    dim: usize,
}

impl Params {
    fn get(&self, name: &str) -> Result<&[f64]> {
        self.map
            .get(name)
            .map(Vec::as_slice)
            .ok_or_else(|| Error::ModelFormat(format!("missing parameter {name}")))
    }

    fn vec(&self, name: &str, len: usize) -> Result<Vec<f64>> {
        let v = self.get(name)?;
        if v.len() != len {
            return Err(Error::ModelFormat(format!(
                "{name}: expected {len} values, found {}",
                v.len()
            )));
        }
        Ok(v.to_vec())
    }

    fn scalar(&self, name: &str) -> Result<f64> {
        Ok(self.vec(name, 1)?[0])
    }

    fn count(&self, name: &str) -> Result<usize> {
        let v = self.scalar(name)?;
        if v < 1.0 || v.fract() != 0.0 {
            return Err(Error::ModelFormat(format!("{name} must be a positive integer")));
        }
        Ok(v as usize)
    }
}

pub fn read_model(text: &str) -> Result<Model> {
    let mut lines = text.lines();
    let header = lines.next().unwrap_or("");
    if header != format!("{MAGIC} {VERSION}") {
        return Err(Error::ModelFormat(format!("unsupported header {header:?}")));
    }
    let field = |line: Option<&str>, key: &str| -> Result<String> {
        line.and_then(|l| l.strip_prefix(key))
            .and_then(|r| r.strip_prefix(' '))
            .map(str::to_string)
            .ok_or_else(|| Error::ModelFormat(format!("expected `{key}` line")))
    };
    let kind_s = field(lines.next(), "kind")?;
    let kind = ModelKind::parse(&kind_s)
        .ok_or_else(|| Error::ModelFormat(format!("unknown kind {kind_s}")))?;
    let dim: usize = field(lines.next(), "feature_dim")?
        .parse()
        .map_err(|_| Error::ModelFormat("bad feature_dim".into()))?;

    let mut map = HashMap::new();
    let mut ended = false;
    for line in lines {
        if line == "end" {
            ended = true;
            break;
        }
        let mut parts = line.split_ascii_whitespace();
        let name = parts
            .next()
            .ok_or_else(|| Error::ModelFormat("empty parameter line".into()))?;
        let len: usize = parts
            .next()
            .and_then(|l| l.parse().ok())
            .ok_or_else(|| Error::ModelFormat(format!("{name}: bad length")))?;
        let values = parts
            .map(|v| v.parse::<f64>())
            .collect::<std::result::Result<Vec<_>, _>>()
            .map_err(|e| Error::ModelFormat(format!("{name}: {e}")))?;
        if values.len() != len {
            return Err(Error::ModelFormat(format!(
                "{name}: declared {len} values, found {}",
                values.len()
            )));
        }
        map.insert(name.to_string(), values);
    }
    if !ended {
        return Err(Error::ModelFormat("missing `end`".into()));
    }
    let p = Params { map, dim };

    let model = match kind {
        ModelKind::Logreg => Model::Logreg(LogisticRegression {
            weights: p.vec("weights", dim)?,
            bias: p.scalar("bias")?,
        }),
        ModelKind::Svm => Model::Svm(LinearSvm {
            weights: p.vec("weights", dim)?,
            bias: p.scalar("bias")?,
        }),
        ModelKind::Lda => Model::Lda(DiagonalLda {
            weights: p.vec("weights", dim)?,
            midpoint: p.vec("midpoint", dim)?,
            log_prior_ratio: p.scalar("log_prior_ratio")?,
        }),
        ModelKind::Gnb => {
            let lp = p.vec("log_prior", 2)?;
            Model::Gnb(GaussianNb {
                log_prior: [lp[0], lp[1]],
                mean: [p.vec("mean0", dim)?, p.vec("mean1", dim)?],
                var: [p.vec("var0", dim)?, p.vec("var1", dim)?],
            })
        }
        ModelKind::Knn => {
            let y: Vec<u8> = p
                .get("y")?
                .iter()
                .map(|&v| {
                    if v == 0.0 || v == 1.0 {
                        Ok(v as u8)
                    } else {
                        Err(Error::ModelFormat(format!("label {v}")))
                    }
                })
                .collect::<Result<_>>()?;
            let x = FeatureMatrix::from_flat(y.len(), p.dim, p.get("x")?.to_vec())?;
            let k = p.count("k")?;
            if k > y.len() {
                return Err(Error::ModelFormat("k exceeds stored rows".into()));
            }
            Model::Knn(NearestNeighbors { k, x, y })
        }
        ModelKind::Dtree => Model::Dtree(tree_from_flat(p.get("nodes")?, dim)?),
        ModelKind::Rforest => {
            let n = p.count("n_trees")?;
            let trees = (0..n)
                .map(|i| tree_from_flat(p.get(&format!("tree{i}"))?, dim))
                .collect::<Result<_>>()?;
            Model::Rforest(RandomForest { trees })
        }
        ModelKind::Mlp => {
            let h = p.count("hidden")?;
            let mut flat = p.vec("w1", h * dim)?;
            flat.extend(p.vec("b1", h)?);
            flat.extend(p.vec("w2", h)?);
            flat.push(p.scalar("b2")?);
            Model::Mlp(Mlp::from_flat(dim, h, &flat)?)
        }
    };
    Ok(model)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::{train, Dataset, TrainConfig};
    use crate::synthetic::two_blobs;

    #[test]
    fn every_kind_round_trips_exactly() {
        let (x, y) = two_blobs(40, 3, 1.0, 5);
        let data = Dataset::new(x, y).unwrap();
        let mut cfg = TrainConfig::default();
        cfg.forest.n_trees = 3;
        cfg.mlp.epochs = 2;
        for kind in ModelKind::ALL {
            let m = train(kind, &data, &cfg, 1).unwrap();
            let text = write_model(&m);
            let back = read_model(&text).unwrap();
            assert_eq!(back, m, "{kind}");
            assert_eq!(write_model(&back), text);
        }
    }

    #[test]
    fn rejects_wrong_header_and_truncation() {
        assert!(read_model("something else\n").is_err());
        let m = Model::Logreg(LogisticRegression {
            weights: vec![0.1, 0.2],
            bias: 0.3,
        });
        let text = write_model(&m);
        assert!(read_model(text.trim_end_matches("end\n")).is_err());
        let short = text.replace("weights 2", "weights 3");
        assert!(read_model(&short).is_err());
    }
}
