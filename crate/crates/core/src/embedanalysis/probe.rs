//! Logistic-regression probe on frozen embeddings.

use crate::datamodel::embeddings::EmbeddingMatrix;
use crate::datamodel::predictions::{PredictionRecord, PROBABILITY_THRESHOLD};
use crate::datamodel::records::Label;
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ProbeHyper {
    pub learning_rate: f64,
    pub epochs: usize,
}

impl Default for ProbeHyper {
    fn default() -> Self {
        Self {
            learning_rate: 0.5,
            epochs: 500,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct TrainingMeta {
    pub learning_rate: f64,
    pub epochs: usize,
    pub final_loss: f64,
    /// Loss before the first step and after every step.
    pub losses: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ProbeModel {
    pub weights: Vec<f64>,
    pub bias: f64,
    pub meta: TrainingMeta,
}

impl ProbeModel {
    pub fn logit(&self, x: &[f32]) -> f64 {
        self.bias + self.weights.iter().zip(x).map(|(w, &v)| w * v as f64).sum::<f64>()
    }

    pub fn score(&self, x: &[f32]) -> f64 {
        sigmoid(self.logit(x))
    }
}

pub fn sigmoid(z: f64) -> f64 {
    if z >= 0.0 {
        1.0 / (1.0 + (-z).exp())
    } else {
        let e = z.exp();
        e / (1.0 + e)
    }
}

/// `log(1 + e^z)` without overflow.
fn softplus(z: f64) -> f64 {
    z.max(0.0) + (-z.abs()).exp().ln_1p()
}

fn target(label: Label) -> f64 {
    match label {
        Label::Same => 1.0,
        Label::Different => 0.0,
    }
}

/// Mean binary cross-entropy and its gradient `(d/dw, d/db)`.
pub fn loss_and_gradient(weights: &[f64], bias: f64, emb: &EmbeddingMatrix, labels: &[Label]) -> Result<(f64, Vec<f64>, f64)> {
    check_shapes(weights.len(), emb, labels)?;
    let n = emb.len() as f64;
    let mut loss = 0.0;
    let mut grad_w = vec![0.0; weights.len()];
    let mut grad_b = 0.0;
    for (x, &label) in emb.rows().zip(labels) {
        let z = bias + weights.iter().zip(x).map(|(w, &v)| w * v as f64).sum::<f64>();
        let y = target(label);
        loss += softplus(z) - y * z;
        let r = sigmoid(z) - y;
        for (g, &v) in grad_w.iter_mut().zip(x) {
            *g += r * v as f64;
        }
        grad_b += r;
    }
    grad_w.iter_mut().for_each(|g| *g /= n);
    Ok((loss / n, grad_w, grad_b / n))
}

fn check_shapes(dim: usize, emb: &EmbeddingMatrix, labels: &[Label]) -> Result<()> {
    if dim != emb.dim() {
        return Err(Error::Dimension {
            expected: dim,
            found: emb.dim(),
        });
    }
    if labels.len() != emb.len() {
        return Err(Error::Eval(format!("{} labels for {} embeddings", labels.len(), emb.len())));
    }
    Ok(())
}

/// Full-batch gradient descent from zero initialization.
pub fn train_probe(emb: &EmbeddingMatrix, labels: &[Label], hyper: ProbeHyper) -> Result<ProbeModel> {
    check_shapes(emb.dim(), emb, labels)?;
    if !(labels.contains(&Label::Same) && labels.contains(&Label::Different)) {
        return Err(Error::Eval("probe training needs both classes".into()));
    }
    if !(hyper.learning_rate > 0.0 && hyper.learning_rate.is_finite()) {
        return Err(Error::InvalidConfig(format!("learning rate {}", hyper.learning_rate)));
    }
    let mut weights = vec![0.0; emb.dim()];
    let mut bias = 0.0;
    let mut losses = Vec::with_capacity(hyper.epochs + 1);
    for _ in 0..hyper.epochs {
        let (loss, gw, gb) = loss_and_gradient(&weights, bias, emb, labels)?;
        losses.push(loss);
        for (w, g) in weights.iter_mut().zip(&gw) {
            *w -= hyper.learning_rate * g;
        }
        bias -= hyper.learning_rate * gb;
    }
    let final_loss = loss_and_gradient(&weights, bias, emb, labels)?.0;
    losses.push(final_loss);
    if !final_loss.is_finite() || weights.iter().any(|w| !w.is_finite()) {
        return Err(Error::Eval("probe training diverged".into()));
    }
    Ok(ProbeModel {
        weights,
        bias,
        meta: TrainingMeta {
            learning_rate: hyper.learning_rate,
            epochs: hyper.epochs,
            final_loss,
            losses,
        },
    })
}

/// One prediction per embedding row; the row id is the stimulus id.
pub fn probe_predict(model: &ProbeModel, emb: &EmbeddingMatrix, model_id: &str, seed_id: i64) -> Result<Vec<PredictionRecord>> {
    if model.weights.len() != emb.dim() {
        return Err(Error::Dimension {
            expected: model.weights.len(),
            found: emb.dim(),
        });
    }
    Ok(emb
        .ids()
        .iter()
        .zip(emb.rows())
        .map(|(id, x)| PredictionRecord::from_score(id, model.score(x), PROBABILITY_THRESHOLD, model_id, seed_id))
        .collect())
}
