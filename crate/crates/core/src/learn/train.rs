//! No-intercept L2-regularized logistic regression over one-hot query features.
//!
//! With exactly one active feature per instance the Hessian of the mean
//! logistic loss is diagonal, so each epoch takes a full-batch gradient step
//! preconditioned by that diagonal (an exact Newton step, scaled by the
//! learning rate and safeguarded by per-coordinate backtracking). At
//! `l2_lambda = 0` a query seen `p` times as positive and `n` times as
//! negative converges to `ln(p / n)`.

use std::collections::BTreeMap;

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};

use super::corpus::TrainingCorpus;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct Hyperparams {
    pub l2_lambda: f64,
    pub learning_rate: f64,
    pub epochs: usize,
    pub seed: u64,
    /// Stop once the largest per-weight update falls below this.
    pub convergence_tol: f64,
}

impl Default for Hyperparams {
    fn default() -> Self {
        Self { l2_lambda: 1e-4, learning_rate: 1.0, epochs: 200, seed: 42, convergence_tol: 1e-8 }
    }
}

impl Hyperparams {
    pub fn validate(&self) -> Result<()> {
        if !(self.l2_lambda >= 0.0 && self.l2_lambda.is_finite()) {
            return Err(Error::config("l2_lambda", "must be finite and >= 0"));
        }
        if !(self.learning_rate > 0.0 && self.learning_rate.is_finite()) {
            return Err(Error::config("learning_rate", "must be finite and > 0"));
        }
        if self.epochs == 0 {
            return Err(Error::config("epochs", "must be > 0"));
        }
        if self.convergence_tol.is_nan() || self.convergence_tol <= 0.0 {
            return Err(Error::config("convergence_tol", "must be > 0"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrainDiagnostics {
    pub final_loss: f64,
    pub epochs: usize,
    pub converged: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelWeights {
    pub date: NaiveDate,
    pub weights: BTreeMap<String, f64>,
    pub hyperparams: Hyperparams,
    pub diagnostics: TrainDiagnostics,
}

/// `ln(1 + e^x)` without overflow.
fn softplus(x: f64) -> f64 {
    if x > 0.0 {
        x + (-x).exp().ln_1p()
    } else {
        x.exp().ln_1p()
    }
}

fn sigmoid(x: f64) -> f64 {
    if x >= 0.0 {
        1.0 / (1.0 + (-x).exp())
    } else {
        let e = x.exp();
        e / (1.0 + e)
    }
}

/// Mean logistic loss plus `lambda * |w|^2 / 2` over per-query counts.
#[derive(Debug, Clone)]
pub struct LogisticObjective {
    pub queries: Vec<String>,
    pos: Vec<f64>,
    neg: Vec<f64>,
    total: f64,
    lambda: f64,
}

impl LogisticObjective {
    pub fn new(corpus: &TrainingCorpus, lambda: f64) -> Self {
        let per_query = corpus.per_query();
        let total = (corpus.pos_total() + corpus.neg_total()) as f64;
        Self {
            queries: per_query.iter().map(|(q, _, _)| q.to_string()).collect(),
            pos: per_query.iter().map(|&(_, p, _)| p as f64).collect(),
            neg: per_query.iter().map(|&(_, _, n)| n as f64).collect(),
            total,
            lambda,
        }
    }

    pub fn dim(&self) -> usize {
        self.queries.len()
    }

    fn term(&self, i: usize, w: f64) -> f64 {
        (self.pos[i] * softplus(-w) + self.neg[i] * softplus(w)) / self.total + 0.5 * self.lambda * w * w
    }

    pub fn loss(&self, w: &[f64]) -> f64 {
        w.iter().enumerate().map(|(i, &wi)| self.term(i, wi)).sum()
    }

    pub fn gradient(&self, w: &[f64]) -> Vec<f64> {
        w.iter()
            .enumerate()
            .map(|(i, &wi)| (self.neg[i] * sigmoid(wi) - self.pos[i] * sigmoid(-wi)) / self.total + self.lambda * wi)
            .collect()
    }

    pub fn hessian_diag(&self, w: &[f64]) -> Vec<f64> {
        w.iter()
            .enumerate()
            .map(|(i, &wi)| {
                let s = sigmoid(wi);
                (self.pos[i] + self.neg[i]) * s * (1.0 - s) / self.total + self.lambda
            })
            .collect()
    }
}

/// Fits per-query weights on a corpus. Callers balance first; training itself
/// accepts any corpus with both classes present.
pub fn train(corpus: &TrainingCorpus, hyper: &Hyperparams) -> Result<ModelWeights> {
    hyper.validate()?;
    corpus.ensure_trainable()?;
    let obj = LogisticObjective::new(corpus, hyper.l2_lambda);
    let mut w = vec![0.0; obj.dim()];
    let mut epochs_run = 0;
    let mut converged = false;

    for epoch in 1..=hyper.epochs {
        epochs_run = epoch;
        let grad = obj.gradient(&w);
        let hess = obj.hessian_diag(&w);
        let mut max_step = 0.0f64;
        for i in 0..w.len() {
            // Curvature underflows once a one-sided weight saturates.
            let h = hess[i].max(f64::MIN_POSITIVE);
            let mut step = -hyper.learning_rate * grad[i] / h;
            if !step.is_finite() {
                return Err(Error::Divergence { epoch, lambda: hyper.l2_lambda, learning_rate: hyper.learning_rate });
            }
            let before = obj.term(i, w[i]);
            let mut halvings = 0;
            while obj.term(i, w[i] + step) > before && halvings < 60 {
                step *= 0.5;
                halvings += 1;
            }
            w[i] += step;
            max_step = max_step.max(step.abs());
        }
        let loss = obj.loss(&w);
        if !loss.is_finite() || w.iter().any(|x| !x.is_finite()) {
            return Err(Error::Divergence { epoch, lambda: hyper.l2_lambda, learning_rate: hyper.learning_rate });
        }
        if max_step < hyper.convergence_tol {
            converged = true;
            break;
        }
    }

    let final_loss = obj.loss(&w);
    Ok(ModelWeights {
        date: corpus.date,
        weights: obj.queries.iter().cloned().zip(w).collect(),
        hyperparams: *hyper,
        diagnostics: TrainDiagnostics { final_loss, epochs: epochs_run, converged },
    })
}
