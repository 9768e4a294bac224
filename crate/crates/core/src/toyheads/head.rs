//! Linear task heads, their losses, and a minibatch trainer.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{ActionLabel, ActionVocab, ScoreMatrix};

/// Outputs of a regression head: five keyframes, two hands, (x, y).
pub const REGRESSION_OUTPUTS: usize = 20;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Factorization {
    /// One softmax over all `C_v * C_n` actions per position.
    Joint,
    /// Separate verb and noun softmaxes per position.
    Independent,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "type")]
pub enum HeadKind {
    Regression20,
    Classifier { horizon: usize, num_verbs: u32, num_nouns: u32, factor: Factorization },
}

impl HeadKind {
    pub fn out_dim(&self) -> usize {
        match *self {
            HeadKind::Regression20 => REGRESSION_OUTPUTS,
            HeadKind::Classifier { horizon, num_verbs, num_nouns, factor: Factorization::Joint } => {
                horizon * num_verbs as usize * num_nouns as usize
            }
            HeadKind::Classifier { horizon, num_verbs, num_nouns, factor: Factorization::Independent } => {
                horizon * (num_verbs + num_nouns) as usize
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LinearHead {
    pub kind: HeadKind,
    pub in_dim: usize,
    /// Row-major `out_dim x in_dim`.
    pub weight: Vec<f64>,
    pub bias: Vec<f64>,
}

impl LinearHead {
    pub fn zeros(kind: HeadKind, in_dim: usize) -> Result<Self> {
        let head = Self { kind, in_dim, weight: vec![0.0; kind.out_dim() * in_dim], bias: vec![0.0; kind.out_dim()] };
        head.check()?;
        Ok(head)
    }

    pub fn out_dim(&self) -> usize {
        self.kind.out_dim()
    }

    pub fn check(&self) -> Result<()> {
        if let HeadKind::Classifier { horizon, num_verbs, num_nouns, .. } = self.kind {
            if horizon == 0 || num_verbs == 0 || num_nouns == 0 {
                return Err(Error::param("classifier head needs positive horizon and vocabulary"));
            }
        }
        if self.in_dim == 0 {
            return Err(Error::param("head in_dim must be positive"));
        }
        let out = self.out_dim();
        if self.weight.len() != out * self.in_dim || self.bias.len() != out {
            return Err(Error::shape(format!(
                "head parameters {}+{} do not match {out}x{}",
                self.weight.len(),
                self.bias.len(),
                self.in_dim
            )));
        }
        if self.weight.iter().chain(&self.bias).any(|v| !v.is_finite()) {
            return Err(Error::invalid("head", "non-finite parameter"));
        }
        Ok(())
    }

    pub fn vocab(&self) -> Option<ActionVocab> {
        match self.kind {
            HeadKind::Classifier { num_verbs, num_nouns, .. } => Some(ActionVocab { num_verbs, num_nouns }),
            HeadKind::Regression20 => None,
        }
    }
}

/// `weight * x + bias`.
pub fn head_forward(head: &LinearHead, x: &[f64]) -> Result<Vec<f64>> {
    if x.len() != head.in_dim {
        return Err(Error::shape(format!("input has length {}, head expects {}", x.len(), head.in_dim)));
    }
    Ok(head
        .weight
        .chunks_exact(head.in_dim)
        .zip(&head.bias)
        .map(|(row, b)| row.iter().zip(x).map(|(w, v)| w * v).sum::<f64>() + b)
        .collect())
}

fn softmax(z: &[f64]) -> Vec<f64> {
    let m = z.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let e: Vec<f64> = z.iter().map(|v| (v - m).exp()).collect();
    let s: f64 = e.iter().sum();
    e.into_iter().map(|v| v / s).collect()
}

/// Per-position verb and noun marginals from classifier logits.
pub fn classifier_scores(head: &LinearHead, logits: &[f64]) -> Result<ScoreMatrix> {
    let HeadKind::Classifier { horizon, num_verbs, num_nouns, factor } = head.kind else {
        return Err(Error::param("regression head has no class scores"));
    };
    if logits.len() != head.out_dim() {
        return Err(Error::shape(format!("{} logits, head produces {}", logits.len(), head.out_dim())));
    }
    let (cv, cn) = (num_verbs as usize, num_nouns as usize);
    let mut verb = Vec::with_capacity(horizon);
    let mut noun = Vec::with_capacity(horizon);
    match factor {
        Factorization::Joint => {
            for pos in logits.chunks_exact(cv * cn) {
                let p = softmax(pos);
                let mut pv = vec![0.0; cv];
                let mut pn = vec![0.0; cn];
                for (j, q) in p.iter().enumerate() {
                    pv[j / cn] += q;
                    pn[j % cn] += q;
                }
                verb.push(pv);
                noun.push(pn);
            }
        }
        Factorization::Independent => {
            for pos in logits.chunks_exact(cv + cn) {
                verb.push(softmax(&pos[..cv]));
                noun.push(softmax(&pos[cv..]));
            }
        }
    }
    ScoreMatrix::new(verb, noun, head.vocab().expect("classifier"))
}

/// Mean absolute error and its subgradient (zero at exact ties).
pub fn l1_loss(pred: &[f64], target: &[f64]) -> Result<(f64, Vec<f64>)> {
    if pred.len() != target.len() || pred.is_empty() {
        return Err(Error::shape(format!("l1 loss on lengths {} and {}", pred.len(), target.len())));
    }
    let n = pred.len() as f64;
    let loss = pred.iter().zip(target).map(|(p, t)| (p - t).abs()).sum::<f64>() / n;
    let grad = pred
        .iter()
        .zip(target)
        .map(|(p, t)| match p.partial_cmp(t) {
            Some(std::cmp::Ordering::Greater) => 1.0 / n,
            Some(std::cmp::Ordering::Less) => -1.0 / n,
            _ => 0.0,
        })
        .collect();
    Ok((loss, grad))
}

/// Mean over positions of `-log softmax(logits_z)[target_z]`; `logits` holds
/// `targets.len()` consecutive blocks of `num_classes`.
pub fn cross_entropy(logits: &[f64], num_classes: usize, targets: &[usize]) -> Result<(f64, Vec<f64>)> {
    if num_classes == 0 || targets.is_empty() || logits.len() != num_classes * targets.len() {
        return Err(Error::shape(format!(
            "{} logits do not split into {} positions of {num_classes} classes",
            logits.len(),
            targets.len()
        )));
    }
    if let Some((z, t)) = targets.iter().enumerate().find(|(_, t)| **t >= num_classes) {
        return Err(Error::param(format!("target {t} at position {z} out of range for {num_classes} classes")));
    }
    let zn = targets.len() as f64;
    let mut loss = 0.0;
    let mut grad = Vec::with_capacity(logits.len());
    for (pos, &t) in logits.chunks_exact(num_classes).zip(targets) {
        let m = pos.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let lse = m + pos.iter().map(|v| (v - m).exp()).sum::<f64>().ln();
        loss += lse - pos[t];
        for (c, v) in pos.iter().enumerate() {
            let p = (v - lse).exp();
            grad.push((p - if c == t { 1.0 } else { 0.0 }) / zn);
        }
    }
    Ok((loss / zn, grad))
}

#[derive(Debug, Clone, PartialEq)]
pub enum Target {
    Coords(Vec<f64>),
    Actions(Vec<ActionLabel>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Sample {
    pub x: Vec<f64>,
    pub target: Target,
}

/// Loss and gradient wrt the head's outputs for one sample.
pub fn sample_loss(head: &LinearHead, out: &[f64], target: &Target) -> Result<(f64, Vec<f64>)> {
    match (head.kind, target) {
        (HeadKind::Regression20, Target::Coords(t)) => l1_loss(out, t),
        (HeadKind::Classifier { horizon, num_verbs, num_nouns, factor }, Target::Actions(seq)) => {
            if seq.len() != horizon {
                return Err(Error::shape(format!(
                    "target sequence length {} differs from head horizon {horizon}",
                    seq.len()
                )));
            }
            let vocab = head.vocab().expect("classifier");
            if let Some(a) = seq.iter().find(|a| a.verb() >= num_verbs || a.noun() >= num_nouns) {
                return Err(Error::param(format!(
                    "target action ({}, {}) outside head vocabulary",
                    a.verb(),
                    a.noun()
                )));
            }
            match factor {
                Factorization::Joint => {
                    let t: Vec<usize> = seq.iter().map(|a| a.joint_index(vocab)).collect();
                    cross_entropy(out, vocab.num_actions(), &t)
                }
                Factorization::Independent => {
                    let (cv, cn) = (num_verbs as usize, num_nouns as usize);
                    let mut verb_logits = Vec::with_capacity(horizon * cv);
                    let mut noun_logits = Vec::with_capacity(horizon * cn);
                    for pos in out.chunks_exact(cv + cn) {
                        verb_logits.extend_from_slice(&pos[..cv]);
                        noun_logits.extend_from_slice(&pos[cv..]);
                    }
                    let tv: Vec<usize> = seq.iter().map(|a| a.verb() as usize).collect();
                    let tn: Vec<usize> = seq.iter().map(|a| a.noun() as usize).collect();
                    let (lv, gv) = cross_entropy(&verb_logits, cv, &tv)?;
                    let (ln, gn) = cross_entropy(&noun_logits, cn, &tn)?;
                    let mut grad = Vec::with_capacity(out.len());
                    for (a, b) in gv.chunks_exact(cv).zip(gn.chunks_exact(cn)) {
                        grad.extend_from_slice(a);
                        grad.extend_from_slice(b);
                    }
                    Ok((lv + ln, grad))
                }
            }
        }
        _ => Err(Error::param("target type does not match head kind")),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "type")]
pub enum Optimizer {
    Sgd { lr: f64 },
    Momentum { lr: f64, momentum: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrainConfig {
    pub optimizer: Optimizer,
    pub epochs: usize,
    pub batch_size: usize,
    pub seed: u64,
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self { optimizer: Optimizer::Sgd { lr: 0.1 }, epochs: 20, batch_size: 32, seed: 0 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrainOutcome {
    pub head: LinearHead,
    /// Mean training-set loss after each epoch.
    pub loss_curve: Vec<f64>,
}

/// Mean loss of `head` over `samples`.
pub fn dataset_loss(head: &LinearHead, samples: &[Sample]) -> Result<f64> {
    let mut total = 0.0;
    for s in samples {
        let out = head_forward(head, &s.x)?;
        total += sample_loss(head, &out, &s.target)?.0;
    }
    Ok(total / samples.len() as f64)
}

/// Minibatch gradient descent; shuffling is driven by `cfg.seed` only.
pub fn train_head(head: LinearHead, samples: &[Sample], cfg: &TrainConfig) -> Result<TrainOutcome> {
    head.check()?;
    if samples.is_empty() {
        return Err(Error::param("no training samples"));
    }
    if cfg.batch_size == 0 {
        return Err(Error::param("batch_size must be positive"));
    }
    let (lr, mu) = match cfg.optimizer {
        Optimizer::Sgd { lr } => (lr, 0.0),
        Optimizer::Momentum { lr, momentum } => (lr, momentum),
    };
    if !(lr.is_finite() && lr >= 0.0) || !(0.0..1.0).contains(&mu) {
        return Err(Error::param(format!("bad optimizer settings lr={lr} momentum={mu}")));
    }
    let mut head = head;
    let in_dim = head.in_dim;
    let mut vel_w = vec![0.0; head.weight.len()];
    let mut vel_b = vec![0.0; head.bias.len()];
    let mut grad_w = vec![0.0; head.weight.len()];
    let mut grad_b = vec![0.0; head.bias.len()];
    let mut order: Vec<usize> = (0..samples.len()).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut curve = Vec::with_capacity(cfg.epochs);

    for epoch in 0..cfg.epochs {
        order.shuffle(&mut rng);
        for batch in order.chunks(cfg.batch_size) {
            grad_w.iter_mut().for_each(|g| *g = 0.0);
            grad_b.iter_mut().for_each(|g| *g = 0.0);
            let scale = 1.0 / batch.len() as f64;
            for &i in batch {
                let s = &samples[i];
                let out = head_forward(&head, &s.x)?;
                let (_, g) = sample_loss(&head, &out, &s.target)?;
                for (o, go) in g.iter().enumerate() {
                    if *go == 0.0 {
                        continue;
                    }
                    grad_b[o] += go * scale;
                    let row = &mut grad_w[o * in_dim..(o + 1) * in_dim];
                    for (gw, xv) in row.iter_mut().zip(&s.x) {
                        *gw += go * scale * xv;
                    }
                }
            }
            for ((w, v), g) in head.weight.iter_mut().zip(&mut vel_w).zip(&grad_w) {
                *v = mu * *v + g;
                *w -= lr * *v;
            }
            for ((b, v), g) in head.bias.iter_mut().zip(&mut vel_b).zip(&grad_b) {
                *v = mu * *v + g;
                *b -= lr * *v;
            }
        }
        let loss = dataset_loss(&head, samples)?;
        if !loss.is_finite() {
            return Err(Error::Diverged { epoch, loss });
        }
        curve.push(loss);
    }
    Ok(TrainOutcome { head, loss_curve: curve })
}
