//! Central finite-difference checks for the loss gradients.

#![allow(dead_code)]

use egoforge_core::toyheads::{cross_entropy, l1_loss};
use rand::Rng;

use super::oracle::rng;

pub const STEP: f64 = 1e-5;

/// Central differences of `f` at `x`.
pub fn numeric_grad(x: &[f64], f: impl Fn(&[f64]) -> f64) -> Vec<f64> {
    let mut probe = x.to_vec();
    (0..x.len())
        .map(|i| {
            probe[i] = x[i] + STEP;
            let up = f(&probe);
            probe[i] = x[i] - STEP;
            let down = f(&probe);
            probe[i] = x[i];
            (up - down) / (2.0 * STEP)
        })
        .collect()
}

/// `|a - n| / max(|a|, |n|)` in the Euclidean norm.
pub fn relative_error(analytic: &[f64], numeric: &[f64]) -> f64 {
    let norm = |v: &[f64]| v.iter().map(|x| x * x).sum::<f64>().sqrt();
    let diff: Vec<f64> = analytic.iter().zip(numeric).map(|(a, n)| a - n).collect();
    let scale = norm(analytic).max(norm(numeric));
    if scale == 0.0 {
        norm(&diff)
    } else {
        norm(&diff) / scale
    }
}

/// Worst relative error of the L1 gradient over `cases` seeded 20-vectors.
/// Every coordinate sits at least 1e-3 from its target so no difference
/// straddles the kink.
pub fn l1_worst(cases: u64) -> f64 {
    (0..cases)
        .map(|seed| {
            let mut r = rng(seed);
            let target: Vec<f64> = (0..20).map(|_| r.random_range(-300.0..300.0)).collect();
            let pred: Vec<f64> = target
                .iter()
                .map(|t| {
                    let d: f64 = r.random_range(1e-3..50.0);
                    if r.random_bool(0.5) {
                        t + d
                    } else {
                        t - d
                    }
                })
                .collect();
            let (_, g) = l1_loss(&pred, &target).unwrap();
            let n = numeric_grad(&pred, |p| l1_loss(p, &target).unwrap().0);
            relative_error(&g, &n)
        })
        .fold(0.0, f64::max)
}

/// Worst relative error of the cross-entropy gradient over `cases` seeded
/// logit blocks of up to 6 positions and 12 classes.
pub fn ce_worst(cases: u64) -> f64 {
    (0..cases)
        .map(|seed| {
            let mut r = rng(seed + 1_000_000);
            let z = r.random_range(1..=6);
            let c = r.random_range(2..=12);
            let logits: Vec<f64> = (0..z * c).map(|_| r.random_range(-4.0..4.0)).collect();
            let targets: Vec<usize> = (0..z).map(|_| r.random_range(0..c)).collect();
            let (_, g) = cross_entropy(&logits, c, &targets).unwrap();
            let n = numeric_grad(&logits, |l| cross_entropy(l, c, &targets).unwrap().0);
            relative_error(&g, &n)
        })
        .fold(0.0, f64::max)
}
