//! Hash-seeded stand-in for a video backbone.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::model::{FeatureKind, FeatureMatrix};
use crate::toyheads::synth::LatentState;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum StubVariant {
    Verb,
    Noun,
}

impl StubVariant {
    fn tag(self) -> &'static str {
        match self {
            StubVariant::Verb => "verb",
            StubVariant::Noun => "noun",
        }
    }

    pub fn kind(self) -> FeatureKind {
        match self {
            StubVariant::Verb => FeatureKind::Verb,
            StubVariant::Noun => FeatureKind::Noun,
        }
    }
}

/// Generative state to leak into features so heads have something to learn.
#[derive(Debug, Clone, Copy)]
pub struct StubLatent<'a> {
    pub state: &'a LatentState,
    pub video_index: usize,
    pub action_len_s: f64,
    /// Projection of the feature onto each label direction.
    pub signal: f64,
}

fn hashed_rng(parts: &[&[u8]]) -> ChaCha8Rng {
    let mut h = Sha256::new();
    for p in parts {
        h.update((p.len() as u64).to_le_bytes());
        h.update(p);
    }
    let digest = h.finalize();
    let mut seed = [0u8; 32];
    seed.copy_from_slice(&digest);
    ChaCha8Rng::from_seed(seed)
}

fn gaussian(rng: &mut ChaCha8Rng, dim: usize) -> Vec<f64> {
    (0..dim).map(|_| StandardNormal.sample(rng)).collect()
}

/// Fixed unit vector for `(family, id)` in a `dim`-dimensional space.
pub fn label_direction(family: &str, id: u32, dim: usize) -> Vec<f64> {
    let mut rng = hashed_rng(&[b"dir", family.as_bytes(), &id.to_le_bytes(), &(dim as u64).to_le_bytes()]);
    let mut v = gaussian(&mut rng, dim);
    let n = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    v.iter_mut().for_each(|x| *x /= n);
    v
}

/// One feature row for a snippet `(start_s, end_s)` of a video.
pub fn stub_features(
    video_id: &str,
    snippet: (f64, f64),
    dim: usize,
    variant: StubVariant,
    latent: Option<StubLatent<'_>>,
) -> Result<Vec<f32>> {
    if dim < 8 {
        return Err(Error::param(format!("stub feature dim {dim} must be at least 8")));
    }
    let mut rng = hashed_rng(&[
        video_id.as_bytes(),
        &snippet.0.to_bits().to_le_bytes(),
        &snippet.1.to_bits().to_le_bytes(),
        variant.tag().as_bytes(),
        &(dim as u64).to_le_bytes(),
    ]);
    let mut v = gaussian(&mut rng, dim);
    if let Some(l) = latent {
        let activity = *l
            .state
            .activities
            .get(l.video_index)
            .ok_or_else(|| Error::param(format!("latent video index {} out of range", l.video_index)))?;
        let mid = 0.5 * (snippet.0 + snippet.1);
        let action = l.state.action_at(l.video_index, mid, l.action_len_s);
        let label = match variant {
            StubVariant::Verb => action.verb(),
            StubVariant::Noun => action.noun(),
        };
        let act_dir = label_direction(&format!("activity-{}", variant.tag()), activity, dim);
        let lab_dir = label_direction(variant.tag(), label, dim);
        for ((x, a), b) in v.iter_mut().zip(&act_dir).zip(&lab_dir) {
            *x += l.signal * (a + b);
        }
    }
    Ok(v.into_iter().map(|x| x as f32).collect())
}

/// Stub features for a list of snippets, one row each.
pub fn stub_feature_matrix(
    video_id: &str,
    snippets: &[(f64, f64)],
    dim: usize,
    variant: StubVariant,
    latent: Option<StubLatent<'_>>,
) -> Result<FeatureMatrix> {
    let rows =
        snippets.iter().map(|&s| stub_features(video_id, s, dim, variant, latent)).collect::<Result<Vec<_>>>()?;
    FeatureMatrix::from_rows(dim, rows, variant.kind())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn deterministic_and_variant_separated() {
        let a = stub_features("v1", (0.0, 2.0), 16, StubVariant::Verb, None).unwrap();
        let b = stub_features("v1", (0.0, 2.0), 16, StubVariant::Verb, None).unwrap();
        let c = stub_features("v1", (0.0, 2.0), 16, StubVariant::Noun, None).unwrap();
        let d = stub_features("v1", (0.0, 2.5), 16, StubVariant::Verb, None).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, c);
        assert_ne!(a, d);
    }

    #[test]
    fn small_dim_rejected() {
        assert!(stub_features("v", (0.0, 1.0), 4, StubVariant::Verb, None).is_err());
    }

    #[test]
    fn directions_are_unit() {
        let d = label_direction("verb", 3, 32);
        let n: f64 = d.iter().map(|x| x * x).sum();
        assert!((n - 1.0).abs() < 1e-12);
    }
}
