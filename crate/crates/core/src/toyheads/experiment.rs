//! End-to-end long-term anticipation run on synthetic data: train a linear
//! head on stub features, then compare single-center-clip inference against
//! multi-clips voting over growing observable windows.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fusion::{expand_candidates, multi_clips_vote, VoteConfig, VoteRule};
use crate::metrics::{instance_edit_distance, EdMode};
use crate::model::{ActionLabel, ClipKey, LtaForecast, ScoreMatrix, TemporalSegment};
use crate::snippet::{center_clip, observable_window, prefuse_features, sliding_clips, ObservableWindow};
use crate::toyheads::head::{
    classifier_scores, head_forward, train_head, Factorization, HeadKind, LinearHead, Sample, Target, TrainConfig,
    TrainOutcome,
};
use crate::toyheads::stub::{stub_feature_matrix, StubLatent, StubVariant};
use crate::toyheads::synth::{generate_synthetic, SynthConfig, SynthDataset};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VotingExperimentConfig {
    pub synth: SynthConfig,
    /// Leading videos used for training; the rest are test episodes.
    pub num_train_videos: usize,
    pub clip_len_s: f64,
    pub clip_stride_s: f64,
    /// Window the head is trained on.
    pub train_alpha_s: f64,
    /// Window for the single-center-clip baseline.
    pub center_alpha_s: f64,
    /// Windows evaluated with voting.
    pub vote_alphas_s: Vec<f64>,
    pub factor: Factorization,
    pub train: TrainConfig,
}

impl Default for VotingExperimentConfig {
    fn default() -> Self {
        Self {
            synth: SynthConfig { seed: 2024, num_videos: 40, ..SynthConfig::default() },
            num_train_videos: 24,
            clip_len_s: 2.0,
            clip_stride_s: 1.0,
            train_alpha_s: 16.0,
            center_alpha_s: 2.0,
            vote_alphas_s: vec![2.0, 4.0, 8.0, 16.0],
            factor: Factorization::Joint,
            train: TrainConfig { epochs: 15, ..TrainConfig::default() },
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VotingTrend {
    pub episodes: usize,
    /// Mean action ED@Z of the center clip at `center_alpha_s`.
    pub center_ed: f64,
    /// `(alpha_s, mean action ED@Z)` with multi-clips voting.
    pub vote_ed: Vec<(f64, f64)>,
    pub loss_curve: Vec<f64>,
}

#[derive(Debug, Clone)]
struct Episode {
    video_index: usize,
    key: ClipKey,
    target: Vec<ActionLabel>,
}

fn latent(data: &SynthDataset, video_index: usize) -> StubLatent<'_> {
    StubLatent {
        state: &data.latent,
        video_index,
        action_len_s: data.config.action_len_s,
        signal: data.config.feature_signal,
    }
}

/// Pre-fused verb+noun stub features for each clip, as f64 rows.
pub fn clip_features(data: &SynthDataset, video_index: usize, clips: &[TemporalSegment]) -> Result<Vec<Vec<f64>>> {
    let video_id = data.videos()[video_index].video_id();
    let spans: Vec<(f64, f64)> = clips.iter().map(|c| (c.start_s(), c.end_s())).collect();
    let dim = data.config.feature_dim;
    let lat = Some(latent(data, video_index));
    let v = stub_feature_matrix(video_id, &spans, dim, StubVariant::Verb, lat)?;
    let n = stub_feature_matrix(video_id, &spans, dim, StubVariant::Noun, lat)?;
    let fused = prefuse_features(&v, &n)?;
    Ok(fused.rows().map(|r| r.iter().map(|&x| f64::from(x)).collect()).collect())
}

fn episodes(data: &SynthDataset, videos: std::ops::Range<usize>, min_history_s: f64) -> Result<Vec<Episode>> {
    let mut out = Vec::new();
    for (key, seq) in &data.lta.instances {
        let vi = data
            .video_index(&key.video_id)
            .ok_or_else(|| Error::Reference(format!("unknown video {}", key.video_id)))?;
        let history = key.clip_index as f64 * data.config.action_len_s;
        if videos.contains(&vi) && history >= min_history_s {
            out.push(Episode { video_index: vi, key: key.clone(), target: seq.clone() });
        }
    }
    Ok(out)
}

fn window(data: &SynthDataset, ep: &Episode, alpha_s: f64) -> Result<ObservableWindow> {
    let ends: Vec<f64> = (0..=ep.key.clip_index as usize).map(|j| data.clip_end_s(j)).collect();
    observable_window(&ends, ep.key.clip_index as usize, alpha_s)
}

fn clip_scores(head: &LinearHead, feats: &[Vec<f64>]) -> Result<Vec<ScoreMatrix>> {
    feats.iter().map(|x| classifier_scores(head, &head_forward(head, x)?)).collect()
}

fn action_ed(m: &ScoreMatrix, ep: &Episode, k: usize) -> Result<f64> {
    let cands = expand_candidates(m, k)?;
    let f = LtaForecast::new(ep.key.clone(), cands, None, ep.target.len())?;
    instance_edit_distance(&f, &ep.target, EdMode::Action)
}

/// Train on the first `num_train_videos` videos of an already generated set.
pub fn train_lta_head(data: &SynthDataset, cfg: &VotingExperimentConfig) -> Result<TrainOutcome> {
    let train = episodes(data, 0..cfg.num_train_videos, cfg.train_alpha_s)?;
    if train.is_empty() {
        return Err(Error::param("no training episodes"));
    }
    let mut samples = Vec::new();
    for ep in &train {
        let w = window(data, ep, cfg.train_alpha_s)?;
        let clips = sliding_clips(&w, cfg.clip_len_s, cfg.clip_stride_s)?;
        for x in clip_features(data, ep.video_index, &clips)? {
            samples.push(Sample { x, target: Target::Actions(ep.target.clone()) });
        }
    }
    let kind = HeadKind::Classifier {
        horizon: data.config.horizon,
        num_verbs: data.config.num_verbs,
        num_nouns: data.config.num_nouns,
        factor: cfg.factor,
    };
    let head = LinearHead::zeros(kind, 2 * data.config.feature_dim)?;
    train_head(head, &samples, &cfg.train)
}

/// Full experiment; deterministic given the configuration.
pub fn run_voting_experiment(cfg: &VotingExperimentConfig) -> Result<VotingTrend> {
    if cfg.num_train_videos == 0 || cfg.num_train_videos >= cfg.synth.num_videos {
        return Err(Error::param("num_train_videos must leave at least one test video"));
    }
    let data = generate_synthetic(&cfg.synth)?;
    let outcome = train_lta_head(&data, cfg)?;
    let head = &outcome.head;
    let max_alpha = cfg.vote_alphas_s.iter().copied().fold(cfg.center_alpha_s, f64::max);
    let test = episodes(&data, cfg.num_train_videos..cfg.synth.num_videos, max_alpha)?;
    if test.is_empty() {
        return Err(Error::param("no test episodes"));
    }
    let k = cfg.synth.num_candidates;
    let vote = VoteConfig { rule: VoteRule::MeanProb };
    let per_episode: Vec<(f64, Vec<f64>)> = test
        .par_iter()
        .map(|ep| -> Result<(f64, Vec<f64>)> {
            let cw = window(&data, ep, cfg.center_alpha_s)?;
            let c = center_clip(&cw, cfg.clip_len_s)?;
            let center = clip_scores(head, &clip_features(&data, ep.video_index, &[c])?)?;
            let center_ed = action_ed(&center[0], ep, k)?;
            let mut voted = Vec::with_capacity(cfg.vote_alphas_s.len());
            for &a in &cfg.vote_alphas_s {
                let w = window(&data, ep, a)?;
                let clips = sliding_clips(&w, cfg.clip_len_s, cfg.clip_stride_s)?;
                let scores = clip_scores(head, &clip_features(&data, ep.video_index, &clips)?)?;
                let (_, fused) = multi_clips_vote(&scores, vote)?;
                voted.push(action_ed(&fused, ep, k)?);
            }
            Ok((center_ed, voted))
        })
        .collect::<Result<_>>()?;

    let n = per_episode.len() as f64;
    let center_ed = per_episode.iter().map(|(c, _)| c).sum::<f64>() / n;
    let vote_ed = cfg
        .vote_alphas_s
        .iter()
        .enumerate()
        .map(|(j, &a)| (a, per_episode.iter().map(|(_, v)| v[j]).sum::<f64>() / n))
        .collect();
    Ok(VotingTrend { episodes: per_episode.len(), center_ed, vote_ed, loss_curve: outcome.loss_curve })
}
