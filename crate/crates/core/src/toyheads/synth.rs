//! Seeded synthetic multi-track dataset with retained latent state.

use std::collections::BTreeMap;

use rand::distr::{weighted::WeightedIndex, Distribution};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::Normal;
use serde::{Deserialize, Serialize};

use crate::dataset::{
    FhpGroundTruth, ImageMeta, LtaConfig, LtaGroundTruth, MqGroundTruth, NlqGroundTruth, ScodGroundTruth,
    StaGroundTruth,
};
use crate::error::{Error, Result};
use crate::model::{
    ActionLabel, ActionVocab, BoundingBox, ClipKey, HandKeyframes, HandPair, MomentInstance, NlqInstance, Point,
    ScoredBox, StaInstance, TemporalSegment, VideoMeta, Visibility,
};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SynthConfig {
    pub seed: u64,
    pub num_videos: usize,
    /// Video duration range `[min, max]` in seconds.
    pub video_len_s: (f64, f64),
    pub fps: f64,
    pub num_mq_classes: u32,
    pub num_verbs: u32,
    pub num_nouns: u32,
    /// Forecast horizon `Z`.
    pub horizon: usize,
    /// Candidate sequences per forecast `K`.
    pub num_candidates: usize,
    /// Latent scenarios that shape each video's action statistics.
    pub num_activities: u32,
    /// Duration of one action segment in the anticipation timeline.
    pub action_len_s: f64,
    /// Probability that the next action repeats the current one.
    pub action_stickiness: f64,
    /// Std-dev of pixel noise added to hand keyframes.
    pub hand_noise_px: f64,
    /// Std-dev of pixel jitter on synthetic boxes.
    pub box_jitter_px: f64,
    /// Scale of the label-correlated component of stub features.
    pub feature_signal: f64,
    pub feature_dim: usize,
    /// Canonical `(width, height)` in pixels.
    pub resolution: (f64, f64),
}

impl Default for SynthConfig {
    fn default() -> Self {
        Self {
            seed: 0,
            num_videos: 8,
            video_len_s: (60.0, 80.0),
            fps: 15.0,
            num_mq_classes: 5,
            num_verbs: 4,
            num_nouns: 5,
            horizon: 20,
            num_candidates: 5,
            num_activities: 4,
            action_len_s: 2.0,
            action_stickiness: 0.3,
            hand_noise_px: 4.0,
            box_jitter_px: 2.0,
            feature_signal: 1.5,
            feature_dim: 32,
            resolution: (640.0, 480.0),
        }
    }
}

impl SynthConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |r: &str| Err(Error::param(format!("synth config: {r}")));
        if self.num_videos == 0 {
            return bad("num_videos must be positive");
        }
        let (lo, hi) = self.video_len_s;
        if !(lo.is_finite() && hi.is_finite() && lo > 0.0 && lo <= hi) {
            return bad("video_len_s must be a positive [min, max] range");
        }
        if !(self.fps.is_finite() && self.fps > 0.0) {
            return bad("fps must be positive");
        }
        if self.num_mq_classes == 0 || self.num_verbs == 0 || self.num_nouns == 0 || self.num_activities == 0 {
            return bad("class counts must be positive");
        }
        if self.horizon == 0 || self.num_candidates == 0 {
            return bad("horizon and candidate count must be positive");
        }
        if !(self.action_len_s.is_finite() && self.action_len_s > 0.0) {
            return bad("action_len_s must be positive");
        }
        if lo < self.action_len_s * (self.horizon + 2) as f64 {
            return bad("videos too short to hold one forecast horizon");
        }
        if !(0.0..=1.0).contains(&self.action_stickiness) {
            return bad("action_stickiness must lie in [0, 1]");
        }
        for (name, v) in [
            ("hand_noise_px", self.hand_noise_px),
            ("box_jitter_px", self.box_jitter_px),
            ("feature_signal", self.feature_signal),
        ] {
            if !(v.is_finite() && v >= 0.0) {
                return bad(&format!("{name} must be nonnegative"));
            }
        }
        if self.feature_dim < 8 {
            return bad("feature_dim must be at least 8");
        }
        let (w, h) = self.resolution;
        if !(w.is_finite() && h.is_finite() && w >= 64.0 && h >= 64.0) {
            return bad("resolution must be at least 64x64");
        }
        Ok(())
    }

    pub fn vocab(&self) -> ActionVocab {
        ActionVocab { num_verbs: self.num_verbs, num_nouns: self.num_nouns }
    }
}

/// Hidden generative state kept alongside the annotations.
#[derive(Debug, Clone, PartialEq)]
pub struct LatentState {
    /// Scenario of each video, by video index.
    pub activities: Vec<u32>,
    /// Action of every segment of every video; segment `j` covers
    /// `[j * action_len_s, (j + 1) * action_len_s)`.
    pub timelines: Vec<Vec<ActionLabel>>,
    /// Per-scenario stationary distribution over joint action indices.
    pub action_dists: Vec<Vec<f64>>,
    /// Noise-free hand keyframes for each hand-forecast instance.
    pub clean_hands: BTreeMap<ClipKey, HandKeyframes>,
}

impl LatentState {
    /// Action active at time `t_s` in video `video`, clamped to the timeline.
    pub fn action_at(&self, video: usize, t_s: f64, action_len_s: f64) -> ActionLabel {
        let tl = &self.timelines[video];
        let j = ((t_s / action_len_s).floor().max(0.0) as usize).min(tl.len() - 1);
        tl[j]
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SynthDataset {
    pub config: SynthConfig,
    pub mq: MqGroundTruth,
    pub nlq: NlqGroundTruth,
    pub fhp: FhpGroundTruth,
    pub lta: LtaGroundTruth,
    pub sta: StaGroundTruth,
    pub scod: ScodGroundTruth,
    pub latent: LatentState,
}

impl SynthDataset {
    pub fn videos(&self) -> &[VideoMeta] {
        &self.mq.videos
    }

    pub fn video_index(&self, video_id: &str) -> Option<usize> {
        self.mq.videos.iter().position(|v| v.video_id() == video_id)
    }

    /// End time of anticipation clip `i` in a video.
    pub fn clip_end_s(&self, i: usize) -> f64 {
        (i + 1) as f64 * self.config.action_len_s
    }
}

fn round2(v: f64) -> f64 {
    (v * 100.0).round() / 100.0
}

fn scenario_distributions(rng: &mut ChaCha8Rng, activities: u32, actions: usize) -> Vec<Vec<f64>> {
    // Each scenario concentrates mass on a few signature actions.
    const WEIGHTS: [f64; 3] = [0.45, 0.2, 0.1];
    let uniform = (1.0 - WEIGHTS.iter().sum::<f64>()) / actions as f64;
    (0..activities)
        .map(|_| {
            let mut dist = vec![uniform; actions];
            let picks = rand::seq::index::sample(rng, actions, WEIGHTS.len().min(actions));
            for (w, a) in WEIGHTS.iter().zip(picks) {
                dist[a] += w;
            }
            let s: f64 = dist.iter().sum();
            dist.iter_mut().for_each(|p| *p /= s);
            dist
        })
        .collect()
}

fn random_box(rng: &mut ChaCha8Rng, (w, h): (f64, f64)) -> [f64; 4] {
    let bw = rng.random_range(0.1 * w..0.4 * w);
    let bh = rng.random_range(0.1 * h..0.4 * h);
    let x1 = rng.random_range(0.0..w - bw);
    let y1 = rng.random_range(0.0..h - bh);
    [round2(x1), round2(y1), round2(x1 + bw), round2(y1 + bh)]
}

fn clean_hand_track(rng: &mut ChaCha8Rng, (w, h): (f64, f64)) -> [HandPair; 5] {
    // Smooth drift plus a slow oscillation, sampled at keyframe times.
    let lc = Point::new(rng.random_range(0.2 * w..0.4 * w), rng.random_range(0.4 * h..0.7 * h));
    let rc = Point::new(rng.random_range(0.6 * w..0.8 * w), rng.random_range(0.4 * h..0.7 * h));
    let vel = (rng.random_range(-20.0..20.0), rng.random_range(-20.0..20.0));
    let amp = rng.random_range(5.0..25.0);
    let phase = rng.random_range(0.0..std::f64::consts::TAU);
    let contact_gap = rng.random_range(0.2..0.8);
    // keyframe order c, p, p1, p2, p3 in seconds after p3
    let times = [1.5 + contact_gap, 1.5, 1.0, 0.5, 0.0];
    let mut out = [HandPair::default(); 5];
    for (f, t) in out.iter_mut().zip(times) {
        let wobble = amp * (2.0 * t + phase).sin();
        f.left = Point::new(round2(lc.x + vel.0 * t + wobble), round2(lc.y + vel.1 * t));
        f.right = Point::new(round2(rc.x + vel.0 * t - wobble), round2(rc.y + vel.1 * t));
    }
    out
}

/// Build every track's annotations from one seed.
pub fn generate_synthetic(cfg: &SynthConfig) -> Result<SynthDataset> {
    cfg.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let vocab = cfg.vocab();
    let num_actions = vocab.num_actions();
    let action_dists = scenario_distributions(&mut rng, cfg.num_activities, num_actions);
    let samplers: Vec<WeightedIndex<f64>> =
        action_dists.iter().map(|d| WeightedIndex::new(d).expect("scenario distribution is positive")).collect();
    let hand_noise = Normal::new(0.0, cfg.hand_noise_px.max(f64::MIN_POSITIVE)).expect("finite std");
    let box_noise = Normal::new(0.0, cfg.box_jitter_px.max(f64::MIN_POSITIVE)).expect("finite std");

    let mut videos = Vec::new();
    let mut mq = Vec::new();
    let mut nlq = Vec::new();
    let mut fhp = BTreeMap::new();
    let mut lta = BTreeMap::new();
    let mut sta_images = Vec::new();
    let mut sta = BTreeMap::new();
    let mut scod_images = Vec::new();
    let mut scod = BTreeMap::new();
    let mut activities = Vec::new();
    let mut timelines = Vec::new();
    let mut clean_hands = BTreeMap::new();

    for v in 0..cfg.num_videos {
        let video_id = format!("vid{v:04}");
        let len_s = if cfg.video_len_s.0 < cfg.video_len_s.1 {
            rng.random_range(cfg.video_len_s.0..cfg.video_len_s.1)
        } else {
            cfg.video_len_s.0
        };
        let num_frames = (len_s * cfg.fps).round() as u64;
        let meta = VideoMeta::new(&video_id, num_frames, cfg.fps)?;
        let duration = meta.duration_s();
        videos.push(meta);

        // Moment queries and language queries.
        // At most one moment per class and video.
        let num_mq = rng.random_range(2..=4usize).min(cfg.num_mq_classes as usize);
        for class in rand::seq::index::sample(&mut rng, cfg.num_mq_classes as usize, num_mq) {
            let len = rng.random_range(2.0..10.0f64).min(duration);
            let start = round2(rng.random_range(0.0..=(duration - len)));
            let seg = TemporalSegment::new(start, round2(start + len).min(duration).max(start))?;
            mq.push(MomentInstance::new(&video_id, seg, class as u32));
        }
        for q in 0..rng.random_range(1..=3) {
            let len = rng.random_range(1.0..8.0f64).min(duration);
            let start = round2(rng.random_range(0.0..=(duration - len)));
            let seg = TemporalSegment::new(start, round2(start + len).min(duration).max(start))?;
            nlq.push(NlqInstance::new(&video_id, seg, format!("{video_id}_q{q}"))?);
        }

        // Action timeline from a sticky scenario-conditioned Markov chain.
        let activity = rng.random_range(0..cfg.num_activities);
        let sampler = &samplers[activity as usize];
        let num_segments = (duration / cfg.action_len_s).floor() as usize;
        let mut timeline = Vec::with_capacity(num_segments);
        let mut current = sampler.sample(&mut rng);
        for _ in 0..num_segments {
            timeline.push(ActionLabel::from_joint_index(current, vocab)?);
            if !rng.random_bool(cfg.action_stickiness) {
                current = sampler.sample(&mut rng);
            }
        }
        for i in 1..=num_segments.saturating_sub(cfg.horizon) {
            lta.insert(ClipKey::new(&video_id, i as u32), timeline[i..i + cfg.horizon].to_vec());
        }
        activities.push(activity);
        timelines.push(timeline);

        // Future hands.
        for j in 0..rng.random_range(1..=2u32) {
            let key = ClipKey::new(&video_id, j);
            let clean = clean_hand_track(&mut rng, cfg.resolution);
            let mut noisy = clean;
            let mut vis = [Visibility::default(); 5];
            for (f, vflag) in noisy.iter_mut().zip(vis.iter_mut()) {
                if cfg.hand_noise_px > 0.0 {
                    f.left.x = round2(f.left.x + hand_noise.sample(&mut rng));
                    f.left.y = round2(f.left.y + hand_noise.sample(&mut rng));
                    f.right.x = round2(f.right.x + hand_noise.sample(&mut rng));
                    f.right.y = round2(f.right.y + hand_noise.sample(&mut rng));
                }
                vflag.left = rng.random_bool(0.9);
                vflag.right = rng.random_bool(0.9);
            }
            clean_hands.insert(key.clone(), HandKeyframes::new(clean, None)?);
            fhp.insert(key, HandKeyframes::new(noisy, Some(vis))?);
        }

        // Short-term anticipation keyframes.
        for _ in 0..2 {
            let frame = rng.random_range(0..num_frames.max(1));
            let kf = format!("{video_id}_{frame:06}");
            sta_images.push(ImageMeta::new(&kf, cfg.resolution.0, cfg.resolution.1)?);
            let objects = (0..rng.random_range(1..=3))
                .map(|_| {
                    let b = random_box(&mut rng, cfg.resolution);
                    let noun = rng.random_range(0..cfg.num_nouns);
                    let verb = rng.random_range(0..cfg.num_verbs);
                    let ttc = round2(rng.random_range(0.25..2.0));
                    StaInstance::new(BoundingBox::new(b[0], b[1], b[2], b[3])?, noun, verb, ttc, 1.0)
                })
                .collect::<Result<Vec<_>>>()?;
            sta.insert(kf, objects);
        }

        // State-change object on the point-of-no-return frame.
        let frame = rng.random_range(0..num_frames.max(1));
        let kf = format!("{video_id}_pnr{frame:06}");
        scod_images.push(ImageMeta::new(&kf, cfg.resolution.0, cfg.resolution.1)?);
        let objects = (0..rng.random_range(1..=2))
            .map(|_| {
                let mut b = random_box(&mut rng, cfg.resolution);
                if cfg.box_jitter_px > 0.0 {
                    let dx = box_noise.sample(&mut rng);
                    let dy = box_noise.sample(&mut rng);
                    let (w, h) = cfg.resolution;
                    b[0] = round2((b[0] + dx).clamp(0.0, w));
                    b[2] = round2((b[2] + dx).clamp(b[0], w));
                    b[1] = round2((b[1] + dy).clamp(0.0, h));
                    b[3] = round2((b[3] + dy).clamp(b[1], h));
                }
                ScoredBox::new(BoundingBox::new(b[0], b[1], b[2], b[3])?, rng.random_range(0..cfg.num_nouns), 1.0)
            })
            .collect::<Result<Vec<_>>>()?;
        scod.insert(kf, objects);
    }

    Ok(SynthDataset {
        config: cfg.clone(),
        mq: MqGroundTruth { videos: videos.clone(), num_classes: cfg.num_mq_classes, instances: mq },
        nlq: NlqGroundTruth { videos, instances: nlq },
        fhp: FhpGroundTruth { resolution: cfg.resolution, instances: fhp },
        lta: LtaGroundTruth {
            config: LtaConfig { horizon: cfg.horizon, vocab, num_candidates: cfg.num_candidates },
            instances: lta,
        },
        sta: StaGroundTruth { images: sta_images, num_nouns: cfg.num_nouns, num_verbs: cfg.num_verbs, instances: sta },
        scod: ScodGroundTruth { images: scod_images, num_classes: cfg.num_nouns, instances: scod },
        latent: LatentState { activities, timelines, action_dists, clean_hands },
    })
}
