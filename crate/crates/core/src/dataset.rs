//! Per-track ground-truth and prediction collections.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::model::{
    ActionLabel, ActionVocab, ClipKey, HandKeyframes, LabeledSegment, LtaForecast, MomentInstance, NlqInstance,
    RankedSegment, ScoredBox, StaInstance, VideoMeta,
};

#[derive(Debug, Clone, PartialEq)]
pub struct MqGroundTruth {
    pub videos: Vec<VideoMeta>,
    pub num_classes: u32,
    pub instances: Vec<MomentInstance>,
}

impl MqGroundTruth {
    pub fn labeled(&self) -> Vec<LabeledSegment> {
        self.instances.iter().map(MomentInstance::labeled).collect()
    }

    /// Every ground-truth instance as a prediction with score 1.
    pub fn as_predictions(&self) -> SegmentPredictions {
        perfect_segments(&self.labeled())
    }
}

fn perfect_segments(gts: &[LabeledSegment]) -> SegmentPredictions {
    gts.iter()
        .map(|g| RankedSegment::new(&g.video_id, g.label.clone(), g.segment, 1.0).expect("finite score"))
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct NlqGroundTruth {
    pub videos: Vec<VideoMeta>,
    pub instances: Vec<NlqInstance>,
}

impl NlqGroundTruth {
    pub fn labeled(&self) -> Vec<LabeledSegment> {
        self.instances.iter().map(NlqInstance::labeled).collect()
    }

    pub fn as_predictions(&self) -> SegmentPredictions {
        perfect_segments(&self.labeled())
    }
}

/// MQ or NLQ predictions.
pub type SegmentPredictions = Vec<RankedSegment>;

#[derive(Debug, Clone, PartialEq)]
pub struct FhpGroundTruth {
    /// Canonical `(width, height)` the pixel coordinates refer to.
    pub resolution: (f64, f64),
    pub instances: BTreeMap<ClipKey, HandKeyframes>,
}

pub type FhpPredictions = BTreeMap<ClipKey, HandKeyframes>;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LtaConfig {
    /// Number of future actions `Z`.
    pub horizon: usize,
    pub vocab: ActionVocab,
    /// Candidate sequences per forecast `K`.
    pub num_candidates: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LtaGroundTruth {
    pub config: LtaConfig,
    pub instances: BTreeMap<ClipKey, Vec<ActionLabel>>,
}

impl LtaGroundTruth {
    /// One forecast per instance whose only candidate is the truth.
    pub fn as_predictions(&self) -> LtaPredictions {
        self.instances
            .iter()
            .map(|(k, seq)| {
                LtaForecast::new(k.clone(), vec![seq.clone()], None, self.config.horizon).expect("valid ground truth")
            })
            .collect()
    }
}

pub type LtaPredictions = Vec<LtaForecast>;

#[derive(Debug, Clone, PartialEq)]
pub struct ImageMeta {
    pub keyframe_id: String,
    pub width: f64,
    pub height: f64,
}

impl ImageMeta {
    pub fn new(keyframe_id: impl Into<String>, width: f64, height: f64) -> Result<Self> {
        let keyframe_id = keyframe_id.into();
        if keyframe_id.is_empty() {
            return Err(Error::invalid("image", "empty keyframe_id"));
        }
        if !(width.is_finite() && width > 0.0 && height.is_finite() && height > 0.0) {
            return Err(Error::invalid("image", format!("size ({width}, {height}) must be positive")));
        }
        Ok(Self { keyframe_id, width, height })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct StaGroundTruth {
    pub images: Vec<ImageMeta>,
    pub num_nouns: u32,
    pub num_verbs: u32,
    pub instances: BTreeMap<String, Vec<StaInstance>>,
}

pub type StaPredictions = BTreeMap<String, Vec<StaInstance>>;

#[derive(Debug, Clone, PartialEq)]
pub struct ScodGroundTruth {
    pub images: Vec<ImageMeta>,
    pub num_classes: u32,
    pub instances: BTreeMap<String, Vec<ScoredBox>>,
}

pub type ScodPredictions = BTreeMap<String, Vec<ScoredBox>>;
