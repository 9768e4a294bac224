//! On-disk JSON records, one file struct per schema tag, plus conversion to
//! and from the validated in-memory datasets.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::dataset::{
    FhpGroundTruth, FhpPredictions, ImageMeta, LtaConfig, LtaGroundTruth, MqGroundTruth, NlqGroundTruth,
    ScodGroundTruth, ScodPredictions, SegmentPredictions, StaGroundTruth, StaPredictions,
};
use crate::error::{Error, Result};
use crate::fusion::expand_candidates;
use crate::model::{
    ActionLabel, ActionVocab, BoundingBox, ClipKey, HandKeyframes, HandPair, Keyframe, Label, LtaForecast,
    MomentInstance, NlqInstance, Point, RankedSegment, ScoreMatrix, ScoredBox, StaInstance, TemporalSegment, VideoMeta,
    Visibility,
};

pub const MQ: &str = "mq/1";
pub const MQ_PRED: &str = "mq-pred/1";
pub const NLQ: &str = "nlq/1";
pub const NLQ_PRED: &str = "nlq-pred/1";
pub const FHP: &str = "fhp/1";
pub const FHP_PRED: &str = "fhp-pred/1";
pub const LTA: &str = "lta/1";
pub const LTA_PRED: &str = "lta-pred/1";
pub const STA: &str = "sta/1";
pub const STA_PRED: &str = "sta-pred/1";
pub const SCOD: &str = "scod/1";
pub const SCOD_PRED: &str = "scod-pred/1";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VideoRecord {
    pub video_id: String,
    pub num_frames: u64,
    pub fps: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MqRecord {
    pub video_id: String,
    pub start_s: f64,
    pub end_s: f64,
    pub class_id: u32,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MqFile {
    pub schema: String,
    pub num_classes: u32,
    pub videos: Vec<VideoRecord>,
    pub instances: Vec<MqRecord>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NlqRecord {
    pub video_id: String,
    pub start_s: f64,
    pub end_s: f64,
    pub query_id: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NlqFile {
    pub schema: String,
    pub videos: Vec<VideoRecord>,
    pub instances: Vec<NlqRecord>,
}

/// MQ predictions carry `class_id`, NLQ predictions carry `query_id`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SegmentPredRecord {
    pub video_id: String,
    pub start_s: f64,
    pub end_s: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub class_id: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub query_id: Option<String>,
    pub score: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SegmentPredFile {
    pub schema: String,
    pub predictions: Vec<SegmentPredRecord>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct VisibleRecord {
    pub left: bool,
    pub right: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HandFrameRecord {
    pub left: [f64; 2],
    pub right: [f64; 2],
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub visible: Option<VisibleRecord>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KeyframesRecord {
    pub c: HandFrameRecord,
    pub p: HandFrameRecord,
    pub p1: HandFrameRecord,
    pub p2: HandFrameRecord,
    pub p3: HandFrameRecord,
}

impl KeyframesRecord {
    fn frames(&self) -> [(Keyframe, &HandFrameRecord); 5] {
        [
            (Keyframe::C, &self.c),
            (Keyframe::P, &self.p),
            (Keyframe::P1, &self.p1),
            (Keyframe::P2, &self.p2),
            (Keyframe::P3, &self.p3),
        ]
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FhpRecord {
    pub video_id: String,
    pub clip_index: u32,
    pub keyframes: KeyframesRecord,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FhpFile {
    pub schema: String,
    /// Canonical `[width, height]` of the pixel coordinates.
    pub resolution: [f64; 2],
    pub instances: Vec<FhpRecord>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FhpPredFile {
    pub schema: String,
    pub predictions: Vec<FhpRecord>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct LtaConfigRecord {
    #[serde(rename = "Z")]
    pub z: usize,
    #[serde(rename = "C_v")]
    pub c_v: u32,
    #[serde(rename = "C_n")]
    pub c_n: u32,
    #[serde(rename = "K")]
    pub k: usize,
}

/// `[verb, noun]`.
pub type ActionRecord = [u32; 2];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LtaRecord {
    pub video_id: String,
    pub clip_index: u32,
    pub sequence: Vec<ActionRecord>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LtaFile {
    pub schema: String,
    pub config: LtaConfigRecord,
    pub instances: Vec<LtaRecord>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScoreMatrixRecord {
    pub verb: Vec<Vec<f64>>,
    pub noun: Vec<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LtaPredRecord {
    pub video_id: String,
    pub clip_index: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub candidates: Option<Vec<Vec<ActionRecord>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub score_matrix: Option<ScoreMatrixRecord>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LtaPredFile {
    pub schema: String,
    #[serde(rename = "Z")]
    pub z: usize,
    pub predictions: Vec<LtaPredRecord>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ImageRecord {
    pub keyframe_id: String,
    /// `[width, height]` in pixels.
    pub size: [f64; 2],
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StaRecord {
    pub keyframe_id: String,
    #[serde(rename = "box")]
    pub bbox: [f64; 4],
    pub noun: u32,
    pub verb: u32,
    pub ttc_s: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub score: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StaFile {
    pub schema: String,
    pub num_nouns: u32,
    pub num_verbs: u32,
    pub images: Vec<ImageRecord>,
    pub instances: Vec<StaRecord>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StaPredFile {
    pub schema: String,
    pub predictions: Vec<StaRecord>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScodRecord {
    pub keyframe_id: String,
    #[serde(rename = "box")]
    pub bbox: [f64; 4],
    pub noun: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub score: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScodFile {
    pub schema: String,
    pub num_classes: u32,
    pub images: Vec<ImageRecord>,
    pub instances: Vec<ScodRecord>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScodPredFile {
    pub schema: String,
    pub predictions: Vec<ScodRecord>,
}

fn video_records(videos: &[VideoMeta]) -> Vec<VideoRecord> {
    videos
        .iter()
        .map(|v| VideoRecord { video_id: v.video_id().to_owned(), num_frames: v.num_frames(), fps: v.fps() })
        .collect()
}

fn video_metas(videos: &[VideoRecord]) -> Result<Vec<VideoMeta>> {
    videos.iter().map(|v| VideoMeta::new(&v.video_id, v.num_frames, v.fps)).collect()
}

fn image_records(images: &[ImageMeta]) -> Vec<ImageRecord> {
    images.iter().map(|i| ImageRecord { keyframe_id: i.keyframe_id.clone(), size: [i.width, i.height] }).collect()
}

fn image_metas(images: &[ImageRecord]) -> Result<Vec<ImageMeta>> {
    images.iter().map(|i| ImageMeta::new(&i.keyframe_id, i.size[0], i.size[1])).collect()
}

fn bbox(b: &[f64; 4]) -> Result<BoundingBox> {
    BoundingBox::new(b[0], b[1], b[2], b[3])
}

fn dangling(kind: &str, ids: BTreeSet<String>) -> Result<()> {
    if ids.is_empty() {
        return Ok(());
    }
    let list: Vec<String> = ids.into_iter().collect();
    Err(Error::Reference(format!("unknown {kind}: {}", list.join(", "))))
}

impl MqFile {
    pub fn from_dataset(gt: &MqGroundTruth) -> Self {
        Self {
            schema: MQ.into(),
            num_classes: gt.num_classes,
            videos: video_records(&gt.videos),
            instances: gt
                .instances
                .iter()
                .map(|m| MqRecord {
                    video_id: m.video_id().to_owned(),
                    start_s: m.segment().start_s(),
                    end_s: m.segment().end_s(),
                    class_id: m.class_id(),
                })
                .collect(),
        }
    }

    pub fn into_dataset(self) -> Result<MqGroundTruth> {
        let instances = self
            .instances
            .iter()
            .map(|r| Ok(MomentInstance::new(&r.video_id, TemporalSegment::new(r.start_s, r.end_s)?, r.class_id)))
            .collect::<Result<_>>()?;
        Ok(MqGroundTruth { videos: video_metas(&self.videos)?, num_classes: self.num_classes, instances })
    }
}

impl NlqFile {
    pub fn from_dataset(gt: &NlqGroundTruth) -> Self {
        Self {
            schema: NLQ.into(),
            videos: video_records(&gt.videos),
            instances: gt
                .instances
                .iter()
                .map(|m| NlqRecord {
                    video_id: m.video_id().to_owned(),
                    start_s: m.segment().start_s(),
                    end_s: m.segment().end_s(),
                    query_id: m.query_id().to_owned(),
                })
                .collect(),
        }
    }

    pub fn into_dataset(self) -> Result<NlqGroundTruth> {
        let instances = self
            .instances
            .iter()
            .map(|r| NlqInstance::new(&r.video_id, TemporalSegment::new(r.start_s, r.end_s)?, &r.query_id))
            .collect::<Result<_>>()?;
        Ok(NlqGroundTruth { videos: video_metas(&self.videos)?, instances })
    }
}

impl SegmentPredFile {
    /// `schema` selects which label field is written.
    pub fn from_predictions(schema: &str, preds: &[RankedSegment]) -> Self {
        Self {
            schema: schema.into(),
            predictions: preds
                .iter()
                .map(|p| {
                    let (class_id, query_id) = match p.label() {
                        Label::Class(c) => (Some(*c), None),
                        Label::Query(q) => (None, Some(q.clone())),
                    };
                    SegmentPredRecord {
                        video_id: p.video_id().to_owned(),
                        start_s: p.segment().start_s(),
                        end_s: p.segment().end_s(),
                        class_id,
                        query_id,
                        score: p.score(),
                    }
                })
                .collect(),
        }
    }

    /// Convert, checking every prediction against the ground-truth videos.
    pub fn into_predictions(self, videos: &[VideoMeta]) -> Result<SegmentPredictions> {
        let known: BTreeSet<&str> = videos.iter().map(|v| v.video_id()).collect();
        dangling(
            "video_id",
            self.predictions
                .iter()
                .filter(|p| !known.contains(p.video_id.as_str()))
                .map(|p| p.video_id.clone())
                .collect(),
        )?;
        self.predictions
            .into_iter()
            .map(|r| {
                let label = match (r.class_id, r.query_id) {
                    (Some(c), None) => Label::Class(c),
                    (None, Some(q)) => Label::Query(q),
                    _ => return Err(Error::Schema("prediction needs exactly one of class_id, query_id".into())),
                };
                RankedSegment::new(r.video_id, label, TemporalSegment::new(r.start_s, r.end_s)?, r.score)
            })
            .collect()
    }
}

fn frame_record(pair: &HandPair, vis: Option<&Visibility>) -> HandFrameRecord {
    HandFrameRecord {
        left: [pair.left.x, pair.left.y],
        right: [pair.right.x, pair.right.y],
        visible: vis.map(|v| VisibleRecord { left: v.left, right: v.right }),
    }
}

fn fhp_record(key: &ClipKey, h: &HandKeyframes) -> FhpRecord {
    let f = |k: Keyframe| frame_record(h.at(k), h.visibility().map(|v| &v[k.index()]));
    FhpRecord {
        video_id: key.video_id.clone(),
        clip_index: key.clip_index,
        keyframes: KeyframesRecord {
            c: f(Keyframe::C),
            p: f(Keyframe::P),
            p1: f(Keyframe::P1),
            p2: f(Keyframe::P2),
            p3: f(Keyframe::P3),
        },
    }
}

fn hand_keyframes(r: &FhpRecord) -> Result<HandKeyframes> {
    let mut frames = [HandPair::default(); 5];
    let mut vis = [Visibility::default(); 5];
    let mut any_vis = false;
    for (k, f) in r.keyframes.frames() {
        frames[k.index()] =
            HandPair { left: Point::new(f.left[0], f.left[1]), right: Point::new(f.right[0], f.right[1]) };
        if let Some(v) = f.visible {
            any_vis = true;
            vis[k.index()] = Visibility { left: v.left, right: v.right };
        }
    }
    HandKeyframes::new(frames, any_vis.then_some(vis))
}

fn fhp_map(records: &[FhpRecord]) -> Result<BTreeMap<ClipKey, HandKeyframes>> {
    let mut out = BTreeMap::new();
    for r in records {
        let key = ClipKey::new(&r.video_id, r.clip_index);
        if out.insert(key.clone(), hand_keyframes(r)?).is_some() {
            return Err(Error::Schema(format!("duplicate hand instance {key}")));
        }
    }
    Ok(out)
}

impl FhpFile {
    pub fn from_dataset(gt: &FhpGroundTruth) -> Self {
        Self {
            schema: FHP.into(),
            resolution: [gt.resolution.0, gt.resolution.1],
            instances: gt.instances.iter().map(|(k, h)| fhp_record(k, h)).collect(),
        }
    }

    pub fn into_dataset(self) -> Result<FhpGroundTruth> {
        Ok(FhpGroundTruth {
            resolution: (self.resolution[0], self.resolution[1]),
            instances: fhp_map(&self.instances)?,
        })
    }
}

impl FhpPredFile {
    pub fn from_predictions(preds: &FhpPredictions) -> Self {
        Self { schema: FHP_PRED.into(), predictions: preds.iter().map(|(k, h)| fhp_record(k, h)).collect() }
    }

    pub fn into_predictions(self, gt: &FhpGroundTruth) -> Result<FhpPredictions> {
        let preds = fhp_map(&self.predictions)?;
        dangling(
            "hand clip",
            preds.keys().filter(|k| !gt.instances.contains_key(k)).map(ToString::to_string).collect(),
        )?;
        Ok(preds)
    }
}

fn action_record(a: &ActionLabel) -> ActionRecord {
    [a.verb(), a.noun()]
}

fn actions(seq: &[ActionRecord], vocab: ActionVocab) -> Result<Vec<ActionLabel>> {
    seq.iter().map(|[v, n]| ActionLabel::new(*v, *n, vocab)).collect()
}

impl LtaFile {
    pub fn from_dataset(gt: &LtaGroundTruth) -> Self {
        let c = gt.config;
        Self {
            schema: LTA.into(),
            config: LtaConfigRecord {
                z: c.horizon,
                c_v: c.vocab.num_verbs,
                c_n: c.vocab.num_nouns,
                k: c.num_candidates,
            },
            instances: gt
                .instances
                .iter()
                .map(|(k, seq)| LtaRecord {
                    video_id: k.video_id.clone(),
                    clip_index: k.clip_index,
                    sequence: seq.iter().map(action_record).collect(),
                })
                .collect(),
        }
    }

    pub fn into_dataset(self) -> Result<LtaGroundTruth> {
        let c = self.config;
        let vocab = ActionVocab::new(c.c_v, c.c_n)?;
        let mut instances = BTreeMap::new();
        for r in &self.instances {
            let seq = actions(&r.sequence, vocab)?;
            if seq.len() != c.z {
                return Err(Error::invalid(
                    "lta ground truth",
                    format!("sequence length {} differs from Z={}", seq.len(), c.z),
                ));
            }
            let key = ClipKey::new(&r.video_id, r.clip_index);
            if instances.insert(key.clone(), seq).is_some() {
                return Err(Error::Schema(format!("duplicate anticipation instance {key}")));
            }
        }
        Ok(LtaGroundTruth { config: LtaConfig { horizon: c.z, vocab, num_candidates: c.k }, instances })
    }
}

impl LtaPredFile {
    pub fn from_predictions(horizon: usize, preds: &[LtaForecast]) -> Self {
        Self {
            schema: LTA_PRED.into(),
            z: horizon,
            predictions: preds
                .iter()
                .map(|f| LtaPredRecord {
                    video_id: f.key().video_id.clone(),
                    clip_index: f.key().clip_index,
                    candidates: Some(f.candidates().iter().map(|c| c.iter().map(action_record).collect()).collect()),
                    score_matrix: f
                        .score_matrix()
                        .map(|m| ScoreMatrixRecord { verb: m.verb_rows().to_vec(), noun: m.noun_rows().to_vec() }),
                })
                .collect(),
        }
    }

    /// Convert against ground truth; forecasts given only as score matrices
    /// are expanded into the `k` most probable sequences.
    pub fn into_predictions(self, gt: &LtaGroundTruth, k: usize) -> Result<Vec<LtaForecast>> {
        let cfg = gt.config;
        if self.z != cfg.horizon {
            return Err(Error::Schema(format!("prediction file has Z={}, ground truth has Z={}", self.z, cfg.horizon)));
        }
        dangling(
            "anticipation clip",
            self.predictions
                .iter()
                .map(|p| ClipKey::new(&p.video_id, p.clip_index))
                .filter(|k| !gt.instances.contains_key(k))
                .map(|k| k.to_string())
                .collect(),
        )?;
        let mut seen = BTreeSet::new();
        self.predictions
            .into_iter()
            .map(|r| {
                let key = ClipKey::new(&r.video_id, r.clip_index);
                if !seen.insert(key.clone()) {
                    return Err(Error::Schema(format!("duplicate forecast {key}")));
                }
                let matrix = r.score_matrix.map(|m| ScoreMatrix::new(m.verb, m.noun, cfg.vocab)).transpose()?;
                let candidates = match (r.candidates, &matrix) {
                    (Some(c), _) => c.iter().map(|s| actions(s, cfg.vocab)).collect::<Result<_>>()?,
                    (None, Some(m)) => expand_candidates(m, k)?,
                    (None, None) => {
                        return Err(Error::Schema(format!("{key}: needs candidates or score_matrix")));
                    }
                };
                LtaForecast::new(key, candidates, matrix, cfg.horizon)
            })
            .collect()
    }
}

fn sta_record(kf: &str, s: &StaInstance, with_score: bool) -> StaRecord {
    StaRecord {
        keyframe_id: kf.to_owned(),
        bbox: s.bbox().coords(),
        noun: s.noun(),
        verb: s.verb(),
        ttc_s: s.ttc_s(),
        score: with_score.then_some(s.score()),
    }
}

fn sta_map(records: &[StaRecord]) -> Result<BTreeMap<String, Vec<StaInstance>>> {
    let mut out: BTreeMap<String, Vec<StaInstance>> = BTreeMap::new();
    for r in records {
        let inst = StaInstance::new(bbox(&r.bbox)?, r.noun, r.verb, r.ttc_s, r.score.unwrap_or(1.0))?;
        out.entry(r.keyframe_id.clone()).or_default().push(inst);
    }
    Ok(out)
}

fn known_images<'a, T>(images: &[ImageMeta], preds: impl Iterator<Item = (&'a String, T)>) -> Result<()> {
    let known: BTreeSet<&str> = images.iter().map(|i| i.keyframe_id.as_str()).collect();
    dangling("keyframe_id", preds.filter(|(k, _)| !known.contains(k.as_str())).map(|(k, _)| k.clone()).collect())
}

impl StaFile {
    pub fn from_dataset(gt: &StaGroundTruth) -> Self {
        Self {
            schema: STA.into(),
            num_nouns: gt.num_nouns,
            num_verbs: gt.num_verbs,
            images: image_records(&gt.images),
            instances: gt.instances.iter().flat_map(|(k, v)| v.iter().map(move |s| sta_record(k, s, false))).collect(),
        }
    }

    pub fn into_dataset(self) -> Result<StaGroundTruth> {
        Ok(StaGroundTruth {
            images: image_metas(&self.images)?,
            num_nouns: self.num_nouns,
            num_verbs: self.num_verbs,
            instances: sta_map(&self.instances)?,
        })
    }
}

impl StaPredFile {
    pub fn from_predictions(preds: &StaPredictions) -> Self {
        Self {
            schema: STA_PRED.into(),
            predictions: preds.iter().flat_map(|(k, v)| v.iter().map(move |s| sta_record(k, s, true))).collect(),
        }
    }

    pub fn into_predictions(self, gt: &StaGroundTruth) -> Result<StaPredictions> {
        if let Some(i) = self.predictions.iter().position(|p| p.score.is_none()) {
            return Err(Error::Schema(format!("prediction {i} has no score")));
        }
        let preds = sta_map(&self.predictions)?;
        known_images(&gt.images, preds.iter())?;
        Ok(preds)
    }
}

fn scod_record(kf: &str, s: &ScoredBox, with_score: bool) -> ScodRecord {
    ScodRecord {
        keyframe_id: kf.to_owned(),
        bbox: s.bbox().coords(),
        noun: s.class_id(),
        score: with_score.then_some(s.score()),
    }
}

fn scod_map(records: &[ScodRecord]) -> Result<BTreeMap<String, Vec<ScoredBox>>> {
    let mut out: BTreeMap<String, Vec<ScoredBox>> = BTreeMap::new();
    for r in records {
        let b = ScoredBox::new(bbox(&r.bbox)?, r.noun, r.score.unwrap_or(1.0))?;
        out.entry(r.keyframe_id.clone()).or_default().push(b);
    }
    Ok(out)
}

impl ScodFile {
    pub fn from_dataset(gt: &ScodGroundTruth) -> Self {
        Self {
            schema: SCOD.into(),
            num_classes: gt.num_classes,
            images: image_records(&gt.images),
            instances: gt.instances.iter().flat_map(|(k, v)| v.iter().map(move |s| scod_record(k, s, false))).collect(),
        }
    }

    pub fn into_dataset(self) -> Result<ScodGroundTruth> {
        Ok(ScodGroundTruth {
            images: image_metas(&self.images)?,
            num_classes: self.num_classes,
            instances: scod_map(&self.instances)?,
        })
    }
}

impl ScodPredFile {
    pub fn from_predictions(preds: &ScodPredictions) -> Self {
        Self {
            schema: SCOD_PRED.into(),
            predictions: preds.iter().flat_map(|(k, v)| v.iter().map(move |s| scod_record(k, s, true))).collect(),
        }
    }

    pub fn into_predictions(self, gt: &ScodGroundTruth) -> Result<ScodPredictions> {
        if let Some(i) = self.predictions.iter().position(|p| p.score.is_none()) {
            return Err(Error::Schema(format!("prediction {i} has no score")));
        }
        let preds = scod_map(&self.predictions)?;
        known_images(&gt.images, preds.iter())?;
        Ok(preds)
    }
}

pub const LTA_CLIPS: &str = "lta-clips/1";

/// Per-clip score matrices for one or more forecasts, input to voting.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LtaClipRecord {
    pub video_id: String,
    pub clip_index: u32,
    pub score_matrix: ScoreMatrixRecord,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LtaClipScoresFile {
    pub schema: String,
    #[serde(rename = "Z")]
    pub z: usize,
    #[serde(rename = "C_v")]
    pub c_v: u32,
    #[serde(rename = "C_n")]
    pub c_n: u32,
    pub clips: Vec<LtaClipRecord>,
}

impl LtaClipScoresFile {
    /// Score matrices grouped by forecast, in file order within a group.
    pub fn into_groups(self) -> Result<(ActionVocab, BTreeMap<ClipKey, Vec<ScoreMatrix>>)> {
        let vocab = ActionVocab::new(self.c_v, self.c_n)?;
        let mut out: BTreeMap<ClipKey, Vec<ScoreMatrix>> = BTreeMap::new();
        for (i, c) in self.clips.into_iter().enumerate() {
            let m = ScoreMatrix::new(c.score_matrix.verb, c.score_matrix.noun, vocab)
                .map_err(|e| Error::Schema(format!("clips[{i}]: {e}")))?;
            if m.horizon() != self.z {
                return Err(Error::Schema(format!("clips[{i}]: {} positions, expected Z={}", m.horizon(), self.z)));
            }
            out.entry(ClipKey::new(c.video_id, c.clip_index)).or_default().push(m);
        }
        Ok((vocab, out))
    }
}
