//! Prediction aggregation: multi-clip voting, multi-view averaging, NMS,
//! result splicing and box positional encoding.

use std::collections::{BTreeMap, HashMap};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::metrics::{rank_by_score, temporal_iou, top_k_indices};
use crate::model::{
    ActionLabel, ActionVocab, BoundingBox, HandKeyframes, HandPair, Label, Point, RankedSegment, ScoreMatrix,
    StaInstance, Visibility,
};

/// IoU threshold for ordinary detector NMS.
pub const DEFAULT_NMS_IOU: f64 = 0.5;
/// IoU threshold for NMS after splicing two result files.
pub const DEFAULT_FUSION_NMS_IOU: f64 = 0.75;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum VoteRule {
    /// Average per-position probabilities across clips, then argmax.
    #[default]
    MeanProb,
    /// Plurality of per-clip argmaxes.
    Majority,
}

impl std::str::FromStr for VoteRule {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "mean_prob" | "mean" => Ok(VoteRule::MeanProb),
            "majority" => Ok(VoteRule::Majority),
            _ => Err(Error::param(format!("unknown vote rule {s:?}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct VoteConfig {
    pub rule: VoteRule,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FusionConfig {
    pub nms_iou_thresh: f64,
    pub top_k: usize,
    pub temporal_nms_tiou: f64,
}

impl FusionConfig {
    pub fn new(nms_iou_thresh: f64, top_k: usize, temporal_nms_tiou: f64) -> Result<Self> {
        for (name, t) in [("NMS IoU", nms_iou_thresh), ("temporal NMS tIoU", temporal_nms_tiou)] {
            if !(t > 0.0 && t <= 1.0) {
                return Err(Error::param(format!("{name} threshold {t} outside (0, 1]")));
            }
        }
        if top_k == 0 {
            return Err(Error::param("top_k must be at least 1"));
        }
        Ok(Self { nms_iou_thresh, top_k, temporal_nms_tiou })
    }
}

impl Default for FusionConfig {
    fn default() -> Self {
        Self { nms_iou_thresh: DEFAULT_FUSION_NMS_IOU, top_k: 5, temporal_nms_tiou: 0.5 }
    }
}

/// First index of the maximum.
fn argmax(row: &[f64]) -> usize {
    let mut best = 0;
    for (i, v) in row.iter().enumerate() {
        if *v > row[best] {
            best = i;
        }
    }
    best
}

/// Entry-wise mean of `rows`, summed in sorted order so the result does not
/// depend on clip order.
fn mean_rows(rows: &[&[f64]]) -> Vec<f64> {
    let width = rows[0].len();
    let mut column = Vec::with_capacity(rows.len());
    (0..width)
        .map(|j| {
            column.clear();
            column.extend(rows.iter().map(|r| r[j]));
            column.sort_by(f64::total_cmp);
            column.iter().sum::<f64>() / rows.len() as f64
        })
        .collect()
}

fn plurality(argmaxes: &[usize], mean: &[f64]) -> usize {
    let mut votes = vec![0usize; mean.len()];
    for &a in argmaxes {
        votes[a] += 1;
    }
    let mut best = 0;
    for i in 1..votes.len() {
        if votes[i] > votes[best] || (votes[i] == votes[best] && mean[i] > mean[best]) {
            best = i;
        }
    }
    best
}

/// Combine per-clip forecasts into one sequence and one fused score matrix.
pub fn multi_clips_vote(per_clip: &[ScoreMatrix], cfg: VoteConfig) -> Result<(Vec<ActionLabel>, ScoreMatrix)> {
    let Some(first) = per_clip.first() else {
        return Err(Error::shape("no clips to vote over"));
    };
    let (z, vocab) = (first.horizon(), first.vocab());
    for (i, m) in per_clip.iter().enumerate() {
        if m.horizon() != z || m.vocab() != vocab {
            return Err(Error::shape(format!(
                "clip {i} has shape {}x({},{}), expected {z}x({},{})",
                m.horizon(),
                m.vocab().num_verbs,
                m.vocab().num_nouns,
                vocab.num_verbs,
                vocab.num_nouns
            )));
        }
    }
    let mut verb_rows = Vec::with_capacity(z);
    let mut noun_rows = Vec::with_capacity(z);
    let mut labels = Vec::with_capacity(z);
    for pos in 0..z {
        let vr: Vec<&[f64]> = per_clip.iter().map(|m| m.verb_rows()[pos].as_slice()).collect();
        let nr: Vec<&[f64]> = per_clip.iter().map(|m| m.noun_rows()[pos].as_slice()).collect();
        let vmean = mean_rows(&vr);
        let nmean = mean_rows(&nr);
        let (verb, noun) = match cfg.rule {
            VoteRule::MeanProb => (argmax(&vmean), argmax(&nmean)),
            VoteRule::Majority => {
                let va: Vec<usize> = vr.iter().map(|r| argmax(r)).collect();
                let na: Vec<usize> = nr.iter().map(|r| argmax(r)).collect();
                (plurality(&va, &vmean), plurality(&na, &nmean))
            }
        };
        labels.push(ActionLabel::new(verb as u32, noun as u32, vocab)?);
        verb_rows.push(vmean);
        noun_rows.push(nmean);
    }
    Ok((labels, ScoreMatrix::new(verb_rows, noun_rows, vocab)?))
}

/// The `k` most probable sequences when positions are independent and each
/// position's action probability is `p(verb) * p(noun)`.
///
/// Ties resolve toward lexicographically smaller joint-index sequences.
pub fn expand_candidates(m: &ScoreMatrix, k: usize) -> Result<Vec<Vec<ActionLabel>>> {
    if k == 0 {
        return Err(Error::param("need at least one candidate"));
    }
    let vocab: ActionVocab = m.vocab();
    let mut beam: Vec<(f64, Vec<usize>)> = vec![(0.0, Vec::new())];
    for (vr, nr) in m.verb_rows().iter().zip(m.noun_rows()) {
        let joint: Vec<f64> = vr.iter().flat_map(|pv| nr.iter().map(move |pn| (pv * pn).ln())).collect();
        let top = top_k_indices(&joint, k);
        let mut next: Vec<(f64, Vec<usize>)> = Vec::with_capacity(beam.len() * top.len());
        for (score, seq) in &beam {
            for &a in &top {
                let mut s = seq.clone();
                s.push(a);
                next.push((score + joint[a], s));
            }
        }
        next.sort_by(|x, y| y.0.total_cmp(&x.0).then_with(|| x.1.cmp(&y.1)));
        next.truncate(k);
        beam = next;
    }
    beam.into_iter()
        .map(|(_, seq)| seq.into_iter().map(|j| ActionLabel::from_joint_index(j, vocab)).collect())
        .collect()
}

/// Coordinate-wise mean over views. Visibility flags, when any view has
/// them, are OR-ed.
pub fn multi_view_average(views: &[HandKeyframes]) -> Result<HandKeyframes> {
    if views.is_empty() {
        return Err(Error::shape("no views to average"));
    }
    let n = views.len() as f64;
    let mut frames = [HandPair::default(); 5];
    for (i, f) in frames.iter_mut().enumerate() {
        let (mut lx, mut ly, mut rx, mut ry) = (0.0, 0.0, 0.0, 0.0);
        for v in views {
            let p = &v.frames()[i];
            lx += p.left.x;
            ly += p.left.y;
            rx += p.right.x;
            ry += p.right.y;
        }
        f.left = Point::new(lx / n, ly / n);
        f.right = Point::new(rx / n, ry / n);
    }
    let visibility = if views.iter().any(|v| v.visibility().is_some()) {
        let mut vis = [Visibility { left: false, right: false }; 5];
        for v in views {
            for (i, out) in vis.iter_mut().enumerate() {
                let (l, r) = match v.visibility() {
                    Some(flags) => (flags[i].left, flags[i].right),
                    None => (true, true),
                };
                out.left |= l;
                out.right |= r;
            }
        }
        Some(vis)
    } else {
        None
    };
    HandKeyframes::new(frames, visibility)
}

/// Greedy NMS. Returns kept indices, highest score first; boxes with
/// `IoU > iou_thresh` against a kept box are dropped.
pub fn nms(boxes: &[BoundingBox], scores: &[f64], iou_thresh: f64) -> Result<Vec<usize>> {
    if boxes.len() != scores.len() {
        return Err(Error::shape(format!("{} boxes but {} scores", boxes.len(), scores.len())));
    }
    if !(iou_thresh > 0.0 && iou_thresh <= 1.0) {
        return Err(Error::param(format!("IoU threshold {iou_thresh} outside (0, 1]")));
    }
    let mut keep: Vec<usize> = Vec::new();
    for i in rank_by_score(scores) {
        if keep.iter().all(|&k| boxes[k].iou(&boxes[i]) <= iou_thresh) {
            keep.push(i);
        }
    }
    Ok(keep)
}

/// The `k` best-scoring instances, best first.
pub fn topk_by_noun_score(preds: &[StaInstance], k: usize) -> Vec<StaInstance> {
    let scores: Vec<f64> = preds.iter().map(StaInstance::score).collect();
    top_k_indices(&scores, k).into_iter().map(|i| preds[i].clone()).collect()
}

/// Per keyframe, concatenate `a` then `b` and suppress overlaps regardless
/// of labels. Survivors are listed best first.
pub fn splice_and_nms(
    a: &BTreeMap<String, Vec<StaInstance>>,
    b: &BTreeMap<String, Vec<StaInstance>>,
    cfg: &FusionConfig,
) -> Result<BTreeMap<String, Vec<StaInstance>>> {
    let mut out = BTreeMap::new();
    let keys: std::collections::BTreeSet<&String> = a.keys().chain(b.keys()).collect();
    for kf in keys {
        let joined: Vec<&StaInstance> = a.get(kf).into_iter().chain(b.get(kf)).flatten().collect();
        let boxes: Vec<BoundingBox> = joined.iter().map(|p| *p.bbox()).collect();
        let scores: Vec<f64> = joined.iter().map(|p| p.score()).collect();
        let kept = nms(&boxes, &scores, cfg.nms_iou_thresh)?;
        out.insert(kf.clone(), kept.into_iter().map(|i| joined[i].clone()).collect());
    }
    Ok(out)
}

/// Merge two prediction lists and run 1-D NMS within each (video, label).
///
/// Output is sorted by descending score with ties resolved `a` before `b`,
/// then by input position.
pub fn post_fuse_segments(
    a: &[RankedSegment],
    b: &[RankedSegment],
    temporal_nms_tiou: f64,
) -> Result<Vec<RankedSegment>> {
    if !(temporal_nms_tiou > 0.0 && temporal_nms_tiou <= 1.0) {
        return Err(Error::param(format!("temporal NMS threshold {temporal_nms_tiou} outside (0, 1]")));
    }
    let joined: Vec<&RankedSegment> = a.iter().chain(b).collect();
    let scores: Vec<f64> = joined.iter().map(|s| s.score()).collect();
    let mut kept_by_group: HashMap<(&str, &Label), Vec<usize>> = HashMap::new();
    let mut out = Vec::new();
    for i in rank_by_score(&scores) {
        let s = joined[i];
        let group = kept_by_group.entry((s.video_id(), s.label())).or_default();
        if group.iter().all(|&k| temporal_iou(&joined[k].segment(), &s.segment()) <= temporal_nms_tiou) {
            group.push(i);
            out.push(s.clone());
        }
    }
    Ok(out)
}

/// Sinusoidal encoding of a box normalized by the canonical frame size.
///
/// Each of the four normalized coordinates gets `dim / 8` frequency pairs
/// `[sin(c * w_j), cos(c * w_j)]` with `w_j = 10000^(-2j / (dim / 4))`,
/// laid out coordinate-major.
pub fn box_positional_encoding(bbox: &BoundingBox, dim: usize, canonical_wh: (f64, f64)) -> Result<Vec<f64>> {
    if dim == 0 || !dim.is_multiple_of(8) {
        return Err(Error::param(format!("encoding dim {dim} is not a positive multiple of 8")));
    }
    let (w, h) = canonical_wh;
    if !(w.is_finite() && w > 0.0 && h.is_finite() && h > 0.0) {
        return Err(Error::param(format!("canonical size ({w}, {h}) must be positive")));
    }
    let [x1, y1, x2, y2] = bbox.coords();
    let per_coord = dim / 4;
    let pairs = dim / 8;
    let mut out = Vec::with_capacity(dim);
    for c in [x1 / w, y1 / h, x2 / w, y2 / h] {
        for j in 0..pairs {
            let freq = 10000f64.powf(-(2.0 * j as f64) / per_coord as f64);
            let phase = c * freq;
            out.push(phase.sin());
            out.push(phase.cos());
        }
    }
    Ok(out)
}
