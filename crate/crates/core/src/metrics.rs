//! Evaluation metrics for every track.
//!
//! All rankings are stable descending sorts on score, so score ties resolve
//! by input order. Average precision is the all-point interpolated area under
//! the monotone precision envelope.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{
    ActionLabel, ClipKey, Hand, HandKeyframes, Keyframe, Label, LabeledSegment, LtaForecast, RankedSegment, ScoredBox,
    StaInstance, TemporalSegment,
};

/// A named metric value with an optional breakdown.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricReport {
    pub name: String,
    pub value: f64,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub breakdown: BTreeMap<String, f64>,
    pub count: usize,
}

impl MetricReport {
    pub fn new(name: impl Into<String>, value: f64, count: usize) -> Self {
        Self { name: name.into(), value, breakdown: BTreeMap::new(), count }
    }
}

/// Indices sorted by descending score; ties keep input order.
pub fn rank_by_score(scores: &[f64]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..scores.len()).collect();
    order.sort_by(|&a, &b| scores[b].total_cmp(&scores[a]));
    order
}

/// All-point interpolated AP from ranked true-positive flags.
pub fn average_precision(tp: &[bool], num_gt: usize) -> f64 {
    if num_gt == 0 || tp.is_empty() {
        return 0.0;
    }
    let mut hits = 0usize;
    let mut precision = Vec::with_capacity(tp.len());
    let mut recall = Vec::with_capacity(tp.len());
    for (i, &t) in tp.iter().enumerate() {
        if t {
            hits += 1;
        }
        precision.push(hits as f64 / (i + 1) as f64);
        recall.push(hits as f64 / num_gt as f64);
    }
    for i in (0..precision.len() - 1).rev() {
        precision[i] = precision[i].max(precision[i + 1]);
    }
    let mut ap = 0.0;
    let mut prev_recall = 0.0;
    for (p, r) in precision.iter().zip(&recall) {
        ap += (r - prev_recall) * p;
        prev_recall = *r;
    }
    ap
}

/// Pick the unmatched candidate with the highest overlap; ties go to the
/// lowest ground-truth index.
fn best_unmatched(candidates: impl Iterator<Item = (usize, f64)>, matched: &[bool]) -> Option<usize> {
    let mut best: Option<(usize, f64)> = None;
    for (g, ov) in candidates {
        if matched[g] {
            continue;
        }
        match best {
            Some((_, b)) if ov <= b => {}
            _ => best = Some((g, ov)),
        }
    }
    best.map(|(g, _)| g)
}

// ---------------------------------------------------------------------------
// Temporal metrics

/// Intersection over union of two time intervals.
///
/// Two zero-length intervals score 1 only when they are the same point; a
/// zero-length interval against a proper one scores 0.
pub fn temporal_iou(a: &TemporalSegment, b: &TemporalSegment) -> f64 {
    let (la, lb) = (a.length(), b.length());
    if la == 0.0 || lb == 0.0 {
        return if la == 0.0 && lb == 0.0 && a.start_s() == b.start_s() { 1.0 } else { 0.0 };
    }
    let inter = (a.end_s().min(b.end_s()) - a.start_s().max(b.start_s())).max(0.0);
    if inter == 0.0 {
        return 0.0;
    }
    if a == b {
        return 1.0;
    }
    let union = a.end_s().max(b.end_s()) - a.start_s().min(b.start_s());
    (inter / union).min(1.0)
}

fn group_predictions(preds: &[RankedSegment]) -> HashMap<(&str, &Label), Vec<usize>> {
    let mut groups: HashMap<(&str, &Label), Vec<usize>> = HashMap::new();
    for (i, p) in preds.iter().enumerate() {
        groups.entry((p.video_id(), p.label())).or_default().push(i);
    }
    let scores: Vec<f64> = preds.iter().map(RankedSegment::score).collect();
    for idx in groups.values_mut() {
        idx.sort_by(|&a, &b| scores[b].total_cmp(&scores[a]));
    }
    groups
}

fn check_threshold(name: &str, t: f64) -> Result<()> {
    if !(t > 0.0 && t <= 1.0) {
        return Err(Error::param(format!("{name} {t} outside (0, 1]")));
    }
    Ok(())
}

/// Fraction of ground-truth segments hit by at least one of the top-`k`
/// predictions for the same video and label at `tIoU >= tiou_thresh`.
pub fn recall_at_k(preds: &[RankedSegment], gts: &[LabeledSegment], k: usize, tiou_thresh: f64) -> Result<f64> {
    if k == 0 {
        return Err(Error::param("k must be at least 1"));
    }
    check_threshold("tIoU threshold", tiou_thresh)?;
    if gts.is_empty() {
        return Err(Error::Undefined { metric: "recall", reason: "empty ground truth".into() });
    }
    let groups = group_predictions(preds);
    let hits = gts
        .par_iter()
        .filter(|gt| {
            groups.get(&(gt.video_id.as_str(), &gt.label)).is_some_and(|ranked| {
                ranked.iter().take(k).any(|&i| temporal_iou(&preds[i].segment(), &gt.segment) >= tiou_thresh)
            })
        })
        .count();
    Ok(hits as f64 / gts.len() as f64)
}

/// Default tIoU thresholds for average mAP: 0.1 to 0.5 in steps of 0.1.
pub fn default_map_thresholds() -> Vec<f64> {
    (1..=5).map(|i| f64::from(i) / 10.0).collect()
}

fn temporal_class_ap(preds: &[&RankedSegment], gts: &[&LabeledSegment], thresh: f64) -> f64 {
    let scores: Vec<f64> = preds.iter().map(|p| p.score()).collect();
    let order = rank_by_score(&scores);
    let mut by_video: HashMap<&str, Vec<usize>> = HashMap::new();
    for (g, gt) in gts.iter().enumerate() {
        by_video.entry(gt.video_id.as_str()).or_default().push(g);
    }
    let mut matched = vec![false; gts.len()];
    let tp: Vec<bool> = order
        .iter()
        .map(|&i| {
            let p = preds[i];
            let Some(cands) = by_video.get(p.video_id()) else {
                return false;
            };
            let eligible = cands.iter().filter_map(|&g| {
                let ov = temporal_iou(&p.segment(), &gts[g].segment);
                (ov >= thresh).then_some((g, ov))
            });
            match best_unmatched(eligible, &matched) {
                Some(g) => {
                    matched[g] = true;
                    true
                }
                None => false,
            }
        })
        .collect();
    average_precision(&tp, gts.len())
}

/// mAP averaged over tIoU thresholds. Classes are the labels present in the
/// ground truth; classes without predictions contribute 0.
pub fn average_map(preds: &[RankedSegment], gts: &[LabeledSegment], tiou_thresholds: &[f64]) -> Result<MetricReport> {
    if tiou_thresholds.is_empty() {
        return Err(Error::param("no tIoU thresholds"));
    }
    for &t in tiou_thresholds {
        check_threshold("tIoU threshold", t)?;
    }
    if gts.is_empty() {
        return Err(Error::Undefined { metric: "mAP", reason: "empty ground truth".into() });
    }
    let mut gt_by_label: BTreeMap<&Label, Vec<&LabeledSegment>> = BTreeMap::new();
    for g in gts {
        gt_by_label.entry(&g.label).or_default().push(g);
    }
    let mut pred_by_label: HashMap<&Label, Vec<&RankedSegment>> = HashMap::new();
    for p in preds {
        pred_by_label.entry(p.label()).or_default().push(p);
    }
    let classes: Vec<(&Label, Vec<&LabeledSegment>)> = gt_by_label.into_iter().collect();
    let per_threshold: Vec<f64> = tiou_thresholds
        .iter()
        .map(|&t| {
            let aps: Vec<f64> = classes
                .par_iter()
                .map(|(label, g)| pred_by_label.get(label).map_or(0.0, |p| temporal_class_ap(p, g, t)))
                .collect();
            aps.iter().sum::<f64>() / aps.len() as f64
        })
        .collect();
    let mut report =
        MetricReport::new("avg-mAP", per_threshold.iter().sum::<f64>() / per_threshold.len() as f64, gts.len());
    for (t, m) in tiou_thresholds.iter().zip(&per_threshold) {
        report.breakdown.insert(format!("mAP@{t:.2}"), *m);
    }
    Ok(report)
}

// ---------------------------------------------------------------------------
// Future hand displacement

/// Displacement of one hand for one instance, over keyframes where the
/// ground-truth hand is visible.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct HandDisplacement {
    /// Mean distance over visible keyframes, `None` if none are visible.
    pub mean: Option<f64>,
    /// Distance at the contact frame, `None` if it is not visible.
    pub contact: Option<f64>,
}

pub fn hand_displacement(pred: &HandKeyframes, gt: &HandKeyframes, hand: Hand) -> HandDisplacement {
    let mut sum = 0.0;
    let mut n = 0usize;
    let mut contact = None;
    for k in Keyframe::ALL {
        if !gt.is_visible(k, hand) {
            continue;
        }
        let d = pred.point(k, hand).distance(&gt.point(k, hand));
        sum += d;
        n += 1;
        if k == Keyframe::C {
            contact = Some(d);
        }
    }
    HandDisplacement { mean: (n > 0).then(|| sum / n as f64), contact }
}

/// Dataset-level displacement per hand; `None` marks a hand that is never
/// visible anywhere in the dataset.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct DisplacementSummary {
    pub left_mean: Option<f64>,
    pub left_contact: Option<f64>,
    pub right_mean: Option<f64>,
    pub right_contact: Option<f64>,
}

fn mean_of(values: impl Iterator<Item = Option<f64>>) -> Option<f64> {
    let (sum, n) = values.flatten().fold((0.0, 0usize), |(s, n), v| (s + v, n + 1));
    (n > 0).then(|| sum / n as f64)
}

pub fn displacement_summary(pairs: &[(&HandKeyframes, &HandKeyframes)]) -> DisplacementSummary {
    let per: Vec<(HandDisplacement, HandDisplacement)> = pairs
        .par_iter()
        .map(|(p, g)| (hand_displacement(p, g, Hand::Left), hand_displacement(p, g, Hand::Right)))
        .collect();
    DisplacementSummary {
        left_mean: mean_of(per.iter().map(|(l, _)| l.mean)),
        left_contact: mean_of(per.iter().map(|(l, _)| l.contact)),
        right_mean: mean_of(per.iter().map(|(_, r)| r.mean)),
        right_contact: mean_of(per.iter().map(|(_, r)| r.contact)),
    }
}

// ---------------------------------------------------------------------------
// Long-term anticipation edit distance

/// Unit-cost Levenshtein distance.
pub fn levenshtein<T: PartialEq>(a: &[T], b: &[T]) -> usize {
    if a.is_empty() {
        return b.len();
    }
    if b.is_empty() {
        return a.len();
    }
    let mut row: Vec<usize> = (0..=b.len()).collect();
    for (i, x) in a.iter().enumerate() {
        let mut diag = row[0];
        row[0] = i + 1;
        for (j, y) in b.iter().enumerate() {
            let sub = diag + usize::from(x != y);
            diag = row[j + 1];
            row[j + 1] = sub.min(row[j] + 1).min(row[j + 1] + 1);
        }
    }
    row[b.len()]
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EdMode {
    Verb,
    Noun,
    Action,
}

impl EdMode {
    pub const ALL: [EdMode; 3] = [EdMode::Verb, EdMode::Noun, EdMode::Action];

    pub fn name(self) -> &'static str {
        match self {
            EdMode::Verb => "Verb",
            EdMode::Noun => "Noun",
            EdMode::Action => "Action",
        }
    }
}

fn project(seq: &[ActionLabel], mode: EdMode) -> Vec<(u32, u32)> {
    seq.iter()
        .map(|a| match mode {
            EdMode::Verb => (a.verb(), 0),
            EdMode::Noun => (0, a.noun()),
            EdMode::Action => (a.verb(), a.noun()),
        })
        .collect()
}

/// Edit distance over `Z`, minimized over one forecast's candidates.
pub fn instance_edit_distance(forecast: &LtaForecast, gt: &[ActionLabel], mode: EdMode) -> Result<f64> {
    let z = gt.len();
    if z == 0 {
        return Err(Error::shape(format!("{}: empty ground-truth sequence", forecast.key())));
    }
    let target = project(gt, mode);
    let mut best = usize::MAX;
    for c in forecast.candidates() {
        if c.len() != z {
            return Err(Error::shape(format!("{}: candidate length {} vs ground truth {z}", forecast.key(), c.len())));
        }
        best = best.min(levenshtein(&project(c, mode), &target));
    }
    Ok(best as f64 / z as f64)
}

/// Mean over instances of the best-candidate normalized edit distance.
///
/// Every forecast must have ground truth and vice versa.
pub fn edit_distance_at_z(
    forecasts: &[LtaForecast],
    gts: &BTreeMap<ClipKey, Vec<ActionLabel>>,
    mode: EdMode,
) -> Result<f64> {
    if gts.is_empty() {
        return Err(Error::Undefined { metric: "edit distance", reason: "empty ground truth".into() });
    }
    let mut seen = BTreeSet::new();
    for f in forecasts {
        if !gts.contains_key(f.key()) {
            return Err(Error::Reference(format!("forecast for unknown clip {}", f.key())));
        }
        if !seen.insert(f.key()) {
            return Err(Error::Reference(format!("duplicate forecast for clip {}", f.key())));
        }
    }
    if let Some(missing) = gts.keys().find(|k| !seen.contains(k)) {
        return Err(Error::Reference(format!("no forecast for clip {missing}")));
    }
    let per: Vec<f64> =
        forecasts.par_iter().map(|f| instance_edit_distance(f, &gts[f.key()], mode)).collect::<Result<_>>()?;
    Ok(per.iter().sum::<f64>() / per.len() as f64)
}

// ---------------------------------------------------------------------------
// Short-term anticipation AP

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StaCriteria {
    Noun,
    NounVerb,
    NounTtc,
    Overall,
}

impl StaCriteria {
    pub const ALL: [StaCriteria; 4] =
        [StaCriteria::Noun, StaCriteria::NounVerb, StaCriteria::NounTtc, StaCriteria::Overall];

    pub fn name(self) -> &'static str {
        match self {
            StaCriteria::Noun => "Noun",
            StaCriteria::NounVerb => "Noun+Verb",
            StaCriteria::NounTtc => "Noun+TTC",
            StaCriteria::Overall => "Overall",
        }
    }

    pub fn needs_verb(self) -> bool {
        matches!(self, StaCriteria::NounVerb | StaCriteria::Overall)
    }

    pub fn needs_ttc(self) -> bool {
        matches!(self, StaCriteria::NounTtc | StaCriteria::Overall)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StaApConfig {
    pub box_iou_thresh: f64,
    pub ttc_tol_s: f64,
    pub top_k: usize,
}

impl Default for StaApConfig {
    fn default() -> Self {
        Self { box_iou_thresh: 0.5, ttc_tol_s: 0.25, top_k: 5 }
    }
}

/// Whether `pred` may match `gt` under `criteria`, returning the box IoU.
pub fn sta_match_overlap(
    pred: &StaInstance,
    gt: &StaInstance,
    criteria: StaCriteria,
    cfg: &StaApConfig,
) -> Option<f64> {
    if pred.noun() != gt.noun() {
        return None;
    }
    if criteria.needs_verb() && pred.verb() != gt.verb() {
        return None;
    }
    if criteria.needs_ttc() && (pred.ttc_s() - gt.ttc_s()).abs() > cfg.ttc_tol_s {
        return None;
    }
    let ov = pred.bbox().iou(gt.bbox());
    (ov >= cfg.box_iou_thresh).then_some(ov)
}

/// Indices of the `k` highest-scoring instances, best first; ties keep input order.
pub fn top_k_indices(scores: &[f64], k: usize) -> Vec<usize> {
    let mut order = rank_by_score(scores);
    order.truncate(k);
    order
}

pub fn sta_ap(
    preds: &BTreeMap<String, Vec<StaInstance>>,
    gts: &BTreeMap<String, Vec<StaInstance>>,
    criteria: StaCriteria,
    cfg: &StaApConfig,
) -> Result<f64> {
    if cfg.top_k == 0 {
        return Err(Error::param("top_k must be at least 1"));
    }
    check_threshold("box IoU threshold", cfg.box_iou_thresh)?;
    if cfg.ttc_tol_s.is_nan() || cfg.ttc_tol_s < 0.0 {
        return Err(Error::param("TTC tolerance must be nonnegative"));
    }
    let num_gt: usize = gts.values().map(Vec::len).sum();
    if num_gt == 0 {
        return Err(Error::Undefined { metric: "STA AP", reason: "empty ground truth".into() });
    }
    // Kept predictions in input order: keyframe order, then index.
    let mut kept: Vec<(&str, &StaInstance)> = Vec::new();
    for (kf, list) in preds {
        let scores: Vec<f64> = list.iter().map(StaInstance::score).collect();
        let mut idx = top_k_indices(&scores, cfg.top_k);
        idx.sort_unstable();
        kept.extend(idx.into_iter().map(|i| (kf.as_str(), &list[i])));
    }
    let nouns: BTreeSet<u32> = gts.values().flatten().map(StaInstance::noun).collect();
    let nouns: Vec<u32> = nouns.into_iter().collect();
    let aps: Vec<f64> = nouns
        .par_iter()
        .map(|&noun| {
            let class_preds: Vec<&(&str, &StaInstance)> = kept.iter().filter(|(_, p)| p.noun() == noun).collect();
            let scores: Vec<f64> = class_preds.iter().map(|(_, p)| p.score()).collect();
            let mut matched: BTreeMap<&str, Vec<bool>> =
                gts.iter().map(|(kf, g)| (kf.as_str(), vec![false; g.len()])).collect();
            let n_class = gts.values().flatten().filter(|g| g.noun() == noun).count();
            let tp: Vec<bool> = rank_by_score(&scores)
                .into_iter()
                .map(|i| {
                    let (kf, p) = class_preds[i];
                    let (Some(list), Some(m)) = (gts.get(*kf), matched.get_mut(kf)) else {
                        return false;
                    };
                    let eligible = list
                        .iter()
                        .enumerate()
                        .filter_map(|(g, gt)| sta_match_overlap(p, gt, criteria, cfg).map(|o| (g, o)));
                    match best_unmatched(eligible, m) {
                        Some(g) => {
                            m[g] = true;
                            true
                        }
                        None => false,
                    }
                })
                .collect();
            average_precision(&tp, n_class)
        })
        .collect();
    Ok(aps.iter().sum::<f64>() / aps.len() as f64)
}

// ---------------------------------------------------------------------------
// Detection AP

/// IoU thresholds 0.50:0.05:0.95.
pub fn coco_iou_thresholds() -> Vec<f64> {
    (0..10).map(|i| f64::from(50 + 5 * i) / 100.0).collect()
}

/// Mean over ground-truth classes of per-class AP at one IoU threshold.
pub fn box_map_at(
    preds: &BTreeMap<String, Vec<ScoredBox>>,
    gts: &BTreeMap<String, Vec<ScoredBox>>,
    iou_thresh: f64,
) -> Result<f64> {
    check_threshold("IoU threshold", iou_thresh)?;
    let classes: BTreeSet<u32> = gts.values().flatten().map(ScoredBox::class_id).collect();
    if classes.is_empty() {
        return Err(Error::Undefined { metric: "box AP", reason: "empty ground truth".into() });
    }
    let classes: Vec<u32> = classes.into_iter().collect();
    let flat: Vec<(&str, &ScoredBox)> =
        preds.iter().flat_map(|(img, list)| list.iter().map(move |b| (img.as_str(), b))).collect();
    let aps: Vec<f64> = classes
        .par_iter()
        .map(|&class| {
            let class_preds: Vec<&(&str, &ScoredBox)> = flat.iter().filter(|(_, b)| b.class_id() == class).collect();
            let scores: Vec<f64> = class_preds.iter().map(|(_, b)| b.score()).collect();
            let class_gts: BTreeMap<&str, Vec<&ScoredBox>> = gts
                .iter()
                .map(|(img, list)| (img.as_str(), list.iter().filter(|g| g.class_id() == class).collect()))
                .collect();
            let n_class: usize = class_gts.values().map(Vec::len).sum();
            let mut matched: BTreeMap<&str, Vec<bool>> =
                class_gts.iter().map(|(img, g)| (*img, vec![false; g.len()])).collect();
            let tp: Vec<bool> = rank_by_score(&scores)
                .into_iter()
                .map(|i| {
                    let (img, p) = class_preds[i];
                    let (Some(list), Some(m)) = (class_gts.get(*img), matched.get_mut(img)) else {
                        return false;
                    };
                    let eligible = list.iter().enumerate().filter_map(|(g, gt)| {
                        let ov = p.bbox().iou(gt.bbox());
                        (ov >= iou_thresh).then_some((g, ov))
                    });
                    match best_unmatched(eligible, m) {
                        Some(g) => {
                            m[g] = true;
                            true
                        }
                        None => false,
                    }
                })
                .collect();
            average_precision(&tp, n_class)
        })
        .collect();
    Ok(aps.iter().sum::<f64>() / aps.len() as f64)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoxApSummary {
    pub ap: f64,
    pub ap50: f64,
    pub ap75: f64,
}

/// AP averaged over `iou_thresholds`, plus AP at 0.5 and 0.75.
pub fn box_ap(
    preds: &BTreeMap<String, Vec<ScoredBox>>,
    gts: &BTreeMap<String, Vec<ScoredBox>>,
    iou_thresholds: &[f64],
) -> Result<(BoxApSummary, MetricReport)> {
    if iou_thresholds.is_empty() {
        return Err(Error::param("no IoU thresholds"));
    }
    let per: Vec<f64> = iou_thresholds.iter().map(|&t| box_map_at(preds, gts, t)).collect::<Result<_>>()?;
    let ap = per.iter().sum::<f64>() / per.len() as f64;
    let lookup = |t: f64| -> Result<f64> {
        match iou_thresholds.iter().position(|&x| (x - t).abs() < 1e-12) {
            Some(i) => Ok(per[i]),
            None => box_map_at(preds, gts, t),
        }
    };
    let summary = BoxApSummary { ap, ap50: lookup(0.5)?, ap75: lookup(0.75)? };
    let count = gts.values().map(Vec::len).sum();
    let mut report = MetricReport::new("AP", ap, count);
    for (t, v) in iou_thresholds.iter().zip(&per) {
        report.breakdown.insert(format!("AP@{t:.2}"), *v);
    }
    Ok((summary, report))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{ActionVocab, BoundingBox, HandPair, Point, Visibility};

    fn seg(a: f64, b: f64) -> TemporalSegment {
        TemporalSegment::new(a, b).unwrap()
    }

    #[test]
    fn tiou_examples() {
        assert_eq!(temporal_iou(&seg(0.0, 10.0), &seg(0.0, 10.0)), 1.0);
        assert_eq!(temporal_iou(&seg(0.0, 10.0), &seg(20.0, 30.0)), 0.0);
        assert!((temporal_iou(&seg(0.0, 10.0), &seg(5.0, 15.0)) - 5.0 / 15.0).abs() < 1e-15);
        assert_eq!(temporal_iou(&seg(3.0, 3.0), &seg(3.0, 3.0)), 1.0);
        assert_eq!(temporal_iou(&seg(3.0, 3.0), &seg(4.0, 4.0)), 0.0);
        assert_eq!(temporal_iou(&seg(3.0, 3.0), &seg(0.0, 10.0)), 0.0);
    }

    fn gt(v: &str, c: u32, a: f64, b: f64) -> LabeledSegment {
        LabeledSegment::new(v, Label::Class(c), seg(a, b))
    }

    fn pred(v: &str, c: u32, a: f64, b: f64, s: f64) -> RankedSegment {
        RankedSegment::new(v, Label::Class(c), seg(a, b), s).unwrap()
    }

    #[test]
    fn recall_rank_forcing() {
        let gts = vec![gt("v", 0, 0.0, 10.0)];
        let preds = vec![pred("v", 0, 20.0, 30.0, 0.9), pred("v", 0, 0.0, 10.0, 0.5)];
        assert_eq!(recall_at_k(&preds, &gts, 1, 0.5).unwrap(), 0.0);
        assert_eq!(recall_at_k(&preds, &gts, 2, 0.5).unwrap(), 1.0);
        assert!(recall_at_k(&preds, &[], 1, 0.5).is_err());
    }

    #[test]
    fn recall_respects_video_and_label() {
        let gts = vec![gt("v", 0, 0.0, 10.0)];
        let preds = vec![pred("w", 0, 0.0, 10.0, 0.9), pred("v", 1, 0.0, 10.0, 0.9)];
        assert_eq!(recall_at_k(&preds, &gts, 5, 0.5).unwrap(), 0.0);
    }

    #[test]
    fn map_perfect_and_empty() {
        let gts = vec![gt("v", 0, 0.0, 10.0), gt("v", 1, 5.0, 8.0), gt("w", 0, 1.0, 2.0)];
        let preds: Vec<RankedSegment> =
            gts.iter().map(|g| RankedSegment::new(&g.video_id, g.label.clone(), g.segment, 1.0).unwrap()).collect();
        let r = average_map(&preds, &gts, &default_map_thresholds()).unwrap();
        assert_eq!(r.value, 1.0);
        assert_eq!(r.breakdown.len(), 5);
        let r = average_map(&[], &gts, &default_map_thresholds()).unwrap();
        assert_eq!(r.value, 0.0);
    }

    #[test]
    fn ap_hand_computed() {
        // ranks: TP, FP, TP with 3 gts -> precision 1, 1/2, 2/3; envelope 1, 2/3, 2/3
        let ap = average_precision(&[true, false, true], 3);
        assert!((ap - (1.0 / 3.0 + (2.0 / 3.0) / 3.0)).abs() < 1e-15);
    }

    fn hands(offset: (f64, f64), only_contact: bool) -> (HandKeyframes, HandKeyframes) {
        let base = [HandPair { left: Point::new(100.0, 50.0), right: Point::new(300.0, 60.0) }; 5];
        let gt = HandKeyframes::new(base, None).unwrap();
        let mut moved = base;
        for (i, f) in moved.iter_mut().enumerate() {
            if only_contact && i != Keyframe::C.index() {
                continue;
            }
            f.left.x += offset.0;
            f.left.y += offset.1;
            f.right.x += offset.0;
            f.right.y += offset.1;
        }
        (HandKeyframes::new(moved, None).unwrap(), gt)
    }

    #[test]
    fn displacement_examples() {
        let (p, g) = hands((0.0, 0.0), false);
        let d = hand_displacement(&p, &g, Hand::Left);
        assert_eq!((d.mean, d.contact), (Some(0.0), Some(0.0)));
        let (p, g) = hands((3.0, 4.0), false);
        let d = hand_displacement(&p, &g, Hand::Right);
        assert_eq!((d.mean, d.contact), (Some(5.0), Some(5.0)));
        let (p, g) = hands((3.0, 4.0), true);
        let d = hand_displacement(&p, &g, Hand::Left);
        assert_eq!((d.mean, d.contact), (Some(1.0), Some(5.0)));
    }

    #[test]
    fn displacement_absent_when_never_visible() {
        let (p, g) = hands((3.0, 4.0), false);
        let vis = [Visibility { left: false, right: true }; 5];
        let g = HandKeyframes::new(*g.frames(), Some(vis)).unwrap();
        let s = displacement_summary(&[(&p, &g)]);
        assert_eq!(s.left_mean, None);
        assert_eq!(s.left_contact, None);
        assert_eq!(s.right_mean, Some(5.0));
    }

    #[test]
    fn levenshtein_small() {
        assert_eq!(levenshtein(b"kitten", b"sitting"), 3);
        assert_eq!(levenshtein(b"", b"abc"), 3);
        assert_eq!(levenshtein(b"abc", b"abc"), 0);
        assert_eq!(levenshtein(b"ab", b"ba"), 2);
    }

    fn seq(v: &[(u32, u32)], vocab: ActionVocab) -> Vec<ActionLabel> {
        v.iter().map(|&(a, b)| ActionLabel::new(a, b, vocab).unwrap()).collect()
    }

    #[test]
    fn edit_distance_examples() {
        let vocab = ActionVocab::new(50, 50).unwrap();
        let key = ClipKey::new("v", 3);
        let gt_seq = seq(&[(0, 0), (1, 1), (2, 2)], vocab);
        let cand = seq(&[(0, 0), (9, 9), (2, 2)], vocab);
        let f = LtaForecast::new(key.clone(), vec![cand], None, 3).unwrap();
        let gts = BTreeMap::from([(key.clone(), gt_seq.clone())]);
        for mode in EdMode::ALL {
            let ed = edit_distance_at_z(std::slice::from_ref(&f), &gts, mode).unwrap();
            assert!((ed - 1.0 / 3.0).abs() < 1e-15);
        }
        let same = LtaForecast::new(key.clone(), vec![gt_seq.clone()], None, 3).unwrap();
        assert_eq!(edit_distance_at_z(&[same], &gts, EdMode::Action).unwrap(), 0.0);

        let z20: Vec<ActionLabel> = (0..20).map(|i| ActionLabel::new(i, i, vocab).unwrap()).collect();
        let other: Vec<ActionLabel> = (0..20).map(|i| ActionLabel::new(20 + i, 20 + i, vocab).unwrap()).collect();
        let f = LtaForecast::new(key.clone(), vec![other], None, 20).unwrap();
        let gts = BTreeMap::from([(key, z20)]);
        assert_eq!(edit_distance_at_z(&[f], &gts, EdMode::Noun).unwrap(), 1.0);
    }

    #[test]
    fn edit_distance_reference_errors() {
        let vocab = ActionVocab::new(3, 3).unwrap();
        let s = seq(&[(0, 0), (1, 1)], vocab);
        let gts = BTreeMap::from([(ClipKey::new("v", 0), s.clone())]);
        let stray = LtaForecast::new(ClipKey::new("x", 0), vec![s.clone()], None, 2).unwrap();
        assert!(edit_distance_at_z(&[stray], &gts, EdMode::Verb).is_err());
        assert!(edit_distance_at_z(&[], &gts, EdMode::Verb).is_err());
        let long = LtaForecast::new(ClipKey::new("v", 0), vec![seq(&[(0, 0); 3], vocab)], None, 3).unwrap();
        assert!(edit_distance_at_z(&[long], &gts, EdMode::Verb).is_err());
    }

    fn bx(x1: f64, y1: f64, x2: f64, y2: f64) -> BoundingBox {
        BoundingBox::new(x1, y1, x2, y2).unwrap()
    }

    fn sta(b: BoundingBox, noun: u32, verb: u32, ttc: f64, score: f64) -> StaInstance {
        StaInstance::new(b, noun, verb, ttc, score).unwrap()
    }

    #[test]
    fn sta_criteria_decomposition() {
        let g = sta(bx(0.0, 0.0, 10.0, 10.0), 2, 1, 0.5, 1.0);
        let p = sta(bx(0.0, 0.0, 10.0, 10.0), 2, 3, 0.5, 0.9);
        let gts = BTreeMap::from([("k".to_string(), vec![g.clone()])]);
        let preds = BTreeMap::from([("k".to_string(), vec![p])]);
        let cfg = StaApConfig::default();
        assert_eq!(sta_ap(&preds, &gts, StaCriteria::Noun, &cfg).unwrap(), 1.0);
        assert_eq!(sta_ap(&preds, &gts, StaCriteria::NounVerb, &cfg).unwrap(), 0.0);
        assert_eq!(sta_ap(&preds, &gts, StaCriteria::NounTtc, &cfg).unwrap(), 1.0);
        assert_eq!(sta_ap(&preds, &gts, StaCriteria::Overall, &cfg).unwrap(), 0.0);
        let perfect = BTreeMap::from([("k".to_string(), vec![g])]);
        for c in StaCriteria::ALL {
            assert_eq!(sta_ap(&perfect, &gts, c, &cfg).unwrap(), 1.0);
        }
    }

    #[test]
    fn sta_ttc_tolerance() {
        let g = sta(bx(0.0, 0.0, 10.0, 10.0), 0, 0, 1.0, 1.0);
        let p = sta(bx(0.0, 0.0, 10.0, 10.0), 0, 0, 1.3, 0.9);
        let gts = BTreeMap::from([("k".to_string(), vec![g])]);
        let preds = BTreeMap::from([("k".to_string(), vec![p])]);
        let mut cfg = StaApConfig::default();
        assert_eq!(sta_ap(&preds, &gts, StaCriteria::NounTtc, &cfg).unwrap(), 0.0);
        cfg.ttc_tol_s = 0.5;
        assert_eq!(sta_ap(&preds, &gts, StaCriteria::NounTtc, &cfg).unwrap(), 1.0);
    }

    #[test]
    fn sta_top_k_filters_low_scores() {
        let g = sta(bx(0.0, 0.0, 10.0, 10.0), 0, 0, 1.0, 1.0);
        let mut list: Vec<StaInstance> =
            (0..5).map(|i| sta(bx(50.0, 50.0, 60.0, 60.0 + f64::from(i)), 0, 0, 1.0, 0.9)).collect();
        list.push(sta(bx(0.0, 0.0, 10.0, 10.0), 0, 0, 1.0, 0.1));
        let gts = BTreeMap::from([("k".to_string(), vec![g])]);
        let preds = BTreeMap::from([("k".to_string(), list)]);
        let mut cfg = StaApConfig::default();
        assert_eq!(sta_ap(&preds, &gts, StaCriteria::Noun, &cfg).unwrap(), 0.0);
        cfg.top_k = 6;
        assert!((sta_ap(&preds, &gts, StaCriteria::Noun, &cfg).unwrap() - 1.0 / 6.0).abs() < 1e-12);
    }

    fn det(b: BoundingBox, c: u32, s: f64) -> ScoredBox {
        ScoredBox::new(b, c, s).unwrap()
    }

    #[test]
    fn box_ap_threshold_straddling() {
        let gts = BTreeMap::from([
            ("a".to_string(), vec![det(bx(0.0, 0.0, 10.0, 10.0), 0, 1.0)]),
            ("b".to_string(), vec![det(bx(20.0, 20.0, 40.0, 30.0), 0, 1.0)]),
        ]);
        // IoU 0.6 with each ground truth
        let preds = BTreeMap::from([
            ("a".to_string(), vec![det(bx(0.0, 0.0, 10.0, 6.0), 0, 0.8)]),
            ("b".to_string(), vec![det(bx(20.0, 20.0, 32.0, 30.0), 0, 0.7)]),
        ]);
        let (s, r) = box_ap(&preds, &gts, &coco_iou_thresholds()).unwrap();
        assert_eq!(s.ap50, 1.0);
        assert_eq!(s.ap75, 0.0);
        // matches at 0.50, 0.55, 0.60 only
        assert!((s.ap - 0.3).abs() < 1e-12);
        assert_eq!(r.breakdown.len(), 10);

        let (s, _) = box_ap(&gts, &gts, &coco_iou_thresholds()).unwrap();
        assert_eq!((s.ap, s.ap50, s.ap75), (1.0, 1.0, 1.0));
    }
}
