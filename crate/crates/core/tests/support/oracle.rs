//! Brute-force reference implementations and seeded instance generators.
//!
//! Everything here is written from the metric definitions without reusing
//! any ranking, matching or AP code from the library.

#![allow(dead_code, clippy::needless_range_loop)]

use std::collections::{BTreeMap, BTreeSet, HashMap};

use egoforge_core::model::{
    ActionLabel, ActionVocab, BoundingBox, ClipKey, Label, LabeledSegment, LtaForecast, RankedSegment, ScoredBox,
    StaInstance, TemporalSegment,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

// ---------------------------------------------------------------------------
// Overlaps

pub fn interval_iou(a: (f64, f64), b: (f64, f64)) -> f64 {
    let inter = (a.1.min(b.1) - a.0.max(b.0)).max(0.0);
    let union = (a.1 - a.0) + (b.1 - b.0) - inter;
    if union <= 0.0 {
        0.0
    } else {
        inter / union
    }
}

pub fn rect_iou(a: [f64; 4], b: [f64; 4]) -> f64 {
    let iw = (a[2].min(b[2]) - a[0].max(b[0])).max(0.0);
    let ih = (a[3].min(b[3]) - a[1].max(b[1])).max(0.0);
    let inter = iw * ih;
    let union = (a[2] - a[0]) * (a[3] - a[1]) + (b[2] - b[0]) * (b[3] - b[1]) - inter;
    if union <= 0.0 {
        0.0
    } else {
        inter / union
    }
}

// ---------------------------------------------------------------------------
// Ranking and AP

/// Position of item `i` in a descending-score ranking where earlier inputs
/// win ties, found by counting the items that beat it.
pub fn rank_of(scores: &[f64], i: usize) -> usize {
    (0..scores.len()).filter(|&j| scores[j] > scores[i] || (scores[j] == scores[i] && j < i)).count()
}

/// Ranking by repeated selection of the best remaining item.
pub fn selection_order(scores: &[f64]) -> Vec<usize> {
    let mut left: Vec<usize> = (0..scores.len()).collect();
    let mut out = Vec::new();
    while !left.is_empty() {
        let mut best = 0;
        for p in 1..left.len() {
            if scores[left[p]] > scores[left[best]] {
                best = p;
            }
        }
        out.push(left.remove(best));
    }
    out
}

/// AP as the sum over hits of the best precision at any cutoff at or after
/// the hit, divided by the number of ground truths.
pub fn ap_by_cutoffs(tp: &[bool], num_gt: usize) -> f64 {
    if num_gt == 0 {
        return 0.0;
    }
    let precision_at = |n: usize| tp[..=n].iter().filter(|t| **t).count() as f64 / (n + 1) as f64;
    let mut total = 0.0;
    for n in 0..tp.len() {
        if tp[n] {
            let best = (n..tp.len()).map(precision_at).fold(0.0, f64::max);
            total += best;
        }
    }
    total / num_gt as f64
}

/// Greedy matching of ranked predictions to ground truths. `overlap(p, g)`
/// is `None` when the pair may not match. The best overlap wins, then the
/// lowest ground-truth index.
pub fn greedy_tp(
    num_preds: usize,
    scores: &[f64],
    num_gts: usize,
    overlap: impl Fn(usize, usize) -> Option<f64>,
) -> Vec<bool> {
    let mut used = vec![false; num_gts];
    let mut tp = Vec::with_capacity(num_preds);
    for p in selection_order(scores) {
        let mut best: Option<(usize, f64)> = None;
        for g in 0..num_gts {
            if used[g] {
                continue;
            }
            if let Some(ov) = overlap(p, g) {
                if best.is_none_or(|(_, b)| ov > b) {
                    best = Some((g, ov));
                }
            }
        }
        match best {
            Some((g, _)) => {
                used[g] = true;
                tp.push(true);
            }
            None => tp.push(false),
        }
    }
    tp
}

// ---------------------------------------------------------------------------
// Temporal metrics

fn span(s: &TemporalSegment) -> (f64, f64) {
    (s.start_s(), s.end_s())
}

pub fn temporal_map_at(preds: &[RankedSegment], gts: &[LabeledSegment], thresh: f64) -> f64 {
    let labels: BTreeSet<&Label> = gts.iter().map(|g| &g.label).collect();
    let mut total = 0.0;
    for label in &labels {
        let p: Vec<&RankedSegment> = preds.iter().filter(|p| p.label() == *label).collect();
        let g: Vec<&LabeledSegment> = gts.iter().filter(|g| &g.label == *label).collect();
        let scores: Vec<f64> = p.iter().map(|x| x.score()).collect();
        let tp = greedy_tp(p.len(), &scores, g.len(), |i, j| {
            if p[i].video_id() != g[j].video_id {
                return None;
            }
            let ov = interval_iou(span(&p[i].segment()), span(&g[j].segment));
            (ov >= thresh).then_some(ov)
        });
        total += ap_by_cutoffs(&tp, g.len());
    }
    total / labels.len() as f64
}

pub fn temporal_avg_map(preds: &[RankedSegment], gts: &[LabeledSegment], thresholds: &[f64]) -> f64 {
    thresholds.iter().map(|&t| temporal_map_at(preds, gts, t)).sum::<f64>() / thresholds.len() as f64
}

/// For each gt, check every prediction of the same video and label whose
/// rank within that group is below `k`.
pub fn recall(preds: &[RankedSegment], gts: &[LabeledSegment], k: usize, thresh: f64) -> f64 {
    let mut hits = 0;
    for g in gts {
        let group: Vec<&RankedSegment> =
            preds.iter().filter(|p| p.video_id() == g.video_id && p.label() == &g.label).collect();
        let scores: Vec<f64> = group.iter().map(|p| p.score()).collect();
        let hit = (0..group.len())
            .any(|i| rank_of(&scores, i) < k && interval_iou(span(&group[i].segment()), span(&g.segment)) >= thresh);
        if hit {
            hits += 1;
        }
    }
    hits as f64 / gts.len() as f64
}

// ---------------------------------------------------------------------------
// Boxes

pub fn box_map_at(
    preds: &BTreeMap<String, Vec<ScoredBox>>,
    gts: &BTreeMap<String, Vec<ScoredBox>>,
    thresh: f64,
) -> f64 {
    let classes: BTreeSet<u32> = gts.values().flatten().map(|b| b.class_id()).collect();
    let mut total = 0.0;
    for &c in &classes {
        let p: Vec<(&str, &ScoredBox)> = preds
            .iter()
            .flat_map(|(k, v)| v.iter().map(move |b| (k.as_str(), b)))
            .filter(|(_, b)| b.class_id() == c)
            .collect();
        let g: Vec<(&str, &ScoredBox)> = gts
            .iter()
            .flat_map(|(k, v)| v.iter().map(move |b| (k.as_str(), b)))
            .filter(|(_, b)| b.class_id() == c)
            .collect();
        let scores: Vec<f64> = p.iter().map(|(_, b)| b.score()).collect();
        let tp = greedy_tp(p.len(), &scores, g.len(), |i, j| {
            if p[i].0 != g[j].0 {
                return None;
            }
            let ov = rect_iou(p[i].1.bbox().coords(), g[j].1.bbox().coords());
            (ov >= thresh).then_some(ov)
        });
        total += ap_by_cutoffs(&tp, g.len());
    }
    total / classes.len() as f64
}

/// Short-term AP. `criteria` is (verb must match, ttc must match).
pub fn sta_map(
    preds: &BTreeMap<String, Vec<StaInstance>>,
    gts: &BTreeMap<String, Vec<StaInstance>>,
    criteria: (bool, bool),
    box_iou: f64,
    ttc_tol: f64,
    top_k: usize,
) -> f64 {
    let mut kept: Vec<(&str, &StaInstance)> = Vec::new();
    for (kf, list) in preds {
        let scores: Vec<f64> = list.iter().map(|p| p.score()).collect();
        for i in 0..list.len() {
            if rank_of(&scores, i) < top_k {
                kept.push((kf.as_str(), &list[i]));
            }
        }
    }
    let nouns: BTreeSet<u32> = gts.values().flatten().map(|g| g.noun()).collect();
    let mut total = 0.0;
    for &n in &nouns {
        let p: Vec<&(&str, &StaInstance)> = kept.iter().filter(|(_, x)| x.noun() == n).collect();
        let g: Vec<(&str, &StaInstance)> =
            gts.iter().flat_map(|(k, v)| v.iter().map(move |x| (k.as_str(), x))).collect();
        let n_class = g.iter().filter(|(_, x)| x.noun() == n).count();
        let scores: Vec<f64> = p.iter().map(|(_, x)| x.score()).collect();
        let tp = greedy_tp(p.len(), &scores, g.len(), |i, j| {
            let (pk, pp) = p[i];
            let (gk, gg) = g[j];
            if *pk != gk || pp.noun() != gg.noun() {
                return None;
            }
            if criteria.0 && pp.verb() != gg.verb() {
                return None;
            }
            if criteria.1 && (pp.ttc_s() - gg.ttc_s()).abs() > ttc_tol {
                return None;
            }
            let ov = rect_iou(pp.bbox().coords(), gg.bbox().coords());
            (ov >= box_iou).then_some(ov)
        });
        total += ap_by_cutoffs(&tp, n_class);
    }
    total / nouns.len() as f64
}

/// Keep the best remaining box, drop everything overlapping it by more than
/// `thresh`, repeat.
pub fn nms(boxes: &[[f64; 4]], scores: &[f64], thresh: f64) -> Vec<usize> {
    let mut pool: Vec<usize> = (0..boxes.len()).collect();
    let mut keep = Vec::new();
    while !pool.is_empty() {
        let mut best = pool[0];
        for &i in &pool {
            if scores[i] > scores[best] {
                best = i;
            }
        }
        keep.push(best);
        pool.retain(|&j| j != best && rect_iou(boxes[best], boxes[j]) <= thresh);
    }
    keep
}

/// Same suppression over intervals within each (video, label) group.
pub fn interval_nms(items: &[(String, Label, (f64, f64), f64)], thresh: f64) -> Vec<usize> {
    let mut pool: Vec<usize> = (0..items.len()).collect();
    let mut keep = Vec::new();
    while !pool.is_empty() {
        let mut best = pool[0];
        for &i in &pool {
            if items[i].3 > items[best].3 {
                best = i;
            }
        }
        keep.push(best);
        let (bv, bl, bs, _) = &items[best];
        pool.retain(|&j| {
            let (v, l, s, _) = &items[j];
            j != best && !(v == bv && l == bl && interval_iou(*bs, *s) > thresh)
        });
    }
    keep
}

// ---------------------------------------------------------------------------
// Edit distance

pub fn levenshtein<T: PartialEq>(a: &[T], b: &[T]) -> usize {
    fn go<T: PartialEq>(a: &[T], b: &[T], i: usize, j: usize, memo: &mut HashMap<(usize, usize), usize>) -> usize {
        if i == a.len() {
            return b.len() - j;
        }
        if j == b.len() {
            return a.len() - i;
        }
        if let Some(&v) = memo.get(&(i, j)) {
            return v;
        }
        let v = if a[i] == b[j] {
            go(a, b, i + 1, j + 1, memo)
        } else {
            1 + go(a, b, i + 1, j, memo).min(go(a, b, i, j + 1, memo)).min(go(a, b, i + 1, j + 1, memo))
        };
        memo.insert((i, j), v);
        v
    }
    go(a, b, 0, 0, &mut HashMap::new())
}

/// `mode`: 0 verb, 1 noun, 2 action.
pub fn ed_at_z(forecasts: &[LtaForecast], gts: &BTreeMap<ClipKey, Vec<ActionLabel>>, mode: u8) -> f64 {
    let key = |a: &ActionLabel| match mode {
        0 => (a.verb(), u32::MAX),
        1 => (u32::MAX, a.noun()),
        _ => (a.verb(), a.noun()),
    };
    let mut total = 0.0;
    for f in forecasts {
        let gt: Vec<_> = gts[f.key()].iter().map(key).collect();
        let best =
            f.candidates().iter().map(|c| levenshtein(&c.iter().map(key).collect::<Vec<_>>(), &gt)).min().unwrap();
        total += best as f64 / gt.len() as f64;
    }
    total / forecasts.len() as f64
}

/// Naive matrix-vector product, `w` row-major `out x in`.
pub fn matvec(w: &[f64], b: &[f64], x: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0; b.len()];
    for o in 0..b.len() {
        let mut acc = 0.0;
        for i in 0..x.len() {
            acc += w[o * x.len() + i] * x[i];
        }
        out[o] = acc + b[o];
    }
    out
}

// ---------------------------------------------------------------------------
// Generators

/// Scores from a coarse grid so ties are common.
pub fn score(r: &mut ChaCha8Rng) -> f64 {
    f64::from(r.random_range(1..=10u32)) / 10.0
}

pub fn segment(r: &mut ChaCha8Rng) -> TemporalSegment {
    let a = r.random_range(0..20u32);
    let len = r.random_range(1..8u32);
    TemporalSegment::new(f64::from(a), f64::from(a + len)).unwrap()
}

pub fn rect(r: &mut ChaCha8Rng) -> BoundingBox {
    let x = f64::from(r.random_range(0..12u32));
    let y = f64::from(r.random_range(0..12u32));
    let w = f64::from(r.random_range(1..8u32));
    let h = f64::from(r.random_range(1..8u32));
    BoundingBox::new(x, y, x + w, y + h).unwrap()
}

/// Predictions near ground truth half the time so matches are frequent.
pub fn temporal_case(seed: u64) -> (Vec<RankedSegment>, Vec<LabeledSegment>) {
    let mut r = rng(seed);
    let videos = ["v0", "v1"];
    let n_gt = r.random_range(1..=5);
    let gts: Vec<LabeledSegment> = (0..n_gt)
        .map(|_| {
            let v = videos[r.random_range(0..2)];
            LabeledSegment::new(v, Label::Class(r.random_range(0..3)), segment(&mut r))
        })
        .collect();
    let n_pred = r.random_range(0..=20);
    let preds = (0..n_pred)
        .map(|_| {
            let (v, label, seg) = if r.random_bool(0.5) {
                let g = &gts[r.random_range(0..gts.len())];
                let s = g.segment;
                let d = f64::from(r.random_range(0..3u32));
                let seg = TemporalSegment::new(s.start_s() + d, s.end_s() + d).unwrap();
                (g.video_id.clone(), g.label.clone(), seg)
            } else {
                (videos[r.random_range(0..2)].to_owned(), Label::Class(r.random_range(0..3)), segment(&mut r))
            };
            RankedSegment::new(v, label, seg, score(&mut r)).unwrap()
        })
        .collect();
    (preds, gts)
}

pub type BoxMap = BTreeMap<String, Vec<ScoredBox>>;

pub fn box_case(seed: u64) -> (BoxMap, BoxMap) {
    let mut r = rng(seed);
    let images = ["a", "b"];
    let mut gts: BoxMap = BTreeMap::new();
    let n_gt = r.random_range(1..=5);
    let mut flat = Vec::new();
    for _ in 0..n_gt {
        let img = images[r.random_range(0..2)];
        let b = ScoredBox::new(rect(&mut r), r.random_range(0..3), 1.0).unwrap();
        flat.push((img, b.clone()));
        gts.entry(img.to_owned()).or_default().push(b);
    }
    let mut preds: BoxMap = BTreeMap::new();
    for _ in 0..r.random_range(0..=20) {
        let (img, b) = if r.random_bool(0.5) {
            let (img, g) = &flat[r.random_range(0..flat.len())];
            let [x1, y1, x2, y2] = g.bbox().coords();
            let d = f64::from(r.random_range(0..3u32));
            (
                *img,
                ScoredBox::new(BoundingBox::new(x1 + d, y1, x2 + d, y2).unwrap(), g.class_id(), score(&mut r)).unwrap(),
            )
        } else {
            (images[r.random_range(0..2)], ScoredBox::new(rect(&mut r), r.random_range(0..3), score(&mut r)).unwrap())
        };
        preds.entry(img.to_owned()).or_default().push(b);
    }
    (preds, gts)
}

pub type StaMap = BTreeMap<String, Vec<StaInstance>>;

pub fn sta_case(seed: u64) -> (StaMap, StaMap) {
    let mut r = rng(seed);
    let frames = ["k0", "k1"];
    let ttc = |r: &mut ChaCha8Rng| f64::from(r.random_range(1..=8u32)) * 0.25;
    let mut gts: StaMap = BTreeMap::new();
    let mut flat = Vec::new();
    for _ in 0..r.random_range(1..=5) {
        let kf = frames[r.random_range(0..2)];
        let g = StaInstance::new(rect(&mut r), r.random_range(0..3), r.random_range(0..2), ttc(&mut r), 1.0).unwrap();
        flat.push((kf, g.clone()));
        gts.entry(kf.to_owned()).or_default().push(g);
    }
    let mut preds: StaMap = BTreeMap::new();
    for _ in 0..r.random_range(0..=20) {
        let (kf, p) = if r.random_bool(0.5) {
            let (kf, g) = &flat[r.random_range(0..flat.len())];
            let verb = if r.random_bool(0.7) { g.verb() } else { 1 - g.verb() };
            let t = (g.ttc_s() + f64::from(r.random_range(0..3u32)) * 0.2).max(0.05);
            (*kf, StaInstance::new(*g.bbox(), g.noun(), verb, t, score(&mut r)).unwrap())
        } else {
            (
                frames[r.random_range(0..2)],
                StaInstance::new(rect(&mut r), r.random_range(0..3), r.random_range(0..2), ttc(&mut r), score(&mut r))
                    .unwrap(),
            )
        };
        preds.entry(kf.to_owned()).or_default().push(p);
    }
    (preds, gts)
}

pub fn nms_case(seed: u64) -> (Vec<BoundingBox>, Vec<f64>) {
    let mut r = rng(seed);
    let n = r.random_range(1..=20);
    let boxes = (0..n).map(|_| rect(&mut r)).collect();
    let scores = (0..n).map(|_| score(&mut r)).collect();
    (boxes, scores)
}

/// Sequences of length <= 6 over an alphabet of size <= 3.
pub fn sequence_pair(seed: u64) -> (Vec<u8>, Vec<u8>) {
    let mut r = rng(seed);
    let alpha = r.random_range(1..=3u8);
    let seq = |r: &mut ChaCha8Rng| -> Vec<u8> {
        let n = r.random_range(0..=6);
        (0..n).map(|_| r.random_range(0..alpha)).collect()
    };
    let a = seq(&mut r);
    let b = seq(&mut r);
    (a, b)
}

pub fn lta_case(seed: u64) -> (Vec<LtaForecast>, BTreeMap<ClipKey, Vec<ActionLabel>>) {
    let mut r = rng(seed);
    let vocab = ActionVocab::new(3, 3).unwrap();
    let z = r.random_range(1..=6);
    let label = |r: &mut ChaCha8Rng| ActionLabel::new(r.random_range(0..3), r.random_range(0..3), vocab).unwrap();
    let mut gts = BTreeMap::new();
    let mut forecasts = Vec::new();
    for c in 0..r.random_range(1..=4u32) {
        let key = ClipKey::new("v", c);
        let gt: Vec<ActionLabel> = (0..z).map(|_| label(&mut r)).collect();
        let cands = (0..r.random_range(1..=5))
            .map(|_| gt.iter().map(|g| if r.random_bool(0.5) { *g } else { label(&mut r) }).collect())
            .collect();
        forecasts.push(LtaForecast::new(key.clone(), cands, None, z).unwrap());
        gts.insert(key, gt);
    }
    (forecasts, gts)
}
