mod support;

use std::collections::BTreeMap;

use egoforge_core::fusion::{
    box_positional_encoding, multi_clips_vote, nms, post_fuse_segments, splice_and_nms, FusionConfig, VoteConfig,
    VoteRule,
};
use egoforge_core::metrics::{
    average_map, box_map_at, instance_edit_distance, recall_at_k, sta_ap, temporal_iou, EdMode, StaApConfig,
    StaCriteria,
};
use egoforge_core::model::{
    ActionVocab, BoundingBox, RankedSegment, ScoreMatrix, ScoredBox, StaInstance, TemporalSegment, VideoMeta,
};
use egoforge_core::snippet::{build_snippet_schedule, observable_window, sample_frames, sliding_clips, SampleMode};
use proptest::prelude::*;
use rand::Rng;
use support::oracle;

fn seg(a: u32, len: u32) -> TemporalSegment {
    TemporalSegment::new(f64::from(a), f64::from(a + len)).unwrap()
}

fn rect(x: u32, y: u32, w: u32, h: u32) -> BoundingBox {
    let (x, y) = (f64::from(x), f64::from(y));
    BoundingBox::new(x, y, x + f64::from(w), y + f64::from(h)).unwrap()
}

/// Strictly increasing map applied to every score.
fn warp(s: f64) -> f64 {
    s.powi(3) * 7.0 + 0.25
}

fn warp_segments(p: &[RankedSegment]) -> Vec<RankedSegment> {
    p.iter().map(|s| s.with_score(warp(s.score())).unwrap()).collect()
}

fn warp_boxes(m: &oracle::BoxMap) -> oracle::BoxMap {
    m.iter()
        .map(|(k, v)| {
            let v = v.iter().map(|b| ScoredBox::new(*b.bbox(), b.class_id(), warp(b.score())).unwrap()).collect();
            (k.clone(), v)
        })
        .collect()
}

fn restore_sta(m: &oracle::StaMap, f: impl Fn(usize, f64) -> f64) -> oracle::StaMap {
    let mut n = 0;
    m.iter()
        .map(|(k, v)| {
            let v = v
                .iter()
                .map(|p| {
                    n += 1;
                    StaInstance::new(*p.bbox(), p.noun(), p.verb(), p.ttc_s(), f(n, p.score())).unwrap()
                })
                .collect();
            (k.clone(), v)
        })
        .collect()
}

fn doubled<T: Clone>(v: &[T]) -> Vec<T> {
    v.iter().flat_map(|x| [x.clone(), x.clone()]).collect()
}

fn random_matrix(r: &mut rand_chacha::ChaCha8Rng, z: usize, vocab: ActionVocab) -> ScoreMatrix {
    let row = |r: &mut rand_chacha::ChaCha8Rng, n: u32| -> Vec<f64> {
        let raw: Vec<f64> = (0..n).map(|_| f64::from(r.random_range(1..=20u32))).collect();
        let s: f64 = raw.iter().sum();
        raw.iter().map(|x| x / s).collect()
    };
    let verb = (0..z).map(|_| row(r, vocab.num_verbs)).collect();
    let noun = (0..z).map(|_| row(r, vocab.num_nouns)).collect();
    ScoreMatrix::new(verb, noun, vocab).unwrap()
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for p in permutations(n - 1) {
        for i in 0..=p.len() {
            let mut q = p.clone();
            q.insert(i, n - 1);
            out.push(q);
        }
    }
    out
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn tiou_symmetric_bounded(a in 0u32..30, la in 1u32..10, b in 0u32..30, lb in 1u32..10) {
        let (x, y) = (seg(a, la), seg(b, lb));
        let v = temporal_iou(&x, &y);
        prop_assert_eq!(v, temporal_iou(&y, &x));
        prop_assert!((0.0..=1.0).contains(&v));
        prop_assert_eq!(v == 1.0, a == b && la == lb);
    }

    #[test]
    fn box_iou_symmetric_bounded(
        a in (0u32..20, 0u32..20, 1u32..10, 1u32..10),
        b in (0u32..20, 0u32..20, 1u32..10, 1u32..10),
    ) {
        let (x, y) = (rect(a.0, a.1, a.2, a.3), rect(b.0, b.1, b.2, b.3));
        let v = x.iou(&y);
        prop_assert_eq!(v, y.iou(&x));
        prop_assert!((0.0..=1.0).contains(&v));
        prop_assert_eq!(v == 1.0, a == b);
    }

    #[test]
    fn recall_monotone(seed in any::<u64>()) {
        let (preds, gts) = oracle::temporal_case(seed);
        let ts = [0.1, 0.3, 0.5, 0.7, 0.9];
        for k in 1..6 {
            for w in ts.windows(2) {
                let hi = recall_at_k(&preds, &gts, k, w[0]).unwrap();
                let lo = recall_at_k(&preds, &gts, k, w[1]).unwrap();
                prop_assert!(lo <= hi);
            }
            for &t in &ts {
                let r = recall_at_k(&preds, &gts, k, t).unwrap();
                prop_assert!((0.0..=1.0).contains(&r));
                prop_assert!(r <= recall_at_k(&preds, &gts, k + 1, t).unwrap());
            }
        }
    }

    #[test]
    fn ap_depends_only_on_rank(seed in any::<u64>()) {
        let (preds, gts) = oracle::temporal_case(seed);
        let ts = [0.3, 0.5];
        let a = average_map(&preds, &gts, &ts).unwrap().value;
        prop_assert!((0.0..=1.0).contains(&a));
        prop_assert_eq!(a, average_map(&warp_segments(&preds), &gts, &ts).unwrap().value);

        let (bp, bg) = oracle::box_case(seed);
        prop_assert_eq!(box_map_at(&bp, &bg, 0.5).unwrap(), box_map_at(&warp_boxes(&bp), &bg, 0.5).unwrap());

        let (sp, sg) = oracle::sta_case(seed);
        let cfg = StaApConfig::default();
        let warped = restore_sta(&sp, |_, s| warp(s));
        for c in StaCriteria::ALL {
            prop_assert_eq!(sta_ap(&sp, &sg, c, &cfg).unwrap(), sta_ap(&warped, &sg, c, &cfg).unwrap());
        }
    }

    #[test]
    fn duplicating_predictions(seed in any::<u64>()) {
        let (preds, gts) = oracle::temporal_case(seed);
        let dup = doubled(&preds);
        for k in 1..4 {
            prop_assert_eq!(
                recall_at_k(&preds, &gts, k, 0.5).unwrap(),
                recall_at_k(&dup, &gts, 2 * k, 0.5).unwrap()
            );
        }
        // A copy of a hit can only claim a second ground truth if the
        // prediction overlaps two, so AP is compared where that cannot happen.
        for t in [0.3, 0.5, 0.7] {
            let single = preds.iter().all(|p| {
                gts.iter()
                    .filter(|g| g.video_id == p.video_id() && &g.label == p.label())
                    .filter(|g| temporal_iou(&p.segment(), &g.segment) >= t)
                    .count()
                    <= 1
            });
            if single {
                let d = average_map(&dup, &gts, &[t]).unwrap().value;
                prop_assert!(d <= average_map(&preds, &gts, &[t]).unwrap().value + 1e-12);
            }
        }

        let (bp, bg) = oracle::box_case(seed);
        let bdup: oracle::BoxMap = bp.iter().map(|(k, v)| (k.clone(), doubled(v))).collect();
        for t in [0.3, 0.5, 0.7] {
            let single = bp.iter().all(|(img, list)| {
                list.iter().all(|p| {
                    bg.get(img).map_or(0, |g| {
                        g.iter().filter(|g| g.class_id() == p.class_id() && p.bbox().iou(g.bbox()) >= t).count()
                    }) <= 1
                })
            });
            if single {
                prop_assert!(box_map_at(&bdup, &bg, t).unwrap() <= box_map_at(&bp, &bg, t).unwrap() + 1e-12);
            }
        }
    }

    #[test]
    fn action_ed_dominates(seed in any::<u64>()) {
        let (forecasts, gts) = oracle::lta_case(seed);
        for f in &forecasts {
            let gt = &gts[f.key()];
            let a = instance_edit_distance(f, gt, EdMode::Action).unwrap();
            let v = instance_edit_distance(f, gt, EdMode::Verb).unwrap();
            let n = instance_edit_distance(f, gt, EdMode::Noun).unwrap();
            prop_assert!(a >= v.max(n));
            prop_assert!((0.0..=1.0).contains(&a));
        }
    }

    #[test]
    fn nms_kept_boxes_separated(seed in any::<u64>(), t in 0.05f64..1.0) {
        let (boxes, scores) = oracle::nms_case(seed);
        let kept = nms(&boxes, &scores, t).unwrap();
        for (i, &a) in kept.iter().enumerate() {
            for &b in &kept[i + 1..] {
                prop_assert!(boxes[a].iou(&boxes[b]) <= t);
            }
            if i > 0 {
                prop_assert!(scores[kept[i - 1]] >= scores[a]);
            }
        }
        if let Some(s) = (0..boxes.len()).find(|i| !kept.contains(i)) {
            let mut b2 = boxes.clone();
            let mut s2 = scores.clone();
            b2.push(boxes[s]);
            s2.push(0.0);
            prop_assert_eq!(nms(&b2, &s2, t).unwrap(), kept);
        }
    }

    #[test]
    fn splice_identities(seed in any::<u64>()) {
        let cfg = FusionConfig::new(0.5, 5, 0.5).unwrap();
        let (a, _) = oracle::sta_case(seed);
        let (b, _) = oracle::sta_case(seed ^ 0x9e37_79b9);
        let empty = BTreeMap::new();
        let only_a = splice_and_nms(&a, &empty, &cfg).unwrap();
        for (kf, list) in &a {
            let boxes: Vec<BoundingBox> = list.iter().map(|p| *p.bbox()).collect();
            let scores: Vec<f64> = list.iter().map(|p| p.score()).collect();
            let want: Vec<StaInstance> = nms(&boxes, &scores, 0.5).unwrap().into_iter().map(|i| list[i].clone()).collect();
            prop_assert_eq!(&only_a[kf], &want);
        }
        // Distinct scores make the splice order irrelevant.
        let na: usize = a.values().map(Vec::len).sum();
        let a = restore_sta(&a, |i, _| i as f64 / 1000.0);
        let b = restore_sta(&b, |i, _| (na + i) as f64 / 1000.0);
        prop_assert_eq!(splice_and_nms(&a, &b, &cfg).unwrap(), splice_and_nms(&b, &a, &cfg).unwrap());
    }

    #[test]
    fn post_fuse_bounds(seed in any::<u64>(), t in 0.05f64..1.0) {
        let (a, _) = oracle::temporal_case(seed);
        let (b, _) = oracle::temporal_case(seed.wrapping_add(1));
        let out = post_fuse_segments(&a, &b, t).unwrap();
        for w in out.windows(2) {
            prop_assert!(w[0].score() >= w[1].score());
        }
        for (i, x) in out.iter().enumerate() {
            for y in &out[i + 1..] {
                if x.video_id() == y.video_id() && x.label() == y.label() {
                    prop_assert!(temporal_iou(&x.segment(), &y.segment()) <= t);
                }
            }
        }
    }

    #[test]
    fn encoding_bounded(x in 0u32..600, y in 0u32..400, w in 0u32..40, h in 0u32..80) {
        let b = rect(x, y, w, h);
        let v = box_positional_encoding(&b, 32, (640.0, 480.0)).unwrap();
        prop_assert_eq!(v.len(), 32);
        prop_assert!(v.iter().all(|c| (-1.0..=1.0).contains(c)));
    }

    #[test]
    fn vote_permutation_and_idempotence(seed in any::<u64>()) {
        let mut r = oracle::rng(seed);
        let vocab = ActionVocab::new(r.random_range(2..5), r.random_range(2..5)).unwrap();
        let z = r.random_range(1..5);
        let n = r.random_range(1..5);
        let clips: Vec<ScoreMatrix> = (0..n).map(|_| random_matrix(&mut r, z, vocab)).collect();
        for rule in [VoteRule::MeanProb, VoteRule::Majority] {
            let cfg = VoteConfig { rule };
            let base = multi_clips_vote(&clips, cfg).unwrap();
            for p in permutations(n) {
                let shuffled: Vec<ScoreMatrix> = p.iter().map(|&i| clips[i].clone()).collect();
                prop_assert_eq!(&multi_clips_vote(&shuffled, cfg).unwrap(), &base);
            }
            let single = multi_clips_vote(&clips[..1], cfg).unwrap();
            let same = vec![clips[0].clone(); n];
            let (labels, fused) = multi_clips_vote(&same, cfg).unwrap();
            prop_assert_eq!(&labels, &single.0);
            for (x, y) in fused.verb_rows().iter().flatten().zip(single.1.verb_rows().iter().flatten()) {
                prop_assert!((x - y).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn vote_scale_invariant(seed in any::<u64>(), c in 0.01f64..100.0) {
        let mut r = oracle::rng(seed);
        let vocab = ActionVocab::new(3, 4).unwrap();
        let clips: Vec<ScoreMatrix> = (0..3).map(|_| random_matrix(&mut r, 4, vocab)).collect();
        let rescale = |rows: &[Vec<f64>]| -> Vec<Vec<f64>> {
            rows.iter()
                .map(|row| {
                    let s: f64 = row.iter().map(|x| x * c).sum();
                    row.iter().map(|x| x * c / s).collect()
                })
                .collect()
        };
        let scaled: Vec<ScoreMatrix> = clips
            .iter()
            .map(|m| ScoreMatrix::new(rescale(m.verb_rows()), rescale(m.noun_rows()), vocab).unwrap())
            .collect();
        let (a, fa) = multi_clips_vote(&clips, VoteConfig::default()).unwrap();
        let (b, _) = multi_clips_vote(&scaled, VoteConfig::default()).unwrap();
        // Near-ties may flip under rounding; only compare clear winners.
        let clear = |rows: &[Vec<f64>], pos: usize| {
            let mut v = rows[pos].clone();
            v.sort_by(|x, y| y.total_cmp(x));
            v[0] - v[1] > 1e-9
        };
        for pos in 0..4 {
            if clear(fa.verb_rows(), pos) {
                prop_assert_eq!(a[pos].verb(), b[pos].verb());
            }
            if clear(fa.noun_rows(), pos) {
                prop_assert_eq!(a[pos].noun(), b[pos].noun());
            }
        }
    }

    #[test]
    fn snippet_schedule_invariants(n in 0u64..400, len in 1u32..40, stride in 1u32..40) {
        let meta = VideoMeta::new("v", n, 15.0).unwrap();
        let s = build_snippet_schedule(&meta, 15.0, len, stride).unwrap();
        prop_assert_eq!(s.is_empty(), n == 0);
        for w in s.snippets.windows(2) {
            prop_assert_eq!(w[1].0 - w[0].0, u64::from(stride));
        }
        let full = if s.padded_tail { s.len().saturating_sub(1) } else { s.len() };
        for &(a, b) in &s.snippets[..full] {
            prop_assert_eq!(b - a, u64::from(len));
        }
        if n > 0 {
            let last_end = s.snippets.last().unwrap().1;
            if stride <= len {
                prop_assert_eq!(last_end, n);
            } else {
                prop_assert!(last_end + u64::from(stride - len) >= n);
            }
            for i in 0..s.len() {
                let idx = s.frame_indices(i);
                prop_assert_eq!(idx.len(), len as usize);
                prop_assert!(idx.iter().all(|&f| f < n));
            }
        }
    }

    #[test]
    fn window_and_clip_invariants(end in 0.5f64..120.0, alpha in 0.5f64..32.0, clip in 0.1f64..4.0, stride in 0.1f64..4.0) {
        let w = observable_window(&[end], 1, alpha).unwrap();
        prop_assert!(w.start_s() >= 0.0 && w.end_s() >= w.start_s());
        prop_assert!(w.length() <= alpha + 1e-9);
        if clip <= w.length() {
            let clips = sliding_clips(&w, clip, stride).unwrap();
            prop_assert!(!clips.is_empty());
            for c in &clips {
                prop_assert!(c.start_s() >= w.start_s() - 1e-9 && c.end_s() <= w.end_s() + 1e-9);
                prop_assert!((c.length() - clip).abs() < 1e-9);
            }
            prop_assert!((clips.last().unwrap().end_s() - w.end_s()).abs() < 1e-9);
        } else {
            prop_assert!(sliding_clips(&w, clip, stride).is_err());
        }
    }

    #[test]
    fn frame_sampling(end in 2.0f64..60.0, alpha in 1.0f64..16.0, n in 1usize..40, seed in any::<u64>()) {
        let w = observable_window(&[end], 1, alpha).unwrap();
        let range = w.frame_range(15.0);
        for mode in [SampleMode::Random, SampleMode::Center, SampleMode::Uniform] {
            let f = sample_frames(&w, n, 15.0, seed, mode).unwrap();
            prop_assert_eq!(f.len(), n);
            prop_assert!(f.windows(2).all(|p| p[0] <= p[1]));
            prop_assert!(f.iter().all(|x| range.contains(x)));
            prop_assert_eq!(&f, &sample_frames(&w, n, 15.0, seed, mode).unwrap());
            if mode == SampleMode::Random && (range.end - range.start) as usize >= n {
                prop_assert!(f.windows(2).all(|p| p[0] < p[1]));
            }
        }
    }
}

#[test]
fn encoding_injective_on_grid() {
    let mut r = oracle::rng(11);
    let mut seen: Vec<(Vec<u32>, Vec<f64>)> = Vec::new();
    for _ in 0..400 {
        let mut c: Vec<u32> = (0..4).map(|_| r.random_range(0..=1000u32)).collect();
        if c[0] > c[2] {
            c.swap(0, 2);
        }
        if c[1] > c[3] {
            c.swap(1, 3);
        }
        let b = BoundingBox::new(
            f64::from(c[0]) / 1000.0,
            f64::from(c[1]) / 1000.0,
            f64::from(c[2]) / 1000.0,
            f64::from(c[3]) / 1000.0,
        )
        .unwrap();
        let v = box_positional_encoding(&b, 32, (1.0, 1.0)).unwrap();
        for (other, w) in &seen {
            if other != &c {
                let d = v.iter().zip(w).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
                assert!(d > 1e-9, "{c:?} and {other:?} collide");
            }
        }
        seen.push((c, v));
    }
}
