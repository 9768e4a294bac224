use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use anyhow::Context;
use egoforge_core::dataset::{FhpGroundTruth, StaPredictions};
use egoforge_core::fusion::{
    expand_candidates, multi_clips_vote, post_fuse_segments, splice_and_nms, topk_by_noun_score, FusionConfig,
    VoteConfig, VoteRule,
};
use egoforge_core::io::{self, AnnotationSet, Loaded};
use egoforge_core::metrics::{
    average_map, box_ap, displacement_summary, edit_distance_at_z, recall_at_k, sta_ap, EdMode, MetricReport,
    StaApConfig, StaCriteria,
};
use egoforge_core::model::{FeatureKind, LtaForecast, TemporalSegment, VideoMeta};
use egoforge_core::report::{self, Format, Precision};
use egoforge_core::snippet::{build_snippet_schedule, center_clip, observable_window, prefuse_features, sliding_clips};
use egoforge_core::toyheads::experiment::clip_features;
use egoforge_core::toyheads::{
    generate_synthetic, run_voting_experiment, stub_feature_matrix, train_head, train_lta_head, HeadKind, LinearHead,
    Optimizer, Sample, StubLatent, StubVariant, SynthConfig, Target, VotingExperimentConfig,
};
use serde_json::json;

use crate::args::*;
use crate::{usage, CmdResult, Failure};

fn read(path: &Path) -> CmdResult<String> {
    fs::read_to_string(path).with_context(|| format!("reading {}", path.display())).map_err(Failure::Data)
}

fn warn<T>(path: &Path, loaded: Loaded<T>) -> T {
    for w in &loaded.warnings {
        eprintln!("warning: {}: {w}", path.display());
    }
    loaded.value
}

/// Parse a file with `parse`, attaching the path to any failure.
fn load<T>(path: &Path, parse: impl FnOnce(&str) -> egoforge_core::Result<Loaded<T>>) -> CmdResult<T> {
    let text = read(path)?;
    let loaded = parse(&text).with_context(|| format!("loading {}", path.display())).map_err(Failure::Data)?;
    Ok(warn(path, loaded))
}

fn write_or_print(out: Option<&Path>, text: &str) -> CmdResult {
    match out {
        Some(p) => fs::write(p, text).with_context(|| format!("writing {}", p.display())).map_err(Failure::Data),
        None => {
            out!("{text}");
            Ok(())
        }
    }
}

fn decimals(s: &str) -> u32 {
    s.split_once('.').map_or(0, |(_, f)| f.len() as u32)
}

/// A comma list (`0.3,0.5`) or an inclusive range `start:end:step`.
pub fn parse_thresholds(text: &str) -> CmdResult<Vec<f64>> {
    let bad = || usage(format!("invalid threshold list {text:?}"));
    let num = |s: &str| s.trim().parse::<f64>().ok().filter(|v| v.is_finite()).ok_or_else(bad);
    let values = if let [a, b, step] = text.split(':').collect::<Vec<_>>()[..] {
        let d = decimals(a.trim()).max(decimals(b.trim())).max(decimals(step.trim())).min(12);
        let scale = 10f64.powi(d as i32);
        let (a, b, step) = (num(a)?, num(b)?, num(step)?);
        if step <= 0.0 || b < a {
            return Err(bad());
        }
        let (ai, bi, si) = ((a * scale).round(), (b * scale).round(), (step * scale).round());
        if si <= 0.0 {
            return Err(bad());
        }
        let n = ((bi - ai) / si).floor() as usize + 1;
        (0..n).map(|i| (ai + i as f64 * si) / scale).collect()
    } else {
        text.split(',').map(num).collect::<CmdResult<Vec<_>>>()?
    };
    if values.is_empty() || values.iter().any(|t| !(*t > 0.0 && *t <= 1.0)) {
        return Err(usage(format!("thresholds in {text:?} must lie in (0, 1]")));
    }
    Ok(values)
}

fn parse_counts(text: &str) -> CmdResult<Vec<usize>> {
    let v = text
        .split(',')
        .map(|s| s.trim().parse::<usize>().ok().filter(|k| *k > 0))
        .collect::<Option<Vec<_>>>()
        .ok_or_else(|| usage(format!("invalid count list {text:?}")))?;
    if v.is_empty() {
        return Err(usage("empty count list"));
    }
    Ok(v)
}

fn parse_seconds(text: &str) -> CmdResult<Vec<f64>> {
    text.split(',')
        .map(|s| s.trim().parse::<f64>().ok().filter(|v| v.is_finite() && *v > 0.0))
        .collect::<Option<Vec<_>>>()
        .ok_or_else(|| usage(format!("invalid list of seconds {text:?}")))
}

fn check_unit(name: &str, v: f64) -> CmdResult {
    if v > 0.0 && v <= 1.0 {
        Ok(())
    } else {
        Err(usage(format!("{name} must lie in (0, 1], got {v}")))
    }
}

fn emit(reports: &[MetricReport], precision: Precision, format: OutFormat) -> CmdResult {
    out!("{}", report::render_metrics(reports, precision, format.into())?);
    Ok(())
}

fn fmt_threshold(t: f64) -> String {
    format!("{t}")
}

/// Name, start, end, and frame range for snippets.
type ScheduleRow = (String, f64, f64, Option<(u64, u64)>);

pub fn schedule(a: ScheduleArgs) -> CmdResult {
    let rows: Vec<ScheduleRow> = if let Some(alpha) = a.alpha {
        let end = a.end.ok_or_else(|| usage("--alpha needs --end"))?;
        if !(a.clip_len > 0.0 && a.clip_stride > 0.0) {
            return Err(usage("--clip-len and --clip-stride must be positive"));
        }
        let w = observable_window(&[end], 1, alpha)?;
        let clips: Vec<TemporalSegment> = match a.mode {
            ClipMode::Sliding => sliding_clips(&w, a.clip_len, a.clip_stride)?,
            ClipMode::Center => vec![center_clip(&w, a.clip_len)?],
        };
        clips.iter().enumerate().map(|(i, c)| (format!("clip{i}"), c.start_s(), c.end_s(), None)).collect()
    } else {
        let n = a.num_frames.ok_or_else(|| usage("schedule needs --num-frames, or --alpha and --end"))?;
        if a.snippet_len == 0 || a.stride == 0 {
            return Err(usage("--snippet-len and --stride must be positive"));
        }
        let meta = VideoMeta::new("input", n, a.fps).map_err(|e| usage(e.to_string()))?;
        let s = build_snippet_schedule(&meta, a.fps, a.snippet_len, a.stride)?;
        (0..s.len())
            .map(|i| {
                let (t0, t1) = s.time_span(i);
                (format!("snippet{i}"), t0, t1, Some(s.snippets[i]))
            })
            .collect()
    };
    match a.format {
        OutFormat::Json => {
            let items: Vec<_> = rows
                .iter()
                .map(|(name, s, e, f)| {
                    let mut v = json!({ "name": name, "start_s": s, "end_s": e });
                    if let Some((fs, fe)) = f {
                        v["start_frame"] = json!(fs);
                        v["end_frame"] = json!(fe);
                    }
                    v
                })
                .collect();
            outln!("{}", serde_json::to_string_pretty(&items).map_err(|e| Failure::Data(e.into()))?);
        }
        OutFormat::Plain | OutFormat::Csv => {
            let sep = if a.format == OutFormat::Csv { "," } else { "\t" };
            for (name, s, e, f) in rows {
                match f {
                    Some((fs, fe)) => outln!("{name}{sep}{fs}{sep}{fe}{sep}{s:.6}{sep}{e:.6}"),
                    None => outln!("{name}{sep}{s:.6}{sep}{e:.6}"),
                }
            }
        }
    }
    Ok(())
}

pub fn eval(cmd: EvalCommand) -> CmdResult {
    match cmd {
        EvalCommand::Mq { io: p, tiou, recall_k, recall_tiou } => {
            let thresholds = parse_thresholds(&tiou)?;
            let ks = parse_counts(&recall_k)?;
            check_unit("--recall-tiou", recall_tiou)?;
            let gt = load(&p.gt, io::parse_mq_gt)?;
            let preds = load(&p.pred, |t| io::parse_mq_pred(t, &gt))?;
            let labeled = gt.labeled();
            let mut reports = Vec::new();
            for k in ks {
                let v = recall_at_k(&preds, &labeled, k, recall_tiou)?;
                reports.push(MetricReport::new(format!("R{k}@{}", fmt_threshold(recall_tiou)), v, labeled.len()));
            }
            reports.push(average_map(&preds, &labeled, &thresholds)?);
            emit(&reports, Precision::Percent, p.format)
        }
        EvalCommand::Nlq { io: p, tiou, recall_k } => {
            let thresholds = parse_thresholds(&tiou)?;
            let ks = parse_counts(&recall_k)?;
            let gt = load(&p.gt, io::parse_nlq_gt)?;
            let preds = load(&p.pred, |t| io::parse_nlq_pred(t, &gt))?;
            let labeled = gt.labeled();
            let mut reports = Vec::new();
            for k in ks {
                for &t in &thresholds {
                    let v = recall_at_k(&preds, &labeled, k, t)?;
                    reports.push(MetricReport::new(format!("R{k}@{}", fmt_threshold(t)), v, labeled.len()));
                }
            }
            emit(&reports, Precision::Percent, p.format)
        }
        EvalCommand::Fhp { io: p } => {
            let gt = load(&p.gt, io::parse_fhp_gt)?;
            let preds = load(&p.pred, |t| io::parse_fhp_pred(t, &gt))?;
            eval_fhp(&gt, &preds, p.format)
        }
        EvalCommand::Lta { io: p, z, k } => {
            let gt = load(&p.gt, io::parse_lta_gt)?;
            if let Some(z) = z {
                if z != gt.config.horizon {
                    return Err(Failure::Data(anyhow::anyhow!(
                        "--z {z} does not match ground-truth Z={}",
                        gt.config.horizon
                    )));
                }
            }
            let k = k.unwrap_or(gt.config.num_candidates);
            if k == 0 {
                return Err(usage("--k must be positive"));
            }
            let preds = load(&p.pred, |t| io::parse_lta_pred(t, &gt, k))?;
            let preds = preds
                .into_iter()
                .map(|f| {
                    let c = f.candidates().iter().take(k).cloned().collect();
                    LtaForecast::new(f.key().clone(), c, f.score_matrix().cloned(), gt.config.horizon)
                })
                .collect::<egoforge_core::Result<Vec<_>>>()?;
            let mut reports = Vec::new();
            for mode in EdMode::ALL {
                let v = edit_distance_at_z(&preds, &gt.instances, mode)?;
                reports.push(MetricReport::new(
                    format!("{} ED@{}", mode.name(), gt.config.horizon),
                    v,
                    gt.instances.len(),
                ));
            }
            emit(&reports, Precision::EditDistance, p.format)
        }
        EvalCommand::Sta { io: p, top_k, ttc_tol, box_iou } => {
            if top_k == 0 {
                return Err(usage("--top-k must be positive"));
            }
            check_unit("--box-iou", box_iou)?;
            if !(ttc_tol.is_finite() && ttc_tol >= 0.0) {
                return Err(usage("--ttc-tol must be nonnegative"));
            }
            let gt = load(&p.gt, io::parse_sta_gt)?;
            let preds = load(&p.pred, |t| io::parse_sta_pred(t, &gt))?;
            let cfg = StaApConfig { box_iou_thresh: box_iou, ttc_tol_s: ttc_tol, top_k };
            let count = gt.instances.values().map(Vec::len).sum();
            let reports = StaCriteria::ALL
                .iter()
                .map(|&c| Ok(MetricReport::new(c.name(), sta_ap(&preds, &gt.instances, c, &cfg)?, count)))
                .collect::<CmdResult<Vec<_>>>()?;
            emit(&reports, Precision::Percent, p.format)
        }
        EvalCommand::Scod { io: p, tiou } => {
            let thresholds = parse_thresholds(&tiou)?;
            let gt = load(&p.gt, io::parse_scod_gt)?;
            let preds = load(&p.pred, |t| io::parse_scod_pred(t, &gt))?;
            let (s, full) = box_ap(&preds, &gt.instances, &thresholds)?;
            let reports = [
                MetricReport::new("AP", s.ap, full.count),
                MetricReport::new("AP50", s.ap50, full.count),
                MetricReport::new("AP75", s.ap75, full.count),
            ];
            emit(&reports, Precision::Percent, p.format)
        }
    }
}

fn eval_fhp(
    gt: &FhpGroundTruth,
    preds: &BTreeMap<egoforge_core::model::ClipKey, egoforge_core::model::HandKeyframes>,
    format: OutFormat,
) -> CmdResult {
    let mut pairs = Vec::with_capacity(gt.instances.len());
    let mut missing = Vec::new();
    for (k, g) in &gt.instances {
        match preds.get(k) {
            Some(p) => pairs.push((p, g)),
            None => missing.push(k.to_string()),
        }
    }
    if !missing.is_empty() {
        return Err(Failure::Data(anyhow::anyhow!("no prediction for hand clip(s): {}", missing.join(", "))));
    }
    let s = displacement_summary(&pairs);
    let mut reports = Vec::new();
    for (name, v) in [
        ("Left M.Disp", s.left_mean),
        ("Left C.Disp", s.left_contact),
        ("Right M.Disp", s.right_mean),
        ("Right C.Disp", s.right_contact),
    ] {
        match v {
            Some(v) => reports.push(MetricReport::new(name, v, pairs.len())),
            None => eprintln!("warning: {name} undefined: no visible keyframes"),
        }
    }
    emit(&reports, Precision::Displacement, format)
}

pub fn fuse(cmd: FuseCommand) -> CmdResult {
    match cmd {
        FuseCommand::Pre { a, b, out } => {
            let fa = io::read_features(&a, FeatureKind::Verb)?;
            let fb = io::read_features(&b, FeatureKind::Noun)?;
            let fused = prefuse_features(&fa, &fb)?;
            io::write_features(&out, &fused)?;
            outln!("rows {} dim {}", fused.num_rows(), fused.dim());
            Ok(())
        }
        FuseCommand::Post { gt, a, b, tiou, out } => {
            let t = match parse_thresholds(&tiou)?[..] {
                [t] => t,
                _ => return Err(usage("--tiou takes a single threshold for post-fusion")),
            };
            let gt_text = read(&gt)?;
            let set = warn(&gt, io::parse_annotation(&gt_text).map_err(|e| Failure::Data(e.into()))?);
            let (schema, pa, pb) = match set {
                AnnotationSet::Mq(f) => {
                    let g = f.into_dataset()?;
                    let pa = load(&a, |s| io::parse_mq_pred(s, &g))?;
                    let pb = load(&b, |s| io::parse_mq_pred(s, &g))?;
                    (io::MQ_PRED, pa, pb)
                }
                AnnotationSet::Nlq(f) => {
                    let g = f.into_dataset()?;
                    let pa = load(&a, |s| io::parse_nlq_pred(s, &g))?;
                    let pb = load(&b, |s| io::parse_nlq_pred(s, &g))?;
                    (io::NLQ_PRED, pa, pb)
                }
                other => {
                    return Err(Failure::Data(anyhow::anyhow!(
                        "post-fusion needs mq or nlq ground truth, got {}",
                        other.schema()
                    )));
                }
            };
            let fused = post_fuse_segments(&pa, &pb, t)?;
            let text = io::to_canonical_json(&io::SegmentPredFile::from_predictions(schema, &fused))?;
            write_or_print(out.as_deref(), &text)
        }
        FuseCommand::Sta { gt, a, b, top_k, nms_iou, out } => {
            let cfg = FusionConfig::new(nms_iou, top_k, 0.5).map_err(|e| usage(e.to_string()))?;
            let g = load(&gt, io::parse_sta_gt)?;
            let top = |p: StaPredictions| -> StaPredictions {
                p.into_iter().map(|(k, v)| (k, topk_by_noun_score(&v, cfg.top_k))).collect()
            };
            let pa = top(load(&a, |s| io::parse_sta_pred(s, &g))?);
            let pb = top(load(&b, |s| io::parse_sta_pred(s, &g))?);
            let fused = splice_and_nms(&pa, &pb, &cfg)?;
            let text = io::to_canonical_json(&io::StaPredFile::from_predictions(&fused))?;
            write_or_print(out.as_deref(), &text)
        }
    }
}

pub fn vote(a: VoteArgs) -> CmdResult {
    if a.k == 0 {
        return Err(usage("--k must be positive"));
    }
    let file = load(&a.pred, io::parse_lta_clips)?;
    let z = file.z;
    let (_, groups) = file.into_groups()?;
    let cfg = VoteConfig {
        rule: match a.mode {
            VoteMode::MeanProb => VoteRule::MeanProb,
            VoteMode::Majority => VoteRule::Majority,
        },
    };
    let mut forecasts = Vec::with_capacity(groups.len());
    for (key, mats) in groups {
        let (labels, fused) = multi_clips_vote(&mats, cfg)?;
        let mut cands = vec![labels];
        for c in expand_candidates(&fused, a.k)? {
            if cands.len() == a.k {
                break;
            }
            if !cands.contains(&c) {
                cands.push(c);
            }
        }
        forecasts.push(LtaForecast::new(key, cands, Some(fused), z)?);
    }
    let text = io::to_canonical_json(&io::LtaPredFile::from_predictions(z, &forecasts))?;
    write_or_print(a.out.as_deref(), &text)
}

fn synth_config(path: Option<&Path>) -> CmdResult<SynthConfig> {
    match path {
        Some(p) => load(p, io::parse_config::<SynthConfig>),
        None => Ok(SynthConfig::default()),
    }
}

pub fn synth(a: SynthArgs) -> CmdResult {
    let mut cfg = synth_config(a.config.as_deref())?;
    cfg.seed = a.seed;
    if let Some(n) = a.num_videos {
        cfg.num_videos = n;
    }
    if let Some(z) = a.z {
        cfg.horizon = z;
    }
    if let Some(k) = a.k {
        cfg.num_candidates = k;
    }
    cfg.validate().map_err(|e| usage(e.to_string()))?;
    let data = generate_synthetic(&cfg)?;
    let feat_dir = a.out.join("features");
    fs::create_dir_all(&feat_dir).with_context(|| format!("creating {}", feat_dir.display())).map_err(Failure::Data)?;

    let mut written: Vec<PathBuf> = Vec::new();
    let mut save = |name: &str, text: String| -> CmdResult {
        let p = a.out.join(name);
        io::write_text(&p, &text)?;
        written.push(PathBuf::from(name));
        Ok(())
    };
    save("config.json", io::to_canonical_json(&cfg)?)?;
    save("mq_gt.json", io::to_canonical_json(&io::MqFile::from_dataset(&data.mq))?)?;
    save(
        "mq_pred.json",
        io::to_canonical_json(&io::SegmentPredFile::from_predictions(io::MQ_PRED, &data.mq.as_predictions()))?,
    )?;
    save("nlq_gt.json", io::to_canonical_json(&io::NlqFile::from_dataset(&data.nlq))?)?;
    save(
        "nlq_pred.json",
        io::to_canonical_json(&io::SegmentPredFile::from_predictions(io::NLQ_PRED, &data.nlq.as_predictions()))?,
    )?;
    save("fhp_gt.json", io::to_canonical_json(&io::FhpFile::from_dataset(&data.fhp))?)?;
    save("fhp_pred.json", io::to_canonical_json(&io::FhpPredFile::from_predictions(&data.fhp.instances))?)?;
    save("lta_gt.json", io::to_canonical_json(&io::LtaFile::from_dataset(&data.lta))?)?;
    save(
        "lta_pred.json",
        io::to_canonical_json(&io::LtaPredFile::from_predictions(cfg.horizon, &data.lta.as_predictions()))?,
    )?;
    save("sta_gt.json", io::to_canonical_json(&io::StaFile::from_dataset(&data.sta))?)?;
    save("sta_pred.json", io::to_canonical_json(&io::StaPredFile::from_predictions(&data.sta.instances))?)?;
    save("scod_gt.json", io::to_canonical_json(&io::ScodFile::from_dataset(&data.scod))?)?;
    save("scod_pred.json", io::to_canonical_json(&io::ScodPredFile::from_predictions(&data.scod.instances))?)?;

    for (vi, meta) in data.videos().iter().enumerate() {
        let sched = build_snippet_schedule(meta, cfg.fps, 16, 8)?;
        let spans: Vec<(f64, f64)> = (0..sched.len()).map(|i| sched.time_span(i)).collect();
        let latent = StubLatent {
            state: &data.latent,
            video_index: vi,
            action_len_s: cfg.action_len_s,
            signal: cfg.feature_signal,
        };
        for variant in [StubVariant::Verb, StubVariant::Noun] {
            let m = stub_feature_matrix(meta.video_id(), &spans, cfg.feature_dim, variant, Some(latent))?;
            let tag = if variant == StubVariant::Verb { "verb" } else { "noun" };
            let name = format!("features/{}.{tag}.egft", meta.video_id());
            io::write_features(&a.out.join(&name), &m)?;
            written.push(PathBuf::from(name));
        }
    }
    for w in written {
        outln!("{}", w.display());
    }
    Ok(())
}

fn fhp_samples(data: &egoforge_core::toyheads::SynthDataset) -> CmdResult<Vec<Sample>> {
    let len = data.config.action_len_s;
    let mut out = Vec::new();
    for (key, hands) in &data.fhp.instances {
        let vi = data
            .video_index(&key.video_id)
            .ok_or_else(|| Failure::Data(anyhow::anyhow!("unknown video {}", key.video_id)))?;
        let start = f64::from(key.clip_index) * len;
        let seg = TemporalSegment::new(start, start + len)?;
        for x in clip_features(data, vi, &[seg])? {
            out.push(Sample { x, target: Target::Coords(hands.to_vector()) });
        }
    }
    Ok(out)
}

fn print_curve(curve: &[f64], format: OutFormat) -> CmdResult {
    match format {
        OutFormat::Json => {
            outln!(
                "{}",
                serde_json::to_string_pretty(&json!({ "loss_curve": curve })).map_err(|e| Failure::Data(e.into()))?
            );
        }
        OutFormat::Plain | OutFormat::Csv => {
            let sep = if format == OutFormat::Csv { "," } else { "\t" };
            for (i, l) in curve.iter().enumerate() {
                outln!("epoch {}{sep}{l:.6}", i + 1);
            }
        }
    }
    Ok(())
}

pub fn train(a: TrainArgs) -> CmdResult {
    let mut cfg = VotingExperimentConfig::default();
    if let Some(p) = a.config.as_deref() {
        cfg.synth = synth_config(Some(p))?;
    }
    cfg.synth.seed = a.seed;
    cfg.train.seed = a.seed;
    if let Some(n) = a.num_videos {
        if n < 2 {
            return Err(usage("--num-videos must be at least 2"));
        }
        cfg.synth.num_videos = n;
        cfg.num_train_videos = (n * 3 / 5).clamp(1, n - 1);
    }
    cfg.clip_len_s = a.clip_len;
    cfg.clip_stride_s = a.clip_stride;
    if !(a.clip_len > 0.0 && a.clip_stride > 0.0) {
        return Err(usage("--clip-len and --clip-stride must be positive"));
    }
    let default_lr = match a.task {
        TrainTask::Fhp => 20.0,
        _ => 0.1,
    };
    if a.task == TrainTask::Fhp {
        cfg.train.epochs = 40;
        cfg.train.batch_size = 4;
    }
    if let Some(e) = a.epochs {
        cfg.train.epochs = e;
    }
    let lr = a.lr.unwrap_or(default_lr);
    cfg.train.optimizer = match a.momentum {
        Some(m) => Optimizer::Momentum { lr, momentum: m },
        None => Optimizer::Sgd { lr },
    };
    cfg.synth.validate().map_err(|e| usage(e.to_string()))?;

    match a.task {
        TrainTask::Lta | TrainTask::Fhp => {
            let data = generate_synthetic(&cfg.synth)?;
            let outcome = if a.task == TrainTask::Lta {
                train_lta_head(&data, &cfg)?
            } else {
                let samples = fhp_samples(&data)?;
                let head = LinearHead::zeros(HeadKind::Regression20, 2 * data.config.feature_dim)?;
                train_head(head, &samples, &cfg.train)?
            };
            if let Some(out) = a.out.as_deref() {
                io::save_json(out, &outcome.head)?;
            }
            print_curve(&outcome.loss_curve, a.format)
        }
        TrainTask::Vote => {
            cfg.vote_alphas_s = parse_seconds(&a.alpha)?;
            cfg.center_alpha_s = cfg.vote_alphas_s.iter().copied().fold(f64::INFINITY, f64::min);
            let trend = run_voting_experiment(&cfg)?;
            let mut reports = vec![MetricReport::new(
                format!("center OW={}", trend_alpha(cfg.center_alpha_s)),
                trend.center_ed,
                trend.episodes,
            )];
            for (alpha, ed) in &trend.vote_ed {
                reports.push(MetricReport::new(format!("vote OW={}", trend_alpha(*alpha)), *ed, trend.episodes));
            }
            emit(&reports, Precision::EditDistance, a.format)
        }
    }
}

fn trend_alpha(a: f64) -> String {
    format!("{a}")
}

pub fn report(a: ReportArgs) -> CmdResult {
    let tables: Vec<&report::Fixture> = if a.table == "all" {
        report::fixtures::ALL.to_vec()
    } else {
        vec![report::fixture(&a.table).ok_or_else(|| {
            let names: Vec<&str> = report::fixtures::ALL.iter().map(|f| f.name).collect();
            usage(format!("unknown table {:?}; available: all, {}", a.table, names.join(", ")))
        })?]
    };
    let format: Format = a.format.into();
    if format == Format::Json && tables.len() > 1 {
        let values = tables
            .iter()
            .map(|t| {
                let s = report::render_fixture(t, Format::Json)?;
                serde_json::from_str::<serde_json::Value>(&s).map_err(egoforge_core::Error::from)
            })
            .collect::<egoforge_core::Result<Vec<_>>>()?;
        outln!("{}", serde_json::to_string_pretty(&values).map_err(|e| Failure::Data(e.into()))?);
        return Ok(());
    }
    let parts = tables.iter().map(|t| report::render_fixture(t, format)).collect::<egoforge_core::Result<Vec<_>>>()?;
    out!("{}", parts.join("\n"));
    Ok(())
}
