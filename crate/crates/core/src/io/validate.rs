//! Invariant checks on parsed annotation files. Violations are collected,
//! not raised, so a single pass reports every problem in a file.

use std::collections::BTreeSet;
use std::fmt;

use serde::Serialize;

use crate::io::records::*;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Violation {
    /// JSON-path-like location, e.g. `instances[3]`.
    pub location: String,
    pub message: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.location, self.message)
    }
}

/// Any parsed annotation or prediction file, tagged by its schema.
#[derive(Debug, Clone, PartialEq)]
pub enum AnnotationSet {
    Mq(MqFile),
    MqPred(SegmentPredFile),
    Nlq(NlqFile),
    NlqPred(SegmentPredFile),
    Fhp(FhpFile),
    FhpPred(FhpPredFile),
    Lta(LtaFile),
    LtaPred(LtaPredFile),
    Sta(StaFile),
    StaPred(StaPredFile),
    Scod(ScodFile),
    ScodPred(ScodPredFile),
}

impl AnnotationSet {
    pub fn schema(&self) -> &str {
        match self {
            AnnotationSet::Mq(f) => &f.schema,
            AnnotationSet::MqPred(f) | AnnotationSet::NlqPred(f) => &f.schema,
            AnnotationSet::Nlq(f) => &f.schema,
            AnnotationSet::Fhp(f) => &f.schema,
            AnnotationSet::FhpPred(f) => &f.schema,
            AnnotationSet::Lta(f) => &f.schema,
            AnnotationSet::LtaPred(f) => &f.schema,
            AnnotationSet::Sta(f) => &f.schema,
            AnnotationSet::StaPred(f) => &f.schema,
            AnnotationSet::Scod(f) => &f.schema,
            AnnotationSet::ScodPred(f) => &f.schema,
        }
    }
}

#[derive(Default)]
struct Report(Vec<Violation>);

impl Report {
    fn push(&mut self, location: impl Into<String>, message: impl Into<String>) {
        self.0.push(Violation { location: location.into(), message: message.into() });
    }

    fn segment(&mut self, at: &str, start: f64, end: f64) {
        if !(start.is_finite() && end.is_finite()) {
            self.push(at, "segment bounds must be finite");
        } else if start < 0.0 {
            self.push(at, "segment starts before 0");
        } else if start > end {
            self.push(at, "segment reversed");
        }
    }

    fn finite(&mut self, at: &str, what: &str, v: f64) {
        if !v.is_finite() {
            self.push(at, format!("{what} must be finite"));
        }
    }

    fn bbox(&mut self, at: &str, b: &[f64; 4]) {
        if b.iter().any(|v| !v.is_finite()) {
            self.push(at, "box coordinates must be finite");
        } else if b[0] > b[2] || b[1] > b[3] {
            self.push(at, "box reversed");
        }
    }

    fn videos(&mut self, videos: &[VideoRecord]) -> BTreeSet<String> {
        let mut ids = BTreeSet::new();
        for (i, v) in videos.iter().enumerate() {
            let at = format!("videos[{i}]");
            if v.video_id.is_empty() {
                self.push(&at, "empty video_id");
            }
            if !(v.fps.is_finite() && v.fps > 0.0) {
                self.push(&at, "fps must be positive");
            }
            if !ids.insert(v.video_id.clone()) {
                self.push(&at, format!("duplicate video_id {}", v.video_id));
            }
        }
        ids
    }

    fn images(&mut self, images: &[ImageRecord]) -> BTreeSet<String> {
        let mut ids = BTreeSet::new();
        for (i, im) in images.iter().enumerate() {
            let at = format!("images[{i}]");
            if im.keyframe_id.is_empty() {
                self.push(&at, "empty keyframe_id");
            }
            if !im.size.iter().all(|v| v.is_finite() && *v > 0.0) {
                self.push(&at, "image size must be positive");
            }
            if !ids.insert(im.keyframe_id.clone()) {
                self.push(&at, format!("duplicate keyframe_id {}", im.keyframe_id));
            }
        }
        ids
    }

    fn hands(&mut self, records: &[FhpRecord], field: &str) {
        let mut keys = BTreeSet::new();
        for (i, r) in records.iter().enumerate() {
            let at = format!("{field}[{i}]");
            let k = &r.keyframes;
            for f in [&k.c, &k.p, &k.p1, &k.p2, &k.p3] {
                if f.left.iter().chain(&f.right).any(|v| !v.is_finite()) {
                    self.push(&at, "hand coordinates must be finite");
                    break;
                }
            }
            if !keys.insert((r.video_id.clone(), r.clip_index)) {
                self.push(&at, format!("duplicate clip {}#{}", r.video_id, r.clip_index));
            }
        }
    }

    fn seq(&mut self, at: &str, seq: &[ActionRecord], z: usize, vocab: Option<(u32, u32)>, what: &str) {
        if seq.len() != z {
            self.push(at, format!("{what} {} differs from Z={z}", seq.len()));
        }
        if let Some((cv, cn)) = vocab {
            if let Some([v, n]) = seq.iter().find(|[v, n]| *v >= cv || *n >= cn) {
                self.push(at, format!("action ({v}, {n}) outside vocabulary {cv}x{cn}"));
            }
        }
    }

    fn score_rows(&mut self, at: &str, rows: &[Vec<f64>], z: usize, what: &str) {
        if rows.len() != z {
            self.push(at, format!("{what} score rows {} differ from Z={z}", rows.len()));
        }
        let width = rows.first().map_or(0, Vec::len);
        for (p, r) in rows.iter().enumerate() {
            if r.len() != width || width == 0 {
                self.push(at, format!("{what} score row {p} has inconsistent width"));
                return;
            }
            let s: f64 = r.iter().sum();
            if r.iter().any(|v| !v.is_finite() || *v < 0.0) || (s - 1.0).abs() > 1e-6 {
                self.push(at, format!("{what} score row {p} is not a distribution"));
                return;
            }
        }
    }
}

/// Every invariant breach in `set`; empty means valid.
pub fn validate_dataset(set: &AnnotationSet) -> Vec<Violation> {
    let mut r = Report::default();
    match set {
        AnnotationSet::Mq(f) => {
            let ids = r.videos(&f.videos);
            if f.num_classes == 0 {
                r.push("num_classes", "must be positive");
            }
            for (i, m) in f.instances.iter().enumerate() {
                let at = format!("instances[{i}]");
                r.segment(&at, m.start_s, m.end_s);
                if !ids.contains(&m.video_id) {
                    r.push(&at, format!("unknown video_id {}", m.video_id));
                }
                if m.class_id >= f.num_classes {
                    r.push(&at, format!("class_id {} out of range", m.class_id));
                }
            }
        }
        AnnotationSet::Nlq(f) => {
            let ids = r.videos(&f.videos);
            for (i, m) in f.instances.iter().enumerate() {
                let at = format!("instances[{i}]");
                r.segment(&at, m.start_s, m.end_s);
                if !ids.contains(&m.video_id) {
                    r.push(&at, format!("unknown video_id {}", m.video_id));
                }
                if m.query_id.is_empty() {
                    r.push(&at, "empty query_id");
                }
            }
        }
        AnnotationSet::MqPred(f) | AnnotationSet::NlqPred(f) => {
            let mq = matches!(set, AnnotationSet::MqPred(_));
            for (i, p) in f.predictions.iter().enumerate() {
                let at = format!("predictions[{i}]");
                r.segment(&at, p.start_s, p.end_s);
                r.finite(&at, "score", p.score);
                match (mq, &p.class_id, &p.query_id) {
                    (true, Some(_), None) => {}
                    (false, None, Some(q)) if !q.is_empty() => {}
                    (true, _, _) => r.push(&at, "needs class_id and no query_id"),
                    (false, _, _) => r.push(&at, "needs nonempty query_id and no class_id"),
                }
            }
        }
        AnnotationSet::Fhp(f) => {
            if !f.resolution.iter().all(|v| v.is_finite() && *v > 0.0) {
                r.push("resolution", "must be positive");
            }
            r.hands(&f.instances, "instances");
        }
        AnnotationSet::FhpPred(f) => r.hands(&f.predictions, "predictions"),
        AnnotationSet::Lta(f) => {
            let c = f.config;
            if c.z == 0 || c.c_v == 0 || c.c_n == 0 || c.k == 0 {
                r.push("config", "Z, C_v, C_n and K must be positive");
            }
            let mut keys = BTreeSet::new();
            for (i, l) in f.instances.iter().enumerate() {
                let at = format!("instances[{i}]");
                r.seq(&at, &l.sequence, c.z, Some((c.c_v, c.c_n)), "sequence length");
                if !keys.insert((l.video_id.clone(), l.clip_index)) {
                    r.push(&at, format!("duplicate clip {}#{}", l.video_id, l.clip_index));
                }
            }
        }
        AnnotationSet::LtaPred(f) => {
            if f.z == 0 {
                r.push("Z", "must be positive");
            }
            let mut keys = BTreeSet::new();
            for (i, p) in f.predictions.iter().enumerate() {
                let at = format!("predictions[{i}]");
                if p.candidates.is_none() && p.score_matrix.is_none() {
                    r.push(&at, "needs candidates or score_matrix");
                }
                if let Some(cands) = &p.candidates {
                    if cands.is_empty() {
                        r.push(&at, "empty candidate list");
                    }
                    for (j, c) in cands.iter().enumerate() {
                        r.seq(&format!("{at}.candidates[{j}]"), c, f.z, None, "candidate length");
                    }
                }
                if let Some(m) = &p.score_matrix {
                    r.score_rows(&at, &m.verb, f.z, "verb");
                    r.score_rows(&at, &m.noun, f.z, "noun");
                }
                if !keys.insert((p.video_id.clone(), p.clip_index)) {
                    r.push(&at, format!("duplicate clip {}#{}", p.video_id, p.clip_index));
                }
            }
        }
        AnnotationSet::Sta(f) => {
            let ids = r.images(&f.images);
            if f.num_nouns == 0 || f.num_verbs == 0 {
                r.push("num_nouns", "noun and verb counts must be positive");
            }
            for (i, s) in f.instances.iter().enumerate() {
                let at = format!("instances[{i}]");
                sta_common(&mut r, &at, s);
                if !ids.contains(&s.keyframe_id) {
                    r.push(&at, format!("unknown keyframe_id {}", s.keyframe_id));
                }
                if s.noun >= f.num_nouns || s.verb >= f.num_verbs {
                    r.push(&at, "noun or verb out of range");
                }
            }
        }
        AnnotationSet::StaPred(f) => {
            for (i, s) in f.predictions.iter().enumerate() {
                let at = format!("predictions[{i}]");
                sta_common(&mut r, &at, s);
                if s.score.is_none() {
                    r.push(&at, "missing score");
                }
            }
        }
        AnnotationSet::Scod(f) => {
            let ids = r.images(&f.images);
            for (i, s) in f.instances.iter().enumerate() {
                let at = format!("instances[{i}]");
                r.bbox(&at, &s.bbox);
                if !ids.contains(&s.keyframe_id) {
                    r.push(&at, format!("unknown keyframe_id {}", s.keyframe_id));
                }
                if s.noun >= f.num_classes {
                    r.push(&at, format!("class {} out of range", s.noun));
                }
            }
        }
        AnnotationSet::ScodPred(f) => {
            for (i, s) in f.predictions.iter().enumerate() {
                let at = format!("predictions[{i}]");
                r.bbox(&at, &s.bbox);
                match s.score {
                    Some(v) => r.finite(&at, "score", v),
                    None => r.push(&at, "missing score"),
                }
            }
        }
    }
    r.0
}

fn sta_common(r: &mut Report, at: &str, s: &StaRecord) {
    r.bbox(at, &s.bbox);
    if !(s.ttc_s.is_finite() && s.ttc_s > 0.0) {
        r.push(at, "ttc_s must be positive");
    }
    if let Some(v) = s.score {
        r.finite(at, "score", v);
    }
}
