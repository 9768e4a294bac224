//! Domain types shared by every track.
//!
//! Every constructor checks the type's invariants, so a value that exists is
//! a valid value. Fields are private and exposed through accessors.

use std::fmt;

use crate::error::{Error, Result};

fn finite(what: &'static str, name: &str, v: f64) -> Result<f64> {
    if v.is_finite() {
        Ok(v)
    } else {
        Err(Error::invalid(what, format!("{name} is not finite ({v})")))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct VideoMeta {
    video_id: String,
    num_frames: u64,
    fps: f64,
}

impl VideoMeta {
    pub fn new(video_id: impl Into<String>, num_frames: u64, fps: f64) -> Result<Self> {
        let video_id = video_id.into();
        if video_id.is_empty() {
            return Err(Error::invalid("video", "empty video_id"));
        }
        if !(fps.is_finite() && fps > 0.0) {
            return Err(Error::invalid("video", format!("fps must be positive, got {fps}")));
        }
        Ok(Self { video_id, num_frames, fps })
    }

    pub fn video_id(&self) -> &str {
        &self.video_id
    }

    pub fn num_frames(&self) -> u64 {
        self.num_frames
    }

    pub fn fps(&self) -> f64 {
        self.fps
    }

    pub fn duration_s(&self) -> f64 {
        self.num_frames as f64 / self.fps
    }
}

/// A closed time interval `[start_s, end_s]` in seconds.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TemporalSegment {
    start_s: f64,
    end_s: f64,
}

impl TemporalSegment {
    pub fn new(start_s: f64, end_s: f64) -> Result<Self> {
        finite("segment", "start_s", start_s)?;
        finite("segment", "end_s", end_s)?;
        if start_s < 0.0 {
            return Err(Error::invalid("segment", format!("negative start {start_s}")));
        }
        if start_s > end_s {
            return Err(Error::invalid("segment", format!("segment reversed ({start_s} > {end_s})")));
        }
        Ok(Self { start_s, end_s })
    }

    pub fn start_s(&self) -> f64 {
        self.start_s
    }

    pub fn end_s(&self) -> f64 {
        self.end_s
    }

    pub fn length(&self) -> f64 {
        self.end_s - self.start_s
    }

    pub fn contains(&self, other: &TemporalSegment) -> bool {
        self.start_s <= other.start_s && other.end_s <= self.end_s
    }
}

/// What a temporal prediction is for: an MQ class or an NLQ query.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Label {
    Class(u32),
    Query(String),
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Label::Class(c) => write!(f, "class {c}"),
            Label::Query(q) => write!(f, "query {q}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MomentInstance {
    video_id: String,
    segment: TemporalSegment,
    class_id: u32,
}

impl MomentInstance {
    pub fn new(video_id: impl Into<String>, segment: TemporalSegment, class_id: u32) -> Self {
        Self { video_id: video_id.into(), segment, class_id }
    }

    pub fn video_id(&self) -> &str {
        &self.video_id
    }

    pub fn segment(&self) -> TemporalSegment {
        self.segment
    }

    pub fn class_id(&self) -> u32 {
        self.class_id
    }

    pub fn labeled(&self) -> LabeledSegment {
        LabeledSegment::new(self.video_id.clone(), Label::Class(self.class_id), self.segment)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct NlqInstance {
    video_id: String,
    segment: TemporalSegment,
    query_id: String,
}

impl NlqInstance {
    pub fn new(video_id: impl Into<String>, segment: TemporalSegment, query_id: impl Into<String>) -> Result<Self> {
        let query_id = query_id.into();
        if query_id.is_empty() {
            return Err(Error::invalid("nlq instance", "empty query_id"));
        }
        Ok(Self { video_id: video_id.into(), segment, query_id })
    }

    pub fn video_id(&self) -> &str {
        &self.video_id
    }

    pub fn segment(&self) -> TemporalSegment {
        self.segment
    }

    pub fn query_id(&self) -> &str {
        &self.query_id
    }

    pub fn labeled(&self) -> LabeledSegment {
        LabeledSegment::new(self.video_id.clone(), Label::Query(self.query_id.clone()), self.segment)
    }
}

/// Ground-truth segment as the temporal evaluators see it.
#[derive(Debug, Clone, PartialEq)]
pub struct LabeledSegment {
    pub video_id: String,
    pub label: Label,
    pub segment: TemporalSegment,
}

impl LabeledSegment {
    pub fn new(video_id: impl Into<String>, label: Label, segment: TemporalSegment) -> Self {
        Self { video_id: video_id.into(), label, segment }
    }
}

/// A scored temporal prediction.
#[derive(Debug, Clone, PartialEq)]
pub struct RankedSegment {
    video_id: String,
    label: Label,
    segment: TemporalSegment,
    score: f64,
}

impl RankedSegment {
    pub fn new(video_id: impl Into<String>, label: Label, segment: TemporalSegment, score: f64) -> Result<Self> {
        finite("ranked segment", "score", score)?;
        Ok(Self { video_id: video_id.into(), label, segment, score })
    }

    pub fn video_id(&self) -> &str {
        &self.video_id
    }

    pub fn label(&self) -> &Label {
        &self.label
    }

    pub fn segment(&self) -> TemporalSegment {
        self.segment
    }

    pub fn score(&self) -> f64 {
        self.score
    }

    pub fn with_score(&self, score: f64) -> Result<Self> {
        Self::new(self.video_id.clone(), self.label.clone(), self.segment, score)
    }
}

/// Verb and noun vocabulary sizes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ActionVocab {
    pub num_verbs: u32,
    pub num_nouns: u32,
}

impl ActionVocab {
    pub fn new(num_verbs: u32, num_nouns: u32) -> Result<Self> {
        if num_verbs == 0 || num_nouns == 0 {
            return Err(Error::invalid("vocabulary", "verb and noun counts must be positive"));
        }
        Ok(Self { num_verbs, num_nouns })
    }

    /// Number of joint (verb, noun) classes.
    pub fn num_actions(&self) -> usize {
        self.num_verbs as usize * self.num_nouns as usize
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ActionLabel {
    verb: u32,
    noun: u32,
}

impl ActionLabel {
    pub fn new(verb: u32, noun: u32, vocab: ActionVocab) -> Result<Self> {
        if verb >= vocab.num_verbs {
            return Err(Error::invalid("action", format!("verb {verb} outside [0, {})", vocab.num_verbs)));
        }
        if noun >= vocab.num_nouns {
            return Err(Error::invalid("action", format!("noun {noun} outside [0, {})", vocab.num_nouns)));
        }
        Ok(Self { verb, noun })
    }

    pub fn verb(&self) -> u32 {
        self.verb
    }

    pub fn noun(&self) -> u32 {
        self.noun
    }

    /// Row-major index into a joint `C_v x C_n` class space.
    pub fn joint_index(&self, vocab: ActionVocab) -> usize {
        self.verb as usize * vocab.num_nouns as usize + self.noun as usize
    }

    pub fn from_joint_index(index: usize, vocab: ActionVocab) -> Result<Self> {
        if index >= vocab.num_actions() {
            return Err(Error::invalid("action", format!("joint index {index} out of range")));
        }
        let n = vocab.num_nouns as usize;
        Ok(Self { verb: (index / n) as u32, noun: (index % n) as u32 })
    }
}

/// Identifies one anticipation instance: the clip index inside a video.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ClipKey {
    pub video_id: String,
    pub clip_index: u32,
}

impl ClipKey {
    pub fn new(video_id: impl Into<String>, clip_index: u32) -> Self {
        Self { video_id: video_id.into(), clip_index }
    }
}

impl fmt::Display for ClipKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}#{}", self.video_id, self.clip_index)
    }
}

const ROW_SUM_TOL: f64 = 1e-6;

fn check_prob_row(row: &[f64], width: usize, which: &str, pos: usize) -> Result<()> {
    if row.len() != width {
        return Err(Error::shape(format!("{which} row {pos} has {} entries, expected {width}", row.len())));
    }
    if row.iter().any(|p| !p.is_finite() || *p < 0.0) {
        return Err(Error::invalid("score matrix", format!("{which} row {pos} has a negative or non-finite entry")));
    }
    let sum: f64 = row.iter().sum();
    if (sum - 1.0).abs() > ROW_SUM_TOL {
        return Err(Error::invalid("score matrix", format!("{which} row {pos} sums to {sum}")));
    }
    Ok(())
}

/// Per-position verb and noun probability rows for a Z-step forecast.
#[derive(Debug, Clone, PartialEq)]
pub struct ScoreMatrix {
    verb: Vec<Vec<f64>>,
    noun: Vec<Vec<f64>>,
}

impl ScoreMatrix {
    pub fn new(verb: Vec<Vec<f64>>, noun: Vec<Vec<f64>>, vocab: ActionVocab) -> Result<Self> {
        if verb.len() != noun.len() {
            return Err(Error::shape(format!("{} verb rows vs {} noun rows", verb.len(), noun.len())));
        }
        if verb.is_empty() {
            return Err(Error::shape("score matrix has no positions"));
        }
        for (pos, (v, n)) in verb.iter().zip(&noun).enumerate() {
            check_prob_row(v, vocab.num_verbs as usize, "verb", pos)?;
            check_prob_row(n, vocab.num_nouns as usize, "noun", pos)?;
        }
        Ok(Self { verb, noun })
    }

    pub fn horizon(&self) -> usize {
        self.verb.len()
    }

    pub fn vocab(&self) -> ActionVocab {
        ActionVocab { num_verbs: self.verb[0].len() as u32, num_nouns: self.noun[0].len() as u32 }
    }

    pub fn verb_rows(&self) -> &[Vec<f64>] {
        &self.verb
    }

    pub fn noun_rows(&self) -> &[Vec<f64>] {
        &self.noun
    }
}

/// K candidate future sequences for one clip, plus optional per-position scores.
#[derive(Debug, Clone, PartialEq)]
pub struct LtaForecast {
    key: ClipKey,
    candidates: Vec<Vec<ActionLabel>>,
    score_matrix: Option<ScoreMatrix>,
}

impl LtaForecast {
    pub fn new(
        key: ClipKey,
        candidates: Vec<Vec<ActionLabel>>,
        score_matrix: Option<ScoreMatrix>,
        horizon: usize,
    ) -> Result<Self> {
        if candidates.is_empty() {
            return Err(Error::invalid("forecast", format!("{key}: no candidate sequences")));
        }
        for (i, c) in candidates.iter().enumerate() {
            if c.len() != horizon {
                return Err(Error::invalid(
                    "forecast",
                    format!("{key}: candidate length {} at candidate {i}, expected {horizon}", c.len()),
                ));
            }
        }
        if let Some(m) = &score_matrix {
            if m.horizon() != horizon {
                return Err(Error::invalid(
                    "forecast",
                    format!("{key}: score matrix has {} positions, expected {horizon}", m.horizon()),
                ));
            }
        }
        Ok(Self { key, candidates, score_matrix })
    }

    pub fn key(&self) -> &ClipKey {
        &self.key
    }

    pub fn candidates(&self) -> &[Vec<ActionLabel>] {
        &self.candidates
    }

    pub fn score_matrix(&self) -> Option<&ScoreMatrix> {
        self.score_matrix.as_ref()
    }
}

/// The five future keyframes at which hand positions are forecast.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Keyframe {
    /// Contact frame.
    C,
    /// Pre-condition frame.
    P,
    /// 0.5 s before the pre-condition frame.
    P1,
    /// 1.0 s before.
    P2,
    /// 1.5 s before.
    P3,
}

impl Keyframe {
    pub const ALL: [Keyframe; 5] = [Keyframe::C, Keyframe::P, Keyframe::P1, Keyframe::P2, Keyframe::P3];

    pub fn tag(self) -> &'static str {
        match self {
            Keyframe::C => "c",
            Keyframe::P => "p",
            Keyframe::P1 => "p1",
            Keyframe::P2 => "p2",
            Keyframe::P3 => "p3",
        }
    }

    pub fn from_tag(tag: &str) -> Option<Self> {
        Keyframe::ALL.into_iter().find(|k| k.tag() == tag)
    }

    pub fn index(self) -> usize {
        self as usize
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    pub fn distance(&self, other: &Point) -> f64 {
        (self.x - other.x).hypot(self.y - other.y)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct HandPair {
    pub left: Point,
    pub right: Point,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Visibility {
    pub left: bool,
    pub right: bool,
}

impl Default for Visibility {
    fn default() -> Self {
        Self { left: true, right: true }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Hand {
    Left,
    Right,
}

/// Left/right hand positions (pixels) at each of the five future keyframes.
#[derive(Debug, Clone, PartialEq)]
pub struct HandKeyframes {
    frames: [HandPair; 5],
    visibility: Option<[Visibility; 5]>,
}

impl HandKeyframes {
    /// `frames` is indexed by [`Keyframe::index`].
    pub fn new(frames: [HandPair; 5], visibility: Option<[Visibility; 5]>) -> Result<Self> {
        for (k, f) in Keyframe::ALL.iter().zip(&frames) {
            for v in [f.left.x, f.left.y, f.right.x, f.right.y] {
                if !v.is_finite() {
                    return Err(Error::invalid(
                        "hand keyframes",
                        format!("non-finite coordinate at keyframe {}", k.tag()),
                    ));
                }
            }
        }
        Ok(Self { frames, visibility })
    }

    /// Inverse of [`HandKeyframes::to_vector`]: 20 values, keyframe-major, `[lx, ly, rx, ry]`.
    pub fn from_vector(v: &[f64]) -> Result<Self> {
        if v.len() != 20 {
            return Err(Error::shape(format!("hand vector has {} values, expected 20", v.len())));
        }
        let mut frames = [HandPair::default(); 5];
        for (i, f) in frames.iter_mut().enumerate() {
            let c = &v[i * 4..i * 4 + 4];
            f.left = Point::new(c[0], c[1]);
            f.right = Point::new(c[2], c[3]);
        }
        Self::new(frames, None)
    }

    pub fn to_vector(&self) -> Vec<f64> {
        self.frames.iter().flat_map(|f| [f.left.x, f.left.y, f.right.x, f.right.y]).collect()
    }

    pub fn at(&self, k: Keyframe) -> &HandPair {
        &self.frames[k.index()]
    }

    pub fn frames(&self) -> &[HandPair; 5] {
        &self.frames
    }

    pub fn visibility(&self) -> Option<&[Visibility; 5]> {
        self.visibility.as_ref()
    }

    pub fn point(&self, k: Keyframe, hand: Hand) -> Point {
        let f = self.at(k);
        match hand {
            Hand::Left => f.left,
            Hand::Right => f.right,
        }
    }

    /// Hands without explicit flags count as visible.
    pub fn is_visible(&self, k: Keyframe, hand: Hand) -> bool {
        match &self.visibility {
            None => true,
            Some(v) => match hand {
                Hand::Left => v[k.index()].left,
                Hand::Right => v[k.index()].right,
            },
        }
    }
}

/// Axis-aligned box in pixels.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundingBox {
    x1: f64,
    y1: f64,
    x2: f64,
    y2: f64,
}

impl BoundingBox {
    pub fn new(x1: f64, y1: f64, x2: f64, y2: f64) -> Result<Self> {
        for (name, v) in [("x1", x1), ("y1", y1), ("x2", x2), ("y2", y2)] {
            finite("box", name, v)?;
        }
        if x1 > x2 || y1 > y2 {
            return Err(Error::invalid("box", format!("corners reversed ({x1}, {y1}, {x2}, {y2})")));
        }
        Ok(Self { x1, y1, x2, y2 })
    }

    pub fn coords(&self) -> [f64; 4] {
        [self.x1, self.y1, self.x2, self.y2]
    }

    pub fn width(&self) -> f64 {
        self.x2 - self.x1
    }

    pub fn height(&self) -> f64 {
        self.y2 - self.y1
    }

    pub fn area(&self) -> f64 {
        self.width() * self.height()
    }

    /// Intersection over union. Zero-area boxes overlap nothing.
    pub fn iou(&self, other: &BoundingBox) -> f64 {
        let a = self.area();
        let b = other.area();
        if a <= 0.0 || b <= 0.0 {
            return 0.0;
        }
        let iw = (self.x2.min(other.x2) - self.x1.max(other.x1)).max(0.0);
        let ih = (self.y2.min(other.y2) - self.y1.max(other.y1)).max(0.0);
        let inter = iw * ih;
        if inter <= 0.0 {
            return 0.0;
        }
        if self == other {
            return 1.0;
        }
        (inter / (a + b - inter)).min(1.0)
    }
}

/// A short-term anticipation box: noun, verb, time to contact and score.
///
/// Ground-truth instances carry a score of 1.
#[derive(Debug, Clone, PartialEq)]
pub struct StaInstance {
    bbox: BoundingBox,
    noun: u32,
    verb: u32,
    ttc_s: f64,
    score: f64,
}

impl StaInstance {
    pub fn new(bbox: BoundingBox, noun: u32, verb: u32, ttc_s: f64, score: f64) -> Result<Self> {
        if !(ttc_s.is_finite() && ttc_s > 0.0) {
            return Err(Error::invalid("sta instance", format!("ttc_s must be positive, got {ttc_s}")));
        }
        finite("sta instance", "score", score)?;
        Ok(Self { bbox, noun, verb, ttc_s, score })
    }

    pub fn bbox(&self) -> &BoundingBox {
        &self.bbox
    }

    pub fn noun(&self) -> u32 {
        self.noun
    }

    pub fn verb(&self) -> u32 {
        self.verb
    }

    pub fn ttc_s(&self) -> f64 {
        self.ttc_s
    }

    pub fn score(&self) -> f64 {
        self.score
    }
}

/// A detection (or, with score 1, a ground-truth object) for box AP.
#[derive(Debug, Clone, PartialEq)]
pub struct ScoredBox {
    bbox: BoundingBox,
    class_id: u32,
    score: f64,
}

impl ScoredBox {
    pub fn new(bbox: BoundingBox, class_id: u32, score: f64) -> Result<Self> {
        finite("detection", "score", score)?;
        Ok(Self { bbox, class_id, score })
    }

    pub fn bbox(&self) -> &BoundingBox {
        &self.bbox
    }

    pub fn class_id(&self) -> u32 {
        self.class_id
    }

    pub fn score(&self) -> f64 {
        self.score
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum FeatureKind {
    Verb,
    Noun,
    Fused,
    Stub,
}

impl FeatureKind {
    pub fn code(self) -> u8 {
        match self {
            FeatureKind::Verb => 0,
            FeatureKind::Noun => 1,
            FeatureKind::Fused => 2,
            FeatureKind::Stub => 3,
        }
    }

    pub fn from_code(code: u8) -> Option<Self> {
        Some(match code {
            0 => FeatureKind::Verb,
            1 => FeatureKind::Noun,
            2 => FeatureKind::Fused,
            3 => FeatureKind::Stub,
            _ => return None,
        })
    }
}

/// Per-snippet feature rows, stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureMatrix {
    dim: usize,
    data: Vec<f32>,
    kind: FeatureKind,
}

impl FeatureMatrix {
    pub fn from_rows(dim: usize, rows: Vec<Vec<f32>>, kind: FeatureKind) -> Result<Self> {
        let mut data = Vec::with_capacity(dim * rows.len());
        for (i, r) in rows.into_iter().enumerate() {
            if r.len() != dim {
                return Err(Error::shape(format!("row {i} has length {}, expected {dim}", r.len())));
            }
            data.extend(r);
        }
        Self::from_flat(dim, data, kind)
    }

    pub fn from_flat(dim: usize, data: Vec<f32>, kind: FeatureKind) -> Result<Self> {
        if dim == 0 {
            return Err(Error::invalid("feature matrix", "dim must be positive"));
        }
        if !data.len().is_multiple_of(dim) {
            return Err(Error::shape(format!("{} values do not divide into rows of {dim}", data.len())));
        }
        if let Some(i) = data.iter().position(|v| !v.is_finite()) {
            return Err(Error::invalid(
                "feature matrix",
                format!("non-finite value at row {} col {}", i / dim, i % dim),
            ));
        }
        Ok(Self { dim, data, kind })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn num_rows(&self) -> usize {
        self.data.len() / self.dim
    }

    pub fn kind(&self) -> FeatureKind {
        self.kind
    }

    pub fn row(&self, i: usize) -> &[f32] {
        &self.data[i * self.dim..(i + 1) * self.dim]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[f32]> {
        self.data.chunks_exact(self.dim)
    }

    pub fn as_flat(&self) -> &[f32] {
        &self.data
    }
}
