//! Snippet schedules, observable windows, frame sampling and sliding clips.

use rand::seq::index;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::model::{FeatureKind, FeatureMatrix, TemporalSegment, VideoMeta};

/// Slack for comparisons between accumulated times in seconds.
const TIME_EPS: f64 = 1e-9;

/// Fixed-length snippets laid over a video at a fixed stride.
#[derive(Debug, Clone, PartialEq)]
pub struct SnippetSchedule {
    pub fps: f64,
    pub snippet_len_frames: u32,
    pub stride_frames: u32,
    /// `(start_frame, end_frame_exclusive)`; the end of a padded tail is the
    /// video's last frame + 1, not `start + snippet_len`.
    pub snippets: Vec<(u64, u64)>,
    pub padded_tail: bool,
}

impl SnippetSchedule {
    pub fn len(&self) -> usize {
        self.snippets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.snippets.is_empty()
    }

    /// The `snippet_len_frames` frame indices read for snippet `i`, repeating
    /// the last available frame when the snippet runs past the video end.
    pub fn frame_indices(&self, i: usize) -> Vec<u64> {
        let (start, end) = self.snippets[i];
        let last = end.saturating_sub(1).max(start);
        (0..u64::from(self.snippet_len_frames)).map(|o| (start + o).min(last)).collect()
    }

    pub fn time_span(&self, i: usize) -> (f64, f64) {
        let (s, e) = self.snippets[i];
        (s as f64 / self.fps, e as f64 / self.fps)
    }
}

/// Lay snippets of `snippet_len` frames every `stride` frames over a video
/// whose `num_frames` are already counted at `fps`.
///
/// A tail not covered by full snippets gets one extra snippet padded with
/// the last frame, so any non-empty video yields at least one snippet.
pub fn build_snippet_schedule(meta: &VideoMeta, fps: f64, snippet_len: u32, stride: u32) -> Result<SnippetSchedule> {
    if !(fps.is_finite() && fps > 0.0) {
        return Err(Error::param(format!("fps must be positive, got {fps}")));
    }
    if snippet_len == 0 {
        return Err(Error::param("snippet length must be at least 1"));
    }
    if stride == 0 {
        return Err(Error::param("snippet stride must be at least 1"));
    }
    let n = meta.num_frames();
    let s = u64::from(snippet_len);
    let d = u64::from(stride);
    let mut snippets = Vec::new();
    let mut padded_tail = false;
    if n > 0 {
        let mut start = 0u64;
        while start + s <= n {
            snippets.push((start, start + s));
            start += d;
        }
        let covered = snippets.last().map_or(0, |&(_, e)| e);
        // With stride > snippet_len the frames after the last snippet may
        // fall in a stride gap; the tail is only added when it starts inside
        // the video.
        if covered < n && start < n {
            // `start` already sits one stride past the last full snippet.
            snippets.push((start, n));
            padded_tail = true;
        }
    }
    Ok(SnippetSchedule { fps, snippet_len_frames: snippet_len, stride_frames: stride, snippets, padded_tail })
}

/// History available before forecasting a clip: `[max(0, end - alpha), end]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ObservableWindow {
    start_s: f64,
    end_s: f64,
    alpha_s: f64,
}

impl ObservableWindow {
    pub fn new(start_s: f64, end_s: f64, alpha_s: f64) -> Result<Self> {
        if !(alpha_s.is_finite() && alpha_s > 0.0) {
            return Err(Error::param(format!("window size must be positive, got {alpha_s}")));
        }
        if !(start_s.is_finite() && end_s.is_finite()) || start_s < 0.0 || end_s < start_s {
            return Err(Error::invalid("window", format!("bad bounds [{start_s}, {end_s}]")));
        }
        if end_s - start_s > alpha_s + TIME_EPS {
            return Err(Error::invalid("window", format!("[{start_s}, {end_s}] longer than alpha {alpha_s}")));
        }
        Ok(Self { start_s, end_s, alpha_s })
    }

    pub fn start_s(&self) -> f64 {
        self.start_s
    }

    pub fn end_s(&self) -> f64 {
        self.end_s
    }

    pub fn alpha_s(&self) -> f64 {
        self.alpha_s
    }

    pub fn length(&self) -> f64 {
        self.end_s - self.start_s
    }

    pub fn segment(&self) -> TemporalSegment {
        TemporalSegment::new(self.start_s, self.end_s).expect("window bounds are valid")
    }

    /// Frame indices `f` with `f / fps` inside `[start, end)`.
    pub fn frame_range(&self, fps: f64) -> std::ops::Range<u64> {
        let first = (self.start_s * fps).round() as u64;
        let last = (self.end_s * fps).round() as u64;
        first..last.max(first)
    }
}

/// Testing-time spatial/temporal view settings `(S, T, V)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ViewConfig {
    pub frame_size: u32,
    pub num_frames: u32,
    pub num_views: u32,
}

impl ViewConfig {
    pub fn new(frame_size: u32, num_frames: u32, num_views: u32) -> Result<Self> {
        if frame_size == 0 || num_frames == 0 || num_views == 0 {
            return Err(Error::param("view settings must all be positive"));
        }
        Ok(Self { frame_size, num_frames, num_views })
    }
}

/// The window ending at the previous clip's end time, `clip_end_times_s[i - 1]`.
pub fn observable_window(clip_end_times_s: &[f64], i: usize, alpha_s: f64) -> Result<ObservableWindow> {
    if i == 0 {
        return Err(Error::param("no preceding clip for clip index 0"));
    }
    let Some(&end) = clip_end_times_s.get(i - 1) else {
        return Err(Error::param(format!("clip index {i} out of range for {} clip end times", clip_end_times_s.len())));
    };
    if clip_end_times_s.windows(2).any(|w| w[1] < w[0]) {
        return Err(Error::param("clip end times must be nondecreasing"));
    }
    if !(alpha_s.is_finite() && alpha_s > 0.0) {
        return Err(Error::param(format!("window size must be positive, got {alpha_s}")));
    }
    ObservableWindow::new((end - alpha_s).max(0.0), end, alpha_s)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SampleMode {
    /// Seeded sorted sample without replacement.
    Random,
    /// `n` consecutive frames centered in the window.
    Center,
    /// Evenly spaced frames.
    Uniform,
}

impl std::str::FromStr for SampleMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "random" => Ok(SampleMode::Random),
            "center" => Ok(SampleMode::Center),
            "uniform" => Ok(SampleMode::Uniform),
            _ => Err(Error::param(format!("unknown sample mode {s:?}"))),
        }
    }
}

/// Pick `n` sorted frame indices from the window.
pub fn sample_frames(window: &ObservableWindow, n: usize, fps: f64, seed: u64, mode: SampleMode) -> Result<Vec<u64>> {
    if n == 0 {
        return Err(Error::param("must sample at least one frame"));
    }
    if !(fps.is_finite() && fps > 0.0) {
        return Err(Error::param(format!("fps must be positive, got {fps}")));
    }
    let range = window.frame_range(fps);
    let first = range.start;
    let len = (range.end - range.start) as usize;
    if len == 0 {
        return Err(Error::param("window holds no frames"));
    }
    let mut out: Vec<u64> = match mode {
        SampleMode::Random => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            if len >= n {
                index::sample(&mut rng, len, n).into_iter().map(|o| first + o as u64).collect()
            } else {
                (0..n).map(|_| first + rng.random_range(0..len) as u64).collect()
            }
        }
        SampleMode::Center => {
            if len >= n {
                let off = (len - n) / 2;
                (0..n).map(|o| first + (off + o) as u64).collect()
            } else {
                (0..n).map(|o| first + (o * len / n) as u64).collect()
            }
        }
        SampleMode::Uniform => (0..n).map(|o| first + (o * len / n) as u64).collect(),
    };
    out.sort_unstable();
    Ok(out)
}

/// Clips of `clip_len_s` stepping `clip_stride_s` from the window start; a
/// final clip right-aligned to the window end is added when stepping would
/// leave the newest history uncovered.
pub fn sliding_clips(window: &ObservableWindow, clip_len_s: f64, clip_stride_s: f64) -> Result<Vec<TemporalSegment>> {
    if !(clip_len_s.is_finite() && clip_len_s > 0.0) {
        return Err(Error::param(format!("clip length must be positive, got {clip_len_s}")));
    }
    if !(clip_stride_s.is_finite() && clip_stride_s > 0.0) {
        return Err(Error::param(format!("clip stride must be positive, got {clip_stride_s}")));
    }
    let (ws, we) = (window.start_s(), window.end_s());
    if clip_len_s > we - ws + TIME_EPS {
        return Err(Error::param(format!("clip length {clip_len_s} exceeds window length {}", we - ws)));
    }
    let mut clips = Vec::new();
    let mut j = 0u32;
    loop {
        let start = ws + f64::from(j) * clip_stride_s;
        if start + clip_len_s > we + TIME_EPS {
            break;
        }
        let end = (start + clip_len_s).min(we);
        clips.push(TemporalSegment::new(end - clip_len_s, end)?);
        j += 1;
    }
    let last_end = clips.last().map_or(ws, |c| c.end_s());
    if last_end < we - TIME_EPS {
        clips.push(TemporalSegment::new((we - clip_len_s).max(0.0), we)?);
    }
    Ok(clips)
}

/// The clip of `clip_len_s` centered in the window (clamped to it).
pub fn center_clip(window: &ObservableWindow, clip_len_s: f64) -> Result<TemporalSegment> {
    if !(clip_len_s.is_finite() && clip_len_s > 0.0) {
        return Err(Error::param(format!("clip length must be positive, got {clip_len_s}")));
    }
    let len = clip_len_s.min(window.length());
    let mid = 0.5 * (window.start_s() + window.end_s());
    let start = (mid - 0.5 * len).max(window.start_s());
    TemporalSegment::new(start, (start + len).min(window.end_s()))
}

/// Row-wise concatenation of two feature matrices with equal row counts.
pub fn prefuse_features(a: &FeatureMatrix, b: &FeatureMatrix) -> Result<FeatureMatrix> {
    if a.num_rows() != b.num_rows() {
        return Err(Error::shape(format!("cannot pre-fuse {} rows with {} rows", a.num_rows(), b.num_rows())));
    }
    let dim = a.dim() + b.dim();
    let mut data = Vec::with_capacity(dim * a.num_rows());
    for (ra, rb) in a.rows().zip(b.rows()) {
        data.extend_from_slice(ra);
        data.extend_from_slice(rb);
    }
    FeatureMatrix::from_flat(dim, data, FeatureKind::Fused)
}
