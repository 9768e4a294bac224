//! JSON annotation/prediction files and the binary feature file.
//!
//! Every JSON file carries a top-level `"schema": "<track>/<version>"` tag.
//! Parsing is strict about required fields; unknown extra fields are
//! reported as warnings and dropped, so saving a loaded file yields its
//! canonical form.

pub mod features;
pub mod records;
pub mod validate;

use std::fs;
use std::path::Path;

use serde::de::DeserializeOwned;
use serde::Serialize;

use crate::dataset::{
    FhpGroundTruth, FhpPredictions, LtaGroundTruth, MqGroundTruth, NlqGroundTruth, ScodGroundTruth, ScodPredictions,
    SegmentPredictions, StaGroundTruth, StaPredictions,
};
use crate::error::{Error, Result};
use crate::model::LtaForecast;

pub use features::{read_features, write_features};
pub use records::*;
pub use validate::{validate_dataset, AnnotationSet, Violation};

/// A parsed value plus warnings about ignored input.
#[derive(Debug, Clone, PartialEq)]
pub struct Loaded<T> {
    pub value: T,
    pub warnings: Vec<String>,
}

fn schema_tag(v: &serde_json::Value) -> Result<&str> {
    v.get("schema")
        .and_then(serde_json::Value::as_str)
        .ok_or_else(|| Error::Schema("missing top-level \"schema\" tag".into()))
}

/// Deserialize `v` as `T`, collecting paths of fields `T` does not know.
pub fn from_value_lenient<T: DeserializeOwned>(v: serde_json::Value) -> Result<Loaded<T>> {
    let mut warnings = Vec::new();
    let value = serde_ignored::deserialize(v, |path| warnings.push(format!("ignored unknown field {path}")))?;
    Ok(Loaded { value, warnings })
}

fn parse_text(text: &str) -> Result<serde_json::Value> {
    Ok(serde_json::from_str(text)?)
}

/// Parse any tagged annotation or prediction file.
pub fn parse_annotation(text: &str) -> Result<Loaded<AnnotationSet>> {
    let v = parse_text(text)?;
    let tag = schema_tag(&v)?.to_owned();
    macro_rules! arm {
        ($variant:ident) => {{
            let l = from_value_lenient(v)?;
            Loaded { value: AnnotationSet::$variant(l.value), warnings: l.warnings }
        }};
    }
    Ok(match tag.as_str() {
        MQ => arm!(Mq),
        MQ_PRED => arm!(MqPred),
        NLQ => arm!(Nlq),
        NLQ_PRED => arm!(NlqPred),
        FHP => arm!(Fhp),
        FHP_PRED => arm!(FhpPred),
        LTA => arm!(Lta),
        LTA_PRED => arm!(LtaPred),
        STA => arm!(Sta),
        STA_PRED => arm!(StaPred),
        SCOD => arm!(Scod),
        SCOD_PRED => arm!(ScodPred),
        other => return Err(unsupported(other)),
    })
}

fn unsupported(tag: &str) -> Error {
    match tag.split_once('/') {
        Some((track, version)) if ALL_SCHEMAS.iter().any(|s| s.starts_with(&format!("{track}/"))) => {
            Error::Schema(format!("unsupported {track} schema version {version}"))
        }
        _ => Error::Schema(format!("unknown schema {tag:?}")),
    }
}

pub const ALL_SCHEMAS: [&str; 12] =
    [MQ, MQ_PRED, NLQ, NLQ_PRED, FHP, FHP_PRED, LTA, LTA_PRED, STA, STA_PRED, SCOD, SCOD_PRED];

/// Parse, require the expected schema, and reject any invariant violation.
fn parse_expected(text: &str, expected: &str) -> Result<Loaded<AnnotationSet>> {
    let loaded = parse_annotation(text)?;
    let tag = loaded.value.schema();
    if tag != expected {
        return Err(Error::Schema(format!("expected schema {expected}, found {tag}")));
    }
    let violations = validate_dataset(&loaded.value);
    if !violations.is_empty() {
        let list: Vec<String> = violations.iter().map(ToString::to_string).collect();
        return Err(Error::Schema(format!("{} violation(s): {}", list.len(), list.join("; "))));
    }
    Ok(loaded)
}

pub fn read_text(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|source| Error::Io { path: path.to_owned(), source })
}

pub fn write_text(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).map_err(|source| Error::Io { path: path.to_owned(), source })
}

/// Pretty JSON with a trailing newline; the canonical on-disk form.
pub fn to_canonical_json<T: Serialize>(value: &T) -> Result<String> {
    let mut s = serde_json::to_string_pretty(value)?;
    s.push('\n');
    Ok(s)
}

pub fn save_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    write_text(path, &to_canonical_json(value)?)
}

/// Canonical re-serialization of any tagged file's text.
pub fn canonicalize(text: &str) -> Result<String> {
    let set = parse_annotation(text)?.value;
    match &set {
        AnnotationSet::Mq(f) => to_canonical_json(f),
        AnnotationSet::MqPred(f) | AnnotationSet::NlqPred(f) => to_canonical_json(f),
        AnnotationSet::Nlq(f) => to_canonical_json(f),
        AnnotationSet::Fhp(f) => to_canonical_json(f),
        AnnotationSet::FhpPred(f) => to_canonical_json(f),
        AnnotationSet::Lta(f) => to_canonical_json(f),
        AnnotationSet::LtaPred(f) => to_canonical_json(f),
        AnnotationSet::Sta(f) => to_canonical_json(f),
        AnnotationSet::StaPred(f) => to_canonical_json(f),
        AnnotationSet::Scod(f) => to_canonical_json(f),
        AnnotationSet::ScodPred(f) => to_canonical_json(f),
    }
}

macro_rules! unwrap_set {
    ($loaded:expr, $variant:ident) => {{
        let Loaded { value, warnings } = $loaded;
        match value {
            AnnotationSet::$variant(f) => (f, warnings),
            _ => unreachable!("schema checked"),
        }
    }};
}

fn with<T>(warnings: Vec<String>, value: T) -> Loaded<T> {
    Loaded { value, warnings }
}

pub fn parse_mq_gt(text: &str) -> Result<Loaded<MqGroundTruth>> {
    let (f, w) = unwrap_set!(parse_expected(text, MQ)?, Mq);
    Ok(with(w, f.into_dataset()?))
}

pub fn parse_mq_pred(text: &str, gt: &MqGroundTruth) -> Result<Loaded<SegmentPredictions>> {
    let (f, w) = unwrap_set!(parse_expected(text, MQ_PRED)?, MqPred);
    Ok(with(w, f.into_predictions(&gt.videos)?))
}

pub fn parse_nlq_gt(text: &str) -> Result<Loaded<NlqGroundTruth>> {
    let (f, w) = unwrap_set!(parse_expected(text, NLQ)?, Nlq);
    Ok(with(w, f.into_dataset()?))
}

pub fn parse_nlq_pred(text: &str, gt: &NlqGroundTruth) -> Result<Loaded<SegmentPredictions>> {
    let (f, w) = unwrap_set!(parse_expected(text, NLQ_PRED)?, NlqPred);
    Ok(with(w, f.into_predictions(&gt.videos)?))
}

pub fn parse_fhp_gt(text: &str) -> Result<Loaded<FhpGroundTruth>> {
    let (f, w) = unwrap_set!(parse_expected(text, FHP)?, Fhp);
    Ok(with(w, f.into_dataset()?))
}

pub fn parse_fhp_pred(text: &str, gt: &FhpGroundTruth) -> Result<Loaded<FhpPredictions>> {
    let (f, w) = unwrap_set!(parse_expected(text, FHP_PRED)?, FhpPred);
    Ok(with(w, f.into_predictions(gt)?))
}

pub fn parse_lta_gt(text: &str) -> Result<Loaded<LtaGroundTruth>> {
    let (f, w) = unwrap_set!(parse_expected(text, LTA)?, Lta);
    Ok(with(w, f.into_dataset()?))
}

/// `k` bounds how many sequences a score-matrix-only forecast expands into.
pub fn parse_lta_pred(text: &str, gt: &LtaGroundTruth, k: usize) -> Result<Loaded<Vec<LtaForecast>>> {
    let (f, w) = unwrap_set!(parse_expected(text, LTA_PRED)?, LtaPred);
    Ok(with(w, f.into_predictions(gt, k)?))
}

pub fn parse_sta_gt(text: &str) -> Result<Loaded<StaGroundTruth>> {
    let (f, w) = unwrap_set!(parse_expected(text, STA)?, Sta);
    Ok(with(w, f.into_dataset()?))
}

pub fn parse_sta_pred(text: &str, gt: &StaGroundTruth) -> Result<Loaded<StaPredictions>> {
    let (f, w) = unwrap_set!(parse_expected(text, STA_PRED)?, StaPred);
    Ok(with(w, f.into_predictions(gt)?))
}

pub fn parse_scod_gt(text: &str) -> Result<Loaded<ScodGroundTruth>> {
    let (f, w) = unwrap_set!(parse_expected(text, SCOD)?, Scod);
    Ok(with(w, f.into_dataset()?))
}

pub fn parse_scod_pred(text: &str, gt: &ScodGroundTruth) -> Result<Loaded<ScodPredictions>> {
    let (f, w) = unwrap_set!(parse_expected(text, SCOD_PRED)?, ScodPred);
    Ok(with(w, f.into_predictions(gt)?))
}

pub fn parse_lta_clips(text: &str) -> Result<Loaded<LtaClipScoresFile>> {
    let v = parse_text(text)?;
    let tag = schema_tag(&v)?;
    if tag != LTA_CLIPS {
        return Err(Error::Schema(format!("expected schema {LTA_CLIPS}, found {tag}")));
    }
    from_value_lenient(v)
}

/// Parse an untagged JSON config (e.g. synth or training settings).
pub fn parse_config<T: DeserializeOwned>(text: &str) -> Result<Loaded<T>> {
    from_value_lenient(parse_text(text)?)
}
