//! Published challenge results, stored verbatim as read-only tables.
//! `None` marks cells that were not reported.

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MetricColumn {
    pub metric: &'static str,
    pub split: &'static str,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FixtureRow {
    /// One entry per key column.
    pub keys: &'static [&'static str],
    /// One entry per metric column.
    pub values: &'static [Option<&'static str>],
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Fixture {
    pub name: &'static str,
    pub caption: &'static str,
    pub key_columns: &'static [&'static str],
    pub columns: &'static [MetricColumn],
    pub rows: &'static [FixtureRow],
}

/// One cell in long form.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FixtureRecord<'a> {
    pub method: &'a [&'static str],
    pub metric: &'static str,
    pub split: &'static str,
    pub value: Option<&'static str>,
}

impl Fixture {
    pub fn records(&self) -> impl Iterator<Item = FixtureRecord<'_>> {
        self.rows.iter().flat_map(move |r| {
            self.columns.iter().zip(r.values).map(move |(c, v)| FixtureRecord {
                method: r.keys,
                metric: c.metric,
                split: c.split,
                value: *v,
            })
        })
    }

    /// Look up a cell by its key columns, metric and split.
    pub fn value(&self, keys: &[&str], metric: &str, split: &str) -> Option<&'static str> {
        let col = self.columns.iter().position(|c| c.metric == metric && c.split == split)?;
        self.rows.iter().find(|r| r.keys == keys).and_then(|r| r.values[col])
    }
}

const VAL: &str = "validation";
const TEST: &str = "test";

macro_rules! cols {
    ($($split:expr => [$($m:expr),*]);* $(;)?) => {
        &[$($(MetricColumn { metric: $m, split: $split }),*),*]
    };
}

macro_rules! v {
    (-) => {
        None
    };
    ($x:literal) => {
        Some($x)
    };
}

macro_rules! row {
    ([$($k:expr),*] $($x:tt)*) => {
        FixtureRow { keys: &[$($k),*], values: &[$(v!($x)),*] }
    };
}

pub const HANDS_RESULTS: Fixture = Fixture {
    name: "hands-results",
    caption: "Future hand prediction; settings are (frame size, frames, temporal views). Lower is better.",
    key_columns: &["Method"],
    columns: cols![
        VAL => ["Left M.Disp", "Left C.Disp", "Right M.Disp", "Right C.Disp"];
        TEST => ["Left M.Disp", "Left C.Disp", "Right M.Disp", "Right C.Disp"];
    ],
    rows: &[
        row!(["I3D (224,16,30)"] "54.11" "57.29" "54.73" "57.94" "52.98" "56.37" "53.68" "56.17"),
        row!(["VideoMAE-L (224,16,1)"] "66.45" "68.23" "67.32" "68.92" - - - -),
        row!(["UniFormer-B (320,4,1)"] "46.65" "54.58" "48.30" "55.10" "45.76" "54.95" "47.93" "55.11"),
        row!(["UniFormer-B (320,4,30)"] "44.90" "54.16" "46.70" "54.66" "44.69" "53.47" "47.00" "53.49"),
        row!(["UniFormer-B (320,8,30)"] "43.25" "52.78" "45.29" "52.65" "43.85" "53.33" "46.25" "53.37"),
    ],
};

pub const LONGTERM_RESULTS: Fixture = Fixture {
    name: "longterm-results",
    caption: "Long-term action anticipation, ED@(Z=20). MC is multi-clips voting, OW the observable window in seconds. Lower is better.",
    key_columns: &["Backbone", "End-to-End", "MC", "OW", "Decoder"],
    columns: cols![
        VAL => ["Verb", "Noun", "Action"];
        TEST => ["Verb", "Noun", "Action"];
    ],
    rows: &[
        row!(["MViT", "-", "-", "16", "MultiHead"] "0.707" "0.901" "0.972" "0.697" "0.904" "0.969"),
        row!(["SlowFast", "-", "-", "32", "MultiHead"] "0.745" "0.779" "0.941" "0.739" "0.780" "0.943"),
        row!(["VideoMAE-L", "yes", "-", "2", "MultiHead"] "0.708" "0.710" "0.923" "0.737" "0.723" "0.931"),
        row!(["VideoMAE-L", "yes", "yes", "2", "MultiHead"] "0.674" "0.695" "0.902" - - -),
        row!(["VideoMAE-L", "yes", "yes", "4", "MultiHead"] "0.638" "0.658" "0.888" - - -),
        row!(["VideoMAE-L", "yes", "yes", "8", "MultiHead"] "0.595" "0.622" "0.863" - - -),
        row!(["VideoMAE-L", "yes", "yes", "16", "MultiHead"] "0.561" "0.594" "0.840" "0.650" "0.639" "0.878"),
    ],
};

pub const MQ_ONE_STAGE: Fixture = Fixture {
    name: "mq-one-stage",
    caption: "Moment queries with one-stage fine-tuned features (K700 -> MQ), VSGN. Recall is Recall@1 at tIoU=0.5; mAP averages tIoU 0.1 to 0.5.",
    key_columns: &["Feature"],
    columns: cols![
        VAL => ["Recall", "mAP"];
        TEST => ["Recall", "mAP"];
    ],
    rows: &[
        row!(["ir-CSN-152"] "28.96" "10.63" "28.53" "10.68"),
        row!(["VideoMAE-L"] "29.93" "11.95" "27.71" "11.44"),
        row!(["VideoMAE-L (MVF)"] "35.19" "15.11" "33.50" "14.26"),
    ],
};

pub const MQ_TWO_STAGE: Fixture = Fixture {
    name: "mq-two-stage",
    caption:
        "Moment queries with VideoMAE-L features, with or without the second fine-tuning stage. AF is ActionFormer.",
    key_columns: &["Feature", "Method"],
    columns: cols![
        VAL => ["Recall", "mAP"];
        TEST => ["Recall", "mAP"];
    ],
    rows: &[
        row!(["K700 -> Verb -> MQ", "VSGN"] "37.82" "19.35" "36.38" "18.04"),
        row!(["K700 -> Verb", "AF"] "37.24" "20.69" "35.58" "19.31"),
        row!(["K700 -> Verb -> MQ", "AF"] "40.36" "23.29" "41.13" "23.59"),
    ],
};

pub const NLQ_PERFORMANCE: Fixture = Fixture {
    name: "nlq-performance",
    caption: "Natural language queries. EgoVLP-TE is the EgoVLP text encoder.",
    key_columns: &["#", "Method"],
    columns: cols![
        VAL => ["R5@0.3", "R5@0.5", "R1@0.3", "R1@0.5"];
        TEST => ["R5@0.3", "R5@0.5", "R1@0.3", "R1@0.5"];
    ],
    rows: &[
        row!(["A", "EgoVLP"] "18.84" "13.45" "10.84" "6.81" "16.76" "11.29" "10.46" "6.24"),
        row!(["B", "VideoMAE-Verb + EgoVLP-TE"] "21.73" "15.07" "12.32" "7.43" "20.32" "13.29" "13.03" "7.87"),
        row!(["C", "VideoMAE-Noun + EgoVLP-TE"] "21.89" "15.64" "12.78" "8.08" - - - -),
        row!(["D", "(B+C) Pre-fusion"] "23.36" "17.37" "13.71" "9.06" "21.25" "14.64" "14.59" "9.07"),
        row!(["E", "(D+A) Pre-fusion"] "24.21" "17.89" "14.40" "9.60" "21.98" "15.28" "15.56" "9.99"),
        row!(["F", "(D+E) Post-fusion"] "24.78" "18.30" "15.64" "10.17" "22.95" "16.10" "16.45" "10.06"),
    ],
};

pub const SHORT_TERM: Fixture = Fixture {
    name: "short-term",
    caption: "Short-term object interaction anticipation, top-5 mAP.",
    key_columns: &["#", "Method"],
    columns: cols![
        VAL => ["Noun", "Noun+Verb", "Noun+TTC", "Overall"];
        TEST => ["Noun", "Noun+Verb", "Noun+TTC", "Overall"];
    ],
    rows: &[
        row!(["A", "Baseline"] "17.55" "5.16" "5.19" "1.98" "20.45" "6.63" "5.93" "2.20"),
        row!(["B", "VideoMAE-L"] "17.55" "5.37" "5.21" "2.06" "20.45" "7.84" "5.74" "2.38"),
        row!(["C", "VideoMAE-L + Box-embed"] "17.55" "6.30" "5.83" "2.43" "20.45" "7.64" "6.85" "2.88"),
        row!(["D", "C+new top3box"] "18.73" "8.5" "7.55" "3.87" "20.46" "7.39" "7.18" "3.00"),
        row!(["E", "C+new box+fusion"] "20.02" "7.34" "6.37" "2.74" "24.53" "9.09" "7.59" "3.36"),
        row!(["F", "C+new top10box+fusion"] "19.45" "8.00" "6.97" "3.25" "24.60" "9.18" "7.64" "3.40"),
    ],
};

pub const SCOD_PERFORMANCE: Fixture = Fixture {
    name: "scod-performance",
    caption: "State change object detection on the point-of-no-return frame.",
    key_columns: &["Method", "Detector", "Pre-training Dataset"],
    columns: cols![
        VAL => ["AP", "AP50", "AP75"];
        TEST => ["AP", "AP50", "AP75"];
    ],
    rows: &[
        row!(["ResNet-101", "Faster R-CNN", "ImageNet-1K"] "13.40" "25.60" "12.50" "13.35" "25.52" "12.38"),
        row!(["ResNet-50", "DETR", "ImageNet-1K"] "15.50" "32.80" "13.00" "15.38" "32.51" "12.87"),
        row!(["DLA-34", "CenterNet", "ImageNet-1K"] "6.40" "11.70" "6.10" "6.32" "11.62" "6.08"),
        row!(["UniFormer-L", "DINO", "ImageNet-1K"] "24.80" "44.20" "24.00" - - -),
        row!(["Swin-L", "DINO", "ImageNet-22K"] "28.00" "48.70" "27.20" - - -),
        row!(["Swin-L", "DINO", "ImageNet-22K + COCO"] "32.20" "51.30" "33.10" - - -),
        row!(["Swin-L", "DINO", "ImageNet-22K + Objects365"] "36.40" "56.50" "37.60" "37.19" "55.97" "38.44"),
    ],
};

pub const ALL: [&Fixture; 7] =
    [&HANDS_RESULTS, &LONGTERM_RESULTS, &MQ_ONE_STAGE, &MQ_TWO_STAGE, &NLQ_PERFORMANCE, &SHORT_TERM, &SCOD_PERFORMANCE];

pub fn fixture(name: &str) -> Option<&'static Fixture> {
    let name = match name {
        "mq-two-stage-finetune-performance" => "mq-two-stage",
        "mq-one-stage-finetune-performance" => "mq-one-stage",
        other => other,
    };
    ALL.iter().copied().find(|f| f.name == name)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn shapes_consistent() {
        for f in ALL {
            for r in f.rows {
                assert_eq!(r.keys.len(), f.key_columns.len(), "{}", f.name);
                assert_eq!(r.values.len(), f.columns.len(), "{}", f.name);
                for v in r.values.iter().flatten() {
                    assert!(v.parse::<f64>().unwrap().is_finite());
                }
            }
        }
    }

    #[test]
    fn lookup() {
        let f = fixture("mq-two-stage-finetune-performance").unwrap();
        assert_eq!(f.value(&["K700 -> Verb -> MQ", "AF"], "mAP", "validation"), Some("23.29"));
        assert_eq!(LONGTERM_RESULTS.value(&["VideoMAE-L", "yes", "yes", "4", "MultiHead"], "Verb", "test"), None);
    }
}
