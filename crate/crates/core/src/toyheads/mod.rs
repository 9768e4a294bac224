//! Desk-scale stand-ins for the neural stack: a synthetic dataset generator,
//! hash-seeded stub features, and linear heads trained with L1 and
//! cross-entropy losses.

pub mod experiment;
pub mod head;
pub mod stub;
pub mod synth;

pub use experiment::{run_voting_experiment, train_lta_head, VotingExperimentConfig, VotingTrend};
pub use head::{
    classifier_scores, cross_entropy, dataset_loss, head_forward, l1_loss, sample_loss, train_head, Factorization,
    HeadKind, LinearHead, Optimizer, Sample, Target, TrainConfig, TrainOutcome,
};
pub use stub::{stub_feature_matrix, stub_features, StubLatent, StubVariant};
pub use synth::{generate_synthetic, LatentState, SynthConfig, SynthDataset};
