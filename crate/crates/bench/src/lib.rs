//! Shared fixtures for the benchmarks.

use lma_core::synth::{default_styles, generate};
use lma_core::JointSequence;

/// One sequence of the first default style.
pub fn sample_sequence(seconds: f64, seed: u64) -> JointSequence {
    generate(&default_styles()[0], seconds, 60.0, seed).expect("default style is valid")
}
