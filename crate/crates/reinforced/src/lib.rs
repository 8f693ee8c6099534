//! Classifier training with a validation-feedback reinforcement signal.
//!
//! The crate bundles a small 64-bit feed-forward network engine ([`nn`]),
//! synthetic dataset generators with stratified splitting ([`data`]), the
//! classifier-as-policy machinery (mirror policy, tilting, epsilon-greedy
//! action sampling; [`policy`]), a value function over augmented states
//! ([`value`]), the reinforced and supervised training loops ([`trainer`]),
//! and a command-line experiment harness ([`harness`]).

pub mod data;
pub mod harness;
pub mod nn;
pub mod policy;
pub mod rng;
pub mod trainer;
pub mod value;
