//! Embedding-based instance retrieval over description-logic knowledge
//! bases.
//!
//! The pipeline: parse a knowledge base ([`dl`]), extract its triple
//! graph ([`triples`]), train a link predictor on it ([`kge`]), then
//! evaluate concept expressions set-valued against thresholded
//! predictions ([`reasoner`]). A materialization-based structural
//! reasoner ([`oracle`]) provides exact ground truth, and [`harness`]
//! corrupts KBs and scores the agreement between the two.
//!
//! Embedding numerics are generic over the scalar type via
//! `num_traits::Float`; the aliases below fix `f64`, which the CLI and
//! harness use end to end.

pub mod dl;
pub mod fixtures;
pub mod harness;
pub mod kge;
pub mod oracle;
pub mod reasoner;
pub mod triples;

/// The embedding model at the default `f64` precision.
pub type Model = kge::EmbeddingModel<f64>;

/// Dense gradients for the default `f64` precision.
pub type Gradients = kge::Gradients<f64>;

/// Single-precision variant, for callers trading exactness for memory.
pub type ModelF32 = kge::EmbeddingModel<f32>;
