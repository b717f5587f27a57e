//! Speaker diarization clustering from precomputed segment embeddings and
//! word-level speaker-turn probabilities.
//!
//! The pipeline builds an acoustic affinity graph from pairwise embedding
//! distances, optionally strengthens it with lexical turn structure, picks
//! the turn threshold and the speaker count from the Laplacian eigengap, and
//! clusters segments spectrally. A DER scorer with md-eval semantics and a
//! seeded synthetic conversation generator round out the toolkit.
//!
//! The numeric core ([`matrix`], [`acoustic`], [`fusion`], [`eigen`],
//! [`kmeans`], [`spectral`]) is generic over the scalar type through
//! [`num::Real`]; the file formats and the pipeline run in `f64`.

pub mod acoustic;
pub mod eigen;
pub mod error;
pub mod fusion;
pub mod io;
pub mod kmeans;
pub mod lexical;
pub mod matrix;
pub mod num;
pub mod pipeline;
pub mod scoring;
pub mod spectral;
pub mod synth;
pub mod timeline;

mod assignment;

pub use error::{Error, Result};

/// Affinity matrix at pipeline precision.
pub type Affinity = matrix::AffinityMatrix<f64>;
/// Embedding set at pipeline precision.
pub type Embeddings = acoustic::EmbeddingSet<f64>;
/// Eigengap report at pipeline precision.
pub type Eigengaps = spectral::EigengapReport<f64>;
