//! KYC-tiered recommendation: tiered user embeddings, multi-source recall,
//! social propagation, ranking with exploration, diversity re-ranking, and a
//! seeded synthetic-user simulator with an nDCG/CTR/serendipity harness.

pub mod catalog;
pub mod coldstart;
pub mod domain;
pub mod embedding;
pub mod error;
pub mod harness;
pub mod io;
pub mod metrics;
pub mod propagation;
pub mod ranking;
pub mod recall;
pub mod rerank;
pub mod simulator;
pub mod vector;

pub use error::{Error, Result};
