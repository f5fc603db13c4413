//! Narrative framework discovery from syntactic relationship tuples.
//!
//! The pipeline aggregates argument phrases into supernodes (seed-word
//! contexts) and subnodes (embedding clusters), scores the verbs linking
//! actant pairs against their corpus-wide frequency, assembles the labeled
//! multigraph, finds overlapping communities by consensus over repeated
//! modularity runs, and compares the result with hand-built reference graphs.

pub mod centrality;
pub mod community;
pub mod config;
pub mod embedding;
pub mod evaluation;
pub mod export;
pub mod interchange;
pub mod kmeans;
pub mod network;
pub mod pipeline;
pub mod ranking;
pub mod significance;
pub mod subnode;
pub mod supernode;
pub mod synth;
pub mod text;
