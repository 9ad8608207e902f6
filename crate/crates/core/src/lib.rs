//! Scoring attributed-graph neighborhoods by how well their structure and
//! attributes agree, with quality baselines and an evaluation harness.

pub mod baselines;
pub mod cli;
pub mod error;
pub mod eval;
pub mod focus;
pub mod graph;
pub mod normality;

pub use error::{AmenError, Result};
pub use focus::{focus, rank_neighborhoods, FocusNorm, FocusResult, RankedNeighborhood};
pub use graph::{boundary_of, egonet_of, AttributedGraph, GraphBuilder, Neighborhood, NeighborhoodDef};
pub use normality::{relevance_vector, RelevanceVector, SimilarityKind};
