//! Refactoring-aware commit history of Java code blocks.

pub mod config;
pub mod error;
pub mod evalkit;
pub mod gitio;
pub mod refdetect;
pub mod srcmodel;
pub mod stmtmap;
pub mod testkit;
pub mod tracker;
pub mod wire;

pub use config::Config;
pub use error::{Error, ParseError, Result};
pub use gitio::{CommitRef, Repository};
pub use srcmodel::{BlockIdentifier, StatementKind};
pub use tracker::{track, BlockTracker, ChangeHistoryGraph, ChangeKind};
pub use wire::GraphDocument;
