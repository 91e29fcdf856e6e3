//! Finite local-action models of closed subgroups of tree automorphism groups.

pub mod cache;
pub mod chabauty;
pub mod eig;
pub mod error;
pub mod permgrp;
pub mod portrait;
pub mod profile;
pub mod report;
mod search;
pub mod spec;
pub mod tree;
pub mod verify;

pub use cache::ProfileCache;
pub use eig::{eig_isomorphic, Dart, EdgeIndexedGraph, Vertex};
pub use error::{Error, Result};
pub use permgrp::{PermGroup, Permutation};
pub use portrait::Portrait;
pub use profile::{profile_contains, Engine, ExtensionReport, Profile};
pub use report::{Report, Value};
pub use spec::{make_universal, GroupSpec, Membership};
pub use tree::{TreeBall, VertexId};
