//! Exact teaching-set experiments on finite concept classes.
//!
//! The crate builds dense bit-matrix concept classes, runs the greedy
//! teaching-set algorithm with a fixed tie-break order, generates two families
//! of adversarial classes (axis-aligned rectangles for k = 1 and head/tail
//! classes for k >= 2) and checks them against brute-force oracles.

pub mod analytic;
mod bits;
pub mod budget;
pub mod ccls;
mod columns;
pub mod concept;
pub mod error;
pub mod experiment;
pub mod greedy;
pub mod headtail;
pub mod oracles;
pub mod rectangles;

pub use analytic::{AnalyticCounts, BoundCheck, LevelCounts};
pub use budget::Budget;
pub use ccls::{load_ccls, read_ccls, save_ccls, to_ccls_string, write_ccls};
pub use columns::ones_per_point;
pub use concept::{
    build_class, class_from_bitstrings, ClassBuilder, Concept, ConceptClass, Domain, DomainPoint,
    OriginTag, PointMeta, RectRole, Restriction, TeachingCertificate,
};
pub use error::{Error, Result};
pub use greedy::{best_restriction, greedy_teach, GreedyConfig, GreedyTrace, TieBreak, TraceStep};
