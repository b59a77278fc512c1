//! Exact extended Shapley values for coalitional games with externalities
//! given as MC-nets rules.
//!
//! Rules are normalized to hybrid rules, each of which is a labeled
//! incompatibility graph; values are sums over proper colorings of those
//! graphs, with polynomial shortcuts for the McQuillin and externality-free
//! values and a brute-force route over all embedded coalitions as oracle.

pub mod combinatorics;
pub mod error;
pub mod game;
pub mod graphs;
pub mod hardness;
pub mod rules;
pub mod transforms;
pub mod values;

pub use combinatorics::{Caps, Integer, Rational, RationalMatrix};
pub use error::{Error, ParseError, ParseErrorKind, Result};
pub use game::{Coalition, EmbeddedCoalition, Partition, PartitionGame, ValueKind};
pub use graphs::{Graph, LabeledGraph, NodePartition};

pub use rules::{BoolExpr, EmbeddedRule, HybridRule, McRule, Rule, RuleSet, WeightedRule};
