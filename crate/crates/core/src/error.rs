//! Error types shared across the engine.
//!
//! Structural findings about a complex or a rule are not errors: validation
//! returns them as report data so a caller can print every violation at
//! once. The enums here cover failures that stop an operation outright.

use crate::ids::Level;
use thiserror::Error;

/// Failure to turn a rule document into a usable rule.
#[derive(Clone, Debug, Error, PartialEq, Eq)]
pub enum RuleError {
    #[error("rule document is not valid JSON: {0}")]
    Syntax(String),
    #[error("unknown built-in rule `{0}`")]
    UnknownBuiltin(String),
    #[error("m = {0} is below the minimum of 3 marked points")]
    MTooSmall(u32),
    #[error("degree = {0} is below the minimum of 2")]
    DegreeTooSmall(u32),
    #[error("{kind} ids must be dense and ascending from 0; found {found} at position {pos}")]
    NonDenseIds { kind: &'static str, found: u32, pos: usize },
    #[error("{context} references missing {kind} {id}")]
    DanglingId { context: String, kind: &'static str, id: u32 },
    #[error("rule complex is not a sphere: V - E + F = {euler}, expected 2")]
    NotASphere { euler: i64 },
    #[error("edge {edge} must belong to exactly two tile boundaries, found {found}")]
    EdgeTileCount { edge: u32, found: usize },
    #[error("rule is structurally invalid: {0}")]
    Structure(String),
}

/// Failure to build or extend a tower.
#[derive(Clone, Debug, Error, PartialEq, Eq)]
pub enum BuildError {
    #[error(
        "rule `{rule}` has a periodic critical point (zero-vertex {vertex}); \
         towers are only defined for rules without them"
    )]
    PeriodicCritical { rule: String, vertex: u32 },
    #[error("requested depth {requested} exceeds the cap of {cap}")]
    DepthCapExceeded { requested: u32, cap: u32 },
    #[error("estimated cell count {estimate} exceeds the cap of {cap}")]
    CellCapExceeded { estimate: u64, cap: u64 },
    #[error("rule failed validation: {0}")]
    InvalidRule(String),
    #[error("internal gluing mismatch while subdividing level {level}: {detail}")]
    GluingMismatch { level: Level, detail: String },
}

/// Failure of a query against a built tower or graph.
#[derive(Clone, Debug, Error, PartialEq)]
pub enum QueryError {
    #[error("vertex {vertex} does not exist at level {level}")]
    UnknownVertex { level: Level, vertex: u32 },
    #[error("edge {edge} does not exist at level {level}")]
    UnknownEdge { level: Level, edge: u32 },
    #[error("tile {tile} does not exist at level {level}")]
    UnknownTile { level: Level, tile: u32 },
    #[error("level {level} is outside the built range -1..={depth}")]
    LevelOutOfRange { level: Level, depth: Level },
    #[error("zero-edge index {index} is outside 0..{m}")]
    ZeroEdgeOutOfRange { index: u32, m: u32 },
    #[error("the two points coincide; this quantity is undefined for equal points")]
    SamePoint,
    #[error("sample is empty")]
    EmptySample,
    #[error("curvature bound must be negative, got {kappa}")]
    CurvatureNotNegative { kappa: f64 },
    #[error("scaling factor must exceed 1, got {lambda}")]
    ScaleNotExpanding { lambda: f64 },
    #[error("operation requires depth of at least {required}, tower has {depth}")]
    DepthTooShallow { required: Level, depth: Level },
}

/// A joining witness that fails its own defining properties. Any of these
/// indicates a bug in the search, not bad input.
#[derive(Clone, Debug, Error, PartialEq, Eq)]
pub enum WitnessError {
    #[error("witness level {level} is not built")]
    LevelMissing { level: Level },
    #[error("witness names tile {tile}, which does not exist at level {level}")]
    UnknownTile { level: Level, tile: u32 },
    #[error("witness lists tile {tile} twice")]
    DuplicateTile { tile: u32 },
    #[error("witness has {actual} tiles but claims {expected}")]
    WrongCardinality { expected: u64, actual: u64 },
    #[error("witness tiles do not form a connected set")]
    NotConnected,
    #[error("witness does not meet 0-edge {side}")]
    MissesSide { side: u32 },
}
