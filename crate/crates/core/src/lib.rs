//! Combinatorial engine for expanding a sphere map presented as a
//! subdivision rule with an invariant curve.
//!
//! The pipeline: parse or generate a rule ([`rule`]), build the tower of
//! cell decompositions by repeated subdivision ([`tower`]), then study the
//! geometry: the tile graph and its hyperbolicity ([`graph`]), expansion
//! counts and the Lattès criterion ([`expansion`]), and the visual
//! metric on the sphere ([`visual`]).

pub mod bitset;
pub mod complex;
pub mod error;
pub mod expansion;
pub mod fixtures;
pub mod graph;
pub mod halfint;
pub mod ids;
pub mod rule;
pub mod tower;
pub mod visual;

pub use complex::{CellComplex, CellRef, Color};
pub use error::{BuildError, QueryError, RuleError, WitnessError};
pub use expansion::{
    curvature_report, join_sides_dn, lambda0_estimate, lattes_criterion, CurvatureOptions,
    CurvatureReport, DnResult,
};
pub use graph::{TileGraph, TileNode};
pub use halfint::Half;
pub use ids::{EdgeId, Level, TileId, VertexId, BASE_LEVEL};
pub use rule::{builtin_rule, parse_rule, serialize_rule, validate_rule, SubdivisionRule};
pub use tower::{build_tower, BuildOptions, Tower};
pub use visual::{charvisual_profile, m_points, m_prime_points, PointRef, PointSeparation};

