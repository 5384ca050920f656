//! Subdivision rules: the level-1 complex with labels encoding the map.
//!
//! A rule packages one subdivision step. Its pattern is a full level-1
//! decomposition of the sphere whose cells carry images in the level-0
//! complex: every pattern vertex maps to a zero-vertex, every pattern edge
//! onto a zero-edge with a direction, and every pattern tile onto one side
//! of the curve (its `color`) with a `rotation` fixing the boundary
//! correspondence. Each pattern tile also records its `region`, the side of
//! the curve it sits inside, so the pattern of either level-0 tile can be
//! read off. Deeper levels arise by applying the pattern recursively; that
//! lives in the tower builder.
//!
//! Rules are immutable after parsing and safe to share across threads.

use crate::complex::{
    validate_complex, CellComplex, Color, ComplexViolation, CurvePos, EdgeData, EdgeLocation,
    TileData, VertexData, VertexLocation,
};
use crate::error::RuleError;
use crate::ids::{EdgeId, TileId, VertexId};
use num_rational::Rational64;
use num_traits::Zero;
use serde::{Deserialize, Serialize};
use smallvec::SmallVec;
use std::fmt;

/// A parsed subdivision rule.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SubdivisionRule {
    pub name: String,
    pub m: u32,
    pub degree: u32,
    /// The level-1 complex, with image labels on every cell. Each tile's
    /// `side` is its region: the side of the curve it subdivides.
    pub pattern: CellComplex,
    /// Image of each zero-vertex under the map.
    pub post_vertex_map: Vec<u32>,
}

impl SubdivisionRule {
    /// Local degree of the map at a pattern vertex: half its incident edge
    /// count, since the image zero-vertex has exactly two incident
    /// zero-edges.
    pub fn local_degree(&self, v: VertexId) -> u32 {
        (self.pattern.vertex_edges[v.index()].len() / 2) as u32
    }

    /// Side of the curve a pattern tile subdivides.
    pub fn region(&self, t: TileId) -> Color {
        self.pattern.tiles[t.index()].side
    }

    /// Pattern tiles subdividing one side, in id order. Their order fixes
    /// the child ordering during subdivision.
    pub fn tiles_in_region(&self, side: Color) -> Vec<TileId> {
        (0..self.pattern.tile_count() as u32)
            .map(TileId)
            .filter(|t| self.pattern.tiles[t.index()].side == side)
            .collect()
    }
}

// =====================================================================
// Document schema
// =====================================================================

/// On-disk form of a rule. Fields serialize in declaration order; parsing
/// followed by serializing is the normal form and round-trips bit-exactly.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RuleDoc {
    pub name: String,
    pub m: u32,
    pub degree: u32,
    pub vertices: Vec<VertexDoc>,
    pub edges: Vec<EdgeDoc>,
    pub tiles: Vec<TileDoc>,
    pub zero_vertices: Vec<u32>,
    pub post_vertex_map: Vec<u32>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VertexDoc {
    pub id: u32,
    pub image_vertex: u32,
    pub location: LocationDoc,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EdgeDoc {
    pub id: u32,
    pub endpoints: [u32; 2],
    pub tiles: [u32; 2],
    pub image_edge: u32,
    pub image_direction: Direction,
    pub location: LocationDoc,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TileDoc {
    pub id: u32,
    pub region: Color,
    pub color: Color,
    pub rotation: u32,
    pub boundary: Vec<BoundaryDoc>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BoundaryDoc {
    pub edge: u32,
    pub direction: Direction,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    Forward,
    Backward,
}

impl Direction {
    fn forward(self) -> bool {
        matches!(self, Direction::Forward)
    }
    fn from_bool(forward: bool) -> Direction {
        if forward {
            Direction::Forward
        } else {
            Direction::Backward
        }
    }
}

/// Location of a cell relative to the curve. Vertices on the curve carry an
/// exact position; edges on the curve omit the position fields.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum LocationDoc {
    OnCurve {
        edge_index: u32,
        #[serde(skip_serializing_if = "Option::is_none", default)]
        position_num: Option<i64>,
        #[serde(skip_serializing_if = "Option::is_none", default)]
        position_den: Option<i64>,
    },
    Interior(Color),
}

// =====================================================================
// Parsing
// =====================================================================

/// Parses and structurally resolves a rule document. Semantic invariants
/// (checkerboard coloring, image coherence, fiber degrees) are left to
/// [`validate_rule`]; this rejects only documents that cannot be
/// represented at all.
pub fn parse_rule(text: &str) -> Result<SubdivisionRule, RuleError> {
    let doc: RuleDoc =
        serde_json::from_str(text).map_err(|e| RuleError::Syntax(e.to_string()))?;
    rule_from_document(&doc)
}

/// Builds a rule from an already-deserialized document.
pub fn rule_from_document(doc: &RuleDoc) -> Result<SubdivisionRule, RuleError> {
    if doc.m < 3 {
        return Err(RuleError::MTooSmall(doc.m));
    }
    if doc.degree < 2 {
        return Err(RuleError::DegreeTooSmall(doc.degree));
    }
    check_dense_ids("vertex", doc.vertices.iter().map(|v| v.id))?;
    check_dense_ids("edge", doc.edges.iter().map(|e| e.id))?;
    check_dense_ids("tile", doc.tiles.iter().map(|t| t.id))?;
    let nv = doc.vertices.len() as u32;
    let ne = doc.edges.len() as u32;
    let nt = doc.tiles.len() as u32;

    for e in &doc.edges {
        for &v in &e.endpoints {
            if v >= nv {
                return Err(RuleError::DanglingId {
                    context: format!("edge {} endpoints", e.id),
                    kind: "vertex",
                    id: v,
                });
            }
        }
        for &t in &e.tiles {
            if t >= nt {
                return Err(RuleError::DanglingId {
                    context: format!("edge {} tiles", e.id),
                    kind: "tile",
                    id: t,
                });
            }
        }
    }
    for t in &doc.tiles {
        for b in &t.boundary {
            if b.edge >= ne {
                return Err(RuleError::DanglingId {
                    context: format!("tile {} boundary", t.id),
                    kind: "edge",
                    id: b.edge,
                });
            }
        }
    }
    for &z in &doc.zero_vertices {
        if z >= nv {
            return Err(RuleError::DanglingId {
                context: "zero_vertices".into(),
                kind: "vertex",
                id: z,
            });
        }
    }

    let euler = nv as i64 - ne as i64 + nt as i64;
    if euler != 2 {
        return Err(RuleError::NotASphere { euler });
    }

    // Every edge must sit on exactly two tile boundaries, and those two
    // tiles must be the ones the edge itself records.
    let mut claims: Vec<SmallVec<[u32; 2]>> = vec![SmallVec::new(); ne as usize];
    for t in &doc.tiles {
        for b in &t.boundary {
            claims[b.edge as usize].push(t.id);
        }
    }
    for e in &doc.edges {
        let c = &claims[e.id as usize];
        if c.len() != 2 {
            return Err(RuleError::EdgeTileCount {
                edge: e.id,
                found: c.len(),
            });
        }
        let mut listed = [e.tiles[0], e.tiles[1]];
        listed.sort_unstable();
        let mut found = [c[0], c[1]];
        found.sort_unstable();
        if listed != found {
            return Err(RuleError::Structure(format!(
                "edge {} records tiles {:?} but boundaries of tiles {:?} claim it",
                e.id, e.tiles, found
            )));
        }
    }

    if doc.zero_vertices.len() != doc.m as usize
        || doc.zero_vertices.iter().enumerate().any(|(k, &z)| z != k as u32)
    {
        return Err(RuleError::Structure(format!(
            "zero_vertices must be the identity list [0..{}]; rules are stored in \
             normal form with zero-vertex k at vertex id k",
            doc.m
        )));
    }
    if doc.post_vertex_map.len() != doc.m as usize {
        return Err(RuleError::Structure(format!(
            "post_vertex_map must have exactly m = {} entries",
            doc.m
        )));
    }
    if let Some(&bad) = doc.post_vertex_map.iter().find(|&&q| q >= doc.m) {
        return Err(RuleError::Structure(format!(
            "post_vertex_map entry {bad} is not a zero-vertex index"
        )));
    }

    let vertices = doc
        .vertices
        .iter()
        .map(|v| {
            Ok(VertexData {
                location: vertex_location(&v.location, v.id)?,
                image_vertex: v.image_vertex,
            })
        })
        .collect::<Result<Vec<_>, RuleError>>()?;
    let edges = doc
        .edges
        .iter()
        .map(|e| {
            Ok(EdgeData {
                endpoints: [VertexId(e.endpoints[0]), VertexId(e.endpoints[1])],
                tiles: [TileId(e.tiles[0]), TileId(e.tiles[1])],
                image_edge: e.image_edge,
                image_forward: e.image_direction.forward(),
                location: edge_location(&e.location),
            })
        })
        .collect::<Result<Vec<_>, RuleError>>()?;
    let tiles = doc
        .tiles
        .iter()
        .map(|t| TileData {
            boundary: t
                .boundary
                .iter()
                .map(|b| (EdgeId(b.edge), b.direction.forward()))
                .collect(),
            corners: t
                .boundary
                .iter()
                .map(|b| {
                    let e = &doc.edges[b.edge as usize];
                    let v = if b.direction.forward() {
                        e.endpoints[0]
                    } else {
                        e.endpoints[1]
                    };
                    VertexId(v)
                })
                .collect(),
            color: t.color,
            rotation: t.rotation,
            side: t.region,
        })
        .collect();

    let mut pattern = CellComplex {
        level: 1,
        m: doc.m,
        vertices,
        edges,
        tiles,
        parents: None,
        first_new_vertex: doc.m,
        vertex_tiles: Vec::new(),
        vertex_edges: Vec::new(),
    };
    pattern.rebuild_indices();

    Ok(SubdivisionRule {
        name: doc.name.clone(),
        m: doc.m,
        degree: doc.degree,
        pattern,
        post_vertex_map: doc.post_vertex_map.clone(),
    })
}

fn check_dense_ids(
    kind: &'static str,
    ids: impl Iterator<Item = u32>,
) -> Result<(), RuleError> {
    for (pos, id) in ids.enumerate() {
        if id != pos as u32 {
            return Err(RuleError::NonDenseIds {
                kind,
                found: id,
                pos,
            });
        }
    }
    Ok(())
}

fn vertex_location(loc: &LocationDoc, id: u32) -> Result<VertexLocation, RuleError> {
    match loc {
        LocationDoc::OnCurve {
            edge_index,
            position_num,
            position_den,
        } => {
            let (num, den) = match (position_num, position_den) {
                (Some(n), Some(d)) => (*n, *d),
                _ => {
                    return Err(RuleError::Structure(format!(
                        "vertex {id} lies on the curve but has no position"
                    )))
                }
            };
            if den == 0 {
                return Err(RuleError::Structure(format!(
                    "vertex {id} has a zero position denominator"
                )));
            }
            let pos = Rational64::new(num, den);
            if pos < CurvePos::zero() || pos >= CurvePos::from_integer(1) {
                return Err(RuleError::Structure(format!(
                    "vertex {id} position {pos} is outside [0, 1)"
                )));
            }
            Ok(VertexLocation::OnCurve {
                zero_edge: *edge_index,
                pos,
            })
        }
        LocationDoc::Interior(c) => Ok(VertexLocation::Interior(*c)),
    }
}

fn edge_location(loc: &LocationDoc) -> EdgeLocation {
    match loc {
        // Position fields on an edge location are meaningless and dropped.
        LocationDoc::OnCurve { edge_index, .. } => EdgeLocation::OnCurve {
            zero_edge: *edge_index,
        },
        LocationDoc::Interior(c) => EdgeLocation::Interior(*c),
    }
}

// =====================================================================
// Serialization
// =====================================================================

impl SubdivisionRule {
    /// The normal-form document for this rule. Positions are emitted
    /// reduced; edge curve locations omit position fields.
    pub fn to_document(&self) -> RuleDoc {
        RuleDoc {
            name: self.name.clone(),
            m: self.m,
            degree: self.degree,
            vertices: self
                .pattern
                .vertices
                .iter()
                .enumerate()
                .map(|(i, v)| VertexDoc {
                    id: i as u32,
                    image_vertex: v.image_vertex,
                    location: match v.location {
                        VertexLocation::OnCurve { zero_edge, pos } => LocationDoc::OnCurve {
                            edge_index: zero_edge,
                            position_num: Some(*pos.numer()),
                            position_den: Some(*pos.denom()),
                        },
                        VertexLocation::Interior(c) => LocationDoc::Interior(c),
                    },
                })
                .collect(),
            edges: self
                .pattern
                .edges
                .iter()
                .enumerate()
                .map(|(i, e)| EdgeDoc {
                    id: i as u32,
                    endpoints: [e.endpoints[0].0, e.endpoints[1].0],
                    tiles: [e.tiles[0].0, e.tiles[1].0],
                    image_edge: e.image_edge,
                    image_direction: Direction::from_bool(e.image_forward),
                    location: match e.location {
                        EdgeLocation::OnCurve { zero_edge } => LocationDoc::OnCurve {
                            edge_index: zero_edge,
                            position_num: None,
                            position_den: None,
                        },
                        EdgeLocation::Interior(c) => LocationDoc::Interior(c),
                    },
                })
                .collect(),
            tiles: self
                .pattern
                .tiles
                .iter()
                .enumerate()
                .map(|(i, t)| TileDoc {
                    id: i as u32,
                    region: t.side,
                    color: t.color,
                    rotation: t.rotation,
                    boundary: t
                        .boundary
                        .iter()
                        .map(|&(e, d)| BoundaryDoc {
                            edge: e.0,
                            direction: Direction::from_bool(d),
                        })
                        .collect(),
                })
                .collect(),
            zero_vertices: (0..self.m).collect(),
            post_vertex_map: self.post_vertex_map.clone(),
        }
    }
}

/// Serializes a rule to its canonical text form. Parsing the output yields
/// the same rule, and serializing again yields identical bytes.
pub fn serialize_rule(rule: &SubdivisionRule) -> String {
    let mut s = serde_json::to_string_pretty(&rule.to_document())
        .expect("rule documents always serialize");
    s.push('\n');
    s
}

// =====================================================================
// Validation
// =====================================================================

/// A semantic violation in a parsed rule.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum RuleViolation {
    Complex(ComplexViolation),
    Checkerboard { edge: EdgeId },
    PostMapMismatch { zero_vertex: u32, stored: u32, labeled: u32 },
    OddIncidence { vertex: VertexId, incident: usize },
    FiberDegree { zero_vertex: u32, sum: u32, expected: u32 },
}

impl fmt::Display for RuleViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        use RuleViolation::*;
        match self {
            Complex(v) => v.fmt(f),
            Checkerboard { edge } => write!(
                f,
                "checkerboard violation: both tiles of edge {edge} have the same color"
            ),
            PostMapMismatch { zero_vertex, stored, labeled } => write!(
                f,
                "post_vertex_map sends zero-vertex {zero_vertex} to {stored} but the pattern \
                 labels it {labeled}"
            ),
            OddIncidence { vertex, incident } => write!(
                f,
                "vertex {vertex} has {incident} incident edges; curve preimages always pair them"
            ),
            FiberDegree { zero_vertex, sum, expected } => write!(
                f,
                "local degrees over the fiber of zero-vertex {zero_vertex} sum to {sum}, \
                 expected the map degree {expected}"
            ),
        }
    }
}

/// Report from [`validate_rule`]: empty iff the rule is usable.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct RuleReport {
    pub violations: Vec<RuleViolation>,
}

impl RuleReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

impl fmt::Display for RuleReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.violations.is_empty() {
            return write!(f, "rule is valid");
        }
        for v in &self.violations {
            writeln!(f, "{v}")?;
        }
        Ok(())
    }
}

/// Checks every semantic invariant of a parsed rule.
pub fn validate_rule(rule: &SubdivisionRule) -> RuleReport {
    let mut violations: Vec<RuleViolation> = validate_complex(&rule.pattern, rule.degree)
        .into_iter()
        .map(RuleViolation::Complex)
        .collect();
    let pattern = &rule.pattern;

    for (ei, edge) in pattern.edges.iter().enumerate() {
        let e = EdgeId(ei as u32);
        let [t0, t1] = edge.tiles;
        if t0 == t1 || t0.index() >= pattern.tile_count() || t1.index() >= pattern.tile_count() {
            continue; // already reported by the complex validator
        }
        if pattern.tiles[t0.index()].color == pattern.tiles[t1.index()].color {
            violations.push(RuleViolation::Checkerboard { edge: e });
        }
    }

    for k in 0..rule.m {
        if (k as usize) < pattern.vertex_count() {
            let labeled = pattern.vertices[k as usize].image_vertex;
            if labeled != rule.post_vertex_map[k as usize] {
                violations.push(RuleViolation::PostMapMismatch {
                    zero_vertex: k,
                    stored: rule.post_vertex_map[k as usize],
                    labeled,
                });
            }
        }
    }

    // Local degrees sum to the map degree over every fiber.
    let mut fiber_sums = vec![0u32; rule.m as usize];
    for (vi, vertex) in pattern.vertices.iter().enumerate() {
        let incident = pattern.vertex_edges[vi].len();
        if incident % 2 != 0 {
            violations.push(RuleViolation::OddIncidence {
                vertex: VertexId(vi as u32),
                incident,
            });
        }
        if (vertex.image_vertex as usize) < fiber_sums.len() {
            fiber_sums[vertex.image_vertex as usize] += (incident / 2) as u32;
        }
    }
    for (q, &sum) in fiber_sums.iter().enumerate() {
        if sum != rule.degree {
            violations.push(RuleViolation::FiberDegree {
                zero_vertex: q as u32,
                sum,
                expected: rule.degree,
            });
        }
    }

    RuleReport { violations }
}

// =====================================================================
// Criticality
// =====================================================================

/// Criticality analysis of a rule: local degrees, critical vertices, the
/// periodic-critical verdict, and the uniform degree bound.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CriticalityReport {
    /// Local degree of each pattern vertex.
    pub local_degrees: Vec<u32>,
    /// Pattern vertices with local degree at least 2.
    pub critical_vertices: Vec<VertexId>,
    /// Uniform bound on local degrees of all iterates: the maximum, over
    /// pattern vertices v, of deg(v) times the product of local degrees
    /// along the zero-vertex orbit of v's image, each orbit vertex counted
    /// once (one full cycle at most). `None` when a periodic critical point
    /// exists, since no bound holds then.
    pub degree_bound: Option<u64>,
    pub has_periodic_critical: bool,
}

/// Computes the criticality report. The orbit structure justifying the
/// degree bound: any point's forward orbit meets at most one critical point
/// outside the zero-vertices (its image is a zero-vertex, and zero-vertices
/// are forward-invariant), after which it follows the zero-vertex map; a
/// critical zero-vertex can recur only if it is periodic, which is exactly
/// the excluded case.
pub fn periodic_critical_check(rule: &SubdivisionRule) -> CriticalityReport {
    let nv = rule.pattern.vertex_count();
    let local_degrees: Vec<u32> = (0..nv)
        .map(|v| rule.local_degree(VertexId(v as u32)))
        .collect();
    let critical_vertices: Vec<VertexId> = (0..nv)
        .filter(|&v| local_degrees[v] >= 2)
        .map(|v| VertexId(v as u32))
        .collect();

    // Zero-vertex k is pattern vertex k, so its local degree is available
    // directly.
    let sigma = &rule.post_vertex_map;
    let mut has_periodic_critical = false;
    for q in 0..rule.m as usize {
        if local_degrees[q] < 2 {
            continue;
        }
        let mut current = sigma[q] as usize;
        for _ in 0..rule.m {
            if current == q {
                has_periodic_critical = true;
                break;
            }
            current = sigma[current] as usize;
        }
    }

    let degree_bound = if has_periodic_critical {
        None
    } else {
        let mut bound = 1u64;
        for v in 0..nv {
            let mut product = u64::from(local_degrees[v]);
            let mut visited = vec![false; rule.m as usize];
            let mut current = rule.pattern.vertices[v].image_vertex as usize;
            while !visited[current] {
                visited[current] = true;
                product = product.saturating_mul(u64::from(local_degrees[current]));
                current = sigma[current] as usize;
            }
            bound = bound.max(product);
        }
        Some(bound)
    };

    CriticalityReport {
        local_degrees,
        critical_vertices,
        degree_bound,
        has_periodic_critical,
    }
}

// =====================================================================
// Built-in rules
// =====================================================================

/// Returns a built-in rule by name. Available: `lattes-2x2`, `lattes-3x3`.
pub fn builtin_rule(name: &str) -> Result<SubdivisionRule, RuleError> {
    match name {
        "lattes-2x2" => Ok(pillow_rule(2)),
        "lattes-3x3" => Ok(pillow_rule(3)),
        other => Err(RuleError::UnknownBuiltin(other.to_string())),
    }
}

pub const BUILTIN_RULE_NAMES: [&str; 2] = ["lattes-2x2", "lattes-3x3"];

#[derive(Clone, Copy, PartialEq, Eq)]
enum Face {
    Front,
    Back,
}

/// The k-squared pillow rule: two unit squares glued along their boundary,
/// each subdivided into a k by k grid of subsquares. The map scales by k
/// and folds, so the degree is k squared. The front face is the white side
/// of the curve, the back face the black side.
///
/// Vertex layout: the four corners are the zero-vertices with ids 0..4
/// (bottom-left, bottom-right, top-right, top-left). The remaining front
/// lattice points follow in row-major order, then the back interior points
/// row-major. Front tile (i, j) has id j*k + i, back tile (i, j) has id
/// k*k + j*k + i. This layout is fixed: external checks replay it.
pub fn pillow_rule(k: u32) -> SubdivisionRule {
    assert!(k >= 2, "a pillow rule needs k >= 2 to have degree >= 2");
    let m = 4u32;
    let degree = k * k;

    let corner_id = |i: u32, j: u32| -> Option<u32> {
        match (i, j) {
            (0, 0) => Some(0),
            (i2, 0) if i2 == k => Some(1),
            (i2, j2) if i2 == k && j2 == k => Some(2),
            (0, j2) if j2 == k => Some(3),
            _ => None,
        }
    };
    let corner_ranks: Vec<u32> = vec![0, k, k * (k + 1), (k + 1) * (k + 1) - 1];
    let vid_front = |i: u32, j: u32| -> u32 {
        if let Some(c) = corner_id(i, j) {
            return c;
        }
        let rank = j * (k + 1) + i;
        let removed = corner_ranks.iter().filter(|&&r| r < rank).count() as u32;
        4 + rank - removed
    };
    let front_total = (k + 1) * (k + 1);
    let vid = |face: Face, i: u32, j: u32| -> u32 {
        let on_boundary = i == 0 || i == k || j == 0 || j == k;
        match face {
            Face::Front => vid_front(i, j),
            Face::Back if on_boundary => vid_front(i, j),
            Face::Back => front_total + (j - 1) * (k - 1) + (i - 1),
        }
    };

    // Horizontal edge (i, j)-(i+1, j); rows 0 and k are curve edges shared
    // by both faces and stored once, under the front id.
    let eid_h = |face: Face, i: u32, j: u32| -> u32 {
        if j == 0 || j == k || face == Face::Front {
            j * k + i
        } else {
            2 * k * (k + 1) + (j - 1) * k + i
        }
    };
    // Vertical edge (i, j)-(i, j+1); columns 0 and k are curve edges.
    let eid_v = |face: Face, i: u32, j: u32| -> u32 {
        if i == 0 || i == k || face == Face::Front {
            k * (k + 1) + j * (k + 1) + i
        } else {
            2 * k * (k + 1) + k * (k - 1) + j * (k - 1) + (i - 1)
        }
    };

    // Image zero-vertex of lattice point (i, j), both faces: the map scales
    // by k and folds the doubled square back onto it.
    let idx = |a: u32, b: u32| -> u32 {
        match (a, b) {
            (0, 0) => 0,
            (1, 0) => 1,
            (1, 1) => 2,
            _ => 3,
        }
    };
    let image_of = |i: u32, j: u32| idx(i % 2, j % 2);

    let vertex_total = front_total + (k - 1) * (k - 1);
    let placeholder = VertexData {
        location: VertexLocation::Interior(Color::White),
        image_vertex: 0,
    };
    let mut vertices = vec![placeholder; vertex_total as usize];
    let mut assigned = vec![false; vertex_total as usize];
    for face in [Face::Front, Face::Back] {
        for j in 0..=k {
            for i in 0..=k {
                if face == Face::Back && (i == 0 || i == k || j == 0 || j == k) {
                    continue;
                }
                let id = vid(face, i, j) as usize;
                let location = if face == Face::Back {
                    VertexLocation::Interior(Color::Black)
                } else if j == 0 && i < k {
                    VertexLocation::OnCurve {
                        zero_edge: 0,
                        pos: Rational64::new(i as i64, k as i64),
                    }
                } else if i == k && j < k {
                    VertexLocation::OnCurve {
                        zero_edge: 1,
                        pos: Rational64::new(j as i64, k as i64),
                    }
                } else if j == k && i > 0 {
                    VertexLocation::OnCurve {
                        zero_edge: 2,
                        pos: Rational64::new((k - i) as i64, k as i64),
                    }
                } else if i == 0 {
                    VertexLocation::OnCurve {
                        zero_edge: 3,
                        pos: Rational64::new((k - j) as i64, k as i64),
                    }
                } else {
                    VertexLocation::Interior(Color::White)
                };
                vertices[id] = VertexData {
                    location,
                    image_vertex: image_of(i, j),
                };
                assigned[id] = true;
            }
        }
    }
    debug_assert!(assigned.iter().all(|&a| a));

    let edge_total = 4 * k * k;
    let edge_placeholder = EdgeData {
        endpoints: [VertexId(0), VertexId(0)],
        tiles: [TileId(0), TileId(0)],
        image_edge: 0,
        image_forward: true,
        location: EdgeLocation::Interior(Color::White),
    };
    let mut edges = vec![edge_placeholder; edge_total as usize];
    let mut edge_set = vec![false; edge_total as usize];
    for face in [Face::Front, Face::Back] {
        let interior_side = match face {
            Face::Front => Color::White,
            Face::Back => Color::Black,
        };
        // Horizontal edges.
        for j in 0..=k {
            if face == Face::Back && (j == 0 || j == k) {
                continue;
            }
            for i in 0..k {
                let id = eid_h(face, i, j) as usize;
                let location = match j {
                    0 => EdgeLocation::OnCurve { zero_edge: 0 },
                    _ if j == k => EdgeLocation::OnCurve { zero_edge: 2 },
                    _ => EdgeLocation::Interior(interior_side),
                };
                let (image_edge, image_forward) = if j % 2 == 0 {
                    (0, i % 2 == 0)
                } else {
                    (2, i % 2 == 1)
                };
                edges[id] = EdgeData {
                    endpoints: [VertexId(vid(face, i, j)), VertexId(vid(face, i + 1, j))],
                    tiles: [TileId(0), TileId(0)],
                    image_edge,
                    image_forward,
                    location,
                };
                edge_set[id] = true;
            }
        }
        // Vertical edges.
        for j in 0..k {
            for i in 0..=k {
                if face == Face::Back && (i == 0 || i == k) {
                    continue;
                }
                let id = eid_v(face, i, j) as usize;
                let location = match i {
                    0 => EdgeLocation::OnCurve { zero_edge: 3 },
                    _ if i == k => EdgeLocation::OnCurve { zero_edge: 1 },
                    _ => EdgeLocation::Interior(interior_side),
                };
                let (image_edge, image_forward) = if i % 2 == 0 {
                    (3, j % 2 == 1)
                } else {
                    (1, j % 2 == 0)
                };
                edges[id] = EdgeData {
                    endpoints: [VertexId(vid(face, i, j)), VertexId(vid(face, i, j + 1))],
                    tiles: [TileId(0), TileId(0)],
                    image_edge,
                    image_forward,
                    location,
                };
                edge_set[id] = true;
            }
        }
    }
    debug_assert!(edge_set.iter().all(|&a| a));

    let mut tiles = Vec::with_capacity(2 * (k * k) as usize);
    for face in [Face::Front, Face::Back] {
        for j in 0..k {
            for i in 0..k {
                let even = (i + j) % 2 == 0;
                let color = match (face, even) {
                    (Face::Front, true) | (Face::Back, false) => Color::White,
                    _ => Color::Black,
                };
                let (boundary, corners): (Boundary4, Corners4) = match face {
                    Face::Front => (
                        [
                            (EdgeId(eid_h(face, i, j)), true),
                            (EdgeId(eid_v(face, i + 1, j)), true),
                            (EdgeId(eid_h(face, i, j + 1)), false),
                            (EdgeId(eid_v(face, i, j)), false),
                        ],
                        [
                            VertexId(vid(face, i, j)),
                            VertexId(vid(face, i + 1, j)),
                            VertexId(vid(face, i + 1, j + 1)),
                            VertexId(vid(face, i, j + 1)),
                        ],
                    ),
                    Face::Back => (
                        [
                            (EdgeId(eid_v(face, i, j)), true),
                            (EdgeId(eid_h(face, i, j + 1)), true),
                            (EdgeId(eid_v(face, i + 1, j)), false),
                            (EdgeId(eid_h(face, i, j)), false),
                        ],
                        [
                            VertexId(vid(face, i, j)),
                            VertexId(vid(face, i, j + 1)),
                            VertexId(vid(face, i + 1, j + 1)),
                            VertexId(vid(face, i + 1, j)),
                        ],
                    ),
                };
                tiles.push(TileData {
                    boundary: boundary.into_iter().collect(),
                    corners: corners.into_iter().collect(),
                    color,
                    rotation: image_of(i, j),
                    side: match face {
                        Face::Front => Color::White,
                        Face::Back => Color::Black,
                    },
                });
            }
        }
    }

    // Fill each edge's tile pair from the boundary claims: one tile walks
    // it forward, one backward.
    let mut forward_claim: Vec<Option<TileId>> = vec![None; edge_total as usize];
    let mut backward_claim: Vec<Option<TileId>> = vec![None; edge_total as usize];
    for (ti, tile) in tiles.iter().enumerate() {
        for &(e, dir) in &tile.boundary {
            let slot = if dir {
                &mut forward_claim[e.index()]
            } else {
                &mut backward_claim[e.index()]
            };
            assert!(slot.is_none(), "edge {e} claimed twice in one direction");
            *slot = Some(TileId(ti as u32));
        }
    }
    for (ei, edge) in edges.iter_mut().enumerate() {
        edge.tiles = [
            forward_claim[ei].expect("every edge has a forward side"),
            backward_claim[ei].expect("every edge has a backward side"),
        ];
    }

    let mut pattern = CellComplex {
        level: 1,
        m,
        vertices,
        edges,
        tiles,
        parents: None,
        first_new_vertex: m,
        vertex_tiles: Vec::new(),
        vertex_edges: Vec::new(),
    };
    pattern.rebuild_indices();

    let post_vertex_map = if k % 2 == 0 {
        vec![0, 0, 0, 0]
    } else {
        vec![0, 1, 2, 3]
    };

    SubdivisionRule {
        name: format!("lattes-{k}x{k}"),
        m,
        degree,
        pattern,
        post_vertex_map,
    }
}

type Boundary4 = [(EdgeId, bool); 4];
type Corners4 = [VertexId; 4];
