//! Cell decompositions of the sphere induced by a marked Jordan curve.
//!
//! Level -1 is the sphere itself, a single tile with no edges or vertices.
//! Level 0 is the curve with `m >= 3` marked points: `m` vertices, `m`
//! edges, and two tiles (one per side of the curve, colored white and
//! black). Deeper levels refine level 0; every tile at every level is an
//! `m`-gon, and the tile counts follow `E = m * d^n`, `F = 2 * d^n` for a
//! rule of degree `d`.
//!
//! Conventions baked into the data model:
//!
//! * Tile boundaries are stored in the cyclic order induced by a fixed
//!   orientation of the sphere. For the white level-0 tile this visits the
//!   zero-vertices in increasing index order; for the black tile in
//!   decreasing order. Subdivision preserves the convention, so a tile's
//!   `color` and `rotation` fully determine where its corners land on the
//!   curve: corner `j` of a white tile maps to zero-vertex `(r + j) mod m`,
//!   of a black tile to `(r - j) mod m`.
//! * Every edge stores which zero-edge its image is and whether its stored
//!   endpoint order maps forward along it. Both incident tiles see the same
//!   record, which is what keeps subdivision of shared boundary edges
//!   consistent without a separate gluing table.
//! * Curve positions are exact rationals, never floats, so identity of
//!   curve cells is decidable.
//! * Vertex ids are stable: a vertex keeps its numeric id at every deeper
//!   level. Ids below `first_new_vertex` are carried over from the previous
//!   level. The zero-vertices are ids `0..m` at every level.

use crate::error::QueryError;
use crate::ids::{EdgeId, Level, TileId, VertexId};
use num_rational::Rational64;
use num_traits::Zero;
use serde::{Deserialize, Serialize};
use smallvec::SmallVec;
use std::fmt;

/// Which side of the curve a cell belongs to, and which side a tile maps
/// onto. White is the side whose level-0 boundary orientation visits the
/// zero-vertices in increasing order.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Color {
    White,
    Black,
}

impl Color {
    pub fn opposite(self) -> Color {
        match self {
            Color::White => Color::Black,
            Color::Black => Color::White,
        }
    }
}

impl fmt::Display for Color {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Color::White => write!(f, "white"),
            Color::Black => write!(f, "black"),
        }
    }
}

/// Exact position along a zero-edge, scaled to `[0, 1]`.
pub type CurvePos = Rational64;

/// Where a vertex sits relative to the original curve.
///
/// A vertex on the curve records the zero-edge it lies on and its exact
/// position along it. Zero-vertex `k` is canonically `OnCurve { zero_edge:
/// k, pos: 0 }`; positions are always in `[0, 1)`, the endpoint at position
/// 1 being position 0 of the next zero-edge.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum VertexLocation {
    OnCurve { zero_edge: u32, pos: CurvePos },
    Interior(Color),
}

/// Where an edge sits relative to the original curve. An edge on the curve
/// lies inside a single zero-edge.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum EdgeLocation {
    OnCurve { zero_edge: u32 },
    Interior(Color),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VertexData {
    pub location: VertexLocation,
    /// Index of the zero-vertex this vertex maps to under the level-many
    /// iterate of the map.
    pub image_vertex: u32,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EdgeData {
    /// Endpoints in the edge's stored direction.
    pub endpoints: [VertexId; 2],
    /// The two distinct tiles incident to the edge.
    pub tiles: [TileId; 2],
    /// Zero-edge the level-many iterate maps this edge onto.
    pub image_edge: u32,
    /// True when walking `endpoints[0] -> endpoints[1]` traverses the image
    /// zero-edge from its start vertex to its end vertex.
    pub image_forward: bool,
    pub location: EdgeLocation,
}

pub type Boundary = SmallVec<[(EdgeId, bool); 8]>;
pub type Corners = SmallVec<[VertexId; 8]>;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TileData {
    /// Cyclic boundary in induced orientation: `m` edges, each with the
    /// direction the tile traverses it (`true` = along the edge's stored
    /// endpoint order).
    pub boundary: Boundary,
    /// Corner `j` is the start vertex of boundary edge `j`.
    pub corners: Corners,
    /// Side of the curve this tile maps onto.
    pub color: Color,
    /// Corner `0` maps to zero-vertex `rotation`.
    pub rotation: u32,
    /// Side of the curve this tile sits inside. At level 0 this is the tile
    /// itself; at level 1 it is the rule's region label. Tiles of level 1
    /// and deeper have interiors disjoint from the curve, so the side is
    /// inherited unchanged by subdivision.
    pub side: Color,
}

impl TileData {
    /// Zero-vertex index corner `j` maps to.
    pub fn corner_image(&self, m: u32, j: u32) -> u32 {
        corner_image(m, self.color, self.rotation, j)
    }

    /// Zero-edge and traversal direction boundary position `j` maps to.
    pub fn boundary_image(&self, m: u32, j: u32) -> (u32, bool) {
        boundary_image(m, self.color, self.rotation, j)
    }
}

pub fn corner_image(m: u32, color: Color, rotation: u32, j: u32) -> u32 {
    match color {
        Color::White => (rotation + j) % m,
        Color::Black => (rotation + m - j % m) % m,
    }
}

pub fn boundary_image(m: u32, color: Color, rotation: u32, j: u32) -> (u32, bool) {
    match color {
        Color::White => ((rotation + j) % m, true),
        Color::Black => ((rotation + 2 * m - j % m - 1) % m, false),
    }
}

/// One level of a tower: a cell decomposition of the sphere.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CellComplex {
    pub level: Level,
    pub m: u32,
    pub vertices: Vec<VertexData>,
    pub edges: Vec<EdgeData>,
    pub tiles: Vec<TileData>,
    /// Tile at the previous level containing each tile. `None` at level 0.
    pub parents: Option<Vec<TileId>>,
    /// Vertices below this id are carried over from the previous level.
    pub first_new_vertex: u32,
    /// Tiles having each vertex as a corner, ascending.
    pub vertex_tiles: Vec<SmallVec<[TileId; 8]>>,
    /// Edges having each vertex as an endpoint, ascending.
    pub vertex_edges: Vec<SmallVec<[EdgeId; 8]>>,
}

/// The level -1 decomposition: one tile (the sphere), nothing else.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct LevelMinusOne;

impl LevelMinusOne {
    pub const TILE_COUNT: usize = 1;
    pub const EDGE_COUNT: usize = 0;
    pub const VERTEX_COUNT: usize = 0;
}

/// Reference to a single cell of one complex.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CellRef {
    Vertex(VertexId),
    Edge(EdgeId),
    Tile(TileId),
}

impl CellComplex {
    /// Builds the level-0 decomposition: the marked curve and its two sides.
    pub fn base_curve(m: u32) -> CellComplex {
        assert!(m >= 3, "a marked curve needs at least 3 points");
        let vertices = (0..m)
            .map(|k| VertexData {
                location: VertexLocation::OnCurve {
                    zero_edge: k,
                    pos: CurvePos::zero(),
                },
                image_vertex: k,
            })
            .collect();
        let edges = (0..m)
            .map(|k| EdgeData {
                endpoints: [VertexId(k), VertexId((k + 1) % m)],
                tiles: [TileId(0), TileId(1)],
                image_edge: k,
                image_forward: true,
                location: EdgeLocation::OnCurve { zero_edge: k },
            })
            .collect();
        let white = TileData {
            boundary: (0..m).map(|k| (EdgeId(k), true)).collect(),
            corners: (0..m).map(VertexId).collect(),
            color: Color::White,
            rotation: 0,
            side: Color::White,
        };
        let black = TileData {
            boundary: (0..m).rev().map(|k| (EdgeId(k), false)).collect(),
            corners: std::iter::once(0)
                .chain((1..m).rev())
                .map(VertexId)
                .collect(),
            color: Color::Black,
            rotation: 0,
            side: Color::Black,
        };
        let mut complex = CellComplex {
            level: 0,
            m,
            vertices,
            edges,
            tiles: vec![white, black],
            parents: None,
            first_new_vertex: 0,
            vertex_tiles: Vec::new(),
            vertex_edges: Vec::new(),
        };
        complex.rebuild_indices();
        complex
    }

    /// Recomputes the vertex incidence indices from edges and tiles.
    pub fn rebuild_indices(&mut self) {
        let n = self.vertices.len();
        let mut vt: Vec<SmallVec<[TileId; 8]>> = vec![SmallVec::new(); n];
        let mut ve: Vec<SmallVec<[EdgeId; 8]>> = vec![SmallVec::new(); n];
        for (t, tile) in self.tiles.iter().enumerate() {
            for &c in &tile.corners {
                vt[c.index()].push(TileId(t as u32));
            }
        }
        for (e, edge) in self.edges.iter().enumerate() {
            for &v in &edge.endpoints {
                ve[v.index()].push(EdgeId(e as u32));
            }
        }
        for list in &mut vt {
            list.sort_unstable();
            list.dedup();
        }
        for list in &mut ve {
            list.sort_unstable();
            list.dedup();
        }
        self.vertex_tiles = vt;
        self.vertex_edges = ve;
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn tile_count(&self) -> usize {
        self.tiles.len()
    }

    pub fn euler_characteristic(&self) -> i64 {
        self.vertices.len() as i64 - self.edges.len() as i64 + self.tiles.len() as i64
    }

    /// Start vertex of a directed boundary entry.
    pub fn edge_start(&self, edge: EdgeId, forward: bool) -> VertexId {
        let e = &self.edges[edge.index()];
        if forward {
            e.endpoints[0]
        } else {
            e.endpoints[1]
        }
    }

    /// End vertex of a directed boundary entry.
    pub fn edge_end(&self, edge: EdgeId, forward: bool) -> VertexId {
        self.edge_start(edge, !forward)
    }

    /// Tiles having `v` as a corner.
    pub fn tiles_at_vertex(&self, v: VertexId) -> &[TileId] {
        &self.vertex_tiles[v.index()]
    }

    /// Whether two distinct tiles of this complex intersect. Closed tiles
    /// meet exactly when they share a corner vertex, because an intersection
    /// of closed cells is a union of shared boundary cells and every
    /// boundary cell has a vertex in its closure.
    pub fn tiles_touch(&self, a: TileId, b: TileId) -> bool {
        if a == b {
            return true;
        }
        let ca = &self.tiles[a.index()].corners;
        let cb = &self.tiles[b.index()].corners;
        ca.iter().any(|v| cb.contains(v))
    }

    /// Position of `v` along zero-edge `k`, if it lies on it. Zero-vertex
    /// `k+1` counts as position 1 of zero-edge `k`.
    pub fn pos_on_zero_edge(&self, v: VertexId, k: u32) -> Option<CurvePos> {
        match self.vertices[v.index()].location {
            VertexLocation::OnCurve { zero_edge, pos } => {
                if zero_edge == k {
                    Some(pos)
                } else if pos.is_zero() && (zero_edge + self.m - 1) % self.m == k {
                    Some(CurvePos::from_integer(1))
                } else {
                    None
                }
            }
            VertexLocation::Interior(_) => None,
        }
    }

    /// Whether a cell is contained in the closed zero-edge `k`. For tiles
    /// this means the tile meets the zero-edge, which happens exactly when
    /// one of its corner vertices lies on it: a tile intersects the curve
    /// only along boundary cells, and every boundary cell containing curve
    /// points has a corner on the same zero-edge.
    pub fn on_zero_edge(&self, cell: CellRef, k: u32) -> Result<bool, QueryError> {
        if k >= self.m {
            return Err(QueryError::ZeroEdgeOutOfRange { index: k, m: self.m });
        }
        match cell {
            CellRef::Vertex(v) => {
                if v.index() >= self.vertices.len() {
                    return Err(QueryError::UnknownVertex {
                        level: self.level,
                        vertex: v.0,
                    });
                }
                Ok(self.pos_on_zero_edge(v, k).is_some())
            }
            CellRef::Edge(e) => {
                if e.index() >= self.edges.len() {
                    return Err(QueryError::UnknownEdge {
                        level: self.level,
                        edge: e.0,
                    });
                }
                Ok(matches!(
                    self.edges[e.index()].location,
                    EdgeLocation::OnCurve { zero_edge } if zero_edge == k
                ))
            }
            CellRef::Tile(t) => {
                if t.index() >= self.tiles.len() {
                    return Err(QueryError::UnknownTile {
                        level: self.level,
                        tile: t.0,
                    });
                }
                Ok(self.tiles[t.index()]
                    .corners
                    .iter()
                    .any(|&v| self.pos_on_zero_edge(v, k).is_some()))
            }
        }
    }
}

// =====================================================================
// Validation
// =====================================================================

/// A structural violation found in a complex. Violations are data, not
/// errors: callers collect and report them.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ComplexViolation {
    EulerCharacteristic { found: i64 },
    EdgeCount { found: usize, expected: u128 },
    TileCount { found: usize, expected: u128 },
    VertexCount { found: usize, max: u128 },
    MGon { tile: TileId, sides: usize },
    CornerCount { tile: TileId, corners: usize },
    RepeatedCorner { tile: TileId },
    OpenBoundary { tile: TileId, position: u32 },
    EdgeEndpointsEqual { edge: EdgeId },
    EdgeTileIncidence { edge: EdgeId, detail: String },
    EdgeTraversal { edge: EdgeId, forward: usize, backward: usize },
    ColorBalance { white: usize, black: usize },
    SideBalance { white: usize, black: usize },
    SideMismatch { detail: String },
    RotationRange { tile: TileId, rotation: u32 },
    CornerImageMismatch { tile: TileId, corner: u32 },
    BoundaryImageMismatch { tile: TileId, position: u32 },
    EdgeImageEndpoints { edge: EdgeId },
    CurveChain { zero_edge: u32, detail: String },
    ZeroVertexId { index: u32 },
    ImageVertexRange { vertex: VertexId, image: u32 },
    IsolatedVertex { vertex: VertexId },
}

impl fmt::Display for ComplexViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        use ComplexViolation::*;
        match self {
            EulerCharacteristic { found } => {
                write!(f, "Euler characteristic is {found}, expected 2")
            }
            EdgeCount { found, expected } => {
                write!(f, "edge count {found} differs from m*d^n = {expected}")
            }
            TileCount { found, expected } => {
                write!(f, "tile count {found} differs from 2*d^n = {expected}")
            }
            VertexCount { found, max } => {
                write!(f, "vertex count {found} exceeds the bound m*d^n = {max}")
            }
            MGon { tile, sides } => {
                write!(f, "m-gon violation: tile {tile} has {sides} boundary edges")
            }
            CornerCount { tile, corners } => {
                write!(f, "m-gon violation: tile {tile} has {corners} corners")
            }
            RepeatedCorner { tile } => {
                write!(f, "tile {tile} repeats a corner vertex")
            }
            OpenBoundary { tile, position } => {
                write!(f, "boundary of tile {tile} does not close at position {position}")
            }
            EdgeEndpointsEqual { edge } => {
                write!(f, "edge {edge} is a loop")
            }
            EdgeTileIncidence { edge, detail } => {
                write!(f, "edge {edge} tile incidence is inconsistent: {detail}")
            }
            EdgeTraversal { edge, forward, backward } => write!(
                f,
                "edge {edge} is traversed {forward} times forward and {backward} backward, \
                 expected once each"
            ),
            ColorBalance { white, black } => {
                write!(f, "tile colors are unbalanced: {white} white, {black} black")
            }
            SideBalance { white, black } => write!(
                f,
                "tile sides are unbalanced: {white} inside the white side, {black} inside \
                 the black side"
            ),
            SideMismatch { detail } => {
                write!(f, "side assignment is inconsistent: {detail}")
            }
            RotationRange { tile, rotation } => {
                write!(f, "tile {tile} has rotation {rotation} outside 0..m")
            }
            CornerImageMismatch { tile, corner } => write!(
                f,
                "corner {corner} of tile {tile} has an image vertex inconsistent with \
                 the tile's color and rotation"
            ),
            BoundaryImageMismatch { tile, position } => write!(
                f,
                "boundary edge {position} of tile {tile} has an image inconsistent with \
                 the tile's color and rotation"
            ),
            EdgeImageEndpoints { edge } => write!(
                f,
                "endpoints of edge {edge} have image vertices inconsistent with the \
                 edge's image zero-edge"
            ),
            CurveChain { zero_edge, detail } => {
                write!(f, "curve cells along zero-edge {zero_edge} are broken: {detail}")
            }
            ZeroVertexId { index } => write!(
                f,
                "zero-vertex {index} is not stored at vertex id {index} with position 0"
            ),
            ImageVertexRange { vertex, image } => {
                write!(f, "vertex {vertex} has image vertex {image} outside 0..m")
            }
            IsolatedVertex { vertex } => {
                write!(f, "vertex {vertex} has fewer than 2 incident edges")
            }
        }
    }
}

/// Checks every structural invariant of one level against the rule degree.
pub fn validate_complex(complex: &CellComplex, degree: u32) -> Vec<ComplexViolation> {
    let mut out = Vec::new();
    let m = complex.m;
    let n = complex.level;
    assert!(n >= 0, "level -1 is implicit and has nothing to validate");

    let dn = (degree as u128).pow(n as u32);
    let expected_edges = m as u128 * dn;
    let expected_tiles = 2 * dn;
    if complex.edge_count() as u128 != expected_edges {
        out.push(ComplexViolation::EdgeCount {
            found: complex.edge_count(),
            expected: expected_edges,
        });
    }
    if complex.tile_count() as u128 != expected_tiles {
        out.push(ComplexViolation::TileCount {
            found: complex.tile_count(),
            expected: expected_tiles,
        });
    }
    if complex.vertex_count() as u128 > m as u128 * dn {
        out.push(ComplexViolation::VertexCount {
            found: complex.vertex_count(),
            max: m as u128 * dn,
        });
    }
    if complex.euler_characteristic() != 2 {
        out.push(ComplexViolation::EulerCharacteristic {
            found: complex.euler_characteristic(),
        });
    }

    // Tiles: m-gons with closed, coherently oriented boundaries.
    let mut forward_uses = vec![0usize; complex.edge_count()];
    let mut backward_uses = vec![0usize; complex.edge_count()];
    let mut white = 0usize;
    let mut black = 0usize;
    let mut side_white = 0usize;
    for (ti, tile) in complex.tiles.iter().enumerate() {
        let t = TileId(ti as u32);
        match tile.color {
            Color::White => white += 1,
            Color::Black => black += 1,
        }
        if tile.side == Color::White {
            side_white += 1;
        }
        if tile.rotation >= m {
            out.push(ComplexViolation::RotationRange {
                tile: t,
                rotation: tile.rotation,
            });
        }
        if tile.boundary.len() != m as usize {
            out.push(ComplexViolation::MGon {
                tile: t,
                sides: tile.boundary.len(),
            });
            continue;
        }
        if tile.corners.len() != m as usize {
            out.push(ComplexViolation::CornerCount {
                tile: t,
                corners: tile.corners.len(),
            });
            continue;
        }
        let mut sorted = tile.corners.clone();
        sorted.sort_unstable();
        sorted.dedup();
        if sorted.len() != tile.corners.len() {
            out.push(ComplexViolation::RepeatedCorner { tile: t });
        }
        for j in 0..m as usize {
            let (e, dir) = tile.boundary[j];
            if dir {
                forward_uses[e.index()] += 1;
            } else {
                backward_uses[e.index()] += 1;
            }
            let start = complex.edge_start(e, dir);
            let end = complex.edge_end(e, dir);
            if start != tile.corners[j] || end != tile.corners[(j + 1) % m as usize] {
                out.push(ComplexViolation::OpenBoundary {
                    tile: t,
                    position: j as u32,
                });
            }
            // The tile's color and rotation predict where this boundary
            // position maps; the edge's own image record must agree.
            let (want_edge, want_dir) = tile.boundary_image(m, j as u32);
            let edge = &complex.edges[e.index()];
            let walked_forward = if dir {
                edge.image_forward
            } else {
                !edge.image_forward
            };
            if edge.image_edge != want_edge || walked_forward != want_dir {
                out.push(ComplexViolation::BoundaryImageMismatch {
                    tile: t,
                    position: j as u32,
                });
            }
        }
        for j in 0..m {
            let v = tile.corners[j as usize];
            if complex.vertices[v.index()].image_vertex != tile.corner_image(m, j) {
                out.push(ComplexViolation::CornerImageMismatch { tile: t, corner: j });
            }
        }
    }
    if white != black {
        out.push(ComplexViolation::ColorBalance { white, black });
    }
    if side_white * 2 != complex.tile_count() {
        out.push(ComplexViolation::SideBalance {
            white: side_white,
            black: complex.tile_count() - side_white,
        });
    }

    // Edges: two distinct tiles, one traversal per side, coherent images.
    for (ei, edge) in complex.edges.iter().enumerate() {
        let e = EdgeId(ei as u32);
        if edge.endpoints[0] == edge.endpoints[1] {
            out.push(ComplexViolation::EdgeEndpointsEqual { edge: e });
        }
        if edge.tiles[0] == edge.tiles[1] {
            out.push(ComplexViolation::EdgeTileIncidence {
                edge: e,
                detail: "both sides claim the same tile".into(),
            });
        }
        for &t in &edge.tiles {
            if t.index() >= complex.tile_count()
                || !complex.tiles[t.index()].boundary.iter().any(|&(be, _)| be == e)
            {
                out.push(ComplexViolation::EdgeTileIncidence {
                    edge: e,
                    detail: format!("tile {t} does not list the edge on its boundary"),
                });
            }
        }
        if forward_uses[ei] != 1 || backward_uses[ei] != 1 {
            out.push(ComplexViolation::EdgeTraversal {
                edge: e,
                forward: forward_uses[ei],
                backward: backward_uses[ei],
            });
        }
        if edge.image_edge >= m {
            out.push(ComplexViolation::EdgeImageEndpoints { edge: e });
            continue;
        }
        let (a, b) = (edge.endpoints[0], edge.endpoints[1]);
        let ia = complex.vertices[a.index()].image_vertex;
        let ib = complex.vertices[b.index()].image_vertex;
        let (want_a, want_b) = if edge.image_forward {
            (edge.image_edge, (edge.image_edge + 1) % m)
        } else {
            ((edge.image_edge + 1) % m, edge.image_edge)
        };
        if ia != want_a || ib != want_b {
            out.push(ComplexViolation::EdgeImageEndpoints { edge: e });
        }
        if edge.tiles.iter().all(|t| t.index() < complex.tile_count()) {
            let s0 = complex.tiles[edge.tiles[0].index()].side;
            let s1 = complex.tiles[edge.tiles[1].index()].side;
            match edge.location {
                EdgeLocation::Interior(side) => {
                    if s0 != side || s1 != side {
                        out.push(ComplexViolation::SideMismatch {
                            detail: format!(
                                "edge {e} is interior to the {side} side but its tiles sit \
                                 in {s0} and {s1}"
                            ),
                        });
                    }
                }
                EdgeLocation::OnCurve { .. } => {
                    if s0 == s1 {
                        out.push(ComplexViolation::SideMismatch {
                            detail: format!(
                                "curve edge {e} has both tiles inside the {s0} side; the \
                                 curve separates sides"
                            ),
                        });
                    }
                }
            }
        }
    }

    // Vertices: image range, degree, canonical zero-vertex ids.
    for (vi, vertex) in complex.vertices.iter().enumerate() {
        let v = VertexId(vi as u32);
        if vertex.image_vertex >= m {
            out.push(ComplexViolation::ImageVertexRange {
                vertex: v,
                image: vertex.image_vertex,
            });
        }
        if complex.vertex_edges[vi].len() < 2 {
            out.push(ComplexViolation::IsolatedVertex { vertex: v });
        }
        if let VertexLocation::Interior(side) = vertex.location {
            for &t in &complex.vertex_tiles[vi] {
                if complex.tiles[t.index()].side != side {
                    out.push(ComplexViolation::SideMismatch {
                        detail: format!(
                            "vertex {v} is interior to the {side} side but is a corner of \
                             tile {t} in the {} side",
                            complex.tiles[t.index()].side
                        ),
                    });
                }
            }
        }
    }
    for k in 0..m {
        let ok = (k as usize) < complex.vertex_count()
            && matches!(
                complex.vertices[k as usize].location,
                VertexLocation::OnCurve { zero_edge, pos } if zero_edge == k && pos.is_zero()
            );
        if !ok {
            out.push(ComplexViolation::ZeroVertexId { index: k });
        }
    }

    // Curve cells along each zero-edge form one chain from zero-vertex k to
    // zero-vertex k+1 with strictly increasing exact positions.
    for k in 0..m {
        if let Err(detail) = check_curve_chain(complex, k) {
            out.push(ComplexViolation::CurveChain { zero_edge: k, detail });
        }
    }

    out
}

/// Walks the curve cells on zero-edge `k` and checks they tile it.
fn check_curve_chain(complex: &CellComplex, k: u32) -> Result<(), String> {
    let mut segments: Vec<(CurvePos, CurvePos, EdgeId)> = Vec::new();
    for (ei, edge) in complex.edges.iter().enumerate() {
        if !matches!(edge.location, EdgeLocation::OnCurve { zero_edge } if zero_edge == k) {
            continue;
        }
        let p0 = complex
            .pos_on_zero_edge(edge.endpoints[0], k)
            .ok_or_else(|| format!("edge {ei} endpoint 0 is not on the zero-edge"))?;
        let p1 = complex
            .pos_on_zero_edge(edge.endpoints[1], k)
            .ok_or_else(|| format!("edge {ei} endpoint 1 is not on the zero-edge"))?;
        if p0 == p1 {
            return Err(format!("edge {ei} has zero extent"));
        }
        let (lo, hi) = if p0 < p1 { (p0, p1) } else { (p1, p0) };
        segments.push((lo, hi, EdgeId(ei as u32)));
    }
    if segments.is_empty() {
        return Err("no curve edges".into());
    }
    segments.sort();
    if !segments[0].0.is_zero() {
        return Err("chain does not start at the zero-vertex".into());
    }
    if segments[segments.len() - 1].1 != CurvePos::from_integer(1) {
        return Err("chain does not end at the next zero-vertex".into());
    }
    for w in segments.windows(2) {
        if w[0].1 != w[1].0 {
            return Err(format!(
                "segments {} and {} do not meet",
                w[0].2, w[1].2
            ));
        }
    }
    // Every vertex recorded on this zero-edge must be one of the chain's
    // division points.
    let mut division_points: Vec<CurvePos> = segments.iter().map(|s| s.0).collect();
    division_points.push(CurvePos::from_integer(1));
    for (vi, vertex) in complex.vertices.iter().enumerate() {
        if let VertexLocation::OnCurve { zero_edge, pos } = vertex.location {
            if zero_edge == k && !division_points.contains(&pos) {
                return Err(format!("vertex {vi} floats off the chain"));
            }
        }
    }
    Ok(())
}
