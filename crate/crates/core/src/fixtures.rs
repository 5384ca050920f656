//! Hand-built example rules used by the test suite.
//!
//! Both rules live on a triangular pillow: two triangles glued along a
//! curve with three marked points. They exercise the m = 3 code paths
//! (joining opposite sides means meeting all three zero-edges) and the
//! periodic-critical gate, which the square pillows never trigger.

use crate::rule::{
    rule_from_document, BoundaryDoc, Direction, EdgeDoc, LocationDoc, RuleDoc, SubdivisionRule,
    TileDoc, VertexDoc,
};
use crate::complex::Color;

use Color::{Black, White};
use Direction::{Backward, Forward};

fn on_curve(edge_index: u32, num: i64, den: i64) -> LocationDoc {
    LocationDoc::OnCurve {
        edge_index,
        position_num: Some(num),
        position_den: Some(den),
    }
}

fn curve_edge(edge_index: u32) -> LocationDoc {
    LocationDoc::OnCurve {
        edge_index,
        position_num: None,
        position_den: None,
    }
}

fn vertex(id: u32, image_vertex: u32, location: LocationDoc) -> VertexDoc {
    VertexDoc {
        id,
        image_vertex,
        location,
    }
}

#[allow(clippy::too_many_arguments)]
fn edge(
    id: u32,
    endpoints: [u32; 2],
    tiles: [u32; 2],
    image_edge: u32,
    image_direction: Direction,
    location: LocationDoc,
) -> EdgeDoc {
    EdgeDoc {
        id,
        endpoints,
        tiles,
        image_edge,
        image_direction,
        location,
    }
}

fn tile(id: u32, region: Color, color: Color, rotation: u32, boundary: [(u32, Direction); 3]) -> TileDoc {
    TileDoc {
        id,
        region,
        color,
        rotation,
        boundary: boundary
            .into_iter()
            .map(|(edge, direction)| BoundaryDoc { edge, direction })
            .collect(),
    }
}

/// Midpoint subdivision of the triangular pillow, degree 4: each face is
/// cut along its three edge midpoints into four triangles. The midpoint of
/// zero-edge k maps to the zero-vertex opposite it, the corners stay fixed,
/// and the three midpoints are the critical points (local degree 3 once the
/// back face doubles their edge count). No critical point is periodic.
pub fn triangle_midpoint_rule() -> SubdivisionRule {
    let doc = RuleDoc {
        name: "tri-midpoint".into(),
        m: 3,
        degree: 4,
        vertices: vec![
            vertex(0, 0, on_curve(0, 0, 1)),
            vertex(1, 1, on_curve(1, 0, 1)),
            vertex(2, 2, on_curve(2, 0, 1)),
            vertex(3, 2, on_curve(0, 1, 2)),
            vertex(4, 0, on_curve(1, 1, 2)),
            vertex(5, 1, on_curve(2, 1, 2)),
        ],
        edges: vec![
            edge(0, [0, 3], [0, 4], 2, Backward, curve_edge(0)),
            edge(1, [3, 1], [1, 5], 1, Backward, curve_edge(0)),
            edge(2, [1, 4], [1, 5], 0, Backward, curve_edge(1)),
            edge(3, [4, 2], [2, 6], 2, Backward, curve_edge(1)),
            edge(4, [2, 5], [2, 6], 1, Backward, curve_edge(2)),
            edge(5, [5, 0], [0, 4], 0, Backward, curve_edge(2)),
            edge(6, [3, 4], [3, 1], 2, Forward, LocationDoc::Interior(White)),
            edge(7, [4, 5], [3, 2], 0, Forward, LocationDoc::Interior(White)),
            edge(8, [5, 3], [3, 0], 1, Forward, LocationDoc::Interior(White)),
            edge(9, [3, 4], [5, 7], 2, Forward, LocationDoc::Interior(Black)),
            edge(10, [4, 5], [6, 7], 0, Forward, LocationDoc::Interior(Black)),
            edge(11, [5, 3], [4, 7], 1, Forward, LocationDoc::Interior(Black)),
        ],
        tiles: vec![
            tile(0, White, Black, 0, [(0, Forward), (8, Backward), (5, Forward)]),
            tile(1, White, Black, 1, [(2, Forward), (6, Backward), (1, Forward)]),
            tile(2, White, Black, 2, [(4, Forward), (7, Backward), (3, Forward)]),
            tile(3, White, White, 2, [(6, Forward), (7, Forward), (8, Forward)]),
            tile(4, Black, White, 0, [(5, Backward), (11, Forward), (0, Backward)]),
            tile(5, Black, White, 1, [(1, Backward), (9, Forward), (2, Backward)]),
            tile(6, Black, White, 2, [(3, Backward), (10, Forward), (4, Backward)]),
            tile(7, Black, Black, 2, [(11, Backward), (10, Backward), (9, Backward)]),
        ],
        zero_vertices: vec![0, 1, 2],
        post_vertex_map: vec![0, 1, 2],
    };
    rule_from_document(&doc).expect("fixture is well-formed")
}

/// Degree-2 rule on the triangular pillow with a periodic critical point:
/// each face is cut once from zero-vertex 0 to a new point on zero-edge 1,
/// making vertex 0 critical; the zero-vertex map fixes 0. The rule passes
/// validation but the tower builder must refuse it.
pub fn triangle_doubling_rule() -> SubdivisionRule {
    let doc = RuleDoc {
        name: "tri-doubling".into(),
        m: 3,
        degree: 2,
        vertices: vec![
            vertex(0, 0, on_curve(0, 0, 1)),
            vertex(1, 1, on_curve(1, 0, 1)),
            vertex(2, 1, on_curve(2, 0, 1)),
            vertex(3, 2, on_curve(1, 1, 2)),
        ],
        edges: vec![
            edge(0, [0, 1], [0, 2], 0, Forward, curve_edge(0)),
            edge(1, [1, 3], [0, 2], 1, Forward, curve_edge(1)),
            edge(2, [3, 2], [1, 3], 1, Backward, curve_edge(1)),
            edge(3, [2, 0], [1, 3], 0, Backward, curve_edge(2)),
            edge(4, [0, 3], [1, 0], 2, Backward, LocationDoc::Interior(White)),
            edge(5, [0, 3], [2, 3], 2, Backward, LocationDoc::Interior(Black)),
        ],
        tiles: vec![
            tile(0, White, White, 0, [(0, Forward), (1, Forward), (4, Backward)]),
            tile(1, White, Black, 0, [(4, Forward), (2, Forward), (3, Forward)]),
            tile(2, Black, Black, 0, [(5, Forward), (1, Backward), (0, Backward)]),
            tile(3, Black, White, 0, [(3, Backward), (2, Backward), (5, Backward)]),
        ],
        zero_vertices: vec![0, 1, 2],
        post_vertex_map: vec![0, 1, 1],
    };
    rule_from_document(&doc).expect("fixture is well-formed")
}
