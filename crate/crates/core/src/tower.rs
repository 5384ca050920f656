//! Towers of cell decompositions built by repeated subdivision.
//!
//! Level n+1 arises from level n by replacing every n-tile with the rule's
//! pattern for the side the tile maps onto, and splitting every n-edge into
//! one child per curve cell of its image zero-edge. Gluing along shared
//! edges never needs deduplication: the children of an n-edge are created
//! once, indexed along the edge's global direction (from its lower-id
//! endpoint), and both incident tiles resolve their boundary cells to the
//! same children by composing directions.
//!
//! Id discipline, which downstream consumers rely on:
//!
//! * Vertices persist: ids below the previous level's vertex count are the
//!   same points, with their image labels advanced one step. New vertices
//!   follow, first edge junctions (by edge id, then position along the
//!   global direction), then tile-interior instances (by tile id, then
//!   pattern vertex id).
//! * Edges and tiles are fresh each level. Edge children of edge `e` come
//!   before all interior edges, in (edge id, global position) order. The
//!   children of tile `t` are exactly ids `t*d .. (t+1)*d`, ordered by
//!   pattern tile id, so a tile's descendants form contiguous id ranges.
//!
//! Towers are immutable once built and safe to share across threads.

use crate::complex::{
    boundary_image, corner_image, CellComplex, Color, CurvePos, EdgeData, EdgeLocation, TileData,
    VertexData, VertexLocation,
};
use crate::error::{BuildError, QueryError};
use crate::ids::{EdgeId, Level, TileId, VertexId, BASE_LEVEL, SPHERE_TILE};
use crate::rule::{periodic_critical_check, validate_rule, SubdivisionRule};
use num_rational::Rational64;
use serde::Serialize;

/// Hard limits for tower construction. Cell counts grow like 2*d^n, so the
/// defaults fail early rather than exhaust memory.
#[derive(Clone, Copy, Debug)]
pub struct BuildOptions {
    pub depth_cap: u32,
    pub cell_cap: u64,
}

impl Default for BuildOptions {
    fn default() -> Self {
        BuildOptions {
            depth_cap: 8,
            cell_cap: 20_000_000,
        }
    }
}

/// Cell counts for one level.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct LevelStats {
    pub level: Level,
    pub vertices: usize,
    pub edges: usize,
    pub tiles: usize,
    /// Wall time spent building the level. Informational only; excluded
    /// from serialized output so reports stay byte-identical across runs.
    #[serde(skip)]
    pub build_micros: u128,
}

/// Upper bound on the total number of cells in a tower of the given depth.
pub fn estimate_cells(rule: &SubdivisionRule, depth: u32) -> u64 {
    let per_level = |n: u32| -> u64 {
        let dn = (rule.degree as u64).saturating_pow(n);
        // V <= m*d^n, E = m*d^n, F = 2*d^n
        dn.saturating_mul(2 * rule.m as u64 + 2)
    };
    (0..=depth).fold(1u64, |acc, n| acc.saturating_add(per_level(n)))
}

/// One curve cell chain: how the pattern subdivides a zero-edge.
#[derive(Debug)]
struct CurveChain {
    /// Pattern edges in position order along the zero-edge; the flag says
    /// whether the edge's stored direction agrees with the forward walk.
    cells: Vec<(EdgeId, bool)>,
    /// Interior division points in position order, with exact positions.
    junctions: Vec<(VertexId, CurvePos)>,
}

impl CurveChain {
    fn segments(&self) -> usize {
        self.cells.len()
    }
    fn junction_rank(&self, pv: VertexId) -> Option<usize> {
        self.junctions.iter().position(|&(v, _)| v == pv).map(|i| i + 1)
    }
    fn cell_rank(&self, pe: EdgeId) -> Option<usize> {
        self.cells.iter().position(|&(e, _)| e == pe)
    }
}

/// Pattern cells of one region, in pattern-id order, with rank lookups.
#[derive(Debug)]
struct RegionIndex {
    tiles: Vec<TileId>,
    vertices: Vec<VertexId>,
    edges: Vec<EdgeId>,
    vertex_rank: Vec<Option<u32>>,
    edge_rank: Vec<Option<u32>>,
}

#[derive(Debug)]
struct PatternIndex {
    chains: Vec<CurveChain>,
    regions: [RegionIndex; 2],
}

fn side_index(c: Color) -> usize {
    match c {
        Color::White => 0,
        Color::Black => 1,
    }
}

impl PatternIndex {
    fn build(rule: &SubdivisionRule) -> PatternIndex {
        let pattern = &rule.pattern;
        let mut chains = Vec::with_capacity(rule.m as usize);
        for kappa in 0..rule.m {
            let mut segs: Vec<(CurvePos, CurvePos, EdgeId, bool)> = Vec::new();
            for (ei, e) in pattern.edges.iter().enumerate() {
                if !matches!(e.location, EdgeLocation::OnCurve { zero_edge } if zero_edge == kappa)
                {
                    continue;
                }
                let p0 = pattern
                    .pos_on_zero_edge(e.endpoints[0], kappa)
                    .expect("validated chain");
                let p1 = pattern
                    .pos_on_zero_edge(e.endpoints[1], kappa)
                    .expect("validated chain");
                let forward = p0 < p1;
                let (lo, hi) = if forward { (p0, p1) } else { (p1, p0) };
                segs.push((lo, hi, EdgeId(ei as u32), forward));
            }
            segs.sort();
            let cells = segs.iter().map(|&(_, _, e, fwd)| (e, fwd)).collect();
            let junctions = segs
                .iter()
                .skip(1)
                .map(|&(lo, _, e, fwd)| {
                    let edge = &pattern.edges[e.index()];
                    let v = if fwd { edge.endpoints[0] } else { edge.endpoints[1] };
                    (v, lo)
                })
                .collect();
            chains.push(CurveChain { cells, junctions });
        }

        let regions = [Color::White, Color::Black].map(|side| {
            let tiles = rule.tiles_in_region(side);
            let vertices: Vec<VertexId> = (0..pattern.vertex_count() as u32)
                .map(VertexId)
                .filter(|v| {
                    matches!(pattern.vertices[v.index()].location,
                             VertexLocation::Interior(c) if c == side)
                })
                .collect();
            let edges: Vec<EdgeId> = (0..pattern.edge_count() as u32)
                .map(EdgeId)
                .filter(|e| {
                    matches!(pattern.edges[e.index()].location,
                             EdgeLocation::Interior(c) if c == side)
                })
                .collect();
            let mut vertex_rank = vec![None; pattern.vertex_count()];
            for (r, v) in vertices.iter().enumerate() {
                vertex_rank[v.index()] = Some(r as u32);
            }
            let mut edge_rank = vec![None; pattern.edge_count()];
            for (r, e) in edges.iter().enumerate() {
                edge_rank[e.index()] = Some(r as u32);
            }
            RegionIndex {
                tiles,
                vertices,
                edges,
                vertex_rank,
                edge_rank,
            }
        });

        PatternIndex { chains, regions }
    }
}

/// A rule together with the materialized levels of its tower. Level -1 (the
/// sphere as a single tile) is implicit; `levels[n]` is level n.
#[derive(Debug)]
pub struct Tower {
    rule: SubdivisionRule,
    index: PatternIndex,
    levels: Vec<CellComplex>,
    stats: Vec<LevelStats>,
}

/// Builds a tower to the requested depth, validating the rule, refusing
/// rules with periodic critical points, and enforcing the caps.
pub fn build_tower(
    rule: SubdivisionRule,
    depth: u32,
    options: &BuildOptions,
) -> Result<Tower, BuildError> {
    let report = validate_rule(&rule);
    if !report.is_valid() {
        return Err(BuildError::InvalidRule(report.to_string()));
    }
    let crit = periodic_critical_check(&rule);
    if crit.has_periodic_critical {
        let vertex = (0..rule.m)
            .find(|&q| {
                if crit.local_degrees[q as usize] < 2 {
                    return false;
                }
                let mut current = rule.post_vertex_map[q as usize];
                for _ in 0..rule.m {
                    if current == q {
                        return true;
                    }
                    current = rule.post_vertex_map[current as usize];
                }
                false
            })
            .expect("a periodic critical verdict names a zero-vertex");
        return Err(BuildError::PeriodicCritical {
            rule: rule.name.clone(),
            vertex,
        });
    }
    if depth > options.depth_cap {
        return Err(BuildError::DepthCapExceeded {
            requested: depth,
            cap: options.depth_cap,
        });
    }
    let estimate = estimate_cells(&rule, depth);
    if estimate > options.cell_cap {
        return Err(BuildError::CellCapExceeded {
            estimate,
            cap: options.cell_cap,
        });
    }

    let index = PatternIndex::build(&rule);
    let base = CellComplex::base_curve(rule.m);
    let mut tower = Tower {
        stats: vec![
            LevelStats {
                level: -1,
                vertices: 0,
                edges: 0,
                tiles: 1,
                build_micros: 0,
            },
            LevelStats {
                level: 0,
                vertices: base.vertex_count(),
                edges: base.edge_count(),
                tiles: base.tile_count(),
                build_micros: 0,
            },
        ],
        levels: vec![base],
        rule,
        index,
    };
    for _ in 0..depth {
        tower.subdivide_once()?;
    }
    Ok(tower)
}

impl Tower {
    pub fn rule(&self) -> &SubdivisionRule {
        &self.rule
    }

    /// Deepest built level.
    pub fn depth(&self) -> Level {
        self.levels.len() as Level - 1
    }

    pub fn levels(&self) -> &[CellComplex] {
        &self.levels
    }

    pub fn stats(&self) -> &[LevelStats] {
        &self.stats
    }

    pub fn level(&self, n: Level) -> Result<&CellComplex, QueryError> {
        if n < 0 || n > self.depth() {
            return Err(QueryError::LevelOutOfRange {
                level: n,
                depth: self.depth(),
            });
        }
        Ok(&self.levels[n as usize])
    }

    /// Number of tiles at a level, including the implicit level -1.
    pub fn tile_count_at(&self, n: Level) -> Result<usize, QueryError> {
        if n == BASE_LEVEL {
            return Ok(1);
        }
        Ok(self.level(n)?.tile_count())
    }

    /// Level at which a vertex id first exists.
    pub fn creation_level(&self, v: VertexId) -> Option<Level> {
        (0..self.levels.len()).find(|&n| v.index() < self.levels[n].vertex_count())
            .map(|n| n as Level)
    }

    /// All k-tiles whose closure contains the point `v`. For k at or above
    /// the vertex's creation level these are the tiles with `v` as a
    /// corner; below it, a k-tile contains the point exactly when one of
    /// its children does, so the parent map transports the answer down.
    pub fn tiles_containing(&self, v: VertexId, k: Level) -> Result<Vec<TileId>, QueryError> {
        if k < BASE_LEVEL || k > self.depth() {
            return Err(QueryError::LevelOutOfRange {
                level: k,
                depth: self.depth(),
            });
        }
        let created = self.creation_level(v).ok_or(QueryError::UnknownVertex {
            level: self.depth(),
            vertex: v.0,
        })?;
        if k == BASE_LEVEL {
            return Ok(vec![SPHERE_TILE]);
        }
        if k >= created {
            return Ok(self.levels[k as usize].tiles_at_vertex(v).to_vec());
        }
        let mut tiles: Vec<TileId> = self.levels[created as usize].tiles_at_vertex(v).to_vec();
        let mut level = created;
        while level > k {
            let parents = self.levels[level as usize]
                .parents
                .as_ref()
                .expect("levels above 0 record parents");
            let mut up: Vec<TileId> = tiles.iter().map(|t| parents[t.index()]).collect();
            up.sort_unstable();
            up.dedup();
            tiles = up;
            level -= 1;
        }
        Ok(tiles)
    }

    /// Extends the tower one level.
    pub fn subdivide_once(&mut self) -> Result<(), BuildError> {
        let started = std::time::Instant::now();
        let prev = self.levels.last().expect("towers always hold level 0");
        let next = subdivide(&self.rule, &self.index, prev)?;
        self.stats.push(LevelStats {
            level: next.level,
            vertices: next.vertex_count(),
            edges: next.edge_count(),
            tiles: next.tile_count(),
            build_micros: started.elapsed().as_micros(),
        });
        self.levels.push(next);
        Ok(())
    }
}

/// Produces level n+1 from level n.
fn subdivide(
    rule: &SubdivisionRule,
    index: &PatternIndex,
    prev: &CellComplex,
) -> Result<CellComplex, BuildError> {
    let pattern = &rule.pattern;
    let m = rule.m;
    let d = rule.degree as usize;
    let level = prev.level + 1;
    let v_old = prev.vertex_count() as u32;

    // Id layout for the new level.
    let mut junction_base = vec![0u32; prev.edge_count()];
    let mut child_edge_base = vec![0u32; prev.edge_count()];
    let mut next_vertex = v_old;
    let mut next_edge = 0u32;
    for (ei, e) in prev.edges.iter().enumerate() {
        let s = index.chains[e.image_edge as usize].segments() as u32;
        junction_base[ei] = next_vertex;
        next_vertex += s - 1;
        child_edge_base[ei] = next_edge;
        next_edge += s;
    }
    let mut interior_vertex_base = vec![0u32; prev.tile_count()];
    let mut interior_edge_base = vec![0u32; prev.tile_count()];
    for (ti, t) in prev.tiles.iter().enumerate() {
        let region = &index.regions[side_index(t.color)];
        interior_vertex_base[ti] = next_vertex;
        next_vertex += region.vertices.len() as u32;
        interior_edge_base[ti] = next_edge;
        next_edge += region.edges.len() as u32;
    }

    // Carried-over vertices keep their ids and locations; their image
    // labels advance one step along the zero-vertex map.
    let sigma = &rule.post_vertex_map;
    let mut vertices: Vec<VertexData> = prev
        .vertices
        .iter()
        .map(|v| VertexData {
            location: v.location,
            image_vertex: sigma[v.image_vertex as usize],
        })
        .collect();

    // Phase A vertices: junction points subdividing each edge. A new point
    // maps under the level-n iterate to a pattern junction pv, so its label
    // is pv's image. On-curve positions interpolate the edge's endpoint
    // positions exactly.
    for e in prev.edges.iter() {
        let chain = &index.chains[e.image_edge as usize];
        let s = chain.segments();
        let g_forward = e.endpoints[0] < e.endpoints[1];
        let img_fwd_g = g_forward == e.image_forward;
        for g in 1..s {
            let jq = if img_fwd_g { g } else { s - g };
            let (pv, q) = chain.junctions[jq - 1];
            let image_vertex = pattern.vertices[pv.index()].image_vertex;
            let location = match e.location {
                EdgeLocation::OnCurve { zero_edge } => {
                    let p0 = prev
                        .pos_on_zero_edge(e.endpoints[0], zero_edge)
                        .expect("curve edge endpoints lie on its zero-edge");
                    let p1 = prev
                        .pos_on_zero_edge(e.endpoints[1], zero_edge)
                        .expect("curve edge endpoints lie on its zero-edge");
                    let frac = if e.image_forward {
                        q
                    } else {
                        Rational64::from_integer(1) - q
                    };
                    VertexLocation::OnCurve {
                        zero_edge,
                        pos: p0 + (p1 - p0) * frac,
                    }
                }
                EdgeLocation::Interior(c) => VertexLocation::Interior(c),
            };
            vertices.push(VertexData {
                location,
                image_vertex,
            });
        }
    }

    // Phase B vertices: interior instances per tile, in pattern-id order.
    for t in prev.tiles.iter() {
        let region = &index.regions[side_index(t.color)];
        for pv in &region.vertices {
            vertices.push(VertexData {
                location: VertexLocation::Interior(t.side),
                image_vertex: pattern.vertices[pv.index()].image_vertex,
            });
        }
    }
    debug_assert_eq!(vertices.len() as u32, next_vertex);

    // Phase A edges: children of each edge, in global order. A child maps
    // under the level-n iterate onto one pattern curve cell; composing the
    // walk directions gives its image direction.
    let unset = TileId(u32::MAX);
    let mut edges: Vec<EdgeData> = Vec::with_capacity(next_edge as usize);
    for (ei, e) in prev.edges.iter().enumerate() {
        let chain = &index.chains[e.image_edge as usize];
        let s = chain.segments();
        let g_forward = e.endpoints[0] < e.endpoints[1];
        let img_fwd_g = g_forward == e.image_forward;
        let (lo, hi) = if g_forward {
            (e.endpoints[0], e.endpoints[1])
        } else {
            (e.endpoints[1], e.endpoints[0])
        };
        let point = |g: usize| -> VertexId {
            if g == 0 {
                lo
            } else if g == s {
                hi
            } else {
                VertexId(junction_base[ei] + (g - 1) as u32)
            }
        };
        for g in 0..s {
            let c = if img_fwd_g { g } else { s - 1 - g };
            let (pe, d_c) = chain.cells[c];
            let pat = &pattern.edges[pe.index()];
            let crosses_forward = img_fwd_g == d_c;
            edges.push(EdgeData {
                endpoints: [point(g), point(g + 1)],
                tiles: [unset, unset],
                image_edge: pat.image_edge,
                image_forward: crosses_forward == pat.image_forward,
                location: e.location,
            });
        }
    }

    // Phase B edges: interior instances per tile.
    for (ti, t) in prev.tiles.iter().enumerate() {
        let region = &index.regions[side_index(t.color)];
        for pe in &region.edges {
            let pat = &pattern.edges[pe.index()];
            let endpoints = [
                resolve_vertex(rule, index, prev, ti, t, pat.endpoints[0], &junction_base,
                               &interior_vertex_base)?,
                resolve_vertex(rule, index, prev, ti, t, pat.endpoints[1], &junction_base,
                               &interior_vertex_base)?,
            ];
            edges.push(EdgeData {
                endpoints,
                tiles: [unset, unset],
                image_edge: pat.image_edge,
                image_forward: pat.image_forward,
                location: EdgeLocation::Interior(t.side),
            });
        }
    }
    debug_assert_eq!(edges.len() as u32, next_edge);

    // Phase B tiles: one pattern copy per tile, children ordered by pattern
    // tile id. The instance copies the pattern tile's boundary order, so
    // its color and rotation carry over verbatim.
    let mut tiles: Vec<TileData> = Vec::with_capacity(prev.tile_count() * d);
    let mut parents: Vec<TileId> = Vec::with_capacity(prev.tile_count() * d);
    for (ti, t) in prev.tiles.iter().enumerate() {
        let region = &index.regions[side_index(t.color)];
        if region.tiles.len() != d {
            return Err(BuildError::GluingMismatch {
                level,
                detail: format!(
                    "pattern region {} has {} tiles, expected the degree {d}",
                    t.color,
                    region.tiles.len()
                ),
            });
        }
        for &p in &region.tiles {
            let pat_tile = &pattern.tiles[p.index()];
            let mut boundary = crate::complex::Boundary::new();
            for &(pe, dir_p) in &pat_tile.boundary {
                boundary.push(resolve_edge(
                    rule, index, prev, ti, t, pe, dir_p, &child_edge_base, &interior_edge_base,
                )?);
            }
            let mut corners = crate::complex::Corners::new();
            for &pv in &pat_tile.corners {
                corners.push(resolve_vertex(
                    rule, index, prev, ti, t, pv, &junction_base, &interior_vertex_base,
                )?);
            }
            tiles.push(TileData {
                boundary,
                corners,
                color: pat_tile.color,
                rotation: pat_tile.rotation,
                side: t.side,
            });
            parents.push(TileId(ti as u32));
        }
    }

    // Phase C: every new edge is walked exactly once in each direction;
    // record the two claimants as its tiles.
    let mut forward_claim: Vec<Option<TileId>> = vec![None; edges.len()];
    let mut backward_claim: Vec<Option<TileId>> = vec![None; edges.len()];
    for (ti, tile) in tiles.iter().enumerate() {
        for &(e, dir) in &tile.boundary {
            let slot = if dir {
                &mut forward_claim[e.index()]
            } else {
                &mut backward_claim[e.index()]
            };
            if let Some(other) = slot {
                return Err(BuildError::GluingMismatch {
                    level,
                    detail: format!(
                        "edge {e} is walked {} twice, by tiles {other} and {ti}",
                        if dir { "forward" } else { "backward" }
                    ),
                });
            }
            *slot = Some(TileId(ti as u32));
        }
    }
    for (ei, edge) in edges.iter_mut().enumerate() {
        match (forward_claim[ei], backward_claim[ei]) {
            (Some(f), Some(b)) => edge.tiles = [f, b],
            _ => {
                return Err(BuildError::GluingMismatch {
                    level,
                    detail: format!("edge {ei} is missing a side"),
                })
            }
        }
    }

    let mut next = CellComplex {
        level,
        m,
        vertices,
        edges,
        tiles,
        parents: Some(parents),
        first_new_vertex: v_old,
        vertex_tiles: Vec::new(),
        vertex_edges: Vec::new(),
    };
    next.rebuild_indices();

    // Bug trap: a freshly built level must satisfy every structural
    // invariant. Violations here are construction defects, not user error.
    let violations = crate::complex::validate_complex(&next, rule.degree);
    if let Some(first) = violations.first() {
        return Err(BuildError::GluingMismatch {
            level,
            detail: format!("{first} ({} violations total)", violations.len()),
        });
    }

    Ok(next)
}

/// Maps a pattern vertex to its instance in tile `ti` of the previous
/// level. Interior vertices are fresh per tile; curve vertices resolve into
/// the subdivision of the tile's boundary through the tile's color and
/// rotation.
#[allow(clippy::too_many_arguments)]
fn resolve_vertex(
    rule: &SubdivisionRule,
    index: &PatternIndex,
    prev: &CellComplex,
    ti: usize,
    t: &TileData,
    pv: VertexId,
    junction_base: &[u32],
    interior_vertex_base: &[u32],
) -> Result<VertexId, BuildError> {
    let pattern = &rule.pattern;
    let m = rule.m;
    match pattern.vertices[pv.index()].location {
        VertexLocation::Interior(_) => {
            let region = &index.regions[side_index(t.color)];
            let rank = region.vertex_rank[pv.index()].ok_or_else(|| BuildError::GluingMismatch {
                level: prev.level + 1,
                detail: format!(
                    "pattern vertex {pv} is interior to the wrong side for a {} tile",
                    t.color
                ),
            })?;
            Ok(VertexId(interior_vertex_base[ti] + rank))
        }
        VertexLocation::OnCurve { zero_edge: kappa, pos } if pos == CurvePos::from_integer(0) => {
            // Zero-vertex kappa: the corner of the tile that maps to it.
            let j = corner_slot(m, t.color, t.rotation, kappa);
            Ok(t.corners[j as usize])
        }
        VertexLocation::OnCurve { zero_edge: kappa, .. } => {
            // A junction on zero-edge kappa: find the boundary edge of the
            // tile mapping onto kappa, then the junction's global index.
            let chain = &index.chains[kappa as usize];
            let jq = chain.junction_rank(pv).ok_or_else(|| BuildError::GluingMismatch {
                level: prev.level + 1,
                detail: format!("pattern vertex {pv} is not a division point of zero-edge {kappa}"),
            })?;
            let j = boundary_slot(m, t.color, t.rotation, kappa);
            let (e_j, _) = t.boundary[j as usize];
            let e = &prev.edges[e_j.index()];
            let g_forward = e.endpoints[0] < e.endpoints[1];
            let img_fwd_g = g_forward == e.image_forward;
            let s = chain.segments();
            let g = if img_fwd_g { jq } else { s - jq };
            Ok(VertexId(junction_base[e_j.index()] + (g - 1) as u32))
        }
    }
}

/// Maps a pattern boundary entry (edge + direction as the pattern tile
/// walks it) to the instance edge and walk direction in tile `ti`.
#[allow(clippy::too_many_arguments)]
fn resolve_edge(
    rule: &SubdivisionRule,
    index: &PatternIndex,
    prev: &CellComplex,
    ti: usize,
    t: &TileData,
    pe: EdgeId,
    dir_p: bool,
    child_edge_base: &[u32],
    interior_edge_base: &[u32],
) -> Result<(EdgeId, bool), BuildError> {
    let pattern = &rule.pattern;
    let m = rule.m;
    match pattern.edges[pe.index()].location {
        EdgeLocation::Interior(_) => {
            let region = &index.regions[side_index(t.color)];
            let rank = region.edge_rank[pe.index()].ok_or_else(|| BuildError::GluingMismatch {
                level: prev.level + 1,
                detail: format!(
                    "pattern edge {pe} is interior to the wrong side for a {} tile",
                    t.color
                ),
            })?;
            Ok((EdgeId(interior_edge_base[ti] + rank), dir_p))
        }
        EdgeLocation::OnCurve { zero_edge: kappa } => {
            let chain = &index.chains[kappa as usize];
            let c = chain.cell_rank(pe).ok_or_else(|| BuildError::GluingMismatch {
                level: prev.level + 1,
                detail: format!("pattern edge {pe} is not a curve cell of zero-edge {kappa}"),
            })?;
            let d_c = chain.cells[c].1;
            let j = boundary_slot(m, t.color, t.rotation, kappa);
            let (e_j, _) = t.boundary[j as usize];
            let e = &prev.edges[e_j.index()];
            let g_forward = e.endpoints[0] < e.endpoints[1];
            let img_fwd_g = g_forward == e.image_forward;
            let s = chain.segments();
            let g = if img_fwd_g { c } else { s - 1 - c };
            // The pattern walk crosses the zero-edge forward iff its
            // direction agrees with the chain cell's; the child edge's
            // stored order crosses forward iff the global direction does.
            let walk = (dir_p == d_c) == img_fwd_g;
            Ok((EdgeId(child_edge_base[e_j.index()] + g as u32), walk))
        }
    }
}

/// Boundary position of the tile whose walk maps onto zero-edge `kappa`.
fn boundary_slot(m: u32, color: Color, rotation: u32, kappa: u32) -> u32 {
    let j = match color {
        Color::White => (kappa + m - rotation) % m,
        Color::Black => (rotation + 2 * m - kappa - 1) % m,
    };
    debug_assert_eq!(boundary_image(m, color, rotation, j).0, kappa);
    j
}

/// Corner position of the tile mapping to zero-vertex `kappa`.
fn corner_slot(m: u32, color: Color, rotation: u32, kappa: u32) -> u32 {
    let j = match color {
        Color::White => (kappa + m - rotation) % m,
        Color::Black => (rotation + m - kappa) % m,
    };
    debug_assert_eq!(corner_image(m, color, rotation, j), kappa);
    j
}
