//! Point-level separation quantities and the visual quasi-metric.
//!
//! Points are tower vertices: the computable dense subset of the sphere.
//! For two points, m is the least level at which disjoint tiles contain
//! them and m' the greatest level at which nondisjoint tiles still do;
//! the quasi-metric is rho(x,y) = lambda^{-m(x,y)}. Tile diameters under
//! rho, evaluated over deepest-level vertices, give the per-level profile
//! whose flatness is the testable form of the visual-metric bound
//! diam ~ lambda^{-level}.
//!
//! Depth-limited scans distinguish a conclusive answer from an
//! inconclusive one instead of guessing.

use crate::error::QueryError;
use crate::graph::{TileGraph, TileNode};
use crate::halfint::Half;
use crate::ids::{Level, TileId, VertexId};
use crate::tower::Tower;
use serde::Serialize;
use std::io;

/// A point of the sphere, named by the vertex that realizes it.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct PointRef {
    pub vertex: VertexId,
    /// Level at which the vertex first appears; it persists with the
    /// same id at every deeper level.
    pub created: Level,
}

impl PointRef {
    pub fn new(tower: &Tower, vertex: VertexId) -> Result<PointRef, QueryError> {
        let created = tower
            .creation_level(vertex)
            .ok_or(QueryError::UnknownVertex {
                level: tower.depth(),
                vertex: vertex.0,
            })?;
        Ok(PointRef { vertex, created })
    }
}

/// Outcome of a depth-limited separation scan.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum PointSeparation {
    Level(Level),
    /// Equal points never separate.
    Infinite,
    /// The scan exhausted the built depth without an answer.
    Inconclusive,
}

impl PointSeparation {
    pub fn level(&self) -> Option<Level> {
        match self {
            PointSeparation::Level(n) => Some(*n),
            _ => None,
        }
    }
}

/// Least level n at which some n-tile containing x is disjoint from some
/// n-tile containing y; infinite for equal points, inconclusive when no
/// disjoint pair appears by the built depth.
pub fn m_points(
    tower: &Tower,
    x: PointRef,
    y: PointRef,
) -> Result<PointSeparation, QueryError> {
    if x.vertex == y.vertex {
        return Ok(PointSeparation::Infinite);
    }
    for n in 0..=tower.depth() {
        if has_disjoint_pair(tower, x, y, n)? {
            return Ok(PointSeparation::Level(n));
        }
    }
    Ok(PointSeparation::Inconclusive)
}

/// Greatest level n at which some n-tile containing x still intersects
/// some n-tile containing y. Undefined for equal points. Nondisjoint
/// pairs at level n imply them at n - 1 (parents), so the first hit of a
/// descending scan is the maximum; a hit at the built depth itself is
/// inconclusive, since deeper levels remain unseen.
pub fn m_prime_points(
    tower: &Tower,
    x: PointRef,
    y: PointRef,
) -> Result<PointSeparation, QueryError> {
    if x.vertex == y.vertex {
        return Err(QueryError::SamePoint);
    }
    for n in (0..=tower.depth()).rev() {
        if has_touching_pair(tower, x, y, n)? {
            return Ok(if n == tower.depth() {
                PointSeparation::Inconclusive
            } else {
                PointSeparation::Level(n)
            });
        }
    }
    unreachable!("the two 0-tiles intersect and cover every point");
}

fn has_disjoint_pair(tower: &Tower, x: PointRef, y: PointRef, n: Level) -> Result<bool, QueryError> {
    let complex = tower.level(n)?;
    let tx = tower.tiles_containing(x.vertex, n)?;
    let ty = tower.tiles_containing(y.vertex, n)?;
    Ok(tx
        .iter()
        .any(|&a| ty.iter().any(|&b| !complex.tiles_touch(a, b))))
}

fn has_touching_pair(tower: &Tower, x: PointRef, y: PointRef, n: Level) -> Result<bool, QueryError> {
    let complex = tower.level(n)?;
    let tx = tower.tiles_containing(x.vertex, n)?;
    let ty = tower.tiles_containing(y.vertex, n)?;
    Ok(tx
        .iter()
        .any(|&a| ty.iter().any(|&b| complex.tiles_touch(a, b))))
}

/// The descending chain of lowest-id tiles containing the point, one per
/// level 0..=depth. Lowest ids are automatically nested: child ids are
/// grouped by parent, so the lowest-id container at each level is a child
/// of the previous one.
pub fn canonical_ray(tower: &Tower, x: PointRef) -> Result<Vec<TileId>, QueryError> {
    let mut ray = Vec::with_capacity(tower.depth() as usize + 1);
    for n in 0..=tower.depth() {
        let tile = tower
            .tiles_containing(x.vertex, n)?
            .into_iter()
            .min()
            .expect("every point lies in some tile");
        if let Some(&prev) = ray.last() {
            debug_assert_eq!(
                TileId(tile.0 / tower.rule().degree),
                prev,
                "canonical ray must descend through parents"
            );
        }
        ray.push(tile);
    }
    Ok(ray)
}

/// Gromov products along the canonical rays of two points, with the
/// point separation for comparison: for distinct points the products
/// stabilize near m, for equal points they grow without bound.
#[derive(Clone, Debug, Serialize)]
pub struct RayComparison {
    pub products: Vec<(Level, Half)>,
    pub separation: PointSeparation,
}

pub fn ray_products(
    graph: &TileGraph<'_>,
    x: PointRef,
    y: PointRef,
) -> Result<RayComparison, QueryError> {
    let tower = graph.tower();
    let rx = canonical_ray(tower, x)?;
    let ry = canonical_ray(tower, y)?;
    let mut products = Vec::with_capacity(rx.len());
    for (i, (&a, &b)) in rx.iter().zip(&ry).enumerate() {
        let level = i as Level;
        products.push((
            level,
            graph.gromov_product(TileNode::new(level, a), TileNode::new(level, b))?,
        ));
    }
    Ok(RayComparison {
        products,
        separation: if x.vertex == y.vertex {
            PointSeparation::Infinite
        } else {
            m_points(tower, x, y)?
        },
    })
}

/// One level of the diameter profile.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct ProfileRow {
    pub level: Level,
    pub tiles: u64,
    /// Tiles whose diameter scan was conclusive.
    pub conclusive: u64,
    /// min over conclusive tiles of lambda^level * diam_rho; absent when
    /// any tile is inconclusive (its true value lies below the cutoff).
    pub min: Option<f64>,
    /// max over tiles of the same quantity; inconclusive tiles cannot
    /// raise it, so it is absent only when every tile is inconclusive.
    pub max: Option<f64>,
}

/// Per-level extremes of lambda^level * diam_rho over n-tiles.
#[derive(Clone, Debug, Serialize)]
pub struct VisualProfile {
    pub lambda: f64,
    pub depth: Level,
    pub rows: Vec<ProfileRow>,
}

/// Ratio of the global max to the global min over rows `from..=to`;
/// None when some row in the range lacks a conclusive extreme.
pub fn band_ratio(profile: &VisualProfile, from: Level, to: Level) -> Option<f64> {
    let rows: Vec<&ProfileRow> = profile
        .rows
        .iter()
        .filter(|r| r.level >= from && r.level <= to)
        .collect();
    if rows.is_empty() {
        return None;
    }
    let mut lo = f64::INFINITY;
    let mut hi = 0.0f64;
    for row in rows {
        lo = lo.min(row.min?);
        hi = hi.max(row.max?);
    }
    Some(hi / lo)
}

/// Evaluates diam_rho(tile) = max over pairs of the tile's deepest-level
/// vertices of lambda^{-m(x,y)} for every tile of every level, reporting
/// per-level extremes of lambda^level * diam_rho. The pair maximum is
/// realized by the pair minimizing m, so each tile needs one least-level
/// disjoint-pair scan over the tiles its vertex set touches, not a scan
/// of all vertex pairs.
pub fn charvisual_profile(tower: &Tower, lambda: f64) -> Result<VisualProfile, QueryError> {
    if lambda <= 1.0 {
        return Err(QueryError::ScaleNotExpanding { lambda });
    }
    if tower.depth() < 2 {
        return Err(QueryError::DepthTooShallow {
            required: 2,
            depth: tower.depth(),
        });
    }
    let depth = tower.depth();
    let d = tower.rule().degree as u64;
    let mut rows = Vec::new();
    for level in 0..=depth {
        let tile_count = tower.tile_count_at(level)?;
        let span = d.pow((depth - level) as u32);
        let mut row = ProfileRow {
            level,
            tiles: tile_count as u64,
            conclusive: 0,
            min: None,
            max: None,
        };
        let mut any_inconclusive = false;
        let mut lo = f64::INFINITY;
        let mut hi = 0.0f64;
        for tile in 0..tile_count {
            let vertices = deep_vertex_set(tower, TileId(tile as u32), span);
            match least_disjoint_level(tower, &vertices)? {
                Some(m) => {
                    let value = lambda.powi(level) * lambda.powi(-m);
                    row.conclusive += 1;
                    lo = lo.min(value);
                    hi = hi.max(value);
                }
                None => any_inconclusive = true,
            }
        }
        if row.conclusive > 0 {
            row.max = Some(hi);
            if !any_inconclusive {
                row.min = Some(lo);
            }
        }
        rows.push(row);
    }
    Ok(VisualProfile {
        lambda,
        depth,
        rows,
    })
}

/// The deepest-level vertices lying in the closed tile: the corners of
/// its deepest-level descendants, which form a contiguous id block.
fn deep_vertex_set(tower: &Tower, tile: TileId, span: u64) -> Vec<VertexId> {
    let complex = tower.level(tower.depth()).expect("depth is built");
    let first = tile.0 as u64 * span;
    let mut vertices: Vec<VertexId> = (first..first + span)
        .flat_map(|t| complex.tiles[t as usize].corners.iter().copied())
        .collect();
    vertices.sort_unstable();
    vertices.dedup();
    vertices
}

/// Least n such that two disjoint n-tiles each contain one of the given
/// points: the minimum of m over all pairs from the set. None when even
/// the built depth shows no disjoint pair.
fn least_disjoint_level(tower: &Tower, vertices: &[VertexId]) -> Result<Option<Level>, QueryError> {
    for n in 0..=tower.depth() {
        let complex = tower.level(n)?;
        let mut containers: Vec<TileId> = Vec::new();
        for &v in vertices {
            containers.extend(tower.tiles_containing(v, n)?);
        }
        containers.sort_unstable();
        containers.dedup();
        let disjoint = containers
            .iter()
            .enumerate()
            .any(|(i, &a)| containers[i + 1..].iter().any(|&b| !complex.tiles_touch(a, b)));
        if disjoint {
            return Ok(Some(n));
        }
    }
    Ok(None)
}

/// CSV rendering of the profile: level, tiles, conclusive, min, max.
pub fn write_profile_csv(profile: &VisualProfile, out: &mut impl io::Write) -> io::Result<()> {
    writeln!(out, "level,tiles,conclusive,min,max")?;
    for row in &profile.rows {
        let fmt = |v: Option<f64>| v.map_or(String::new(), |v| v.to_string());
        writeln!(
            out,
            "{},{},{},{},{}",
            row.level,
            row.tiles,
            row.conclusive,
            fmt(row.min),
            fmt(row.max)
        )?;
    }
    Ok(())
}
