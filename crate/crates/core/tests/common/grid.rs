//! Coordinate model of the k x k pillow.
//!
//! The pillow is two closed unit squares, front and back, glued along
//! their boundaries point-for-point. A level-n tile is one of the N x N
//! closed subsquares of a face, N = k^n. The map sends the subsquare
//! (a, b) of a face onto a full face by x -> kx - a (a even) or
//! (a+1) - kx (a odd), and likewise in y; it lands on the same face when
//! the two folds cancel ((a+b) even) and on the opposite face otherwise.
//!
//! All geometry is exact rational arithmetic. Tile intersection, membership
//! of boundary points, distances, and joining numbers are computed from
//! closed-set geometry alone.

use num_rational::Rational64;
use std::collections::VecDeque;

pub type Q = Rational64;

pub fn q(num: i64, den: i64) -> Q {
    Q::new(num, den)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Face {
    Front,
    Back,
}

impl Face {
    pub fn opposite(self) -> Face {
        match self {
            Face::Front => Face::Back,
            Face::Back => Face::Front,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GridTile {
    pub level: i32,
    pub face: Face,
    pub i: i64,
    pub j: i64,
}

/// A point of the pillow. Boundary points are stored face-normalized
/// (Front), so equality is point equality on the glued surface.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct GridPoint {
    pub face: Face,
    pub x: Q,
    pub y: Q,
}

impl GridPoint {
    pub fn new(face: Face, x: Q, y: Q) -> GridPoint {
        let zero = Q::from_integer(0);
        let one = Q::from_integer(1);
        assert!(x >= zero && x <= one && y >= zero && y <= one);
        let on_boundary = x == zero || x == one || y == zero || y == one;
        GridPoint {
            face: if on_boundary { Face::Front } else { face },
            x,
            y,
        }
    }

    pub fn on_boundary(&self) -> bool {
        let zero = Q::from_integer(0);
        let one = Q::from_integer(1);
        self.x == zero || self.x == one || self.y == zero || self.y == one
    }

    /// Boundary parameter in [0, 4): bottom t = x, right t = 1 + y,
    /// top t = 3 - x, left t = 4 - y; corners take the smaller parameter.
    pub fn boundary_param(&self) -> Option<Q> {
        let zero = Q::from_integer(0);
        let one = Q::from_integer(1);
        if self.y == zero {
            Some(self.x)
        } else if self.x == one {
            Some(Q::from_integer(1) + self.y)
        } else if self.y == one {
            Some(Q::from_integer(3) - self.x)
        } else if self.x == zero {
            Some(Q::from_integer(4) - self.y)
        } else {
            None
        }
    }
}

/// The four pillow corners, in zero-vertex id order.
pub fn corner_point(id: usize) -> GridPoint {
    let zero = Q::from_integer(0);
    let one = Q::from_integer(1);
    let (x, y) = match id {
        0 => (zero, zero),
        1 => (one, zero),
        2 => (one, one),
        3 => (zero, one),
        _ => panic!("corner id {id} out of range"),
    };
    GridPoint::new(Face::Front, x, y)
}

#[derive(Clone, Copy, Debug)]
pub struct GridModel {
    pub k: i64,
}

impl GridModel {
    pub fn new(k: i64) -> GridModel {
        assert!(k >= 2);
        GridModel { k }
    }

    pub fn side(&self, level: i32) -> i64 {
        self.k.pow(level as u32)
    }

    /// All tiles of a level: front face row-major, then back face.
    pub fn tiles(&self, level: i32) -> Vec<GridTile> {
        let n = self.side(level);
        let mut out = Vec::with_capacity((2 * n * n) as usize);
        for face in [Face::Front, Face::Back] {
            for j in 0..n {
                for i in 0..n {
                    out.push(GridTile { level, face, i, j });
                }
            }
        }
        out
    }

    pub fn x_range(&self, t: &GridTile) -> (Q, Q) {
        let n = self.side(t.level);
        (q(t.i, n), q(t.i + 1, n))
    }

    pub fn y_range(&self, t: &GridTile) -> (Q, Q) {
        let n = self.side(t.level);
        (q(t.j, n), q(t.j + 1, n))
    }

    /// The tile's trace on the glued boundary, as closed arcs in the
    /// parameter circle R/4 (arcs stored inside [0, 4], 4 = 0).
    pub fn boundary_arcs(&self, t: &GridTile) -> Vec<(Q, Q)> {
        let n = self.side(t.level);
        let mut arcs = Vec::new();
        let four = Q::from_integer(4);
        let three = Q::from_integer(3);
        let one = Q::from_integer(1);
        if t.j == 0 {
            arcs.push((q(t.i, n), q(t.i + 1, n)));
        }
        if t.i == n - 1 {
            arcs.push((one + q(t.j, n), one + q(t.j + 1, n)));
        }
        if t.j == n - 1 {
            arcs.push((three - q(t.i + 1, n), three - q(t.i, n)));
        }
        if t.i == 0 {
            arcs.push((four - q(t.j + 1, n), four - q(t.j, n)));
        }
        arcs
    }

    /// Closed-set intersection of two tiles (any levels).
    pub fn intersects(&self, a: &GridTile, b: &GridTile) -> bool {
        if a.face == b.face {
            let (alo, ahi) = self.x_range(a);
            let (blo, bhi) = self.x_range(b);
            if alo.max(blo) > ahi.min(bhi) {
                return false;
            }
            let (alo, ahi) = self.y_range(a);
            let (blo, bhi) = self.y_range(b);
            alo.max(blo) <= ahi.min(bhi)
        } else {
            let arcs_a = self.boundary_arcs(a);
            let arcs_b = self.boundary_arcs(b);
            arcs_a
                .iter()
                .any(|x| arcs_b.iter().any(|y| arcs_overlap_mod4(*x, *y)))
        }
    }

    /// Whether the closed tile meets zero-edge e (the closed side arc
    /// [e, e+1] of the boundary circle).
    pub fn meets_zero_edge(&self, t: &GridTile, e: usize) -> bool {
        assert!(e < 4);
        let side = (Q::from_integer(e as i64), Q::from_integer(e as i64 + 1));
        self.boundary_arcs(t)
            .iter()
            .any(|a| arcs_overlap_mod4(*a, side))
    }

    /// Whether the closed tile contains the point.
    pub fn contains_point(&self, t: &GridTile, p: &GridPoint) -> bool {
        if t.face != p.face && !p.on_boundary() {
            return false;
        }
        let (xlo, xhi) = self.x_range(t);
        let (ylo, yhi) = self.y_range(t);
        if t.face == p.face && xlo <= p.x && p.x <= xhi && ylo <= p.y && p.y <= yhi {
            return true;
        }
        if p.on_boundary() {
            let tp = p.boundary_param().unwrap();
            return self
                .boundary_arcs(t)
                .iter()
                .any(|a| arcs_overlap_mod4(*a, (tp, tp)));
        }
        false
    }

    pub fn tiles_containing_point(&self, p: &GridPoint, level: i32) -> Vec<GridTile> {
        self.tiles(level)
            .into_iter()
            .filter(|t| self.contains_point(t, p))
            .collect()
    }

    /// Least level with a disjoint tile pair covering the two points, or
    /// None when no such level <= depth exists.
    pub fn m_points(&self, p: &GridPoint, r: &GridPoint, depth: i32) -> Option<i32> {
        assert_ne!(p, r, "m is infinite for equal points");
        (0..=depth).find(|&n| {
            let a = self.tiles_containing_point(p, n);
            let b = self.tiles_containing_point(r, n);
            a.iter()
                .any(|x| b.iter().any(|y| !self.intersects(x, y)))
        })
    }

    /// Greatest level <= depth with a nondisjoint covering pair; None when
    /// the scan is inconclusive (still nondisjoint at full depth).
    pub fn m_prime_points(&self, p: &GridPoint, r: &GridPoint, depth: i32) -> Option<i32> {
        assert_ne!(p, r);
        for n in (0..=depth).rev() {
            let a = self.tiles_containing_point(p, n);
            let b = self.tiles_containing_point(r, n);
            let hit = a.iter().any(|x| b.iter().any(|y| self.intersects(x, y)));
            if hit {
                return if n == depth { None } else { Some(n) };
            }
        }
        unreachable!("level-0 tiles always intersect");
    }

    /// Vertex-counted length of a shortest same-level tile chain joining
    /// zero-edge `e` to zero-edge `e2` (sources count 1), with one witness.
    pub fn join_distance(&self, level: i32, e: usize, e2: usize) -> (usize, Vec<GridTile>) {
        let tiles = self.tiles(level);
        let mut dist = vec![usize::MAX; tiles.len()];
        let mut pred = vec![usize::MAX; tiles.len()];
        let mut queue = VecDeque::new();
        for (ti, t) in tiles.iter().enumerate() {
            if self.meets_zero_edge(t, e) {
                dist[ti] = 1;
                queue.push_back(ti);
            }
        }
        while let Some(ti) = queue.pop_front() {
            if self.meets_zero_edge(&tiles[ti], e2) {
                let mut chain = vec![tiles[ti]];
                let mut cur = ti;
                while pred[cur] != usize::MAX {
                    cur = pred[cur];
                    chain.push(tiles[cur]);
                }
                chain.reverse();
                return (dist[ti], chain);
            }
            for (ui, u) in tiles.iter().enumerate() {
                if dist[ui] == usize::MAX && self.intersects(&tiles[ti], u) {
                    dist[ui] = dist[ti] + 1;
                    pred[ui] = ti;
                    queue.push_back(ui);
                }
            }
        }
        panic!("the pillow is connected; a joining chain always exists");
    }

    /// D_n by BFS: minimum over the two disjoint zero-edge pairs.
    pub fn dn(&self, level: i32) -> usize {
        let (a, _) = self.join_distance(level, 0, 2);
        let (b, _) = self.join_distance(level, 1, 3);
        a.min(b)
    }

    /// All nodes of the tile graph truncated at `depth`: the sphere is
    /// None, tiles are Some.
    pub fn graph_nodes(&self, depth: i32) -> Vec<Option<GridTile>> {
        let mut nodes = vec![None];
        for n in 0..=depth {
            nodes.extend(self.tiles(n).into_iter().map(Some));
        }
        nodes
    }

    pub fn graph_adjacent(&self, a: &Option<GridTile>, b: &Option<GridTile>) -> bool {
        match (a, b) {
            (None, None) => false,
            (None, Some(t)) | (Some(t), None) => t.level == 0,
            (Some(x), Some(y)) => {
                x != y && (x.level - y.level).abs() <= 1 && self.intersects(x, y)
            }
        }
    }

    /// All-pairs BFS distances on the truncated tile graph.
    pub fn graph_distances(&self, depth: i32) -> (Vec<Option<GridTile>>, Vec<Vec<u32>>) {
        let nodes = self.graph_nodes(depth);
        let adj: Vec<Vec<usize>> = nodes
            .iter()
            .map(|a| {
                nodes
                    .iter()
                    .enumerate()
                    .filter(|(_, b)| self.graph_adjacent(a, b))
                    .map(|(i, _)| i)
                    .collect()
            })
            .collect();
        let mut all = Vec::with_capacity(nodes.len());
        for s in 0..nodes.len() {
            let mut dist = vec![u32::MAX; nodes.len()];
            dist[s] = 0;
            let mut queue = VecDeque::from([s]);
            while let Some(u) = queue.pop_front() {
                for &v in &adj[u] {
                    if dist[v] == u32::MAX {
                        dist[v] = dist[u] + 1;
                        queue.push_back(v);
                    }
                }
            }
            all.push(dist);
        }
        (nodes, all)
    }
}

/// Closed-arc overlap on the circle R/4, arcs given inside [0, 4].
fn arcs_overlap_mod4(a: (Q, Q), b: (Q, Q)) -> bool {
    let four = Q::from_integer(4);
    for shift in [-four, Q::from_integer(0), four] {
        if (a.0).max(b.0 + shift) <= (a.1).min(b.1 + shift) {
            return true;
        }
    }
    false
}

/// Replay of the engine's child ordering in coordinates. The chart of a
/// tile is the affine map phi(x, y) = (sx*N*x + tx, sy*N*y + ty) carrying
/// it onto the unit square of `image`; the engine's child at rank r is the
/// chart preimage of the image face's level-1 subsquare (r mod k, r div k).
#[derive(Clone, Debug)]
pub struct ReplayTile {
    pub tile: GridTile,
    pub image: Face,
    pub sx: i64,
    pub sy: i64,
    pub tx: Q,
    pub ty: Q,
}

impl GridModel {
    /// Charts for the two 0-tiles, in engine tile-id order (0 = front =
    /// white, 1 = back = black).
    pub fn roots(&self) -> [ReplayTile; 2] {
        [Face::Front, Face::Back].map(|face| ReplayTile {
            tile: GridTile {
                level: 0,
                face,
                i: 0,
                j: 0,
            },
            image: face,
            sx: 1,
            sy: 1,
            tx: Q::from_integer(0),
            ty: Q::from_integer(0),
        })
    }

    pub fn replay_child(&self, t: &ReplayTile, rank: usize) -> ReplayTile {
        let k = self.k;
        assert!((rank as i64) < k * k);
        let a = rank as i64 % k;
        let b = rank as i64 / k;
        let n = self.side(t.tile.level);
        let n_next = n * k;

        // chart preimage of the image subsquare [a/k,(a+1)/k] x [b/k,(b+1)/k]
        let inv = |lo: Q, hi: Q, s: i64, tr: Q| -> i64 {
            let u = (lo - tr) / Q::from_integer(s * n);
            let v = (hi - tr) / Q::from_integer(s * n);
            let cell = u.min(v) * Q::from_integer(n_next);
            assert!(cell.is_integer(), "chart preimage must be a grid cell");
            cell.to_integer()
        };
        let i = inv(q(a, k), q(a + 1, k), t.sx, t.tx);
        let j = inv(q(b, k), q(b + 1, k), t.sy, t.ty);
        assert!((0..n_next).contains(&i) && (0..n_next).contains(&j));

        // compose the fold x -> kx - a (a even) / (a+1) - kx (a odd)
        let (sx, tx) = if a % 2 == 0 {
            (t.sx, Q::from_integer(k) * t.tx - Q::from_integer(a))
        } else {
            (-t.sx, Q::from_integer(a + 1) - Q::from_integer(k) * t.tx)
        };
        let (sy, ty) = if b % 2 == 0 {
            (t.sy, Q::from_integer(k) * t.ty - Q::from_integer(b))
        } else {
            (-t.sy, Q::from_integer(b + 1) - Q::from_integer(k) * t.ty)
        };
        let image = if (a + b) % 2 == 0 {
            t.image
        } else {
            t.image.opposite()
        };
        ReplayTile {
            tile: GridTile {
                level: t.tile.level + 1,
                face: t.tile.face,
                i,
                j,
            },
            image,
            sx,
            sy,
            tx,
            ty,
        }
    }

    /// Oracle position of the engine tile with the given id at `level`,
    /// decoding the id as a base-d rank path from its 0-tile ancestor.
    pub fn replay_engine_id(&self, id: usize, level: i32) -> ReplayTile {
        let d = (self.k * self.k) as usize;
        let mut ranks = Vec::with_capacity(level as usize);
        let mut rest = id;
        for _ in 0..level {
            ranks.push(rest % d);
            rest /= d;
        }
        ranks.reverse();
        assert!(rest < 2, "tile id {id} out of range at level {level}");
        let mut t = self.roots()[rest].clone();
        for r in ranks {
            t = self.replay_child(&t, r);
        }
        t
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn chart_preimages_tile_the_face() {
        let g = GridModel::new(2);
        let mut seen = std::collections::HashSet::new();
        for id in 0..32 {
            let r = g.replay_engine_id(id, 2);
            assert!(seen.insert(r.tile));
        }
        assert_eq!(seen.len(), 32);
    }

    #[test]
    fn arc_overlap_wraps() {
        let a = (q(15, 4), Q::from_integer(4));
        let b = (Q::from_integer(0), q(1, 4));
        assert!(arcs_overlap_mod4(a, b));
        let c = (q(1, 2), Q::from_integer(1));
        assert!(!arcs_overlap_mod4(a, c));
    }
}
