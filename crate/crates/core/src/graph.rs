//! The tile graph and its metric geometry.
//!
//! Vertices are the tiles of every built level plus the sphere at level
//! -1; edges join distinct intersecting tiles whose levels differ by at
//! most one. On top of the path metric the module computes Gromov
//! products against the sphere base point, the two-tile quantity m, and
//! observed defects for hyperbolicity and the upper curvature inequality.
//!
//! Everything is exact except the curvature defect (whose log-term is
//! irrational). Products are half-integers; distances are integers; m is
//! a level or infinity, with depth-limited scans reporting themselves
//! inconclusive rather than guessing.

use crate::bitset::BitSet;
use crate::complex::CellComplex;
use crate::error::QueryError;
use crate::halfint::Half;
use crate::ids::{Level, TileId, BASE_LEVEL, SPHERE_TILE};
use crate::tower::Tower;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use std::collections::HashMap;
use std::io;
use std::sync::{Arc, Mutex};

/// One vertex of the tile graph.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct TileNode {
    pub level: Level,
    pub tile: TileId,
}

impl TileNode {
    pub const SPHERE: TileNode = TileNode {
        level: BASE_LEVEL,
        tile: SPHERE_TILE,
    };

    pub fn new(level: Level, tile: TileId) -> TileNode {
        TileNode { level, tile }
    }
}

impl std::fmt::Display for TileNode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "L{}:T{}", self.level, self.tile.0)
    }
}

/// The deepest level at which tiles touching X and tiles touching Y still
/// intersect.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum MBar {
    Level(Level),
    /// X and Y themselves intersect.
    Infinite,
}

/// Result of the m scan for a pair of nodes.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum MGraph {
    Conclusive {
        /// min of the two levels and the deepest touching level.
        m: Level,
        m_bar: MBar,
        /// Intersecting pair of touching tiles at the deepest level, when
        /// the deepest level is finite.
        witness: Option<(TileNode, TileNode)>,
    },
    /// Touching tiles still intersect at the built depth for a disjoint
    /// pair, so the true deepest level is unknown.
    Inconclusive {
        m_bar_at_least: Level,
        witness: (TileNode, TileNode),
    },
}

impl MGraph {
    pub fn value(&self) -> Option<Level> {
        match self {
            MGraph::Conclusive { m, .. } => Some(*m),
            MGraph::Inconclusive { .. } => None,
        }
    }
}

/// How to draw triples for the hyperbolicity defect.
#[derive(Clone, Copy, Debug, Serialize)]
pub enum TripleSampler {
    /// Every unordered pair with every middle node, levels <= cap.
    Exhaustive { cap: Level },
    /// `count` uniform triples from the truncated node set.
    Seeded { cap: Level, count: u64, seed: u64 },
}

#[derive(Clone, Copy, Debug, Serialize)]
pub enum PairSampler {
    Exhaustive { cap: Level },
    Seeded { cap: Level, count: u64, seed: u64 },
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct DefectReport {
    pub cap: Level,
    pub triples: u64,
    /// Observed delta: max over triples of min of the two outer products
    /// minus the direct product, floored at zero.
    pub delta: Half,
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct SandwichReport {
    pub cap: Level,
    pub conclusive_pairs: u64,
    pub inconclusive_pairs: u64,
    /// max of m(X,Y) - (X,Y); at most 1 when the sandwich holds.
    pub lower_defect: Half,
    /// max of (X,Y) - m(X,Y); the observed upper constant.
    pub upper_defect: Half,
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct AcuReport {
    pub kappa: f64,
    pub chains: u64,
    /// Smallest c making the chain inequality hold over the sample.
    pub c_observed: f64,
}

/// Node indexing and adjacency lists for the graph truncated at a level.
#[derive(Debug)]
pub struct Truncation {
    pub cap: Level,
    /// First node index of each level 0..=cap (the sphere is index 0).
    offsets: Vec<usize>,
    pub node_count: usize,
    /// Sorted neighbor lists per node index.
    pub adjacency: Vec<Vec<u32>>,
}

impl Truncation {
    pub fn index_of(&self, node: TileNode) -> usize {
        if node.level == BASE_LEVEL {
            0
        } else {
            self.offsets[node.level as usize] + node.tile.index()
        }
    }

    pub fn node_at(&self, index: usize) -> TileNode {
        if index == 0 {
            return TileNode::SPHERE;
        }
        let level = match self.offsets.partition_point(|&o| o <= index) {
            p => p as Level - 1,
        };
        TileNode::new(level, TileId((index - self.offsets[level as usize]) as u32))
    }
}

/// All-pairs distances on a truncation.
#[derive(Debug)]
pub struct DistanceMatrix {
    nodes: usize,
    data: Vec<u16>,
}

impl DistanceMatrix {
    pub fn get(&self, a: usize, b: usize) -> u32 {
        self.data[a * self.nodes + b] as u32
    }
}

/// The tile graph over an immutable tower. Adjacency, distances, and
/// touch sets are computed on demand and memoized behind locks, so shared
/// references can be queried from several threads.
pub struct TileGraph<'a> {
    tower: &'a Tower,
    truncations: Mutex<HashMap<Level, Arc<Truncation>>>,
    matrices: Mutex<HashMap<Level, Arc<DistanceMatrix>>>,
    /// Same-level adjacency rows per level (tile -> bitset of neighbors).
    rows: Mutex<HashMap<Level, Arc<Vec<BitSet>>>>,
    /// Per node: touch sets at levels node.level..=depth.
    ladders: Mutex<HashMap<TileNode, Arc<Vec<BitSet>>>>,
    /// Same, expanded by one adjacency step at each level.
    expanded: Mutex<HashMap<TileNode, Arc<Vec<BitSet>>>>,
}

impl<'a> TileGraph<'a> {
    pub fn new(tower: &'a Tower) -> TileGraph<'a> {
        TileGraph {
            tower,
            truncations: Mutex::new(HashMap::new()),
            matrices: Mutex::new(HashMap::new()),
            rows: Mutex::new(HashMap::new()),
            ladders: Mutex::new(HashMap::new()),
            expanded: Mutex::new(HashMap::new()),
        }
    }

    pub fn tower(&self) -> &Tower {
        self.tower
    }

    pub fn depth(&self) -> Level {
        self.tower.depth()
    }

    fn check_node(&self, node: TileNode) -> Result<(), QueryError> {
        if node.level < BASE_LEVEL || node.level > self.depth() {
            return Err(QueryError::LevelOutOfRange {
                level: node.level,
                depth: self.depth(),
            });
        }
        let count = self.tower.tile_count_at(node.level)?;
        if node.tile.index() >= count {
            return Err(QueryError::UnknownTile {
                level: node.level,
                tile: node.tile.0,
            });
        }
        Ok(())
    }

    fn complex(&self, level: Level) -> &CellComplex {
        self.tower.level(level).expect("level checked")
    }

    /// Closed-intersection test for two arbitrary nodes.
    fn tiles_intersect(&self, x: TileNode, y: TileNode) -> bool {
        if x.level == BASE_LEVEL || y.level == BASE_LEVEL {
            return true;
        }
        if x.level == y.level {
            return x.tile == y.tile || self.complex(x.level).tiles_touch(x.tile, y.tile);
        }
        let (deep, shallow) = if x.level > y.level { (x, y) } else { (y, x) };
        self.complex(deep.level).tiles[deep.tile.index()]
            .corners
            .iter()
            .any(|&v| {
                self.tower
                    .tiles_containing(v, shallow.level)
                    .expect("levels checked")
                    .contains(&shallow.tile)
            })
    }

    /// Graph adjacency: distinct tiles at most one level apart that
    /// intersect.
    pub fn adjacent(&self, x: TileNode, y: TileNode) -> Result<bool, QueryError> {
        self.check_node(x)?;
        self.check_node(y)?;
        if x == y || (x.level - y.level).abs() > 1 {
            return Ok(false);
        }
        Ok(self.tiles_intersect(x, y))
    }

    /// Adjacency lists for all nodes at levels -1..=cap.
    pub fn truncation(&self, cap: Level) -> Result<Arc<Truncation>, QueryError> {
        if cap < BASE_LEVEL || cap > self.depth() {
            return Err(QueryError::LevelOutOfRange {
                level: cap,
                depth: self.depth(),
            });
        }
        if let Some(t) = self.truncations.lock().unwrap().get(&cap) {
            return Ok(Arc::clone(t));
        }
        let t = Arc::new(self.build_truncation(cap));
        self.truncations
            .lock()
            .unwrap()
            .entry(cap)
            .or_insert_with(|| Arc::clone(&t));
        Ok(t)
    }

    fn build_truncation(&self, cap: Level) -> Truncation {
        let mut offsets = Vec::new();
        let mut node_count = 1usize;
        for level in 0..=cap {
            offsets.push(node_count);
            node_count += self.complex(level).tile_count();
        }
        let mut adjacency: Vec<Vec<u32>> = vec![Vec::new(); node_count];
        for level in 0..=cap {
            let complex = self.complex(level);
            let base = offsets[level as usize];
            for tile in 0..complex.tile_count() {
                let this = (base + tile) as u32;
                // same level: shared corner vertex
                for &v in &complex.tiles[tile].corners {
                    for &other in complex.tiles_at_vertex(v) {
                        if other.index() != tile {
                            adjacency[this as usize].push((base + other.index()) as u32);
                        }
                    }
                }
                // one level up: every coarser tile meeting this one
                if level == 0 {
                    adjacency[this as usize].push(0);
                    adjacency[0].push(this);
                } else {
                    let up_base = offsets[level as usize - 1];
                    let mut ups: Vec<TileId> = complex.tiles[tile]
                        .corners
                        .iter()
                        .flat_map(|&v| {
                            self.tower
                                .tiles_containing(v, level - 1)
                                .expect("level in range")
                        })
                        .collect();
                    ups.sort_unstable();
                    ups.dedup();
                    for up in ups {
                        adjacency[this as usize].push((up_base + up.index()) as u32);
                        adjacency[up_base + up.index()].push(this);
                    }
                }
            }
        }
        for list in &mut adjacency {
            list.sort_unstable();
            list.dedup();
        }
        Truncation {
            cap,
            offsets,
            node_count,
            adjacency,
        }
    }

    /// All-pairs BFS distances over the truncation at `cap`.
    pub fn distances(&self, cap: Level) -> Result<Arc<DistanceMatrix>, QueryError> {
        if let Some(m) = self.matrices.lock().unwrap().get(&cap) {
            return Ok(Arc::clone(m));
        }
        let t = self.truncation(cap)?;
        let n = t.node_count;
        let mut data = vec![u16::MAX; n * n];
        let mut queue = std::collections::VecDeque::new();
        for s in 0..n {
            let row = &mut data[s * n..(s + 1) * n];
            row[s] = 0;
            queue.push_back(s);
            while let Some(u) = queue.pop_front() {
                let du = row[u];
                for &v in &t.adjacency[u] {
                    if row[v as usize] == u16::MAX {
                        row[v as usize] = du + 1;
                        queue.push_back(v as usize);
                    }
                }
            }
        }
        let m = Arc::new(DistanceMatrix { nodes: n, data });
        self.matrices
            .lock()
            .unwrap()
            .entry(cap)
            .or_insert_with(|| Arc::clone(&m));
        Ok(m)
    }

    /// Path distance in the graph restricted to levels <= max of the two
    /// node levels. The restriction is exact: any deeper node on a path
    /// can be replaced by its parent without lengthening the path.
    pub fn path_distance(&self, x: TileNode, y: TileNode) -> Result<u32, QueryError> {
        self.check_node(x)?;
        self.check_node(y)?;
        let cap = x.level.max(y.level).max(BASE_LEVEL);
        self.bfs_distance(x, y, cap)
    }

    /// BFS distance inside the truncation at an explicit cap, used to
    /// validate the restriction against the full built graph.
    pub fn bfs_distance(&self, x: TileNode, y: TileNode, cap: Level) -> Result<u32, QueryError> {
        self.check_node(x)?;
        self.check_node(y)?;
        if x.level > cap || y.level > cap {
            return Err(QueryError::LevelOutOfRange {
                level: cap,
                depth: self.depth(),
            });
        }
        let t = self.truncation(cap)?;
        let (source, target) = (t.index_of(x), t.index_of(y));
        if source == target {
            return Ok(0);
        }
        let mut dist = vec![u32::MAX; t.node_count];
        dist[source] = 0;
        let mut queue = std::collections::VecDeque::from([source]);
        while let Some(u) = queue.pop_front() {
            if u == target {
                return Ok(dist[u]);
            }
            for &v in &t.adjacency[u] {
                if dist[v as usize] == u32::MAX {
                    dist[v as usize] = dist[u] + 1;
                    queue.push_back(v as usize);
                }
            }
        }
        unreachable!("the tile graph is connected through the parent chain")
    }

    /// Gromov product with the sphere as base point, as an exact
    /// half-integer.
    pub fn gromov_product(&self, x: TileNode, y: TileNode) -> Result<Half, QueryError> {
        let eta = self.path_distance(x, y)? as i64;
        Ok(Half(
            x.level as i64 + y.level as i64 - eta + 2,
        ))
    }

    fn product_from_distance(x: TileNode, y: TileNode, eta: u32) -> Half {
        Half(x.level as i64 + y.level as i64 - eta as i64 + 2)
    }

    /// Same-level adjacency rows (neighbors only, self excluded).
    fn level_rows(&self, level: Level) -> Arc<Vec<BitSet>> {
        if let Some(r) = self.rows.lock().unwrap().get(&level) {
            return Arc::clone(r);
        }
        let complex = self.complex(level);
        let count = complex.tile_count();
        let mut rows = vec![BitSet::new(count); count];
        for v in 0..complex.vertex_count() {
            let tiles = complex.tiles_at_vertex(crate::ids::VertexId(v as u32));
            for &a in tiles {
                for &b in tiles {
                    if a != b {
                        rows[a.index()].insert(b.index());
                    }
                }
            }
        }
        let rows = Arc::new(rows);
        self.rows
            .lock()
            .unwrap()
            .entry(level)
            .or_insert_with(|| Arc::clone(&rows));
        rows
    }

    /// Whether the tile at (level, tile) intersects the shallower node.
    fn deep_touches(&self, level: Level, tile: TileId, shallow: TileNode) -> bool {
        self.complex(level).tiles[tile.index()]
            .corners
            .iter()
            .any(|&v| {
                self.tower
                    .tiles_containing(v, shallow.level)
                    .expect("level in range")
                    .contains(&shallow.tile)
            })
    }

    /// Touch sets of a node at levels node.level..=depth: entry k - level
    /// is the bitset of k-tiles whose closure meets the node. Level k+1
    /// touchers are always children of level-k touchers.
    fn touch_ladder(&self, node: TileNode) -> Arc<Vec<BitSet>> {
        debug_assert!(node.level >= 0);
        if let Some(l) = self.ladders.lock().unwrap().get(&node) {
            return Arc::clone(l);
        }
        let depth = self.depth();
        let d = self.tower.rule().degree as usize;
        let mut ladder = Vec::with_capacity((depth - node.level + 1) as usize);
        let rows = self.level_rows(node.level);
        let mut base = rows[node.tile.index()].clone();
        base.insert(node.tile.index());
        ladder.push(base);
        for k in node.level..depth {
            let next_count = self.complex(k + 1).tile_count();
            let mut next = BitSet::new(next_count);
            let current: &BitSet = ladder.last().unwrap();
            for z in current.iter() {
                for c in (z * d)..(z * d + d) {
                    if !next.contains(c)
                        && self.deep_touches(k + 1, TileId(c as u32), node)
                    {
                        next.insert(c);
                    }
                }
            }
            ladder.push(next);
        }
        let ladder = Arc::new(ladder);
        self.ladders
            .lock()
            .unwrap()
            .entry(node)
            .or_insert_with(|| Arc::clone(&ladder));
        ladder
    }

    /// Touch ladder expanded by one same-level adjacency step: entry k
    /// holds every k-tile intersecting some k-tile that touches the node.
    fn expanded_ladder(&self, node: TileNode) -> Arc<Vec<BitSet>> {
        if let Some(l) = self.expanded.lock().unwrap().get(&node) {
            return Arc::clone(l);
        }
        let ladder = self.touch_ladder(node);
        let mut expanded = Vec::with_capacity(ladder.len());
        for (idx, bits) in ladder.iter().enumerate() {
            let level = node.level + idx as Level;
            let rows = self.level_rows(level);
            let mut out = bits.clone();
            for i in bits.iter() {
                out.union_with(&rows[i]);
            }
            expanded.push(out);
        }
        let expanded = Arc::new(expanded);
        self.expanded
            .lock()
            .unwrap()
            .entry(node)
            .or_insert_with(|| Arc::clone(&expanded));
        expanded
    }

    /// Touch set of a node at a level below its own: the tiles containing
    /// one of its corners.
    fn low_touch(&self, node: TileNode, k: Level) -> BitSet {
        let mut bits = BitSet::new(self.complex(k).tile_count());
        for &v in &self.complex(node.level).tiles[node.tile.index()].corners {
            for t in self.tower.tiles_containing(v, k).expect("level in range") {
                bits.insert(t.index());
            }
        }
        bits
    }

    /// The quantity m(X,Y) = min of the two levels and the deepest level
    /// at which tiles touching X and tiles touching Y still intersect.
    /// The scan descends from the built depth; a hit at the very top for a
    /// disjoint pair is inconclusive.
    pub fn m_graph(&self, x: TileNode, y: TileNode) -> Result<MGraph, QueryError> {
        self.check_node(x)?;
        self.check_node(y)?;
        if self.tiles_intersect(x, y) {
            return Ok(MGraph::Conclusive {
                m: x.level.min(y.level),
                m_bar: MBar::Infinite,
                witness: None,
            });
        }
        let depth = self.depth();
        // both levels are >= 0 here: the sphere intersects everything
        for k in (0..=depth).rev() {
            let hit = self.touch_hit(x, y, k);
            if let Some(witness) = hit {
                return Ok(if k == depth {
                    MGraph::Inconclusive {
                        m_bar_at_least: depth,
                        witness,
                    }
                } else {
                    MGraph::Conclusive {
                        m: x.level.min(y.level).min(k),
                        m_bar: MBar::Level(k),
                        witness: Some(witness),
                    }
                });
            }
        }
        unreachable!("the two 0-tiles intersect, so level 0 always hits")
    }

    /// Finds k-tiles Z touching X and W touching Y with Z and W
    /// intersecting, if any.
    fn touch_hit(&self, x: TileNode, y: TileNode, k: Level) -> Option<(TileNode, TileNode)> {
        let a_owned;
        let a: &BitSet = if k >= x.level {
            a_owned = self.touch_ladder(x);
            &a_owned[(k - x.level) as usize]
        } else {
            a_owned = Arc::new(vec![self.low_touch(x, k)]);
            &a_owned[0]
        };
        let (b_plain, b_expanded);
        let (b, b_exp): (&BitSet, &BitSet) = if k >= y.level {
            b_plain = self.touch_ladder(y);
            b_expanded = self.expanded_ladder(y);
            (
                &b_plain[(k - y.level) as usize],
                &b_expanded[(k - y.level) as usize],
            )
        } else {
            let low = self.low_touch(y, k);
            let rows = self.level_rows(k);
            let mut exp = low.clone();
            for i in low.iter() {
                exp.union_with(&rows[i]);
            }
            b_plain = Arc::new(vec![low]);
            b_expanded = Arc::new(vec![exp]);
            (&b_plain[0], &b_expanded[0])
        };
        if !a.intersects(b_exp) {
            return None;
        }
        let rows = self.level_rows(k);
        for z in a.iter() {
            if !b_exp.contains(z) {
                continue;
            }
            if b.contains(z) {
                return Some((TileNode::new(k, TileId(z as u32)), TileNode::new(k, TileId(z as u32))));
            }
            for w in b.iter() {
                if rows[z].contains(w) {
                    return Some((TileNode::new(k, TileId(z as u32)), TileNode::new(k, TileId(w as u32))));
                }
            }
        }
        unreachable!("expanded intersection implies a witness pair")
    }

    /// All nodes at levels -1..=cap, in index order.
    pub fn nodes(&self, cap: Level) -> Result<Vec<TileNode>, QueryError> {
        let t = self.truncation(cap)?;
        Ok((0..t.node_count).map(|i| t.node_at(i)).collect())
    }

    /// Observed hyperbolicity defect: max over triples of the four-point
    /// inequality violation, floored at zero.
    pub fn hyperbolicity_defect(&self, sampler: TripleSampler) -> Result<DefectReport, QueryError> {
        match sampler {
            TripleSampler::Exhaustive { cap } => {
                let t = self.truncation(cap)?;
                let m = self.distances(cap)?;
                let n = t.node_count;
                if n == 0 {
                    return Err(QueryError::EmptySample);
                }
                let mut delta = Half(0);
                let mut triples = 0u64;
                for xi in 0..n {
                    let x = t.node_at(xi);
                    for yi in xi..n {
                        let y = t.node_at(yi);
                        let pxy = Self::product_from_distance(x, y, m.get(xi, yi));
                        for zi in 0..n {
                            let z = t.node_at(zi);
                            let pxz = Self::product_from_distance(x, z, m.get(xi, zi));
                            let pzy = Self::product_from_distance(z, y, m.get(zi, yi));
                            delta = delta.max(pxz.min(pzy) - pxy);
                            triples += 1;
                        }
                    }
                }
                Ok(DefectReport {
                    cap,
                    triples,
                    delta: delta.max(Half(0)),
                })
            }
            TripleSampler::Seeded { cap, count, seed } => {
                if count == 0 {
                    return Err(QueryError::EmptySample);
                }
                let t = self.truncation(cap)?;
                let m = self.distances(cap)?;
                let n = t.node_count;
                let workers = 4u64;
                let mut delta = Half(0);
                std::thread::scope(|scope| {
                    let mut handles = Vec::new();
                    for w in 0..workers {
                        let quota = count / workers + u64::from(w < count % workers);
                        let t = Arc::clone(&t);
                        let m = Arc::clone(&m);
                        handles.push(scope.spawn(move || {
                            let mut rng = worker_rng(seed, w);
                            let mut local = Half(0);
                            for _ in 0..quota {
                                let xi = rng.random_range(0..n);
                                let yi = rng.random_range(0..n);
                                let zi = rng.random_range(0..n);
                                let (x, y, z) = (t.node_at(xi), t.node_at(yi), t.node_at(zi));
                                let pxy = Self::product_from_distance(x, y, m.get(xi, yi));
                                let pxz = Self::product_from_distance(x, z, m.get(xi, zi));
                                let pzy = Self::product_from_distance(z, y, m.get(zi, yi));
                                local = local.max(pxz.min(pzy) - pxy);
                            }
                            local
                        }));
                    }
                    for h in handles {
                        delta = delta.max(h.join().expect("sampler worker panicked"));
                    }
                });
                Ok(DefectReport {
                    cap,
                    triples: count,
                    delta: delta.max(Half(0)),
                })
            }
        }
    }

    /// Observed sandwich constants over pairs with conclusive m.
    pub fn sandwich_constants(&self, sampler: PairSampler) -> Result<SandwichReport, QueryError> {
        let (cap, pairs): (Level, Vec<(TileNode, TileNode)>) = match sampler {
            PairSampler::Exhaustive { cap } => {
                let t = self.truncation(cap)?;
                let n = t.node_count;
                let mut pairs = Vec::with_capacity(n * (n + 1) / 2);
                for a in 0..n {
                    for b in a..n {
                        pairs.push((t.node_at(a), t.node_at(b)));
                    }
                }
                (cap, pairs)
            }
            PairSampler::Seeded { cap, count, seed } => {
                let t = self.truncation(cap)?;
                let n = t.node_count;
                let mut rng = worker_rng(seed, 0);
                let pairs = (0..count)
                    .map(|_| {
                        (
                            t.node_at(rng.random_range(0..n)),
                            t.node_at(rng.random_range(0..n)),
                        )
                    })
                    .collect();
                (cap, pairs)
            }
        };
        if pairs.is_empty() {
            return Err(QueryError::EmptySample);
        }
        let matrix = self.distances(cap)?;
        let t = self.truncation(cap)?;
        let mut report = SandwichReport {
            cap,
            conclusive_pairs: 0,
            inconclusive_pairs: 0,
            lower_defect: Half(i64::MIN),
            upper_defect: Half(i64::MIN),
        };
        for (x, y) in pairs {
            match self.m_graph(x, y)? {
                MGraph::Conclusive { m, .. } => {
                    let eta = matrix.get(t.index_of(x), t.index_of(y));
                    let p = Self::product_from_distance(x, y, eta);
                    let m_half = Half::from_int(m as i64);
                    report.conclusive_pairs += 1;
                    report.lower_defect = report.lower_defect.max(m_half - p);
                    report.upper_defect = report.upper_defect.max(p - m_half);
                }
                MGraph::Inconclusive { .. } => report.inconclusive_pairs += 1,
            }
        }
        if report.conclusive_pairs == 0 {
            return Err(QueryError::EmptySample);
        }
        Ok(report)
    }

    /// Observed upper-curvature constant: the smallest c such that every
    /// sampled chain satisfies the product chain inequality at curvature
    /// kappa.
    pub fn acu_defect(
        &self,
        kappa: f64,
        chains: &[Vec<TileNode>],
    ) -> Result<AcuReport, QueryError> {
        if kappa >= 0.0 {
            return Err(QueryError::CurvatureNotNegative { kappa });
        }
        if chains.is_empty() {
            return Err(QueryError::EmptySample);
        }
        let scale = 1.0 / (-kappa).sqrt();
        let mut c_observed = 0.0f64;
        for chain in chains {
            assert!(chain.len() >= 2, "a chain needs at least one step");
            let steps = (chain.len() - 1) as f64;
            let mut min_product = Half(i64::MAX);
            for pair in chain.windows(2) {
                min_product = min_product.min(self.gromov_product(pair[0], pair[1])?);
            }
            let ends = self.gromov_product(chain[0], *chain.last().unwrap())?;
            let defect = min_product.as_f64() - scale * steps.ln() - ends.as_f64();
            c_observed = c_observed.max(defect);
        }
        Ok(AcuReport {
            kappa,
            chains: chains.len() as u64,
            c_observed,
        })
    }

    /// Seeded random walks in the truncation: `count` chains of up to
    /// `max_len` steps each.
    pub fn random_walk_chains(
        &self,
        cap: Level,
        count: u64,
        max_len: usize,
        seed: u64,
    ) -> Result<Vec<Vec<TileNode>>, QueryError> {
        let t = self.truncation(cap)?;
        let mut rng = worker_rng(seed, 1);
        let mut chains = Vec::with_capacity(count as usize);
        for _ in 0..count {
            let len = rng.random_range(1..=max_len.max(1));
            let mut at = rng.random_range(0..t.node_count);
            let mut chain = vec![t.node_at(at)];
            for _ in 0..len {
                let neighbors = &t.adjacency[at];
                at = neighbors[rng.random_range(0..neighbors.len())] as usize;
                chain.push(t.node_at(at));
            }
            chains.push(chain);
        }
        Ok(chains)
    }

    /// Seeded geodesic concatenations: for random nodes a, b, c, the chain
    /// follows a shortest path a -> b then b -> c.
    pub fn geodesic_chains(
        &self,
        cap: Level,
        count: u64,
        seed: u64,
    ) -> Result<Vec<Vec<TileNode>>, QueryError> {
        let t = self.truncation(cap)?;
        let m = self.distances(cap)?;
        let mut rng = worker_rng(seed, 2);
        let mut chains = Vec::with_capacity(count as usize);
        for _ in 0..count {
            let a = rng.random_range(0..t.node_count);
            let b = rng.random_range(0..t.node_count);
            let c = rng.random_range(0..t.node_count);
            let mut chain = geodesic(&t, &m, a, b);
            let second = geodesic(&t, &m, b, c);
            chain.extend_from_slice(&second[1..]);
            if chain.len() >= 2 {
                chains.push(chain.iter().map(|&i| t.node_at(i)).collect());
            }
        }
        Ok(chains)
    }

    /// DOT rendering of the truncated graph.
    pub fn write_dot(&self, cap: Level, out: &mut impl io::Write) -> io::Result<()> {
        let t = self.truncation(cap).map_err(io_other)?;
        writeln!(out, "graph tiles {{")?;
        for i in 0..t.node_count {
            writeln!(out, "  \"{}\";", t.node_at(i))?;
        }
        for i in 0..t.node_count {
            for &j in &t.adjacency[i] {
                if (j as usize) > i {
                    writeln!(out, "  \"{}\" -- \"{}\";", t.node_at(i), t.node_at(j as usize))?;
                }
            }
        }
        writeln!(out, "}}")
    }

    /// Flat edge list: one `a,b` line per undirected edge.
    pub fn write_edges_csv(&self, cap: Level, out: &mut impl io::Write) -> io::Result<()> {
        let t = self.truncation(cap).map_err(io_other)?;
        writeln!(out, "source,target")?;
        for i in 0..t.node_count {
            for &j in &t.adjacency[i] {
                if (j as usize) > i {
                    writeln!(out, "{},{}", t.node_at(i), t.node_at(j as usize))?;
                }
            }
        }
        Ok(())
    }
}

fn io_other(e: QueryError) -> io::Error {
    io::Error::other(e.to_string())
}

/// Deterministic per-worker generator; worker streams are independent of
/// thread scheduling.
fn worker_rng(seed: u64, worker: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed ^ (worker.wrapping_add(1)).wrapping_mul(0x9E37_79B9_7F4A_7C15))
}

/// Shortest path as node indices, via distance-matrix descent.
fn geodesic(t: &Truncation, m: &DistanceMatrix, from: usize, to: usize) -> Vec<usize> {
    let mut path = vec![from];
    let mut at = from;
    while at != to {
        let next = t.adjacency[at]
            .iter()
            .map(|&v| v as usize)
            .find(|&v| m.get(v, to) + 1 == m.get(at, to))
            .expect("distance descent always finds a next hop");
        path.push(next);
        at = next;
    }
    path
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rule::builtin_rule;
    use crate::tower::build_tower;

    fn tower_2x2(depth: u32) -> Tower {
        build_tower(builtin_rule("lattes-2x2").unwrap(), depth, &Default::default()).unwrap()
    }

    #[test]
    fn graph_is_shareable() {
        fn assert_send_sync<T: Send + Sync>() {}
        assert_send_sync::<TileGraph<'static>>();
    }

    #[test]
    fn adjacency_base_cases() {
        let tower = tower_2x2(2);
        let g = TileGraph::new(&tower);
        let white = TileNode::new(0, TileId(0));
        let black = TileNode::new(0, TileId(1));
        assert!(g.adjacent(TileNode::SPHERE, white).unwrap());
        assert!(g.adjacent(TileNode::SPHERE, black).unwrap());
        assert!(g.adjacent(white, black).unwrap());
        assert!(!g.adjacent(white, white).unwrap());
        // sphere reaches only the 0-tiles
        assert!(!g.adjacent(TileNode::SPHERE, TileNode::new(1, TileId(0))).unwrap());
    }

    #[test]
    fn opposite_one_tiles_are_not_adjacent() {
        // front top-left vs back bottom-right: disjoint closed squares
        let tower = tower_2x2(3);
        let g = TileGraph::new(&tower);
        let front_tl = TileNode::new(1, TileId(2));
        let back_br = TileNode::new(1, TileId(5));
        assert!(!g.adjacent(front_tl, back_br).unwrap());
        assert_eq!(g.path_distance(front_tl, back_br).unwrap(), 2);
        assert_eq!(g.gromov_product(front_tl, back_br).unwrap(), Half::from_int(1));
        // m = min level and the touch scan agree with the geometry
        match g.m_graph(front_tl, back_br).unwrap() {
            MGraph::Conclusive { m, m_bar, .. } => {
                assert_eq!(m, 1);
                assert_eq!(m_bar, MBar::Level(2));
            }
            other => panic!("expected a conclusive m, got {other:?}"),
        }
    }

    #[test]
    fn distance_to_sphere_is_level_plus_one() {
        let tower = tower_2x2(3);
        let g = TileGraph::new(&tower);
        for node in g.nodes(3).unwrap() {
            assert_eq!(
                g.path_distance(node, TileNode::SPHERE).unwrap(),
                (node.level + 1) as u32
            );
        }
    }

    #[test]
    fn gromov_product_base_cases() {
        let tower = tower_2x2(2);
        let g = TileGraph::new(&tower);
        let s = TileNode::SPHERE;
        assert_eq!(g.gromov_product(s, s).unwrap(), Half(0));
        for node in g.nodes(2).unwrap() {
            assert_eq!(
                g.gromov_product(node, node).unwrap(),
                Half::from_int(node.level as i64 + 1)
            );
        }
        // two 1-tiles sharing an edge: eta = 1, product = 3/2
        let a = TileNode::new(1, TileId(0));
        let b = TileNode::new(1, TileId(1));
        assert!(g.adjacent(a, b).unwrap());
        assert_eq!(g.gromov_product(a, b).unwrap(), Half(3));
    }

    #[test]
    fn m_graph_base_cases() {
        let tower = tower_2x2(2);
        let g = TileGraph::new(&tower);
        let white = TileNode::new(0, TileId(0));
        let x = TileNode::new(2, TileId(7));
        // intersecting pairs short-circuit to the level minimum
        assert_eq!(
            g.m_graph(x, TileNode::SPHERE).unwrap(),
            MGraph::Conclusive {
                m: -1,
                m_bar: MBar::Infinite,
                witness: None
            }
        );
        assert_eq!(
            g.m_graph(white, white).unwrap().value(),
            Some(0)
        );
        assert_eq!(g.m_graph(x, x).unwrap().value(), Some(2));
    }

    #[test]
    fn sandwich_trivial_pairs() {
        let tower = tower_2x2(3);
        let g = TileGraph::new(&tower);
        let white = TileNode::new(0, TileId(0));
        let black = TileNode::new(0, TileId(1));
        // (white, black): m = 0 and the product is 1/2
        assert_eq!(g.m_graph(white, black).unwrap().value(), Some(0));
        assert_eq!(g.gromov_product(white, black).unwrap(), Half(1));
    }

    #[test]
    fn exhaustive_defect_is_deterministic_and_small() {
        let tower = tower_2x2(2);
        let g = TileGraph::new(&tower);
        let a = g
            .hyperbolicity_defect(TripleSampler::Exhaustive { cap: 2 })
            .unwrap();
        let b = g
            .hyperbolicity_defect(TripleSampler::Exhaustive { cap: 2 })
            .unwrap();
        assert_eq!(a.delta, b.delta);
        assert!(a.delta >= Half(0));
        assert!(a.delta <= Half::from_int(3), "defect {} unexpectedly large", a.delta);
    }

    #[test]
    fn seeded_defect_reproduces() {
        let tower = tower_2x2(3);
        let g = TileGraph::new(&tower);
        let sampler = TripleSampler::Seeded {
            cap: 3,
            count: 20_000,
            seed: 7,
        };
        let a = g.hyperbolicity_defect(sampler).unwrap();
        let b = g.hyperbolicity_defect(sampler).unwrap();
        assert_eq!(a.delta, b.delta);
    }

    #[test]
    fn restricted_bfs_matches_full_graph() {
        // the level cap never changes distances: deeper detours are
        // replaceable by parents
        let tower = tower_2x2(3);
        let g = TileGraph::new(&tower);
        let shallow = g.nodes(2).unwrap();
        for &x in &shallow {
            for &y in &shallow {
                assert_eq!(
                    g.path_distance(x, y).unwrap(),
                    g.bfs_distance(x, y, 3).unwrap(),
                    "{x} vs {y}"
                );
            }
        }
    }

    #[test]
    fn acu_rejects_bad_curvature() {
        let tower = tower_2x2(2);
        let g = TileGraph::new(&tower);
        let chains = vec![vec![TileNode::SPHERE, TileNode::new(0, TileId(0))]];
        assert!(matches!(
            g.acu_defect(0.25, &chains),
            Err(QueryError::CurvatureNotNegative { .. })
        ));
        let report = g.acu_defect(-0.25, &chains).unwrap();
        // single step: log 1 = 0, min product equals the end product
        assert_eq!(report.c_observed, 0.0);
    }

    #[test]
    fn chain_samplers_are_deterministic() {
        let tower = tower_2x2(2);
        let g = TileGraph::new(&tower);
        let a = g.random_walk_chains(2, 50, 6, 11).unwrap();
        let b = g.random_walk_chains(2, 50, 6, 11).unwrap();
        assert_eq!(a, b);
        let c = g.geodesic_chains(2, 50, 11).unwrap();
        let d = g.geodesic_chains(2, 50, 11).unwrap();
        assert_eq!(c, d);
        for chain in a.iter().chain(c.iter()) {
            for pair in chain.windows(2) {
                assert!(g.adjacent(pair[0], pair[1]).unwrap());
            }
        }
    }

    #[test]
    fn export_formats() {
        let tower = tower_2x2(1);
        let g = TileGraph::new(&tower);
        let mut dot = Vec::new();
        g.write_dot(1, &mut dot).unwrap();
        let dot = String::from_utf8(dot).unwrap();
        assert!(dot.contains("\"L-1:T0\" -- \"L0:T0\""));
        let mut csv = Vec::new();
        g.write_edges_csv(1, &mut csv).unwrap();
        let csv = String::from_utf8(csv).unwrap();
        assert!(csv.starts_with("source,target\n"));
        assert!(csv.contains("L-1:T0,L0:T0"));
    }

    #[test]
    fn graph_is_connected_through_parents() {
        let tower = tower_2x2(3);
        let g = TileGraph::new(&tower);
        let t = g.truncation(3).unwrap();
        let m = g.distances(3).unwrap();
        for i in 0..t.node_count {
            assert!(m.get(0, i) < u16::MAX as u32);
        }
    }
}
