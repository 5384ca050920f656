//! Joining numbers, the growth of D_n, and the curvature report.
//!
//! D_n is the minimum number of n-tiles in a connected set whose closure
//! meets two disjoint 0-edges (for m >= 4) or all three 0-edges (for
//! m = 3). Chains are counted by tiles, not hops, so a single tile
//! meeting both targets has length 1. The per-pair and per-terminal
//! searches are independent and could run in parallel; they are cheap
//! enough sequentially at supported depths.
//!
//! On top of the D_n sequence the module derives the growth table
//! D_n^{1/n}, the normalized sequence c_n = D_n / d^{n/2} with its decay
//! verdict, and the assembled curvature report.

use crate::complex::CellComplex;
use crate::error::{QueryError, WitnessError};
use crate::graph::{TileGraph, TileNode};
use crate::ids::{Level, TileId};
use crate::tower::Tower;
use serde::Serialize;
use std::collections::VecDeque;
use std::io;

/// Which 0-edges a joining witness is required to meet.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum JoinTarget {
    /// Two disjoint 0-edges, for m >= 4.
    OppositePair(u32, u32),
    /// All three 0-edges, for m = 3.
    AllSides([u32; 3]),
}

impl JoinTarget {
    pub fn sides(&self) -> Vec<u32> {
        match self {
            JoinTarget::OppositePair(a, b) => vec![*a, *b],
            JoinTarget::AllSides(s) => s.to_vec(),
        }
    }
}

/// A joining number D_n together with a minimum witness.
#[derive(Clone, Debug, Serialize)]
pub struct DnResult {
    pub n: Level,
    pub value: u64,
    /// Tile chain realizing the minimum, ordered along the search tree.
    pub witness: Vec<TileId>,
    pub joined: JoinTarget,
}

impl DnResult {
    /// Re-checks the defining properties: the witness has exactly `value`
    /// distinct n-tiles, is connected under closed intersection, and
    /// meets every required 0-edge.
    pub fn validate(&self, tower: &Tower) -> Result<(), WitnessError> {
        let complex = tower
            .level(self.n)
            .map_err(|_| WitnessError::LevelMissing { level: self.n })?;
        let mut seen = std::collections::HashSet::new();
        for &t in &self.witness {
            if t.index() >= complex.tile_count() {
                return Err(WitnessError::UnknownTile {
                    level: self.n,
                    tile: t.0,
                });
            }
            if !seen.insert(t) {
                return Err(WitnessError::DuplicateTile { tile: t.0 });
            }
        }
        if self.witness.len() as u64 != self.value {
            return Err(WitnessError::WrongCardinality {
                expected: self.value,
                actual: self.witness.len() as u64,
            });
        }
        // connectivity under same-level closed intersection
        let mut reached = vec![false; self.witness.len()];
        reached[0] = true;
        let mut queue = VecDeque::from([0usize]);
        while let Some(i) = queue.pop_front() {
            for j in 0..self.witness.len() {
                if !reached[j] && complex.tiles_touch(self.witness[i], self.witness[j]) {
                    reached[j] = true;
                    queue.push_back(j);
                }
            }
        }
        if !reached.iter().all(|&r| r) {
            return Err(WitnessError::NotConnected);
        }
        for side in self.joined.sides() {
            if !self
                .witness
                .iter()
                .any(|&t| meets_side(complex, t, side))
            {
                return Err(WitnessError::MissesSide { side });
            }
        }
        Ok(())
    }
}

/// One row of the growth table for D_n.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct GrowthRow {
    pub n: Level,
    pub dn: u64,
    /// D_n^{1/n}.
    pub root: f64,
    /// D_{n+1}/D_n; absent on the deepest row.
    pub ratio: Option<f64>,
}

/// One row of the normalized sequence c_n = D_n / d^{n/2}.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct LattesRow {
    pub n: Level,
    pub dn: u64,
    pub c: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub enum LattesVerdict {
    /// No sustained decay observed; does not prove the bound.
    Consistent,
    /// c_n decayed strictly for the last levels up to `n`, each step by
    /// the configured factor or more.
    Violated { n: Level },
}

impl std::fmt::Display for LattesVerdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            LattesVerdict::Consistent => write!(f, "consistent"),
            LattesVerdict::Violated { n } => write!(f, "violated({n})"),
        }
    }
}

/// The c_n sequence with a finite-depth decay verdict. The verdict is a
/// heuristic: sustained geometric decay at the built depth, never a
/// proof.
#[derive(Clone, Debug, Serialize)]
pub struct LattesReport {
    /// Per-level decay factor at or below which decay counts as
    /// sustained.
    pub decay_threshold: f64,
    pub rows: Vec<LattesRow>,
    pub verdict: LattesVerdict,
}

/// Per-truncation observed AC_u constants.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct AcuRow {
    pub cap: Level,
    pub chains: u64,
    pub c_observed: f64,
}

/// Everything the curvature verdict rests on, as plain data.
#[derive(Clone, Debug, Serialize)]
pub struct CurvatureReport {
    pub degree: u32,
    /// Lower bound for the asymptotic upper curvature: -(1/4) ln^2(deg).
    pub ku_lower_bound: f64,
    pub kappa_candidate: f64,
    pub growth: Vec<GrowthRow>,
    pub lattes: LattesReport,
    /// Observed chain-inequality constants at the kappa candidate, per
    /// truncation depth.
    pub acu: Vec<AcuRow>,
    pub verdict: String,
}

fn meets_side(complex: &CellComplex, t: TileId, k: u32) -> bool {
    complex.tiles[t.index()]
        .corners
        .iter()
        .any(|&v| complex.pos_on_zero_edge(v, k).is_some())
}

fn neighbors(complex: &CellComplex, t: TileId) -> impl Iterator<Item = TileId> + '_ {
    complex.tiles[t.index()]
        .corners
        .iter()
        .flat_map(|&v| complex.tiles_at_vertex(v).iter().copied())
}

/// Vertex-counted BFS from every tile meeting one side to the nearest
/// tile meeting another: returns the tile count of a shortest chain and
/// the chain itself.
fn chain_between(complex: &CellComplex, from: u32, to: u32) -> (u64, Vec<TileId>) {
    let count = complex.tile_count();
    let mut dist = vec![u32::MAX; count];
    let mut parent = vec![u32::MAX; count];
    let mut queue = VecDeque::new();
    for t in 0..count {
        if meets_side(complex, TileId(t as u32), from) {
            dist[t] = 1;
            queue.push_back(t);
        }
    }
    while let Some(u) = queue.pop_front() {
        if meets_side(complex, TileId(u as u32), to) {
            let mut chain = vec![TileId(u as u32)];
            let mut at = u;
            while parent[at] != u32::MAX {
                at = parent[at] as usize;
                chain.push(TileId(at as u32));
            }
            chain.reverse();
            return (dist[u] as u64, chain);
        }
        for v in neighbors(complex, TileId(u as u32)) {
            if dist[v.index()] == u32::MAX {
                dist[v.index()] = dist[u] + 1;
                parent[v.index()] = u as u32;
                queue.push_back(v.index());
            }
        }
    }
    unreachable!("every level is connected, so some chain joins the sides");
}

/// Vertex-counted distance-to-side table with parent pointers, for the
/// three-terminal case.
fn side_distances(complex: &CellComplex, side: u32) -> (Vec<u32>, Vec<u32>) {
    let count = complex.tile_count();
    let mut dist = vec![u32::MAX; count];
    let mut parent = vec![u32::MAX; count];
    let mut queue = VecDeque::new();
    for t in 0..count {
        if meets_side(complex, TileId(t as u32), side) {
            dist[t] = 1;
            queue.push_back(t);
        }
    }
    while let Some(u) = queue.pop_front() {
        for v in neighbors(complex, TileId(u as u32)) {
            if dist[v.index()] == u32::MAX {
                dist[v.index()] = dist[u] + 1;
                parent[v.index()] = u as u32;
                queue.push_back(v.index());
            }
        }
    }
    (dist, parent)
}

/// The minimum number of n-tiles in a connected set joining opposite
/// sides, with a witness. For m >= 4 the minimum runs over unordered
/// pairs of disjoint 0-edges; for m = 3, where no two 0-edges are
/// disjoint, the set must meet all three and the minimum is the
/// three-terminal meeting-point value min_T (d_0 + d_1 + d_2 - 2).
pub fn join_sides_dn(tower: &Tower, n: Level) -> Result<DnResult, QueryError> {
    if n < 0 {
        return Err(QueryError::LevelOutOfRange {
            level: n,
            depth: tower.depth(),
        });
    }
    if n > tower.depth() {
        return Err(QueryError::DepthTooShallow {
            required: n,
            depth: tower.depth(),
        });
    }
    let complex = tower.level(n)?;
    let base = tower.level(0)?;
    let m = tower.rule().m;
    if m >= 4 {
        let mut best: Option<DnResult> = None;
        for a in 0..m {
            for b in (a + 1)..m {
                let ea = &base.edges[a as usize].endpoints;
                let eb = &base.edges[b as usize].endpoints;
                if ea.iter().any(|v| eb.contains(v)) {
                    continue;
                }
                let (value, witness) = chain_between(complex, a, b);
                if best.as_ref().is_none_or(|r| value < r.value) {
                    best = Some(DnResult {
                        n,
                        value,
                        witness,
                        joined: JoinTarget::OppositePair(a, b),
                    });
                }
            }
        }
        Ok(best.expect("m >= 4 always has a disjoint pair"))
    } else {
        let tables: Vec<(Vec<u32>, Vec<u32>)> =
            (0..3).map(|s| side_distances(complex, s)).collect();
        let (mut best_tile, mut best_value) = (0usize, u64::MAX);
        for t in 0..complex.tile_count() {
            let sum = tables.iter().map(|(d, _)| d[t] as u64).sum::<u64>();
            if sum.saturating_sub(2) < best_value {
                best_value = sum - 2;
                best_tile = t;
            }
        }
        let mut witness = vec![TileId(best_tile as u32)];
        for (_, parent) in &tables {
            let mut at = best_tile;
            while parent[at] != u32::MAX {
                at = parent[at] as usize;
                witness.push(TileId(at as u32));
            }
        }
        // at a minimizing tile the three chains are internally disjoint;
        // the validator re-checks the cardinality
        witness.sort_unstable();
        witness.dedup();
        Ok(DnResult {
            n,
            value: best_value,
            witness,
            joined: JoinTarget::AllSides([0, 1, 2]),
        })
    }
}

/// Growth table (n, D_n, D_n^{1/n}, D_{n+1}/D_n) for n = 1..=depth.
pub fn lambda0_estimate(tower: &Tower) -> Result<Vec<GrowthRow>, QueryError> {
    if tower.depth() < 2 {
        return Err(QueryError::DepthTooShallow {
            required: 2,
            depth: tower.depth(),
        });
    }
    let dn: Vec<u64> = (1..=tower.depth())
        .map(|n| join_sides_dn(tower, n).map(|r| r.value))
        .collect::<Result<_, _>>()?;
    Ok((1..=tower.depth())
        .map(|n| {
            let i = (n - 1) as usize;
            GrowthRow {
                n,
                dn: dn[i],
                root: (dn[i] as f64).powf(1.0 / n as f64),
                ratio: dn.get(i + 1).map(|&next| next as f64 / dn[i] as f64),
            }
        })
        .collect())
}

/// True when the computed D_n sequence never decreases. Not required in
/// general; a false value is a reportable observation, not an error.
pub fn dn_is_monotone(rows: &[GrowthRow]) -> bool {
    rows.windows(2).all(|w| w[0].dn <= w[1].dn)
}

/// The normalized sequence c_n = D_n / d^{n/2} for n = 0..=depth and a
/// decay verdict: violated when the last three levels decay strictly,
/// each step shrinking to `decay_threshold` times the previous value or
/// less.
pub fn lattes_criterion(
    tower: &Tower,
    decay_threshold: f64,
) -> Result<LattesReport, QueryError> {
    if tower.depth() < 1 {
        return Err(QueryError::DepthTooShallow {
            required: 1,
            depth: tower.depth(),
        });
    }
    let d = tower.rule().degree as u64;
    let rows: Vec<LattesRow> = (0..=tower.depth())
        .map(|n| {
            let dn = join_sides_dn(tower, n)?.value;
            Ok(LattesRow {
                n,
                dn,
                c: dn as f64 / (d.pow(n as u32) as f64).sqrt(),
            })
        })
        .collect::<Result<_, QueryError>>()?;
    let verdict = match rows.len() {
        len if len >= 3 => {
            let tail = &rows[len - 3..];
            let sustained = tail
                .windows(2)
                .all(|w| w[1].c < w[0].c && w[1].c <= decay_threshold * w[0].c);
            if sustained {
                LattesVerdict::Violated {
                    n: tail[2].n,
                }
            } else {
                LattesVerdict::Consistent
            }
        }
        _ => LattesVerdict::Consistent,
    };
    Ok(LattesReport {
        decay_threshold,
        rows,
        verdict,
    })
}

/// Options for assembling the curvature report.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct CurvatureOptions {
    pub decay_threshold: f64,
    pub seed: u64,
    /// Sampled chains per truncation depth, split between random walks
    /// and geodesic concatenations; the D_n witness chain is always
    /// included.
    pub chains_per_level: u64,
    pub walk_length: usize,
}

impl Default for CurvatureOptions {
    fn default() -> Self {
        CurvatureOptions {
            decay_threshold: 0.9,
            seed: 0,
            chains_per_level: 200,
            walk_length: 12,
        }
    }
}

/// Observed AC_u constants at `kappa` per truncation depth: the sample
/// is the D_cap witness chain, seeded random walks, and seeded geodesic
/// concatenations.
pub fn acu_table(
    graph: &TileGraph<'_>,
    kappa: f64,
    opts: &CurvatureOptions,
) -> Result<Vec<AcuRow>, QueryError> {
    let tower = graph.tower();
    let mut table = Vec::new();
    for cap in 1..=tower.depth() {
        let mut chains = Vec::new();
        let dn = join_sides_dn(tower, cap)?;
        if dn.witness.len() >= 2 {
            chains.push(
                dn.witness
                    .iter()
                    .map(|&t| TileNode::new(cap, t))
                    .collect::<Vec<_>>(),
            );
        }
        let walks = opts.chains_per_level / 2;
        chains.extend(graph.random_walk_chains(cap, walks, opts.walk_length, opts.seed)?);
        chains.extend(graph.geodesic_chains(
            cap,
            opts.chains_per_level - walks,
            opts.seed,
        )?);
        let report = graph.acu_defect(kappa, &chains)?;
        table.push(AcuRow {
            cap,
            chains: report.chains,
            c_observed: report.c_observed,
        });
    }
    Ok(table)
}

/// Assembles the growth table, the c_n verdict, and the AC_u table at
/// the candidate curvature -(1/4) ln^2(deg). Pure data: rerunning on the
/// same tower with the same options yields identical output.
pub fn curvature_report(
    tower: &Tower,
    opts: &CurvatureOptions,
) -> Result<CurvatureReport, QueryError> {
    let degree = tower.rule().degree;
    let log_d = (degree as f64).ln();
    let kappa = -0.25 * log_d * log_d;
    let growth = lambda0_estimate(tower)?;
    let lattes = lattes_criterion(tower, opts.decay_threshold)?;
    let graph = TileGraph::new(tower);
    let acu = acu_table(&graph, kappa, opts)?;
    let verdict = match lattes.verdict {
        LattesVerdict::Consistent => format!(
            "consistent: c_n shows no sustained decay through depth {} and the \
             observed chain constants at kappa = -(1/4)ln^2({degree}) stay bounded; \
             for maps without periodic critical points this is the behavior of the \
             Lattes bound D_n >= c*deg^(n/2) (finite-depth heuristic, not a proof)",
            tower.depth(),
        ),
        LattesVerdict::Violated { n } => format!(
            "violated({n}): c_n decays geometrically through depth {}, against the \
             Lattes bound D_n >= c*deg^(n/2); for maps without periodic critical \
             points sustained decay rules out asymptotic upper curvature \
             -(1/4)ln^2({degree}) (finite-depth heuristic, not a proof)",
            tower.depth(),
        ),
    };
    Ok(CurvatureReport {
        degree,
        ku_lower_bound: kappa,
        kappa_candidate: kappa,
        growth,
        lattes,
        acu,
        verdict,
    })
}

/// CSV rendering of the joined growth and c_n tables.
pub fn write_dn_csv(
    growth: &[GrowthRow],
    lattes: &[LattesRow],
    out: &mut impl io::Write,
) -> io::Result<()> {
    writeln!(out, "n,dn,root,ratio,c")?;
    for row in growth {
        let c = lattes
            .iter()
            .find(|l| l.n == row.n)
            .map_or(String::new(), |l| l.c.to_string());
        let ratio = row.ratio.map_or(String::new(), |r| r.to_string());
        writeln!(out, "{},{},{},{},{}", row.n, row.dn, row.root, ratio, c)?;
    }
    Ok(())
}
