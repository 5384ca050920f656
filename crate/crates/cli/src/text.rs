//! Plain-text renderers for the report bodies.
//!
//! Layout is part of the reproducibility contract: fixed column order, no
//! timestamps, floats through their shortest round-trip form. Half-integer
//! quantities print as `5/2` rather than `2.5`.

use std::io::{self, Write};

use tiletower::expansion::{GrowthRow, LattesReport};
use tiletower::{CurvatureReport, PointSeparation};

use crate::{
    DnBody, ExportBody, GraphBody, RunConfig, SubdivideBody, ValidateBody, VisualBody,
};

pub(crate) fn header(out: &mut dyn Write, command: &str, cfg: &RunConfig) -> io::Result<()> {
    writeln!(out, "tiletower {} {command}", env!("CARGO_PKG_VERSION"))?;
    writeln!(out, "rule {}  depth {}  seed {}", cfg.rule, cfg.depth, cfg.seed)?;
    writeln!(
        out,
        "triples {}  pairs {}  chains {}  walk-length {}",
        cfg.triples, cfg.pairs, cfg.chains, cfg.walk_length
    )?;
    writeln!(
        out,
        "kappa {}  lambda {}  decay-threshold {}  caps depth {} cells {}",
        cfg.kappa, cfg.lambda, cfg.decay_threshold, cfg.depth_cap, cfg.cell_cap
    )?;
    writeln!(out)
}

pub(crate) fn validate(out: &mut dyn Write, body: &ValidateBody) -> io::Result<()> {
    let status = if body.valid { "valid" } else { "invalid" };
    writeln!(out, "rule {}: {status}", body.rule)?;
    for v in &body.violations {
        writeln!(out, "  violation: {v}")?;
    }
    if let Some(c) = &body.criticality {
        let verts: Vec<String> = c.critical_vertices.iter().map(|v| v.to_string()).collect();
        let verts = if verts.is_empty() {
            String::from("none")
        } else {
            verts.join(" ")
        };
        writeln!(out, "critical vertices: {verts}")?;
        let degrees: Vec<String> = c.local_degrees.iter().map(|d| d.to_string()).collect();
        writeln!(out, "local degrees: {}", degrees.join(" "))?;
        match c.degree_bound {
            Some(n) => writeln!(out, "iterate degree bound: {n}")?,
            None => writeln!(out, "iterate degree bound: none (periodic critical orbit)")?,
        }
        let periodic = if c.has_periodic_critical { "yes" } else { "no" };
        writeln!(out, "periodic critical vertex: {periodic}")?;
    }
    Ok(())
}

pub(crate) fn subdivide(out: &mut dyn Write, body: &SubdivideBody) -> io::Result<()> {
    writeln!(out, "{:>6}  {:>10}  {:>10}  {:>10}", "level", "vertices", "edges", "tiles")?;
    for s in &body.levels {
        writeln!(out, "{:>6}  {:>10}  {:>10}  {:>10}", s.level, s.vertices, s.edges, s.tiles)?;
    }
    Ok(())
}

pub(crate) fn subdivide_csv(out: &mut dyn Write, body: &SubdivideBody) -> io::Result<()> {
    writeln!(out, "level,vertices,edges,tiles")?;
    for s in &body.levels {
        writeln!(out, "{},{},{},{}", s.level, s.vertices, s.edges, s.tiles)?;
    }
    Ok(())
}

pub(crate) fn graph(out: &mut dyn Write, body: &GraphBody) -> io::Result<()> {
    let d = &body.delta;
    writeln!(
        out,
        "hyperbolicity defect: {} ({} triples, cap {})",
        d.delta, d.triples, d.cap
    )?;
    let s = &body.sandwich;
    writeln!(
        out,
        "sandwich defects: lower {} upper {} ({} conclusive pairs, {} inconclusive, cap {})",
        s.lower_defect, s.upper_defect, s.conclusive_pairs, s.inconclusive_pairs, s.cap
    )?;
    writeln!(out, "chain defects at kappa {}:", body.kappa)?;
    writeln!(out, "{:>5}  {:>8}  c_observed", "cap", "chains")?;
    for row in &body.chain_defects {
        writeln!(out, "{:>5}  {:>8}  {}", row.cap, row.chains, row.c_observed)?;
    }
    Ok(())
}

pub(crate) fn dn(out: &mut dyn Write, body: &DnBody) -> io::Result<()> {
    writeln!(out, "{:>3}  {:>8}  {:<8}  witness", "n", "D_n", "sides")?;
    for r in &body.rows {
        writeln!(
            out,
            "{:>3}  {:>8}  {:<8}  {}",
            r.n,
            r.value,
            join_sides(r),
            join_witness(r)
        )?;
    }
    Ok(())
}

pub(crate) fn dn_csv(out: &mut dyn Write, body: &DnBody) -> io::Result<()> {
    writeln!(out, "n,dn,sides,witness")?;
    for r in &body.rows {
        writeln!(out, "{},{},{},{}", r.n, r.value, join_sides(r), join_witness(r))?;
    }
    Ok(())
}

fn join_sides(r: &tiletower::DnResult) -> String {
    let sides: Vec<String> = r.joined.sides().iter().map(|s| s.to_string()).collect();
    sides.join("+")
}

fn join_witness(r: &tiletower::DnResult) -> String {
    let tiles: Vec<String> = r.witness.iter().map(|t| t.to_string()).collect();
    tiles.join(" ")
}

pub(crate) fn lambda0(out: &mut dyn Write, rows: &[GrowthRow]) -> io::Result<()> {
    writeln!(out, "{:>3}  {:>8}  {:<20}  ratio", "n", "D_n", "D_n^(1/n)")?;
    for r in rows {
        let ratio = r.ratio.map_or(String::from("-"), |v| v.to_string());
        writeln!(out, "{:>3}  {:>8}  {:<20}  {}", r.n, r.dn, r.root, ratio)?;
    }
    Ok(())
}

pub(crate) fn lambda0_csv(out: &mut dyn Write, rows: &[GrowthRow]) -> io::Result<()> {
    writeln!(out, "n,dn,root,ratio")?;
    for r in rows {
        let ratio = r.ratio.map_or(String::new(), |v| v.to_string());
        writeln!(out, "{},{},{},{}", r.n, r.dn, r.root, ratio)?;
    }
    Ok(())
}

pub(crate) fn lattes(out: &mut dyn Write, report: &LattesReport) -> io::Result<()> {
    writeln!(out, "decay threshold: {}", report.decay_threshold)?;
    writeln!(out, "{:>3}  {:>8}  c", "n", "D_n")?;
    for r in &report.rows {
        writeln!(out, "{:>3}  {:>8}  {}", r.n, r.dn, r.c)?;
    }
    writeln!(out, "verdict: {}", report.verdict)
}

pub(crate) fn lattes_csv(out: &mut dyn Write, report: &LattesReport) -> io::Result<()> {
    writeln!(out, "n,dn,c")?;
    for r in &report.rows {
        writeln!(out, "{},{},{}", r.n, r.dn, r.c)?;
    }
    Ok(())
}

pub(crate) fn curvature(out: &mut dyn Write, r: &CurvatureReport) -> io::Result<()> {
    writeln!(out, "degree: {}", r.degree)?;
    writeln!(out, "upper-curvature lower bound -(ln^2 d)/4: {}", r.ku_lower_bound)?;
    writeln!(out, "kappa candidate: {}", r.kappa_candidate)?;
    writeln!(out, "growth:")?;
    lambda0(out, &r.growth)?;
    writeln!(out, "normalized decay (threshold {}):", r.lattes.decay_threshold)?;
    for row in &r.lattes.rows {
        writeln!(out, "{:>3}  {:>8}  {}", row.n, row.dn, row.c)?;
    }
    writeln!(out, "decay verdict: {}", r.lattes.verdict)?;
    writeln!(out, "chain defects at kappa candidate:")?;
    writeln!(out, "{:>5}  {:>8}  c_observed", "cap", "chains")?;
    for row in &r.acu {
        writeln!(out, "{:>5}  {:>8}  {}", row.cap, row.chains, row.c_observed)?;
    }
    writeln!(out, "verdict: {}", r.verdict)
}

pub(crate) fn visual(out: &mut dyn Write, body: &VisualBody) -> io::Result<()> {
    writeln!(out, "lambda: {}", body.profile.lambda)?;
    writeln!(
        out,
        "{:>5}  {:>8}  {:>10}  {:<22}  max",
        "level", "tiles", "conclusive", "min"
    )?;
    for row in &body.profile.rows {
        let fmt = |v: Option<f64>| v.map_or(String::from("-"), |v| v.to_string());
        writeln!(
            out,
            "{:>5}  {:>8}  {:>10}  {:<22}  {}",
            row.level,
            row.tiles,
            row.conclusive,
            fmt(row.min),
            fmt(row.max)
        )?;
    }
    for p in &body.pairs {
        writeln!(out)?;
        writeln!(
            out,
            "pair v{},v{}: m {}  m' {}  ray separation {}",
            p.x,
            p.y,
            sep(p.m),
            sep(p.m_prime),
            sep(p.rays.separation)
        )?;
        let products: Vec<String> = p
            .rays
            .products
            .iter()
            .map(|(level, product)| format!("{level}:{product}"))
            .collect();
        writeln!(out, "  ray products: {}", products.join("  "))?;
    }
    Ok(())
}

fn sep(s: PointSeparation) -> String {
    match s {
        PointSeparation::Level(l) => l.to_string(),
        PointSeparation::Infinite => String::from("infinite"),
        PointSeparation::Inconclusive => String::from("inconclusive"),
    }
}

pub(crate) fn export(out: &mut dyn Write, body: &ExportBody) -> io::Result<()> {
    for a in &body.artifacts {
        writeln!(out, "wrote {} ({} bytes) to {}", a.kind, a.bytes, a.path)?;
    }
    Ok(())
}
