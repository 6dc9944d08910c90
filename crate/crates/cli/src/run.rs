//! Subcommand implementations. Each returns the bytes of its artifacts so
//! the caller decides where they go.

use crate::config::{ExperimentConfig, ModelKind, SymmetryMode};
use anyhow::{bail, Context, Result};
use selfcorr::barrier::{logical_barrier, replay, trace_max, witness_ops, BarrierOptions};
use selfcorr::complex::colex::Colex;
use selfcorr::complex::{CellComplex, Colex2, CubicSpec};
use selfcorr::decoder::{ClusterDecoder, RbhDecoder};
use selfcorr::dynamics::{memory_time, metropolis_run, trial_seed, ClassDecoder};
use selfcorr::gauging::{
    build_color2d, color2d_surface, color_pair_terms, gauge_extend, gcc_cell_surface, verify_emergent_constraints,
};
use selfcorr::gcc::{build_gcc, GaugeCode};
use selfcorr::peierls::{check_bound, enumerate_loops, Sublattice};
use selfcorr::rbh::{build_rbh_layout, RbhLayout};
use selfcorr::symmetry::{derive_moveset, unrestricted_moveset, MoveSet};
use selfcorr::{CodeModel, Pauli};
use serde_json::{json, Value};
use std::fmt::Write as _;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Named output files; `primary` goes to stdout when no path is configured.
pub struct Artifacts {
    pub primary: String,
    /// `(extension, contents)` written beside the primary file.
    pub extra: Vec<(&'static str, String)>,
}

struct Built {
    model: CodeModel,
    code: Option<GaugeCode>,
}

fn layout(name: &str) -> RbhLayout {
    match name {
        "cylinder" => RbhLayout::Cylinder,
        "torus-interval" => RbhLayout::TorusInterval,
        "half-space" => RbhLayout::HalfSpace,
        _ => RbhLayout::Box,
    }
}

/// `size` is L for the rbh families and the colex size otherwise.
fn build(cfg: &ExperimentConfig, size: usize) -> Result<Built> {
    Ok(match cfg.model {
        ModelKind::Rbh | ModelKind::RbhTrivial => {
            if size < 2 {
                bail!("rbh models need L >= 2, got {size}");
            }
            let trivial = cfg.model == ModelKind::RbhTrivial;
            Built { model: build_rbh_layout(layout(&cfg.layout), size, trivial)?, code: None }
        }
        ModelKind::Gcc => {
            let colex = match &cfg.colex_text {
                Some(text) => Colex::from_text(text).context("parsing colex file")?,
                None => Colex::tetrahedral(size)?,
            };
            let code = build_gcc(colex)?;
            Built { model: code.model()?, code: Some(code) }
        }
        ModelKind::Color2d => Built { model: build_color2d(Colex2::sphere(size)?)?, code: None },
    })
}

fn sizes(cfg: &ExperimentConfig) -> Vec<usize> {
    match cfg.model {
        ModelKind::Rbh | ModelKind::RbhTrivial => cfg.l.clone(),
        // a colex file fixes the geometry
        ModelKind::Gcc if cfg.colex_text.is_some() => vec![0],
        _ => cfg.size.clone(),
    }
}

fn moves(cfg: &ExperimentConfig, m: &CodeModel) -> Result<MoveSet> {
    Ok(match cfg.symmetry {
        SymmetryMode::Enforced => derive_moveset(m, cfg.move_radius)?,
        SymmetryMode::None => unrestricted_moveset(m),
    })
}

fn header(cfg: &ExperimentConfig) -> Value {
    json!({ "version": VERSION, "config_hash": cfg.hash(), "config": cfg })
}

fn csv_preamble(cfg: &ExperimentConfig) -> String {
    format!("# selfcorr {VERSION}\n# config_hash {}\n", cfg.hash())
}

fn pretty(v: &Value) -> Result<String> {
    Ok(serde_json::to_string_pretty(v)? + "\n")
}

pub fn build_cmd(cfg: &ExperimentConfig) -> Result<Artifacts> {
    let mut models = Vec::new();
    for size in sizes(cfg) {
        let b = build(cfg, size)?;
        let dump: Value = serde_json::from_str(&b.model.to_json()?)?;
        models.push(json!({ "size": size, "k": b.model.k(), "num_terms": b.model.num_terms(), "model": dump }));
    }
    let mut out = header(cfg);
    out["models"] = Value::Array(models);
    Ok(Artifacts { primary: pretty(&out)?, extra: vec![] })
}

pub fn barrier_cmd(cfg: &ExperimentConfig) -> Result<Artifacts> {
    let mut rows = Vec::new();
    for size in sizes(cfg) {
        let b = build(cfg, size)?;
        let m = &b.model;
        let ms = moves(cfg, m)?;
        let r = logical_barrier(m, &ms, BarrierOptions { max_energy: cfg.max_energy, max_nodes: cfg.max_nodes })?;
        let ops = witness_ops(&r, &ms);
        let replayed = if ops.is_empty() { None } else { Some(trace_max(&replay(&ops, m)?)) };
        // wall time is left out so identical runs give identical files
        rows.push(json!({
            "size": size,
            "n": m.n,
            "moves": ms.len(),
            "barrier": if r.unreachable { Value::Null } else { json!(r.barrier) },
            "found": r.found(),
            "capped": r.capped,
            "unreachable": r.unreachable,
            "explored": r.explored,
            "final_class": r.final_class,
            "witness": r.witness,
            "witness_ops": ops.iter().map(|p| p.to_string()).collect::<Vec<_>>(),
            "replay_max_energy": replayed,
        }));
    }
    let mut out = header(cfg);
    out["results"] = Value::Array(rows);
    Ok(Artifacts { primary: pretty(&out)?, extra: vec![] })
}

pub fn sample_cmd(cfg: &ExperimentConfig) -> Result<Artifacts> {
    let seed = cfg.require_seed()?;
    let mut jsonl = serde_json::to_string(&json!({ "kind": "header", "version": VERSION, "config_hash": cfg.hash() }))?;
    jsonl.push('\n');
    let mut csv = csv_preamble(cfg);
    csv.push_str("size,beta,trial,seed,events,final_energy,final_class,mean_energy\n");
    for size in sizes(cfg) {
        let b = build(cfg, size)?;
        let ms = moves(cfg, &b.model)?;
        for &beta in &cfg.beta {
            for trial in 0..cfg.trials {
                let s = trial_seed(seed, trial);
                let traj = metropolis_run(&b.model, &ms, beta, cfg.events, s)?;
                for smp in &traj.samples {
                    let line = json!({
                        "size": size, "beta": beta, "trial": trial, "time": smp.time,
                        "energy": smp.energy, "class": smp.class,
                        "syndrome": smp.syndrome.iter_ones().collect::<Vec<_>>(),
                    });
                    jsonl.push_str(&serde_json::to_string(&line)?);
                    jsonl.push('\n');
                }
                let last = traj.samples.last().expect("trajectory has samples");
                let mean = traj.samples.iter().map(|s| s.energy).sum::<f64>() / traj.samples.len() as f64;
                writeln!(
                    csv,
                    "{size},{beta},{trial},{s},{},{},{},{mean}",
                    traj.steps, last.energy, traj.final_class
                )?;
            }
        }
    }
    Ok(Artifacts { primary: jsonl, extra: vec![("csv", csv)] })
}

pub fn memory_cmd(cfg: &ExperimentConfig) -> Result<Artifacts> {
    let seed = cfg.require_seed()?;
    let mut csv = csv_preamble(cfg);
    csv.push_str("model,size,beta,trials,n,moves,tau,ci_low,ci_high,censored\n");
    let name = serde_json::to_value(cfg.model)?;
    let name = name.as_str().unwrap_or_default();
    for size in sizes(cfg) {
        let b = build(cfg, size)?;
        let m = &b.model;
        if m.k() == 0 {
            bail!("model at size {size} encodes no logical qubits; nothing to remember");
        }
        let ms = moves(cfg, m)?;
        let rbh_dec;
        let cluster_dec;
        let dec: &dyn ClassDecoder = match cfg.model {
            ModelKind::Rbh | ModelKind::RbhTrivial => {
                rbh_dec = RbhDecoder::new(m)?;
                &rbh_dec
            }
            _ => {
                cluster_dec = ClusterDecoder::new(m);
                &cluster_dec
            }
        };
        for &beta in &cfg.beta {
            let e = memory_time(m, &ms, beta, dec, cfg.trials, cfg.cap, seed ^ size as u64)?;
            writeln!(
                csv,
                "{name},{size},{beta},{},{},{},{},{},{},{}",
                e.trials, e.n, e.moves, e.tau, e.ci_low, e.ci_high, e.censored
            )?;
        }
    }
    Ok(Artifacts { primary: csv, extra: vec![] })
}

pub fn peierls_cmd(cfg: &ExperimentConfig) -> Result<Artifacts> {
    let subs: Vec<Sublattice> = match cfg.sublattice.as_str() {
        "primal" => vec![Sublattice::Primal],
        "dual" => vec![Sublattice::Dual],
        _ => vec![Sublattice::Primal, Sublattice::Dual],
    };
    let mut csv = csv_preamble(cfg);
    csv.push_str("L,sublattice,k,N(k),bound,ratio\n");
    for &l in &cfg.l {
        if l < 3 {
            bail!("loop census needs L >= 3 so that plaquettes are simple cycles, got {l}");
        }
        let cx = CellComplex::build(CubicSpec::periodic(l))?;
        for &sub in &subs {
            let census = enumerate_loops(&cx, sub, cfg.k_max);
            let rep = check_bound(&census, cfg.bound_c);
            let label = if sub == Sublattice::Primal { "primal" } else { "dual" };
            for row in &rep.rows {
                writeln!(csv, "{l},{label},{},{},{},{}", row.k, row.count, row.bound, row.ratio)?;
            }
        }
    }
    Ok(Artifacts { primary: csv, extra: vec![] })
}

pub fn gauge_verify_cmd(cfg: &ExperimentConfig) -> Result<Artifacts> {
    let mut reports = Vec::new();
    let mut all = true;
    for size in sizes(cfg) {
        let (rep, ok) = gauge_verify_one(cfg, size)?;
        all &= ok;
        reports.push(rep);
    }
    let mut out = header(cfg);
    out["reports"] = json!(reports);
    out["all_hold"] = json!(all);
    Ok(Artifacts { primary: pretty(&out)?, extra: vec![] })
}

fn gauge_verify_one(cfg: &ExperimentConfig, size: usize) -> Result<(serde_json::Value, bool)> {
    let b = build(cfg, size)?;
    let m = &b.model;
    let ext = gauge_extend(m)?;
    let mut checks = Vec::new();
    let mut all = ext.terms_fixed() && ext.round_trips();
    match cfg.model {
        ModelKind::Color2d => {
            let faces: Vec<usize> = (0..Colex2::sphere(size)?.faces.len()).collect();
            for p in [Pauli::X, Pauli::Z] {
                let surf = color2d_surface(m, &faces, p)?;
                for colors in [[0u8, 1], [0, 2], [1, 2]] {
                    let rep = verify_emergent_constraints(m, &surf, colors)?;
                    let ident = ext.ancilla_product_identity(&color_pair_terms(m, p, colors[0], colors[1])?)?;
                    all &= rep.holds && ident;
                    checks.push(json!({
                        "surface": "sphere", "pauli": format!("{p:?}"), "colors": colors,
                        "closed": rep.closed, "constraint_holds": rep.holds, "ancilla_identity": ident,
                    }));
                }
            }
        }
        ModelKind::Gcc => {
            let code = b.code.as_ref().expect("gcc models carry their code");
            let others: Vec<u8> = (0..4u8).filter(|&c| c != code.b).collect();
            for (c, cell) in code.colex.cells.iter().enumerate() {
                if cell.color != code.b {
                    continue;
                }
                let surf = gcc_cell_surface(code, m, c, Pauli::X)?;
                for i in 0..others.len() {
                    for j in i + 1..others.len() {
                        let colors = [others[i], others[j]];
                        let rep = verify_emergent_constraints(m, &surf, colors)?;
                        let ts: Vec<usize> =
                            surf.faces.iter().filter(|f| colors.contains(&f.1)).map(|f| f.2).collect();
                        let ident = ext.ancilla_product_identity(&ts)?;
                        all &= rep.holds && ident;
                        checks.push(json!({
                            "surface": format!("cell {c}"), "pauli": "X", "colors": colors,
                            "closed": rep.closed, "constraint_holds": rep.holds, "ancilla_identity": ident,
                        }));
                    }
                }
            }
        }
        _ => {}
    }
    let rep = json!({
        "size": size,
        "n": m.n,
        "ancillas": m.num_terms(),
        "terms_fixed": ext.terms_fixed(),
        "round_trips": ext.round_trips(),
        "constraints": checks,
        "all_hold": all,
    });
    Ok((rep, all))
}
