//! Cluster-state (RBH) models on cubic complexes with boundaries.
//!
//! Qubits sit on edges and faces. Every qubit except toric in-plane edges
//! carries a cluster term `X_c` times `Z` on its incident qubits, truncated to
//! the qubits that exist. Each toric facet carries dressed toric-code star and
//! plaquette terms. The trivial model swaps cluster terms for `X_c` and uses
//! undressed toric-code terms; the two are related by the CZ circuit below.

use crate::bits::Bits;
use crate::clifford::Gate;
use crate::complex::{
    AxisBoundary, CellComplex, CellRef, CubicSpec, Facet, FacetKind, SiteKind,
};
use crate::error::{Error, Result};
use crate::group::PauliGroup;
use crate::model::{CodeModel, Family, Lattice, Locality, TermKind};
use crate::pauli::PauliOperator;
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, VecDeque};
use std::sync::Arc;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum RbhLayout {
    /// Toric facet at x-low, sink at x-high, primal facets on y, dual facets on z.
    Box,
    /// As `Box` but periodic in y, so the toric facet is a cylinder with rough ends.
    Cylinder,
    /// Toric facets at both x ends, periodic in y and z.
    TorusInterval,
    /// Toric facet at x-low, primal facet at x-high, periodic in y and z.
    HalfSpace,
}

impl RbhLayout {
    pub fn spec(self, l: usize) -> CubicSpec {
        use AxisBoundary::*;
        use FacetKind::*;
        let axes = match self {
            RbhLayout::Box => [
                Open { lo: Toric, hi: Sink },
                Open { lo: Primal, hi: Primal },
                Open { lo: Dual, hi: Dual },
            ],
            RbhLayout::Cylinder => {
                [Open { lo: Toric, hi: Sink }, Periodic, Open { lo: Dual, hi: Dual }]
            }
            RbhLayout::TorusInterval => [Open { lo: Toric, hi: Toric }, Periodic, Periodic],
            RbhLayout::HalfSpace => [Open { lo: Toric, hi: Primal }, Periodic, Periodic],
        };
        CubicSpec::uniform(l, axes)
    }

    /// Half-space slab of the given depth below a `width x width` toric facet.
    pub fn half_space_spec(depth: usize, width: usize) -> CubicSpec {
        let mut s = RbhLayout::HalfSpace.spec(width);
        s.dims[0] = depth;
        s
    }

    pub fn name(self) -> &'static str {
        match self {
            RbhLayout::Box => "box",
            RbhLayout::Cylinder => "cylinder",
            RbhLayout::TorusInterval => "torus-interval",
            RbhLayout::HalfSpace => "half-space",
        }
    }
}

/// Minimal string lengths across the toric facet and into the bulk.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LatticeWidth {
    /// Shortest in-plane edge path between two distinct rough boundaries.
    pub rough: Option<usize>,
    /// Fewest in-plane edges crossed between two distinct smooth boundaries.
    pub smooth: Option<usize>,
    /// Edge distance from the toric facet to the sink facet.
    pub condensing: Option<usize>,
    pub d: usize,
}

/// Is the cell inside the plane of a facet of the given kind?
pub fn in_facet_plane(cx: &CellComplex, c: CellRef, kind: FacetKind) -> bool {
    let coord = cx.coord(c);
    cx.facets(c)
        .any(|f| cx.spec().facet_kind(f) == Some(kind) && coord[f.axis].rem_euclid(2) == 0)
}

fn toric_facets(cx: &CellComplex) -> Vec<Facet> {
    Facet::ALL.into_iter().filter(|&f| cx.spec().facet_kind(f) == Some(FacetKind::Toric)).collect()
}

fn in_plane_of(cx: &CellComplex, c: CellRef, f: Facet) -> bool {
    let coord = cx.coord(c);
    let (lo, hi) = cx.spec().range(f.axis);
    coord[f.axis] == if f.high { hi } else { lo }
}

/// Qubits incident to qubit `q` (cofaces of an edge, boundary edges of a face).
pub fn incident_qubits(cx: &CellComplex, q: usize) -> Vec<usize> {
    let c = cx.qubit_cell(q);
    let cells: &[usize] = if c.dim == 1 { cx.coboundary(c) } else { cx.boundary(c) };
    let nd = if c.dim == 1 { 2 } else { 1 };
    cells.iter().filter_map(|&id| cx.qubit_of(CellRef { dim: nd, id })).collect()
}

fn is_toric_edge(cx: &CellComplex, q: usize) -> bool {
    let c = cx.qubit_cell(q);
    c.dim == 1 && in_facet_plane(cx, c, FacetKind::Toric)
}

/// `X_e` times `Z` on qubit faces containing `e`.
pub fn dressed_x(cx: &CellComplex, q: usize) -> PauliOperator {
    let n = cx.num_qubits();
    PauliOperator::x_on(n, [q]).multiply_unsigned(&PauliOperator::z_on(n, incident_qubits(cx, q)))
}

struct TermSet {
    terms: Vec<PauliOperator>,
    kinds: Vec<TermKind>,
}

fn build_terms(cx: &CellComplex, trivial: bool) -> TermSet {
    let n = cx.num_qubits();
    let mut terms = Vec::new();
    let mut kinds = Vec::new();
    for q in 0..n {
        if is_toric_edge(cx, q) {
            continue;
        }
        let t = if trivial {
            PauliOperator::x_on(n, [q])
        } else {
            PauliOperator::x_on(n, [q]).multiply_unsigned(&PauliOperator::z_on(n, incident_qubits(cx, q)))
        };
        terms.push(t);
        kinds.push(TermKind::Cluster { qubit: q });
    }
    for v in 0..cx.count(0) {
        let vr = CellRef { dim: 0, id: v };
        if !in_facet_plane(cx, vr, FacetKind::Toric) {
            continue;
        }
        let edges: Vec<usize> = cx
            .coboundary(vr)
            .iter()
            .filter_map(|&e| cx.qubit_of(CellRef { dim: 1, id: e }))
            .filter(|&q| is_toric_edge(cx, q))
            .collect();
        if edges.is_empty() {
            continue;
        }
        let mut t = PauliOperator::identity(n);
        for &e in &edges {
            let factor = if trivial { PauliOperator::x_on(n, [e]) } else { dressed_x(cx, e) };
            t.mul_assign_unsigned(&factor);
        }
        terms.push(t);
        kinds.push(TermKind::Star { vertex: v });
    }
    for f in 0..cx.count(2) {
        let fr = CellRef { dim: 2, id: f };
        if !in_facet_plane(cx, fr, FacetKind::Toric) {
            continue;
        }
        let edges: Vec<usize> =
            cx.boundary(fr).iter().filter_map(|&e| cx.qubit_of(CellRef { dim: 1, id: e })).collect();
        if edges.is_empty() {
            continue;
        }
        terms.push(PauliOperator::z_on(n, edges));
        kinds.push(TermKind::Plaquette { face: f });
    }
    TermSet { terms, kinds }
}

/// Vertex and cube symmetry generators that are nontrivial and commute with
/// every cluster-model term, plus the cell each came from.
fn build_symmetry(cx: &CellComplex, terms: &[PauliOperator]) -> (Vec<PauliOperator>, Vec<CellRef>) {
    let n = cx.num_qubits();
    let mut gens = Vec::new();
    let mut cells = Vec::new();
    let candidates = (0..cx.count(0))
        .map(|v| CellRef { dim: 0, id: v })
        .chain((0..cx.count(3)).map(|q| CellRef { dim: 3, id: q }));
    for c in candidates {
        let (list, nd) = if c.dim == 0 { (cx.coboundary(c), 1) } else { (cx.boundary(c), 2) };
        let qs: Vec<usize> = list.iter().filter_map(|&id| cx.qubit_of(CellRef { dim: nd, id })).collect();
        if qs.is_empty() {
            continue;
        }
        let g = PauliOperator::x_on(n, qs);
        if terms.iter().all(|t| t.commutes_unchecked(&g)) {
            gens.push(g);
            cells.push(c);
        }
    }
    (gens, cells)
}

fn cubic_locality(cx: &CellComplex) -> Locality {
    let ne = cx.count(1);
    let mut adjacency = vec![Vec::new(); ne + cx.count(2)];
    let mut site_qubit = Vec::with_capacity(adjacency.len());
    for e in 0..ne {
        site_qubit.push(cx.qubit_of(CellRef { dim: 1, id: e }));
    }
    for f in 0..cx.count(2) {
        site_qubit.push(cx.qubit_of(CellRef { dim: 2, id: f }));
        for &e in cx.boundary(CellRef { dim: 2, id: f }) {
            adjacency[ne + f].push(e);
            adjacency[e].push(ne + f);
        }
    }
    Locality { adjacency, site_qubit }
}

fn qubit_labels(cx: &CellComplex) -> Vec<String> {
    cx.qubits()
        .iter()
        .map(|s| {
            let c = cx.coord(CellRef { dim: s.dim, id: s.cell });
            let tag = if s.kind == SiteKind::Dual { 'e' } else { 'f' };
            format!("{tag}({},{},{})", c[0], c[1], c[2])
        })
        .collect()
}

/// Explicit string logicals for layouts whose toric facet is x-low with rough
/// z ends: Z on the in-plane z-edges at y = 0 and dressed X on the in-plane
/// z-edges at z = 1.
fn string_logicals(cx: &CellComplex, trivial: bool) -> Option<(PauliOperator, PauliOperator)> {
    let spec = cx.spec();
    let AxisBoundary::Open { lo: FacetKind::Toric, .. } = spec.axes[0] else { return None };
    let AxisBoundary::Open { lo: FacetKind::Dual, hi: FacetKind::Dual } = spec.axes[2] else { return None };
    let n = cx.num_qubits();
    let (ylo, yhi) = spec.range(1);
    let (zlo, zhi) = spec.range(2);
    let edge = |y: i32, z: i32| cx.find([0, y, z]).and_then(|c| cx.qubit_of(c));
    let zs: Option<Vec<usize>> = (zlo..=zhi).step_by(2).map(|z| edge(0, z)).collect();
    let zbar = PauliOperator::z_on(n, zs?);
    let mut xbar = PauliOperator::identity(n);
    let ystop = if matches!(spec.axes[1], AxisBoundary::Periodic) { yhi - 1 } else { yhi };
    for y in (ylo..=ystop).step_by(2) {
        let q = edge(y, zlo)?;
        let f = if trivial { PauliOperator::x_on(n, [q]) } else { dressed_x(cx, q) };
        xbar.mul_assign_unsigned(&f);
    }
    Some((xbar, zbar))
}

pub fn lattice_width(cx: &CellComplex) -> LatticeWidth {
    let mut rough: Option<usize> = None;
    let mut smooth: Option<usize> = None;
    let min_opt = |a: Option<usize>, b: Option<usize>| match (a, b) {
        (Some(x), Some(y)) => Some(x.min(y)),
        (x, None) => x,
        (None, y) => y,
    };
    for tf in toric_facets(cx) {
        // rough: vertices of the plane, terminals for dangling edges by facet
        let verts: Vec<usize> =
            (0..cx.count(0)).filter(|&v| in_plane_of(cx, CellRef { dim: 0, id: v }, tf)).collect();
        let vidx: BTreeMap<usize, usize> = verts.iter().enumerate().map(|(i, &v)| (v, i)).collect();
        let mut links: Vec<(usize, Option<usize>, Vec<Facet>)> = Vec::new();
        for e in 0..cx.count(1) {
            let er = CellRef { dim: 1, id: e };
            if !in_plane_of(cx, er, tf) || cx.qubit_of(er).is_none() {
                continue;
            }
            let ends: Vec<usize> = cx.boundary(er).iter().filter_map(|v| vidx.get(v).copied()).collect();
            let other: Vec<Facet> = cx
                .facets(er)
                .filter(|&f| f != tf && cx.spec().facet_kind(f) == Some(FacetKind::Dual))
                .collect();
            match ends.as_slice() {
                [a, b] => links.push((*a, Some(*b), other)),
                [a] => links.push((*a, None, other)),
                _ => {}
            }
        }
        rough = min_opt(rough, terminal_distance(verts.len(), &links));

        // smooth: plaquettes of the plane, terminals for edges with one plaquette
        let faces: Vec<usize> =
            (0..cx.count(2)).filter(|&f| in_plane_of(cx, CellRef { dim: 2, id: f }, tf)).collect();
        let fidx: BTreeMap<usize, usize> = faces.iter().enumerate().map(|(i, &f)| (f, i)).collect();
        let mut links = Vec::new();
        for e in 0..cx.count(1) {
            let er = CellRef { dim: 1, id: e };
            if !in_plane_of(cx, er, tf) || cx.qubit_of(er).is_none() {
                continue;
            }
            let adj: Vec<usize> = cx.coboundary(er).iter().filter_map(|f| fidx.get(f).copied()).collect();
            let other: Vec<Facet> = cx
                .facets(er)
                .filter(|&f| f != tf && cx.spec().facet_kind(f).is_some_and(|k| k.is_smooth()))
                .collect();
            match adj.as_slice() {
                [a, b] => links.push((*a, Some(*b), other)),
                [a] => links.push((*a, None, other)),
                _ => {}
            }
        }
        smooth = min_opt(smooth, terminal_distance(faces.len(), &links));
    }
    let sinks: Vec<usize> = (0..cx.count(0))
        .filter(|&v| in_facet_plane(cx, CellRef { dim: 0, id: v }, FacetKind::Sink))
        .collect();
    let toric: Vec<usize> = (0..cx.count(0))
        .filter(|&v| in_facet_plane(cx, CellRef { dim: 0, id: v }, FacetKind::Toric))
        .collect();
    let condensing = if sinks.is_empty() || toric.is_empty() {
        None
    } else {
        let dist = cx.bfs(0, &toric);
        sinks.iter().filter_map(|&v| dist[v]).min()
    };
    let d = [rough, smooth, condensing].into_iter().flatten().min().unwrap_or(0);
    LatticeWidth { rough, smooth, condensing, d }
}

/// Shortest path between two different boundary terminals; each link is a
/// graph edge, or a half-edge to the terminals named by its facets.
fn terminal_distance(nodes: usize, links: &[(usize, Option<usize>, Vec<Facet>)]) -> Option<usize> {
    let mut adj = vec![Vec::new(); nodes];
    let mut terminals: BTreeMap<Facet, Vec<usize>> = BTreeMap::new();
    for (a, b, fs) in links {
        match b {
            Some(b) => {
                adj[*a].push(*b);
                adj[*b].push(*a);
            }
            None => {
                for f in fs {
                    terminals.entry(*f).or_default().push(*a);
                }
            }
        }
    }
    let keys: Vec<Facet> = terminals.keys().copied().collect();
    let mut best: Option<usize> = None;
    for (i, ka) in keys.iter().enumerate() {
        let mut dist = vec![usize::MAX; nodes];
        let mut queue = VecDeque::new();
        for &s in &terminals[ka] {
            if dist[s] == usize::MAX {
                dist[s] = 1;
                queue.push_back(s);
            }
        }
        while let Some(u) = queue.pop_front() {
            for &w in &adj[u] {
                if dist[w] == usize::MAX {
                    dist[w] = dist[u] + 1;
                    queue.push_back(w);
                }
            }
        }
        for kb in &keys[i + 1..] {
            if let Some(d) = terminals[kb].iter().map(|&s| dist[s]).filter(|&d| d != usize::MAX).min() {
                best = Some(best.map_or(d + 1, |b| b.min(d + 1)));
            }
        }
    }
    best
}

/// Build a cluster (or trivial) model on an arbitrary cubic layout.
pub fn build_rbh_on(spec: CubicSpec, trivial: bool) -> Result<CodeModel> {
    if spec.dims.iter().any(|&d| d < 2) {
        return Err(Error::Invalid("lattice dimensions must be at least 2".into()));
    }
    let cx = Arc::new(CellComplex::build(spec)?);
    let n = cx.num_qubits();
    let cluster = build_terms(&cx, false);
    let (sym_gens, sym_cells) = build_symmetry(&cx, &cluster.terms);
    let ts = if trivial { build_terms(&cx, true) } else { cluster };
    let symmetry = PauliGroup::new(n, sym_gens)?;
    let logicals = match string_logicals(&cx, trivial) {
        Some(pair) => vec![pair],
        None => PauliGroup::new(n, ts.terms.clone())?.logical_operators()?,
    };
    let width = lattice_width(&cx);
    let labels = qubit_labels(&cx);
    let locality = cubic_locality(&cx);
    let family = if trivial { Family::Trivial } else { Family::Rbh };
    let mut m = CodeModel::new(
        family,
        if trivial { "trivial" } else { "rbh" },
        ts.terms,
        ts.kinds,
        symmetry,
        logicals,
        Lattice::Cubic(cx.clone()),
        locality,
        labels,
    )?;
    let spec = cx.spec();
    m.meta.insert("dims".into(), serde_json::json!(spec.dims));
    m.meta.insert("axes".into(), serde_json::to_value(spec.axes)?);
    m.meta.insert("lattice_width".into(), serde_json::to_value(width)?);
    m.meta.insert(
        "facet_partition".into(),
        serde_json::json!(cx
            .facet_partition()
            .into_iter()
            .map(|((f, d), c)| format!("{f} dim{d}: {c}"))
            .collect::<Vec<_>>()),
    );
    m.meta.insert(
        "line_rule".into(),
        serde_json::json!("where facets meet, a cell without a qubit on either facet has none"),
    );
    m.meta.insert(
        "symmetry_cells".into(),
        serde_json::json!(sym_cells.iter().map(|c| cx.coord(*c)).collect::<Vec<_>>()),
    );
    Ok(m)
}

pub fn build_rbh_layout(layout: RbhLayout, l: usize, trivial: bool) -> Result<CodeModel> {
    let mut m = build_rbh_on(layout.spec(l), trivial)?;
    m.meta.insert("layout".into(), serde_json::json!(layout.name()));
    m.meta.insert("L".into(), serde_json::json!(l));
    Ok(m)
}

/// Cluster model on the box layout.
pub fn build_cubic_rbh(l: usize) -> Result<CodeModel> {
    if l < 2 {
        return Err(Error::Invalid("L must be at least 2".into()));
    }
    build_rbh_layout(RbhLayout::Box, l, false)
}

/// Trivial comparison model. Uses the cylinder layout: on the box the smooth
/// y edges let a single plaquette excitation condense, which halves the barrier.
pub fn build_trivial_model(l: usize) -> Result<CodeModel> {
    if l < 2 {
        return Err(Error::Invalid("L must be at least 2".into()));
    }
    build_rbh_layout(RbhLayout::Cylinder, l, true)
}

pub fn cubic(m: &CodeModel) -> Result<&CellComplex> {
    match &m.lattice {
        Lattice::Cubic(c) => Ok(c),
        _ => Err(Error::Invalid("model is not on a cubic lattice".into())),
    }
}

/// CZ on every incident (face, edge) qubit pair.
pub fn disentangling_circuit(cx: &CellComplex) -> Vec<Gate> {
    let mut gates = Vec::new();
    for q in 0..cx.num_qubits() {
        if cx.qubit_cell(q).dim == 2 {
            for e in incident_qubits(cx, q) {
                gates.push(Gate::Cz(q, e));
            }
        }
    }
    gates
}

/// `Z` on the given edge and face cells (cells without qubits are skipped).
pub fn excitation_operator(cx: &CellComplex, edges: &[usize], faces: &[usize]) -> PauliOperator {
    let qs = edges
        .iter()
        .filter_map(|&e| cx.qubit_of(CellRef { dim: 1, id: e }))
        .chain(faces.iter().filter_map(|&f| cx.qubit_of(CellRef { dim: 2, id: f })));
    PauliOperator::z_on(cx.num_qubits(), qs)
}

/// Structural symmetry check on a syndrome of a cluster model: at each vertex
/// with a symmetry generator the flipped cluster terms of its qubit edges plus
/// its star term must be even, and likewise at each cube for its qubit faces
/// plus the plaquette it borders on a toric facet.
pub fn rbh_syndrome_consistent(m: &CodeModel, s: &Bits) -> Result<bool> {
    let cx = cubic(m)?;
    let mut cluster_of = vec![None; m.n];
    let mut star_of = BTreeMap::new();
    let mut plaq_of = BTreeMap::new();
    for (i, k) in m.term_kind.iter().enumerate() {
        match *k {
            TermKind::Cluster { qubit } => cluster_of[qubit] = Some(i),
            TermKind::Star { vertex } => {
                star_of.insert(vertex, i);
            }
            TermKind::Plaquette { face } => {
                plaq_of.insert(face, i);
            }
            _ => {}
        }
    }
    let flipped = |t: Option<usize>| t.is_some_and(|t| s.get(t));
    for g in m.symmetry.generators() {
        // recover the cell from the generator's support
        let q0 = g.support()[0];
        let c0 = cx.qubit_cell(q0);
        let candidates: Vec<CellRef> = if c0.dim == 1 {
            cx.boundary(c0).iter().map(|&v| CellRef { dim: 0, id: v }).collect()
        } else {
            cx.coboundary(c0).iter().map(|&q| CellRef { dim: 3, id: q }).collect()
        };
        let cell = candidates
            .into_iter()
            .find(|&c| {
                let (list, nd) = if c.dim == 0 { (cx.coboundary(c), 1) } else { (cx.boundary(c), 2) };
                let qs: Vec<usize> =
                    list.iter().filter_map(|&id| cx.qubit_of(CellRef { dim: nd, id })).collect();
                PauliOperator::x_on(m.n, qs) == *g
            })
            .ok_or_else(|| Error::Inconsistent("symmetry generator without a cell".into()))?;
        let mut parity = false;
        if cell.dim == 0 {
            for &e in cx.coboundary(cell) {
                if let Some(q) = cx.qubit_of(CellRef { dim: 1, id: e }) {
                    parity ^= flipped(cluster_of[q]);
                }
            }
            parity ^= flipped(star_of.get(&cell.id).copied());
        } else {
            for &f in cx.boundary(cell) {
                match cx.qubit_of(CellRef { dim: 2, id: f }) {
                    Some(q) => parity ^= flipped(cluster_of[q]),
                    None => parity ^= flipped(plaq_of.get(&f).copied()),
                }
            }
        }
        if parity {
            return Ok(false);
        }
    }
    Ok(true)
}
