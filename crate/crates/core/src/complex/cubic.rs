//! Cubic cell complexes in doubled integer coordinates.
//!
//! A cell is a point `c` of `Z^3`; its dimension is the number of odd
//! coordinates. Vertices have all coordinates even, cubes all odd. The boundary
//! of `c` is `c ± e_i` over odd axes `i`, the coboundary `c ± e_i` over even axes.

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, HashMap, VecDeque};

pub type Coord = [i32; 3];

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum FacetKind {
    Toric,
    Primal,
    Dual,
    Sink,
}

impl FacetKind {
    /// Smooth facets end on a plane of vertices; dual facets end on a layer of cubes.
    pub fn is_smooth(self) -> bool {
        !matches!(self, FacetKind::Dual)
    }

    /// Vertices on such a facet carry no vertex symmetry, so dual strings may end there.
    pub fn exempts_vertices(self) -> bool {
        matches!(self, FacetKind::Sink)
    }

    pub fn name(self) -> &'static str {
        match self {
            FacetKind::Toric => "TORIC",
            FacetKind::Primal => "PRIMAL",
            FacetKind::Dual => "DUAL",
            FacetKind::Sink => "SINK",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Facet {
    pub axis: usize,
    pub high: bool,
}

impl Facet {
    pub const ALL: [Facet; 6] = [
        Facet { axis: 0, high: false },
        Facet { axis: 0, high: true },
        Facet { axis: 1, high: false },
        Facet { axis: 1, high: true },
        Facet { axis: 2, high: false },
        Facet { axis: 2, high: true },
    ];

    pub fn bit(self) -> u8 {
        1 << (2 * self.axis + self.high as usize)
    }

    pub fn name(self) -> String {
        format!("{}{}", if self.high { "+" } else { "-" }, ["x", "y", "z"][self.axis])
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum AxisBoundary {
    Periodic,
    Open { lo: FacetKind, hi: FacetKind },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CubicSpec {
    /// Number of unit cells along each axis.
    pub dims: [usize; 3],
    pub axes: [AxisBoundary; 3],
}

impl CubicSpec {
    pub fn new(dims: [usize; 3], axes: [AxisBoundary; 3]) -> Self {
        Self { dims, axes }
    }

    pub fn uniform(l: usize, axes: [AxisBoundary; 3]) -> Self {
        Self { dims: [l; 3], axes }
    }

    pub fn periodic(l: usize) -> Self {
        Self::uniform(l, [AxisBoundary::Periodic; 3])
    }

    /// Build from a facet map and periodic flags; a labelled facet on a
    /// periodic axis, or a missing label on an open axis, is an error.
    pub fn from_facets(
        dims: [usize; 3],
        facets: &BTreeMap<Facet, FacetKind>,
        periodic: [bool; 3],
    ) -> Result<Self> {
        let mut axes = [AxisBoundary::Periodic; 3];
        for a in 0..3 {
            let lo = facets.get(&Facet { axis: a, high: false });
            let hi = facets.get(&Facet { axis: a, high: true });
            axes[a] = match (periodic[a], lo, hi) {
                (true, None, None) => AxisBoundary::Periodic,
                (true, _, _) => {
                    return Err(Error::Invalid(format!("axis {a} is periodic but has facet labels")))
                }
                (false, Some(&lo), Some(&hi)) => AxisBoundary::Open { lo, hi },
                (false, _, _) => {
                    return Err(Error::Invalid(format!("axis {a} is open but lacks facet labels")))
                }
            };
        }
        Ok(Self { dims, axes })
    }

    pub fn facet_kind(&self, f: Facet) -> Option<FacetKind> {
        match self.axes[f.axis] {
            AxisBoundary::Periodic => None,
            AxisBoundary::Open { lo, hi } => Some(if f.high { hi } else { lo }),
        }
    }

    /// Coordinate range `[lo, hi]` (inclusive) on an axis; for periodic axes
    /// `[0, 2L - 1]` with wrap-around.
    pub fn range(&self, axis: usize) -> (i32, i32) {
        let l2 = 2 * self.dims[axis] as i32;
        match self.axes[axis] {
            AxisBoundary::Periodic => (0, l2 - 1),
            AxisBoundary::Open { lo, hi } => {
                (if lo.is_smooth() { 0 } else { 1 }, if hi.is_smooth() { l2 } else { l2 - 1 })
            }
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum SiteKind {
    /// Qubit on a face.
    Primal,
    /// Qubit on an edge.
    Dual,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct QubitSite {
    pub dim: usize,
    pub cell: usize,
    pub kind: SiteKind,
}

/// Reference to a cell: dimension and index within that dimension.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct CellRef {
    pub dim: usize,
    pub id: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DistanceKind {
    /// Vertices joined by edges.
    Dual,
    /// Cubes joined by faces.
    Primal,
}

#[derive(Clone, Debug)]
pub struct CellComplex {
    spec: CubicSpec,
    cells: [Vec<Coord>; 4],
    index: HashMap<Coord, usize>,
    boundary: [Vec<Vec<usize>>; 4],
    coboundary: [Vec<Vec<usize>>; 4],
    facet_mask: [Vec<u8>; 4],
    qubits: Vec<QubitSite>,
    qubit_of: [Vec<Option<usize>>; 4],
}

fn dim_of(c: &Coord) -> usize {
    c.iter().filter(|&&v| v.rem_euclid(2) == 1).count()
}

impl CellComplex {
    pub fn build(spec: CubicSpec) -> Result<Self> {
        if spec.dims.iter().any(|&d| d < 1) {
            return Err(Error::Invalid("every dimension must be at least 1".into()));
        }
        let ranges: Vec<(i32, i32)> = (0..3).map(|a| spec.range(a)).collect();
        let mut cells: [Vec<Coord>; 4] = Default::default();
        for x in ranges[0].0..=ranges[0].1 {
            for y in ranges[1].0..=ranges[1].1 {
                for z in ranges[2].0..=ranges[2].1 {
                    let c = [x, y, z];
                    cells[dim_of(&c)].push(c);
                }
            }
        }
        let mut index = HashMap::new();
        for list in &cells {
            for (i, c) in list.iter().enumerate() {
                index.insert(*c, i);
            }
        }
        let mut cx = CellComplex {
            spec,
            cells,
            index,
            boundary: Default::default(),
            coboundary: Default::default(),
            facet_mask: Default::default(),
            qubits: Vec::new(),
            qubit_of: Default::default(),
        };
        for d in 0..4 {
            let mut bd = Vec::with_capacity(cx.cells[d].len());
            let mut cbd = Vec::with_capacity(cx.cells[d].len());
            let mut masks = Vec::with_capacity(cx.cells[d].len());
            for c in &cx.cells[d] {
                let mut b = Vec::new();
                let mut cb = Vec::new();
                for a in 0..3 {
                    for s in [-1, 1] {
                        let mut n = *c;
                        n[a] += s;
                        if let Some(n) = cx.normalize(n) {
                            if let Some(&id) = cx.index.get(&n) {
                                if c[a].rem_euclid(2) == 1 {
                                    b.push(id);
                                } else {
                                    cb.push(id);
                                }
                            }
                        }
                    }
                }
                b.sort_unstable();
                b.dedup();
                cb.sort_unstable();
                cb.dedup();
                bd.push(b);
                cbd.push(cb);
                masks.push(cx.facets_of(c));
            }
            cx.boundary[d] = bd;
            cx.coboundary[d] = cbd;
            cx.facet_mask[d] = masks;
        }
        cx.place_qubits();
        Ok(cx)
    }

    /// Wrap periodic axes; `None` when outside an open axis range.
    fn normalize(&self, mut c: Coord) -> Option<Coord> {
        for a in 0..3 {
            let (lo, hi) = self.spec.range(a);
            match self.spec.axes[a] {
                AxisBoundary::Periodic => c[a] = c[a].rem_euclid(hi + 1),
                AxisBoundary::Open { .. } => {
                    if c[a] < lo || c[a] > hi {
                        return None;
                    }
                }
            }
        }
        Some(c)
    }

    fn facets_of(&self, c: &Coord) -> u8 {
        let mut m = 0;
        for f in Facet::ALL {
            if self.spec.facet_kind(f).is_none() {
                continue;
            }
            let (lo, hi) = self.spec.range(f.axis);
            if c[f.axis] == if f.high { hi } else { lo } {
                m |= f.bit();
            }
        }
        m
    }

    fn place_qubits(&mut self) {
        for d in 0..4 {
            self.qubit_of[d] = vec![None; self.cells[d].len()];
        }
        for d in [1usize, 2] {
            for id in 0..self.cells[d].len() {
                let c = self.cells[d][id];
                let mut allowed = true;
                for f in self.facets(CellRef { dim: d, id }) {
                    // only cells lying inside a smooth facet plane are restricted
                    if c[f.axis].rem_euclid(2) != 0 {
                        continue;
                    }
                    match (self.spec.facet_kind(f), d) {
                        (Some(FacetKind::Toric), 2) | (Some(FacetKind::Sink), 1) => allowed = false,
                        _ => {}
                    }
                }
                if allowed {
                    let kind = if d == 1 { SiteKind::Dual } else { SiteKind::Primal };
                    self.qubit_of[d][id] = Some(self.qubits.len());
                    self.qubits.push(QubitSite { dim: d, cell: id, kind });
                }
            }
        }
    }

    pub fn spec(&self) -> &CubicSpec {
        &self.spec
    }

    pub fn count(&self, dim: usize) -> usize {
        self.cells[dim].len()
    }

    pub fn coord(&self, c: CellRef) -> Coord {
        self.cells[c.dim][c.id]
    }

    pub fn coords(&self, dim: usize) -> &[Coord] {
        &self.cells[dim]
    }

    /// Cell at a coordinate (periodic axes wrap).
    pub fn find(&self, c: Coord) -> Option<CellRef> {
        let c = self.normalize(c)?;
        self.index.get(&c).map(|&id| CellRef { dim: dim_of(&c), id })
    }

    pub fn boundary(&self, c: CellRef) -> &[usize] {
        &self.boundary[c.dim][c.id]
    }

    pub fn coboundary(&self, c: CellRef) -> &[usize] {
        &self.coboundary[c.dim][c.id]
    }

    pub fn facets(&self, c: CellRef) -> impl Iterator<Item = Facet> + '_ {
        let m = self.facet_mask[c.dim][c.id];
        Facet::ALL.into_iter().filter(move |f| m & f.bit() != 0)
    }

    /// Facet kinds of the facets the cell lies on.
    pub fn facet_labels(&self, c: CellRef) -> Vec<FacetKind> {
        self.facets(c).filter_map(|f| self.spec.facet_kind(f)).collect()
    }

    /// Interior iff the coboundary has bulk cardinality (6 for vertices, 4 for
    /// edges, 2 for faces); cubes are interior iff all six faces exist.
    pub fn is_interior(&self, c: CellRef) -> bool {
        match c.dim {
            3 => self.boundary(c).len() == 6,
            d => self.coboundary(c).len() == 2 * (3 - d),
        }
    }

    pub fn qubits(&self) -> &[QubitSite] {
        &self.qubits
    }

    pub fn num_qubits(&self) -> usize {
        self.qubits.len()
    }

    pub fn qubit_of(&self, c: CellRef) -> Option<usize> {
        self.qubit_of[c.dim][c.id]
    }

    pub fn qubit_cell(&self, q: usize) -> CellRef {
        let s = self.qubits[q];
        CellRef { dim: s.dim, id: s.cell }
    }

    /// BFS distance between two vertices (Dual) or two cubes (Primal).
    pub fn lattice_distance(&self, a: CellRef, b: CellRef, kind: DistanceKind) -> Result<usize> {
        let dim = match kind {
            DistanceKind::Dual => 0,
            DistanceKind::Primal => 3,
        };
        if a.dim != dim || b.dim != dim {
            return Err(Error::Invalid("cells do not match the distance kind".into()));
        }
        let dist = self.bfs(dim, &[a.id]);
        dist[b.id].ok_or_else(|| Error::Invalid("cells are disconnected".into()))
    }

    /// Multi-source BFS over vertices (via edges) or cubes (via faces).
    pub fn bfs(&self, dim: usize, sources: &[usize]) -> Vec<Option<usize>> {
        let mut dist = vec![None; self.count(dim)];
        let mut queue = VecDeque::new();
        for &s in sources {
            dist[s] = Some(0);
            queue.push_back(s);
        }
        while let Some(u) = queue.pop_front() {
            let du = dist[u].unwrap();
            for nb in self.neighbors(dim, u) {
                if dist[nb].is_none() {
                    dist[nb] = Some(du + 1);
                    queue.push_back(nb);
                }
            }
        }
        dist
    }

    /// Vertices sharing an edge, or cubes sharing a face.
    pub fn neighbors(&self, dim: usize, id: usize) -> Vec<usize> {
        let mut out = Vec::new();
        let c = CellRef { dim, id };
        match dim {
            0 => {
                for &e in self.coboundary(c) {
                    out.extend(self.boundary[1][e].iter().copied().filter(|&v| v != id));
                }
            }
            3 => {
                for &f in self.boundary(c) {
                    out.extend(self.coboundary[2][f].iter().copied().filter(|&q| q != id));
                }
            }
            _ => panic!("neighbors only defined for vertices and cubes"),
        }
        out
    }

    fn vertex_exempt(&self, v: usize) -> bool {
        self.facets(CellRef { dim: 0, id: v })
            .any(|f| self.spec.facet_kind(f).is_some_and(|k| k.exempts_vertices()))
    }

    fn cube_exempt(&self, _q: usize) -> bool {
        false
    }

    /// Every non-exempt vertex touches an even number of the edges.
    pub fn is_cycle(&self, edges: &[usize]) -> bool {
        let mut parity = vec![false; self.count(0)];
        for &e in edges {
            for &v in &self.boundary[1][e] {
                parity[v] ^= true;
            }
        }
        parity.iter().enumerate().all(|(v, &p)| !p || self.vertex_exempt(v))
    }

    /// Every non-exempt cube contains an even number of the faces.
    pub fn is_cocycle(&self, faces: &[usize]) -> bool {
        let mut parity = vec![false; self.count(3)];
        for &f in faces {
            for &q in &self.coboundary[2][f] {
                parity[q] ^= true;
            }
        }
        parity.iter().enumerate().all(|(q, &p)| !p || self.cube_exempt(q))
    }

    /// Per-facet cell counts `(facet, dim) -> count` for reporting.
    pub fn facet_partition(&self) -> BTreeMap<(String, usize), usize> {
        let mut out = BTreeMap::new();
        for d in 0..4 {
            for id in 0..self.count(d) {
                for f in self.facets(CellRef { dim: d, id }) {
                    *out.entry((f.name(), d)).or_insert(0) += 1;
                }
            }
        }
        out
    }
}
