//! Gauge color code on a tetrahedral 3-colex and its commuting single-color model.
//!
//! Regions of the colex are its 3-cells plus the four boundary facets. The
//! dual graph has one node per region and one edge per face; a face of color
//! pair `uv` joins the two regions of the complementary colors.

use crate::bits::Bits;
use crate::complex::colex::{complement, Color};
use crate::complex::Colex;
use crate::error::{Error, Result};
use crate::group::PauliGroup;
use crate::model::{CodeModel, Family, Lattice, Locality, TermKind};
use crate::pauli::{Pauli, PauliOperator};
use serde::{Deserialize, Serialize};
use std::collections::VecDeque;
use std::sync::Arc;

#[derive(Clone, Debug)]
pub struct GaugeCode {
    pub colex: Arc<Colex>,
    /// Color excluded from the commuting face set; also the outer facet color.
    pub b: Color,
    /// X and Z operators on every face.
    pub gauge_generators: PauliGroup,
    /// X and Z operators on every 3-cell.
    pub stabilizer: PauliGroup,
    /// X terms then Z terms on the faces whose color pair avoids `b`.
    pub commuting_terms: Vec<PauliOperator>,
    pub term_faces: Vec<(usize, Pauli)>,
    pub bare_logicals: (PauliOperator, PauliOperator),
}

fn face_op(colex: &Colex, f: usize, p: Pauli) -> PauliOperator {
    PauliOperator::on(colex.n, colex.faces[f].vertices.iter().copied(), p)
}

fn cell_op(colex: &Colex, c: usize, p: Pauli) -> PauliOperator {
    PauliOperator::on(colex.n, colex.cells[c].vertices.iter().copied(), p)
}

/// Commuting model with the outer facet color as `b`.
pub fn build_gcc(colex: Colex) -> Result<GaugeCode> {
    let b = colex.outer;
    build_gcc_with_color(colex, b)
}

pub fn build_gcc_with_color(colex: Colex, b: Color) -> Result<GaugeCode> {
    colex.validate()?;
    if b != colex.outer {
        return Err(Error::InvalidColex(format!(
            "commuting color {} must be the outer facet color {}",
            crate::complex::colex::color_name(b),
            crate::complex::colex::color_name(colex.outer)
        )));
    }
    if colex.n % 2 == 0 {
        return Err(Error::InvalidColex("even qubit count has no bare logical pair".into()));
    }
    let n = colex.n;
    let mut gauge = Vec::new();
    for p in [Pauli::X, Pauli::Z] {
        for f in 0..colex.faces.len() {
            gauge.push(face_op(&colex, f, p));
        }
    }
    let mut stab = Vec::new();
    for p in [Pauli::X, Pauli::Z] {
        for c in 0..colex.cells.len() {
            stab.push(cell_op(&colex, c, p));
        }
    }
    let mut commuting_terms = Vec::new();
    let mut term_faces = Vec::new();
    for p in [Pauli::X, Pauli::Z] {
        for (f, face) in colex.faces.iter().enumerate() {
            if !face.colors.contains(&b) {
                commuting_terms.push(face_op(&colex, f, p));
                term_faces.push((f, p));
            }
        }
    }
    let bare = (PauliOperator::x_on(n, 0..n), PauliOperator::z_on(n, 0..n));
    Ok(GaugeCode {
        colex: Arc::new(colex),
        b,
        gauge_generators: PauliGroup::new(n, gauge)?,
        stabilizer: PauliGroup::new(n, stab)?,
        commuting_terms,
        term_faces,
        bare_logicals: bare,
    })
}

impl GaugeCode {
    pub fn n(&self) -> usize {
        self.colex.n
    }

    /// The commuting Hamiltonian as a model whose symmetry is the stabilizer group.
    pub fn model(&self) -> Result<CodeModel> {
        let n = self.n();
        let kinds = self.term_faces.iter().map(|&(face, pauli)| TermKind::Face { face, pauli }).collect();
        let labels = (0..n).map(|v| format!("v{v}")).collect();
        let mut m = CodeModel::new(
            Family::Gcc,
            "gcc",
            self.commuting_terms.clone(),
            kinds,
            self.stabilizer.clone(),
            vec![self.bare_logicals.clone()],
            Lattice::Colex(self.colex.clone()),
            face_locality(&self.colex),
            labels,
        )?;
        m.meta.insert("b".into(), serde_json::json!(crate::complex::colex::color_name(self.b).to_string()));
        m.meta.insert("cells".into(), serde_json::json!(self.colex.cells.len()));
        m.meta.insert("faces".into(), serde_json::json!(self.colex.faces.len()));
        m.meta.insert("d_perp".into(), serde_json::json!(d_perp(self)));
        Ok(m)
    }

    /// Regions on the far side of each face from cell `c`.
    fn neighbor_region(&self, f: usize, c: usize) -> usize {
        let face = &self.colex.faces[f];
        match face.facet {
            Some(col) => self.colex.cells.len() + col as usize,
            None => *face.cells.iter().find(|&&x| x != c).expect("interior face has two cells"),
        }
    }

    /// Faces of each cell with their neighbor region.
    fn cell_faces(&self) -> Vec<Vec<(usize, usize)>> {
        let mut out = vec![Vec::new(); self.colex.cells.len()];
        for (f, face) in self.colex.faces.iter().enumerate() {
            for &c in &face.cells {
                out[c].push((f, self.neighbor_region(f, c)));
            }
        }
        out
    }

    /// Face groups whose product is each cell stabilizer: for a non-`b` cell
    /// the faces towards `b` regions; for a `b` cell one group per neighbor color.
    pub fn cell_constraints(&self) -> Vec<(usize, Vec<usize>)> {
        let mut out = Vec::new();
        for (c, faces) in self.cell_faces().into_iter().enumerate() {
            let color = self.colex.cells[c].color;
            if color != self.b {
                let group: Vec<usize> = faces
                    .iter()
                    .filter(|(_, r)| self.colex.region_color(*r) == self.b)
                    .map(|&(f, _)| f)
                    .collect();
                out.push((c, group));
            } else {
                for other in (0..4).filter(|&x| x != self.b) {
                    let group: Vec<usize> = faces
                        .iter()
                        .filter(|(_, r)| self.colex.region_color(*r) == other)
                        .map(|&(f, _)| f)
                        .collect();
                    out.push((c, group));
                }
            }
        }
        out
    }

    /// Check every cell constraint as an exact operator identity.
    pub fn check_cell_products(&self) -> Result<()> {
        for (c, group) in self.cell_constraints() {
            for p in [Pauli::X, Pauli::Z] {
                let mut prod = PauliOperator::identity(self.n());
                for &f in &group {
                    if self.colex.faces[f].colors.contains(&self.b) {
                        return Err(Error::Inconsistent(format!("cell {c} uses a face outside the commuting set")));
                    }
                    prod.mul_assign_unsigned(&face_op(&self.colex, f, p));
                }
                if prod != cell_op(&self.colex, c, p) {
                    return Err(Error::Inconsistent(format!("cell {c} is not the product of its faces")));
                }
            }
        }
        Ok(())
    }
}

/// Sites are qubits followed by face nodes; a face node touches its vertices,
/// so radius-1 balls around faces are face supports.
pub fn face_locality(colex: &Colex) -> Locality {
    let n = colex.n;
    let mut adjacency = vec![Vec::new(); n + colex.faces.len()];
    for (f, face) in colex.faces.iter().enumerate() {
        for &v in &face.vertices {
            adjacency[n + f].push(v);
            adjacency[v].push(n + f);
        }
    }
    let site_qubit = (0..n).map(Some).chain(std::iter::repeat_n(None, colex.faces.len())).collect();
    Locality { adjacency, site_qubit }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FluxVerdict {
    pub valid: bool,
    pub violated_cells: Vec<usize>,
}

/// Color-flux conservation: within each cell constraint, the number of
/// flipped X terms and the number of flipped Z terms must both be even.
pub fn flux_check(code: &GaugeCode, syndrome: &Bits) -> Result<FluxVerdict> {
    if syndrome.len() != code.commuting_terms.len() {
        return Err(Error::SizeMismatch(code.commuting_terms.len(), syndrome.len()));
    }
    let mut index = vec![[None, None]; code.colex.faces.len()];
    for (t, &(f, p)) in code.term_faces.iter().enumerate() {
        index[f][usize::from(p == Pauli::Z)] = Some(t);
    }
    let mut bad = Vec::new();
    for (c, group) in code.cell_constraints() {
        for side in 0..2 {
            let parity = group.iter().filter(|&&f| index[f][side].is_some_and(|t| syndrome.get(t))).count() % 2;
            if parity == 1 {
                bad.push(c);
            }
        }
    }
    bad.sort_unstable();
    bad.dedup();
    Ok(FluxVerdict { valid: bad.is_empty(), violated_cells: bad })
}

/// `flux_check` for a model built by `GaugeCode::model`.
pub fn flux_check_model(model: &CodeModel, syndrome: &Bits) -> Result<FluxVerdict> {
    let Lattice::Colex(colex) = &model.lattice else {
        return Err(Error::Invalid("model has no colex".into()));
    };
    let b = model
        .meta
        .get("b")
        .and_then(|v| v.as_str())
        .and_then(crate::complex::colex::parse_color)
        .unwrap_or(colex.outer);
    let code = build_gcc_with_color((**colex).clone(), b)?;
    flux_check(&code, syndrome)
}

/// Perpendicular distance: for each vertex on the outer facet and each other
/// facet color `c`, the shortest flux string of color pair complementary to
/// `{c, b}` from the vertex's `c` region to facet `c`, walking only through
/// `c` and `b` regions other than the outer facet; each string counts its
/// faces. The result is the minimum over outer vertices of the three lengths.
pub fn d_perp(code: &GaugeCode) -> usize {
    let colex = &code.colex;
    let nr = colex.cells.len() + 4;
    let outer_region = colex.cells.len() + code.b as usize;
    let mut adj = vec![Vec::new(); nr];
    for (f, face) in colex.faces.iter().enumerate() {
        let mut ends = face.cells.clone();
        if let Some(c) = face.facet {
            ends.push(colex.cells.len() + c as usize);
        }
        if let [a, b] = ends[..] {
            adj[a].push((b, f));
            adj[b].push((a, f));
        }
    }
    let regions = colex.vertex_regions();
    let mut dist_to = Vec::new();
    for c in (0..4u8).filter(|&c| c != code.b) {
        let allowed = |r: usize| r != outer_region && (colex.region_color(r) == c || colex.region_color(r) == code.b);
        let target = colex.cells.len() + c as usize;
        let mut dist = vec![usize::MAX; nr];
        let mut q = VecDeque::from([target]);
        dist[target] = 0;
        while let Some(u) = q.pop_front() {
            for &(w, _) in &adj[u] {
                if allowed(w) && dist[w] == usize::MAX {
                    dist[w] = dist[u] + 1;
                    q.push_back(w);
                }
            }
        }
        dist_to.push((c, dist));
    }
    colex
        .facet_vertices(code.b)
        .into_iter()
        .filter_map(|v| {
            let mut total = 0;
            for (c, dist) in &dist_to {
                let start = *regions[v].iter().find(|&&r| colex.region_color(r) == *c)?;
                let d = dist[start];
                if d == usize::MAX {
                    return None;
                }
                // one face from the outer facet into the start region
                total += 1 + d;
            }
            Some(total)
        })
        .min()
        .unwrap_or(0)
}

pub fn gcc_energy_barrier_bound(code: &GaugeCode) -> f64 {
    2.0 * d_perp(code) as f64
}

/// Lowest-weight representatives of `base` modulo the span of `gens`; exact
/// by enumeration up to 2^22 elements, pairwise-reduced otherwise.
fn min_coset_rep(base: &PauliOperator, gens: &[PauliOperator]) -> PauliOperator {
    let indep = PauliGroup::new(base.n(), gens.to_vec()).expect("sizes").independent();
    let g = indep.generators();
    let mut best = base.clone();
    if g.len() <= 22 {
        let mut cur = base.clone();
        for i in 1u64..(1 << g.len()) {
            cur.mul_assign_unsigned(&g[i.trailing_zeros() as usize]);
            if cur.weight() < best.weight() {
                best = cur.clone();
            }
        }
    } else {
        loop {
            let mut improved = false;
            for h in g {
                let c = best.multiply_unsigned(h);
                if c.weight() < best.weight() {
                    best = c;
                    improved = true;
                }
            }
            if !improved {
                break;
            }
        }
    }
    best
}

/// Dressed logicals: minimum-weight representatives of the bare logicals
/// modulo same-type commuting terms. Their supports are the tri-string
/// operators running from the outer facet to the other three facets.
pub fn tri_string_logicals(code: &GaugeCode) -> (PauliOperator, PauliOperator) {
    let split = |p: Pauli| -> Vec<PauliOperator> {
        code.term_faces
            .iter()
            .zip(&code.commuting_terms)
            .filter(|((_, q), _)| *q == p)
            .map(|(_, t)| t.clone())
            .collect()
    };
    (min_coset_rep(&code.bare_logicals.0, &split(Pauli::X)), min_coset_rep(&code.bare_logicals.1, &split(Pauli::Z)))
}

/// Regions reached from each facet corner; exposed for diagnostics.
pub fn facet_color_pairs(code: &GaugeCode) -> Vec<[Color; 2]> {
    (0..4u8).filter(|&c| c != code.b).map(|c| complement(c, code.b)).collect()
}
