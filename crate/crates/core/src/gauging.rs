//! Ancilla gauging of CSS models and the product constraints behind emergent
//! symmetries.

use crate::bits::Bits;
use crate::clifford::{conjugate, Gate};
use crate::complex::colex2::Colex2;
use crate::error::{Error, Result};
use crate::gcc::GaugeCode;
use crate::group::PauliGroup;
use crate::model::{overlap_locality, CodeModel, Family, Lattice, TermKind};
use crate::pauli::{Pauli, PauliOperator};
use serde::{Deserialize, Serialize};
use std::collections::BTreeSet;
use std::sync::Arc;

/// 2D color code on a closed 2-colex: X terms on every face, then Z terms.
/// No symmetry is enforced; its constraints are emergent.
pub fn build_color2d(colex: Colex2) -> Result<CodeModel> {
    colex.validate()?;
    let n = colex.n;
    let mut terms = Vec::new();
    let mut kinds = Vec::new();
    for p in [Pauli::X, Pauli::Z] {
        for (f, vs) in colex.faces.iter().enumerate() {
            terms.push(PauliOperator::on(n, vs.iter().copied(), p));
            kinds.push(TermKind::Face { face: f, pauli: p });
        }
    }
    let locality = overlap_locality(n, &terms);
    let labels = (0..n).map(|v| format!("v{v}")).collect();
    let mut m = CodeModel::new(
        Family::Color2d,
        "color2d-sphere",
        terms,
        kinds,
        PauliGroup::empty(n),
        Vec::new(),
        Lattice::Colex2(Arc::new(colex)),
        locality,
        labels,
    )?;
    m.meta.insert("faces".into(), serde_json::json!(m.num_terms() / 2));
    Ok(m)
}

fn colex2(model: &CodeModel) -> Result<&Colex2> {
    match &model.lattice {
        Lattice::Colex2(c) => Ok(c),
        _ => Err(Error::Invalid("model is not built on a 2-colex".into())),
    }
}

fn face_term(model: &CodeModel, face: usize, pauli: Pauli) -> Option<usize> {
    model
        .term_kind
        .iter()
        .position(|k| matches!(k, TermKind::Face { face: f, pauli: p } if *f == face && *p == pauli))
}

/// Color-pair parity checks of a color code syndrome: for each sector and
/// pair of colors the number of flipped faces of those colors is even.
/// Returns the violated `(pauli, u, v)` triples.
pub fn color_parity_violations(model: &CodeModel, s: &Bits) -> Result<Vec<(Pauli, u8, u8)>> {
    let cx = colex2(model)?;
    let mut out = Vec::new();
    for p in [Pauli::X, Pauli::Z] {
        let mut count = [0usize; 3];
        for (f, &c) in cx.face_color.iter().enumerate() {
            let t = face_term(model, f, p).ok_or_else(|| Error::Invalid(format!("face {f} has no {p:?} term")))?;
            if s.get(t) {
                count[c as usize] += 1;
            }
        }
        for (u, v) in [(0u8, 1u8), (0, 2), (1, 2)] {
            if (count[u as usize] + count[v as usize]) % 2 == 1 {
                out.push((p, u, v));
            }
        }
    }
    Ok(out)
}

/// A 2D surface made of colored faces, each tied to a model term.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Surface {
    /// `(vertices, color, term)` per face.
    pub faces: Vec<(Vec<usize>, u8, usize)>,
    /// Faces of the ambient surface not in this one, used to find the boundary.
    pub outside: Vec<Vec<usize>>,
}

impl Surface {
    /// Vertices touching both this surface and its complement.
    pub fn boundary(&self) -> BTreeSet<usize> {
        let inside: BTreeSet<usize> = self.faces.iter().flat_map(|f| f.0.iter().copied()).collect();
        self.outside.iter().flatten().copied().filter(|v| inside.contains(v)).collect()
    }

    /// Closed when every vertex lies in exactly three of the faces.
    pub fn is_closed(&self) -> bool {
        let mut deg = std::collections::BTreeMap::<usize, usize>::new();
        for (vs, _, _) in &self.faces {
            for &v in vs {
                *deg.entry(v).or_default() += 1;
            }
        }
        deg.values().all(|&d| d == 3)
    }
}

/// Faces of a color code model, as a subsurface of the sphere.
pub fn color2d_surface(model: &CodeModel, faces: &[usize], pauli: Pauli) -> Result<Surface> {
    let cx = colex2(model)?;
    let chosen: BTreeSet<usize> = faces.iter().copied().collect();
    let mut out = Surface { faces: Vec::new(), outside: Vec::new() };
    for f in 0..cx.faces.len() {
        if chosen.contains(&f) {
            let t = face_term(model, f, pauli).ok_or_else(|| Error::Invalid(format!("face {f} has no term")))?;
            out.faces.push((cx.faces[f].clone(), cx.face_color[f], t));
        } else {
            out.outside.push(cx.faces[f].clone());
        }
    }
    if out.faces.len() != chosen.len() {
        return Err(Error::Invalid("face index out of range".into()));
    }
    Ok(out)
}

/// Boundary of a 3-cell of a gauge color code, faces colored by the region
/// across them. Faces whose color pair contains `b` carry no term and are
/// left out, so only the surface of a `b` cell is complete.
pub fn gcc_cell_surface(code: &GaugeCode, model: &CodeModel, cell: usize, pauli: Pauli) -> Result<Surface> {
    let cx = &code.colex;
    let q = cx.cells.get(cell).ok_or_else(|| Error::Invalid(format!("no cell {cell}")))?;
    let mut out = Surface { faces: Vec::new(), outside: Vec::new() };
    for (f, face) in cx.faces.iter().enumerate() {
        if !face.cells.contains(&cell) {
            continue;
        }
        // the region across the face has the color missing from the face and the cell
        let color = (0..4u8).find(|&c| c != q.color && !face.colors.contains(&c)).expect("four colors");
        match face_term(model, f, pauli) {
            Some(t) => out.faces.push((face.vertices.clone(), color, t)),
            None => out.outside.push(face.vertices.clone()),
        }
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConstraintReport {
    pub closed: bool,
    pub colors: [u8; 2],
    /// Product of the designated terms.
    pub residual: PauliOperator,
    pub boundary: Vec<usize>,
    /// Closed: residual is the identity. Bounded: residual lies on the boundary.
    pub holds: bool,
}

/// Product of the `u`- and `v`-colored terms of a surface, checked against
/// the identity (closed) or the boundary (bounded).
pub fn verify_emergent_constraints(model: &CodeModel, surface: &Surface, colors: [u8; 2]) -> Result<ConstraintReport> {
    if colors[0] == colors[1] {
        return Err(Error::Invalid("constraint needs two distinct colors".into()));
    }
    let mut residual = PauliOperator::identity(model.n);
    for (_, c, t) in &surface.faces {
        if colors.contains(c) {
            residual.mul_assign_unsigned(&model.terms[*t]);
        }
    }
    let closed = surface.is_closed();
    let boundary: Vec<usize> = surface.boundary().into_iter().collect();
    let holds = if closed {
        residual.is_identity()
    } else {
        let b: BTreeSet<usize> = boundary.iter().copied().collect();
        residual.support().iter().all(|q| b.contains(q))
    };
    Ok(ConstraintReport { closed, colors, residual, boundary, holds })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GaussReport {
    pub n_u: usize,
    pub n_v: usize,
    pub parity: bool,
    /// Eigenvalue of the boundary operator in the excited state.
    pub boundary_eigenvalue: i8,
    pub holds: bool,
}

/// Count flipped `u`/`v` terms inside a bounded surface for the state
/// `error |vacuum>` and compare with the boundary operator's eigenvalue.
pub fn gauss_charge(model: &CodeModel, surface: &Surface, colors: [u8; 2], error: &PauliOperator) -> Result<GaussReport> {
    let report = verify_emergent_constraints(model, surface, colors)?;
    if !report.holds {
        return Err(Error::Inconsistent("surface has no boundary operator".into()));
    }
    let s = model.syndrome(error);
    let (mut n_u, mut n_v) = (0, 0);
    for (_, c, t) in &surface.faces {
        if s.get(*t) {
            if *c == colors[0] {
                n_u += 1;
            } else if *c == colors[1] {
                n_v += 1;
            }
        }
    }
    let parity = (n_u + n_v) % 2 == 1;
    // restricted to the boundary, so the eigenvalue is read off the error alone
    let h = report.residual.restrict(&report.boundary).embed(model.n, &report.boundary);
    let boundary_eigenvalue = if h.commutes_unchecked(error) { 1 } else { -1 };
    Ok(GaussReport { n_u, n_v, parity, boundary_eigenvalue, holds: parity == (boundary_eigenvalue == -1) })
}

/// A CSS model with one ancilla per term and the entangling circuit.
#[derive(Clone, Debug)]
pub struct ExtendedModel {
    pub base: CodeModel,
    /// Ancilla qubit of each term, numbered after the base qubits.
    pub ancilla_index: Vec<usize>,
    /// Pauli type of each term.
    pub term_pauli: Vec<Pauli>,
    pub circuit: Vec<Gate>,
    pub gauge_symmetry: PauliGroup,
}

fn css_type(p: &PauliOperator) -> Option<Pauli> {
    match (p.x_bits().is_zero(), p.z_bits().is_zero()) {
        (false, true) => Some(Pauli::X),
        (true, false) => Some(Pauli::Z),
        _ => None,
    }
}

/// Append an ancilla per term: X terms get CNOTs from their ancilla into the
/// support, Z terms CNOTs from the support into their ancilla.
pub fn gauge_extend(model: &CodeModel) -> Result<ExtendedModel> {
    let n = model.n;
    let total = n + model.num_terms();
    let mut term_pauli = Vec::new();
    let mut circuit = Vec::new();
    let mut ancilla_index = Vec::new();
    for (t, term) in model.terms.iter().enumerate() {
        let p = css_type(term).ok_or_else(|| Error::Invalid(format!("term {t} is not CSS")))?;
        let a = n + t;
        for v in term.support() {
            circuit.push(match p {
                Pauli::X => Gate::Cnot(a, v),
                _ => Gate::Cnot(v, a),
            });
        }
        term_pauli.push(p);
        ancilla_index.push(a);
    }
    let mut ext = ExtendedModel {
        base: model.clone(),
        ancilla_index,
        term_pauli,
        circuit,
        gauge_symmetry: PauliGroup::empty(total),
    };
    let gens = (0..model.num_terms()).map(|t| ext.conjugate(&ext.ancilla_op(t))).collect();
    ext.gauge_symmetry = PauliGroup::new(total, gens)?;
    Ok(ext)
}

impl ExtendedModel {
    pub fn n_total(&self) -> usize {
        self.base.n + self.ancilla_index.len()
    }

    /// Base operator padded with identity on the ancillas.
    pub fn embed(&self, p: &PauliOperator) -> PauliOperator {
        let qs: Vec<usize> = (0..self.base.n).collect();
        p.embed(self.n_total(), &qs).with_sign(p.is_negative())
    }

    /// `X` (X terms) or `Z` (Z terms) on the term's ancilla.
    pub fn ancilla_op(&self, t: usize) -> PauliOperator {
        PauliOperator::single(self.n_total(), self.ancilla_index[t], self.term_pauli[t])
    }

    /// `U P U^dagger`.
    pub fn conjugate(&self, p: &PauliOperator) -> PauliOperator {
        conjugate(p, &self.circuit)
    }

    /// Expected gauge generator: ancilla Pauli times the embedded term.
    pub fn expected_generator(&self, t: usize) -> PauliOperator {
        self.ancilla_op(t).multiply_unsigned(&self.embed(&self.base.terms[t]))
    }

    /// Every term is fixed by the circuit.
    pub fn terms_fixed(&self) -> bool {
        self.base.terms.iter().all(|t| {
            let e = self.embed(t);
            self.conjugate(&e) == e
        })
    }

    /// Conjugating twice returns every single-qubit Pauli, with its sign.
    pub fn round_trips(&self) -> bool {
        (0..self.n_total()).all(|q| {
            [Pauli::X, Pauli::Z].iter().all(|&p| {
                let op = PauliOperator::single(self.n_total(), q, p);
                self.conjugate(&self.conjugate(&op)) == op
            })
        })
    }

    /// For a term set whose base product is the identity, the product of
    /// their gauge generators equals the product of their ancilla Paulis.
    pub fn ancilla_product_identity(&self, terms: &[usize]) -> Result<bool> {
        let mut base = PauliOperator::identity(self.base.n);
        let mut gauge = PauliOperator::identity(self.n_total());
        let mut anc = PauliOperator::identity(self.n_total());
        for &t in terms {
            base.mul_assign_unsigned(&self.base.terms[t]);
            gauge.mul_assign_unsigned(&self.gauge_symmetry.generators()[t]);
            anc.mul_assign_unsigned(&self.ancilla_op(t));
        }
        if !base.is_identity() {
            return Err(Error::Invalid("terms do not multiply to the identity".into()));
        }
        Ok(gauge == anc)
    }
}

/// Terms of one Pauli type whose face color is `u` or `v`.
pub fn color_pair_terms(model: &CodeModel, pauli: Pauli, u: u8, v: u8) -> Result<Vec<usize>> {
    let cx = colex2(model)?;
    Ok(model
        .term_kind
        .iter()
        .enumerate()
        .filter_map(|(t, k)| match k {
            TermKind::Face { face, pauli: p } if *p == pauli && [u, v].contains(&cx.face_color[*face]) => Some(t),
            _ => None,
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};

    fn sphere(size: usize) -> CodeModel {
        build_color2d(Colex2::sphere(size).unwrap()).unwrap()
    }

    #[test]
    fn color_code_terms_commute() {
        let m = sphere(2);
        m.check().unwrap();
        assert_eq!(m.k(), 0);
    }

    #[test]
    fn extension_maps_ancillas_to_gauge_generators() {
        let m = sphere(1);
        let ext = gauge_extend(&m).unwrap();
        assert_eq!(ext.n_total(), m.n + m.num_terms());
        assert!(ext.terms_fixed());
        assert!(ext.round_trips());
        for t in 0..m.num_terms() {
            assert_eq!(ext.gauge_symmetry.generators()[t], ext.expected_generator(t));
            // other ancillas are untouched by this term's layer
            let layer: Vec<Gate> = ext
                .circuit
                .iter()
                .copied()
                .filter(|g| matches!(*g, Gate::Cnot(c, d) if c == ext.ancilla_index[t] || d == ext.ancilla_index[t]))
                .collect();
            for u in 0..m.num_terms() {
                let a = ext.ancilla_op(u);
                let img = conjugate(&a, &layer);
                if u == t {
                    assert_eq!(img, ext.expected_generator(t));
                } else {
                    assert_eq!(img, a);
                }
            }
        }
        for g in ext.gauge_symmetry.generators() {
            for t in &m.terms {
                assert!(g.commutes_unchecked(&ext.embed(t)));
            }
        }
    }

    #[test]
    fn rejects_non_css() {
        let n = 2;
        let y = PauliOperator::on(n, [0, 1], Pauli::Y);
        let m = CodeModel::new(
            Family::Custom,
            "y",
            vec![y.clone()],
            vec![TermKind::Other],
            PauliGroup::empty(n),
            vec![],
            Lattice::None,
            overlap_locality(n, &[y]),
            vec!["a".into(), "b".into()],
        )
        .unwrap();
        assert!(gauge_extend(&m).is_err());
    }

    #[test]
    fn pair_products_on_the_sphere() {
        let m = sphere(3);
        let cx = colex2(&m).unwrap().clone();
        let all: Vec<usize> = (0..cx.faces.len()).collect();
        let ext = gauge_extend(&m).unwrap();
        for p in [Pauli::X, Pauli::Z] {
            let surf = color2d_surface(&m, &all, p).unwrap();
            assert!(surf.is_closed());
            for (u, v) in [(0, 1), (0, 2), (1, 2)] {
                assert!(verify_emergent_constraints(&m, &surf, [u, v]).unwrap().holds);
                let ts = color_pair_terms(&m, p, u, v).unwrap();
                assert!(ext.ancilla_product_identity(&ts).unwrap());
            }
        }
    }

    #[test]
    fn single_face_residual_is_its_boundary() {
        let m = sphere(2);
        let cx = colex2(&m).unwrap().clone();
        for f in 0..cx.faces.len() {
            let surf = color2d_surface(&m, &[f], Pauli::X).unwrap();
            assert!(!surf.is_closed());
            let c = cx.face_color[f];
            let other = (c + 1) % 3;
            let r = verify_emergent_constraints(&m, &surf, [c, other]).unwrap();
            assert!(r.holds);
            let mut vs = cx.faces[f].clone();
            vs.sort_unstable();
            assert_eq!(r.residual.support(), vs);
            assert_eq!(r.boundary, vs);
        }
    }

    #[test]
    fn gauss_law_for_random_errors() {
        let m = sphere(3);
        let cx = colex2(&m).unwrap().clone();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        // a disk: one face and its neighbors
        let centre = 0;
        let mut disk: BTreeSet<usize> = BTreeSet::from([centre]);
        for (g, vs) in cx.faces.iter().enumerate() {
            if vs.iter().any(|v| cx.faces[centre].contains(v)) {
                disk.insert(g);
            }
        }
        let disk: Vec<usize> = disk.into_iter().collect();
        let surf = color2d_surface(&m, &disk, Pauli::X).unwrap();
        assert!(!surf.is_closed());
        let vac = gauss_charge(&m, &surf, [0, 1], &PauliOperator::identity(m.n)).unwrap();
        assert_eq!((vac.parity, vac.boundary_eigenvalue), (false, 1));
        for _ in 0..100 {
            let mut e = PauliOperator::identity(m.n);
            for q in 0..m.n {
                if rng.gen_bool(0.2) {
                    e.set(q, Pauli::Z);
                }
            }
            for colors in [[0, 1], [0, 2], [1, 2]] {
                assert!(gauss_charge(&m, &surf, colors, &e).unwrap().holds);
            }
            assert!(color_parity_violations(&m, &m.syndrome(&e)).unwrap().is_empty());
        }
    }

    #[test]
    fn gcc_cell_surfaces() {
        use crate::complex::colex::Colex;
        let code = crate::gcc::build_gcc(Colex::tetrahedral(2).unwrap()).unwrap();
        let m = code.model().unwrap();
        let ext = gauge_extend(&m).unwrap();
        assert!(ext.terms_fixed());
        assert!(ext.round_trips());
        let others: Vec<u8> = (0..4u8).filter(|&c| c != code.b).collect();
        let mut checked = 0;
        for (c, cell) in code.colex.cells.iter().enumerate() {
            if cell.color != code.b {
                continue;
            }
            let surf = gcc_cell_surface(&code, &m, c, Pauli::X).unwrap();
            assert!(surf.is_closed());
            for i in 0..3 {
                for j in i + 1..3 {
                    let r = verify_emergent_constraints(&m, &surf, [others[i], others[j]]).unwrap();
                    assert!(r.holds && r.closed);
                    let ts: Vec<usize> =
                        surf.faces.iter().filter(|f| [others[i], others[j]].contains(&f.1)).map(|f| f.2).collect();
                    assert!(ext.ancilla_product_identity(&ts).unwrap());
                }
            }
            checked += 1;
        }
        assert!(checked > 0);
    }

    #[test]
    fn lone_face_violates_parity() {
        let m = sphere(2);
        let s = Bits::from_indices(m.num_terms(), [0]);
        assert!(!color_parity_violations(&m, &s).unwrap().is_empty());
    }
}
