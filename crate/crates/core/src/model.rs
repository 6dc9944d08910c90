//! Commuting stabilizer Hamiltonians with a symmetry group.

use crate::bits::Bits;
use crate::complex::{CellComplex, Colex, Colex2};
use crate::error::{Error, Result};
use crate::gf2::Basis;
use crate::group::PauliGroup;
use crate::pauli::{Pauli, PauliOperator};
use serde::{Deserialize, Serialize};
use std::sync::Arc;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Family {
    Rbh,
    Trivial,
    Gcc,
    Color2d,
    Custom,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum TermKind {
    /// Term with a pivot qubit whose Z flips only this term.
    Cluster { qubit: usize },
    /// Toric-facet vertex term (e-type anyon when flipped).
    Star { vertex: usize },
    /// Toric-facet plaquette term (m-type anyon when flipped).
    Plaquette { face: usize },
    /// Colex face operator of the given Pauli type.
    Face { face: usize, pauli: Pauli },
    Other,
}

/// Geometry used to define local balls: sites (some without qubits) joined by
/// an adjacency relation.
#[derive(Clone, Debug)]
pub struct Locality {
    pub adjacency: Vec<Vec<usize>>,
    pub site_qubit: Vec<Option<usize>>,
}

impl Locality {
    /// Qubits within graph distance `r` of each site, deduplicated, in site order.
    pub fn balls(&self, r: usize) -> Vec<Vec<usize>> {
        let mut out: Vec<Vec<usize>> = Vec::new();
        let mut seen = std::collections::HashSet::new();
        let mut dist = vec![usize::MAX; self.adjacency.len()];
        for s in 0..self.adjacency.len() {
            let mut frontier = vec![s];
            let mut visited = vec![s];
            dist[s] = 0;
            for d in 1..=r {
                let mut next = Vec::new();
                for &u in &frontier {
                    for &w in &self.adjacency[u] {
                        if dist[w] == usize::MAX {
                            dist[w] = d;
                            next.push(w);
                            visited.push(w);
                        }
                    }
                }
                frontier = next;
            }
            let mut qs: Vec<usize> = visited.iter().filter_map(|&v| self.site_qubit[v]).collect();
            for v in visited {
                dist[v] = usize::MAX;
            }
            qs.sort_unstable();
            if !qs.is_empty() && seen.insert(qs.clone()) {
                out.push(qs);
            }
        }
        out
    }
}

#[derive(Clone, Debug)]
pub enum Lattice {
    Cubic(Arc<CellComplex>),
    Colex(Arc<Colex>),
    Colex2(Arc<Colex2>),
    None,
}

/// Sparse per-qubit action on syndromes and logical classes.
#[derive(Clone, Debug, Default)]
pub struct FlipTable {
    /// Terms anticommuting with X_q (terms with Z or Y on q).
    pub x_terms: Vec<Vec<u32>>,
    /// Terms anticommuting with Z_q.
    pub z_terms: Vec<Vec<u32>>,
    pub x_class: Vec<u64>,
    pub z_class: Vec<u64>,
}

#[derive(Clone, Debug)]
pub struct CodeModel {
    pub family: Family,
    pub name: String,
    pub n: usize,
    pub terms: Vec<PauliOperator>,
    pub term_kind: Vec<TermKind>,
    pub symmetry: PauliGroup,
    pub logicals: Vec<(PauliOperator, PauliOperator)>,
    /// Energy of one flipped term.
    pub gap: f64,
    pub lattice: Lattice,
    pub locality: Locality,
    pub qubit_labels: Vec<String>,
    pub meta: serde_json::Map<String, serde_json::Value>,
    pub flips: FlipTable,
    /// For each symmetry generator, the terms whose product it is.
    pub symmetry_in_terms: Vec<Bits>,
}

#[derive(Serialize, Deserialize)]
struct ModelDump {
    family: Family,
    name: String,
    n: usize,
    gap: f64,
    terms: Vec<String>,
    symmetry: Vec<String>,
    logicals: Vec<(String, String)>,
    qubit_labels: Vec<String>,
    meta: serde_json::Map<String, serde_json::Value>,
}

impl CodeModel {
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        family: Family,
        name: impl Into<String>,
        terms: Vec<PauliOperator>,
        term_kind: Vec<TermKind>,
        symmetry: PauliGroup,
        logicals: Vec<(PauliOperator, PauliOperator)>,
        lattice: Lattice,
        locality: Locality,
        qubit_labels: Vec<String>,
    ) -> Result<Self> {
        let n = symmetry.n();
        if terms.iter().any(|t| t.n() != n) || logicals.iter().any(|(a, b)| a.n() != n || b.n() != n) {
            return Err(Error::Invalid("operator sizes disagree".into()));
        }
        if term_kind.len() != terms.len() || qubit_labels.len() != n {
            return Err(Error::Invalid("metadata lengths disagree".into()));
        }
        if logicals.len() > 32 {
            return Err(Error::TooLarge("more than 32 logical pairs".into()));
        }
        let mut m = CodeModel {
            family,
            name: name.into(),
            n,
            terms,
            term_kind,
            symmetry,
            logicals,
            gap: 2.0,
            lattice,
            locality,
            qubit_labels,
            meta: Default::default(),
            flips: FlipTable::default(),
            symmetry_in_terms: Vec::new(),
        };
        m.flips = m.build_flip_table();
        m.symmetry_in_terms = m.express_symmetry()?;
        Ok(m)
    }

    fn build_flip_table(&self) -> FlipTable {
        let mut t = FlipTable {
            x_terms: vec![Vec::new(); self.n],
            z_terms: vec![Vec::new(); self.n],
            x_class: vec![0; self.n],
            z_class: vec![0; self.n],
        };
        for (i, term) in self.terms.iter().enumerate() {
            for q in term.z_bits().iter_ones() {
                t.x_terms[q].push(i as u32);
            }
            for q in term.x_bits().iter_ones() {
                t.z_terms[q].push(i as u32);
            }
        }
        for (k, (lx, lz)) in self.logicals.iter().enumerate() {
            for (bit, l) in [(2 * k, lx), (2 * k + 1, lz)] {
                for q in l.z_bits().iter_ones() {
                    t.x_class[q] |= 1 << bit;
                }
                for q in l.x_bits().iter_ones() {
                    t.z_class[q] |= 1 << bit;
                }
            }
        }
        t
    }

    fn express_symmetry(&self) -> Result<Vec<Bits>> {
        let mut b = Basis::new(self.terms.len());
        for t in &self.terms {
            b.insert(&t.symplectic());
        }
        self.symmetry
            .generators()
            .iter()
            .enumerate()
            .map(|(i, g)| {
                b.express(&g.symplectic()).ok_or_else(|| {
                    Error::Inconsistent(format!("symmetry generator {i} is not a product of terms"))
                })
            })
            .collect()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn syndrome(&self, p: &PauliOperator) -> Bits {
        let mut s = Bits::zeros(self.terms.len());
        for q in p.x_bits().iter_ones() {
            for &t in &self.flips.x_terms[q] {
                s.flip(t as usize);
            }
        }
        for q in p.z_bits().iter_ones() {
            for &t in &self.flips.z_terms[q] {
                s.flip(t as usize);
            }
        }
        s
    }

    /// Anticommutation pattern with the logicals: bit `2k` for X̄_k, `2k+1` for Z̄_k.
    pub fn class(&self, p: &PauliOperator) -> u64 {
        let mut c = 0;
        for q in p.x_bits().iter_ones() {
            c ^= self.flips.x_class[q];
        }
        for q in p.z_bits().iter_ones() {
            c ^= self.flips.z_class[q];
        }
        c
    }

    pub fn class_bits(&self) -> usize {
        2 * self.logicals.len()
    }

    pub fn energy(&self, syndrome: &Bits) -> f64 {
        self.gap * syndrome.count_ones() as f64
    }

    pub fn is_symmetric(&self, p: &PauliOperator) -> bool {
        self.symmetry.generators().iter().all(|g| g.commutes_unchecked(p))
    }

    /// Syndrome consistency with the symmetry: every generator's term
    /// decomposition contains an even number of flipped terms.
    pub fn syndrome_respects_symmetry(&self, s: &Bits) -> bool {
        self.symmetry_in_terms.iter().all(|c| !c.dot(s))
    }

    pub fn stabilizer_group(&self) -> PauliGroup {
        PauliGroup::new(self.n, self.terms.clone()).expect("sizes checked")
    }

    /// Number of encoded qubits, `n - rank(terms)`.
    pub fn k(&self) -> usize {
        self.n - self.stabilizer_group().rank()
    }

    /// Structural checks: terms commute pairwise and with the symmetry, the
    /// symmetry is generated by terms, logicals are a symplectic basis that
    /// commutes with terms and symmetry, and their count matches `k`.
    pub fn check(&self) -> Result<()> {
        let bad = |m: String| Err(Error::Inconsistent(m));
        for i in 0..self.terms.len() {
            for j in i + 1..self.terms.len() {
                if !self.terms[i].commutes_unchecked(&self.terms[j]) {
                    return bad(format!("terms {i} and {j} anticommute"));
                }
            }
            if !self.is_symmetric(&self.terms[i]) {
                return bad(format!("term {i} is not symmetric"));
            }
        }
        for (k, (x, z)) in self.logicals.iter().enumerate() {
            if x.commutes_unchecked(z) {
                return bad(format!("logical pair {k} commutes"));
            }
            for l in [x, z] {
                if !self.syndrome(l).is_zero() || !self.is_symmetric(l) {
                    return bad(format!("logical pair {k} is not in the centralizer"));
                }
                for (j, (x2, z2)) in self.logicals.iter().enumerate() {
                    if j != k && (!l.commutes_unchecked(x2) || !l.commutes_unchecked(z2)) {
                        return bad(format!("logical pairs {k} and {j} interact"));
                    }
                }
            }
        }
        if self.logicals.len() != self.k() {
            return bad(format!("{} logical pairs but k = {}", self.logicals.len(), self.k()));
        }
        self.stabilizer_group().check_stabilizer()?;
        Ok(())
    }

    pub fn to_json(&self) -> Result<String> {
        let dump = ModelDump {
            family: self.family,
            name: self.name.clone(),
            n: self.n,
            gap: self.gap,
            terms: self.terms.iter().map(|t| t.to_string()).collect(),
            symmetry: self.symmetry.generators().iter().map(|t| t.to_string()).collect(),
            logicals: self.logicals.iter().map(|(x, z)| (x.to_string(), z.to_string())).collect(),
            qubit_labels: self.qubit_labels.clone(),
            meta: self.meta.clone(),
        };
        Ok(serde_json::to_string_pretty(&dump)?)
    }

    /// Read a model dump back; geometry is not stored, so locality falls back
    /// to the term-overlap graph.
    pub fn from_json(s: &str) -> Result<Self> {
        let d: ModelDump = serde_json::from_str(s)?;
        let parse = |v: &[String]| -> Result<Vec<PauliOperator>> { v.iter().map(|s| s.parse()).collect() };
        let terms = parse(&d.terms)?;
        let symmetry = PauliGroup::new(d.n, parse(&d.symmetry)?)?;
        let logicals = d
            .logicals
            .iter()
            .map(|(x, z)| Ok((x.parse()?, z.parse()?)))
            .collect::<Result<Vec<_>>>()?;
        let locality = overlap_locality(d.n, &terms);
        let kinds = vec![TermKind::Other; terms.len()];
        let mut m = CodeModel::new(
            d.family,
            d.name,
            terms,
            kinds,
            symmetry,
            logicals,
            Lattice::None,
            locality,
            d.qubit_labels,
        )?;
        m.gap = d.gap;
        m.meta = d.meta;
        Ok(m)
    }
}

/// Qubits adjacent when some term acts on both.
pub fn overlap_locality(n: usize, terms: &[PauliOperator]) -> Locality {
    let mut adj = vec![std::collections::BTreeSet::new(); n];
    for t in terms {
        let s = t.support();
        for &a in &s {
            for &b in &s {
                if a != b {
                    adj[a].insert(b);
                }
            }
        }
    }
    Locality {
        adjacency: adj.into_iter().map(|s| s.into_iter().collect()).collect(),
        site_qubit: (0..n).map(Some).collect(),
    }
}
