//! Decoders: anyon matching for cluster models, cluster growth for any model, and a maximum-likelihood oracle.

use crate::bits::Bits;
use crate::complex::{CellComplex, CellRef, FacetKind};
use crate::dynamics::ClassDecoder;
use crate::error::{Error, Result};
use crate::gf2;
use crate::model::{CodeModel, Family, TermKind};
use crate::pauli::{Pauli, PauliOperator};
use crate::rbh::{cubic, dressed_x, in_facet_plane};
use crate::symmetry::validate_generic;
use itertools::Itertools;
use serde::{Deserialize, Serialize};
use std::collections::{HashMap, VecDeque};

/// Anyon counts up to this are matched exactly.
pub const EXACT_MATCHING_LIMIT: usize = 10;

/// Local solution spaces up to this dimension are searched exhaustively.
pub const EXACT_KERNEL_DIM: usize = 16;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Correction {
    pub operator: PauliOperator,
    /// Logical class of the correction itself.
    pub class: u64,
    /// False when a greedy matching was used.
    pub exact: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Fault {
    None,
    X,
    Z,
    Y,
}

/// Class of `error * correction` for the first logical pair: anticommuting
/// with Z̄ means an X̄ component, with X̄ a Z̄ component.
pub fn fault_check(error: &PauliOperator, correction: &Correction, model: &CodeModel) -> Result<Fault> {
    if model.syndrome(error) != model.syndrome(&correction.operator) {
        return Err(Error::Inconsistent("error and correction syndromes differ".into()));
    }
    let c = model.class(error) ^ model.class(&correction.operator);
    Ok(match (c & 1 != 0, c & 2 != 0) {
        (false, false) => Fault::None,
        (false, true) => Fault::X,
        (true, false) => Fault::Z,
        (true, true) => Fault::Y,
    })
}

/// Graph on anyon sites; each link carries the operator that moves an anyon
/// across it. Links with one end go to the boundary.
#[derive(Clone, Debug)]
struct AnyonGraph {
    /// Term index of each node.
    term: Vec<usize>,
    node_of_term: HashMap<usize, usize>,
    adj: Vec<Vec<(usize, usize)>>,
    /// Links `(node, link)` that end on the boundary.
    dangling: Vec<(usize, usize)>,
    link_op: Vec<PauliOperator>,
}

impl AnyonGraph {
    fn new() -> Self {
        AnyonGraph { term: vec![], node_of_term: HashMap::new(), adj: vec![], dangling: vec![], link_op: vec![] }
    }

    fn node(&mut self, term: usize) -> usize {
        if let Some(&n) = self.node_of_term.get(&term) {
            return n;
        }
        let n = self.term.len();
        self.term.push(term);
        self.adj.push(Vec::new());
        self.node_of_term.insert(term, n);
        n
    }

    fn link(&mut self, ends: &[usize], op: PauliOperator) {
        let l = self.link_op.len();
        self.link_op.push(op);
        match *ends {
            [a, b] => {
                let (a, b) = (self.node(a), self.node(b));
                self.adj[a].push((b, l));
                self.adj[b].push((a, l));
            }
            [a] => {
                let a = self.node(a);
                self.dangling.push((a, l));
            }
            _ => {}
        }
    }

    /// BFS from `src`: distance and parent link per node, plus the best
    /// boundary exit `(distance, node, link)`.
    fn bfs(&self, src: usize) -> (Vec<usize>, Vec<(usize, usize)>, Option<(usize, usize, usize)>) {
        let nn = self.term.len();
        let mut dist = vec![usize::MAX; nn];
        let mut par = vec![(usize::MAX, usize::MAX); nn];
        dist[src] = 0;
        let mut q = VecDeque::from([src]);
        while let Some(u) = q.pop_front() {
            for &(w, l) in &self.adj[u] {
                if dist[w] == usize::MAX {
                    dist[w] = dist[u] + 1;
                    par[w] = (u, l);
                    q.push_back(w);
                }
            }
        }
        let exit = self
            .dangling
            .iter()
            .filter(|(a, _)| dist[*a] != usize::MAX)
            .map(|&(a, l)| (dist[a] + 1, a, l))
            .min();
        (dist, par, exit)
    }

    fn path_op(&self, par: &[(usize, usize)], mut to: usize, src: usize, out: &mut PauliOperator) {
        while to != src {
            let (p, l) = par[to];
            out.mul_assign_unsigned(&self.link_op[l]);
            to = p;
        }
    }
}

/// Minimum-weight matching where each anyon pairs with another or exits to
/// the boundary. Returns `(pairs, exits, exact)`.
fn match_anyons(
    k: usize,
    pair: &dyn Fn(usize, usize) -> Option<usize>,
    exit: &dyn Fn(usize) -> Option<usize>,
) -> Result<(Vec<(usize, usize)>, Vec<usize>, bool)> {
    const INF: usize = usize::MAX / 4;
    let pw = |i, j| pair(i, j).unwrap_or(INF);
    let ew = |i| exit(i).unwrap_or(INF);
    if k <= EXACT_MATCHING_LIMIT {
        let full = (1usize << k) - 1;
        let mut cost = vec![INF; 1 << k];
        let mut choice = vec![(usize::MAX, usize::MAX); 1 << k];
        cost[0] = 0;
        for mask in 1..=full {
            let i = mask.trailing_zeros() as usize;
            let rest = mask & !(1 << i);
            let c = ew(i).saturating_add(cost[rest]);
            if c < cost[mask] {
                cost[mask] = c;
                choice[mask] = (i, usize::MAX);
            }
            let mut r = rest;
            while r != 0 {
                let j = r.trailing_zeros() as usize;
                r &= r - 1;
                let c = pw(i, j).saturating_add(cost[rest & !(1 << j)]);
                if c < cost[mask] {
                    cost[mask] = c;
                    choice[mask] = (i, j);
                }
            }
        }
        if cost[full] >= INF {
            return Err(Error::Invalid("anyons cannot be matched".into()));
        }
        let (mut pairs, mut exits) = (Vec::new(), Vec::new());
        let mut mask = full;
        while mask != 0 {
            let (i, j) = choice[mask];
            if j == usize::MAX {
                exits.push(i);
                mask &= !(1 << i);
            } else {
                pairs.push((i, j));
                mask &= !(1 << i) & !(1 << j);
            }
        }
        return Ok((pairs, exits, true));
    }
    // greedy: repeatedly take the cheapest remaining pair or exit
    let mut left: Vec<usize> = (0..k).collect();
    let (mut pairs, mut exits) = (Vec::new(), Vec::new());
    while !left.is_empty() {
        let mut best = (INF, usize::MAX, usize::MAX);
        for (a, &i) in left.iter().enumerate() {
            best = best.min((ew(i), a, usize::MAX));
            for (b, &j) in left.iter().enumerate().skip(a + 1) {
                best = best.min((pw(i, j), a, b));
            }
        }
        if best.0 >= INF {
            return Err(Error::Invalid("anyons cannot be matched".into()));
        }
        if best.2 == usize::MAX {
            exits.push(left.remove(best.1));
        } else {
            let j = left.remove(best.2);
            let i = left.remove(best.1);
            pairs.push((i, j));
        }
    }
    Ok((pairs, exits, false))
}

/// Matching decoder for cluster and trivial models on cubic lattices.
#[derive(Clone, Debug)]
pub struct RbhDecoder {
    pivots: Vec<Option<usize>>,
    stars: AnyonGraph,
    plaquettes: AnyonGraph,
    terms: Vec<PauliOperator>,
}

impl RbhDecoder {
    pub fn new(model: &CodeModel) -> Result<Self> {
        if !matches!(model.family, Family::Rbh | Family::Trivial) {
            return Err(Error::Invalid("matching decoder needs a cluster or trivial model".into()));
        }
        let cx = cubic(model)?;
        let n = model.n;
        let mut pivots = vec![None; model.num_terms()];
        let mut star_of = HashMap::new();
        let mut plaq_of = HashMap::new();
        for (i, k) in model.term_kind.iter().enumerate() {
            match *k {
                TermKind::Cluster { qubit } => pivots[i] = Some(qubit),
                TermKind::Star { vertex } => {
                    star_of.insert(vertex, i);
                }
                TermKind::Plaquette { face } => {
                    plaq_of.insert(face, i);
                }
                _ => {}
            }
        }
        let mut stars = AnyonGraph::new();
        let mut plaquettes = AnyonGraph::new();
        for e in 0..cx.count(1) {
            let er = CellRef { dim: 1, id: e };
            let Some(q) = cx.qubit_of(er) else { continue };
            if !in_facet_plane(cx, er, FacetKind::Toric) {
                continue;
            }
            let ends: Vec<usize> = cx.boundary(er).iter().filter_map(|v| star_of.get(v).copied()).collect();
            stars.link(&ends, PauliOperator::z_on(n, [q]));
            let faces: Vec<usize> = cx.coboundary(er).iter().filter_map(|f| plaq_of.get(f).copied()).collect();
            let x = if model.family == Family::Trivial { PauliOperator::x_on(n, [q]) } else { dressed_x(cx, q) };
            plaquettes.link(&faces, x);
        }
        Ok(RbhDecoder { pivots, stars, plaquettes, terms: model.terms.clone() })
    }

    fn match_graph(&self, g: &AnyonGraph, s: &Bits, out: &mut PauliOperator) -> Result<bool> {
        let nodes: Vec<usize> = g.term.iter().enumerate().filter(|(_, &t)| s.get(t)).map(|(i, _)| i).collect();
        if nodes.is_empty() {
            return Ok(true);
        }
        let searches: Vec<_> = nodes.iter().map(|&a| g.bfs(a)).collect();
        let pair = |i: usize, j: usize| {
            let d = searches[i].0[nodes[j]];
            (d != usize::MAX).then_some(d)
        };
        let exit = |i: usize| searches[i].2.map(|e| e.0);
        let (pairs, exits, exact) = match_anyons(nodes.len(), &pair, &exit)?;
        for (i, j) in pairs {
            g.path_op(&searches[i].1, nodes[j], nodes[i], out);
        }
        for i in exits {
            let (_, at, l) = searches[i].2.expect("exit exists");
            g.path_op(&searches[i].1, at, nodes[i], out);
            out.mul_assign_unsigned(&g.link_op[l]);
        }
        Ok(exact)
    }

    /// Greedily multiply by terms while that lowers the weight.
    fn reduce_weight(&self, op: &mut PauliOperator) {
        loop {
            let mut improved = false;
            for t in &self.terms {
                let c = op.multiply_unsigned(t);
                if c.weight() < op.weight() {
                    *op = c;
                    improved = true;
                }
            }
            if !improved {
                return;
            }
        }
    }

    /// Decode any syndrome, symmetric or not.
    pub fn decode_unchecked(&self, model: &CodeModel, s: &Bits) -> Result<Correction> {
        let mut op = PauliOperator::identity(model.n);
        for (t, p) in self.pivots.iter().enumerate() {
            if let (Some(q), true) = (p, s.get(t)) {
                op.mul_assign_unsigned(&PauliOperator::z_on(model.n, [*q]));
            }
        }
        let e1 = self.match_graph(&self.stars, s, &mut op)?;
        let e2 = self.match_graph(&self.plaquettes, s, &mut op)?;
        self.reduce_weight(&mut op);
        // compare against the other logical cosets after the same reduction
        let k = model.logicals.len().min(2);
        let base = op.clone();
        for mask in 1u64..(1 << (2 * k)) {
            let mut c = base.clone();
            for j in 0..2 * k {
                if mask >> j & 1 == 1 {
                    let (x, z) = &model.logicals[j / 2];
                    c.mul_assign_unsigned(if j % 2 == 0 { x } else { z });
                }
            }
            self.reduce_weight(&mut c);
            if c.weight() < op.weight() {
                op = c;
            }
        }
        if model.syndrome(&op) != *s {
            return Err(Error::Inconsistent("correction does not reproduce the syndrome".into()));
        }
        Ok(Correction { class: model.class(&op), operator: op, exact: e1 && e2 })
    }
}

/// Matching decoder; rejects syndromes no symmetric error can produce.
pub fn decode_rbh(s: &Bits, model: &CodeModel) -> Result<Correction> {
    if !validate_generic(s, model).valid {
        return Err(Error::Invalid("syndrome is not reachable by symmetric errors".into()));
    }
    RbhDecoder::new(model)?.decode_unchecked(model, s)
}

impl ClassDecoder for RbhDecoder {
    fn correction_class(&self, model: &CodeModel, s: &Bits) -> Result<u64> {
        Ok(self.decode_unchecked(model, s)?.class)
    }
}

/// Some Pauli with syndrome `s`, if one exists.
pub fn pure_error(model: &CodeModel, s: &Bits) -> Option<PauliOperator> {
    let n = model.n;
    // row . (x|z) must equal the symplectic product with the term
    let rows: Vec<Bits> = model.terms.iter().map(|t| t.z_bits().concat(t.x_bits())).collect();
    let v = gf2::solve(&rows, s, 2 * n)?;
    Some(PauliOperator::from_symplectic(&v))
}

/// Per-class weight counts, compared lexicographically: lower minimum
/// weight wins, then more operators at that weight, and so on.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CosetProfile {
    pub class: u64,
    pub counts: Vec<u64>,
}

fn better(a: &[u64], b: &[u64]) -> bool {
    for (x, y) in a.iter().zip(b) {
        if x != y {
            return x > y;
        }
    }
    false
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MlDecision {
    pub class: u64,
    pub correction: PauliOperator,
    /// False when the ranking could not be settled within the enumerated weights.
    pub certified: bool,
    /// Every class whose profile equals the winner's.
    pub tied: Vec<u64>,
    pub profiles: Vec<CosetProfile>,
}

fn decide(mut profiles: Vec<CosetProfile>, reps: HashMap<u64, PauliOperator>) -> Result<MlDecision> {
    profiles.sort_by_key(|p| p.class);
    let best = profiles
        .iter()
        .fold(None::<&CosetProfile>, |acc, p| match acc {
            Some(a) if !better(&p.counts, &a.counts) => Some(a),
            _ if p.counts.iter().all(|&c| c == 0) => acc,
            _ => Some(p),
        })
        .ok_or_else(|| Error::TooLarge("no operator with this syndrome within the weight limit".into()))?;
    let tied_classes: Vec<u64> = profiles.iter().filter(|p| p.counts == best.counts).map(|p| p.class).collect();
    // Low-noise ranking is lexicographic, so the first differing weight
    // settles it even for truncated profiles.
    let certified = tied_classes.len() == 1;
    Ok(MlDecision {
        class: best.class,
        correction: reps[&best.class].clone(),
        certified,
        tied: tied_classes,
        profiles,
    })
}

/// Exact low-noise maximum-likelihood class by enumerating every coset.
/// Needs at most 24 independent stabilizer generators.
pub fn ml_oracle(s: &Bits, model: &CodeModel) -> Result<MlDecision> {
    let stab = model.stabilizer_group().independent();
    let r = stab.generators().len();
    if r > 24 || model.logicals.len() > 4 {
        return Err(Error::TooLarge(format!("{r} stabilizer generators exceed the enumeration limit")));
    }
    let e0 = pure_error(model, s).ok_or_else(|| Error::Invalid("syndrome not realizable".into()))?;
    let k = model.logicals.len();
    let mut profiles = Vec::new();
    let mut reps = HashMap::new();
    for lbits in 0u64..(1 << (2 * k)) {
        let mut base = e0.clone();
        for j in 0..2 * k {
            if lbits >> j & 1 == 1 {
                let (x, z) = &model.logicals[j / 2];
                base.mul_assign_unsigned(if j % 2 == 0 { x } else { z });
            }
        }
        let class = model.class(&base);
        let mut counts = vec![0u64; model.n + 1];
        let mut best = base.clone();
        let mut cur = base;
        counts[cur.weight()] += 1;
        for i in 1u64..(1 << r) {
            cur.mul_assign_unsigned(&stab.generators()[i.trailing_zeros() as usize]);
            let w = cur.weight();
            counts[w] += 1;
            if w < best.weight() {
                best = cur.clone();
            }
        }
        reps.insert(class, best);
        profiles.push(CosetProfile { class, counts });
    }
    decide(profiles, reps)
}

/// Low-noise ML table over all syndromes with at most `max_flips` flipped
/// terms, built from every Pauli of weight at most `max_weight`.
pub struct MlTable {
    pub max_weight: usize,
    entries: HashMap<Bits, (Vec<CosetProfile>, HashMap<u64, PauliOperator>)>,
}

impl MlTable {
    pub fn build(model: &CodeModel, max_flips: usize, max_weight: usize) -> MlTable {
        let n = model.n;
        let mut entries: HashMap<Bits, (Vec<CosetProfile>, HashMap<u64, PauliOperator>)> = HashMap::new();
        let paulis = [Pauli::X, Pauli::Y, Pauli::Z];
        for w in 0..=max_weight {
            for support in (0..n).combinations(w) {
                for kinds in std::iter::repeat_n(0..3usize, w).multi_cartesian_product() {
                    let mut p = PauliOperator::identity(n);
                    for (&q, &k) in support.iter().zip(&kinds) {
                        p.set(q, paulis[k]);
                    }
                    let s = model.syndrome(&p);
                    if s.count_ones() > max_flips {
                        continue;
                    }
                    let class = model.class(&p);
                    let (profiles, reps) = entries.entry(s).or_default();
                    let idx = match profiles.iter().position(|c| c.class == class) {
                        Some(i) => i,
                        None => {
                            profiles.push(CosetProfile { class, counts: vec![0; max_weight + 1] });
                            profiles.len() - 1
                        }
                    };
                    profiles[idx].counts[w] += 1;
                    reps.entry(class).or_insert(p);
                }
            }
        }
        MlTable { max_weight, entries }
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn decide(&self, model: &CodeModel, s: &Bits) -> Result<MlDecision> {
        let (profiles, reps) =
            self.entries.get(s).ok_or_else(|| Error::TooLarge("syndrome needs a heavier operator than tabulated".into()))?;
        let mut all = profiles.clone();
        for c in 0..(1u64 << model.class_bits()) {
            if !all.iter().any(|p| p.class == c) {
                all.push(CosetProfile { class: c, counts: vec![0; self.max_weight + 1] });
            }
        }
        decide(all, reps.clone())
    }
}

/// ML decoder for small models, usable in memory experiments.
pub struct MlDecoder;

impl ClassDecoder for MlDecoder {
    fn correction_class(&self, model: &CodeModel, s: &Bits) -> Result<u64> {
        Ok(ml_oracle(s, model)?.class)
    }
}

/// Model-agnostic decoder: clusters of flipped terms grow over the term
/// overlap graph until each cluster's excitations can be cleared by an
/// operator supported on the cluster's region. Used for the gauge color code,
/// where the corrections it finds automatically respect color flux.
#[derive(Clone, Debug)]
pub struct ClusterDecoder {
    term_support: Vec<Vec<usize>>,
    qubit_terms: Vec<Vec<usize>>,
    terms: Vec<PauliOperator>,
}

struct Cluster {
    flipped: Vec<usize>,
    region: Vec<bool>,
    solution: Option<PauliOperator>,
}

impl ClusterDecoder {
    pub fn new(model: &CodeModel) -> Self {
        let term_support: Vec<Vec<usize>> = model.terms.iter().map(|t| t.support()).collect();
        let mut qubit_terms = vec![Vec::new(); model.n];
        for (t, sup) in term_support.iter().enumerate() {
            for &q in sup {
                qubit_terms[q].push(t);
            }
        }
        ClusterDecoder { term_support, qubit_terms, terms: model.terms.clone() }
    }

    /// Operator on `region` flipping exactly `flipped` among the terms it
    /// touches, with greedy weight reduction inside the region.
    fn solve_local(&self, n: usize, region: &[bool], flipped: &[usize]) -> Option<PauliOperator> {
        let qubits: Vec<usize> = (0..n).filter(|&q| region[q]).collect();
        let col: HashMap<usize, usize> = qubits.iter().enumerate().map(|(i, &q)| (q, i)).collect();
        let touched: Vec<usize> = qubits.iter().flat_map(|&q| self.qubit_terms[q].iter().copied()).unique().collect();
        let nc = 2 * qubits.len();
        let rows: Vec<Bits> = touched
            .iter()
            .map(|&t| {
                let mut row = Bits::zeros(nc);
                for &q in &self.term_support[t] {
                    if let Some(&i) = col.get(&q) {
                        let (x, z) = self.terms[t].get(q).bits();
                        // commutation pairs the term's x with our z and vice versa
                        row.set(2 * i + 1, x);
                        row.set(2 * i, z);
                    }
                }
                row
            })
            .collect();
        let rhs = Bits::from_bools(&touched.iter().map(|t| flipped.contains(t)).collect::<Vec<_>>());
        let mut v = gf2::solve(&rows, &rhs, nc)?;
        let weight = |v: &Bits| (0..qubits.len()).filter(|&i| v.get(2 * i) || v.get(2 * i + 1)).count();
        let kernel = gf2::nullspace(&rows, nc);
        if kernel.len() <= EXACT_KERNEL_DIM {
            // Gray-code walk over the whole solution space
            let mut cur = v.clone();
            for i in 1u64..(1 << kernel.len()) {
                cur.xor_assign(&kernel[i.trailing_zeros() as usize]);
                if weight(&cur) < weight(&v) {
                    v = cur.clone();
                }
            }
            return Some(Self::to_operator(n, &qubits, &v));
        }
        loop {
            let mut improved = false;
            for k in &kernel {
                let c = v.xor(k);
                if weight(&c) < weight(&v) {
                    v = c;
                    improved = true;
                }
            }
            if !improved {
                break;
            }
        }
        Some(Self::to_operator(n, &qubits, &v))
    }

    fn to_operator(n: usize, qubits: &[usize], v: &Bits) -> PauliOperator {
        let mut op = PauliOperator::identity(n);
        for (i, &q) in qubits.iter().enumerate() {
            op.set(q, Pauli::from_bits(v.get(2 * i), v.get(2 * i + 1)));
        }
        op
    }

    /// Add every qubit sharing a term with the region; false if nothing was added.
    fn grow(&self, region: &mut [bool]) -> bool {
        let inside: Vec<usize> = (0..region.len()).filter(|&q| region[q]).collect();
        let before = inside.len();
        for q in inside {
            for &t in &self.qubit_terms[q] {
                for &r in &self.term_support[t] {
                    region[r] = true;
                }
            }
        }
        region.iter().filter(|&&b| b).count() > before
    }

    /// Union clusters with overlapping regions until none overlap; merged
    /// clusters must be solved again.
    fn merge(mut clusters: Vec<Cluster>) -> Vec<Cluster> {
        loop {
            let mut merged: Vec<Cluster> = Vec::new();
            let mut changed = false;
            for c in clusters {
                match merged.iter().position(|m| m.region.iter().zip(&c.region).any(|(a, b)| *a && *b)) {
                    Some(i) => {
                        let m = &mut merged[i];
                        m.flipped.extend(c.flipped);
                        for (a, b) in m.region.iter_mut().zip(&c.region) {
                            *a |= *b;
                        }
                        m.solution = None;
                        changed = true;
                    }
                    None => merged.push(c),
                }
            }
            clusters = merged;
            if !changed {
                return clusters;
            }
        }
    }

    pub fn decode(&self, model: &CodeModel, s: &Bits) -> Result<Correction> {
        let n = model.n;
        let mut clusters: Vec<Cluster> = s
            .iter_ones()
            .map(|t| {
                let mut region = vec![false; n];
                for &q in &self.term_support[t] {
                    region[q] = true;
                }
                Cluster { flipped: vec![t], region, solution: None }
            })
            .collect();
        loop {
            clusters = Self::merge(clusters);
            for c in clusters.iter_mut().filter(|c| c.solution.is_none()) {
                c.solution = self.solve_local(n, &c.region, &c.flipped);
            }
            if clusters.iter().all(|c| c.solution.is_some()) {
                break;
            }
            // a region closed under growth holds every operator that could help
            for c in clusters.iter_mut().filter(|c| c.solution.is_none()) {
                if !self.grow(&mut c.region) {
                    return Err(Error::Invalid("syndrome not realizable".into()));
                }
            }
        }
        let mut op = PauliOperator::identity(n);
        for c in &clusters {
            op.mul_assign_unsigned(c.solution.as_ref().expect("solved"));
        }
        debug_assert_eq!(&model.syndrome(&op), s);
        let class = model.class(&op);
        Ok(Correction { operator: op, class, exact: false })
    }
}

impl ClassDecoder for ClusterDecoder {
    fn correction_class(&self, model: &CodeModel, s: &Bits) -> Result<u64> {
        Ok(self.decode(model, s)?.class)
    }
}

/// Distance between two cells on the lattice, exposed for matching weights.
pub fn lattice_steps(cx: &CellComplex, a: CellRef, b: CellRef) -> Result<usize> {
    cx.lattice_distance(a, b, crate::complex::DistanceKind::Dual)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rbh::build_cubic_rbh;
    use crate::symmetry::derive_moveset;
    use rand::{Rng, SeedableRng};

    #[test]
    fn matching_is_optimal_on_small_instances() {
        let pts = [0usize, 3, 4, 9, 10, 20];
        let pair = |i: usize, j: usize| Some(pts[i].abs_diff(pts[j]));
        let exit = |i: usize| Some(pts[i].min(22 - pts[i]));
        let (pairs, exits, exact) = match_anyons(pts.len(), &pair, &exit).unwrap();
        assert!(exact);
        let cost: usize = pairs.iter().map(|&(i, j)| pair(i, j).unwrap()).sum::<usize>()
            + exits.iter().map(|&i| exit(i).unwrap()).sum::<usize>();
        // 0 exits, 3-4, 9-10, 20 exits
        assert_eq!(cost, 0 + 1 + 1 + 2);
    }

    #[test]
    fn empty_syndrome_gives_identity() {
        let m = build_cubic_rbh(2).unwrap();
        let c = decode_rbh(&Bits::zeros(m.num_terms()), &m).unwrap();
        assert!(c.operator.is_identity());
        assert_eq!(fault_check(&PauliOperator::identity(m.n), &c, &m).unwrap(), Fault::None);
    }

    #[test]
    fn decodes_symmetric_errors() {
        let m = build_cubic_rbh(3).unwrap();
        let ms = derive_moveset(&m, 1).unwrap();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        let mut faults = 0;
        for _ in 0..200 {
            let mut e = PauliOperator::identity(m.n);
            e.mul_assign_unsigned(&ms.moves[rng.gen_range(0..ms.len())].op);
            if rng.gen_bool(0.5) {
                e.mul_assign_unsigned(&m.terms[rng.gen_range(0..m.num_terms())]);
            }
            let c = decode_rbh(&m.syndrome(&e), &m).unwrap();
            assert_eq!(m.syndrome(&c.operator), m.syndrome(&e));
            if fault_check(&e, &c, &m).unwrap() != Fault::None {
                faults += 1;
            }
        }
        assert_eq!(faults, 0);
    }

    #[test]
    fn fault_kinds() {
        let m = build_cubic_rbh(2).unwrap();
        let id = Correction { operator: PauliOperator::identity(m.n), class: 0, exact: true };
        let (x, z) = m.logicals[0].clone();
        assert_eq!(fault_check(&x, &id, &m).unwrap(), Fault::X);
        assert_eq!(fault_check(&z, &id, &m).unwrap(), Fault::Z);
        assert_eq!(fault_check(&x.multiply_unsigned(&z), &id, &m).unwrap(), Fault::Y);
        assert_eq!(fault_check(&m.terms[0], &id, &m).unwrap(), Fault::None);
    }

    #[test]
    fn pure_error_realizes_syndrome() {
        let m = build_cubic_rbh(2).unwrap();
        let s = Bits::from_indices(m.num_terms(), [0, 5, 17]);
        assert_eq!(m.syndrome(&pure_error(&m, &s).unwrap()), s);
    }

    #[test]
    fn ml_oracle_on_repetition_code() {
        use crate::model::{overlap_locality, Lattice};
        use crate::PauliGroup;
        let n = 5;
        let terms: Vec<PauliOperator> = (0..n - 1).map(|i| PauliOperator::z_on(n, [i, i + 1])).collect();
        let loc = overlap_locality(n, &terms);
        let m = CodeModel::new(
            Family::Custom,
            "rep",
            terms,
            vec![TermKind::Other; n - 1],
            PauliGroup::empty(n),
            vec![(PauliOperator::x_on(n, 0..n), PauliOperator::z_on(n, [0]))],
            Lattice::None,
            loc,
            (0..n).map(|i| i.to_string()).collect(),
        )
        .unwrap();
        let s = m.syndrome(&PauliOperator::x_on(n, [0]));
        let d = ml_oracle(&s, &m).unwrap();
        assert_eq!(m.syndrome(&d.correction), s);
        assert_eq!(d.correction.weight(), 1);
        let t = MlTable::build(&m, 2, 2);
        let d2 = t.decide(&m, &s).unwrap();
        assert_eq!(d2.class, d.class);
        assert_eq!(ml_oracle(&Bits::zeros(n - 1), &m).unwrap().class, 0);
    }

    fn gcc_model(size: usize) -> CodeModel {
        crate::gcc::build_gcc(crate::complex::colex::Colex::tetrahedral(size).unwrap()).unwrap().model().unwrap()
    }

    fn errors_up_to(n: usize, w: usize) -> Vec<PauliOperator> {
        let ps = [Pauli::X, Pauli::Y, Pauli::Z];
        let mut out = Vec::new();
        for k in 1..=w {
            for sup in (0..n).combinations(k) {
                for kinds in std::iter::repeat_n(0..3usize, k).multi_cartesian_product() {
                    let mut e = PauliOperator::identity(n);
                    for (&q, &i) in sup.iter().zip(&kinds) {
                        e.set(q, ps[i]);
                    }
                    out.push(e);
                }
            }
        }
        out
    }

    #[test]
    fn cluster_decoder_matches_ml_on_small_gcc() {
        let m = gcc_model(1);
        let d = ClusterDecoder::new(&m);
        for e in errors_up_to(m.n, 2) {
            let s = m.syndrome(&e);
            let c = d.decode(&m, &s).unwrap();
            assert_eq!(m.syndrome(&c.operator), s);
            assert!(ml_oracle(&s, &m).unwrap().tied.contains(&c.class), "{e}");
        }
    }

    #[test]
    fn cluster_decoder_corrects_single_errors() {
        let m = gcc_model(2);
        let d = ClusterDecoder::new(&m);
        for e in errors_up_to(m.n, 1) {
            let c = d.decode(&m, &m.syndrome(&e)).unwrap();
            assert_eq!(fault_check(&e, &c, &m).unwrap(), Fault::None, "{e}");
        }
    }

    #[test]
    fn cluster_decoder_rejects_unrealizable() {
        let m = gcc_model(1);
        let d = ClusterDecoder::new(&m);
        let mut rejected = 0;
        for t in 0..m.num_terms() {
            let s = Bits::from_indices(m.num_terms(), [t]);
            assert_eq!(d.decode(&m, &s).is_ok(), pure_error(&m, &s).is_some());
            rejected += pure_error(&m, &s).is_none() as usize;
        }
        assert!(rejected > 0);
    }
}
