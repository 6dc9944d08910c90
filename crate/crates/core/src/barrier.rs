//! Exact energy barriers by bottleneck search over `(syndrome, class)` states.
//!
//! Caps rise one flipped term at a time. Within a cap the search is a plain
//! BFS; states above the cap are parked at their own energy and released when
//! the cap reaches it. The first visit of a state is therefore along a path of
//! minimal maximum energy, and a target found while the cap is `c` has
//! barrier exactly `c`.

use crate::bits::Bits;
use crate::error::{Error, Result};
use crate::model::CodeModel;
use crate::pauli::PauliOperator;
use crate::symmetry::MoveSet;
use hashbrown::HashTable;
use rayon::prelude::*;
use rustc_hash::FxHasher;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::hash::Hasher;
use std::sync::Arc;
use std::time::Instant;

/// Goal states of a barrier search.
#[derive(Clone)]
pub enum Target {
    /// Vacuum syndrome with a nonzero logical class.
    AnyLogical,
    /// Vacuum syndrome with exactly this class.
    Class(u64),
    /// This syndrome, any class.
    Syndrome(Bits),
    /// Arbitrary predicate on `(syndrome, class)`.
    Predicate(Arc<dyn Fn(&Bits, u64) -> bool + Send + Sync>),
}

impl Target {
    fn hit(&self, s: &Bits, class: u64) -> bool {
        match self {
            Target::AnyLogical => class != 0 && s.is_zero(),
            Target::Class(c) => class == *c && s.is_zero(),
            Target::Syndrome(t) => s == t,
            Target::Predicate(f) => f(s, class),
        }
    }
}

#[derive(Clone, Copy, Debug)]
pub struct BarrierOptions {
    /// Largest energy cap tried.
    pub max_energy: f64,
    /// Stop once this many states are stored.
    pub max_nodes: usize,
}

impl Default for BarrierOptions {
    fn default() -> Self {
        Self { max_energy: f64::INFINITY, max_nodes: 50_000_000 }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct BarrierResult {
    /// The barrier when found; otherwise a lower bound.
    pub barrier: f64,
    /// Move indices (into the move set) from vacuum to the target.
    pub witness: Vec<usize>,
    pub explored: usize,
    /// Search stopped at the energy or node limit; `barrier` is a lower bound.
    pub capped: bool,
    /// Every reachable state was visited without meeting the target.
    pub unreachable: bool,
    pub final_class: u64,
    pub wall_time: f64,
}

impl BarrierResult {
    pub fn found(&self) -> bool {
        !self.capped && !self.unreachable
    }
}

struct Store {
    /// Words per state: syndrome words then the class word.
    w: usize,
    arena: Vec<u64>,
    table: HashTable<u32>,
    parent: Vec<u32>,
    via: Vec<u32>,
}

fn hash_words(k: &[u64]) -> u64 {
    let mut h = FxHasher::default();
    for &x in k {
        h.write_u64(x);
    }
    h.finish()
}

impl Store {
    fn key(&self, id: u32) -> &[u64] {
        let i = id as usize * self.w;
        &self.arena[i..i + self.w]
    }

    fn len(&self) -> usize {
        self.parent.len()
    }

    /// Insert if absent; returns the new id.
    fn insert(&mut self, key: &[u64], hash: u64, parent: u32, via: u32) -> Option<u32> {
        let (w, arena) = (self.w, &self.arena);
        let eq = |&id: &u32| &arena[id as usize * w..id as usize * w + w] == key;
        if self.table.find(hash, eq).is_some() {
            return None;
        }
        let id = self.parent.len() as u32;
        self.arena.extend_from_slice(key);
        self.parent.push(parent);
        self.via.push(via);
        let (w, arena) = (self.w, &self.arena);
        self.table.insert_unique(hash, id, |&i| hash_words(&arena[i as usize * w..i as usize * w + w]));
        Some(id)
    }

    fn path(&self, mut id: u32) -> Vec<usize> {
        let mut out = Vec::new();
        while id != 0 {
            out.push(self.via[id as usize] as usize);
            id = self.parent[id as usize];
        }
        out.reverse();
        out
    }
}

fn flips(key: &[u64]) -> usize {
    key[..key.len() - 1].iter().map(|w| w.count_ones() as usize).sum()
}

fn to_bits(key: &[u64], len: usize) -> Bits {
    let mut b = Bits::zeros(len);
    for (i, w) in key[..key.len() - 1].iter().enumerate() {
        for j in 0..64 {
            if w >> j & 1 == 1 {
                b.set(i * 64 + j, true);
            }
        }
    }
    b
}

/// Minimum over move sequences reaching the target of the maximum energy.
pub fn energy_barrier(model: &CodeModel, moves: &MoveSet, target: &Target, opts: BarrierOptions) -> Result<BarrierResult> {
    let start = Instant::now();
    let nt = model.num_terms();
    let sw = nt.div_ceil(64);
    let w = sw + 1;
    let active: Vec<usize> = moves.effective();
    let deltas: Vec<Vec<u64>> = active
        .iter()
        .map(|&i| {
            let mv = &moves.moves[i];
            let mut d = mv.delta.words().to_vec();
            d.resize(sw, 0);
            d.push(mv.class);
            d
        })
        .collect();
    let max_flips = if opts.max_energy.is_finite() { (opts.max_energy / model.gap).floor() as usize } else { usize::MAX };

    let mut store = Store { w, arena: Vec::new(), table: HashTable::new(), parent: Vec::new(), via: Vec::new() };
    let vac = vec![0u64; w];
    store.insert(&vac, hash_words(&vac), 0, u32::MAX);
    let done = |store: &Store, id: u32, cap: usize, capped: bool, unreachable: bool| {
        let key = store.key(id);
        BarrierResult {
            barrier: cap as f64 * model.gap,
            witness: if capped || unreachable { Vec::new() } else { store.path(id).into_iter().map(|k| active[k]).collect() },
            explored: store.len(),
            capped,
            unreachable,
            final_class: key[w - 1],
            wall_time: start.elapsed().as_secs_f64(),
        }
    };
    if target.hit(&Bits::zeros(nt), 0) {
        return Ok(done(&store, 0, 0, false, false));
    }

    let mut parked: BTreeMap<usize, Vec<u32>> = BTreeMap::new();
    let mut frontier = vec![0u32];
    let mut cap = 0usize;
    const CHUNK: usize = 1 << 14;
    loop {
        while !frontier.is_empty() {
            let mut next = Vec::new();
            for chunk in frontier.chunks(CHUNK) {
                // children computed in parallel, inserted in a fixed order
                let children: Vec<Vec<(u64, u32, Vec<u64>)>> = chunk
                    .par_iter()
                    .map(|&id| {
                        let key = store.key(id);
                        deltas
                            .iter()
                            .enumerate()
                            .map(|(m, d)| {
                                let c: Vec<u64> = key.iter().zip(d).map(|(a, b)| a ^ b).collect();
                                (hash_words(&c), m as u32, c)
                            })
                            .collect()
                    })
                    .collect();
                for (&pid, kids) in chunk.iter().zip(children) {
                    for (h, m, c) in kids {
                        let Some(id) = store.insert(&c, h, pid, m) else { continue };
                        let f = flips(&c);
                        if f <= cap {
                            if target.hit(&to_bits(&c, nt), c[w - 1]) {
                                return Ok(done(&store, id, cap, false, false));
                            }
                            next.push(id);
                        } else {
                            parked.entry(f).or_default().push(id);
                        }
                        if store.len() >= opts.max_nodes {
                            return Ok(done(&store, 0, cap, true, false));
                        }
                    }
                }
            }
            frontier = next;
        }
        let Some((level, ids)) = parked.pop_first() else {
            return Ok(done(&store, 0, cap, false, true));
        };
        if level > max_flips {
            return Ok(done(&store, 0, level, true, false));
        }
        cap = level;
        for &id in &ids {
            let key = store.key(id);
            if target.hit(&to_bits(key, nt), key[w - 1]) {
                return Ok(done(&store, id, cap, false, false));
            }
        }
        frontier = ids;
    }
}

/// Barrier to any nontrivial logical class.
pub fn logical_barrier(model: &CodeModel, moves: &MoveSet, opts: BarrierOptions) -> Result<BarrierResult> {
    energy_barrier(model, moves, &Target::AnyLogical, opts)
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct TraceEntry {
    pub op: PauliOperator,
    pub syndrome: Bits,
    pub energy: f64,
}

/// Apply the witness moves one by one from the identity.
pub fn replay(witness: &[PauliOperator], model: &CodeModel) -> Result<Vec<TraceEntry>> {
    let mut op = PauliOperator::identity(model.n);
    let mut out = vec![TraceEntry { op: op.clone(), syndrome: Bits::zeros(model.num_terms()), energy: 0.0 }];
    for (i, m) in witness.iter().enumerate() {
        if m.n() != model.n {
            return Err(Error::Inconsistent(format!("witness step {i} has {} qubits", m.n())));
        }
        op.mul_assign_unsigned(m);
        let s = model.syndrome(&op);
        out.push(TraceEntry { energy: model.energy(&s), syndrome: s, op: op.clone() });
    }
    Ok(out)
}

pub fn witness_ops(result: &BarrierResult, moves: &MoveSet) -> Vec<PauliOperator> {
    result.witness.iter().map(|&i| moves.moves[i].op.clone()).collect()
}

/// Max energy along a replayed trace.
pub fn trace_max(trace: &[TraceEntry]) -> f64 {
    trace.iter().map(|t| t.energy).fold(0.0, f64::max)
}
