//! Metropolis dynamics on `(syndrome, class)` states and memory-time experiments.

use crate::bits::Bits;
use crate::error::{Error, Result};
use crate::model::{CodeModel, Lattice, TermKind};
use crate::complex::CellRef;
use crate::pauli::PauliOperator;
use crate::symmetry::MoveSet;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

/// A running chain. Each event proposes one uniformly chosen move and
/// accepts it with probability `min(1, exp(-beta * dE))`.
pub struct Chain<'a> {
    model: &'a CodeModel,
    moves: &'a MoveSet,
    /// Flipped term indices per move.
    deltas: Vec<Vec<u32>>,
    pub syndrome: Bits,
    pub class: u64,
    /// Number of flipped terms.
    pub flips: usize,
    pub beta: f64,
    pub time: u64,
    rng: ChaCha8Rng,
    /// `exp(-beta * gap * k)` for k = 0..
    boltz: Vec<f64>,
    op: Option<PauliOperator>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Event {
    pub mv: usize,
    pub accepted: bool,
}

impl<'a> Chain<'a> {
    pub fn new(model: &'a CodeModel, moves: &'a MoveSet, beta: f64, seed: u64) -> Result<Self> {
        if !(beta > 0.0) {
            return Err(Error::Invalid("beta must be positive".into()));
        }
        if moves.is_empty() {
            return Err(Error::Invalid("empty move set".into()));
        }
        let deltas: Vec<Vec<u32>> =
            moves.moves.iter().map(|m| m.delta.iter_ones().map(|i| i as u32).collect()).collect();
        let kmax = deltas.iter().map(Vec::len).max().unwrap_or(0);
        let boltz = (0..=kmax).map(|k| (-beta * model.gap * k as f64).exp()).collect();
        Ok(Chain {
            model,
            moves,
            deltas,
            syndrome: Bits::zeros(model.num_terms()),
            class: 0,
            flips: 0,
            beta,
            time: 0,
            rng: ChaCha8Rng::seed_from_u64(seed),
            boltz,
            op: None,
        })
    }

    /// Keep the accumulated operator (slower; for checks).
    pub fn track_operator(&mut self) {
        self.op = Some(PauliOperator::identity(self.model.n));
    }

    pub fn operator(&self) -> Option<&PauliOperator> {
        self.op.as_ref()
    }

    pub fn energy(&self) -> f64 {
        self.model.gap * self.flips as f64
    }

    pub fn step(&mut self) -> Event {
        self.time += 1;
        let m = self.rng.gen_range(0..self.deltas.len());
        let d = &self.deltas[m];
        let on = d.iter().filter(|&&t| self.syndrome.get(t as usize)).count();
        // new flips = flips + |d| - 2 on
        let up = d.len() as isize - 2 * on as isize;
        let accept = up <= 0 || self.rng.gen::<f64>() < self.boltz[up as usize];
        if accept {
            for &t in d {
                self.syndrome.flip(t as usize);
            }
            self.flips = (self.flips as isize + up) as usize;
            self.class ^= self.moves.moves[m].class;
            if let Some(op) = &mut self.op {
                op.mul_assign_unsigned(&self.moves.moves[m].op);
            }
        }
        Event { mv: m, accepted: accept }
    }

    pub fn run(&mut self, events: u64) {
        for _ in 0..events {
            self.step();
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct Sample {
    pub time: u64,
    pub syndrome: Bits,
    pub energy: f64,
    pub class: u64,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct Trajectory {
    pub seed: u64,
    pub beta: f64,
    pub steps: u64,
    pub samples: Vec<Sample>,
    pub final_class: u64,
}

/// Snapshot times 1, 2, 4, ... up to `t_max`, always ending at `t_max`.
pub fn snapshot_schedule(t_max: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut t = 1u64;
    while t < t_max {
        out.push(t);
        t = t.saturating_mul(2);
    }
    if t_max > 0 {
        out.push(t_max);
    }
    out
}

/// Decode times for memory trials: geometric with ratio 1.1, ending at `t_cap`.
pub fn fault_schedule(t_cap: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut t = 1u64;
    while t < t_cap {
        out.push(t);
        t = (t + 1).max((t as f64 * 1.1).ceil() as u64);
    }
    if t_cap > 0 {
        out.push(t_cap);
    }
    out
}

pub fn metropolis_run(model: &CodeModel, moves: &MoveSet, beta: f64, t_max: u64, seed: u64) -> Result<Trajectory> {
    let mut chain = Chain::new(model, moves, beta, seed)?;
    let mut samples = vec![Sample { time: 0, syndrome: chain.syndrome.clone(), energy: 0.0, class: 0 }];
    for t in snapshot_schedule(t_max) {
        chain.run(t - chain.time);
        samples.push(Sample { time: t, syndrome: chain.syndrome.clone(), energy: chain.energy(), class: chain.class });
    }
    Ok(Trajectory { seed, beta, steps: t_max, samples, final_class: chain.class })
}

/// Decoders used by memory experiments return the logical class of their
/// correction for a syndrome.
pub trait ClassDecoder: Sync {
    fn correction_class(&self, model: &CodeModel, syndrome: &Bits) -> Result<u64>;
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct TrialResult {
    pub trial: usize,
    pub seed: u64,
    /// First snapshot time (events) at which decoding gives a logical fault.
    pub fault_time: u64,
    pub censored: bool,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct MemoryEstimate {
    pub beta: f64,
    pub n: usize,
    pub moves: usize,
    pub trials: usize,
    /// Median fault time in sweeps (events divided by the number of moves).
    pub tau: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    pub censored: usize,
    pub per_trial: Vec<TrialResult>,
}

/// Seed for trial `i` derived from a base seed.
pub fn trial_seed(seed: u64, i: usize) -> u64 {
    let mut r = ChaCha8Rng::seed_from_u64(seed);
    r.set_stream(i as u64 + 1);
    r.gen()
}

pub fn median(v: &mut [f64]) -> f64 {
    v.sort_by(|a, b| a.total_cmp(b));
    let n = v.len();
    if n == 0 {
        return f64::NAN;
    }
    if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}

/// Percentile bootstrap interval for the median.
pub fn bootstrap_median_ci(v: &[f64], reps: usize, level: f64, seed: u64) -> (f64, f64) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut meds: Vec<f64> = (0..reps)
        .map(|_| {
            let mut s: Vec<f64> = (0..v.len()).map(|_| v[rng.gen_range(0..v.len())]).collect();
            median(&mut s)
        })
        .collect();
    meds.sort_by(|a, b| a.total_cmp(b));
    let lo = ((1.0 - level) / 2.0 * reps as f64).floor() as usize;
    let hi = (((1.0 + level) / 2.0 * reps as f64).ceil() as usize).min(reps) - 1;
    (meds[lo], meds[hi])
}

/// Independent trials from vacuum; each decodes at geometric snapshots and
/// records the first time the decoded state is a logical fault.
pub fn memory_time(
    model: &CodeModel,
    moves: &MoveSet,
    beta: f64,
    decoder: &dyn ClassDecoder,
    trials: usize,
    t_cap: u64,
    seed: u64,
) -> Result<MemoryEstimate> {
    if trials == 0 {
        return Err(Error::Invalid("at least one trial required".into()));
    }
    let schedule = fault_schedule(t_cap);
    let per_trial: Vec<TrialResult> = (0..trials)
        .into_par_iter()
        .map(|i| -> Result<TrialResult> {
            let s = trial_seed(seed, i);
            let mut chain = Chain::new(model, moves, beta, s)?;
            for &t in &schedule {
                chain.run(t - chain.time);
                let c = decoder.correction_class(model, &chain.syndrome)?;
                if c ^ chain.class != 0 {
                    return Ok(TrialResult { trial: i, seed: s, fault_time: t, censored: false });
                }
            }
            Ok(TrialResult { trial: i, seed: s, fault_time: t_cap, censored: true })
        })
        .collect::<Result<_>>()?;
    let scale = moves.len() as f64;
    let times: Vec<f64> = per_trial.iter().map(|t| t.fault_time as f64 / scale).collect();
    let tau = median(&mut times.clone());
    let (ci_low, ci_high) = bootstrap_median_ci(&times, 2000, 0.95, seed ^ 0x5eed);
    Ok(MemoryEstimate {
        beta,
        n: model.n,
        moves: moves.len(),
        trials,
        tau,
        ci_low,
        ci_high,
        censored: per_trial.iter().filter(|t| t.censored).count(),
        per_trial,
    })
}

/// Adjacency between bulk excitations: cluster terms on edges sharing a
/// vertex, or on faces sharing a cube. Other terms are left isolated.
pub fn bulk_term_graph(model: &CodeModel) -> (Vec<bool>, Vec<Vec<usize>>) {
    let nt = model.num_terms();
    let mut is_bulk = vec![false; nt];
    let mut adj = vec![Vec::new(); nt];
    let Lattice::Cubic(cx) = &model.lattice else { return (is_bulk, adj) };
    let mut term_of = vec![None; model.n];
    for (i, k) in model.term_kind.iter().enumerate() {
        if let TermKind::Cluster { qubit } = *k {
            is_bulk[i] = true;
            term_of[qubit] = Some(i);
        }
    }
    // joint cells: vertices for edges, cubes for faces
    for (joint_dim, member_dim) in [(0usize, 1usize), (3, 2)] {
        for j in 0..cx.count(joint_dim) {
            let jr = CellRef { dim: joint_dim, id: j };
            let members = if joint_dim == 0 { cx.coboundary(jr) } else { cx.boundary(jr) };
            let ts: Vec<usize> = members
                .iter()
                .filter_map(|&c| cx.qubit_of(CellRef { dim: member_dim, id: c }))
                .filter_map(|q| term_of[q])
                .collect();
            for &a in &ts {
                for &b in &ts {
                    if a != b && !adj[a].contains(&b) {
                        adj[a].push(b);
                    }
                }
            }
        }
    }
    (is_bulk, adj)
}

/// Size of the largest connected set of flipped bulk terms.
pub fn largest_cluster(s: &Bits, is_bulk: &[bool], adj: &[Vec<usize>]) -> usize {
    let mut seen = vec![false; is_bulk.len()];
    let mut best = 0;
    for start in s.iter_ones() {
        if !is_bulk[start] || seen[start] {
            continue;
        }
        seen[start] = true;
        let mut stack = vec![start];
        let mut size = 0;
        while let Some(u) = stack.pop() {
            size += 1;
            for &w in &adj[u] {
                if !seen[w] && is_bulk[w] && s.get(w) {
                    seen[w] = true;
                    stack.push(w);
                }
            }
        }
        best = best.max(size);
    }
    best
}

/// Histogram (index = largest bulk loop size) after burn-in, sampling every
/// `spacing` events.
pub fn gibbs_loop_census(
    model: &CodeModel,
    moves: &MoveSet,
    beta: f64,
    burn_in: u64,
    samples: usize,
    spacing: u64,
    seed: u64,
) -> Result<Vec<u64>> {
    let (is_bulk, adj) = bulk_term_graph(model);
    let mut chain = Chain::new(model, moves, beta, seed)?;
    chain.run(burn_in);
    let mut hist = vec![0u64; 1];
    for _ in 0..samples {
        chain.run(spacing.max(1));
        let w = largest_cluster(&chain.syndrome, &is_bulk, &adj);
        if w >= hist.len() {
            hist.resize(w + 1, 0);
        }
        hist[w] += 1;
    }
    Ok(hist)
}

/// `P(w >= k)` for each k from a census histogram.
pub fn tail_probabilities(hist: &[u64]) -> Vec<f64> {
    let total: u64 = hist.iter().sum();
    let mut out = vec![0.0; hist.len()];
    let mut acc = 0u64;
    for k in (0..hist.len()).rev() {
        acc += hist[k];
        out[k] = acc as f64 / total.max(1) as f64;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rbh::build_cubic_rbh;
    use crate::symmetry::derive_moveset;

    #[test]
    fn schedule_is_geometric() {
        assert_eq!(snapshot_schedule(10), vec![1, 2, 4, 8, 10]);
        assert_eq!(snapshot_schedule(8), vec![1, 2, 4, 8]);
        let f = fault_schedule(1000);
        assert!(f.windows(2).all(|w| w[0] < w[1] && w[1] as f64 <= (w[0] as f64 * 1.1).ceil().max(w[0] as f64 + 1.0)));
        assert_eq!(*f.last().unwrap(), 1000);
    }

    #[test]
    fn cold_chain_stays_at_vacuum() {
        let m = build_cubic_rbh(2).unwrap();
        let ms = derive_moveset(&m, 1).unwrap();
        // every effective move raises the energy from vacuum
        let mut c = Chain::new(&m, &ms, 1e6, 1).unwrap();
        for _ in 0..2000 {
            c.step();
            assert!(c.flips == 0 || ms.moves.iter().any(|mv| mv.delta.is_zero()));
        }
        assert_eq!(c.flips, 0);
    }

    #[test]
    fn energies_and_symmetry_along_run() {
        let m = build_cubic_rbh(2).unwrap();
        let ms = derive_moveset(&m, 1).unwrap();
        let mut c = Chain::new(&m, &ms, 0.7, 9).unwrap();
        c.track_operator();
        for _ in 0..50 {
            c.run(37);
            let op = c.operator().unwrap();
            assert!(m.is_symmetric(op));
            assert_eq!(m.syndrome(op), c.syndrome);
            assert_eq!(m.class(op), c.class);
            assert_eq!(c.flips, c.syndrome.count_ones());
        }
    }

    #[test]
    fn runs_are_reproducible() {
        let m = build_cubic_rbh(2).unwrap();
        let ms = derive_moveset(&m, 1).unwrap();
        let a = metropolis_run(&m, &ms, 1.0, 5000, 42).unwrap();
        let b = metropolis_run(&m, &ms, 1.0, 5000, 42).unwrap();
        assert_eq!(serde_json::to_string(&a).unwrap(), serde_json::to_string(&b).unwrap());
        for s in &a.samples {
            assert_eq!(s.energy, m.gap * s.syndrome.count_ones() as f64);
        }
    }

    #[test]
    fn acceptance_formula() {
        let m = build_cubic_rbh(2).unwrap();
        let ms = derive_moveset(&m, 1).unwrap();
        let c = Chain::new(&m, &ms, 1.0, 0).unwrap();
        assert!((c.boltz[2] - (-4.0f64).exp()).abs() < 1e-15);
    }

    #[test]
    fn census_tails() {
        let m = build_cubic_rbh(2).unwrap();
        let ms = derive_moveset(&m, 1).unwrap();
        let h = gibbs_loop_census(&m, &ms, 1.0, 1000, 300, 20, 5).unwrap();
        assert_eq!(h.iter().sum::<u64>(), 300);
        let t = tail_probabilities(&h);
        assert!(t.windows(2).all(|w| w[1] <= w[0]));
    }

    #[test]
    fn bootstrap_brackets_median() {
        let v: Vec<f64> = (1..=101).map(|x| x as f64).collect();
        let (lo, hi) = bootstrap_median_ci(&v, 500, 0.95, 1);
        assert!(lo <= 51.0 && 51.0 <= hi);
    }
}
