//! Loop counting and the Peierls tail estimate for string excitations.

use crate::complex::{CellComplex, CellRef};
use crate::error::{Error, Result};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, VecDeque};

/// Lower bound on the critical temperature implied by the `5^k` walk count.
pub fn t_c_lower() -> f64 {
    2.0 / 5f64.ln()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Sublattice {
    /// Vertices joined by edges.
    Primal,
    /// Cubes joined by faces.
    Dual,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LoopCensus {
    #[serde(rename = "L")]
    pub l: usize,
    pub sublattice: Sublattice,
    pub k_max: usize,
    /// `k -> N(k)` for every `k <= k_max`.
    pub counts: BTreeMap<usize, u64>,
}

/// Node graph of one sublattice: for each node, `(neighbor, link cell, step)`
/// where `step` is the unit displacement along the link.
struct LoopGraph {
    adj: Vec<Vec<(usize, usize, [i32; 3])>>,
}

impl LoopGraph {
    fn new(cx: &CellComplex, sub: Sublattice) -> LoopGraph {
        let (node_dim, link_dim) = match sub {
            Sublattice::Primal => (0, 1),
            Sublattice::Dual => (3, 2),
        };
        let spec = cx.spec();
        let mut adj = vec![Vec::new(); cx.count(node_dim)];
        for link in 0..cx.count(link_dim) {
            let lr = CellRef { dim: link_dim, id: link };
            let ends: Vec<usize> = match sub {
                Sublattice::Primal => cx.boundary(lr).to_vec(),
                Sublattice::Dual => cx.coboundary(lr).to_vec(),
            };
            if ends.len() != 2 {
                continue;
            }
            let lc = cx.coord(lr);
            for (a, b) in [(ends[0], ends[1]), (ends[1], ends[0])] {
                let ac = cx.coord(CellRef { dim: node_dim, id: a });
                let mut step = [0i32; 3];
                for ax in 0..3 {
                    let period = 2 * spec.dims[ax] as i32;
                    // link sits half a step from the node, possibly across the seam
                    let d = (lc[ax] - ac[ax]).rem_euclid(period);
                    step[ax] = match d {
                        0 => 0,
                        1 => 1,
                        _ => -1,
                    };
                }
                adj[a].push((b, link, step));
            }
        }
        LoopGraph { adj }
    }

    fn distances_from(&self, root: usize) -> Vec<u32> {
        let mut dist = vec![u32::MAX; self.adj.len()];
        dist[root] = 0;
        let mut q = VecDeque::from([root]);
        while let Some(u) = q.pop_front() {
            for &(w, _, _) in &self.adj[u] {
                if dist[w] == u32::MAX {
                    dist[w] = dist[u] + 1;
                    q.push_back(w);
                }
            }
        }
        dist
    }

    /// Contractible simple cycles whose smallest node is `root`, one per
    /// orientation class, by length.
    fn count_rooted(&self, root: usize, k_max: usize) -> Vec<u64> {
        let dist = self.distances_from(root);
        let mut counts = vec![0u64; k_max + 1];
        let mut on_path = vec![false; self.adj.len()];
        on_path[root] = true;
        struct Walk<'a> {
            g: &'a LoopGraph,
            dist: &'a [u32],
            root: usize,
            k_max: usize,
            on_path: &'a mut [bool],
            counts: &'a mut [u64],
        }
        fn dfs(w: &mut Walk, u: usize, len: usize, first_link: usize, disp: [i32; 3]) {
            for &(v, link, step) in &w.g.adj[u] {
                let d = [disp[0] + step[0], disp[1] + step[1], disp[2] + step[2]];
                if v == w.root {
                    // close once per orientation: first link below last link
                    if len >= 1 && link != first_link && first_link < link && d == [0, 0, 0] {
                        w.counts[len + 1] += 1;
                    }
                    continue;
                }
                if v < w.root || w.on_path[v] || len + 1 >= w.k_max {
                    continue;
                }
                if len + 1 + w.dist[v] as usize > w.k_max {
                    continue;
                }
                w.on_path[v] = true;
                dfs(w, v, len + 1, first_link, d);
                w.on_path[v] = false;
            }
        }
        let mut walk = Walk { g: self, dist: &dist, root, k_max, on_path: &mut on_path, counts: &mut counts };
        for &(v, link, step) in &self.adj[root] {
            if v <= root || k_max < 2 {
                continue;
            }
            walk.on_path[v] = true;
            dfs(&mut walk, v, 1, link, step);
            walk.on_path[v] = false;
        }
        counts
    }
}

/// Number of contractible loops (simple cycles) of each length up to `k_max`.
pub fn enumerate_loops(cx: &CellComplex, sublattice: Sublattice, k_max: usize) -> LoopCensus {
    let g = LoopGraph::new(cx, sublattice);
    let totals = (0..g.adj.len())
        .into_par_iter()
        .map(|root| g.count_rooted(root, k_max))
        .reduce(
            || vec![0u64; k_max + 1],
            |mut a, b| {
                a.iter_mut().zip(&b).for_each(|(x, y)| *x += y);
                a
            },
        );
    LoopCensus {
        l: cx.spec().dims[0],
        sublattice,
        k_max,
        counts: totals.into_iter().enumerate().collect(),
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundRow {
    pub k: usize,
    pub count: u64,
    pub bound: f64,
    pub ratio: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundReport {
    pub c: f64,
    pub rows: Vec<BoundRow>,
    pub holds: bool,
    /// Smallest `b` with `N(k) <= c L^3 b^k` over every censused `k`.
    pub fitted_base: f64,
}

impl BoundReport {
    pub fn to_csv(&self) -> String {
        let mut s = String::from("k,N(k),bound,ratio\n");
        for r in &self.rows {
            s.push_str(&format!("{},{},{:e},{:e}\n", r.k, r.count, r.bound, r.ratio));
        }
        s
    }
}

/// Compare a census with `c L^3 5^k`.
pub fn check_bound(census: &LoopCensus, c: f64) -> BoundReport {
    let vol = (census.l as f64).powi(3);
    let mut rows = Vec::new();
    let mut fitted_base: f64 = 0.0;
    for (&k, &n) in &census.counts {
        if k == 0 {
            continue;
        }
        let bound = c * vol * 5f64.powi(k as i32);
        rows.push(BoundRow { k, count: n, bound, ratio: n as f64 / bound });
        if n > 0 {
            fitted_base = fitted_base.max((n as f64 / (c * vol)).powf(1.0 / k as f64));
        }
    }
    let holds = rows.iter().all(|r| r.count as f64 <= r.bound);
    BoundReport { c, rows, holds, fitted_base }
}

/// Prefactor `c` in `p(L) = c L^3`, read off the plaquette count.
pub fn calibrate_c(census: &LoopCensus) -> Option<f64> {
    let n4 = *census.counts.get(&4)?;
    Some(n4 as f64 / (census.l as f64).powi(3))
}

/// Prefactor fixed by the plaquette count `N(4) = 3 L^3`.
pub const PLAQUETTE_C: f64 = 3.0;

/// `c L^3 e^{-alpha w} / (1 - e^{-alpha})` with `alpha = 2 beta - ln 5`.
pub fn tail_bound_with(beta: f64, w: usize, l: usize, c: f64) -> Result<f64> {
    let alpha = 2.0 * beta - 5f64.ln();
    if alpha <= 0.0 || !alpha.is_finite() {
        return Err(Error::Invalid(format!("tail bound needs beta > ln(5)/2, got {beta}")));
    }
    Ok(c * (l as f64).powi(3) * (-alpha * w as f64).exp() / (1.0 - (-alpha).exp()))
}

pub fn tail_bound(beta: f64, w: usize, l: usize) -> Result<f64> {
    tail_bound_with(beta, w, l, PLAQUETTE_C)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::complex::CubicSpec;
    use crate::gf2::Basis;
    use std::collections::HashSet;

    fn torus(l: usize) -> CellComplex {
        CellComplex::build(CubicSpec::periodic(l)).unwrap()
    }

    /// Brute force: every closed non-backtracking walk from every node,
    /// deduplicated by link set, kept when each node has degree 0 or 2, the
    /// links form one component, and the set is a GF(2) sum of elementary
    /// boundaries.
    fn oracle(cx: &CellComplex, sub: Sublattice, k: usize) -> u64 {
        let (nd, ld) = match sub {
            Sublattice::Primal => (0, 1),
            Sublattice::Dual => (3, 2),
        };
        let nl = cx.count(ld);
        let ends = |l: usize| -> Vec<usize> {
            let r = CellRef { dim: ld, id: l };
            match sub {
                Sublattice::Primal => cx.boundary(r).to_vec(),
                Sublattice::Dual => cx.coboundary(r).to_vec(),
            }
        };
        let mut links_at = vec![Vec::new(); cx.count(nd)];
        for l in 0..nl {
            for e in ends(l) {
                links_at[e].push(l);
            }
        }
        // contractible cycles are sums of face boundaries (primal) or edge coboundaries (dual)
        let gens: Vec<crate::Bits> = match sub {
            Sublattice::Primal => {
                (0..cx.count(2)).map(|f| crate::Bits::from_indices(nl, cx.boundary(CellRef { dim: 2, id: f }).to_vec())).collect()
            }
            Sublattice::Dual => {
                (0..cx.count(1)).map(|e| crate::Bits::from_indices(nl, cx.coboundary(CellRef { dim: 1, id: e }).to_vec())).collect()
            }
        };
        let mut span = Basis::new(gens.len() + 1);
        for g in &gens {
            span.insert(g);
        }
        let mut seen: HashSet<Vec<usize>> = HashSet::new();
        let mut count = 0;
        let mut stack: Vec<(usize, Vec<usize>)> = (0..cx.count(nd)).map(|v| (v, vec![])).collect();
        while let Some((v, path)) = stack.pop() {
            if path.len() == k {
                continue;
            }
            for &l in &links_at[v] {
                if path.last() == Some(&l) {
                    continue;
                }
                let e = ends(l);
                let w = if e[0] == v { e[1] } else { e[0] };
                let mut p = path.clone();
                p.push(l);
                if p.len() == k {
                    let mut set = p.clone();
                    set.sort_unstable();
                    set.dedup();
                    if set.len() != k || !seen.insert(set.clone()) {
                        continue;
                    }
                    let mut deg: std::collections::HashMap<usize, usize> = Default::default();
                    for &x in &set {
                        for y in ends(x) {
                            *deg.entry(y).or_default() += 1;
                        }
                    }
                    // k distinct links with every degree exactly 2 and k nodes form one cycle
                    if deg.values().all(|&d| d == 2) && deg.len() == k {
                        let mut probe = span.clone();
                        if !probe.insert(&crate::Bits::from_indices(nl, set)) {
                            count += 1;
                        }
                    }
                } else {
                    stack.push((w, p));
                }
            }
        }
        count
    }

    #[test]
    fn plaquettes_and_girth() {
        for l in [3, 4] {
            let c = enumerate_loops(&torus(l), Sublattice::Dual, 5);
            assert_eq!(c.counts[&3], 0);
            assert_eq!(c.counts[&4], 3 * (l as u64).pow(3));
            assert_eq!(c.counts[&5], 0);
            let p = enumerate_loops(&torus(l), Sublattice::Primal, 4);
            assert_eq!(p.counts[&4], 3 * (l as u64).pow(3));
        }
    }

    #[test]
    fn matches_brute_force_at_l3() {
        let cx = torus(3);
        let c = enumerate_loops(&cx, Sublattice::Primal, 6);
        for k in 2..=6 {
            assert_eq!(c.counts[&k], oracle(&cx, Sublattice::Primal, k), "k={k}");
        }
    }

    #[test]
    fn dual_matches_brute_force_k6_l4() {
        let cx = torus(4);
        let c = enumerate_loops(&cx, Sublattice::Dual, 6);
        assert_eq!(c.counts[&6], oracle(&cx, Sublattice::Dual, 6));
    }

    #[test]
    fn bound_and_fit() {
        let c = enumerate_loops(&torus(4), Sublattice::Dual, 8);
        let r = check_bound(&c, 1.0);
        assert!(r.holds);
        assert!(r.fitted_base < 5.0);
        assert_eq!(calibrate_c(&c), Some(3.0));
        assert!(r.to_csv().starts_with("k,N(k),bound,ratio\n"));
    }

    #[test]
    fn tail_bound_shape() {
        assert!((t_c_lower() - 1.242669869).abs() < 1e-8);
        assert!(tail_bound(0.8, 4, 3).is_err());
        let a = tail_bound(1.5, 10, 4).unwrap();
        assert!(tail_bound(1.5, 11, 4).unwrap() < a);
        assert!(tail_bound(1.6, 10, 4).unwrap() < a);
        let alpha = 2.0 - 5f64.ln();
        assert!((alpha - 0.3905620875658).abs() < 1e-12);
    }
}
