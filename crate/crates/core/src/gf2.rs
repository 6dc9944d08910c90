//! Gaussian elimination over GF(2) with lowest-index-first pivots.

use crate::bits::Bits;

/// Row-reduce in place to reduced row echelon form; returns pivot columns.
/// Zero rows are removed.
pub fn rref(rows: &mut Vec<Bits>) -> Vec<usize> {
    let mut pivots = Vec::new();
    let mut r = 0;
    let ncols = rows.first().map_or(0, |b| b.len());
    for c in 0..ncols {
        let Some(p) = (r..rows.len()).find(|&i| rows[i].get(c)) else { continue };
        rows.swap(r, p);
        let pivot = rows[r].clone();
        for (i, row) in rows.iter_mut().enumerate() {
            if i != r && row.get(c) {
                row.xor_assign(&pivot);
            }
        }
        pivots.push(c);
        r += 1;
        if r == rows.len() {
            break;
        }
    }
    rows.truncate(r);
    pivots
}

pub fn rank(rows: &[Bits]) -> usize {
    let mut m = rows.to_vec();
    rref(&mut m).len()
}

/// Basis of `{v : row . v = 0 for every row}` over `ncols` columns.
pub fn nullspace(rows: &[Bits], ncols: usize) -> Vec<Bits> {
    let mut m = rows.to_vec();
    let pivots = rref(&mut m);
    let mut is_pivot = vec![false; ncols];
    for &p in &pivots {
        is_pivot[p] = true;
    }
    let mut out = Vec::new();
    for free in (0..ncols).filter(|&c| !is_pivot[c]) {
        let mut v = Bits::zeros(ncols);
        v.set(free, true);
        for (row, &p) in m.iter().zip(&pivots) {
            if row.get(free) {
                v.set(p, true);
            }
        }
        out.push(v);
    }
    out
}

/// One solution of `row_i . x = rhs_i` for all rows (free variables zero).
pub fn solve(rows: &[Bits], rhs: &Bits, ncols: usize) -> Option<Bits> {
    let mut aug: Vec<Bits> = rows
        .iter()
        .enumerate()
        .map(|(i, r)| {
            let mut a = r.concat(&Bits::zeros(1));
            a.set(ncols, rhs.get(i));
            a
        })
        .collect();
    let pivots = rref(&mut aug);
    let mut x = Bits::zeros(ncols);
    for (row, &p) in aug.iter().zip(&pivots) {
        if p == ncols {
            return None;
        }
        if row.get(ncols) {
            x.set(p, true);
        }
    }
    Some(x)
}

/// Incremental echelon basis that remembers how each basis row was formed
/// from the inserted vectors.
#[derive(Clone, Debug, Default)]
pub struct Basis {
    rows: Vec<Bits>,
    combos: Vec<Bits>,
    pivots: Vec<usize>,
    inserted: usize,
    capacity: usize,
}

impl Basis {
    /// `capacity` bounds how many vectors may be inserted (combination width).
    pub fn new(capacity: usize) -> Self {
        Self { capacity, ..Default::default() }
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    /// Reduce `v` against the basis; returns the residual and the combination
    /// of inserted vectors that was subtracted.
    pub fn reduce(&self, v: &Bits) -> (Bits, Bits) {
        let mut r = v.clone();
        let mut c = Bits::zeros(self.capacity);
        for ((row, combo), &p) in self.rows.iter().zip(&self.combos).zip(&self.pivots) {
            if r.get(p) {
                r.xor_assign(row);
                c.xor_assign(combo);
            }
        }
        (r, c)
    }

    pub fn contains(&self, v: &Bits) -> bool {
        self.reduce(v).0.is_zero()
    }

    /// Express `v` as a combination of inserted vectors, if possible.
    pub fn express(&self, v: &Bits) -> Option<Bits> {
        let (r, c) = self.reduce(v);
        r.is_zero().then_some(c)
    }

    /// Insert the next vector; returns whether it was independent.
    pub fn insert(&mut self, v: &Bits) -> bool {
        assert!(self.inserted < self.capacity, "basis capacity exceeded");
        let idx = self.inserted;
        self.inserted += 1;
        let (r, mut c) = self.reduce(v);
        c.flip(idx);
        let Some(p) = r.first_one() else { return false };
        // keep rows fully reduced on pivot columns
        for (row, combo) in self.rows.iter_mut().zip(self.combos.iter_mut()) {
            if row.get(p) {
                row.xor_assign(&r);
                combo.xor_assign(&c);
            }
        }
        let pos = self.pivots.partition_point(|&q| q < p);
        self.rows.insert(pos, r);
        self.combos.insert(pos, c);
        self.pivots.insert(pos, p);
        true
    }
}
