//! Pauli groups given by generators.

use crate::bits::Bits;
use crate::error::{Error, Result};
use crate::gf2::{self, Basis};
use crate::pauli::PauliOperator;
use serde::{Deserialize, Serialize};
use std::sync::OnceLock;

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PauliGroup {
    n: usize,
    generators: Vec<PauliOperator>,
    #[serde(skip)]
    rank_cache: OnceLock<usize>,
}

impl PartialEq for PauliGroup {
    fn eq(&self, o: &Self) -> bool {
        self.n == o.n && self.generators == o.generators
    }
}

impl PauliGroup {
    pub fn new(n: usize, generators: Vec<PauliOperator>) -> Result<Self> {
        if let Some(g) = generators.iter().find(|g| g.n() != n) {
            return Err(Error::SizeMismatch(n, g.n()));
        }
        Ok(Self { n, generators, rank_cache: OnceLock::new() })
    }

    pub fn empty(n: usize) -> Self {
        Self { n, generators: Vec::new(), rank_cache: OnceLock::new() }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn generators(&self) -> &[PauliOperator] {
        &self.generators
    }

    pub fn rank(&self) -> usize {
        *self.rank_cache.get_or_init(|| {
            gf2::rank(&self.generators.iter().map(|g| g.symplectic()).collect::<Vec<_>>())
        })
    }

    pub fn is_abelian(&self) -> bool {
        let g = &self.generators;
        (0..g.len()).all(|i| (i + 1..g.len()).all(|j| g[i].commutes_unchecked(&g[j])))
    }

    /// Echelon basis over the generators' symplectic vectors.
    pub fn basis(&self) -> Basis {
        let mut b = Basis::new(self.generators.len());
        for g in &self.generators {
            b.insert(&g.symplectic());
        }
        b
    }

    /// Membership up to sign.
    pub fn contains_unsigned(&self, p: &PauliOperator) -> bool {
        self.basis().contains(&p.symplectic())
    }

    /// Which generators multiply to `p` up to sign, if any.
    pub fn express(&self, p: &PauliOperator) -> Option<Vec<usize>> {
        self.basis().express(&p.symplectic()).map(|c| c.iter_ones().collect())
    }

    /// Signed product of the listed generators. Errors on imaginary phases.
    pub fn product(&self, idx: &[usize]) -> Result<PauliOperator> {
        let mut acc = PauliOperator::identity(self.n);
        for &i in idx {
            acc = acc.multiply(&self.generators[i])?;
        }
        Ok(acc)
    }

    /// Signed membership for abelian groups: `Some(negative)` when `±p` is in
    /// the group, telling which sign is present.
    pub fn signed_member(&self, p: &PauliOperator) -> Result<Option<bool>> {
        match self.express(p) {
            None => Ok(None),
            Some(idx) => {
                let q = self.product(&idx)?;
                Ok(Some(q.is_negative()))
            }
        }
    }

    /// Independent subset of the generators (first occurrence wins).
    pub fn independent(&self) -> PauliGroup {
        let mut b = Basis::new(self.generators.len());
        let gens = self
            .generators
            .iter()
            .filter(|g| b.insert(&g.symplectic()))
            .cloned()
            .collect();
        PauliGroup { n: self.n, generators: gens, rank_cache: OnceLock::new() }
    }

    /// Abelian group check with `-1` detection.
    pub fn check_stabilizer(&self) -> Result<()> {
        if !self.is_abelian() {
            return Err(Error::NonAbelian);
        }
        // every dependent generator must reproduce its own sign
        let mut seen = Basis::new(self.generators.len());
        for g in &self.generators {
            if let Some(c) = seen.express(&g.symplectic()) {
                let idx: Vec<usize> = c.iter_ones().collect();
                if self.product(&idx)?.is_negative() != g.is_negative() {
                    return Err(Error::MinusIdentity);
                }
            }
            seen.insert(&g.symplectic());
        }
        Ok(())
    }

    /// Generators of every Pauli (up to sign) commuting with the group,
    /// optionally supported inside `restrict`.
    pub fn centralizer(&self, restrict: Option<&[usize]>) -> PauliGroup {
        let all: Vec<usize>;
        let cols: &[usize] = match restrict {
            Some(r) => r,
            None => {
                all = (0..self.n).collect();
                &all
            }
        };
        let m = cols.len();
        // row g' = (g_z | g_x) restricted, so row . (x|z) is the symplectic form
        let rows: Vec<Bits> = self
            .generators
            .iter()
            .map(|g| {
                let mut r = Bits::zeros(2 * m);
                for (i, &q) in cols.iter().enumerate() {
                    if g.z_bits().get(q) {
                        r.set(i, true);
                    }
                    if g.x_bits().get(q) {
                        r.set(m + i, true);
                    }
                }
                r
            })
            .collect();
        let gens = gf2::nullspace(&rows, 2 * m)
            .into_iter()
            .map(|v| PauliOperator::from_symplectic(&v).embed(self.n, cols))
            .collect();
        PauliGroup { n: self.n, generators: gens, rank_cache: OnceLock::new() }
    }

    /// Logical pairs of a stabilizer group.
    pub fn logical_operators(&self) -> Result<Vec<(PauliOperator, PauliOperator)>> {
        self.check_stabilizer()?;
        let r = self.rank();
        let k = self.n - r;
        let mut pool: Vec<PauliOperator> = self.centralizer(None).generators;
        let mut pairs = Vec::with_capacity(k);
        while let Some(a) = pool.pop() {
            let Some(j) = pool.iter().position(|b| !a.commutes_unchecked(b)) else {
                // commutes with the whole centralizer, so it is a stabilizer
                continue;
            };
            let b = pool.swap_remove(j);
            for c in pool.iter_mut() {
                let ca = !c.commutes_unchecked(&a);
                let cb = !c.commutes_unchecked(&b);
                if cb {
                    c.mul_assign_unsigned(&a);
                }
                if ca {
                    c.mul_assign_unsigned(&b);
                }
            }
            pairs.push((a, b));
        }
        if pairs.len() != k {
            return Err(Error::Inconsistent(format!(
                "found {} logical pairs, expected {k}",
                pairs.len()
            )));
        }
        Ok(pairs)
    }
}
