//! Symmetric sector: local symmetric moves and syndrome reachability.

use crate::bits::Bits;
use crate::error::{Error, Result};
use crate::gf2::Basis;
use crate::model::{CodeModel, Family};
use crate::pauli::{Pauli, PauliOperator};
use serde::{Deserialize, Serialize};
use std::collections::HashSet;

/// Balls with a centralizer of at most this dimension get an exact
/// minimum-weight basis by enumeration; larger ones are reduced greedily.
const ENUMERATE_DIM: usize = 16;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Move {
    pub op: PauliOperator,
    /// Terms flipped by the move.
    pub delta: Bits,
    /// Logical-class flip, same bit layout as `CodeModel::class`.
    pub class: u64,
}

#[derive(Clone, Debug)]
pub struct MoveSet {
    pub moves: Vec<Move>,
    /// Ball radius in locality-graph steps; 0 for single-qubit moves.
    pub radius: usize,
    pub symmetric: bool,
}

impl MoveSet {
    pub fn len(&self) -> usize {
        self.moves.len()
    }

    pub fn is_empty(&self) -> bool {
        self.moves.is_empty()
    }

    /// Moves that change the `(syndrome, class)` state.
    pub fn effective(&self) -> Vec<usize> {
        (0..self.moves.len())
            .filter(|&i| !self.moves[i].delta.is_zero() || self.moves[i].class != 0)
            .collect()
    }
}

fn make_move(model: &CodeModel, op: PauliOperator) -> Move {
    Move { delta: model.syndrome(&op), class: model.class(&op), op }
}

pub fn is_symmetric(p: &PauliOperator, model: &CodeModel) -> bool {
    model.is_symmetric(p)
}

pub fn syndrome_of(p: &PauliOperator, model: &CodeModel) -> Bits {
    model.syndrome(p)
}

/// Minimum-weight basis of the span of `gens` (all supported on `cols`).
fn min_weight_basis(gens: &[PauliOperator], cols: &[usize]) -> Vec<PauliOperator> {
    let d = gens.len();
    if d == 0 {
        return Vec::new();
    }
    let local: Vec<PauliOperator> = gens.iter().map(|g| g.restrict(cols)).collect();
    let candidates: Vec<PauliOperator> = if d <= ENUMERATE_DIM {
        // Gray-code walk over the whole span
        let mut all = Vec::with_capacity(1 << d);
        let mut cur = PauliOperator::identity(cols.len());
        for i in 1u64..(1 << d) {
            let bit = i.trailing_zeros() as usize;
            cur.mul_assign_unsigned(&local[bit]);
            all.push(cur.clone());
        }
        all
    } else {
        reduce_pairwise(local)
    };
    let mut sorted = candidates;
    sorted.sort_by(|a, b| a.weight().cmp(&b.weight()).then_with(|| a.symplectic().cmp(&b.symplectic())));
    let mut basis = Basis::new(sorted.len());
    let mut out = Vec::new();
    for c in sorted {
        if out.len() == d {
            break;
        }
        if basis.insert(&c.symplectic()) {
            out.push(c.embed(gens[0].n(), cols));
        }
    }
    out
}

/// Repeatedly replace a generator by its product with another when that
/// lowers the weight.
fn reduce_pairwise(mut v: Vec<PauliOperator>) -> Vec<PauliOperator> {
    loop {
        let mut changed = false;
        for i in 0..v.len() {
            for j in 0..v.len() {
                if i == j {
                    continue;
                }
                let p = v[i].multiply_unsigned(&v[j]);
                if p.weight() < v[i].weight() {
                    v[i] = p;
                    changed = true;
                }
            }
        }
        if !changed {
            return v;
        }
    }
}

/// Symmetric moves: for every locality ball of the given radius, a
/// minimum-weight basis of the operators on the ball that commute with the
/// symmetry, deduplicated across balls.
pub fn derive_moveset(model: &CodeModel, radius: usize) -> Result<MoveSet> {
    if radius == 0 {
        return Err(Error::Invalid("move radius must be at least 1".into()));
    }
    let mut seen = HashSet::new();
    let mut moves = Vec::new();
    for ball in model.locality.balls(radius) {
        let cent = model.symmetry.centralizer(Some(&ball));
        for op in min_weight_basis(cent.generators(), &ball) {
            if !op.is_identity() && seen.insert(op.symplectic()) {
                moves.push(make_move(model, op));
            }
        }
    }
    Ok(MoveSet { moves, radius, symmetric: true })
}

/// Single-qubit X, Y and Z moves, ignoring the symmetry.
pub fn unrestricted_moveset(model: &CodeModel) -> MoveSet {
    let moves = (0..model.n)
        .flat_map(|q| [Pauli::X, Pauli::Y, Pauli::Z].map(|p| PauliOperator::single(model.n, q, p)))
        .map(|op| make_move(model, op))
        .collect();
    MoveSet { moves, radius: 0, symmetric: false }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Reachability {
    pub valid: bool,
    /// Symmetry generators (or stabilizer cells for flux checks) whose parity fails.
    pub violations: Vec<usize>,
}

/// Parity of the syndrome against every symmetry generator's term decomposition.
pub fn validate_generic(s: &Bits, model: &CodeModel) -> Reachability {
    let violations: Vec<usize> = model
        .symmetry_in_terms
        .iter()
        .enumerate()
        .filter(|(_, c)| c.dot(s))
        .map(|(i, _)| i)
        .collect();
    Reachability { valid: violations.is_empty(), violations }
}

/// Model-specific check that a syndrome can arise from a symmetric operator.
pub fn validate_reachable(s: &Bits, model: &CodeModel) -> Result<Reachability> {
    if s.len() != model.num_terms() {
        return Err(Error::SizeMismatch(model.num_terms(), s.len()));
    }
    match model.family {
        Family::Rbh | Family::Trivial => {
            let valid = crate::rbh::rbh_syndrome_consistent(model, s)?;
            let generic = validate_generic(s, model);
            if valid != generic.valid {
                return Err(Error::Inconsistent("structural and parity checks disagree".into()));
            }
            Ok(generic)
        }
        Family::Gcc => {
            let f = crate::gcc::flux_check_model(model, s)?;
            Ok(Reachability { valid: f.valid, violations: f.violated_cells })
        }
        Family::Color2d => {
            let v = crate::gauging::color_parity_violations(model, s)?;
            Ok(Reachability { valid: v.is_empty(), violations: (0..v.len()).collect() })
        }
        Family::Custom => Err(Error::Invalid("no reachability rule for custom models".into())),
    }
}
