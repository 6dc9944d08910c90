//! Conjugation of Pauli operators by CZ and CNOT circuits.

use crate::pauli::PauliOperator;
use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Gate {
    Cz(usize, usize),
    /// Control, target.
    Cnot(usize, usize),
}

/// `U P U^dagger` for the circuit `U = g_k ... g_1` given as `[g_1, ..., g_k]`.
pub fn conjugate(p: &PauliOperator, gates: &[Gate]) -> PauliOperator {
    let mut x = p.x_bits().clone();
    let mut z = p.z_bits().clone();
    let mut neg = p.is_negative();
    for g in gates {
        match *g {
            Gate::Cz(a, b) => {
                let (xa, xb) = (x.get(a), x.get(b));
                let (za, zb) = (z.get(a), z.get(b));
                neg ^= xa && xb && (za ^ zb);
                if xb {
                    z.flip(a);
                }
                if xa {
                    z.flip(b);
                }
            }
            Gate::Cnot(c, t) => {
                let (xc, zc, xt, zt) = (x.get(c), z.get(c), x.get(t), z.get(t));
                neg ^= xc && zt && !(xt ^ zc);
                if xc {
                    x.flip(t);
                }
                if zt {
                    z.flip(c);
                }
            }
        }
    }
    PauliOperator::from_parts(x, z, neg).expect("lengths preserved")
}
