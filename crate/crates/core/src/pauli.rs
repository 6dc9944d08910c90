//! Hermitian Pauli operators with a real sign.

use crate::bits::Bits;
use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};
use std::fmt;
use std::str::FromStr;

/// `sign * prod_i P_i` where `P_i` is I, X, Z or Y according to `(x_i, z_i)`.
#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PauliOperator {
    x: Bits,
    z: Bits,
    negative: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Pauli {
    I,
    X,
    Y,
    Z,
}

impl Pauli {
    pub fn bits(self) -> (bool, bool) {
        match self {
            Pauli::I => (false, false),
            Pauli::X => (true, false),
            Pauli::Z => (false, true),
            Pauli::Y => (true, true),
        }
    }

    pub fn from_bits(x: bool, z: bool) -> Pauli {
        match (x, z) {
            (false, false) => Pauli::I,
            (true, false) => Pauli::X,
            (false, true) => Pauli::Z,
            (true, true) => Pauli::Y,
        }
    }
}

impl PauliOperator {
    pub fn identity(n: usize) -> Self {
        Self { x: Bits::zeros(n), z: Bits::zeros(n), negative: false }
    }

    pub fn from_parts(x: Bits, z: Bits, negative: bool) -> Result<Self> {
        if x.len() != z.len() {
            return Err(Error::SizeMismatch(x.len(), z.len()));
        }
        Ok(Self { x, z, negative })
    }

    pub fn single(n: usize, q: usize, p: Pauli) -> Self {
        let mut o = Self::identity(n);
        o.set(q, p);
        o
    }

    /// Product of `p` over the listed qubits.
    pub fn on(n: usize, qubits: impl IntoIterator<Item = usize>, p: Pauli) -> Self {
        let mut o = Self::identity(n);
        for q in qubits {
            let (a, b) = p.bits();
            if a {
                o.x.flip(q);
            }
            if b {
                o.z.flip(q);
            }
        }
        o
    }

    pub fn x_on(n: usize, qubits: impl IntoIterator<Item = usize>) -> Self {
        Self::on(n, qubits, Pauli::X)
    }

    pub fn z_on(n: usize, qubits: impl IntoIterator<Item = usize>) -> Self {
        Self::on(n, qubits, Pauli::Z)
    }

    pub fn n(&self) -> usize {
        self.x.len()
    }

    pub fn x_bits(&self) -> &Bits {
        &self.x
    }

    pub fn z_bits(&self) -> &Bits {
        &self.z
    }

    pub fn is_negative(&self) -> bool {
        self.negative
    }

    pub fn sign(&self) -> i8 {
        if self.negative {
            -1
        } else {
            1
        }
    }

    pub fn negated(mut self) -> Self {
        self.negative = !self.negative;
        self
    }

    pub fn with_sign(mut self, negative: bool) -> Self {
        self.negative = negative;
        self
    }

    pub fn get(&self, q: usize) -> Pauli {
        Pauli::from_bits(self.x.get(q), self.z.get(q))
    }

    /// Overwrite the tensor factor on qubit `q`; the sign is untouched.
    pub fn set(&mut self, q: usize, p: Pauli) {
        let (a, b) = p.bits();
        self.x.set(q, a);
        self.z.set(q, b);
    }

    pub fn is_identity(&self) -> bool {
        self.x.is_zero() && self.z.is_zero()
    }

    pub fn support_bits(&self) -> Bits {
        self.x.or(&self.z)
    }

    pub fn support(&self) -> Vec<usize> {
        self.support_bits().iter_ones().collect()
    }

    pub fn weight(&self) -> usize {
        self.x.words().iter().zip(self.z.words()).map(|(a, b)| (a | b).count_ones() as usize).sum()
    }

    /// Symplectic vector `(x | z)` of length `2n`.
    pub fn symplectic(&self) -> Bits {
        self.x.concat(&self.z)
    }

    pub fn from_symplectic(v: &Bits) -> Self {
        let n = v.len() / 2;
        Self { x: v.slice(0, n), z: v.slice(n, n), negative: false }
    }

    #[inline]
    pub fn commutes_unchecked(&self, o: &PauliOperator) -> bool {
        let mut acc = 0u64;
        let (xa, za, xb, zb) = (self.x.words(), self.z.words(), o.x.words(), o.z.words());
        for k in 0..xa.len() {
            acc ^= (xa[k] & zb[k]) ^ (za[k] & xb[k]);
        }
        acc.count_ones() & 1 == 0
    }

    pub fn commutes(&self, o: &PauliOperator) -> Result<bool> {
        if self.n() != o.n() {
            return Err(Error::SizeMismatch(self.n(), o.n()));
        }
        Ok(self.commutes_unchecked(o))
    }

    /// Phase exponent `e` with `self * o = i^e (xor of both)` before signs.
    fn product_phase(&self, o: &PauliOperator) -> u32 {
        let (xa, za, xb, zb) = (self.x.words(), self.z.words(), o.x.words(), o.z.words());
        let mut plus = 0u32;
        let mut minus = 0u32;
        for k in 0..xa.len() {
            let ya = xa[k] & za[k];
            let xo_a = xa[k] & !za[k];
            let zo_a = za[k] & !xa[k];
            let yb = xb[k] & zb[k];
            let xo_b = xb[k] & !zb[k];
            let zo_b = zb[k] & !xb[k];
            // XY = iZ, YZ = iX, ZX = iY and reversed orders give -i.
            plus += ((xo_a & yb) | (ya & zo_b) | (zo_a & xo_b)).count_ones();
            minus += ((ya & xo_b) | (zo_a & yb) | (xo_a & zo_b)).count_ones();
        }
        (plus + 3 * minus) % 4
    }

    pub fn multiply(&self, o: &PauliOperator) -> Result<PauliOperator> {
        if self.n() != o.n() {
            return Err(Error::SizeMismatch(self.n(), o.n()));
        }
        let e = self.product_phase(o);
        if e % 2 == 1 {
            return Err(Error::ImaginaryPhase);
        }
        Ok(PauliOperator {
            x: self.x.xor(&o.x),
            z: self.z.xor(&o.z),
            negative: self.negative ^ o.negative ^ (e == 2),
        })
    }

    /// Product with the phase discarded (sign `+1`).
    pub fn multiply_unsigned(&self, o: &PauliOperator) -> PauliOperator {
        PauliOperator { x: self.x.xor(&o.x), z: self.z.xor(&o.z), negative: false }
    }

    /// In-place XOR of the Pauli part; signs are dropped.
    pub fn mul_assign_unsigned(&mut self, o: &PauliOperator) {
        self.x.xor_assign(&o.x);
        self.z.xor_assign(&o.z);
        self.negative = false;
    }

    /// Restrict to a subset of qubits (sign kept).
    pub fn restrict(&self, qubits: &[usize]) -> PauliOperator {
        let mut r = PauliOperator::identity(qubits.len());
        for (i, &q) in qubits.iter().enumerate() {
            r.set(i, self.get(q));
        }
        r.negative = self.negative;
        r
    }

    /// Embed an operator on `qubits.len()` qubits into `n` qubits.
    pub fn embed(&self, n: usize, qubits: &[usize]) -> PauliOperator {
        let mut r = PauliOperator::identity(n);
        for (i, &q) in qubits.iter().enumerate() {
            r.set(q, self.get(i));
        }
        r.negative = self.negative;
        r
    }

    /// Little-endian binary form: `u32` n, one sign byte, packed x bytes, packed z bytes.
    pub fn to_binary(&self) -> Vec<u8> {
        let mut out = (self.n() as u32).to_le_bytes().to_vec();
        out.push(self.negative as u8);
        out.extend(self.x.to_bytes());
        out.extend(self.z.to_bytes());
        out
    }

    pub fn from_binary(data: &[u8]) -> Result<PauliOperator> {
        let bad = || Error::Parse("malformed binary Pauli".into());
        if data.len() < 5 {
            return Err(bad());
        }
        let n = u32::from_le_bytes([data[0], data[1], data[2], data[3]]) as usize;
        let nb = n.div_ceil(8);
        if data.len() != 5 + 2 * nb || data[4] > 1 {
            return Err(bad());
        }
        let x = Bits::from_bytes(n, &data[5..5 + nb]).ok_or_else(bad)?;
        let z = Bits::from_bytes(n, &data[5 + nb..]).ok_or_else(bad)?;
        Ok(PauliOperator { x, z, negative: data[4] == 1 })
    }
}

impl fmt::Display for PauliOperator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(if self.negative { "-" } else { "+" })?;
        for q in 0..self.n() {
            f.write_str(match self.get(q) {
                Pauli::I => "I",
                Pauli::X => "X",
                Pauli::Y => "Y",
                Pauli::Z => "Z",
            })?;
        }
        Ok(())
    }
}

impl fmt::Debug for PauliOperator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl FromStr for PauliOperator {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (negative, body) = match s.as_bytes().first() {
            Some(b'+') => (false, &s[1..]),
            Some(b'-') => (true, &s[1..]),
            _ => (false, s),
        };
        let mut o = PauliOperator::identity(body.len());
        for (q, c) in body.chars().enumerate() {
            let p = match c {
                'I' | '_' => Pauli::I,
                'X' => Pauli::X,
                'Y' => Pauli::Y,
                'Z' => Pauli::Z,
                _ => return Err(Error::Parse(format!("bad Pauli character {c:?}"))),
            };
            o.set(q, p);
        }
        o.negative = negative;
        Ok(o)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn p(s: &str) -> PauliOperator {
        s.parse().unwrap()
    }

    #[test]
    fn single_qubit_relations() {
        assert!(!p("X").commutes(&p("Z")).unwrap());
        assert!(p("I").commutes(&p("Y")).unwrap());
        // XZ = -iY is imaginary, XZ * YY... use products with real phase
        assert!(p("X").multiply(&p("Z")).is_err());
        assert_eq!(p("XZ").multiply(&p("ZX")).unwrap(), p("+YY"));
        assert_eq!(p("ZX").multiply(&p("XZ")).unwrap(), p("+YY"));
        assert_eq!(p("XX").multiply(&p("ZZ")).unwrap(), p("-YY"));
        assert_eq!(p("-YZ").multiply(&p("-YZ")).unwrap(), p("+II"));
    }

    #[test]
    fn size_mismatch_is_error() {
        assert!(p("XX").commutes(&p("X")).is_err());
        assert!(p("XX").multiply(&p("X")).is_err());
    }

    #[test]
    fn text_roundtrip() {
        for s in ["+XIZZY", "-IIII", "+"] {
            assert_eq!(p(s).to_string(), s);
        }
        assert!("XQ".parse::<PauliOperator>().is_err());
    }

    fn arb_pauli(n: usize) -> impl Strategy<Value = PauliOperator> {
        (proptest::collection::vec(0u8..4, n), any::<bool>()).prop_map(|(v, neg)| {
            let mut o = PauliOperator::identity(v.len());
            for (q, c) in v.into_iter().enumerate() {
                o.set(q, [Pauli::I, Pauli::X, Pauli::Y, Pauli::Z][c as usize]);
            }
            o.with_sign(neg)
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig { max_global_rejects: 100_000, ..ProptestConfig::default() })]
        #[test]
        fn commutation_symmetric(a in arb_pauli(70), b in arb_pauli(70)) {
            prop_assert_eq!(a.commutes_unchecked(&b), b.commutes_unchecked(&a));
        }

        #[test]
        fn product_real_iff_commuting(a in arb_pauli(9), b in arb_pauli(9)) {
            prop_assert_eq!(a.multiply(&b).is_ok(), a.commutes_unchecked(&b));
        }

        #[test]
        fn self_product_is_identity(a in arb_pauli(67)) {
            let sq = a.multiply(&a).unwrap();
            prop_assert!(sq.is_identity());
            prop_assert!(!sq.is_negative());
        }

        #[test]
        fn left_multiplication_involution(a in arb_pauli(12), b in arb_pauli(12)) {
            prop_assume!(a.commutes_unchecked(&b));
            let ab = a.multiply(&b).unwrap();
            prop_assert_eq!(a.multiply(&ab).unwrap(), b);
        }

        #[test]
        fn associative(a in arb_pauli(3), b in arb_pauli(3), c in arb_pauli(3)) {
            prop_assume!(a.commutes_unchecked(&b) && b.commutes_unchecked(&c) && a.commutes_unchecked(&c));
            let l = a.multiply(&b).unwrap().multiply(&c).unwrap();
            let r = a.multiply(&b.multiply(&c).unwrap()).unwrap();
            prop_assert_eq!(l, r);
        }

        #[test]
        fn binary_roundtrip(a in arb_pauli(77)) {
            prop_assert_eq!(PauliOperator::from_binary(&a.to_binary()).unwrap(), a);
        }

        #[test]
        fn text_roundtrip_prop(a in arb_pauli(20)) {
            prop_assert_eq!(a.to_string().parse::<PauliOperator>().unwrap(), a);
        }
    }
}
