use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

/// Single-qubit Pauli label.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
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
            Pauli::Y => (true, true),
            Pauli::Z => (false, true),
        }
    }

    pub fn from_bits(x: bool, z: bool) -> Pauli {
        match (x, z) {
            (false, false) => Pauli::I,
            (true, false) => Pauli::X,
            (true, true) => Pauli::Y,
            (false, true) => Pauli::Z,
        }
    }

    pub fn as_char(self) -> char {
        match self {
            Pauli::I => '_',
            Pauli::X => 'X',
            Pauli::Y => 'Y',
            Pauli::Z => 'Z',
        }
    }
}

pub(crate) fn words_for(n: usize) -> usize {
    n.div_ceil(64).max(1)
}

/// Phase exponent `k` in `i^k` picked up by the product `P1·P2` of two
/// Hermitian Pauli rows given as packed `(x, z)` words.
pub(crate) fn product_phase(x1: &[u64], z1: &[u64], x2: &[u64], z2: &[u64]) -> u32 {
    let mut pos = 0u32;
    let mut neg = 0u32;
    for w in 0..x1.len() {
        let (a, b, c, d) = (x1[w], z1[w], x2[w], z2[w]);
        let xy = a & !b & c & d;
        let yz = a & b & !c & d;
        let zx = !a & b & c & !d;
        let xz = a & !b & !c & d;
        let yx = a & b & c & !d;
        let zy = !a & b & c & d;
        pos += (xy | yz | zx).count_ones();
        neg += (xz | yx | zy).count_ones();
    }
    (pos + 3 * neg) % 4
}

/// A Hermitian Pauli operator `±P_0 ⊗ … ⊗ P_{n-1}`, bit-packed.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct PauliString {
    n: usize,
    pub(crate) x: Vec<u64>,
    pub(crate) z: Vec<u64>,
    pub(crate) negative: bool,
}

impl PauliString {
    pub fn identity(n: usize) -> Self {
        let w = words_for(n);
        PauliString { n, x: vec![0; w], z: vec![0; w], negative: false }
    }

    pub fn single(n: usize, q: usize, p: Pauli) -> Self {
        let mut s = Self::identity(n);
        s.set(q, p);
        s
    }

    /// `∏ X_q (q ∈ xs) · ∏ Z_q (q ∈ zs)` with repeated indices cancelling.
    /// Supports must be disjoint after cancellation.
    pub fn from_supports(n: usize, xs: &[usize], zs: &[usize]) -> Result<Self> {
        let mut s = Self::identity(n);
        for &q in xs {
            s.check_index(q)?;
            s.x[q / 64] ^= 1 << (q % 64);
        }
        for &q in zs {
            s.check_index(q)?;
            s.z[q / 64] ^= 1 << (q % 64);
        }
        if s.x.iter().zip(&s.z).any(|(a, b)| a & b != 0) {
            return Err(Error::InvalidGate("X and Z supports overlap".into()));
        }
        Ok(s)
    }

    pub fn from_paulis(paulis: &[Pauli]) -> Self {
        let mut s = Self::identity(paulis.len());
        for (q, &p) in paulis.iter().enumerate() {
            s.set(q, p);
        }
        s
    }

    pub(crate) fn from_raw(n: usize, x: Vec<u64>, z: Vec<u64>, negative: bool) -> Self {
        PauliString { n, x, z, negative }
    }

    fn check_index(&self, q: usize) -> Result<()> {
        if q >= self.n {
            return Err(Error::InvalidGate(format!("qubit {q} out of range for {} qubits", self.n)));
        }
        Ok(())
    }

    pub fn num_qubits(&self) -> usize {
        self.n
    }

    pub fn get(&self, q: usize) -> Pauli {
        let (w, b) = (q / 64, q % 64);
        Pauli::from_bits((self.x[w] >> b) & 1 == 1, (self.z[w] >> b) & 1 == 1)
    }

    pub fn set(&mut self, q: usize, p: Pauli) {
        let (w, b) = (q / 64, q % 64);
        let (px, pz) = p.bits();
        self.x[w] = (self.x[w] & !(1 << b)) | ((px as u64) << b);
        self.z[w] = (self.z[w] & !(1 << b)) | ((pz as u64) << b);
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

    pub fn negate(&mut self) {
        self.negative = !self.negative;
    }

    pub fn negated(mut self) -> Self {
        self.negate();
        self
    }

    pub fn is_identity(&self) -> bool {
        self.x.iter().chain(&self.z).all(|&w| w == 0)
    }

    pub fn weight(&self) -> usize {
        self.x.iter().zip(&self.z).map(|(a, b)| (a | b).count_ones() as usize).sum()
    }

    pub fn support(&self) -> Vec<usize> {
        (0..self.n).filter(|&q| self.get(q) != Pauli::I).collect()
    }

    pub fn commutes_with(&self, other: &PauliString) -> bool {
        let mut parity = 0u32;
        for w in 0..self.x.len() {
            parity ^= ((self.x[w] & other.z[w]) ^ (self.z[w] & other.x[w])).count_ones();
        }
        parity.is_multiple_of(2)
    }

    /// `self · other`, which must be Hermitian (the factors commute).
    pub fn mul(&self, other: &PauliString) -> Result<PauliString> {
        if self.n != other.n {
            return Err(Error::QubitCountMismatch { expected: self.n, found: other.n });
        }
        if !self.commutes_with(other) {
            return Err(Error::InvalidGate("product of anticommuting Paulis is not Hermitian".into()));
        }
        let k = product_phase(&self.x, &self.z, &other.x, &other.z);
        let negative = self.negative ^ other.negative ^ (k == 2);
        let x = self.x.iter().zip(&other.x).map(|(a, b)| a ^ b).collect();
        let z = self.z.iter().zip(&other.z).map(|(a, b)| a ^ b).collect();
        Ok(PauliString { n: self.n, x, z, negative })
    }

    /// Restriction to `keep`, reindexed in the given order. Sign is kept.
    pub fn restrict(&self, keep: &[usize]) -> PauliString {
        let mut out = PauliString::identity(keep.len());
        for (i, &q) in keep.iter().enumerate() {
            out.set(i, self.get(q));
        }
        out.negative = self.negative;
        out
    }
}

impl fmt::Display for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(if self.negative { "-" } else { "+" })?;
        for q in 0..self.n {
            write!(f, "{}", self.get(q).as_char())?;
        }
        Ok(())
    }
}

impl fmt::Debug for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "PauliString({self})")
    }
}

impl FromStr for PauliString {
    type Err = Error;

    /// Parses `[+-]?[IXYZ_]*`, e.g. `-XZ_Y`.
    fn from_str(s: &str) -> Result<Self> {
        let (negative, body) = match s.as_bytes().first() {
            Some(b'-') => (true, &s[1..]),
            Some(b'+') => (false, &s[1..]),
            _ => (false, s),
        };
        let paulis = body
            .chars()
            .map(|c| match c {
                'I' | '_' => Ok(Pauli::I),
                'X' => Ok(Pauli::X),
                'Y' => Ok(Pauli::Y),
                'Z' => Ok(Pauli::Z),
                other => Err(Error::InvalidGate(format!("bad Pauli character {other:?}"))),
            })
            .collect::<Result<Vec<_>>>()?;
        let mut p = PauliString::from_paulis(&paulis);
        p.negative = negative;
        Ok(p)
    }
}
