//! Dense statevector simulator used as an independent reference.
//!
//! Qubit `q` is bit `q` of the basis-state index. Limited to
//! [`MAX_QUBITS`] qubits.

use num_complex::Complex64;
use rand::Rng;

use super::pauli::{Pauli, PauliString};
use crate::error::{Error, Result};

pub const MAX_QUBITS: usize = 20;

#[derive(Clone, Debug)]
pub struct StateVector {
    n: usize,
    amps: Vec<Complex64>,
}

impl StateVector {
    pub fn new(n: usize) -> Result<StateVector> {
        if n > MAX_QUBITS {
            return Err(Error::TooManyQubits { n, max: MAX_QUBITS });
        }
        let mut amps = vec![Complex64::new(0.0, 0.0); 1 << n];
        amps[0] = Complex64::new(1.0, 0.0);
        Ok(StateVector { n, amps })
    }

    pub fn num_qubits(&self) -> usize {
        self.n
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    fn check(&self, q: usize) -> Result<()> {
        if q >= self.n {
            return Err(Error::InvalidGate(format!("qubit {q} out of range for {} qubits", self.n)));
        }
        Ok(())
    }

    pub fn h(&mut self, q: usize) -> Result<()> {
        self.check(q)?;
        let m = 1usize << q;
        let s = std::f64::consts::FRAC_1_SQRT_2;
        for i in 0..self.amps.len() {
            if i & m == 0 {
                let (a, b) = (self.amps[i], self.amps[i | m]);
                self.amps[i] = (a + b) * s;
                self.amps[i | m] = (a - b) * s;
            }
        }
        Ok(())
    }

    pub fn x(&mut self, q: usize) -> Result<()> {
        self.check(q)?;
        let m = 1usize << q;
        for i in 0..self.amps.len() {
            if i & m == 0 {
                self.amps.swap(i, i | m);
            }
        }
        Ok(())
    }

    pub fn z(&mut self, q: usize) -> Result<()> {
        self.check(q)?;
        let m = 1usize << q;
        for (i, a) in self.amps.iter_mut().enumerate() {
            if i & m != 0 {
                *a = -*a;
            }
        }
        Ok(())
    }

    pub fn s(&mut self, q: usize) -> Result<()> {
        self.check(q)?;
        let m = 1usize << q;
        for (i, a) in self.amps.iter_mut().enumerate() {
            if i & m != 0 {
                *a *= Complex64::i();
            }
        }
        Ok(())
    }

    pub fn cz(&mut self, a: usize, b: usize) -> Result<()> {
        self.check(a)?;
        self.check(b)?;
        if a == b {
            return Err(Error::InvalidGate(format!("CZ on a single qubit ({a})")));
        }
        let m = (1usize << a) | (1usize << b);
        for (i, amp) in self.amps.iter_mut().enumerate() {
            if i & m == m {
                *amp = -*amp;
            }
        }
        Ok(())
    }

    pub fn cnot(&mut self, c: usize, t: usize) -> Result<()> {
        self.check(c)?;
        self.check(t)?;
        if c == t {
            return Err(Error::InvalidGate(format!("CNOT control equals target ({c})")));
        }
        let (mc, mt) = (1usize << c, 1usize << t);
        for i in 0..self.amps.len() {
            if i & mc != 0 && i & mt == 0 {
                self.amps.swap(i, i | mt);
            }
        }
        Ok(())
    }

    /// Probability of reading bit 1 on `q` in the Z basis.
    pub fn prob_one(&self, q: usize) -> Result<f64> {
        self.check(q)?;
        let m = 1usize << q;
        Ok(self.amps.iter().enumerate().filter(|(i, _)| i & m != 0).map(|(_, a)| a.norm_sqr()).sum())
    }

    /// Project `q` onto the Z eigenstate `bit` and renormalise.
    pub fn measure_z_forced(&mut self, q: usize, bit: bool) -> Result<()> {
        let p1 = self.prob_one(q)?;
        let p = if bit { p1 } else { 1.0 - p1 };
        if p < 1e-12 {
            return Err(Error::InvalidGate(format!("forced outcome {} on qubit {q} has zero probability", bit as u8)));
        }
        let m = 1usize << q;
        let norm = p.sqrt();
        for (i, a) in self.amps.iter_mut().enumerate() {
            if ((i & m) != 0) == bit {
                *a /= norm;
            } else {
                *a = Complex64::new(0.0, 0.0);
            }
        }
        Ok(())
    }

    pub fn measure_z<R: Rng + ?Sized>(&mut self, q: usize, rng: &mut R) -> Result<bool> {
        let p1 = self.prob_one(q)?;
        let bit = rng.random::<f64>() < p1;
        self.measure_z_forced(q, bit)?;
        Ok(bit)
    }

    pub fn measure_x_forced(&mut self, q: usize, bit: bool) -> Result<()> {
        self.h(q)?;
        self.measure_z_forced(q, bit)?;
        self.h(q)
    }

    /// `⟨ψ|P|ψ⟩`. Real for Hermitian `P`.
    pub fn expectation(&self, p: &PauliString) -> Result<f64> {
        if p.num_qubits() != self.n {
            return Err(Error::QubitCountMismatch { expected: self.n, found: p.num_qubits() });
        }
        let (mut xmask, mut zmask, mut ny) = (0usize, 0usize, 0u32);
        for q in 0..self.n {
            match p.get(q) {
                Pauli::I => {}
                Pauli::X => xmask |= 1 << q,
                Pauli::Z => zmask |= 1 << q,
                Pauli::Y => {
                    xmask |= 1 << q;
                    zmask |= 1 << q;
                    ny += 1;
                }
            }
        }
        let phase = Complex64::i().powu(ny) * p.sign() as f64;
        let mut acc = Complex64::new(0.0, 0.0);
        for (b, a) in self.amps.iter().enumerate() {
            if a.norm_sqr() == 0.0 {
                continue;
            }
            let sign = if (b & zmask).count_ones() % 2 == 1 { -1.0 } else { 1.0 };
            acc += self.amps[b ^ xmask].conj() * *a * sign;
        }
        Ok((acc * phase).re)
    }

    pub fn norm(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
    }
}
