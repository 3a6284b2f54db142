//! Stabilizer tableau with destabilizers (CHP layout).
//!
//! Rows `0..n` are destabilizers, `n..2n` stabilizers, row `2n` is scratch.
//! Each row stores packed X and Z bits plus a sign bit; the `(1,1)` pattern
//! on a qubit denotes `Y`, so every row is a Hermitian Pauli.

use rand::Rng;

use super::pauli::{product_phase, words_for, PauliString};
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Outcome {
    /// `true` means the `-1` eigenvalue (bit 1).
    pub bit: bool,
    /// The outcome was drawn at random rather than fixed by the state.
    pub random: bool,
}

#[derive(Clone, PartialEq, Eq)]
pub struct Tableau {
    n: usize,
    words: usize,
    x: Vec<u64>,
    z: Vec<u64>,
    r: Vec<bool>,
}

impl Tableau {
    /// `|0…0⟩` on `n` qubits.
    pub fn new(n: usize) -> Tableau {
        let words = words_for(n);
        let rows = 2 * n + 1;
        let mut t = Tableau { n, words, x: vec![0; rows * words], z: vec![0; rows * words], r: vec![false; rows] };
        for q in 0..n {
            t.x[q * words + q / 64] |= 1 << (q % 64);
            t.z[(n + q) * words + q / 64] |= 1 << (q % 64);
        }
        t
    }

    /// `|+…+⟩` on `n` qubits.
    pub fn new_plus_state(n: usize) -> Tableau {
        let mut t = Tableau::new(n);
        for q in 0..n {
            t.h(q).expect("in range");
        }
        t
    }

    pub fn num_qubits(&self) -> usize {
        self.n
    }

    #[inline]
    fn bit(&self, plane: &[u64], row: usize, q: usize) -> bool {
        (plane[row * self.words + q / 64] >> (q % 64)) & 1 == 1
    }

    fn check(&self, q: usize) -> Result<()> {
        if q >= self.n {
            return Err(Error::InvalidGate(format!("qubit {q} out of range for {} qubits", self.n)));
        }
        Ok(())
    }

    // ---- gates -----------------------------------------------------------

    pub fn h(&mut self, q: usize) -> Result<()> {
        self.check(q)?;
        let (w, m) = (q / 64, 1u64 << (q % 64));
        for row in 0..2 * self.n {
            let i = row * self.words + w;
            let (xb, zb) = (self.x[i] & m, self.z[i] & m);
            if xb != 0 && zb != 0 {
                self.r[row] ^= true;
            }
            self.x[i] = (self.x[i] & !m) | zb;
            self.z[i] = (self.z[i] & !m) | xb;
        }
        Ok(())
    }

    pub fn s(&mut self, q: usize) -> Result<()> {
        self.check(q)?;
        let (w, m) = (q / 64, 1u64 << (q % 64));
        for row in 0..2 * self.n {
            let i = row * self.words + w;
            let (xb, zb) = (self.x[i] & m, self.z[i] & m);
            if xb != 0 && zb != 0 {
                self.r[row] ^= true;
            }
            self.z[i] ^= xb;
        }
        Ok(())
    }

    pub fn x(&mut self, q: usize) -> Result<()> {
        self.check(q)?;
        for row in 0..2 * self.n {
            if self.bit(&self.z, row, q) {
                self.r[row] ^= true;
            }
        }
        Ok(())
    }

    pub fn z(&mut self, q: usize) -> Result<()> {
        self.check(q)?;
        for row in 0..2 * self.n {
            if self.bit(&self.x, row, q) {
                self.r[row] ^= true;
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
        let (wc, mc) = (c / 64, c % 64);
        let (wt, mt) = (t / 64, t % 64);
        for row in 0..2 * self.n {
            let base = row * self.words;
            let xc = (self.x[base + wc] >> mc) & 1;
            let zc = (self.z[base + wc] >> mc) & 1;
            let xt = (self.x[base + wt] >> mt) & 1;
            let zt = (self.z[base + wt] >> mt) & 1;
            if xc & zt & (xt ^ zc ^ 1) == 1 {
                self.r[row] ^= true;
            }
            self.x[base + wt] ^= xc << mt;
            self.z[base + wc] ^= zt << mc;
        }
        Ok(())
    }

    pub fn cz(&mut self, a: usize, b: usize) -> Result<()> {
        self.check(a)?;
        self.check(b)?;
        if a == b {
            return Err(Error::InvalidGate(format!("CZ on a single qubit ({a})")));
        }
        let (wa, ma) = (a / 64, a % 64);
        let (wb, mb) = (b / 64, b % 64);
        for row in 0..2 * self.n {
            let base = row * self.words;
            let xa = (self.x[base + wa] >> ma) & 1;
            let za = (self.z[base + wa] >> ma) & 1;
            let xb = (self.x[base + wb] >> mb) & 1;
            let zb = (self.z[base + wb] >> mb) & 1;
            if xa & xb & (za ^ zb) == 1 {
                self.r[row] ^= true;
            }
            self.z[base + wa] ^= xb << ma;
            self.z[base + wb] ^= xa << mb;
        }
        Ok(())
    }

    /// Twelve CZs sharing `control`. A target listed twice cancels.
    pub fn cz12(&mut self, control: usize, targets: &[usize; 12]) -> Result<()> {
        for &t in targets {
            self.cz(control, t)?;
        }
        Ok(())
    }

    /// Conjugate by a Pauli: flips the sign of every anticommuting row.
    pub fn apply_pauli(&mut self, p: &PauliString) -> Result<()> {
        if p.num_qubits() != self.n {
            return Err(Error::QubitCountMismatch { expected: self.n, found: p.num_qubits() });
        }
        for row in 0..2 * self.n {
            if !self.row_commutes(row, p) {
                self.r[row] ^= true;
            }
        }
        Ok(())
    }

    // ---- row algebra -----------------------------------------------------

    fn row_commutes(&self, row: usize, p: &PauliString) -> bool {
        let base = row * self.words;
        let mut parity = 0;
        for w in 0..self.words {
            parity ^= ((self.x[base + w] & p.z[w]) ^ (self.z[base + w] & p.x[w])).count_ones();
        }
        parity % 2 == 0
    }

    /// Row `h` ← row `i` · row `h`.
    fn rowsum(&mut self, h: usize, i: usize) {
        let (bh, bi) = (h * self.words, i * self.words);
        let w = self.words;
        let k = product_phase(&self.x[bi..bi + w], &self.z[bi..bi + w], &self.x[bh..bh + w], &self.z[bh..bh + w]);
        let exp = (2 * self.r[h] as u32 + 2 * self.r[i] as u32 + k) % 4;
        debug_assert!(exp.is_multiple_of(2), "rowsum of anticommuting rows");
        self.r[h] = exp == 2;
        for j in 0..w {
            self.x[bh + j] ^= self.x[bi + j];
            self.z[bh + j] ^= self.z[bi + j];
        }
    }

    fn copy_row(&mut self, dst: usize, src: usize) {
        let w = self.words;
        self.x.copy_within(src * w..(src + 1) * w, dst * w);
        self.z.copy_within(src * w..(src + 1) * w, dst * w);
        self.r[dst] = self.r[src];
    }

    fn clear_row(&mut self, row: usize) {
        let w = self.words;
        self.x[row * w..(row + 1) * w].fill(0);
        self.z[row * w..(row + 1) * w].fill(0);
        self.r[row] = false;
    }

    fn row_pauli(&self, row: usize) -> PauliString {
        let w = self.words;
        PauliString::from_raw(
            self.n,
            self.x[row * w..(row + 1) * w].to_vec(),
            self.z[row * w..(row + 1) * w].to_vec(),
            self.r[row],
        )
    }

    pub fn stabilizer(&self, i: usize) -> PauliString {
        self.row_pauli(self.n + i)
    }

    pub fn destabilizer(&self, i: usize) -> PauliString {
        self.row_pauli(i)
    }

    pub fn stabilizers(&self) -> Vec<PauliString> {
        (0..self.n).map(|i| self.stabilizer(i)).collect()
    }

    // ---- measurement -----------------------------------------------------

    /// Pivot stabilizer row with X support on `q`, if the Z outcome is random.
    fn random_pivot(&self, q: usize) -> Option<usize> {
        (self.n..2 * self.n).find(|&row| self.bit(&self.x, row, q))
    }

    /// Z-basis measurement. The closure picks the bit when the outcome is
    /// random and is not called otherwise.
    pub fn measure_z_with(&mut self, q: usize, choose: impl FnOnce() -> bool) -> Result<Outcome> {
        self.check(q)?;
        let n = self.n;
        if let Some(p) = self.random_pivot(q) {
            for row in 0..2 * n {
                if row != p && row != p - n && self.bit(&self.x, row, q) {
                    self.rowsum(row, p);
                }
            }
            self.copy_row(p - n, p);
            self.clear_row(p);
            self.z[p * self.words + q / 64] |= 1 << (q % 64);
            let bit = choose();
            self.r[p] = bit;
            Ok(Outcome { bit, random: true })
        } else {
            let scratch = 2 * n;
            self.clear_row(scratch);
            for i in 0..n {
                if self.bit(&self.x, i, q) {
                    self.rowsum(scratch, i + n);
                }
            }
            Ok(Outcome { bit: self.r[scratch], random: false })
        }
    }

    pub fn measure_z<R: Rng + ?Sized>(&mut self, q: usize, rng: &mut R) -> Result<Outcome> {
        self.measure_z_with(q, || rng.random::<bool>())
    }

    pub fn measure_x<R: Rng + ?Sized>(&mut self, q: usize, rng: &mut R) -> Result<Outcome> {
        self.measure_x_with(q, || rng.random::<bool>())
    }

    pub fn measure_x_with(&mut self, q: usize, choose: impl FnOnce() -> bool) -> Result<Outcome> {
        self.h(q)?;
        let out = self.measure_z_with(q, choose)?;
        self.h(q)?;
        Ok(out)
    }

    /// Whether a Z (or, via `x_basis`, X) measurement of `q` would be random.
    pub fn is_random(&self, q: usize, x_basis: bool) -> bool {
        if x_basis {
            (self.n..2 * self.n).any(|row| self.bit(&self.z, row, q))
        } else {
            self.random_pivot(q).is_some()
        }
    }

    /// `⟨P⟩ ∈ {-1, 0, +1}`.
    pub fn expectation(&self, p: &PauliString) -> Result<i8> {
        if p.num_qubits() != self.n {
            return Err(Error::QubitCountMismatch { expected: self.n, found: p.num_qubits() });
        }
        if (self.n..2 * self.n).any(|row| !self.row_commutes(row, p)) {
            return Ok(0);
        }
        // P = ± ∏ S_i over i with D_i anticommuting with P.
        let w = self.words;
        let (mut ax, mut az, mut ar) = (vec![0u64; w], vec![0u64; w], false);
        for i in 0..self.n {
            if !self.row_commutes(i, p) {
                let b = (i + self.n) * w;
                let (sx, sz) = (&self.x[b..b + w], &self.z[b..b + w]);
                let k = product_phase(sx, sz, &ax, &az);
                ar = (2 * ar as u32 + 2 * self.r[i + self.n] as u32 + k) % 4 == 2;
                for j in 0..w {
                    ax[j] ^= sx[j];
                    az[j] ^= sz[j];
                }
            }
        }
        debug_assert!(ax == p.x && az == p.z);
        Ok(if ar == p.is_negative() { 1 } else { -1 })
    }

    /// Symplectic consistency of the tableau rows.
    pub fn check_invariants(&self) -> bool {
        let rows: Vec<PauliString> = (0..2 * self.n).map(|r| self.row_pauli(r)).collect();
        for i in 0..self.n {
            for j in 0..self.n {
                let anti = !rows[i].commutes_with(&rows[self.n + j]);
                if anti != (i == j) {
                    return false;
                }
                if !rows[i].commutes_with(&rows[j]) || !rows[self.n + i].commutes_with(&rows[self.n + j]) {
                    return false;
                }
            }
        }
        true
    }

    // ---- canonical forms -------------------------------------------------

    /// Stabilizer generators in reduced row-echelon form over the column
    /// order `x_0..x_{n-1}, z_0..z_{n-1}`. Equal states give equal output.
    pub fn canonical_stabilizers(&self) -> Vec<PauliString> {
        let cols: Vec<(bool, usize)> = (0..self.n).map(|q| (true, q)).chain((0..self.n).map(|q| (false, q))).collect();
        rref(self.stabilizers(), &cols).0
    }

    pub fn canonical_string(&self) -> String {
        join_rows(&self.canonical_stabilizers())
    }

    /// Generators of the stabilizer subgroup supported on `keep`, restricted
    /// to `keep` (reindexed in order) and canonicalised.
    pub fn subsystem_group(&self, keep: &[usize]) -> Vec<PauliString> {
        let mut in_keep = vec![false; self.n];
        for &q in keep {
            in_keep[q] = true;
        }
        let mut cols: Vec<(bool, usize)> = Vec::with_capacity(2 * self.n);
        for q in (0..self.n).filter(|&q| !in_keep[q]) {
            cols.push((true, q));
            cols.push((false, q));
        }
        let traced = cols.len();
        for &q in keep {
            cols.push((true, q));
        }
        for &q in keep {
            cols.push((false, q));
        }
        let (rows, pivots) = rref(self.stabilizers(), &cols);
        let sub: Vec<PauliString> =
            rows.iter().zip(&pivots).filter(|(_, &c)| c >= traced).map(|(r, _)| r.restrict(keep)).collect();
        let local: Vec<(bool, usize)> =
            (0..keep.len()).map(|q| (true, q)).chain((0..keep.len()).map(|q| (false, q))).collect();
        rref(sub, &local).0
    }
}

/// Number of independent generators among pairwise-commuting Pauli rows.
pub fn group_rank(rows: Vec<PauliString>) -> usize {
    let Some(n) = rows.first().map(|r| r.num_qubits()) else {
        return 0;
    };
    let cols: Vec<(bool, usize)> = (0..n).map(|q| (true, q)).chain((0..n).map(|q| (false, q))).collect();
    rref(rows, &cols).0.len()
}

impl std::fmt::Debug for Tableau {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Tableau").field("n", &self.n).field("stabilizers", &self.stabilizers()).finish()
    }
}

pub fn join_rows(rows: &[PauliString]) -> String {
    rows.iter().map(|r| r.to_string()).collect::<Vec<_>>().join("\n")
}

fn has_col(p: &PauliString, (is_x, q): (bool, usize)) -> bool {
    let plane = if is_x { &p.x } else { &p.z };
    (plane[q / 64] >> (q % 64)) & 1 == 1
}

/// Gauss-Jordan elimination of commuting Pauli rows in the given column order.
/// Returns the nonzero reduced rows and the column position of each pivot.
fn rref(mut rows: Vec<PauliString>, cols: &[(bool, usize)]) -> (Vec<PauliString>, Vec<usize>) {
    let mut pivots = Vec::new();
    let mut top = 0;
    for (ci, &col) in cols.iter().enumerate() {
        if top == rows.len() {
            break;
        }
        let Some(p) = (top..rows.len()).find(|&r| has_col(&rows[r], col)) else {
            continue;
        };
        rows.swap(top, p);
        for r in 0..rows.len() {
            if r != top && has_col(&rows[r], col) {
                rows[r] = rows[top].mul(&rows[r]).expect("stabilizer rows commute");
            }
        }
        pivots.push(ci);
        top += 1;
    }
    rows.truncate(top);
    (rows, pivots)
}
