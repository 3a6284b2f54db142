//! Dense bit-packed matrices over GF(2).

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BitMatrix {
    rows: usize,
    cols: usize,
    words: usize,
    data: Vec<u64>,
}

impl BitMatrix {
    pub fn zeros(rows: usize, cols: usize) -> BitMatrix {
        let words = cols.div_ceil(64).max(1);
        BitMatrix { rows, cols, words, data: vec![0; rows * words] }
    }

    pub fn from_rows(cols: usize, rows: &[Vec<usize>]) -> BitMatrix {
        let mut m = BitMatrix::zeros(rows.len(), cols);
        for (r, ones) in rows.iter().enumerate() {
            for &c in ones {
                m.toggle(r, c);
            }
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> bool {
        (self.data[r * self.words + c / 64] >> (c % 64)) & 1 == 1
    }

    pub fn set(&mut self, r: usize, c: usize, v: bool) {
        let i = r * self.words + c / 64;
        let m = 1u64 << (c % 64);
        if v {
            self.data[i] |= m;
        } else {
            self.data[i] &= !m;
        }
    }

    pub fn toggle(&mut self, r: usize, c: usize) {
        self.data[r * self.words + c / 64] ^= 1 << (c % 64);
    }

    fn xor_row(&mut self, dst: usize, src: usize) {
        let w = self.words;
        for j in 0..w {
            let v = self.data[src * w + j];
            self.data[dst * w + j] ^= v;
        }
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a != b {
            for j in 0..self.words {
                self.data.swap(a * self.words + j, b * self.words + j);
            }
        }
    }

    /// In-place reduced row echelon form; returns pivot columns.
    pub fn rref(&mut self) -> Vec<usize> {
        let mut pivots = Vec::new();
        let mut top = 0;
        for c in 0..self.cols {
            if top == self.rows {
                break;
            }
            let Some(p) = (top..self.rows).find(|&r| self.get(r, c)) else {
                continue;
            };
            self.swap_rows(top, p);
            for r in 0..self.rows {
                if r != top && self.get(r, c) {
                    self.xor_row(r, top);
                }
            }
            pivots.push(c);
            top += 1;
        }
        pivots
    }

    pub fn rank(&self) -> usize {
        self.clone().rref().len()
    }

    /// Solve `self · x = b`. Free variables are set to zero. `None` when the
    /// system is inconsistent.
    pub fn solve(&self, b: &[bool]) -> Option<Vec<bool>> {
        assert_eq!(b.len(), self.rows, "right-hand side length");
        let mut aug = BitMatrix::zeros(self.rows, self.cols + 1);
        for (r, &rhs) in b.iter().enumerate() {
            for c in 0..self.cols {
                if self.get(r, c) {
                    aug.set(r, c, true);
                }
            }
            aug.set(r, self.cols, rhs);
        }
        let pivots = aug.rref();
        if pivots.last() == Some(&self.cols) {
            return None;
        }
        let mut x = vec![false; self.cols];
        for (r, &c) in pivots.iter().enumerate() {
            x[c] = aug.get(r, self.cols);
        }
        Some(x)
    }

    /// `self · x`.
    pub fn mul_vec(&self, x: &[bool]) -> Vec<bool> {
        (0..self.rows).map(|r| (0..self.cols).filter(|&c| x[c] && self.get(r, c)).count() % 2 == 1).collect()
    }

    pub fn transpose(&self) -> BitMatrix {
        let mut t = BitMatrix::zeros(self.cols, self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                if self.get(r, c) {
                    t.set(c, r, true);
                }
            }
        }
        t
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn identity_rank_and_solve() {
        let m = BitMatrix::from_rows(3, &[vec![0], vec![1], vec![2]]);
        assert_eq!(m.rank(), 3);
        assert_eq!(m.solve(&[true, false, true]), Some(vec![true, false, true]));
    }

    #[test]
    fn inconsistent_system() {
        let m = BitMatrix::from_rows(2, &[vec![0, 1], vec![0, 1]]);
        assert_eq!(m.rank(), 1);
        assert_eq!(m.solve(&[true, false]), None);
        assert_eq!(m.solve(&[true, true]), Some(vec![true, false]));
    }

    #[test]
    fn repeated_entries_cancel() {
        let m = BitMatrix::from_rows(2, &[vec![0, 0, 1]]);
        assert!(!m.get(0, 0));
        assert!(m.get(0, 1));
    }

    proptest! {
        #[test]
        fn solve_is_a_solution(
            rows in proptest::collection::vec(proptest::collection::vec(0usize..70, 0..8), 1..12),
            x in proptest::collection::vec(any::<bool>(), 70),
        ) {
            let m = BitMatrix::from_rows(70, &rows);
            let b = m.mul_vec(&x);
            let sol = m.solve(&b).expect("consistent by construction");
            prop_assert_eq!(m.mul_vec(&sol), b);
        }

        #[test]
        fn rank_of_transpose(rows in proptest::collection::vec(proptest::collection::vec(0usize..9, 0..5), 1..9)) {
            let m = BitMatrix::from_rows(9, &rows);
            prop_assert_eq!(m.rank(), m.transpose().rank());
        }
    }
}
