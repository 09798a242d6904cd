//! Dense Gaussian elimination over a prime field, on machine words.

use num_bigint::BigInt;
use num_integer::Integer;

use super::IntMatrix;

pub(crate) fn reduce_bigint(x: &BigInt, p: u64) -> u64 {
    let m = x.mod_floor(&BigInt::from(p));
    let digits = m.to_u64_digits().1;
    digits.first().copied().unwrap_or(0)
}

fn inv_mod(a: u64, p: u64) -> u64 {
    // extended Euclid; a is nonzero mod the prime p
    let (mut t, mut new_t): (i128, i128) = (0, 1);
    let (mut r, mut new_r): (i128, i128) = (p as i128, (a % p) as i128);
    while new_r != 0 {
        let q = r / new_r;
        (t, new_t) = (new_t, t - q * new_t);
        (r, new_r) = (new_r, r - q * new_r);
    }
    debug_assert_eq!(r, 1, "not invertible mod {p}");
    ((t.rem_euclid(p as i128)) as u64) % p
}

/// Row-major matrix over `Z_p`.
#[derive(Debug, Clone)]
pub struct ModMatrix {
    p: u64,
    rows: usize,
    cols: usize,
    a: Vec<u64>,
}

impl ModMatrix {
    pub fn reduce(m: &IntMatrix, p: u64) -> Self {
        let a = m.entries().iter().map(|x| reduce_bigint(x, p)).collect();
        ModMatrix {
            p,
            rows: m.rows(),
            cols: m.cols(),
            a,
        }
    }

    pub fn from_rows(p: u64, rows: Vec<Vec<u64>>) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.len());
        let a = rows.into_iter().flatten().map(|x| x % p).collect();
        ModMatrix {
            p,
            rows: r,
            cols: c,
            a,
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn modulus(&self) -> u64 {
        self.p
    }

    #[inline]
    pub fn at(&self, r: usize, c: usize) -> u64 {
        self.a[r * self.cols + c]
    }

    #[inline]
    fn mulmod(&self, a: u64, b: u64) -> u64 {
        ((a as u128 * b as u128) % self.p as u128) as u64
    }

    /// In-place reduced row echelon form; returns the pivot column of each
    /// nonzero row, in order.
    pub fn rref(&mut self) -> Vec<usize> {
        let p = self.p;
        let mut pivots = Vec::new();
        let mut row = 0usize;
        for col in 0..self.cols {
            if row == self.rows {
                break;
            }
            let Some(pr) = (row..self.rows).find(|&r| self.at(r, col) != 0) else {
                continue;
            };
            if pr != row {
                for c in 0..self.cols {
                    self.a.swap(row * self.cols + c, pr * self.cols + c);
                }
            }
            let inv = inv_mod(self.at(row, col), p);
            for c in col..self.cols {
                let v = self.mulmod(self.at(row, c), inv);
                self.a[row * self.cols + c] = v;
            }
            for r in 0..self.rows {
                if r == row {
                    continue;
                }
                let f = self.at(r, col);
                if f == 0 {
                    continue;
                }
                for c in col..self.cols {
                    let sub = self.mulmod(f, self.at(row, c));
                    let cell = &mut self.a[r * self.cols + c];
                    *cell = (*cell + p - sub) % p;
                }
            }
            pivots.push(col);
            row += 1;
        }
        pivots
    }

    pub fn rank(&self) -> usize {
        self.clone().rref().len()
    }

    /// Kernel basis with the standard unit-at-free-column structure, in
    /// ascending free-column order.
    pub fn kernel_basis(&self) -> Vec<Vec<u64>> {
        let mut work = self.clone();
        let pivots = work.rref();
        let p = self.p;
        let is_pivot = {
            let mut flags = vec![false; self.cols];
            for &c in &pivots {
                flags[c] = true;
            }
            flags
        };
        let mut basis = Vec::new();
        for f in 0..self.cols {
            if is_pivot[f] {
                continue;
            }
            let mut v = vec![0u64; self.cols];
            v[f] = 1;
            for (row, &c) in pivots.iter().enumerate() {
                let x = work.at(row, f);
                if x != 0 {
                    v[c] = p - x;
                }
            }
            basis.push(v);
        }
        basis
    }

    /// Solves `self * x = b`, returning any solution (free variables zero).
    pub fn solve(&self, b: &[u64]) -> Option<Vec<u64>> {
        assert_eq!(b.len(), self.rows, "rhs length");
        let p = self.p;
        let mut aug = ModMatrix {
            p,
            rows: self.rows,
            cols: self.cols + 1,
            a: vec![0; self.rows * (self.cols + 1)],
        };
        for r in 0..self.rows {
            for c in 0..self.cols {
                aug.a[r * (self.cols + 1) + c] = self.at(r, c);
            }
            aug.a[r * (self.cols + 1) + self.cols] = b[r] % p;
        }
        let pivots = aug.rref();
        // A pivot in the augmented column means the system is inconsistent.
        if pivots.last() == Some(&self.cols) {
            return None;
        }
        let mut x = vec![0u64; self.cols];
        for (row, &c) in pivots.iter().enumerate() {
            x[c] = aug.at(row, self.cols);
        }
        Some(x)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rref_rank_kernel() {
        let m = ModMatrix::from_rows(3, vec![vec![1, 2, 0], vec![2, 4, 1]]);
        assert_eq!(m.rank(), 2);
        let k = m.kernel_basis();
        assert_eq!(k.len(), 1);
        // kernel vector: x + 2y = 0, z = 0 => (1, 1, 0) since free col is y
        assert_eq!(k[0], vec![1, 1, 0]);
    }

    #[test]
    fn solve_consistent_and_not() {
        let m = ModMatrix::from_rows(5, vec![vec![2, 0], vec![0, 0]]);
        let x = m.solve(&[4, 0]).unwrap();
        assert_eq!(x[0], 2);
        assert!(m.solve(&[0, 3]).is_none());
    }

    #[test]
    fn inverse_mod() {
        for p in [2u64, 3, 5, 7, 11] {
            for a in 1..p {
                assert_eq!((inv_mod(a, p) * a) % p, 1);
            }
        }
    }
}
