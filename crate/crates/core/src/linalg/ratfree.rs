//! Fraction-free rational elimination: an insertion echelon of integer
//! columns (content-reduced after every cross-multiplication) and a small
//! dense rational solver.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use super::IntMatrix;

/// Echelon basis of a rational column span, stored as content-reduced
/// integer columns each owning a distinct pivot row.
#[derive(Debug, Clone)]
pub(crate) struct RatEchelon {
    dim: usize,
    cols: Vec<Vec<BigInt>>,
    pivots: Vec<usize>,
}

impl RatEchelon {
    pub fn new(dim: usize) -> Self {
        RatEchelon {
            dim,
            cols: Vec::new(),
            pivots: Vec::new(),
        }
    }

    pub fn rank(&self) -> usize {
        self.cols.len()
    }

    pub fn pivots(&self) -> &[usize] {
        &self.pivots
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Inserts a vector, reducing it against the basis first. Returns true
    /// when the vector enlarged the span.
    pub fn insert(&mut self, mut v: Vec<BigInt>) -> bool {
        assert_eq!(v.len(), self.dim, "echelon dimension");
        for (e, &p) in self.cols.iter().zip(&self.pivots) {
            if v[p].is_zero() {
                continue;
            }
            // v <- e[p] * v - v[p] * e, fraction-free
            let vp = std::mem::replace(&mut v[p], BigInt::zero());
            let ep = e[p].clone();
            for (x, y) in v.iter_mut().zip(e.iter()) {
                let mut acc = std::mem::take(x) * &ep;
                if !y.is_zero() {
                    acc -= &vp * y;
                }
                *x = acc;
            }
            v[p] = BigInt::zero();
        }
        normalize_content(&mut v);
        let Some(pivot) = pick_pivot(&v) else {
            return false;
        };
        self.cols.push(v);
        self.pivots.push(pivot);
        true
    }

    /// Eliminates the pivot rows from a rational vector; the residual is
    /// zero exactly when the vector lies in the span.
    pub fn reduce_rational(&self, mut v: Vec<BigRational>) -> Vec<BigRational> {
        assert_eq!(v.len(), self.dim, "echelon dimension");
        for (e, &p) in self.cols.iter().zip(&self.pivots) {
            if v[p].is_zero() {
                continue;
            }
            let coeff = v[p].clone() / BigRational::from(e[p].clone());
            for (x, y) in v.iter_mut().zip(e.iter()) {
                if !y.is_zero() {
                    *x -= &coeff * BigRational::from(y.clone());
                }
            }
            v[p] = BigRational::zero();
        }
        v
    }

    pub fn contains_int(&self, v: &[BigInt]) -> bool {
        let rat: Vec<BigRational> = v.iter().map(|x| BigRational::from(x.clone())).collect();
        self.reduce_rational(rat).iter().all(|x| x.is_zero())
    }
}

/// Divides by the gcd of the entries and makes the first nonzero entry
/// positive; the zero vector is left alone.
fn normalize_content(v: &mut [BigInt]) {
    let mut g = BigInt::zero();
    for x in v.iter() {
        if !x.is_zero() {
            g = g.gcd(x);
        }
    }
    if g.is_zero() {
        return;
    }
    let first_neg = v
        .iter()
        .find(|x| !x.is_zero())
        .map(|x| x.is_negative())
        .unwrap_or(false);
    if first_neg {
        g = -g;
    }
    if !g.is_one() {
        for x in v.iter_mut() {
            *x = std::mem::take(x) / &g;
        }
    }
}

/// Deterministic pivot: first index attaining the minimal absolute value.
fn pick_pivot(v: &[BigInt]) -> Option<usize> {
    let mut best: Option<(usize, BigInt)> = None;
    for (i, x) in v.iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        let a = x.abs();
        if a.is_one() {
            return Some(i);
        }
        match &best {
            Some((_, cur)) if *cur <= a => {}
            _ => best = Some((i, a)),
        }
    }
    best.map(|(i, _)| i)
}

/// Rational rank by column insertion, stopping once the rank is full.
pub(crate) fn rat_rank(m: &IntMatrix) -> usize {
    let mut ech = RatEchelon::new(m.rows());
    let full = m.rows().min(m.cols());
    for c in 0..m.cols() {
        if ech.rank() == full {
            break;
        }
        ech.insert(m.column(c));
    }
    ech.rank()
}

/// Solves `m x = b` over the rationals by dense reduced elimination.
pub(crate) fn solve(m: &IntMatrix, b: &[BigInt]) -> Option<Vec<BigRational>> {
    let rows = m.rows();
    let cols = m.cols();
    let mut aug: Vec<Vec<BigRational>> = (0..rows)
        .map(|r| {
            let mut row: Vec<BigRational> = m
                .row(r)
                .iter()
                .map(|x| BigRational::from(x.clone()))
                .collect();
            row.push(BigRational::from(b[r].clone()));
            row
        })
        .collect();
    let mut pivots: Vec<(usize, usize)> = Vec::new();
    let mut row = 0usize;
    for col in 0..cols {
        if row == rows {
            break;
        }
        let Some(pr) = (row..rows).find(|&r| !aug[r][col].is_zero()) else {
            continue;
        };
        aug.swap(row, pr);
        let inv = aug[row][col].clone();
        for x in aug[row].iter_mut() {
            *x /= inv.clone();
        }
        for r in 0..rows {
            if r == row || aug[r][col].is_zero() {
                continue;
            }
            let f = aug[r][col].clone();
            for c in col..=cols {
                let sub = &f * &aug[row][c];
                aug[r][c] -= sub;
            }
        }
        pivots.push((row, col));
        row += 1;
    }
    // Inconsistent when a zero row has nonzero rhs.
    for r in row..rows {
        if !aug[r][cols].is_zero() {
            return None;
        }
    }
    let mut x = vec![BigRational::zero(); cols];
    for (r, c) in pivots {
        x[c] = aug[r][cols].clone();
    }
    Some(x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::One;

    fn bi(x: i64) -> BigInt {
        BigInt::from(x)
    }

    #[test]
    fn echelon_rank_and_membership() {
        let mut ech = RatEchelon::new(3);
        assert!(ech.insert(vec![bi(2), bi(4), bi(0)]));
        assert!(!ech.insert(vec![bi(1), bi(2), bi(0)]));
        assert!(ech.insert(vec![bi(0), bi(0), bi(5)]));
        assert_eq!(ech.rank(), 2);
        assert!(ech.contains_int(&[bi(3), bi(6), bi(10)]));
        assert!(!ech.contains_int(&[bi(1), bi(0), bi(0)]));
    }

    #[test]
    fn rank_early_exit() {
        let m = IntMatrix::identity(4);
        assert_eq!(rat_rank(&m), 4);
        let z = IntMatrix::zero(3, 5);
        assert_eq!(rat_rank(&z), 0);
    }

    #[test]
    fn rational_solve() {
        let m = IntMatrix::from_i64_rows(&[vec![2, 0], vec![0, 3]]).unwrap();
        let x = solve(&m, &[bi(1), bi(1)]).unwrap();
        assert_eq!(x[0], BigRational::new(bi(1), bi(2)));
        assert_eq!(x[1], BigRational::new(bi(1), bi(3)));
        let m = IntMatrix::from_i64_rows(&[vec![1], vec![1]]).unwrap();
        assert!(solve(&m, &[bi(0), bi(1)]).is_none());
        assert!(solve(&m, &[bi(1), bi(1)]).is_some());
        let one = solve(&m, &[bi(1), bi(1)]).unwrap();
        assert!(one[0].is_one());
    }
}
