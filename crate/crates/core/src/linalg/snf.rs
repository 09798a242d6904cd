//! Smith normal form with optional tracking of the unimodular transforms
//! and their inverses.
//!
//! Pivot strategy: the nonzero entry of minimal absolute value in the
//! remaining submatrix, ties broken by smallest row then column index. This
//! keeps coefficient growth in check and makes the output deterministic.

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use super::{rounded_quotient, IntMatrix};

/// `u * m * v = s` with `u`, `v` unimodular, `s` diagonal, diagonal entries
/// nonnegative and each dividing the next.
#[derive(Debug, Clone)]
pub struct SnfResult {
    pub s: IntMatrix,
    pub u: IntMatrix,
    pub v: IntMatrix,
}

/// Smith normal form with only the requested transforms accumulated.
/// Skipping the huge `v` matrix matters on bar-resolution relation matrices
/// with thousands of columns.
#[derive(Debug, Clone)]
pub struct SnfTracked {
    pub s: IntMatrix,
    pub u: Option<IntMatrix>,
    pub u_inv: Option<IntMatrix>,
    pub v: Option<IntMatrix>,
    pub v_inv: Option<IntMatrix>,
}

impl SnfTracked {
    /// Number of nonzero diagonal entries.
    pub fn rank(&self) -> usize {
        let d = self.s.rows().min(self.s.cols());
        (0..d).take_while(|&i| !self.s.at(i, i).is_zero()).count()
    }

    /// Diagonal entries (including trailing zeros up to `min(rows, cols)`).
    pub fn diagonal(&self) -> Vec<BigInt> {
        let d = self.s.rows().min(self.s.cols());
        (0..d).map(|i| self.s.at(i, i).clone()).collect()
    }
}

pub fn smith_normal_form(m: &IntMatrix) -> SnfResult {
    let t = snf_tracked(m, true, false, true, false);
    SnfResult {
        s: t.s,
        u: t.u.expect("u tracked"),
        v: t.v.expect("v tracked"),
    }
}

pub fn snf_tracked(
    m: &IntMatrix,
    track_u: bool,
    track_u_inv: bool,
    track_v: bool,
    track_v_inv: bool,
) -> SnfTracked {
    let mut eng = Engine::new(m, track_u, track_u_inv, track_v, track_v_inv);
    eng.diagonalize();
    eng.enforce_divisibility();
    eng.make_nonnegative();
    eng.finish()
}

struct Engine {
    rows: usize,
    cols: usize,
    m: Vec<BigInt>,
    u: Option<Vec<BigInt>>,     // rows x rows
    u_inv: Option<Vec<BigInt>>, // rows x rows
    v: Option<Vec<BigInt>>,     // cols x cols
    v_inv: Option<Vec<BigInt>>, // cols x cols
}

impl Engine {
    fn new(
        m: &IntMatrix,
        track_u: bool,
        track_u_inv: bool,
        track_v: bool,
        track_v_inv: bool,
    ) -> Self {
        let rows = m.rows();
        let cols = m.cols();
        let ident = |n: usize| {
            let mut e = vec![BigInt::zero(); n * n];
            for i in 0..n {
                e[i * n + i] = BigInt::one();
            }
            e
        };
        Engine {
            rows,
            cols,
            m: m.entries().to_vec(),
            u: track_u.then(|| ident(rows)),
            u_inv: track_u_inv.then(|| ident(rows)),
            v: track_v.then(|| ident(cols)),
            v_inv: track_v_inv.then(|| ident(cols)),
        }
    }

    #[inline]
    fn at(&self, r: usize, c: usize) -> &BigInt {
        &self.m[r * self.cols + c]
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for c in 0..self.cols {
            self.m.swap(a * self.cols + c, b * self.cols + c);
        }
        let n = self.rows;
        if let Some(u) = &mut self.u {
            for c in 0..n {
                u.swap(a * n + c, b * n + c);
            }
        }
        if let Some(ui) = &mut self.u_inv {
            for r in 0..n {
                ui.swap(r * n + a, r * n + b);
            }
        }
    }

    fn swap_cols(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for r in 0..self.rows {
            self.m.swap(r * self.cols + a, r * self.cols + b);
        }
        let n = self.cols;
        if let Some(v) = &mut self.v {
            for r in 0..n {
                v.swap(r * n + a, r * n + b);
            }
        }
        if let Some(vi) = &mut self.v_inv {
            for c in 0..n {
                vi.swap(a * n + c, b * n + c);
            }
        }
    }

    /// row r -= q * row t
    fn row_sub(&mut self, r: usize, t: usize, q: &BigInt) {
        if q.is_zero() {
            return;
        }
        for c in 0..self.cols {
            let src = self.m[t * self.cols + c].clone();
            if !src.is_zero() {
                self.m[r * self.cols + c] -= q * src;
            }
        }
        let n = self.rows;
        if let Some(u) = &mut self.u {
            for c in 0..n {
                let src = u[t * n + c].clone();
                if !src.is_zero() {
                    u[r * n + c] -= q * src;
                }
            }
        }
        if let Some(ui) = &mut self.u_inv {
            // inverse operation on columns: col t += q * col r
            for row in 0..n {
                let src = ui[row * n + r].clone();
                if !src.is_zero() {
                    ui[row * n + t] += q * src;
                }
            }
        }
    }

    /// col c -= q * col t
    fn col_sub(&mut self, c: usize, t: usize, q: &BigInt) {
        if q.is_zero() {
            return;
        }
        for r in 0..self.rows {
            let src = self.m[r * self.cols + t].clone();
            if !src.is_zero() {
                self.m[r * self.cols + c] -= q * src;
            }
        }
        let n = self.cols;
        if let Some(v) = &mut self.v {
            for r in 0..n {
                let src = v[r * n + t].clone();
                if !src.is_zero() {
                    v[r * n + c] -= q * src;
                }
            }
        }
        if let Some(vi) = &mut self.v_inv {
            // inverse operation on rows: row t += q * row c
            for col in 0..n {
                let src = vi[c * n + col].clone();
                if !src.is_zero() {
                    vi[t * n + col] += q * src;
                }
            }
        }
    }

    fn negate_row(&mut self, r: usize) {
        for c in 0..self.cols {
            let cell = &mut self.m[r * self.cols + c];
            if !cell.is_zero() {
                *cell = -std::mem::take(cell);
            }
        }
        let n = self.rows;
        if let Some(u) = &mut self.u {
            for c in 0..n {
                let cell = &mut u[r * n + c];
                if !cell.is_zero() {
                    *cell = -std::mem::take(cell);
                }
            }
        }
        if let Some(ui) = &mut self.u_inv {
            for row in 0..n {
                let cell = &mut ui[row * n + r];
                if !cell.is_zero() {
                    *cell = -std::mem::take(cell);
                }
            }
        }
    }

    /// Smallest-|entry| nonzero position in the submatrix at `(t.., t..)`.
    fn find_pivot(&self, t: usize) -> Option<(usize, usize)> {
        let mut best: Option<((usize, usize), BigInt)> = None;
        for r in t..self.rows {
            let base = r * self.cols;
            for c in t..self.cols {
                let x = &self.m[base + c];
                if x.is_zero() {
                    continue;
                }
                let a = x.abs();
                if a.is_one() {
                    return Some((r, c));
                }
                match &best {
                    Some((_, cur)) if *cur <= a => {}
                    _ => best = Some(((r, c), a)),
                }
            }
        }
        best.map(|(pos, _)| pos)
    }

    fn diagonalize(&mut self) {
        let mut t = 0usize;
        while t < self.rows && t < self.cols {
            let Some((pr, pc)) = self.find_pivot(t) else {
                break;
            };
            self.swap_rows(t, pr);
            self.swap_cols(t, pc);
            self.isolate(t);
            t += 1;
        }
    }

    /// Clears row `t` and column `t` (except the pivot) by Euclidean steps.
    fn isolate(&mut self, t: usize) {
        loop {
            // Column t below the pivot.
            let mut dirty: Option<usize> = None;
            for r in t + 1..self.rows {
                if self.at(r, t).is_zero() {
                    continue;
                }
                let q = rounded_quotient(self.at(r, t), self.at(t, t));
                self.row_sub(r, t, &q);
                if !self.at(r, t).is_zero() {
                    let a = self.at(r, t).abs();
                    match dirty {
                        Some(best) if self.at(best, t).abs() <= a => {}
                        _ => dirty = Some(r),
                    }
                }
            }
            if let Some(r) = dirty {
                // A remainder strictly smaller than the pivot exists; promote it.
                self.swap_rows(t, r);
                continue;
            }
            // Row t to the right of the pivot; column t stays clear because
            // it is zero below the pivot.
            let mut dirty: Option<usize> = None;
            for c in t + 1..self.cols {
                if self.at(t, c).is_zero() {
                    continue;
                }
                let q = rounded_quotient(self.at(t, c), self.at(t, t));
                self.col_sub(c, t, &q);
                if !self.at(t, c).is_zero() {
                    let a = self.at(t, c).abs();
                    match dirty {
                        Some(best) if self.at(t, best).abs() <= a => {}
                        _ => dirty = Some(c),
                    }
                }
            }
            if let Some(c) = dirty {
                self.swap_cols(t, c);
                continue;
            }
            return;
        }
    }

    /// Restores `d_i | d_{i+1}` along the diagonal. Each fix is local to the
    /// two entries involved, so a sweep-until-clean loop terminates.
    fn enforce_divisibility(&mut self) {
        let d = self.rows.min(self.cols);
        loop {
            let mut clean = true;
            for i in 0..d {
                if self.at(i, i).is_zero() {
                    continue;
                }
                for j in i + 1..d {
                    if self.at(j, j).is_zero() {
                        continue;
                    }
                    let (q, r) = num_integer::Integer::div_rem(self.at(j, j), self.at(i, i));
                    let _ = q;
                    if !r.is_zero() {
                        self.fix_pair(i, j);
                        clean = false;
                    }
                }
            }
            if clean {
                return;
            }
        }
    }

    /// Replaces `diag(a, b)` at positions `i < j` by `diag(gcd, ±lcm)`.
    fn fix_pair(&mut self, i: usize, j: usize) {
        // col i += col j brings b into position (j, i).
        let minus_one = -BigInt::one();
        self.col_sub(i, j, &minus_one);
        // Euclid on rows i, j restricted to column i.
        while !self.at(j, i).is_zero() {
            let q = rounded_quotient(self.at(i, i), self.at(j, i));
            self.row_sub(i, j, &q);
            self.swap_rows(i, j);
        }
        // Clear the fill-in at (i, j); the new pivot divides everything the
        // Euclid loop produced in these two rows.
        if !self.at(i, j).is_zero() {
            let q = self.at(i, j) / self.at(i, i);
            self.col_sub(j, i, &q);
            debug_assert!(self.at(i, j).is_zero());
        }
    }

    fn make_nonnegative(&mut self) {
        let d = self.rows.min(self.cols);
        for i in 0..d {
            if self.at(i, i).is_negative() {
                self.negate_row(i);
            }
        }
    }

    fn finish(self) -> SnfTracked {
        let wrap = |entries: Option<Vec<BigInt>>, n: usize| {
            entries.map(|e| IntMatrix::new(n, n, e).expect("square"))
        };
        SnfTracked {
            s: IntMatrix::new(self.rows, self.cols, self.m).expect("dims"),
            u: wrap(self.u, self.rows),
            u_inv: wrap(self.u_inv, self.rows),
            v: wrap(self.v, self.cols),
            v_inv: wrap(self.v_inv, self.cols),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn check_full(m: &IntMatrix) {
        let t = snf_tracked(m, true, true, true, true);
        let u = t.u.as_ref().unwrap();
        let v = t.v.as_ref().unwrap();
        let ui = t.u_inv.as_ref().unwrap();
        let vi = t.v_inv.as_ref().unwrap();
        assert_eq!(u.mul(m).unwrap().mul(v).unwrap(), t.s, "u*m*v = s");
        assert_eq!(u.mul(ui).unwrap(), IntMatrix::identity(m.rows()));
        assert_eq!(vi.mul(v).unwrap(), IntMatrix::identity(m.cols()));
        // diagonal divisibility chain, nonnegative, zeros trailing
        let d = t.diagonal();
        for w in d.windows(2) {
            if w[0].is_zero() {
                assert!(w[1].is_zero());
            } else {
                assert!((&w[1] % &w[0]).is_zero());
            }
        }
        for x in &d {
            assert!(!x.is_negative());
        }
        for r in 0..t.s.rows() {
            for c in 0..t.s.cols() {
                if r != c {
                    assert!(t.s.at(r, c).is_zero());
                }
            }
        }
    }

    #[test]
    fn transforms_and_inverses_consistent() {
        let cases = [
            vec![vec![2i64, 4], vec![6, 8]],
            vec![vec![0, 0], vec![0, 0]],
            vec![vec![6, 10, 15]],
            vec![vec![2, 0], vec![0, 3], vec![0, 0]],
            vec![vec![4, 6], vec![6, 4]],
            vec![vec![1, 2, 3], vec![4, 5, 6], vec![7, 8, 9]],
            vec![vec![-3, 9, 1], vec![0, -2, 8]],
        ];
        for rows in cases {
            check_full(&IntMatrix::from_i64_rows(&rows).unwrap());
        }
    }

    #[test]
    fn divisibility_needs_fixing() {
        // diag(2, 3) must become diag(1, 6)
        let m = IntMatrix::from_i64_rows(&[vec![2, 0], vec![0, 3]]).unwrap();
        let snf = smith_normal_form(&m);
        assert_eq!(snf.s.at(0, 0), &BigInt::from(1));
        assert_eq!(snf.s.at(1, 1), &BigInt::from(6));
        check_full(&m);
    }
}
