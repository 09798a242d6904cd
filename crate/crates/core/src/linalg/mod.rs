//! Exact linear algebra over the integers, the rationals and prime fields.
//!
//! Everything downstream (homology groups, induced maps, filtrations, the
//! class-membership decision procedures) reduces to four operations here:
//! Smith normal form with unimodular transforms, kernel bases, solvability
//! of `M x = b` over a coefficient ring, and invariants of a subquotient of
//! a lattice. All arithmetic is arbitrary-precision; intermediate entries of
//! bar-resolution matrices do blow up and fixed-width overflow is not an
//! option.

mod modp;
mod ratfree;
mod snf;

pub use modp::ModMatrix;
pub(crate) use ratfree::{rat_rank, RatEchelon};
pub use snf::{SnfResult, SnfTracked};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Coefficient ring tag: the integers, the rationals, or a prime field.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum CoeffRing {
    Integers,
    Rationals,
    ModP(u64),
}

impl CoeffRing {
    /// Builds the `ModP` tag, validating primality by trial division.
    pub fn mod_p(p: u64) -> Result<Self> {
        if p < 2 {
            return Err(Error::InvalidInput(format!("{p} is not prime")));
        }
        let mut d = 2u64;
        while d * d <= p {
            if p % d == 0 {
                return Err(Error::InvalidInput(format!(
                    "{p} is not prime (divisible by {d})"
                )));
            }
            d += 1;
        }
        Ok(CoeffRing::ModP(p))
    }

    pub fn is_field(&self) -> bool {
        !matches!(self, CoeffRing::Integers)
    }

    /// Shell-safe name: `z`, `q` or `z:p`.
    pub fn token(&self) -> String {
        match self {
            CoeffRing::Integers => "z".to_string(),
            CoeffRing::Rationals => "q".to_string(),
            CoeffRing::ModP(p) => format!("z:{p}"),
        }
    }

    /// Parses the `token` syntax back.
    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "z" | "Z" => Ok(CoeffRing::Integers),
            "q" | "Q" => Ok(CoeffRing::Rationals),
            other => {
                if let Some(p) = other.strip_prefix("z:").or_else(|| other.strip_prefix("Z:")) {
                    let p: u64 = p
                        .parse()
                        .map_err(|_| Error::Parse(format!("bad modulus in {other:?}")))?;
                    CoeffRing::mod_p(p)
                } else {
                    Err(Error::Parse(format!(
                        "unknown coefficient ring {other:?}; expected z, q or z:p"
                    )))
                }
            }
        }
    }
}

impl std::fmt::Display for CoeffRing {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.token())
    }
}

/// Dense row-major matrix with arbitrary-precision integer entries.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IntMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<BigInt>,
}

impl IntMatrix {
    pub fn new(rows: usize, cols: usize, entries: Vec<BigInt>) -> Result<Self> {
        if entries.len() != rows * cols {
            return Err(Error::DimensionMismatch(format!(
                "{rows}x{cols} matrix needs {} entries, got {}",
                rows * cols,
                entries.len()
            )));
        }
        Ok(IntMatrix { rows, cols, entries })
    }

    pub fn zero(rows: usize, cols: usize) -> Self {
        IntMatrix {
            rows,
            cols,
            entries: vec![BigInt::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zero(n, n);
        for i in 0..n {
            m.entries[i * n + i] = BigInt::one();
        }
        m
    }

    /// Convenience constructor from machine integers.
    pub fn from_i64_rows(rows: &[Vec<i64>]) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.len());
        if rows.iter().any(|row| row.len() != c) {
            return Err(Error::DimensionMismatch("ragged rows".into()));
        }
        let entries = rows
            .iter()
            .flat_map(|row| row.iter().map(|&x| BigInt::from(x)))
            .collect();
        IntMatrix::new(r, c, entries)
    }

    /// Builds a matrix whose columns are the given vectors.
    pub fn from_columns(dim: usize, cols: &[Vec<BigInt>]) -> Result<Self> {
        for v in cols {
            if v.len() != dim {
                return Err(Error::DimensionMismatch(format!(
                    "column of length {} in ambient dimension {dim}",
                    v.len()
                )));
            }
        }
        let mut m = Self::zero(dim, cols.len());
        for (j, v) in cols.iter().enumerate() {
            for (i, x) in v.iter().enumerate() {
                m.entries[i * cols.len() + j] = x.clone();
            }
        }
        Ok(m)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn at(&self, r: usize, c: usize) -> &BigInt {
        &self.entries[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: BigInt) {
        self.entries[r * self.cols + c] = v;
    }

    pub fn entries(&self) -> &[BigInt] {
        &self.entries
    }

    pub fn row(&self, r: usize) -> &[BigInt] {
        &self.entries[r * self.cols..(r + 1) * self.cols]
    }

    pub fn column(&self, c: usize) -> Vec<BigInt> {
        (0..self.rows).map(|r| self.at(r, c).clone()).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(|x| x.is_zero())
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zero(self.cols, self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                t.entries[c * self.rows + r] = self.at(r, c).clone();
            }
        }
        t
    }

    pub fn mul(&self, other: &IntMatrix) -> Result<IntMatrix> {
        if self.cols != other.rows {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} times {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out = Self::zero(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.at(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let b = other.at(k, j);
                    if b.is_zero() {
                        continue;
                    }
                    let cell = &mut out.entries[i * other.cols + j];
                    *cell += a * b;
                }
            }
        }
        Ok(out)
    }

    pub fn mul_vec(&self, v: &[BigInt]) -> Result<Vec<BigInt>> {
        if v.len() != self.cols {
            return Err(Error::DimensionMismatch(format!(
                "vector of length {} against {} columns",
                v.len(),
                self.cols
            )));
        }
        let mut out = vec![BigInt::zero(); self.rows];
        for (i, o) in out.iter_mut().enumerate() {
            for (c, x) in v.iter().enumerate() {
                if x.is_zero() {
                    continue;
                }
                let a = self.at(i, c);
                if a.is_zero() {
                    continue;
                }
                *o += a * x;
            }
        }
        Ok(out)
    }

    /// Exact determinant by fraction-free (Bareiss) elimination.
    pub fn determinant(&self) -> Result<BigInt> {
        if !self.is_square() {
            return Err(Error::DimensionMismatch(
                "determinant of a non-square matrix".into(),
            ));
        }
        let n = self.rows;
        if n == 0 {
            return Ok(BigInt::one());
        }
        let mut a: Vec<Vec<BigInt>> = (0..n).map(|r| self.row(r).to_vec()).collect();
        let mut sign = BigInt::one();
        let mut prev = BigInt::one();
        for k in 0..n - 1 {
            if a[k][k].is_zero() {
                let Some(swap) = (k + 1..n).find(|&r| !a[r][k].is_zero()) else {
                    return Ok(BigInt::zero());
                };
                a.swap(k, swap);
                sign = -sign;
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    let num = &a[i][j] * &a[k][k] - &a[i][k] * &a[k][j];
                    a[i][j] = num / &prev;
                }
                a[i][k] = BigInt::zero();
            }
            prev = a[k][k].clone();
        }
        Ok(sign * a[n - 1][n - 1].clone())
    }
}

/// Smith normal form of `m`: result satisfies `u * m * v = s` with `u`, `v`
/// unimodular and the diagonal of `s` nonnegative in divisibility order.
pub fn smith_normal_form(m: &IntMatrix) -> SnfResult {
    snf::smith_normal_form(m)
}

/// Basis of the kernel of `m` over the given ring.
///
/// Over the integers this is a basis of the kernel *lattice* (saturated, so
/// it also spans the rational kernel). Over `ModP(p)` entries are reduced
/// representatives in `[0, p)`.
pub fn kernel_basis(m: &IntMatrix, ring: CoeffRing) -> Vec<Vec<BigInt>> {
    match ring {
        CoeffRing::Integers | CoeffRing::Rationals => {
            let snf = snf::snf_tracked(m, false, false, true, false);
            let s = &snf.s;
            let v = snf.v.as_ref().expect("v tracked");
            let d = s.rows.min(s.cols);
            let mut basis = Vec::new();
            for j in 0..s.cols {
                if j >= d || s.at(j, j).is_zero() {
                    basis.push(v.column(j));
                }
            }
            basis
        }
        CoeffRing::ModP(p) => {
            let mm = ModMatrix::reduce(m, p);
            mm.kernel_basis()
                .into_iter()
                .map(|v| v.into_iter().map(BigInt::from).collect())
                .collect()
        }
    }
}

/// Rank of `m` over the given ring (over `Integers` this is the lattice
/// rank, which equals the rational rank).
pub fn rank(m: &IntMatrix, ring: CoeffRing) -> usize {
    match ring {
        CoeffRing::Integers | CoeffRing::Rationals => rat_rank(m),
        CoeffRing::ModP(p) => ModMatrix::reduce(m, p).rank(),
    }
}

/// Attempts to solve `m * x = b` over the ring. Returns `None` when `b` is
/// not in the image. Entries of the solution are rational; over `Integers`
/// they are integral and over `ModP(p)` they are residues in `[0, p)`.
pub fn solve_in_image(
    m: &IntMatrix,
    b: &[BigInt],
    ring: CoeffRing,
) -> Result<Option<Vec<BigRational>>> {
    if b.len() != m.rows() {
        return Err(Error::DimensionMismatch(format!(
            "right-hand side of length {} against {} rows",
            b.len(),
            m.rows()
        )));
    }
    match ring {
        CoeffRing::Integers => {
            Ok(solve_diophantine(m, b).map(|xs| xs.into_iter().map(BigRational::from).collect()))
        }
        CoeffRing::Rationals => Ok(solve_rational(m, b)),
        CoeffRing::ModP(p) => {
            let mm = ModMatrix::reduce(m, p);
            let bb: Vec<u64> = b.iter().map(|x| modp::reduce_bigint(x, p)).collect();
            Ok(mm.solve(&bb).map(|xs| {
                xs.into_iter()
                    .map(|x| BigRational::from(BigInt::from(x)))
                    .collect()
            }))
        }
    }
}

/// Integer solution of `m * x = b`, if one exists.
pub fn solve_diophantine(m: &IntMatrix, b: &[BigInt]) -> Option<Vec<BigInt>> {
    let snf = snf::snf_tracked(m, true, false, true, false);
    solve_diophantine_prepared(&snf, b)
}

/// Same as [`solve_diophantine`] against a precomputed factorization.
pub fn solve_diophantine_prepared(snf: &SnfTracked, b: &[BigInt]) -> Option<Vec<BigInt>> {
    let u = snf.u.as_ref().expect("u tracked");
    let v = snf.v.as_ref().expect("v tracked");
    let s = &snf.s;
    let ub = u.mul_vec(b).expect("dimensions checked");
    let d = s.rows().min(s.cols());
    let mut y = vec![BigInt::zero(); s.cols()];
    for (i, ubi) in ub.iter().enumerate() {
        let di = if i < d { s.at(i, i) } else { &BigInt::ZERO };
        if di.is_zero() {
            if !ubi.is_zero() {
                return None;
            }
        } else {
            let (q, r) = ubi.div_rem(di);
            if !r.is_zero() {
                return None;
            }
            y[i] = q;
        }
    }
    Some(v.mul_vec(&y).expect("dimensions checked"))
}

/// Rational solution of `m * x = b`, if one exists.
fn solve_rational(m: &IntMatrix, b: &[BigInt]) -> Option<Vec<BigRational>> {
    ratfree::solve(m, b)
}

/// Isomorphism type of `(span Z) / (span B)` inside `Z^ambient_dim` (or the
/// corresponding vector spaces over a field).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SubquotientInvariants {
    pub rank: usize,
    /// Torsion coefficients `> 1` in divisibility order; empty over fields.
    pub torsion: Vec<BigInt>,
}

/// Invariants of the subquotient `(span Z)/(span B)`.
///
/// Every generator in `b` must lie in the span of `z` over the ring; a
/// violation is a logic error upstream and is reported as such.
pub fn subquotient_invariants(
    z: &[Vec<BigInt>],
    b: &[Vec<BigInt>],
    ambient_dim: usize,
    ring: CoeffRing,
) -> Result<SubquotientInvariants> {
    let mz = IntMatrix::from_columns(ambient_dim, z)?;
    let mb = IntMatrix::from_columns(ambient_dim, b)?;
    for (j, gen) in b.iter().enumerate() {
        if solve_in_image(&mz, gen, ring)?.is_none() {
            return Err(Error::Internal(format!(
                "subquotient generator {j} is not in the span of Z over {ring}"
            )));
        }
    }
    if ring.is_field() {
        let rz = rank(&mz, ring);
        let rb = rank(&mb, ring);
        return Ok(SubquotientInvariants {
            rank: rz - rb,
            torsion: Vec::new(),
        });
    }

    // Integer case: pick a lattice basis of span Z from the SNF of Z, write
    // each B generator in that basis, and read the quotient off a second SNF.
    let snf_z = snf::snf_tracked(&mz, true, false, false, false);
    let u = snf_z.u.as_ref().expect("u tracked");
    let s = &snf_z.s;
    let d = s.rows().min(s.cols());
    let pivots: Vec<usize> = (0..d).filter(|&i| !s.at(i, i).is_zero()).collect();
    let rz = pivots.len();
    let mut coords = IntMatrix::zero(rz, b.len());
    for (jb, gen) in b.iter().enumerate() {
        let ug = u.mul_vec(gen)?;
        for (row, &i) in pivots.iter().enumerate() {
            let (q, r) = ug[i].div_rem(s.at(i, i));
            if !r.is_zero() {
                return Err(Error::Internal(
                    "B generator not integral over the chosen Z basis".into(),
                ));
            }
            coords.set(row, jb, q);
        }
        for i in 0..ambient_dim {
            if (i >= d || s.at(i, i).is_zero()) && !ug[i].is_zero() {
                return Err(Error::Internal(
                    "B generator leaves the lattice spanned by Z".into(),
                ));
            }
        }
    }
    let snf_q = snf::snf_tracked(&coords, false, false, false, false);
    let dq = snf_q.s.rows().min(snf_q.s.cols());
    let mut nonzero = 0usize;
    let mut torsion = Vec::new();
    for i in 0..dq {
        let di = snf_q.s.at(i, i);
        if di.is_zero() {
            break;
        }
        nonzero += 1;
        if di.abs() > BigInt::one() {
            torsion.push(di.abs());
        }
    }
    Ok(SubquotientInvariants {
        rank: rz - nonzero,
        torsion,
    })
}

/// Quotient `q` and remainder minimizing `|a - q b|` (ties toward zero).
pub(crate) fn rounded_quotient(a: &BigInt, b: &BigInt) -> BigInt {
    let (mut q, r) = a.div_rem(b);
    if r.is_zero() {
        return q;
    }
    let two_r = r.abs() * 2;
    if two_r > b.abs() {
        if (r.is_negative()) == (b.is_negative()) {
            q += 1;
        } else {
            q -= 1;
        }
    }
    q
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bi(x: i64) -> BigInt {
        BigInt::from(x)
    }

    #[test]
    fn snf_small_example() {
        // gcd of entries is 2 and |det| = 8, so the diagonal must be 2, 4.
        let m = IntMatrix::from_i64_rows(&[vec![2, 4], vec![6, 8]]).unwrap();
        let snf = smith_normal_form(&m);
        assert_eq!(snf.s.at(0, 0), &bi(2));
        assert_eq!(snf.s.at(1, 1), &bi(4));
        let ums = snf.u.mul(&m).unwrap().mul(&snf.v).unwrap();
        assert_eq!(ums, snf.s);
        assert_eq!(snf.u.determinant().unwrap().abs(), bi(1));
        assert_eq!(snf.v.determinant().unwrap().abs(), bi(1));
    }

    #[test]
    fn snf_identity_and_zero_fixed_points() {
        let id = IntMatrix::identity(3);
        let snf = smith_normal_form(&id);
        assert_eq!(snf.s, id);

        let z = IntMatrix::zero(2, 3);
        let snf = smith_normal_form(&z);
        assert_eq!(snf.s, z);
        assert_eq!(snf.u, IntMatrix::identity(2));
        assert_eq!(snf.v, IntMatrix::identity(3));
    }

    #[test]
    fn snf_zero_size() {
        for (r, c) in [(0, 0), (0, 3), (3, 0)] {
            let m = IntMatrix::zero(r, c);
            let snf = smith_normal_form(&m);
            assert_eq!(snf.s.rows(), r);
            assert_eq!(snf.s.cols(), c);
            assert_eq!(snf.u, IntMatrix::identity(r));
            assert_eq!(snf.v, IntMatrix::identity(c));
        }
    }

    #[test]
    fn kernel_per_ring() {
        // x + y = 0 over Z_2 has the diagonal as kernel.
        let m = IntMatrix::from_i64_rows(&[vec![1, 1]]).unwrap();
        let k = kernel_basis(&m, CoeffRing::mod_p(2).unwrap());
        assert_eq!(k, vec![vec![bi(1), bi(1)]]);

        let id2 = IntMatrix::identity(2);
        assert!(kernel_basis(&id2, CoeffRing::Rationals).is_empty());

        // Multiplication by two: injective over Z, kernel Z_2 over Z_2.
        let two = IntMatrix::from_i64_rows(&[vec![2]]).unwrap();
        assert!(kernel_basis(&two, CoeffRing::Integers).is_empty());
        assert_eq!(
            kernel_basis(&two, CoeffRing::mod_p(2).unwrap()),
            vec![vec![bi(1)]]
        );
    }

    #[test]
    fn solve_per_ring() {
        let two = IntMatrix::from_i64_rows(&[vec![2]]).unwrap();
        let got = solve_in_image(&two, &[bi(4)], CoeffRing::Integers)
            .unwrap()
            .unwrap();
        assert_eq!(got, vec![BigRational::from(bi(2))]);
        assert!(solve_in_image(&two, &[bi(3)], CoeffRing::Integers)
            .unwrap()
            .is_none());
        let got = solve_in_image(&two, &[bi(3)], CoeffRing::Rationals)
            .unwrap()
            .unwrap();
        assert_eq!(got, vec![BigRational::new(bi(3), bi(2))]);
        assert!(matches!(
            solve_in_image(&two, &[bi(1), bi(2)], CoeffRing::Integers),
            Err(Error::DimensionMismatch(_))
        ));
    }

    #[test]
    fn subquotient_examples() {
        let e1 = vec![bi(1), bi(0)];
        let e2 = vec![bi(0), bi(1)];
        let twice_e1 = vec![bi(2), bi(0)];
        let inv = subquotient_invariants(
            &[e1.clone(), e2.clone()],
            &[twice_e1],
            2,
            CoeffRing::Integers,
        )
        .unwrap();
        assert_eq!(inv.rank, 1);
        assert_eq!(inv.torsion, vec![bi(2)]);

        let inv = subquotient_invariants(
            &[e1.clone(), e2.clone()],
            &[e1.clone(), e2.clone()],
            2,
            CoeffRing::Integers,
        )
        .unwrap();
        assert_eq!(inv.rank, 0);
        assert!(inv.torsion.is_empty());

        let inv =
            subquotient_invariants(&[e1.clone()], &[], 2, CoeffRing::mod_p(3).unwrap()).unwrap();
        assert_eq!(inv.rank, 1);
        assert!(inv.torsion.is_empty());
    }

    #[test]
    fn subquotient_rejects_escapees() {
        let e1 = vec![bi(1), bi(0)];
        let e2 = vec![bi(0), bi(1)];
        assert!(subquotient_invariants(&[e1], &[e2], 2, CoeffRing::Integers).is_err());
    }

    #[test]
    fn modp_requires_prime() {
        assert!(CoeffRing::mod_p(1).is_err());
        assert!(CoeffRing::mod_p(4).is_err());
        assert!(CoeffRing::mod_p(97).is_ok());
    }

    #[test]
    fn ring_tokens_round_trip() {
        for ring in [
            CoeffRing::Integers,
            CoeffRing::Rationals,
            CoeffRing::ModP(5),
        ] {
            assert_eq!(CoeffRing::parse(&ring.token()).unwrap(), ring);
        }
    }

    #[test]
    fn determinant_bareiss() {
        let m = IntMatrix::from_i64_rows(&[vec![2, 0, 1], vec![1, 1, 0], vec![0, 3, 1]]).unwrap();
        // det = 2*(1*1-0*3) - 0 + 1*(1*3-1*0) = 2 + 3
        assert_eq!(m.determinant().unwrap(), bi(5));
    }
}
