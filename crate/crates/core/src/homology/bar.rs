//! Bar-resolution chain complex slices with trivial coefficients.
//!
//! The normalized complex has basis the k-tuples of non-identity elements;
//! any face containing the identity is dropped. The unnormalized complex
//! (all tuples allowed) is kept as an independent cross-check at small
//! orders. With trivial coefficients `d_1 = 0`, so
//! `H_1 = C_1 / im d_2` and `H_2 = ker d_2 / im d_3`.

use num_bigint::BigInt;

use crate::group::{Elem, GroupRef};
use crate::linalg::IntMatrix;
use crate::{Error, Result};

/// One degree of the bar complex: the ordered tuple basis and the boundary
/// matrix down to degree `k - 1`.
#[derive(Debug, Clone)]
pub struct BarComplexSlice {
    pub group: GroupRef,
    pub degree: u8,
    pub normalized: bool,
    /// Basis tuples in lexicographic order.
    pub basis: Vec<Vec<Elem>>,
    /// Boundary from degree `k` to degree `k - 1`, rows indexed by the
    /// lower basis (degree 0 has a single basis element).
    pub boundary: IntMatrix,
}

/// Sparse column view used internally: (row, coefficient) pairs.
pub(crate) type SparseCol = Vec<(usize, i64)>;

pub(crate) struct BoundaryData {
    pub rows: usize,
    pub cols: usize,
    pub columns: Vec<SparseCol>,
}

impl BoundaryData {
    pub fn densify(&self) -> IntMatrix {
        let mut m = IntMatrix::zero(self.rows, self.cols);
        for (j, col) in self.columns.iter().enumerate() {
            for &(i, c) in col {
                m.set(i, j, BigInt::from(c));
            }
        }
        m
    }
}

/// Number of basis tuples in one degree.
fn dim(order: usize, degree: u8, normalized: bool) -> usize {
    let base = if normalized { order - 1 } else { order };
    match degree {
        0 => 1,
        k => base.pow(k as u32),
    }
}

/// Maps a tuple to its basis index, or `None` when the tuple is degenerate
/// (contains the identity) in the normalized complex.
fn tuple_index(order: usize, normalized: bool, tuple: &[Elem]) -> Option<usize> {
    let mut idx = 0usize;
    if normalized {
        for &x in tuple {
            if x == 0 {
                return None;
            }
            idx = idx * (order - 1) + (x as usize - 1);
        }
    } else {
        for &x in tuple {
            idx = idx * order + x as usize;
        }
    }
    Some(idx)
}

fn basis_tuples(order: usize, degree: u8, normalized: bool) -> Vec<Vec<Elem>> {
    let elems: Vec<Elem> = if normalized {
        (1..order as Elem).collect()
    } else {
        (0..order as Elem).collect()
    };
    let mut out: Vec<Vec<Elem>> = vec![Vec::new()];
    for _ in 0..degree {
        let mut next = Vec::with_capacity(out.len() * elems.len());
        for prefix in &out {
            for &x in &elems {
                let mut t = prefix.clone();
                t.push(x);
                next.push(t);
            }
        }
        out = next;
    }
    out
}

/// Boundary of the degree-`k` slice as sparse columns.
///
/// `d[g1|...|gk] = [g2|...|gk] + sum_i (-1)^i [g1|...|g_i g_{i+1}|...|gk]
///  + (-1)^k [g1|...|g_{k-1}]`; with trivial coefficients the first face
/// keeps its tuple. In the normalized complex faces containing the
/// identity vanish.
pub(crate) fn boundary_data(g: &GroupRef, degree: u8, normalized: bool) -> BoundaryData {
    let order = g.order();
    let rows = dim(order, degree - 1, normalized);
    let tuples = basis_tuples(order, degree, normalized);
    let mut columns: Vec<SparseCol> = Vec::with_capacity(tuples.len());
    for t in &tuples {
        let mut col: SparseCol = Vec::new();
        let mut add = |tuple: &[Elem], sign: i64| {
            if let Some(idx) = tuple_index(order, normalized, tuple) {
                col.push((idx, sign));
            }
        };
        let k = degree as usize;
        // front face
        add(&t[1..], 1);
        // inner faces
        let mut sign = -1i64;
        for i in 0..k - 1 {
            let mut face: Vec<Elem> = Vec::with_capacity(k - 1);
            face.extend_from_slice(&t[..i]);
            face.push(g.mul(t[i], t[i + 1]));
            face.extend_from_slice(&t[i + 2..]);
            add(&face, sign);
            sign = -sign;
        }
        // back face
        add(&t[..k - 1], sign);
        // merge duplicate rows
        col.sort_by_key(|&(i, _)| i);
        let mut merged: SparseCol = Vec::with_capacity(col.len());
        for (i, c) in col {
            match merged.last_mut() {
                Some((li, lc)) if *li == i => *lc += c,
                _ => merged.push((i, c)),
            }
        }
        merged.retain(|&(_, c)| c != 0);
        columns.push(merged);
    }
    BoundaryData {
        rows,
        cols: tuples.len(),
        columns,
    }
}

/// Builds one slice of the (normalized or unnormalized) bar complex and
/// verifies `d ∘ d = 0` against the slice below.
pub fn bar_slice(g: &GroupRef, degree: u8, normalized: bool) -> Result<BarComplexSlice> {
    if !(1..=3).contains(&degree) {
        return Err(Error::InvalidInput(format!(
            "bar slices are materialized in degrees 1..=3, not {degree}"
        )));
    }
    let data = boundary_data(g, degree, normalized);
    if degree >= 2 {
        let below = boundary_data(g, degree - 1, normalized);
        check_dd_zero(&below, &data)?;
    }
    Ok(BarComplexSlice {
        group: g.clone(),
        degree,
        normalized,
        basis: basis_tuples(g.order(), degree, normalized),
        boundary: data.densify(),
    })
}

/// `d_{k-1} ∘ d_k = 0`, computed sparsely and exactly.
pub(crate) fn check_dd_zero(lower: &BoundaryData, upper: &BoundaryData) -> Result<()> {
    if lower.cols != upper.rows {
        return Err(Error::Internal("bar slice dimensions disagree".into()));
    }
    for (j, col) in upper.columns.iter().enumerate() {
        let mut acc: std::collections::BTreeMap<usize, i64> = std::collections::BTreeMap::new();
        for &(mid, c) in col {
            for &(i, c2) in &lower.columns[mid] {
                *acc.entry(i).or_insert(0) += c * c2;
            }
        }
        if acc.values().any(|&v| v != 0) {
            return Err(Error::Internal(format!(
                "d∘d is nonzero on basis column {j}"
            )));
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::Builtin;

    #[test]
    fn dimensions_and_dd_zero() {
        for expr in ["cyclic(4)", "symmetric(3)", "quaternion8"] {
            let g = Builtin::parse(expr).unwrap().build().unwrap();
            let n = g.order();
            for normalized in [true, false] {
                let s2 = bar_slice(&g, 2, normalized).unwrap();
                let s3 = bar_slice(&g, 3, normalized).unwrap();
                let base = if normalized { n - 1 } else { n };
                assert_eq!(s2.boundary.rows(), base);
                assert_eq!(s2.boundary.cols(), base * base);
                assert_eq!(s3.boundary.rows(), base * base);
                assert_eq!(s3.boundary.cols(), base * base * base);
                // d2 * d3 = 0 as dense matrices too
                let prod = s2.boundary.mul(&s3.boundary).unwrap();
                assert!(prod.is_zero());
            }
        }
    }

    #[test]
    fn degree_one_boundary_vanishes() {
        let g = Builtin::parse("cyclic(3)").unwrap().build().unwrap();
        let s1 = bar_slice(&g, 1, true).unwrap();
        // trivial coefficients: both faces of [g] cancel
        assert!(s1.boundary.is_zero());
        assert_eq!(s1.boundary.rows(), 1);
    }

    #[test]
    fn trivial_group_empty_basis() {
        let g = Builtin::parse("cyclic(1)").unwrap().build().unwrap();
        let s2 = bar_slice(&g, 2, true).unwrap();
        assert_eq!(s2.basis.len(), 0);
        assert_eq!(s2.boundary.cols(), 0);
    }

    #[test]
    fn normalized_drops_identity_faces() {
        // in Z_2 = {e, a}: d[a|a] = [a] - [a^2 = e dropped] + [a] = 2[a]
        let g = Builtin::parse("cyclic(2)").unwrap().build().unwrap();
        let s2 = bar_slice(&g, 2, true).unwrap();
        assert_eq!(s2.boundary.rows(), 1);
        assert_eq!(s2.boundary.cols(), 1);
        assert_eq!(s2.boundary.at(0, 0), &num_bigint::BigInt::from(2));
    }
}
