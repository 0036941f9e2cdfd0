//! Square rational matrices and row vectors.
//!
//! Vectors are row vectors and act on matrices from the left: a register
//! update is `v' = v · A`.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::{AlgebraError, BigRational};

/// A `k × k` matrix of exact rationals, stored row-major.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct RMatrix {
    dim: usize,
    entries: Vec<BigRational>,
}

/// A `k`-dimensional row vector of exact rationals.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct RVector {
    entries: Vec<BigRational>,
}

impl RMatrix {
    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zero(dim);
        for i in 0..dim {
            m.entries[i * dim + i] = BigRational::one();
        }
        m
    }

    pub fn zero(dim: usize) -> Self {
        RMatrix { dim, entries: vec![BigRational::zero(); dim * dim] }
    }

    pub fn diagonal(diag: &[BigRational]) -> Self {
        let dim = diag.len();
        let mut m = Self::zero(dim);
        for (i, d) in diag.iter().enumerate() {
            m.entries[i * dim + i] = d.clone();
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<BigRational>>) -> Result<Self, AlgebraError> {
        let dim = rows.len();
        if dim == 0 {
            return Err(AlgebraError::EmptyMatrix);
        }
        let mut entries = Vec::with_capacity(dim * dim);
        for row in rows {
            if row.len() != dim {
                return Err(AlgebraError::NotSquare { rows: dim, cols: row.len() });
            }
            entries.extend(row);
        }
        Ok(RMatrix { dim, entries })
    }

    /// Convenience constructor from integer rows. Panics if not square.
    pub fn from_ints(rows: &[&[i64]]) -> Self {
        Self::from_rows(rows.iter().map(|r| r.iter().map(|&x| BigRational::from(x)).collect()).collect())
            .expect("square integer matrix")
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, i: usize, j: usize) -> &BigRational {
        &self.entries[i * self.dim + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: BigRational) {
        self.entries[i * self.dim + j] = v;
    }

    pub fn rows(&self) -> Vec<Vec<BigRational>> {
        self.entries.chunks(self.dim).map(|r| r.to_vec()).collect()
    }

    pub fn entries(&self) -> &[BigRational] {
        &self.entries
    }

    pub fn is_identity(&self) -> bool {
        self.entries.iter().enumerate().all(|(idx, e)| {
            if idx / self.dim == idx % self.dim {
                e.is_one()
            } else {
                e.is_zero()
            }
        })
    }

    pub fn is_integer(&self) -> bool {
        self.entries.iter().all(BigRational::is_integer)
    }

    pub fn mul(&self, other: &RMatrix) -> Result<RMatrix, AlgebraError> {
        if self.dim != other.dim {
            return Err(AlgebraError::DimensionMismatch { left: self.dim, right: other.dim });
        }
        Ok(self.mul_unchecked(other))
    }

    fn mul_unchecked(&self, other: &RMatrix) -> RMatrix {
        let k = self.dim;
        if other.is_identity() {
            return self.clone();
        }
        let mut out = vec![BigRational::zero(); k * k];
        for i in 0..k {
            for l in 0..k {
                let a = &self.entries[i * k + l];
                if a.is_zero() {
                    continue;
                }
                for j in 0..k {
                    let b = &other.entries[l * k + j];
                    if b.is_zero() {
                        continue;
                    }
                    let slot = &mut out[i * k + j];
                    *slot = &*slot + &(a * b);
                }
            }
        }
        RMatrix { dim: k, entries: out }
    }

    /// Exact determinant by rational Gaussian elimination.
    pub fn det(&self) -> BigRational {
        let k = self.dim;
        let mut a = self.entries.clone();
        let mut det = BigRational::one();
        for col in 0..k {
            let Some(p) = (col..k).find(|&r| !a[r * k + col].is_zero()) else {
                return BigRational::zero();
            };
            if p != col {
                for j in 0..k {
                    a.swap(p * k + j, col * k + j);
                }
                det = -det;
            }
            let pivot = a[col * k + col].clone();
            det = &det * &pivot;
            let inv = pivot.recip().expect("nonzero pivot");
            for r in col + 1..k {
                if a[r * k + col].is_zero() {
                    continue;
                }
                let f = &a[r * k + col] * &inv;
                for j in col..k {
                    let t = &f * &a[col * k + j];
                    a[r * k + j] = &a[r * k + j] - &t;
                }
            }
        }
        det
    }

    /// Exact inverse by Gauss-Jordan elimination.
    pub fn inverse(&self) -> Result<RMatrix, AlgebraError> {
        let k = self.dim;
        let mut a = self.entries.clone();
        let mut inv = RMatrix::identity(k).entries;
        for col in 0..k {
            let Some(p) = (col..k).find(|&r| !a[r * k + col].is_zero()) else {
                return Err(AlgebraError::Singular { det: BigRational::zero() });
            };
            if p != col {
                for j in 0..k {
                    a.swap(p * k + j, col * k + j);
                    inv.swap(p * k + j, col * k + j);
                }
            }
            let pinv = a[col * k + col].recip().expect("nonzero pivot");
            for j in 0..k {
                a[col * k + j] = &a[col * k + j] * &pinv;
                inv[col * k + j] = &inv[col * k + j] * &pinv;
            }
            for r in 0..k {
                if r == col || a[r * k + col].is_zero() {
                    continue;
                }
                let f = a[r * k + col].clone();
                for j in 0..k {
                    let t = &f * &a[col * k + j];
                    a[r * k + j] = &a[r * k + j] - &t;
                    let t = &f * &inv[col * k + j];
                    inv[r * k + j] = &inv[r * k + j] - &t;
                }
            }
        }
        Ok(RMatrix { dim: k, entries: inv })
    }

    /// Integer power; negative exponents use the inverse.
    pub fn pow(&self, e: i64) -> Result<RMatrix, AlgebraError> {
        let base = if e < 0 { self.inverse()? } else { self.clone() };
        let mut out = RMatrix::identity(self.dim);
        let mut sq = base;
        let mut k = e.unsigned_abs();
        while k > 0 {
            if k & 1 == 1 {
                out = out.mul_unchecked(&sq);
            }
            k >>= 1;
            if k > 0 {
                sq = sq.mul_unchecked(&sq);
            }
        }
        Ok(out)
    }

    /// Block-diagonal sum `diag(self, other)`.
    pub fn direct_sum(&self, other: &RMatrix) -> RMatrix {
        let k = self.dim + other.dim;
        let mut m = RMatrix::zero(k);
        for i in 0..self.dim {
            for j in 0..self.dim {
                m.set(i, j, self.get(i, j).clone());
            }
        }
        for i in 0..other.dim {
            for j in 0..other.dim {
                m.set(self.dim + i, self.dim + j, other.get(i, j).clone());
            }
        }
        m
    }
}

impl RVector {
    pub fn new(entries: Vec<BigRational>) -> Result<Self, AlgebraError> {
        if entries.is_empty() {
            return Err(AlgebraError::EmptyMatrix);
        }
        Ok(RVector { entries })
    }

    pub fn from_ints(xs: &[i64]) -> Self {
        RVector { entries: xs.iter().map(|&x| BigRational::from(x)).collect() }
    }

    pub fn ones(dim: usize) -> Self {
        RVector { entries: vec![BigRational::one(); dim] }
    }

    /// The standard basis vector with a one at `i`.
    pub fn unit(dim: usize, i: usize) -> Self {
        let mut entries = vec![BigRational::zero(); dim];
        entries[i] = BigRational::one();
        RVector { entries }
    }

    pub fn dim(&self) -> usize {
        self.entries.len()
    }

    pub fn get(&self, i: usize) -> &BigRational {
        &self.entries[i]
    }

    pub fn entries(&self) -> &[BigRational] {
        &self.entries
    }

    pub fn into_entries(self) -> Vec<BigRational> {
        self.entries
    }

    /// Row vector times matrix.
    pub fn mul_mat(&self, m: &RMatrix) -> Result<RVector, AlgebraError> {
        let k = self.dim();
        if k != m.dim() {
            return Err(AlgebraError::DimensionMismatch { left: k, right: m.dim() });
        }
        if m.is_identity() {
            return Ok(self.clone());
        }
        let mut out = vec![BigRational::zero(); k];
        for (l, a) in self.entries.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, slot) in out.iter_mut().enumerate() {
                let b = m.get(l, j);
                if b.is_zero() {
                    continue;
                }
                let t = if b.is_one() { a.clone() } else { a * b };
                *slot = &*slot + &t;
            }
        }
        Ok(RVector { entries: out })
    }

    pub fn concat(&self, other: &RVector) -> RVector {
        let mut entries = self.entries.clone();
        entries.extend(other.entries.iter().cloned());
        RVector { entries }
    }

    pub fn is_integer(&self) -> bool {
        self.entries.iter().all(BigRational::is_integer)
    }
}

pub fn mat_mul(a: &RMatrix, b: &RMatrix) -> Result<RMatrix, AlgebraError> {
    a.mul(b)
}

pub fn vec_mat_mul(v: &RVector, m: &RMatrix) -> Result<RVector, AlgebraError> {
    v.mul_mat(m)
}

/// Inverse, or a `Singular` error carrying the determinant.
pub fn mat_inverse(m: &RMatrix) -> Result<RMatrix, AlgebraError> {
    let det = m.det();
    if det.is_zero() {
        return Err(AlgebraError::Singular { det });
    }
    m.inverse()
}

pub fn mat_det(m: &RMatrix) -> BigRational {
    m.det()
}

impl fmt::Debug for RMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (i, row) in self.entries.chunks(self.dim).enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "[")?;
            for (j, e) in row.iter().enumerate() {
                if j > 0 {
                    write!(f, ", ")?;
                }
                write!(f, "{e}")?;
            }
            write!(f, "]")?;
        }
        write!(f, "]")
    }
}

impl fmt::Display for RMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

impl fmt::Debug for RVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, e) in self.entries.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{e}")?;
        }
        write!(f, ")")
    }
}

impl fmt::Display for RVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

// Matrices serialize as nested arrays of rational strings; vectors as a flat array.
impl Serialize for RMatrix {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        self.rows().serialize(s)
    }
}

impl<'de> Deserialize<'de> for RMatrix {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let rows = Vec::<Vec<BigRational>>::deserialize(d)?;
        RMatrix::from_rows(rows).map_err(serde::de::Error::custom)
    }
}

impl Serialize for RVector {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        self.entries.serialize(s)
    }
}

impl<'de> Deserialize<'de> for RVector {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let entries = Vec::<BigRational>::deserialize(d)?;
        RVector::new(entries).map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n, d).unwrap()
    }

    #[test]
    fn free_generators_product() {
        let ma = RMatrix::from_ints(&[&[1, 2], &[0, 1]]);
        let mb = RMatrix::from_ints(&[&[1, 0], &[2, 1]]);
        assert_eq!(mat_mul(&ma, &mb).unwrap(), RMatrix::from_ints(&[&[5, 2], &[2, 1]]));
        assert_eq!(mat_mul(&RMatrix::identity(2), &ma).unwrap(), ma);
        assert!(mat_mul(&ma, &mat_inverse(&ma).unwrap()).unwrap().is_identity());
    }

    #[test]
    fn stern_brocot_steps() {
        let m0 = RMatrix::from_ints(&[&[1, 1], &[0, 1]]);
        let m1 = RMatrix::from_ints(&[&[1, 0], &[1, 1]]);
        let v = RVector::from_ints(&[1, 1]);
        assert_eq!(vec_mat_mul(&v, &m0).unwrap(), RVector::from_ints(&[1, 2]));
        let v11 = v.mul_mat(&m1).unwrap().mul_mat(&m1).unwrap();
        assert_eq!(v11, RVector::from_ints(&[3, 1]));
        assert_eq!(mat_inverse(&m0).unwrap(), RMatrix::from_ints(&[&[1, -1], &[0, 1]]));
    }

    #[test]
    fn inverse_of_diagonal() {
        let d = RMatrix::diagonal(&[q(2, 1), q(1, 2)]);
        assert_eq!(mat_inverse(&d).unwrap(), RMatrix::diagonal(&[q(1, 2), q(2, 1)]));
        assert!(mat_inverse(&RMatrix::identity(3)).unwrap().is_identity());
    }

    #[test]
    fn determinants() {
        assert_eq!(mat_det(&RMatrix::from_ints(&[&[1, 2], &[0, 1]])), q(1, 1));
        assert_eq!(mat_det(&RMatrix::diagonal(&[q(1, 2), q(1, 1)])), q(1, 2));
        assert_eq!(mat_det(&RMatrix::from_ints(&[&[1, 1], &[1, 1]])), q(0, 1));
        let perm = RMatrix::from_ints(&[&[0, 1], &[1, 0]]);
        assert_eq!(mat_det(&perm), q(-1, 1));
    }

    #[test]
    fn singular_reports_det() {
        let s = RMatrix::from_ints(&[&[1, 1], &[1, 1]]);
        assert!(matches!(mat_inverse(&s), Err(AlgebraError::Singular { det }) if det.is_zero()));
    }

    #[test]
    fn dimension_errors() {
        let a = RMatrix::identity(2);
        let b = RMatrix::identity(3);
        assert!(mat_mul(&a, &b).is_err());
        assert!(vec_mat_mul(&RVector::ones(3), &a).is_err());
        assert!(RMatrix::from_rows(vec![vec![q(1, 1)], vec![q(1, 1), q(1, 1)]]).is_err());
    }

    #[test]
    fn serde_shape() {
        let m = RMatrix::from_rows(vec![vec![q(1, 2), q(0, 1)], vec![q(-3, 1), q(1, 1)]]).unwrap();
        let js = serde_json::to_string(&m).unwrap();
        assert_eq!(js, r#"[["1/2","0"],["-3","1"]]"#);
        assert_eq!(serde_json::from_str::<RMatrix>(&js).unwrap(), m);
    }

    #[test]
    fn powers() {
        let b = RMatrix::diagonal(&[q(1, 2), q(1, 1)]);
        assert_eq!(b.pow(-3).unwrap(), RMatrix::diagonal(&[q(8, 1), q(1, 1)]));
        assert!(b.pow(0).unwrap().is_identity());
    }
}
