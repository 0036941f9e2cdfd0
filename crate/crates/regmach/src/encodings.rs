//! Exact string-to-vector codecs.
//!
//! Binary Stern-Brocot: `(1,1)` times `M0 = [[1,1],[0,1]]` per `0` and
//! `M1 = [[1,0],[1,1]]` per `1`. Generalized Stern-Brocot over `k` symbols:
//! all-ones times `E_j` per symbol `j`, where `E_j` is the identity with
//! column `j` replaced by ones, so the `j`th entry becomes the sum of all
//! entries. Base `m`: `(1,0)` times `A_i = [[1,i],[0,m]]` (value in the second
//! entry) or `B_i = [[m,i],[0,1]]` (reversed value in the second entry, `m^|w|`
//! in the first).

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use regmach_algebra::{BigRational, RMatrix, RVector};

use crate::Error;

pub fn sb_matrix(bit: u8) -> RMatrix {
    match bit {
        0 => RMatrix::from_ints(&[&[1, 1], &[0, 1]]),
        _ => RMatrix::from_ints(&[&[1, 0], &[1, 1]]),
    }
}

/// `E^k_j` (0-based `j`): identity with column `j` set to ones.
pub fn gsb_matrix(k: usize, j: usize) -> RMatrix {
    let mut m = RMatrix::identity(k);
    for i in 0..k {
        m.set(i, j, BigRational::one());
    }
    m
}

/// `A^m_i = [[1, i], [0, m]]`.
pub fn base_matrix(m: u32, digit: u32) -> RMatrix {
    RMatrix::from_ints(&[&[1, digit as i64], &[0, m as i64]])
}

/// `B^m_i = [[m, i], [0, 1]]`.
pub fn base_matrix_reverse(m: u32, digit: u32) -> RMatrix {
    RMatrix::from_ints(&[&[m as i64, digit as i64], &[0, 1]])
}

fn int_entries(v: &RVector) -> Option<Vec<BigInt>> {
    v.entries().iter().map(|x| x.is_integer().then(|| x.numer())).collect()
}

fn to_vector(xs: Vec<BigInt>) -> RVector {
    RVector::new(xs.into_iter().map(BigRational::from).collect()).expect("nonempty")
}

pub fn sb2_encode(w: &[u8]) -> RVector {
    let (mut a, mut b) = (BigInt::one(), BigInt::one());
    for &bit in w {
        if bit == 0 {
            b += &a;
        } else {
            a += &b;
        }
    }
    to_vector(vec![a, b])
}

pub fn sb2_decode(v: &RVector) -> Result<Vec<u8>, Error> {
    let bad = || Error::Encoding(format!("{v} is not a Stern-Brocot vector"));
    if v.dim() != 2 {
        return Err(bad());
    }
    let mut e = int_entries(v).ok_or_else(bad)?;
    let mut b = e.pop().expect("dim 2");
    let mut a = e.pop().expect("dim 2");
    let mut out = Vec::new();
    loop {
        if a.is_one() && b.is_one() {
            break;
        }
        if !a.is_positive() || !b.is_positive() || a == b {
            return Err(bad());
        }
        if b > a {
            b -= &a;
            out.push(0);
        } else {
            a -= &b;
            out.push(1);
        }
    }
    out.reverse();
    Ok(out)
}

/// Parses a string of `0`/`1` characters.
pub fn parse_bits(s: &str) -> Result<Vec<u8>, Error> {
    s.chars()
        .map(|c| match c {
            '0' => Ok(0),
            '1' => Ok(1),
            _ => Err(Error::Encoding(format!("{c:?} is not a binary digit"))),
        })
        .collect()
}

fn check_k(k: usize) -> Result<(), Error> {
    if k < 2 {
        return Err(Error::Encoding("the generalized encoding needs at least two symbols".into()));
    }
    Ok(())
}

/// Symbols are indices `0..k`.
pub fn gsb_encode(w: &[usize], k: usize) -> Result<RVector, Error> {
    check_k(k)?;
    let mut e = vec![BigInt::one(); k];
    for &j in w {
        if j >= k {
            return Err(Error::Encoding(format!("symbol index {j} is out of range for {k} symbols")));
        }
        let s: BigInt = e.iter().sum();
        e[j] = s;
    }
    Ok(to_vector(e))
}

pub fn gsb_decode(v: &RVector) -> Result<Vec<usize>, Error> {
    let k = v.dim();
    check_k(k)?;
    let bad = || Error::Encoding(format!("{v} is not a generalized Stern-Brocot vector"));
    let mut e = int_entries(v).ok_or_else(bad)?;
    let mut out = Vec::new();
    while !e.iter().all(One::is_one) {
        if e.iter().any(|x| !x.is_positive()) {
            return Err(bad());
        }
        let max = e.iter().max().expect("k >= 2").clone();
        let mut at = e.iter().enumerate().filter(|(_, x)| **x == max).map(|(i, _)| i);
        let j = at.next().expect("max exists");
        if at.next().is_some() {
            return Err(bad());
        }
        let rest: BigInt = e.iter().enumerate().filter(|&(i, _)| i != j).map(|(_, x)| x).sum();
        e[j] = &e[j] - rest;
        out.push(j);
    }
    out.reverse();
    Ok(out)
}

fn digits(w: &str, m: u32) -> Result<Vec<u32>, Error> {
    if !(2..=10).contains(&m) {
        return Err(Error::Encoding(format!("base {m} is outside 2..=10")));
    }
    w.chars()
        .map(|c| match c.to_digit(10) {
            Some(d) if d < m => Ok(d),
            _ => Err(Error::Encoding(format!("{c:?} is not a base-{m} digit"))),
        })
        .collect()
}

/// Returns the register vector and `e_m(w)`, which sits in the second entry.
pub fn base_m_encode(w: &str, m: u32) -> Result<(RVector, BigInt), Error> {
    let mut v = RVector::from_ints(&[1, 0]);
    for d in digits(w, m)? {
        v = v.mul_mat(&base_matrix(m, d))?;
    }
    let value = v.get(1).numer();
    Ok((v, value))
}

/// Returns the register vector and `e_m(w^r)`; the first entry is `m^|w|`.
pub fn base_m_encode_reverse(w: &str, m: u32) -> Result<(RVector, BigInt), Error> {
    let mut v = RVector::from_ints(&[1, 0]);
    for d in digits(w, m)? {
        v = v.mul_mat(&base_matrix_reverse(m, d))?;
    }
    let value = v.get(1).numer();
    Ok((v, value))
}

/// `e_m(w)` by Horner's rule, without matrices.
pub fn base_value(w: &str, m: u32) -> Result<BigInt, Error> {
    Ok(digits(w, m)?.into_iter().fold(BigInt::zero(), |acc, d| acc * m + d))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bits(s: &str) -> Vec<u8> {
        parse_bits(s).unwrap()
    }

    #[test]
    fn sb2_listed_values() {
        assert_eq!(sb2_encode(&[]), RVector::from_ints(&[1, 1]));
        assert_eq!(sb2_encode(&bits("010")), RVector::from_ints(&[3, 5]));
        assert_eq!(sb2_encode(&bits("001")), RVector::from_ints(&[4, 3]));
        assert_eq!(sb2_encode(&bits("011")), RVector::from_ints(&[5, 2]));
        assert_eq!(sb2_encode(&bits("11")), RVector::from_ints(&[3, 1]));
        assert_eq!(sb2_encode(&bits("0")), RVector::from_ints(&[1, 2]));
    }

    #[test]
    fn sb2_decoding() {
        assert_eq!(sb2_decode(&RVector::from_ints(&[1, 1])).unwrap(), Vec::<u8>::new());
        assert_eq!(sb2_decode(&RVector::from_ints(&[5, 2])).unwrap(), bits("011"));
        assert!(sb2_decode(&RVector::from_ints(&[2, 2])).is_err());
        assert!(sb2_decode(&RVector::from_ints(&[0, 1])).is_err());
    }

    #[test]
    fn sb2_matches_matrices() {
        let w = bits("0110100");
        let mut v = RVector::from_ints(&[1, 1]);
        for &b in &w {
            v = v.mul_mat(&sb_matrix(b)).unwrap();
        }
        assert_eq!(v, sb2_encode(&w));
    }

    #[test]
    fn gsb_small() {
        assert_eq!(gsb_encode(&[], 3).unwrap(), RVector::from_ints(&[1, 1, 1]));
        assert_eq!(gsb_encode(&[0], 3).unwrap(), RVector::from_ints(&[3, 1, 1]));
        assert!(gsb_decode(&RVector::from_ints(&[2, 2, 1])).is_err());
        assert!(gsb_encode(&[0], 1).is_err());
    }

    #[test]
    fn column_orientation() {
        // row vector times E_j puts the sum into entry j
        let v = RVector::from_ints(&[1, 2, 3]).mul_mat(&gsb_matrix(3, 1)).unwrap();
        assert_eq!(v, RVector::from_ints(&[1, 6, 3]));
    }

    #[test]
    fn base_m() {
        let (v, x) = base_m_encode("0", 2).unwrap();
        assert_eq!((v, x), (RVector::from_ints(&[1, 0]), BigInt::from(0)));
        assert_eq!(base_m_encode("110", 2).unwrap().1, BigInt::from(6));
        assert_eq!(base_m_encode("21", 3).unwrap().1, BigInt::from(7));
        let (v, x) = base_m_encode_reverse("110", 2).unwrap();
        assert_eq!(v.get(0), &BigRational::from(8));
        assert_eq!(x, BigInt::from(3));
        assert_eq!(base_m_encode_reverse("12", 3).unwrap().1, BigInt::from(7));
        assert_eq!(base_m_encode_reverse("", 3).unwrap().0, RVector::from_ints(&[1, 0]));
        assert!(base_m_encode("2", 2).is_err());
        assert!(base_m_encode("1", 11).is_err());
    }
}
