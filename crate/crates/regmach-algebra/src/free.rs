//! Reduced words in free groups and the rank-2 matrix representation.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::{AlgebraError, RMatrix};

/// A reduced word. Letter `+i` is the `i`-th generator (1-based), `-i` its
/// inverse. Generator `i` prints as the `i`-th lowercase letter and its
/// inverse as the uppercase letter.
#[derive(Clone, PartialEq, Eq, Hash, Default, PartialOrd, Ord)]
pub struct FreeWord {
    letters: Vec<i32>,
}

impl FreeWord {
    pub fn identity() -> Self {
        FreeWord { letters: Vec::new() }
    }

    pub fn generator(i: i32) -> Self {
        assert!(i != 0, "generator index is 1-based");
        FreeWord { letters: vec![i] }
    }

    /// Reduces an arbitrary letter sequence.
    pub fn from_letters(letters: impl IntoIterator<Item = i32>) -> Self {
        let mut w = FreeWord::identity();
        for l in letters {
            assert!(l != 0, "letter 0 is not a generator");
            w.push(l);
        }
        w
    }

    fn push(&mut self, l: i32) {
        if self.letters.last() == Some(&-l) {
            self.letters.pop();
        } else {
            self.letters.push(l);
        }
    }

    pub fn letters(&self) -> &[i32] {
        &self.letters
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    /// Largest generator index used.
    pub fn rank(&self) -> usize {
        self.letters.iter().map(|l| l.unsigned_abs() as usize).max().unwrap_or(0)
    }

    pub fn inverse(&self) -> Self {
        FreeWord { letters: self.letters.iter().rev().map(|l| -l).collect() }
    }

    pub fn mul(&self, other: &FreeWord) -> FreeWord {
        let mut w = self.clone();
        for &l in &other.letters {
            w.push(l);
        }
        w
    }

    pub fn is_reduced(&self) -> bool {
        self.letters.windows(2).all(|p| p[0] != -p[1])
    }
}

pub fn freeword_mul(u: &FreeWord, v: &FreeWord) -> FreeWord {
    u.mul(v)
}

/// `M_a = [[1,2],[0,1]]` for letter 1 and `M_b = [[1,0],[2,1]]` for letter 2,
/// with inverses for negative letters.
pub fn generator_matrix(letter: i32) -> Result<RMatrix, AlgebraError> {
    Ok(match letter {
        1 => RMatrix::from_ints(&[&[1, 2], &[0, 1]]),
        -1 => RMatrix::from_ints(&[&[1, -2], &[0, 1]]),
        2 => RMatrix::from_ints(&[&[1, 0], &[2, 1]]),
        -2 => RMatrix::from_ints(&[&[1, 0], &[-2, 1]]),
        l => return Err(AlgebraError::Rank(l.unsigned_abs() as usize)),
    })
}

pub fn freeword_to_matrix(w: &FreeWord) -> Result<RMatrix, AlgebraError> {
    let mut m = RMatrix::identity(2);
    for &l in &w.letters {
        m = m.mul(&generator_matrix(l)?)?;
    }
    Ok(m)
}

/// Embeds `F2 × F2` in `SL(4, Z)` as block-diagonal matrices.
pub fn f2xf2_to_sl4z(g1: &FreeWord, g2: &FreeWord) -> Result<RMatrix, AlgebraError> {
    Ok(freeword_to_matrix(g1)?.direct_sum(&freeword_to_matrix(g2)?))
}

fn letter_char(l: i32) -> char {
    let base = if l > 0 { b'a' } else { b'A' };
    (base + (l.unsigned_abs() - 1) as u8) as char
}

impl fmt::Display for FreeWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.letters.is_empty() {
            return write!(f, "ε");
        }
        for (i, &l) in self.letters.iter().enumerate() {
            if i > 0 {
                write!(f, " ")?;
            }
            write!(f, "{}", letter_char(l))?;
        }
        Ok(())
    }
}

impl fmt::Debug for FreeWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "FreeWord({self})")
    }
}

impl FromStr for FreeWord {
    type Err = AlgebraError;

    /// Accepts `"a b A B"`, `"abAB"`, or `""`/`"ε"` for the identity.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let mut letters = Vec::new();
        for c in s.chars().filter(|c| !c.is_whitespace() && *c != 'ε') {
            let l = match c {
                'a'..='z' => (c as u8 - b'a' + 1) as i32,
                'A'..='Z' => -((c as u8 - b'A' + 1) as i32),
                _ => return Err(AlgebraError::Parse(s.to_string())),
            };
            letters.push(l);
        }
        Ok(FreeWord::from_letters(letters))
    }
}

impl Serialize for FreeWord {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        if self.is_empty() {
            s.serialize_str("")
        } else {
            s.serialize_str(&self.to_string())
        }
    }
}

impl<'de> Deserialize<'de> for FreeWord {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        String::deserialize(d)?.parse().map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn w(s: &str) -> FreeWord {
        s.parse().unwrap()
    }

    #[test]
    fn cancellation() {
        assert!(freeword_mul(&w("a"), &w("A")).is_empty());
        assert_eq!(freeword_mul(&w("a b"), &w("B a")), w("a a"));
        assert_eq!(w("a b B A b"), w("b"));
    }

    #[test]
    fn text_round_trip() {
        let x = w("a b A B");
        assert_eq!(x.to_string(), "a b A B");
        assert_eq!(w(&x.to_string()), x);
        assert_eq!(w("ε"), FreeWord::identity());
    }

    #[test]
    fn matrices() {
        assert!(freeword_to_matrix(&FreeWord::identity()).unwrap().is_identity());
        assert_eq!(freeword_to_matrix(&w("a")).unwrap(), RMatrix::from_ints(&[&[1, 2], &[0, 1]]));
        assert_eq!(freeword_to_matrix(&w("a b")).unwrap(), RMatrix::from_ints(&[&[5, 2], &[2, 1]]));
        assert!(freeword_to_matrix(&w("c")).is_err());
    }

    #[test]
    fn block_embedding() {
        assert!(f2xf2_to_sl4z(&FreeWord::identity(), &FreeWord::identity()).unwrap().is_identity());
        let m = f2xf2_to_sl4z(&w("a"), &FreeWord::identity()).unwrap();
        let ma = RMatrix::from_ints(&[&[1, 2], &[0, 1]]);
        assert_eq!(m, ma.direct_sum(&RMatrix::identity(2)));
    }
}
