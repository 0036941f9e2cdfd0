//! The discrete Heisenberg group in the normal form `b^x a^y c^z`.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::RMatrix;

/// `b^x a^y c^z`. The matrix image is `[[1, y, z], [0, 1, x], [0, 0, 1]]`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
pub struct HeisenbergElem {
    /// exponent of `b`
    pub x: i64,
    /// exponent of `a`
    pub y: i64,
    /// exponent of `c`
    pub z: i64,
}

impl HeisenbergElem {
    pub const IDENTITY: HeisenbergElem = HeisenbergElem { x: 0, y: 0, z: 0 };
    pub const A: HeisenbergElem = HeisenbergElem { x: 0, y: 1, z: 0 };
    pub const B: HeisenbergElem = HeisenbergElem { x: 1, y: 0, z: 0 };
    pub const C: HeisenbergElem = HeisenbergElem { x: 0, y: 0, z: 1 };

    pub fn new(x: i64, y: i64, z: i64) -> Self {
        HeisenbergElem { x, y, z }
    }

    pub fn mul(&self, h: &HeisenbergElem) -> HeisenbergElem {
        HeisenbergElem { x: self.x + h.x, y: self.y + h.y, z: self.z + h.z + self.y * h.x }
    }

    pub fn inverse(&self) -> HeisenbergElem {
        HeisenbergElem { x: -self.x, y: -self.y, z: self.x * self.y - self.z }
    }

    pub fn to_matrix(&self) -> RMatrix {
        RMatrix::from_ints(&[&[1, self.y, self.z], &[0, 1, self.x], &[0, 0, 1]])
    }
}

pub fn heis_mul(g: &HeisenbergElem, h: &HeisenbergElem) -> HeisenbergElem {
    g.mul(h)
}

pub fn heis_to_matrix(g: &HeisenbergElem) -> RMatrix {
    g.to_matrix()
}

impl fmt::Debug for HeisenbergElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "b^{} a^{} c^{}", self.x, self.y, self.z)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn commutator_relation() {
        let ab = heis_mul(&HeisenbergElem::A, &HeisenbergElem::B);
        assert_eq!(ab, HeisenbergElem::new(1, 1, 1));
        assert_eq!(heis_mul(&HeisenbergElem::IDENTITY, &ab), ab);
    }

    #[test]
    fn generator_matrices() {
        assert!(heis_to_matrix(&HeisenbergElem::IDENTITY).is_identity());
        assert_eq!(HeisenbergElem::A.to_matrix(), RMatrix::from_ints(&[&[1, 1, 0], &[0, 1, 0], &[0, 0, 1]]));
        assert_eq!(HeisenbergElem::C.to_matrix(), RMatrix::from_ints(&[&[1, 0, 1], &[0, 1, 0], &[0, 0, 1]]));
    }

    #[test]
    fn inverse() {
        let g = HeisenbergElem::new(3, -2, 5);
        assert_eq!(g.mul(&g.inverse()), HeisenbergElem::IDENTITY);
        assert_eq!(g.inverse().mul(&g), HeisenbergElem::IDENTITY);
    }
}
