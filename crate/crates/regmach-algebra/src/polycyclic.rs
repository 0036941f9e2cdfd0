//! The polycyclic monoid: stack operations as partial functions.
//!
//! Products read left to right: `p · q` applies `p` first. A nonzero element
//! pops its `pop` word (in popping order) and then pushes its `push` word.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::AlgebraError;

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum PolycyclicElem {
    Zero,
    Elem { pop: Vec<char>, push: Vec<char> },
}

impl PolycyclicElem {
    pub fn identity() -> Self {
        PolycyclicElem::Elem { pop: Vec::new(), push: Vec::new() }
    }

    pub fn push(x: char) -> Self {
        PolycyclicElem::Elem { pop: Vec::new(), push: vec![x] }
    }

    pub fn pop(x: char) -> Self {
        PolycyclicElem::Elem { pop: vec![x], push: Vec::new() }
    }

    pub fn new(pop: Vec<char>, push: Vec<char>) -> Self {
        PolycyclicElem::Elem { pop, push }
    }

    pub fn is_zero(&self) -> bool {
        matches!(self, PolycyclicElem::Zero)
    }

    pub fn is_identity(&self) -> bool {
        matches!(self, PolycyclicElem::Elem { pop, push } if pop.is_empty() && push.is_empty())
    }

    pub fn mul(&self, other: &PolycyclicElem) -> PolycyclicElem {
        let (PolycyclicElem::Elem { pop: p1, push: u1 }, PolycyclicElem::Elem { pop: p2, push: u2 }) = (self, other)
        else {
            return PolycyclicElem::Zero;
        };
        let mut pushed = u1.clone();
        let mut popping = p2.iter();
        let mut rest = Vec::new();
        for &x in popping.by_ref() {
            match pushed.pop() {
                Some(y) if y == x => {}
                Some(_) => return PolycyclicElem::Zero,
                None => {
                    rest.push(x);
                    break;
                }
            }
        }
        rest.extend(popping);
        let mut pop = p1.clone();
        pop.extend(rest);
        pushed.extend(u2.iter().copied());
        PolycyclicElem::Elem { pop, push: pushed }
    }

    /// Applies the element to a stack (top at the end).
    pub fn act(&self, stack: &[char]) -> Option<Vec<char>> {
        let PolycyclicElem::Elem { pop, push } = self else { return None };
        let mut s = stack.to_vec();
        for &x in pop {
            if s.pop()? != x {
                return None;
            }
        }
        s.extend(push.iter().copied());
        Some(s)
    }
}

pub fn poly_mul(p: &PolycyclicElem, q: &PolycyclicElem) -> PolycyclicElem {
    p.mul(q)
}

impl fmt::Display for PolycyclicElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PolycyclicElem::Zero => write!(f, "0"),
            PolycyclicElem::Elem { pop, push } => {
                let pop: String = pop.iter().collect();
                let push: String = push.iter().collect();
                write!(f, "Q:{pop} P:{push}")
            }
        }
    }
}

impl fmt::Debug for PolycyclicElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl FromStr for PolycyclicElem {
    type Err = AlgebraError;

    /// Parses `"0"`, or `"Q:<pop> P:<push>"` where either part may be
    /// omitted or empty.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let t = s.trim();
        if t == "0" {
            return Ok(PolycyclicElem::Zero);
        }
        let mut pop = Vec::new();
        let mut push = Vec::new();
        let mut seen_push = false;
        for part in t.split_whitespace() {
            if let Some(w) = part.strip_prefix("Q:") {
                if seen_push || !pop.is_empty() {
                    return Err(AlgebraError::Parse(s.to_string()));
                }
                pop = w.chars().collect();
            } else if let Some(w) = part.strip_prefix("P:") {
                if seen_push {
                    return Err(AlgebraError::Parse(s.to_string()));
                }
                seen_push = true;
                push = w.chars().collect();
            } else {
                return Err(AlgebraError::Parse(s.to_string()));
            }
        }
        Ok(PolycyclicElem::Elem { pop, push })
    }
}

impl Serialize for PolycyclicElem {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for PolycyclicElem {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        String::deserialize(d)?.parse().map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn push_then_pop_cancels() {
        let p = poly_mul(&PolycyclicElem::push('x'), &PolycyclicElem::pop('x'));
        assert!(p.is_identity());
    }

    #[test]
    fn mismatch_is_zero() {
        assert!(poly_mul(&PolycyclicElem::push('x'), &PolycyclicElem::pop('y')).is_zero());
        assert!(poly_mul(&PolycyclicElem::Zero, &PolycyclicElem::identity()).is_zero());
        assert!(poly_mul(&PolycyclicElem::identity(), &PolycyclicElem::Zero).is_zero());
    }

    #[test]
    fn pop_then_push_stays() {
        let p = poly_mul(&PolycyclicElem::pop('x'), &PolycyclicElem::push('y'));
        assert_eq!(p, PolycyclicElem::new(vec!['x'], vec!['y']));
        assert_eq!(p.to_string(), "Q:x P:y");
    }

    #[test]
    fn partial_cancellation() {
        let p = PolycyclicElem::new(vec![], vec!['a', 'b']);
        let q = PolycyclicElem::new(vec!['b', 'a', 'a'], vec!['c']);
        assert_eq!(p.mul(&q), PolycyclicElem::new(vec!['a'], vec!['c']));
    }

    #[test]
    fn parse() {
        assert_eq!("Q:xy P:z".parse::<PolycyclicElem>().unwrap(), PolycyclicElem::new(vec!['x', 'y'], vec!['z']));
        assert_eq!("0".parse::<PolycyclicElem>().unwrap(), PolycyclicElem::Zero);
        assert!("".parse::<PolycyclicElem>().unwrap().is_identity());
        assert!("P:x Q:y".parse::<PolycyclicElem>().is_err());
    }

    #[test]
    fn action_matches_product() {
        let p = PolycyclicElem::new(vec!['a'], vec!['b', 'b']);
        let q = PolycyclicElem::new(vec!['b'], vec!['a']);
        let stack = vec!['a', 'a'];
        let pq = p.mul(&q);
        assert_eq!(pq.act(&stack), p.act(&stack).and_then(|s| q.act(&s)));
    }
}
