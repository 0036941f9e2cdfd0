//! Complete deterministic finite automata, used by the regular-language
//! transforms.

use serde::{Deserialize, Serialize};

use crate::Error;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Dfa {
    pub alphabet: Vec<String>,
    pub n_states: usize,
    pub initial: usize,
    pub accepting: Vec<bool>,
    /// `delta[state][symbol]`; `None` makes the automaton incomplete
    pub delta: Vec<Vec<Option<usize>>>,
}

impl Dfa {
    pub fn new(alphabet: &[&str], initial: usize, accepting: &[usize], delta: Vec<Vec<usize>>) -> Self {
        let n_states = delta.len();
        let mut acc = vec![false; n_states];
        for &a in accepting {
            acc[a] = true;
        }
        Dfa {
            alphabet: alphabet.iter().map(|s| s.to_string()).collect(),
            n_states,
            initial,
            accepting: acc,
            delta: delta.into_iter().map(|row| row.into_iter().map(Some).collect()).collect(),
        }
    }

    /// One state accepting everything.
    pub fn universal(alphabet: &[String]) -> Self {
        Dfa {
            alphabet: alphabet.to_vec(),
            n_states: 1,
            initial: 0,
            accepting: vec![true],
            delta: vec![vec![Some(0); alphabet.len()]],
        }
    }

    pub fn is_complete(&self) -> bool {
        self.delta.len() == self.n_states
            && self.delta.iter().all(|row| row.len() == self.alphabet.len() && row.iter().all(Option::is_some))
    }

    pub fn check_complete(&self) -> Result<(), Error> {
        if !self.is_complete() {
            return Err(Error::Precondition("the finite automaton is not complete".into()));
        }
        Ok(())
    }

    pub fn step(&self, q: usize, a: usize) -> Option<usize> {
        self.delta.get(q)?.get(a).copied().flatten()
    }

    pub fn accepts(&self, w: &[usize]) -> bool {
        let mut q = self.initial;
        for &a in w {
            match self.step(q, a) {
                Some(p) => q = p,
                None => return false,
            }
        }
        self.accepting[q]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ab_star() {
        let d = Dfa::new(&["a", "b"], 0, &[0], vec![vec![1, 2], vec![2, 0], vec![2, 2]]);
        assert!(d.is_complete());
        assert!(d.accepts(&[]));
        assert!(d.accepts(&[0, 1, 0, 1]));
        assert!(!d.accepts(&[0, 0]));
    }
}
