//! Balls in Cayley graphs of finitely generated matrix groups.

use std::collections::HashSet;

use crate::{AlgebraError, RMatrix};

pub const DEFAULT_BALL_CAP: usize = 1_000_000;

/// Generators together with their inverses.
#[derive(Clone, Debug)]
pub struct GeneratorSet {
    pub name: String,
    elements: Vec<RMatrix>,
}

impl GeneratorSet {
    /// Adds any missing inverses. Fails on a singular generator.
    pub fn new(name: impl Into<String>, gens: Vec<RMatrix>) -> Result<Self, AlgebraError> {
        let mut elements: Vec<RMatrix> = Vec::new();
        for g in gens {
            let inv = crate::mat_inverse(&g)?;
            for m in [g, inv] {
                if !elements.contains(&m) {
                    elements.push(m);
                }
            }
        }
        Ok(GeneratorSet { name: name.into(), elements })
    }

    pub fn elements(&self) -> &[RMatrix] {
        &self.elements
    }

    pub fn dim(&self) -> Option<usize> {
        self.elements.first().map(RMatrix::dim)
    }
}

/// Sizes of the balls of radius `0..=n`, and the ball of radius `n`.
pub fn growth_series(gens: &GeneratorSet, n: usize, cap: usize) -> Result<(Vec<usize>, HashSet<RMatrix>), AlgebraError> {
    let dim = gens.dim().unwrap_or(1);
    let id = RMatrix::identity(dim);
    let mut ball: HashSet<RMatrix> = HashSet::from([id.clone()]);
    let mut frontier = vec![id];
    let mut sizes = vec![1];
    for _ in 0..n {
        let mut next = Vec::new();
        for m in &frontier {
            for g in gens.elements() {
                let p = m.mul(g)?;
                if !ball.contains(&p) {
                    if ball.len() >= cap {
                        return Err(AlgebraError::BallCap(cap));
                    }
                    ball.insert(p.clone());
                    next.push(p);
                }
            }
        }
        sizes.push(ball.len());
        frontier = next;
    }
    Ok((sizes, ball))
}

/// Number of group elements that are products of at most `n` generators,
/// with the elements themselves. Deduplicates by matrix value.
pub fn growth_ball(gens: &GeneratorSet, n: usize, cap: usize) -> Result<(usize, HashSet<RMatrix>), AlgebraError> {
    let (sizes, ball) = growth_series(gens, n, cap)?;
    Ok((*sizes.last().expect("radius 0 is always present"), ball))
}
