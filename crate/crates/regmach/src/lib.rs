//! Simulation, transformation and brute-force verification of finite
//! automata with algebraic registers: matrix-group automata, homing vector
//! automata, counter automata, automata with multiplication, and valence
//! automata and grammars.

pub mod analysis;
pub mod encodings;
pub mod dfa;
pub mod engine;
pub mod machine;
pub mod transforms;
pub mod valence;
pub mod zoo;

pub use engine::{Budget, Outcome, RunVerdict, StepBound, TimeBound, TimeMode};
pub use machine::{
    counter_status, format_word, parse_word, CompiledMachine, Effect, MachineKind, MachineSpec, Mode, Move, Read,
    Status, Transition, ValidationReport, ZeroTest,
};
pub use regmach_algebra as algebra;

use thiserror::Error;

#[derive(Debug, Clone, Error)]
pub enum Error {
    #[error("invalid machine: {0}")]
    Invalid(ValidationReport),
    #[error("symbol {0:?} is not in the alphabet")]
    UnknownSymbol(String),
    #[error("cannot split {0:?} into symbols; separate them with commas")]
    AmbiguousInput(String),
    #[error("machine is not deterministic on this input (transition {0})")]
    Nondeterministic(usize),
    #[error("json: {0}")]
    Json(String),
    #[error(transparent)]
    Algebra(#[from] regmach_algebra::AlgebraError),
    #[error("transform precondition failed: {0}")]
    Precondition(String),
    #[error("invalid encoding: {0}")]
    Encoding(String),
    #[error("unknown name {0:?}")]
    UnknownName(String),
    #[error("search cap exceeded: {0}")]
    Cap(String),
}

/// Validates `spec` and runs it on a textual input.
pub fn run(spec: &MachineSpec, input: &str, budget: &Budget) -> Result<RunVerdict, Error> {
    let m = spec.compile()?;
    let w = m.parse_input(input)?;
    Ok(m.run(&w, budget))
}
