//! Constructions that turn one machine into another.
//!
//! Every construction is a pure function. [`certify`] compares an input and
//! an output on all words up to a length and is how a [`TransformReport`] is
//! produced.

use std::collections::{BTreeMap, BTreeSet, HashSet, VecDeque};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use regmach_algebra::{
    growth_series, mat_inverse, BigRational, FreeWord, GeneratorSet, PolycyclicElem, RMatrix, RVector,
    DEFAULT_BALL_CAP,
};
use serde::Serialize;

use crate::analysis::{compare, MachineOracle, Oracle};
use crate::dfa::Dfa;
use crate::engine::{Budget, Outcome};
use crate::machine::{Effect, MachineKind, MachineSpec, Mode, Move, Read, Status, Transition};
use crate::valence::{PdaTransition, ValenceEffect, ValenceNfa, ValencePda, ValenceTransition};
use crate::Error;

// ---- reports ----

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Certificate {
    pub alphabet: Vec<String>,
    pub max_len: usize,
    pub budget: Budget,
    pub agreed: bool,
    pub first_disagreement: Option<String>,
    pub checked: usize,
    /// words on which either side ran out of budget
    pub unknown: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TransformReport {
    pub transform: String,
    pub input: serde_json::Value,
    pub output: serde_json::Value,
    pub certificate: Certificate,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
}

/// Checks that two oracles agree on every word up to `max_len`.
pub fn certify(a: &dyn Oracle, b: &dyn Oracle, max_len: usize, budget: Budget, jobs: usize) -> Result<Certificate, Error> {
    let r = compare(a, b, max_len, jobs)?;
    let first_disagreement = r.first_disagreement.or_else(|| r.unknown.first().cloned());
    Ok(Certificate {
        alphabet: r.alphabet,
        max_len,
        budget,
        agreed: r.agreed,
        first_disagreement,
        checked: r.checked,
        unknown: r.unknown.len(),
    })
}

/// Certifies that two machine descriptions agree on `Σ^{≤max_len}`.
pub fn certify_specs(
    input: &MachineSpec,
    output: &MachineSpec,
    max_len: usize,
    budget: Budget,
    jobs: usize,
) -> Result<Certificate, Error> {
    let a = input.compile()?;
    let b = output.compile()?;
    certify(&MachineOracle { machine: &a, budget }, &MachineOracle { machine: &b, budget }, max_len, budget, jobs)
}

fn json<T: Serialize>(x: &T) -> serde_json::Value {
    serde_json::to_value(x).expect("serialization cannot fail")
}

// ---- helpers ----

/// The first `k` primes.
pub fn first_primes(k: usize) -> Vec<u64> {
    let mut out = Vec::with_capacity(k);
    let mut n = 2u64;
    while out.len() < k {
        if out.iter().take_while(|&&p| p * p <= n).all(|&p| !n.is_multiple_of(p)) {
            out.push(n);
        }
        n += 1;
    }
    out
}

const TRIAL_LIMIT: u64 = 1 << 20;

/// Prime factorization of a positive integer by trial division.
fn factor(n: &BigInt) -> Result<BTreeMap<u64, i64>, Error> {
    let mut n = n.abs();
    let mut out = BTreeMap::new();
    let mut p = 2u64;
    while p < TRIAL_LIMIT && BigInt::from(p) * BigInt::from(p) <= n {
        let bp = BigInt::from(p);
        while (&n % &bp).is_zero() {
            n /= &bp;
            *out.entry(p).or_insert(0) += 1;
        }
        p += if p == 2 { 1 } else { 2 };
    }
    if !n.is_one() {
        let q = n
            .to_u64()
            .filter(|&q| q < TRIAL_LIMIT * TRIAL_LIMIT)
            .ok_or_else(|| Error::Precondition(format!("cannot factor {n}")))?;
        *out.entry(q).or_insert(0) += 1;
    }
    Ok(out)
}

/// Exponents of the primes in a nonzero rational, denominators negative.
fn exponents(q: &BigRational) -> Result<BTreeMap<u64, i64>, Error> {
    let mut e = factor(&q.numer())?;
    for (p, x) in factor(&q.denom())? {
        *e.entry(p).or_insert(0) -= x;
    }
    Ok(e)
}

fn prime_product(primes: &[u64], exps: &[i64]) -> BigRational {
    let mut num = BigInt::one();
    let mut den = BigInt::one();
    for (&p, &e) in primes.iter().zip(exps) {
        let pe = num_traits::pow(BigInt::from(p), e.unsigned_abs() as usize);
        if e >= 0 {
            num *= pe;
        } else {
            den *= pe;
        }
    }
    BigRational::from_bigints(num, den).expect("nonzero denominator")
}

fn fresh(taken: &mut BTreeSet<String>, base: String) -> String {
    let mut s = base;
    while taken.contains(&s) {
        s.push('\'');
    }
    taken.insert(s.clone());
    s
}

/// Matrices collected under unique names.
#[derive(Default)]
struct Pool(BTreeMap<String, RMatrix>);

impl Pool {
    fn add(&mut self, name: String, m: RMatrix) -> Effect {
        if m.is_identity() {
            return Effect::Identity;
        }
        let mut name = name;
        loop {
            match self.0.get(&name) {
                Some(old) if *old == m => break,
                Some(_) => name.push('\''),
                None => {
                    self.0.insert(name.clone(), m);
                    break;
                }
            }
        }
        Effect::Matrix(name)
    }
}

fn effect_name(e: &Effect) -> String {
    match e {
        Effect::Identity => "I".into(),
        Effect::Matrix(n) => n.clone(),
        Effect::Delta(d) => format!("{d:?}"),
        Effect::Scalar(q) => q.to_string(),
    }
}

/// The effect of `e1` followed by `e2`, adding matrices to `pool`.
fn compose(spec: &MachineSpec, pool: &mut Pool, e1: &Effect, e2: &Effect) -> Result<Effect, Error> {
    match (e1, e2) {
        (Effect::Identity, e) | (e, Effect::Identity) => {
            if let Effect::Matrix(n) = e {
                pool.add(n.clone(), spec.matrices[n].clone());
            }
            Ok(e.clone())
        }
        (Effect::Delta(a), Effect::Delta(b)) => {
            let mut d = Vec::with_capacity(a.len());
            for (x, y) in a.iter().zip(b) {
                d.push(x.checked_add(*y).ok_or_else(|| Error::Precondition("counter delta overflow".into()))?);
            }
            Ok(Effect::Delta(d))
        }
        (Effect::Scalar(a), Effect::Scalar(b)) => Ok(Effect::Scalar(a * b)),
        _ => {
            let bad = || Error::Precondition(format!("cannot compose {e1:?} and {e2:?}"));
            let a = spec.effect_matrix(e1).ok_or_else(bad)?;
            let b = spec.effect_matrix(e2).ok_or_else(bad)?;
            Ok(pool.add(format!("{}·{}", effect_name(e1), effect_name(e2)), a.mul(&b)?))
        }
    }
}

/// Drops states not reachable from the initial state, with their transitions.
fn trim(mut spec: MachineSpec) -> MachineSpec {
    let mut reach: HashSet<String> = HashSet::from([spec.initial_state.clone()]);
    let mut queue = VecDeque::from([spec.initial_state.clone()]);
    while let Some(q) = queue.pop_front() {
        for t in spec.transitions.iter().filter(|t| t.from == q) {
            if reach.insert(t.to.clone()) {
                queue.push_back(t.to.clone());
            }
        }
    }
    spec.states.retain(|s| reach.contains(s));
    spec.accept_states.retain(|s| reach.contains(s));
    spec.transitions.retain(|t| reach.contains(&t.from));
    let used: HashSet<&str> = spec
        .transitions
        .iter()
        .filter_map(|t| match &t.effect {
            Effect::Matrix(n) => Some(n.as_str()),
            _ => None,
        })
        .collect();
    let matrices = std::mem::take(&mut spec.matrices);
    spec.matrices = matrices.into_iter().filter(|(k, _)| used.contains(k.as_str())).collect();
    spec
}

fn require(cond: bool, what: &str) -> Result<(), Error> {
    if cond {
        Ok(())
    } else {
        Err(Error::Precondition(what.into()))
    }
}

fn require_blind(spec: &MachineSpec) -> Result<(), Error> {
    require(
        spec.mode.blind && spec.transitions.iter().all(|t| t.status == Status::Any),
        "the machine must be blind",
    )
}

fn one_by_one(q: BigRational) -> RMatrix {
    RMatrix::diagonal(&[q])
}

/// The multiplier of a transition in a one-dimensional machine.
fn multiplier(spec: &MachineSpec, e: &Effect) -> Result<BigRational, Error> {
    match e {
        Effect::Identity => Ok(BigRational::one()),
        Effect::Scalar(q) => Ok(q.clone()),
        Effect::Matrix(n) => Ok(spec.matrices[n].get(0, 0).clone()),
        Effect::Delta(_) => Err(Error::Precondition("counter effect in a one-dimensional machine".into())),
    }
}

// ---- counters and one-dimensional machines ----

/// Blind counters to one rational register: counter `i` is the exponent of
/// the `i`-th prime.
pub fn kbca_to_bhva1(spec: &MachineSpec) -> Result<MachineSpec, Error> {
    require(spec.kind == MachineKind::Counter, "expected a counter machine")?;
    require_blind(spec)?;
    let primes = first_primes(spec.dimension);
    let mut matrices = BTreeMap::new();
    let mut transitions = Vec::new();
    for t in &spec.transitions {
        let d = match &t.effect {
            Effect::Delta(d) => d.clone(),
            _ => vec![0; spec.dimension],
        };
        let q = prime_product(&primes, &d);
        let name = format!("x{q}");
        matrices.insert(name.clone(), one_by_one(q));
        transitions.push(Transition { effect: Effect::Matrix(name), ..t.clone() });
    }
    Ok(MachineSpec {
        kind: MachineKind::Hva,
        mode: Mode { blind: true, ..spec.mode },
        dimension: 1,
        alphabet: spec.alphabet.clone(),
        states: spec.states.clone(),
        initial_state: spec.initial_state.clone(),
        accept_states: spec.accept_states.clone(),
        initial_vector: Some(RVector::from_ints(&[1])),
        matrices,
        transitions,
    })
}

/// One rational register to blind counters, one per prime occurring in a
/// multiplier. States are doubled to carry the sign; zero multipliers are
/// dropped first.
pub fn bhva1_to_kbca(spec: &MachineSpec) -> Result<MachineSpec, Error> {
    require(
        matches!(spec.kind, MachineKind::Hva | MachineKind::Fam) && spec.dimension == 1,
        "expected a one-dimensional machine",
    )?;
    require_blind(spec)?;
    let v = match &spec.initial_vector {
        Some(v) => v.get(0).clone(),
        None => BigRational::one(),
    };
    // with a zero register every path homes
    let trivial = v.is_zero();
    let mut kept = Vec::new();
    for t in &spec.transitions {
        let m = multiplier(spec, &t.effect)?;
        if m.is_zero() && !trivial {
            continue;
        }
        let (sign, e) = if trivial { (false, BTreeMap::new()) } else { (m.is_negative(), exponents(&m)?) };
        kept.push((t, sign, e));
    }
    let primes: Vec<u64> = kept.iter().flat_map(|(_, _, e)| e.keys().copied()).collect::<BTreeSet<_>>().into_iter().collect();
    let k = primes.len();
    let st = |q: &str, neg: bool| format!("{q}{}", if neg { "-" } else { "+" });
    let mut states = Vec::new();
    for q in &spec.states {
        states.push(st(q, false));
        states.push(st(q, true));
    }
    let mut transitions = Vec::new();
    for (t, flip, e) in kept {
        let d: Vec<i64> = primes.iter().map(|p| e.get(p).copied().unwrap_or(0)).collect();
        for neg in [false, true] {
            transitions.push(Transition {
                from: st(&t.from, neg),
                to: st(&t.to, neg ^ flip),
                effect: Effect::Delta(d.clone()),
                ..t.clone()
            });
        }
    }
    Ok(trim(MachineSpec {
        kind: MachineKind::Counter,
        mode: Mode { blind: true, ..spec.mode },
        dimension: k,
        alphabet: spec.alphabet.clone(),
        states,
        initial_state: st(&spec.initial_state, false),
        accept_states: spec.accept_states.iter().map(|q| st(q, false)).collect(),
        initial_vector: None,
        matrices: BTreeMap::new(),
        transitions,
    }))
}

/// Blind unit-delta counters to a `(k+1)`-vector starting at all ones whose
/// last entry stays 1; a delta `d` is the identity with `d` in the last row.
pub fn kbca_to_bhva_k1(spec: &MachineSpec) -> Result<MachineSpec, Error> {
    require(spec.kind == MachineKind::Counter, "expected a counter machine")?;
    require_blind(spec)?;
    let k = spec.dimension;
    let mut pool = Pool::default();
    let mut transitions = Vec::new();
    for t in &spec.transitions {
        let effect = match &t.effect {
            Effect::Delta(d) => {
                require(d.iter().all(|x| x.abs() <= 1), "deltas must lie in {-1, 0, 1}; normalize first")?;
                let mut m = RMatrix::identity(k + 1);
                for (i, &x) in d.iter().enumerate() {
                    m.set(k, i, BigRational::from_int(x));
                }
                let label: Vec<String> = d.iter().map(i64::to_string).collect();
                pool.add(format!("D[{}]", label.join(",")), m)
            }
            _ => Effect::Identity,
        };
        transitions.push(Transition { effect, ..t.clone() });
    }
    Ok(MachineSpec {
        kind: MachineKind::Hva,
        mode: Mode { blind: true, ..spec.mode },
        dimension: k + 1,
        alphabet: spec.alphabet.clone(),
        states: spec.states.clone(),
        initial_state: spec.initial_state.clone(),
        accept_states: spec.accept_states.clone(),
        initial_vector: Some(RVector::ones(k + 1)),
        matrices: pool.0,
        transitions,
    })
}

/// Splits every counter update with an entry of absolute value above one
/// into a chain of unit updates through fresh states. The first link keeps
/// the read, the move and the status; the others are empty moves.
pub fn normalize_counter_updates(spec: &MachineSpec) -> Result<MachineSpec, Error> {
    require(spec.kind == MachineKind::Counter, "expected a counter machine")?;
    let mut taken: BTreeSet<String> = spec.states.iter().cloned().collect();
    let mut states = spec.states.clone();
    let mut transitions = Vec::new();
    let mut chained = false;
    for (i, t) in spec.transitions.iter().enumerate() {
        let d = match &t.effect {
            Effect::Delta(d) if d.iter().any(|x| x.abs() > 1) => d.clone(),
            _ => {
                transitions.push(t.clone());
                continue;
            }
        };
        chained = true;
        let len = d.iter().map(|x| x.unsigned_abs()).max().expect("nonempty") as usize;
        let mut left = d.clone();
        let mut from = t.from.clone();
        for j in 0..len {
            let unit: Vec<i64> = left.iter().map(|x| x.signum()).collect();
            for (x, u) in left.iter_mut().zip(&unit) {
                *x -= u;
            }
            let to = if j + 1 == len {
                t.to.clone()
            } else {
                let s = fresh(&mut taken, format!("{}~{}.{}", t.from, i, j + 1));
                states.push(s.clone());
                s
            };
            let link = if j == 0 {
                Transition { from: from.clone(), to: to.clone(), effect: Effect::Delta(unit), ..t.clone() }
            } else {
                Transition::eps(&from, &to).delta(unit)
            };
            transitions.push(link);
            from = to;
        }
    }
    Ok(MachineSpec {
        states,
        transitions,
        mode: Mode { realtime: spec.mode.realtime && !chained, ..spec.mode },
        ..spec.clone()
    })
}

/// Collapses chains of stationary moves of a deterministic blind machine
/// into the move that finally advances the head, accumulating effects.
pub fn oneway_blind_det_to_realtime(spec: &MachineSpec) -> Result<MachineSpec, Error> {
    require(spec.kind != MachineKind::Fam, "automata with multiplication keep the head on the end-marker")?;
    require(spec.mode.deterministic, "the machine must be deterministic")?;
    require_blind(spec)?;
    require(
        spec.transitions.iter().all(|t| t.read != Read::Eps),
        "empty moves are not handled; a one-way machine stays on a symbol instead",
    )?;
    let report = spec.validate();
    if !report.is_ok() {
        return Err(Error::Invalid(report));
    }
    let next = |q: &str, r: &Read| spec.transitions.iter().find(|t| t.from == q && t.read == *r);
    let mut pool = Pool::default();
    let mut transitions = Vec::new();
    for t in &spec.transitions {
        if t.mv == Move::Right {
            if let Effect::Matrix(n) = &t.effect {
                pool.add(n.clone(), spec.matrices[n].clone());
            }
            transitions.push(t.clone());
            continue;
        }
        let mut cur = t;
        let mut effect = t.effect.clone();
        let mut seen = BTreeSet::from([t.from.clone()]);
        let done = loop {
            if cur.mv == Move::Right {
                break true;
            }
            if !seen.insert(cur.to.clone()) {
                return Err(Error::Precondition(format!(
                    "stationary cycle through state {:?} on {:?}: the next symbol is never scanned",
                    cur.to, t.read
                )));
            }
            match next(&cur.to, &t.read) {
                Some(n) => {
                    effect = compose(spec, &mut pool, &effect, &n.effect)?;
                    cur = n;
                }
                None => break false,
            }
        };
        if done {
            transitions.push(Transition {
                from: t.from.clone(),
                read: t.read.clone(),
                status: Status::Any,
                to: cur.to.clone(),
                effect,
                mv: Move::Right,
            });
        }
    }
    let matrices = match spec.kind {
        MachineKind::Efa | MachineKind::Hva => pool.0,
        _ => BTreeMap::new(),
    };
    Ok(MachineSpec { mode: Mode { realtime: true, ..spec.mode }, matrices, transitions, ..spec.clone() })
}

// ---- end-markers and integer lifting ----

/// Removes the end-marker from a nondeterministic blind machine.
///
/// Real-time machines fuse each last symbol with the end-marker move into a
/// fresh accept state, and accept the empty word through a fresh initial
/// state when the original does. Otherwise the states are copied twice, for
/// "on the end-marker" and "past it", with end-marker moves turned into empty
/// moves into the copies; only the past-copies of accept states accept.
pub fn strip_endmarker_blind_nondet(spec: &MachineSpec) -> Result<MachineSpec, Error> {
    require(spec.mode.endmarker, "the machine has no end-marker")?;
    require(!spec.mode.deterministic, "the machine must be nondeterministic")?;
    require(spec.kind != MachineKind::Fam, "automata with multiplication keep the head on the end-marker")?;
    require_blind(spec)?;
    let report = spec.validate();
    if !report.is_ok() {
        return Err(Error::Invalid(report));
    }
    let mut taken: BTreeSet<String> = spec.states.iter().cloned().collect();
    let out = if spec.mode.realtime {
        let accepting: HashSet<&str> = spec.accept_states.iter().map(String::as_str).collect();
        let finals: Vec<&Transition> =
            spec.transitions.iter().filter(|t| t.read == Read::End && accepting.contains(t.to.as_str())).collect();
        let fin = fresh(&mut taken, "acc".into());
        let mut pool = Pool::default();
        let mut transitions = Vec::new();
        for t in spec.transitions.iter().filter(|t| t.read != Read::End) {
            if let Effect::Matrix(n) = &t.effect {
                pool.add(n.clone(), spec.matrices[n].clone());
            }
            transitions.push(t.clone());
            for f in finals.iter().filter(|f| f.from == t.to) {
                let effect = compose(spec, &mut pool, &t.effect, &f.effect)?;
                transitions.push(Transition { to: fin.clone(), effect, ..t.clone() });
            }
        }
        let mut states = spec.states.clone();
        states.push(fin.clone());
        let mut accept_states = vec![fin];
        let mut initial_state = spec.initial_state.clone();
        if spec.compile()?.run(&[], &Budget::steps(1)).accepted() {
            let init = fresh(&mut taken, "init".into());
            let copies: Vec<Transition> = transitions
                .iter()
                .filter(|t| t.from == spec.initial_state)
                .map(|t| Transition { from: init.clone(), ..t.clone() })
                .collect();
            transitions.extend(copies);
            states.push(init.clone());
            accept_states.push(init.clone());
            initial_state = init;
        }
        let matrices = match spec.kind {
            MachineKind::Efa | MachineKind::Hva => pool.0,
            _ => BTreeMap::new(),
        };
        MachineSpec {
            mode: Mode { endmarker: false, ..spec.mode },
            states,
            initial_state,
            accept_states,
            matrices,
            transitions,
            ..spec.clone()
        }
    } else {
        let on = |q: &str| format!("{q}@$");
        let past = |q: &str| format!("{q}@end");
        let mut states = spec.states.clone();
        for q in &spec.states {
            states.push(fresh(&mut taken, on(q)));
        }
        for q in &spec.states {
            states.push(fresh(&mut taken, past(q)));
        }
        let mut transitions = Vec::new();
        for t in &spec.transitions {
            let base = Transition { status: Status::Any, mv: Move::Stay, read: Read::Eps, ..t.clone() };
            match (&t.read, t.mv) {
                (Read::Sym(_), _) => transitions.push(t.clone()),
                (Read::Eps, _) => {
                    transitions.push(t.clone());
                    transitions.push(Transition { from: on(&t.from), to: on(&t.to), ..base.clone() });
                    transitions.push(Transition { from: past(&t.from), to: past(&t.to), ..base.clone() });
                }
                (Read::End, mv) => {
                    let to = if mv == Move::Stay { on(&t.to) } else { past(&t.to) };
                    transitions.push(Transition { from: t.from.clone(), to: to.clone(), ..base.clone() });
                    transitions.push(Transition { from: on(&t.from), to, ..base.clone() });
                }
            }
        }
        MachineSpec {
            mode: Mode { endmarker: false, realtime: false, ..spec.mode },
            states,
            accept_states: spec.accept_states.iter().map(|q| past(q)).collect(),
            transitions,
            ..spec.clone()
        }
    };
    Ok(trim(out))
}

fn denominator_lcm<'a>(xs: impl IntoIterator<Item = &'a BigRational>) -> BigInt {
    xs.into_iter().fold(BigInt::one(), |acc, x| acc.lcm(&x.denom()))
}

/// Lifts a blind homing vector automaton with rational matrices to one of
/// dimension `k + 2` with integer matrices.
///
/// The register `(u, s, 1)` holds `u = c·D·v·M` and `s = D`, where `c`
/// clears the denominators of `v` and `D` is the running product of the
/// denominators `d_A` cleared at each step: a matrix `A` becomes
/// `diag(d_A·A, d_A, 1)`. End-marker moves are followed by
///
/// ```text
/// R = [ I_k  0  0 ]
///     [ -cv  0  0 ]
///     [  cv  1  1 ]
/// ```
///
/// which maps `(u, s, 1)` to `(u - s·cv + cv, 1, 1)`. That equals the
/// initial `(cv, 1, 1)` iff `u = s·cv`, iff `v·M = v`. Machines without an
/// end-marker first get an identity end-marker loop on every accept state.
pub fn rational_to_integer_lift(spec: &MachineSpec) -> Result<MachineSpec, Error> {
    require(spec.kind == MachineKind::Hva, "expected a homing vector automaton")?;
    require_blind(spec)?;
    let mut spec = spec.clone();
    if !spec.mode.endmarker {
        spec.mode.endmarker = true;
        for q in spec.accept_states.clone() {
            spec.transitions.push(Transition::end(&q, &q));
        }
    }
    let report = spec.validate();
    if !report.is_ok() {
        return Err(Error::Invalid(report));
    }
    let end_targets: HashSet<&str> =
        spec.transitions.iter().filter(|t| t.read == Read::End).map(|t| t.to.as_str()).collect();
    require(
        spec.transitions.iter().all(|t| t.read != Read::End || t.mv == Move::Right),
        "end-marker moves must advance the head",
    )?;
    require(
        spec.transitions.iter().all(|t| t.read != Read::Eps || !end_targets.contains(t.from.as_str())),
        "no empty moves may follow an end-marker move",
    )?;
    let k = spec.dimension;
    let v = spec.initial_vector.clone().expect("validated");
    let c = BigRational::from(denominator_lcm(v.entries()));
    let cv: Vec<BigRational> = v.entries().iter().map(|x| x * &c).collect();
    let mut r = RMatrix::identity(k + 2);
    for j in 0..k {
        r.set(k, j, -&cv[j]);
        r.set(k + 1, j, cv[j].clone());
    }
    r.set(k, k, BigRational::zero());
    r.set(k + 1, k, BigRational::one());
    let lift = |a: &RMatrix| {
        let d = BigRational::from(denominator_lcm(a.entries()));
        let scaled = RMatrix::from_rows(a.rows().into_iter().map(|row| row.iter().map(|x| x * &d).collect()).collect())
            .expect("square");
        scaled.direct_sum(&RMatrix::diagonal(&[d, BigRational::one()]))
    };
    let mut pool = Pool::default();
    let mut transitions = Vec::new();
    for t in &spec.transitions {
        let a = spec.effect_matrix(&t.effect).expect("validated");
        let name = effect_name(&t.effect);
        let effect = if t.read == Read::End {
            pool.add(format!("Z{name}$"), lift(&a).mul(&r)?)
        } else {
            pool.add(format!("Z{name}"), lift(&a))
        };
        transitions.push(Transition { effect, ..t.clone() });
    }
    let mut iv = cv;
    iv.push(BigRational::one());
    iv.push(BigRational::one());
    Ok(MachineSpec {
        dimension: k + 2,
        initial_vector: Some(RVector::new(iv)?),
        matrices: pool.0,
        transitions,
        ..spec
    })
}

// ---- free groups, polycyclic monoids and stacks ----

fn letter_char(l: i32) -> char {
    let base = if l > 0 { b'a' } else { b'A' };
    (base + (l.unsigned_abs() - 1) as u8) as char
}

/// A free-group automaton of rank two as a pushdown automaton over the
/// stack alphabet `{a, b, A, B}`. Each letter `x` of an effect word becomes
/// one link of a chain through fresh states, which either pushes `x` or pops
/// its inverse. The stack then always spells a word equal to the register,
/// and is empty exactly when the reduced register is.
pub fn f2_to_pda(nfa: &ValenceNfa) -> Result<ValencePda, Error> {
    let mut taken: BTreeSet<String> = nfa.states.iter().cloned().collect();
    let mut states = nfa.states.clone();
    let mut transitions = Vec::new();
    for (i, t) in nfa.transitions.iter().enumerate() {
        require(t.effect.poly.is_identity(), "the register already has a polycyclic component")?;
        require(t.effect.free.rank() <= 2, "effects must be words over two generators")?;
        let rest = ValenceEffect { free: FreeWord::identity(), ..t.effect.clone() };
        let letters = t.effect.free.letters();
        if letters.is_empty() {
            transitions.push(PdaTransition {
                from: t.from.clone(),
                read: t.read.clone(),
                pop: None,
                push: vec![],
                to: t.to.clone(),
                effect: rest,
            });
            continue;
        }
        let mut from = t.from.clone();
        for (j, &l) in letters.iter().enumerate() {
            let to = if j + 1 == letters.len() {
                t.to.clone()
            } else {
                let s = fresh(&mut taken, format!("{}~{}.{}", t.from, i, j + 1));
                states.push(s.clone());
                s
            };
            let (read, effect) =
                if j == 0 { (t.read.clone(), rest.clone()) } else { (None, ValenceEffect::identity()) };
            let link = |pop: Option<String>, push: Vec<String>| PdaTransition {
                from: from.clone(),
                read: read.clone(),
                pop,
                push,
                to: to.clone(),
                effect: effect.clone(),
            };
            transitions.push(link(None, vec![letter_char(l).to_string()]));
            transitions.push(link(Some(letter_char(-l).to_string()), vec![]));
            from = to;
        }
    }
    Ok(ValencePda {
        alphabet: nfa.alphabet.clone(),
        stack_alphabet: ["a", "b", "A", "B"].iter().map(|s| s.to_string()).collect(),
        states,
        initial: nfa.initial.clone(),
        accept: nfa.accept.clone(),
        transitions,
    })
}

/// A polycyclic-monoid automaton whose effects each push one letter, pop one
/// letter or do nothing, as a free-group automaton over the letters plus a
/// padding generator `#`.
///
/// Every state `q` splits into `q+` and `q-` joined by an empty move. Pushes
/// and neutral moves go from `p+`; pops go from `p-`. A push of `x` becomes
/// `x#`, a pop of `x` becomes `x⁻¹#`, and each `q-` carries an empty loop
/// multiplying by `#⁻¹`. The initial state is the `+` copy, the accept
/// states the `-` copies. The letters are numbered in sorted order and `#`
/// comes last.
pub fn polycyclic_to_free(nfa: &ValenceNfa) -> Result<ValenceNfa, Error> {
    let mut letters = BTreeSet::new();
    for t in &nfa.transitions {
        require(t.effect.free.is_empty(), "the register already has a free-group component")?;
        match &t.effect.poly {
            PolycyclicElem::Elem { pop, push } if pop.len() + push.len() <= 1 => {
                letters.extend(pop.iter().chain(push).copied());
            }
            p => return Err(Error::Precondition(format!("effect {p} is not a single push, a single pop or 1"))),
        }
    }
    let letters: Vec<char> = letters.into_iter().collect();
    require(letters.len() < 26, "too many stack letters")?;
    let gen = |c: char| letters.iter().position(|&x| x == c).expect("collected") as i32 + 1;
    let hash = letters.len() as i32 + 1;
    let plus = |q: &str| format!("{q}+");
    let minus = |q: &str| format!("{q}-");
    let mut transitions = Vec::new();
    for t in &nfa.transitions {
        let PolycyclicElem::Elem { pop, push } = &t.effect.poly else { unreachable!("checked") };
        let rest = t.effect.clone().with_poly(PolycyclicElem::identity());
        let (from, word) = match (pop.first(), push.first()) {
            (None, Some(&x)) => (plus(&t.from), vec![gen(x), hash]),
            (Some(&x), None) => (minus(&t.from), vec![-gen(x), hash]),
            _ => (plus(&t.from), vec![]),
        };
        transitions.push(ValenceTransition {
            from,
            read: t.read.clone(),
            to: plus(&t.to),
            effect: ValenceEffect { free: FreeWord::from_letters(word), ..rest },
        });
    }
    for q in &nfa.states {
        transitions.push(ValenceTransition {
            from: plus(q),
            read: None,
            to: minus(q),
            effect: ValenceEffect::identity(),
        });
        transitions.push(ValenceTransition {
            from: minus(q),
            read: None,
            to: minus(q),
            effect: ValenceEffect::free(FreeWord::generator(-hash)),
        });
    }
    Ok(ValenceNfa {
        alphabet: nfa.alphabet.clone(),
        states: nfa.states.iter().flat_map(|q| [plus(q), minus(q)]).collect(),
        initial: plus(&nfa.initial),
        accept: nfa.accept.iter().map(|q| minus(q)).collect(),
        transitions,
    })
}

// ---- matrix groups to vector automata ----

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct StabilizerCheck {
    pub vector: RVector,
    pub radius: usize,
    /// ball elements examined
    pub checked: usize,
    pub passed: bool,
    /// a non-identity ball element fixing the vector
    pub violation: Option<RMatrix>,
    /// vectors tried before this one
    pub attempts: usize,
}

pub const DEFAULT_STABILIZER_RADIUS: usize = 4;
const SEARCH_ATTEMPTS: usize = 64;

fn generators_of(spec: &MachineSpec) -> Vec<RMatrix> {
    let used: BTreeSet<&str> = spec
        .transitions
        .iter()
        .filter_map(|t| match &t.effect {
            Effect::Matrix(n) => Some(n.as_str()),
            _ => None,
        })
        .collect();
    used.into_iter().map(|n| spec.matrices[n].clone()).filter(|m| !m.is_identity()).collect()
}

/// Whether `v·A ≠ v` for every non-identity `A` in the ball of radius
/// `radius` around the identity.
pub fn stabilizer_check(gens: &[RMatrix], v: &RVector, radius: usize) -> Result<StabilizerCheck, Error> {
    let set = GeneratorSet::new("G", gens.to_vec())?;
    let (_, ball) = growth_series(&set, radius, DEFAULT_BALL_CAP)?;
    let fixes = |a: &RMatrix| !a.is_identity() && v.mul_mat(a).ok().as_ref() == Some(v);
    // report a shortest violation, ties broken by text
    let mut violation = None;
    if ball.iter().any(fixes) {
        for r in 1..=radius {
            let (_, b) = growth_series(&set, r, DEFAULT_BALL_CAP)?;
            let mut at: Vec<&RMatrix> = b.iter().filter(|a| fixes(a)).collect();
            if !at.is_empty() {
                at.sort_by_key(|a| a.to_string());
                violation = Some(at[0].clone());
                break;
            }
        }
    }
    Ok(StabilizerCheck {
        vector: v.clone(),
        radius,
        checked: ball.len(),
        passed: violation.is_none(),
        violation,
        attempts: 0,
    })
}

/// Reads a matrix-group automaton as a homing vector automaton with initial
/// vector `v`. The vector is certified against the ball of radius `radius`;
/// without `v`, all ones and then small random integer vectors are tried.
pub fn efa_to_1nbhva(
    spec: &MachineSpec,
    v: Option<&RVector>,
    radius: usize,
) -> Result<(MachineSpec, StabilizerCheck), Error> {
    require(spec.kind == MachineKind::Efa, "expected a matrix-group automaton")?;
    let gens = generators_of(spec);
    for g in &gens {
        mat_inverse(g).map_err(|_| Error::Precondition(format!("matrix {g} is not invertible")))?;
    }
    let k = spec.dimension;
    let check = match v {
        Some(v) => {
            require(v.dim() == k, "vector dimension differs from the machine's")?;
            let c = stabilizer_check(&gens, v, radius)?;
            if let Some(a) = &c.violation {
                return Err(Error::Precondition(format!("the vector {v:?} is fixed by {a}")));
            }
            c
        }
        None => {
            let mut rng = StdRng::seed_from_u64(0);
            let mut cand = RVector::ones(k);
            let mut found = None;
            for attempt in 0..SEARCH_ATTEMPTS {
                let c = stabilizer_check(&gens, &cand, radius)?;
                if c.passed {
                    found = Some(StabilizerCheck { attempts: attempt, ..c });
                    break;
                }
                let xs: Vec<i64> = (0..k).map(|_| rng.gen_range(-5..=5)).collect();
                cand = RVector::from_ints(&xs);
            }
            found.ok_or_else(|| Error::Precondition("no vector passed the stabilizer check".into()))?
        }
    };
    let out = MachineSpec {
        kind: MachineKind::Hva,
        initial_vector: Some(check.vector.clone()),
        ..spec.clone()
    };
    Ok((out, check))
}

/// Two-state unary machines for decision problems over a matrix semigroup.
///
/// With `g`, the machine starts by multiplying `g⁻¹` and then multiplies one
/// generator per further symbol, so `aⁿ` is accepted iff `g` is a product of
/// `n - 1` generators. Without `g`, every symbol multiplies a generator and
/// `aⁿ` is accepted iff some product of `n ≥ 1` generators is the identity.
/// `epsilon_loops` adds empty self-loops with every generator on the accept
/// state, removing the length constraint.
pub fn build_decision_machines(
    generators: &[RMatrix],
    g: Option<&RMatrix>,
    epsilon_loops: bool,
) -> Result<MachineSpec, Error> {
    let dim = match (generators.first(), g) {
        (Some(m), _) | (None, Some(m)) => m.dim(),
        (None, None) => return Err(Error::Precondition("no generators".into())),
    };
    let mut matrices = BTreeMap::new();
    let mut transitions = Vec::new();
    for (i, h) in generators.iter().enumerate() {
        matrices.insert(format!("S{}", i + 1), h.clone());
    }
    match g {
        Some(g) => {
            let inv = mat_inverse(g).map_err(|_| Error::Precondition("g is singular".into()))?;
            matrices.insert("Ginv".into(), inv);
            transitions.push(Transition::sym("q1", "a", "q2").apply("Ginv"));
        }
        None => {
            for i in 1..=generators.len() {
                transitions.push(Transition::sym("q1", "a", "q2").apply(&format!("S{i}")));
            }
        }
    }
    for i in 1..=generators.len() {
        transitions.push(Transition::sym("q2", "a", "q2").apply(&format!("S{i}")));
        if epsilon_loops {
            transitions.push(Transition::eps("q2", "q2").apply(&format!("S{i}")));
        }
    }
    Ok(MachineSpec {
        kind: MachineKind::Efa,
        mode: Mode { deterministic: false, blind: true, realtime: !epsilon_loops, endmarker: false },
        dimension: dim,
        alphabet: vec!["a".into()],
        states: vec!["q1".into(), "q2".into()],
        initial_state: "q1".into(),
        accept_states: vec!["q2".into()],
        initial_vector: None,
        matrices,
        transitions,
    })
}

// ---- products ----

fn pair(p: &str, q: &str) -> String {
    format!("{p}|{q}")
}

/// Runs two blind real-time homing vector automata side by side with
/// block-diagonal matrices on the concatenated vector.
pub fn intersect_blind(a: &MachineSpec, b: &MachineSpec) -> Result<MachineSpec, Error> {
    for s in [a, b] {
        require(s.kind == MachineKind::Hva, "expected homing vector automata")?;
        require_blind(s)?;
        require(s.transitions.iter().all(|t| t.read != Read::Eps && t.mv == Move::Right), "expected real-time machines")?;
    }
    if a.alphabet != b.alphabet {
        return Err(Error::Precondition(format!("alphabets differ: {:?} vs {:?}", a.alphabet, b.alphabet)));
    }
    require(a.mode.endmarker == b.mode.endmarker, "one machine uses an end-marker and the other does not")?;
    let mut pool = Pool::default();
    let mut transitions = Vec::new();
    for s in &a.transitions {
        for t in b.transitions.iter().filter(|t| t.read == s.read) {
            let ma = a.effect_matrix(&s.effect).expect("validated");
            let mb = b.effect_matrix(&t.effect).expect("validated");
            let effect = pool.add(pair(&effect_name(&s.effect), &effect_name(&t.effect)), ma.direct_sum(&mb));
            transitions.push(Transition {
                from: pair(&s.from, &t.from),
                read: s.read.clone(),
                status: Status::Any,
                to: pair(&s.to, &t.to),
                effect,
                mv: Move::Right,
            });
        }
    }
    let va = a.initial_vector.clone().expect("homing vector automaton");
    let vb = b.initial_vector.clone().expect("homing vector automaton");
    Ok(trim(MachineSpec {
        kind: MachineKind::Hva,
        mode: Mode {
            deterministic: a.mode.deterministic && b.mode.deterministic,
            blind: true,
            realtime: true,
            endmarker: a.mode.endmarker,
        },
        dimension: a.dimension + b.dimension,
        alphabet: a.alphabet.clone(),
        states: a.states.iter().flat_map(|p| b.states.iter().map(move |q| pair(p, q))).collect(),
        initial_state: pair(&a.initial_state, &b.initial_state),
        accept_states: a.accept_states.iter().flat_map(|p| b.accept_states.iter().map(move |q| pair(p, q))).collect(),
        initial_vector: Some(va.concat(&vb)),
        matrices: pool.0,
        transitions,
    }))
}

/// Product of a machine with a complete finite automaton that advances
/// whenever the head moves right over a symbol.
pub fn intersect_with_regular(spec: &MachineSpec, dfa: &Dfa) -> Result<MachineSpec, Error> {
    dfa.check_complete()?;
    if spec.alphabet != dfa.alphabet {
        return Err(Error::Precondition(format!("alphabets differ: {:?} vs {:?}", spec.alphabet, dfa.alphabet)));
    }
    let sym = |s: &str| spec.alphabet.iter().position(|a| a == s).expect("validated");
    let st = |q: &str, i: usize| pair(q, &i.to_string());
    let mut transitions = Vec::new();
    for t in &spec.transitions {
        for i in 0..dfa.n_states {
            let j = match (&t.read, t.mv) {
                (Read::Sym(s), Move::Right) => dfa.step(i, sym(s)).expect("complete"),
                _ => i,
            };
            transitions.push(Transition { from: st(&t.from, i), to: st(&t.to, j), ..t.clone() });
        }
    }
    let mut accept_states = Vec::new();
    for q in &spec.accept_states {
        for i in (0..dfa.n_states).filter(|&i| dfa.accepting[i]) {
            accept_states.push(st(q, i));
        }
    }
    Ok(trim(MachineSpec {
        states: spec.states.iter().flat_map(|q| (0..dfa.n_states).map(move |i| st(q, i))).collect(),
        initial_state: st(&spec.initial_state, dfa.initial),
        accept_states,
        transitions,
        ..spec.clone()
    }))
}

/// A finite automaton whose only accept state is its initial state, as a
/// stateless homing vector automaton: the vector is the indicator of the
/// current state and each symbol's matrix is the zero-one transition matrix.
pub fn dfa_to_zero_dbhva(dfa: &Dfa) -> Result<MachineSpec, Error> {
    let acc: Vec<usize> = (0..dfa.n_states).filter(|&i| dfa.accepting[i]).collect();
    require(acc == [dfa.initial], "the initial state must be the only accept state")?;
    let n = dfa.n_states;
    let mut matrices = BTreeMap::new();
    let mut transitions = Vec::new();
    for (a, s) in dfa.alphabet.iter().enumerate() {
        let mut m = RMatrix::zero(n);
        for i in 0..n {
            if let Some(j) = dfa.step(i, a) {
                m.set(i, j, BigRational::one());
            }
        }
        let name = format!("A{s}");
        matrices.insert(name.clone(), m);
        transitions.push(Transition::sym("q", s, "q").apply(&name));
    }
    let mut v = vec![0; n];
    v[dfa.initial] = 1;
    Ok(MachineSpec {
        kind: MachineKind::Hva,
        mode: Mode { deterministic: true, blind: true, realtime: true, endmarker: false },
        dimension: n,
        alphabet: dfa.alphabet.clone(),
        states: vec!["q".into()],
        initial_state: "q".into(),
        accept_states: vec!["q".into()],
        initial_vector: Some(RVector::from_ints(&v)),
        matrices,
        transitions,
    })
}

// ---- stateless automata with multiplication ----

/// The stateless automaton with multiplication whose multiplier for symbol
/// `i` is `∏ p_j^{B[j][i]}`; it accepts `w` iff `B·t = 0` for the Parikh
/// vector `t` of `w`.
pub fn diophantine_to_zero_dfamw(b: &[Vec<i64>], alphabet: &[String]) -> Result<MachineSpec, Error> {
    let n = alphabet.len();
    require(b.iter().all(|row| row.len() == n), "every row of B needs one entry per symbol")?;
    let primes = first_primes(b.len());
    let transitions = alphabet
        .iter()
        .enumerate()
        .map(|(i, s)| {
            let col: Vec<i64> = b.iter().map(|row| row[i]).collect();
            Transition::sym("q", s, "q").multiply(prime_product(&primes, &col))
        })
        .collect();
    Ok(MachineSpec {
        kind: MachineKind::Fam,
        mode: Mode { deterministic: true, blind: true, realtime: true, endmarker: false },
        dimension: 1,
        alphabet: alphabet.to_vec(),
        states: vec!["q".into()],
        initial_state: "q".into(),
        accept_states: vec!["q".into()],
        initial_vector: None,
        matrices: BTreeMap::new(),
        transitions,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DiophantineSystem {
    /// row `j` holds the exponents of `primes[j]`
    pub primes: Vec<u64>,
    pub matrix: Vec<Vec<i64>>,
    pub alphabet: Vec<String>,
}

/// The exponent system of a stateless automaton with positive multipliers,
/// one row per prime occurring in some multiplier, in increasing order.
pub fn zero_dfamw_to_diophantine(spec: &MachineSpec) -> Result<DiophantineSystem, Error> {
    require(spec.is_stateless(), "the machine must be stateless")?;
    require(spec.dimension == 1, "expected a one-dimensional machine")?;
    let mut cols = Vec::new();
    for s in &spec.alphabet {
        let ts: Vec<&Transition> =
            spec.transitions.iter().filter(|t| t.read == Read::Sym(s.clone())).collect();
        require(ts.len() == 1, "every symbol needs exactly one transition")?;
        let m = multiplier(spec, &ts[0].effect)?;
        if !m.is_positive() {
            return Err(Error::Precondition(format!("multiplier {m} is not positive")));
        }
        cols.push(exponents(&m)?);
    }
    let primes: Vec<u64> = cols.iter().flat_map(|c| c.keys().copied()).collect::<BTreeSet<_>>().into_iter().collect();
    let matrix = primes.iter().map(|p| cols.iter().map(|c| c.get(p).copied().unwrap_or(0)).collect()).collect();
    Ok(DiophantineSystem { primes, matrix, alphabet: spec.alphabet.clone() })
}

/// Whether `B·t = 0` for the Parikh vector `t` of `w`.
pub fn solves(b: &[Vec<i64>], w: &[usize]) -> bool {
    b.iter().all(|row| w.iter().map(|&i| row[i]).sum::<i64>() == 0)
}

// ---- named dispatch ----

/// Names accepted by [`run_named`].
pub fn transform_names() -> Vec<&'static str> {
    vec![
        "kbca_to_bhva1",
        "bhva1_to_kbca",
        "kbca_to_bhva_k1",
        "normalize_counter_updates",
        "oneway_blind_det_to_realtime",
        "strip_endmarker_blind_nondet",
        "rational_to_integer_lift",
        "efa_to_1nbhva",
        "intersect_blind",
        "intersect_with_regular",
        "dfa_to_zero_dbhva",
        "diophantine_to_zero_dfamw",
        "zero_dfamw_to_diophantine",
        "f2_to_pda",
        "polycyclic_to_free",
        "vpda_to_vnfa",
        "vnfa_to_vpda",
    ]
}

/// Parameters beyond the input document.
#[derive(Clone, Debug)]
pub struct TransformOptions {
    pub max_len: usize,
    pub budget: Budget,
    pub jobs: usize,
    /// second machine, finite automaton, or exponent matrix, as JSON
    pub with: Option<String>,
    pub vector: Option<RVector>,
    pub radius: usize,
}

impl Default for TransformOptions {
    fn default() -> Self {
        TransformOptions {
            max_len: 8,
            budget: Budget::default(),
            jobs: 1,
            with: None,
            vector: None,
            radius: DEFAULT_STABILIZER_RADIUS,
        }
    }
}

#[derive(serde::Deserialize)]
struct SystemJson {
    matrix: Vec<Vec<i64>>,
    alphabet: Vec<String>,
}

fn parse<T: serde::de::DeserializeOwned>(text: &str) -> Result<T, Error> {
    serde_json::from_str(text).map_err(|e| Error::Json(e.to_string()))
}

/// Applies a transform by name to a JSON input and certifies the result.
pub fn run_named(name: &str, input: &str, opts: &TransformOptions) -> Result<TransformReport, Error> {
    let with = || opts.with.as_deref().ok_or_else(|| Error::Precondition(format!("{name} needs a second input")));
    let (max_len, budget, jobs) = (opts.max_len, opts.budget, opts.jobs);
    let report = |input: serde_json::Value, output: serde_json::Value, certificate, notes| TransformReport {
        transform: name.to_string(),
        input,
        output,
        certificate,
        notes,
    };
    let spec_to_spec = |f: &dyn Fn(&MachineSpec) -> Result<MachineSpec, Error>| -> Result<TransformReport, Error> {
        let a = MachineSpec::from_json(input)?;
        let b = f(&a)?;
        let c = certify_specs(&a, &b, max_len, budget, jobs)?;
        Ok(report(json(&a), json(&b), c, vec![]))
    };
    match name {
        "kbca_to_bhva1" => spec_to_spec(&kbca_to_bhva1),
        "bhva1_to_kbca" => spec_to_spec(&bhva1_to_kbca),
        "kbca_to_bhva_k1" => spec_to_spec(&kbca_to_bhva_k1),
        "normalize_counter_updates" => spec_to_spec(&normalize_counter_updates),
        "oneway_blind_det_to_realtime" => spec_to_spec(&oneway_blind_det_to_realtime),
        "strip_endmarker_blind_nondet" => spec_to_spec(&strip_endmarker_blind_nondet),
        "rational_to_integer_lift" => spec_to_spec(&rational_to_integer_lift),
        "efa_to_1nbhva" => {
            let a = MachineSpec::from_json(input)?;
            let (b, check) = efa_to_1nbhva(&a, opts.vector.as_ref(), opts.radius)?;
            let c = certify_specs(&a, &b, max_len, budget, jobs)?;
            let note = format!(
                "vector {:?} moved by every non-identity element of the radius-{} ball ({} elements); evidence, not proof",
                check.vector, check.radius, check.checked
            );
            Ok(report(json(&a), json(&b), c, vec![note]))
        }
        "intersect_blind" => {
            let a = MachineSpec::from_json(input)?;
            let b = MachineSpec::from_json(with()?)?;
            let out = intersect_blind(&a, &b)?;
            let (ca, cb, co) = (a.compile()?, b.compile()?, out.compile()?);
            let both = (a.alphabet.clone(), |w: &[usize]| {
                match (ca.run(w, &budget).outcome, cb.run(w, &budget).outcome) {
                    (Outcome::Accepted, Outcome::Accepted) => Outcome::Accepted,
                    (Outcome::BudgetExhausted, _) | (_, Outcome::BudgetExhausted) => Outcome::BudgetExhausted,
                    _ => Outcome::Rejected,
                }
            });
            let c = certify(&both, &MachineOracle { machine: &co, budget }, max_len, budget, jobs)?;
            Ok(report(json(&[&a, &b]), json(&out), c, vec![]))
        }
        "intersect_with_regular" => {
            let a = MachineSpec::from_json(input)?;
            let d: Dfa = parse(with()?)?;
            let out = intersect_with_regular(&a, &d)?;
            let (ca, co) = (a.compile()?, out.compile()?);
            let both = (a.alphabet.clone(), |w: &[usize]| match ca.run(w, &budget).outcome {
                Outcome::Accepted if d.accepts(w) => Outcome::Accepted,
                Outcome::BudgetExhausted => Outcome::BudgetExhausted,
                _ => Outcome::Rejected,
            });
            let c = certify(&both, &MachineOracle { machine: &co, budget }, max_len, budget, jobs)?;
            Ok(report(json(&a), json(&out), c, vec![]))
        }
        "dfa_to_zero_dbhva" => {
            let d: Dfa = parse(input)?;
            let out = dfa_to_zero_dbhva(&d)?;
            let co = out.compile()?;
            let dfa = (d.alphabet.clone(), |w: &[usize]| if d.accepts(w) { Outcome::Accepted } else { Outcome::Rejected });
            let c = certify(&dfa, &MachineOracle { machine: &co, budget }, max_len, budget, jobs)?;
            Ok(report(json(&d), json(&out), c, vec![]))
        }
        "diophantine_to_zero_dfamw" => {
            let s: SystemJson = parse(input)?;
            let out = diophantine_to_zero_dfamw(&s.matrix, &s.alphabet)?;
            let co = out.compile()?;
            let sys =
                (s.alphabet.clone(), |w: &[usize]| if solves(&s.matrix, w) { Outcome::Accepted } else { Outcome::Rejected });
            let c = certify(&sys, &MachineOracle { machine: &co, budget }, max_len, budget, jobs)?;
            Ok(report(serde_json::json!({"matrix": s.matrix, "alphabet": s.alphabet}), json(&out), c, vec![]))
        }
        "zero_dfamw_to_diophantine" => {
            let a = MachineSpec::from_json(input)?;
            let sys = zero_dfamw_to_diophantine(&a)?;
            let ca = a.compile()?;
            let m = sys.matrix.clone();
            let solved = (a.alphabet.clone(), move |w: &[usize]| if solves(&m, w) { Outcome::Accepted } else { Outcome::Rejected });
            let c = certify(&MachineOracle { machine: &ca, budget }, &solved, max_len, budget, jobs)?;
            Ok(report(json(&a), json(&sys), c, vec![]))
        }
        "f2_to_pda" | "vnfa_to_vpda" => {
            let a = ValenceNfa::from_json(input)?;
            let b = if name == "f2_to_pda" { f2_to_pda(&a)? } else { crate::valence::vnfa_to_vpda(&a)? };
            let (ca, cb) = (a.compile()?, b.compile()?);
            let c = certify(&ca.oracle(budget), &cb.oracle(budget), max_len, budget, jobs)?;
            Ok(report(json(&a), json(&b), c, vec![]))
        }
        "polycyclic_to_free" => {
            let a = ValenceNfa::from_json(input)?;
            let b = polycyclic_to_free(&a)?;
            let (ca, cb) = (a.compile()?, b.compile()?);
            let c = certify(&ca.oracle(budget), &cb.oracle(budget), max_len, budget, jobs)?;
            Ok(report(json(&a), json(&b), c, vec![]))
        }
        "vpda_to_vnfa" => {
            let a = ValencePda::from_json(input)?;
            let b = crate::valence::vpda_to_vnfa(&a)?;
            let (ca, cb) = (a.compile()?, b.compile()?);
            let c = certify(&ca.oracle(budget), &cb.oracle(budget), max_len, budget, jobs)?;
            Ok(report(json(&a), json(&b), c, vec![]))
        }
        _ => Err(Error::UnknownName(name.to_string())),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn primes_in_order() {
        assert_eq!(first_primes(6), vec![2, 3, 5, 7, 11, 13]);
    }

    #[test]
    fn factor_rationals() {
        let q: BigRational = "-12/35".parse().unwrap();
        let e = exponents(&q).unwrap();
        assert_eq!(e, BTreeMap::from([(2, 2), (3, 1), (5, -1), (7, -1)]));
        assert_eq!(prime_product(&[2, 3], &[-1, 2]), "9/2".parse().unwrap());
    }
}
