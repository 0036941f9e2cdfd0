//! Declarative machine descriptions for matrix-group automata, homing
//! vector automata, counter automata and automata with multiplication.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::sync::Arc;

use regmach_algebra::{BigRational, RMatrix, RVector};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::engine::{self, Automaton, Budget, Register, RunVerdict, StepBound, TapeRead, TimeBound, TimeMode};
use crate::Error;

/// The reserved end-marker symbol.
pub const END_MARKER: &str = "$";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MachineKind {
    /// Register is a `k × k` matrix starting at the identity.
    Efa,
    /// Register is a `k`-vector starting at the initial vector.
    Hva,
    /// Register is `k` integer counters starting at zero.
    Counter,
    /// Register is a positive rational starting at 1.
    Fam,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Mode {
    pub deterministic: bool,
    pub blind: bool,
    pub realtime: bool,
    pub endmarker: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Read {
    Eps,
    Sym(String),
    End,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ZeroTest {
    Eq,
    Neq,
    Any,
}

/// Register condition checked before a transition fires.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Status {
    Any,
    /// register equals its initial value
    Eq,
    Neq,
    /// one zero test per counter
    Counters(Vec<ZeroTest>),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Move {
    Right,
    Stay,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Effect {
    Identity,
    /// name of an entry in [`MachineSpec::matrices`]
    Matrix(String),
    Delta(Vec<i64>),
    Scalar(BigRational),
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Transition {
    pub from: String,
    pub read: Read,
    pub status: Status,
    pub to: String,
    pub effect: Effect,
    pub mv: Move,
}

impl Transition {
    pub fn new(from: &str, read: Read, to: &str) -> Self {
        let mv = if read == Read::Eps { Move::Stay } else { Move::Right };
        Transition { from: from.into(), read, status: Status::Any, to: to.into(), effect: Effect::Identity, mv }
    }

    pub fn sym(from: &str, s: &str, to: &str) -> Self {
        Self::new(from, Read::Sym(s.into()), to)
    }

    pub fn eps(from: &str, to: &str) -> Self {
        Self::new(from, Read::Eps, to)
    }

    pub fn end(from: &str, to: &str) -> Self {
        Self::new(from, Read::End, to)
    }

    pub fn apply(mut self, matrix: &str) -> Self {
        self.effect = Effect::Matrix(matrix.into());
        self
    }

    pub fn delta(mut self, d: Vec<i64>) -> Self {
        self.effect = Effect::Delta(d);
        self
    }

    pub fn multiply(mut self, q: BigRational) -> Self {
        self.effect = Effect::Scalar(q);
        self
    }

    pub fn effect(mut self, e: Effect) -> Self {
        self.effect = e;
        self
    }

    pub fn status(mut self, s: Status) -> Self {
        self.status = s;
        self
    }

    pub fn stay(mut self) -> Self {
        self.mv = Move::Stay;
        self
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MachineSpec {
    pub kind: MachineKind,
    pub mode: Mode,
    pub dimension: usize,
    pub alphabet: Vec<String>,
    pub states: Vec<String>,
    pub initial_state: String,
    pub accept_states: Vec<String>,
    /// HVA only.
    pub initial_vector: Option<RVector>,
    pub matrices: BTreeMap<String, RMatrix>,
    pub transitions: Vec<Transition>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Rule {
    Determinism,
    Blindness,
    Realtime,
    Endmarker,
    Dimension,
    UnknownState,
    UnknownSymbol,
    UnknownMatrix,
    EffectKind,
    StatusShape,
    FamMultiplier,
    FamEndmarker,
    InitialVector,
    Alphabet,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Violation {
    pub rule: Rule,
    /// index into `transitions`, when the violation is local to one
    pub transition: Option<usize>,
    pub message: String,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_ok(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn has(&self, rule: Rule) -> bool {
        self.violations.iter().any(|v| v.rule == rule)
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_ok() {
            return write!(f, "ok");
        }
        for (i, v) in self.violations.iter().enumerate() {
            if i > 0 {
                write!(f, "; ")?;
            }
            match v.transition {
                Some(t) => write!(f, "transition {t}: {:?}: {}", v.rule, v.message)?,
                None => write!(f, "{:?}: {}", v.rule, v.message)?,
            }
        }
        Ok(())
    }
}

/// Componentwise zero test of a counter tuple.
pub fn counter_status(counters: &[i64]) -> Vec<ZeroTest> {
    counters.iter().map(|&c| if c == 0 { ZeroTest::Eq } else { ZeroTest::Neq }).collect()
}

fn reads_overlap(a: &Read, b: &Read) -> bool {
    a == b || *a == Read::Eps || *b == Read::Eps
}

fn statuses_overlap(a: &Status, b: &Status) -> bool {
    match (a, b) {
        (Status::Any, _) | (_, Status::Any) => true,
        (Status::Eq, Status::Neq) | (Status::Neq, Status::Eq) => false,
        (Status::Counters(x), Status::Counters(y)) => x.iter().zip(y).all(|(p, q)| {
            !matches!((p, q), (ZeroTest::Eq, ZeroTest::Neq) | (ZeroTest::Neq, ZeroTest::Eq))
        }),
        _ => true,
    }
}

impl MachineSpec {
    pub fn is_stateless(&self) -> bool {
        self.states.len() == 1 && self.accept_states.len() == 1 && self.accept_states[0] == self.initial_state
    }

    pub fn matrix(&self, name: &str) -> Option<&RMatrix> {
        self.matrices.get(name)
    }

    /// The matrix a transition multiplies by (identity for `Effect::Identity`).
    pub fn effect_matrix(&self, e: &Effect) -> Option<RMatrix> {
        match e {
            Effect::Identity => Some(RMatrix::identity(self.dimension)),
            Effect::Matrix(n) => self.matrices.get(n).cloned(),
            Effect::Scalar(q) if self.dimension == 1 => Some(RMatrix::diagonal(std::slice::from_ref(q))),
            _ => None,
        }
    }

    pub fn validate(&self) -> ValidationReport {
        let mut out = Vec::new();
        let mut v = |rule, transition, message: String| out.push(Violation { rule, transition, message });
        let states: BTreeSet<&str> = self.states.iter().map(String::as_str).collect();
        let alphabet: BTreeSet<&str> = self.alphabet.iter().map(String::as_str).collect();

        if states.len() != self.states.len() {
            v(Rule::UnknownState, None, "duplicate state names".into());
        }
        if alphabet.len() != self.alphabet.len() || alphabet.contains(END_MARKER) || alphabet.contains("") {
            v(Rule::Alphabet, None, "alphabet has duplicates, an empty symbol, or the end-marker".into());
        }
        if !states.contains(self.initial_state.as_str()) {
            v(Rule::UnknownState, None, format!("initial state {:?} is not declared", self.initial_state));
        }
        for a in &self.accept_states {
            if !states.contains(a.as_str()) {
                v(Rule::UnknownState, None, format!("accept state {a:?} is not declared"));
            }
        }
        if self.dimension == 0 && self.kind != MachineKind::Counter {
            v(Rule::Dimension, None, "dimension must be positive".into());
        }
        if self.kind == MachineKind::Fam && self.dimension != 1 {
            v(Rule::Dimension, None, "automata with multiplication have dimension 1".into());
        }
        match (&self.initial_vector, self.kind) {
            (Some(iv), MachineKind::Hva) if iv.dim() != self.dimension => {
                v(Rule::Dimension, None, format!("initial vector has dimension {}", iv.dim()))
            }
            (None, MachineKind::Hva) => v(Rule::InitialVector, None, "missing initial vector".into()),
            (Some(_), k) if k != MachineKind::Hva => {
                v(Rule::InitialVector, None, "only homing vector automata carry an initial vector".into())
            }
            _ => {}
        }
        for (name, m) in &self.matrices {
            if m.dim() != self.dimension {
                v(Rule::Dimension, None, format!("matrix {name} has dimension {}", m.dim()));
            }
        }

        for (i, t) in self.transitions.iter().enumerate() {
            let i = Some(i);
            for s in [&t.from, &t.to] {
                if !states.contains(s.as_str()) {
                    v(Rule::UnknownState, i, format!("state {s:?} is not declared"));
                }
            }
            match &t.read {
                Read::Sym(s) if !alphabet.contains(s.as_str()) => {
                    v(Rule::UnknownSymbol, i, format!("symbol {s:?} is not in the alphabet"))
                }
                Read::End if !self.mode.endmarker => {
                    v(Rule::Endmarker, i, "reads the end-marker without end-marker mode".into())
                }
                Read::Eps if t.mv == Move::Right => {
                    v(Rule::Realtime, i, "an empty read cannot move the head".into())
                }
                _ => {}
            }
            if self.mode.realtime && (t.read == Read::Eps || t.mv == Move::Stay) {
                v(Rule::Realtime, i, "real-time machines move right on every step".into());
            }
            if self.mode.blind && t.status != Status::Any {
                v(Rule::Blindness, i, "blind machines cannot test the register".into());
            }
            match (&t.status, self.kind) {
                (Status::Counters(ts), MachineKind::Counter) if ts.len() != self.dimension => {
                    v(Rule::StatusShape, i, format!("status has {} entries for {} counters", ts.len(), self.dimension))
                }
                (Status::Counters(_), k) if k != MachineKind::Counter => {
                    v(Rule::StatusShape, i, "tuple statuses are for counter machines".into())
                }
                (Status::Eq | Status::Neq, MachineKind::Counter) => {
                    v(Rule::StatusShape, i, "counter machines test each counter separately".into())
                }
                _ => {}
            }
            match (&t.effect, self.kind) {
                (Effect::Identity, _) => {}
                (Effect::Matrix(n), MachineKind::Efa | MachineKind::Hva) => {
                    if !self.matrices.contains_key(n) {
                        v(Rule::UnknownMatrix, i, format!("matrix {n:?} is not declared"));
                    }
                }
                (Effect::Delta(d), MachineKind::Counter) => {
                    if d.len() != self.dimension {
                        v(Rule::Dimension, i, format!("delta has {} entries for {} counters", d.len(), self.dimension));
                    }
                }
                (Effect::Scalar(q), MachineKind::Fam) => {
                    if !q.is_positive() {
                        v(Rule::FamMultiplier, i, format!("multiplier {q} is not positive"));
                    }
                }
                (e, k) => v(Rule::EffectKind, i, format!("effect {e:?} does not fit a {k:?} machine")),
            }
            if self.kind == MachineKind::Fam && t.read == Read::End {
                if self.accept_states.contains(&t.from) {
                    v(Rule::FamEndmarker, i, "end-marker transition out of an accept state".into());
                }
                if t.mv == Move::Right {
                    v(Rule::FamEndmarker, i, "the head of an automaton with multiplication stays on the end-marker".into());
                }
            }
        }

        if self.mode.deterministic {
            let mut by_state: HashMap<&str, Vec<usize>> = HashMap::new();
            for (i, t) in self.transitions.iter().enumerate() {
                by_state.entry(t.from.as_str()).or_default().push(i);
            }
            let mut keys: Vec<_> = by_state.keys().copied().collect();
            keys.sort_unstable();
            for k in keys {
                let ids = &by_state[k];
                for (x, &i) in ids.iter().enumerate() {
                    for &j in &ids[x + 1..] {
                        let (a, b) = (&self.transitions[i], &self.transitions[j]);
                        if reads_overlap(&a.read, &b.read) && statuses_overlap(&a.status, &b.status) {
                            v(Rule::Determinism, Some(j), format!("conflicts with transition {i} in state {k:?}"));
                        }
                    }
                }
            }
        }
        ValidationReport { violations: out }
    }

    /// Validates and lowers the description to the engine's indexed form.
    pub fn compile(&self) -> Result<CompiledMachine, Error> {
        let report = self.validate();
        if !report.is_ok() {
            return Err(Error::Invalid(report));
        }
        let state_ix: HashMap<&str, usize> = self.states.iter().enumerate().map(|(i, s)| (s.as_str(), i)).collect();
        let sym_ix: HashMap<&str, usize> = self.alphabet.iter().enumerate().map(|(i, s)| (s.as_str(), i)).collect();
        let matrices: HashMap<&str, Arc<RMatrix>> =
            self.matrices.iter().map(|(k, m)| (k.as_str(), Arc::new(m.clone()))).collect();
        let mut accepting = vec![false; self.states.len()];
        for a in &self.accept_states {
            accepting[state_ix[a.as_str()]] = true;
        }
        let steps = self
            .transitions
            .iter()
            .map(|t| crate::engine::Step {
                from: state_ix[t.from.as_str()],
                read: match &t.read {
                    Read::Eps => TapeRead::Eps,
                    Read::Sym(s) => TapeRead::Sym(sym_ix[s.as_str()]),
                    Read::End => TapeRead::End,
                },
                status: t.status.clone(),
                to: state_ix[t.to.as_str()],
                effect: match &t.effect {
                    Effect::Identity => RegEffect::Identity,
                    Effect::Matrix(n) => {
                        let m = &matrices[n.as_str()];
                        if m.is_identity() {
                            RegEffect::Identity
                        } else {
                            RegEffect::Matrix(m.clone())
                        }
                    }
                    Effect::Delta(d) => RegEffect::Delta(d.clone()),
                    Effect::Scalar(q) => RegEffect::Scalar(q.clone()),
                },
                mv: if t.read == Read::Eps { Move::Stay } else { t.mv },
            })
            .collect();
        let home = match self.kind {
            MachineKind::Efa => Reg::Matrix(RMatrix::identity(self.dimension)),
            MachineKind::Hva => Reg::Vector(self.initial_vector.clone().expect("validated")),
            MachineKind::Counter => Reg::Counters(vec![0; self.dimension]),
            MachineKind::Fam => Reg::Scalar(BigRational::one()),
        };
        let automaton = Automaton::new(
            self.states.len(),
            state_ix[self.initial_state.as_str()],
            accepting,
            steps,
            home,
            self.mode.endmarker,
            self.kind == MachineKind::Fam,
        );
        Ok(CompiledMachine { alphabet: self.alphabet.clone(), automaton })
    }

    /// Splits an input string into symbol indices; see [`parse_word`].
    pub fn parse_input(&self, text: &str) -> Result<Vec<usize>, Error> {
        parse_word(&self.alphabet, text)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("machine serialization cannot fail")
    }

    pub fn to_json_pretty(&self) -> String {
        serde_json::to_string_pretty(self).expect("machine serialization cannot fail")
    }

    pub fn from_json(s: &str) -> Result<Self, Error> {
        serde_json::from_str(s).map_err(|e| Error::Json(e.to_string()))
    }
}

/// Splits `text` into alphabet indices. Comma-separated when it contains a
/// comma; otherwise one symbol per character, which requires all symbols to
/// be single characters (or `text` to be exactly one symbol).
pub fn parse_word(alphabet: &[String], text: &str) -> Result<Vec<usize>, Error> {
    let find = |s: &str| {
        alphabet.iter().position(|a| a == s).ok_or_else(|| Error::UnknownSymbol(s.to_string()))
    };
    let text = text.trim();
    if text.is_empty() || text == "ε" {
        return Ok(Vec::new());
    }
    if text.contains(',') {
        return text.split(',').map(|s| find(s.trim())).collect();
    }
    if let Ok(i) = find(text) {
        if alphabet.iter().any(|a| a.chars().count() > 1) {
            return Ok(vec![i]);
        }
    }
    if alphabet.iter().all(|a| a.chars().count() == 1) {
        return text.chars().map(|c| find(&c.to_string())).collect();
    }
    Err(Error::AmbiguousInput(text.to_string()))
}

/// Inverse of [`parse_word`]: concatenated when all symbols are single
/// characters, comma-separated otherwise.
pub fn format_word(alphabet: &[String], w: &[usize]) -> String {
    let sep = if alphabet.iter().all(|a| a.chars().count() == 1) { "" } else { "," };
    w.iter().map(|&i| alphabet[i].as_str()).collect::<Vec<_>>().join(sep)
}

/// Registers of the four machine kinds.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Reg {
    Matrix(RMatrix),
    Vector(RVector),
    Counters(Vec<i64>),
    Scalar(BigRational),
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum RegEffect {
    Identity,
    Matrix(Arc<RMatrix>),
    Delta(Vec<i64>),
    Scalar(BigRational),
}

impl Register for Reg {
    type Effect = RegEffect;

    fn apply(&self, e: &RegEffect) -> Option<Reg> {
        Some(match (self, e) {
            (r, RegEffect::Identity) => r.clone(),
            (Reg::Matrix(m), RegEffect::Matrix(a)) => Reg::Matrix(m.mul(a).ok()?),
            (Reg::Vector(v), RegEffect::Matrix(a)) => Reg::Vector(v.mul_mat(a).ok()?),
            (Reg::Counters(c), RegEffect::Delta(d)) => {
                let mut out = Vec::with_capacity(c.len());
                for (x, y) in c.iter().zip(d) {
                    out.push(x.checked_add(*y)?);
                }
                Reg::Counters(out)
            }
            (Reg::Scalar(x), RegEffect::Scalar(q)) => Reg::Scalar(x * q),
            (Reg::Vector(v), RegEffect::Scalar(q)) if v.dim() == 1 => {
                Reg::Vector(RVector::new(vec![v.get(0) * q]).ok()?)
            }
            _ => return None,
        })
    }

    fn test(&self, home: &Reg, status: &Status) -> bool {
        match status {
            Status::Any => true,
            Status::Eq => self == home,
            Status::Neq => self != home,
            Status::Counters(tests) => match self {
                Reg::Counters(c) => c.iter().zip(tests).all(|(&x, t)| match t {
                    ZeroTest::Any => true,
                    ZeroTest::Eq => x == 0,
                    ZeroTest::Neq => x != 0,
                }),
                _ => false,
            },
        }
    }

    fn power_solve(&self, e: &RegEffect, home: &Reg) -> Option<Option<usize>> {
        let eqs: Vec<(&BigRational, &BigRational, BigRational)> = match (self, e, home) {
            (Reg::Matrix(r), RegEffect::Matrix(m), Reg::Matrix(h)) => {
                let d = diagonal_of(m)?;
                let n = r.dim();
                (0..n * n).map(|i| (r.get(i / n, i % n), d[i % n], h.get(i / n, i % n).clone())).collect()
            }
            (Reg::Vector(v), RegEffect::Matrix(m), Reg::Vector(h)) => {
                let d = diagonal_of(m)?;
                (0..v.dim()).map(|i| (v.get(i), d[i], h.get(i).clone())).collect()
            }
            (Reg::Scalar(x), RegEffect::Scalar(q), Reg::Scalar(h)) => vec![(x, q, h.clone())],
            (Reg::Counters(c), RegEffect::Delta(d), Reg::Counters(h)) => return Some(counter_power(c, d, h)),
            _ => return None,
        };
        Some(solve_powers(&eqs))
    }
}

fn diagonal_of(m: &RMatrix) -> Option<Vec<&BigRational>> {
    let n = m.dim();
    for i in 0..n {
        for j in 0..n {
            if i != j && !m.get(i, j).is_zero() {
                return None;
            }
        }
    }
    Some((0..n).map(|i| m.get(i, i)).collect())
}

/// Smallest `k` with `a·d^k = b` for every `(a, d, b)`.
fn solve_powers(eqs: &[(&BigRational, &BigRational, BigRational)]) -> Option<usize> {
    let holds = |k: usize| eqs.iter().all(|&(a, d, ref b)| &(a * &pow_u(d, k)) == b);
    // an equation with |d| ∉ {0, 1} and a, b ≠ 0 pins k down
    for &(a, d, ref b) in eqs {
        let ad = d.abs();
        if ad.is_zero() || ad.is_one() || a.is_zero() || b.is_zero() {
            continue;
        }
        let mut target = (b / a).abs();
        let mut base = ad;
        if base < BigRational::one() {
            base = base.recip().ok()?;
            target = target.recip().ok()?;
        }
        return exact_log(&base, &target).filter(|&k| holds(k));
    }
    // the rest are periodic in k from k = 1 with period 2
    (0..3).find(|&k| holds(k))
}

/// `k` with `base^k = target`, for `base > 1`.
fn exact_log(base: &BigRational, target: &BigRational) -> Option<usize> {
    if target < &BigRational::one() {
        return None;
    }
    let mut hi = 1;
    while &pow_u(base, hi) < target {
        hi *= 2;
    }
    let mut lo = hi / 2;
    // pow(lo) < target <= pow(hi), except lo = 0
    while hi - lo > 1 {
        let mid = (lo + hi) / 2;
        if &pow_u(base, mid) < target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    [lo, hi].into_iter().find(|&k| &pow_u(base, k) == target)
}

fn pow_u(d: &BigRational, mut k: usize) -> BigRational {
    let mut base = d.clone();
    let mut acc = BigRational::one();
    while k > 0 {
        if k & 1 == 1 {
            acc = &acc * &base;
        }
        k >>= 1;
        if k > 0 {
            base = &base * &base;
        }
    }
    acc
}

/// Smallest `k` with `c + k·d = h`.
fn counter_power(c: &[i64], d: &[i64], h: &[i64]) -> Option<usize> {
    let mut k: Option<i64> = None;
    for ((&c, &d), &h) in c.iter().zip(d).zip(h) {
        let gap = h - c;
        if d == 0 {
            if gap != 0 {
                return None;
            }
        } else if gap % d != 0 || gap / d < 0 || k.is_some_and(|k| k != gap / d) {
            return None;
        } else {
            k = Some(gap / d);
        }
    }
    Some(k.unwrap_or(0) as usize)
}

/// A validated machine ready to run.
#[derive(Clone, Debug)]
pub struct CompiledMachine {
    pub alphabet: Vec<String>,
    pub automaton: Automaton<Reg>,
}

impl CompiledMachine {
    pub fn run(&self, w: &[usize], budget: &Budget) -> RunVerdict {
        engine::run(&self.automaton, w, budget)
    }

    /// Single-path execution; errors if the machine branches on `w`.
    pub fn run_deterministic(&self, w: &[usize], budget: &Budget) -> Result<RunVerdict, Error> {
        engine::run_deterministic(&self.automaton, w, budget).map_err(Error::Nondeterministic)
    }

    pub fn check_time_bound(&self, w: &[usize], t: StepBound, mode: TimeMode, fallback: &Budget) -> TimeBound {
        engine::check_time_bound(&self.automaton, w, t, mode, fallback)
    }

    pub fn replay(&self, w: &[usize], path: &[usize]) -> bool {
        engine::replay(&self.automaton, w, path)
    }

    pub fn parse_input(&self, text: &str) -> Result<Vec<usize>, Error> {
        parse_word(&self.alphabet, text)
    }
}

// ---- JSON ----

impl Serialize for Read {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            Read::Eps => s.serialize_none(),
            Read::Sym(x) => s.serialize_str(x),
            Read::End => s.serialize_str(END_MARKER),
        }
    }
}

impl<'de> Deserialize<'de> for Read {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        Ok(match Option::<String>::deserialize(d)? {
            None => Read::Eps,
            Some(s) if s == END_MARKER => Read::End,
            Some(s) => Read::Sym(s),
        })
    }
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum StatusJson {
    One(ZeroTest),
    Many(Vec<ZeroTest>),
}

impl Serialize for Status {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            Status::Any => ZeroTest::Any.serialize(s),
            Status::Eq => ZeroTest::Eq.serialize(s),
            Status::Neq => ZeroTest::Neq.serialize(s),
            Status::Counters(ts) => ts.serialize(s),
        }
    }
}

impl<'de> Deserialize<'de> for Status {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        Ok(match StatusJson::deserialize(d)? {
            StatusJson::One(ZeroTest::Any) => Status::Any,
            StatusJson::One(ZeroTest::Eq) => Status::Eq,
            StatusJson::One(ZeroTest::Neq) => Status::Neq,
            StatusJson::Many(ts) if ts.iter().all(|t| *t == ZeroTest::Any) => Status::Any,
            StatusJson::Many(ts) => Status::Counters(ts),
        })
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct TransitionJson {
    from: String,
    read: Read,
    #[serde(default = "any_status")]
    status: Status,
    to: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    apply: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    delta: Option<Vec<i64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    multiply: Option<BigRational>,
    #[serde(rename = "move", default, skip_serializing_if = "Option::is_none")]
    mv: Option<Move>,
}

fn any_status() -> Status {
    Status::Any
}

impl Serialize for Transition {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let (apply, delta, multiply) = match &self.effect {
            Effect::Identity => (None, None, None),
            Effect::Matrix(n) => (Some(n.clone()), None, None),
            Effect::Delta(d) => (None, Some(d.clone()), None),
            Effect::Scalar(q) => (None, None, Some(q.clone())),
        };
        TransitionJson {
            from: self.from.clone(),
            read: self.read.clone(),
            status: self.status.clone(),
            to: self.to.clone(),
            apply,
            delta,
            multiply,
            mv: Some(self.mv),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for Transition {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let t = TransitionJson::deserialize(d)?;
        let effect = match (t.apply, t.delta, t.multiply) {
            (None, None, None) => Effect::Identity,
            (Some(n), None, None) => Effect::Matrix(n),
            (None, Some(d), None) => Effect::Delta(d),
            (None, None, Some(q)) => Effect::Scalar(q),
            _ => return Err(serde::de::Error::custom("a transition has at most one of apply, delta, multiply")),
        };
        let mv = t.mv.unwrap_or(if t.read == Read::Eps { Move::Stay } else { Move::Right });
        Ok(Transition { from: t.from, read: t.read, status: t.status, to: t.to, effect, mv })
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct SpecJson {
    kind: MachineKind,
    mode: Mode,
    dimension: usize,
    alphabet: Vec<String>,
    states: Vec<String>,
    initial_state: String,
    accept_states: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    initial_vector: Option<RVector>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    matrices: BTreeMap<String, RMatrix>,
    transitions: Vec<Transition>,
}

impl Serialize for MachineSpec {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        SpecJson {
            kind: self.kind,
            mode: self.mode,
            dimension: self.dimension,
            alphabet: self.alphabet.clone(),
            states: self.states.clone(),
            initial_state: self.initial_state.clone(),
            accept_states: self.accept_states.clone(),
            initial_vector: self.initial_vector.clone(),
            matrices: self.matrices.clone(),
            transitions: self.transitions.clone(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for MachineSpec {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let j = SpecJson::deserialize(d)?;
        Ok(MachineSpec {
            kind: j.kind,
            mode: j.mode,
            dimension: j.dimension,
            alphabet: j.alphabet,
            states: j.states,
            initial_state: j.initial_state,
            accept_states: j.accept_states,
            initial_vector: j.initial_vector,
            matrices: j.matrices,
            transitions: j.transitions,
        })
    }
}
