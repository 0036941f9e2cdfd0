//! Valence automata, valence pushdown automata and context-free valence
//! grammars.
//!
//! A valence effect is an element of a product monoid with up to five
//! components: `Z^k`, positive rationals under multiplication, a polycyclic
//! monoid, a matrix monoid and a free group. Absent components are the
//! identity. A computation or derivation is valid iff its product is the
//! identity; a polycyclic zero kills it.

use std::collections::{BTreeSet, HashMap, HashSet, VecDeque};

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use regmach_algebra::{BigRational, FreeWord, PolycyclicElem, RMatrix};

use crate::analysis::Oracle;
use crate::engine::{self, Automaton, Budget, Outcome, Register, RunVerdict, Step, TapeRead};
use crate::machine::{parse_word, Move, Status};
use crate::Error;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ValenceEffect {
    /// `Z^k` component with trailing zeros trimmed
    pub z: Vec<i64>,
    pub q: BigRational,
    pub poly: PolycyclicElem,
    /// `None` is the identity of any dimension
    pub matrix: Option<RMatrix>,
    pub free: FreeWord,
}

impl Default for ValenceEffect {
    fn default() -> Self {
        ValenceEffect::identity()
    }
}

impl ValenceEffect {
    pub fn identity() -> Self {
        ValenceEffect {
            z: Vec::new(),
            q: BigRational::one(),
            poly: PolycyclicElem::identity(),
            matrix: None,
            free: FreeWord::identity(),
        }
    }

    pub fn z(z: &[i64]) -> Self {
        ValenceEffect { z: z.to_vec(), ..Self::identity() }.normalized()
    }

    pub fn q(q: BigRational) -> Self {
        ValenceEffect { q, ..Self::identity() }
    }

    pub fn poly(p: PolycyclicElem) -> Self {
        ValenceEffect { poly: p, ..Self::identity() }
    }

    pub fn matrix(m: RMatrix) -> Self {
        ValenceEffect { matrix: Some(m), ..Self::identity() }.normalized()
    }

    pub fn free(f: FreeWord) -> Self {
        ValenceEffect { free: f, ..Self::identity() }
    }

    pub fn with_poly(mut self, p: PolycyclicElem) -> Self {
        self.poly = p;
        self
    }

    fn normalized(mut self) -> Self {
        while self.z.last() == Some(&0) {
            self.z.pop();
        }
        if self.matrix.as_ref().is_some_and(RMatrix::is_identity) {
            self.matrix = None;
        }
        self
    }

    pub fn is_identity(&self) -> bool {
        *self == Self::identity()
    }

    pub fn is_zero(&self) -> bool {
        self.poly.is_zero()
    }

    /// The componentwise product, or `None` when it is zero or undefined.
    pub fn mul(&self, other: &ValenceEffect) -> Option<ValenceEffect> {
        let poly = self.poly.mul(&other.poly);
        if poly.is_zero() {
            return None;
        }
        let (long, short) = if self.z.len() >= other.z.len() { (&self.z, &other.z) } else { (&other.z, &self.z) };
        let mut z = long.clone();
        for (x, y) in z.iter_mut().zip(short) {
            *x = x.checked_add(*y)?;
        }
        let matrix = match (&self.matrix, &other.matrix) {
            (None, m) | (m, None) => m.clone(),
            (Some(a), Some(b)) => Some(a.mul(b).ok()?),
        };
        Some(
            ValenceEffect { z, q: &self.q * &other.q, poly, matrix, free: self.free.mul(&other.free) }
                .normalized(),
        )
    }
}

impl Register for ValenceEffect {
    type Effect = ValenceEffect;

    fn apply(&self, e: &ValenceEffect) -> Option<ValenceEffect> {
        self.mul(e)
    }

    fn test(&self, home: &ValenceEffect, status: &Status) -> bool {
        match status {
            Status::Any => true,
            Status::Eq => self == home,
            Status::Neq => self != home,
            Status::Counters(_) => false,
        }
    }

    fn norm(&self) -> usize {
        let poly = match &self.poly {
            PolycyclicElem::Elem { pop, push } => pop.len() + push.len(),
            PolycyclicElem::Zero => 0,
        };
        self.free.len() + poly + self.z.iter().map(|x| x.unsigned_abs() as usize).sum::<usize>()
    }

    fn effect_norm(e: &ValenceEffect) -> usize {
        e.norm()
    }

    fn free_letters(e: &ValenceEffect) -> Option<Vec<i32>> {
        let only_free = e.z.is_empty() && e.q.is_one() && e.poly.is_identity() && e.matrix.is_none();
        only_free.then(|| e.free.letters().to_vec())
    }

    fn is_free_identity(&self) -> bool {
        self.is_identity()
    }
}

#[derive(Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields)]
struct EffectJson {
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    z: Vec<i64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    q: Option<BigRational>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    poly: Option<PolycyclicElem>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    matrix: Option<RMatrix>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    free: Option<FreeWord>,
}

impl Serialize for ValenceEffect {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        EffectJson {
            z: self.z.clone(),
            q: (!self.q.is_one()).then(|| self.q.clone()),
            poly: (!self.poly.is_identity()).then(|| self.poly.clone()),
            matrix: self.matrix.clone(),
            free: (!self.free.is_empty()).then(|| self.free.clone()),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for ValenceEffect {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let j = EffectJson::deserialize(d)?;
        if j.q.as_ref().is_some_and(|q| !q.is_positive()) {
            return Err(serde::de::Error::custom("the rational component must be positive"));
        }
        Ok(ValenceEffect {
            z: j.z,
            q: j.q.unwrap_or_else(BigRational::one),
            poly: j.poly.unwrap_or_else(PolycyclicElem::identity),
            matrix: j.matrix,
            free: j.free.unwrap_or_default(),
        }
        .normalized())
    }
}

fn check_matrix_dims<'a>(effects: impl Iterator<Item = &'a ValenceEffect>) -> Result<(), Error> {
    let dims: BTreeSet<usize> = effects.filter_map(|e| e.matrix.as_ref().map(RMatrix::dim)).collect();
    if dims.len() > 1 {
        return Err(Error::Precondition(format!("matrix components of different dimensions {dims:?}")));
    }
    Ok(())
}

fn index_of(names: &[String], s: &str, what: &str) -> Result<usize, Error> {
    names.iter().position(|x| x == s).ok_or_else(|| Error::Precondition(format!("unknown {what} {s:?}")))
}

fn read_of(alphabet: &[String], read: &Option<String>) -> Result<TapeRead, Error> {
    match read {
        None => Ok(TapeRead::Eps),
        Some(s) => alphabet
            .iter()
            .position(|a| a == s)
            .map(TapeRead::Sym)
            .ok_or_else(|| Error::UnknownSymbol(s.clone())),
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ValenceTransition {
    pub from: String,
    /// `None` for an empty move
    #[serde(default)]
    pub read: Option<String>,
    pub to: String,
    #[serde(default, skip_serializing_if = "ValenceEffect::is_identity")]
    pub effect: ValenceEffect,
}

/// A nondeterministic one-way automaton with valence effects.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ValenceNfa {
    pub alphabet: Vec<String>,
    pub states: Vec<String>,
    pub initial: String,
    pub accept: Vec<String>,
    pub transitions: Vec<ValenceTransition>,
}

impl ValenceNfa {
    pub fn compile(&self) -> Result<CompiledValence, Error> {
        check_matrix_dims(self.transitions.iter().map(|t| &t.effect))?;
        let mut steps = Vec::new();
        for t in &self.transitions {
            let read = read_of(&self.alphabet, &t.read)?;
            steps.push(Step {
                from: index_of(&self.states, &t.from, "state")?,
                read,
                status: Status::Any,
                to: index_of(&self.states, &t.to, "state")?,
                effect: t.effect.clone(),
                mv: if read == TapeRead::Eps { Move::Stay } else { Move::Right },
            });
        }
        let mut accepting = vec![false; self.states.len()];
        for a in &self.accept {
            accepting[index_of(&self.states, a, "state")?] = true;
        }
        let initial = index_of(&self.states, &self.initial, "state")?;
        Ok(CompiledValence {
            alphabet: self.alphabet.clone(),
            automaton: Automaton::new(
                self.states.len(),
                initial,
                accepting,
                steps,
                ValenceEffect::identity(),
                false,
                false,
            ),
        })
    }

    pub fn from_json(text: &str) -> Result<Self, Error> {
        serde_json::from_str(text).map_err(|e| Error::Json(e.to_string()))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("serialization cannot fail")
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PdaTransition {
    pub from: String,
    #[serde(default)]
    pub read: Option<String>,
    /// stack symbol that must be on top and is removed
    #[serde(default)]
    pub pop: Option<String>,
    /// pushed in order, so the last one ends on top
    #[serde(default)]
    pub push: Vec<String>,
    pub to: String,
    #[serde(default, skip_serializing_if = "ValenceEffect::is_identity")]
    pub effect: ValenceEffect,
}

/// A pushdown automaton with valence effects. It accepts in an accept state
/// with an empty stack and identity valence.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ValencePda {
    pub alphabet: Vec<String>,
    pub stack_alphabet: Vec<String>,
    pub states: Vec<String>,
    pub initial: String,
    pub accept: Vec<String>,
    pub transitions: Vec<PdaTransition>,
}

fn stack_char(i: usize) -> char {
    char::from_u32(0xE000 + i as u32).expect("stack alphabet fits the private use area")
}

impl ValencePda {
    /// Runs the stack inside a polycyclic component, one letter per stack
    /// symbol.
    pub fn compile(&self) -> Result<CompiledValence, Error> {
        if self.transitions.iter().any(|t| !t.effect.poly.is_identity()) {
            return Err(Error::Precondition("valences of a pushdown automaton cannot use the polycyclic component".into()));
        }
        let as_nfa = ValenceNfa {
            alphabet: self.alphabet.clone(),
            states: self.states.clone(),
            initial: self.initial.clone(),
            accept: self.accept.clone(),
            transitions: self
                .transitions
                .iter()
                .map(|t| {
                    let pop = match &t.pop {
                        Some(x) => vec![stack_char(index_of(&self.stack_alphabet, x, "stack symbol")?)],
                        None => Vec::new(),
                    };
                    let push = t
                        .push
                        .iter()
                        .map(|x| index_of(&self.stack_alphabet, x, "stack symbol").map(stack_char))
                        .collect::<Result<_, _>>()?;
                    Ok(ValenceTransition {
                        from: t.from.clone(),
                        read: t.read.clone(),
                        to: t.to.clone(),
                        effect: t.effect.clone().with_poly(PolycyclicElem::new(pop, push)),
                    })
                })
                .collect::<Result<_, Error>>()?,
        };
        as_nfa.compile()
    }

    pub fn from_json(text: &str) -> Result<Self, Error> {
        serde_json::from_str(text).map_err(|e| Error::Json(e.to_string()))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("serialization cannot fail")
    }
}

pub struct CompiledValence {
    pub alphabet: Vec<String>,
    pub automaton: Automaton<ValenceEffect>,
}

impl CompiledValence {
    pub fn run(&self, w: &[usize], budget: &Budget) -> RunVerdict {
        engine::run(&self.automaton, w, budget)
    }

    pub fn parse_input(&self, text: &str) -> Result<Vec<usize>, Error> {
        parse_word(&self.alphabet, text)
    }

    pub fn oracle(&self, budget: Budget) -> ValenceOracle<'_> {
        ValenceOracle { machine: self, budget }
    }
}

pub struct ValenceOracle<'a> {
    pub machine: &'a CompiledValence,
    pub budget: Budget,
}

impl Oracle for ValenceOracle<'_> {
    fn alphabet(&self) -> &[String] {
        &self.machine.alphabet
    }

    fn verdict(&self, w: &[usize]) -> Outcome {
        self.machine.run(w, &self.budget).outcome
    }
}

/// Either kind of valence machine.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ValenceMachine {
    Nfa(ValenceNfa),
    Pda(ValencePda),
}

impl ValenceMachine {
    pub fn compile(&self) -> Result<CompiledValence, Error> {
        match self {
            ValenceMachine::Nfa(m) => m.compile(),
            ValenceMachine::Pda(m) => m.compile(),
        }
    }

    /// A document with a `stack_alphabet` field is a pushdown automaton.
    pub fn from_json(text: &str) -> Result<Self, Error> {
        let v: serde_json::Value = serde_json::from_str(text).map_err(|e| Error::Json(e.to_string()))?;
        if v.get("stack_alphabet").is_some() {
            serde_json::from_value(v).map(ValenceMachine::Pda)
        } else {
            serde_json::from_value(v).map(ValenceMachine::Nfa)
        }
        .map_err(|e| Error::Json(e.to_string()))
    }

    pub fn to_json(&self) -> String {
        match self {
            ValenceMachine::Nfa(m) => m.to_json(),
            ValenceMachine::Pda(m) => m.to_json(),
        }
    }
}

/// Runs a valence machine on a textual input.
pub fn valence_run(m: &ValenceMachine, input: &str, budget: &Budget) -> Result<RunVerdict, Error> {
    let c = m.compile()?;
    let w = c.parse_input(input)?;
    Ok(c.run(&w, budget))
}

/// Code length for a stack alphabet of `n` symbols over the two letters of
/// `P₂`.
pub fn code_len(n: usize) -> usize {
    let mut l = 1;
    while (1usize << l) < n {
        l += 1;
    }
    l
}

/// The binary code of stack symbol `i`, most significant bit first, over
/// `'a'` (0) and `'b'` (1).
pub fn stack_code(i: usize, len: usize) -> Vec<char> {
    (0..len).rev().map(|b| if i >> b & 1 == 1 { 'b' } else { 'a' }).collect()
}

/// Replaces the stack by a `P₂` component: a transition popping `x` and
/// pushing `y₁…yₘ` gets the effect `(Q_x P_{y₁…yₘ}, m)` with stack symbols
/// written in fixed-length binary codes.
pub fn vpda_to_vnfa(pda: &ValencePda) -> Result<ValenceNfa, Error> {
    if pda.transitions.iter().any(|t| !t.effect.poly.is_identity()) {
        return Err(Error::Precondition("valences of a pushdown automaton cannot use the polycyclic component".into()));
    }
    let len = code_len(pda.stack_alphabet.len());
    let code = |x: &str| index_of(&pda.stack_alphabet, x, "stack symbol").map(|i| stack_code(i, len));
    let mut transitions = Vec::new();
    for t in &pda.transitions {
        let pop = match &t.pop {
            // pushed front to back, so popped back to front
            Some(x) => code(x)?.into_iter().rev().collect(),
            None => Vec::new(),
        };
        let mut push = Vec::new();
        for y in &t.push {
            push.extend(code(y)?);
        }
        transitions.push(ValenceTransition {
            from: t.from.clone(),
            read: t.read.clone(),
            to: t.to.clone(),
            effect: t.effect.clone().with_poly(PolycyclicElem::new(pop, push)),
        });
    }
    Ok(ValenceNfa {
        alphabet: pda.alphabet.clone(),
        states: pda.states.clone(),
        initial: pda.initial.clone(),
        accept: pda.accept.clone(),
        transitions,
    })
}

/// Turns the polycyclic component back into a stack. An effect popping `n`
/// letters and pushing `o` letters becomes a chain of `n + o` transitions
/// through fresh states, one stack operation each, with the input symbol and
/// the rest of the valence on the first link. Zero effects are dropped.
pub fn vnfa_to_vpda(nfa: &ValenceNfa) -> Result<ValencePda, Error> {
    let mut letters = BTreeSet::new();
    for t in &nfa.transitions {
        if let PolycyclicElem::Elem { pop, push } = &t.effect.poly {
            letters.extend(pop.iter().chain(push).copied());
        }
    }
    let stack_alphabet: Vec<String> = letters.iter().map(char::to_string).collect();
    let mut states = nfa.states.clone();
    let mut transitions = Vec::new();
    for (i, t) in nfa.transitions.iter().enumerate() {
        let PolycyclicElem::Elem { pop, push } = &t.effect.poly else { continue };
        let rest = t.effect.clone().with_poly(PolycyclicElem::identity());
        let mut ops: Vec<(Option<String>, Vec<String>)> = pop.iter().map(|x| (Some(x.to_string()), Vec::new())).collect();
        ops.extend(push.iter().map(|y| (None, vec![y.to_string()])));
        if ops.is_empty() {
            ops.push((None, Vec::new()));
        }
        let k = ops.len();
        let mut from = t.from.clone();
        for (j, (pop, push)) in ops.into_iter().enumerate() {
            let to = if j + 1 == k {
                t.to.clone()
            } else {
                let s = format!("{}~{}.{}", t.from, i, j + 1);
                states.push(s.clone());
                s
            };
            let first = j == 0;
            transitions.push(PdaTransition {
                from: std::mem::replace(&mut from, to.clone()),
                read: if first { t.read.clone() } else { None },
                pop,
                push,
                to,
                effect: if first { rest.clone() } else { ValenceEffect::identity() },
            });
        }
    }
    Ok(ValencePda {
        alphabet: nfa.alphabet.clone(),
        stack_alphabet,
        states,
        initial: nfa.initial.clone(),
        accept: nfa.accept.clone(),
        transitions,
    })
}

// ---- grammars ----

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GrammarRule {
    pub lhs: String,
    /// symbols separated by spaces, or written together when unambiguous;
    /// empty for ε
    #[serde(default)]
    pub rhs: String,
    #[serde(default, skip_serializing_if = "ValenceEffect::is_identity")]
    pub valence: ValenceEffect,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CFValenceGrammar {
    pub nonterminals: Vec<String>,
    pub terminals: Vec<String>,
    pub start: String,
    pub rules: Vec<GrammarRule>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
enum Sym {
    T(usize),
    N(usize),
}

/// Default number of expansions for [`cf_valence_derive`].
pub const DEFAULT_DERIVE_STEPS: usize = 1_000_000;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DeriveVerdict {
    pub outcome: Outcome,
    /// rule indices of a leftmost derivation
    pub derivation: Option<Vec<usize>>,
    pub expansions: usize,
}

struct CompiledGrammar {
    n_nonterminals: usize,
    start: usize,
    /// per nonterminal: (rule index, rhs, valence)
    rules: Vec<Vec<(usize, Vec<Sym>, ValenceEffect)>>,
}

impl CFValenceGrammar {
    pub fn from_json(text: &str) -> Result<Self, Error> {
        serde_json::from_str(text).map_err(|e| Error::Json(e.to_string()))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("serialization cannot fail")
    }

    fn split_rhs(&self, rhs: &str) -> Result<Vec<Sym>, Error> {
        let lookup = |s: &str| {
            if let Some(i) = self.nonterminals.iter().position(|x| x == s) {
                Some(Sym::N(i))
            } else {
                self.terminals.iter().position(|x| x == s).map(Sym::T)
            }
        };
        let unknown = || Error::Precondition(format!("cannot split right-hand side {rhs:?} into grammar symbols"));
        let rhs = rhs.trim();
        if rhs.is_empty() || rhs == "ε" {
            return Ok(Vec::new());
        }
        if rhs.contains(char::is_whitespace) {
            return rhs.split_whitespace().map(|s| lookup(s).ok_or_else(unknown)).collect();
        }
        // longest match
        let mut out = Vec::new();
        let mut rest = rhs;
        while !rest.is_empty() {
            let (len, sym) = self
                .nonterminals
                .iter()
                .chain(&self.terminals)
                .filter(|s| !s.is_empty() && rest.starts_with(s.as_str()))
                .map(|s| (s.len(), lookup(s).expect("symbol is listed")))
                .max_by_key(|&(l, _)| l)
                .ok_or_else(unknown)?;
            out.push(sym);
            rest = &rest[len..];
        }
        Ok(out)
    }

    fn compile(&self) -> Result<CompiledGrammar, Error> {
        let n: BTreeSet<&String> = self.nonterminals.iter().collect();
        if self.terminals.iter().any(|t| n.contains(t)) {
            return Err(Error::Precondition("terminals and nonterminals overlap".into()));
        }
        check_matrix_dims(self.rules.iter().map(|r| &r.valence))?;
        let start = index_of(&self.nonterminals, &self.start, "nonterminal")?;
        let mut rules = vec![Vec::new(); self.nonterminals.len()];
        for (i, r) in self.rules.iter().enumerate() {
            let lhs = index_of(&self.nonterminals, &r.lhs, "nonterminal")?;
            rules[lhs].push((i, self.split_rhs(&r.rhs)?, r.valence.clone()));
        }
        Ok(CompiledGrammar { n_nonterminals: self.nonterminals.len(), start, rules })
    }

    pub fn parse_input(&self, text: &str) -> Result<Vec<usize>, Error> {
        parse_word(&self.terminals, text)
    }
}

/// Breadth-first leftmost-derivation search for `w`.
///
/// Configurations are (matched prefix length, unmatched sentential suffix,
/// valence so far); terminals are matched against `w` as soon as they become
/// leftmost. A form is dropped when a terminal disagrees with `w`, when it
/// holds more terminals than `w` has left, or when its length exceeds
/// `|w| + 2·|N|`. `max_steps` bounds the number of rule applications.
pub fn cf_valence_derive(g: &CFValenceGrammar, w: &[usize], max_steps: usize) -> Result<DeriveVerdict, Error> {
    let cg = g.compile()?;
    let n = w.len();
    let max_form = n + 2 * cg.n_nonterminals;
    type Config = (usize, Vec<Sym>, ValenceEffect);
    let mut parents: Vec<(usize, usize)> = vec![(usize::MAX, usize::MAX)];
    let mut seen: HashSet<Config> = HashSet::new();
    let start: Config = (0, vec![Sym::N(cg.start)], ValenceEffect::identity());
    seen.insert(start.clone());
    let mut queue: VecDeque<(usize, Config)> = VecDeque::from([(0, start)]);
    let mut expansions = 0usize;
    let path_to = |parents: &[(usize, usize)], mut cur: usize| {
        let mut path = Vec::new();
        while cur != 0 {
            let (p, r) = parents[cur];
            path.push(r);
            cur = p;
        }
        path.reverse();
        path
    };
    while let Some((node, (pos, form, val))) = queue.pop_front() {
        let Some(&Sym::N(a)) = form.first() else { continue };
        for (ri, rhs, m) in &cg.rules[a] {
            if expansions >= max_steps {
                return Ok(DeriveVerdict { outcome: Outcome::BudgetExhausted, derivation: None, expansions });
            }
            expansions += 1;
            let Some(nv) = val.mul(m) else { continue };
            let mut np = pos;
            let mut k = 0;
            let mut next = rhs.iter().chain(&form[1..]).copied().peekable();
            let mut ok = true;
            while let Some(&Sym::T(t)) = next.peek() {
                if np < n && w[np] == t {
                    np += 1;
                    next.next();
                } else {
                    ok = false;
                    break;
                }
            }
            if !ok {
                continue;
            }
            let nf: Vec<Sym> = next.collect();
            for s in &nf {
                if let Sym::T(_) = s {
                    k += 1;
                }
            }
            if np + k > n || np + nf.len() > max_form {
                continue;
            }
            let id = parents.len();
            parents.push((node, *ri));
            if nf.is_empty() {
                if np == n && nv.is_identity() {
                    return Ok(DeriveVerdict {
                        outcome: Outcome::Accepted,
                        derivation: Some(path_to(&parents, id)),
                        expansions,
                    });
                }
                continue;
            }
            let c = (np, nf, nv);
            if seen.insert(c.clone()) {
                queue.push_back((id, c));
            }
        }
    }
    Ok(DeriveVerdict { outcome: Outcome::Rejected, derivation: None, expansions })
}

/// A grammar with a derivation budget, as a membership oracle.
pub struct GrammarOracle<'a> {
    pub grammar: &'a CFValenceGrammar,
    pub max_steps: usize,
}

impl Oracle for GrammarOracle<'_> {
    fn alphabet(&self) -> &[String] {
        &self.grammar.terminals
    }

    fn verdict(&self, w: &[usize]) -> Outcome {
        match cf_valence_derive(self.grammar, w, self.max_steps) {
            Ok(v) => v.outcome,
            Err(_) => Outcome::Rejected,
        }
    }
}

/// Replays a derivation, returning the derived terminal word and the
/// product of its valences, or `None` if a rule does not apply.
pub fn replay_derivation(g: &CFValenceGrammar, rules: &[usize]) -> Option<(Vec<usize>, ValenceEffect)> {
    let cg = g.compile().ok()?;
    let mut form = vec![Sym::N(cg.start)];
    let mut val = ValenceEffect::identity();
    let by_index: HashMap<usize, (usize, &Vec<Sym>, &ValenceEffect)> = cg
        .rules
        .iter()
        .enumerate()
        .flat_map(|(a, rs)| rs.iter().map(move |(i, rhs, m)| (*i, (a, rhs, m))))
        .collect();
    for &r in rules {
        let (a, rhs, m) = by_index.get(&r)?;
        let at = form.iter().position(|s| matches!(s, Sym::N(_)))?;
        if form[at] != Sym::N(*a) {
            return None;
        }
        form.splice(at..=at, rhs.iter().copied());
        val = val.mul(m)?;
    }
    form.into_iter()
        .map(|s| match s {
            Sym::T(t) => Some(t),
            Sym::N(_) => None,
        })
        .collect::<Option<Vec<_>>>()
        .map(|w| (w, val))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn codes_are_fixed_length_binary() {
        assert_eq!(code_len(1), 1);
        assert_eq!(code_len(2), 1);
        assert_eq!(code_len(3), 2);
        assert_eq!(code_len(5), 3);
        assert_eq!(stack_code(2, 3), vec!['a', 'b', 'a']);
    }

    #[test]
    fn effect_json_skips_identities() {
        let e = ValenceEffect::z(&[1, 0]);
        assert_eq!(serde_json::to_string(&e).unwrap(), r#"{"z":[1]}"#);
        let back: ValenceEffect = serde_json::from_str(r#"{"z":[1,0,0]}"#).unwrap();
        assert_eq!(back, e);
        assert_eq!(serde_json::to_string(&ValenceEffect::identity()).unwrap(), "{}");
    }

    #[test]
    fn zero_kills_the_product() {
        let e = ValenceEffect::poly(PolycyclicElem::push('a'));
        let f = ValenceEffect::poly(PolycyclicElem::pop('b'));
        assert!(e.mul(&f).is_none());
    }
}
