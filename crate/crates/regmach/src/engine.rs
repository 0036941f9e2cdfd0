//! Budgeted execution over exact registers.
//!
//! [`run`] explores configurations `(state, position, register)` breadth
//! first, so the first accepting configuration found has a shortest witness.
//! The step budget works as a time bound: a path longer than the budget is
//! never taken, and a verdict of `Rejected` means no accepting path within
//! that many steps exists. `BudgetExhausted` is reserved for running out of
//! configurations.
//!
//! Register-independent pruning uses the remaining distance to acceptance in
//! the graph of `(position, state)` pairs; a configuration that cannot reach
//! acceptance within the remaining steps is dropped.
//!
//! Registers that are free-group words with the identity as home are decided
//! without enumerating register values: a shortest path whose label reduces
//! to 1 is found over pairs of `(state, position)` nodes. The step bound
//! applies in the same way.
//!
//! Status tests are evaluated on the register before the transition's effect.

use std::collections::HashSet;
use std::hash::Hash;

use serde::Serialize;

use crate::machine::{Move, Status};

/// A register value together with the effects that act on it.
pub trait Register: Clone + Eq + Hash {
    type Effect: Clone + std::fmt::Debug;

    /// `None` when the product is undefined (a dead path).
    fn apply(&self, e: &Self::Effect) -> Option<Self>;

    /// Whether the register satisfies `status`, relative to the initial value.
    fn test(&self, home: &Self, status: &Status) -> bool;

    /// Smallest `k` with `self · e^k = home` when it has a closed form;
    /// `Some(None)` when no such `k` exists, `None` when unsupported.
    fn power_solve(&self, _e: &Self::Effect, _home: &Self) -> Option<Option<usize>> {
        None
    }

    /// A size with `norm(home) = 0` that one effect `e` lowers by at most
    /// `effect_norm(e)`; used to cut paths that cannot get home in time.
    fn norm(&self) -> usize {
        0
    }

    fn effect_norm(_e: &Self::Effect) -> usize {
        0
    }

    /// The effect as a word over free generators `±i`, when it lies in a
    /// free group. Searches where every effect has one and `home` is the
    /// identity are decided by balanced-path reachability instead of
    /// enumerating register values.
    fn free_letters(_e: &Self::Effect) -> Option<Vec<i32>> {
        None
    }

    fn is_free_identity(&self) -> bool {
        false
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum TapeRead {
    Eps,
    Sym(usize),
    End,
}

#[derive(Clone, Debug)]
pub struct Step<E> {
    pub from: usize,
    pub read: TapeRead,
    pub status: Status,
    pub to: usize,
    pub effect: E,
    pub mv: Move,
}

#[derive(Clone, Debug)]
pub struct Automaton<R: Register> {
    pub n_states: usize,
    pub initial: usize,
    pub accepting: Vec<bool>,
    pub steps: Vec<Step<R::Effect>>,
    pub home: R,
    pub endmarker: bool,
    /// Accept with the head on the end-marker rather than past it.
    pub accept_on_marker: bool,
    by_state: Vec<Vec<usize>>,
    max_effect_norm: usize,
    /// accepting states whose only transition is an unconditional empty
    /// self-loop
    tail: Vec<Option<usize>>,
}

impl<R: Register> Automaton<R> {
    pub fn new(
        n_states: usize,
        initial: usize,
        accepting: Vec<bool>,
        steps: Vec<Step<R::Effect>>,
        home: R,
        endmarker: bool,
        accept_on_marker: bool,
    ) -> Self {
        let mut by_state = vec![Vec::new(); n_states];
        for (i, s) in steps.iter().enumerate() {
            by_state[s.from].push(i);
        }
        let tail = (0..n_states)
            .map(|q| match by_state[q][..] {
                [i] if accepting[q]
                    && steps[i].to == q
                    && steps[i].read == TapeRead::Eps
                    && steps[i].status == Status::Any =>
                {
                    Some(i)
                }
                _ => None,
            })
            .collect();
        let max_effect_norm = steps.iter().map(|s| R::effect_norm(&s.effect)).max().unwrap_or(0);
        Automaton { n_states, initial, accepting, steps, home, endmarker, accept_on_marker, by_state, max_effect_norm, tail }
    }

    fn tape_len(&self, n: usize) -> usize {
        n + usize::from(self.endmarker)
    }

    fn accept_pos(&self, n: usize) -> usize {
        if self.accept_on_marker {
            n
        } else {
            self.tape_len(n)
        }
    }

    /// Position after firing step `s` at `pos`, if its read matches.
    fn advance(&self, s: &Step<R::Effect>, w: &[usize], pos: usize) -> Option<usize> {
        let matches = match s.read {
            TapeRead::Eps => return Some(pos),
            TapeRead::Sym(x) => pos < w.len() && w[pos] == x,
            TapeRead::End => self.endmarker && pos == w.len(),
        };
        if !matches {
            return None;
        }
        Some(if s.mv == Move::Right { pos + 1 } else { pos })
    }

    fn is_accepting(&self, state: usize, pos: usize, reg: &R, n: usize) -> bool {
        self.accepting[state] && pos == self.accept_pos(n) && *reg == self.home
    }

    /// Minimum number of steps from `(pos, state)` to an accepting pair,
    /// ignoring the register. `u32::MAX` marks pairs that cannot accept.
    fn distances(&self, w: &[usize]) -> Vec<u32> {
        let q = self.n_states;
        let len = self.tape_len(w.len());
        let target = self.accept_pos(w.len());
        let mut dist = vec![u32::MAX; (len + 1) * q];
        for pos in (0..=len).rev() {
            for s in 0..q {
                if pos == target && self.accepting[s] {
                    dist[pos * q + s] = 0;
                }
                for &i in &self.by_state[s] {
                    let st = &self.steps[i];
                    if let Some(np) = self.advance(st, w, pos) {
                        if np > pos {
                            let d = dist[np * q + st.to];
                            if d != u32::MAX && d + 1 < dist[pos * q + s] {
                                dist[pos * q + s] = d + 1;
                            }
                        }
                    }
                }
            }
            // stay moves: relax to a fixpoint within this position
            let mut changed = true;
            while changed {
                changed = false;
                for st in &self.steps {
                    if st.mv == Move::Stay && self.advance(st, w, pos) == Some(pos) {
                        let d = dist[pos * q + st.to];
                        if d != u32::MAX && d + 1 < dist[pos * q + st.from] {
                            dist[pos * q + st.from] = d + 1;
                            changed = true;
                        }
                    }
                }
            }
        }
        dist
    }
}

/// Step cap `c·n + d` for inputs of length `n`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct StepBound {
    pub per_symbol: usize,
    pub constant: usize,
}

impl StepBound {
    pub fn fixed(steps: usize) -> Self {
        StepBound { per_symbol: 0, constant: steps }
    }

    pub fn affine(per_symbol: usize, constant: usize) -> Self {
        StepBound { per_symbol, constant }
    }

    pub fn eval(&self, n: usize) -> usize {
        self.per_symbol.saturating_mul(n).saturating_add(self.constant)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Budget {
    pub max_steps: StepBound,
    pub max_configs: usize,
}

pub const DEFAULT_MAX_CONFIGS: usize = 1_000_000;

impl Default for Budget {
    /// `8·(n+2) + 64` steps and a million configurations.
    fn default() -> Self {
        Budget { max_steps: StepBound::affine(8, 80), max_configs: DEFAULT_MAX_CONFIGS }
    }
}

impl Budget {
    pub fn steps(max_steps: usize) -> Self {
        Budget { max_steps: StepBound::fixed(max_steps), ..Budget::default() }
    }

    pub fn with_configs(mut self, max_configs: usize) -> Self {
        self.max_configs = max_configs;
        self
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Outcome {
    Accepted,
    Rejected,
    BudgetExhausted,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RunVerdict {
    pub outcome: Outcome,
    /// transition indices of a shortest accepting path
    pub witness: Option<Vec<usize>>,
    pub explored: usize,
    /// Some path was cut by the step bound; a rejection is then relative to it.
    pub step_limited: bool,
}

impl RunVerdict {
    pub fn accepted(&self) -> bool {
        self.outcome == Outcome::Accepted
    }
}

fn verdict(outcome: Outcome, witness: Option<Vec<usize>>, explored: usize, step_limited: bool) -> RunVerdict {
    RunVerdict { outcome, witness, explored, step_limited }
}

/// Breadth-first search for an accepting computation.
///
/// A configuration entering a tail loop at the accepting position is resolved
/// in closed form when the register supports it; the search then continues
/// until no shorter witness can appear.
pub fn run<R: Register>(a: &Automaton<R>, w: &[usize], budget: &Budget) -> RunVerdict {
    let n = w.len();
    let q = a.n_states;
    let limit = budget.max_steps.eval(n);
    let dist = a.distances(w);
    let d0 = dist[a.initial];
    if d0 == u32::MAX {
        return verdict(Outcome::Rejected, None, 1, false);
    }
    if d0 as usize > limit {
        return verdict(Outcome::Rejected, None, 1, true);
    }
    if a.is_accepting(a.initial, 0, &a.home, n) {
        return verdict(Outcome::Accepted, Some(Vec::new()), 1, false);
    }
    if a.home.is_free_identity() && a.steps.iter().all(|s| s.status == Status::Any) {
        let words: Option<Vec<Vec<i32>>> = a.steps.iter().map(|s| R::free_letters(&s.effect)).collect();
        if let Some(words) = words {
            return run_free(a, w, &words, &dist, limit, budget.max_configs);
        }
    }

    // parent pointers: (parent node, transition)
    let mut parents: Vec<(u32, u32)> = vec![(u32::MAX, u32::MAX)];
    let path_to = |parents: &[(u32, u32)], mut cur: u32| {
        let mut path = Vec::new();
        while cur != 0 {
            let (p, t) = parents[cur as usize];
            path.push(t as usize);
            cur = p;
        }
        path.reverse();
        path
    };
    let mut seen: HashSet<(u32, u32, R)> = HashSet::new();
    seen.insert((a.initial as u32, 0, a.home.clone()));
    let mut frontier: Vec<(u32, usize, usize, R)> = vec![(0, a.initial, 0, a.home.clone())];
    let mut step_limited = false;
    let mut depth = 0usize;
    let mut best: Option<Vec<usize>> = None;
    let accept_pos = a.accept_pos(n);

    while !frontier.is_empty() {
        depth += 1;
        if best.as_ref().is_some_and(|b| b.len() <= depth) {
            break;
        }
        let mut next = Vec::new();
        for (node, state, pos, reg) in frontier {
            for &ti in &a.by_state[state] {
                let st = &a.steps[ti];
                let Some(np) = a.advance(st, w, pos) else { continue };
                let d = dist[np * q + st.to];
                if d == u32::MAX {
                    continue;
                }
                if depth + d as usize > limit {
                    step_limited = true;
                    continue;
                }
                if !reg.test(&a.home, &st.status) {
                    continue;
                }
                let Some(nr) = reg.apply(&st.effect) else { continue };
                if a.max_effect_norm > 0 && depth + nr.norm().div_ceil(a.max_effect_norm) > limit {
                    step_limited = true;
                    continue;
                }
                let key = (st.to as u32, np as u32, nr);
                if seen.contains(&key) {
                    continue;
                }
                if seen.len() >= budget.max_configs {
                    return verdict(Outcome::BudgetExhausted, None, seen.len(), step_limited);
                }
                let (_, _, nr) = &key;
                let id = parents.len() as u32;
                parents.push((node, ti as u32));
                if a.is_accepting(st.to, np, nr, n) {
                    return verdict(Outcome::Accepted, Some(path_to(&parents, id)), seen.len() + 1, step_limited);
                }
                if let (Some(lt), true) = (a.tail[st.to], np == accept_pos) {
                    if let Some(k) = nr.power_solve(&a.steps[lt].effect, &a.home) {
                        seen.insert(key);
                        let Some(k) = k else { continue };
                        if depth + k > limit {
                            step_limited = true;
                        } else if best.as_ref().is_none_or(|b| depth + k < b.len()) {
                            let mut path = path_to(&parents, id);
                            path.extend(std::iter::repeat_n(lt, k));
                            best = Some(path);
                        }
                        continue;
                    }
                }
                let nr = key.2.clone();
                seen.insert(key);
                next.push((id, st.to, np, nr));
            }
        }
        frontier = next;
    }
    match best {
        Some(path) => verdict(Outcome::Accepted, Some(path), seen.len(), step_limited),
        None => verdict(Outcome::Rejected, None, seen.len(), step_limited),
    }
}

/// Why a pair of nodes is joined by a path whose letters reduce to 1.
#[derive(Clone, Copy)]
enum Join {
    Refl,
    Edge(usize),
    Cat(usize),
    Wrap(usize, usize),
}

struct FreeEdge {
    from: usize,
    to: usize,
    letter: Option<i32>,
    /// the transition fired, on the first edge of its chain
    step: Option<usize>,
}

impl FreeEdge {
    fn weight(&self) -> u32 {
        u32::from(self.step.is_some())
    }
}

/// Shortest path from the initial configuration to an accepting one whose
/// label reduces to the identity, computed over pairs of (state, position)
/// nodes with the rules `S → ε | S S | ℓ S ℓ⁻¹`. Multi-letter effects are
/// spelled out through intermediate nodes.
fn run_free<R: Register>(
    a: &Automaton<R>,
    w: &[usize],
    words: &[Vec<i32>],
    dist: &[u32],
    limit: usize,
    max_pairs: usize,
) -> RunVerdict {
    use std::cmp::Reverse;
    use std::collections::{BinaryHeap, HashMap};

    let q = a.n_states;
    let len = a.tape_len(w.len());
    let mut n_nodes = (len + 1) * q;
    let mut edges: Vec<FreeEdge> = Vec::new();
    for pos in 0..=len {
        for (i, st) in a.steps.iter().enumerate() {
            let Some(np) = a.advance(st, w, pos) else { continue };
            if dist[pos * q + st.from] == u32::MAX || dist[np * q + st.to] == u32::MAX {
                continue;
            }
            let (from, to) = (pos * q + st.from, np * q + st.to);
            let word = &words[i];
            if word.is_empty() {
                edges.push(FreeEdge { from, to, letter: None, step: Some(i) });
                continue;
            }
            let mut cur = from;
            for (j, &l) in word.iter().enumerate() {
                let next = if j + 1 == word.len() {
                    to
                } else {
                    n_nodes += 1;
                    n_nodes - 1
                };
                edges.push(FreeEdge { from: cur, to: next, letter: Some(l), step: (j == 0).then_some(i) });
                cur = next;
            }
        }
    }
    let mut into: Vec<Vec<usize>> = vec![Vec::new(); n_nodes];
    let mut out_of: Vec<Vec<usize>> = vec![Vec::new(); n_nodes];
    for (i, e) in edges.iter().enumerate() {
        if e.letter.is_some() {
            into[e.to].push(i);
            out_of[e.from].push(i);
        }
    }

    let mut best: HashMap<(usize, usize), (u32, Join)> = HashMap::new();
    let mut done: HashMap<(usize, usize), u32> = HashMap::new();
    let mut right: Vec<Vec<usize>> = vec![Vec::new(); n_nodes];
    let mut left: Vec<Vec<usize>> = vec![Vec::new(); n_nodes];
    let mut heap = BinaryHeap::new();
    let mut limited = false;
    type Best = HashMap<(usize, usize), (u32, Join)>;
    type Heap = BinaryHeap<Reverse<(u32, usize, usize)>>;
    let mut offer = |best: &mut Best, heap: &mut Heap, u: usize, v: usize, d: u32, why: Join| {
        if d as usize > limit {
            limited = true;
            return;
        }
        if best.get(&(u, v)).is_none_or(|&(old, _)| d < old) {
            best.insert((u, v), (d, why));
            heap.push(Reverse((d, u, v)));
        }
    };
    for u in 0..n_nodes {
        offer(&mut best, &mut heap, u, u, 0, Join::Refl);
    }
    for (i, e) in edges.iter().enumerate() {
        if e.letter.is_none() {
            offer(&mut best, &mut heap, e.from, e.to, e.weight(), Join::Edge(i));
        }
    }
    let start = a.initial;
    let accept_pos = a.accept_pos(w.len());
    let targets: Vec<usize> = (0..q).filter(|&s| a.accepting[s]).map(|s| accept_pos * q + s).collect();
    let mut found = None;
    while let Some(Reverse((d, u, v))) = heap.pop() {
        if done.contains_key(&(u, v)) || best[&(u, v)].0 != d {
            continue;
        }
        done.insert((u, v), d);
        if done.len() > max_pairs {
            break;
        }
        if u == start && targets.contains(&v) {
            found = Some((u, v));
            break;
        }
        right[u].push(v);
        left[v].push(u);
        for &x in &right[v] {
            offer(&mut best, &mut heap, u, x, d + done[&(v, x)], Join::Cat(v));
        }
        for &x in &left[u] {
            offer(&mut best, &mut heap, x, v, done[&(x, u)] + d, Join::Cat(u));
        }
        for &e1 in &into[u] {
            let l = edges[e1].letter.expect("lettered");
            for &e2 in &out_of[v] {
                if edges[e2].letter == Some(-l) {
                    let dd = edges[e1].weight() + d + edges[e2].weight();
                    offer(&mut best, &mut heap, edges[e1].from, edges[e2].to, dd, Join::Wrap(e1, e2));
                }
            }
        }
    }
    let step_limited = limited;
    let Some((u, v)) = found else {
        let outcome = if done.len() > max_pairs { Outcome::BudgetExhausted } else { Outcome::Rejected };
        return verdict(outcome, None, done.len(), step_limited);
    };
    // unfold the derivation into transitions
    enum Task {
        Pair(usize, usize),
        Emit(usize),
    }
    let mut path = Vec::new();
    let mut todo = vec![Task::Pair(u, v)];
    while let Some(t) = todo.pop() {
        match t {
            Task::Emit(e) => path.extend(edges[e].step),
            Task::Pair(x, y) => match best[&(x, y)].1 {
                Join::Refl => {}
                Join::Edge(e) => path.extend(edges[e].step),
                Join::Cat(m) => {
                    todo.push(Task::Pair(m, y));
                    todo.push(Task::Pair(x, m));
                }
                Join::Wrap(e1, e2) => {
                    todo.push(Task::Emit(e2));
                    todo.push(Task::Pair(edges[e1].to, edges[e2].from));
                    todo.push(Task::Emit(e1));
                }
            },
        }
    }
    verdict(Outcome::Accepted, Some(path), done.len(), step_limited)
}

/// Follows the unique applicable transition at each step.
///
/// Accepts as soon as an accepting configuration is reached, rejects when no
/// transition applies or a configuration repeats, and stops at the step
/// bound. More than one applicable transition is reported as an error.
pub fn run_deterministic<R: Register>(a: &Automaton<R>, w: &[usize], budget: &Budget) -> Result<RunVerdict, usize> {
    let n = w.len();
    let limit = budget.max_steps.eval(n);
    let (mut state, mut pos, mut reg) = (a.initial, 0usize, a.home.clone());
    let mut seen: HashSet<(usize, usize, R)> = HashSet::new();
    let mut path = Vec::new();
    loop {
        if a.is_accepting(state, pos, &reg, n) {
            return Ok(verdict(Outcome::Accepted, Some(path), seen.len() + 1, false));
        }
        if !seen.insert((state, pos, reg.clone())) {
            return Ok(verdict(Outcome::Rejected, None, seen.len(), false));
        }
        if seen.len() > budget.max_configs {
            return Ok(verdict(Outcome::BudgetExhausted, None, seen.len(), false));
        }
        let mut chosen = None;
        for &ti in &a.by_state[state] {
            let st = &a.steps[ti];
            if let Some(np) = a.advance(st, w, pos) {
                if reg.test(&a.home, &st.status) {
                    if chosen.is_some() {
                        return Err(ti);
                    }
                    chosen = Some((ti, np));
                }
            }
        }
        let Some((ti, np)) = chosen else {
            return Ok(verdict(Outcome::Rejected, None, seen.len(), false));
        };
        if path.len() == limit {
            return Ok(verdict(Outcome::Rejected, None, seen.len(), true));
        }
        let st = &a.steps[ti];
        let Some(nr) = reg.apply(&st.effect) else {
            return Ok(verdict(Outcome::Rejected, None, seen.len(), false));
        };
        path.push(ti);
        state = st.to;
        pos = np;
        reg = nr;
    }
}

/// Replays a transition sequence and reports whether it ends accepting.
pub fn replay<R: Register>(a: &Automaton<R>, w: &[usize], path: &[usize]) -> bool {
    let (mut state, mut pos, mut reg) = (a.initial, 0usize, a.home.clone());
    for &ti in path {
        let Some(st) = a.steps.get(ti) else { return false };
        if st.from != state || !reg.test(&a.home, &st.status) {
            return false;
        }
        let Some(np) = a.advance(st, w, pos) else { return false };
        let Some(nr) = reg.apply(&st.effect) else { return false };
        state = st.to;
        pos = np;
        reg = nr;
    }
    a.is_accepting(state, pos, &reg, w.len())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum TimeMode {
    /// some accepting computation fits in the bound
    Weak,
    /// every computation halts within the bound
    Strong,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum TimeBound {
    Holds,
    Violated,
    Unknown,
}

impl TimeBound {
    pub fn holds(self) -> Option<bool> {
        match self {
            TimeBound::Holds => Some(true),
            TimeBound::Violated => Some(false),
            TimeBound::Unknown => None,
        }
    }
}

/// Checks the time bound `t(n) = c·n + d` on one input.
///
/// Weak: holds if `w` is accepted within `t(|w|)` steps, or if `w` is not
/// accepted at all under `fallback`. Strong: holds if no computation on `w`
/// takes more than `t(|w|)` steps.
pub fn check_time_bound<R: Register>(
    a: &Automaton<R>,
    w: &[usize],
    t: StepBound,
    mode: TimeMode,
    fallback: &Budget,
) -> TimeBound {
    let bound = t.eval(w.len());
    match mode {
        TimeMode::Weak => {
            let tight = Budget { max_steps: StepBound::fixed(bound), max_configs: fallback.max_configs };
            match run(a, w, &tight).outcome {
                Outcome::Accepted => return TimeBound::Holds,
                Outcome::BudgetExhausted => return TimeBound::Unknown,
                Outcome::Rejected => {}
            }
            let v = run(a, w, fallback);
            match v.outcome {
                Outcome::Accepted => TimeBound::Violated,
                Outcome::Rejected if !v.step_limited => TimeBound::Holds,
                _ => TimeBound::Unknown,
            }
        }
        TimeMode::Strong => {
            let mut layer: HashSet<(usize, usize, R)> = HashSet::from([(a.initial, 0, a.home.clone())]);
            let mut total = 1usize;
            for _ in 0..=bound {
                let mut next = HashSet::new();
                for (state, pos, reg) in &layer {
                    for &ti in &a.by_state[*state] {
                        let st = &a.steps[ti];
                        let Some(np) = a.advance(st, w, *pos) else { continue };
                        if !reg.test(&a.home, &st.status) {
                            continue;
                        }
                        let Some(nr) = reg.apply(&st.effect) else { continue };
                        next.insert((st.to, np, nr));
                    }
                }
                total += next.len();
                if total > fallback.max_configs {
                    return TimeBound::Unknown;
                }
                if next.is_empty() {
                    return TimeBound::Holds;
                }
                layer = next;
            }
            TimeBound::Violated
        }
    }
}
