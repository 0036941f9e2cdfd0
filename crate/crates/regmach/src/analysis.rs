//! Brute-force language tooling over `Σ^{≤n}`.

use std::fmt;
use std::sync::Arc;

use rayon::prelude::*;
use serde::Serialize;

use crate::engine::{Budget, Outcome};
use crate::machine::{format_word, parse_word, CompiledMachine};
use crate::Error;

/// An executable membership test.
#[derive(Clone)]
pub struct LanguagePredicate {
    pub name: String,
    pub alphabet: Vec<String>,
    test: Arc<dyn Fn(&[usize]) -> bool + Send + Sync>,
}

impl LanguagePredicate {
    pub fn new(name: &str, alphabet: &[&str], test: impl Fn(&[usize]) -> bool + Send + Sync + 'static) -> Self {
        LanguagePredicate {
            name: name.to_string(),
            alphabet: alphabet.iter().map(|s| s.to_string()).collect(),
            test: Arc::new(test),
        }
    }

    pub fn with_alphabet(name: &str, alphabet: Vec<String>, test: impl Fn(&[usize]) -> bool + Send + Sync + 'static) -> Self {
        LanguagePredicate { name: name.to_string(), alphabet, test: Arc::new(test) }
    }

    pub fn contains(&self, w: &[usize]) -> bool {
        (self.test)(w)
    }

    pub fn contains_text(&self, s: &str) -> Result<bool, Error> {
        Ok(self.contains(&parse_word(&self.alphabet, s)?))
    }
}

impl fmt::Debug for LanguagePredicate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "LanguagePredicate({})", self.name)
    }
}

/// Anything that answers membership queries, possibly with "unknown".
pub trait Oracle: Sync {
    fn alphabet(&self) -> &[String];
    fn verdict(&self, w: &[usize]) -> Outcome;
}

impl Oracle for LanguagePredicate {
    fn alphabet(&self) -> &[String] {
        &self.alphabet
    }

    fn verdict(&self, w: &[usize]) -> Outcome {
        if self.contains(w) {
            Outcome::Accepted
        } else {
            Outcome::Rejected
        }
    }
}

/// A compiled machine paired with the budget it runs under.
pub struct MachineOracle<'a> {
    pub machine: &'a CompiledMachine,
    pub budget: Budget,
}

impl Oracle for MachineOracle<'_> {
    fn alphabet(&self) -> &[String] {
        &self.machine.alphabet
    }

    fn verdict(&self, w: &[usize]) -> Outcome {
        self.machine.run(w, &self.budget).outcome
    }
}

impl<F: Fn(&[usize]) -> Outcome + Sync> Oracle for (Vec<String>, F) {
    fn alphabet(&self) -> &[String] {
        &self.0
    }

    fn verdict(&self, w: &[usize]) -> Outcome {
        (self.1)(w)
    }
}

/// All words over `k` symbols of length at most `max_len`, in shortlex order.
pub fn words(k: usize, max_len: usize) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::new()];
    let mut layer = vec![Vec::new()];
    for _ in 0..max_len {
        if k == 0 {
            break;
        }
        let mut next = Vec::with_capacity(layer.len() * k);
        for w in &layer {
            for a in 0..k {
                let mut x = w.clone();
                x.push(a);
                next.push(x);
            }
        }
        out.extend(next.iter().cloned());
        layer = next;
    }
    out
}

/// Evaluates `o` on every word, on `jobs` threads.
pub fn verdicts(o: &dyn Oracle, ws: &[Vec<usize>], jobs: usize) -> Vec<Outcome> {
    if jobs <= 1 {
        return ws.iter().map(|w| o.verdict(w)).collect();
    }
    let pool = rayon::ThreadPoolBuilder::new().num_threads(jobs).build().expect("thread pool");
    pool.install(|| ws.par_iter().map(|w| o.verdict(w)).collect())
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LanguageSample {
    pub alphabet: Vec<String>,
    pub max_len: usize,
    pub accepted: Vec<String>,
    pub unknown: Vec<String>,
}

pub fn enumerate(o: &dyn Oracle, max_len: usize, jobs: usize) -> LanguageSample {
    let ws = words(o.alphabet().len(), max_len);
    let vs = verdicts(o, &ws, jobs);
    let mut sample =
        LanguageSample { alphabet: o.alphabet().to_vec(), max_len, accepted: Vec::new(), unknown: Vec::new() };
    for (w, v) in ws.iter().zip(vs) {
        match v {
            Outcome::Accepted => sample.accepted.push(format_word(o.alphabet(), w)),
            Outcome::BudgetExhausted => sample.unknown.push(format_word(o.alphabet(), w)),
            Outcome::Rejected => {}
        }
    }
    sample
}

/// Runs a machine on every word up to `max_len`.
pub fn enumerate_machine(m: &CompiledMachine, max_len: usize, budget: &Budget, jobs: usize) -> LanguageSample {
    enumerate(&MachineOracle { machine: m, budget: *budget }, max_len, jobs)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CompareReport {
    pub alphabet: Vec<String>,
    pub max_len: usize,
    pub checked: usize,
    pub agreed: bool,
    pub first_disagreement: Option<String>,
    pub disagreements: usize,
    /// words where either side ran out of budget
    pub unknown: Vec<String>,
}

/// Scans `Σ^{≤max_len}` for words the two oracles classify differently.
/// Unknown verdicts are listed and make `agreed` false.
pub fn compare(a: &dyn Oracle, b: &dyn Oracle, max_len: usize, jobs: usize) -> Result<CompareReport, Error> {
    if a.alphabet() != b.alphabet() {
        return Err(Error::Precondition(format!(
            "alphabets differ: {:?} vs {:?}",
            a.alphabet(),
            b.alphabet()
        )));
    }
    let ws = words(a.alphabet().len(), max_len);
    let va = verdicts(a, &ws, jobs);
    let vb = verdicts(b, &ws, jobs);
    let mut report = CompareReport {
        alphabet: a.alphabet().to_vec(),
        max_len,
        checked: ws.len(),
        agreed: true,
        first_disagreement: None,
        disagreements: 0,
        unknown: Vec::new(),
    };
    for ((w, x), y) in ws.iter().zip(va).zip(vb) {
        if x == Outcome::BudgetExhausted || y == Outcome::BudgetExhausted {
            report.unknown.push(format_word(a.alphabet(), w));
        } else if x != y {
            report.disagreements += 1;
            if report.first_disagreement.is_none() {
                report.first_disagreement = Some(format_word(a.alphabet(), w));
            }
        }
    }
    report.agreed = report.disagreements == 0 && report.unknown.is_empty();
    Ok(report)
}

/// Occurrence counts of each symbol index in `0..k`.
pub fn parikh(w: &[usize], k: usize) -> Vec<usize> {
    let mut out = vec![0; k];
    for &a in w {
        out[a] += 1;
    }
    out
}

pub const DEFAULT_DISSIM_CAP: usize = 1 << 16;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Dissimilarity {
    pub n: usize,
    /// maximum size of a pairwise `n`-dissimilar set
    pub a: usize,
    /// maximum size of a uniformly `n`-dissimilar set
    pub u: usize,
    pub pairwise_witness: Vec<String>,
    /// each member with the suffix that separates it from the others
    pub uniform_witness: Vec<(String, String)>,
}

/// Membership table for all words of length at most `n`, indexed by shortlex
/// rank.
struct Table {
    k: usize,
    words: Vec<Vec<usize>>,
    member: Vec<bool>,
}

impl Table {
    fn new(p: &dyn Oracle, n: usize, cap: usize) -> Result<Self, Error> {
        let k = p.alphabet().len();
        let size: usize = (0..=n).try_fold(0usize, |acc, i| acc.checked_add(k.checked_pow(i as u32)?)).unwrap_or(usize::MAX);
        if size > cap {
            return Err(Error::Cap(format!("{size} words exceed the cap of {cap}")));
        }
        let words = words(k, n);
        let mut member = Vec::with_capacity(words.len());
        for w in &words {
            match p.verdict(w) {
                Outcome::Accepted => member.push(true),
                Outcome::Rejected => member.push(false),
                Outcome::BudgetExhausted => {
                    return Err(Error::Cap(format!("membership of {:?} is unknown", format_word(p.alphabet(), w))))
                }
            }
        }
        Ok(Table { k, words, member })
    }

    fn index(&self, w: &[usize]) -> usize {
        // shortlex rank: all shorter words, then the base-k value
        let mut shorter = 0;
        let mut pow = 1;
        for _ in 0..w.len() {
            shorter += pow;
            pow *= self.k;
        }
        shorter + w.iter().fold(0, |acc, &a| acc * self.k + a)
    }

    fn member_cat(&self, w: &[usize], v: &[usize]) -> bool {
        let mut x = w.to_vec();
        x.extend_from_slice(v);
        self.member[self.index(&x)]
    }
}

/// Exact `A_L(n)` and `U_L(n)` with witnesses.
pub fn dissimilarity(p: &dyn Oracle, n: usize, cap: usize) -> Result<Dissimilarity, Error> {
    let t = Table::new(p, n, cap)?;
    let m = t.words.len();
    let fmt = |w: &[usize]| format_word(p.alphabet(), w);

    // pairwise graph
    let mut adj = vec![Bitset::new(m); m];
    for i in 0..m {
        for j in i + 1..m {
            let (w, x) = (&t.words[i], &t.words[j]);
            let room = n - w.len().max(x.len());
            let separated = t.words.iter().take_while(|v| v.len() <= room).any(|v| t.member_cat(w, v) != t.member_cat(x, v));
            if separated {
                adj[i].set(j);
                adj[j].set(i);
            }
        }
    }
    let clique = max_clique(&adj);
    let pairwise_witness = clique.iter().map(|&i| fmt(&t.words[i])).collect();

    // uniform: vertices are (w, v) with wv in L
    let mut pairs = Vec::new();
    for w in &t.words {
        for v in t.words.iter().take_while(|v| v.len() + w.len() <= n) {
            if t.member_cat(w, v) {
                pairs.push((w, v));
            }
        }
    }
    let mut uadj = vec![Bitset::new(pairs.len()); pairs.len()];
    let rejects = |x: &[usize], v: &[usize]| x.len() + v.len() <= n && !t.member_cat(x, v);
    for i in 0..pairs.len() {
        for j in i + 1..pairs.len() {
            let ((w, v), (x, y)) = (pairs[i], pairs[j]);
            if w != x && rejects(x, v) && rejects(w, y) {
                uadj[i].set(j);
                uadj[j].set(i);
            }
        }
    }
    let uclique = max_clique(&uadj);
    let uniform_witness = uclique.iter().map(|&i| (fmt(pairs[i].0), fmt(pairs[i].1))).collect();
    Ok(Dissimilarity { n, a: clique.len(), u: uclique.len(), pairwise_witness, uniform_witness })
}

/// Checks that `set` is uniformly `n`-dissimilar for `p`, returning one
/// separating suffix per member. Suffixes are searched up to length `n`.
pub fn uniform_witnesses(p: &dyn Oracle, n: usize, set: &[Vec<usize>]) -> Option<Vec<Vec<usize>>> {
    let k = p.alphabet().len();
    let longest = set.iter().map(Vec::len).max().unwrap_or(0);
    if longest > n {
        return None;
    }
    let suffixes = words(k, n - set.iter().map(Vec::len).min().unwrap_or(0));
    let cat = |w: &[usize], v: &[usize]| {
        let mut x = w.to_vec();
        x.extend_from_slice(v);
        p.verdict(&x) == Outcome::Accepted
    };
    let mut out = Vec::new();
    for (i, w) in set.iter().enumerate() {
        let found = suffixes.iter().find(|v| {
            v.len() + longest <= n
                && cat(w, v)
                && set.iter().enumerate().all(|(j, x)| j == i || !cat(x, v))
        })?;
        out.push(found.clone());
    }
    Some(out)
}

#[derive(Clone, Debug, PartialEq, Eq)]
struct Bitset(Vec<u64>);

impl Bitset {
    fn new(n: usize) -> Self {
        Bitset(vec![0; n.div_ceil(64)])
    }

    fn set(&mut self, i: usize) {
        self.0[i / 64] |= 1 << (i % 64);
    }

    fn clear(&mut self, i: usize) {
        self.0[i / 64] &= !(1 << (i % 64));
    }

    fn remove_all(&mut self, o: &Bitset) {
        for (a, b) in self.0.iter_mut().zip(&o.0) {
            *a &= !b;
        }
    }

    fn first(&self) -> Option<usize> {
        self.0.iter().position(|&x| x != 0).map(|b| b * 64 + self.0[b].trailing_zeros() as usize)
    }

    fn and(&self, o: &Bitset) -> Bitset {
        Bitset(self.0.iter().zip(&o.0).map(|(a, b)| a & b).collect())
    }
}

/// Exact maximum clique by branch and bound with a greedy colouring bound.
fn max_clique(adj: &[Bitset]) -> Vec<usize> {
    let n = adj.len();
    let mut all = Bitset::new(n);
    for i in 0..n {
        all.set(i);
    }
    let mut best = Vec::new();
    let mut cur = Vec::new();
    expand(adj, &mut cur, all, &mut best);
    best.sort_unstable();
    best
}

fn expand(adj: &[Bitset], cur: &mut Vec<usize>, cand: Bitset, best: &mut Vec<usize>) {
    if cand.first().is_none() {
        if cur.len() > best.len() {
            *best = cur.clone();
        }
        return;
    }
    // greedy colouring: order vertices by colour class, colour bounds clique size
    let mut order = Vec::new();
    let mut colour = Vec::new();
    let mut left = cand.clone();
    let mut c = 0;
    while left.first().is_some() {
        c += 1;
        let mut avail = left.clone();
        loop {
            let Some(v) = avail.first() else { break };
            order.push(v);
            colour.push(c);
            left.clear(v);
            avail.clear(v);
            avail.remove_all(&adj[v]);
        }
    }
    let mut cand = cand;
    for idx in (0..order.len()).rev() {
        if cur.len() + colour[idx] <= best.len() {
            return;
        }
        let v = order[idx];
        cur.push(v);
        expand(adj, cur, cand.and(&adj[v]), best);
        cur.pop();
        cand.clear(v);
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn eq_pred() -> LanguagePredicate {
        LanguagePredicate::new("EQ", &["a", "b"], |w| parikh(w, 2)[0] == parikh(w, 2)[1])
    }

    #[test]
    fn word_counts() {
        assert_eq!(words(2, 3).len(), 15);
        assert_eq!(words(3, 7).len(), 3280);
        assert_eq!(words(0, 4).len(), 1);
    }

    #[test]
    fn parikh_examples() {
        assert_eq!(parikh(&[], 3), vec![0, 0, 0]);
        assert_eq!(parikh(&[0, 0, 1], 2), vec![2, 1]);
    }

    #[test]
    fn full_language_is_one_class() {
        let all = LanguagePredicate::new("all", &["a", "b"], |_| true);
        for n in 0..5 {
            let d = dissimilarity(&all, n, DEFAULT_DISSIM_CAP).unwrap();
            assert_eq!((d.a, d.u), (1, 1));
        }
    }

    #[test]
    fn clique_of_triangle() {
        let mut adj = vec![Bitset::new(4); 4];
        for (i, j) in [(0, 1), (1, 2), (0, 2), (2, 3)] {
            adj[i].set(j);
            adj[j].set(i);
        }
        assert_eq!(max_clique(&adj), vec![0, 1, 2]);
    }

    #[test]
    fn compare_finds_first_difference() {
        let leq = LanguagePredicate::new("LEQ", &["a", "b"], |w| parikh(w, 2)[0] <= parikh(w, 2)[1]);
        let r = compare(&eq_pred(), &leq, 4, 1).unwrap();
        assert!(!r.agreed);
        assert_eq!(r.first_disagreement.as_deref(), Some("b"));
        assert!(compare(&eq_pred(), &eq_pred(), 4, 2).unwrap().agreed);
    }

    #[test]
    fn uniform_witness_check() {
        let d = dissimilarity(&eq_pred(), 4, DEFAULT_DISSIM_CAP).unwrap();
        assert!(d.u <= d.a);
        let set: Vec<Vec<usize>> =
            d.uniform_witness.iter().map(|(w, _)| parse_word(&eq_pred().alphabet, w).unwrap()).collect();
        assert!(uniform_witnesses(&eq_pred(), 4, &set).is_some());
    }
}
