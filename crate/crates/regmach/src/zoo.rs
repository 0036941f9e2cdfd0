//! Ready-made machines, each paired with a predicate for its language.
//!
//! Parametric families are addressed as `MOD_m`, `AB_k`, `MPAL_l` and `L_k`.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use regmach_algebra::{generator_matrix, mat_inverse, BigRational, HeisenbergElem, RMatrix, RVector};
use serde::Serialize;

use crate::analysis::{compare, parikh, CompareReport, LanguagePredicate, MachineOracle};
use crate::encodings::{base_m_encode, base_m_encode_reverse, gsb_matrix};
use crate::engine::{Budget, StepBound};
use crate::machine::{MachineKind, MachineSpec, Mode, Status, Transition};
use crate::transforms::build_decision_machines;
use crate::Error;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Provenance {
    /// matrices and structure quoted directly
    PaperExplicit,
    /// reconstructed from printed register traces or prose
    PaperTraceDerived,
    /// constructed here from the language definition
    Derived,
}

#[derive(Clone, Debug)]
pub struct ZooEntry {
    pub name: String,
    pub spec: MachineSpec,
    pub predicate: LanguagePredicate,
    pub provenance: Provenance,
    pub notes: String,
    /// length up to which the entry is certified
    pub check_len: usize,
    pub budget: Budget,
}

/// The catalog, with the parametric families at small parameters.
pub fn zoo_names() -> Vec<&'static str> {
    vec![
        "W_F2",
        "UPOW",
        "UPOW_odd",
        "MOD_2",
        "MOD_3",
        "AB_1",
        "AB_2",
        "AB_3",
        "EQ",
        "EVENAB",
        "DYCK",
        "LEQ",
        "MPAL_2",
        "MPAL_3",
        "E1",
        "E2",
        "E3",
        "E4",
        "L_1",
        "L_2",
        "L_3",
        "ANBN",
        "ANBNCN",
        "UPOW_PRIME_NBHVA2",
        "UPOW_PRIME_NBHVA3",
        "NEQ",
        "SUM",
        "BIN",
        "SUBSETSUM_r",
        "MULT",
    ]
}

pub fn zoo_get(name: &str) -> Result<ZooEntry, Error> {
    let unknown = || Error::UnknownName(name.to_string());
    if let Some((family, p)) = name.rsplit_once('_') {
        if let Ok(p) = p.parse::<usize>() {
            if p == 0 || p > 16 || (family == "MPAL" && p < 2) {
                return Err(unknown());
            }
            return match family {
                "MOD" => Ok(mod_m(p)),
                "AB" => Ok(ab_k(p)),
                "MPAL" => Ok(mpal(p)),
                "L" => Ok(l_k(p)),
                _ => Err(unknown()),
            };
        }
    }
    Ok(match name {
        "W_F2" => word_problem_f2(),
        "UPOW" => upow(),
        "UPOW_odd" => upow_odd(),
        "EQ" => stateless_ratio("EQ", "2", "1/2"),
        "EVENAB" => stateless_ratio("EVENAB", "-2", "1/2"),
        "DYCK" => dyck(),
        "LEQ" => leq(),
        "E1" | "E2" | "E3" | "E4" => decision(name)?,
        "ANBN" => anbn(),
        "ANBNCN" => anbncn(),
        "UPOW_PRIME_NBHVA2" => upow_prime2(),
        "UPOW_PRIME_NBHVA3" => upow_prime3(),
        "NEQ" => neq(),
        "SUM" => sum(),
        "BIN" => bin(),
        "SUBSETSUM_r" => subsetsum(),
        "MULT" => mult(),
        _ => return Err(unknown()),
    })
}

/// Machine verdicts against the predicate on every word up to `max_len`.
pub fn zoo_check(name: &str, max_len: usize, budget: Option<&Budget>, jobs: usize) -> Result<CompareReport, Error> {
    let e = zoo_get(name)?;
    let m = e.spec.compile()?;
    let oracle = MachineOracle { machine: &m, budget: *budget.unwrap_or(&e.budget) };
    compare(&oracle, &e.predicate, max_len, jobs)
}

// ---- construction helpers ----

fn rm(rows: &[&[&str]]) -> RMatrix {
    RMatrix::from_rows(rows.iter().map(|r| r.iter().map(|x| x.parse().expect("literal")).collect()).collect())
        .expect("square literal")
}

fn rv(xs: &[i64]) -> RVector {
    RVector::from_ints(xs)
}

fn names(xs: &[&str]) -> Vec<String> {
    xs.iter().map(|s| s.to_string()).collect()
}

fn mode(deterministic: bool, blind: bool, realtime: bool, endmarker: bool) -> Mode {
    Mode { deterministic, blind, realtime, endmarker }
}

#[allow(clippy::too_many_arguments)]
fn machine(
    kind: MachineKind,
    mode: Mode,
    dimension: usize,
    alphabet: &[&str],
    states: &[&str],
    accept: &[&str],
    initial_vector: Option<RVector>,
    matrices: Vec<(&str, RMatrix)>,
    transitions: Vec<Transition>,
) -> MachineSpec {
    MachineSpec {
        kind,
        mode,
        dimension,
        alphabet: names(alphabet),
        states: names(states),
        initial_state: states[0].to_string(),
        accept_states: names(accept),
        initial_vector,
        matrices: matrices.into_iter().map(|(k, m)| (k.to_string(), m)).collect::<BTreeMap<_, _>>(),
        transitions,
    }
}

fn entry(
    name: &str,
    spec: MachineSpec,
    predicate: LanguagePredicate,
    provenance: Provenance,
    notes: &str,
    check_len: usize,
) -> ZooEntry {
    ZooEntry {
        name: name.to_string(),
        spec,
        predicate,
        provenance,
        notes: notes.to_string(),
        check_len,
        budget: Budget::default(),
    }
}

fn is_power_of_two(n: usize) -> bool {
    n.is_power_of_two()
}

// ---- entries ----

fn word_problem_f2() -> ZooEntry {
    let letters = [("a", 1), ("b", 2), ("A", -1), ("B", -2)];
    let spec = machine(
        MachineKind::Efa,
        mode(true, true, true, false),
        2,
        &["a", "b", "A", "B"],
        &["q"],
        &["q"],
        None,
        letters.iter().map(|&(s, l)| (s, generator_matrix(l).expect("rank 2"))).collect(),
        letters.iter().map(|&(s, _)| Transition::sym("q", s, "q").apply(s)).collect(),
    );
    let pred = LanguagePredicate::new("W_F2", &["a", "b", "A", "B"], |w| {
        // free reduction with a stack; index i and i ^ 2 are mutually inverse
        let mut stack: Vec<usize> = Vec::new();
        for &x in w {
            if stack.last() == Some(&(x ^ 2)) {
                stack.pop();
            } else {
                stack.push(x);
            }
        }
        stack.is_empty()
    });
    entry("W_F2", spec, pred, Provenance::PaperExplicit, "stateless; uppercase letters are inverses", 6)
}

fn upow() -> ZooEntry {
    let spec = machine(
        MachineKind::Efa,
        mode(false, true, false, false),
        2,
        &["a"],
        &["q1", "q2", "q3"],
        &["q3"],
        None,
        vec![
            ("A1", rm(&[&["2", "0"], &["1", "1"]])),
            ("A2", rm(&[&["1", "0"], &["-1", "1"]])),
            ("A3", rm(&[&["1/2", "0"], &["0", "1"]])),
        ],
        vec![
            Transition::eps("q1", "q1").apply("A1"),
            Transition::sym("q1", "a", "q2"),
            Transition::sym("q2", "a", "q2").apply("A2"),
            Transition::eps("q2", "q3"),
            Transition::eps("q3", "q3").apply("A3"),
        ],
    );
    let pred = LanguagePredicate::new("UPOW", &["a"], |w| is_power_of_two(w.len()));
    entry("UPOW", spec, pred, Provenance::PaperExplicit, "A1 = B^-1 A^-1, A2 = A, A3 = B over BS(1,2)", 32)
}

fn upow_odd() -> ZooEntry {
    let spec = machine(
        MachineKind::Efa,
        mode(false, true, false, false),
        2,
        &["a"],
        &["p0", "p1", "p2", "p3"],
        &["p3"],
        None,
        vec![
            ("A1", rm(&[&["2", "0"], &["1", "1/2"]])),
            ("A2", rm(&[&["2", "0"], &["0", "1/2"]])),
            ("A3", rm(&[&["1", "0"], &["-1", "1"]])),
            ("A4", rm(&[&["1/2", "0"], &["0", "2"]])),
        ],
        vec![
            Transition::eps("p0", "p1").apply("A1"),
            Transition::eps("p1", "p1").apply("A2"),
            Transition::eps("p1", "p2"),
            Transition::sym("p2", "a", "p2").apply("A3"),
            Transition::eps("p2", "p3"),
            Transition::eps("p3", "p3").apply("A4"),
        ],
    );
    let pred = LanguagePredicate::new("UPOW_odd", &["a"], |w| {
        let n = w.len();
        is_power_of_two(n) && n.trailing_zeros() % 2 == 1
    });
    let mut e = entry(
        "UPOW_odd",
        spec,
        pred,
        Provenance::PaperTraceDerived,
        "matrices forced by the printed register traces; accepting paths take n + log2(n) + 3 steps",
        32,
    );
    e.budget = Budget { max_steps: StepBound::affine(2, 16), ..Budget::default() };
    e
}

fn mod_m(m: usize) -> ZooEntry {
    let mut p = RMatrix::zero(m);
    for i in 0..m {
        p.set(i, (i + 1) % m, BigRational::one());
    }
    let mut iv = vec![0; m];
    iv[0] = 1;
    let name = format!("MOD_{m}");
    let spec = machine(
        MachineKind::Hva,
        mode(true, true, true, false),
        m,
        &["a"],
        &["q"],
        &["q"],
        Some(rv(&iv)),
        vec![("P", p)],
        vec![Transition::sym("q", "a", "q").apply("P")],
    );
    let pred = LanguagePredicate::new(&name, &["a"], move |w| w.len() % m == 0);
    entry(&name, spec, pred, Provenance::PaperExplicit, "stateless; cyclic permutation matrix", 10)
}

fn ab_k(k: usize) -> ZooEntry {
    let d = 2 * k;
    let mut a = RMatrix::zero(d);
    let mut b = RMatrix::zero(d);
    for i in 0..k {
        a.set(i, i + 1, BigRational::one());
        b.set(k + i, (k + i + 1) % d, BigRational::one());
    }
    let mut iv = vec![0; d];
    iv[0] = 1;
    let name = format!("AB_{k}");
    let spec = machine(
        MachineKind::Hva,
        mode(true, true, true, false),
        d,
        &["a", "b"],
        &["q"],
        &["q"],
        Some(rv(&iv)),
        vec![("A", a), ("B", b)],
        vec![Transition::sym("q", "a", "q").apply("A"), Transition::sym("q", "b", "q").apply("B")],
    );
    let pred = LanguagePredicate::new(&name, &["a", "b"], move |w| {
        w.len() % d == 0 && w.chunks(d).all(|c| c[..k].iter().all(|&x| x == 0) && c[k..].iter().all(|&x| x == 1))
    });
    entry(&name, spec, pred, Provenance::PaperExplicit, "stateless; the single 1 moves along the vector", 10)
}

fn stateless_ratio(name: &str, on_a: &str, on_b: &str) -> ZooEntry {
    let spec = machine(
        MachineKind::Hva,
        mode(true, true, true, false),
        1,
        &["a", "b"],
        &["q"],
        &["q"],
        Some(rv(&[1])),
        vec![("Aa", rm(&[&[on_a]])), ("Ab", rm(&[&[on_b]]))],
        vec![Transition::sym("q", "a", "q").apply("Aa"), Transition::sym("q", "b", "q").apply("Ab")],
    );
    let even = on_a.starts_with('-');
    let pred = LanguagePredicate::new(name, &["a", "b"], move |w| {
        let p = parikh(w, 2);
        p[0] == p[1] && (!even || p[0].is_multiple_of(2))
    });
    let notes = if even { "stateless; accepts #a = #b with #a even" } else { "stateless" };
    entry(name, spec, pred, Provenance::PaperExplicit, notes, 10)
}

fn dyck() -> ZooEntry {
    let spec = machine(
        MachineKind::Hva,
        mode(true, false, true, false),
        1,
        &["(", ")"],
        &["q"],
        &["q"],
        Some(rv(&[1])),
        vec![("Open", rm(&[&["2"]])), ("Close", rm(&[&["1/2"]])), ("Kill", rm(&[&["0"]]))],
        vec![
            Transition::sym("q", "(", "q").apply("Open"),
            Transition::sym("q", ")", "q").status(Status::Neq).apply("Close"),
            Transition::sym("q", ")", "q").status(Status::Eq).apply("Kill"),
        ],
    );
    let pred = LanguagePredicate::new("DYCK", &["(", ")"], |w| {
        let mut depth = 0i64;
        for &x in w {
            depth += if x == 0 { 1 } else { -1 };
            if depth < 0 {
                return false;
            }
        }
        depth == 0
    });
    entry("DYCK", spec, pred, Provenance::PaperExplicit, "stateless; underflow sets the vector to 0", 10)
}

fn leq() -> ZooEntry {
    let spec = machine(
        MachineKind::Hva,
        mode(false, true, true, false),
        1,
        &["a", "b"],
        &["q"],
        &["q"],
        Some(rv(&[1])),
        vec![("A", rm(&[&["2"]])), ("B1", rm(&[&["1/2"]])), ("B2", rm(&[&["1"]]))],
        vec![
            Transition::sym("q", "a", "q").apply("A"),
            Transition::sym("q", "b", "q").apply("B1"),
            Transition::sym("q", "b", "q").apply("B2"),
        ],
    );
    let pred = LanguagePredicate::new("LEQ", &["a", "b"], |w| {
        let p = parikh(w, 2);
        p[0] <= p[1]
    });
    entry("LEQ", spec, pred, Provenance::PaperExplicit, "stateless; each b halves or keeps the vector", 10)
}

/// `l ≥ 2`; over one letter the encoding is constant.
fn mpal(l: usize) -> ZooEntry {
    let mut alphabet: Vec<String> = (1..=l).map(|j| format!("a{j}")).collect();
    alphabet.push("#".into());
    let mut matrices = BTreeMap::new();
    let mut transitions = Vec::new();
    for j in 0..l {
        let e = gsb_matrix(l, j);
        let inv = mat_inverse(&e).expect("unimodular");
        let (f, b) = (format!("E{}", j + 1), format!("E{}inv", j + 1));
        matrices.insert(f.clone(), e);
        matrices.insert(b.clone(), inv);
        transitions.push(Transition::sym("p", &alphabet[j], "p").apply(&f));
        transitions.push(Transition::sym("q", &alphabet[j], "q").apply(&b));
    }
    transitions.push(Transition::sym("p", "#", "q"));
    let name = format!("MPAL_{l}");
    let spec = MachineSpec {
        kind: MachineKind::Hva,
        mode: mode(true, true, true, false),
        dimension: l,
        alphabet: alphabet.clone(),
        states: names(&["p", "q"]),
        initial_state: "p".into(),
        accept_states: names(&["q"]),
        initial_vector: Some(RVector::ones(l)),
        matrices,
        transitions,
    };
    let pred = LanguagePredicate::with_alphabet(&name, alphabet, move |w| {
        let hashes: Vec<usize> = (0..w.len()).filter(|&i| w[i] == l).collect();
        if hashes.len() != 1 {
            return false;
        }
        let (u, v) = (&w[..hashes[0]], &w[hashes[0] + 1..]);
        u.len() == v.len() && u.iter().eq(v.iter().rev())
    });
    let len = if l == 2 { 8 } else { 6 };
    entry(&name, spec, pred, Provenance::PaperExplicit, "generalized Stern-Brocot matrices and inverses", len)
}

fn decision(name: &str) -> Result<ZooEntry, Error> {
    let ma = generator_matrix(1)?;
    let ma_inv = generator_matrix(-1)?;
    let (spec, test, notes): (MachineSpec, fn(usize) -> bool, &str) = match name {
        "E1" => (build_decision_machines(std::slice::from_ref(&ma), Some(&ma), false)?, |n| n == 2, "g = M_a, generators {M_a}"),
        "E2" => (
            build_decision_machines(&[ma.clone(), ma_inv.clone()], None, false)?,
            |n| n >= 2 && n % 2 == 0,
            "generators {M_a, M_a^-1}",
        ),
        "E3" => (
            build_decision_machines(&[ma.clone(), ma_inv.clone()], Some(&ma), true)?,
            |n| n >= 1,
            "g = M_a, generators {M_a, M_a^-1}, empty loops",
        ),
        _ => (
            build_decision_machines(&[ma, ma_inv], None, true)?,
            |n| n >= 1,
            "generators {M_a, M_a^-1}, empty loops",
        ),
    };
    let pred = LanguagePredicate::new(name, &["a"], move |w| test(w.len()));
    Ok(entry(name, spec, pred, Provenance::PaperExplicit, notes, 8))
}

fn counter_machine(
    counters: usize,
    alphabet: &[&str],
    states: &[&str],
    accept: &[&str],
    transitions: Vec<Transition>,
) -> MachineSpec {
    machine(MachineKind::Counter, mode(true, true, true, false), counters, alphabet, states, accept, None, vec![], transitions)
}

fn l_k(k: usize) -> ZooEntry {
    let p: Vec<String> = (1..=k).map(|i| format!("p{i}")).collect();
    let r: Vec<String> = (1..=k + 1).map(|i| format!("r{i}")).collect();
    let mut states: Vec<&str> = p.iter().map(String::as_str).collect();
    states.extend(r.iter().map(String::as_str));
    let unit = |i: usize, s: i64| {
        let mut d = vec![0; k];
        d[i] = s;
        d
    };
    let mut transitions = Vec::new();
    for i in 0..k {
        let next_p = if i + 1 < k { &p[i + 1] } else { &r[0] };
        transitions.push(Transition::sym(&p[i], "0", &p[i]).delta(unit(i, 1)));
        transitions.push(Transition::sym(&p[i], "1", next_p));
        transitions.push(Transition::sym(&r[i], "0", &r[i]).delta(unit(i, -1)));
        transitions.push(Transition::sym(&r[i], "1", &r[i + 1]));
    }
    let name = format!("L_{k}");
    let spec = counter_machine(k, &["0", "1"], &states, &[&r[k]], transitions);
    let pred = LanguagePredicate::new(&name, &["0", "1"], move |w| {
        // 2k blocks 0^x 1, the second k repeating the first
        if w.last() != Some(&1) {
            return false;
        }
        let blocks: Vec<usize> = w.split(|&x| x == 1).map(<[usize]>::len).collect();
        let blocks = &blocks[..blocks.len() - 1];
        blocks.len() == 2 * k && blocks[..k] == blocks[k..]
    });
    entry(&name, spec, pred, Provenance::PaperExplicit, "real-time blind counters, one per block", 10)
}

fn anbn() -> ZooEntry {
    let spec = counter_machine(
        1,
        &["a", "b"],
        &["s", "t"],
        &["s", "t"],
        vec![
            Transition::sym("s", "a", "s").delta(vec![1]),
            Transition::sym("s", "b", "t").delta(vec![-1]),
            Transition::sym("t", "b", "t").delta(vec![-1]),
        ],
    );
    let pred = LanguagePredicate::new("ANBN", &["a", "b"], |w| {
        let n = w.len() / 2;
        w.len() % 2 == 0 && w[..n].iter().all(|&x| x == 0) && w[n..].iter().all(|&x| x == 1)
    });
    entry("ANBN", spec, pred, Provenance::PaperExplicit, "one blind counter", 10)
}

fn anbncn() -> ZooEntry {
    let spec = counter_machine(
        2,
        &["a", "b", "c"],
        &["s", "t", "u"],
        &["s", "u"],
        vec![
            Transition::sym("s", "a", "s").delta(vec![1, 1]),
            Transition::sym("s", "b", "t").delta(vec![-1, 0]),
            Transition::sym("t", "b", "t").delta(vec![-1, 0]),
            Transition::sym("t", "c", "u").delta(vec![0, -1]),
            Transition::sym("u", "c", "u").delta(vec![0, -1]),
        ],
    );
    let pred = LanguagePredicate::new("ANBNCN", &["a", "b", "c"], |w| {
        let n = w.len() / 3;
        w.len() % 3 == 0 && w.iter().enumerate().all(|(i, &x)| x == i / n.max(1))
    });
    entry("ANBNCN", spec, pred, Provenance::PaperExplicit, "two blind counters", 9)
}

fn upow_prime_pred(name: &str) -> LanguagePredicate {
    LanguagePredicate::new(name, &["a"], |w| {
        let n = w.len();
        (1..usize::BITS - 1).map(|k| k as usize + (1 << k)).take_while(|&m| m <= n).any(|m| m == n)
    })
}

fn upow_prime2() -> ZooEntry {
    let spec = machine(
        MachineKind::Hva,
        mode(false, true, true, false),
        2,
        &["a"],
        &["p0", "p1", "p2"],
        &["p2"],
        Some(rv(&[1, 1])),
        vec![("D", rm(&[&["2", "0"], &["0", "1"]])), ("I", RMatrix::identity(2)), ("S", rm(&[&["1", "0"], &["-1", "1"]]))],
        vec![
            Transition::sym("p0", "a", "p1").apply("D"),
            Transition::sym("p1", "a", "p1").apply("D"),
            Transition::sym("p1", "a", "p2").apply("I"),
            Transition::sym("p2", "a", "p2").apply("S"),
        ],
    );
    entry(
        "UPOW_PRIME_NBHVA2",
        spec,
        upow_prime_pred("UPOW_PRIME_NBHVA2"),
        Provenance::Derived,
        "doubling phase, one bridge symbol, then one decrement per symbol",
        40,
    )
}

fn upow_prime3() -> ZooEntry {
    let spec = machine(
        MachineKind::Hva,
        mode(false, true, true, false),
        3,
        &["a"],
        &["p0", "p1", "p2"],
        &["p2"],
        Some(rv(&[1, 1, 1])),
        vec![
            ("A1", rm(&[&["1", "1", "0"], &["1", "1", "0"], &["0", "0", "1"]])),
            ("As", rm(&[&["1", "0", "0"], &["0", "0", "0"], &["0", "1", "1"]])),
            ("A2", rm(&[&["1", "0", "0"], &["0", "0", "0"], &["-1", "1", "1"]])),
        ],
        vec![
            Transition::sym("p0", "a", "p1").apply("A1"),
            Transition::sym("p1", "a", "p1").apply("A1"),
            Transition::sym("p1", "a", "p2").apply("As"),
            Transition::sym("p2", "a", "p2").apply("A2"),
        ],
    );
    entry(
        "UPOW_PRIME_NBHVA3",
        spec,
        upow_prime_pred("UPOW_PRIME_NBHVA3"),
        Provenance::PaperTraceDerived,
        "entries in {-1,0,1}; As resets the second entry to 1 before decrementing",
        40,
    )
}

fn neq() -> ZooEntry {
    let mut t = vec![
        Transition::sym("q1", "a", "q1").apply("A"),
        Transition::sym("q1", "b", "q2").apply("B"),
        Transition::sym("q2", "b", "q2").apply("B"),
    ];
    for q in ["q1", "q2"] {
        t.push(Transition::end(q, "qacc").status(Status::Eq).apply("Ceq"));
        t.push(Transition::end(q, "qacc").status(Status::Neq).apply("Cneq"));
    }
    let spec = machine(
        MachineKind::Hva,
        mode(true, false, true, true),
        2,
        &["a", "b"],
        &["q1", "q2", "qacc"],
        &["qacc"],
        Some(rv(&[1, 1])),
        vec![
            ("A", rm(&[&["1", "0"], &["1", "1"]])),
            ("B", rm(&[&["1", "0"], &["-1", "1"]])),
            ("Ceq", rm(&[&["1", "0"], &["0", "0"]])),
            ("Cneq", rm(&[&["0", "0"], &["1", "1"]])),
        ],
        t,
    );
    let pred = LanguagePredicate::new("NEQ", &["a", "b"], |w| {
        let i = w.iter().take_while(|&&x| x == 0).count();
        w[i..].iter().all(|&x| x == 1) && i != w.len() - i
    });
    entry(
        "NEQ",
        spec,
        pred,
        Provenance::PaperTraceDerived,
        "C= zeroes the second entry, C!= sets the first entry to 1; certified only by agreement checks",
        10,
    )
}

fn sum() -> ZooEntry {
    let spec = machine(
        MachineKind::Hva,
        mode(true, false, true, false),
        2,
        &["a", "b"],
        &["s0", "sa", "sb", "se", "sc"],
        &["se", "sc"],
        Some(rv(&[1, 1])),
        vec![("Ap", rm(&[&["1", "0"], &["1", "1"]])), ("Am", rm(&[&["1", "0"], &["-1", "1"]]))],
        vec![
            Transition::sym("s0", "a", "sa").apply("Ap"),
            Transition::sym("sa", "a", "sa").apply("Ap"),
            Transition::sym("sa", "b", "sb").apply("Am"),
            Transition::sym("sb", "b", "sb").apply("Am"),
            Transition::sym("sb", "a", "se").status(Status::Eq),
            Transition::sym("sb", "a", "sc").status(Status::Neq).apply("Am"),
            Transition::sym("se", "a", "se"),
            Transition::sym("sc", "a", "sc").apply("Am"),
        ],
    );
    let pred = LanguagePredicate::new("SUM", &["a", "b"], |w| {
        let n = w.iter().take_while(|&&x| x == 0).count();
        let a1 = w[n..].iter().take_while(|&&x| x == 1).count();
        let rest = &w[n + a1..];
        let a2 = rest.len();
        rest.iter().all(|&x| x == 0) && a1 >= 1 && a2 >= 1 && (n == a1 || n == a1 + a2)
    });
    entry("SUM", spec, pred, Provenance::PaperTraceDerived, "the first entry minus one is a counter", 10)
}

fn bin() -> ZooEntry {
    let spec = machine(
        MachineKind::Hva,
        mode(false, true, true, false),
        3,
        &["0", "1", "c"],
        &["b0", "b1", "z", "r0", "r1", "acc"],
        &["acc"],
        Some(rv(&[1, 0, 0])),
        vec![
            ("E0", rm(&[&["1", "0", "0"], &["0", "2", "0"], &["0", "0", "2"]])),
            ("E1", rm(&[&["1", "1", "1"], &["0", "2", "0"], &["0", "0", "2"]])),
            ("D", rm(&[&["1", "-1", "0"], &["0", "1", "0"], &["0", "0", "1"]])),
            ("F0", rm(&[&["1", "0", "0"], &["0", "1", "0"], &["0", "0", "1/2"]])),
            ("F1", rm(&[&["1", "0", "-1/2"], &["0", "1", "0"], &["0", "0", "1/2"]])),
        ],
        vec![
            Transition::sym("b0", "1", "b1").apply("E1"),
            Transition::sym("b1", "0", "b1").apply("E0"),
            Transition::sym("b1", "1", "b1").apply("E1"),
            Transition::sym("b1", "c", "z"),
            Transition::sym("z", "0", "z").apply("D"),
            Transition::sym("z", "c", "r0"),
            Transition::sym("r0", "0", "r0").apply("F0"),
            Transition::sym("r0", "1", "r1").apply("F1"),
            Transition::sym("r1", "0", "r0").apply("F0"),
            Transition::sym("r1", "1", "r1").apply("F1"),
            Transition::sym("r1", "c", "acc"),
        ],
    );
    let pred = LanguagePredicate::new("BIN", &["0", "1", "c"], |w| {
        let parts: Vec<&[usize]> = w.split(|&x| x == 2).collect();
        let [u, zeros, v, tail] = parts[..] else { return false };
        if !tail.is_empty() || u.first() != Some(&1) || zeros.iter().any(|&x| x != 0) {
            return false;
        }
        let text: String = u.iter().map(|&x| if x == 0 { '0' } else { '1' }).collect();
        let value = base_m_encode(&text, 2).expect("binary").1;
        BigInt::from(zeros.len()) == value && v.iter().eq(u.iter().rev())
    });
    entry(
        "BIN",
        spec,
        pred,
        Provenance::PaperTraceDerived,
        "entries 2 and 3 both hold e2(w); D decrements the second, F0/F1 decode the third bit by bit",
        9,
    )
}

fn subsetsum() -> ZooEntry {
    // e1: t minus the selected sum, e2: current selected number, e3 = e4: the
    // current power of two, e5: constant 1
    let mut a_t1 = rm(&[
        &["1", "0", "0", "0", "0"],
        &["0", "1", "0", "0", "0"],
        &["0", "0", "1", "1", "0"],
        &["0", "0", "1", "1", "0"],
        &["0", "0", "0", "0", "1"],
    ]);
    let a_t0 = a_t1.clone();
    a_t1.set(2, 0, BigRational::one());
    let mut a_1 = a_t0.clone();
    a_1.set(2, 1, BigRational::one());
    let a_hash = rm(&[
        &["1", "0", "0", "0", "0"],
        &["-1", "0", "0", "0", "0"],
        &["0", "0", "0", "0", "0"],
        &["0", "0", "0", "0", "0"],
        &["0", "0", "1", "1", "1"],
    ]);
    let mut t = vec![
        Transition::sym("T0", "0", "T").apply("AT0"),
        Transition::sym("T0", "1", "T").apply("AT1"),
        Transition::sym("T", "0", "T").apply("AT0"),
        Transition::sym("T", "1", "T").apply("AT1"),
        Transition::sym("T", "#", "S0").apply("Ahash"),
    ];
    for s in ["S0", "S"] {
        t.push(Transition::sym(s, "0", "Sel").apply("A0"));
        t.push(Transition::sym(s, "1", "Sel").apply("A1"));
        t.push(Transition::sym(s, "0", "Skip"));
        t.push(Transition::sym(s, "1", "Skip"));
    }
    t.extend([
        Transition::sym("Sel", "0", "Sel").apply("A0"),
        Transition::sym("Sel", "1", "Sel").apply("A1"),
        Transition::sym("Skip", "0", "Skip"),
        Transition::sym("Skip", "1", "Skip"),
        Transition::sym("Sel", "#", "S").apply("Ahash"),
        Transition::sym("Skip", "#", "S").apply("Ahash"),
    ]);
    let spec = machine(
        MachineKind::Hva,
        mode(false, true, true, false),
        5,
        &["0", "1", "#"],
        &["T0", "T", "S0", "S", "Sel", "Skip"],
        &["S"],
        Some(rv(&[0, 0, 1, 1, 1])),
        vec![("AT0", a_t0.clone()), ("AT1", a_t1), ("A0", a_t0), ("A1", a_1), ("Ahash", a_hash)],
        t,
    );
    let pred = LanguagePredicate::new("SUBSETSUM_r", &["0", "1", "#"], |w| match subsetsum_instance(w) {
        Some((t, xs)) => subset_sum_reaches(&xs, &t),
        None => false,
    });
    entry(
        "SUBSETSUM_r",
        spec,
        pred,
        Provenance::PaperTraceDerived,
        "numbers are written least significant bit first; all matrices have entries in {-1,0,1}",
        9,
    )
}

/// Parses `t#a1#...#an#` with reversed binary blocks, `n ≥ 1`.
pub fn subsetsum_instance(w: &[usize]) -> Option<(BigInt, Vec<BigInt>)> {
    if w.last() != Some(&2) {
        return None;
    }
    let blocks: Vec<&[usize]> = w[..w.len() - 1].split(|&x| x == 2).collect();
    if blocks.len() < 2 || blocks.iter().any(|b| b.is_empty()) {
        return None;
    }
    let mut values = blocks.iter().map(|b| {
        let text: String = b.iter().map(|&x| if x == 0 { '0' } else { '1' }).collect();
        base_m_encode_reverse(&text, 2).expect("binary").1
    });
    let t = values.next()?;
    Some((t, values.collect()))
}

fn subset_sum_reaches(xs: &[BigInt], t: &BigInt) -> bool {
    (0u64..1 << xs.len()).any(|mask| {
        let s: BigInt = xs.iter().enumerate().filter(|(i, _)| mask >> i & 1 == 1).map(|(_, x)| x).sum();
        &s == t
    })
}

fn mult() -> ZooEntry {
    let m = |h: HeisenbergElem| h.to_matrix();
    let spec = machine(
        MachineKind::Efa,
        mode(false, true, false, false),
        3,
        &["x", "y", "z"],
        &["qx", "qy", "qz", "qa", "qb"],
        &["qb"],
        None,
        vec![
            ("a", m(HeisenbergElem::A)),
            ("b", m(HeisenbergElem::B)),
            ("cinv", m(HeisenbergElem::C.inverse())),
            ("ainv", m(HeisenbergElem::A.inverse())),
            ("binv", m(HeisenbergElem::B.inverse())),
        ],
        vec![
            Transition::sym("qx", "x", "qx").apply("a"),
            Transition::eps("qx", "qy"),
            Transition::sym("qy", "y", "qy").apply("b"),
            Transition::eps("qy", "qz"),
            Transition::sym("qz", "z", "qz").apply("cinv"),
            Transition::eps("qz", "qa"),
            Transition::eps("qa", "qa").apply("ainv"),
            Transition::eps("qa", "qb"),
            Transition::eps("qb", "qb").apply("binv"),
        ],
    );
    let pred = LanguagePredicate::new("MULT", &["x", "y", "z"], |w| {
        let p = w.iter().take_while(|&&s| s == 0).count();
        let q = w[p..].iter().take_while(|&&s| s == 1).count();
        let r = &w[p + q..];
        r.iter().all(|&s| s == 2) && r.len() == p * q
    });
    let mut e = entry(
        "MULT",
        spec,
        pred,
        Provenance::Derived,
        "x, y, z multiply a, b, c^-1; empty loops then unwind a^p and b^q; accepting paths take at most 2n + 4 steps",
        9,
    );
    e.budget = Budget { max_steps: StepBound::affine(2, 4), ..Budget::default() };
    e
}
