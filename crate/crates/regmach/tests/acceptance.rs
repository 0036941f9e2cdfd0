//! One line per acceptance criterion. Run with `cargo test --test acceptance`.

use std::collections::HashSet;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use regmach::algebra::{
    freeword_to_matrix, generator_matrix, growth_ball, heis_mul, heis_to_matrix, mat_mul, BigRational, FreeWord,
    GeneratorSet, HeisenbergElem, PolycyclicElem, RMatrix, DEFAULT_BALL_CAP,
};
use regmach::analysis::{
    compare, dissimilarity, enumerate_machine, parikh, uniform_witnesses, words, LanguagePredicate, MachineOracle,
    Oracle, DEFAULT_DISSIM_CAP,
};
use regmach::encodings::{gsb_decode, gsb_encode};
use regmach::transforms::{
    bhva1_to_kbca, diophantine_to_zero_dfamw, kbca_to_bhva1, kbca_to_bhva_k1, polycyclic_to_free, zero_dfamw_to_diophantine,
};
use regmach::valence::{
    vnfa_to_vpda, vpda_to_vnfa, PdaTransition, ValenceEffect, ValenceNfa, ValencePda, ValenceTransition,
};
use regmach::zoo::{zoo_check, zoo_get, zoo_names};
use regmach::{Budget, MachineSpec, Outcome, Status, StepBound};

type Check = fn() -> Result<String, String>;

fn ensure(cond: bool, msg: impl Into<String>) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn within(t: Instant, limit: Duration) -> Result<String, String> {
    let e = t.elapsed();
    ensure(e < limit, format!("took {e:.2?}, limit {limit:?}"))?;
    Ok(format!("{e:.2?}"))
}

fn unary(lengths: impl IntoIterator<Item = usize>) -> Vec<String> {
    lengths.into_iter().map(|n| "a".repeat(n)).collect()
}

fn agree(a: &dyn Oracle, b: &dyn Oracle, max_len: usize) -> Result<usize, String> {
    let r = compare(a, b, max_len, 1).map_err(|e| e.to_string())?;
    ensure(r.agreed, format!("first disagreement {:?}, {} unknown", r.first_disagreement, r.unknown.len()))?;
    Ok(r.checked)
}

fn machine_agree(a: &MachineSpec, b: &MachineSpec, max_len: usize) -> Result<usize, String> {
    let (ma, mb) = (a.compile().map_err(|e| e.to_string())?, b.compile().map_err(|e| e.to_string())?);
    let budget = Budget::default();
    agree(&MachineOracle { machine: &ma, budget }, &MachineOracle { machine: &mb, budget }, max_len)
}

fn upow() -> Result<String, String> {
    let t = Instant::now();
    let m = zoo_get("UPOW").unwrap().spec.compile().unwrap();
    let s = enumerate_machine(&m, 64, &Budget::steps(600), 1);
    ensure(s.unknown.is_empty(), format!("unknown: {:?}", s.unknown))?;
    ensure(s.accepted == unary([1, 2, 4, 8, 16, 32, 64]), format!("accepted lengths {:?}", lens(&s.accepted)))?;
    within(t, Duration::from_secs(10))
}

fn lens(ws: &[String]) -> Vec<usize> {
    ws.iter().map(String::len).collect()
}

fn upow_odd() -> Result<String, String> {
    let e = zoo_get("UPOW_odd").unwrap();
    let m = e.spec.compile().unwrap();
    let s = enumerate_machine(&m, 128, &e.budget, 1);
    ensure(s.unknown.is_empty(), format!("unknown: {:?}", lens(&s.unknown)))?;
    ensure(s.accepted == unary([2, 8, 32, 128]), format!("accepted lengths {:?}", lens(&s.accepted)))?;
    // register after the first ε step and x loop steps
    let (a1, a2) = (e.spec.matrix("A1").unwrap(), e.spec.matrix("A2").unwrap());
    let mut reg = a1.clone();
    for x in 0..=6u32 {
        let want = RMatrix::from_rows(vec![
            vec![BigRational::from_int(1 << (x + 1)), BigRational::zero()],
            vec![BigRational::from_int(1 << x), BigRational::new(1, 1 << (x + 1)).unwrap()],
        ])
        .unwrap();
        ensure(reg == want, format!("trace differs at x = {x}: {reg}"))?;
        reg = mat_mul(&reg, a2).unwrap();
    }
    Ok("trace x <= 6".into())
}

fn gsb_injective() -> Result<String, String> {
    let t = Instant::now();
    let ws = words(3, 7);
    ensure(ws.len() == 3280, format!("{} strings", ws.len()))?;
    let mut seen = HashSet::new();
    for w in &ws {
        let v = gsb_encode(w, 3).map_err(|e| e.to_string())?;
        ensure(gsb_decode(&v).ok().as_ref() == Some(w), format!("decode failed on {w:?}"))?;
        ensure(seen.insert(v), format!("collision at {w:?}"))?;
    }
    let took = within(t, Duration::from_secs(5))?;
    Ok(format!("3280 strings, 0 collisions, {took}"))
}

fn mpal3() -> Result<String, String> {
    let r = zoo_check("MPAL_3", 9, None, 1).map_err(|e| e.to_string())?;
    ensure(r.agreed, format!("first disagreement {:?}", r.first_disagreement))?;
    Ok(format!("{} strings", r.checked))
}

fn counters_round_trip() -> Result<String, String> {
    let mut total = 0;
    for name in ["ANBN", "ANBNCN"] {
        let e = zoo_get(name).unwrap();
        let hva = kbca_to_bhva1(&e.spec).map_err(|e| e.to_string())?;
        let back = bhva1_to_kbca(&hva).map_err(|e| e.to_string())?;
        ensure(hva.dimension == 1, "not one-dimensional")?;
        total += machine_agree(&e.spec, &hva, 10)?;
        total += machine_agree(&hva, &back, 10)?;
        total += machine_agree(&e.spec, &back, 10)?;
    }
    Ok(format!("{total} comparisons"))
}

fn counters_to_unit_matrices() -> Result<String, String> {
    let e = zoo_get("ANBNCN").unwrap();
    let hva = kbca_to_bhva_k1(&e.spec).map_err(|e| e.to_string())?;
    ensure(hva.dimension == 3, format!("dimension {}", hva.dimension))?;
    let units = [BigRational::from_int(-1), BigRational::zero(), BigRational::one()];
    ensure(hva.matrices.values().all(|m| m.entries().iter().all(|x| units.contains(x))), "entry outside {-1,0,1}")?;
    let n = machine_agree(&e.spec, &hva, 9)?;
    Ok(format!("{n} strings"))
}

fn faithfulness() -> Result<String, String> {
    let mut rng = StdRng::seed_from_u64(7);
    let mut trivial = 0;
    for i in 0..1000 {
        let len = rng.gen_range(0..=20);
        let mut letters: Vec<i32> = (0..len).map(|_| [1, -1, 2, -2][rng.gen_range(0..4)]).collect();
        if i % 2 == 0 {
            // make half of them cancel: u v v⁻¹ u⁻¹ truncated to 20
            let half: Vec<i32> = letters.iter().take(10).copied().collect();
            letters = half.clone();
            letters.extend(half.iter().rev().map(|l| -l));
        }
        let raw = letters.iter().fold(RMatrix::identity(2), |m, &l| mat_mul(&m, &generator_matrix(l).unwrap()).unwrap());
        let w = FreeWord::from_letters(letters.iter().copied());
        let via_word = freeword_to_matrix(&w).unwrap();
        ensure(raw == via_word, format!("product mismatch on {letters:?}"))?;
        ensure(via_word.is_identity() == reduces_to_empty(&letters), format!("faithfulness fails on {letters:?}"))?;
        trivial += usize::from(w.is_empty());
    }
    for _ in 0..1000 {
        let mut r = || HeisenbergElem::new(rng.gen_range(-50..=50), rng.gen_range(-50..=50), rng.gen_range(-50..=50));
        let (g, h) = (r(), r());
        let lhs = heis_to_matrix(&heis_mul(&g, &h));
        let rhs = mat_mul(&heis_to_matrix(&g), &heis_to_matrix(&h)).unwrap();
        ensure(lhs == rhs, format!("Heisenberg law fails on {g:?} {h:?}"))?;
    }
    Ok(format!("1000 words ({trivial} trivial), 1000 triples"))
}

fn reduces_to_empty(ls: &[i32]) -> bool {
    let mut st: Vec<i32> = Vec::new();
    for &l in ls {
        if st.last() == Some(&-l) {
            st.pop();
        } else {
            st.push(l);
        }
    }
    st.is_empty()
}

fn f2_ball() -> Result<GeneratorSet, String> {
    GeneratorSet::new("F2", vec![generator_matrix(1).unwrap(), generator_matrix(2).unwrap()]).map_err(|e| e.to_string())
}

fn growth() -> Result<String, String> {
    let f2 = f2_ball()?;
    for n in 0..=3usize {
        let (size, _) = growth_ball(&f2, n, DEFAULT_BALL_CAP).map_err(|e| e.to_string())?;
        let closed = 2 * 3usize.pow(n as u32) - 1;
        ensure(size == closed && size == [1, 5, 17, 53][n], format!("F2 ball {n} has {size}"))?;
    }
    let z = GeneratorSet::new("Z", vec![RMatrix::from_ints(&[&[1, 1], &[0, 1]])]).unwrap();
    for n in 0..=10 {
        let (size, _) = growth_ball(&z, n, DEFAULT_BALL_CAP).map_err(|e| e.to_string())?;
        ensure(size == 2 * n + 1, format!("Z ball {n} has {size}"))?;
    }
    Ok("F2 1,5,17,53; Z 2n+1".into())
}

fn dissim() -> Result<String, String> {
    let mut checked = Vec::new();
    for name in zoo_names() {
        let p = zoo_get(name).unwrap().predicate;
        if p.alphabet.len() != 2 {
            continue;
        }
        for n in 0..=6 {
            let d = dissimilarity(&p, n, DEFAULT_DISSIM_CAP).map_err(|e| format!("{name}: {e}"))?;
            ensure(d.u <= d.a, format!("{name} n={n}: U={} A={}", d.u, d.a))?;
        }
        checked.push(name);
    }
    // reduced words of length <= n are uniformly dissimilar within 2n
    let wf2 = zoo_get("W_F2").unwrap().predicate;
    let f2 = f2_ball()?;
    for n in 0..=3 {
        let set: Vec<Vec<usize>> = words(4, n)
            .into_iter()
            .filter(|w| w.windows(2).all(|p| p[0] != p[1] ^ 2))
            .collect();
        let g = growth_ball(&f2, n, DEFAULT_BALL_CAP).map_err(|e| e.to_string())?.0;
        ensure(set.len() == g, format!("{} reduced words vs ball {g}", set.len()))?;
        ensure(uniform_witnesses(&wf2, 2 * n, &set).is_some(), format!("no uniform witnesses at n={n}"))?;
    }
    Ok(format!("U <= A on {} languages; U(2n) >= g(n) for n <= 3", checked.len()))
}

fn lsb_bits(v: u32) -> Vec<usize> {
    if v == 0 {
        return vec![0];
    }
    let mut out = Vec::new();
    let mut v = v;
    while v > 0 {
        out.push((v & 1) as usize);
        v >>= 1;
    }
    out
}

fn subset_sum() -> Result<String, String> {
    let t = Instant::now();
    let e = zoo_get("SUBSETSUM_r").unwrap();
    let m = e.spec.compile().unwrap();
    let mut count = 0;
    for k in 1..=3u32 {
        for code in 0..16u32.pow(k + 1) {
            let vals: Vec<u32> = (0..=k).map(|i| code / 16u32.pow(i) % 16).collect();
            let mut w = Vec::new();
            for &v in &vals {
                w.extend(lsb_bits(v));
                w.push(2);
            }
            let (target, xs) = (vals[0], &vals[1..]);
            let want = (0u32..1 << xs.len())
                .any(|mask| xs.iter().enumerate().filter(|(i, _)| mask >> i & 1 == 1).map(|(_, x)| x).sum::<u32>() == target);
            let got = m.run(&w, &e.budget).outcome;
            ensure(got != Outcome::BudgetExhausted, format!("unknown on {vals:?}"))?;
            ensure((got == Outcome::Accepted) == want, format!("disagrees on target {target}, numbers {xs:?}"))?;
            count += 1;
        }
    }
    let took = within(t, Duration::from_secs(60))?;
    Ok(format!("{count} instances, {took}"))
}

fn s(x: &str) -> String {
    x.to_string()
}

fn anbncn_pda() -> ValencePda {
    let pt = |from: &str, read: Option<&str>, pop: Option<&str>, push: &[&str], to: &str, effect: ValenceEffect| {
        PdaTransition { from: s(from), read: read.map(s), pop: pop.map(s), push: push.iter().map(|x| s(x)).collect(), to: s(to), effect }
    };
    let id = ValenceEffect::identity;
    ValencePda {
        alphabet: vec![s("a"), s("b"), s("c")],
        stack_alphabet: vec![s("X")],
        states: vec![s("p"), s("q"), s("r")],
        initial: s("p"),
        accept: vec![s("r")],
        transitions: vec![
            pt("p", Some("a"), None, &["X"], "p", ValenceEffect::z(&[1])),
            pt("p", None, None, &[], "q", id()),
            pt("q", Some("b"), Some("X"), &[], "q", id()),
            pt("q", None, None, &[], "r", id()),
            pt("r", Some("c"), None, &[], "r", ValenceEffect::z(&[-1])),
        ],
    }
}

fn anbncn() -> LanguagePredicate {
    LanguagePredicate::new("anbncn", &["a", "b", "c"], |w| {
        let n = w.len() / 3;
        w.len() % 3 == 0 && w.iter().enumerate().all(|(i, &x)| x == i / n.max(1))
    })
}

fn pushdown_round_trip() -> Result<String, String> {
    let budget = Budget::default();
    let pda = anbncn_pda();
    let nfa = vpda_to_vnfa(&pda).map_err(|e| e.to_string())?;
    let two_letters = |p: &PolycyclicElem| match p {
        PolycyclicElem::Zero => true,
        PolycyclicElem::Elem { pop, push } => pop.iter().chain(push).all(|c| ['a', 'b'].contains(c)),
    };
    ensure(nfa.transitions.iter().all(|t| two_letters(&t.effect.poly)), "stack code uses more than two letters")?;
    let back = vnfa_to_vpda(&nfa).map_err(|e| e.to_string())?;
    let (a, b, c) = (pda.compile(), nfa.compile(), back.compile());
    let (a, b, c) = (a.map_err(|e| e.to_string())?, b.map_err(|e| e.to_string())?, c.map_err(|e| e.to_string())?);
    let pred = anbncn();
    let mut n = agree(&a.oracle(budget), &pred, 9)?;
    n += agree(&a.oracle(budget), &b.oracle(budget), 9)?;
    n += agree(&b.oracle(budget), &c.oracle(budget), 9)?;
    n += agree(&c.oracle(budget), &pred, 9)?;
    Ok(format!("{n} comparisons"))
}

fn zero_dfamw() -> Result<String, String> {
    let ab = vec![s("a"), s("b")];
    let b = vec![vec![1, -1]];
    let spec = diophantine_to_zero_dfamw(&b, &ab).map_err(|e| e.to_string())?;
    let eq = LanguagePredicate::new("eq", &["a", "b"], |w| parikh(w, 2)[0] == parikh(w, 2)[1]);
    let m = spec.compile().unwrap();
    agree(&MachineOracle { machine: &m, budget: Budget::default() }, &eq, 10)?;
    let sys = zero_dfamw_to_diophantine(&spec).map_err(|e| e.to_string())?;
    let again = diophantine_to_zero_dfamw(&sys.matrix, &sys.alphabet).map_err(|e| e.to_string())?;
    machine_agree(&spec, &again, 10)?;
    let mut stateless = Vec::new();
    for name in zoo_names() {
        let e = zoo_get(name).unwrap();
        let sp = &e.spec;
        if !(sp.is_stateless() && sp.transitions.iter().all(|t| t.status == Status::Any)) {
            continue;
        }
        let mats: Vec<RMatrix> = sp.transitions.iter().filter_map(|t| sp.effect_matrix(&t.effect)).collect();
        let commute = mats.iter().all(|x| mats.iter().all(|y| mat_mul(x, y).unwrap() == mat_mul(y, x).unwrap()));
        if !commute {
            continue;
        }
        let m = sp.compile().unwrap();
        let mut seen = std::collections::HashMap::new();
        for w in words(sp.alphabet.len(), 8) {
            let v = m.run(&w, &e.budget).outcome;
            ensure(v != Outcome::BudgetExhausted, format!("{name}: unknown on {w:?}"))?;
            let prev = *seen.entry(parikh(&w, sp.alphabet.len())).or_insert(v);
            ensure(prev == v, format!("{name} is not commutative at {w:?}"))?;
        }
        stateless.push(name);
    }
    Ok(format!("commutative: {}", stateless.join(", ")))
}

fn mult() -> Result<String, String> {
    let e = zoo_get("MULT").unwrap();
    let m = e.spec.compile().unwrap();
    let s = enumerate_machine(&m, 12, &e.budget, 1);
    ensure(s.unknown.is_empty(), format!("{} unknown", s.unknown.len()))?;
    let mut want = Vec::new();
    for len in 0..=12usize {
        for p in 0..=len {
            for q in 0..=len - p {
                if p + q + p * q == len {
                    want.push(format!("{}{}{}", "x".repeat(p), "y".repeat(q), "z".repeat(p * q)));
                }
            }
        }
    }
    let got: HashSet<&String> = s.accepted.iter().collect();
    ensure(got == want.iter().collect(), format!("accepted {:?}", s.accepted))?;
    Ok(format!("{} members", want.len()))
}

fn dyck_polycyclic() -> ValenceNfa {
    let t = |read: &str, p: PolycyclicElem| ValenceTransition {
        from: s("q"),
        read: Some(s(read)),
        to: s("q"),
        effect: ValenceEffect::poly(p),
    };
    ValenceNfa {
        alphabet: vec![s("("), s(")")],
        states: vec![s("q")],
        initial: s("q"),
        accept: vec![s("q")],
        transitions: vec![t("(", PolycyclicElem::push('x')), t(")", PolycyclicElem::pop('x'))],
    }
}

fn polycyclic_free() -> Result<String, String> {
    let p = dyck_polycyclic();
    let f = polycyclic_to_free(&p).map_err(|e| e.to_string())?;
    ensure(f.transitions.iter().all(|t| t.effect.poly.is_identity()), "polycyclic effect left")?;
    let (cp, cf) = (p.compile().map_err(|e| e.to_string())?, f.compile().map_err(|e| e.to_string())?);
    let pred = zoo_get("DYCK").unwrap().predicate;
    let linear = Budget { max_steps: StepBound::affine(4, 4), ..Budget::default() };
    agree(&cp.oracle(Budget::default()), &pred, 10)?;
    let n = agree(&cf.oracle(linear), &pred, 10)?;
    let mut longest = 0;
    for w in words(2, 10) {
        let v = cf.run(&w, &linear);
        if let Some(path) = v.witness {
            ensure(path.len() <= 4 * w.len() + 4, format!("witness of {} steps for length {}", path.len(), w.len()))?;
            longest = longest.max(path.len());
        }
    }
    Ok(format!("{n} strings, longest witness {longest}"))
}

fn main() -> ExitCode {
    let criteria: [(&str, Check); 14] = [
        ("UPOW accepts exactly the powers of two up to 64", upow),
        ("UPOW_odd accepts a^2, a^8, a^32, a^128 and reproduces its trace", upow_odd),
        ("generalized Stern-Brocot encoding is injective on 3 symbols up to length 7", gsb_injective),
        ("MPAL_3 agrees with w#w^r up to length 9", mpal3),
        ("counter to HVA(1) round trip on anbn and anbncn up to length 10", counters_round_trip),
        ("2-counter anbncn to HVA(3) with entries in {-1,0,1} up to length 9", counters_to_unit_matrices),
        ("free group representation and Heisenberg law on random samples", faithfulness),
        ("ball sizes of F2 and Z", growth),
        ("uniform vs pairwise dissimilarity and the F2 word problem bound", dissim),
        ("SUBSETSUM_r agrees with brute-force subset sum", subset_sum),
        ("pushdown with Z valence to P2 x Z automaton and back up to length 9", pushdown_round_trip),
        ("stateless multiplication automata and commutativity", zero_dfamw),
        ("MULT accepts exactly x^p y^q z^pq up to length 12", mult),
        ("polycyclic to free conversion on Dyck words with 4n+4 witnesses", polycyclic_free),
    ];
    let mut failed = 0;
    for (i, (desc, check)) in criteria.iter().enumerate() {
        let t = Instant::now();
        let result = catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|_| Err("panicked".into()));
        match result {
            Ok(detail) => println!("PASS {:>2} {desc} ({detail}; {:.2?})", i + 1, t.elapsed()),
            Err(why) => {
                failed += 1;
                println!("FAIL {:>2} {desc}: {why}", i + 1);
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
