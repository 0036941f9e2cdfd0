use regmach::algebra::BigRational;
use regmach::machine::Rule;
use regmach::zoo::{zoo_get, zoo_names};
use regmach::{counter_status, Effect, Error, MachineKind, MachineSpec, Read, Status, Transition, ZeroTest};

const EXAMPLE: &str = r#"{"kind":"hva","mode":{"deterministic":true,"blind":false,"realtime":true,"endmarker":false},"dimension":2,"alphabet":["a","b"],"states":["q1","q2"],"initial_state":"q1","accept_states":["q2"],"initial_vector":["1","1"],"matrices":{"A":[["1","0"],["-1","1"]]},"transitions":[{"from":"q1","read":"a","status":"any","to":"q2","apply":"A","move":"right"}]}"#;

const COUNTER: &str = r#"{"kind":"counter","mode":{"deterministic":false,"blind":true,"realtime":false,"endmarker":false},"dimension":2,"alphabet":["a","b"],"states":["p"],"initial_state":"p","accept_states":["p"],"transitions":[{"from":"p","read":"a","status":"any","to":"p","delta":[1,0],"move":"right"},{"from":"p","read":null,"status":"any","to":"p","delta":[0,-1],"move":"stay"}]}"#;

fn example() -> MachineSpec {
    MachineSpec::from_json(EXAMPLE).unwrap()
}

fn fam() -> MachineSpec {
    let mut s = example();
    s.kind = MachineKind::Fam;
    s.dimension = 1;
    s.initial_vector = None;
    s.matrices.clear();
    s.mode.endmarker = true;
    s.mode.realtime = false;
    s.transitions = vec![
        Transition::sym("q1", "a", "q1").multiply(BigRational::from_int(2)),
        Transition::end("q1", "q2").stay(),
    ];
    s
}

#[test]
fn counter_status_examples() {
    use ZeroTest::*;
    assert_eq!(counter_status(&[0, 0]), vec![Eq, Eq]);
    assert_eq!(counter_status(&[0, -3]), vec![Eq, Neq]);
    assert_eq!(counter_status(&[5, 0, 1]), vec![Neq, Eq, Neq]);
    assert_eq!(counter_status(&[]), vec![]);
}

#[test]
fn json_example_parses_and_reserializes_bit_exactly() {
    let s = example();
    assert_eq!(s.kind, MachineKind::Hva);
    assert!(s.mode.deterministic && s.mode.realtime && !s.mode.blind);
    assert_eq!(s.transitions[0].effect, Effect::Matrix("A".into()));
    assert!(s.validate().is_ok());
    assert_eq!(s.to_json(), EXAMPLE);

    let c = MachineSpec::from_json(COUNTER).unwrap();
    assert_eq!(c.transitions[1].read, Read::Eps);
    assert_eq!(c.transitions[1].effect, Effect::Delta(vec![0, -1]));
    assert!(c.validate().is_ok(), "{}", c.validate());
    assert_eq!(c.to_json(), COUNTER);
}

#[test]
fn counter_statuses_are_tuples() {
    let mut c = MachineSpec::from_json(COUNTER).unwrap();
    c.mode.blind = false;
    c.transitions[0].status = Status::Counters(vec![ZeroTest::Eq, ZeroTest::Neq]);
    let json = c.to_json();
    assert!(json.contains(r#""status":["eq","neq"]"#), "{json}");
    assert_eq!(MachineSpec::from_json(&json).unwrap(), c);
}

#[test]
fn endmarker_reads_serialize_as_dollar() {
    let f = fam();
    assert!(f.validate().is_ok(), "{}", f.validate());
    let json = f.to_json();
    assert!(json.contains(r#""read":"$""#), "{json}");
    assert_eq!(MachineSpec::from_json(&json).unwrap(), f);
}

#[test]
fn bad_json_is_an_error() {
    assert!(matches!(MachineSpec::from_json("{"), Err(Error::Json(_))));
    let wrong_rational = EXAMPLE.replace(r#"["-1","1"]"#, r#"["-2/2","1"]"#);
    assert!(MachineSpec::from_json(&wrong_rational).is_err());
}

#[test]
fn every_zoo_machine_validates_and_round_trips() {
    for name in zoo_names() {
        let spec = zoo_get(name).unwrap().spec;
        assert!(spec.validate().is_ok(), "{name}: {}", spec.validate());
        let json = spec.to_json();
        let back = MachineSpec::from_json(&json).unwrap();
        assert_eq!(back, spec, "{name}");
        assert_eq!(back.to_json(), json, "{name}");
        assert_eq!(MachineSpec::from_json(&spec.to_json_pretty()).unwrap(), spec, "{name}");
    }
}

#[test]
fn stateless_view() {
    assert!(zoo_get("EQ").unwrap().spec.is_stateless());
    assert!(!example().is_stateless());
    assert!(MachineSpec::from_json(COUNTER).unwrap().is_stateless());
}

/// One corruption per mode rule, each applied to a valid base machine.
fn corrupted() -> Vec<(Rule, MachineSpec)> {
    let mut out = Vec::new();
    let mut push = |rule, base: MachineSpec, f: &dyn Fn(&mut MachineSpec)| {
        let mut s = base;
        f(&mut s);
        out.push((rule, s));
    };
    let hva = example();
    let counter = MachineSpec::from_json(COUNTER).unwrap();

    push(Rule::Determinism, hva.clone(), &|s| {
        s.mode.blind = false;
        let t = Transition::sym("q1", "a", "q1").status(Status::Eq);
        s.transitions = vec![t.clone(), t.apply("A")];
    });
    push(Rule::Blindness, hva.clone(), &|s| {
        s.mode.blind = true;
        s.transitions[0].status = Status::Eq;
    });
    push(Rule::Realtime, hva.clone(), &|s| s.transitions.push(Transition::eps("q2", "q1")));
    push(Rule::Realtime, hva.clone(), &|s| s.transitions[0] = Transition::sym("q1", "b", "q2").stay());
    push(Rule::Endmarker, hva.clone(), &|s| s.transitions.push(Transition::end("q2", "q2")));
    push(Rule::Dimension, hva.clone(), &|s| {
        s.matrices.insert("B".into(), regmach::algebra::RMatrix::identity(3));
    });
    push(Rule::Dimension, counter.clone(), &|s| s.transitions[0].effect = Effect::Delta(vec![1]));
    push(Rule::UnknownState, hva.clone(), &|s| s.transitions[0].to = "q9".into());
    push(Rule::UnknownState, hva.clone(), &|s| s.accept_states.push("q9".into()));
    push(Rule::UnknownSymbol, hva.clone(), &|s| s.transitions[0].read = Read::Sym("c".into()));
    push(Rule::UnknownMatrix, hva.clone(), &|s| s.transitions[0].effect = Effect::Matrix("Z".into()));
    push(Rule::EffectKind, hva.clone(), &|s| s.transitions[0].effect = Effect::Delta(vec![1, 0]));
    push(Rule::StatusShape, hva.clone(), &|s| s.transitions[0].status = Status::Counters(vec![ZeroTest::Eq]));
    push(Rule::StatusShape, counter.clone(), &|s| {
        s.mode.blind = false;
        s.transitions[0].status = Status::Counters(vec![ZeroTest::Eq]);
    });
    push(Rule::FamMultiplier, fam(), &|s| s.transitions[0].effect = Effect::Scalar(BigRational::from_int(-2)));
    push(Rule::FamMultiplier, fam(), &|s| s.transitions[0].effect = Effect::Scalar(BigRational::zero()));
    push(Rule::FamEndmarker, fam(), &|s| s.transitions.push(Transition::end("q2", "q2").stay()));
    push(Rule::FamEndmarker, fam(), &|s| s.transitions[1].mv = regmach::Move::Right);
    push(Rule::InitialVector, hva.clone(), &|s| s.initial_vector = None);
    push(Rule::InitialVector, counter.clone(), &|s| s.initial_vector = Some(regmach::algebra::RVector::ones(2)));
    push(Rule::Alphabet, hva.clone(), &|s| s.alphabet.push("$".into()));
    push(Rule::Alphabet, hva, &|s| s.alphabet.push("a".into()));
    out
}

#[test]
fn each_corruption_is_reported_under_its_rule() {
    let suite = corrupted();
    for (rule, spec) in &suite {
        let report = spec.validate();
        assert!(report.has(*rule), "{rule:?} not reported: {report}");
        assert!(matches!(spec.compile(), Err(Error::Invalid(_))), "{rule:?}");
    }
    // every rule is exercised
    let mut rules: Vec<Rule> = suite.iter().map(|(r, _)| *r).collect();
    rules.dedup();
    assert_eq!(rules.len(), 14);
}

#[test]
fn violations_name_the_transition() {
    let mut s = example();
    s.mode.blind = true;
    s.transitions.push(Transition::sym("q2", "b", "q2").status(Status::Neq));
    let report = s.validate();
    assert_eq!(report.violations.len(), 1);
    assert_eq!(report.violations[0].rule, Rule::Blindness);
    assert_eq!(report.violations[0].transition, Some(1));
    assert!(report.to_string().contains("transition 1"));
}

#[test]
fn deterministic_machines_may_branch_on_disjoint_statuses() {
    let mut s = example();
    s.transitions = vec![
        Transition::sym("q1", "a", "q1").status(Status::Eq),
        Transition::sym("q1", "a", "q2").status(Status::Neq).apply("A"),
        Transition::sym("q1", "b", "q2"),
    ];
    assert!(s.validate().is_ok(), "{}", s.validate());
}

#[test]
fn input_parsing() {
    let mpal = zoo_get("MPAL_3").unwrap().spec;
    let w = mpal.parse_input("a1,a2,#,a2,a1").unwrap();
    assert_eq!(w.len(), 5);
    assert_eq!(regmach::format_word(&mpal.alphabet, &w), "a1,a2,#,a2,a1");
    assert!(matches!(mpal.parse_input("a1a2"), Err(Error::AmbiguousInput(_)) | Err(Error::UnknownSymbol(_))));
    let ab = example();
    assert_eq!(ab.parse_input("abba").unwrap(), vec![0, 1, 1, 0]);
    assert_eq!(ab.parse_input("").unwrap(), Vec::<usize>::new());
    assert!(matches!(ab.parse_input("abc"), Err(Error::UnknownSymbol(_))));
}
