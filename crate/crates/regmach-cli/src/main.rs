//! `regmach`: load, run, enumerate, compare and transform register machines.
//!
//! Exit status: 0 accepted / agreed, 1 rejected / disagreed, 2 usage or
//! input error, 3 budget exhausted with nothing else to report.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use regmach::algebra::{
    generator_matrix, growth_series, BigRational, GeneratorSet, HeisenbergElem, RMatrix, RVector, DEFAULT_BALL_CAP,
};
use regmach::analysis::{compare, dissimilarity, enumerate, MachineOracle, Oracle, DEFAULT_DISSIM_CAP};
use regmach::encodings::{base_m_encode, base_m_encode_reverse, gsb_decode, gsb_encode, sb2_decode, sb2_encode};
use regmach::transforms::{run_named, transform_names, TransformOptions};
use regmach::valence::{cf_valence_derive, CFValenceGrammar, CompiledValence, ValenceMachine, DEFAULT_DERIVE_STEPS};
use regmach::zoo::{zoo_check, zoo_get, zoo_names};
use regmach::{
    format_word, parse_word, Budget, CompiledMachine, MachineSpec, Outcome, RunVerdict, StepBound, TimeMode,
};
use serde_json::{json, Value};

#[derive(Parser)]
#[command(name = "regmach", version, about = "Register machines with exact rational registers")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Run a machine on one input
    Run(RunArgs),
    /// List the accepted words up to a length
    Enumerate(EnumerateArgs),
    /// Compare a machine against a predicate or another machine
    Compare(CompareArgs),
    /// Apply a named transform and certify the result
    Convert(ConvertArgs),
    /// Built-in machines
    #[command(subcommand)]
    Zoo(ZooCmd),
    /// Encode a word as a vector
    Encode(EncodeArgs),
    /// Decode a vector back into a word
    Decode(DecodeArgs),
    /// Ball sizes of a matrix group
    Growth(GrowthArgs),
    /// Dissimilarity measures of a zoo language
    Dissim(DissimArgs),
    /// Derive a word in a context-free valence grammar
    Grammar(GrammarArgs),
}

#[derive(Args)]
#[group(required = true, multiple = false)]
struct Source {
    /// machine JSON file (register machine or valence automaton)
    #[arg(long)]
    machine: Option<PathBuf>,
    /// zoo entry
    #[arg(long)]
    zoo: Option<String>,
}

#[derive(Args)]
struct BudgetArgs {
    /// step bound: `N` or `Cn+D`
    #[arg(long)]
    max_steps: Option<String>,
    #[arg(long)]
    max_configs: Option<usize>,
}

#[derive(Args)]
struct RunArgs {
    #[command(flatten)]
    source: Source,
    /// symbols, concatenated or comma separated; empty for the empty word
    #[arg(long, allow_hyphen_values = true)]
    input: String,
    /// follow the single computation path, failing on a branch
    #[arg(long)]
    deterministic: bool,
    /// also check a time bound (`N` or `Cn+D`) on accepting paths
    #[arg(long)]
    time_bound: Option<String>,
    /// with --time-bound, require it of every path
    #[arg(long, requires = "time_bound")]
    strong: bool,
    #[command(flatten)]
    budget: BudgetArgs,
}

#[derive(Args)]
struct EnumerateArgs {
    #[command(flatten)]
    source: Source,
    #[arg(long, default_value_t = 8)]
    max_len: usize,
    #[arg(long, default_value_t = 1)]
    jobs: usize,
    #[command(flatten)]
    budget: BudgetArgs,
}

#[derive(Args)]
#[group(id = "other_side", required = true, multiple = false)]
struct Other {
    /// membership predicate of a zoo entry
    #[arg(long)]
    predicate: Option<String>,
    /// second machine JSON file
    #[arg(long)]
    other: Option<PathBuf>,
    /// second machine from the zoo
    #[arg(long)]
    other_zoo: Option<String>,
}

#[derive(Args)]
struct CompareArgs {
    #[command(flatten)]
    source: Source,
    #[command(flatten)]
    other: Other,
    #[arg(long, default_value_t = 8)]
    max_len: usize,
    #[arg(long, default_value_t = 1)]
    jobs: usize,
    #[command(flatten)]
    budget: BudgetArgs,
}

#[derive(Args)]
struct ConvertArgs {
    /// transform name; `--list` prints them
    #[arg(long, required_unless_present = "list")]
    transform: Option<String>,
    #[arg(long)]
    list: bool,
    /// input document (JSON)
    #[arg(long, required_unless_present = "list")]
    input: Option<PathBuf>,
    /// second document for binary transforms
    #[arg(long)]
    with: Option<PathBuf>,
    /// comma-separated start vector for efa_to_1nbhva
    #[arg(long)]
    vector: Option<String>,
    #[arg(long)]
    radius: Option<usize>,
    #[arg(long, default_value_t = 8)]
    max_len: usize,
    #[arg(long, default_value_t = 1)]
    jobs: usize,
    #[command(flatten)]
    budget: BudgetArgs,
}

#[derive(Subcommand)]
enum ZooCmd {
    /// Names, kinds and provenance
    List,
    /// Show one entry
    Get {
        name: String,
        /// print the machine definition
        #[arg(long)]
        json: bool,
    },
    /// Check an entry against its predicate
    Check {
        name: String,
        #[arg(long)]
        max_len: Option<usize>,
        #[arg(long, default_value_t = 1)]
        jobs: usize,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Scheme {
    Sb2,
    Gsb,
    BaseM,
}

#[derive(Args)]
struct EncodeArgs {
    #[arg(long, value_enum)]
    scheme: Scheme,
    /// ordered symbols; symbol i is digit i
    #[arg(long, value_delimiter = ',')]
    alphabet: Option<Vec<String>>,
    #[arg(long, allow_hyphen_values = true)]
    input: String,
    /// base for base-m (defaults to the alphabet size)
    #[arg(long)]
    base: Option<u32>,
    /// base-m: the length-recording variant
    #[arg(long)]
    reverse: bool,
}

#[derive(Args)]
struct DecodeArgs {
    #[arg(long, value_enum)]
    scheme: Scheme,
    #[arg(long, value_delimiter = ',')]
    alphabet: Option<Vec<String>>,
    /// comma-separated rational entries
    #[arg(long)]
    vector: String,
    #[arg(long)]
    base: Option<u32>,
    #[arg(long)]
    reverse: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum Group {
    F2,
    Z,
    Heisenberg,
}

#[derive(Args)]
struct GrowthArgs {
    #[arg(long, value_enum)]
    group: Group,
    #[arg(long)]
    n: usize,
    #[arg(long, default_value_t = DEFAULT_BALL_CAP)]
    cap: usize,
}

#[derive(Args)]
struct DissimArgs {
    /// zoo entry whose predicate is measured
    #[arg(long)]
    lang: String,
    #[arg(long)]
    n: usize,
    #[arg(long, default_value_t = DEFAULT_DISSIM_CAP)]
    cap: usize,
}

#[derive(Args)]
struct GrammarArgs {
    #[arg(long)]
    grammar: PathBuf,
    #[arg(long, allow_hyphen_values = true)]
    input: String,
    #[arg(long, default_value_t = DEFAULT_DERIVE_STEPS)]
    max_expansions: usize,
}

type Res = Result<ExitCode, String>;

/// `println!` that tolerates a closed pipe.
macro_rules! out {
    ($($t:tt)*) => {{
        use std::io::Write;
        let _ = writeln!(std::io::stdout(), $($t)*);
    }};
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let r = match cli.cmd {
        Cmd::Run(a) => cmd_run(a),
        Cmd::Enumerate(a) => cmd_enumerate(a),
        Cmd::Compare(a) => cmd_compare(a),
        Cmd::Convert(a) => cmd_convert(a),
        Cmd::Zoo(z) => cmd_zoo(z),
        Cmd::Encode(a) => cmd_encode(a),
        Cmd::Decode(a) => cmd_decode(a),
        Cmd::Growth(a) => cmd_growth(a),
        Cmd::Dissim(a) => cmd_dissim(a),
        Cmd::Grammar(a) => cmd_grammar(a),
    };
    r.unwrap_or_else(|e| {
        eprintln!("error: {e}");
        ExitCode::from(2)
    })
}

fn err(e: impl std::fmt::Display) -> String {
    e.to_string()
}

fn read(p: &Path) -> Result<String, String> {
    std::fs::read_to_string(p).map_err(|e| format!("{}: {e}", p.display()))
}

/// Sorted keys, since `serde_json::Map` is ordered.
fn emit(v: impl serde::Serialize) -> Result<(), String> {
    let v = serde_json::to_value(v).map_err(err)?;
    out!("{}", serde_json::to_string_pretty(&v).map_err(err)?);
    Ok(())
}

fn outcome_code(o: Outcome) -> ExitCode {
    match o {
        Outcome::Accepted => ExitCode::SUCCESS,
        Outcome::Rejected => ExitCode::from(1),
        Outcome::BudgetExhausted => ExitCode::from(3),
    }
}

fn agreement_code(agreed: bool, disagreements: bool) -> ExitCode {
    if agreed {
        ExitCode::SUCCESS
    } else if disagreements {
        ExitCode::from(1)
    } else {
        ExitCode::from(3)
    }
}

fn parse_bound(s: &str) -> Result<StepBound, String> {
    let bad = || format!("bad step bound {s:?}; use N or Cn+D");
    let s: String = s.chars().filter(|c| !c.is_whitespace()).collect();
    match s.split_once('n') {
        None => s.parse().map(StepBound::fixed).map_err(|_| bad()),
        Some((c, d)) => {
            let c = if c.is_empty() { 1 } else { c.trim_end_matches('*').parse().map_err(|_| bad())? };
            let d = match d.strip_prefix('+') {
                Some(d) => d.parse().map_err(|_| bad())?,
                None if d.is_empty() => 0,
                None => return Err(bad()),
            };
            Ok(StepBound::affine(c, d))
        }
    }
}

impl BudgetArgs {
    fn over(&self, base: Budget) -> Result<Budget, String> {
        let mut b = base;
        if let Some(s) = &self.max_steps {
            b.max_steps = parse_bound(s)?;
        }
        if let Some(c) = self.max_configs {
            b = b.with_configs(c);
        }
        Ok(b)
    }
}

enum Loaded {
    Spec(CompiledMachine),
    Valence(CompiledValence),
}

impl Loaded {
    fn alphabet(&self) -> &[String] {
        match self {
            Loaded::Spec(m) => &m.alphabet,
            Loaded::Valence(m) => &m.alphabet,
        }
    }

    fn oracle(&self, budget: Budget) -> Box<dyn Oracle + '_> {
        match self {
            Loaded::Spec(m) => Box::new(MachineOracle { machine: m, budget }),
            Loaded::Valence(m) => Box::new(m.oracle(budget)),
        }
    }
}

/// A machine file is a register machine when it names its `kind`.
fn load_file(p: &Path) -> Result<Loaded, String> {
    let text = read(p)?;
    let v: Value = serde_json::from_str(&text).map_err(|e| format!("{}: {e}", p.display()))?;
    if v.get("kind").is_some() {
        let spec = MachineSpec::from_json(&text).map_err(err)?;
        Ok(Loaded::Spec(spec.compile().map_err(err)?))
    } else {
        let m = ValenceMachine::from_json(&text).map_err(err)?;
        Ok(Loaded::Valence(m.compile().map_err(err)?))
    }
}

/// The machine and the budget to use when no flag overrides it: the
/// engine default for files, the certified budget for zoo entries.
fn load(s: &Source) -> Result<(Loaded, Budget), String> {
    match (&s.machine, &s.zoo) {
        (Some(p), _) => Ok((load_file(p)?, Budget::default())),
        (None, Some(name)) => {
            let e = zoo_get(name).map_err(err)?;
            Ok((Loaded::Spec(e.spec.compile().map_err(err)?), e.budget))
        }
        (None, None) => Err("give --machine or --zoo".into()),
    }
}

fn cmd_run(a: RunArgs) -> Res {
    let (m, base) = load(&a.source)?;
    let budget = a.budget.over(base)?;
    let w = parse_word(m.alphabet(), &a.input).map_err(err)?;
    let v: RunVerdict = match (&m, a.deterministic) {
        (Loaded::Spec(c), true) => c.run_deterministic(&w, &budget).map_err(err)?,
        (Loaded::Valence(_), true) => return Err("--deterministic applies to register machines only".into()),
        (Loaded::Spec(c), false) => c.run(&w, &budget),
        (Loaded::Valence(c), false) => c.run(&w, &budget),
    };
    let mut out = serde_json::to_value(&v).map_err(err)?;
    out["input"] = json!(format_word(m.alphabet(), &w));
    if let Some(t) = &a.time_bound {
        let Loaded::Spec(c) = &m else {
            return Err("--time-bound applies to register machines only".into());
        };
        let mode = if a.strong { TimeMode::Strong } else { TimeMode::Weak };
        let tb = c.check_time_bound(&w, parse_bound(t)?, mode, &budget);
        out["time_bound"] = json!({ "bound": t, "mode": mode, "result": tb });
    }
    emit(&out)?;
    Ok(outcome_code(v.outcome))
}

fn cmd_enumerate(a: EnumerateArgs) -> Res {
    let (m, base) = load(&a.source)?;
    let budget = a.budget.over(base)?;
    let s = enumerate(m.oracle(budget).as_ref(), a.max_len, a.jobs);
    let code = if s.unknown.is_empty() { ExitCode::SUCCESS } else { ExitCode::from(3) };
    emit(&s)?;
    Ok(code)
}

fn cmd_compare(a: CompareArgs) -> Res {
    let (m, base) = load(&a.source)?;
    let budget = a.budget.over(base)?;
    let left = m.oracle(budget);
    let r = match (&a.other.predicate, &a.other.other, &a.other.other_zoo) {
        (Some(name), _, _) => {
            let e = zoo_get(name).map_err(err)?;
            compare(left.as_ref(), &e.predicate, a.max_len, a.jobs)
        }
        (_, Some(p), _) => {
            let o = load_file(p)?;
            let ob = a.budget.over(Budget::default())?;
            let r = compare(left.as_ref(), o.oracle(ob).as_ref(), a.max_len, a.jobs);
            r
        }
        (_, _, Some(name)) => {
            let e = zoo_get(name).map_err(err)?;
            let o = e.spec.compile().map_err(err)?;
            let ob = a.budget.over(e.budget)?;
            compare(left.as_ref(), &MachineOracle { machine: &o, budget: ob }, a.max_len, a.jobs)
        }
        _ => return Err("give --predicate, --other or --other-zoo".into()),
    }
    .map_err(err)?;
    emit(&r)?;
    Ok(agreement_code(r.agreed, r.disagreements > 0))
}

fn parse_vector(s: &str) -> Result<RVector, String> {
    let xs = s
        .split(',')
        .map(|x| x.trim().parse::<BigRational>().map_err(|_| format!("bad vector entry {x:?}")))
        .collect::<Result<Vec<_>, _>>()?;
    RVector::new(xs).map_err(err)
}

fn cmd_convert(a: ConvertArgs) -> Res {
    if a.list {
        emit(transform_names())?;
        return Ok(ExitCode::SUCCESS);
    }
    let (Some(name), Some(input)) = (&a.transform, &a.input) else {
        return Err("give --transform and --input".into());
    };
    let mut opts = TransformOptions {
        max_len: a.max_len,
        jobs: a.jobs,
        budget: a.budget.over(Budget::default())?,
        ..TransformOptions::default()
    };
    if let Some(p) = &a.with {
        opts.with = Some(read(p)?);
    }
    if let Some(v) = &a.vector {
        opts.vector = Some(parse_vector(v)?);
    }
    if let Some(r) = a.radius {
        opts.radius = r;
    }
    let rep = run_named(name, &read(input)?, &opts).map_err(err)?;
    let c = &rep.certificate;
    let code = agreement_code(c.agreed, c.first_disagreement.is_some());
    emit(&rep)?;
    Ok(code)
}

fn cmd_zoo(z: ZooCmd) -> Res {
    match z {
        ZooCmd::List => {
            for name in zoo_names() {
                let e = zoo_get(name).map_err(err)?;
                out!("{name}\t{:?}\t{:?}\t{}", e.spec.kind, e.provenance, e.check_len);
            }
            Ok(ExitCode::SUCCESS)
        }
        ZooCmd::Get { name, json } => {
            let e = zoo_get(&name).map_err(err)?;
            if json {
                out!("{}", e.spec.to_json_pretty());
            } else {
                let s = &e.spec;
                out!("name\t{}", e.name);
                out!("kind\t{:?}", s.kind);
                out!("mode\t{:?}", s.mode);
                out!("dimension\t{}", s.dimension);
                out!("alphabet\t{}", s.alphabet.join(","));
                out!("states\t{}", s.states.len());
                out!("transitions\t{}", s.transitions.len());
                out!("provenance\t{:?}", e.provenance);
                out!("check_len\t{}", e.check_len);
                out!("notes\t{}", e.notes);
            }
            Ok(ExitCode::SUCCESS)
        }
        ZooCmd::Check { name, max_len, jobs } => {
            let e = zoo_get(&name).map_err(err)?;
            let r = zoo_check(&name, max_len.unwrap_or(e.check_len), None, jobs).map_err(err)?;
            emit(&r)?;
            Ok(agreement_code(r.agreed, r.disagreements > 0))
        }
    }
}

fn symbols(alphabet: &Option<Vec<String>>, default: &[&str]) -> Vec<String> {
    match alphabet {
        Some(a) => a.clone(),
        None => default.iter().map(|s| s.to_string()).collect(),
    }
}

fn digits_alphabet(a: &Option<Vec<String>>, base: Option<u32>) -> Result<(Vec<String>, u32), String> {
    let m = match (base, a) {
        (Some(m), _) => m,
        (None, Some(a)) => a.len() as u32,
        (None, None) => return Err("base-m needs --base or --alphabet".into()),
    };
    let default: Vec<String> = (0..m.min(10)).map(|d| d.to_string()).collect();
    Ok((a.clone().unwrap_or(default), m))
}

fn cmd_encode(a: EncodeArgs) -> Res {
    let out = match a.scheme {
        Scheme::Sb2 => {
            let alpha = symbols(&a.alphabet, &["0", "1"]);
            if alpha.len() != 2 {
                return Err("sb2 needs a two-symbol alphabet".into());
            }
            let w = parse_word(&alpha, &a.input).map_err(err)?;
            let bits: Vec<u8> = w.iter().map(|&x| x as u8).collect();
            json!({ "scheme": "sb2", "vector": sb2_encode(&bits) })
        }
        Scheme::Gsb => {
            let alpha = a.alphabet.clone().ok_or("gsb needs --alphabet")?;
            let w = parse_word(&alpha, &a.input).map_err(err)?;
            json!({ "scheme": "gsb", "vector": gsb_encode(&w, alpha.len()).map_err(err)? })
        }
        Scheme::BaseM => {
            let (alpha, m) = digits_alphabet(&a.alphabet, a.base)?;
            if alpha.len() != m as usize {
                return Err(format!("base {m} needs {m} symbols"));
            }
            let w = parse_word(&alpha, &a.input).map_err(err)?;
            let digits: String = w.iter().map(|&d| char::from_digit(d as u32, 10).unwrap()).collect();
            let (v, value) = if a.reverse { base_m_encode_reverse(&digits, m) } else { base_m_encode(&digits, m) }
                .map_err(err)?;
            json!({ "scheme": "base-m", "base": m, "reverse": a.reverse, "vector": v, "value": value.to_string() })
        }
    };
    emit(&out)?;
    Ok(ExitCode::SUCCESS)
}

fn cmd_decode(a: DecodeArgs) -> Res {
    let v = parse_vector(&a.vector)?;
    let (alpha, w): (Vec<String>, Vec<usize>) = match a.scheme {
        Scheme::Sb2 => {
            let bits = sb2_decode(&v).map_err(err)?;
            (symbols(&a.alphabet, &["0", "1"]), bits.into_iter().map(usize::from).collect())
        }
        Scheme::Gsb => {
            let alpha = match &a.alphabet {
                Some(x) => x.clone(),
                None => (0..v.entries().len()).map(|i| i.to_string()).collect(),
            };
            if alpha.len() != v.entries().len() {
                return Err(format!("a {}-entry vector needs {} symbols", v.entries().len(), v.entries().len()));
            }
            (alpha, gsb_decode(&v).map_err(err)?)
        }
        Scheme::BaseM => {
            let (alpha, m) = digits_alphabet(&a.alphabet, a.base)?;
            (alpha, base_m_decode(&v, m, a.reverse)?)
        }
    };
    if w.iter().any(|&x| x >= alpha.len()) {
        return Err("alphabet too small for the decoded word".into());
    }
    emit(json!({ "word": format_word(&alpha, &w), "length": w.len() }))?;
    Ok(ExitCode::SUCCESS)
}

/// Digits of `(1, e(w))`, without leading zeros, or of `(m^|w|, e(reverse w))`.
fn base_m_decode(v: &RVector, m: u32, reverse: bool) -> Result<Vec<usize>, String> {
    use num_traits::{One, ToPrimitive, Zero};
    let bad = || format!("{v:?} is not a base-{m} encoding");
    let int = |q: &BigRational| if q.is_integer() { Some(q.numer()) } else { None };
    if v.entries().len() != 2 || m < 2 {
        return Err(bad());
    }
    let (Some(first), Some(mut value)) = (int(v.get(0)), int(v.get(1))) else {
        return Err(bad());
    };
    if value < Zero::zero() {
        return Err(bad());
    }
    let mut digits = Vec::new();
    while !value.is_zero() {
        digits.push((&value % m).to_usize().ok_or_else(bad)?);
        value /= m;
    }
    if !reverse {
        if !first.is_one() {
            return Err(bad());
        }
        digits.reverse();
        return Ok(digits);
    }
    let mut len = 0usize;
    let mut p = first;
    while p > One::one() && (&p % m).is_zero() {
        p /= m;
        len += 1;
    }
    if !p.is_one() || digits.len() > len {
        return Err(bad());
    }
    // `digits` is least significant first, which is `w` itself
    digits.resize(len, 0);
    Ok(digits)
}

fn cmd_growth(a: GrowthArgs) -> Res {
    let gens: Vec<RMatrix> = match a.group {
        Group::F2 => vec![generator_matrix(1).map_err(err)?, generator_matrix(2).map_err(err)?],
        Group::Z => vec![RMatrix::from_ints(&[&[1, 1], &[0, 1]])],
        Group::Heisenberg => vec![HeisenbergElem::A.to_matrix(), HeisenbergElem::B.to_matrix()],
    };
    let name = match a.group {
        Group::F2 => "F2",
        Group::Z => "Z",
        Group::Heisenberg => "H",
    };
    let g = GeneratorSet::new(name, gens).map_err(err)?;
    let (sizes, _) = growth_series(&g, a.n, a.cap).map_err(err)?;
    emit(json!({ "group": name, "n": a.n, "sizes": sizes }))?;
    Ok(ExitCode::SUCCESS)
}

fn cmd_dissim(a: DissimArgs) -> Res {
    let e = zoo_get(&a.lang).map_err(err)?;
    let d = dissimilarity(&e.predicate, a.n, a.cap).map_err(err)?;
    emit(&d)?;
    Ok(ExitCode::SUCCESS)
}

fn cmd_grammar(a: GrammarArgs) -> Res {
    let g = CFValenceGrammar::from_json(&read(&a.grammar)?).map_err(err)?;
    let w = g.parse_input(&a.input).map_err(err)?;
    let v = cf_valence_derive(&g, &w, a.max_expansions).map_err(err)?;
    emit(&v)?;
    Ok(outcome_code(v.outcome))
}
