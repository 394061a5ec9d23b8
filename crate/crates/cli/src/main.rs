use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use accwb::accsat::{
    acc_sat, decide, k_blowup, AccSatParams, BlowupPolicy, SatBackend, SatResult, Verdict,
};
use accwb::bench;
use accwb::circuit::{Circuit, DEFAULT_TABLE_CAP};
use accwb::consistency::{
    build_consistency_circuit, make_wire_value_circuit, prepare, verify_wire_circuit, ConsistencyForm,
    WireValueCandidate,
};
use accwb::cooklevin::{self, clause_generator_circuit, ntm_accepts, tableau_to_3cnf, Layout, Ntm};
use accwb::decompose::{self, decompose_acc, Verify};
use accwb::gen;
use accwb::harness::{satalg3, satalg5};
use accwb::io::{parse_circuit_bytes, serialize_circuit, write_truthtable};
use accwb::multilinear::format_poly;
use accwb::succinct::{
    build_clause_check_circuit, check_witness_report, encode_assignment, encode_formula, solve_compact,
    ClauseEncoding,
};
use accwb::truthtable::{bits_to_string, parse_bits};
use accwb::{Error, GateKind};
use anyhow::{anyhow, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Parser, Debug)]
#[command(name = "acc", version, about = "ACC circuit satisfiability and succinct-3SAT verification workbench")]
struct Cli {
    #[command(flatten)]
    opts: Opts,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Args, Debug, Clone)]
struct Opts {
    /// Satisfiability backend.
    #[arg(long, global = true, value_enum, default_value_t = Method::Brute, env = "ACCWB_METHOD")]
    method: Method,
    /// Number of inputs the acc backend fixes (default: planning formula).
    #[arg(long, global = true, env = "ACCWB_K")]
    k: Option<usize>,
    /// Monomial budget for the decomposition.
    #[arg(long, global = true, env = "ACCWB_KBUDGET", default_value_t = decompose::DEFAULT_K_BUDGET)]
    kbudget: usize,
    /// Variable-index width of the succinct clause encoding.
    #[arg(long = "enc-w", global = true, env = "ACCWB_ENC_W")]
    enc_w: Option<usize>,
    /// Declared variable count of the succinct formula (default: 2^w - 1).
    #[arg(long, global = true, env = "ACCWB_VARS")]
    vars: Option<u64>,
    #[arg(long, global = true, env = "ACCWB_SEED", default_value_t = 0)]
    seed: u64,
    /// Largest input count enumerated exhaustively.
    #[arg(long, global = true, env = "ACCWB_CAP", default_value_t = DEFAULT_TABLE_CAP)]
    cap: usize,
    /// Output file.
    #[arg(short = 'o', long = "output", global = true)]
    output: Option<PathBuf>,
    /// Exit 1 unless the verdict is positive (SAT / accept).
    #[arg(long, global = true, conflicts_with = "expect_unsat")]
    expect_sat: bool,
    /// Exit 1 unless the verdict is negative (UNSAT / reject).
    #[arg(long, global = true)]
    expect_unsat: bool,
    /// Worker threads (default: all cores).
    #[arg(long, global = true, env = "ACCWB_JOBS")]
    jobs: Option<usize>,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum Method {
    Brute,
    Acc,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum Policy {
    Highest,
    Fanout,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum Form {
    Unrolled,
    GateInput,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum VerifyMode {
    Auto,
    Exhaustive,
    Off,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum Emit {
    Dimacs,
    Generator,
}

#[derive(Subcommand, Debug)]
enum Cmd {
    /// Evaluate a circuit on one input (bits x1..xn).
    Eval { circuit: PathBuf, input: String },
    /// Truth table: binary table file with -o, else the bit string.
    Tt { circuit: PathBuf },
    /// Decide satisfiability; prints `SAT <witness>` or `UNSAT`.
    Sat { circuit: PathBuf },
    /// Decompose into g(h(x)) and print the trace, g and h.
    Decompose {
        circuit: PathBuf,
        #[arg(long, value_enum, default_value_t = VerifyMode::Auto)]
        verify: VerifyMode,
    },
    /// OR of the 2^k restrictions over k fixed inputs.
    Blowup {
        circuit: PathBuf,
        #[arg(long, value_enum, default_value_t = Policy::Highest)]
        policy: Policy,
    },
    /// Check a witness circuit against a succinct formula by decoding every clause.
    SuccinctCheck { x: PathBuf, w: PathBuf },
    /// Build the clause-check circuit D(i).
    BuildD { x: PathBuf, w: PathBuf },
    /// Build the wire-value consistency circuit E'.
    BuildEcons {
        x: PathBuf,
        /// Wire-value circuit C (default: the correct one).
        c: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = Form::Unrolled)]
        form: Form,
        /// Rewrite x to fan-in-2 AND/OR/NOT first.
        #[arg(long)]
        prepare: bool,
    },
    /// Certify a wire-value circuit against x.
    Wirecheck {
        x: PathBuf,
        c: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = Form::Unrolled)]
        form: Form,
        #[arg(long)]
        prepare: bool,
    },
    /// Witness verification through D: accepts iff not-D is unsatisfiable.
    Satalg3 { x: PathBuf, w: PathBuf },
    /// Wire-value check of C, then witness verification on C's output column.
    Satalg5 {
        x: PathBuf,
        w: PathBuf,
        c: Option<PathBuf>,
        #[arg(long)]
        prepare: bool,
    },
    /// Tableau reduction for a machine file (or builtin:<name>) on an input.
    Cooklevin {
        machine: String,
        #[arg(long, default_value = "")]
        input: String,
        /// Step bound = tape length.
        #[arg(long, default_value_t = 4)]
        t: usize,
        /// Write the DIMACS formula or the clause-generator circuit to -o.
        #[arg(long, value_enum)]
        emit: Option<Emit>,
    },
    /// Seeded instance generator.
    Gen {
        /// sym-and, acc-depth-<d>, random-unrestricted or planted-succinct.
        family: String,
        /// Inputs (planted-succinct: variables).
        #[arg(long)]
        n: usize,
        /// Children, layer width, gates, or clauses depending on the family.
        #[arg(long)]
        s: usize,
        /// Top modulus for sym-and.
        #[arg(long, default_value_t = 6)]
        modulus: u32,
    },
    /// Operation-count benchmark suite; TSV report on stdout or -o.
    Bench {
        /// sym-and, acc-depth or k-zero.
        #[arg(default_value = "sym-and")]
        suite: String,
        /// Seeds per size, starting at --seed.
        #[arg(long, default_value_t = 3)]
        seeds: u64,
        /// Check each verdict by exhaustive search.
        #[arg(long)]
        check: bool,
    },
}

/// A command-line error that is the caller's fault.
#[derive(Debug)]
struct Usage(String);

impl std::fmt::Display for Usage {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for Usage {}

fn usage(msg: impl Into<String>) -> anyhow::Error {
    anyhow::Error::new(Usage(msg.into()))
}

/// Positive means SAT / accept; `None` for commands without a verdict.
struct Outcome {
    positive: Option<bool>,
    /// Expectation applied when no flag is given (verifiers expect acceptance).
    default_expect: Option<bool>,
}

impl Outcome {
    fn none() -> Self {
        Outcome { positive: None, default_expect: None }
    }
    fn verdict(p: bool) -> Self {
        Outcome { positive: Some(p), default_expect: None }
    }
    fn check(p: bool) -> Self {
        Outcome { positive: Some(p), default_expect: Some(true) }
    }
}

fn exit_code_for(err: &anyhow::Error) -> u8 {
    if err.downcast_ref::<Usage>().is_some() {
        return 2;
    }
    if let Some(e) = err.downcast_ref::<std::io::Error>() {
        return if e.kind() == std::io::ErrorKind::NotFound { 2 } else { 3 };
    }
    match err.downcast_ref::<Error>() {
        Some(e) => core_code(e),
        None => 3,
    }
}

fn core_code(e: &Error) -> u8 {
    match e {
        Error::Stage { source, .. } => core_code(source),
        Error::Syntax { .. }
        | Error::Semantic { .. }
        | Error::Format(_)
        | Error::InputArity { .. }
        | Error::InvalidCircuit(_)
        | Error::UnsupportedGate(_)
        | Error::NotSymAnd(_)
        | Error::UnsupportedDepth { .. }
        | Error::DuplicateVariable(_)
        | Error::Decode { .. }
        | Error::Encoding(_)
        | Error::Machine(_) => 2,
        Error::ResourceLimit { .. }
        | Error::KBudget { .. }
        | Error::Overflow(_)
        | Error::Range { .. }
        | Error::Composition(_)
        | Error::Internal(_) => 3,
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    if let Some(j) = cli.opts.jobs {
        if j == 0 {
            eprintln!("error: --jobs must be at least 1");
            return ExitCode::from(2);
        }
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(j).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(3);
        }
    }
    match run(&cli.cmd, &cli.opts) {
        Ok(out) => {
            let expect = if cli.opts.expect_sat {
                Some(true)
            } else if cli.opts.expect_unsat {
                Some(false)
            } else {
                out.default_expect
            };
            match (expect, out.positive) {
                (Some(e), Some(p)) if e != p => ExitCode::from(1),
                _ => ExitCode::SUCCESS,
            }
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code_for(&e))
        }
    }
}

fn read_circuit(path: &Path) -> anyhow::Result<Circuit> {
    let bytes = fs::read(path).with_context(|| format!("reading {}", path.display()))?;
    parse_circuit_bytes(&bytes).with_context(|| format!("parsing {}", path.display()))
}

fn write_output(opts: &Opts, bytes: &[u8]) -> anyhow::Result<()> {
    match &opts.output {
        Some(p) => fs::write(p, bytes).with_context(|| format!("writing {}", p.display())),
        None => std::io::stdout().write_all(bytes).context("writing stdout"),
    }
}

fn require_output(opts: &Opts, what: &str) -> anyhow::Result<PathBuf> {
    opts.output.clone().ok_or_else(|| usage(format!("{what} needs -o <file>")))
}

fn acc_params(opts: &Opts) -> AccSatParams {
    let mut p = AccSatParams { k: opts.k, ..AccSatParams::default() };
    p.decomposition.k_budget = opts.kbudget;
    p
}

fn backend(opts: &Opts) -> SatBackend {
    match opts.method {
        Method::Brute => SatBackend::Brute,
        Method::Acc => SatBackend::Acc(acc_params(opts)),
    }
}

fn encoding(opts: &Opts) -> anyhow::Result<ClauseEncoding> {
    let enc = match (opts.enc_w, opts.vars) {
        (Some(w), Some(v)) => ClauseEncoding::with_vars(w, v)?,
        (Some(w), None) => ClauseEncoding::new(w)?,
        (None, Some(v)) => ClauseEncoding::for_vars(v)?,
        (None, None) => return Err(usage("the succinct encoding needs --enc-w and/or --vars")),
    };
    Ok(enc)
}

fn check_cap(c: &Circuit, opts: &Opts) -> anyhow::Result<()> {
    if c.n_inputs() > opts.cap {
        return Err(Error::ResourceLimit { what: "input count", value: c.n_inputs(), cap: opts.cap }.into());
    }
    Ok(())
}

fn metrics_line(r: &SatResult) -> String {
    let m = &r.metrics;
    format!(
        "metrics k={} monomials={} eval_points={} gate_evals={} monomial_ops={} total_work={} fallback={}",
        m.k,
        m.monomials,
        m.eval_points,
        m.gate_evals,
        m.monomial_ops,
        m.total_work(),
        m.fallback
    )
}

fn load_x(path: &Path, prep: bool) -> anyhow::Result<Circuit> {
    let x = read_circuit(path)?;
    Ok(if prep { prepare(&x)? } else { x })
}

fn load_candidate(x: &Circuit, c: Option<&PathBuf>) -> anyhow::Result<WireValueCandidate> {
    Ok(match c {
        Some(p) => WireValueCandidate::for_circuit(read_circuit(p)?, x)?,
        None => make_wire_value_circuit(x)?,
    })
}

fn form(f: Form) -> ConsistencyForm {
    match f {
        Form::Unrolled => ConsistencyForm::Unrolled,
        Form::GateInput => ConsistencyForm::GateInput,
    }
}

fn load_machine(spec: &str) -> anyhow::Result<Ntm> {
    if let Some(name) = spec.strip_prefix("builtin:") {
        return cooklevin::machines::all()
            .into_iter()
            .find(|(n, _)| *n == name)
            .map(|(_, m)| m)
            .ok_or_else(|| {
                let names: Vec<&str> = cooklevin::machines::all().iter().map(|(n, _)| *n).collect();
                usage(format!("unknown builtin machine {name:?} (known: {})", names.join(", ")))
            });
    }
    let text = fs::read_to_string(spec).with_context(|| format!("reading {spec}"))?;
    Ntm::parse(&text).with_context(|| format!("parsing {spec}"))
}

fn run(cmd: &Cmd, opts: &Opts) -> anyhow::Result<Outcome> {
    match cmd {
        Cmd::Eval { circuit, input } => {
            let c = read_circuit(circuit)?;
            let bits = parse_bits(input).ok_or_else(|| usage(format!("input {input:?} is not a bit string")))?;
            let v = c.evaluate(&bits)?;
            println!("{}", v as u8);
            Ok(Outcome::verdict(v))
        }
        Cmd::Tt { circuit } => {
            let c = read_circuit(circuit)?;
            let tt = c.truth_table_capped(opts.cap)?;
            match &opts.output {
                Some(_) => write_output(opts, &write_truthtable(&tt))?,
                None => println!("{}", tt.to_bit_string()),
            }
            Ok(Outcome::none())
        }
        Cmd::Sat { circuit } => {
            let c = read_circuit(circuit)?;
            let res = match opts.method {
                Method::Brute => {
                    check_cap(&c, opts)?;
                    decide(&c, &SatBackend::Brute)?
                }
                Method::Acc => acc_sat(&c, &acc_params(opts))?,
            };
            match &res.witness {
                Some(w) => println!("SAT {}", bits_to_string(w)),
                None => println!("UNSAT"),
            }
            if opts.method == Method::Acc {
                println!("{}", metrics_line(&res));
            }
            Ok(Outcome::verdict(res.verdict == Verdict::Sat))
        }
        Cmd::Decompose { circuit, verify } => {
            let c = read_circuit(circuit)?;
            let mut p = decompose::DecompositionParams { k_budget: opts.kbudget, ..Default::default() };
            p.verify = match verify {
                VerifyMode::Auto => Verify::Auto,
                VerifyMode::Exhaustive => Verify::Exhaustive,
                VerifyMode::Off => Verify::Off,
            };
            let d = decompose_acc(&c, &p)?;
            for s in &d.trace {
                println!("{s}");
            }
            println!("K={} pre_merge_terms={} ops={}", d.k, d.pre_merge_terms, d.ops);
            let table: Vec<bool> = d.g.table().to_vec();
            println!("g lo={} hi={} table={}", d.g.lo(), d.g.hi(), bits_to_string(&table));
            let poly = format_poly(&d.h);
            match &opts.output {
                Some(p) => {
                    write_output(opts, poly.as_bytes())?;
                    println!("h written to {}", p.display());
                }
                None => print!("h\n{poly}"),
            }
            Ok(Outcome::none())
        }
        Cmd::Blowup { circuit, policy } => {
            let c = read_circuit(circuit)?;
            let k = opts.k.ok_or_else(|| usage("blowup needs --k"))?;
            let pol = match policy {
                Policy::Highest => BlowupPolicy::HighestIndex,
                Policy::Fanout => BlowupPolicy::Fanout,
            };
            let b = k_blowup(&c, k, pol)?;
            eprintln!(
                "blowup k={} inputs={} gates={} unfolded_gates={} fixed={:?}",
                k,
                b.circuit.n_inputs(),
                b.circuit.size(),
                b.unfolded_gates,
                b.fixed_vars
            );
            write_output(opts, serialize_circuit(&b.circuit, "blowup").as_bytes())?;
            Ok(Outcome::none())
        }
        Cmd::SuccinctCheck { x, w } => {
            let (x, w, enc) = (read_circuit(x)?, read_circuit(w)?, encoding(opts)?);
            let r = check_witness_report(&x, &w, &enc)?;
            match r.violated {
                None => println!("satisfied clauses={}", r.stats.clauses),
                Some(i) => println!("violated record={i}"),
            }
            Ok(Outcome::check(r.satisfied))
        }
        Cmd::BuildD { x, w } => {
            let (x, w, enc) = (read_circuit(x)?, read_circuit(w)?, encoding(opts)?);
            let d = build_clause_check_circuit(&x, &w, &enc)?;
            let s = d.stats();
            eprintln!("D inputs={} gates={} depth={}", s.n_inputs, s.size, s.depth);
            write_output(opts, serialize_circuit(&d, "clause_check").as_bytes())?;
            Ok(Outcome::none())
        }
        Cmd::BuildEcons { x, c, form: f, prepare } => {
            let x = load_x(x, *prepare)?;
            let cand = load_candidate(&x, c.as_ref())?;
            let e = build_consistency_circuit(&x, &cand, form(*f))?;
            let s = e.stats();
            eprintln!("E' inputs={} gates={} depth={}", s.n_inputs, s.size, s.depth);
            write_output(opts, serialize_circuit(&e, "consistency").as_bytes())?;
            Ok(Outcome::none())
        }
        Cmd::Wirecheck { x, c, form: f, prepare } => {
            let x = load_x(x, *prepare)?;
            let cand = load_candidate(&x, c.as_ref())?;
            let r = verify_wire_circuit(&x, &cand, &backend(opts), form(*f))?;
            println!(
                "wirecheck verdict={} econs_gates={}",
                if r.accepted { "accept" } else { "reject" },
                r.econs_gates
            );
            if let Some(i) = &r.exposing {
                println!("exposing_input={}", bits_to_string(i));
            }
            if let Some(j) = r.exposing_gate {
                println!("exposing_gate={j}");
            }
            Ok(Outcome::check(r.accepted))
        }
        Cmd::Satalg3 { x, w } => {
            let (x, w, enc) = (read_circuit(x)?, read_circuit(w)?, encoding(opts)?);
            let r = satalg3(&x, &w, &enc, &backend(opts))?;
            print!("{r}");
            Ok(Outcome::check(r.accepted))
        }
        Cmd::Satalg5 { x, w, c, prepare } => {
            let x = load_x(x, *prepare)?;
            let (w, enc) = (read_circuit(w)?, encoding(opts)?);
            let cand = load_candidate(&x, c.as_ref())?;
            let r = satalg5(&x, &w, &cand, &enc, &backend(opts))?;
            print!("{r}");
            Ok(Outcome::check(r.accepted()))
        }
        Cmd::Cooklevin { machine, input, t, emit } => {
            let m = load_machine(machine)?;
            let inp = m.input(input)?;
            let accepts = ntm_accepts(&m, &inp, *t)?;
            let f = tableau_to_3cnf(&m, &inp, *t)?;
            let layout = Layout::new(&m, *t);
            println!("machine {}", cooklevin::describe(&m));
            println!("simulation accepts={accepts}");
            println!(
                "tableau vars={} clauses={} var_width={} record_index_bits={}",
                f.num_vars,
                f.clauses.len(),
                layout.var_width(),
                layout.record_index_bits()
            );
            println!("tableau satisfiable={}", solve_compact(&f).is_some());
            match emit {
                Some(Emit::Dimacs) => {
                    require_output(opts, "--emit dimacs")?;
                    write_output(opts, f.to_dimacs().as_bytes())?;
                }
                Some(Emit::Generator) => {
                    require_output(opts, "--emit generator")?;
                    let g = clause_generator_circuit(&m, &inp, *t, &layout.encoding())?;
                    println!("generator inputs={} gates={} enc_w={}", g.n_inputs(), g.size(), layout.var_width());
                    write_output(opts, serialize_circuit(&g, "clause_generator").as_bytes())?;
                }
                None => {}
            }
            Ok(Outcome::verdict(accepts))
        }
        Cmd::Gen { family, n, s, modulus } => {
            if *n == 0 || *s == 0 {
                return Err(usage("--n and --s must be positive"));
            }
            let mut rng = gen::rng(opts.seed);
            let name = family.replace('-', "_");
            let c = match family.as_str() {
                "sym-and" => {
                    if *modulus < 2 {
                        return Err(usage("--modulus must be at least 2"));
                    }
                    gen::sym_and(&mut rng, *n, *s, GateKind::Mod(*modulus), 1..=3, 0.3)
                }
                "random-unrestricted" => gen::unrestricted(&mut rng, *n, *s, 3),
                "planted-succinct" => {
                    let base = require_output(opts, "planted-succinct")?;
                    let (f, plant) = gen::planted_cnf(&mut rng, *n as u64, *s);
                    let enc = match opts.enc_w {
                        Some(w) => ClauseEncoding::with_vars(w, *n as u64)?,
                        None => ClauseEncoding::for_vars(*n as u64)?,
                    };
                    let x = prepare(&encode_formula(&f, &enc)?)?;
                    let w = encode_assignment(&plant);
                    let xp = base.with_extension("x.ckt");
                    let wp = base.with_extension("w.ckt");
                    fs::write(&xp, serialize_circuit(&x, "succinct_formula"))
                        .with_context(|| format!("writing {}", xp.display()))?;
                    fs::write(&wp, serialize_circuit(&w, "planted_witness"))
                        .with_context(|| format!("writing {}", wp.display()))?;
                    println!(
                        "planted-succinct vars={} clauses={} enc_w={} x={} w={}",
                        n,
                        f.clauses.len(),
                        enc.var_width(),
                        xp.display(),
                        wp.display()
                    );
                    return Ok(Outcome::none());
                }
                other => match other.strip_prefix("acc-depth-").and_then(|d| d.parse::<usize>().ok()) {
                    Some(d) if d >= 1 => gen::layered(&mut rng, *n, d, *s, &[2, 3], 0.2),
                    _ => {
                        return Err(usage(format!(
                            "unknown family {other:?} (sym-and, acc-depth-<d>, random-unrestricted, planted-succinct)"
                        )))
                    }
                },
            };
            write_output(opts, serialize_circuit(&c, &name).as_bytes())?;
            Ok(Outcome::none())
        }
        Cmd::Bench { suite, seeds, check } => {
            if !bench::SUITES.contains(&suite.as_str()) {
                return Err(usage(format!("unknown suite {suite:?} (known: {})", bench::SUITES.join(", "))));
            }
            let seed_list: Vec<u64> = (opts.seed..opts.seed + (*seeds).max(1)).collect();
            let rows = bench::run_suite(suite, &seed_list, &acc_params(opts), *check)?;
            write_output(opts, bench::tsv(&rows).as_bytes())?;
            let ratios = bench::ratios_by_n(&rows);
            for (n, r) in &ratios {
                eprintln!("ratio n={n} acc_work/(n*2^n)={r:.6}");
            }
            match bench::advantage_threshold(&ratios) {
                Some(n0) => eprintln!("n0={n0} improving={}", bench::strictly_improving(&ratios)),
                None => eprintln!("n0=none improving={}", bench::strictly_improving(&ratios)),
            }
            if rows.iter().any(|r| r.agrees == Some(false)) {
                return Err(anyhow!("verdict disagreement with exhaustive search"));
            }
            Ok(Outcome::none())
        }
    }
}
