use std::fmt;
use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use chasmlab::chasm::{Chasm, ChasmState};
use chasmlab::fsca::Fsca;
use chasmlab::invert::{brute_force_predecessors, invert_toggle_rule};
use chasmlab::linear::{census_csv, eventual_period, orbit_summary, ruleset_census};
use chasmlab::recover::{ms_recover, ms_recover_improved};
use chasmlab::sat::{compile, pad, parse_dimacs, Manifest};
use chasmlab::stats::{encode_bits, import_bits, run_battery, BitFormat, StatTest, ALPHA};
use chasmlab::{evolve, BitVector, Boundary, Rule, RuleVector};

mod selftest;

#[derive(Parser)]
#[command(name = "chasmlab", version, about = "Cellular-automaton PRG workbench")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a byte stream from a generator.
    Gen(GenArgs),
    /// Evolve a CA and print every state.
    Step(StepArgs),
    /// List the predecessors of a state under a uniform rule.
    Invert(InvertArgs),
    /// Recover seeds from a center-cell sequence.
    Recover(RecoverArgs),
    /// Eventual period of one seed, or the longest period over all seeds.
    Period(PeriodArgs),
    /// Period and sequence census of the 90/150 rule vectors.
    Census(CensusArgs),
    /// Compile a 3-CNF formula into a simple FSCA.
    CompileCnf(CompileArgs),
    /// Run a compiled FSCA on an assignment.
    EvalCnf(EvalArgs),
    /// Run statistical tests on a bit file.
    Stats(StatsArgs),
    /// Check the built-in reproductions.
    Selftest,
}

#[derive(Clone, Copy, ValueEnum)]
enum Prg {
    Chasm,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Raw,
    Ascii,
}

impl From<Format> for BitFormat {
    fn from(f: Format) -> Self {
        match f {
            Format::Raw => BitFormat::Raw,
            Format::Ascii => BitFormat::Ascii,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum BoundaryArg {
    Cyclic,
    Null,
}

#[derive(Args)]
struct GenArgs {
    #[arg(long, value_enum, default_value = "chasm")]
    prg: Prg,
    /// Cell count (a multiple of 4).
    #[arg(long)]
    n: usize,
    /// Seed as 9n/4 hex digits.
    #[arg(long, conflicts_with_all = ["seed_file", "state_in"])]
    seed: Option<String>,
    /// Seed file; the first 9n bits are used.
    #[arg(long, conflicts_with = "state_in")]
    seed_file: Option<PathBuf>,
    /// Resume from a state dump instead of a seed.
    #[arg(long)]
    state_in: Option<PathBuf>,
    #[arg(long)]
    bytes: usize,
    /// Output path, `-` for stdout.
    #[arg(long)]
    out: PathBuf,
    #[arg(long, value_enum, default_value = "raw")]
    format: Format,
    /// Write the generator state after the run.
    #[arg(long)]
    state_out: Option<PathBuf>,
}

#[derive(Args)]
struct StepArgs {
    /// Rule list such as `30`, `90,150,90` or `90x8,150`.
    #[arg(long)]
    rules: String,
    #[arg(long)]
    state: String,
    #[arg(long, value_enum, default_value = "cyclic")]
    boundary: BoundaryArg,
    #[arg(long, default_value_t = 1)]
    t: usize,
}

#[derive(Args)]
struct InvertArgs {
    #[arg(long)]
    rule: u8,
    #[arg(long)]
    state: String,
    /// Enumerate every state instead of solving backwards.
    #[arg(long)]
    brute: bool,
}

#[derive(Args)]
struct RecoverArgs {
    #[arg(long, default_value_t = 30)]
    rule: u8,
    #[arg(long)]
    sequence: String,
    #[arg(long)]
    n: usize,
    /// Deduce and guess cell by cell, returning one seed and its coins.
    #[arg(long)]
    improved: bool,
}

#[derive(Args)]
struct PeriodArgs {
    #[arg(long)]
    rules: String,
    /// Cell count, needed when a single rule is given with --max.
    #[arg(long)]
    n: Option<usize>,
    #[arg(long, conflicts_with = "max")]
    seed: Option<String>,
    #[arg(long)]
    max: bool,
}

#[derive(Args)]
struct CensusArgs {
    #[arg(long, default_value_t = 9)]
    n: usize,
    /// CSV path; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct CompileArgs {
    #[arg(long = "in")]
    input: PathBuf,
    #[arg(long)]
    out: PathBuf,
    /// Manifest path; defaults to the output path with `.json` appended.
    #[arg(long)]
    manifest: Option<PathBuf>,
    /// Append constant cells so that n is this multiple of the step bound.
    #[arg(long)]
    pad: Option<usize>,
}

#[derive(Args)]
struct EvalArgs {
    #[arg(long)]
    fsca: PathBuf,
    #[arg(long)]
    manifest: Option<PathBuf>,
    /// One bit per variable, variables in increasing order.
    #[arg(long)]
    assign: String,
}

#[derive(Args)]
struct StatsArgs {
    #[arg(long = "in")]
    input: PathBuf,
    #[arg(long, value_enum, default_value = "raw")]
    format: Format,
    #[arg(long, value_delimiter = ',', default_value = "monobit,block,runs")]
    tests: Vec<StatTest>,
    /// Number of equal sequences the input is split into.
    #[arg(long, default_value_t = 100)]
    group: usize,
    #[arg(long, default_value_t = ALPHA)]
    alpha: f64,
    /// JSON report path; stdout when omitted.
    #[arg(long)]
    report: Option<PathBuf>,
}

enum Failure {
    /// Bad input or an unmet precondition.
    Usage(String),
    /// The computation ran but its result did not check out.
    Verification(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Usage(_) => 2,
            Failure::Verification(_) => 3,
        }
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Failure::Usage(m) | Failure::Verification(m) => f.write_str(m),
        }
    }
}

impl From<chasmlab::Error> for Failure {
    fn from(e: chasmlab::Error) -> Self {
        match e {
            chasmlab::Error::NoConsistentSeed(_) => Failure::Verification(e.to_string()),
            _ => Failure::Usage(e.to_string()),
        }
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Usage(e.to_string())
    }
}

impl From<serde_json::Error> for Failure {
    fn from(e: serde_json::Error) -> Self {
        Failure::Usage(format!("json: {e}"))
    }
}

type CliResult = Result<(), Failure>;

fn read(path: &Path) -> Result<Vec<u8>, Failure> {
    fs::read(path).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))
}

fn read_text(path: &Path) -> Result<String, Failure> {
    String::from_utf8(read(path)?).map_err(|_| Failure::Usage(format!("{}: not UTF-8 text", path.display())))
}

fn write_out(path: &Path, data: &[u8]) -> CliResult {
    if path.as_os_str() == "-" {
        io::stdout().lock().write_all(data)?;
    } else {
        fs::write(path, data).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))?;
    }
    Ok(())
}

fn print_json<T: Serialize>(value: &T) -> CliResult {
    println!("{}", serde_json::to_string_pretty(value)?);
    Ok(())
}

fn bits(s: &str) -> Result<BitVector, Failure> {
    Ok(BitVector::parse_bits(s)?)
}

fn gen(a: GenArgs) -> CliResult {
    let Prg::Chasm = a.prg;
    let mut g = if let Some(path) = &a.state_in {
        let st = ChasmState::parse_dump(&read_text(path)?)?;
        if st.n != a.n {
            return Err(Failure::Usage(format!("state dump has n = {}, expected {}", st.n, a.n)));
        }
        Chasm::from_state(&st)?
    } else {
        let seed = match (&a.seed, &a.seed_file) {
            (Some(hex), None) => BitVector::parse_hex(hex)?,
            (None, Some(path)) => {
                let data = read(path)?;
                if data.len() * 8 < 9 * a.n {
                    return Err(Failure::Usage(format!("seed file holds {} bits, need {}", data.len() * 8, 9 * a.n)));
                }
                BitVector::from_bytes(&data, 9 * a.n)
            }
            _ => return Err(Failure::Usage("give one of --seed, --seed-file or --state-in".into())),
        };
        if seed.len() != 9 * a.n {
            return Err(Failure::Usage(format!("seed has {} bits, need 9n = {}", seed.len(), 9 * a.n)));
        }
        Chasm::new(&seed)?
    };
    if a.bytes == 0 {
        return Err(Failure::Usage("--bytes must be at least 1".into()));
    }
    let out = g.generate(a.bytes);
    let data = match a.format {
        Format::Raw => out,
        Format::Ascii => encode_bits(&BitVector::from_bytes(&out, 8 * a.bytes), BitFormat::Ascii),
    };
    write_out(&a.out, &data)?;
    if let Some(path) = &a.state_out {
        write_out(path, g.state().dump().as_bytes())?;
    }
    Ok(())
}

fn step_cmd(a: StepArgs) -> CliResult {
    let s = bits(&a.state)?;
    let f = RuleVector::parse(&a.rules, Some(s.len()))?;
    let b = match a.boundary {
        BoundaryArg::Cyclic => Boundary::Cyclic,
        BoundaryArg::Null => Boundary::Null,
    };
    for state in evolve(&f, &s, b, a.t)? {
        println!("{state}");
    }
    Ok(())
}

fn invert(a: InvertArgs) -> CliResult {
    let s = bits(&a.state)?;
    let f = RuleVector::uniform(Rule(a.rule), s.len())?;
    let preds = if a.brute { brute_force_predecessors(&f, &s)? } else { invert_toggle_rule(&f, &s)? };
    for p in &preds {
        println!("{p}");
    }
    eprintln!("{} predecessor(s)", preds.len());
    Ok(())
}

fn recover(a: RecoverArgs) -> CliResult {
    let sigma = bits(&a.sequence)?;
    if a.improved {
        print_json(&ms_recover_improved(Rule(a.rule), &sigma, a.n)?)
    } else {
        let seeds = ms_recover(Rule(a.rule), &sigma, a.n)?;
        if seeds.is_empty() {
            return Err(Failure::Verification("no seed reproduces the sequence".into()));
        }
        for s in seeds {
            println!("{s}");
        }
        Ok(())
    }
}

fn period(a: PeriodArgs) -> CliResult {
    if let Some(seed) = &a.seed {
        let s = bits(seed)?;
        let f = RuleVector::parse(&a.rules, Some(s.len()))?;
        print_json(&eventual_period(&f, &s)?)
    } else if a.max {
        let f = RuleVector::parse(&a.rules, a.n)?;
        print_json(&orbit_summary(&f)?)
    } else {
        Err(Failure::Usage("give --seed BITS or --max".into()))
    }
}

fn census(a: CensusArgs) -> CliResult {
    let csv = census_csv(&ruleset_census(a.n)?);
    match &a.out {
        Some(path) => write_out(path, csv.as_bytes()),
        None => write_out(Path::new("-"), csv.as_bytes()),
    }
}

fn manifest_path(fsca: &Path, explicit: Option<PathBuf>) -> PathBuf {
    explicit.unwrap_or_else(|| {
        let mut p = fsca.as_os_str().to_owned();
        p.push(".json");
        PathBuf::from(p)
    })
}

fn compile_cnf(a: CompileArgs) -> CliResult {
    let phi = parse_dimacs(&read_text(&a.input)?)?;
    let manifest = match a.pad {
        None => {
            let r = compile(&phi)?;
            write_out(&a.out, r.fsca.to_text().as_bytes())?;
            r.manifest()
        }
        Some(sigma) => {
            let p = pad(&phi, sigma)?;
            write_out(&a.out, p.fsca.to_text().as_bytes())?;
            Manifest {
                n: p.fsca.n(),
                k: p.k,
                c: phi.clause_count(),
                v: p.slots.len(),
                slots: p.slots.clone(),
                target: p.target.s.to_string(),
            }
        }
    };
    let json = serde_json::to_string_pretty(&manifest)?;
    write_out(&manifest_path(&a.out, a.manifest), json.as_bytes())?;
    println!("{json}");
    Ok(())
}

#[derive(Serialize)]
struct EvalReport {
    satisfied: bool,
    value: BitVector,
    target: String,
    k: usize,
}

fn eval_cnf(a: EvalArgs) -> CliResult {
    let fsca = Fsca::from_text(&read_text(&a.fsca)?)?;
    let m: Manifest = serde_json::from_str(&read_text(&manifest_path(&a.fsca, a.manifest))?)?;
    let alpha = bits(&a.assign)?;
    if alpha.len() != m.v {
        return Err(Failure::Usage(format!("assignment has {} bits, formula has {} variables", alpha.len(), m.v)));
    }
    if m.n != fsca.n() || m.slots.iter().any(|&p| p >= m.n) {
        return Err(Failure::Usage("manifest does not describe this automaton".into()));
    }
    let mut s0 = BitVector::zeros(m.n);
    for (j, &p) in m.slots.iter().enumerate() {
        s0.set(p, alpha.get(j));
    }
    let end = fsca.run(&fsca.start_with_value(&s0)?, m.k)?;
    print_json(&EvalReport { satisfied: end.s.to_string() == m.target, value: end.s, target: m.target, k: m.k })
}

fn stats(a: StatsArgs) -> CliResult {
    let data = import_bits(&a.input, a.format.into())?;
    let report = run_battery(&data, a.group, &a.tests, a.alpha)?;
    let json = serde_json::to_string_pretty(&report)?;
    match &a.report {
        Some(path) => write_out(path, json.as_bytes())?,
        None => println!("{json}"),
    }
    for g in &report.groups {
        match &g.verdict {
            Some(v) => eprintln!(
                "{:?}: {}/{} passed (threshold {:.4}), uniformity p = {:.6}{}",
                g.test,
                v.passed,
                v.count,
                v.threshold,
                v.uniformity_p,
                if v.proportion_failure || v.uniformity_failure { "  FAIL" } else { "" }
            ),
            None => eprintln!("{:?}: too few applicable sequences for a group verdict", g.test),
        }
    }
    if let Some(lc) = &report.linear_complexity {
        eprintln!("linear complexity over {}-bit prefixes: min ratio {:.4}", lc.prefix_bits, lc.min_ratio);
    }
    if report.any_failure() {
        return Err(Failure::Verification("statistical group failure".into()));
    }
    Ok(())
}

fn run(cli: Cli) -> CliResult {
    match cli.command {
        Command::Gen(a) => gen(a),
        Command::Step(a) => step_cmd(a),
        Command::Invert(a) => invert(a),
        Command::Recover(a) => recover(a),
        Command::Period(a) => period(a),
        Command::Census(a) => census(a),
        Command::CompileCnf(a) => compile_cnf(a),
        Command::EvalCnf(a) => eval_cnf(a),
        Command::Stats(a) => stats(a),
        Command::Selftest => selftest::run(),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.code())
        }
    }
}
