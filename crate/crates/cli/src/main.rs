//! `dml`: batch front end over `dml-core`.
//!
//! Every command reads one `key: value` input file and writes a report in
//! the same format. Timing goes in a trailing `# metadata` comment block,
//! which parsers skip and which is the only part that varies between runs.
//!
//! Exit codes: 0 success, 1 I/O failure, 2 parse error (including bad
//! command-line usage), 3 validation error, 4 resource cap, 5 internal
//! invariant failure, 6 unsupported input.

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand};
use num_bigint::BigInt;

use dml_core::arith::{degree_cap, set_degree_cap, PrimeModulus};
use dml_core::constructions::{build_pset_variety, dml_instance, exponent_set};
use dml_core::intalg::IntMatrix;
use dml_core::lrs::Lrs;
use dml_core::pexp::{pexp_classify, pexp_solve, PexpInstance};
use dml_core::psets::{ap_intersect_pset, pset_enumerate, pset_intersect_bounded, ArithProg, PSet, ReturnSetDesc};
use dml_core::textfmt::{split_list, Document};
use dml_core::torus::{
    frobenius_obstruction, full_pipeline, reduction_decompose, verify_reduction, TorusInstance, DEFAULT_R_MAX,
    DEFAULT_S_MAX,
};
use dml_core::Error;

const DEFAULT_NMAX: u64 = 1000;
const DEFAULT_BOUND: u64 = 10_000;

#[derive(Parser)]
#[command(name = "dml", version, about = "Return sets of torus self-maps over F_p(t) and the equations behind them")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Write the report here instead of standard output.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Index bound; overrides `n_max` in torus instances (default 1000 elsewhere).
    #[arg(long, global = true)]
    nmax: Option<u64>,
    /// Value bound for enumerations (default 10000, or `bound` in the input).
    #[arg(long, global = true)]
    bound: Option<u64>,
    /// Largest power of the matrix scanned by the obstruction test.
    #[arg(long, global = true, default_value_t = DEFAULT_R_MAX)]
    rmax: u32,
    /// Largest power of p scanned by the obstruction test.
    #[arg(long, global = true, default_value_t = DEFAULT_S_MAX)]
    smax: u32,
    /// Cap on dense polynomial length, in coefficients.
    #[arg(long, global = true)]
    degree_cap: Option<usize>,
}

#[derive(Subcommand)]
enum Command {
    /// Return set of a torus instance with its verified description.
    ReturnSet { input: PathBuf },
    /// Solutions of a polynomial-exponential equation with least witnesses.
    SolvePexp { input: PathBuf },
    /// Structured, verified description of the solution set.
    ClassifyPexp { input: PathBuf },
    /// Intersection of the two `pset` entries up to the bound.
    IntersectPsets { input: PathBuf },
    /// Intersection of `ap` with `pset` as a finite union of p-sets.
    ApCapPset { input: PathBuf },
    /// Checks the orbit decomposition of a torus instance up to n_max.
    VerifyReduction { input: PathBuf },
    /// Torus instance whose return set is the solution set of `lrs` against multiplicities `c`.
    GenInstance { input: PathBuf },
    /// Exponents in the return set of the p-set variety with multiplicities `c`.
    ExponentSet { input: PathBuf },
    /// Frobenius obstruction verdict for `matrix` over `p`.
    Obstruction { input: PathBuf },
}

impl Command {
    fn input(&self) -> &PathBuf {
        match self {
            Command::ReturnSet { input }
            | Command::SolvePexp { input }
            | Command::ClassifyPexp { input }
            | Command::IntersectPsets { input }
            | Command::ApCapPset { input }
            | Command::VerifyReduction { input }
            | Command::GenInstance { input }
            | Command::ExponentSet { input }
            | Command::Obstruction { input } => input,
        }
    }

    fn name(&self) -> &'static str {
        match self {
            Command::ReturnSet { .. } => "return-set",
            Command::SolvePexp { .. } => "solve-pexp",
            Command::ClassifyPexp { .. } => "classify-pexp",
            Command::IntersectPsets { .. } => "intersect-psets",
            Command::ApCapPset { .. } => "ap-cap-pset",
            Command::VerifyReduction { .. } => "verify-reduction",
            Command::GenInstance { .. } => "gen-instance",
            Command::ExponentSet { .. } => "exponent-set",
            Command::Obstruction { .. } => "obstruction",
        }
    }
}

enum Failure {
    Io(String),
    Core(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Core(e)
    }
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Io(_) => 1,
            Failure::Core(e) => match e {
                Error::Parse(_) => 2,
                Error::Validation(_) | Error::Usage(_) | Error::Domain(_) => 3,
                Error::Resource(_) | Error::CapExhausted(_) => 4,
                Error::Invariant(_) | Error::Construction(_) => 5,
                Error::Unsupported(_) => 6,
            },
        }
    }

    fn message(&self) -> String {
        match self {
            Failure::Io(m) => m.clone(),
            Failure::Core(e) => e.to_string(),
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("dml {}: {}", cli.command.name(), f.message());
            ExitCode::from(f.code())
        }
    }
}

fn run(cli: &Cli) -> Result<(), Failure> {
    if let Some(cap) = cli.degree_cap {
        set_degree_cap(cap);
    }
    let path = cli.command.input();
    let text = fs::read_to_string(path).map_err(|e| Failure::Io(format!("cannot read {}: {e}", path.display())))?;
    let input = Document::parse(&text)?;
    let started = Instant::now();
    let mut report = Document::new();
    report.push("command", cli.command.name());
    match cli.command {
        Command::ReturnSet { .. } => return_set(cli, &input, &mut report)?,
        Command::SolvePexp { .. } => solve_pexp(cli, &input, &mut report)?,
        Command::ClassifyPexp { .. } => classify_pexp(cli, &input, &mut report)?,
        Command::IntersectPsets { .. } => intersect_psets(cli, &input, &mut report)?,
        Command::ApCapPset { .. } => ap_cap_pset(cli, &input, &mut report)?,
        Command::VerifyReduction { .. } => verify(cli, &input, &mut report)?,
        Command::GenInstance { .. } => gen_instance(cli, &input, &mut report)?,
        Command::ExponentSet { .. } => exponent(cli, &input, &mut report)?,
        Command::Obstruction { .. } => obstruction(cli, &input, &mut report)?,
    }
    let mut out = report.render();
    out.push_str("# metadata\n");
    out.push_str(&format!("# wall_time_ms: {}\n", started.elapsed().as_millis()));
    match &cli.out {
        Some(p) => fs::write(p, out).map_err(|e| Failure::Io(format!("cannot write {}: {e}", p.display())))?,
        None => print!("{out}"),
    }
    Ok(())
}

fn torus_instance(cli: &Cli, input: &Document) -> Result<TorusInstance, Error> {
    let mut inst = TorusInstance::from_document(input)?;
    if let Some(n) = cli.nmax {
        inst.n_max = n;
    }
    Ok(inst)
}

fn pexp_instance(cli: &Cli, input: &Document, report: &mut Document) -> Result<(PexpInstance, u64), Error> {
    let inst = PexpInstance::from_document(input)?;
    let n_max = cli.nmax.unwrap_or(DEFAULT_NMAX);
    inst.write_into(report);
    report.push("n_max", n_max);
    Ok((inst, n_max))
}

fn prime(input: &Document) -> Result<PrimeModulus, Error> {
    PrimeModulus::new(input.require_parsed("p")?)
}

/// The `--bound` flag, else the `bound` key, else the default.
fn value_bound(cli: &Cli, input: &Document) -> Result<u64, Error> {
    match cli.bound {
        Some(b) => Ok(b),
        None => Ok(input.get("bound")?.map(|_| input.require_parsed("bound")).transpose()?.unwrap_or(DEFAULT_BOUND)),
    }
}

fn multiplicities(input: &Document) -> Result<Vec<u64>, Error> {
    split_list(input.require("c")?, ',')
        .into_iter()
        .map(|x| x.parse().map_err(|_| Error::Parse(format!("bad multiplicity `{x}`"))))
        .collect()
}

fn join<T: ToString>(xs: &[T], sep: &str) -> String {
    xs.iter().map(ToString::to_string).collect::<Vec<_>>().join(sep)
}

/// The description's fields, minus the prime already echoed with the instance.
fn push_desc(desc: &ReturnSetDesc, report: &mut Document) {
    for (k, v) in desc.to_document().entries() {
        if k != "p" {
            report.push(k, v);
        }
    }
}

fn push_caps(cli: &Cli, report: &mut Document) {
    report.push("degree_cap", degree_cap());
    report.push("rmax", cli.rmax);
    report.push("smax", cli.smax);
}

fn return_set(cli: &Cli, input: &Document, report: &mut Document) -> Result<(), Error> {
    let inst = torus_instance(cli, input)?;
    inst.write_into(report);
    push_caps(cli, report);
    let r = full_pipeline(&inst)?;
    report.push("hits", join(&r.hits, ", "));
    report.push("hit_count", r.hits.len());
    push_desc(&r.desc, report);
    report.push("obstruction", frobenius_obstruction(&inst.map.a, inst.p(), cli.rmax, cli.smax));
    Ok(())
}

fn solve_pexp(cli: &Cli, input: &Document, report: &mut Document) -> Result<(), Error> {
    let (inst, n_max) = pexp_instance(cli, input, report)?;
    let sols = pexp_solve(&inst, n_max)?;
    report.push("solution_count", sols.len());
    for s in &sols {
        report.push("solution", format!("{} ({})", s.n, join(&s.witness, ", ")));
    }
    Ok(())
}

fn classify_pexp(cli: &Cli, input: &Document, report: &mut Document) -> Result<(), Error> {
    let (inst, n_max) = pexp_instance(cli, input, report)?;
    let c = pexp_classify(&inst, n_max)?;
    let hits: Vec<u64> = c.solutions.iter().map(|s| s.n).collect();
    report.push("solutions", join(&hits, ", "));
    report.push("split_modulus", c.split_modulus);
    report.push("paths", join(&c.paths, ", "));
    for f in &c.flags {
        report.push("flag", f);
    }
    push_desc(&c.desc, report);
    Ok(())
}

fn intersect_psets(cli: &Cli, input: &Document, report: &mut Document) -> Result<(), Error> {
    let p = prime(input)?;
    let sets: Vec<PSet> = input.get_all("pset").map(str::parse).collect::<Result<_, _>>()?;
    if sets.len() != 2 {
        return Err(Error::Validation(format!("expected two `pset` entries, got {}", sets.len())));
    }
    let bound = value_bound(cli, input)?;
    report.push("p", p);
    for s in &sets {
        report.push("pset", s);
    }
    report.push("bound", bound);
    let r = pset_intersect_bounded(&sets[0], &sets[1], p, &BigInt::from(bound))?;
    report.push("elements", join(&r.elements, ", "));
    report.push("element_count", r.elements.len());
    report.push(
        "description",
        r.candidate.map_or_else(|| "none".to_string(), |c| join(&c, "; ")),
    );
    Ok(())
}

fn ap_cap_pset(cli: &Cli, input: &Document, report: &mut Document) -> Result<(), Error> {
    let p = prime(input)?;
    let ap: ArithProg = input.require("ap")?.parse()?;
    let set: PSet = input.require("pset")?.parse()?;
    let bound = value_bound(cli, input)?;
    report.push("p", p);
    report.push("ap", ap);
    report.push("pset", &set);
    report.push("bound", bound);
    let parts = ap_intersect_pset(&ap, &set, p)?;
    report.push("psets", join(&parts, "; "));
    let big = BigInt::from(bound);
    let mut elements = Vec::new();
    for part in &parts {
        elements.extend(pset_enumerate(part, p, &big)?);
    }
    elements.sort();
    elements.dedup();
    report.push("elements", join(&elements, ", "));
    Ok(())
}

fn verify(cli: &Cli, input: &Document, report: &mut Document) -> Result<(), Error> {
    let inst = torus_instance(cli, input)?;
    inst.write_into(report);
    let rd = reduction_decompose(&inst.map, &inst.alpha)?;
    report.push("minimal_polynomial", &rd.minpoly);
    if !verify_reduction(&rd, &inst.map, &inst.alpha, inst.n_max)? {
        return Err(Error::Invariant(format!("orbit decomposition fails below n = {}", inst.n_max)));
    }
    report.push("verified_to", inst.n_max);
    Ok(())
}

/// Emits a torus instance file; the report itself reparses as one.
fn gen_instance(cli: &Cli, input: &Document, report: &mut Document) -> Result<(), Error> {
    let p = prime(input)?;
    let u: Lrs = input.require("lrs")?.parse()?;
    let c = multiplicities(input)?;
    let n_max = cli.nmax.unwrap_or(DEFAULT_NMAX);
    let inst = dml_instance(&u, p, &c)?.to_torus_instance(n_max)?;
    let doc = inst.to_document();
    // re-read to make sure what we emit is what we built
    if TorusInstance::from_document(&doc)? != inst {
        return Err(Error::Invariant("generated instance does not round-trip".into()));
    }
    report.push("source_lrs", &u);
    report.push("source_c", join(&c, ","));
    for (k, v) in doc.entries() {
        report.push(k, v);
    }
    Ok(())
}

fn exponent(cli: &Cli, input: &Document, report: &mut Document) -> Result<(), Error> {
    let p = prime(input)?;
    let c = multiplicities(input)?;
    let bound = value_bound(cli, input)?;
    report.push("p", p);
    report.push("c", join(&c, ","));
    report.push("bound", bound);
    let pv = build_pset_variety(p, &c)?;
    report.push("target", pv.target());
    let set = exponent_set(&pv, &BigInt::from(bound))?;
    report.push("exponents", join(&set, ", "));
    report.push("count", set.len());
    Ok(())
}

fn obstruction(cli: &Cli, input: &Document, report: &mut Document) -> Result<(), Error> {
    let p = prime(input)?;
    let rows: Vec<Vec<BigInt>> = split_list(input.require("matrix")?, ';')
        .iter()
        .map(|r| {
            split_list(r, ',')
                .iter()
                .map(|x| x.parse().map_err(|_| Error::Parse(format!("bad matrix entry `{x}`"))))
                .collect()
        })
        .collect::<Result<_, _>>()?;
    let a = IntMatrix::from_rows(rows)?;
    report.push("p", p);
    report.push("matrix", input.require("matrix")?);
    report.push("rmax", cli.rmax);
    report.push("smax", cli.smax);
    report.push("verdict", frobenius_obstruction(&a, p, cli.rmax, cli.smax));
    Ok(())
}
