//! `radon`: compute the monodromy of the Radon transform from a JSON
//! description of fundamental data.
//!
//! Exit status is 0 on success (warnings included), 2 when the input or
//! its validation fails, and 1 on internal errors.

use std::fs;
use std::io::{self, Read, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{anyhow, Context};
use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use radon_core::field::{FieldElement, FieldKind, FieldSpec};
use radon_core::fixtures;
use radon_core::group::{
    closure, decompose, derived_series, modular_order, reduce_group, reduce_matrix, ClosureOptions, ClosureResult,
    GroupError, MatrixGroupGen, DEFAULT_CAP,
};
use radon_core::io::{parse_input, Input, InputError, OutputDoc};
use radon_core::linalg::Matrix;
use radon_core::radon::{check_relations, radon_rank, radon_transform, validate, RadonError, RadonOptions};

#[derive(Parser)]
#[command(name = "radon", version, about = "Monodromy of the Radon transform of a local system")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Compute the output monodromy tuple.
    Compute(RunArgs),
    /// Print the rank predicted by the rank formula.
    Rank(RunArgs),
    /// Validate the input and check the listed relations on the output.
    Check(RunArgs),
    /// Analyse the group generated by the output tuple.
    Group(RunArgs),
}

#[derive(Args, Clone)]
struct RunArgs {
    /// Input document: a path, `-` for stdin, or `fixture:NAME` for a bundled one.
    #[arg(value_name = "INPUT", conflicts_with = "input")]
    path: Option<String>,
    #[arg(long, value_name = "PATH")]
    input: Option<String>,
    /// Write the result here instead of stdout.
    #[arg(long, short, value_name = "PATH")]
    output: Option<PathBuf>,
    /// Check subspace stability for every braid while computing.
    #[arg(long)]
    verify: bool,
    /// Largest group enumerated before giving up.
    #[arg(long, default_value_t = DEFAULT_CAP as u64, value_parser = clap::value_parser!(u64).range(1..))]
    cap: u64,
    /// Primes for the modular group order.
    #[arg(long, value_delimiter = ',', default_values_t = [7u64, 13])]
    primes: Vec<u64>,
    /// Enumerate over the input field instead of modulo primes.
    #[arg(long)]
    exact: bool,
    /// Worker threads.
    #[arg(long, default_value_t = 1)]
    jobs: usize,
}

/// An error with the exit status it maps to.
enum Failure {
    Input(anyhow::Error),
    Internal(anyhow::Error),
}

impl From<InputError> for Failure {
    fn from(e: InputError) -> Self {
        Failure::Input(e.into())
    }
}

impl From<RadonError> for Failure {
    fn from(e: RadonError) -> Self {
        match e {
            RadonError::Cocycle(_) | RadonError::Linalg(_) | RadonError::ThreadPool(_) => Failure::Internal(e.into()),
            _ => Failure::Input(e.into()),
        }
    }
}

impl From<GroupError> for Failure {
    fn from(e: GroupError) -> Self {
        match e {
            GroupError::BadPrime { .. } | GroupError::NoPrimes | GroupError::InvalidCap => Failure::Input(e.into()),
            GroupError::OrderDisagreement(_) => Failure::Internal(
                anyhow::Error::new(e).context("the group may be infinite; `--exact` enumerates up to the cap"),
            ),
            _ => Failure::Internal(e.into()),
        }
    }
}

type Outcome = Result<String, Failure>;

fn read_input(args: &RunArgs) -> Result<Input, Failure> {
    let source = args.input.as_ref().or(args.path.as_ref()).ok_or_else(|| Failure::Input(anyhow!("no input given")))?;
    if let Some(name) = source.strip_prefix("fixture:") {
        let parsed = fixtures::load(name).ok_or_else(|| {
            let names: Vec<&str> = fixtures::ALL.iter().map(|(n, _)| *n).collect();
            Failure::Input(anyhow!("unknown fixture `{name}`; available: {}", names.join(", ")))
        })?;
        return parsed.map_err(Failure::from);
    }
    let text = if source == "-" {
        let mut buf = String::new();
        io::stdin().read_to_string(&mut buf).context("reading stdin").map_err(Failure::Input)?;
        buf
    } else {
        fs::read_to_string(source).with_context(|| format!("reading {source}")).map_err(Failure::Input)?
    };
    parse_input(&text).map_err(|e| Failure::Input(anyhow::Error::new(e).context(source.clone())))
}

fn options(args: &RunArgs) -> RadonOptions {
    RadonOptions { verify: args.verify, jobs: args.jobs }
}

fn to_json<T: Serialize>(value: &T) -> Outcome {
    serde_json::to_string_pretty(value).map(|s| s + "\n").map_err(|e| Failure::Internal(e.into()))
}

fn cmd_compute(args: &RunArgs) -> Outcome {
    let input = read_input(args)?;
    let res = radon_transform(&input.data, &options(args))?;
    for w in &res.report.warnings {
        eprintln!("warning: {w}");
    }
    to_json(&OutputDoc::from_result(&input.data.field, &res))
}

fn cmd_rank(args: &RunArgs) -> Outcome {
    let input = read_input(args)?;
    Ok(format!("{}\n", radon_rank(&input.data)?))
}

fn cmd_check(args: &RunArgs) -> Outcome {
    let input = read_input(args)?;
    let validation = validate(&input.data);
    if !validation.product_ok {
        return Err(Failure::Input(anyhow!("the product of the monodromy tuple is not the identity")));
    }
    if !validation.strand_ok {
        return Err(Failure::Input(anyhow!("a braid uses more strands than there are matrices")));
    }
    let res = radon_transform(&input.data, &options(args))?;
    let mut doc = OutputDoc::from_result(&input.data.field, &res);
    let relations_ok = check_relations(&res.gtilde, &input.relations)?;
    doc.report.relations_ok = Some(relations_ok);
    for w in &res.report.warnings {
        eprintln!("warning: {w}");
    }
    if !relations_ok {
        return Err(Failure::Input(anyhow!("the output tuple does not satisfy the listed relations")));
    }
    to_json(&doc.report)
}

#[derive(Serialize)]
struct SummandReport {
    dim: usize,
    irreducible: bool,
    commutant_dim: usize,
    exhaustive_spin: Option<bool>,
    basis: Vec<Vec<String>>,
}

#[derive(Serialize)]
struct GroupReport {
    method: &'static str,
    primes: Vec<u64>,
    degree: usize,
    generators: usize,
    complete: bool,
    order: u64,
    derived_series: Option<Vec<u64>>,
    solvable: Option<bool>,
    /// Roots of unity `λ` of the input field with `λ·1` in the group.
    scalars: Vec<String>,
    /// Field over which the decomposition was computed.
    decomposition_field: Option<String>,
    summands: Vec<SummandReport>,
    warnings: Vec<String>,
}

/// Roots of unity of `k`, in a fixed order.
fn roots_of_unity(k: &FieldSpec) -> Vec<FieldElement> {
    match k.kind() {
        FieldKind::Rational => vec![k.one(), k.from_i64(-1)],
        FieldKind::Prime(p) if p <= 1 << 12 => (1..p).map(FieldElement::Residue).collect(),
        FieldKind::Prime(_) => vec![k.one(), k.from_i64(-1)],
        FieldKind::Cyclotomic(m) => {
            // -z has order 2m when m is odd.
            let z = k.zeta().expect("cyclotomic");
            let (w, n) = if m % 2 == 0 { (z, m) } else { (k.neg(&z), 2 * m) };
            let mut out = Vec::with_capacity(n as usize);
            let mut x = k.one();
            for _ in 0..n {
                out.push(x.clone());
                x = k.mul(&x, &w);
            }
            out
        }
    }
}

fn cmd_group(args: &RunArgs) -> Outcome {
    let input = read_input(args)?;
    let res = radon_transform(&input.data, &options(args))?;
    let k = input.data.field.clone();
    let d = res.spaces.dim_w();
    let group = MatrixGroupGen::new(&k, d, res.gtilde.clone())?;
    let cap = usize::try_from(args.cap).unwrap_or(usize::MAX);
    let opts = ClosureOptions { cap, jobs: args.jobs, retain: true };
    let mut warnings = res.report.warnings.clone();

    let modular = !args.exact && k.characteristic() == 0;
    // The group used for membership and decomposition, with its closure.
    let (work, work_closure, method, primes): (MatrixGroupGen, ClosureResult, _, Vec<u64>) = if modular {
        let order = match modular_order(&group, &args.primes, &ClosureOptions { retain: false, ..opts }) {
            Ok(o) => Some(o),
            Err(GroupError::CapExceeded(_)) => None,
            Err(e) => return Err(e.into()),
        };
        let p = args.primes[0];
        let reduced = reduce_group(&group, p)?;
        let c = closure(&reduced, &opts)?;
        if let Some(o) = order {
            debug_assert_eq!(o, c.order);
        }
        (reduced, c, "modular", args.primes.clone())
    } else {
        let c = closure(&group, &opts)?;
        (group.clone(), c, "exact", Vec::new())
    };

    let mut report = GroupReport {
        method,
        primes,
        degree: d,
        generators: group.generators().len(),
        complete: work_closure.is_complete(),
        order: work_closure.order,
        derived_series: None,
        solvable: None,
        scalars: Vec::new(),
        decomposition_field: None,
        summands: Vec::new(),
        warnings: Vec::new(),
    };
    if !work_closure.is_complete() {
        warnings.push(format!("enumeration stopped at the cap of {cap} elements"));
        report.warnings = warnings;
        for w in &report.warnings {
            eprintln!("warning: {w}");
        }
        return to_json(&report);
    }

    let series = derived_series(&work, &opts)?;
    report.solvable = Some(series.solvable);
    report.derived_series = Some(series.orders);

    for lambda in roots_of_unity(&k) {
        let scalar = Matrix::scalar(&k, d, &lambda);
        let image = if modular { reduce_matrix(&scalar, work.field().characteristic())? } else { scalar };
        if work_closure.contains(&image)? {
            report.scalars.push(k.format(&lambda));
        }
    }

    match decompose(&work, &work_closure) {
        Ok(parts) => {
            report.decomposition_field = Some(work.field().to_string());
            report.summands = parts
                .iter()
                .map(|s| SummandReport {
                    dim: s.dim(),
                    irreducible: s.is_irreducible(),
                    commutant_dim: s.commutant_dim,
                    exhaustive_spin: s.exhaustive_spin,
                    basis: s.space.basis().to_strings(),
                })
                .collect();
        }
        Err(GroupError::NotSemisimple { p, order }) => {
            warnings.push(format!("no decomposition: characteristic {p} divides the order {order}"));
        }
        Err(e) => return Err(e.into()),
    }
    report.warnings = warnings;
    for w in &report.warnings {
        eprintln!("warning: {w}");
    }
    to_json(&report)
}

fn emit(args: &RunArgs, text: &str) -> Result<(), Failure> {
    match &args.output {
        Some(path) => {
            fs::write(path, text).with_context(|| format!("writing {}", path.display())).map_err(Failure::Internal)
        }
        None => {
            let mut out = io::stdout().lock();
            out.write_all(text.as_bytes()).and_then(|_| out.flush()).map_err(|e| Failure::Internal(e.into()))
        }
    }
}

/// The error chain on one line, skipping causes already quoted by their parent.
fn describe(e: &anyhow::Error) -> String {
    let mut out = String::new();
    let mut last = String::new();
    for cause in e.chain() {
        let msg = cause.to_string();
        if !last.contains(&msg) {
            if !out.is_empty() {
                out.push_str(": ");
            }
            out.push_str(&msg);
        }
        last = msg;
    }
    out
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (args, outcome) = match &cli.command {
        Command::Compute(a) => (a, cmd_compute(a)),
        Command::Rank(a) => (a, cmd_rank(a)),
        Command::Check(a) => (a, cmd_check(a)),
        Command::Group(a) => (a, cmd_group(a)),
    };
    match outcome.and_then(|text| emit(args, &text)) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Input(e)) => {
            eprintln!("error: {}", describe(&e));
            ExitCode::from(2)
        }
        Err(Failure::Internal(e)) => {
            eprintln!("internal error: {}", describe(&e));
            ExitCode::from(1)
        }
    }
}
