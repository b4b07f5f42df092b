//! `schroeder`: enumerate families, compute relations and ranks, and run the
//! verification matrix.

use std::io::{self, Write};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

use schroeder::families::{self, FamilyKind, FamilySpec};
use schroeder::green::{self, EqPartition, Green, SemigroupTable, Starred};
use schroeder::rank::{self, RankReport, RankStatus, Target};
use schroeder::verify::{self, Status, VerifyLimits};

/// Largest Cayley table the CLI will build, in elements.
const TABLE_LIMIT: usize = 10_000;

#[derive(Parser)]
#[command(name = "schroeder", version, about = "Small Schroeder semigroups SS'_n, their ideals and Rees quotients")]
struct Cli {
    #[command(subcommand)]
    command: Command,

    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,

    /// Print full classes and timings (timings go to stderr).
    #[arg(long, global = true)]
    verbose: bool,

    /// Raise the size guard on n.
    #[arg(long, global = true)]
    max_n: Option<usize>,
}

#[derive(Subcommand)]
enum Command {
    /// List the elements of a family in canonical order.
    Enumerate {
        #[arg(long)]
        family: FamilyKind,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        p: Option<usize>,
    },
    /// Compare counting formulas with enumeration.
    Invariants {
        #[arg(long)]
        n: usize,
    },
    /// Partition a semigroup by a Green's or starred relation.
    Green {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        relation: Relation,
        #[arg(long, value_enum, default_value_t = Mode::Characterized)]
        mode: Mode,
        #[arg(long, value_enum, default_value_t = TargetArg::SsPrime)]
        target: TargetArg,
        #[arg(long)]
        p: Option<usize>,
    },
    /// Right/left abundance of SS'_n.
    Abundance {
        #[arg(long)]
        n: usize,
    },
    /// Rank by formula and by oracle, with a generating set.
    Rank {
        #[arg(long, value_enum)]
        target: TargetArg,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        p: Option<usize>,
        /// Closure computations the oracle search may spend.
        #[arg(long, default_value_t = rank::DEFAULT_SEARCH_BUDGET)]
        budget: usize,
    },
    /// Run every check for 2 <= n <= n-max.
    VerifyAll {
        #[arg(long, default_value_t = 5)]
        n_max: usize,
        /// Widen table-based and definitional checks.
        #[arg(long)]
        long: bool,
    },
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
    Text,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Mode {
    Characterized,
    Definitional,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum TargetArg {
    SsPrime,
    Ideal,
    Quotient,
}

impl From<TargetArg> for Target {
    fn from(t: TargetArg) -> Self {
        match t {
            TargetArg::SsPrime => Target::SsPrime,
            TargetArg::Ideal => Target::Ideal,
            TargetArg::Quotient => Target::Quotient,
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Relation {
    #[value(name = "L")]
    L,
    #[value(name = "R")]
    R,
    #[value(name = "H")]
    H,
    #[value(name = "D")]
    D,
    #[value(name = "J")]
    J,
    #[value(name = "Lstar")]
    Lstar,
    #[value(name = "Rstar")]
    Rstar,
    #[value(name = "Hstar")]
    Hstar,
    #[value(name = "Dstar")]
    Dstar,
}

impl Relation {
    fn name(self) -> &'static str {
        match self {
            Relation::L => "L",
            Relation::R => "R",
            Relation::H => "H",
            Relation::D => "D",
            Relation::J => "J",
            Relation::Lstar => "Lstar",
            Relation::Rstar => "Rstar",
            Relation::Hstar => "Hstar",
            Relation::Dstar => "Dstar",
        }
    }

    fn green(self) -> Option<Green> {
        match self {
            Relation::L => Some(Green::L),
            Relation::R => Some(Green::R),
            Relation::H => Some(Green::H),
            Relation::D => Some(Green::D),
            Relation::J => Some(Green::J),
            _ => None,
        }
    }

    fn starred(self) -> Option<Starred> {
        match self {
            Relation::Lstar => Some(Starred::Lstar),
            Relation::Rstar => Some(Starred::Rstar),
            Relation::Hstar => Some(Starred::Hstar),
            Relation::Dstar => Some(Starred::Dstar),
            _ => None,
        }
    }
}

enum Failure {
    Usage(String),
    Guard(String),
    Check(String),
    Io(io::Error),
}

impl From<schroeder::Error> for Failure {
    fn from(e: schroeder::Error) -> Self {
        use schroeder::Error as E;
        match e {
            E::SizeGuard { .. } => Failure::Guard(e.to_string()),
            E::Family(_) | E::IndexRange(_) | E::IdealFormulaRange { .. } | E::Parse { .. } | E::ChainSize(_) => {
                Failure::Usage(e.to_string())
            }
            other => Failure::Check(other.to_string()),
        }
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Io(e)
    }
}

impl From<csv::Error> for Failure {
    fn from(e: csv::Error) -> Self {
        Failure::Io(e.into())
    }
}

impl From<serde_json::Error> for Failure {
    fn from(e: serde_json::Error) -> Self {
        Failure::Io(e.into())
    }
}

type Outcome = Result<bool, Failure>;

fn check_n(n: usize, guard: usize, max_n: Option<usize>, what: &str) -> Result<(), Failure> {
    if n < 2 {
        return Err(Failure::Usage(format!("SS'_{n} is empty; n must be at least 2")));
    }
    let limit = max_n.unwrap_or(guard);
    if n > limit {
        return Err(Failure::Guard(format!("{what} too large at n = {n} (limit {limit}); raise --max-n")));
    }
    if n > schroeder::pmap::MAX_N {
        return Err(Failure::Usage(format!("n = {n} exceeds {}", schroeder::pmap::MAX_N)));
    }
    Ok(())
}

fn check_table(s: &SemigroupTable) -> Result<(), Failure> {
    if s.len() > TABLE_LIMIT {
        return Err(Failure::Guard(format!(
            "Cayley table of {} elements exceeds {TABLE_LIMIT}",
            s.len()
        )));
    }
    Ok(())
}

fn write_json<T: Serialize>(out: &mut impl Write, value: &T) -> Result<(), Failure> {
    serde_json::to_writer_pretty(&mut *out, value)?;
    writeln!(out)?;
    Ok(())
}

fn timing(verbose: bool, label: &str, clock: Instant) {
    if verbose {
        eprintln!("{label}: {} ms", clock.elapsed().as_millis());
    }
}

#[derive(Serialize)]
struct Listing<'a> {
    family: &'a str,
    n: usize,
    p: Option<usize>,
    count: usize,
    elements: Vec<String>,
}

fn cmd_enumerate(cli: &Cli, family: FamilyKind, n: usize, p: Option<usize>, out: &mut impl Write) -> Outcome {
    check_n(n, 12, cli.max_n, "enumeration")?;
    let spec = FamilySpec::new(family, n, p)?;
    let clock = Instant::now();
    let elements = families::enumerate(&spec)?;
    match cli.format {
        Format::Text => {
            for a in elements {
                writeln!(out, "{a}")?;
            }
        }
        Format::Csv => {
            let mut w = csv::Writer::from_writer(&mut *out);
            w.write_record(["index", "element", "height"])?;
            for (i, a) in elements.enumerate() {
                w.write_record([i.to_string(), a.encode(), a.height().to_string()])?;
            }
            w.flush()?;
        }
        Format::Json => {
            let elements: Vec<String> = elements.map(|a| a.encode()).collect();
            let listing = Listing {
                family: family.name(),
                n,
                p,
                count: elements.len(),
                elements,
            };
            write_json(out, &listing)?;
        }
    }
    timing(cli.verbose, "enumerate", clock);
    Ok(true)
}

fn cmd_invariants(cli: &Cli, n: usize, out: &mut impl Write) -> Outcome {
    check_n(n, 12, cli.max_n, "enumeration")?;
    let clock = Instant::now();
    let report = verify::invariant_report(n)?;
    match cli.format {
        Format::Json => write_json(out, &report)?,
        Format::Csv => {
            let mut w = csv::Writer::from_writer(&mut *out);
            w.write_record(["name", "formula_value", "oracle_value", "status", "reason"])?;
            for r in &report.rows {
                w.write_record([
                    r.name.clone(),
                    r.formula_value.to_string(),
                    r.oracle_value.to_string(),
                    status_name(r.status).to_string(),
                    r.reason.clone().unwrap_or_default(),
                ])?;
            }
            w.flush()?;
        }
        Format::Text => {
            let width = report.rows.iter().map(|r| r.name.len()).max().unwrap_or(0);
            for r in &report.rows {
                writeln!(
                    out,
                    "{:<width$}  {:>12}  {:>12}  {}",
                    r.name,
                    r.formula_value,
                    r.oracle_value,
                    status_name(r.status)
                )?;
            }
        }
    }
    if cli.verbose {
        for (r, ms) in report.rows.iter().zip(&report.runtime_ms) {
            eprintln!("{}: {ms} ms", r.name);
        }
    }
    timing(cli.verbose, "invariants", clock);
    Ok(report.all_pass())
}

fn status_name(s: Status) -> &'static str {
    match s {
        Status::Pass => "PASS",
        Status::Fail => "FAIL",
        Status::Skipped => "SKIPPED",
    }
}

fn table(target: TargetArg, n: usize, p: Option<usize>) -> Result<SemigroupTable, Failure> {
    let s = rank::table_for(target.into(), n, p)?;
    check_table(&s)?;
    Ok(s)
}

/// The partition predicted without a Cayley table.
fn characterized(s: &SemigroupTable, relation: Relation) -> EqPartition {
    match (relation.green(), relation.starred()) {
        (Some(Green::R | Green::H), _) => EqPartition::identity(s.len()),
        (Some(_), _) => green::green_l_characterized(s),
        (None, Some(w)) => green::starred_characterized(s, w),
        (None, None) => unreachable!("every relation is Green's or starred"),
    }
}

#[derive(Serialize)]
struct PartitionOut {
    target: String,
    n: usize,
    p: Option<usize>,
    relation: &'static str,
    mode: &'static str,
    num_classes: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    agreement: Option<bool>,
    classes: Vec<Vec<String>>,
}

#[allow(clippy::too_many_arguments)]
fn cmd_green(
    cli: &Cli,
    n: usize,
    relation: Relation,
    mode: Mode,
    target: TargetArg,
    p: Option<usize>,
    out: &mut impl Write,
) -> Outcome {
    let guard = if mode == Mode::Definitional { 5 } else { 12 };
    check_n(n, guard, cli.max_n, "definitional check")?;
    let clock = Instant::now();
    let s = rank::table_for(target.into(), n, p)?;
    let predicted = characterized(&s, relation);
    let (partition, agreement) = match mode {
        Mode::Characterized => (predicted, None),
        Mode::Definitional => {
            check_table(&s)?;
            let computed = match (relation.green(), relation.starred()) {
                (Some(g), _) => green::green(&s, g),
                (None, Some(w)) => {
                    let limit = match cli.max_n {
                        Some(_) => green::DEFINITIONAL_LIMIT.max(s.len()),
                        None => green::DEFINITIONAL_LIMIT,
                    };
                    green::starred_definitional(&s, w, limit)?
                }
                (None, None) => unreachable!("every relation is Green's or starred"),
            };
            let agree = computed == predicted;
            (computed, Some(agree))
        }
    };
    let classes: Vec<Vec<String>> = partition
        .classes()
        .iter()
        .map(|c| c.iter().map(|&i| s.element(i).to_string()).collect())
        .collect();
    match cli.format {
        Format::Text => {
            let mut line = format!("classes: {}", partition.num_classes());
            if partition.is_identity() {
                let name = relation.name().trim_end_matches("star");
                let star = if relation.starred().is_some() { "*" } else { "" };
                line.push_str(&format!(" (all singletons; {name}{star}-trivial)"));
            }
            writeln!(out, "{line}")?;
            if let Some(a) = agreement {
                writeln!(out, "agreement: {a}")?;
            }
            if cli.verbose {
                for c in &classes {
                    writeln!(out, "{{{}}}", c.join(" "))?;
                }
            }
        }
        Format::Csv => {
            let mut w = csv::Writer::from_writer(&mut *out);
            w.write_record(["class", "element"])?;
            for (k, c) in classes.iter().enumerate() {
                for e in c {
                    w.write_record([k.to_string(), e.clone()])?;
                }
            }
            w.flush()?;
        }
        Format::Json => {
            let doc = PartitionOut {
                target: Target::from(target).to_string(),
                n,
                p,
                relation: relation.name(),
                mode: match mode {
                    Mode::Characterized => "characterized",
                    Mode::Definitional => "definitional",
                },
                num_classes: partition.num_classes(),
                agreement,
                classes,
            };
            write_json(out, &doc)?;
        }
    }
    timing(cli.verbose, "green", clock);
    Ok(agreement.unwrap_or(true))
}

#[derive(Serialize)]
struct AbundanceOut {
    n: usize,
    right_abundant: bool,
    rstar_unique_idempotent: bool,
    left_abundant: bool,
    rstar_classes: usize,
    lstar_classes: usize,
    idempotent_free_lstar_classes: usize,
    lstar_witness: Option<Vec<String>>,
}

fn cmd_abundance(cli: &Cli, n: usize, out: &mut impl Write) -> Outcome {
    check_n(n, 8, cli.max_n, "abundance report")?;
    let s = SemigroupTable::ss_prime(n)?;
    let rep = green::abundance_report(&s);
    let doc = AbundanceOut {
        n,
        right_abundant: rep.right_abundant,
        rstar_unique_idempotent: rep.rstar_unique_idempotent,
        left_abundant: rep.left_abundant,
        rstar_classes: rep.rstar_idempotent_counts.len(),
        lstar_classes: rep.lstar_idempotent_counts.len(),
        idempotent_free_lstar_classes: rep.lstar_idempotent_counts.iter().filter(|&&c| c == 0).count(),
        lstar_witness: rep
            .lstar_witness
            .as_ref()
            .map(|c| c.iter().map(|&i| s.element(i).to_string()).collect()),
    };
    match cli.format {
        Format::Json => write_json(out, &doc)?,
        Format::Csv => {
            let mut w = csv::Writer::from_writer(&mut *out);
            w.write_record(["n", "right_abundant", "rstar_unique_idempotent", "left_abundant", "idempotent_free_lstar_classes"])?;
            w.write_record([
                n.to_string(),
                doc.right_abundant.to_string(),
                doc.rstar_unique_idempotent.to_string(),
                doc.left_abundant.to_string(),
                doc.idempotent_free_lstar_classes.to_string(),
            ])?;
            w.flush()?;
        }
        Format::Text => {
            writeln!(out, "right abundant: {} (one idempotent per R*-class: {})", doc.right_abundant, doc.rstar_unique_idempotent)?;
            writeln!(
                out,
                "left abundant: {} ({} of {} L*-classes without an idempotent)",
                doc.left_abundant, doc.idempotent_free_lstar_classes, doc.lstar_classes
            )?;
            if let Some(w) = &doc.lstar_witness {
                writeln!(out, "witness: {{{}}}", w.join(" "))?;
            }
        }
    }
    Ok(true)
}

#[derive(Serialize)]
struct RankOut {
    #[serde(flatten)]
    report: RankReport,
    status: RankStatus,
}

fn cmd_rank(cli: &Cli, target: TargetArg, n: usize, p: Option<usize>, budget: usize, out: &mut impl Write) -> Outcome {
    check_n(n, 8, cli.max_n, "rank computation")?;
    let clock = Instant::now();
    check_table(&table(target, n, p)?)?;
    let report = rank::rank_report(target.into(), n, p, budget)?;
    let status = report.status();
    match cli.format {
        Format::Json => write_json(out, &RankOut { report: report.clone(), status })?,
        Format::Csv => {
            let mut w = csv::Writer::from_writer(&mut *out);
            w.write_record(["target", "n", "p", "formula_value", "oracle_value", "certified", "status", "generating_set"])?;
            w.write_record([
                report.family.target.to_string(),
                n.to_string(),
                p.map(|p| p.to_string()).unwrap_or_default(),
                report.formula_value.to_string(),
                report.oracle_value.map(|v| v.to_string()).unwrap_or_default(),
                report.minimality_certified.to_string(),
                rank_status_name(status).to_string(),
                report.generating_set.join(" "),
            ])?;
            w.flush()?;
        }
        Format::Text => {
            let oracle = report.oracle_value.map_or("none".to_string(), |v| v.to_string());
            writeln!(out, "formula: {}", report.formula_value)?;
            writeln!(out, "oracle: {oracle}")?;
            writeln!(out, "status: {}", rank_status_name(status))?;
            writeln!(out, "notes: {}", report.notes)?;
            writeln!(out, "generators ({}):", report.generating_set.len())?;
            for g in &report.generating_set {
                writeln!(out, "  {g}")?;
            }
        }
    }
    timing(cli.verbose, "rank", clock);
    Ok(status != RankStatus::Fail)
}

fn rank_status_name(s: RankStatus) -> &'static str {
    match s {
        RankStatus::Pass => "PASS",
        RankStatus::Fail => "FAIL",
        RankStatus::Uncertified => "UNCERTIFIED",
    }
}

fn cmd_verify_all(cli: &Cli, n_max: usize, long: bool, out: &mut impl Write) -> Outcome {
    check_n(n_max, 12, cli.max_n, "verification")?;
    let clock = Instant::now();
    let rows = verify::verify_all(&VerifyLimits::new(n_max, long));
    let ok = rows.iter().all(|r| r.status != Status::Fail);
    match cli.format {
        Format::Json => write_json(out, &rows)?,
        Format::Csv => {
            let mut w = csv::Writer::from_writer(&mut *out);
            w.write_record(["check", "n", "status", "detail"])?;
            for r in &rows {
                w.write_record([r.check, &r.n.to_string(), status_name(r.status), &r.detail])?;
            }
            w.flush()?;
        }
        Format::Text => {
            let width = verify::CHECKS.iter().map(|c| c.len()).max().unwrap_or(0);
            write!(out, "{:<width$}", "check")?;
            for n in 2..=n_max {
                write!(out, "  n={n:<3}")?;
            }
            writeln!(out)?;
            for check in verify::CHECKS {
                write!(out, "{check:<width$}")?;
                for r in rows.iter().filter(|r| r.check == check) {
                    let cell = match r.status {
                        Status::Pass => "PASS",
                        Status::Fail => "FAIL",
                        Status::Skipped => "-",
                    };
                    write!(out, "  {cell:<5}")?;
                }
                writeln!(out)?;
            }
            for r in rows.iter().filter(|r| r.status == Status::Fail) {
                writeln!(out, "FAIL {} n={}: {}", r.check, r.n, r.detail)?;
            }
            writeln!(out, "{}", if ok { "all checks pass" } else { "some checks fail" })?;
        }
    }
    timing(cli.verbose, "verify-all", clock);
    Ok(ok)
}

fn run(cli: &Cli, out: &mut impl Write) -> Outcome {
    match cli.command {
        Command::Enumerate { family, n, p } => cmd_enumerate(cli, family, n, p, out),
        Command::Invariants { n } => cmd_invariants(cli, n, out),
        Command::Green {
            n,
            relation,
            mode,
            target,
            p,
        } => cmd_green(cli, n, relation, mode, target, p, out),
        Command::Abundance { n } => cmd_abundance(cli, n, out),
        Command::Rank { target, n, p, budget } => cmd_rank(cli, target, n, p, budget, out),
        Command::VerifyAll { n_max, long } => cmd_verify_all(cli, n_max, long, out),
    }
}

fn init_threads() {
    if let Some(k) = std::env::var("SCHROEDER_THREADS").ok().and_then(|v| v.parse::<usize>().ok()) {
        // a second initialisation only fails if a pool already exists
        let _ = rayon::ThreadPoolBuilder::new().num_threads(k.max(1)).build_global();
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    init_threads();
    let stdout = io::stdout();
    let mut out = io::BufWriter::new(stdout.lock());
    let result = run(&cli, &mut out);
    let flushed = out.flush();
    match (result, flushed) {
        (Ok(true), Ok(())) => ExitCode::SUCCESS,
        (Ok(false), Ok(())) => ExitCode::from(1),
        (Err(Failure::Usage(msg)), _) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        (Err(Failure::Guard(msg)), _) => {
            eprintln!("error: {msg}");
            ExitCode::from(3)
        }
        (Err(Failure::Check(msg)), _) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        // a closed pipe is not an error for a listing tool
        (Err(Failure::Io(e)), _) | (_, Err(e)) if e.kind() == io::ErrorKind::BrokenPipe => ExitCode::SUCCESS,
        (Err(Failure::Io(e)), _) | (_, Err(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
