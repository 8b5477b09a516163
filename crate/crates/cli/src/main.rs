use std::fmt::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;
use std::thread;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use primsieve::criteria::{classify, ClassificationRecord, Verdict, RECORD_SCHEMA};
use primsieve::data::{build_table, factor_for, FactorFixtures, FactorSource, TableId, TableOptions};
use primsieve::hyperplane::{canonical_field, exhaustive_exception_search, SearchBudget, SEARCH_CEILING};
use primsieve::numtheory::{prime_power, FactorBudget, NumError};
use primsieve::selfcheck::{run_selfcheck, Fault, SelfcheckOptions};

/// Like `print!`/`println!`, but a closed stdout (e.g. `| head`) becomes an
/// error instead of a panic.
macro_rules! out {
    ($($arg:tt)*) => {{
        use std::io::Write as _;
        write!(std::io::stdout().lock(), $($arg)*)?
    }};
}

macro_rules! outln {
    ($($arg:tt)*) => {{
        use std::io::Write as _;
        writeln!(std::io::stdout().lock(), $($arg)*)?
    }};
}

const EXIT_ELIMINATED: u8 = 0;
const EXIT_POSSIBLE: u8 = 10;
const EXIT_GENUINE: u8 = 20;
const EXIT_INCONCLUSIVE: u8 = 30;

/// Primitive elements avoiding affine hyperplanes: sieve criteria,
/// table regeneration and exhaustive search in small fields.
#[derive(Parser, Debug)]
#[command(version, about)]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Args, Debug)]
struct Global {
    /// Factorization fixtures (`q r p1[^e1] ...` per line), merged over the
    /// bundled set.
    #[arg(long, global = true, value_name = "FILE")]
    factors: Option<PathBuf>,
    /// Emit JSON.
    #[arg(long, global = true, conflicts_with = "tsv")]
    json: bool,
    /// Emit tab-separated values.
    #[arg(long, global = true)]
    tsv: bool,
}

#[derive(Subcommand, Debug)]
enum Cmd {
    /// Classify one (q, r). Exit code 0 eliminated, 10 possible exception,
    /// 20 genuine exception, 30 inconclusive.
    Classify {
        #[arg(long)]
        q: u64,
        #[arg(long)]
        r: u32,
    },
    /// Regenerate a table: 1-5 or main.
    Table {
        #[arg(long)]
        id: TableId,
        /// Restrict to these q (comma separated).
        #[arg(long, value_delimiter = ',')]
        q: Option<Vec<u64>>,
        /// Cap every r range.
        #[arg(long)]
        r_max: Option<u32>,
    },
    /// Classify (q, r) for r = 2..=r_max; exit code is the worst seen.
    Sweep {
        #[arg(long)]
        q: u64,
        #[arg(long)]
        r_max: u32,
    },
    /// Exhaustive search for hyperplane sets covering every primitive
    /// element (q^r <= 729).
    Exceptions {
        #[arg(long)]
        q: u32,
        #[arg(long)]
        r: u32,
    },
    /// Run the brute-force property suites.
    Selfcheck {
        /// Every catalogued field up to this order instead of the default six.
        #[arg(long)]
        max_order: Option<u32>,
        #[arg(long, default_value_t = SelfcheckOptions::default().seed)]
        seed: u64,
        /// Negative control: break the counting identity on purpose.
        #[arg(long)]
        inject_fault: bool,
    },
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Format {
    Json,
    Tsv,
    Text,
}

impl Global {
    fn format(&self, default: Format) -> Format {
        if self.json {
            Format::Json
        } else if self.tsv {
            Format::Tsv
        } else {
            default
        }
    }

    fn fixtures(&self) -> Result<FactorFixtures> {
        let bundled = FactorFixtures::bundled();
        match &self.factors {
            Some(path) => Ok(bundled.merged(&FactorFixtures::load(path)?)),
            None => Ok(bundled.clone()),
        }
    }
}

/// A classification, or the reason none could be made.
#[derive(Serialize)]
#[serde(untagged)]
enum Outcome {
    Done(Box<ClassificationRecord>),
    Inconclusive {
        schema: u32,
        q: u64,
        r: u32,
        verdict: &'static str,
        reason: String,
    },
}

impl Outcome {
    fn exit_code(&self) -> u8 {
        match self {
            Outcome::Done(rec) => match rec.verdict {
                Verdict::Eliminated => EXIT_ELIMINATED,
                Verdict::PossibleException => EXIT_POSSIBLE,
                Verdict::GenuineException => EXIT_GENUINE,
            },
            Outcome::Inconclusive { .. } => EXIT_INCONCLUSIVE,
        }
    }

    fn tsv_row(&self) -> String {
        match self {
            Outcome::Done(rec) => {
                let verdict = serde_json::to_value(rec.verdict).expect("verdict");
                let criterion = rec
                    .criterion
                    .map(|c| {
                        serde_json::to_value(c)
                            .expect("criterion")
                            .as_str()
                            .unwrap_or("")
                            .to_string()
                    })
                    .unwrap_or_else(|| "-".into());
                format!(
                    "{}\t{}\t{}\t{}\t{}\t{}",
                    rec.q,
                    rec.r,
                    verdict.as_str().unwrap_or(""),
                    criterion,
                    rec.s.map_or("-".into(), |s| s.to_string()),
                    rec.omega_r
                )
            }
            Outcome::Inconclusive { q, r, verdict, .. } => format!("{q}\t{r}\t{verdict}\t-\t-\t-"),
        }
    }
}

const TSV_HEADER: &str = "q\tr\tverdict\tcriterion\ts\tomega_r";

fn classify_one(q: u64, r: u32, fixtures: &FactorFixtures, budget: FactorBudget) -> Result<Outcome> {
    if prime_power(q).is_none() {
        bail!("q = {q} is not a prime power");
    }
    if r < 2 {
        bail!("r must be at least 2");
    }
    let (fact, source) = match factor_for(q, r, fixtures, budget) {
        Ok(f) => f,
        Err(e @ NumError::Incomplete { .. }) => {
            return Ok(Outcome::Inconclusive {
                schema: RECORD_SCHEMA,
                q,
                r,
                verdict: "inconclusive",
                reason: e.to_string(),
            })
        }
        Err(e) => return Err(e.into()),
    };
    let mut rec = classify(q, r, &fact)?;
    if source == FactorSource::Fixture {
        rec.notes = "factorization from fixtures".into();
    }
    let small = (q as u128).pow(r) <= SEARCH_CEILING as u128;
    if rec.verdict == Verdict::PossibleException && small {
        let ctx = canonical_field(q as u32, r)?;
        // Past the budget the pair simply stays a possible exception.
        if let Ok(certs) = exhaustive_exception_search(&ctx, SearchBudget::default()) {
            if let Some(first) = certs.first() {
                let line = first.to_line(&ctx);
                rec = rec.with_certificate(line);
                rec.notes = format!("exhaustive search found {} configurations", certs.len());
            }
        }
    }
    Ok(Outcome::Done(Box::new(rec)))
}

fn cmd_classify(g: &Global, q: u64, r: u32) -> Result<u8> {
    let outcome = classify_one(q, r, &g.fixtures()?, FactorBudget::from_env())?;
    match g.format(Format::Json) {
        Format::Tsv => outln!("{TSV_HEADER}\n{}", outcome.tsv_row()),
        _ => outln!("{}", serde_json::to_string_pretty(&outcome)?),
    }
    Ok(outcome.exit_code())
}

fn cmd_sweep(g: &Global, q: u64, r_max: u32) -> Result<u8> {
    let fixtures = g.fixtures()?;
    let budget = FactorBudget::from_env();
    let rs: Vec<u32> = (2..=r_max).collect();
    let workers = thread::available_parallelism().map_or(1, |n| n.get()).min(8);
    let chunk = rs.len().div_ceil(workers).max(1);
    let outcomes: Vec<Outcome> = thread::scope(|s| {
        let handles: Vec<_> = rs
            .chunks(chunk)
            .map(|part| {
                let fixtures = &fixtures;
                s.spawn(move || {
                    part.iter()
                        .map(|&r| classify_one(q, r, fixtures, budget))
                        .collect::<Result<Vec<_>>>()
                })
            })
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("sweep worker panicked"))
            .collect::<Result<Vec<Vec<_>>>>()
    })?
    .into_iter()
    .flatten()
    .collect();
    match g.format(Format::Tsv) {
        Format::Json => outln!("{}", serde_json::to_string_pretty(&outcomes)?),
        _ => {
            outln!("{TSV_HEADER}");
            for o in &outcomes {
                outln!("{}", o.tsv_row());
            }
        }
    }
    Ok(outcomes.iter().map(Outcome::exit_code).max().unwrap_or(EXIT_ELIMINATED))
}

fn cmd_table(g: &Global, id: TableId, qs: Option<Vec<u64>>, r_max: Option<u32>) -> Result<u8> {
    let opts = TableOptions {
        qs,
        r_max,
        budget: FactorBudget::from_env(),
        fixtures: g.fixtures()?,
    };
    let table = build_table(id, &opts)?;
    match g.format(Format::Tsv) {
        Format::Json => outln!("{}", table.to_json()),
        _ => out!("{}", table.to_tsv()),
    }
    if table.missing.is_empty() {
        return Ok(EXIT_ELIMINATED);
    }
    let pairs: Vec<String> = table.missing.iter().map(|(q, r)| format!("({q},{r})")).collect();
    eprintln!("missing factorizations for {} pairs: {}", pairs.len(), pairs.join(" "));
    Ok(EXIT_INCONCLUSIVE)
}

#[derive(Serialize)]
struct ExceptionsOut {
    q: u32,
    r: u32,
    ext_poly: Vec<u32>,
    generator: String,
    certificates: Vec<String>,
}

fn cmd_exceptions(g: &Global, q: u32, r: u32) -> Result<u8> {
    if prime_power(q as u64).is_none() || r < 1 {
        bail!("need a prime power q and r >= 1");
    }
    let order = (q as u64).checked_pow(r).filter(|&n| n <= SEARCH_CEILING as u64);
    if order.is_none() {
        bail!("q^r exceeds the search ceiling {SEARCH_CEILING}");
    }
    let ctx = canonical_field(q, r)?;
    let certs = exhaustive_exception_search(&ctx, SearchBudget::default())?;
    let lines: Vec<String> = certs.iter().map(|c| c.to_line(&ctx)).collect();
    let out = ExceptionsOut {
        q,
        r,
        ext_poly: ctx.ext_poly().to_vec(),
        generator: ctx.format_elem(ctx.generator()),
        certificates: lines,
    };
    match g.format(Format::Text) {
        Format::Json => outln!("{}", serde_json::to_string_pretty(&out)?),
        _ => {
            let mut text = String::new();
            writeln!(
                text,
                "# F_{q}^{r}: modulus {:?} (low degree first), generator {}",
                out.ext_poly, out.generator
            )?;
            if out.certificates.is_empty() {
                text.push_str("none\n");
            }
            for line in &out.certificates {
                writeln!(text, "{line}")?;
            }
            out!("{text}");
        }
    }
    Ok(if certs.is_empty() {
        EXIT_ELIMINATED
    } else {
        EXIT_GENUINE
    })
}

fn cmd_selfcheck(g: &Global, max_order: Option<u32>, seed: u64, inject_fault: bool) -> Result<u8> {
    let opts = SelfcheckOptions {
        max_order,
        seed,
        fault: inject_fault.then_some(Fault::FlippedMobius),
    };
    let report = run_selfcheck(&opts).context("selfcheck")?;
    match g.format(Format::Text) {
        Format::Json => outln!("{}", serde_json::to_string_pretty(&report)?),
        _ => out!("{}", report.to_text()),
    }
    Ok(if report.passed() { 0 } else { 1 })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let g = &cli.global;
    let result = match cli.cmd {
        Cmd::Classify { q, r } => cmd_classify(g, q, r),
        Cmd::Table { id, q, r_max } => cmd_table(g, id, q, r_max),
        Cmd::Sweep { q, r_max } => cmd_sweep(g, q, r_max),
        Cmd::Exceptions { q, r } => cmd_exceptions(g, q, r),
        Cmd::Selfcheck {
            max_order,
            seed,
            inject_fault,
        } => cmd_selfcheck(g, max_order, seed, inject_fault),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(e)
            if e.downcast_ref::<std::io::Error>()
                .is_some_and(|io| io.kind() == std::io::ErrorKind::BrokenPipe) =>
        {
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
