mod config;

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{CommandFactory, Parser, Subcommand, ValueEnum};
use num_bigint::BigUint;
use num_rational::Rational64;
use serde_json::{json, Value};

use rootabc::arith::Factorizer;
use rootabc::cf::{expand, Convergent, RootSpec};
use rootabc::equation::{equations, normalize_to_abc, AbcTriple};
use rootabc::metrics::{equation_metrics, format_metric, triple_metrics, MetricsRecord};
use rootabc::record::{read_jsonl, resume_scan, write_csv};
use rootabc::roth::{
    ridout_cbrt_bound, ridout_cbrt_candidates, ridout_sqrt_bound, ridout_sqrt_solutions, roth_table, KSelection,
    RidoutQuery,
};
use rootabc::verify::{
    bvdp_suite, check_roth_form, gain_quality_suite, liouville_suite, scan_gains, VerificationReport,
};
use rootabc::Error;

const EXIT_USAGE: u8 = 2;
const EXIT_PRECISION: u8 = 3;
const EXIT_IO: u8 = 4;
const EXIT_VIOLATIONS: u8 = 5;

/// Continued fractions of k^(1/s), their resulting ABC equations, and bounds built on them.
#[derive(Parser)]
#[command(name = "rootabc", version, about)]
struct Cli {
    /// Emit JSON instead of text.
    #[arg(long, global = true)]
    json: bool,
    /// Worker threads for scans (default: all cores).
    #[arg(long, global = true)]
    jobs: Option<usize>,
    /// File of `key = value` defaults for the subcommand's flags.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Suite {
    Bvdp,
    Liouville,
    Gains,
    GainQuality,
    RothForm,
}

#[derive(Subcommand)]
enum Cmd {
    /// Certified continued fraction coefficients and convergents.
    Expand {
        #[arg(long)]
        k: u64,
        #[arg(long)]
        s: u32,
        #[arg(long, default_value_t = 10)]
        terms: usize,
    },
    /// Resulting equations p^s = k q^s + d and their coprime triples.
    Equations {
        #[arg(long)]
        k: u64,
        #[arg(long)]
        s: u32,
        #[arg(long, default_value_t = 10)]
        depth: usize,
    },
    /// Quality, K_eps and gains of the resulting equations, or of one triple.
    Metrics {
        #[arg(long, required_unless_present = "triple")]
        k: Option<u64>,
        #[arg(long, default_value_t = 3)]
        s: u32,
        #[arg(long, default_value_t = 10)]
        depth: usize,
        /// A coprime triple `a,b,c` instead of a root.
        #[arg(long, value_delimiter = ',', num_args = 1.., conflicts_with = "k")]
        triple: Option<Vec<String>>,
        /// ABC exponents, as fractions or decimals.
        #[arg(long, value_delimiter = ',', default_value = "1/5,2/13,1/2")]
        eps: Vec<String>,
    },
    /// Bounds on the inverse Roth constant of a cube root.
    RothTable {
        #[arg(long, default_value_t = 2)]
        k: u64,
        #[arg(long, value_delimiter = ',', default_value = "0,2/5,1/2,1")]
        eps_roth: Vec<String>,
        /// Take K_eps as the maximum over convergents 1..=depth.
        #[arg(long, default_value_t = 3)]
        depth: usize,
        /// Also consider the 2 = 1 + 1 style seed equation of convergent 0.
        #[arg(long)]
        include_seed: bool,
        /// Take K_eps from this one convergent instead.
        #[arg(long, conflicts_with_all = ["depth", "include_seed"])]
        equation: Option<usize>,
        /// Override the first convergent above the root.
        #[arg(long)]
        p1q1: Option<String>,
    },
    /// Ridout-type bound and the S-integer convergents within it.
    Ridout {
        #[arg(long)]
        s: u32,
        #[arg(long)]
        k: u64,
        #[arg(long, value_delimiter = ',', required = true)]
        primes: Vec<u64>,
        #[arg(long, default_value = "1")]
        eps: String,
        #[arg(long = "K", default_value_t = 1.0)]
        k_const: f64,
        #[arg(long, default_value_t = 40)]
        depth: usize,
        #[arg(long)]
        p1q1: Option<String>,
    },
    /// Append scan records for a range of k to a JSONL file; resumable.
    Scan {
        #[arg(long)]
        s: u32,
        #[arg(long)]
        k_min: u64,
        #[arg(long)]
        k_max: u64,
        #[arg(long, default_value_t = 20)]
        depth: usize,
        #[arg(long)]
        out: PathBuf,
        /// Also write the whole file as CSV.
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Run inequality suites; exits 5 when a failing-mode suite has violations.
    Verify {
        #[arg(long, value_enum, value_delimiter = ',', default_value = "bvdp,liouville,gains,gain-quality")]
        suite: Vec<Suite>,
        #[arg(long, default_value_t = 3)]
        s: u32,
        #[arg(long, default_value_t = 2)]
        k_min: u64,
        #[arg(long, default_value_t = 50)]
        k_max: u64,
        #[arg(long, default_value_t = 20)]
        depth: usize,
        /// Exponent for the roth-form suite.
        #[arg(long, default_value = "1/2")]
        eps_roth: String,
        /// Constant 1/C for the roth-form suite.
        #[arg(long, default_value_t = 13.16)]
        c_inverse: f64,
    },
}

#[derive(Debug)]
enum Failure {
    Usage(String),
    Core(Error),
    Violations,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Core(e)
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Core(Error::from(e))
    }
}

type CmdResult = Result<(), Failure>;

fn exit_code(f: &Failure) -> u8 {
    match f {
        Failure::Usage(_) => EXIT_USAGE,
        Failure::Violations => EXIT_VIOLATIONS,
        Failure::Core(e) => match e {
            Error::PrecisionExhausted { .. } => EXIT_PRECISION,
            Error::Io(_) | Error::MalformedRecord { .. } => EXIT_IO,
            Error::FactorizationBudgetExceeded { .. } => 1,
            _ => EXIT_USAGE,
        },
    }
}

/// `3/5`, `0.4` or `2` as an exact rational.
fn parse_rational(text: &str) -> Result<Rational64, Failure> {
    let bad = || Failure::Usage(format!("not a rational number: {text:?}"));
    let t = text.trim().replace(',', ".");
    if let Some((n, d)) = t.split_once('/') {
        let n: i64 = n.trim().parse().map_err(|_| bad())?;
        let d: i64 = d.trim().parse().map_err(|_| bad())?;
        if d == 0 {
            return Err(bad());
        }
        return Ok(Rational64::new(n, d));
    }
    if let Some((int, frac)) = t.split_once('.') {
        if frac.len() > 15 || !frac.chars().all(|c| c.is_ascii_digit()) {
            return Err(bad());
        }
        let den = 10i64.pow(frac.len() as u32);
        let int: i64 = if int.is_empty() { 0 } else { int.parse().map_err(|_| bad())? };
        let frac: i64 = if frac.is_empty() { 0 } else { frac.parse().map_err(|_| bad())? };
        let sign = if t.starts_with('-') { -1 } else { 1 };
        return Ok(Rational64::new(int * den + sign * frac, den));
    }
    t.parse::<i64>().map(Rational64::from_integer).map_err(|_| bad())
}

fn parse_rationals(list: &[String]) -> Result<Vec<Rational64>, Failure> {
    list.iter().map(|s| parse_rational(s)).collect()
}

fn print_json(v: &Value) -> CmdResult {
    let mut out = io::stdout().lock();
    serde_json::to_writer_pretty(&mut out, v).map_err(|e| Failure::Core(Error::Io(e.to_string())))?;
    writeln!(out)?;
    Ok(())
}

fn convergent_json(c: &Convergent) -> Value {
    json!({ "n": c.n, "p": c.p.to_string(), "q": c.q.to_string() })
}

fn cmd_expand(json: bool, k: u64, s: u32, terms: usize) -> CmdResult {
    if terms == 0 {
        return Err(Failure::Usage("--terms must be at least 1".into()));
    }
    let root = RootSpec::new(k, s)?;
    let cf = expand(root, terms)?;
    let convs = cf.convergents();
    if json {
        return print_json(&json!({
            "root": root.to_string(),
            "coefficients": cf.coefficients().iter().map(|b| b.to_string()).collect::<Vec<_>>(),
            "convergents": convs.iter().map(convergent_json).collect::<Vec<_>>(),
            "precision_bits": cf.precision_bits(),
        }));
    }
    println!("{root} = {cf}");
    for c in &convs {
        println!("  {:>3}  {c}", c.n);
    }
    Ok(())
}

fn cmd_equations(json: bool, k: u64, s: u32, depth: usize) -> CmdResult {
    let root = RootSpec::new(k, s)?;
    let eqs = equations(root, &expand(root, depth)?.convergents())?;
    let mut rows = Vec::new();
    for eq in &eqs {
        let t = normalize_to_abc(eq)?;
        if json {
            rows.push(json!({
                "n": eq.n(),
                "p": eq.p().to_string(),
                "q": eq.q().to_string(),
                "d": eq.d().to_string(),
                "g": eq.g(),
                "equation": eq.to_string(),
                "triple": [t.a().to_string(), t.b().to_string(), t.c().to_string()],
            }));
        } else {
            println!("{:>3}  {}/{}  {eq}  g={}  {t}", eq.n(), eq.p(), eq.q(), eq.g());
        }
    }
    if json {
        print_json(&Value::Array(rows))?;
    }
    Ok(())
}

fn metrics_json(n: Option<usize>, m: &MetricsRecord) -> Value {
    json!({
        "n": n,
        "triple": [m.triple.a().to_string(), m.triple.b().to_string(), m.triple.c().to_string()],
        "rad_abc": m.rad_abc.to_string(),
        "quality": m.quality,
        "hit": m.is_hit,
        "k_epsilon": m.k_epsilon.iter().map(|(e, v)| json!({ "eps": e.to_string(), "value": v })).collect::<Vec<_>>(),
        "approximation_gain": m.approximation_gain,
        "power_gain": m.power_gain,
        "probable_primes": m.probable_primes,
    })
}

fn print_metrics_row(label: &str, m: &MetricsRecord) {
    let ks: Vec<String> = m.k_epsilon.iter().map(|(e, v)| format!("K[{e}]={}", format_metric(*v))).collect();
    let gains = match (m.approximation_gain, m.power_gain) {
        (Some(a), Some(p)) => format!("  gain={} power={}", format_metric(a), format_metric(p)),
        _ => String::new(),
    };
    println!(
        "{label}{}  rad={}  q={}{}  {}{gains}",
        m.triple,
        m.rad_abc,
        format_metric(m.quality),
        if m.is_hit { " hit" } else { "" },
        ks.join(" "),
    );
}

fn cmd_metrics(
    json: bool,
    k: Option<u64>,
    s: u32,
    depth: usize,
    triple: Option<Vec<String>>,
    eps: &[String],
) -> CmdResult {
    let eps = parse_rationals(eps)?;
    let fz = Factorizer::default();
    if let Some(parts) = triple {
        let nums = parts
            .iter()
            .map(|p| p.trim().parse::<BigUint>())
            .collect::<Result<Vec<_>, _>>()
            .map_err(|_| Failure::Usage("--triple needs three positive integers".into()))?;
        let [a, b, c]: [BigUint; 3] = nums
            .try_into()
            .map_err(|_| Failure::Usage("--triple needs exactly three entries".into()))?;
        let m = triple_metrics(&AbcTriple::new(a, b, c)?, &eps, &fz)?;
        return if json {
            print_json(&metrics_json(None, &m))
        } else {
            print_metrics_row("", &m);
            Ok(())
        };
    }
    let root = RootSpec::new(k.expect("clap requires k or triple"), s)?;
    let eqs = equations(root, &expand(root, depth)?.convergents())?;
    let mut rows = Vec::new();
    for eq in &eqs {
        let m = equation_metrics(eq, &eps, &fz)?;
        if json {
            rows.push(metrics_json(Some(eq.n()), &m));
        } else {
            print_metrics_row(&format!("{:>3}  ", eq.n()), &m);
        }
    }
    if json {
        print_json(&Value::Array(rows))?;
    }
    Ok(())
}

fn cmd_roth_table(
    json: bool,
    k: u64,
    eps_roth: &[String],
    depth: usize,
    include_seed: bool,
    equation: Option<usize>,
    p1q1: Option<&str>,
) -> CmdResult {
    let root = RootSpec::new(k, 3)?;
    let eps = parse_rationals(eps_roth)?;
    let selection = match equation {
        Some(n) => KSelection::Equation(n),
        None => KSelection::MaxOverCorpus { depth, include_seed },
    };
    let p1q1 = p1q1.map(parse_rational).transpose()?;
    let rows = roth_table(root, &eps, selection, p1q1, &Factorizer::default())?;
    if json {
        return print_json(&serde_json::to_value(&rows).expect("rows serialize"));
    }
    println!("{:>8} {:>8} {:>8} {:>9} {:>10}  source", "eps_roth", "eps_abc", "K_eps", "1/C <=", "published");
    for r in &rows {
        let published = r.published_bound.map(|b| b.to_string()).unwrap_or_else(|| "-".into());
        let flags = if r.flags.is_empty() { String::new() } else { format!("  [{}]", r.flags.join(", ")) };
        println!(
            "{:>8} {:>8} {:>8} {:>9.2} {:>10}  {}{flags}",
            r.eps_roth,
            r.eps_abc,
            format!("{:.3}", r.k_eps),
            r.bound,
            published,
            r.source_equation,
        );
    }
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn cmd_ridout(
    json: bool,
    s: u32,
    k: u64,
    primes: Vec<u64>,
    eps: &str,
    k_const: f64,
    depth: usize,
    p1q1: Option<&str>,
) -> CmdResult {
    let root = RootSpec::new(k, s)?;
    let query = RidoutQuery::new(root, primes, parse_rational(eps)?, k_const, depth)?;
    let (bound, found) = match s {
        2 => (ridout_sqrt_bound(&query)?, ridout_sqrt_solutions(&query)?),
        3 => {
            let p1q1 = match p1q1 {
                Some(t) => parse_rational(t)?,
                None => rootabc::roth::first_upper_convergent(root)?,
            };
            (ridout_cbrt_bound(&query, p1q1)?, ridout_cbrt_candidates(&query, p1q1)?)
        }
        _ => return Err(Failure::Usage("ridout supports s = 2 and s = 3".into())),
    };
    if json {
        return print_json(&json!({
            "root": root.to_string(),
            "primes": query.primes,
            "bound": bound,
            "approximants": found.iter().map(convergent_json).collect::<Vec<_>>(),
        }));
    }
    let list: Vec<String> = found.iter().map(|c| c.to_string()).collect();
    println!("bound on p: {}", format_metric(bound));
    println!("approximants: {}", if list.is_empty() { "none".to_string() } else { list.join(", ") });
    Ok(())
}

fn cmd_scan(
    json: bool,
    s: u32,
    k_min: u64,
    k_max: u64,
    depth: usize,
    out: &Path,
    csv: Option<&PathBuf>,
) -> CmdResult {
    if k_min > k_max || depth == 0 {
        return Err(Failure::Usage("need k-min <= k-max and depth >= 1".into()));
    }
    let summary = resume_scan(out, s, k_min..=k_max, depth, &Factorizer::default())?;
    let mut records = read_jsonl(out)?;
    records.sort_by_key(|r| r.key());
    if let Some(path) = csv {
        write_csv(&records, BufWriter::new(File::create(path)?))?;
    }
    if json {
        return print_json(&json!({
            "appended": summary.appended,
            "existing": summary.existing,
            "total": records.len(),
        }));
    }
    println!(
        "{} appended, {} already present, {} records in {}",
        summary.appended,
        summary.existing,
        records.len(),
        out.display()
    );
    Ok(())
}

fn print_report(r: &VerificationReport) {
    let status = match (r.violations.is_empty(), r.failing_mode) {
        (true, _) => "ok",
        (false, true) => "FAILED",
        (false, false) => "observed",
    };
    println!(
        "{:<13} s={} instances={} skipped={} violations={} {status}",
        r.suite,
        r.s,
        r.instances,
        r.skipped,
        r.violations.len()
    );
    if let Some(m) = &r.max_observed {
        println!("  max {} at k={} n={}", format_metric(m.value), m.k, m.n);
    }
    for v in &r.violations {
        println!("  k={} n={}: {} vs {} (slack {})", v.k, v.n, v.lhs, v.rhs, format_metric(v.slack));
    }
}

#[allow(clippy::too_many_arguments)]
fn cmd_verify(
    json: bool,
    suites: &[Suite],
    s: u32,
    k_min: u64,
    k_max: u64,
    depth: usize,
    eps_roth: &str,
    c_inverse: f64,
) -> CmdResult {
    if k_min > k_max {
        return Err(Failure::Usage("need k-min <= k-max".into()));
    }
    let range = k_min..=k_max;
    let fz = Factorizer::default();
    let mut reports = Vec::new();
    for suite in suites {
        match suite {
            Suite::Bvdp => reports.push(bvdp_suite(s, range.clone(), depth)?),
            Suite::Liouville => reports.push(liouville_suite(s, range.clone(), depth)?),
            Suite::Gains => reports.push(scan_gains(s, range.clone(), depth)?),
            Suite::GainQuality => reports.push(gain_quality_suite(s, range.clone(), depth, &fz)?),
            Suite::RothForm => {
                let eps = parse_rational(eps_roth)?;
                for k in range.clone() {
                    if let Ok(root) = RootSpec::new(k, s) {
                        reports.push(check_roth_form(root, eps, c_inverse, depth)?);
                    }
                }
            }
        }
    }
    if json {
        print_json(&serde_json::to_value(&reports).expect("reports serialize"))?;
    } else {
        reports.iter().for_each(print_report);
    }
    if reports.iter().any(VerificationReport::failed) {
        return Err(Failure::Violations);
    }
    Ok(())
}

fn run(cli: Cli) -> CmdResult {
    if let Some(n) = cli.jobs {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n.max(1))
            .build_global()
            .map_err(|e| Failure::Usage(e.to_string()))?;
    }
    let json = cli.json;
    match cli.command {
        Cmd::Expand { k, s, terms } => cmd_expand(json, k, s, terms),
        Cmd::Equations { k, s, depth } => cmd_equations(json, k, s, depth),
        Cmd::Metrics { k, s, depth, triple, eps } => cmd_metrics(json, k, s, depth, triple, &eps),
        Cmd::RothTable { k, eps_roth, depth, include_seed, equation, p1q1 } => {
            cmd_roth_table(json, k, &eps_roth, depth, include_seed, equation, p1q1.as_deref())
        }
        Cmd::Ridout { s, k, primes, eps, k_const, depth, p1q1 } => {
            cmd_ridout(json, s, k, primes, &eps, k_const, depth, p1q1.as_deref())
        }
        Cmd::Scan { s, k_min, k_max, depth, out, csv } => cmd_scan(json, s, k_min, k_max, depth, &out, csv.as_ref()),
        Cmd::Verify { suite, s, k_min, k_max, depth, eps_roth, c_inverse } => {
            cmd_verify(json, &suite, s, k_min, k_max, depth, &eps_roth, c_inverse)
        }
    }
}

fn config_path(args: &[String]) -> Option<PathBuf> {
    let mut it = args.iter();
    while let Some(a) = it.next() {
        if a == "--config" {
            return it.next().map(PathBuf::from);
        }
        if let Some(p) = a.strip_prefix("--config=") {
            return Some(PathBuf::from(p));
        }
    }
    None
}

fn main() -> ExitCode {
    let mut args: Vec<String> = std::env::args().collect();
    // defaults must be merged before clap enforces required flags
    if let Some(path) = config_path(&args) {
        let entries = match config::load(&path) {
            Ok(e) => e,
            Err(msg) => {
                eprintln!("error: {msg}");
                return ExitCode::from(EXIT_IO);
            }
        };
        let cmd = Cli::command();
        let sub = args
            .iter()
            .skip(1)
            .find(|a| cmd.find_subcommand(a.as_str()).is_some())
            .cloned();
        if let Some(sub) = sub {
            args = config::inject(&args, &sub, &cmd, &entries);
        }
    }
    let cli = Cli::parse_from(&args);
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            match &f {
                Failure::Usage(msg) => eprintln!("error: {msg}"),
                Failure::Core(e) => eprintln!("error: {e}"),
                Failure::Violations => eprintln!("verification failed"),
            }
            ExitCode::from(exit_code(&f))
        }
    }
}
