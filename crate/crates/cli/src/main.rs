use std::collections::BTreeMap;
use std::fs;
use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use log::LevelFilter;
use regpart::{EtaQuotient, VerificationReport};
use regpart_cli::coeff::{self, FAMILY_NAMES};
use regpart_cli::document::{exit_code, Document, Entry};
use regpart_cli::suite::{self, Class, Context, Settings};

const USAGE: u8 = 2;

#[derive(Parser)]
#[command(name = "regpart", version, about = "Partition congruence verification harness")]
struct Cli {
    /// More log output on stderr (repeatable).
    #[arg(short, long, action = clap::ArgAction::Count, global = true)]
    verbose: u8,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print coefficients of a counting function or eta quotient.
    Coeff(CoeffArgs),
    /// Run one check by id.
    Verify(VerifyArgs),
    /// Run the whole suite, or one class of it.
    Report(ReportArgs),
    /// List check ids.
    List {
        #[arg(long)]
        only: Option<Class>,
    },
}

#[derive(Args)]
#[command(group(clap::ArgGroup::new("source").required(true).args(["family", "eta"])))]
#[command(group(clap::ArgGroup::new("range").required(true).args(["n", "nmax"])))]
struct CoeffArgs {
    /// One of: p, a, b, b_3_5_8_printed, b_<l>_<k>[_<r>...]
    #[arg(long)]
    family: Option<String>,
    /// Eta quotient as `scale:exp,...`, e.g. `1:2,3:1`.
    #[arg(long)]
    eta: Option<String>,
    /// Single coefficient index.
    #[arg(long)]
    n: Option<usize>,
    /// Print the table for 0..=nmax.
    #[arg(long)]
    nmax: Option<usize>,
    /// Reduce mod M (2 <= M <= 2^32).
    #[arg(long = "mod")]
    modulus: Option<u64>,
}

#[derive(Clone, Copy, Default, ValueEnum)]
enum Format {
    #[default]
    Text,
    Structured,
}

#[derive(Args)]
struct RunArgs {
    /// Series order (identity/Newman truncation, sweep order cap).
    #[arg(long)]
    order: Option<usize>,
    #[arg(long)]
    nmax: Option<u64>,
    #[arg(long)]
    jmax: Option<u64>,
    /// Comma-separated prime grid, e.g. 5,7,11,13.
    #[arg(long, value_delimiter = ',')]
    primes: Option<Vec<u64>>,
    #[arg(long, value_enum, default_value_t)]
    format: Format,
    /// Write the report here instead of standard output.
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct VerifyArgs {
    #[arg(long)]
    id: String,
    #[command(flatten)]
    run: RunArgs,
}

#[derive(Args)]
struct ReportArgs {
    #[arg(long)]
    only: Option<Class>,
    /// Worker threads; defaults to one per core.
    #[arg(long)]
    threads: Option<usize>,
    #[command(flatten)]
    run: RunArgs,
}

fn settings(run: &RunArgs) -> Settings {
    Settings {
        order: run.order,
        n_max: run.nmax,
        j_max: run.jmax,
        primes: run.primes.clone(),
    }
}

fn run_params(command: &str, run: &RunArgs, extra: &[(&str, String)]) -> BTreeMap<String, String> {
    let mut m = BTreeMap::new();
    m.insert("command".to_string(), command.to_string());
    let opt = |v: Option<String>| v.unwrap_or_else(|| "default".into());
    m.insert("order".into(), opt(run.order.map(|v| v.to_string())));
    m.insert("nmax".into(), opt(run.nmax.map(|v| v.to_string())));
    m.insert("jmax".into(), opt(run.jmax.map(|v| v.to_string())));
    m.insert(
        "primes".into(),
        opt(run.primes.as_ref().map(|p| p.iter().map(u64::to_string).collect::<Vec<_>>().join(","))),
    );
    for (k, v) in extra {
        m.insert(k.to_string(), v.clone());
    }
    m
}

fn text_entry(out: &mut String, r: &VerificationReport, ms: u128, detail: bool) {
    out.push_str(&format!("{r} ({ms} ms)\n"));
    if detail {
        for (k, v) in &r.notes {
            out.push_str(&format!("    {k}: {v}\n"));
        }
    }
    let shown = if detail { r.failures.len() } else { 5 };
    for f in r.failures.iter().take(shown) {
        let params: Vec<String> = f.params.iter().map(|(k, v)| format!("{k}={v}")).collect();
        out.push_str(&format!("    fail [{}] index {} -> {}\n", params.join(" "), f.index, f.residue));
    }
    if r.failure_count as usize > shown {
        out.push_str(&format!("    ... {} more\n", r.failure_count as usize - shown));
    }
}

fn render(results: &[(VerificationReport, u128)], format: Format, params: BTreeMap<String, String>) -> String {
    match format {
        Format::Structured => Document {
            entries: results.iter().map(|(r, ms)| Entry::from_report(r, *ms)).collect(),
            run_params: params,
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
        }
        .to_json(),
        Format::Text => {
            let mut out = String::new();
            let detail = results.len() == 1;
            for (r, ms) in results {
                text_entry(&mut out, r, *ms, detail);
            }
            if !detail {
                let count = |s| results.iter().filter(|(r, _)| r.status() == s).count();
                out.push_str(&format!(
                    "{} entries: {} pass, {} fail, {} vacuous\n",
                    results.len(),
                    count(regpart::Status::Pass),
                    count(regpart::Status::Fail),
                    count(regpart::Status::Vacuous)
                ));
            }
            out
        }
    }
}

fn emit(text: &str, path: Option<&PathBuf>) -> io::Result<()> {
    match path {
        Some(p) => fs::write(p, text),
        None => io::stdout().lock().write_all(text.as_bytes()),
    }
}

fn finish(results: &[(VerificationReport, u128)], run: &RunArgs, params: BTreeMap<String, String>) -> ExitCode {
    let text = render(results, run.format, params);
    if let Err(e) = emit(&text, run.output.as_ref()) {
        eprintln!("error: cannot write report: {e}");
        return ExitCode::from(USAGE);
    }
    ExitCode::from(exit_code(results.iter().map(|(r, _)| r.status())) as u8)
}

fn cmd_coeff(a: CoeffArgs) -> ExitCode {
    let eta = match (&a.family, &a.eta) {
        (Some(f), _) => match coeff::family_eta(f) {
            Some(e) => e,
            None => {
                eprintln!("error: unknown family {f:?} (expected {FAMILY_NAMES})");
                return ExitCode::from(USAGE);
            }
        },
        (None, Some(s)) => match s.parse::<EtaQuotient>() {
            Ok(e) => e,
            Err(e) => {
                eprintln!("error: {e}");
                return ExitCode::from(USAGE);
            }
        },
        (None, None) => unreachable!("clap requires one source"),
    };
    let (lo, hi, table) = match (a.n, a.nmax) {
        (Some(n), _) => (n, n, false),
        (None, Some(m)) => (0, m, true),
        (None, None) => unreachable!("clap requires a range"),
    };
    match coeff::coefficients(&eta, lo, hi, a.modulus) {
        Ok(rows) => {
            let mut out = String::new();
            for (n, c) in rows {
                if table {
                    out.push_str(&format!("{n} {c}\n"));
                } else {
                    out.push_str(&format!("{c}\n"));
                }
            }
            print!("{out}");
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(USAGE)
        }
    }
}

fn cmd_verify(a: VerifyArgs) -> ExitCode {
    let Some(task) = suite::resolve(&a.id) else {
        eprintln!("error: unknown id {:?}; see `regpart list`", a.id);
        return ExitCode::from(USAGE);
    };
    let ctx = Context::new(settings(&a.run));
    let results = suite::run_tasks(std::slice::from_ref(&task), &ctx, Some(1));
    let params = run_params("verify", &a.run, &[("id", a.id.clone())]);
    finish(&results, &a.run, params)
}

fn cmd_report(a: ReportArgs) -> ExitCode {
    let tasks = suite::tasks_in(a.only);
    let ctx = Context::new(settings(&a.run));
    let results = suite::run_tasks(&tasks, &ctx, a.threads);
    let only = a.only.map_or("all", |c| c.as_str()).to_string();
    let threads = a.threads.map_or("default".to_string(), |t| t.to_string());
    let params = run_params("report", &a.run, &[("only", only), ("threads", threads)]);
    finish(&results, &a.run, params)
}

fn cmd_list(only: Option<Class>) -> ExitCode {
    let mut out = String::new();
    for t in suite::tasks_in(only) {
        out.push_str(&format!("{:<22} {:<11} {}\n", t.id, t.class.as_str(), t.description()));
    }
    print!("{out}");
    ExitCode::SUCCESS
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let level = match cli.verbose {
        0 => LevelFilter::Warn,
        1 => LevelFilter::Info,
        _ => LevelFilter::Debug,
    };
    env_logger::Builder::new().filter_level(level).init();
    match cli.command {
        Command::Coeff(a) => cmd_coeff(a),
        Command::Verify(a) => cmd_verify(a),
        Command::Report(a) => cmd_report(a),
        Command::List { only } => cmd_list(only),
    }
}
