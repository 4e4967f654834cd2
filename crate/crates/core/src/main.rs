use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use mordell::averaged::{check_chain, eval_avg_direct, eval_avg_u_param, AvgSpec};
use mordell::error::Error;
use mordell::expsum::{eval_sum, RootTable, SumSpec};
use mordell::numtheory::{primes_in, PrimeContext};
use mordell::report::{
    emit, fit_exponent, read_scan_records, ChainRow, Destination, Format, THEOREM1_EXPONENT,
};
use mordell::scan::{log_spaced_primes, scan_primes};
use mordell::tolerances;
use mordell::verify::{self, SuiteOutcome};

#[derive(Debug, Parser)]
#[command(
    name = "mordell",
    version,
    about = "Exponential sums with primitive roots modulo p"
)]
struct Cli {
    /// Worker threads (default: available parallelism).
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Seed for every random draw.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Output file for tables (default: standard output).
    #[arg(long, global = true)]
    output: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    format: Format,
    /// Override the relative tolerance of the selected check.
    #[arg(long, global = true)]
    tolerance: Option<f64>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Suite {
    Mordell,
    Chain,
    Lemma1,
    Completion,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// List the primitive roots of p.
    Proots { p: u64 },
    /// Evaluate S_N(a, b, g) for terms given as b:g.
    Sum {
        p: u64,
        n: u64,
        #[arg(allow_hyphen_values = true)]
        a: i64,
        #[arg(value_parser = parse_pair)]
        pairs: Vec<(i64, u64)>,
    },
    /// Average over all primitive roots g of S_N(a, b g, fixed terms).
    Avg {
        p: u64,
        n: u64,
        #[arg(allow_hyphen_values = true)]
        a: i64,
        #[arg(allow_hyphen_values = true)]
        b: i64,
        #[arg(value_parser = parse_pair)]
        pairs: Vec<(i64, u64)>,
        /// Also evaluate by walking the enumerated roots.
        #[arg(long)]
        direct: bool,
        /// Emit the complete-sum inequality chain instead (requires N = p - 1).
        #[arg(long)]
        chain: bool,
    },
    /// Run a verification suite; exit 1 on any failed check.
    Verify {
        #[arg(value_enum)]
        suite: Suite,
        #[arg(long)]
        pmin: Option<u64>,
        #[arg(long)]
        pmax: Option<u64>,
        /// Prime for the completion suite.
        #[arg(long, default_value_t = 101)]
        p: u64,
        #[arg(long, default_value_t = 100)]
        trials: u64,
    },
    /// Seeded maxima of |S_bar| with N = p - 1 for primes in [pmin, pmax].
    Scan {
        pmin: u64,
        pmax: u64,
        samples: u64,
        /// Use this many geometrically spaced primes instead of all of them.
        #[arg(long)]
        count: Option<usize>,
    },
    /// T_d table with brackets and ratios for primes up to --pmax.
    Lemma1 {
        #[arg(long, default_value_t = 13)]
        pmax: u64,
        #[arg(long, default_value_t = 5)]
        pmin: u64,
    },
    /// Completion experiments on seeded (spec, interval) draws.
    Completion {
        #[arg(long, default_value_t = 101)]
        p: u64,
        #[arg(long, default_value_t = 10)]
        trials: u64,
    },
    /// Fit ln(max_abs) against ln(p) from a scan table.
    Fit { input: PathBuf },
    /// Re-emit a scan table in the selected format.
    Emit { input: PathBuf },
}

fn parse_pair(s: &str) -> std::result::Result<(i64, u64), String> {
    let (b, g) = s
        .split_once(':')
        .ok_or_else(|| format!("expected b:g, got {s:?}"))?;
    let b = b
        .parse()
        .map_err(|e| format!("bad coefficient in {s:?}: {e}"))?;
    let g = g.parse().map_err(|e| format!("bad root in {s:?}: {e}"))?;
    Ok((b, g))
}

/// Fixed notation with 12 decimals, without a `-0` rendering.
fn fixed12(x: f64) -> String {
    let s = format!("{x:.12}");
    if s.trim_start_matches('-')
        .chars()
        .all(|c| c == '0' || c == '.')
    {
        s.trim_start_matches('-').to_string()
    } else {
        s
    }
}

enum Failure {
    Checks(usize),
    Error(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Error(e)
    }
}

fn destination(cli: &Cli) -> Destination {
    cli.output
        .clone()
        .map_or(Destination::Stdout, Destination::File)
}

fn finish(outcome: SuiteOutcome) -> std::result::Result<(), Failure> {
    for line in &outcome.lines {
        println!("{line}");
    }
    if outcome.passed() {
        println!("OK {} checks", outcome.lines.len());
        Ok(())
    } else {
        Err(Failure::Checks(outcome.failures))
    }
}

fn run(cli: &Cli) -> std::result::Result<(), Failure> {
    match &cli.command {
        Command::Proots { p } => {
            let ctx = PrimeContext::new(*p)?;
            let roots: Vec<String> = ctx.primitive_roots().iter().map(u64::to_string).collect();
            println!("phi={}: {}", ctx.phi_pm1(), roots.join(" "));
        }
        Command::Sum { p, n, a, pairs } => {
            let ctx = PrimeContext::new(*p)?;
            let table = RootTable::new(*p)?;
            let spec = SumSpec::new(&ctx, *n, *a, pairs)?;
            let s = eval_sum(&spec, &table)?;
            println!(
                "{} {} |S|={}",
                fixed12(s.re),
                fixed12(s.im),
                fixed12(s.norm())
            );
        }
        Command::Avg {
            p,
            n,
            a,
            b,
            pairs,
            direct,
            chain,
        } => {
            let ctx = PrimeContext::new(*p)?;
            let table = RootTable::new(*p)?;
            let spec = AvgSpec::new(&ctx, *n, *a, *b, pairs)?;
            if *chain {
                let report = check_chain(&spec, &ctx, &table)?;
                emit(
                    &ChainRow::from_report(&report),
                    cli.format,
                    &destination(cli),
                )?;
                let tol = cli.tolerance.unwrap_or(tolerances::CHAIN_REL);
                let failed = report.failures(tol).count();
                return if failed == 0 {
                    Ok(())
                } else {
                    Err(Failure::Checks(failed))
                };
            }
            let r = eval_avg_u_param(&spec, &ctx, &table)?;
            if spec.is_degenerate() {
                eprintln!("note: a = 0 and every fixed coefficient vanishes");
            }
            println!(
                "{} {} |S|={} sigma_N={} phi={}",
                fixed12(r.value.re),
                fixed12(r.value.im),
                fixed12(r.value.norm()),
                fixed12(r.sigma_n),
                r.phi_pm1
            );
            if *direct {
                let d = eval_avg_direct(&spec, &ctx, &table)?;
                println!(
                    "direct {} {} diff={:.3e}",
                    fixed12(d.value.re),
                    fixed12(d.value.im),
                    (d.value - r.value).norm()
                );
            }
        }
        Command::Verify {
            suite,
            pmin,
            pmax,
            p,
            trials,
        } => {
            let outcome = match suite {
                Suite::Mordell => verify::verify_mordell(pmax.unwrap_or(61))?,
                Suite::Chain => {
                    let primes = primes_in(pmin.unwrap_or(5), pmax.unwrap_or(13));
                    verify::verify_chain(&primes, cli.tolerance.unwrap_or(tolerances::CHAIN_REL))?
                }
                Suite::Lemma1 => {
                    let primes = primes_in(pmin.unwrap_or(5), pmax.unwrap_or(13));
                    verify::verify_lemma1(&primes, cli.tolerance.unwrap_or(tolerances::CHAIN_REL))?
                }
                Suite::Completion => {
                    verify::verify_completion(*p, *trials, cli.seed, pmax.unwrap_or(31))?
                }
            };
            finish(outcome)?;
        }
        Command::Scan {
            pmin,
            pmax,
            samples,
            count,
        } => {
            if pmin > pmax {
                return Err(Error::Invalid(format!("pmin = {pmin} exceeds pmax = {pmax}")).into());
            }
            if *samples == 0 {
                return Err(Error::Invalid("samples must be at least 1".into()).into());
            }
            let primes = match count {
                Some(k) => log_spaced_primes((*pmin).max(3), *pmax, *k),
                None => primes_in((*pmin).max(3), *pmax),
            };
            let records = scan_primes(&primes, *samples, cli.seed)?;
            emit(&records, cli.format, &destination(cli))?;
        }
        Command::Lemma1 { pmin, pmax } => {
            let mut rows = Vec::new();
            for p in primes_in((*pmin).max(3), *pmax) {
                rows.extend(verify::td_table(p)?);
            }
            emit(&rows, cli.format, &destination(cli))?;
            let bad = rows
                .iter()
                .filter(|r| !(r.lower..=r.upper).contains(&r.count))
                .count();
            if bad > 0 {
                return Err(Failure::Checks(bad));
            }
        }
        Command::Completion { p, trials } => {
            let results = verify::completion_trials(*p, *trials, cli.seed)?;
            let bad = results.iter().filter(|(_, ok)| !ok).count();
            let rows: Vec<_> = results.into_iter().map(|(r, _)| r).collect();
            emit(&rows, cli.format, &destination(cli))?;
            if bad > 0 {
                return Err(Failure::Checks(bad));
            }
        }
        Command::Fit { input } => {
            let records = read_scan_records(input)?;
            let points: Vec<(u64, f64)> = records.iter().map(|r| (r.p, r.max_abs)).collect();
            let fit = fit_exponent(&points)?;
            println!(
                "slope={:.6} intercept={:.6} residual={:.6} n={} reference={:.6}",
                fit.slope, fit.intercept, fit.residual, fit.n_points, THEOREM1_EXPONENT
            );
        }
        Command::Emit { input } => {
            let records = read_scan_records(input)?;
            emit(&records, cli.format, &destination(cli))?;
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(n) = cli.threads {
        if n == 0 {
            eprintln!("error: --threads must be at least 1");
            return ExitCode::from(2);
        }
        builder = builder.num_threads(n);
    }
    let pool = match builder.build() {
        Ok(pool) => pool,
        Err(e) => {
            eprintln!("error: thread pool: {e}");
            return ExitCode::from(2);
        }
    };
    match pool.install(|| run(&cli)) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Checks(n)) => {
            eprintln!("error: {n} check(s) failed");
            ExitCode::from(1)
        }
        Err(Failure::Error(e)) => {
            eprintln!("error: {e}");
            match e {
                Error::Io { .. } | Error::Parse { .. } => ExitCode::from(3),
                _ => ExitCode::from(2),
            }
        }
    }
}
