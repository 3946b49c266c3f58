use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Duration;

use clap::{Parser, Subcommand, ValueEnum};
use hyperpath::analysis::{
    classify_seeded, decide_all, golden_ratio_kernel, kernel_vector, ratio_rows, scan, Method,
};
use hyperpath::bench::bench_instance;
use hyperpath::fullmatrix::check_full_rank_implication_seeded;
use hyperpath::numtheory::{is_prime, primes_in};
use hyperpath::report::{
    bench_csv, classification_csv, conditional_ratio_csv, full_rank_csv, ratio_csv, ratio_svg,
    records_json,
};
use hyperpath::scomplex::eligible_cs;
use hyperpath::selftest::{
    default_golden_dir, exact_table, golden_file_checks, oracle_agreement, running_example_checks,
};
use hyperpath::Error;

const MAX_SCAN: u64 = 1500;

#[derive(Parser)]
#[command(
    name = "hyperpath",
    version,
    about = "Decide which X_{2,n,c} are hypertrees"
)]
struct Cli {
    /// Worker threads for scans.
    #[arg(long, global = true, env = "HYPERPATH_JOBS", default_value_t = 1)]
    jobs: usize,
    /// Seed for the random primes used by the rank engine.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum MethodArg {
    Fast,
    Exact,
    Both,
}

impl From<MethodArg> for Method {
    fn from(m: MethodArg) -> Self {
        match m {
            MethodArg::Fast => Method::Fast,
            MethodArg::Exact => Method::Exact,
            MethodArg::Both => Method::Both,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Subcommand)]
enum Command {
    /// Classify one complex and print its record as JSON.
    Classify {
        #[arg(long)]
        n: u64,
        #[arg(long)]
        c: u64,
        #[arg(long, value_enum, default_value = "fast")]
        method: MethodArg,
    },
    /// Classify every eligible c for the primes in [min, max].
    Scan {
        #[arg(long, default_value_t = 11)]
        min: u64,
        #[arg(long)]
        max: u64,
        #[arg(long, value_enum, default_value = "fast")]
        method: MethodArg,
        #[arg(long, value_enum, default_value = "csv")]
        format: Format,
        /// Output file; stdout when absent.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// The (c, n) table of codimensions from the exact oracle.
    Table {
        #[arg(long, default_value_t = 11)]
        min: u64,
        #[arg(long, default_value_t = 59)]
        max: u64,
        /// Table file; stdout when absent.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Also write the per-(n, c) classification CSV here.
        #[arg(long)]
        records: Option<PathBuf>,
    },
    /// Acyclic and non-acyclic ratios per prime, with the bound.
    Ratios {
        #[arg(long, default_value_t = 11)]
        min: u64,
        #[arg(long)]
        max: u64,
        /// Directory for ratios.csv, conditional_ratios.csv and ratios.svg; stdout gets
        /// ratios.csv when absent.
        #[arg(long)]
        out_dir: Option<PathBuf>,
    },
    /// Check the explicit left-kernel vector of S(w_k) exactly.
    VerifyKernel {
        #[arg(long)]
        n: u64,
        #[arg(long)]
        c: u64,
        /// Conductor k; when absent the c^2 + c - 1 = 0 vector for k = (n-1)/2 is used.
        #[arg(long)]
        k: Option<usize>,
    },
    /// Rank of the full matrix F and the implication rank F = n^2 - n => hypertree.
    Fullrank {
        #[arg(long)]
        n: Option<u64>,
        #[arg(long)]
        c: Option<u64>,
        #[arg(long)]
        min: Option<u64>,
        #[arg(long)]
        max: Option<u64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Wall times of the fast decision and of dense elimination on A.
    Bench {
        #[arg(long, value_delimiter = ',', default_value = "13,59,101")]
        n_list: Vec<u64>,
        #[arg(long, default_value_t = 2)]
        c: u64,
        #[arg(long, default_value_t = 3)]
        reps: usize,
        /// Seconds after which a dense method is abandoned and reported as a lower bound.
        #[arg(long, default_value_t = 600)]
        budget: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Running-example facts, random MCB agreement and golden files.
    Selftest {
        #[arg(long)]
        verbose: bool,
        #[arg(long)]
        golden_dir: Option<PathBuf>,
        /// Random MCB instances checked against dense rank.
        #[arg(long, default_value_t = 200)]
        instances: usize,
    },
}

enum Failure {
    Usage(String),
    Internal(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::NotPrime(_)
            | Error::ModulusTooSmall { .. }
            | Error::IneligibleC { .. }
            | Error::NotADivisor { .. }
            | Error::Precondition(_) => Failure::Usage(e.to_string()),
            _ => Failure::Internal(e.to_string()),
        }
    }
}

type Outcome = Result<(), Failure>;

fn emit(out: Option<&Path>, text: &str) -> Outcome {
    match out {
        Some(p) => {
            std::fs::write(p, text).map_err(|e| Failure::Internal(format!("{}: {e}", p.display())))
        }
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn prime_range(min: u64, max: u64) -> Result<Vec<u64>, Failure> {
    if min < 11 {
        return Err(Failure::Usage(format!(
            "--min must be at least 11, got {min}"
        )));
    }
    if max > MAX_SCAN {
        return Err(Failure::Usage(format!(
            "--max {max} exceeds the ceiling {MAX_SCAN}"
        )));
    }
    if min > max {
        return Err(Failure::Usage(format!("empty range [{min}, {max}]")));
    }
    Ok(primes_in(min, max))
}

fn run(cli: Cli) -> Outcome {
    let jobs = cli.jobs.max(1);
    match cli.command {
        Command::Classify { n, c, method } => {
            let r = classify_seeded(n, c, method.into(), cli.seed)?;
            println!(
                "{}",
                serde_json::to_string(&r).map_err(|e| Failure::Internal(e.to_string()))?
            );
            Ok(())
        }
        Command::Scan {
            min,
            max,
            method,
            format,
            out,
        } => {
            let records = scan(&prime_range(min, max)?, method.into(), jobs)?;
            let text = match format {
                Format::Csv => classification_csv(&records)?,
                Format::Json => records_json(&records)? + "\n",
            };
            emit(out.as_deref(), &text)
        }
        Command::Table {
            min,
            max,
            out,
            records,
        } => {
            prime_range(min, max)?;
            let (recs, table) = exact_table(min, max, jobs)?;
            if let Some(p) = records {
                emit(Some(&p), &classification_csv(&recs)?)?;
            }
            emit(out.as_deref(), &table)
        }
        Command::Ratios { min, max, out_dir } => {
            let rows = ratio_rows(&decide_all(&prime_range(min, max)?, jobs)?);
            match out_dir {
                Some(dir) => {
                    std::fs::create_dir_all(&dir)
                        .map_err(|e| Failure::Internal(format!("{}: {e}", dir.display())))?;
                    emit(Some(&dir.join("ratios.csv")), &ratio_csv(&rows)?)?;
                    emit(
                        Some(&dir.join("conditional_ratios.csv")),
                        &conditional_ratio_csv(&rows)?,
                    )?;
                    emit(Some(&dir.join("ratios.svg")), &ratio_svg(&rows))
                }
                None => emit(None, &ratio_csv(&rows)?),
            }
        }
        Command::VerifyKernel { n, c, k } => {
            let v = match k {
                Some(k) => kernel_vector(n, c, k)?,
                None => golden_ratio_kernel(n, c)?,
            };
            let verified = v.verify()? && !v.is_zero();
            let coords: Vec<String> = v.coords.iter().map(|x| x.to_string()).collect();
            let json = serde_json::json!({
                "n": n, "c": c, "k": v.k, "leaders": v.leaders, "coords": coords, "verified": verified,
            });
            println!("{json}");
            if verified {
                Ok(())
            } else {
                Err(Failure::Internal(format!(
                    "kernel vector for n={n} c={c} k={} does not verify",
                    v.k
                )))
            }
        }
        Command::Fullrank {
            n,
            c,
            min,
            max,
            out,
        } => {
            let tasks: Vec<(u64, u64)> = match (n, c, min, max) {
                (Some(n), Some(c), None, None) => vec![(n, c)],
                (None, None, Some(lo), Some(hi)) => prime_range(lo, hi)?
                    .into_iter()
                    .flat_map(|n| eligible_cs(n).into_iter().map(move |c| (n, c)))
                    .collect(),
                _ => {
                    return Err(Failure::Usage(
                        "give either --n and --c or --min and --max".into(),
                    ))
                }
            };
            let mut records = Vec::new();
            for (n, c) in tasks {
                records.push(check_full_rank_implication_seeded(n, c, cli.seed)?);
            }
            let violations = records.iter().filter(|r| !r.implication_holds).count();
            emit(out.as_deref(), &full_rank_csv(&records)?)?;
            if violations > 0 {
                return Err(Failure::Internal(format!(
                    "{violations} violations of rank F = n^2 - n => hypertree"
                )));
            }
            Ok(())
        }
        Command::Bench {
            n_list,
            c,
            reps,
            budget,
            out,
        } => {
            let mut rows = Vec::new();
            let mut disagreements = Vec::new();
            for &n in &n_list {
                if !is_prime(n) {
                    return Err(Failure::Usage(format!("{n} is not a prime")));
                }
                let r = bench_instance(n, c, reps, Duration::from_secs(budget), cli.seed)?;
                if !r.agree() {
                    disagreements.push(n);
                }
                rows.extend(r.rows());
            }
            emit(out.as_deref(), &bench_csv(&rows)?)?;
            if !disagreements.is_empty() {
                return Err(Failure::Internal(format!(
                    "verdicts disagree for n in {disagreements:?}"
                )));
            }
            Ok(())
        }
        Command::Selftest {
            verbose,
            golden_dir,
            instances,
        } => {
            let dir = golden_dir.unwrap_or_else(default_golden_dir);
            let mut checks = running_example_checks();
            checks.extend(golden_file_checks(&dir));
            let a = oracle_agreement(instances, 12, 6, 3, cli.seed);
            checks.push(hyperpath::selftest::Check {
                name: format!("{instances} random MCB instances agree with dense rank"),
                passed: a.decision_agree == a.instances && a.codim_agree == a.instances,
                detail: a
                    .first_mismatch
                    .unwrap_or_else(|| format!("{} singular", a.singular)),
            });
            for c in &checks {
                if verbose {
                    let status = if c.passed { "ok" } else { "FAILED" };
                    if c.detail.is_empty() {
                        println!("{status}: {}", c.name);
                    } else {
                        println!("{status}: {} ({})", c.name, c.detail);
                    }
                }
            }
            match checks.iter().find(|c| !c.passed) {
                Some(c) => Err(Failure::Internal(format!("{}: {}", c.name, c.detail))),
                None => {
                    println!("selftest passed ({} checks)", checks.len());
                    Ok(())
                }
            }
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(2)
        }
        Err(Failure::Internal(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(1)
        }
    }
}
