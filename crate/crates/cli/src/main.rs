//! Command-line driver: solve instances, run verification suites,
//! evaluate the trade-off certificate and benchmark over generated
//! instances.
//!
//! Exit codes: 0 success, 1 usage or input error, 2 verification
//! failure, 3 structural invariant violation.

use clap::{Args, Parser, Subcommand};
use mwmtp::instance::{gen_euclidean, gen_graph_metric, MetricInstance};
use mwmtp::pipeline::solve;
use mwmtp::tradeoff::{build_lp, solve_lp, variable_names};
use mwmtp::verify::{run_suite, SUITE_NAMES};
use mwmtp::Error;
use rayon::prelude::*;
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "mwmtp", about = "Metric triangle packing solver and verifier")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve one instance and report the candidate packing weights.
    Solve(SolveArgs),
    /// Run verification suites against exact oracles and estimators.
    Verify(VerifyArgs),
    /// Solve the trade-off linear program certifying the ratio.
    Lp(LpArgs),
    /// Solve a batch of generated instances in parallel.
    Bench(BenchArgs),
}

#[derive(Args)]
struct SolveArgs {
    /// Instance file: a "n <count>" header then "i j w" lines.
    file: Option<String>,
    /// Generate instead of reading a file: euclidean:<n> or graph:<n>:<density>.
    #[arg(long, conflicts_with = "file")]
    gen: Option<String>,
    #[arg(long, default_value_t = 0.2)]
    eps: f64,
    #[arg(long, default_value_t = 0.25)]
    tau: f64,
    /// Seed for instance generation.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Also compute the optimum by brute force (n <= 15) and the ratio.
    #[arg(long)]
    exact: bool,
    #[arg(long)]
    json: bool,
}

#[derive(Args)]
struct VerifyArgs {
    /// Suite to run, or "all".
    #[arg(long, default_value = "all")]
    suite: String,
    /// Monte Carlo sample count for the randomized suites.
    #[arg(long)]
    trials: Option<usize>,
    #[arg(long)]
    json: bool,
}

#[derive(Args)]
struct LpArgs {
    #[arg(long, default_value_t = 0.25)]
    tau: f64,
    /// Evaluate this many evenly spaced tau values over [0, 1/3] instead.
    #[arg(long)]
    tau_grid: Option<usize>,
    #[arg(long)]
    json: bool,
}

#[derive(Args)]
struct BenchArgs {
    /// Comma-separated instance sizes, each divisible by 3.
    #[arg(long, default_value = "12,24,36")]
    sizes: String,
    /// Instances per size.
    #[arg(long, default_value_t = 4)]
    count: u64,
    #[arg(long, default_value_t = 0.2)]
    eps: f64,
    #[arg(long, default_value_t = 0.25)]
    tau: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    json: bool,
}

fn exit_for(e: &Error) -> ExitCode {
    match e {
        Error::Structural(_) => ExitCode::from(3),
        _ => ExitCode::from(1),
    }
}

fn load_instance(args: &SolveArgs) -> mwmtp::Result<MetricInstance> {
    if let Some(path) = &args.file {
        return MetricInstance::load(path);
    }
    let spec = args
        .gen
        .as_deref()
        .ok_or_else(|| Error::InvalidParam("provide an instance file or --gen".into()))?;
    let parts: Vec<&str> = spec.split(':').collect();
    match parts.as_slice() {
        ["euclidean", n] => {
            let n = n
                .parse()
                .map_err(|_| Error::Parse(format!("bad size {n:?}")))?;
            Ok(gen_euclidean(n, args.seed))
        }
        ["graph", n, d] => {
            let n = n
                .parse()
                .map_err(|_| Error::Parse(format!("bad size {n:?}")))?;
            let d = d
                .parse()
                .map_err(|_| Error::Parse(format!("bad density {d:?}")))?;
            Ok(gen_graph_metric(n, d, args.seed))
        }
        _ => Err(Error::InvalidParam(format!(
            "--gen expects euclidean:<n> or graph:<n>:<density>, got {spec:?}"
        ))),
    }
}

fn cmd_solve(args: SolveArgs) -> ExitCode {
    let inst = match load_instance(&args) {
        Ok(i) => i,
        Err(e) => {
            eprintln!("error: {e}");
            return exit_for(&e);
        }
    };
    match solve(&inst, args.eps, args.tau, args.seed, args.exact) {
        Ok((packing, report)) => {
            if args.json {
                let out = serde_json::json!({
                    "report": report,
                    "triangles": packing
                        .triangles()
                        .iter()
                        .map(|t| t.vertices())
                        .collect::<Vec<_>>(),
                });
                println!("{}", serde_json::to_string_pretty(&out).unwrap());
            } else {
                print!("{}", report.to_text());
                for t in packing.triangles() {
                    let [a, b, c] = t.vertices();
                    println!("triangle {a} {b} {c}");
                }
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            exit_for(&e)
        }
    }
}

fn cmd_verify(args: VerifyArgs) -> ExitCode {
    let names: Vec<&str> = if args.suite == "all" {
        SUITE_NAMES.to_vec()
    } else {
        vec![args.suite.as_str()]
    };
    let mut reports = vec![];
    for name in names {
        match run_suite(name, args.trials) {
            Ok(r) => reports.push(r),
            Err(e) => {
                eprintln!("error: {e}");
                return exit_for(&e);
            }
        }
    }
    let all_passed = reports.iter().all(|r| r.passed());
    if args.json {
        println!("{}", serde_json::to_string_pretty(&reports).unwrap());
    } else {
        for r in &reports {
            print!("{}", r.to_text());
        }
    }
    if all_passed {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(2)
    }
}

fn cmd_lp(args: LpArgs) -> ExitCode {
    let taus: Vec<f64> = match args.tau_grid {
        Some(steps) if steps >= 1 => (0..=steps).map(|i| i as f64 / steps as f64 / 3.0).collect(),
        Some(_) => {
            eprintln!("error: --tau-grid must be at least 1");
            return ExitCode::from(1);
        }
        None => vec![args.tau],
    };
    let mut rows = vec![];
    for tau in taus {
        let sol = match build_lp(tau).and_then(|lp| solve_lp(&lp)) {
            Ok(s) => s,
            Err(e) => {
                eprintln!("error: {e}");
                return exit_for(&e);
            }
        };
        rows.push((tau, sol));
    }
    if args.json {
        let names = variable_names();
        let out: Vec<_> = rows
            .iter()
            .map(|(tau, sol)| {
                serde_json::json!({
                    "tau": tau,
                    "value": sol.value,
                    "witness": names
                        .iter()
                        .zip(&sol.x)
                        .map(|(n, v)| (n.clone(), *v))
                        .collect::<std::collections::BTreeMap<_, _>>(),
                })
            })
            .collect();
        println!("{}", serde_json::to_string_pretty(&out).unwrap());
    } else {
        for (tau, sol) in &rows {
            println!("tau {tau:.6} value {:.9}", sol.value);
        }
        if rows.len() == 1 {
            let names = variable_names();
            for (name, v) in names.iter().zip(&rows[0].1.x) {
                if v.abs() > 1e-12 {
                    println!("  {name} {v:.9}");
                }
            }
        }
    }
    ExitCode::SUCCESS
}

fn cmd_bench(args: BenchArgs) -> ExitCode {
    let sizes: Vec<usize> = match args
        .sizes
        .split(',')
        .map(|s| s.trim().parse::<usize>())
        .collect()
    {
        Ok(v) => v,
        Err(_) => {
            eprintln!("error: --sizes expects comma-separated integers");
            return ExitCode::from(1);
        }
    };
    let jobs: Vec<(usize, u64)> = sizes
        .iter()
        .flat_map(|&n| (0..args.count).map(move |i| (n, args.seed + i)))
        .collect();
    let results: Vec<_> = jobs
        .par_iter()
        .map(|&(n, seed)| {
            let inst = gen_euclidean(n, seed);
            solve(&inst, args.eps, args.tau, seed, false).map(|(_, r)| (n, seed, r))
        })
        .collect();
    let mut rows = vec![];
    for res in results {
        match res {
            Ok(row) => rows.push(row),
            Err(e) => {
                eprintln!("error: {e}");
                return exit_for(&e);
            }
        }
    }
    rows.sort_by_key(|&(n, seed, _)| (n, seed));
    if args.json {
        let out: Vec<_> = rows.iter().map(|(_, _, r)| r).collect();
        println!("{}", serde_json::to_string_pretty(&out).unwrap());
    } else {
        for (n, seed, r) in &rows {
            println!(
                "n {n} seed {seed} w_cstar {:.6} w_c {:.6} t1 {:.6} t2 {:.6} t3 {:.6} best {:.6}",
                r.w_cstar, r.w_c, r.w_t1, r.w_t2, r.w_t3, r.w_best
            );
        }
    }
    ExitCode::SUCCESS
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            // Help and version requests are successes, bad usage is not.
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match cli.command {
        Command::Solve(args) => cmd_solve(args),
        Command::Verify(args) => cmd_verify(args),
        Command::Lp(args) => cmd_lp(args),
        Command::Bench(args) => cmd_bench(args),
    }
}
