//! `ppxh` command-line front end.
//!
//! Exit codes: 0 success, 1 infeasible / no solution / not realizable,
//! 2 input or usage error, 3 internal error.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use log::info;

use ppxh_core::bench::{desk_grid, full_grid, run_cell, to_csv};
use ppxh_core::fpt::{solve_exact, FptConfig, DEFAULT_BUDGET_BITS};
use ppxh_core::generate::generate;
use ppxh_core::graphreal::realize;
use ppxh_core::heuristic::{heu_best_of_permutations, HeuristicConfig};
use ppxh_core::io::{
    export_dot, from_diploid, parse_family, parse_haplotypes, parse_instance, write_haplotypes,
    write_instance, write_realization, Format,
};
use ppxh_core::model::{build_xor_graph, verify, Instance, Solution};
use ppxh_core::poly::{solve_2inf, solve_approx, solve_inf2};
use ppxh_core::reduce::{reduce, ReductionStep};
use ppxh_core::{Error, Result};

#[derive(Parser, Debug)]
#[command(name = "ppxh", version, about = "Pure parsimony xor haplotyping")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Compute a set of haplotypes resolving an instance.
    Solve {
        #[arg(long, value_enum, default_value_t = Algo::Auto)]
        algo: Algo,
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long, value_enum, default_value_t = InputFormat::Auto)]
        format: InputFormat,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Also write the xor-graph of the solution in DOT format.
        #[arg(long)]
        dot: Option<PathBuf>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Row permutations tried by the heuristic.
        #[arg(long, default_value_t = 10)]
        perms: usize,
        /// Largest k*m the exact solver may enumerate.
        #[arg(long, default_value_t = DEFAULT_BUDGET_BITS)]
        budget: usize,
        #[arg(long, default_value_t = 1)]
        threads: usize,
    },
    /// Check that a haplotype set resolves an instance.
    Verify {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long, value_enum, default_value_t = InputFormat::Auto)]
        format: InputFormat,
        #[arg(long)]
        solution: PathBuf,
    },
    /// Kernelize an instance.
    Reduce {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long, value_enum, default_value_t = InputFormat::Auto)]
        format: InputFormat,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Write the reduction steps, one per line.
        #[arg(long)]
        trace: Option<PathBuf>,
    },
    /// Generate a pure-random instance.
    Gen {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        h: usize,
        #[arg(long)]
        m: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Realize a family of fundamental cycles as a graph.
    Realize {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run the pure-random heuristic benchmark and write a CSV report.
    Bench {
        #[arg(long, value_enum, default_value_t = Suite::PureRandom)]
        suite: Suite,
        #[arg(long, value_enum, default_value_t = Scale::Desk)]
        scale: Scale,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 10)]
        perms: usize,
        /// Instances per cell (overrides the grid default).
        #[arg(long)]
        instances: Option<usize>,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Algo {
    Auto,
    Exact,
    Inf2,
    TwoInf,
    Approx,
    Heuristic,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum InputFormat {
    Auto,
    Matrix,
    Sets,
    Diploid,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Suite {
    PureRandom,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Scale {
    Desk,
    Full,
}

/// Outcome of a command that ran to completion.
enum Outcome {
    Success,
    /// Infeasible, no solution, or not realizable.
    Negative,
}

/// Runs the CLI with process stdout/stderr.
pub fn run<I, S>(args: I) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    run_with(args, &mut stdout.lock(), &mut stderr.lock())
}

/// Runs the CLI writing results to `out` and diagnostics to `err`.
pub fn run_with<I, S>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = write!(err, "{e}");
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    match dispatch(cli.command, out, err) {
        Ok(Outcome::Success) => 0,
        Ok(Outcome::Negative) => 1,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            exit_code(&e)
        }
    }
}

fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Infeasible(_) => 1,
        Error::Internal(_) => 3,
        _ => 2,
    }
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path)
        .map_err(|e| Error::Usage(format!("cannot read {}: {e}", path.display())))
}

fn emit(path: Option<&Path>, text: &str, out: &mut dyn Write) -> Result<()> {
    match path {
        Some(p) => fs::write(p, text)
            .map_err(|e| Error::Usage(format!("cannot write {}: {e}", p.display()))),
        None => Ok(out.write_all(text.as_bytes())?),
    }
}

fn load_instance(path: &Path, format: InputFormat) -> Result<Instance> {
    let text = read(path)?;
    let parsed = match format {
        InputFormat::Diploid => from_diploid(&text)?,
        InputFormat::Matrix => parse_instance(&text, Format::Matrix)?,
        InputFormat::Sets => parse_instance(&text, Format::Sets)?,
        InputFormat::Auto => parse_instance(&text, Format::Auto)?,
    };
    if parsed.duplicates > 0 {
        log::warn!("{} duplicate genotypes dropped", parsed.duplicates);
    }
    Ok(parsed.instance)
}

fn dispatch(command: Command, out: &mut dyn Write, err: &mut dyn Write) -> Result<Outcome> {
    match command {
        Command::Solve {
            algo,
            input,
            format,
            out: out_path,
            dot,
            seed,
            perms,
            budget,
            threads,
        } => {
            let x = load_instance(&input, format)?;
            let heur = HeuristicConfig {
                permutations: perms,
                seed,
                ..Default::default()
            };
            let fpt = FptConfig {
                budget_bits: budget,
                threads: threads.max(1),
            };
            let (used, solution) = solve(&x, algo, &heur, fpt)?;
            // never write an unchecked solution
            let solution = verify(&x, solution.haplotypes())?;
            writeln!(
                err,
                "{used}: {} haplotypes for {} genotypes over {} characters",
                solution.len(),
                x.len(),
                x.char_count()
            )?;
            emit(
                out_path.as_deref(),
                &write_haplotypes(x.alphabet(), solution.haplotypes()),
                out,
            )?;
            if let Some(dot) = dot {
                let g = build_xor_graph(&x, &solution)?;
                emit(Some(&dot), &export_dot(&g, x.alphabet()), out)?;
            }
            Ok(Outcome::Success)
        }
        Command::Verify {
            input,
            format,
            solution,
        } => {
            let x = load_instance(&input, format)?;
            let haps = parse_haplotypes(&read(&solution)?, x.alphabet(), Format::Auto)?;
            match verify(&x, &haps) {
                Ok(s) => {
                    writeln!(
                        out,
                        "OK: {} haplotypes resolve {} genotypes",
                        s.len(),
                        x.len()
                    )?;
                    Ok(Outcome::Success)
                }
                Err(Error::Infeasible(msg)) => {
                    writeln!(out, "INFEASIBLE: {msg}")?;
                    Ok(Outcome::Negative)
                }
                Err(e) => Err(e),
            }
        }
        Command::Reduce {
            input,
            format,
            out: out_path,
            trace,
        } => {
            let x = load_instance(&input, format)?;
            if x.is_empty() {
                return Err(Error::EmptyKernel);
            }
            let r = reduce(&x)?;
            writeln!(
                err,
                "kernel: {} genotypes over {} characters, lower bound {}",
                r.instance().len(),
                r.instance().char_count(),
                r.lower_bound() + r.unique_steps()
            )?;
            emit(
                out_path.as_deref(),
                &write_instance(r.instance(), Format::Sets),
                out,
            )?;
            if let Some(path) = trace {
                emit(Some(&path), &format_trace(&x, r.trace()), out)?;
            }
            Ok(Outcome::Success)
        }
        Command::Gen {
            n,
            h,
            m,
            seed,
            out: out_path,
        } => {
            let g = generate(n, h, m, seed)?;
            let mut text = format!(
                "# n={n} h={h} m={m} seed={seed} initial_distinct_used={}\n",
                g.initial_distinct_used
            );
            text.push_str(&write_instance(&g.instance, Format::Matrix));
            emit(out_path.as_deref(), &text, out)?;
            Ok(Outcome::Success)
        }
        Command::Realize {
            input,
            out: out_path,
        } => {
            let named = parse_family(&read(&input)?)?;
            match realize(&named.family)? {
                Some(r) => {
                    emit(out_path.as_deref(), &write_realization(&named, &r), out)?;
                    Ok(Outcome::Success)
                }
                None => {
                    emit(out_path.as_deref(), "NOT REALIZABLE\n", out)?;
                    Ok(Outcome::Negative)
                }
            }
        }
        Command::Bench {
            suite: Suite::PureRandom,
            scale,
            out: out_path,
            seed,
            perms,
            instances,
        } => {
            let mut cells = match scale {
                Scale::Desk => desk_grid(),
                Scale::Full => full_grid(),
            };
            if let Some(k) = instances {
                for c in &mut cells {
                    c.instances = k;
                }
            }
            let cfg = HeuristicConfig {
                permutations: perms,
                ..Default::default()
            };
            let mut rows = Vec::with_capacity(cells.len());
            for cell in cells {
                let row = run_cell(cell, seed, &cfg)?;
                info!(
                    "n={} h={} m={}: ratio {:.2} in {:.1}s",
                    cell.n, cell.h, cell.m, row.avg_ratio, row.wall_seconds
                );
                rows.push(row);
            }
            emit(out_path.as_deref(), &to_csv(&rows), out)?;
            Ok(Outcome::Success)
        }
    }
}

fn solve(
    x: &Instance,
    algo: Algo,
    heur: &HeuristicConfig,
    fpt: FptConfig,
) -> Result<(&'static str, Solution)> {
    match algo {
        Algo::Exact => Ok(("exact", solve_exact(x, fpt)?)),
        Algo::Inf2 => Ok(("inf2", solve_inf2(x)?)),
        Algo::TwoInf => Ok(("two-inf", solve_2inf(x)?)),
        Algo::Approx => {
            let r = reduce_or_trivial(x)?;
            match r {
                Some(r) => Ok(("approx", r.lift(solve_approx(r.instance())?.haplotypes())?)),
                None => Ok(("approx", solve_approx(x)?)),
            }
        }
        Algo::Heuristic => Ok(("heuristic", heu_best_of_permutations(x, heur)?)),
        Algo::Auto => {
            if x.max_occurrence() <= 2 {
                return Ok(("inf2", solve_inf2(x)?));
            }
            if x.max_genotype_size() <= 2 {
                return Ok(("two-inf", solve_2inf(x)?));
            }
            match solve_exact(x, fpt) {
                Ok(s) => Ok(("exact", s)),
                Err(Error::Budget(_)) => Ok(("heuristic", heu_best_of_permutations(x, heur)?)),
                Err(e) => Err(e),
            }
        }
    }
}

fn reduce_or_trivial(x: &Instance) -> Result<Option<ppxh_core::reduce::ReducedInstance>> {
    if x.is_empty() {
        return Ok(None);
    }
    reduce(x).map(Some)
}

fn format_trace(x: &Instance, trace: &[ReductionStep]) -> String {
    let a = x.alphabet();
    let mut text = String::new();
    for step in trace {
        match step {
            ReductionStep::DropDependentColumn { column, basis } => {
                let names: Vec<&str> = basis.iter().map(|&b| a.name(b)).collect();
                text.push_str(&format!(
                    "dependent {} = {}\n",
                    a.name(*column),
                    names.join(" ")
                ));
            }
            ReductionStep::DropUniqueCharacter { column, genotype } => {
                text.push_str(&format!(
                    "unique {} in {}\n",
                    a.name(*column),
                    a.format_set(genotype)
                ));
            }
        }
    }
    text
}
