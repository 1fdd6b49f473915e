//! The `conical` command: `solve`, `classify` and `verify`.
//!
//! Exit codes: 0 success; 1 bad input (configuration, arguments, files) or a failed
//! verification; 2 iteration limit reached without convergence; 3 divergence or
//! solver failure.

use crate::classify::{classify_speeds, FlowType};
use crate::io::{
    write_regions, write_residuals, FieldFile, FieldFormat, Manifest, RunConfig, RunSummary,
};
use crate::solver::{freestream_field, region_map, Marcher, RegionRecord, Solution};
use crate::validate::{run_suite, CheckRecord, Suite, VerifyOptions};
use crate::{Error, Result};
use clap::{Parser, Subcommand};
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

pub const EXIT_OK: i32 = 0;
pub const EXIT_INPUT: i32 = 1;
pub const EXIT_MAX_ITERATIONS: i32 = 2;
pub const EXIT_SOLVER: i32 = 3;

/// Environment fallback for `--threads`.
pub const THREADS_ENV: &str = "CONICAL_THREADS";

const PROGRESS_EVERY: usize = 1000;

/// Relative band `|q_c − c| ≤ tol·c` labelled sonic in region maps.
pub const SONIC_TOL: f64 = 1e-8;

#[derive(Debug, Parser)]
#[command(
    name = "conical",
    version,
    about = "Conical Euler solver on the unit sphere"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// March a configured case to a steady state.
    Solve {
        #[arg(long)]
        config: PathBuf,
        /// Output directory (overrides `[output] directory`).
        #[arg(long)]
        output: Option<PathBuf>,
        /// Worker threads (falls back to CONICAL_THREADS, then the config).
        #[arg(long)]
        threads: Option<usize>,
        /// Field file format (overrides `[output] formats`).
        #[arg(long, value_enum)]
        format: Option<FieldFormat>,
        /// Start from a stored field instead of the projected freestream.
        #[arg(long)]
        init_from: Option<PathBuf>,
        /// No progress lines.
        #[arg(long)]
        quiet: bool,
    },
    /// Label every cell of a stored field hyperbolic, elliptic or sonic.
    Classify {
        field: PathBuf,
        /// Region map CSV (default: next to the field, `<stem>_regions.csv`).
        #[arg(long)]
        output: Option<PathBuf>,
        /// Relative band `|q_c − c| ≤ tol·c` labelled sonic.
        #[arg(long, default_value_t = SONIC_TOL)]
        tol: f64,
    },
    /// Run the built-in verification suites.
    Verify {
        /// Comma-separated suites: oracle, eigen, mms.
        #[arg(long, default_value = "oracle,eigen,mms")]
        suite: String,
        /// Also write `key,value,tolerance,status` rows here.
        #[arg(long)]
        summary: Option<PathBuf>,
        /// Swap in a deliberately wrong geometric source (self-test of the oracle).
        #[arg(long, hide = true)]
        mutate_source: bool,
    },
}

/// Parse `args` (including the program name) and run; returns the exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_INPUT } else { EXIT_OK };
        }
    };
    let out = match cli.command {
        Command::Solve {
            config,
            output,
            threads,
            format,
            init_from,
            quiet,
        } => solve(SolveArgs {
            config,
            output,
            threads,
            format,
            init_from,
            quiet,
        }),
        Command::Classify { field, output, tol } => classify_field(&field, output, tol),
        Command::Verify {
            suite,
            summary,
            mutate_source,
        } => verify(&suite, summary.as_deref(), mutate_source),
    };
    match out {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            EXIT_INPUT
        }
    }
}

pub fn main() -> i32 {
    run(std::env::args_os())
}

pub struct SolveArgs {
    pub config: PathBuf,
    pub output: Option<PathBuf>,
    pub threads: Option<usize>,
    pub format: Option<FieldFormat>,
    pub init_from: Option<PathBuf>,
    pub quiet: bool,
}

fn env_threads() -> Result<Option<usize>> {
    match std::env::var(THREADS_ENV) {
        Ok(s) if !s.trim().is_empty() => s
            .trim()
            .parse()
            .map(Some)
            .map_err(|_| Error::Config(format!("{THREADS_ENV}='{s}' is not a thread count"))),
        _ => Ok(None),
    }
}

fn extension(f: FieldFormat) -> &'static str {
    match f {
        FieldFormat::Text => "txt",
        FieldFormat::Binary => "bin",
    }
}

/// Write `sol` in every requested format as `<stem>.<ext>`; returns the file names.
fn dump(
    dir: &Path,
    stem: &str,
    formats: &[FieldFormat],
    setup_mesh: &crate::solver::Mesh,
    sol: &Solution,
    gas: &crate::IdealGas,
) -> Result<Vec<String>> {
    let field = FieldFile::from_solution(setup_mesh, sol, gas)?;
    formats
        .iter()
        .map(|&f| {
            let name = format!("{stem}.{}", extension(f));
            field.write(&dir.join(&name), f)?;
            Ok(name)
        })
        .collect()
}

pub fn solve(args: SolveArgs) -> Result<i32> {
    let mut cfg = RunConfig::load(&args.config)?;
    let threads = match args.threads {
        Some(n) => Some(n),
        None => env_threads()?.or(cfg.solver.threads),
    };
    cfg.solver.threads = threads;
    if let Some(dir) = &args.output {
        cfg.output.directory = dir.display().to_string();
    }
    if let Some(f) = args.format {
        cfg.output.formats = vec![f];
    }
    let setup = cfg.build()?;
    let dir = PathBuf::from(&cfg.output.directory);
    std::fs::create_dir_all(&dir)?;
    let mesh = &setup.problem.mesh;
    let gas = setup.problem.gas;

    let init = match &args.init_from {
        Some(p) => FieldFile::read(p)?.to_solution(mesh)?,
        None => freestream_field(mesh, &setup.freestream),
    };

    let pool = {
        let mut b = rayon::ThreadPoolBuilder::new();
        if let Some(n) = threads {
            b = b.num_threads(n);
        }
        b.build()
            .map_err(|e| Error::Config(format!("thread pool: {e}")))?
    };
    let formats = cfg.output.formats.clone();
    let every = cfg.output.snapshot_every;
    let quiet = args.quiet;
    let start = Instant::now();
    let mut files = Vec::new();

    let (outcome, sol) = pool.install(|| {
        let mut m = match Marcher::new(&setup.problem, setup.solver.clone(), init) {
            Ok(m) => m,
            Err(e) => return (Err(e), None),
        };
        let res = m.run_observed(|s| {
            let it = s.iterations;
            if !quiet && it % PROGRESS_EVERY == 0 {
                eprintln!(
                    "iteration {it}: relative residual {:.3e}",
                    s.final_relative_residual().unwrap_or(f64::NAN)
                );
            }
            if every > 0 && it % every == 0 {
                files.extend(dump(
                    &dir,
                    &format!("snapshot_{it:07}"),
                    &formats,
                    mesh,
                    s,
                    &gas,
                )?);
            }
            Ok(())
        });
        (res, Some(m.into_solution()))
    });
    let sol = sol.ok_or_else(|| match &outcome {
        Err(e) => Error::Config(e.to_string()),
        Ok(()) => unreachable!(),
    })?;

    let (status, code, message) = match &outcome {
        Ok(()) if sol.converged => ("converged", EXIT_OK, None),
        Ok(()) => ("max-iterations", EXIT_MAX_ITERATIONS, None),
        Err(e @ (Error::Divergence { .. } | Error::SolverFailure { .. })) => {
            ("diverged", EXIT_SOLVER, Some(e.to_string()))
        }
        Err(e) => return Err(Error::Config(e.to_string())),
    };

    // a field that failed to decode is dumped raw so it can still be inspected
    let stem = if code == EXIT_SOLVER {
        "field_last"
    } else {
        "field"
    };
    match dump(&dir, stem, &formats, mesh, &sol, &gas) {
        Ok(f) => {
            files.extend(f);
            let recs = region_map(mesh, &sol.primitives(mesh)?, &gas, SONIC_TOL)?;
            write_regions(std::fs::File::create(dir.join("regions.csv"))?, &recs)?;
            files.push("regions.csv".into());
        }
        Err(e) if code == EXIT_SOLVER => {
            let name = format!("{stem}_conserved.txt");
            let mut w = std::io::BufWriter::new(std::fs::File::create(dir.join(&name))?);
            writeln!(w, "# undecodable field ({e}); conserved values per cell")?;
            for u in &sol.u {
                let v: Vec<String> = u.0.iter().map(|x| format!("{x:?}")).collect();
                writeln!(w, "{}", v.join(","))?;
            }
            files.push(name);
        }
        Err(e) => return Err(e),
    }
    write_residuals(std::fs::File::create(dir.join("residuals.csv"))?, &sol)?;
    files.push("residuals.csv".into());

    let manifest = Manifest {
        config: cfg,
        run: RunSummary {
            status: status.into(),
            iterations: sol.iterations,
            final_residual: sol.final_relative_residual().unwrap_or(f64::NAN),
            initial_residual: sol.initial_residual,
            threads: pool.current_num_threads(),
            wall_seconds: start.elapsed().as_secs_f64(),
            crate_version: env!("CARGO_PKG_VERSION").into(),
            files,
            message: message.clone(),
        },
    };
    manifest.write(&dir.join("manifest.toml"))?;

    match message {
        Some(m) => eprintln!("{status}: {m}"),
        None => println!(
            "{status} after {} iterations, relative residual {:.3e}; output in {}",
            sol.iterations,
            manifest.run.final_residual,
            dir.display()
        ),
    }
    Ok(code)
}

/// Region map of a stored field from its `q_c` and `c` columns.
pub fn region_records(field: &FieldFile, tol: f64) -> Vec<RegionRecord> {
    field
        .rows
        .iter()
        .enumerate()
        .map(|(k, r)| {
            let t = classify_speeds(r[8], r[9], tol);
            RegionRecord {
                cell: k,
                i: k / field.n2,
                j: k % field.n2,
                xi: [r[0], r[1]],
                q_c: r[8],
                c: r[9],
                margin: t.margin,
                label: t.kind,
            }
        })
        .collect()
}

fn classify_field(path: &Path, output: Option<PathBuf>, tol: f64) -> Result<i32> {
    if !(tol >= 0.0) {
        return Err(Error::Config(format!(
            "tol must be non-negative, got {tol}"
        )));
    }
    let field = FieldFile::read(path)?;
    let recs = region_records(&field, tol);
    let out = output.unwrap_or_else(|| {
        let stem = path.file_stem().unwrap_or_default().to_string_lossy();
        path.with_file_name(format!("{stem}_regions.csv"))
    });
    write_regions(std::fs::File::create(&out)?, &recs)?;
    let n = recs.len().max(1) as f64;
    for label in [FlowType::Hyperbolic, FlowType::Elliptic, FlowType::Sonic] {
        let count = recs.iter().filter(|r| r.label == label).count();
        println!(
            "{:<10} {:>8} cells {:>7.2}%",
            label.as_str(),
            count,
            100.0 * count as f64 / n
        );
    }
    println!("region map written to {}", out.display());
    Ok(EXIT_OK)
}

/// Parse a comma-separated suite list; empty lists are rejected.
pub fn parse_suites(list: &str) -> Result<Vec<Suite>> {
    let suites = list
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(str::parse)
        .collect::<Result<Vec<Suite>>>()?;
    if suites.is_empty() {
        return Err(Error::Config("no verification suite selected".into()));
    }
    Ok(suites)
}

fn verify(list: &str, summary: Option<&Path>, mutate_source: bool) -> Result<i32> {
    let suites = parse_suites(list)?;
    let opts = VerifyOptions { mutate_source };
    let records: Vec<CheckRecord> = suites
        .into_iter()
        .flat_map(|s| run_suite(s, opts))
        .collect();
    println!(
        "{:<24} {:>12}  {:<14} status",
        "check", "value", "tolerance"
    );
    for r in &records {
        println!(
            "{:<24} {:>12.3e}  {:<14} {}",
            r.key,
            r.value,
            r.tolerance,
            if r.passed { "PASS" } else { "FAIL" }
        );
        if !r.passed && !r.detail.is_empty() {
            println!("    {}", r.detail);
        }
    }
    if let Some(p) = summary {
        let mut w = std::io::BufWriter::new(std::fs::File::create(p)?);
        writeln!(w, "key,value,tolerance,status")?;
        for r in &records {
            writeln!(
                w,
                "{},{:?},{},{}",
                r.key,
                r.value,
                r.tolerance,
                if r.passed { "pass" } else { "fail" }
            )?;
        }
        w.flush()?;
    }
    let failed = records.iter().filter(|r| !r.passed).count();
    println!("{} checks, {failed} failed", records.len());
    Ok(if failed == 0 { EXIT_OK } else { EXIT_INPUT })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn suite_lists() {
        assert_eq!(
            parse_suites("oracle, mms").unwrap(),
            vec![Suite::Oracle, Suite::Mms]
        );
        assert!(parse_suites("").is_err());
        assert!(parse_suites(" , ").is_err());
        assert!(parse_suites("oracle,nope").is_err());
    }

    #[test]
    fn usage_errors_exit_one() {
        assert_eq!(run(["conical", "solve"]), EXIT_INPUT);
        assert_eq!(run(["conical", "frobnicate"]), EXIT_INPUT);
        assert_eq!(run(["conical", "--help"]), EXIT_OK);
    }

    #[test]
    fn classify_labels_from_stored_speeds() {
        let f = FieldFile {
            n1: 1,
            n2: 3,
            rows: vec![
                [0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 1.0, 1.0, 2.0, 1.0, 1.0],
                [0.0, 1.0, 1.0, 0.0, 0.0, 0.0, 1.0, 1.0, 0.5, 1.0, -0.5],
                [0.0, 2.0, 1.0, 0.0, 0.0, 0.0, 1.0, 1.0, 1.0, 1.0, 0.0],
            ],
        };
        let labels: Vec<_> = region_records(&f, 1e-8).iter().map(|r| r.label).collect();
        assert_eq!(
            labels,
            [FlowType::Hyperbolic, FlowType::Elliptic, FlowType::Sonic]
        );
    }
}
