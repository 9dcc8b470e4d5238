use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Duration;

use anchorsched::anchored::verify_solution;
use anchorsched::formulations::{build, Matrices};
use anchorsched::harness::{aggregate, pretty_table, run_instance, run_method, write_csv, InstanceRun};
use anchorsched::instances::{generate, read_instance, read_solution, write_instance, write_solution, SolutionRecord};
use anchorsched::milp::export_lp_file;
use anchorsched::{Error, Formulation, InstanceClass, Method, RunOptions};
use clap::{Parser, Subcommand};
use rayon::prelude::*;

const EXIT_FAILURE: u8 = 1;
const EXIT_INFEASIBLE: u8 = 2;
const EXIT_UNSUPPORTED: u8 = 3;
const EXIT_PARSE: u8 = 4;

#[derive(Parser)]
#[command(name = "anchorsched", version, about = "Anchor-robust project scheduling")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate random instances of a class such as SP_pQCri_dUnif_G1.
    Generate {
        #[arg(long)]
        label: String,
        #[arg(long, short)]
        n: usize,
        #[arg(long, default_value_t = 10)]
        count: usize,
        #[arg(long, env = "ANCHORSCHED_SEED", default_value_t = 0)]
        seed: u64,
        #[arg(long, short, default_value = ".")]
        out: PathBuf,
    },
    /// Solve one instance and print the result as JSON.
    Solve {
        instance: PathBuf,
        #[arg(long, default_value = "auto", value_parser = parse_method)]
        method: Method,
        /// Time limit in seconds for MIP methods.
        #[arg(long, default_value_t = 300.0)]
        time_limit: f64,
        /// Add the single-variable rounding bounds to the model.
        #[arg(long)]
        chvatal: bool,
        /// Separate chain inequalities lazily (dom only).
        #[arg(long)]
        cuts: bool,
        /// Write the model in LP format before solving.
        #[arg(long)]
        export_lp: Option<PathBuf>,
        /// Write the solution for later `verify`.
        #[arg(long, short)]
        output: Option<PathBuf>,
    },
    /// Audit a solution: schedule, deadline and anchoring.
    Verify { instance: PathBuf, solution: PathBuf },
    /// Run methods on every instance in a directory and print a CSV summary.
    Bench {
        dir: PathBuf,
        #[arg(long, value_delimiter = ',', default_value = "dom,std,lay", value_parser = parse_method)]
        methods: Vec<Method>,
        #[arg(long, default_value_t = 300.0)]
        time_limit: f64,
        #[arg(long)]
        chvatal: bool,
        #[arg(long)]
        cuts: bool,
        /// Worker threads; defaults to the number of CPUs.
        #[arg(long)]
        jobs: Option<usize>,
        /// Write the CSV here instead of standard output.
        #[arg(long, short)]
        output: Option<PathBuf>,
        /// Print an aligned text table (the CSV still goes to --output).
        #[arg(long)]
        pretty: bool,
    },
}

fn parse_method(s: &str) -> Result<Method, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Parse { .. } => EXIT_PARSE,
        Error::DeadlineInfeasible { .. } | Error::InfeasibleAnchoredSet => EXIT_INFEASIBLE,
        Error::UnsupportedUncertainty(_)
        | Error::UnsupportedInstance(_)
        | Error::InstanceTooLarge { .. }
        | Error::NotCritical
        | Error::EnumerationTooLarge(_)
        | Error::BudgetOutOfRange(_) => EXIT_UNSUPPORTED,
        _ => EXIT_FAILURE,
    }
}

fn time_limit(secs: f64) -> Result<Duration, Error> {
    Duration::try_from_secs_f64(secs).map_err(|_| Error::Parse {
        context: "--time-limit".into(),
        message: format!("{secs} is not a valid number of seconds"),
    })
}

fn io_error(path: &Path, source: io::Error) -> Error {
    Error::Io {
        path: path.to_path_buf(),
        source,
    }
}

fn cmd_generate(label: &str, n: usize, count: usize, seed: u64, out: &Path) -> Result<u8, Error> {
    let class: InstanceClass = label.parse()?;
    if count > 0 {
        fs::create_dir_all(out).map_err(|e| io_error(out, e))?;
    }
    for k in 0..count {
        let s = seed.wrapping_add(k as u64);
        let (inst, meta) = generate(class, n, s)?;
        let path = out.join(format!("{class}_n{n}_{k:03}.json"));
        write_instance(&inst, &meta, &path)?;
        println!("{}", path.display());
    }
    Ok(0)
}

#[allow(clippy::too_many_arguments)]
fn cmd_solve(
    instance: &Path,
    method: Method,
    limit: f64,
    chvatal: bool,
    cuts: bool,
    export_lp: Option<&Path>,
    output: Option<&Path>,
) -> Result<u8, Error> {
    let (inst, _) = read_instance(instance)?;
    if let Some(path) = export_lp {
        let f = match method {
            Method::Formulation(f) => f,
            Method::Auto | Method::Brute => Formulation::Dom,
        };
        let mats = Matrices::new(&inst)?;
        export_lp_file(&build(&inst, f, &mats, chvatal)?.model, path)?;
    }
    let opts = RunOptions {
        time_limit: time_limit(limit)?,
        chvatal,
        cuts,
    };
    let record = run_method(&inst, method, &opts)?;
    println!("{}", serde_json::to_string_pretty(&record).expect("records serialize"));
    if let Some(path) = output {
        if record.objective.is_some() && !record.schedule.is_empty() {
            let sol = SolutionRecord {
                schedule: record.schedule.clone(),
                anchored: record.anchored.clone(),
                objective: record.objective,
            };
            write_solution(&sol, path)?;
        }
    }
    Ok(if record.is_infeasible() { EXIT_INFEASIBLE } else { 0 })
}

fn cmd_verify(instance: &Path, solution: &Path) -> Result<u8, Error> {
    let (inst, _) = read_instance(instance)?;
    let sol = read_solution(solution)?;
    let report = verify_solution(&inst, &sol.schedule(), &sol.anchored)?;
    let mark = |ok: bool| if ok { "ok" } else { "FAIL" };
    println!("schedule of G(p): {}", mark(report.is_schedule));
    println!("deadline:         {}", mark(report.meets_deadline));
    println!("x-anchored:       {}", mark(report.x_anchored));
    match report.recourse_on_extreme_points {
        Some(ok) => println!("recourse:         {}", mark(ok)),
        None => println!("recourse:         skipped"),
    }
    for m in &report.messages {
        println!("  {m}");
    }
    let passed = report.passed();
    println!("{}", if passed { "PASS" } else { "FAIL" });
    Ok(if passed { 0 } else { EXIT_INFEASIBLE })
}

fn instance_files(dir: &Path) -> Result<Vec<PathBuf>, Error> {
    let mut files: Vec<PathBuf> = fs::read_dir(dir)
        .map_err(|e| io_error(dir, e))?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "json"))
        .collect();
    files.sort();
    Ok(files)
}

#[allow(clippy::too_many_arguments)]
fn cmd_bench(
    dir: &Path,
    methods: &[Method],
    limit: f64,
    chvatal: bool,
    cuts: bool,
    jobs: Option<usize>,
    output: Option<&Path>,
    pretty: bool,
) -> Result<u8, Error> {
    let opts = RunOptions {
        time_limit: time_limit(limit)?,
        chvatal,
        cuts,
    };
    let files = instance_files(dir)?;
    let mut pool = rayon::ThreadPoolBuilder::new();
    if let Some(j) = jobs {
        pool = pool.num_threads(j.max(1));
    }
    let pool = pool.build().map_err(|e| Error::NumericalFailure(e.to_string()))?;
    let runs: Vec<InstanceRun> = pool.install(|| {
        files
            .par_iter()
            .map(|path| match read_instance(path) {
                Ok((inst, meta)) => run_instance(&inst, &meta.label, methods, &opts),
                Err(e) => {
                    eprintln!("{}: {e}", path.display());
                    let label = path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
                    methods
                        .iter()
                        .map(|&method| InstanceRun {
                            label: label.clone(),
                            method,
                            record: None,
                            lp_bound: None,
                            error: Some(e.to_string()),
                        })
                        .collect()
                }
            })
            .collect::<Vec<_>>()
            .into_iter()
            .flatten()
            .collect()
    });
    for run in runs.iter().filter(|r| r.error.is_some()) {
        eprintln!("{} / {}: {}", run.label, run.method, run.error.as_deref().unwrap_or(""));
    }
    let rows = aggregate(&runs);
    match output {
        Some(path) => {
            let file = fs::File::create(path).map_err(|e| io_error(path, e))?;
            write_csv(&rows, cuts, file)?;
        }
        None if !pretty => write_csv(&rows, cuts, io::stdout().lock())?,
        None => {}
    }
    if pretty {
        print!("{}", pretty_table(&rows, cuts));
    }
    io::stdout().flush().ok();
    Ok(0)
}

fn run(cli: Cli) -> Result<u8, Error> {
    match cli.command {
        Command::Generate {
            label,
            n,
            count,
            seed,
            out,
        } => cmd_generate(&label, n, count, seed, &out),
        Command::Solve {
            instance,
            method,
            time_limit,
            chvatal,
            cuts,
            export_lp,
            output,
        } => cmd_solve(
            &instance,
            method,
            time_limit,
            chvatal,
            cuts,
            export_lp.as_deref(),
            output.as_deref(),
        ),
        Command::Verify { instance, solution } => cmd_verify(&instance, &solution),
        Command::Bench {
            dir,
            methods,
            time_limit,
            chvatal,
            cuts,
            jobs,
            output,
            pretty,
        } => cmd_bench(&dir, &methods, time_limit, chvatal, cuts, jobs, output.as_deref(), pretty),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_PARSE } else { 0 };
            e.print().ok();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
