use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Duration;

use clap::{Args, Parser, Subcommand};
use mmr_core::bench::{
    compare, format_summary, read_csv, run_benchmark, seed_from_name, write_csv, BenchConfig,
    BenchInstance, BenchRecord, CSV_HEADER,
};
use mmr_core::instance_io::{generate_instance, parse_rilp, write_rilp, GeneratorParams};
use mmr_core::{
    run_algorithm, Algorithm, Error, IntervalIlpInstance, SbaParams, SolveOptions, SolveReport,
    SolveStatus, DEFAULT_EPSILON,
};

const EXIT_FAILURES: u8 = 1;
const EXIT_USAGE: u8 = 2;
const EXIT_NO_INCUMBENT: u8 = 3;
const EXIT_NUMERICAL: u8 = 4;

#[derive(Parser)]
#[command(name = "mmr", version, about = "Min-max regret 0-1 programs with interval costs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve one RILP instance.
    Solve(SolveArgs),
    /// Write a seeded random instance.
    Generate(GenerateArgs),
    /// Run several algorithms over every `.rilp` file in a directory.
    Bench(BenchArgs),
    /// Signed-rank comparison of two heuristics from a results CSV.
    Compare(CompareArgs),
}

#[derive(Args)]
struct SolverFlags {
    /// Per-run wall-clock limit in seconds.
    #[arg(long, default_value_t = 7200.0)]
    time_limit: f64,
    /// Decomposition stopping gap.
    #[arg(long, default_value_t = DEFAULT_EPSILON)]
    epsilon: f64,
    #[arg(long, default_value_t = 0.5)]
    sba_alpha: f64,
    #[arg(long, default_value_t = 1.0)]
    sba_beta: f64,
    #[arg(long, default_value_t = 0.05)]
    sba_gamma: f64,
}

impl SolverFlags {
    fn options(&self) -> Result<SolveOptions, Failure> {
        if !(self.time_limit >= 0.0 && self.time_limit.is_finite()) {
            return Err(Failure::usage(format!("invalid time limit {}", self.time_limit)));
        }
        if !(self.epsilon >= 0.0) {
            return Err(Failure::usage(format!("invalid epsilon {}", self.epsilon)));
        }
        let sba = SbaParams::new(self.sba_alpha, self.sba_beta, self.sba_gamma)
            .map_err(|e| Failure::usage(e.to_string()))?;
        Ok(SolveOptions {
            time_limit: Duration::from_secs_f64(self.time_limit),
            epsilon: self.epsilon,
            sba,
        })
    }
}

#[derive(Args)]
struct SolveArgs {
    instance: PathBuf,
    #[arg(long, default_value = "bda")]
    algo: Algorithm,
    #[command(flatten)]
    solver: SolverFlags,
    /// Seed recorded in the CSV row (defaults to the `_s<seed>` name suffix).
    #[arg(long)]
    seed: Option<u64>,
    /// Append a result row to this CSV file.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Print the worst-case scenario and the adversary's solution.
    #[arg(long)]
    explain: bool,
}

#[derive(Args)]
struct GenerateArgs {
    #[arg(long, default_value_t = 10)]
    vars: usize,
    #[arg(long, default_value_t = 5)]
    cons: usize,
    #[arg(long, default_value_t = 0.3)]
    density: f64,
    #[arg(long, default_value_t = 1)]
    cmin: u64,
    #[arg(long, default_value_t = 100)]
    cmax: u64,
    #[arg(long, default_value_t = 0.5)]
    spread: f64,
    #[arg(long, default_value_t = 0.5)]
    rhs_fraction: f64,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Output path, or `-` for standard output.
    #[arg(short, long)]
    output: PathBuf,
}

#[derive(Args)]
struct BenchArgs {
    dir: PathBuf,
    #[arg(long, value_delimiter = ',', default_value = "bda,amu,sba")]
    algos: Vec<Algorithm>,
    #[arg(long, default_value = "bda")]
    baseline: Algorithm,
    #[command(flatten)]
    solver: SolverFlags,
    /// Parallel worker count.
    #[arg(long, default_value_t = 1)]
    jobs: usize,
    /// Results CSV path.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct CompareArgs {
    csv: PathBuf,
    #[arg(long, default_value = "bda")]
    baseline: Algorithm,
    #[arg(long, value_delimiter = ',', num_args = 1, default_value = "amu,sba")]
    pair: Vec<Algorithm>,
}

struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn usage(message: impl Into<String>) -> Self {
        Failure {
            code: EXIT_USAGE,
            message: message.into(),
        }
    }

    fn io(path: &Path, e: io::Error) -> Self {
        Failure::usage(format!("{}: {e}", path.display()))
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::NumericalBreakdown(_)
            | Error::UnboundedRelaxation
            | Error::StalledDecomposition { .. }
            | Error::EmptyPool => EXIT_NUMERICAL,
            Error::InfeasibleInstance | Error::InfeasibleSolution => EXIT_FAILURES,
            _ => EXIT_USAGE,
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Solve(a) => cmd_solve(a),
        Command::Generate(a) => cmd_generate(a),
        Command::Bench(a) => cmd_bench(a),
        Command::Compare(a) => cmd_compare(a),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}

fn load(path: &Path) -> Result<IntervalIlpInstance, Failure> {
    let text = fs::read_to_string(path).map_err(|e| Failure::io(path, e))?;
    parse_rilp(&text).map_err(|e| Failure::usage(format!("{}: {e}", path.display())))
}

fn opt(v: Option<f64>) -> String {
    v.map_or_else(|| "n/a".to_string(), |x| x.to_string())
}

fn print_report(report: &SolveReport, name: &str, explain: bool) {
    println!("instance: {name}");
    println!("algorithm: {}", report.algorithm);
    println!("status: {}", report.status);
    println!("z = {}", opt(report.z));
    println!("lower bound = {}", opt(report.lower_bound));
    println!("gap = {}", opt(report.gap()));
    println!("time = {:.3} s", report.elapsed.as_secs_f64());
    if let Some(x) = &report.incumbent {
        println!("x = {x}");
    }
    match report.algorithm {
        Algorithm::Bda => println!("iterations = {}, cuts = {}", report.iterations, report.cuts),
        Algorithm::Amu | Algorithm::Sba => {
            println!("scenarios solved = {}", report.scenarios_solved)
        }
        Algorithm::Brute => {}
    }
    if explain {
        if let Some(e) = &report.evaluation {
            let costs: Vec<String> = e.worst_scenario.costs().iter().map(f64::to_string).collect();
            println!("worst-case scenario = ({})", costs.join(", "));
            println!("cost of x in that scenario = {}", e.f_x);
            println!("adversary y = {}", e.adversary);
            println!("cost of y in that scenario = {}", e.f_star);
        }
    }
}

fn cmd_solve(a: SolveArgs) -> Result<u8, Failure> {
    let options = a.solver.options()?;
    let instance = load(&a.instance)?;
    let report = run_algorithm(&instance, a.algo, &options)?;
    print_report(&report, &instance.name, a.explain);

    if let Some(path) = &a.out {
        let seed = a.seed.or_else(|| seed_from_name(&instance.name));
        let record = BenchRecord::from_report(&instance.name, seed, &report);
        append_record(path, &record)?;
    }
    Ok(match report.status {
        SolveStatus::Infeasible => EXIT_FAILURES,
        SolveStatus::TimeLimit if report.incumbent.is_none() => EXIT_NO_INCUMBENT,
        _ => 0,
    })
}

fn append_record(path: &Path, record: &BenchRecord) -> Result<(), Failure> {
    let mut buf = Vec::new();
    write_csv(std::slice::from_ref(record), &mut buf)?;
    let existing = path.metadata().map(|m| m.len() > 0).unwrap_or(false);
    let text = String::from_utf8(buf).expect("CSV output is UTF-8");
    let body = if existing {
        let first_line = fs::read_to_string(path).map_err(|e| Failure::io(path, e))?;
        let header = CSV_HEADER.join(",");
        if first_line.lines().next() != Some(header.as_str()) {
            return Err(Failure::usage(format!(
                "{}: existing file does not have the results header",
                path.display()
            )));
        }
        text.split_once('\n').map_or("", |(_, rest)| rest).to_string()
    } else {
        text
    };
    let mut f = fs::OpenOptions::new()
        .create(true)
        .append(true)
        .open(path)
        .map_err(|e| Failure::io(path, e))?;
    f.write_all(body.as_bytes()).map_err(|e| Failure::io(path, e))
}

fn cmd_generate(a: GenerateArgs) -> Result<u8, Failure> {
    let params = GeneratorParams {
        n: a.vars,
        m: a.cons,
        density: a.density,
        c_min: a.cmin,
        c_max: a.cmax,
        spread: a.spread,
        rhs_fraction: a.rhs_fraction,
        seed: a.seed,
    };
    let instance = generate_instance(&params)?;
    let text = write_rilp(&instance);
    let summary = format!("{} (n = {}, m = {}, seed = {})", instance.name, a.vars, a.cons, a.seed);
    if a.output.as_os_str() == "-" {
        io::stdout()
            .write_all(text.as_bytes())
            .map_err(|e| Failure::usage(e.to_string()))?;
        eprintln!("{summary}");
    } else {
        fs::write(&a.output, text).map_err(|e| Failure::io(&a.output, e))?;
        println!("{}: {summary}", a.output.display());
    }
    Ok(0)
}

fn cmd_bench(a: BenchArgs) -> Result<u8, Failure> {
    let options = a.solver.options()?;
    if !a.algos.contains(&a.baseline) {
        return Err(Failure::usage(format!(
            "baseline `{}` must be one of --algos",
            a.baseline
        )));
    }
    let mut algorithms = a.algos.clone();
    algorithms.dedup();

    let entries = fs::read_dir(&a.dir).map_err(|e| Failure::io(&a.dir, e))?;
    let mut paths: Vec<PathBuf> = entries
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "rilp"))
        .collect();
    paths.sort();
    let instances = paths
        .iter()
        .map(|p| load(p).map(BenchInstance::new))
        .collect::<Result<Vec<_>, _>>()?;

    let config = BenchConfig {
        algorithms,
        baseline: a.baseline,
        options,
        jobs: a.jobs,
    };
    let report = run_benchmark(&instances, &config)?;

    if let Some(path) = &a.out {
        let file = fs::File::create(path).map_err(|e| Failure::io(path, e))?;
        write_csv(&report.records, file)?;
    }
    println!("{} instances, {} runs", instances.len(), report.records.len());
    print!("{}", format_summary(&report));
    for r in report.records.iter().filter(|r| r.is_error()) {
        if let mmr_core::bench::RunStatus::Error(msg) = &r.status {
            eprintln!("{} / {}: {msg}", r.instance, r.algorithm);
        }
    }
    Ok(if report.has_errors() { EXIT_FAILURES } else { 0 })
}

fn cmd_compare(a: CompareArgs) -> Result<u8, Failure> {
    let [first, second] = a.pair[..] else {
        return Err(Failure::usage("--pair takes exactly two algorithms"));
    };
    let file = fs::File::open(&a.csv).map_err(|e| Failure::io(&a.csv, e))?;
    let records = read_csv(file).map_err(|e| Failure::usage(format!("{}: {e}", a.csv.display())))?;
    let c = compare(&records, a.baseline, first, second)?;
    for (alg, dev) in [(first, c.first_deviation), (second, c.second_deviation)] {
        match dev {
            Some(d) => {
                let d = d.scaled(100.0);
                println!("{alg}: dev (%) = {:.2} ± {:.2} over {} instances", d.mean, d.sd, d.count)
            }
            None => println!("{alg}: dev (%) = n/a"),
        }
    }
    println!(
        "Wilcoxon signed-rank {first} vs {second}: pairs = {}, W+ = {}, p = {:.4}",
        c.pairs, c.test.w_plus, c.test.p_value
    );
    println!("{}", c.verdict());
    Ok(0)
}
