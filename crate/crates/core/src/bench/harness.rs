use std::collections::HashMap;
use std::fmt::{self, Write as _};
use std::io::{Read, Write};
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::mpsc;
use std::time::{Duration, Instant};

use super::stats::{relative_deviation, wilcoxon_signed_rank, MeanSd, WilcoxonResult};
use crate::benders::{solve_bda, DEFAULT_EPSILON};
use crate::bruteforce::exact_minmax_regret;
use crate::error::{Error, Result};
use crate::heuristics::{solve_amu, solve_sba, SbaParams};
use crate::model::IntervalIlpInstance;
use crate::regret::robustness_cost;
use crate::report::{Algorithm, SolveReport, SolveStatus};

pub const CSV_HEADER: [&str; 8] = [
    "instance",
    "algorithm",
    "status",
    "z",
    "lower_bound",
    "gap",
    "time_ms",
    "seed",
];

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolveOptions {
    pub time_limit: Duration,
    pub epsilon: f64,
    pub sba: SbaParams,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions {
            time_limit: Duration::from_secs(7200),
            epsilon: DEFAULT_EPSILON,
            sba: SbaParams::default(),
        }
    }
}

/// Runs one algorithm. A proven-empty feasible set becomes an `Infeasible`
/// report rather than an error.
pub fn run_algorithm(
    instance: &IntervalIlpInstance,
    algorithm: Algorithm,
    options: &SolveOptions,
) -> Result<SolveReport> {
    let result = match algorithm {
        Algorithm::Bda => solve_bda(instance, options.epsilon, options.time_limit),
        Algorithm::Amu => solve_amu(instance, options.time_limit),
        Algorithm::Sba => solve_sba(instance, &options.sba, options.time_limit),
        Algorithm::Brute => solve_brute(instance, options.time_limit),
    };
    match result {
        Err(Error::InfeasibleInstance) => {
            Ok(SolveReport::empty(algorithm, SolveStatus::Infeasible))
        }
        other => other,
    }
}

fn solve_brute(instance: &IntervalIlpInstance, time_limit: Duration) -> Result<SolveReport> {
    let start = Instant::now();
    let (x, z) = exact_minmax_regret(instance)?;
    let mut report = SolveReport::empty(Algorithm::Brute, SolveStatus::Optimal);
    report.evaluation = Some(robustness_cost(instance, &x, time_limit)?);
    report.incumbent = Some(x);
    report.z = Some(z);
    report.lower_bound = Some(z);
    report.elapsed = start.elapsed();
    Ok(report)
}

#[derive(Debug, Clone, PartialEq)]
pub enum RunStatus {
    Solved(SolveStatus),
    Error(String),
}

impl RunStatus {
    pub fn as_str(&self) -> &str {
        match self {
            RunStatus::Solved(s) => s.as_str(),
            RunStatus::Error(_) => "error",
        }
    }

    fn parse(s: &str) -> Option<RunStatus> {
        Some(match s {
            "optimal" => RunStatus::Solved(SolveStatus::Optimal),
            "feasible" => RunStatus::Solved(SolveStatus::Feasible),
            "time_limit" => RunStatus::Solved(SolveStatus::TimeLimit),
            "infeasible" => RunStatus::Solved(SolveStatus::Infeasible),
            "error" => RunStatus::Error(String::new()),
            _ => return None,
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchRecord {
    pub instance: String,
    pub algorithm: Algorithm,
    pub status: RunStatus,
    pub z: Option<f64>,
    pub lower_bound: Option<f64>,
    pub time_ms: f64,
    pub seed: Option<u64>,
}

impl BenchRecord {
    pub fn from_report(instance: &str, seed: Option<u64>, report: &SolveReport) -> Self {
        BenchRecord {
            instance: instance.to_string(),
            algorithm: report.algorithm,
            status: RunStatus::Solved(report.status),
            z: report.z,
            lower_bound: report.lower_bound,
            time_ms: report.elapsed.as_secs_f64() * 1e3,
            seed,
        }
    }

    pub fn gap(&self) -> Option<f64> {
        Some(self.z? - self.lower_bound?)
    }

    pub fn is_error(&self) -> bool {
        matches!(self.status, RunStatus::Error(_))
    }
}

/// Seed encoded in generated instance names (`…_s<seed>`), if any.
pub fn seed_from_name(name: &str) -> Option<u64> {
    let (_, tail) = name.rsplit_once("_s")?;
    tail.parse().ok()
}

#[derive(Debug, Clone)]
pub struct BenchInstance {
    pub name: String,
    pub instance: IntervalIlpInstance,
    pub seed: Option<u64>,
}

impl BenchInstance {
    pub fn new(instance: IntervalIlpInstance) -> Self {
        BenchInstance {
            name: instance.name.clone(),
            seed: seed_from_name(&instance.name),
            instance,
        }
    }
}

#[derive(Debug, Clone)]
pub struct BenchConfig {
    pub algorithms: Vec<Algorithm>,
    pub baseline: Algorithm,
    pub options: SolveOptions,
    pub jobs: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AlgorithmSummary {
    pub algorithm: Algorithm,
    /// Seconds.
    pub time: Option<MeanSd>,
    /// Fractions; the summary table prints percentages.
    pub deviation: Option<MeanSd>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct HeuristicComparison {
    pub first: Algorithm,
    pub second: Algorithm,
    pub first_deviation: Option<MeanSd>,
    pub second_deviation: Option<MeanSd>,
    pub pairs: usize,
    pub test: WilcoxonResult,
}

impl HeuristicComparison {
    pub fn significant(&self) -> bool {
        self.test.p_value <= 0.05
    }

    pub fn verdict(&self) -> &'static str {
        if self.significant() {
            "significant (p ≤ 0.05)"
        } else {
            "not significant (p > 0.05)"
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchReport {
    pub baseline: Algorithm,
    pub records: Vec<BenchRecord>,
    pub summary: Vec<AlgorithmSummary>,
    pub comparison: Option<HeuristicComparison>,
}

impl BenchReport {
    pub fn has_errors(&self) -> bool {
        self.records.iter().any(BenchRecord::is_error)
    }
}

/// Deviation of every non-baseline record whose instance has a usable
/// baseline `z`. Zero baselines are skipped.
pub fn deviations(records: &[BenchRecord], baseline: Algorithm) -> HashMap<(String, Algorithm), f64> {
    let base: HashMap<&str, f64> = records
        .iter()
        .filter(|r| r.algorithm == baseline)
        .filter_map(|r| Some((r.instance.as_str(), r.z?)))
        .collect();
    records
        .iter()
        .filter(|r| r.algorithm != baseline)
        .filter_map(|r| {
            let b = *base.get(r.instance.as_str())?;
            let d = relative_deviation(r.z?, b).ok()?;
            Some(((r.instance.clone(), r.algorithm), d))
        })
        .collect()
}

/// Mean ± sd of time for every algorithm and of deviation for every
/// non-baseline algorithm, in first-appearance order of `algorithms`.
pub fn aggregate(
    records: &[BenchRecord],
    algorithms: &[Algorithm],
    baseline: Algorithm,
) -> Vec<AlgorithmSummary> {
    let devs = deviations(records, baseline);
    algorithms
        .iter()
        .map(|&alg| {
            let times: Vec<f64> = records
                .iter()
                .filter(|r| r.algorithm == alg && !r.is_error())
                .map(|r| r.time_ms / 1e3)
                .collect();
            let mut dev: Vec<(&String, f64)> = devs
                .iter()
                .filter(|((_, a), _)| *a == alg)
                .map(|((i, _), d)| (i, *d))
                .collect();
            dev.sort_by(|a, b| a.0.cmp(b.0));
            let dev: Vec<f64> = dev.into_iter().map(|(_, d)| d).collect();
            AlgorithmSummary {
                algorithm: alg,
                time: MeanSd::of(&times),
                deviation: if alg == baseline { None } else { MeanSd::of(&dev) },
            }
        })
        .collect()
}

/// Paired signed-rank test between two algorithms' deviations.
pub fn compare(
    records: &[BenchRecord],
    baseline: Algorithm,
    first: Algorithm,
    second: Algorithm,
) -> Result<HeuristicComparison> {
    for alg in [baseline, first, second] {
        if !records.iter().any(|r| r.algorithm == alg) {
            return Err(Error::InvalidParams(format!("no records for algorithm `{alg}`")));
        }
    }
    let devs = deviations(records, baseline);
    let mut instances: Vec<&String> = devs.keys().map(|(i, _)| i).collect();
    instances.sort();
    instances.dedup();
    let mut pairs = Vec::new();
    let (mut a_dev, mut b_dev) = (Vec::new(), Vec::new());
    for inst in instances {
        let a = devs.get(&(inst.clone(), first));
        let b = devs.get(&(inst.clone(), second));
        if let Some(&a) = a {
            a_dev.push(a);
        }
        if let Some(&b) = b {
            b_dev.push(b);
        }
        if let (Some(&a), Some(&b)) = (a, b) {
            pairs.push((a, b));
        }
    }
    Ok(HeuristicComparison {
        first,
        second,
        first_deviation: MeanSd::of(&a_dev),
        second_deviation: MeanSd::of(&b_dev),
        pairs: pairs.len(),
        test: wilcoxon_signed_rank(&pairs),
    })
}

/// Runs every `(instance, algorithm)` pair; failures become error records.
pub fn run_benchmark(instances: &[BenchInstance], config: &BenchConfig) -> Result<BenchReport> {
    if !config.algorithms.contains(&config.baseline) {
        return Err(Error::InvalidParams(format!(
            "baseline `{}` is not among the benchmarked algorithms",
            config.baseline
        )));
    }
    config.options.sba.validate()?;

    let tasks: Vec<(usize, Algorithm)> = (0..instances.len())
        .flat_map(|i| config.algorithms.iter().map(move |&a| (i, a)))
        .collect();
    let next = AtomicUsize::new(0);
    let (tx, rx) = mpsc::channel();
    let workers = config.jobs.max(1).min(tasks.len().max(1));
    std::thread::scope(|scope| {
        for _ in 0..workers {
            let tx = tx.clone();
            let (tasks, next) = (&tasks, &next);
            scope.spawn(move || loop {
                let k = next.fetch_add(1, Ordering::Relaxed);
                let Some(&(i, alg)) = tasks.get(k) else { break };
                let item = &instances[i];
                let started = Instant::now();
                let record = match run_algorithm(&item.instance, alg, &config.options) {
                    Ok(report) => BenchRecord::from_report(&item.name, item.seed, &report),
                    Err(e) => BenchRecord {
                        instance: item.name.clone(),
                        algorithm: alg,
                        status: RunStatus::Error(e.to_string()),
                        z: None,
                        lower_bound: None,
                        time_ms: started.elapsed().as_secs_f64() * 1e3,
                        seed: item.seed,
                    },
                };
                if tx.send(record).is_err() {
                    break;
                }
            });
        }
    });
    drop(tx);
    let mut records: Vec<BenchRecord> = rx.into_iter().collect();
    records.sort_by(|a, b| (&a.instance, a.algorithm).cmp(&(&b.instance, b.algorithm)));

    let summary = aggregate(&records, &config.algorithms, config.baseline);
    let heuristics: Vec<Algorithm> = config
        .algorithms
        .iter()
        .copied()
        .filter(|&a| a != config.baseline)
        .collect();
    let comparison = match heuristics[..] {
        [first, second, ..] if !records.is_empty() => {
            Some(compare(&records, config.baseline, first, second)?)
        }
        _ => None,
    };
    Ok(BenchReport {
        baseline: config.baseline,
        records,
        summary,
        comparison,
    })
}

fn opt_number(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

pub fn write_csv<W: Write>(records: &[BenchRecord], out: W) -> Result<()> {
    let io = |e: csv::Error| Error::InvalidParams(format!("writing CSV: {e}"));
    let mut w = csv::Writer::from_writer(out);
    w.write_record(CSV_HEADER).map_err(io)?;
    for r in records {
        w.write_record([
            r.instance.clone(),
            r.algorithm.to_string(),
            r.status.as_str().to_string(),
            opt_number(r.z),
            opt_number(r.lower_bound),
            opt_number(r.gap()),
            format!("{:.3}", r.time_ms),
            r.seed.map(|s| s.to_string()).unwrap_or_default(),
        ])
        .map_err(io)?;
    }
    w.flush()
        .map_err(|e| Error::InvalidParams(format!("writing CSV: {e}")))?;
    Ok(())
}

/// Reads records back; every column of the schema must be present.
pub fn read_csv<R: Read>(input: R) -> Result<Vec<BenchRecord>> {
    let mut rdr = csv::Reader::from_reader(input);
    let headers = rdr
        .headers()
        .map_err(|e| Error::Parse {
            line: 1,
            reason: e.to_string(),
        })?
        .clone();
    let mut col = HashMap::new();
    for name in CSV_HEADER {
        let idx = headers.iter().position(|h| h == name).ok_or_else(|| Error::Parse {
            line: 1,
            reason: format!("missing column `{name}`"),
        })?;
        col.insert(name, idx);
    }
    let mut out = Vec::new();
    for (k, row) in rdr.records().enumerate() {
        let line = k + 2;
        let row = row.map_err(|e| Error::Parse {
            line,
            reason: e.to_string(),
        })?;
        let field = |name: &str| row.get(col[name]).unwrap_or("");
        let bad = |name: &str| Error::Parse {
            line,
            reason: format!("bad `{name}` value `{}`", field(name)),
        };
        let opt_f64 = |name: &str| -> Result<Option<f64>> {
            let s = field(name);
            if s.is_empty() {
                Ok(None)
            } else {
                s.parse().map(Some).map_err(|_| bad(name))
            }
        };
        out.push(BenchRecord {
            instance: field("instance").to_string(),
            algorithm: field("algorithm").parse().map_err(|_| bad("algorithm"))?,
            status: RunStatus::parse(field("status")).ok_or_else(|| bad("status"))?,
            z: opt_f64("z")?,
            lower_bound: opt_f64("lower_bound")?,
            time_ms: field("time_ms").parse().map_err(|_| bad("time_ms"))?,
            seed: match field("seed") {
                "" => None,
                s => Some(s.parse().map_err(|_| bad("seed"))?),
            },
        });
    }
    Ok(out)
}

struct Cell(Option<MeanSd>);

impl fmt::Display for Cell {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.0 {
            Some(m) => write!(f, "{:.2} ± {:.2}", m.mean, m.sd),
            None => write!(f, "n/a"),
        }
    }
}

/// Aligned text table: baseline time, then a deviation/time pair per
/// heuristic, followed by the signed-rank verdict.
pub fn format_summary(report: &BenchReport) -> String {
    let mut groups: Vec<(String, Vec<(&str, String)>)> = Vec::new();
    for s in &report.summary {
        let time = Cell(s.time).to_string();
        if s.algorithm == report.baseline {
            groups.insert(0, (s.algorithm.as_str().to_uppercase(), vec![("time (s)", time)]));
        } else {
            let dev = Cell(s.deviation.map(|d| d.scaled(100.0))).to_string();
            groups.push((
                s.algorithm.as_str().to_uppercase(),
                vec![("dev (%)", dev), ("time (s)", time)],
            ));
        }
    }
    let mut head1 = String::new();
    let mut head2 = String::new();
    let mut body = String::new();
    for (g, (name, cols)) in groups.iter().enumerate() {
        let sep = if g == 0 { "" } else { " | " };
        let widths: Vec<usize> = cols
            .iter()
            .map(|(h, v)| h.chars().count().max(v.chars().count()))
            .collect();
        let span = widths.iter().sum::<usize>() + 3 * (cols.len() - 1);
        let _ = write!(head1, "{sep}{name:^span$}");
        let _ = write!(head2, "{sep}");
        let _ = write!(body, "{sep}");
        for (k, ((h, v), w)) in cols.iter().zip(&widths).enumerate() {
            let pad = if k == 0 { "" } else { "   " };
            let _ = write!(head2, "{pad}{h:^w$}");
            let _ = write!(body, "{pad}{v:^w$}");
        }
    }
    let mut out = format!("{}\n{}\n{}\n", head1.trim_end(), head2.trim_end(), body.trim_end());
    if let Some(c) = &report.comparison {
        let _ = writeln!(
            out,
            "Wilcoxon signed-rank {} vs {}: pairs = {}, W+ = {}, p = {:.4} -> {}",
            c.first,
            c.second,
            c.pairs,
            c.test.w_plus,
            c.test.p_value,
            c.verdict()
        );
    }
    out
}
