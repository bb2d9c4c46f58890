//! Doubling experiments on seeded random instances.

use std::collections::BTreeMap;
use std::hash::{DefaultHasher, Hash, Hasher};
use std::io::Write;
use std::path::PathBuf;
use std::time::{Duration, Instant};

use clap::{Args, ValueEnum};
use minksum_core::applications::lcss_select;
use minksum_core::error::Result as CoreResult;
use minksum_core::geometry::{Constraint, Point};
use minksum_core::instances::{random_points, random_sequence};
use minksum_core::randomized::selection_2_randomized;
use minksum_core::rng::stream;
use minksum_core::selection::{selection_1, selection_2, selection_lambda, selection_parallel, SelectionEngine};
use serde::Serialize;

use crate::error::CliError;

const COORD: i64 = 1_000_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, ValueEnum)]
pub enum BenchEngine {
    #[value(name = "selection_1")]
    Selection1,
    #[value(name = "selection_2")]
    Selection2,
    #[value(name = "selection_2_randomized")]
    Selection2Randomized,
    #[value(name = "selection_parallel")]
    SelectionParallel,
    #[value(name = "selection_lambda")]
    SelectionLambda,
    #[value(name = "lcss")]
    Lcss,
}

impl BenchEngine {
    pub fn name(self) -> &'static str {
        match self {
            BenchEngine::Selection1 => "selection_1",
            BenchEngine::Selection2 => "selection_2",
            BenchEngine::Selection2Randomized => "selection_2_randomized",
            BenchEngine::SelectionParallel => "selection_parallel",
            BenchEngine::SelectionLambda => "selection_lambda",
            BenchEngine::Lcss => "lcss",
        }
    }

    fn constraints(self) -> Vec<Constraint<i64>> {
        let base = Constraint::new(1, 2, 0, false);
        let wedge = Constraint::new(-2, 1, 0, false);
        match self {
            BenchEngine::Selection1 => vec![base],
            BenchEngine::Selection2 | BenchEngine::Selection2Randomized => vec![base, wedge],
            BenchEngine::SelectionParallel => vec![base, Constraint::new(-1, -2, -COORD, false)],
            BenchEngine::SelectionLambda => vec![base, wedge, Constraint::new(0, -1, -COORD, false)],
            BenchEngine::Lcss => Vec::new(),
        }
    }
}

#[derive(Args, Clone, Debug)]
pub struct BenchArgs {
    /// Input sizes n (points per set, or sequence length).
    #[arg(long, value_delimiter = ',', default_values_t = [1024usize, 2048, 4096])]
    pub sizes: Vec<usize>,
    #[arg(long, value_delimiter = ',', value_enum, default_values_t = [BenchEngine::Selection1])]
    pub engines: Vec<BenchEngine>,
    #[arg(long, value_delimiter = ',', default_values_t = [1u64])]
    pub seeds: Vec<u64>,
    /// Timed runs per trial; the minimum is reported.
    #[arg(long, default_value_t = 1)]
    pub repeats: usize,
    /// CSV destination; standard output when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Per-size medians across seeds, for plotting.
    #[arg(long)]
    pub plot_data: Option<PathBuf>,
}

/// One row per (engine, size, seed).
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BenchRecord {
    pub engine: &'static str,
    pub n: usize,
    pub lambda: usize,
    pub query: &'static str,
    pub seed: u64,
    pub wall_ms: f64,
    /// Sampling rounds of the randomized engine.
    pub repeats: Option<u64>,
    pub answer_digest: String,
    /// Wall time over the previous size's, same engine and seed.
    pub doubling_ratio: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
struct PlotRow {
    engine: &'static str,
    n: usize,
    median_ms: f64,
    median_doubling_ratio: Option<f64>,
}

fn digest(answer: &str) -> String {
    let mut h = DefaultHasher::new();
    answer.hash(&mut h);
    format!("{:016x}", h.finish())
}

fn describe<T: std::fmt::Display>(r: &CoreResult<T>) -> String {
    match r {
        Ok(v) => v.to_string(),
        Err(e) => format!("error: {e}"),
    }
}

fn time_min<R>(repeats: usize, mut f: impl FnMut() -> R) -> (R, Duration) {
    let mut best = Duration::MAX;
    let mut out = None;
    for _ in 0..repeats.max(1) {
        let start = Instant::now();
        let r = f();
        best = best.min(start.elapsed());
        out = Some(r);
    }
    (out.expect("at least one run"), best)
}

/// Times one trial. Instances depend only on `(n, seed)`.
pub fn trial(engine: BenchEngine, n: usize, seed: u64, repeats: usize) -> BenchRecord {
    let mut rng = stream(seed, n as u64);
    let cons = engine.constraints();
    let record = |wall: Duration, answer: String, rounds: Option<u64>, query| BenchRecord {
        engine: engine.name(),
        n,
        lambda: cons.len(),
        query,
        seed,
        wall_ms: wall.as_secs_f64() * 1e3,
        repeats: rounds,
        answer_digest: digest(&answer),
        doubling_ratio: None,
    };
    if engine == BenchEngine::Lcss {
        let seq = random_sequence(&mut rng, n, COORD);
        let l = 32.min(n);
        let u = (l + 256).min(n);
        let k = 1000.min(((u - l + 1) * n) as u64 / 2).max(1);
        let (r, wall) = time_min(repeats, || lcss_select(&seq, l, u, k).map(|s| s.sum));
        return record(wall, describe(&r), None, "lcss");
    }
    let p: Vec<Point<i64>> = random_points(&mut rng, n, COORD);
    let q: Vec<Point<i64>> = random_points(&mut rng, n, COORD);
    let obj = (3, 1);
    let k = SelectionEngine::new(&p, &q, &cons, obj, 0).map(|e| e.feasible_count().div_ceil(2)).unwrap_or(1).max(1);
    let ((r, rounds), wall) = time_min(repeats, || match engine {
        BenchEngine::Selection1 => (selection_1(&p, &q, &cons[0], obj, k, 0).map(|s| s.value), None),
        BenchEngine::Selection2 => (selection_2(&p, &q, &cons[0], &cons[1], obj, k, 0).map(|s| s.value), None),
        BenchEngine::Selection2Randomized => match selection_2_randomized(&p, &q, &cons[0], &cons[1], obj, k, 0, seed) {
            Ok((s, stats)) => (Ok(s.value), Some(stats.attempts.iter().map(|&a| a as u64).sum())),
            Err(e) => (Err(e), None),
        },
        BenchEngine::SelectionParallel => {
            (selection_parallel(&p, &q, &cons[0], &cons[1], obj, k, 0).map(|s| s.value), None)
        }
        BenchEngine::SelectionLambda => (selection_lambda(&p, &q, &cons, obj, k, 0).map(|s| s.value), None),
        BenchEngine::Lcss => unreachable!(),
    });
    record(wall, describe(&r), rounds, "select")
}

/// Runs every (engine, size, seed) trial; rows are ordered by engine, size,
/// then seed.
pub fn bench(args: &BenchArgs) -> Vec<BenchRecord> {
    let mut sizes = args.sizes.clone();
    sizes.sort_unstable();
    sizes.dedup();
    let mut engines = args.engines.clone();
    engines.sort_unstable();
    engines.dedup();
    let mut seeds = args.seeds.clone();
    seeds.sort_unstable();
    seeds.dedup();
    let mut out: Vec<BenchRecord> = Vec::new();
    for &engine in &engines {
        let mut prev: BTreeMap<u64, f64> = BTreeMap::new();
        for &n in &sizes {
            for &seed in &seeds {
                let mut r = trial(engine, n, seed, args.repeats);
                r.doubling_ratio = prev.get(&seed).map(|&p| r.wall_ms / p);
                prev.insert(seed, r.wall_ms);
                out.push(r);
            }
        }
    }
    out
}

fn median(mut v: Vec<f64>) -> Option<f64> {
    if v.is_empty() {
        return None;
    }
    v.sort_by(f64::total_cmp);
    let m = v.len() / 2;
    Some(if v.len() % 2 == 1 { v[m] } else { (v[m - 1] + v[m]) / 2.0 })
}

fn plot_rows(records: &[BenchRecord]) -> Vec<PlotRow> {
    let mut groups: BTreeMap<(&'static str, usize), Vec<&BenchRecord>> = BTreeMap::new();
    for r in records {
        groups.entry((r.engine, r.n)).or_default().push(r);
    }
    groups
        .into_iter()
        .map(|((engine, n), rs)| PlotRow {
            engine,
            n,
            median_ms: median(rs.iter().map(|r| r.wall_ms).collect()).unwrap_or(0.0),
            median_doubling_ratio: median(rs.iter().filter_map(|r| r.doubling_ratio).collect()),
        })
        .collect()
}

pub fn write_csv<S: Serialize>(rows: &[S], out: impl Write) -> Result<(), CliError> {
    let mut w = csv::Writer::from_writer(out);
    for r in rows {
        w.serialize(r).map_err(|e| CliError::Schema(format!("writing csv: {e}")))?;
    }
    w.flush().map_err(|e| CliError::Schema(format!("writing csv: {e}")))
}

/// Runs the benchmark and writes the CSV files it asks for.
pub fn run_bench(args: &BenchArgs) -> Result<Vec<BenchRecord>, CliError> {
    let records = bench(args);
    let open = |p: &PathBuf| std::fs::File::create(p).map_err(|e| CliError::Schema(format!("{}: {e}", p.display())));
    match &args.out {
        Some(p) => write_csv(&records, open(p)?)?,
        None => write_csv(&records, std::io::stdout().lock())?,
    }
    if let Some(p) = &args.plot_data {
        write_csv(&plot_rows(&records), open(p)?)?;
    }
    Ok(records)
}
