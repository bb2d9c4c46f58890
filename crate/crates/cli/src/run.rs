//! Engine dispatch and result reports.

use std::cmp::Ordering;
use std::path::Path;
use std::time::Instant;

use minksum_core::applications::{density_find, lcss_select};
use minksum_core::finding::{find_linear, find_ratio, FindResult};
use minksum_core::geometry::{constraints_parallel, Objective, Point};
use minksum_core::oracle::{
    linear_values, oracle_density, oracle_enumerate, oracle_find, oracle_rank, oracle_segment_sums, oracle_select,
};
use minksum_core::randomized::selection_2_randomized;
use minksum_core::rng::DEFAULT_SEED;
use minksum_core::scalar::{Frac, Scalar};
use minksum_core::selection::{rank, RankBreakdown, SelectionEngine, Selected};
use serde::Serialize;
use serde_json::Value;

use crate::error::CliError;
use crate::number::CliNum;
use crate::problem::{EngineKind, Mode, Problem, ProblemFile, QueryKind};
use crate::sequence::{detect_mode, parse_sequence, read_sequence_text, Sequence};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(untagged)]
pub enum Witness {
    Pair { p: usize, q: usize },
    Segment { i: usize, j: usize },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Breakdown {
    pub r_t: u64,
    pub r1: u64,
    pub r2: u64,
    pub r3: u64,
}

impl From<RankBreakdown> for Breakdown {
    fn from(b: RankBreakdown) -> Self {
        Self { r_t: b.r_t, r1: b.r1, r2: b.r2, r3: b.r3 }
    }
}

/// One answer, printed as a single JSON line.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Report {
    pub answer: Value,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub distance: Option<Value>,
    pub witness: Option<Witness>,
    pub engine: String,
    pub elapsed_ms: f64,
    /// Sampling rounds spent by the randomized engine.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub repeats: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub breakdown: Option<Breakdown>,
}

impl Report {
    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("reports always serialize")
    }
}

/// Command-line settings; unset fields fall back to the problem file, then
/// to defaults.
#[derive(Clone, Copy, Debug, Default)]
pub struct Options {
    pub engine: Option<EngineKind>,
    pub seed: Option<u64>,
    pub epsilon: Option<f64>,
    pub mode: Option<Mode>,
}

fn incompatible(engine: EngineKind, what: &str) -> CliError {
    CliError::Schema(format!("engine `{}` cannot answer {what}", engine_label(engine)))
}

fn engine_label(e: EngineKind) -> &'static str {
    match e {
        EngineKind::Auto => "auto",
        EngineKind::Oracle => "oracle",
        EngineKind::Deterministic => "deterministic",
        EngineKind::Randomized => "randomized",
    }
}

struct Settings {
    engine: EngineKind,
    seed: u64,
    epsilon: Option<f64>,
}

/// Answers a `select`, `rank` or `find` query. `value` overrides the query
/// value stored in the file.
pub fn run_problem(file: &ProblemFile, kind: QueryKind, value: Option<&str>, opts: &Options) -> Result<Report, CliError> {
    let value = match (value, &file.query) {
        (Some(v), _) => Value::String(v.to_string()),
        (None, Some(q)) if q.kind == kind => q.value.clone(),
        (None, Some(q)) => {
            return Err(CliError::Schema(format!(
                "problem holds a `{}` query but the command is `{}`",
                q.kind.name(),
                kind.name()
            )))
        }
        (None, None) => return Err(CliError::Schema(format!("no value given for the `{}` query", kind.name()))),
    };
    let settings = Settings {
        engine: opts.engine.or(file.engine).unwrap_or_default(),
        seed: opts.seed.or(file.seed).unwrap_or(DEFAULT_SEED),
        epsilon: opts.epsilon.or(file.epsilon),
    };
    match opts.mode.or(file.mode).unwrap_or_else(|| file.detect_mode()) {
        Mode::Int => run_typed(&file.typed::<i128>()?, kind, &value, &settings),
        Mode::Float => run_typed(&file.typed::<f64>()?, kind, &value, &settings),
    }
}

fn parse_k(v: &Value) -> Result<u64, CliError> {
    let k = match v {
        Value::Number(n) => n.as_u64(),
        Value::String(s) => s.trim().parse().ok(),
        _ => None,
    };
    k.ok_or_else(|| CliError::Schema(format!("k must be a nonnegative integer, got {v}")))
}

fn timed<R>(f: impl FnOnce() -> Result<R, CliError>) -> Result<(R, f64), CliError> {
    let start = Instant::now();
    let r = f()?;
    Ok((r, start.elapsed().as_secs_f64() * 1e3))
}

fn run_typed<T: CliNum>(prob: &Problem<T>, kind: QueryKind, value: &Value, s: &Settings) -> Result<Report, CliError> {
    let eps = T::epsilon(s.epsilon)?;
    let (p, q, cons) = (&prob.p[..], &prob.q[..], &prob.constraints[..]);
    match kind {
        QueryKind::Select => {
            let k = parse_k(value)?;
            let obj = linear(prob)?;
            let ((sel, engine, repeats), ms) = timed(|| match s.engine {
                EngineKind::Oracle => {
                    let vals = linear_values(&oracle_enumerate(p, q, cons, eps), obj);
                    Ok((oracle_select(&vals, k)?, "oracle".to_string(), None))
                }
                EngineKind::Auto | EngineKind::Deterministic => {
                    let engine = SelectionEngine::new(p, q, cons, obj, eps)?;
                    Ok((engine.select(k)?, engine.name().to_string(), None))
                }
                EngineKind::Randomized => match cons {
                    [l1, l2] if !constraints_parallel(l1, l2, eps) => {
                        let (sel, stats) = selection_2_randomized(p, q, l1, l2, obj, k, eps, s.seed)?;
                        let rounds = stats.attempts.iter().map(|&a| a as u64).sum();
                        Ok((sel, "selection_2_randomized".to_string(), Some(rounds)))
                    }
                    _ => Err(incompatible(s.engine, &format!("selection with {} constraint(s) of this shape; it needs exactly two non-parallel constraints", cons.len()))),
                },
            })?;
            check_selected(prob, obj, &sel, eps)?;
            Ok(Report {
                answer: sel.value.to_json(),
                distance: None,
                witness: Some(Witness::Pair { p: sel.witness.0, q: sel.witness.1 }),
                engine,
                elapsed_ms: ms,
                repeats,
                breakdown: None,
            })
        }
        QueryKind::Rank => {
            let (num, den) = T::target_from_json(value, "t")?;
            // Objective values are sums of inputs, so in integer mode a
            // rational threshold can be floored.
            let t = if T::EXACT { T::floor_div(num, den) } else { num };
            let obj = linear(prob)?;
            let ((r, breakdown, engine), ms) = timed(|| match s.engine {
                EngineKind::Oracle => {
                    let vals = linear_values(&oracle_enumerate(p, q, cons, eps), obj);
                    Ok((oracle_rank(&vals, t), None, "oracle"))
                }
                EngineKind::Auto | EngineKind::Deterministic => {
                    let r = rank(p, q, cons, obj, t, eps)?;
                    let name = match cons {
                        [] => "blocks",
                        [_] => "ranking_1",
                        [l1, l2] if constraints_parallel(l1, l2, eps) => "ranking_parallel",
                        [_, _] => "ranking_2",
                        _ => "ranking_blocks",
                    };
                    Ok((r.rank, r.breakdown.map(Breakdown::from), name))
                }
                EngineKind::Randomized => Err(incompatible(s.engine, "rank queries")),
            })?;
            Ok(Report {
                answer: Value::from(r),
                distance: None,
                witness: None,
                engine: engine.to_string(),
                elapsed_ms: ms,
                repeats: None,
                breakdown,
            })
        }
        QueryKind::Find => {
            let target = T::target_from_json(value, "delta")?;
            let (best, ms) = timed(|| {
                let (solve, engine): (Box<dyn Fn((T, T)) -> Result<FindResult<T>, CliError>>, &str) =
                    match (s.engine, prob.objective) {
                        (EngineKind::Randomized, _) => return Err(incompatible(s.engine, "find queries")),
                        (EngineKind::Oracle, obj) => {
                            let pairs = oracle_enumerate(p, q, cons, eps);
                            (Box::new(move |t| Ok(oracle_find(&pairs, &obj, t)?)), "oracle")
                        }
                        (_, Objective::Linear { d, e }) => {
                            (Box::new(move |t| Ok(find_linear(p, q, cons, (d, e), t, eps)?)), "find_linear")
                        }
                        (_, Objective::Ratio { a, b }) => {
                            (Box::new(move |t| Ok(find_ratio(p, q, cons, a, b, t, eps)?)), "find_ratio")
                        }
                    };
                let best = prefer_lower(target, |t| {
                    solve(t).map(|r| Closest { value: r.value, distance: r.distance, witness: r.witness })
                })?;
                Ok((best, engine))
            })?;
            let (best, engine) = best;
            check_found(prob, &best, target, eps)?;
            Ok(Report {
                answer: T::frac_json(best.value),
                distance: Some(T::frac_json(best.distance)),
                witness: Some(Witness::Pair { p: best.witness.0, q: best.witness.1 }),
                engine: engine.to_string(),
                elapsed_ms: ms,
                repeats: None,
                breakdown: None,
            })
        }
    }
}

fn linear<T: CliNum>(prob: &Problem<T>) -> Result<(T, T), CliError> {
    match prob.objective {
        Objective::Linear { d, e } => Ok((d, e)),
        Objective::Ratio { .. } => Err(CliError::Schema("select and rank need a linear objective".into())),
    }
}

struct Closest<T> {
    value: Frac<T>,
    distance: Frac<T>,
    witness: (usize, usize),
}

/// Closest value to `target`; when both `target - d` and `target + d` are
/// attained, the lower one wins. Float mode keeps the first answer.
fn prefer_lower<T: CliNum>(
    (num, den): (T, T),
    solve: impl Fn((T, T)) -> Result<Closest<T>, CliError>,
) -> Result<Closest<T>, CliError> {
    let best = solve((num, den))?;
    let above = T::cmp_frac(best.value.num, best.value.den, num, den) == Ordering::Greater;
    if !T::EXACT || best.distance.num.is_zero() || !above {
        return Ok(best);
    }
    let d = best.distance;
    match solve((num * d.den - d.num * den, den * d.den)) {
        Ok(alt) if alt.distance.num.is_zero() => Ok(Closest { distance: best.distance, ..alt }),
        _ => Ok(best),
    }
}

fn pair_sum<T: Scalar>(prob: &Problem<T>, (i, j): (usize, usize)) -> Result<Point<T>, CliError> {
    match (prob.p.get(i), prob.q.get(j)) {
        (Some(&a), Some(&b)) => Ok(a + b),
        _ => Err(CliError::Internal(format!("witness ({i}, {j}) is out of bounds"))),
    }
}

fn check_feasible<T: CliNum>(prob: &Problem<T>, s: Point<T>, eps: T) -> Result<(), CliError> {
    for (n, c) in prob.constraints.iter().enumerate() {
        if !(c.admits(s, eps) || (!T::EXACT && T::agrees(c.eval(s), c.c))) {
            return Err(CliError::Internal(format!("witness sum violates constraint {n}")));
        }
    }
    Ok(())
}

fn check_selected<T: CliNum>(prob: &Problem<T>, (d, e): (T, T), sel: &Selected<T>, eps: T) -> Result<(), CliError> {
    let s = pair_sum(prob, sel.witness)?;
    check_feasible(prob, s, eps)?;
    if !T::agrees(d * s.x + e * s.y, sel.value) {
        return Err(CliError::Internal("witness does not attain the reported value".into()));
    }
    Ok(())
}

fn check_found<T: CliNum>(prob: &Problem<T>, best: &Closest<T>, (num, den): (T, T), eps: T) -> Result<(), CliError> {
    let s = pair_sum(prob, best.witness)?;
    check_feasible(prob, s, eps)?;
    let at = match prob.objective {
        Objective::Linear { d, e } => Frac::new(d * s.x + e * s.y, T::ONE),
        Objective::Ratio { a, b } => Frac::new(b * s.y, a * s.x),
    };
    let v = best.value;
    let dist = Frac::new((den * v.num - num * v.den).abs(), den * v.den);
    if !T::frac_agrees(at, v) || !T::frac_agrees(dist, best.distance) {
        return Err(CliError::Internal("witness does not attain the reported value".into()));
    }
    Ok(())
}

/// Which sequence query to run.
#[derive(Clone, Debug)]
pub enum SequenceQuery {
    Lcss { l: usize, u: usize, k: u64 },
    SumSelect { k: u64 },
    Density { l: String, u: String, delta: String },
}

pub fn run_sequence_file(path: &Path, query: &SequenceQuery, opts: &Options) -> Result<Report, CliError> {
    run_sequence(&read_sequence_text(path)?, query, opts)
}

pub fn run_sequence(text: &str, query: &SequenceQuery, opts: &Options) -> Result<Report, CliError> {
    let mode = opts.mode.unwrap_or_else(|| {
        let mut mode = detect_mode(text);
        // Width bounds must parse in the chosen mode; targets are rational
        // in both.
        if let SequenceQuery::Density { l, u, .. } = query {
            if [l, u].iter().any(|v| i128::parse_text(v).is_none()) {
                mode = Mode::Float;
            }
        }
        mode
    });
    let engine = opts.engine.unwrap_or_default();
    match mode {
        Mode::Int => sequence_typed::<i128>(text, query, engine, opts.epsilon),
        Mode::Float => sequence_typed::<f64>(text, query, engine, opts.epsilon),
    }
}

fn sequence_typed<T: CliNum>(
    text: &str,
    query: &SequenceQuery,
    engine: EngineKind,
    epsilon: Option<f64>,
) -> Result<Report, CliError> {
    T::epsilon(epsilon)?;
    let seq = parse_sequence::<T>(text)?;
    if engine == EngineKind::Randomized {
        return Err(incompatible(engine, "sequence queries"));
    }
    let oracle = engine == EngineKind::Oracle;
    match query {
        SequenceQuery::Lcss { .. } | SequenceQuery::SumSelect { .. } => {
            let Sequence::Plain(s) = &seq else {
                return Err(CliError::Schema("segment-sum selection takes a plain sequence (one value per line)".into()));
            };
            let (l, u, k, name) = match *query {
                SequenceQuery::Lcss { l, u, k } => (l, u, k, "lcss"),
                SequenceQuery::SumSelect { k } => (1, s.len(), k, "sum_select"),
                SequenceQuery::Density { .. } => unreachable!(),
            };
            let ((sum, i, j), ms) = timed(|| {
                if oracle {
                    if l == 0 || l > u || u > s.len() {
                        return Err(CliError::Schema(format!("need 1 <= l <= u <= n, got l={l}, u={u}, n={}", s.len())));
                    }
                    let sel = oracle_select(&oracle_segment_sums(s, l, u), k)?;
                    Ok((sel.value, sel.witness.0, sel.witness.1))
                } else {
                    let r = lcss_select(s, l, u, k)?;
                    Ok((r.sum, r.i, r.j))
                }
            })?;
            let len = j + 1 - i;
            let actual = s[i - 1..j].iter().fold(T::ZERO, |acc, &v| acc + v);
            if len < l || len > u || !T::agrees(actual, sum) {
                return Err(CliError::Internal(format!("segment ({i}, {j}) does not match the reported sum")));
            }
            Ok(Report {
                answer: sum.to_json(),
                distance: None,
                witness: Some(Witness::Segment { i, j }),
                engine: if oracle { "oracle" } else { name }.to_string(),
                elapsed_ms: ms,
                repeats: None,
                breakdown: None,
            })
        }
        SequenceQuery::Density { l, u, delta } => {
            let ws: Vec<(T, T)> = match seq {
                Sequence::Weighted(ws) => ws,
                Sequence::Plain(s) => s.into_iter().map(|v| (v, T::ONE)).collect(),
            };
            let bound = |v: &str, name: &str| {
                T::parse_text(v).ok_or_else(|| CliError::Schema(format!("--{name}: expected a {} number, got {v}", T::MODE)))
            };
            let (l, u) = (bound(l, "l")?, bound(u, "u")?);
            let target = T::parse_target(delta)
                .ok_or_else(|| CliError::Schema(format!("--delta: expected a number or \"a/b\", got {delta}")))?;
            let (best, ms) = timed(|| {
                prefer_lower(target, |t| {
                    if oracle {
                        let (i, j, sum, width, distance) = oracle_density(&ws, l, u, t)?;
                        Ok(Closest { value: Frac::new(sum, width), distance, witness: (i, j) })
                    } else {
                        let r = density_find(&ws, l, u, t)?;
                        Ok(Closest { value: r.density, distance: r.distance, witness: (r.i, r.j) })
                    }
                })
            })?;
            let (i, j) = best.witness;
            let (sum, width) = ws[i - 1..j].iter().fold((T::ZERO, T::ZERO), |(a, b), &(s, w)| (a + s, b + w));
            if width < l || width > u || !T::frac_agrees(Frac::new(sum, width), best.value) {
                return Err(CliError::Internal(format!("segment ({i}, {j}) does not match the reported density")));
            }
            Ok(Report {
                answer: T::frac_json(best.value),
                distance: Some(T::frac_json(best.distance)),
                witness: Some(Witness::Segment { i, j }),
                engine: if oracle { "oracle" } else { "density_find" }.to_string(),
                elapsed_ms: ms,
                repeats: None,
                breakdown: None,
            })
        }
    }
}
