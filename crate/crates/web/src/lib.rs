//! WebAssembly bindings for the demo page in `www/`.
//!
//! Every export takes and returns JSON text. Failures come back as
//! `{"error": "..."}` so the page never has to catch exceptions.

use minksum_core::finding::find_linear;
use minksum_core::geometry::{normalize_constraint, Constraint, Point, Relation};
use minksum_core::oracle::oracle_enumerate;
use minksum_core::selection::{rank, SelectionEngine};
use serde::Deserialize;
use serde_json::{json, Value};
use wasm_bindgen::prelude::*;

/// Largest point set the page may send.
pub const MAX_POINTS: usize = 200;

#[derive(Deserialize)]
struct RawConstraint {
    a: i64,
    b: i64,
    c: i64,
    #[serde(default = "ge")]
    op: String,
}

fn ge() -> String {
    ">=".into()
}

#[derive(Deserialize)]
struct Scene {
    p: Vec<[i64; 2]>,
    q: Vec<[i64; 2]>,
    #[serde(default)]
    constraints: Vec<RawConstraint>,
    objective: [i64; 2],
}

struct Problem {
    p: Vec<Point<i64>>,
    q: Vec<Point<i64>>,
    constraints: Vec<Constraint<i64>>,
    objective: (i64, i64),
}

fn parse(scene: &str) -> Result<Problem, String> {
    let s: Scene = serde_json::from_str(scene).map_err(|e| e.to_string())?;
    if s.p.len() > MAX_POINTS || s.q.len() > MAX_POINTS {
        return Err(format!("at most {MAX_POINTS} points per set"));
    }
    let pts = |v: &[[i64; 2]]| v.iter().map(|&[x, y]| Point::new(x, y)).collect();
    let constraints = s
        .constraints
        .iter()
        .map(|c| {
            let rel = match c.op.as_str() {
                ">=" => Relation::Ge,
                ">" => Relation::Gt,
                "<=" => Relation::Le,
                "<" => Relation::Lt,
                op => return Err(format!("unknown operator {op}")),
            };
            normalize_constraint(c.a, c.b, rel, c.c).map_err(|e| e.to_string())
        })
        .collect::<Result<_, _>>()?;
    Ok(Problem { p: pts(&s.p), q: pts(&s.q), constraints, objective: (s.objective[0], s.objective[1]) })
}

fn respond(r: Result<Value, String>) -> String {
    r.unwrap_or_else(|e| json!({ "error": e })).to_string()
}

fn sum_of(prob: &Problem, (i, j): (usize, usize)) -> [i64; 2] {
    let s = prob.p[i] + prob.q[j];
    [s.x, s.y]
}

/// Every pairwise sum with its objective value and feasibility, for drawing.
#[wasm_bindgen]
pub fn feasible_sums(scene: &str) -> String {
    respond(parse(scene).map(|prob| {
        let (d, e) = prob.objective;
        let feasible = oracle_enumerate(&prob.p, &prob.q, &prob.constraints, 0);
        let mut ok = vec![false; prob.p.len() * prob.q.len()];
        for f in &feasible {
            ok[f.p * prob.q.len() + f.q] = true;
        }
        let sums: Vec<Value> = (0..prob.p.len())
            .flat_map(|i| (0..prob.q.len()).map(move |j| (i, j)))
            .map(|(i, j)| {
                let [x, y] = sum_of(&prob, (i, j));
                json!([x, y, d * x + e * y, ok[i * prob.q.len() + j]])
            })
            .collect();
        json!({ "sums": sums, "feasible": feasible.len() })
    }))
}

/// `k`-th largest feasible objective value, its rank and a witness pair.
#[wasm_bindgen]
pub fn select_kth(scene: &str, k: u32) -> String {
    respond(parse(scene).and_then(|prob| {
        let engine = SelectionEngine::new(&prob.p, &prob.q, &prob.constraints, prob.objective, 0)
            .map_err(|e| e.to_string())?;
        let sel = engine.select(k as u64).map_err(|e| e.to_string())?;
        let r = rank(&prob.p, &prob.q, &prob.constraints, prob.objective, sel.value, 0).map_err(|e| e.to_string())?;
        Ok(json!({
            "value": sel.value,
            "rank": r.rank,
            "count": engine.feasible_count(),
            "witness": [sel.witness.0, sel.witness.1],
            "sum": sum_of(&prob, sel.witness),
            "engine": engine.name(),
        }))
    }))
}

/// Feasible objective value closest to `delta`.
#[wasm_bindgen]
pub fn closest(scene: &str, delta: i32) -> String {
    respond(parse(scene).and_then(|prob| {
        let r = find_linear(&prob.p, &prob.q, &prob.constraints, prob.objective, (delta as i64, 1), 0)
            .map_err(|e| e.to_string())?;
        Ok(json!({
            "value": r.value.num,
            "distance": r.distance.num,
            "witness": [r.witness.0, r.witness.1],
            "sum": sum_of(&prob, r.witness),
        }))
    }))
}
