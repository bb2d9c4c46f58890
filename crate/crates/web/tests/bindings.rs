use minksum_core::instances::{random_instance, InstanceSpec};
use minksum_core::oracle::{linear_values, oracle_enumerate, oracle_find, oracle_select};
use minksum_core::geometry::Objective;
use minksum_core::rng::seeded;
use minksum_web::{closest, feasible_sums, select_kth};
use serde_json::{json, Value};

const INST1: &str = r#"{"p": [[1,1],[2,3]], "q": [[0,2],[3,-1]],
  "constraints": [{"a": 1, "b": 0, "c": 3}], "objective": [0, 1]}"#;

fn call(out: String) -> Value {
    serde_json::from_str(&out).unwrap()
}

#[test]
fn inst1() {
    let v = call(select_kth(INST1, 1));
    assert_eq!(v["value"], 2);
    assert_eq!(v["rank"], 1);
    assert_eq!(v["count"], 2);
    assert_eq!(v["sum"], json!([5, 2]));
    assert_eq!(call(select_kth(INST1, 2))["value"], 0);
    let v = call(feasible_sums(INST1));
    assert_eq!(v["feasible"], 2);
    assert_eq!(v["sums"].as_array().unwrap().len(), 4);
    let v = call(closest(INST1, 1));
    assert_eq!(v["distance"], 1);
}

#[test]
fn errors_come_back_as_json() {
    assert!(call(select_kth(INST1, 3))["error"].as_str().unwrap().contains("out of range"));
    assert!(call(select_kth("{", 1))["error"].is_string());
    let bad = INST1.replace("\"c\": 3}", "\"c\": 3, \"op\": \"=\"}");
    assert!(call(feasible_sums(&bad))["error"].as_str().unwrap().contains("operator"));
    let many: Vec<[i64; 2]> = vec![[0, 0]; 201];
    let big = json!({"p": many, "q": [[0, 0]], "objective": [0, 1]}).to_string();
    assert!(call(closest(&big, 0))["error"].is_string());
}

#[test]
fn matches_oracle_on_random_scenes() {
    for seed in 0..150 {
        let inst = random_instance(&mut seeded(seed), InstanceSpec::new(1 + seed as usize % 9, seed as usize % 4));
        let cons: Vec<Value> = inst
            .constraints
            .iter()
            .map(|c| json!({"a": c.a, "b": c.b, "c": c.c, "op": if c.strict { ">" } else { ">=" }}))
            .collect();
        let pts = |v: &[minksum_core::geometry::Point<i64>]| v.iter().map(|p| [p.x, p.y]).collect::<Vec<_>>();
        let scene = json!({"p": pts(&inst.p), "q": pts(&inst.q), "constraints": cons,
            "objective": [inst.objective.0, inst.objective.1]})
        .to_string();
        let pairs = oracle_enumerate(&inst.p, &inst.q, &inst.constraints, 0);
        let vals = linear_values(&pairs, inst.objective);
        assert_eq!(call(feasible_sums(&scene))["feasible"], pairs.len());
        for k in 1..=vals.len() as u32 {
            let want = oracle_select(&vals, k as u64).unwrap().value;
            assert_eq!(call(select_kth(&scene, k))["value"], want, "seed {seed} k {k}");
        }
        let (d, e) = inst.objective;
        for delta in [-500, 0, 77] {
            let got = call(closest(&scene, delta));
            match oracle_find(&pairs, &Objective::Linear { d, e }, (delta as i64, 1)) {
                Ok(r) => assert_eq!(got["distance"], r.distance.num),
                Err(_) => assert!(got["error"].is_string()),
            }
        }
    }
}
