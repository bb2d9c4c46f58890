use minksum_cli::{run_problem, run_sequence, EngineKind, Mode, Options, ProblemFile, QueryKind, SequenceQuery};
use minksum_core::geometry::constraints_parallel;
use minksum_core::instances::{random_instance, random_parallel_instance, random_sequence, Instance, InstanceSpec};
use minksum_core::rng::seeded;
use proptest::prelude::*;
use rand::Rng;
use serde_json::{json, Value};

fn problem_json(inst: &Instance, ratio: bool, query: Option<(&str, Value)>) -> ProblemFile {
    let pts = |v: &[minksum_core::geometry::Point<i64>]| v.iter().map(|p| json!([p.x, p.y])).collect::<Vec<_>>();
    let cons: Vec<Value> = inst
        .constraints
        .iter()
        .map(|c| json!({"a": c.a, "b": c.b, "c": c.c, "op": if c.strict { ">" } else { ">=" }}))
        .collect();
    let (d, e) = inst.objective;
    let coeffs = if ratio { json!([d.max(1), e.max(1)]) } else { json!([d, e]) };
    let mut v = json!({
        "P": pts(&inst.p),
        "Q": pts(&inst.q),
        "constraints": cons,
        "objective": {"type": if ratio { "ratio" } else { "linear" }, "coeffs": coeffs},
    });
    if let Some((kind, value)) = query {
        v["query"] = json!({"kind": kind, "value": value});
    }
    ProblemFile::parse(&v.to_string()).unwrap()
}

fn opts(engine: EngineKind) -> Options {
    Options { engine: Some(engine), ..Options::default() }
}

fn instance(seed: u64) -> Instance {
    let mut rng = seeded(seed);
    let n = rng.random_range(1..=12);
    let lambda = rng.random_range(0..=4);
    let spec = InstanceSpec { coord: 20, coef: 3, ..InstanceSpec::new(n, lambda) };
    if lambda == 2 && rng.random_bool(0.3) {
        random_parallel_instance(&mut rng, spec, 0.3)
    } else {
        random_instance(&mut rng, spec)
    }
}

/// Same answer field from the oracle and the default engine, or the same
/// exit code.
fn agree(file: &ProblemFile, kind: QueryKind, value: &str) {
    let a = run_problem(file, kind, Some(value), &opts(EngineKind::Oracle));
    let b = run_problem(file, kind, Some(value), &opts(EngineKind::Auto));
    match (a, b) {
        (Ok(a), Ok(b)) => {
            assert_eq!(a.answer, b.answer, "{kind:?} {value} on {}", file.to_json());
            assert_eq!(a.distance, b.distance, "{kind:?} {value} on {}", file.to_json());
        }
        (Err(a), Err(b)) => assert_eq!(a.exit_code(), b.exit_code(), "{a} vs {b}"),
        (a, b) => panic!("{kind:?} {value}: oracle {a:?} vs auto {b:?} on {}", file.to_json()),
    }
}

#[test]
fn oracle_and_auto_answers_match() {
    for seed in 0..300 {
        let inst = instance(seed);
        let file = problem_json(&inst, false, None);
        for k in 0..=(inst.p.len() * inst.q.len() + 1) as u64 {
            agree(&file, QueryKind::Select, &k.to_string());
        }
        for t in [-200, -7, 0, 3, 41] {
            agree(&file, QueryKind::Rank, &t.to_string());
        }
        agree(&file, QueryKind::Rank, "5/2");
        for delta in ["0", "-13", "7/3", "1.5", "60"] {
            agree(&file, QueryKind::Find, delta);
        }
        if inst.constraints.len() <= 3 {
            let ratio = problem_json(&inst, true, None);
            for delta in ["0", "1/2", "-3", "2.25"] {
                agree(&ratio, QueryKind::Find, delta);
            }
        }
    }
}

#[test]
fn float_mode_matches_int_mode_on_integral_inputs() {
    for seed in 0..100 {
        let inst = instance(1000 + seed);
        let file = problem_json(&inst, false, None);
        let float = Options { mode: Some(Mode::Float), ..Options::default() };
        for k in 1..=(inst.p.len() * inst.q.len()) as u64 {
            let i = run_problem(&file, QueryKind::Select, Some(&k.to_string()), &Options::default());
            let f = run_problem(&file, QueryKind::Select, Some(&k.to_string()), &float);
            match (i, f) {
                (Ok(i), Ok(f)) => assert_eq!(i.answer.as_f64(), f.answer.as_f64()),
                (Err(a), Err(b)) => assert_eq!(a.exit_code(), b.exit_code()),
                (a, b) => panic!("{a:?} vs {b:?}"),
            }
        }
    }
}

#[test]
fn randomized_engine_matches_deterministic() {
    let mut checked = 0;
    for seed in 0..400 {
        let mut rng = seeded(5000 + seed);
        let spec = InstanceSpec { coord: 50, ..InstanceSpec::new(rng.random_range(2..=10), 2) };
        let inst = random_instance(&mut rng, spec);
        let file = problem_json(&inst, false, None);
        let count = inst.p.len() * inst.q.len();
        let rnd = Options { engine: Some(EngineKind::Randomized), seed: Some(seed), ..Options::default() };
        if constraints_parallel(&inst.constraints[0], &inst.constraints[1], 0) {
            let e = run_problem(&file, QueryKind::Select, Some("1"), &rnd).unwrap_err();
            assert_eq!(e.exit_code(), 4);
            continue;
        }
        for k in [1, 2, count as u64 / 2, count as u64] {
            let det = run_problem(&file, QueryKind::Select, Some(&k.to_string()), &opts(EngineKind::Deterministic));
            match (det, run_problem(&file, QueryKind::Select, Some(&k.to_string()), &rnd)) {
                (Ok(d), Ok(r)) => {
                    assert_eq!(d.answer, r.answer);
                    assert_eq!(r.engine, "selection_2_randomized");
                    assert!(r.repeats.is_some());
                    checked += 1;
                }
                (Err(a), Err(b)) => assert_eq!(a.exit_code(), b.exit_code()),
                (a, b) => panic!("{a:?} vs {b:?}"),
            }
        }
    }
    assert!(checked > 500, "{checked}");
}

#[test]
fn incompatible_engines_are_rejected() {
    let inst = instance(7);
    let file = problem_json(&inst, false, None);
    let rnd = opts(EngineKind::Randomized);
    for kind in [QueryKind::Rank, QueryKind::Find] {
        let e = run_problem(&file, kind, Some("1"), &rnd).unwrap_err();
        assert_eq!(e.exit_code(), 4);
        assert!(e.to_string().contains("randomized"), "{e}");
    }
    let one = problem_json(&random_instance(&mut seeded(3), InstanceSpec::new(4, 1)), false, None);
    assert_eq!(run_problem(&one, QueryKind::Select, Some("1"), &rnd).unwrap_err().exit_code(), 4);
    let e = run_sequence("1\n2\n", &SequenceQuery::SumSelect { k: 1 }, &rnd).unwrap_err();
    assert_eq!(e.exit_code(), 4);
}

#[test]
fn query_value_comes_from_file_or_override() {
    let inst = instance(11);
    let file = problem_json(&inst, false, Some(("select", json!(1))));
    let from_file = run_problem(&file, QueryKind::Select, None, &Options::default()).unwrap();
    let explicit = run_problem(&file, QueryKind::Select, Some("1"), &Options::default());
    assert_eq!(from_file.answer, explicit.unwrap().answer);
    assert_eq!(run_problem(&file, QueryKind::Rank, None, &Options::default()).unwrap_err().exit_code(), 4);
    let bare = problem_json(&inst, false, None);
    assert_eq!(run_problem(&bare, QueryKind::Find, None, &Options::default()).unwrap_err().exit_code(), 4);
}

#[test]
fn sequence_queries_match_oracle() {
    for seed in 0..200 {
        let mut rng = seeded(9000 + seed);
        let n = rng.random_range(1..=24);
        let seq = random_sequence(&mut rng, n, 9);
        let text: String = seq.iter().map(|v| format!("{v}\n")).collect();
        let l = rng.random_range(1..=n);
        let u = rng.random_range(l..=n);
        let count = (l..=u).map(|len| n + 1 - len).sum::<usize>() as u64;
        for k in 1..=count {
            let q = SequenceQuery::Lcss { l, u, k };
            let a = run_sequence(&text, &q, &opts(EngineKind::Oracle)).unwrap();
            let b = run_sequence(&text, &q, &Options::default()).unwrap();
            assert_eq!(a.answer, b.answer);
        }
        let widths: String = seq.iter().map(|v| format!("{v},{}\n", rng.random_range(1..=3))).collect();
        for delta in ["0", "1/3", "-2.5", "4"] {
            let q = SequenceQuery::Density { l: "2".into(), u: "9".into(), delta: delta.into() };
            let a = run_sequence(&widths, &q, &opts(EngineKind::Oracle));
            let b = run_sequence(&widths, &q, &Options::default());
            match (a, b) {
                (Ok(a), Ok(b)) => assert_eq!((a.answer, a.distance), (b.answer, b.distance)),
                (Err(a), Err(b)) => assert_eq!(a.exit_code(), b.exit_code()),
                (a, b) => panic!("{a:?} vs {b:?}"),
            }
        }
    }
}

#[test]
fn lcss_on_weighted_input_is_a_schema_error() {
    let e = run_sequence("1,1\n2,1\n", &SequenceQuery::Lcss { l: 1, u: 1, k: 1 }, &Options::default()).unwrap_err();
    assert_eq!(e.exit_code(), 4);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn serialized_problems_answer_the_same(seed in any::<u64>(), k in 1u64..20) {
        let inst = instance(seed);
        let file = problem_json(&inst, false, Some(("select", json!(k))));
        let again = ProblemFile::parse(&file.to_json()).unwrap();
        prop_assert_eq!(&again, &file);
        let a = run_problem(&file, QueryKind::Select, None, &Options::default());
        let b = run_problem(&again, QueryKind::Select, None, &Options::default());
        match (a, b) {
            (Ok(a), Ok(b)) => prop_assert_eq!((a.answer, a.witness), (b.answer, b.witness)),
            (Err(a), Err(b)) => prop_assert_eq!(a.exit_code(), b.exit_code()),
            (a, b) => prop_assert!(false, "{:?} vs {:?}", a, b),
        }
    }
}
