use minksum_core::error::Error;
use minksum_core::finding::{find_linear, find_max_leq, find_ratio};
use minksum_core::geometry::{Constraint, Objective, Point};
use minksum_core::instances::{random_instance, InstanceSpec};
use minksum_core::oracle::{linear_values, oracle_enumerate, oracle_find, oracle_max_leq, oracle_rank, oracle_select};
use minksum_core::rng::seeded;
use minksum_core::selection::{rank, select};
use rand::Rng;

fn check_select(p: &[Point<i64>], q: &[Point<i64>], cons: &[Constraint<i64>], obj: (i64, i64), tag: &str) {
    let f = oracle_enumerate(p, q, cons, 0);
    let vals = linear_values(&f, obj);
    if vals.is_empty() {
        assert_eq!(select(p, q, cons, obj, 1, 0).unwrap_err(), Error::Infeasible, "{tag}");
        return;
    }
    for k in 1..=vals.len() as u64 {
        let want = oracle_select(&vals, k).unwrap().value;
        let got = select(p, q, cons, obj, k, 0).unwrap_or_else(|e| panic!("{tag} k={k}: {e}"));
        assert_eq!(got.value, want, "{tag} k={k} cons={cons:?} obj={obj:?}");
        let s = p[got.witness.0] + q[got.witness.1];
        assert!(cons.iter().all(|c| c.admits(s, 0)), "{tag} witness infeasible");
        assert_eq!(obj.0 * s.x + obj.1 * s.y, got.value, "{tag} witness value");
    }
    let n = vals.len() as u64;
    assert_eq!(select(p, q, cons, obj, n + 1, 0).unwrap_err(), Error::RankOutOfRange { k: n + 1, count: n });
}

fn check_rank(p: &[Point<i64>], q: &[Point<i64>], cons: &[Constraint<i64>], obj: (i64, i64), tag: &str) {
    let vals = linear_values(&oracle_enumerate(p, q, cons, 0), obj);
    let all = linear_values(&oracle_enumerate(p, q, &[], 0), obj);
    for &(t, _, _) in all.iter().step_by(3) {
        for t in [t - 1, t, t + 1] {
            let r = rank(p, q, cons, obj, t, 0).unwrap();
            assert_eq!(r.rank, oracle_rank(&vals, t), "{tag} t={t} cons={cons:?}");
            if let Some(b) = r.breakdown {
                assert_eq!(b.r_t, oracle_rank(&all, t) - 1);
                let viol = |c: &Constraint<i64>| {
                    oracle_rank(&linear_values(&oracle_enumerate(p, q, &[c.negated()], 0), obj), t) - 1
                };
                assert_eq!(b.r1, viol(&cons[0]), "{tag} r1");
                assert_eq!(b.r2, viol(&cons[1]), "{tag} r2");
                assert_eq!(b.r3, oracle_rank(&linear_values(&oracle_enumerate(p, q, &[cons[0].negated(), cons[1].negated()], 0), obj), t) - 1);
            }
        }
    }
}

#[test]
fn selection_matches_oracle_on_random_instances() {
    let mut rng = seeded(11);
    for lambda in 0..=5 {
        for round in 0..120 {
            let n = rng.random_range(1..=9);
            let mut spec = InstanceSpec::new(n, lambda);
            if round % 3 == 0 {
                spec.coord = 3;
                spec.coef = 2;
            }
            let inst = random_instance(&mut rng, spec);
            let tag = format!("lambda={lambda} round={round}");
            check_select(&inst.p, &inst.q, &inst.constraints, inst.objective, &tag);
            if lambda <= 3 {
                check_rank(&inst.p, &inst.q, &inst.constraints, inst.objective, &tag);
            }
        }
    }
}

#[test]
fn parallel_constraints_match_oracle() {
    let mut rng = seeded(12);
    for round in 0..200 {
        let n = rng.random_range(1..=9);
        let mut spec = InstanceSpec::new(n, 1);
        if round % 2 == 0 {
            spec.coord = 4;
        }
        let inst = random_instance(&mut rng, spec);
        let l1 = inst.constraints[0];
        let m = rng.random_range(1..=3) * if rng.random_bool(0.7) { -1 } else { 1 };
        let width = rng.random_range(0..=40);
        let c2 = if m < 0 { m * l1.c - width } else { m * l1.c + width };
        let l2 = Constraint::new(m * l1.a, m * l1.b, c2, rng.random_bool(0.3));
        let cons = [l1, l2];
        let tag = format!("parallel round={round}");
        check_select(&inst.p, &inst.q, &cons, inst.objective, &tag);
        check_rank(&inst.p, &inst.q, &cons, inst.objective, &tag);
    }
}

#[test]
fn finding_matches_oracle() {
    let mut rng = seeded(13);
    for round in 0..300 {
        let n = rng.random_range(1..=9);
        let mut spec = InstanceSpec::new(n, round % 4);
        if round % 3 == 0 {
            spec.coord = 4;
        }
        let inst = random_instance(&mut rng, spec);
        let f = oracle_enumerate(&inst.p, &inst.q, &inst.constraints, 0);
        let delta = (rng.random_range(-3000..=3000), rng.random_range(1..=7));
        let (d, e) = inst.objective;
        let got = find_linear(&inst.p, &inst.q, &inst.constraints, (d, e), delta, 0);
        match oracle_find(&f, &Objective::Linear { d, e }, delta) {
            Ok(want) => {
                let got = got.unwrap();
                assert!(got.distance == want.distance, "linear round={round}");
            }
            Err(err) => assert_eq!(got.unwrap_err(), err),
        }
        let (a, b) = (rng.random_range(1..=3), rng.random_range(-3..=3)).clone();
        let b = if b == 0 { 1 } else { b };
        let rdelta = (rng.random_range(-20..=20), rng.random_range(1..=5));
        let got = find_ratio(&inst.p, &inst.q, &inst.constraints, a, b, rdelta, 0);
        match oracle_find(&f, &Objective::Ratio { a, b }, rdelta) {
            Ok(want) => {
                let got = got.unwrap_or_else(|e| panic!("ratio round={round}: {e}"));
                assert!(got.distance == want.distance, "ratio round={round} got {got:?} want {want:?}");
                let s = inst.p[got.witness.0] + inst.q[got.witness.1];
                assert!(inst.constraints.iter().all(|c| c.admits(s, 0)));
            }
            Err(err) => assert_eq!(got.unwrap_err(), err, "ratio round={round}"),
        }
        let vals = linear_values(&f, (d, e));
        let t = rng.random_range(-6000..=6000);
        match oracle_max_leq(&vals, t) {
            Ok(want) => assert_eq!(find_max_leq(&inst.p, &inst.q, &inst.constraints, (d, e), t, 0).unwrap().value, want.value),
            Err(err) => {
                let got = find_max_leq(&inst.p, &inst.q, &inst.constraints, (d, e), t, 0);
                assert!(got.is_err(), "max_leq round={round}: {err}");
            }
        }
    }
}
