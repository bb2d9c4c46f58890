use std::collections::HashMap;

use minksum_core::geometry::{transform_two, Constraint, Point};
use minksum_core::instances::{random_instance, InstanceSpec};
use minksum_core::oracle::{linear_values, oracle_enumerate};
use minksum_core::randomized::{selection_2_randomized, RangeEngine, ReportCase};
use minksum_core::rng::seeded;
use minksum_core::selection::selection_2;
use rand::Rng;

fn general_instance(rng: &mut impl Rng, n: usize, coord: i64) -> (Vec<Point<i64>>, Vec<Point<i64>>, Constraint<i64>, Constraint<i64>, (i64, i64)) {
    loop {
        let mut spec = InstanceSpec::new(n, 2);
        spec.coord = coord;
        let inst = random_instance(rng, spec);
        let (l1, l2) = (inst.constraints[0], inst.constraints[1]);
        if l1.a * l2.b != l1.b * l2.a && transform_two(&inst.p, &inst.q, &l1, &l2, inst.objective, 0).is_ok() {
            return (inst.p, inst.q, l1, l2, inst.objective);
        }
    }
}

#[test]
fn report_and_count_match_oracle_in_every_case() {
    let mut rng = seeded(21);
    let mut cases: HashMap<ReportCase, usize> = HashMap::new();
    for round in 0..600 {
        let n = rng.random_range(1..=12);
        let coord = if round % 3 == 0 { 4 } else { 200 };
        let (p, q, l1, l2, obj) = general_instance(&mut rng, n, coord);
        let canon = transform_two(&p, &q, &l1, &l2, obj, 0).unwrap();
        let eng = RangeEngine::new(canon.clone(), 0);
        let f = oracle_enumerate(&canon.p, &canon.q, &[canon.first, canon.second], 0);
        let all = linear_values(&oracle_enumerate(&canon.p, &canon.q, &[], 0), (0, 1));
        for _ in 0..4 {
            let a = all[rng.random_range(0..all.len())].0 + rng.random_range(-2..=2);
            let b = all[rng.random_range(0..all.len())].0 + rng.random_range(-2..=2);
            let (s_l, s_r) = (a.min(b), a.max(b));
            let mut want: Vec<(u32, u32)> =
                f.iter().filter(|x| x.point.y >= s_l && x.point.y <= s_r).map(|x| (x.p as u32, x.q as u32)).collect();
            let mut got = eng.report(s_l, s_r);
            want.sort_unstable();
            got.sort_unstable();
            assert_eq!(got, want, "round={round} [{s_l},{s_r}] canon={:?} {:?}", canon.first, canon.second);
            assert_eq!(eng.count(s_l, s_r), want.len() as u64);
            *cases.entry(eng.pieces(s_l, s_r).1).or_default() += 1;
        }
    }
    for c in [ReportCase::Open, ReportCase::B, ReportCase::C, ReportCase::D] {
        assert!(cases.get(&c).copied().unwrap_or(0) > 0, "case {c:?} never exercised: {cases:?}");
    }
}

#[test]
fn sampling_is_deterministic_and_in_range() {
    let mut rng = seeded(22);
    let (p, q, l1, l2, obj) = general_instance(&mut rng, 20, 100);
    let eng = RangeEngine::new(transform_two(&p, &q, &l1, &l2, obj, 0).unwrap(), 0);
    let (lo, hi) = (-100_000, 100_000);
    if eng.count(lo, hi) == 0 {
        return;
    }
    let a = eng.sample(lo, hi, 500, &mut seeded(1)).unwrap();
    let b = eng.sample(lo, hi, 500, &mut seeded(1)).unwrap();
    assert_eq!(a, b);
    assert_eq!(a.len(), 500);
    let c = eng.canonical();
    assert!(a.iter().all(|&(i, j)| eng.in_range(c.p[i as usize] + c.q[j as usize], lo, hi)));
}

#[test]
fn randomized_equals_deterministic() {
    let mut rng = seeded(23);
    for round in 0..300 {
        let n = rng.random_range(1..=40);
        let coord = if round % 4 == 0 { 3 } else { 500 };
        let (p, q, l1, l2, obj) = general_instance(&mut rng, n, coord);
        let total = linear_values(&oracle_enumerate(&p, &q, &[l1, l2], 0), obj).len() as u64;
        if total == 0 {
            continue;
        }
        for _ in 0..3 {
            let k = rng.random_range(1..=total);
            let want = selection_2(&p, &q, &l1, &l2, obj, k, 0).unwrap();
            let (got, stats) = selection_2_randomized(&p, &q, &l1, &l2, obj, k, 0, round).unwrap();
            assert_eq!(got.value, want.value, "round={round} k={k}");
            let s = p[got.witness.0] + q[got.witness.1];
            assert!(l1.admits(s, 0) && l2.admits(s, 0));
            assert_eq!(obj.0 * s.x + obj.1 * s.y, got.value);
            assert!(stats.intervals.iter().all(|&(a, b)| a <= got.value && got.value <= b));
        }
    }
}

#[test]
fn case_a_band_reports_exactly() {
    // 0 <= x <= y: apex at height 0, so the band [2, 4] puts the helper
    // lines' meeting point on its far edge.
    let mut rng = seeded(24);
    let p: Vec<Point<i64>> = (0..30).map(|_| Point::new(rng.random_range(-3..=6), rng.random_range(-2..=5))).collect();
    let q: Vec<Point<i64>> = (0..30).map(|_| Point::new(rng.random_range(-3..=6), rng.random_range(-2..=5))).collect();
    let (l1, l2) = (Constraint::ge(1, 0, 0), Constraint::ge(-1, 1, 0));
    let canon = transform_two(&p, &q, &l1, &l2, (0, 1), 0).unwrap();
    let eng = RangeEngine::new(canon, 0);
    assert_eq!(eng.pieces(2, 4).1, ReportCase::A);
    assert_eq!(eng.pieces(-5, 4).1, ReportCase::C);
    let mut want: Vec<(u32, u32)> = oracle_enumerate(&p, &q, &[l1, l2], 0)
        .iter()
        .filter(|f| (2..=4).contains(&f.point.y))
        .map(|f| (f.p as u32, f.q as u32))
        .collect();
    let mut got = eng.report(2, 4);
    want.sort_unstable();
    got.sort_unstable();
    assert_eq!(got, want);
}

#[test]
fn weak_report_matches_strip_oracle() {
    use minksum_core::instances::random_points;
    use minksum_core::randomized::range_report_weak;
    let mut rng = seeded(24);
    for _ in 0..300 {
        let n = rng.random_range(1..=15);
        let (p, q) = (random_points(&mut rng, n, 20), random_points(&mut rng, n, 20));
        let (a, b) = (rng.random_range(-40..=40), rng.random_range(-40..=40));
        let (c, d) = (rng.random_range(-40..=40), rng.random_range(-40..=40));
        let (c1, c2, s_l, s_r) = (a.min(b), a.max(b), c.min(d), c.max(d));
        let mut want = Vec::new();
        for (i, &pp) in p.iter().enumerate() {
            for (j, &qq) in q.iter().enumerate() {
                let s = pp + qq;
                if s.x >= c1 && s.x <= c2 && s.y >= s_l && s.y <= s_r {
                    want.push((i as u32, j as u32));
                }
            }
        }
        let mut got = range_report_weak(&p, &q, (c1, c2), (s_l, s_r));
        got.sort_unstable();
        assert_eq!(got, want);
    }
}

#[test]
fn free_functions_agree_with_engine() {
    use minksum_core::randomized::{range_count, range_report, sample_feasible};
    let mut rng = seeded(25);
    for _ in 0..50 {
        let (p, q, l1, l2, obj) = general_instance(&mut rng, 10, 50);
        let vals = linear_values(&oracle_enumerate(&p, &q, &[l1, l2], 0), obj);
        let (lo, hi) = (-1_000_000, 1_000_000);
        assert_eq!(range_count(&p, &q, &l1, &l2, obj, (lo, hi), 0).unwrap(), vals.len() as u64);
        assert_eq!(range_report(&p, &q, &l1, &l2, obj, (lo, hi), 0).unwrap().len(), vals.len());
        let s = sample_feasible(&p, &q, &l1, &l2, obj, (lo, hi), 30, 9);
        if vals.is_empty() {
            assert!(s.is_err());
        } else {
            assert_eq!(s.unwrap(), sample_feasible(&p, &q, &l1, &l2, obj, (lo, hi), 30, 9).unwrap());
        }
    }
}
