use minksum_core::applications::lcss_matrices;
use minksum_core::decomposition::{construct_matrices, product_blocks, KeyedConstraint};
use minksum_core::geometry::{
    feasible_polygon, transform_one, transform_ratio, transform_two, Bound, Constraint, Point,
};
use minksum_core::oracle::{linear_values, oracle_enumerate, oracle_rank, oracle_segment_sums, oracle_select};
use minksum_core::randomized::{range_count, range_report};
use minksum_core::scalar::Frac;
use minksum_core::selection::{rank, select};
use minksum_core::sorted_matrix::{ImplicitSortedMatrix, MatrixCollection};
use proptest::prelude::*;

fn point() -> impl Strategy<Value = Point<i64>> {
    (-30i64..=30, -30i64..=30).prop_map(|(x, y)| Point::new(x, y))
}

fn points(max: usize) -> impl Strategy<Value = Vec<Point<i64>>> {
    prop::collection::vec(point(), 1..=max)
}

fn constraint() -> impl Strategy<Value = Constraint<i64>> {
    ((-4i64..=4, -4i64..=4).prop_filter("nonzero normal", |&(a, b)| a != 0 || b != 0), -40i64..=40, any::<bool>())
        .prop_map(|((a, b), c, strict)| Constraint::new(a, b, c, strict))
}

fn objective() -> impl Strategy<Value = (i64, i64)> {
    (-3i64..=3, -3i64..=3).prop_filter("nonzero objective", |&(d, e)| d != 0 || e != 0)
}

fn values(v: &[i64]) -> Vec<i64> {
    let mut v = v.to_vec();
    v.sort_unstable();
    v
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn transform_one_preserves_feasibility_and_objective(p in points(8), q in points(8), l in constraint(), obj in objective()) {
        let c = transform_one(&p, &q, &l, obj);
        for (i, &a) in p.iter().enumerate() {
            for (j, &b) in q.iter().enumerate() {
                let s = a + b;
                let t = c.p[i] + c.q[j];
                prop_assert_eq!(l.admits(s, 0), c.constraint.admits(t, 0));
                prop_assert_eq!(obj.0 * s.x + obj.1 * s.y, t.y);
            }
        }
    }

    #[test]
    fn transform_two_preserves_feasibility_and_objective(
        p in points(8), q in points(8), l1 in constraint(), l2 in constraint(), obj in objective()
    ) {
        let Ok(c) = transform_two(&p, &q, &l1, &l2, obj, 0) else { return Ok(()) };
        for (i, &a) in p.iter().enumerate() {
            for (j, &b) in q.iter().enumerate() {
                let s = a + b;
                let t = c.p[i] + c.q[j];
                let before = l1.admits(s, 0) && l2.admits(s, 0);
                let after = c.first.admits(t, 0) && c.second.admits(t, c.second_eps);
                prop_assert_eq!(before, after);
                prop_assert_eq!(obj.0 * s.x + obj.1 * s.y, t.y);
            }
        }
    }

    #[test]
    fn transform_ratio_shifts_the_objective(
        p in points(6), q in points(6), l in constraint(),
        a in prop::sample::select(vec![-2i64, -1, 1, 3]), b in prop::sample::select(vec![-2i64, 1, 2]),
        num in -5i64..=5, den in 1i64..=3,
    ) {
        let c = transform_ratio(&p, &q, &[l], a, b, (num, den)).unwrap();
        for (i, &pp) in p.iter().enumerate() {
            for (j, &qq) in q.iter().enumerate() {
                let s = pp + qq;
                let t = c.p[i] + c.q[j];
                prop_assert_eq!(l.admits(s, 0), c.constraints[0].admits(t, 0));
                if s.x != 0 {
                    let shifted = Frac::new(den * b * s.y - num * a * s.x, den * a * s.x);
                    prop_assert!(shifted == Frac::new(t.y, t.x));
                }
            }
        }
    }

    #[test]
    fn polygon_vertices_are_feasible_corners(cons in prop::collection::vec(constraint(), 2..=5)) {
        let Ok(poly) = feasible_polygon(&cons, Some([-500, 500, -500, 500])) else { return Ok(()) };
        for v in &poly.vertices {
            let on = poly.constraints.iter().filter(|c| {
                let r = c.a as f64 * v.x + c.b as f64 * v.y - c.c as f64;
                r.abs() <= 1e-7 * (1.0 + c.c.abs() as f64)
            }).count();
            prop_assert!(on >= 2);
            for c in &poly.constraints {
                prop_assert!(c.a as f64 * v.x + c.b as f64 * v.y >= c.c as f64 - 1e-7 * (1.0 + c.c.abs() as f64));
            }
        }
    }

    #[test]
    fn matrix_queries_match_enumeration(
        mats in prop::collection::vec((prop::collection::vec(-20i64..=20, 1..=8), prop::collection::vec(-20i64..=20, 1..=8)), 1..=4),
        t in -45i64..=45,
    ) {
        let mut coll = MatrixCollection::new();
        let mut all = Vec::new();
        for (r, c) in &mats {
            let m = ImplicitSortedMatrix::new(r.clone(), c.clone());
            let v = m.view();
            let ent: Vec<i64> = r.iter().flat_map(|&x| c.iter().map(move |&y| x + y)).collect();
            prop_assert_eq!(v.count_greater(t), ent.iter().filter(|&&x| x > t).count() as u64);
            prop_assert_eq!(v.min_entry_at_least(t).map(|e| e.value), ent.iter().copied().filter(|&x| x >= t).min());
            prop_assert_eq!(v.max_entry_below(t).map(|e| e.value), ent.iter().copied().filter(|&x| x < t).max());
            let (_, probes) = v.count_admitted_probed(&Bound::greater_than(t));
            prop_assert!(probes <= r.len() + c.len());
            all.extend(ent);
            coll.push_matrix(&m);
        }
        let sorted = values(&all);
        prop_assert_eq!(coll.rank(t), all.iter().filter(|&&x| x > t).count() as u64 + 1);
        let mut rng = minksum_core::rng::seeded(1);
        for k in 1..=all.len() as u64 {
            let v = coll.select_kth(k, &mut rng).unwrap().value;
            prop_assert_eq!(v, sorted[sorted.len() - k as usize]);
            prop_assert!(coll.rank(v) <= k);
            prop_assert!(all.iter().filter(|&&x| x >= v).count() as u64 >= k);
        }
    }

    #[test]
    fn blocks_cover_feasible_pairs_exactly(p in points(10), q in points(10), cons in prop::collection::vec(constraint(), 0..=4)) {
        let keyed: Vec<KeyedConstraint<i64>> = cons.iter().map(|c| KeyedConstraint::from_constraint(c, &p, &q, 0)).collect();
        let d = product_blocks(p.len(), q.len(), &keyed);
        let mut got: Vec<(u32, u32)> = d.blocks().flat_map(|b| b.p.iter().flat_map(move |&i| b.q.iter().map(move |&j| (i, j)))).collect();
        got.sort_unstable();
        let want: Vec<(u32, u32)> = oracle_enumerate(&p, &q, &cons, 0).iter().map(|f| (f.p as u32, f.q as u32)).collect();
        prop_assert_eq!(got, want);
    }

    #[test]
    fn construct_matrices_agrees_with_blocks(p in points(12), q in points(12), l in constraint(), obj in objective()) {
        let c = transform_one(&p, &q, &l, obj);
        let px: Vec<i64> = c.p.iter().map(|pt| pt.x).collect();
        let qx: Vec<i64> = c.q.iter().map(|pt| pt.x).collect();
        let py: Vec<i64> = c.p.iter().map(|pt| pt.y).collect();
        let qy: Vec<i64> = c.q.iter().map(|pt| pt.y).collect();
        let bound = c.constraint.bound(0);
        let a: Vec<i64> = construct_matrices(&px, &py, &qx, &qy, bound).enumerate().iter().map(|e| e.value).collect();
        let keyed = KeyedConstraint::new(px, qx, bound);
        let b: Vec<i64> = product_blocks(p.len(), q.len(), &[keyed]).to_matrices(&py, &qy).enumerate().iter().map(|e| e.value).collect();
        prop_assert_eq!(values(&a), values(&b));
    }

    #[test]
    fn select_and_rank_are_dual(p in points(7), q in points(7), cons in prop::collection::vec(constraint(), 0..=3), obj in objective()) {
        let vals = linear_values(&oracle_enumerate(&p, &q, &cons, 0), obj);
        for k in 1..=vals.len() as u64 {
            let v = select(&p, &q, &cons, obj, k, 0).unwrap().value;
            prop_assert_eq!(v, oracle_select(&vals, k).unwrap().value);
            let r = rank(&p, &q, &cons, obj, v, 0).unwrap().rank;
            prop_assert!(r <= k);
            prop_assert_eq!(r, oracle_rank(&vals, v));
            prop_assert!(vals.iter().filter(|x| x.0 >= v).count() as u64 >= k);
        }
    }

    #[test]
    fn range_count_matches_report_and_oracle(
        p in points(9), q in points(9), l1 in constraint(), l2 in constraint(), obj in objective(), a in -80i64..=80, b in -80i64..=80
    ) {
        let (s_l, s_r) = (a.min(b), a.max(b));
        let Ok(n) = range_count(&p, &q, &l1, &l2, obj, (s_l, s_r), 0) else { return Ok(()) };
        let rep = range_report(&p, &q, &l1, &l2, obj, (s_l, s_r), 0).unwrap();
        let want = linear_values(&oracle_enumerate(&p, &q, &[l1, l2], 0), obj).iter().filter(|v| v.0 >= s_l && v.0 <= s_r).count();
        prop_assert_eq!(n, rep.len() as u64);
        prop_assert_eq!(n, want as u64);
    }

    #[test]
    fn lcss_reduction_keeps_segment_sums(s in prop::collection::vec(-9i64..=9, 1..=20), lu in (1usize..=20, 1usize..=20)) {
        let n = s.len();
        let (l, u) = ((lu.0 - 1) % n + 1, (lu.1 - 1) % n + 1);
        let (l, u) = (l.min(u), l.max(u));
        let got: Vec<i64> = lcss_matrices(&s, l, u).unwrap().enumerate().iter().map(|e| e.value).collect();
        let want: Vec<i64> = oracle_segment_sums(&s, l, u).iter().map(|v| v.0).collect();
        prop_assert_eq!(values(&got), values(&want));
    }

    #[test]
    fn oracle_is_self_consistent(p in points(6), q in points(6), cons in prop::collection::vec(constraint(), 0..=2), obj in objective()) {
        let vals = linear_values(&oracle_enumerate(&p, &q, &cons, 0), obj);
        for k in 1..=vals.len() as u64 {
            prop_assert!(oracle_rank(&vals, oracle_select(&vals, k).unwrap().value) <= k);
        }
    }
}
