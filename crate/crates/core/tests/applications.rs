use minksum_core::applications::{density_find, lcss_select, sum_select};
use minksum_core::error::Error;
use minksum_core::instances::random_sequence;
use minksum_core::oracle::{oracle_density, oracle_segment_sums};
use minksum_core::rng::seeded;
use minksum_core::scalar::Frac;
use rand::Rng;

fn sorted_desc(mut v: Vec<(i64, usize, usize)>) -> Vec<(i64, usize, usize)> {
    v.sort_by(|a, b| b.0.cmp(&a.0).then((a.1, a.2).cmp(&(b.1, b.2))));
    v
}

#[test]
fn lcss_matches_brute_force() {
    let mut rng = seeded(41);
    for round in 0..250 {
        let n = rng.random_range(1..=24);
        let range = if round % 3 == 0 { 2 } else { 50 };
        let s = random_sequence(&mut rng, n, range);
        let l = rng.random_range(1..=n);
        let u = rng.random_range(l..=n);
        let want = sorted_desc(oracle_segment_sums(&s, l, u));
        for (k, &(v, i, j)) in want.iter().enumerate() {
            let got = lcss_select(&s, l, u, k as u64 + 1).unwrap();
            assert_eq!(got.sum, v, "s={s:?} l={l} u={u} k={}", k + 1);
            let first = want.iter().find(|w| w.0 == v).unwrap();
            assert_eq!((got.i, got.j), (first.1, first.2));
            assert!(j - i + 1 >= l);
        }
        assert!(matches!(lcss_select(&s, l, u, want.len() as u64 + 1), Err(Error::RankOutOfRange { .. })));
    }
}

#[test]
fn sum_select_is_unrestricted_lcss() {
    let mut rng = seeded(42);
    for _ in 0..100 {
        let n = rng.random_range(1..=20);
        let s = random_sequence(&mut rng, n, 30);
        let want = sorted_desc(oracle_segment_sums(&s, 1, n));
        let k = rng.random_range(1..=want.len());
        assert_eq!(sum_select(&s, k as u64).unwrap().sum, want[k - 1].0);
    }
}

#[test]
fn lcss_rejects_bad_bounds() {
    let s = [1i64, 2, 3];
    assert!(lcss_select(&s, 0, 2, 1).is_err());
    assert!(lcss_select(&s, 2, 1, 1).is_err());
    assert!(lcss_select(&s, 1, 4, 1).is_err());
    assert!(lcss_select::<i64>(&[], 1, 1, 1).is_err());
}

#[test]
fn density_matches_brute_force() {
    let mut rng = seeded(43);
    for round in 0..300 {
        let n = rng.random_range(1..=20);
        let ws: Vec<(i64, i64)> =
            (0..n).map(|_| (rng.random_range(-20..=20), rng.random_range(1..=if round % 2 == 0 { 1 } else { 6 }))).collect();
        let total: i64 = ws.iter().map(|w| w.1).sum();
        let l = rng.random_range(1..=total);
        let u = rng.random_range(l..=total);
        let delta = (rng.random_range(-40..=40), rng.random_range(1..=4));
        let got = density_find(&ws, l, u, delta);
        match oracle_density(&ws, l, u, delta) {
            Ok((_, _, _, _, dist)) => {
                let g = got.unwrap();
                assert!(g.distance == dist, "ws={ws:?} l={l} u={u} delta={delta:?}");
                let seg = &ws[g.i - 1..g.j];
                let (ss, sw): (i64, i64) = (seg.iter().map(|w| w.0).sum(), seg.iter().map(|w| w.1).sum());
                assert_eq!((ss, sw), (g.sum, g.width));
                assert!(sw >= l && sw <= u);
                assert!(g.density == Frac::new(ss, sw));
            }
            Err(_) => assert!(got.is_err()),
        }
    }
}

#[test]
fn float_mode_agrees_with_integers() {
    let s = [2.5f64, -1.0, 4.0, 0.5];
    let r = lcss_select(&s, 2, 3, 1).unwrap();
    assert_eq!((r.sum, r.i, r.j), (5.5, 1, 3));
    let d = density_find(&[(1.0f64, 0.5), (3.0, 1.5)], 0.5, 2.0, (2.0, 1.0)).unwrap();
    assert_eq!((d.i, d.j), (1, 1));
    assert!(d.distance.to_f64().abs() < 1e-12);
}
