//! Exhaustive `O(n^2)` reference answers.

use std::cmp::Ordering;

use crate::error::{Error, Result};
use crate::finding::FindResult;
use crate::geometry::{Constraint, Objective, Point};
use crate::scalar::{Frac, Scalar};
use crate::selection::Selected;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FeasiblePair<T> {
    pub p: usize,
    pub q: usize,
    pub point: Point<T>,
}

/// Every pair whose sum satisfies all constraints, in `(p, q)` order.
pub fn oracle_enumerate<T: Scalar>(
    p: &[Point<T>],
    q: &[Point<T>],
    constraints: &[Constraint<T>],
    eps: T,
) -> Vec<FeasiblePair<T>> {
    let mut out = Vec::new();
    for (i, &a) in p.iter().enumerate() {
        for (j, &b) in q.iter().enumerate() {
            let s = a + b;
            if constraints.iter().all(|c| c.admits(s, eps)) {
                out.push(FeasiblePair { p: i, q: j, point: s });
            }
        }
    }
    out
}

/// `(value, p, q)` for a linear objective.
pub fn linear_values<T: Scalar>(pairs: &[FeasiblePair<T>], (d, e): (T, T)) -> Vec<(T, usize, usize)> {
    pairs.iter().map(|f| (d * f.point.x + e * f.point.y, f.p, f.q)).collect()
}

fn sorted_desc<T: Scalar>(values: &[(T, usize, usize)]) -> Vec<(T, usize, usize)> {
    let mut v = values.to_vec();
    v.sort_by(|a, b| b.0.total_cmp(&a.0).then((a.1, a.2).cmp(&(b.1, b.2))));
    v
}

/// `k`-th largest value (1-based, with multiplicity).
pub fn oracle_select<T: Scalar>(values: &[(T, usize, usize)], k: u64) -> Result<Selected<T>> {
    if values.is_empty() {
        return Err(Error::Infeasible);
    }
    if k == 0 || k > values.len() as u64 {
        return Err(Error::RankOutOfRange { k, count: values.len() as u64 });
    }
    let v = sorted_desc(values)[(k - 1) as usize];
    Ok(Selected { value: v.0, witness: (v.1, v.2) })
}

/// Count of values strictly greater than `t`, plus one.
pub fn oracle_rank<T: Scalar>(values: &[(T, usize, usize)], t: T) -> u64 {
    values.iter().filter(|v| v.0 > t).count() as u64 + 1
}

/// Largest value not above `t`.
pub fn oracle_max_leq<T: Scalar>(values: &[(T, usize, usize)], t: T) -> Result<Selected<T>> {
    sorted_desc(values)
        .into_iter()
        .find(|v| v.0 <= t)
        .map(|v| Selected { value: v.0, witness: (v.1, v.2) })
        .ok_or(Error::NoSuchValue)
}

fn better<T: Scalar>(cand: &FindResult<T>, best: &Option<FindResult<T>>) -> bool {
    match best {
        None => true,
        Some(b) => match cand.distance.cmp(&b.distance) {
            Ordering::Less => true,
            Ordering::Greater => false,
            Ordering::Equal => cand.witness < b.witness,
        },
    }
}

/// Minimizes `|f - delta|` with `delta = num / den`, `den > 0`. Ratio
/// objectives skip points with `x = 0`; if only such points are feasible the
/// result is [`Error::AllInfinite`].
pub fn oracle_find<T: Scalar>(
    pairs: &[FeasiblePair<T>],
    objective: &Objective<T>,
    (num, den): (T, T),
) -> Result<FindResult<T>> {
    objective.validate()?;
    if pairs.is_empty() {
        return Err(Error::Infeasible);
    }
    let mut best: Option<FindResult<T>> = None;
    for f in pairs {
        let cand = match *objective {
            Objective::Linear { d, e } => {
                let v = d * f.point.x + e * f.point.y;
                let diff = den * v - num;
                FindResult {
                    value: Frac::new(v, T::ONE),
                    distance: Frac::new(diff.abs(), den),
                    witness: (f.p, f.q),
                }
            }
            Objective::Ratio { a, b } => {
                let ax = a * f.point.x;
                if ax.is_zero() {
                    continue;
                }
                let by = b * f.point.y;
                let diff = den * by - num * ax;
                FindResult {
                    value: Frac::new(by, ax),
                    distance: Frac::new(diff.abs(), (den * ax).abs()),
                    witness: (f.p, f.q),
                }
            }
        };
        if better(&cand, &best) {
            best = Some(cand);
        }
    }
    best.ok_or(Error::AllInfinite)
}

/// Segment `(i, j)` (1-based, inclusive) with its sum, for every segment whose
/// length lies in `[l, u]`.
pub fn oracle_segment_sums<T: Scalar>(s: &[T], l: usize, u: usize) -> Vec<(T, usize, usize)> {
    let mut out = Vec::new();
    for i in 0..s.len() {
        let mut acc = T::ZERO;
        for j in i..s.len() {
            acc = acc + s[j];
            let len = j - i + 1;
            if len >= l && len <= u {
                out.push((acc, i + 1, j + 1));
            }
        }
    }
    out
}

/// Segment `(i, j)` minimizing `|density - delta|` among segments with total
/// width in `[l, u]`. Returns `(i, j, sum, width, distance)`.
#[allow(clippy::type_complexity)]
pub fn oracle_density<T: Scalar>(
    ws: &[(T, T)],
    l: T,
    u: T,
    (num, den): (T, T),
) -> Result<(usize, usize, T, T, Frac<T>)> {
    let mut best: Option<(usize, usize, T, T, Frac<T>)> = None;
    for i in 0..ws.len() {
        let (mut s, mut w) = (T::ZERO, T::ZERO);
        for j in i..ws.len() {
            s = s + ws[j].0;
            w = w + ws[j].1;
            if w < l || w > u {
                continue;
            }
            let dist = Frac::new((den * s - num * w).abs(), den * w);
            let take = match &best {
                None => true,
                Some(b) => dist.cmp(&b.4) == Ordering::Less,
            };
            if take {
                best = Some((i + 1, j + 1, s, w, dist));
            }
        }
    }
    best.ok_or(Error::Infeasible)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn inst() -> (Vec<Point<i64>>, Vec<Point<i64>>) {
        (vec![Point::new(1, 1), Point::new(2, 3)], vec![Point::new(0, 2), Point::new(3, -1)])
    }

    #[test]
    fn enumerate_small() {
        let (p, q) = inst();
        assert_eq!(oracle_enumerate(&p, &q, &[], 0).len(), 4);
        let f = oracle_enumerate(&p, &q, &[Constraint::ge(1, 0, 3)], 0);
        let pts: Vec<Point<i64>> = f.iter().map(|f| f.point).collect();
        assert_eq!(pts, vec![Point::new(4, 0), Point::new(5, 2)]);
        let none = oracle_enumerate(&p, &q, &[Constraint::ge(1, 0, 3), Constraint::ge(-1, 0, -2)], 0);
        assert!(none.is_empty());
    }

    #[test]
    fn select_rank_find_small() {
        let (p, q) = inst();
        let f = oracle_enumerate(&p, &q, &[Constraint::ge(1, 0, 3)], 0);
        let vals = linear_values(&f, (0, 1));
        assert_eq!(oracle_select(&vals, 1).unwrap().value, 2);
        assert_eq!(oracle_select(&vals, 2).unwrap().value, 0);
        assert_eq!(oracle_rank(&vals, 1), 2);
        let all = oracle_enumerate(&p, &q, &[], 0);
        let r = oracle_find(&all, &Objective::y(), (16, 10)).unwrap();
        assert!(r.value == Frac::new(2, 1));
        assert!(r.distance == Frac::new(4, 10));
    }

    #[test]
    fn segment_oracles() {
        let sums: Vec<i64> = oracle_segment_sums(&[3i64, -1, 2], 1, 2).iter().map(|s| s.0).collect();
        let mut s = sums.clone();
        s.sort_unstable();
        assert_eq!(s, vec![-1, 1, 2, 2, 3]);
        let (i, j, _, _, d) = oracle_density(&[(2i64, 1), (-1, 1), (3, 1)], 1, 2, (1, 1)).unwrap();
        assert_eq!((i, j), (2, 3));
        assert!(d == Frac::new(0, 1));
    }
}
