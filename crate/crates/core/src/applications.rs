//! Segment problems on sequences, solved through prefix-sum point sets.
//!
//! Prefix points `p_j = (j, S_j)` and `q_i = (-i, -S_i)` sum to
//! `(j - i, sum of s_{i+1..=j})`, so segments with length in `[l, u]` are the
//! pairs in the strip `l <= x <= u`.

use std::cmp::Ordering;

use crate::decomposition::{construct_matrices_into, lcss_blocks};
use crate::error::{Error, Result};
use crate::finding::find_ratio;
use crate::geometry::{Bound, Constraint, Point};
use crate::rng::{seeded, DEFAULT_SEED};
use crate::scalar::{Frac, Scalar};
use crate::selection::check_rank;
use crate::sorted_matrix::MatrixCollection;

/// Segment `s_i..=s_j` (1-based, inclusive) and its sum.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SegmentSum<T> {
    pub sum: T,
    pub i: usize,
    pub j: usize,
}

/// Segment `i..=j` whose density is closest to the target.
#[derive(Clone, Copy, Debug)]
pub struct DensitySegment<T> {
    pub i: usize,
    pub j: usize,
    pub sum: T,
    pub width: T,
    pub density: Frac<T>,
    pub distance: Frac<T>,
}

fn prefix<T: Scalar>(s: &[T]) -> Vec<T> {
    let mut out = Vec::with_capacity(s.len() + 1);
    out.push(T::ZERO);
    for &v in s {
        out.push(*out.last().unwrap() + v);
    }
    out
}

/// Sorted matrices holding every segment sum with length in `[l, u]`; rows
/// are segment ends `j`, columns are `i` for segments `i+1..=j`.
pub fn lcss_matrices<T: Scalar>(s: &[T], l: usize, u: usize) -> Result<MatrixCollection<T>> {
    let n = s.len();
    if s.is_empty() {
        return Err(Error::InvalidInput("sequence is empty".into()));
    }
    if l == 0 || l > u || u > n {
        return Err(Error::InvalidInput(format!("need 1 <= l <= u <= n, got l={l}, u={u}, n={n}")));
    }
    let pre = prefix(s);
    let neg: Vec<T> = pre.iter().map(|&v| -v).collect();
    let mut out = MatrixCollection::new();
    if l == u {
        for j in l..=n {
            out.push_sorted([(pre[j], j as u32)], [(neg[j - l], (j - l) as u32)]);
        }
        return Ok(out);
    }
    let jk: Vec<T> = (0..=n).map(|j| T::from_i64(j as i64)).collect();
    let ik: Vec<T> = (0..=n).map(|i| T::from_i64(-(i as i64))).collect();
    let neg_jk: Vec<T> = jk.iter().map(|&v| -v).collect();
    let neg_ik: Vec<T> = ik.iter().map(|&v| -v).collect();
    let (lo, hi) = (T::from_i64(l as i64), T::from_i64(u as i64));
    for w in lcss_blocks(n, l, u)? {
        let p: Vec<u32> = w.p.clone().map(|j| j as u32).collect();
        let ql: Vec<u32> = w.q_lower.clone().map(|i| i as u32).collect();
        let qu: Vec<u32> = w.q_upper.clone().map(|i| i as u32).collect();
        construct_matrices_into(&mut out, &p, &ql, &jk, &pre, &ik, &neg, Bound::at_least(lo));
        construct_matrices_into(&mut out, &p, &qu, &neg_jk, &pre, &neg_ik, &neg, Bound::at_least(-hi));
    }
    Ok(out)
}

/// Smallest `(i, j)` with `S_j - S_i == v` and `l <= j - i <= u`.
fn first_segment<T: Scalar>(pre: &[T], l: usize, u: usize, v: T) -> Option<(usize, usize)> {
    let mut order: Vec<usize> = (0..pre.len()).collect();
    order.sort_by(|&a, &b| pre[a].total_cmp(&pre[b]).then(a.cmp(&b)));
    let mut best: Option<(usize, usize)> = None;
    for j in l..pre.len() {
        let target = pre[j] - v;
        let lo_i = j.saturating_sub(u);
        let key = |&a: &usize, i: usize| pre[a].total_cmp(&target).then(a.cmp(&i));
        let start = order.partition_point(|a| key(a, lo_i) == Ordering::Less);
        if let Some(&i) = order.get(start) {
            if pre[i] == target && i + l <= j && best.is_none_or(|b| (i, j) < b) {
                best = Some((i, j));
            }
        }
    }
    best
}

/// `k`-th largest segment sum among segments with length in `[l, u]`.
pub fn lcss_select<T: Scalar>(s: &[T], l: usize, u: usize, k: u64) -> Result<SegmentSum<T>> {
    let m = lcss_matrices(s, l, u)?;
    check_rank(k, m.total_entries())?;
    let e = m.select_kth(k, &mut seeded(DEFAULT_SEED))?;
    let (i, j) = first_segment(&prefix(s), l, u, e.value).unwrap_or((e.col_id as usize, e.row_id as usize));
    Ok(SegmentSum { sum: e.value, i: i + 1, j })
}

/// `k`-th largest sum over all segments.
pub fn sum_select<T: Scalar>(s: &[T], k: u64) -> Result<SegmentSum<T>> {
    lcss_select(s, 1, s.len(), k)
}

/// Segment with total width in `[l, u]` whose density `sum / width` is
/// closest to `num / den`.
pub fn density_find<T: Scalar>(ws: &[(T, T)], l: T, u: T, (num, den): (T, T)) -> Result<DensitySegment<T>> {
    if ws.is_empty() {
        return Err(Error::InvalidInput("sequence is empty".into()));
    }
    if let Some(pos) = ws.iter().position(|&(_, w)| w <= T::ZERO) {
        return Err(Error::InvalidInput(format!("width at position {} must be positive", pos + 1)));
    }
    if l <= T::ZERO || l > u {
        return Err(Error::InvalidInput(format!("need 0 < l <= u, got l={l}, u={u}")));
    }
    let (mut w_acc, mut s_acc) = (T::ZERO, T::ZERO);
    let mut p = vec![Point::new(T::ZERO, T::ZERO)];
    for &(sv, wv) in ws {
        s_acc = s_acc + sv;
        w_acc = w_acc + wv;
        p.push(Point::new(w_acc, s_acc));
    }
    let q: Vec<Point<T>> = p.iter().map(|pt| Point::new(-pt.x, -pt.y)).collect();
    let cons = [Constraint::ge(T::ONE, T::ZERO, l), Constraint::ge(-T::ONE, T::ZERO, -u)];
    let r = find_ratio(&p, &q, &cons, T::ONE, T::ONE, (num, den), T::ZERO)?;
    let (j, i) = r.witness;
    let seg = p[j] + q[i];
    Ok(DensitySegment { i: i + 1, j, sum: seg.y, width: seg.x, density: r.value, distance: r.distance })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lcss_small() {
        let s = [3i64, -1, 2];
        let sums: Vec<i64> = (1..=5).map(|k| lcss_select(&s, 1, 2, k).unwrap().sum).collect();
        assert_eq!(sums, vec![3, 2, 2, 1, -1]);
        let r = lcss_select(&s, 1, 2, 2).unwrap();
        assert_eq!((r.i, r.j), (1, 2));
        assert_eq!(lcss_select(&s, 1, 2, 6).unwrap_err(), Error::RankOutOfRange { k: 6, count: 5 });
    }

    #[test]
    fn sum_select_small() {
        assert_eq!(sum_select(&[1i64, -2, 3], 1).unwrap().sum, 3);
        assert_eq!(sum_select(&[-5i64, -2, -3], 1).unwrap().sum, -2);
        assert_eq!(sum_select(&[7i64], 1).unwrap(), SegmentSum { sum: 7, i: 1, j: 1 });
    }

    #[test]
    fn density_small() {
        let r = density_find(&[(2i64, 1), (-1, 1), (3, 1)], 1, 2, (1, 1)).unwrap();
        assert_eq!((r.i, r.j), (2, 3));
        assert!(r.density == Frac::new(1, 1));
        assert!(r.distance == Frac::new(0, 1));
        let one = density_find(&[(5i64, 2)], 1, 3, (0, 1)).unwrap();
        assert!(one.density == Frac::new(5, 2));
        assert!(density_find(&[(1i64, 0)], 1, 2, (0, 1)).is_err());
    }
}
