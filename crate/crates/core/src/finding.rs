//! Finding the feasible value closest to a target.

use std::cmp::Ordering;

use crate::decomposition::{product_blocks, Decomposition, KeyedConstraint};
use crate::error::{Error, Result};
use crate::geometry::{transform_ratio, Bound, Constraint, Objective, Point};
use crate::scalar::{Frac, Scalar};
use crate::selection::Selected;
use crate::sorted_matrix::{keep_max, Entry, MatrixCollection};

/// Closest feasible value. `value` is `f` at the witness, `distance` is
/// `|f - delta|`, both exact.
#[derive(Clone, Copy, Debug)]
pub struct FindResult<T> {
    pub value: Frac<T>,
    pub distance: Frac<T>,
    pub witness: (usize, usize),
}

fn keyed<T: Scalar>(p: &[Point<T>], q: &[Point<T>], cons: &[Constraint<T>], eps: T) -> Vec<KeyedConstraint<T>> {
    cons.iter().map(|c| KeyedConstraint::from_constraint(c, p, q, eps)).collect()
}

fn check_inputs<T: Scalar>(p: &[Point<T>], q: &[Point<T>], cons: &[Constraint<T>], den: T) -> Result<()> {
    if cons.iter().any(|c| c.a.is_zero() && c.b.is_zero()) {
        return Err(Error::DegenerateConstraint);
    }
    if den <= T::ZERO {
        return Err(Error::InvalidInput("target denominator must be positive".into()));
    }
    if p.is_empty() || q.is_empty() {
        return Err(Error::Infeasible);
    }
    Ok(())
}

/// Sorted matrices of `p_vals[i] + q_vals[j]` over pairs admitted by every
/// keyed constraint.
pub(crate) fn feasible_matrices<T: Scalar>(p_vals: &[T], q_vals: &[T], cons: &[KeyedConstraint<T>]) -> MatrixCollection<T> {
    product_blocks(p_vals.len(), q_vals.len(), cons).to_matrices(p_vals, q_vals)
}

/// Largest entry not above `t`.
pub(crate) fn max_leq_in<T: Scalar>(m: &MatrixCollection<T>, t: T) -> Option<Entry<T>> {
    let mut best = None;
    for v in m.iter() {
        if let Some(e) = v.max_entry_at_most(t) {
            keep_max(&mut best, e);
        }
    }
    best
}

/// Largest entry of `p_vals[i] + q_vals[j]` not above `t` over pairs admitted
/// by every keyed constraint.
pub(crate) fn max_leq_keyed<T: Scalar>(
    p_vals: &[T],
    q_vals: &[T],
    cons: &[KeyedConstraint<T>],
    t: T,
) -> Option<Entry<T>> {
    max_leq_in(&feasible_matrices(p_vals, q_vals, cons), t)
}

/// Largest feasible value of `d*x + e*y` not above `t`, with a witness.
pub fn find_max_leq<T: Scalar>(
    p: &[Point<T>],
    q: &[Point<T>],
    constraints: &[Constraint<T>],
    (d, e): (T, T),
    t: T,
    eps: T,
) -> Result<Selected<T>> {
    Objective::Linear { d, e }.validate()?;
    check_inputs(p, q, constraints, T::ONE)?;
    let pv: Vec<T> = p.iter().map(|pt| d * pt.x + e * pt.y).collect();
    let qv: Vec<T> = q.iter().map(|pt| d * pt.x + e * pt.y).collect();
    max_leq_keyed(&pv, &qv, &keyed(p, q, constraints, eps), t)
        .map(|e| Selected { value: e.value, witness: (e.row_id as usize, e.col_id as usize) })
        .ok_or(Error::NoSuchValue)
}

fn keep_closer<T: Scalar>(best: &mut Option<FindResult<T>>, cand: FindResult<T>) {
    let better = match best {
        None => true,
        Some(b) => match cand.distance.cmp(&b.distance) {
            Ordering::Less => true,
            Ordering::Greater => false,
            Ordering::Equal => cand.witness < b.witness,
        },
    };
    if better {
        *best = Some(cand);
    }
}

/// Feasible value of `d*x + e*y` closest to `num / den`.
///
/// Values are shifted to `den*f - num`; in each product block the smallest
/// nonnegative and the largest negative sums are the only candidates.
pub fn find_linear<T: Scalar>(
    p: &[Point<T>],
    q: &[Point<T>],
    constraints: &[Constraint<T>],
    (d, e): (T, T),
    (num, den): (T, T),
    eps: T,
) -> Result<FindResult<T>> {
    Objective::Linear { d, e }.validate()?;
    check_inputs(p, q, constraints, den)?;
    let pv: Vec<T> = p.iter().map(|pt| den * (d * pt.x + e * pt.y) - num).collect();
    let qv: Vec<T> = q.iter().map(|pt| den * (d * pt.x + e * pt.y)).collect();
    let blocks = product_blocks(p.len(), q.len(), &keyed(p, q, constraints, eps));
    if blocks.is_empty() {
        return Err(Error::Infeasible);
    }
    let mats = blocks.to_matrices(&pv, &qv);
    let mut best = None;
    for m in mats.iter() {
        for ent in [m.min_entry_at_least(T::ZERO), m.max_entry_below(T::ZERO)].into_iter().flatten() {
            let (i, j) = (ent.row_id as usize, ent.col_id as usize);
            let s = p[i] + q[j];
            keep_closer(
                &mut best,
                FindResult {
                    value: Frac::new(d * s.x + e * s.y, T::ONE),
                    distance: Frac::new(ent.value.abs(), den),
                    witness: (i, j),
                },
            );
        }
    }
    best.ok_or(Error::Infeasible)
}

/// Convex hull in counterclockwise order without collinear points, starting
/// at the lowest (then leftmost) point. Items carry an id.
fn hull<T: Scalar>(mut pts: Vec<(Point<T>, u32)>) -> Vec<(Point<T>, u32)> {
    pts.sort_by(|a, b| a.0.y.total_cmp(&b.0.y).then(a.0.x.total_cmp(&b.0.x)).then(a.1.cmp(&b.1)));
    pts.dedup_by(|a, b| a.0 == b.0);
    if pts.len() <= 2 {
        return pts;
    }
    let turn = |o: &(Point<T>, u32), a: &(Point<T>, u32), b: &(Point<T>, u32)| {
        T::orient((o.0.x, o.0.y), (a.0.x, a.0.y), (b.0.x, b.0.y))
    };
    let mut lower: Vec<(Point<T>, u32)> = Vec::new();
    for pt in &pts {
        while lower.len() >= 2 && turn(&lower[lower.len() - 2], &lower[lower.len() - 1], pt) != Ordering::Greater {
            lower.pop();
        }
        lower.push(*pt);
    }
    let mut upper: Vec<(Point<T>, u32)> = Vec::new();
    for pt in pts.iter().rev() {
        while upper.len() >= 2 && turn(&upper[upper.len() - 2], &upper[upper.len() - 1], pt) != Ordering::Greater {
            upper.pop();
        }
        upper.push(*pt);
    }
    lower.pop();
    upper.pop();
    lower.extend(upper);
    lower
}

/// Vertices of the Minkowski sum of two hulls as `(point, p id, q id)`. Small
/// hulls fall back to all pairwise sums.
fn minkowski<T: Scalar>(a: &[(Point<T>, u32)], b: &[(Point<T>, u32)]) -> Vec<(Point<T>, u32, u32)> {
    if a.len() <= 2 || b.len() <= 2 {
        let mut out = Vec::with_capacity(a.len() * b.len());
        for x in a {
            for y in b {
                out.push((x.0 + y.0, x.1, y.1));
            }
        }
        return out;
    }
    let (n, m) = (a.len(), b.len());
    let (mut i, mut j) = (0, 0);
    let mut out = Vec::with_capacity(n + m);
    while i < n || j < m {
        let (x, y) = (a[i % n], b[j % m]);
        out.push((x.0 + y.0, x.1, y.1));
        if i == n {
            j += 1;
            continue;
        }
        if j == m {
            i += 1;
            continue;
        }
        let ea = (a[(i + 1) % n].0.x - x.0.x, a[(i + 1) % n].0.y - x.0.y);
        let eb = (b[(j + 1) % m].0.x - y.0.x, b[(j + 1) % m].0.y - y.0.y);
        match T::cross_sign(ea, eb) {
            Ordering::Greater => i += 1,
            Ordering::Less => j += 1,
            Ordering::Equal => {
                i += 1;
                j += 1;
            }
        }
    }
    out
}

/// Feasible value of `b*y / (a*x)` closest to `num / den`.
///
/// After shifting the target to zero the distance is `|y'| / |x'|`. Splitting
/// by quadrant makes it a linear-fractional function of fixed sign, which is
/// minimized at a vertex of the hull of each product block's Minkowski sum.
/// Points with `x = 0` are ignored; if they are the only feasible points the
/// result is [`Error::AllInfinite`].
pub fn find_ratio<T: Scalar>(
    p: &[Point<T>],
    q: &[Point<T>],
    constraints: &[Constraint<T>],
    a: T,
    b: T,
    (num, den): (T, T),
    eps: T,
) -> Result<FindResult<T>> {
    check_inputs(p, q, constraints, den)?;
    let canon = transform_ratio(p, q, constraints, a, b, (num, den))?;
    let scaled_eps = eps * den * den * (a * b).abs();
    let (cp, cq) = (&canon.p, &canon.q);
    let base = keyed(cp, cq, &canon.constraints, scaled_eps);
    let key = |f: fn(&Point<T>) -> T, bound: Bound<T>| {
        KeyedConstraint::new(cp.iter().map(f).collect(), cq.iter().map(f).collect(), bound)
    };
    let pos_x = key(|pt| pt.x, Bound::new(T::ZERO, true, T::ZERO));
    let neg_x = key(|pt| -pt.x, Bound::new(T::ZERO, true, T::ZERO));
    let pos_y = key(|pt| pt.y, Bound::new(T::ZERO, false, T::ZERO));
    let neg_y = key(|pt| -pt.y, Bound::new(T::ZERO, true, T::ZERO));
    let mut best: Option<(Point<T>, usize, usize)> = None;
    let closer = |s: Point<T>, w: (usize, usize), cur: &Option<(Point<T>, usize, usize)>| match cur {
        None => true,
        Some((b, bi, bj)) => {
            match T::cmp_frac(s.y.abs(), s.x.abs(), b.y.abs(), b.x.abs()) {
                Ordering::Less => true,
                Ordering::Greater => false,
                Ordering::Equal => w < (*bi, *bj),
            }
        }
    };
    for (kx, ky) in [(&pos_x, &pos_y), (&neg_x, &pos_y), (&pos_x, &neg_y), (&neg_x, &neg_y)] {
        let mut cons = base.clone();
        cons.push(kx.clone());
        cons.push(ky.clone());
        let blocks: Decomposition = product_blocks(cp.len(), cq.len(), &cons);
        for blk in blocks.blocks() {
            let hb = hull(blk.p.iter().map(|&i| (cp[i as usize], i)).collect());
            let hd = hull(blk.q.iter().map(|&j| (cq[j as usize], j)).collect());
            for (s, i, j) in minkowski(&hb, &hd) {
                let w = (i as usize, j as usize);
                if closer(s, w, &best) {
                    best = Some((s, w.0, w.1));
                }
            }
        }
    }
    let Some((s, i, j)) = best else {
        return if product_blocks(cp.len(), cq.len(), &base).is_empty() {
            Err(Error::Infeasible)
        } else {
            Err(Error::AllInfinite)
        };
    };
    let orig = p[i] + q[j];
    Ok(FindResult {
        value: Frac::new(b * orig.y, a * orig.x),
        distance: Frac::new(s.y.abs(), s.x.abs()),
        witness: (i, j),
    })
}
