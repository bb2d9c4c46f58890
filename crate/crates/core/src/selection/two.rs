use std::cmp::Ordering;
use std::sync::OnceLock;

use rand::Rng;

use crate::decomposition::{construct_matrices, product_blocks, strip_matrices, KeyedConstraint};
use crate::error::{Error, Result};
use crate::finding::{feasible_matrices, max_leq_in};
use crate::geometry::{
    constraints_parallel, transform_parallel, transform_two, Bound, Constraint, ParallelForm, Point, TwoCanonical,
};
use crate::rng::{seeded, DEFAULT_SEED};
use crate::scalar::Scalar;
use crate::sorted_matrix::MatrixCollection;

use super::{check_rank, select_in, validate, RankBreakdown, RankResult, Selected};

/// Exact-arithmetic counting structures for `x >= c1`, `a*x + b*y >= c2`.
#[derive(Clone, Debug)]
struct Exact<T> {
    /// Values `y` over pairs violating the first constraint.
    not_first: MatrixCollection<T>,
    /// Values `y` over pairs violating the second constraint.
    not_second: MatrixCollection<T>,
    /// Pairs satisfying the first constraint but not the second.
    first_only: u64,
    /// Pairs satisfying the second constraint but not the first.
    second_only: u64,
    /// Pairs violating both.
    neither: u64,
    /// `c2 - a*c1`; the boundary lines cross at height `y0 = y0_num / b`.
    y0_num: T,
}

/// Two non-parallel constraints in canonical form.
///
/// For a threshold `t` the feasible count above `t` follows from the
/// unconstrained count and the counts violating each constraint; which terms
/// are needed depends on the signs of `a`, `b` and on which side of `y0` the
/// threshold lies. Inexact scalars count over product blocks instead.
#[derive(Clone, Debug)]
pub struct GeneralTwo<T> {
    canon: TwoCanonical<T>,
    keyed: [KeyedConstraint<T>; 2],
    p_vals: Vec<T>,
    q_vals: Vec<T>,
    all: MatrixCollection<T>,
    feasible: u64,
    exact: Option<Exact<T>>,
    blocks: Option<MatrixCollection<T>>,
    /// Feasible pairs as product blocks, built on the first witness query.
    witness: OnceLock<MatrixCollection<T>>,
}

impl<T: Scalar> GeneralTwo<T> {
    pub fn new(canon: TwoCanonical<T>, eps: T) -> Self {
        let (p, q) = (&canon.p, &canon.q);
        let l1 = KeyedConstraint::from_constraint(&canon.first, p, q, eps);
        let l2 = KeyedConstraint::from_constraint(&canon.second, p, q, canon.second_eps);
        let p_vals: Vec<T> = p.iter().map(|pt| pt.y).collect();
        let q_vals: Vec<T> = q.iter().map(|pt| pt.y).collect();
        let p_ids: Vec<u32> = (0..p.len() as u32).collect();
        let q_ids: Vec<u32> = (0..q.len() as u32).collect();
        let mut all = MatrixCollection::new();
        all.push_unsorted(&p_ids, &p_vals, &q_ids, &q_vals);
        let (exact, blocks, feasible) = if T::EXACT && eps.is_zero() && canon.second_eps.is_zero() {
            let px: Vec<T> = p.iter().map(|pt| pt.x).collect();
            let qx: Vec<T> = q.iter().map(|pt| pt.x).collect();
            let (n1, n2) = (l1.complement(), l2.complement());
            let not_first = construct_matrices(&n1.p_keys, &p_vals, &n1.q_keys, &q_vals, n1.bound);
            let not_second = construct_matrices(&n2.p_keys, &p_vals, &n2.q_keys, &q_vals, n2.bound);
            let second_x = construct_matrices(&l2.p_keys, &px, &l2.q_keys, &qx, l2.bound);
            let not_second_x = construct_matrices(&n2.p_keys, &px, &n2.q_keys, &qx, n2.bound);
            let feasible = second_x.count_admitted(&l1.bound);
            let first_only = not_second_x.count_admitted(&l1.bound);
            let (a, c1, c2) = (canon.second.a, canon.first.c, canon.second.c);
            let ex = Exact {
                not_first,
                not_second,
                first_only,
                second_only: second_x.total_entries() - feasible,
                neither: not_second_x.total_entries() - first_only,
                y0_num: c2 - a * c1,
            };
            (Some(ex), None, feasible)
        } else {
            let m = product_blocks(p.len(), q.len(), &[l1.clone(), l2.clone()]).to_matrices(&p_vals, &q_vals);
            let feasible = m.total_entries();
            (None, Some(m), feasible)
        };
        Self { canon, keyed: [l1, l2], p_vals, q_vals, all, feasible, exact, blocks, witness: OnceLock::new() }
    }

    pub fn canonical(&self) -> &TwoCanonical<T> {
        &self.canon
    }

    pub fn feasible_count(&self) -> u64 {
        self.feasible
    }

    /// Whether `t < y0`.
    fn below_crossing(&self, ex: &Exact<T>, t: T) -> bool {
        let b = self.canon.second.b;
        let ord = T::cmp_products(b, t, ex.y0_num, T::ONE);
        if b < T::ZERO {
            ord == Ordering::Greater
        } else {
            ord == Ordering::Less
        }
    }

    /// Feasible pairs with value strictly above `t`.
    pub fn count_above(&self, t: T) -> u64 {
        let Some(ex) = &self.exact else {
            return self.blocks.as_ref().map_or(0, |m| m.count_greater(t));
        };
        let r_t = || self.all.count_greater(t);
        let r1 = || ex.not_first.count_greater(t);
        let r2 = || ex.not_second.count_greater(t);
        let (a, b) = (self.canon.second.a, self.canon.second.b);
        let below = self.below_crossing(ex, t);
        match (b < T::ZERO, a > T::ZERO, below) {
            (true, false, false) => 0,
            (true, false, true) => r_t() + ex.neither - r1() - r2(),
            (true, true, false) => r_t() - r2(),
            (true, true, true) => r_t() - r1() - ex.first_only,
            (false, false, false) => r_t() - r1() - r2(),
            (false, false, true) => self.feasible,
            (false, true, false) => r_t() - r1(),
            (false, true, true) => r_t() - r2() - ex.second_only,
        }
    }

    /// The four inclusion-exclusion terms at `t`, in input constraint order;
    /// `r3` is derived from the feasible count.
    pub fn breakdown(&self, t: T) -> RankBreakdown {
        let count = self.count_above(t);
        let r_t = self.all.count_greater(t);
        let (r1, r2) = match &self.exact {
            Some(ex) => (ex.not_first.count_greater(t), ex.not_second.count_greater(t)),
            None => {
                let m = |k: &KeyedConstraint<T>| {
                    product_blocks(self.p_vals.len(), self.q_vals.len(), &[k.complement()])
                        .to_matrices(&self.p_vals, &self.q_vals)
                        .count_greater(t)
                };
                (m(&self.keyed[0]), m(&self.keyed[1]))
            }
        };
        let r3 = count + r1 + r2 - r_t;
        let (r1, r2) = if self.canon.swapped { (r2, r1) } else { (r1, r2) };
        RankBreakdown { r_t, r1, r2, r3 }
    }

    /// `k`-th largest feasible value. Pivots are random entries of the
    /// unconstrained sum matrix inside the current value bracket; each pivot
    /// is ranked with [`Self::count_above`] and the bracket shrinks per row
    /// with a staircase walk.
    pub fn select_value(&self, k: u64) -> Result<T> {
        check_rank(k, self.feasible)?;
        let mut rows = self.p_vals.clone();
        let mut cols = self.q_vals.clone();
        rows.sort_by(|a, b| a.total_cmp(b));
        cols.sort_by(|a, b| a.total_cmp(b));
        let mut lo = vec![0usize; rows.len()];
        let mut hi = vec![cols.len(); rows.len()];
        let mut rng = seeded(DEFAULT_SEED);
        loop {
            let total: u64 = lo.iter().zip(&hi).map(|(&l, &h)| h.saturating_sub(l) as u64).sum();
            if total == 0 {
                return Err(Error::InvalidInput("rank search left its bracket".into()));
            }
            let mut r = rng.random_range(0..total);
            let mut row = 0;
            while r >= hi[row].saturating_sub(lo[row]) as u64 {
                r -= hi[row].saturating_sub(lo[row]) as u64;
                row += 1;
            }
            let v = rows[row] + cols[lo[row] + r as usize];
            if self.count_above(v) >= k {
                staircase(&rows, &cols, v, true, |i, j| lo[i] = lo[i].max(j));
            } else if self.count_above(v.pred()) >= k {
                return Ok(v);
            } else {
                staircase(&rows, &cols, v, false, |i, j| hi[i] = hi[i].min(j));
            }
        }
    }

    pub fn select(&self, k: u64) -> Result<Selected<T>> {
        let value = self.select_value(k)?;
        let m = self.witness.get_or_init(|| match &self.blocks {
            Some(b) => b.clone(),
            None => feasible_matrices(&self.p_vals, &self.q_vals, &self.keyed),
        });
        let e = max_leq_in(m, value)
            .filter(|e| e.value == value)
            .ok_or(Error::NoSuchValue)?;
        Ok(Selected { value, witness: (e.row_id as usize, e.col_id as usize) })
    }
}

/// For each row of the sorted matrix `rows[i] + cols[j]`, the first column
/// whose entry is above `v` (`strict`) or at least `v`.
fn staircase<T: Scalar>(rows: &[T], cols: &[T], v: T, strict: bool, mut visit: impl FnMut(usize, usize)) {
    let mut j = cols.len();
    for (i, &r) in rows.iter().enumerate() {
        while j > 0 && (r + cols[j - 1] > v || (!strict && r + cols[j - 1] == v)) {
            j -= 1;
        }
        visit(i, j);
    }
}

/// Counting and selection under two constraints, parallel or not.
#[derive(Clone, Debug)]
pub enum TwoConstraintEngine<T> {
    General(Box<GeneralTwo<T>>),
    /// Parallel constraints: a strip, or a single half-plane when both face
    /// the same way.
    Matrices(MatrixCollection<T>),
    /// An empty strip.
    Empty,
}

impl<T: Scalar> TwoConstraintEngine<T> {
    pub fn new(
        p: &[Point<T>],
        q: &[Point<T>],
        l1: &Constraint<T>,
        l2: &Constraint<T>,
        obj: (T, T),
        eps: T,
    ) -> Result<Self> {
        if !constraints_parallel(l1, l2, eps) {
            let canon = transform_two(p, q, l1, l2, obj, eps)?;
            return Ok(Self::General(Box::new(GeneralTwo::new(canon, eps))));
        }
        let split = |pts: &[Point<T>]| -> (Vec<T>, Vec<T>) { pts.iter().map(|pt| (pt.x, pt.y)).unzip() };
        match transform_parallel(p, q, l1, l2, obj, eps) {
            Err(Error::Infeasible) => Ok(Self::Empty),
            Err(e) => Err(e),
            Ok(ParallelForm::Single { p, q, constraint, eps }) => {
                let ((pk, pv), (qk, qv)) = (split(&p), split(&q));
                Ok(Self::Matrices(construct_matrices(&pk, &pv, &qk, &qv, constraint.bound(eps))))
            }
            Ok(ParallelForm::Strip { p, q, lower, lower_strict, upper, upper_strict, eps }) => {
                let ((pk, pv), (qk, qv)) = (split(&p), split(&q));
                let lo = Bound::new(lower, lower_strict, eps);
                let hi = Bound::new(-upper, upper_strict, eps);
                match strip_matrices(&pk, &pv, &qk, &qv, lo, hi) {
                    Err(Error::Infeasible) => Ok(Self::Empty),
                    other => other.map(Self::Matrices),
                }
            }
        }
    }

    pub fn feasible_count(&self) -> u64 {
        match self {
            Self::General(g) => g.feasible_count(),
            Self::Matrices(m) => m.total_entries(),
            Self::Empty => 0,
        }
    }

    pub fn count_above(&self, t: T) -> u64 {
        match self {
            Self::General(g) => g.count_above(t),
            Self::Matrices(m) => m.count_greater(t),
            Self::Empty => 0,
        }
    }

    pub fn rank(&self, t: T) -> RankResult {
        match self {
            Self::General(g) => {
                let b = g.breakdown(t);
                RankResult { rank: b.r_t + b.r3 - b.r1 - b.r2 + 1, breakdown: Some(b) }
            }
            _ => RankResult { rank: self.count_above(t) + 1, breakdown: None },
        }
    }

    pub fn select_value(&self, k: u64) -> Result<T> {
        match self {
            Self::General(g) => g.select_value(k),
            Self::Matrices(m) => select_in(m, k).map(|s| s.value),
            Self::Empty => Err(Error::Infeasible),
        }
    }

    pub fn select(&self, k: u64) -> Result<Selected<T>> {
        match self {
            Self::General(g) => g.select(k),
            Self::Matrices(m) => select_in(m, k),
            Self::Empty => Err(Error::Infeasible),
        }
    }
}

/// `k`-th largest value of `d*x + e*y` under two non-parallel constraints.
pub fn selection_2<T: Scalar>(
    p: &[Point<T>],
    q: &[Point<T>],
    l1: &Constraint<T>,
    l2: &Constraint<T>,
    obj: (T, T),
    k: u64,
    eps: T,
) -> Result<Selected<T>> {
    validate(p, q, &[*l1, *l2], obj)?;
    if constraints_parallel(l1, l2, eps) {
        return Err(Error::ParallelConstraints);
    }
    TwoConstraintEngine::new(p, q, l1, l2, obj, eps)?.select(k)
}

/// `k`-th largest value of `d*x + e*y` under two parallel constraints.
pub fn selection_parallel<T: Scalar>(
    p: &[Point<T>],
    q: &[Point<T>],
    l1: &Constraint<T>,
    l2: &Constraint<T>,
    obj: (T, T),
    k: u64,
    eps: T,
) -> Result<Selected<T>> {
    validate(p, q, &[*l1, *l2], obj)?;
    if !constraints_parallel(l1, l2, eps) {
        return Err(Error::NotParallel);
    }
    TwoConstraintEngine::new(p, q, l1, l2, obj, eps)?.select(k)
}

/// Rank of `t` under two constraints, with the inclusion-exclusion terms
/// when the constraints are not parallel.
pub fn ranking_2<T: Scalar>(
    p: &[Point<T>],
    q: &[Point<T>],
    l1: &Constraint<T>,
    l2: &Constraint<T>,
    obj: (T, T),
    t: T,
    eps: T,
) -> Result<RankResult> {
    validate(p, q, &[*l1, *l2], obj)?;
    Ok(TwoConstraintEngine::new(p, q, l1, l2, obj, eps)?.rank(t))
}
