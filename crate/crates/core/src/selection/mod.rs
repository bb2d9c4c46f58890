//! Deterministic selection and ranking of linear objective values over the
//! feasible part of `P ⊕ Q`.

mod lambda;
mod one;
mod two;

pub use lambda::{selection_lambda, LambdaEngine};
pub use one::{ranking_1, selection_1, OneConstraintEngine};
pub use two::{ranking_2, selection_2, selection_parallel, GeneralTwo, TwoConstraintEngine};

use crate::decomposition::{product_blocks, KeyedConstraint};
use crate::error::{Error, Result};
use crate::geometry::{constraints_parallel, Constraint, Objective, Point};
use crate::rng::{seeded, DEFAULT_SEED};
use crate::scalar::Scalar;
use crate::sorted_matrix::MatrixCollection;

/// A selected value and one pair `(p index, q index)` attaining it.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Selected<T> {
    pub value: T,
    pub witness: (usize, usize),
}

/// Inclusion-exclusion terms of a two-constraint rank query: feasible count
/// above `t` equals `r_t - r1 - r2 + r3`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct RankBreakdown {
    /// Pairs with value above `t`.
    pub r_t: u64,
    /// Of those, pairs violating the first constraint.
    pub r1: u64,
    /// Of those, pairs violating the second constraint.
    pub r2: u64,
    /// Of those, pairs violating both.
    pub r3: u64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct RankResult {
    pub rank: u64,
    pub breakdown: Option<RankBreakdown>,
}

pub(crate) fn check_rank(k: u64, count: u64) -> Result<()> {
    if count == 0 {
        return Err(Error::Infeasible);
    }
    if k == 0 || k > count {
        return Err(Error::RankOutOfRange { k, count });
    }
    Ok(())
}

pub(crate) fn validate<T: Scalar>(
    p: &[Point<T>],
    q: &[Point<T>],
    constraints: &[Constraint<T>],
    (d, e): (T, T),
) -> Result<()> {
    Objective::Linear { d, e }.validate()?;
    if constraints.iter().any(|c| c.a.is_zero() && c.b.is_zero()) {
        return Err(Error::DegenerateConstraint);
    }
    if p.is_empty() || q.is_empty() {
        return Err(Error::Infeasible);
    }
    Ok(())
}

pub(crate) fn values<T: Scalar>(pts: &[Point<T>], (d, e): (T, T)) -> Vec<T> {
    pts.iter().map(|pt| d * pt.x + e * pt.y).collect()
}

/// Sorted matrices of the objective over pairs admitted by every constraint,
/// built by plain product-block refinement.
pub(crate) fn block_matrices<T: Scalar>(
    p: &[Point<T>],
    q: &[Point<T>],
    constraints: &[Constraint<T>],
    obj: (T, T),
    eps: T,
) -> MatrixCollection<T> {
    let keyed: Vec<KeyedConstraint<T>> =
        constraints.iter().map(|c| KeyedConstraint::from_constraint(c, p, q, eps)).collect();
    product_blocks(p.len(), q.len(), &keyed).to_matrices(&values(p, obj), &values(q, obj))
}

pub(crate) fn select_in<T: Scalar>(m: &MatrixCollection<T>, k: u64) -> Result<Selected<T>> {
    check_rank(k, m.total_entries())?;
    let e = m.select_kth(k, &mut seeded(DEFAULT_SEED))?;
    Ok(Selected { value: e.value, witness: (e.row_id as usize, e.col_id as usize) })
}

/// Deterministic engine chosen by the number of constraints, built once and
/// queried for any number of ranks.
pub enum SelectionEngine<T> {
    Blocks(MatrixCollection<T>),
    One(OneConstraintEngine<T>),
    Parallel(TwoConstraintEngine<T>),
    Two(TwoConstraintEngine<T>),
    Lambda(Box<LambdaEngine<T>>),
}

impl<T: Scalar> SelectionEngine<T> {
    pub fn new(p: &[Point<T>], q: &[Point<T>], constraints: &[Constraint<T>], obj: (T, T), eps: T) -> Result<Self> {
        validate(p, q, constraints, obj)?;
        Ok(match constraints {
            [] => Self::Blocks(block_matrices(p, q, &[], obj, eps)),
            [l] => Self::One(OneConstraintEngine::new(p, q, l, obj, eps)),
            [l1, l2] if constraints_parallel(l1, l2, eps) => {
                Self::Parallel(TwoConstraintEngine::new(p, q, l1, l2, obj, eps)?)
            }
            [l1, l2] => Self::Two(TwoConstraintEngine::new(p, q, l1, l2, obj, eps)?),
            _ => Self::Lambda(Box::new(LambdaEngine::new(p, q, constraints, obj, eps)?)),
        })
    }

    /// Name of the underlying routine.
    pub fn name(&self) -> &'static str {
        match self {
            Self::Blocks(_) => "blocks",
            Self::One(_) => "selection_1",
            Self::Parallel(_) => "selection_parallel",
            Self::Two(_) => "selection_2",
            Self::Lambda(_) => "selection_lambda",
        }
    }

    pub fn feasible_count(&self) -> u64 {
        match self {
            Self::Blocks(m) => m.total_entries(),
            Self::One(e) => e.feasible_count(),
            Self::Parallel(e) | Self::Two(e) => e.feasible_count(),
            Self::Lambda(e) => e.feasible_count(),
        }
    }

    pub fn select(&self, k: u64) -> Result<Selected<T>> {
        match self {
            Self::Blocks(m) => select_in(m, k),
            Self::One(e) => e.select(k),
            Self::Parallel(e) | Self::Two(e) => e.select(k),
            Self::Lambda(e) => e.select(k),
        }
    }
}

/// `k`-th largest feasible value of `d*x + e*y` (1-based, with
/// multiplicity). Picks the engine by the number of constraints.
pub fn select<T: Scalar>(
    p: &[Point<T>],
    q: &[Point<T>],
    constraints: &[Constraint<T>],
    obj: (T, T),
    k: u64,
    eps: T,
) -> Result<Selected<T>> {
    validate(p, q, constraints, obj)?;
    match constraints {
        [] => select_in(&block_matrices(p, q, &[], obj, eps), k),
        [l] => selection_1(p, q, l, obj, k, eps),
        [l1, l2] if constraints_parallel(l1, l2, eps) => selection_parallel(p, q, l1, l2, obj, k, eps),
        [l1, l2] => selection_2(p, q, l1, l2, obj, k, eps),
        _ => selection_lambda(p, q, constraints, obj, k, eps),
    }
}

/// Rank of `t`: feasible values strictly greater than `t`, plus one. Two
/// general constraints also report the inclusion-exclusion terms.
pub fn rank<T: Scalar>(
    p: &[Point<T>],
    q: &[Point<T>],
    constraints: &[Constraint<T>],
    obj: (T, T),
    t: T,
    eps: T,
) -> Result<RankResult> {
    validate(p, q, constraints, obj)?;
    match constraints {
        [l] => Ok(RankResult { rank: ranking_1(p, q, l, obj, t, eps), breakdown: None }),
        [l1, l2] => ranking_2(p, q, l1, l2, obj, t, eps),
        _ => Ok(RankResult { rank: block_matrices(p, q, constraints, obj, eps).rank(t), breakdown: None }),
    }
}
