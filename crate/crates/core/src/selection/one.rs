use crate::decomposition::construct_matrices;
use crate::error::Result;
use crate::geometry::{transform_one, Constraint, Point};
use crate::scalar::Scalar;
use crate::sorted_matrix::MatrixCollection;

use super::{select_in, Selected};

/// Sorted matrices of the objective over the pairs satisfying one constraint.
#[derive(Clone, Debug)]
pub struct OneConstraintEngine<T> {
    matrices: MatrixCollection<T>,
}

impl<T: Scalar> OneConstraintEngine<T> {
    pub fn new(p: &[Point<T>], q: &[Point<T>], l: &Constraint<T>, obj: (T, T), eps: T) -> Self {
        let c = transform_one(p, q, l, obj);
        let (pk, pv): (Vec<T>, Vec<T>) = c.p.iter().map(|pt| (pt.x, pt.y)).unzip();
        let (qk, qv): (Vec<T>, Vec<T>) = c.q.iter().map(|pt| (pt.x, pt.y)).unzip();
        Self { matrices: construct_matrices(&pk, &pv, &qk, &qv, c.constraint.bound(eps)) }
    }

    pub fn matrices(&self) -> &MatrixCollection<T> {
        &self.matrices
    }

    pub fn feasible_count(&self) -> u64 {
        self.matrices.total_entries()
    }

    pub fn count_above(&self, t: T) -> u64 {
        self.matrices.count_greater(t)
    }

    pub fn select(&self, k: u64) -> Result<Selected<T>> {
        select_in(&self.matrices, k)
    }
}

/// `k`-th largest value of `d*x + e*y` over pairs satisfying `l`.
pub fn selection_1<T: Scalar>(
    p: &[Point<T>],
    q: &[Point<T>],
    l: &Constraint<T>,
    obj: (T, T),
    k: u64,
    eps: T,
) -> Result<Selected<T>> {
    super::validate(p, q, std::slice::from_ref(l), obj)?;
    OneConstraintEngine::new(p, q, l, obj, eps).select(k)
}

/// Rank of `t` among values over pairs satisfying `l`.
pub fn ranking_1<T: Scalar>(p: &[Point<T>], q: &[Point<T>], l: &Constraint<T>, obj: (T, T), t: T, eps: T) -> u64 {
    OneConstraintEngine::new(p, q, l, obj, eps).count_above(t) + 1
}
