//! Seeded random instances for tests, benchmarks and demos.

use rand::Rng;

use crate::geometry::{Constraint, Point};

#[derive(Clone, Debug, PartialEq)]
pub struct Instance {
    pub p: Vec<Point<i64>>,
    pub q: Vec<Point<i64>>,
    pub constraints: Vec<Constraint<i64>>,
    pub objective: (i64, i64),
}

/// Shape knobs for [`random_instance`].
#[derive(Clone, Copy, Debug)]
pub struct InstanceSpec {
    pub n: usize,
    pub constraints: usize,
    /// Coordinates are drawn from `[-coord, coord]`.
    pub coord: i64,
    /// Constraint and objective coefficients are drawn from `[-coef, coef]`.
    pub coef: i64,
    /// Probability that a constraint is strict.
    pub strict: f64,
}

impl InstanceSpec {
    pub fn new(n: usize, constraints: usize) -> Self {
        Self { n, constraints, coord: 1000, coef: 5, strict: 0.3 }
    }
}

pub fn random_points<R: Rng + ?Sized>(rng: &mut R, n: usize, coord: i64) -> Vec<Point<i64>> {
    (0..n).map(|_| Point::new(rng.random_range(-coord..=coord), rng.random_range(-coord..=coord))).collect()
}

fn nonzero_pair<R: Rng + ?Sized>(rng: &mut R, coef: i64) -> (i64, i64) {
    loop {
        let v = (rng.random_range(-coef..=coef), rng.random_range(-coef..=coef));
        if v != (0, 0) {
            return v;
        }
    }
}

/// A constraint whose boundary passes near a random pair sum, so a good
/// share of pairs survive.
pub fn random_constraint<R: Rng + ?Sized>(
    rng: &mut R,
    p: &[Point<i64>],
    q: &[Point<i64>],
    coef: i64,
    strict: f64,
) -> Constraint<i64> {
    let (a, b) = nonzero_pair(rng, coef);
    let s = p[rng.random_range(0..p.len())] + q[rng.random_range(0..q.len())];
    let c = a * s.x + b * s.y - rng.random_range(0..=coef * 200);
    Constraint::new(a, b, c, rng.random_bool(strict))
}

pub fn random_instance<R: Rng + ?Sized>(rng: &mut R, spec: InstanceSpec) -> Instance {
    let p = random_points(rng, spec.n, spec.coord);
    let q = random_points(rng, spec.n, spec.coord);
    let constraints =
        (0..spec.constraints).map(|_| random_constraint(rng, &p, &q, spec.coef, spec.strict)).collect();
    let objective = nonzero_pair(rng, spec.coef);
    Instance { p, q, constraints, objective }
}

/// Random integer sequence with entries in `[-range, range]`.
pub fn random_sequence<R: Rng + ?Sized>(rng: &mut R, n: usize, range: i64) -> Vec<i64> {
    (0..n).map(|_| rng.random_range(-range..=range)).collect()
}

/// Instance with two parallel constraints: a strip, or (with probability
/// `same_side`) two half-planes facing the same way.
pub fn random_parallel_instance<R: Rng + ?Sized>(rng: &mut R, spec: InstanceSpec, same_side: f64) -> Instance {
    let p = random_points(rng, spec.n, spec.coord);
    let q = random_points(rng, spec.n, spec.coord);
    let (a, b) = nonzero_pair(rng, spec.coef);
    let m = rng.random_range(1..=3);
    let mut level = || {
        let s = p[rng.random_range(0..p.len())] + q[rng.random_range(0..q.len())];
        a * s.x + b * s.y
    };
    let (u, v) = (level(), level());
    let (lo, hi) = (u.min(v), u.max(v));
    let first = Constraint::new(a, b, lo, rng.random_bool(spec.strict));
    let second = if rng.random_bool(same_side) {
        Constraint::new(m * a, m * b, m * hi, rng.random_bool(spec.strict))
    } else {
        Constraint::new(-m * a, -m * b, -m * hi, rng.random_bool(spec.strict))
    };
    let objective = nonzero_pair(rng, spec.coef);
    Instance { p, q, constraints: vec![first, second], objective }
}
