//! Points, half-plane constraints, objectives, and the input transformations
//! that bring an instance into canonical form (objective = `y`).

use std::cmp::Ordering;
use std::ops::Add;

use crate::error::{Error, Result};
use crate::scalar::Scalar;

#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Point<T> {
    pub x: T,
    pub y: T,
}

impl<T> Point<T> {
    pub const fn new(x: T, y: T) -> Self {
        Self { x, y }
    }
}

impl<T: Scalar> Add for Point<T> {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        Self::new(self.x + rhs.x, self.y + rhs.y)
    }
}

/// Multiset of points; order carries no meaning, duplicates are allowed.
pub type PointMultiset<T> = Vec<Point<T>>;

/// Comparison sign accepted by [`normalize_constraint`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Relation {
    Ge,
    Gt,
    Le,
    Lt,
}

/// `a*x + b*y >= c`, or `> c` when `strict`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Constraint<T> {
    pub a: T,
    pub b: T,
    pub c: T,
    pub strict: bool,
}

impl<T: Scalar> Constraint<T> {
    pub fn new(a: T, b: T, c: T, strict: bool) -> Self {
        Self { a, b, c, strict }
    }

    pub fn ge(a: T, b: T, c: T) -> Self {
        Self::new(a, b, c, false)
    }

    pub fn eval(&self, p: Point<T>) -> T {
        self.a * p.x + self.b * p.y
    }

    pub fn bound(&self, eps: T) -> Bound<T> {
        Bound::new(self.c, self.strict, eps)
    }

    pub fn admits(&self, p: Point<T>, eps: T) -> bool {
        self.bound(eps).admits(self.eval(p))
    }

    /// The complementary half-plane.
    pub fn negated(&self) -> Self {
        Self::new(-self.a, -self.b, -self.c, !self.strict)
    }
}

/// Normalizes `a*x + b*y (rel) c` into `>=`/`>` form.
pub fn normalize_constraint<T: Scalar>(a: T, b: T, rel: Relation, c: T) -> Result<Constraint<T>> {
    if a.is_zero() && b.is_zero() {
        return Err(Error::DegenerateConstraint);
    }
    Ok(match rel {
        Relation::Ge => Constraint::new(a, b, c, false),
        Relation::Gt => Constraint::new(a, b, c, true),
        Relation::Le => Constraint::new(-a, -b, -c, false),
        Relation::Lt => Constraint::new(-a, -b, -c, true),
    })
}

/// Monotone threshold predicate `s >= c` (or `s > c`) on a scalar key.
///
/// In float mode values within `eps` of `c` are on the boundary, where only
/// the strict flag decides. With `eps == 0` the test is exact.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Bound<T> {
    pub c: T,
    pub strict: bool,
    pub eps: T,
}

impl<T: Scalar> Bound<T> {
    pub fn new(c: T, strict: bool, eps: T) -> Self {
        Self { c, strict, eps }
    }

    /// `s > t`, compared exactly.
    pub fn greater_than(t: T) -> Self {
        Self::new(t, true, T::ZERO)
    }

    /// `s >= t`, compared exactly.
    pub fn at_least(t: T) -> Self {
        Self::new(t, false, T::ZERO)
    }

    #[inline]
    pub fn admits(&self, s: T) -> bool {
        let d = s - self.c;
        if d > self.eps {
            true
        } else if d < -self.eps {
            false
        } else {
            !self.strict
        }
    }

    /// Predicate on the negated key that accepts exactly what `self` rejects.
    pub fn complement(&self) -> Self {
        Self::new(-self.c, !self.strict, self.eps)
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Objective<T> {
    /// `d*x + e*y`
    Linear { d: T, e: T },
    /// `b*y / (a*x)`, infinite when `x == 0`.
    Ratio { a: T, b: T },
}

impl<T: Scalar> Objective<T> {
    pub fn y() -> Self {
        Objective::Linear { d: T::ZERO, e: T::ONE }
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            Objective::Linear { d, e } if d.is_zero() && e.is_zero() => {
                Err(Error::InvalidObjective("linear objective with d = e = 0"))
            }
            Objective::Ratio { a, b } if a.is_zero() || b.is_zero() => {
                Err(Error::InvalidObjective("ratio objective needs a != 0 and b != 0"))
            }
            _ => Ok(()),
        }
    }

    pub fn linear_coeffs(&self) -> Result<(T, T)> {
        self.validate()?;
        match *self {
            Objective::Linear { d, e } => Ok((d, e)),
            Objective::Ratio { .. } => Err(Error::InvalidObjective("expected a linear objective")),
        }
    }

    /// Objective value as a float; `None` means +infinity (ratio with `x == 0`).
    pub fn value_f64(&self, p: Point<T>) -> Option<f64> {
        match *self {
            Objective::Linear { d, e } => Some((d * p.x + e * p.y).to_f64()),
            Objective::Ratio { a, b } => {
                let den = a * p.x;
                if den.is_zero() {
                    None
                } else {
                    Some((b * p.y).to_f64() / den.to_f64())
                }
            }
        }
    }
}

/// Instance with a single canonical constraint `x >= c` and objective `y`.
#[derive(Clone, Debug)]
pub struct OneCanonical<T> {
    pub p: Vec<Point<T>>,
    pub q: Vec<Point<T>>,
    pub constraint: Constraint<T>,
}

fn map_points<T: Scalar>(pts: &[Point<T>], fx: (T, T), fy: (T, T)) -> Vec<Point<T>> {
    pts.iter()
        .map(|p| Point::new(fx.0 * p.x + fx.1 * p.y, fy.0 * p.x + fy.1 * p.y))
        .collect()
}

/// Maps `(x, y) -> (a*x + b*y, d*x + e*y)` so the constraint becomes `x >= c`.
pub fn transform_one<T: Scalar>(
    p: &[Point<T>],
    q: &[Point<T>],
    l: &Constraint<T>,
    (d, e): (T, T),
) -> OneCanonical<T> {
    OneCanonical {
        p: map_points(p, (l.a, l.b), (d, e)),
        q: map_points(q, (l.a, l.b), (d, e)),
        constraint: Constraint::new(T::ONE, T::ZERO, l.c, l.strict),
    }
}

/// Sign pattern of the second canonical constraint `a*x + b*y >= c`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum SignCase {
    NegNeg,
    PosPos,
    NegPos,
    PosNeg,
    /// `a == 0`: the second constraint only bounds `y`.
    ZeroA,
}

/// Instance with `x >= c1` and `a*x + b*y >= c2`, objective `y`.
#[derive(Clone, Debug)]
pub struct TwoCanonical<T> {
    pub p: Vec<Point<T>>,
    pub q: Vec<Point<T>>,
    pub first: Constraint<T>,
    pub second: Constraint<T>,
    /// Boundary tolerance that applies to `second` (scaled with it).
    pub second_eps: T,
    /// Whether the input constraints were swapped to avoid a zero determinant.
    pub swapped: bool,
    pub case: SignCase,
}

fn near_zero<T: Scalar>(v: T, scale: T, eps: T) -> bool {
    v.abs() <= eps * scale
}

fn parallel_to<T: Scalar>(l: &Constraint<T>, (d, e): (T, T), eps: T) -> bool {
    let det = l.a * e - l.b * d;
    near_zero(det, (l.a.abs() + l.b.abs()) * (d.abs() + e.abs()), eps)
}

/// Whether two constraints have parallel boundary lines.
pub fn constraints_parallel<T: Scalar>(l1: &Constraint<T>, l2: &Constraint<T>, eps: T) -> bool {
    parallel_to(l1, (l2.a, l2.b), eps)
}

/// Two-constraint transformation. The denominator `a1*e - b1*d` is cleared by
/// multiplying the second constraint through by its absolute value, so integer
/// inputs stay integral.
pub fn transform_two<T: Scalar>(
    p: &[Point<T>],
    q: &[Point<T>],
    l1: &Constraint<T>,
    l2: &Constraint<T>,
    (d, e): (T, T),
    eps: T,
) -> Result<TwoCanonical<T>> {
    let (mut l1, mut l2, mut swapped) = (*l1, *l2, false);
    if parallel_to(&l1, (d, e), eps) {
        if parallel_to(&l2, (d, e), eps) {
            return Err(Error::ParallelToObjective);
        }
        std::mem::swap(&mut l1, &mut l2);
        swapped = true;
    }
    if constraints_parallel(&l1, &l2, eps) {
        return Err(Error::ParallelConstraints);
    }
    let det = l1.a * e - l1.b * d;
    let (sign, abs_det) = if det < T::ZERO { (-T::ONE, -det) } else { (T::ONE, det) };
    let a = (l2.a * e - l2.b * d) * sign;
    let b = (l1.a * l2.b - l1.b * l2.a) * sign;
    let c = l2.c * abs_det;
    let case = if a.is_zero() {
        SignCase::ZeroA
    } else {
        match (a < T::ZERO, b < T::ZERO) {
            (true, true) => SignCase::NegNeg,
            (false, false) => SignCase::PosPos,
            (true, false) => SignCase::NegPos,
            (false, true) => SignCase::PosNeg,
        }
    };
    Ok(TwoCanonical {
        p: map_points(p, (l1.a, l1.b), (d, e)),
        q: map_points(q, (l1.a, l1.b), (d, e)),
        first: Constraint::new(T::ONE, T::ZERO, l1.c, l1.strict),
        second: Constraint::new(a, b, c, l2.strict),
        second_eps: eps * abs_det,
        swapped,
        case,
    })
}

/// Result of [`transform_parallel`].
#[derive(Clone, Debug)]
pub enum ParallelForm<T> {
    /// `lower <= x <= upper` (strictness per side).
    Strip {
        p: Vec<Point<T>>,
        q: Vec<Point<T>>,
        lower: T,
        lower_strict: bool,
        upper: T,
        upper_strict: bool,
        eps: T,
    },
    /// Both constraints face the same way and collapse to the tighter one.
    Single { p: Vec<Point<T>>, q: Vec<Point<T>>, constraint: Constraint<T>, eps: T },
}

fn lead<T: Scalar>(l: &Constraint<T>) -> T {
    if l.a.is_zero() {
        l.b
    } else {
        l.a
    }
}

/// Maps two parallel constraints onto a strip `c1 <= x <= c2` with objective `y`.
pub fn transform_parallel<T: Scalar>(
    p: &[Point<T>],
    q: &[Point<T>],
    l1: &Constraint<T>,
    l2: &Constraint<T>,
    (d, e): (T, T),
    eps: T,
) -> Result<ParallelForm<T>> {
    if !constraints_parallel(l1, l2, eps) {
        return Err(Error::NotParallel);
    }
    let (k1, k2) = (lead(l1), lead(l2));
    // Scale both onto the common functional g = |k2| * (a1, b1).
    let (s1, s2) = (k2.abs(), k1.abs());
    let g = (l1.a * s1, l1.b * s1);
    let c1 = l1.c * s1;
    let c2 = l2.c * s2;
    let eps_g = eps * s1.max_of(s2);
    let pm = map_points(p, g, (d, e));
    let qm = map_points(q, g, (d, e));
    let same_direction = (k1 < T::ZERO) == (k2 < T::ZERO);
    if same_direction {
        let (c, strict) = match c1.total_cmp(&c2) {
            std::cmp::Ordering::Greater => (c1, l1.strict),
            std::cmp::Ordering::Less => (c2, l2.strict),
            std::cmp::Ordering::Equal => (c1, l1.strict || l2.strict),
        };
        return Ok(ParallelForm::Single {
            p: pm,
            q: qm,
            constraint: Constraint::new(T::ONE, T::ZERO, c, strict),
            eps: eps_g,
        });
    }
    // l2 reads -g >= c2, i.e. g <= -c2.
    let upper = -c2;
    if c1 > upper || (c1 == upper && (l1.strict || l2.strict) && eps_g.is_zero()) {
        return Err(Error::Infeasible);
    }
    Ok(ParallelForm::Strip {
        p: pm,
        q: qm,
        lower: c1,
        lower_strict: l1.strict,
        upper,
        upper_strict: l2.strict,
        eps: eps_g,
    })
}

/// Instance for the ratio objective after shifting the target to zero.
#[derive(Clone, Debug)]
pub struct RatioCanonical<T> {
    pub p: Vec<Point<T>>,
    pub q: Vec<Point<T>>,
    pub constraints: Vec<Constraint<T>>,
}

/// Maps `(x, y) -> (den*a*x, den*b*y - num*a*x)` so that `y'/x'` equals
/// `b*y/(a*x) - num/den`. Constraints are rewritten over the new coordinates
/// and multiplied through to stay integral.
pub fn transform_ratio<T: Scalar>(
    p: &[Point<T>],
    q: &[Point<T>],
    constraints: &[Constraint<T>],
    a: T,
    b: T,
    (num, den): (T, T),
) -> Result<RatioCanonical<T>> {
    Objective::Ratio { a, b }.validate()?;
    if den <= T::ZERO {
        return Err(Error::InvalidInput("target denominator must be positive".into()));
    }
    let fx = (den * a, T::ZERO);
    let fy = (-(num * a), den * b);
    let s = if a * b < T::ZERO { -T::ONE } else { T::ONE };
    let constraints = constraints
        .iter()
        .map(|l| {
            Constraint::new(
                s * (l.a * den * b + l.b * num * a),
                s * l.b * den * a,
                s * l.c * den * den * a * b,
                l.strict,
            )
        })
        .collect();
    Ok(RatioCanonical { p: map_points(p, fx, fy), q: map_points(q, fx, fy), constraints })
}

/// Rotation-like change of basis `(x, y) -> (e*x - d*y, d*x + e*y)` that turns
/// the linear objective `d*x + e*y` into `y`. Constraints are rewritten and
/// scaled by `d^2 + e^2`; the returned epsilon is scaled with them.
pub fn rotate_to_objective<T: Scalar>(
    p: &[Point<T>],
    q: &[Point<T>],
    constraints: &[Constraint<T>],
    (d, e): (T, T),
    eps: T,
) -> (Vec<Point<T>>, Vec<Point<T>>, Vec<Constraint<T>>, T) {
    let norm = d * d + e * e;
    let cons = constraints
        .iter()
        .map(|l| Constraint::new(l.a * e - l.b * d, l.a * d + l.b * e, l.c * norm, l.strict))
        .collect();
    (map_points(p, (e, -d), (d, e)), map_points(q, (e, -d), (d, e)), cons, eps * norm)
}

/// A polygon corner, with the two constraint lines that meet there.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Vertex {
    pub x: f64,
    pub y: f64,
    pub lines: (usize, usize),
}

/// Horizontal slab between two consecutive vertex heights and the two
/// constraints forming its left and right edges.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Slab {
    pub top: usize,
    pub bottom: usize,
    pub left: usize,
    pub right: usize,
}

#[derive(Clone, Debug)]
pub struct FeasiblePolygon<T> {
    /// Input constraints plus any appended box constraints.
    pub constraints: Vec<Constraint<T>>,
    /// Corners sorted by nonincreasing `y`, one entry per distinct height
    /// level first-come (ties broken by `x`).
    pub vertices: Vec<Vertex>,
    /// Distinct vertex heights in decreasing order, as indices into `vertices`.
    pub levels: Vec<usize>,
    pub slabs: Vec<Slab>,
    pub box_added: bool,
}

fn tol_for(values: &[f64]) -> f64 {
    let scale = values.iter().fold(1.0f64, |m, v| m.max(v.abs()));
    1e-9 * scale
}

fn is_unbounded(cons: &[(f64, f64, f64)]) -> bool {
    if cons.is_empty() {
        return true;
    }
    let tol = tol_for(&cons.iter().flat_map(|c| [c.0, c.1]).collect::<Vec<_>>());
    cons.iter().any(|&(a, b, _)| {
        [(-b, a), (b, -a)]
            .iter()
            .any(|&(dx, dy)| cons.iter().all(|&(a2, b2, _)| a2 * dx + b2 * dy >= -tol))
    })
}

fn exact_vertex<T: Scalar>(cons: &[Constraint<T>], (i, j): (usize, usize)) -> (T, T, T) {
    let (l1, l2) = (&cons[i], &cons[j]);
    let x = l1.c * l2.b - l2.c * l1.b;
    let y = l1.a * l2.c - l2.a * l1.c;
    let den = l1.a * l2.b - l2.a * l1.b;
    if den < T::ZERO {
        (-x, -y, -den)
    } else {
        (x, y, den)
    }
}

/// Vertices and slab structure of the intersection of the constraint
/// half-planes. `bounding_box = [xmin, xmax, ymin, ymax]` is appended as four
/// constraints when the intersection is unbounded.
pub fn feasible_polygon<T: Scalar>(
    constraints: &[Constraint<T>],
    bounding_box: Option<[T; 4]>,
) -> Result<FeasiblePolygon<T>> {
    let mut cons = constraints.to_vec();
    let as_f = |c: &Constraint<T>| (c.a.to_f64(), c.b.to_f64(), c.c.to_f64());
    let mut box_added = false;
    if is_unbounded(&cons.iter().map(as_f).collect::<Vec<_>>()) {
        let [x0, x1, y0, y1] = bounding_box.ok_or_else(|| {
            Error::InvalidInput("unbounded constraint region and no bounding box".into())
        })?;
        cons.push(Constraint::ge(T::ONE, T::ZERO, x0));
        cons.push(Constraint::ge(-T::ONE, T::ZERO, -x1));
        cons.push(Constraint::ge(T::ZERO, T::ONE, y0));
        cons.push(Constraint::ge(T::ZERO, -T::ONE, -y1));
        box_added = true;
    }
    let fc: Vec<(f64, f64, f64)> = cons.iter().map(as_f).collect();
    let tol = tol_for(&fc.iter().flat_map(|c| [c.0, c.1, c.2]).collect::<Vec<_>>());
    let mut vertices: Vec<Vertex> = Vec::new();
    for i in 0..fc.len() {
        for j in i + 1..fc.len() {
            let (a1, b1, c1) = fc[i];
            let (a2, b2, c2) = fc[j];
            let det = a1 * b2 - a2 * b1;
            if det.abs() <= 1e-12 * (a1.abs() + b1.abs()) * (a2.abs() + b2.abs()) {
                continue;
            }
            let x = (c1 * b2 - c2 * b1) / det;
            let y = (a1 * c2 - a2 * c1) / det;
            if fc.iter().all(|&(a, b, c)| a * x + b * y >= c - tol) {
                vertices.push(Vertex { x, y, lines: (i, j) });
            }
        }
    }
    if vertices.is_empty() {
        return Err(Error::Infeasible);
    }
    let exact = |v: &Vertex| exact_vertex(&cons, v.lines);
    let same_y = |u: &Vertex, v: &Vertex| {
        if T::EXACT {
            let ((_, uy, ud), (_, vy, vd)) = (exact(u), exact(v));
            T::cmp_frac(uy, ud, vy, vd) == Ordering::Equal
        } else {
            (u.y - v.y).abs() <= tol
        }
    };
    if T::EXACT {
        vertices.sort_by(|u, v| {
            let ((ux, uy, ud), (vx, vy, vd)) = (exact(u), exact(v));
            T::cmp_frac(vy, vd, uy, ud).then(T::cmp_frac(ux, ud, vx, vd))
        });
        vertices.dedup_by(|u, v| {
            let ((ux, uy, ud), (vx, vy, vd)) = (exact(u), exact(v));
            T::cmp_frac(ux, ud, vx, vd) == Ordering::Equal && T::cmp_frac(uy, ud, vy, vd) == Ordering::Equal
        });
    } else {
        vertices.sort_by(|u, v| v.y.total_cmp(&u.y).then(u.x.total_cmp(&v.x)));
        vertices.dedup_by(|u, v| (u.x - v.x).abs() <= tol && (u.y - v.y).abs() <= tol);
    }
    let mut levels: Vec<usize> = Vec::new();
    for (i, v) in vertices.iter().enumerate() {
        match levels.last() {
            Some(&l) if same_y(&vertices[l], v) => {}
            _ => levels.push(i),
        }
    }
    let mut slabs = Vec::new();
    for w in levels.windows(2) {
        let mid = 0.5 * (vertices[w[0]].y + vertices[w[1]].y);
        let mut left: Option<(usize, f64)> = None;
        let mut right: Option<(usize, f64)> = None;
        for (idx, &(a, b, c)) in fc.iter().enumerate() {
            if a.abs() <= 1e-12 * (a.abs() + b.abs()) {
                continue;
            }
            let x = (c - b * mid) / a;
            // Coincident lines: keep the strict one so boundary points are excluded.
            let strict = cons[idx].strict;
            let wins = |cur: Option<(usize, f64)>, tighter: bool| match cur {
                None => true,
                Some((ci, cx)) => {
                    if (x - cx).abs() <= tol {
                        strict && !cons[ci].strict
                    } else {
                        tighter
                    }
                }
            };
            if a > 0.0 {
                if wins(left, left.is_some_and(|(_, lx)| x > lx)) {
                    left = Some((idx, x));
                }
            } else if wins(right, right.is_some_and(|(_, rx)| x < rx)) {
                right = Some((idx, x));
            }
        }
        let (Some((l, _)), Some((r, _))) = (left, right) else {
            return Err(Error::InvalidInput("polygon slab without side edges".into()));
        };
        slabs.push(Slab { top: w[0], bottom: w[1], left: l, right: r });
    }
    Ok(FeasiblePolygon { constraints: cons, vertices, levels, slabs, box_added })
}

impl<T: Scalar> FeasiblePolygon<T> {
    /// Exact height of a vertex as `num / den` with `den > 0`.
    pub fn vertex_height(&self, v: usize) -> (T, T) {
        let (_, y, den) = self.vertex_exact(v);
        (y, den)
    }

    /// Exact vertex as `(x_num, y_num, den)` with `den > 0`.
    pub fn vertex_exact(&self, v: usize) -> (T, T, T) {
        exact_vertex(&self.constraints, self.vertices[v].lines)
    }
}
