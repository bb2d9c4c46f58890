use std::cmp::Ordering;
use std::sync::OnceLock;

use crate::decomposition::KeyedConstraint;
use crate::error::{Error, Result};
use crate::finding::{feasible_matrices, max_leq_in};
use crate::geometry::{feasible_polygon, rotate_to_objective, Constraint, FeasiblePolygon, Point};
use crate::scalar::Scalar;
use crate::sorted_matrix::MatrixCollection;

use super::{block_matrices, check_rank, select_in, validate, values, Selected, TwoConstraintEngine};

fn bounding_box<T: Scalar>(p: &[Point<T>], q: &[Point<T>]) -> [T; 4] {
    let range = |pts: &[Point<T>], f: fn(&Point<T>) -> T| {
        pts.iter().fold((f(&pts[0]), f(&pts[0])), |(lo, hi), pt| (lo.min_of(f(pt)), hi.max_of(f(pt))))
    };
    let (px, py) = (range(p, |pt| pt.x), range(p, |pt| pt.y));
    let (qx, qy) = (range(q, |pt| pt.x), range(q, |pt| pt.y));
    let (x0, x1) = (px.0 + qx.0, px.1 + qx.1);
    let (y0, y1) = (py.0 + qy.0, py.1 + qy.1);
    let margin = (x1 - x0).max_of(y1 - y0) + T::ONE;
    [x0 - margin, x1 + margin, y0 - margin, y1 + margin]
}

/// Pairs `(i, j)` with `p[i] + q[j] == z`.
struct SumCounter<'a, T> {
    p: &'a [Point<T>],
    q_sorted: Vec<Point<T>>,
}

impl<'a, T: Scalar> SumCounter<'a, T> {
    fn new(p: &'a [Point<T>], q: &[Point<T>]) -> Self {
        let mut q_sorted = q.to_vec();
        q_sorted.sort_by(|a, b| a.x.total_cmp(&b.x).then(a.y.total_cmp(&b.y)));
        Self { p, q_sorted }
    }

    fn count(&self, z: Point<T>) -> u64 {
        let key = |pt: &Point<T>, t: &Point<T>| pt.x.total_cmp(&t.x).then(pt.y.total_cmp(&t.y));
        self.p
            .iter()
            .map(|a| {
                let t = Point::new(z.x - a.x, z.y - a.y);
                let lo = self.q_sorted.partition_point(|pt| key(pt, &t) == Ordering::Less);
                let hi = self.q_sorted.partition_point(|pt| key(pt, &t) != Ordering::Greater);
                (hi - lo) as u64
            })
            .sum()
    }
}

struct Level<T> {
    num: T,
    den: T,
    /// Vertex indices at this height.
    vertices: std::ops::Range<usize>,
}

impl<T: Scalar> Level<T> {
    fn integral(&self) -> Option<T> {
        let f = T::floor_div(self.num, self.den);
        (f * self.den == self.num).then_some(f)
    }
}

struct SlabCounts<T> {
    engine: TwoConstraintEngine<T>,
    top_thr: T,
    /// Engine-feasible pairs on the top level that are not truly feasible.
    spurious_top: u64,
    count: u64,
}

struct Ctx<'a, T> {
    poly: &'a FeasiblePolygon<T>,
    eps: T,
    sums: SumCounter<'a, T>,
}

impl<T: Scalar> Ctx<'_, T> {
    /// Pairs on the integral height `y` counted by a slab engine bounded by
    /// `sides` but excluded by the full system.
    fn spurious(&self, engine: &TwoConstraintEngine<T>, sides: [&Constraint<T>; 2], level: &Level<T>, y: T) -> u64 {
        let on_level = engine.count_above(y.pred()) - engine.count_above(y);
        if on_level == 0 {
            return 0;
        }
        let cons = &self.poly.constraints;
        if cons.iter().any(|c| c.a.is_zero() && !c.admits(Point::new(T::ZERO, y), self.eps)) {
            return on_level;
        }
        let mut out = 0;
        for v in level.vertices.clone() {
            let (xn, _, den) = self.poly.vertex_exact(v);
            let x = T::floor_div(xn, den);
            if x * den != xn {
                continue;
            }
            let z = Point::new(x, y);
            if sides.iter().all(|c| c.admits(z, self.eps)) && !cons.iter().all(|c| c.admits(z, self.eps)) {
                out += self.sums.count(z);
            }
        }
        out
    }
}

fn threshold<T: Scalar>(level: &Level<T>, include: bool) -> T {
    if T::EXACT {
        if include {
            T::ceil_div(level.num, level.den).pred()
        } else {
            T::floor_div(level.num, level.den)
        }
    } else {
        let v = T::floor_from_f64(level.num.to_f64() / level.den.to_f64());
        if include {
            v.pred()
        } else {
            v
        }
    }
}

/// Prepared slab structure for selection under any number of constraints.
///
/// The objective is rotated onto `y` and the feasible polygon is cut into
/// horizontal slabs at its vertex heights. Inside a slab only the two side
/// constraints bind, so each slab is a two-constraint instance; slab counts
/// locate the slab holding rank `k` and a two-constraint selection finishes.
pub struct LambdaEngine<T> {
    rp: Vec<Point<T>>,
    rq: Vec<Point<T>>,
    keyed: Vec<KeyedConstraint<T>>,
    levels: Vec<Level<T>>,
    slabs: Vec<SlabCounts<T>>,
    /// Used when the polygon has fewer than two height levels.
    fallback: Option<MatrixCollection<T>>,
    witness: OnceLock<MatrixCollection<T>>,
}

impl<T: Scalar> LambdaEngine<T> {
    pub fn new(p: &[Point<T>], q: &[Point<T>], constraints: &[Constraint<T>], obj: (T, T), eps: T) -> Result<Self> {
        validate(p, q, constraints, obj)?;
        let (rp, rq, rc, reps) = rotate_to_objective(p, q, constraints, obj, eps);
        let up = (T::ZERO, T::ONE);
        let keyed: Vec<KeyedConstraint<T>> =
            rc.iter().map(|c| KeyedConstraint::from_constraint(c, &rp, &rq, reps)).collect();
        let poly = feasible_polygon(&rc, Some(bounding_box(&rp, &rq)))?;
        if poly.levels.len() < 2 {
            let fallback = Some(block_matrices(&rp, &rq, &rc, up, reps));
            return Ok(Self { rp, rq, keyed, levels: Vec::new(), slabs: Vec::new(), fallback, witness: OnceLock::new() });
        }
        let levels: Vec<Level<T>> = poly
            .levels
            .iter()
            .enumerate()
            .map(|(i, &v)| {
                let (num, den) = poly.vertex_height(v);
                let end = poly.levels.get(i + 1).copied().unwrap_or(poly.vertices.len());
                Level { num, den, vertices: v..end }
            })
            .collect();
        let ctx = Ctx { poly: &poly, eps: reps, sums: SumCounter::new(&rp, &rq) };
        let last = poly.slabs.len() - 1;
        let mut slabs = Vec::with_capacity(poly.slabs.len());
        for (i, s) in poly.slabs.iter().enumerate() {
            let (left, right) = (&poly.constraints[s.left], &poly.constraints[s.right]);
            let engine = TwoConstraintEngine::new(&rp, &rq, left, right, up, reps)?;
            let (top, bottom) = (&levels[i], &levels[i + 1]);
            let top_thr = threshold(top, false);
            let bottom_thr = threshold(bottom, i == last);
            let spurious = |lv: &Level<T>| match lv.integral() {
                Some(y) if T::EXACT => ctx.spurious(&engine, [left, right], lv, y),
                _ => 0,
            };
            let spurious_top = spurious(top);
            let spurious_bottom = if i == last { spurious(bottom) } else { 0 };
            let raw = engine.count_above(bottom_thr) - engine.count_above(top_thr);
            let count = raw - spurious_top - spurious_bottom;
            slabs.push(SlabCounts { engine, top_thr, spurious_top, count });
        }
        drop(ctx);
        Ok(Self { rp, rq, keyed, levels, slabs, fallback: None, witness: OnceLock::new() })
    }

    /// Number of feasible pairs.
    pub fn feasible_count(&self) -> u64 {
        match &self.fallback {
            Some(m) => m.total_entries(),
            None => self.slabs.iter().map(|s| s.count).sum(),
        }
    }

    /// Per-slab feasible counts, top to bottom.
    pub fn slab_counts(&self) -> Vec<u64> {
        self.slabs.iter().map(|s| s.count).collect()
    }

    pub fn select_value(&self, k: u64) -> Result<T> {
        if let Some(m) = &self.fallback {
            return select_in(m, k).map(|s| s.value);
        }
        check_rank(k, self.feasible_count())?;
        let mut before = 0;
        for (i, s) in self.slabs.iter().enumerate() {
            if before + s.count < k {
                before += s.count;
                continue;
            }
            let kk = k - before;
            let c_top = s.engine.count_above(s.top_thr);
            if let Some(y) = self.levels[i].integral().filter(|_| T::EXACT) {
                let on_top = s.engine.count_above(y.pred()) - c_top;
                if kk <= on_top - s.spurious_top {
                    return Ok(y);
                }
            }
            return s.engine.select_value(c_top + kk + s.spurious_top);
        }
        Err(Error::NoSuchValue)
    }

    pub fn select(&self, k: u64) -> Result<Selected<T>> {
        let value = self.select_value(k)?;
        let m = self.witness.get_or_init(|| {
            let up = (T::ZERO, T::ONE);
            feasible_matrices(&values(&self.rp, up), &values(&self.rq, up), &self.keyed)
        });
        let e = max_leq_in(m, value)
            .filter(|e| e.value == value)
            .ok_or(Error::NoSuchValue)?;
        Ok(Selected { value, witness: (e.row_id as usize, e.col_id as usize) })
    }
}

/// `k`-th largest value of `d*x + e*y` under any number of constraints; see
/// [`LambdaEngine`].
pub fn selection_lambda<T: Scalar>(
    p: &[Point<T>],
    q: &[Point<T>],
    constraints: &[Constraint<T>],
    obj: (T, T),
    k: u64,
    eps: T,
) -> Result<Selected<T>> {
    LambdaEngine::new(p, q, constraints, obj, eps)?.select(k)
}
