//! Expected `O(n log n)` two-constraint selection by random contraction.
//!
//! A range `[s_l, s_r]` of objective values is shrunk using a uniform sample
//! of the feasible points inside it until few enough remain to report them
//! all. Reporting, counting and sampling run over a constant number of
//! pieces, each the intersection of two strips in the functionals `x`, `y`
//! and `phi = a*x + b*y`; one sweep with an order-statistic tree handles a
//! piece.

mod ost;

pub use ost::OrderStatisticTree;

use rand::Rng;

use crate::error::{Error, Result};
use crate::geometry::{constraints_parallel, transform_two, Constraint, Point, TwoCanonical};
use crate::rng::seeded;
use crate::scalar::Scalar;
use crate::selection::{check_rank, validate, GeneralTwo, Selected};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Functional {
    X,
    Y,
    Phi,
}

/// Pairs whose sum has `g` in `g_range` and `h` in `h_range` (closed).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Piece<T> {
    pub g: Functional,
    pub g_range: (T, T),
    pub h: Functional,
    pub h_range: (T, T),
}

/// Shape of the feasible part of a query band.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ReportCase {
    /// `a >= 0`: the region is unbounded sideways; two quadrant-like pieces.
    Open,
    /// Bounded trapezoid whose helper lines meet on the narrow edge.
    A,
    /// Helper lines meet beyond the narrow edge.
    B,
    /// The band contains the apex: a triangle.
    C,
    /// Helper lines meet inside the band.
    D,
}

impl ReportCase {
    pub fn label(self) -> &'static str {
        match self {
            Self::Open => "open",
            Self::A => "a",
            Self::B => "b",
            Self::C => "c",
            Self::D => "d",
        }
    }
}

/// Per-attempt bookkeeping of [`selection_2_randomized`].
#[derive(Clone, Debug, Default, PartialEq)]
pub struct ContractionStats<T> {
    /// Sampling rounds spent on each accepted contraction.
    pub attempts: Vec<u32>,
    /// Ranges after each accepted contraction, starting with the full range.
    pub intervals: Vec<(T, T)>,
    /// Feasible points enumerated at the end (zero if a pivot hit the answer).
    pub enumerated: u64,
}

impl<T> ContractionStats<T> {
    /// Mean sampling rounds per accepted contraction.
    pub fn mean_attempts(&self) -> f64 {
        if self.attempts.is_empty() {
            return 0.0;
        }
        self.attempts.iter().map(|&a| a as f64).sum::<f64>() / self.attempts.len() as f64
    }
}

/// Range reporting, counting and sampling over a canonical two-constraint
/// instance `x >= c1`, `a*x + b*y >= c2`.
#[derive(Clone, Debug)]
pub struct RangeEngine<T> {
    two: GeneralTwo<T>,
    eps: T,
}

struct Sweep<'a, T> {
    p_order: Vec<u32>,
    q_order: Vec<u32>,
    qg: Vec<T>,
    ph: Vec<T>,
    qh: Vec<T>,
    pg: Vec<T>,
    piece: &'a Piece<T>,
}

impl<T: Scalar> RangeEngine<T> {
    pub fn new(canon: TwoCanonical<T>, eps: T) -> Self {
        Self { two: GeneralTwo::new(canon, eps), eps }
    }

    pub fn canonical(&self) -> &TwoCanonical<T> {
        self.two.canonical()
    }

    /// Exact counting structure of the instance.
    pub fn counter(&self) -> &GeneralTwo<T> {
        &self.two
    }

    fn value(&self, f: Functional, pt: Point<T>) -> T {
        match f {
            Functional::X => pt.x,
            Functional::Y => pt.y,
            Functional::Phi => self.canonical().second.eval(pt),
        }
    }

    fn sum(&self, i: u32, j: u32) -> Point<T> {
        let c = self.canonical();
        c.p[i as usize] + c.q[j as usize]
    }

    /// Whether the sum is feasible and its value lies in `[s_l, s_r]`.
    pub fn in_range(&self, s: Point<T>, s_l: T, s_r: T) -> bool {
        let c = self.canonical();
        s.y >= s_l && s.y <= s_r && c.first.admits(s, self.eps) && c.second.admits(s, c.second_eps)
    }

    fn in_piece(&self, piece: &Piece<T>, s: Point<T>) -> bool {
        let (g, h) = (self.value(piece.g, s), self.value(piece.h, s));
        g >= piece.g_range.0 && g <= piece.g_range.1 && h >= piece.h_range.0 && h <= piece.h_range.1
    }

    /// Largest pair-sum value of a functional.
    fn max_sum(&self, f: Functional) -> T {
        let c = self.canonical();
        let m = |pts: &[Point<T>]| pts.iter().map(|&pt| self.value(f, pt)).fold(None, |a: Option<T>, v| {
            Some(a.map_or(v, |a| a.max_of(v)))
        });
        m(&c.p).unwrap_or(T::ZERO) + m(&c.q).unwrap_or(T::ZERO)
    }

    fn magnitude(&self, f: Functional) -> f64 {
        let c = self.canonical();
        let m = |pts: &[Point<T>]| pts.iter().map(|&pt| self.value(f, pt).to_f64().abs()).fold(0.0, f64::max);
        m(&c.p) + m(&c.q)
    }

    /// Pieces covering the feasible points with value in `[s_l, s_r]`, and
    /// the case that produced them. Piece bounds are widened slightly, so
    /// every reported pair is filtered exactly afterwards.
    pub fn pieces(&self, s_l: T, s_r: T) -> (Vec<Piece<T>>, ReportCase) {
        let c = self.canonical();
        let (a, b) = (c.second.a.to_f64(), c.second.b.to_f64());
        let (c1, c2) = (c.first.c.to_f64(), c.second.c.to_f64());
        let (sl, sr) = (s_l.to_f64(), s_r.to_f64());
        let scale = |f: Functional| self.magnitude(f) + c1.abs() + c2.abs() + sl.abs() + sr.abs() + 1.0;
        let margin = |f: Functional| {
            let slack = if T::EXACT { 1.0 } else { 4.0 * self.eps.to_f64() * (1.0 + a.abs() + b.abs()) };
            1e-9 * scale(f) + slack
        };
        let range = |f: Functional, lo: f64, hi: f64| {
            let m = margin(f);
            (T::floor_from_f64(lo - m), T::ceil_from_f64(hi + m))
        };
        let piece = |g: Functional, g_lo: f64, g_hi: f64, h: Functional, h_lo: f64, h_hi: f64| Piece {
            g,
            g_range: range(g, g_lo, g_hi),
            h,
            h_range: range(h, h_lo, h_hi),
        };
        let x_max = self.max_sum(Functional::X).to_f64();
        let phi_max = self.max_sum(Functional::Phi).to_f64();
        if sl > sr {
            return (Vec::new(), ReportCase::Open);
        }
        if a == 0.0 {
            let (lo, hi) = if b > 0.0 { (sl.max(c2 / b), sr) } else { (sl, sr.min(c2 / b)) };
            let mut out = Vec::new();
            if lo <= hi + margin(Functional::Y) {
                out.push(piece(Functional::X, c1, x_max.max(c1), Functional::Y, lo, hi.max(lo)));
            }
            return (out, ReportCase::Open);
        }
        let ya = (c2 - a * c1) / b;
        let u = |y: f64| (c2 - b * y) / a;
        let tol = margin(Functional::Y);
        if a > 0.0 {
            // Where the first constraint binds any x >= c1 is feasible;
            // elsewhere phi >= c2 implies x >= c1.
            let (first_part, second_part) = if b > 0.0 {
                ((sl.max(ya), sr), (sl, sr.min(ya)))
            } else {
                ((sl, sr.min(ya)), (sl.max(ya), sr))
            };
            let mut out = Vec::new();
            if first_part.0 <= first_part.1 + tol {
                let (lo, hi) = first_part;
                out.push(piece(Functional::X, c1, x_max.max(c1), Functional::Y, lo, hi.max(lo)));
            }
            if second_part.0 <= second_part.1 + tol {
                let (lo, hi) = second_part;
                out.push(piece(Functional::Phi, c2, phi_max.max(c2), Functional::Y, lo, hi.max(lo)));
            }
            return (out, ReportCase::Open);
        }
        // a < 0: c1 <= x <= u(y); the width u(y) - c1 grows away from the
        // apex height ya, upwards when b > 0.
        let (near, far) = if b > 0.0 {
            if sr < ya - tol {
                return (Vec::new(), ReportCase::C);
            }
            (sl.max(ya), sr)
        } else {
            if sl > ya + tol {
                return (Vec::new(), ReportCase::C);
            }
            (sr.min(ya), sl)
        };
        let span = |y0: f64, y1: f64| (y0.min(y1), y0.max(y1));
        let mut out = Vec::new();
        let triangle = |out: &mut Vec<Piece<T>>, x0: f64, apex: f64| {
            let mid = 0.5 * (apex + far);
            let x_star = u(mid);
            let phi_star = a * x0 + b * mid;
            let (y_lo, y_hi) = span(mid, far);
            out.push(piece(Functional::X, x0, x_star.max(x0), Functional::Phi, c2, phi_star.max(c2)));
            out.push(piece(Functional::Y, y_lo, y_hi, Functional::Phi, c2, phi_star.max(c2)));
            out.push(piece(Functional::X, x0, x_star.max(x0), Functional::Y, y_lo, y_hi));
        };
        if (near - ya).abs() <= tol {
            triangle(&mut out, c1, ya);
            return (out, ReportCase::C);
        }
        let x_near = u(near);
        let (y_lo, y_hi) = span(near, far);
        out.push(piece(Functional::X, c1, x_near.max(c1), Functional::Y, y_lo, y_hi));
        triangle(&mut out, x_near, near);
        // The parallels to both constraints through their crossings with the
        // narrow edge meet at height 2*near - ya.
        let y_meet = 2.0 * near - ya;
        let beyond = if b > 0.0 { y_meet > far } else { y_meet < far };
        let case = if (y_meet - far).abs() <= tol {
            ReportCase::A
        } else if beyond {
            ReportCase::B
        } else {
            ReportCase::D
        };
        (out, case)
    }

    fn sweep_setup<'a>(&self, piece: &'a Piece<T>) -> Sweep<'a, T> {
        let c = self.canonical();
        sweep_setup(&c.p, &c.q, piece, |f, pt| self.value(f, pt))
    }

    fn accept(&self, pieces: &[Piece<T>], idx: usize, i: u32, j: u32, s_l: T, s_r: T) -> bool {
        let s = self.sum(i, j);
        self.in_range(s, s_l, s_r) && !pieces[..idx].iter().any(|pc| self.in_piece(pc, s))
    }

    /// Every feasible pair with value in `[s_l, s_r]`, once per multiplicity.
    pub fn report(&self, s_l: T, s_r: T) -> Vec<(u32, u32)> {
        let (pieces, _) = self.pieces(s_l, s_r);
        let mut out = Vec::new();
        let mut ids = Vec::new();
        for (idx, pc) in pieces.iter().enumerate() {
            let sw = self.sweep_setup(pc);
            sweep(&sw, |i, tree, lo, hi| {
                ids.clear();
                tree.report_range(lo, hi, &mut ids);
                for &j in &ids {
                    if self.accept(&pieces, idx, i, j, s_l, s_r) {
                        out.push((i, j));
                    }
                }
            });
        }
        debug_assert_eq!(out.len() as u64, self.count(s_l, s_r), "range report disagrees with range count");
        out
    }

    /// Number of feasible pairs with value in `[s_l, s_r]`.
    pub fn count(&self, s_l: T, s_r: T) -> u64 {
        if s_l > s_r {
            return 0;
        }
        self.two.count_above(s_l.pred()) - self.two.count_above(s_r)
    }

    /// `need` independent uniform draws, with replacement, from the feasible
    /// pairs with value in `[s_l, s_r]`. Draws are spread over the pieces by
    /// their sizes and rejected when infeasible or already covered by an
    /// earlier piece.
    pub fn sample<R: Rng + ?Sized>(&self, s_l: T, s_r: T, need: usize, rng: &mut R) -> Result<Vec<(u32, u32)>> {
        if self.count(s_l, s_r) == 0 {
            return Err(Error::Infeasible);
        }
        let (pieces, _) = self.pieces(s_l, s_r);
        let sweeps: Vec<Sweep<'_, T>> = pieces.iter().map(|pc| self.sweep_setup(pc)).collect();
        let mut masses = Vec::with_capacity(pieces.len());
        for sw in &sweeps {
            let mut m = 0u64;
            sweep(sw, |_, tree, lo, hi| m += tree.count_range(lo, hi) as u64);
            masses.push(m);
        }
        let total: u64 = masses.iter().sum();
        let mut out = Vec::with_capacity(need);
        while out.len() < need {
            let batch = 2 * (need - out.len()) + 16;
            let mut draws: Vec<(u64, usize)> = (0..batch).map(|d| (rng.random_range(0..total), d)).collect();
            draws.sort_unstable();
            let mut picked: Vec<Option<(u32, u32)>> = vec![None; batch];
            let (mut base, mut next) = (0u64, 0usize);
            for (idx, sw) in sweeps.iter().enumerate() {
                let end = base + masses[idx];
                let mut cum = base;
                sweep(sw, |i, tree, lo, hi| {
                    let cnt = tree.count_range(lo, hi) as u64;
                    let below = tree.count_less(lo);
                    while next < draws.len() && draws[next].0 < cum + cnt {
                        let r = (draws[next].0 - cum) as usize;
                        let (_, j) = tree.select(below + r).expect("rank inside window");
                        if self.accept(&pieces, idx, i, j, s_l, s_r) {
                            picked[draws[next].1] = Some((i, j));
                        }
                        next += 1;
                    }
                    cum += cnt;
                });
                debug_assert_eq!(cum, end);
                base = end;
            }
            out.extend(picked.into_iter().flatten().take(need - out.len()));
        }
        Ok(out)
    }
}

fn sweep_setup<'a, T: Scalar>(
    p: &[Point<T>],
    q: &[Point<T>],
    piece: &'a Piece<T>,
    value: impl Fn(Functional, Point<T>) -> T,
) -> Sweep<'a, T> {
    let pg: Vec<T> = p.iter().map(|&pt| value(piece.g, pt)).collect();
    let qg: Vec<T> = q.iter().map(|&pt| value(piece.g, pt)).collect();
    let ph: Vec<T> = p.iter().map(|&pt| value(piece.h, pt)).collect();
    let qh: Vec<T> = q.iter().map(|&pt| value(piece.h, pt)).collect();
    let mut p_order: Vec<u32> = (0..pg.len() as u32).collect();
    p_order.sort_by(|&i, &j| pg[i as usize].total_cmp(&pg[j as usize]).then(i.cmp(&j)));
    let mut q_order: Vec<u32> = (0..qg.len() as u32).collect();
    q_order.sort_by(|&i, &j| qg[i as usize].total_cmp(&qg[j as usize]).then(i.cmp(&j)));
    Sweep { p_order, q_order, qg, ph, qh, pg, piece }
}

/// Visits every `p` with the tree holding the `q` whose `g` fits, and
/// the matching `h` interval for `q`.
fn sweep<T: Scalar>(s: &Sweep<'_, T>, mut visit: impl FnMut(u32, &OrderStatisticTree<T>, T, T)) {
    let (g_lo, g_hi) = s.piece.g_range;
    let (h_lo, h_hi) = s.piece.h_range;
    let mut tree = OrderStatisticTree::new();
    let qg_at = |k: usize| s.qg[s.q_order[k] as usize];
    let n = s.q_order.len();
    let (mut lo, mut hi) = (n, n);
    for &i in &s.p_order {
        let g = s.pg[i as usize];
        let new_lo = partition(n, |k| qg_at(k) < g_lo - g);
        let new_hi = partition(n, |k| qg_at(k) <= g_hi - g).max(new_lo);
        for k in lo.max(new_hi)..hi {
            let j = s.q_order[k];
            tree.remove(s.qh[j as usize], j);
        }
        for k in new_lo..lo.min(new_hi) {
            let j = s.q_order[k];
            tree.insert(s.qh[j as usize], j);
        }
        lo = new_lo;
        hi = new_hi;
        let h = s.ph[i as usize];
        visit(i, &tree, h_lo - h, h_hi - h);
    }
}

fn partition(n: usize, pred: impl Fn(usize) -> bool) -> usize {
    let (mut lo, mut hi) = (0, n);
    while lo < hi {
        let mid = (lo + hi) / 2;
        if pred(mid) {
            lo = mid + 1;
        } else {
            hi = mid;
        }
    }
    lo
}

/// Pairs with `c1 <= x <= c2` and `s_l <= y <= s_r`, by one sliding-window
/// sweep over `q` sorted by `x`.
pub fn range_report_weak<T: Scalar>(p: &[Point<T>], q: &[Point<T>], (c1, c2): (T, T), (s_l, s_r): (T, T)) -> Vec<(u32, u32)> {
    let piece = Piece { g: Functional::X, g_range: (c1, c2), h: Functional::Y, h_range: (s_l, s_r) };
    let sw = sweep_setup(p, q, &piece, |f, pt| if f == Functional::X { pt.x } else { pt.y });
    let mut out = Vec::new();
    let mut ids = Vec::new();
    sweep(&sw, |i, tree, lo, hi| {
        ids.clear();
        tree.report_range(lo, hi, &mut ids);
        out.extend(ids.iter().map(|&j| (i, j)));
    });
    out
}

fn engine_for<T: Scalar>(
    p: &[Point<T>],
    q: &[Point<T>],
    l1: &Constraint<T>,
    l2: &Constraint<T>,
    obj: (T, T),
    eps: T,
) -> Result<RangeEngine<T>> {
    validate(p, q, &[*l1, *l2], obj)?;
    if constraints_parallel(l1, l2, eps) {
        return Err(Error::InvalidInput("the randomized engine needs two non-parallel constraints".into()));
    }
    Ok(RangeEngine::new(transform_two(p, q, l1, l2, obj, eps)?, eps))
}

/// Feasible pairs with objective value in `[s_l, s_r]`.
#[allow(clippy::too_many_arguments)]
pub fn range_report<T: Scalar>(
    p: &[Point<T>],
    q: &[Point<T>],
    l1: &Constraint<T>,
    l2: &Constraint<T>,
    obj: (T, T),
    (s_l, s_r): (T, T),
    eps: T,
) -> Result<Vec<(u32, u32)>> {
    Ok(engine_for(p, q, l1, l2, obj, eps)?.report(s_l, s_r))
}

/// Number of feasible pairs with objective value in `[s_l, s_r]`.
pub fn range_count<T: Scalar>(
    p: &[Point<T>],
    q: &[Point<T>],
    l1: &Constraint<T>,
    l2: &Constraint<T>,
    obj: (T, T),
    (s_l, s_r): (T, T),
    eps: T,
) -> Result<u64> {
    Ok(engine_for(p, q, l1, l2, obj, eps)?.count(s_l, s_r))
}

/// `need` uniform draws with replacement from the feasible pairs with
/// objective value in `[s_l, s_r]`.
#[allow(clippy::too_many_arguments)]
pub fn sample_feasible<T: Scalar>(
    p: &[Point<T>],
    q: &[Point<T>],
    l1: &Constraint<T>,
    l2: &Constraint<T>,
    obj: (T, T),
    (s_l, s_r): (T, T),
    need: usize,
    seed: u64,
) -> Result<Vec<(u32, u32)>> {
    engine_for(p, q, l1, l2, obj, T::ZERO)?.sample(s_l, s_r, need, &mut seeded(seed))
}

/// `k`-th largest value of `d*x + e*y` under two non-parallel constraints,
/// by random contraction. The answer equals [`crate::selection::selection_2`];
/// the running time is random.
#[allow(clippy::too_many_arguments)]
pub fn selection_2_randomized<T: Scalar>(
    p: &[Point<T>],
    q: &[Point<T>],
    l1: &Constraint<T>,
    l2: &Constraint<T>,
    obj: (T, T),
    k: u64,
    eps: T,
    seed: u64,
) -> Result<(Selected<T>, ContractionStats<T>)> {
    let engine = engine_for(p, q, l1, l2, obj, eps)?;
    contract(&engine, k, seed)
}

/// Contraction loop over a prepared engine.
pub fn contract<T: Scalar>(engine: &RangeEngine<T>, k: u64, seed: u64) -> Result<(Selected<T>, ContractionStats<T>)> {
    const T_CONST: f64 = 3.0;
    const ENUMERATE_FLOOR: u64 = 64;
    let counter = engine.counter();
    check_rank(k, counter.feasible_count())?;
    let c = engine.canonical();
    let ys = |pts: &[Point<T>]| pts.iter().fold((pts[0].y, pts[0].y), |(lo, hi), pt| (lo.min_of(pt.y), hi.max_of(pt.y)));
    let (py, qy) = (ys(&c.p), ys(&c.q));
    let (mut lo, mut hi) = (py.0 + qy.0, py.1 + qy.1);
    let n = c.p.len().max(c.q.len());
    let sqrt_n = (n as f64).sqrt();
    let mut rng = seeded(seed);
    let mut stats = ContractionStats { intervals: vec![(lo, hi)], ..Default::default() };
    let is_answer = |v: T| counter.count_above(v) < k && k <= counter.count_above(v.pred());
    let finish = |value: T, stats: ContractionStats<T>, witness: (u32, u32)| {
        debug_assert!(stats.intervals.iter().all(|&(a, b)| a <= value && value <= b));
        Ok((Selected { value, witness: (witness.0 as usize, witness.1 as usize) }, stats))
    };
    let witness_at = |v: T| {
        engine.report(v, v).into_iter().next().ok_or(Error::NoSuchValue)
    };
    let mut attempts = 0u32;
    loop {
        let big_n = engine.count(lo, hi);
        let local_k = k - counter.count_above(hi);
        if big_n <= (4 * n as u64).max(ENUMERATE_FLOOR) {
            let mut pts: Vec<(T, (u32, u32))> =
                engine.report(lo, hi).into_iter().map(|(i, j)| (engine.sum(i, j).y, (i, j))).collect();
            stats.enumerated = pts.len() as u64;
            pts.sort_by(|a, b| b.0.total_cmp(&a.0).then(a.1.cmp(&b.1)));
            let (value, w) = *pts.get((local_k - 1) as usize).ok_or(Error::NoSuchValue)?;
            return finish(value, stats, w);
        }
        attempts += 1;
        let mut sample: Vec<T> = engine.sample(lo, hi, n, &mut rng)?.into_iter().map(|(i, j)| engine.sum(i, j).y).collect();
        sample.sort_by(|a, b| b.total_cmp(a));
        let e = n as f64 * local_k as f64 / big_n as f64;
        let l_pos = ((e - T_CONST * sqrt_n / 2.0).floor() as i64).max(1) as usize;
        let r_pos = ((e + T_CONST * sqrt_n / 2.0).floor() as i64).clamp(l_pos as i64, n as i64) as usize;
        let (v_hi, v_lo) = (sample[l_pos - 1], sample[r_pos - 1]);
        for v in [v_hi, v_lo] {
            if is_answer(v) {
                stats.attempts.push(attempts);
                stats.intervals.push((v, v));
                return finish(v, stats, witness_at(v)?);
            }
        }
        let contains = counter.count_above(v_hi) < k && k <= counter.count_above(v_lo.pred());
        let inside = engine.count(v_lo, v_hi);
        let small = inside < big_n && inside as f64 <= T_CONST * T_CONST * big_n as f64 / ((T_CONST - 1.0) * sqrt_n);
        if contains && small {
            stats.attempts.push(attempts);
            attempts = 0;
            lo = v_lo;
            hi = v_hi;
            stats.intervals.push((lo, hi));
        }
    }
}
