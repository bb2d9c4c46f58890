//! Divide-and-conquer decompositions of the feasible pair set into product
//! blocks `B x D` whose every pair is feasible.

use std::ops::Range;

use crate::error::{Error, Result};
use crate::geometry::{Bound, Constraint, Point};
use crate::scalar::Scalar;
use crate::sorted_matrix::MatrixCollection;

/// A constraint on pair sums, `bound.admits(p_keys[i] + q_keys[j])`.
#[derive(Clone, Debug)]
pub struct KeyedConstraint<T> {
    pub p_keys: Vec<T>,
    pub q_keys: Vec<T>,
    pub bound: Bound<T>,
}

impl<T: Scalar> KeyedConstraint<T> {
    pub fn new(p_keys: Vec<T>, q_keys: Vec<T>, bound: Bound<T>) -> Self {
        Self { p_keys, q_keys, bound }
    }

    pub fn from_constraint(c: &Constraint<T>, p: &[Point<T>], q: &[Point<T>], eps: T) -> Self {
        Self {
            p_keys: p.iter().map(|&pt| c.eval(pt)).collect(),
            q_keys: q.iter().map(|&pt| c.eval(pt)).collect(),
            bound: c.bound(eps),
        }
    }

    /// The pairs this constraint rejects.
    pub fn complement(&self) -> Self {
        Self {
            p_keys: self.p_keys.iter().map(|&k| -k).collect(),
            q_keys: self.q_keys.iter().map(|&k| -k).collect(),
            bound: self.bound.complement(),
        }
    }

    #[inline]
    pub fn admits(&self, i: u32, j: u32) -> bool {
        self.bound.admits(self.p_keys[i as usize] + self.q_keys[j as usize])
    }
}

/// Borrowed product block: every pair in `p x q` is feasible.
#[derive(Clone, Copy, Debug)]
pub struct ProductBlock<'a> {
    pub p: &'a [u32],
    pub q: &'a [u32],
}

/// Blocks stored back to back.
#[derive(Clone, Debug, Default)]
pub struct Decomposition {
    p_ids: Vec<u32>,
    q_ids: Vec<u32>,
    spans: Vec<(usize, usize, usize, usize)>,
}

impl Decomposition {
    pub fn push(&mut self, p: &[u32], q: &[u32]) {
        if p.is_empty() || q.is_empty() {
            return;
        }
        let (p0, q0) = (self.p_ids.len(), self.q_ids.len());
        self.p_ids.extend_from_slice(p);
        self.q_ids.extend_from_slice(q);
        self.spans.push((p0, self.p_ids.len(), q0, self.q_ids.len()));
    }

    pub fn len(&self) -> usize {
        self.spans.len()
    }

    pub fn is_empty(&self) -> bool {
        self.spans.is_empty()
    }

    pub fn block(&self, i: usize) -> ProductBlock<'_> {
        let (p0, p1, q0, q1) = self.spans[i];
        ProductBlock { p: &self.p_ids[p0..p1], q: &self.q_ids[q0..q1] }
    }

    pub fn blocks(&self) -> impl Iterator<Item = ProductBlock<'_>> + '_ {
        (0..self.len()).map(move |i| self.block(i))
    }

    /// Sum of `|B| + |D|` over all blocks.
    pub fn total_side(&self) -> usize {
        self.p_ids.len() + self.q_ids.len()
    }

    /// Number of pairs covered.
    pub fn pair_count(&self) -> u64 {
        self.blocks().map(|b| b.p.len() as u64 * b.q.len() as u64).sum()
    }

    /// Sorted matrices of the pair sums of `p_vals[i] + q_vals[j]`.
    pub fn to_matrices<T: Scalar>(&self, p_vals: &[T], q_vals: &[T]) -> MatrixCollection<T> {
        let mut out = MatrixCollection::new();
        for b in self.blocks() {
            out.push_unsorted(b.p, p_vals, b.q, q_vals);
        }
        out
    }
}

fn sorted_ids<T: Scalar>(ids: impl Iterator<Item = u32>, keys: &[T]) -> Vec<u32> {
    let mut v: Vec<u32> = ids.collect();
    v.sort_by(|&a, &b| keys[a as usize].total_cmp(&keys[b as usize]).then(a.cmp(&b)));
    v
}

/// Builds sorted matrices holding the values `p_val[i] + q_val[j]` of every
/// pair admitted by `bound` on `p_key[i] + q_key[j]`.
///
/// Splits the key-sorted `P` in half, finds the largest prefix `C` of the
/// key-sorted `Q` that fails against the median, emits `B x D` and recurses on
/// `A x D` and `B x C`. Value-sorted copies are filtered on the way down so
/// each level is linear.
pub fn construct_matrices<T: Scalar>(
    p_key: &[T],
    p_val: &[T],
    q_key: &[T],
    q_val: &[T],
    bound: Bound<T>,
) -> MatrixCollection<T> {
    let mut out = MatrixCollection::new();
    let p_ids: Vec<u32> = (0..p_key.len() as u32).collect();
    let q_ids: Vec<u32> = (0..q_key.len() as u32).collect();
    construct_matrices_into(&mut out, &p_ids, &q_ids, p_key, p_val, q_key, q_val, bound);
    out
}

/// [`construct_matrices`] restricted to the given ids, appending to `out`.
#[allow(clippy::too_many_arguments)]
pub fn construct_matrices_into<T: Scalar>(
    out: &mut MatrixCollection<T>,
    p_ids: &[u32],
    q_ids: &[u32],
    p_key: &[T],
    p_val: &[T],
    q_key: &[T],
    q_val: &[T],
    bound: Bound<T>,
) {
    if p_ids.is_empty() || q_ids.is_empty() {
        return;
    }
    let px = sorted_ids(p_ids.iter().copied(), p_key);
    let qx = sorted_ids(q_ids.iter().copied(), q_key);
    // Value-sorted items carry their value and position in the key
    // order, so the recursion only streams through contiguous memory.
    let items = |ids: &[u32], order: &[u32], key: &[T], val: &[T]| -> Vec<Item<T>> {
        let mut pos = vec![0u32; key.len()];
        for (i, &id) in order.iter().enumerate() {
            pos[id as usize] = i as u32;
        }
        let mut v: Vec<Item<T>> =
            ids.iter().map(|&id| Item { val: val[id as usize], id, pos: pos[id as usize] }).collect();
        v.sort_by(|a, b| a.val.total_cmp(&b.val).then(a.id.cmp(&b.id)));
        v
    };
    let mut py = items(p_ids, &px, p_key, p_val);
    let mut qy = items(q_ids, &qx, q_key, q_val);
    let mut scratch = Vec::with_capacity(py.len().max(qy.len()));
    // Each recursion level emits at most every id once per side.
    let depth = (usize::BITS - py.len().leading_zeros()) as usize + 1;
    out.reserve(py.len() * depth, qy.len() * depth);
    let ctx = Ctx { px: &px, qx: &qx, p_key, q_key, bound };
    ctx.recurse(out, 0..px.len(), 0..qx.len(), &mut py, &mut qy, &mut scratch);
}

#[derive(Clone, Copy)]
struct Item<T> {
    val: T,
    id: u32,
    pos: u32,
}

struct Ctx<'a, T> {
    px: &'a [u32],
    qx: &'a [u32],
    p_key: &'a [T],
    q_key: &'a [T],
    bound: Bound<T>,
}

impl<T: Scalar> Ctx<'_, T> {
    fn recurse(
        &self,
        out: &mut MatrixCollection<T>,
        pr: Range<usize>,
        qr: Range<usize>,
        py: &mut [Item<T>],
        qy: &mut [Item<T>],
        scratch: &mut Vec<Item<T>>,
    ) {
        let (n, m) = (pr.len(), qr.len());
        if n == 0 || m == 0 {
            return;
        }
        if n == 1 || m == 1 {
            // Feasibility is monotone in key order, so each leaf keeps a
            // suffix of the other side's key positions.
            if n == 1 {
                let p = py[0];
                let x = self.p_key[self.px[p.pos as usize] as usize];
                let qs = &self.qx[qr.clone()];
                let t = (qr.start + qs.partition_point(|&j| !self.bound.admits(x + self.q_key[j as usize]))) as u32;
                out.push_sorted([(p.val, p.id)], qy.iter().filter(|j| j.pos >= t).map(|j| (j.val, j.id)));
            } else {
                let q = qy[0];
                let y = self.q_key[self.qx[q.pos as usize] as usize];
                let ps = &self.px[pr.clone()];
                let t = (pr.start + ps.partition_point(|&i| !self.bound.admits(self.p_key[i as usize] + y))) as u32;
                out.push_sorted(py.iter().filter(|i| i.pos >= t).map(|i| (i.val, i.id)), [(q.val, q.id)]);
            }
            return;
        }
        let half = n.div_ceil(2);
        let split = pr.start + half;
        let xm = self.p_key[self.px[split - 1] as usize];
        let qs = &self.qx[qr.clone()];
        let t = qr.start + qs.partition_point(|&j| !self.bound.admits(xm + self.q_key[j as usize]));
        let na = stable_split(py, scratch, |i| (i.pos as usize) < split);
        let nc = stable_split(qy, scratch, |j| (j.pos as usize) < t);
        let (a_y, b_y) = py.split_at_mut(na);
        let (c_y, d_y) = qy.split_at_mut(nc);
        out.push_sorted(b_y.iter().map(|i| (i.val, i.id)), d_y.iter().map(|j| (j.val, j.id)));
        self.recurse(out, pr.start..split, t..qr.end, a_y, d_y, scratch);
        self.recurse(out, split..pr.end, qr.start..t, b_y, c_y, scratch);
    }
}

/// Moves the items matching `left` to the front, keeping relative order in
/// both parts. Returns the size of the front part.
fn stable_split<T: Copy>(v: &mut [T], scratch: &mut Vec<T>, left: impl Fn(&T) -> bool) -> usize {
    scratch.clear();
    let mut w = 0;
    for r in 0..v.len() {
        let x = v[r];
        if left(&x) {
            v[w] = x;
            w += 1;
        } else {
            scratch.push(x);
        }
    }
    v[w..].copy_from_slice(scratch);
    w
}

/// Splits `P x Q` into product blocks that satisfy every constraint. Each
/// constraint is applied in turn to the blocks produced by the previous ones.
pub fn product_blocks<T: Scalar>(np: usize, nq: usize, constraints: &[KeyedConstraint<T>]) -> Decomposition {
    let p: Vec<u32> = (0..np as u32).collect();
    let q: Vec<u32> = (0..nq as u32).collect();
    product_blocks_on(&p, &q, constraints)
}

/// [`product_blocks`] over the sub-multisets `p x q`.
pub fn product_blocks_on<T: Scalar>(p: &[u32], q: &[u32], constraints: &[KeyedConstraint<T>]) -> Decomposition {
    let mut out = Decomposition::default();
    refine(&mut out, p, q, constraints);
    out
}

fn refine<T: Scalar>(out: &mut Decomposition, p: &[u32], q: &[u32], constraints: &[KeyedConstraint<T>]) {
    if p.is_empty() || q.is_empty() {
        return;
    }
    let Some((first, rest)) = constraints.split_first() else {
        out.push(p, q);
        return;
    };
    let px = sorted_ids(p.iter().copied(), &first.p_keys);
    let qx = sorted_ids(q.iter().copied(), &first.q_keys);
    split_one(first, &px, &qx, &mut |b, d| refine(out, b, d, rest));
}

/// One-constraint split over key-sorted slices, calling `emit` per block.
fn split_one<T: Scalar>(c: &KeyedConstraint<T>, px: &[u32], qx: &[u32], emit: &mut dyn FnMut(&[u32], &[u32])) {
    let (n, m) = (px.len(), qx.len());
    if n == 0 || m == 0 {
        return;
    }
    if n == 1 {
        let s = qx.partition_point(|&j| !c.admits(px[0], j));
        emit(px, &qx[s..]);
        return;
    }
    if m == 1 {
        let s = px.partition_point(|&i| !c.admits(i, qx[0]));
        emit(&px[s..], qx);
        return;
    }
    let half = n.div_ceil(2);
    let xm = px[half - 1];
    let t = qx.partition_point(|&j| !c.admits(xm, j));
    emit(&px[half..], &qx[t..]);
    split_one(c, &px[..half], &qx[t..], emit);
    split_one(c, &px[half..], &qx[..t], emit);
}

/// Bucket pair of the strip partition: `(p x q_same)` needs only the lower
/// bound, `(p x q_prev)` only the upper one.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct StripBucket {
    pub p: Vec<u32>,
    pub q_same: Vec<u32>,
    pub q_prev: Vec<u32>,
}

/// Which strip sides still have to be checked inside a block.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum StripNeed {
    None,
    Lower,
    Upper,
    Both,
}

/// Sub-multisets whose pairs lie in the strip once `need` is enforced.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StripTask {
    pub p: Vec<u32>,
    pub q: Vec<u32>,
    pub need: StripNeed,
}

#[derive(Clone, Debug)]
pub struct StripPartition {
    pub buckets: Vec<StripBucket>,
    pub tasks: Vec<StripTask>,
    pub p_bucket_count: usize,
    pub q_bucket_count: usize,
}

fn group_by_bucket<T: Scalar>(keys: &[T], bucket: impl Fn(T) -> i128) -> Vec<(i128, Vec<u32>)> {
    let mut tagged: Vec<(i128, T, u32)> =
        keys.iter().enumerate().map(|(i, &k)| (bucket(k), k, i as u32)).collect();
    tagged.sort_by(|a, b| a.0.cmp(&b.0).then(a.1.total_cmp(&b.1)).then(a.2.cmp(&b.2)));
    let mut out: Vec<(i128, Vec<u32>)> = Vec::new();
    for (t, _, id) in tagged {
        match out.last_mut() {
            Some((last, v)) if *last == t => v.push(id),
            _ => out.push((t, vec![id])),
        }
    }
    out
}

/// Partitions a strip `lower <= p_key + q_key <= upper` into bucket pairs of
/// width `upper - lower`. `lower` admits the sum, `upper` admits its negation.
pub fn parallel_blocks<T: Scalar>(
    p_keys: &[T],
    q_keys: &[T],
    lower: Bound<T>,
    upper: Bound<T>,
) -> Result<StripPartition> {
    let (c1, c2) = (lower.c, -upper.c);
    if c1 > c2 {
        return Err(Error::Infeasible);
    }
    let w = c2 - c1;
    if w.is_zero() {
        return Err(Error::InvalidInput("zero-width strip has no bucket partition".into()));
    }
    let pb = group_by_bucket(p_keys, |x| T::ceil_div(x, w).to_i128());
    let qb = group_by_bucket(q_keys, |x| T::ceil_div(c1 - x, w).to_i128());
    let q_index = |t: i128| qb.binary_search_by(|(b, _)| b.cmp(&t)).ok();
    let mut buckets = Vec::new();
    let mut tasks = Vec::new();
    for (t, p) in &pb {
        let same = q_index(*t);
        let prev = q_index(t - 1);
        buckets.push(StripBucket {
            p: p.clone(),
            q_same: same.map(|i| qb[i].1.clone()).unwrap_or_default(),
            q_prev: prev.map(|i| qb[i].1.clone()).unwrap_or_default(),
        });
        // Exact arithmetic only pairs buckets t and t-1; the neighbours
        // matter when a tolerance widens the strip.
        for dt in [1i128, 0, -1, -2] {
            let Some(qi) = q_index(t + dt) else { continue };
            let q = &qb[qi].1;
            let smin = p_keys[p[0] as usize] + q_keys[q[0] as usize];
            let smax = p_keys[*p.last().unwrap() as usize] + q_keys[*q.last().unwrap() as usize];
            if !lower.admits(smax) || !upper.admits(-smin) {
                continue;
            }
            let need = match (lower.admits(smin), upper.admits(-smax)) {
                (true, true) => StripNeed::None,
                (true, false) => StripNeed::Upper,
                (false, true) => StripNeed::Lower,
                (false, false) => StripNeed::Both,
            };
            tasks.push(StripTask { p: p.clone(), q: q.clone(), need });
        }
    }
    Ok(StripPartition { buckets, tasks, p_bucket_count: pb.len(), q_bucket_count: qb.len() })
}

/// Sorted matrices of `p_val + q_val` over the strip `lower <= key sum`,
/// `key sum <= upper` (upper given as a bound on the negated sum).
pub fn strip_matrices<T: Scalar>(
    p_keys: &[T],
    p_vals: &[T],
    q_keys: &[T],
    q_vals: &[T],
    lower: Bound<T>,
    upper: Bound<T>,
) -> Result<MatrixCollection<T>> {
    let (c1, c2) = (lower.c, -upper.c);
    if c1 > c2 {
        return Err(Error::Infeasible);
    }
    let lo = KeyedConstraint::new(p_keys.to_vec(), q_keys.to_vec(), lower);
    let neg_p: Vec<T> = p_keys.iter().map(|&k| -k).collect();
    let neg_q: Vec<T> = q_keys.iter().map(|&k| -k).collect();
    let hi = KeyedConstraint::new(neg_p, neg_q, upper);
    if (c2 - c1).is_zero() {
        return Ok(product_blocks(p_keys.len(), q_keys.len(), &[lo, hi]).to_matrices(p_vals, q_vals));
    }
    let part = parallel_blocks(p_keys, q_keys, lower, upper)?;
    let mut out = MatrixCollection::new();
    for task in &part.tasks {
        match task.need {
            StripNeed::None => out.push_unsorted(&task.p, p_vals, &task.q, q_vals),
            StripNeed::Lower => construct_matrices_into(
                &mut out, &task.p, &task.q, &lo.p_keys, p_vals, &lo.q_keys, q_vals, lower,
            ),
            StripNeed::Upper => construct_matrices_into(
                &mut out, &task.p, &task.q, &hi.p_keys, p_vals, &hi.q_keys, q_vals, upper,
            ),
            StripNeed::Both => {
                let d = product_blocks_on(&task.p, &task.q, &[lo.clone(), hi.clone()]);
                for b in d.blocks() {
                    out.push_unsorted(b.p, p_vals, b.q, q_vals);
                }
            }
        }
    }
    Ok(out)
}

/// Index windows of the length-constrained partition over prefix points
/// `p_i` (`i = 0..=n`) and `q_{-i}`. Pairs `(p_j, q_{-i})` in `p x q_lower`
/// satisfy `j - i <= u` automatically, pairs in `p x q_upper` satisfy
/// `j - i >= l`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LcssWindow {
    /// Range of `j`.
    pub p: Range<usize>,
    /// Range of `i` paired under `j - i >= l`.
    pub q_lower: Range<usize>,
    /// Range of `i` paired under `j - i <= u`.
    pub q_upper: Range<usize>,
}

/// Windows of width `u - l` covering every pair with `l <= j - i <= u`.
pub fn lcss_blocks(n: usize, l: usize, u: usize) -> Result<Vec<LcssWindow>> {
    if l == 0 || l >= u {
        return Err(Error::InvalidInput(format!("need 1 <= l < u, got l={l}, u={u}")));
    }
    let w = (u - l) as i64;
    let (n_i, l_i) = (n as i64, l as i64);
    let clamp_q = |lo: i64, hi: i64| -> Range<usize> {
        // q index h in [lo, hi) maps to i = -h in (-hi, -lo].
        let a = (-hi + 1).max(0);
        let b = (-lo).min(n_i);
        if a > b {
            0..0
        } else {
            a as usize..(b + 1) as usize
        }
    };
    let mut out = Vec::new();
    let t_max = (n_i + w - 1) / w;
    for t in 0..=t_max {
        let p0 = (t * w - w + 1).max(0);
        let p1 = (t * w).min(n_i);
        if p0 > p1 {
            continue;
        }
        let j_t = l_i - t * w;
        out.push(LcssWindow {
            p: p0 as usize..(p1 + 1) as usize,
            q_lower: clamp_q(j_t, j_t + w),
            q_upper: clamp_q(j_t + w, j_t + 2 * w),
        });
    }
    Ok(out)
}
