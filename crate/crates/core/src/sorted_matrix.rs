//! Implicit sorted matrices `X[i][j] = rows[i] + cols[j]` and selection or
//! ranking over collections of them.

use rand::Rng;

use crate::error::{Error, Result};
use crate::geometry::Bound;
use crate::scalar::Scalar;

/// An entry located by a query, with the provenance ids of its row and column.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Entry<T> {
    pub value: T,
    pub row_id: u32,
    pub col_id: u32,
}

impl<T: Scalar> Entry<T> {
    fn beats_low(&self, other: &Self) -> bool {
        match self.value.total_cmp(&other.value) {
            std::cmp::Ordering::Less => true,
            std::cmp::Ordering::Greater => false,
            std::cmp::Ordering::Equal => (self.row_id, self.col_id) < (other.row_id, other.col_id),
        }
    }

    fn beats_high(&self, other: &Self) -> bool {
        match self.value.total_cmp(&other.value) {
            std::cmp::Ordering::Greater => true,
            std::cmp::Ordering::Less => false,
            std::cmp::Ordering::Equal => (self.row_id, self.col_id) < (other.row_id, other.col_id),
        }
    }
}

/// Keeps the smaller entry, ties going to the smaller `(row_id, col_id)`.
pub fn keep_min<T: Scalar>(best: &mut Option<Entry<T>>, e: Entry<T>) {
    if best.as_ref().is_none_or(|b| e.beats_low(b)) {
        *best = Some(e);
    }
}

/// Keeps the larger entry, ties going to the smaller `(row_id, col_id)`.
pub fn keep_max<T: Scalar>(best: &mut Option<Entry<T>>, e: Entry<T>) {
    if best.as_ref().is_none_or(|b| e.beats_high(b)) {
        *best = Some(e);
    }
}

/// Owned sorted matrix; rows and cols are nondecreasing.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct ImplicitSortedMatrix<T> {
    pub rows: Vec<T>,
    pub cols: Vec<T>,
    pub row_ids: Vec<u32>,
    pub col_ids: Vec<u32>,
}

impl<T: Scalar> ImplicitSortedMatrix<T> {
    /// Sorts the inputs; provenance ids are the original positions.
    pub fn new(rows: Vec<T>, cols: Vec<T>) -> Self {
        let (rows, row_ids) = sorted_with_ids(rows);
        let (cols, col_ids) = sorted_with_ids(cols);
        Self { rows, cols, row_ids, col_ids }
    }

    pub fn view(&self) -> MatrixView<'_, T> {
        MatrixView { rows: &self.rows, cols: &self.cols, row_ids: &self.row_ids, col_ids: &self.col_ids }
    }
}

fn sorted_with_ids<T: Scalar>(v: Vec<T>) -> (Vec<T>, Vec<u32>) {
    let mut idx: Vec<u32> = (0..v.len() as u32).collect();
    idx.sort_by(|&a, &b| v[a as usize].total_cmp(&v[b as usize]).then(a.cmp(&b)));
    (idx.iter().map(|&i| v[i as usize]).collect(), idx)
}

/// Borrowed sorted matrix.
#[derive(Clone, Copy, Debug)]
pub struct MatrixView<'a, T> {
    pub rows: &'a [T],
    pub cols: &'a [T],
    pub row_ids: &'a [u32],
    pub col_ids: &'a [u32],
}

impl<'a, T: Scalar> MatrixView<'a, T> {
    pub fn side(&self) -> usize {
        self.rows.len() + self.cols.len()
    }

    pub fn entries(&self) -> u64 {
        self.rows.len() as u64 * self.cols.len() as u64
    }

    #[inline]
    pub fn value(&self, i: usize, j: usize) -> T {
        self.rows[i] + self.cols[j]
    }

    #[inline]
    pub fn entry(&self, i: usize, j: usize) -> Entry<T> {
        Entry { value: self.value(i, j), row_id: self.row_ids[i], col_id: self.col_ids[j] }
    }

    /// Staircase walk: for each row, the first column whose entry `bound`
    /// admits. Returns the number of cells evaluated.
    pub fn first_admitted(&self, bound: &Bound<T>, out: &mut Vec<u32>) -> usize {
        out.clear();
        let m = self.cols.len();
        let mut j = m;
        let mut probes = 0;
        for &r in self.rows {
            while j > 0 {
                probes += 1;
                if bound.admits(r + self.cols[j - 1]) {
                    j -= 1;
                } else {
                    break;
                }
            }
            out.push(j as u32);
        }
        probes
    }

    /// Number of entries admitted by `bound`, in `O(rows + cols)`.
    pub fn count_admitted(&self, bound: &Bound<T>) -> u64 {
        self.count_admitted_probed(bound).0
    }

    /// Like [`count_admitted`](Self::count_admitted), also reporting how many
    /// cells the walk evaluated.
    pub fn count_admitted_probed(&self, bound: &Bound<T>) -> (u64, usize) {
        let n = self.rows.len();
        let m = self.cols.len();
        let mut j = m;
        let mut cnt = 0u64;
        let mut probes = 0;
        for (i, &r) in self.rows.iter().enumerate() {
            while j > 0 {
                probes += 1;
                if bound.admits(r + self.cols[j - 1]) {
                    j -= 1;
                } else {
                    break;
                }
            }
            if j == 0 {
                cnt += (n - i) as u64 * m as u64;
                break;
            }
            cnt += (m - j) as u64;
        }
        (cnt, probes)
    }

    pub fn count_greater(&self, t: T) -> u64 {
        self.count_admitted(&Bound::greater_than(t))
    }

    /// Smallest admitted entry.
    pub fn min_admitted(&self, bound: &Bound<T>) -> Option<Entry<T>> {
        let m = self.cols.len();
        let mut j = m;
        let mut best = None;
        for (i, &r) in self.rows.iter().enumerate() {
            while j > 0 && bound.admits(r + self.cols[j - 1]) {
                j -= 1;
            }
            if j < m {
                keep_min(&mut best, self.entry(i, j));
            }
        }
        best
    }

    /// Largest entry that `bound` rejects.
    pub fn max_rejected(&self, bound: &Bound<T>) -> Option<Entry<T>> {
        let mut j = self.cols.len();
        let mut best = None;
        for (i, &r) in self.rows.iter().enumerate() {
            while j > 0 && bound.admits(r + self.cols[j - 1]) {
                j -= 1;
            }
            if j > 0 {
                keep_max(&mut best, self.entry(i, j - 1));
            }
        }
        best
    }

    pub fn min_entry_at_least(&self, t: T) -> Option<Entry<T>> {
        self.min_admitted(&Bound::at_least(t))
    }

    pub fn max_entry_below(&self, t: T) -> Option<Entry<T>> {
        self.max_rejected(&Bound::at_least(t))
    }

    pub fn max_entry_at_most(&self, t: T) -> Option<Entry<T>> {
        self.max_rejected(&Bound::greater_than(t))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
struct Span {
    row0: usize,
    row1: usize,
    col0: usize,
    col1: usize,
}

/// Collection of sorted matrices stored back to back.
#[derive(Clone, Debug)]
pub struct MatrixCollection<T> {
    rows: Vec<T>,
    cols: Vec<T>,
    row_ids: Vec<u32>,
    col_ids: Vec<u32>,
    spans: Vec<Span>,
}

impl<T> Default for MatrixCollection<T> {
    fn default() -> Self {
        Self { rows: Vec::new(), cols: Vec::new(), row_ids: Vec::new(), col_ids: Vec::new(), spans: Vec::new() }
    }
}

impl<T: Scalar> MatrixCollection<T> {
    pub fn new() -> Self {
        Self::default()
    }

    /// Appends a matrix from `(value, id)` pairs already sorted by value.
    /// Empty matrices are dropped.
    /// Reserves room for `rows` more row entries and `cols` more column entries.
    pub fn reserve(&mut self, rows: usize, cols: usize) {
        self.rows.reserve(rows);
        self.row_ids.reserve(rows);
        self.cols.reserve(cols);
        self.col_ids.reserve(cols);
    }

    pub fn push_sorted(
        &mut self,
        rows: impl IntoIterator<Item = (T, u32)>,
        cols: impl IntoIterator<Item = (T, u32)>,
    ) {
        let row0 = self.rows.len();
        let col0 = self.cols.len();
        for (v, id) in rows {
            self.rows.push(v);
            self.row_ids.push(id);
        }
        for (v, id) in cols {
            self.cols.push(v);
            self.col_ids.push(id);
        }
        let (row1, col1) = (self.rows.len(), self.cols.len());
        if row1 == row0 || col1 == col0 {
            self.rows.truncate(row0);
            self.row_ids.truncate(row0);
            self.cols.truncate(col0);
            self.col_ids.truncate(col0);
            return;
        }
        debug_assert!(self.rows[row0..row1].windows(2).all(|w| w[0] <= w[1]));
        debug_assert!(self.cols[col0..col1].windows(2).all(|w| w[0] <= w[1]));
        self.spans.push(Span { row0, row1, col0, col1 });
    }

    /// Appends a matrix over the given ids, sorting them by value.
    pub fn push_unsorted(&mut self, p_ids: &[u32], p_vals: &[T], q_ids: &[u32], q_vals: &[T]) {
        let mut r: Vec<(T, u32)> = p_ids.iter().map(|&i| (p_vals[i as usize], i)).collect();
        let mut c: Vec<(T, u32)> = q_ids.iter().map(|&i| (q_vals[i as usize], i)).collect();
        r.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
        c.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
        self.push_sorted(r, c);
    }

    pub fn push_matrix(&mut self, m: &ImplicitSortedMatrix<T>) {
        self.push_sorted(
            m.rows.iter().copied().zip(m.row_ids.iter().copied()),
            m.cols.iter().copied().zip(m.col_ids.iter().copied()),
        );
    }

    pub fn extend(&mut self, other: &MatrixCollection<T>) {
        for m in other.iter() {
            self.push_sorted(
                m.rows.iter().copied().zip(m.row_ids.iter().copied()),
                m.cols.iter().copied().zip(m.col_ids.iter().copied()),
            );
        }
    }

    pub fn len(&self) -> usize {
        self.spans.len()
    }

    pub fn is_empty(&self) -> bool {
        self.spans.is_empty()
    }

    pub fn matrix(&self, j: usize) -> MatrixView<'_, T> {
        let s = self.spans[j];
        MatrixView {
            rows: &self.rows[s.row0..s.row1],
            cols: &self.cols[s.col0..s.col1],
            row_ids: &self.row_ids[s.row0..s.row1],
            col_ids: &self.col_ids[s.col0..s.col1],
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = MatrixView<'_, T>> + '_ {
        (0..self.len()).map(move |j| self.matrix(j))
    }

    /// Sum of `rows + cols` over all matrices.
    pub fn total_side(&self) -> usize {
        self.rows.len() + self.cols.len()
    }

    /// Number of entries counted with multiplicity.
    pub fn total_entries(&self) -> u64 {
        self.iter().map(|m| m.entries()).sum()
    }

    pub fn count_admitted(&self, bound: &Bound<T>) -> u64 {
        self.iter().map(|m| m.count_admitted(bound)).sum()
    }

    pub fn count_greater(&self, t: T) -> u64 {
        self.count_admitted(&Bound::greater_than(t))
    }

    /// Entries strictly greater than `t`, plus one.
    pub fn rank(&self, t: T) -> u64 {
        self.count_greater(t) + 1
    }

    pub fn min_admitted(&self, bound: &Bound<T>) -> Option<Entry<T>> {
        let mut best = None;
        for m in self.iter() {
            if let Some(e) = m.min_admitted(bound) {
                keep_min(&mut best, e);
            }
        }
        best
    }

    pub fn max_rejected(&self, bound: &Bound<T>) -> Option<Entry<T>> {
        let mut best = None;
        for m in self.iter() {
            if let Some(e) = m.max_rejected(bound) {
                keep_max(&mut best, e);
            }
        }
        best
    }

    /// Every entry, for tests and small inputs.
    pub fn enumerate(&self) -> Vec<Entry<T>> {
        let mut out = Vec::new();
        for m in self.iter() {
            for i in 0..m.rows.len() {
                for j in 0..m.cols.len() {
                    out.push(m.entry(i, j));
                }
            }
        }
        out
    }

    /// The `k`-th largest entry (1-based, with multiplicity).
    pub fn select_kth<R: Rng + ?Sized>(&self, k: u64, rng: &mut R) -> Result<Entry<T>> {
        Selector::new(self).run(k, rng)
    }
}

/// Sample-based bracketing over the collection. Every round draws a uniform
/// sample of the surviving entries, brackets the target rank between two
/// sample order statistics and shrinks each row to the entries between them
/// using staircase walks. Once few candidates remain they are enumerated.
struct Selector<'a, T> {
    coll: &'a MatrixCollection<T>,
    /// Global row index -> matrix index.
    row_matrix: Vec<u32>,
    lo: Vec<u32>,
    hi: Vec<u32>,
    scratch: Vec<u32>,
    scratch_all: Vec<u32>,
}

impl<'a, T: Scalar> Selector<'a, T> {
    fn new(coll: &'a MatrixCollection<T>) -> Self {
        let mut row_matrix = Vec::with_capacity(coll.rows.len());
        let mut hi = Vec::with_capacity(coll.rows.len());
        for (j, s) in coll.spans.iter().enumerate() {
            for _ in s.row0..s.row1 {
                row_matrix.push(j as u32);
                hi.push((s.col1 - s.col0) as u32);
            }
        }
        let lo = vec![0; coll.rows.len()];
        Self { coll, row_matrix, lo, hi, scratch: Vec::new(), scratch_all: Vec::new() }
    }

    #[inline]
    fn entry_at(&self, row: usize, col: usize) -> Entry<T> {
        let s = self.coll.spans[self.row_matrix[row] as usize];
        let c = s.col0 + col;
        Entry {
            value: self.coll.rows[row] + self.coll.cols[c],
            row_id: self.coll.row_ids[row],
            col_id: self.coll.col_ids[c],
        }
    }

    /// Candidates admitted by `bound`, with the per-row first admitted column
    /// left in `scratch_all`.
    fn count_in(&mut self, bound: &Bound<T>) -> u64 {
        self.scratch_all.clear();
        let mut total = 0u64;
        for s in &self.coll.spans {
            let view = MatrixView {
                rows: &self.coll.rows[s.row0..s.row1],
                cols: &self.coll.cols[s.col0..s.col1],
                row_ids: &[],
                col_ids: &[],
            };
            view.first_admitted(bound, &mut self.scratch);
            for (i, &f) in self.scratch.iter().enumerate() {
                let g = s.row0 + i;
                let start = f.max(self.lo[g]);
                if self.hi[g] > start {
                    total += (self.hi[g] - start) as u64;
                }
            }
            self.scratch_all.extend_from_slice(&self.scratch);
        }
        total
    }

    /// One walk per matrix for both pivots: candidates at least `low` and
    /// candidates above `high`, with per-row boundaries left in `bound_low`
    /// and `bound_high`.
    fn bracket_counts(&mut self, low: T, high: T, bound_low: &mut Vec<u32>, bound_high: &mut Vec<u32>) -> (u64, u64) {
        bound_low.clear();
        bound_high.clear();
        let (mut ge, mut gt) = (0u64, 0u64);
        for s in &self.coll.spans {
            let rows = &self.coll.rows[s.row0..s.row1];
            let cols = &self.coll.cols[s.col0..s.col1];
            let (mut a, mut b) = (cols.len(), cols.len());
            for (i, &r) in rows.iter().enumerate() {
                while a > 0 && r + cols[a - 1] >= low {
                    a -= 1;
                }
                while b > 0 && r + cols[b - 1] > high {
                    b -= 1;
                }
                let g = s.row0 + i;
                let (l, h) = (self.lo[g], self.hi[g]);
                ge += h.saturating_sub(l.max(a as u32)) as u64;
                gt += h.saturating_sub(l.max(b as u32)) as u64;
                bound_low.push(a as u32);
                bound_high.push(b as u32);
            }
        }
        (ge, gt)
    }

    fn try_pivot(&mut self, pivot: Entry<T>, k: &mut u64, n_cand: &mut u64) -> Option<Entry<T>> {
        let gt = self.count_in(&Bound::greater_than(pivot.value));
        if gt >= *k {
            for (l, &f) in self.lo.iter_mut().zip(&self.scratch_all) {
                *l = (*l).max(f);
            }
            *n_cand = gt;
            return None;
        }
        let ge = self.count_in(&Bound::at_least(pivot.value));
        if ge >= *k {
            return Some(pivot);
        }
        for (h, &f) in self.hi.iter_mut().zip(&self.scratch_all) {
            *h = (*h).min(f);
        }
        *k -= ge;
        *n_cand -= ge;
        None
    }

    fn run<R: Rng + ?Sized>(mut self, k: u64, rng: &mut R) -> Result<Entry<T>> {
        let total = self.coll.total_entries();
        if k == 0 || k > total {
            return Err(Error::RankOutOfRange { k, count: total });
        }
        let side = self.coll.total_side() as u64;
        let threshold = side.max(2048);
        let mut k = k;
        let mut n_cand = total;
        let (mut bound_low, mut bound_high) = (Vec::new(), Vec::new());
        loop {
            if n_cand <= threshold {
                return Ok(self.finish(k));
            }
            let s = (side / 16).clamp(64, 1 << 20).min(n_cand) as usize;
            // Sorted draws let one pass over the rows place every sample.
            let mut draws: Vec<u64> = (0..s).map(|_| rng.random_range(0..n_cand)).collect();
            draws.sort_unstable();
            let mut sample: Vec<Entry<T>> = Vec::with_capacity(s);
            let (mut row, mut before) = (0usize, 0u64);
            for r in draws {
                loop {
                    let width = self.hi[row].saturating_sub(self.lo[row]) as u64;
                    if r < before + width {
                        break;
                    }
                    before += width;
                    row += 1;
                }
                let col = self.lo[row] as u64 + (r - before);
                sample.push(self.entry_at(row, col as usize));
            }
            let pos = k as f64 / n_cand as f64 * s as f64;
            let d = 1.5 * (s as f64).sqrt();
            let hi_idx = ((pos - d).floor().max(0.0) as usize).min(s - 1);
            let lo_idx = ((pos + d).ceil().max(0.0) as usize).min(s - 1);
            let desc = |a: &Entry<T>, b: &Entry<T>| b.value.total_cmp(&a.value);
            let (_, v_lo, _) = sample.select_nth_unstable_by(lo_idx, desc);
            let v_lo = *v_lo;
            let (_, v_hi, _) = sample[..=lo_idx].select_nth_unstable_by(hi_idx, desc);
            let v_hi = *v_hi;
            let (ge, gt) = self.bracket_counts(v_lo.value, v_hi.value, &mut bound_low, &mut bound_high);
            if gt >= k {
                for (l, &b) in self.lo.iter_mut().zip(&bound_high) {
                    *l = (*l).max(b);
                }
                n_cand = gt;
            } else if ge < k {
                for (h, &a) in self.hi.iter_mut().zip(&bound_low) {
                    *h = (*h).min(a);
                }
                k -= ge;
                n_cand -= ge;
            } else if v_lo.value == v_hi.value {
                return Ok(v_lo);
            } else {
                let before = n_cand;
                for ((l, h), (&a, &b)) in self.lo.iter_mut().zip(self.hi.iter_mut()).zip(bound_low.iter().zip(&bound_high)) {
                    *l = (*l).max(a);
                    *h = (*h).min(b);
                }
                k -= gt;
                n_cand = ge - gt;
                // Every candidate already lies between the pivots; a plain
                // pivot step always removes at least the pivot's value.
                if n_cand == before {
                    if let Some(e) = self.try_pivot(v_lo, &mut k, &mut n_cand) {
                        return Ok(e);
                    }
                }
            }
        }
    }

    fn finish(&self, k: u64) -> Entry<T> {
        let mut all = Vec::new();
        for row in 0..self.lo.len() {
            for col in self.lo[row]..self.hi[row] {
                all.push(self.entry_at(row, col as usize));
            }
        }
        let (_, e, _) = all.select_nth_unstable_by((k - 1) as usize, |a, b| {
            b.value.total_cmp(&a.value).then((a.row_id, a.col_id).cmp(&(b.row_id, b.col_id)))
        });
        *e
    }
}
