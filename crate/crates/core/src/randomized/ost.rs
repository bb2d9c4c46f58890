//! Arena-backed AVL order-statistic tree.

use std::cmp::Ordering;

use crate::scalar::Scalar;

const NIL: u32 = u32::MAX;

#[derive(Clone, Debug)]
struct Node<T> {
    key: T,
    id: u32,
    left: u32,
    right: u32,
    height: u8,
    size: u32,
}

/// Multiset of `(key, id)` pairs ordered by key, then id. Every node stores
/// its subtree size, so rank queries and selection by rank are logarithmic.
#[derive(Clone, Debug)]
pub struct OrderStatisticTree<T> {
    nodes: Vec<Node<T>>,
    free: Vec<u32>,
    root: u32,
}

impl<T: Scalar> Default for OrderStatisticTree<T> {
    fn default() -> Self {
        Self::new()
    }
}

impl<T: Scalar> OrderStatisticTree<T> {
    pub fn new() -> Self {
        Self { nodes: Vec::new(), free: Vec::new(), root: NIL }
    }

    pub fn len(&self) -> usize {
        self.size(self.root) as usize
    }

    pub fn is_empty(&self) -> bool {
        self.root == NIL
    }

    pub fn clear(&mut self) {
        self.nodes.clear();
        self.free.clear();
        self.root = NIL;
    }

    fn size(&self, n: u32) -> u32 {
        if n == NIL {
            0
        } else {
            self.nodes[n as usize].size
        }
    }

    fn height(&self, n: u32) -> u8 {
        if n == NIL {
            0
        } else {
            self.nodes[n as usize].height
        }
    }

    fn cmp_key(&self, n: u32, key: T, id: u32) -> Ordering {
        let node = &self.nodes[n as usize];
        key.total_cmp(&node.key).then(id.cmp(&node.id))
    }

    fn update(&mut self, n: u32) {
        let (l, r) = (self.nodes[n as usize].left, self.nodes[n as usize].right);
        let h = self.height(l).max(self.height(r)) + 1;
        let s = self.size(l) + self.size(r) + 1;
        let node = &mut self.nodes[n as usize];
        node.height = h;
        node.size = s;
    }

    fn rotate_right(&mut self, n: u32) -> u32 {
        let l = self.nodes[n as usize].left;
        self.nodes[n as usize].left = self.nodes[l as usize].right;
        self.nodes[l as usize].right = n;
        self.update(n);
        self.update(l);
        l
    }

    fn rotate_left(&mut self, n: u32) -> u32 {
        let r = self.nodes[n as usize].right;
        self.nodes[n as usize].right = self.nodes[r as usize].left;
        self.nodes[r as usize].left = n;
        self.update(n);
        self.update(r);
        r
    }

    fn balance(&mut self, n: u32) -> u32 {
        self.update(n);
        let (l, r) = (self.nodes[n as usize].left, self.nodes[n as usize].right);
        let bf = self.height(l) as i32 - self.height(r) as i32;
        if bf > 1 {
            let (ll, lr) = (self.nodes[l as usize].left, self.nodes[l as usize].right);
            if self.height(ll) < self.height(lr) {
                let nl = self.rotate_left(l);
                self.nodes[n as usize].left = nl;
            }
            return self.rotate_right(n);
        }
        if bf < -1 {
            let (rl, rr) = (self.nodes[r as usize].left, self.nodes[r as usize].right);
            if self.height(rr) < self.height(rl) {
                let nr = self.rotate_right(r);
                self.nodes[n as usize].right = nr;
            }
            return self.rotate_left(n);
        }
        n
    }

    fn alloc(&mut self, key: T, id: u32) -> u32 {
        let node = Node { key, id, left: NIL, right: NIL, height: 1, size: 1 };
        if let Some(i) = self.free.pop() {
            self.nodes[i as usize] = node;
            i
        } else {
            self.nodes.push(node);
            (self.nodes.len() - 1) as u32
        }
    }

    pub fn insert(&mut self, key: T, id: u32) {
        let root = self.root;
        self.root = self.insert_at(root, key, id);
    }

    fn insert_at(&mut self, n: u32, key: T, id: u32) -> u32 {
        if n == NIL {
            return self.alloc(key, id);
        }
        if self.cmp_key(n, key, id) == Ordering::Less {
            let l = self.insert_at(self.nodes[n as usize].left, key, id);
            self.nodes[n as usize].left = l;
        } else {
            let r = self.insert_at(self.nodes[n as usize].right, key, id);
            self.nodes[n as usize].right = r;
        }
        self.balance(n)
    }

    /// Removes one `(key, id)` entry; returns whether it was present.
    pub fn remove(&mut self, key: T, id: u32) -> bool {
        let before = self.len();
        let root = self.root;
        self.root = self.remove_at(root, key, id);
        self.len() < before
    }

    fn remove_min(&mut self, n: u32) -> (u32, u32) {
        let l = self.nodes[n as usize].left;
        if l == NIL {
            return (self.nodes[n as usize].right, n);
        }
        let (nl, min) = self.remove_min(l);
        self.nodes[n as usize].left = nl;
        (self.balance(n), min)
    }

    fn remove_at(&mut self, n: u32, key: T, id: u32) -> u32 {
        if n == NIL {
            return NIL;
        }
        match self.cmp_key(n, key, id) {
            Ordering::Less => {
                let l = self.remove_at(self.nodes[n as usize].left, key, id);
                self.nodes[n as usize].left = l;
            }
            Ordering::Greater => {
                let r = self.remove_at(self.nodes[n as usize].right, key, id);
                self.nodes[n as usize].right = r;
            }
            Ordering::Equal => {
                let (l, r) = (self.nodes[n as usize].left, self.nodes[n as usize].right);
                self.free.push(n);
                if r == NIL {
                    return l;
                }
                let (nr, min) = self.remove_min(r);
                self.nodes[min as usize].left = l;
                self.nodes[min as usize].right = nr;
                return self.balance(min);
            }
        }
        self.balance(n)
    }

    /// Number of keys strictly greater than `x`.
    pub fn count_greater(&self, x: T) -> usize {
        let (mut n, mut acc) = (self.root, 0u32);
        while n != NIL {
            let node = &self.nodes[n as usize];
            if node.key > x {
                acc += self.size(node.right) + 1;
                n = node.left;
            } else {
                n = node.right;
            }
        }
        acc as usize
    }

    /// Number of keys strictly less than `x`.
    pub fn count_less(&self, x: T) -> usize {
        let (mut n, mut acc) = (self.root, 0u32);
        while n != NIL {
            let node = &self.nodes[n as usize];
            if node.key < x {
                acc += self.size(node.left) + 1;
                n = node.right;
            } else {
                n = node.left;
            }
        }
        acc as usize
    }

    /// Number of keys in `[lo, hi]`.
    pub fn count_range(&self, lo: T, hi: T) -> usize {
        if hi < lo {
            return 0;
        }
        self.len() - self.count_less(lo) - self.count_greater(hi)
    }

    /// The `r`-th smallest entry (0-based).
    pub fn select(&self, r: usize) -> Option<(T, u32)> {
        let (mut n, mut r) = (self.root, r as u32);
        while n != NIL {
            let node = &self.nodes[n as usize];
            let ls = self.size(node.left);
            match r.cmp(&ls) {
                Ordering::Less => n = node.left,
                Ordering::Equal => return Some((node.key, node.id)),
                Ordering::Greater => {
                    r -= ls + 1;
                    n = node.right;
                }
            }
        }
        None
    }

    /// Appends the ids of all keys in `[lo, hi]` in key order.
    pub fn report_range(&self, lo: T, hi: T, out: &mut Vec<u32>) {
        self.report_at(self.root, lo, hi, out);
    }

    fn report_at(&self, n: u32, lo: T, hi: T, out: &mut Vec<u32>) {
        if n == NIL {
            return;
        }
        let node = &self.nodes[n as usize];
        if node.key >= lo {
            self.report_at(node.left, lo, hi, out);
        }
        if node.key >= lo && node.key <= hi {
            out.push(node.id);
        }
        if node.key <= hi {
            self.report_at(node.right, lo, hi, out);
        }
    }

    /// Checks heights, balance, sizes and ordering; for tests.
    pub fn check_invariants(&self) -> bool {
        self.check_at(self.root).is_some()
    }

    fn check_at(&self, n: u32) -> Option<(u8, u32, Option<(T, u32)>, Option<(T, u32)>)> {
        if n == NIL {
            return Some((0, 0, None, None));
        }
        let node = &self.nodes[n as usize];
        let (lh, ls, lmin, lmax) = self.check_at(node.left)?;
        let (rh, rs, rmin, rmax) = self.check_at(node.right)?;
        let me = (node.key, node.id);
        let le = |a: (T, u32), b: (T, u32)| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)) != Ordering::Greater;
        if lmax.is_some_and(|m| !le(m, me)) || rmin.is_some_and(|m| !le(me, m)) {
            return None;
        }
        if (lh as i32 - rh as i32).abs() > 1 || node.height != lh.max(rh) + 1 || node.size != ls + rs + 1 {
            return None;
        }
        Some((node.height, node.size, lmin.or(Some(me)), rmax.or(Some(me))))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::seeded;
    use rand::Rng;

    #[test]
    fn fuzz_against_sorted_vec() {
        let mut rng = seeded(5);
        let mut t = OrderStatisticTree::<i64>::new();
        let mut v: Vec<(i64, u32)> = Vec::new();
        for step in 0..20_000u32 {
            if v.is_empty() || rng.random_bool(0.6) {
                let k = rng.random_range(-50..50);
                t.insert(k, step);
                v.push((k, step));
            } else {
                let i = rng.random_range(0..v.len());
                let (k, id) = v.swap_remove(i);
                assert!(t.remove(k, id));
            }
            v.sort_unstable();
            if step % 97 == 0 {
                assert!(t.check_invariants());
                let x = rng.random_range(-60..60);
                assert_eq!(t.count_greater(x), v.iter().filter(|e| e.0 > x).count());
                assert_eq!(t.count_less(x), v.iter().filter(|e| e.0 < x).count());
                let r = rng.random_range(0..v.len().max(1));
                assert_eq!(t.select(r), v.get(r).copied());
                let mut out = Vec::new();
                t.report_range(x, x + 10, &mut out);
                let want: Vec<u32> = v.iter().filter(|e| e.0 >= x && e.0 <= x + 10).map(|e| e.1).collect();
                assert_eq!(out, want);
            }
        }
        assert_eq!(t.len(), v.len());
        assert!(!t.remove(1000, 0));
    }
}
