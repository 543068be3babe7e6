#![allow(dead_code)]

use std::collections::HashMap;
use std::hash::Hash;

use imec::{TargetMultiset, VSet};

pub fn permutations(n: usize) -> Vec<Vec<usize>> {
    fn rec(n: usize, cur: &mut Vec<usize>, used: &mut Vec<bool>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == n {
            out.push(cur.clone());
            return;
        }
        for v in 0..n {
            if !used[v] {
                used[v] = true;
                cur.push(v);
                rec(n, cur, used, out);
                cur.pop();
                used[v] = false;
            }
        }
    }
    let mut out = Vec::new();
    rec(n, &mut Vec::new(), &mut vec![false; n], &mut out);
    out
}

pub fn permute_set(s: VSet, p: &[usize]) -> VSet {
    s.iter().map(|v| p[v]).collect()
}

/// Sorted target lists (multisets of subsets of `0..n`, empty set included)
/// of length at most `max_len`.
pub fn target_multisets(n: usize, max_len: usize) -> Vec<Vec<VSet>> {
    let subsets: Vec<VSet> = VSet::full(n).subsets().collect();
    let mut out = vec![Vec::new()];
    let mut frontier: Vec<(Vec<VSet>, usize)> = vec![(Vec::new(), 0)];
    for _ in 0..max_len {
        let mut next = Vec::new();
        for (cur, start) in frontier {
            for (k, &s) in subsets.iter().enumerate().skip(start) {
                let mut c = cur.clone();
                c.push(s);
                out.push(c.clone());
                next.push((c, k));
            }
        }
        frontier = next;
    }
    out
}

/// One target multiset per orbit under relabelling of `0..n`. Sweeps over all
/// graphs on `n` vertices only need these: relabelling a pair of graphs and the
/// targets together preserves every property compared.
pub fn target_orbits(n: usize, max_len: usize) -> Vec<TargetMultiset> {
    let perms = permutations(n);
    let key = |t: &[VSet]| -> Vec<u64> { t.iter().map(|s| s.0).collect() };
    target_multisets(n, max_len)
        .into_iter()
        .filter(|t| {
            let own = key(t);
            perms.iter().all(|p| {
                let mut img: Vec<u64> = t.iter().map(|&s| permute_set(s, p).0).collect();
                img.sort();
                own <= img
            })
        })
        .map(|mut t| {
            t.sort_by_key(|s| s.0);
            TargetMultiset::new(t)
        })
        .collect()
}

/// Checks that two keyings of the same items induce the same partition.
/// On failure returns two indices that one keying groups and the other splits.
pub fn same_partition<A: Hash + Eq, B: Hash + Eq>(a: &[A], b: &[B]) -> Option<(usize, usize)> {
    assert_eq!(a.len(), b.len());
    let mut first_a: HashMap<&A, usize> = HashMap::new();
    let mut first_b: HashMap<&B, usize> = HashMap::new();
    for i in 0..a.len() {
        let fa = *first_a.entry(&a[i]).or_insert(i);
        let fb = *first_b.entry(&b[i]).or_insert(i);
        if fa != fb {
            return Some((i, fa.min(fb)));
        }
    }
    None
}
