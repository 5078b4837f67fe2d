//! Planarity of tanglegrams.
//!
//! The fast test treats "exchange the children of vertex `u`" as a boolean
//! variable. For leaves `a` in the first and `b` in the second subtree of a
//! left vertex `u`, the matched leaves meet at a right vertex `v`, and the two
//! edges avoid each other iff `x_u xor y_v` takes one prescribed value. The
//! system is solved with a parity union-find, and its solutions are exactly
//! the zero-crossing layouts. An exhaustive search backs it up for testing.

use std::collections::HashSet;

use super::{Layout, Presentation, Result, TanglegramError};

/// Default cap for the exhaustive planarity search.
pub const DEFAULT_PLANARITY_CAP: usize = 12;

struct ParityUnionFind {
    parent: Vec<usize>,
    parity: Vec<bool>,
}

impl ParityUnionFind {
    fn new(size: usize) -> Self {
        ParityUnionFind { parent: (0..size).collect(), parity: vec![false; size] }
    }

    /// Root of `x` and the parity of `x` relative to it.
    fn find(&mut self, x: usize) -> (usize, bool) {
        let mut path = Vec::new();
        let mut v = x;
        while self.parent[v] != v {
            path.push(v);
            v = self.parent[v];
        }
        let root = v;
        // Walk back down accumulating parities, compressing as we go.
        let mut acc = false;
        for &w in path.iter().rev() {
            acc ^= self.parity[w];
            self.parity[w] = acc;
            self.parent[w] = root;
        }
        (root, if path.is_empty() { false } else { self.parity[x] })
    }

    /// Records `x xor y = value`; false on contradiction.
    fn relate(&mut self, x: usize, y: usize, value: bool) -> bool {
        let (rx, px) = self.find(x);
        let (ry, py) = self.find(y);
        if rx == ry {
            return px ^ py == value;
        }
        self.parent[rx] = ry;
        self.parity[rx] = px ^ py ^ value;
        true
    }
}

/// Every pair of child-exchange vectors (indexed by preorder id) giving a
/// zero-crossing layout, or `None` when there are more than `limit`.
/// An empty list means the tanglegram is not planar.
pub fn planar_flip_assignments(p: &Presentation, limit: usize) -> Option<Vec<(Vec<bool>, Vec<bool>)>> {
    let left = p.left.flat();
    let right = p.right.flat();
    let offset = left.nodes.len();
    let mut uf = ParityUnionFind::new(offset + right.nodes.len());
    for (u, node) in left.nodes.iter().enumerate() {
        let Some((c1, c2)) = node.children else { continue };
        let first = left.nodes[c1];
        let second = left.nodes[c2];
        for a in first.lo..first.hi {
            for b in second.lo..second.hi {
                let (sa, sb) = (p.perm[a], p.perm[b]);
                let v = right.lca(sa, sb);
                let (r1, _) = right.nodes[v].children.expect("lca of two leaves is internal");
                let a_first = sa < right.nodes[r1].hi;
                if !uf.relate(u, offset + v, !a_first) {
                    return Some(Vec::new());
                }
            }
        }
    }
    let internal: Vec<usize> = (0..offset + right.nodes.len())
        .filter(|&i| {
            if i < offset {
                left.nodes[i].children.is_some()
            } else {
                right.nodes[i - offset].children.is_some()
            }
        })
        .collect();
    let mut roots: Vec<usize> = internal.iter().map(|&i| uf.find(i).0).collect();
    roots.sort_unstable();
    roots.dedup();
    if roots.len() >= usize::BITS as usize || 1usize << roots.len() > limit {
        return None;
    }
    let mut out = Vec::with_capacity(1 << roots.len());
    for mask in 0..1usize << roots.len() {
        let mut lf = vec![false; offset];
        let mut rf = vec![false; right.nodes.len()];
        for &i in &internal {
            let (root, parity) = uf.find(i);
            let k = roots.binary_search(&root).unwrap();
            let value = (mask >> k) & 1 == 1;
            if i < offset {
                lf[i] = value ^ parity;
            } else {
                rf[i - offset] = value ^ parity;
            }
        }
        out.push((lf, rf));
    }
    Some(out)
}

/// Some zero-crossing layout, if the tanglegram is planar.
pub fn planar_layout(p: &Presentation) -> Option<Layout> {
    let left = p.left.flat();
    let right = p.right.flat();
    let mut uf = ParityUnionFind::new(left.nodes.len() + right.nodes.len());
    let offset = left.nodes.len();
    for (u, node) in left.nodes.iter().enumerate() {
        let Some((c1, c2)) = node.children else { continue };
        for a in left.nodes[c1].lo..left.nodes[c1].hi {
            for b in left.nodes[c2].lo..left.nodes[c2].hi {
                let (sa, sb) = (p.perm[a], p.perm[b]);
                let v = right.lca(sa, sb);
                let (r1, _) = right.nodes[v].children.unwrap();
                if !uf.relate(u, offset + v, sa >= right.nodes[r1].hi) {
                    return None;
                }
            }
        }
    }
    let lf: Vec<bool> = (0..offset).map(|i| uf.find(i).1).collect();
    let rf: Vec<bool> = (0..right.nodes.len()).map(|i| uf.find(offset + i).1).collect();
    let q = p.with_flips(&lf, &rf);
    debug_assert_eq!(q.crossings(), 0);
    q.as_layout()
}

/// All distinct zero-crossing layouts, or `None` beyond `limit` assignments.
pub fn planar_layouts(p: &Presentation, limit: usize) -> Option<Vec<Layout>> {
    let assignments = planar_flip_assignments(p, limit)?;
    let mut out: Vec<Layout> = assignments
        .iter()
        .map(|(lf, rf)| p.with_flips(lf, rf).as_layout().expect("solver yields zero crossings"))
        .collect();
    out.sort();
    out.dedup();
    Some(out)
}

fn all_flip_vectors(nodes: usize) -> impl Iterator<Item = Vec<bool>> {
    (0..1usize << nodes).map(move |mask| (0..nodes).map(|i| (mask >> i) & 1 == 1).collect())
}

/// Exhaustive search over child exchanges at every vertex of both trees,
/// returning a zero-crossing layout when one exists.
pub fn is_planar(p: &Presentation) -> Result<Option<Layout>> {
    is_planar_with_cap(p, DEFAULT_PLANARITY_CAP)
}

pub fn is_planar_with_cap(p: &Presentation, cap: usize) -> Result<Option<Layout>> {
    let n = p.size();
    if n > cap {
        return Err(TanglegramError::CapExceeded { n, cap });
    }
    // Leaf vertices carry no exchange, so only internal ids need varying.
    let internal = |t: &super::PlaneTree| -> Vec<usize> {
        t.flat()
            .nodes
            .iter()
            .enumerate()
            .filter(|(_, v)| v.children.is_some())
            .map(|(i, _)| i)
            .collect()
    };
    let expand = |ids: &[usize], bits: &[bool], len: usize| {
        let mut out = vec![false; len];
        for (&i, &b) in ids.iter().zip(bits) {
            out[i] = b;
        }
        out
    };
    let (lids, rids) = (internal(&p.left), internal(&p.right));
    let (llen, rlen) = (p.left.size(), p.right.size());
    let mut right_orders = HashSet::new();
    for bits in all_flip_vectors(rids.len()) {
        let (_, order) = p.right.reordered(&expand(&rids, &bits, rlen));
        right_orders.insert(order);
    }
    for bits in all_flip_vectors(lids.len()) {
        let flips = expand(&lids, &bits, llen);
        let (_, order) = p.left.reordered(&flips);
        let image: Vec<usize> = order.iter().map(|&a| p.perm[a]).collect();
        if right_orders.contains(&image) {
            for rbits in all_flip_vectors(rids.len()) {
                let rflips = expand(&rids, &rbits, rlen);
                if let Some(layout) = p.with_flips(&flips, &rflips).as_layout() {
                    return Ok(Some(layout));
                }
            }
        }
    }
    Ok(None)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tanglegram::PlaneTree;

    fn all_presentations(n: usize) -> Vec<Presentation> {
        let shapes = PlaneTree::shapes_with_leaves(n);
        let mut out = Vec::new();
        for l in &shapes {
            for r in &shapes {
                for perm in permutations(n) {
                    out.push(Presentation::new(l.clone(), r.clone(), perm).unwrap());
                }
            }
        }
        out
    }

    fn permutations(n: usize) -> Vec<Vec<usize>> {
        if n == 0 {
            return vec![vec![]];
        }
        let mut out = Vec::new();
        for p in permutations(n - 1) {
            for pos in 0..n {
                let mut q = p.clone();
                q.insert(pos, n - 1);
                out.push(q);
            }
        }
        out
    }

    #[test]
    fn solver_agrees_with_exhaustive_search() {
        for n in 1..=6 {
            for p in all_presentations(n) {
                let fast = planar_layout(&p);
                let slow = is_planar(&p).unwrap();
                assert_eq!(fast.is_some(), slow.is_some(), "{p}");
                if let Some(l) = fast {
                    assert_eq!(l.presentation().crossings(), 0);
                }
            }
        }
    }

    #[test]
    fn assignments_count_zero_crossing_presentations() {
        for p in all_presentations(4) {
            let brute = {
                let mut count = 0;
                for lb in 0..1usize << 7 {
                    for rb in 0..1usize << 7 {
                        let lf: Vec<bool> = (0..7).map(|i| (lb >> i) & 1 == 1).collect();
                        let rf: Vec<bool> = (0..7).map(|i| (rb >> i) & 1 == 1).collect();
                        let leafless = |t: &PlaneTree, f: &[bool]| {
                            t.flat().nodes.iter().zip(f).all(|(v, &b)| v.children.is_some() || !b)
                        };
                        if leafless(&p.left, &lf) && leafless(&p.right, &rf) && p.with_flips(&lf, &rf).crossings() == 0 {
                            count += 1;
                        }
                    }
                }
                count
            };
            assert_eq!(planar_flip_assignments(&p, 1 << 20).unwrap().len(), brute, "{p}");
        }
    }

    #[test]
    fn cap_is_enforced() {
        let t = PlaneTree::caterpillar(13);
        let p = Presentation::identity(t.clone(), t).unwrap();
        assert!(is_planar(&p).is_err());
        assert!(planar_layout(&p).is_some());
    }
}
