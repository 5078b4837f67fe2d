//! Rooted binary trees, tanglegram presentations and layouts.
//!
//! A *presentation* fixes a child order at every vertex of both trees and
//! lists the matching as a permutation of leaf positions read top to bottom.
//! A *layout* is a presentation whose matching is the identity, so it is
//! determined by the two plane trees alone.

mod canon;
mod planarity;

pub use canon::{
    census_by_core_size, decompose, enumerate_tanglegrams, enumerate_tanglegrams_with_cap, irr,
    substitute, Decomposition, Tanglegram, DEFAULT_ENUMERATION_CAP,
};
pub use planarity::{
    is_planar, is_planar_with_cap, planar_flip_assignments, planar_layout, planar_layouts,
    DEFAULT_PLANARITY_CAP,
};

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum TanglegramError {
    #[error("cannot parse `{input}`: {reason}")]
    Parse { input: String, reason: String },
    #[error("leaf counts differ ({left} vs {right})")]
    SizeMismatch { left: usize, right: usize },
    #[error("matching is not a permutation of 1..={0}")]
    NotPermutation(usize),
    #[error("size {n} exceeds the configured cap {cap}")]
    CapExceeded { n: usize, cap: usize },
    #[error("node {0} cannot be used here")]
    InvalidNode(usize),
    #[error("expected {expected} blocks, got {got}")]
    BlockCount { expected: usize, got: usize },
}

pub type Result<T, E = TanglegramError> = std::result::Result<T, E>;

fn parse_err(input: &str, reason: impl Into<String>) -> TanglegramError {
    TanglegramError::Parse { input: input.to_string(), reason: reason.into() }
}

/// A rooted binary tree with an order on the two children of every vertex.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum PlaneTree {
    Leaf,
    Node(Box<PlaneTree>, Box<PlaneTree>),
}

impl PlaneTree {
    pub fn node(left: PlaneTree, right: PlaneTree) -> PlaneTree {
        PlaneTree::Node(Box::new(left), Box::new(right))
    }

    pub fn cherry() -> PlaneTree {
        PlaneTree::node(PlaneTree::Leaf, PlaneTree::Leaf)
    }

    /// The tree whose internal vertices all lie on the path from the root
    /// to the last leaf.
    pub fn caterpillar(leaves: usize) -> PlaneTree {
        assert!(leaves >= 1);
        let mut t = PlaneTree::Leaf;
        for _ in 1..leaves {
            t = PlaneTree::node(PlaneTree::Leaf, t);
        }
        t
    }

    pub fn is_leaf(&self) -> bool {
        matches!(self, PlaneTree::Leaf)
    }

    pub fn leaves(&self) -> usize {
        match self {
            PlaneTree::Leaf => 1,
            PlaneTree::Node(l, r) => l.leaves() + r.leaves(),
        }
    }

    /// Total vertex count, leaves included.
    pub fn size(&self) -> usize {
        2 * self.leaves() - 1
    }

    /// The left-right reflection: every child order reversed.
    pub fn mirror(&self) -> PlaneTree {
        match self {
            PlaneTree::Leaf => PlaneTree::Leaf,
            PlaneTree::Node(l, r) => PlaneTree::node(r.mirror(), l.mirror()),
        }
    }

    /// Subtrees indexed by preorder vertex id; the root has id 0.
    pub fn preorder(&self) -> Vec<&PlaneTree> {
        fn walk<'a>(t: &'a PlaneTree, out: &mut Vec<&'a PlaneTree>) {
            out.push(t);
            if let PlaneTree::Node(l, r) = t {
                walk(l, out);
                walk(r, out);
            }
        }
        let mut out = Vec::with_capacity(self.size());
        walk(self, &mut out);
        out
    }

    pub fn flat(&self) -> FlatTree {
        FlatTree::new(self)
    }

    /// Reorders children at the vertices flagged in `flips` (preorder ids).
    /// Also returns the old leaf positions in their new top-to-bottom order.
    pub fn reordered(&self, flips: &[bool]) -> (PlaneTree, Vec<usize>) {
        fn walk(t: &PlaneTree, flips: &[bool], id: &mut usize, leaf: &mut usize) -> (PlaneTree, Vec<usize>) {
            let me = *id;
            *id += 1;
            match t {
                PlaneTree::Leaf => {
                    *leaf += 1;
                    (PlaneTree::Leaf, vec![*leaf - 1])
                }
                PlaneTree::Node(l, r) => {
                    let (lt, mut lo) = walk(l, flips, id, leaf);
                    let (rt, ro) = walk(r, flips, id, leaf);
                    if flips.get(me).copied().unwrap_or(false) {
                        let mut order = ro;
                        order.extend(lo);
                        (PlaneTree::node(rt, lt), order)
                    } else {
                        lo.extend(ro);
                        (PlaneTree::node(lt, rt), lo)
                    }
                }
            }
        }
        walk(self, flips, &mut 0, &mut 0)
    }

    /// Replaces the subtrees rooted at the flagged preorder ids with leaves.
    pub fn contract(&self, at: &[bool]) -> PlaneTree {
        fn walk(t: &PlaneTree, at: &[bool], id: &mut usize) -> PlaneTree {
            let me = *id;
            *id += t.size();
            if at[me] {
                return PlaneTree::Leaf;
            }
            match t {
                PlaneTree::Leaf => PlaneTree::Leaf,
                PlaneTree::Node(l, r) => {
                    *id = me + 1;
                    let lt = walk(l, at, id);
                    let rt = walk(r, at, id);
                    PlaneTree::node(lt, rt)
                }
            }
        }
        walk(self, at, &mut 0)
    }

    /// Replaces the leaves, top to bottom, with the given trees.
    pub fn graft(&self, parts: &[PlaneTree]) -> PlaneTree {
        fn walk(t: &PlaneTree, parts: &[PlaneTree], next: &mut usize) -> PlaneTree {
            match t {
                PlaneTree::Leaf => {
                    *next += 1;
                    parts[*next - 1].clone()
                }
                PlaneTree::Node(l, r) => {
                    let lt = walk(l, parts, next);
                    let rt = walk(r, parts, next);
                    PlaneTree::node(lt, rt)
                }
            }
        }
        assert_eq!(parts.len(), self.leaves());
        walk(self, parts, &mut 0)
    }

    /// Every plane tree with `leaves` leaves.
    pub fn all_with_leaves(leaves: usize) -> Vec<PlaneTree> {
        let mut table: Vec<Vec<PlaneTree>> = vec![Vec::new(), vec![PlaneTree::Leaf]];
        for m in 2..=leaves {
            let mut row = Vec::new();
            for i in 1..m {
                for l in &table[i] {
                    for r in &table[m - i] {
                        row.push(PlaneTree::node(l.clone(), r.clone()));
                    }
                }
            }
            table.push(row);
        }
        table.swap_remove(leaves)
    }

    /// One plane representative per unordered tree shape: at every vertex the
    /// children are sorted by their text encoding.
    pub fn shapes_with_leaves(leaves: usize) -> Vec<PlaneTree> {
        fn sorted(t: &PlaneTree) -> bool {
            match t {
                PlaneTree::Leaf => true,
                PlaneTree::Node(l, r) => l.to_string() <= r.to_string() && sorted(l) && sorted(r),
            }
        }
        Self::all_with_leaves(leaves).into_iter().filter(sorted).collect()
    }
}

impl fmt::Display for PlaneTree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PlaneTree::Leaf => f.write_str("o"),
            PlaneTree::Node(l, r) => write!(f, "({l}{r})"),
        }
    }
}

impl fmt::Debug for PlaneTree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl FromStr for PlaneTree {
    type Err = TanglegramError;

    fn from_str(s: &str) -> Result<Self> {
        fn parse(bytes: &[u8], at: &mut usize, input: &str) -> Result<PlaneTree> {
            match bytes.get(*at) {
                Some(b'o') => {
                    *at += 1;
                    Ok(PlaneTree::Leaf)
                }
                Some(b'(') => {
                    *at += 1;
                    let l = parse(bytes, at, input)?;
                    let r = parse(bytes, at, input)?;
                    if bytes.get(*at) != Some(&b')') {
                        return Err(parse_err(input, format!("expected `)` at offset {at}")));
                    }
                    *at += 1;
                    Ok(PlaneTree::node(l, r))
                }
                _ => Err(parse_err(input, format!("unexpected symbol at offset {at}"))),
            }
        }
        let s = s.trim();
        let mut at = 0;
        let t = parse(s.as_bytes(), &mut at, s)?;
        if at != s.len() {
            return Err(parse_err(s, "trailing input"));
        }
        Ok(t)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FlatNode {
    /// First leaf position below the vertex.
    pub lo: usize,
    /// One past the last leaf position below the vertex.
    pub hi: usize,
    pub children: Option<(usize, usize)>,
    pub parent: Option<usize>,
}

/// Array form of a plane tree in preorder, with leaf intervals.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FlatTree {
    pub nodes: Vec<FlatNode>,
}

impl FlatTree {
    pub fn new(t: &PlaneTree) -> Self {
        fn walk(t: &PlaneTree, parent: Option<usize>, leaf: &mut usize, nodes: &mut Vec<FlatNode>) -> usize {
            let me = nodes.len();
            let lo = *leaf;
            nodes.push(FlatNode { lo, hi: lo, children: None, parent });
            match t {
                PlaneTree::Leaf => *leaf += 1,
                PlaneTree::Node(l, r) => {
                    let a = walk(l, Some(me), leaf, nodes);
                    let b = walk(r, Some(me), leaf, nodes);
                    nodes[me].children = Some((a, b));
                }
            }
            nodes[me].hi = *leaf;
            me
        }
        let mut nodes = Vec::with_capacity(t.size());
        walk(t, None, &mut 0, &mut nodes);
        FlatTree { nodes }
    }

    pub fn leaves(&self) -> usize {
        self.nodes[0].hi
    }

    /// Deepest vertex whose interval holds both leaf positions.
    pub fn lca(&self, a: usize, b: usize) -> usize {
        let (a, b) = (a.min(b), a.max(b));
        let mut v = 0;
        while let Some((l, r)) = self.nodes[v].children {
            if b < self.nodes[l].hi {
                v = l;
            } else if a >= self.nodes[r].lo {
                v = r;
            } else {
                break;
            }
        }
        v
    }

    /// Map from leaf interval to vertex id.
    pub fn intervals(&self) -> HashMap<(usize, usize), usize> {
        let mut map = HashMap::with_capacity(self.nodes.len());
        for (i, n) in self.nodes.iter().enumerate() {
            map.insert((n.lo, n.hi), i);
        }
        map
    }
}

fn check_perm(perm: &[usize]) -> Result<()> {
    let mut seen = vec![false; perm.len()];
    for &p in perm {
        if p >= perm.len() || std::mem::replace(&mut seen[p], true) {
            return Err(TanglegramError::NotPermutation(perm.len()));
        }
    }
    Ok(())
}

/// Number of inversions of a permutation.
pub fn inversions(perm: &[usize]) -> usize {
    let mut count = 0;
    for i in 0..perm.len() {
        for j in i + 1..perm.len() {
            if perm[i] > perm[j] {
                count += 1;
            }
        }
    }
    count
}

/// Two plane trees and a matching from left leaf positions to right leaf
/// positions (0-based; the text form is 1-based).
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Presentation {
    pub left: PlaneTree,
    pub right: PlaneTree,
    pub perm: Vec<usize>,
}

impl Presentation {
    pub fn new(left: PlaneTree, right: PlaneTree, perm: Vec<usize>) -> Result<Self> {
        let (l, r) = (left.leaves(), right.leaves());
        if l != r {
            return Err(TanglegramError::SizeMismatch { left: l, right: r });
        }
        if perm.len() != l {
            return Err(TanglegramError::NotPermutation(l));
        }
        check_perm(&perm)?;
        Ok(Presentation { left, right, perm })
    }

    pub fn identity(left: PlaneTree, right: PlaneTree) -> Result<Self> {
        let n = left.leaves();
        Self::new(left, right, (0..n).collect())
    }

    pub fn size(&self) -> usize {
        self.perm.len()
    }

    pub fn crossings(&self) -> usize {
        inversions(&self.perm)
    }

    /// The same tanglegram after exchanging children at the flagged vertices
    /// (preorder ids) of each tree.
    pub fn with_flips(&self, left_flips: &[bool], right_flips: &[bool]) -> Presentation {
        let (left, left_order) = self.left.reordered(left_flips);
        let (right, right_order) = self.right.reordered(right_flips);
        let mut right_pos = vec![0; right_order.len()];
        for (new, &old) in right_order.iter().enumerate() {
            right_pos[old] = new;
        }
        let perm = left_order.iter().map(|&old| right_pos[self.perm[old]]).collect();
        Presentation { left, right, perm }
    }

    pub fn as_layout(&self) -> Option<Layout> {
        self.perm
            .iter()
            .enumerate()
            .all(|(i, &p)| i == p)
            .then(|| Layout { left: self.left.clone(), right: self.right.clone() })
    }
}

impl fmt::Display for Presentation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}|{}|", self.left, self.right)?;
        for (i, p) in self.perm.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{}", p + 1)?;
        }
        Ok(())
    }
}

impl fmt::Debug for Presentation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl FromStr for Presentation {
    type Err = TanglegramError;

    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.trim().split('|').collect();
        if parts.len() != 3 {
            return Err(parse_err(s, "expected `left|right|perm`"));
        }
        let perm = parts[2]
            .split(',')
            .map(|x| match x.trim().parse::<usize>() {
                Ok(v) if v >= 1 => Ok(v - 1),
                _ => Err(parse_err(s, "bad matching entry")),
            })
            .collect::<Result<Vec<_>>>()?;
        Presentation::new(parts[0].parse()?, parts[1].parse()?, perm)
    }
}

/// A drawing in which left leaf `i` is matched to right leaf `i`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Layout {
    pub left: PlaneTree,
    pub right: PlaneTree,
}

impl Layout {
    pub fn new(left: PlaneTree, right: PlaneTree) -> Result<Self> {
        let (l, r) = (left.leaves(), right.leaves());
        if l != r {
            return Err(TanglegramError::SizeMismatch { left: l, right: r });
        }
        Ok(Layout { left, right })
    }

    pub fn size(&self) -> usize {
        self.left.leaves()
    }

    pub fn presentation(&self) -> Presentation {
        let n = self.size();
        Presentation { left: self.left.clone(), right: self.right.clone(), perm: (0..n).collect() }
    }

    /// Both trees reflected; matched leaves stay matched.
    pub fn mirror(&self) -> Layout {
        Layout { left: self.left.mirror(), right: self.right.mirror() }
    }

    pub fn tanglegram(&self) -> Tanglegram {
        Tanglegram::from_presentation(&self.presentation())
    }
}

impl fmt::Display for Layout {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}|{}", self.left, self.right)
    }
}

impl fmt::Debug for Layout {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl FromStr for Layout {
    type Err = TanglegramError;

    fn from_str(s: &str) -> Result<Self> {
        let (l, r) = s.trim().split_once('|').ok_or_else(|| parse_err(s, "expected `left|right`"))?;
        Layout::new(l.parse()?, r.parse()?)
    }
}

/// Crossings of `layout` after exchanging children at the flagged vertices.
pub fn crossings(layout: &Layout, left_flips: &[bool], right_flips: &[bool]) -> usize {
    layout.presentation().with_flips(left_flips, right_flips).crossings()
}

/// A proper subtanglegram of a layout: two non-root vertices, one per tree,
/// covering the same run of at least two leaf positions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SubtanglegramSpan {
    pub lo: usize,
    pub hi: usize,
    pub left_node: usize,
    pub right_node: usize,
}

impl SubtanglegramSpan {
    pub fn width(&self) -> usize {
        self.hi - self.lo
    }
}

/// All proper subtanglegrams of width at least two, sorted by interval.
pub fn proper_subtanglegrams(layout: &Layout) -> Vec<SubtanglegramSpan> {
    let left = layout.left.flat();
    let right = layout.right.flat().intervals();
    let mut out: Vec<SubtanglegramSpan> = left
        .nodes
        .iter()
        .enumerate()
        .skip(1)
        .filter(|(_, v)| v.hi - v.lo >= 2)
        .filter_map(|(u, v)| {
            right
                .get(&(v.lo, v.hi))
                .filter(|&&w| w != 0)
                .map(|&w| SubtanglegramSpan { lo: v.lo, hi: v.hi, left_node: u, right_node: w })
        })
        .collect();
    out.sort();
    out
}

pub fn is_irreducible_layout(layout: &Layout) -> bool {
    proper_subtanglegrams(layout).is_empty()
}
