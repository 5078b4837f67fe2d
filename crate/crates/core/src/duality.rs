//! The plane-dual bijection between irreducible planar layouts with `n`
//! matched leaves and ordered disjoint pairs of triangulations of the
//! `(n + 1)`-gon, and tree rotations as the dual of flips.
//!
//! Leaves are numbered `1..=n` top to bottom. In both trees, the vertex whose
//! leaves are `i..=j` is dual to the chord `(i, j + 1)`: the root to the side
//! `(1, n + 1)`, each leaf to a side `(i, i + 1)`, and every other vertex to a
//! diagonal. Reflecting both trees corresponds to relabeling `v ↦ n + 2 − v`.

use std::collections::HashMap;

use thiserror::Error;

use crate::flip_graph::{Adjacency, FlipGraph, GraphError};
use crate::polygon::{Diagonal, DisjointPair, FlipMove, PolygonError, Side, Triangulation, MAX_POLYGON};
use crate::tanglegram::{proper_subtanglegrams, Layout, PlaneTree};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum DualityError {
    #[error("layout has a proper subtanglegram on leaves {lo}..{hi}")]
    NotIrreducible { lo: usize, hi: usize },
    #[error("layout size {0} is outside the supported range 2..={max}", max = MAX_POLYGON - 1)]
    UnsupportedSize(usize),
    #[error("vertex {0} is not a non-root internal vertex")]
    InvalidNode(usize),
    #[error(transparent)]
    Polygon(#[from] PolygonError),
    #[error(transparent)]
    Graph(#[from] GraphError),
}

pub type Result<T, E = DualityError> = std::result::Result<T, E>;

fn tree_triangulation(t: &PlaneTree) -> Result<Triangulation> {
    let n = t.leaves();
    let flat = t.flat();
    let diagonals = flat.nodes[1..]
        .iter()
        .filter(|v| v.children.is_some())
        .map(|v| Diagonal::new(n + 1, v.lo + 1, v.hi + 1))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(Triangulation::new(n + 1, diagonals)?)
}

/// The triangulation dual to one plane tree.
pub fn tree_to_triangulation(t: &PlaneTree) -> Result<Triangulation> {
    let n = t.leaves();
    if !(2..MAX_POLYGON).contains(&n) {
        return Err(DualityError::UnsupportedSize(n));
    }
    tree_triangulation(t)
}

/// The plane tree dual to a triangulation of the `(n + 1)`-gon.
pub fn triangulation_to_tree(t: &Triangulation) -> PlaneTree {
    fn build(t: &Triangulation, i: usize, j: usize) -> PlaneTree {
        if j - i == 1 {
            return PlaneTree::Leaf;
        }
        let m = (i + 1..j)
            .find(|&m| t.has_edge(i, m) && t.has_edge(m, j))
            .expect("every chord of a triangulation bounds a triangle");
        PlaneTree::node(build(t, i, m), build(t, m, j))
    }
    build(t, 1, t.n())
}

pub fn layout_to_pair(layout: &Layout) -> Result<DisjointPair> {
    if let Some(span) = proper_subtanglegrams(layout).first() {
        return Err(DualityError::NotIrreducible { lo: span.lo + 1, hi: span.hi });
    }
    let first = tree_to_triangulation(&layout.left)?;
    let second = tree_to_triangulation(&layout.right)?;
    Ok(DisjointPair::new(first, second)?)
}

pub fn pair_to_layout(p: &DisjointPair) -> Layout {
    Layout { left: triangulation_to_tree(p.first()), right: triangulation_to_tree(p.second()) }
}

/// The diagonal dual to a non-root internal vertex (preorder id).
pub fn node_diagonal(t: &PlaneTree, node: usize) -> Result<Diagonal> {
    let flat = t.flat();
    match flat.nodes.get(node) {
        Some(v) if node != 0 && v.children.is_some() => Ok(Diagonal::new(t.leaves() + 1, v.lo + 1, v.hi + 1)?),
        _ => Err(DualityError::InvalidNode(node)),
    }
}

/// The vertex (preorder id) dual to a diagonal of the `(n + 1)`-gon.
pub fn diagonal_node(t: &PlaneTree, d: Diagonal) -> Result<usize> {
    t.flat()
        .intervals()
        .get(&(d.a() - 1, d.b() - 1))
        .copied()
        .filter(|&v| v != 0)
        .ok_or(DualityError::InvalidNode(usize::MAX))
}

/// The classical rotation of the edge between `node` and its parent.
///
/// A left child `(A, B)` of `((A, B), C)` becomes the right child `(B, C)` of
/// `(A, (B, C))`, and symmetrically for a right child.
pub fn rotate_tree(t: &PlaneTree, node: usize) -> Result<PlaneTree> {
    fn walk(t: &PlaneTree, me: usize, node: usize) -> Option<PlaneTree> {
        let PlaneTree::Node(l, r) = t else { return None };
        let (lid, rid) = (me + 1, me + 1 + l.size());
        if node == lid {
            let PlaneTree::Node(a, b) = l.as_ref() else { return None };
            return Some(PlaneTree::node((**a).clone(), PlaneTree::node((**b).clone(), (**r).clone())));
        }
        if node == rid {
            let PlaneTree::Node(b, c) = r.as_ref() else { return None };
            return Some(PlaneTree::node(PlaneTree::node((**l).clone(), (**b).clone()), (**c).clone()));
        }
        if node < rid {
            walk(l, lid, node).map(|x| PlaneTree::node(x, (**r).clone()))
        } else {
            walk(r, rid, node).map(|x| PlaneTree::node((**l).clone(), x))
        }
    }
    if node == 0 {
        return Err(DualityError::InvalidNode(node));
    }
    walk(t, 0, node).ok_or(DualityError::InvalidNode(node))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Rotation {
    pub layout: Layout,
    /// True when a second, synchronizing rotation in the other tree was needed.
    pub double: bool,
    /// Tree and vertex (preorder id) of the rotation that undoes this one.
    pub inverse: (Side, usize),
}

fn tree(layout: &Layout, side: Side) -> &PlaneTree {
    match side {
        Side::First => &layout.left,
        Side::Second => &layout.right,
    }
}

fn with_tree(layout: &Layout, side: Side, t: PlaneTree) -> Layout {
    match side {
        Side::First => Layout { left: t, right: layout.right.clone() },
        Side::Second => Layout { left: layout.left.clone(), right: t },
    }
}

/// Rotates at `node` in the tree on `side`. If that creates a proper
/// subtanglegram, the other tree is rotated at the vertex spanning it, which
/// restores irreducibility.
pub fn rotate(layout: &Layout, side: Side, node: usize) -> Result<Rotation> {
    let old = tree(layout, side);
    let flat = old.flat();
    let target = flat.nodes.get(node).filter(|v| node != 0 && v.children.is_some());
    let Some(&v) = target else {
        return Err(DualityError::InvalidNode(node));
    };
    let parent = flat.nodes[v.parent.expect("non-root")];
    let rotated = rotate_tree(old, node)?;
    // The merged vertex spans everything under the old parent except the
    // outer grandchild that moved up.
    let (gl, _) = v.children.unwrap();
    let created = if parent.children.unwrap().0 == node {
        (flat.nodes[gl].hi, parent.hi)
    } else {
        let (_, gr) = v.children.unwrap();
        (parent.lo, flat.nodes[gr].lo)
    };
    let created_id = rotated.flat().intervals()[&created];
    let once = with_tree(layout, side, rotated);
    let spans = proper_subtanglegrams(&once);
    match spans.as_slice() {
        [] => Ok(Rotation { layout: once, double: false, inverse: (side, created_id) }),
        [span] => {
            assert_eq!((span.lo, span.hi), created, "the only new subtanglegram is the rotated vertex");
            let other = side.other();
            let other_node = match other {
                Side::First => span.left_node,
                Side::Second => span.right_node,
            };
            let again = rotate(&once, other, other_node)?;
            debug_assert!(!again.double);
            Ok(Rotation { layout: again.layout, double: true, inverse: again.inverse })
        }
        _ => unreachable!("a rotation creates at most one proper subtanglegram"),
    }
}

/// The flip dual to rotating at `node` in the tree on `side`.
pub fn rotation_move(layout: &Layout, side: Side, node: usize) -> Result<FlipMove> {
    Ok(FlipMove::new(side, node_diagonal(tree(layout, side), node)?))
}

/// All irreducible layouts of size `n`, from every pair of plane trees.
pub fn irreducible_layouts(n: usize) -> Vec<Layout> {
    let trees = PlaneTree::all_with_leaves(n);
    let mut out = Vec::new();
    for l in &trees {
        for r in &trees {
            let layout = Layout { left: l.clone(), right: r.clone() };
            if proper_subtanglegrams(&layout).is_empty() {
                out.push(layout);
            }
        }
    }
    out
}

/// Builds the rotation graph on irreducible layouts of size `n` from plane
/// trees alone and checks that the dual map is an isomorphism onto the flip
/// graph of the `(n + 1)`-gon, edge multiplicities included.
pub fn rotation_graph_isomorphic(n: usize) -> Result<bool> {
    let g = FlipGraph::build(n + 1)?;
    let layouts = irreducible_layouts(n);
    if layouts.len() != g.vertex_count() {
        return Ok(false);
    }
    let index: HashMap<&Layout, usize> = layouts.iter().enumerate().map(|(i, l)| (l, i)).collect();
    let mut image = vec![usize::MAX; layouts.len()];
    let mut hit = vec![false; layouts.len()];
    for (i, l) in layouts.iter().enumerate() {
        match g.index_of(&layout_to_pair(l)?) {
            Some(v) if !std::mem::replace(&mut hit[v], true) => image[i] = v,
            _ => return Ok(false),
        }
    }
    for (i, l) in layouts.iter().enumerate() {
        let mut rotated = Vec::new();
        for side in [Side::First, Side::Second] {
            let flat = tree(l, side).flat();
            for (node, v) in flat.nodes.iter().enumerate().skip(1) {
                if v.children.is_some() {
                    let r = rotate(l, side, node)?;
                    rotated.push(image[index[&r.layout]] as u32);
                }
            }
        }
        let mut expected = g.neighbors(image[i]).to_vec();
        rotated.sort_unstable();
        expected.sort_unstable();
        if rotated != expected {
            return Ok(false);
        }
    }
    Ok(true)
}
