//! Canonical forms, the irreducible core, and block substitution.
//!
//! Two presentations describe the same tanglegram iff they differ by child
//! exchanges, so a canonical form picks one presentation per class. The
//! maximal proper subtanglegrams ("blocks") of a tanglegram are intrinsic, as
//! is the irreducible core obtained by contracting each block to a leaf pair.
//! The canonical presentation is found recursively: canonicalize the blocks,
//! list an isomorphism-invariant family of core presentations, graft the
//! canonical blocks into each, and keep the smallest text encoding.
//!
//! For a planar core the family is its set of zero-crossing layouts (two of
//! them), so planar tanglegrams of any size canonicalize in polynomial time.
//! A non-planar core uses every child order of its left tree, each paired
//! with the right child order that sorts siblings by smallest left position.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;

use super::{planarity, FlatTree, Layout, PlaneTree, Presentation, Result, TanglegramError};

/// Default cap for listing every tanglegram of a given size.
pub const DEFAULT_ENUMERATION_CAP: usize = 6;

/// Largest non-planar core handled by the left-order search.
const NONPLANAR_CORE_CAP: usize = 16;

/// The irreducible core of a presentation and the blocks contracted into it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Decomposition {
    /// Core presentation, in the child orders inherited from the input.
    pub core: Presentation,
    /// Blocks listed by the top-to-bottom position of their left leaves.
    pub blocks: Vec<Presentation>,
}

/// Splits a presentation into its core and maximal proper subtanglegrams.
pub fn decompose(p: &Presentation) -> Decomposition {
    let n = p.size();
    if n == 1 {
        return Decomposition { core: p.clone(), blocks: vec![p.clone()] };
    }
    let left = p.left.flat();
    let right = p.right.flat();
    let right_intervals = right.intervals();
    let mut pairs = Vec::new();
    let mut stack = match left.nodes[0].children {
        Some((a, b)) => vec![b, a],
        None => unreachable!(),
    };
    while let Some(u) = stack.pop() {
        let node = left.nodes[u];
        let image = &p.perm[node.lo..node.hi];
        let lo = *image.iter().min().unwrap();
        let hi = *image.iter().max().unwrap() + 1;
        let matched = (hi - lo == node.hi - node.lo)
            .then(|| right_intervals.get(&(lo, hi)).copied())
            .flatten()
            .filter(|&v| v != 0);
        match (matched, node.children) {
            (Some(v), _) => pairs.push((u, v)),
            (None, Some((a, b))) => {
                stack.push(b);
                stack.push(a);
            }
            (None, None) => unreachable!("a leaf always matches a leaf"),
        }
    }
    let mut left_at = vec![false; left.nodes.len()];
    let mut right_at = vec![false; right.nodes.len()];
    for &(u, v) in &pairs {
        left_at[u] = true;
        right_at[v] = true;
    }
    let mut by_right: Vec<usize> = (0..pairs.len()).collect();
    by_right.sort_by_key(|&i| right.nodes[pairs[i].1].lo);
    let mut core_perm = vec![0; pairs.len()];
    for (pos, &i) in by_right.iter().enumerate() {
        core_perm[i] = pos;
    }
    let core = Presentation {
        left: p.left.contract(&left_at),
        right: p.right.contract(&right_at),
        perm: core_perm,
    };
    let lsub = p.left.preorder();
    let rsub = p.right.preorder();
    let blocks = pairs
        .iter()
        .map(|&(u, v)| block(p, &left, &right, &lsub, &rsub, u, v))
        .collect();
    Decomposition { core, blocks }
}

fn block(
    p: &Presentation,
    left: &FlatTree,
    right: &FlatTree,
    lsub: &[&PlaneTree],
    rsub: &[&PlaneTree],
    u: usize,
    v: usize,
) -> Presentation {
    let (ln, rn) = (left.nodes[u], right.nodes[v]);
    Presentation {
        left: lsub[u].clone(),
        right: rsub[v].clone(),
        perm: p.perm[ln.lo..ln.hi].iter().map(|&x| x - rn.lo).collect(),
    }
}

/// Grafts `blocks` (listed by left position) into the leaves of `core`.
pub(crate) fn compose(core: &Presentation, blocks: &[Presentation]) -> Presentation {
    let k = core.size();
    debug_assert_eq!(blocks.len(), k);
    let mut at_right = vec![0; k];
    for (i, &j) in core.perm.iter().enumerate() {
        at_right[j] = i;
    }
    let left = core.left.graft(&blocks.iter().map(|b| b.left.clone()).collect::<Vec<_>>());
    let right = core.right.graft(&at_right.iter().map(|&i| blocks[i].right.clone()).collect::<Vec<_>>());
    let mut right_offset = vec![0; k];
    let mut acc = 0;
    for j in 0..k {
        right_offset[j] = acc;
        acc += blocks[at_right[j]].size();
    }
    let mut perm = Vec::with_capacity(acc);
    for (i, b) in blocks.iter().enumerate() {
        let base = right_offset[core.perm[i]];
        perm.extend(b.perm.iter().map(|&x| base + x));
    }
    Presentation { left, right, perm }
}

fn internal_ids(t: &PlaneTree) -> Vec<usize> {
    t.flat()
        .nodes
        .iter()
        .enumerate()
        .filter(|(_, v)| v.children.is_some())
        .map(|(i, _)| i)
        .collect()
}

/// Right child orders sorting siblings by their smallest matched left leaf.
fn sorted_right(p: &Presentation) -> Presentation {
    let right = p.right.flat();
    let mut inverse = vec![0; p.size()];
    for (i, &j) in p.perm.iter().enumerate() {
        inverse[j] = i;
    }
    let smallest = |v: usize| inverse[right.nodes[v].lo..right.nodes[v].hi].iter().min().copied().unwrap();
    let flips: Vec<bool> = right
        .nodes
        .iter()
        .map(|node| node.children.is_some_and(|(a, b)| smallest(a) > smallest(b)))
        .collect();
    p.with_flips(&[], &flips)
}

/// Core presentations to try, each with the old left positions of its
/// leaves in their new top-to-bottom order.
fn core_candidates(core: &Presentation) -> Vec<(Presentation, Vec<usize>)> {
    if let Some(assignments) = planarity::planar_flip_assignments(core, 1 << 12) {
        if !assignments.is_empty() {
            return assignments
                .iter()
                .map(|(lf, rf)| (core.with_flips(lf, rf), core.left.reordered(lf).1))
                .collect();
        }
    }
    let ids = internal_ids(&core.left);
    assert!(core.size() <= NONPLANAR_CORE_CAP, "non-planar core of size {} is too large", core.size());
    (0..1usize << ids.len())
        .map(|mask| {
            let mut flips = vec![false; core.left.size()];
            for (bit, &i) in ids.iter().enumerate() {
                flips[i] = (mask >> bit) & 1 == 1;
            }
            (sorted_right(&core.with_flips(&flips, &[])), core.left.reordered(&flips).1)
        })
        .collect()
}

fn canonical_presentation(p: &Presentation) -> Presentation {
    if p.size() == 1 {
        return p.clone();
    }
    let Decomposition { core, blocks } = decompose(p);
    let blocks: Vec<Presentation> = blocks.iter().map(canonical_presentation).collect();
    core_candidates(&core)
        .into_iter()
        .map(|(c, order)| {
            let arranged: Vec<Presentation> = order.iter().map(|&i| blocks[i].clone()).collect();
            let q = compose(&c, &arranged);
            (q.to_string(), q)
        })
        .min_by(|a, b| a.0.cmp(&b.0))
        .unwrap()
        .1
}

/// A tanglegram up to isomorphism, stored as its canonical presentation.
#[derive(Clone)]
pub struct Tanglegram {
    canonical: Presentation,
    code: String,
}

impl Tanglegram {
    pub fn from_presentation(p: &Presentation) -> Tanglegram {
        let canonical = canonical_presentation(p);
        let code = canonical.to_string();
        Tanglegram { canonical, code }
    }

    pub fn canonicalize(left: PlaneTree, right: PlaneTree, matching: Vec<usize>) -> Result<Tanglegram> {
        Ok(Self::from_presentation(&Presentation::new(left, right, matching)?))
    }

    pub fn single() -> Tanglegram {
        Self::from_presentation(&Presentation::identity(PlaneTree::Leaf, PlaneTree::Leaf).unwrap())
    }

    pub fn cherry() -> Tanglegram {
        Self::from_presentation(&Presentation::identity(PlaneTree::cherry(), PlaneTree::cherry()).unwrap())
    }

    pub fn code(&self) -> &str {
        &self.code
    }

    pub fn size(&self) -> usize {
        self.canonical.size()
    }

    pub fn presentation(&self) -> &Presentation {
        &self.canonical
    }

    /// Some zero-crossing layout, if one exists. For planar tanglegrams the
    /// canonical presentation is itself such a layout.
    pub fn planar_layout(&self) -> Option<Layout> {
        self.canonical.as_layout().or_else(|| planarity::planar_layout(&self.canonical))
    }

    pub fn is_planar(&self) -> bool {
        self.planar_layout().is_some()
    }

    pub fn is_irreducible(&self) -> bool {
        self.size() >= 2 && decompose(&self.canonical).core.size() == self.size()
    }
}

impl PartialEq for Tanglegram {
    fn eq(&self, other: &Self) -> bool {
        self.code == other.code
    }
}

impl Eq for Tanglegram {}

impl std::hash::Hash for Tanglegram {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        self.code.hash(state);
    }
}

impl PartialOrd for Tanglegram {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Tanglegram {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.code.cmp(&other.code)
    }
}

impl fmt::Display for Tanglegram {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.code)
    }
}

impl fmt::Debug for Tanglegram {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Tanglegram({})", self.code)
    }
}

impl FromStr for Tanglegram {
    type Err = TanglegramError;

    fn from_str(s: &str) -> Result<Self> {
        Ok(Tanglegram::from_presentation(&s.parse()?))
    }
}

/// The irreducible core and the blocks contracted into it. For planar
/// tanglegrams the blocks are listed top to bottom in a zero-crossing layout.
pub fn irr(t: &Tanglegram) -> (Tanglegram, Vec<Tanglegram>) {
    let d = decompose(t.presentation());
    let core = Tanglegram::from_presentation(&d.core);
    let blocks = d.blocks.iter().map(Tanglegram::from_presentation).collect();
    (core, blocks)
}

/// Replaces the matched leaves of `core`, top to bottom, with `blocks`.
pub fn substitute(core: &Layout, blocks: &[Tanglegram]) -> Result<Tanglegram> {
    if blocks.len() != core.size() {
        return Err(TanglegramError::BlockCount { expected: core.size(), got: blocks.len() });
    }
    let parts: Vec<Presentation> = blocks
        .iter()
        .map(|b| b.planar_layout().map(|l| l.presentation()).unwrap_or_else(|| b.presentation().clone()))
        .collect();
    Ok(Tanglegram::from_presentation(&compose(&core.presentation(), &parts)))
}

pub fn enumerate_tanglegrams(n: usize, planar_only: bool) -> Result<Vec<Tanglegram>> {
    enumerate_tanglegrams_with_cap(n, planar_only, DEFAULT_ENUMERATION_CAP)
}

/// Every tanglegram of size `n` (optionally only the planar ones), sorted by code.
pub fn enumerate_tanglegrams_with_cap(n: usize, planar_only: bool, cap: usize) -> Result<Vec<Tanglegram>> {
    if n == 0 || n > cap {
        return Err(TanglegramError::CapExceeded { n, cap });
    }
    let shapes = PlaneTree::shapes_with_leaves(n);
    let perms = permutations(n);
    let jobs: Vec<(&PlaneTree, &PlaneTree)> =
        shapes.iter().flat_map(|l| shapes.iter().map(move |r| (l, r))).collect();
    let found: BTreeSet<Tanglegram> = jobs
        .par_iter()
        .map(|&(l, r)| {
            let mut local = BTreeSet::new();
            for perm in &perms {
                let p = Presentation { left: l.clone(), right: r.clone(), perm: perm.clone() };
                if planar_only && planarity::planar_layout(&p).is_none() {
                    continue;
                }
                local.insert(Tanglegram::from_presentation(&p));
            }
            local
        })
        .reduce(BTreeSet::new, |mut a, b| {
            a.extend(b);
            a
        });
    Ok(found.into_iter().collect())
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut current: Vec<usize> = (0..n).collect();
    loop {
        out.push(current.clone());
        // Next permutation in lexicographic order.
        let Some(i) = (1..n).rev().find(|&i| current[i - 1] < current[i]) else {
            return out;
        };
        let j = (i..n).rev().find(|&j| current[j] > current[i - 1]).unwrap();
        current.swap(i - 1, j);
        current[i..].reverse();
    }
}

/// Planar tanglegrams of size `n` grouped by the size of their core.
pub fn census_by_core_size(n: usize) -> Result<BTreeMap<usize, usize>> {
    let mut out = BTreeMap::new();
    for t in enumerate_tanglegrams(n, true)? {
        let k = if n == 1 { 1 } else { decompose(t.presentation()).core.size() };
        *out.entry(k).or_insert(0) += 1;
    }
    Ok(out)
}
