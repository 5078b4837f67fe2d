//! Triangulations of a labeled convex polygon, single flips, and the flip
//! operation on ordered pairs of disjoint triangulations.
//!
//! Vertices are labeled `1..=n` counterclockwise. A diagonal is stored as
//! `(a, b)` with `a < b`; polygon sides are never stored. A triangulation is a
//! set of `n - 3` pairwise noncrossing diagonals, kept as a 128-bit set so that
//! membership tests, disjointness tests, and hashing are all constant time.

use std::cmp::Ordering;
use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Largest polygon whose diagonals fit in the bit-set representation.
pub const MAX_POLYGON: usize = 16;

/// Default cap for listing every triangulation of a polygon.
pub const DEFAULT_TRIANGULATION_CAP: usize = 14;

/// Default cap for listing every disjoint pair of a polygon.
pub const DEFAULT_PAIR_CAP: usize = 11;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PolygonError {
    #[error("polygon size {n} is outside the supported range 3..={max}", max = MAX_POLYGON)]
    UnsupportedSize { n: usize },
    #[error("polygon size {n} exceeds the configured cap {cap}")]
    CapExceeded { n: usize, cap: usize },
    #[error("({a},{b}) is not a diagonal of the {n}-gon")]
    InvalidDiagonal { n: usize, a: usize, b: usize },
    #[error("diagonal {0} is not present in the triangulation")]
    DiagonalAbsent(Diagonal),
    #[error("diagonals {0} and {1} cross")]
    Crossing(Diagonal, Diagonal),
    #[error("diagonal {0} is listed twice")]
    Duplicate(Diagonal),
    #[error("a triangulation of the {n}-gon has {expected} diagonals, got {got}")]
    WrongCount { n: usize, expected: usize, got: usize },
    #[error("the two triangulations share diagonal {0}")]
    SharedDiagonal(Diagonal),
    #[error("polygon sizes differ ({0} vs {1})")]
    SizeMismatch(usize, usize),
    #[error("cannot parse `{input}`: {reason}")]
    Parse { input: String, reason: String },
}

pub type Result<T, E = PolygonError> = std::result::Result<T, E>;

pub(crate) fn check_size(n: usize) -> Result<()> {
    if (3..=MAX_POLYGON).contains(&n) {
        Ok(())
    } else {
        Err(PolygonError::UnsupportedSize { n })
    }
}

fn check_cap(n: usize, cap: usize) -> Result<()> {
    check_size(n)?;
    if n > cap {
        return Err(PolygonError::CapExceeded { n, cap });
    }
    Ok(())
}

/// Position of the chord `(a, b)`, `a < b`, in the bit set.
#[inline]
pub(crate) fn chord_bit(a: usize, b: usize) -> u32 {
    debug_assert!(1 <= a && a < b && b <= MAX_POLYGON);
    ((b - 1) * (b - 2) / 2 + (a - 1)) as u32
}

#[inline]
fn is_side(n: usize, a: usize, b: usize) -> bool {
    b - a == 1 || (a == 1 && b == n)
}

/// A diagonal `(a, b)` of a convex polygon with `a < b`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Diagonal {
    a: u8,
    b: u8,
}

impl Diagonal {
    /// Builds the diagonal joining `x` and `y` in the `n`-gon, in either order.
    pub fn new(n: usize, x: usize, y: usize) -> Result<Self> {
        let (a, b) = if x < y { (x, y) } else { (y, x) };
        if !(3..=MAX_POLYGON).contains(&n) || a < 1 || b > n || b - a < 2 || (a == 1 && b == n) {
            return Err(PolygonError::InvalidDiagonal { n, a: x, b: y });
        }
        Ok(Self::normalized(a, b))
    }

    #[inline]
    pub(crate) fn normalized(x: usize, y: usize) -> Self {
        let (a, b) = if x < y { (x, y) } else { (y, x) };
        Diagonal { a: a as u8, b: b as u8 }
    }

    pub fn a(self) -> usize {
        self.a as usize
    }

    pub fn b(self) -> usize {
        self.b as usize
    }

    #[inline]
    pub(crate) fn bit(self) -> u32 {
        chord_bit(self.a(), self.b())
    }
}

impl fmt::Display for Diagonal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}-{}", self.a, self.b)
    }
}

/// True iff the endpoints of the two diagonals strictly interleave.
pub fn crosses(d1: Diagonal, d2: Diagonal) -> bool {
    let (a, b, c, d) = (d1.a, d1.b, d2.a, d2.b);
    (a < c && c < b && b < d) || (c < a && a < d && d < b)
}

/// The quadrilateral `(a, a′, b, b′)` in cyclic order around a diagonal `(a, b)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Quad {
    pub a: usize,
    pub a_prime: usize,
    pub b: usize,
    pub b_prime: usize,
}

impl Quad {
    /// The other diagonal of the quadrilateral.
    pub fn opposite(&self) -> Diagonal {
        Diagonal::normalized(self.a_prime, self.b_prime)
    }
}

/// A triangulation of the convex `n`-gon.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct Triangulation {
    n: u8,
    mask: u128,
}

impl Triangulation {
    pub fn new(n: usize, diagonals: impl IntoIterator<Item = Diagonal>) -> Result<Self> {
        check_size(n)?;
        let mut mask = 0u128;
        let mut seen: Vec<Diagonal> = Vec::new();
        for d in diagonals {
            let d = Diagonal::new(n, d.a(), d.b())?;
            if mask & (1 << d.bit()) != 0 {
                return Err(PolygonError::Duplicate(d));
            }
            if let Some(&other) = seen.iter().find(|&&o| crosses(o, d)) {
                return Err(PolygonError::Crossing(other, d));
            }
            mask |= 1 << d.bit();
            seen.push(d);
        }
        if seen.len() != n - 3 {
            return Err(PolygonError::WrongCount { n, expected: n - 3, got: seen.len() });
        }
        Ok(Triangulation { n: n as u8, mask })
    }

    /// Convenience constructor from `(a, b)` pairs.
    pub fn from_pairs(n: usize, pairs: &[(usize, usize)]) -> Result<Self> {
        let diagonals = pairs
            .iter()
            .map(|&(a, b)| Diagonal::new(n, a, b))
            .collect::<Result<Vec<_>>>()?;
        Self::new(n, diagonals)
    }

    #[inline]
    pub(crate) fn from_mask(n: usize, mask: u128) -> Self {
        Triangulation { n: n as u8, mask }
    }

    pub fn n(&self) -> usize {
        self.n as usize
    }

    #[inline]
    pub fn mask(&self) -> u128 {
        self.mask
    }

    #[inline]
    pub fn contains(&self, d: Diagonal) -> bool {
        self.mask & (1 << d.bit()) != 0
    }

    /// True iff `(x, y)` is a side of the polygon or a diagonal of `self`.
    #[inline]
    pub fn has_edge(&self, x: usize, y: usize) -> bool {
        let (a, b) = if x < y { (x, y) } else { (y, x) };
        is_side(self.n(), a, b) || self.mask & (1 << chord_bit(a, b)) != 0
    }

    /// Diagonals in lexicographic order.
    pub fn diagonals(&self) -> Vec<Diagonal> {
        let n = self.n();
        let mut out = Vec::with_capacity(n.saturating_sub(3));
        for a in 1..=n {
            for b in a + 2..=n {
                if self.mask & (1 << chord_bit(a, b)) != 0 {
                    out.push(Diagonal::normalized(a, b));
                }
            }
        }
        out
    }

    pub fn is_disjoint(&self, other: &Triangulation) -> bool {
        self.mask & other.mask == 0
    }

    pub fn quad(&self, d: Diagonal) -> Result<Quad> {
        if d.b() > self.n() || !self.contains(d) {
            return Err(PolygonError::DiagonalAbsent(d));
        }
        let (a, b) = (d.a(), d.b());
        let n = self.n();
        let apex = |c: &usize| self.has_edge(a, *c) && self.has_edge(*c, b);
        let a_prime = (a + 1..b).find(apex).expect("triangulated interior side");
        let b_prime = (b + 1..=n).chain(1..a).find(apex).expect("triangulated exterior side");
        Ok(Quad { a, a_prime, b, b_prime })
    }

    /// Replaces `d` by the other diagonal of its quadrilateral.
    pub fn flip(&self, d: Diagonal) -> Result<(Triangulation, Diagonal)> {
        let new = self.quad(d)?.opposite();
        let mask = (self.mask & !(1 << d.bit())) | (1 << new.bit());
        Ok((Triangulation { n: self.n, mask }, new))
    }

    /// Applies a vertex relabeling, which must be a symmetry of the polygon.
    pub fn relabel(&self, f: impl Fn(usize) -> usize) -> Triangulation {
        let mut mask = 0u128;
        for d in self.diagonals() {
            mask |= 1 << Diagonal::normalized(f(d.a()), f(d.b())).bit();
        }
        Triangulation { n: self.n, mask }
    }
}

/// The standard triangulation: every diagonal through `apex`.
pub fn fan(n: usize, apex: usize) -> Result<Triangulation> {
    check_size(n)?;
    if !(1..=n).contains(&apex) {
        return Err(PolygonError::Parse {
            input: apex.to_string(),
            reason: format!("apex must lie in 1..={n}"),
        });
    }
    let mut mask = 0u128;
    for v in 1..=n {
        let (a, b) = if apex < v { (apex, v) } else { (v, apex) };
        if a != b && !is_side(n, a, b) {
            mask |= 1 << chord_bit(a, b);
        }
    }
    Ok(Triangulation::from_mask(n, mask))
}

impl Ord for Triangulation {
    fn cmp(&self, other: &Self) -> Ordering {
        self.n
            .cmp(&other.n)
            .then_with(|| self.diagonals().cmp(&other.diagonals()))
    }
}

impl PartialOrd for Triangulation {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Triangulation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:[", self.n)?;
        for (i, d) in self.diagonals().iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{d}")?;
        }
        f.write_str("]")
    }
}

impl fmt::Debug for Triangulation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

fn parse_err(input: &str, reason: impl Into<String>) -> PolygonError {
    PolygonError::Parse { input: input.to_string(), reason: reason.into() }
}

impl FromStr for Triangulation {
    type Err = PolygonError;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let (n, rest) = s.split_once(':').ok_or_else(|| parse_err(s, "missing `n:`"))?;
        let n: usize = n.trim().parse().map_err(|_| parse_err(s, "bad polygon size"))?;
        let body = rest
            .trim()
            .strip_prefix('[')
            .and_then(|r| r.strip_suffix(']'))
            .ok_or_else(|| parse_err(s, "diagonal list must be bracketed"))?;
        let mut diagonals = Vec::new();
        for item in body.split(',').map(str::trim).filter(|i| !i.is_empty()) {
            let (a, b) = item.split_once('-').ok_or_else(|| parse_err(s, "diagonal must be `a-b`"))?;
            let a: usize = a.trim().parse().map_err(|_| parse_err(s, "bad vertex label"))?;
            let b: usize = b.trim().parse().map_err(|_| parse_err(s, "bad vertex label"))?;
            diagonals.push(Diagonal::new(n, a, b)?);
        }
        Triangulation::new(n, diagonals)
    }
}

/// Which coordinate of a [`DisjointPair`] a flip acts on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Side {
    First,
    Second,
}

impl Side {
    pub fn other(self) -> Side {
        match self {
            Side::First => Side::Second,
            Side::Second => Side::First,
        }
    }

    /// 1 or 2.
    pub fn index(self) -> usize {
        match self {
            Side::First => 1,
            Side::Second => 2,
        }
    }
}

/// An ordered pair of triangulations of the same polygon sharing no diagonal.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct DisjointPair {
    first: Triangulation,
    second: Triangulation,
}

impl DisjointPair {
    pub fn new(first: Triangulation, second: Triangulation) -> Result<Self> {
        if first.n() != second.n() {
            return Err(PolygonError::SizeMismatch(first.n(), second.n()));
        }
        if let Some(d) = first.diagonals().into_iter().find(|&d| second.contains(d)) {
            return Err(PolygonError::SharedDiagonal(d));
        }
        Ok(DisjointPair { first, second })
    }

    #[inline]
    pub(crate) fn from_parts(first: Triangulation, second: Triangulation) -> Self {
        debug_assert!(first.is_disjoint(&second));
        DisjointPair { first, second }
    }

    pub fn n(&self) -> usize {
        self.first.n()
    }

    pub fn first(&self) -> &Triangulation {
        &self.first
    }

    pub fn second(&self) -> &Triangulation {
        &self.second
    }

    pub fn get(&self, side: Side) -> &Triangulation {
        match side {
            Side::First => &self.first,
            Side::Second => &self.second,
        }
    }

    pub fn swapped(&self) -> DisjointPair {
        DisjointPair { first: self.second, second: self.first }
    }

    pub fn relabel(&self, f: impl Fn(usize) -> usize + Copy) -> DisjointPair {
        DisjointPair { first: self.first.relabel(f), second: self.second.relabel(f) }
    }

    fn with(&self, side: Side, t: Triangulation) -> DisjointPair {
        match side {
            Side::First => DisjointPair { first: t, second: self.second },
            Side::Second => DisjointPair { first: self.first, second: t },
        }
    }

    /// The pair of standard triangulations at apex 1 and apex `n`.
    pub fn standard(n: usize) -> Result<Self> {
        DisjointPair::new(fan(n, 1)?, fan(n, n)?)
    }
}

impl fmt::Display for DisjointPair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}|{}", self.first, self.second)
    }
}

impl fmt::Debug for DisjointPair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl FromStr for DisjointPair {
    type Err = PolygonError;

    fn from_str(s: &str) -> Result<Self> {
        let (a, b) = s.trim().split_once('|').ok_or_else(|| parse_err(s, "expected `T1|T2`"))?;
        DisjointPair::new(a.parse()?, b.parse()?)
    }
}

/// A flip at diagonal `(a, b)` of the triangulation on `side`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct FlipMove {
    pub side: Side,
    pub diagonal: Diagonal,
}

impl FlipMove {
    pub fn new(side: Side, diagonal: Diagonal) -> Self {
        FlipMove { side, diagonal }
    }
}

impl fmt::Display for FlipMove {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})_{}", self.diagonal.a, self.diagonal.b, self.side.index())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum FlipKind {
    Single,
    Double,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FlipOutcome {
    pub pair: DisjointPair,
    pub kind: FlipKind,
    /// The move that takes `pair` back to the input.
    pub inverse: FlipMove,
}

/// Flips `m.diagonal` in the `m.side` triangulation; when the new diagonal
/// collides with the other triangulation it is flipped there as well.
pub fn flip_pair(p: &DisjointPair, m: FlipMove) -> Result<FlipOutcome> {
    let own = p.get(m.side);
    let other = p.get(m.side.other());
    let (own_new, created) = own.flip(m.diagonal)?;
    if other.contains(created) {
        let (other_new, pushed) = other.flip(created)?;
        let pair = p.with(m.side, own_new).with(m.side.other(), other_new);
        Ok(FlipOutcome {
            pair,
            kind: FlipKind::Double,
            inverse: FlipMove::new(m.side.other(), pushed),
        })
    } else {
        Ok(FlipOutcome {
            pair: p.with(m.side, own_new),
            kind: FlipKind::Single,
            inverse: FlipMove::new(m.side, created),
        })
    }
}

/// Every legal move from `p`: first-side diagonals in order, then second-side.
pub fn moves(p: &DisjointPair) -> Vec<FlipMove> {
    let mut out = Vec::with_capacity(2 * p.n().saturating_sub(3));
    for side in [Side::First, Side::Second] {
        out.extend(p.get(side).diagonals().into_iter().map(|d| FlipMove::new(side, d)));
    }
    out
}

/// One entry per legal move, `2(n - 3)` in total.
pub fn neighbors(p: &DisjointPair) -> Vec<(FlipMove, DisjointPair)> {
    moves(p)
        .into_iter()
        .map(|m| {
            let out = flip_pair(p, m).expect("move taken from the pair itself");
            (m, out.pair)
        })
        .collect()
}

/// Triangulations of the sub-polygon `i..=j` (chord `(i, j)` assumed present)
/// that avoid every chord in `forbidden`, as diagonal bit sets.
fn sub_triangulations(
    n: usize,
    i: usize,
    j: usize,
    forbidden: u128,
    memo: &mut HashMap<(usize, usize), Vec<u128>>,
) -> Vec<u128> {
    if j - i < 2 {
        return vec![0];
    }
    if let Some(v) = memo.get(&(i, j)) {
        return v.clone();
    }
    let allowed = |a: usize, b: usize| is_side(n, a, b) || forbidden & (1 << chord_bit(a, b)) == 0;
    let chord = |a: usize, b: usize| if is_side(n, a, b) { 0 } else { 1u128 << chord_bit(a, b) };
    let mut out = Vec::new();
    for m in i + 1..j {
        if !allowed(i, m) || !allowed(m, j) {
            continue;
        }
        let left = sub_triangulations(n, i, m, forbidden, memo);
        let right = sub_triangulations(n, m, j, forbidden, memo);
        let base = chord(i, m) | chord(m, j);
        for &l in &left {
            for &r in &right {
                out.push(base | l | r);
            }
        }
    }
    memo.insert((i, j), out.clone());
    out
}

fn sort_lex(n: usize, masks: Vec<u128>) -> Vec<Triangulation> {
    let mut ts: Vec<Triangulation> = masks.into_iter().map(|m| Triangulation::from_mask(n, m)).collect();
    ts.sort_by_cached_key(|t| t.diagonals());
    ts
}

/// All triangulations avoiding the diagonals of `forbidden`, in lexicographic order.
pub fn triangulations_avoiding(forbidden: &Triangulation) -> Vec<Triangulation> {
    let n = forbidden.n();
    let masks = sub_triangulations(n, 1, n, forbidden.mask(), &mut HashMap::new());
    sort_lex(n, masks)
}

pub fn enumerate_triangulations(n: usize) -> Result<Vec<Triangulation>> {
    enumerate_triangulations_with_cap(n, DEFAULT_TRIANGULATION_CAP)
}

/// Every triangulation of the `n`-gon in lexicographic order of diagonal lists.
pub fn enumerate_triangulations_with_cap(n: usize, cap: usize) -> Result<Vec<Triangulation>> {
    check_cap(n, cap)?;
    let masks = sub_triangulations(n, 1, n, 0, &mut HashMap::new());
    Ok(sort_lex(n, masks))
}

pub fn enumerate_disjoint_pairs(n: usize) -> Result<Vec<DisjointPair>> {
    enumerate_disjoint_pairs_with_cap(n, DEFAULT_PAIR_CAP)
}

/// Every ordered disjoint pair, ordered by first then second triangulation.
pub fn enumerate_disjoint_pairs_with_cap(n: usize, cap: usize) -> Result<Vec<DisjointPair>> {
    check_cap(n, cap)?;
    let mut out = Vec::new();
    for first in enumerate_triangulations_with_cap(n, MAX_POLYGON)? {
        for second in triangulations_avoiding(&first) {
            out.push(DisjointPair::from_parts(first, second));
        }
    }
    Ok(out)
}

/// Number of triangulations of the `n`-gon containing none of the diagonals
/// in `forbidden`, by interval dynamic programming.
pub fn count_triangulations_avoiding(n: usize, forbidden: u128) -> u64 {
    let allowed = |a: usize, b: usize| is_side(n, a, b) || forbidden & (1 << chord_bit(a, b)) == 0;
    // ways[i][j]: triangulations of the sub-polygon i..=j.
    let mut ways = vec![vec![0u64; n + 1]; n + 1];
    for i in 1..n {
        ways[i][i + 1] = 1;
    }
    for len in 2..n {
        for i in 1..=n - len {
            let j = i + len;
            let mut total = 0u64;
            for m in i + 1..j {
                if allowed(i, m) && allowed(m, j) {
                    total += ways[i][m] * ways[m][j];
                }
            }
            ways[i][j] = total;
        }
    }
    ways[1][n]
}

/// Number of ordered disjoint pairs of the `n`-gon without listing them.
pub fn count_disjoint_pairs(n: usize) -> Result<u128> {
    check_size(n)?;
    let firsts = enumerate_triangulations_with_cap(n, MAX_POLYGON)?;
    Ok(firsts
        .iter()
        .map(|t| count_triangulations_avoiding(n, t.mask()) as u128)
        .sum())
}

/// A symmetry of `D_n`: a dihedral relabeling of the polygon, optionally
/// followed by exchanging the two coordinates.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Symmetry {
    pub n: usize,
    pub rotation: usize,
    pub reflect: bool,
    pub swap: bool,
}

impl Symmetry {
    /// All `4n` symmetries.
    pub fn all(n: usize) -> Vec<Symmetry> {
        let mut out = Vec::with_capacity(4 * n);
        for swap in [false, true] {
            for reflect in [false, true] {
                for rotation in 0..n {
                    out.push(Symmetry { n, rotation, reflect, swap });
                }
            }
        }
        out
    }

    pub fn vertex(&self, v: usize) -> usize {
        let v = if self.reflect { self.n + 1 - v } else { v };
        (v - 1 + self.rotation) % self.n + 1
    }

    pub fn apply(&self, p: &DisjointPair) -> DisjointPair {
        let q = p.relabel(|v| self.vertex(v));
        if self.swap {
            q.swapped()
        } else {
            q
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn d(n: usize, a: usize, b: usize) -> Diagonal {
        Diagonal::new(n, a, b).unwrap()
    }

    fn tri(n: usize, pairs: &[(usize, usize)]) -> Triangulation {
        Triangulation::from_pairs(n, pairs).unwrap()
    }

    fn catalan(m: usize) -> usize {
        let mut c = 1usize;
        for i in 0..m {
            c = c * 2 * (2 * i + 1) / (i + 2);
        }
        c
    }

    #[test]
    fn crossing_examples() {
        assert!(crosses(d(5, 1, 3), d(5, 2, 4)));
        assert!(!crosses(d(5, 1, 3), d(5, 1, 4)));
        assert!(!crosses(d(8, 2, 4), d(8, 5, 7)));
    }

    #[test]
    fn diagonal_validation() {
        assert!(Diagonal::new(6, 1, 2).is_err());
        assert!(Diagonal::new(6, 1, 6).is_err());
        assert!(Diagonal::new(6, 0, 3).is_err());
        assert_eq!(Diagonal::new(6, 5, 2).unwrap(), d(6, 2, 5));
    }

    #[test]
    fn triangulation_validation() {
        assert!(matches!(
            Triangulation::from_pairs(5, &[(1, 3), (2, 4)]),
            Err(PolygonError::Crossing(..))
        ));
        assert!(matches!(
            Triangulation::from_pairs(6, &[(1, 3), (1, 4)]),
            Err(PolygonError::WrongCount { .. })
        ));
        assert!(matches!(
            Triangulation::from_pairs(5, &[(1, 3), (3, 1)]),
            Err(PolygonError::Duplicate(_))
        ));
        assert_eq!(Triangulation::from_pairs(3, &[]).unwrap().diagonals(), vec![]);
    }

    #[test]
    fn quad_examples() {
        let fan6 = fan(6, 1).unwrap();
        let q = fan6.quad(d(6, 1, 4)).unwrap();
        assert_eq!((q.a, q.a_prime, q.b, q.b_prime), (1, 3, 4, 5));

        let hex = tri(6, &[(1, 4), (1, 5), (2, 4)]);
        let q = hex.quad(d(6, 2, 4)).unwrap();
        assert_eq!((q.a, q.a_prime, q.b, q.b_prime), (2, 3, 4, 1));

        let pent = tri(5, &[(1, 3), (1, 4)]);
        let q = pent.quad(d(5, 1, 3)).unwrap();
        assert_eq!((q.a, q.a_prime, q.b, q.b_prime), (1, 2, 3, 4));

        assert_eq!(pent.quad(d(5, 2, 4)), Err(PolygonError::DiagonalAbsent(d(5, 2, 4))));
    }

    #[test]
    fn single_flip_examples() {
        let (t, new) = fan(6, 1).unwrap().flip(d(6, 1, 4)).unwrap();
        assert_eq!(t, tri(6, &[(1, 3), (3, 5), (1, 5)]));
        assert_eq!(new, d(6, 3, 5));

        let hex = tri(6, &[(1, 4), (1, 5), (2, 4)]);
        let (t, new) = hex.flip(d(6, 2, 4)).unwrap();
        assert_eq!(t, tri(6, &[(1, 3), (1, 4), (1, 5)]));
        assert_eq!(new, d(6, 1, 3));
    }

    #[test]
    fn single_flip_is_an_involution_changing_one_diagonal() {
        for n in 4..=8 {
            for t in enumerate_triangulations(n).unwrap() {
                for dg in t.diagonals() {
                    let (u, new) = t.flip(dg).unwrap();
                    assert_eq!((t.mask ^ u.mask).count_ones(), 2);
                    Triangulation::new(n, u.diagonals()).unwrap();
                    assert_eq!(u.flip(new).unwrap(), (t, dg));
                }
            }
        }
    }

    #[test]
    fn pair_flip_figure_example() {
        let p = DisjointPair::new(tri(6, &[(1, 4), (1, 5), (2, 4)]), tri(6, &[(1, 3), (3, 6), (4, 6)])).unwrap();
        let out = flip_pair(&p, FlipMove::new(Side::First, d(6, 2, 4))).unwrap();
        assert_eq!(out.kind, FlipKind::Double);
        assert_eq!(*out.pair.first(), tri(6, &[(1, 3), (1, 4), (1, 5)]));
        assert_eq!(*out.pair.second(), tri(6, &[(2, 6), (3, 6), (4, 6)]));
        assert_eq!(out.inverse, FlipMove::new(Side::Second, d(6, 2, 6)));
        assert_eq!(flip_pair(&out.pair, out.inverse).unwrap().pair, p);
    }

    #[test]
    fn pair_flip_single_example() {
        let p = DisjointPair::new(tri(5, &[(1, 3), (1, 4)]), tri(5, &[(2, 5), (3, 5)])).unwrap();
        let out = flip_pair(&p, FlipMove::new(Side::First, d(5, 1, 3))).unwrap();
        assert_eq!(out.kind, FlipKind::Single);
        assert_eq!(*out.pair.first(), tri(5, &[(2, 4), (1, 4)]));
        assert_eq!(out.pair.second(), p.second());
        // brute-force disjointness oracle
        let shared = out.pair.first().diagonals().iter().any(|x| out.pair.second().diagonals().contains(x));
        assert!(!shared);
        assert_eq!(flip_pair(&out.pair, out.inverse).unwrap().pair, p);
    }

    #[test]
    fn square_neighbors_repeat_the_other_pair() {
        let pairs = enumerate_disjoint_pairs(4).unwrap();
        assert_eq!(pairs.len(), 2);
        for p in &pairs {
            let nb = neighbors(p);
            assert_eq!(nb.len(), 2);
            let other = pairs.iter().find(|q| *q != p).unwrap();
            assert!(nb.iter().all(|(_, q)| q == other));
        }
    }

    #[test]
    fn neighbor_counts_small() {
        for n in [5, 6] {
            for p in enumerate_disjoint_pairs(n).unwrap() {
                let mut nb: Vec<_> = neighbors(&p).into_iter().map(|(_, q)| q).collect();
                assert_eq!(nb.len(), 2 * (n - 3));
                assert!(!nb.contains(&p));
                nb.sort();
                nb.dedup();
                assert_eq!(nb.len(), 2 * (n - 3));
            }
        }
    }

    #[test]
    fn triangulation_counts_are_catalan() {
        for n in 3..=12 {
            let ts = enumerate_triangulations(n).unwrap();
            assert_eq!(ts.len(), catalan(n - 2), "n = {n}");
            assert!(ts.windows(2).all(|w| w[0] < w[1]));
        }
        assert_eq!(enumerate_triangulations(5).unwrap().len(), 5);
        assert_eq!(enumerate_triangulations(6).unwrap().len(), 14);
        assert_eq!(enumerate_triangulations(8).unwrap().len(), 132);
    }

    #[test]
    fn caps_are_enforced() {
        assert_eq!(
            enumerate_triangulations(15),
            Err(PolygonError::CapExceeded { n: 15, cap: DEFAULT_TRIANGULATION_CAP })
        );
        assert!(enumerate_disjoint_pairs(12).is_err());
        assert!(enumerate_triangulations(2).is_err());
    }

    #[test]
    fn disjoint_pair_counts() {
        assert_eq!(enumerate_disjoint_pairs(5).unwrap().len(), 10);
        assert_eq!(enumerate_disjoint_pairs(6).unwrap().len(), 68);
        let pairs = enumerate_disjoint_pairs(7).unwrap();
        assert_eq!(pairs.len(), 546);
        for p in &pairs {
            assert!(pairs.binary_search(&p.swapped()).is_ok());
        }
    }

    #[test]
    fn counting_matches_listing() {
        for n in 3..=9 {
            let listed = enumerate_disjoint_pairs(n).unwrap().len() as u128;
            assert_eq!(count_disjoint_pairs(n).unwrap(), listed, "n = {n}");
        }
    }

    #[test]
    fn brute_force_pair_filter_agrees() {
        let ts = enumerate_triangulations(7).unwrap();
        let mut brute = Vec::new();
        for a in &ts {
            for b in &ts {
                let da = a.diagonals();
                if b.diagonals().iter().all(|x| !da.contains(x)) {
                    brute.push(DisjointPair::new(*a, *b).unwrap());
                }
            }
        }
        assert_eq!(brute, enumerate_disjoint_pairs(7).unwrap());
    }

    #[test]
    fn fan_examples() {
        assert_eq!(fan(6, 1).unwrap(), tri(6, &[(1, 3), (1, 4), (1, 5)]));
        assert_eq!(fan(5, 2).unwrap(), tri(5, &[(2, 4), (2, 5)]));
        assert_eq!(fan(4, 1).unwrap(), tri(4, &[(1, 3)]));
        assert!(DisjointPair::standard(9).is_ok());
    }

    #[test]
    fn text_round_trip() {
        let t = fan(6, 1).unwrap();
        assert_eq!(t.to_string(), "6:[1-3,1-4,1-5]");
        assert_eq!("6:[1-3,1-4,1-5]".parse::<Triangulation>().unwrap(), t);
        assert_eq!("3:[]".parse::<Triangulation>().unwrap().n(), 3);
        let p = DisjointPair::standard(5).unwrap();
        assert_eq!(p.to_string(), "5:[1-3,1-4]|5:[2-5,3-5]");
        assert_eq!(p.to_string().parse::<DisjointPair>().unwrap(), p);
        assert!("5:[1-3,1-4]|5:[1-3,3-5]".parse::<DisjointPair>().is_err());
        assert!("5:1-3".parse::<Triangulation>().is_err());
    }

    #[test]
    fn symmetries_preserve_adjacency() {
        let pairs = enumerate_disjoint_pairs(6).unwrap();
        for s in Symmetry::all(6) {
            for p in &pairs {
                let image = s.apply(p);
                assert!(pairs.binary_search(&image).is_ok());
                let mut a: Vec<_> = neighbors(p).into_iter().map(|(_, q)| s.apply(&q)).collect();
                let mut b: Vec<_> = neighbors(&image).into_iter().map(|(_, q)| q).collect();
                a.sort();
                b.sort();
                assert_eq!(a, b);
            }
        }
    }
}
