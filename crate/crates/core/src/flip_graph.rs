//! The flip graph on disjoint pairs, the flip graph on triangulations
//! avoiding a fixed triangulation, and breadth-first search over both.

use std::collections::{HashMap, VecDeque};
use std::fmt::Write as _;

use rayon::prelude::*;
use thiserror::Error;

use crate::polygon::{
    enumerate_disjoint_pairs_with_cap, fan, flip_pair, moves, Diagonal, DisjointPair, FlipMove,
    PolygonError, Side, Symmetry, Triangulation,
};

/// Default cap for materializing the whole flip graph.
pub const DEFAULT_GRAPH_CAP: usize = 9;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GraphError {
    #[error("graph size {n} exceeds the configured cap {cap}")]
    CapExceeded { n: usize, cap: usize },
    #[error("graph is disconnected ({components} components)")]
    Disconnected { components: usize },
    #[error("the graph is empty")]
    Empty,
    #[error("triangulation shares diagonal {0} with the base")]
    NotDisjoint(Diagonal),
    #[error("{0} is not an ear diagonal of the base triangulation")]
    InvalidEar(Diagonal),
    #[error("operation needs a polygon with at least {min} vertices, got {n}")]
    TooSmall { n: usize, min: usize },
    #[error(transparent)]
    Polygon(#[from] PolygonError),
}

/// Read-only adjacency lists indexed by vertex number.
pub trait Adjacency: Sync {
    fn vertex_count(&self) -> usize;
    fn neighbors(&self, v: usize) -> &[u32];
}

/// The flip graph on ordered disjoint pairs of an `n`-gon.
///
/// Vertices are sorted by their text encoding. Every vertex has one
/// neighbor entry per legal move, so `n = 4` yields a doubled edge.
#[derive(Debug, Clone)]
pub struct FlipGraph {
    n: usize,
    degree: usize,
    vertices: Vec<DisjointPair>,
    index: HashMap<DisjointPair, u32>,
    targets: Vec<u32>,
}

impl FlipGraph {
    pub fn build(n: usize) -> Result<Self, GraphError> {
        Self::build_with_cap(n, DEFAULT_GRAPH_CAP)
    }

    pub fn build_with_cap(n: usize, cap: usize) -> Result<Self, GraphError> {
        if n > cap {
            return Err(GraphError::CapExceeded { n, cap });
        }
        let mut vertices = enumerate_disjoint_pairs_with_cap(n, cap.max(n))?;
        vertices.sort_by_cached_key(|p| p.to_string());
        let index: HashMap<DisjointPair, u32> =
            vertices.iter().enumerate().map(|(i, p)| (*p, i as u32)).collect();
        let degree = 2 * (n - 3);
        let targets: Vec<u32> = vertices
            .par_iter()
            .flat_map_iter(|p| {
                moves(p).into_iter().map(|m| {
                    let q = flip_pair(p, m).expect("legal move").pair;
                    index[&q]
                })
            })
            .collect();
        Ok(FlipGraph { n, degree, vertices, index, targets })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn vertices(&self) -> &[DisjointPair] {
        &self.vertices
    }

    pub fn vertex(&self, i: usize) -> &DisjointPair {
        &self.vertices[i]
    }

    pub fn index_of(&self, p: &DisjointPair) -> Option<usize> {
        self.index.get(p).map(|&i| i as usize)
    }

    pub fn edge_count(&self) -> usize {
        self.targets.len() / 2
    }

    /// True iff every vertex has `degree` distinct neighbors other than itself.
    pub fn is_simple(&self) -> bool {
        (0..self.vertices.len()).all(|v| {
            let mut nb = self.neighbors(v).to_vec();
            nb.sort_unstable();
            nb.dedup();
            nb.len() == self.degree && !nb.contains(&(v as u32))
        })
    }

    pub fn is_symmetric(&self) -> bool {
        (0..self.vertices.len()).all(|v| {
            self.neighbors(v)
                .iter()
                .all(|&w| self.neighbors(w as usize).contains(&(v as u32)))
        })
    }

    /// The least vertex index in each orbit under the `4n` polygon symmetries.
    pub fn orbit_representatives(&self) -> Vec<usize> {
        let symmetries = Symmetry::all(self.n);
        let mut seen = vec![false; self.vertices.len()];
        let mut reps = Vec::new();
        for v in 0..self.vertices.len() {
            if seen[v] {
                continue;
            }
            reps.push(v);
            for s in &symmetries {
                let image = self.index[&s.apply(&self.vertices[v])] as usize;
                seen[image] = true;
            }
        }
        reps
    }

    /// Exact diameter, evaluating eccentricities only at orbit representatives.
    pub fn diameter(&self) -> Result<usize, GraphError> {
        let reps = self.orbit_representatives();
        eccentricity_max(self, &reps)
    }

    /// Three mutually adjacent vertices, searched from the pair of standard
    /// triangulations at apexes 1 and `n`.
    pub fn find_triangle(&self) -> Result<[usize; 3], GraphError> {
        if self.n < 5 {
            return Err(GraphError::TooSmall { n: self.n, min: 5 });
        }
        let start = self.index[&DisjointPair::standard(self.n)?] as usize;
        for &b in self.neighbors(start) {
            for &c in self.neighbors(b as usize) {
                if c as usize != start && self.neighbors(c as usize).contains(&(start as u32)) {
                    return Ok([start, b as usize, c as usize]);
                }
            }
        }
        unreachable!("every flip graph with n >= 5 has a triangle at the standard pair")
    }

    pub fn to_dot(&self) -> String {
        let mut out = format!("graph D{} {{\n", self.n);
        for (i, p) in self.vertices.iter().enumerate() {
            let _ = writeln!(out, "  {i} [label=\"{p}\"];");
        }
        for v in 0..self.vertices.len() {
            let mut nb = self.neighbors(v).to_vec();
            nb.sort_unstable();
            nb.dedup();
            for w in nb.into_iter().filter(|&w| w as usize > v) {
                let _ = writeln!(out, "  {v} -- {w};");
            }
        }
        out.push_str("}\n");
        out
    }
}

impl Adjacency for FlipGraph {
    fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    fn neighbors(&self, v: usize) -> &[u32] {
        &self.targets[v * self.degree..(v + 1) * self.degree]
    }
}

/// The three moves that lead from the standard pair back to itself.
pub fn standard_triangle_moves(n: usize) -> Result<[FlipMove; 3], GraphError> {
    if n < 5 {
        return Err(GraphError::TooSmall { n, min: 5 });
    }
    Ok([
        FlipMove::new(Side::Second, Diagonal::new(n, 2, n)?),
        FlipMove::new(Side::Second, Diagonal::new(n, 1, 3)?),
        FlipMove::new(Side::First, Diagonal::new(n, 2, 4)?),
    ])
}

/// Single-flip graph on the triangulations sharing no diagonal with `base`.
#[derive(Debug, Clone)]
pub struct InducedTriGraph {
    base: Triangulation,
    vertices: Vec<Triangulation>,
    offsets: Vec<usize>,
    targets: Vec<u32>,
}

impl InducedTriGraph {
    pub fn new(base: &Triangulation) -> Self {
        let vertices = crate::polygon::triangulations_avoiding(base);
        let index: HashMap<Triangulation, u32> =
            vertices.iter().enumerate().map(|(i, t)| (*t, i as u32)).collect();
        let mut offsets = vec![0];
        let mut targets = Vec::new();
        for t in &vertices {
            for d in t.diagonals() {
                let (u, _) = t.flip(d).expect("own diagonal");
                if let Some(&j) = index.get(&u) {
                    targets.push(j);
                }
            }
            offsets.push(targets.len());
        }
        InducedTriGraph { base: *base, vertices, offsets, targets }
    }

    pub fn base(&self) -> &Triangulation {
        &self.base
    }

    pub fn vertices(&self) -> &[Triangulation] {
        &self.vertices
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn diameter(&self) -> Result<usize, GraphError> {
        let all: Vec<usize> = (0..self.vertices.len()).collect();
        eccentricity_max(self, &all)
    }
}

impl Adjacency for InducedTriGraph {
    fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    fn neighbors(&self, v: usize) -> &[u32] {
        &self.targets[self.offsets[v]..self.offsets[v + 1]]
    }
}

pub fn induced_disjoint_graph(base: &Triangulation) -> InducedTriGraph {
    InducedTriGraph::new(base)
}

/// Distances from `source`; unreachable vertices get `u32::MAX`.
pub fn bfs_distances<G: Adjacency + ?Sized>(g: &G, source: usize) -> Vec<u32> {
    let mut dist = vec![u32::MAX; g.vertex_count()];
    let mut queue = VecDeque::new();
    dist[source] = 0;
    queue.push_back(source);
    while let Some(v) = queue.pop_front() {
        let next = dist[v] + 1;
        for &w in g.neighbors(v) {
            let w = w as usize;
            if dist[w] == u32::MAX {
                dist[w] = next;
                queue.push_back(w);
            }
        }
    }
    dist
}

pub fn component_count<G: Adjacency + ?Sized>(g: &G) -> usize {
    let mut label = vec![false; g.vertex_count()];
    let mut count = 0;
    for s in 0..g.vertex_count() {
        if label[s] {
            continue;
        }
        count += 1;
        label[s] = true;
        let mut stack = vec![s];
        while let Some(v) = stack.pop() {
            for &w in g.neighbors(v) {
                if !std::mem::replace(&mut label[w as usize], true) {
                    stack.push(w as usize);
                }
            }
        }
    }
    count
}

pub fn is_connected<G: Adjacency + ?Sized>(g: &G) -> bool {
    component_count(g) == 1
}

/// Largest eccentricity among `sources`, which must meet every orbit of a
/// group of automorphisms for the result to be the diameter.
pub fn eccentricity_max<G: Adjacency + ?Sized>(g: &G, sources: &[usize]) -> Result<usize, GraphError> {
    if g.vertex_count() == 0 {
        return Err(GraphError::Empty);
    }
    let components = component_count(g);
    if components > 1 {
        return Err(GraphError::Disconnected { components });
    }
    Ok(sources
        .par_iter()
        .map(|&s| *bfs_distances(g, s).iter().max().unwrap() as usize)
        .max()
        .unwrap_or(0))
}

/// Exact diameter by breadth-first search from every vertex.
pub fn diameter<G: Adjacency + ?Sized>(g: &G) -> Result<usize, GraphError> {
    let all: Vec<usize> = (0..g.vertex_count()).collect();
    eccentricity_max(g, &all)
}

/// Single flips taking `t` to the fan whose apex is the vertex cut off by the
/// ear `ear` of `s`, never passing through a triangulation that meets `s`.
///
/// Diagonals are returned in the original labeling, in the order flipped.
pub fn path_to_fan(t: &Triangulation, s: &Triangulation, ear: Diagonal) -> Result<Vec<Diagonal>, GraphError> {
    let n = t.n();
    if s.n() != n {
        return Err(PolygonError::SizeMismatch(n, s.n()).into());
    }
    if let Some(d) = t.diagonals().into_iter().find(|&d| s.contains(d)) {
        return Err(GraphError::NotDisjoint(d));
    }
    let apex = match (ear.a(), ear.b()) {
        (a, b) if b - a == 2 => a + 1,
        (1, b) if b == n - 1 => n,
        (2, b) if b == n => 1,
        _ => return Err(GraphError::InvalidEar(ear)),
    };
    if !s.contains(ear) {
        return Err(GraphError::InvalidEar(ear));
    }
    // Relabel so the apex becomes 1; the ear becomes (2, n).
    let forward = |v: usize| (v + n - apex) % n + 1;
    let backward = |v: usize| (v + apex - 2) % n + 1;
    let mut cur = t.relabel(forward);
    let mut flips = Vec::new();
    loop {
        let mut stops = vec![2];
        stops.extend((3..n).filter(|&j| cur.has_edge(1, j)));
        stops.push(n);
        let Some(w) = stops.windows(2).find(|w| w[1] - w[0] > 1) else {
            break;
        };
        let d = Diagonal::normalized(w[0], w[1]);
        let (next, created) = cur.flip(d)?;
        debug_assert_eq!(created.a(), 1);
        flips.push(Diagonal::normalized(backward(d.a()), backward(d.b())));
        cur = next;
    }
    debug_assert_eq!(cur, fan(n, 1)?);
    Ok(flips)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polygon::{enumerate_disjoint_pairs, enumerate_triangulations, neighbors};
    use num_rational::Ratio;

    fn tri(n: usize, pairs: &[(usize, usize)]) -> Triangulation {
        Triangulation::from_pairs(n, pairs).unwrap()
    }

    #[test]
    fn small_graph_shapes() {
        let g = FlipGraph::build(5).unwrap();
        assert_eq!(g.vertex_count(), 10);
        assert_eq!(g.degree(), 4);
        assert_eq!(g.edge_count(), 20);
        assert!(g.is_simple() && g.is_symmetric() && is_connected(&g));

        let g = FlipGraph::build(6).unwrap();
        assert_eq!(g.vertex_count(), 68);
        assert!(g.is_simple() && is_connected(&g));

        let g3 = FlipGraph::build(3).unwrap();
        assert_eq!(g3.vertex_count(), 1);
        let g4 = FlipGraph::build(4).unwrap();
        assert_eq!(g4.neighbors(0), &[1, 1]);
        assert!(FlipGraph::build(10).is_err());
    }

    #[test]
    fn vertex_order_is_textual() {
        let g = FlipGraph::build(6).unwrap();
        let text: Vec<String> = g.vertices().iter().map(|p| p.to_string()).collect();
        assert!(text.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn adjacency_matches_neighbor_lists() {
        let g = FlipGraph::build(7).unwrap();
        for (i, p) in g.vertices().iter().enumerate() {
            let listed: Vec<u32> = neighbors(p).iter().map(|(_, q)| g.index_of(q).unwrap() as u32).collect();
            assert_eq!(listed, g.neighbors(i));
        }
        assert!(g.is_symmetric());
    }

    #[test]
    fn transition_rows_sum_to_one() {
        let g = FlipGraph::build(6).unwrap();
        for v in 0..g.vertex_count() {
            let row: Ratio<i64> = g.neighbors(v).iter().map(|_| Ratio::new(1, g.degree() as i64)).sum();
            assert_eq!(row, Ratio::from_integer(1));
        }
    }

    #[test]
    fn diameters_within_bounds() {
        for n in 5..=7 {
            let g = FlipGraph::build(n).unwrap();
            let fast = g.diameter().unwrap();
            assert_eq!(fast, diameter(&g).unwrap());
            assert!(fast <= 4 * n - 16, "n = {n}, diameter {fast}");
        }
    }

    #[test]
    fn induced_graph_examples() {
        let s = tri(5, &[(2, 5), (3, 5)]);
        let g = induced_disjoint_graph(&s);
        let brute: Vec<_> = enumerate_triangulations(5)
            .unwrap()
            .into_iter()
            .filter(|t| t.is_disjoint(&s))
            .collect();
        assert_eq!(g.vertices(), brute.as_slice());
        assert!(is_connected(&g));

        let g = induced_disjoint_graph(&fan(6, 1).unwrap());
        assert!(g.diameter().unwrap() <= 4);
    }

    #[test]
    fn induced_graphs_connected_at_eight() {
        for s in enumerate_triangulations(8).unwrap() {
            let g = induced_disjoint_graph(&s);
            assert!(g.diameter().unwrap() <= 8);
        }
    }

    #[test]
    fn path_to_fan_example() {
        let s = tri(6, &[(2, 6), (2, 5), (3, 5)]);
        let t = tri(6, &[(1, 3), (3, 6), (4, 6)]);
        let ear = Diagonal::new(6, 2, 6).unwrap();
        let path = path_to_fan(&t, &s, ear).unwrap();
        let expected: Vec<_> = [(3, 6), (4, 6)].iter().map(|&(a, b)| Diagonal::new(6, a, b).unwrap()).collect();
        assert_eq!(path, expected);
        assert!(path_to_fan(&fan(6, 1).unwrap(), &s, ear).unwrap().is_empty());
        assert!(matches!(path_to_fan(&s, &s, ear), Err(GraphError::NotDisjoint(_))));
        assert!(matches!(
            path_to_fan(&t, &s, Diagonal::new(6, 2, 5).unwrap()),
            Err(GraphError::InvalidEar(_))
        ));
    }

    #[test]
    fn path_to_fan_exhaustive() {
        for n in 5..=8 {
            for s in enumerate_triangulations(n).unwrap() {
                let ears: Vec<Diagonal> = s
                    .diagonals()
                    .into_iter()
                    .filter(|d| d.b() - d.a() == 2 || d.b() - d.a() == n - 2)
                    .collect();
                assert!(!ears.is_empty());
                for &ear in &ears {
                    let apex = if ear.b() - ear.a() == 2 { ear.a() + 1 } else if ear.a() == 1 { n } else { 1 };
                    let target = fan(n, apex).unwrap();
                    for t in crate::polygon::triangulations_avoiding(&s) {
                        let path = path_to_fan(&t, &s, ear).unwrap();
                        let have = t.diagonals().iter().filter(|&&d| target.contains(d)).count();
                        assert_eq!(path.len(), n - 3 - have);
                        if t != target {
                            assert!(path.len() <= n - 4);
                        }
                        let mut cur = t;
                        for d in path {
                            let (next, _) = cur.flip(d).unwrap();
                            let after = next.diagonals().iter().filter(|&&x| target.contains(x)).count();
                            let before = cur.diagonals().iter().filter(|&&x| target.contains(x)).count();
                            assert_eq!(after, before + 1);
                            assert!(next.is_disjoint(&s));
                            cur = next;
                        }
                        assert_eq!(cur, target);
                    }
                }
            }
        }
    }

    #[test]
    fn triangles_exist() {
        for n in [5, 6, 8] {
            let g = FlipGraph::build(n).unwrap();
            let [a, b, c] = g.find_triangle().unwrap();
            assert!(g.neighbors(a).contains(&(b as u32)));
            assert!(g.neighbors(b).contains(&(c as u32)));
            assert!(g.neighbors(c).contains(&(a as u32)));
            assert_eq!(*g.vertex(a), DisjointPair::standard(n).unwrap());
        }
    }

    #[test]
    fn standard_moves_close_a_triangle() {
        for n in 5..=10 {
            let start = DisjointPair::standard(n).unwrap();
            let mut cur = start;
            let mut seen = vec![cur];
            for m in standard_triangle_moves(n).unwrap() {
                cur = flip_pair(&cur, m).unwrap().pair;
                seen.push(cur);
            }
            assert_eq!(cur, start, "n = {n}");
            assert_ne!(seen[1], seen[2]);
            assert_ne!(seen[0], seen[2]);
        }
    }

    #[test]
    fn symmetric_adjacency_exhaustive() {
        for n in 5..=7 {
            let pairs = enumerate_disjoint_pairs(n).unwrap();
            for p in &pairs {
                for (_, q) in neighbors(p) {
                    assert!(neighbors(&q).iter().any(|(_, r)| r == p));
                }
            }
        }
    }

    #[test]
    fn dot_export_shape() {
        let dot = FlipGraph::build(5).unwrap().to_dot();
        assert!(dot.starts_with("graph D5 {\n"));
        assert_eq!(dot.matches(" -- ").count(), 20);
        assert!(dot.contains("[label=\"5:[1-3,1-4]|5:[2-4,2-5]\"]"));
    }
}
